use std::collections::VecDeque;

use num_complex::Complex64;

use crate::error::Result;
use crate::tx::{sync_word, PAYLOAD_CHIPS, SYNC_WORD_LEN};

/// Default detection level on the normalized correlation.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Chips searched for the peak after the first threshold crossing.
pub const SEARCH_WINDOW: usize = 32;
/// A second peak at least this fraction of the kept one marks the event ambiguous.
pub const AMBIGUITY_RATIO: f64 = 0.9;
/// Chips past the end of a payload during which no new search starts.
///
/// The payload is spread with the same code as the sync word, so its tail
/// followed by silence can look like a codeword. Once the correlator window
/// holds at most 21 payload chips the metric is bounded by 21/64, below any
/// sensible threshold; a frame sent back to back still peaks 78 chips on.
pub const POST_PAYLOAD_HOLDOFF: usize = 56;

/// Sync word found in the chip stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameEvent {
    /// Index of the last sync-word chip.
    pub sync_end: usize,
    /// Index of the first payload chip.
    pub payload_start: usize,
    /// Normalized correlation at the peak, before the nonlinearity.
    pub metric: f64,
    pub ambiguous: bool,
}

#[derive(Debug, Clone)]
struct Search {
    first: usize,
    best: (usize, f64),
    seen: Vec<(usize, f64)>,
}

/// Sliding correlator against the 78-chip sync word.
#[derive(Debug, Clone)]
pub struct FrameSyncState {
    pub correlator_taps: Vec<f64>,
    /// Detection level on the normalized correlation, in (0, 1].
    pub threshold: f64,
    pub window_energy: f64,
    taps_energy: f64,
    window: VecDeque<Complex64>,
    index: usize,
    last_metric: f64,
    search: Option<Search>,
    holdoff_until: usize,
}

impl FrameSyncState {
    pub fn new(code_index: usize, threshold: f64) -> Result<Self> {
        let taps = sync_word(code_index)?;
        let taps_energy = taps.iter().map(|t| t * t).sum();
        Ok(Self {
            correlator_taps: taps,
            threshold,
            window_energy: 0.0,
            taps_energy,
            window: VecDeque::with_capacity(SYNC_WORD_LEN),
            index: 0,
            last_metric: 0.0,
            search: None,
            holdoff_until: 0,
        })
    }

    /// `|sum taps*chips|^2 / (E_taps * E_window)` for the latest chip, in [0, 1].
    pub fn normalized_metric(&self) -> f64 {
        self.last_metric
    }

    /// The normalized metric squared (fourth power of the correlation magnitude).
    pub fn metric(&self) -> f64 {
        self.last_metric * self.last_metric
    }

    pub fn step(&mut self, chip: Complex64) -> Option<FrameEvent> {
        if self.window.len() == SYNC_WORD_LEN {
            self.window.pop_front();
        }
        self.window.push_back(chip);
        let n = self.index;
        self.index += 1;

        self.last_metric = 0.0;
        if self.window.len() == SYNC_WORD_LEN {
            let corr: Complex64 = self.window.iter().zip(&self.correlator_taps).map(|(c, t)| c * t).sum();
            self.window_energy = self.window.iter().map(|c| c.norm_sqr()).sum();
            if self.window_energy > 0.0 {
                self.last_metric = (corr.norm_sqr() / (self.taps_energy * self.window_energy)).min(1.0);
            }
        }
        let m = self.last_metric;

        if let Some(s) = self.search.as_mut() {
            s.seen.push((n, m));
            if m > s.best.1 {
                s.best = (n, m);
            }
        } else if n >= self.holdoff_until && m * m >= self.threshold * self.threshold {
            self.search = Some(Search { first: n, best: (n, m), seen: vec![(n, m)] });
        }

        let done = matches!(&self.search, Some(s) if n + 1 >= s.first + SEARCH_WINDOW);
        if !done {
            return None;
        }
        let s = self.search.take()?;
        let (peak, metric) = s.best;
        let ambiguous = s
            .seen
            .iter()
            .any(|&(i, v)| i.abs_diff(peak) >= 2 && v >= AMBIGUITY_RATIO * metric && is_local_peak(&s.seen, i));
        self.holdoff_until = peak + 1 + PAYLOAD_CHIPS + POST_PAYLOAD_HOLDOFF;
        Some(FrameEvent { sync_end: peak, payload_start: peak + 1, metric, ambiguous })
    }
}

fn is_local_peak(seen: &[(usize, f64)], i: usize) -> bool {
    let at = |j: usize| seen.iter().find(|&&(k, _)| k == j).map(|&(_, v)| v);
    let v = at(i).unwrap_or(0.0);
    at(i.wrapping_sub(1)).is_none_or(|p| p <= v) && at(i + 1).is_none_or(|p| p <= v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx::{sync_codeword, FRAME_CHIPS};

    fn feed(fs: &mut FrameSyncState, chips: &[f64]) -> Vec<FrameEvent> {
        chips.iter().filter_map(|&c| fs.step(Complex64::new(c, 0.0))).collect()
    }

    #[test]
    fn matching_word_peaks_at_one() {
        let mut fs = FrameSyncState::new(3, DEFAULT_THRESHOLD).unwrap();
        let mut chips = vec![0.0; 20];
        chips.extend(sync_word(3).unwrap());
        let mut peak: f64 = 0.0;
        for &c in &chips {
            fs.step(Complex64::new(c, 0.0));
            peak = peak.max(fs.normalized_metric());
        }
        assert!((peak - 1.0).abs() < 1e-12);
    }

    #[test]
    fn event_points_past_the_guard() {
        let mut fs = FrameSyncState::new(5, DEFAULT_THRESHOLD).unwrap();
        let mut chips = vec![0.0; 40];
        chips.extend(sync_word(5).unwrap());
        chips.extend(vec![0.0; 64]);
        let ev = feed(&mut fs, &chips);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].payload_start, 40 + SYNC_WORD_LEN);
        assert!(!ev[0].ambiguous);
    }

    #[test]
    fn other_code_never_fires() {
        let mut fs = FrameSyncState::new(5, DEFAULT_THRESHOLD).unwrap();
        let mut chips = vec![0.0; 10];
        for _ in 0..3 {
            chips.extend(sync_codeword(3).unwrap());
            chips.extend(vec![0.0; FRAME_CHIPS]);
        }
        assert!(feed(&mut fs, &chips).is_empty());
    }
}
