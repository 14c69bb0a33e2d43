use std::ops::{AddAssign, Mul};

use crate::error::{invalid, Result};

/// Output of [`fir_filter`].
///
/// `samples[n + group_delay]` lines up with input sample `n` for linear-phase
/// (symmetric) taps.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered<T> {
    pub samples: Vec<T>,
    pub group_delay: usize,
}

/// Full linear convolution of `signal` with real `taps`
/// (`signal.len() + taps.len() - 1` outputs).
pub fn fir_filter<T>(signal: &[T], taps: &[f64]) -> Result<Filtered<T>>
where
    T: Copy + Default + AddAssign + Mul<f64, Output = T>,
{
    if taps.is_empty() {
        return Err(invalid("FIR filter needs at least one tap"));
    }
    let group_delay = (taps.len() - 1) / 2;
    if signal.is_empty() {
        return Ok(Filtered { samples: Vec::new(), group_delay });
    }
    let n_out = signal.len() + taps.len() - 1;
    let mut out = vec![T::default(); n_out];
    for (n, y) in out.iter_mut().enumerate() {
        let k_lo = n.saturating_sub(signal.len() - 1);
        let k_hi = n.min(taps.len() - 1);
        let mut acc = T::default();
        for k in k_lo..=k_hi {
            acc += signal[n - k] * taps[k];
        }
        *y = acc;
    }
    Ok(Filtered { samples: out, group_delay })
}
