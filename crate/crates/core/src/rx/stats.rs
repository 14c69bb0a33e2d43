use std::collections::VecDeque;

/// Sliding-window mean and variance.
#[derive(Debug, Clone)]
pub(crate) struct MovingStats {
    window: VecDeque<f64>,
    len: usize,
    sum: f64,
    sum_sq: f64,
}

impl MovingStats {
    pub fn new(len: usize) -> Self {
        Self { window: VecDeque::with_capacity(len), len, sum: 0.0, sum_sq: 0.0 }
    }

    pub fn push(&mut self, v: f64) {
        if self.window.len() == self.len {
            let old = self.window.pop_front().unwrap_or(0.0);
            self.sum -= old;
            self.sum_sq -= old * old;
        }
        self.window.push_back(v);
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn full(&self) -> bool {
        self.window.len() == self.len
    }

    pub fn mean(&self) -> f64 {
        if self.window.is_empty() {
            0.0
        } else {
            self.sum / self.window.len() as f64
        }
    }

    pub fn variance(&self) -> f64 {
        if self.window.is_empty() {
            return 0.0;
        }
        let n = self.window.len() as f64;
        (self.sum_sq / n - (self.sum / n).powi(2)).max(0.0)
    }

    pub fn clear(&mut self) {
        self.window.clear();
        self.sum = 0.0;
        self.sum_sq = 0.0;
    }
}
