use num_complex::Complex64;

/// Uniformly sampled real bus signal.
///
/// `dc` is the nominal DC level carried by the stream (the bus voltage for
/// a power signal, zero for a pure information signal). Channel blocks that
/// act on the information ripple only use it to separate the two; the
/// receiver never reads it.
#[derive(Debug, Clone, PartialEq)]
pub struct PassbandStream {
    pub samples: Vec<f64>,
    pub fs: f64,
    pub dc: f64,
}

impl PassbandStream {
    pub fn new(samples: Vec<f64>, fs: f64) -> Self {
        Self { samples, fs, dc: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Mean power of the ripple around the nominal DC level.
    pub fn ripple_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|v| (v - self.dc).powi(2)).sum::<f64>() / self.samples.len() as f64
    }

    pub(crate) fn map_ripple(&self, samples: Vec<f64>) -> Self {
        Self { samples, fs: self.fs, dc: self.dc }
    }
}

/// Complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandStream {
    pub samples: Vec<Complex64>,
    pub fs: f64,
}

impl BasebandStream {
    pub fn new(samples: Vec<Complex64>, fs: f64) -> Self {
        Self { samples, fs }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
