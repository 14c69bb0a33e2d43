use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::rng::{streams, substream};
use crate::stream::PassbandStream;

/// Add white Gaussian noise at `snr_db` relative to the ripple power.
///
/// `+inf` adds nothing. The draw comes from the seed's AWGN substream.
pub fn add_awgn(signal: &PassbandStream, snr_db: f64, seed: u64) -> Result<PassbandStream> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(invalid(format!("snr {snr_db} dB")));
    }
    if snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    let sigma = (signal.ripple_power() / 10f64.powf(snr_db / 10.0)).sqrt();
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?;
    let mut rng = substream(seed, streams::AWGN);
    let samples = signal.samples.iter().map(|v| v + normal.sample(&mut rng)).collect();
    Ok(signal.map_ripple(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone() -> PassbandStream {
        let samples = (0..100_000).map(|n| 15.0 + 0.3 * (n as f64 * 1.3).cos()).collect();
        PassbandStream { samples, fs: 64_000.0, dc: 15.0 }
    }

    #[test]
    fn measured_snr_matches() {
        let s = tone();
        for snr in [0.0, 10.0, 20.0] {
            let y = add_awgn(&s, snr, 9).unwrap();
            let noise: f64 =
                y.samples.iter().zip(&s.samples).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / s.len() as f64;
            let measured = 10.0 * (s.ripple_power() / noise).log10();
            assert!((measured - snr).abs() < 0.2, "{snr} dB measured {measured}");
        }
    }

    #[test]
    fn infinite_snr_is_identity() {
        let s = tone();
        assert_eq!(add_awgn(&s, f64::INFINITY, 1).unwrap(), s);
        assert!(add_awgn(&s, f64::NEG_INFINITY, 1).is_err());
        assert!(add_awgn(&s, f64::NAN, 1).is_err());
    }

    #[test]
    fn seeded() {
        let s = tone();
        assert_eq!(add_awgn(&s, 10.0, 5).unwrap(), add_awgn(&s, 10.0, 5).unwrap());
        assert_ne!(add_awgn(&s, 10.0, 5).unwrap(), add_awgn(&s, 10.0, 6).unwrap());
    }
}
