use std::ops::{AddAssign, Mul};

use num_complex::Complex64;

use crate::dsp::{SpreadingCode, SPREADING_FACTOR};
use crate::error::{Error, Result};

/// Correlate each group of 8 chips from `start` with `code`, scaled by 1/8.
///
/// Returns every complete symbol; trailing chips that do not fill a symbol
/// are ignored.
pub fn despread<T>(chips: &[T], code: &SpreadingCode, start: usize) -> Result<Vec<T>>
where
    T: Copy + Default + AddAssign + Mul<f64, Output = T>,
{
    let available = chips.len().saturating_sub(start);
    if available < SPREADING_FACTOR {
        return Err(Error::PartialSymbol { needed: SPREADING_FACTOR, available });
    }
    Ok(chips[start..]
        .chunks_exact(SPREADING_FACTOR)
        .map(|sym| {
            let mut acc = T::default();
            for (c, &k) in sym.iter().zip(code) {
                acc += *c * (f64::from(k) / SPREADING_FACTOR as f64);
            }
            acc
        })
        .collect())
}

/// Bit `k` is set when symbol `k+1` flipped against symbol `k`.
pub fn dbpsk_demod(symbols: &[Complex64]) -> Vec<bool> {
    symbols.windows(2).map(|w| (w[1] * w[0].conj()).re < 0.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::spreading_code;
    use crate::tx::{dbpsk_encode, spread};
    use proptest::prelude::*;

    fn cx(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&r| Complex64::new(r, 0.0)).collect()
    }

    #[test]
    fn despread_examples() {
        let c3 = spreading_code(3).unwrap();
        let c5 = spreading_code(5).unwrap();
        assert_eq!(despread(&spread(&[1.0], &c3), &c3, 0).unwrap(), vec![1.0]);
        assert_eq!(despread(&spread(&[1.0], &c3), &c5, 0).unwrap(), vec![0.0]);
        assert!(matches!(despread(&[1.0; 12], &c3, 6), Err(Error::PartialSymbol { needed: 8, available: 6 })));
    }

    #[test]
    fn demod_examples() {
        assert_eq!(dbpsk_demod(&cx(&[1.0, 1.0, -1.0])), vec![false, true]);
        let s = cx(&[1.0, -1.0, -1.0, 1.0]);
        let rotated: Vec<Complex64> = s.iter().map(|z| -z).collect();
        assert_eq!(dbpsk_demod(&s), dbpsk_demod(&rotated));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn spread_despread_identity(bits in proptest::collection::vec(any::<bool>(), 1..64), code in 0usize..8) {
            let c = spreading_code(code).unwrap();
            let symbols: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
            prop_assert_eq!(despread(&spread(&symbols, &c), &c, 0).unwrap(), symbols);
        }

        #[test]
        fn dbpsk_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..128)) {
            prop_assert_eq!(dbpsk_demod(&cx(&dbpsk_encode(&bits))), bits);
        }
    }
}
