use crate::dsp::SpreadingCode;

/// Differential BPSK: a leading +1 reference, then a phase inversion for
/// every `1` bit.
pub fn dbpsk_encode(bits: &[bool]) -> Vec<f64> {
    let mut out = Vec::with_capacity(bits.len() + 1);
    let mut s = 1.0;
    out.push(s);
    for &b in bits {
        if b {
            s = -s;
        }
        out.push(s);
    }
    out
}

/// Replace every symbol by `symbol * code`.
pub fn spread(symbols: &[f64], code: &SpreadingCode) -> Vec<f64> {
    symbols.iter().flat_map(|&s| code.iter().map(move |&c| s * f64::from(c))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::spreading_code;

    #[test]
    fn dbpsk_examples() {
        assert_eq!(dbpsk_encode(&[]), vec![1.0]);
        assert_eq!(dbpsk_encode(&[false, false, false]), vec![1.0; 4]);
        assert_eq!(dbpsk_encode(&[true, true, false, true]), vec![1.0, -1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn spread_examples() {
        let c = spreading_code(3).unwrap();
        let cf: Vec<f64> = c.iter().map(|&v| f64::from(v)).collect();
        assert_eq!(spread(&[1.0], &c), cf);
        assert_eq!(spread(&[-1.0], &c), cf.iter().map(|v| -v).collect::<Vec<_>>());
        for i in 0..8 {
            for j in 0..8 {
                let chips = spread(&[-1.0], &spreading_code(i).unwrap());
                let cj = spreading_code(j).unwrap();
                let dot: f64 = chips.iter().zip(cj.iter()).map(|(a, &b)| a * f64::from(b)).sum();
                assert_eq!(dot, if i == j { -8.0 } else { 0.0 });
            }
        }
        assert_eq!(spread(&[1.0, -1.0, 1.0], &c).len(), 24);
    }
}
