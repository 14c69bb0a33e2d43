use crate::error::{invalid, Result};

/// Chips per DBPSK symbol.
pub const SPREADING_FACTOR: usize = 8;

/// One row of H_8, used both as spreading code and as sync word seed.
pub type SpreadingCode = [i8; SPREADING_FACTOR];

/// Sylvester-Hadamard matrix with ±1 entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    order: usize,
    rows: Vec<Vec<i8>>,
}

impl HadamardMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Option<&[i8]> {
        self.rows.get(i).map(Vec::as_slice)
    }
}

/// Build H_order by the recursion H_2n = [[H_n, H_n], [H_n, -H_n]], H_1 = 1.
pub fn hadamard(order: usize) -> Result<HadamardMatrix> {
    if !order.is_power_of_two() {
        return Err(invalid(format!("Hadamard order must be a power of two, got {order}")));
    }
    let mut rows = vec![vec![1i8]];
    while rows.len() < order {
        let n = rows.len();
        let mut next = Vec::with_capacity(2 * n);
        for r in &rows {
            next.push(r.iter().chain(r.iter()).copied().collect());
        }
        for r in &rows {
            next.push(r.iter().copied().chain(r.iter().map(|v| -v)).collect());
        }
        rows = next;
    }
    Ok(HadamardMatrix { order, rows })
}

/// Row `load_index` (0-based) of H_8.
pub fn spreading_code(load_index: usize) -> Result<SpreadingCode> {
    if load_index >= SPREADING_FACTOR {
        return Err(invalid(format!("spreading code index must be below {SPREADING_FACTOR}, got {load_index}")));
    }
    let h = hadamard(SPREADING_FACTOR)?;
    let mut code = [0i8; SPREADING_FACTOR];
    code.copy_from_slice(&h.rows[load_index]);
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(h: &HadamardMatrix) -> Vec<Vec<i64>> {
        let n = h.order();
        (0..n)
            .map(|i| {
                (0..n).map(|j| h.rows[i].iter().zip(&h.rows[j]).map(|(a, b)| (*a as i64) * (*b as i64)).sum()).collect()
            })
            .collect()
    }

    #[test]
    fn small_orders() {
        assert_eq!(hadamard(1).unwrap().rows(), &[vec![1]]);
        assert_eq!(hadamard(2).unwrap().rows(), &[vec![1, 1], vec![1, -1]]);
    }

    #[test]
    fn orthogonal_up_to_64() {
        let mut n = 1;
        while n <= 64 {
            let g = gram(&hadamard(n).unwrap());
            for (i, row) in g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    assert_eq!(*v, if i == j { n as i64 } else { 0 }, "order {n} ({i},{j})");
                }
            }
            n *= 2;
        }
    }

    #[test]
    fn recursion_holds() {
        let h4 = hadamard(4).unwrap();
        let h8 = hadamard(8).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v = h4.rows[i][j];
                assert_eq!(h8.rows[i][j], v);
                assert_eq!(h8.rows[i][j + 4], v);
                assert_eq!(h8.rows[i + 4][j], v);
                assert_eq!(h8.rows[i + 4][j + 4], -v);
            }
        }
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(hadamard(0).is_err());
        assert!(hadamard(6).is_err());
    }

    #[test]
    fn codes() {
        assert_eq!(spreading_code(0).unwrap(), [1; 8]);
        assert_eq!(spreading_code(3).unwrap(), [1, -1, -1, 1, 1, -1, -1, 1]);
        assert_eq!(spreading_code(5).unwrap(), [1, -1, 1, -1, -1, 1, -1, 1]);
        assert!(spreading_code(8).is_err());
        for i in 0..8 {
            for j in 0..8 {
                let a = spreading_code(i).unwrap();
                let b = spreading_code(j).unwrap();
                let dot: i32 = a.iter().zip(&b).map(|(x, y)| (*x as i32) * (*y as i32)).sum();
                assert_eq!(dot, if i == j { 8 } else { 0 });
            }
        }
    }
}
