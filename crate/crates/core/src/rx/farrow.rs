use std::ops::{Add, Mul};

/// Cubic Lagrange fractional-delay coefficients `b_l(i)`, rows `l = 0..3`,
/// columns `i = -2, -1, 0, 1`, where `i` addresses sample `m - i`.
pub const FARROW_COEFFS: [[f64; 4]; 4] = [
    [0.0, 0.0, 1.0, 0.0],
    [-1.0 / 6.0, 1.0, -0.5, -1.0 / 3.0],
    [0.0, 0.5, -1.0, 0.5],
    [1.0 / 6.0, -0.5, 0.5, -1.0 / 6.0],
];

/// Interpolate at `m + mu` from the chronological window
/// `[x(m-1), x(m), x(m+1), x(m+2)]`, evaluated in Horner form over `mu`.
pub fn farrow_interpolate<T>(window: [T; 4], mu: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    // window[j] = x(m - 1 + j) carries table column i = 1 - j, stored at 3 - j
    let branch = |l: usize| {
        let b = &FARROW_COEFFS[l];
        window[0] * b[3] + window[1] * b[2] + window[2] * b[1] + window[3] * b[0]
    };
    ((branch(3) * mu + branch(2)) * mu + branch(1)) * mu + branch(0)
}
