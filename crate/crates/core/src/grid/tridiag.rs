use crate::{Error, Result};

/// Solves `(I - r L) x = rhs` where `L` is the Neumann 3-point stencil scaled
/// by `h^2` (so `r = dt d / h^2`), with the Thomas algorithm.
///
/// The matrix has unit column sums, so `sum x = sum rhs` up to rounding, and it
/// is an M-matrix, so a non-negative right-hand side gives a non-negative solution.
pub fn solve_neumann_implicit(rhs: &[f64], r: f64) -> Result<Vec<f64>> {
    let n = rhs.len();
    if n < 2 {
        return Err(Error::Contract(format!("tridiagonal solve needs n >= 2, got {n}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Contract(format!("diffusion number must be non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(rhs.to_vec());
    }
    let diag = |i: usize| if i == 0 || i == n - 1 { 1.0 + r } else { 1.0 + 2.0 * r };
    let off = -r;
    // forward sweep
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = off / diag(0);
    dp[0] = rhs[0] / diag(0);
    for i in 1..n {
        let m = diag(i) - off * cp[i - 1];
        if i < n - 1 {
            cp[i] = off / m;
        }
        dp[i] = (rhs[i] - off * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(x: &[f64], r: f64) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let l = if i == 0 { x[0] } else { x[i - 1] };
                let rr = if i == n - 1 { x[n - 1] } else { x[i + 1] };
                x[i] - r * (l - 2.0 * x[i] + rr)
            })
            .collect()
    }

    #[test]
    fn inverts_the_operator() {
        let rhs: Vec<f64> = (0..17).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
        for r in [0.0, 0.3, 5.0, 400.0] {
            let x = solve_neumann_implicit(&rhs, r).unwrap();
            let back = apply(&x, r);
            for (a, b) in back.iter().zip(&rhs) {
                assert!((a - b).abs() < 1e-11 * (1.0 + r));
            }
            let s0: f64 = rhs.iter().sum();
            let s1: f64 = x.iter().sum();
            assert!((s0 - s1).abs() < 1e-12 * s0);
            assert!(x.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn keeps_nonnegative_spikes() {
        let mut rhs = vec![0.0; 50];
        rhs[0] = 1.0;
        let x = solve_neumann_implicit(&rhs, 100.0).unwrap();
        assert!(x.iter().all(|v| *v >= 0.0));
    }
}
