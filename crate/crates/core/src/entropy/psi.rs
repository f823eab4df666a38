use crate::{Error, Result};

/// `phi(t) = t ln t - t + 1`, the one-variable form of `psi(x, y) = y phi(x / y)`.
/// A Taylor series around `t = 1` keeps full relative accuracy near the minimum.
pub fn phi(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let r = t - 1.0;
    if r.abs() < 0.1 {
        // sum_{k>=2} (-1)^k r^k / (k (k-1))
        let mut sum = 0.0;
        let mut pow = r * r;
        for k in 2..40u32 {
            let term = pow / (k as f64 * (k - 1) as f64);
            sum += if k % 2 == 0 { term } else { -term };
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            pow *= r;
        }
        sum
    } else {
        t * t.ln() - t + 1.0
    }
}

/// `x ln(x/y) - x + y` without the domain checks; `x = 0` gives `y`.
#[inline]
pub(crate) fn psi_raw(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        y
    } else {
        y * phi(x / y)
    }
}

/// `psi(x, y) = x ln(x/y) - x + y` for `x, y > 0`.
pub fn psi(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("psi needs x, y > 0, got ({x}, {y})")));
    }
    Ok(psi_raw(x, y))
}

/// Like [`psi`] but accepts `x = 0` with the limiting value `y`.
pub fn psi_limit(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("psi needs x >= 0, y > 0, got ({x}, {y})")));
    }
    Ok(psi_raw(x, y))
}

/// `(sqrt x - sqrt y)^2` written without the cancelling subtraction.
pub fn sqrt_gap_sq(x: f64, y: f64) -> f64 {
    let s = x.sqrt() + y.sqrt();
    if s == 0.0 {
        0.0
    } else {
        let d = (x - y) / s;
        d * d
    }
}

/// `psi(x, y) / (sqrt x - sqrt y)^2`, with the removable value 2 at `x = y`.
///
/// With `r = sqrt(x/y)` this is `(2 r^2 ln r - r^2 + 1) / (r - 1)^2`; near `r = 1`
/// it is summed as a power series in `s = r - 1`.
pub fn psi_ratio(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("psi_ratio needs x, y > 0, got ({x}, {y})")));
    }
    let r = (x / y).sqrt();
    let s = r - 1.0;
    if s.abs() < 0.1 {
        // coefficients of 2 (1+s)^2 ln(1+s) - 2s - s^2, divided by s^2
        let l = |k: i32| -> f64 {
            if k <= 0 {
                0.0
            } else if k % 2 == 1 {
                1.0 / k as f64
            } else {
                -1.0 / k as f64
            }
        };
        let mut sum = 2.0;
        let mut pow = s;
        for j in 3..60i32 {
            let c = 2.0 * (l(j) + 2.0 * l(j - 1) + l(j - 2));
            let term = c * pow;
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
            pow *= s;
        }
        Ok(sum)
    } else {
        Ok((2.0 * r * r * r.ln() - r * r + 1.0) / (s * s))
    }
}
