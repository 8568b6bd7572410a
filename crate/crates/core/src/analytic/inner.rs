use num_complex::Complex64;

use crate::math::{acosh, hypot, ln};
use crate::{Error, Result};

/// Side of the slit `{ξ2 = 0, |ξ1| > 1}` from which a boundary value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitSide {
    Above,
    Below,
}

/// Harmonic profile `X(ξ) = Re ln(z + sqrt(z^2 - 1))`, `z = ξ1 + iξ2`, on the
/// plane cut along `{ξ2 = 0, |ξ1| > 1}`.
///
/// `X` vanishes on the window `[-1, 1]`, is odd in `ξ2`, has zero normal
/// derivative on both banks of the slit and grows like `±(ln|ξ| + ln 2)` in
/// the upper/lower half plane. Points on the open slit need `side`.
pub fn inner_profile(xi: (f64, f64), side: Option<SlitSide>) -> Result<f64> {
    let (x, y) = xi;
    if y == 0.0 {
        if x.abs() <= 1.0 {
            return Ok(0.0);
        }
        return match side {
            Some(SlitSide::Above) => Ok(acosh(x.abs())),
            Some(SlitSide::Below) => Ok(-acosh(x.abs())),
            None => Err(Error::OnSlit { xi1: x }),
        };
    }
    // Evaluate in the upper half plane, where z + i sqrt(1 - z^2) ~ 2z has no
    // cancellation, and extend by oddness.
    let z = Complex64::new(x, y.abs());
    let w = z + Complex64::i() * (Complex64::new(1.0, 0.0) - z * z).sqrt();
    let value = ln(hypot(w.re, w.im));
    Ok(if y > 0.0 { value } else { -value })
}
