//! Golden-section refinement of band extrema.

use super::source::BandSource;
use crate::math::{floor, sqrt, PI};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Location folded into `(-π, π]`.
    pub k: f64,
    pub energy: f64,
    pub evaluations: usize,
}

/// Map `k` into `(-π, π]` using the `2π` periodicity of the bands.
pub fn fold_quasimomentum(k: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut q = k - two_pi * floor((k + PI) / two_pi);
    if q <= -PI {
        q += two_pi;
    }
    q
}

/// Golden-section search for the extremum of band `band` on `[lo, hi]`,
/// started from an interior sample `mid` that must be at least as extreme as
/// both endpoints. Stops once the bracket is shorter than `tol_k`; never
/// reports a value worse than the best sample seen.
pub fn refine_extremum(
    source: &dyn BandSource,
    band: usize,
    bracket: (f64, f64, f64),
    kind: ExtremumKind,
    tol_k: f64,
) -> Result<Extremum> {
    let (mut a, mid, mut b) = bracket;
    if !(a < mid && mid < b) {
        return Err(Error::InvalidGrid(alloc::format!("bracket ({a}, {mid}, {b}) is not ordered")));
    }
    if !(tol_k >= 1e-8) {
        return Err(Error::InvalidGrid(alloc::format!("k tolerance {tol_k} below 1e-8")));
    }
    let sign = match kind {
        ExtremumKind::Max => -1.0,
        ExtremumKind::Min => 1.0,
    };
    let mut evaluations = 0usize;
    let mut f = |k: f64| -> Result<f64> {
        evaluations += 1;
        Ok(sign * source.band_energy(band, k)?)
    };
    let fa = f(a)?;
    let fm = f(mid)?;
    let fb = f(b)?;
    if fm > fa || fm > fb {
        return Err(Error::NotBracketed { lo: a, hi: b });
    }

    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let mut best = (mid, fm);
    // Place the second interior point in the larger sub-interval.
    let (mut x1, mut f1, mut x2, mut f2);
    if mid - a > b - mid {
        x2 = mid;
        f2 = fm;
        x1 = b - inv_phi * (b - a);
        if x1 >= x2 {
            x1 = a + (1.0 - inv_phi) * (x2 - a);
        }
        f1 = f(x1)?;
    } else {
        x1 = mid;
        f1 = fm;
        x2 = a + inv_phi * (b - a);
        if x2 <= x1 {
            x2 = x1 + (1.0 - inv_phi) * (b - x1);
        }
        f2 = f(x2)?;
    }
    while b - a > tol_k {
        if f1 <= f2 {
            if f1 < best.1 {
                best = (x1, f1);
            }
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            if x1 >= x2 {
                x1 = 0.5 * (a + x2);
            }
            f1 = f(x1)?;
        } else {
            if f2 < best.1 {
                best = (x2, f2);
            }
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            if x2 <= x1 {
                x2 = 0.5 * (x1 + b);
            }
            f2 = f(x2)?;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    Ok(Extremum { k: fold_quasimomentum(best.0), energy: sign * best.1, evaluations })
}
