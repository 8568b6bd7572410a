use num_complex::Complex64;

use crate::math::{cos, floor, sin, sqrt, PI};
use crate::{Error, Result};

use super::WaveguideGeometry;

/// Which strip a decoupled mode lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `0 < x2 < d_plus`
    Plus,
    /// `-d_minus < x2 < 0`
    Minus,
}

/// Label of a decoupled band: strip, longitudinal index `m`, transverse index `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub branch: Branch,
    pub m: i64,
    pub p: u32,
}

impl ModeIndex {
    pub fn new(branch: Branch, m: i64, p: u32) -> Self {
        Self { branch, m, p }
    }
}

/// `((k + 2πm) / (2h))^2`
#[inline]
pub fn longitudinal_energy(k: f64, m: i64, half_period: f64) -> f64 {
    let q = (k + 2.0 * PI * m as f64) / (2.0 * half_period);
    q * q
}

/// `(π / width)^2 (p + 1/2)^2`, the Neumann/Dirichlet transverse level.
#[inline]
pub fn transverse_energy(width: f64, p: u32) -> f64 {
    let q = PI / width * (p as f64 + 0.5);
    q * q
}

/// Band function of the decoupled strips.
pub fn unperturbed_eigenvalue(geom: &WaveguideGeometry, mode: ModeIndex, k: f64) -> f64 {
    longitudinal_energy(k, mode.m, geom.half_period())
        + transverse_energy(geom.width(mode.branch), mode.p)
}

/// Eigenfunction `exp(iπ m x1 / h) cos((π/d)(p + 1/2)|x2|)` of a decoupled
/// band. It does not depend on `k`: the Bloch phase lives in the operator.
pub fn evaluate_mode(
    geom: &WaveguideGeometry,
    mode: ModeIndex,
    point: (f64, f64),
) -> Result<Complex64> {
    let (x1, x2) = point;
    let width = geom.width(mode.branch);
    let inside = match mode.branch {
        Branch::Plus => (0.0..=width).contains(&x2),
        Branch::Minus => (-width..=0.0).contains(&x2),
    };
    if !inside {
        return Err(Error::PointOutsideStrip {
            branch: mode.branch,
            x2,
        });
    }
    let phase = PI * mode.m as f64 * x1 / geom.half_period();
    let transverse = cos(PI / width * (mode.p as f64 + 0.5) * x2.abs());
    Ok(Complex64::new(cos(phase), sin(phase)) * transverse)
}

/// Range `[min, max]` of `E_{m,p}` over the closed zone `|k| <= π`.
pub fn band_range(geom: &WaveguideGeometry, mode: ModeIndex) -> (f64, f64) {
    let t = transverse_energy(geom.width(mode.branch), mode.p);
    let scale = 2.0 * geom.half_period();
    let (lo, hi) = longitudinal_window(mode.m);
    let lo = lo * PI / scale;
    let hi = hi * PI / scale;
    (lo * lo + t, hi * hi + t)
}

/// `|k + 2πm| / π` ranges over `[2|m| - 1, 2|m| + 1]` (or `[0, 1]` for `m = 0`).
fn longitudinal_window(m: i64) -> (f64, f64) {
    if m == 0 {
        (0.0, 1.0)
    } else {
        let a = 2.0 * m.unsigned_abs() as f64;
        (a - 1.0, a + 1.0)
    }
}

/// Number of decoupled bands `E^±_{m,p}` whose range contains `energy`.
pub fn count_bands_containing(geom: &WaveguideGeometry, energy: f64) -> usize {
    let mut count = 0;
    for branch in [Branch::Plus, Branch::Minus] {
        let width = geom.width(branch);
        let mut p = 0u32;
        loop {
            let t = transverse_energy(width, p);
            if t > energy {
                break;
            }
            // E - t = (|k + 2πm| / 2h)^2 needs 2|m| - 1 <= 2h sqrt(E - t) / π.
            let reach = 2.0 * geom.half_period() * sqrt(energy - t) / PI;
            let m_max = floor((reach + 1.0) / 2.0) as i64;
            for m in -m_max..=m_max {
                let (lo, hi) = band_range(geom, ModeIndex::new(branch, m, p));
                if lo <= energy && energy <= hi {
                    count += 1;
                }
            }
            p += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(d: f64, h: f64) -> WaveguideGeometry {
        WaveguideGeometry::new(d, h, 0.0).unwrap()
    }

    #[test]
    fn bottom_of_upper_strip() {
        let g = geom(2.0, 1.7);
        assert_eq!(
            unperturbed_eigenvalue(&g, ModeIndex::new(Branch::Plus, 0, 0), 0.0),
            0.25
        );
    }

    #[test]
    fn lower_strip_ground_level() {
        let g = geom(2.0, 2.3);
        let e = unperturbed_eigenvalue(&g, ModeIndex::new(Branch::Minus, 0, 0), 0.0);
        assert!((e - 0.616_850_275_068_085).abs() < 1e-14);
    }

    #[test]
    fn first_folded_upper_band_at_zero() {
        let g = geom(2.0, 2.3);
        let e = unperturbed_eigenvalue(&g, ModeIndex::new(Branch::Plus, -1, 0), 0.0);
        assert!((e - 2.115_709_716_652_053).abs() < 1e-13);
    }

    #[test]
    fn mode_values() {
        let g = geom(2.0, 2.3);
        let plus = ModeIndex::new(Branch::Plus, 0, 0);
        assert_eq!(evaluate_mode(&g, plus, (0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        for (m, p) in [(0, 0), (3, 1), (-2, 4)] {
            let v = evaluate_mode(&g, ModeIndex::new(Branch::Plus, m, p), (0.7, PI)).unwrap();
            assert!(v.norm() < 1e-15);
        }
        let minus = ModeIndex::new(Branch::Minus, 0, 0);
        let v = evaluate_mode(&g, minus, (0.0, -1.0)).unwrap();
        assert!((v.re - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn mode_rejects_wrong_strip() {
        let g = geom(2.0, 2.3);
        let plus = ModeIndex::new(Branch::Plus, 0, 0);
        assert!(matches!(
            evaluate_mode(&g, plus, (0.0, -0.5)),
            Err(Error::PointOutsideStrip { .. })
        ));
        let minus = ModeIndex::new(Branch::Minus, 1, 0);
        assert!(evaluate_mode(&g, minus, (0.0, 0.5)).is_err());
        assert!(evaluate_mode(&g, minus, (0.0, -2.5)).is_err());
    }

    #[test]
    fn band_counts() {
        let g = geom(2.0, 2.3);
        assert_eq!(count_bands_containing(&g, 0.2), 0);
        assert_eq!(count_bands_containing(&g, 0.25), 1);
        assert_eq!(count_bands_containing(&g, 0.917_885_801_331_089), 3);
    }
}
