use alloc::vec::Vec;

use crate::math::sqrt;
use crate::Result;

use super::BandCrossing;

/// One algebraic identity of the two-band model, checked over many inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    /// Largest scaled discrepancy seen.
    pub worst: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

/// Check the coupling-matrix spectrum, the edge constants and the values at
/// `t = 0` for every crossing and every `t` in `ts`.
///
/// Eigenvalues of the 2x2 matrix come from its trace and determinant, so the
/// comparison with the closed-form roots is not circular.
pub fn identity_suite(crossings: &[BandCrossing], ts: &[f64]) -> Result<Vec<IdentityCheck>> {
    let mut eig: f64 = 0.0;
    let mut sigma: f64 = 0.0;
    let mut tau: f64 = 0.0;
    let mut split: f64 = 0.0;
    let mut at_zero: f64 = 0.0;
    for c in crossings {
        for &t in ts {
            let m = c.coupling_matrix(t);
            let tr = m[0][0] + m[1][1];
            let half_diff = 0.5 * (m[0][0] - m[1][1]);
            let disc = sqrt(half_diff * half_diff + m[0][1] * m[1][0]);
            let (l1, l2) = (0.5 * tr + disc, 0.5 * tr - disc);
            let (f1, f2) = c.correction_roots(t);
            let scale = l1.abs().max(l2.abs()).max(f64::MIN_POSITIVE);
            eig = eig.max((l1 - 0.5 * f1).abs().max((l2 - 0.5 * f2).abs()) / scale);
        }
        let ext = c.correction_extrema()?;
        let geom_free = |v: f64, w: f64| (v - w).abs() / v.abs().max(w.abs()).max(1.0);
        let (tl, tr) = forecast_constants(c);
        sigma = sigma.max(geom_free(ext.t_min, tl.1)).max(geom_free(ext.t_max, tr.1));
        tau = tau.max(geom_free(ext.f1_min, tl.0)).max(geom_free(ext.f2_max, tr.0));
        let expected = 4.0 * sqrt(c.zeta * (1.0 - c.beta * c.beta));
        split = split.max(geom_free(tl.0 - tr.0, expected));
        let (f1, f2) = c.correction_roots(0.0);
        let z2 = 2.0 * (c.zeta + 1.0);
        at_zero = at_zero.max(f1.abs() / z2).max((f2 + z2).abs() / z2);
    }
    Ok(alloc::vec![
        IdentityCheck { name: "eig(M) = f/2", worst: eig, tolerance: 1e-12 },
        IdentityCheck { name: "sigma = argmin/argmax", worst: sigma, tolerance: 1e-12 },
        IdentityCheck { name: "tau = f(t*)", worst: tau, tolerance: 1e-12 },
        IdentityCheck { name: "tau_l - tau_r", worst: split, tolerance: 1e-12 },
        IdentityCheck { name: "f(0)", worst: at_zero, tolerance: 4.0 * f64::EPSILON },
    ])
}

/// `((τ_l, σ_l), (τ_r, σ_r))` straight from the crossing constants, without
/// the geometry normalization check of the forecast.
fn forecast_constants(c: &BandCrossing) -> ((f64, f64), (f64, f64)) {
    let (z, b) = (c.zeta, c.beta);
    let root = sqrt(z * (1.0 - b * b));
    let tail = -b * (z - 1.0) - z - 1.0;
    let sum = c.beta1 + c.beta2;
    let split = 2.0 * b / sum * sqrt(z / (1.0 - b * b));
    let drift = (1.0 - z) / sum;
    ((2.0 * root + tail, -split + drift), (-2.0 * root + tail, split + drift))
}
