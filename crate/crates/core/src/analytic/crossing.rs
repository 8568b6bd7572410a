use alloc::vec::Vec;

use crate::math::{ceil, floor, sqrt, PI};
use crate::{Error, Result};

use super::dispersion::{
    count_bands_containing, longitudinal_energy, transverse_energy, Branch, ModeIndex,
};
use super::WaveguideGeometry;

/// Crossings are only looked for below the first excited transverse level of
/// the upper strip, `(3/2)^2` for `d_plus = π`.
pub const DEFAULT_ENERGY_CAP: f64 = 2.25;

/// A crossing of the ground transverse bands `E^+_{n,0}` and `E^-_{m,0}` at an
/// interior quasimomentum `k0 ∈ (0, π)` where the two slopes have opposite
/// signs. Its mirror image `(-n, -m, -k0)` is implied and never listed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCrossing {
    /// Longitudinal index of the upper-strip band.
    pub n: i64,
    /// Longitudinal index of the lower-strip band.
    pub m: i64,
    pub k0: f64,
    pub e0: f64,
    pub half_period: f64,
    /// `d_plus / d_minus`, i.e. `π / d` under the usual normalization.
    pub zeta: f64,
    /// `(β1 - β2) / (β1 + β2)`
    pub beta: f64,
    /// `(2πn + k0) / h`
    pub beta1: f64,
    /// `-(2πm + k0) / h`
    pub beta2: f64,
    /// Number of decoupled bands whose range contains `e0`.
    pub kappa: usize,
}

impl BandCrossing {
    /// Assemble the derived constants for a crossing of `E^+_{n,0}` and
    /// `E^-_{m,0}` at `k0`. No eligibility checks are made here.
    pub fn from_indices(geom: &WaveguideGeometry, n: i64, m: i64, k0: f64) -> Self {
        let h = geom.half_period();
        let e0 = longitudinal_energy(k0, n, h) + transverse_energy(geom.d_plus(), 0);
        let beta1 = (2.0 * PI * n as f64 + k0) / h;
        let beta2 = -(2.0 * PI * m as f64 + k0) / h;
        let beta = (PI * (m + n) as f64 + k0) / (PI * (n - m) as f64);
        Self {
            n,
            m,
            k0,
            e0,
            half_period: h,
            zeta: geom.d_plus() / geom.d_minus(),
            beta,
            beta1,
            beta2,
            kappa: count_bands_containing(geom, e0),
        }
    }

    pub fn plus_mode(&self) -> ModeIndex {
        ModeIndex::new(Branch::Plus, self.n, 0)
    }

    pub fn minus_mode(&self) -> ModeIndex {
        ModeIndex::new(Branch::Minus, self.m, 0)
    }

    /// Product of the two band slopes at `k0`, up to the factor `1/(2h^2)^2`.
    pub fn slope_product(&self) -> f64 {
        (self.k0 + 2.0 * PI * self.n as f64) * (self.k0 + 2.0 * PI * self.m as f64)
    }

    /// More than four decoupled bands meet `e0`; the two-band analysis near
    /// the crossing is then not isolated from the rest of the spectrum.
    pub fn is_crowded(&self) -> bool {
        self.kappa > 4
    }
}

/// All eligible ground-band crossings with `k0 ∈ (0, π)` and energy below
/// `energy_cap`, sorted by energy.
///
/// The equal-energy condition is linear in `k`:
/// `k0 = h^2 Δ / (π(n - m)) - π(n + m)` with `Δ` the gap between the two
/// transverse ground levels. Every candidate pair `(n, m)` whose bands can
/// reach below the cap inside the zone is tried.
pub fn find_crossings(geom: &WaveguideGeometry, energy_cap: f64) -> Result<Vec<BandCrossing>> {
    let h = geom.half_period();
    let t_plus = transverse_energy(geom.d_plus(), 0);
    let t_minus = transverse_energy(geom.d_minus(), 0);
    // p >= 1 levels start at (3π / (2 d_plus))^2 since d_plus is the wider strip.
    let threshold = transverse_energy(geom.d_plus(), 1);
    if energy_cap > threshold {
        return Err(Error::EnergyCapTooHigh {
            cap: energy_cap,
            threshold,
        });
    }
    let mut out = Vec::new();
    if energy_cap <= t_minus {
        return Ok(out);
    }
    let n_range = index_range(h, energy_cap - t_plus);
    let m_range = index_range(h, energy_cap - t_minus);
    let delta = t_minus - t_plus;
    for n in n_range.0..=n_range.1 {
        for m in m_range.0..=m_range.1 {
            if n == m {
                continue;
            }
            let k0 = h * h * delta / (PI * (n - m) as f64) - PI * (n + m) as f64;
            if !(k0 > 0.0 && k0 < PI) {
                continue;
            }
            let c = BandCrossing::from_indices(geom, n, m, k0);
            if c.slope_product() < 0.0 && c.e0 < energy_cap {
                out.push(c);
            }
        }
    }
    out.sort_by(|a, b| {
        a.e0.total_cmp(&b.e0)
            .then(a.n.cmp(&b.n))
            .then(a.m.cmp(&b.m))
    });
    Ok(out)
}

/// Indices `j` for which `|k + 2πj| <= 2h sqrt(headroom)` has a solution with
/// `k ∈ (0, π)`.
fn index_range(h: f64, headroom: f64) -> (i64, i64) {
    if headroom <= 0.0 {
        return (1, 0);
    }
    let reach = 2.0 * h * sqrt(headroom);
    let lo = floor((-reach - PI) / (2.0 * PI)) as i64;
    let hi = ceil(reach / (2.0 * PI)) as i64;
    (lo, hi)
}
