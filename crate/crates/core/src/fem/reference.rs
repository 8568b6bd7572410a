//! Closed-form spectra the finite-element solver is checked against.

use alloc::vec::Vec;

use crate::analytic::{longitudinal_energy, transverse_energy, Branch, WaveguideGeometry};
use crate::math::{ceil, floor, sqrt, PI};

/// Every value of `transverse(p) + longitudinal(k, m)` not above `cap`.
fn collect_below(cap: f64, k: f64, h: f64, transverse: impl Fn(u32) -> f64, out: &mut Vec<f64>) {
    let mut p = 0u32;
    loop {
        let t = transverse(p);
        if t > cap {
            break;
        }
        // |k + 2πm| <= 2h sqrt(cap - t)
        let reach = 2.0 * h * sqrt(cap - t);
        let lo = ceil((-reach - k) / (2.0 * PI)) as i64;
        let hi = floor((reach - k) / (2.0 * PI)) as i64;
        for m in lo..=hi {
            let e = t + longitudinal_energy(k, m, h);
            if e <= cap {
                out.push(e);
            }
        }
        p += 1;
    }
}

fn lowest(count: usize, start: f64, mut fill: impl FnMut(f64, &mut Vec<f64>)) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    let mut cap = 2.0 * start.max(1e-3);
    loop {
        let mut values = Vec::new();
        fill(cap, &mut values);
        if values.len() >= count {
            values.sort_by(f64::total_cmp);
            values.truncate(count);
            return values;
        }
        cap *= 2.0;
    }
}

/// The `count` smallest decoupled eigenvalues at `k`, merged over both strips
/// with multiplicity. Enumeration is complete below a cap that is doubled
/// until it holds `count` values.
pub fn reference_spectrum(geom: &WaveguideGeometry, k: f64, count: usize) -> Vec<f64> {
    let h = geom.half_period();
    lowest(count, geom.spectrum_bottom(), |cap, out| {
        for branch in [Branch::Plus, Branch::Minus] {
            let w = geom.width(branch);
            collect_below(cap, k, h, |p| transverse_energy(w, p), out);
        }
    })
}

/// The `count` smallest eigenvalues of the fully open cell, a Dirichlet strip
/// of width `d_plus + d_minus`.
pub fn full_strip_spectrum(geom: &WaveguideGeometry, k: f64, count: usize) -> Vec<f64> {
    let h = geom.half_period();
    let w = geom.d_plus() + geom.d_minus();
    let level = |p: u32| {
        let q = PI * (p as f64 + 1.0) / w;
        q * q
    };
    lowest(count, level(0), |cap, out| collect_below(cap, k, h, level, out))
}
