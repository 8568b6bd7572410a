//! One-dimensional graded vertex layouts.
//!
//! A size function `s(x) = min(H, min_t(s_t + g |x - t|))` shrinks linearly
//! towards each tip `t`. Vertices are placed so that every segment between
//! breakpoints holds `ceil(∫ dx / s)` elements, equidistributed in the metric
//! `dx / s`. Inside a graded zone this gives a geometric progression of element
//! lengths with ratio at most `exp(g)`.

use alloc::vec::Vec;

#[cfg(test)]
use crate::math::exp;
use crate::math::{ceil, ln};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tip {
    pub position: f64,
    pub size: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SizeField {
    base: f64,
    growth: f64,
    tips: Vec<Tip>,
}

impl SizeField {
    #[cfg(test)]
    pub fn new(base: f64, growth: f64, tips: Vec<Tip>) -> Self {
        Self { base, growth, tips }
    }

    /// Field whose elements next to each tip are no longer than `tip.size`
    /// and grow away from it by the factor `1 / ratio`, `ratio` in `(0, 1]`.
    pub fn geometric(base: f64, ratio: f64, tips: Vec<Tip>) -> Self {
        let growth = -ln(ratio);
        let scale = if growth > 0.0 { growth / (1.0 / ratio - 1.0) } else { 1.0 };
        let tips = tips
            .into_iter()
            .map(|t| Tip { position: t.position, size: t.size * scale })
            .collect();
        Self { base, growth, tips }
    }

    #[cfg(test)]
    /// Upper bound on an element length whose nearer end sits at size `s`.
    pub fn stretch(&self) -> f64 {
        if self.growth > 0.0 {
            (exp(self.growth) - 1.0) / self.growth
        } else {
            1.0
        }
    }

    #[cfg(test)]
    pub fn size(&self, x: f64) -> f64 {
        self.tips
            .iter()
            .map(|t| t.size + self.growth * (x - t.position).abs())
            .fold(self.base, f64::min)
    }

    /// Points where the active branch of the `min` can change.
    fn kinks(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        pts.push(a);
        pts.push(b);
        let g = self.growth;
        for (i, t) in self.tips.iter().enumerate() {
            pts.push(t.position);
            if g > 0.0 && t.size < self.base {
                let reach = (self.base - t.size) / g;
                pts.push(t.position - reach);
                pts.push(t.position + reach);
            }
            if g > 0.0 {
                for u in &self.tips[i + 1..] {
                    let (l, r) = if t.position < u.position { (t, u) } else { (u, t) };
                    pts.push((r.size - l.size + g * (l.position + r.position)) / (2.0 * g));
                }
            }
        }
        pts.retain(|&x| x >= a && x <= b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `∫_a^b dx / s(x)` for `a <= b`, exact on each linear piece.
    pub fn density(&self, a: f64, b: f64) -> f64 {
        let pts = self.kinks(a, b);
        pts.windows(2).map(|w| self.piece_density(w[0], w[1])).sum()
    }

    fn piece_density(&self, p: f64, q: f64) -> f64 {
        if q <= p {
            return 0.0;
        }
        let mid = 0.5 * (p + q);
        let mut best = self.base;
        let mut active: Option<&Tip> = None;
        for t in &self.tips {
            let s = t.size + self.growth * (mid - t.position).abs();
            if s < best {
                best = s;
                active = Some(t);
            }
        }
        match active {
            Some(t) if self.growth > 0.0 => {
                let sp = t.size + self.growth * (p - t.position).abs();
                let sq = t.size + self.growth * (q - t.position).abs();
                let sign = if mid >= t.position { 1.0 } else { -1.0 };
                ln(sq / sp) / (self.growth * sign)
            }
            _ => (q - p) / best,
        }
    }
}

/// Vertices of `[lo, hi]` containing every breakpoint, graded by `field`.
pub(crate) fn graded_axis(lo: f64, hi: f64, breakpoints: &[f64], field: &SizeField) -> Result<Vec<f64>> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut axis = Vec::new();
    axis.push(lo);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let total = field.density(a, b);
        if !total.is_finite() {
            return Err(Error::InvalidMesh("non-finite mesh density".into()));
        }
        let count = ceil(total - 1e-9).max(1.0) as usize;
        for j in 1..count {
            let target = total * j as f64 / count as f64;
            axis.push(invert_density(field, a, b, target));
        }
        axis.push(b);
    }
    Ok(axis)
}

fn invert_density(field: &SizeField, a: f64, b: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if field.density(a, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Insert the midpoint of every interval.
pub(crate) fn bisect(axis: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * axis.len());
    for w in axis.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(axis.last().copied());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn uniform_without_tips() {
        let f = SizeField::new(0.5, 1.0, vec![]);
        let axis = graded_axis(0.0, 2.0, &[], &f).unwrap();
        assert_eq!(axis.len(), 5);
        for (i, x) in axis.iter().enumerate() {
            assert!((x - 0.5 * i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn density_matches_quadrature() {
        let tips = vec![
            Tip { position: -0.01, size: 0.0025 },
            Tip { position: 0.01, size: 0.0025 },
            Tip { position: 0.3, size: 0.05 },
        ];
        let f = SizeField::new(0.2, 0.7, tips);
        let (a, b) = (-1.0, 1.3);
        let n = 400_000;
        let dx = (b - a) / n as f64;
        let midpoint: f64 = (0..n).map(|i| dx / f.size(a + (i as f64 + 0.5) * dx)).sum();
        assert!((f.density(a, b) - midpoint).abs() < 1e-5 * midpoint);
    }

    #[test]
    fn sizes_never_exceed_the_field() {
        let tips = vec![Tip { position: 0.0, size: 1e-4 }];
        let f = SizeField::geometric(0.3, 0.5, tips);
        let axis = graded_axis(-2.0, 2.0, &[0.0], &f).unwrap();
        for w in axis.windows(2) {
            let len = w[1] - w[0];
            assert!(len > 0.0);
            let near = f.size(w[0]).min(f.size(w[1]));
            assert!(len <= (near * f.stretch()).max(0.3) * (1.0 + 1e-9));
        }
        let near = axis.iter().position(|&x| x == 0.0).unwrap();
        assert!(axis[near + 1] - axis[near] <= 1e-4 * (1.0 + 1e-9));
    }
}
