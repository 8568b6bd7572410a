use crate::math::{ln, sqrt, PI};
use crate::{Error, Result};

use super::{BandCrossing, WaveguideGeometry};

/// The two edges of an opened gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapEdge {
    /// Maximum of the band below the gap, attained at `±k_l`.
    Lower,
    /// Minimum of the band above the gap, attained at `±k_r`.
    Upper,
}

/// Leading-order description of the gap opened at a crossing:
/// `α(ε) = E0 - τ / (4h|ln ε|)` for the edges and `k(ε) = k0 + σ / ln ε` for
/// the quasimomenta at which they are attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapForecast {
    pub e0: f64,
    pub k0: f64,
    pub half_period: f64,
    pub zeta: f64,
    pub beta: f64,
    pub tau_l: f64,
    pub tau_r: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
}

impl GapForecast {
    pub fn new(crossing: &BandCrossing, geom: &WaveguideGeometry) -> Result<Self> {
        if !geom.has_canonical_upper_width() {
            return Err(Error::UpperWidthNotCanonical {
                d_plus: geom.d_plus(),
            });
        }
        let beta = crossing.beta;
        if !(beta.abs() < 1.0) {
            return Err(Error::NotACrossing { beta });
        }
        let zeta = PI / geom.d_minus();
        let h = geom.half_period();
        let root = sqrt(zeta * (1.0 - beta * beta));
        let tail = -beta * (zeta - 1.0) - zeta - 1.0;
        let dn = PI * (crossing.n - crossing.m) as f64;
        let split = beta * h / dn * sqrt(zeta / (1.0 - beta * beta));
        let drift = (1.0 - zeta) * h / (2.0 * dn);
        Ok(Self {
            e0: crossing.e0,
            k0: crossing.k0,
            half_period: h,
            zeta,
            beta,
            tau_l: 2.0 * root + tail,
            tau_r: -2.0 * root + tail,
            sigma_l: -split + drift,
            sigma_r: split + drift,
        })
    }

    pub fn tau(&self, edge: GapEdge) -> f64 {
        match edge {
            GapEdge::Lower => self.tau_l,
            GapEdge::Upper => self.tau_r,
        }
    }

    pub fn sigma(&self, edge: GapEdge) -> f64 {
        match edge {
            GapEdge::Lower => self.sigma_l,
            GapEdge::Upper => self.sigma_r,
        }
    }

    /// Coefficient `c1` of the edge energy in `α = E0 + c1 / |ln ε|`.
    pub fn edge_slope(&self, edge: GapEdge) -> f64 {
        -self.tau(edge) / (4.0 * self.half_period)
    }

    /// Coefficient `c1` of the extremum location in `k = k0 + c1 / |ln ε|`.
    pub fn location_slope(&self, edge: GapEdge) -> f64 {
        -self.sigma(edge)
    }

    /// Coefficient of `1/|ln ε|` in the gap width, `sqrt(ζ(1 - β^2)) / h`.
    pub fn width_slope(&self) -> f64 {
        (self.tau_l - self.tau_r) / (4.0 * self.half_period)
    }

    pub fn edge_energy(&self, edge: GapEdge, epsilon: f64) -> Result<f64> {
        Ok(self.e0 + self.edge_slope(edge) / abs_log(epsilon)?)
    }

    pub fn edge_location(&self, edge: GapEdge, epsilon: f64) -> Result<f64> {
        Ok(self.k0 + self.location_slope(edge) / abs_log(epsilon)?)
    }
}

/// `|ln ε|` for `ε ∈ (0, 1)`.
pub(crate) fn abs_log(epsilon: f64) -> Result<f64> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(-ln(epsilon))
    } else {
        Err(Error::LogScaleOutOfRange { epsilon })
    }
}

/// Minimum of `f1` and maximum of `f2` over `t ∈ ℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionExtrema {
    pub t_min: f64,
    pub t_max: f64,
    pub f1_min: f64,
    pub f2_max: f64,
}

impl BandCrossing {
    /// The 2x2 matrix whose eigenvalues are `2h μ^(j)(t)`.
    pub fn coupling_matrix(&self, t: f64) -> [[f64; 2]; 2] {
        [
            [t * self.beta1 - 1.0, 1.0],
            [self.zeta, -self.zeta - t * self.beta2],
        ]
    }

    /// `(f1(t), f2(t))`, the two roots of the coupling problem scaled by `4h`,
    /// with `f1 > f2` for every `t`.
    pub fn correction_roots(&self, t: f64) -> (f64, f64) {
        let z = self.zeta;
        let mean = t * (self.beta1 - self.beta2) - (z + 1.0);
        let s = t * (self.beta1 + self.beta2) + z - 1.0;
        let root = sqrt(s * s + 4.0 * z);
        (mean + root, mean - root)
    }

    /// `(μ^(1)(t), μ^(2)(t)) = (f1, f2) / (4h)`.
    pub fn mu_corrections(&self, t: f64) -> (f64, f64) {
        let (f1, f2) = self.correction_roots(t);
        let scale = 4.0 * self.half_period;
        (f1 / scale, f2 / scale)
    }

    /// Amplitudes `(a_+, a_-)` of the two strip modes in the `j`-th
    /// perturbed eigenfunction, normalized so that `a_+ = 1`.
    ///
    /// # Panics
    /// If `j` is not 1 or 2.
    pub fn mode_amplitudes(&self, t: f64, j: u8) -> [f64; 2] {
        let (f1, f2) = self.correction_roots(t);
        let f = match j {
            1 => f1,
            2 => f2,
            _ => panic!("root index must be 1 or 2, got {j}"),
        };
        [1.0, 0.5 * f + 1.0 - t * self.beta1]
    }

    pub fn correction_extrema(&self) -> Result<CorrectionExtrema> {
        let beta = self.beta;
        if !(beta.abs() < 1.0) {
            return Err(Error::NotACrossing { beta });
        }
        let z = self.zeta;
        let sum = self.beta1 + self.beta2;
        let split = 2.0 * beta / sum * sqrt(z / (1.0 - beta * beta));
        let drift = (1.0 - z) / sum;
        let t_min = -split + drift;
        let t_max = split + drift;
        Ok(CorrectionExtrema {
            t_min,
            t_max,
            f1_min: self.correction_roots(t_min).0,
            f2_max: self.correction_roots(t_max).1,
        })
    }

    /// `E0 + μ^(j)(t) / ln ε`, the two-band model of the perturbed eigenvalues
    /// at `k = k0 + t / ln ε`.
    ///
    /// # Panics
    /// If `j` is not 1 or 2.
    pub fn perturbed_band_asymptote(&self, epsilon: f64, t: f64, j: u8) -> Result<f64> {
        let log_eps = -abs_log(epsilon)?;
        let (mu1, mu2) = self.mu_corrections(t);
        let mu = match j {
            1 => mu1,
            2 => mu2,
            _ => panic!("root index must be 1 or 2, got {j}"),
        };
        Ok(self.e0 + mu / log_eps)
    }
}

/// Sufficient condition on `(h, d)` for the crossing `(n, m) = (-1, 0)` to be
/// eligible (with `d_plus = π`): `h > π/√2` and
/// `π / sqrt((2π/h)^2 + 1) < d < π`.
pub fn corollary_holds(half_period: f64, d_minus: f64) -> bool {
    let h = half_period;
    if !(h > PI / sqrt(2.0)) {
        return false;
    }
    let q = 2.0 * PI / h;
    let lower = PI / sqrt(q * q + 1.0);
    lower < d_minus && d_minus < PI
}
