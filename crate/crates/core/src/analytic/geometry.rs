use crate::math::PI;
use crate::{Error, Result};

use super::Branch;

/// Parameters of the coupled waveguide.
///
/// The upper strip is `0 < x2 < d_plus`, the lower strip `-d_minus < x2 < 0`,
/// the windows are the intervals `|x1 - 2jh| < ε` of the line `x2 = 0`, and the
/// period cell is `-h < x1 <= h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideGeometry {
    d_plus: f64,
    d_minus: f64,
    half_period: f64,
    window_half_width: f64,
}

impl WaveguideGeometry {
    /// Geometry with the normalized upper width `d_plus = π`.
    pub fn new(d_minus: f64, half_period: f64, window_half_width: f64) -> Result<Self> {
        Self::with_upper_width(PI, d_minus, half_period, window_half_width)
    }

    pub fn with_upper_width(
        d_plus: f64,
        d_minus: f64,
        half_period: f64,
        window_half_width: f64,
    ) -> Result<Self> {
        let geom = Self {
            d_plus,
            d_minus,
            half_period,
            window_half_width,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.d_plus,
            self.d_minus,
            self.half_period,
            self.window_half_width,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGeometry("parameters must be finite"));
        }
        if self.d_minus <= 0.0 {
            return Err(Error::InvalidGeometry("0 < d violated"));
        }
        if self.d_minus >= self.d_plus {
            return Err(Error::InvalidGeometry("d < d_plus violated"));
        }
        if self.half_period <= 0.0 {
            return Err(Error::InvalidGeometry("h > 0 violated"));
        }
        if self.window_half_width < 0.0 {
            return Err(Error::InvalidGeometry("eps >= 0 violated"));
        }
        if self.window_half_width >= self.half_period {
            return Err(Error::InvalidGeometry("eps < h violated"));
        }
        Ok(())
    }

    /// Same strips and period with a different window.
    pub fn with_window(&self, window_half_width: f64) -> Result<Self> {
        Self::with_upper_width(
            self.d_plus,
            self.d_minus,
            self.half_period,
            window_half_width,
        )
    }

    pub fn d_plus(&self) -> f64 {
        self.d_plus
    }

    pub fn d_minus(&self) -> f64 {
        self.d_minus
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn window_half_width(&self) -> f64 {
        self.window_half_width
    }

    pub fn width(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.d_plus,
            Branch::Minus => self.d_minus,
        }
    }

    /// `d_plus = π` up to rounding, the normalization the gap forecasts use.
    pub fn has_canonical_upper_width(&self) -> bool {
        (self.d_plus - PI).abs() <= 1e-12
    }

    /// Bottom of the decoupled spectrum, `(π / (2 d_plus))^2`.
    pub fn spectrum_bottom(&self) -> f64 {
        let q = PI / (2.0 * self.d_plus);
        q * q
    }

    pub fn satisfies_corollary(&self) -> bool {
        self.has_canonical_upper_width()
            && super::corollary_holds(self.half_period, self.d_minus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lower_strip_wider_than_upper() {
        let err = WaveguideGeometry::new(4.0, 2.3, 0.0).unwrap_err();
        assert_eq!(err, Error::InvalidGeometry("d < d_plus violated"));
    }

    #[test]
    fn window_must_stay_inside_the_cell() {
        assert!(WaveguideGeometry::new(2.0, 2.3, 2.3).is_err());
        assert!(WaveguideGeometry::new(2.0, 2.3, -1e-3).is_err());
        assert!(WaveguideGeometry::new(2.0, 2.3, 0.01).is_ok());
        assert!(WaveguideGeometry::new(2.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn spectrum_bottom_is_one_quarter() {
        let g = WaveguideGeometry::new(2.0, 2.3, 0.0).unwrap();
        assert_eq!(g.spectrum_bottom(), 0.25);
    }
}
