use serde::{Deserialize, Serialize};

use crate::error::{MwlError, Result};

pub const MIN_POINTS: usize = 16;
pub const MAX_POINTS: usize = 1 << 16;

/// Uniform periodic grid on `[0, length)` with cell midpoints `x_i = (i + 1/2) h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub d: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub length: f64,
}

impl GridDomain {
    pub fn new(points: usize, length: f64) -> Result<Self> {
        if !points.is_power_of_two() || !(MIN_POINTS..=MAX_POINTS).contains(&points) {
            return Err(MwlError::InvalidParameter(format!(
                "grid size {points} must be a power of two in [{MIN_POINTS}, {MAX_POINTS}]"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(MwlError::InvalidParameter(format!(
                "grid length {length} must be positive"
            )));
        }
        Ok(GridDomain {
            d: 1,
            points,
            length,
        })
    }

    /// Unit-period grid.
    pub fn unit(points: usize) -> Result<Self> {
        Self::new(points, 1.0)
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn h(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    /// `x_i / length`, in `(0, 1)`.
    pub fn unit_x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.points as f64
    }

    pub fn levels(&self) -> u32 {
        self.points.trailing_zeros()
    }

    pub fn check_same(&self, other: &GridDomain) -> Result<()> {
        if self.points != other.points || self.length != other.length {
            return Err(MwlError::DimensionMismatch {
                expected: self.points,
                found: other.points,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridDomain::unit(8).is_err());
        assert!(GridDomain::unit(48).is_err());
        assert!(GridDomain::unit(1 << 17).is_err());
        assert!(GridDomain::new(16, 0.0).is_err());
        let d = GridDomain::new(16, 2.0).unwrap();
        assert_eq!(d.h(), 0.125);
        assert_eq!(d.x(0), 0.0625);
        assert_eq!(d.levels(), 4);
    }
}
