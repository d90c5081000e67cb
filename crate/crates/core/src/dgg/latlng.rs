use std::fmt;

use serde::{Deserialize, Serialize};

use super::DggError;

/// A point on the sphere in degrees.
///
/// Longitude is kept in `(-180, 180]`; `-180` is folded onto `180`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLng {
    pub lat: f64,
    pub lng: f64,
}

impl LatLng {
    pub fn new(lat: f64, lng: f64) -> Result<Self, DggError> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(DggError::CoordinateOutOfRange { lat, lng });
        }
        if !lng.is_finite() || !(-180.0..=180.0).contains(&lng) {
            return Err(DggError::CoordinateOutOfRange { lat, lng });
        }
        Ok(Self::new_unchecked(lat, lng))
    }

    pub(crate) fn new_unchecked(lat: f64, lng: f64) -> Self {
        let lng = if lng <= -180.0 { lng + 360.0 } else { lng };
        LatLng { lat, lng }
    }

    /// Unit vector with x toward (0, 0), y toward (0, 90) and z toward the north pole.
    pub fn to_xyz(self) -> [f64; 3] {
        let (lat, lng) = (self.lat.to_radians(), self.lng.to_radians());
        [lat.cos() * lng.cos(), lat.cos() * lng.sin(), lat.sin()]
    }

    pub fn from_xyz(p: [f64; 3]) -> Self {
        let lat = p[2].atan2((p[0] * p[0] + p[1] * p[1]).sqrt()).to_degrees();
        let lng = p[1].atan2(p[0]).to_degrees();
        Self::new_unchecked(lat, lng)
    }
}

impl fmt::Display for LatLng {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lat, self.lng)
    }
}
