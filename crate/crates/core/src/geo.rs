//! Geodesic positions and road-distance estimation.
//!
//! Distances are great-circle (haversine) on a sphere of radius
//! [`EARTH_RADIUS_KM`]. Road distances are estimated by inflating the
//! great-circle distance with a configurable detour factor, which is the
//! only distance model used anywhere in this crate; plugging in a real
//! road network would replace [`road_distance_km`].

use crate::math;
use crate::{Error, Result};

/// Mean Earth radius used by every distance computation, in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Kilometres per statute mile.
pub const KM_PER_MILE: f64 = 1.60934;

/// Default multiplier turning great-circle distance into a road-distance estimate.
pub const DEFAULT_DETOUR_FACTOR: f64 = 1.3;

/// Kilometres per degree of latitude (and of longitude at the equator).
pub const KM_PER_DEG: f64 = core::f64::consts::PI * EARTH_RADIUS_KM / 180.0;

/// A WGS-ish latitude/longitude pair in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeoPoint {
    /// Degrees north, in [-90, 90].
    pub lat: f64,
    /// Degrees east, in [-180, 180].
    pub lon: f64,
}

impl GeoPoint {
    /// Builds a point, rejecting out-of-range or non-finite coordinates.
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        let p = GeoPoint { lat, lon };
        p.validate()?;
        Ok(p)
    }

    /// Checks both coordinates are finite and within range.
    pub fn validate(&self) -> Result<()> {
        let ok = self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidCoordinate {
                lat: self.lat,
                lon: self.lon,
            })
        }
    }
}

/// Great-circle distance between two points in kilometres.
///
/// Symmetric, zero for identical points, and never exceeds half the
/// circumference (~20015.1 km). Errors if either point is invalid.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    let lat_a = a.lat.to_radians();
    let lat_b = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let s_lat = math::sin(dlat / 2.0);
    let s_lon = math::sin(dlon / 2.0);
    let h = s_lat * s_lat + math::cos(lat_a) * math::cos(lat_b) * s_lon * s_lon;
    // Clamp guards rounding slightly above 1 for near-antipodal pairs.
    Ok(2.0 * EARTH_RADIUS_KM * math::asin(math::sqrt(h.clamp(0.0, 1.0))))
}

/// Road-distance estimate: great-circle distance times a detour factor.
///
/// A factor of exactly 1 yields the plain great-circle distance. Factors
/// below 1 or non-finite are rejected.
pub fn road_distance_km(a: GeoPoint, b: GeoPoint, detour_factor: f64) -> Result<f64> {
    if !detour_factor.is_finite() || detour_factor < 1.0 {
        return Err(Error::InvalidDetourFactor(detour_factor));
    }
    Ok(haversine_km(a, b)? * detour_factor)
}

/// Point displaced from `origin` by `east_km`/`north_km` on the local tangent.
///
/// Accurate for the few tens of kilometres used by synthetic service areas;
/// errors if the displaced point leaves the valid coordinate range.
pub fn offset_km(origin: GeoPoint, east_km: f64, north_km: f64) -> Result<GeoPoint> {
    origin.validate()?;
    if !east_km.is_finite() || !north_km.is_finite() {
        return Err(Error::OutOfRange {
            name: "offset_km",
            value: if east_km.is_finite() { north_km } else { east_km },
        });
    }
    let lat = origin.lat + north_km / KM_PER_DEG;
    let lon = origin.lon + east_km / (KM_PER_DEG * math::cos(origin.lat.to_radians()));
    GeoPoint::new(lat, lon)
}
