//! Vehicle emission profiles, emission classes, and per-driver state.

use alloc::string::String;

use crate::geo::GeoPoint;
use crate::{Error, Result};

/// Canonical per-kilometre emission rate for a converted battery-electric
/// vehicle on the local grid, in grams CO2-equivalent per km.
pub const EV_UNIT_EMISSION_G_PER_KM: f64 = 63.35;

/// Canonical EV energy efficiency in kWh per km.
pub const EV_ENERGY_EFF_KWH_PER_KM: f64 = 0.1553;

/// Default grid carbon intensity in grams CO2-equivalent per kWh.
pub const DEFAULT_CARBON_INTENSITY_G_PER_KWH: f64 = 408.0;

/// Default low-emission threshold in grams per km (strictly below is LEV).
pub const DEFAULT_LEV_THRESHOLD_G_PER_KM: f64 = 135.0;

/// Default high-emission fuel-consumption threshold in litres per 100 km.
pub const DEFAULT_HEV_THRESHOLD_L_PER_100KM: f64 = 11.7;

/// Grams of CO2-equivalent released by burning one litre of gasoline
/// (8887 g per US gallon).
pub const GASOLINE_G_CO2_PER_L: f64 = 8887.0 / 3.78541;

/// Drivetrain of a vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Powertrain {
    Ice,
    Ev,
}

/// Emission class a vehicle falls into under [`classify_vehicle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EmissionClass {
    /// Low-emission: unit emission strictly below the LEV threshold.
    Lev,
    /// High-emission: fuel consumption at or above the HEV threshold.
    Hev,
    /// Everything in between.
    Standard,
}

/// Static emission profile of one vehicle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VehicleProfile {
    pub make: String,
    pub model: String,
    pub year: u16,
    pub powertrain: Powertrain,
    /// Grams CO2-equivalent emitted per kilometre driven.
    pub unit_emission_g_per_km: f64,
    /// Fuel consumption, when known; used only for HEV classification.
    pub fuel_l_per_100km: Option<f64>,
    /// Energy efficiency for EVs, when known.
    pub energy_eff_kwh_per_km: Option<f64>,
}

impl VehicleProfile {
    /// Checks the numeric fields are finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, value: f64| Error::OutOfRange { name, value };
        if !self.unit_emission_g_per_km.is_finite() || self.unit_emission_g_per_km < 0.0 {
            return Err(bad("unit_emission_g_per_km", self.unit_emission_g_per_km));
        }
        if let Some(f) = self.fuel_l_per_100km {
            if !f.is_finite() || f <= 0.0 {
                return Err(bad("fuel_l_per_100km", f));
            }
        }
        if let Some(e) = self.energy_eff_kwh_per_km {
            if !e.is_finite() || e <= 0.0 {
                return Err(bad("energy_eff_kwh_per_km", e));
            }
        }
        Ok(())
    }

    /// The same vehicle converted to the canonical battery-electric profile.
    ///
    /// Identity fields are preserved; powertrain and emission figures are
    /// replaced with the EV constants.
    pub fn to_ev(&self) -> Self {
        VehicleProfile {
            make: self.make.clone(),
            model: self.model.clone(),
            year: self.year,
            powertrain: Powertrain::Ev,
            unit_emission_g_per_km: EV_UNIT_EMISSION_G_PER_KM,
            fuel_l_per_100km: None,
            energy_eff_kwh_per_km: Some(EV_ENERGY_EFF_KWH_PER_KM),
        }
    }
}

/// Thresholds splitting the fleet into LEV / HEV / standard classes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassThresholds {
    /// Vehicles emitting strictly less than this are low-emission (g/km).
    pub lev_g_per_km: f64,
    /// Vehicles consuming at least this much fuel are high-emission (L/100km).
    pub hev_l_per_100km: f64,
}

impl ClassThresholds {
    pub fn new(lev_g_per_km: f64, hev_l_per_100km: f64) -> Result<Self> {
        if !lev_g_per_km.is_finite() || lev_g_per_km <= 0.0 {
            return Err(Error::OutOfRange {
                name: "lev_g_per_km",
                value: lev_g_per_km,
            });
        }
        if !hev_l_per_100km.is_finite() || hev_l_per_100km <= 0.0 {
            return Err(Error::OutOfRange {
                name: "hev_l_per_100km",
                value: hev_l_per_100km,
            });
        }
        Ok(ClassThresholds {
            lev_g_per_km,
            hev_l_per_100km,
        })
    }
}

impl Default for ClassThresholds {
    fn default() -> Self {
        ClassThresholds {
            lev_g_per_km: DEFAULT_LEV_THRESHOLD_G_PER_KM,
            hev_l_per_100km: DEFAULT_HEV_THRESHOLD_L_PER_100KM,
        }
    }
}

/// Per-kilometre emission rate of an EV given its efficiency and the grid
/// carbon intensity. With the canonical constants this lands within rounding
/// distance of [`EV_UNIT_EMISSION_G_PER_KM`].
pub fn ev_unit_emission(eff_kwh_per_km: f64, grid_g_per_kwh: f64) -> Result<f64> {
    if !eff_kwh_per_km.is_finite() || eff_kwh_per_km <= 0.0 {
        return Err(Error::OutOfRange {
            name: "eff_kwh_per_km",
            value: eff_kwh_per_km,
        });
    }
    if !grid_g_per_kwh.is_finite() || grid_g_per_kwh <= 0.0 {
        return Err(Error::OutOfRange {
            name: "grid_g_per_kwh",
            value: grid_g_per_kwh,
        });
    }
    Ok(eff_kwh_per_km * grid_g_per_kwh)
}

/// Emissions per km implied by a gasoline fuel consumption figure.
pub fn fuel_to_emission_g_per_km(l_per_100km: f64) -> f64 {
    l_per_100km * GASOLINE_G_CO2_PER_L / 100.0
}

/// Fuel consumption implied by a gasoline emission rate; inverse of
/// [`fuel_to_emission_g_per_km`].
pub fn emission_to_fuel_l_per_100km(g_per_km: f64) -> f64 {
    g_per_km * 100.0 / GASOLINE_G_CO2_PER_L
}

/// Classifies a vehicle against the given thresholds.
///
/// LEV wins if the unit emission is strictly below the LEV threshold. The
/// HEV test needs a fuel-consumption figure; without one the vehicle can
/// only be LEV or standard.
pub fn classify_vehicle(v: &VehicleProfile, t: &ClassThresholds) -> EmissionClass {
    if v.unit_emission_g_per_km < t.lev_g_per_km {
        EmissionClass::Lev
    } else if v.fuel_l_per_100km.is_some_and(|f| f >= t.hev_l_per_100km) {
        EmissionClass::Hev
    } else {
        EmissionClass::Standard
    }
}

/// What a driver is doing at a point in simulated time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriverStatus {
    Idle,
    /// Serving a ride until `until_s`, after which the driver is at `dropoff`.
    Busy { until_s: f64, dropoff: GeoPoint },
}

/// Mutable per-driver record owned by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverState {
    /// Dense index assigned by the simulator (sorted external ids).
    pub driver_id: u32,
    /// Emission rate of the driver's vehicle, cached for assignment.
    pub unit_emission_g_per_km: f64,
    /// Emission class of the driver's vehicle, cached for equity metrics.
    pub class: EmissionClass,
    /// Last known position while idle.
    pub location: GeoPoint,
    pub status: DriverStatus,
}

impl DriverState {
    pub fn is_idle(&self) -> bool {
        matches!(self.status, DriverStatus::Idle)
    }

    /// Seconds until the driver is free; zero when idle or already due.
    pub fn remaining_busy_s(&self, now_s: f64) -> f64 {
        match self.status {
            DriverStatus::Idle => 0.0,
            DriverStatus::Busy { until_s, .. } => (until_s - now_s).max(0.0),
        }
    }

    /// Where a deadhead leg to the next rider would start from.
    pub fn dispatch_origin(&self) -> GeoPoint {
        match self.status {
            DriverStatus::Idle => self.location,
            DriverStatus::Busy { dropoff, .. } => dropoff,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ice(unit: f64, fuel: Option<f64>) -> VehicleProfile {
        VehicleProfile {
            make: "acme".to_string(),
            model: "wagon".to_string(),
            year: 2015,
            powertrain: Powertrain::Ice,
            unit_emission_g_per_km: unit,
            fuel_l_per_100km: fuel,
            energy_eff_kwh_per_km: None,
        }
    }

    #[test]
    fn ev_rate_matches_canonical_constant() {
        let g = ev_unit_emission(EV_ENERGY_EFF_KWH_PER_KM, DEFAULT_CARBON_INTENSITY_G_PER_KWH)
            .unwrap();
        assert!((g - 63.3624).abs() < 1e-9, "got {g}");
        assert!((g - EV_UNIT_EMISSION_G_PER_KM).abs() < 0.05);
    }

    #[test]
    fn ev_rate_rejects_nonpositive_inputs() {
        assert!(ev_unit_emission(0.0, 408.0).is_err());
        assert!(ev_unit_emission(0.15, -1.0).is_err());
        assert!(ev_unit_emission(f64::NAN, 408.0).is_err());
    }

    #[test]
    fn classification_boundaries() {
        let t = ClassThresholds::default();
        // Strictly below 135 is LEV; exactly 135 is not.
        assert_eq!(classify_vehicle(&ice(134.999, None), &t), EmissionClass::Lev);
        assert_eq!(
            classify_vehicle(&ice(135.0, None), &t),
            EmissionClass::Standard
        );
        // Fuel consumption at or above 11.7 L/100km is HEV.
        assert_eq!(
            classify_vehicle(&ice(300.0, Some(11.7)), &t),
            EmissionClass::Hev
        );
        assert_eq!(
            classify_vehicle(&ice(300.0, Some(11.699)), &t),
            EmissionClass::Standard
        );
        // Without a fuel figure the HEV test cannot fire.
        assert_eq!(
            classify_vehicle(&ice(300.0, None), &t),
            EmissionClass::Standard
        );
    }

    #[test]
    fn converted_ev_is_lev() {
        let t = ClassThresholds::default();
        let ev = ice(320.0, Some(14.0)).to_ev();
        assert_eq!(ev.powertrain, Powertrain::Ev);
        assert_eq!(ev.unit_emission_g_per_km, EV_UNIT_EMISSION_G_PER_KM);
        assert_eq!(ev.fuel_l_per_100km, None);
        assert_eq!(classify_vehicle(&ev, &t), EmissionClass::Lev);
        // Identity fields survive the conversion.
        assert_eq!(ev.make, "acme");
        assert_eq!(ev.year, 2015);
    }

    #[test]
    fn fuel_emission_conversion_is_consistent() {
        // The default HEV fuel threshold sits near 275 g/km.
        let g = fuel_to_emission_g_per_km(DEFAULT_HEV_THRESHOLD_L_PER_100KM);
        assert!((g - 274.68).abs() < 0.1, "got {g}");
        let f = emission_to_fuel_l_per_100km(g);
        assert!((f - DEFAULT_HEV_THRESHOLD_L_PER_100KM).abs() < 1e-12);
    }

    #[test]
    fn driver_state_accessors() {
        let home = GeoPoint { lat: 0.0, lon: 0.0 };
        let drop = GeoPoint { lat: 0.1, lon: 0.1 };
        let mut d = DriverState {
            driver_id: 3,
            unit_emission_g_per_km: 200.0,
            class: EmissionClass::Standard,
            location: home,
            status: DriverStatus::Idle,
        };
        assert!(d.is_idle());
        assert_eq!(d.remaining_busy_s(100.0), 0.0);
        assert_eq!(d.dispatch_origin(), home);
        d.status = DriverStatus::Busy {
            until_s: 250.0,
            dropoff: drop,
        };
        assert_eq!(d.remaining_busy_s(100.0), 150.0);
        assert_eq!(d.remaining_busy_s(300.0), 0.0);
        assert_eq!(d.dispatch_origin(), drop);
    }

    #[test]
    fn thresholds_validate() {
        assert!(ClassThresholds::new(135.0, 11.7).is_ok());
        assert!(ClassThresholds::new(0.0, 11.7).is_err());
        assert!(ClassThresholds::new(135.0, f64::INFINITY).is_err());
    }
}
