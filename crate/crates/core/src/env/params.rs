use serde::{Deserialize, Serialize};

use super::EnvError;

/// Link-budget parameters shared by the sensor uplink and the UAV relay link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Linear channel power gain at the 1 m reference distance.
    pub beta0: f64,
    pub tx_power_w: f64,
    pub packet_bits: f64,
    pub bandwidth_hz: f64,
    pub noise_w: f64,
    pub uav_alt_m: f64,
    pub bs_alt_m: f64,
    pub coverage_override_m: Option<f64>,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            beta0: db_to_linear(-30.0),
            tx_power_w: 0.003,
            packet_bits: 5.0e6,
            bandwidth_hz: 1.0e6,
            noise_w: dbm_to_watts(-100.0),
            uav_alt_m: 100.0,
            bs_alt_m: 15.0,
            coverage_override_m: None,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), EnvError> {
        let positive = [
            ("beta0", self.beta0),
            ("tx_power_w", self.tx_power_w),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_w", self.noise_w),
            ("uav_alt_m", self.uav_alt_m),
            ("bs_alt_m", self.bs_alt_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(EnvError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.packet_bits.is_finite() && self.packet_bits >= 0.0) {
            return Err(EnvError::InvalidParameter(format!(
                "packet_bits must be finite and non-negative, got {}",
                self.packet_bits
            )));
        }
        if !self.snr_threshold().is_finite() {
            return Err(EnvError::InvalidParameter(
                "packet_bits / bandwidth_hz overflows the rate term".into(),
            ));
        }
        if self.uav_alt_m == self.bs_alt_m {
            return Err(EnvError::InvalidParameter(
                "UAV and base-station altitudes must differ".into(),
            ));
        }
        if let Some(r) = self.coverage_override_m {
            if !(r.is_finite() && r >= 0.0) {
                return Err(EnvError::InvalidParameter(format!(
                    "coverage override must be >= 0, got {r}"
                )));
            }
        }
        Ok(())
    }

    /// `2^(M/BW) - 1`, the SNR needed to deliver one packet per slot.
    pub fn snr_threshold(&self) -> f64 {
        (self.packet_bits / self.bandwidth_hz).exp2() - 1.0
    }
}

/// Rotary-wing power model, battery discretization and reward penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyParams {
    pub battery_j: f64,
    pub quanta: u32,
    pub p0_w: f64,
    pub p1_w: f64,
    pub tip_speed: f64,
    pub hover_induced_v: f64,
    pub fuselage_drag: f64,
    pub air_density: f64,
    pub rotor_solidity: f64,
    pub rotor_disk_area: f64,
    pub speed: f64,
    pub penalty_z: f64,
    /// Episode ends once any battery is at or below this many quanta.
    /// `None` derives it from the depot geometry.
    pub energy_threshold: Option<u32>,
    pub diag_factor: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            battery_j: 10_000.0,
            quanta: 200,
            p0_w: 99.66,
            p1_w: 120.16,
            tip_speed: 120.0,
            hover_induced_v: 0.002,
            fuselage_drag: 0.48,
            air_density: 1.225,
            rotor_solidity: 0.0001,
            rotor_disk_area: 0.5,
            speed: 25.0,
            penalty_z: 5.0,
            energy_threshold: None,
            diag_factor: std::f64::consts::SQRT_2,
        }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.quanta == 0 {
            return Err(EnvError::InvalidParameter("quanta must be positive".into()));
        }
        let positive = [
            ("battery_j", self.battery_j),
            ("tip_speed", self.tip_speed),
            ("hover_induced_v", self.hover_induced_v),
            ("speed", self.speed),
            ("diag_factor", self.diag_factor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(EnvError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let non_negative = [
            ("p0_w", self.p0_w),
            ("p1_w", self.p1_w),
            ("fuselage_drag", self.fuselage_drag),
            ("air_density", self.air_density),
            ("rotor_solidity", self.rotor_solidity),
            ("rotor_disk_area", self.rotor_disk_area),
            ("penalty_z", self.penalty_z),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(EnvError::InvalidParameter(format!(
                    "{name} must be non-negative and finite, got {v}"
                )));
            }
        }
        if let Some(th) = self.energy_threshold {
            if th >= self.quanta {
                return Err(EnvError::InvalidParameter(format!(
                    "energy_threshold {th} must be below quanta {}",
                    self.quanta
                )));
            }
        }
        Ok(())
    }

    pub fn quanta_per_joule(&self) -> f64 {
        f64::from(self.quanta) / self.battery_j
    }

    /// Seconds to cross one cell at cruise speed.
    pub fn slot_seconds(&self, spacing_m: f64) -> f64 {
        spacing_m / self.speed
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversions() {
        assert!((db_to_linear(-30.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(-100.0) - 1e-13).abs() < 1e-28);
    }

    #[test]
    fn defaults_are_valid() {
        RadioParams::default().validate().unwrap();
        EnergyParams::default().validate().unwrap();
        assert_eq!(EnergyParams::default().quanta_per_joule(), 0.02);
        assert_eq!(EnergyParams::default().slot_seconds(100.0), 4.0);
    }

    #[test]
    fn threshold_must_be_below_quanta() {
        let e = EnergyParams {
            energy_threshold: Some(200),
            ..EnergyParams::default()
        };
        assert!(e.validate().is_err());
    }
}
