//! Rotor power, LOS channel gain, relay/flight energy in battery quanta and
//! the sensor coverage radius.

use super::action::Direction;
use super::grid::{Cell, GridSpec};
use super::params::{EnergyParams, RadioParams};
use super::EnvError;

/// Propulsion power (W) of a rotary-wing UAV flying level at `speed` m/s.
///
/// The induced-power term is evaluated as `1 / (sqrt(1 + x^2) + x)` with
/// `x = v^2 / (2 mu0^2)`, which is algebraically identical to
/// `sqrt(1 + x^2) - x` but does not cancel for the tiny `mu0` of the default
/// profile.
pub fn rotor_power(speed: f64, e: &EnergyParams) -> Result<f64, EnvError> {
    if !(speed.is_finite() && speed >= 0.0) {
        return Err(EnvError::InvalidParameter(format!("speed must be >= 0, got {speed}")));
    }
    let v2 = speed * speed;
    let blade = e.p0_w * (1.0 + 3.0 * v2 / (e.tip_speed * e.tip_speed));
    let x = v2 / (2.0 * e.hover_induced_v * e.hover_induced_v);
    let induced = e.p1_w * (1.0 / (1.0f64.hypot(x) + x)).sqrt();
    let parasite = 0.5 * e.fuselage_drag * e.air_density * e.rotor_solidity * e.rotor_disk_area * v2 * speed;
    let p = blade + induced + parasite;
    if !p.is_finite() || p <= 0.0 {
        return Err(EnvError::InvalidParameter(format!(
            "rotor power evaluated to {p} at speed {speed}"
        )));
    }
    Ok(p)
}

/// LOS power gain between a UAV above `uav_cell` and the base station.
pub fn channel_gain(uav_cell: Cell, g: &GridSpec, r: &RadioParams) -> f64 {
    let dh = r.uav_alt_m - r.bs_alt_m;
    r.beta0 / (dh * dh + g.dist2_to_bs(uav_cell))
}

/// Battery quanta (fractional) spent relaying one packet to the base station.
pub fn relay_energy_quanta(uav_cell: Cell, g: &GridSpec, r: &RadioParams, e: &EnergyParams) -> f64 {
    let joules = r.noise_w * r.snr_threshold() / channel_gain(uav_cell, g, r);
    e.quanta_per_joule() * joules
}

/// Battery quanta (fractional) spent flying or hovering for one slot.
///
/// Diagonal moves cover `diag_factor` times the distance at the same speed.
pub fn flight_energy_quanta(direction: Direction, e: &EnergyParams, slot_s: f64) -> Result<f64, EnvError> {
    let (v, mult) = match direction {
        Direction::Hover => (0.0, 1.0),
        d if d.is_diagonal() => (e.speed, e.diag_factor),
        _ => (e.speed, 1.0),
    };
    Ok(e.quanta_per_joule() * rotor_power(v, e)? * slot_s * mult)
}

/// Ground radius (m) within which a sensor's packet is decodable at the UAV.
pub fn coverage_radius(r: &RadioParams) -> Result<f64, EnvError> {
    if let Some(over) = r.coverage_override_m {
        return Ok(over);
    }
    let link = r.beta0 * r.tx_power_w / (r.snr_threshold() * r.noise_w);
    let floor = r.uav_alt_m * r.uav_alt_m;
    let radicand = link - floor;
    if radicand.is_nan() || radicand < 0.0 {
        return Err(EnvError::ZeroCoverage { link, floor });
    }
    Ok(radicand.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 50-digit evaluation of the model equations.
    const P25: f64 = 112.875_862_8;
    const GAIN_CENTER: f64 = 1.384_083_044_982_698_9e-7;
    const GAIN_CORNER: f64 = 1.971_511_656_562_669_4e-9;
    const RELAY_CENTER: f64 = 4.4795e-7;
    const RELAY_CORNER: f64 = 3.144_795e-5;
    const RADIUS: f64 = 978.642_904_988_265_4;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hover_power_is_p0_plus_p1() {
        let e = EnergyParams::default();
        assert!(rel(rotor_power(0.0, &e).unwrap(), 219.82) < 1e-12);
    }

    #[test]
    fn cruise_power() {
        let e = EnergyParams::default();
        assert!(rel(rotor_power(25.0, &e).unwrap(), P25) < 1e-9);
        let no_drag = EnergyParams {
            fuselage_drag: 0.0,
            ..e
        };
        let diff = rotor_power(25.0, &e).unwrap() - rotor_power(25.0, &no_drag).unwrap();
        assert!((diff - 0.229_687_5).abs() < 1e-9);
    }

    #[test]
    fn overflow_is_reported() {
        let e = EnergyParams {
            fuselage_drag: 1e300,
            ..EnergyParams::default()
        };
        assert!(rotor_power(1e10, &e).is_err());
        assert!(rotor_power(-1.0, &EnergyParams::default()).is_err());
    }

    #[test]
    fn gains_and_relay() {
        let g = GridSpec::default();
        let r = RadioParams::default();
        let e = EnergyParams::default();
        assert!(rel(channel_gain(g.center(), &g, &r), GAIN_CENTER) < 1e-9);
        assert!(rel(channel_gain(Cell::new(10, 10), &g, &r), GAIN_CORNER) < 1e-9);
        assert_eq!(
            channel_gain(Cell::new(2, 5), &g, &r),
            channel_gain(Cell::new(5, 8), &g, &r)
        );
        assert!(rel(relay_energy_quanta(g.center(), &g, &r, &e), RELAY_CENTER) < 1e-9);
        assert!(rel(relay_energy_quanta(Cell::new(10, 10), &g, &r, &e), RELAY_CORNER) < 1e-9);
        let silent = RadioParams { packet_bits: 0.0, ..r };
        assert_eq!(relay_energy_quanta(Cell::new(10, 10), &g, &silent, &e), 0.0);
    }

    #[test]
    fn flight_quanta() {
        let e = EnergyParams::default();
        let hover = flight_energy_quanta(Direction::Hover, &e, 4.0).unwrap();
        let east = flight_energy_quanta(Direction::East, &e, 4.0).unwrap();
        let ne = flight_energy_quanta(Direction::NorthEast, &e, 4.0).unwrap();
        assert!(rel(hover, 17.5856) < 1e-12);
        assert!(rel(east, 9.030_069_024) < 1e-9);
        assert!(rel(ne, east * std::f64::consts::SQRT_2) < 1e-15);
    }

    #[test]
    fn radius() {
        let r = RadioParams::default();
        let radius = coverage_radius(&r).unwrap();
        assert!(rel(radius, RADIUS) < 1e-9);
        let link = r.beta0 * r.tx_power_w / (r.snr_threshold() * r.noise_w);
        assert!(rel(radius * radius + r.uav_alt_m * r.uav_alt_m, link) < 1e-9);
        assert_eq!(
            coverage_radius(&RadioParams {
                coverage_override_m: Some(300.0),
                ..r
            })
            .unwrap(),
            300.0
        );
        assert!(matches!(
            coverage_radius(&RadioParams { tx_power_w: 1e-6, ..r }),
            Err(EnvError::ZeroCoverage { .. })
        ));
    }

    #[test]
    fn radius_boundary_is_zero() {
        // link budget equal to h_u^2: beta0 * P / (snr * noise) = 1e4 with beta0 = snr = noise = 1.
        let r = RadioParams {
            beta0: 1.0,
            tx_power_w: 1e4,
            packet_bits: 1.0,
            bandwidth_hz: 1.0,
            noise_w: 1.0,
            ..RadioParams::default()
        };
        assert_eq!(coverage_radius(&r).unwrap(), 0.0);
    }
}
