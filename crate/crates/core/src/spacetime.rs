//! Qubit motion in Minkowski spacetime (c = 1) and the rotation angles it sets.
//!
//! During the local-rotation stage each qubit circles with radius `R` and
//! angular frequency `ω`; its internal Hamiltonian `(Ω/2) n·σ` then acts for
//! the proper time `Δτ = √(1 - R²ω²) Δt`, giving the rotation angle
//! `θ = Ω Δτ / 2`.

use crate::error::{invalid, Error, Result};

/// One circular segment of a worldline, in lab coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySegment {
    pub radius: f64,
    pub angular_frequency: f64,
    pub coordinate_duration: f64,
}

impl TrajectorySegment {
    pub fn new(radius: f64, angular_frequency: f64, coordinate_duration: f64) -> Result<Self> {
        let seg = Self { radius, angular_frequency, coordinate_duration };
        seg.validate()?;
        Ok(seg)
    }

    /// A qubit at rest for `coordinate_duration`.
    pub fn inertial(coordinate_duration: f64) -> Result<Self> {
        Self::new(0.0, 0.0, coordinate_duration)
    }

    pub fn speed(&self) -> f64 {
        self.radius * self.angular_frequency.abs()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0) || !self.radius.is_finite() {
            return Err(invalid("radius", format!("must be finite and ≥ 0, got {}", self.radius)));
        }
        if !(self.coordinate_duration > 0.0) || !self.coordinate_duration.is_finite() {
            return Err(invalid(
                "coordinate_duration",
                format!("must be finite and > 0, got {}", self.coordinate_duration),
            ));
        }
        if !self.angular_frequency.is_finite() {
            return Err(invalid("angular_frequency", "must be finite"));
        }
        let speed = self.speed();
        if speed >= 1.0 {
            return Err(Error::Superluminal { speed });
        }
        Ok(())
    }

    pub fn proper_time(&self) -> Result<f64> {
        Ok(proper_time_factor(self)? * self.coordinate_duration)
    }
}

/// Internal parameters of one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub energy_gap: f64,
    /// Angle of the rotation axis from the z axis, in `[0, π]`.
    pub axis_azimuthal: f64,
    /// Angle of the rotation axis in the xy plane, in `[0, 2π)`.
    pub axis_polar: f64,
    pub position: [f64; 3],
}

impl QubitSpec {
    pub fn new(energy_gap: f64, axis_azimuthal: f64, axis_polar: f64, position: [f64; 3]) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        if !(energy_gap >= 0.0) || !energy_gap.is_finite() {
            return Err(invalid("energy_gap", format!("must be finite and ≥ 0, got {energy_gap}")));
        }
        if !(0.0..=PI).contains(&axis_azimuthal) {
            return Err(invalid("axis_azimuthal", format!("must lie in [0, π], got {axis_azimuthal}")));
        }
        if !(0.0..TAU).contains(&axis_polar) {
            return Err(invalid("axis_polar", format!("must lie in [0, 2π), got {axis_polar}")));
        }
        Ok(Self { energy_gap, axis_azimuthal, axis_polar, position })
    }
}

/// `dτ/dt = √(1 - R²ω²)` for a circular segment.
pub fn proper_time_factor(seg: &TrajectorySegment) -> Result<f64> {
    seg.validate()?;
    let v = seg.speed();
    Ok(((1.0 - v) * (1.0 + v)).sqrt())
}

/// Rotation angle `θ = Ω Δτ / 2` accumulated along the segment.
///
/// The angle is not reduced modulo 2π; long trajectories give large angles.
pub fn rotation_angle(q: &QubitSpec, seg: &TrajectorySegment) -> Result<f64> {
    Ok(rotation_angle_from_factor(q.energy_gap, proper_time_factor(seg)?, seg.coordinate_duration))
}

/// Rotation angle for an arbitrary worldline whose `dτ/dt` (averaged over the
/// segment) is already known.
pub fn rotation_angle_from_factor(energy_gap: f64, proper_time_factor: f64, coordinate_duration: f64) -> f64 {
    energy_gap * proper_time_factor * coordinate_duration / 2.0
}

/// Angular frequency `ω ≥ 0` that makes a circle of radius `R` produce the
/// rotation angle `target_angle` in coordinate time `Δt`.
pub fn solve_omega_for_angle(target_angle: f64, energy_gap: f64, radius: f64, duration: f64) -> Result<f64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(invalid("radius", format!("must be finite and > 0, got {radius}")));
    }
    if !(duration > 0.0) || !(energy_gap > 0.0) {
        return Err(invalid("energy_gap/duration", "both must be > 0"));
    }
    let max = energy_gap * duration / 2.0;
    if !(target_angle > 0.0) || target_angle > max {
        return Err(Error::UnreachableAngle { target: target_angle, max });
    }
    let ratio = target_angle / max;
    Ok((1.0 - ratio * ratio).max(0.0).sqrt() / radius)
}
