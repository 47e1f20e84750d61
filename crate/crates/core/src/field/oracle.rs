//! Direct numerical integration of the smeared propagators.
//!
//! The time integrals reduce analytically: two Gaussian switchings of width
//! `T` convolve into `√π T e^{-τ²/4T²}` in the time difference `τ`. The two
//! spatial Gaussians convolve into an isotropic Gaussian of width `s = √2 σ`
//! in the separation vector, so only the distribution of
//! `r = |L ê + ξ|` matters. Its density is
//! `p(r) = r/(L s √(2π)) [e^{-(r-L)²/2s²} - e^{-(r+L)²/2s²}]`.
//! What is left is integrated numerically; none of the special functions used
//! by the closed forms appear here.

use std::f64::consts::PI;

use super::InteractionProfile;
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Relative accuracy promised by the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-4;

const INNER_REL_TOL: f64 = 1e-11;
const OUTER_REL_TOL: f64 = 1e-9;
const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
}

fn check(value: f64, abs_error: f64) -> Result<OracleValue> {
    let rel_error = abs_error / value.abs().max(f64::MIN_POSITIVE);
    if !(rel_error <= ORACLE_TOLERANCE) {
        return Err(Error::NonConvergence { estimate: rel_error, tolerance: ORACLE_TOLERANCE });
    }
    Ok(OracleValue { value, rel_error })
}

/// `E_r[g(r)]` for `r = |L ê + ξ|`, `ξ ~ N(0, s² I)`, where `rg(r) = r·g(r)`.
///
/// Substitutes `r = L + s u` so the narrow Gaussian peak is resolved on a
/// fixed grid of breakpoints.
fn radial_average(separation: f64, s: f64, rg: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let l = separation;
    let ratio = l / s;
    let lower = (-ratio).max(-40.0);
    let mut breaks = vec![lower];
    for b in [-12.0, -6.0, -3.0, 0.0, 3.0, 6.0, 12.0, 40.0] {
        if b > lower {
            breaks.push(b);
        }
    }
    let integrand = |u: f64| {
        let r = l + s * u;
        let kernel = (-0.5 * u * u).exp() - (-0.5 * (2.0 * ratio + u).powi(2)).exp();
        kernel * rg(r)
    };
    let res = integrate(integrand, &breaks, OUTER_REL_TOL, 0.0, MAX_SEGMENTS)?;
    let norm = 1.0 / (l * (2.0 * PI).sqrt());
    Ok((res.value * norm, res.error * norm))
}

/// `Δ(Λ_i, Λ_j)` by quadrature, using the massless retarded Green's function
/// `G_R(x, x') = -δ(t - t' - |x - x'|) / (4π |x - x'|)` (sign fixed by
/// `θ(t-t')[φ(x), φ(x')] = i G_R(x, x')`).
pub fn quadrature_oracle_delta(separation: f64, profile: &InteractionProfile) -> Result<OracleValue> {
    profile.validate()?;
    if !(separation > 0.0) {
        return Err(crate::error::invalid("separation", "must be > 0"));
    }
    let t = profile.duration;
    let s = 2f64.sqrt() * profile.sigma;
    // r · G_R(r) after the time integral: -√π T e^{-r²/4T²} / (4π)
    let rg = |r: f64| -(PI.sqrt()) * t * (-(r * r) / (4.0 * t * t)).exp() / (4.0 * PI);
    let (value, err) = radial_average(separation, s, rg)?;
    // G_R(Λ_i,Λ_j) + G_R(Λ_j,Λ_i), equal by symmetry
    check(2.0 * value, 2.0 * err)
}

/// Point-separated vacuum Wightman function after the time smearing,
/// `w(r) = √π T/(4π² r) · PV∫ e^{-τ²/4T²}/(r - τ) dτ`, returned as `r·w(r)`.
///
/// The principal value is folded onto `(0, ∞)`:
/// `PV∫ f(τ)/(r-τ) dτ = ∫₀^∞ [f(r-y) - f(r+y)]/y dy`, and with `y = 2T v`,
/// `u = r/2T` the bracket becomes `2 e^{-u²-v²} sinh(2uv)`.
fn r_times_wightman_point(r: f64, duration: f64) -> Result<f64> {
    let u = r / (2.0 * duration);
    let f = |v: f64| {
        if v == 0.0 {
            return 4.0 * u * (-u * u).exp();
        }
        let x = 2.0 * u * v;
        // e^{-u²-v²}·2 sinh(x) = e^{-(v-u)²} - e^{-(v+u)²}
        let diff = if x < 1e-3 {
            2.0 * (-u * u - v * v).exp() * (x + x * x * x / 6.0 + x.powi(5) / 120.0)
        } else {
            (-(v - u).powi(2)).exp() - (-(v + u).powi(2)).exp()
        };
        diff / v
    };
    let top = u + 40f64.sqrt() + 2.0;
    let res = integrate(f, &[0.0, u.max(1e-3).min(top / 2.0), top], INNER_REL_TOL, 0.0, MAX_SEGMENTS)?;
    Ok(PI.sqrt() * duration / (4.0 * PI * PI) * res.value)
}

/// `W(Λ_i, Λ_j)` by quadrature. A separation of zero gives the self term
/// `W(Λ_i, Λ_i)`.
pub fn quadrature_oracle_wightman(separation: f64, profile: &InteractionProfile) -> Result<OracleValue> {
    profile.validate()?;
    if !(separation >= 0.0) {
        return Err(crate::error::invalid("separation", "must be ≥ 0"));
    }
    let t = profile.duration;
    let s = 2f64.sqrt() * profile.sigma;
    if separation == 0.0 {
        // Maxwell density p(r) = √(2/π) r² e^{-r²/2s²} / s³, with r = s u
        let mut inner_err = 0.0f64;
        let integrand = |u: f64| {
            let r = s * u;
            match r_times_wightman_point(r, t) {
                Ok(v) => (2.0 / PI).sqrt() * u * (-0.5 * u * u).exp() * v / s,
                Err(_) => {
                    inner_err = f64::INFINITY;
                    f64::NAN
                }
            }
        };
        let res = integrate(integrand, &[0.0, 1.0, 3.0, 6.0, 12.0, 40.0], OUTER_REL_TOL, 0.0, MAX_SEGMENTS);
        if inner_err.is_infinite() {
            return Err(Error::NonConvergence { estimate: f64::INFINITY, tolerance: ORACLE_TOLERANCE });
        }
        let res = res?;
        return check(res.value, res.error);
    }
    let failed = std::cell::Cell::new(false);
    let rg = |r: f64| match r_times_wightman_point(r.max(0.0), t) {
        Ok(v) => v,
        Err(_) => {
            failed.set(true);
            0.0
        }
    };
    let (value, err) = radial_average(separation, s, rg)?;
    if failed.get() {
        return Err(Error::NonConvergence { estimate: f64::INFINITY, tolerance: ORACLE_TOLERANCE });
    }
    check(value, err)
}
