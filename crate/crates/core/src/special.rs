//! Error function, Dawson's integral and the imaginary error function.
//!
//! Everything here is evaluated from convergent positive-term series or
//! continued fractions, so results do not depend on a platform libm beyond
//! `exp`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Largest |x| accepted by [`erfi`].
pub const ERFI_MAX_ARG: f64 = 30.0;

const MAX_TERMS: usize = 500;

/// `e^{-x²} Σ_k 2^k x^{2k+1} / (2k+1)!!`, which equals `(√π/2) erf(x)`.
///
/// All terms are positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 0..MAX_TERMS {
        term *= 2.0 * x2 / (2 * k + 3) as f64;
        sum += term;
        if term < sum * f64::EPSILON * 0.25 {
            break;
        }
    }
    sum * (-x2).exp()
}

/// Continued fraction for `erfc(x)`, x > 0, evaluated with modified Lentz.
///
/// `erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..MAX_TERMS {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < 3.0 {
        FRAC_2_SQRT_PI * erf_series(ax)
    } else if ax < 27.0 {
        1.0 - erfc_cf(ax)
    } else {
        1.0
    };
    v.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 0.5 {
        1.0 - erf(x)
    } else if x < 27.5 {
        // the continued fraction is slow but still convergent below 3
        erfc_cf(x)
    } else {
        0.0
    }
}

/// `Σ_k x^{2k+1} / (k! (2k+1))`, equal to `(√π/2) erfi(x)`.
fn erfi_series(x: f64) -> f64 {
    let x2 = x * x;
    // power = x^{2k+1}/k!
    let mut power = x;
    let mut sum = x;
    for k in 1..MAX_TERMS {
        power *= x2 / k as f64;
        let term = power / (2 * k + 1) as f64;
        sum += term;
        if term < sum * f64::EPSILON * 0.25 {
            break;
        }
    }
    sum
}

/// Asymptotic expansion `D(x) ~ 1/(2x) Σ_k (2k-1)!! / (2x²)^k`, used for x ≥ 7
/// where the smallest term is below 1e-20.
fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let next = term * (2 * k - 1) as f64 * inv;
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * f64::EPSILON * 0.25 {
            break;
        }
    }
    sum / (2.0 * x)
}

const SERIES_CUTOFF: f64 = 7.0;

/// Dawson's integral `D(x) = e^{-x²} ∫₀ˣ e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < SERIES_CUTOFF { (-ax * ax).exp() * erfi_series(ax) } else { dawson_asymptotic(ax) };
    v.copysign(x)
}

/// Imaginary error function `erfi(x) = -i erf(ix) = (2/√π) e^{x²} D(x)`.
///
/// Returns [`Error::Overflow`] for |x| > 30 or when the result is not
/// representable (|x| beyond roughly 26.6).
pub fn erfi(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > ERFI_MAX_ARG {
        return Err(Error::Overflow(x));
    }
    let ax = x.abs();
    let v = if ax < SERIES_CUTOFF {
        FRAC_2_SQRT_PI * erfi_series(ax)
    } else {
        FRAC_2_SQRT_PI * (ax * ax).exp() * dawson_asymptotic(ax)
    };
    if !v.is_finite() {
        return Err(Error::Overflow(x));
    }
    Ok(v.copysign(x))
}
