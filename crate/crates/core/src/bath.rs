//! Ohmic bosonic bath: spectral density, the Fourier transform `c(omega)` of
//! the bath autocorrelation, and its principal-value Hilbert transform
//! `s(omega)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::BathError;
use crate::quadrature;

/// Coupling strength, cutoff and temperature of the bath.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BathParams {
    pub alpha: f64,
    pub omega_c: f64,
    pub temperature: f64,
    /// When set, `c(0)` is replaced by `pi * alpha * T_eff` with this
    /// effective temperature. Without it `c(0) = pi * alpha * T`, which is 0
    /// at `T = 0` and switches pure dephasing off.
    #[serde(rename = "dephasing_rate_override", skip_serializing_if = "Option::is_none")]
    pub c0_override_temperature: Option<f64>,
}

impl Default for BathParams {
    fn default() -> Self {
        Self {
            alpha: 1e-2,
            omega_c: 1e2,
            temperature: 0.0,
            c0_override_temperature: None,
        }
    }
}

impl BathParams {
    pub fn new(alpha: f64, omega_c: f64, temperature: f64) -> Result<Self, BathError> {
        let p = Self {
            alpha,
            omega_c,
            temperature,
            c0_override_temperature: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_c0_override(mut self, t_eff: Option<f64>) -> Result<Self, BathError> {
        self.c0_override_temperature = t_eff;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), BathError> {
        let bad = |msg: String| Err(BathError::InvalidParams(msg));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return bad(format!("omega_c must be > 0, got {}", self.omega_c));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if let Some(t) = self.c0_override_temperature {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("c0 override temperature must be >= 0, got {t}"));
            }
        }
        Ok(())
    }

    /// Inverse temperature; infinite at `T = 0`.
    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// Settings for the principal-value integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PVQuadratureConfig {
    /// Truncation of the integration axis, in multiples of `omega_c`.
    pub integration_halfwidth: f64,
    /// Half-width of the symmetrized window around the pole.
    pub window_halfwidth: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for PVQuadratureConfig {
    fn default() -> Self {
        Self {
            integration_halfwidth: 40.0,
            window_halfwidth: 1.0,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl PVQuadratureConfig {
    pub fn validate(&self) -> Result<(), BathError> {
        let ok = self.rel_tol > 0.0
            && self.integration_halfwidth > 0.0
            && self.window_halfwidth > 0.0
            && self.max_subdivisions > 0;
        if ok {
            Ok(())
        } else {
            Err(BathError::InvalidParams(format!("quadrature config {self:?}")))
        }
    }
}

/// `D(omega) = (alpha/2) omega exp(-omega/omega_c)` for `omega >= 0`.
pub fn spectral_density(params: &BathParams, omega: f64) -> Result<f64, BathError> {
    if omega < 0.0 {
        return Err(BathError::NegativeFrequency(omega));
    }
    Ok(0.5 * params.alpha * omega * (-omega / params.omega_c).exp())
}

/// `c(omega) = (pi alpha/2) (|omega| coth(beta|omega|/2) + omega) exp(-|omega|/omega_c)`
/// with the `T = 0` and `omega = 0` limits taken explicitly.
pub fn correlation_ft(params: &BathParams, omega: f64) -> f64 {
    let pref = 0.5 * PI * params.alpha;
    let t = params.temperature;
    if omega == 0.0 {
        let t0 = params.c0_override_temperature.unwrap_or(t);
        return PI * params.alpha * t0;
    }
    let a = omega.abs();
    let cutoff = (-a / params.omega_c).exp();
    if t == 0.0 {
        return if omega > 0.0 { 2.0 * pref * omega * cutoff } else { 0.0 };
    }
    // |w| (e^x + 1)/(e^x - 1) + w with x = |w|/T, rewritten without cancellation
    let x = a / t;
    let bracket = if omega > 0.0 {
        -2.0 * a / (-x).exp_m1()
    } else {
        2.0 * a / x.exp_m1()
    };
    pref * bracket * cutoff
}

/// Points `center`, `center ± scale 2^k` out to distance `reach`. Seeding the
/// adaptive integrator with them keeps any panel from being wider than the
/// distance to the nearest feature, which rules out false convergence on
/// long, nearly empty intervals.
fn geometric_cuts(center: f64, scale: f64, reach: f64) -> Vec<f64> {
    let mut cuts = vec![center];
    let mut d = scale;
    while d < reach {
        cuts.push(center - d);
        cuts.push(center + d);
        d *= 2.0;
    }
    cuts
}

/// Detailed-balance diagnostic `c(-omega)/c(omega)`.
pub fn kms_ratio(params: &BathParams, omega: f64) -> Result<f64, BathError> {
    let undefined = BathError::KmsUndefined {
        temperature: params.temperature,
        omega,
    };
    if omega == 0.0 {
        return Err(undefined);
    }
    if params.temperature == 0.0 {
        return if omega > 0.0 { Ok(0.0) } else { Err(undefined) };
    }
    let forward = correlation_ft(params, omega);
    if forward == 0.0 {
        return Err(undefined);
    }
    Ok(correlation_ft(params, -omega) / forward)
}

/// `s(omega) = (P/2pi) int c(x)/(x - omega) dx`.
///
/// The pole window `[omega - h, omega + h]` is folded onto
/// `int_0^h [c(omega+u) - c(omega-u)]/u du`, which is regular; the exterior
/// is integrated directly out to `|x| <= integration_halfwidth * omega_c`.
pub fn hilbert_transform_s(
    params: &BathParams,
    omega: f64,
    cfg: &PVQuadratureConfig,
) -> Result<f64, BathError> {
    cfg.validate()?;
    if params.alpha == 0.0 {
        return Ok(0.0);
    }
    let c = |x: f64| correlation_ft(params, x);
    let h = cfg.window_halfwidth;
    let limit = cfg.integration_halfwidth * params.omega_c;
    let tol = cfg.rel_tol;
    let budget = cfg.max_subdivisions;
    // finest feature: the thermal edge of width ~T around x = 0
    let finest = if params.temperature > 0.0 {
        params.temperature.min(h)
    } else {
        h
    };

    let window_cuts = geometric_cuts(omega.abs(), finest, h);
    let window = quadrature::integrate(
        |u| (c(omega + u) - c(omega - u)) / u,
        0.0,
        h,
        &window_cuts,
        tol,
        budget,
    )?
    .value;

    let mut cuts = geometric_cuts(0.0, finest, 2.0 * limit);
    cuts.extend(geometric_cuts(omega, h, 2.0 * limit));
    let mut exterior = 0.0;
    if omega - h > -limit {
        exterior += quadrature::integrate(
            |x| c(x) / (x - omega),
            -limit,
            omega - h,
            &cuts,
            tol,
            budget,
        )?
        .value;
    }
    if omega + h < limit {
        exterior += quadrature::integrate(
            |x| c(x) / (x - omega),
            omega + h,
            limit,
            &cuts,
            tol,
            budget,
        )?
        .value;
    }
    Ok((window + exterior) / (2.0 * PI))
}
