//! Time propagation of the qubit state under a [`DaviesGenerator`].

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::davies::{unvec, vec, DaviesGenerator};
use crate::error::EvolutionError;
use crate::linalg::{eig_hermitian2, DensityMatrix, Ket, Matrix2};

const POSITIVITY_FLOOR: f64 = -1e-8;
const MAX_CORRECTION: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
    ExactExpm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    pub steps_per_period: usize,
    pub periods: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            steps_per_period: 2000,
            periods: 1.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        if self.steps_per_period < 100 {
            return Err(EvolutionError::InvalidConfig(format!(
                "steps_per_period must be >= 100, got {}",
                self.steps_per_period
            )));
        }
        if !(self.periods > 0.0 && self.periods.is_finite()) {
            return Err(EvolutionError::InvalidConfig(format!(
                "periods must be > 0, got {}",
                self.periods
            )));
        }
        Ok(())
    }

    pub fn total_steps(&self) -> usize {
        (self.steps_per_period as f64 * self.periods).round().max(1.0) as usize
    }
}

/// Uniformly sampled states `rho(t_k)`, `t_k = k dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Largest Hermiticity/trace correction applied to any recorded state.
    pub max_correction: f64,
    /// Most negative eigenvalue encountered before correction.
    pub min_eigenvalue: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }
}

/// `|theta> = cos(theta/2)|1> + sin(theta/2)|-1>` as a density matrix.
pub fn initial_state(theta: f64) -> Result<DensityMatrix, EvolutionError> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(EvolutionError::ThetaOutOfRange(theta));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let psi = Ket([C64::new(c, 0.0), C64::new(s, 0.0)]);
    Ok(DensityMatrix::from_matrix_unchecked(Matrix2::outer(&psi, &psi)))
}

fn rk4_step(g: &DaviesGenerator, rho: &Matrix2, dt: f64) -> Matrix2 {
    let k1 = g.apply_matrix(rho);
    let k2 = g.apply_matrix(&(*rho + k1.scale_re(0.5 * dt)));
    let k3 = g.apply_matrix(&(*rho + k2.scale_re(0.5 * dt)));
    let k4 = g.apply_matrix(&(*rho + k3.scale_re(dt)));
    *rho + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(dt / 6.0)
}

fn propagate(step: &nalgebra::Matrix4<C64>, rho: &Matrix2) -> Matrix2 {
    let v = step * nalgebra::Vector4::from(vec(rho));
    unvec(&[v[0], v[1], v[2], v[3]])
}

struct Monitor {
    max_correction: f64,
    min_eigenvalue: f64,
}

impl Monitor {
    /// Re-Hermitize and renormalize, failing on large corrections or
    /// negative eigenvalues.
    fn admit(&mut self, raw: Matrix2, time: f64) -> Result<Matrix2, EvolutionError> {
        let hermitian = raw.hermitian_part();
        let trace = hermitian.trace().re;
        let fixed = hermitian.scale_re(1.0 / trace);
        let correction = fixed.max_abs_diff(&raw);
        // Negated so that NaN also trips the monitor.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(correction <= MAX_CORRECTION) {
            return Err(EvolutionError::DriftExceeded { time, correction });
        }
        let spectrum = eig_hermitian2(&DensityMatrix::from_matrix_unchecked(fixed));
        let lowest = spectrum.p[1];
        if lowest < POSITIVITY_FLOOR {
            return Err(EvolutionError::PositivityViolation {
                time,
                min_eigenvalue: lowest,
            });
        }
        self.max_correction = self.max_correction.max(correction);
        self.min_eigenvalue = self.min_eigenvalue.min(lowest);
        Ok(fixed)
    }
}

/// Integrate `periods` free periods on a uniform grid of
/// `steps_per_period` steps per period.
pub fn evolve(
    rho0: &DensityMatrix,
    g: &DaviesGenerator,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, EvolutionError> {
    cfg.validate()?;
    let n = cfg.total_steps();
    let t_end = cfg.periods * g.period();
    let dt = t_end / n as f64;
    let exact_step = match cfg.method {
        Method::ExactExpm => Some(g.to_superoperator().exp(dt)),
        Method::Rk4 => None,
    };

    let mut monitor = Monitor {
        max_correction: 0.0,
        min_eigenvalue: eig_hermitian2(rho0).p[1],
    };
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(*rho0);
    let mut rho = *rho0.matrix();
    for k in 1..=n {
        let t = k as f64 * dt;
        let raw = match &exact_step {
            Some(step) => propagate(step, &rho),
            None => rk4_step(g, &rho, dt),
        };
        rho = monitor.admit(raw, t)?;
        times.push(t);
        states.push(DensityMatrix::from_matrix_unchecked(rho));
    }
    Ok(Trajectory {
        times,
        states,
        max_correction: monitor.max_correction,
        min_eigenvalue: monitor.min_eigenvalue,
    })
}

/// `vec(rho(t)) = exp(t L) vec(rho0)` on the 4x4 superoperator.
pub fn evolve_exact(
    rho0: &DensityMatrix,
    g: &DaviesGenerator,
    t: f64,
) -> Result<DensityMatrix, EvolutionError> {
    if t == 0.0 {
        return Ok(*rho0);
    }
    let out = propagate(&g.to_superoperator().exp(t), rho0.matrix()).hermitian_part();
    let out = out.scale_re(1.0 / out.trace().re);
    Ok(DensityMatrix::new(out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathParams;
    use crate::davies::{GeneratorConfig, QubitParams};
    use std::f64::consts::PI;

    fn generator(mu_x: f64, mu_z: f64, t: f64) -> DaviesGenerator {
        DaviesGenerator::new(
            &QubitParams::new(mu_x, mu_z).unwrap(),
            &BathParams::new(1e-2, 1e2, t).unwrap(),
            &GeneratorConfig::default(),
        )
        .unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn initial_state_examples() {
        assert!(initial_state(0.0).unwrap().matrix().max_abs_diff(&Matrix2::diag(1.0, 0.0)) < 1e-16);
        assert!(initial_state(PI).unwrap().matrix().max_abs_diff(&Matrix2::diag(0.0, 1.0)) < 1e-16);
        let half = Matrix2::new(c(0.5), c(0.5), c(0.5), c(0.5));
        let rho = initial_state(PI / 2.0).unwrap();
        assert!(rho.matrix().max_abs_diff(&half) < 1e-15);
        let p = eig_hermitian2(&rho).p;
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);
        assert!(DensityMatrix::new(*rho.matrix()).is_ok());
        assert!(matches!(initial_state(-0.1), Err(EvolutionError::ThetaOutOfRange(_))));
        assert!(matches!(initial_state(3.2), Err(EvolutionError::ThetaOutOfRange(_))));
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig {
            steps_per_period: 50,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig {
            periods: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn free_evolution_is_periodic() {
        let g = DaviesGenerator::free(1.0);
        for theta in [0.3, PI / 2.0, 2.5] {
            let rho0 = initial_state(theta).unwrap();
            let traj = evolve(&rho0, &g, &IntegratorConfig::default()).unwrap();
            assert_eq!(traj.len(), 2001);
            assert!((traj.times[2000] - 2.0 * PI).abs() < 1e-12);
            assert!(traj.last().matrix().max_abs_diff(rho0.matrix()) < 1e-9);
            let exact = evolve_exact(&rho0, &g, 2.0 * PI).unwrap();
            assert!(exact.matrix().max_abs_diff(rho0.matrix()) < 1e-12);
        }
    }

    #[test]
    fn exact_at_zero_time_is_identity() {
        let rho0 = initial_state(1.1).unwrap();
        assert_eq!(evolve_exact(&rho0, &generator(0.3, 0.2, 1.0), 0.0).unwrap(), rho0);
    }

    #[test]
    fn stationary_state_stays_put() {
        let g = generator(0.3, 0.2, 1.0);
        let s = g.stationary_state().unwrap();
        let traj = evolve(&s, &g, &IntegratorConfig { periods: 2.0, ..Default::default() }).unwrap();
        for rho in &traj.states {
            assert!(rho.matrix().max_abs_diff(s.matrix()) < 1e-10);
        }
    }

    #[test]
    fn rk4_matches_exact_propagation() {
        let g = generator(0.3, 0.0, 0.0);
        let rho0 = initial_state(PI / 2.0).unwrap();
        let traj = evolve(&rho0, &g, &IntegratorConfig::default()).unwrap();
        let exact = evolve_exact(&rho0, &g, g.period()).unwrap();
        assert!(traj.last().matrix().max_abs_diff(exact.matrix()) < 1e-8);

        let sampled = evolve(
            &rho0,
            &g,
            &IntegratorConfig {
                method: Method::ExactExpm,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(sampled.last().matrix().max_abs_diff(exact.matrix()) < 1e-12);
    }

    #[test]
    fn long_time_limit_is_gibbs() {
        let g = generator(0.3, 0.0, 1.0);
        let rho = evolve_exact(&initial_state(0.4).unwrap(), &g, 1e3 * g.period()).unwrap();
        assert!(rho.trace_distance(&DensityMatrix::gibbs(1.0, 1.0)) < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let g = generator(0.3, 0.5, 1.0);
        let rho0 = initial_state(1.0).unwrap();
        let exact = evolve_exact(&rho0, &g, g.period()).unwrap();
        let err = |steps| {
            let cfg = IntegratorConfig {
                steps_per_period: steps,
                ..Default::default()
            };
            evolve(&rho0, &g, &cfg).unwrap().last().matrix().max_abs_diff(exact.matrix())
        };
        let (e1, e2, e3) = (err(100), err(200), err(400));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((13.0..19.0).contains(&ratio), "ratio {ratio} ({e1:e}, {e2:e}, {e3:e})");
        }
    }

    #[test]
    fn monotone_approach_to_equilibrium() {
        for t in [0.0, 1.0] {
            let g = generator(0.3, 0.2, t);
            let fixed = g.stationary_state().unwrap();
            let traj = evolve(&initial_state(0.7).unwrap(), &g, &IntegratorConfig::default()).unwrap();
            let d: Vec<f64> = traj.states.iter().map(|r| r.trace_distance(&fixed)).collect();
            assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-9));
        }
    }

    #[test]
    fn monitors_stay_small() {
        let g = generator(0.3, 0.5, 1.0);
        let traj = evolve(&initial_state(2.0).unwrap(), &g, &IntegratorConfig::default()).unwrap();
        assert!(traj.max_correction < 1e-9);
        assert!(traj.states.iter().all(|r| (r.matrix().trace().re - 1.0).abs() < 1e-10));
    }

    #[test]
    fn unphysical_generator_trips_positivity_monitor() {
        // a negative relaxation rate pushes the excited population above 1
        let mut g = generator(0.3, 0.0, 0.0);
        g.jumps[1].rate = -0.5;
        let err = evolve(&initial_state(0.0).unwrap(), &g, &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, EvolutionError::PositivityViolation { .. }));
    }
}
