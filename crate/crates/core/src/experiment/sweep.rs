use crate::davies::DaviesGenerator;
use crate::error::Error;
use crate::evolution::{evolve, initial_state};
use crate::phase::{geometric_phase, phase_representative, spectral_track};

use super::config::ExperimentConfig;

/// How the theta points of a sweep are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Uses rayon when the `parallel` feature is enabled, serial otherwise.
    #[default]
    Parallel,
}

/// Outcome at one polar angle. A failed point keeps its error message and
/// leaves `phi` and `magnitude` empty.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub theta: f64,
    pub phi: Option<f64>,
    pub magnitude: Option<f64>,
    pub degenerate: bool,
    pub error: Option<String>,
    pub max_correction: f64,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }

    /// `(theta, phi)` for every successful point.
    pub fn curve(&self) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter_map(|r| r.phi.map(|p| (r.theta, p)))
            .collect()
    }

    pub fn max_correction(&self) -> f64 {
        self.records.iter().map(|r| r.max_correction).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

fn run_point(cfg: &ExperimentConfig, g: &DaviesGenerator, theta: f64) -> SweepRecord {
    let mut rec = SweepRecord {
        theta,
        phi: None,
        magnitude: None,
        degenerate: false,
        error: None,
        max_correction: 0.0,
        min_eigenvalue: f64::NAN,
    };
    let outcome = (|| -> Result<(), Error> {
        let rho0 = initial_state(theta)?;
        let traj = evolve(&rho0, g, &cfg.integrator)?;
        rec.max_correction = traj.max_correction;
        rec.min_eigenvalue = traj.min_eigenvalue;
        let st = spectral_track(&traj)?;
        rec.degenerate = st.degenerate.iter().any(|&d| d);
        let res = geometric_phase(&st)?;
        rec.phi = Some(phase_representative(res.phi, cfg.sweep.window));
        rec.magnitude = Some(res.magnitude);
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
    }
    rec
}

/// Evolve every theta of the grid over the configured number of periods
/// and extract its geometric phase. Per-point failures are recorded, not
/// propagated; only an invalid configuration or generator aborts the sweep.
pub fn run_sweep(cfg: &ExperimentConfig, exec: Execution) -> Result<SweepResult, Error> {
    cfg.validate()?;
    let g = DaviesGenerator::new(&cfg.qubit, &cfg.bath, &cfg.generator)?;
    let thetas = cfg.sweep.thetas();
    let records = match exec {
        Execution::Serial => thetas.iter().map(|&t| run_point(cfg, &g, t)).collect(),
        Execution::Parallel => parallel_map(&thetas, |t| run_point(cfg, &g, t)),
    };
    Ok(SweepResult {
        config: cfg.clone(),
        records,
    })
}

#[cfg(feature = "parallel")]
fn parallel_map<F>(xs: &[f64], f: F) -> Vec<SweepRecord>
where
    F: Fn(f64) -> SweepRecord + Sync,
{
    use rayon::prelude::*;
    xs.par_iter().map(|&x| f(x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<F>(xs: &[f64], f: F) -> Vec<SweepRecord>
where
    F: Fn(f64) -> SweepRecord,
{
    xs.iter().map(|&x| f(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{circular_difference, free_phase};

    fn small(mu_x: f64, mu_z: f64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.qubit.mu_x = mu_x;
        cfg.qubit.mu_z = mu_z;
        cfg.sweep.count = 8;
        cfg.integrator.steps_per_period = 400;
        cfg
    }

    #[test]
    fn uncoupled_sweep_is_free_phase() {
        let mut cfg = small(0.0, 0.0);
        cfg.integrator.steps_per_period = 2000;
        let res = run_sweep(&cfg, Execution::Serial).unwrap();
        for r in &res.records {
            let phi = r.phi.unwrap();
            assert!(circular_difference(phi, free_phase(r.theta)).abs() < 1e-6, "{} {} {}", r.theta, phi, free_phase(r.theta));
            assert!(!r.degenerate && r.error.is_none());
        }
    }

    #[test]
    fn serial_and_parallel_agree_exactly() {
        let cfg = small(0.3, 0.1);
        let a = run_sweep(&cfg, Execution::Serial).unwrap();
        let b = run_sweep(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failures_are_recorded_per_point() {
        use crate::davies::JumpOperator;
        use crate::linalg::Matrix2;
        let cfg = small(0.0, 0.0);
        let free = DaviesGenerator::free(1.0);
        let pump = JumpOperator {
            matrix: Matrix2::lowering(),
            bohr_frequency: -1.0,
            rate: -0.5,
        };
        let g = DaviesGenerator::from_parts(1.0, free.effective_hamiltonian, vec![pump]);
        let rec = run_point(&cfg, &g, 0.0);
        assert!(rec.phi.is_none() && rec.magnitude.is_none());
        assert!(rec.error.as_deref().unwrap().contains("positiv"), "{:?}", rec.error);
    }

    #[test]
    fn invalid_config_aborts() {
        let mut cfg = small(0.0, 0.0);
        cfg.sweep.count = 0;
        assert_eq!(run_sweep(&cfg, Execution::Serial).unwrap_err().exit_code(), 1);
    }
}
