use crate::error::{ConfigError, Error};
use crate::phase::PhaseWindow;

use super::config::ExperimentConfig;
use super::output::Curve;
use super::sweep::{run_sweep, Execution, SweepResult};

/// A family of sweeps sharing one plot.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureSpec {
    pub id: u8,
    pub title: &'static str,
    pub window: PhaseWindow,
    pub members: Vec<(String, ExperimentConfig)>,
}

/// Family `id` (1 to 4) built on top of `base`. Only the swept parameter
/// and the phase window are overridden; everything else is inherited.
pub fn figure_spec(id: u8, base: &ExperimentConfig) -> Result<FigureSpec, ConfigError> {
    let with = |f: &dyn Fn(&mut ExperimentConfig), window: PhaseWindow| {
        let mut c = base.clone();
        c.sweep.window = window;
        f(&mut c);
        c
    };
    let (title, window, members): (_, _, Vec<(String, ExperimentConfig)>) = match id {
        1 => {
            let w = PhaseWindow::ZeroToTwoPi;
            let convention = match base.bath.c0_override_temperature {
                Some(t) => format!("c(0) at T_eff = {t}"),
                None => "strict c(0)".to_string(),
            };
            (
                "Pure dephasing, mu_x = 0",
                w,
                [0.1, 0.5, 1.0, 2.0]
                    .iter()
                    .map(|&mz| {
                        let c = with(&|c| {
                            c.qubit.mu_x = 0.0;
                            c.qubit.mu_z = mz;
                        }, w);
                        (format!("mu_z = {mz}, {convention}"), c)
                    })
                    .collect(),
            )
        }
        2 => {
            let w = PhaseWindow::MinusPiToPi;
            (
                "Transverse coupling, mu_z = 0",
                w,
                [0.05, 0.3, 0.4]
                    .iter()
                    .map(|&mx| {
                        let c = with(&|c| {
                            c.qubit.mu_x = mx;
                            c.qubit.mu_z = 0.0;
                        }, w);
                        (format!("mu_x = {mx}"), c)
                    })
                    .collect(),
            )
        }
        3 => {
            let w = PhaseWindow::MinusPiToPi;
            (
                "Mixed coupling, mu_x = 0.3",
                w,
                [0.0, 0.1, 0.3, 0.5]
                    .iter()
                    .map(|&mz| {
                        let c = with(&|c| {
                            c.qubit.mu_x = 0.3;
                            c.qubit.mu_z = mz;
                        }, w);
                        (format!("mu_z = {mz}"), c)
                    })
                    .collect(),
            )
        }
        4 => {
            let w = PhaseWindow::MinusPiToPi;
            (
                "Temperature dependence, mu_x = 0.3, mu_z = 0",
                w,
                [0.0, 0.5, 1.0]
                    .iter()
                    .map(|&t| {
                        let c = with(&|c| {
                            c.qubit.mu_x = 0.3;
                            c.qubit.mu_z = 0.0;
                            c.bath.temperature = t;
                        }, w);
                        (format!("T = {t}"), c)
                    })
                    .collect(),
            )
        }
        _ => {
            return Err(ConfigError::Invalid {
                key: "figure".into(),
                reason: format!("expected 1, 2, 3 or 4, got {id}"),
            })
        }
    };
    for (_, c) in &members {
        c.validate()?;
    }
    Ok(FigureSpec {
        id,
        title,
        window,
        members,
    })
}

pub fn run_figure(spec: &FigureSpec, exec: Execution) -> Result<Vec<(String, SweepResult)>, Error> {
    spec.members
        .iter()
        .map(|(label, cfg)| Ok((label.clone(), run_sweep(cfg, exec)?)))
        .collect()
}

pub fn curves(results: &[(String, SweepResult)]) -> Vec<Curve> {
    results
        .iter()
        .map(|(label, r)| Curve {
            label: label.clone(),
            points: r.curve(),
        })
        .collect()
}
