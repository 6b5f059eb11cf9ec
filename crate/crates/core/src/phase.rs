//! Purification-based geometric phase of a non-unitary qubit evolution.
//!
//! For `rho(t) = sum_i p_i(t) |w_i(t)><w_i(t)|` the phase is
//!
//! ```text
//! Phi(t) = arg sum_i sqrt(p_i(0) p_i(t)) <w_i(0)|w_i(t)> exp(-int_0^t <w_i|dw_i/ds> ds)
//! ```
//!
//! evaluated on a sampled trajectory with the parallel-transport integral
//! replaced by a product of normalized step overlaps. Every factor is
//! invariant under `w_i(t_k) -> e^{i chi_k} w_i(t_k)`, so no smooth gauge
//! has to be constructed.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::PhaseError;
use crate::evolution::Trajectory;
use crate::linalg::{eig_hermitian2, overlap, Ket};

/// Branches whose initial weight falls below this are dropped.
pub const BRANCH_WEIGHT_FLOOR: f64 = 1e-12;
const AMBIGUITY_TOL: f64 = 1e-12;
const VISIBILITY_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralTrajectory {
    pub times: Vec<f64>,
    pub p: Vec<[f64; 2]>,
    pub w: Vec<[Ket; 2]>,
    pub degenerate: Vec<bool>,
}

impl SpectralTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Copy with `w_i(t_k)` multiplied by `exp(i chi(i, t_k))`.
    pub fn regauged(&self, chi: impl Fn(usize, f64) -> f64) -> Self {
        let mut out = self.clone();
        for (w, &t) in out.w.iter_mut().zip(&self.times) {
            for (i, ket) in w.iter_mut().enumerate() {
                *ket = ket.scale(C64::from_polar(1.0, chi(i, t)));
            }
        }
        out
    }
}

/// Which eigenvector branches enter the phase sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchRule {
    /// Drop branches with `p_i(0) < 1e-12`.
    DropVanishing,
    KeepAll,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseResult {
    /// Principal value in `[0, 2 pi)`.
    pub phi: f64,
    /// Per-branch terms of the sum; zero for dropped branches.
    pub branch_factors: [C64; 2],
    pub retained: [bool; 2],
    /// Modulus of the sum (interferometric visibility).
    pub magnitude: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseWindow {
    /// `[0, 2 pi)`.
    ZeroToTwoPi,
    /// `(-pi, pi]`.
    MinusPiToPi,
}

impl std::str::FromStr for PhaseWindow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero2pi" | "zero_to_two_pi" => Ok(Self::ZeroToTwoPi),
            "pmpi" | "minus_pi_to_pi" => Ok(Self::MinusPiToPi),
            other => Err(format!("unknown phase window `{other}` (expected zero2pi or pmpi)")),
        }
    }
}

pub fn phase_representative(phi_raw: f64, window: PhaseWindow) -> f64 {
    let mut r = phi_raw.rem_euclid(TAU);
    if r >= TAU {
        r = 0.0;
    }
    match window {
        PhaseWindow::ZeroToTwoPi => r,
        PhaseWindow::MinusPiToPi if r > PI => r - TAU,
        PhaseWindow::MinusPiToPi => r,
    }
}

/// Phase of the isolated qubit after one period, `pi (1 + cos theta) mod 2 pi`.
pub fn free_phase(theta: f64) -> f64 {
    phase_representative(PI * (1.0 + theta.cos()), PhaseWindow::ZeroToTwoPi)
}

/// Shortest signed distance between two angles.
pub fn circular_difference(a: f64, b: f64) -> f64 {
    phase_representative(a - b, PhaseWindow::MinusPiToPi)
}

/// Per-time eigen-decomposition with branches matched by maximal overlap.
pub fn spectral_track(traj: &Trajectory) -> Result<SpectralTrajectory, PhaseError> {
    if traj.len() < 2 {
        return Err(PhaseError::TooShort(traj.len()));
    }
    let n = traj.len();
    let mut p = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);

    let first = eig_hermitian2(&traj.states[0]);
    p.push(first.p);
    w.push(first.w);
    degenerate.push(first.degenerate);
    // last basis seen at a non-degenerate point, used to match through degeneracies
    let mut anchor = first.w;

    for (step, rho) in traj.states.iter().enumerate().skip(1) {
        let s = eig_hermitian2(rho);
        if s.degenerate {
            p.push(s.p);
            w.push(anchor);
            degenerate.push(true);
            continue;
        }
        let same = overlap(&anchor[0], &s.w[0]).norm();
        let cross = overlap(&anchor[0], &s.w[1]).norm();
        if (same - cross).abs() < AMBIGUITY_TOL {
            return Err(PhaseError::BranchAmbiguity { step });
        }
        let (pk, wk) = if same >= cross {
            (s.p, s.w)
        } else {
            ([s.p[1], s.p[0]], [s.w[1], s.w[0]])
        };
        p.push(pk);
        w.push(wk);
        degenerate.push(false);
        anchor = wk;
    }

    Ok(SpectralTrajectory {
        times: traj.times.clone(),
        p,
        w,
        degenerate,
    })
}

pub fn geometric_phase(st: &SpectralTrajectory) -> Result<PhaseResult, PhaseError> {
    geometric_phase_with(st, BranchRule::DropVanishing)
}

pub fn geometric_phase_with(
    st: &SpectralTrajectory,
    rule: BranchRule,
) -> Result<PhaseResult, PhaseError> {
    let n = st.len();
    if n < 2 {
        return Err(PhaseError::TooShort(n));
    }
    let last = n - 1;
    let mut branch_factors = [C64::new(0.0, 0.0); 2];
    let mut retained = [false; 2];

    for i in 0..2 {
        if rule == BranchRule::DropVanishing && st.p[0][i] < BRANCH_WEIGHT_FLOOR {
            continue;
        }
        if let Some(step) = st.degenerate.iter().position(|&d| d) {
            return Err(PhaseError::DegeneratePhase { branch: i, step });
        }
        retained[i] = true;
        let weight = (st.p[0][i].max(0.0) * st.p[last][i].max(0.0)).sqrt();
        let mut transport = C64::new(1.0, 0.0);
        for k in 0..last {
            let o = overlap(&st.w[k][i], &st.w[k + 1][i]);
            transport *= o.conj() / o.norm();
        }
        branch_factors[i] = overlap(&st.w[0][i], &st.w[last][i]) * transport * weight;
    }

    let total = branch_factors[0] + branch_factors[1];
    let magnitude = total.norm();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(magnitude >= VISIBILITY_FLOOR) {
        return Err(PhaseError::VanishingVisibility { magnitude });
    }
    Ok(PhaseResult {
        phi: phase_representative(total.arg(), PhaseWindow::ZeroToTwoPi),
        branch_factors,
        retained,
        magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathParams;
    use crate::davies::{DaviesGenerator, GeneratorConfig, QubitParams};
    use crate::evolution::{evolve, initial_state, IntegratorConfig};
    use crate::linalg::{density_to_bloch, DensityMatrix, Matrix2};
    use proptest::prelude::*;

    fn generator(mu_x: f64, mu_z: f64, t: f64) -> DaviesGenerator {
        DaviesGenerator::new(
            &QubitParams::new(mu_x, mu_z).unwrap(),
            &BathParams::new(1e-2, 1e2, t).unwrap(),
            &GeneratorConfig::default(),
        )
        .unwrap()
    }

    fn track(g: &DaviesGenerator, theta: f64, cfg: &IntegratorConfig) -> SpectralTrajectory {
        let traj = evolve(&initial_state(theta).unwrap(), g, cfg).unwrap();
        spectral_track(&traj).unwrap()
    }

    fn phase(g: &DaviesGenerator, theta: f64) -> PhaseResult {
        geometric_phase(&track(g, theta, &IntegratorConfig::default())).unwrap()
    }

    #[test]
    fn representative_windows() {
        assert!((phase_representative(1.5 * PI, PhaseWindow::MinusPiToPi) + 0.5 * PI).abs() < 1e-15);
        assert!((phase_representative(-0.1, PhaseWindow::ZeroToTwoPi) - (TAU - 0.1)).abs() < 1e-15);
        assert_eq!(phase_representative(PI, PhaseWindow::ZeroToTwoPi), PI);
        assert_eq!(phase_representative(PI, PhaseWindow::MinusPiToPi), PI);
        assert_eq!(phase_representative(-1e-18, PhaseWindow::ZeroToTwoPi), 0.0);
        assert_eq!("pmpi".parse::<PhaseWindow>().unwrap(), PhaseWindow::MinusPiToPi);
        assert!("degrees".parse::<PhaseWindow>().is_err());
    }

    #[test]
    fn free_phase_examples() {
        assert!((free_phase(PI / 2.0) - PI).abs() < 1e-15);
        assert!(free_phase(PI).abs() < 1e-15);
        assert_eq!(free_phase(0.0), 0.0);
    }

    #[test]
    fn free_qubit_period_phase() {
        let g = DaviesGenerator::free(1.0);
        assert!((phase(&g, PI / 2.0).phi - PI).abs() < 1e-9);
        let phi = phase(&g, PI / 3.0).phi;
        assert!((phi - 1.5 * PI).abs() < 1e-6, "phi {phi}");
    }

    #[test]
    fn unitary_limit_over_theta_grid() {
        let g = DaviesGenerator::free(1.0);
        for j in 0..50 {
            let theta = (j as f64 + 0.5) * PI / 50.0;
            let phi = phase(&g, theta).phi;
            let d = circular_difference(phi, free_phase(theta)).abs();
            assert!(d < 1e-6, "theta {theta}: deviation {d:e}");
        }
    }

    #[test]
    fn excited_state_under_dephasing_has_zero_phase() {
        let r = phase(&generator(0.0, 0.5, 0.5), 0.0);
        assert!(circular_difference(r.phi, 0.0).abs() < 1e-12);
        assert_eq!(r.retained, [true, false]);
    }

    #[test]
    fn stationary_trajectory_is_constant() {
        let g = generator(0.3, 0.0, 1.0);
        let s = g.stationary_state().unwrap();
        let traj = evolve(&s, &g, &IntegratorConfig::default()).unwrap();
        let st = spectral_track(&traj).unwrap();
        for k in 1..st.len() {
            for i in 0..2 {
                assert!((st.p[k][i] - st.p[0][i]).abs() < 1e-10);
                assert!((overlap(&st.w[0][i], &st.w[k][i]).norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn free_equator_orbit() {
        let st = track(&DaviesGenerator::free(1.0), PI / 2.0, &IntegratorConfig::default());
        for k in 0..st.len() {
            assert!((st.p[k][0] - 1.0).abs() < 1e-12);
            let w = st.w[k][0];
            assert!((w.0[0].norm() - w.0[1].norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn eigenvalue_tracks_follow_bloch_norm() {
        let g = generator(0.3, 0.0, 0.0);
        let traj = evolve(&initial_state(PI / 2.0).unwrap(), &g, &IntegratorConfig::default()).unwrap();
        let st = spectral_track(&traj).unwrap();
        for (rho, p) in traj.states.iter().zip(&st.p) {
            let r = density_to_bloch(rho).norm();
            assert!((p[0] - 0.5 * (1.0 + r)).abs() < 1e-10);
        }
        for k in 1..st.len() {
            for i in 0..2 {
                let same = overlap(&st.w[k - 1][i], &st.w[k][i]).norm();
                let cross = overlap(&st.w[k - 1][i], &st.w[k][1 - i]).norm();
                assert!(same >= cross && same >= 0.99);
            }
        }
    }

    #[test]
    fn short_trajectory_rejected() {
        let traj = Trajectory {
            times: vec![0.0],
            states: vec![DensityMatrix::maximally_mixed()],
            max_correction: 0.0,
            min_eigenvalue: 0.5,
        };
        assert_eq!(spectral_track(&traj).unwrap_err(), PhaseError::TooShort(1));
    }

    #[test]
    fn degeneracy_on_retained_branch_is_an_error() {
        let mixed = DensityMatrix::maximally_mixed();
        let pure = initial_state(0.4).unwrap();
        let traj = Trajectory {
            times: vec![0.0, 1.0, 2.0],
            states: vec![pure, mixed, pure],
            max_correction: 0.0,
            min_eigenvalue: 0.0,
        };
        let st = spectral_track(&traj).unwrap();
        assert_eq!(st.degenerate, vec![false, true, false]);
        assert!(matches!(
            geometric_phase(&st),
            Err(PhaseError::DegeneratePhase { branch: 0, step: 1 })
        ));
    }

    #[test]
    fn branch_ambiguity_detected() {
        // a 90 degree jump of the Bloch vector in one step
        let a = DensityMatrix::new(Matrix2::diag(0.9, 0.1)).unwrap();
        let half = C64::new(0.5, 0.0);
        let b = DensityMatrix::new(Matrix2::new(half, C64::new(0.4, 0.0), C64::new(0.4, 0.0), half)).unwrap();
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![a, b],
            max_correction: 0.0,
            min_eigenvalue: 0.0,
        };
        assert!(matches!(spectral_track(&traj), Err(PhaseError::BranchAmbiguity { step: 1 })));
    }

    #[test]
    fn vanishing_visibility_detected() {
        // pole to pole through the equator: antipodal endpoints give <w(0)|w(T)> = 0
        let up = DensityMatrix::new(Matrix2::diag(1.0, 0.0)).unwrap();
        let side = initial_state(PI / 2.0).unwrap();
        let down = DensityMatrix::new(Matrix2::diag(0.0, 1.0)).unwrap();
        let st = SpectralTrajectory {
            times: vec![0.0, 1.0, 2.0],
            p: vec![[1.0, 0.0]; 3],
            w: vec![eig_hermitian2(&up).w, eig_hermitian2(&side).w, eig_hermitian2(&down).w],
            degenerate: vec![false; 3],
        };
        assert!(matches!(geometric_phase(&st), Err(PhaseError::VanishingVisibility { .. })));
    }

    #[test]
    fn dropped_branch_does_not_change_phase() {
        let g = generator(0.3, 0.2, 0.0);
        for theta in [0.0, PI / 2.0, 1.0, 2.0] {
            let st = track(&g, theta, &IntegratorConfig::default());
            let dropped = geometric_phase_with(&st, BranchRule::DropVanishing).unwrap();
            let kept = geometric_phase_with(&st, BranchRule::KeepAll).unwrap();
            assert_eq!(dropped.retained, [true, false]);
            if st.p[0][1] <= 0.0 {
                assert_eq!(dropped.phi.to_bits(), kept.phi.to_bits(), "theta {theta}");
            } else {
                // rounding leaves p_2(0) ~ 1e-17; the branch then carries a
                // weight of order sqrt(1e-17)
                assert!(circular_difference(dropped.phi, kept.phi).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn mixed_initial_state_keeps_both_branches() {
        let g = generator(0.3, 0.2, 1.0);
        let rho0 = DensityMatrix::new(Matrix2::diag(0.8, 0.2)).unwrap();
        let traj = evolve(&rho0, &g, &IntegratorConfig::default()).unwrap();
        let r = geometric_phase(&spectral_track(&traj).unwrap()).unwrap();
        assert_eq!(r.retained, [true, true]);
        assert!(r.magnitude <= 1.0 + 1e-9);
    }

    #[test]
    fn sampling_convergence() {
        let g = generator(0.3, 0.0, 0.0);
        let coarse = phase(&g, PI / 2.0).phi;
        let fine = geometric_phase(&track(
            &g,
            PI / 2.0,
            &IntegratorConfig {
                steps_per_period: 4000,
                ..Default::default()
            },
        ))
        .unwrap()
        .phi;
        let d = circular_difference(coarse, fine).abs();
        assert!(d < 1e-7, "difference {d:e}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gauge_invariance(a0 in -5.0..5.0f64, a1 in -5.0..5.0f64, f0 in 0.0..3.0f64, f1 in 0.0..3.0f64, theta in 0.2..2.9f64) {
            let st = track(&generator(0.3, 0.5, 1.0), theta, &IntegratorConfig::default());
            let base = geometric_phase(&st).unwrap().phi;
            let moved = st.regauged(|i, t| if i == 0 { a0 * (f0 * t).sin() + t } else { a1 * (f1 * t).cos() });
            let phi = geometric_phase(&moved).unwrap().phi;
            prop_assert!(circular_difference(base, phi).abs() < 1e-10);
        }
    }
}
