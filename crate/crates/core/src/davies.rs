//! Davies weak-coupling generator for a qubit with
//! `H_Q = (eps/2) sigma_z` and coupling `H_I = mu_x sigma_x + mu_z sigma_z`.

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bath::{correlation_ft, hilbert_transform_s, BathParams, PVQuadratureConfig};
use crate::error::GeneratorError;
use crate::linalg::{DensityMatrix, Matrix2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitParams {
    pub epsilon: f64,
    pub mu_x: f64,
    pub mu_z: f64,
}

impl Default for QubitParams {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            mu_x: 0.0,
            mu_z: 0.0,
        }
    }
}

impl QubitParams {
    pub fn new(mu_x: f64, mu_z: f64) -> Result<Self, GeneratorError> {
        let q = Self {
            epsilon: 1.0,
            mu_x,
            mu_z,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(GeneratorError::InvalidParams(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        for (name, v) in [("mu_x", self.mu_x), ("mu_z", self.mu_z)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(GeneratorError::InvalidParams(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Free-evolution period `2 pi / eps`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.epsilon
    }

    pub fn hamiltonian(&self) -> Matrix2 {
        Matrix2::sigma_z().scale_re(0.5 * self.epsilon)
    }

    pub fn interaction(&self) -> Matrix2 {
        Matrix2::sigma_x().scale_re(self.mu_x) + Matrix2::sigma_z().scale_re(self.mu_z)
    }
}

/// `A_kl = P_k H_I P_l` with Bohr frequency `(lambda_k - lambda_l)` and its rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpOperator {
    pub matrix: Matrix2,
    pub bohr_frequency: f64,
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorConfig {
    pub lamb_shift: bool,
    pub quadrature: PVQuadratureConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            lamb_shift: true,
            quadrature: PVQuadratureConfig::default(),
        }
    }
}

/// The four `(k, l)` index pairs, each with its projected operator.
fn projected_couplings(q: &QubitParams) -> [(Matrix2, f64); 4] {
    let eps = q.epsilon;
    let interaction = q.interaction();
    let pe = Matrix2::proj_excited();
    let pg = Matrix2::proj_ground();
    // lambda_{+1} - lambda_{-1} = eps
    [
        (pe * interaction * pg, eps),
        (pg * interaction * pe, -eps),
        (pe * interaction * pe, 0.0),
        (pg * interaction * pg, 0.0),
    ]
}

/// Jump operators rated by `c` at the energy handed to the bath,
/// `lambda_l - lambda_k = -Omega_kl`: relaxation `|-1><1|` carries `c(+eps)`.
pub fn build_jump_operators(q: &QubitParams, b: &BathParams) -> Vec<JumpOperator> {
    projected_couplings(q)
        .into_iter()
        .map(|(matrix, bohr_frequency)| JumpOperator {
            matrix,
            bohr_frequency,
            rate: correlation_ft(b, -bohr_frequency),
        })
        .collect()
}

/// `H_LS = s(eps) mu_x^2 P_{-1} + s(-eps) mu_x^2 P_{+1} + s(0) mu_z^2 I`.
pub fn build_lamb_shift(
    q: &QubitParams,
    b: &BathParams,
    cfg: &PVQuadratureConfig,
) -> Result<Matrix2, GeneratorError> {
    let mut h = Matrix2::zero();
    for (a, omega) in projected_couplings(q) {
        let weight = a.adjoint() * a;
        if weight.max_abs() == 0.0 {
            continue;
        }
        h += weight.scale_re(hilbert_transform_s(b, omega, cfg)?);
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DaviesGenerator {
    pub epsilon: f64,
    pub effective_hamiltonian: Matrix2,
    pub jumps: Vec<JumpOperator>,
}

impl DaviesGenerator {
    pub fn new(
        q: &QubitParams,
        b: &BathParams,
        cfg: &GeneratorConfig,
    ) -> Result<Self, GeneratorError> {
        q.validate()?;
        b.validate()?;
        let mut h = q.hamiltonian();
        if cfg.lamb_shift {
            h += build_lamb_shift(q, b, &cfg.quadrature)?;
        }
        Ok(Self {
            epsilon: q.epsilon,
            effective_hamiltonian: h,
            jumps: build_jump_operators(q, b),
        })
    }

    /// Uncoupled qubit, `mu_x = mu_z = 0`.
    pub fn free(epsilon: f64) -> Self {
        let q = QubitParams {
            epsilon,
            ..Default::default()
        };
        Self {
            epsilon,
            effective_hamiltonian: q.hamiltonian(),
            jumps: build_jump_operators(&q, &BathParams::default()),
        }
    }

    /// Assemble from arbitrary parts; used to probe mutated generators.
    pub fn from_parts(epsilon: f64, effective_hamiltonian: Matrix2, jumps: Vec<JumpOperator>) -> Self {
        Self {
            epsilon,
            effective_hamiltonian,
            jumps,
        }
    }

    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.epsilon
    }

    /// `-i[H, rho] + sum c (A rho A^dag - {A^dag A, rho}/2)` on any 2x2 matrix.
    pub fn apply_matrix(&self, rho: &Matrix2) -> Matrix2 {
        let mut out = self.effective_hamiltonian.commutator(rho).scale(C64::new(0.0, -1.0));
        for jump in &self.jumps {
            if jump.rate == 0.0 {
                continue;
            }
            let a = jump.matrix;
            let ad = a.adjoint();
            let d = a * *rho * ad - (ad * a).anticommutator(rho).scale_re(0.5);
            out += d.scale_re(jump.rate);
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Matrix2 {
        self.apply_matrix(rho.matrix())
    }

    pub fn to_superoperator(&self) -> Superoperator4 {
        let id = to_na(&Matrix2::identity());
        let h = to_na(&self.effective_hamiltonian);
        let minus_i = C64::new(0.0, -1.0);
        let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * minus_i;
        for jump in &self.jumps {
            if jump.rate == 0.0 {
                continue;
            }
            let a = to_na(&jump.matrix);
            let ada = a.adjoint() * a;
            let d = a.conjugate().kronecker(&a)
                - (id.kronecker(&ada) + ada.transpose().kronecker(&id)) * C64::new(0.5, 0.0);
            l += d * C64::new(jump.rate, 0.0);
        }
        Superoperator4(l.fixed_view::<4, 4>(0, 0).into_owned())
    }

    /// Unique unit-trace fixed point of the generator.
    pub fn stationary_state(&self) -> Result<DensityMatrix, GeneratorError> {
        let l = self.to_superoperator().0;
        let svd = l.svd(false, true);
        let scale = svd.singular_values.max().max(1.0);
        let null: Vec<usize> = (0..4)
            .filter(|&i| svd.singular_values[i] < 1e-10 * scale)
            .collect();
        if null.len() != 1 {
            return Err(GeneratorError::NonUniqueStationaryState {
                dimension: null.len(),
            });
        }
        let v_t = svd.v_t.expect("requested right singular vectors");
        let row = v_t.row(null[0]);
        let v: [C64; 4] = std::array::from_fn(|k| row[k].conj());
        let m = unvec(&v);
        let m = m.scale(C64::new(1.0, 0.0) / m.trace());
        Ok(DensityMatrix::new(m.hermitian_part())?)
    }
}

/// Matrix of the generator acting on column-stacked `vec(rho)`
/// `= (rho_00, rho_10, rho_01, rho_11)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superoperator4(pub Matrix4<C64>);

impl Superoperator4 {
    pub fn apply(&self, rho: &Matrix2) -> Matrix2 {
        let v = self.0 * nalgebra::Vector4::from(vec(rho));
        unvec(&[v[0], v[1], v[2], v[3]])
    }

    /// `exp(t L)` by scaling and squaring with a Pade approximant.
    pub fn exp(&self, t: f64) -> Matrix4<C64> {
        (self.0 * C64::new(t, 0.0)).exp()
    }
}

pub fn vec(m: &Matrix2) -> [C64; 4] {
    [m.m[0][0], m.m[1][0], m.m[0][1], m.m[1][1]]
}

pub fn unvec(v: &[C64; 4]) -> Matrix2 {
    Matrix2::new(v[0], v[2], v[1], v[3])
}

fn to_na(m: &Matrix2) -> nalgebra::Matrix2<C64> {
    nalgebra::Matrix2::new(m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1])
}
