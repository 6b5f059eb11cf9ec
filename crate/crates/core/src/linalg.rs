//! Complex 2x2 algebra for a single qubit.
//!
//! Basis ordering throughout the crate is `[|1>, |-1>]`: index 0 is the
//! excited state (sigma_z = +1), index 1 the ground state.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::LinalgError;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
const BLOCH_NORM_TOL: f64 = 1e-10;
/// Bloch-vector norm below which the eigenbasis is treated as arbitrary.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;
const GAUGE_MAGNITUDE: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Row-major complex 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2 {
    pub m: [[C64; 2]; 2],
}

impl Matrix2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn sigma_x() -> Self {
        Self::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Self::new(ZERO, C64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Self::new(ONE, ZERO, ZERO, C64::new(-1.0, 0.0))
    }

    /// Projector onto the excited state |1>.
    pub const fn proj_excited() -> Self {
        Self::new(ONE, ZERO, ZERO, ZERO)
    }

    /// Projector onto the ground state |-1>.
    pub const fn proj_ground() -> Self {
        Self::new(ZERO, ZERO, ZERO, ONE)
    }

    /// |1><-1|, raising operator.
    pub const fn raising() -> Self {
        Self::new(ZERO, ONE, ZERO, ZERO)
    }

    /// |-1><1|, lowering operator.
    pub const fn lowering() -> Self {
        Self::new(ZERO, ZERO, ONE, ZERO)
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Self::new(C64::new(a, 0.0), ZERO, ZERO, C64::new(d, 0.0))
    }

    /// Outer product |u><v|.
    pub fn outer(u: &Ket, v: &Ket) -> Self {
        let mut m = Self::zero();
        for r in 0..2 {
            for c in 0..2 {
                m.m[r][c] = u.0[r] * v.0[c].conj();
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.m;
        Self::new(s * m[0][0], s * m[0][1], s * m[1][0], s * m[1][1])
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let m = &self.m;
        Ket([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Real Bloch components `Tr(M sigma_k)` of a Hermitian matrix.
    pub fn pauli_components(&self) -> [f64; 3] {
        let m = &self.m;
        [
            (m[0][1] + m[1][0]).re,
            (I * (m[0][1] - m[1][0])).re,
            (m[0][0] - m[1][1]).re,
        ]
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        out += o;
        out
    }
}

impl AddAssign for Matrix2 {
    fn add_assign(&mut self, o: Self) {
        for r in 0..2 {
            for c in 0..2 {
                self.m[r][c] += o.m[r][c];
            }
        }
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Matrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self {
            m: std::array::from_fn(|r| std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c])),
        }
    }
}

/// Complex 2-vector in the `[|1>, |-1>]` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket(pub [C64; 2]);

impl Ket {
    pub const fn excited() -> Self {
        Ket([ONE, ZERO])
    }

    pub const fn ground() -> Self {
        Ket([ZERO, ONE])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Ket([s * self.0[0], s * self.0[1]])
    }

    pub fn normalized(&self) -> Self {
        self.scale(C64::new(1.0 / self.norm(), 0.0))
    }

    /// Multiply by a global phase so that the first component with
    /// modulus above 1e-12 is real and positive.
    pub fn with_canonical_gauge(&self) -> Self {
        match self.0.iter().find(|z| z.norm() > GAUGE_MAGNITUDE) {
            Some(z) => self.scale(z.conj() / z.norm()),
            None => *self,
        }
    }
}

/// `<u|v>`, conjugate-linear in `u`.
pub fn overlap(u: &Ket, v: &Ket) -> C64 {
    u.0[0].conj() * v.0[0] + u.0[1].conj() * v.0[1]
}

/// Bloch vector `(r_x, r_y, r_z)` with `|r| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, LinalgError> {
        let r = Self { x, y, z };
        let norm = r.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_NORM_TOL {
            return Err(LinalgError::UnphysicalBloch { norm });
        }
        Ok(r)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Validated qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Matrix2);

impl DensityMatrix {
    pub fn new(m: Matrix2) -> Result<Self, LinalgError> {
        if !m.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { defect });
        }
        let trace = m.trace();
        if (trace - ONE).norm() > TRACE_TOL {
            return Err(LinalgError::TraceNotUnit { trace: trace.re });
        }
        let min_eigenvalue = min_eigenvalue(&m);
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(LinalgError::NotPositive { min_eigenvalue });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix the caller has already checked.
    pub(crate) fn from_matrix_unchecked(m: Matrix2) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    pub fn pure(psi: &Ket) -> Result<Self, LinalgError> {
        Self::new(Matrix2::outer(&psi.normalized(), &psi.normalized()))
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix2::diag(0.5, 0.5))
    }

    /// Gibbs state for splitting `epsilon` at temperature `temperature`;
    /// the ground state when `temperature == 0`.
    pub fn gibbs(epsilon: f64, temperature: f64) -> Self {
        if temperature == 0.0 {
            return Self(Matrix2::proj_ground());
        }
        // populations e^{-beta eps/2}/Z, e^{beta eps/2}/Z written as a logistic
        let x = epsilon / temperature;
        let excited = 1.0 / (1.0 + x.exp());
        Self(Matrix2::diag(excited, 1.0 - excited))
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Half the trace norm of the difference; for qubits `|r - r'|/2`.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        0.5 * density_to_bloch(self).distance(&density_to_bloch(other))
    }
}

fn min_eigenvalue(m: &Matrix2) -> f64 {
    let [x, y, z] = m.hermitian_part().pauli_components();
    let tr = m.trace().re;
    0.5 * (tr - (x * x + y * y + z * z).sqrt())
}

pub fn bloch_to_density(r: &BlochVector) -> Result<DensityMatrix, LinalgError> {
    let r = BlochVector::new(r.x, r.y, r.z)?;
    let m = Matrix2::identity()
        + Matrix2::sigma_x().scale_re(r.x)
        + Matrix2::sigma_y().scale_re(r.y)
        + Matrix2::sigma_z().scale_re(r.z);
    DensityMatrix::new(m.scale_re(0.5))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> BlochVector {
    let [x, y, z] = rho.0.pauli_components();
    BlochVector { x, y, z }
}

/// Eigen-decomposition of a qubit state, eigenvalues sorted descending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectral2 {
    pub p: [f64; 2],
    pub w: [Ket; 2],
    /// Set when `|r| < DEGENERACY_THRESHOLD`; the eigenbasis is then arbitrary.
    pub degenerate: bool,
}

impl Spectral2 {
    pub fn reconstruct(&self) -> Matrix2 {
        Matrix2::outer(&self.w[0], &self.w[0]).scale_re(self.p[0])
            + Matrix2::outer(&self.w[1], &self.w[1]).scale_re(self.p[1])
    }
}

/// Closed-form eigen-decomposition through the Bloch vector.
pub fn eig_hermitian2(rho: &DensityMatrix) -> Spectral2 {
    let r = density_to_bloch(rho);
    let norm = r.norm();
    let p = [0.5 * (1.0 + norm), 0.5 * (1.0 - norm)];
    if norm < DEGENERACY_THRESHOLD {
        return Spectral2 {
            p,
            w: [Ket::excited(), Ket::ground()],
            degenerate: true,
        };
    }
    let (nx, ny, nz) = (r.x / norm, r.y / norm, r.z / norm);
    // Two algebraically equivalent +1 eigenvectors of n.sigma; take the
    // one that stays away from cancellation.
    let up = if nz >= 0.0 {
        Ket([C64::new(1.0 + nz, 0.0), C64::new(nx, ny)])
    } else {
        Ket([C64::new(nx, -ny), C64::new(1.0 - nz, 0.0)])
    };
    let up = up.normalized();
    let down = Ket([-up.0[1].conj(), up.0[0].conj()]);
    Spectral2 {
        p,
        w: [up.with_canonical_gauge(), down.with_canonical_gauge()],
        degenerate: false,
    }
}
