//! Two-qubit density matrices and their spacetime tensors.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit 1 the left tensor
//! factor, and `σ₀ = 1, σ₁ = σx, σ₂ = σy, σ₃ = σz`.
//!
//! The coefficient matrix `C[μ][ν] = Tr(ρ σμ⊗σν)` is stored as the
//! [`IndexPosition::BothLower`] form, and `ρ = ¼ Σ C[μ][ν] σμ⊗σν`. A product
//! state `(u·σ)⊗(v·σ)` has `C = 4 u vᵀ`, so local Lorentz transformations act
//! as `C ↦ L C Rᵀ`. The [`IndexPosition::Mixed`] form is `M = C g`: it maps
//! second-qubit vectors to first-qubit vectors and transforms as
//! `M ↦ L M R⁻¹`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi;
use crate::spacetime::{metric, FourVector, LorentzTransform};
use crate::C64;

/// `σ₀..σ₃`.
pub fn pauli(mu: usize) -> Matrix2<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match mu {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => panic!("pauli index {mu} out of range"),
    }
}

/// `σμ ⊗ σν`.
pub fn pauli_product(mu: usize, nu: usize) -> Matrix4<C64> {
    let k = pauli(mu).kronecker(&pauli(nu));
    Matrix4::from_fn(|r, c| k[(r, c)])
}

fn max_abs(m: &Matrix4<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest `|H − H†|` entry.
pub fn hermitian_defect(h: &Matrix4<C64>) -> f64 {
    max_abs(&(h - h.adjoint()))
}

pub(crate) fn check_hermitian(h: &Matrix4<C64>, tol: f64) -> Result<()> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let defect = hermitian_defect(h);
    if defect > tol * max_abs(h).max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn hermitian_eigenvalues(h: &Matrix4<C64>) -> Result<[f64; 4]> {
    check_hermitian(h, 1e-10)?;
    Ok(jacobi::hermitian_eigenvalues(h))
}

/// Non-negative Hermitian 4×4 matrix with positive trace. Normalization is
/// not required.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Matrix4<C64>,
    floored: Option<f64>,
}

impl DensityMatrix {
    /// Validates `m`. A smallest eigenvalue in `(−psd_tol·trace, 0)` is
    /// floored to zero and reported by [`DensityMatrix::floored`].
    pub fn new(m: Matrix4<C64>, psd_tol: f64) -> Result<Self> {
        check_hermitian(&m, 1e-10)?;
        let m = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let trace = m.trace().re;
        if trace <= 0.0 {
            return Err(Error::NonPositiveTrace(trace));
        }
        let ev = jacobi::hermitian_eigenvalues(&m);
        if ev[0] >= 0.0 {
            return Ok(Self { m, floored: None });
        }
        if ev[0] < -psd_tol * trace {
            return Err(Error::NotPositive { min_eigenvalue: ev[0], trace });
        }
        Ok(Self {
            m: jacobi::floor_negative_eigenvalues(&m),
            floored: Some(-ev[0]),
        })
    }

    pub fn from_real_diagonal(d: [f64; 4]) -> Result<Self> {
        Self::new(Matrix4::from_diagonal(&Vector4::from(d)).map(|x| C64::new(x, 0.0)), 0.0)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<C64>) -> Self {
        Self { m, floored: None }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Magnitude of the negative eigenvalue removed at construction.
    pub fn floored(&self) -> Option<f64> {
        self.floored
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            m: self.m * C64::new(c, 0.0),
            floored: self.floored,
        }
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        jacobi::hermitian_eigenvalues(&self.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexPosition {
    BothLower,
    Mixed,
}

/// Real 4×4 spacetime tensor of a two-qubit operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinkowskiMap {
    m: Matrix4<f64>,
    position: IndexPosition,
}

impl MinkowskiMap {
    pub fn new(m: Matrix4<f64>, position: IndexPosition) -> Self {
        Self { m, position }
    }

    pub fn both_lower(m: Matrix4<f64>) -> Self {
        Self::new(m, IndexPosition::BothLower)
    }

    pub fn mixed(m: Matrix4<f64>) -> Self {
        Self::new(m, IndexPosition::Mixed)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn position(&self) -> IndexPosition {
        self.position
    }

    /// Mixed form `M = C g`.
    pub fn to_mixed(&self) -> Self {
        match self.position {
            IndexPosition::Mixed => *self,
            IndexPosition::BothLower => Self::mixed(self.m * metric()),
        }
    }

    /// Coefficient form `C = M g`.
    pub fn to_both_lower(&self) -> Self {
        match self.position {
            IndexPosition::BothLower => *self,
            IndexPosition::Mixed => Self::both_lower(self.m * metric()),
        }
    }

    /// Lorentz adjoint `M♯ = g Mᵀ g` of the mixed form.
    pub fn adjoint(&self) -> Self {
        let g = metric();
        Self::mixed(g * self.to_mixed().m.transpose() * g)
    }

    /// `M v` for a second-qubit vector `v`.
    pub fn act(&self, v: &FourVector) -> FourVector {
        FourVector::from_vector(&(self.to_mixed().m * v.to_vector()))
    }

    /// `M♯ w` for a first-qubit vector `w`.
    pub fn act_transpose(&self, w: &FourVector) -> FourVector {
        self.adjoint().act(w)
    }

    /// `Σ C[μ][ν] n^μ m^ν`, i.e. `Tr ρ (n·σ ⊗ m·σ)`.
    pub fn pair(&self, n: &FourVector, m: &FourVector) -> f64 {
        (n.to_vector().transpose() * self.to_both_lower().m * m.to_vector())[(0, 0)]
    }

    pub fn frobenius(&self) -> f64 {
        self.m.norm()
    }

    pub fn determinant_mixed(&self) -> f64 {
        self.to_mixed().m.determinant()
    }
}

/// `u^μ = ½ Tr(τ σμ)` for a single-qubit Hermitian operator.
pub fn single_qubit_to_vector(tau: &Matrix2<C64>) -> Result<FourVector> {
    let defect = (tau - tau.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = tau.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    if defect > 1e-10 * scale {
        return Err(Error::NotHermitian(defect));
    }
    Ok(FourVector(std::array::from_fn(|mu| 0.5 * (tau * pauli(mu)).trace().re)))
}

/// `τ = u^μ σμ`.
pub fn vector_to_single_qubit(u: &FourVector) -> Matrix2<C64> {
    (0..4).fold(Matrix2::zeros(), |acc, mu| acc + pauli(mu) * C64::new(u[mu], 0.0))
}

/// Coefficients `Tr(H σμ⊗σν)` of any 4×4 complex matrix (real parts).
pub fn coefficients(h: &Matrix4<C64>) -> Matrix4<f64> {
    Matrix4::from_fn(|mu, nu| (h * pauli_product(mu, nu)).trace().re)
}

pub fn rho_to_a(rho: &DensityMatrix) -> MinkowskiMap {
    MinkowskiMap::both_lower(coefficients(rho.matrix()))
}

/// `ρ = ¼ Σ C[μ][ν] σμ⊗σν`. The result is Hermitian but not necessarily
/// non-negative.
pub fn a_to_rho(a: &MinkowskiMap) -> Matrix4<C64> {
    let c = a.to_both_lower();
    let mut rho = Matrix4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let w = c.matrix()[(mu, nu)];
            if w != 0.0 {
                rho += pauli_product(mu, nu) * C64::new(0.25 * w, 0.0);
            }
        }
    }
    rho
}

/// State whose mixed tensor is `diag(μ₀, μ₁, μ₂, μ₃)`:
///
/// ```text
/// ¼ ⎡ μ₀−μ₃    0       0     μ₂−μ₁ ⎤
///   ⎢   0    μ₀+μ₃  −μ₁−μ₂     0   ⎥
///   ⎢   0   −μ₁−μ₂   μ₀+μ₃     0   ⎥
///   ⎣ μ₂−μ₁    0       0     μ₀−μ₃ ⎦
/// ```
pub fn canonical_state(mu: [f64; 4]) -> Matrix4<C64> {
    a_to_rho(&MinkowskiMap::mixed(Matrix4::from_diagonal(&Vector4::from(mu))))
}

fn check_proper(l: &LorentzTransform) -> Result<()> {
    LorentzTransform::new(*l.matrix(), 1e-9).map(|_| ())
}

/// Partial Lorentz transformation of the first qubit: `M ↦ L M`.
pub fn apply_plt_left(a: &MinkowskiMap, l: &LorentzTransform) -> Result<MinkowskiMap> {
    check_proper(l)?;
    let m = l.matrix() * a.to_mixed().matrix();
    Ok(restore(MinkowskiMap::mixed(m), a.position()))
}

/// Partial Lorentz transformation of the second qubit: `M ↦ M R⁻¹`.
pub fn apply_plt_right(a: &MinkowskiMap, r: &LorentzTransform) -> Result<MinkowskiMap> {
    check_proper(r)?;
    let m = a.to_mixed().matrix() * r.inverse().matrix();
    Ok(restore(MinkowskiMap::mixed(m), a.position()))
}

fn restore(m: MinkowskiMap, position: IndexPosition) -> MinkowskiMap {
    match position {
        IndexPosition::Mixed => m,
        IndexPosition::BothLower => m.to_both_lower(),
    }
}
