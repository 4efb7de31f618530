//! Ground truth for the verdict (the PPT criterion) and test-state recipes.
//!
//! For two qubits a state is separable iff its partial transpose is
//! positive semidefinite. That test shares no code with the Lorentzian
//! pipeline beyond the Hermitian eigensolver, so it serves as the oracle.

use std::path::PathBuf;

use nalgebra::{Matrix2, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classify::{verdict, Status};
use crate::error::{Error, Result};
use crate::jacobi;
use crate::qubit_map::DensityMatrix;
use crate::tolerance::Tolerances;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellVariant {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StateRecipe {
    Bell { variant: BellVariant },
    Werner { p: f64 },
    /// `ρ₁ ⊗ ρ₂` from Bloch vectors with `|u|, |v| ≤ 1`.
    Product { u: [f64; 3], v: [f64; 3] },
    RandomMixed { seed: u64, rank: usize },
    RandomPure { seed: u64 },
    FromFile { path: PathBuf },
}

/// splitmix64 finalizer: the seed of task `index` derived from `base`.
pub fn split_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn bell_vector(v: BellVariant) -> Vector4<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match v {
        BellVariant::PhiPlus => Vector4::new(c(s), c(0.0), c(0.0), c(s)),
        BellVariant::PhiMinus => Vector4::new(c(s), c(0.0), c(0.0), c(-s)),
        BellVariant::PsiPlus => Vector4::new(c(0.0), c(s), c(s), c(0.0)),
        BellVariant::PsiMinus => Vector4::new(c(0.0), c(s), c(-s), c(0.0)),
    }
}

pub fn bell_projector(v: BellVariant) -> Matrix4<C64> {
    let k = bell_vector(v);
    k * k.adjoint()
}

/// `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("werner p = {p} outside [0, 1]")));
    }
    let m = bell_projector(BellVariant::PhiPlus) * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0);
    DensityMatrix::new(m, 1e-12)
}

fn bloch_state(u: &[f64; 3]) -> Result<Matrix2<C64>> {
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if !(n <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("Bloch vector length {n} exceeds 1")));
    }
    Ok(Matrix2::new(
        c(0.5 * (1.0 + u[2])),
        C64::new(0.5 * u[0], -0.5 * u[1]),
        C64::new(0.5 * u[0], 0.5 * u[1]),
        c(0.5 * (1.0 - u[2])),
    ))
}

pub fn product(u: &[f64; 3], v: &[f64; 3]) -> Result<DensityMatrix> {
    let k = bloch_state(u)?.kronecker(&bloch_state(v)?);
    DensityMatrix::new(Matrix4::from_fn(|r, cc| k[(r, cc)]), 1e-12)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G† / Tr` with `G` a 4×rank complex Gaussian matrix.
pub fn random_mixed_with<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..=4")));
    }
    let mut g = Matrix4::<C64>::zeros();
    for col in 0..rank {
        for row in 0..4 {
            g[(row, col)] = gaussian(rng);
        }
    }
    let h = g * g.adjoint();
    let tr = h.trace().re;
    DensityMatrix::new(h / c(tr), 1e-12)
}

pub fn random_mixed(seed: u64, rank: usize) -> Result<DensityMatrix> {
    random_mixed_with(&mut ChaCha8Rng::seed_from_u64(seed), rank)
}

/// Uniformly random point of the Bloch ball surface scaled by `r`.
fn random_bloch<R: Rng + ?Sized>(rng: &mut R, pure: bool) -> [f64; 3] {
    let v = crate::spacetime::random_unit3(rng);
    let r = if pure { 1.0 } else { rng.random::<f64>().cbrt() };
    [v[0] * r, v[1] * r, v[2] * r]
}

/// Convex mixture of `terms` random product states with random weights;
/// separable by construction.
pub fn random_separable(seed: u64, terms: usize) -> Result<DensityMatrix> {
    if terms == 0 {
        return Err(Error::InvalidParameter("need at least one product term".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Matrix4::<C64>::zeros();
    let mut total = 0.0;
    for _ in 0..terms {
        let w: f64 = rng.random::<f64>() + 1e-3;
        let pure = rng.random::<bool>();
        let u = random_bloch(&mut rng, pure);
        let v = random_bloch(&mut rng, pure);
        acc += product(&u, &v)?.matrix() * c(w);
        total += w;
    }
    DensityMatrix::new(acc / c(total), 1e-12)
}

pub fn make_state(recipe: &StateRecipe) -> Result<DensityMatrix> {
    match recipe {
        StateRecipe::Bell { variant } => DensityMatrix::new(bell_projector(*variant), 1e-12),
        StateRecipe::Werner { p } => werner(*p),
        StateRecipe::Product { u, v } => product(u, v),
        StateRecipe::RandomMixed { seed, rank } => random_mixed(*seed, *rank),
        StateRecipe::RandomPure { seed } => random_mixed(*seed, 1),
        StateRecipe::FromFile { path } => crate::io::read_state(path),
    }
}

/// Transpose on the second qubit: `(i₁i₂, j₁j₂) ↦ (i₁j₂, j₁i₂)`.
pub fn partial_transpose_matrix(m: &Matrix4<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, cc| {
        let (i1, i2) = (r / 2, r % 2);
        let (j1, j2) = (cc / 2, cc % 2);
        m[(2 * i1 + j2, 2 * j1 + i2)]
    })
}

pub fn partial_transpose(rho: &DensityMatrix) -> Matrix4<C64> {
    partial_transpose_matrix(rho.matrix())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PptStatus {
    Separable,
    Entangled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptVerdict {
    pub status: PptStatus,
    pub min_eigenvalue: f64,
    pub trace: f64,
}

impl PptVerdict {
    /// `|λ_min| ≤ band·trace`: too close to call in floating point.
    pub fn near_boundary(&self, band: f64) -> bool {
        self.min_eigenvalue.abs() <= band * self.trace
    }
}

/// Entangled iff the partial transpose has an eigenvalue below `−tol·Tr ρ`.
pub fn ppt_verdict(rho: &DensityMatrix, tol: f64) -> PptVerdict {
    let ev = jacobi::hermitian_eigenvalues(&partial_transpose(rho));
    let trace = rho.trace();
    let status = if ev[0] < -tol * trace { PptStatus::Entangled } else { PptStatus::Separable };
    PptVerdict { status, min_eigenvalue: ev[0], trace }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerThreshold {
    pub plt: f64,
    pub ppt: f64,
}

fn bisect(tol: f64, entangled: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Werner separability threshold found by bisection, once over the
/// Lorentzian verdict and once over the PPT oracle.
pub fn werner_threshold(tol: f64) -> Result<WernerThreshold> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("bisection tolerance must be positive".into()));
    }
    let strict = Tolerances::strict();
    let plt = bisect(tol, |p| Ok(verdict(werner(p)?.matrix(), &strict)?.status == Status::Entangled))?;
    let ppt = bisect(tol, |p| Ok(ppt_verdict(&werner(p)?, 0.0).status == PptStatus::Entangled))?;
    Ok(WernerThreshold { plt, ppt })
}
