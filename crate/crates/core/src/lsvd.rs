//! Lorentzian singular value decomposition of the two-qubit tensor.
//!
//! For the mixed tensor `M` of a state we find proper orthochronous frames
//! `Λ₁` (first qubit) and `Λ₂` (second qubit) with `M = Λ₁ K Λ₂⁻¹`, where the
//! canonical block `K` is one of
//!
//! * Type-I: `diag(μ₀, μ₁, μ₂, μ₃)`;
//! * Type-II: `μ₀ 1ₜₓ + x X₊X₊♭ + diag(μ₂, μ₃)` in the null frame
//!   `X± = (e₀ ± e₁)/√2`, with `x > 0`;
//! * Type-II0a/b/c: rank one, `x t X₊♭`, `x X₊ t♭` or `x X₊X₊♭`.
//!
//! Type-I frames come from a one-sided hyperbolic Jacobi iteration on the
//! columns of `M`: spatial pairs are rotated and (time, space) pairs are
//! boosted until the columns of `W = M Λ₂` are Minkowski-orthogonal, at which
//! point `W = Λ₁ diag(μ)`. The right frame then diagonalizes `D = M♯M` and
//! the left frame diagonalizes `B = M M♯`. A boost that cannot annihilate its
//! pair signals a repeated lightlike eigenvector, and the Jordan branch takes
//! over.

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::symmetric_eigen;
use crate::qubit_map::MinkowskiMap;
use crate::quartic;
use crate::spacetime::{metric, FourVector, Tetrad};
use crate::tolerance::Tolerances;

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const MAX_SWEEPS: usize = 60;
/// Frames needing a larger boost factor than this are treated as Jordan.
const MAX_BOOST_GAMMA: f64 = 1e6;
/// Above this boost factor the Jordan branch is tried as well.
const JORDAN_PROBE_GAMMA: f64 = 1e2;
const STAGNATION_LEVEL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateType {
    TypeI,
    TypeII,
    TypeII0a,
    TypeII0b,
    TypeII0c,
}

impl StateType {
    pub fn is_rank_one(self) -> bool {
        matches!(self, StateType::TypeII0a | StateType::TypeII0b | StateType::TypeII0c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignClass {
    Positive,
    Negative,
    Boundary,
}

impl SignClass {
    pub fn flipped(self) -> Self {
        match self {
            SignClass::Positive => SignClass::Negative,
            SignClass::Negative => SignClass::Positive,
            SignClass::Boundary => SignClass::Boundary,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LsvdDiagnostics {
    pub sweeps: usize,
    /// `e₀⁰` of the right frame, i.e. the largest boost factor used.
    pub boost_gamma: f64,
    /// Roots of the characteristic polynomial of `D`, descending.
    pub quartic_lambda: [f64; 4],
    /// Largest relative mismatch between the characteristic polynomial of
    /// `D` and the one rebuilt from `μ²`.
    pub quartic_mismatch: f64,
    pub ill_conditioned: bool,
    /// μ as read off the converged frames, before sorting and sign moves.
    pub frame_mu: [f64; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsvdResult {
    pub state_type: StateType,
    /// `μ₀..μ₃`; all zero for the rank-one types.
    pub mu: [f64; 4],
    /// Jordan coupling for Type-II, overall weight for Type-II0.
    pub jordan_x: f64,
    /// Eigenvalues of `B` (and `D`).
    pub lambda: [f64; 4],
    /// First-qubit frame `Λ₁`.
    pub left_frame: Tetrad,
    /// Second-qubit frame `Λ₂`.
    pub right_frame: Tetrad,
    pub sign_class: SignClass,
    pub diagnostics: LsvdDiagnostics,
}

impl LsvdResult {
    /// `μ / μ₀`; `None` for the rank-one types.
    pub fn normalized_mu(&self) -> Option<[f64; 4]> {
        (self.mu[0] > 0.0).then(|| self.mu.map(|m| m / self.mu[0]))
    }

    /// Canonical mixed block `K` with `M = Λ₁ K Λ₂⁻¹`.
    pub fn canonical_mixed(&self) -> Matrix4<f64> {
        self.canonical_coefficients() * metric()
    }

    /// Canonical coefficient block with `C = Λ₁ K_C Λ₂ᵀ`.
    pub fn canonical_coefficients(&self) -> Matrix4<f64> {
        let [m0, m1, m2, m3] = self.mu;
        let xp = null_x_plus();
        let t = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let x = self.jordan_x;
        match self.state_type {
            StateType::TypeI => Matrix4::from_diagonal(&Vector4::new(m0, -m1, -m2, -m3)),
            StateType::TypeII => {
                Matrix4::from_diagonal(&Vector4::new(m0, -m0, -m2, -m3)) + xp * xp.transpose() * x
            }
            StateType::TypeII0a => t * xp.transpose() * x,
            StateType::TypeII0b => xp * t.transpose() * x,
            StateType::TypeII0c => xp * xp.transpose() * x,
        }
    }
}

fn null_x_plus() -> Vector4<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Vector4::new(s, s, 0.0, 0.0)
}

/// `B = M M♯`, acting on first-qubit vectors.
pub fn compute_b(a: &MinkowskiMap) -> MinkowskiMap {
    let m = a.to_mixed();
    MinkowskiMap::mixed(m.matrix() * a.adjoint().matrix())
}

/// `D = M♯ M`, acting on second-qubit vectors.
pub fn compute_d(a: &MinkowskiMap) -> MinkowskiMap {
    let m = a.to_mixed();
    MinkowskiMap::mixed(a.adjoint().matrix() * m.matrix())
}

/// Assembles `C = Λ₁ K_C Λ₂ᵀ` from a decomposition.
pub fn reconstruct_a(r: &LsvdResult) -> MinkowskiMap {
    let c = r.left_frame.matrix() * r.canonical_coefficients() * r.right_frame.matrix().transpose();
    MinkowskiMap::both_lower(c)
}

fn mdot(u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
    u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]
}

fn col(m: &Matrix4<f64>, j: usize) -> Vector4<f64> {
    m.column(j).into_owned()
}

/// Minkowski Gram–Schmidt in column order; column 0 timelike.
fn orthonormalize(m: &Matrix4<f64>) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    for a in 0..4 {
        let mut v = col(m, a);
        for b in 0..a {
            let e = col(&out, b);
            v -= e * (ETA[b] * mdot(&v, &e));
        }
        let n = mdot(&v, &v).abs().sqrt();
        out.set_column(a, &(v / n));
    }
    out
}

/// Fills the spatial legs marked `None` with unit vectors orthogonal to
/// every known leg. Leg 0 must be given.
fn complete_frame(legs: [Option<Vector4<f64>>; 4]) -> Result<Matrix4<f64>> {
    let mut known: Vec<(usize, Vector4<f64>)> = Vec::new();
    for (a, leg) in legs.iter().enumerate() {
        if let Some(v) = leg {
            known.push((a, *v));
        }
    }
    let mut filled = legs;
    for a in 1..4 {
        if filled[a].is_some() {
            continue;
        }
        let mut best: Option<(f64, Vector4<f64>)> = None;
        for c in 0..4 {
            let mut v = Vector4::zeros();
            v[c] = 1.0;
            for (b, e) in &known {
                v -= e * (ETA[*b] * mdot(&v, e));
            }
            let score = -mdot(&v, &v);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, v));
            }
        }
        let (score, v) = best.expect("candidates");
        if score <= 1e-6 {
            return Err(Error::FrameCompletion("no spacelike complement".into()));
        }
        let v = v / score.sqrt();
        known.push((a, v));
        filled[a] = Some(v);
    }
    let m = Matrix4::from_columns(&filled.map(|v| v.expect("filled")));
    Ok(orthonormalize(&m))
}

/// Outcome of the one-sided hyperbolic Jacobi iteration.
enum Sweep {
    /// Columns of `M Λ₂` are mutually Minkowski-orthogonal.
    Converged { right: Matrix4<f64>, sweeps: usize },
    /// A (time, space) pair could not be decoupled by a finite boost.
    Jordan,
}

fn column_gram(w: &Matrix4<f64>, i: usize, j: usize) -> f64 {
    ETA[0] * w[(0, i)] * w[(0, j)]
        + ETA[1] * w[(1, i)] * w[(1, j)]
        + ETA[2] * w[(2, i)] * w[(2, j)]
        + ETA[3] * w[(3, i)] * w[(3, j)]
}

/// Replaces columns `(i, j)` of `m` by `(a·cᵢ + b·cⱼ, c·cᵢ + d·cⱼ)`.
fn mix_columns(m: &mut Matrix4<f64>, i: usize, j: usize, a: f64, b: f64, c: f64, d: f64) {
    for r in 0..4 {
        let (x, y) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = a * x + b * y;
        m[(r, j)] = c * x + d * y;
    }
}

/// Rotation `(c, s)` that zeroes `g_ij` between two spacelike columns.
fn rotation_angle(gii: f64, gjj: f64, gij: f64) -> (f64, f64) {
    let zeta = (gjj - gii) / (2.0 * gij);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// Boost `(cosh η, sinh η)` that zeroes `g_0k`; `None` when no finite
/// rapidity works.
fn boost_angle(g00: f64, gkk: f64, g0k: f64) -> Option<(f64, f64)> {
    let denom = g00 + gkk;
    if denom <= 0.0 {
        return None;
    }
    let r = -2.0 * g0k / denom;
    if !(r.abs() < 1.0) {
        return None;
    }
    let tau = r / (1.0 + (1.0 - r * r).sqrt());
    let ch = 1.0 / (1.0 - tau * tau).sqrt();
    Some((ch, tau * ch))
}

/// `max |g_ij| / (|wᵢ| |wⱼ|)` over column pairs, Euclidean norms.
fn relative_off_diagonal(w: &Matrix4<f64>) -> f64 {
    let mut off = 0.0f64;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let n = w.column(i).norm() * w.column(j).norm();
            if n > 0.0 {
                off = off.max(column_gram(w, i, j).abs() / n);
            }
        }
    }
    off
}

fn one_sided_jacobi(m: &Matrix4<f64>, jordan_tol: f64) -> Sweep {
    let scale = m.norm_squared();
    let floor = 4.0 * f64::EPSILON * scale;
    let mut w = *m;
    let mut right = Matrix4::identity();
    let mut prev_off = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let gij = column_gram(&w, i, j);
                let gii = column_gram(&w, i, i);
                let gjj = column_gram(&w, j, j);
                if gij.abs() <= 1e-15 * (gii * gjj).abs().sqrt() || gij.abs() <= floor {
                    continue;
                }
                if i == 0 {
                    let Some((ch, sh)) = boost_angle(gii, gjj, gij) else {
                        // μ₀ = |μⱼ| leaves the pair already decoupled up to
                        // rounding; a Jordan coupling this small is Type-I.
                        if gij.abs() <= jordan_tol * (gii.abs() + gjj.abs()) {
                            continue;
                        }
                        return Sweep::Jordan;
                    };
                    mix_columns(&mut w, 0, j, ch, sh, sh, ch);
                    mix_columns(&mut right, 0, j, ch, sh, sh, ch);
                    if right[(0, 0)] > MAX_BOOST_GAMMA {
                        return Sweep::Jordan;
                    }
                } else {
                    let (c, s) = rotation_angle(gii, gjj, gij);
                    mix_columns(&mut w, i, j, c, -s, s, c);
                    mix_columns(&mut right, i, j, c, -s, s, c);
                }
                rotated = true;
            }
        }
        if !rotated {
            return Sweep::Converged { right, sweeps: sweep };
        }
        // Degenerate pairs can cycle at rounding level; stop once a sweep
        // no longer makes progress.
        let off = relative_off_diagonal(&w);
        if off <= STAGNATION_LEVEL && off >= 0.5 * prev_off {
            return Sweep::Converged { right, sweeps: sweep };
        }
        prev_off = off;
    }
    Sweep::Jordan
}

/// Left frame and `μ` from `W = M Λ₂ ≈ Λ₁ diag(μ)`.
fn type_i_from_right(m: &Matrix4<f64>, right: &Matrix4<f64>, tol: &Tolerances) -> Result<(Matrix4<f64>, Matrix4<f64>, [f64; 4])> {
    let mut right = orthonormalize(right);
    if right.determinant() < 0.0 {
        right.set_column(3, &(-col(&right, 3)));
    }
    let w = m * right;
    let w0 = col(&w, 0);
    let g00 = mdot(&w0, &w0);
    if g00 <= 0.0 || w0[0] <= 0.0 {
        return Err(Error::DecViolation("image of the time leg is not future timelike".into()));
    }
    let mu0 = g00.sqrt();
    let mut legs: [Option<Vector4<f64>>; 4] = [Some(w0 / mu0), None, None, None];
    for k in 1..4 {
        let wk = col(&w, k);
        let gkk = mdot(&wk, &wk);
        if gkk > tol.rank.sqrt() * g00 {
            return Err(Error::DecViolation(format!("leg {k} maps to a timelike vector")));
        }
        let mk = (-gkk).max(0.0).sqrt();
        if mk > tol.rank * mu0 {
            legs[k] = Some(wk / mk);
        }
    }
    let mut left = complete_frame(legs)?;
    if left.determinant() < 0.0 {
        left.set_column(3, &(-col(&left, 3)));
    }
    let mu = project_diagonal(&left, &w);
    Ok((left, right, mu))
}

/// `μ_a = η_a (E_a · w_a)`: least-squares diagonal of `Λ₁⁻¹ W`.
fn project_diagonal(left: &Matrix4<f64>, w: &Matrix4<f64>) -> [f64; 4] {
    std::array::from_fn(|a| ETA[a] * mdot(&col(left, a), &col(w, a)))
}

fn adjoint_of(m: &Matrix4<f64>) -> Matrix4<f64> {
    let g = metric();
    g * m.transpose() * g
}

/// Double root of the characteristic polynomial of `D`, the remaining
/// roots, and the null eigenvector with `l⁰ = 1/√2`.
struct NullEigen {
    lambda0: f64,
    others: Vec<f64>,
    l: Vector4<f64>,
    /// `Π (D − r)` over the distinct other roots; its range is the
    /// generalized eigenspace of `λ₀`.
    q: Matrix4<f64>,
}

fn dominant_null_vector(d: &Matrix4<f64>, tol: &Tolerances) -> Result<NullEigen> {
    let [c0, c1, c2, c3] = quartic::characteristic_polynomial(d);
    let roots = quartic::real_roots_descending(&[c0, c1, c2, c3]);
    // p' has a root at the double eigenvalue; Newton there is quadratic.
    let mut lambda0 = 0.5 * (roots[0] + roots[1]);
    for _ in 0..50 {
        let dp = ((4.0 * lambda0 + 3.0 * c3) * lambda0 + 2.0 * c2) * lambda0 + c1;
        let ddp = (12.0 * lambda0 + 6.0 * c3) * lambda0 + 2.0 * c2;
        if ddp == 0.0 {
            break;
        }
        let step = dp / ddp;
        lambda0 -= step;
        if step.abs() <= 1e-16 * lambda0.abs() {
            break;
        }
    }
    if !(lambda0 > 0.0) {
        return Err(Error::DecViolation(format!("repeated eigenvalue {lambda0:e} is not positive")));
    }
    let s = -c3 - 2.0 * lambda0;
    let p = c2 - lambda0 * lambda0 - 2.0 * lambda0 * s;
    let disc = (s * s - 4.0 * p).max(0.0).sqrt();
    let sep = 1e-6 * lambda0;
    // A double root is only known to √ε; its mean is exact.
    let (r2, r3) = if disc <= sep { (0.5 * s, 0.5 * s) } else { (0.5 * (s + disc), 0.5 * (s - disc)) };
    let mut others = Vec::new();
    for r in [r2, r3] {
        if (r - lambda0).abs() > sep && others.iter().all(|o: &f64| (o - r).abs() > sep) {
            others.push(r);
        }
    }
    let mut q = Matrix4::identity();
    for r in &others {
        q *= d - Matrix4::identity() * *r;
    }
    let pm = (d - Matrix4::identity() * lambda0) * q;
    let best = (0..4)
        .max_by(|&i, &j| pm.column(i).norm().total_cmp(&pm.column(j).norm()))
        .expect("four columns");
    let mut l = col(&pm, best);
    if !(l.norm() > 0.0) {
        return Err(Error::FrameCompletion("no null eigenvector".into()));
    }
    if l[0] < 0.0 {
        l = -l;
    }
    if mdot(&l, &l).abs() > tol.lightlike.sqrt() * l.norm_squared() || l[0] <= 0.0 {
        return Err(Error::FrameCompletion("repeated eigenvector is not lightlike".into()));
    }
    l *= std::f64::consts::FRAC_1_SQRT_2 / l[0];
    Ok(NullEigen { lambda0, others, l, q })
}

/// Pieces of a Jordan decomposition, before typing.
struct JordanParts {
    left: Matrix4<f64>,
    right: Matrix4<f64>,
    mu0: f64,
    x: f64,
    mu2: f64,
    mu3: f64,
}

fn jordan_branch(m: &Matrix4<f64>, tol: &Tolerances) -> Result<JordanParts> {
    let d = adjoint_of(m) * m;
    let ne = dominant_null_vector(&d, tol)?;
    let mu0 = ne.lambda0.sqrt();
    let l = ne.l;
    let v = if ne.others.is_empty() {
        Vector4::new(l[0], -l[1], -l[2], -l[3])
    } else {
        let lhat = l.normalize();
        let best = (0..4)
            .max_by(|&i, &j| {
                let ci = col(&ne.q, i);
                let cj = col(&ne.q, j);
                (ci - lhat * lhat.dot(&ci)).norm().total_cmp(&(cj - lhat * lhat.dot(&cj)).norm())
            })
            .expect("four columns");
        col(&ne.q, best)
    };
    let vl = mdot(&v, &l);
    if vl.abs() <= 1e-12 * v.norm() * l.norm() {
        return Err(Error::FrameCompletion("degenerate null plane".into()));
    }
    let beta = -mdot(&v, &v) / (2.0 * vl);
    let n = (v + l * beta) / vl;
    let s = std::f64::consts::FRAC_1_SQRT_2;

    // Right frame: null plane, then the transverse legs diagonalizing D.
    let mut right = complete_frame([Some((l + n) * s), Some((l - n) * s), None, None])?;
    let (y, z) = (col(&right, 2), col(&right, 3));
    let dyz = Matrix2::new(
        -mdot(&y, &(d * y)),
        -mdot(&y, &(d * z)),
        -mdot(&z, &(d * y)),
        -mdot(&z, &(d * z)),
    );
    let (_, rot) = symmetric_eigen(&dyz);
    // ascending eigenvalues: the larger goes to Y
    right.set_column(2, &(y * rot[(0, 1)] + z * rot[(1, 1)]));
    right.set_column(3, &(y * rot[(0, 0)] + z * rot[(1, 0)]));
    if right.determinant() < 0.0 {
        right.set_column(3, &(-col(&right, 3)));
    }

    let l_left = m * l / mu0;
    let mn = m * n;
    let x = mdot(&mn, &mn) / (2.0 * mu0);
    let n_left = (mn - l_left * x) / mu0;
    let mut legs = [Some((l_left + n_left) * s), Some((l_left - n_left) * s), None, None];
    for k in 2..4 {
        let w = m * col(&right, k);
        let mk = (-mdot(&w, &w)).max(0.0).sqrt();
        if mk > tol.rank * mu0 {
            legs[k] = Some(w / mk);
        }
    }
    let mut left = complete_frame(legs)?;
    if left.determinant() < 0.0 {
        left.set_column(3, &(-col(&left, 3)));
    }

    // Renormalizing the left null pair leaves a small relative boost
    // between the frames; absorb it so the null block is exactly Jordan.
    let mut k = adjoint_of(&left) * m * right;
    for _ in 0..4 {
        let phi = (k[(0, 1)] + k[(1, 0)]) / (k[(0, 0)] + k[(1, 1)]);
        if !(phi.abs() > 1e-15) {
            break;
        }
        let (e0, e1) = (col(&left, 0), col(&left, 1));
        left.set_column(0, &(e0 * phi.cosh() + e1 * phi.sinh()));
        left.set_column(1, &(e0 * phi.sinh() + e1 * phi.cosh()));
        k = adjoint_of(&left) * m * right;
    }
    let mu0 = 0.5 * (k[(0, 0)] + k[(1, 1)]);
    let x = 0.5 * ((k[(0, 0)] - k[(1, 1)]) + (k[(1, 0)] - k[(0, 1)]));
    let (mut mu2, mut mu3) = (k[(2, 2)], k[(3, 3)]);
    if mu2 + mu3 < 0.0 {
        left.set_column(2, &(-col(&left, 2)));
        left.set_column(3, &(-col(&left, 3)));
        mu2 = -mu2;
        mu3 = -mu3;
    }
    if mu3.abs() > mu2.abs() {
        for f in [&mut left, &mut right] {
            f.swap_columns(2, 3);
            f.set_column(3, &(-col(f, 3)));
        }
        std::mem::swap(&mut mu2, &mut mu3);
    }
    Ok(JordanParts { left, right, mu0, x, mu2, mu3 })
}

/// Rank-one tensors `C = x p qᵀ` with a null factor.
fn rank_one_form(c: &Matrix4<f64>, tol: &Tolerances) -> Result<Option<LsvdResult>> {
    let (_, v) = symmetric_eigen(&(c.transpose() * c));
    let mut b = col(&v, 3);
    let mut a = c * b;
    if (c - a * b.transpose()).norm() > tol.rank * c.norm() {
        return Ok(None);
    }
    if a[0] < 0.0 {
        a = -a;
        b = -b;
    }
    let a_null = mdot(&a, &a).abs() <= tol.lightlike * a[0] * a[0];
    let b_null = mdot(&b, &b).abs() <= tol.lightlike * b[0] * b[0];
    if !a_null && !b_null {
        return Ok(None);
    }
    for (u, null) in [(&a, a_null), (&b, b_null)] {
        if u[0] <= 0.0 || (!null && mdot(u, u) <= 0.0) {
            return Err(Error::DecViolation("rank-one factor is not future causal".into()));
        }
    }
    let frame = |u: &Vector4<f64>, null: bool| -> Result<(f64, Tetrad)> {
        if null {
            let dir = u.fixed_rows::<3>(1).into_owned();
            Ok((u[0] * std::f64::consts::SQRT_2, Tetrad::rotated_to(&dir)))
        } else {
            let s = mdot(u, u).sqrt();
            Ok((s, Tetrad::boosted_to(&FourVector::from_vector(u))?))
        }
    };
    let (sa, left) = frame(&a, a_null)?;
    let (sb, right) = frame(&b, b_null)?;
    let state_type = match (a_null, b_null) {
        (false, true) => StateType::TypeII0a,
        (true, false) => StateType::TypeII0b,
        _ => StateType::TypeII0c,
    };
    Ok(Some(LsvdResult {
        state_type,
        mu: [0.0; 4],
        jordan_x: sa * sb,
        lambda: [0.0; 4],
        left_frame: left,
        right_frame: right,
        sign_class: SignClass::Boundary,
        diagnostics: LsvdDiagnostics::default(),
    }))
}

fn sign_class_of(det: f64, scale: f64, tol: &Tolerances) -> SignClass {
    if det.abs() <= tol.sign * scale {
        SignClass::Boundary
    } else if det > 0.0 {
        SignClass::Positive
    } else {
        SignClass::Negative
    }
}

/// Sorts `|μ₁| ≥ |μ₂| ≥ |μ₃|` and makes the signs uniform: all `≥ 0` for
/// positive and boundary classes, all `≤ 0` for the negative class. Only
/// proper orthochronous frame changes are used.
fn canonicalize_type_i(
    left: &mut Matrix4<f64>,
    right: &mut Matrix4<f64>,
    mu: &mut [f64; 4],
    tol: &Tolerances,
) -> SignClass {
    let mut order = [1usize, 2, 3];
    order.sort_by(|&i, &j| mu[j].abs().total_cmp(&mu[i].abs()));
    let odd = {
        let mut inv = 0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                if order[i] > order[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 1
    };
    let (l0, r0, m0) = (*left, *right, *mu);
    for (k, &src) in order.iter().enumerate() {
        left.set_column(k + 1, &col(&l0, src));
        right.set_column(k + 1, &col(&r0, src));
        mu[k + 1] = m0[src];
    }
    if odd {
        left.set_column(3, &(-col(left, 3)));
        right.set_column(3, &(-col(right, 3)));
    }
    let class = sign_class_of(mu[1] * mu[2] * mu[3], mu[0].powi(3), tol);
    let want_positive = class != SignClass::Negative;
    let mut wrong: Vec<usize> = (1..4)
        .filter(|&k| if want_positive { mu[k] < 0.0 } else { mu[k] > 0.0 })
        .collect();
    if wrong.len() % 2 == 1 && class == SignClass::Boundary && wrong[wrong.len() - 1] != 3 {
        wrong.push(3);
    }
    for pair in wrong.chunks_exact(2) {
        for &k in pair {
            left.set_column(k, &(-col(left, k)));
            mu[k] = -mu[k];
        }
    }
    for m in mu.iter_mut() {
        if *m == 0.0 {
            *m = 0.0;
        }
    }
    class
}

fn quartic_diagnostics(m: &Matrix4<f64>, lambda: &[f64; 4], tol: &Tolerances) -> (f64, [f64; 4], bool) {
    let d = adjoint_of(m) * m;
    let cp = quartic::characteristic_polynomial(&d);
    let cr = quartic::polynomial_from_roots(lambda);
    let lmax = lambda.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let scale = if lmax > 0.0 { lmax } else { m.norm_squared().max(f64::MIN_POSITIVE) };
    let mismatch = (0..4)
        .map(|k| (cp[k] - cr[k]).abs() / scale.powi(4 - k as i32))
        .fold(0.0, f64::max);
    let roots = quartic::real_roots_descending(&cp);
    (mismatch, roots, mismatch > tol.quartic)
}

struct Candidate {
    left: Matrix4<f64>,
    right: Matrix4<f64>,
    mu: [f64; 4],
    frame_mu: [f64; 4],
    state_type: StateType,
    x: f64,
    class: SignClass,
    sweeps: usize,
}

fn jordan_candidate(m: &Matrix4<f64>, tol: &Tolerances) -> Result<Candidate> {
    let j = jordan_branch(m, tol)?;
    if j.x < -tol.jordan * j.mu0 {
        return Err(Error::DecViolation(format!("negative Jordan coupling {:e}", j.x)));
    }
    if j.x <= tol.jordan * j.mu0 {
        let (mut left, mut right) = (j.left, j.right);
        let k = adjoint_of(&left) * m * right;
        let mut mu = [k[(0, 0)], k[(1, 1)], j.mu2, j.mu3];
        let frame_mu = mu;
        let class = canonicalize_type_i(&mut left, &mut right, &mut mu, tol);
        return Ok(Candidate { left, right, mu, frame_mu, state_type: StateType::TypeI, x: 0.0, class, sweeps: MAX_SWEEPS });
    }
    let class = sign_class_of(j.mu2 * j.mu3, j.mu0 * j.mu0, tol);
    Ok(Candidate {
        left: j.left,
        right: j.right,
        mu: [j.mu0, j.mu0, j.mu2, j.mu3],
        frame_mu: [j.mu0, j.mu0, j.mu2, j.mu3],
        state_type: StateType::TypeII,
        x: j.x,
        class,
        sweeps: MAX_SWEEPS,
    })
}

fn finish(mut c: Candidate, m: &Matrix4<f64>, tol: &Tolerances) -> Result<LsvdResult> {
    if c.mu[0] < 0.0 {
        return Err(Error::DecViolation("negative μ₀".into()));
    }
    // Keep frames exactly proper after the sign moves.
    for f in [&mut c.left, &mut c.right] {
        if f.determinant() < 0.0 {
            f.set_column(3, &(-col(f, 3)));
        }
    }
    let lambda = c.mu.map(|v| v * v);
    let (quartic_mismatch, quartic_lambda, ill_conditioned) = quartic_diagnostics(m, &lambda, tol);
    Ok(LsvdResult {
        state_type: c.state_type,
        mu: c.mu,
        jordan_x: c.x,
        lambda,
        left_frame: Tetrad::from_matrix_unchecked(c.left),
        right_frame: Tetrad::from_matrix_unchecked(c.right),
        sign_class: c.class,
        diagnostics: LsvdDiagnostics {
            sweeps: c.sweeps,
            boost_gamma: c.right[(0, 0)],
            quartic_lambda,
            quartic_mismatch,
            ill_conditioned,
            frame_mu: c.frame_mu,
        },
    })
}

fn residual(r: &LsvdResult, c: &Matrix4<f64>) -> f64 {
    (reconstruct_a(r).matrix() - c).norm()
}

/// Lorentzian singular value decomposition of a two-qubit tensor.
pub fn lsvd(a: &MinkowskiMap, tol: &Tolerances) -> Result<LsvdResult> {
    let c = *a.to_both_lower().matrix();
    let m = *a.to_mixed().matrix();
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if c.norm() == 0.0 {
        return Err(Error::InvalidParameter("zero tensor".into()));
    }
    if let Some(r) = rank_one_form(&c, tol)? {
        return Ok(r);
    }
    match one_sided_jacobi(&m, tol.jordan) {
        Sweep::Converged { right, sweeps } => {
            let (mut left, mut right, mut mu) = type_i_from_right(&m, &right, tol)?;
            let frame_mu = mu;
            let class = canonicalize_type_i(&mut left, &mut right, &mut mu, tol);
            let cand = Candidate { left, right, mu, frame_mu, state_type: StateType::TypeI, x: 0.0, class, sweeps };
            let r = finish(cand, &m, tol)?;
            if r.diagnostics.boost_gamma <= JORDAN_PROBE_GAMMA {
                return Ok(r);
            }
            // Large boosts approach the Jordan limit; keep the better fit.
            match jordan_candidate(&m, tol).and_then(|j| finish(j, &m, tol)) {
                Ok(j) if residual(&j, &c) <= residual(&r, &c) => Ok(j),
                _ => Ok(r),
            }
        }
        Sweep::Jordan => finish(jordan_candidate(&m, tol)?, &m, tol),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::qubit_map::{apply_plt_left, apply_plt_right, rho_to_a, DensityMatrix};
    use crate::spacetime::LorentzTransform;
    use crate::C64;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    pub(crate) fn ginibre(seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Matrix4::from_fn(|_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let h = g * g.adjoint();
        let tr = h.trace().re;
        DensityMatrix::new(h / C64::new(tr, 0.0), 1e-9).unwrap()
    }

    fn tensor(c: Matrix4<f64>) -> MinkowskiMap {
        MinkowskiMap::both_lower(c)
    }

    fn check_decomposition(a: &MinkowskiMap, r: &LsvdResult) {
        let c = a.to_both_lower();
        let back = reconstruct_a(r);
        let err = (back.matrix() - c.matrix()).norm();
        assert!(err <= 1e-9 * c.matrix().norm(), "reconstruction error {err:e}");
        for f in [&r.left_frame, &r.right_frame] {
            assert!(f.gram_defect() <= 1e-9, "gram defect {:e}", f.gram_defect());
            assert!(f.is_proper_orthochronous());
        }
    }

    #[test]
    fn bell_state() {
        let a = tensor(Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, 1.0)));
        let r = lsvd(&a, &Tolerances::default()).unwrap();
        assert_eq!(r.state_type, StateType::TypeI);
        assert_eq!(r.sign_class, SignClass::Positive);
        for (m, e) in r.mu.iter().zip([1.0; 4]) {
            assert_relative_eq!(*m, e, epsilon = 1e-14);
        }
        check_decomposition(&a, &r);
    }

    #[test]
    fn maximally_mixed() {
        let a = tensor(Matrix4::from_diagonal(&Vector4::new(1.0, 0.0, 0.0, 0.0)));
        let r = lsvd(&a, &Tolerances::default()).unwrap();
        assert_eq!(r.state_type, StateType::TypeI);
        assert_eq!(r.mu, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.sign_class, SignClass::Boundary);
        check_decomposition(&a, &r);
    }

    #[test]
    fn sign_canonicalization() {
        // mixed diag(1, 0.3, -0.2, 0.1): odd number of negatives
        let a = MinkowskiMap::mixed(Matrix4::from_diagonal(&Vector4::new(1.0, 0.3, -0.2, 0.1)));
        let r = lsvd(&a, &Tolerances::default()).unwrap();
        assert_eq!(r.sign_class, SignClass::Negative);
        for (m, e) in r.mu.iter().zip([1.0, -0.3, -0.2, -0.1]) {
            assert_relative_eq!(*m, e, epsilon = 1e-14);
        }
        check_decomposition(&a, &r);

        let a = MinkowskiMap::mixed(Matrix4::from_diagonal(&Vector4::new(1.0, -0.1, 0.5, -0.3)));
        let r = lsvd(&a, &Tolerances::default()).unwrap();
        assert_eq!(r.sign_class, SignClass::Positive);
        for (m, e) in r.mu.iter().zip([1.0, 0.5, 0.3, 0.1]) {
            assert_relative_eq!(*m, e, epsilon = 1e-14);
        }
        check_decomposition(&a, &r);
    }

    #[test]
    fn rank_one_types() {
        let tol = Tolerances::default();
        // |00⟩: both Bloch four-vectors null
        let u = Vector4::new(1.0, 0.0, 0.0, 1.0);
        let r = lsvd(&tensor(u * u.transpose()), &tol).unwrap();
        assert_eq!(r.state_type, StateType::TypeII0c);
        assert_relative_eq!(r.jordan_x, 2.0, epsilon = 1e-14);
        check_decomposition(&tensor(u * u.transpose()), &r);

        // |0⟩⟨0| ⊗ I/2
        let t = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let a = tensor(u * t.transpose());
        let r = lsvd(&a, &tol).unwrap();
        assert_eq!(r.state_type, StateType::TypeII0b);
        check_decomposition(&a, &r);

        let a = tensor(t * u.transpose());
        let r = lsvd(&a, &tol).unwrap();
        assert_eq!(r.state_type, StateType::TypeII0a);
        check_decomposition(&a, &r);
    }

    fn jordan_tensor(mu0: f64, x: f64, mu2: f64, l: u64, rr: u64) -> MinkowskiMap {
        let k = LsvdResult {
            state_type: StateType::TypeII,
            mu: [mu0, mu0, mu2, mu2],
            jordan_x: x,
            lambda: [0.0; 4],
            left_frame: Tetrad::from_transform(&LorentzTransform::random(l, 1.0)),
            right_frame: Tetrad::from_transform(&LorentzTransform::random(rr, 1.0)),
            sign_class: SignClass::Positive,
            diagnostics: LsvdDiagnostics::default(),
        };
        reconstruct_a(&k)
    }

    #[test]
    fn type_ii_recovered() {
        let tol = Tolerances::default();
        for (seed, (x, mu2)) in [(0.7, 0.3), (0.2, 0.0), (1.5, 0.6)].into_iter().enumerate() {
            let a = jordan_tensor(1.0, x, mu2, 10 + seed as u64, 20 + seed as u64);
            let r = lsvd(&a, &tol).unwrap();
            assert_eq!(r.state_type, StateType::TypeII, "x = {x}: {r:?}");
            let s = r.mu[0];
            assert_relative_eq!(s, 1.0, epsilon = 1e-7);
            assert_relative_eq!(r.mu[2], mu2, epsilon = 1e-7);
            assert_relative_eq!(r.mu[3], mu2, epsilon = 1e-7);
            assert!(r.jordan_x > 0.0);
            check_decomposition(&a, &r);
        }
    }

    #[test]
    fn random_states_decompose() {
        let tol = Tolerances::default();
        for seed in 0..300 {
            let a = rho_to_a(&ginibre(seed));
            let r = lsvd(&a, &tol).unwrap();
            assert_eq!(r.state_type, StateType::TypeI);
            check_decomposition(&a, &r);
            assert!(r.mu[1].abs() >= r.mu[2].abs() && r.mu[2].abs() >= r.mu[3].abs());
            assert!(!r.diagnostics.ill_conditioned, "seed {seed}: {:?}", r.diagnostics);
        }
    }

    #[test]
    fn intertwining_and_eigenvalues() {
        let tol = Tolerances::default();
        for seed in 0..50 {
            let a = rho_to_a(&ginibre(1000 + seed));
            let m = *a.to_mixed().matrix();
            let b = *compute_b(&a).matrix();
            let d = *compute_d(&a).matrix();
            let scale = m.norm().powi(3);
            assert!((b * m - m * d).norm() <= 1e-13 * scale);
            let r = lsvd(&a, &tol).unwrap();
            for k in 0..4 {
                let e = r.right_frame.leg(k).to_vector();
                let f = r.left_frame.leg(k).to_vector();
                let lam = r.lambda[k];
                assert!((d * e - e * lam).norm() <= 1e-10 * d.norm());
                assert!((b * f - f * lam).norm() <= 1e-10 * b.norm());
            }
        }
    }

    #[test]
    fn orbit_invariance() {
        let tol = Tolerances::default();
        for seed in 0..40 {
            let a = rho_to_a(&ginibre(2000 + seed));
            let r0 = lsvd(&a, &tol).unwrap();
            let l = LorentzTransform::random(3 * seed + 1, 2.0);
            let rr = LorentzTransform::random(3 * seed + 2, 2.0);
            let b = apply_plt_right(&apply_plt_left(&a, &l).unwrap(), &rr).unwrap();
            let r1 = lsvd(&b, &tol).unwrap();
            let (n0, n1) = (r0.normalized_mu().unwrap(), r1.normalized_mu().unwrap());
            for k in 0..4 {
                assert!((n0[k] - n1[k]).abs() <= 1e-8, "seed {seed}: {n0:?} vs {n1:?}");
            }
            assert_eq!(r0.sign_class, r1.sign_class);
        }
    }

    #[test]
    fn non_state_rejected() {
        // maps the future cone to the past
        let a = MinkowskiMap::mixed(Matrix4::from_diagonal(&Vector4::new(-1.0, 0.5, 0.0, 0.0)));
        assert!(lsvd(&a, &Tolerances::default()).is_err());
    }
}
