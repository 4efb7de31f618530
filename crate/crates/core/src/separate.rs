//! Explicit separable decompositions `C = Σ wᵢ nᵢ mᵢᵀ`.
//!
//! Each term is a product state `¼ wᵢ (nᵢ·σ) ⊗ (mᵢ·σ)` with future causal
//! `nᵢ, mᵢ`. The terms are built in the canonical frames from the null
//! legs `P±ₖ = (e₀ ± eₖ)/√2` and transported back with `Λ₁`, `Λ₂`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::classify::{verdict_from_lsvd, Status};
use crate::error::{Error, Result};
use crate::lsvd::{LsvdResult, SignClass, StateType};
use crate::qubit_map::{vector_to_single_qubit, DensityMatrix};
use crate::spacetime::{CausalClass, FourVector, Tetrad};
use crate::tolerance::Tolerances;
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    /// First-qubit factor.
    pub left: FourVector,
    /// Second-qubit factor.
    pub right: FourVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub state_type: StateType,
    pub sign_class: SignClass,
    pub left_frame: Tetrad,
    pub right_frame: Tetrad,
    pub all_null: bool,
    /// Canonical-frame terms removed because their weight vanished.
    pub dropped: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableDecomposition {
    pub terms: Vec<Term>,
    pub provenance: Provenance,
}

impl SeparableDecomposition {
    /// `Σ wᵢ nᵢ mᵢᵀ` (both indices lower).
    pub fn coefficients(&self) -> Matrix4<f64> {
        self.terms.iter().fold(Matrix4::zeros(), |acc, t| {
            acc + t.left.to_vector() * t.right.to_vector().transpose() * t.weight
        })
    }

    /// `Σ ¼ wᵢ (nᵢ·σ) ⊗ (mᵢ·σ)`.
    pub fn density_matrix(&self) -> Matrix4<C64> {
        self.terms.iter().fold(Matrix4::zeros(), |acc, t| {
            let k = vector_to_single_qubit(&t.left).kronecker(&vector_to_single_qubit(&t.right));
            acc + Matrix4::from_fn(|r, c| k[(r, c)]) * C64::new(0.25 * t.weight, 0.0)
        })
    }
}

fn unit(k: usize) -> Vector4<f64> {
    let mut v = Vector4::zeros();
    v[k] = 1.0;
    v
}

/// `(e₀ + s eₖ)/√2`.
fn null_leg(k: usize, s: f64) -> Vector4<f64> {
    (unit(0) + unit(k) * s) * std::f64::consts::FRAC_1_SQRT_2
}

/// Canonical-frame term before transport.
struct Raw {
    label: String,
    weight: f64,
    a: Vector4<f64>,
    b: Vector4<f64>,
}

fn raw(label: impl Into<String>, weight: f64, a: Vector4<f64>, b: Vector4<f64>) -> Raw {
    Raw { label: label.into(), weight, a, b }
}

fn canonical_terms(r: &LsvdResult, tol: &Tolerances) -> Vec<Raw> {
    let t = unit(0);
    let (xp, xm) = (null_leg(1, 1.0), null_leg(1, -1.0));
    let x = r.jordan_x;
    match r.state_type {
        StateType::TypeII0a => vec![raw("x T⊗X+", x, t, xp)],
        StateType::TypeII0b => vec![raw("x X+⊗T", x, xp, t)],
        StateType::TypeII0c => vec![raw("x X+⊗X+", x, xp, xp)],
        StateType::TypeII => {
            let m0 = r.mu[0];
            vec![raw("μ0 X+⊗X-", m0, xp, xm), raw("μ0 X-⊗X+", m0, xm, xp), raw("x X+⊗X+", x, xp, xp)]
        }
        StateType::TypeI => {
            let mu = r.mu;
            let mut terms = Vec::new();
            let names = ["", "X", "Y", "Z"];
            for k in 1..4 {
                let w = mu[k].abs();
                let (p, m) = (null_leg(k, 1.0), null_leg(k, -1.0));
                let n = names[k];
                if mu[k] >= 0.0 {
                    terms.push(raw(format!("μ{k} {n}+⊗{n}-"), w, p, m));
                    terms.push(raw(format!("μ{k} {n}-⊗{n}+"), w, m, p));
                } else {
                    terms.push(raw(format!("|μ{k}| {n}+⊗{n}+"), w, p, p));
                    terms.push(raw(format!("|μ{k}| {n}-⊗{n}-"), w, m, m));
                }
            }
            let rest = mu[0] - mu[1].abs() - mu[2].abs() - mu[3].abs();
            // A rounding-level negative remainder sits inside the boundary band.
            let rest = if rest < 0.0 && rest >= -tol.boundary * mu[0] { 0.0 } else { rest };
            terms.push(raw("(μ0−Σ|μ|) T⊗T", rest, t, t));
            terms
        }
    }
}

/// Replaces a time-leg factor by the null pair `(e₀ ± e₁)/√2`, using
/// `e₀ = (P₊ + P₋)/√2`.
fn split_time_legs(terms: Vec<Raw>) -> Vec<Raw> {
    let t = unit(0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let split = |v: Vector4<f64>| -> Vec<(f64, Vector4<f64>, &'static str)> {
        if v == t {
            vec![(s, null_leg(1, 1.0), "X+"), (s, null_leg(1, -1.0), "X-")]
        } else {
            vec![(1.0, v, "")]
        }
    };
    let mut out = Vec::new();
    for term in terms {
        for (fa, a, la) in split(term.a) {
            for (fb, b, lb) in split(term.b) {
                let label = if la.is_empty() && lb.is_empty() {
                    term.label.clone()
                } else {
                    format!("{} [{la}|{lb}]", term.label)
                };
                out.push(raw(label, term.weight * fa * fb, a, b));
            }
        }
    }
    out
}

/// One valid separable decomposition of a separable state. With `all_null`
/// every factor is null, i.e. every term is a product of pure states.
pub fn separable_decomposition(r: &LsvdResult, all_null: bool, tol: &Tolerances) -> Result<SeparableDecomposition> {
    let v = verdict_from_lsvd(r, None, tol);
    match v.status {
        Status::Separable => {}
        Status::Entangled => return Err(Error::Entangled { margin: v.margin.unwrap_or(f64::NAN) }),
        Status::NotAState => return Err(Error::NotAState(v.reason.unwrap_or_default())),
    }
    let mut terms = canonical_terms(r, tol);
    if all_null {
        terms = split_time_legs(terms);
    }
    let (l1, l2) = (r.left_frame.matrix(), r.right_frame.matrix());
    let mut dropped = Vec::new();
    let mut out = Vec::new();
    for term in terms {
        if term.weight <= 0.0 {
            dropped.push(term.label);
            continue;
        }
        out.push(Term {
            weight: term.weight,
            left: FourVector::from_vector(&(l1 * term.a)),
            right: FourVector::from_vector(&(l2 * term.b)),
        });
    }
    Ok(SeparableDecomposition {
        terms: out,
        provenance: Provenance {
            state_type: r.state_type,
            sign_class: r.sign_class,
            left_frame: r.left_frame,
            right_frame: r.right_frame,
            all_null,
            dropped,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    /// `‖ρ − Σ ¼ wᵢ (nᵢ·σ)⊗(mᵢ·σ)‖_F / Tr ρ`.
    pub residual: f64,
    pub all_factors_causal: bool,
    pub weights_positive: bool,
    /// Smallest eigenvalue over the normalized factors `½ (u·σ)/u⁰`.
    pub min_factor_eigenvalue: f64,
    /// `|Σ wᵢ nᵢ⁰ mᵢ⁰ − C₀₀| / C₀₀`.
    pub weight_defect: f64,
}

pub fn verify_decomposition(d: &SeparableDecomposition, rho: &DensityMatrix) -> DecompositionCheck {
    let tr = rho.trace();
    let diff = d.density_matrix() - rho.matrix();
    let residual = diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / tr;
    let mut all_factors_causal = true;
    let mut min_factor_eigenvalue = f64::INFINITY;
    for t in &d.terms {
        for u in [t.left, t.right] {
            let class = u.causal_class(1e-9);
            all_factors_causal &= matches!(class, CausalClass::FutureTimelike | CausalClass::FutureLightlike);
            // spectrum of ½ (u·σ)/u⁰ is ½ (1 ± |u⃗|/u⁰)
            min_factor_eigenvalue = min_factor_eigenvalue.min(0.5 * (1.0 - u.spatial().norm() / u.time()));
        }
    }
    let c00 = d.terms.iter().map(|t| t.weight * t.left.time() * t.right.time()).sum::<f64>();
    DecompositionCheck {
        residual,
        all_factors_causal,
        weights_positive: d.terms.iter().all(|t| t.weight > 0.0),
        min_factor_eigenvalue,
        weight_defect: (c00 - tr).abs() / tr,
    }
}
