//! Energy conditions, state conditions and the entanglement verdict.
//!
//! With `ε = μ₀` and `p_k = −μ_k` the canonical tensor reads like a perfect
//! fluid stress tensor. Positivity of ρ is a set of four linear inequalities
//! on μ, and separability is the strong energy condition
//! `μ₁ + μ₂ + μ₃ ≤ μ₀` on the canonical signs.

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsvd::{lsvd, reconstruct_a, LsvdResult, SignClass, StateType};
use crate::qubit_map::{hermitian_defect, rho_to_a, DensityMatrix, MinkowskiMap};
use crate::spacetime::{random_unit3, FourVector};
use crate::tolerance::Tolerances;
use crate::{jacobi, C64};

pub const DEFAULT_FUZZ_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Separable,
    Entangled,
    NotAState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyCondition {
    Weak,
    Dominant,
    Strong,
}

/// Test vectors (canonical frame) on which a condition fails, with the
/// offending value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub condition: EnergyCondition,
    pub vectors: Vec<FourVector>,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecFuzz {
    pub samples: usize,
    /// Smallest `C(n, m) / C₀₀` over the sampled future null pairs.
    pub min_pairing: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub wec: bool,
    pub dec: bool,
    pub sec: bool,
    pub witnesses: Vec<Witness>,
    pub dec_fuzz: DecFuzz,
}

/// `4ρ` eigenvalues of the canonical state with these μ.
pub fn state_eigenvalues(mu: [f64; 4]) -> [f64; 4] {
    let [m0, m1, m2, m3] = mu;
    [m0 + m1 - m2 - m3, m0 - m1 + m2 - m3, m0 - m1 - m2 + m3, m0 + m1 + m2 + m3]
}

/// 1-based indices of the violated positivity inequalities
/// `−μ₁+μ₂+μ₃ ≤ μ₀`, `μ₁−μ₂+μ₃ ≤ μ₀`, `μ₁+μ₂−μ₃ ≤ μ₀`, `μ₁+μ₂+μ₃ ≥ −μ₀`,
/// each allowed a slack of `slack·μ₀`.
pub fn failed_state_conditions(mu: [f64; 4], slack: f64) -> Vec<usize> {
    let allowance = slack * mu[0].abs();
    state_eigenvalues(mu)
        .iter()
        .enumerate()
        .filter(|(_, e)| **e < -allowance)
        .map(|(i, _)| i + 1)
        .collect()
}

pub fn state_conditions(mu: [f64; 4], slack: f64) -> bool {
    mu[0] >= 0.0 && failed_state_conditions(mu, slack).is_empty()
}

/// Image of `(μ₁, μ₂, μ₃)` under the partial transpose: the inversion
/// through the origin of μ-space.
pub fn partial_transpose_mu(r: &LsvdResult) -> [f64; 3] {
    [-r.mu[1], -r.mu[2], -r.mu[3]]
}

/// Sign class of a μ quadruple in any sign arrangement.
pub fn mu_sign_class(mu: [f64; 4], tol: &Tolerances) -> SignClass {
    let det = mu[1] * mu[2] * mu[3];
    if det.abs() <= tol.sign * mu[0].abs().powi(3) {
        SignClass::Boundary
    } else if det > 0.0 {
        SignClass::Positive
    } else {
        SignClass::Negative
    }
}

/// Verdict from Type-I μ alone: `(status, margin)`, margin normalized to
/// `μ₀ = 1`. Signs need not be canonical.
pub fn mu_verdict(mu: [f64; 4], tol: &Tolerances) -> (Status, Option<f64>) {
    if !(mu[0] > 0.0) || !state_conditions(mu, tol.state) {
        return (Status::NotAState, None);
    }
    let abs_sum = mu[1].abs() + mu[2].abs() + mu[3].abs();
    match mu_sign_class(mu, tol) {
        SignClass::Positive => {
            let margin = (mu[0] - abs_sum) / mu[0];
            let status = if margin < 0.0 { Status::Entangled } else { Status::Separable };
            (status, Some(margin))
        }
        SignClass::Negative => (Status::Separable, Some((mu[0] + abs_sum) / mu[0])),
        SignClass::Boundary => (Status::Separable, Some((mu[0] - abs_sum) / mu[0])),
    }
}

fn random_null<R: Rng + ?Sized>(rng: &mut R) -> FourVector {
    FourVector::null_along(&random_unit3(rng))
}

/// Minimum of `C(n, m)` over random future null pairs, relative to `C₀₀`.
pub fn fuzz_dec(a: &MinkowskiMap, samples: usize, seed: u64, tol: &Tolerances) -> DecFuzz {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = a.to_both_lower();
    let scale = c.matrix()[(0, 0)].abs().max(f64::MIN_POSITIVE);
    let mut min_pairing = f64::INFINITY;
    for _ in 0..samples {
        let n = random_null(&mut rng);
        let m = random_null(&mut rng);
        min_pairing = min_pairing.min(c.pair(&n, &m) / scale);
    }
    DecFuzz { samples, min_pairing, passed: min_pairing >= -tol.causal.sqrt() }
}

/// Energy conditions of the canonical tensor, with the DEC also sampled on
/// the reassembled tensor `Λ₁ K Λ₂ᵀ`.
pub fn energy_conditions(r: &LsvdResult, tol: &Tolerances) -> EnergyReport {
    energy_conditions_with(r, tol, DEFAULT_FUZZ_SAMPLES, 0)
}

pub fn energy_conditions_with(r: &LsvdResult, tol: &Tolerances, samples: usize, seed: u64) -> EnergyReport {
    let dec_fuzz = fuzz_dec(&reconstruct_a(r), samples, seed, tol);
    if r.state_type.is_rank_one() {
        let ok = r.jordan_x >= 0.0;
        return EnergyReport { wec: ok, dec: ok, sec: ok, witnesses: Vec::new(), dec_fuzz };
    }
    let mu = r.mu;
    let slack = tol.state * mu[0].abs();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let axis = |k: usize, sign: f64| {
        let mut v = [s, 0.0, 0.0, 0.0];
        v[k] = sign * s;
        FourVector(v)
    };
    let mut witnesses = Vec::new();
    let mut wec = true;
    let mut dec = true;
    for k in 1..4 {
        let along = 0.5 * (mu[0] - mu[k]);
        if along < -slack {
            wec = false;
            dec = false;
            witnesses.push(Witness { condition: EnergyCondition::Weak, vectors: vec![axis(k, 1.0)], value: along });
        }
        let across = 0.5 * (mu[0] + mu[k]);
        if across < -slack {
            dec = false;
            witnesses.push(Witness {
                condition: EnergyCondition::Dominant,
                vectors: vec![axis(k, 1.0), axis(k, -1.0)],
                value: across,
            });
        }
    }
    if r.state_type == StateType::TypeII && r.jordan_x < 0.0 {
        dec = false;
        witnesses.push(Witness {
            condition: EnergyCondition::Dominant,
            vectors: vec![axis(1, 1.0), axis(1, 1.0)],
            value: r.jordan_x,
        });
    }
    let strong = 0.5 * (mu[0] - mu[1] - mu[2] - mu[3]);
    let sec = wec && strong >= -slack;
    if strong < -slack {
        witnesses.push(Witness {
            condition: EnergyCondition::Strong,
            vectors: vec![FourVector::TIME],
            value: strong,
        });
    }
    EnergyReport { wec, dec, sec, witnesses, dec_fuzz }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// `μ₀ − (μ₁+μ₂+μ₃)` in canonical signs, normalized to `μ₀ = 1`.
    pub margin: Option<f64>,
    pub state_type: Option<StateType>,
    pub sign_class: Option<SignClass>,
    pub near_boundary: bool,
    /// Canonical μ normalized to `μ₀ = 1`.
    pub mu: Option<[f64; 4]>,
    /// Violated positivity inequalities (1-based), evaluated on the μ read
    /// off the converged frames before sign canonicalization.
    pub failed_conditions: Vec<usize>,
    pub reason: Option<String>,
}

impl Verdict {
    fn not_a_state(reason: String) -> Self {
        Verdict {
            status: Status::NotAState,
            margin: None,
            state_type: None,
            sign_class: None,
            near_boundary: false,
            mu: None,
            failed_conditions: Vec::new(),
            reason: Some(reason),
        }
    }
}

/// Full pipeline for a 4×4 matrix: validity, LSVD, canonical μ and the
/// stratum rule. Only non-finite input is an error; anything else that is
/// not a density matrix gets a `NotAState` verdict with a reason.
pub fn verdict(m: &Matrix4<C64>, tol: &Tolerances) -> Result<Verdict> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let defect = hermitian_defect(m);
    if defect > tol.hermitian {
        return Ok(Verdict::not_a_state(format!("not Hermitian (defect {defect:e})")));
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let trace = h.trace().re;
    if !(trace > 0.0) {
        return Ok(Verdict::not_a_state(format!("trace {trace:e} is not positive")));
    }
    let min_ev = jacobi::hermitian_eigenvalues(&h)[0];
    let psd = min_ev >= -tol.psd * trace;
    let rho = DensityMatrix::from_matrix_unchecked(h);
    let r = match lsvd(&rho_to_a(&rho), tol) {
        Ok(r) => r,
        Err(e) => {
            let mut v = Verdict::not_a_state(e.to_string());
            if psd {
                v.reason = Some(format!("positive spectrum but {e}"));
            }
            return Ok(v);
        }
    };
    let negative = if psd { None } else { Some(min_ev / trace) };
    Ok(verdict_from_lsvd(&r, negative, tol))
}

/// Stratum rule on a finished decomposition. `negative_eigenvalue` is the
/// (trace-relative) violating eigenvalue of ρ when positivity already failed.
pub fn verdict_from_lsvd(r: &LsvdResult, negative_eigenvalue: Option<f64>, tol: &Tolerances) -> Verdict {
    let mut v = Verdict {
        status: Status::Separable,
        margin: None,
        state_type: Some(r.state_type),
        sign_class: Some(r.sign_class),
        near_boundary: false,
        mu: r.normalized_mu(),
        failed_conditions: Vec::new(),
        reason: None,
    };
    if let Some(ev) = negative_eigenvalue {
        v.status = Status::NotAState;
        v.reason = Some(format!("negative eigenvalue {ev:e} (trace 1)"));
        if r.state_type == StateType::TypeI {
            v.failed_conditions = failed_state_conditions(r.diagnostics.frame_mu, tol.state);
        }
        return v;
    }
    match r.state_type {
        StateType::TypeII0a | StateType::TypeII0b | StateType::TypeII0c => {
            v.status = Status::Separable;
        }
        StateType::TypeI => {
            v.failed_conditions = failed_state_conditions(r.diagnostics.frame_mu, tol.state);
            let (status, margin) = mu_verdict(r.mu, tol);
            v.status = status;
            v.margin = margin;
            if status == Status::NotAState {
                v.reason = Some("state inequalities violated".into());
            }
        }
        StateType::TypeII => {
            let [m0, _, m2, m3] = r.mu;
            let snap = |m: f64| if m.abs() <= tol.jordan * m0 { 0.0 } else { m };
            let (m2, m3) = (snap(m2), snap(m3));
            if (m2 - m3).abs() > tol.jordan * m0 || m2 > m0 {
                v.status = Status::NotAState;
                v.reason = Some(format!("Jordan form with μ₂ = {m2:e}, μ₃ = {m3:e} is not a state"));
            } else {
                let margin = -(m2 + m3) / m0;
                v.margin = Some(margin);
                v.status = if margin < 0.0 { Status::Entangled } else { Status::Separable };
            }
        }
    }
    if let Some(m) = v.margin {
        v.near_boundary = m.abs() <= tol.boundary;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsvd::tests::ginibre;
    use crate::oracle::{ppt_verdict, werner, PptStatus};
    use crate::qubit_map::canonical_state;
    use nalgebra::Vector4;

    fn report_for(mu: [f64; 4]) -> EnergyReport {
        let r = lsvd(&MinkowskiMap::mixed(Matrix4::from_diagonal(&Vector4::from(mu))), &Tolerances::default()).unwrap();
        energy_conditions(&r, &Tolerances::default())
    }

    #[test]
    fn energy_condition_examples() {
        let e = report_for([1.0, 0.0, 0.0, 0.0]);
        assert!(e.wec && e.dec && e.sec && e.dec_fuzz.passed);

        let e = report_for([1.0, 1.0, 1.0, 1.0]);
        assert!(e.wec && e.dec && !e.sec);
        assert_eq!(e.witnesses.len(), 1);
        assert_eq!(e.witnesses[0].condition, EnergyCondition::Strong);
        assert_eq!(e.witnesses[0].value, -1.0);

        let e = report_for([1.0, -1.0, -1.0, -1.0]);
        assert!(e.dec);
        assert!(!state_conditions([1.0, -1.0, -1.0, -1.0], 1e-9));
        assert_eq!(failed_state_conditions([1.0, -1.0, -1.0, -1.0], 1e-9), vec![4]);

        let e = report_for([1.0, 1.5, 0.0, 0.0]);
        assert!(!e.wec && !e.dec);
    }

    #[test]
    fn state_condition_examples() {
        assert!(state_conditions([1.0, 1.0, 1.0, 1.0], 1e-9));
        assert_eq!(state_eigenvalues([1.0, 1.0, 1.0, 1.0]), [0.0, 0.0, 0.0, 4.0]);
        assert!(state_conditions([1.0, 0.4, 0.4, 0.4], 1e-9));
        assert_eq!(failed_state_conditions([1.0, 0.8, 0.8, -0.8], 1e-9), vec![3]);
    }

    #[test]
    fn state_conditions_match_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let mu = [1.0, rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)];
            let ev = jacobi::hermitian_eigenvalues(&canonical_state(mu));
            assert_eq!(state_conditions(mu, 0.0), ev[0] >= -1e-12, "{mu:?} {ev:?}");
        }
    }

    #[test]
    fn verdict_examples() {
        let tol = Tolerances::default();
        let bell = crate::oracle::bell_projector(crate::oracle::BellVariant::PhiPlus);
        let v = verdict(&bell, &tol).unwrap();
        assert_eq!(v.status, Status::Entangled);
        assert!((v.margin.unwrap() + 2.0).abs() <= 1e-12);

        let v = verdict(&(Matrix4::identity() * C64::new(0.25, 0.0)), &tol).unwrap();
        assert_eq!(v.status, Status::Separable);
        assert_eq!(v.margin, Some(1.0));

        for (p, want) in [(0.2, Status::Separable), (0.3, Status::Separable), (0.34, Status::Entangled), (0.9, Status::Entangled)] {
            assert_eq!(verdict(werner(p).unwrap().matrix(), &tol).unwrap().status, want, "p = {p}");
        }
    }

    #[test]
    fn not_a_state_inputs() {
        let tol = Tolerances::default();
        let v = verdict(&canonical_state([1.0, 0.8, 0.8, -0.8]), &tol).unwrap();
        assert_eq!(v.status, Status::NotAState);
        // cited in the diagonal frame; canonical signs are (1, -0.8, -0.8, -0.8)
        assert_eq!(v.failed_conditions, vec![3]);
        let mu = v.mu.unwrap();
        assert!((mu[1] + 0.8).abs() < 1e-12 && (mu[3] + 0.8).abs() < 1e-12);
        assert!(failed_state_conditions([1.0, -0.8, -0.8, -0.8], 1e-9) == vec![4]);

        let mut m = Matrix4::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert_eq!(verdict(&m, &tol).unwrap().status, Status::NotAState);
        assert_eq!(verdict(&Matrix4::zeros(), &tol).unwrap().status, Status::NotAState);
        let mut bad = Matrix4::identity() * C64::new(0.25, 0.0);
        bad[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(verdict(&bad, &tol).is_err());
    }

    #[test]
    fn partial_transpose_examples() {
        let tol = Tolerances::default();
        let r = lsvd(&MinkowskiMap::mixed(Matrix4::from_diagonal(&Vector4::new(1.0, 0.2, 0.1, 0.0))), &tol).unwrap();
        assert_eq!(partial_transpose_mu(&r), [-0.2, -0.1, -0.0]);
        assert!(state_conditions([1.0, -0.2, -0.1, 0.0], 0.0));
        let r = lsvd(&MinkowskiMap::mixed(Matrix4::identity()), &tol).unwrap();
        assert_eq!(partial_transpose_mu(&r), [-1.0, -1.0, -1.0]);
        assert!(!state_conditions([1.0, -1.0, -1.0, -1.0], 0.0));
    }

    #[test]
    fn agrees_with_ppt_on_random_states() {
        let tol = Tolerances::default();
        for seed in 0..500 {
            let rho = ginibre(seed);
            let v = verdict(rho.matrix(), &tol).unwrap();
            let p = ppt_verdict(&rho, 0.0);
            if v.near_boundary || p.near_boundary(1e-8) {
                continue;
            }
            let want = if p.status == PptStatus::Entangled { Status::Entangled } else { Status::Separable };
            assert_eq!(v.status, want, "seed {seed}");
        }
    }
}
