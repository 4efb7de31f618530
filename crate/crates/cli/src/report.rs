use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use plt_core::classify::{energy_conditions_with, verdict_from_lsvd, DEFAULT_FUZZ_SAMPLES};
use plt_core::io::{parse_csv, parse_json};
use plt_core::jacobi::hermitian_eigenvalues;
use plt_core::oracle::{partial_transpose_matrix, PptStatus};
use plt_core::qubit_map::{coefficients, hermitian_defect};
use plt_core::separate::DecompositionCheck;
use plt_core::{
    lsvd, reconstruct_a, separable_decomposition, verdict, verify_decomposition, DensityMatrix, EnergyReport,
    LsvdResult, MinkowskiMap, SeparableDecomposition, Status, Tolerances, Verdict, C64,
};

/// Residual above which a reconstruction or decomposition counts as an
/// internal failure.
pub const CHECK_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
    pub format: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PptCheck {
    pub status: PptStatus,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// Either test sits inside its boundary band; agreement is not required.
    pub excluded: bool,
    pub agrees: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub decomposition: SeparableDecomposition,
    pub check: DecompositionCheck,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Timings {
    pub parse_us: u64,
    pub lsvd_us: u64,
    pub verdict_us: u64,
    pub energy_us: u64,
    pub decomposition_us: u64,
    pub ppt_us: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Checks {
    /// `‖A − Λ₁ K Λ₂ᵀ‖_F / ‖A‖_F`.
    pub reconstruction_residual: Option<f64>,
    /// The verdict recomputed from the embedded decomposition matches.
    pub verdict_recomputable: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: Input,
    /// `A_μν = Tr(ρ σ_μ⊗σ_ν)` of the Hermitian part.
    pub a_tensor: [[f64; 4]; 4],
    pub lsvd: Option<LsvdResult>,
    pub verdict: Verdict,
    pub energy: Option<EnergyReport>,
    pub decomposition: Option<Decomposition>,
    pub ppt: Option<PptCheck>,
    pub checks: Checks,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl AnalysisReport {
    pub fn passed_checks(&self) -> bool {
        self.checks.failures.is_empty()
    }
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

pub struct Loaded {
    pub input: Input,
    pub matrix: Matrix4<C64>,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let csv = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let matrix = if csv { parse_csv(text)? } else { parse_json(text)? };
    Ok(Loaded {
        input: Input {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
            format: if csv { "csv" } else { "json" }.into(),
        },
        matrix,
    })
}

fn hermitian_part(m: &Matrix4<C64>) -> Matrix4<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn ppt_check(h: &Matrix4<C64>, v: &Verdict, band: f64) -> PptCheck {
    let trace = h.trace().re;
    let min_eigenvalue = hermitian_eigenvalues(&partial_transpose_matrix(h))[0];
    let status = if min_eigenvalue < 0.0 { PptStatus::Entangled } else { PptStatus::Separable };
    let expected = match status {
        PptStatus::Separable => Status::Separable,
        PptStatus::Entangled => Status::Entangled,
    };
    let excluded = v.near_boundary || min_eigenvalue.abs() <= band * trace;
    PptCheck { status, min_eigenvalue, trace, excluded, agrees: v.status == expected }
}

pub struct Options {
    pub tol: Tolerances,
    pub all_null: bool,
    pub fuzz_samples: usize,
    pub seed: u64,
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: Tolerances::default(),
            all_null: false,
            fuzz_samples: DEFAULT_FUZZ_SAMPLES,
            seed: 0,
            timings: true,
        }
    }
}

pub fn analyze(loaded: Loaded, parse_us: u64, opts: &Options) -> Result<AnalysisReport> {
    let tol = &opts.tol;
    let mut timings = Timings { parse_us, ..Timings::default() };
    let mut failures = Vec::new();

    let t = Instant::now();
    let v = verdict(&loaded.matrix, tol)?;
    timings.verdict_us = micros(t);

    let h = hermitian_part(&loaded.matrix);
    let a = MinkowskiMap::both_lower(coefficients(&h));
    let hermitian = hermitian_defect(&loaded.matrix) <= tol.hermitian;

    let t = Instant::now();
    let decomposed = if hermitian { lsvd(&a, tol).ok() } else { None };
    timings.lsvd_us = micros(t);

    let reconstruction_residual = decomposed
        .as_ref()
        .map(|r| (reconstruct_a(r).matrix() - a.matrix()).norm() / a.matrix().norm());
    if let Some(res) = reconstruction_residual {
        if res > CHECK_RESIDUAL {
            failures.push(format!("reconstruction residual {res:e}"));
        }
    }

    // The verdict must follow from the embedded decomposition alone.
    let verdict_recomputable = match &decomposed {
        Some(r) => {
            let trace = h.trace().re;
            let min_ev = hermitian_eigenvalues(&h)[0];
            let negative = (min_ev < -tol.psd * trace).then_some(min_ev / trace);
            let again = verdict_from_lsvd(r, negative, tol);
            again.status == v.status && again.margin == v.margin
        }
        None => v.state_type.is_none(),
    };
    if !verdict_recomputable {
        failures.push("verdict differs from the one recomputed from the LSVD".into());
    }

    let t = Instant::now();
    let energy = decomposed.as_ref().map(|r| energy_conditions_with(r, tol, opts.fuzz_samples, opts.seed));
    timings.energy_us = micros(t);

    let t = Instant::now();
    let decomposition = match (&decomposed, v.status) {
        (Some(r), Status::Separable) => {
            let d = separable_decomposition(r, opts.all_null, tol)?;
            let check = verify_decomposition(&d, &DensityMatrix::new(h, tol.psd)?);
            if check.residual > CHECK_RESIDUAL || !check.all_factors_causal || !check.weights_positive {
                failures.push(format!("decomposition check failed (residual {:e})", check.residual));
            }
            Some(Decomposition { decomposition: d, check })
        }
        _ => None,
    };
    timings.decomposition_us = micros(t);

    let t = Instant::now();
    let ppt = (v.status != Status::NotAState).then(|| ppt_check(&h, &v, tol.boundary));
    timings.ppt_us = micros(t);
    if let Some(p) = &ppt {
        if !p.excluded && !p.agrees {
            failures.push(format!("PPT oracle disagrees (min eigenvalue {:e})", p.min_eigenvalue));
        }
    }

    let c = a.matrix();
    Ok(AnalysisReport {
        input: loaded.input,
        a_tensor: std::array::from_fn(|r| std::array::from_fn(|col| c[(r, col)])),
        lsvd: decomposed,
        verdict: v,
        energy,
        decomposition,
        ppt,
        checks: Checks { reconstruction_residual, verdict_recomputable, failures },
        tolerances: *tol,
        timings: opts.timings.then_some(timings),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use plt_core::io::to_json;
    use plt_core::oracle::bell_projector;
    use plt_core::oracle::BellVariant;

    fn loaded(m: Matrix4<C64>) -> Loaded {
        Loaded { input: Input { path: "-".into(), sha256: String::new(), format: "json".into() }, matrix: m }
    }

    #[test]
    fn bell_report_is_consistent() {
        let r = analyze(loaded(bell_projector(BellVariant::PsiMinus)), 0, &Options::default()).unwrap();
        assert_eq!(r.verdict.status, Status::Entangled);
        assert!(r.passed_checks(), "{:?}", r.checks);
        assert!(r.decomposition.is_none());
        assert!(r.ppt.unwrap().agrees);
    }

    #[test]
    fn non_hermitian_input_has_no_lsvd() {
        let mut m = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        let r = analyze(loaded(m), 0, &Options::default()).unwrap();
        assert_eq!(r.verdict.status, Status::NotAState);
        assert!(r.lsvd.is_none() && r.ppt.is_none());
    }

    #[test]
    fn digest_is_of_file_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        let text = to_json(&(Matrix4::<C64>::identity() * C64::new(0.25, 0.0)));
        std::fs::write(&p, &text).unwrap();
        let l = load(&p).unwrap();
        assert_eq!(l.input.sha256, hex::encode(Sha256::digest(text.as_bytes())));
    }
}
