use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use plt_core::io::{to_csv, to_json};
use plt_core::oracle::{make_state, random_mixed, split_seed, BellVariant, PptStatus, StateRecipe};
use plt_core::region::{region_volumes, scan, PointKind, RegionVolumes, ScanOptions};
use plt_core::separate::DecompositionCheck;
use plt_core::{
    lsvd, ppt_verdict, rho_to_a, separable_decomposition, verdict, verify_decomposition, DensityMatrix,
    SeparableDecomposition, StateType, Status, Tolerances,
};

use crate::report::{self, Options, CHECK_RESIDUAL};
use crate::{exit_for, EXIT_CHECK, EXIT_USAGE};

/// Every tolerance, overridable one at a time.
#[derive(Args, Clone, Debug, Default)]
pub struct TolArgs {
    /// Zero the boundary band and report raw signs.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_name = "TOL")]
    tol_causal: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_hermitian: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_psd: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_rank: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_jordan: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_lightlike: Option<f64>,
    /// Margins within this band (μ₀ = 1) are flagged near_boundary.
    #[arg(long, value_name = "TOL")]
    tol_boundary: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_state: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_sign: Option<f64>,
    #[arg(long, value_name = "TOL")]
    tol_quartic: Option<f64>,
}

impl TolArgs {
    pub fn resolve(&self) -> Result<Tolerances, String> {
        let mut t = if self.strict { Tolerances::strict() } else { Tolerances::default() };
        let fields = [
            (self.tol_causal, &mut t.causal, "causal"),
            (self.tol_hermitian, &mut t.hermitian, "hermitian"),
            (self.tol_psd, &mut t.psd, "psd"),
            (self.tol_rank, &mut t.rank, "rank"),
            (self.tol_jordan, &mut t.jordan, "jordan"),
            (self.tol_lightlike, &mut t.lightlike, "lightlike"),
            (self.tol_boundary, &mut t.boundary, "boundary"),
            (self.tol_state, &mut t.state, "state"),
            (self.tol_sign, &mut t.sign, "sign"),
            (self.tol_quartic, &mut t.quartic, "quartic"),
        ];
        for (value, slot, name) in fields {
            if let Some(v) = value {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(format!("--tol-{name} must be a finite non-negative number"));
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Args)]
pub struct AnalyzeArgs {
    file: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Split timelike factors into pure (null) ones.
    #[arg(long)]
    all_null: bool,
    /// Null pairs sampled for the DEC check.
    #[arg(long, default_value_t = plt_core::classify::DEFAULT_FUZZ_SAMPLES)]
    fuzz_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave out wall-clock timings so output is reproducible.
    #[arg(long)]
    no_timings: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
pub struct DecomposeArgs {
    file: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Split timelike factors into pure (null) ones.
    #[arg(long)]
    all_null: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
pub struct CrosscheckArgs {
    /// Number of random states.
    #[arg(short, long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fix the rank; by default ranks cycle through 1..=4.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    rank: Option<u8>,
    /// Exclusion band for both the margin and the PPT eigenvalue.
    #[arg(long, default_value_t = 1e-8)]
    band: f64,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
pub struct ScanArgs {
    /// Grid points per axis.
    #[arg(short, default_value_t = 41)]
    k: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// All eight octants instead of the positive and negative ones.
    #[arg(long)]
    full_cube: bool,
    /// Add the Jordan-form edges from i, j, k to P.
    #[arg(long)]
    type_ii: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SampleKind {
    Werner,
    Bell,
    Product,
    RandomMixed,
    RandomPure,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    kind: SampleKind,
    /// Werner weight of |Φ⁺⟩; `--variant` applies to `--kind bell`.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_enum, default_value = "psi-minus")]
    variant: Bell,
    /// Bloch vector of the first qubit, `x,y,z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u: Option<Vec<f64>>,
    /// Bloch vector of the second qubit, `x,y,z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    rank: usize,
    /// `.csv` selects the CSV format; anything else is JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

/// Parse and parameter problems are usage errors; anything else is an
/// internal failure.
fn failure(e: anyhow::Error) -> u8 {
    match e.downcast_ref::<plt_core::Error>() {
        Some(plt_core::Error::Parse(_) | plt_core::Error::InvalidParameter(_) | plt_core::Error::NonFinite) => usage(e),
        _ if e.downcast_ref::<io::Error>().is_some() => usage(e),
        _ => {
            eprintln!("error: {e:#}");
            EXIT_CHECK
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn fmt_margin(m: Option<f64>) -> String {
    m.map_or_else(|| "n/a".into(), |m| format!("{m:.6e}"))
}

pub fn analyze(a: &AnalyzeArgs) -> u8 {
    let tol = match a.tol.resolve() {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let t = Instant::now();
    let loaded = match report::load(&a.file) {
        Ok(l) => l,
        Err(e) => return usage(format!("{e:#}")),
    };
    let parse_us = t.elapsed().as_micros() as u64;
    let opts = Options { tol, all_null: a.all_null, fuzz_samples: a.fuzz_samples, seed: a.seed, timings: !a.no_timings };
    let r = match report::analyze(loaded, parse_us, &opts) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    if let Err(e) = write_out(a.output.as_deref(), &json(&r)) {
        return usage(e);
    }
    let v = &r.verdict;
    eprintln!(
        "{:?}: margin {}, type {}, near boundary {}",
        v.status,
        fmt_margin(v.margin),
        v.state_type.map_or_else(|| "n/a".into(), |t| format!("{t:?}")),
        v.near_boundary
    );
    if !v.failed_conditions.is_empty() {
        eprintln!("violated positivity inequalities: {:?}", v.failed_conditions);
    }
    if let Some(reason) = &v.reason {
        eprintln!("reason: {reason}");
    }
    if !r.passed_checks() {
        for f in &r.checks.failures {
            eprintln!("check failed: {f}");
        }
        return EXIT_CHECK;
    }
    exit_for(v.status)
}

#[derive(Serialize)]
struct DecomposeOutput {
    status: Status,
    margin: Option<f64>,
    state_type: Option<StateType>,
    near_boundary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<SeparableDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<DecompositionCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refusal: Option<String>,
}

pub fn decompose(a: &DecomposeArgs) -> u8 {
    let tol = match a.tol.resolve() {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let loaded = match report::load(&a.file) {
        Ok(l) => l,
        Err(e) => return usage(format!("{e:#}")),
    };
    let v = match verdict(&loaded.matrix, &tol) {
        Ok(v) => v,
        Err(e) => return failure(e.into()),
    };
    let mut out = DecomposeOutput {
        status: v.status,
        margin: v.margin,
        state_type: v.state_type,
        near_boundary: v.near_boundary,
        decomposition: None,
        check: None,
        refusal: None,
    };
    let mut code = exit_for(v.status);
    if v.status == Status::Separable {
        let attempt = DensityMatrix::new(loaded.matrix, tol.psd).map_err(anyhow::Error::from).and_then(|rho| {
            let r = lsvd(&rho_to_a(&rho), &tol)?;
            let d = separable_decomposition(&r, a.all_null, &tol)?;
            let check = verify_decomposition(&d, &rho);
            Ok((d, check))
        });
        match attempt {
            Ok((d, check)) => {
                if check.residual > CHECK_RESIDUAL || !check.all_factors_causal || !check.weights_positive {
                    eprintln!("check failed: decomposition residual {:e}", check.residual);
                    code = EXIT_CHECK;
                }
                eprintln!("{} terms, residual {:.3e}", d.terms.len(), check.residual);
                out.decomposition = Some(d);
                out.check = Some(check);
            }
            Err(e) => return failure(e),
        }
    } else {
        let why = match v.status {
            Status::Entangled => format!("entangled, margin {}", fmt_margin(v.margin)),
            _ => format!("not a state{}", v.reason.as_deref().map(|r| format!(": {r}")).unwrap_or_default()),
        };
        eprintln!("refused: {why}");
        out.refusal = Some(why);
    }
    if let Err(e) = write_out(a.output.as_deref(), &json(&out)) {
        return usage(e);
    }
    code
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Outcome {
    Agree,
    Disagree,
    Excluded,
}

#[derive(Serialize)]
struct Disagreement {
    index: usize,
    seed: u64,
    rank: usize,
    verdict: Status,
    ppt: PptStatus,
}

#[derive(Serialize)]
struct CrosscheckSummary {
    n: usize,
    seed: u64,
    agree: usize,
    disagree: usize,
    excluded: usize,
    entangled: usize,
    entangled_fraction: f64,
    disagreements: Vec<Disagreement>,
}

pub fn crosscheck(a: &CrosscheckArgs) -> u8 {
    if a.n == 0 {
        return usage("-n must be at least 1");
    }
    let tol = match a.tol.resolve() {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let rows: Vec<_> = (0..a.n)
        .into_par_iter()
        .map(|i| {
            let seed = split_seed(a.seed, i as u64);
            let rank = a.rank.map_or(1 + i % 4, usize::from);
            let rho = random_mixed(seed, rank)?;
            let v = verdict(rho.matrix(), &tol)?;
            let p = ppt_verdict(&rho, 0.0);
            let expected = match p.status {
                PptStatus::Separable => Status::Separable,
                PptStatus::Entangled => Status::Entangled,
            };
            let outcome = if v.near_boundary || p.near_boundary(a.band) {
                Outcome::Excluded
            } else if v.status == expected {
                Outcome::Agree
            } else {
                Outcome::Disagree
            };
            Ok::<_, plt_core::Error>((i, seed, rank, v.status, p.status, outcome))
        })
        .collect();
    let mut summary = CrosscheckSummary {
        n: a.n,
        seed: a.seed,
        agree: 0,
        disagree: 0,
        excluded: 0,
        entangled: 0,
        entangled_fraction: 0.0,
        disagreements: Vec::new(),
    };
    for row in rows {
        let (index, seed, rank, status, ppt, outcome) = match row {
            Ok(r) => r,
            Err(e) => return failure(e.into()),
        };
        summary.entangled += usize::from(ppt == PptStatus::Entangled);
        match outcome {
            Outcome::Agree => summary.agree += 1,
            Outcome::Excluded => summary.excluded += 1,
            Outcome::Disagree => {
                summary.disagree += 1;
                summary.disagreements.push(Disagreement { index, seed, rank, verdict: status, ppt });
            }
        }
    }
    summary.entangled_fraction = summary.entangled as f64 / a.n as f64;
    let text = if a.json {
        json(&summary)
    } else {
        let mut s = format!(
            "states     {}\nseed       {}\nagree      {}\ndisagree   {}\nexcluded   {}\nentangled  {} ({:.4})\n",
            summary.n,
            summary.seed,
            summary.agree,
            summary.disagree,
            summary.excluded,
            summary.entangled,
            summary.entangled_fraction
        );
        for d in &summary.disagreements {
            s.push_str(&format!(
                "  #{} seed {} rank {}: verdict {:?}, ppt {:?}\n",
                d.index, d.seed, d.rank, d.verdict, d.ppt
            ));
        }
        s
    };
    if let Err(e) = write_out(None, &text) {
        return usage(e);
    }
    if summary.disagree > 0 {
        EXIT_CHECK
    } else {
        0
    }
}

fn class_label(status: Status, kind: PointKind) -> &'static str {
    match (kind, status) {
        (PointKind::TypeI, Status::Separable) => "separable",
        (PointKind::TypeI, Status::Entangled) => "entangled",
        (PointKind::TypeI, Status::NotAState) => "not_a_state",
        (PointKind::TypeII, Status::Separable) => "separable_type_ii",
        (PointKind::TypeII, Status::Entangled) => "entangled_type_ii",
        (PointKind::TypeII, Status::NotAState) => "not_a_state_type_ii",
    }
}

fn write_scan(w: impl Write, points: &[plt_core::region::RegionPoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["mu1", "mu2", "mu3", "class"])?;
    for p in points {
        w.write_record([
            p.mu[0].to_string(),
            p.mu[1].to_string(),
            p.mu[2].to_string(),
            class_label(p.status, p.kind).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn describe_volumes(v: &RegionVolumes) -> String {
    format!(
        "volumes (cell centres): S+ {:.4}, S- {:.4}, entangled {:.4}, states {:.4}",
        v.separable_positive, v.separable_negative, v.entangled_positive, v.states
    )
}

pub fn scan_region(a: &ScanArgs) -> u8 {
    let points = match scan(&ScanOptions { k: a.k, full_cube: a.full_cube, type_ii: a.type_ii }) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let written = match &a.output {
        Some(p) => File::create(p).map_err(csv::Error::from).and_then(|f| write_scan(f, &points)),
        None => write_scan(io::stdout().lock(), &points),
    };
    if let Err(e) = written {
        return usage(e);
    }
    let disagreements: Vec<_> = points.iter().filter(|p| !p.agrees()).collect();
    let count = |s: Status| points.iter().filter(|p| p.status == s).count();
    eprintln!(
        "{} points: {} separable, {} entangled, {} not a state, {} eigensolve disagreements",
        points.len(),
        count(Status::Separable),
        count(Status::Entangled),
        count(Status::NotAState),
        disagreements.len()
    );
    if let Ok(v) = region_volumes(a.k) {
        eprintln!("{}", describe_volumes(&v));
    }
    for p in &disagreements {
        eprintln!("  disagreement at {:?}: {:?} vs {:?}", p.mu, p.status, p.eigen_status);
    }
    if disagreements.is_empty() {
        0
    } else {
        EXIT_CHECK
    }
}

fn bloch(v: &Option<Vec<f64>>, name: &str) -> Result<[f64; 3], String> {
    match v.as_deref() {
        Some([x, y, z]) => Ok([*x, *y, *z]),
        Some(_) => Err(format!("--{name} takes three components")),
        None => Err(format!("--kind product needs --{name}")),
    }
}

pub fn sample(a: &SampleArgs) -> u8 {
    let recipe = match a.kind {
        SampleKind::Werner => match a.p {
            Some(p) => StateRecipe::Werner { p },
            None => return usage("--kind werner needs --p"),
        },
        SampleKind::Bell => StateRecipe::Bell {
            variant: match a.variant {
                Bell::PhiPlus => BellVariant::PhiPlus,
                Bell::PhiMinus => BellVariant::PhiMinus,
                Bell::PsiPlus => BellVariant::PsiPlus,
                Bell::PsiMinus => BellVariant::PsiMinus,
            },
        },
        SampleKind::Product => match (bloch(&a.u, "u"), bloch(&a.v, "v")) {
            (Ok(u), Ok(v)) => StateRecipe::Product { u, v },
            (Err(e), _) | (_, Err(e)) => return usage(e),
        },
        SampleKind::RandomMixed => StateRecipe::RandomMixed { seed: a.seed, rank: a.rank },
        SampleKind::RandomPure => StateRecipe::RandomPure { seed: a.seed },
    };
    let rho = match make_state(&recipe) {
        Ok(r) => r,
        Err(e) => return failure(e.into()),
    };
    let csv = a
        .output
        .as_deref()
        .and_then(|p| p.extension())
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let text = if csv { to_csv(rho.matrix()) } else { to_json(rho.matrix()) + "\n" };
    match write_out(a.output.as_deref(), &text) {
        Ok(()) => 0,
        Err(e) => usage(e),
    }
}
