use serde::{Deserialize, Serialize};

/// Numerical thresholds shared across the pipeline.
///
/// All tolerances are relative to a natural scale of the quantity being
/// tested (trace of ρ, μ₀, or the Frobenius norm of the tensor).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Causal classification, relative to `max(1, (v⁰)²)`.
    pub causal: f64,
    /// Hermiticity check, relative to the largest entry.
    pub hermitian: f64,
    /// Negative eigenvalues of ρ down to `-psd·trace` are floored to zero.
    pub psd: f64,
    /// Singular values below `rank·μ₀` are treated as zero.
    pub rank: f64,
    /// Type-II detection: degeneracy and Jordan residual, relative to μ₀.
    pub jordan: f64,
    /// Eigenvector lightlike threshold `|e·e| ≤ lightlike·(e⁰)²`.
    pub lightlike: f64,
    /// Verdicts with `|margin| ≤ boundary` (μ₀ = 1 scale) are flagged.
    pub boundary: f64,
    /// Slack for the four state inequalities, relative to μ₀.
    pub state: f64,
    /// Sign class is Boundary when `|μ₁μ₂μ₃| ≤ sign·μ₀³`.
    pub sign: f64,
    /// Quartic cross-validation mismatch that flags ill-conditioning.
    pub quartic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            causal: 1e-9,
            hermitian: 1e-10,
            psd: 1e-9,
            rank: 1e-10,
            jordan: 1e-8,
            lightlike: 1e-8,
            boundary: 1e-8,
            state: 1e-9,
            sign: 1e-10,
            quartic: 1e-7,
        }
    }
}

impl Tolerances {
    /// Zero boundary band: verdicts are reported from raw signs.
    pub fn strict() -> Self {
        Self {
            boundary: 0.0,
            ..Self::default()
        }
    }
}
