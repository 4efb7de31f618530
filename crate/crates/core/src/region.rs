//! The state set in μ-space at `μ₀ = 1`.
//!
//! States fill the tetrahedron with vertices at the four Bell points
//! `P = (1,1,1)`, `(1,−1,−1)`, `(−1,1,−1)`, `(−1,−1,1)`. In the positive
//! octant the plane through `i, j, k` cuts off the entangled corner
//! `{P, i, j, k}`; the separable parts there are `S⁺ = {O, i, j, k}` and,
//! in the negative octant, `S⁻ = {O, −i, −j, −k}`. Jordan-form states sit
//! on the edges `i→P`, `j→P`, `k→P`.

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::classify::{state_eigenvalues, Status};
use crate::error::{Error, Result};
use crate::jacobi;
use crate::oracle::partial_transpose_matrix;
use crate::qubit_map::{a_to_rho, canonical_state, MinkowskiMap};
use crate::C64;

/// Classification slack for grid points; grid coordinates are only exact
/// to rounding.
pub const SCAN_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    TypeI,
    /// On a Jordan edge, assembled with unit coupling.
    TypeII,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub mu: [f64; 3],
    pub kind: PointKind,
    /// From the state inequalities and the SEC.
    pub status: Status,
    /// From eigensolving the assembled ρ and its partial transpose.
    pub eigen_status: Status,
}

impl RegionPoint {
    pub fn agrees(&self) -> bool {
        self.status == self.eigen_status
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub k: usize,
    pub full_cube: bool,
    pub type_ii: bool,
}

/// `k` equally spaced values on `[−1, 1]`.
pub fn grid_axis(k: usize) -> Vec<f64> {
    (0..k).map(|i| -1.0 + 2.0 * i as f64 / (k - 1) as f64).collect()
}

/// Status of the Type-I point `(1, μ₁, μ₂, μ₃)` from the inequalities.
pub fn classify_point(mu: [f64; 3], eps: f64) -> Status {
    let full = [1.0, mu[0], mu[1], mu[2]];
    if state_eigenvalues(full).iter().any(|e| *e < -eps) {
        return Status::NotAState;
    }
    let det = mu[0] * mu[1] * mu[2];
    let margin = 1.0 - mu.iter().map(|m| m.abs()).sum::<f64>();
    if det > 0.0 && margin < -eps {
        Status::Entangled
    } else {
        Status::Separable
    }
}

/// Status from the spectrum of ρ and of its partial transpose.
pub fn classify_by_spectrum(rho: &Matrix4<C64>, eps: f64) -> Status {
    let trace = rho.trace().re;
    if jacobi::hermitian_eigenvalues(rho)[0] < -eps * trace {
        return Status::NotAState;
    }
    if jacobi::hermitian_eigenvalues(&partial_transpose_matrix(rho))[0] < -eps * trace {
        Status::Entangled
    } else {
        Status::Separable
    }
}

/// Jordan-form state `μ₀(T T − X X) + x X₊X₊ − μ₂(Y Y + Z Z)` in
/// coefficient form, identity frames.
pub fn jordan_state(mu0: f64, x: f64, mu2: f64) -> Matrix4<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let xp = Vector4::new(s, s, 0.0, 0.0);
    let c = Matrix4::from_diagonal(&Vector4::new(mu0, -mu0, -mu2, -mu2)) + xp * xp.transpose() * x;
    a_to_rho(&MinkowskiMap::both_lower(c))
}

/// Status of a point on a Jordan edge: a state iff `0 ≤ t ≤ 1`,
/// entangled iff `t > 0`.
fn classify_jordan(t: f64, eps: f64) -> Status {
    if t < -eps || t > 1.0 + eps {
        Status::NotAState
    } else if t > eps {
        Status::Entangled
    } else {
        Status::Separable
    }
}

fn in_reported_octants(mu: &[f64; 3]) -> bool {
    mu.iter().all(|m| *m >= 0.0) || mu.iter().all(|m| *m <= 0.0)
}

pub fn scan(opts: &ScanOptions) -> Result<Vec<RegionPoint>> {
    if opts.k < 2 {
        return Err(Error::InvalidParameter(format!("grid resolution k = {} must be at least 2", opts.k)));
    }
    let axis = grid_axis(opts.k);
    let mut out = Vec::new();
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                let mu = [a, b, c];
                if !opts.full_cube && !in_reported_octants(&mu) {
                    continue;
                }
                out.push(RegionPoint {
                    mu,
                    kind: PointKind::TypeI,
                    status: classify_point(mu, SCAN_EPS),
                    eigen_status: classify_by_spectrum(&canonical_state([1.0, a, b, c]), SCAN_EPS),
                });
            }
        }
    }
    if opts.type_ii {
        for &t in axis.iter().filter(|t| **t >= 0.0) {
            let rho = jordan_state(1.0, 1.0, t);
            let status = classify_jordan(t, SCAN_EPS);
            let eigen_status = classify_by_spectrum(&rho, SCAN_EPS);
            for mu in [[1.0, t, t], [t, 1.0, t], [t, t, 1.0]] {
                out.push(RegionPoint { mu, kind: PointKind::TypeII, status, eigen_status });
            }
        }
    }
    Ok(out)
}

/// Barycentric test for the open tetrahedron with the given vertices.
pub fn in_open_tetrahedron(p: [f64; 3], v: [[f64; 3]; 4], margin: f64) -> bool {
    let p = Vector3::from(p);
    let [a, b, c, d] = v.map(Vector3::from);
    let m = nalgebra::Matrix3::from_columns(&[b - a, c - a, d - a]);
    let Some(inv) = m.try_inverse() else {
        return false;
    };
    let l = inv * (p - a);
    let l0 = 1.0 - l.sum();
    l0 > margin && l.iter().all(|x| *x > margin)
}

pub const VERTEX_P: [f64; 3] = [1.0, 1.0, 1.0];
pub const ORIGIN: [f64; 3] = [0.0, 0.0, 0.0];
pub const UNIT_I: [f64; 3] = [1.0, 0.0, 0.0];
pub const UNIT_J: [f64; 3] = [0.0, 1.0, 0.0];
pub const UNIT_K: [f64; 3] = [0.0, 0.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionVolumes {
    pub separable_positive: f64,
    pub separable_negative: f64,
    pub entangled_positive: f64,
    pub states: f64,
}

/// Volumes of the regions by counting cell centres of a `k`-point grid.
pub fn region_volumes(k: usize) -> Result<RegionVolumes> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    let h = 2.0 / (k - 1) as f64;
    let centres: Vec<f64> = (0..k - 1).map(|i| -1.0 + h * (i as f64 + 0.5)).collect();
    let mut v = RegionVolumes { separable_positive: 0.0, separable_negative: 0.0, entangled_positive: 0.0, states: 0.0 };
    let cell = h * h * h;
    for &a in &centres {
        for &b in &centres {
            for &c in &centres {
                let mu = [a, b, c];
                let status = classify_point(mu, 0.0);
                if status == Status::NotAState {
                    continue;
                }
                v.states += cell;
                let pos = mu.iter().all(|m| *m > 0.0);
                let neg = mu.iter().all(|m| *m < 0.0);
                match status {
                    Status::Separable if pos => v.separable_positive += cell,
                    Status::Separable if neg => v.separable_negative += cell,
                    Status::Entangled if pos => v.entangled_positive += cell,
                    _ => {}
                }
            }
        }
    }
    Ok(v)
}
