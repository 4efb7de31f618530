//! Cyclic Jacobi eigensolvers for small symmetric and Hermitian matrices.

use nalgebra::{Matrix4, SMatrix, SVector};

use crate::C64;

/// Relative off-diagonal threshold at which sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Eigen-decomposition `A = V diag(w) Vᵀ` of a real symmetric matrix by
/// cyclic Jacobi rotations. Eigenvalues are sorted ascending, eigenvectors
/// are the matching columns of `V`.
pub fn symmetric_eigen<const N: usize>(
    a: &SMatrix<f64, N, N>,
) -> (SVector<f64, N>, SMatrix<f64, N, N>) {
    let mut a = (a + a.transpose()) * 0.5;
    let mut v = SMatrix::<f64, N, N>::identity();
    let scale = a.norm();
    if scale == 0.0 {
        return (SVector::zeros(), v);
    }
    let stop = JACOBI_THRESHOLD * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= stop {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..N {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let w = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])]);
    let vs = SMatrix::<f64, N, N>::from_fn(|r, c| v[(r, order[c])]);
    (w, vs)
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Real 8×8 embedding `[[Re H, −Im H], [Im H, Re H]]` of a Hermitian matrix.
/// Its spectrum is that of `H` with every eigenvalue doubled.
fn embed(h: &Matrix4<C64>) -> SMatrix<f64, 8, 8> {
    SMatrix::<f64, 8, 8>::from_fn(|r, c| {
        let z = h[(r % 4, c % 4)];
        match (r < 4, c < 4) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn unembed(m: &SMatrix<f64, 8, 8>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| C64::new(0.5 * (m[(r, c)] + m[(r + 4, c + 4)]), 0.5 * (m[(r + 4, c)] - m[(r, c + 4)])))
}

/// Eigenvalues of a 4×4 Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &Matrix4<C64>) -> [f64; 4] {
    let (w, _) = symmetric_eigen(&embed(h));
    [
        0.5 * (w[0] + w[1]),
        0.5 * (w[2] + w[3]),
        0.5 * (w[4] + w[5]),
        0.5 * (w[6] + w[7]),
    ]
}

/// Replaces negative eigenvalues by zero and returns the reassembled matrix.
pub fn floor_negative_eigenvalues(h: &Matrix4<C64>) -> Matrix4<C64> {
    let (w, v) = symmetric_eigen(&embed(h));
    let clipped = SVector::<f64, 8>::from_fn(|i, _| w[i].max(0.0));
    let m = v * SMatrix::<f64, 8, 8>::from_diagonal(&clipped) * v.transpose();
    unembed(&m)
}
