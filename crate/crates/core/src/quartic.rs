//! Closed-form roots of monic cubic and quartic polynomials, used to
//! cross-validate the iterative Lorentzian eigen-decomposition.

use nalgebra::Matrix4;
use num_complex::Complex64;

/// Coefficients `[c0, c1, c2, c3]` of the characteristic polynomial
/// `det(λ − M) = λ⁴ + c3 λ³ + c2 λ² + c1 λ + c0` (Faddeev–LeVerrier).
pub fn characteristic_polynomial(m: &Matrix4<f64>) -> [f64; 4] {
    let id = Matrix4::<f64>::identity();
    let mut c = [0.0; 5];
    c[4] = 1.0;
    let mut mk = Matrix4::<f64>::zeros();
    for k in 1..=4 {
        mk = m * mk + id * c[5 - k];
        c[4 - k] = -(m * mk).trace() / k as f64;
    }
    [c[0], c[1], c[2], c[3]]
}

/// Coefficients of `Π (λ − rᵢ)` in the same layout as
/// [`characteristic_polynomial`].
pub fn polynomial_from_roots(r: &[f64; 4]) -> [f64; 4] {
    let e1 = r.iter().sum::<f64>();
    let mut e2 = 0.0;
    let mut e3 = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            e2 += r[i] * r[j];
            for k in (j + 1)..4 {
                e3 += r[i] * r[j] * r[k];
            }
        }
    }
    let e4 = r.iter().product::<f64>();
    [e4, -e3, e2, -e1]
}

/// Largest real root of `t³ + a t² + b t + c`.
pub fn cubic_max_real_root(a: f64, b: f64, c: f64) -> f64 {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let shift = -a / 3.0;
    let mut t = if disc > 0.0 {
        let sd = disc.sqrt();
        (-q / 2.0 + sd).cbrt() + (-q / 2.0 - sd).cbrt() + shift
    } else if p == 0.0 {
        shift
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        r * (arg.acos() / 3.0).cos() + shift
    };
    // Newton polish
    for _ in 0..3 {
        let f = ((t + a) * t + b) * t + c;
        let df = (3.0 * t + 2.0 * a) * t + b;
        if df.abs() < f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        t -= step;
    }
    t
}

/// All four roots of `x⁴ + a x³ + b x² + c x + d` (Ferrari's method).
pub fn quartic_roots(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 4] {
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    let shift = Complex64::new(-a / 4.0, 0.0);
    let scale = 1.0 + p.abs() + q.abs().sqrt() + r.abs().sqrt();

    let ys: [Complex64; 4] = if q.abs() <= 1e-14 * scale * scale.sqrt() {
        let disc = Complex64::new(p * p - 4.0 * r, 0.0).sqrt();
        let z1 = (-p + disc) / 2.0;
        let z2 = (-p - disc) / 2.0;
        [z1.sqrt(), -z1.sqrt(), z2.sqrt(), -z2.sqrt()]
    } else {
        // resolvent 8m³ + 8p m² + (2p² − 8r) m − q² = 0 has a positive root
        let m = cubic_max_real_root(p, (p * p - 4.0 * r) / 4.0, -q * q / 8.0).max(f64::MIN_POSITIVE);
        let s = (2.0 * m).sqrt();
        let k1 = p / 2.0 + m + q / (2.0 * s);
        let k2 = p / 2.0 + m - q / (2.0 * s);
        let d1 = Complex64::new(s * s - 4.0 * k1, 0.0).sqrt();
        let d2 = Complex64::new(s * s - 4.0 * k2, 0.0).sqrt();
        [(s + d1) / 2.0, (s - d1) / 2.0, (-s + d2) / 2.0, (-s - d2) / 2.0]
    };
    let poly = |x: Complex64| (((x + a) * x + b) * x + c) * x + d;
    let dpoly = |x: Complex64| ((4.0 * x + 3.0 * a) * x + 2.0 * b) * x + c;
    ys.map(|y| {
        let mut x = y + shift;
        for _ in 0..2 {
            let df = dpoly(x);
            if df.norm() <= f64::EPSILON * (1.0 + x.norm()).powi(3) {
                break;
            }
            let nx = x - poly(x) / df;
            if nx.re.is_finite() && nx.im.is_finite() && poly(nx).norm() < poly(x).norm() {
                x = nx;
            }
        }
        x
    })
}

/// Real parts of the quartic roots sorted descending. Intended for
/// polynomials known to have a real spectrum.
pub fn real_roots_descending(coeffs: &[f64; 4]) -> [f64; 4] {
    let [c0, c1, c2, c3] = *coeffs;
    let mut r = quartic_roots(c3, c2, c1, c0).map(|z| z.re);
    r.sort_by(|x, y| y.total_cmp(x));
    r
}
