//! Minkowski space primitives with signature (+, −, −, −).

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the rapidity of random boosts.
pub const DEFAULT_MAX_RAPIDITY: f64 = 3.0;

/// The Minkowski metric `diag(1, -1, -1, -1)`.
pub fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// Real contravariant four-vector; index 0 is time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourVector(pub [f64; 4]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    FutureTimelike,
    FutureLightlike,
    PastTimelike,
    PastLightlike,
    Spacelike,
    Zero,
}

impl CausalClass {
    pub fn is_future_causal(self) -> bool {
        matches!(self, CausalClass::FutureTimelike | CausalClass::FutureLightlike)
    }
}

pub fn minkowski_dot(u: &FourVector, v: &FourVector) -> f64 {
    u.dot(v)
}

impl FourVector {
    pub const TIME: FourVector = FourVector([1.0, 0.0, 0.0, 0.0]);

    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        FourVector([v[0], v[1], v[2], v[3]])
    }

    /// Null vector `(1, n̂)/√2` for a unit spatial direction.
    pub fn null_along(dir: &Vector3<f64>) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        FourVector([s, s * dir[0], s * dir[1], s * dir[2]])
    }

    pub fn to_vector(&self) -> Vector4<f64> {
        Vector4::new(self.0[0], self.0[1], self.0[2], self.0[3])
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        let (a, b) = (&self.0, &other.0);
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    }

    /// Minkowski square `v·v`.
    pub fn interval(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Index-lowered components `g v`.
    pub fn lowered(&self) -> Self {
        FourVector([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Causal character of the vector.
    ///
    /// `v·v` is compared against `tol·‖v‖²` (Euclidean), which makes the
    /// lightlike band independent of the overall scale of `v`.
    pub fn causal_class(&self, tol: f64) -> CausalClass {
        let norm = self.euclidean_norm();
        if norm <= tol {
            return CausalClass::Zero;
        }
        let band = tol * norm * norm;
        let s = self.interval();
        let future = self.0[0] > 0.0;
        if s > band {
            if future {
                CausalClass::FutureTimelike
            } else {
                CausalClass::PastTimelike
            }
        } else if s >= -band {
            if future {
                CausalClass::FutureLightlike
            } else {
                CausalClass::PastLightlike
            }
        } else {
            CausalClass::Spacelike
        }
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.map(|c| -c))
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector(self.0.map(|c| c * s))
    }
}

impl Mul<FourVector> for f64 {
    type Output = FourVector;
    fn mul(self, v: FourVector) -> FourVector {
        v * self
    }
}

impl fmt::Display for FourVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.0;
        write!(f, "({}, {}, {}, {})", c[0], c[1], c[2], c[3])
    }
}

/// Proper orthochronous Lorentz transformation `S^μ_ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzTransform(Matrix4<f64>);

impl LorentzTransform {
    pub fn identity() -> Self {
        LorentzTransform(Matrix4::identity())
    }

    /// Checked constructor: `SᵀgS = g`, `det S = +1`, `S⁰₀ ≥ 1` within `tol`.
    pub fn new(m: Matrix4<f64>, tol: f64) -> Result<Self> {
        let g = metric();
        let scale = m.norm_squared().max(1.0);
        let dev = (m.transpose() * g * m - g).abs().max();
        if dev > tol * scale {
            return Err(Error::ImproperTransform(format!("metric deviation {dev:e}")));
        }
        let det = m.determinant();
        if det < 0.0 {
            return Err(Error::ImproperTransform(format!("determinant {det}")));
        }
        if m[(0, 0)] < 1.0 - tol * scale {
            return Err(Error::ImproperTransform(format!("time reversal, S00 = {}", m[(0, 0)])));
        }
        Ok(LorentzTransform(m))
    }

    #[cfg(test)]
    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        LorentzTransform(m)
    }

    /// Pure boost along a unit direction.
    pub fn boost(direction: [f64; 3], rapidity: f64) -> Result<Self> {
        let n = unit(direction)?;
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        let mut m = Matrix4::identity();
        m[(0, 0)] = ch;
        for i in 0..3 {
            m[(0, i + 1)] = sh * n[i];
            m[(i + 1, 0)] = sh * n[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] += (ch - 1.0) * n[i] * n[j];
            }
        }
        Ok(LorentzTransform(m))
    }

    /// Spatial rotation by `angle` about a unit axis (right-hand rule).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = unit(axis)?;
        Ok(Self::from_rotation(&rotation_matrix(&n, angle)))
    }

    pub(crate) fn from_rotation(r: &Matrix3<f64>) -> Self {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
        LorentzTransform(m)
    }

    /// Seeded random transform: uniform rotation followed by a boost with
    /// rapidity drawn uniformly from `[0, max_rapidity]`.
    pub fn random(seed: u64, max_rapidity: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, max_rapidity)
    }

    pub fn random_with<R: Rng + ?Sized>(rng: &mut R, max_rapidity: f64) -> Self {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let qn = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|c| c / qn);
        let r = Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        );
        let rot = Self::from_rotation(&r);
        if max_rapidity <= 0.0 {
            return rot;
        }
        let d = random_unit3(rng);
        let eta = rng.random_range(0.0..=max_rapidity);
        let boost = Self::boost([d[0], d[1], d[2]], eta).expect("unit direction");
        boost * rot
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// `S⁻¹ = g Sᵀ g`.
    pub fn inverse(&self) -> Self {
        let g = metric();
        LorentzTransform(g * self.0.transpose() * g)
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        FourVector::from_vector(&(self.0 * v.to_vector()))
    }

    /// Largest deviation of `SᵀgS` from `g`.
    pub fn metric_defect(&self) -> f64 {
        let g = metric();
        (self.0.transpose() * g * self.0 - g).abs().max()
    }
}

impl Mul for LorentzTransform {
    type Output = LorentzTransform;
    fn mul(self, o: LorentzTransform) -> LorentzTransform {
        LorentzTransform(self.0 * o.0)
    }
}

fn unit(v: [f64; 3]) -> Result<Vector3<f64>> {
    let n = Vector3::from(v);
    let norm = n.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection(norm));
    }
    Ok(n)
}

pub(crate) fn random_unit3<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v: Vector3<f64> = Vector3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

pub(crate) fn rotation_matrix(n: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let k = Matrix3::new(0.0, -n[2], n[1], n[2], 0.0, -n[0], -n[1], n[0], 0.0);
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

/// Proper rotation taking `x̂` to the unit vector `d`.
pub(crate) fn rotation_x_to(d: &Vector3<f64>) -> Matrix3<f64> {
    let x = Vector3::x();
    let axis = x.cross(d);
    let s = axis.norm();
    let c = x.dot(d);
    if s < 1e-14 {
        if c > 0.0 {
            return Matrix3::identity();
        }
        // π about ẑ
        return Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
    }
    rotation_matrix(&(axis / s), s.atan2(c))
}

/// Minkowski-orthonormal frame; column `a` of the matrix is `e_a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tetrad(Matrix4<f64>);

impl Tetrad {
    pub fn identity() -> Self {
        Tetrad(Matrix4::identity())
    }

    /// Builds a tetrad from four legs. A left-handed spatial triad is made
    /// right-handed by swapping `e₂` and `e₃`.
    pub fn from_legs(legs: [FourVector; 4], tol: f64) -> Result<Self> {
        let mut m = Matrix4::from_columns(&legs.map(|v| v.to_vector()));
        if m.determinant() < 0.0 {
            m.swap_columns(2, 3);
        }
        let t = Tetrad(m);
        let defect = t.gram_defect();
        if defect > tol {
            return Err(Error::FrameCompletion(format!("gram defect {defect:e}")));
        }
        if m[(0, 0)] <= 0.0 {
            return Err(Error::FrameCompletion("e0 is not future pointing".into()));
        }
        Ok(t)
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<f64>) -> Self {
        Tetrad(m)
    }

    pub fn from_transform(l: &LorentzTransform) -> Self {
        Tetrad(*l.matrix())
    }

    pub fn leg(&self, a: usize) -> FourVector {
        FourVector::from_vector(&self.0.column(a).into_owned())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn as_transform(&self) -> LorentzTransform {
        LorentzTransform(self.0)
    }

    /// `max |e_a·e_b − g_ab|`.
    pub fn gram_defect(&self) -> f64 {
        let g = metric();
        (self.0.transpose() * g * self.0 - g).abs().max()
    }

    pub fn is_proper_orthochronous(&self) -> bool {
        self.0.determinant() > 0.0 && self.0[(0, 0)] > 0.0
    }

    /// Null legs `X± = (e₀ ± e₁)/√2`.
    pub fn null_pair(&self) -> (FourVector, FourVector) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (t, x) = (self.leg(0), self.leg(1));
        ((t + x) * s, (t - x) * s)
    }

    /// Frame with `e₀ = t/|t|` reached by a pure boost from the lab frame.
    pub fn boosted_to(t: &FourVector) -> Result<Self> {
        let s2 = t.interval();
        if s2 <= 0.0 || t.time() <= 0.0 {
            return Err(Error::FrameCompletion(format!("{t} is not future timelike")));
        }
        let u = *t * (1.0 / s2.sqrt());
        let v = u.spatial();
        let speed = v.norm();
        if speed < 1e-300 {
            return Ok(Self::identity());
        }
        let eta = speed.asinh();
        let b = LorentzTransform::boost([v[0] / speed, v[1] / speed, v[2] / speed], eta)?;
        Ok(Tetrad(b.0))
    }

    /// Spatial rotation of the lab frame with `e₁` along `dir`.
    pub fn rotated_to(dir: &Vector3<f64>) -> Self {
        Tetrad(LorentzTransform::from_rotation(&rotation_x_to(&dir.normalize())).0)
    }
}

impl Serialize for Tetrad {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let legs: [[f64; 4]; 4] = std::array::from_fn(|a| self.leg(a).0);
        legs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tetrad {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let legs = <[[f64; 4]; 4]>::deserialize(d)?;
        Ok(Tetrad(Matrix4::from_fn(|r, c| legs[c][r])))
    }
}
