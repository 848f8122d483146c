//! Automorphisms of `ℍⁿ` as generator sequences, flows of the basis fields,
//! Möbius maps of `ℂℙⁿ` and the Cayley constraint report.
//!
//! An [`Automorphism`] applies its generators in list order: the first
//! element acts first.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::domain::{cayley, cayley_inv, cayley_inv_jacobian, cayley_jacobian, sigma, sigma_jacobian, CPoint, Model};
use crate::error::{GeomError, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sampling::grid_ball;
use crate::vectorfield::BasisTag;
use crate::{c, re, Complex64, I};

/// A holomorphic map between open subsets of `ℂⁿ`.
pub trait HoloMap {
    fn dim(&self) -> usize;
    fn eval(&self, p: &CPoint) -> Result<CPoint>;
    /// `J[a][i] = ∂F_a/∂z_i`.
    fn jacobian(&self, p: &CPoint) -> Result<CMatrix>;
}

/// One generator. Indices are zero-based; `k < n − 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `wₙ ↦ wₙ + 2is`.
    Ts(f64),
    /// `w_k ↦ w_k + s`, `wₙ ↦ wₙ + 2s·w_k + s²`.
    T2k(usize, f64),
    /// `w_k ↦ w_k + is`, `wₙ ↦ wₙ − 2is·w_k + s²`.
    T3k(usize, f64),
    /// `(w', wₙ) ↦ (eˢw', e²ˢwₙ)`.
    Dil(f64),
    /// Swaps `w₁` and `w_{k+1}`; `k = 0` is the identity.
    Perm1k(usize),
    /// `(w', wₙ) ↦ (Uw', wₙ)` with `U` unitary of size `n − 1`.
    Unitary(CMatrix),
    /// `σ(w) = (−w'/wₙ, 1/wₙ)`.
    Sigma,
    /// `w ↦ Aw + b`; not domain preserving in general.
    ComplexAffine(CMatrix, CVector),
}

/// Maximum deviation `|UU^* − I|` accepted for [`Generator::Unitary`].
pub const UNITARY_TOL: f64 = 1e-12;

impl Generator {
    fn validate(&self, n: usize) -> Result<()> {
        let m = n - 1;
        match self {
            Generator::T2k(k, _) | Generator::T3k(k, _) | Generator::Perm1k(k) if *k >= m => {
                Err(GeomError::InvalidIndex { index: *k, n })
            }
            Generator::Unitary(u) => {
                if u.nrows() != m || u.ncols() != m {
                    return Err(GeomError::DimensionMismatch { expected: m, got: u.nrows() });
                }
                let deviation = linalg::max_abs(&(u * u.adjoint() - CMatrix::identity(m, m)));
                if deviation > UNITARY_TOL {
                    return Err(GeomError::NotUnitary { deviation });
                }
                Ok(())
            }
            Generator::ComplexAffine(a, b) => {
                if a.nrows() != n || a.ncols() != n || b.len() != n {
                    return Err(GeomError::DimensionMismatch { expected: n, got: a.nrows() });
                }
                if linalg::det(a).norm() == 0.0 {
                    return Err(GeomError::SingularJacobian);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn eval(&self, w: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = w.len();
        let l = n - 1;
        let mut out = w.to_vec();
        match self {
            Generator::Ts(s) => out[l] += c(0.0, 2.0 * s),
            Generator::T2k(k, s) => {
                out[*k] += s;
                out[l] += w[*k] * (2.0 * s) + s * s;
            }
            Generator::T3k(k, s) => {
                out[*k] += c(0.0, *s);
                out[l] += w[*k] * c(0.0, -2.0 * s) + s * s;
            }
            Generator::Dil(s) => {
                let e = s.exp();
                for z in &mut out[..l] {
                    *z *= e;
                }
                out[l] *= e * e;
            }
            Generator::Perm1k(k) => out.swap(0, *k),
            Generator::Unitary(u) => {
                for i in 0..l {
                    out[i] = (0..l).map(|j| u[(i, j)] * w[j]).sum();
                }
            }
            Generator::Sigma => {
                return Ok(sigma(&CPoint::siegel(w.to_vec()))?.into_coords());
            }
            Generator::ComplexAffine(a, b) => {
                for i in 0..n {
                    out[i] = (0..n).map(|j| a[(i, j)] * w[j]).sum::<Complex64>() + b[i];
                }
            }
        }
        Ok(out)
    }

    fn jacobian(&self, w: &[Complex64]) -> Result<CMatrix> {
        let n = w.len();
        let l = n - 1;
        let mut j = CMatrix::identity(n, n);
        match self {
            Generator::Ts(_) => {}
            Generator::T2k(k, s) => j[(l, *k)] = re(2.0 * s),
            Generator::T3k(k, s) => j[(l, *k)] = c(0.0, -2.0 * s),
            Generator::Dil(s) => {
                let e = s.exp();
                for i in 0..l {
                    j[(i, i)] = re(e);
                }
                j[(l, l)] = re(e * e);
            }
            Generator::Perm1k(k) => {
                if *k != 0 {
                    j.swap_rows(0, *k);
                }
            }
            Generator::Unitary(u) => j.view_mut((0, 0), (l, l)).copy_from(u),
            Generator::Sigma => return sigma_jacobian(&CPoint::siegel(w.to_vec())),
            Generator::ComplexAffine(a, _) => j = a.clone(),
        }
        Ok(j)
    }

    fn affine_form(&self, n: usize) -> Option<(CMatrix, CVector)> {
        let l = n - 1;
        let zero = CVector::zeros(n);
        let mut b = zero.clone();
        let point = vec![Complex64::default(); n];
        match self {
            Generator::Sigma => None,
            Generator::ComplexAffine(a, b) => Some((a.clone(), b.clone())),
            Generator::Ts(s) => {
                b[l] = c(0.0, 2.0 * s);
                Some((CMatrix::identity(n, n), b))
            }
            Generator::T2k(k, s) => {
                b[*k] = re(*s);
                b[l] = re(s * s);
                Some((self.jacobian(&point).ok()?, b))
            }
            Generator::T3k(k, s) => {
                b[*k] = c(0.0, *s);
                b[l] = re(s * s);
                Some((self.jacobian(&point).ok()?, b))
            }
            _ => Some((self.jacobian(&point).ok()?, zero)),
        }
    }

    fn inverse(&self) -> Generator {
        match self {
            Generator::Ts(s) => Generator::Ts(-s),
            Generator::T2k(k, s) => Generator::T2k(*k, -s),
            Generator::T3k(k, s) => Generator::T3k(*k, -s),
            Generator::Dil(s) => Generator::Dil(-s),
            Generator::Perm1k(k) => Generator::Perm1k(*k),
            Generator::Unitary(u) => Generator::Unitary(u.adjoint()),
            Generator::Sigma => Generator::Sigma,
            Generator::ComplexAffine(a, b) => {
                let inv = a.clone().try_inverse().expect("validated invertible");
                let shift = -(&inv * b);
                Generator::ComplexAffine(inv, shift)
            }
        }
    }

    /// Whether the generator maps `ℍⁿ` onto itself.
    pub fn preserves_domain(&self) -> bool {
        !matches!(self, Generator::ComplexAffine(..))
    }
}

/// An ordered composition of generators acting on `ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Automorphism {
    n: usize,
    generators: Vec<Generator>,
}

impl Automorphism {
    pub fn new(n: usize, generators: Vec<Generator>) -> Result<Self> {
        if n == 0 {
            return Err(GeomError::DimensionMismatch { expected: 1, got: 0 });
        }
        for g in &generators {
            g.validate(n)?;
        }
        Ok(Self { n, generators })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            generators: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_identity(&self) -> bool {
        self.generators.is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Automorphism) -> Automorphism {
        let mut generators = self.generators.clone();
        generators.extend(next.generators.iter().cloned());
        Automorphism { n: self.n, generators }
    }

    /// Appends one generator.
    pub fn push(&mut self, g: Generator) -> Result<()> {
        g.validate(self.n)?;
        self.generators.push(g);
        Ok(())
    }

    /// Evaluates without checking the input point.
    pub fn map(&self, p: &CPoint) -> Result<CPoint> {
        p.check_dim(self.n)?;
        let mut w = p.coords().to_vec();
        for g in &self.generators {
            w = g.eval(&w)?;
        }
        Ok(CPoint::new(w, p.model()))
    }

    /// Evaluates at an interior point of `ℍⁿ`.
    pub fn apply(&self, p: &CPoint) -> Result<CPoint> {
        p.require_interior()?;
        self.map(p)
    }

    /// Chain-rule product of the generator Jacobians.
    pub fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        p.check_dim(self.n)?;
        let mut w = p.coords().to_vec();
        let mut j = CMatrix::identity(self.n, self.n);
        for g in &self.generators {
            j = g.jacobian(&w)? * j;
            w = g.eval(&w)?;
        }
        Ok(j)
    }

    pub fn det_jacobian(&self, p: &CPoint) -> Result<Complex64> {
        Ok(linalg::det(&self.jacobian(p)?))
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            n: self.n,
            generators: self.generators.iter().rev().map(Generator::inverse).collect(),
        }
    }

    /// `(A, b)` with `Φ(w) = Aw + b`, or `None` when `σ` occurs.
    pub fn affine_form(&self) -> Option<(CMatrix, CVector)> {
        let mut a = CMatrix::identity(self.n, self.n);
        let mut b = CVector::zeros(self.n);
        for g in &self.generators {
            let (ga, gb) = g.affine_form(self.n)?;
            b = &ga * b + gb;
            a = ga * a;
        }
        Some((a, b))
    }

    pub fn preserves_domain(&self) -> bool {
        self.generators.iter().all(Generator::preserves_domain)
    }

    /// Closed-form flow of a grade-≤0 basis field.
    pub fn flow(tag: BasisTag, s: f64, n: usize) -> Result<Automorphism> {
        crate::vectorfield::field(tag, n)?;
        let g = match tag {
            BasisTag::T => Generator::Ts(s),
            BasisTag::T2(k) => Generator::T2k(k, s),
            BasisTag::T3(k) => Generator::T3k(k, s),
            BasisTag::D => Generator::Dil(s),
            BasisTag::U(i, j) => {
                let mut u = CMatrix::identity(n - 1, n - 1);
                u[(i, i)] = re(s.cos());
                u[(j, j)] = re(s.cos());
                u[(i, j)] = re(s.sin());
                u[(j, i)] = re(-s.sin());
                Generator::Unitary(u)
            }
            BasisTag::V(i, j) => {
                let mut u = CMatrix::identity(n - 1, n - 1);
                u[(i, i)] = re(s.cos());
                u[(j, j)] = re(s.cos());
                u[(i, j)] = c(0.0, s.sin());
                u[(j, i)] = c(0.0, s.sin());
                Generator::Unitary(u)
            }
            BasisTag::Wk(k) => {
                let mut u = CMatrix::identity(n - 1, n - 1);
                u[(k, k)] = (I * s).exp();
                Generator::Unitary(u)
            }
            BasisTag::Tt | BasisTag::Tt2(_) | BasisTag::Tt3(_) => {
                return Err(GeomError::UnsupportedTag { tag: tag.to_string() })
            }
        };
        Automorphism::new(n, vec![g])
    }
}

impl HoloMap for Automorphism {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, p: &CPoint) -> Result<CPoint> {
        self.map(p)
    }

    fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        Automorphism::jacobian(self, p)
    }
}

/// `z ↦ Φ(𝒞(z))`, a map `𝔹ⁿ → ℍⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyThen(pub Automorphism);

impl HoloMap for CayleyThen {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, p: &CPoint) -> Result<CPoint> {
        self.0.map(&cayley(p)?)
    }

    fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        Ok(self.0.jacobian(&cayley(p)?)? * cayley_jacobian(p)?)
    }
}

/// `𝒞⁻¹ : ℍⁿ → 𝔹ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseCayley(pub usize);

impl HoloMap for InverseCayley {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&self, p: &CPoint) -> Result<CPoint> {
        cayley_inv(p)
    }

    fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        cayley_inv_jacobian(p)
    }
}

/// `z ↦ (z'/(1 − zₙ) + g(zₙ), (1 + zₙ)/(1 − zₙ))` with polynomial shears
/// `g_j(t) = Σ_m coeffs[j][m] tᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearedCayley {
    pub coeffs: Vec<Vec<Complex64>>,
}

impl ShearedCayley {
    /// Every shear equal to `zₙ²`.
    pub fn quadratic(n: usize) -> Self {
        Self {
            coeffs: vec![vec![re(0.0), re(0.0), re(1.0)]; n - 1],
        }
    }

    fn shear(&self, j: usize, t: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::default();
        let mut d = Complex64::default();
        for (m, a) in self.coeffs[j].iter().enumerate() {
            v += a * t.powu(m as u32);
            if m > 0 {
                d += a * t.powu(m as u32 - 1) * m as f64;
            }
        }
        (v, d)
    }
}

impl HoloMap for ShearedCayley {
    fn dim(&self) -> usize {
        self.coeffs.len() + 1
    }

    fn eval(&self, p: &CPoint) -> Result<CPoint> {
        let mut w = cayley(p)?.into_coords();
        let t = p.last();
        for (j, wj) in w.iter_mut().take(self.coeffs.len()).enumerate() {
            *wj += self.shear(j, t).0;
        }
        Ok(CPoint::siegel(w))
    }

    fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        let mut j = cayley_jacobian(p)?;
        let l = self.coeffs.len();
        for r in 0..l {
            j[(r, l)] += self.shear(r, p.last()).1;
        }
        Ok(j)
    }
}

/// `[z, 1] ↦ A·[z, 1]` read in the affine chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusMap {
    a: CMatrix,
    target: Model,
}

impl MobiusMap {
    /// Fails with `Degenerate` for a (numerically) singular matrix.
    pub fn new(a: CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() < 2 {
            return Err(GeomError::Degenerate);
        }
        let scale = linalg::max_abs(&a);
        let d = linalg::det(&a).norm();
        if scale == 0.0 || !d.is_finite() || d <= 1e-12 * scale.powi(a.nrows() as i32) {
            return Err(GeomError::Degenerate);
        }
        Ok(Self { a, target: Model::Siegel })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: CMatrix::identity(n + 1, n + 1),
            target: Model::Ball,
        }
    }

    /// Rows `e₁ … e_{n−1}`, `(0,…,0,1,1)`, `(0,…,0,−1,1)`.
    pub fn cayley(n: usize) -> Self {
        let mut a = CMatrix::identity(n + 1, n + 1);
        a[(n - 1, n)] = re(1.0);
        a[(n, n - 1)] = re(-1.0);
        Self { a, target: Model::Siegel }
    }

    /// The model image points are tagged with.
    pub fn with_target(mut self, target: Model) -> Self {
        self.target = target;
        self
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        Self {
            a: &self.a * lambda,
            target: self.target,
        }
    }

    /// `P·A·P⁻¹` with `P = diag(1, …, 1, e^{iθ}, 1)`: conjugation by the
    /// rotation of the last coordinate.
    pub fn conjugated_by_phase(&self, theta: f64) -> Self {
        let p = phase_matrix(self.dim(), theta);
        let pinv = phase_matrix(self.dim(), -theta);
        Self {
            a: p * &self.a * pinv,
            target: self.target,
        }
    }

    fn homogeneous(&self, p: &CPoint) -> Result<CVector> {
        let n = self.dim();
        p.check_dim(n)?;
        let mut x = CVector::from_iterator(n + 1, p.coords().iter().copied().chain([re(1.0)]));
        x = &self.a * x;
        if x[n] == Complex64::default() {
            return Err(GeomError::PoleAtBoundary { what: "projective denominator vanishes" });
        }
        Ok(x)
    }
}

fn phase_matrix(n: usize, theta: f64) -> CMatrix {
    let mut p = CMatrix::identity(n + 1, n + 1);
    p[(n - 1, n - 1)] = (I * theta).exp();
    p
}

impl HoloMap for MobiusMap {
    fn dim(&self) -> usize {
        self.a.nrows() - 1
    }

    fn eval(&self, p: &CPoint) -> Result<CPoint> {
        let n = self.dim();
        let x = self.homogeneous(p)?;
        Ok(CPoint::new((0..n).map(|i| x[i] / x[n]).collect(), self.target))
    }

    fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        let n = self.dim();
        let y = self.homogeneous(p)?;
        let den = y[n];
        Ok(CMatrix::from_fn(n, n, |i, j| {
            (self.a[(i, j)] * den - y[i] * self.a[(n, j)]) / (den * den)
        }))
    }
}

pub fn mobius_apply(m: &MobiusMap, z: &CPoint) -> Result<CPoint> {
    m.eval(z)
}

pub fn mobius_jacobian(m: &MobiusMap, z: &CPoint) -> Result<CMatrix> {
    m.jacobian(z)
}

/// `R_θ⁻¹ ∘ G ∘ R_θ`, where `R_θ` rotates the last coordinate by `e^{iθ}`.
struct Derotated<'a> {
    inner: &'a dyn HoloMap,
    theta: f64,
}

impl Derotated<'_> {
    fn rotate(&self, p: &CPoint, theta: f64) -> CPoint {
        let mut v = p.coords().to_vec();
        let l = v.len() - 1;
        v[l] *= (I * theta).exp();
        CPoint::new(v, p.model())
    }
}

impl HoloMap for Derotated<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, p: &CPoint) -> Result<CPoint> {
        let q = self.inner.eval(&self.rotate(p, self.theta))?;
        Ok(self.rotate(&q, -self.theta))
    }

    fn jacobian(&self, p: &CPoint) -> Result<CMatrix> {
        let n = self.dim();
        let mut j = self.inner.jacobian(&self.rotate(p, self.theta))?;
        let e = (I * self.theta).exp();
        for r in 0..n {
            j[(r, n - 1)] *= e;
        }
        for col in 0..n {
            j[(n - 1, col)] *= e.conj();
        }
        Ok(j)
    }
}

/// One line of a [`CayleyReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CayleyVerdict {
    /// `G = R_θ ∘ 𝒞 ∘ R_θ⁻¹`.
    CayleyUpToRotation { theta: f64 },
    /// Name of the first constraint that failed.
    Failed { constraint: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CayleyReport {
    pub checks: Vec<ConstraintCheck>,
    pub verdict: CayleyVerdict,
    /// The fitted (or given) matrix, normalized, row-major, once the
    /// linearity check has run.
    pub fitted_matrix: Option<Vec<Complex64>>,
}

/// Tolerances of the report.
pub const BASE_POINT_TOL: f64 = 1e-10;
pub const DET_TOL: f64 = 1e-10;
pub const LINEARITY_TOL: f64 = 1e-9;
pub const COEFF_TOL: f64 = 1e-8;
pub const DET_SAMPLES: usize = 50;

/// Runs the constraint chain on the action of a Möbius matrix.
pub fn cayley_constraint_report(m: &MobiusMap) -> Result<CayleyReport> {
    constraint_report(m)
}

/// Runs the constraint chain on any holomorphic map `𝔹ⁿ → ℂⁿ`. The
/// Möbius matrix is recovered by fitting.
pub fn constraint_report(map: &dyn HoloMap) -> Result<CayleyReport> {
    let n = map.dim();
    let origin = CPoint::origin(n);
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<ConstraintCheck>, name: &str, residual: f64, tolerance: f64| {
        let pass = residual <= tolerance;
        checks.push(ConstraintCheck {
            name: name.to_string(),
            residual,
            tolerance,
            pass,
        });
        pass
    };
    let finish = |checks: Vec<ConstraintCheck>, fitted: Option<Vec<Complex64>>, theta: f64| {
        let verdict = match checks.iter().find(|c| !c.pass) {
            Some(c) => CayleyVerdict::Failed { constraint: c.name.clone() },
            None => CayleyVerdict::CayleyUpToRotation { theta },
        };
        Ok(CayleyReport {
            checks,
            verdict,
            fitted_matrix: fitted,
        })
    };

    // Rotation of the last coordinate, read off from G(0).
    let g0 = map.eval(&origin)?;
    let tail: f64 = g0.coords()[..n - 1].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let theta = if tail <= BASE_POINT_TOL && (g0.last().norm() - 1.0).abs() <= BASE_POINT_TOL {
        g0.last().arg()
    } else {
        0.0
    };
    let g = Derotated { inner: map, theta };

    let g0 = g.eval(&origin)?;
    let mut target = vec![Complex64::default(); n];
    target[n - 1] = re(1.0);
    let r = g0.coords().iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if !push(&mut checks, "G(0) = (0,...,0,1)", r, BASE_POINT_TOL) {
        return finish(checks, None, theta);
    }

    let dg = g.jacobian(&origin)?;
    let mut want = CMatrix::identity(n, n);
    want[(n - 1, n - 1)] = re(2.0);
    if !push(&mut checks, "dG(0) = diag(1,...,1,2)", linalg::max_abs(&(dg - want)), BASE_POINT_TOL) {
        return finish(checks, None, theta);
    }

    let mut worst: f64 = 0.0;
    for i in 0..DET_SAMPLES {
        let z = grid_ball(n, i);
        let d = linalg::det(&g.jacobian(&z)?) * (re(1.0) - z.last()).powu(n as u32 + 1);
        worst = worst.max((d - re(2.0)).norm());
    }
    if !push(&mut checks, "det dG (1 - z_n)^(n+1) = 2", worst, DET_TOL) {
        return finish(checks, None, theta);
    }

    let (a, ratio) = fit_mobius(&g)?;
    let fitted: Vec<Complex64> = (0..=n).flat_map(|i| (0..=n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)]).collect();
    if !push(&mut checks, "Mobius linearity", ratio, LINEARITY_TOL) {
        return finish(checks, None, theta);
    }

    // One-based names, zero-based storage.
    let at = |i: usize, j: usize| a[(i - 1, j - 1)];
    let m = n + 1;
    let mut coeff = |name: &str, r: f64| push(&mut checks, name, r, COEFF_TOL);
    let mut r = 0.0f64;
    for j in 1..n {
        r = r.max(at(j, m).norm());
    }
    coeff("a_{j,n+1} = 0 (j < n)", r);
    coeff("a_{n,n+1} = 1", (at(n, m) - re(1.0)).norm());
    let mut r = 0.0f64;
    for k in 1..n {
        for j in 1..=n {
            let d = if k == j { 1.0 } else { 0.0 };
            r = r.max((at(k, j) - re(d)).norm());
        }
    }
    coeff("a_{kj} = delta_{kj} (k < n)", r);
    let r = (1..n).map(|j| at(m, j).norm()).fold(0.0, f64::max);
    coeff("a_{n+1,j} = 0 (j < n)", r);
    let r = (1..n).map(|j| at(n, j).norm()).fold(0.0, f64::max);
    coeff("a_{n,j} = 0 (j < n)", r);
    coeff("a_{n+1,n+1} = -a_{n+1,n}", (at(m, m) + at(m, n)).norm());
    coeff(
        "a_{n,n} a_{n+1,n+1} - a_{n+1,n} a_{n,n+1} = 2",
        (at(n, n) * at(m, m) - at(m, n) * at(n, m) - re(2.0)).norm(),
    );
    finish(checks, Some(fitted), theta)
}

/// Fits `A` with `A·[z, 1] ∥ [G(z), 1]` from samples; returns `A` normalized
/// by its corner entry (or its largest entry) and `σ_min / σ_max`.
fn fit_mobius(g: &dyn HoloMap) -> Result<(CMatrix, f64)> {
    let n = g.dim();
    let m = n + 1;
    let count = 2 * m * m;
    let mut rows = Vec::new();
    for i in 0..count {
        let z = grid_ball(n, 500 + i);
        let y = g.eval(&z)?;
        let x: Vec<Complex64> = z.coords().iter().copied().chain([re(1.0)]).collect();
        for r in 0..n {
            let mut row = vec![Complex64::default(); m * m];
            for (j, xj) in x.iter().enumerate() {
                row[r * m + j] = *xj;
                row[n * m + j] = -y.coords()[r] * xj;
            }
            rows.push(row);
        }
    }
    let sys = CMatrix::from_fn(rows.len(), m * m, |r, col| rows[r][col]);
    let (v, ratio) = linalg::null_vector(&sys);
    let mut a = CMatrix::from_fn(m, m, |i, j| v[i * m + j]);
    let corner = a[(n, n)];
    let pivot = if corner.norm() > 1e-8 * linalg::max_abs(&a) {
        corner
    } else {
        a.iter().copied().fold(Complex64::default(), |acc, z| if z.norm() > acc.norm() { z } else { acc })
    };
    a /= pivot;
    Ok((a, ratio))
}

/// Random-free helper: a real `m×m` rotation in the `(i, j)` plane as a
/// complex matrix.
pub fn plane_rotation(m: usize, i: usize, j: usize, angle: f64) -> CMatrix {
    let mut u = DMatrix::identity(m, m);
    u[(i, i)] = re(angle.cos());
    u[(j, j)] = re(angle.cos());
    u[(i, j)] = re(angle.sin());
    u[(j, i)] = re(-angle.sin());
    u
}
