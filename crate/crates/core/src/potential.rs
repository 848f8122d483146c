//! Canonical potentials, their pluriharmonic corrections, differential norms
//! and the `W` field.

use serde::{Deserialize, Serialize};

use crate::automorphism::{Automorphism, HoloMap};
use crate::diff;
use crate::domain::{cayley, cayley_jacobian, rho0, CPoint, Model};
use crate::error::{GeomError, Result};
use crate::linalg::CMatrix;
use crate::metric::{inverse_metric, norm_sq_with};
use crate::sampling::grid_siegel;
use crate::sampling::grid_ball;
use crate::vectorfield::{fit_field, PolyVF};
use crate::{c, re, Complex64, I};

/// One serialized monomial: `(re + i·im)·w^exponents`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// Holomorphic polynomial in `w₁ … wₙ` with complex coefficients.
///
/// The zero polynomial carries no dimension and evaluates to `0` anywhere.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<Term>", try_from = "Vec<Term>")]
pub struct HoloPoly {
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl From<HoloPoly> for Vec<Term> {
    fn from(p: HoloPoly) -> Self {
        p.terms
            .into_iter()
            .map(|(exponents, z)| Term {
                exponents,
                re: z.re,
                im: z.im,
            })
            .collect()
    }
}

impl TryFrom<Vec<Term>> for HoloPoly {
    type Error = String;

    fn try_from(terms: Vec<Term>) -> std::result::Result<Self, String> {
        if let Some(first) = terms.first() {
            let n = first.exponents.len();
            if let Some((i, _)) = terms.iter().enumerate().find(|(_, t)| t.exponents.len() != n) {
                return Err(format!("term {i}: expected {n} exponents"));
            }
            if n == 0 {
                return Err("term 0: exponent list is empty".into());
            }
        }
        let mut p = HoloPoly::zero();
        for t in terms {
            p.add_term(t.exponents, c(t.re, t.im));
        }
        Ok(p)
    }
}

impl HoloPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(n: usize, value: Complex64) -> Self {
        Self::monomial(vec![0; n], value)
    }

    pub fn monomial(exponents: Vec<u32>, coeff: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(exponents, coeff);
        p
    }

    /// `coeff·w_k` in `n` variables.
    pub fn linear(n: usize, k: usize, coeff: Complex64) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        Self::monomial(e, coeff)
    }

    /// Adds `coeff·w^exponents`, merging equal exponents and dropping zeros.
    pub fn add_term(&mut self, exponents: Vec<u32>, coeff: Complex64) {
        if let Some(t) = self.terms.iter_mut().find(|(e, _)| *e == exponents) {
            t.1 += coeff;
        } else {
            self.terms.push((exponents, coeff));
        }
        self.terms.retain(|(_, z)| *z != Complex64::default());
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex64)] {
        &self.terms
    }

    /// Number of variables, `None` for the zero polynomial.
    pub fn dim(&self) -> Option<usize> {
        self.terms.first().map(|(e, _)| e.len())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, w: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, coeff)| {
                e.iter()
                    .zip(w)
                    .fold(*coeff, |acc, (&p, &z)| acc * z.powu(p))
            })
            .sum()
    }

    pub fn derivative(&self, k: usize) -> HoloPoly {
        let mut out = HoloPoly::zero();
        for (e, coeff) in &self.terms {
            if e[k] > 0 {
                let mut d = e.clone();
                d[k] -= 1;
                out.add_term(d, coeff * f64::from(e[k]));
            }
        }
        out
    }

    /// Exact holomorphic gradient at `w`.
    pub fn gradient(&self, w: &[Complex64]) -> Vec<Complex64> {
        (0..w.len()).map(|k| self.derivative(k).eval(w)).collect()
    }

    pub fn add(&self, other: &HoloPoly) -> HoloPoly {
        let mut out = self.clone();
        for (e, z) in &other.terms {
            out.add_term(e.clone(), *z);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> HoloPoly {
        let mut out = HoloPoly::zero();
        for (e, z) in &self.terms {
            out.add_term(e.clone(), z * s);
        }
        out
    }
}

/// Which canonical potential a [`Potential`] is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasePotential {
    /// `ψ₀ = ρ₀^{−(n+1)}` on `ℍⁿ`.
    Psi0,
    /// `φ₀ = ψ₀∘𝒞` on `𝔹ⁿ`.
    Phi0,
}

/// `log ψ = (1/κ)[log ψ₀∘Φ + f + f̄ + ln r]` (with `ψ₀∘Φ∘𝒞` for the ball base).
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub n: usize,
    pub base: BasePotential,
    pub precompose: Option<Automorphism>,
    pub correction: HoloPoly,
    pub log_scale: f64,
    pub kappa: f64,
}

/// `log ψ₀(u) = −(n+1) log ρ₀(u)`.
pub fn log_psi0(u: &CPoint) -> Result<f64> {
    let rho = rho0(u);
    if rho <= 0.0 {
        return Err(GeomError::OutsideDomain { value: rho });
    }
    Ok(-((u.dim() + 1) as f64) * rho.ln())
}

/// Holomorphic gradient of `log ψ₀`: `(n+1)w̄_k/ρ₀` and `−(n+1)/(2ρ₀)`.
pub fn log_psi0_gradient(u: &CPoint) -> Result<Vec<Complex64>> {
    let rho = rho0(u);
    if rho <= 0.0 {
        return Err(GeomError::OutsideDomain { value: rho });
    }
    let n = u.dim();
    let k = (n + 1) as f64;
    let mut g: Vec<Complex64> = u.coords()[..n - 1].iter().map(|z| z.conj() * (k / rho)).collect();
    g.push(re(-k / (2.0 * rho)));
    Ok(g)
}

/// A real log-potential `Ψ` on one of the two models.
pub trait LogPotential {
    fn dim(&self) -> usize;
    fn model(&self) -> Model;
    /// Curvature parameter of `ω̃ = (1/κ)ω`.
    fn kappa(&self) -> f64;
    fn eval_log(&self, p: &CPoint) -> Result<f64>;
    /// Exact holomorphic partials `Ψ_k`.
    fn grad_holo(&self, p: &CPoint) -> Result<Vec<Complex64>>;

    /// `‖∂Ψ‖²` measured in `ω̃ = (1/κ)ω`.
    fn diff_norm_sq(&self, p: &CPoint) -> Result<f64> {
        let g = self.grad_holo(p)?;
        Ok(self.kappa() * norm_sq_with(&g, &inverse_metric(p)?))
    }

    /// `Ψ^k = Σ_j Ψ_j̄ g̃^{kj̄}`.
    fn gradient_field(&self, p: &CPoint) -> Result<Vec<Complex64>> {
        let g = self.grad_holo(p)?;
        let h = inverse_metric(p)?;
        let n = g.len();
        Ok((0..n)
            .map(|k| (0..n).map(|j| g[j].conj() * h.entries[(k, j)]).sum::<Complex64>() * self.kappa())
            .collect())
    }

    /// `W(w) = i·ψ^{1/(n+1)}·grad log ψ` at a single point.
    fn w_value(&self, p: &CPoint) -> Result<Vec<Complex64>> {
        let v = self.gradient_field(p)?;
        let factor = I * (self.eval_log(p)? / (self.dim() + 1) as f64).exp();
        Ok(v.into_iter().map(|z| z * factor).collect())
    }
}

/// `Ψ∘F` for a holomorphic map `F` into the domain of `Ψ`.
pub struct Pullback<'a> {
    pub inner: &'a dyn LogPotential,
    pub map: &'a dyn HoloMap,
    /// Model of the source points.
    pub model: Model,
}

impl LogPotential for Pullback<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn model(&self) -> Model {
        self.model
    }

    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    fn eval_log(&self, p: &CPoint) -> Result<f64> {
        p.require_interior()?;
        self.inner.eval_log(&self.map.eval(p)?)
    }

    fn grad_holo(&self, p: &CPoint) -> Result<Vec<Complex64>> {
        p.require_interior()?;
        let g = self.inner.grad_holo(&self.map.eval(p)?)?;
        let j = self.map.jacobian(p)?;
        let n = g.len();
        Ok((0..n).map(|k| (0..n).map(|a| g[a] * j[(a, k)]).sum()).collect())
    }
}

impl Potential {
    pub fn psi0(n: usize) -> Self {
        Self {
            n,
            base: BasePotential::Psi0,
            precompose: None,
            correction: HoloPoly::zero(),
            log_scale: 0.0,
            kappa: 1.0,
        }
    }

    pub fn phi0(n: usize) -> Self {
        Self {
            base: BasePotential::Phi0,
            ..Self::psi0(n)
        }
    }

    /// Multiplies `ψ` by `r > 0`.
    pub fn scaled(mut self, r: f64) -> Self {
        self.log_scale += r.ln();
        self
    }

    pub fn with_correction(mut self, f: HoloPoly) -> Self {
        self.correction = f;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    /// Replaces the precomposition by `phi` (applied before the base).
    pub fn precomposed(mut self, phi: Automorphism) -> Self {
        self.precompose = Some(phi);
        self
    }

    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    fn check_point(&self, p: &CPoint) -> Result<()> {
        p.check_dim(self.n)?;
        if let Some(m) = self.correction.dim() {
            if m != self.n {
                return Err(GeomError::DimensionMismatch { expected: self.n, got: m });
            }
        }
        if p.model() != self.model() {
            return Err(GeomError::Unsupported(format!(
                "potential lives on {:?}, point is in {:?}",
                self.model(),
                p.model()
            )));
        }
        p.require_interior()
    }

    /// The point fed to `ψ₀` and the holomorphic Jacobian of that map.
    fn inner(&self, p: &CPoint) -> Result<(CPoint, CMatrix)> {
        let (x, jx) = match self.base {
            BasePotential::Psi0 => (p.clone(), CMatrix::identity(self.n, self.n)),
            BasePotential::Phi0 => (cayley(p)?, cayley_jacobian(p)?),
        };
        match &self.precompose {
            None => Ok((x, jx)),
            Some(phi) => {
                let j = phi.jacobian(&x)?;
                Ok((phi.apply(&x)?, j * jx))
            }
        }
    }
}

impl LogPotential for Potential {
    fn dim(&self) -> usize {
        self.n
    }

    fn model(&self) -> Model {
        match self.base {
            BasePotential::Psi0 => Model::Siegel,
            BasePotential::Phi0 => Model::Ball,
        }
    }

    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn eval_log(&self, p: &CPoint) -> Result<f64> {
        self.check_point(p)?;
        let (u, _) = self.inner(p)?;
        let f = self.correction.eval(p.coords());
        Ok((log_psi0(&u)? + 2.0 * f.re + self.log_scale) / self.kappa)
    }

    /// Exact holomorphic partials `Ψ_k` of [`Potential::eval_log`].
    fn grad_holo(&self, p: &CPoint) -> Result<Vec<Complex64>> {
        self.check_point(p)?;
        let (u, j) = self.inner(p)?;
        let l = log_psi0_gradient(&u)?;
        let fg = self.correction.gradient(p.coords());
        Ok((0..self.n)
            .map(|k| {
                let chain: Complex64 = (0..self.n).map(|a| l[a] * j[(a, k)]).sum();
                let fk = fg.get(k).copied().unwrap_or_default();
                (chain + fk) / self.kappa
            })
            .collect())
    }
}

fn grid_point(p: &(impl LogPotential + ?Sized), i: usize) -> CPoint {
    match p.model() {
        Model::Siegel => grid_siegel(p.dim(), i),
        Model::Ball => grid_ball(p.dim(), i),
    }
}

/// `−4ρ₀ Re f_n + ‖∂f‖²`.
pub fn constant_norm_residual(f: &HoloPoly, w: &CPoint) -> Result<f64> {
    let rho = rho0(w);
    if rho <= 0.0 {
        return Err(GeomError::OutsideDomain { value: rho });
    }
    let n = w.dim();
    let grad = f.gradient(w.coords());
    let h = inverse_metric(w)?;
    Ok(-4.0 * rho * grad[n - 1].re + norm_sq_with(&grad, &h))
}

/// Outcome of [`w_field_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct WFieldFit {
    pub field: PolyVF,
    pub norm_mean: f64,
    pub norm_spread: f64,
    pub fit_residual: f64,
}

/// Number of sample points for the norm-constancy precondition.
pub const NORM_SAMPLES: usize = 64;
pub const NORM_SPREAD_TOL: f64 = 1e-8;
pub const W_FIT_TOL: f64 = 1e-8;

/// Mean and `max − min` of `diff_norm_sq` over `count` grid points.
pub fn norm_spread(p: &(impl LogPotential + ?Sized), count: usize) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for i in 0..count {
        let v = p.diff_norm_sq(&grid_point(p, 10_000 + i))?;
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    Ok((sum / count as f64, hi - lo))
}

/// Fits `W = i ψ^{1/(n+1)} grad log ψ` as a degree-≤2 polynomial field.
pub fn w_field_detailed(p: &(impl LogPotential + ?Sized)) -> Result<WFieldFit> {
    if p.kappa() != 1.0 {
        return Err(GeomError::Unsupported("the W field is defined for κ = 1".into()));
    }
    let (norm_mean, spread) = norm_spread(p, NORM_SAMPLES)?;
    if spread > NORM_SPREAD_TOL {
        return Err(GeomError::NotConstantNorm {
            spread,
            estimate: norm_mean,
        });
    }
    let n = p.dim();
    let m = n * n + 2 * n;
    let pts: Vec<CPoint> = (0..4 * m).map(|i| grid_point(p, i)).collect();
    let vals = pts.iter().map(|q| p.w_value(q)).collect::<Result<Vec<_>>>()?;
    let (field, fit_residual) = fit_field(n, &pts[..3 * m], &vals[..3 * m], &pts[3 * m..], &vals[3 * m..]);
    if fit_residual > W_FIT_TOL {
        return Err(GeomError::NotPolynomial { residual: fit_residual });
    }
    Ok(WFieldFit {
        field,
        norm_mean,
        norm_spread: spread,
        fit_residual,
    })
}

pub fn w_field(p: &(impl LogPotential + ?Sized)) -> Result<PolyVF> {
    w_field_detailed(p).map(|f| f.field)
}

/// Max-norm of `[V, V̄] − (V − V̄)` for `V = grad log ψ`, by finite
/// differences of the gradient field.
pub fn gradient_bracket_check(p: &(impl LogPotential + ?Sized), w: &CPoint) -> Result<f64> {
    if p.kappa() != 1.0 {
        return Err(GeomError::Unsupported("bracket check is stated for κ = 1".into()));
    }
    let v = p.gradient_field(w)?;
    let n = p.dim();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let comp = |q: &CPoint| p.gradient_field(q).map(|g| g[k]).unwrap_or(c(f64::NAN, f64::NAN));
        let (_, anti) = diff::wirtinger(&comp, w, diff::STEP);
        let bracket: Complex64 = -(0..n).map(|j| v[j].conj() * anti[j]).sum::<Complex64>();
        worst = worst.max((bracket - v[k]).norm());
    }
    Ok(worst)
}
