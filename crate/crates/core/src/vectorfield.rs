//! Holomorphic vector fields with polynomial coefficients of degree at most
//! two, the basis of `aut(ℍⁿ)`, brackets, grading and pushforwards.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::domain::CPoint;
use crate::error::{GeomError, Result};
use crate::linalg::{self, CMatrix};
use crate::potential::{HoloPoly, LogPotential};
use crate::sampling::grid_siegel;
use crate::{c, re, Complex64, I};

/// `V^i(w) = c^i + Σ_j A^i_j w_j + Σ_{j,k} Q^i_{jk} w_j w_k` with `Q^i`
/// symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "FieldRecord", try_from = "FieldRecord")]
pub struct PolyVF {
    pub constant: Vec<Complex64>,
    pub linear: Vec<Vec<Complex64>>,
    quad: Vec<Vec<Vec<Complex64>>>,
}

/// Serialized form: one polynomial per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub n: usize,
    pub components: Vec<HoloPoly>,
}

impl From<PolyVF> for FieldRecord {
    fn from(v: PolyVF) -> Self {
        let n = v.dim();
        let components = (0..n).map(|i| v.component_poly(i)).collect();
        FieldRecord { n, components }
    }
}

impl TryFrom<FieldRecord> for PolyVF {
    type Error = String;

    fn try_from(r: FieldRecord) -> std::result::Result<Self, String> {
        if r.components.len() != r.n {
            return Err(format!("expected {} components, got {}", r.n, r.components.len()));
        }
        let mut v = PolyVF::zero(r.n);
        for (i, p) in r.components.iter().enumerate() {
            for (e, z) in p.terms() {
                if e.len() != r.n {
                    return Err(format!("component {i}: expected {} exponents", r.n));
                }
                let idx: Vec<usize> = e.iter().enumerate().flat_map(|(k, &m)| std::iter::repeat_n(k, m as usize)).collect();
                match idx.as_slice() {
                    [] => v.constant[i] += z,
                    [j] => v.linear[i][*j] += z,
                    [j, k] => v.add_quad_monomial(i, *j, *k, *z),
                    _ => return Err(format!("component {i}: degree above 2")),
                }
            }
        }
        Ok(v)
    }
}

impl PolyVF {
    pub fn zero(n: usize) -> Self {
        let z = Complex64::default();
        Self {
            constant: vec![z; n],
            linear: vec![vec![z; n]; n],
            quad: vec![vec![vec![z; n]; n]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.constant.len()
    }

    /// `Q^i_{jk}`.
    pub fn quad(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.quad[i][j][k]
    }

    /// Adds `coeff·w_j w_k` to component `i`, keeping `Q^i` symmetric.
    pub fn add_quad_monomial(&mut self, i: usize, j: usize, k: usize, coeff: Complex64) {
        if j == k {
            self.quad[i][j][j] += coeff;
        } else {
            let half = coeff * 0.5;
            self.quad[i][j][k] += half;
            self.quad[i][k][j] += half;
        }
    }

    pub fn eval(&self, w: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.constant[i];
                for j in 0..n {
                    acc += self.linear[i][j] * w[j];
                    for k in 0..n {
                        acc += self.quad[i][j][k] * w[j] * w[k];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn eval_at(&self, p: &CPoint) -> Vec<Complex64> {
        self.eval(p.coords())
    }

    pub fn component_poly(&self, i: usize) -> HoloPoly {
        let n = self.dim();
        let mut p = HoloPoly::zero();
        let unit = |idx: &[usize]| {
            let mut e = vec![0u32; n];
            for &k in idx {
                e[k] += 1;
            }
            e
        };
        p.add_term(unit(&[]), self.constant[i]);
        for j in 0..n {
            p.add_term(unit(&[j]), self.linear[i][j]);
            for k in j..n {
                let m = if j == k { self.quad[i][j][j] } else { self.quad[i][j][k] * 2.0 };
                p.add_term(unit(&[j, k]), m);
            }
        }
        p
    }

    /// Monomial coefficients, component by component: constant, the `n`
    /// linear terms, then `w_j w_k` for `j ≤ k`.
    pub fn monomial_vec(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * monomial_count(n));
        for i in 0..n {
            out.push(self.constant[i]);
            out.extend_from_slice(&self.linear[i]);
            for j in 0..n {
                for k in j..n {
                    out.push(if j == k { self.quad[i][j][j] } else { self.quad[i][j][k] * 2.0 });
                }
            }
        }
        out
    }

    pub fn from_monomial_vec(n: usize, v: &[Complex64]) -> Self {
        let m = monomial_count(n);
        let mut f = Self::zero(n);
        for i in 0..n {
            let row = &v[i * m..(i + 1) * m];
            f.constant[i] = row[0];
            f.linear[i].copy_from_slice(&row[1..=n]);
            let mut pos = n + 1;
            for j in 0..n {
                for k in j..n {
                    f.add_quad_monomial(i, j, k, row[pos]);
                    pos += 1;
                }
            }
        }
        f
    }

    pub fn add(&self, other: &PolyVF) -> PolyVF {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyVF) -> PolyVF {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> PolyVF {
        self.zip(self, |a, _| a * s)
    }

    fn zip(&self, other: &PolyVF, f: impl Fn(Complex64, Complex64) -> Complex64) -> PolyVF {
        let a = self.monomial_vec();
        let b = other.monomial_vec();
        let v: Vec<Complex64> = a.iter().zip(&b).map(|(&x, &y)| f(x, y)).collect();
        PolyVF::from_monomial_vec(self.dim(), &v)
    }

    /// Largest monomial coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.monomial_vec().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &PolyVF) -> f64 {
        self.sub(other).max_abs()
    }

    /// Degree of the highest nonzero coefficient.
    pub fn degree(&self) -> u32 {
        let nz = |z: &Complex64| *z != Complex64::default();
        if self.quad.iter().flatten().flatten().any(nz) {
            2
        } else if self.linear.iter().flatten().any(nz) {
            1
        } else {
            0
        }
    }
}

/// Monomials of degree at most two in `n` variables.
pub fn monomial_count(n: usize) -> usize {
    1 + n + n * (n + 1) / 2
}

/// Labels of the basis of `aut(ℍⁿ)`. Indices are zero-based and range over
/// `0..n-1`; `U` and `V` need `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisTag {
    T,
    T2(usize),
    T3(usize),
    D,
    U(usize, usize),
    V(usize, usize),
    Wk(usize),
    Tt,
    Tt2(usize),
    Tt3(usize),
}

impl fmt::Display for BasisTag {
    /// Indices are printed one-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisTag::T => write!(f, "T"),
            BasisTag::T2(k) => write!(f, "T2_{}", k + 1),
            BasisTag::T3(k) => write!(f, "T3_{}", k + 1),
            BasisTag::D => write!(f, "D"),
            BasisTag::U(i, j) => write!(f, "U_{},{}", i + 1, j + 1),
            BasisTag::V(i, j) => write!(f, "V_{},{}", i + 1, j + 1),
            BasisTag::Wk(k) => write!(f, "W_{}", k + 1),
            BasisTag::Tt => write!(f, "Tt"),
            BasisTag::Tt2(k) => write!(f, "Tt2_{}", k + 1),
            BasisTag::Tt3(k) => write!(f, "Tt3_{}", k + 1),
        }
    }
}

impl BasisTag {
    /// Whether the field belongs to the grade `1/2` or `1` part.
    pub fn is_tilde(&self) -> bool {
        matches!(self, BasisTag::Tt | BasisTag::Tt2(_) | BasisTag::Tt3(_))
    }

    /// Grade fixed by the construction.
    pub fn nominal_grade(&self) -> f64 {
        match self {
            BasisTag::T => -1.0,
            BasisTag::T2(_) | BasisTag::T3(_) => -0.5,
            BasisTag::D | BasisTag::U(..) | BasisTag::V(..) | BasisTag::Wk(_) => 0.0,
            BasisTag::Tt2(_) | BasisTag::Tt3(_) => 0.5,
            BasisTag::Tt => 1.0,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let m = n - 1;
        let bad = |index| Err(GeomError::InvalidIndex { index, n });
        match *self {
            BasisTag::T2(k) | BasisTag::T3(k) | BasisTag::Wk(k) | BasisTag::Tt2(k) | BasisTag::Tt3(k) if k >= m => bad(k),
            BasisTag::U(_, j) | BasisTag::V(_, j) if j >= m => bad(j),
            BasisTag::U(i, j) | BasisTag::V(i, j) if i >= j => bad(i),
            _ => Ok(()),
        }
    }
}

/// All `n² + 2n` tags in a fixed order: `T`, `T2_k`, `T3_k`, `D`, `U`, `V`,
/// `W_k`, `Tt2_k`, `Tt3_k`, `Tt`.
pub fn basis_tags(n: usize) -> Vec<BasisTag> {
    let m = n - 1;
    let mut tags = vec![BasisTag::T];
    tags.extend((0..m).map(BasisTag::T2));
    tags.extend((0..m).map(BasisTag::T3));
    tags.push(BasisTag::D);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    tags.extend(pairs.iter().map(|&(i, j)| BasisTag::U(i, j)));
    tags.extend(pairs.iter().map(|&(i, j)| BasisTag::V(i, j)));
    tags.extend((0..m).map(BasisTag::Wk));
    tags.extend((0..m).map(BasisTag::Tt2));
    tags.extend((0..m).map(BasisTag::Tt3));
    tags.push(BasisTag::Tt);
    tags
}

/// The basis field with the given tag.
pub fn field(tag: BasisTag, n: usize) -> Result<PolyVF> {
    tag.check(n)?;
    let l = n - 1;
    let mut v = PolyVF::zero(n);
    let one = re(1.0);
    // Euler field E = Σ w_m ∂_m scaled by `coeff·w_k`.
    let euler_times = |v: &mut PolyVF, k: usize, coeff: Complex64| {
        for m in 0..n {
            v.add_quad_monomial(m, k, m, coeff);
        }
    };
    match tag {
        BasisTag::T => v.constant[l] = c(0.0, 2.0),
        BasisTag::T2(k) => {
            v.constant[k] = one;
            v.linear[l][k] = re(2.0);
        }
        BasisTag::T3(k) => {
            v.constant[k] = I;
            v.linear[l][k] = c(0.0, -2.0);
        }
        BasisTag::D => {
            for m in 0..l {
                v.linear[m][m] = one;
            }
            v.linear[l][l] = re(2.0);
        }
        BasisTag::U(i, j) => {
            v.linear[i][j] = one;
            v.linear[j][i] = -one;
        }
        BasisTag::V(i, j) => {
            v.linear[i][j] = I;
            v.linear[j][i] = I;
        }
        BasisTag::Wk(k) => v.linear[k][k] = I,
        BasisTag::Tt => euler_times(&mut v, l, c(0.0, -2.0)),
        BasisTag::Tt2(k) => {
            euler_times(&mut v, k, re(2.0));
            v.linear[k][l] -= one;
        }
        BasisTag::Tt3(k) => {
            euler_times(&mut v, k, c(0.0, -2.0));
            v.linear[k][l] -= I;
        }
    }
    Ok(v)
}

/// All basis fields with their tags.
pub fn basis(n: usize) -> Vec<(BasisTag, PolyVF)> {
    basis_tags(n)
        .into_iter()
        .map(|t| (t, field(t, n).expect("tags from basis_tags are valid")))
        .collect()
}

/// Threshold on the formal cubic part of a bracket.
pub const CUBIC_TOL: f64 = 1e-14;

/// Exact coefficient-level Lie bracket
/// `[V1, V2]^i = Σ_j (V1^j ∂_j V2^i − V2^j ∂_j V1^i)`.
pub fn bracket(v1: &PolyVF, v2: &PolyVF) -> Result<PolyVF> {
    let n = v1.dim();
    if v2.dim() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: v2.dim() });
    }
    let mut out = PolyVF::zero(n);
    let mut cubic: BTreeMap<(usize, [usize; 3]), Complex64> = BTreeMap::new();
    for (a, b, sign) in [(v1, v2, 1.0), (v2, v1, -1.0)] {
        for i in 0..n {
            for j in 0..n {
                // a^j · ∂_j b^i with ∂_j b^i = A_b^i_j + 2 Σ_k Q_b^i_{jk} w_k.
                out.constant[i] += a.constant[j] * b.linear[i][j] * sign;
                for p in 0..n {
                    out.linear[i][p] += (a.linear[j][p] * b.linear[i][j] + a.constant[j] * b.quad[i][j][p] * 2.0) * sign;
                    for q in 0..n {
                        let m = (a.quad[j][p][q] * b.linear[i][j] + a.linear[j][p] * b.quad[i][j][q] * 2.0) * sign;
                        out.add_quad_monomial(i, p, q, m);
                        for k in 0..n {
                            let t = a.quad[j][p][q] * b.quad[i][j][k] * 2.0 * sign;
                            if t != Complex64::default() {
                                let mut key = [p, q, k];
                                key.sort_unstable();
                                *cubic.entry((i, key)).or_default() += t;
                            }
                        }
                    }
                }
            }
        }
    }
    let max_cubic = cubic.values().map(|z| z.norm()).fold(0.0, f64::max);
    if max_cubic > CUBIC_TOL {
        return Err(GeomError::DegreeOverflow { max_cubic });
    }
    Ok(out)
}

/// `(Re V)Ψ = Re Σ_k V^k Ψ_k` for the real function `Ψ = eval_log(P)`.
pub fn re_apply(v: &PolyVF, p: &(impl LogPotential + ?Sized), w: &CPoint) -> Result<f64> {
    let g = p.grad_holo(w)?;
    let vals = v.eval_at(w);
    Ok(vals.iter().zip(&g).map(|(a, b)| a * b).sum::<Complex64>().re)
}

/// Tolerance for the eigenvector test in [`grade`].
pub const GRADE_TOL: f64 = 1e-12;

/// `a` with `[D, V] = 2a·V`.
pub fn grade(v: &PolyVF) -> Result<f64> {
    let n = v.dim();
    let d = field(BasisTag::D, n)?;
    let dv = bracket(&d, v)?;
    let x = v.monomial_vec();
    let y = dv.monomial_vec();
    let xx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if xx == 0.0 {
        return Err(GeomError::NotGraded { residual: 0.0 });
    }
    let lambda: Complex64 = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum::<Complex64>() / xx;
    let residual = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - a * lambda).norm())
        .fold(0.0, f64::max)
        .max(lambda.im.abs());
    let rounded = lambda.re.round();
    if residual > GRADE_TOL || (lambda.re - rounded).abs() > GRADE_TOL || rounded.abs() > 2.0 {
        return Err(GeomError::NotGraded { residual });
    }
    Ok(rounded / 2.0)
}

/// Least-squares fit of a degree-≤2 field to samples; returns the field and
/// the relative residual on the held-out samples.
pub fn fit_field(
    n: usize,
    points: &[CPoint],
    values: &[Vec<Complex64>],
    held_points: &[CPoint],
    held_values: &[Vec<Complex64>],
) -> (PolyVF, f64) {
    let m = monomial_count(n);
    let row = |p: &CPoint| {
        let w = p.coords();
        let mut r = Vec::with_capacity(m);
        r.push(re(1.0));
        r.extend_from_slice(w);
        for j in 0..n {
            for k in j..n {
                r.push(w[j] * w[k]);
            }
        }
        r
    };
    let mut a = CMatrix::zeros(points.len(), m);
    let mut b = CMatrix::zeros(points.len(), n);
    for (r, (p, v)) in points.iter().zip(values).enumerate() {
        for (col, z) in row(p).into_iter().enumerate() {
            a[(r, col)] = z;
        }
        for i in 0..n {
            b[(r, i)] = v[i];
        }
    }
    let x = linalg::lstsq(&a, &b);
    let mut coeffs = Vec::with_capacity(n * m);
    for i in 0..n {
        coeffs.extend(x.column(i).iter().copied());
    }
    let fitted = PolyVF::from_monomial_vec(n, &coeffs);
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (p, v) in held_points.iter().zip(held_values) {
        let got = fitted.eval_at(p);
        for i in 0..n {
            err = err.max((got[i] - v[i]).norm());
            scale = scale.max(v[i].norm());
        }
    }
    let residual = if scale > 0.0 { err / scale } else { err };
    (fitted, residual)
}

/// Held-out tolerance for [`pushforward`].
pub const PUSHFORWARD_TOL: f64 = 1e-10;

/// `(Φ_*V)(w) = dΦ(Φ⁻¹w)·V(Φ⁻¹w)` at one point, computed directly.
pub fn pushforward_at(phi: &Automorphism, v: &PolyVF, w: &CPoint) -> Result<Vec<Complex64>> {
    let inv = phi.inverse();
    let u = inv.map(w)?;
    let j = phi.jacobian(&u)?;
    let vu = v.eval_at(&u);
    let n = v.dim();
    Ok((0..n).map(|a| (0..n).map(|i| j[(a, i)] * vu[i]).sum()).collect())
}

/// `Φ_*V` fitted on a deterministic grid, with its held-out residual.
pub fn pushforward_detailed(phi: &Automorphism, v: &PolyVF) -> Result<(PolyVF, f64)> {
    let n = v.dim();
    if phi.dim() != n {
        return Err(GeomError::DimensionMismatch { expected: n, got: phi.dim() });
    }
    let m = n * n + 2 * n;
    let pts: Vec<CPoint> = (0..4 * m).map(|i| grid_siegel(n, i)).collect();
    let vals = pts.iter().map(|w| pushforward_at(phi, v, w)).collect::<Result<Vec<_>>>()?;
    let (f, residual) = fit_field(n, &pts[..3 * m], &vals[..3 * m], &pts[3 * m..], &vals[3 * m..]);
    if residual > PUSHFORWARD_TOL {
        return Err(GeomError::NotPolynomial { residual });
    }
    Ok((f, residual))
}

pub fn pushforward(phi: &Automorphism, v: &PolyVF) -> Result<PolyVF> {
    pushforward_detailed(phi, v).map(|x| x.0)
}

/// Exact pushforward by an affine automorphism `w ↦ Aw + b`:
/// `(Φ_*V)(w) = A·V(A⁻¹(w − b))`.
pub fn pushforward_affine(phi: &Automorphism, v: &PolyVF) -> Result<PolyVF> {
    let (a, b) = phi
        .affine_form()
        .ok_or_else(|| GeomError::Unsupported("automorphism is not affine".into()))?;
    let n = v.dim();
    let binv = a.clone().try_inverse().ok_or(GeomError::SingularJacobian)?;
    let beta = -(&binv * &b);
    // V(u) with u = B w + β.
    let mut inner = PolyVF::zero(n);
    for i in 0..n {
        let mut k0 = v.constant[i];
        for j in 0..n {
            k0 += v.linear[i][j] * beta[j];
            for k in 0..n {
                k0 += v.quad[i][j][k] * beta[j] * beta[k];
            }
        }
        inner.constant[i] = k0;
        for p in 0..n {
            let mut l = Complex64::default();
            for j in 0..n {
                l += v.linear[i][j] * binv[(j, p)];
                for k in 0..n {
                    l += v.quad[i][j][k] * binv[(j, p)] * beta[k] * 2.0;
                }
            }
            inner.linear[i][p] = l;
            for q in 0..n {
                let mut s = Complex64::default();
                for j in 0..n {
                    for k in 0..n {
                        s += v.quad[i][j][k] * binv[(j, p)] * binv[(k, q)];
                    }
                }
                inner.quad[i][p][q] = s;
            }
        }
    }
    let mut out = PolyVF::zero(n);
    for m in 0..n {
        for i in 0..n {
            let s = a[(m, i)];
            out.constant[m] += s * inner.constant[i];
            for p in 0..n {
                out.linear[m][p] += s * inner.linear[i][p];
                for q in 0..n {
                    out.quad[m][p][q] += s * inner.quad[i][p][q];
                }
            }
        }
    }
    Ok(out)
}

/// Coefficients of a field over the basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub coeffs: Vec<(BasisTag, f64)>,
    pub residual: f64,
    pub max_imag: f64,
}

impl Decomposition {
    pub fn coefficient(&self, tag: BasisTag) -> f64 {
        self.coeffs.iter().find(|(t, _)| *t == tag).map_or(0.0, |x| x.1)
    }

    /// The nonzero coefficients with modulus above `tol`.
    pub fn support(&self, tol: f64) -> Vec<(BasisTag, f64)> {
        self.coeffs.iter().copied().filter(|(_, x)| x.abs() > tol).collect()
    }

    pub fn to_field(&self, n: usize) -> PolyVF {
        combine(n, &self.coeffs)
    }
}

/// `Σ x_t·field(t)`.
pub fn combine(n: usize, coeffs: &[(BasisTag, f64)]) -> PolyVF {
    coeffs.iter().fold(PolyVF::zero(n), |acc, &(t, x)| {
        acc.add(&field(t, n).expect("valid tag").scale(re(x)))
    })
}

/// Tolerances for [`decompose_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeTol {
    pub residual: f64,
    pub imag: f64,
}

impl Default for DecomposeTol {
    fn default() -> Self {
        Self {
            residual: 1e-8,
            imag: 1e-12,
        }
    }
}

pub fn decompose(v: &PolyVF) -> Result<Decomposition> {
    decompose_with(v, DecomposeTol::default())
}

/// Complex least squares onto the basis in monomial-coefficient space.
/// Membership needs a small residual and nearly real coefficients.
pub fn decompose_with(v: &PolyVF, tol: DecomposeTol) -> Result<Decomposition> {
    let n = v.dim();
    let fields = basis(n);
    let target = v.monomial_vec();
    let rows = target.len();
    let mut a = CMatrix::zeros(rows, fields.len());
    for (col, (_, f)) in fields.iter().enumerate() {
        for (r, z) in f.monomial_vec().into_iter().enumerate() {
            a[(r, col)] = z;
        }
    }
    let b = CMatrix::from_column_slice(rows, 1, &target);
    let x = linalg::lstsq(&a, &b);
    let fit = &a * &x;
    let scale = target.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let residual = (0..rows).map(|r| (fit[(r, 0)] - b[(r, 0)]).norm()).fold(0.0, f64::max) / scale;
    let max_imag = x.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residual > tol.residual || max_imag > tol.imag {
        return Err(GeomError::NotInAlgebra { residual, max_imag });
    }
    Ok(Decomposition {
        coeffs: fields.iter().zip(x.iter()).map(|((t, _), z)| (*t, z.re)).collect(),
        residual,
        max_imag,
    })
}
