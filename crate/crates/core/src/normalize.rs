//! Normalization of the `W` field of a constant-norm potential and the
//! resulting classification.
//!
//! A field in the grade-≤0 part of `aut(ℍⁿ)` is written
//! `W = aD + bT + Σ c_k T2_k + Σ d_k T3_k + Σ e_ij U_ij + Σ f_ij V_ij + Σ g_k W_k`.
//! Coordinate swaps move it to a collapsed form supported on the first
//! primed coordinate, Heisenberg shifts remove the `T2`/`T3` part, and the
//! `T` flow removes `T` when `a ≠ 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::automorphism::{Automorphism, Generator, InverseCayley};
use crate::domain::{CPoint, Model};
use crate::error::{GeomError, Result};
use crate::potential::{log_psi0, norm_spread, w_field_detailed, LogPotential, Potential, Pullback, NORM_SAMPLES};
use crate::sampling::grid_siegel;
use crate::vectorfield::{combine, decompose_with, field, pushforward_affine, re_apply, BasisTag, DecomposeTol, Decomposition, PolyVF};

/// Norm spread above which a potential is rejected.
pub const NORM_SPREAD_TOL: f64 = 1e-8;
/// Largest tilde component treated as zero.
pub const TILDE_TOL: f64 = 1e-8;
/// Largest `|a|` treated as zero.
pub const A_TOL: f64 = 1e-8;
/// Target for the removed components.
pub const KILL_TOL: f64 = 1e-9;
/// Spread allowed for `log(ψ∘Φ⁻¹) − log ψ₀`.
pub const CONSTANCY_TOL: f64 = 1e-7;
pub const CONSTANCY_SAMPLES: usize = 128;

/// Decomposition tolerance for fitted fields.
const FITTED: DecomposeTol = DecomposeTol {
    residual: 1e-8,
    imag: 1e-8,
};

/// Coefficients of a grade-≤0 field. `e` and `f` are `(n−1)×(n−1)` with
/// only `i < j` used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldCoeffs {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub e: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
    pub g: Vec<f64>,
}

impl FieldCoeffs {
    pub fn zero(n: usize) -> Self {
        let m = n - 1;
        Self {
            n,
            a: 0.0,
            b: 0.0,
            c: vec![0.0; m],
            d: vec![0.0; m],
            e: vec![vec![0.0; m]; m],
            f: vec![vec![0.0; m]; m],
            g: vec![0.0; m],
        }
    }

    /// Reads the grade-≤0 coefficients; tilde components are ignored.
    pub fn from_decomposition(n: usize, dec: &Decomposition) -> Self {
        let mut out = Self::zero(n);
        for &(tag, x) in &dec.coeffs {
            match tag {
                BasisTag::D => out.a = x,
                BasisTag::T => out.b = x,
                BasisTag::T2(k) => out.c[k] = x,
                BasisTag::T3(k) => out.d[k] = x,
                BasisTag::U(i, j) => out.e[i][j] = x,
                BasisTag::V(i, j) => out.f[i][j] = x,
                BasisTag::Wk(k) => out.g[k] = x,
                BasisTag::Tt | BasisTag::Tt2(_) | BasisTag::Tt3(_) => {}
            }
        }
        out
    }

    pub fn tags(&self) -> Vec<(BasisTag, f64)> {
        let m = self.n - 1;
        let mut out = vec![(BasisTag::D, self.a), (BasisTag::T, self.b)];
        for k in 0..m {
            out.push((BasisTag::T2(k), self.c[k]));
            out.push((BasisTag::T3(k), self.d[k]));
            out.push((BasisTag::Wk(k), self.g[k]));
            for j in k + 1..m {
                out.push((BasisTag::U(k, j), self.e[k][j]));
                out.push((BasisTag::V(k, j), self.f[k][j]));
            }
        }
        out
    }

    pub fn to_field(&self) -> PolyVF {
        combine(self.n, &self.tags())
    }

    /// Largest `|T2|`, `|T3|` coefficient.
    pub fn shift_part(&self) -> f64 {
        self.c.iter().chain(&self.d).fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Coefficients after the coordinate swaps. `e[i]`, `f[i]` belong to
/// `U_{1,i+2}`, `V_{1,i+2}` (one-based), so both have length `n − 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapsedCoeffs {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub g: f64,
}

impl CollapsedCoeffs {
    pub fn to_full(&self) -> FieldCoeffs {
        let mut out = FieldCoeffs::zero(self.n);
        out.a = self.a;
        out.b = self.b;
        if self.n > 1 {
            out.c[0] = self.c;
            out.d[0] = self.d;
            out.g[0] = self.g;
            for (i, (&e, &f)) in self.e.iter().zip(&self.f).enumerate() {
                out.e[0][i + 1] = e;
                out.f[0][i + 1] = f;
            }
        }
        out
    }

    pub fn to_field(&self) -> PolyVF {
        self.to_full().to_field()
    }

    fn pairs(&self) -> usize {
        self.n.saturating_sub(1)
    }
}

/// The swaps `w₁ ↔ w_k`, `k = 2 … n−1`, applied in increasing `k`.
pub fn permutation_composite(n: usize) -> Automorphism {
    let gens = (1..n.saturating_sub(1)).map(Generator::Perm1k).collect();
    Automorphism::new(n, gens).expect("indices below n − 1")
}

/// Reads the collapsed form of an exact field, or reports the largest
/// component off the first primed coordinate.
fn read_collapsed(n: usize, w: &PolyVF) -> Result<CollapsedCoeffs> {
    let dec = decompose_with(w, FITTED)?;
    let scale = dec.coeffs.iter().fold(1.0, |acc: f64, (_, x)| acc.max(x.abs()));
    let stray = dec
        .coeffs
        .iter()
        .filter(|(t, _)| match *t {
            BasisTag::T2(k) | BasisTag::T3(k) | BasisTag::Wk(k) => k > 0,
            BasisTag::U(i, _) | BasisTag::V(i, _) => i > 0,
            _ => false,
        })
        .fold(0.0, |acc: f64, (_, x)| acc.max(x.abs()));
    if stray > KILL_TOL * scale {
        return Err(GeomError::NotCollapsible { residual: stray });
    }
    let full = FieldCoeffs::from_decomposition(n, &dec);
    let m = n - 1;
    Ok(CollapsedCoeffs {
        n,
        a: full.a,
        b: full.b,
        c: full.c.first().copied().unwrap_or(0.0),
        d: full.d.first().copied().unwrap_or(0.0),
        e: (1..m).map(|j| full.e[0][j]).collect(),
        f: (1..m).map(|j| full.f[0][j]).collect(),
        g: full.g.first().copied().unwrap_or(0.0),
    })
}

/// Pushes the field through the swaps and reads the collapsed form from the
/// exact result. Fails when the pushed field keeps components off the first
/// primed coordinate.
pub fn collapse_permutations(coeffs: &FieldCoeffs) -> Result<(Automorphism, CollapsedCoeffs)> {
    let pi = permutation_composite(coeffs.n);
    let pushed = pushforward_affine(&pi, &coeffs.to_field())?;
    let cc = read_collapsed(coeffs.n, &pushed)?;
    Ok((pi, cc))
}

/// Summed coefficients `c = Σc_k`, `d = Σd_k`, `e_j = −Σ_{i<j} e_ij`,
/// `f_j = Σ_{i<j} f_ij`, `g = Σg_k`. Agrees with
/// [`collapse_permutations`] only when the swaps actually land every
/// component on the first primed coordinate.
pub fn collapse_by_formula(coeffs: &FieldCoeffs) -> CollapsedCoeffs {
    let m = coeffs.n - 1;
    CollapsedCoeffs {
        n: coeffs.n,
        a: coeffs.a,
        b: coeffs.b,
        c: coeffs.c.iter().sum(),
        d: coeffs.d.iter().sum(),
        e: (1..m).map(|j| -(0..j).map(|i| coeffs.e[i][j]).sum::<f64>()).collect(),
        f: (1..m).map(|j| (0..j).map(|i| coeffs.f[i][j]).sum::<f64>()).collect(),
        g: coeffs.g.iter().sum(),
    }
}

/// Heisenberg shift parameters `s_{2,ℓ}`, `s_{3,ℓ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shifts {
    pub s2: Vec<f64>,
    pub s3: Vec<f64>,
}

impl Shifts {
    pub fn zero(m: usize) -> Self {
        Self {
            s2: vec![0.0; m],
            s3: vec![0.0; m],
        }
    }
}

/// The linear system for the shifts. Unknowns are ordered
/// `s_{2,1}, s_{3,1}, s_{2,2}, s_{3,2}, …`.
pub fn build_shift_system(cc: &CollapsedCoeffs) -> (DMatrix<f64>, DVector<f64>) {
    let m = cc.pairs();
    let size = 2 * m;
    let mut a = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    if m == 0 {
        return (a, rhs);
    }
    a[(0, 0)] = cc.a;
    a[(0, 1)] = -cc.g;
    a[(1, 0)] = cc.g;
    a[(1, 1)] = cc.a;
    for (i, (&e, &f)) in cc.e.iter().zip(&cc.f).enumerate() {
        let col = 2 * (i + 1);
        a[(0, col)] = e;
        a[(0, col + 1)] = -f;
        a[(1, col)] = f;
        a[(1, col + 1)] = e;
        a[(col, 0)] = -e;
        a[(col, 1)] = -f;
        a[(col, col)] = cc.a;
        a[(col + 1, 0)] = f;
        a[(col + 1, 1)] = -e;
        a[(col + 1, col + 1)] = cc.a;
    }
    rhs[0] = cc.c;
    rhs[1] = cc.d;
    (a, rhs)
}

/// Solves [`build_shift_system`]; needs `a ≠ 0`.
pub fn solve_shifts(cc: &CollapsedCoeffs) -> Result<Shifts> {
    if cc.a == 0.0 {
        return Err(GeomError::SingularSystem { a: cc.a });
    }
    let m = cc.pairs();
    if m == 0 {
        return Ok(Shifts::zero(0));
    }
    let (a, rhs) = build_shift_system(cc);
    let x = a.lu().solve(&rhs).ok_or(GeomError::SingularSystem { a: cc.a })?;
    let mut out = Shifts::zero(m);
    for l in 0..m {
        out.s2[l] = x[2 * l];
        out.s3[l] = x[2 * l + 1];
    }
    Ok(out)
}

/// `s₁` removing the `T` component after the shifts:
/// the `T` coefficient of the shifted field divided by `2a`.
pub fn choose_s1(cc: &CollapsedCoeffs, shifts: &Shifts) -> Result<f64> {
    if cc.a == 0.0 {
        return Err(GeomError::SingularSystem { a: cc.a });
    }
    Ok(shifted_t_coefficient(cc, shifts) / (2.0 * cc.a))
}

/// `T` coefficient of the field after the shifts alone.
pub fn shifted_t_coefficient(cc: &CollapsedCoeffs, s: &Shifts) -> f64 {
    if cc.pairs() == 0 {
        return cc.b;
    }
    let (s21, s31) = (s.s2[0], s.s3[0]);
    let mut t = cc.b - 2.0 * cc.c * s31 + 2.0 * cc.d * s21 - (s21 * s21 + s31 * s31) * cc.g;
    t += 2.0 * cc.a * s.s2.iter().zip(&s.s3).map(|(x, y)| x * y).sum::<f64>();
    for (i, (&e, &f)) in cc.e.iter().zip(&cc.f).enumerate() {
        let (s2j, s3j) = (s.s2[i + 1], s.s3[i + 1]);
        t += 2.0 * e * (s31 * s2j - s21 * s3j);
        t -= 2.0 * f * (s31 * s3j + s21 * s2j);
    }
    t
}

/// Shift choice for `a = 0`.
///
/// With no `U`/`V` part: `g ≠ 0` gives `s_{3,1} = −c/g`, `s_{2,1} = d/g`;
/// `g = 0` takes the minimal-norm solution of `b − 2c·s_{3,1} + 2d·s_{2,1} = 0`.
/// Otherwise the first `j` with `(e_j, f_j) ≠ 0` carries the shift.
/// Coefficients within [`A_TOL`] of zero count as zero.
pub fn step2_shifts(cc: &CollapsedCoeffs) -> Shifts {
    let m = cc.pairs();
    let mut s = Shifts::zero(m);
    let nonzero = |x: f64| x.abs() > A_TOL;
    if m == 0 || !(nonzero(cc.c) || nonzero(cc.d)) {
        return s;
    }
    match cc.e.iter().zip(&cc.f).position(|(e, f)| nonzero(*e) || nonzero(*f)) {
        Some(i) => {
            let (e, f) = (cc.e[i], cc.f[i]);
            let q = e * e + f * f;
            s.s2[i + 1] = (e * cc.c + f * cc.d) / q;
            s.s3[i + 1] = (e * cc.d - f * cc.c) / q;
        }
        None if nonzero(cc.g) => {
            s.s3[0] = -cc.c / cc.g;
            s.s2[0] = cc.d / cc.g;
        }
        None => {
            let q = 4.0 * (cc.c * cc.c + cc.d * cc.d);
            s.s2[0] = -cc.b * 2.0 * cc.d / q;
            s.s3[0] = cc.b * 2.0 * cc.c / q;
        }
    }
    s
}

/// `𝒯_{s₁}` followed by the `T2` shifts and then the `T3` shifts; zero
/// parameters are omitted.
pub fn shift_automorphism(n: usize, s1: f64, shifts: &Shifts) -> Automorphism {
    let mut gens = vec![Generator::Ts(s1)];
    gens.extend(shifts.s2.iter().enumerate().map(|(k, &s)| Generator::T2k(k, s)));
    gens.extend(shifts.s3.iter().enumerate().map(|(k, &s)| Generator::T3k(k, s)));
    gens.retain(|g| !matches!(g, Generator::Ts(s) | Generator::T2k(_, s) | Generator::T3k(_, s) if *s == 0.0));
    Automorphism::new(n, gens).expect("shift indices below n − 1")
}

fn shift_components(n: usize, w: &PolyVF, s1: f64, shifts: &Shifts) -> Result<FieldCoeffs> {
    let pushed = pushforward_affine(&shift_automorphism(n, s1, shifts), w)?;
    Ok(FieldCoeffs::from_decomposition(n, &decompose_with(&pushed, FITTED)?))
}

/// Shifts for a field that is not in collapsed form. The `T2`/`T3` part of
/// the shifted field is affine in the shifts, so it is probed at zero and at
/// unit shifts and the resulting system is solved in the least-squares sense.
pub fn general_shifts(coeffs: &FieldCoeffs) -> Result<(f64, Shifts)> {
    let n = coeffs.n;
    let m = n - 1;
    let w = coeffs.to_field();
    let read = |fc: &FieldCoeffs| -> Vec<f64> { fc.c.iter().chain(&fc.d).copied().collect() };
    let base = read(&shift_components(n, &w, 0.0, &Shifts::zero(m))?);
    let mut shifts = Shifts::zero(m);
    if m > 0 {
        let mut a = DMatrix::zeros(2 * m, 2 * m);
        for u in 0..2 * m {
            let mut probe = Shifts::zero(m);
            if u < m {
                probe.s2[u] = 1.0;
            } else {
                probe.s3[u - m] = 1.0;
            }
            let y = read(&shift_components(n, &w, 0.0, &probe)?);
            for r in 0..2 * m {
                a[(r, u)] = y[r] - base[r];
            }
        }
        let rhs = -DVector::from_vec(base);
        let x = a
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| GeomError::Unsupported(e.to_string()))?;
        shifts.s2.copy_from_slice(&x.as_slice()[..m]);
        shifts.s3.copy_from_slice(&x.as_slice()[m..]);
    }
    let mut s1 = 0.0;
    if coeffs.a.abs() > A_TOL {
        let t = shift_components(n, &w, 0.0, &shifts)?.b;
        s1 = t / (2.0 * coeffs.a);
    }
    Ok((s1, shifts))
}

/// How the shifts were found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Route {
    /// Swaps, then the closed-form shift system.
    Collapsed,
    /// Probed affine solve without collapsing.
    General,
}

/// Result of [`normalize_field`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub phi: Automorphism,
    pub before: FieldCoeffs,
    pub after: FieldCoeffs,
    /// Largest `T2`/`T3` coefficient left, plus `T` when `a ≠ 0`.
    pub kill_residual: f64,
    pub route: Route,
}

/// Finds `Φ` built from swaps and shifts so that `Φ_*W` has no `T2`/`T3`
/// part and, if `a ≠ 0`, no `T` part. A field already in collapsed form
/// skips the swaps; one that no swap composite collapses is solved directly.
pub fn normalize_field(coeffs: &FieldCoeffs) -> Result<Normalization> {
    let n = coeffs.n;
    let a_nonzero = coeffs.a.abs() > A_TOL;
    let collapsed = match read_collapsed(n, &coeffs.to_field()) {
        Ok(cc) => Ok((Automorphism::identity(n), cc)),
        Err(GeomError::NotCollapsible { .. }) => collapse_permutations(coeffs),
        Err(e) => Err(e),
    };
    let (phi, route) = match collapsed {
        Ok((pi, cc)) => {
            let (s1, shifts) = if a_nonzero {
                let s = solve_shifts(&cc)?;
                (choose_s1(&cc, &s)?, s)
            } else {
                (0.0, step2_shifts(&cc))
            };
            (pi.then(&shift_automorphism(n, s1, &shifts)), Route::Collapsed)
        }
        Err(GeomError::NotCollapsible { .. }) => {
            let (s1, shifts) = general_shifts(coeffs)?;
            (shift_automorphism(n, s1, &shifts), Route::General)
        }
        Err(e) => return Err(e),
    };
    let pushed = pushforward_affine(&phi, &coeffs.to_field())?;
    let after = FieldCoeffs::from_decomposition(n, &decompose_with(&pushed, FITTED)?);
    let mut kill_residual = after.shift_part();
    if a_nonzero {
        kill_residual = kill_residual.max(after.b.abs());
    }
    Ok(Normalization {
        phi,
        before: coeffs.clone(),
        after,
        kill_residual,
        route,
    })
}

/// A potential recognized as `r·ψ₀∘Φ` on `ℍⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    pub r: f64,
    /// `ψ = r·ψ₀∘phi`.
    pub phi: Automorphism,
    pub norm_constant: f64,
    pub norm_spread: f64,
    /// Nonzero coefficients of the fitted `W`.
    pub w_support: Vec<(BasisTag, f64)>,
    pub kill_residual: f64,
    pub constancy_spread: f64,
    pub route: Route,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Canonical(Canonical),
    NotConstantNorm {
        estimate: f64,
        spread: f64,
    },
    /// `W` has grade `1/2` or `1` components; an isotropy element must be
    /// supplied first.
    NeedsIsotropy {
        components: Vec<(BasisTag, f64)>,
    },
    /// A `D` component survives normalization.
    Inconsistent {
        a: f64,
        re_d: f64,
    },
    /// Normalization succeeded but `ψ∘Φ⁻¹` is not a multiple of `ψ₀`.
    NotCanonical {
        kill_residual: f64,
        constancy_spread: f64,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Canonical(_) => "Canonical",
            Verdict::NotConstantNorm { .. } => "NotConstantNorm",
            Verdict::NeedsIsotropy { .. } => "NeedsIsotropy",
            Verdict::Inconsistent { .. } => "Inconsistent",
            Verdict::NotCanonical { .. } => "NotCanonical",
        }
    }

    pub fn canonical(&self) -> Option<&Canonical> {
        match self {
            Verdict::Canonical(c) => Some(c),
            _ => None,
        }
    }
}

/// Mean and spread of `log(ψ∘Φ⁻¹) − log ψ₀` on `ℍⁿ`.
pub fn constancy(p: &dyn LogPotential, phi: &Automorphism, samples: usize) -> Result<(f64, f64)> {
    let inv = phi.inverse();
    let pulled = Pullback {
        inner: p,
        map: &inv,
        model: Model::Siegel,
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for i in 0..samples {
        let q = grid_siegel(p.dim(), 20_000 + i);
        let v = pulled.eval_log(&q)? - log_psi0(&q)?;
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    Ok((sum / samples as f64, hi - lo))
}

/// Intermediate quantities recorded while classifying; stages that did
/// not run are left empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trace {
    pub norm_estimate: f64,
    pub norm_spread: f64,
    pub w_fit_residual: Option<f64>,
    pub w_coefficients: Vec<(BasisTag, f64)>,
    pub route: Option<Route>,
    pub a_after: Option<f64>,
    pub kill_residual: Option<f64>,
    pub constancy_spread: Option<f64>,
}

/// Classifies a log-potential on `ℍⁿ` with `κ = 1`.
pub fn classify_log_potential(p: &dyn LogPotential) -> Result<Verdict> {
    classify_traced(p).map(|(v, _)| v)
}

/// [`classify_log_potential`] together with its [`Trace`].
pub fn classify_traced(p: &dyn LogPotential) -> Result<(Verdict, Trace)> {
    if p.model() != Model::Siegel {
        return Err(GeomError::Unsupported("classification runs on the Siegel model".into()));
    }
    let n = p.dim();
    let mut trace = Trace::default();
    let (estimate, spread) = norm_spread(p, NORM_SAMPLES)?;
    trace.norm_estimate = estimate;
    trace.norm_spread = spread;
    if spread > NORM_SPREAD_TOL {
        return Ok((Verdict::NotConstantNorm { estimate, spread }, trace));
    }
    let fit = w_field_detailed(p)?;
    trace.w_fit_residual = Some(fit.fit_residual);
    let dec = decompose_with(&fit.field, FITTED)?;
    trace.w_coefficients = dec.support(TILDE_TOL);
    let components: Vec<(BasisTag, f64)> = dec
        .coeffs
        .iter()
        .copied()
        .filter(|(t, x)| t.is_tilde() && x.abs() > TILDE_TOL)
        .collect();
    if !components.is_empty() {
        return Ok((Verdict::NeedsIsotropy { components }, trace));
    }
    let coeffs = FieldCoeffs::from_decomposition(n, &dec);
    let norm = normalize_field(&coeffs)?;
    trace.route = Some(norm.route);
    trace.a_after = Some(norm.after.a);
    trace.kill_residual = Some(norm.kill_residual);
    if norm.after.a.abs() > A_TOL {
        let inv = norm.phi.inverse();
        let pulled = Pullback {
            inner: p,
            map: &inv,
            model: Model::Siegel,
        };
        let re_d = re_apply(&field(BasisTag::D, n)?, &pulled, &CPoint::siegel_base(n))?;
        return Ok((Verdict::Inconsistent { a: norm.after.a, re_d }, trace));
    }
    let (mean, constancy_spread) = constancy(p, &norm.phi, CONSTANCY_SAMPLES)?;
    trace.constancy_spread = Some(constancy_spread);
    if norm.kill_residual > KILL_TOL || constancy_spread > CONSTANCY_TOL {
        let v = Verdict::NotCanonical {
            kill_residual: norm.kill_residual,
            constancy_spread,
        };
        return Ok((v, trace));
    }
    let v = Verdict::Canonical(Canonical {
        r: mean.exp(),
        phi: norm.phi,
        norm_constant: fit.norm_mean,
        norm_spread: fit.norm_spread,
        w_support: dec.support(TILDE_TOL),
        kill_residual: norm.kill_residual,
        constancy_spread,
        route: norm.route,
    });
    Ok((v, trace))
}

fn on_siegel<R>(p: &Potential, run: impl FnOnce(&dyn LogPotential) -> R) -> R {
    match p.model() {
        Model::Siegel => run(p),
        Model::Ball => {
            let inv = InverseCayley(p.n);
            run(&Pullback {
                inner: p,
                map: &inv,
                model: Model::Siegel,
            })
        }
    }
}

/// Classifies `P`; ball potentials are transported to `ℍⁿ` by `𝒞⁻¹` first,
/// and the returned `Φ` then describes `P∘𝒞⁻¹`.
pub fn classify_potential(p: &Potential) -> Result<Verdict> {
    on_siegel(p, classify_log_potential)
}

/// Classifies `P` with its [`Trace`].
pub fn classify_potential_traced(p: &Potential) -> Result<(Verdict, Trace)> {
    on_siegel(p, classify_traced)
}

/// Classifies `P∘ι` for a supplied isotropy element `ι`; a canonical
/// verdict is reported for `P` itself, with `Φ` replaced by `Φ∘ι⁻¹`.
pub fn classify_with_isotropy(p: &Potential, iota: &Automorphism) -> Result<Verdict> {
    classify_with_isotropy_traced(p, iota).map(|(v, _)| v)
}

/// [`classify_with_isotropy`] together with its [`Trace`].
pub fn classify_with_isotropy_traced(p: &Potential, iota: &Automorphism) -> Result<(Verdict, Trace)> {
    on_siegel(p, |q| {
        let pulled = Pullback {
            inner: q,
            map: iota,
            model: Model::Siegel,
        };
        let (mut v, trace) = classify_traced(&pulled)?;
        if let Verdict::Canonical(c) = &mut v {
            c.phi = iota.inverse().then(&c.phi);
        }
        Ok((v, trace))
    })
}
