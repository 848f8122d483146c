//! Kähler–Einstein metrics of `𝔹ⁿ` and `ℍⁿ` in closed form.
//!
//! A [`HermitianForm`] of kind [`FormKind::Metric`] stores `G[i][j] = g_{ij̄}`.
//! One of kind [`FormKind::InverseMetric`] stores `H[k][j] = g^{kj̄}`, so the
//! defining relation `Σ_j g_{ij̄} g^{kj̄} = δ_{ik}` reads `G·Hᵀ = I`.

use nalgebra::DMatrix;

use crate::automorphism::HoloMap;
use crate::diff;
use crate::domain::{rho0, rho0_holo_gradient, CPoint, Model};
use crate::error::{GeomError, Result};
use crate::linalg::{self, CMatrix};
use crate::{re, Complex64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    Metric,
    InverseMetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    pub entries: CMatrix,
    pub base_point: CPoint,
    pub kind: FormKind,
}

impl HermitianForm {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |A[i][j] − conj(A[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let a = &self.entries;
        let mut worst: f64 = 0.0;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_positive_definite(&self) -> bool {
        self.entries.clone().cholesky().is_some()
    }

    pub fn det(&self) -> f64 {
        linalg::det(&self.entries).re
    }
}

fn hermitian_from_upper(n: usize, f: impl Fn(usize, usize) -> Complex64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = re(f(i, i).re);
        for j in i + 1..n {
            let v = f(i, j);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    m
}

/// `g_{ij̄} = (n+1)[δ_{ij}1_{i,j<n}/ρ₀ + ρ_i ρ̄_j/ρ₀²]` on `ℍⁿ`.
pub fn metric_siegel(w: &CPoint) -> Result<HermitianForm> {
    let rho = rho0(w);
    if rho <= 0.0 {
        return Err(GeomError::OutsideDomain { value: rho });
    }
    let n = w.dim();
    let k = (n + 1) as f64;
    let d = rho0_holo_gradient(w);
    let entries = hermitian_from_upper(n, |i, j| {
        let diag = if i == j && i < n - 1 { 1.0 / rho } else { 0.0 };
        (re(diag) + d[i] * d[j].conj() / (rho * rho)) * k
    });
    Ok(HermitianForm {
        entries,
        base_point: w.clone(),
        kind: FormKind::Metric,
    })
}

/// `(ρ₀/(n+1))·[[I, 2w'], [2w'^*, 4 Re wₙ]]`.
pub fn inverse_metric_siegel(w: &CPoint) -> Result<HermitianForm> {
    let rho = rho0(w);
    if rho <= 0.0 {
        return Err(GeomError::OutsideDomain { value: rho });
    }
    let n = w.dim();
    let pre = rho / (n + 1) as f64;
    let x = w.coords();
    let entries = hermitian_from_upper(n, |i, j| {
        let v = if j == n - 1 {
            if i == n - 1 {
                re(4.0 * x[n - 1].re)
            } else {
                x[i] * 2.0
            }
        } else if i == j {
            re(1.0)
        } else {
            Complex64::default()
        };
        v * pre
    });
    Ok(HermitianForm {
        entries,
        base_point: w.clone(),
        kind: FormKind::InverseMetric,
    })
}

/// `g_{ij̄} = (n+1)[δ_{ij}/s + z̄_i z_j/s²]`, `s = 1 − |z|²`.
pub fn metric_ball(z: &CPoint) -> Result<HermitianForm> {
    let s = 1.0 - z.norm_sqr();
    if s <= 0.0 {
        return Err(GeomError::OutsideDomain { value: s });
    }
    let n = z.dim();
    let k = (n + 1) as f64;
    let x = z.coords();
    let entries = hermitian_from_upper(n, |i, j| {
        let diag = if i == j { 1.0 / s } else { 0.0 };
        (re(diag) + x[i].conj() * x[j] / (s * s)) * k
    });
    Ok(HermitianForm {
        entries,
        base_point: z.clone(),
        kind: FormKind::Metric,
    })
}

/// `g^{kj̄} = (s/(n+1))(δ_{kj} − z_k z̄_j)`.
pub fn inverse_metric_ball(z: &CPoint) -> Result<HermitianForm> {
    let s = 1.0 - z.norm_sqr();
    if s <= 0.0 {
        return Err(GeomError::OutsideDomain { value: s });
    }
    let n = z.dim();
    let pre = s / (n + 1) as f64;
    let x = z.coords();
    let entries = hermitian_from_upper(n, |k, j| {
        let diag = if k == j { 1.0 } else { 0.0 };
        (re(diag) - x[k] * x[j].conj()) * pre
    });
    Ok(HermitianForm {
        entries,
        base_point: z.clone(),
        kind: FormKind::InverseMetric,
    })
}

pub fn metric(p: &CPoint) -> Result<HermitianForm> {
    match p.model() {
        Model::Ball => metric_ball(p),
        Model::Siegel => metric_siegel(p),
    }
}

pub fn inverse_metric(p: &CPoint) -> Result<HermitianForm> {
    match p.model() {
        Model::Ball => inverse_metric_ball(p),
        Model::Siegel => inverse_metric_siegel(p),
    }
}

/// `Σ_j g_{ij̄} g^{kj̄}`, i.e. `G·Hᵀ`.
pub fn contract(g: &HermitianForm, h: &HermitianForm) -> CMatrix {
    &g.entries * h.entries.transpose()
}

/// `Σ_{k,j} a_k ā_j g^{kj̄}`.
pub fn norm_sq_with(a: &[Complex64], h: &HermitianForm) -> f64 {
    let n = a.len();
    let mut acc = Complex64::default();
    for k in 0..n {
        for j in 0..n {
            acc += a[k] * a[j].conj() * h.entries[(k, j)];
        }
    }
    acc.re
}

/// Squared norm of the `(1,0)`-form `Σ a_k dw_k` at `p`.
pub fn norm_sq_form(a: &[Complex64], p: &CPoint) -> Result<f64> {
    p.check_dim(a.len())?;
    Ok(norm_sq_with(a, &inverse_metric(p)?))
}

/// The Kähler potential `−(n+1) log ρ` of the model `p` lives in.
pub fn kahler_potential(p: &CPoint) -> f64 {
    let k = (p.dim() + 1) as f64;
    let rho = match p.model() {
        Model::Ball => 1.0 - p.norm_sqr(),
        Model::Siegel => rho0(p),
    };
    -k * rho.ln()
}

fn max_levi_gap<F: Fn(&CPoint) -> f64>(f: &F, p: &CPoint, g: &HermitianForm, sign: f64) -> f64 {
    let l = diff::levi_matrix(f, p, diff::STEP);
    let n = p.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((l[i][j] + g.entries[(i, j)] * sign).norm());
        }
    }
    worst
}

/// Max-norm of `∂∂̄(−(n+1) log ρ) − g`, by finite differences.
pub fn hessian_residual(p: &CPoint) -> Result<f64> {
    p.require_interior()?;
    let g = metric(p)?;
    Ok(max_levi_gap(&kahler_potential, p, &g, -1.0))
}

/// Max-norm of `Ric(g) + g` with `Ric = −∂∂̄ log det g`, by finite
/// differences of `log det g`.
pub fn einstein_residual(p: &CPoint) -> Result<f64> {
    p.require_interior()?;
    let g = metric(p)?;
    let logdet = |q: &CPoint| metric(q).map(|m| m.det().ln()).unwrap_or(f64::NAN);
    Ok(max_levi_gap(&logdet, p, &g, -1.0))
}

/// `Jᵀ G J̄`: the pullback of the form `G` (at the image point) under a
/// holomorphic map with Jacobian `J[a][i] = ∂F_a/∂z_i`.
pub fn pullback(g: &HermitianForm, jac: &CMatrix) -> CMatrix {
    jac.transpose() * &g.entries * jac.map(|z| z.conj())
}

/// Relative gap `|det g(G(z))·|det dG(z)|² − det g(z)| / det g(z)`, each
/// metric taken in the model its point lives in.
pub fn isometry_det_identity(map: &dyn HoloMap, z: &CPoint) -> Result<f64> {
    z.require_interior()?;
    let image = map.eval(z)?;
    let jac = map.jacobian(z)?;
    let dj = linalg::det(&jac);
    if dj.norm() == 0.0 || !dj.norm().is_finite() {
        return Err(GeomError::SingularJacobian);
    }
    let lhs = metric(&image)?.det() * dj.norm_sqr();
    let rhs = metric(z)?.det();
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Max-norm of `Jᵀ G(Φ(w)) J̄ − G(w)`, relative to `max |G(w)|`.
pub fn isometry_residual(map: &dyn HoloMap, p: &CPoint) -> Result<f64> {
    let image = map.eval(p)?;
    let jac = map.jacobian(p)?;
    let back = pullback(&metric(&image)?, &jac);
    let here = metric(p)?;
    Ok(linalg::max_abs(&(back - &here.entries)) / linalg::max_abs(&here.entries))
}

/// Real `n×n` identity, handy for comparisons.
pub fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use crate::sampling::Sampler;

    #[test]
    fn siegel_metric_at_base_point() {
        for n in 1..=4 {
            let g = metric_siegel(&CPoint::siegel_base(n)).unwrap();
            let k = (n + 1) as f64;
            for i in 0..n {
                let want = if i == n - 1 { k / 4.0 } else { k };
                assert!((g.entries[(i, i)] - re(want)).norm() < 1e-14);
            }
            let h = inverse_metric_siegel(&CPoint::siegel_base(n)).unwrap();
            for i in 0..n {
                let want = if i == n - 1 { 4.0 / k } else { 1.0 / k };
                assert!((h.entries[(i, i)] - re(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_at_sample_point() {
        let w = CPoint::siegel(vec![re(0.5), re(1.0)]);
        let h = inverse_metric_siegel(&w).unwrap();
        let pre = 0.75 / 3.0;
        let want = [[1.0, 1.0], [1.0, 4.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h.entries[(i, j)] - re(pre * want[i][j])).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn outside_domain_errors() {
        let w = CPoint::siegel(vec![re(1.0), re(0.5)]);
        assert!(matches!(metric_siegel(&w), Err(GeomError::OutsideDomain { .. })));
        assert!(matches!(inverse_metric_siegel(&w), Err(GeomError::OutsideDomain { .. })));
        let z = CPoint::ball(vec![re(1.0), re(0.5)]);
        assert!(matches!(metric_ball(&z), Err(GeomError::OutsideDomain { .. })));
    }

    #[test]
    fn forms_are_hermitian_and_inverse() {
        let mut s = Sampler::new(5);
        for n in 1..=5 {
            for _ in 0..30 {
                for p in [s.siegel_point(n), s.ball_point(n)] {
                    let g = metric(&p).unwrap();
                    let h = inverse_metric(&p).unwrap();
                    assert_eq!(g.hermitian_defect(), 0.0);
                    assert_eq!(h.hermitian_defect(), 0.0);
                    assert!(g.is_positive_definite());
                    let prod = contract(&g, &h) - identity(n);
                    assert!(linalg::max_abs(&prod) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn norm_of_dwn_at_base() {
        for n in 1..=4 {
            let mut a = vec![Complex64::default(); n];
            a[n - 1] = re(1.0);
            let v = norm_sq_form(&a, &CPoint::siegel_base(n)).unwrap();
            assert!((v - 4.0 / (n + 1) as f64).abs() < 1e-15);
            assert_eq!(norm_sq_form(&vec![Complex64::default(); n], &CPoint::siegel_base(n)).unwrap(), 0.0);
        }
    }

    #[test]
    fn hessian_and_einstein_checks() {
        let mut s = Sampler::new(8);
        for n in 1..=3 {
            for _ in 0..5 {
                for p in [s.siegel_point(n), s.ball_point(n)] {
                    assert!(hessian_residual(&p).unwrap() <= 1e-5);
                    assert!(einstein_residual(&p).unwrap() <= 1e-4);
                }
            }
        }
        let half_plane = CPoint::siegel(vec![c(2.0, 0.0)]);
        assert!(einstein_residual(&half_plane).unwrap() <= 1e-4);
    }
}
