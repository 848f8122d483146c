//! Points of `ℂⁿ`, the defining function of the Siegel domain, and the
//! canonical biholomorphisms between the two models.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::{c, re, Complex64};

/// Which model a point is interpreted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Ball,
    Siegel,
}

/// A point of `ℂⁿ` tagged with the model it is meant to live in.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint {
    coords: Vec<Complex64>,
    model: Model,
}

impl CPoint {
    /// Panics if `coords` is empty.
    pub fn new(coords: Vec<Complex64>, model: Model) -> Self {
        assert!(!coords.is_empty(), "CPoint needs dimension >= 1");
        Self { coords, model }
    }

    pub fn siegel(coords: Vec<Complex64>) -> Self {
        Self::new(coords, Model::Siegel)
    }

    pub fn ball(coords: Vec<Complex64>) -> Self {
        Self::new(coords, Model::Ball)
    }

    /// `(0, …, 0, 1)`, the base point of `ℍⁿ`.
    pub fn siegel_base(n: usize) -> Self {
        let mut v = vec![Complex64::default(); n];
        v[n - 1] = re(1.0);
        Self::siegel(v)
    }

    pub fn origin(n: usize) -> Self {
        Self::ball(vec![Complex64::default(); n])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn last(&self) -> Complex64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    pub fn with_model(self, model: Model) -> Self {
        Self { model, ..self }
    }

    /// `|z|²` over all coordinates.
    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Whether the point lies in the open domain of its model.
    pub fn is_interior(&self) -> bool {
        match self.model {
            Model::Ball => self.norm_sqr() < 1.0,
            Model::Siegel => rho0(self) > 0.0,
        }
    }

    pub(crate) fn require_interior(&self) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            let value = match self.model {
                Model::Ball => 1.0 - self.norm_sqr(),
                Model::Siegel => rho0(self),
            };
            Err(GeomError::OutsideDomain { value })
        }
    }

    /// Real coordinates `(Re w₁, Im w₁, …)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.coords.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(x: &[f64], model: Model) -> Self {
        let coords = x.chunks_exact(2).map(|p| c(p[0], p[1])).collect();
        Self::new(coords, model)
    }

    /// Copy with one real coordinate shifted by `h` (index `2k` is `Re w_k`,
    /// `2k + 1` is `Im w_k`).
    pub fn shifted(&self, real_index: usize, h: f64) -> Self {
        let mut p = self.clone();
        let z = &mut p.coords[real_index / 2];
        if real_index % 2 == 0 {
            z.re += h;
        } else {
            z.im += h;
        }
        p
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(GeomError::DimensionMismatch {
                expected: n,
                got: self.dim(),
            })
        }
    }
}

/// `ρ₀(w) = Re wₙ − |w'|²`; positive exactly on `ℍⁿ`.
pub fn rho0(w: &CPoint) -> f64 {
    let n = w.dim();
    let tail: f64 = w.coords[..n - 1].iter().map(|z| z.norm_sqr()).sum();
    w.coords[n - 1].re - tail
}

/// Holomorphic gradient `∂ρ₀/∂w_k`: `−w̄_k` for `k < n`, `1/2` for `k = n`.
pub fn rho0_holo_gradient(w: &CPoint) -> Vec<Complex64> {
    let n = w.dim();
    let mut g: Vec<Complex64> = w.coords[..n - 1].iter().map(|z| -z.conj()).collect();
    g.push(re(0.5));
    g
}

/// The Cayley transform `𝔹ⁿ → ℍⁿ`,
/// `z ↦ (z'/(1 − zₙ), (1 + zₙ)/(1 − zₙ))`.
pub fn cayley(z: &CPoint) -> Result<CPoint> {
    let n = z.dim();
    let zn = z.coords[n - 1];
    let den = re(1.0) - zn;
    if den == Complex64::default() {
        return Err(GeomError::PoleAtBoundary { what: "z_n = 1" });
    }
    let mut out: Vec<Complex64> = z.coords[..n - 1].iter().map(|&zk| zk / den).collect();
    out.push((re(1.0) + zn) / den);
    Ok(CPoint::siegel(out))
}

/// The inverse Cayley transform `ℍⁿ → 𝔹ⁿ`,
/// `w ↦ (2w'/(wₙ + 1), (wₙ − 1)/(wₙ + 1))`.
pub fn cayley_inv(w: &CPoint) -> Result<CPoint> {
    let n = w.dim();
    let wn = w.coords[n - 1];
    let den = wn + 1.0;
    if den == Complex64::default() {
        return Err(GeomError::PoleAtBoundary { what: "w_n = -1" });
    }
    let mut out: Vec<Complex64> = w.coords[..n - 1].iter().map(|&wk| wk * 2.0 / den).collect();
    out.push((wn - 1.0) / den);
    Ok(CPoint::ball(out))
}

/// The involution `σ(w) = (−w'/wₙ, 1/wₙ)` of `ℍⁿ` fixing `(0, …, 0, 1)`.
pub fn sigma(w: &CPoint) -> Result<CPoint> {
    let n = w.dim();
    let wn = w.coords[n - 1];
    if wn == Complex64::default() {
        return Err(GeomError::PoleAtBoundary { what: "w_n = 0" });
    }
    let mut out: Vec<Complex64> = w.coords[..n - 1].iter().map(|&wk| -wk / wn).collect();
    out.push(wn.inv());
    Ok(CPoint::new(out, w.model))
}

/// Holomorphic Jacobian `J[a][i] = ∂𝒞_a/∂z_i`.
pub fn cayley_jacobian(z: &CPoint) -> Result<DMatrix<Complex64>> {
    let n = z.dim();
    let zn = z.coords[n - 1];
    let den = re(1.0) - zn;
    if den == Complex64::default() {
        return Err(GeomError::PoleAtBoundary { what: "z_n = 1" });
    }
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        j[(k, k)] = den.inv();
        j[(k, n - 1)] = z.coords[k] / (den * den);
    }
    j[(n - 1, n - 1)] = re(2.0) / (den * den);
    Ok(j)
}

/// Holomorphic Jacobian of `𝒞⁻¹`.
pub fn cayley_inv_jacobian(w: &CPoint) -> Result<DMatrix<Complex64>> {
    let n = w.dim();
    let den = w.coords[n - 1] + 1.0;
    if den == Complex64::default() {
        return Err(GeomError::PoleAtBoundary { what: "w_n = -1" });
    }
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        j[(k, k)] = re(2.0) / den;
        j[(k, n - 1)] = -w.coords[k] * 2.0 / (den * den);
    }
    j[(n - 1, n - 1)] = re(2.0) / (den * den);
    Ok(j)
}

/// Holomorphic Jacobian of `σ`.
pub fn sigma_jacobian(w: &CPoint) -> Result<DMatrix<Complex64>> {
    let n = w.dim();
    let wn = w.coords[n - 1];
    if wn == Complex64::default() {
        return Err(GeomError::PoleAtBoundary { what: "w_n = 0" });
    }
    let mut j = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        j[(k, k)] = -wn.inv();
        j[(k, n - 1)] = w.coords[k] / (wn * wn);
    }
    j[(n - 1, n - 1)] = -(wn * wn).inv();
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn rho0_examples() {
        assert_eq!(rho0(&CPoint::siegel_base(3)), 1.0);
        let w = CPoint::siegel(vec![c(0.5, 0.5), re(1.0)]);
        assert!((rho0(&w) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sigma_scales_rho0() {
        let w = CPoint::siegel(vec![re(0.0), c(2.0, 1.0)]);
        let s = sigma(&w).unwrap();
        // rho0(w) = 2, |w_n|^2 = 5
        assert!((rho0(&s) - 2.0 / 5.0).abs() < 1e-15);
        assert!((rho0(&s) * w.last().norm_sqr() - rho0(&w)).abs() < 1e-12);
    }

    #[test]
    fn sigma_examples() {
        let base = CPoint::siegel_base(4);
        assert_eq!(sigma(&base).unwrap(), base);
        let w = CPoint::siegel(vec![re(1.0), re(4.0)]);
        let s = sigma(&w).unwrap();
        assert_eq!(s.coords(), &[re(-0.25), re(0.25)]);
        let pole = CPoint::siegel(vec![re(1.0), re(0.0)]);
        assert!(matches!(sigma(&pole), Err(GeomError::PoleAtBoundary { .. })));
    }

    #[test]
    fn cayley_examples() {
        let w = cayley(&CPoint::origin(3)).unwrap();
        assert_eq!(w, CPoint::siegel_base(3));
        assert_eq!(cayley_inv(&CPoint::siegel_base(3)).unwrap(), CPoint::origin(3));
        let z = cayley_inv(&CPoint::siegel(vec![re(3.0)])).unwrap();
        assert!((z.coords()[0] - re(0.5)).norm() < 1e-15);
        let pole = CPoint::ball(vec![re(0.0), re(1.0)]);
        assert!(matches!(cayley(&pole), Err(GeomError::PoleAtBoundary { .. })));
        let pole = CPoint::siegel(vec![re(0.0), re(-1.0)]);
        assert!(matches!(cayley_inv(&pole), Err(GeomError::PoleAtBoundary { .. })));
    }

    #[test]
    fn cayley_round_trips_and_rho0_formula() {
        let mut s = Sampler::new(7);
        for n in 1..=5 {
            for _ in 0..50 {
                let z = s.ball_point(n);
                let w = cayley(&z).unwrap();
                let back = cayley_inv(&w).unwrap();
                for (a, b) in back.coords().iter().zip(z.coords()) {
                    assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
                }
                let expected = (1.0 - z.norm_sqr()) / (re(1.0) - z.last()).norm_sqr();
                assert!((rho0(&w) - expected).abs() <= 1e-12 * expected.max(1.0));

                let w = s.siegel_point(n);
                let again = cayley(&cayley_inv(&w).unwrap()).unwrap();
                for (a, b) in again.coords().iter().zip(w.coords()) {
                    assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
                }
                let ss = sigma(&sigma(&w).unwrap()).unwrap();
                for (a, b) in ss.coords().iter().zip(w.coords()) {
                    assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
                }
            }
        }
    }

    #[test]
    fn cayley_maps_ball_into_siegel() {
        let mut s = Sampler::new(11);
        for n in 1..=5 {
            for _ in 0..1000 {
                let z = s.ball_point(n);
                assert!(rho0(&cayley(&z).unwrap()) > 0.0);
            }
        }
    }

    #[test]
    fn jacobians_match_differences() {
        let mut s = Sampler::new(3);
        let h = 1e-6;
        for n in 1..=4 {
            let z = s.ball_point(n);
            let w = s.siegel_point(n);
            let cases: [(&CPoint, fn(&CPoint) -> Result<CPoint>, fn(&CPoint) -> Result<DMatrix<Complex64>>); 3] = [
                (&z, cayley, cayley_jacobian),
                (&w, cayley_inv, cayley_inv_jacobian),
                (&w, sigma, sigma_jacobian),
            ];
            for (p, f, jf) in cases {
                let j = jf(p).unwrap();
                for col in 0..n {
                    let fp = f(&p.shifted(2 * col, h)).unwrap();
                    let fm = f(&p.shifted(2 * col, -h)).unwrap();
                    for row in 0..n {
                        let d = (fp.coords()[row] - fm.coords()[row]) / (2.0 * h);
                        assert!((d - j[(row, col)]).norm() < 1e-6 * (1.0 + d.norm()));
                    }
                }
            }
        }
    }
}
