//! Central finite differences in real coordinates, with Wirtinger
//! combinations.
//!
//! Every stencil uses step `h` and `2h` and one Richardson step, so the
//! truncation error is `O(h⁴)`.

use crate::domain::CPoint;
use crate::{c, Complex64};

/// Default step.
pub const STEP: f64 = 1e-4;

fn central<F: Fn(&CPoint) -> f64>(f: &F, p: &CPoint, a: usize, h: f64) -> f64 {
    (f(&p.shifted(a, h)) - f(&p.shifted(a, -h))) / (2.0 * h)
}

/// `∂F/∂x_a` for real index `a`.
pub fn d_real<F: Fn(&CPoint) -> f64>(f: &F, p: &CPoint, a: usize, h: f64) -> f64 {
    (4.0 * central(f, p, a, h) - central(f, p, a, 2.0 * h)) / 3.0
}

fn mixed<F: Fn(&CPoint) -> f64>(f: &F, p: &CPoint, a: usize, b: usize, h: f64) -> f64 {
    if a == b {
        let f0 = f(p);
        (f(&p.shifted(a, h)) - 2.0 * f0 + f(&p.shifted(a, -h))) / (h * h)
    } else {
        let pp = p.shifted(a, h).shifted(b, h);
        let pm = p.shifted(a, h).shifted(b, -h);
        let mp = p.shifted(a, -h).shifted(b, h);
        let mm = p.shifted(a, -h).shifted(b, -h);
        (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h * h)
    }
}

/// `∂²F/∂x_a∂x_b` for real indices.
pub fn d2_real<F: Fn(&CPoint) -> f64>(f: &F, p: &CPoint, a: usize, b: usize, h: f64) -> f64 {
    (4.0 * mixed(f, p, a, b, h) - mixed(f, p, a, b, 2.0 * h)) / 3.0
}

/// Complex Levi matrix `L[i][j] = ∂_i ∂_j̄ F` of a real function.
pub fn levi_matrix<F: Fn(&CPoint) -> f64>(f: &F, p: &CPoint, h: f64) -> Vec<Vec<Complex64>> {
    let n = p.dim();
    let mut out = vec![vec![Complex64::default(); n]; n];
    for i in 0..n {
        for j in i..n {
            let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            let fxx = d2_real(f, p, xi, xj, h);
            let fyy = d2_real(f, p, yi, yj, h);
            let fxy = d2_real(f, p, xi, yj, h);
            let fyx = d2_real(f, p, yi, xj, h);
            let v = c(fxx + fyy, fxy - fyx) * 0.25;
            out[i][j] = v;
            out[j][i] = v.conj();
        }
    }
    out
}

/// `∂_k G` and `∂_k̄ G` of a complex-valued function, all `k`.
pub fn wirtinger<F: Fn(&CPoint) -> Complex64>(f: &F, p: &CPoint, h: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = p.dim();
    let mut holo = Vec::with_capacity(n);
    let mut anti = Vec::with_capacity(n);
    for k in 0..n {
        let re = |q: &CPoint| f(q).re;
        let im = |q: &CPoint| f(q).im;
        let dx = c(d_real(&re, p, 2 * k, h), d_real(&im, p, 2 * k, h));
        let dy = c(d_real(&re, p, 2 * k + 1, h), d_real(&im, p, 2 * k + 1, h));
        let i = Complex64::i();
        holo.push((dx - i * dy) * 0.5);
        anti.push((dx + i * dy) * 0.5);
    }
    (holo, anti)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::re;

    #[test]
    fn levi_of_norm_squared_is_identity() {
        let p = CPoint::siegel(vec![c(0.3, -0.2), c(1.0, 0.5)]);
        let f = |q: &CPoint| q.norm_sqr();
        let l = levi_matrix(&f, &p, STEP);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((l[i][j] - re(want)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn levi_of_rank_one_term() {
        // F = |z_1 + 2 z_2|^2 has ∂_i∂_j̄F = a_i conj(a_j) with a = (1, 2).
        let p = CPoint::ball(vec![c(0.1, 0.2), c(-0.3, 0.1)]);
        let f = |q: &CPoint| (q.coords()[0] + q.coords()[1] * 2.0).norm_sqr();
        let l = levi_matrix(&f, &p, STEP);
        assert!((l[0][1] - re(2.0)).norm() < 1e-8);
        assert!((l[1][1] - re(4.0)).norm() < 1e-8);
    }

    #[test]
    fn wirtinger_of_holomorphic_square() {
        let p = CPoint::siegel(vec![c(0.4, 0.7)]);
        let f = |q: &CPoint| q.coords()[0] * q.coords()[0];
        let (d, db) = wirtinger(&f, &p, STEP);
        assert!((d[0] - c(0.8, 1.4)).norm() < 1e-9);
        assert!(db[0].norm() < 1e-9);
    }
}
