//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when a criterion fails that is not listed in `KNOWN_FAILURES`.

use std::time::{Duration, Instant};

use siegel_core::automorphism::{
    cayley_constraint_report, constraint_report, plane_rotation, Automorphism, CayleyVerdict, Generator, MobiusMap,
    ShearedCayley,
};
use siegel_core::domain::{cayley_jacobian, rho0, sigma};
use siegel_core::linalg::CMatrix;
use siegel_core::metric::{contract, einstein_residual, inverse_metric_siegel, metric_siegel};
use siegel_core::normalize::{choose_s1, classify_potential, shift_automorphism, solve_shifts, CollapsedCoeffs, Verdict};
use siegel_core::potential::{constant_norm_residual, w_field, HoloPoly, LogPotential, Potential};
use siegel_core::sampling::Sampler;
use siegel_core::tables::{check_entry, entries};
use siegel_core::vectorfield::{basis, bracket, decompose, field, pushforward_affine, re_apply, BasisTag};
use siegel_core::{Complex64, I};

/// Criteria whose literal statement cannot hold; each is still evaluated and
/// reported, and must still fail so a silent change is noticed.
const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn timed<F: FnOnce() -> Outcome>(limit: Option<Duration>, f: F) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        out.detail.push_str(&format!(", runtime {:.3} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()));
        if elapsed >= limit {
            out.pass = false;
        }
    }
    out
}

fn outcome(id: u32, title: &'static str, err: f64, tol: f64) -> Outcome {
    Outcome {
        id,
        title,
        pass: err <= tol,
        detail: format!("max error {err:.3e} (tol {tol:.0e})"),
        notes: Vec::new(),
    }
}

fn norm_constant() -> Outcome {
    let mut s = Sampler::new(1);
    let mut err: f64 = 0.0;
    for n in 1..=5 {
        let p = Potential::psi0(n);
        for _ in 0..100 {
            let w = s.siegel_point(n);
            err = err.max((p.diff_norm_sq(&w).unwrap() - (n + 1) as f64).abs());
        }
    }
    outcome(1, "norm constant n+1 for the canonical potential", err, 1e-9)
}

fn scaled_metric() -> Outcome {
    let mut s = Sampler::new(2);
    let mut err: f64 = 0.0;
    for kappa in [0.5, 1.0, 2.0] {
        let p = Potential::psi0(1).with_kappa(kappa);
        for _ in 0..100 {
            let w = s.siegel_point(1);
            err = err.max((p.diff_norm_sq(&w).unwrap() - 2.0 / kappa).abs());
        }
    }
    outcome(2, "scaled metric gives 2/kappa in dimension one", err, 1e-9)
}

fn inverse_metric_identity() -> Outcome {
    let mut s = Sampler::new(3);
    let mut err: f64 = 0.0;
    let mut block_mismatch = 0usize;
    for n in 1..=5 {
        for _ in 0..100 {
            let w = s.siegel_point(n);
            let g = metric_siegel(&w).unwrap();
            let h = inverse_metric_siegel(&w).unwrap();
            let prod = contract(&g, &h);
            let scale = max_abs(g.entries.iter().map(|z| z.norm())) * max_abs(h.entries.iter().map(|z| z.norm()));
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    err = err.max((prod[(i, j)] - want).norm() / scale);
                }
            }
            let pre = rho0(&w) / (n + 1) as f64;
            let x = w.coords();
            for i in 0..n {
                for j in 0..n {
                    let l = n - 1;
                    let want = if i == l && j == l {
                        Complex64::new(4.0 * x[l].re, 0.0) * pre
                    } else if j == l {
                        x[i] * 2.0 * pre
                    } else if i == l {
                        (x[j] * 2.0).conj() * pre
                    } else if i == j {
                        Complex64::new(1.0, 0.0) * pre
                    } else {
                        Complex64::default()
                    };
                    if h.entries[(i, j)] != want {
                        block_mismatch += 1;
                    }
                }
            }
        }
    }
    let mut o = outcome(3, "metric times inverse is the identity; inverse equals the block form", err, 1e-10);
    o.pass &= block_mismatch == 0;
    o.detail.push_str(&format!(", block-form mismatches {block_mismatch}"));
    o
}

fn einstein() -> Outcome {
    let mut s = Sampler::new(4);
    let mut err: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..20 {
            err = err.max(einstein_residual(&s.ball_point(n)).unwrap());
            err = err.max(einstein_residual(&s.siegel_point(n)).unwrap());
        }
    }
    outcome(4, "Einstein residual by finite differences", err, 1e-4)
}

fn tables() -> Outcome {
    let n = 3;
    let mut s = Sampler::new(5);
    let mut err: f64 = 0.0;
    let mut deviations = Vec::new();
    let mut count = 0;
    for _ in 0..10 {
        let param = s.uniform(-2.0, 2.0);
        for e in entries(n, param) {
            let c = check_entry(n, &e).unwrap();
            err = err.max(c.error);
            count += 1;
            if c.stated_error > 1e-10 && !deviations.contains(&c.label) {
                deviations.push(c.label.clone());
            }
        }
    }
    let mut o = outcome(5, "pushforward tables reproduced by the oracle", err, 1e-10);
    let misprints: Vec<String> = entries(n, 1.0).into_iter().filter(|e| e.corrected.is_some()).map(|e| e.label()).collect();
    let undocumented: Vec<&String> = deviations.iter().filter(|d| !misprints.contains(d)).collect();
    o.pass &= undocumented.is_empty();
    o.detail.push_str(&format!(", {count} entry checks, {} documented misprints", deviations.len()));
    for d in &deviations {
        o.notes.push(format!("deviation (documented misprint): {d}"));
    }
    for d in undocumented {
        o.notes.push(format!("undocumented deviation: {d}"));
    }
    o
}

fn grading() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=4 {
        let b = basis(n);
        let d = field(BasisTag::D, n).unwrap();
        let mut counts = [0usize; 5];
        let mut off_diagonal: f64 = 0.0;
        for (tag, v) in &b {
            let dec = decompose(&bracket(&d, v).unwrap()).unwrap();
            let eig = dec.coefficient(*tag);
            off_diagonal = off_diagonal.max(max_abs(dec.coeffs.iter().filter(|(t, _)| t != tag).map(|x| x.1.abs())));
            let idx = (eig.round() + 2.0) as usize;
            if (eig - eig.round()).abs() > 1e-12 || idx > 4 {
                ok = false;
            } else {
                counts[idx] += 1;
            }
        }
        let m = n - 1;
        let want = [1, 2 * m, m * m + 1, 2 * m, 1];
        ok &= counts == want && b.len() == n * n + 2 * n && off_diagonal <= 1e-12;
        notes.push(format!("n={n}: multiplicities {counts:?}, dimension {}", b.len()));
    }
    Outcome {
        id: 6,
        title: "ad_D eigenvalue multiplicities and algebra dimension",
        pass: ok,
        detail: "exact counts".into(),
        notes,
    }
}

fn directional_constants() -> Outcome {
    let mut s = Sampler::new(7);
    let mut constant_err: f64 = 0.0;
    let mut tt_err: f64 = 0.0;
    let mut tt2_err: f64 = 0.0;
    let mut tt_ratio = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 2..=4 {
        let p = Potential::psi0(n);
        let k = (n + 1) as f64;
        for _ in 0..100 {
            let w = s.siegel_point(n);
            for (tag, v) in basis(n) {
                let got = re_apply(&v, &p, &w).unwrap();
                match tag {
                    BasisTag::D => constant_err = constant_err.max((got + k).abs()),
                    BasisTag::Tt => {
                        let want = -4.0 * k * w.last().im;
                        tt_err = tt_err.max((got - want).abs());
                        if want.abs() > 1e-3 {
                            tt_ratio = (tt_ratio.0.min(got / want), tt_ratio.1.max(got / want));
                        }
                    }
                    BasisTag::Tt2(j) => tt2_err = tt2_err.max((got + 4.0 * k * w.coords()[j].re).abs()),
                    BasisTag::Tt3(_) => {}
                    _ => constant_err = constant_err.max(got.abs()),
                }
            }
        }
    }
    let tol = 1e-10;
    Outcome {
        id: 7,
        title: "directional derivatives of the canonical log-potential",
        pass: constant_err <= tol && tt_err <= tol && tt2_err <= tol,
        detail: format!("grade<=0 constants {constant_err:.3e}, Tt {tt_err:.3e}, Tt2 {tt2_err:.3e} (tol {tol:.0e})"),
        notes: vec![
            format!("grade<=0 sub-check (-(n+1) for D, 0 otherwise): {}", if constant_err <= tol { "PASS" } else { "FAIL" }),
            format!(
                "measured Re(Tt) log psi0 / (-4(n+1) Im w_n) in [{:.12}, {:.12}]; with Re V = (V + conj V)/2, the convention that gives -(n+1) for D, the value is -2(n+1) Im w_n",
                tt_ratio.0, tt_ratio.1
            ),
        ],
    }
}

fn w_field_check() -> Outcome {
    let mut err: f64 = 0.0;
    for n in 1..=3 {
        let w = w_field(&Potential::psi0(n)).unwrap();
        let dec = decompose(&w).unwrap();
        for (t, x) in &dec.coeffs {
            let want = if *t == BasisTag::T { -1.0 } else { 0.0 };
            err = err.max((x - want).abs());
        }
        err = err.max(dec.residual);
        for r in [0.5, 2.0, 7.0] {
            let scaled = w_field(&Potential::psi0(n).scaled(r)).unwrap();
            let want = w.scale(Complex64::new(r.powf(1.0 / (n + 1) as f64), 0.0));
            err = err.max(scaled.max_diff(&want));
        }
    }
    outcome(8, "W field of the canonical potential is -T and scales by r^(1/(n+1))", err, 1e-9)
}

fn random_unitary(s: &mut Sampler, m: usize) -> CMatrix {
    let mut u = CMatrix::identity(m, m);
    for i in 0..m {
        u[(i, i)] = (I * s.uniform(-3.0, 3.0)).exp();
    }
    for i in 0..m {
        for j in i + 1..m {
            u = plane_rotation(m, i, j, s.uniform(-3.0, 3.0)) * u;
        }
    }
    u
}

fn classifier_round_trip() -> Outcome {
    let mut s = Sampler::new(9);
    let mut r_err: f64 = 0.0;
    let mut spread: f64 = 0.0;
    let mut failures = 0;
    let mut nominal_gap: f64 = 0.0;
    for n in 1..=3 {
        for _ in 0..20 {
            let r = s.uniform(0.5, 2.0);
            let mut gens = vec![Generator::Ts(s.uniform(-1.0, 1.0))];
            let mut dil = 0.0;
            for k in 0..n - 1 {
                gens.push(Generator::T2k(k, s.uniform(-1.0, 1.0)));
                gens.push(Generator::T3k(k, s.uniform(-1.0, 1.0)));
            }
            let d = s.uniform(-0.5, 0.5);
            dil += d;
            gens.push(Generator::Dil(d));
            if n > 1 {
                gens.push(Generator::Unitary(random_unitary(&mut s, n - 1)));
            }
            let phi = Automorphism::new(n, gens).unwrap();
            let p = Potential::psi0(n).precomposed(phi).scaled(r);
            // ψ₀∘𝒟_s = e^{−2(n+1)s}ψ₀, so the scale is only defined up to this factor.
            let r_eff = r * (-2.0 * (n + 1) as f64 * dil).exp();
            match classify_potential(&p).unwrap() {
                Verdict::Canonical(c) => {
                    r_err = r_err.max((c.r - r_eff).abs() / r_eff);
                    spread = spread.max(c.constancy_spread);
                    nominal_gap = nominal_gap.max((c.r - r).abs() / r);
                }
                _ => failures += 1,
            }
        }
    }
    let mut o = outcome(9, "classifier round trip on r * psi0 o Phi", r_err, 1e-6);
    o.pass &= failures == 0 && spread <= 1e-7;
    o.detail.push_str(&format!(", constancy spread {spread:.3e} (tol 1e-07), non-canonical verdicts {failures}"));
    o.notes.push(format!(
        "r compared with r*exp(-2(n+1)s_D); the bare r differs by up to {nominal_gap:.3} relative because dilations rescale psi0"
    ));
    o
}

fn shift_system() -> Outcome {
    let mut s = Sampler::new(10);
    let mut err: f64 = 0.0;
    for trial in 0..100 {
        let n = 2 + trial % 4;
        let mut r = || s.uniform(-2.0, 2.0);
        let a = {
            let x = r();
            x.signum() * (x.abs() + 0.1)
        };
        let cc = CollapsedCoeffs {
            n,
            a,
            b: r(),
            c: r(),
            d: r(),
            e: (0..n - 2).map(|_| r()).collect(),
            f: (0..n - 2).map(|_| r()).collect(),
            g: r(),
        };
        let shifts = solve_shifts(&cc).unwrap();
        let s1 = choose_s1(&cc, &shifts).unwrap();
        let phi = shift_automorphism(n, s1, &shifts);
        let after = decompose(&pushforward_affine(&phi, &cc.to_field()).unwrap()).unwrap();
        err = err.max(max_abs(
            after
                .coeffs
                .iter()
                .filter(|(t, _)| matches!(t, BasisTag::T | BasisTag::T2(_) | BasisTag::T3(_)))
                .map(|x| x.1.abs()),
        ));
    }
    outcome(10, "shift system and s1 remove T, T2 and T3 components", err, 1e-9)
}

fn hyperbolic_case() -> Outcome {
    let mut s = Sampler::new(11);
    let mut inv_err: f64 = 0.0;
    let mut err: f64 = 0.0;
    for n in 1..=4 {
        let sg = Automorphism::new(n, vec![Generator::Sigma]).unwrap();
        let p = Potential::psi0(n).precomposed(sg);
        let d = field(BasisTag::D, n).unwrap();
        let k = (n + 1) as f64;
        for _ in 0..100 {
            let w = s.siegel_point(n);
            let back = sigma(&sigma(&w).unwrap()).unwrap();
            let scale = max_abs(w.coords().iter().map(|z| z.norm())).max(1.0);
            inv_err = inv_err.max(max_abs(back.coords().iter().zip(w.coords()).map(|(a, b)| (a - b).norm())) / scale);
            err = err.max((p.diff_norm_sq(&w).unwrap() - k).abs());
            err = err.max((re_apply(&d, &p, &w).unwrap() - k).abs());
        }
    }
    let mut o = outcome(11, "sigma is an involution; psi0 o sigma has norm n+1 and (Re D) = +(n+1)", err, 1e-9);
    o.pass &= inv_err <= 1e-12;
    o.detail.push_str(&format!(", involution error {inv_err:.3e} (tol 1e-12)"));
    o
}

fn mobius() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let first_failed = |v: &CayleyVerdict| match v {
        CayleyVerdict::Failed { constraint } => Some(constraint.clone()),
        _ => None,
    };
    for n in 2..=3 {
        let c = MobiusMap::cayley(n);
        let mut maps = vec![("Cayley".to_string(), c.clone())];
        for theta in [0.4, -1.3, 2.9] {
            maps.push((format!("rotated by {theta}"), c.conjugated_by_phase(theta)));
        }
        for (name, m) in maps {
            let rep = cayley_constraint_report(&m).unwrap();
            let det = rep.checks.iter().find(|c| c.name.starts_with("det")).unwrap();
            let pass = matches!(rep.verdict, CayleyVerdict::CayleyUpToRotation { .. }) && det.pass;
            ok &= pass;
            notes.push(format!("n={n} {name}: {:?}, det residual {:.3e}", rep.verdict, det.residual));
        }
        let id = cayley_constraint_report(&MobiusMap::identity(n)).unwrap();
        let id_first = first_failed(&id.verdict);
        ok &= id_first.as_deref() == Some("G(0) = (0,...,0,1)");
        notes.push(format!("n={n} identity: first violated {:?}", id_first));
        let sheared = constraint_report(&ShearedCayley::quadratic(n)).unwrap();
        let sh_first = first_failed(&sheared.verdict);
        let sh_det = sheared.checks.iter().find(|c| c.name.starts_with("det")).unwrap();
        ok &= sh_first.as_deref() == Some("Mobius linearity") && sh_det.pass;
        notes.push(format!("n={n} sheared: determinant check passes ({:.3e}), first violated {:?}", sh_det.residual, sh_first));
    }
    let mut s = Sampler::new(12);
    let mut det_err: f64 = 0.0;
    for n in 1..=4 {
        for _ in 0..50 {
            let z = s.ball_point(n);
            let d = cayley_jacobian(&z).unwrap().determinant();
            let v = d * (Complex64::new(1.0, 0.0) - z.last()).powu(n as u32 + 1);
            det_err = det_err.max((v - 2.0).norm() / 2.0);
        }
    }
    ok &= det_err <= 1e-10;
    Outcome {
        id: 12,
        title: "Cayley constraint report on Mobius maps",
        pass: ok,
        detail: format!("det dC (1 - z_n)^(n+1) = 2 with error {det_err:.3e} (tol 1e-10)"),
        notes,
    }
}

fn residual_cross_check() -> Outcome {
    let n = 2;
    let mut s = Sampler::new(13);
    let mut err: f64 = 0.0;
    for _ in 0..50 {
        let mut f = HoloPoly::zero();
        for e in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]] {
            f.add_term(e.to_vec(), s.complex_normal() * 0.3);
        }
        let p = Potential::psi0(n).with_correction(f.clone());
        for _ in 0..50 {
            let w = s.siegel_point(n);
            let lhs = constant_norm_residual(&f, &w).unwrap();
            let rhs = p.diff_norm_sq(&w).unwrap() - (n + 1) as f64;
            err = err.max((lhs - rhs).abs());
        }
    }
    outcome(13, "constant-norm residual equals norm minus (n+1)", err, 1e-10)
}

fn main() {
    let results = vec![
        timed(Some(Duration::from_secs(1)), norm_constant),
        timed(None, scaled_metric),
        timed(None, inverse_metric_identity),
        timed(None, einstein),
        timed(Some(Duration::from_secs(10)), tables),
        timed(None, grading),
        timed(None, directional_constants),
        timed(None, w_field_check),
        timed(Some(Duration::from_secs(30)), classifier_round_trip),
        timed(None, shift_system),
        timed(None, hyperbolic_case),
        timed(None, mobius),
        timed(None, residual_cross_check),
    ];
    let mut unexpected = Vec::new();
    for o in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let known = KNOWN_FAILURES.contains(&o.id);
        let suffix = if !o.pass && known { " [known]" } else { "" };
        println!("{tag} criterion {:>2}: {} | {}{suffix}", o.id, o.title, o.detail);
        for note in &o.notes {
            println!("       {note}");
        }
        if o.pass == known {
            unexpected.push(o.id);
        }
    }
    let passed = results.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
