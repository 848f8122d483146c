//! Input documents for `classify` and `mobius`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use siegel_core::automorphism::{cayley_constraint_report, CayleyVerdict};
use siegel_core::linalg::CMatrix;
use siegel_core::normalize::{
    classify_potential_traced, classify_with_isotropy_traced, Trace, Verdict, A_TOL, CONSTANCY_TOL, KILL_TOL, TILDE_TOL,
};
use siegel_core::potential::{NORM_SPREAD_TOL, W_FIT_TOL};
use siegel_core::{Automorphism, Complex64, GeomError, Generator, HoloPoly, MobiusMap, Potential};

use crate::report::{Check, Report, Status};
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSpec {
    #[default]
    Psi0,
    Phi0,
}

/// A complex number written as `x` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        match c {
            ComplexSpec::Real(x) => Complex64::new(x, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// One generator of the script; `k` is one-based.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorSpec {
    Translation(f64),
    Shift2 { k: usize, s: f64 },
    Shift3 { k: usize, s: f64 },
    Dilation(f64),
    Swap { k: usize },
    /// Rows of an `(n−1)×(n−1)` unitary matrix.
    Unitary(Vec<Vec<ComplexSpec>>),
    Sigma,
}

/// Description of `ψ = r·(base∘Φ)·|e^f|²` with curvature `κ`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub n: usize,
    #[serde(default)]
    pub base: BaseSpec,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub f: HoloPoly,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    /// Optional isotropy element applied before classifying.
    #[serde(default)]
    pub isotropy: Vec<GeneratorSpec>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobiusSpec {
    /// `(n+1)²` entries, row-major.
    pub mobius: Vec<ComplexSpec>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidConfig(msg.into())
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| invalid(format!("line {} column {}: {e}", e.line(), e.column())))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn generator(n: usize, at: &str, g: &GeneratorSpec) -> Result<Generator> {
    let m = n - 1;
    let index = |k: usize, lo: usize| {
        if k < lo || k > m {
            Err(invalid(format!("{at}: index {k} outside {lo}..={m}")))
        } else {
            Ok(k - 1)
        }
    };
    Ok(match g {
        GeneratorSpec::Translation(s) => Generator::Ts(*s),
        GeneratorSpec::Shift2 { k, s } => Generator::T2k(index(*k, 1)?, *s),
        GeneratorSpec::Shift3 { k, s } => Generator::T3k(index(*k, 1)?, *s),
        GeneratorSpec::Dilation(s) => Generator::Dil(*s),
        GeneratorSpec::Swap { k } => Generator::Perm1k(index(*k, 1)?),
        GeneratorSpec::Unitary(rows) => {
            if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                return Err(invalid(format!("{at}: unitary matrix must be {m}x{m}")));
            }
            Generator::Unitary(CMatrix::from_fn(m, m, |i, j| rows[i][j].into()))
        }
        GeneratorSpec::Sigma => Generator::Sigma,
    })
}

fn script(n: usize, field: &str, gens: &[GeneratorSpec]) -> Result<Automorphism> {
    let gens = gens
        .iter()
        .enumerate()
        .map(|(i, g)| generator(n, &format!("{field}[{i}]"), g))
        .collect::<Result<Vec<_>>>()?;
    Automorphism::new(n, gens).map_err(|e| invalid(format!("{field}: {e}")))
}

impl PotentialSpec {
    /// The potential and the optional isotropy element.
    pub fn build(&self) -> Result<(Potential, Option<Automorphism>)> {
        let n = self.n;
        if n == 0 || n > crate::MAX_N {
            return Err(invalid(format!("n: {n} outside 1..={}", crate::MAX_N)));
        }
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(invalid(format!("r: {} is not a positive number", self.r)));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(invalid(format!("kappa: {} is not a positive number", self.kappa)));
        }
        if let Some(d) = self.f.dim() {
            if d != n {
                return Err(invalid(format!("f: terms have {d} exponents, expected {n}")));
            }
        }
        let mut p = match self.base {
            BaseSpec::Psi0 => Potential::psi0(n),
            BaseSpec::Phi0 => Potential::phi0(n),
        };
        if !self.generators.is_empty() {
            p = p.precomposed(script(n, "generators", &self.generators)?);
        }
        p = p.scaled(self.r).with_correction(self.f.clone()).with_kappa(self.kappa);
        let iota = if self.isotropy.is_empty() {
            None
        } else {
            Some(script(n, "isotropy", &self.isotropy)?)
        };
        Ok((p, iota))
    }
}

fn describe(g: &Generator) -> String {
    match g {
        Generator::Ts(s) => format!("translation({s})"),
        Generator::T2k(k, s) => format!("shift2(k={}, s={s})", k + 1),
        Generator::T3k(k, s) => format!("shift3(k={}, s={s})", k + 1),
        Generator::Dil(s) => format!("dilation({s})"),
        Generator::Perm1k(k) => format!("swap(k={})", k + 1),
        Generator::Unitary(u) => format!("unitary({u:?})"),
        Generator::Sigma => "sigma".into(),
        Generator::ComplexAffine(a, b) => format!("affine({a:?}, {b:?})"),
    }
}

fn tags(v: &[(siegel_core::BasisTag, f64)]) -> Vec<(String, f64)> {
    v.iter().map(|(t, x)| (t.to_string(), *x)).collect()
}

#[derive(Serialize)]
struct TraceRecord {
    norm_estimate: f64,
    norm_spread: f64,
    w_fit_residual: Option<f64>,
    w_coefficients: Vec<(String, f64)>,
    route: Option<siegel_core::normalize::Route>,
    a_after: Option<f64>,
    kill_residual: Option<f64>,
    constancy_spread: Option<f64>,
}

impl From<&Trace> for TraceRecord {
    fn from(t: &Trace) -> Self {
        Self {
            norm_estimate: t.norm_estimate,
            norm_spread: t.norm_spread,
            w_fit_residual: t.w_fit_residual,
            w_coefficients: tags(&t.w_coefficients),
            route: t.route,
            a_after: t.a_after,
            kill_residual: t.kill_residual,
            constancy_spread: t.constancy_spread,
        }
    }
}

fn stage(report: &mut Report, n: usize, name: &str, anchor: &str, residual: f64, tolerance: f64) {
    let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
    report.push(Check {
        suite: "classify".into(),
        name: name.into(),
        anchor: anchor.into(),
        n,
        samples: 1,
        max_residual: residual,
        tolerance,
        status,
    });
}

/// Classifies the potential described by a JSON document.
pub fn classify(text: &str) -> Result<Report> {
    let spec: PotentialSpec = parse_json(text)?;
    let (p, iota) = spec.build()?;
    let n = spec.n;
    let (verdict, trace) = match &iota {
        Some(i) => classify_with_isotropy_traced(&p, i)?,
        None => classify_potential_traced(&p)?,
    };
    let mut report = Report::default();
    let tilde = trace
        .w_coefficients
        .iter()
        .filter(|(t, _)| t.is_tilde())
        .fold(0.0, |a: f64, x| a.max(x.1.abs()));
    stage(&mut report, n, "classify.norm_spread", "differential norm is constant", trace.norm_spread, NORM_SPREAD_TOL);
    if let Some(r) = trace.w_fit_residual {
        stage(&mut report, n, "classify.w_fit", "W is a quadratic polynomial field", r, W_FIT_TOL);
        stage(&mut report, n, "classify.tilde_components", "W has no grade > 0 components", tilde, TILDE_TOL);
    }
    if let Some(a) = trace.a_after {
        stage(&mut report, n, "classify.kill_residual", "normalization removes T, T2 and T3", trace.kill_residual.unwrap_or(f64::NAN), KILL_TOL);
        stage(&mut report, n, "classify.d_component", "no D component survives normalization", a.abs(), A_TOL);
    }
    if let Some(c) = trace.constancy_spread {
        stage(&mut report, n, "classify.constancy", "log(psi o Phi^-1) - log psi0 is constant", c, CONSTANCY_TOL);
    }
    report.detail("verdict", verdict.name());
    match &verdict {
        Verdict::Canonical(c) => {
            report.detail("r", c.r);
            report.detail("phi", c.phi.generators().iter().map(describe).collect::<Vec<_>>());
            report.detail("norm_constant", c.norm_constant);
        }
        Verdict::NotConstantNorm { estimate, spread } => {
            report.detail("norm_estimate", estimate);
            report.detail("norm_spread", spread);
        }
        Verdict::NeedsIsotropy { components } => report.detail("components", tags(components)),
        Verdict::Inconsistent { a, re_d } => {
            report.detail("a", a);
            report.detail("re_d", re_d);
        }
        Verdict::NotCanonical {
            kill_residual,
            constancy_spread,
        } => {
            report.detail("kill_residual", kill_residual);
            report.detail("constancy_spread", constancy_spread);
        }
    }
    report.detail("trace", TraceRecord::from(&trace));
    Ok(report)
}

pub fn classify_file(path: &Path) -> Result<Report> {
    classify(&read(path)?)
}

/// Runs the Cayley constraint chain on a Möbius matrix given as JSON.
pub fn mobius(text: &str) -> Result<Report> {
    let spec: MobiusSpec = parse_json(text)?;
    let len = spec.mobius.len();
    let size = (len as f64).sqrt().round() as usize;
    if size * size != len || size < 2 {
        return Err(invalid(format!("mobius: {len} entries is not (n+1)^2 for any n >= 1")));
    }
    if let Some(i) = spec.mobius.iter().position(|c| {
        let z: Complex64 = (*c).into();
        !z.is_finite()
    }) {
        return Err(invalid(format!("mobius[{i}]: entry is not finite")));
    }
    let a = CMatrix::from_fn(size, size, |i, j| spec.mobius[i * size + j].into());
    let map = MobiusMap::new(a).map_err(|e| match e {
        GeomError::Degenerate => invalid("mobius: matrix is singular"),
        other => CliError::Geom(other),
    })?;
    let rep = cayley_constraint_report(&map)?;
    let n = size - 1;
    let mut report = Report::default();
    for c in &rep.checks {
        report.push(Check {
            suite: "mobius".into(),
            name: format!("mobius.{}", c.name),
            anchor: format!("Mobius coefficient constraint {}", c.name),
            n,
            samples: 1,
            max_residual: c.residual,
            tolerance: c.tolerance,
            status: if c.pass { Status::Pass } else { Status::Fail },
        });
    }
    match &rep.verdict {
        CayleyVerdict::CayleyUpToRotation { theta } => {
            report.detail("verdict", "CayleyUpToRotation");
            report.detail("theta", theta);
        }
        CayleyVerdict::Failed { constraint } => {
            report.detail("verdict", "Failed");
            report.detail("first_failed", constraint);
        }
    }
    if let Some(m) = &rep.fitted_matrix {
        report.detail("fitted_matrix", m.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>());
    }
    Ok(report)
}

pub fn mobius_file(path: &Path) -> Result<Report> {
    mobius(&read(path)?)
}
