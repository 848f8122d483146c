//! Closed-form pushforwards of the grade-≤0 basis fields by the translation,
//! Heisenberg shift and coordinate swap generators, with an oracle check.

use serde::Serialize;

use crate::automorphism::{Automorphism, Generator};
use crate::error::Result;
use crate::vectorfield::{basis_tags, decompose, pushforward_detailed, BasisTag};

/// Which generator family an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `𝒯_s`.
    Translation,
    /// `𝒯^{2,k}_s`.
    Shift2,
    /// `𝒯^{3,k}_s`.
    Shift3,
    /// `𝒮^{1,k}`.
    Swap,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Translation => "translation",
            Family::Shift2 => "shift2",
            Family::Shift3 => "shift3",
            Family::Swap => "swap",
        }
    }
}

/// One instantiated table entry `g_* source = expected`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub family: Family,
    pub generator: Generator,
    pub source: BasisTag,
    /// The stated value.
    pub expected: Vec<(BasisTag, f64)>,
    /// The actual value when the stated one is a known misprint.
    pub corrected: Option<Vec<(BasisTag, f64)>>,
}

impl TableEntry {
    /// `family[index] source`, indices one-based.
    pub fn label(&self) -> String {
        let index = match self.generator {
            Generator::T2k(k, _) | Generator::T3k(k, _) | Generator::Perm1k(k) => format!("_{}", k + 1),
            _ => String::new(),
        };
        format!("{}{} {}", self.family.name(), index, self.source)
    }

    /// The value the oracle should reproduce.
    pub fn target(&self) -> &[(BasisTag, f64)] {
        self.corrected.as_deref().unwrap_or(&self.expected)
    }
}

fn same(tag: BasisTag) -> Vec<(BasisTag, f64)> {
    vec![(tag, 1.0)]
}

fn grade_nonpositive(n: usize) -> Vec<BasisTag> {
    basis_tags(n).into_iter().filter(|t| !t.is_tilde()).collect()
}

fn translation(n: usize, s: f64) -> Vec<TableEntry> {
    grade_nonpositive(n)
        .into_iter()
        .map(|t| TableEntry {
            family: Family::Translation,
            generator: Generator::Ts(s),
            source: t,
            expected: match t {
                BasisTag::D => vec![(BasisTag::D, 1.0), (BasisTag::T, -2.0 * s)],
                _ => same(t),
            },
            corrected: None,
        })
        .collect()
}

fn shift(n: usize, k: usize, s: f64, second: bool) -> Vec<TableEntry> {
    use BasisTag::*;
    let (own, other): (fn(usize) -> BasisTag, fn(usize) -> BasisTag) = if second { (T2, T3) } else { (T3, T2) };
    grade_nonpositive(n)
        .into_iter()
        .filter(|t| *t != T)
        .map(|t| {
            let expected = match (t, second) {
                (D, _) => vec![(D, 1.0), (own(k), -s)],
                (T3(l), true) if l == k => vec![(T, 2.0 * s), (T3(k), 1.0)],
                (T2(l), false) if l == k => vec![(T, -2.0 * s), (T2(k), 1.0)],
                (U(i, j), _) if i == k => vec![(t, 1.0), (own(j), s)],
                (U(i, j), _) if j == k => vec![(t, 1.0), (own(i), -s)],
                (V(i, j), true) if i == k => vec![(t, 1.0), (other(j), -s)],
                (V(i, j), true) if j == k => vec![(t, 1.0), (other(i), -s)],
                (V(i, j), false) if i == k => vec![(t, 1.0), (other(j), s)],
                (V(i, j), false) if j == k => vec![(t, 1.0), (other(i), s)],
                (Wk(l), true) if l == k => vec![(t, 1.0), (T3(k), -s), (T, -s * s)],
                (Wk(l), false) if l == k => vec![(t, 1.0), (T2(k), s), (T, -s * s)],
                _ => same(t),
            };
            TableEntry {
                family: if second { Family::Shift2 } else { Family::Shift3 },
                generator: if second { Generator::T2k(k, s) } else { Generator::T3k(k, s) },
                source: t,
                expected,
                corrected: None,
            }
        })
        .chain(std::iter::once(TableEntry {
            family: if second { Family::Shift2 } else { Family::Shift3 },
            generator: if second { Generator::T2k(k, s) } else { Generator::T3k(k, s) },
            source: T,
            expected: same(T),
            corrected: None,
        }))
        .collect()
}

/// Entries stated for the swap `𝒮^{1,k}`, `k ≥ 1` zero-based. The rule
/// "unchanged for `ℓ ≠ k`" is misstated at `ℓ = 1` for `T2`, `T3` and `W`,
/// where the swap moves the field to index `k`.
fn swap(n: usize, k: usize) -> Vec<TableEntry> {
    use BasisTag::*;
    let m = n - 1;
    let entry = |source: BasisTag, expected: Vec<(BasisTag, f64)>, corrected: Option<Vec<(BasisTag, f64)>>| TableEntry {
        family: Family::Swap,
        generator: Generator::Perm1k(k),
        source,
        expected,
        corrected,
    };
    let mut out = vec![entry(T, same(T), None)];
    for (make, first) in [(T2 as fn(usize) -> BasisTag, T2(0)), (T3, T3(0)), (Wk, Wk(0))] {
        out.push(entry(make(k), same(first), None));
        for l in (0..m).filter(|&l| l != k) {
            let corrected = (l == 0).then(|| same(make(k)));
            out.push(entry(make(l), same(make(l)), corrected));
        }
    }
    for j in k + 1..m {
        out.push(entry(U(k, j), same(U(0, j)), None));
        out.push(entry(V(k, j), same(V(0, j)), None));
    }
    out.push(entry(U(0, k), vec![(U(0, k), -1.0)], None));
    out.push(entry(V(0, k), same(V(0, k)), None));
    out
}

/// Every instantiated entry at dimension `n` and parameter `s`.
pub fn entries(n: usize, s: f64) -> Vec<TableEntry> {
    let m = n - 1;
    let mut out = translation(n, s);
    for k in 0..m {
        out.extend(shift(n, k, s, true));
    }
    for k in 0..m {
        out.extend(shift(n, k, s, false));
    }
    for k in 1..m {
        out.extend(swap(n, k));
    }
    out
}

/// Oracle comparison for one entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryCheck {
    pub label: String,
    /// Largest coefficient difference from the stated value.
    pub stated_error: f64,
    /// Largest coefficient difference from [`TableEntry::target`].
    pub error: f64,
    pub fit_residual: f64,
    pub misprint: bool,
}

fn coefficient_error(n: usize, got: &[(BasisTag, f64)], want: &[(BasisTag, f64)]) -> f64 {
    basis_tags(n)
        .into_iter()
        .map(|t| {
            let g = got.iter().find(|x| x.0 == t).map_or(0.0, |x| x.1);
            let w: f64 = want.iter().filter(|x| x.0 == t).map(|x| x.1).sum();
            (g - w).abs()
        })
        .fold(0.0, f64::max)
}

/// Fits the pushforward on a grid, decomposes it and compares.
pub fn check_entry(n: usize, e: &TableEntry) -> Result<EntryCheck> {
    let phi = Automorphism::new(n, vec![e.generator.clone()])?;
    let v = crate::vectorfield::field(e.source, n)?;
    let (pushed, fit_residual) = pushforward_detailed(&phi, &v)?;
    let dec = decompose(&pushed)?;
    Ok(EntryCheck {
        label: e.label(),
        stated_error: coefficient_error(n, &dec.coeffs, &e.expected),
        error: coefficient_error(n, &dec.coeffs, e.target()),
        fit_residual,
        misprint: e.corrected.is_some(),
    })
}
