//! Decomposition in the bigraded ring QMod[phi_{-2,1}, phi_{0,1}] at fixed
//! weight and index.
//!
//! Monomials `E2^a E4^b E6^c phi_{-2,1}^d phi_{0,1}^e` have weight
//! `2a + 4b + 6c - 2d` and index `d + e`. A decomposition solves an exact
//! overdetermined linear system over all cells of the target's box; success
//! requires every cell to match, and failure (with the first residual cell)
//! is a first-class verdict rather than an error -- it is how
//! non-modularity statements are demonstrated.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::forms::{eisenstein, phi_01, phi_m21};
use crate::linalg::{solve_exact, SolveOutcome};
use crate::rational::{format_rational, Rational};
use crate::series::ops::{mul, pow};
use crate::series::{BiSeries, SeriesError, Window};

/// Exponents `(a, b, c, d, e)` of `E2^a E4^b E6^c phi_{-2,1}^d phi_{0,1}^e`.
/// Weight and index are derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedMonomial {
    pub e2: u32,
    pub e4: u32,
    pub e6: u32,
    pub phi_m21: u32,
    pub phi_01: u32,
}

impl GradedMonomial {
    pub fn weight(&self) -> i64 {
        2 * self.e2 as i64 + 4 * self.e4 as i64 + 6 * self.e6 as i64 - 2 * self.phi_m21 as i64
    }

    pub fn index(&self) -> i64 {
        self.phi_m21 as i64 + self.phi_01 as i64
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        for (name, e) in [
            ("E2", self.e2),
            ("E4", self.e4),
            ("E6", self.e6),
            ("phi[-2,1]", self.phi_m21),
            ("phi[0,1]", self.phi_01),
        ] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Evaluate the monomial as an exact series.
    pub fn eval(&self, tmax: i64) -> Result<BiSeries, SeriesError> {
        let mut acc = pow(&eisenstein(1, tmax), self.e2)?;
        acc = mul(&acc, &pow(&eisenstein(2, tmax), self.e4)?)?;
        acc = mul(&acc, &pow(&eisenstein(3, tmax), self.e6)?)?;
        acc = mul(&acc, &pow(&phi_m21(tmax), self.phi_m21)?)?;
        mul(&acc, &pow(&phi_01(tmax), self.phi_01)?)
    }
}

/// All monomials of the given weight and index, in lexicographic order of
/// `(a, b, c, d, e)`. Requires `weight >= -2 * index`; odd weights have no
/// monomials.
pub fn basis_enum(weight: i64, index: i64) -> Vec<GradedMonomial> {
    basis_enum_in(weight, index, true)
}

/// As `basis_enum`, optionally excluding the non-modular generator E2
/// (the `QMod ∩ Mod` basis).
pub fn basis_enum_in(weight: i64, index: i64, allow_e2: bool) -> Vec<GradedMonomial> {
    assert!(index >= 0, "index must be non-negative");
    assert!(weight >= -2 * index, "weight below -2 * index");
    let mut out = Vec::new();
    for d in 0..=index {
        let e = index - d;
        let w2 = weight + 2 * d;
        if w2 < 0 || w2 % 2 != 0 {
            continue;
        }
        for c in 0..=(w2 / 6) {
            for b in 0..=((w2 - 6 * c) / 4) {
                let rem = w2 - 6 * c - 4 * b;
                debug_assert!(rem % 2 == 0);
                let a = rem / 2;
                if a > 0 && !allow_e2 {
                    continue;
                }
                out.push(GradedMonomial {
                    e2: a as u32,
                    e4: b as u32,
                    e6: c as u32,
                    phi_m21: d as u32,
                    phi_01: e as u32,
                });
            }
        }
    }
    out.sort();
    out
}

/// Result of a decomposition attempt.
#[derive(Clone, Debug)]
pub struct DecomposeVerdict {
    pub ok: bool,
    pub coefficients: BTreeMap<GradedMonomial, Rational>,
    pub residual_cell: Option<(i64, i64)>,
}

impl DecomposeVerdict {
    pub fn to_value(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coefficients
            .iter()
            .map(|(m, c)| (m.label(), Value::String(format_rational(c))))
            .collect();
        json!({
            "ok": self.ok,
            "coefficients": coeffs,
            "residual_cell": self.residual_cell.map(|(n, d)| json!([n, d])),
        })
    }
}

/// Exact linear solve of `sum_M c_M * M = target` over all cells of the
/// target's box, for `M` ranging over the monomials of the given weight and
/// index. The box must overdetermine the system (at least twice as many
/// cells as basis elements). An inconsistent system is reported as a failed
/// verdict with the first residual cell.
pub fn decompose(
    target: &BiSeries,
    weight: i64,
    index: i64,
    allow_e2: bool,
) -> Result<DecomposeVerdict, SeriesError> {
    let basis = basis_enum_in(weight, index, allow_e2);
    let tmax = target.tmax();
    let evals = basis
        .iter()
        .map(|m| m.eval(tmax))
        .collect::<Result<Vec<_>, _>>()?;

    // Sample every readable cell inside the hull of all supports involved.
    let mut hull = target.global_span();
    for e in &evals {
        hull = match (hull, e.global_span()) {
            (None, s) | (s, None) => s,
            (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
        };
    }
    let mut cells = Vec::new();
    if let Some((h0, h1)) = hull {
        for d in 0..=tmax {
            let (lo, hi) = match target.window(d) {
                Window::Full => (h0, h1),
                Window::Range { lo, hi } => (lo.max(h0), hi.min(h1)),
            };
            for n in lo..=hi {
                cells.push((n, d));
            }
        }
    }
    if cells.len() < 2 * basis.len().max(1) {
        return Err(SeriesError::BoxTooSmall(
            "decomposition needs at least twice as many cells as basis elements",
        ));
    }

    let rows: Vec<Vec<Rational>> = cells
        .iter()
        .map(|&(n, d)| {
            evals
                .iter()
                .map(|e| e.coeff(n, d))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rhs: Vec<Rational> = cells
        .iter()
        .map(|&(n, d)| target.coeff(n, d))
        .collect::<Result<Vec<_>, _>>()?;

    match solve_exact(&rows, &rhs) {
        SolveOutcome::Unique(x) => Ok(DecomposeVerdict {
            ok: true,
            coefficients: basis
                .into_iter()
                .zip(x)
                .filter(|(_, c)| !num_traits::Zero::is_zero(c))
                .collect(),
            residual_cell: None,
        }),
        SolveOutcome::Inconsistent { row } => Ok(DecomposeVerdict {
            ok: false,
            coefficients: BTreeMap::new(),
            residual_cell: Some(cells[row]),
        }),
        SolveOutcome::Underdetermined => Err(SeriesError::BoxTooSmall(
            "decomposition system is underdetermined on this box",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::series::ops::{add, scalar_mul};

    #[test]
    fn basis_enumeration_examples() {
        // (0, 0): only the unit
        let b = basis_enum(0, 0);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].label(), "1");
        // (0, 1): phi_{0,1} and E2 * phi_{-2,1}, in lexicographic order
        let b = basis_enum(0, 1);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].label(), "phi[0,1]");
        assert_eq!(b[1].label(), "E2*phi[-2,1]");
        // (-2, 1): only phi_{-2,1}
        let b = basis_enum(-2, 1);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].label(), "phi[-2,1]");
        // weight 2, index 0: E2 only; the E2-free basis is empty
        assert_eq!(basis_enum(2, 0).len(), 1);
        assert!(basis_enum_in(2, 0, false).is_empty());
    }

    #[test]
    fn graded_invariants() {
        for m in basis_enum(0, 2) {
            assert_eq!(m.weight(), 0);
            assert_eq!(m.index(), 2);
        }
    }

    #[test]
    fn recovers_exact_combinations() {
        let tmax = 8;
        let basis = basis_enum(0, 1);
        let target = add(
            &scalar_mul(&rat(3), &basis[0].eval(tmax).unwrap()),
            &scalar_mul(&rat(-5), &basis[1].eval(tmax).unwrap()),
        )
        .unwrap();
        let verdict = decompose(&target, 0, 1, true).unwrap();
        assert!(verdict.ok);
        assert_eq!(verdict.coefficients.len(), 2);
        assert_eq!(verdict.coefficients[&basis[0]], rat(3));
        assert_eq!(verdict.coefficients[&basis[1]], rat(-5));
    }

    #[test]
    fn round_trip_at_every_desk_grading() {
        // integer combinations recover exactly at the four bigradings
        let tmax = 9;
        for (w, m) in [(0, 1), (0, 2), (-2, 1), (4, 0)] {
            let basis = basis_enum(w, m);
            assert!(!basis.is_empty(), "({w}, {m})");
            let mut target = BiSeries::zero(tmax);
            for (i, b) in basis.iter().enumerate() {
                let c = rat(2 * i as i64 - 3);
                target = add(&target, &scalar_mul(&c, &b.eval(tmax).unwrap())).unwrap();
            }
            let verdict = decompose(&target, w, m, true).unwrap();
            assert!(verdict.ok, "({w}, {m}): {:?}", verdict.to_value());
            for (i, b) in basis.iter().enumerate() {
                let c = rat(2 * i as i64 - 3);
                let got = verdict
                    .coefficients
                    .get(b)
                    .cloned()
                    .unwrap_or_else(|| rat(0));
                assert_eq!(got, c, "({w}, {m}) coefficient of {}", b.label());
            }
        }
    }

    #[test]
    fn trivial_eisenstein_decomposition() {
        // Weight-4, index-0 monomials are E2^2 and E4; the target E4
        // decomposes as exactly {E4: 1}.
        let e4 = eisenstein(2, 8);
        let verdict = decompose(&e4, 4, 0, true).unwrap();
        assert!(verdict.ok);
        let e4_monomial = GradedMonomial {
            e2: 0,
            e4: 1,
            e6: 0,
            phi_m21: 0,
            phi_01: 0,
        };
        assert_eq!(verdict.coefficients.len(), 1);
        assert_eq!(verdict.coefficients[&e4_monomial], rat(1));
    }

    #[test]
    fn failure_is_a_verdict_with_residual() {
        // E2 is not in the weight-2 modular (E2-free) space: empty basis.
        let e2 = eisenstein(1, 8);
        let verdict = decompose(&e2, 2, 0, false).unwrap();
        assert!(!verdict.ok);
        assert_eq!(verdict.residual_cell, Some((0, 0)));
        // E2(t^2) is not proportional to E2(t): with basis {E2} the system
        // is inconsistent beyond t^0.
        let e2t2 = crate::series::products::t_rescale(&e2, 2).unwrap();
        let verdict = decompose(&e2t2, 2, 0, true).unwrap();
        assert!(!verdict.ok);
        assert!(verdict.residual_cell.is_some());
    }

    #[test]
    fn underdetermined_box_is_an_error() {
        let target = phi_01(0); // a single t-degree cannot pin down (0, 2)
        assert!(matches!(
            decompose(&target, 0, 2, true),
            Err(SeriesError::BoxTooSmall(_))
        ));
    }

    #[test]
    fn full_column_rank_at_weight0_index2() {
        // Linear independence of the (0, 2) monomials on the default box:
        // a zero target decomposes with all-zero coefficients uniquely.
        let tmax = 10;
        let basis = basis_enum(0, 2);
        assert!(basis.len() >= 3);
        let zero = BiSeries::zero(tmax);
        let verdict = decompose(&zero, 0, 2, true).unwrap();
        assert!(verdict.ok);
        assert!(verdict.coefficients.is_empty());
    }
}
