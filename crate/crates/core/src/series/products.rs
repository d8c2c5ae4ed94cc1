//! Truncated infinite products: the double product over (q, t) and
//! one-variable eta-style products.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rational;

use super::bound::{Bound, Envelope};
use super::ops::mul;
use super::{BiSeries, BoxSpec, SeriesError, Slice};

/// Sign convention for the double product variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductSign {
    /// Weighted invariants: factors use `(-q)^l`.
    NegQ,
    /// Unweighted Euler characteristics: factors use `p^l`.
    PosP,
}

/// Generalized binomial coefficient `C(a, j)` for integer `a` and `j >= 0`.
pub fn gen_binomial(a: i64, j: i64) -> Rational {
    let mut acc = Rational::one();
    for i in 0..j {
        acc *= Rational::new(BigInt::from(a - i), BigInt::from(i + 1));
    }
    acc
}

/// The truncated product `prod_{l,m >= 1} (1 - (s*q)^l t^m)^{-l*e}` on the
/// requested box. Factors contributing only outside the box are skipped;
/// inside the window the result is exact because every factor's support has
/// non-negative q-exponents.
pub fn double_product(e: i64, sign: ProductSign, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    let tmax = spec.tmax;
    if e == 0 {
        return BiSeries::one(tmax).restrict(spec);
    }
    let mut acc = BiSeries::one(tmax);
    for m in 1..=tmax {
        for l in 1..=spec.qhi.max(0) {
            let jmax = (tmax / m).min(spec.qhi / l);
            if jmax < 1 {
                continue;
            }
            // (1 - x)^{-l e} = sum_j C(-l e, j) (-x)^j with x = (s q)^l t^m
            let mut cells = Vec::with_capacity(jmax as usize + 1);
            for j in 0..=jmax {
                let mut c = gen_binomial(-l * e, j);
                if j % 2 == 1 {
                    c = -c;
                }
                if sign == ProductSign::NegQ && (l * j) % 2 == 1 {
                    c = -c;
                }
                if !c.is_zero() {
                    cells.push((l * j, m * j, c));
                }
            }
            let factor = BiSeries::from_cells(tmax, cells);
            acc = mul(&acc, &factor)?;
        }
    }
    Ok(acc.restrict(spec)?.with_envelope(Envelope {
        lo: Bound::constant(0),
        hi: Bound::PosInf,
    }))
}

/// Exponent assignment for an eta-style product `prod_m (1 - t^m)^{k_m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaExponents {
    /// The same exponent for every `m >= 1`.
    Uniform(i64),
    /// Explicit exponents; absent entries are zero.
    Map(BTreeMap<i64, i64>),
}

impl EtaExponents {
    fn exponent(&self, m: i64) -> i64 {
        match self {
            EtaExponents::Uniform(k) => *k,
            EtaExponents::Map(map) => map.get(&m).copied().unwrap_or(0),
        }
    }
}

/// The truncated q-independent product `prod_{m >= 1} (1 - t^m)^{k_m}`.
pub fn eta_product(exponents: &EtaExponents, tmax: i64) -> BiSeries {
    let mut coeffs = vec![Rational::zero(); (tmax + 1) as usize];
    coeffs[0] = Rational::one();
    for m in 1..=tmax {
        let k = exponents.exponent(m);
        if k == 0 {
            continue;
        }
        // Multiply by (1 - t^m)^k = sum_j C(k, j) (-1)^j t^{m j}
        let mut next = vec![Rational::zero(); (tmax + 1) as usize];
        let jmax = tmax / m;
        for j in 0..=jmax {
            let mut c = gen_binomial(k, j);
            if j % 2 == 1 {
                c = -c;
            }
            if c.is_zero() {
                continue;
            }
            for d in 0..=(tmax - m * j) {
                if !coeffs[d as usize].is_zero() {
                    let add = &coeffs[d as usize] * &c;
                    next[(d + m * j) as usize] += add;
                }
            }
        }
        coeffs = next;
    }
    BiSeries::from_t_coeffs(tmax, coeffs)
}

/// `t -> t^r` on a q-independent series.
pub fn t_rescale(a: &BiSeries, r: i64) -> Result<BiSeries, SeriesError> {
    assert!(r >= 1, "rescale factor must be positive");
    if !a.is_q_independent() {
        return Err(SeriesError::QDependent);
    }
    if r == 1 {
        return Ok(a.clone());
    }
    // The result is trusted through t^tmax of the *input* grid: degree d of
    // the input lands at r*d, and intermediate degrees are genuinely zero.
    let tmax = a.tmax();
    let mut slices = vec![Slice::new(); (tmax + 1) as usize];
    for d in 0..=tmax {
        if let Some(c) = a.slice(d).get(&0) {
            if r * d <= tmax {
                slices[(r * d) as usize].insert(0, c.clone());
            }
        }
    }
    Ok(BiSeries::exact_from_slices(
        tmax,
        slices,
        Envelope::Q_INDEPENDENT,
    ))
}
