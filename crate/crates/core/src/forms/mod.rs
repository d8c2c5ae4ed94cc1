//! Constructors for the named series: Eisenstein series, Delta, the weak
//! Jacobi forms phi_{-2,1} and phi_{0,1}, the Weierstrass function, and the
//! D4 theta series.
//!
//! Conventions follow the product formulas used throughout:
//!   phi_{-2,1}(q,t) = (q + 2 + 1/q) prod_m (1+qt^m)^2 (1+t^m/q)^2 / (1-t^m)^4
//!   wp(q,t) = -1/12 + q/(1+q)^2 - sum_{d>=1} sum_{m|d} m((-q)^m - 2 + (-q)^{-m}) t^d
//!   phi_{0,1} = 12 * wp * phi_{-2,1}
//! so the t^0 slices are s, 1/s - 1/12 and 12 - s respectively, with
//! s = q + 2 + 1/q. phi_{0,1} is *constructed* from the definition above; its
//! correctness is pinned by the elliptic transformation law tests.

pub mod cache;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::rational::{rat, ratio, Rational};
use crate::series::bound::{Bound, Envelope};
use crate::series::ops::mul;
use crate::series::products::{eta_product, t_rescale, EtaExponents};
use crate::series::sbasis::{to_sbasis, SBasisSeries};
use crate::series::{BiSeries, BoxSpec, SeriesError, Slice};

/// Bernoulli numbers B_0..B_n (B_1 = -1/2), by the convolution recurrence
/// sum_{j=0}^{m} C(m+1, j) B_j = 0.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        let mut acc = Rational::zero();
        let mut binom = Rational::one(); // C(m+1, j), starting at j = 0
        for (j, bj) in b.iter().enumerate() {
            acc += &binom * bj;
            binom *= ratio(m as i64 + 1 - j as i64, j as i64 + 1);
        }
        b.push(-acc / rat(m as i64 + 1));
    }
    b
}

/// Sum of the r-th powers of the divisors of d.
fn sigma(d: i64, r: u32) -> Rational {
    let mut acc = Rational::zero();
    for m in 1..=d {
        if d % m == 0 {
            acc += rat(m).pow(r as i32);
        }
    }
    acc
}

/// Eisenstein series `E_{2k}(t) = 1 - (4k / B_{2k}) sum_d sigma_{2k-1}(d) t^d`.
pub fn eisenstein(k: u32, tmax: i64) -> BiSeries {
    assert!(k >= 1, "Eisenstein weight index must be positive");
    let b = bernoulli(2 * k as usize);
    let factor = -rat(4 * k as i64) / &b[2 * k as usize];
    let mut coeffs = vec![Rational::one()];
    for d in 1..=tmax {
        coeffs.push(&factor * sigma(d, 2 * k - 1));
    }
    BiSeries::from_t_coeffs(tmax, coeffs)
}

/// `Delta(t) = prod_m (1 - t^m)^24`.
pub fn delta(tmax: i64) -> BiSeries {
    eta_product(&EtaExponents::Uniform(24), tmax)
}

/// `theta_D4(t) = 1 + 24 sum_d (sum_{k|d, k odd} k) t^d`.
pub fn theta_d4(tmax: i64) -> BiSeries {
    let mut coeffs = vec![Rational::one()];
    for d in 1..=tmax {
        let mut acc = Rational::zero();
        for k in (1..=d).step_by(2) {
            if d % k == 0 {
                acc += rat(24 * k);
            }
        }
        coeffs.push(acc);
    }
    BiSeries::from_t_coeffs(tmax, coeffs)
}

/// The Weierstrass function in the s-basis: `1/s - 1/12` at t^0, and every
/// higher slice is a symmetric polynomial divisible by s.
pub fn weierstrass_p(tmax: i64) -> SBasisSeries {
    let mut wp = SBasisSeries::monomial(rat(1), -1, 0, tmax).add(&SBasisSeries::monomial(
        ratio(-1, 12),
        0,
        0,
        tmax,
    ));
    // Chebyshev-style cache: C_m(s) = q^m + q^{-m} with
    // C_{m+1} = (s - 2) C_m - C_{m-1}.
    let mut c_prev: BTreeMap<i64, Rational> = BTreeMap::from([(0, rat(2))]); // C_0
    let mut c_cur: BTreeMap<i64, Rational> = BTreeMap::from([(1, rat(1)), (0, rat(-2))]); // C_1
    let mut c_by_m: Vec<BTreeMap<i64, Rational>> = vec![c_prev.clone(), c_cur.clone()];
    for _ in 2..=tmax.max(1) {
        let mut next: BTreeMap<i64, Rational> = BTreeMap::new();
        for (&k, v) in &c_cur {
            *next.entry(k + 1).or_insert_with(Rational::zero) += v;
            *next.entry(k).or_insert_with(Rational::zero) += &(-rat(2)) * v;
        }
        for (&k, v) in &c_prev {
            *next.entry(k).or_insert_with(Rational::zero) -= v;
        }
        next.retain(|_, v| !v.is_zero());
        c_prev = std::mem::replace(&mut c_cur, next);
        c_by_m.push(c_cur.clone());
    }
    for d in 1..=tmax {
        let mut slice: Slice = Slice::new();
        for m in 1..=d {
            if d % m != 0 {
                continue;
            }
            // -m * chi_m with chi_m = (-q)^m - 2 + (-q)^{-m}:
            //   m odd:  chi = -(C_m + 2), so -m*chi = m (C_m + 2)
            //   m even: chi = C_m - 2,    so -m*chi = -m (C_m - 2)
            let (sign, shift) = if m % 2 == 1 {
                (rat(m), rat(2))
            } else {
                (rat(-m), rat(-2))
            };
            for (&k, v) in &c_by_m[m as usize] {
                let entry = slice.entry(k).or_insert_with(Rational::zero);
                *entry += &sign * v;
            }
            let entry = slice.entry(0).or_insert_with(Rational::zero);
            *entry += &sign * &shift;
        }
        slice.retain(|_, v| !v.is_zero());
        for (k, v) in slice {
            wp = wp.add(&SBasisSeries::monomial(v, k, d, tmax));
        }
    }
    wp
}

/// `phi_{-2,1}` as an exact bivariate series; every slice at t^d has support
/// inside `[-(d+1), d+1]`.
pub fn phi_m21(tmax: i64) -> BiSeries {
    let mut acc = BiSeries::from_cells(tmax, [(1, 0, rat(1)), (0, 0, rat(2)), (-1, 0, rat(1))]);
    for m in 1..=tmax {
        // (1 + q t^m)^2 (1 + t^m/q)^2, expanded exactly
        let jmax = tmax / m;
        let up = BiSeries::from_cells(
            tmax,
            (0..=jmax.min(2)).map(|j| (j, m * j, gen_square_binom(j))),
        );
        let down = BiSeries::from_cells(
            tmax,
            (0..=jmax.min(2)).map(|j| (-j, m * j, gen_square_binom(j))),
        );
        acc = mul(&acc, &up).expect("exact product");
        acc = mul(&acc, &down).expect("exact product");
    }
    let eta4 = eta_product(&EtaExponents::Uniform(-4), tmax);
    acc = mul(&acc, &eta4).expect("exact product");
    acc.with_envelope(Envelope {
        lo: Bound::Affine { c: -1, m: -1 },
        hi: Bound::Affine { c: 1, m: 1 },
    })
}

fn gen_square_binom(j: i64) -> Rational {
    // coefficients of (1 + x)^2
    match j {
        0 => rat(1),
        1 => rat(2),
        2 => rat(1),
        _ => rat(0),
    }
}

/// `phi_{-2,1}` in the s-basis: `s` at t^0 times a unit.
pub fn phi_m21_sbasis(tmax: i64) -> SBasisSeries {
    to_sbasis(&phi_m21(tmax)).expect("phi_{-2,1} slices are symmetric")
}

/// `phi_{0,1} = 12 * wp * phi_{-2,1}` in the s-basis; the `1/s` pole of wp
/// cancels against the `s` factor of phi_{-2,1}.
pub fn phi_01_sbasis(tmax: i64) -> SBasisSeries {
    weierstrass_p(tmax)
        .scalar_mul(&rat(12))
        .mul(&phi_m21_sbasis(tmax))
}

/// `phi_{0,1}` as an exact bivariate series.
pub fn phi_01(tmax: i64) -> BiSeries {
    phi_01_sbasis(tmax)
        .expand_exact()
        .expect("phi_{0,1} has polynomial slices")
        .with_envelope(Envelope {
            lo: Bound::Affine { c: -1, m: -1 },
            hi: Bound::Affine { c: 1, m: 1 },
        })
}

/// Symbolic name plus parameters for a standard generator; `(kind, params)`
/// uniquely determines the series on a given box.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormId {
    Eisenstein(u32),
    Delta,
    PhiMinus21,
    Phi01,
    WeierstrassP,
    ThetaD4,
    EtaProduct(Vec<(i64, i64)>),
    Uniform(i64),
    TRescale(Box<FormId>, i64),
}

impl FormId {
    pub fn kind_slug(&self) -> String {
        match self {
            FormId::Eisenstein(w) => format!("e{w}"),
            FormId::Delta => "delta".into(),
            FormId::PhiMinus21 => "phi-m21".into(),
            FormId::Phi01 => "phi-01".into(),
            FormId::WeierstrassP => "wp".into(),
            FormId::ThetaD4 => "theta-d4".into(),
            FormId::EtaProduct(_) => "eta".into(),
            FormId::Uniform(_) => "eta-uniform".into(),
            FormId::TRescale(..) => "t-rescale".into(),
        }
    }

    /// `{ "kind": string, "params": [...] }`
    pub fn to_value(&self) -> Value {
        let (kind, params) = match self {
            FormId::Eisenstein(w) => ("eisenstein", json!([w])),
            FormId::Delta => ("delta", json!([])),
            FormId::PhiMinus21 => ("phi-m21", json!([])),
            FormId::Phi01 => ("phi-01", json!([])),
            FormId::WeierstrassP => ("wp", json!([])),
            FormId::ThetaD4 => ("theta-d4", json!([])),
            FormId::EtaProduct(map) => ("eta", json!(map)),
            FormId::Uniform(k) => ("eta-uniform", json!([k])),
            FormId::TRescale(base, r) => ("t-rescale", json!([base.to_value(), r])),
        };
        json!({ "kind": kind, "params": params })
    }

    pub fn from_value(v: &Value) -> Option<FormId> {
        let kind = v.get("kind")?.as_str()?;
        let params = v.get("params")?;
        Some(match kind {
            "eisenstein" => FormId::Eisenstein(params.get(0)?.as_u64()? as u32),
            "delta" => FormId::Delta,
            "phi-m21" => FormId::PhiMinus21,
            "phi-01" => FormId::Phi01,
            "wp" => FormId::WeierstrassP,
            "theta-d4" => FormId::ThetaD4,
            "eta" => {
                let pairs = params.as_array()?;
                let mut map = Vec::new();
                for p in pairs {
                    map.push((p.get(0)?.as_i64()?, p.get(1)?.as_i64()?));
                }
                FormId::EtaProduct(map)
            }
            "eta-uniform" => FormId::Uniform(params.get(0)?.as_i64()?),
            "t-rescale" => FormId::TRescale(
                Box::new(FormId::from_value(params.get(0)?)?),
                params.get(1)?.as_i64()?,
            ),
            _ => return None,
        })
    }

    /// Build the series on the requested box. Forms with polynomial slices
    /// come back exact; the Weierstrass function is expanded ascending on
    /// the requested q-window.
    pub fn build(&self, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
        let tmax = spec.tmax;
        Ok(match self {
            FormId::Eisenstein(w) => {
                if *w == 0 || w % 2 != 0 {
                    return Err(SeriesError::InvalidData(format!(
                        "Eisenstein weight must be a positive even integer, got {w}"
                    )));
                }
                eisenstein(w / 2, tmax)
            }
            FormId::Delta => delta(tmax),
            FormId::PhiMinus21 => phi_m21(tmax),
            FormId::Phi01 => phi_01(tmax),
            FormId::WeierstrassP => weierstrass_p(tmax).expand_on(spec)?,
            FormId::ThetaD4 => theta_d4(tmax),
            FormId::EtaProduct(pairs) => {
                let map: BTreeMap<i64, i64> = pairs.iter().copied().collect();
                eta_product(&EtaExponents::Map(map), tmax)
            }
            FormId::Uniform(k) => eta_product(&EtaExponents::Uniform(*k), tmax),
            FormId::TRescale(base, r) => {
                if *r < 1 {
                    return Err(SeriesError::InvalidData(
                        "rescale factor must be >= 1".into(),
                    ));
                }
                t_rescale(&base.build(spec)?, *r)?
            }
        })
    }
}

/// `E2(t)`, `E4(t)`, `E6(t)` at once; most formulas want all three.
pub fn quasi_modular_generators(tmax: i64) -> (BiSeries, BiSeries, BiSeries) {
    (
        eisenstein(1, tmax),
        eisenstein(2, tmax),
        eisenstein(3, tmax),
    )
}

/// Convenience scalar multiple used everywhere: `12 * wp`.
pub fn twelve_wp(tmax: i64) -> SBasisSeries {
    weierstrass_p(tmax).scalar_mul(&rat(12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::assert_series_eq;
    use crate::series::ops::{scalar_mul, sub};

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(8);
        assert_eq!(b[0], rat(1));
        assert_eq!(b[1], ratio(-1, 2));
        assert_eq!(b[2], ratio(1, 6));
        assert_eq!(b[4], ratio(-1, 30));
        assert_eq!(b[6], ratio(1, 42));
        assert_eq!(b[8], ratio(-1, 30));
        assert_eq!(b[3], rat(0));
    }

    #[test]
    fn eisenstein_expansions() {
        // E2 = 1 - 24t - 72t^2 - 96t^3 - ... (coefficient -24*sigma_1(d))
        let e2 = eisenstein(1, 4).t_coeffs().unwrap();
        assert_eq!(e2, vec![rat(1), rat(-24), rat(-72), rat(-96), rat(-168)]);
        // E4 leading coefficient is 1; E4 = 1 + 240 sigma_3
        let e4 = eisenstein(2, 2).t_coeffs().unwrap();
        assert_eq!(e4[0], rat(1));
        assert_eq!(e4[1], rat(240));
        // E6 = 1 - 504 sigma_5
        let e6 = eisenstein(3, 2).t_coeffs().unwrap();
        assert_eq!(e6, vec![rat(1), rat(-504), rat(-16632)]);
    }

    #[test]
    fn theta_d4_first_coefficients() {
        let th = theta_d4(6).t_coeffs().unwrap();
        assert_eq!(th[1], rat(24)); // d=1: k=1
        assert_eq!(th[2], rat(24)); // odd divisors of 2: {1}
        assert_eq!(th[3], rat(96)); // {1,3}: 24*4
        assert_eq!(th[4], rat(24));
        assert_eq!(th[5], rat(144));
    }

    #[test]
    fn theta_d4_equals_e2_combination() {
        // Classical identity: theta_D4(t) = 2 E2(t^2) - E2(t)
        let tmax = 16;
        let th = theta_d4(tmax);
        let e2 = eisenstein(1, tmax);
        let e2t2 = t_rescale(&e2, 2).unwrap();
        let combo = sub(&scalar_mul(&rat(2), &e2t2), &e2).unwrap();
        assert_series_eq(&th, &combo, "theta_D4 vs 2E2(t^2) - E2(t)");
    }

    #[test]
    fn wp_slices() {
        let wp = weierstrass_p(4);
        // t^0: 1/s - 1/12
        assert_eq!(wp.coeff(-1, 0).unwrap(), rat(1));
        assert_eq!(wp.coeff(0, 0).unwrap(), ratio(-1, 12));
        // t^1 slice is s (the d=1, m=1 divisor term)
        assert_eq!(wp.coeff(1, 1).unwrap(), rat(1));
        assert_eq!(wp.coeff(0, 1).unwrap(), rat(0));
        // t^2 slice is -2s^2 + 9s
        assert_eq!(wp.coeff(2, 2).unwrap(), rat(-2));
        assert_eq!(wp.coeff(1, 2).unwrap(), rat(9));
        assert_eq!(wp.coeff(0, 2).unwrap(), rat(0));
        // every slice above t^0 is divisible by s
        for d in 1..=4 {
            assert_eq!(wp.coeff(0, d).unwrap(), rat(0), "s^0 part at t^{d}");
            assert!(wp.slice(d).keys().all(|&k| k >= 1));
        }
    }

    #[test]
    fn wp_t1_slice_as_biseries() {
        // The d=1 inner sum evaluates to q + 2 + 1/q.
        let wp = weierstrass_p(2);
        let mut t1 = SBasisSeries::zero(0);
        for (&k, c) in wp.slice(1) {
            t1 = t1.add(&SBasisSeries::monomial(c.clone(), k, 0, 0));
        }
        let expanded = t1.expand_exact().unwrap();
        let expected = BiSeries::from_cells(0, [(1, 0, rat(1)), (0, 0, rat(2)), (-1, 0, rat(1))]);
        assert_series_eq(&expanded, &expected, "wp t^1 slice");
    }

    #[test]
    fn phi_m21_t0_is_s_and_slices_are_symmetric() {
        let phi = phi_m21(6);
        assert_eq!(phi.coeff(1, 0).unwrap(), rat(1));
        assert_eq!(phi.coeff(0, 0).unwrap(), rat(2));
        assert_eq!(phi.coeff(-1, 0).unwrap(), rat(1));
        for d in 0..=6 {
            for (&n, c) in phi.slice(d) {
                assert_eq!(phi.coeff(-n, d).unwrap(), *c, "symmetry at ({n}, {d})");
                assert!(n.abs() <= d + 1, "support bound at ({n}, {d})");
            }
        }
        // s-basis t^0 slice is exactly s
        let sb = phi_m21_sbasis(4);
        assert_eq!(sb.coeff(1, 0).unwrap(), rat(1));
        assert_eq!(sb.slice(0).len(), 1);
    }

    #[test]
    fn phi_m21_t1_slice() {
        // t^1 slice: s * 2s = 2s^2, i.e. 2q^2 + 8q + 12 + 8/q + 2/q^2
        let phi = phi_m21(3);
        assert_eq!(phi.coeff(2, 1).unwrap(), rat(2));
        assert_eq!(phi.coeff(1, 1).unwrap(), rat(8));
        assert_eq!(phi.coeff(0, 1).unwrap(), rat(12));
    }

    #[test]
    fn phi_01_slices_match_the_standard_expansion() {
        // Golden values pinned after the transformation-law suite: the t^0
        // slice is 10 - q - 1/q (that is, 12 - s), and the t^1 slice is
        // 10q^2 + 64q + 108 + 64/q + 10/q^2.
        let phi0 = phi_01(4);
        assert_eq!(phi0.coeff(0, 0).unwrap(), rat(10));
        assert_eq!(phi0.coeff(1, 0).unwrap(), rat(-1));
        assert_eq!(phi0.coeff(-1, 0).unwrap(), rat(-1));
        assert_eq!(phi0.coeff(2, 1).unwrap(), rat(10));
        assert_eq!(phi0.coeff(1, 1).unwrap(), rat(64));
        assert_eq!(phi0.coeff(0, 1).unwrap(), rat(108));
        assert_eq!(phi0.coeff(-2, 1).unwrap(), rat(10));
    }

    #[test]
    fn form_id_round_trip() {
        let forms = [
            FormId::Eisenstein(4),
            FormId::Delta,
            FormId::PhiMinus21,
            FormId::TRescale(Box::new(FormId::Eisenstein(2)), 2),
            FormId::EtaProduct(vec![(1, 24), (2, -12)]),
            FormId::Uniform(-12),
        ];
        for f in forms {
            let v = f.to_value();
            assert_eq!(FormId::from_value(&v), Some(f));
        }
    }
}
