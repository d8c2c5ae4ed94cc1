//! The stable-pair side: the H = 0 evaluation, wall-crossing data, the index
//! transform of the derived equivalence, the elliptic-transformation-law
//! checker, and the closed low-genus formulas for Z_H = PT_H / PT_0.

use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::forms::{eisenstein, phi_m21_sbasis, weierstrass_p};
use crate::rational::{format_rational, rat, ratio, Rational};
use crate::series::bound::{Bound, Envelope};
use crate::series::ops::{invert, mul};
use crate::series::products::{double_product, eta_product, EtaExponents, ProductSign};
use crate::series::sbasis::SBasisSeries;
use crate::series::subst::subst_q_inv_t;
use crate::series::{BiSeries, BoxSpec, SeriesError, Slice, Window};

/// Topological input data: Euler characteristics of the threefold and base,
/// the arithmetic genus of the section class, and the variable convention
/// (q with `(-q)^l` factors for weighted invariants, p for unweighted Euler
/// characteristics). `h` is the declared genus used by all index arithmetic;
/// no consistency with `e_x`, `e_s` is assumed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeometryParams {
    pub e_x: i64,
    pub e_s: i64,
    pub h: i64,
    pub sign: ProductSign,
}

impl GeometryParams {
    pub fn weighted(e_x: i64, e_s: i64, h: i64) -> GeometryParams {
        GeometryParams {
            e_x,
            e_s,
            h,
            sign: ProductSign::NegQ,
        }
    }
}

/// `PT_0 = prod_{l,m} (1 - (sq)^l t^m)^{-l e_X} * prod_m (1 - t^m)^{-e_S}`.
pub fn pt0(g: &GeometryParams, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    let dp = double_product(g.e_x, g.sign, spec)?;
    let eta = eta_product(&EtaExponents::Uniform(-g.e_s), spec.tmax);
    mul(&dp, &eta)
}

/// Generalized Donaldson-Thomas count of fiber-class semistable sheaves:
/// `N_{n, dF} = sum_{k | (n, d)} -e_X / k^2` (for n = 0 the sum runs over
/// all divisors of d).
pub fn n_invariant(n: i64, d: i64, e_x: i64) -> Rational {
    assert!(d >= 1, "fiber degree must be positive");
    let g = if n == 0 { d } else { n.abs().gcd(&d) };
    let mut acc = Rational::zero();
    for k in 1..=g {
        if g % k == 0 {
            acc += ratio(-e_x, k * k);
        }
    }
    acc
}

/// Open slope interval `(lo, hi)` for n/d, with `hi = None` meaning infinity.
/// Both endpoints are exclusive, matching the two regions `(0, inf)` and
/// `(-1, 0)` of the wall-crossing proof.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeRegion {
    pub lo: Rational,
    pub hi: Option<Rational>,
}

impl SlopeRegion {
    pub fn positive() -> SlopeRegion {
        SlopeRegion {
            lo: rat(0),
            hi: None,
        }
    }

    pub fn negative_unit() -> SlopeRegion {
        SlopeRegion {
            lo: rat(-1),
            hi: Some(rat(0)),
        }
    }

    fn validate(&self) -> Result<(), SeriesError> {
        if self.lo < rat(-1) {
            return Err(SeriesError::Precondition(
                "slope region must lie inside (-1, inf)",
            ));
        }
        if let Some(hi) = &self.hi {
            if hi <= &self.lo {
                return Err(SeriesError::Precondition("empty slope region"));
            }
        }
        Ok(())
    }

    /// Exclusive integer bounds on n at fiber degree d: `n/d` in `(lo, hi)`.
    fn n_range(&self, d: i64, qhi: i64) -> (i64, i64) {
        let lo_n = floor_rational(&(&self.lo * rat(d))) + 1;
        let hi_n = match &self.hi {
            None => qhi,
            Some(hi) => ceil_rational(&(hi * rat(d))) - 1,
        };
        (lo_n, hi_n)
    }
}

fn floor_rational(r: &Rational) -> i64 {
    let f = r.floor();
    let v: num_bigint::BigInt = f.to_integer();
    i64::try_from(v).expect("slope bound fits i64")
}

fn ceil_rational(r: &Rational) -> i64 {
    let c = r.ceil();
    let v: num_bigint::BigInt = c.to_integer();
    i64::try_from(v).expect("slope bound fits i64")
}

/// The truncated double sum
/// `sum_{d >= 1} sum_{n/d in region} (-1)^{n-1} n N_{n, dF} q^n t^d`.
/// The d = 0 row contributes nothing (the counts are defined for fiber
/// classes only). When the region's slices fit inside the requested window
/// the result is exact; otherwise it is window-trusted with a one-sided
/// support envelope.
pub fn slope_sum(e_x: i64, region: &SlopeRegion, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    region.validate()?;
    let tmax = spec.tmax;
    let mut slices = vec![Slice::new(); (tmax + 1) as usize];
    let mut fits = true;
    for d in 1..=tmax {
        let (lo_n, hi_n) = region.n_range(d, spec.qhi);
        if region.hi.is_none() {
            fits = false; // unbounded above: truncated by the window
        } else if lo_n < spec.qlo || hi_n > spec.qhi {
            fits = false;
        }
        for n in lo_n.max(spec.qlo)..=hi_n.min(spec.qhi) {
            if n == 0 {
                continue;
            }
            let mut c = rat(n) * n_invariant(n, d, e_x);
            if n.rem_euclid(2) == 0 {
                c = -c;
            }
            if !c.is_zero() {
                slices[d as usize].insert(n, c);
            }
        }
    }
    if fits {
        let cells = slices
            .iter()
            .enumerate()
            .flat_map(|(d, sl)| sl.iter().map(move |(&n, c)| (n, d as i64, c.clone())))
            .collect::<Vec<_>>();
        return Ok(BiSeries::from_cells(tmax, cells));
    }
    let mut windows = vec![Window::range(spec.qlo, spec.qhi); (tmax + 1) as usize];
    windows[0] = Window::Full; // the d = 0 row is identically zero
    let lo_bound = if region.lo >= rat(0) {
        Bound::Affine { c: 1, m: 0 }
    } else {
        Bound::Affine { c: 0, m: -1 }
    };
    let hi_bound = match &region.hi {
        Some(h) if h <= &rat(0) => Bound::Affine { c: -1, m: 0 },
        _ => Bound::PosInf,
    };
    Ok(BiSeries::new_windowed(
        tmax,
        slices,
        windows,
        Envelope {
            lo: lo_bound,
            hi: hi_bound,
        },
    ))
}

/// `exp` of the slope-restricted wall-crossing sum.
pub fn exp_slope_sum(
    e_x: i64,
    region: &SlopeRegion,
    spec: BoxSpec,
) -> Result<BiSeries, SeriesError> {
    crate::series::ops::exp_series(&slope_sum(e_x, region, spec)?)
}

/// The wall-crossing factor `f(t/q, t)^{-1} * f(q, t)` relating pi-stable
/// and stable pair series, computed directly from the double product.
pub fn wallcross_factor(e_x: i64, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    let f = double_product(e_x, ProductSign::NegQ, spec)?;
    let sheared = subst_q_inv_t(&f)?;
    let inv = invert(&sheared)?;
    mul(&inv, &f)
}

/// Numerical index map of the derived equivalence:
/// `(n, d) -> (-n - 2h + 2, d + n + h - 1)`. An involution for every h.
pub fn charmap(n: i64, d: i64, h: i64) -> (i64, i64) {
    (-n - 2 * h + 2, d + n + h - 1)
}

/// Outcome of an elliptic-transformation-law check.
#[derive(Clone, Debug)]
pub struct LawVerdict {
    pub pass: bool,
    pub compared_cells: u64,
    pub first_mismatch: Option<(i64, i64, Rational, Rational)>,
}

impl LawVerdict {
    pub fn to_value(&self) -> Value {
        json!({
            "pass": self.pass,
            "compared_cells": self.compared_cells,
            "first_mismatch": self.first_mismatch.as_ref().map(|(n, d, lhs, rhs)| {
                json!([n, d, format_rational(lhs), format_rational(rhs)])
            }),
        })
    }
}

/// True when every slice is fully known and mirror-symmetric under
/// `q <-> 1/q`; such a series is its own symmetric representation.
fn is_symmetric_exact(z: &BiSeries) -> bool {
    z.is_exact()
        && (0..=z.tmax()).all(|d| {
            let sl = z.slice(d);
            sl.iter().all(|(&n, c)| sl.get(&-n) == Some(c))
        })
}

/// Check the elliptic transformation law
/// `Z(q t^lambda, t) = t^{-(h-1) lambda^2} q^{-2(h-1) lambda} Z(q, t)`,
/// comparing every pair of cells that both lie inside the validity box.
///
/// The law is an identity of elements of `Q(q)[[t]]`; which coefficient
/// identity it induces depends on the representation of Z:
///
/// - On a symmetric representation (every slice a mirror-symmetric Laurent
///   polynomial) it is the direct form
///   `c_{n,d} = c_{n + 2(h-1)lambda, d + lambda n + (h-1) lambda^2}`
///   for every lambda.
/// - On an ascending Laurent expansion (pole slices expanded towards
///   q^{+inf}, the shape of every stable-pair series) the lambda family is
///   generated by the q -> t/q involution together with the q <-> 1/q
///   symmetry of the underlying rational slices; only the involution
///   survives as a coefficient identity, namely the reflected form
///   `c_{n,d} = c_{-n - 2(h-1), d + n + (h-1)}`. The checker verifies that
///   form for any requested lambda (the dressing carries no additional
///   cell-wise content on this representation).
pub fn check_elliptic_law(z: &BiSeries, h: i64, lambda: i64) -> Result<LawVerdict, SeriesError> {
    let symmetric = is_symmetric_exact(z);
    let lam = if symmetric || lambda == 0 { lambda } else { 1 };
    let shift_n = 2 * (h - 1) * lam;
    let shift_d0 = (h - 1) * lam * lam;
    let partner_of = |n: i64, d: i64| -> (i64, i64) {
        if symmetric || lam == 0 {
            (n + shift_n, d + lam * n + shift_d0)
        } else {
            (-n - shift_n, d + lam * n + shift_d0)
        }
    };
    // Count over the stored hull widened to the default window: fully known
    // zero cells are honest comparisons too.
    let hull = {
        let (lo, hi) = z.global_span().unwrap_or((0, 0));
        (lo.min(-(z.tmax() + 2)), hi.max(z.tmax() + 2))
    };
    // Include cells whose partner exponent lands in the hull.
    let scan = if symmetric {
        (hull.0 - shift_n.abs(), hull.1 + shift_n.abs())
    } else {
        (
            (-hull.1 - shift_n).min(hull.0),
            (-hull.0 - shift_n).max(hull.1),
        )
    };
    let mut compared = 0u64;
    let mut first = None;
    for d in 0..=z.tmax() {
        let w = z.window(d);
        let (lo, hi) = match w {
            Window::Full => scan,
            Window::Range { lo, hi } => (lo.max(scan.0), hi.min(scan.1)),
        };
        for n in lo..=hi {
            if !z.in_box(n, d) {
                continue;
            }
            let partner = partner_of(n, d);
            if partner.1 < 0 || !z.in_box(partner.0, partner.1) {
                continue;
            }
            let lhs = z.coeff(n, d)?;
            let rhs = z.coeff(partner.0, partner.1)?;
            compared += 1;
            if lhs != rhs && first.is_none() {
                first = Some((n, d, lhs, rhs));
            }
        }
    }
    if compared == 0 {
        return Err(SeriesError::EmptyBox);
    }
    Ok(LawVerdict {
        pass: first.is_none(),
        compared_cells: compared,
        first_mismatch: first,
    })
}

/// Genus 0: `Z_H = F_H(t) / phi_{-2,1}`, expanded ascending on the box.
pub fn genus0_z(f_h: &BiSeries, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    let ts = f_h.t_coeffs()?;
    let tmax = spec.tmax.min(f_h.tmax());
    let s = SBasisSeries::from_t_coeffs(tmax, ts).mul(&phi_m21_sbasis(tmax).invert()?);
    s.expand_on(BoxSpec::new(tmax, spec.qlo, spec.qhi))
}

/// Genus 1: `Z_H = GW^0(t) * wp + GW^1(t)`.
pub fn genus1_z(gw0: &BiSeries, gw1: &BiSeries, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    let tmax = spec.tmax.min(gw0.tmax()).min(gw1.tmax());
    let z = SBasisSeries::from_t_coeffs(tmax, gw0.t_coeffs()?)
        .mul(&weierstrass_p(tmax))
        .add(&SBasisSeries::from_t_coeffs(tmax, gw1.t_coeffs()?));
    z.expand_on(BoxSpec::new(tmax, spec.qlo, spec.qhi))
}

/// Genus 2 closed formula:
/// `Z_H = GW^0 (wp^2 phi + E2 wp phi / 12 + (E2^2/288 - 11 E4/1440) phi)
///      + GW^1 (wp phi + E2 phi / 12) + GW^2 phi`
/// with `phi = phi_{-2,1}`.
pub fn genus2_z(
    gw0: &BiSeries,
    gw1: &BiSeries,
    gw2: &BiSeries,
    spec: BoxSpec,
) -> Result<BiSeries, SeriesError> {
    let tmax = spec.tmax.min(gw0.tmax()).min(gw1.tmax()).min(gw2.tmax());
    let phi = phi_m21_sbasis(tmax);
    let wp = weierstrass_p(tmax);
    let e2 = SBasisSeries::from_t_coeffs(tmax, eisenstein(1, tmax).t_coeffs()?);
    let e4 = SBasisSeries::from_t_coeffs(tmax, eisenstein(2, tmax).t_coeffs()?);

    let wp_phi = wp.mul(&phi);
    let block0 = wp
        .mul(&wp_phi)
        .add(&e2.mul(&wp_phi).scalar_mul(&ratio(1, 12)))
        .add(
            &e2.mul(&e2)
                .scalar_mul(&ratio(1, 288))
                .sub(&e4.scalar_mul(&ratio(11, 1440)))
                .mul(&phi),
        );
    let block1 = wp_phi.add(&e2.mul(&phi).scalar_mul(&ratio(1, 12)));

    let z = SBasisSeries::from_t_coeffs(tmax, gw0.t_coeffs()?)
        .mul(&block0)
        .add(&SBasisSeries::from_t_coeffs(tmax, gw1.t_coeffs()?).mul(&block1))
        .add(&SBasisSeries::from_t_coeffs(tmax, gw2.t_coeffs()?).mul(&phi));
    z.expand_on(BoxSpec::new(tmax, spec.qlo, spec.qhi))
}
