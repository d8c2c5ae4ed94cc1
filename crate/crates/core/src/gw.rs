//! Triangular inversion of low-genus Gromov-Witten data into the basis
//! expansion `Z_H = sum_i f_i(t) phi_{-2,1}^{i-1} phi_{0,1}^{h-i}`.
//!
//! Under `q = -e^{iu}` the monomial with index `i` opens as
//! `12^{h-i} u^{2i-2} + O(u^{2i})`, so matching against
//! `sum_g GW^g(t) u^{2g-2} mod u^{2h}` gives a system whose t^0 matrix is
//! triangular with diagonal `12^{h-i}`; it is solved order by order in t.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::forms::{phi_01_sbasis, phi_m21_sbasis};
use crate::rational::{rat, Rational};
use crate::series::json::{from_json, to_json, SeriesJson};
use crate::series::sbasis::SBasisSeries;
use crate::series::subst::sign_flip;
use crate::series::useries::{u_expand, USeries};
use crate::series::{BiSeries, BoxSpec, SeriesError};

/// Genus plus the q-independent series `GW^0_H(t) ... GW^h_H(t)`.
#[derive(Clone, Debug)]
pub struct GWInput {
    h: i64,
    gw: Vec<Vec<Rational>>, // t-coefficient vectors, length h+1
}

impl GWInput {
    pub fn new(h: i64, gw: Vec<Vec<Rational>>) -> Result<GWInput, SeriesError> {
        if h < 0 || gw.len() != (h + 1) as usize {
            return Err(SeriesError::InvalidData(format!(
                "genus {h} needs exactly {} series, got {}",
                h + 1,
                gw.len()
            )));
        }
        Ok(GWInput { h, gw })
    }

    pub fn from_series(h: i64, series: &[BiSeries]) -> Result<GWInput, SeriesError> {
        let gw = series
            .iter()
            .map(BiSeries::t_coeffs)
            .collect::<Result<Vec<_>, _>>()?;
        GWInput::new(h, gw)
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn series(&self, g: usize) -> &[Rational] {
        &self.gw[g]
    }

    fn coeff(&self, g: usize, t_order: usize) -> Rational {
        self.gw[g]
            .get(t_order)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    fn tmax(&self) -> i64 {
        self.gw
            .iter()
            .map(|v| v.len() as i64 - 1)
            .min()
            .unwrap_or(0)
    }
}

/// The solved coefficients `f_{i_min}(t) ... f_h(t)`. Inversion always
/// produces `i_min = 0` (irreducible section class); assembled expansions
/// for reducible classes accept negative `i_min` as input.
#[derive(Clone, Debug)]
pub struct FCoefficients {
    h: i64,
    i_min: i64,
    f: Vec<Vec<Rational>>,
}

impl FCoefficients {
    pub fn new(h: i64, i_min: i64, f: Vec<Vec<Rational>>) -> Result<FCoefficients, SeriesError> {
        if i_min > h || f.len() != (h - i_min + 1) as usize {
            return Err(SeriesError::InvalidData(format!(
                "coefficient list must cover i = {i_min}..={h}, got {} series",
                f.len()
            )));
        }
        Ok(FCoefficients { h, i_min, f })
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    pub fn i_min(&self) -> i64 {
        self.i_min
    }

    /// The series `f_i(t)` as a t-coefficient vector.
    pub fn f(&self, i: i64) -> &[Rational] {
        &self.f[(i - self.i_min) as usize]
    }

    pub fn tmax(&self) -> i64 {
        self.f.iter().map(|v| v.len() as i64 - 1).min().unwrap_or(0)
    }
}

/// JSON form shared by `GWInput` and `FCoefficients`:
/// `{ "h": int, "series": [seriesjson, ...] }`. For coefficient lists the
/// lowest index is inferred from the length (`i_min = h + 1 - len`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesListJson {
    pub h: i64,
    pub series: Vec<SeriesJson>,
}

impl GWInput {
    pub fn to_value(&self, tmax: i64) -> SeriesListJson {
        SeriesListJson {
            h: self.h,
            series: self
                .gw
                .iter()
                .map(|v| to_json(&BiSeries::from_t_coeffs(tmax, v.clone())))
                .collect(),
        }
    }

    pub fn from_value(doc: &SeriesListJson) -> Result<GWInput, SeriesError> {
        let series = doc
            .series
            .iter()
            .map(|s| from_json(s).and_then(|b| b.t_coeffs()))
            .collect::<Result<Vec<_>, _>>()?;
        GWInput::new(doc.h, series)
    }
}

impl FCoefficients {
    pub fn to_value(&self, tmax: i64) -> SeriesListJson {
        SeriesListJson {
            h: self.h,
            series: self
                .f
                .iter()
                .map(|v| to_json(&BiSeries::from_t_coeffs(tmax, v.clone())))
                .collect(),
        }
    }

    pub fn from_value(doc: &SeriesListJson) -> Result<FCoefficients, SeriesError> {
        let f = doc
            .series
            .iter()
            .map(|s| from_json(s).and_then(|b| b.t_coeffs()))
            .collect::<Result<Vec<_>, _>>()?;
        let i_min = doc.h + 1 - f.len() as i64;
        FCoefficients::new(doc.h, i_min, f)
    }
}

/// The basis monomial `phi_{-2,1}^{i-1} phi_{0,1}^{h-i}` in the s-basis.
pub fn monomial_sbasis(i: i64, h: i64, tmax: i64) -> Result<SBasisSeries, SeriesError> {
    if i > h {
        return Err(SeriesError::Precondition(
            "monomial index exceeds the genus",
        ));
    }
    Ok(phi_m21_sbasis(tmax)
        .pow(i - 1)?
        .mul(&phi_01_sbasis(tmax).pow(h - i)?))
}

/// u-expansion of the basis monomial; the leading t^0 term is
/// `12^{h-i} u^{2i-2}`.
pub fn monomial_u(i: i64, h: i64, umax: i64, tmax: i64) -> Result<USeries, SeriesError> {
    u_expand(&monomial_sbasis(i, h, tmax)?, umax)
}

/// Solve for `f_0(t) ... f_h(t)` from genus 0..h Gromov-Witten series via
/// the congruence `sum_i f_i M_i(u, t) = sum_g GW^g(t) u^{2g-2} mod u^{2h}`.
pub fn invert_gw(input: &GWInput, tmax: i64) -> Result<FCoefficients, SeriesError> {
    let h = input.h;
    let tmax = tmax.min(input.tmax().max(0));
    let umax = (2 * h).max(4);
    let size = (h + 1) as usize;

    // rows[g][i] = t-series of the u^{2g-2} coefficient of M_i
    let mut rows = vec![vec![Vec::new(); size]; size];
    for i in 0..=h {
        let m = monomial_u(i, h, umax, tmax)?;
        for g in 0..=h {
            rows[g as usize][i as usize] = m.u_coefficient(2 * g - 2)?;
        }
    }
    // t^0 matrix: triangular with diagonal 12^{h-i}
    for g in 0..size {
        for i in (g + 1)..size {
            assert!(
                rows[g][i].first().is_none_or(Rational::is_zero),
                "t^0 system is not triangular"
            );
        }
        let expected = rat(12).pow((h - g as i64) as i32);
        assert_eq!(rows[g][g][0], expected, "singular t^0 diagonal");
    }

    // Solve order by order in t. Within one t-order, row g determines
    // f_g: entries with i > g vanish at t^0 by triangularity, entries with
    // i < g are already solved this round, and lower t-orders are known.
    let mut f = vec![vec![Rational::zero(); (tmax + 1) as usize]; size];
    for t_order in 0..=(tmax as usize) {
        for g in 0..size {
            let mut rhs = input.coeff(g, t_order);
            for i in 0..size {
                for tau in 0..=t_order {
                    if tau == t_order && i >= g {
                        continue; // i == g is the unknown; i > g has a zero t^0 entry
                    }
                    let Some(a) = rows[g][i].get(t_order - tau) else {
                        continue;
                    };
                    if a.is_zero() || f[i][tau].is_zero() {
                        continue;
                    }
                    rhs -= a * &f[i][tau];
                }
            }
            f[g][t_order] = rhs / &rows[g][g][0];
        }
    }
    FCoefficients::new(h, 0, f)
}

/// `Z = sum_i f_i(t) phi_{-2,1}^{i-1} phi_{0,1}^{h-i}` in the s-basis.
pub fn assemble_sbasis(f: &FCoefficients, tmax: i64) -> Result<SBasisSeries, SeriesError> {
    let tmax = tmax.min(f.tmax().max(0));
    let mut acc = SBasisSeries::zero(tmax);
    for i in f.i_min..=f.h {
        let coeff = SBasisSeries::from_t_coeffs(tmax, f.f(i).to_vec());
        if coeff.is_zero() {
            continue;
        }
        acc = acc.add(&coeff.mul(&monomial_sbasis(i, f.h, tmax)?));
    }
    Ok(acc)
}

/// The assembled expansion as a bivariate series on the requested box.
pub fn assemble_z(f: &FCoefficients, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    assemble_sbasis(f, spec.tmax)?.expand_on(spec)
}

/// Euler-characteristic variant: the assembled series under the formal sign
/// flip `q -> -p` (coefficient at `(n, d)` multiplied by `(-1)^n`).
pub fn euler_variant(f: &FCoefficients, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
    Ok(sign_flip(&assemble_z(f, spec)?))
}

fn sigma(d: i64) -> i64 {
    (1..=d).filter(|k| d % k == 0).sum()
}

/// Genus-3 fiber-direction Gromov-Witten series of the abelian threefold:
/// `sum_{d >= 1} (8 sigma(2d) + 64 sigma(d/2) [d even]) t^d`.
pub fn gw3_abelian(tmax: i64) -> BiSeries {
    let mut coeffs = vec![Rational::zero()];
    for d in 1..=tmax {
        let mut v = 8 * sigma(2 * d);
        if d % 2 == 0 {
            v += 64 * sigma(d / 2);
        }
        coeffs.push(rat(v));
    }
    BiSeries::from_t_coeffs(tmax, coeffs)
}

/// Base-class (d = 0) genus-3 term completing `gw3_abelian` to the full
/// input of the genus-3 inversion. The value is pinned by the u^4 row of
/// the congruence at t^0: the expansion 12*wp*phi^2 - theta_D4*phi^2 has
/// u^4-coefficient -3 there, while the divisor sums start at t^1.
pub const GW3_ABELIAN_T0: i64 = -3;

/// The full genus-3 abelian GW input `(0, 0, 12, GW^3)`.
pub fn abelian_h3_input(tmax: i64) -> GWInput {
    let mut gw3 = gw3_abelian(tmax).t_coeffs().expect("q-independent");
    gw3[0] = rat(GW3_ABELIAN_T0);
    let zero = vec![Rational::zero(); (tmax + 1) as usize];
    let mut twelve = zero.clone();
    twelve[0] = rat(12);
    GWInput::new(3, vec![zero.clone(), zero, twelve, gw3]).expect("well-formed input")
}

/// The naive Euler-characteristic correction series
/// `1 + 12 sum_{d >= 1} sum_{k | d} (2k t^d + k t^{2d})`.
pub fn naive_euler_f3(tmax: i64) -> BiSeries {
    let mut coeffs = vec![Rational::zero(); (tmax + 1) as usize];
    coeffs[0] = rat(1);
    for d in 1..=tmax {
        for k in 1..=d {
            if d % k != 0 {
                continue;
            }
            coeffs[d as usize] += rat(24 * k);
            if 2 * d <= tmax {
                coeffs[(2 * d) as usize] += rat(12 * k);
            }
        }
    }
    BiSeries::from_t_coeffs(tmax, coeffs)
}

/// Left-hand side of the congruence as a u-series: `sum_i f_i M_i mod u^{2h}`.
pub fn congruence_lhs(f: &FCoefficients, tmax: i64, umax: i64) -> Result<USeries, SeriesError> {
    let tmax = tmax.min(f.tmax().max(0));
    let mut acc = USeries::zero(tmax, umax);
    for i in f.i_min..=f.h {
        let m = monomial_u(i, f.h, umax, tmax)?;
        acc = acc.add(&m.mul_t_series(f.f(i)));
    }
    Ok(acc.reduce_mod_u(2 * f.h))
}

/// Right-hand side of the congruence: `sum_g GW^g(t) u^{2g-2} mod u^{2h}`.
pub fn congruence_rhs(input: &GWInput, tmax: i64, umax: i64) -> USeries {
    let tmax = tmax.min(input.tmax().max(0));
    let mut acc = USeries::zero(tmax, umax);
    for g in 0..=(input.h as usize) {
        let mut m = USeries::zero(tmax, umax);
        m = m.add(&unit_u(tmax, umax, 2 * g as i64 - 2));
        acc = acc.add(&m.mul_t_series(input.series(g)));
    }
    acc.reduce_mod_u(2 * input.h)
}

fn unit_u(tmax: i64, umax: i64, j: i64) -> USeries {
    USeries::monomial(tmax, umax, j, rat(1))
}
