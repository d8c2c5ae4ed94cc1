//! The u-expansion `q = -e^{iu}`, under which `s = 2 - 2cos(u)`.
//!
//! Substituting `s = u^2 - u^4/12 + u^6/360 - ...` (and its reciprocal for
//! s-poles) turns an s-basis series into a Laurent series in u^2 whose
//! coefficients are t-power-series with exact rational entries: only even
//! powers of u survive, so every `i` cancels.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::{rat, Rational};

use super::sbasis::SBasisSeries;
use super::{SeriesError, Slice};

/// Truncated Laurent series in u^2 with t-power-series coefficients.
/// Trusted for u-exponents `j <= umax` (poles are exact).
#[derive(Clone, Debug, PartialEq)]
pub struct USeries {
    tmax: i64,
    umax: i64,
    slices: Vec<Slice>, // per t-degree: even u-exponent -> coefficient
}

impl USeries {
    pub fn zero(tmax: i64, umax: i64) -> USeries {
        USeries {
            tmax,
            umax,
            slices: vec![Slice::new(); (tmax + 1) as usize],
        }
    }

    /// `c * u^j` at t^0 (dropped if `j` exceeds the truncation).
    pub fn monomial(tmax: i64, umax: i64, j: i64, c: Rational) -> USeries {
        let mut s = USeries::zero(tmax, umax);
        if j <= umax && !c.is_zero() {
            s.slices[0].insert(j, c);
        }
        s
    }

    pub fn tmax(&self) -> i64 {
        self.tmax
    }

    pub fn umax(&self) -> i64 {
        self.umax
    }

    pub fn coeff(&self, j: i64, d: i64) -> Result<Rational, SeriesError> {
        if !(0..=self.tmax).contains(&d) || j > self.umax {
            return Err(SeriesError::OutsideBox { n: j, d });
        }
        Ok(self.slices[d as usize]
            .get(&j)
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    /// Lowest u-exponent present, if any.
    pub fn min_u_order(&self) -> Option<i64> {
        self.slices
            .iter()
            .filter_map(|s| s.keys().next())
            .min()
            .copied()
    }

    /// The coefficient of `u^j` as a t-coefficient vector.
    pub fn u_coefficient(&self, j: i64) -> Result<Vec<Rational>, SeriesError> {
        if j > self.umax {
            return Err(SeriesError::OutsideBox { n: j, d: 0 });
        }
        Ok((0..=self.tmax)
            .map(|d| {
                self.slices[d as usize]
                    .get(&j)
                    .cloned()
                    .unwrap_or_else(Rational::zero)
            })
            .collect())
    }

    pub fn add(&self, other: &USeries) -> USeries {
        let tmax = self.tmax.min(other.tmax);
        let umax = self.umax.min(other.umax);
        let mut slices = Vec::with_capacity((tmax + 1) as usize);
        for d in 0..=(tmax as usize) {
            let mut sl: Slice = self.slices[d]
                .iter()
                .filter(|(&j, _)| j <= umax)
                .map(|(&j, c)| (j, c.clone()))
                .collect();
            for (&j, c) in other.slices[d].iter().filter(|(&j, _)| j <= umax) {
                let entry = sl.entry(j).or_insert_with(Rational::zero);
                *entry += c;
                if entry.is_zero() {
                    sl.remove(&j);
                }
            }
            slices.push(sl);
        }
        USeries { tmax, umax, slices }
    }

    /// Multiply by a q-independent t-series (coefficient vector).
    pub fn mul_t_series(&self, ts: &[Rational]) -> USeries {
        let mut slices = vec![Slice::new(); (self.tmax + 1) as usize];
        for d1 in 0..=self.tmax {
            if self.slices[d1 as usize].is_empty() {
                continue;
            }
            for (d2, c2) in ts.iter().enumerate() {
                let d = d1 + d2 as i64;
                if d > self.tmax {
                    break;
                }
                if c2.is_zero() {
                    continue;
                }
                for (&j, c1) in &self.slices[d1 as usize] {
                    let entry = slices[d as usize].entry(j).or_insert_with(Rational::zero);
                    *entry += c1 * c2;
                }
            }
        }
        for sl in &mut slices {
            sl.retain(|_, c| !c.is_zero());
        }
        USeries {
            tmax: self.tmax,
            umax: self.umax,
            slices,
        }
    }

    pub fn scalar_mul(&self, c: &Rational) -> USeries {
        self.mul_t_series(std::slice::from_ref(c))
    }

    pub fn sub(&self, other: &USeries) -> USeries {
        self.add(&other.scalar_mul(&rat(-1)))
    }

    /// Drop all u-exponents at or above `j_cut` (reduction mod u^{j_cut}).
    pub fn reduce_mod_u(&self, j_cut: i64) -> USeries {
        let mut out = self.clone();
        out.umax = out.umax.min(j_cut - 2);
        for sl in &mut out.slices {
            sl.retain(|&j, _| j < j_cut);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.is_empty())
    }
}

/// Laurent polynomial in u (even exponents), exact through `exact_to`.
#[derive(Clone, Debug)]
struct UPoly {
    coeffs: BTreeMap<i64, Rational>,
    exact_to: i64,
}

impl UPoly {
    fn one(exact_to: i64) -> UPoly {
        UPoly {
            coeffs: BTreeMap::from([(0, Rational::one())]),
            exact_to,
        }
    }

    fn mul(&self, other: &UPoly) -> UPoly {
        let ord_a = self.coeffs.keys().next().copied().unwrap_or(0);
        let ord_b = other.coeffs.keys().next().copied().unwrap_or(0);
        let exact_to = (self.exact_to + ord_b).min(other.exact_to + ord_a);
        let mut coeffs = BTreeMap::new();
        for (&j1, c1) in &self.coeffs {
            for (&j2, c2) in &other.coeffs {
                let j = j1 + j2;
                if j > exact_to {
                    continue;
                }
                let entry = coeffs.entry(j).or_insert_with(Rational::zero);
                *entry += c1 * c2;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        UPoly { coeffs, exact_to }
    }
}

/// `2 - 2cos(u) = sum_{r>=1} (-1)^{r+1} 2 u^{2r} / (2r)!`, exact to `u^n`.
fn s_of_u(exact_to: i64) -> UPoly {
    let mut coeffs = BTreeMap::new();
    let mut fact = Rational::one(); // (2r)!
    for r in 1.. {
        let j = 2 * r;
        if j > exact_to {
            break;
        }
        fact *= rat(j - 1) * rat(j);
        let mut c = rat(2) / &fact;
        if r % 2 == 0 {
            c = -c;
        }
        coeffs.insert(j, c);
    }
    UPoly { coeffs, exact_to }
}

/// Power series inverse of a unit `1 + e(u)`, exact to the input's order.
fn unit_inverse(a: &UPoly) -> UPoly {
    debug_assert_eq!(a.coeffs.get(&0), Some(&Rational::one()));
    let n = a.exact_to;
    let mut inv: BTreeMap<i64, Rational> = BTreeMap::from([(0, Rational::one())]);
    let mut j = 2;
    while j <= n {
        // coefficient of u^j in a * inv must vanish
        let mut acc = Rational::zero();
        for (&ja, ca) in a.coeffs.range(2..=j) {
            if let Some(ci) = inv.get(&(j - ja)) {
                acc += ca * ci;
            }
        }
        if !acc.is_zero() {
            inv.insert(j, -acc);
        }
        j += 2;
    }
    UPoly {
        coeffs: inv,
        exact_to: n,
    }
}

/// Substitute `s = 2 - 2cos(u)` into an s-basis series, truncating at
/// `u^umax`. Negative s-powers expand through the reciprocal
/// `1/s = u^{-2} (1 + u^2/12 + ...)`.
pub fn u_expand(a: &SBasisSeries, umax: i64) -> Result<USeries, SeriesError> {
    assert!(umax % 2 == 0, "umax must be an even integer");
    let pole = a.min_s_degree().map_or(0, |k| (-k).max(0));
    if umax < -2 * pole {
        return Err(SeriesError::UWindowTooSmall {
            umax,
            jmin: -2 * pole,
        });
    }
    // Working precision: s^{-p} costs 2p orders, plus the u^{-2p} shift.
    let work = umax + 2 * pole + 2;
    let s_u = s_of_u(work);
    // g = s/u^2 is a unit; cache powers of s and of 1/s as needed.
    let mut g = UPoly {
        coeffs: BTreeMap::new(),
        exact_to: work - 2,
    };
    for (&j, c) in &s_u.coeffs {
        g.coeffs.insert(j - 2, c.clone());
    }
    let g_inv = unit_inverse(&g);

    let mut power_cache: BTreeMap<i64, UPoly> = BTreeMap::new();
    let s_power = |k: i64, cache: &mut BTreeMap<i64, UPoly>| -> UPoly {
        if let Some(p) = cache.get(&k) {
            return p.clone();
        }
        let p = if k == 0 {
            UPoly::one(work)
        } else if k > 0 {
            let prev = if let Some(p) = cache.get(&(k - 1)) {
                p.clone()
            } else {
                let mut acc = UPoly::one(work);
                for _ in 0..(k - 1) {
                    acc = acc.mul(&s_u);
                }
                acc
            };
            prev.mul(&s_u)
        } else {
            // s^k = u^{2k} * g^{k} for k < 0
            let mut acc = UPoly::one(work - 2);
            for _ in 0..(-k) {
                acc = acc.mul(&g_inv);
            }
            let mut coeffs = BTreeMap::new();
            for (&j, c) in &acc.coeffs {
                coeffs.insert(j + 2 * k, c.clone());
            }
            UPoly {
                coeffs,
                exact_to: acc.exact_to + 2 * k,
            }
        };
        cache.insert(k, p.clone());
        p
    };

    let mut out = USeries::zero(a.tmax(), umax);
    for d in 0..=a.tmax() {
        for (&k, c) in a.slice(d) {
            let p = s_power(k, &mut power_cache);
            debug_assert!(p.exact_to >= umax);
            for (&j, pc) in &p.coeffs {
                if j > umax {
                    continue;
                }
                let entry = out.slices[d as usize]
                    .entry(j)
                    .or_insert_with(Rational::zero);
                *entry += pc * c;
            }
        }
        out.slices[d as usize].retain(|_, c| !c.is_zero());
    }
    Ok(out)
}
