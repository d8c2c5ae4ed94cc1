//! Series in the s-basis, s = q + 2 + 1/q = (q^{1/2} + q^{-1/2})^2.
//!
//! Every q <-> 1/q symmetric slice is a Laurent polynomial in s, and the
//! denominators that occur here (powers of phi_{-2,1}) are monomials in s at
//! t^0. Working s-side keeps slices finite even for series whose ascending
//! q-expansion has infinite support, so inversion and pole bookkeeping stay
//! exact. Expansion back to q is either exact (no poles) or an ascending
//! Laurent expansion on an explicit window: `1/s = q - 2q^2 + 3q^3 - ...`.

use num_traits::{One, Zero};

use crate::rational::Rational;

use super::bound::Envelope;
use super::products::gen_binomial;
use super::{BiSeries, BoxSpec, SeriesError, Slice, Window};

/// Truncated element of `Q[s^(+-1)][[t]]` with exact (finite) slices.
#[derive(Clone, Debug, PartialEq)]
pub struct SBasisSeries {
    tmax: i64,
    slices: Vec<Slice>, // exponent of s -> coefficient, no zeros
}

impl SBasisSeries {
    pub fn zero(tmax: i64) -> SBasisSeries {
        assert!(tmax >= 0);
        SBasisSeries {
            tmax,
            slices: vec![Slice::new(); (tmax + 1) as usize],
        }
    }

    pub fn one(tmax: i64) -> SBasisSeries {
        SBasisSeries::monomial(Rational::one(), 0, 0, tmax)
    }

    /// `c * s^k * t^d`
    pub fn monomial(c: Rational, k: i64, d: i64, tmax: i64) -> SBasisSeries {
        assert!((0..=tmax).contains(&d));
        let mut s = SBasisSeries::zero(tmax);
        if !c.is_zero() {
            s.slices[d as usize].insert(k, c);
        }
        s
    }

    /// A q-independent series placed on s^0.
    pub fn from_t_coeffs(tmax: i64, coeffs: impl IntoIterator<Item = Rational>) -> SBasisSeries {
        let mut s = SBasisSeries::zero(tmax);
        for (d, c) in coeffs.into_iter().enumerate() {
            if d as i64 > tmax {
                break;
            }
            if !c.is_zero() {
                s.slices[d].insert(0, c);
            }
        }
        s
    }

    pub fn tmax(&self) -> i64 {
        self.tmax
    }

    pub fn slice(&self, d: i64) -> &Slice {
        &self.slices[d as usize]
    }

    pub fn coeff(&self, k: i64, d: i64) -> Result<Rational, SeriesError> {
        if !(0..=self.tmax).contains(&d) {
            return Err(SeriesError::OutsideBox { n: k, d });
        }
        Ok(self.slices[d as usize]
            .get(&k)
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.is_empty())
    }

    /// Most negative s-exponent over all slices (the pole order), if any.
    pub fn min_s_degree(&self) -> Option<i64> {
        self.slices
            .iter()
            .filter_map(|s| s.keys().next())
            .min()
            .copied()
    }

    pub fn max_s_degree(&self) -> Option<i64> {
        self.slices
            .iter()
            .filter_map(|s| s.keys().next_back())
            .max()
            .copied()
    }

    pub fn truncate(&self, tmax: i64) -> SBasisSeries {
        let tmax = tmax.min(self.tmax);
        SBasisSeries {
            tmax,
            slices: self.slices[..=(tmax as usize)].to_vec(),
        }
    }

    pub fn neg(&self) -> SBasisSeries {
        let slices = self
            .slices
            .iter()
            .map(|sl| sl.iter().map(|(&k, c)| (k, -c.clone())).collect())
            .collect();
        SBasisSeries {
            tmax: self.tmax,
            slices,
        }
    }

    pub fn scalar_mul(&self, c: &Rational) -> SBasisSeries {
        if c.is_zero() {
            return SBasisSeries::zero(self.tmax);
        }
        let slices = self
            .slices
            .iter()
            .map(|sl| sl.iter().map(|(&k, x)| (k, c * x)).collect())
            .collect();
        SBasisSeries {
            tmax: self.tmax,
            slices,
        }
    }

    pub fn add(&self, other: &SBasisSeries) -> SBasisSeries {
        let tmax = self.tmax.min(other.tmax);
        let mut slices = self.slices[..=(tmax as usize)].to_vec();
        for d in 0..=(tmax as usize) {
            for (&k, c) in &other.slices[d] {
                let entry = slices[d].entry(k).or_insert_with(Rational::zero);
                *entry += c;
                if entry.is_zero() {
                    slices[d].remove(&k);
                }
            }
        }
        SBasisSeries { tmax, slices }
    }

    pub fn sub(&self, other: &SBasisSeries) -> SBasisSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SBasisSeries) -> SBasisSeries {
        let tmax = self.tmax.min(other.tmax);
        let mut slices = vec![Slice::new(); (tmax + 1) as usize];
        for d1 in 0..=tmax {
            if self.slices[d1 as usize].is_empty() {
                continue;
            }
            for d2 in 0..=(tmax - d1) {
                if other.slices[d2 as usize].is_empty() {
                    continue;
                }
                let target = &mut slices[(d1 + d2) as usize];
                for (&k1, c1) in &self.slices[d1 as usize] {
                    for (&k2, c2) in &other.slices[d2 as usize] {
                        let entry = target.entry(k1 + k2).or_insert_with(Rational::zero);
                        *entry += c1 * c2;
                    }
                }
            }
        }
        for sl in &mut slices {
            sl.retain(|_, c| !c.is_zero());
        }
        SBasisSeries { tmax, slices }
    }

    /// Integer powers; negative exponents go through `invert`.
    pub fn pow(&self, k: i64) -> Result<SBasisSeries, SeriesError> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut acc = SBasisSeries::one(self.tmax);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Inverse under the monomial normal form: the t^0 slice must be a
    /// single monomial `c * s^{k0}`; then `1/a = c^{-1} s^{-k0} sum (-r)^k`.
    pub fn invert(&self) -> Result<SBasisSeries, SeriesError> {
        let t0 = &self.slices[0];
        if t0.len() != 1 {
            return Err(SeriesError::NonInvertibleLeadingTerm);
        }
        let (&k0, c) = t0.iter().next().unwrap();
        let unit_inv = c.recip();
        // r = a / (c s^{k0}) - 1, supported in t^{>=1}
        let mut r = self.shift_s(-k0).scalar_mul(&unit_inv);
        r.slices[0].clear();
        let mut acc = SBasisSeries::one(self.tmax);
        let mut term = SBasisSeries::one(self.tmax);
        for k in 1..=self.tmax {
            term = term.mul(&r);
            acc = if k % 2 == 1 {
                acc.sub(&term)
            } else {
                acc.add(&term)
            };
        }
        Ok(acc.shift_s(-k0).scalar_mul(&unit_inv))
    }

    fn shift_s(&self, dk: i64) -> SBasisSeries {
        let slices = self
            .slices
            .iter()
            .map(|sl| sl.iter().map(|(&k, c)| (k + dk, c.clone())).collect())
            .collect();
        SBasisSeries {
            tmax: self.tmax,
            slices,
        }
    }

    /// Exact expansion to the q-basis. Errors when a negative s-power is
    /// present; use `expand_on` with an explicit window for those.
    pub fn expand_exact(&self) -> Result<BiSeries, SeriesError> {
        if self.min_s_degree().is_some_and(|k| k < 0) {
            return Err(SeriesError::Precondition(
                "series has s-poles; expansion needs an explicit q-window",
            ));
        }
        let mut slices = vec![Slice::new(); (self.tmax + 1) as usize];
        for d in 0..=self.tmax {
            for (&k, c) in &self.slices[d as usize] {
                // s^k = sum_{j=-k}^{k} C(2k, k+j) q^j
                for j in -k..=k {
                    let b = gen_binomial(2 * k, k + j) * c;
                    let entry = slices[d as usize].entry(j).or_insert_with(Rational::zero);
                    *entry += b;
                }
            }
            slices[d as usize].retain(|_, c| !c.is_zero());
        }
        Ok(BiSeries::exact_from_slices(
            self.tmax,
            slices,
            Envelope::UNKNOWN,
        ))
    }

    /// Ascending q-expansion on the requested box: negative powers expand as
    /// `s^{-k} = q^k (1+q)^{-2k} = q^k - 2k q^{k+1} + ...`, matching the
    /// Laurent expansions of the stable-pair series. Degrees without poles
    /// remain fully known.
    pub fn expand_on(&self, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
        let tmax = self.tmax.min(spec.tmax);
        let mut slices = vec![Slice::new(); (tmax + 1) as usize];
        let mut windows = vec![Window::Full; (tmax + 1) as usize];
        for d in 0..=tmax {
            let mut has_pole = false;
            for (&k, c) in &self.slices[d as usize] {
                if k >= 0 {
                    for j in -k..=k {
                        if spec.qlo <= j && j <= spec.qhi {
                            let b = gen_binomial(2 * k, k + j) * c;
                            let entry = slices[d as usize].entry(j).or_insert_with(Rational::zero);
                            *entry += b;
                        }
                    }
                } else {
                    has_pole = true;
                    let p = -k;
                    // s^{-p} = sum_{i >= 0} C(-2p, i) q^{p+i}
                    for j in p..=spec.qhi {
                        let b = gen_binomial(-2 * p, j - p) * c;
                        let entry = slices[d as usize].entry(j).or_insert_with(Rational::zero);
                        *entry += b;
                    }
                }
            }
            slices[d as usize].retain(|_, c| !c.is_zero());
            if has_pole {
                windows[d as usize] = Window::range(spec.qlo, spec.qhi);
            } else {
                // exact slice, but clip anything outside the requested box
                slices[d as usize].retain(|&j, _| spec.qlo <= j && j <= spec.qhi);
                let keep_full = self.slices[d as usize]
                    .keys()
                    .all(|&k| -k >= spec.qlo && k <= spec.qhi);
                if !keep_full {
                    windows[d as usize] = Window::range(spec.qlo, spec.qhi);
                }
            }
        }
        Ok(BiSeries::new_windowed(
            tmax,
            slices,
            windows,
            Envelope::UNKNOWN,
        ))
    }
}

/// Convert a fully known, q <-> 1/q symmetric `BiSeries` to the s-basis by
/// peeling the top symmetric coefficient against `s^k`.
pub fn to_sbasis(a: &BiSeries) -> Result<SBasisSeries, SeriesError> {
    if !a.is_exact() {
        return Err(SeriesError::Precondition(
            "s-basis conversion requires fully known slices",
        ));
    }
    let mut out = SBasisSeries::zero(a.tmax());
    for d in 0..=a.tmax() {
        let sl = a.slice(d);
        for (&n, c) in sl {
            if sl.get(&-n) != Some(c) {
                return Err(SeriesError::AsymmetricSlice { d });
            }
        }
        let mut work = sl.clone();
        let mut peeled = Slice::new();
        while let Some((&top, _)) = work.last_key_value() {
            if top < 0 {
                return Err(SeriesError::AsymmetricSlice { d });
            }
            let b = work.get(&top).cloned().unwrap();
            // subtract b * s^top
            for j in -top..=top {
                let x = gen_binomial(2 * top, top + j) * &b;
                let entry = work.entry(j).or_insert_with(Rational::zero);
                *entry -= x;
                if entry.is_zero() {
                    work.remove(&j);
                }
            }
            peeled.insert(top, b);
        }
        out.slices[d as usize] = peeled;
    }
    Ok(out)
}
