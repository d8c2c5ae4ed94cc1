//! Ring operations on `BiSeries`: sum, Cauchy product, inversion, exp/log.
//!
//! Binary operations are pure and never mutate their inputs. Sums live on the
//! window intersection. Products propagate trust per output degree: a product
//! cell is kept only if every potentially nonzero contribution (as bounded by
//! the factors' support information) lies inside both factors' windows, so a
//! truncated factor erodes the result window instead of fabricating data.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{rat, Rational};

use super::bound::{Envelope, Ext};
use super::{BiSeries, SeriesError, Slice, SliceSupport, Window};

pub fn neg(a: &BiSeries) -> BiSeries {
    let slices = a
        .slices
        .iter()
        .map(|sl| sl.iter().map(|(&n, c)| (n, -c.clone())).collect())
        .collect();
    BiSeries::new_windowed(a.tmax, slices, a.windows.clone(), a.envelope)
}

pub fn scalar_mul(c: &Rational, a: &BiSeries) -> BiSeries {
    if c.is_zero() {
        return BiSeries::zero(a.tmax);
    }
    let slices = a
        .slices
        .iter()
        .map(|sl| sl.iter().map(|(&n, x)| (n, c * x)).collect())
        .collect();
    BiSeries::new_windowed(a.tmax, slices, a.windows.clone(), a.envelope)
}

/// Coefficient-wise sum on the box intersection; the result box is the
/// intersection. Errors when the intersection is empty at t^0.
pub fn add(a: &BiSeries, b: &BiSeries) -> Result<BiSeries, SeriesError> {
    let tmax_in = a.tmax.min(b.tmax);
    let mut slices: Vec<Slice> = Vec::new();
    let mut windows = Vec::new();
    for d in 0..=tmax_in {
        let w = match a.window(d).intersect(b.window(d)) {
            Some(w) => w,
            None if d == 0 => return Err(SeriesError::EmptyBox),
            None => break,
        };
        let mut sl = Slice::new();
        for (&n, c) in a.slice(d).iter().filter(|(&n, _)| w.contains(n)) {
            sl.insert(n, c.clone());
        }
        for (&n, c) in b.slice(d).iter().filter(|(&n, _)| w.contains(n)) {
            let entry = sl.entry(n).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                sl.remove(&n);
            }
        }
        windows.push(w);
        slices.push(sl);
    }
    let tmax = windows.len() as i64 - 1;
    Ok(BiSeries::new_windowed(
        tmax,
        slices,
        windows,
        a.envelope.hull(b.envelope),
    ))
}

pub fn sub(a: &BiSeries, b: &BiSeries) -> Result<BiSeries, SeriesError> {
    add(a, &neg(b))
}

/// Multiply by the monomial `c * q^dn * t^dd`. A negative `dd` is an error
/// if any stored coefficient would land below t^0.
pub fn monomial_mul(a: &BiSeries, c: &Rational, dn: i64, dd: i64) -> Result<BiSeries, SeriesError> {
    if c.is_zero() {
        return Ok(BiSeries::zero((a.tmax + dd).max(0)));
    }
    if dd < 0 {
        for d in 0..(-dd).min(a.tmax + 1) {
            if let Some((&n, _)) = a.slice(d).iter().next() {
                return Err(SeriesError::NegativeTDegree { n, d });
            }
        }
    }
    let tmax = a.tmax + dd;
    if tmax < 0 {
        return Err(SeriesError::EmptyBox);
    }
    let shift_w = |w: Window| match w {
        Window::Full => Window::Full,
        Window::Range { lo, hi } => Window::range(lo + dn, hi + dn),
    };
    let mut slices = vec![Slice::new(); (tmax + 1) as usize];
    let mut windows = vec![Window::Full; (tmax + 1) as usize];
    for d in 0..=a.tmax {
        let out_d = d + dd;
        if !(0..=tmax).contains(&out_d) {
            continue;
        }
        windows[out_d as usize] = shift_w(a.window(d));
        slices[out_d as usize] = a.slice(d).iter().map(|(&n, x)| (n + dn, c * x)).collect();
    }
    Ok(BiSeries::new_windowed(
        tmax,
        slices,
        windows,
        a.envelope().shift_q(dn),
    ))
}

/// Interval of q-exponents accumulated from trust constraints.
#[derive(Clone, Copy)]
struct NInterval {
    lo: Ext,
    hi: Ext,
}

impl NInterval {
    const ALL: NInterval = NInterval {
        lo: Ext::NegInf,
        hi: Ext::PosInf,
    };

    fn require_ge(&mut self, b: Ext) {
        if b > self.lo {
            self.lo = b;
        }
    }

    fn require_le(&mut self, b: Ext) {
        if b < self.hi {
            self.hi = b;
        }
    }
}

/// Cauchy product in t with per-degree q-convolution.
///
/// For each output degree the trusted window is the largest interval on
/// which, for every split `d1 + d2 = d`, all pairs of potentially nonzero
/// factor cells are inside both input windows. Products of fully known
/// factors stay fully known.
pub fn mul(a: &BiSeries, b: &BiSeries) -> Result<BiSeries, SeriesError> {
    let tmax_in = a.tmax.min(b.tmax);
    let exact = a.is_exact() && b.is_exact();
    let mut slices: Vec<Slice> = Vec::new();
    let mut windows: Vec<Window> = Vec::new();

    for d in 0..=tmax_in {
        let window = if exact {
            Window::Full
        } else {
            match trusted_product_window(a, b, d) {
                Some(w) => w,
                None if d == 0 => return Err(SeriesError::EmptyBox),
                None => break,
            }
        };
        let mut acc = Slice::new();
        for d1 in 0..=d {
            let d2 = d - d1;
            let (sa, sb) = (a.slice(d1), b.slice(d2));
            if sa.is_empty() || sb.is_empty() {
                continue;
            }
            for (&n1, c1) in sa {
                for (&n2, c2) in sb {
                    let n = n1 + n2;
                    if !window.contains(n) {
                        continue;
                    }
                    let entry = acc.entry(n).or_insert_with(Rational::zero);
                    *entry += c1 * c2;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        slices.push(acc);
        windows.push(window);
    }
    let tmax = windows.len() as i64 - 1;
    Ok(BiSeries::new_windowed(
        tmax,
        slices,
        windows,
        a.envelope().minkowski(b.envelope()),
    ))
}

/// The trusted window of `a * b` at output degree `d`, or `None` if empty.
///
/// Three zones are trustworthy: cells where every potentially nonzero pair
/// of factor cells is readable (the `cond` interval), and cells beyond the
/// Minkowski hull of the factors' supports, which are provably zero no
/// matter what the windows hide. The finite representative combines both,
/// clipped by the finite edges in play.
fn trusted_product_window(a: &BiSeries, b: &BiSeries, d: i64) -> Option<Window> {
    let mut cond = NInterval::ALL;
    let mut cap: Option<(i64, i64)> = None;
    let mut supp_lo = Ext::PosInf; // min over splits of the raw support sums
    let mut supp_hi = Ext::NegInf;
    let mut window_floor: Option<i64> = None; // finite window edges seen
    let mut window_ceil: Option<i64> = None;
    let mut any_split = false;
    for d1 in 0..=d {
        let d2 = d - d1;
        let (sa, sb) = match (a.support_at(d1), b.support_at(d2)) {
            (SliceSupport::Empty, _) | (_, SliceSupport::Empty) => continue,
            (SliceSupport::Range(l1, h1), SliceSupport::Range(l2, h2)) => ((l1, h1), (l2, h2)),
        };
        any_split = true;
        let wa = a.window(d1);
        let wb = b.window(d2);
        supp_lo = supp_lo.min(sa.0.add(sb.0));
        supp_hi = supp_hi.max(sa.1.add(sb.1));
        for w in [wa, wb] {
            if let Window::Range { lo, hi } = w {
                window_floor = Some(window_floor.map_or(lo, |v: i64| v.min(lo)));
                window_ceil = Some(window_ceil.map_or(hi, |v: i64| v.max(hi)));
            }
        }

        // All potentially nonzero pairs n1 + n2 = n with n1 in supp(a, d1),
        // n2 in supp(b, d2) must satisfy n1 in wa and n2 in wb.
        if sa.0 < wa.lo() {
            cond.require_ge(wa.lo().add(sb.1));
        }
        if sa.1 > wa.hi() {
            cond.require_le(wa.hi().add(sb.0));
        }
        if sb.0 < wb.lo() {
            cond.require_ge(wb.lo().add(sa.1));
        }
        if sb.1 > wb.hi() {
            cond.require_le(wb.hi().add(sa.0));
        }

        // Readable-and-potentially-nonzero regions bound where stored data
        // can place nonzero values.
        let ra = (sa.0.max(wa.lo()), sa.1.min(wa.hi()));
        let rb = (sb.0.max(wb.lo()), sb.1.min(wb.hi()));
        if ra.0 > ra.1 || rb.0 > rb.1 {
            continue;
        }
        let lo = ra.0.add(rb.0).finite().expect("finite readable region");
        let hi = ra.1.add(rb.1).finite().expect("finite readable region");
        cap = Some(match cap {
            None => (lo, hi),
            Some((clo, chi)) => (clo.min(lo), chi.max(hi)),
        });
    }

    if !any_split {
        // Every split has an empty factor slice: the product slice is zero.
        return Some(Window::Full);
    }
    let Some((cap_lo, cap_hi)) = cap else {
        // Potentially nonzero pairs exist but none are readable.
        return if cond.lo == Ext::NegInf && cond.hi == Ext::PosInf {
            Some(Window::Full) // still provably zero: supports never reach storage
        } else {
            None
        };
    };

    // Finite floor for a lower edge that extends into the provably zero
    // tail, and symmetrically for the ceiling.
    let floor = |v: i64| {
        let mut f = v.min(cap_lo);
        if let Some(w) = window_floor {
            f = f.min(w);
        }
        f
    };
    let ceil = |v: i64| {
        let mut c = v.max(cap_hi);
        if let Some(w) = window_ceil {
            c = c.max(w);
        }
        c
    };
    if cond.lo == Ext::PosInf || cond.hi == Ext::NegInf || cond.lo > cond.hi {
        // No cell is readable; only the provably zero tails remain.
        if let Ext::Int(m) = supp_lo {
            return Some(Window::range(floor(m).min(m - 1), m - 1));
        }
        if let Ext::Int(m) = supp_hi {
            return Some(Window::range(m + 1, ceil(m).max(m + 1)));
        }
        return None;
    }
    let lo = match (cond.lo, supp_lo) {
        // No readability constraint from below: extend to a finite floor.
        (Ext::NegInf, Ext::Int(m)) => floor(m),
        (Ext::NegInf, _) => floor(cap_lo),
        // The zero tail below the support hull joins the cond interval
        // whenever there is no gap between them.
        (Ext::Int(v), Ext::Int(m)) if m >= v => floor(v),
        (Ext::Int(v), _) => v,
        (Ext::PosInf, _) => unreachable!(),
    };
    let hi = match (cond.hi, supp_hi) {
        (Ext::PosInf, Ext::Int(m)) => ceil(m),
        (Ext::PosInf, _) => ceil(cap_hi),
        (Ext::Int(v), Ext::Int(m)) if m <= v => ceil(v),
        (Ext::Int(v), _) => v,
        (Ext::NegInf, _) => unreachable!(),
    };
    (lo <= hi).then(|| Window::range(lo, hi))
}

pub fn pow(a: &BiSeries, k: u32) -> Result<BiSeries, SeriesError> {
    let mut acc = BiSeries::one(a.tmax);
    for _ in 0..k {
        acc = mul(&acc, a)?;
    }
    Ok(acc)
}

/// The t^0 part of an invertible series: a verified single monomial c*q^n0.
fn leading_monomial(a: &BiSeries) -> Result<(i64, Rational), SeriesError> {
    // The t^0 slice must be completely known: either the window is Full, or
    // the support envelope keeps every potentially nonzero cell inside it.
    let verified = match a.window(0) {
        Window::Full => true,
        w @ Window::Range { .. } => match a.support_at(0) {
            SliceSupport::Empty => true,
            SliceSupport::Range(lo, hi) => lo >= w.lo() && hi <= w.hi(),
        },
    };
    let sl = a.slice(0);
    if !verified || sl.len() != 1 {
        return Err(SeriesError::NonInvertibleLeadingTerm);
    }
    let (&n0, c) = sl.iter().next().unwrap();
    Ok((n0, c.clone()))
}

/// Multiplicative inverse under the monomial normal form: the t^0 part must
/// be a single monomial `c * q^{n0}`. Then `1/a = c^{-1} q^{-n0} sum (-r)^k`
/// with `r` the t-positive remainder, and `mul(a, invert(a)) = 1` on the
/// result box.
pub fn invert(a: &BiSeries) -> Result<BiSeries, SeriesError> {
    let (n0, c) = leading_monomial(a)?;
    let unit_inv = c.recip();
    let mut r = monomial_mul(a, &unit_inv, -n0, 0)?;
    r.slices[0].clear();
    r.windows[0] = Window::Full; // verified: the true t^0 part of r is zero
                                 // Geometric series: r^k contributes only from t^k on.
    let mut acc = BiSeries::one(a.tmax);
    let mut term = BiSeries::one(a.tmax);
    for k in 1..=a.tmax {
        term = mul(&term, &r)?;
        acc = if k % 2 == 1 {
            sub(&acc, &term)?
        } else {
            add(&acc, &term)?
        };
    }
    monomial_mul(&acc, &unit_inv, -n0, 0)
}

/// Verify a stored-empty slice really is the whole truth at that degree.
fn verified_empty_at(a: &BiSeries, d: i64) -> bool {
    a.slice(d).is_empty()
        && match a.window(d) {
            Window::Full => true,
            w @ Window::Range { .. } => match a.support_at(d) {
                SliceSupport::Empty => true,
                // Nothing can hide outside the window if the support
                // envelope fits inside it -- then emptiness is verified.
                SliceSupport::Range(lo, hi) => lo >= w.lo() && hi <= w.hi(),
            },
        }
}

/// Formal exponential, computed t-order by t-order. Requires a verified
/// absence of a t^0 term.
pub fn exp_series(a: &BiSeries) -> Result<BiSeries, SeriesError> {
    if !verified_empty_at(a, 0) {
        return Err(SeriesError::Precondition("exp requires no t^0 term"));
    }
    let mut arg = a.clone();
    arg.windows[0] = Window::Full;
    let mut acc = BiSeries::one(a.tmax);
    let mut term = BiSeries::one(a.tmax);
    let mut kfact = Rational::one();
    for k in 1..=a.tmax {
        term = mul(&term, &arg)?;
        kfact *= rat(k);
        acc = add(&acc, &scalar_mul(&kfact.recip(), &term))?;
    }
    Ok(acc)
}

/// Formal logarithm. Requires a verified t^0 part equal to 1.
pub fn log_series(a: &BiSeries) -> Result<BiSeries, SeriesError> {
    let ok = match leading_monomial(a) {
        Ok((0, c)) => c.is_one(),
        _ => false,
    };
    if !ok {
        return Err(SeriesError::Precondition(
            "log requires t^0 part equal to 1",
        ));
    }
    let mut r = a.clone();
    r.slices[0].clear();
    r.windows[0] = Window::Full;
    let mut acc = BiSeries::zero(a.tmax);
    let mut term = BiSeries::one(a.tmax);
    for k in 1..=a.tmax {
        term = mul(&term, &r)?;
        let coeff = Rational::new((if k.is_odd() { 1 } else { -1 }).into(), k.into());
        acc = add(&acc, &scalar_mul(&coeff, &term))?;
    }
    Ok(acc)
}

impl BiSeries {
    /// Compose exact slice data with an envelope claim, for constructors.
    pub(crate) fn exact_from_slices(tmax: i64, slices: Vec<Slice>, envelope: Envelope) -> BiSeries {
        let windows = vec![Window::Full; (tmax + 1) as usize];
        BiSeries::new_windowed(tmax, slices, windows, envelope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{assert_series_eq, compare, BoxSpec};

    fn geom(tmax: i64) -> BiSeries {
        // sum_d t^d
        BiSeries::from_t_coeffs(tmax, (0..=tmax).map(|_| rat(1)))
    }

    #[test]
    fn additive_identity_and_s_definition() {
        let p = BiSeries::from_cells(6, [(1, 0, rat(1)), (-1, 0, rat(1))]);
        let z = BiSeries::zero(6);
        assert_series_eq(&add(&p, &z).unwrap(), &p, "p + 0");
        let two = BiSeries::monomial(rat(2), 0, 0, 6);
        let s = add(&p, &two).unwrap();
        let expected = BiSeries::from_cells(6, [(1, 0, rat(1)), (0, 0, rat(2)), (-1, 0, rat(1))]);
        assert_series_eq(&s, &expected, "q + 2 + 1/q");
    }

    #[test]
    fn multiplicative_identity_and_geometric_series() {
        let f = BiSeries::from_cells(8, [(2, 1, rat(5)), (-1, 3, rat(-7))]);
        assert_series_eq(&mul(&f, &BiSeries::one(8)).unwrap(), &f, "f * 1");

        // (1 - t) * sum t^d = 1 through t^tmax
        let one_minus_t = BiSeries::from_t_coeffs(10, [rat(1), rat(-1)]);
        let prod = mul(&one_minus_t, &geom(10)).unwrap();
        assert_series_eq(&prod, &BiSeries::one(10), "(1-t) * geometric");
    }

    #[test]
    fn invert_one_minus_t() {
        let one_minus_t = BiSeries::from_t_coeffs(10, [rat(1), rat(-1)]);
        let inv = invert(&one_minus_t).unwrap();
        assert_series_eq(&inv, &geom(10), "1/(1-t)");
        assert_series_eq(
            &mul(&one_minus_t, &inv).unwrap(),
            &BiSeries::one(10),
            "f * 1/f",
        );
    }

    #[test]
    fn invert_requires_monomial_leading_term() {
        let bad = BiSeries::from_cells(4, [(0, 0, rat(1)), (1, 0, rat(1))]);
        assert!(matches!(
            invert(&bad),
            Err(SeriesError::NonInvertibleLeadingTerm)
        ));
        let zero = BiSeries::zero(4);
        assert!(matches!(
            invert(&zero),
            Err(SeriesError::NonInvertibleLeadingTerm)
        ));
    }

    #[test]
    fn exp_log_round_trip() {
        let a = BiSeries::from_cells(8, [(1, 1, rat(3)), (0, 2, ratio_half()), (-2, 3, rat(-1))]);
        let e = exp_series(&a).unwrap();
        assert_series_eq(&log_series(&e).unwrap(), &a, "log(exp(a))");
        assert_series_eq(
            &exp_series(&BiSeries::zero(5)).unwrap(),
            &BiSeries::one(5),
            "exp(0)",
        );
    }

    fn ratio_half() -> Rational {
        crate::rational::ratio(1, 2)
    }

    #[test]
    fn exp_rejects_constant_term() {
        let a = BiSeries::one(4);
        assert!(matches!(exp_series(&a), Err(SeriesError::Precondition(_))));
    }

    #[test]
    fn truncated_factor_erodes_the_window() {
        // A window-truncated series whose support is unknown, times an exact
        // Laurent-polynomial factor: the trusted window must shrink by the
        // factor's span rather than pretend full knowledge.
        let trunc = BiSeries::from_cells(4, [(0, 0, rat(1))])
            .restrict(BoxSpec::new(4, -3, 3))
            .unwrap()
            .with_envelope(Envelope::UNKNOWN);
        let exactf = BiSeries::from_cells(4, [(1, 0, rat(1)), (-1, 0, rat(1))]);
        let prod = mul(&trunc, &exactf).unwrap();
        assert_eq!(prod.window(0), Window::range(-2, 2));
        // Cells at |n| = 3 would need q^{+-4} data from the truncated side.
        assert!(!prod.in_box(3, 0));
    }

    #[test]
    fn negative_t_shift_errors_on_stored_low_degrees() {
        let f = BiSeries::from_cells(4, [(2, 0, rat(1))]);
        assert!(matches!(
            monomial_mul(&f, &rat(1), 0, -1),
            Err(SeriesError::NegativeTDegree { .. })
        ));
        let g = BiSeries::from_cells(4, [(2, 1, rat(1))]);
        let shifted = monomial_mul(&g, &rat(1), 0, -1).unwrap();
        assert_eq!(shifted.coeff(2, 0).unwrap(), rat(1));
        assert_eq!(shifted.tmax(), 3);
    }

    #[test]
    fn product_of_truncated_windows_stays_sound() {
        // Two truncated, unknown-support series: the only trustworthy cells
        // are those whose every contribution is readable; with unknown
        // supports on both sides nothing qualifies, so the product must
        // fail rather than fabricate a window.
        let a = BiSeries::from_cells(2, [(0, 0, rat(1))])
            .restrict(BoxSpec::new(2, -2, 2))
            .unwrap()
            .with_envelope(Envelope::UNKNOWN);
        let b = a.clone();
        assert!(matches!(mul(&a, &b), Err(SeriesError::EmptyBox)));
        let cmp = compare(&a, &b).unwrap();
        assert!(cmp.equal);
    }
}
