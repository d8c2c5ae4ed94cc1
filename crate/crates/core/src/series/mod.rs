//! Truncated bivariate series over the exact rationals.
//!
//! A `BiSeries` represents an element of `Q[q^(+-1)][[t]]` on a finite validity
//! box: coefficients are stored sparsely as `(n, d) -> Rational` for
//! q-exponent `n` and t-exponent `d`, and every t-degree `d <= tmax` carries
//! a trust window of q-exponents. Inside the box the stored data equals the
//! true series; outside the box the series makes *no claim*, and lookups
//! there are an error rather than zero. Identities between series are always
//! asserted on box intersections.
//!
//! Invariants:
//! - no stored zero coefficients
//! - every stored `(n, d)` satisfies `d <= tmax` and `n` inside `window(d)`
//! - a `Full` window at degree `d` asserts the whole true slice is stored

pub mod bound;
pub mod json;
pub mod ops;
pub mod products;
pub mod sbasis;
pub mod subst;
pub mod useries;

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{format_rational, Rational};
use bound::{Bound, Envelope, Ext};

pub type Slice = BTreeMap<i64, Rational>;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("coefficient lookup outside the validity box: q^{n} t^{d}")]
    OutsideBox { n: i64, d: i64 },
    #[error("empty box intersection at t^0")]
    EmptyBox,
    #[error(
        "t^0 part is not invertible: expected a single monomial c*q^n0 on a fully known slice"
    )]
    NonInvertibleLeadingTerm,
    #[error("substitution hits a negative t-degree at q^{n} t^{d}; restrict the input box so the claim stays in Q[[t]]")]
    NegativeTDegree { n: i64, d: i64 },
    #[error("t-degree {d} slice is not symmetric under q <-> 1/q")]
    AsymmetricSlice { d: i64 },
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("u-truncation {umax} cannot represent the pole order u^{jmin}")]
    UWindowTooSmall { umax: i64, jmin: i64 },
    #[error("series is q-dependent where a q-independent series is required")]
    QDependent,
    #[error("validity box too small: {0}")]
    BoxTooSmall(&'static str),
    #[error("invalid series data: {0}")]
    InvalidData(String),
}

/// Trust window of q-exponents at one t-degree. `Full` means the entire
/// slice is known exactly (the true slice equals the stored data).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Full,
    Range { lo: i64, hi: i64 },
}

impl Window {
    pub fn range(lo: i64, hi: i64) -> Window {
        assert!(lo <= hi, "empty window");
        Window::Range { lo, hi }
    }

    pub fn contains(self, n: i64) -> bool {
        match self {
            Window::Full => true,
            Window::Range { lo, hi } => lo <= n && n <= hi,
        }
    }

    pub fn lo(self) -> Ext {
        match self {
            Window::Full => Ext::NegInf,
            Window::Range { lo, .. } => Ext::Int(lo),
        }
    }

    pub fn hi(self) -> Ext {
        match self {
            Window::Full => Ext::PosInf,
            Window::Range { hi, .. } => Ext::Int(hi),
        }
    }

    pub fn intersect(self, other: Window) -> Option<Window> {
        match (self, other) {
            (Window::Full, w) | (w, Window::Full) => Some(w),
            (Window::Range { lo: a, hi: b }, Window::Range { lo: c, hi: d }) => {
                let lo = a.max(c);
                let hi = b.min(d);
                (lo <= hi).then_some(Window::Range { lo, hi })
            }
        }
    }
}

/// Per-degree true-support information consulted by multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceSupport {
    Empty,
    Range(Ext, Ext),
}

/// Requested truncation box: `tmax` plus a uniform q-window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxSpec {
    pub tmax: i64,
    pub qlo: i64,
    pub qhi: i64,
}

impl BoxSpec {
    pub fn new(tmax: i64, qlo: i64, qhi: i64) -> BoxSpec {
        assert!(tmax >= 0 && qlo <= qhi, "degenerate box");
        BoxSpec { tmax, qlo, qhi }
    }

    /// Default window `[-(tmax+2), tmax+2]`, wide enough to cover every
    /// slice of the standard forms with margin.
    pub fn with_default_window(tmax: i64) -> BoxSpec {
        BoxSpec::new(tmax, -(tmax + 2), tmax + 2)
    }
}

pub const DEFAULT_TMAX: i64 = 20;

#[derive(Clone, Debug)]
pub struct BiSeries {
    tmax: i64,
    slices: Vec<Slice>,
    windows: Vec<Window>,
    envelope: Envelope,
}

impl BiSeries {
    /// The zero series, fully known through `t^tmax`.
    pub fn zero(tmax: i64) -> BiSeries {
        assert!(tmax >= 0);
        BiSeries {
            tmax,
            slices: vec![Slice::new(); (tmax + 1) as usize],
            windows: vec![Window::Full; (tmax + 1) as usize],
            envelope: Envelope::constant(0, 0),
        }
    }

    /// The monomial `c * q^n * t^d`, fully known through `t^tmax`.
    pub fn monomial(c: Rational, n: i64, d: i64, tmax: i64) -> BiSeries {
        assert!((0..=tmax).contains(&d));
        let mut s = BiSeries::zero(tmax);
        s.envelope = Envelope::constant(n.min(0), n.max(0));
        if !c.is_zero() {
            s.slices[d as usize].insert(n, c);
        }
        s
    }

    pub fn one(tmax: i64) -> BiSeries {
        BiSeries::monomial(Rational::from_integer(1.into()), 0, 0, tmax)
    }

    /// Build an exact series from cells. All slices are asserted fully known.
    pub fn from_cells(
        tmax: i64,
        cells: impl IntoIterator<Item = (i64, i64, Rational)>,
    ) -> BiSeries {
        let mut s = BiSeries::zero(tmax);
        s.envelope = Envelope::UNKNOWN;
        for (n, d, c) in cells {
            assert!((0..=tmax).contains(&d), "cell beyond tmax");
            if !c.is_zero() {
                s.slices[d as usize].insert(n, c);
            }
        }
        s.envelope = s.fitted_envelope();
        s
    }

    /// A q-independent series from its t-coefficients (index = degree).
    pub fn from_t_coeffs(tmax: i64, coeffs: impl IntoIterator<Item = Rational>) -> BiSeries {
        let mut s = BiSeries::zero(tmax);
        for (d, c) in coeffs.into_iter().enumerate() {
            if d as i64 > tmax {
                break;
            }
            if !c.is_zero() {
                s.slices[d].insert(0, c);
            }
        }
        s.envelope = Envelope::Q_INDEPENDENT;
        s
    }

    pub(crate) fn new_windowed(
        tmax: i64,
        slices: Vec<Slice>,
        windows: Vec<Window>,
        envelope: Envelope,
    ) -> BiSeries {
        debug_assert_eq!(slices.len(), (tmax + 1) as usize);
        debug_assert_eq!(windows.len(), (tmax + 1) as usize);
        let s = BiSeries {
            tmax,
            slices,
            windows,
            envelope,
        };
        debug_assert!(s.stored_inside_windows());
        s
    }

    fn stored_inside_windows(&self) -> bool {
        self.slices
            .iter()
            .zip(&self.windows)
            .all(|(sl, w)| sl.keys().all(|&n| w.contains(n)))
    }

    pub fn tmax(&self) -> i64 {
        self.tmax
    }

    pub fn window(&self, d: i64) -> Window {
        self.windows[d as usize]
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn slice(&self, d: i64) -> &Slice {
        &self.slices[d as usize]
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    /// Override the support envelope. The caller asserts validity (used by
    /// constructors whose support is known analytically for every degree).
    pub fn with_envelope(mut self, envelope: Envelope) -> BiSeries {
        self.envelope = envelope;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.windows.iter().all(|w| matches!(w, Window::Full))
    }

    /// True support information at one degree: exact spans on fully known
    /// slices, the declared envelope elsewhere.
    pub fn support_at(&self, d: i64) -> SliceSupport {
        match self.windows[d as usize] {
            Window::Full => match self.span(d) {
                None => SliceSupport::Empty,
                Some((lo, hi)) => SliceSupport::Range(Ext::Int(lo), Ext::Int(hi)),
            },
            Window::Range { .. } => {
                SliceSupport::Range(self.envelope.lo.at(d), self.envelope.hi.at(d))
            }
        }
    }

    /// Span of stored (nonzero) exponents at degree `d`.
    pub fn span(&self, d: i64) -> Option<(i64, i64)> {
        let sl = &self.slices[d as usize];
        Some((*sl.keys().next()?, *sl.keys().next_back()?))
    }

    /// Hull of all stored exponents.
    pub fn global_span(&self) -> Option<(i64, i64)> {
        let mut hull: Option<(i64, i64)> = None;
        for d in 0..=self.tmax {
            if let Some((lo, hi)) = self.span(d) {
                hull = Some(match hull {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        hull
    }

    /// Conservative all-degree envelope fitted to the stored data.
    fn fitted_envelope(&self) -> Envelope {
        match self.global_span() {
            None => Envelope::constant(0, 0),
            Some((lo, hi)) => Envelope {
                lo: Bound::Affine {
                    c: lo.min(0),
                    m: -1,
                },
                hi: Bound::Affine { c: hi.max(0), m: 1 },
            },
        }
    }

    /// Coefficient of `q^n t^d`. Inside the box absent cells are zero;
    /// outside the box the lookup is an error, never a silent zero.
    pub fn coeff(&self, n: i64, d: i64) -> Result<Rational, SeriesError> {
        if d < 0 || d > self.tmax || !self.windows[d as usize].contains(n) {
            return Err(SeriesError::OutsideBox { n, d });
        }
        Ok(self.slices[d as usize]
            .get(&n)
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    pub fn in_box(&self, n: i64, d: i64) -> bool {
        (0..=self.tmax).contains(&d) && self.windows[d as usize].contains(n)
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.is_empty())
    }

    /// True when every stored exponent is zero.
    pub fn is_q_independent(&self) -> bool {
        self.slices.iter().all(|s| s.keys().all(|&n| n == 0))
    }

    /// The t-coefficient vector of a q-independent series.
    pub fn t_coeffs(&self) -> Result<Vec<Rational>, SeriesError> {
        if !self.is_q_independent() {
            return Err(SeriesError::QDependent);
        }
        Ok((0..=self.tmax)
            .map(|d| {
                self.slices[d as usize]
                    .get(&0)
                    .cloned()
                    .unwrap_or_else(Rational::zero)
            })
            .collect())
    }

    /// Restrict to the given finite box (windows become explicit ranges).
    pub fn restrict(&self, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
        let tmax = spec.tmax.min(self.tmax);
        let mut slices = Vec::with_capacity((tmax + 1) as usize);
        let mut windows = Vec::with_capacity((tmax + 1) as usize);
        for d in 0..=tmax {
            let w = self.windows[d as usize]
                .intersect(Window::range(spec.qlo, spec.qhi))
                .ok_or(SeriesError::EmptyBox)?;
            windows.push(w);
            slices.push(
                self.slices[d as usize]
                    .iter()
                    .filter(|(&n, _)| w.contains(n))
                    .map(|(&n, c)| (n, c.clone()))
                    .collect(),
            );
        }
        Ok(BiSeries::new_windowed(tmax, slices, windows, self.envelope))
    }

    /// Restrict each degree `d` to q-exponents `n >= lo_c + lo_m * d`
    /// (used to shear off cells that a substitution would push below t^0).
    pub fn restrict_lower(&self, lo_c: i64, lo_m: i64) -> Result<BiSeries, SeriesError> {
        let mut slices = Vec::with_capacity(self.slices.len());
        let mut windows = Vec::with_capacity(self.windows.len());
        for d in 0..=self.tmax {
            let cut = lo_c + lo_m * d;
            let w = match self.windows[d as usize] {
                Window::Full => {
                    // A Full window has no finite lower edge to raise; keep a
                    // wide explicit range above the cut.
                    let hi = self.span(d).map_or(cut, |(_, h)| h.max(cut));
                    Window::range(cut, hi)
                }
                Window::Range { lo, hi } => {
                    let lo = lo.max(cut);
                    if lo > hi {
                        return Err(SeriesError::EmptyBox);
                    }
                    Window::range(lo, hi)
                }
            };
            windows.push(w);
            slices.push(
                self.slices[d as usize]
                    .iter()
                    .filter(|(&n, _)| w.contains(n))
                    .map(|(&n, c)| (n, c.clone()))
                    .collect(),
            );
        }
        Ok(BiSeries::new_windowed(
            self.tmax,
            slices,
            windows,
            self.envelope,
        ))
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64, &Rational)> {
        self.slices
            .iter()
            .enumerate()
            .flat_map(|(d, sl)| sl.iter().map(move |(&n, c)| (n, d as i64, c)))
    }

    /// Human-readable coefficient grid (q across, t down), for diagnostics.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for d in 0..=self.tmax {
            let sl = &self.slices[d as usize];
            if sl.is_empty() {
                continue;
            }
            out.push_str(&format!("t^{d}: "));
            let terms: Vec<String> = sl
                .iter()
                .map(|(n, c)| format!("{} q^{}", format_rational(c), n))
                .collect();
            out.push_str(&terms.join(" + "));
            out.push('\n');
        }
        out
    }
}

/// Result of comparing two series on their box intersection. `compared_cells`
/// reports how much evidence the intersection actually contains.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub equal: bool,
    pub compared_cells: u64,
    pub tmax: i64,
    pub first_mismatch: Option<(i64, i64, Rational, Rational)>,
}

/// Coefficient-wise comparison on the intersection box. Unbounded windows are
/// clipped to the hull of both series' stored supports for counting; cells
/// beyond the hull are zero on both sides whenever they are readable at all.
pub fn compare(a: &BiSeries, b: &BiSeries) -> Result<Comparison, SeriesError> {
    let tmax = a.tmax.min(b.tmax);
    let hull = match (a.global_span(), b.global_span()) {
        (None, None) => None,
        (Some(h), None) | (None, Some(h)) => Some(h),
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
    };
    let mut compared = 0u64;
    let mut first = None;
    let mut effective_tmax = tmax;
    for d in 0..=tmax {
        let w = match a.window(d).intersect(b.window(d)) {
            Some(w) => w,
            None => {
                if d == 0 {
                    return Err(SeriesError::EmptyBox);
                }
                effective_tmax = d - 1;
                break;
            }
        };
        let (lo, hi) = match (w, hull) {
            (Window::Range { lo, hi }, Some((h0, h1))) => (lo.max(h0), hi.min(h1)),
            (Window::Range { lo, hi }, None) => (lo, hi),
            (Window::Full, Some((h0, h1))) => (h0, h1),
            (Window::Full, None) => continue,
        };
        for n in lo..=hi {
            let x = a.coeff(n, d)?;
            let y = b.coeff(n, d)?;
            compared += 1;
            if x != y && first.is_none() {
                first = Some((n, d, x, y));
            }
        }
    }
    Ok(Comparison {
        equal: first.is_none(),
        compared_cells: compared,
        tmax: effective_tmax,
        first_mismatch: first,
    })
}

/// Assert exact equality on the intersection box (test helper).
pub fn assert_series_eq(a: &BiSeries, b: &BiSeries, what: &str) {
    let cmp = compare(a, b).unwrap_or_else(|e| panic!("{what}: comparison failed: {e}"));
    if let Some((n, d, lhs, rhs)) = &cmp.first_mismatch {
        panic!(
            "{what}: mismatch at q^{n} t^{d}: {} vs {} ({} cells compared)",
            format_rational(lhs),
            format_rational(rhs),
            cmp.compared_cells
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn outside_box_is_an_error_not_zero() {
        let s = BiSeries::monomial(rat(3), 2, 1, 4);
        assert_eq!(s.coeff(2, 1).unwrap(), rat(3));
        assert_eq!(s.coeff(5, 0).unwrap(), rat(0));
        assert!(matches!(s.coeff(0, 5), Err(SeriesError::OutsideBox { .. })));
        let r = s.restrict(BoxSpec::new(4, -1, 1)).unwrap();
        assert!(matches!(
            r.coeff(2, 1),
            Err(SeriesError::OutsideBox { n: 2, d: 1 })
        ));
    }

    #[test]
    fn compare_reports_intersection_evidence() {
        let a = BiSeries::from_cells(3, [(0, 0, rat(1)), (1, 2, rat(5))]);
        let b = BiSeries::from_cells(5, [(0, 0, rat(1)), (1, 2, rat(5))]);
        let cmp = compare(&a, &b).unwrap();
        assert!(cmp.equal);
        assert_eq!(cmp.tmax, 3);
        assert!(cmp.compared_cells >= 8);

        let c = BiSeries::from_cells(3, [(0, 0, rat(1)), (1, 2, rat(4))]);
        let cmp = compare(&a, &c).unwrap();
        assert!(!cmp.equal);
        assert_eq!(cmp.first_mismatch.as_ref().unwrap().0, 1);
        assert_eq!(cmp.first_mismatch.as_ref().unwrap().1, 2);
    }

    #[test]
    fn restrict_shrinks_windows_and_data() {
        let s = BiSeries::from_cells(4, [(0, 0, rat(1)), (3, 1, rat(2)), (-3, 1, rat(2))]);
        let r = s.restrict(BoxSpec::new(2, -2, 2)).unwrap();
        assert_eq!(r.tmax(), 2);
        assert!(r.slice(1).is_empty());
        assert_eq!(r.window(1), Window::range(-2, 2));
    }
}
