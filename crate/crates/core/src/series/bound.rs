//! Extended-integer arithmetic and affine support envelopes.
//!
//! A truncated series only stores coefficients inside its trust windows, but
//! multiplication must know where the *true* slices can be nonzero: a product
//! cell is trustworthy only when every potentially nonzero contribution is
//! readable from both factors. Support envelopes carry that knowledge as
//! per-degree bounds `lo(d) <= n <= hi(d)` on the true q-support, valid for
//! every t-degree `d >= 0`. Bounds are affine in `d` (or infinite), which is
//! closed under the hull/Minkowski operations the arithmetic needs.

use std::cmp::Ordering;

/// Integer extended with both infinities. Saturating arithmetic only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ext {
    NegInf,
    Int(i64),
    PosInf,
}

impl Ext {
    pub fn finite(self) -> Option<i64> {
        match self {
            Ext::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn add(self, other: Ext) -> Ext {
        match (self, other) {
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => {
                panic!("indeterminate sum of infinities")
            }
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
            (Ext::Int(a), Ext::Int(b)) => Ext::Int(a.saturating_add(b)),
        }
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
            (Int(a), Int(b)) => a.cmp(b),
        }
    }
}

/// One side of a support envelope: `c + m*d` over all degrees, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Affine { c: i64, m: i64 },
    PosInf,
}

impl Bound {
    pub const fn constant(c: i64) -> Bound {
        Bound::Affine { c, m: 0 }
    }

    pub fn at(self, d: i64) -> Ext {
        match self {
            Bound::NegInf => Ext::NegInf,
            Bound::PosInf => Ext::PosInf,
            Bound::Affine { c, m } => Ext::Int(c.saturating_add(m.saturating_mul(d))),
        }
    }

    fn shift(self, k: i64) -> Bound {
        match self {
            Bound::Affine { c, m } => Bound::Affine {
                c: c.saturating_add(k),
                m,
            },
            b => b,
        }
    }
}

/// Envelope `[lo(d), hi(d)]` containing the true q-support of every t-slice.
/// `UNKNOWN` claims nothing. Bounds constrain only nonzero cells, so any
/// envelope is vacuously valid for an identically zero slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub lo: Bound,
    pub hi: Bound,
}

impl Envelope {
    pub const UNKNOWN: Envelope = Envelope {
        lo: Bound::NegInf,
        hi: Bound::PosInf,
    };

    pub const fn constant(lo: i64, hi: i64) -> Envelope {
        Envelope {
            lo: Bound::Affine { c: lo, m: 0 },
            hi: Bound::Affine { c: hi, m: 0 },
        }
    }

    /// Envelope of a q-independent series.
    pub const Q_INDEPENDENT: Envelope = Envelope::constant(0, 0);

    /// Conservative union: valid for a sum when both inputs are valid.
    pub fn hull(self, other: Envelope) -> Envelope {
        Envelope {
            lo: lo_min(self.lo, other.lo),
            hi: hi_max(self.hi, other.hi),
        }
    }

    /// Valid for a product when both inputs are valid: the support of a
    /// Cauchy product at degree `d` lies in the union over splits
    /// `d1 + d2 = d` of the pointwise sums, and for affine sides that union
    /// is again affine with the extremal slope.
    pub fn minkowski(self, other: Envelope) -> Envelope {
        let lo = match (self.lo, other.lo) {
            (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
            (Bound::Affine { c: c1, m: m1 }, Bound::Affine { c: c2, m: m2 }) => Bound::Affine {
                c: c1.saturating_add(c2),
                m: m1.min(m2),
            },
            // A +inf lower bound cannot arise from a valid envelope.
            (Bound::PosInf, _) | (_, Bound::PosInf) => unreachable!("PosInf lower bound"),
        };
        let hi = match (self.hi, other.hi) {
            (Bound::PosInf, _) | (_, Bound::PosInf) => Bound::PosInf,
            (Bound::Affine { c: c1, m: m1 }, Bound::Affine { c: c2, m: m2 }) => Bound::Affine {
                c: c1.saturating_add(c2),
                m: m1.max(m2),
            },
            (Bound::NegInf, _) | (_, Bound::NegInf) => unreachable!("NegInf upper bound"),
        };
        Envelope { lo, hi }
    }

    /// Multiplication by `c * q^dn * t^dd` shifts the q-support by `dn`.
    pub fn shift_q(self, dn: i64) -> Envelope {
        Envelope {
            lo: self.lo.shift(dn),
            hi: self.hi.shift(dn),
        }
    }

    /// Envelope of the image under `(n, d) -> (-n, d + n)`.
    ///
    /// Output exponents satisfy `n' >= -d'` unconditionally (the preimage
    /// t-degree is `d' + n' >= 0`). A degree-independent input bound
    /// `n <= c` gives `n' >= -c`, and `n >= c` gives `n' <= -c`; sloped
    /// input bounds are dropped rather than translated.
    pub fn sheared_q_inv(self) -> Envelope {
        let universal = Bound::Affine { c: 0, m: -1 };
        let from_hi = match self.hi {
            Bound::Affine { c, m: 0 } => Bound::Affine { c: -c, m: 0 },
            _ => Bound::NegInf,
        };
        // Both candidates are valid lower bounds; keep the one that is
        // tighter for large d (larger slope, then larger offset).
        let lo = match from_hi {
            Bound::Affine { c, m } if (m, c) > (-1, 0) => Bound::Affine { c, m },
            _ => universal,
        };
        let hi = match self.lo {
            Bound::Affine { c, m: 0 } => Bound::Affine { c: -c, m: 0 },
            Bound::Affine { c, m: 1 } => Bound::Affine {
                c: -c.div_euclid(2),
                m: 0,
            },
            _ => Bound::PosInf,
        };
        Envelope { lo, hi }
    }

    /// Envelope of the image under `(n, d) -> (n, d + lambda * n)`.
    /// Exponents are preserved, so degree-independent bounds carry over;
    /// sloped bounds are dropped.
    pub fn sheared_lambda(self, _lambda: i64) -> Envelope {
        let lo = match self.lo {
            Bound::Affine { m: 0, .. } => self.lo,
            _ => Bound::NegInf,
        };
        let hi = match self.hi {
            Bound::Affine { m: 0, .. } => self.hi,
            _ => Bound::PosInf,
        };
        Envelope { lo, hi }
    }
}

fn lo_min(a: Bound, b: Bound) -> Bound {
    match (a, b) {
        (Bound::NegInf, _) | (_, Bound::NegInf) => Bound::NegInf,
        (Bound::Affine { c: c1, m: m1 }, Bound::Affine { c: c2, m: m2 }) => Bound::Affine {
            c: c1.min(c2),
            m: m1.min(m2),
        },
        (Bound::PosInf, x) | (x, Bound::PosInf) => x,
    }
}

fn hi_max(a: Bound, b: Bound) -> Bound {
    match (a, b) {
        (Bound::PosInf, _) | (_, Bound::PosInf) => Bound::PosInf,
        (Bound::Affine { c: c1, m: m1 }, Bound::Affine { c: c2, m: m2 }) => Bound::Affine {
            c: c1.max(c2),
            m: m1.max(m2),
        },
        (Bound::NegInf, x) | (x, Bound::NegInf) => x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_ordering() {
        assert!(Ext::NegInf < Ext::Int(i64::MIN));
        assert!(Ext::Int(i64::MAX) < Ext::PosInf);
        assert_eq!(Ext::Int(3).add(Ext::Int(4)), Ext::Int(7));
        assert_eq!(Ext::PosInf.add(Ext::Int(-5)), Ext::PosInf);
    }

    #[test]
    fn minkowski_of_affine_sides() {
        // phi-like envelope [-1-d, 1+d] squared -> [-2-d, 2+d] is wrong;
        // the correct product envelope is [-2-d, 2+d] with slopes kept:
        // lower c adds, slope stays -1 (min of equal slopes).
        let phi = Envelope {
            lo: Bound::Affine { c: -1, m: -1 },
            hi: Bound::Affine { c: 1, m: 1 },
        };
        let sq = phi.minkowski(phi);
        assert_eq!(sq.lo, Bound::Affine { c: -2, m: -1 });
        assert_eq!(sq.hi, Bound::Affine { c: 2, m: 1 });
        // At degree d the true support of phi^2 is within [-(d+2), d+2].
        assert_eq!(sq.lo.at(3), Ext::Int(-5));
    }

    #[test]
    fn shear_maps_one_sided_envelopes() {
        // Support n >= 0 at every degree (a double product) maps under
        // (n,d) -> (-n, d+n) to n' <= 0 with the universal n' >= -d'.
        let f = Envelope {
            lo: Bound::constant(0),
            hi: Bound::PosInf,
        };
        let img = f.sheared_q_inv();
        assert_eq!(img.hi, Bound::constant(0));
        assert_eq!(img.lo, Bound::Affine { c: 0, m: -1 });
    }
}
