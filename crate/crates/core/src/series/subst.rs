//! The variable substitutions of the elliptic transformation law.
//!
//! `subst_q_inv_t` maps a series `Z(q, t)` to `Z(q^{-1} t, t)`, which on
//! coefficients is the shear `(n, d) -> (-n, d + n)`. `subst_q_t_lambda`
//! maps `Z(q, t)` to `Z(q t^lambda, t)`, the shear `(n, d) -> (n, d + n*lambda)`.
//! Both substitutions keep a coefficient trustworthy only when its unique
//! preimage lies inside the input box, and both reject inputs whose stored
//! coefficients would land below t^0 (the substituted series must stay in
//! `Q[q^(+-1)][[t]]`; an out-of-range hit means the input box is too generous
//! for the claim -- restrict it first).

use num_traits::Zero;

use super::{BiSeries, SeriesError, Slice, Window};

/// `Z(q,t) -> Z(q^{-1} t, t)`: coefficient at `(n, d)` moves to `(-n, d+n)`.
pub fn subst_q_inv_t(a: &BiSeries) -> Result<BiSeries, SeriesError> {
    for d in 0..=a.tmax() {
        for &n in a.slice(d).keys() {
            if d + n < 0 {
                return Err(SeriesError::NegativeTDegree { n, d });
            }
        }
    }
    let tmax = a.tmax();
    let mut windows = Vec::new();
    for d_out in 0..=tmax {
        // Preimage of (n', d_out) is (-n', d_out + n').
        let candidates = (-d_out)..=(a.tmax() - d_out);
        match longest_valid_run(candidates, |n_out| a.in_box(-n_out, d_out + n_out)) {
            Some(w) => windows.push(w),
            None if d_out == 0 => return Err(SeriesError::EmptyBox),
            None => break,
        }
    }
    let tmax = windows.len() as i64 - 1;
    let mut slices = vec![Slice::new(); (tmax + 1) as usize];
    for d in 0..=a.tmax() {
        for (&n, c) in a.slice(d) {
            let (n_out, d_out) = (-n, d + n);
            if (0..=tmax).contains(&d_out) && windows[d_out as usize].contains(n_out) {
                slices[d_out as usize].insert(n_out, c.clone());
            }
        }
    }
    Ok(BiSeries::new_windowed(
        tmax,
        slices,
        windows,
        a.envelope().sheared_q_inv(),
    ))
}

/// `Z(q,t) -> Z(q t^lambda, t)`: coefficient at `(n, d)` moves to `(n, d + lambda*n)`.
pub fn subst_q_t_lambda(a: &BiSeries, lambda: i64) -> Result<BiSeries, SeriesError> {
    if lambda == 0 {
        return Ok(a.clone());
    }
    for d in 0..=a.tmax() {
        for &n in a.slice(d).keys() {
            if d + lambda * n < 0 {
                return Err(SeriesError::NegativeTDegree { n, d });
            }
        }
    }
    let tmax = a.tmax();
    let mut windows = Vec::new();
    for d_out in 0..=tmax {
        // Preimage of (n, d_out) is (n, d_out - lambda*n); the preimage
        // degree must land in [0, tmax], which bounds n to a finite range.
        let (lo, hi) = if lambda > 0 {
            (
                (d_out - a.tmax()).div_euclid(lambda)
                    + if (d_out - a.tmax()).rem_euclid(lambda) != 0 {
                        1
                    } else {
                        0
                    },
                d_out.div_euclid(lambda),
            )
        } else {
            let l = -lambda;
            (
                (-d_out).div_euclid(l) + if (-d_out).rem_euclid(l) != 0 { 1 } else { 0 },
                (a.tmax() - d_out).div_euclid(l),
            )
        };
        match longest_valid_run(lo..=hi, |n| a.in_box(n, d_out - lambda * n)) {
            Some(w) => windows.push(w),
            None if d_out == 0 => return Err(SeriesError::EmptyBox),
            None => break,
        }
    }
    let tmax = windows.len() as i64 - 1;
    let mut slices = vec![Slice::new(); (tmax + 1) as usize];
    for d in 0..=a.tmax() {
        for (&n, c) in a.slice(d) {
            let d_out = d + lambda * n;
            if (0..=tmax).contains(&d_out) && windows[d_out as usize].contains(n) {
                slices[d_out as usize].insert(n, c.clone());
            }
        }
    }
    Ok(BiSeries::new_windowed(
        tmax,
        slices,
        windows,
        a.envelope().sheared_lambda(lambda),
    ))
}

/// Formal sign flip `q -> -p`: the coefficient at `(n, d)` picks up `(-1)^n`.
/// Applying it twice is the identity.
pub fn sign_flip(a: &BiSeries) -> BiSeries {
    let slices = (0..=a.tmax())
        .map(|d| {
            a.slice(d)
                .iter()
                .map(|(&n, c)| {
                    (
                        n,
                        if n.rem_euclid(2) == 1 {
                            -c.clone()
                        } else {
                            c.clone()
                        },
                    )
                })
                .collect()
        })
        .collect();
    BiSeries::new_windowed(a.tmax(), slices, a.windows().to_vec(), a.envelope())
}

/// Longest contiguous run of valid exponents in `range` (first such run on
/// ties). Substituted windows are intervals of this kind by construction.
fn longest_valid_run(
    range: std::ops::RangeInclusive<i64>,
    valid: impl Fn(i64) -> bool,
) -> Option<Window> {
    let mut best: Option<(i64, i64)> = None;
    let mut current: Option<(i64, i64)> = None;
    for n in range {
        if valid(n) {
            current = Some(match current {
                None => (n, n),
                Some((lo, _)) => (lo, n),
            });
            let cur = current.unwrap();
            if best.is_none_or(|(lo, hi)| cur.1 - cur.0 > hi - lo) {
                best = Some(cur);
            }
        } else {
            current = None;
        }
    }
    best.map(|(lo, hi)| Window::range(lo, hi))
}

/// Quick zero-coefficient check used by callers preparing a substitution.
pub fn has_coeff_below_shear(a: &BiSeries) -> bool {
    (0..=a.tmax()).any(|d| a.slice(d).iter().any(|(&n, c)| d + n < 0 && !c.is_zero()))
}

impl BiSeries {
    /// Convenience: `Z(q^{-1} t, t)`.
    pub fn q_inv_t(&self) -> Result<BiSeries, SeriesError> {
        subst_q_inv_t(self)
    }
}
