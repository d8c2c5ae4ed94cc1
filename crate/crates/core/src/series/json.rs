//! Series exchange format.
//!
//! `{ "tmax": int, "qwindow": [[lo,hi],...], "coeffs": [[n, d, "num/den"],...] }`
//!
//! Coefficients are decimal strings to preserve exactness; zero coefficients
//! are omitted; `qwindow[d]` is the trust window at t-degree `d`. Fully known
//! slices are clamped to the hull of the default window and the stored
//! support on write (the format carries explicit finite windows only), so a
//! reloaded series is treated as window-trusted data with unknown support.

use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational};

use super::bound::Envelope;
use super::{BiSeries, SeriesError, Slice, Window};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeriesJson {
    pub tmax: i64,
    pub qwindow: Vec<(i64, i64)>,
    pub coeffs: Vec<(i64, i64, String)>,
}

pub fn to_json(a: &BiSeries) -> SeriesJson {
    let (dlo, dhi) = (-(a.tmax() + 2), a.tmax() + 2);
    let hull = a.global_span();
    let qwindow = (0..=a.tmax())
        .map(|d| match a.window(d) {
            Window::Range { lo, hi } => (lo, hi),
            Window::Full => match hull {
                Some((slo, shi)) => (dlo.min(slo), dhi.max(shi)),
                None => (dlo, dhi),
            },
        })
        .collect();
    let mut coeffs: Vec<(i64, i64, String)> = a
        .cells()
        .map(|(n, d, c)| (n, d, format_rational(c)))
        .collect();
    coeffs.sort_by_key(|&(n, d, _)| (d, n));
    SeriesJson {
        tmax: a.tmax(),
        qwindow,
        coeffs,
    }
}

pub fn from_json(doc: &SeriesJson) -> Result<BiSeries, SeriesError> {
    if doc.tmax < 0 {
        return Err(SeriesError::InvalidData("negative tmax".into()));
    }
    if doc.qwindow.len() != (doc.tmax + 1) as usize {
        return Err(SeriesError::InvalidData(format!(
            "qwindow has {} entries, expected {}",
            doc.qwindow.len(),
            doc.tmax + 1
        )));
    }
    let mut windows = Vec::with_capacity(doc.qwindow.len());
    for &(lo, hi) in &doc.qwindow {
        if lo > hi {
            return Err(SeriesError::InvalidData(format!(
                "empty window [{lo}, {hi}]"
            )));
        }
        windows.push(Window::range(lo, hi));
    }
    let mut slices = vec![Slice::new(); (doc.tmax + 1) as usize];
    for (n, d, c) in &doc.coeffs {
        let c = parse_rational(c)
            .ok_or_else(|| SeriesError::InvalidData(format!("bad coefficient {c:?}")))?;
        if !(0..=doc.tmax).contains(d) {
            return Err(SeriesError::InvalidData(format!(
                "coefficient beyond tmax at t^{d}"
            )));
        }
        if !windows[*d as usize].contains(*n) {
            return Err(SeriesError::InvalidData(format!(
                "coefficient outside its window at q^{n} t^{d}"
            )));
        }
        if num_traits::Zero::is_zero(&c) {
            return Err(SeriesError::InvalidData("explicit zero coefficient".into()));
        }
        if slices[*d as usize].insert(*n, c).is_some() {
            return Err(SeriesError::InvalidData(format!(
                "duplicate cell q^{n} t^{d}"
            )));
        }
    }
    Ok(BiSeries::new_windowed(
        doc.tmax,
        slices,
        windows,
        Envelope::UNKNOWN,
    ))
}

pub fn to_string(a: &BiSeries) -> String {
    serde_json::to_string(&to_json(a)).expect("series serialization cannot fail")
}

pub fn to_string_pretty(a: &BiSeries) -> String {
    serde_json::to_string_pretty(&to_json(a)).expect("series serialization cannot fail")
}

pub fn parse(s: &str) -> Result<BiSeries, SeriesError> {
    let doc: SeriesJson =
        serde_json::from_str(s).map_err(|e| SeriesError::InvalidData(e.to_string()))?;
    from_json(&doc)
}
