//! Soundness fuzzing for the validity-box machinery.
//!
//! Every operation on window-truncated series claims a result box; inside
//! that box the stored data must equal the true mathematical result. These
//! tests build small exact series (where the truth is computable by naive
//! independent oracles), truncate them to random windows with weakened or
//! absent support knowledge, run the engine, and require every claimed cell
//! to match the oracle. Erosion may shrink boxes, never corrupt them.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use jacform_core::rational::{rat, Rational};
use jacform_core::series::bound::Envelope;
use jacform_core::series::ops::{exp_series, invert, mul};
use jacform_core::series::subst::{subst_q_inv_t, subst_q_t_lambda};
use jacform_core::series::{BiSeries, BoxSpec, SeriesError, Window};

type Cells = BTreeMap<(i64, i64), Rational>;

fn cells_of(series: &BiSeries) -> Cells {
    series
        .cells()
        .map(|(n, d, c)| ((n, d), c.clone()))
        .collect()
}

/// Naive Cauchy-product oracle over explicit cell maps, independent of the
/// engine's convolution and window logic.
fn naive_mul(a: &Cells, b: &Cells, tmax: i64) -> Cells {
    let mut out = Cells::new();
    for ((n1, d1), c1) in a {
        for ((n2, d2), c2) in b {
            let (n, d) = (n1 + n2, d1 + d2);
            if d > tmax {
                continue;
            }
            let entry = out.entry((n, d)).or_insert_with(Rational::zero);
            *entry += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn oracle_value(truth: &Cells, n: i64, d: i64) -> Rational {
    truth.get(&(n, d)).cloned().unwrap_or_else(Rational::zero)
}

/// Every cell the result claims must carry the oracle's value.
fn assert_sound(result: &BiSeries, truth: &Cells, what: &str) {
    let hull = result.global_span().unwrap_or((0, 0));
    let truth_hull = truth
        .keys()
        .fold(hull, |(lo, hi), &(n, _)| (lo.min(n), hi.max(n)));
    for d in 0..=result.tmax() {
        let (lo, hi) = match result.window(d) {
            Window::Full => truth_hull,
            Window::Range { lo, hi } => (lo, hi),
        };
        for n in lo..=hi {
            let got = result.coeff(n, d).unwrap();
            let want = oracle_value(truth, n, d);
            assert_eq!(got, want, "{what}: corrupted cell q^{n} t^{d}");
        }
    }
}

fn random_series(rng: &mut StdRng, tmax: i64, span: i64) -> BiSeries {
    let cells = (0..rng.gen_range(1..=7))
        .map(|_| {
            (
                rng.gen_range(-span..=span),
                rng.gen_range(0..=tmax),
                rat(rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 }),
            )
        })
        .collect::<Vec<_>>();
    BiSeries::from_cells(tmax, cells)
}

/// Random truncation: a narrower window, optionally forgetting the support
/// envelope entirely (pure trust region).
fn truncate(rng: &mut StdRng, a: &BiSeries) -> BiSeries {
    let tmax = rng.gen_range(a.tmax().min(2)..=a.tmax());
    let lo = rng.gen_range(-6..=-1);
    let hi = rng.gen_range(1..=6);
    let r = a.restrict(BoxSpec::new(tmax, lo, hi)).unwrap();
    if rng.gen_bool(0.5) {
        r.with_envelope(Envelope::UNKNOWN)
    } else {
        r
    }
}

#[test]
fn truncated_products_never_fabricate_cells() {
    let mut rng = StdRng::seed_from_u64(0xb0c5);
    let mut nonempty = 0;
    for _ in 0..300 {
        let a = random_series(&mut rng, 6, 4);
        let b = random_series(&mut rng, 6, 4);
        let truth = naive_mul(&cells_of(&a), &cells_of(&b), 6);
        let aw = truncate(&mut rng, &a);
        let bw = if rng.gen_bool(0.5) {
            b.clone()
        } else {
            truncate(&mut rng, &b)
        };
        match mul(&aw, &bw) {
            Ok(p) => {
                assert_sound(&p, &truth, "mul");
                nonempty += 1;
            }
            Err(SeriesError::EmptyBox) => {}
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
    assert!(
        nonempty >= 50,
        "erosion must not reject everything ({nonempty} products)"
    );
}

#[test]
fn truncated_shears_never_fabricate_cells() {
    let mut rng = StdRng::seed_from_u64(0x5eea);
    for _ in 0..300 {
        // keep shears above t^0: cells with d >= 2|n|
        let cells = (0..rng.gen_range(1..=6))
            .map(|_| {
                let n: i64 = rng.gen_range(-3..=3);
                let d = rng.gen_range((2 * n.abs())..=8);
                (n, d, rat(rng.gen_range(1..=9)))
            })
            .collect::<Vec<_>>();
        let a = BiSeries::from_cells(8, cells);
        let aw = truncate(&mut rng, &a);
        let lambda = rng.gen_range(-2..=2);

        // oracle: remap the restricted view's readable content of the truth
        let truth_full: Cells = a
            .cells()
            .filter(|&(n, d, _)| d + lambda * n >= 0)
            .map(|(n, d, c)| ((n, d + lambda * n), c.clone()))
            .collect();
        if let Ok(s) = subst_q_t_lambda(&aw, lambda) {
            // claimed cells may only disagree with the truth where the full
            // series has cells the truncation could not see; soundness
            // demands those cells be excluded from the claimed box, so
            // every claimed cell must match the full remap.
            assert_sound(&s, &truth_full, "lambda shear");
        }
        let truth_inv: Cells = a
            .cells()
            .filter(|&(n, d, _)| d + n >= 0)
            .map(|(n, d, c)| ((-n, d + n), c.clone()))
            .collect();
        if let Ok(s) = subst_q_inv_t(&aw) {
            assert_sound(&s, &truth_inv, "q -> t/q shear");
        }
    }
}

#[test]
fn truncated_inverses_and_exponentials_stay_exact() {
    let mut rng = StdRng::seed_from_u64(0x1457);
    for _ in 0..200 {
        let tmax = 6;
        // unit-led series: c q^{n0} + strictly t-positive tail
        let n0 = rng.gen_range(-2..=2);
        let c = rat(rng.gen_range(1..=4));
        let mut cells = vec![(n0, 0, c)];
        for _ in 0..rng.gen_range(1..=5) {
            cells.push((
                rng.gen_range(-3..=3),
                rng.gen_range(1..=tmax),
                rat(rng.gen_range(-5..=5)),
            ));
        }
        let a = BiSeries::from_cells(tmax, cells);
        let full_inv = cells_of(&invert(&a).unwrap());
        let aw = truncate(&mut rng, &a);
        match invert(&aw) {
            Ok(inv) => assert_sound(&inv, &full_inv, "invert"),
            Err(SeriesError::NonInvertibleLeadingTerm | SeriesError::EmptyBox) => {}
            Err(e) => panic!("unexpected error: {e}"),
        }

        // exp on the t-positive part
        let tail = BiSeries::from_cells(
            tmax,
            (0..rng.gen_range(1..=4))
                .map(|_| {
                    (
                        rng.gen_range(-3..=3),
                        rng.gen_range(1..=tmax),
                        rat(rng.gen_range(-4..=4)),
                    )
                })
                .collect::<Vec<_>>(),
        );
        let full_exp = cells_of(&exp_series(&tail).unwrap());
        let tw = truncate(&mut rng, &tail);
        match exp_series(&tw) {
            Ok(e) => assert_sound(&e, &full_exp, "exp"),
            Err(SeriesError::Precondition(_) | SeriesError::EmptyBox) => {}
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
}
