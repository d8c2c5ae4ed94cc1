//! End-to-end worked examples with golden files.
//!
//! Each example recomputes a full pipeline, verifies its internal identity
//! exactly, and diffs the result against a golden series checked into the
//! repository. `--bless` rewrites the golden files from the current engine.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use jacform_core::forms::{delta, eisenstein, phi_m21, phi_m21_sbasis, theta_d4, twelve_wp};
use jacform_core::gw::{
    abelian_h3_input, assemble_sbasis, assemble_z, euler_variant, invert_gw, naive_euler_f3,
    FCoefficients, GWInput,
};
use jacform_core::pt::{check_elliptic_law, genus0_z, genus2_z, pt0, GeometryParams};
use jacform_core::rational::{rat, ratio, Rational};
use jacform_core::series::json as series_json;
use jacform_core::series::ops::{add, mul, scalar_mul, sub};
use jacform_core::series::products::{eta_product, t_rescale, EtaExponents};
use jacform_core::series::sbasis::{to_sbasis, SBasisSeries};
use jacform_core::series::{compare, BiSeries, BoxSpec};

use crate::util::{diff_against, EXIT_MISMATCH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExampleName {
    Schoen,
    Stu,
    K3xe,
    Axe,
    AxeEuler,
}

struct Golden {
    name: &'static str,
    series: BiSeries,
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden")
}

fn check_goldens(goldens: &[Golden], bless: bool) -> Result<i32> {
    let dir = golden_dir();
    let mut ok = true;
    for g in goldens {
        let path = dir.join(format!("{}.json", g.name));
        if bless {
            fs::create_dir_all(&dir)?;
            fs::write(&path, series_json::to_string_pretty(&g.series))?;
            println!("{}: golden written to {}", g.name, path.display());
            continue;
        }
        let text = fs::read_to_string(&path)
            .with_context(|| format!("missing golden file {}", path.display()))?;
        let golden = series_json::parse(&text)?;
        ok &= diff_against(g.name, &g.series, &golden)?;
    }
    Ok(if ok { 0 } else { EXIT_MISMATCH })
}

fn ensure_identity(name: &str, lhs: &BiSeries, rhs: &BiSeries) -> Result<()> {
    let cmp = compare(lhs, rhs)?;
    if !cmp.equal {
        let (n, d, l, r) = cmp.first_mismatch.unwrap();
        bail!("{name}: mismatch at q^{n} t^{d}: {l} vs {r}");
    }
    println!(
        "{name}: exact on {} cells through t^{}",
        cmp.compared_cells, cmp.tmax
    );
    Ok(())
}

pub fn run(name: ExampleName, bless: bool) -> Result<i32> {
    match name {
        ExampleName::Schoen => schoen(bless),
        ExampleName::Stu => stu(bless),
        ExampleName::K3xe => k3xe(bless),
        ExampleName::Axe => axe(bless),
        ExampleName::AxeEuler => axe_euler(bless),
    }
}

/// Rational elliptic surface fiber product: the genus-0 pipeline against the
/// closed product, and the fiber-class evaluation.
fn schoen(bless: bool) -> Result<i32> {
    let tmax = 10;
    let spec = BoxSpec::with_default_window(tmax);
    let geometry = GeometryParams::weighted(0, 12, 0);

    let f_b = eta_product(&EtaExponents::Uniform(-12), tmax);
    let pt_b = mul(&genus0_z(&f_b, spec)?, &pt0(&geometry, spec)?)?;

    // closed product: 1/((q+2+1/q) prod (1+qt^m)^2 (1-t^m)^20 (1+t^m/q)^2)
    let mut denom = BiSeries::from_cells(tmax, [(1, 0, rat(1)), (0, 0, rat(2)), (-1, 0, rat(1))]);
    for m in 1..=tmax {
        for dir in [1, -1] {
            let cells = [(0i64, rat(1)), (1, rat(2)), (2, rat(1))]
                .into_iter()
                .filter(|(j, _)| m * j <= tmax)
                .map(|(j, c)| (dir * j, m * j, c));
            denom = mul(&denom, &BiSeries::from_cells(tmax, cells))?;
        }
    }
    denom = mul(&denom, &eta_product(&EtaExponents::Uniform(20), tmax))?;
    let closed = to_sbasis(&denom)?.invert()?.expand_on(spec)?;
    ensure_identity("schoen: PT_B vs closed product", &pt_b, &closed)?;

    let tmax_e = 15;
    let spec_e = BoxSpec::with_default_window(tmax_e);
    let z_e = jacform_core::pt::genus1_z(
        &BiSeries::zero(tmax_e),
        &BiSeries::monomial(rat(12), 0, 0, tmax_e),
        spec_e,
    )?;
    let pt_e = mul(&z_e, &pt0(&GeometryParams::weighted(0, 12, 1), spec_e)?)?;
    let expected = scalar_mul(&rat(12), &eta_product(&EtaExponents::Uniform(-12), tmax_e));
    ensure_identity("schoen: PT_E = 12 prod (1-t^m)^{-12}", &pt_e, &expected)?;

    check_goldens(
        &[
            Golden {
                name: "schoen_pt_b",
                series: pt_b,
            },
            Golden {
                name: "schoen_pt_e",
                series: pt_e,
            },
        ],
        bless,
    )
}

/// The elliptic fibration over P1 x P1: base-class series from the
/// Noether-Lefschetz data, and the assembled (1,1) expansion.
fn stu(bless: bool) -> Result<i32> {
    let tmax = 8;
    let spec = BoxSpec::with_default_window(tmax);
    let e2 = eisenstein(1, tmax);
    let e4 = eisenstein(2, tmax);
    let e6 = eisenstein(3, tmax);
    let eta24 = eta_product(&EtaExponents::Uniform(-24), tmax);
    let eta48 = eta_product(&EtaExponents::Uniform(-48), tmax);

    let e4e6 = mul(&e4, &e6)?;
    let f10 = mul(&scalar_mul(&rat(-2), &e4e6), &eta24)?;
    let e4cubed = mul(&e4, &mul(&e4, &e4)?)?;
    let e6sq = mul(&e6, &e6)?;

    // F_{(1,1)} and the two coefficient series of the (1,1) expansion
    let inner_full = add(
        &add(
            &scalar_mul(&ratio(67, 36), &e4cubed),
            &scalar_mul(&ratio(65, 36), &e6sq),
        )?,
        &scalar_mul(&ratio(1, 3), &mul(&e2, &e4e6)?),
    )?;
    let f11 = mul(&scalar_mul(&rat(-1), &mul(&e4e6, &inner_full)?), &eta48)?;
    let f_m1 = mul(&scalar_mul(&rat(4), &mul(&e4e6, &e4e6)?), &eta48)?;
    let f0 = add(
        &f11,
        &scalar_mul(&ratio(1, 12), &mul(&e2, &mul(&f10, &f10)?)?),
    )?;

    // arithmetic check: f_0 = -E4 E6 (67/36 E4^3 + 65/36 E6^2) eta^{-48}
    let g = scalar_mul(
        &rat(-1),
        &mul(
            &e4e6,
            &add(
                &scalar_mul(&ratio(67, 36), &e4cubed),
                &scalar_mul(&ratio(65, 36), &e6sq),
            )?,
        )?,
    );
    ensure_identity("stu: f_0 closed form", &f0, &mul(&g, &eta48)?)?;
    let heads = g.t_coeffs()?;
    let expected = [ratio(-11, 3), rat(1448), rat(-362376), rat(85977632)];
    if heads[..4] != expected {
        bail!("stu: Eisenstein factor opens as {:?}", &heads[..4]);
    }
    println!("stu: factor expansion -11/3 + 1448t - 362376t^2 + 85977632t^3 confirmed");

    // assembled Z_{(1,1)} = f_{-1} wp / phi + f_0 / phi; the i = -1 basis
    // monomial is phi_{0,1}/phi^2 = 12 wp/phi, so its coefficient is f_{-1}/12
    let coeffs = FCoefficients::new(
        0,
        -1,
        vec![
            f_m1.t_coeffs()?.iter().map(|c| c / rat(12)).collect(),
            f0.t_coeffs()?,
        ],
    )?;
    let z = assemble_z(&coeffs, spec)?;
    let law = check_elliptic_law(&z, 0, 1)?;
    if !law.pass {
        bail!(
            "stu: assembled Z fails the transformation law: {:?}",
            law.first_mismatch
        );
    }
    println!(
        "stu: assembled Z passes the transformation law ({} cells)",
        law.compared_cells
    );

    check_goldens(
        &[
            Golden {
                name: "stu_f0",
                series: f0,
            },
            Golden {
                name: "stu_f_m1",
                series: f_m1,
            },
            Golden {
                name: "stu_z11",
                series: z,
            },
        ],
        bless,
    )
}

/// K3 x E: PT_0 = 1/Delta, the two low-genus evaluations, and the
/// quasi-Jacobi decomposition of the genus-1 series.
fn k3xe(bless: bool) -> Result<i32> {
    let tmax = 12;
    let spec = BoxSpec::with_default_window(tmax);
    let geometry = GeometryParams::weighted(0, 24, 0);

    let pt_0 = pt0(&geometry, spec)?;
    let inv_delta = to_sbasis(&delta(tmax))?.invert()?.expand_exact()?;
    ensure_identity("k3xe: PT_0 = 1/Delta", &pt_0, &inv_delta)?;

    // h = 0 via inversion: PT = 1/(Delta phi)
    let gw = GWInput::new(0, vec![constant(rat(1), tmax)])?;
    let pt_h0 = mul(&assemble_z(&invert_gw(&gw, tmax)?, spec)?, &pt_0)?;
    let direct = to_sbasis(&mul(&delta(tmax), &phi_m21(tmax))?)?
        .invert()?
        .expand_on(spec)?;
    ensure_identity("k3xe: PT_0^{K3xE} = 1/(Delta phi)", &pt_h0, &direct)?;

    // h = 1 via inversion with GW^0 = 24: PT = 24 wp / Delta
    let gw = GWInput::new(1, vec![constant(rat(24), tmax), constant(rat(0), tmax)])?;
    let pt_h1 = mul(&assemble_z(&invert_gw(&gw, tmax)?, spec)?, &pt_0)?;
    let direct = mul(
        &twelve_wp(tmax).scalar_mul(&rat(2)).expand_on(spec)?,
        &eta_product(&EtaExponents::Uniform(-24), tmax),
    )?;
    ensure_identity("k3xe: PT_1^{K3xE} = 24 wp / Delta", &pt_h1, &direct)?;

    // decomposition: PT_1 * Delta * phi = 2 phi_{0,1} in weight 0, index 1
    let target = mul(&mul(&pt_h1, &delta(tmax))?, &phi_m21(tmax))?;
    let verdict = jacform_core::decompose::decompose(&target, 0, 1, true)?;
    let expected = jacform_core::decompose::GradedMonomial {
        e2: 0,
        e4: 0,
        e6: 0,
        phi_m21: 0,
        phi_01: 1,
    };
    if !(verdict.ok
        && verdict.coefficients.len() == 1
        && verdict.coefficients.get(&expected) == Some(&rat(2)))
    {
        bail!("k3xe: decomposition verdict {:?}", verdict.to_value());
    }
    println!("k3xe: PT_1 Delta phi decomposes as 2 phi_[0,1]");

    check_goldens(
        &[
            Golden {
                name: "k3xe_pt_h0",
                series: pt_h0,
            },
            Golden {
                name: "k3xe_pt_h1",
                series: pt_h1,
            },
        ],
        bless,
    )
}

fn constant(c: Rational, tmax: i64) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); (tmax + 1) as usize];
    v[0] = c;
    v
}

/// Abelian threefold: the genus-2 closed formula gives phi_{-2,1} on the
/// nose, and the genus-3 inversion assembles to
/// 12 wp phi^2 - theta_D4 phi^2.
fn axe(bless: bool) -> Result<i32> {
    let tmax = 10;
    let spec = BoxSpec::with_default_window(tmax);

    // h = 2 with GW = (0, 0, 1)
    let z2 = genus2_z(
        &BiSeries::zero(tmax),
        &BiSeries::zero(tmax),
        &BiSeries::monomial(rat(1), 0, 0, tmax),
        spec,
    )?;
    ensure_identity("axe: PT_2 = phi_{-2,1}", &z2, &phi_m21(tmax))?;
    for lambda in [-1, 1] {
        let v = check_elliptic_law(&phi_m21(tmax), 2, lambda)?;
        if !v.pass {
            bail!("axe: phi fails the law at lambda = {lambda}");
        }
    }

    // h = 3 from the GW input (0, 0, 12, GW^3)
    let f = invert_gw(&abelian_h3_input(tmax), tmax)?;
    let z3 = assemble_sbasis(&f, tmax)?.expand_exact()?;
    let phi2 = {
        let phi = phi_m21_sbasis(tmax);
        phi.mul(&phi)
    };
    let theta = SBasisSeries::from_t_coeffs(tmax, theta_d4(tmax).t_coeffs()?);
    let direct = twelve_wp(tmax)
        .mul(&phi2)
        .sub(&theta.mul(&phi2))
        .expand_exact()?;
    ensure_identity("axe: PT_3 = 12 wp phi^2 - theta_D4 phi^2", &z3, &direct)?;

    check_goldens(
        &[Golden {
            name: "axe_pt_h3",
            series: z3,
        }],
        bless,
    )
}

/// Unweighted Euler characteristics for the abelian threefold at genus 3:
/// the correction series equals 5/2 - E2(t) - E2(t^2)/2 and is not modular.
fn axe_euler(bless: bool) -> Result<i32> {
    let tmax = 20;
    let f3 = naive_euler_f3(tmax);
    let e2 = eisenstein(1, tmax);
    let closed = sub(
        &sub(&BiSeries::monomial(ratio(5, 2), 0, 0, tmax), &e2)?,
        &scalar_mul(&ratio(1, 2), &t_rescale(&e2, 2)?),
    )?;
    ensure_identity("axe-euler: f~_3 = 5/2 - E2(t) - E2(t^2)/2", &f3, &closed)?;

    let verdict = jacform_core::decompose::decompose(&f3, 2, 0, false)?;
    if verdict.ok {
        bail!("axe-euler: f~_3 unexpectedly decomposed in the modular basis");
    }
    println!(
        "axe-euler: no weight-2 modular decomposition exists (residual at {:?})",
        verdict.residual_cell
    );

    // the assembled naive series 12 wp(-p) phi(-p)^2 + f~_3 phi(-p)^2
    let tmax = 10;
    let spec = BoxSpec::with_default_window(tmax);
    let f = FCoefficients::new(
        3,
        0,
        vec![
            constant(rat(0), tmax),
            constant(rat(0), tmax),
            constant(rat(1), tmax),
            naive_euler_f3(tmax).t_coeffs()?,
        ],
    )?;
    let pt_naive = euler_variant(&f, spec)?;
    let direct = {
        let phi2 = {
            let phi = phi_m21_sbasis(tmax);
            phi.mul(&phi)
        };
        let f3s = SBasisSeries::from_t_coeffs(tmax, naive_euler_f3(tmax).t_coeffs()?);
        let z = twelve_wp(tmax).mul(&phi2).add(&f3s.mul(&phi2));
        jacform_core::series::subst::sign_flip(&z.expand_exact()?)
    };
    ensure_identity("axe-euler: assembled naive PT_3", &pt_naive, &direct)?;

    check_goldens(
        &[Golden {
            name: "axe_euler_pt_h3",
            series: pt_naive,
        }],
        bless,
    )
}
