//! `jacform`: construct, verify, invert, decompose and transform the exact
//! bivariate series of the curve-counting engine.
//!
//! Exit codes: 0 success, 1 mathematical mismatch, 2 usage error.

mod examples;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use jacform_core::forms::cache::DiskCache;
use jacform_core::forms::FormId;
use jacform_core::gw::{assemble_z, invert_gw, GWInput, SeriesListJson};
use jacform_core::pt::{
    charmap, check_elliptic_law, exp_slope_sum, pt0, GeometryParams, SlopeRegion,
};
use jacform_core::rational::{rat, ratio};
use jacform_core::series::json as series_json;
use jacform_core::series::ops::{scalar_mul, sub};
use jacform_core::series::products::{double_product, t_rescale, ProductSign};
use jacform_core::series::subst::{sign_flip, subst_q_inv_t, subst_q_t_lambda};
use jacform_core::series::{compare, BiSeries};

use util::{
    cache_dir, load_series, render, verdict_exit, write_output, BoxArgs, Format, EXIT_MISMATCH,
};

#[derive(Parser)]
#[command(name = "jacform", version, about = "exact Jacobi-form series engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a named form or a PT_0 evaluation and print its series
    Gen(GenArgs),
    /// Run a registered identity check; exits 1 on mathematical failure
    Verify(VerifyArgs),
    /// Solve the triangular system from low-genus data
    Invert(InvertArgs),
    /// Decompose a series in the bigraded ring QMod[phi_{-2,1}, phi_{0,1}]
    Decompose(DecomposeArgs),
    /// Apply a variable substitution to a series
    Transform(TransformArgs),
    /// Recompute a worked example and diff it against its golden files
    Examples(ExamplesArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Form name: delta, e2, e4, e6, e2k, phi-m21, phi-01, wp, theta-d4, eta
    #[arg(long, conflicts_with = "pt0")]
    form: Option<String>,
    /// Eisenstein weight 2k for --form e2k
    #[arg(long)]
    weight: Option<u32>,
    /// Uniform eta exponent for --form eta
    #[arg(long, allow_hyphen_values = true)]
    uniform: Option<i64>,
    /// Explicit eta exponents "m:k,m:k" for --form eta
    #[arg(long)]
    exponents: Option<String>,
    /// Rescale t -> t^r applied to the generated form
    #[arg(long)]
    rescale: Option<i64>,
    /// Generate PT_0 for the geometry given by --ex/--es
    #[arg(long)]
    pt0: bool,
    /// Euler characteristic of the threefold
    #[arg(long, requires = "pt0", allow_hyphen_values = true)]
    ex: Option<i64>,
    /// Euler characteristic of the base surface
    #[arg(long, requires = "pt0", allow_hyphen_values = true)]
    es: Option<i64>,
    /// Variable convention: q (weighted) or p (Euler characteristic)
    #[arg(long, default_value = "q")]
    sign: String,
    #[command(flatten)]
    boxargs: BoxArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory (default ./.jacform-cache, env JACFORM_CACHE_DIR)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Skip the disk cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: phi01-def, elliptic-law, wallcross-exp, fm0-involution, f3-tilde
    identity: String,
    /// Series file for elliptic-law
    #[arg(long)]
    series: Option<PathBuf>,
    /// Arithmetic genus for elliptic-law
    #[arg(long, allow_hyphen_values = true)]
    h: Option<i64>,
    /// Shift parameter for elliptic-law
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<i64>,
    /// Euler characteristic for wallcross-exp
    #[arg(long, default_value_t = 6, allow_hyphen_values = true)]
    ex: i64,
    #[command(flatten)]
    boxargs: BoxArgs,
}

#[derive(Args)]
struct InvertArgs {
    /// JSON file with { "h": int, "series": [seriesjson, ...] }
    #[arg(long)]
    gw: PathBuf,
    /// Also assemble the full bivariate series from the solved coefficients
    #[arg(long)]
    assemble: bool,
    #[command(flatten)]
    boxargs: BoxArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    series: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    weight: i64,
    #[arg(long)]
    index: i64,
    /// Restrict to the modular (E2-free) part of the coefficient ring
    #[arg(long)]
    no_e2: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    series: PathBuf,
    /// One of: qinv (q -> t/q), lambda (q -> q t^lambda), signflip (q -> -p)
    #[arg(long)]
    op: String,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<i64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExamplesArgs {
    #[arg(value_enum)]
    name: examples::ExampleName,
    /// Rewrite the golden files from the current engine output
    #[arg(long, hide = true)]
    bless: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Verify(args) => verify(args),
        Command::Invert(args) => invert_cmd(args),
        Command::Decompose(args) => decompose_cmd(args),
        Command::Transform(args) => transform_cmd(args),
        Command::Examples(args) => examples::run(args.name, args.bless),
    }
}

fn parse_form(args: &GenArgs) -> Result<FormId> {
    let name = args
        .form
        .as_deref()
        .ok_or_else(|| anyhow!("--form or --pt0 is required"))?;
    let base = match name {
        "delta" => FormId::Delta,
        "e2" => FormId::Eisenstein(2),
        "e4" => FormId::Eisenstein(4),
        "e6" => FormId::Eisenstein(6),
        "e2k" => FormId::Eisenstein(
            args.weight
                .ok_or_else(|| anyhow!("--form e2k needs --weight 2k"))?,
        ),
        "phi-m21" => FormId::PhiMinus21,
        "phi-01" => FormId::Phi01,
        "wp" => FormId::WeierstrassP,
        "theta-d4" => FormId::ThetaD4,
        "eta" => {
            if let Some(k) = args.uniform {
                FormId::Uniform(k)
            } else if let Some(spec) = &args.exponents {
                let mut pairs = Vec::new();
                for part in spec.split(',') {
                    let (m, k) = part
                        .split_once(':')
                        .ok_or_else(|| anyhow!("bad eta exponent entry {part:?}"))?;
                    pairs.push((m.trim().parse()?, k.trim().parse()?));
                }
                FormId::EtaProduct(pairs)
            } else {
                bail!("--form eta needs --uniform K or --exponents \"m:k,...\"");
            }
        }
        other => bail!("unknown form name {other:?}"),
    };
    Ok(match args.rescale {
        Some(r) if r != 1 => FormId::TRescale(Box::new(base), r),
        _ => base,
    })
}

fn gen(args: GenArgs) -> Result<i32> {
    let spec = args.boxargs.spec()?;
    let series = if args.pt0 {
        let g = GeometryParams {
            e_x: args.ex.unwrap_or(0),
            e_s: args.es.unwrap_or(0),
            h: 0,
            sign: match args.sign.as_str() {
                "q" => ProductSign::NegQ,
                "p" => ProductSign::PosP,
                other => bail!("unknown sign convention {other:?} (expected q or p)"),
            },
        };
        let job = json!({
            "pt0": { "ex": g.e_x, "es": g.e_s, "sign": args.sign },
            "box": { "tmax": spec.tmax, "qlo": spec.qlo, "qhi": spec.qhi },
        });
        if args.no_cache {
            pt0(&g, spec)?
        } else {
            DiskCache::new(cache_dir(args.cache_dir.as_deref())).get_or_build_job(
                "pt0",
                &job,
                || pt0(&g, spec),
            )?
        }
    } else {
        let form = parse_form(&args)?;
        if args.no_cache {
            form.build(spec)?
        } else {
            DiskCache::new(cache_dir(args.cache_dir.as_deref())).get_or_build(&form, spec)?
        }
    };
    let text = render(&series.restrict(spec)?, args.format);
    write_output(&text, args.out.as_deref())?;
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<i32> {
    let spec = args.boxargs.spec()?;
    match args.identity.as_str() {
        "phi01-def" => {
            let tmax = spec.tmax;
            let lhs = jacform_core::forms::phi_01(tmax);
            let wp = jacform_core::forms::weierstrass_p(tmax).expand_on(spec)?;
            let rhs = scalar_mul(
                &rat(12),
                &jacform_core::series::ops::mul(&wp, &jacform_core::forms::phi_m21(tmax))?,
            );
            let cmp = compare(&lhs, &rhs)?;
            Ok(verdict_exit("phi01-def", &cmp))
        }
        "elliptic-law" => {
            let path = args
                .series
                .as_deref()
                .ok_or_else(|| anyhow!("elliptic-law needs --series FILE"))?;
            let z = load_series(path)?;
            let h = args.h.ok_or_else(|| anyhow!("elliptic-law needs --h"))?;
            let lambda = args
                .lambda
                .ok_or_else(|| anyhow!("elliptic-law needs --lambda"))?;
            let v = check_elliptic_law(&z, h, lambda)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "identity": "elliptic-law", "h": h, "lambda": lambda,
                    "verdict": v.to_value(),
                }))?
            );
            Ok(if v.pass { 0 } else { EXIT_MISMATCH })
        }
        "wallcross-exp" => {
            let lhs = exp_slope_sum(args.ex, &SlopeRegion::positive(), spec)?;
            let rhs = double_product(args.ex, ProductSign::NegQ, spec)?;
            let cmp = compare(&lhs, &rhs)?;
            Ok(verdict_exit("wallcross-exp", &cmp))
        }
        "fm0-involution" => {
            let mut compared = 0u64;
            let mut first = None;
            for h in -6..=6 {
                for n in -20..=20 {
                    for d in 0..=20 {
                        let (n1, d1) = charmap(n, d, h);
                        compared += 1;
                        if charmap(n1, d1, h) != (n, d) && first.is_none() {
                            first = Some((n, d));
                        }
                    }
                }
            }
            let pass = first.is_none();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "identity": "fm0-involution",
                    "verdict": { "pass": pass, "compared_cells": compared, "first_mismatch": first },
                }))?
            );
            Ok(if pass { 0 } else { EXIT_MISMATCH })
        }
        "f3-tilde" => {
            let tmax = spec.tmax;
            let f3 = jacform_core::gw::naive_euler_f3(tmax);
            let e2 = jacform_core::forms::eisenstein(1, tmax);
            let closed = sub(
                &sub(&BiSeries::monomial(ratio(5, 2), 0, 0, tmax), &e2)?,
                &scalar_mul(&ratio(1, 2), &t_rescale(&e2, 2)?),
            )?;
            let cmp = compare(&f3, &closed)?;
            Ok(verdict_exit("f3-tilde", &cmp))
        }
        other => bail!(
            "unknown identity {other:?}; registered: phi01-def, elliptic-law, \
             wallcross-exp, fm0-involution, f3-tilde"
        ),
    }
}

fn invert_cmd(args: InvertArgs) -> Result<i32> {
    let spec = args.boxargs.spec()?;
    let text = std::fs::read_to_string(&args.gw)
        .with_context(|| format!("reading {}", args.gw.display()))?;
    let doc: SeriesListJson = serde_json::from_str(&text)?;
    let input = GWInput::from_value(&doc)?;
    let f = invert_gw(&input, spec.tmax)?;
    let mut out = json!({ "coefficients": f.to_value(spec.tmax.min(f.tmax())) });
    if args.assemble {
        let z = assemble_z(&f, spec)?;
        out["assembled"] = serde_json::to_value(series_json::to_json(&z))?;
    }
    write_output(&serde_json::to_string_pretty(&out)?, args.out.as_deref())?;
    Ok(0)
}

fn decompose_cmd(args: DecomposeArgs) -> Result<i32> {
    let target = load_series(&args.series)?;
    let verdict =
        jacform_core::decompose::decompose(&target, args.weight, args.index, !args.no_e2)?;
    println!("{}", serde_json::to_string_pretty(&verdict.to_value())?);
    Ok(if verdict.ok { 0 } else { EXIT_MISMATCH })
}

fn transform_cmd(args: TransformArgs) -> Result<i32> {
    let series = load_series(&args.series)?;
    let result = match args.op.as_str() {
        "qinv" => subst_q_inv_t(&series)?,
        "lambda" => {
            let l = args
                .lambda
                .ok_or_else(|| anyhow!("--op lambda needs --lambda"))?;
            subst_q_t_lambda(&series, l)?
        }
        "signflip" => sign_flip(&series),
        other => bail!("unknown transform {other:?} (expected qinv, lambda, signflip)"),
    };
    write_output(&render(&result, args.format), args.out.as_deref())?;
    Ok(0)
}
