//! Shared I/O helpers: series loading, output formatting, verdicts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};

use jacform_core::rational::format_rational;
use jacform_core::series::json as series_json;
use jacform_core::series::{compare, BiSeries, BoxSpec, Comparison};

/// Exit code for a mathematical mismatch (usage errors exit 2 via clap).
pub const EXIT_MISMATCH: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

pub fn load_series(path: &Path) -> Result<BiSeries> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    series_json::parse(&text).with_context(|| format!("parsing series from {}", path.display()))
}

pub fn render(series: &BiSeries, format: Format) -> String {
    match format {
        Format::Json => series_json::to_string_pretty(series),
        Format::Table => table(series),
    }
}

/// Coefficient grid: q-exponents across, t-degrees down.
pub fn table(series: &BiSeries) -> String {
    let Some((lo, hi)) = series.global_span() else {
        return "0 (empty series)\n".to_string();
    };
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["t\\q".to_string()];
    header.extend((lo..=hi).map(|n| format!("q^{n}")));
    cells.push(header);
    for d in 0..=series.tmax() {
        let mut row = vec![format!("t^{d}")];
        let zero = jacform_core::rational::rat(0);
        for n in lo..=hi {
            row.push(match series.coeff(n, d) {
                Ok(c) if c != zero => format_rational(&c),
                Ok(_) => ".".to_string(),
                Err(_) => "?".to_string(), // outside the validity box
            });
        }
        cells.push(row);
    }
    let widths: Vec<usize> = (0..cells[0].len())
        .map(|j| cells.iter().map(|row| row[j].len()).max().unwrap_or(1))
        .collect();
    let mut out = String::new();
    for row in &cells {
        for (j, cell) in row.iter().enumerate() {
            out.push_str(&format!("{:>width$} ", cell, width = widths[j]));
        }
        out.pop();
        out.push('\n');
    }
    out
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
    }
}

/// The uniform verdict document shared by `verify` and the examples.
pub fn comparison_verdict(cmp: &Comparison) -> Value {
    json!({
        "pass": cmp.equal,
        "compared_cells": cmp.compared_cells,
        "first_mismatch": cmp.first_mismatch.as_ref().map(|(n, d, lhs, rhs)| {
            json!([n, d, format_rational(lhs), format_rational(rhs)])
        }),
    })
}

/// Compare two series, print the verdict, return the exit code.
pub fn verdict_exit(name: &str, cmp: &Comparison) -> i32 {
    let verdict = comparison_verdict(cmp);
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({ "identity": name, "verdict": verdict }))
            .expect("verdict")
    );
    if cmp.equal {
        0
    } else {
        EXIT_MISMATCH
    }
}

pub fn diff_against(name: &str, computed: &BiSeries, golden: &BiSeries) -> Result<bool> {
    let cmp = compare(computed, golden)?;
    if cmp.equal {
        println!("{name}: ok ({} cells)", cmp.compared_cells);
        Ok(true)
    } else {
        let (n, d, lhs, rhs) = cmp.first_mismatch.as_ref().expect("mismatch");
        println!(
            "{name}: MISMATCH at q^{n} t^{d}: computed {} vs golden {}",
            format_rational(lhs),
            format_rational(rhs)
        );
        Ok(false)
    }
}

/// Cache directory resolution: flag beats environment beats default.
pub fn cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Ok(env) = std::env::var("JACFORM_CACHE_DIR") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from("./.jacform-cache")
}

/// Box flags shared by most subcommands.
#[derive(Clone, Copy, Debug, clap::Args)]
pub struct BoxArgs {
    /// Series trusted through t^tmax
    #[arg(long, default_value_t = jacform_core::DEFAULT_TMAX)]
    pub tmax: i64,
    /// Lowest trusted q-exponent (default -(tmax+2))
    #[arg(long)]
    pub qlo: Option<i64>,
    /// Highest trusted q-exponent (default tmax+2)
    #[arg(long)]
    pub qhi: Option<i64>,
}

impl BoxArgs {
    pub fn spec(&self) -> Result<BoxSpec> {
        let tmax = self.tmax;
        anyhow::ensure!(tmax >= 0, "tmax must be non-negative");
        let qlo = self.qlo.unwrap_or(-(tmax + 2));
        let qhi = self.qhi.unwrap_or(tmax + 2);
        anyhow::ensure!(qlo <= qhi, "empty q-window [{qlo}, {qhi}]");
        Ok(BoxSpec::new(tmax, qlo, qhi))
    }
}
