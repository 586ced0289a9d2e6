//! The `qgalois` command line: argument parsing, commands and renderers.

pub mod config;
pub mod output;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use qgalois::connection::{det_formula, minor_mismatch, Connection};
use qgalois::galois::{classify_with, Classification, ClassifyOptions};
use qgalois::spiral::in_q_spiral;
use qgalois::{GaloisReport, Mat3, Method};
use serde::Serialize;

use config::{FileConfig, Format, Overrides, RunConfig, EPS_ENV};
use output::{complex, csv_string, matrix_rows, opt, sig17, to_json};
use verify::{Suite, SuiteResult};

#[derive(Debug, Parser)]
#[command(name = "qgalois", version, about = "Connection matrices and difference Galois groups of order-3 q-hypergeometric equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the difference Galois group.
    Classify(Common),
    /// Evaluate the connection matrices at given points.
    Connection {
        #[command(flatten)]
        common: Common,
        /// Evaluation point (repeatable), e.g. `0.5,0.3` or `0.5+0.3i`.
        #[arg(long = "z", value_name = "Z", allow_hyphen_values = true)]
        z: Vec<String>,
    },
    /// Run self-check suites.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Nome, real or complex with 0 < |q| < 1.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// a1,a2,a3 as literals or `c*q^alpha`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// b1,b2,b3 with b1 = q.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub eps_trunc: Option<f64>,
    #[arg(long)]
    pub eps_spiral: Option<f64>,
    /// Scan points on the base circle.
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Sample points per circle for the generators.
    #[arg(long)]
    pub per_circle: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with any of the keys above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self, z: &[String]) -> Result<RunConfig> {
        let file = self.config.as_deref().map(FileConfig::load).transpose()?;
        let env = std::env::var(EPS_ENV).ok();
        let o = Overrides {
            q: self.q.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            eps_trunc: self.eps_trunc,
            eps_spiral: self.eps_spiral,
            scan_points: self.scan_points,
            per_circle: self.per_circle,
            format: self.format,
            seed: self.seed,
            z: z.to_vec(),
        };
        RunConfig::resolve(&o, file.as_ref(), env.as_deref())
    }
}

/// Stdout text and the exit status: 0 success, 1 failed checks, 2 undetermined.
pub struct Outcome {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Classify(c) => classify_cmd(&c.resolve(&[])?),
        Command::Connection { common, z } => connection_cmd(&common.resolve(z)?),
        Command::Verify { common, suite } => verify_cmd(&common.resolve(&[])?, *suite),
    }
}

#[derive(Serialize)]
struct ClassifyOut<'a> {
    label: &'static str,
    definitive: bool,
    #[serde(flatten)]
    report: &'a GaloisReport<f64>,
}

fn classify_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let p = cfg.params(&ctx)?;
    let opts = ClassifyOptions { samples: cfg.samples(), skip_numerics: false };
    let r = classify_with(&p, &ctx, &opts)?;
    let label = r.classification.label();
    let mut stderr = Vec::new();
    if let Classification::Undetermined { reason } = &r.classification {
        stderr.push(format!("undetermined: {reason}"));
    }
    let stdout = match cfg.format {
        Format::Json => to_json(&ClassifyOut { label, definitive: r.classification.is_definitive(), report: &r })?,
        Format::Csv => csv_string(&["key", "value"], &classify_rows(&r))?,
        Format::Text => {
            let mut s = String::new();
            for row in classify_rows(&r) {
                s += &format!("{:<22}{}\n", row[0], row[1]);
            }
            s
        }
    };
    let code = if r.classification.is_definitive() { 0 } else { 2 };
    Ok(Outcome { stdout, stderr, code })
}

fn classify_rows(r: &GaloisReport<f64>) -> Vec<Vec<String>> {
    let mut rows = vec![
        vec!["classification".into(), r.classification.label().into()],
        vec!["group".into(), r.groups.g.clone()],
        vec!["neutral_component".into(), r.groups.g0.clone()],
        vec!["derived_group".into(), r.groups.g0_der.clone()],
        vec!["irreducible".into(), r.irreducible.to_string()],
        vec!["lie_case".into(), r.lie_case.as_ref().map(|c| c.label()).unwrap_or_default()],
        vec!["obstruction_residual".into(), opt(r.obstruction_residual)],
        vec!["product_ratio_distance".into(), opt(r.product_ratio.as_ref().map(|v| v.distance))],
        vec!["generators".into(), r.generators.len().to_string()],
    ];
    if let Classification::Undetermined { reason } = &r.classification {
        rows.push(vec!["reason".into(), reason.clone()]);
    }
    for n in &r.notes {
        rows.push(vec!["note".into(), n.clone()]);
    }
    rows
}

#[derive(Serialize)]
struct PointReport {
    z: C,
    p: Mat3<f64>,
    p_twisted: Mat3<f64>,
    det_twisted_numeric: C,
    det_twisted_closed_form: Option<C>,
    det_mismatch: Option<f64>,
    max_minor_mismatch: Option<f64>,
    numeric_vs_closed_form: Option<f64>,
    /// `|P(qz) - P(z)| / |P(z)|`.
    ellipticity: f64,
}

fn connection_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let ctx = cfg.context()?;
    let p = cfg.params(&ctx)?;
    let conn = Connection::new(&p, &ctx)?;
    let mut stderr = Vec::new();
    let mut points = Vec::new();
    if cfg.z.is_empty() {
        stderr.push("no evaluation points given (use --z)".into());
    }
    for &z in &cfg.z {
        let v = in_q_spiral(z, &ctx)?;
        if v.member {
            stderr.push(format!("skipping z = {}: on q^Z (k = {})", complex(z), v.nearest_k));
            continue;
        }
        let e = conn.eval(z, Method::Both).with_context(|| format!("evaluating at z = {}", complex(z)))?;
        let pn = conn.numeric(z)?;
        // det_formula is normalized to twist(P) / z
        let det_num = conn.twist(&pn, z)?.det() / (z * z * z);
        let (det_cf, minors) = if conn.logarithmic() {
            (None, None)
        } else {
            (Some(det_formula(&p, z, &ctx)?), Some(minor_mismatch(&p, z, &ctx)?))
        };
        let pq = conn.closed_form(ctx.q * z)?;
        points.push(PointReport {
            z,
            p: e.p,
            p_twisted: e.p_twisted,
            det_twisted_numeric: det_num,
            det_twisted_closed_form: det_cf,
            det_mismatch: det_cf.map(|f| (det_num - f).norm() / f.norm()),
            max_minor_mismatch: minors,
            numeric_vs_closed_form: e.residual_cross,
            ellipticity: (pq - e.p).norm() / e.p.norm(),
        });
    }
    let stdout = match cfg.format {
        Format::Json => to_json(&points)?,
        Format::Csv => {
            let mut header: Vec<String> = vec!["z".into()];
            for m in ["p", "pt"] {
                for i in 1..=3 {
                    for j in 1..=3 {
                        header.push(format!("{m}{i}{j}"));
                    }
                }
            }
            header.extend(
                ["det_pt_numeric", "det_pt_closed_form", "det_mismatch", "max_minor_mismatch", "numeric_vs_closed_form", "ellipticity"]
                    .map(String::from),
            );
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|r| {
                    let mut row = vec![complex(r.z)];
                    for m in [&r.p, &r.p_twisted] {
                        row.extend(m.m.iter().flatten().map(|c| complex(*c)));
                    }
                    row.push(complex(r.det_twisted_numeric));
                    row.push(r.det_twisted_closed_form.map(complex).unwrap_or_default());
                    row.push(opt(r.det_mismatch));
                    row.push(opt(r.max_minor_mismatch));
                    row.push(opt(r.numeric_vs_closed_form));
                    row.push(sig17(r.ellipticity));
                    row
                })
                .collect();
            let h: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_string(&h, &rows)?
        }
        Format::Text => {
            let mut s = String::new();
            for r in &points {
                s += &format!("z = {}\n  P:\n{}\n", complex(r.z), matrix_rows(&r.p));
                s += &format!("  twisted P:\n{}\n", matrix_rows(&r.p_twisted));
                s += &format!("  det twisted (numeric)      {}\n", complex(r.det_twisted_numeric));
                if let Some(d) = r.det_twisted_closed_form {
                    s += &format!("  det twisted (closed form)  {}\n", complex(d));
                    s += &format!("  det mismatch               {}\n", opt(r.det_mismatch));
                }
                s += &format!("  max minor mismatch         {}\n", opt(r.max_minor_mismatch));
                s += &format!("  numeric vs closed form     {}\n", opt(r.numeric_vs_closed_form));
                s += &format!("  ellipticity |P(qz)-P(z)|   {}\n", sig17(r.ellipticity));
            }
            s
        }
    };
    Ok(Outcome { stdout, stderr, code: 0 })
}

fn verify_cmd(cfg: &RunConfig, suite: Suite) -> Result<Outcome> {
    let results = verify::run(suite, cfg)?;
    let all = results.iter().all(|r| r.pass);
    let stdout = match cfg.format {
        Format::Json => to_json(&results)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(|c| {
                        vec![r.suite.clone(), c.name.clone(), sig17(c.residual), sig17(c.tolerance), pass_word(c.pass).into()]
                    })
                })
                .collect();
            csv_string(&["suite", "check", "residual", "tolerance", "result"], &rows)?
        }
        Format::Text => verify_text(&results),
    };
    Ok(Outcome { stdout, stderr: Vec::new(), code: if all { 0 } else { 1 } })
}

fn pass_word(p: bool) -> &'static str {
    if p {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify_text(results: &[SuiteResult]) -> String {
    let mut s = String::new();
    for r in results {
        let parts: Vec<String> = r.checks.iter().map(|c| format!("{} {:.3e} (< {:.0e})", c.name, c.residual, c.tolerance)).collect();
        s += &format!("{:<11}{}  n={}  {}\n", r.suite, pass_word(r.pass), r.samples, parts.join(", "));
    }
    s
}

/// Parses `args`, runs, writes the output; returns the process exit status.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli) {
        Ok(o) => {
            for line in &o.stderr {
                let _ = writeln!(err, "{line}");
            }
            let _ = out.write_all(o.stdout.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
