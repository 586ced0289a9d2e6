//! Run configuration: parameter literals, config files and environment overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64 as C;
use qgalois::galois::SampleOptions;
use qgalois::{HyperParams, QContext, Real};
use serde::{Deserialize, Serialize};

/// Environment variable overriding the built-in tolerances.
pub const EPS_ENV: &str = "QGALOIS_EPS";

pub const DEFAULT_Q: f64 = 0.5;
pub const DEFAULT_A: [&str; 3] = ["q^0.1", "q^0.2", "q^0.4"];
pub const DEFAULT_B: [&str; 3] = ["q", "q^0.15", "q^0.33"];
pub const DEFAULT_EPS_TRUNC: f64 = <f64 as Real>::EPS_TRUNC;
pub const DEFAULT_EPS_SPIRAL: f64 = <f64 as Real>::EPS_SPIRAL;
pub const DEFAULT_SEED: u64 = 1;

/// A complex number, written `x`, `x+yi`, `x-yi`, `yi` or `(x,y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub C);

impl FromStr for Cx {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            bail!("empty complex literal");
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            return pair(inner).map(Cx);
        }
        if t.contains(',') {
            return pair(&t).map(Cx);
        }
        if let Ok(x) = t.parse::<f64>() {
            return finite(C::new(x, 0.0)).map(Cx);
        }
        let body = t.strip_suffix('i').or_else(|| t.strip_suffix('j')).ok_or_else(|| anyhow!("bad complex literal `{s}`"))?;
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let cut = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match cut {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re: f64 = re.parse().map_err(|_| anyhow!("bad real part in `{s}`"))?;
        let im: f64 = im.parse().map_err(|_| anyhow!("bad imaginary part in `{s}`"))?;
        finite(C::new(re, im)).map(Cx)
    }
}

fn pair(s: &str) -> Result<C> {
    let (re, im) = s.split_once(',').ok_or_else(|| anyhow!("expected `re,im`, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|_| anyhow!("bad real part `{re}`"))?;
    let im: f64 = im.trim().parse().map_err(|_| anyhow!("bad imaginary part `{im}`"))?;
    finite(C::new(re, im))
}

fn finite(c: C) -> Result<C> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        bail!("non-finite value")
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{}", self.0.re)
        } else {
            write!(f, "({},{})", self.0.re, self.0.im)
        }
    }
}

/// One parameter: a complex literal or `c*q^alpha` (`q`, `q^alpha`, `c*q`, `-q^alpha`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Literal(C),
    Power { coef: C, alpha: f64 },
}

impl Param {
    pub fn value(&self, ctx: &QContext<f64>) -> C {
        match *self {
            Param::Literal(c) => c,
            Param::Power { coef, alpha } => coef * ctx.powr(alpha),
        }
    }
}

impl FromStr for Param {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = t.rfind('q') else {
            return Ok(Param::Literal(t.parse::<Cx>()?.0));
        };
        let (head, tail) = (&t[..pos], &t[pos + 1..]);
        let coef = match head {
            "" | "+" => C::new(1.0, 0.0),
            "-" => C::new(-1.0, 0.0),
            h => h.strip_suffix('*').ok_or_else(|| anyhow!("expected `c*q^alpha`, got `{s}`"))?.parse::<Cx>()?.0,
        };
        let alpha = match tail {
            "" => 1.0,
            x => {
                let e = x.strip_prefix('^').ok_or_else(|| anyhow!("expected `q^alpha`, got `{s}`"))?;
                let e = e.strip_prefix('(').and_then(|y| y.strip_suffix(')')).unwrap_or(e);
                e.parse::<f64>().map_err(|_| anyhow!("bad exponent in `{s}`"))?
            }
        };
        if !alpha.is_finite() || coef.norm() == 0.0 {
            bail!("degenerate parameter `{s}`");
        }
        Ok(Param::Power { coef, alpha })
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Param::Literal(c) => write!(f, "{}", Cx(c)),
            Param::Power { coef, alpha } => {
                if coef != C::new(1.0, 0.0) {
                    write!(f, "{}*", Cx(coef))?;
                }
                write!(f, "q^{alpha}")
            }
        }
    }
}

/// Splits on commas outside parentheses.
pub fn split_list(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out.into_iter().map(|x| x.trim().to_string()).collect()
}

pub fn parse_triple(s: &str) -> Result<[Param; 3]> {
    let items = split_list(s);
    if items.len() != 3 {
        bail!("expected three comma-separated parameters, got {} in `{s}`", items.len());
    }
    Ok([items[0].parse()?, items[1].parse()?, items[2].parse()?])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        })
    }
}

/// A list in a config file: one string with commas, or an array of strings.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Joined(String),
    Items(Vec<String>),
}

impl ListValue {
    fn items(&self) -> Vec<String> {
        match self {
            ListValue::Joined(s) => split_list(s),
            ListValue::Items(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum QValue {
    Real(f64),
    Text(String),
}

/// Keys accepted in a TOML config file; all optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub q: Option<QValue>,
    pub a: Option<ListValue>,
    pub b: Option<ListValue>,
    pub eps_trunc: Option<f64>,
    pub eps_spiral: Option<f64>,
    pub scan_points: Option<usize>,
    pub per_circle: Option<usize>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub z: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Command-line values before merging; `None` means not given.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub q: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub eps_trunc: Option<f64>,
    pub eps_spiral: Option<f64>,
    pub scan_points: Option<usize>,
    pub per_circle: Option<usize>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub z: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub q: C,
    pub a: [Param; 3],
    pub b: [Param; 3],
    pub eps_trunc: f64,
    pub eps_spiral: f64,
    pub scan_points: usize,
    pub per_circle: usize,
    pub format: Format,
    pub seed: u64,
    pub z: Vec<C>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = |s: &str| s.parse::<Param>().unwrap();
        let o = SampleOptions::default();
        Self {
            q: C::new(DEFAULT_Q, 0.0),
            a: DEFAULT_A.map(p),
            b: DEFAULT_B.map(p),
            eps_trunc: DEFAULT_EPS_TRUNC,
            eps_spiral: DEFAULT_EPS_SPIRAL,
            scan_points: o.scan_points,
            per_circle: o.per_circle,
            format: Format::Json,
            seed: DEFAULT_SEED,
            z: Vec::new(),
        }
    }
}

/// `QGALOIS_EPS`: one number for both tolerances, or `trunc=..,spiral=..`.
pub fn parse_eps_env(s: &str) -> Result<(Option<f64>, Option<f64>)> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok((Some(x), Some(x)));
    }
    let (mut t, mut p) = (None, None);
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| anyhow!("bad {EPS_ENV} entry `{part}`"))?;
        let v: f64 = v.trim().parse().map_err(|_| anyhow!("bad {EPS_ENV} value `{v}`"))?;
        match k.trim() {
            "trunc" | "eps_trunc" => t = Some(v),
            "spiral" | "eps_spiral" => p = Some(v),
            other => bail!("unknown {EPS_ENV} key `{other}`"),
        }
    }
    Ok((t, p))
}

fn parse_q(s: &str) -> Result<C> {
    Ok(s.parse::<Cx>().with_context(|| format!("parsing q = `{s}`"))?.0)
}

impl RunConfig {
    /// Precedence: command line, then config file, then `QGALOIS_EPS` (tolerances only), then defaults.
    pub fn resolve(cli: &Overrides, file: Option<&FileConfig>, env_eps: Option<&str>) -> Result<Self> {
        let mut c = RunConfig::default();
        if let Some(e) = env_eps {
            let (t, p) = parse_eps_env(e)?;
            c.eps_trunc = t.unwrap_or(c.eps_trunc);
            c.eps_spiral = p.unwrap_or(c.eps_spiral);
        }
        if let Some(f) = file {
            if let Some(q) = &f.q {
                c.q = match q {
                    QValue::Real(x) => C::new(*x, 0.0),
                    QValue::Text(s) => parse_q(s)?,
                };
            }
            if let Some(a) = &f.a {
                c.a = parse_triple(&a.items().join(","))?;
            }
            if let Some(b) = &f.b {
                c.b = parse_triple(&b.items().join(","))?;
            }
            c.eps_trunc = f.eps_trunc.unwrap_or(c.eps_trunc);
            c.eps_spiral = f.eps_spiral.unwrap_or(c.eps_spiral);
            c.scan_points = f.scan_points.unwrap_or(c.scan_points);
            c.per_circle = f.per_circle.unwrap_or(c.per_circle);
            c.format = f.format.unwrap_or(c.format);
            c.seed = f.seed.unwrap_or(c.seed);
            if let Some(z) = &f.z {
                c.z = z.iter().map(|s| s.parse::<Cx>().map(|x| x.0)).collect::<Result<_>>()?;
            }
        }
        if let Some(q) = &cli.q {
            c.q = parse_q(q)?;
        }
        if let Some(a) = &cli.a {
            c.a = parse_triple(a)?;
        }
        if let Some(b) = &cli.b {
            c.b = parse_triple(b)?;
        }
        c.eps_trunc = cli.eps_trunc.unwrap_or(c.eps_trunc);
        c.eps_spiral = cli.eps_spiral.unwrap_or(c.eps_spiral);
        c.scan_points = cli.scan_points.unwrap_or(c.scan_points);
        c.per_circle = cli.per_circle.unwrap_or(c.per_circle);
        c.format = cli.format.unwrap_or(c.format);
        c.seed = cli.seed.unwrap_or(c.seed);
        if !cli.z.is_empty() {
            c.z = cli.z.iter().map(|s| s.parse::<Cx>().map(|x| x.0)).collect::<Result<_>>()?;
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let m = self.q.norm();
        if !(m > 0.0 && m < 1.0) {
            bail!("|q| must lie in (0, 1), got {m}");
        }
        if !(self.eps_trunc > 0.0 && self.eps_spiral > 0.0) {
            bail!("tolerances must be positive");
        }
        if self.per_circle == 0 {
            bail!("per_circle must be positive");
        }
        Ok(())
    }

    pub fn context(&self) -> Result<QContext<f64>> {
        Ok(QContext::new(self.q)?.with_eps(self.eps_trunc, self.eps_spiral)?)
    }

    /// Parameters with `b1` checked against `q`.
    pub fn params(&self, ctx: &QContext<f64>) -> Result<HyperParams<f64>> {
        let a = self.a.map(|p| p.value(ctx));
        let b = self.b.map(|p| p.value(ctx));
        let d = (b[0] - ctx.q).norm() / ctx.q.norm();
        if d > 1e-12 {
            bail!("b1 must equal q (got {})", Cx(b[0]));
        }
        Ok(HyperParams::new(a, b[1], b[2], ctx)?)
    }

    pub fn samples(&self) -> SampleOptions {
        SampleOptions { scan_points: self.scan_points, per_circle: self.per_circle, ..SampleOptions::default() }
    }

    /// The configuration as TOML with the same keys the loader reads.
    pub fn to_toml(&self) -> String {
        let list = |p: &[Param; 3]| p.iter().map(|x| format!("\"{x}\"")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        s += &format!("q = \"{}\"\n", Cx(self.q));
        s += &format!("a = [{}]\n", list(&self.a));
        s += &format!("b = [{}]\n", list(&self.b));
        s += &format!("eps_trunc = {:e}\n", self.eps_trunc);
        s += &format!("eps_spiral = {:e}\n", self.eps_spiral);
        s += &format!("scan_points = {}\n", self.scan_points);
        s += &format!("per_circle = {}\n", self.per_circle);
        s += &format!("format = \"{}\"\n", self.format);
        s += &format!("seed = {}\n", self.seed);
        let z: Vec<String> = self.z.iter().map(|z| format!("\"{}\"", Cx(*z))).collect();
        s += &format!("z = [{}]\n", z.join(", "));
        s
    }
}
