//! Self-check suites on seeded random inputs.

use anyhow::{anyhow, Result};
use clap::ValueEnum;
use num_complex::Complex64 as C;
use qgalois::connection::{det_formula, minor_formula, twisted_closed_form, Connection};
use qgalois::galois::sample_omega;
use qgalois::hypersystem::{LocalData, Side};
use qgalois::mat3::{minor2, psl2_eigenvalue_check, psl2_relation_residual, rho, Mat2};
use qgalois::qseries::{lq, qcharacter, theta, theta_triple_product};
use qgalois::{HyperParams, Ladder, QContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Theta,
    Characters,
    Gauge,
    Bmw,
    Detminors,
    Psl2,
    All,
}

impl Suite {
    const EACH: [Suite; 6] = [Suite::Theta, Suite::Characters, Suite::Gauge, Suite::Bmw, Suite::Detminors, Suite::Psl2];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Characters => "characters",
            Suite::Gauge => "gauge",
            Suite::Bmw => "bmw",
            Suite::Detminors => "detminors",
            Suite::Psl2 => "psl2",
            Suite::All => "all",
        }
    }

    pub fn expand(&self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![*s],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub pass: bool,
    pub samples: usize,
    pub checks: Vec<Check>,
}

fn check(name: &str, residual: f64, tolerance: f64) -> Check {
    Check { name: name.into(), residual, tolerance, pass: residual < tolerance }
}

fn finish(suite: Suite, samples: usize, checks: Vec<Check>) -> SuiteResult {
    SuiteResult { suite: suite.name().into(), pass: checks.iter().all(|c| c.pass), samples, checks }
}

fn frac_dist(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

fn point(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> C {
    let r = rng.gen_range(rmin.ln()..rmax.ln()).exp();
    C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Exponents with every difference that matters kept away from the integers.
fn generic_exponents(rng: &mut ChaCha8Rng) -> ([f64; 3], f64, f64) {
    let sep = 0.06;
    loop {
        let al = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let (b2, b3) = (rng.gen_range(0.02..1.0), rng.gen_range(0.02..1.0));
        let bs = [1.0, b2, b3];
        let mut ok = frac_dist(al.iter().sum::<f64>() - b2 - b3) > sep;
        for i in 0..3 {
            for j in i + 1..3 {
                ok &= frac_dist(al[i] - al[j]) > sep && frac_dist(bs[i] - bs[j]) > sep;
            }
            ok &= bs.iter().all(|b| frac_dist(al[i] - b) > sep);
        }
        if ok {
            return (al, b2, b3);
        }
    }
}

fn generic_sets(rng: &mut ChaCha8Rng, n: usize, ctx: &QContext<f64>) -> Result<Vec<HyperParams<f64>>> {
    (0..n)
        .map(|_| {
            let (al, b2, b3) = generic_exponents(rng);
            Ok(HyperParams::from_exponents(al, b2, b3, ctx)?)
        })
        .collect()
}

fn annulus(conn: &Connection<f64>, n: usize) -> Result<Vec<C>> {
    let opts = qgalois::galois::SampleOptions { scan_points: 0, per_circle: n.div_ceil(2), radii: [0.4, 0.6] };
    let mut z = sample_omega(conn, &opts)?;
    z.truncate(n);
    Ok(z)
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn theta_suite(ctx: &QContext<f64>, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let n = 1000;
    let (mut fe, mut tp) = (0f64, 0f64);
    for _ in 0..n {
        let z = point(rng, 0.05, 20.0);
        let t = theta(z, ctx)?;
        fe = fe.max(rel(theta(ctx.q * z, ctx)?, -t / z));
        tp = tp.max(rel(t, theta_triple_product(z, ctx)?));
    }
    Ok(finish(Suite::Theta, n, vec![check("functional_equation", fe, 1e-10), check("triple_product", tp, 1e-10)]))
}

fn characters_suite(ctx: &QContext<f64>, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let n = 1000;
    let (mut e1, mut e2, mut e3) = (0f64, 0f64, 0f64);
    let mut done = 0;
    let mut tries = 0;
    while done < n {
        tries += 1;
        if tries > 20 * n {
            return Err(anyhow!("too many sample points on q-spirals"));
        }
        let l = point(rng, 0.1, 3.0);
        let z = point(rng, 0.1, 10.0);
        let (Ok(base), Ok(a), Ok(b), Ok(c), Ok(d)) = (
            qcharacter(l, z, ctx),
            qcharacter(ctx.q * l, z, ctx),
            qcharacter(l, ctx.q * z, ctx),
            lq(z, ctx),
            lq(ctx.q * z, ctx),
        ) else {
            continue;
        };
        e1 = e1.max(rel(a, z * base));
        e2 = e2.max(rel(b, l * base));
        e3 = e3.max((d - c - 1.0).norm() / (1.0 + d.norm()));
        done += 1;
    }
    Ok(finish(
        Suite::Characters,
        n,
        vec![check("shift_lambda", e1, 1e-10), check("shift_z", e2, 1e-10), check("ell_q", e3, 1e-10)],
    ))
}

fn gauge_suite(ctx: &QContext<f64>, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let sets = generic_sets(rng, 3, ctx)?;
    let (mut r0, mut ri) = (0f64, 0f64);
    let per = 10;
    for p in &sets {
        let l0 = LocalData::new(p, Side::Zero, Ladder::default(), ctx)?;
        let li = LocalData::new(p, Side::Infinity, Ladder::default(), ctx)?;
        for _ in 0..per {
            r0 = r0.max(l0.gauge_residual(point(rng, 0.02, 0.3))?);
            ri = ri.max(li.gauge_residual(point(rng, 10.0, 100.0))?);
        }
    }
    Ok(finish(Suite::Gauge, 2 * per * sets.len(), vec![check("gauge_zero", r0, 1e-8), check("gauge_infinity", ri, 1e-8)]))
}

fn bmw_suite(ctx: &QContext<f64>, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let sets = generic_sets(rng, 3, ctx)?;
    let mut worst = 0f64;
    let mut n = 0;
    for p in &sets {
        let conn = Connection::new(p, ctx)?;
        for z in annulus(&conn, 10)? {
            worst = worst.max(conn.numeric(z)?.entrywise_rel_err(&conn.closed_form(z)?, 1e-12));
            n += 1;
        }
    }
    Ok(finish(Suite::Bmw, n, vec![check("numeric_vs_closed_form", worst, 1e-6)]))
}

fn detminors_suite(ctx: &QContext<f64>, rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let pairs = [(1, 2), (1, 3), (2, 3)];
    let sets = generic_sets(rng, 3, ctx)?;
    let (mut det, mut minors) = (0f64, 0f64);
    let mut n = 0;
    for p in &sets {
        let conn = Connection::new(p, ctx)?;
        for z in annulus(&conn, 10)? {
            let d = twisted_closed_form(p, z, ctx)?;
            let f = det_formula(p, z, ctx)?;
            det = det.max((d.det() - f).norm() / f.norm());
            for r in pairs {
                for c in pairs {
                    let k = minor_formula(p, r, c, z, ctx)?;
                    minors = minors.max((minor2(&d, r, c)? - k).norm() / k.norm());
                }
            }
            n += 1;
        }
    }
    Ok(finish(Suite::Detminors, n, vec![check("determinant", det, 1e-8), check("minors", minors, 1e-8)]))
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    loop {
        let mut g = || C::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (a, b, c) = (g(), g(), g());
        if a.norm() >= 0.2 {
            return Mat2::new(a, b, c, (C::new(1.0, 0.0) + b * c) / a);
        }
    }
}

fn psl2_suite(rng: &mut ChaCha8Rng) -> Result<SuiteResult> {
    let n = 1000;
    let (mut hom, mut relr) = (0f64, 0f64);
    let mut bad = 0usize;
    for _ in 0..n {
        let (a, b) = (random_sl2(rng), random_sl2(rng));
        let ra = rho(&a)?;
        hom = hom.max(rho(&(a * b))?.rel_err(&(ra * rho(&b)?)));
        relr = relr.max(psl2_relation_residual(&ra));
        bad += usize::from(!psl2_eigenvalue_check(&ra));
    }
    Ok(finish(
        Suite::Psl2,
        n,
        vec![
            check("homomorphism", hom, 1e-10),
            check("relation", relr, 1e-10),
            check("eigenvalue_failures", bad as f64, 0.5),
        ],
    ))
}

/// Runs the suites in order; each gets its own stream derived from the seed.
pub fn run(suite: Suite, cfg: &RunConfig) -> Result<Vec<SuiteResult>> {
    let ctx = cfg.context()?;
    suite
        .expand()
        .into_iter()
        .map(|s| {
            let idx = Suite::EACH.iter().position(|x| *x == s).unwrap() as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(idx);
            match s {
                Suite::Theta => theta_suite(&ctx, &mut rng),
                Suite::Characters => characters_suite(&ctx, &mut rng),
                Suite::Gauge => gauge_suite(&ctx, &mut rng),
                Suite::Bmw => bmw_suite(&ctx, &mut rng),
                Suite::Detminors => detminors_suite(&ctx, &mut rng),
                Suite::Psl2 => psl2_suite(&mut rng),
                Suite::All => unreachable!(),
            }
        })
        .collect()
}
