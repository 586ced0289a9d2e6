//! Acceptance suite: one line per criterion, nonzero exit status on any failure.

use std::time::Instant;

use num_complex::Complex;
use qgalois::connection::{
    det_formula, det_zero_spiral, locate_det_zero, minor_formula, twisted_closed_form, Connection,
};
use qgalois::galois::{
    classify, irreducibility, normalize_parameters, obstruction_witness, pgl2_obstruction_for,
    pgl2_residual_from_matrices, sample_omega, twisted_at, zero_adjacent_samples, Classification, SampleOptions,
};
use qgalois::hypersystem::{local_solution_infinity_log, local_solution_zero_log, HyperParams, LocalData, Side};
use qgalois::mat3::{minor2, psl2_eigenvalue_check, psl2_relation_residual, rho, Mat2, Mat3};
use qgalois::qseries::{lq, qcharacter, theta, theta_triple_product, QContext};
use qgalois::spiral::in_q_spiral;
use qgalois::Ladder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;
type Ctx = QContext<f64>;
type P = HyperParams<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn frac_dist(x: f64) -> f64 {
    let f = x - x.floor();
    f.min(1.0 - f)
}

fn random_point(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> C {
    let r = (rng.gen_range(rmin.ln()..rmax.ln())).exp();
    C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Generic q-real exponents: a-exponents pairwise apart mod 1, b-exponents apart
/// from each other and from 0 mod 1, and every alpha_i - beta_j apart from 0 mod 1.
fn random_generic(rng: &mut ChaCha8Rng, sum_integer: Option<bool>) -> ([f64; 3], f64, f64) {
    loop {
        let al = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let b2 = rng.gen_range(0.02..1.0);
        let mut b3 = rng.gen_range(0.02..1.0);
        if let Some(true) = sum_integer {
            let s: f64 = al.iter().sum::<f64>() - b2;
            b3 = s - s.floor();
            if b3 < 0.02 {
                continue;
            }
        }
        let bs = [1.0, b2, b3];
        let sep = 0.06;
        let mut ok = true;
        for i in 0..3 {
            for j in i + 1..3 {
                ok &= frac_dist(al[i] - al[j]) > sep && frac_dist(bs[i] - bs[j]) > sep;
            }
            for b in bs {
                ok &= frac_dist(al[i] - b) > sep;
            }
        }
        let s = al.iter().sum::<f64>() - b2 - b3;
        if let Some(false) = sum_integer {
            ok &= frac_dist(s) > sep;
        }
        if ok {
            return (al, b2, b3);
        }
    }
}

fn params(e: ([f64; 3], f64, f64), ctx: &Ctx) -> P {
    HyperParams::from_exponents(e.0, e.1, e.2, ctx).unwrap()
}

fn annulus_points(conn: &Connection<f64>, n: usize) -> Vec<C> {
    let opts = SampleOptions { scan_points: 0, per_circle: n.div_ceil(2), radii: [0.4, 0.6] };
    let mut pts = sample_omega(conn, &opts).unwrap();
    pts.truncate(n);
    pts
}

fn c1_theta(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let t = Instant::now();
    let mut fe = 0f64;
    let mut tp = 0f64;
    for _ in 0..1000 {
        let z = random_point(rng, 0.05, 20.0);
        let th = theta(z, ctx).unwrap();
        let thq = theta(ctx.q * z, ctx).unwrap();
        fe = fe.max((thq + th / z).norm() / thq.norm().max((th / z).norm()));
        let t3 = theta_triple_product(z, ctx).unwrap();
        tp = tp.max((th - t3).norm() / th.norm().max(t3.norm()));
    }
    let el = t.elapsed().as_secs_f64();
    outcome(fe < 1e-10 && tp < 1e-10 && el < 1.0, format!("functional eq {fe:.2e}, triple product {tp:.2e}, {el:.3}s"))
}

fn c2_characters(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let mut e1 = 0f64;
    let mut e2 = 0f64;
    let mut e3 = 0f64;
    let mut n = 0;
    while n < 1000 {
        let l = random_point(rng, 0.1, 3.0);
        let z = random_point(rng, 0.1, 10.0);
        let Ok(base) = qcharacter(l, z, ctx) else { continue };
        let (Ok(a), Ok(b), Ok(c)) = (qcharacter(ctx.q * l, z, ctx), qcharacter(l, ctx.q * z, ctx), lq(z, ctx)) else {
            continue;
        };
        let lqz = lq(ctx.q * z, ctx).unwrap();
        e1 = e1.max((a - z * base).norm() / a.norm().max((z * base).norm()));
        e2 = e2.max((b - l * base).norm() / b.norm().max((l * base).norm()));
        e3 = e3.max((lqz - c - 1.0).norm() / (1.0 + lqz.norm()));
        n += 1;
    }
    outcome(e1 < 1e-10 && e2 < 1e-10 && e3 < 1e-10, format!("e_(q lambda) {e1:.2e}, e_lambda(qz) {e2:.2e}, ell_q {e3:.2e}"))
}

fn c3_gauge(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let t = Instant::now();
    let mut r0 = 0f64;
    let mut ri = 0f64;
    for _ in 0..5 {
        let p = params(random_generic(rng, None), ctx);
        let l0 = LocalData::new(&p, Side::Zero, Ladder::default(), ctx).unwrap();
        let li = LocalData::new(&p, Side::Infinity, Ladder::default(), ctx).unwrap();
        for _ in 0..20 {
            r0 = r0.max(l0.gauge_residual(random_point(rng, 0.02, 0.3)).unwrap());
            ri = ri.max(li.gauge_residual(random_point(rng, 10.0, 100.0)).unwrap());
        }
    }
    let el = t.elapsed().as_secs_f64();
    outcome(r0 < 1e-8 && ri < 1e-8 && el < 10.0, format!("at 0 {r0:.2e}, at inf {ri:.2e}, {el:.2}s"))
}

fn case_one_sets(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Vec<P> {
    (0..5).map(|_| params(random_generic(rng, None), ctx)).collect()
}

fn c4_bmw(sets: &[P], ctx: &Ctx) -> Outcome {
    let t = Instant::now();
    let mut worst = 0f64;
    let mut n = 0;
    for p in sets {
        let conn = Connection::new(p, ctx).unwrap();
        for z in annulus_points(&conn, 10) {
            let num = conn.numeric(z).unwrap();
            let cf = conn.closed_form(z).unwrap();
            worst = worst.max(num.entrywise_rel_err(&cf, 1e-12));
            n += 1;
        }
    }
    let el = t.elapsed().as_secs_f64();
    outcome(worst < 1e-6 && n == 50 && el < 30.0, format!("max entrywise rel err {worst:.2e} over {n} points, {el:.2}s"))
}

fn c5_det(sets: &[P], ctx: &Ctx) -> Outcome {
    let mut worst = 0f64;
    let mut loc = 0f64;
    for p in sets {
        let conn = Connection::new(p, ctx).unwrap();
        for z in annulus_points(&conn, 10) {
            let d = twisted_closed_form(p, z, ctx).unwrap().det();
            let f = det_formula(p, z, ctx).unwrap();
            worst = worst.max((d - f).norm() / f.norm());
        }
        let s = det_zero_spiral(p, ctx);
        let k = ((0.5 * ctx.q.norm().ln() - s.norm().ln()) / ctx.q.norm().ln()).round() as i32;
        let guess = s * ctx.powi(k) * C::new(1.03, 0.02);
        let z = locate_det_zero(&conn, guess).unwrap();
        loc = loc.max(in_q_spiral(z / s, ctx).unwrap().distance);
    }
    outcome(worst < 1e-8 && loc < 1e-6, format!("det rel err {worst:.2e}, zero distance to spiral {loc:.2e}"))
}

fn c6_minors(sets: &[P], ctx: &Ctx) -> Outcome {
    let pairs = [(1, 2), (1, 3), (2, 3)];
    let mut worst = 0f64;
    let mut lap = 0f64;
    for p in sets {
        let conn = Connection::new(p, ctx).unwrap();
        for z in annulus_points(&conn, 10) {
            let d = twisted_closed_form(p, z, ctx).unwrap();
            for r in pairs {
                for c in pairs {
                    let k = minor_formula(p, r, c, z, ctx).unwrap();
                    worst = worst.max((minor2(&d, r, c).unwrap() - k).norm() / k.norm());
                }
            }
            let rows = [(2, 3), (1, 3), (1, 2)];
            let mut e = C::new(0.0, 0.0);
            for (i, r) in rows.iter().enumerate() {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                e += d.m[i][0] * minor_formula(p, *r, (2, 3), z, ctx).unwrap() * s;
            }
            let f = det_formula(p, z, ctx).unwrap();
            lap = lap.max((e - f).norm() / f.norm());
        }
    }
    outcome(worst < 1e-8 && lap < 1e-8, format!("minor rel err {worst:.2e}, Laplace vs det {lap:.2e}"))
}

fn c7_log(ctx: &Ctx) -> Outcome {
    let mut res = 0f64;
    let mut order = f64::INFINITY;
    let mut jok = true;
    let jq = Mat3::from_real_rows([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
    let p3 = HyperParams::from_exponents([0.1, 0.2, 0.4], 1.0, 1.0, ctx).unwrap();
    let p4 = HyperParams::from_exponents([0.3, 0.3, 0.3], 1.0, 1.0, ctx).unwrap();
    let a = p4.a[0];
    let jinf = Mat3::from_rows([
        [a.inv(), C::new(1.0, 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), a.inv(), C::new(1.0, 0.0)],
        [C::new(0.0, 0.0), C::new(0.0, 0.0), a.inv()],
    ]);
    let l3 = local_solution_zero_log(&p3, Ladder::default(), ctx).unwrap();
    let l4 = local_solution_infinity_log(&p4, Ladder::default(), ctx).unwrap();
    jok &= l3.j == jq && l4.j.rel_err(&jinf) < 1e-15;
    let inside0 = [C::new(0.2, 0.05), C::new(-0.15, 0.2), C::new(0.05, -0.25), C::new(0.3, 0.1)];
    let outside = [C::new(0.9, -0.6), C::new(-1.7, 0.4), C::new(0.5, 0.5)];
    for (l, side) in [(&l3, Side::Zero), (&l4, Side::Infinity)] {
        let inside: Vec<C> = match side {
            Side::Zero => inside0.to_vec(),
            Side::Infinity => inside0.iter().map(|z| z.inv() * l.radius).collect(),
        };
        for z in inside {
            let (_, ex) = l.gauge_direct_report(z).unwrap();
            order = order.min(ex.unwrap().observed_order.unwrap());
            res = res.max(l.gauge_residual_direct(z).unwrap());
        }
        for z in outside {
            res = res.max(l.gauge_residual(z).unwrap());
        }
    }
    outcome(jok && res < 1e-6 && order >= 1.0, format!("gauge residual {res:.2e}, min observed order {order:.3}, J as displayed: {jok}"))
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    loop {
        let mut g = || C::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (a, b, c) = (g(), g(), g());
        if a.norm() < 0.2 {
            continue;
        }
        let d = (C::new(1.0, 0.0) + b * c) / a;
        return Mat2::new(a, b, c, d);
    }
}

fn c8_rho(rng: &mut ChaCha8Rng) -> Outcome {
    let mut hom = 0f64;
    let mut rel = 0f64;
    let mut eig = 0usize;
    for _ in 0..1000 {
        let (n1, n2) = (random_sl2(rng), random_sl2(rng));
        let r1 = rho(&n1).unwrap();
        let r2 = rho(&n2).unwrap();
        let r12 = rho(&(n1 * n2)).unwrap();
        hom = hom.max(r12.rel_err(&(r1 * r2)));
        rel = rel.max(psl2_relation_residual(&r1));
        if psl2_eigenvalue_check(&r1) {
            eig += 1;
        }
    }
    outcome(hom < 1e-10 && rel < 1e-10 && eig == 1000, format!("homomorphism {hom:.2e}, relation {rel:.2e}, eigenvalue structure {eig}/1000"))
}

fn c9_obstruction(sets: &[P], ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let mut synth = 0f64;
    for _ in 0..5 {
        let (m0, m1) = (random_sl2(rng), random_sl2(rng));
        let ms: Vec<Mat3<f64>> = (0..12)
            .map(|k| {
                let t = k as f64 / 11.0;
                let n = Mat2::new(C::new(1.0, 0.0), C::new(t, 0.3 * t), C::new(0.0, 0.0), C::new(1.0, 0.0));
                rho(&(m0 * n * m1)).unwrap()
            })
            .collect();
        synth = synth.max(pgl2_residual_from_matrices(&ms).unwrap().residual);
    }
    let mut low = f64::INFINITY;
    let mut sign = true;
    for p in sets {
        let conn = Connection::new(p, ctx).unwrap();
        let mut zs = sample_omega(&conn, &SampleOptions::default()).unwrap();
        zs.extend(zero_adjacent_samples(&conn).unwrap());
        low = low.min(pgl2_obstruction_for(&conn, &zs).unwrap().residual);
        let w = obstruction_witness(&conn).unwrap();
        let scale = zs
            .iter()
            .map(|&z| {
                let m = twisted_at(&conn, z).unwrap();
                (m.m[0][0] * m.m[0][2]).norm()
            })
            .fold(0f64, f64::max);
        sign &= w.lhs.norm() < 1e-10 * scale && w.rhs.norm() > 1e-3 * scale;
    }
    outcome(synth < 1e-8 && low > 0.1 && sign, format!("synthetic {synth:.2e}, case (i) min residual {low:.3}, zero-sign check {sign}"))
}

fn descriptor(c: &Classification<f64>) -> (String, Option<(i64, String)>) {
    match c {
        Classification::Sl3Extended { scalar_generators, .. } => {
            let s = scalar_generators[0];
            (c.label().into(), Some(((s.arg() * 1e6).round() as i64, format!("{:?}", c))))
        }
        _ => (c.label().into(), None),
    }
}

fn c10_classifier(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let mut matches = 0;
    let mut invariant = 0;
    for k in 0..20 {
        let integer = k < 10;
        let e = random_generic(rng, Some(integer));
        let p = params(e, ctx);
        let r = classify(&p, ctx).unwrap();
        let expect_gl3 = !integer;
        let got_gl3 = matches!(r.classification, Classification::Gl3);
        let got_ext = matches!(r.classification, Classification::Sl3Extended { .. });
        if (expect_gl3 && got_gl3) || (!expect_gl3 && got_ext) {
            matches += 1;
        }
        let shifts = [rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
        let ps = HyperParams::new(
            [p.a[0] * ctx.powi(shifts[0]), p.a[1] * ctx.powi(shifts[1]), p.a[2] * ctx.powi(shifts[2])],
            p.b[1] * ctx.powi(shifts[3]),
            p.b[2] * ctx.powi(shifts[4]),
            ctx,
        )
        .unwrap();
        let (np, _) = normalize_parameters(&ps, ctx).unwrap();
        let rs = classify(&ps, ctx).unwrap();
        let rn = classify(&np, ctx).unwrap();
        if descriptor(&rs.classification) == descriptor(&r.classification)
            && descriptor(&rn.classification) == descriptor(&r.classification)
            && rs.groups == r.groups
        {
            invariant += 1;
        }
    }
    outcome(matches == 20 && invariant == 20, format!("theorem condition matched {matches}/20, shift invariance {invariant}/20"))
}

fn c11_irreducibility(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let mut caught = 0;
    let mut generic = 0;
    for _ in 0..20 {
        let e = random_generic(rng, None);
        let p = params(e, ctx);
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        let k = rng.gen_range(-3..=3);
        let mut a = p.a;
        a[i] = p.b[j] * ctx.powi(k);
        let pr = HyperParams::new(a, p.b[1], p.b[2], ctx).unwrap();
        let v = irreducibility(&pr, ctx).unwrap();
        if !v.irreducible && v.witnesses.iter().any(|w| w.i == i + 1 && w.j == j + 1 && w.k == k as i64) {
            caught += 1;
        }
        if irreducibility(&p, ctx).unwrap().irreducible {
            generic += 1;
        }
    }
    outcome(caught == 20 && generic == 20, format!("reducible detected {caught}/20, generic irreducible {generic}/20"))
}

fn main() {
    let ctx = QContext::real(0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let sets = case_one_sets(&ctx, &mut rng);
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>)> = vec![
        ("theta identities", Box::new(|r: &mut ChaCha8Rng| c1_theta(&ctx, r))),
        ("q-character laws", Box::new(|r: &mut ChaCha8Rng| c2_characters(&ctx, r))),
        ("gauge identity", Box::new(|r: &mut ChaCha8Rng| c3_gauge(&ctx, r))),
        ("Barnes-Mellin-Watson", Box::new(|_: &mut ChaCha8Rng| c4_bmw(&sets, &ctx))),
        ("determinant identity", Box::new(|_: &mut ChaCha8Rng| c5_det(&sets, &ctx))),
        ("minor identity", Box::new(|_: &mut ChaCha8Rng| c6_minors(&sets, &ctx))),
        ("logarithmic degenerations", Box::new(|_: &mut ChaCha8Rng| c7_log(&ctx))),
        ("rho embedding", Box::new(|r: &mut ChaCha8Rng| c8_rho(r))),
        ("obstruction soundness", Box::new(|r: &mut ChaCha8Rng| c9_obstruction(&sets, &ctx, r))),
        ("main-theorem classifier", Box::new(|r: &mut ChaCha8Rng| c10_classifier(&ctx, r))),
        ("irreducibility criterion", Box::new(|r: &mut ChaCha8Rng| c11_irreducibility(&ctx, r))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let o = run(&mut rng);
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:2} {:<27} {}  {}", k + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
