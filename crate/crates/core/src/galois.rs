//! Irreducibility, parameter normalization, density-theorem generators, the
//! PSL2 obstruction and the Galois group classification.

use num_complex::Complex;
use serde::Serialize;

use crate::connection::{check_case_one, twisted_birkhoff, Connection};
use crate::error::{Error, Result};
use crate::hypersystem::{check_fuchsian_nonresonant, conjugated_diagonal, HyperParams};
use crate::mat3::Mat3;
use crate::qseries::QContext;
use crate::scalar::{one, two_pi_i, Real};
use crate::spiral::{decompose, gamma1, gamma2, in_q_spiral, SpiralVerdict};

/// A ratio `a_i / b_j` found on `q^Z` (1-based indices, `b_1 = q`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness<T: Real> {
    pub i: usize,
    pub j: usize,
    pub k: i64,
    pub distance: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrreducibilityVerdict<T: Real> {
    pub irreducible: bool,
    pub witnesses: Vec<Witness<T>>,
    /// Smallest measured distance of the six ratios to `q^Z`.
    pub min_distance: T,
}

pub fn irreducibility<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<IrreducibilityVerdict<T>> {
    let mut witnesses = Vec::new();
    let mut min_distance = T::infinity();
    for i in 0..3 {
        for j in 0..3 {
            let v = in_q_spiral(p.a[i] / p.b[j], ctx)?;
            min_distance = min_distance.min(v.distance);
            if v.member {
                witnesses.push(Witness { i: i + 1, j: j + 1, k: v.nearest_k, distance: v.distance });
            }
        }
    }
    Ok(IrreducibilityVerdict { irreducible: witnesses.is_empty(), witnesses, min_distance })
}

/// Integer q-power shifts applied by [`normalize_parameters`], and the reordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Shifts {
    /// `a'_i = a_{perm[i]} q^{a[perm[i]]}`.
    pub a: [i64; 3],
    /// `b'_j = b_j q^{b[j]}`; `b[0] = 0`.
    pub b: [i64; 3],
    pub a_perm: [usize; 3],
    pub b_swapped: bool,
}

impl Shifts {
    pub fn is_trivial(&self) -> bool {
        self.a == [0; 3] && self.b == [0; 3] && self.a_perm == [0, 1, 2] && !self.b_swapped
    }
}

fn snapped_omega<T: Real>(x: Complex<T>, ctx: &QContext<T>) -> Result<T> {
    let w = decompose(x, ctx)?.omega;
    let r = w.round();
    Ok(if (w - r).abs() < ctx.eps_spiral { r } else { w })
}

fn same<T: Real>(x: Complex<T>, y: Complex<T>, ctx: &QContext<T>) -> bool {
    (x - y).norm() < ctx.eps_spiral * y.norm()
}

/// Moves every `a_i` to the band `omega in [0, 1)` and `b2, b3` to `(0, 1]` by integer
/// q-powers, snaps parameters that then coincide within tolerance, and reorders so
/// that equal parameters are adjacent (`b2 = q` before `b3`).
pub fn normalize_parameters<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<(HyperParams<T>, Shifts)> {
    let mut a = p.a;
    let mut sa = [0i64; 3];
    for i in 0..3 {
        let n = snapped_omega(a[i], ctx)?.floor();
        let n = n.to_i64().unwrap();
        sa[i] = -n;
        a[i] = a[i] * ctx.powi(-n as i32);
    }
    let mut b = p.b;
    let mut sb = [0i64; 3];
    for j in 1..3 {
        let n = snapped_omega(b[j], ctx)?.ceil() - T::one();
        let n = n.to_i64().unwrap();
        sb[j] = -n;
        b[j] = b[j] * ctx.powi(-n as i32);
        if same(b[j], ctx.q, ctx) {
            b[j] = ctx.q;
        }
    }
    if same(b[2], b[1], ctx) {
        b[2] = b[1];
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if same(a[j], a[i], ctx) {
                a[j] = a[i];
            }
        }
    }
    let mut perm = [0usize, 1, 2];
    if a[0] == a[2] && a[0] != a[1] {
        perm = [0, 2, 1];
    } else if a[1] == a[2] && a[0] != a[1] {
        perm = [1, 2, 0];
    }
    let a = [a[perm[0]], a[perm[1]], a[perm[2]]];
    let b_swapped = b[2] == ctx.q && b[1] != ctx.q;
    if b_swapped {
        b.swap(1, 2);
        sb.swap(1, 2);
    }
    let out = HyperParams::new(a, b[1], b[2], ctx)?;
    Ok((out, Shifts { a: sa, b: sb, a_perm: perm, b_swapped }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
}

/// Position in the taxonomy of non-resonant cases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LieCase {
    pub tag: CaseTag,
    /// False when the parameters are only handled "as for" the tagged case.
    pub exact: bool,
    /// True when the input needed integer shifts or reordering first.
    pub shifted: bool,
    pub zero_blocks: Vec<usize>,
    pub infinity_blocks: Vec<usize>,
}

impl LieCase {
    pub fn label(&self) -> String {
        let t = match self.tag {
            CaseTag::I => "i",
            CaseTag::II => "ii",
            CaseTag::III => "iii",
            CaseTag::IV => "iv",
        };
        let base = if self.exact { t.to_string() } else { format!("as_for({t})") };
        if self.shifted {
            format!("shifted({base})")
        } else {
            base
        }
    }
}

/// Case of normalized parameters, read off the Jordan structure at 0 and infinity.
pub fn classify_case<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<LieCase> {
    let v = check_fuchsian_nonresonant(p, ctx)?;
    if !v.zero.non_resonant || !v.infinity.non_resonant {
        return Err(Error::Resonant("classify_case needs normalized parameters".into()));
    }
    let sizes = |g: &Vec<Vec<usize>>| {
        let mut s: Vec<usize> = g.iter().map(|x| x.len()).collect();
        s.sort_unstable_by(|x, y| y.cmp(x));
        s
    };
    let zb = sizes(&v.zero.groups);
    let ib = sizes(&v.infinity.groups);
    let (z, i) = (zb[0], ib[0]);
    let (tag, exact) = match (z, i) {
        (1, 1) => (CaseTag::I, true),
        (3, 3) => (CaseTag::IV, true),
        (3, 1) => (CaseTag::III, true),
        (2, 1) => (CaseTag::II, p.b[1] == p.b[2]),
        (_, _) if z.max(i) == 3 => (CaseTag::III, false),
        _ => (CaseTag::II, false),
    };
    Ok(LieCase { tag, exact, shifted: false, zero_blocks: zb, infinity_blocks: ib })
}

#[derive(Clone, Debug, Serialize)]
pub struct Generator<T: Real> {
    pub label: String,
    pub matrix: Mat3<T>,
    /// Sample point for item 3.
    pub z: Option<Complex<T>>,
}

/// Entry points of the spirals on which the twisted matrix or its inputs are singular.
fn singular_spirals<T: Real>(conn: &Connection<T>, ctx: &QContext<T>) -> Vec<Complex<T>> {
    let mut s = vec![one(), conn.params.coefficient_pole(ctx)];
    if conn.logarithmic() {
        for l in conn.zero.exponents {
            s.push(l.inv());
        }
        for l in conn.infinity.exponents {
            s.push(l.inv());
        }
    }
    s
}

fn distance_score<T: Real>(z: Complex<T>, spirals: &[Complex<T>], ctx: &QContext<T>) -> Result<T> {
    let mut d = (decompose(z, ctx)?.u - one::<T>()).norm();
    for &s in spirals {
        d = d.min(in_q_spiral(z / s, ctx)?.distance);
    }
    Ok(d)
}

/// Minimum distance accepted for base and sample points.
pub const SAMPLE_DISTANCE: f64 = 1e-3;

/// Sampling of the regular locus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleOptions {
    pub scan_points: usize,
    pub per_circle: usize,
    pub radii: [f64; 2],
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { scan_points: 720, per_circle: 8, radii: [0.4, 0.6] }
    }
}

/// Base point on `|z| = |q|^{1/2}` maximizing the distance to the singular spirals
/// and the logarithm cut.
pub fn base_point<T: Real>(conn: &Connection<T>, opts: &SampleOptions) -> Result<Complex<T>> {
    let ctx = conn.ctx();
    let spirals = singular_spirals(conn, ctx);
    let r = ctx.q.norm().sqrt();
    let mut best = (T::neg_infinity(), Complex::new(r, T::zero()));
    for k in 0..opts.scan_points {
        let phi = T::TAU() * T::from_usize(k).unwrap() / T::from_usize(opts.scan_points).unwrap();
        let z = Complex::from_polar(r, phi);
        let d = distance_score(z, &spirals, ctx)?;
        if d > best.0 {
            best = (d, z);
        }
    }
    if best.0 < T::lit(SAMPLE_DISTANCE) {
        return Err(Error::BasePointSingular);
    }
    Ok(best.1)
}

/// Sample set: `per_circle` points on each circle `|z| = |q|^r`, filtered by distance.
pub fn sample_omega<T: Real>(conn: &Connection<T>, opts: &SampleOptions) -> Result<Vec<Complex<T>>> {
    let ctx = conn.ctx();
    let spirals = singular_spirals(conn, ctx);
    let mut out = Vec::new();
    for r in opts.radii {
        let rad = ctx.q.norm().powf(T::lit(r));
        for k in 0..opts.per_circle {
            let phi = T::TAU() * (T::from_usize(k).unwrap() + T::lit(0.5)) / T::from_usize(opts.per_circle).unwrap();
            let z = Complex::from_polar(rad, phi);
            if distance_score(z, &spirals, ctx)? >= T::lit(SAMPLE_DISTANCE) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// Twisted connection matrix through the fastest available closed form.
pub fn twisted_at<T: Real>(conn: &Connection<T>, z: Complex<T>) -> Result<Mat3<T>> {
    if !conn.logarithmic() && check_case_one(&conn.params, conn.ctx()).is_ok() {
        return twisted_birkhoff(&conn.params, z, conn.ctx());
    }
    let pm = conn.closed_form(z)?;
    conn.twist(&pm, z)
}

fn local_generators<T: Real>(
    d: &Mat3<T>,
    u: &Mat3<T>,
    item: &str,
    ctx: &QContext<T>,
) -> Result<[(String, Mat3<T>); 3]> {
    Ok([
        (format!("{item}.a.gamma1"), conjugated_diagonal(d, |l| gamma1(l, ctx))?),
        (format!("{item}.a.gamma2"), conjugated_diagonal(d, |l| gamma2(l, ctx))?),
        (format!("{item}.b"), *u),
    ])
}

/// Generators of the density theorem: local ones at 0, local ones at infinity
/// conjugated by `P(y0)`, and `P(y0)^{-1} P(z)` for `z` in `zs` (twisted matrices).
pub fn generators_for<T: Real>(conn: &Connection<T>, y0: Complex<T>, zs: &[Complex<T>]) -> Result<Vec<Generator<T>>> {
    let ctx = conn.ctx();
    let py0 = twisted_at(conn, y0).map_err(|_| Error::BasePointSingular)?;
    let pinv = py0.inverse().map_err(|_| Error::BasePointSingular)?;
    let mut out = Vec::new();
    for (label, m) in local_generators(&conn.zero.dunford.d, &conn.zero.dunford.u, "1", ctx)? {
        out.push(Generator { label, matrix: m, z: None });
    }
    for (label, m) in local_generators(&conn.infinity.dunford.d, &conn.infinity.dunford.u, "2", ctx)? {
        out.push(Generator { label, matrix: pinv * m * py0, z: None });
    }
    for &z in zs {
        out.push(Generator { label: "3".into(), matrix: pinv * twisted_at(conn, z)?, z: Some(z) });
    }
    Ok(out)
}

pub fn generators<T: Real>(
    p: &HyperParams<T>,
    y0: Complex<T>,
    zs: &[Complex<T>],
    ctx: &QContext<T>,
) -> Result<Vec<Generator<T>>> {
    generators_for(&Connection::new(p, ctx)?, y0, zs)
}

/// Outcome of the PSL2 obstruction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Obstruction<T: Real> {
    /// Normalized misfit in `[0, 1]`; large values rule out a conjugate of PGL2.
    pub residual: T,
    /// `(row, middle column)` of the best-fitting arrangement, 1-based.
    pub arrangement: (usize, usize),
    pub constant: Complex<T>,
    /// Set when a local unipotent generator has Jordan type (2, 1).
    pub structural: bool,
}

/// Least-squares fit of `LHS = cst RHS` over the samples. The misfit is the
/// worst pointwise relative deviation `|L - cst R| / max(|L|, |cst R|)`, in `[0, 1]`.
pub fn relation_fit<T: Real>(lhs: &[Complex<T>], rhs: &[Complex<T>]) -> (T, Complex<T>) {
    let mut num = Complex::new(T::zero(), T::zero());
    let mut den = T::zero();
    for (l, r) in lhs.iter().zip(rhs) {
        num = num + r.conj() * l;
        den = den + r.norm_sqr();
    }
    if den == T::zero() {
        return (T::one(), Complex::new(T::zero(), T::zero()));
    }
    let cst = num / den;
    let mut mis = T::zero();
    for (l, r) in lhs.iter().zip(rhs) {
        let scale = l.norm().max((cst * r).norm());
        if scale > T::zero() {
            mis = mis.max((*l - cst * r).norm() / scale);
        }
    }
    (mis, cst)
}

/// Minimum of [`relation_fit`] over the nine arrangements (row, middle column).
pub fn pgl2_residual_from_matrices<T: Real>(ms: &[Mat3<T>]) -> Result<Obstruction<T>> {
    if ms.len() < 8 {
        return Err(Error::InsufficientSamples { needed: 8, got: ms.len() });
    }
    let mut best = Obstruction { residual: T::infinity(), arrangement: (1, 2), constant: one(), structural: false };
    for r in 0..3 {
        for c in 0..3 {
            let o = match c {
                0 => [1, 2],
                1 => [0, 2],
                _ => [0, 1],
            };
            let lhs: Vec<Complex<T>> = ms.iter().map(|m| m.m[r][c] * m.m[r][c]).collect();
            let rhs: Vec<Complex<T>> = ms.iter().map(|m| m.m[r][o[0]] * m.m[r][o[1]]).collect();
            let (res, cst) = relation_fit(&lhs, &rhs);
            if res < best.residual {
                best = Obstruction { residual: res, arrangement: (r + 1, c + 1), constant: cst, structural: false };
            }
        }
    }
    Ok(best)
}

fn unipotent_rank<T: Real>(u: &Mat3<T>) -> usize {
    let n = *u - Mat3::identity();
    if n.max_abs() <= T::lit(1e-12) {
        0
    } else if (n * n).max_abs() <= T::lit(1e-12) * n.max_abs() {
        1
    } else {
        2
    }
}

/// PSL2 obstruction for the twisted matrices at `zs`.
///
/// A local unipotent of Jordan type (2, 1) has no conjugate in PGL2 and gives the
/// structural certificate (residual 1). Otherwise the PSL2 relation
/// `m12^2 = 4 m11 m13` is fitted with a free constant, in every arrangement, on
/// the sampled twisted matrices.
pub fn pgl2_obstruction_for<T: Real>(conn: &Connection<T>, zs: &[Complex<T>]) -> Result<Obstruction<T>> {
    if zs.len() < 8 {
        return Err(Error::InsufficientSamples { needed: 8, got: zs.len() });
    }
    if unipotent_rank(&conn.zero.dunford.u) == 1 || unipotent_rank(&conn.infinity.dunford.u) == 1 {
        return Ok(Obstruction { residual: T::one(), arrangement: (0, 0), constant: one(), structural: true });
    }
    let ms = zs.iter().map(|&z| twisted_at(conn, z)).collect::<Result<Vec<_>>>()?;
    pgl2_residual_from_matrices(&ms)
}

pub fn pgl2_obstruction<T: Real>(p: &HyperParams<T>, zs: &[Complex<T>], ctx: &QContext<T>) -> Result<T> {
    Ok(pgl2_obstruction_for(&Connection::new(p, ctx)?, zs)?.residual)
}

/// Points next to the zero spirals `b_j/(q a_i) q^Z` of the entries of the twisted
/// matrix, at relative offset `1e-2 exp(i pi/4)` and modulus near `|q|^{1/2}`.
pub fn zero_adjacent_samples<T: Real>(conn: &Connection<T>) -> Result<Vec<Complex<T>>> {
    let ctx = conn.ctx();
    let p = &conn.params;
    let spirals = singular_spirals(conn, ctx);
    let off = one::<T>() + Complex::from_polar(T::lit(1e-2), T::FRAC_PI_4());
    let target = ctx.q.norm().sqrt();
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let s = p.b[j] / (ctx.q * p.a[i]);
            let k = ((target.ln() - s.norm().ln()) / ctx.q.norm().ln()).round().to_i32().unwrap_or(0);
            let z = s * ctx.powi(k) * off;
            if distance_score(z, &spirals, ctx)? >= T::lit(SAMPLE_DISTANCE) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// Values of the two sides of the relation on row 1 at a point of the
/// `b2/(q a1) q^Z` spiral, where `m12` vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObstructionWitness<T: Real> {
    pub z: Complex<T>,
    pub lhs: Complex<T>,
    pub rhs: Complex<T>,
}

pub fn obstruction_witness<T: Real>(conn: &Connection<T>) -> Result<ObstructionWitness<T>> {
    let ctx = conn.ctx();
    let p = &conn.params;
    let s = p.b[1] / (ctx.q * p.a[0]);
    let target = ctx.q.norm().sqrt();
    let k = ((target.ln() - s.norm().ln()) / ctx.q.norm().ln()).round().to_i32().unwrap_or(0);
    let z = s * ctx.powi(k);
    let m = twisted_at(conn, z)?;
    Ok(ObstructionWitness { z, lhs: m.m[0][1] * m.m[0][1], rhs: m.m[0][0] * m.m[0][2] })
}

/// Rational `p/n` within `tol` of `x`, with `n <= cap`, by continued fractions.
pub fn rational_approximation(x: f64, cap: u64, tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h = ai * h1 + h0;
        let k = ai * k1 + k0;
        if k > cap as i128 {
            break;
        }
        if (x - h as f64 / k as f64).abs() < tol {
            return Some((h as i64, k as u64));
        }
        h0 = h1;
        h1 = h;
        k0 = k1;
        k1 = k;
        let f = r - a;
        if f.abs() < 1e-300 {
            break;
        }
        r = 1.0 / f;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub const RATIONAL_CAP: u64 = 1_000_000;
pub const RATIONAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarResolution {
    /// Both scalar generators are roots of unity generating `mu_n`.
    FiniteScalar { n: u64, beta_sum: (i64, u64), v_arg: (i64, u64) },
    /// No rational certificate with denominator up to the cap.
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification<T: Real> {
    Gl3,
    Sl3Extended { scalar_generators: [Complex<T>; 2], beta_sum: T, resolution: ScalarResolution },
    Undetermined { reason: String },
}

impl<T: Real> Classification<T> {
    pub fn is_definitive(&self) -> bool {
        !matches!(self, Classification::Undetermined { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::Gl3 => "GL3",
            Classification::Sl3Extended { .. } => "SL3_extended",
            Classification::Undetermined { .. } => "undetermined",
        }
    }
}

/// Descriptors of `G`, its neutral component and the derived group of the latter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescriptors {
    pub g: String,
    pub g0: String,
    pub g0_der: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisReport<T: Real> {
    pub input: HyperParams<T>,
    pub irreducible: bool,
    pub irreducibility: IrreducibilityVerdict<T>,
    pub normalized: Option<HyperParams<T>>,
    pub shifts: Option<Shifts>,
    pub lie_case: Option<LieCase>,
    pub base_point: Option<Complex<T>>,
    /// Item-3 sample points; a finite sample is evidence only.
    pub omega: Vec<Complex<T>>,
    pub generators: Vec<Generator<T>>,
    pub obstruction_residual: Option<T>,
    pub obstruction: Option<Obstruction<T>>,
    /// Verdict on `a1 a2 a3 / (b2 b3)` in `q^Z`.
    pub product_ratio: Option<SpiralVerdict<T>>,
    pub classification: Classification<T>,
    pub groups: GroupDescriptors,
    pub q_real: bool,
    pub notes: Vec<String>,
}

/// The group descriptor, a function of the verdict on `a1 a2 a3 / (b2 b3)` only.
pub fn theorem_classification<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<(Classification<T>, SpiralVerdict<T>)> {
    let ratio = p.prod_a() / (p.b[1] * p.b[2]);
    let v = in_q_spiral(ratio, ctx)?;
    if !v.member {
        return Ok((Classification::Gl3, v));
    }
    let beta = p.beta();
    let beta_sum = beta[1] + beta[2];
    let vv = p.v();
    let s1 = (two_pi_i::<T>() * beta_sum).exp();
    let s2 = vv[0] * vv[1];
    let bs = rational_approximation(beta_sum.f64(), RATIONAL_CAP, RATIONAL_TOL);
    let varg = {
        let mut t = s2.arg().f64() / std::f64::consts::TAU;
        if t < 0.0 {
            t += 1.0;
        }
        rational_approximation(t, RATIONAL_CAP, RATIONAL_TOL)
    };
    let resolution = match (bs, varg) {
        (Some(x), Some(y)) => {
            let n = x.1 / gcd(x.1, y.1) * y.1;
            ScalarResolution::FiniteScalar { n, beta_sum: x, v_arg: y }
        }
        _ => ScalarResolution::Symbolic,
    };
    Ok((Classification::Sl3Extended { scalar_generators: [s1, s2], beta_sum, resolution }, v))
}

fn descriptors<T: Real>(c: &Classification<T>) -> GroupDescriptors {
    match c {
        Classification::Gl3 => GroupDescriptors { g: "GL3".into(), g0: "GL3".into(), g0_der: "SL3".into() },
        Classification::Sl3Extended { resolution, .. } => match resolution {
            ScalarResolution::FiniteScalar { n, .. } => GroupDescriptors {
                g: format!("mu_{n}.SL3"),
                g0: "SL3".into(),
                g0_der: "SL3".into(),
            },
            ScalarResolution::Symbolic => GroupDescriptors {
                g: "closure<SL3, exp(2 pi i (beta2+beta3)), v1 v2>".into(),
                g0: "SL3 or GL3 (scalar closure not certified)".into(),
                g0_der: "SL3".into(),
            },
        },
        Classification::Undetermined { .. } => {
            GroupDescriptors { g: "unknown".into(), g0: "unknown".into(), g0_der: "unknown".into() }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub samples: SampleOptions,
    /// Skip generators and the obstruction (verdict and case only).
    pub skip_numerics: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { samples: SampleOptions::default(), skip_numerics: false }
    }
}

pub fn classify<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<GaloisReport<T>> {
    classify_with(p, ctx, &ClassifyOptions::default())
}

/// Full report. The group comes from the theorem (assuming Lie-irreducibility);
/// generators and the obstruction residual are numerical corroboration.
pub fn classify_with<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>, opts: &ClassifyOptions) -> Result<GaloisReport<T>> {
    let irr = irreducibility(p, ctx)?;
    let mut report = GaloisReport {
        input: *p,
        irreducible: irr.irreducible,
        irreducibility: irr.clone(),
        normalized: None,
        shifts: None,
        lie_case: None,
        base_point: None,
        omega: Vec::new(),
        generators: Vec::new(),
        obstruction_residual: None,
        obstruction: None,
        product_ratio: None,
        classification: Classification::Undetermined { reason: String::new() },
        groups: descriptors::<T>(&Classification::Undetermined { reason: String::new() }),
        q_real: p.q_real,
        notes: Vec::new(),
    };
    if !irr.irreducible {
        let w: Vec<String> = irr.witnesses.iter().map(|w| format!("a{}/b{} = q^{}", w.i, w.j, w.k)).collect();
        report.classification = Classification::Undetermined { reason: format!("reducible: {}", w.join(", ")) };
        return Ok(report);
    }
    let (np, shifts) = normalize_parameters(p, ctx)?;
    let mut case = classify_case(&np, ctx)?;
    case.shifted = !shifts.is_trivial();
    if case.shifted {
        report.notes.push("scalar generators use the normalized parameters".into());
    }
    report.normalized = Some(np);
    report.shifts = Some(shifts);
    report.lie_case = Some(case);
    let (cls, verdict) = theorem_classification(&np, ctx)?;
    report.product_ratio = Some(verdict);
    if !opts.skip_numerics {
        let conn = Connection::new(&np, ctx)?;
        let y0 = base_point(&conn, &opts.samples)?;
        let omega = sample_omega(&conn, &opts.samples)?;
        report.generators = generators_for(&conn, y0, &omega)?;
        let mut zs = omega.clone();
        zs.extend(zero_adjacent_samples(&conn)?);
        let ob = pgl2_obstruction_for(&conn, &zs)?;
        report.obstruction_residual = Some(ob.residual);
        report.obstruction = Some(ob);
        report.base_point = Some(y0);
        report.omega = omega;
    }
    report.notes.push("Lie-irreducibility is assumed, not decided".into());
    if !p.q_real {
        report.classification = Classification::Undetermined { reason: "parameters are not q-real".into() };
    } else {
        report.groups = descriptors(&cls);
        report.classification = cls;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat3::{rho, Mat2};
    type C = Complex<f64>;

    fn ctx() -> QContext<f64> {
        QContext::real(0.5).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        let c = ctx();
        let b2 = c.powr(0.15);
        let p = HyperParams::new([c.q * b2, c.powr(0.2), c.powr(0.4)], b2, c.powr(0.33), &c).unwrap();
        let v = irreducibility(&p, &c).unwrap();
        assert!(!v.irreducible);
        assert_eq!((v.witnesses[0].i, v.witnesses[0].j, v.witnesses[0].k), (1, 2, 1));
        let p = HyperParams::new([c.powi(3) * b2 * (1.0 + 1e-12), c.powr(0.2), c.powr(0.4)], b2, c.powr(0.33), &c).unwrap();
        let v = irreducibility(&p, &c).unwrap();
        assert!(!v.irreducible && v.witnesses[0].distance > 0.0 && v.witnesses[0].distance < 1e-11);
        let p = HyperParams::from_exponents([0.1, 0.2, 0.4], 0.15, 0.33, &c).unwrap();
        assert!(irreducibility(&p, &c).unwrap().irreducible);
    }

    #[test]
    fn normalization() {
        let c = ctx();
        let p = HyperParams::from_exponents([2.3, 0.2, 0.4], 0.15, 0.33, &c).unwrap();
        let (n, s) = normalize_parameters(&p, &c).unwrap();
        assert_eq!(s.a, [-2, 0, 0]);
        assert!((n.alpha()[0] - 0.3).abs() < 1e-12);
        let p = HyperParams::from_exponents([2.2, 0.2, 0.4], 0.15, 0.33, &c).unwrap();
        let (n, _) = normalize_parameters(&p, &c).unwrap();
        assert_eq!(n.a[0], n.a[1]);
        let case = classify_case(&n, &c).unwrap();
        assert_eq!((case.tag, case.exact), (CaseTag::II, false));
        let p = HyperParams::from_exponents([0.1, 0.2, 0.4], 0.33, 3.0, &c).unwrap();
        let (n, s) = normalize_parameters(&p, &c).unwrap();
        assert!(s.b_swapped && n.b[1] == c.q);
    }

    #[test]
    fn cases() {
        let c = ctx();
        let tag = |al: [f64; 3], b2: f64, b3: f64| {
            let p = HyperParams::from_exponents(al, b2, b3, &c).unwrap();
            let (n, _) = normalize_parameters(&p, &c).unwrap();
            let k = classify_case(&n, &c).unwrap();
            (k.tag, k.exact)
        };
        assert_eq!(tag([0.1, 0.2, 0.4], 0.15, 0.33), (CaseTag::I, true));
        assert_eq!(tag([0.1, 0.2, 0.4], 0.35, 0.35), (CaseTag::II, true));
        assert_eq!(tag([0.1, 0.2, 0.4], 1.0, 1.0), (CaseTag::III, true));
        assert_eq!(tag([0.3, 0.3, 0.3], 1.0, 1.0), (CaseTag::IV, true));
        assert_eq!(tag([0.3, 0.3, 0.3], 0.15, 0.62), (CaseTag::III, false));
        assert_eq!(tag([0.3, 0.3, 0.7], 0.15, 0.62), (CaseTag::II, false));
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rational_approximation(0.7, RATIONAL_CAP, RATIONAL_TOL), Some((7, 10)));
        assert_eq!(rational_approximation(0.0, RATIONAL_CAP, RATIONAL_TOL), Some((0, 1)));
        assert_eq!(rational_approximation(1.0 / 3.0, RATIONAL_CAP, RATIONAL_TOL), Some((1, 3)));
        assert_eq!(rational_approximation(std::f64::consts::PI - 3.0, RATIONAL_CAP, 1e-14), None);
    }

    #[test]
    fn synthetic_psl2_fixture_has_zero_residual() {
        let ms: Vec<Mat3<f64>> = (0..10)
            .map(|k| {
                let t = C::new(0.3 * k as f64, 0.1);
                let n = Mat2::new(C::new(1.0, 0.0) + t, t * t, C::new(0.5, 0.0), (C::new(1.0, 0.0) + t * t * 0.5) / (C::new(1.0, 0.0) + t));
                rho(&n).unwrap()
            })
            .collect();
        assert!(pgl2_residual_from_matrices(&ms).unwrap().residual < 1e-12);
        assert!(matches!(pgl2_residual_from_matrices(&ms[..5]), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn case_one_report() {
        let c = ctx();
        let p = HyperParams::from_exponents([0.1, 0.2, 0.4], 0.15, 0.33, &c).unwrap();
        let r = classify(&p, &c).unwrap();
        assert_eq!(r.classification, Classification::Gl3);
        assert!(r.obstruction_residual.unwrap() > 0.1, "{:?}", r.obstruction);
        let g = &r.generators;
        let vinv = g.iter().find(|x| x.label == "1.a.gamma1").unwrap().matrix;
        assert!(vinv.rel_err(&Mat3::identity()) < 1e-14);
        let e = g.iter().find(|x| x.label == "1.a.gamma2").unwrap().matrix;
        let beta = p.beta();
        for j in 0..3 {
            assert!((e.m[j][j] - (C::new(0.0, -std::f64::consts::TAU * beta[j])).exp()).norm() < 1e-12);
        }
        let y0 = r.base_point.unwrap();
        let conn = Connection::new(&p, &c).unwrap();
        let id = generators_for(&conn, y0, &[y0]).unwrap();
        assert!(id.last().unwrap().matrix.rel_err(&Mat3::identity()) < 1e-13);
        let p = HyperParams::from_exponents([0.1, 0.2, 0.4], 0.15, 0.55, &c).unwrap();
        let r = classify(&p, &c).unwrap();
        match r.classification {
            Classification::Sl3Extended { scalar_generators, resolution, .. } => {
                assert!((scalar_generators[0] - C::new(0.0, std::f64::consts::TAU * 0.7).exp()).norm() < 1e-12);
                assert!((scalar_generators[1] - 1.0).norm() < 1e-12);
                assert_eq!(resolution, ScalarResolution::FiniteScalar { n: 10, beta_sum: (7, 10), v_arg: (0, 1) });
            }
            other => panic!("{other:?}"),
        }
    }
}
