//! The order-3 q-hypergeometric system `Y(qz) = A(z) Y(z)` and its local
//! fundamental solutions at 0 and at infinity.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::{ladder_limit, Extrapolated, Ladder};
use crate::mat3::{dunford, eig3, DunfordPair, JordanBlock, Mat3};
use crate::qseries::{binom, lq, phi3_2, qcharacter, QContext};
use crate::scalar::{one, zero, Real};
use crate::spiral::{decompose, in_q_spiral, SpiralPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Zero,
    Infinity,
}

/// Parameters `(a1, a2, a3; b1 = q, b2, b3)` with their spiral decompositions
/// `a_i = u_i q^{alpha_i}`, `b_j = v_j q^{beta_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HyperParams<T: Real> {
    pub a: [Complex<T>; 3],
    pub b: [Complex<T>; 3],
    pub a_spiral: [SpiralPoint<T>; 3],
    pub b_spiral: [SpiralPoint<T>; 3],
    pub q_real: bool,
}

impl<T: Real> HyperParams<T> {
    pub fn new(a: [Complex<T>; 3], b2: Complex<T>, b3: Complex<T>, ctx: &QContext<T>) -> Result<Self> {
        let b = [ctx.q, b2, b3];
        if a.iter().chain(b.iter()).any(|x| x.norm() == T::zero() || !x.norm().is_finite()) {
            return Err(Error::Domain("parameters must be finite and nonzero".into()));
        }
        let a_spiral = [decompose(a[0], ctx)?, decompose(a[1], ctx)?, decompose(a[2], ctx)?];
        let mut b_spiral = [decompose(b[0], ctx)?, decompose(b2, ctx)?, decompose(b3, ctx)?];
        b_spiral[0].u = one();
        b_spiral[0].omega = T::one();
        let q_real = a_spiral.iter().chain(b_spiral.iter()).all(|s| (s.u - one::<T>()).norm() < ctx.eps_spiral);
        Ok(Self { a, b, a_spiral, b_spiral, q_real })
    }

    /// q-real parameters `a_i = q^{alpha_i}`, `b_j = q^{beta_j}`.
    pub fn from_exponents(alpha: [T; 3], beta2: T, beta3: T, ctx: &QContext<T>) -> Result<Self> {
        let p = |x: T| {
            let r = x.round();
            if x == r && r.abs() < T::lit(64.0) {
                ctx.powi(r.to_i32().unwrap())
            } else {
                ctx.powr(x)
            }
        };
        Self::new([p(alpha[0]), p(alpha[1]), p(alpha[2])], p(beta2), p(beta3), ctx)
    }

    pub fn b2(&self) -> Complex<T> {
        self.b[1]
    }

    pub fn b3(&self) -> Complex<T> {
        self.b[2]
    }

    pub fn alpha(&self) -> [T; 3] {
        [self.a_spiral[0].omega, self.a_spiral[1].omega, self.a_spiral[2].omega]
    }

    pub fn beta(&self) -> [T; 3] {
        [self.b_spiral[0].omega, self.b_spiral[1].omega, self.b_spiral[2].omega]
    }

    pub fn u(&self) -> [Complex<T>; 3] {
        [self.a_spiral[0].u, self.a_spiral[1].u, self.a_spiral[2].u]
    }

    pub fn v(&self) -> [Complex<T>; 3] {
        [self.b_spiral[0].u, self.b_spiral[1].u, self.b_spiral[2].u]
    }

    /// Local exponents: `q/b_j` at 0, `1/a_i` at infinity.
    pub fn exponents(&self, side: Side, ctx: &QContext<T>) -> [Complex<T>; 3] {
        match side {
            Side::Zero => [one(), ctx.q / self.b[1], ctx.q / self.b[2]],
            Side::Infinity => [self.a[0].inv(), self.a[1].inv(), self.a[2].inv()],
        }
    }

    pub fn prod_a(&self) -> Complex<T> {
        self.a[0] * self.a[1] * self.a[2]
    }

    /// Argument scale of the series at infinity, `q b2 b3 / (a1 a2 a3)`.
    pub fn c_infinity(&self, ctx: &QContext<T>) -> Complex<T> {
        ctx.q * self.b[1] * self.b[2] / self.prod_a()
    }

    /// Point where the coefficients of `A(z)` have their pole, `b2 b3 / (q^2 a1 a2 a3)`.
    pub fn coefficient_pole(&self, ctx: &QContext<T>) -> Complex<T> {
        self.b[1] * self.b[2] / (ctx.q * ctx.q * self.prod_a())
    }

    pub fn with_parameters(&self, a: [Complex<T>; 3], b2: Complex<T>, b3: Complex<T>, ctx: &QContext<T>) -> Result<Self> {
        Self::new(a, b2, b3, ctx)
    }
}

fn companion<T: Real>(lam: Complex<T>, mu: Complex<T>, delta: Complex<T>) -> Mat3<T> {
    Mat3::from_rows([[zero(), one(), zero()], [zero(), zero(), one()], [lam, mu, delta]])
}

fn coefficients<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<[Complex<T>; 4]> {
    let q = ctx.q;
    let (a, b2, b3) = (p.a, p.b[1], p.b[2]);
    let r2 = b2 / q;
    let r3 = b3 / q;
    let pa = p.prod_a();
    let d = r2 * r3 - z * pa;
    if d.norm() <= T::epsilon() * T::lit(64.0) * ((r2 * r3).norm() + (z * pa).norm()) {
        return Err(Error::Pole(format!("coefficient pole of A(z) at z = {z}")));
    }
    let e1 = a[0] + a[1] + a[2];
    let e2 = a[0] * a[1] + a[1] * a[2] + a[0] * a[2];
    let lam = (one::<T>() - z) / d;
    let mu = (z * e1 - (one::<T>() + r2 + r3)) / d;
    let delta = ((r2 * r3 + r2 + r3) - z * e2) / d;
    Ok([lam, mu, delta, d])
}

/// The companion matrix `A(z)` with last row `(lambda, mu, delta)`.
pub fn system_matrix<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    let [lam, mu, delta, _] = coefficients(p, z, ctx)?;
    Ok(companion(lam, mu, delta))
}

/// `A(z)^{-1}`, evaluated from the coefficients directly; singular at `z = 1`.
pub fn system_matrix_inverse<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    let [lam, mu, delta, _] = coefficients(p, z, ctx)?;
    if (one::<T>() - z).norm() <= T::epsilon() * T::lit(64.0) {
        return Err(Error::Pole("A(z) is not invertible at z = 1".into()));
    }
    let li = lam.inv();
    Ok(Mat3::from_rows([[-mu * li, -delta * li, li], [one(), zero(), zero()], [zero(), one(), zero()]]))
}

/// `lim_{z -> inf} A(z)`.
pub fn system_matrix_at_infinity<T: Real>(p: &HyperParams<T>) -> Mat3<T> {
    let a = p.a;
    let pa = p.prod_a();
    let e1 = a[0] + a[1] + a[2];
    let e2 = a[0] * a[1] + a[1] * a[2] + a[0] * a[2];
    companion(pa.inv(), -e1 / pa, e2 / pa)
}

/// Per-side structure of the local exponents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideVerdict<T: Real> {
    pub side: Side,
    pub exponents: [Complex<T>; 3],
    pub fuchsian: bool,
    pub non_resonant: bool,
    pub logarithmic: bool,
    /// Sets of indices whose exponents coincide.
    pub groups: Vec<Vec<usize>>,
    /// `(i, j, k)` with `exponent_i / exponent_j` close to `q^k`, `k != 0`.
    pub resonances: Vec<(usize, usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuchsVerdict<T: Real> {
    pub zero: SideVerdict<T>,
    pub infinity: SideVerdict<T>,
}

fn analyze_side<T: Real>(p: &HyperParams<T>, side: Side, ctx: &QContext<T>) -> Result<SideVerdict<T>> {
    let e = p.exponents(side, ctx);
    let mut root = [0usize, 1, 2];
    let mut resonances = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let v = in_q_spiral(e[i] / e[j], ctx)?;
            if v.member {
                if v.nearest_k == 0 {
                    let (ri, rj) = (root[i], root[j]);
                    for r in root.iter_mut() {
                        if *r == rj {
                            *r = ri;
                        }
                    }
                } else {
                    resonances.push((i, j, v.nearest_k));
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..3 {
        match groups.iter_mut().find(|g| root[g[0]] == root[i]) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let m0 = match side {
        Side::Zero => system_matrix(p, zero(), ctx)?,
        Side::Infinity => system_matrix_at_infinity(p),
    };
    let fuchsian = m0.is_finite() && m0.det().norm() > T::zero();
    // companion matrices are non-derogatory: a repeated exponent always carries a Jordan block
    let logarithmic = groups.iter().any(|g| g.len() > 1);
    Ok(SideVerdict { side, exponents: e, fuchsian, non_resonant: resonances.is_empty(), logarithmic, groups, resonances })
}

pub fn check_fuchsian_nonresonant<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<FuchsVerdict<T>> {
    Ok(FuchsVerdict { zero: analyze_side(p, Side::Zero, ctx)?, infinity: analyze_side(p, Side::Infinity, ctx)? })
}

fn vandermonde_col<T: Real>(l: Complex<T>) -> [Complex<T>; 3] {
    [one(), l, l * l]
}

/// Vandermonde matrix with columns `(1, l_j, l_j^2)`.
pub fn vandermonde<T: Real>(l: [Complex<T>; 3]) -> Mat3<T> {
    Mat3::from_cols([vandermonde_col(l[0]), vandermonde_col(l[1]), vandermonde_col(l[2])])
}

/// Jordan basis of a companion matrix with the given blocks: `A C = C J`.
///
/// Simple exponents contribute `v(l) = (1, l, l^2)`, double ones `v(l), v'(l)`;
/// a triple exponent uses `[[l^2, -l, 1], [l^3, 0, 0], [l^4, l^3, 0]]`.
pub fn companion_jordan_basis<T: Real>(blocks: &[JordanBlock<T>]) -> Mat3<T> {
    let mut cols = Vec::with_capacity(3);
    let two = T::lit(2.0);
    for b in blocks {
        let l = b.value;
        match b.size {
            1 => cols.push(vandermonde_col(l)),
            2 => {
                cols.push(vandermonde_col(l));
                cols.push([zero(), one(), l * two]);
            }
            _ => {
                cols.push([l * l, l * l * l, l * l * l * l]);
                cols.push([-l, zero(), l * l * l]);
                cols.push([one(), zero(), zero()]);
            }
        }
    }
    Mat3::from_cols([cols[0], cols[1], cols[2]])
}

pub fn jordan_from_blocks<T: Real>(blocks: &[JordanBlock<T>]) -> Mat3<T> {
    let mut j = Mat3::zero();
    let mut k = 0;
    for b in blocks {
        for s in 0..b.size {
            j.m[k + s][k + s] = b.value;
            if s + 1 < b.size {
                j.m[k + s][k + s + 1] = one();
            }
        }
        k += b.size;
    }
    j
}

/// Gauge matrix from the `3phi2` series (distinct exponents), evaluated directly.
///
/// At 0, column j is `(q/b_j)^k 3phi2((q/b_j) a; (q/b_j) b; q^k z)`, k = 0, 1, 2.
/// At infinity, column i is `(1/a_i)^k 3phi2(a_i q/b; a_i q/a; c/(q^k z))` with
/// `c = q b2 b3 / (a1 a2 a3)`.
pub fn series_gauge<T: Real>(p: &HyperParams<T>, side: Side, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    let q = ctx.q;
    let mut f = Mat3::zero();
    match side {
        Side::Zero => {
            for j in 0..3 {
                let l = q / p.b[j];
                let aa = [l * p.a[0], l * p.a[1], l * p.a[2]];
                let bb = [l * p.b[0], l * p.b[1], l * p.b[2]];
                let mut w = z;
                let mut lk = one::<T>();
                for k in 0..3 {
                    f.m[k][j] = lk * phi3_2(aa, bb, w, ctx)?.0;
                    w = w * q;
                    lk = lk * l;
                }
            }
        }
        Side::Infinity => {
            let c = p.c_infinity(ctx);
            for i in 0..3 {
                let s = p.a[i] * q;
                let aa = [s / p.b[0], s / p.b[1], s / p.b[2]];
                let bb = [s / p.a[0], s / p.a[1], s / p.a[2]];
                let l = p.a[i].inv();
                let mut w = c / z;
                let mut lk = one::<T>();
                for k in 0..3 {
                    f.m[k][i] = lk * phi3_2(aa, bb, w, ctx)?.0;
                    w = w / q;
                    lk = lk * l;
                }
            }
        }
    }
    Ok(f)
}

/// Largest series argument for direct evaluation; beyond it the q-shift recursion is used.
pub const SERIES_RADIUS: f64 = 0.5;

/// Local fundamental data at 0 or infinity: `Y = F e_J` with `F(qz) J = A(z) F(z)`.
///
/// When exponents coincide, `F` is the limit of `F_eps V_eps^{-1} C` along a
/// parameter ladder separating them (`C` a Jordan basis of `A(0)` or `A(inf)`),
/// evaluated by Richardson extrapolation.
#[derive(Clone, Debug, Serialize)]
pub struct LocalData<T: Real> {
    pub side: Side,
    pub params: HyperParams<T>,
    pub j: Mat3<T>,
    pub dunford: DunfordPair<T>,
    pub exponents: [Complex<T>; 3],
    pub blocks: Vec<JordanBlock<T>>,
    /// Value of `F` at the singular point.
    pub basis: Mat3<T>,
    pub logarithmic: bool,
    pub resonant: bool,
    /// Direct series evaluation for `|z| <= radius` (at 0) or `|z| >= radius` (at infinity).
    pub radius: T,
    pub ladder: Option<Ladder<T>>,
    #[serde(skip)]
    ctx: QContext<T>,
}

impl<T: Real> LocalData<T> {
    pub fn new(p: &HyperParams<T>, side: Side, ladder: Ladder<T>, ctx: &QContext<T>) -> Result<Self> {
        let verdict = analyze_side(p, side, ctx)?;
        if !verdict.non_resonant {
            return Err(Error::Resonant(format!(
                "exponent ratios {:?} at {:?} lie in q^Z*; normalize the parameters first",
                verdict.resonances, side
            )));
        }
        let mut groups = verdict.groups.clone();
        groups.sort_by_key(|g| g[0]);
        let mut next = 0;
        for g in &groups {
            for (t, &i) in g.iter().enumerate() {
                if i != next + t {
                    return Err(Error::Resonant(
                        "coinciding exponents must be adjacent; normalize the parameters first".into(),
                    ));
                }
            }
            next += g.len();
        }
        let exps = verdict.exponents;
        let blocks: Vec<JordanBlock<T>> =
            groups.iter().map(|g| JordanBlock { value: exps[g[0]], size: g.len() }).collect();
        let j = jordan_from_blocks(&blocks);
        let dunford = dunford(&j)?;
        let logarithmic = verdict.logarithmic;
        let basis = if logarithmic { companion_jordan_basis(&blocks) } else { vandermonde(exps) };
        let radius = match side {
            Side::Zero => T::lit(SERIES_RADIUS),
            Side::Infinity => p.c_infinity(ctx).norm() / (ctx.q.norm() * ctx.q.norm() * T::lit(SERIES_RADIUS)),
        };
        Ok(Self {
            side,
            params: *p,
            j,
            dunford,
            exponents: exps,
            blocks,
            basis,
            logarithmic,
            resonant: false,
            radius,
            ladder: if logarithmic { Some(ladder) } else { None },
            ctx: *ctx,
        })
    }

    pub fn ctx(&self) -> &QContext<T> {
        &self.ctx
    }

    pub fn in_radius(&self, z: Complex<T>) -> bool {
        match self.side {
            Side::Zero => z.norm() <= self.radius,
            Side::Infinity => z.norm() >= self.radius,
        }
    }

    /// Parameters with the coinciding exponents separated by `eps`.
    pub fn perturbed(&self, eps: Complex<T>) -> Result<HyperParams<T>> {
        let p = &self.params;
        let f = eps + T::one();
        let mut a = p.a;
        let mut b = p.b;
        let mut k = 0;
        for blk in &self.blocks {
            for t in 1..blk.size {
                let ft = f.powi(t as i32);
                match self.side {
                    Side::Zero => b[k + t] = b[k] * ft,
                    Side::Infinity => a[k + t] = a[k] * ft,
                }
            }
            k += blk.size;
        }
        HyperParams::new(a, b[1], b[2], &self.ctx)
    }

    fn ladder_sample(&self, eps: Complex<T>, z: Complex<T>) -> Result<Mat3<T>> {
        let pe = self.perturbed(eps)?;
        let v = vandermonde(pe.exponents(self.side, &self.ctx));
        Ok(series_gauge(&pe, self.side, z, &self.ctx)? * v.inverse()? * self.basis)
    }

    /// `F(z)` inside the series radius, with ladder diagnostics in the logarithmic case.
    pub fn gauge_direct_report(&self, z: Complex<T>) -> Result<(Mat3<T>, Option<Extrapolated<T>>)> {
        match &self.ladder {
            None => Ok((series_gauge(&self.params, self.side, z, &self.ctx)?, None)),
            Some(l) => {
                let ex = ladder_limit(l, |e| self.ladder_sample(e, z))?;
                Ok((ex.value, Some(ex)))
            }
        }
    }

    pub fn gauge_direct(&self, z: Complex<T>) -> Result<Mat3<T>> {
        Ok(self.gauge_direct_report(z)?.0)
    }

    /// `F(z)` anywhere off the singular spirals, using `F(z) = A(z)^{-1} F(qz) J`
    /// at 0 and `F(z) = A(z/q) F(z/q) J^{-1}` at infinity.
    pub fn gauge(&self, z: Complex<T>) -> Result<Mat3<T>> {
        if z.norm() == T::zero() || !z.norm().is_finite() {
            return Err(Error::Domain("gauge needs a finite nonzero point".into()));
        }
        let ctx = &self.ctx;
        let q = ctx.q;
        let r = self.radius;
        let steps = match self.side {
            Side::Zero => (z.norm() / r).ln() / -(q.norm().ln()),
            Side::Infinity => (r / z.norm()).ln() / -(q.norm().ln()),
        };
        let n = if steps <= T::zero() { 0 } else { steps.ceil().to_usize().unwrap_or(usize::MAX) };
        if n > ctx.max_terms {
            return Err(Error::PoleChain { step: n });
        }
        match self.side {
            Side::Zero => {
                let mut w = z * q.powi(n as i32);
                let mut g = self.gauge_direct(w)?;
                for step in (0..n).rev() {
                    w = w / q;
                    let ai = system_matrix_inverse(&self.params, w, ctx).map_err(|_| Error::PoleChain { step })?;
                    g = ai * g * self.j;
                }
                Ok(g)
            }
            Side::Infinity => {
                let jinv = self.j.inverse()?;
                let mut w = z / q.powi(n as i32);
                let mut g = self.gauge_direct(w)?;
                for step in (0..n).rev() {
                    let a = system_matrix(&self.params, w, ctx).map_err(|_| Error::PoleChain { step })?;
                    g = a * g * jinv;
                    w = w * q;
                }
                Ok(g)
            }
        }
    }

    pub fn e_matrix(&self, z: Complex<T>) -> Result<Mat3<T>> {
        e_matrix_with(&self.dunford, z, self.side, &self.ctx)
    }

    /// Fundamental solution `Y(z) = F(z) e_J(z)`.
    pub fn solution(&self, z: Complex<T>) -> Result<Mat3<T>> {
        Ok(self.gauge(z)? * self.e_matrix(z)?)
    }

    /// `|F(qz) J - A(z) F(z)| / |F(z)|`.
    pub fn gauge_residual(&self, z: Complex<T>) -> Result<T> {
        let f = self.gauge(z)?;
        let fq = self.gauge(self.ctx.q * z)?;
        let a = system_matrix(&self.params, z, &self.ctx)?;
        Ok((fq * self.j - a * f).norm() / f.norm())
    }

    /// Same residual using only direct series evaluations at `z` and `qz`.
    pub fn gauge_residual_direct(&self, z: Complex<T>) -> Result<T> {
        let f = self.gauge_direct(z)?;
        let fq = self.gauge_direct(self.ctx.q * z)?;
        let a = system_matrix(&self.params, z, &self.ctx)?;
        Ok((fq * self.j - a * f).norm() / f.norm())
    }
}

pub fn local_solution_zero<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<LocalData<T>> {
    LocalData::new(p, Side::Zero, Ladder::default(), ctx)
}

pub fn local_solution_infinity<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<LocalData<T>> {
    LocalData::new(p, Side::Infinity, Ladder::default(), ctx)
}

fn close<T: Real>(x: Complex<T>, y: Complex<T>, ctx: &QContext<T>) -> bool {
    (x - y).norm() <= ctx.eps_spiral * y.norm()
}

/// Logarithmic solution at 0 for `b2 = b3 = q`, with `J = [[1,1,0],[0,1,1],[0,0,1]]`.
pub fn local_solution_zero_log<T: Real>(p: &HyperParams<T>, ladder: Ladder<T>, ctx: &QContext<T>) -> Result<LocalData<T>> {
    if !(close(p.b[1], ctx.q, ctx) && close(p.b[2], ctx.q, ctx)) {
        return Err(Error::Domain("the logarithmic solution at 0 needs b2 = b3 = q".into()));
    }
    let mut p = *p;
    p.b = [ctx.q; 3];
    LocalData::new(&p, Side::Zero, ladder, ctx)
}

/// Logarithmic solution at infinity for `a = (a, a, a)`, with `J = [[1/a,1,0],[0,1/a,1],[0,0,1/a]]`.
pub fn local_solution_infinity_log<T: Real>(
    p: &HyperParams<T>,
    ladder: Ladder<T>,
    ctx: &QContext<T>,
) -> Result<LocalData<T>> {
    if !(close(p.a[1], p.a[0], ctx) && close(p.a[2], p.a[0], ctx)) {
        return Err(Error::Domain("the logarithmic solution at infinity needs a1 = a2 = a3".into()));
    }
    let mut p = *p;
    p.a = [p.a[0]; 3];
    LocalData::new(&p, Side::Infinity, ladder, ctx)
}

/// Y evaluated at `z` through the q-shift recursion of the system.
pub fn extend_solution<T: Real>(local: &LocalData<T>, z: Complex<T>) -> Result<Mat3<T>> {
    local.solution(z)
}

/// `P diag(f(l_i)) P^{-1}` for a semi-simple `d`, independent of the diagonalizer.
pub(crate) fn conjugated_diagonal<T: Real>(
    d: &Mat3<T>,
    f: impl Fn(Complex<T>) -> Result<Complex<T>>,
) -> Result<Mat3<T>> {
    let off = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|(i, j)| i != j);
    if off.clone().all(|(i, j)| d.m[i][j] == zero()) {
        let g = d.diagonal();
        return Ok(Mat3::diag([f(g[0])?, f(g[1])?, f(g[2])?]));
    }
    let e = eig3(d, T::lit(T::EPS_CLUSTER))?;
    let vals = e.values;
    let fv = Mat3::diag([f(vals[0])?, f(vals[1])?, f(vals[2])?]);
    Ok(e.basis * fv * e.basis.inverse()?)
}

fn e_zero<T: Real>(dp: &DunfordPair<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    let ed = conjugated_diagonal(&dp.d, |l| qcharacter(l, z, ctx))?;
    let n = dp.u - Mat3::identity();
    if n.max_abs() == T::zero() {
        return Ok(ed);
    }
    let l = lq(z, ctx)?;
    let eu = Mat3::identity() + n * l + n * n * binom(l, 2);
    Ok(ed * eu)
}

/// `e_J(z) = e_D(z) e_U(z)` with `e_U = sum binom(ell_q, k) (U - I)^k`.
/// At infinity `e_J(z) = e^{(0)}_{J^{-1}}(1/z)`.
pub fn e_matrix<T: Real>(j: &Mat3<T>, z: Complex<T>, side: Side, ctx: &QContext<T>) -> Result<Mat3<T>> {
    match side {
        Side::Zero => e_matrix_with(&dunford(j)?, z, side, ctx),
        Side::Infinity => e_zero(&dunford(&j.inverse()?)?, z.inv(), ctx),
    }
}

fn e_matrix_with<T: Real>(dp: &DunfordPair<T>, z: Complex<T>, side: Side, ctx: &QContext<T>) -> Result<Mat3<T>> {
    match side {
        Side::Zero => e_zero(dp, z, ctx),
        Side::Infinity => {
            let inv = DunfordPair { d: dp.d.inverse()?, u: dp.u.inverse()? };
            e_zero(&inv, z.inv(), ctx)
        }
    }
}
