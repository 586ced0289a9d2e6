//! Birkhoff and twisted connection matrices: the closed form from the
//! Barnes-Mellin-Watson integral, the numeric `(Y_inf)^{-1} Y_0`, and the
//! determinant and minor identities of the twisted matrix.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::{ladder_limit, Extrapolated, Ladder};
use crate::hypersystem::{conjugated_diagonal, vandermonde, HyperParams, LocalData, Side};
use crate::mat3::{minor2, Mat3};
use crate::qseries::{qcharacter, qpochhammer_infinite, theta, QContext};
use crate::scalar::{one, Real};
use crate::spiral::{g_endomorphism, in_q_spiral};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Numeric,
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectionEval<T: Real> {
    pub z: Complex<T>,
    pub p: Mat3<T>,
    pub p_twisted: Mat3<T>,
    pub method: Method,
    /// Relative difference of the two methods, when both ran.
    pub residual_cross: Option<T>,
}

fn poch<T: Real>(x: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok(qpochhammer_infinite(x, ctx)?.0)
}

fn others(k: usize) -> [usize; 2] {
    match k {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

fn off_spiral<T: Real>(x: Complex<T>, what: &str, ctx: &QContext<T>) -> Result<()> {
    let v = in_q_spiral(x, ctx)?;
    if v.member {
        return Err(Error::SpiralCollision(format!("{what} = {x} lies on q^Z (k = {})", v.nearest_k)));
    }
    Ok(())
}

fn theta_quotient_point<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<()> {
    if in_q_spiral(z, ctx)?.member {
        return Err(Error::Pole(format!("theta(z) vanishes at z = {z}")));
    }
    Ok(())
}

/// Checks the generic hypotheses: `a_i/a_j`, `b2/b3`, `b2`, `b3` off `q^Z`.
pub fn check_case_one<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<()> {
    for i in 0..3 {
        for j in i + 1..3 {
            off_spiral(p.a[i] / p.a[j], &format!("a{}/a{}", i + 1, j + 1), ctx)?;
        }
    }
    off_spiral(p.b[1] / p.b[2], "b2/b3", ctx)?;
    off_spiral(p.b[1], "b2", ctx)?;
    off_spiral(p.b[2], "b3", ctx)
}

/// `p_{i,j} = (q a_k/b_j, b_l/a_i; q)_inf / (q b_l/b_j, a_k/a_i; q)_inf`, with k != i and l != j.
/// Indices are 0-based.
pub fn p_coefficient<T: Real>(p: &HyperParams<T>, i: usize, j: usize, ctx: &QContext<T>) -> Result<Complex<T>> {
    if i > 2 || j > 2 {
        return Err(Error::BadIndex);
    }
    let q = ctx.q;
    let (ic, jc) = (others(i), others(j));
    let mut num = one::<T>();
    let mut den = one::<T>();
    for &k in &ic {
        num = num * poch(q / p.b[j] * p.a[k], ctx)?;
        den = den * poch(p.a[k] / p.a[i], ctx)?;
    }
    for &l in &jc {
        num = num * poch(p.b[l] / p.a[i], ctx)?;
        den = den * poch(q / p.b[j] * p.b[l], ctx)?;
    }
    if den.norm() == T::zero() {
        return Err(Error::SpiralCollision(format!("p_{{{},{}}} has a vanishing denominator", i + 1, j + 1)));
    }
    Ok(num / den)
}

/// `M(z)_{ij} = p_{i,j} theta(q a_i z / b_j) / theta(z)`, the matrix with `F0 = F_inf M`.
pub fn bmw_matrix<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    theta_quotient_point(z, ctx)?;
    let tz = theta(z, ctx)?;
    let mut m = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            m.m[i][j] = p_coefficient(p, i, j, ctx)? * theta(ctx.q * p.a[i] * z / p.b[j], ctx)? / tz;
        }
    }
    Ok(m)
}

/// `psi_z(lambda) = e_lambda(z) / g_z(lambda)` at 0, `psi_{1/z}(1/lambda)` at infinity.
pub fn psi<T: Real>(lambda: Complex<T>, z: Complex<T>, side: Side, ctx: &QContext<T>) -> Result<Complex<T>> {
    match side {
        Side::Zero => Ok(qcharacter(lambda, z, ctx)? / g_endomorphism(z, lambda, ctx)?),
        Side::Infinity => psi(lambda.inv(), z.inv(), Side::Zero, ctx),
    }
}

/// `P diag(psi(lambda_i)) P^{-1}` for a semi-simple `d`.
pub fn twist_factor<T: Real>(d: &Mat3<T>, z: Complex<T>, side: Side, ctx: &QContext<T>) -> Result<Mat3<T>> {
    conjugated_diagonal(d, |l| psi(l, z, side, ctx))
}

/// Both local solutions of one equation, with the machinery for `P` and its twist.
#[derive(Clone, Debug, Serialize)]
pub struct Connection<T: Real> {
    pub params: HyperParams<T>,
    pub zero: LocalData<T>,
    pub infinity: LocalData<T>,
    pub ladder: Ladder<T>,
    #[serde(skip)]
    ctx: QContext<T>,
}

impl<T: Real> Connection<T> {
    pub fn new(p: &HyperParams<T>, ctx: &QContext<T>) -> Result<Self> {
        Self::with_ladder(p, Ladder::default(), ctx)
    }

    pub fn with_ladder(p: &HyperParams<T>, ladder: Ladder<T>, ctx: &QContext<T>) -> Result<Self> {
        Ok(Self {
            params: *p,
            zero: LocalData::new(p, Side::Zero, ladder, ctx)?,
            infinity: LocalData::new(p, Side::Infinity, ladder, ctx)?,
            ladder,
            ctx: *ctx,
        })
    }

    pub fn logarithmic(&self) -> bool {
        self.zero.logarithmic || self.infinity.logarithmic
    }

    /// `(Y_inf(z))^{-1} Y_0(z)` from the local solutions.
    pub fn numeric(&self, z: Complex<T>) -> Result<Mat3<T>> {
        let y0 = self.zero.solution(z)?;
        let yi = self.infinity.solution(z)?;
        let yinv = yi.inverse().map_err(|_| Error::SingularSolution(format!("Y_inf is singular at z = {z}")))?;
        Ok(yinv * y0)
    }

    fn perturbed(&self, eps: Complex<T>) -> Result<HyperParams<T>> {
        let b = if self.zero.logarithmic { self.zero.perturbed(eps)?.b } else { self.params.b };
        let a = if self.infinity.logarithmic { self.infinity.perturbed(eps)?.a } else { self.params.a };
        HyperParams::new(a, b[1], b[2], &self.ctx)
    }

    /// `Q(z) = G_inf(z)^{-1} G_0(z)` for the gauges, in closed form: `M(z)` when the
    /// exponents are distinct, otherwise the ladder limit of `S_inf^{-1} M_eps S_0`
    /// with `S = V_eps^{-1} C`.
    pub fn gauge_connection_report(&self, z: Complex<T>) -> Result<(Mat3<T>, Option<Extrapolated<T>>)> {
        if !self.logarithmic() {
            return Ok((bmw_matrix(&self.params, z, &self.ctx)?, None));
        }
        let ctx = &self.ctx;
        let ex = ladder_limit(&self.ladder, |eps| {
            let pe = self.perturbed(eps)?;
            let m = bmw_matrix(&pe, z, ctx)?;
            let s0 = if self.zero.logarithmic {
                vandermonde(pe.exponents(Side::Zero, ctx)).inverse()? * self.zero.basis
            } else {
                Mat3::identity()
            };
            let si = if self.infinity.logarithmic {
                self.infinity.basis.inverse()? * vandermonde(pe.exponents(Side::Infinity, ctx))
            } else {
                Mat3::identity()
            };
            Ok(si * m * s0)
        })?;
        Ok((ex.value, Some(ex)))
    }

    pub fn gauge_connection(&self, z: Complex<T>) -> Result<Mat3<T>> {
        Ok(self.gauge_connection_report(z)?.0)
    }

    /// `(e_inf)^{-1} Q e_0`.
    pub fn closed_form(&self, z: Complex<T>) -> Result<Mat3<T>> {
        let q = self.gauge_connection(z)?;
        let e0 = self.zero.e_matrix(z)?;
        let ei = self.infinity.e_matrix(z)?;
        Ok(ei.inverse()? * q * e0)
    }

    /// `psi_inf(D_inf) P psi_0(D_0)^{-1}`.
    pub fn twist(&self, pm: &Mat3<T>, z: Complex<T>) -> Result<Mat3<T>> {
        let ti = twist_factor(&self.infinity.dunford.d, z, Side::Infinity, &self.ctx)?;
        let t0 = twist_factor(&self.zero.dunford.d, z, Side::Zero, &self.ctx)?;
        Ok(ti * *pm * t0.inverse()?)
    }

    pub fn eval(&self, z: Complex<T>, method: Method) -> Result<ConnectionEval<T>> {
        let (p, residual_cross) = match method {
            Method::ClosedForm => (self.closed_form(z)?, None),
            Method::Numeric => (self.numeric(z)?, None),
            Method::Both => {
                let c = self.closed_form(z)?;
                let n = self.numeric(z)?;
                (c, Some(n.rel_err(&c)))
            }
        };
        let p_twisted = self.twist(&p, z)?;
        Ok(ConnectionEval { z, p, p_twisted, method, residual_cross })
    }

    pub fn ctx(&self) -> &QContext<T> {
        &self.ctx
    }
}

pub fn birkhoff_numeric<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    Connection::new(p, ctx)?.numeric(z)
}

/// `P(z) = (e_inf)^{-1} M(z) e_0` under the generic hypotheses.
pub fn birkhoff_closed_form<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    check_case_one(p, ctx)?;
    Connection::new(p, ctx)?.closed_form(z)
}

/// `diag((1/z)^{-alpha}) M diag(w_j)` with `w_j = z^{-beta_j}` (`z_factor = false`)
/// or `z^{1 - beta_j}` (`z_factor = true`); powers are `g_z`, `g_{1/z}`.
fn twisted_from_m<T: Real>(p: &HyperParams<T>, z: Complex<T>, z_factor: bool, ctx: &QContext<T>) -> Result<Mat3<T>> {
    let m = bmw_matrix(p, z, ctx)?;
    let zi = z.inv();
    let mut out = m;
    for i in 0..3 {
        let left = g_endomorphism(zi, p.a[i], ctx)?.inv();
        for j in 0..3 {
            let right = if z_factor { g_endomorphism(z, ctx.q / p.b[j], ctx)? } else { g_endomorphism(z, p.b[j], ctx)?.inv() };
            out.m[i][j] = left * m.m[i][j] * right;
        }
    }
    Ok(out)
}

/// The twisted matrix `psi_inf(D_inf) P(z) psi_0(D_0)^{-1}`. In the generic case this
/// equals `diag((1/z)^{-alpha}) M(z) diag(z^{1-beta})`, that is `z` times
/// [`twisted_closed_form`].
pub fn twisted_birkhoff<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    if check_case_one(p, ctx).is_ok() {
        return twisted_from_m(p, z, true, ctx);
    }
    let c = Connection::new(p, ctx)?;
    let pm = c.closed_form(z)?;
    c.twist(&pm, z)
}

/// `diag((1/z)^{-alpha}) M(z) diag(z^{-beta})`, the normalization of the determinant
/// and minor formulas.
pub fn twisted_closed_form<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    check_case_one(p, ctx)?;
    twisted_from_m(p, z, false, ctx)
}

fn det_body<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    check_case_one(p, ctx)?;
    theta_quotient_point(z, ctx)?;
    let q = ctx.q;
    let (a, b) = (p.a, p.b);
    let ia = [a[0].inv(), a[1].inv(), a[2].inv()];
    let num = (one::<T>() - q / b[1]) * (one::<T>() - q / b[2]) * (b[1].inv() - b[2].inv());
    let den = (ia[1] - ia[0]) * (ia[2] - ia[0]) * (ia[1] - ia[2]);
    let mut pw = one::<T>();
    for i in 0..3 {
        pw = pw / g_endomorphism(z.inv(), a[i], ctx)? / g_endomorphism(z, b[i], ctx)?;
    }
    let k = q * q * p.prod_a() / (b[1] * b[2]);
    Ok(q * num / den * pw * theta(k * z, ctx)? / theta(z, ctx)?)
}

/// Closed form of `det` of [`twisted_closed_form`], with constant `+q`.
pub fn det_formula<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    det_body(p, z, ctx)
}

/// The determinant formula with the constant `-q` as printed in the literature;
/// it equals `-det`.
pub fn det_formula_as_printed<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok(-det_body(p, z, ctx)?)
}

/// Predicted zero spiral of the determinant, `b2 b3 / (q^2 a1 a2 a3) q^Z`.
pub fn det_zero_spiral<T: Real>(p: &HyperParams<T>, ctx: &QContext<T>) -> Complex<T> {
    p.coefficient_pole(ctx)
}

/// Closed form `kappa` of the minor `(i1,i2) x (j1,j2)` (1-based, increasing) of
/// [`twisted_closed_form`].
pub fn minor_formula<T: Real>(
    p: &HyperParams<T>,
    rows: (usize, usize),
    cols: (usize, usize),
    z: Complex<T>,
    ctx: &QContext<T>,
) -> Result<Complex<T>> {
    let ok = |(x, y): (usize, usize)| (1..=3).contains(&x) && (1..=3).contains(&y) && x < y;
    if !ok(rows) || !ok(cols) {
        return Err(Error::BadIndex);
    }
    check_case_one(p, ctx)?;
    theta_quotient_point(z, ctx)?;
    let q = ctx.q;
    let (a, b) = (p.a, p.b);
    let (i1, i2, j1, j2) = (rows.0 - 1, rows.1 - 1, cols.0 - 1, cols.1 - 1);
    let i3 = 3 - i1 - i2;
    let j3 = 3 - j1 - j2;
    let qq = poch(q, ctx)?;
    let mut num = poch(q / b[j1] * a[i3], ctx)?
        * poch(b[j3] / a[i1], ctx)?
        * poch(q / b[j2] * a[i3], ctx)?
        * poch(b[j3] / a[i2], ctx)?;
    num = num * theta(a[i1] / a[i2], ctx)? * theta(b[j1] / b[j2], ctx)?;
    let mut den = one::<T>();
    for (jj, ii) in [(j1, i1), (j2, i2)] {
        for l in others(jj) {
            den = den * poch(q / b[jj] * b[l], ctx)?;
        }
        for k in others(ii) {
            den = den * poch(a[k] / a[ii], ctx)?;
        }
    }
    let pw = (g_endomorphism(z.inv(), a[i1], ctx)? * g_endomorphism(z.inv(), a[i2], ctx)?).inv()
        * (g_endomorphism(z, b[j1], ctx)? * g_endomorphism(z, b[j2], ctx)?).inv();
    let k = q * q * a[i1] * a[i2] / (b[j1] * b[j2]);
    Ok(-q / (qq * qq) * (a[i2] / b[j1]) * num / den * pw * theta(k * z, ctx)? / theta(z, ctx)?)
}

/// Largest deviation between the nine minors of [`twisted_closed_form`] and their
/// closed forms, relative to `max(|kappa|)`.
pub fn minor_mismatch<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<T> {
    let d = twisted_closed_form(p, z, ctx)?;
    let pairs = [(1, 2), (1, 3), (2, 3)];
    let mut worst = T::zero();
    for r in pairs {
        for c in pairs {
            let m = minor2(&d, r, c)?;
            let k = minor_formula(p, r, c, z, ctx)?;
            worst = worst.max((m - k).norm() / k.norm());
        }
    }
    Ok(worst)
}

/// Twisted connection matrix in the logarithmic cases: closed form of `Q` by the
/// parameter ladder, then `psi_inf(D_inf) (e_inf)^{-1} Q e_0 psi_0(D_0)^{-1}`.
pub fn connection_logarithmic<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Mat3<T>> {
    let c = Connection::new(p, ctx)?;
    if !c.logarithmic() {
        return Err(Error::Domain("no coinciding exponents; use twisted_birkhoff".into()));
    }
    let pm = c.closed_form(z)?;
    c.twist(&pm, z)
}

/// Closed form of the `(3,1)` entry of the logarithmic twisted matrix when the
/// exponents at infinity are distinct: `(1/z)^{-alpha_3} p_{3,1} theta(a_3 z)/theta(z)`.
pub fn logarithmic_entry31<T: Real>(p: &HyperParams<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    theta_quotient_point(z, ctx)?;
    let w = g_endomorphism(z.inv(), p.a[2], ctx)?.inv();
    Ok(w * p_coefficient(p, 2, 0, ctx)? * theta(p.a[2] * z, ctx)? / theta(z, ctx)?)
}

/// Zero of `det` of the numeric twisted matrix near `z0`, by Newton iteration with
/// a centred-difference derivative.
pub fn locate_det_zero<T: Real>(c: &Connection<T>, z0: Complex<T>) -> Result<Complex<T>> {
    // det(Y_inf) blows up on the spiral, so the ratio is formed from determinants
    let f = |z: Complex<T>| -> Result<Complex<T>> {
        let ctx = c.ctx();
        let ti = twist_factor(&c.infinity.dunford.d, z, Side::Infinity, ctx)?;
        let t0 = twist_factor(&c.zero.dunford.d, z, Side::Zero, ctx)?;
        let y0 = c.zero.solution(z)?;
        let yi = c.infinity.solution(z)?;
        Ok(ti.det() * y0.det() / (yi.det() * t0.det()))
    };
    let mut z = z0;
    let h = T::lit(1e-5);
    let mut last = T::infinity();
    let tol = T::lit(1e-9).max(T::epsilon() * T::lit(100.0)) * z0.norm();
    for _ in 0..60 {
        let hz = Complex::new(h * z.norm(), T::zero());
        // the gauge extension refuses points on its own pole chain, which is where the zero sits
        let fz = match f(z) {
            Ok(v) => v,
            Err(Error::PoleChain { .. } | Error::SingularSolution(_)) if last <= tol => return Ok(z),
            Err(e) => return Err(e),
        };
        let d = (f(z + hz)? - f(z - hz)?) / (hz * T::lit(2.0));
        if d.norm() == T::zero() {
            break;
        }
        let step = fz / d;
        z = z - step;
        last = step.norm();
        if last <= tol {
            return Ok(z);
        }
    }
    Err(Error::Domain(format!("no determinant zero found near {z0}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    type C = Complex<f64>;

    fn ctx() -> QContext<f64> {
        QContext::real(0.5).unwrap()
    }

    fn generic(c: &QContext<f64>) -> HyperParams<f64> {
        HyperParams::from_exponents([0.1, 0.2, 0.4], 0.15, 0.33, c).unwrap()
    }

    // frozen from a 40-digit evaluation of F_inf^{-1} F_0 built from the series and the q-shift recursion
    #[test]
    fn bmw_matches_frozen_oracle() {
        let c = ctx();
        let p = generic(&c);
        let z = C::new(3.0, 0.7);
        let m = bmw_matrix(&p, z, &c).unwrap();
        let want = [
            ((0, 0), C::new(0.53201240862599312, 0.12303181326558)),
            ((1, 2), C::new(-0.42468868324656291, 0.26813510738681015)),
            ((2, 1), C::new(0.16421796895426873, 0.057458051496523947)),
        ];
        for ((i, j), w) in want {
            assert!((m.m[i][j] - w).norm() < 1e-13 * w.norm(), "{i}{j}");
        }
        let conn = Connection::new(&p, &c).unwrap();
        let g0 = conn.zero.gauge(z).unwrap();
        let gi = conn.infinity.gauge(z).unwrap();
        assert!((gi.inverse().unwrap() * g0).rel_err(&m) < 1e-11);
    }

    #[test]
    fn numeric_and_closed_form_agree() {
        let c = ctx();
        let p = generic(&c);
        let conn = Connection::new(&p, &c).unwrap();
        for z in [C::new(0.7, 0.2), C::new(-0.5, 0.6), C::new(0.3, -0.75)] {
            let e = conn.eval(z, Method::Both).unwrap();
            assert!(e.residual_cross.unwrap() < 1e-10, "{z}");
            let pq = conn.closed_form(c.q * z).unwrap();
            assert!(pq.entrywise_rel_err(&e.p, 1e-12) < 1e-9, "ellipticity at {z}");
            let tb = twisted_birkhoff(&p, z, &c).unwrap();
            assert!(tb.rel_err(&e.p_twisted) < 1e-10);
            let disp = twisted_closed_form(&p, z, &c).unwrap();
            assert!(tb.rel_err(&(disp * z)) < 1e-13);
        }
    }

    #[test]
    fn determinant_and_minors() {
        let c = ctx();
        let p = generic(&c);
        for z in [C::new(0.7, 0.2), C::new(-0.5, 0.6), C::new(3.0, 0.7)] {
            let d = twisted_closed_form(&p, z, &c).unwrap().det();
            let f = det_formula(&p, z, &c).unwrap();
            assert!((d - f).norm() < 1e-12 * f.norm());
            assert!((det_formula_as_printed(&p, z, &c).unwrap() + d).norm() < 1e-12 * f.norm());
            assert!(minor_mismatch(&p, z, &c).unwrap() < 1e-12);
            let step = det_formula(&p, c.q * z, &c).unwrap() / f;
            assert!((step - 8.0).norm() < 1e-11, "{step}");
        }
        assert!(matches!(minor_formula(&p, (2, 1), (1, 2), C::new(0.7, 0.2), &c), Err(Error::BadIndex)));
    }

    #[test]
    fn twist_is_identity_at_one_and_basis_free() {
        let c = ctx();
        let z = C::new(0.6, 0.3);
        let t = twist_factor(&Mat3::identity(), z, Side::Zero, &c).unwrap();
        assert!(t.rel_err(&Mat3::identity()) < 1e-15);
        let d = Mat3::diag([C::new(0.8, 0.0), C::new(0.3, 0.1), C::new(0.55, -0.2)]);
        let s1 = Mat3::from_real_rows([[1.0, 0.2, 0.0], [0.1, 1.0, 0.5], [0.0, 0.3, 1.0]]);
        let s2 = Mat3::from_real_rows([[2.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 3.0]]);
        for side in [Side::Zero, Side::Infinity] {
            let m = s1 * d * s1.inverse().unwrap();
            let t1 = twist_factor(&m, z, side, &c).unwrap();
            let direct = s1 * twist_factor(&d, z, side, &c).unwrap() * s1.inverse().unwrap();
            assert!(t1.rel_err(&direct) < 1e-10);
            let m2 = s2 * d * s2.inverse().unwrap();
            let t2 = s2 * twist_factor(&d, z, side, &c).unwrap() * s2.inverse().unwrap();
            assert!(twist_factor(&m2, z, side, &c).unwrap().rel_err(&t2) < 1e-10);
        }
    }

    #[test]
    fn case_three_entry() {
        let c = ctx();
        let p = HyperParams::from_exponents([0.1, 0.2, 0.4], 1.0, 1.0, &c).unwrap();
        let conn = Connection::new(&p, &c).unwrap();
        for z in [C::new(0.7, 0.2), C::new(-0.5, 0.6)] {
            let e = conn.eval(z, Method::Both).unwrap();
            assert!(e.residual_cross.unwrap() < 1e-6, "{:?}", e.residual_cross);
            let w = logarithmic_entry31(&p, z, &c).unwrap();
            assert!((e.p_twisted.m[2][0] - w).norm() < 1e-6 * w.norm());
            let pq = conn.closed_form(c.q * z).unwrap();
            assert!(pq.rel_err(&e.p) < 1e-6);
        }
    }
}
