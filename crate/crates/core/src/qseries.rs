//! q-Pochhammer symbols, Jacobi theta, q-characters, the q-logarithm and `3phi2`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{one, zero, Real};
use crate::spiral;

/// Hard cap on the number of terms any series or product may use.
pub const MAX_TERMS: usize = 10_000;

/// The deformation parameter together with the numerical policy.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QContext<T: Real> {
    pub q: Complex<T>,
    /// Principal choice with `q = exp(-2 pi i tau)`.
    pub tau: Complex<T>,
    pub eps_trunc: T,
    pub eps_spiral: T,
    pub max_terms: usize,
    #[serde(skip)]
    log_q: Complex<T>,
}

impl<T: Real> QContext<T> {
    pub fn new(q: Complex<T>) -> Result<Self> {
        let m = q.norm();
        if !(m > T::zero() && m < T::one()) {
            return Err(Error::InvalidQ(m.f64()));
        }
        let log_q = q.ln();
        let tau = log_q * Complex::new(T::zero(), T::one()) / T::TAU();
        Ok(Self {
            q,
            tau,
            eps_trunc: T::lit(T::EPS_TRUNC),
            eps_spiral: T::lit(T::EPS_SPIRAL),
            max_terms: MAX_TERMS,
            log_q,
        })
    }

    pub fn real(q: T) -> Result<Self> {
        Self::new(Complex::new(q, T::zero()))
    }

    pub fn with_eps(mut self, eps_trunc: T, eps_spiral: T) -> Result<Self> {
        if !(eps_trunc > T::zero()) || !(eps_spiral > T::zero()) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        self.eps_trunc = eps_trunc;
        self.eps_spiral = eps_spiral;
        Ok(self)
    }

    pub fn with_max_terms(mut self, n: usize) -> Self {
        self.max_terms = n;
        self
    }

    /// Principal logarithm of q.
    pub fn log_q(&self) -> Complex<T> {
        self.log_q
    }

    /// `q^y = exp(y log q)` on the fixed branch.
    pub fn pow(&self, y: Complex<T>) -> Complex<T> {
        (y * self.log_q).exp()
    }

    pub fn powr(&self, y: T) -> Complex<T> {
        (self.log_q * y).exp()
    }

    pub fn powi(&self, k: i32) -> Complex<T> {
        self.q.powi(k)
    }

    /// Whether `q` is real and positive (the primary regime).
    pub fn q_is_real(&self) -> bool {
        self.q.im == T::zero() && self.q.re > T::zero()
    }
}

/// Truncation diagnostics attached to every series or product evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationReport<T: Real> {
    pub terms_used: usize,
    pub tail_bound: T,
    pub converged: bool,
}

/// `(a; q)_n`.
pub fn qpochhammer_finite<T: Real>(a: Complex<T>, ctx: &QContext<T>, n: usize) -> Complex<T> {
    let mut p = one();
    let mut x = a;
    for _ in 0..n {
        p = p * (one::<T>() - x);
        x = x * ctx.q;
    }
    p
}

/// `(a; q)_inf`, truncated once `sum_{k >= N} |a||q|^k` drops below `eps_trunc`.
pub fn qpochhammer_infinite<T: Real>(
    a: Complex<T>,
    ctx: &QContext<T>,
) -> Result<(Complex<T>, TruncationReport<T>)> {
    let aq = ctx.q.norm();
    let mut tail = a.norm() / (T::one() - aq);
    let mut p = one();
    let mut x = a;
    let mut n = 0usize;
    while tail >= ctx.eps_trunc {
        if n >= ctx.max_terms {
            return Err(Error::NonConvergent { terms: n, tail_bound: tail.f64() });
        }
        p = p * (one::<T>() - x);
        x = x * ctx.q;
        tail = tail * aq;
        n += 1;
    }
    Ok((p, TruncationReport { terms_used: n, tail_bound: tail, converged: true }))
}

/// Product of infinite Pochhammer symbols, `(x_1, ..., x_k; q)_inf`.
pub fn qpochhammer_product<T: Real>(xs: &[Complex<T>], ctx: &QContext<T>) -> Result<Complex<T>> {
    let mut p = one();
    for &x in xs {
        p = p * qpochhammer_infinite(x, ctx)?.0;
    }
    Ok(p)
}

/// Bilateral theta series and its first two derivatives on the reference annulus.
fn theta_series<T: Real>(w: Complex<T>, ctx: &QContext<T>) -> Result<([Complex<T>; 3], TruncationReport<T>)> {
    let q = ctx.q;
    let aq = q.norm();
    let aw = w.norm();
    let winv = w.inv();
    // n = 0 term
    let mut s = [one::<T>(), zero(), zero()];
    let mut scale = T::one();
    let mut terms = 1usize;
    let mut tail = T::zero();
    // positive side: t_{n+1} = -q^n w t_n
    let mut t = one::<T>();
    let mut qn = one::<T>();
    let mut n = 0i64;
    loop {
        t = -(t * qn * w);
        qn = qn * q;
        n += 1;
        let nf = T::from_i64(n).unwrap();
        s[0] = s[0] + t;
        s[1] = s[1] + t * nf;
        s[2] = s[2] + t * (nf * (nf - T::one()));
        terms += 1;
        let tn = t.norm();
        scale = scale.max(tn * (T::one() + nf * nf));
        let r = aq.powi(n as i32) * aw;
        if r < T::lit(0.5) {
            let nn = nf + T::one();
            let b = tn * r * (T::one() + nn * nn) / (T::one() - r);
            if b <= ctx.eps_trunc * scale {
                tail = tail + b;
                break;
            }
        }
        if terms >= ctx.max_terms {
            return Err(Error::NonConvergent { terms, tail_bound: f64::INFINITY });
        }
    }
    // negative side: t_{-n-1} = -q^{n+1}/w t_{-n}
    let mut t = one::<T>();
    let mut qn = q;
    let mut n = 0i64;
    loop {
        t = -(t * qn * winv);
        qn = qn * q;
        n += 1;
        let nf = -T::from_i64(n).unwrap();
        s[0] = s[0] + t;
        s[1] = s[1] + t * nf;
        s[2] = s[2] + t * (nf * (nf - T::one()));
        terms += 1;
        let tn = t.norm();
        scale = scale.max(tn * (T::one() + nf * nf));
        let r = aq.powi(n as i32 + 1) / aw;
        if r < T::lit(0.5) {
            let nn = -nf + T::one();
            let b = tn * r * (T::one() + nn * nn) / (T::one() - r);
            if b <= ctx.eps_trunc * scale {
                tail = tail + b;
                break;
            }
        }
        if terms >= ctx.max_terms {
            return Err(Error::NonConvergent { terms, tail_bound: f64::INFINITY });
        }
    }
    let jet = [s[0], s[1] * winv, s[2] * winv * winv];
    Ok((jet, TruncationReport { terms_used: terms, tail_bound: tail, converged: true }))
}

/// `theta(z), theta'(z), theta''(z)` via reduction to `|q|^{1/2} <= |z| <= |q|^{-1/2}`.
///
/// With `w = q^m z` one has `theta(z) = c(z) theta(w)`, `c(z) = (-1)^m q^{m(m-1)/2} z^m`.
pub fn theta_jet<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<[Complex<T>; 3]> {
    Ok(theta_jet_with_report(z, ctx)?.0)
}

pub fn theta_jet_with_report<T: Real>(
    z: Complex<T>,
    ctx: &QContext<T>,
) -> Result<([Complex<T>; 3], TruncationReport<T>)> {
    if z == zero() || !z.norm().is_finite() {
        return Err(Error::Domain("theta needs a finite nonzero argument".into()));
    }
    let omega = z.norm().ln() / ctx.q.norm().ln();
    let m = -omega.round().to_i64().unwrap_or(0);
    if m == 0 {
        return theta_series(z, ctx);
    }
    let mt = T::from_i64(m).unwrap();
    let qm = ctx.powi(m as i32);
    let w = z * qm;
    let (th, rep) = theta_series(w, ctx)?;
    let k = T::from_i64(m * (m - 1) / 2).unwrap();
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let cz = (ctx.log_q() * k + z.ln() * mt).exp() * sign;
    let c1 = cz * mt / z;
    let c2 = cz * (mt * (mt - T::one())) / (z * z);
    let d0 = cz * th[0];
    let d1 = c1 * th[0] + cz * qm * th[1];
    let d2 = c2 * th[0] + c1 * qm * th[1] * T::lit(2.0) + cz * qm * qm * th[2];
    Ok(([d0, d1, d2], rep))
}

/// Jacobi theta `theta_q(z) = (q;q)(z;q)(q/z;q)`, evaluated through the bilateral series.
pub fn theta<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok(theta_jet(z, ctx)?[0])
}

pub fn theta_d1<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok(theta_jet(z, ctx)?[1])
}

pub fn theta_d2<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok(theta_jet(z, ctx)?[2])
}

/// Triple-product evaluation of theta; used as an independent cross-check.
pub fn theta_triple_product<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    if z == zero() {
        return Err(Error::Domain("theta needs a nonzero argument".into()));
    }
    qpochhammer_product(&[ctx.q, z, ctx.q / z], ctx)
}

fn pole_check<T: Real>(w: Complex<T>, what: &str, ctx: &QContext<T>) -> Result<()> {
    let v = spiral::in_q_spiral(w, ctx)?;
    if v.member {
        return Err(Error::Pole(format!("{what} lies on q^Z (nearest power {})", v.nearest_k)));
    }
    Ok(())
}

/// Exponent `k` such that `q^{-k} lambda` lies in the base annulus `|q| < |.| <= 1`.
fn annulus_shift<T: Real>(lambda: Complex<T>, ctx: &QContext<T>) -> i32 {
    let omega = lambda.norm().ln() / ctx.q.norm().ln();
    let r = omega.round();
    let omega = if (omega - r).abs() < T::lit(1e-12) { r } else { omega };
    omega.floor().to_i32().unwrap_or(0)
}

/// q-character `e_lambda(z)`, a solution of `y(qz) = lambda y(z)`.
///
/// On `|q| < |lambda| <= 1` this is `theta(z)/theta(lambda z)`; elsewhere it is
/// extended by `e_{q lambda} = z e_lambda`.
pub fn qcharacter<T: Real>(lambda: Complex<T>, z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    if lambda == zero() || z == zero() {
        return Err(Error::Domain("q-character needs nonzero lambda and z".into()));
    }
    let m = annulus_shift(lambda, ctx);
    let base = lambda * ctx.powi(-m);
    if base == one() {
        return Ok(z.powi(m));
    }
    pole_check(base * z, "lambda z", ctx)?;
    let num = theta(z, ctx)?;
    let den = theta(base * z, ctx)?;
    Ok(num / den * z.powi(m))
}

/// q-logarithm `ell_q(z) = -z theta'(z)/theta(z)`, with `ell_q(qz) = ell_q(z) + 1`.
pub fn lq<T: Real>(z: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    if z == zero() {
        return Err(Error::Domain("ell_q needs a nonzero argument".into()));
    }
    pole_check(z, "z", ctx)?;
    let j = theta_jet(z, ctx)?;
    Ok(-(z * j[1] / j[0]))
}

/// `binom(ell_q(z), k)`.
pub fn lq_binom<T: Real>(z: Complex<T>, ctx: &QContext<T>, k: usize) -> Result<Complex<T>> {
    if k == 0 {
        return Ok(one());
    }
    let l = lq(z, ctx)?;
    Ok(binom(l, k))
}

pub(crate) fn binom<T: Real>(x: Complex<T>, k: usize) -> Complex<T> {
    let mut p = one::<T>();
    for i in 0..k {
        let it = T::from_usize(i).unwrap();
        p = p * (x - it) / (it + T::one());
    }
    p
}

/// `3phi2(a; b; z) = sum (a1,a2,a3;q)_n / (b1,b2,b3;q)_n z^n` with `b1 = q`.
///
/// The ratio of consecutive terms is bounded by
/// `r_n = |z| prod(1 + |a_i||q|^n) / prod(1 - |b_j||q|^n)`, decreasing in n, which
/// gives the tail bound `|t_N| / (1 - r_N)`.
pub fn phi3_2<T: Real>(
    a: [Complex<T>; 3],
    b: [Complex<T>; 3],
    z: Complex<T>,
    ctx: &QContext<T>,
) -> Result<(Complex<T>, TruncationReport<T>)> {
    let az = z.norm();
    if !(az < T::one()) {
        return Err(Error::Divergence(az.f64()));
    }
    let q = ctx.q;
    let aq = q.norm();
    let tiny = T::epsilon() * T::lit(16.0);
    let mut sum = one::<T>();
    let mut t = one::<T>();
    let mut qn = one::<T>();
    let mut qn_abs = T::one();
    let mut scale = T::one();
    let mut n = 0usize;
    loop {
        let mut num = z;
        let mut den = one::<T>();
        for i in 0..3 {
            num = num * (one::<T>() - a[i] * qn);
            let d = one::<T>() - b[i] * qn;
            if d.norm() <= tiny {
                return Err(Error::Pole(format!("denominator (b{};q) vanishes at n = {n}", i + 1)));
            }
            den = den * d;
        }
        t = t * num / den;
        qn = qn * q;
        qn_abs = qn_abs * aq;
        n += 1;
        sum = sum + t;
        let tn = t.norm();
        scale = scale.max(tn);
        // bound on |t_{m+1}/t_m| for all m >= n
        let mut r = az;
        let mut ok = true;
        for i in 0..3 {
            let bd = T::one() - b[i].norm() * qn_abs;
            if bd <= T::zero() {
                ok = false;
                break;
            }
            r = r * (T::one() + a[i].norm() * qn_abs) / bd;
        }
        if ok && r < T::one() {
            let tail = tn * r / (T::one() - r);
            if tail <= ctx.eps_trunc * scale || tn == T::zero() {
                return Ok((sum, TruncationReport { terms_used: n + 1, tail_bound: tail, converged: true }));
            }
        }
        if n + 1 >= ctx.max_terms {
            return Err(Error::NonConvergent { terms: n + 1, tail_bound: f64::INFINITY });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type C = Complex<f64>;

    fn ctx() -> QContext<f64> {
        QContext::real(0.5).unwrap()
    }

    #[test]
    fn finite_pochhammer_examples() {
        let c = ctx();
        assert_eq!(qpochhammer_finite(C::new(3.7, -1.0), &c, 0), C::new(1.0, 0.0));
        assert!((qpochhammer_finite(C::new(0.5, 0.0), &c, 2) - C::new(0.375, 0.0)).norm() < 1e-15);
        assert_eq!(qpochhammer_finite(C::new(1.0, 0.0), &c, 4), C::new(0.0, 0.0));
    }

    #[test]
    fn infinite_pochhammer_matches_long_product() {
        let c = ctx();
        let (v, rep) = qpochhammer_infinite(C::new(0.0, 0.0), &c).unwrap();
        assert_eq!(v, C::new(1.0, 0.0));
        assert_eq!(rep.terms_used, 0);
        for a in [C::new(0.5, 0.0), C::new(8.0, 0.0), C::new(-0.3, 0.7)] {
            let (v, rep) = qpochhammer_infinite(a, &c).unwrap();
            let brute = qpochhammer_finite(a, &c, 200);
            assert!((v - brute).norm() < 1e-12 * brute.norm().max(1.0));
            assert!(rep.converged && rep.tail_bound < 1e-16);
        }
    }

    #[test]
    fn pochhammer_reference_values() {
        // 30-digit reference values
        let c = ctx();
        let (v, _) = qpochhammer_infinite(C::new(0.5, 0.0), &c).unwrap();
        assert!((v.re - 0.288_788_095_086_602_421_278_899_721_93).abs() < 1e-15);
        let (v, _) = qpochhammer_infinite(C::new(8.0, 0.0), &c).unwrap();
        // (8;q) = (1-8)(1-4)(1-2)(1-1)... vanishes: q^{-3} * q^3 = 1
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn cap_reports_non_convergence() {
        let c = QContext::real(0.999_999).unwrap().with_max_terms(50);
        assert!(matches!(qpochhammer_infinite(C::new(0.5, 0.0), &c), Err(Error::NonConvergent { .. })));
    }

    #[test]
    fn theta_zeros_and_reference() {
        let c = ctx();
        assert!(theta(C::new(1.0, 0.0), &c).unwrap().norm() < 1e-15);
        // theta(z) = (1 - z)(q;q)(qz;q)(q/z;q) gives theta'(1) = -(q;q)^3
        let qq = qpochhammer_infinite(c.q, &c).unwrap().0;
        assert!((theta_d1(C::new(1.0, 0.0), &c).unwrap() + qq * qq * qq).norm() < 1e-15);
        let tp = theta_triple_product(C::new(0.3, 0.0), &c).unwrap();
        let s = theta(C::new(0.3, 0.0), &c).unwrap();
        assert!((tp - s).norm() < 1e-12 * s.norm());
        assert!(theta(C::new(0.0, 0.0), &c).is_err());
    }

    #[test]
    fn theta_derivatives_match_finite_differences() {
        let c = ctx();
        for z in [C::new(0.3, 0.2), C::new(-1.7, 0.4), C::new(0.05, -0.01), C::new(9.0, 3.0)] {
            let h = 1e-6 * z.norm();
            let d = (theta(z + h, &c).unwrap() - theta(z - h, &c).unwrap()) / (2.0 * h);
            let j = theta_jet(z, &c).unwrap();
            assert!((d - j[1]).norm() < 1e-6 * j[1].norm(), "{z}");
            let d2 = (theta_d1(z + h, &c).unwrap() - theta_d1(z - h, &c).unwrap()) / (2.0 * h);
            assert!((d2 - j[2]).norm() < 1e-6 * j[2].norm(), "{z}");
        }
    }

    #[test]
    fn character_examples() {
        let c = ctx();
        let z = C::new(0.37, 0.81);
        assert!((qcharacter(C::new(1.0, 0.0), z, &c).unwrap() - 1.0).norm() < 1e-15);
        let lam = C::new(0.3, 0.4);
        let e = qcharacter(lam, z, &c).unwrap();
        let eq = qcharacter(lam * c.q, z, &c).unwrap();
        assert!((eq / e - z).norm() < 1e-12);
        let eqz = qcharacter(lam, c.q * z, &c).unwrap();
        assert!((eqz / e - lam).norm() < 1e-12);
        assert!(matches!(qcharacter(lam, lam.inv() * c.q, &c), Err(Error::Pole(_))));
    }

    #[test]
    fn lq_shift_and_binomials() {
        let c = ctx();
        let z = C::new(0.6, -0.2);
        assert_eq!(lq_binom(z, &c, 0).unwrap(), C::new(1.0, 0.0));
        let l = lq(z, &c).unwrap();
        assert!((lq(c.q * z, &c).unwrap() - l - 1.0).norm() < 1e-12);
        assert!((lq_binom(z, &c, 2).unwrap() - l * (l - 1.0) / 2.0).norm() < 1e-13);
        assert!(matches!(lq(c.q * c.q, &c), Err(Error::Pole(_))));
    }

    #[test]
    fn phi_examples() {
        let c = ctx();
        let q = c.q;
        let a = [C::new(0.3, 0.0), C::new(0.7, 0.1), C::new(0.9, 0.0)];
        let b = [q, C::new(0.2, 0.0), C::new(0.45, 0.0)];
        assert_eq!(phi3_2(a, b, C::new(0.0, 0.0), &c).unwrap().0, C::new(1.0, 0.0));
        let z = C::new(0.4, 0.3);
        let (v, _) = phi3_2([q, q, q], [q, q, q], z, &c).unwrap();
        assert!((v - (1.0 - z).inv()).norm() < 1e-14);
        assert!(matches!(phi3_2(a, b, C::new(1.0, 0.0), &c), Err(Error::Divergence(_))));
        assert!(matches!(phi3_2(a, [q, C::new(2.0, 0.0), b[2]], z, &c), Err(Error::Pole(_))));
    }

    #[test]
    fn phi_matches_sixty_term_sum() {
        let c = ctx();
        let q = c.q;
        let a = [C::new(0.3, 0.0), C::new(0.7, 0.1), C::new(0.9, 0.0)];
        let b = [q, C::new(0.2, 0.0), C::new(0.45, 0.0)];
        let z = C::new(0.2, 0.0);
        let mut brute = C::new(0.0, 0.0);
        for n in 0..60 {
            let mut t = z.powi(n as i32);
            for i in 0..3 {
                t = t * qpochhammer_finite(a[i], &c, n) / qpochhammer_finite(b[i], &c, n);
            }
            brute += t;
        }
        let (v, rep) = phi3_2(a, b, z, &c).unwrap();
        assert!((v - brute).norm() < 1e-12);
        assert!(rep.converged && rep.terms_used < 60);
    }
}
