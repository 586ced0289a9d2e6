//! Polar-spiral arithmetic on `C* = U x q^R`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qseries::QContext;
use crate::scalar::{two_pi_i, Real};

/// `value = u q^omega` with `|u| = 1` and `omega` real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpiralPoint<T: Real> {
    pub value: Complex<T>,
    pub u: Complex<T>,
    pub omega: T,
}

impl<T: Real> SpiralPoint<T> {
    pub fn recompose(&self, ctx: &QContext<T>) -> Complex<T> {
        self.u * ctx.powr(self.omega)
    }
}

/// Outcome of a `q^Z` membership test, with the measured relative distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpiralVerdict<T: Real> {
    pub member: bool,
    pub nearest_k: i64,
    pub distance: T,
}

pub fn decompose<T: Real>(c: Complex<T>, ctx: &QContext<T>) -> Result<SpiralPoint<T>> {
    if c.norm() == T::zero() || !c.norm().is_finite() {
        return Err(Error::Domain("spiral decomposition needs a finite nonzero value".into()));
    }
    let omega = c.norm().ln() / ctx.q.norm().ln();
    let mut u = c * (-(ctx.log_q() * omega)).exp();
    u = u / u.norm();
    Ok(SpiralPoint { value: c, u, omega })
}

/// Whether `c` lies within `eps_spiral` (relative) of `q^k`, `k = round(omega)`.
pub fn in_q_spiral<T: Real>(c: Complex<T>, ctx: &QContext<T>) -> Result<SpiralVerdict<T>> {
    let p = decompose(c, ctx)?;
    let k = p.omega.round();
    let kk = k.to_i64().unwrap_or(i64::MAX);
    let qk = if k.abs() < T::lit(1000.0) { ctx.powi(kk as i32) } else { ctx.powr(k) };
    let distance = (c - qk).norm() / qk.norm();
    Ok(SpiralVerdict { member: distance < ctx.eps_spiral, nearest_k: kk, distance })
}

/// `log_q(c) = omega + i phi / log q` with `phi = arg u` in `[0, 2 pi)`.
///
/// The cut is the spiral `q^R`; values approaching it counterclockwise jump by
/// `2 pi i / log q = -1/tau`.
pub fn log_q<T: Real>(c: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    let p = decompose(c, ctx)?;
    let mut phi = p.u.arg();
    if phi < T::zero() {
        phi = phi + T::TAU();
    }
    Ok(Complex::new(p.omega, T::zero()) + Complex::new(T::zero(), phi) / ctx.log_q())
}

/// The twisting endomorphism `g_z(u q^omega) = z^omega = exp(log q * log_q(z) * omega)`, with `g_z(q) = z`.
pub fn g_endomorphism<T: Real>(z: Complex<T>, lambda: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    let lz = log_q(z, ctx)?;
    let p = decompose(lambda, ctx)?;
    Ok((ctx.log_q() * lz * p.omega).exp())
}

/// Projection on the unit-circle factor.
pub fn gamma1<T: Real>(c: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok(decompose(c, ctx)?.u)
}

/// `gamma2(u q^omega) = exp(2 pi i omega)`.
pub fn gamma2<T: Real>(c: Complex<T>, ctx: &QContext<T>) -> Result<Complex<T>> {
    Ok((two_pi_i::<T>() * decompose(c, ctx)?.omega).exp())
}
