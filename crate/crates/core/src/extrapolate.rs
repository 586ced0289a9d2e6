//! Richardson extrapolation along geometric parameter ladders.
//!
//! Each rung averages `f(eps w^k)` over the `K`-th roots of unity `w^k`. For `f`
//! analytic near 0 apart from a removable singularity, the average is
//! `f(0) + c_K eps^K + c_2K eps^2K + ...`, and the tableau eliminates those powers.
//! `K = 1` is the plain real ladder.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat3::Mat3;
use crate::scalar::Real;

/// Ladder `eps_k = eps0 * ratio^k`, `k = 0..levels`, each rung averaged over `rotations` directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ladder<T: Real> {
    pub eps0: T,
    pub levels: usize,
    pub ratio: T,
    pub rotations: usize,
}

impl<T: Real> Default for Ladder<T> {
    fn default() -> Self {
        Self { eps0: T::lit(0.1), levels: 3, ratio: T::lit(0.5), rotations: 8 }
    }
}

impl<T: Real> Ladder<T> {
    /// Real ladder with halving steps.
    pub fn new(eps0: T, levels: usize) -> Self {
        Self { eps0, levels, ratio: T::lit(0.5), rotations: 1 }
    }

    pub fn with_ratio(self, ratio: T) -> Self {
        Self { ratio, ..self }
    }

    pub fn with_rotations(self, rotations: usize) -> Self {
        Self { rotations: rotations.max(1), ..self }
    }

    pub fn steps(&self) -> Vec<T> {
        let mut e = self.eps0;
        (0..self.levels)
            .map(|_| {
                let v = e;
                e = e * self.ratio;
                v
            })
            .collect()
    }

    /// Order of the leading error term of a rung, `eps^order`.
    pub fn order(&self) -> usize {
        self.rotations.max(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extrapolated<T: Real> {
    pub value: Mat3<T>,
    /// Relative change between the last two diagonal entries of the tableau.
    pub error_estimate: T,
    /// Observed convergence order of the rung sequence; `None` when it is constant.
    pub observed_order: Option<T>,
}

/// Richardson tableau for samples taken at `eps0 ratio^k`, assuming an expansion
/// in powers of `eps^order`.
pub fn richardson<T: Real>(samples: &[Mat3<T>], ratio: T, order: usize) -> Extrapolated<T> {
    let n = samples.len();
    let mut row: Vec<Mat3<T>> = Vec::new();
    let mut diag = Vec::with_capacity(n);
    let base = ratio.recip().powi(order as i32);
    for (k, s) in samples.iter().enumerate() {
        let mut new_row = vec![*s];
        for m in 1..=k {
            let f = base.powi(m as i32);
            let v = (new_row[m - 1] * f - row[m - 1]) * (T::one() / (f - T::one()));
            new_row.push(v);
        }
        diag.push(new_row[k]);
        row = new_row;
    }
    let value = diag[n - 1];
    let scale = value.norm().max(T::min_positive_value());
    let error_estimate = if n >= 2 { (diag[n - 1] - diag[n - 2]).norm() / scale } else { T::infinity() };
    let observed_order = observed_order(samples, scale, ratio);
    Extrapolated { value, error_estimate, observed_order }
}

/// Order `p` of `|f_k - f_{k+1}| ~ eps_k^p`, from the ratios of successive
/// differences at the two smallest steps, with the `O(eps)` drift of the ratio removed.
fn observed_order<T: Real>(samples: &[Mat3<T>], scale: T, ratio: T) -> Option<T> {
    let d: Vec<T> = samples.windows(2).map(|w| (w[0] - w[1]).norm()).collect();
    if d.len() < 2 || d.iter().any(|&x| x <= T::epsilon() * T::lit(64.0) * scale) {
        return None;
    }
    let lr = -ratio.ln();
    let r: Vec<T> = d.windows(2).map(|w| (w[0] / w[1]).ln() / lr).collect();
    let n = r.len();
    if n >= 2 {
        Some(r[n - 1] * T::lit(2.0) - r[n - 2])
    } else {
        Some(r[0])
    }
}

/// Evaluates `f` along the ladder and extrapolates to `eps = 0`.
pub fn ladder_limit<T: Real>(
    ladder: &Ladder<T>,
    mut f: impl FnMut(Complex<T>) -> Result<Mat3<T>>,
) -> Result<Extrapolated<T>> {
    let k = ladder.order();
    let kt = T::from_usize(k).unwrap();
    let w: Vec<Complex<T>> =
        (0..k).map(|j| Complex::from_polar(T::one(), T::TAU() * T::from_usize(j).unwrap() / kt)).collect();
    let mut samples = Vec::with_capacity(ladder.levels);
    for e in ladder.steps() {
        let mut acc = Mat3::zero();
        for wj in &w {
            acc = acc + f(*wj * e)?;
        }
        samples.push(acc * kt.recip());
    }
    let out = richardson(&samples, ladder.ratio, k);
    if !out.value.is_finite() || !(out.error_estimate < T::lit(1e-3)) {
        return Err(Error::ExtrapolationDiverged(format!(
            "tableau change {:e} after {} levels",
            out.error_estimate.f64(),
            ladder.levels
        )));
    }
    Ok(out)
}
