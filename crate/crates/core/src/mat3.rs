//! 3x3 complex matrices, eigen/Jordan structure, multiplicative Dunford
//! decomposition, the symmetric-square embedding `rho` and group-membership tests.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use serde::Serialize;

use crate::dense;
use crate::error::{Error, Result};
use crate::scalar::{one, zero, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Mat3<T: Real> {
    pub m: [[Complex<T>; 3]; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Mat2<T: Real> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Index<(usize, usize)> for Mat3<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.m[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.m[i][j]
    }
}

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Self { m: [[zero(); 3]; 3] }
    }

    pub fn identity() -> Self {
        Self::diag([one(), one(), one()])
    }

    pub fn from_rows(m: [[Complex<T>; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn from_real_rows(m: [[f64; 3]; 3]) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = Complex::new(T::lit(m[i][j]), T::zero());
            }
        }
        out
    }

    pub fn from_cols(c: [[Complex<T>; 3]; 3]) -> Self {
        Self::from_rows(c).transpose()
    }

    pub fn diag(d: [Complex<T>; 3]) -> Self {
        let mut out = Self { m: [[zero(); 3]; 3] };
        for i in 0..3 {
            out.m[i][i] = d[i];
        }
        out
    }

    pub fn scalar(c: Complex<T>) -> Self {
        Self::diag([c, c, c])
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    pub fn col(&self, j: usize) -> [Complex<T>; 3] {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    pub fn set_col(&mut self, j: usize, v: [Complex<T>; 3]) {
        for i in 0..3 {
            self.m[i][j] = v[i];
        }
    }

    pub fn row(&self, i: usize) -> [Complex<T>; 3] {
        self.m[i]
    }

    pub fn diagonal(&self) -> [Complex<T>; 3] {
        [self.m[0][0], self.m[1][1], self.m[2][2]]
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn det(&self) -> Complex<T> {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let (r0, r1) = others(j);
                let (c0, c1) = others(i);
                let cof = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                out.m[i][j] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
        out
    }

    /// Inverse via the adjugate; fails when `|det|` is negligible against `|M|^3`.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let s = self.norm();
        if !(d.norm() > T::epsilon() * s * s * s) {
            return Err(Error::Domain("singular matrix".into()));
        }
        Ok(self.adjugate() * d.inv())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.m.iter().flatten().map(|x| x.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().map(|x| x.norm()).fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// `|self - other| / |other|` in the Frobenius norm.
    pub fn rel_err(&self, other: &Self) -> T {
        (*self - *other).norm() / other.norm().max(T::min_positive_value())
    }

    /// Largest entrywise relative error `|a_ij - b_ij| / max(|b_ij|, floor * |B|)`.
    pub fn entrywise_rel_err(&self, other: &Self, floor: T) -> T {
        let s = other.max_abs() * floor;
        let mut e = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let d = (self.m[i][j] - other.m[i][j]).norm() / other.m[i][j].norm().max(s).max(T::min_positive_value());
                e = e.max(d);
            }
        }
        e
    }

    pub fn mul_vec(&self, v: [Complex<T>; 3]) -> [Complex<T>; 3] {
        let mut out = [zero(); 3];
        for i in 0..3 {
            out[i] = self.m[i][0] * v[0] + self.m[i][1] * v[1] + self.m[i][2] * v[2];
        }
        out
    }

    pub fn is_upper_triangular(&self, tol: T) -> bool {
        let s = self.max_abs() * tol;
        self.m[1][0].norm() <= s && self.m[2][0].norm() <= s && self.m[2][1].norm() <= s
    }

    pub fn is_lower_triangular(&self, tol: T) -> bool {
        self.transpose().is_upper_triangular(tol)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = f(self.m[i][j]);
            }
        }
        out
    }

    pub fn to_f64(&self) -> [[[f64; 2]; 3]; 3] {
        let mut out = [[[0.0; 2]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = [self.m[i][j].re.f64(), self.m[i][j].im.f64()];
            }
        }
        out
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] = self.m[i][j] + o.m[i][j];
            }
        }
        self
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] = self.m[i][j] - o.m[i][j];
            }
        }
        self
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        out
    }
}

impl<T: Real> Mul<Complex<T>> for Mat3<T> {
    type Output = Self;
    fn mul(self, c: Complex<T>) -> Self {
        self.map(|x| x * c)
    }
}

impl<T: Real> Mul<T> for Mat3<T> {
    type Output = Self;
    fn mul(self, c: T) -> Self {
        self.map(|x| x * c)
    }
}

impl<T: Real> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::new(one(), zero(), zero(), one())
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Self {
        let d = self.det().inv();
        Self::new(self.m[1][1] * d, -self.m[0][1] * d, -self.m[1][0] * d, self.m[0][0] * d)
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// A Jordan block `value * I + N` of the given size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JordanBlock<T: Real> {
    pub value: Complex<T>,
    pub size: usize,
}

/// Eigenvalues with multiplicity and a Jordan basis.
///
/// `M * basis = basis * J` where `J` is assembled from `blocks` in order, with
/// ones on the superdiagonal inside each block. When every block has size one,
/// `basis` is an eigenvector matrix with unit columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigen3<T: Real> {
    pub values: [Complex<T>; 3],
    pub basis: Mat3<T>,
    pub blocks: Vec<JordanBlock<T>>,
}

impl<T: Real> Eigen3<T> {
    pub fn is_diagonalizable(&self) -> bool {
        self.blocks.iter().all(|b| b.size == 1)
    }

    pub fn jordan_matrix(&self) -> Mat3<T> {
        let mut j = Mat3::zero();
        let mut k = 0;
        for b in &self.blocks {
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
}

/// Roots of `x^3 - c2 x^2 + c1 x - c0` (Cardano, then Newton polishing).
fn cubic_roots<T: Real>(c2: Complex<T>, c1: Complex<T>, c0: Complex<T>) -> [Complex<T>; 3] {
    let three = T::lit(3.0);
    let s = c2 / three;
    let p = c1 - s * s * three;
    let r = -(s * s * s * T::lit(2.0)) + c1 * s - c0;
    let disc = (r * r / T::lit(4.0) + p * p * p / T::lit(27.0)).sqrt();
    let h = -r / T::lit(2.0);
    let u3 = if (h + disc).norm() >= (h - disc).norm() { h + disc } else { h - disc };
    let mut x = [zero::<T>(); 3];
    if u3.norm() == T::zero() {
        x = [zero(); 3];
    } else {
        let u = u3.powf(T::one() / three);
        let w = Complex::from_polar(T::one(), T::TAU() / three);
        let mut uk = u;
        for xi in x.iter_mut() {
            *xi = uk - p / (uk * three);
            uk = uk * w;
        }
    }
    let f = |l: Complex<T>| ((l - c2) * l + c1) * l - c0;
    let df = |l: Complex<T>| (l * three - c2 * T::lit(2.0)) * l + c1;
    let mut out = [zero::<T>(); 3];
    for i in 0..3 {
        let mut l = x[i] + s;
        for _ in 0..4 {
            let d = df(l);
            if d.norm() == T::zero() {
                break;
            }
            let cand = l - f(l) / d;
            if f(cand).norm() < f(l).norm() {
                l = cand;
            } else {
                break;
            }
        }
        out[i] = l;
    }
    out
}

/// Eigenvalues of a 3x3 matrix. Triangular inputs use their diagonal exactly.
pub fn eigenvalues3<T: Real>(m: &Mat3<T>) -> [Complex<T>; 3] {
    if m.is_upper_triangular(T::zero()) || m.is_lower_triangular(T::zero()) {
        return m.diagonal();
    }
    let a = &m.m;
    let c1 = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    cubic_roots(m.trace(), c1, m.det())
}

/// Groups eigenvalues closer than `tol * max|lambda|` and replaces each group by its mean.
fn cluster<T: Real>(vals: [Complex<T>; 3], tol: T) -> Vec<(Complex<T>, usize)> {
    let scale = vals.iter().map(|v| v.norm()).fold(T::zero(), T::max).max(T::min_positive_value());
    let close = |a: Complex<T>, b: Complex<T>| (a - b).norm() < tol * scale;
    let (a, b, c) = (vals[0], vals[1], vals[2]);
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    match (close(a, b), close(a, c), close(b, c)) {
        (true, true, _) | (true, _, true) | (_, true, true) => vec![((a + b + c) / three, 3)],
        (true, false, false) => vec![((a + b) / two, 2), (c, 1)],
        (false, true, false) => vec![((a + c) / two, 2), (b, 1)],
        (false, false, true) => vec![((b + c) / two, 2), (a, 1)],
        _ => vec![(a, 1), (b, 1), (c, 1)],
    }
}

fn cross<T: Real>(u: [Complex<T>; 3], v: [Complex<T>; 3]) -> [Complex<T>; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

fn vnorm<T: Real>(v: &[Complex<T>; 3]) -> T {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

fn unit<T: Real>(v: [Complex<T>; 3]) -> [Complex<T>; 3] {
    let n = vnorm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Kernel vector of a rank-2 matrix: the largest bilinear cross product of two rows.
fn kernel_rank2<T: Real>(n: &Mat3<T>) -> [Complex<T>; 3] {
    let mut best = [zero(); 3];
    let mut bn = -T::one();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = cross(n.row(i), n.row(j));
        let vn = vnorm(&v);
        if vn > bn {
            bn = vn;
            best = v;
        }
    }
    unit(best)
}

/// Two-dimensional kernel of a rank-1 matrix, from its largest row.
fn kernel_rank1<T: Real>(n: &Mat3<T>) -> [[Complex<T>; 3]; 2] {
    let mut row = n.row(0);
    for i in 1..3 {
        if vnorm(&n.row(i)) > vnorm(&row) {
            row = n.row(i);
        }
    }
    let mut k = 0;
    for i in 1..3 {
        if row[i].norm() > row[k].norm() {
            k = i;
        }
    }
    let mut out = [[zero(); 3]; 2];
    let mut idx = 0;
    for i in 0..3 {
        if i != k {
            let mut v = [zero(); 3];
            v[i] = one();
            v[k] = -row[i] / row[k];
            out[idx] = unit(v);
            idx += 1;
        }
    }
    out
}

fn max_minor<T: Real>(n: &Mat3<T>) -> T {
    let mut best = T::zero();
    for (r0, r1) in [(0, 1), (0, 2), (1, 2)] {
        for (c0, c1) in [(0, 1), (0, 2), (1, 2)] {
            let d = n.m[r0][c0] * n.m[r1][c1] - n.m[r0][c1] * n.m[r1][c0];
            best = best.max(d.norm());
        }
    }
    best
}

/// Column of `a` maximizing `|b * col|`.
fn best_column<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> [Complex<T>; 3] {
    let mut best = a.col(0);
    let mut bn = -T::one();
    for j in 0..3 {
        let c = a.col(j);
        let v = vnorm(&b.mul_vec(c)) / vnorm(&c).max(T::min_positive_value());
        if v > bn {
            bn = v;
            best = c;
        }
    }
    unit(best)
}

fn condition<T: Real>(p: &Mat3<T>) -> T {
    match p.inverse() {
        Ok(inv) => p.norm() * inv.norm(),
        Err(_) => T::infinity(),
    }
}

/// Eigenvalues and a Jordan basis. Eigenvalues closer than `tol * max|lambda|`
/// are merged; rank decisions on `M - lambda I` use the same relative tolerance.
pub fn eig3<T: Real>(m: &Mat3<T>, tol: T) -> Result<Eigen3<T>> {
    let scale = m.norm().max(T::min_positive_value());
    let groups = cluster(eigenvalues3(m), tol);
    let mut cols: Vec<[Complex<T>; 3]> = Vec::new();
    let mut blocks = Vec::new();
    let eye = Mat3::identity();
    for (gi, &(lam, mult)) in groups.iter().enumerate() {
        let n = *m - eye * lam;
        match mult {
            1 => {
                cols.push(kernel_rank2(&n));
                blocks.push(JordanBlock { value: lam, size: 1 });
            }
            2 => {
                let mu = groups[1 - gi].0;
                if max_minor(&n) <= tol * scale * scale {
                    for v in kernel_rank1(&n) {
                        cols.push(v);
                        blocks.push(JordanBlock { value: lam, size: 1 });
                    }
                } else {
                    // generalized eigenspace of lam = range(M - mu I)
                    let w = best_column(&(*m - eye * mu), &n);
                    cols.push(unit(n.mul_vec(w)));
                    let s = vnorm(&n.mul_vec(w));
                    cols.push([w[0] / s, w[1] / s, w[2] / s]);
                    blocks.push(JordanBlock { value: lam, size: 2 });
                }
            }
            _ => {
                if n.max_abs() <= tol * scale {
                    for j in 0..3 {
                        cols.push(eye.col(j));
                        blocks.push(JordanBlock { value: lam, size: 1 });
                    }
                } else if max_minor(&n) <= tol * scale * scale {
                    let w = best_column(&eye, &n);
                    let v1 = n.mul_vec(w);
                    let s = vnorm(&v1);
                    let v1u = unit(v1);
                    let ker = kernel_rank1(&n);
                    let pick = |k: &[Complex<T>; 3]| Mat3::from_cols([v1u, w, *k]).det().norm();
                    let k = if pick(&ker[0]) >= pick(&ker[1]) { ker[0] } else { ker[1] };
                    cols.push(v1u);
                    cols.push([w[0] / s, w[1] / s, w[2] / s]);
                    cols.push(k);
                    blocks.push(JordanBlock { value: lam, size: 2 });
                    blocks.push(JordanBlock { value: lam, size: 1 });
                } else {
                    let n2 = n * n;
                    let w = best_column(&eye, &n2);
                    let v2 = n.mul_vec(w);
                    let v1 = n.mul_vec(v2);
                    let s = vnorm(&v1);
                    cols.push([v1[0] / s, v1[1] / s, v1[2] / s]);
                    cols.push([v2[0] / s, v2[1] / s, v2[2] / s]);
                    cols.push([w[0] / s, w[1] / s, w[2] / s]);
                    blocks.push(JordanBlock { value: lam, size: 3 });
                }
            }
        }
    }
    let basis = Mat3::from_cols([cols[0], cols[1], cols[2]]);
    let cond = condition(&basis);
    if !(cond <= T::lit(1e12)) {
        return Err(Error::IllConditioned(cond.f64()));
    }
    let mut values = [zero(); 3];
    let mut k = 0;
    for b in &blocks {
        for _ in 0..b.size {
            values[k] = b.value;
            k += 1;
        }
    }
    Ok(Eigen3 { values, basis, blocks })
}

/// Multiplicative Dunford decomposition `M = D U`, `D` semi-simple, `U` unipotent, `DU = UD`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DunfordPair<T: Real> {
    pub d: Mat3<T>,
    pub u: Mat3<T>,
}

/// The semi-simple part is built from spectral projectors, which are polynomials
/// in `M`, so `D` and `U = D^{-1} M` commute with `M` and with each other.
pub fn dunford<T: Real>(m: &Mat3<T>) -> Result<DunfordPair<T>> {
    dunford_tol(m, T::lit(T::EPS_CLUSTER))
}

pub fn dunford_tol<T: Real>(m: &Mat3<T>, tol: T) -> Result<DunfordPair<T>> {
    let e = eig3(m, tol)?;
    if e.is_diagonalizable() {
        return Ok(DunfordPair { d: *m, u: Mat3::identity() });
    }
    let eye = Mat3::identity();
    let d = if e.blocks.iter().map(|b| b.value).all(|v| v == e.blocks[0].value) {
        eye * e.blocks[0].value
    } else {
        let lam = e.blocks.iter().find(|b| b.size == 2).map(|b| b.value).unwrap_or(e.values[0]);
        let mu = e.blocks.iter().find(|b| b.value != lam).map(|b| b.value).unwrap_or(lam);
        let n = *m - eye * lam;
        let e_mu = n * n * (mu - lam).powi(-2);
        let e_lam = eye - e_mu;
        e_lam * lam + e_mu * mu
    };
    let u = d.inverse()? * *m;
    Ok(DunfordPair { d, u })
}

/// Symmetric square of the standard representation of `SL_2`.
pub fn rho<T: Real>(n: &Mat2<T>) -> Result<Mat3<T>> {
    let dd = (n.det() - one::<T>()).norm();
    if !(dd <= T::lit(1e-10)) {
        return Err(Error::NotUnimodular(dd.f64()));
    }
    Ok(rho_unchecked(n))
}

pub(crate) fn rho_unchecked<T: Real>(n: &Mat2<T>) -> Mat3<T> {
    let [[a, b], [c, d]] = n.m;
    let two = T::lit(2.0);
    Mat3::from_rows([
        [a * a, a * b * two, b * b],
        [a * c, a * d + b * c, b * d],
        [c * c, c * d * two, d * d],
    ])
}

/// `max(|m12^2 - 4 m11 m13|, |m32^2 - 4 m31 m33|) / |M|^2`.
pub fn psl2_relation_residual<T: Real>(m: &Mat3<T>) -> T {
    let four = T::lit(4.0);
    let top = m.m[0][1] * m.m[0][1] - m.m[0][0] * m.m[0][2] * four;
    let bot = m.m[2][1] * m.m[2][1] - m.m[2][0] * m.m[2][2] * four;
    let s = m.norm();
    top.norm().max(bot.norm()) / (s * s).max(T::min_positive_value())
}

/// Whether the spectrum has the form `{1, alpha, 1/alpha}` within `1e-8` relative
/// to `max(1, |M|)`, the accuracy scale of computed eigenvalues.
///
/// The eigenvalue nearest to 1 is paired off first; the other two must multiply to 1.
/// Near `alpha = 1` the computed eigenvalues split like `eps^(1/3)`, so there the
/// equivalent coefficient test `det = 1`, `e2 = trace` is used instead.
pub fn psl2_eigenvalue_check<T: Real>(m: &Mat3<T>) -> bool {
    let mut v = eigenvalues3(m);
    v.sort_by(|x, y| (*x - one::<T>()).norm().partial_cmp(&(*y - one::<T>()).norm()).unwrap_or(std::cmp::Ordering::Equal));
    let tol = T::lit(1e-8) * T::one().max(m.norm());
    let paired =
        (v[0] - one::<T>()).norm() < tol && (v[1] * v[2] - one::<T>()).norm() < tol * (T::one() + v[1].norm() * v[2].norm());
    if paired || v.iter().any(|x| (*x - one::<T>()).norm() > T::lit(1e-3)) {
        return paired;
    }
    let e2 = minor_sum(m);
    let s = T::one() + m.norm();
    let tol = T::lit(1e-8);
    (m.det() - one::<T>()).norm() < tol * s * s * s && (e2 - m.trace()).norm() < tol * s * s
}

fn minor_sum<T: Real>(m: &Mat3<T>) -> Complex<T> {
    let a = &m.m;
    a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2] - a[1][2] * a[2][1]
}

/// A preimage `N` with `rho(N) = M` when one exists within `tol` (relative); `N` is defined up to sign.
pub fn psl2_preimage<T: Real>(m: &Mat3<T>, tol: T) -> Option<Mat2<T>> {
    let two = T::lit(2.0);
    let s = m.norm();
    let small = T::lit(1e-6) * s.sqrt();
    let a = m.m[0][0].sqrt();
    let n = if a.norm() > small {
        let b = m.m[0][1] / (a * two);
        let c = m.m[1][0] / a;
        let d = (one::<T>() + b * c) / a;
        Mat2::new(a, b, c, d)
    } else {
        let b = m.m[0][2].sqrt();
        if b.norm() <= small {
            return None;
        }
        let c = -b.inv();
        let d = m.m[1][2] / b;
        Mat2::new(zero(), b, c, d)
    };
    let r = rho_unchecked(&n);
    if r.rel_err(m) <= tol && (n.det() - one::<T>()).norm() <= tol.sqrt() {
        Some(n)
    } else {
        None
    }
}

/// Result of the `Perm_{C*}` membership test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PermCheck<T: Real> {
    pub member: bool,
    /// `permutation[i]` is the column holding the nonzero entry of row `i`.
    pub permutation: [usize; 3],
    pub scales: [Complex<T>; 3],
}

/// Exactly one entry above `tol * max|M|` per row and per column.
pub fn in_perm_cstar<T: Real>(m: &Mat3<T>, tol: T) -> PermCheck<T> {
    let s = m.max_abs() * tol;
    let mut perm = [0usize; 3];
    let mut scales = [zero(); 3];
    let mut used = [false; 3];
    let mut member = m.max_abs() > T::zero();
    for i in 0..3 {
        let nz: Vec<usize> = (0..3).filter(|&j| m.m[i][j].norm() > s).collect();
        if nz.len() != 1 || used[nz[0]] {
            member = false;
            continue;
        }
        used[nz[0]] = true;
        perm[i] = nz[0];
        scales[i] = m.m[i][nz[0]];
    }
    PermCheck { member, permutation: perm, scales }
}

/// Determinant of the submatrix on 1-based rows `(i1, i2)` and columns `(j1, j2)`.
pub fn minor2<T: Real>(m: &Mat3<T>, rows: (usize, usize), cols: (usize, usize)) -> Result<Complex<T>> {
    let ok = |(a, b): (usize, usize)| (1..=3).contains(&a) && (1..=3).contains(&b) && a != b;
    if !ok(rows) || !ok(cols) {
        return Err(Error::BadIndex);
    }
    let (i1, i2, j1, j2) = (rows.0 - 1, rows.1 - 1, cols.0 - 1, cols.1 - 1);
    Ok(m.m[i1][j1] * m.m[i2][j2] - m.m[i1][j2] * m.m[i2][j1])
}

/// Basis of `{X : XM = MX}`.
pub fn commutant_basis<T: Real>(m: &Mat3<T>, tol: T) -> Vec<Mat3<T>> {
    let mut rows = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            let mut r = vec![zero::<T>(); 9];
            for a in 0..3 {
                for b in 0..3 {
                    let mut v = zero::<T>();
                    if a == i {
                        v = v + m.m[b][j];
                    }
                    if b == j {
                        v = v - m.m[i][a];
                    }
                    r[3 * a + b] = v;
                }
            }
            rows.push(r);
        }
    }
    dense::nullspace(&rows, 9, tol)
        .into_iter()
        .map(|v| {
            let mut x = Mat3::zero();
            for k in 0..9 {
                x.m[k / 3][k % 3] = v[k];
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    type C = Complex<f64>;
    type M = Mat3<f64>;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn eig_examples() {
        let e = eig3(&M::identity(), 1e-8).unwrap();
        assert_eq!(e.values, [c(1.0); 3]);
        assert_eq!(e.basis, M::identity());
        let e = eig3(&M::diag([c(1.0), c(2.0), c(3.0)]), 1e-8).unwrap();
        assert_eq!(e.values, [c(1.0), c(2.0), c(3.0)]);
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        let comp = M::from_real_rows([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [6.0, -11.0, 6.0]]);
        let e = eig3(&comp, 1e-8).unwrap();
        let mut v: Vec<f64> = e.values.iter().map(|x| x.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in v.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let d = M::diag(e.values);
        assert!((comp * e.basis - e.basis * d).norm() < 1e-10);
    }

    #[test]
    fn jordan_blocks() {
        let jq = M::from_real_rows([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
        let e = eig3(&jq, 1e-8).unwrap();
        assert_eq!(e.blocks, vec![JordanBlock { value: c(1.0), size: 3 }]);
        assert!((jq * e.basis - e.basis * e.jordan_matrix()).norm() < 1e-13);
        let g = M::from_real_rows([[2.0, 1.0, -1.0], [0.5, 3.0, 2.0], [1.0, 0.0, 1.0]]);
        // a defective triple root only resolves to about eps^(1/3)
        let m = g * jq * g.inverse().unwrap();
        assert!(eig3(&m, 1e-8).is_err());
        let e = eig3(&m, 1e-4).unwrap();
        assert_eq!(e.blocks.len(), 1);
        assert!((m * e.basis - e.basis * e.jordan_matrix()).norm() < 1e-4);
        let j2 = M::from_real_rows([[1.0, 0.0, 0.0], [0.0, 0.4, 1.0], [0.0, 0.0, 0.4]]);
        let m = g * j2 * g.inverse().unwrap();
        let e = eig3(&m, 1e-6).unwrap();
        assert!(!e.is_diagonalizable());
        assert!((m * e.basis - e.basis * e.jordan_matrix()).norm() < 1e-6);
    }

    #[test]
    fn dunford_examples() {
        let m = M::from_real_rows([[2.0, 1.0, 0.0], [1.0, 3.0, 0.0], [0.0, 1.0, 5.0]]);
        let p = dunford(&m).unwrap();
        assert_eq!(p.d, m);
        assert_eq!(p.u, M::identity());
        let jq = M::from_real_rows([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
        let p = dunford(&jq).unwrap();
        assert_eq!(p.d, M::identity());
        assert!(p.u.rel_err(&jq) < 1e-15);
        let lam = 0.5 / 0.37;
        let j2 = M::from_real_rows([[1.0, 0.0, 0.0], [0.0, lam, 1.0], [0.0, 0.0, lam]]);
        let p = dunford(&j2).unwrap();
        assert!(p.d.rel_err(&M::diag([c(1.0), c(lam), c(lam)])) < 1e-14);
        let u = M::from_real_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0 / lam], [0.0, 0.0, 1.0]]);
        assert!(p.u.rel_err(&u) < 1e-14);
        assert!((p.d * p.u - j2).norm() < 1e-14);
        assert!((p.d * p.u - p.u * p.d).norm() < 1e-14);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&Mat2::identity()).unwrap(), M::identity());
        let l = c(1.7);
        let r = rho(&Mat2::new(l, c(0.0), c(0.0), l.inv())).unwrap();
        assert!(r.rel_err(&M::diag([l * l, c(1.0), (l * l).inv()])) < 1e-15);
        let r = rho(&Mat2::new(c(1.0), c(1.0), c(0.0), c(1.0))).unwrap();
        assert_eq!(r, M::from_real_rows([[1.0, 2.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]));
        assert!(matches!(rho(&Mat2::new(c(2.0), c(0.0), c(0.0), c(1.0))), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn relation_and_eigen_checks() {
        assert_eq!(psl2_relation_residual(&M::identity()), 0.0);
        let d = M::diag([c(1.0), c(2.0), c(3.0)]);
        assert_eq!(psl2_relation_residual(&d), 0.0);
        assert!(!psl2_eigenvalue_check(&d));
        assert!(!psl2_eigenvalue_check(&M::diag([c(2.0), c(3.0), c(1.0 / 6.0)])));
        assert!(psl2_eigenvalue_check(&M::diag([c(1.0), c(5.0), c(0.2)])));
        let n = Mat2::new(C::new(0.3, 1.0), c(2.0), C::new(-0.5, 0.2), c(0.0));
        let n = Mat2::new(n.m[0][0], n.m[0][1], n.m[1][0], (c(1.0) + n.m[0][1] * n.m[1][0]) / n.m[0][0]);
        let r = rho(&n).unwrap();
        let pre = psl2_preimage(&r, 1e-10).unwrap();
        assert!(rho_unchecked(&pre).rel_err(&r) < 1e-12);
        assert!(psl2_preimage(&d, 1e-8).is_none());
    }

    #[test]
    fn perm_checks() {
        let p = in_perm_cstar(&M::diag([c(1.0), c(2.0), c(3.0)]), 1e-12);
        assert!(p.member && p.permutation == [0, 1, 2] && p.scales == [c(1.0), c(2.0), c(3.0)]);
        let anti = M::from_real_rows([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]);
        let p = in_perm_cstar(&anti, 1e-12);
        assert!(p.member && p.permutation == [2, 1, 0]);
        let dense = M::from_real_rows([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 10.0]]);
        assert!(!in_perm_cstar(&dense, 1e-12).member);
    }

    #[test]
    fn minor_examples() {
        assert_eq!(minor2(&M::identity(), (1, 2), (1, 2)).unwrap(), c(1.0));
        let m = M::from_real_rows([[1.0, 2.0, 9.0], [3.0, 4.0, 9.0], [9.0, 9.0, 9.0]]);
        assert_eq!(minor2(&m, (1, 2), (1, 2)).unwrap(), c(-2.0));
        assert!(matches!(minor2(&m, (1, 1), (1, 2)), Err(Error::BadIndex)));
        assert!(matches!(minor2(&m, (0, 1), (1, 2)), Err(Error::BadIndex)));
    }

    #[test]
    fn commutant_of_unipotent_is_triangular() {
        let jq = M::from_real_rows([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]]);
        let basis = commutant_basis(&jq, 1e-12);
        assert_eq!(basis.len(), 3);
        for t in basis {
            assert!(t.is_upper_triangular(1e-12));
            assert!((t * jq - jq * t).norm() < 1e-12);
        }
    }
}
