//! Small dense complex linear algebra: null spaces and least squares.

use num_complex::Complex;

use crate::scalar::{zero, Real};

/// Basis of the null space of the `rows x ncols` matrix `a`, by Gaussian
/// elimination with full pivoting. Pivots below `tol * max|a|` count as zero.
pub fn nullspace<T: Real>(a: &[Vec<Complex<T>>], ncols: usize, tol: T) -> Vec<Vec<Complex<T>>> {
    let mut m: Vec<Vec<Complex<T>>> = a.to_vec();
    let nrows = m.len();
    let scale = m.iter().flatten().map(|x| x.norm()).fold(T::zero(), T::max);
    let mut col_perm: Vec<usize> = (0..ncols).collect();
    let mut rank = 0;
    for r in 0..nrows.min(ncols) {
        let mut best = (T::zero(), r, r);
        for i in r..nrows {
            for j in r..ncols {
                let v = m[i][j].norm();
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        if best.0 <= tol * scale || best.0 == T::zero() {
            break;
        }
        m.swap(r, best.1);
        for row in m.iter_mut() {
            row.swap(r, best.2);
        }
        col_perm.swap(r, best.2);
        let p = m[r][r];
        for j in r..ncols {
            m[r][j] = m[r][j] / p;
        }
        for i in 0..nrows {
            if i != r {
                let f = m[i][r];
                if f != zero() {
                    for j in r..ncols {
                        let v = m[r][j];
                        m[i][j] = m[i][j] - f * v;
                    }
                }
            }
        }
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in rank..ncols {
        let mut v = vec![zero::<T>(); ncols];
        v[col_perm[free]] = Complex::new(T::one(), T::zero());
        for r in 0..rank {
            v[col_perm[r]] = -m[r][free];
        }
        basis.push(v);
    }
    basis
}

/// Least-squares solution of `a x = b` via modified Gram-Schmidt.
///
/// Returns the coefficients and the residual norm `|a x - b|`. Columns that are
/// numerically dependent on earlier ones get coefficient zero.
pub fn lstsq<T: Real>(a: &[Vec<Complex<T>>], b: &[Complex<T>]) -> (Vec<Complex<T>>, T) {
    let m = b.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut qcols: Vec<Vec<Complex<T>>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    let mut r = vec![vec![zero::<T>(); n]; n];
    let mut live = vec![true; n];
    let col_scale: Vec<T> = qcols.iter().map(|c| norm(c)).collect();
    for j in 0..n {
        for k in 0..j {
            if !live[k] {
                continue;
            }
            let d = dot(&qcols[k], &qcols[j]);
            r[k][j] = d;
            let qk = qcols[k].clone();
            for (x, y) in qcols[j].iter_mut().zip(qk.iter()) {
                *x = *x - *y * d;
            }
        }
        let nj = norm(&qcols[j]);
        if nj <= T::epsilon() * T::lit(1e3) * col_scale[j].max(T::min_positive_value()) || nj == T::zero() {
            live[j] = false;
            continue;
        }
        r[j][j] = Complex::new(nj, T::zero());
        for x in qcols[j].iter_mut() {
            *x = *x / nj;
        }
    }
    let mut rhs = vec![zero::<T>(); n];
    for j in 0..n {
        if live[j] {
            rhs[j] = dot(&qcols[j], b);
        }
    }
    let mut x = vec![zero::<T>(); n];
    for j in (0..n).rev() {
        if !live[j] {
            continue;
        }
        let mut s = rhs[j];
        for k in j + 1..n {
            s = s - r[j][k] * x[k];
        }
        x[j] = s / r[j][j];
    }
    let mut res = T::zero();
    for i in 0..m {
        let mut s = -b[i];
        for j in 0..n {
            s = s + a[i][j] * x[j];
        }
        res = res + s.norm_sqr();
    }
    (x, res.sqrt())
}

fn dot<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter().zip(v).fold(zero(), |s, (a, b)| s + a.conj() * b)
}

fn norm<T: Real>(u: &[Complex<T>]) -> T {
    u.iter().map(|x| x.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}
