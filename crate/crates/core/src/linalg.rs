//! Dense complex matrices and a one-sided Jacobi SVD.
//!
//! Sizes here never exceed a few hundred, so the cubic Jacobi sweep is
//! cheap and gives singular values to high relative accuracy.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use crate::scalar::{c, Real, C};

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1)`.
    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| {
            c(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                let b = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &x) in row.iter_mut().zip(b) {
                    *o = *o + a * x;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// `A = U·diag(σ)·V^H` with σ sorted in descending order.
///
/// `u` has `n` columns (zero where σ vanishes), `v` is `n × n` unitary.
#[derive(Clone, Debug)]
pub struct Svd<T: Real> {
    pub u: Vec<Vec<C<T>>>,
    pub sigma: Vec<T>,
    pub v: Vec<Vec<C<T>>>,
}

impl<T: Real> Svd<T> {
    /// Number of singular values above `rel · σ_max`.
    pub fn rank(&self, rel: T) -> usize {
        let top = self.sigma.first().copied().unwrap_or_else(T::zero);
        if top <= T::zero() {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rel * top).count()
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD of an `m × n` matrix.
pub fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut w: Vec<Vec<C<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            let mut e = vec![C::zero(); n];
            e[j] = c(T::one(), T::zero());
            e
        })
        .collect();
    let tol = T::epsilon() * T::from_usize_lossy(m.max(1)).sqrt();
    let mut norms: Vec<T> = w.iter().map(|col| norm_sqr(col)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha.is_zero() || beta.is_zero() {
                    continue;
                }
                let gamma = inner(&w[p], &w[q]);
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut w, p, q, phase, cs, sn);
                rotate(&mut v, p, q, phase, cs, sn);
                norms[p] = norm_sqr(&w[p]);
                norms[q] = norm_sqr(&w[q]);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<T> = norms.iter().map(|x| x.sqrt()).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for &j in &order {
        let s = sig[j];
        let col = if s > T::zero() {
            w[j].iter().map(|&x| x.unscale(s)).collect()
        } else {
            vec![C::zero(); m]
        };
        u.push(col);
        sigma.push(s);
        vs.push(v[j].clone());
    }
    Svd { u, sigma, v: vs }
}

/// Singular values only, descending.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    svd(a).sigma
}

/// Orthonormal basis (in the plain inner product) of the span of `vectors`,
/// keeping directions with singular value above `rel · σ_max`.
pub fn orthonormal_span<T: Real>(len: usize, vectors: &[Vec<C<T>>], rel: T) -> Vec<Vec<C<T>>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    if vectors.len() > len {
        // left singular vectors of A are the right singular vectors of A^H
        let ah = Matrix::from_fn(vectors.len(), len, |i, j| vectors[i][j].conj());
        let s = svd(&ah);
        let r = s.rank(rel);
        return s.v.into_iter().take(r).collect();
    }
    let a = Matrix::from_fn(len, vectors.len(), |i, j| vectors[j][i]);
    let s = svd(&a);
    let r = s.rank(rel);
    s.u.into_iter().take(r).collect()
}

fn rotate<T: Real>(cols: &mut [Vec<C<T>>], p: usize, q: usize, phase: C<T>, cs: T, sn: T) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    let back = phase.conj();
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yq = *y * back;
        let xp = *x;
        *x = xp * cs - yq * sn;
        *y = xp * sn + yq * cs;
    }
}

fn norm_sqr<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// `Σ conj(a_k)·b_k`
pub(crate) fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(s: &Svd<f64>, m: usize, n: usize) -> Matrix<f64> {
        Matrix::from_fn(m, n, |i, j| {
            (0..s.sigma.len())
                .map(|k| s.u[k][i] * s.sigma[k] * s.v[k][j].conj())
                .fold(C::zero(), |a, b| a + b)
        })
    }

    #[test]
    fn svd_reconstructs_tall_and_wide() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(m, n) in &[(6usize, 4usize), (4, 6), (5, 5), (1, 3)] {
            let a = Matrix::<f64>::random(m, n, &mut rng);
            let s = svd(&a);
            assert!(reconstruct(&s, m, n).max_abs_diff(&a) < 1e-12);
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_of_rank_one() {
        let u = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0)];
        let v = [c(0.3, 0.0), c(0.0, -1.0)];
        let a = Matrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let s = svd(&a);
        assert_eq!(s.rank(1e-12), 1);
        let fro: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s.sigma[0] - fro).abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = Matrix::<f64>::from_fn(3, 3, |i, j| if i == j { c([2.0, -5.0, 0.5][i], 0.0) } else { C::zero() });
        let s = singular_values(&a);
        assert!((s[0] - 5.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14 && (s[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn span_drops_dependent_vectors() {
        let a: Vec<C<f64>> = vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let b = vec![c(2.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)];
        let e = vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 3.0)];
        let basis = orthonormal_span(3, &[a, b, e], 1e-10);
        assert_eq!(basis.len(), 2);
        for x in &basis {
            assert!((inner(x, x).re - 1.0).abs() < 1e-12);
        }
        assert!(inner(&basis[0], &basis[1]).norm() < 1e-12);
    }

    #[test]
    fn span_of_many_vectors_uses_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Matrix::<f64>::random(3, 2, &mut rng);
        let b = Matrix::<f64>::random(2, 9, &mut rng);
        let prod = a.matmul(&b);
        let vecs: Vec<Vec<C<f64>>> = (0..9).map(|j| prod.column(j)).collect();
        let basis = orthonormal_span(3, &vecs, 1e-10);
        assert_eq!(basis.len(), 2);
        for v in &vecs {
            let proj: Vec<C<f64>> = basis.iter().fold(vec![C::zero(); 3], |mut acc, e| {
                let k = inner(e, v);
                for (o, x) in acc.iter_mut().zip(e) {
                    *o = *o + k * x;
                }
                acc
            });
            let err = proj.iter().zip(v).map(|(p, x)| (p - x).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }
}
