//! The convolution algebra of sampled kernels.
//!
//! A [`Kernel`] is a function on node pairs, `values[i·n + j] = f(x_i, x_j)`.
//! The product is the measure-weighted matrix product
//! `(f ⋆ g)(x, y) = Σ_z f(x, z)·m{z}·g(z, y)`, the involution is the
//! conjugate transpose, and the norm is the supremum norm.

use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{c, re, Real, C};
use crate::space::{SpaceKind, SpaceRef};

#[derive(Clone, Debug)]
pub struct Kernel<T: Real> {
    space: SpaceRef<T>,
    values: Vec<C<T>>,
}

impl<T: Real> Kernel<T> {
    /// Wraps row-major values; rejects a wrong length or non-finite entries.
    pub fn new(space: &SpaceRef<T>, values: Vec<C<T>>) -> Result<Self> {
        let n = space.len();
        if values.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("kernel entries must be finite".into()));
        }
        Ok(Self { space: space.clone(), values })
    }

    pub fn zeros(space: &SpaceRef<T>) -> Self {
        let n = space.len();
        Self { space: space.clone(), values: vec![C::zero(); n * n] }
    }

    /// The constant kernel `1_{X²}`.
    pub fn ones(space: &SpaceRef<T>) -> Self {
        Self::constant(space, re(T::one()))
    }

    pub fn constant(space: &SpaceRef<T>, value: C<T>) -> Self {
        let n = space.len();
        Self { space: space.clone(), values: vec![value; n * n] }
    }

    /// Samples `f(i, j)` on node indices.
    pub fn from_fn(space: &SpaceRef<T>, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let n = space.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self { space: space.clone(), values }
    }

    pub fn from_real_fn(space: &SpaceRef<T>, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(space, |i, j| re(f(i, j)))
    }

    /// `a ⊗ b : (x, y) ↦ a(x)·b(y)`.
    pub fn outer(space: &SpaceRef<T>, a: &[C<T>], b: &[C<T>]) -> Result<Self> {
        let n = space.len();
        if a.len() != n || b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.len().min(b.len()) });
        }
        Ok(Self::from_fn(space, |i, j| a[i] * b[j]))
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1)`, so `‖f‖∞ ≤ √2`.
    pub fn random(space: &SpaceRef<T>, rng: &mut impl Rng) -> Self {
        Self::from_fn(space, |_, _| {
            c(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)))
        })
    }

    /// Random kernel scaled so that `‖f‖∞ ≤ 1`.
    pub fn random_unit_ball(space: &SpaceRef<T>, rng: &mut impl Rng) -> Self {
        let f = Self::random(space, rng);
        let s = f.sup_norm();
        if s > T::zero() {
            f.scale(re(T::one() / s))
        } else {
            f
        }
    }

    pub fn space(&self) -> &SpaceRef<T> {
        &self.space
    }

    /// Number of nodes per axis of the value grid.
    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C<T>> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.values[i * self.n() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C<T>) {
        let n = self.n();
        self.values[i * n + j] = z;
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        let n = self.n();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.n()).map(|i| self.get(i, j)).collect()
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// `f ⋆ g`. Each entry is summed over `k` in increasing order, so the result
    /// is bit-reproducible regardless of thread count.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let n = self.n();
        let w = self.space.weights();
        let mut out = vec![C::zero(); n * n];
        out.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            let f_row = &self.values[i * n..(i + 1) * n];
            for k in 0..n {
                let a = f_row[k] * w[k];
                if a.is_zero() {
                    continue;
                }
                let g_row = &other.values[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(g_row) {
                    *o = *o + a * b;
                }
            }
        });
        Ok(Self { space: self.space.clone(), values: out })
    }

    /// `f*(x, y) = conj f(y, x)`.
    pub fn involve(&self) -> Self {
        let n = self.n();
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.values[i * n + j].conj();
            }
        }
        Self { space: self.space.clone(), values: out }
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Column seminorm `sup_x |f(x, y)|` generating the column-wise topology.
    pub fn cc_seminorm(&self, y: usize) -> T {
        (0..self.n()).map(|i| self.get(i, y).norm()).fold(T::zero(), T::max)
    }

    /// Row seminorm `sup_y |f(x, y)|` generating the row-wise topology.
    pub fn rc_seminorm(&self, x: usize) -> T {
        self.row(x).iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn pc_seminorm(&self, x: usize, y: usize) -> T {
        self.get(x, y).norm()
    }

    /// `‖f − g‖∞`; panics if the grids differ in size.
    pub fn dist_sup(&self, other: &Self) -> T {
        assert_eq!(self.values.len(), other.values.len(), "kernel sizes differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, mut f: impl FnMut(C<T>) -> C<T>) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(|&z| f(z)).collect() }
    }

    /// `self + s·other`, in place.
    pub fn axpy(&mut self, s: C<T>, other: &Self) {
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a = *a + s * b;
        }
    }

    /// `[f, g] = f ⋆ g − g ⋆ f`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.convolve(other)? - &other.convolve(self)?)
    }

    /// Weighted Frobenius inner product `Σ w_i w_j conj f_ij g_ij`.
    pub fn inner(&self, other: &Self) -> C<T> {
        let n = self.n();
        let w = self.space.weights();
        let mut acc = C::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.values[i * n + j].conj() * other.values[i * n + j] * (w[i] * w[j]);
            }
        }
        acc
    }

    /// `∫∫ f dm dm`
    pub fn mean(&self) -> C<T> {
        let n = self.n();
        let w = self.space.weights();
        let mut acc = C::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.values[i * n + j] * (w[i] * w[j]);
            }
        }
        acc
    }
}

impl<T: Real> Add for &Kernel<T> {
    type Output = Kernel<T>;
    fn add(self, rhs: Self) -> Kernel<T> {
        assert_eq!(self.values.len(), rhs.values.len(), "kernel sizes differ");
        Kernel {
            space: self.space.clone(),
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Kernel<T> {
    type Output = Kernel<T>;
    fn sub(self, rhs: Self) -> Kernel<T> {
        assert_eq!(self.values.len(), rhs.values.len(), "kernel sizes differ");
        Kernel {
            space: self.space.clone(),
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &Kernel<T> {
    type Output = Kernel<T>;
    fn neg(self) -> Kernel<T> {
        self.map(|z| -z)
    }
}

/// The unit `u(x_i, x_j) = δ_ij / m{x_i}`; only finite spaces have one.
pub fn unit<T: Real>(space: &SpaceRef<T>) -> Result<Kernel<T>> {
    if space.kind() != SpaceKind::Finite {
        return Err(Error::UnitNotAvailable { kind: space.kind().name() });
    }
    Ok(Kernel::from_fn(space, |i, j| {
        if i == j {
            re(T::one() / space.weight(i))
        } else {
            C::zero()
        }
    }))
}

/// *-isomorphism from `n × n` matrices onto the algebra of a finite space:
/// `A ↦ ((x_i, x_j) ↦ A_ij / √(m{x_i}·m{x_j}))`.
///
/// The symmetric scaling makes the map both multiplicative and
/// involution-preserving for arbitrary positive weights; it sends the
/// identity to [`unit`].
pub fn finite_matrix_iso<T: Real>(a: &Matrix<T>, space: &SpaceRef<T>) -> Result<Kernel<T>> {
    if !space.is_finite() {
        return Err(Error::NotFinite);
    }
    let n = space.len();
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.rows().max(a.cols()) });
    }
    let w = space.weights();
    Ok(Kernel::from_fn(space, |i, j| a[(i, j)] / (w[i] * w[j]).sqrt()))
}

/// Inverse of [`finite_matrix_iso`].
pub fn finite_matrix_iso_inv<T: Real>(f: &Kernel<T>) -> Result<Matrix<T>> {
    if !f.space().is_finite() {
        return Err(Error::NotFinite);
    }
    let w = f.space().weights();
    Ok(Matrix::from_fn(f.n(), f.n(), |i, j| f.get(i, j) * (w[i] * w[j]).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DiscreteSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cz(re: f64, im: f64) -> C<f64> {
        c(re, im)
    }

    #[test]
    fn ones_convolve_to_ones() {
        for s in [
            DiscreteSpace::<f64>::circle(16).unwrap(),
            DiscreteSpace::interval(7).unwrap(),
            DiscreteSpace::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap(),
        ] {
            let one = Kernel::ones(&s);
            assert!(one.convolve(&one).unwrap().dist_sup(&one) < 1e-15);
        }
    }

    #[test]
    fn two_node_weighted_product() {
        let s = DiscreteSpace::finite_discrete(vec![0.5, 0.5]).unwrap();
        let f = Kernel::new(&s, vec![cz(2.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0)]).unwrap();
        // oracle: Σ_k f_ik w_k g_kj by hand
        let expected = [2.0 * 0.5 * 2.0, 0.0, 0.0, 0.0];
        let p = f.convolve(&f).unwrap();
        for (z, e) in p.values().iter().zip(expected) {
            assert_eq!(*z, cz(e, 0.0));
        }
    }

    #[test]
    fn interval_integral_of_z() {
        let s = DiscreteSpace::<f64>::interval(200).unwrap();
        let f = Kernel::ones(&s);
        // g(z, y) = z, so (f ⋆ g)(x, y) = ∫ z dz = 1/2
        let g = Kernel::from_real_fn(&s, |i, _| s.point(i)[0]);
        let p = f.convolve(&g).unwrap();
        assert!(p.values().iter().all(|z| (z.re - 0.5).abs() < 1e-2 && z.im == 0.0));
        // g(z, y) = y passes through unchanged
        let g = Kernel::from_real_fn(&s, |_, j| s.point(j)[0]);
        let p = f.convolve(&g).unwrap();
        assert!((p.get(3, 10).re - s.point(10)[0]).abs() < 1e-12);
    }

    #[test]
    fn involution_definition_and_laws() {
        let s = DiscreteSpace::finite_discrete(vec![0.5, 0.5]).unwrap();
        let f = Kernel::new(&s, vec![cz(0.0, 0.0), cz(0.0, 1.0), cz(0.0, 0.0), cz(0.0, 0.0)]).unwrap();
        let fs = f.involve();
        assert_eq!(fs.values(), &[cz(0.0, 0.0), cz(0.0, 0.0), cz(0.0, -1.0), cz(0.0, 0.0)]);

        let c16 = DiscreteSpace::<f64>::circle(16).unwrap();
        let sym = Kernel::from_real_fn(&c16, |i, j| c16.dist(i, j).cos());
        assert_eq!(sym.involve().values(), sym.values());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Kernel::random(&c16, &mut rng);
        let g = Kernel::random(&c16, &mut rng);
        let lhs = f.convolve(&g).unwrap().involve();
        let rhs = g.involve().convolve(&f.involve()).unwrap();
        assert!(lhs.dist_sup(&rhs) < 1e-12);
        assert_eq!(f.involve().involve().values(), f.values());
        assert_eq!(f.involve().sup_norm(), f.sup_norm());
    }

    #[test]
    fn seminorms() {
        let s = DiscreteSpace::finite_discrete(vec![0.25; 4]).unwrap();
        let z = Kernel::zeros(&s);
        assert_eq!(z.sup_norm(), 0.0);
        assert_eq!(z.cc_seminorm(1), 0.0);
        assert_eq!(z.rc_seminorm(1), 0.0);
        assert_eq!(z.pc_seminorm(1, 2), 0.0);
        let mut f = Kernel::zeros(&s);
        f.set(1, 2, cz(3.0, 0.0));
        assert_eq!(f.sup_norm(), 3.0);
        assert_eq!(f.cc_seminorm(2), 3.0);
        for j in [0, 1, 3] {
            assert_eq!(f.cc_seminorm(j), 0.0);
        }
        assert_eq!(f.rc_seminorm(1), 3.0);
        assert_eq!(f.pc_seminorm(1, 2), 3.0);
    }

    #[test]
    fn seminorm_adjointness_exhaustive() {
        let s = DiscreteSpace::<f64>::circle(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Kernel::random(&s, &mut rng);
        let fs = f.involve();
        for i in 0..12 {
            assert_eq!(fs.rc_seminorm(i), f.cc_seminorm(i));
            assert_eq!(fs.cc_seminorm(i), f.rc_seminorm(i));
            for j in 0..12 {
                let pc = f.pc_seminorm(i, j);
                assert!(pc <= f.cc_seminorm(j).min(f.rc_seminorm(i)));
                assert!(f.cc_seminorm(j) <= f.sup_norm());
            }
        }
    }

    #[test]
    fn unit_values() {
        let s = DiscreteSpace::finite_discrete(vec![0.5, 0.5]).unwrap();
        let u = unit(&s).unwrap();
        assert_eq!(u.values(), &[cz(2.0, 0.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(2.0, 0.0)]);

        let s = DiscreteSpace::finite_discrete(vec![0.25, 0.75]).unwrap();
        let u = unit(&s).unwrap();
        assert_eq!(u.get(0, 0), cz(4.0, 0.0));
        assert!((u.get(1, 1).re - 4.0 / 3.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Kernel::random(&s, &mut rng);
        assert!(f.convolve(&u).unwrap().dist_sup(&f) < 1e-13);
        assert!(u.convolve(&f).unwrap().dist_sup(&f) < 1e-13);

        let i = DiscreteSpace::<f64>::interval(4).unwrap();
        assert!(matches!(unit(&i), Err(Error::UnitNotAvailable { kind: "interval" })));
    }

    #[test]
    fn iso_identity_is_unit() {
        let s = DiscreteSpace::finite_discrete(vec![0.5, 0.5]).unwrap();
        let k = finite_matrix_iso(&Matrix::identity(2), &s).unwrap();
        assert!(k.dist_sup(&unit(&s).unwrap()) < 1e-15);
    }

    #[test]
    fn iso_star_with_nonuniform_weights() {
        let s = DiscreteSpace::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = Matrix::<f64>::random(3, 3, &mut rng);
        let lhs = finite_matrix_iso(&a, &s).unwrap().involve();
        let rhs = finite_matrix_iso(&a.adjoint(), &s).unwrap();
        // symbolic: conj(A_ji)/√(w_j w_i) on both sides
        let w = s.weights();
        for i in 0..3 {
            for j in 0..3 {
                let expected = a[(j, i)].conj() / (w[i] * w[j]).sqrt();
                assert!((lhs.get(i, j) - expected).norm() < 1e-14);
            }
        }
        assert!(lhs.dist_sup(&rhs) < 1e-14);
    }

    #[test]
    fn row_scaled_map_is_not_star_preserving() {
        // A ↦ A_ij / w_i is multiplicative but conj(A_ji)/w_i ≠ conj(A_ji)/w_j
        // when the weights differ, so it cannot serve as the *-isomorphism.
        let s = DiscreteSpace::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap();
        let w = s.weights().to_vec();
        let row = |a: &Matrix<f64>| Kernel::from_fn(&s, |i, j| a[(i, j)] / w[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = Matrix::<f64>::random(3, 3, &mut rng);
        let b = Matrix::<f64>::random(3, 3, &mut rng);
        assert!(row(&a.matmul(&b)).dist_sup(&row(&a).convolve(&row(&b)).unwrap()) < 1e-13);
        assert!(row(&a.adjoint()).dist_sup(&row(&a).involve()) > 1e-3);
    }

    #[test]
    fn iso_round_trip_and_errors() {
        let s = DiscreteSpace::finite_discrete(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Matrix::<f64>::random(4, 4, &mut rng);
        let back = finite_matrix_iso_inv(&finite_matrix_iso(&a, &s).unwrap()).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-15);
        assert!(matches!(
            finite_matrix_iso(&Matrix::<f64>::identity(3), &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn space_mismatch_rejected() {
        let a = Kernel::ones(&DiscreteSpace::<f64>::circle(4).unwrap());
        let b = Kernel::ones(&DiscreteSpace::<f64>::interval(4).unwrap());
        assert!(matches!(a.convolve(&b), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn f32_algebra() {
        let s = DiscreteSpace::<f32>::circle(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Kernel::random_unit_ball(&s, &mut rng);
        let g = Kernel::random_unit_ball(&s, &mut rng);
        let h = Kernel::random_unit_ball(&s, &mut rng);
        let l = f.convolve(&g).unwrap().convolve(&h).unwrap();
        let r = f.convolve(&g.convolve(&h).unwrap()).unwrap();
        assert!(l.dist_sup(&r) < f32::tol(1e-12) * 10.0);
    }
}
