//! Center, one-sided ideals, functorial maps, gauge automorphisms, measure
//! recovery and split extensions.

mod center;
mod ideal;
mod measure;
mod morphism;

pub use center::{center_defect, center_exact, CenterDefect, CenterProbe};
pub use ideal::{column_space, ideal_closure_check, ideal_lv, ideal_rv, random_right_ideal_element, IdealProjector};
pub use measure::{recover_measure, MeasureRecovery};
pub use morphism::{gauge, pullback, restrict_and_split, SpaceMap};

use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::linalg::{inner, orthonormal_span};
use crate::scalar::{re, Real, C};
use crate::space::SpaceRef;
use num_traits::Zero;

/// Relative singular-value threshold used whenever a subspace is extracted.
pub const RANK_TOL: f64 = 1e-10;

/// Finite-dimensional subspace of sampled functions, with a basis that is
/// orthonormal for `⟨u, v⟩ = Σ w_i conj(u_i) v_i`.
#[derive(Clone, Debug)]
pub struct Subspace<T: Real> {
    space: SpaceRef<T>,
    basis: Vec<Vec<C<T>>>,
}

impl<T: Real> Subspace<T> {
    pub fn zero(space: &SpaceRef<T>) -> Self {
        Self { space: space.clone(), basis: Vec::new() }
    }

    /// All sampled functions: the normalized indicator of each node.
    pub fn full(space: &SpaceRef<T>) -> Self {
        let n = space.len();
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![C::zero(); n];
                e[i] = re(T::one() / space.weight(i).sqrt());
                e
            })
            .collect();
        Self { space: space.clone(), basis }
    }

    /// Span of `vectors`, dropping directions below [`RANK_TOL`].
    pub fn span(space: &SpaceRef<T>, vectors: &[Vec<C<T>>]) -> Result<Self> {
        let n = space.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let sq: Vec<T> = space.weights().iter().map(|w| w.sqrt()).collect();
        let scaled: Vec<Vec<C<T>>> =
            vectors.iter().map(|v| v.iter().zip(&sq).map(|(x, s)| x * *s).collect()).collect();
        let basis = orthonormal_span(n, &scaled, T::lit(RANK_TOL))
            .into_iter()
            .map(|u| u.iter().zip(&sq).map(|(x, s)| x.unscale(*s)).collect())
            .collect();
        Ok(Self { space: space.clone(), basis })
    }

    /// Orthonormal basis supplied by the caller (checked within 1e-10).
    pub fn from_orthonormal(space: &SpaceRef<T>, basis: Vec<Vec<C<T>>>) -> Result<Self> {
        let s = Self { space: space.clone(), basis };
        for (a, u) in s.basis.iter().enumerate() {
            if u.len() != space.len() {
                return Err(Error::DimensionMismatch { expected: space.len(), found: u.len() });
            }
            for (b, v) in s.basis.iter().enumerate() {
                let target = if a == b { T::one() } else { T::zero() };
                if (s.inner(u, v) - re(target)).norm() > T::tol(1e-10) {
                    return Err(Error::InvalidArgument(format!("basis not orthonormal at ({a}, {b})")));
                }
            }
        }
        Ok(s)
    }

    pub fn space(&self) -> &SpaceRef<T> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C<T>>] {
        &self.basis
    }

    /// `V̄`
    pub fn conj(&self) -> Self {
        Self {
            space: self.space.clone(),
            basis: self.basis.iter().map(|u| u.iter().map(|z| z.conj()).collect()).collect(),
        }
    }

    /// `Σ w_i conj(u_i) v_i`
    pub fn inner(&self, u: &[C<T>], v: &[C<T>]) -> C<T> {
        u.iter()
            .zip(v)
            .zip(self.space.weights())
            .fold(C::zero(), |acc, ((a, b), w)| acc + a.conj() * b * *w)
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, v: &[C<T>]) -> Vec<C<T>> {
        let mut out = vec![C::zero(); v.len()];
        for e in &self.basis {
            let k = self.inner(e, v);
            for (o, x) in out.iter_mut().zip(e) {
                *o = *o + k * x;
            }
        }
        out
    }

    pub fn contains(&self, v: &[C<T>], tol: T) -> bool {
        let p = self.project(v);
        let scale = v.iter().map(|z| z.norm()).fold(T::one(), T::max);
        p.iter().zip(v).all(|(a, b)| (a - b).norm() <= tol * scale)
    }
}

/// Orthonormal span of kernels under `⟨f, g⟩ = Σ w_i w_j conj(f_ij) g_ij`.
#[derive(Clone, Debug)]
pub struct KernelSpan<T: Real> {
    space: SpaceRef<T>,
    /// Orthonormal basis in the `√(w_i w_j)`-scaled coordinates.
    scaled: Vec<Vec<C<T>>>,
}

impl<T: Real> KernelSpan<T> {
    pub fn new(space: &SpaceRef<T>, kernels: &[Kernel<T>]) -> Result<Self> {
        for k in kernels {
            if !k.space().same_as(space) {
                return Err(Error::SpaceMismatch);
            }
        }
        let vectors: Vec<Vec<C<T>>> = kernels.iter().map(|k| scale_kernel(k)).collect();
        let len = space.len() * space.len();
        Ok(Self { space: space.clone(), scaled: orthonormal_span(len, &vectors, T::lit(RANK_TOL)) })
    }

    pub fn dim(&self) -> usize {
        self.scaled.len()
    }

    /// Orthonormal basis as kernels.
    pub fn basis(&self) -> Vec<Kernel<T>> {
        self.scaled.iter().map(|v| unscale_kernel(&self.space, v)).collect()
    }

    pub fn project(&self, f: &Kernel<T>) -> Kernel<T> {
        let v = scale_kernel(f);
        let mut out = vec![C::zero(); v.len()];
        for e in &self.scaled {
            let k = inner(e, &v);
            for (o, x) in out.iter_mut().zip(e) {
                *o = *o + k * x;
            }
        }
        unscale_kernel(&self.space, &out)
    }

    /// `‖f − P f‖∞`
    pub fn residual(&self, f: &Kernel<T>) -> T {
        f.dist_sup(&self.project(f))
    }
}

fn scale_kernel<T: Real>(f: &Kernel<T>) -> Vec<C<T>> {
    let n = f.n();
    let sq: Vec<T> = f.space().weights().iter().map(|w| w.sqrt()).collect();
    f.values().iter().enumerate().map(|(k, z)| z * (sq[k / n] * sq[k % n])).collect()
}

fn unscale_kernel<T: Real>(space: &SpaceRef<T>, v: &[C<T>]) -> Kernel<T> {
    let sq: Vec<T> = space.weights().iter().map(|w| w.sqrt()).collect();
    Kernel::from_fn(space, |i, j| v[i * sq.len() + j].unscale(sq[i] * sq[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use crate::space::DiscreteSpace;

    #[test]
    fn full_and_zero() {
        let s = DiscreteSpace::<f64>::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap();
        let full = Subspace::full(&s);
        assert_eq!(full.dim(), 3);
        let v = vec![c(1.0, 2.0), c(-1.0, 0.0), c(0.5, 0.5)];
        assert!(full.contains(&v, 1e-12));
        assert!(Subspace::zero(&s).project(&v).iter().all(|z| z.norm() == 0.0));
        assert!(Subspace::from_orthonormal(&s, full.basis().to_vec()).is_ok());
    }

    #[test]
    fn weighted_orthonormality() {
        let s = DiscreteSpace::<f64>::interval(20).unwrap();
        let ones = vec![c(1.0, 0.0); 20];
        let x: Vec<C<f64>> = (0..20).map(|i| c(s.point(i)[0], 0.0)).collect();
        let twice: Vec<C<f64>> = ones.iter().zip(&x).map(|(a, b)| a * 2.0 - b * 3.0).collect();
        let v = Subspace::span(&s, &[ones, x, twice]).unwrap();
        assert_eq!(v.dim(), 2);
        for a in v.basis() {
            for b in v.basis() {
                let ip = v.inner(a, b);
                assert!(ip.norm() < 1e-12 || (ip.re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_span_dimension() {
        let s = DiscreteSpace::<f64>::finite_discrete(vec![0.25; 4]).unwrap();
        let a = Kernel::from_real_fn(&s, |i, j| (i + j) as f64);
        let b = Kernel::from_real_fn(&s, |i, _| i as f64);
        let sum = &a + &b;
        let span = KernelSpan::new(&s, &[a.clone(), b, sum]).unwrap();
        assert_eq!(span.dim(), 2);
        assert!(span.residual(&a) < 1e-12);
        assert!(span.residual(&Kernel::from_real_fn(&s, |i, j| (i * j) as f64)) > 0.1);
    }
}
