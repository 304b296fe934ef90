//! Integral-operator representation `[ρ(f) g](x) = ∫ f(x, y) g(y) dm(y)` and
//! the module actions on vector-valued sampled functions.

use rand::Rng;
use serde::Serialize;

use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::report::{Check, Report};
use crate::scalar::{c, Real, C};
use crate::space::SpaceRef;
use num_traits::Zero;

/// Sampled `X → ℂ^d`, stored node-major (`values[i * dim + k]`).
#[derive(Clone, Debug)]
pub struct SampledFunction<T: Real> {
    space: SpaceRef<T>,
    values: Vec<C<T>>,
    dim: usize,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(space: &SpaceRef<T>, values: Vec<C<T>>, dim: usize) -> Result<Self> {
        if dim == 0 || values.len() != space.len() * dim {
            return Err(Error::DimensionMismatch { expected: space.len() * dim.max(1), found: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sample".into()));
        }
        Ok(Self { space: space.clone(), values, dim })
    }

    pub fn scalar(space: &SpaceRef<T>, values: Vec<C<T>>) -> Result<Self> {
        Self::new(space, values, 1)
    }

    pub fn from_fn(space: &SpaceRef<T>, dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let values = (0..space.len()).flat_map(|i| (0..dim).map(move |k| (i, k))).map(|(i, k)| f(i, k)).collect();
        Self { space: space.clone(), values, dim }
    }

    pub fn random(space: &SpaceRef<T>, dim: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(space, dim, |_, _| c(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0))))
    }

    pub fn space(&self) -> &SpaceRef<T> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn get(&self, i: usize, k: usize) -> C<T> {
        self.values[i * self.dim + k]
    }

    /// Component `k` as a scalar function.
    pub fn component(&self, k: usize) -> Vec<C<T>> {
        (0..self.space.len()).map(|i| self.get(i, k)).collect()
    }

    /// `max_i |g(x_i)|` with the Euclidean norm on `ℂ^d`.
    pub fn sup_norm(&self) -> T {
        self.values
            .chunks(self.dim)
            .map(|v| v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt())
            .fold(T::zero(), T::max)
    }

    pub fn dist_sup(&self, other: &Self) -> T {
        self.values
            .chunks(self.dim)
            .zip(other.values.chunks(other.dim))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).fold(T::zero(), |s, t| s + t).sqrt())
            .fold(T::zero(), T::max)
    }

    /// `Σ_i w_i Σ_k conj(u_ik) v_ik`
    pub fn inner(&self, other: &Self) -> C<T> {
        let w = self.space.weights();
        self.values
            .chunks(self.dim)
            .zip(other.values.chunks(other.dim))
            .zip(w)
            .fold(C::zero(), |acc, ((a, b), wi)| {
                acc + a.iter().zip(b).fold(C::zero(), |s, (x, y)| s + x.conj() * y) * *wi
            })
    }
}

fn check_pair<T: Real>(f: &Kernel<T>, g: &SampledFunction<T>) -> Result<()> {
    if f.space().same_as(&g.space) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// `[ρ(f) g](x) = Σ_j f(x, x_j) w_j g(x_j)`, componentwise.
pub fn rep_apply<T: Real>(f: &Kernel<T>, g: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    act_left(f, g)
}

/// Left action `(f ⋆ g)(x) = ∫ f(x, z) g(z) dm(z)` on `C(X; ℂ^d)`.
pub fn act_left<T: Real>(f: &Kernel<T>, g: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    check_pair(f, g)?;
    let n = f.n();
    let d = g.dim;
    let w = f.space().weights();
    let mut out = vec![C::zero(); n * d];
    for i in 0..n {
        let row = f.row(i);
        let acc = &mut out[i * d..(i + 1) * d];
        for z in 0..n {
            let a = row[z] * w[z];
            for (o, v) in acc.iter_mut().zip(&g.values[z * d..(z + 1) * d]) {
                *o = *o + a * v;
            }
        }
    }
    Ok(SampledFunction { space: g.space.clone(), values: out, dim: d })
}

/// Right action `(g ⋆ f)(y) = ∫ g(z) f(z, y) dm(z)`.
pub fn act_right<T: Real>(g: &SampledFunction<T>, f: &Kernel<T>) -> Result<SampledFunction<T>> {
    check_pair(f, g)?;
    let n = f.n();
    let d = g.dim;
    let w = f.space().weights();
    let mut out = vec![C::zero(); n * d];
    for z in 0..n {
        let row = f.row(z);
        let gz = &g.values[z * d..(z + 1) * d];
        for y in 0..n {
            let a = row[y] * w[z];
            for (o, v) in out[y * d..(y + 1) * d].iter_mut().zip(gz) {
                *o = *o + a * v;
            }
        }
    }
    Ok(SampledFunction { space: g.space.clone(), values: out, dim: d })
}

/// Matrix of `ρ(f)` acting on sample vectors: `f_ij · w_j`.
pub fn rep_matrix<T: Real>(f: &Kernel<T>) -> Matrix<T> {
    let w = f.space().weights();
    Matrix::from_fn(f.n(), f.n(), |i, j| f.get(i, j) * w[j])
}

/// Matrix of `ρ(f)` on `L²(m)` in an orthonormal frame: `f_ij · √(w_i w_j)`.
pub fn l2_matrix<T: Real>(f: &Kernel<T>) -> Matrix<T> {
    let w = f.space().weights();
    Matrix::from_fn(f.n(), f.n(), |i, j| f.get(i, j) * (w[i] * w[j]).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpNormMode {
    Cx,
    L1,
    L2,
    Linf,
}

impl OpNormMode {
    pub const ALL: [OpNormMode; 4] = [OpNormMode::Cx, OpNormMode::L1, OpNormMode::L2, OpNormMode::Linf];
}

/// Operator norm of `ρ(f)` on `C(X)`/`L^∞` (weighted row sums), `L¹`
/// (weighted column sums) or `L²` (largest singular value).
pub fn op_norm<T: Real>(f: &Kernel<T>, mode: OpNormMode) -> T {
    let n = f.n();
    let w = f.space().weights();
    match mode {
        OpNormMode::Cx | OpNormMode::Linf => (0..n)
            .map(|i| f.row(i).iter().zip(w).map(|(z, wj)| z.norm() * *wj).fold(T::zero(), |a, b| a + b))
            .fold(T::zero(), T::max),
        OpNormMode::L1 => (0..n)
            .map(|j| (0..n).map(|i| f.get(i, j).norm() * w[i]).fold(T::zero(), |a, b| a + b))
            .fold(T::zero(), T::max),
        OpNormMode::L2 => singular_values(&l2_matrix(f)).first().copied().unwrap_or_else(T::zero),
    }
}

/// `⟨ρ(f) u, v⟩ = ⟨u, ρ(f*) v⟩` on `pairs` random pairs.
pub fn adjoint_check<T: Real>(f: &Kernel<T>, rng: &mut impl Rng, pairs: usize) -> Result<Report> {
    let space = f.space();
    let star = f.involve();
    let mut worst = T::zero();
    for _ in 0..pairs {
        let u = SampledFunction::random(space, 1, rng);
        let v = SampledFunction::random(space, 1, rng);
        let lhs = rep_apply(f, &u)?.inner(&v);
        let rhs = u.inner(&rep_apply(&star, &v)?);
        worst = worst.max((lhs - rhs).norm());
    }
    let mut report = Report::new("adjoint");
    report.push(Check::at_most("l2_adjoint_defect", vec![worst.as_f64()], 1e-12));
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralDecay {
    /// Leading `k` singular values of the `L²` operator, descending.
    pub values: Vec<f64>,
    /// `Σ_{i>k} σ_i / Σ σ_i` (0 for the zero kernel).
    pub tail_mass: f64,
}

pub fn spectral_decay<T: Real>(f: &Kernel<T>, k: usize) -> Result<SpectralDecay> {
    if k > f.n() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds {} nodes", f.n())));
    }
    let sigma: Vec<f64> = singular_values(&l2_matrix(f)).into_iter().map(|s| s.as_f64()).collect();
    let total: f64 = sigma.iter().sum();
    let tail: f64 = sigma[k..].iter().sum();
    Ok(SpectralDecay {
        values: sigma[..k].to_vec(),
        tail_mass: if total > 0.0 { tail / total } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::unit;
    use crate::space::DiscreteSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_acts_as_identity() {
        let s = DiscreteSpace::<f64>::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap();
        let u = unit(&s).unwrap();
        let g = SampledFunction::random(&s, 2, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(act_left(&u, &g).unwrap().dist_sup(&g) < 1e-15);
        assert!(act_right(&g, &u).unwrap().dist_sup(&g) < 1e-15);
    }

    #[test]
    fn ones_average() {
        let s = DiscreteSpace::<f64>::interval(50).unwrap();
        let g = SampledFunction::random(&s, 1, &mut ChaCha8Rng::seed_from_u64(2));
        let mean = g.values().iter().zip(s.weights()).fold(C::zero(), |a, (z, w)| a + z * w);
        let out = rep_apply(&Kernel::ones(&s), &g).unwrap();
        assert!(out.values().iter().all(|z| (z - mean).norm() < 1e-15));
    }

    #[test]
    fn interval_moment() {
        let s = DiscreteSpace::<f64>::interval(200).unwrap();
        let f = Kernel::from_real_fn(&s, |i, j| s.point(i)[0] * s.point(j)[0]);
        let g = SampledFunction::from_fn(&s, 1, |j, _| c(s.point(j)[0], 0.0));
        let out = rep_apply(&f, &g).unwrap();
        for i in 0..200 {
            assert!((out.get(i, 0).re - s.point(i)[0] / 3.0).abs() <= 1e-2);
        }
    }

    #[test]
    fn representation_is_multiplicative() {
        let s = DiscreteSpace::<f64>::circle(40).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Kernel::random(&s, &mut rng);
        let h = Kernel::random(&s, &mut rng);
        let g = SampledFunction::random(&s, 3, &mut rng);
        let fh = f.convolve(&h).unwrap();
        let lhs = rep_apply(&fh, &g).unwrap();
        let rhs = rep_apply(&f, &rep_apply(&h, &g).unwrap()).unwrap();
        assert!(lhs.dist_sup(&rhs) <= 1e-12);
        assert!(rep_matrix(&fh).max_abs_diff(&rep_matrix(&f).matmul(&rep_matrix(&h))) <= 1e-12);
        let r1 = act_right(&g, &fh).unwrap();
        let r2 = act_right(&act_right(&g, &f).unwrap(), &h).unwrap();
        assert!(r1.dist_sup(&r2) <= 1e-12);
    }

    #[test]
    fn vector_action_is_componentwise() {
        let s = DiscreteSpace::<f64>::circle(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = Kernel::random(&s, &mut rng);
        let g = SampledFunction::random(&s, 2, &mut rng);
        let out = act_left(&f, &g).unwrap();
        for k in 0..2 {
            let gk = SampledFunction::scalar(&s, g.component(k)).unwrap();
            let ok = act_left(&f, &gk).unwrap();
            assert_eq!(ok.values(), out.component(k).as_slice());
        }
        assert!(out.sup_norm() <= f.sup_norm() * g.sup_norm() + 1e-12);
    }

    #[test]
    fn op_norm_examples() {
        let s = DiscreteSpace::<f64>::interval(200).unwrap();
        for mode in OpNormMode::ALL {
            assert!((op_norm(&Kernel::ones(&s), mode) - 1.0).abs() < 1e-12, "{mode:?}");
        }
        let f = Kernel::from_real_fn(&s, |_, j| 2.0 * s.point(j)[0] - 1.0);
        assert!((op_norm(&f, OpNormMode::Cx) - 0.5).abs() <= 0.01);
        assert!((f.sup_norm() - 1.0).abs() < 0.01);

        let mut single = Kernel::zeros(&s);
        single.set(7, 7, c(3.0, -4.0));
        assert!((op_norm(&single, OpNormMode::Cx) - 5.0 * s.weight(7)).abs() < 1e-15);
    }

    #[test]
    fn op_norms_below_sup_and_l2_star_invariant() {
        let s = DiscreteSpace::<f64>::circle(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let f = Kernel::random(&s, &mut rng);
            for mode in OpNormMode::ALL {
                assert!(op_norm(&f, mode) <= f.sup_norm() + 1e-12);
            }
            assert!((op_norm(&f, OpNormMode::L2) - op_norm(&f.involve(), OpNormMode::L2)).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_examples() {
        let s = DiscreteSpace::<f64>::circle(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = Kernel::random(&s, &mut rng);
        assert!(adjoint_check(&f, &mut rng, 20).unwrap().pass);

        let herm = &f + &f.involve();
        let skew = (&f - &f.involve()).scale(c(0.0, 1.0));
        for k in [herm, skew] {
            for _ in 0..5 {
                let u = SampledFunction::random(&s, 1, &mut rng);
                let q = rep_apply(&k, &u).unwrap().inner(&u);
                assert!(q.im.abs() <= 1e-12 * q.norm().max(1.0));
            }
        }
    }

    #[test]
    fn spectral_examples() {
        let s = DiscreteSpace::<f64>::circle(128).unwrap();
        let f = Kernel::from_real_fn(&s, |i, j| (std::f64::consts::TAU * (s.point(i)[0] - s.point(j)[0])).sin());
        let d = spectral_decay(&f, 3).unwrap();
        assert!(d.values[1] > 0.1 && d.values[2] / d.values[0] <= 1e-10);

        let a: Vec<C<f64>> = (0..128).map(|i| c(1.0 + i as f64 / 128.0, 0.0)).collect();
        let b: Vec<C<f64>> = (0..128).map(|i| c(0.0, (i as f64).sin())).collect();
        let r1 = spectral_decay(&Kernel::outer(&s, &a, &b).unwrap(), 128).unwrap();
        assert!(r1.values[0] > 0.1 && r1.values[1] <= 1e-12 * r1.values[0]);

        let z = spectral_decay(&Kernel::zeros(&s), 4).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0) && z.tail_mass == 0.0);
        assert!(spectral_decay(&Kernel::zeros(&s), 129).is_err());
    }

    #[test]
    fn tail_mass_settles_under_refinement() {
        let tail = |n: usize| {
            let s = DiscreteSpace::<f64>::circle(n).unwrap();
            let f = Kernel::from_real_fn(&s, |i, j| (std::f64::consts::TAU * s.dist(i, j)).cos().exp());
            spectral_decay(&f, 9).unwrap().tail_mass
        };
        let (a, b) = (tail(32), tail(64));
        assert!(a < 1e-3 && b <= a + 1e-12, "{a} {b}");
    }

    #[test]
    fn space_mismatch() {
        let s = DiscreteSpace::<f64>::circle(8).unwrap();
        let t = DiscreteSpace::<f64>::circle(9).unwrap();
        let g = SampledFunction::random(&t, 1, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(rep_apply(&Kernel::ones(&s), &g), Err(Error::SpaceMismatch)));
    }
}
