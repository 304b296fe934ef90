//! Finite-rank tensors over the algebra, the multiplication map `Λ`, the
//! derivation-twisted map `Γ(f ⊗ g) = f ⋆ D(g)`, and the sequence
//! `K_n = Γ(Ĝ_n)` that exhibits a bounded derivation as approximately inner.
//!
//! The bimodule is the algebra itself with `⋄ = ⋆`.
//!
//! Tensor factors may be dense kernels or rank-one kernels `a ⊗ b`; products
//! and derivatives of rank-one factors stay rank-one, which keeps `Γ(Ĝ_n)` at
//! `O(N³)` even though `Ĝ_n` can have rank `N`.

use serde::Serialize;

use crate::algebra::Kernel;
use crate::battery::TestKernel;
use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix};
use crate::report::{strictly_decreasing, Check, Report};
use crate::scalar::{c, re, Real, C};
use crate::space::{ramp, Ball, SpaceRef};
use crate::units::QUADRATURE_SLACK;
use num_traits::Zero;

/// Relative truncation of the bump factorization.
const FACTOR_TRUNCATION: f64 = 1e-12;
/// Allowed `‖Λ(Ĝ_n) − G_n/α_n‖∞`.
const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Defects at or below this are roundoff; rate and monotonicity checks treat
/// them as converged.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// One side of a tensor term.
#[derive(Clone, Debug)]
pub enum Factor<T: Real> {
    Dense(Kernel<T>),
    /// `(x, y) ↦ left(x)·right(y)`
    Outer { left: Vec<C<T>>, right: Vec<C<T>> },
}

impl<T: Real> Factor<T> {
    pub fn to_kernel(&self, space: &SpaceRef<T>) -> Kernel<T> {
        match self {
            Factor::Dense(k) => k.clone(),
            Factor::Outer { left, right } => Kernel::from_fn(space, |i, j| left[i] * right[j]),
        }
    }

    fn add_into(&self, acc: &mut [C<T>], n: usize) {
        match self {
            Factor::Dense(k) => {
                for (a, v) in acc.iter_mut().zip(k.values()) {
                    *a = *a + v;
                }
            }
            Factor::Outer { left, right } => {
                for (i, l) in left.iter().enumerate() {
                    if l.is_zero() {
                        continue;
                    }
                    for (a, r) in acc[i * n..(i + 1) * n].iter_mut().zip(right) {
                        *a = *a + l * r;
                    }
                }
            }
        }
    }

    /// `self ⋆ other`
    pub fn convolve(&self, other: &Factor<T>, space: &SpaceRef<T>) -> Result<Factor<T>> {
        let w = space.weights();
        Ok(match (self, other) {
            (Factor::Outer { left, right }, Factor::Outer { left: l2, right: r2 }) => {
                let s = weighted_dot(right, l2, w);
                Factor::Outer { left: left.iter().map(|x| x * s).collect(), right: r2.clone() }
            }
            (Factor::Outer { left, right }, Factor::Dense(g)) => {
                Factor::Outer { left: left.clone(), right: row_apply(right, g) }
            }
            (Factor::Dense(f), Factor::Outer { left, right }) => {
                Factor::Outer { left: col_apply(f, left), right: right.clone() }
            }
            (Factor::Dense(f), Factor::Dense(g)) => Factor::Dense(f.convolve(g)?),
        })
    }
}

/// `Σ_z a_z w_z b_z`
fn weighted_dot<T: Real>(a: &[C<T>], b: &[C<T>], w: &[T]) -> C<T> {
    a.iter().zip(b).zip(w).fold(C::zero(), |s, ((x, y), wz)| s + x * y * *wz)
}

/// `y ↦ Σ_z v_z w_z g(z, y)`
fn row_apply<T: Real>(v: &[C<T>], g: &Kernel<T>) -> Vec<C<T>> {
    let n = g.n();
    let w = g.space().weights();
    let mut out = vec![C::zero(); n];
    for (z, vz) in v.iter().enumerate() {
        let a = vz * w[z];
        if a.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(g.row(z)) {
            *o = *o + a * x;
        }
    }
    out
}

/// `x ↦ Σ_z f(x, z) w_z v_z`
fn col_apply<T: Real>(f: &Kernel<T>, v: &[C<T>]) -> Vec<C<T>> {
    let w = f.space().weights();
    (0..f.n())
        .map(|x| f.row(x).iter().zip(v).zip(w).fold(C::zero(), |s, ((a, b), wz)| s + a * b * *wz))
        .collect()
}

/// Finite sum `Σ_t a_t ⊗ b_t`.
#[derive(Clone, Debug)]
pub struct TensorKernel<T: Real> {
    space: SpaceRef<T>,
    terms: Vec<(Factor<T>, Factor<T>)>,
}

impl<T: Real> TensorKernel<T> {
    pub fn new(space: &SpaceRef<T>) -> Self {
        Self { space: space.clone(), terms: Vec::new() }
    }

    pub fn from_terms(space: &SpaceRef<T>, terms: Vec<(Kernel<T>, Kernel<T>)>) -> Result<Self> {
        let mut t = Self::new(space);
        for (a, b) in terms {
            t.push(a, b)?;
        }
        Ok(t)
    }

    pub fn push(&mut self, a: Kernel<T>, b: Kernel<T>) -> Result<()> {
        if !a.space().same_as(&self.space) || !b.space().same_as(&self.space) {
            return Err(Error::SpaceMismatch);
        }
        self.terms.push((Factor::Dense(a), Factor::Dense(b)));
        Ok(())
    }

    pub fn push_factors(&mut self, a: Factor<T>, b: Factor<T>) -> Result<()> {
        for f in [&a, &b] {
            match f {
                Factor::Dense(k) if !k.space().same_as(&self.space) => return Err(Error::SpaceMismatch),
                Factor::Outer { left, right } if left.len() != self.space.len() || right.len() != self.space.len() => {
                    return Err(Error::DimensionMismatch { expected: self.space.len(), found: left.len().min(right.len()) })
                }
                _ => {}
            }
        }
        self.terms.push((a, b));
        Ok(())
    }

    pub fn space(&self) -> &SpaceRef<T> {
        &self.space
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(Factor<T>, Factor<T>)] {
        &self.terms
    }

    /// `h ⋆ F`: each `a_t` multiplied on the left.
    pub fn lmul(&self, h: &Kernel<T>) -> Result<Self> {
        let hf = Factor::Dense(h.clone());
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| Ok((hf.convolve(a, &self.space)?, b.clone())))
            .collect::<Result<_>>()?;
        Ok(Self { space: self.space.clone(), terms })
    }

    /// `F ⋆ h`: each `b_t` multiplied on the right.
    pub fn rmul(&self, h: &Kernel<T>) -> Result<Self> {
        let hf = Factor::Dense(h.clone());
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| Ok((a.clone(), b.convolve(&hf, &self.space)?)))
            .collect::<Result<_>>()?;
        Ok(Self { space: self.space.clone(), terms })
    }
}

/// `Λ(F) = Σ_t a_t ⋆ b_t`
pub fn tensor_lambda<T: Real>(f: &TensorKernel<T>) -> Result<Kernel<T>> {
    let n = f.space.len();
    let mut acc = vec![C::zero(); n * n];
    for (a, b) in &f.terms {
        a.convolve(b, &f.space)?.add_into(&mut acc, n);
    }
    Kernel::new(&f.space, acc)
}

/// `Γ(F) = Σ_t a_t ⋆ D(b_t)`
pub fn tensor_gamma<T: Real>(f: &TensorKernel<T>, d: &DerivationSpec<T>) -> Result<Kernel<T>> {
    let n = f.space.len();
    let mut acc = vec![C::zero(); n * n];
    for (a, b) in &f.terms {
        for db in d.apply_factor(b, &f.space)? {
            a.convolve(&db, &f.space)?.add_into(&mut acc, n);
        }
    }
    Kernel::new(&f.space, acc)
}

/// Bounded derivation of the algebra into itself.
#[derive(Clone, Debug)]
pub enum DerivationSpec<T: Real> {
    /// `D(f) = f ⋆ ω − ω ⋆ f`
    Inner(Kernel<T>),
    /// `D(f)(x, y) = i(φ(x) − φ(y)) f(x, y)` for real `φ`
    GaugeGenerator(Vec<T>),
}

impl<T: Real> DerivationSpec<T> {
    pub fn apply(&self, f: &Kernel<T>) -> Result<Kernel<T>> {
        match self {
            DerivationSpec::Inner(omega) => Ok(&f.convolve(omega)? - &omega.convolve(f)?),
            DerivationSpec::GaugeGenerator(phi) => {
                if phi.len() != f.n() {
                    return Err(Error::DimensionMismatch { expected: f.n(), found: phi.len() });
                }
                Ok(Kernel::from_fn(f.space(), |i, j| f.get(i, j) * c(T::zero(), phi[i] - phi[j])))
            }
        }
    }

    /// `D` on a factor, as a sum of factors (two rank-one pieces for `a ⊗ b`).
    pub fn apply_factor(&self, f: &Factor<T>, space: &SpaceRef<T>) -> Result<Vec<Factor<T>>> {
        match (self, f) {
            (_, Factor::Dense(k)) => Ok(vec![Factor::Dense(self.apply(k)?)]),
            (DerivationSpec::Inner(omega), Factor::Outer { .. }) => {
                let om = Factor::Dense(omega.clone());
                let Factor::Outer { left, right } = om.convolve(f, space)? else {
                    unreachable!("dense ⋆ rank-one is rank-one")
                };
                Ok(vec![f.convolve(&om, space)?, Factor::Outer { left: left.iter().map(|z| -z).collect(), right }])
            }
            (DerivationSpec::GaugeGenerator(phi), Factor::Outer { left, right }) => {
                if phi.len() != left.len() {
                    return Err(Error::DimensionMismatch { expected: left.len(), found: phi.len() });
                }
                let i = c(T::zero(), T::one());
                Ok(vec![
                    Factor::Outer { left: left.iter().zip(phi).map(|(a, p)| a * i * *p).collect(), right: right.clone() },
                    Factor::Outer { left: left.clone(), right: right.iter().zip(phi).map(|(b, p)| -(b * i * *p)).collect() },
                ])
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DerivationSpec::Inner(omega) => omega.sup_norm() == T::zero(),
            DerivationSpec::GaugeGenerator(phi) => phi.iter().all(|p| *p == phi[0]),
        }
    }
}

/// `Ĝ_n` with the data it was built from.
#[derive(Clone, Debug)]
pub struct GnHat<T: Real> {
    pub tensor: TensorKernel<T>,
    pub delta: T,
    pub delta_prime: T,
    pub alpha: T,
    /// `‖Λ(Ĝ_n) − G_n/α_n‖∞`
    pub reconstruction_error: T,
}

/// `Ĝ_n = Σ_t (u_t/α_n ⊗ 1) ⊗ (1 ⊗ v_t)` where `G_n(x, y) = Σ_t u_t(x) v_t(y)` is
/// the bump `ramp(d(x, y), δ_n, δ'_n)` factored by SVD.
pub fn gn_hat<T: Real>(space: &SpaceRef<T>, deltas: &[T], n: usize) -> Result<GnHat<T>> {
    let cond = space.check_conditions(deltas)?;
    if !cond.c2 {
        let witness = cond.witnesses.into_iter().next().expect("failed condition has a witness");
        return Err(Error::ConditionFailed { condition: "C2", witness });
    }
    let delta = *deltas
        .get(n)
        .ok_or_else(|| Error::InvalidArgument(format!("index {n} outside the δ-sequence")))?;
    build_gn_hat(space, delta)
}

/// [`gn_hat`] for every index, checking the hypotheses once.
pub fn gn_hat_sequence<T: Real>(space: &SpaceRef<T>, deltas: &[T]) -> Result<Vec<GnHat<T>>> {
    let cond = space.check_conditions(deltas)?;
    if !cond.c2 {
        let witness = cond.witnesses.into_iter().next().expect("failed condition has a witness");
        return Err(Error::ConditionFailed { condition: "C2", witness });
    }
    deltas.iter().map(|&d| build_gn_hat(space, d)).collect()
}

fn build_gn_hat<T: Real>(space: &SpaceRef<T>, delta: T) -> Result<GnHat<T>> {
    let n = space.len();
    let dp = space.find_delta_prime(delta)?;
    let alpha = space.ball_measure(0, delta, Ball::Open);
    let g = Matrix::from_fn(n, n, |i, j| re(ramp(space.dist(i, j), delta, dp)));
    let s = svd(&g);
    let rank = s.rank(T::lit(FACTOR_TRUNCATION));
    if rank > n {
        return Err(Error::FactorizationOverflow { rank, n });
    }
    let ones = vec![re(T::one()); n];
    let inv = T::one() / alpha;
    let mut tensor = TensorKernel::new(space);
    for t in 0..rank {
        let left: Vec<C<T>> = s.u[t].iter().map(|z| z * (s.sigma[t] * inv)).collect();
        let right: Vec<C<T>> = s.v[t].iter().map(|z| z.conj()).collect();
        tensor.push_factors(
            Factor::Outer { left, right: ones.clone() },
            Factor::Outer { left: ones.clone(), right },
        )?;
    }
    let lambda = tensor_lambda(&tensor)?;
    let mut err = T::zero();
    for i in 0..n {
        for j in 0..n {
            err = err.max((lambda.get(i, j) - g[(i, j)] * inv).norm());
        }
    }
    if err > T::tol(RECONSTRUCTION_TOL) {
        return Err(Error::FactorizationOverflow { rank, n });
    }
    Ok(GnHat { tensor, delta, delta_prime: dp, alpha, reconstruction_error: err })
}

/// Per-kernel defects `‖h ⋆ K_n − K_n ⋆ h − D(h)‖∞` over the sequence.
#[derive(Clone, Debug, Serialize)]
pub struct DerivRun {
    pub names: Vec<String>,
    /// `defects[h][n]`
    pub defects: Vec<Vec<f64>>,
    pub bounds: Vec<f64>,
    pub report: Report,
}

/// Sampled Lipschitz constant `max |φ(x) − φ(y)| / d(x, y)`.
fn sampled_lipschitz<T: Real>(space: &SpaceRef<T>, phi: &[T]) -> T {
    let n = space.len();
    let mut l = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            l = l.max((phi[i] - phi[j]).abs() / space.dist(i, j));
        }
    }
    l
}

/// Bound on the final defect for battery kernel `h`.
///
/// Inner: `0.05·‖ω‖∞‖h‖∞ + C/N`. Gauge: with `K_n = E_n·i(φ̄ − φ(y))` the defect
/// splits as `iφ̄[h, E_n] − iφ(y)(h ⋆ E_n − h) + i(E_n ⋆ φh − φh)`, and each piece
/// is held by the unit bound `L·δ'(1+δ) + δ·‖f‖∞`.
fn final_bound<T: Real>(space: &SpaceRef<T>, d: &DerivationSpec<T>, h: &TestKernel<T>, last: &GnHat<T>) -> T {
    let slack = T::lit(QUADRATURE_SLACK) / T::from_usize_lossy(space.resolution());
    let hn = h.kernel.sup_norm();
    match d {
        DerivationSpec::Inner(omega) => T::lit(0.05) * omega.sup_norm() * hn + slack,
        DerivationSpec::GaugeGenerator(phi) => {
            let unit = |l: T, norm: T| l * last.delta_prime * (T::one() + last.delta) + last.delta * norm;
            let w = space.weights();
            let mean = phi.iter().zip(w).fold(T::zero(), |a, (p, wi)| a + *p * *wi);
            let sup = phi.iter().fold(T::zero(), |a, p| a.max(p.abs()));
            let lphi = sampled_lipschitz(space, phi);
            let l_prod = sup * h.lipschitz + lphi * hn;
            mean.abs() * T::lit(2.0) * unit(h.lipschitz, hn) + sup * unit(h.lipschitz, hn) + unit(l_prod, sup * hn) + slack
        }
    }
}

/// `K_n = Γ(Ĝ_n)` for each element of `seq`, and the defects of every
/// battery kernel.
///
/// Each kernel passes when its last defect is at most a quarter of its first
/// (or below [`ROUNDOFF_FLOOR`]) and below the bound of [`final_bound`]. For gauge generators the defects
/// must also strictly decrease; for inner derivations monotonicity is recorded.
pub fn approx_inner_run<T: Real>(d: &DerivationSpec<T>, battery: &[TestKernel<T>], seq: &[GnHat<T>]) -> Result<DerivRun> {
    let Some(last) = seq.last() else {
        return Err(Error::InvalidArgument("empty Ĝ sequence".into()));
    };
    let space = last.tensor.space().clone();
    let ks: Vec<Kernel<T>> = seq.iter().map(|g| tensor_gamma(&g.tensor, d)).collect::<Result<_>>()?;
    let title = match d {
        DerivationSpec::Inner(_) => "inner",
        DerivationSpec::GaugeGenerator(_) => "gauge",
    };
    let mut report = Report::new(title);
    let mut names = Vec::new();
    let mut defects = Vec::new();
    let mut bounds = Vec::new();
    for h in battery {
        let dh = d.apply(&h.kernel)?;
        let row: Vec<f64> = ks
            .iter()
            .map(|k| {
                let lhs = &h.kernel.convolve(k)? - &k.convolve(&h.kernel)?;
                Ok(lhs.dist_sup(&dh).as_f64())
            })
            .collect::<Result<_>>()?;
        let bound = final_bound(&space, d, h, last).as_f64();
        let first = row[0];
        let end = *row.last().expect("nonempty sequence");
        let rate = Check::new(format!("{}/rate", h.name), vec![end], Some(first / 4.0), end <= first / 4.0 || end <= ROUNDOFF_FLOOR);
        report.push(rate);
        report.push(Check::at_most(format!("{}/bound", h.name), vec![end], bound));
        let dec = strictly_decreasing(&row) || row.iter().all(|&v| v <= ROUNDOFF_FLOOR);
        let mono = match d {
            DerivationSpec::GaugeGenerator(_) => Check::new(format!("{}/strictly_decreasing", h.name), row.clone(), None, dec),
            DerivationSpec::Inner(_) => {
                Check::info(format!("{}/defects", h.name), row.clone()).with_note(format!("strictly decreasing: {dec}"))
            }
        };
        report.push(mono);
        names.push(h.name.to_string());
        defects.push(row);
        bounds.push(bound);
    }
    Ok(DerivRun { names, defects, bounds, report })
}
