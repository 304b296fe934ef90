use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::scalar::{Real, C};
use crate::space::SpaceRef;

/// Node map `α : X' → X`.
#[derive(Clone, Debug)]
pub struct SpaceMap<T: Real> {
    source: SpaceRef<T>,
    target: SpaceRef<T>,
    map: Vec<usize>,
    measure_preserving: bool,
}

const PRESERVE_TOL: f64 = 1e-10;

impl<T: Real> SpaceMap<T> {
    pub fn new(source: &SpaceRef<T>, target: &SpaceRef<T>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::DimensionMismatch { expected: source.len(), found: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&i| i >= target.len()) {
            return Err(Error::InvalidArgument(format!("image node {bad} out of range")));
        }
        let measure_preserving = push_forward_defect(source, target, &map).is_none();
        Ok(Self { source: source.clone(), target: target.clone(), map, measure_preserving })
    }

    pub fn identity(space: &SpaceRef<T>) -> Self {
        Self::new(space, space, (0..space.len()).collect()).expect("identity map is valid")
    }

    pub fn source(&self) -> &SpaceRef<T> {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef<T> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn measure_preserving(&self) -> bool {
        self.measure_preserving
    }

    /// `Err(NotMeasurePreserving)` naming the first node whose preimage weight is off.
    pub fn require_measure_preserving(&self) -> Result<()> {
        match push_forward_defect(&self.source, &self.target, &self.map) {
            None => Ok(()),
            Some((node, pushed, weight)) => Err(Error::NotMeasurePreserving { node, pushed, weight }),
        }
    }

    /// `self ∘ inner : X'' → X`
    pub fn compose(&self, inner: &SpaceMap<T>) -> Result<Self> {
        if !inner.target.same_as(&self.source) {
            return Err(Error::SpaceMismatch);
        }
        let map = inner.map.iter().map(|&i| self.map[i]).collect();
        Self::new(&inner.source, &self.target, map)
    }
}

fn push_forward_defect<T: Real>(source: &SpaceRef<T>, target: &SpaceRef<T>, map: &[usize]) -> Option<(usize, f64, f64)> {
    let mut pushed = vec![T::zero(); target.len()];
    for (i, &a) in map.iter().enumerate() {
        pushed[a] = pushed[a] + source.weight(i);
    }
    pushed
        .iter()
        .zip(target.weights())
        .enumerate()
        .find(|(_, (p, w))| (**p - **w).abs() > T::tol(PRESERVE_TOL))
        .map(|(i, (p, w))| (i, p.as_f64(), w.as_f64()))
}

/// `(Mα f)(x', y') = f(α x', α y')`
pub fn pullback<T: Real>(alpha: &SpaceMap<T>, f: &Kernel<T>) -> Result<Kernel<T>> {
    alpha.require_measure_preserving()?;
    if !f.space().same_as(&alpha.target) {
        return Err(Error::SpaceMismatch);
    }
    let m = &alpha.map;
    Ok(Kernel::from_fn(&alpha.source, |i, j| f.get(m[i], m[j])))
}

/// `(β̂ f)(x, y) = β(x) f(x, y) conj β(y)`
pub fn gauge<T: Real>(beta: &[C<T>], f: &Kernel<T>) -> Result<Kernel<T>> {
    if beta.len() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), found: beta.len() });
    }
    if let Some((index, b)) = beta.iter().enumerate().find(|(_, b)| (b.norm() - T::one()).abs() > T::tol(1e-12)) {
        return Err(Error::NotUnimodular { index, modulus: b.norm().as_f64() });
    }
    Ok(Kernel::from_fn(f.space(), |i, j| beta[i] * f.get(i, j) * beta[j].conj()))
}

/// Splitting of `0 → I → M_X → M_{X₀} → 0` for a full-measure node subset `X₀`
/// with retraction `ρ : X → X₀` (`retraction[i]` is a position in `subset`).
///
/// Checks `(Mι)(Mρ) = id` exactly on seeded kernels, that both maps are
/// homomorphisms, and that kernels vanishing on `X₀²` are exactly the kernel of
/// `Mι`.
pub fn restrict_and_split<T: Real>(
    space: &SpaceRef<T>,
    subset: &[usize],
    retraction: &[usize],
    seed: u64,
) -> Result<Report> {
    let mass = subset.iter().map(|&i| space.weight(i)).fold(T::zero(), |a, b| a + b);
    if (mass - T::one()).abs() > T::tol(1e-12) {
        return Err(Error::SupportViolation { mass: mass.as_f64() });
    }
    let x0 = space.restrict(subset)?;
    let iota = SpaceMap::new(&x0, space, subset.to_vec())?;
    let rho = SpaceMap::new(space, &x0, retraction.to_vec())?;
    for (k, &i) in subset.iter().enumerate() {
        if retraction[i] != k {
            return Err(Error::InvalidArgument(format!("retraction does not fix node {i}")));
        }
    }
    iota.require_measure_preserving()?;
    rho.require_measure_preserving()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = T::zero();
    let mut hom = T::zero();
    let mut kernel_gap = T::zero();
    for _ in 0..8 {
        let f = Kernel::random(&x0, &mut rng);
        let g = Kernel::random(&x0, &mut rng);
        split = split.max(pullback(&iota, &pullback(&rho, &f)?)?.dist_sup(&f));
        let lifted = pullback(&rho, &f.convolve(&g)?)?;
        hom = hom.max(lifted.dist_sup(&pullback(&rho, &f)?.convolve(&pullback(&rho, &g)?)?));

        let mut h = Kernel::random(space, &mut rng);
        let big = Kernel::random(space, &mut rng);
        hom = hom.max(
            pullback(&iota, &h.convolve(&big)?)?.dist_sup(&pullback(&iota, &h)?.convolve(&pullback(&iota, &big)?)?),
        );
        for &i in subset {
            for &j in subset {
                h.set(i, j, C::new(T::zero(), T::zero()));
            }
        }
        kernel_gap = kernel_gap.max(pullback(&iota, &h)?.sup_norm());
    }
    let mut report = Report::new("split_extension");
    report.push(Check::at_most("restriction_after_retraction", vec![split.as_f64()], 0.0));
    report.push(Check::at_most("homomorphism_defect", vec![hom.as_f64()], 1e-12));
    report.push(Check::at_most("vanishing_on_subset_is_kernel", vec![kernel_gap.as_f64()], 0.0));
    Ok(report)
}
