//! Discrete models of compact metric measure spaces.
//!
//! A [`DiscreteSpace`] is a quadrature model of `(X, d, m)`: a finite node
//! set with a dense distance table and positive weights summing to one.
//! Continuum spaces (interval, circle, flat 2-torus) use midpoint/uniform
//! rules, so integrals of Lipschitz integrands are accurate to `O(1/N)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on the total mass of a weight vector.
pub const MASS_TOL: f64 = 1e-12;

/// Number of candidates in the delta' search.
pub const DELTA_PRIME_CANDIDATES: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Finite,
    Interval,
    Circle,
    Torus2,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Finite => "finite",
            SpaceKind::Interval => "interval",
            SpaceKind::Circle => "circle",
            SpaceKind::Torus2 => "torus2",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Open `{d < r}` or closed `{d <= r}` ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ball {
    Open,
    Closed,
}

/// Quadrature model of a compact metric probability space.
#[derive(Clone, Debug)]
pub struct DiscreteSpace<T: Real> {
    kind: SpaceKind,
    resolution: usize,
    points: Vec<[T; 2]>,
    weights: Vec<T>,
    dist: Vec<T>,
    full_support: bool,
    fingerprint: u64,
}

pub type SpaceRef<T> = Arc<DiscreteSpace<T>>;

impl<T: Real> DiscreteSpace<T> {
    /// Unit interval `[0, 1]` with `n` midpoint nodes `(i + 1/2)/n`.
    pub fn interval(n: usize) -> Result<SpaceRef<T>> {
        if n == 0 {
            return Err(Error::ZeroResolution);
        }
        let nf = T::from_usize_lossy(n);
        let half = T::lit(0.5);
        let points: Vec<[T; 2]> = (0..n)
            .map(|i| [(T::from_usize_lossy(i) + half) / nf, T::zero()])
            .collect();
        let dist = table(&points, |a, b| (a[0] - b[0]).abs());
        Ok(Self::assemble(SpaceKind::Interval, n, points, vec![T::one() / nf; n], dist, true))
    }

    /// Circle of circumference 1, nodes `i/n`, arc-length metric.
    pub fn circle(n: usize) -> Result<SpaceRef<T>> {
        if n == 0 {
            return Err(Error::ZeroResolution);
        }
        let nf = T::from_usize_lossy(n);
        let points: Vec<[T; 2]> = (0..n).map(|i| [T::from_usize_lossy(i) / nf, T::zero()]).collect();
        let dist = table(&points, |a, b| arc(a[0], b[0]));
        Ok(Self::assemble(SpaceKind::Circle, n, points, vec![T::one() / nf; n], dist, true))
    }

    /// Flat torus `R²/Z²` with an `n × n` product grid; node `(i, j)` has index `i·n + j`.
    pub fn torus2(n: usize) -> Result<SpaceRef<T>> {
        if n == 0 {
            return Err(Error::ZeroResolution);
        }
        let nf = T::from_usize_lossy(n);
        let mut points = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                points.push([T::from_usize_lossy(i) / nf, T::from_usize_lossy(j) / nf]);
            }
        }
        let dist = table(&points, |a, b| {
            let dx = arc(a[0], b[0]);
            let dy = arc(a[1], b[1]);
            (dx * dx + dy * dy).sqrt()
        });
        let w = T::one() / (nf * nf);
        Ok(Self::assemble(SpaceKind::Torus2, n, points, vec![w; n * n], dist, true))
    }

    /// Finite space with explicit weights and a row-major `n × n` metric table.
    pub fn finite(weights: Vec<T>, metric: Vec<T>) -> Result<SpaceRef<T>> {
        Self::finite_impl(weights, metric, false)
    }

    /// Finite space with the discrete metric `d(i, j) = 1` for `i != j`.
    pub fn finite_discrete(weights: Vec<T>) -> Result<SpaceRef<T>> {
        let n = weights.len();
        let metric = (0..n * n)
            .map(|k| if k / n == k % n { T::zero() } else { T::one() })
            .collect();
        Self::finite(weights, metric)
    }

    /// Finite space whose measure may vanish on some nodes (`Sp m` a proper subset).
    ///
    /// Only the extension/retraction machinery accepts such spaces.
    pub fn finite_with_null(weights: Vec<T>, metric: Vec<T>) -> Result<SpaceRef<T>> {
        Self::finite_impl(weights, metric, true)
    }

    fn finite_impl(weights: Vec<T>, metric: Vec<T>, allow_null: bool) -> Result<SpaceRef<T>> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::ZeroResolution);
        }
        for (index, &w) in weights.iter().enumerate() {
            let bad = if allow_null { w < T::zero() } else { w <= T::zero() };
            if bad || !w.is_finite() {
                return Err(Error::NonPositiveWeight { index, weight: w.as_f64() });
            }
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::tol(MASS_TOL) {
            return Err(Error::WeightsNotNormalized { sum: sum.as_f64() });
        }
        if metric.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: metric.len() });
        }
        validate_metric(n, &metric)?;
        let full = weights.iter().all(|&w| w > T::zero());
        let points = (0..n).map(|i| [T::from_usize_lossy(i), T::zero()]).collect();
        Ok(Self::assemble(SpaceKind::Finite, n, points, weights, metric, full))
    }

    fn assemble(
        kind: SpaceKind,
        resolution: usize,
        points: Vec<[T; 2]>,
        weights: Vec<T>,
        dist: Vec<T>,
        full_support: bool,
    ) -> SpaceRef<T> {
        let mut h = Sha256::new();
        h.update(kind.name().as_bytes());
        h.update((resolution as u64).to_le_bytes());
        for w in &weights {
            h.update(w.as_f64().to_bits().to_le_bytes());
        }
        for d in &dist {
            h.update(d.as_f64().to_bits().to_le_bytes());
        }
        let digest = h.finalize();
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Arc::new(Self {
            kind,
            resolution,
            points,
            weights,
            dist,
            full_support,
            fingerprint: u64::from_le_bytes(head),
        })
    }

    /// Finite space on a subset of nodes, carrying the restricted weights and metric.
    pub fn restrict(&self, nodes: &[usize]) -> Result<SpaceRef<T>> {
        for &i in nodes {
            if i >= self.len() {
                return Err(Error::InvalidArgument(format!("node {i} out of range")));
            }
        }
        let weights: Vec<T> = nodes.iter().map(|&i| self.weights[i]).collect();
        let metric = nodes
            .iter()
            .flat_map(|&i| nodes.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .collect();
        if self.full_support {
            Self::finite(weights, metric)
        } else {
            Self::finite_with_null(weights, metric)
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Per-axis resolution; the node count for finite spaces.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.kind == SpaceKind::Finite
    }

    /// Whether every node carries positive weight.
    pub fn full_support(&self) -> bool {
        self.full_support
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    /// Coordinates of node `i`; the second slot is zero except on the torus.
    pub fn point(&self, i: usize) -> [T; 2] {
        self.points[i]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> T {
        self.dist[i * self.len() + j]
    }

    /// Distances from node `i` to every node.
    pub fn dist_row(&self, i: usize) -> &[T] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.fingerprint == other.fingerprint && self.len() == other.len())
    }

    pub fn diameter(&self) -> T {
        self.dist.iter().copied().fold(T::zero(), T::max)
    }

    /// Smallest positive inter-node distance.
    pub fn min_spacing(&self) -> T {
        self.dist
            .iter()
            .copied()
            .filter(|&d| d > T::zero())
            .fold(T::infinity(), T::min)
    }

    pub fn min_weight(&self) -> T {
        self.weights.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_weight(&self) -> T {
        self.weights.iter().copied().fold(T::zero(), T::max)
    }

    /// Shifts `delta` by an irrational fraction of the node spacing so that it
    /// avoids the lattice of realized distances.
    pub fn jittered(&self, delta: T) -> T {
        let theta = (T::lit(5.0).sqrt() - T::one()) / T::lit(4.0);
        delta + theta * self.min_spacing()
    }

    /// `m(B(x, r))`, summed in node order.
    pub fn ball_measure(&self, x: usize, r: T, ball: Ball) -> T {
        let row = self.dist_row(x);
        let mut acc = T::zero();
        for (k, &d) in row.iter().enumerate() {
            let inside = match ball {
                Ball::Open => d < r,
                Ball::Closed => d <= r,
            };
            if inside {
                acc = acc + self.weights[k];
            }
        }
        acc
    }

    /// Mass of the shell `{inner <= d(x, .) < outer}`, i.e. `m(B(x, outer) \ B(x, inner))`.
    pub fn annulus_measure(&self, x: usize, inner: T, outer: T) -> T {
        let row = self.dist_row(x);
        let mut acc = T::zero();
        for (k, &d) in row.iter().enumerate() {
            if d >= inner && d < outer {
                acc = acc + self.weights[k];
            }
        }
        acc
    }

    /// Mass of the sampled sphere `{d(x, .) = r}` up to `T::tol(1e-12)`.
    pub fn sphere_measure(&self, x: usize, r: T) -> T {
        let tol = T::tol(1e-12) * r.max(T::one());
        let row = self.dist_row(x);
        let mut acc = T::zero();
        for (k, &d) in row.iter().enumerate() {
            if (d - r).abs() <= tol {
                acc = acc + self.weights[k];
            }
        }
        acc
    }

    /// Returns `delta' ∈ (delta, 2·delta)` with
    /// `m(B(x, delta') \ B(x, delta)) < delta · m(B(x, delta))` at every node.
    ///
    /// Candidates are `delta·(1 + 2^-k)` for `k = 1..=32`, tried from the
    /// largest down; the first passing candidate is returned.
    pub fn find_delta_prime(&self, delta: T) -> Result<T> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        let balls: Vec<T> = (0..self.len()).map(|x| self.ball_measure(x, delta, Ball::Open)).collect();
        if let Some(node) = balls.iter().position(|&m| m <= T::zero()) {
            return Err(Error::NoDeltaPrime { delta: delta.as_f64(), node });
        }
        let mut witness = 0;
        let mut excess = T::one();
        for _ in 0..DELTA_PRIME_CANDIDATES {
            excess = excess * T::lit(0.5);
            let cand = delta * (T::one() + excess);
            if cand <= delta {
                break;
            }
            match (0..self.len()).find(|&x| self.annulus_measure(x, delta, cand) >= delta * balls[x]) {
                None => return Ok(cand),
                Some(x) => witness = x,
            }
        }
        Err(Error::NoDeltaPrime { delta: delta.as_f64(), node: witness })
    }

    /// Radial bump `E_{x,delta}` built on the delta' of [`find_delta_prime`](Self::find_delta_prime).
    pub fn bump(&self, x: usize, delta: T) -> Result<Bump<T>> {
        let outer = self.find_delta_prime(delta)?;
        Ok(self.bump_with(x, delta, outer))
    }

    /// Bump with an explicitly chosen outer radius.
    pub fn bump_with(&self, x: usize, delta: T, outer: T) -> Bump<T> {
        let spec = BumpSpec { center: x, inner: delta, outer };
        let values = self.dist_row(x).iter().map(|&d| spec.profile(d)).collect();
        Bump { spec, values }
    }

    /// Samples `(C1)` and `(C2)` along a strictly decreasing delta sequence.
    pub fn check_conditions(&self, deltas: &[T]) -> Result<Conditions> {
        validate_deltas(deltas)?;
        let tol = T::tol(1e-12);
        let mut witnesses = Vec::new();
        let mut c1 = true;
        let mut c2 = true;
        for (n, &delta) in deltas.iter().enumerate() {
            for x in 0..self.len() {
                let mass = self.sphere_measure(x, delta);
                if mass > T::zero() {
                    c1 = false;
                    witnesses.push(Witness {
                        delta_index: n,
                        delta: delta.as_f64(),
                        kind: WitnessKind::Sphere { node: x, mass: mass.as_f64() },
                    });
                    break;
                }
            }
            let masses: Vec<T> = (0..self.len()).map(|x| self.ball_measure(x, delta, Ball::Open)).collect();
            let (lo, hi) = extrema(&masses);
            if masses[hi] - masses[lo] > tol {
                c2 = false;
                witnesses.push(Witness {
                    delta_index: n,
                    delta: delta.as_f64(),
                    kind: WitnessKind::BallMismatch {
                        low_node: lo,
                        low_mass: masses[lo].as_f64(),
                        high_node: hi,
                        high_mass: masses[hi].as_f64(),
                    },
                });
            }
        }
        Ok(Conditions { c1, c2: c1 && c2, witnesses })
    }
}

/// `δ_n = 0.3·φ^{-n}`, `n = 0..count`, with `φ` the golden ratio.
pub fn golden_deltas<T: Real>(count: usize) -> Vec<T> {
    let phi = (T::one() + T::lit(5.0).sqrt()) / T::lit(2.0);
    (0..count).map(|n| T::lit(0.3) / phi.powi(n as i32)).collect()
}

/// Radius schedule used by every default run.
pub fn default_deltas<T: Real>() -> Vec<T> {
    golden_deltas(6)
}

pub(crate) fn validate_deltas<T: Real>(deltas: &[T]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::InvalidDeltaSequence("empty".into()));
    }
    if deltas.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
        return Err(Error::InvalidDeltaSequence("entries must be positive".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidDeltaSequence("not strictly decreasing".into()));
    }
    Ok(())
}

/// Piecewise-linear radial profile: 1 on `[0, inner]`, 0 on `[outer, ∞)`.
pub fn ramp<T: Real>(d: T, inner: T, outer: T) -> T {
    if d <= inner {
        T::one()
    } else if d >= outer {
        T::zero()
    } else {
        (outer - d) / (outer - inner)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpSpec<T: Real> {
    pub center: usize,
    pub inner: T,
    pub outer: T,
}

impl<T: Real> BumpSpec<T> {
    pub fn profile(&self, r: T) -> T {
        ramp(r, self.inner, self.outer)
    }
}

/// A sampled bump function `X -> [0, 1]`.
#[derive(Clone, Debug)]
pub struct Bump<T: Real> {
    pub spec: BumpSpec<T>,
    pub values: Vec<T>,
}

/// Sampled verdicts on the two metric-measure hypotheses.
#[derive(Clone, Debug, Serialize)]
pub struct Conditions {
    pub c1: bool,
    pub c2: bool,
    pub witnesses: Vec<Witness>,
}

impl Conditions {
    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub delta_index: usize,
    pub delta: f64,
    pub kind: WitnessKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessKind {
    /// A sampled sphere carries positive mass.
    Sphere { node: usize, mass: f64 },
    /// Ball measures depend on the center.
    BallMismatch { low_node: usize, low_mass: f64, high_node: usize, high_mass: f64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WitnessKind::Sphere { node, mass } => write!(
                f,
                "sphere of radius {} around node {} has mass {}",
                self.delta, node, mass
            ),
            WitnessKind::BallMismatch { low_node, low_mass, high_node, high_mass } => write!(
                f,
                "ball of radius {} has mass {} at node {} but {} at node {}",
                self.delta, low_mass, low_node, high_mass, high_node
            ),
        }
    }
}

fn arc<T: Real>(a: T, b: T) -> T {
    let d = (a - b).abs();
    d.min(T::one() - d)
}

fn table<T: Real>(points: &[[T; 2]], metric: impl Fn(&[T; 2], &[T; 2]) -> T) -> Vec<T> {
    let n = points.len();
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = metric(&points[i], &points[j]);
            out[i * n + j] = d;
            out[j * n + i] = d;
        }
    }
    out
}

fn extrema<T: Real>(v: &[T]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[lo] {
            lo = i;
        }
        if x > v[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

fn validate_metric<T: Real>(n: usize, m: &[T]) -> Result<()> {
    let tol = T::tol(1e-12);
    for i in 0..n {
        if m[i * n + i] != T::zero() {
            return Err(Error::InvalidMetric(format!("d({i},{i}) != 0")));
        }
        for j in 0..n {
            let d = m[i * n + j];
            if !d.is_finite() || d < T::zero() {
                return Err(Error::InvalidMetric(format!("d({i},{j}) = {d}")));
            }
            if i != j && d == T::zero() {
                return Err(Error::InvalidMetric(format!("d({i},{j}) = 0 off the diagonal")));
            }
            if d != m[j * n + i] {
                return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if m[i * n + k] > m[i * n + j] + m[j * n + k] + tol {
                    return Err(Error::InvalidMetric(format!("triangle inequality fails at ({i},{j},{k})")));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_midpoints() {
        let s = DiscreteSpace::<f64>::interval(4).unwrap();
        let xs: Vec<f64> = (0..4).map(|i| s.point(i)[0]).collect();
        assert_eq!(xs, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(s.weights().iter().all(|&w| w == 0.25));
    }

    #[test]
    fn finite_two_nodes() {
        let s = DiscreteSpace::finite(vec![0.5, 0.5], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.weights().iter().sum::<f64>(), 1.0);
        assert_eq!(s.dist(0, 1), 1.0);
    }

    #[test]
    fn circle_diameter_brute_force() {
        let s = DiscreteSpace::<f64>::circle(8).unwrap();
        let mut best = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                let d = (i as f64 - j as f64).abs() / 8.0;
                best = best.max(d.min(1.0 - d));
            }
        }
        assert_eq!(best, 0.5);
        assert_eq!(s.diameter(), best);
    }

    #[test]
    fn build_errors() {
        assert!(matches!(DiscreteSpace::<f64>::circle(0), Err(Error::ZeroResolution)));
        assert!(matches!(
            DiscreteSpace::finite(vec![1.5, -0.5], vec![0.0, 1.0, 1.0, 0.0]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteSpace::finite(vec![0.5, 0.6], vec![0.0, 1.0, 1.0, 0.0]),
            Err(Error::WeightsNotNormalized { .. })
        ));
        assert!(matches!(
            DiscreteSpace::finite(vec![0.5, 0.5], vec![0.0, 1.0, 2.0, 0.0]),
            Err(Error::InvalidMetric(_))
        ));
        let bad_triangle = vec![0.0, 1.0, 5.0, 1.0, 0.0, 1.0, 5.0, 1.0, 0.0];
        assert!(matches!(
            DiscreteSpace::finite(vec![0.2, 0.3, 0.5], bad_triangle),
            Err(Error::InvalidMetric(_))
        ));
    }

    #[test]
    fn metric_invariants_on_grids() {
        for s in [
            DiscreteSpace::<f64>::interval(9).unwrap(),
            DiscreteSpace::circle(10).unwrap(),
            DiscreteSpace::torus2(4).unwrap(),
        ] {
            let n = s.len();
            assert!((s.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..n {
                assert_eq!(s.dist(i, i), 0.0);
                for j in 0..n {
                    assert_eq!(s.dist(i, j), s.dist(j, i));
                    if i != j {
                        assert!(s.dist(i, j) > 0.0);
                    }
                    for k in 0..n {
                        assert!(s.dist(i, k) <= s.dist(i, j) + s.dist(j, k) + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn ball_measure_edges() {
        let s = DiscreteSpace::<f64>::circle(100).unwrap();
        let open = s.ball_measure(0, 0.25, Ball::Open);
        assert!((open - 0.5).abs() <= 2.0 / 100.0);
        for x in [0, 17, 99] {
            assert_eq!(s.ball_measure(x, 0.0, Ball::Open), 0.0);
            assert!((s.ball_measure(x, 2.0 * s.diameter(), Ball::Closed) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_measure_monotone_with_sphere_jump() {
        let s = DiscreteSpace::<f64>::interval(16).unwrap();
        let x = 5;
        let mut prev = 0.0;
        for k in 0..200 {
            let r = k as f64 * 0.0071;
            let m = s.ball_measure(x, r, Ball::Open);
            assert!(m >= prev);
            prev = m;
            let jump = s.ball_measure(x, r, Ball::Closed) - m;
            assert!((jump - s.sphere_measure(x, r)).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_prime_near_continuum() {
        let s = DiscreteSpace::<f64>::circle(4096).unwrap();
        let delta = s.jittered(0.1);
        let dp = s.find_delta_prime(delta).unwrap();
        assert!(dp > delta && dp < 2.0 * delta);
        // continuum annulus 2(δ'−δ) < δ·2δ  ⇔  δ' < δ + δ²
        assert!(dp <= delta + delta * delta + 2.0 / 4096.0);
        assert!(dp <= 0.11);
    }

    #[test]
    fn delta_prime_empty_annulus_takes_largest_candidate() {
        let s = DiscreteSpace::finite_discrete(vec![0.25; 4]).unwrap();
        let dp = s.find_delta_prime(0.1f64).unwrap();
        assert!((dp - 0.15).abs() < 1e-15);
        assert!(dp > 0.1 && dp < 0.2);
    }

    #[test]
    fn delta_prime_empty_ball() {
        let w = vec![0.5, 0.5, 0.0];
        let m = vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let s = DiscreteSpace::finite_with_null(w, m).unwrap();
        assert!(matches!(s.find_delta_prime(0.1), Err(Error::NoDeltaPrime { node: 2, .. })));
    }

    #[test]
    fn delta_prime_on_grid_tie_fails() {
        // δ = 0.1 sits on the node lattice of the N = 100 circle: the sphere carries
        // 2/N while δ·m(B) = 0.019.
        let s = DiscreteSpace::<f64>::circle(100).unwrap();
        assert!(matches!(s.find_delta_prime(0.1), Err(Error::NoDeltaPrime { .. })));
    }

    #[test]
    fn annulus_bound_holds_at_sample_scale() {
        let s = DiscreteSpace::<f64>::circle(256).unwrap();
        for delta in golden_deltas::<f64>(6) {
            let dp = s.find_delta_prime(delta).unwrap();
            for x in 0..s.len() {
                let inner = s.ball_measure(x, delta, Ball::Open);
                assert!(s.annulus_measure(x, delta, dp) < delta * inner);
            }
        }
    }

    #[test]
    fn bump_values() {
        let s = DiscreteSpace::<f64>::circle(100).unwrap();
        let delta = s.jittered(0.1);
        let b = s.bump(0, delta).unwrap();
        assert_eq!(b.values[0], 1.0);
        assert!(b.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        for (k, &v) in b.values.iter().enumerate() {
            if s.dist(0, k) >= b.spec.outer {
                assert_eq!(v, 0.0);
            }
            if s.dist(0, k) <= delta {
                assert_eq!(v, 1.0);
            }
        }
        let mid = 0.5 * (b.spec.inner + b.spec.outer);
        assert_eq!(b.spec.profile(mid), 0.5);
        let slope = 1.0 / (b.spec.outer - b.spec.inner);
        assert!((b.spec.profile(mid + 1e-3) - 0.5).abs() <= slope * 1e-3 + 1e-12);
    }

    #[test]
    fn conditions_circle_interval_finite() {
        let deltas = golden_deltas::<f64>(6);
        let c = DiscreteSpace::<f64>::circle(128).unwrap().check_conditions(&deltas).unwrap();
        assert!(c.c1 && c.c2, "{:?}", c.witnesses);

        let c = DiscreteSpace::<f64>::interval(128).unwrap().check_conditions(&deltas).unwrap();
        assert!(c.c1);
        assert!(!c.c2);
        assert!(matches!(c.first_witness().unwrap().kind, WitnessKind::BallMismatch { .. }));

        let s = DiscreteSpace::finite_discrete(vec![0.25; 4]).unwrap();
        let c = s.check_conditions(&[1.0, 0.5]).unwrap();
        assert!(!c.c1);
        assert_eq!(
            c.witnesses[0].kind,
            WitnessKind::Sphere { node: 0, mass: 0.75 }
        );
    }

    #[test]
    fn interval_boundary_balls_smaller() {
        let s = DiscreteSpace::<f64>::interval(4).unwrap();
        assert!(s.ball_measure(0, 0.3, Ball::Open) < s.ball_measure(1, 0.3, Ball::Open));
    }

    #[test]
    fn rejects_bad_delta_sequences() {
        let s = DiscreteSpace::<f64>::circle(8).unwrap();
        assert!(s.check_conditions(&[0.1, 0.2]).is_err());
        assert!(s.check_conditions(&[]).is_err());
        assert!(s.check_conditions(&[0.1, -0.1]).is_err());
    }

    #[test]
    fn torus_counts() {
        let s = DiscreteSpace::<f64>::torus2(16).unwrap();
        assert_eq!(s.len(), 256);
        assert_eq!(s.resolution(), 16);
        let c = s.check_conditions(&golden_deltas(4)).unwrap();
        assert!(c.c2, "{:?}", c.witnesses);
    }

    #[test]
    fn f32_space_builds() {
        let s = DiscreteSpace::<f32>::circle(64).unwrap();
        assert!((s.weights().iter().sum::<f32>() - 1.0).abs() < 1e-5);
        assert!(s.find_delta_prime(golden_deltas::<f32>(3)[2]).is_ok());
    }
}
