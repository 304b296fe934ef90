//! Approximate units.
//!
//! Two constructions:
//!
//! - the net `u_{S,ε} = Σ_{y∈S} m(B_{y,δ})⁻¹ · E_{y,δ} ⊗ E_{y,δ}` indexed by a
//!   finite node set `S` and `ε > 0`; it is a right cc- and left
//!   rc-approximate unit on every space;
//! - the sequences `E_n(x, y) = G_n(x, y) / m(B_{y,δ_n})` (right) and
//!   `G_n(x, y) / m(B_{x,δ_n})` (left) built on a radius sequence satisfying
//!   the zero-sphere hypothesis; under center-independent ball masses the two
//!   coincide and give a two-sided norm-approximate unit.
//!
//! `sup ‖E_n‖∞ = 1/α_n` grows without bound on infinite spaces, which is the
//! sampled face of the fact that only finite spaces have bounded units.

use serde::Serialize;

use crate::algebra::{unit, Kernel};
use crate::error::{Error, Result};
use crate::report::{nonincreasing, strictly_increasing, Check, Report};
use crate::scalar::{re, Real};
use crate::space::{ramp, Ball, SpaceRef};

/// Quadrature slack constant `C` in the `C/N` term of convergence bounds.
pub const QUADRATURE_SLACK: f64 = 10.0;

/// Grid steps per halving in the `δ` search of [`net_element`].
const NET_GRID_STEPS_PER_OCTAVE: i32 = 4;
const NET_GRID_LEN: i32 = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    NetSEps,
    RightSeq,
    LeftSeq,
    TwoSidedSeq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Right,
    Left,
    TwoSided,
}

impl Side {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "right" => Some(Side::Right),
            "left" => Some(Side::Left),
            "two_sided" => Some(Side::TwoSided),
            _ => None,
        }
    }
}

/// Seminorm family in which a defect is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Norm,
    /// column seminorm at node `y`
    Cc(usize),
    /// row seminorm at node `x`
    Rc(usize),
    /// point evaluation at `(x, y)`
    Pc(usize, usize),
}

impl Topology {
    pub fn measure<T: Real>(self, f: &Kernel<T>) -> T {
        match self {
            Topology::Norm => f.sup_norm(),
            Topology::Cc(y) => f.cc_seminorm(y),
            Topology::Rc(x) => f.rc_seminorm(x),
            Topology::Pc(x, y) => f.pc_seminorm(x, y),
        }
    }
}

/// Radii that produced one element of a [`UnitNet`].
#[derive(Clone, Debug, PartialEq)]
pub struct NetStep<T: Real> {
    /// `S` for the `(S, ε)` net; empty for sequences.
    pub nodes: Vec<usize>,
    /// `ε` for the net; `δ_n` for sequences.
    pub epsilon: T,
    pub delta: T,
    pub delta_prime: T,
    /// Smallest ball mass `m(B_{y,δ})` over the relevant centers.
    pub alpha: T,
}

#[derive(Clone, Debug)]
pub struct UnitNet<T: Real> {
    pub kind: NetKind,
    pub elements: Vec<Kernel<T>>,
    pub steps: Vec<NetStep<T>>,
}

impl<T: Real> UnitNet<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Materializes a finite chain `(S_k, ε_k)` of the net.
    pub fn chain(space: &SpaceRef<T>, chain: &[(Vec<usize>, T)]) -> Result<Self> {
        let mut elements = Vec::with_capacity(chain.len());
        let mut steps = Vec::with_capacity(chain.len());
        for (nodes, eps) in chain {
            let e = net_element(space, nodes, *eps)?;
            elements.push(e.kernel);
            steps.push(e.step);
        }
        Ok(Self { kind: NetKind::NetSEps, elements, steps })
    }
}

#[derive(Clone, Debug)]
pub struct NetElement<T: Real> {
    pub kernel: Kernel<T>,
    pub step: NetStep<T>,
}

/// `u_{S,ε}`.
///
/// `δ` is the largest of `ε·2^{-k/4}` (`k ≥ 1`) such that the centers are at
/// least `4δ` apart (so the `2δ`-balls are disjoint), `δ` is at least half the
/// node spacing, and a `δ'` exists.
pub fn net_element<T: Real>(space: &SpaceRef<T>, nodes: &[usize], epsilon: T) -> Result<NetElement<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("S must be nonempty".into()));
    }
    for (k, &a) in nodes.iter().enumerate() {
        if a >= space.len() {
            return Err(Error::InvalidArgument(format!("node {a} out of range")));
        }
        if nodes[..k].contains(&a) {
            return Err(Error::InvalidArgument(format!("node {a} repeated in S")));
        }
    }
    let (mut a, mut b, mut gap) = (nodes[0], nodes[0], T::infinity());
    for (k, &p) in nodes.iter().enumerate() {
        for &q in &nodes[k + 1..] {
            if space.dist(p, q) < gap {
                gap = space.dist(p, q);
                a = p;
                b = q;
            }
        }
    }
    let floor = space.min_spacing() * T::lit(0.5);
    let mut last_err = None;
    for k in 1..=NET_GRID_LEN {
        let delta = epsilon * T::lit(2f64.powf(-(k as f64) / NET_GRID_STEPS_PER_OCTAVE as f64));
        if delta < floor {
            break;
        }
        if T::lit(4.0) * delta > gap {
            continue;
        }
        match space.find_delta_prime(delta) {
            Ok(dp) => return Ok(build_net_element(space, nodes, epsilon, delta, dp)),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or(Error::DisjointBallsImpossible { epsilon: epsilon.as_f64(), a, b }))
}

fn build_net_element<T: Real>(space: &SpaceRef<T>, nodes: &[usize], epsilon: T, delta: T, dp: T) -> NetElement<T> {
    let n = space.len();
    let mut kernel = Kernel::zeros(space);
    let mut alpha = T::infinity();
    for &y in nodes {
        let bump = space.bump_with(y, delta, dp);
        let mass = space.ball_measure(y, delta, Ball::Open);
        alpha = alpha.min(mass);
        let vals = kernel.values_mut();
        for i in 0..n {
            let bi = bump.values[i];
            if bi == T::zero() {
                continue;
            }
            for j in 0..n {
                let bj = bump.values[j];
                if bj != T::zero() {
                    vals[i * n + j] = vals[i * n + j] + re(bi * bj / mass);
                }
            }
        }
    }
    NetElement {
        kernel,
        step: NetStep { nodes: nodes.to_vec(), epsilon, delta, delta_prime: dp, alpha },
    }
}

/// Norm-approximate unit sequence along `deltas`.
///
/// Right and left sequences need the zero-sphere condition; the two-sided
/// sequence additionally needs center-independent ball masses.
pub fn norm_unit_seq<T: Real>(space: &SpaceRef<T>, deltas: &[T], side: Side) -> Result<UnitNet<T>> {
    let cond = space.check_conditions(deltas)?;
    let (ok, name) = match side {
        Side::Right | Side::Left => (cond.c1, "C1"),
        Side::TwoSided => (cond.c2, "C2"),
    };
    if !ok {
        let witness = cond.witnesses.into_iter().next().expect("failed condition has a witness");
        return Err(Error::ConditionFailed { condition: name, witness });
    }
    let n = space.len();
    let mut elements = Vec::with_capacity(deltas.len());
    let mut steps = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let dp = space.find_delta_prime(delta)?;
        let balls: Vec<T> = (0..n).map(|x| space.ball_measure(x, delta, Ball::Open)).collect();
        let common = balls[0];
        let e = Kernel::from_real_fn(space, |x, y| {
            let g = ramp(space.dist(x, y), delta, dp);
            let mass = match side {
                Side::Right => balls[y],
                Side::Left => balls[x],
                Side::TwoSided => common,
            };
            g / mass
        });
        let alpha = balls.iter().copied().fold(T::infinity(), T::min);
        elements.push(e);
        steps.push(NetStep { nodes: Vec::new(), epsilon: delta, delta, delta_prime: dp, alpha });
    }
    let kind = match side {
        Side::Right => NetKind::RightSeq,
        Side::Left => NetKind::LeftSeq,
        Side::TwoSided => NetKind::TwoSidedSeq,
    };
    Ok(UnitNet { kind, elements, steps })
}

/// Defect of `f` against every element of `net`: `f ⋆ u − f` (right),
/// `u ⋆ f − f` (left), or the larger of the two.
pub fn defects<T: Real>(f: &Kernel<T>, net: &UnitNet<T>, side: Side, topology: Topology) -> Result<Vec<T>> {
    net.elements
        .iter()
        .map(|u| {
            let right = || -> Result<T> { Ok(topology.measure(&(&f.convolve(u)? - f))) };
            let left = || -> Result<T> { Ok(topology.measure(&(&u.convolve(f)? - f))) };
            match side {
                Side::Right => right(),
                Side::Left => left(),
                Side::TwoSided => Ok(right()?.max(left()?)),
            }
        })
        .collect()
}

/// Convergence of `f` along `net`.
///
/// With a Lipschitz constant the report asserts, per element,
/// `defect ≤ L·2δ' + δ·‖f‖∞ + C/N` for sequences in the norm topology, and
/// `defect ≤ r + r·‖f‖∞` with `r = max(L·δ, δ)` for the `(S, ε)` net at
/// columns (right) or rows (left) in `S`. Monotonicity is recorded, not asserted.
pub fn convergence_report<T: Real>(
    f: &Kernel<T>,
    net: &UnitNet<T>,
    side: Side,
    topology: Topology,
    lipschitz: Option<T>,
) -> Result<Report> {
    let d = defects(f, net, side, topology)?;
    let values: Vec<f64> = d.iter().map(|x| x.as_f64()).collect();
    let mut report = Report::new(format!("convergence/{:?}/{:?}", side, topology).to_lowercase());
    report.push(
        Check::info("defects", values.clone())
            .with_note(format!("nonincreasing: {}", nonincreasing(&values, 0.0))),
    );
    let Some(l) = lipschitz else { return Ok(report) };
    let sup = f.sup_norm();
    let slack = T::lit(QUADRATURE_SLACK) / T::from_usize_lossy(f.space().resolution());
    for (k, (step, defect)) in net.steps.iter().zip(&values).enumerate() {
        let bound = match net.kind {
            NetKind::NetSEps => {
                let covered = match (side, topology) {
                    (Side::Right, Topology::Cc(y)) | (Side::Right, Topology::Pc(_, y)) => step.nodes.contains(&y),
                    (Side::Left, Topology::Rc(x)) | (Side::Left, Topology::Pc(x, _)) => step.nodes.contains(&x),
                    _ => false,
                };
                if !covered {
                    continue;
                }
                let r = (l * step.delta).max(step.delta);
                r + r * sup
            }
            _ if topology == Topology::Norm => l * T::lit(2.0) * step.delta_prime + step.delta * sup + slack,
            _ => continue,
        };
        report.push(Check::at_most(format!("bound[{k}]"), vec![*defect], bound.as_f64()));
    }
    Ok(report)
}

/// Sup norms of the right unit sequence against `1/α_n`, or the exact unit on
/// finite spaces.
pub fn unboundedness_probe<T: Real>(space: &SpaceRef<T>, deltas: &[T]) -> Result<Report> {
    let mut report = Report::new("unboundedness");
    if space.is_finite() {
        let u = unit(space)?;
        let expected = T::one() / space.min_weight();
        report.push(
            Check::at_most("unit_sup_norm_error", vec![(u.sup_norm() - expected).abs().as_f64()], 1e-12)
                .with_note(format!("unit exists; sup norm {}", u.sup_norm())),
        );
        return Ok(report);
    }
    let net = norm_unit_seq(space, deltas, Side::Right)?;
    let sups: Vec<f64> = net.elements.iter().map(|e| e.sup_norm().as_f64()).collect();
    let inv: Vec<f64> = net.steps.iter().map(|s| (T::one() / s.alpha).as_f64()).collect();
    let err: Vec<f64> = sups.iter().zip(&inv).map(|(a, b)| (a - b).abs()).collect();
    report.push(Check::info("sup_norms", sups.clone()));
    report.push(Check::at_most("sup_norm_minus_inverse_alpha", err, 1e-9));
    report.push(Check::new("strictly_increasing", sups.clone(), None, strictly_increasing(&sups)));
    Ok(report)
}
