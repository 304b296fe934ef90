use rayon::prelude::*;
use serde::Serialize;

use super::{KernelSpan, RANK_TOL};
use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::linalg::{svd, Matrix};
use crate::scalar::{re, Real, C};
use crate::space::{Ball, SpaceRef};
use num_traits::Zero;

/// Halvings of the probe radius below `d(x, y)/8`.
const PROBE_HALVINGS: i32 = 4;

#[derive(Clone, Debug, Serialize)]
pub struct CenterProbe {
    pub x: usize,
    pub y: usize,
    pub delta: f64,
    /// `‖[f, g]‖∞` with `g = m(B_{x,δ})⁻¹ E_{x,δ}⊗E_{x,δ}`
    pub diagonal: f64,
    /// `‖[f, h_δ]‖∞` with `h_δ = m(B_{x,δ})⁻¹ E_{x,δ}⊗E_{y,δ}`
    pub off_diagonal: f64,
    /// `|f(x, y)|`
    pub entry: f64,
    /// `|f(x, x) − f(y, y)|`
    pub diagonal_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterDefect {
    pub value: f64,
    pub probes: Vec<CenterProbe>,
}

/// Commutator lower bound for how far `f` is from the (zero) center.
///
/// Probes start at evenly spread nodes `x` paired with a farthest node `y`;
/// radii are `d(x, y)/8 · 2^{-k}`, `k < 4`, nudged off the node lattice.
/// The value is the largest commutator norm against the two probe kernels.
pub fn center_defect<T: Real>(f: &Kernel<T>, probe_count: usize) -> Result<CenterDefect> {
    let space = f.space();
    if space.is_finite() {
        return Err(Error::FiniteSpace);
    }
    if probe_count == 0 {
        return Err(Error::InvalidArgument("probe_count must be at least 1".into()));
    }
    let n = space.len();
    let mut jobs = Vec::new();
    for p in 0..probe_count.min(n) {
        let x = p * n / probe_count.min(n);
        let y = farthest(space, x);
        let d = space.dist(x, y);
        for k in 0..PROBE_HALVINGS {
            let delta = space.jittered(d / T::lit(8.0) * T::lit(0.5f64.powi(k)));
            if delta < d / T::lit(4.0) {
                jobs.push((x, y, delta));
            }
        }
    }
    let probes: Vec<CenterProbe> = jobs
        .par_iter()
        .map(|&(x, y, delta)| probe(f, space, x, y, delta))
        .collect::<Result<_>>()?;
    let value = probes.iter().map(|p| p.diagonal.max(p.off_diagonal)).fold(0.0, f64::max);
    Ok(CenterDefect { value, probes })
}

fn farthest<T: Real>(space: &SpaceRef<T>, x: usize) -> usize {
    let row = space.dist_row(x);
    let mut best = x;
    for (j, &d) in row.iter().enumerate() {
        if d > row[best] {
            best = j;
        }
    }
    best
}

fn probe<T: Real>(f: &Kernel<T>, space: &SpaceRef<T>, x: usize, y: usize, delta: T) -> Result<CenterProbe> {
    let ex: Vec<C<T>> = space.bump(x, delta)?.values.into_iter().map(re).collect();
    let ey: Vec<C<T>> = space.bump(y, delta)?.values.into_iter().map(re).collect();
    let inv = re(T::one() / space.ball_measure(x, delta, Ball::Open));
    let scaled: Vec<C<T>> = ex.iter().map(|v| v * inv).collect();
    let g = Kernel::outer(space, &scaled, &ex)?;
    let h = Kernel::outer(space, &scaled, &ey)?;
    Ok(CenterProbe {
        x,
        y,
        delta: delta.as_f64(),
        diagonal: f.commutator(&g)?.sup_norm().as_f64(),
        off_diagonal: f.commutator(&h)?.sup_norm().as_f64(),
        entry: f.get(x, y).norm().as_f64(),
        diagonal_gap: (f.get(x, x) - f.get(y, y)).norm().as_f64(),
    })
}

/// Basis of the center of a finite-space algebra: the null space of
/// `f ↦ ([f, e_ij])_ij` over all matrix units.
///
/// Each basis kernel is scaled so that its entry of largest modulus is real
/// and positive.
pub fn center_exact<T: Real>(space: &SpaceRef<T>) -> Result<Vec<Kernel<T>>> {
    if !space.is_finite() {
        return Err(Error::NotFinite);
    }
    let n = space.len();
    let nn = n * n;
    let units: Vec<Kernel<T>> = (0..nn)
        .map(|k| {
            let mut e = Kernel::zeros(space);
            e.values_mut()[k] = re(T::one());
            e
        })
        .collect();
    // column c of the system is the stacked commutators of e_c with every matrix unit
    let mut a = Matrix::zeros(nn * nn, nn);
    for (col, f) in units.iter().enumerate() {
        for (blk, e) in units.iter().enumerate() {
            let comm = f.commutator(e)?;
            for (r, z) in comm.values().iter().enumerate() {
                a[(blk * nn + r, col)] = *z;
            }
        }
    }
    let s = svd(&a);
    let rank = s.rank(T::lit(RANK_TOL));
    let null: Vec<Kernel<T>> = s.v[rank..]
        .iter()
        .map(|v| Kernel::new(space, v.clone()))
        .collect::<Result<_>>()?;
    let span = KernelSpan::new(space, &null)?;
    Ok(span.basis().into_iter().map(normalize_phase).collect())
}

fn normalize_phase<T: Real>(f: Kernel<T>) -> Kernel<T> {
    let top = f
        .values()
        .iter()
        .copied()
        .fold(C::zero(), |a: C<T>, z| if z.norm() > a.norm() { z } else { a });
    if top.is_zero() {
        return f;
    }
    let phase = top.conj().unscale(top.norm());
    f.scale(phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::unit;
    use crate::space::DiscreteSpace;
    use crate::units::{norm_unit_seq, Side};

    fn proportional(a: &Kernel<f64>, b: &Kernel<f64>) -> bool {
        let k = b.values()[0] / a.values()[0];
        a.values().iter().zip(b.values()).all(|(x, y)| (x * k - y).norm() < 1e-9)
    }

    #[test]
    fn center_of_finite_spaces_is_scalar() {
        for w in [vec![1.0], vec![0.5, 0.5], vec![0.2, 0.3, 0.5], vec![0.1, 0.15, 0.2, 0.25, 0.3]] {
            let s = DiscreteSpace::<f64>::finite_discrete(w).unwrap();
            let basis = center_exact(&s).unwrap();
            assert_eq!(basis.len(), 1);
            assert!(proportional(&basis[0], &unit(&s).unwrap()));
        }
    }

    #[test]
    fn three_node_center_matches_inverse_weights() {
        let s = DiscreteSpace::<f64>::finite_discrete(vec![0.2, 0.3, 0.5]).unwrap();
        let b = &center_exact(&s).unwrap()[0];
        let k = 5.0 / b.get(0, 0).re;
        for (i, d) in [5.0, 10.0 / 3.0, 2.0].iter().enumerate() {
            assert!((b.get(i, i).re * k - d).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_kernel_has_zero_defect() {
        let s = DiscreteSpace::<f64>::circle(32).unwrap();
        assert_eq!(center_defect(&Kernel::zeros(&s), 3).unwrap().value, 0.0);
    }

    #[test]
    fn constant_kernel_is_far_from_center() {
        let s = DiscreteSpace::<f64>::circle(128).unwrap();
        let f = Kernel::ones(&s);
        let d = center_defect(&f, 4).unwrap();
        assert!(d.value >= 0.9, "{}", d.value);
        // brute-force oracle for the first probe
        let p = &d.probes[0];
        let delta = p.delta;
        let ex: Vec<C<f64>> = (0..128)
            .map(|i| re(crate::space::ramp(s.dist(i, p.x), delta, s.find_delta_prime(delta).unwrap())))
            .collect();
        let m = s.ball_measure(p.x, delta, Ball::Open);
        let g = Kernel::from_fn(&s, |i, j| ex[i] * ex[j] / m);
        let brute = (&f.convolve(&g).unwrap() - &g.convolve(&f).unwrap()).sup_norm();
        assert!((brute - p.diagonal).abs() < 1e-12);
    }

    #[test]
    fn near_diagonal_kernel_is_detected() {
        let s = DiscreteSpace::<f64>::circle(64).unwrap();
        let e = norm_unit_seq(&s, &[0.1], Side::Right).unwrap().elements.remove(0);
        let d = center_defect(&e, 4).unwrap();
        let off = d.probes.iter().map(|p| p.entry).fold(0.0, f64::max);
        assert!(d.value >= off - 0.1);
        assert!(d.value > 1.0);
    }

    #[test]
    fn finite_space_rejected() {
        let s = DiscreteSpace::<f64>::finite_discrete(vec![0.5, 0.5]).unwrap();
        assert!(matches!(center_defect(&Kernel::ones(&s), 1), Err(Error::FiniteSpace)));
    }
}
