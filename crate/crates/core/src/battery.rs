//! Fixed battery of test kernels with known Lipschitz constants.
//!
//! Each kernel carries a constant `L` with `|f(x, z) − f(x, y)| ≤ L·d(z, y)`
//! and `|f(z, y) − f(x, y)| ≤ L·d(z, x)`; the convergence bounds in
//! [`units`](crate::units) and [`deriv`](crate::deriv) are stated in terms of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Kernel;
use crate::scalar::{c, cis_turns, re, Real, C};
use crate::space::{SpaceKind, SpaceRef};

#[derive(Clone, Debug)]
pub struct TestKernel<T: Real> {
    pub name: &'static str,
    pub kernel: Kernel<T>,
    pub lipschitz: T,
}

const FREQS: i32 = 2;

/// Constants, a coordinate kernel, two distance kernels and one seeded random
/// trigonometric kernel, all bounded by 1 in sup norm.
pub fn battery<T: Real>(space: &SpaceRef<T>, seed: u64) -> Vec<TestKernel<T>> {
    let pi = T::PI();
    let tau = T::TAU();
    let mut out = vec![TestKernel { name: "constant", kernel: Kernel::ones(space), lipschitz: T::zero() }];

    let scale = match space.kind() {
        SpaceKind::Circle => T::lit(0.5),
        SpaceKind::Torus2 => T::lit(0.5f64.sqrt()),
        SpaceKind::Interval => T::one(),
        SpaceKind::Finite => space.diameter(),
    };
    match space.kind() {
        SpaceKind::Circle | SpaceKind::Torus2 => out.push(TestKernel {
            name: "coordinate",
            kernel: Kernel::from_real_fn(space, |i, j| {
                (tau * space.point(i)[0]).cos() * (tau * space.point(j)[0]).sin()
            }),
            lipschitz: tau,
        }),
        SpaceKind::Interval => out.push(TestKernel {
            name: "coordinate",
            kernel: Kernel::from_real_fn(space, |i, j| space.point(i)[0] * space.point(j)[0]),
            lipschitz: T::one(),
        }),
        SpaceKind::Finite => {}
    }
    out.push(TestKernel {
        name: "cos_distance",
        kernel: Kernel::from_real_fn(space, |i, j| (pi * space.dist(i, j) / scale).cos()),
        lipschitz: pi / scale,
    });
    out.push(TestKernel {
        name: "sin_distance",
        kernel: Kernel::from_real_fn(space, |i, j| (pi * space.dist(i, j) / scale).sin()),
        lipschitz: pi / scale,
    });
    out.push(random_smooth(space, seed));
    out
}

/// `Σ_{|p|,|q| ≤ 2} c_pq · exp(2πi(p·a(x) + q·a(y)))` with `Σ|c_pq| = 1`, where `a`
/// is the first coordinate (sum of coordinates on the torus). On finite spaces
/// this is a plain random kernel with `L = 2‖f‖∞ / min spacing`.
pub fn random_smooth<T: Real>(space: &SpaceRef<T>, seed: u64) -> TestKernel<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if space.is_finite() {
        let kernel = Kernel::random_unit_ball(space, &mut rng);
        let lipschitz = T::lit(2.0) * kernel.sup_norm() / space.min_spacing();
        return TestKernel { name: "random_smooth", kernel, lipschitz };
    }
    let mut coeffs = Vec::new();
    for p in -FREQS..=FREQS {
        for q in -FREQS..=FREQS {
            let z: C<T> = c(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)));
            coeffs.push((p, q, z));
        }
    }
    let total: T = coeffs.iter().map(|(_, _, z)| z.norm()).sum();
    for (_, _, z) in coeffs.iter_mut() {
        *z = *z / re(total);
    }
    let coord = |i: usize| {
        let p = space.point(i);
        if space.kind() == SpaceKind::Torus2 {
            p[0] + p[1]
        } else {
            p[0]
        }
    };
    let kernel = Kernel::from_fn(space, |i, j| {
        let (a, b) = (coord(i), coord(j));
        coeffs.iter().fold(C::new(T::zero(), T::zero()), |acc, &(p, q, z)| {
            acc + z * cis_turns(T::lit(p as f64) * a + T::lit(q as f64) * b)
        })
    });
    let geometry = if space.kind() == SpaceKind::Torus2 { T::lit(2.0f64.sqrt()) } else { T::one() };
    let lipschitz = coeffs
        .iter()
        .map(|&(p, q, z)| z.norm() * T::lit(p.abs().max(q.abs()) as f64))
        .sum::<T>()
        * T::TAU()
        * geometry;
    TestKernel { name: "random_smooth", kernel, lipschitz }
}
