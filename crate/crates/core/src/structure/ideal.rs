use super::{KernelSpan, Subspace, RANK_TOL};
use crate::algebra::Kernel;
use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::scalar::{re, Real, C};
use crate::space::SpaceRef;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Right,
    Left,
}

/// Projector onto `R_V` (columns in `V`) or `L_V` (rows in `V`).
#[derive(Clone, Debug)]
pub struct IdealProjector<T: Real> {
    v: Subspace<T>,
    side: Side,
}

/// `R_V = {f : f(·, y) ∈ V for every y}`
pub fn ideal_rv<T: Real>(v: &Subspace<T>) -> IdealProjector<T> {
    IdealProjector { v: v.clone(), side: Side::Right }
}

/// `L_V = {f : f(x, ·) ∈ V for every x}`
pub fn ideal_lv<T: Real>(v: &Subspace<T>) -> IdealProjector<T> {
    IdealProjector { v: v.clone(), side: Side::Left }
}

impl<T: Real> IdealProjector<T> {
    pub fn subspace(&self) -> &Subspace<T> {
        &self.v
    }

    pub fn is_right(&self) -> bool {
        self.side == Side::Right
    }

    pub fn project(&self, f: &Kernel<T>) -> Result<Kernel<T>> {
        if !f.space().same_as(self.v.space()) {
            return Err(Error::SpaceMismatch);
        }
        let n = f.n();
        let mut out = Kernel::zeros(f.space());
        match self.side {
            Side::Right => {
                for j in 0..n {
                    let col = self.v.project(&f.column(j));
                    for (i, z) in col.into_iter().enumerate() {
                        out.set(i, j, z);
                    }
                }
            }
            Side::Left => {
                for i in 0..n {
                    let row = self.v.project(f.row(i));
                    out.values_mut()[i * n..(i + 1) * n].copy_from_slice(&row);
                }
            }
        }
        Ok(out)
    }

    /// `‖f − P f‖∞ ≤ 1e-10 · max(1, ‖f‖∞)`
    pub fn contains(&self, f: &Kernel<T>) -> Result<bool> {
        Ok(self.residual(f)? <= T::tol(RANK_TOL) * f.sup_norm().max(T::one()))
    }

    pub fn residual(&self, f: &Kernel<T>) -> Result<T> {
        Ok(f.dist_sup(&self.project(f)?))
    }

    /// Dimension of the ideal as a vector space: `N · dim V`.
    pub fn dim(&self) -> usize {
        self.v.space().len() * self.v.dim()
    }
}

/// Span of every column of every generator.
pub fn column_space<T: Real>(space: &SpaceRef<T>, generators: &[Kernel<T>]) -> Result<Subspace<T>> {
    let mut cols = Vec::with_capacity(generators.len() * space.len());
    for g in generators {
        if !g.space().same_as(space) {
            return Err(Error::SpaceMismatch);
        }
        cols.extend((0..g.n()).map(|j| g.column(j)));
    }
    Subspace::span(space, &cols)
}

fn matrix_units<T: Real>(space: &SpaceRef<T>) -> Vec<Kernel<T>> {
    let nn = space.len() * space.len();
    (0..nn)
        .map(|k| {
            let mut e = Kernel::zeros(space);
            e.values_mut()[k] = re(T::one());
            e
        })
        .collect()
}

/// Two-sided ideal `span{a ⋆ g ⋆ b}` and right ideal `span{g ⋆ b}` generated by
/// `generators` on a finite space, against `R_V` with `V` the column space.
///
/// Each probe is tested for membership in both the right ideal and `R_V`; the
/// agreement check is only informative when some probes are members.
pub fn ideal_closure_check<T: Real>(
    space: &SpaceRef<T>,
    generators: &[Kernel<T>],
    probes: &[Kernel<T>],
) -> Result<Report> {
    if !space.is_finite() {
        return Err(Error::NotFinite);
    }
    let n = space.len();
    let basis = matrix_units(space);
    let mut right = Vec::new();
    let mut two_sided = Vec::new();
    for g in generators {
        if !g.space().same_as(space) {
            return Err(Error::SpaceMismatch);
        }
        let gb: Vec<Kernel<T>> = basis.iter().map(|b| g.convolve(b)).collect::<Result<_>>()?;
        for a in &basis {
            for x in &gb {
                two_sided.push(a.convolve(x)?);
            }
        }
        right.extend(gb);
    }
    let two = KernelSpan::new(space, &two_sided)?;
    let r = KernelSpan::new(space, &right)?;
    let v = column_space(space, generators)?;
    let rv = ideal_rv(&v);
    let nonzero = generators.iter().any(|g| g.sup_norm() > T::zero());

    let mut report = Report::new("ideal_closure");
    let full = n * n;
    let expected_two = if nonzero { full } else { 0 };
    report.push(
        Check::new(
            "two_sided_dimension",
            vec![two.dim() as f64],
            Some(expected_two as f64),
            two.dim() == expected_two,
        )
        .with_note(format!("full algebra has dimension {full}")),
    );
    report.push(Check::new(
        "right_ideal_dimension",
        vec![r.dim() as f64, rv.dim() as f64],
        None,
        r.dim() == rv.dim(),
    ));
    let inside: Vec<T> = r.basis().iter().map(|k| rv.residual(k)).collect::<Result<_>>()?;
    report.push(Check::at_most(
        "right_ideal_inside_rv",
        vec![inside.into_iter().fold(T::zero(), T::max).as_f64()],
        RANK_TOL,
    ));
    let mut gap = T::zero();
    let mut agree = true;
    for p in probes {
        let a = r.residual(p);
        let b = rv.residual(p)?;
        gap = gap.max((a - b).abs());
        let tol = T::tol(RANK_TOL) * p.sup_norm().max(T::one());
        agree &= (a <= tol) == (b <= tol);
    }
    report.push(Check::new("membership_agreement", vec![gap.as_f64()], Some(RANK_TOL), agree && gap <= T::tol(RANK_TOL)));
    Ok(report)
}

/// Random element of `span{g ⋆ b}` built from coefficients on matrix units.
pub fn random_right_ideal_element<T: Real>(
    generators: &[Kernel<T>],
    mut coeffs: impl FnMut() -> C<T>,
) -> Result<Kernel<T>> {
    let space = generators[0].space().clone();
    let mut out = Kernel::zeros(&space);
    for g in generators {
        let b = Kernel::from_fn(&space, |_, _| coeffs());
        out.axpy(C::new(T::one(), T::zero()), &g.convolve(&b)?);
    }
    Ok(out)
}
