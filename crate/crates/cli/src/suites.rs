//! Verification suites run against one space.

use std::f64::consts::TAU;

use genmat::battery::battery;
use genmat::deriv::{approx_inner_run, gn_hat_sequence, tensor_gamma, tensor_lambda, DerivationSpec, TensorKernel};
use genmat::oprep::{adjoint_check, op_norm, rep_matrix, spectral_decay, OpNormMode};
use genmat::structure::{center_defect, center_exact, column_space, ideal_closure_check, ideal_rv, random_right_ideal_element};
use genmat::units::{convergence_report, norm_unit_seq, unboundedness_probe, Side, Topology};
use genmat::{finite_matrix_iso, unit, Check, Error, Kernel, Matrix, Report, SpaceKind, SpaceRef, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Suite};

/// Largest finite space on which the full two-sided ideal span is built.
const CLOSURE_MAX_NODES: usize = 6;

type Space = SpaceRef<f64>;

/// Runs `suite` and folds any library error into a failed `error` check.
pub fn run(suite: Suite, space: &Space, cfg: &ExperimentConfig, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let result = match suite {
        Suite::Axioms => axioms(space, cfg, &mut rng),
        Suite::Units => units(space, cfg, seed),
        Suite::Center => center(space, cfg),
        Suite::Ideals => ideals(space, cfg, &mut rng),
        Suite::Representation => representation(space, cfg, &mut rng),
        Suite::Derivation => derivation(space, cfg, seed, &mut rng),
        Suite::All => unreachable!("expanded by the caller"),
    };
    result.unwrap_or_else(|e| {
        let mut r = Report::new(suite.name());
        r.push(Check::new("error", vec![], None, false).with_note(e.to_string()));
        r
    })
}

fn axioms(space: &Space, cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Report, Error> {
    let tol = cfg.tolerances.axioms;
    let n = space.len();
    let ks: Vec<Kernel<f64>> = (0..6).map(|_| Kernel::random(space, rng)).collect();
    let (mut assoc, mut distrib, mut submult) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    let (mut twice, mut anti, mut conj_lin, mut seminorm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..ks.len() {
        let (f, g, h) = (&ks[i], &ks[(i + 1) % ks.len()], &ks[(i + 2) % ks.len()]);
        let fg = f.convolve(g)?;
        assoc = assoc.max(fg.convolve(h)?.dist_sup(&f.convolve(&g.convolve(h)?)?));
        distrib = distrib.max(f.convolve(&(g + h))?.dist_sup(&(&fg + &f.convolve(h)?)));
        submult = submult.max(fg.sup_norm() - f.sup_norm() * g.sup_norm());
        twice = twice.max(f.involve().involve().dist_sup(f));
        anti = anti.max(fg.involve().dist_sup(&g.involve().convolve(&f.involve())?));
        let lambda = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        conj_lin = conj_lin.max(f.scale(lambda).involve().dist_sup(&f.involve().scale(lambda.conj())));
        let fs = f.involve();
        for x in 0..n {
            seminorm = seminorm.max((fs.cc_seminorm(x) - f.rc_seminorm(x)).abs());
        }
    }
    let mut r = Report::new("axioms");
    r.push(Check::at_most("associativity", vec![assoc], tol));
    r.push(Check::at_most("distributivity", vec![distrib], tol));
    r.push(Check::at_most("submultiplicativity_excess", vec![submult.max(0.0)], tol));
    r.push(Check::at_most("involution_twice", vec![twice], tol));
    r.push(Check::at_most("involution_reverses_products", vec![anti], tol));
    r.push(Check::at_most("involution_conjugate_linear", vec![conj_lin], tol));
    r.push(Check::at_most("seminorm_adjointness", vec![seminorm], tol));
    if space.is_finite() {
        let u = unit(space)?;
        let (mut iso, mut star, mut unit_defect) = (0.0f64, 0.0f64, 0.0f64);
        for f in &ks {
            unit_defect = unit_defect.max(f.convolve(&u)?.dist_sup(f)).max(u.convolve(f)?.dist_sup(f));
            let a = Matrix::<f64>::random(n, n, rng);
            let b = Matrix::<f64>::random(n, n, rng);
            let pa = finite_matrix_iso(&a, space)?;
            iso = iso.max(finite_matrix_iso(&a.matmul(&b), space)?.dist_sup(&pa.convolve(&finite_matrix_iso(&b, space)?)?));
            star = star.max(finite_matrix_iso(&a.adjoint(), space)?.dist_sup(&pa.involve()));
        }
        let scale = 1.0 / space.min_weight();
        r.push(Check::at_most("matrix_iso_multiplicative", vec![iso], tol * scale));
        r.push(Check::at_most("matrix_iso_star", vec![star], tol * scale));
        r.push(Check::at_most("unit_defect", vec![unit_defect], tol * scale));
    }
    Ok(r)
}

fn units(space: &Space, cfg: &ExperimentConfig, seed: u64) -> Result<Report, Error> {
    let mut r = Report::new("units");
    let deltas = cfg.deltas();
    if space.is_finite() {
        r.extend(unboundedness_probe(space, &deltas)?);
        return Ok(r);
    }
    let side: Side = cfg.units.side.into();
    let net = match norm_unit_seq(space, &deltas, side) {
        Ok(net) => net,
        Err(Error::ConditionFailed { condition, witness }) => {
            r.push(
                Check::new(format!("condition_{condition}"), vec![witness.delta], None, false)
                    .with_note(format!("{side:?} sequence unavailable: {witness}")),
            );
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    for tk in battery(space, seed) {
        let mut part = convergence_report(&tk.kernel, &net, side, Topology::Norm, Some(tk.lipschitz))?;
        part.title = tk.name.to_string();
        r.extend(part);
    }
    r.extend(unboundedness_probe(space, &deltas)?);
    Ok(r)
}

fn center(space: &Space, cfg: &ExperimentConfig) -> Result<Report, Error> {
    let mut r = Report::new("center");
    if space.is_finite() {
        let basis = center_exact(space)?;
        r.push(Check::new("dimension", vec![basis.len() as f64], Some(1.0), basis.len() == 1));
        if let Some(b) = basis.first() {
            let u = unit(space)?;
            let ratio = b.get(0, 0) / u.get(0, 0);
            let gap = b.dist_sup(&u.scale(ratio));
            r.push(Check::at_most("proportional_to_unit", vec![gap], cfg.tolerances.axioms * b.sup_norm().max(1.0)));
        }
        return Ok(r);
    }
    let cd = center_defect(&Kernel::ones(space), 4)?;
    r.push(
        Check::new("constant_kernel_defect", vec![cd.value], Some(cfg.tolerances.center), cd.value >= cfg.tolerances.center)
            .with_note("lower bound; the center of an infinite space is zero"),
    );
    Ok(r)
}

fn ideals(space: &Space, cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Report, Error> {
    let tol = cfg.tolerances.ideals;
    let n = space.len();
    let mut r = Report::new("ideals");
    if space.is_finite() && n <= CLOSURE_MAX_NODES {
        for rank in 1..=n {
            let g = low_rank(space, rank, rng)?;
            let gens = [g];
            let probes: Vec<Kernel<f64>> = (0..20)
                .map(|p| {
                    if p % 2 == 0 {
                        random_right_ideal_element(&gens, || C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    } else {
                        Ok(Kernel::random(space, rng))
                    }
                })
                .collect::<Result<_, _>>()?;
            let mut part = ideal_closure_check(space, &gens, &probes)?;
            part.title = format!("rank{rank}");
            r.extend(part);
        }
        return Ok(r);
    }
    let rank = 2.min(n);
    let g = low_rank(space, rank, rng)?;
    let v = column_space(space, std::slice::from_ref(&g))?;
    let rv = ideal_rv(&v);
    r.push(Check::new("column_space_dimension", vec![v.dim() as f64], Some(rank as f64), v.dim() == rank));
    let mut inside = 0.0f64;
    for _ in 0..4 {
        let p = g.convolve(&Kernel::random(space, rng))?;
        inside = inside.max(rv.residual(&p)? / p.sup_norm().max(1.0));
    }
    r.push(Check::at_most("products_in_right_ideal", vec![inside], tol));
    if n > rank {
        let outside = rv.residual(&Kernel::random(space, rng))?;
        r.push(Check::new("generic_kernel_outside", vec![outside], Some(tol), outside > tol));
    }
    Ok(r)
}

fn low_rank(space: &Space, rank: usize, rng: &mut ChaCha8Rng) -> Result<Kernel<f64>, Error> {
    let n = space.len();
    let a = Matrix::<f64>::random(n, rank, rng);
    let b = Matrix::<f64>::random(rank, n, rng);
    let m = a.matmul(&b);
    Kernel::new(space, m.into_vec())
}

fn representation(space: &Space, cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Report, Error> {
    let tol = cfg.tolerances.representation;
    let mut r = Report::new("representation");
    let (mut hom, mut excess) = (0.0f64, f64::NEG_INFINITY);
    for _ in 0..3 {
        let f = Kernel::random(space, rng);
        let g = Kernel::random(space, rng);
        hom = hom.max(rep_matrix(&f.convolve(&g)?).max_abs_diff(&rep_matrix(&f).matmul(&rep_matrix(&g))));
        for mode in OpNormMode::ALL {
            excess = excess.max(op_norm(&f, mode) - f.sup_norm());
        }
        let mut adj = adjoint_check(&f, rng, 4)?;
        adj.title = "adjoint".into();
        for c in adj.checks {
            r.push(Check::at_most(c.name, c.values, tol));
        }
    }
    r.push(Check::at_most("homomorphism", vec![hom], tol));
    r.push(Check::at_most("op_norm_excess", vec![excess], tol));
    if let Some(tk) = battery(space, 0).into_iter().find(|t| t.name == "random_smooth") {
        let sd = spectral_decay(&tk.kernel, space.len().min(5))?;
        r.push(Check::info("random_smooth_singular_values", sd.values).with_note(format!("tail mass {:e}", sd.tail_mass)));
    }
    Ok(r)
}

/// First coordinate (sum of coordinates on the torus) in turns.
fn coordinate(space: &Space, i: usize) -> f64 {
    let p = space.point(i);
    if space.kind() == SpaceKind::Torus2 {
        p[0] + p[1]
    } else {
        p[0]
    }
}

fn derivation(space: &Space, cfg: &ExperimentConfig, seed: u64, rng: &mut ChaCha8Rng) -> Result<Report, Error> {
    let n = space.len();
    let mut r = Report::new("derivation");
    let phi: Vec<f64> = if space.is_finite() {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    } else {
        (0..n).map(|i| (TAU * coordinate(space, i)).cos()).collect()
    };
    let omega = if space.is_finite() {
        Kernel::random(space, rng)
    } else {
        Kernel::from_fn(space, |i, j| {
            let (x, y) = (coordinate(space, i), coordinate(space, j));
            C::new((TAU * x).cos() * (TAU * y).cos(), 0.5 * (TAU * (x + 2.0 * y)).sin())
        })
    };
    let specs = [DerivationSpec::Inner(omega), DerivationSpec::GaugeGenerator(phi)];
    let (mut law, mut first, mut second) = (0.0f64, 0.0f64, 0.0f64);
    for d in &specs {
        let f = Kernel::random(space, rng);
        let g = Kernel::random(space, rng);
        let lhs = d.apply(&f.convolve(&g)?)?;
        law = law.max(lhs.dist_sup(&(&f.convolve(&d.apply(&g)?)? + &d.apply(&f)?.convolve(&g)?)));
        let terms = (0..3).map(|_| (Kernel::random(space, rng), Kernel::random(space, rng))).collect();
        let t = TensorKernel::from_terms(space, terms)?;
        let h = Kernel::random(space, rng);
        let gamma = tensor_gamma(&t, d)?;
        first = first.max(tensor_gamma(&t.lmul(&h)?, d)?.dist_sup(&h.convolve(&gamma)?));
        let rhs = &tensor_lambda(&t)?.convolve(&d.apply(&h)?)? + &gamma.convolve(&h)?;
        second = second.max(tensor_gamma(&t.rmul(&h)?, d)?.dist_sup(&rhs));
    }
    let tol = cfg.tolerances.axioms;
    r.push(Check::at_most("leibniz", vec![law], tol));
    r.push(Check::at_most("gamma_left_module", vec![first], 1e-10));
    r.push(Check::at_most("gamma_right_twist", vec![second], 1e-10));
    if space.is_finite() {
        return Ok(r);
    }
    let seq = gn_hat_sequence(space, &cfg.deltas())?;
    let b = battery(space, seed);
    for d in &specs {
        r.extend(approx_inner_run(d, &b, &seq)?.report);
    }
    Ok(r)
}
