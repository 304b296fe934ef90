use genmat_cli::{build_space, run_suite, ExperimentConfig, Suite};

fn cfg(space: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&format!("schema = \"genmat.config/1\"\n[space]\n{space}\n")).unwrap()
}

fn failures(r: &genmat_cli::RunReport) -> Vec<String> {
    r.sections.iter().flat_map(|s| s.failures().map(move |c| format!("{}/{}", s.title, c.name))).collect()
}

#[test]
fn every_suite_passes_on_a_circle() {
    let c = cfg("kind = \"circle\"\nresolution = 128");
    let s = build_space(&c).unwrap();
    let r = run_suite(&s, &c, Suite::All, 42);
    assert_eq!(r.sections.len(), 6);
    assert!(r.pass, "{:?}", failures(&r));
}

#[test]
fn every_suite_passes_on_finite_spaces() {
    for space in ["kind = \"finite\"\nweights = [1.0]", "kind = \"finite\"\nweights = [0.1, 0.2, 0.3, 0.4]"] {
        let c = cfg(space);
        let s = build_space(&c).unwrap();
        let r = run_suite(&s, &c, Suite::All, 5);
        assert!(r.pass, "{space}: {:?}", failures(&r));
    }
}

#[test]
fn torus_right_units_pass_at_resolvable_radii() {
    let c = ExperimentConfig::parse(
        "schema = \"genmat.config/1\"\n[space]\nkind = \"torus2\"\nresolution = 12\n[units]\ndeltas = [0.3, 0.2, 0.12]\n",
    )
    .unwrap();
    let s = build_space(&c).unwrap();
    let r = run_suite(&s, &c, Suite::Units, 42);
    assert!(r.pass, "{:?}", failures(&r));
}

#[test]
fn coarse_torus_cannot_separate_the_smallest_radii() {
    // δ₄ and δ₅ both sit below the 1/12 spacing, so their balls hold one node
    let c = cfg("kind = \"torus2\"\nresolution = 12");
    let s = build_space(&c).unwrap();
    let r = run_suite(&s, &c, Suite::Units, 42);
    assert_eq!(failures(&r), vec!["units/unboundedness/strictly_increasing"]);
}

#[test]
fn all_is_the_concatenation_of_single_suites() {
    let c = cfg("kind = \"interval\"\nresolution = 24");
    let s = build_space(&c).unwrap();
    let all = run_suite(&s, &c, Suite::All, 9);
    for (k, suite) in Suite::EACH.into_iter().enumerate() {
        let one = run_suite(&s, &c, suite, 9);
        assert_eq!(one.sections[0], all.sections[k], "{suite}");
    }
}
