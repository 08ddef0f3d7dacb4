//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p qgraph-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qgraph_core::domainscan::{reality_boundary, scan, ScanAxis, DEFAULT_BOUNDARY_TOL};
use qgraph_core::hamiltonian::{
    assemble, assemble_amended, expected_trace, AmendedCouplingSet, CouplingSet,
};
use qgraph_core::lattice::build_graph;
use qgraph_core::paperdata::{
    closed_form_energies, closed_form_sample_points, paper_factor, verify_against_paper,
    FactorBranch, CLOSED_FORM_SAMPLES,
};
use qgraph_core::polyring::rational::{int, sample_rational};
use qgraph_core::polyring::{charpoly_rational, MultiPoly, Var};
use qgraph_core::secular::{separation_identity_check, split_secular};
use qgraph_core::spectra::{eigenvalues, multiset_distance, polynomial_roots, DEFAULT_TOL};

fn report(criterion: u32, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {status} ({detail})");
}

fn factor_criterion(criterion: u32, k: usize, limit: Duration) {
    let start = Instant::now();
    let split = split_secular(&build_graph(k, 1).unwrap()).unwrap();
    let elapsed = start.elapsed();
    let plus = paper_factor(k, FactorBranch::Plus).unwrap().sector_factor();
    let minus = paper_factor(k, FactorBranch::Minus)
        .unwrap()
        .sector_factor();
    let exact = split.f_plus == plus && split.f_minus == minus;
    let pass = exact && elapsed < limit;
    report(
        criterion,
        pass,
        &format!("K={k} factors equal published tables: {exact}, {elapsed:.2?}"),
    );
    assert!(
        exact,
        "K={k}\nplus  {}\nminus {}",
        split.f_plus, split.f_minus
    );
    assert!(elapsed < limit, "{elapsed:?}");
}

#[test]
fn criterion_1_k3_quartics() {
    factor_criterion(1, 3, Duration::from_secs(5));
}

#[test]
fn criterion_2_k4_quartics_times_constant_root() {
    factor_criterion(2, 4, Duration::from_secs(5));
}

#[test]
fn criterion_3_k5_sextics() {
    factor_criterion(3, 5, Duration::from_secs(10));
}

#[test]
fn criterion_4_k1_closed_forms() {
    let r = verify_against_paper(1).unwrap();
    let worst = r.max_deviation.unwrap();
    let pass = r.samples == CLOSED_FORM_SAMPLES && worst <= 1e-10;
    report(
        4,
        pass,
        &format!("{} points, max deviation {worst:.2e}", r.samples),
    );
    assert!(pass);
}

#[test]
fn criterion_5_k2_doublet_and_quartic() {
    let spec = build_graph(2, 1).unwrap();
    let e = MultiPoly::var(Var::E);
    let doublet = (&e - &MultiPoly::constant(int(2))).pow(2);
    let mut divisible = 0;
    let mut worst = 0.0f64;
    let points = closed_form_sample_points(2, CLOSED_FORM_SAMPLES);
    for (g, d) in &points {
        let a = AmendedCouplingSet::new(g.clone(), d.clone(), int(0));
        let p = charpoly_rational(&assemble_amended(&spec, &a)).unwrap();
        let Ok(quartic) = p.div_exact(&doublet, Var::E) else {
            continue;
        };
        divisible += 1;
        let roots = polynomial_roots(&quartic.univariate_coeffs().unwrap(), DEFAULT_TOL).unwrap();
        let closed = closed_form_energies(2, g, d).unwrap();
        worst = worst.max(multiset_distance(&roots, &closed[..4]));
    }
    let pass = divisible == points.len() && worst <= 1e-10;
    report(
        5,
        pass,
        &format!(
            "{divisible}/{} divisible by (E-2)^2, max deviation {worst:.2e}",
            points.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_reality_boundaries() {
    let zero = AmendedCouplingSet::default();
    let cases = [
        (1, Var::Gamma, 1.03077641, 17f64.sqrt() / 4.0),
        (1, Var::Delta, 0.25, 0.25),
        (2, Var::Gamma, 1.14564392, 21f64.sqrt() / 4.0),
        (2, Var::Delta, 0.55901699, 5f64.sqrt() / 4.0),
    ];
    let mut all = true;
    for (k, axis, printed, exact) in cases {
        let spec = build_graph(k, 1).unwrap();
        let start = Instant::now();
        let r = reality_boundary(&spec, axis, &zero, (0.0, 2.0), DEFAULT_BOUNDARY_TOL).unwrap();
        let elapsed = start.elapsed();
        let ok = (r.critical - exact).abs() <= 1e-6
            && (r.critical - printed).abs() <= 1e-6
            && elapsed < Duration::from_secs(2);
        all &= ok;
        println!(
            "  K={k} {}: {:.9} (closed form {exact:.9}), {elapsed:.2?}",
            axis.name(),
            r.critical
        );
    }
    report(6, all, "four critical couplings within 1e-6");
    assert!(all);
}

#[test]
fn criterion_7_separation_identity() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut block_failures = Vec::new();
    for l in 1..=3 {
        for k in 1..=8 {
            let spec = build_graph(k, l).unwrap();
            if split_secular(&spec).is_err() {
                block_failures.push((k, l));
            }
            let r = separation_identity_check(&spec, 0).unwrap();
            if !r.symbolic_pass {
                failures.push((k, l, r.residual_terms));
            }
        }
    }
    let elapsed = start.elapsed();
    for (k, l, terms) in &failures {
        println!("  K={k} L={l}: identity fails, {terms} residual monomials");
    }
    let pass =
        failures.is_empty() && block_failures.is_empty() && elapsed < Duration::from_secs(120);
    report(
        7,
        pass,
        &format!(
            "{}/24 identities hold, block-diagonal in {}/24, {elapsed:.2?}",
            24 - failures.len(),
            24 - block_failures.len()
        ),
    );
    assert!(
        block_failures.is_empty(),
        "not block-diagonal: {block_failures:?}"
    );
    assert!(elapsed < Duration::from_secs(120), "{elapsed:?}");
    assert!(
        failures.is_empty(),
        "separation identity fails for {failures:?}"
    );
}

#[test]
fn criterion_8_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let mut transpose_ok = true;
    for _ in 0..50 {
        let spec = build_graph(rng.gen_range(1..=8), rng.gen_range(1..=3)).unwrap();
        let c = CouplingSet::new(
            sample_rational(&mut rng, -3, 3, 16),
            sample_rational(&mut rng, -3, 3, 16),
            sample_rational(&mut rng, -3, 3, 16),
        );
        transpose_ok &= assemble(&spec, &c).transpose() == assemble(&spec, &c.negated());
    }

    let mut trace_ok = true;
    for k in 1..=10 {
        for l in 1..=10 {
            let spec = build_graph(k, l).unwrap();
            let c = CouplingSet::new(int(1), int(-2), int(3));
            trace_ok &= assemble(&spec, &c).trace() == expected_trace(&spec);
            trace_ok &= expected_trace(&spec) == int(2 * spec.n() as i64 + 2);
        }
    }

    let spec = build_graph(3, 1).unwrap();
    let mut flips_ok = true;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let a = AmendedCouplingSet::new(
            sample_rational(&mut rng, -2, 2, 1000),
            sample_rational(&mut rng, -2, 2, 1000),
            sample_rational(&mut rng, -2, 2, 1000),
        );
        let base = eigenvalues(&assemble_amended(&spec, &a).to_f64(), DEFAULT_TOL).unwrap();
        flips_ok &= base.is_conjugate_closed(1e-8);
        let flipped = [
            AmendedCouplingSet::new(-&a.gamma, a.delta.clone(), a.z.clone()),
            AmendedCouplingSet::new(a.gamma.clone(), -&a.delta, a.z.clone()),
            AmendedCouplingSet::new(a.gamma.clone(), a.delta.clone(), -&a.z),
        ];
        for f in &flipped {
            let s = eigenvalues(&assemble_amended(&spec, f).to_f64(), DEFAULT_TOL).unwrap();
            let d = multiset_distance(&base.eigenvalues, &s.eigenvalues);
            worst = worst.max(d);
            flips_ok &= d <= 1e-8 && s.is_conjugate_closed(1e-8);
        }
    }

    let pass = transpose_ok && trace_ok && flips_ok;
    report(
        8,
        pass,
        &format!(
            "transpose {transpose_ok}, trace {trace_ok}, sign flips {flips_ok} (max shift {worst:.2e})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_k1_scan_rectangle() {
    let spec = build_graph(1, 1).unwrap();
    let axes = ScanAxis::parse_list("gamma=-1.5:1.5:101;delta=-0.5:0.5:101").unwrap();
    let start = Instant::now();
    let grid = scan(&spec, &axes, &AmendedCouplingSet::default(), DEFAULT_TOL).unwrap();
    let elapsed = start.elapsed();

    let gmax = 17f64.sqrt() / 4.0;
    let dmax = 0.25;
    let (mut interior, mut exterior, mut wrong) = (0, 0, Vec::<(f64, f64)>::new());
    for r in &grid.records {
        let (g, d) = (r.gamma.abs(), r.delta.abs());
        if g <= gmax - 1e-3 && d <= dmax - 1e-3 {
            interior += 1;
            if !r.all_real {
                wrong.push((r.gamma, r.delta));
            }
        } else if g >= gmax + 1e-3 || d >= dmax + 1e-3 {
            exterior += 1;
            if r.all_real {
                wrong.push((r.gamma, r.delta));
            }
        }
    }
    let pass =
        grid.records.len() == 101 * 101 && wrong.is_empty() && elapsed < Duration::from_secs(10);
    report(
        9,
        pass,
        &format!(
            "{interior} interior and {exterior} exterior points, {} misclassified, {elapsed:.2?}",
            wrong.len()
        ),
    );
    assert!(pass, "misclassified: {wrong:?}");
}
