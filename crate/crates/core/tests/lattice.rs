use num_complex::Complex64 as C64;
use proptest::prelude::*;
use toda_darboux::darboux::{moderate_magnitude, DEFAULT_PEEL_TOL};
use toda_darboux::lattice::{write_gamma_csv, write_toda_csv};
use toda_darboux::lu::DEFAULT_PIVOT_TOL;
use toda_darboux::*;

fn config(window: usize) -> DiagramConfig {
    DiagramConfig {
        dt: 1e-3,
        steps: 100,
        window,
        tol_path: 1e-4,
        tol_verify: 1e-5,
        pivot_tol: DEFAULT_PIVOT_TOL,
        peel_tol: DEFAULT_PEEL_TOL,
    }
}

fn moderate(p: usize, n: usize, shift: C64, seed: u64, mode: SampleMode) -> DarbouxInstance {
    let m = moderate_magnitude(p);
    random_darboux_instance(p, n, shift, (m, 2.0 * m), seed, mode).unwrap()
}

#[test]
fn diagram_commutes_across_seeds() {
    for p in 1..=3 {
        for seed in 0..6u64 {
            let mode = if seed % 2 == 0 { SampleMode::Real } else { SampleMode::Complex };
            let inst = moderate(p, 8 + p + 2, C64::new(-0.2, 0.0), seed, mode);
            let r = theorem1_diagram(&inst.j, inst.factors.shift, &ParamChoice::Given(inst.params.clone()), &config(8))
                .unwrap();
            assert!(r.pass(), "p = {p}, seed = {seed}: {:?}", r.reports());
            assert_eq!(r.toda.len(), p + 1);
        }
    }
}

#[test]
fn diagram_with_sampled_parameters() {
    let inst = moderate(3, 13, C64::new(0.0, 0.0), 42, SampleMode::Real);
    let choice = ParamChoice::Sampled {
        seed: 9,
        options: SamplingOptions::default(),
    };
    let r = theorem1_diagram(&inst.j, C64::new(0.0, 0.0), &choice, &config(8)).unwrap();
    // J^(0) does not depend on the parameters. The other transforms and the
    // gammas do, and sampled parameters are larger than the fixture's, so
    // their difference-quotient residuals are not bounded by the same tolerance.
    assert!(r.path.pass && r.toda[0].pass, "{:?}", r.reports());
    assert!(r.path.max_residual < 1e-9);
    assert_ne!(r.params, inst.params);
}

#[test]
fn diagram_rejects_window_beyond_working_size() {
    let inst = moderate(2, 10, C64::new(0.0, 0.0), 1, SampleMode::Real);
    let err = theorem1_diagram(&inst.j, C64::new(0.0, 0.0), &ParamChoice::Given(inst.params), &config(10)).unwrap_err();
    assert_eq!(err.kind(), "size");
}

#[test]
fn verify_needs_three_samples() {
    let j = random_hessenberg(1, 4, 0, SampleMode::Real).unwrap();
    let t = evolve_toda(&j, 1e-3, 1).unwrap();
    assert_eq!(verify_toda(&t, 4, 1e-5).unwrap_err(), Error::InsufficientSamples { found: 2 });
}

#[test]
fn verify_flags_a_corrupted_sample() {
    let inst = moderate(2, 10, C64::new(0.0, 0.0), 3, SampleMode::Real);
    let mut t = evolve_toda(&inst.j, 1e-3, 20).unwrap();
    assert!(verify_toda(&t, 8, 1e-5).unwrap().pass);
    t.states[10] = t.states[10].with_entry(4, 3, t.states[10].get(4, 3) + C64::new(1e-4, 0.0)).unwrap();
    let r = verify_toda(&t, 8, 1e-5).unwrap();
    assert!(!r.pass);
    let (id, sample) = r.argmax.unwrap();
    assert!(sample == 9 || sample == 11 || sample == 10, "{sample}");
    assert!(matches!(id, EntryId::Band { .. }));
}

#[test]
fn toda_is_shift_invariant() {
    let j = random_hessenberg(2, 7, 5, SampleMode::Complex).unwrap();
    let c = C64::new(0.7, -0.3);
    let shifted = BandedHessenberg::from_fn(2, 7, |i, k| if i == k { j.get(i, k) + c } else { j.get(i, k) }).unwrap();
    for (a, b) in toda_rhs(&j).iter().zip(toda_rhs(&shifted)) {
        assert!((a - b).norm() < 1e-13);
    }
}

#[test]
fn toda_scaling_symmetry() {
    // a[i][j] -> lambda^(i-j+1) a[i][j](lambda t) maps solutions to solutions.
    let inst = moderate(2, 8, C64::new(0.0, 0.0), 11, SampleMode::Real);
    let lambda: f64 = 2.0;
    let scaled0 = BandedHessenberg::from_fn(2, 8, |i, k| inst.j.get(i, k) * lambda.powi((i - k + 1) as i32)).unwrap();
    let base = evolve_toda(&inst.j, 1e-3, 200).unwrap();
    let scaled = evolve_toda(&scaled0, 5e-4, 200).unwrap();
    let end = scaled.last().unwrap();
    let reference = base.last().unwrap();
    for ((i, k), v) in end.entries() {
        let want = reference.get(i, k) * lambda.powi((i - k + 1) as i32);
        assert!((v - want).norm() < 1e-10, "({i}, {k})");
    }
}

#[test]
fn derivative_identity_checks() {
    let j = random_hessenberg(3, 8, 2, SampleMode::Complex).unwrap();
    let j_dot = j.with_entries(&toda_rhs(&j)).unwrap();
    let r = check_poly_derivative(&j, &j_dot, C64::new(-0.5, 0.25), 7, 1e-10).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(check_poly_derivative(&j, &j_dot, C64::new(0.0, 0.0), 8, 1e-10).is_err());
    // Any other derivative breaks it.
    let wrong = j.with_entries(&vec![C64::new(0.1, 0.0); j.stored_len()]).unwrap();
    assert!(!check_poly_derivative(&j, &wrong, C64::new(-0.5, 0.25), 7, 1e-10).unwrap().pass);

    let inst = moderate(3, 9, C64::new(0.0, 0.0), 4, SampleMode::Complex);
    let g_dot = kdv_rhs(inst.table.values(), 3);
    assert!(check_delta_derivative(&inst.table, &g_dot, 1e-10).unwrap().pass);
    let doubled: Vec<C64> = g_dot.iter().map(|v| v * 2.0).collect();
    assert!(!check_delta_derivative(&inst.table, &doubled, 1e-10).unwrap().pass);
}

#[test]
fn csv_layout() {
    let j = BandedHessenberg::from_fn(1, 2, |i, k| C64::new((i + k) as f64, 0.0)).unwrap();
    let t = evolve_toda(&j, 0.5, 1).unwrap();
    let mut buf = Vec::new();
    write_toda_csv(&mut buf, &t).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,entry_id,re,im");
    assert_eq!(lines[1], "0,a[0][0],0,0");
    assert_eq!(lines[3], "0,a[1][0],1,0");
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines[4].starts_with("0.5,a[0][0],"));

    let g = GammaTable::new(1, vec![C64::new(1.0, -1.0), C64::new(2.0, 0.0)]).unwrap();
    let kt = evolve_kdv(&g, 0.1, 0).unwrap();
    let mut buf = Vec::new();
    write_gamma_csv(&mut buf, &kt).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "t,entry_id,re,im\n0,gamma[1],1,-1\n0,gamma[2],2,0\n");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kdv_route_reproduces_every_transform(p in 1usize..=3, seed in any::<u64>()) {
        // The pivots of the directly evolved J are the evolved row-0 gammas.
        let inst = moderate(p, 12, C64::new(0.1, 0.0), seed, SampleMode::Real);
        let r = theorem1_diagram(&inst.j, inst.factors.shift, &ParamChoice::Given(inst.params.clone()), &DiagramConfig { steps: 40, ..config(8) }).unwrap();
        prop_assert!(r.pass(), "{:?}", r.reports());
        let last_direct = r.direct.last().unwrap();
        let lu = lu_factorize(&ShiftedProblem::new(last_direct.clone(), inst.factors.shift), DEFAULT_PIVOT_TOL).unwrap();
        let table_now = r.gamma.last().unwrap();
        for (a, b) in lu.u.free().iter().zip(table_now.row(0)).take(8) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }
}
