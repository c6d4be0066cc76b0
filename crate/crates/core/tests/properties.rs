use proptest::prelude::*;

use mcde_gbdt::config::{fmt_complex, fmt_matrix, parse_complex, parse_matrix};
use mcde_gbdt::darboux::{det, DarbouxEvaluator};
use mcde_gbdt::gbdt::{GbdtParameters, SMode, TransformedSolution};
use mcde_gbdt::grid::{FieldGrid, GridSpec, Provenance};
use mcde_gbdt::matrix::{c, determinant, lu_inverse, mat_exp, sylvester_solve, ComplexMatrix, C64};
use mcde_gbdt::oracles::{case1_fields, case2_fields, jordan_fields, Case1Params, Case2Params, JordanParams};
use mcde_gbdt::seed::{BlockStructure, SeedSolution};

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn matrix(n: usize, r: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(cplx(r), n * n).prop_map(move |v| {
        let rows: Vec<Vec<C64>> = v.chunks(n).map(|r| r.to_vec()).collect();
        ComplexMatrix::from_rows(&rows).unwrap()
    })
}

fn sized(r: f64) -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=4).prop_flat_map(move |n| matrix(n, r))
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.dist(b) / 1f64.max(a.max_norm()).max(b.max_norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exp_times_exp_neg_is_identity(m in sized(2.0)) {
        let n = m.rows();
        let p = &mat_exp(&m) * &mat_exp(&-&m);
        prop_assert!(p.dist(&ComplexMatrix::identity(n)) <= 1e-11, "{}", p.dist(&ComplexMatrix::identity(n)));
    }

    #[test]
    fn sylvester_reproduces_rhs(n in 1usize..=4, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |shift: f64| {
            let mut m = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
                m[(i, i)] += c(shift, 0.0);
            }
            m
        };
        // Diagonal shifts of ±6 keep the spectra well apart.
        let a1 = draw(6.0);
        let a2 = draw(-6.0);
        let rhs = draw(0.0);
        let s = sylvester_solve(&a1, &a2, &rhs).unwrap();
        let back = &(&a1 * &s) - &(&s * &a2);
        prop_assert!(back.dist(&rhs) <= 1e-11);
    }

    #[test]
    fn double_inverse(m in sized(1.0)) {
        let n = m.rows();
        // Diagonal dominance keeps the condition number small.
        let m = &m + &ComplexMatrix::scalar(n, c(2.0 * n as f64 + 1.0, 0.0));
        let back = lu_inverse(&lu_inverse(&m).unwrap()).unwrap();
        prop_assert!(rel(&back, &m) <= 1e-10);
    }

    #[test]
    fn det_is_multiplicative((m, k) in (1usize..=4).prop_flat_map(|n| (matrix(n, 2.0), matrix(n, 2.0)))) {
        let lhs = determinant(&(&m * &k));
        let rhs = determinant(&m) * determinant(&k);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * 1f64.max(rhs.norm()));
    }

    #[test]
    fn complex_tokens_round_trip(z in cplx(1e6)) {
        prop_assert_eq!(parse_complex(&fmt_complex(z)).unwrap(), z);
    }

    #[test]
    fn matrix_literals_round_trip(m in sized(50.0)) {
        prop_assert_eq!(parse_matrix(&fmt_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn csv_round_trip(
        nx in 2usize..6,
        nt in 2usize..6,
        vals in prop::collection::vec((cplx(1e3), any::<bool>()), 36),
    ) {
        let spec = GridSpec::new(-1.0, 2.0, 0.0, 3.0, nx, nt).unwrap();
        let k = std::cell::Cell::new(0);
        let g = FieldGrid::from_fn("f", &spec, Provenance::Engine, |_, _| {
            let (z, masked) = vals[k.get() % vals.len()];
            k.set(k.get() + 1);
            (!masked).then_some(z)
        });
        let text = g.to_csv();
        prop_assert_eq!(text.lines().count(), nx * nt + 1);
        let back = FieldGrid::from_csv("f", &text, Provenance::Engine).unwrap();
        prop_assert_eq!(back.to_csv(), text);
    }
}

#[test]
fn non_finite_samples_are_masked_in_exports() {
    let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 3, 3).unwrap();
    let g = FieldGrid::from_fn("f", &spec, Provenance::Engine, |x, _| {
        Some(if x == 0.0 { c(f64::NAN, 0.0) } else { c(f64::INFINITY, 1.0) })
    });
    let csv = g.to_csv();
    assert!(!csv.to_lowercase().contains("nan") && !csv.contains("inf"));
    assert_eq!(g.masked_count(), 9);
    assert!(!g.to_svg(&Default::default()).to_lowercase().contains("nan"));
}

fn seeds() -> Vec<SeedSolution> {
    let mut out = Vec::new();
    for p in [0u8, 1] {
        out.push(SeedSolution::const_diag(BlockStructure::scalar(p), vec![c(0.4, 0.3), c(-1.1, 0.7)]).unwrap());
        out.push(SeedSolution::scalar(BlockStructure::new(2, 1, p).unwrap(), c(0.9, -0.2)));
        out.push(SeedSolution::const_diag(BlockStructure::new(1, 2, p).unwrap(), vec![c(1.0, 0.0), c(0.5, 0.5), c(-0.3, 0.0)]).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn seed_wave_solves_lax_pair(x in -3.0..3.0f64, t in -3.0..3.0f64, l in cplx(3.0)) {
        prop_assume!(l.norm() > 0.3);
        for seed in seeds() {
            let res = |h: f64| {
                let w = seed.wave(x, t, l).unwrap();
                let wx = (&seed.wave(x + h, t, l).unwrap() - &seed.wave(x - h, t, l).unwrap()).scale(c(0.5 / h, 0.0));
                let wt = (&seed.wave(x, t + h, l).unwrap() - &seed.wave(x, t - h, l).unwrap()).scale(c(0.5 / h, 0.0));
                let scale = 1f64.max(w.max_norm());
                let ex = (&wx - &(&seed.g(x, t, l) * &w)).max_norm() / scale;
                let et = (&wt - &(&seed.f(x, t, l).unwrap() * &w)).max_norm() / scale;
                ex.max(et)
            };
            let (r2, r3) = (res(1e-2), res(1e-3));
            prop_assert!(r3 <= 1e-5, "residual {r3:e}");
            if r2 > 1e-9 {
                let ratio = r2 / r3;
                prop_assert!((60.0..=160.0).contains(&ratio), "ratio {ratio}");
            }
            let g = seed.g(x, t, l);
            let f = seed.f(x, t, l).unwrap();
            let comm = &(&g * &f) - &(&f * &g);
            prop_assert!(comm.max_norm() <= 1e-13);
        }
    }

    #[test]
    fn propagated_pi_satisfies_its_ode(x in -2.0..2.0f64, t in -2.0..2.0f64, a in cplx(1.0), c1 in cplx(2.0), c2 in cplx(2.0)) {
        prop_assume!(a.re.abs() > 0.1);
        let params = GbdtParameters::nonlocal(
            BlockStructure::scalar(1),
            ComplexMatrix::from_rows(&[vec![a, c(1.0, 0.0)], vec![c(0.0, 0.0), a]]).unwrap(),
            ComplexMatrix::from_rows(&[vec![c1, c2], vec![c2, c1]]).unwrap(),
            None,
        );
        let Ok(params) = params else { return Ok(()) };
        let seed = SeedSolution::const_diag(BlockStructure::scalar(1), vec![c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        let sol = TransformedSolution::new(params, seed.clone(), SMode::SylvesterPointwise).unwrap();
        let h = 1e-4;
        let dx = (&sol.pi1(x + h, t) - &sol.pi1(x - h, t)).scale(c(0.5 / h, 0.0));
        let co = seed.coefficients(x, t);
        let pi = sol.pi1(x, t);
        let rhs = &(&(&sol.params().a1 * &pi) * &co.q1) + &(&pi * &co.q0);
        prop_assert!(rel(&dx, &rhs) <= 1e-6, "{}", rel(&dx, &rhs));
    }

    #[test]
    fn engine_matches_jordan_formula(
        p in 0u8..=1,
        a in cplx(1.5),
        c1 in (cplx(3.0), cplx(3.0)),
        c2 in (cplx(3.0), cplx(3.0)),
        x in -4.0..4.0f64,
        t in -4.0..4.0f64,
    ) {
        prop_assume!(a.re.abs() > 0.2);
        let q = JordanParams { p, a, c1: [c1.0, c1.1], c2: [c2.0, c2.1] };
        let params = GbdtParameters::scalar_nonlocal(
            p,
            ComplexMatrix::from_rows(&[vec![a, c(1.0, 0.0)], vec![c(0.0, 0.0), a]]).unwrap(),
            ComplexMatrix::from_rows(&[vec![c1.0, c2.0], vec![c1.1, c2.1]]).unwrap(),
            None,
        );
        let Ok(params) = params else { return Ok(()) };
        let seed = SeedSolution::const_diag(BlockStructure::scalar(p), vec![c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        let sol = TransformedSolution::new(params, seed, SMode::SylvesterPointwise).unwrap();
        let (Ok(e), Ok((v, rho))) = (sol.point(x, t), jordan_fields(&q, x, t)) else { return Ok(()) };
        prop_assume!(e.indicator > 1e-6);
        let scale = 1f64.max(v.norm()).max(rho.norm());
        prop_assert!((e.v() - v).norm() / scale <= 1e-9);
        prop_assert!((e.rho() - rho).norm() / scale <= 1e-9);
    }

    #[test]
    fn local_identities_and_det_invariance(
        a in (0.2..1.5f64, -1.5..-0.2f64),
        c1 in cplx(2.0),
        c2 in cplx(2.0),
        pts in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 4),
        l in cplx(2.0),
    ) {
        let a = c(a.0, a.1);
        prop_assume!((l - a).norm() > 0.1 && l.norm() > 0.1);
        let params = GbdtParameters::local(
            BlockStructure::scalar(0),
            ComplexMatrix::scalar(1, a),
            ComplexMatrix::from_rows(&[vec![c1, c2]]).unwrap(),
            None,
        );
        let Ok(params) = params else { return Ok(()) };
        let seed = SeedSolution::const_diag(BlockStructure::scalar(0), vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let sol = TransformedSolution::new(params, seed, SMode::SylvesterPointwise).unwrap();
        let ev = DarbouxEvaluator::new(&sol);
        let mut d0 = None;
        for (x, t) in pts {
            let Ok(p) = sol.point(x, t) else { continue };
            let pr = sol.params();
            let lhs = &(&pr.a1 * &p.s) - &(&p.s * &pr.a2);
            let rhs = &p.pi1 * &p.pi2.adjoint();
            prop_assert!(rel(&lhs, &rhs) <= 1e-10);
            prop_assert!(rel(&p.r_tilde, &p.r_tilde.adjoint()) <= 1e-10);
            let d = det(&ev.darboux_at(&p, l).unwrap());
            match d0 {
                None => d0 = Some(d),
                Some(d0) => prop_assert!((d - d0).norm() <= 1e-9 * 1f64.max(d0.norm())),
            }
        }
    }
}

#[test]
fn case2_degenerates_to_case1() {
    let a = c(1.0 / 3.0, 0.2);
    let (c11, c22) = (3.0, 0.5);
    let one = Case1Params { p: 1, a, c11: c(c11, 0.0), c22: c(c22, 0.0) };
    let diff = |c12: f64, x: f64, t: f64| {
        let (v2, r2) = case2_fields(&Case2Params { a, c11, c12, c22 }, x, t).unwrap();
        let (v1, r1) = case1_fields(&one, x, t).unwrap();
        (v2 - v1).norm().max((r2 - r1).norm())
    };
    for (x, t) in [(0.3, -0.2), (1.5, 0.7), (-2.0, 1.1)] {
        let d4 = diff(1e-4, x, t);
        let d6 = diff(1e-6, x, t);
        assert!(d4 < 1e-2, "{d4}");
        let ratio = d4 / d6;
        assert!((50.0..=200.0).contains(&ratio), "ratio {ratio} at ({x}, {t})");
    }
}
