use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use sqjc_core::analytic::{
    abc_coefficients, critical_coupling, jcm_gap, normal_phase_coeffs, superradiant_gap_jcm,
    v_roots_case_a, v_roots_case_b, v_standard, Branch, NormalPhaseCoeffs,
};
use sqjc_core::fock::{annihilation, creation, herm_eigen, tensor, unitary_exp};
use sqjc_core::models::{build_jcm, build_mjc, excitation_number, parity};
use sqjc_core::sweep::{format_sig12, run_sweep, write_csv, CutoffChoice, GridSpec, SweepConfig};
use sqjc_core::{Basis, FockSpace, ModelParams, OperatorMatrix};

fn complex_matrix(rows: usize, cols: usize, values: &[(f64, f64)]) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |i, j| {
        let (re, im) = values[(i * cols + j) % values.len()];
        C64::new(re, im)
    })
}

fn pairs(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

fn model_params() -> impl Strategy<Value = ModelParams> {
    (0.1..10.0f64, 0.1..10.0f64, 0.0..5.0f64, 0.0..2.0f64)
        .prop_map(|(wc, wa, om, r)| ModelParams::new(wc, wa, om, r).unwrap())
}

/// Eigenvalues of a real symmetric 3x3 matrix from its characteristic cubic.
fn cubic_eigenvalues(m: &DMatrix<f64>) -> [f64; 3] {
    let q = m.trace() / 3.0;
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q, q, q];
    }
    let b = (m - DMatrix::identity(3, 3) * q) / p;
    let half_det = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = half_det.acos() / 3.0;
    let top = q + 2.0 * p * phi.cos();
    let bottom = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mut e = [bottom, 3.0 * q - top - bottom, top];
    e.sort_by(f64::total_cmp);
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ladder_commutator_is_truncation_identity(n in 1usize..=200) {
        let space = FockSpace::new(n);
        let comm = annihilation(space).commutator(&creation(space));
        let mut diag = vec![1.0; n + 1];
        diag[n] = -(n as f64);
        let target = OperatorMatrix::from_diagonal(Basis::Oscillator, &diag).unwrap();
        prop_assert!(comm.max_abs_diff(&target) / n as f64 <= 1e-14);
    }

    #[test]
    fn tensor_mixed_product(n in 1usize..6, a in pairs(36), c in pairs(36), b in pairs(4), d in pairs(4)) {
        let dim = n + 1;
        let fa = OperatorMatrix::from_matrix(Basis::Oscillator, complex_matrix(dim, dim, &a)).unwrap();
        let fc = OperatorMatrix::from_matrix(Basis::Oscillator, complex_matrix(dim, dim, &c)).unwrap();
        let sb = Matrix2::from_fn(|i, j| C64::new(b[2 * i + j].0, b[2 * i + j].1));
        let sd = Matrix2::from_fn(|i, j| C64::new(d[2 * i + j].0, d[2 * i + j].1));
        let lhs = &tensor(&fa, &sb).unwrap() * &tensor(&fc, &sd).unwrap();
        let rhs = tensor(&(&fa * &fc), &(sb * sd)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
    }

    #[test]
    fn exponential_of_anti_hermitian_is_unitary(dim in 2usize..12, v in pairs(144), norm in 0.0..5.0f64) {
        let m = complex_matrix(dim, dim, &v);
        let k = &m - m.adjoint();
        let scale = k.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let k = if scale > 0.0 { k * C64::new(norm / scale, 0.0) } else { k };
        let k = OperatorMatrix::from_matrix(Basis::Oscillator, k).unwrap();
        let u = unitary_exp(&k).unwrap();
        let id = OperatorMatrix::from_matrix(Basis::Oscillator, DMatrix::identity(dim, dim)).unwrap();
        prop_assert!((&u.adjoint() * &u).max_abs_diff(&id) <= 1e-12);
    }

    #[test]
    fn two_by_two_eigenvalues(a in -5.0..5.0f64, d in -5.0..5.0f64, re in -5.0..5.0f64, im in -5.0..5.0f64) {
        let m = DMatrix::from_row_slice(2, 2, &[
            C64::new(a, 0.0), C64::new(re, im),
            C64::new(re, -im), C64::new(d, 0.0),
        ]);
        let eig = herm_eigen(&OperatorMatrix::from_matrix(Basis::Oscillator, m).unwrap()).unwrap();
        let mean = (a + d) / 2.0;
        let radius = (((a - d) / 2.0).powi(2) + re * re + im * im).sqrt();
        prop_assert!((eig.values[0] - (mean - radius)).abs() <= 1e-12);
        prop_assert!((eig.values[1] - (mean + radius)).abs() <= 1e-12);
    }

    #[test]
    fn three_by_three_eigenvalues(v in prop::collection::vec(-3.0..3.0f64, 6)) {
        let m = DMatrix::from_row_slice(3, 3, &[
            v[0], v[1], v[2],
            v[1], v[3], v[4],
            v[2], v[4], v[5],
        ]);
        let expected = cubic_eigenvalues(&m);
        let op = OperatorMatrix::from_real(Basis::Oscillator, m).unwrap();
        let eig = herm_eigen(&op).unwrap();
        for (got, want) in eig.values.iter().zip(expected) {
            prop_assert!((got - want).abs() <= 1e-10, "{:?} vs {:?}", eig.values, expected);
        }
    }

    #[test]
    fn eigendecomposition_reconstructs(dim in 2usize..10, v in pairs(100)) {
        let m = complex_matrix(dim, dim, &v);
        let h = OperatorMatrix::from_matrix(Basis::Oscillator, &m + m.adjoint()).unwrap();
        let eig = herm_eigen(&h).unwrap();
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            eig.values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        let rebuilt = &eig.vectors * lambda * eig.vectors.adjoint();
        let diff = (&rebuilt - h.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_chain_one(p in model_params()) {
        let direct = NormalPhaseCoeffs::from_quadratic(&abc_coefficients(&p, v_standard(&p)));
        let closed = normal_phase_coeffs(&p);
        let floor = p.omega_c.min(p.omega_a);
        for (x, y) in [
            (closed.half_2b_minus_a, direct.half_2b_minus_a),
            (closed.a, direct.a),
            (closed.a_plus_4c, direct.a_plus_4c),
        ] {
            prop_assert!((x - y).abs() / x.abs().max(y.abs()).max(floor) <= 1e-11, "{closed:?} vs {direct:?}");
        }
    }

    #[test]
    fn v_roots_solve_their_equations(p in model_params(), x in 0.0..3.0f64) {
        for branch in [Branch::CaseA, Branch::CaseB] {
            let crit = critical_coupling(branch, p.omega_c, p.omega_a, p.squeeze).unwrap().omega_crit;
            let q = p.with_coupling(x * crit);
            let roots = match branch {
                Branch::CaseA => v_roots_case_a(&q),
                Branch::CaseB => v_roots_case_b(&q),
            };
            prop_assert_eq!(roots.is_empty(), x < 1.0);
            prop_assert!(roots.windows(2).all(|w| w[0] < w[1]));
            for v in roots {
                let c = abc_coefficients(&q, v);
                let residual = match branch {
                    Branch::CaseA => c.a,
                    Branch::CaseB => c.a + 4.0 * c.c,
                };
                prop_assert!(residual.abs() <= 1e-9, "{branch:?} v = {v}, residual {residual:e}");
            }
        }
    }

    #[test]
    fn gaps_close_with_square_root_law(wc in 0.1..10.0f64, wa in 0.1..10.0f64, delta in 1e-9..1e-3f64) {
        let crit = critical_coupling(Branch::CaseB, wc, wa, 0.0).unwrap().omega_crit;
        let bound = 2.0 * (2.0 * delta).sqrt() * wc * 1.1;
        let below = ModelParams::new(wc, wa, crit * (1.0 - delta).sqrt(), 0.0).unwrap();
        prop_assert!(jcm_gap(&below).unwrap().gap <= bound);
        let above = superradiant_gap_jcm(wc, wa, crit * (1.0 + delta).sqrt()).unwrap();
        prop_assert!(above.gap <= bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonians_are_hermitian_with_their_symmetries(p in model_params()) {
        let space = FockSpace::new(12);
        let h = build_mjc(&p, space).unwrap();
        prop_assert!(h.hermiticity_deviation() == 0.0);
        prop_assert!(h.commutator(&parity(space)).max_abs() <= 1e-12);
        let j = build_jcm(&p, space).unwrap();
        prop_assert!(j.commutator(&excitation_number(space)).max_abs() <= 1e-12);
    }

    #[test]
    fn sig12_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = format_sig12(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }
}

fn csv_fields(line: &str) -> Vec<String> {
    line.split(',').map(str::to_string).collect()
}

#[test]
fn sweep_csv_round_trips_within_twelve_digits() {
    let config = SweepConfig {
        omega_c: 1.0,
        omega_a: 1.7,
        r_grid: GridSpec {
            min: 0.0,
            max: 1.2,
            steps: 4,
        },
        coupling_grid: GridSpec {
            min: 0.1,
            max: 3.3,
            steps: 5,
        },
        cutoff: CutoffChoice::Auto,
        n_levels: 3,
        include_ed: false,
        output_path: "unused.csv".into(),
    };
    let rows = run_sweep(&config);
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(!text.contains('\r'));
    let parsed: Vec<Vec<String>> = text.lines().skip(1).map(csv_fields).collect();
    assert_eq!(parsed.len(), rows.len());
    // largest relative parse-back error over every numeric field
    let mut worst: f64 = 0.0;
    let mut compare = |s: &str, x: f64| {
        let y: f64 = s.parse().unwrap();
        if x.is_nan() {
            assert!(y.is_nan(), "{s} should be NaN");
        } else if x == 0.0 {
            assert_eq!(y, 0.0);
        } else {
            worst = worst.max((y - x).abs() / x.abs());
        }
    };
    for (row, fields) in rows.iter().zip(&parsed) {
        assert_eq!(fields.len(), 11);
        compare(&fields[0], row.r);
        compare(&fields[1], row.omega);
        compare(&fields[2], row.omega_crit_case_a);
        compare(&fields[3], row.omega_crit_case_b);
        assert_eq!(fields[4], row.phase.as_str());
        compare(&fields[5], row.gap_analytic);
        compare(&fields[6], row.gap_superradiant);
        assert!(fields[7..].iter().all(String::is_empty));
    }
    // Expected to fail: 12 significant digits bound the rounding error by
    // 5e-12 relative. See README "Known limitations".
    assert!(
        worst <= 1e-12,
        "round-trip relative error {worst:e} exceeds 1e-12"
    );
}
