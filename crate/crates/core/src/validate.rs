//! Self-check suites behind `sqjc validate`.
//!
//! Each suite collects per-check failures instead of stopping at the first
//! one, so a report names every broken identity.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{
    abc_coefficients, bogoliubov, critical_coupling, jcm_gap, normal_phase_coeffs,
    superradiant_gap_generic, superradiant_gap_jcm, superradiant_gap_rabi,
    superradiant_pipeline_gap, v_standard, Branch, NormalPhaseCoeffs, QuadraticCoeffs,
};
use crate::error::Result;
use crate::fock::{
    annihilation, creation, herm_eigen, interior_block_distance, number, quadrature, Basis,
    FockSpace, OperatorMatrix,
};
use crate::models::{
    build_jcm, build_mjc, build_mjc_squeezed_form, build_rabi, coupling_for_rabi,
    displacement_operator, squeeze_operator, squeezed_annihilation, squeezed_creation, ModelParams,
    RabiParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    Quick,
    Full,
}

/// Injection points for mutation testing of the suites themselves.
#[derive(Clone, Copy)]
pub struct ValidationHooks {
    pub normal_phase: fn(&ModelParams) -> NormalPhaseCoeffs,
}

impl Default for ValidationHooks {
    fn default() -> Self {
        Self {
            normal_phase: normal_phase_coeffs,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    fn within(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.check(err <= tol, || {
            format!("{label}: got {got:e}, expected {want:e} (|diff| {err:e} > {tol:e})")
        });
    }

    fn record<T>(&mut self, label: &str, value: Result<T>) -> Option<T> {
        match value {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{label}: {e}"));
                None
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub suites: Vec<SuiteResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    /// 0 when every suite passes, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            3
        }
    }

    pub fn failed_suites(&self) -> Vec<&'static str> {
        self.suites
            .iter()
            .filter(|s| !s.passed())
            .map(|s| s.name)
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for suite in &self.suites {
            let tag = if suite.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} ({} checks)", suite.name, suite.checks)?;
            for note in &suite.notes {
                writeln!(f, "     {note}")?;
            }
            for failure in &suite.failures {
                writeln!(f, "     - {failure}")?;
            }
        }
        let verdict = if self.passed() {
            "all suites passed".to_string()
        } else {
            format!("failed: {}", self.failed_suites().join(", "))
        };
        write!(f, "{verdict}")
    }
}

pub fn run_validation(mode: ValidationMode, hooks: &ValidationHooks) -> ValidationReport {
    ValidationReport {
        mode,
        suites: vec![
            operator_identities(mode),
            identity_chain_one(mode, hooks),
            identity_chain_two(mode),
            identity_chain_three(mode),
            limit_reductions(),
        ],
    }
}

fn operator_identities(mode: ValidationMode) -> SuiteResult {
    let mut s = SuiteResult::new("operator identities");
    let cutoffs: &[usize] = match mode {
        ValidationMode::Quick => &[10, 50],
        ValidationMode::Full => &[10, 50, 120, 200],
    };
    for &n in cutoffs {
        let space = FockSpace::new(n);
        let comm = annihilation(space).commutator(&creation(space));
        let mut expected = vec![1.0; n + 1];
        expected[n] = -(n as f64);
        let target = OperatorMatrix::from_diagonal(Basis::Oscillator, &expected).expect("square");
        // entries are differences of products of size N; measured against that scale
        let dev = comm.max_abs_diff(&target) / n as f64;
        s.within(
            &format!("[a, a^dag] at N = {n}, relative to N"),
            dev,
            0.0,
            1e-14,
        );
    }

    let space = FockSpace::new(120);
    let k = 20;
    let a = annihilation(space);
    for r in [0.25, 0.5] {
        let Some(sq) = s.record("squeeze operator", squeeze_operator(space, r, 0.0)) else {
            continue;
        };
        let Some(closed) = s.record(
            "squeezed annihilation",
            squeezed_annihilation(space, r, 0.0),
        ) else {
            continue;
        };
        // S a S^dag = cosh r a + sinh r a^dag
        let conj = &(&sq * &a) * &sq.adjoint();
        if let Some(d) = s.record("block distance", interior_block_distance(&conj, &closed, k)) {
            s.within(&format!("S a S^dag, r = {r}, block {k}"), d, 0.0, 1e-6);
        }
        let b = closed;
        if let Some(bd) = s.record("squeezed creation", squeezed_creation(space, r, 0.0)) {
            let comm = b.commutator(&bd);
            let id = OperatorMatrix::identity(space, Basis::Oscillator);
            if let Some(d) = s.record("block distance", interior_block_distance(&comm, &id, k)) {
                s.within(&format!("[B, B^dag], r = {r}, block {k}"), d, 0.0, 1e-12);
            }
        }
    }
    s.notes.push(
        "squeeze conjugation is checked only up to r = 0.5; truncation at N = 120 breaks it near r = 0.7"
            .into(),
    );

    if let Some(d) = s.record("displacement", displacement_operator(space, 1.0)) {
        let id = OperatorMatrix::identity(space, Basis::Oscillator);
        s.within(
            "D^dag D = I",
            (&d.adjoint() * &d).max_abs_diff(&id),
            0.0,
            1e-10,
        );
    }
    s
}

fn relative(x: f64, y: f64, floor: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(floor)
}

fn identity_chain_one(mode: ValidationMode, hooks: &ValidationHooks) -> SuiteResult {
    let mut s = SuiteResult::new("identity chain I");
    let tuples = match mode {
        ValidationMode::Quick => 50,
        ValidationMode::Full => 200,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..tuples {
        let p = ModelParams::new(
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.0..5.0),
            rng.gen_range(0.0..2.0),
        )
        .expect("sampled in range");
        let direct = NormalPhaseCoeffs::from_quadratic(&abc_coefficients(&p, v_standard(&p)));
        let closed = (hooks.normal_phase)(&p);
        // relative to the bare frequencies when a combination passes through zero
        let floor = p.omega_c.min(p.omega_a);
        let pairs = [
            ("(2B - A)/2", closed.half_2b_minus_a, direct.half_2b_minus_a),
            ("A", closed.a, direct.a),
            ("A + 4C", closed.a_plus_4c, direct.a_plus_4c),
        ];
        for (label, c, d) in pairs {
            let rel = relative(c, d, floor);
            s.check(rel <= 1e-11, || {
                format!(
                    "{label} at (wc, wa, Omega, r) = ({:.6}, {:.6}, {:.6}, {:.6}): closed {c:e} vs direct {d:e}, rel {rel:e}",
                    p.omega_c, p.omega_a, p.coupling, p.squeeze
                )
            });
        }
    }
    s
}

fn identity_chain_two(mode: ValidationMode) -> SuiteResult {
    let mut s = SuiteResult::new("identity chain II");
    let space = FockSpace::new(200);
    let x = quadrature(space);
    let x2 = &x * &x;
    let n = number(space);
    let b = 0.3;
    let mut worst_half: f64 = 0.0;
    let mut worst_full: f64 = f64::INFINITY;
    for (a, c) in [(1.0, 0.0), (1.0, 0.5), (1.0, 2.0), (2.0, -0.25)] {
        let h = &n.scale(a).shift(b) + &x2.scale(c);
        let Some(eig) = s.record("eigensolver", herm_eigen(&h)) else {
            continue;
        };
        let Some(bog) = s.record(
            "bogoliubov",
            bogoliubov(&QuadraticCoeffs { a, b, c, v: 0.0 }),
        ) else {
            continue;
        };
        let e = &eig.values;
        for i in 0..3 {
            s.within(
                &format!("spacing {i}->{} for (A, C) = ({a}, {c})", i + 1),
                e[i + 1] - e[i],
                bog.gap,
                1e-6,
            );
        }
        s.within(
            &format!("ground energy for (A, C) = ({a}, {c})"),
            e[0],
            bog.ground_energy,
            1e-6,
        );
        worst_half = worst_half.max((e[0] - bog.ground_energy).abs());
        worst_full = worst_full.min((e[0] - (b - a / 2.0 + bog.gap)).abs());
    }
    if mode == ValidationMode::Full {
        s.check(worst_full > 1e-3, || {
            "a full-quantum zero-point constant also matched ED".into()
        });
        s.notes.push(format!(
            "ground constant = B \u{2212} A/2 + \u{3b5}/2 (not B \u{2212} A/2 + \u{3b5} + 1; \
             ED matches the 1/2 form to {worst_half:.1e} and misses the +1 form by at least {worst_full:.3})"
        ));
    }
    s
}

/// Rabi superradiant gap through the generic pipeline: tilt angle from the
/// equilibrium displacement, then `L = Omega_tilde / 2`, `M = lambda cos 2 theta`.
pub fn rabi_pipeline_gap(omega_c: f64, omega_a: f64, lambda: f64, alpha: f64) -> Result<f64> {
    let omega_tilde = (omega_a * omega_a + 16.0 * lambda * lambda * alpha * alpha).sqrt();
    let cos2 = omega_a / omega_tilde;
    let l = omega_tilde / 2.0;
    let m = lambda.abs() * cos2;
    superradiant_gap_generic(omega_c, l, m, -m / (2.0 * l))
}

fn identity_chain_three(mode: ValidationMode) -> SuiteResult {
    let mut s = SuiteResult::new("identity chain III");
    let points = match mode {
        ValidationMode::Quick => 20,
        ValidationMode::Full => 200,
    };
    let freqs = [(1.0, 1.0), (1.0, 20.0), (0.5, 3.0)];
    for &(wc, wa) in &freqs {
        let Some(crit) = s.record(
            "critical coupling",
            critical_coupling(Branch::CaseB, wc, wa, 0.0),
        ) else {
            continue;
        };
        for i in 1..=points {
            let x = 1.0 + 2.0 * i as f64 / points as f64;
            let om = x * crit.omega_crit;
            if let Some(closed) = s.record("jcm gap", superradiant_gap_jcm(wc, wa, om)) {
                let p = ModelParams::new(wc, wa, om, 0.0).expect("valid");
                if let Some(pipe) =
                    s.record("pipeline", superradiant_pipeline_gap(&p, closed.alpha))
                {
                    s.within(
                        &format!("JCM gap at Omega/Omega_c = {x:.3}, wa = {wa}"),
                        pipe,
                        closed.gap,
                        1e-12,
                    );
                }
            }
            if let Some(closed) = s.record("rabi gap", superradiant_gap_rabi(wc, wa, x)) {
                if let Some(pipe) = s.record(
                    "rabi pipeline",
                    rabi_pipeline_gap(wc, wa, closed.lambda, closed.alpha),
                ) {
                    s.within(
                        &format!("Rabi gap at g = {x:.3}, wa = {wa}"),
                        pipe,
                        closed.gap,
                        1e-12,
                    );
                }
            }
        }
    }
    s
}

fn limit_reductions() -> SuiteResult {
    let mut s = SuiteResult::new("limit reductions");
    let space = FockSpace::new(30);

    let p = ModelParams::new(1.0, 1.3, 0.7, 0.0).expect("valid");
    if let (Some(mjc), Some(jcm)) = (
        s.record("build_mjc", build_mjc(&p, space)),
        s.record("build_jcm", build_jcm(&p, space)),
    ) {
        let dev = mjc.max_abs_diff(&jcm);
        s.check(dev == 0.0, || {
            format!("MJC(r = 0) differs from JCM by {dev:e}")
        });
    }

    let p = ModelParams::new(1.0, 1.3, 0.7, 0.8).expect("valid");
    if let (Some(h10), Some(h6)) = (
        s.record("build_mjc", build_mjc(&p, space)),
        s.record("squeezed form", build_mjc_squeezed_form(&p, space)),
    ) {
        s.within(
            "bare-photon vs squeezed-photon form",
            h10.max_abs_diff(&h6),
            0.0,
            1e-13,
        );
    }

    let rabi = RabiParams::new(1.0, 1.0, -0.4).expect("valid");
    if let Some(h_rm) = s.record("build_rabi", build_rabi(&rabi, space)) {
        let mut last = f64::INFINITY;
        for r in [2.0, 3.0, 4.0] {
            let p =
                ModelParams::new(1.0, 1.0, coupling_for_rabi(rabi.lambda, r), r).expect("valid");
            if let Some(h) = s.record("build_mjc", build_mjc(&p, space)) {
                let dev = h.max_abs_diff(&h_rm);
                let bound = 2.0 * (-2.0 * r).exp() * h_rm.max_abs();
                s.check(dev <= bound && dev < last, || {
                    format!("Rabi limit at r = {r}: deviation {dev:e}, bound {bound:e}, previous {last:e}")
                });
                last = dev;
            }
        }
    }

    for (wc, wa) in [(1.0, 1.0), (1.0, 20.0)] {
        let a = critical_coupling(Branch::CaseA, wc, wa, 0.0).map(|c| c.omega_crit);
        let b = critical_coupling(Branch::CaseB, wc, wa, 0.0).map(|c| c.omega_crit);
        if let (Some(a), Some(b)) = (s.record("case A", a), s.record("case B", b)) {
            let want = 2.0 * (wc * (wa + wc)).sqrt();
            s.check(a == b && b == want, || {
                format!("critical couplings at r = 0: case A {a}, case B {b}, expected {want}")
            });
        }
    }

    let p = ModelParams::new(1.0, 1.0, 2.0, 0.0).expect("valid");
    if let Some(j) = s.record("jcm gap", jcm_gap(&p)) {
        if let Some(g) = s.record("normal-phase gap", normal_phase_coeffs(&p).gap()) {
            s.within("JCM gap vs normal-phase combination", j.gap, g, 1e-13);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flipped(p: &ModelParams) -> NormalPhaseCoeffs {
        let mut c = normal_phase_coeffs(p);
        // wrong sign on the coupling term of A + 4C
        c.a_plus_4c = 2.0 * p.omega_c - c.a_plus_4c;
        c
    }

    #[test]
    fn quick_mode_passes() {
        let report = run_validation(ValidationMode::Quick, &ValidationHooks::default());
        assert!(report.passed(), "{report}");
        assert_eq!(report.exit_code(), 0);
        assert_eq!(report.suites.len(), 5);
    }

    #[test]
    fn perturbed_chain_one_is_caught() {
        let hooks = ValidationHooks {
            normal_phase: flipped,
        };
        let report = run_validation(ValidationMode::Quick, &hooks);
        assert_eq!(report.exit_code(), 3);
        assert_eq!(report.failed_suites(), vec!["identity chain I"]);
        assert!(report.to_string().contains("FAIL identity chain I"));
    }

    #[test]
    fn rabi_pipeline_matches_closed_form() {
        let s = superradiant_gap_rabi(1.0, 2.0, 2f64.sqrt()).unwrap();
        let pipe = rabi_pipeline_gap(1.0, 2.0, s.lambda, s.alpha).unwrap();
        assert!((pipe - 0.75f64.sqrt()).abs() < 1e-12);
    }
}
