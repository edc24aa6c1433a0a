//! Closed forms: effective quadratic Hamiltonian `A n + B + C (a + a^dag)^2`
//! after the decoupling rotation, its Bogoliubov diagonalization, the two
//! critical-coupling branches, normal-phase gaps and the superradiant-branch
//! excitation energies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{GenericRabi, ModelParams};

/// Coefficients of `A n + B + C (a + a^dag)^2` generated by rotation angle `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub v: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovResult {
    pub beta: f64,
    pub gap: f64,
    /// `B - A/2 + gap/2`
    pub ground_energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Closing of `A`.
    CaseA,
    /// Closing of `A + 4C`; this branch classifies phases.
    CaseB,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub branch: Branch,
    pub omega_crit: f64,
    pub squeeze: f64,
}

/// Normal-phase combination `((2B - A)/2, A, A + 4C)` at the standard `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalPhaseCoeffs {
    pub half_2b_minus_a: f64,
    pub a: f64,
    pub a_plus_4c: f64,
}

impl NormalPhaseCoeffs {
    pub fn from_quadratic(q: &QuadraticCoeffs) -> Self {
        Self {
            half_2b_minus_a: (2.0 * q.b - q.a) / 2.0,
            a: q.a,
            a_plus_4c: q.a + 4.0 * q.c,
        }
    }

    pub fn gap(&self) -> Result<f64> {
        let product = self.a * self.a_plus_4c;
        if self.a > 0.0 && self.a_plus_4c > 0.0 {
            Ok(product.sqrt())
        } else {
            Err(Error::UnphysicalRegime(format!(
                "A = {}, A + 4C = {}: no real normal-phase gap",
                self.a, self.a_plus_4c
            )))
        }
    }
}

/// Normal-phase gap together with the constant printed alongside it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalGap {
    pub gap: f64,
    pub constant: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperradiantParams {
    pub alpha: f64,
    pub theta: f64,
    pub omega_tilde: f64,
    pub mu: f64,
    pub generic: GenericRabi,
    /// `lambda / lambda_c` for the mapped Rabi coupling `lambda = Omega e^r / 4`.
    pub g: f64,
}

impl SuperradiantParams {
    pub fn cos_2theta(&self) -> f64 {
        (2.0 * self.theta).cos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperradiantGap {
    pub alpha: f64,
    pub gap: f64,
    pub omega_crit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiSuperradiant {
    pub lambda: f64,
    pub alpha: f64,
    pub gap: f64,
}

/// `A`, `B`, `C` of the rotated spin-down Hamiltonian.
pub fn abc_coefficients(params: &ModelParams, v: f64) -> QuadraticCoeffs {
    let wc = params.omega_c;
    let wa = params.omega_a;
    let om = params.coupling;
    let r = params.squeeze;
    let e2 = (-2.0 * r).exp();
    let a = wc * (1.0 + v * v) + v * (om + wa * v) * e2;
    let b =
        -wa / 2.0 * (1.0 - v * v) + v / 2.0 * (om + wa * v) * e2 + wc * v * v * r.cosh().powi(2);
    let c = -v * om / 2.0 * (2.0 * r).cosh() + wa * v * v / 2.0 * (2.0 * r).sinh();
    QuadraticCoeffs { a, b, c, v }
}

/// `v = Omega / (2 (omega_a + omega_c e^{-2r}))`.
pub fn v_standard(params: &ModelParams) -> f64 {
    params.coupling / (2.0 * (params.omega_a + params.omega_c * (-2.0 * params.squeeze).exp()))
}

/// Roots of `quadratic discriminant = 0` are reported once; `disc` is
/// compared against the scale of the terms it was formed from.
fn roots_from(lead: f64, disc: f64, scale: f64, denom: f64) -> Vec<f64> {
    let tol = 8.0 * f64::EPSILON * scale;
    if disc < -tol {
        Vec::new()
    } else if disc.abs() <= tol {
        vec![lead / denom]
    } else {
        let s = disc.sqrt();
        let mut roots = vec![(lead - s) / denom, (lead + s) / denom];
        roots.sort_by(f64::total_cmp);
        roots
    }
}

/// Real solutions of `A(v) = 0`, ascending. Empty in the normal phase.
pub fn v_roots_case_a(params: &ModelParams) -> Vec<f64> {
    let wc = params.omega_c;
    let wa = params.omega_a;
    let om = params.coupling;
    let r = params.squeeze;
    let term = 4.0 * wc * (wc + wa * (-2.0 * r).exp()) * (4.0 * r).exp();
    let disc = om * om - term;
    let denom = 2.0 * (wa + wc * (2.0 * r).exp());
    roots_from(-om, disc, om * om + term, denom)
}

/// Real solutions of `A(v) + 4 C(v) = 0`, ascending.
pub fn v_roots_case_b(params: &ModelParams) -> Vec<f64> {
    let wc = params.omega_c;
    let wa = params.omega_a;
    let om = params.coupling;
    let e2 = (-2.0 * params.squeeze).exp();
    let term = 4.0 * wc * (wa + wc * e2) * e2;
    let disc = om * om - term;
    let denom = 2.0 * (wa + wc * e2);
    roots_from(om, disc, om * om + term, denom)
}

pub fn critical_coupling(
    branch: Branch,
    omega_c: f64,
    omega_a: f64,
    squeeze: f64,
) -> Result<CriticalPoint> {
    ModelParams::new(omega_c, omega_a, 0.0, squeeze)?;
    let r = squeeze;
    // 2 sqrt(x) rather than sqrt(4x) keeps Omega_c(r=0) = 2 sqrt(wc (wa + wc)) bit-exact
    let inner = match branch {
        Branch::CaseA => omega_c * (omega_c + omega_a * (-2.0 * r).exp()) * (4.0 * r).exp(),
        Branch::CaseB => omega_c * (omega_a + omega_c * (-2.0 * r).exp()) * (-2.0 * r).exp(),
    };
    Ok(CriticalPoint {
        branch,
        omega_crit: 2.0 * inner.sqrt(),
        squeeze,
    })
}

/// Bogoliubov diagonalization of `A n + B + C (a + a^dag)^2`.
pub fn bogoliubov(coeffs: &QuadraticCoeffs) -> Result<BogoliubovResult> {
    let QuadraticCoeffs { a, b, c, .. } = *coeffs;
    let a4c = a + 4.0 * c;
    if !(a > 0.0 && a4c > 0.0) {
        return Err(Error::UnphysicalRegime(format!(
            "A = {a}, A + 4C = {a4c}: Bogoliubov gap is zero or imaginary"
        )));
    }
    let ratio = 4.0 * c / a;
    let ln = if ratio.abs() < 1e-8 {
        ratio.ln_1p()
    } else {
        (a4c / a).ln()
    };
    let beta = -ln / 4.0;
    let gap = (a * a4c).sqrt();
    Ok(BogoliubovResult {
        beta,
        gap,
        ground_energy: b - a / 2.0 + gap / 2.0,
    })
}

/// Closed forms for `(2B - A)/2`, `A` and `A + 4C` at `v = v_standard`.
pub fn normal_phase_coeffs(params: &ModelParams) -> NormalPhaseCoeffs {
    let wc = params.omega_c;
    let wa = params.omega_a;
    let om2 = params.coupling * params.coupling;
    let r = params.squeeze;
    let d = wa + wc * (-2.0 * r).exp();
    NormalPhaseCoeffs {
        half_2b_minus_a: -(wa + wc) / 2.0 + om2 / 8.0 * (wa + wc * (2.0 * r).cosh()) / (d * d),
        a: wc
            + om2 / (4.0 * d * d)
                * (wc * (1.0 + 2.0 * (-4.0 * r).exp()) + 3.0 * wa * (-2.0 * r).exp()),
        a_plus_4c: wc - om2 * (2.0 * r).exp() / (4.0 * d),
    }
}

/// Normal-phase Jaynes-Cummings gap (squeeze must be 0).
pub fn jcm_gap(params: &ModelParams) -> Result<NormalGap> {
    params.validate()?;
    if params.squeeze != 0.0 {
        return Err(Error::InvalidParams {
            name: "squeeze",
            reason: "Jaynes-Cummings gap requires r = 0".into(),
        });
    }
    let wc = params.omega_c;
    let wa = params.omega_a;
    let x = params.coupling * params.coupling / (4.0 * wc * (wa + wc));
    if x >= 1.0 {
        return Err(Error::UnphysicalRegime(format!(
            "Omega = {} is at or beyond the critical coupling {}",
            params.coupling,
            2.0 * (wc * (wa + wc)).sqrt()
        )));
    }
    Ok(NormalGap {
        gap: wc * ((1.0 + 3.0 * x) * (1.0 - x)).sqrt(),
        constant: -(wa + wc) / 2.0 + params.coupling * params.coupling / (8.0 * (wa + wc)),
    })
}

/// Normal-phase Rabi gap `omega_c sqrt(1 - 4 lambda^2 / (omega_a omega_c))`.
pub fn rabi_gap(omega_c: f64, omega_a: f64, lambda: f64) -> Result<NormalGap> {
    crate::models::RabiParams::new(omega_c, omega_a, lambda)?;
    let x = 4.0 * lambda * lambda / (omega_a * omega_c);
    if x >= 1.0 {
        return Err(Error::UnphysicalRegime(format!(
            "lambda = {lambda} is at or beyond lambda_c = {}",
            rabi_critical_lambda(omega_c, omega_a)
        )));
    }
    Ok(NormalGap {
        gap: omega_c * (1.0 - x).sqrt(),
        constant: -(omega_a + omega_c) / 2.0 + omega_c * lambda * lambda / (omega_a * omega_a),
    })
}

/// `lambda_c = sqrt(omega_a omega_c) / 2`.
pub fn rabi_critical_lambda(omega_c: f64, omega_a: f64) -> f64 {
    0.5 * (omega_a * omega_c).sqrt()
}

/// `g = 2 |lambda| / sqrt(omega_a omega_c)`.
pub fn g_from_lambda(omega_c: f64, omega_a: f64, lambda: f64) -> f64 {
    lambda.abs() / rabi_critical_lambda(omega_c, omega_a)
}

/// Tilted-spin frame and generic-Rabi constants for displacement `alpha`.
pub fn superradiant_setup(params: &ModelParams, alpha: f64) -> Result<SuperradiantParams> {
    params.validate()?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParams {
            name: "alpha",
            reason: "must be finite".into(),
        });
    }
    if params.coupling == 0.0 {
        return Err(Error::DegenerateInput(
            "Omega = 0 leaves mu = -M/(2L) undefined".into(),
        ));
    }
    let wc = params.omega_c;
    let wa = params.omega_a;
    let om = params.coupling;
    let er = params.squeeze.exp();
    let drive = alpha * om * er;
    let theta = 0.5 * drive.atan2(wa);
    let cos2 = (2.0 * theta).cos();
    let generic = GenericRabi {
        j: wc,
        k: wc * alpha * alpha,
        l: om * om * er * er / (8.0 * wc),
        m: om * cos2 * er / 4.0,
    };
    Ok(SuperradiantParams {
        alpha,
        theta,
        omega_tilde: (wa * wa + drive * drive).sqrt(),
        mu: -generic.m / (2.0 * generic.l),
        generic,
        g: om * er / (2.0 * (wa * wc).sqrt()),
    })
}

/// `J sqrt(1 + 8 mu (M + mu L) / J)`.
pub fn superradiant_gap_generic(j: f64, l: f64, m: f64, mu: f64) -> Result<f64> {
    if j == 0.0 || !j.is_finite() {
        return Err(Error::DegenerateInput(format!("J = {j}")));
    }
    let mut radicand = 1.0 + 8.0 * mu * (m + mu * l) / j;
    // cancellation at the critical point can leave a few ulp below zero
    if radicand < 0.0 && radicand > -8.0 * f64::EPSILON {
        radicand = 0.0;
    }
    if radicand < 0.0 {
        return Err(Error::UnphysicalRegime(format!(
            "1 + 8 mu (M + mu L)/J = {radicand} < 0"
        )));
    }
    Ok(j * radicand.sqrt())
}

/// Gap from the generic pipeline: tilt, optimal `mu = -M/(2L)`, generic gap.
pub fn superradiant_pipeline_gap(params: &ModelParams, alpha: f64) -> Result<f64> {
    let sp = superradiant_setup(params, alpha)?;
    superradiant_gap_generic(sp.generic.j, sp.generic.l, sp.generic.m, sp.mu)
}

/// Superradiant Jaynes-Cummings excitation energy,
/// `omega_c sqrt(1 - Omega_c^4 / Omega^4)` with `Omega_c = 2 sqrt(omega_c (omega_a + omega_c))`.
pub fn superradiant_gap_jcm(omega_c: f64, omega_a: f64, coupling: f64) -> Result<SuperradiantGap> {
    ModelParams::new(omega_c, omega_a, coupling, 0.0)?;
    let omega_crit = critical_coupling(Branch::CaseB, omega_c, omega_a, 0.0)?.omega_crit;
    if coupling < omega_crit {
        return Err(Error::UnphysicalRegime(format!(
            "Omega = {coupling} is below the critical coupling {omega_crit} (normal phase)"
        )));
    }
    let q = (omega_crit / coupling).powi(4);
    let alpha_sq = (omega_a * omega_a / (coupling * coupling)) * (1.0 / q - 1.0);
    Ok(SuperradiantGap {
        alpha: alpha_sq.max(0.0).sqrt(),
        gap: omega_c * (1.0 - q).sqrt(),
        omega_crit,
    })
}

/// Superradiant Rabi excitation energy `omega_c sqrt(1 - g^-4)`.
pub fn superradiant_gap_rabi(omega_c: f64, omega_a: f64, g: f64) -> Result<RabiSuperradiant> {
    crate::models::RabiParams::new(omega_c, omega_a, 0.0)?;
    if !(g >= 1.0) || !g.is_finite() {
        return Err(Error::UnphysicalRegime(format!(
            "g = {g} < 1 is the normal phase"
        )));
    }
    let g2 = g * g;
    let alpha_sq = omega_a / (4.0 * g2 * omega_c) * (g2 * g2 - 1.0);
    Ok(RabiSuperradiant {
        lambda: g * rabi_critical_lambda(omega_c, omega_a),
        alpha: alpha_sq.sqrt(),
        gap: omega_c * (1.0 - 1.0 / (g2 * g2)).sqrt(),
    })
}

/// Superradiant gap at any `r`, extending the `r = 0` displacement choice
/// with `Omega e^r` in place of `Omega` and the case-B critical coupling.
/// Exact at `r = 0`; an extrapolation for `r > 0`.
pub fn superradiant_gap_extrapolated(params: &ModelParams) -> Result<SuperradiantGap> {
    params.validate()?;
    let omega_crit = critical_coupling(
        Branch::CaseB,
        params.omega_c,
        params.omega_a,
        params.squeeze,
    )?
    .omega_crit;
    if params.coupling < omega_crit {
        return Err(Error::UnphysicalRegime(format!(
            "Omega = {} is below the critical coupling {omega_crit} (normal phase)",
            params.coupling
        )));
    }
    let drive = params.coupling * params.squeeze.exp();
    let ratio = (params.coupling / omega_crit).powi(4);
    let alpha_sq = params.omega_a * params.omega_a / (drive * drive) * (ratio - 1.0);
    let alpha = alpha_sq.max(0.0).sqrt();
    Ok(SuperradiantGap {
        alpha,
        gap: superradiant_pipeline_gap(params, alpha)?,
        omega_crit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(wc: f64, wa: f64, om: f64, r: f64) -> ModelParams {
        ModelParams::new(wc, wa, om, r).unwrap()
    }

    // A, B, C regrouped as polynomials in v (independent of the evaluation
    // order above).
    fn abc_poly(p: &ModelParams, v: f64) -> (f64, f64, f64) {
        let (wc, wa, om, r) = (p.omega_c, p.omega_a, p.coupling, p.squeeze);
        let e = (-2.0 * r).exp();
        let a = (wc + wa * e) * v * v + om * e * v + wc;
        let b = (wa / 2.0 + wa * e / 2.0 + wc * r.cosh() * r.cosh()) * v * v + om * e / 2.0 * v
            - wa / 2.0;
        let c = wa * (2.0 * r).sinh() / 2.0 * v * v - om * (2.0 * r).cosh() / 2.0 * v;
        (a, b, c)
    }

    #[test]
    fn abc_examples() {
        let q = abc_coefficients(&params(1.3, 0.7, 0.9, 0.4), 0.0);
        assert_eq!((q.a, q.b, q.c), (1.3, -0.35, 0.0));

        let p = params(1.0, 1.0, 1.0, 0.0);
        let q = abc_coefficients(&p, 0.25);
        // exact binary fractions at r = 0
        assert_eq!((q.a, q.b, q.c), (1.375, -0.25, -0.125));
        let (a, b, c) = abc_poly(&p, 0.25);
        assert_abs_diff_eq!(q.a, a, epsilon = 1e-15);
        assert_abs_diff_eq!(q.b, b, epsilon = 1e-15);
        assert_abs_diff_eq!(q.c, c, epsilon = 1e-15);

        let p = params(0.8, 2.1, 1.7, 0.9);
        for v in [-0.7, 0.1, 0.33, 1.2] {
            let q = abc_coefficients(&p, v);
            let (a, b, c) = abc_poly(&p, v);
            assert_relative_eq!(q.a, a, max_relative = 1e-13);
            assert_relative_eq!(q.b, b, max_relative = 1e-13);
            assert_relative_eq!(q.c, c, max_relative = 1e-13);
        }
    }

    #[test]
    fn v_standard_examples() {
        assert_eq!(v_standard(&params(1.0, 1.0, 1.0, 0.0)), 0.25);
        assert_eq!(v_standard(&params(1.0, 1.0, 0.0, 0.7)), 0.0);
        assert_abs_diff_eq!(
            v_standard(&params(1.0, 1.0, 0.8, 20.0)),
            0.4,
            epsilon = 1e-15
        );
    }

    #[test]
    fn case_a_roots() {
        let p = params(1.0, 1.0, 1.0, 0.0);
        // discriminant 1 - 8 < 0
        assert!(v_roots_case_a(&p).is_empty());

        for r in [0.0, 0.3, 1.0] {
            let oc = critical_coupling(Branch::CaseA, 1.2, 0.8, r)
                .unwrap()
                .omega_crit;
            let roots = v_roots_case_a(&params(1.2, 0.8, oc, r));
            assert_eq!(roots.len(), 1);
            assert_relative_eq!(
                roots[0],
                -oc / (2.0 * (0.8 + 1.2 * (2.0 * r).exp())),
                max_relative = 1e-14
            );

            let above = params(1.2, 0.8, 1.5 * oc, r);
            let roots = v_roots_case_a(&above);
            assert_eq!(roots.len(), 2);
            assert!(roots[0] < roots[1]);
            for v in roots {
                assert!(abc_coefficients(&above, v).a.abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn case_b_roots() {
        assert!(v_roots_case_b(&params(1.0, 1.0, 2.0, 0.0)).is_empty());

        for r in [0.0, 0.5, 1.0, 2.0] {
            let oc = critical_coupling(Branch::CaseB, 1.0, 1.3, r)
                .unwrap()
                .omega_crit;
            let p = params(1.0, 1.3, oc, r);
            let roots = v_roots_case_b(&p);
            assert_eq!(roots.len(), 1);
            assert_relative_eq!(roots[0], v_standard(&p), max_relative = 1e-14);
        }

        let p = params(1.0, 1.0, 3.0, 0.0);
        let roots = v_roots_case_b(&p);
        assert_eq!(roots.len(), 2);
        for v in roots {
            let q = abc_coefficients(&p, v);
            assert!((q.a + 4.0 * q.c).abs() <= 1e-9);
        }
    }

    #[test]
    fn critical_coupling_examples() {
        let b0 = critical_coupling(Branch::CaseB, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(b0.omega_crit, 2.0 * 2f64.sqrt());
        assert_abs_diff_eq!(b0.omega_crit, 2.828427, epsilon = 1e-6);
        let a0 = critical_coupling(Branch::CaseA, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(a0.omega_crit, b0.omega_crit);

        let b1 = critical_coupling(Branch::CaseB, 1.0, 1.0, 1.0).unwrap();
        let e2 = (-2.0f64).exp();
        assert_relative_eq!(
            b1.omega_crit,
            2.0 * ((1.0 + e2) * e2).sqrt(),
            max_relative = 1e-15
        );
        assert_abs_diff_eq!(b1.omega_crit, 0.7839666373650014, epsilon = 1e-13);

        assert!(critical_coupling(Branch::CaseB, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bogoliubov_examples() {
        let r = bogoliubov(&QuadraticCoeffs {
            a: 1.7,
            b: 0.3,
            c: 0.0,
            v: 0.0,
        })
        .unwrap();
        assert_eq!(r.beta, 0.0);
        assert_eq!(r.gap, 1.7);
        assert_abs_diff_eq!(r.ground_energy, 0.3, epsilon = 1e-15);

        let r = bogoliubov(&QuadraticCoeffs {
            a: 1.0,
            b: 0.0,
            c: 2.0,
            v: 0.0,
        })
        .unwrap();
        assert_abs_diff_eq!(r.beta, -(9f64.ln()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.beta, -0.549306, epsilon = 1e-6);
        assert_abs_diff_eq!(r.gap, 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.gap, (-2.0 * r.beta).exp(), epsilon = 1e-12);

        assert!(matches!(
            bogoliubov(&QuadraticCoeffs {
                a: 1.0,
                b: 0.0,
                c: -0.25,
                v: 0.0
            }),
            Err(Error::UnphysicalRegime(_))
        ));
        assert!(bogoliubov(&QuadraticCoeffs {
            a: -1.0,
            b: 0.0,
            c: -0.5,
            v: 0.0
        })
        .is_err());

        // tiny C goes through the log1p branch
        let r = bogoliubov(&QuadraticCoeffs {
            a: 2.0,
            b: 0.0,
            c: 1e-12,
            v: 0.0,
        })
        .unwrap();
        assert_relative_eq!(r.beta, -0.25 * 2e-12, max_relative = 1e-10);
    }

    #[test]
    fn normal_phase_examples() {
        let n = normal_phase_coeffs(&params(1.4, 0.6, 0.0, 0.3));
        assert_abs_diff_eq!(n.half_2b_minus_a, -1.0, epsilon = 1e-15);
        assert_eq!(n.a, 1.4);
        assert_eq!(n.a_plus_4c, 1.4);

        for r in [0.0, 0.5, 1.5] {
            let oc = critical_coupling(Branch::CaseB, 1.1, 0.9, r)
                .unwrap()
                .omega_crit;
            let n = normal_phase_coeffs(&params(1.1, 0.9, oc, r));
            assert!(n.a_plus_4c.abs() <= 1e-14);
        }
    }

    #[test]
    fn jcm_gap_examples() {
        let g = jcm_gap(&params(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(g.gap, 1.0);

        let p = params(1.0, 1.0, 2.0, 0.0);
        let g = jcm_gap(&p).unwrap();
        assert_abs_diff_eq!(g.gap, 1.25f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.gap,
            normal_phase_coeffs(&p).gap().unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            g.constant,
            normal_phase_coeffs(&p).half_2b_minus_a,
            epsilon = 1e-14
        );

        let oc = 2.0 * 2f64.sqrt();
        let near = jcm_gap(&params(1.0, 1.0, oc * (1.0 - 1e-10), 0.0)).unwrap();
        assert!(near.gap < 1e-4);
        assert!(matches!(
            jcm_gap(&params(1.0, 1.0, oc, 0.0)),
            Err(Error::UnphysicalRegime(_))
        ));
        assert!(jcm_gap(&params(1.0, 1.0, 1.0, 0.2)).is_err());
    }

    #[test]
    fn rabi_gap_examples() {
        assert_eq!(rabi_gap(1.0, 1.0, 0.0).unwrap().gap, 1.0);
        let g = rabi_gap(1.0, 1.0, 0.25).unwrap();
        assert_abs_diff_eq!(g.gap, 0.75f64.sqrt(), epsilon = 1e-15);

        // r -> infinity of the normal-phase closed forms, Omega = 4 |lambda| e^{-r}
        let r = 8.0;
        let p = params(1.0, 1.0, crate::models::coupling_for_rabi(0.25, r), r);
        let n = normal_phase_coeffs(&p);
        assert_abs_diff_eq!(n.gap().unwrap(), g.gap, epsilon = 1e-5);
        assert_abs_diff_eq!(n.half_2b_minus_a, g.constant, epsilon = 1e-5);

        let lc = rabi_critical_lambda(1.0, 1.0);
        assert_eq!(lc, 0.5);
        assert!(rabi_gap(1.0, 1.0, lc * (1.0 - 1e-12)).unwrap().gap < 1e-5);
        assert!(rabi_gap(1.0, 1.0, lc).is_err());
        assert!(rabi_gap(1.0, 1.0, -0.6).is_err());
    }

    #[test]
    fn superradiant_setup_examples() {
        let p = params(1.3, 0.9, 0.7, 0.4);
        let sp = superradiant_setup(&p, 0.0).unwrap();
        assert_eq!(sp.theta, 0.0);
        assert_eq!(sp.omega_tilde, 0.9);
        assert_relative_eq!(sp.mu, -1.3 / (0.7 * 0.4f64.exp()), max_relative = 1e-14);

        // alpha Omega e^r = omega_a = 1  =>  tan(2 theta) = 1
        let p = params(1.0, 1.0, 0.5, 0.0);
        let sp = superradiant_setup(&p, 2.0).unwrap();
        assert_abs_diff_eq!(sp.cos_2theta(), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!((2.0 * sp.theta).tan(), 1.0, epsilon = 1e-12);

        assert!(matches!(
            superradiant_setup(&params(1.0, 1.0, 0.0, 0.0), 1.0),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn generic_gap_examples() {
        assert_eq!(superradiant_gap_generic(1.0, 0.3, 0.0, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            superradiant_gap_generic(1.0, 1.0, 0.5, -0.25).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        let (j, l, m) = (1.3, 0.8, 0.6);
        let opt = superradiant_gap_generic(j, l, m, -m / (2.0 * l)).unwrap();
        assert_abs_diff_eq!(
            opt,
            j * (1.0 - 2.0 * m * m / (j * l)).sqrt(),
            epsilon = 1e-14
        );
        assert!(superradiant_gap_generic(1.0, 0.1, 2.0, -1.0).is_err());
    }

    #[test]
    fn superradiant_jcm_examples() {
        let oc = 2.0 * 2f64.sqrt();
        let at = superradiant_gap_jcm(1.0, 1.0, oc).unwrap();
        assert_eq!(at.gap, 0.0);
        assert_eq!(at.alpha, 0.0);

        let s = superradiant_gap_jcm(1.0, 1.0, 2f64.sqrt() * oc).unwrap();
        assert_abs_diff_eq!(s.gap, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        let via =
            superradiant_pipeline_gap(&params(1.0, 1.0, 2f64.sqrt() * oc, 0.0), s.alpha).unwrap();
        assert_abs_diff_eq!(via, s.gap, epsilon = 1e-12);

        assert!(superradiant_gap_jcm(1.0, 1.0, 1e6).unwrap().gap > 1.0 - 1e-12);
        assert!(matches!(
            superradiant_gap_jcm(1.0, 1.0, 2.0),
            Err(Error::UnphysicalRegime(_))
        ));
    }

    #[test]
    fn superradiant_rabi_examples() {
        assert_eq!(superradiant_gap_rabi(1.0, 1.0, 1.0).unwrap().gap, 0.0);
        let r = superradiant_gap_rabi(1.0, 2.0, 2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(r.gap, 0.75f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.lambda, 2f64.sqrt() * 0.5 * 2f64.sqrt(), epsilon = 1e-15);
        // cos^2(2 theta) = 1 / g^4
        let cos2 = 2.0 / (4.0 + 16.0 * r.lambda * r.lambda * r.alpha * r.alpha).sqrt();
        assert_abs_diff_eq!((1.0 - cos2 * cos2).sqrt(), r.gap, epsilon = 1e-12);
        assert!(superradiant_gap_rabi(1.0, 1.0, 1e8).unwrap().gap > 1.0 - 1e-12);
        assert!(superradiant_gap_rabi(1.0, 1.0, 0.9).is_err());
    }

    #[test]
    fn extrapolated_gap_reduces_at_zero_squeeze() {
        for x in [1.0, 1.3, 2.0] {
            let oc = 2.0 * 2f64.sqrt();
            let p = params(1.0, 1.0, x * oc, 0.0);
            let a = superradiant_gap_extrapolated(&p).unwrap();
            let b = superradiant_gap_jcm(1.0, 1.0, x * oc).unwrap();
            assert_abs_diff_eq!(a.gap, b.gap, epsilon = 1e-12);
            assert_abs_diff_eq!(a.alpha, b.alpha, epsilon = 1e-12);
        }
        let oc = critical_coupling(Branch::CaseB, 1.0, 2.0, 0.8)
            .unwrap()
            .omega_crit;
        let p = params(1.0, 2.0, 1.5 * oc, 0.8);
        let s = superradiant_gap_extrapolated(&p).unwrap();
        assert_abs_diff_eq!(s.gap, (1.0 - 1.5f64.powi(-4)).sqrt(), epsilon = 1e-12);
    }
}
