//! Hamiltonians and unitaries of the squeezed-photon Jaynes-Cummings family,
//! built as explicit matrices on a [`FockSpace`].
//!
//! Units: hbar = 1, every energy is in the unit of the input frequencies.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    annihilation, creation, field_op, number, pauli_ops, quadrature, spin_op, tensor, unitary_exp,
    Basis, FockSpace, OperatorMatrix,
};

/// Knobs of the squeezed-photon model: cavity and atomic frequencies, the
/// coupling `Omega`, the squeezing `r` and its phase `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_c: f64,
    pub omega_a: f64,
    pub coupling: f64,
    pub squeeze: f64,
    #[serde(default)]
    pub phase: f64,
}

impl ModelParams {
    pub fn new(omega_c: f64, omega_a: f64, coupling: f64, squeeze: f64) -> Result<Self> {
        let params = Self {
            omega_c,
            omega_a,
            coupling,
            squeeze,
            phase: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_squeeze(mut self, squeeze: f64) -> Self {
        self.squeeze = squeeze;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("omega_a", self.omega_a)?;
        nonnegative("coupling", self.coupling)?;
        nonnegative("squeeze", self.squeeze)?;
        if !self.phase.is_finite() {
            return Err(Error::InvalidParams {
                name: "phase",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }

    fn require_zero_phase(&self) -> Result<()> {
        self.validate()?;
        if self.phase != 0.0 {
            return Err(Error::PhaseNotSupported { phi: self.phase });
        }
        Ok(())
    }
}

/// Quantum Rabi model parameters; `lambda` multiplies `-(a + a^dag) sigma_x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    pub omega_c: f64,
    pub omega_a: f64,
    pub lambda: f64,
}

impl RabiParams {
    pub fn new(omega_c: f64, omega_a: f64, lambda: f64) -> Result<Self> {
        let params = Self {
            omega_c,
            omega_a,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("omega_a", self.omega_a)?;
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParams {
                name: "lambda",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// Constants of `J a^dag a + K + L tau_z + M (a + a^dag) tau_x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericRabi {
    pub j: f64,
    pub k: f64,
    pub l: f64,
    pub m: f64,
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams {
            name,
            reason: format!("must be a finite positive number, got {value}"),
        })
    }
}

fn nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams {
            name,
            reason: format!("must be finite and >= 0, got {value}"),
        })
    }
}

/// Rabi coupling reached by the squeezed model as `r -> infinity`:
/// `lambda = -Omega e^r / 4`.
pub fn rabi_lambda(coupling: f64, squeeze: f64) -> f64 {
    -coupling * squeeze.exp() / 4.0
}

/// Squeezed-model coupling that reproduces a Rabi `lambda` at squeezing `r`:
/// `Omega = 4 |lambda| e^{-r}`.
pub fn coupling_for_rabi(lambda: f64, squeeze: f64) -> f64 {
    4.0 * lambda.abs() * (-squeeze).exp()
}

/// Cutoff heuristic `ceil(10 (sinh^2 r + alpha^2 + 1) + 20)`.
pub fn auto_cutoff(squeeze: f64, alpha: f64) -> usize {
    let s = squeeze.sinh();
    (10.0 * (s * s + alpha * alpha + 1.0) + 20.0).ceil() as usize
}

/// `S(zeta) = exp(-(zeta/2) a^dag^2 + (zeta^*/2) a^2)`, `zeta = r e^{i phi}`.
pub fn squeeze_operator(space: FockSpace, r: f64, phi: f64) -> Result<OperatorMatrix> {
    nonnegative("squeeze", r)?;
    let zeta = C64::from_polar(r, phi);
    let a = annihilation(space);
    let ad = a.adjoint();
    let generator =
        &(&ad * &ad).scale_complex(-zeta / 2.0) + &(&a * &a).scale_complex(zeta.conj() / 2.0);
    unitary_exp(&generator)
}

/// `B = cosh(r) a + e^{i phi} sinh(r) a^dag`, closed form.
pub fn squeezed_annihilation(space: FockSpace, r: f64, phi: f64) -> Result<OperatorMatrix> {
    nonnegative("squeeze", r)?;
    let a = annihilation(space);
    let ad = creation(space);
    Ok(&a.scale(r.cosh()) + &ad.scale_complex(C64::from_polar(r.sinh(), phi)))
}

/// `B^dag = e^{-i phi} sinh(r) a + cosh(r) a^dag`.
pub fn squeezed_creation(space: FockSpace, r: f64, phi: f64) -> Result<OperatorMatrix> {
    Ok(squeezed_annihilation(space, r, phi)?.adjoint())
}

/// `omega_c n + omega_a sigma_z / 2`.
fn bare(omega_c: f64, omega_a: f64, space: FockSpace) -> OperatorMatrix {
    let p = pauli_ops();
    &field_op(&number(space).scale(omega_c)).expect("oscillator")
        + &spin_op(space, &p.z).scale(omega_a / 2.0)
}

/// `rot (sigma_+ a + sigma_- a^dag) + counter (sigma_- a + sigma_+ a^dag)`.
fn exchange(rot: f64, counter: f64, space: FockSpace) -> OperatorMatrix {
    let p = pauli_ops();
    let a = annihilation(space);
    let ad = creation(space);
    let t = |f: &OperatorMatrix, s| tensor(f, s).expect("oscillator");
    let rotating = &t(&a, &p.plus) + &t(&ad, &p.minus);
    let counter_rotating = &t(&a, &p.minus) + &t(&ad, &p.plus);
    &rotating.scale(rot) + &counter_rotating.scale(counter)
}

/// Squeezed-photon Jaynes-Cummings Hamiltonian written in bare photons:
///
/// `omega_c n + omega_a sigma_z/2
///   + (Omega/2) [cosh r (sigma_+ a + sigma_- a^dag) + sinh r (sigma_- a + sigma_+ a^dag)]`.
pub fn build_mjc(params: &ModelParams, space: FockSpace) -> Result<OperatorMatrix> {
    params.require_zero_phase()?;
    let half = params.coupling / 2.0;
    let r = params.squeeze;
    Ok(&bare(params.omega_c, params.omega_a, space)
        + &exchange(half * r.cosh(), half * r.sinh(), space))
}

/// Same Hamiltonian in the squeezed-photon form
/// `omega_c n + omega_a sigma_z/2 + (Omega/2)(sigma_+ B + sigma_- B^dag)`.
pub fn build_mjc_squeezed_form(params: &ModelParams, space: FockSpace) -> Result<OperatorMatrix> {
    params.require_zero_phase()?;
    let p = pauli_ops();
    let b = squeezed_annihilation(space, params.squeeze, 0.0)?;
    let coupling = &tensor(&b, &p.plus)? + &tensor(&b.adjoint(), &p.minus)?;
    Ok(&bare(params.omega_c, params.omega_a, space) + &coupling.scale(params.coupling / 2.0))
}

/// Jaynes-Cummings Hamiltonian; the squeeze field of `params` is ignored.
pub fn build_jcm(params: &ModelParams, space: FockSpace) -> Result<OperatorMatrix> {
    params.require_zero_phase()?;
    Ok(&bare(params.omega_c, params.omega_a, space) + &exchange(params.coupling / 2.0, 0.0, space))
}

/// `omega_c n + omega_a sigma_z/2 - lambda (a + a^dag) sigma_x`.
pub fn build_rabi(rabi: &RabiParams, space: FockSpace) -> Result<OperatorMatrix> {
    rabi.validate()?;
    let p = pauli_ops();
    let coupling = tensor(&quadrature(space), &p.x)?;
    Ok(&bare(rabi.omega_c, rabi.omega_a, space) - &coupling.scale(rabi.lambda))
}

/// `D(alpha) = exp(alpha (a^dag - a))` on the oscillator.
pub fn displacement_operator(space: FockSpace, alpha: f64) -> Result<OperatorMatrix> {
    let a = annihilation(space);
    unitary_exp(&(&a.adjoint() - &a).scale(alpha))
}

/// Displaced Hamiltonian `D^dag(alpha) H D(alpha)` written out directly:
///
/// `omega_c (a^dag + alpha)(a + alpha) + omega_a sigma_z/2
///   + (Omega alpha e^r / 2)(sigma_+ + sigma_-) + exchange terms`.
pub fn build_displaced(
    params: &ModelParams,
    alpha: f64,
    space: FockSpace,
) -> Result<OperatorMatrix> {
    params.require_zero_phase()?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParams {
            name: "alpha",
            reason: "must be finite".into(),
        });
    }
    let p = pauli_ops();
    // (a^dag + alpha)(a + alpha) = n + alpha (a + a^dag) + alpha^2
    let shifted = (&number(space) + &quadrature(space).scale(alpha)).shift(alpha * alpha);
    let field = field_op(&shifted.scale(params.omega_c))?;
    let r = params.squeeze;
    let half = params.coupling / 2.0;
    let drive = spin_op(space, &p.x).scale(half * alpha * r.exp());
    Ok(
        &(&(&field + &spin_op(space, &p.z).scale(params.omega_a / 2.0)) + &drive)
            + &exchange(half * r.cosh(), half * r.sinh(), space),
    )
}

/// `J n + K + L tau_z + M (a + a^dag) tau_x`; the tau matrices are the Pauli
/// matrices of the tilted two-level basis.
pub fn build_generic_rabi(coeffs: &GenericRabi, space: FockSpace) -> Result<OperatorMatrix> {
    let p = pauli_ops();
    let h = &(&field_op(&number(space).scale(coeffs.j))?.shift(coeffs.k)
        + &spin_op(space, &p.z).scale(coeffs.l))
        + &tensor(&quadrature(space), &p.x)?.scale(coeffs.m);
    Ok(h)
}

/// Oscillator-only `A n + B + C (a + a^dag)^2`.
pub fn build_quadratic(a: f64, b: f64, c: f64, space: FockSpace) -> OperatorMatrix {
    let x = quadrature(space);
    &number(space).scale(a).shift(b) + &(&x * &x).scale(c)
}

/// Decoupling unitary `U = exp(-v (sigma_+ B^dag - sigma_- B))`.
pub fn decoupling_unitary(
    params: &ModelParams,
    v: f64,
    space: FockSpace,
) -> Result<OperatorMatrix> {
    params.require_zero_phase()?;
    let p = pauli_ops();
    let b = squeezed_annihilation(space, params.squeeze, 0.0)?;
    let generator = &tensor(&b.adjoint(), &p.plus)? - &tensor(&b, &p.minus)?;
    unitary_exp(&generator.scale(-v))
}

/// Numerically exact `<down| U^dag H U |down>`, the spin-down block of the
/// conjugated Hamiltonian.
pub fn conjugate_project_down(
    h: &OperatorMatrix,
    v: f64,
    params: &ModelParams,
    space: FockSpace,
) -> Result<OperatorMatrix> {
    if h.basis() != Basis::Joint || h.dim() != space.joint_dim() {
        return Err(Error::DimensionMismatch(format!(
            "expected a joint operator of dimension {}, got {}",
            space.joint_dim(),
            h.dim()
        )));
    }
    let u = decoupling_unitary(params, v, space)?;
    let conjugated = &(&u.adjoint() * h) * &u;
    conjugated.spin_block(0)
}

/// Excitation number `n + sigma_z/2 + 1/2`.
pub fn excitation_number(space: FockSpace) -> OperatorMatrix {
    let diag: Vec<f64> = (0..space.joint_dim())
        .map(|i| (i / 2 + i % 2) as f64)
        .collect();
    OperatorMatrix::from_diagonal(Basis::Joint, &diag).expect("square")
}

/// Parity `exp(i pi (n + sigma_z/2 + 1/2)) = (-1)^{n+s}`.
pub fn parity(space: FockSpace) -> OperatorMatrix {
    let diag: Vec<f64> = (0..space.joint_dim())
        .map(|i| if (i / 2 + i % 2) % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    OperatorMatrix::from_diagonal(Basis::Joint, &diag).expect("square")
}
