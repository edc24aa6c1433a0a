//! Exact diagonalization: low spectra, cutoff convergence, ground-state
//! observables, coupling scans and gap-minimum location.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::abc_coefficients;
use crate::error::{Error, Result};
use crate::fock::{
    field_op, herm_eigen, interior_block_distance, number, pauli_ops, quadrature, spin_op, Basis,
    EigenResult, FockSpace, OperatorMatrix,
};
use crate::models::{
    auto_cutoff, build_displaced, build_generic_rabi, build_jcm, build_mjc, build_quadratic,
    build_rabi, conjugate_project_down, GenericRabi, ModelParams, RabiParams,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    pub cutoff_used: usize,
    pub converged: bool,
    pub gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundObservables {
    pub mean_photons: f64,
    pub mean_sigma_z: f64,
    pub mean_quadrature: f64,
}

/// A Hamiltonian family that can be rebuilt at any cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Mjc(ModelParams),
    Jcm(ModelParams),
    Rabi(RabiParams),
    Displaced {
        params: ModelParams,
        alpha: f64,
    },
    GenericRabi(GenericRabi),
    /// Oscillator-only `A n + B + C (a + a^dag)^2`.
    Quadratic {
        a: f64,
        b: f64,
        c: f64,
    },
}

impl ModelSpec {
    pub fn build(&self, space: FockSpace) -> Result<OperatorMatrix> {
        match self {
            ModelSpec::Mjc(p) => build_mjc(p, space),
            ModelSpec::Jcm(p) => build_jcm(p, space),
            ModelSpec::Rabi(p) => build_rabi(p, space),
            ModelSpec::Displaced { params, alpha } => build_displaced(params, *alpha, space),
            ModelSpec::GenericRabi(g) => build_generic_rabi(g, space),
            ModelSpec::Quadratic { a, b, c } => Ok(build_quadratic(*a, *b, *c, space)),
        }
    }

    /// Same model with its coupling knob replaced (`Omega`, or `lambda` for
    /// the Rabi model, or `M` for the generic form).
    pub fn with_coupling(&self, coupling: f64) -> Self {
        match *self {
            ModelSpec::Mjc(p) => ModelSpec::Mjc(p.with_coupling(coupling)),
            ModelSpec::Jcm(p) => ModelSpec::Jcm(p.with_coupling(coupling)),
            ModelSpec::Rabi(p) => ModelSpec::Rabi(RabiParams {
                lambda: coupling,
                ..p
            }),
            ModelSpec::Displaced { params, alpha } => ModelSpec::Displaced {
                params: params.with_coupling(coupling),
                alpha,
            },
            ModelSpec::GenericRabi(g) => ModelSpec::GenericRabi(GenericRabi { m: coupling, ..g }),
            q @ ModelSpec::Quadratic { .. } => q,
        }
    }

    pub fn auto_cutoff(&self) -> usize {
        match self {
            ModelSpec::Mjc(p) => auto_cutoff(p.squeeze, 0.0),
            ModelSpec::Displaced { params, alpha } => auto_cutoff(params.squeeze, *alpha),
            _ => auto_cutoff(0.0, 0.0),
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            ModelSpec::Quadratic { .. } => Basis::Oscillator,
            _ => Basis::Joint,
        }
    }
}

/// Cutoff-doubling convergence control.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOptions {
    pub tol: f64,
    pub n_start: usize,
    pub n_max: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            n_start: 32,
            n_max: 512,
        }
    }
}

fn check_levels(n_levels: usize, dim: usize) -> Result<()> {
    if n_levels == 0 || n_levels > dim {
        return Err(Error::OutOfRange {
            what: "n_levels",
            value: n_levels.to_string(),
            allowed: format!("1..={dim}"),
        });
    }
    Ok(())
}

fn spectrum_from(
    eig: &EigenResult,
    n_levels: usize,
    cutoff: usize,
    converged: bool,
) -> SpectrumResult {
    let energies: Vec<f64> = eig.values[..n_levels].to_vec();
    let gap = if energies.len() > 1 {
        (energies[1] - energies[0]).max(0.0)
    } else {
        0.0
    };
    SpectrumResult {
        energies,
        cutoff_used: cutoff,
        converged,
        gap,
    }
}

/// Lowest `n_levels` eigenvalues at the matrix's own cutoff.
pub fn spectrum_ed(h: &OperatorMatrix, n_levels: usize) -> Result<SpectrumResult> {
    check_levels(n_levels, h.dim())?;
    let eig = herm_eigen(h)?;
    Ok(spectrum_from(&eig, n_levels, h.osc_levels() - 1, false))
}

/// Result of the doubling loop with the final decomposition kept around.
pub struct ConvergedEigen {
    pub spectrum: SpectrumResult,
    pub eigen: EigenResult,
    pub space: FockSpace,
    pub hamiltonian: OperatorMatrix,
}

/// Doubles the cutoff from `n_start` (the last step is clamped to `n_max`)
/// until every requested level moves by less than `tol`. On success the
/// smaller of the two agreeing cutoffs is reported; otherwise the result at
/// `n_max` with `converged = false`.
pub fn converged_eigen(
    model: &ModelSpec,
    n_levels: usize,
    opts: &ConvergenceOptions,
) -> Result<ConvergedEigen> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParams {
            name: "tol",
            reason: format!("must be > 0, got {}", opts.tol),
        });
    }
    if opts.n_start >= opts.n_max || opts.n_start == 0 {
        return Err(Error::InvalidParams {
            name: "n_start",
            reason: format!(
                "need 0 < n_start < n_max, got {} and {}",
                opts.n_start, opts.n_max
            ),
        });
    }
    let solve = |cutoff: usize| -> Result<ConvergedEigen> {
        let space = FockSpace::new(cutoff);
        let h = model.build(space)?;
        check_levels(n_levels, h.dim())?;
        let eig = herm_eigen(&h)?;
        Ok(ConvergedEigen {
            spectrum: spectrum_from(&eig, n_levels, cutoff, false),
            eigen: eig,
            space,
            hamiltonian: h,
        })
    };
    let mut previous = solve(opts.n_start)?;
    let mut cutoff = opts.n_start;
    while cutoff < opts.n_max {
        cutoff = (cutoff * 2).min(opts.n_max);
        let current = solve(cutoff)?;
        let stable = previous
            .spectrum
            .energies
            .iter()
            .zip(&current.spectrum.energies)
            .all(|(a, b)| (a - b).abs() < opts.tol);
        if stable {
            previous.spectrum.converged = true;
            return Ok(previous);
        }
        previous = current;
    }
    Ok(previous)
}

pub fn converged_spectrum(
    model: &ModelSpec,
    n_levels: usize,
    opts: &ConvergenceOptions,
) -> Result<SpectrumResult> {
    converged_eigen(model, n_levels, opts).map(|c| c.spectrum)
}

/// Ground state of `h`; within a degenerate ground space the vector with the
/// largest `<sigma_z>` is chosen.
pub fn ground_state(
    h: &OperatorMatrix,
    eig: &EigenResult,
    space: FockSpace,
) -> Result<DVector<C64>> {
    if h.basis() != Basis::Joint || h.dim() != space.joint_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ground observables need a joint operator of dimension {}, got {}",
            space.joint_dim(),
            h.dim()
        )));
    }
    let e0 = eig.values[0];
    let tol = 1e-10 * h.max_abs().max(1.0);
    let degenerate = eig.values.iter().take_while(|&&e| e - e0 <= tol).count();
    if degenerate == 1 {
        return Ok(eig.vector(0));
    }
    let sub = eig.vectors.columns(0, degenerate).into_owned();
    let sz = spin_op(space, &pauli_ops().z);
    let projected = sub.adjoint() * sz.matrix() * &sub;
    let local = herm_eigen(&OperatorMatrix::from_matrix(Basis::Oscillator, projected)?)?;
    let top = local.vector(degenerate - 1);
    let state: DVector<C64> = &sub * top;
    let norm = state.norm();
    Ok(state / C64::new(norm, 0.0))
}

fn observables_of(state: &DVector<C64>, space: FockSpace) -> Result<GroundObservables> {
    let n = field_op(&number(space))?;
    let sz = spin_op(space, &pauli_ops().z);
    let x = field_op(&quadrature(space))?;
    Ok(GroundObservables {
        mean_photons: n.expectation(state).re.max(0.0),
        mean_sigma_z: sz.expectation(state).re.clamp(-1.0, 1.0),
        mean_quadrature: x.expectation(state).re,
    })
}

pub fn ground_observables(h: &OperatorMatrix, space: FockSpace) -> Result<GroundObservables> {
    let eig = herm_eigen(h)?;
    observables_of(&ground_state(h, &eig, space)?, space)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub coupling: f64,
    /// `E1 - E0`
    pub gap: f64,
    /// `E2 - E0`, the gap above a (near-)degenerate ground doublet.
    pub doublet_gap: f64,
    pub mean_photons: f64,
    pub cutoff_used: usize,
    pub converged: bool,
}

fn scan_point(model: &ModelSpec, opts: &ConvergenceOptions) -> Result<ScanPoint> {
    let run = converged_eigen(model, 3, opts)?;
    let state = ground_state(&run.hamiltonian, &run.eigen, run.space)?;
    let obs = observables_of(&state, run.space)?;
    let e = &run.spectrum.energies;
    Ok(ScanPoint {
        coupling: 0.0,
        gap: run.spectrum.gap,
        doublet_gap: e[2] - e[0],
        mean_photons: obs.mean_photons,
        cutoff_used: run.spectrum.cutoff_used,
        converged: run.spectrum.converged,
    })
}

/// Converged gap and ground photon number at every coupling of an ascending
/// grid. Points run in parallel; output follows grid order.
pub fn gap_scan(
    template: &ModelSpec,
    grid: &[f64],
    opts: &ConvergenceOptions,
) -> Result<Vec<ScanPoint>> {
    if template.basis() != Basis::Joint {
        return Err(Error::DimensionMismatch(
            "gap scans need a joint model".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParams {
            name: "coupling grid",
            reason: "must be strictly ascending".into(),
        });
    }
    grid.par_iter()
        .map(|&c| {
            scan_point(&template.with_coupling(c), opts).map(|p| ScanPoint { coupling: c, ..p })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// `E1 - E0`
    Lowest,
    /// `E2 - E0`
    Doublet,
}

impl GapKind {
    fn of(&self, p: &ScanPoint) -> f64 {
        match self {
            GapKind::Lowest => p.gap,
            GapKind::Doublet => p.doublet_gap,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub coupling: f64,
    pub gap: f64,
    pub grid_index: usize,
}

/// Grid minimum followed by a three-point parabolic refinement.
pub fn locate_gap_minimum(points: &[ScanPoint], kind: GapKind) -> Option<GapMinimum> {
    let (i, _) = points
        .iter()
        .enumerate()
        .min_by(|a, b| kind.of(a.1).total_cmp(&kind.of(b.1)))?;
    Some(refine_at(points, kind, i))
}

/// First local minimum in grid order, refined like [`locate_gap_minimum`].
/// Models with a sequence of level crossings (Jaynes-Cummings) have their
/// transition at the first one.
pub fn locate_first_gap_minimum(points: &[ScanPoint], kind: GapKind) -> Option<GapMinimum> {
    let y = |i: usize| kind.of(&points[i]);
    let last = points.len().checked_sub(1)?;
    let i = (0..=last)
        .find(|&i| (i == 0 || y(i) <= y(i - 1)) && (i == last || y(i) < y(i + 1)))
        .unwrap_or(last);
    Some(refine_at(points, kind, i))
}

fn refine_at(points: &[ScanPoint], kind: GapKind, i: usize) -> GapMinimum {
    let best = &points[i];
    let fallback = GapMinimum {
        coupling: best.coupling,
        gap: kind.of(best),
        grid_index: i,
    };
    if i == 0 || i + 1 >= points.len() {
        return fallback;
    }
    let (x0, y0) = (points[i - 1].coupling, kind.of(&points[i - 1]));
    let (x1, y1) = (points[i].coupling, kind.of(&points[i]));
    let (x2, y2) = (points[i + 1].coupling, kind.of(&points[i + 1]));
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den.abs() <= f64::EPSILON * (num.abs() + 1.0) {
        return fallback;
    }
    let xv = (x1 - 0.5 * num / den).clamp(x0, x2);
    // Lagrange form through the three samples
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    let yv = (y0 * l0 + y1 * l1 + y2 * l2).clamp(0.0, y1);
    GapMinimum {
        coupling: xv,
        gap: yv,
        grid_index: i,
    }
}

/// Golden-section search for the gap minimum inside `[lo, hi]`, stopping
/// when the bracket is narrower than `x_tol`.
pub fn refine_gap_minimum(
    template: &ModelSpec,
    lo: f64,
    hi: f64,
    kind: GapKind,
    opts: &ConvergenceOptions,
    x_tol: f64,
) -> Result<GapMinimum> {
    if !(lo < hi) {
        return Err(Error::InvalidParams {
            name: "bracket",
            reason: format!("need lo < hi, got [{lo}, {hi}]"),
        });
    }
    let eval = |c: f64| -> Result<f64> {
        let p = scan_point(&template.with_coupling(c), opts)?;
        Ok(kind.of(&p))
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > x_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let (coupling, gap) = if fc <= fd { (c, fc) } else { (d, fd) };
    Ok(GapMinimum {
        coupling,
        gap,
        grid_index: 0,
    })
}

/// Interior-block distance between the exact rotated spin-down block and
/// the leading-order quadratic form `A n + B + C (a + a^dag)^2`.
pub fn bch_truncation_error(params: &ModelParams, v: f64, space: FockSpace) -> Result<f64> {
    let h = build_mjc(params, space)?;
    let exact = conjugate_project_down(&h, v, params, space)?;
    let q = abc_coefficients(params, v);
    let quad = build_quadratic(q.a, q.b, q.c, space);
    interior_block_distance(&exact, &quad, space.interior_levels().max(1))
}

/// `steps` evenly spaced points from `min` to `max` inclusive; one point is
/// just `min`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}
