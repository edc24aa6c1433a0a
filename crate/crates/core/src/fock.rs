//! Truncated Fock space of one bosonic mode, optionally tensored with a
//! two-level system, and the dense linear algebra used on it.
//!
//! Joint basis ordering: `|n, s> -> 2n + s`, where `s = 0` is the atomic
//! ground state `|1> = |down>` and `s = 1` the excited state `|2> = |up>`.

use std::ops::{Add, Mul, Neg, Sub};

use faer::complex_native::c64;
use faer::{Mat, Parallelism, Side};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

static SERIAL_KERNELS: std::sync::Once = std::sync::Once::new();

/// Truncated oscillator with occupations `0..=cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Self {
        Self { cutoff }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn osc_dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn joint_dim(&self) -> usize {
        2 * (self.cutoff + 1)
    }

    /// Joint index of `|n, s>`.
    pub fn index(&self, n: usize, s: usize) -> usize {
        debug_assert!(n <= self.cutoff && s < 2);
        2 * n + s
    }

    /// Default number of trusted low-occupation levels, `floor(N/2)`.
    pub fn interior_levels(&self) -> usize {
        self.cutoff / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Oscillator,
    Joint,
}

/// Dense complex square matrix tagged with the basis it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    basis: Basis,
    data: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn from_matrix(basis: Basis, data: DMatrix<C64>) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if basis == Basis::Joint && !data.nrows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "joint operator needs even dimension, got {}",
                data.nrows()
            )));
        }
        Ok(Self { basis, data })
    }

    pub fn from_real(basis: Basis, data: DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(basis, data.map(|x| C64::new(x, 0.0)))
    }

    pub fn zeros(space: FockSpace, basis: Basis) -> Self {
        let dim = dim_of(space, basis);
        Self {
            basis,
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(space: FockSpace, basis: Basis) -> Self {
        let dim = dim_of(space, basis);
        Self {
            basis,
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(basis: Basis, diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            data[(i, i)] = C64::new(d, 0.0);
        }
        Self::from_matrix(basis, data)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of oscillator levels represented.
    pub fn osc_levels(&self) -> usize {
        match self.basis {
            Basis::Oscillator => self.dim(),
            Basis::Joint => self.dim() / 2,
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.scale_complex(C64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            basis: self.basis,
            data: &self.data * factor,
        }
    }

    /// `self + shift * I`.
    pub fn shift(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.dim() {
            out.data[(i, i)] += C64::new(shift, 0.0);
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn anti_hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[(i, j)] + self.data[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Leading `levels`-level block of the oscillator (or `2 * levels` for a
    /// joint operator).
    pub fn leading_block(&self, levels: usize) -> Result<Self> {
        let size = block_size(self, levels)?;
        Ok(Self {
            basis: self.basis,
            data: self.data.view((0, 0), (size, size)).into_owned(),
        })
    }

    /// Oscillator-only block with atomic index `s` on both sides.
    pub fn spin_block(&self, s: usize) -> Result<Self> {
        if self.basis != Basis::Joint {
            return Err(Error::DimensionMismatch(
                "spin block requires a joint operator".into(),
            ));
        }
        if s > 1 {
            return Err(Error::OutOfRange {
                what: "spin index",
                value: s.to_string(),
                allowed: "0 or 1".into(),
            });
        }
        let levels = self.dim() / 2;
        let data = DMatrix::from_fn(levels, levels, |n, m| self.data[(2 * n + s, 2 * m + s)]);
        Ok(Self {
            basis: Basis::Oscillator,
            data,
        })
    }

    /// `<v| M |v>` for a normalized column vector.
    pub fn expectation(&self, state: &nalgebra::DVector<C64>) -> C64 {
        state.dotc(&(&self.data * state))
    }
}

fn dim_of(space: FockSpace, basis: Basis) -> usize {
    match basis {
        Basis::Oscillator => space.osc_dim(),
        Basis::Joint => space.joint_dim(),
    }
}

fn block_size(m: &OperatorMatrix, levels: usize) -> Result<usize> {
    let max = m.osc_levels();
    if levels == 0 || levels > max {
        return Err(Error::OutOfRange {
            what: "interior block levels",
            value: levels.to_string(),
            allowed: format!("1..={max}"),
        });
    }
    Ok(match m.basis {
        Basis::Oscillator => levels,
        Basis::Joint => 2 * levels,
    })
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        debug_assert_eq!(self.basis, rhs.basis);
        OperatorMatrix {
            basis: self.basis,
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        debug_assert_eq!(self.basis, rhs.basis);
        OperatorMatrix {
            basis: self.basis,
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        debug_assert_eq!(self.basis, rhs.basis);
        OperatorMatrix {
            basis: self.basis,
            data: &self.data * &rhs.data,
        }
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(self) -> OperatorMatrix {
        self.scale(-1.0)
    }
}

/// Photon annihilation operator: `<n-1| a |n> = sqrt(n)`.
pub fn annihilation(space: FockSpace) -> OperatorMatrix {
    let dim = space.osc_dim();
    let mut data = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        data[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix {
        basis: Basis::Oscillator,
        data,
    }
}

pub fn creation(space: FockSpace) -> OperatorMatrix {
    annihilation(space).adjoint()
}

/// `a^dag a`, built exactly as `diag(0, 1, ..., N)`.
pub fn number(space: FockSpace) -> OperatorMatrix {
    let diag: Vec<f64> = (0..space.osc_dim()).map(|n| n as f64).collect();
    OperatorMatrix::from_diagonal(Basis::Oscillator, &diag).expect("square")
}

/// `a + a^dag`.
pub fn quadrature(space: FockSpace) -> OperatorMatrix {
    let a = annihilation(space);
    &a + &a.adjoint()
}

/// Two-level operators in the `(|1>, |2>) = (down, up)` ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct Pauli {
    pub identity: Matrix2<C64>,
    pub z: Matrix2<C64>,
    /// `|2><1|`
    pub plus: Matrix2<C64>,
    /// `|1><2|`
    pub minus: Matrix2<C64>,
    pub x: Matrix2<C64>,
    pub y: Matrix2<C64>,
}

pub fn pauli_ops() -> Pauli {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let plus = Matrix2::new(zero, zero, one, zero);
    let minus = plus.adjoint();
    Pauli {
        identity: Matrix2::identity(),
        z: Matrix2::new(-one, zero, zero, one),
        x: plus + minus,
        // sigma_+ = (sigma_x + i sigma_y) / 2
        y: (plus - minus) * C64::new(0.0, -1.0),
        plus,
        minus,
    }
}

/// `field (x) spin` on the joint space, index `2n + s`.
pub fn tensor(field: &OperatorMatrix, spin: &Matrix2<C64>) -> Result<OperatorMatrix> {
    if field.basis != Basis::Oscillator {
        return Err(Error::DimensionMismatch(
            "tensor expects an oscillator-only field operator".into(),
        ));
    }
    Ok(OperatorMatrix {
        basis: Basis::Joint,
        data: field.data.kronecker(spin),
    })
}

/// `I_field (x) spin`.
pub fn spin_op(space: FockSpace, spin: &Matrix2<C64>) -> OperatorMatrix {
    tensor(&OperatorMatrix::identity(space, Basis::Oscillator), spin).expect("oscillator identity")
}

/// `field (x) I_spin`.
pub fn field_op(field: &OperatorMatrix) -> Result<OperatorMatrix> {
    tensor(field, &Matrix2::identity())
}

/// Spectral decomposition of a Hermitian operator, ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, paired with `values`.
    pub vectors: DMatrix<C64>,
}

impl EigenResult {
    pub fn vector(&self, i: usize) -> nalgebra::DVector<C64> {
        self.vectors.column(i).into_owned()
    }
}

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized
/// before solving; each eigenvector is phase-fixed so that its largest
/// component is real and positive.
pub fn herm_eigen(m: &OperatorMatrix) -> Result<EigenResult> {
    let scale = m.max_abs().max(1.0);
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let dim = m.dim();
    if dim == 0 {
        return Ok(EigenResult {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (&m.data + m.data.adjoint()) * C64::new(0.5, 0.0);

    // single-threaded kernels keep results independent of the caller's pool
    SERIAL_KERNELS.call_once(|| faer::set_global_parallelism(Parallelism::None));
    let (values, vectors): (Vec<f64>, DMatrix<C64>) = if sym.iter().all(|z| z.im == 0.0) {
        let a = Mat::<f64>::from_fn(dim, dim, |i, j| sym[(i, j)].re);
        let eig = a.selfadjoint_eigendecomposition(Side::Lower);
        let (s, u) = (eig.s().column_vector(), eig.u());
        (
            (0..dim).map(|i| s.read(i)).collect(),
            DMatrix::from_fn(dim, dim, |i, j| C64::new(u.read(i, j), 0.0)),
        )
    } else {
        let a = Mat::<c64>::from_fn(dim, dim, |i, j| c64::new(sym[(i, j)].re, sym[(i, j)].im));
        let eig = a.selfadjoint_eigendecomposition(Side::Lower);
        let (s, u) = (eig.s().column_vector(), eig.u());
        (
            (0..dim).map(|i| s.read(i).re).collect(),
            DMatrix::from_fn(dim, dim, |i, j| {
                let z = u.read(i, j);
                C64::new(z.re, z.im)
            }),
        )
    };
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure { dim });
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));

    let mut sorted = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src).into_owned();
        let pivot = col
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (i, z)| {
                if z.norm() > best.1 * (1.0 + 1e-12) {
                    (i, z.norm())
                } else {
                    best
                }
            })
            .0;
        let p = col[pivot];
        if p.norm() > 0.0 {
            col *= p.conj() / p.norm();
        }
        sorted.set_column(dst, &col);
    }
    Ok(EigenResult {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: sorted,
    })
}

/// `exp(K)` for anti-Hermitian `K`, via the spectrum of the Hermitian `iK`.
pub fn unitary_exp(k: &OperatorMatrix) -> Result<OperatorMatrix> {
    let scale = k.max_abs().max(1.0);
    let dev = k.anti_hermiticity_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotAntiHermitian { deviation: dev });
    }
    let generator = k.scale_complex(C64::new(0.0, 1.0));
    let eig = herm_eigen(&generator)?;
    // K = -i H  =>  exp(K) = V exp(-i lambda) V^dag
    let mut scaled = eig.vectors.clone();
    for (j, &lambda) in eig.values.iter().enumerate() {
        let phase = C64::new(0.0, -lambda).exp();
        for z in scaled.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    Ok(OperatorMatrix {
        basis: k.basis,
        data: scaled * eig.vectors.adjoint(),
    })
}

/// Max-abs difference restricted to the lowest `levels` oscillator levels.
pub fn interior_block_distance(
    lhs: &OperatorMatrix,
    rhs: &OperatorMatrix,
    levels: usize,
) -> Result<f64> {
    if lhs.dim() != rhs.dim() || lhs.basis != rhs.basis {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare {:?} {} with {:?} {}",
            lhs.basis,
            lhs.dim(),
            rhs.basis,
            rhs.dim()
        )));
    }
    let size = block_size(lhs, levels)?;
    let mut dist: f64 = 0.0;
    for j in 0..size {
        for i in 0..size {
            dist = dist.max((lhs.data[(i, j)] - rhs.data[(i, j)]).norm());
        }
    }
    Ok(dist)
}
