//! Dense Hermitian linear algebra shared by the physics modules.

use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix, Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::SectorMatrix;
use crate::lattice::{BasisState, SiteIndex};
use crate::measures::TwoQubitState;
use crate::units::K_B;

pub type C64 = nalgebra::Complex<f64>;

/// Numerical tolerances used across the crate.
pub mod tol {
    /// Asymmetry allowed in matrices this crate builds.
    pub const HERMITICITY: f64 = 1e-12;
    /// Asymmetry allowed in matrices handed to [`super::eigh`].
    pub const INPUT_HERMITICITY: f64 = 1e-10;
    /// Eigenvalues down to `-PSD` count as zero.
    pub const PSD: f64 = 1e-10;
    /// Eigenvalues below `-PSD_REJECT` make a state invalid.
    pub const PSD_REJECT: f64 = 1e-8;
    pub const TRACE: f64 = 1e-10;
    /// `‖M − VΛV†‖_max / ‖M‖_max`.
    pub const EIGEN_RESIDUAL: f64 = 1e-9;
    pub const ORTHONORMALITY: f64 = 1e-10;
    /// Energies closer than this (meV) are degenerate.
    pub const DEGENERACY: f64 = 1e-9;
    /// Bohr frequencies closer than this (meV) share an eigenoperator.
    pub const FREQUENCY: f64 = 1e-9;
}

/// Ascending eigenvalues and the matching orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct Eigh<T: nalgebra::Scalar> {
    pub values: Vec<f64>,
    pub vectors: DMatrix<T>,
}

pub fn hermiticity_residual<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)].clone() - m[(j, i)].clone().conjugate()).modulus();
            worst = worst.max(d);
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Result<Eigh<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
    }
    let scale = m.iter().map(|x| x.clone().modulus()).fold(1.0f64, f64::max);
    let residual = hermiticity_residual(m);
    if residual > tol::INPUT_HERMITICITY * scale {
        return Err(Error::NotHermitian { residual });
    }
    if m.iter().any(|x| !x.clone().modulus().is_finite()) {
        return Err(Error::NonFiniteSpectrum);
    }
    Ok(eigh_trusted(m))
}

/// [`eigh`] for matrices already known to be Hermitian.
pub(crate) fn eigh_trusted<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Eigh<T> {
    let sym = (m + m.adjoint()).unscale(2.0);
    let dec = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let values = order.iter().map(|&k| dec.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| dec.eigenvectors[(i, order[j])].clone());
    Eigh { values, vectors }
}

/// Normalized Boltzmann weights for the given energies (meV) at `temperature`
/// (K). Exponents are shifted by the minimum energy. `T = 0` spreads the
/// weight evenly over the ground level; `T = ∞` gives equal weights.
pub fn thermal_weights(energies: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if temperature.is_nan() || temperature < 0.0 {
        return Err(Error::InvalidTemperature(temperature));
    }
    if energies.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFiniteSpectrum);
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = if temperature == 0.0 {
        energies.iter().map(|&e| if e - e_min <= tol::DEGENERACY { 1.0 } else { 0.0 }).collect()
    } else {
        let beta = 1.0 / (K_B * temperature);
        energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect()
    };
    let z: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / z).collect())
}

/// Thermal state `Σ_m w_m |ε_m⟩⟨ε_m|` of a Hamiltonian block.
pub fn gibbs(h: &SectorMatrix, temperature: f64) -> Result<DensityMatrix> {
    let eig = h.eigen();
    let weights = thermal_weights(&eig.values, temperature)?;
    let v = &eig.vectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * weights[j]);
    let rho = &scaled * v.transpose();
    let trace = rho.trace();
    let rho = rho.map(|x| C64::new(x / trace, 0.0));
    Ok(DensityMatrix { basis: h.basis().to_vec(), matrix: rho })
}

/// A unit-trace positive semidefinite operator on a sorted list of basis states.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    basis: Vec<BasisState>,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(basis: Vec<BasisState>, matrix: DMatrix<C64>) -> Result<Self> {
        check_basis(&basis)?;
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), actual: matrix.nrows() });
        }
        let residual = hermiticity_residual(&matrix);
        if residual > tol::HERMITICITY {
            return Err(Error::NotHermitian { residual });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::TRACE || trace.im.abs() > tol::TRACE {
            return Err(Error::BadTrace(trace.re));
        }
        let rho = Self { basis, matrix };
        let min = rho.eigenvalues()[0];
        if min < -tol::PSD {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(basis: Vec<BasisState>, matrix: DMatrix<C64>) -> Self {
        Self { basis, matrix }
    }

    /// `|ψ⟩⟨ψ|` for the normalized amplitude vector `amplitudes`.
    pub fn pure(basis: Vec<BasisState>, amplitudes: &[C64]) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), actual: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::BadTrace(norm));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|a| a / norm).collect();
        let n = basis.len();
        let m = DMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::new(basis, m)
    }

    /// `|s⟩⟨s|` on `basis`.
    pub fn basis_state(basis: Vec<BasisState>, state: BasisState) -> Result<Self> {
        let k =
            basis.binary_search(&state).map_err(|_| Error::BasisMismatch(format!("{state} is not in the basis")))?;
        let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
        amps[k] = C64::new(1.0, 0.0);
        Self::pure(basis, &amps)
    }

    pub fn maximally_mixed(basis: Vec<BasisState>) -> Result<Self> {
        let n = basis.len();
        check_basis(&basis)?;
        Ok(Self { matrix: DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0)), basis })
    }

    /// Convex combination of states on a common basis; weights are normalized.
    pub fn mixture(components: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyBasis)?.1;
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        let mut m = DMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in components {
            if rho.basis != first.basis {
                return Err(Error::BasisMismatch("mixture components differ in basis".into()));
            }
            if *w < 0.0 {
                return Err(Error::BadTrace(*w));
            }
            m += rho.matrix.scale(*w / total);
        }
        Self::new(first.basis.clone(), m)
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, state: BasisState) -> Option<usize> {
        self.basis.binary_search(&state).ok()
    }

    /// `⟨s|ρ|s⟩`, zero for states outside the basis.
    pub fn population(&self, state: BasisState) -> f64 {
        self.index_of(state).map_or(0.0, |k| self.matrix[(k, k)].re)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh_trusted(&self.matrix).values
    }

    /// The same state written on a larger sorted basis, padded with zeros.
    pub fn embed(&self, basis: Vec<BasisState>) -> Result<Self> {
        check_basis(&basis)?;
        let mut positions = Vec::with_capacity(self.dim());
        for s in &self.basis {
            positions.push(
                basis
                    .binary_search(s)
                    .map_err(|_| Error::BasisMismatch(format!("{s} is missing from the target basis")))?,
            );
        }
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for (i, &pi) in positions.iter().enumerate() {
            for (j, &pj) in positions.iter().enumerate() {
                m[(pi, pj)] = self.matrix[(i, j)];
            }
        }
        Ok(Self { basis, matrix: m })
    }
}

fn check_basis(basis: &[BasisState]) -> Result<()> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if !basis.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::BasisMismatch("basis must be strictly ascending".into()));
    }
    Ok(())
}

/// `−Σ λ log₂ λ` over a spectrum. Slightly negative eigenvalues are treated
/// as zero; anything below `-tol::PSD_REJECT` is an error. The result is
/// clamped to `[0, log₂ n]`.
pub fn entropy_bits(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -tol::PSD_REJECT {
            return Err(Error::NotPositive { min_eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    let max = (eigenvalues.len() as f64).log2();
    Ok(s.clamp(0.0, max))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_bits(&rho.eigenvalues())
}

/// Reduced state of two sites. The first kept site is the first tensor
/// factor; local index `2·n_first + n_second`, `0` = empty.
pub fn partial_trace(rho: &DensityMatrix, keep: (SiteIndex, SiteIndex)) -> Result<TwoQubitState> {
    let (a, b) = keep;
    if a == b {
        return Err(Error::RepeatedSite(a.get()));
    }
    let kept = a.mask() | b.mask();
    let mut groups: BTreeMap<u16, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, s) in rho.basis.iter().enumerate() {
        let local = 2 * s.occupied(a) as usize + s.occupied(b) as usize;
        groups.entry(s.bits() & !kept).or_default().push((k, local));
    }
    let mut out = Matrix4::<C64>::zeros();
    for members in groups.values() {
        for &(i, li) in members {
            for &(j, lj) in members {
                out[(li, lj)] += rho.matrix[(i, j)];
            }
        }
    }
    TwoQubitState::new(out).map(|s| s.with_sites(a, b))
}

/// `½‖ρ − σ‖₁` for states on the same basis.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.basis != sigma.basis {
        return Err(Error::BasisMismatch("trace distance needs a common basis".into()));
    }
    let diff = &rho.matrix - &sigma.matrix;
    Ok(0.5 * eigh_trusted(&diff).values.iter().map(|l| l.abs()).sum::<f64>())
}

/// Largest elementwise modulus of `a − b`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
