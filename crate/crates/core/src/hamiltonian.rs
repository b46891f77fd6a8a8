//! Lattice fermion Hamiltonian and its pseudo-spin form.
//!
//! Protons hop only inside a bond, so after the Jordan–Wigner map every
//! hopping term becomes `J_x (XX + YY)` on an edge pair with no string left
//! over. Both builders are kept: the fermionic one applies creation and
//! annihilation operators with explicit anticommutation signs and serves as
//! the reference for the Pauli-string form.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{edge_pairs, enumerate_sector, vortex_pairs, BasisState, SectorLabel, SiteIndex, NUM_SITES};
use crate::numerics::{self, tol, Eigh};

/// Default edge penalty when only the two spin couplings are given. Ice-sector
/// observables do not depend on it.
pub const DEFAULT_V_INTER: f64 = 100.0;

/// Lattice parameters (meV) together with the derived pseudo-spin couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    w: f64,
    j: f64,
    v_inter: f64,
    v_intra: f64,
    lambda: f64,
    jx: f64,
    jz_inter: f64,
    jz_intra: f64,
    b: f64,
    lambda_tilde: f64,
}

impl ModelParams {
    pub fn new(w: f64, j: f64, v_inter: f64, v_intra: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("W", w), ("J", j), ("V_inter", v_inter), ("V_intra", v_intra), ("lambda", lambda)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        let params = Self {
            w,
            j,
            v_inter,
            v_intra,
            lambda,
            jx: -j / 2.0,
            jz_inter: v_inter / 4.0,
            jz_intra: v_intra / 4.0,
            b: -(2.0 * w + v_inter + v_intra) / 4.0,
            lambda_tilde: lambda + 6.0 * w + 3.0 * (v_inter + v_intra) / 2.0,
        };
        params.check_mapping()?;
        Ok(params)
    }

    /// Parameters from the two couplings that fix the ice-sector physics, with
    /// `W = λ = 0` and `V_inter` at its default.
    pub fn from_spin_couplings(jx: f64, jz_intra: f64) -> Result<Self> {
        Self::new(0.0, -2.0 * jx, DEFAULT_V_INTER, 4.0 * jz_intra, 0.0)
    }

    pub fn with_on_site(self, w: f64) -> Result<Self> {
        Self::new(w, self.j, self.v_inter, self.v_intra, self.lambda)
    }

    pub fn with_v_inter(self, v_inter: f64) -> Result<Self> {
        Self::new(self.w, self.j, v_inter, self.v_intra, self.lambda)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.w, self.j, self.v_inter, self.v_intra, lambda)
    }

    fn check_mapping(&self) -> Result<()> {
        let ok = self.jx == -self.j / 2.0
            && self.jz_inter == self.v_inter / 4.0
            && self.jz_intra == self.v_intra / 4.0
            && self.b == -(2.0 * self.w + self.v_inter + self.v_intra) / 4.0
            && self.lambda_tilde == self.lambda + 6.0 * self.w + 3.0 * (self.v_inter + self.v_intra) / 2.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams("derived couplings are not finite".into()))
        }
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn j(&self) -> f64 {
        self.j
    }
    pub fn v_inter(&self) -> f64 {
        self.v_inter
    }
    pub fn v_intra(&self) -> f64 {
        self.v_intra
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn jx(&self) -> f64 {
        self.jx
    }
    pub fn jz_inter(&self) -> f64 {
        self.jz_inter
    }
    pub fn jz_intra(&self) -> f64 {
        self.jz_intra
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn lambda_tilde(&self) -> f64 {
        self.lambda_tilde
    }

    /// Tunneling between the two sites of a vertex; neglected in this model.
    pub fn j_vortex(&self) -> f64 {
        0.0
    }
}

impl Default for ModelParams {
    /// `J = 2 meV`, `V_intra = 40 meV`, i.e. `J_x = -1 meV`, `J_z^intra = +10 meV`.
    fn default() -> Self {
        Self::from_spin_couplings(-1.0, 10.0).expect("default parameters are finite")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// `coefficient · σ¹ ⊗ … ⊗ σ¹²` with `σ_z = |0⟩⟨0| − |1⟩⟨1|` (0 = empty site).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub coefficient: f64,
    pub letters: [Pauli; NUM_SITES],
}

impl PauliString {
    pub fn identity(coefficient: f64) -> Self {
        Self { coefficient, letters: [Pauli::I; NUM_SITES] }
    }

    pub fn single(coefficient: f64, p: Pauli, site: SiteIndex) -> Self {
        let mut s = Self::identity(coefficient);
        s.letters[site.get() as usize - 1] = p;
        s
    }

    pub fn pair(coefficient: f64, p: Pauli, a: SiteIndex, q: Pauli, b: SiteIndex) -> Self {
        let mut s = Self::single(coefficient, p, a);
        s.letters[b.get() as usize - 1] = q;
        s
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// `P|s⟩ = amplitude · |s'⟩`. The amplitude is `coefficient · i^k · (±1)`,
    /// returned as (real, imaginary) parts.
    pub fn apply(&self, state: BasisState) -> (BasisState, (f64, f64)) {
        let mut flip = 0u16;
        let mut i_power = 0u32;
        let mut sign = 1.0;
        for (k, &p) in self.letters.iter().enumerate() {
            let occupied = state.bits() >> k & 1 == 1;
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << k,
                Pauli::Y => {
                    flip |= 1 << k;
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                    i_power += 1;
                    if occupied {
                        sign = -sign;
                    }
                }
                Pauli::Z => {
                    if occupied {
                        sign = -sign;
                    }
                }
            }
        }
        let amp = sign * self.coefficient;
        let phase = match i_power % 4 {
            0 => (amp, 0.0),
            1 => (0.0, amp),
            2 => (-amp, 0.0),
            _ => (0.0, -amp),
        };
        (state.flipped(flip), phase)
    }
}

/// A weighted sum of Pauli strings with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinHamiltonian {
    terms: Vec<PauliString>,
}

impl SpinHamiltonian {
    pub fn from_terms(terms: Vec<PauliString>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// `H|s⟩` as a list of `(target, amplitude)` with repeated targets merged.
    /// Fails if an amplitude keeps an imaginary part.
    pub fn apply(&self, state: BasisState) -> Result<Vec<(BasisState, f64)>> {
        let mut out: Vec<(BasisState, f64, f64)> = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            let (target, (re, im)) = term.apply(state);
            match out.iter_mut().find(|(t, _, _)| *t == target) {
                Some(entry) => {
                    entry.1 += re;
                    entry.2 += im;
                }
                None => out.push((target, re, im)),
            }
        }
        let mut real = Vec::with_capacity(out.len());
        for (target, re, im) in out {
            if im.abs() > tol::HERMITICITY {
                return Err(Error::NotHermitian { residual: im.abs() });
            }
            real.push((target, re));
        }
        Ok(real)
    }

    /// `⟨s|H|s⟩`.
    pub fn diagonal(&self, state: BasisState) -> f64 {
        self.terms
            .iter()
            .filter(|t| !t.letters.iter().any(|&p| matches!(p, Pauli::X | Pauli::Y)))
            .map(|t| t.apply(state).1 .0)
            .sum()
    }

    /// Dense matrix on a sorted basis. Fails when the Hamiltonian couples a
    /// member of `basis` to a state outside it.
    pub fn matrix_on_basis(&self, basis: Vec<BasisState>) -> Result<SectorMatrix> {
        let n = basis.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (col, &s) in basis.iter().enumerate() {
            for (target, amp) in self.apply(s)? {
                match basis.binary_search(&target) {
                    Ok(row) => m[(row, col)] += amp,
                    Err(_) if amp.abs() > tol::HERMITICITY => {
                        return Err(Error::SectorLeak { from: s.bits(), to: target.bits(), magnitude: amp.abs() })
                    }
                    Err(_) => {}
                }
            }
        }
        SectorMatrix::new(basis, m)
    }

    pub fn matrix_in_sector(&self, label: SectorLabel) -> Result<SectorMatrix> {
        self.matrix_on_basis(enumerate_sector(label))
    }
}

/// The pseudo-spin Hamiltonian: 6 XX + 6 YY + 6 edge ZZ + 6 vertex ZZ + 12 Z
/// + identity = 37 strings.
pub fn build_spin(params: &ModelParams) -> SpinHamiltonian {
    let mut terms = Vec::with_capacity(37);
    for (a, b) in edge_pairs() {
        terms.push(PauliString::pair(params.jx(), Pauli::X, a, Pauli::X, b));
    }
    for (a, b) in edge_pairs() {
        terms.push(PauliString::pair(params.jx(), Pauli::Y, a, Pauli::Y, b));
    }
    for (a, b) in edge_pairs() {
        terms.push(PauliString::pair(params.jz_inter(), Pauli::Z, a, Pauli::Z, b));
    }
    for (a, b) in vortex_pairs() {
        terms.push(PauliString::pair(params.jz_intra(), Pauli::Z, a, Pauli::Z, b));
    }
    for s in SiteIndex::all() {
        terms.push(PauliString::single(params.b(), Pauli::Z, s));
    }
    terms.push(PauliString::identity(params.lambda_tilde()));
    SpinHamiltonian { terms }
}

/// Occupation mask of sites strictly before `site` in the 1..12 ordering.
fn below(site: SiteIndex) -> u16 {
    site.mask() - 1
}

/// `a†_to a_from |s⟩` with the anticommutation sign, or `None` if it vanishes.
fn hop(state: BasisState, from: SiteIndex, to: SiteIndex) -> Option<(BasisState, f64)> {
    if !state.occupied(from) || (from != to && state.occupied(to)) {
        return None;
    }
    let bits = state.bits();
    let mut sign = if (bits & below(from)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let removed = bits & !from.mask();
    if (removed & below(to)).count_ones() % 2 == 1 {
        sign = -sign;
    }
    Some((BasisState::new((removed | to.mask()) as u32).ok()?, sign))
}

/// Classical part of the lattice Hamiltonian for one configuration.
pub fn fermionic_diagonal(params: &ModelParams, state: BasisState) -> f64 {
    let n = |s: SiteIndex| state.occupied(s) as u8 as f64;
    let on_site: f64 = SiteIndex::all().map(|s| params.w() * n(s)).sum();
    let edge: f64 = edge_pairs().iter().map(|&(a, b)| params.v_inter() * n(a) * n(b)).sum();
    let vortex: f64 = vortex_pairs().iter().map(|&(a, b)| params.v_intra() * n(a) * n(b)).sum();
    on_site + edge + vortex + params.lambda()
}

/// The lattice fermion Hamiltonian on a sorted basis, built from creation and
/// annihilation operators rather than Pauli strings.
pub fn build_fermionic(params: &ModelParams, basis: Vec<BasisState>) -> Result<SectorMatrix> {
    let n = basis.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let bonds = edge_pairs()
        .into_iter()
        .map(|p| (p, params.j()))
        .chain(vortex_pairs().into_iter().map(|p| (p, params.j_vortex())))
        .filter(|&(_, t)| t != 0.0);
    let bonds: Vec<_> = bonds.collect();
    for (col, &s) in basis.iter().enumerate() {
        m[(col, col)] += fermionic_diagonal(params, s);
        for &((a, b), t) in &bonds {
            for (from, to) in [(b, a), (a, b)] {
                if let Some((target, sign)) = hop(s, from, to) {
                    let amp = -t * sign;
                    match basis.binary_search(&target) {
                        Ok(row) => m[(row, col)] += amp,
                        Err(_) => {
                            return Err(Error::SectorLeak { from: s.bits(), to: target.bits(), magnitude: amp.abs() })
                        }
                    }
                }
            }
        }
    }
    SectorMatrix::new(basis, m)
}

pub fn build_fermionic_sector(params: &ModelParams, label: SectorLabel) -> Result<SectorMatrix> {
    build_fermionic(params, enumerate_sector(label))
}

/// Dense real symmetric Hamiltonian block on a sorted basis, with a lazily
/// computed eigendecomposition.
#[derive(Debug)]
pub struct SectorMatrix {
    basis: Vec<BasisState>,
    matrix: DMatrix<f64>,
    eigen: OnceLock<Eigh<f64>>,
}

impl SectorMatrix {
    pub fn new(basis: Vec<BasisState>, matrix: DMatrix<f64>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if !basis.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::BasisMismatch("basis must be strictly ascending".into()));
        }
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), actual: matrix.nrows() });
        }
        let scale = matrix.amax().max(1.0);
        let residual = numerics::hermiticity_residual(&matrix);
        if residual > tol::HERMITICITY * scale {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { basis, matrix, eigen: OnceLock::new() })
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, state: BasisState) -> Option<usize> {
        self.basis.binary_search(&state).ok()
    }

    /// Ascending eigenvalues and orthonormal eigenvectors (as columns),
    /// computed once.
    pub fn eigen(&self) -> &Eigh<f64> {
        self.eigen.get_or_init(|| numerics::eigh_trusted(&self.matrix))
    }
}

impl Clone for SectorMatrix {
    fn clone(&self) -> Self {
        Self { basis: self.basis.clone(), matrix: self.matrix.clone(), eigen: self.eigen.clone() }
    }
}
