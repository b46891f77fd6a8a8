use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_spin, ModelParams, SectorMatrix};
use crate::lattice::{enumerate_sector, sector_of, BasisState, SectorLabel};
use crate::numerics::{gibbs, thermal_weights, DensityMatrix, C64};

/// One sector of a block-diagonal steady state.
#[derive(Clone, Debug)]
pub struct SectorBlock {
    pub label: SectorLabel,
    /// Probability carried by the sector, conserved by the dynamics.
    pub weight: f64,
    /// Normalized thermal state of the sector.
    pub state: DensityMatrix,
    /// Eigenvalues of the sector Hamiltonian and their thermal weights.
    pub energies: Vec<f64>,
    pub populations: Vec<f64>,
}

/// Thermal states of several sectors mixed with conserved weights.
#[derive(Clone, Debug)]
pub struct BlockDiagonalState {
    blocks: Vec<SectorBlock>,
}

impl BlockDiagonalState {
    pub fn blocks(&self) -> &[SectorBlock] {
        &self.blocks
    }

    pub fn block(&self, label: SectorLabel) -> Option<&SectorBlock> {
        self.blocks.iter().find(|b| b.label == label)
    }

    pub fn weight(&self, label: SectorLabel) -> f64 {
        self.block(label).map_or(0.0, |b| b.weight)
    }

    /// Dense matrix on the sorted union of all sector bases.
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let mut basis: Vec<BasisState> = self.blocks.iter().flat_map(|b| b.state.basis().iter().copied()).collect();
        basis.sort();
        let n = basis.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for block in &self.blocks {
            let idx: Vec<usize> =
                block.state.basis().iter().map(|s| basis.binary_search(s).expect("union basis")).collect();
            for (i, &pi) in idx.iter().enumerate() {
                for (j, &pj) in idx.iter().enumerate() {
                    m[(pi, pj)] = block.state.matrix()[(i, j)] * block.weight;
                }
            }
        }
        Ok(DensityMatrix::new_unchecked(basis, m))
    }
}

/// Long-time state of the sector-preserving dynamics: every sector relaxes
/// to its own thermal state and keeps the probability it started with.
/// Coherences between degenerate eigenstates are dropped.
pub fn steady_state_analytic(
    rho0: &DensityMatrix,
    sectors: &BTreeMap<SectorLabel, SectorMatrix>,
    temperature: f64,
) -> Result<BlockDiagonalState> {
    for (label, h) in sectors {
        if let Some(s) = h.basis().iter().find(|s| sector_of(**s) != *label) {
            return Err(Error::BasisMismatch(format!("{s} does not belong to sector {label}")));
        }
    }
    let mut weights: BTreeMap<SectorLabel, f64> = BTreeMap::new();
    for (k, s) in rho0.basis().iter().enumerate() {
        let label = sector_of(*s);
        if !sectors.contains_key(&label) {
            return Err(Error::BasisMismatch(format!("{s} lies outside the given sectors")));
        }
        *weights.entry(label).or_default() += rho0.matrix()[(k, k)].re;
    }
    if weights.values().all(|&w| w <= 0.0) {
        return Err(Error::NoSectorWeight);
    }
    let mut blocks = Vec::with_capacity(sectors.len());
    for (label, h) in sectors {
        let energies = h.eigen().values.clone();
        let populations = thermal_weights(&energies, temperature)?;
        blocks.push(SectorBlock {
            label: *label,
            weight: weights.get(label).copied().unwrap_or(0.0).max(0.0),
            state: gibbs(h, temperature)?,
            energies,
            populations,
        });
    }
    Ok(BlockDiagonalState { blocks })
}

/// Thermal state of the ice sector.
pub fn steady_state_ice(params: &ModelParams, temperature: f64) -> Result<DensityMatrix> {
    let h = build_spin(params).matrix_in_sector(SectorLabel::ICE)?;
    gibbs(&h, temperature)
}

/// Combined population of the two ice-rule configurations.
pub fn p_bf(rho: &DensityMatrix) -> Result<f64> {
    if rho.basis() != enumerate_sector(SectorLabel::ICE).as_slice() {
        return Err(Error::BasisMismatch("expected the ice-sector basis".into()));
    }
    Ok(rho.population(BasisState::ICE_B) + rho.population(BasisState::ICE_C))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;

    fn ice_basis() -> Vec<BasisState> {
        enumerate_sector(SectorLabel::ICE)
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn p_bf_examples() {
        let b = DensityMatrix::basis_state(ice_basis(), BasisState::ICE_B).unwrap();
        assert_eq!(p_bf(&b).unwrap(), 1.0);
        let mixed = DensityMatrix::maximally_mixed(ice_basis()).unwrap();
        assert!((p_bf(&mixed).unwrap() - 0.03125).abs() < 1e-15);
        let ib = ice_basis().binary_search(&BasisState::ICE_B).unwrap();
        let ic = ice_basis().binary_search(&BasisState::ICE_C).unwrap();
        let mut plus = vec![c(0.0); 64];
        plus[ib] = c(1.0);
        plus[ic] = c(1.0);
        let mut minus = plus.clone();
        minus[ic] = c(-1.0);
        let p = DensityMatrix::pure(ice_basis(), &plus).unwrap();
        let m = DensityMatrix::pure(ice_basis(), &minus).unwrap();
        let mix = DensityMatrix::mixture(&[(0.5, &p), (0.5, &m)]).unwrap();
        assert!((p_bf(&mix).unwrap() - 1.0).abs() < 1e-15);
        let other = DensityMatrix::maximally_mixed(vec![BasisState::EMPTY]).unwrap();
        assert!(p_bf(&other).is_err());
    }

    #[test]
    fn ice_state_limits() {
        let hot = steady_state_ice(&ModelParams::default(), f64::INFINITY).unwrap();
        assert!(max_abs_diff(hot.matrix(), &DMatrix::from_diagonal_element(64, 64, c(1.0 / 64.0))) < 1e-14);
    }

    #[test]
    fn analytic_state_inside_ice_sector_is_gibbs() {
        let params = ModelParams::default();
        let h = build_spin(&params).matrix_in_sector(SectorLabel::ICE).unwrap();
        let sectors = BTreeMap::from([(SectorLabel::ICE, h.clone())]);
        let rho0 = DensityMatrix::basis_state(ice_basis(), BasisState::ICE_C).unwrap();
        let out = steady_state_analytic(&rho0, &sectors, 35.0).unwrap();
        let dense = out.to_density_matrix().unwrap();
        assert!(max_abs_diff(dense.matrix(), gibbs(&h, 35.0).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn sector_weights_are_conserved() {
        let spin = build_spin(&ModelParams::default());
        let empty = SectorLabel::new([0; 6]).unwrap();
        let sectors = BTreeMap::from([
            (SectorLabel::ICE, spin.matrix_in_sector(SectorLabel::ICE).unwrap()),
            (empty, spin.matrix_in_sector(empty).unwrap()),
        ]);
        let mut basis = ice_basis();
        basis.push(BasisState::EMPTY);
        basis.sort();
        let cat = DensityMatrix::basis_state(basis.clone(), BasisState::ICE_B).unwrap();
        let vac = DensityMatrix::basis_state(basis, BasisState::EMPTY).unwrap();
        let rho0 = DensityMatrix::mixture(&[(0.5, &cat), (0.5, &vac)]).unwrap();
        for t in [1.0, 80.0, 1e4] {
            let out = steady_state_analytic(&rho0, &sectors, t).unwrap();
            assert!((out.weight(SectorLabel::ICE) - 0.5).abs() < 1e-15);
            assert!((out.weight(empty) - 0.5).abs() < 1e-15);
            let dense = out.to_density_matrix().unwrap();
            assert!((dense.trace() - 1.0).abs() < 1e-14);
            assert!((dense.population(BasisState::EMPTY) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn one_dimensional_sector_is_unchanged() {
        let empty = SectorLabel::new([0; 6]).unwrap();
        let h = build_spin(&ModelParams::default()).matrix_in_sector(empty).unwrap();
        let rho0 = DensityMatrix::basis_state(vec![BasisState::EMPTY], BasisState::EMPTY).unwrap();
        let out = steady_state_analytic(&rho0, &BTreeMap::from([(empty, h)]), 12.0).unwrap();
        assert_eq!(out.to_density_matrix().unwrap().matrix(), rho0.matrix());
    }

    #[test]
    fn rejects_states_outside_the_sectors() {
        let h = build_spin(&ModelParams::default()).matrix_in_sector(SectorLabel::ICE).unwrap();
        let rho0 = DensityMatrix::basis_state(vec![BasisState::EMPTY], BasisState::EMPTY).unwrap();
        let sectors = BTreeMap::from([(SectorLabel::ICE, h)]);
        assert!(steady_state_analytic(&rho0, &sectors, 10.0).is_err());
    }
}
