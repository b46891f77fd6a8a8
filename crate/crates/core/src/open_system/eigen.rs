use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::SectorMatrix;
use crate::lattice::SiteIndex;

/// Bohr frequencies `ε_c − ε_a` of a spectrum, grouped into bins.
///
/// Sorted differences are chained: a new bin starts wherever the gap to the
/// previous difference exceeds the tolerance. The bin holding zero is pinned
/// to exactly zero, the others sit at the mean of their members. Bins are
/// symmetric under `ω → −ω`.
#[derive(Clone, Debug)]
pub struct BohrBins {
    dim: usize,
    frequencies: Vec<f64>,
    pair_bin: Vec<usize>,
}

impl BohrBins {
    /// `energies` must be ascending.
    pub fn new(energies: &[f64], freq_tol: f64) -> Result<Self> {
        let d = energies.len();
        if d == 0 {
            return Err(Error::EmptyBasis);
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFiniteSpectrum);
        }
        let mut diffs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * (d + 1) / 2);
        for a in 0..d {
            for c in a..d {
                diffs.push(((energies[c] - energies[a]).abs(), a, c));
            }
        }
        diffs.sort_by(|x, y| x.0.total_cmp(&y.0));

        // cluster id per sorted entry, and the cluster representatives
        let mut reps: Vec<f64> = Vec::new();
        let mut cluster = Vec::with_capacity(diffs.len());
        let mut start = 0;
        for k in 0..diffs.len() {
            if k > 0 && diffs[k].0 - diffs[k - 1].0 > freq_tol {
                reps.push(cluster_rep(&diffs[start..k]));
                start = k;
            }
            cluster.push(reps.len());
        }
        reps.push(cluster_rep(&diffs[start..]));
        if diffs[0].0 == 0.0 {
            reps[0] = 0.0;
        }

        // signed layout: [−r_K, …, −r_1, 0?, r_1, …, r_K]
        let has_zero = reps[0] == 0.0;
        let positive: Vec<f64> = if has_zero { reps[1..].to_vec() } else { reps.clone() };
        let k = positive.len();
        let zero_slot = k;
        let mut frequencies: Vec<f64> = positive.iter().rev().map(|w| -w).collect();
        if has_zero {
            frequencies.push(0.0);
        }
        frequencies.extend(positive.iter().copied());
        let offset = if has_zero { 1 } else { 0 };

        let mut pair_bin = vec![0usize; d * d];
        for (entry, &cl) in diffs.iter().zip(&cluster) {
            let (_, a, c) = *entry;
            let (up, down) = if has_zero && cl == 0 {
                (zero_slot, zero_slot)
            } else {
                let p = cl - offset;
                (zero_slot + offset + p, zero_slot - 1 - p)
            };
            // ε_c − ε_a ≥ 0 for c ≥ a
            pair_bin[a * d + c] = up;
            pair_bin[c * d + a] = down;
        }
        Ok(Self { dim: d, frequencies, pair_bin })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Bin of `ε_c − ε_a`.
    pub fn bin(&self, a: usize, c: usize) -> usize {
        self.pair_bin[a * self.dim + c]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index pairs `(a, c)` per bin, in row-major order.
    pub(crate) fn pairs_by_bin(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.frequencies.len()];
        for a in 0..self.dim {
            for c in 0..self.dim {
                out[self.bin(a, c)].push((a, c));
            }
        }
        out
    }
}

fn cluster_rep(members: &[(f64, usize, usize)]) -> f64 {
    members.iter().map(|m| m.0).sum::<f64>() / members.len() as f64
}

/// `σ_z` of one site in the eigenbasis of `h`: `Vᵀ Z V`.
pub(crate) fn sigma_z_eigenbasis(h: &SectorMatrix, site: SiteIndex) -> DMatrix<f64> {
    let v = &h.eigen().vectors;
    let z: Vec<f64> = h.basis().iter().map(|s| if s.occupied(site) { -1.0 } else { 1.0 }).collect();
    let zv = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| z[i] * v[(i, j)]);
    v.transpose() * zv
}

/// Frequency components `A_j(ω)` of `σ_z^(j)` on one block, as matrices in
/// the block's configuration basis. `A_j(ω)` lowers the energy by `ω`.
#[derive(Clone, Debug)]
pub struct EigenOperatorSet {
    site: SiteIndex,
    frequencies: Vec<f64>,
    operators: Vec<DMatrix<f64>>,
}

impl EigenOperatorSet {
    pub fn site(&self) -> SiteIndex {
        self.site
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn operators(&self) -> &[DMatrix<f64>] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// The component at `omega`, if present.
    pub fn get(&self, omega: f64, tol: f64) -> Option<&DMatrix<f64>> {
        self.frequencies.iter().position(|w| (w - omega).abs() <= tol).map(|k| &self.operators[k])
    }

    pub fn sum(&self) -> DMatrix<f64> {
        let n = self.operators.first().map_or(0, |m| m.nrows());
        self.operators.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m)
    }
}

/// Components with every element below this are dropped.
const NEGLIGIBLE: f64 = 1e-14;

pub fn eigenoperators(h: &SectorMatrix, site: SiteIndex, freq_tol: f64) -> Result<EigenOperatorSet> {
    let eig = h.eigen();
    let bins = BohrBins::new(&eig.values, freq_tol)?;
    let s = sigma_z_eigenbasis(h, site);
    let v = &eig.vectors;
    let d = h.dim();
    let mut frequencies = Vec::new();
    let mut operators = Vec::new();
    for (k, pairs) in bins.pairs_by_bin().into_iter().enumerate() {
        let mut a_eig = DMatrix::zeros(d, d);
        let mut largest = 0.0f64;
        for (a, c) in pairs {
            a_eig[(a, c)] = s[(a, c)];
            largest = largest.max(s[(a, c)].abs());
        }
        if largest > NEGLIGIBLE {
            frequencies.push(bins.frequencies()[k]);
            operators.push(v * a_eig * v.transpose());
        }
    }
    Ok(EigenOperatorSet { site, frequencies, operators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_spin, ModelParams};
    use crate::lattice::{BasisState, SectorLabel};
    use crate::numerics::tol;

    fn site(i: i64) -> SiteIndex {
        SiteIndex::new(i).unwrap()
    }

    fn edge_block(jx: f64) -> SectorMatrix {
        // |site 1 occupied⟩, |site 2 occupied⟩ with J_x(XX+YY) = 2J_x hopping
        let basis = vec![BasisState::new(0b01).unwrap(), BasisState::new(0b10).unwrap()];
        SectorMatrix::new(basis, DMatrix::from_row_slice(2, 2, &[0.0, 2.0 * jx, 2.0 * jx, 0.0])).unwrap()
    }

    #[test]
    fn bins_are_symmetric_and_cover_all_pairs() {
        let bins = BohrBins::new(&[0.0, 0.0, 1.0, 3.0, 3.0 + 1e-12], 1e-9).unwrap();
        let expected = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        assert_eq!(bins.frequencies().len(), expected.len());
        for (w, e) in bins.frequencies().iter().zip(expected) {
            assert!((w - e).abs() < 1e-11);
        }
        let f = |a, c| bins.frequencies()[bins.bin(a, c)];
        assert!((f(0, 4) - 3.0).abs() < 1e-11 && f(4, 0) == -f(0, 4));
        assert_eq!(f(3, 4), 0.0);
        assert!((f(2, 3) - 2.0).abs() < 1e-11);
    }

    #[test]
    fn bins_keep_close_but_distinct_frequencies_apart() {
        let bins = BohrBins::new(&[0.0, 3.1e-4, 5.0], 1e-9).unwrap();
        assert_eq!(bins.frequencies().len(), 7);
    }

    #[test]
    fn commuting_coupling_has_only_zero_frequency() {
        let basis = vec![BasisState::new(0).unwrap(), BasisState::new(1).unwrap()];
        let h = SectorMatrix::new(basis, DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0])).unwrap();
        let set = eigenoperators(&h, site(1), tol::FREQUENCY).unwrap();
        assert_eq!(set.frequencies(), &[0.0][..]);
    }

    #[test]
    fn single_edge_block_frequencies() {
        let jx = -1.0;
        let set = eigenoperators(&edge_block(jx), site(1), tol::FREQUENCY).unwrap();
        // σ_z^(1) is off-diagonal between the bonding and antibonding states
        let mut w = set.frequencies().to_vec();
        w.sort_by(f64::total_cmp);
        assert_eq!(w.len(), 2);
        assert!((w[0] + 4.0 * jx.abs()).abs() < 1e-12 && (w[1] - 4.0 * jx.abs()).abs() < 1e-12);
        // on the four-state edge block the zero frequency appears too
        let params = ModelParams::default();
        let edge_terms = build_spin(&params)
            .terms()
            .iter()
            .filter(|t| t.letters.iter().enumerate().all(|(k, p)| k < 2 || *p == crate::hamiltonian::Pauli::I))
            .cloned()
            .collect();
        let h = crate::hamiltonian::SpinHamiltonian::from_terms(edge_terms)
            .matrix_on_basis((0..4).map(|b| BasisState::new(b).unwrap()).collect())
            .unwrap();
        let set = eigenoperators(&h, site(1), tol::FREQUENCY).unwrap();
        assert!(set.get(0.0, 1e-12).is_some());
        assert!(set.get(4.0, 1e-9).is_some() && set.get(-4.0, 1e-9).is_some());
    }

    #[test]
    fn completeness_and_adjoint_pairs_on_ice_sector() {
        let h = build_spin(&ModelParams::default()).matrix_in_sector(SectorLabel::ICE).unwrap();
        for j in [1, 4, 12] {
            let set = eigenoperators(&h, site(j), tol::FREQUENCY).unwrap();
            let z = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                64,
                h.basis().iter().map(|s| if s.occupied(site(j)) { -1.0 } else { 1.0 }),
            ));
            assert!((set.sum() - z).amax() < 1e-10);
            for (w, a) in set.frequencies().iter().zip(set.operators()) {
                let back = set.get(-w, 0.0).expect("mirror frequency");
                assert!((back - a.transpose()).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenoperators_shift_energy() {
        // [H, A(ω)] = −ω A(ω)
        let h = build_spin(&ModelParams::default()).matrix_in_sector(SectorLabel::ICE).unwrap();
        let set = eigenoperators(&h, site(3), tol::FREQUENCY).unwrap();
        for (w, a) in set.frequencies().iter().zip(set.operators()) {
            let comm = h.matrix() * a - a * h.matrix();
            assert!((comm + a * *w).amax() < 1e-8, "ω={w}");
        }
    }
}
