use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;

use super::bath::{lamb_shift, rate, BathSpec};
use super::eigen::{sigma_z_eigenbasis, BohrBins};
use crate::error::{Error, Result};
use crate::hamiltonian::SectorMatrix;
use crate::lattice::{BasisState, SiteIndex};
use crate::numerics::{tol, DensityMatrix, C64};
use crate::units::HBAR;

/// Largest block the generator is built for.
pub const MAX_DENSE_DIM: usize = 128;

/// Matrix elements of `σ_z` in the eigenbasis below this are treated as zero.
const NEGLIGIBLE: f64 = 1e-14;

/// Lindblad generator on one Hamiltonian block, in units of 1/ps.
///
/// Internally everything lives in the eigenbasis of `H`, where a density
/// matrix is flattened as `ρ_ab ↦ a·d + b`. The secular generator only
/// couples elements with (nearly) equal Bohr frequency, so it splits into
/// independent dense blocks; each is exponentiated on its own.
pub struct Liouvillian {
    basis: Vec<BasisState>,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
    blocks: Vec<Block>,
    exp_cache: Mutex<HashMap<u64, Arc<Vec<DMatrix<C64>>>>>,
}

struct Block {
    members: Vec<usize>,
    generator: DMatrix<C64>,
    /// Mean of `(ε_a − ε_b)/ħ` over the members, factored out before
    /// exponentiating.
    mean_frequency: f64,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn check_dim(h: &SectorMatrix) -> Result<usize> {
    let d = h.dim();
    if d > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge { dim: d, max: MAX_DENSE_DIM });
    }
    Ok(d)
}

impl Liouvillian {
    /// `−(i/ħ)[H + ħH_LS, ρ] + Σ_j Σ_ω γ(ω) D[A_j(ω)]ρ` with one bath per site
    /// coupled through `σ_z`. Sites whose `σ_z` is constant on the block
    /// drop out.
    pub fn new(h: &SectorMatrix, bath: &BathSpec, include_lamb_shift: bool) -> Result<Self> {
        Self::assemble(h, Some((bath, include_lamb_shift)))
    }

    /// The unitary part alone.
    pub fn hamiltonian_only(h: &SectorMatrix) -> Result<Self> {
        Self::assemble(h, None)
    }

    fn assemble(h: &SectorMatrix, bath: Option<(&BathSpec, bool)>) -> Result<Self> {
        let d = check_dim(h)?;
        let eig = h.eigen();
        let energies = eig.values.clone();
        let i = C64::new(0.0, 1.0);
        let mut entries: Vec<(usize, usize, C64)> = Vec::new();
        for a in 0..d {
            for b in 0..d {
                let k = a * d + b;
                entries.push((k, k, -i * ((energies[a] - energies[b]) / HBAR)));
            }
        }

        if let Some((bath, lamb)) = bath {
            let bins = BohrBins::new(&energies, tol::FREQUENCY)?;
            let rates: Vec<f64> = bins.frequencies().iter().map(|&w| rate(w, bath)).collect();
            let shifts: Option<Vec<f64>> =
                lamb.then(|| bins.frequencies().iter().map(|&w| lamb_shift(w, bath)).collect());
            let pairs = bins.pairs_by_bin();
            let mut decay = DMatrix::<f64>::zeros(d, d);
            let mut h_ls = DMatrix::<f64>::zeros(d, d);

            for site in SiteIndex::all() {
                let occupied = h.basis().iter().filter(|s| s.occupied(site)).count();
                if occupied == 0 || occupied == d {
                    continue;
                }
                let s = sigma_z_eigenbasis(h, site);
                for (k, bin) in pairs.iter().enumerate() {
                    let nz: Vec<(usize, usize, f64)> =
                        bin.iter().map(|&(a, c)| (a, c, s[(a, c)])).filter(|t| t.2.abs() > NEGLIGIBLE).collect();
                    if nz.is_empty() {
                        continue;
                    }
                    let g = rates[k];
                    let shift = shifts.as_ref().map_or(0.0, |v| v[k]);
                    if g != 0.0 {
                        // A ρ A†: ρ_cd → ρ_ab with coefficient A_ac A_bd
                        for &(a, c, x) in &nz {
                            for &(b, dd, y) in &nz {
                                entries.push((a * d + b, c * d + dd, C64::new(g * x * y, 0.0)));
                            }
                        }
                    }
                    // A†A restricted to the bin: (A†A)_ce = Σ_a A_ac A_ae
                    for &(a, c, x) in &nz {
                        for &(a2, e, y) in &nz {
                            if a2 == a {
                                decay[(c, e)] += g * x * y;
                                h_ls[(c, e)] += shift * x * y;
                            }
                        }
                    }
                }
            }

            for a in 0..d {
                for c in 0..d {
                    let kac = decay[(a, c)];
                    let hac = h_ls[(a, c)];
                    if kac == 0.0 && hac == 0.0 {
                        continue;
                    }
                    // −½{K, ρ} − i[H_LS, ρ]
                    let left = C64::new(-0.5 * kac, 0.0) - i * hac;
                    let right = C64::new(-0.5 * kac, 0.0) + i * hac;
                    for b in 0..d {
                        // (Kρ)_ab ∋ K_ac ρ_cb
                        entries.push((a * d + b, c * d + b, left));
                        // (ρK)_bc ∋ ρ_ba K_ac
                        entries.push((b * d + c, b * d + a, right));
                    }
                }
            }
        }

        let n = d * d;
        let mut uf = UnionFind((0..n).collect());
        for &(r, c, v) in &entries {
            if r != c && v != C64::new(0.0, 0.0) {
                uf.union(r, c);
            }
        }
        let mut block_of_root: HashMap<usize, usize> = HashMap::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut position = vec![0usize; n];
        for k in 0..n {
            let root = uf.find(k);
            let b = *block_of_root.entry(root).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            position[k] = members[b].len();
            members[b].push(k);
        }
        let mut generators: Vec<DMatrix<C64>> = members.iter().map(|m| DMatrix::zeros(m.len(), m.len())).collect();
        for (r, c, v) in entries {
            let b = block_of_root[&uf.find(r)];
            generators[b][(position[r], position[c])] += v;
        }
        let blocks = members
            .into_iter()
            .zip(generators)
            .map(|(members, generator)| {
                let mean_frequency = members.iter().map(|&k| (energies[k / d] - energies[k % d]) / HBAR).sum::<f64>()
                    / members.len() as f64;
                Block { members, generator, mean_frequency }
            })
            .collect();

        Ok(Self {
            basis: h.basis().to_vec(),
            energies,
            vectors: eig.vectors.map(|x| C64::new(x, 0.0)),
            blocks,
            exp_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Sizes of the independent blocks of the generator.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.members.len()).collect()
    }

    fn site_to_eigen(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        self.vectors.adjoint() * rho * &self.vectors
    }

    fn eigen_to_site(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        &self.vectors * x * self.vectors.adjoint()
    }

    fn apply_blocks(&self, x: &DMatrix<C64>, ops: &[DMatrix<C64>]) -> DMatrix<C64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for (block, op) in self.blocks.iter().zip(ops) {
            let v =
                nalgebra::DVector::from_iterator(block.members.len(), block.members.iter().map(|&k| x[(k / d, k % d)]));
            let y = op * v;
            for (p, &k) in block.members.iter().enumerate() {
                out[(k / d, k % d)] = y[p];
            }
        }
        out
    }

    /// `L(ρ)` for an operator in the configuration basis.
    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let d = self.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: rho.nrows() });
        }
        let ops: Vec<DMatrix<C64>> = self.blocks.iter().map(|b| b.generator.clone()).collect();
        Ok(self.eigen_to_site(&self.apply_blocks(&self.site_to_eigen(rho), &ops)))
    }

    /// Largest `|Σ_a L_{aa,·}|`: how far the generator is from trace preserving.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for block in &self.blocks {
            for col in 0..block.members.len() {
                let mut sum = C64::new(0.0, 0.0);
                for (row, &k) in block.members.iter().enumerate() {
                    if k / d == k % d {
                        sum += block.generator[(row, col)];
                    }
                }
                worst = worst.max(sum.norm());
            }
        }
        worst
    }

    /// Full `d² × d²` superoperator in the configuration basis, with
    /// `ρ_ab ↦ a·d + b`. Costs `O(d⁵)`.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d * d, d * d);
        for c in 0..d {
            for e in 0..d {
                let mut unit = DMatrix::zeros(d, d);
                unit[(c, e)] = C64::new(1.0, 0.0);
                let col = self.apply(&unit).expect("dimensions match");
                for a in 0..d {
                    for b in 0..d {
                        out[(a * d + b, c * d + e)] = col[(a, b)];
                    }
                }
            }
        }
        out
    }

    fn exponentials(&self, dt: f64) -> Arc<Vec<DMatrix<C64>>> {
        let mut cache = self.exp_cache.lock().expect("cache lock");
        cache
            .entry(dt.to_bits())
            .or_insert_with(|| {
                Arc::new(
                    self.blocks
                        .iter()
                        .map(|b| {
                            let n = b.members.len();
                            let shifted =
                                &b.generator + DMatrix::from_diagonal_element(n, n, C64::new(0.0, b.mean_frequency));
                            (shifted * C64::new(dt, 0.0)).exp() * C64::from_polar(1.0, -b.mean_frequency * dt)
                        })
                        .collect(),
                )
            })
            .clone()
    }

    /// `ρ(t)` on each time of a non-negative, strictly increasing grid (ps).
    pub fn propagate(&self, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
        if rho0.basis() != self.basis.as_slice() {
            return Err(Error::BasisMismatch("initial state is not on the generator's basis".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTimeGrid);
        }
        let mut x = self.site_to_eigen(rho0.matrix());
        let mut t_prev = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if t == 0.0 {
                out.push(rho0.clone());
                continue;
            }
            x = self.apply_blocks(&x, &self.exponentials(t - t_prev));
            t_prev = t;
            let m = self.eigen_to_site(&x);
            let m = (&m + m.adjoint()).unscale(2.0);
            out.push(DensityMatrix::new_unchecked(self.basis.clone(), m));
        }
        Ok(out)
    }

    /// The stationary state, found as the null vector of the single block
    /// that holds the populations.
    pub fn stationary_state(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let holders: Vec<&Block> = self.blocks.iter().filter(|b| b.members.iter().any(|&k| k / d == k % d)).collect();
        if holders.len() != 1 {
            return Err(Error::NonUniqueSteadyState(holders.len()));
        }
        let block = holders[0];
        let svd = block.generator.clone().svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let k = (0..svd.singular_values.len())
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .expect("non-empty block");
        let mut null: Vec<C64> = v_t.row(k).iter().map(|z| z.conj()).collect();
        let trace: C64 = block.members.iter().zip(&null).filter(|(&m, _)| m / d == m % d).map(|(_, z)| *z).sum();
        for z in &mut null {
            *z /= trace;
        }
        let mut x = DMatrix::zeros(d, d);
        for (&m, z) in block.members.iter().zip(&null) {
            x[(m / d, m % d)] = *z;
        }
        let m = self.eigen_to_site(&x);
        let m = (&m + m.adjoint()).unscale(2.0);
        Ok(DensityMatrix::new_unchecked(self.basis.clone(), m))
    }
}
