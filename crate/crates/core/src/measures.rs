//! Coherence of the sector state and correlations of two-site reduced states.
//!
//! Local qubit convention: `|0⟩` is an empty site, `|1⟩` an occupied one,
//! `σ_z = |0⟩⟨0| − |1⟩⟨1|`. Two-qubit index is `2·n_first + n_second`, so
//! the first kept site is the first tensor factor. Everything is in bits.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};
use crate::lattice::SiteIndex;
use crate::numerics::{self, entropy_bits, tol, DensityMatrix, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pauli(i: usize) -> Matrix2<C64> {
    let (o, z, im) = (c(1.0), c(0.0), C64::new(0.0, 1.0));
    match i {
        0 => Matrix2::new(z, o, o, z),
        1 => Matrix2::new(z, -im, im, z),
        _ => Matrix2::new(o, z, z, -o),
    }
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// Entropy in bits of a 2×2 Hermitian matrix with the given trace.
fn entropy2(m: &Matrix2<C64>) -> f64 {
    let t = (m[(0, 0)].re + m[(1, 1)].re) / 2.0;
    let d = (m[(0, 0)].re - m[(1, 1)].re) / 2.0;
    let r = (d * d + m[(0, 1)].norm_sqr()).sqrt();
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    (h(t + r) + h(t - r)).max(0.0)
}

/// A 4×4 density matrix of two sites.
#[derive(Clone, Debug)]
pub struct TwoQubitState {
    matrix: Matrix4<C64>,
    sites: Option<(SiteIndex, SiteIndex)>,
}

impl TwoQubitState {
    pub fn new(matrix: Matrix4<C64>) -> Result<Self> {
        let dm = DMatrix::from_fn(4, 4, |i, j| matrix[(i, j)]);
        let residual = numerics::hermiticity_residual(&dm);
        if residual > tol::HERMITICITY {
            return Err(Error::NotHermitian { residual });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::TRACE || trace.im.abs() > tol::TRACE {
            return Err(Error::BadTrace(trace.re));
        }
        let min = numerics::eigh_trusted(&dm).values[0];
        if min < -tol::PSD {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { matrix, sites: None })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn pure(amplitudes: [C64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::BadTrace(norm));
        }
        let m = Matrix4::from_fn(|i, j| amplitudes[i] * amplitudes[j].conj() / norm);
        Self::new((m + m.adjoint()) * c(0.5))
    }

    /// Diagonal state with the given probabilities of `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn diagonal(p: [f64; 4]) -> Result<Self> {
        Self::new(Matrix4::from_diagonal(&p.map(c).into()))
    }

    /// `ρ_a ⊗ ρ_b` from two single-qubit density matrices.
    pub fn product(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Result<Self> {
        Self::new(kron(a, b))
    }

    pub(crate) fn with_sites(mut self, a: SiteIndex, b: SiteIndex) -> Self {
        self.sites = Some((a, b));
        self
    }

    /// The kept sites, when the state came from a partial trace.
    pub fn sites(&self) -> Option<(SiteIndex, SiteIndex)> {
        self.sites
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        numerics::eigh_trusted(&DMatrix::from_fn(4, 4, |i, j| self.matrix[(i, j)])).values
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_bits(&self.eigenvalues())
    }

    /// Reduced state of the first site.
    pub fn first(&self) -> Matrix2<C64> {
        Matrix2::from_fn(|i, j| self.matrix[(2 * i, 2 * j)] + self.matrix[(2 * i + 1, 2 * j + 1)])
    }

    /// Reduced state of the second site.
    pub fn second(&self) -> Matrix2<C64> {
        Matrix2::from_fn(|i, j| self.matrix[(i, j)] + self.matrix[(2 + i, 2 + j)])
    }

    pub fn bloch(&self) -> BlochDecomposition {
        let id = Matrix2::identity();
        let expect = |op: Matrix4<C64>| (self.matrix * op).trace().re;
        BlochDecomposition {
            x: Vector3::from_fn(|i, _| expect(kron(&id, &pauli(i)))),
            y: Vector3::from_fn(|i, _| expect(kron(&pauli(i), &id))),
            t: Matrix3::from_fn(|i, k| expect(kron(&pauli(i), &pauli(k)))),
        }
    }
}

/// Local Bloch vectors and the correlation matrix of a two-qubit state.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochDecomposition {
    /// Second site, `tr[ρ(I⊗σ_i)]`.
    pub x: Vector3<f64>,
    /// First site, `tr[ρ(σ_i⊗I)]`.
    pub y: Vector3<f64>,
    /// `tr[ρ(σ_i⊗σ_k)]`.
    pub t: Matrix3<f64>,
}

/// Sum of absolute off-diagonal elements in the configuration basis.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let mut sum = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                sum += m[(i, j)].norm();
            }
        }
    }
    sum
}

/// `S(diag ρ) − S(ρ)`, clamped to `[0, log₂ d]`.
pub fn c_rel_ent(rho: &DensityMatrix) -> Result<f64> {
    let diag: Vec<f64> = rho.matrix().diagonal().iter().map(|x| x.re).collect();
    let s_diag = entropy_bits(&diag)?;
    let s = numerics::von_neumann_entropy(rho)?;
    Ok((s_diag - s).clamp(0.0, (rho.dim() as f64).log2()))
}

pub fn concurrence(rho: &TwoQubitState) -> f64 {
    let m = DMatrix::from_fn(4, 4, |i, j| rho.matrix[(i, j)]);
    let eig = numerics::eigh_trusted(&m);
    let v = &eig.vectors;
    let sqrt_diag =
        DMatrix::from_diagonal(&eig.values.iter().map(|&l| c(l.max(0.0).sqrt())).collect::<Vec<_>>().into());
    let sqrt_rho = v * sqrt_diag * v.adjoint();
    let yy = kron(&pauli(1), &pauli(1));
    let flipped = yy * rho.matrix.conjugate() * yy;
    let flipped = DMatrix::from_fn(4, 4, |i, j| flipped[(i, j)]);
    let r = &sqrt_rho * flipped * &sqrt_rho;
    let mut lam: Vec<f64> = numerics::eigh_trusted(&r).values.iter().map(|l| l.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    (lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

/// Entanglement of formation as a function of the concurrence.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

pub fn eof(rho: &TwoQubitState) -> f64 {
    eof_from_concurrence(concurrence(rho))
}

/// `S(ρ₁) + S(ρ₂) − S(ρ)`.
pub fn mutual_information(rho: &TwoQubitState) -> Result<f64> {
    let s = rho.entropy()?;
    Ok((entropy2(&rho.first()) + entropy2(&rho.second()) - s).max(0.0))
}

/// Outcome of the discord optimization. The measurement acts on the second
/// site along the Bloch direction `(θ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordAnalysis {
    pub discord: f64,
    pub classical: f64,
    pub mutual_information: f64,
    pub theta: f64,
    pub phi: f64,
}

const GRID_THETA: usize = 64;
const GRID_PHI: usize = 128;
const REFINE_STARTS: usize = 4;
const REFINE_TOL: f64 = 1e-6;

/// Average entropy of the first site after measuring the second one.
struct ConditionalEntropy {
    rho1: Matrix2<C64>,
    m: [Matrix2<C64>; 3],
    x: Vector3<f64>,
}

impl ConditionalEntropy {
    fn new(rho: &TwoQubitState) -> Self {
        let id = Matrix2::identity();
        let m = [0, 1, 2].map(|i| {
            let op = rho.matrix * kron(&id, &pauli(i));
            Matrix2::from_fn(|a, b| op[(2 * a, 2 * b)] + op[(2 * a + 1, 2 * b + 1)])
        });
        Self { rho1: rho.first(), m, x: rho.bloch().x }
    }

    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let nm = self.m[0] * c(n[0]) + self.m[1] * c(n[1]) + self.m[2] * c(n[2]);
        let nx = n[0] * self.x[0] + n[1] * self.x[1] + n[2] * self.x[2];
        let mut total = 0.0;
        for s in [1.0, -1.0] {
            let p = 0.5 * (1.0 + s * nx);
            if p > 1e-15 {
                let cond = (self.rho1 + nm * c(s)) * c(0.5 / p);
                total += p * entropy2(&cond);
            }
        }
        total
    }
}

fn analysis_from_min(rho: &TwoQubitState, cond_min: f64, theta: f64, phi: f64) -> Result<DiscordAnalysis> {
    let s = rho.entropy()?;
    let s1 = entropy2(&rho.first());
    let s2 = entropy2(&rho.second());
    let classical = (s1 - cond_min).max(0.0);
    let discord = (s2 - s + cond_min).max(0.0);
    Ok(DiscordAnalysis { discord, classical, mutual_information: (s1 + s2 - s).max(0.0), theta, phi })
}

/// Discord from a plain `n_theta × n_phi` scan, without refinement.
pub fn discord_on_grid(rho: &TwoQubitState, n_theta: usize, n_phi: usize) -> Result<DiscordAnalysis> {
    let f = ConditionalEntropy::new(rho);
    let (mut best, mut bt, mut bp) = (f64::INFINITY, 0.0, 0.0);
    for (theta, phi) in grid(n_theta, n_phi) {
        let v = f.eval(theta, phi);
        if v < best {
            (best, bt, bp) = (v, theta, phi);
        }
    }
    analysis_from_min(rho, best, bt, bp)
}

fn grid(n_theta: usize, n_phi: usize) -> impl Iterator<Item = (f64, f64)> {
    let dt = std::f64::consts::PI / (n_theta.max(2) - 1) as f64;
    let dp = 2.0 * std::f64::consts::PI / n_phi.max(1) as f64;
    (0..n_theta).flat_map(move |i| (0..n_phi).map(move |k| (i as f64 * dt, k as f64 * dp)))
}

/// Projective-measurement discord with the second site measured: a
/// 64×128 scan over the Bloch sphere, then Nelder–Mead from the four best
/// grid points.
pub fn discord_analysis(rho: &TwoQubitState) -> Result<DiscordAnalysis> {
    let f = ConditionalEntropy::new(rho);
    let mut scan: Vec<(f64, f64, f64)> = grid(GRID_THETA, GRID_PHI).map(|(t, p)| (f.eval(t, p), t, p)).collect();
    scan.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scan[0];
    for &(_, t, p) in scan.iter().take(REFINE_STARTS) {
        let (v, x) = nelder_mead(|x| f.eval(x[0], x[1]), [t, p], 0.05, REFINE_TOL * 1e-3, 400);
        if v < best.0 {
            best = (v, x[0], x[1]);
        }
    }
    analysis_from_min(rho, best.0, best.1, best.2)
}

pub fn quantum_discord(rho: &TwoQubitState) -> Result<f64> {
    discord_analysis(rho).map(|a| a.discord)
}

pub fn classical_correlations(rho: &TwoQubitState) -> Result<f64> {
    discord_analysis(rho).map(|a| a.classical)
}

/// Closed form `(‖x‖² + ‖T‖² − k_max)/4` with `k_max` the top eigenvalue of
/// `x xᵀ + TᵀT`, for measurements on the second site.
pub fn geometric_discord(rho: &TwoQubitState) -> f64 {
    let b = rho.bloch();
    let k = b.x * b.x.transpose() + b.t.transpose() * b.t;
    let k_max = k.symmetric_eigenvalues().max();
    ((b.x.norm_squared() + b.t.norm_squared() - k_max) / 4.0).clamp(0.0, 0.5)
}

/// Minimizes `f` over the plane from `start` with a simplex of size `step`.
/// Stops when the spread of simplex values drops below `ftol`.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64, ftol: f64, max_iter: usize) -> (f64, [f64; 2]) {
    let mut pts = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut vals = pts.map(&f);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..max_iter {
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        if vals[2] - vals[0] < ftol {
            break;
        }
        let centroid = lerp(pts[0], pts[1], 0.5);
        let reflected = lerp(pts[2], centroid, 2.0);
        let fr = f(reflected);
        if fr < vals[0] {
            let expanded = lerp(pts[2], centroid, 3.0);
            let fe = f(expanded);
            (pts[2], vals[2]) = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (reflected, fr);
        } else {
            let contracted = lerp(pts[2], centroid, 0.5);
            let fc = f(contracted);
            if fc < vals[2] {
                (pts[2], vals[2]) = (contracted, fc);
            } else {
                for k in 1..3 {
                    pts[k] = lerp(pts[0], pts[k], 0.5);
                    vals[k] = f(pts[k]);
                }
            }
        }
    }
    let k = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (vals[k], pts[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BasisState;

    fn bell() -> TwoQubitState {
        TwoQubitState::pure([c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap()
    }

    fn werner(p: f64) -> TwoQubitState {
        let b = bell().matrix;
        TwoQubitState::new(b * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0)).unwrap()
    }

    fn classical_pair() -> TwoQubitState {
        TwoQubitState::diagonal([0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    fn product() -> TwoQubitState {
        let a = Matrix2::new(c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3));
        let b = Matrix2::new(c(0.4), c(-0.3), c(-0.3), c(0.6));
        TwoQubitState::product(&a, &b).unwrap()
    }

    fn qubit(states: &[u32]) -> Vec<BasisState> {
        states.iter().map(|&s| BasisState::new(s).unwrap()).collect()
    }

    #[test]
    fn coherence_examples() {
        let plus = DensityMatrix::pure(qubit(&[0, 1]), &[c(1.0), c(1.0)]).unwrap();
        assert!((c_l1(&plus) - 1.0).abs() < 1e-15);
        assert!((c_rel_ent(&plus).unwrap() - 1.0).abs() < 1e-12);
        let diag = DensityMatrix::maximally_mixed(qubit(&[0, 1, 2])).unwrap();
        assert_eq!(c_l1(&diag), 0.0);
        assert!(c_rel_ent(&diag).unwrap().abs() < 1e-15);
    }

    #[test]
    fn coherence_of_cat_mixture_cancels() {
        let basis = qubit(&[0b01, 0b10]);
        let p = DensityMatrix::pure(basis.clone(), &[c(1.0), c(1.0)]).unwrap();
        let m = DensityMatrix::pure(basis, &[c(1.0), c(-1.0)]).unwrap();
        let mix = DensityMatrix::mixture(&[(0.5, &p), (0.5, &m)]).unwrap();
        assert!(c_l1(&mix) < 1e-15);
    }

    #[test]
    fn coherence_phase_invariance() {
        let amps = [c(0.3), C64::new(0.5, 0.1), c(-0.2)];
        let rho = DensityMatrix::pure(qubit(&[0, 1, 2]), &amps).unwrap();
        let phases = [0.3f64, -1.1, 2.0];
        let rotated: Vec<C64> = amps.iter().zip(phases).map(|(a, t)| a * C64::from_polar(1.0, t)).collect();
        let rho2 = DensityMatrix::pure(qubit(&[0, 1, 2]), &rotated).unwrap();
        assert!((c_l1(&rho) - c_l1(&rho2)).abs() < 1e-14);
        assert!((c_rel_ent(&rho).unwrap() - c_rel_ent(&rho2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bell_state_values() {
        let b = bell();
        assert!((concurrence(&b) - 1.0).abs() < 1e-10);
        assert!((eof(&b) - 1.0).abs() < 1e-9);
        let a = discord_analysis(&b).unwrap();
        assert!((a.discord - 1.0).abs() < 1e-6);
        assert!((a.classical - 1.0).abs() < 1e-6);
        assert!((a.mutual_information - 2.0).abs() < 1e-10);
        assert!((geometric_discord(&b) - 0.5).abs() < 1e-12);
        let bl = b.bloch();
        assert!(bl.x.norm() < 1e-15 && (bl.t.norm_squared() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn werner_concurrence() {
        for p in [0.2f64, 0.5, 0.9, 1.0 / 3.0] {
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence(&werner(p)) - expected).abs() < 1e-8, "p={p}");
        }
    }

    #[test]
    fn eof_is_binary_entropy_of_concurrence() {
        assert_eq!(eof_from_concurrence(0.0), 0.0);
        assert!((eof_from_concurrence(1.0) - 1.0).abs() < 1e-15);
        // h((1 + sqrt(15/16))/2), evaluated by hand: p = 0.98412, h ≈ 0.11762
        let p = (1.0 + (1.0f64 - 0.0625).sqrt()) / 2.0;
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((eof_from_concurrence(0.25) - h).abs() < 1e-15);
        assert!((h - 0.117_618_7).abs() < 1e-6);
        let mut last = -1.0;
        for k in 0..=100 {
            let e = eof_from_concurrence(k as f64 / 100.0);
            assert!(e > last);
            last = e;
        }
    }

    #[test]
    fn zero_on_product_and_classical_states() {
        for s in [product(), classical_pair()] {
            assert!(concurrence(&s) < 1e-10);
            assert!(quantum_discord(&s).unwrap() < 1e-5);
            assert!(geometric_discord(&s) < 1e-12);
        }
        let p = product();
        assert!(mutual_information(&p).unwrap() < 1e-10);
        assert!(classical_correlations(&p).unwrap() < 1e-10);
        assert!((classical_correlations(&classical_pair()).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_pair_bloch() {
        let b = classical_pair().bloch();
        assert!(b.x.norm() < 1e-15);
        assert!((b.t - Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0))).amax() < 1e-15);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (v, x) =
            nelder_mead(|x: [f64; 2]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), [0.0, 0.0], 0.1, 1e-14, 1000);
        assert!(v < 1e-12 && (x[0] - 1.0).abs() < 1e-5 && (x[1] + 2.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(TwoQubitState::diagonal([0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(TwoQubitState::diagonal([1.5, -0.5, 0.0, 0.0]).is_err());
    }
}
