use std::fmt;

use nalgebra::{DMatrix, Matrix4};

use super::config::ValidationDepth;
use crate::error::Result;
use crate::hamiltonian::{build_fermionic_sector, build_spin, fermionic_diagonal, ModelParams, Pauli, SpinHamiltonian};
use crate::lattice::{classify, enumerate_sector, BasisState, DefectClass, SectorLabel, HILBERT_DIM};
use crate::measures::{concurrence, geometric_discord, quantum_discord, TwoQubitState};
use crate::numerics::{eigh, gibbs, max_abs_diff, tol, trace_distance, DensityMatrix, C64};
use crate::open_system::{rate, steady_state_ice, BathSpec, Liouvillian};
use crate::units::K_B;

/// A deliberate defect in the pseudo-spin builder, used to show that the
/// checks catch it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fault {
    /// Multiply every XX and YY coefficient by this factor.
    HoppingScale(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.threshold
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<48} residual {:.3e}  (limit {:.1e})", self.name, self.residual, self.threshold)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, residual: f64, threshold: f64) {
        // NaN residuals must fail
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks.push(Check { name: name.into(), residual, threshold });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn spin_hamiltonian(params: &ModelParams, fault: Option<Fault>) -> SpinHamiltonian {
    let mut terms = build_spin(params).terms().to_vec();
    if let Some(Fault::HoppingScale(k)) = fault {
        for t in &mut terms {
            if t.letters.iter().any(|p| matches!(p, Pauli::X | Pauli::Y)) {
                t.coefficient *= k;
            }
        }
    }
    SpinHamiltonian::from_terms(terms)
}

fn quick_sectors() -> Vec<SectorLabel> {
    [[1, 1, 1, 1, 1, 1], [0; 6], [2; 6], [1, 1, 1, 1, 1, 0], [2, 0, 1, 1, 0, 1], [1, 2, 1, 0, 1, 2]]
        .into_iter()
        .map(|o| SectorLabel::new(o).expect("valid occupancies"))
        .collect()
}

/// Largest eigenvalue mismatch between the two builders on one sector.
pub fn spectral_mismatch(params: &ModelParams, spin: &SpinHamiltonian, label: SectorLabel) -> Result<f64> {
    let f = build_fermionic_sector(params, label)?;
    let s = spin.matrix_in_sector(label)?;
    Ok(f.eigen().values.iter().zip(&s.eigen().values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Runs the invariant suite on `params`. `fault` perturbs only the
/// pseudo-spin builder used in the mapping checks.
pub fn validate(params: &ModelParams, depth: ValidationDepth, fault: Option<Fault>) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let spin = spin_hamiltonian(params, fault);

    // lattice bookkeeping
    let mut counts = [0i64; 3];
    for s in BasisState::all() {
        counts[match classify(s) {
            DefectClass::IceRule => 0,
            DefectClass::Ionic => 1,
            DefectClass::Bjerrum => 2,
        }] += 1;
    }
    let count_err = (counts[0] - 2).abs() + (counts[1] - 62).abs() + (counts[2] - 4032).abs();
    report.push("classification counts 2/62/4032", count_err as f64, 0.0);
    let total: usize = SectorLabel::all().map(|l| l.dim()).sum();
    report.push("sector sizes sum to 4096", (total as f64 - HILBERT_DIM as f64).abs(), 0.0);

    // fermion/spin mapping
    let diag = BasisState::all().map(|s| (fermionic_diagonal(params, s) - spin.diagonal(s)).abs()).fold(0.0, f64::max);
    report.push("mapping: diagonal equivalence", diag, 1e-10);
    let sectors: Vec<SectorLabel> = match depth {
        ValidationDepth::Quick => quick_sectors(),
        ValidationDepth::Full => SectorLabel::all().collect(),
    };
    let mut worst = 0.0f64;
    for label in &sectors {
        worst = worst.max(spectral_mismatch(params, &spin, *label)?);
    }
    let name = match depth {
        ValidationDepth::Quick => "mapping: spectral equivalence (sample sectors)",
        ValidationDepth::Full => "mapping: spectral equivalence (all 729 sectors)",
    };
    report.push(name, worst, 1e-10);

    // dense linear algebra on the ice block
    let h = build_spin(params).matrix_in_sector(SectorLabel::ICE)?;
    let m = h.matrix();
    let e = eigh(m)?;
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
    let recon = (m - &e.vectors * lambda * e.vectors.transpose()).amax() / m.amax();
    report.push("eigh reconstruction (ice sector)", recon, tol::EIGEN_RESIDUAL);
    let ortho = (e.vectors.transpose() * &e.vectors - DMatrix::identity(m.nrows(), m.ncols())).amax();
    report.push("eigh orthonormality (ice sector)", ortho, tol::ORTHONORMALITY);
    let rho = gibbs(&h, 60.0)?;
    let hc = m.map(|x| C64::new(x, 0.0));
    let comm = (&hc * rho.matrix() - rho.matrix() * &hc).camax() / m.amax();
    report.push("gibbs commutes with H at 60 K", comm, 1e-10);

    // only J_x and J_z^intra matter inside the ice sector
    let mut reduction = 0.0f64;
    for t in [5.0, 60.0, 150.0] {
        let base = steady_state_ice(params, t)?;
        for variant in [
            params.with_on_site(50.0)?,
            params.with_v_inter(0.0)?,
            params.with_v_inter(400.0)?,
            params.with_lambda(10.0)?,
        ] {
            reduction = reduction.max(max_abs_diff(base.matrix(), steady_state_ice(&variant, t)?.matrix()));
        }
    }
    report.push("ice state independent of W, V_inter, lambda", reduction, 1e-10);

    // bath
    let mut kms = 0.0f64;
    for t in [5.0, 60.0, 150.0] {
        let bath = BathSpec::at_temperature(t)?;
        for w in [1e-3, 0.3, 4.0, 40.0] {
            let expected = (-w / (K_B * t)).exp();
            if expected > 1e-300 {
                kms = kms.max((rate(-w, &bath) / rate(w, &bath) / expected - 1.0).abs());
            }
        }
    }
    report.push("rates obey detailed balance", kms, 1e-12);

    // reference two-qubit states
    let c = |x: f64| C64::new(x, 0.0);
    let bell = TwoQubitState::pure([c(0.0), c(1.0), c(1.0), c(0.0)])?;
    report.push("bell: concurrence = 1", (concurrence(&bell) - 1.0).abs(), 1e-5);
    report.push("bell: discord = 1 bit", (quantum_discord(&bell)? - 1.0).abs(), 1e-5);
    report.push("bell: geometric discord = 1/2", (geometric_discord(&bell) - 0.5).abs(), 1e-5);
    let classical = TwoQubitState::diagonal([0.5, 0.0, 0.0, 0.5])?;
    let zero = concurrence(&classical).max(quantum_discord(&classical)?).max(geometric_discord(&classical));
    report.push("classically correlated state: all measures 0", zero, 1e-5);
    let mut werner = 0.0f64;
    for p in [0.2, 0.5, 0.9] {
        let w = TwoQubitState::new(bell.matrix() * c(p) + Matrix4::identity() * c((1.0 - p) / 4.0))?;
        werner = werner.max((concurrence(&w) - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs());
    }
    report.push("werner concurrence", werner, 1e-8);

    // dynamics on the one-proton edge block
    let edge = edge_block(params)?;
    let bath = BathSpec::at_temperature(60.0)?;
    let l = Liouvillian::new(&edge, &bath, false)?;
    report.push("edge block: trace preservation", l.trace_residual(), 1e-10);
    let start = DensityMatrix::basis_state(edge.basis().to_vec(), edge.basis()[0])?;
    let end = l.propagate(&start, &[2000.0])?.pop().expect("one time");
    report.push("edge block: relaxes to thermal state", trace_distance(&end, &gibbs(&edge, 60.0)?)?, 1e-6);

    if depth == ValidationDepth::Full {
        for t in [20.0, 60.0, 120.0] {
            let (fixed, distance, trace) = ice_dynamics_check(params, t)?;
            report.push(format!("ice sector {t} K: trace preservation"), trace, 1e-10);
            report.push(format!("ice sector {t} K: fixed-point residual"), fixed, 1e-8);
            report.push(format!("ice sector {t} K: propagation reaches steady state"), distance, 1e-6);
        }
    }
    Ok(report)
}

/// Sites 1 and 2 with one proton between them.
pub fn edge_block(params: &ModelParams) -> Result<crate::hamiltonian::SectorMatrix> {
    let terms =
        build_spin(params).terms().iter().filter(|t| t.letters[2..].iter().all(|p| *p == Pauli::I)).cloned().collect();
    SpinHamiltonian::from_terms(terms).matrix_on_basis(vec![BasisState::new(0b01)?, BasisState::new(0b10)?])
}

/// Time (ps) used for the long-time limit of the ice-sector dynamics.
pub const ICE_RELAXATION_TIME: f64 = 20_000.0;

/// `(‖L(ρ_∞)‖_max, trace distance after long propagation, trace residual)`
/// for the ice sector at temperature `t`, starting from an ice-rule state.
pub fn ice_dynamics_check(params: &ModelParams, t: f64) -> Result<(f64, f64, f64)> {
    let h = build_spin(params).matrix_in_sector(SectorLabel::ICE)?;
    let l = Liouvillian::new(&h, &BathSpec::at_temperature(t)?, false)?;
    let analytic = gibbs(&h, t)?;
    let fixed = l.apply(analytic.matrix())?.camax();
    let start = DensityMatrix::basis_state(enumerate_sector(SectorLabel::ICE), BasisState::ICE_B)?;
    let end = l.propagate(&start, &[ICE_RELAXATION_TIME])?.pop().expect("one time");
    Ok((fixed, trace_distance(&end, &analytic)?, l.trace_residual()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_validation_passes() {
        let report = validate(&ModelParams::default(), ValidationDepth::Quick, None).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn hopping_fault_is_caught_by_the_spectrum_only() {
        let report = validate(&ModelParams::default(), ValidationDepth::Quick, Some(Fault::HoppingScale(2.0))).unwrap();
        assert!(report.get("mapping: diagonal equivalence").unwrap().passed());
        assert!(!report.get("mapping: spectral equivalence (sample sectors)").unwrap().passed());
        assert!(!report.passed());
    }
}
