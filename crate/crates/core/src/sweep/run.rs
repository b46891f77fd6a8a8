use rayon::prelude::*;

use super::config::SweepConfig;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_spin, SectorMatrix};
use crate::lattice::{SectorLabel, SiteIndex};
use crate::measures::{c_l1, c_rel_ent, concurrence, discord_analysis, eof_from_concurrence, geometric_discord};
use crate::numerics::{gibbs, partial_trace, von_neumann_entropy};
use crate::open_system::p_bf;

/// Correlations of one site pair at one temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRecord {
    pub sites: (SiteIndex, SiteIndex),
    pub concurrence: f64,
    pub eof_bits: f64,
    pub discord_bits: f64,
    pub geo_discord: f64,
    pub mutual_info_bits: f64,
    pub classical_j_bits: f64,
}

/// Observables of the ice-sector steady state at one temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub temperature: f64,
    pub p_bf: f64,
    pub entropy_bits: f64,
    pub c_l1: f64,
    pub c_rel_bits: f64,
    pub pairs: Vec<PairRecord>,
}

impl SweepRecord {
    pub fn pair(&self, a: u8, b: u8) -> Option<&PairRecord> {
        self.pairs.iter().find(|p| p.sites.0.get() == a && p.sites.1.get() == b)
    }
}

/// All observables at one temperature for a prepared ice-sector Hamiltonian.
pub fn evaluate(h: &SectorMatrix, temperature: f64, pairs: &[(SiteIndex, SiteIndex)]) -> Result<SweepRecord> {
    let rho = gibbs(h, temperature)?;
    let mut pair_records = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        let reduced = partial_trace(&rho, (a, b))?;
        let c = concurrence(&reduced);
        let d = discord_analysis(&reduced)?;
        pair_records.push(PairRecord {
            sites: (a, b),
            concurrence: c,
            eof_bits: eof_from_concurrence(c),
            discord_bits: d.discord,
            geo_discord: geometric_discord(&reduced),
            mutual_info_bits: d.mutual_information,
            classical_j_bits: d.classical,
        });
    }
    let record = SweepRecord {
        temperature,
        p_bf: p_bf(&rho)?,
        entropy_bits: von_neumann_entropy(&rho)?,
        c_l1: c_l1(&rho),
        c_rel_bits: c_rel_ent(&rho)?,
        pairs: pair_records,
    };
    let finite = [record.p_bf, record.entropy_bits, record.c_l1, record.c_rel_bits].iter().all(|x| x.is_finite())
        && record.pairs.iter().all(|p| {
            [p.concurrence, p.eof_bits, p.discord_bits, p.geo_discord, p.mutual_info_bits, p.classical_j_bits]
                .iter()
                .all(|x| x.is_finite())
        });
    if !finite {
        return Err(Error::NonFiniteSpectrum);
    }
    Ok(record)
}

/// Evaluates every temperature of the grid in parallel; records come back in
/// grid order. The first failing temperature is reported.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let h = build_spin(&config.params).matrix_in_sector(SectorLabel::ICE)?;
    h.eigen();
    config
        .temperatures
        .par_iter()
        .map(|&t| {
            evaluate(&h, t, &config.pairs).map_err(|e| Error::AtTemperature { temperature: t, source: Box::new(e) })
        })
        .collect()
}
