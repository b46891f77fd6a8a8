use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{ModelParams, DEFAULT_V_INTER};
use crate::lattice::SiteIndex;

pub const DEFAULT_TMIN: f64 = 2.0;
pub const DEFAULT_TMAX: f64 = 150.0;
pub const DEFAULT_TSTEP: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ValidationDepth {
    #[default]
    Quick,
    Full,
}

impl std::str::FromStr for ValidationDepth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            other => Err(Error::InvalidConfig(format!("validation depth must be quick or full, got {other:?}"))),
        }
    }
}

/// Everything a temperature sweep needs.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub params: ModelParams,
    /// Kelvin, strictly increasing and positive.
    pub temperatures: Vec<f64>,
    /// Site pairs; the second site of each pair is the measured one.
    pub pairs: Vec<(SiteIndex, SiteIndex)>,
    pub output_dir: PathBuf,
    /// Accepted for the dynamics path; the sector steady state does not
    /// depend on it.
    pub lamb_shift: bool,
    pub depth: ValidationDepth,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            temperatures: temperature_grid(DEFAULT_TMIN, DEFAULT_TMAX, DEFAULT_TSTEP).expect("default grid"),
            pairs: default_pairs(),
            output_dir: PathBuf::from("out"),
            lamb_shift: false,
            depth: ValidationDepth::Quick,
        }
    }
}

fn default_pairs() -> Vec<(SiteIndex, SiteIndex)> {
    let s = |i| SiteIndex::new(i).expect("valid site");
    vec![(s(1), s(2)), (s(2), s(3))]
}

/// `tmin, tmin + step, …` up to `tmax` inclusive (with a small allowance for
/// rounding). Each point is computed from its index, not accumulated.
pub fn temperature_grid(tmin: f64, tmax: f64, tstep: f64) -> Result<Vec<f64>> {
    if !(tmin.is_finite() && tmax.is_finite() && tstep.is_finite()) {
        return Err(Error::InvalidConfig("temperature grid bounds must be finite".into()));
    }
    if tmin <= 0.0 {
        return Err(Error::InvalidConfig(format!("tmin = {tmin} K must be positive")));
    }
    if tmax < tmin {
        return Err(Error::InvalidConfig(format!("tmax = {tmax} K is below tmin = {tmin} K")));
    }
    if tstep <= 0.0 {
        return Err(Error::InvalidConfig(format!("tstep = {tstep} K must be positive")));
    }
    let n = ((tmax - tmin) / tstep + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|k| tmin + k as f64 * tstep).collect())
}

/// Parses `"1:2,2:3"`.
pub fn parse_pairs(text: &str) -> Result<Vec<(SiteIndex, SiteIndex)>> {
    text.split(',')
        .map(|item| {
            let (a, b) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::InvalidConfig(format!("pair {item:?} is not of the form i:j")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidConfig(format!("site {s:?} is not an integer")))
                    .and_then(|v| SiteIndex::new(v).map_err(|e| Error::InvalidConfig(e.to_string())))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "J")]
    j: Option<f64>,
    #[serde(rename = "V_intra")]
    v_intra: Option<f64>,
    #[serde(rename = "J_x")]
    jx: Option<f64>,
    #[serde(rename = "J_z_intra")]
    jz_intra: Option<f64>,
    #[serde(rename = "W")]
    w: Option<f64>,
    #[serde(rename = "V_inter")]
    v_inter: Option<f64>,
    lambda: Option<f64>,
    tmin: Option<f64>,
    tmax: Option<f64>,
    tstep: Option<f64>,
    temperatures: Option<Vec<f64>>,
    pairs: Option<String>,
    out: Option<PathBuf>,
    lamb_shift: Option<bool>,
    depth: Option<String>,
}

impl SweepConfig {
    /// Reads a flat TOML file. Lattice parameters are given either as
    /// `J`/`V_intra` or as `J_x`/`J_z_intra` (meV); `W`, `V_inter`, `lambda`
    /// are optional. The grid is `tmin`/`tmax`/`tstep` or an explicit
    /// `temperatures` list; `pairs = "1:2,2:3"`.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let defaults = ModelParams::default();
        let (j, v_intra) = match (raw.j.is_some() || raw.v_intra.is_some(), raw.jx.is_some() || raw.jz_intra.is_some())
        {
            (true, true) => {
                return Err(Error::InvalidConfig("give either J/V_intra or J_x/J_z_intra, not both".into()));
            }
            (_, true) => {
                (raw.jx.map_or(defaults.j(), |jx| -2.0 * jx), raw.jz_intra.map_or(defaults.v_intra(), |jz| 4.0 * jz))
            }
            _ => (raw.j.unwrap_or(defaults.j()), raw.v_intra.unwrap_or(defaults.v_intra())),
        };
        let params = ModelParams::new(
            raw.w.unwrap_or(0.0),
            j,
            raw.v_inter.unwrap_or(DEFAULT_V_INTER),
            v_intra,
            raw.lambda.unwrap_or(0.0),
        )
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;

        let grid_keys = raw.tmin.is_some() || raw.tmax.is_some() || raw.tstep.is_some();
        let temperatures = match raw.temperatures {
            Some(_) if grid_keys => {
                return Err(Error::InvalidConfig("give either temperatures or tmin/tmax/tstep, not both".into()));
            }
            Some(list) => list,
            None => temperature_grid(
                raw.tmin.unwrap_or(DEFAULT_TMIN),
                raw.tmax.unwrap_or(DEFAULT_TMAX),
                raw.tstep.unwrap_or(DEFAULT_TSTEP),
            )?,
        };
        let config = Self {
            params,
            temperatures,
            pairs: raw.pairs.as_deref().map(parse_pairs).transpose()?.unwrap_or_else(default_pairs),
            output_dir: raw.out.unwrap_or_else(|| PathBuf::from("out")),
            lamb_shift: raw.lamb_shift.unwrap_or(false),
            depth: raw.depth.as_deref().map(str::parse).transpose()?.unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.temperatures.is_empty() {
            return Err(Error::InvalidConfig("temperature grid is empty".into()));
        }
        if let Some(t) = self.temperatures.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::InvalidConfig(format!("temperature {t} K must be positive and finite")));
        }
        if self.temperatures.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("temperatures must be strictly increasing".into()));
        }
        if let Some((a, _)) = self.pairs.iter().find(|(a, b)| a == b) {
            return Err(Error::InvalidConfig(format!("pair ({a}, {a}) repeats a site")));
        }
        Ok(())
    }
}
