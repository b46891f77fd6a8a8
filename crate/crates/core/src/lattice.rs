//! The twelve proton sites of a hexagonal OH⁻ ring.
//!
//! Sites are numbered 1..=12 around the ring. Sites `2j-1` and `2j` share
//! edge `j` (one H-bond); sites `2j` and `2j+1` (mod 12) sit next to the same
//! vertex. A configuration of protons is a 12-bit word: bit `j-1` is set when
//! site `j` is occupied. Kets are printed with site 1 leftmost, so
//! `|100000000000⟩` is the word `0x001`.

use std::fmt;

use crate::error::{Error, Result};

pub const NUM_SITES: usize = 12;
pub const NUM_EDGES: usize = 6;
pub const HILBERT_DIM: usize = 1 << NUM_SITES;

/// A lattice site, 1..=12.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex(u8);

impl SiteIndex {
    pub fn new(value: i64) -> Result<Self> {
        if (1..=NUM_SITES as i64).contains(&value) {
            Ok(Self(value as u8))
        } else {
            Err(Error::InvalidSite(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Bit mask of this site inside a [`BasisState`].
    pub fn mask(self) -> u16 {
        1 << (self.0 - 1)
    }

    /// Zero-based index of the edge this site belongs to.
    pub fn edge(self) -> usize {
        (self.0 as usize - 1) / 2
    }

    /// The other site on the same edge.
    pub fn edge_partner(self) -> SiteIndex {
        if self.0 % 2 == 1 {
            Self(self.0 + 1)
        } else {
            Self(self.0 - 1)
        }
    }

    /// The other site next to the same vertex (12 pairs with 1).
    pub fn vortex_partner(self) -> SiteIndex {
        match self.0 {
            12 => Self(1),
            1 => Self(12),
            v if v % 2 == 0 => Self(v + 1),
            v => Self(v - 1),
        }
    }

    pub fn all() -> impl Iterator<Item = SiteIndex> {
        (1..=NUM_SITES as u8).map(SiteIndex)
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The six edge pairs `(2j-1, 2j)`.
pub fn edge_pairs() -> [(SiteIndex, SiteIndex); NUM_EDGES] {
    std::array::from_fn(|j| (SiteIndex(2 * j as u8 + 1), SiteIndex(2 * j as u8 + 2)))
}

/// The six vertex pairs `(2j, 2j+1 mod 12)`; the last one is `(12, 1)`.
pub fn vortex_pairs() -> [(SiteIndex, SiteIndex); NUM_EDGES] {
    std::array::from_fn(|j| {
        let a = 2 * j as u8 + 2;
        (SiteIndex(a), SiteIndex(a % NUM_SITES as u8 + 1))
    })
}

/// A computational basis state: one proton configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState(u16);

impl BasisState {
    /// `|010101010101⟩`, protons on every even site.
    pub const ICE_B: BasisState = BasisState(0b1010_1010_1010);
    /// `|101010101010⟩`, protons on every odd site.
    pub const ICE_C: BasisState = BasisState(0b0101_0101_0101);
    pub const EMPTY: BasisState = BasisState(0);
    pub const FULL: BasisState = BasisState(0xfff);

    pub fn new(bits: u32) -> Result<Self> {
        if bits < HILBERT_DIM as u32 {
            Ok(Self(bits as u16))
        } else {
            Err(Error::InvalidBasisState(bits))
        }
    }

    /// Parses a printed ket such as `"010101010101"` or `"|010101010101⟩"`.
    pub fn from_ket(ket: &str) -> Result<Self> {
        let digits: Vec<char> = ket.trim().trim_start_matches('|').trim_end_matches(['⟩', '>']).chars().collect();
        if digits.len() != NUM_SITES {
            return Err(Error::InvalidConfig(format!("ket {ket:?} must have 12 digits")));
        }
        let mut bits = 0u16;
        for (k, c) in digits.iter().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << k,
                _ => return Err(Error::InvalidConfig(format!("ket {ket:?} has a non-binary digit"))),
            }
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn occupied(self, site: SiteIndex) -> bool {
        self.0 & site.mask() != 0
    }

    pub fn proton_count(self) -> u32 {
        self.0.count_ones()
    }

    /// Toggles the occupation of every site in `mask`.
    pub fn flipped(self, mask: u16) -> BasisState {
        BasisState(self.0 ^ mask)
    }

    pub fn ket(self) -> String {
        SiteIndex::all().map(|s| if self.occupied(s) { '1' } else { '0' }).collect()
    }

    pub fn all() -> impl Iterator<Item = BasisState> {
        (0..HILBERT_DIM as u16).map(BasisState)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.ket())
    }
}

/// Per-edge proton occupancies; these are conserved by the Hamiltonian and by
/// the dephasing coupling, so each label spans an invariant subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorLabel([u8; NUM_EDGES]);

impl SectorLabel {
    /// One proton per edge: the 64-dimensional ice sector.
    pub const ICE: SectorLabel = SectorLabel([1; NUM_EDGES]);

    pub fn new(occupancy: [u8; NUM_EDGES]) -> Result<Self> {
        match occupancy.iter().find(|&&n| n > 2) {
            Some(&n) => Err(Error::InvalidOccupancy(n)),
            None => Ok(Self(occupancy)),
        }
    }

    pub fn occupancy(&self) -> [u8; NUM_EDGES] {
        self.0
    }

    pub fn proton_count(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.0.iter().filter(|&&n| n == 1).count()
    }

    pub fn has_bjerrum(&self) -> bool {
        self.0.contains(&2)
    }

    /// All 3⁶ = 729 labels in lexicographic order.
    pub fn all() -> impl Iterator<Item = SectorLabel> {
        (0..729u32).map(|mut code| {
            let mut occ = [0u8; NUM_EDGES];
            for slot in occ.iter_mut().rev() {
                *slot = (code % 3) as u8;
                code /= 3;
            }
            SectorLabel(occ)
        })
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefectClass {
    /// One of the two Bernal–Fowler configurations.
    IceRule,
    /// One proton per edge, but some vertex holds zero or two protons.
    Ionic,
    /// Any other configuration (a doubly occupied bond, or an empty one).
    Bjerrum,
}

/// Classifies a configuration. Everything outside the one-proton-per-edge
/// sector counts as Bjerrum, including configurations with empty bonds.
pub fn classify(state: BasisState) -> DefectClass {
    if sector_of(state) != SectorLabel::ICE {
        DefectClass::Bjerrum
    } else if state == BasisState::ICE_B || state == BasisState::ICE_C {
        DefectClass::IceRule
    } else {
        DefectClass::Ionic
    }
}

pub fn sector_of(state: BasisState) -> SectorLabel {
    let mut occ = [0u8; NUM_EDGES];
    for (j, (a, b)) in edge_pairs().into_iter().enumerate() {
        occ[j] = state.occupied(a) as u8 + state.occupied(b) as u8;
    }
    SectorLabel(occ)
}

/// Members of a sector in ascending bit order.
pub fn enumerate_sector(label: SectorLabel) -> Vec<BasisState> {
    let mut states = vec![0u16];
    for (j, &n) in label.0.iter().enumerate() {
        let lo = 1u16 << (2 * j);
        let hi = lo << 1;
        let choices: &[u16] = match n {
            0 => &[0],
            1 => &[lo, hi],
            _ => &[lo | hi],
        };
        states = states.iter().flat_map(|&s| choices.iter().map(move |&c| s | c)).collect();
    }
    states.sort_unstable();
    states.into_iter().map(BasisState).collect()
}
