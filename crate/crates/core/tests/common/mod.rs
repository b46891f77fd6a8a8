//! Test-only reference implementations. Nothing here calls into the crate's
//! linear algebra, so agreement with the library is a genuine cross-check.
#![allow(dead_code)]

/// Cyclic Jacobi diagonalisation of a real symmetric matrix stored row-major.
/// Returns ascending eigenvalues and the matching eigenvectors as columns
/// (`vecs[i * n + k]` is component `i` of vector `k`).
pub fn jacobi(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vecs[i * n + new] = v[i * n + old];
        }
    }
    (values, vecs)
}

pub const K_B: f64 = 0.08617333262;

/// The 64 one-proton-per-edge configurations as 12-bit words (bit j-1 is
/// site j), ascending.
pub fn ice_words() -> Vec<u16> {
    let mut out: Vec<u16> = (0u16..64)
        .map(|choice| {
            (0..6).fold(0u16, |w, e| {
                // edge e owns bits 2e and 2e+1
                let bit = if choice >> e & 1 == 1 { 2 * e + 1 } else { 2 * e };
                w | 1 << bit
            })
        })
        .collect();
    out.sort();
    out
}

fn z(word: u16, site: usize) -> f64 {
    if word >> (site - 1) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Ice-sector Hamiltonian from the spin couplings alone, row-major over
/// `ice_words()`. Constant shifts inside the sector are dropped.
pub fn ice_hamiltonian(jx: f64, jz_intra: f64) -> (Vec<u16>, Vec<f64>) {
    let words = ice_words();
    let n = words.len();
    let mut h = vec![0.0; n * n];
    for (col, &w) in words.iter().enumerate() {
        let mut diag = 0.0;
        for j in 1..=6 {
            let a = 2 * j;
            let b = if j == 6 { 1 } else { 2 * j + 1 };
            diag += jz_intra * z(w, a) * z(w, b);
        }
        h[col * n + col] = diag;
        for e in 0..6 {
            // XX + YY moves the proton across the bond with amplitude 2 J_x
            let flipped = w ^ (0b11 << (2 * e));
            let row = words.binary_search(&flipped).expect("flip stays in the ice sector");
            h[row * n + col] += 2.0 * jx;
        }
    }
    (words, h)
}

/// Thermal state of the ice sector, row-major.
pub struct OracleState {
    pub words: Vec<u16>,
    pub rho: Vec<f64>,
    pub weights: Vec<f64>,
    pub energies: Vec<f64>,
    pub vectors: Vec<f64>,
}

pub fn ice_thermal(jx: f64, jz_intra: f64, t: f64) -> OracleState {
    let (words, h) = ice_hamiltonian(jx, jz_intra);
    let n = words.len();
    let (energies, vectors) = jacobi(h, n);
    let beta = 1.0 / (K_B * t);
    let raw: Vec<f64> = energies.iter().map(|e| (-(e - energies[0]) * beta).exp()).collect();
    let zsum: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / zsum).collect();
    let mut rho = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                rho[i * n + j] += weights[k] * vectors[i * n + k] * vectors[j * n + k];
            }
        }
    }
    OracleState { words, rho, weights, energies, vectors }
}

impl OracleState {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn p_bf(&self) -> f64 {
        let n = self.dim();
        let idx = |w: u16| self.words.binary_search(&w).unwrap();
        self.rho[idx(0xAAA) * n + idx(0xAAA)] + self.rho[idx(0x555) * n + idx(0x555)]
    }

    pub fn entropy_bits(&self) -> f64 {
        -self.weights.iter().filter(|&&w| w > 0.0).map(|w| w * w.log2()).sum::<f64>()
    }

    pub fn c_l1(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.rho[i * n + j].abs();
                }
            }
        }
        s
    }

    /// Reduced state of sites `(a, b)` as a 4x4 row-major matrix in the
    /// order |00⟩, |01⟩, |10⟩, |11⟩ (first letter is site `a`).
    pub fn reduced(&self, a: usize, b: usize) -> [[f64; 4]; 4] {
        let n = self.dim();
        let mask = (1u16 << (a - 1)) | (1u16 << (b - 1));
        let local = |w: u16| ((w >> (a - 1) & 1) * 2 + (w >> (b - 1) & 1)) as usize;
        let mut out = [[0.0; 4]; 4];
        for i in 0..n {
            for j in 0..n {
                if self.words[i] & !mask == self.words[j] & !mask {
                    out[local(self.words[i])][local(self.words[j])] += self.rho[i * n + j];
                }
            }
        }
        out
    }
}
