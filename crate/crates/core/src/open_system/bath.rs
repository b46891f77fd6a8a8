use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::units::{HBAR, K_B};

pub const DEFAULT_ETA: f64 = 0.01;
/// meV
pub const DEFAULT_OMEGA_C: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralDensity {
    /// `J(ω) = η ω e^{−ω/ω_c}`
    OhmicExponential,
}

/// Thermal bath seen by each site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    kind: SpectralDensity,
    eta: f64,
    omega_c: f64,
    temperature: f64,
}

impl BathSpec {
    pub fn ohmic(eta: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidBath(format!("coupling {eta} must be positive")));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::InvalidBath(format!("cutoff {omega_c} meV must be positive")));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidTemperature(temperature));
        }
        Ok(Self { kind: SpectralDensity::OhmicExponential, eta, omega_c, temperature })
    }

    /// Ohmic bath with the default coupling and cutoff.
    pub fn at_temperature(temperature: f64) -> Result<Self> {
        Self::ohmic(DEFAULT_ETA, DEFAULT_OMEGA_C, temperature)
    }

    pub fn kind(&self) -> SpectralDensity {
        self.kind
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `J(ω)` for `ω ≥ 0`, in meV.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        match self.kind {
            SpectralDensity::OhmicExponential => self.eta * omega * (-omega / self.omega_c).exp(),
        }
    }

    /// `J(ω)/ω` at `ω ≥ 0`, finite at zero.
    fn density_over_omega(&self, omega: f64) -> f64 {
        match self.kind {
            SpectralDensity::OhmicExponential => self.eta * (-omega / self.omega_c).exp(),
        }
    }

    /// `ω·n_B(ω)` for `ω ≥ 0`; tends to `k_B T` at zero.
    fn omega_occupation(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            return 0.0;
        }
        let kt = K_B * self.temperature;
        if omega == 0.0 {
            kt
        } else {
            omega / (omega / kt).exp_m1()
        }
    }
}

/// Transition rate `γ(ω)` in 1/ps. Positive `ω` is emission into the bath.
pub fn rate(omega: f64, bath: &BathSpec) -> f64 {
    let a = omega.abs();
    let j_over = bath.density_over_omega(a);
    let n_part = bath.omega_occupation(a);
    // ω(1 + n) = ω + ω n
    let thermal = if omega > 0.0 { a + n_part } else { n_part };
    2.0 * PI * j_over * thermal / HBAR
}

/// Lamb-shift coefficient `S(ω)` in 1/ps:
/// `P∫₀^∞ dx J(x) [(1 + n(x))/(ω − x) + n(x)/(ω + x)] / ħ`.
pub fn lamb_shift(omega: f64, bath: &BathSpec) -> f64 {
    let upper = 60.0 * bath.omega_c;
    let tol = 1e-10 * bath.eta * bath.omega_c;
    if omega == 0.0 {
        // the two principal values combine into −∫ J(x)/x dx
        return -adaptive_simpson(&|x| bath.density_over_omega(x), 0.0, upper, tol) / HBAR;
    }
    let emission = |x: f64| x * bath.density_over_omega(x) + bath.density_over_omega(x) * bath.omega_occupation(x);
    let absorption = |x: f64| bath.density_over_omega(x) * bath.omega_occupation(x);
    let first = principal_value(&emission, omega, upper, tol);
    let second = -principal_value(&absorption, -omega, upper, tol);
    (first + second) / HBAR
}

/// `P∫₀^X g(x)/(a − x) dx`.
fn principal_value(g: &dyn Fn(f64) -> f64, a: f64, upper: f64, tol: f64) -> f64 {
    if a <= 0.0 || a >= upper {
        return adaptive_simpson(&|x| g(x) / (a - x), 0.0, upper, tol);
    }
    let ga = g(a);
    let h = 1e-6 * a;
    let lo = (a - h).max(0.0);
    let slope = (g(a + h) - g(lo)) / (a + h - lo);
    let smooth = |x: f64| {
        if (x - a).abs() < 1e-9 * a.max(1.0) {
            -slope
        } else {
            (g(x) - ga) / (a - x)
        }
    };
    adaptive_simpson(&smooth, 0.0, a, tol) + adaptive_simpson(&smooth, a, upper, tol) + ga * (a / (upper - a)).ln()
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    // split up front so narrow features near the origin are resolved
    let mut edges = vec![a];
    let mut x = (b - a) / 2f64.powi(30);
    while a + x < b {
        edges.push(a + x);
        x *= 2.0;
    }
    edges.push(b);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += step(f, lo, hi, fa, fm, fb, whole, tol / edges.len() as f64, 40);
    }
    total
}
