//! Radial kernels with exponential spectral symbols.
//!
//! The Poisson kernel `g_α(x) = (2π)⁻¹ α (α² + |x|²)^{-3/2}` satisfies
//!
//! ```text
//! ∫_{R²} e^{-α|ξ|} e^{i⟨ξ,x⟩} dξ = c_g · g_α(x),   c_g = (2π)²,
//! ```
//!
//! so under the unitary transform its Fourier transform is
//! `(2π)⁻¹ e^{-α|ξ|}`. The generalized kernel is defined directly as the
//! inverse transform `∫ e^{-α|ξ|^ω} e^{i⟨ξ,x⟩} dξ` (no normalization) and is
//! evaluated by radial quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::j0;
use crate::error::{Error, Result};
use crate::quadrature::rule;

/// Convention constant `c_g` relating the Poisson symbol to the spatial
/// kernel. Confirmed by 2D quadrature in `spectral::calibrate_spectral_scale`.
pub const POISSON_SPECTRAL_SCALE: f64 = 4.0 * PI * PI;

/// Default absolute tolerance for generalized-kernel evaluation.
pub const DEFAULT_RADIAL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonKernel {
    alpha: f64,
}

impl PoissonKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `g_α(x)`.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.eval_sq(x[0] * x[0] + x[1] * x[1])
    }

    /// `g_α` at squared radius `r²`.
    pub fn eval_sq(&self, r2: f64) -> f64 {
        let a = self.alpha;
        let s = a * a + r2;
        a / (2.0 * PI * s * s.sqrt())
    }

    /// Spectral symbol `e^{-α|ξ|}`.
    pub fn symbol(&self, xi: [f64; 2]) -> f64 {
        (-self.alpha * xi[0].hypot(xi[1])).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedKernel {
    alpha: f64,
    omega: f64,
}

/// Value of a quadrature-backed radial evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialValue {
    pub value: f64,
    pub abs_err: f64,
}

impl GeneralizedKernel {
    pub fn new(alpha: f64, omega: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if !(omega > 0.0 && omega <= 2.0) {
            return Err(Error::invalid("omega", format!("must lie in (0, 2], got {omega}")));
        }
        Ok(Self { alpha, omega })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Spectral symbol `e^{-α|ξ|^ω}`.
    pub fn symbol(&self, xi: [f64; 2]) -> f64 {
        self.symbol_radius(xi[0].hypot(xi[1]))
    }

    pub fn symbol_radius(&self, rho: f64) -> f64 {
        (-self.alpha * rho.powf(self.omega)).exp()
    }

    /// `2π ∫₀^∞ e^{-αρ^ω} J₀(ρr) ρ dρ` with an absolute error estimate.
    ///
    /// Panels end at the approximate zeros `(k - 1/4)π/r` of `J₀(ρr)`, the
    /// first unit interval is geometrically graded toward the origin (the
    /// symbol is not smooth there unless ω is an even integer), and the
    /// integral is truncated where the incomplete-gamma tail bound drops
    /// below a tenth of the tolerance.
    pub fn eval_radius(&self, r: f64, tol: f64) -> Result<RadialValue> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("must be non-negative, got {r}")));
        }
        let tol = tol.max(1e-15);
        let (cutoff, tail) = self.truncation(0.1 * tol / (2.0 * PI));
        let breaks = self.breakpoints(r, cutoff);
        let lo = rule(16);
        let hi = rule(32);
        let integrand = |rho: f64| (-self.alpha * rho.powf(self.omega)).exp() * j0(rho * r) * rho;
        let mut value = 0.0;
        let mut err = 0.0;
        for w in breaks.windows(2) {
            let fine = hi.integrate(w[0], w[1], integrand);
            let coarse = lo.integrate(w[0], w[1], integrand);
            value += fine;
            err += (fine - coarse).abs();
        }
        let abs_err = 2.0 * PI * (err + tail);
        if abs_err > tol {
            return Err(Error::QuadratureNotConverged {
                estimate: abs_err,
                tolerance: tol,
            });
        }
        Ok(RadialValue {
            value: 2.0 * PI * value,
            abs_err,
        })
    }

    /// Smallest cutoff `T` with `∫_T^∞ e^{-αρ^ω} ρ dρ ≤ target`.
    fn truncation(&self, target: f64) -> (f64, f64) {
        let a = 2.0 / self.omega;
        let prefactor = self.alpha.powf(-a) / self.omega;
        // Γ(a, x) ≤ 2 x^{a-1} e^{-x} once x ≥ 2(a - 1); ≤ x^{a-1} e^{-x} when a ≤ 1.
        let bound = |x: f64| {
            let c = if a > 1.0 { 2.0 } else { 1.0 };
            prefactor * c * x.powf(a - 1.0) * (-x).exp()
        };
        let mut x = (2.0 * (a - 1.0)).max(1.0);
        while bound(x) > target {
            x *= 1.05;
        }
        ((x / self.alpha).powf(1.0 / self.omega), bound(x))
    }

    fn breakpoints(&self, r: f64, cutoff: f64) -> Vec<f64> {
        let first = cutoff.min(1.0);
        let mut pts = vec![0.0];
        let grading = 24;
        for k in (0..grading).rev() {
            pts.push(first * 0.5f64.powi(k));
        }
        let mut cursor = first;
        let mut zero_k = 1.0;
        let half_period = if r > 0.0 { PI / r } else { f64::INFINITY };
        while cursor < cutoff {
            let mut next = (cursor + 1.0).min(cutoff);
            if r > 0.0 {
                // next J0 zero beyond the cursor
                let mut z = (zero_k - 0.25) * half_period;
                while z <= cursor + 1e-12 {
                    zero_k += 1.0;
                    z = (zero_k - 0.25) * half_period;
                }
                next = next.min(z);
            }
            pts.push(next);
            cursor = next;
        }
        pts
    }
}

/// `generalized_eval` as a free function: value and absolute error estimate.
pub fn generalized_eval(kernel: &GeneralizedKernel, r: f64, tol: f64) -> Result<RadialValue> {
    kernel.eval_radius(r, tol)
}

pub fn poisson_eval(kernel: &PoissonKernel, x: [f64; 2]) -> f64 {
    kernel.eval(x)
}

pub fn poisson_symbol(kernel: &PoissonKernel, xi: [f64; 2]) -> f64 {
    kernel.symbol(xi)
}

/// Either kernel, as used by the interpolation engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Kernel {
    Poisson(PoissonKernel),
    Generalized(GeneralizedKernel),
}

impl From<PoissonKernel> for Kernel {
    fn from(k: PoissonKernel) -> Self {
        Kernel::Poisson(k)
    }
}

impl From<GeneralizedKernel> for Kernel {
    fn from(k: GeneralizedKernel) -> Self {
        Kernel::Generalized(k)
    }
}

impl Kernel {
    pub fn alpha(&self) -> f64 {
        match self {
            Kernel::Poisson(k) => k.alpha(),
            Kernel::Generalized(k) => k.alpha(),
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            Kernel::Poisson(_) => 1.0,
            Kernel::Generalized(k) => k.omega(),
        }
    }

    /// Spectral symbol as a function of `|ξ|`.
    pub fn symbol_radius(&self, rho: f64) -> f64 {
        match self {
            Kernel::Poisson(k) => (-k.alpha() * rho).exp(),
            Kernel::Generalized(k) => k.symbol_radius(rho),
        }
    }

    /// Constant `c` in `kernel(x) = c⁻¹ ∫ symbol(ξ) e^{i⟨ξ,x⟩} dξ`.
    pub fn spectral_scale(&self) -> f64 {
        match self {
            Kernel::Poisson(_) => POISSON_SPECTRAL_SCALE,
            Kernel::Generalized(_) => 1.0,
        }
    }

    /// Factor `2π/c` such that the unitary transform of the kernel is
    /// `transform_factor() · symbol(ξ)`.
    pub fn transform_factor(&self) -> f64 {
        2.0 * PI / self.spectral_scale()
    }

    /// Kernel value at radius `r`.
    pub fn radial(&self, r: f64) -> Result<f64> {
        match self {
            Kernel::Poisson(k) => Ok(k.eval_sq(r * r)),
            Kernel::Generalized(k) => Ok(k.eval_radius(r, DEFAULT_RADIAL_TOL)?.value),
        }
    }

    /// Kernel values at many radii. Quadrature-backed kernels evaluate each
    /// distinct radius once.
    pub fn radial_many(&self, radii: &[f64]) -> Result<Vec<f64>> {
        match self {
            Kernel::Poisson(k) => Ok(radii.iter().map(|r| k.eval_sq(r * r)).collect()),
            Kernel::Generalized(k) => {
                let mut distinct: Vec<u64> = radii.iter().map(|r| r.to_bits()).collect();
                distinct.sort_unstable();
                distinct.dedup();
                let values = distinct
                    .par_iter()
                    .map(|&bits| {
                        k.eval_radius(f64::from_bits(bits), DEFAULT_RADIAL_TOL)
                            .map(|v| v.value)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let table: HashMap<u64, f64> = distinct.into_iter().zip(values).collect();
                Ok(radii.iter().map(|r| table[&r.to_bits()]).collect())
            }
        }
    }

    /// Kernel at the difference vector `x`.
    pub fn eval(&self, x: [f64; 2]) -> Result<f64> {
        match self {
            Kernel::Poisson(k) => Ok(k.eval(x)),
            Kernel::Generalized(_) => self.radial(x[0].hypot(x[1])),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Kernel::Poisson(k) => format!("poisson(alpha={})", k.alpha()),
            Kernel::Generalized(k) => {
                format!("generalized(alpha={}, omega={})", k.alpha(), k.omega())
            }
        }
    }
}
