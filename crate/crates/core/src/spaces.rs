//! Band-limited test functions with radial spectra on the ball `B_β`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::{j0, j1_over_z};
use crate::error::{Error, Result};
use crate::kernels::RadialValue;
use crate::nodes::{BandSquare, NodeSet};
use crate::quadrature::rule;

/// `3 - √8`: recovery holds for `β < (3 - √8) δ`.
pub const RECOVERY_RATIO: f64 = 3.0 - 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BandRegion {
    Ball { beta: f64 },
    Square { delta: f64 },
}

impl BandRegion {
    pub fn ball(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        Ok(BandRegion::Ball { beta })
    }

    pub fn square(delta: f64) -> Result<Self> {
        BandSquare::new(delta)?;
        Ok(BandRegion::Square { delta })
    }

    /// Radius of the smallest centered disk containing the region.
    pub fn outer_radius(&self) -> f64 {
        match *self {
            BandRegion::Ball { beta } => beta,
            BandRegion::Square { delta } => delta * std::f64::consts::SQRT_2,
        }
    }

    pub fn contains(&self, xi: [f64; 2]) -> bool {
        match *self {
            BandRegion::Ball { beta } => xi[0].hypot(xi[1]) <= beta,
            BandRegion::Square { delta } => xi[0].abs() <= delta && xi[1].abs() <= delta,
        }
    }

    /// Whether the region lies inside `S_δ`.
    pub fn fits_in(&self, band: BandSquare) -> bool {
        match *self {
            BandRegion::Ball { beta } => beta <= band.delta(),
            BandRegion::Square { delta } => delta <= band.delta(),
        }
    }
}

/// Radial spectral profile on the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    Indicator,
    /// `F(ξ) = c₀ + c₁ (1 - |ξ|²/β²)` on `B_β`.
    RadialPolynomial { c0: f64, c1: f64 },
}

/// A Paley–Wiener function with spectrum supported on `B_β`.
///
/// `f(x) = (2π)⁻¹ ∫_{B_β} F(ξ) e^{i⟨ξ,x⟩} dξ = ∫₀^β F(ρ) J₀(ρ|x|) ρ dρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandlimitedFunction {
    beta: f64,
    profile: Profile,
}

/// `f(x) = β J₁(β|x|)/|x|`, the inverse transform of the ball indicator.
pub fn jinc_function(beta: f64) -> Result<BandlimitedFunction> {
    BandRegion::ball(beta)?;
    Ok(BandlimitedFunction {
        beta,
        profile: Profile::Indicator,
    })
}

pub fn radial_poly_function(beta: f64, c0: f64, c1: f64) -> Result<BandlimitedFunction> {
    BandRegion::ball(beta)?;
    if !(c0.is_finite() && c1.is_finite()) {
        return Err(Error::invalid("c0/c1", "coefficients must be finite"));
    }
    if c0 == 0.0 && c1 == 0.0 {
        return Err(Error::invalid("c0/c1", "coefficients must not both be zero"));
    }
    Ok(BandlimitedFunction {
        beta,
        profile: Profile::RadialPolynomial { c0, c1 },
    })
}

impl BandlimitedFunction {
    /// The zero function, nominally band-limited to `B_β`.
    pub fn zero(beta: f64) -> Result<Self> {
        BandRegion::ball(beta)?;
        Ok(Self {
            beta,
            profile: Profile::RadialPolynomial { c0: 0.0, c1: 0.0 },
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn region(&self) -> BandRegion {
        BandRegion::Ball { beta: self.beta }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.profile, Profile::RadialPolynomial { c0, c1 } if c0 == 0.0 && c1 == 0.0)
    }

    /// Spectral profile at `|ξ| = rho`; zero outside the ball.
    pub fn spectrum_radial(&self, rho: f64) -> f64 {
        if rho > self.beta {
            return 0.0;
        }
        match self.profile {
            Profile::Indicator => 1.0,
            Profile::RadialPolynomial { c0, c1 } => {
                let t = rho / self.beta;
                c0 + c1 * (1.0 - t * t)
            }
        }
    }

    /// `F(ξ)` under the unitary transform.
    pub fn spectrum(&self, xi: [f64; 2]) -> f64 {
        self.spectrum_radial(xi[0].hypot(xi[1]))
    }

    /// `‖f‖_{L²(R²)} = ‖F‖_{L²(B_β)}`.
    pub fn l2_norm(&self) -> f64 {
        let area = PI * self.beta * self.beta;
        match self.profile {
            Profile::Indicator => area.sqrt(),
            Profile::RadialPolynomial { c0, c1 } => {
                (area * (c0 * c0 + c0 * c1 + c1 * c1 / 3.0)).sqrt()
            }
        }
    }

    /// `f` at radius `r`, with an absolute error estimate (zero for the
    /// closed forms).
    pub fn radial_value(&self, r: f64) -> RadialValue {
        let b = self.beta;
        match self.profile {
            Profile::Indicator => RadialValue {
                value: b * b * j1_over_z(b * r),
                abs_err: 0.0,
            },
            Profile::RadialPolynomial { c0, c1 } => {
                if c0 == 0.0 && c1 == 0.0 {
                    return RadialValue {
                        value: 0.0,
                        abs_err: 0.0,
                    };
                }
                if r < 1e-8 {
                    // f(0) = ∫₀^β F ρ dρ
                    return RadialValue {
                        value: b * b * (0.5 * c0 + 0.25 * c1),
                        abs_err: 0.0,
                    };
                }
                self.hankel_quadrature(r)
            }
        }
    }

    fn hankel_quadrature(&self, r: f64) -> RadialValue {
        let b = self.beta;
        let width = (0.5 * PI / r).min(b);
        let panels = (b / width).ceil().max(1.0) as usize;
        let h = b / panels as f64;
        let integrand = |rho: f64| self.spectrum_radial(rho) * j0(rho * r) * rho;
        let (fine_rule, coarse_rule) = (rule(32), rule(16));
        let mut value = 0.0;
        let mut err = 0.0;
        for p in 0..panels {
            let lo = h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            let fine = fine_rule.integrate(lo, hi, integrand);
            let coarse = coarse_rule.integrate(lo, hi, integrand);
            value += fine;
            err += (fine - coarse).abs();
        }
        RadialValue {
            value,
            abs_err: err,
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.radial_value(x[0].hypot(x[1])).value
    }

    /// Whether `β < (3 - √8) δ`, the hypothesis under which `I_α[f] → f`.
    pub fn recovery_hypothesis(&self, band: BandSquare) -> bool {
        self.beta < RECOVERY_RATIO * band.delta()
    }

    pub fn label(&self) -> String {
        match self.profile {
            Profile::Indicator => format!("jinc(beta={})", self.beta),
            Profile::RadialPolynomial { c0, c1 } => {
                format!("radial-poly(beta={}, c0={c0}, c1={c1})", self.beta)
            }
        }
    }
}

/// `f(x_j)` in the node set's index order.
pub fn samples_on(f: &BandlimitedFunction, nodes: &NodeSet) -> Vec<f64> {
    nodes.points().par_iter().map(|&x| f.eval(x)).collect()
}

/// Warning text when the band of `f` is not contained in the node set's
/// band square.
pub fn band_warning(f: &BandlimitedFunction, nodes: &NodeSet) -> Option<String> {
    if f.region().fits_in(nodes.band()) {
        None
    } else {
        Some(format!(
            "band B_{} is not contained in S_{}; samples are not l²-controlled",
            f.beta(),
            nodes.delta()
        ))
    }
}
