//! Fourier-side error measurement and the numeric bound checks.
//!
//! Every integral over the plane is split into the band square `S_δ`, the
//! annuli `m S_δ ∖ (m-1) S_δ` for `m = 2..M`, and a remainder beyond `M S_δ`
//! that is bounded rather than measured. Annulus `m` is covered by `4(m-1)`
//! translates of `S_δ`, on each of which `∫|u|²` is at most `λ_max(E) ‖a‖²`,
//! so the remainder of any radially decreasing weight `w` obeys
//! `Σ_{m>M} 4(m-1) w((m-1)δ) Λ ‖a‖²` with `Λ` a Gershgorin bound of `E`.

pub mod quadrature;

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interp::{spectral_transform, Interpolant, SpectralSymbol};
use crate::kernels::Kernel;
use crate::linalg::gershgorin_bound;
use crate::nodes::{exponential_gram_of, RieszEstimate};
use crate::quadrature::tree_sum;
use crate::spaces::BandlimitedFunction;

pub use quadrature::{
    integrate, integrate_at, FnIntegrand, Integrand, Patch, QuadratureGrid, QuadratureResult,
    RadialBound, Region,
};

/// Remainder beyond `M` annuli relative to the reference energy.
pub const TRUNCATION_REL: f64 = 1e-14;

/// Relative tolerance handed to every region integral.
pub const QUADRATURE_REL: f64 = 1e-10;

/// Hard cap on the number of annuli.
pub const MAX_ANNULI: usize = 400;

/// `δ⁻¹ ln(2 + √2)`: above this `α`, `(1 - e^{-αδ})^{-2} ≤ 2`.
pub fn a_delta(delta: f64) -> f64 {
    (2.0 + SQRT_2).ln() / delta
}

/// `w(|ξ|) |u(ξ)|²`.
pub struct WeightedEnergy<'a, W> {
    pub symbol: &'a SpectralSymbol,
    pub weight: W,
}

impl<W: Fn(f64) -> f64 + Sync> Integrand for WeightedEnergy<'_, W> {
    fn points(&self, pts: &[[f64; 2]]) -> Vec<f64> {
        pts.iter()
            .map(|&xi| (self.weight)(xi[0].hypot(xi[1])) * self.symbol.eval(xi).norm_sqr())
            .collect()
    }

    fn grid(&self, xs: &[f64], ys: &[f64]) -> Vec<f64> {
        let (re, im) = self.symbol.eval_grid(xs, ys);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for (p, &x) in xs.iter().enumerate() {
            for (q, &y) in ys.iter().enumerate() {
                let (a, b) = (re[(p, q)], im[(p, q)]);
                out.push((self.weight)(x.hypot(y)) * (a * a + b * b));
            }
        }
        out
    }

    fn bandwidth(&self) -> f64 {
        self.symbol.spread()
    }
}

/// `w(|ξ|) Re u(ξ)`.
pub struct WeightedReal<'a, W> {
    pub symbol: &'a SpectralSymbol,
    pub weight: W,
}

impl<W: Fn(f64) -> f64 + Sync> Integrand for WeightedReal<'_, W> {
    fn points(&self, pts: &[[f64; 2]]) -> Vec<f64> {
        pts.iter()
            .map(|&xi| (self.weight)(xi[0].hypot(xi[1])) * self.symbol.eval(xi).re)
            .collect()
    }

    fn grid(&self, xs: &[f64], ys: &[f64]) -> Vec<f64> {
        let (re, _) = self.symbol.eval_grid(xs, ys);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for (p, &x) in xs.iter().enumerate() {
            for (q, &y) in ys.iter().enumerate() {
                out.push((self.weight)(x.hypot(y)) * re[(p, q)]);
            }
        }
        out
    }

    fn bandwidth(&self) -> f64 {
        self.symbol.reach()
    }
}

/// `Σ_{k ≥ m} 4k w(kδ)`: the covering factor of every annulus beyond `m S_δ`.
pub fn covering_remainder(weight: impl Fn(f64) -> f64, delta: f64, m: usize) -> f64 {
    let mut terms = Vec::new();
    let mut k = m;
    loop {
        let t = 4.0 * k as f64 * weight(k as f64 * delta);
        terms.push(t);
        let total: f64 = terms.iter().sum();
        if t == 0.0 || t <= 1e-18 * total || k > m + 100_000 {
            return tree_sum(&terms);
        }
        k += 1;
    }
}

/// `Σ_{k ≥ m} w(kδ) 4δ²(2k+1) ≥ ∫_{R² ∖ m S_δ} w(|ξ|) dξ`.
pub fn shell_remainder(weight: impl Fn(f64) -> f64, delta: f64, m: usize) -> f64 {
    let mut terms = Vec::new();
    let mut k = m;
    loop {
        let t = weight(k as f64 * delta) * 4.0 * delta * delta * (2 * k + 1) as f64;
        terms.push(t);
        let total: f64 = terms.iter().sum();
        if t == 0.0 || t <= 1e-18 * total || k > m + 100_000 {
            return tree_sum(&terms);
        }
        k += 1;
    }
}

/// `∫ w(|ξ|) |u(ξ)|² dξ` over the plane, split into band, annuli and a
/// bounded remainder.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneEnergy {
    pub in_band: QuadratureResult,
    pub annuli: Vec<f64>,
    pub annuli_error: f64,
    pub remainder: f64,
    pub truncation_m: usize,
    pub converged: bool,
}

impl PlaneEnergy {
    pub fn tail(&self) -> f64 {
        tree_sum(&self.annuli) + self.remainder
    }

    pub fn total(&self) -> f64 {
        self.in_band.value + self.tail()
    }

    pub fn error(&self) -> f64 {
        self.in_band.error + self.annuli_error
    }
}

/// Whether a radial symbol needs graded panels at the origin.
fn needs_grading(kernel: &Kernel) -> bool {
    let omega = kernel.omega();
    omega != 1.0 && omega != 2.0
}

/// Energy over the plane with `M` chosen by the covering bound (or fixed).
///
/// `reference` is added to the in-band energy when deciding how small the
/// remainder must be.
pub fn plane_energy(
    symbol: &SpectralSymbol,
    delta: f64,
    weight: impl Fn(f64) -> f64 + Sync + Copy,
    graded: bool,
    reference: f64,
    fixed_m: Option<usize>,
) -> Result<PlaneEnergy> {
    if let Some(m) = fixed_m {
        if m < 2 {
            return Err(Error::invalid("M", format!("must be at least 2, got {m}")));
        }
    }
    let norm_sq = symbol.l2_norm_sq();
    if norm_sq == 0.0 {
        return Ok(PlaneEnergy {
            in_band: QuadratureResult::zero(),
            annuli: Vec::new(),
            annuli_error: 0.0,
            remainder: 0.0,
            truncation_m: fixed_m.unwrap_or(2),
            converged: true,
        });
    }
    let lambda = gershgorin_bound(&exponential_gram_of(symbol.points(), delta));
    let integrand = WeightedEnergy { symbol, weight };
    // w(0) Λ ‖a‖² bounds the in-band energy, so the tolerance stays above rounding
    let scale = reference.max(weight(0.0) * lambda * norm_sq);
    let in_band = integrate(&Region::square(delta, graded), &integrand, QUADRATURE_REL * scale);
    let e_ref = reference + in_band.value;
    let bound = |m: usize| lambda * norm_sq * covering_remainder(weight, delta, m);
    let m = match fixed_m {
        Some(m) => m,
        None => {
            let mut m = 2;
            while m < MAX_ANNULI && bound(m) > TRUNCATION_REL * e_ref {
                m += 1;
            }
            m
        }
    };
    let tol = QUADRATURE_REL * e_ref / m as f64;
    let mut annuli = Vec::with_capacity(m - 1);
    let mut annuli_error = 0.0;
    let mut converged = in_band.converged;
    for k in 2..=m {
        let r = integrate(&Region::annulus(k, delta), &integrand, tol);
        annuli.push(r.value);
        annuli_error += r.error;
        converged &= r.converged;
    }
    Ok(PlaneEnergy {
        in_band,
        annuli,
        annuli_error,
        remainder: bound(m),
        truncation_m: m,
        converged,
    })
}

/// `Q = ∫_{R²} w(|ξ|) |u(ξ)|² dξ`; the error field includes the remainder
/// bound.
pub fn quadratic_form(
    symbol: &SpectralSymbol,
    delta: f64,
    weight: impl Fn(f64) -> f64 + Sync + Copy,
) -> Result<QuadratureResult> {
    let e = plane_energy(symbol, delta, weight, false, 0.0, None)?;
    Ok(QuadratureResult {
        value: e.total(),
        error: e.error() + e.remainder,
        converged: e.converged,
        level: e.in_band.level,
    })
}

/// `∫_{R²} symbol(|ξ|) e^{i⟨ξ,x⟩} dξ` by quadrature, for the Fourier-pair
/// calibration.
pub fn inverse_transform_of_symbol(kernel: &Kernel, x: [f64; 2], tol: f64) -> Result<QuadratureResult> {
    let delta = PI;
    let symbol = SpectralSymbol::new(vec![1.0], vec![[-x[0], -x[1]]]);
    let weight = |rho: f64| kernel.symbol_radius(rho);
    let graded = needs_grading(kernel);
    let integrand = WeightedReal {
        symbol: &symbol,
        weight,
    };
    let mut parts = Vec::new();
    let mut error = 0.0;
    let mut converged = true;
    let mut m = 1;
    let total_scale = TAU * kernel.symbol_radius(0.0);
    let r = integrate(&Region::square(delta, graded), &integrand, tol * total_scale);
    parts.push(r.value);
    error += r.error;
    converged &= r.converged;
    while shell_remainder(weight, delta, m) > 1e-3 * tol * total_scale.abs() && m < MAX_ANNULI {
        m += 1;
        let r = integrate(&Region::annulus(m, delta), &integrand, tol * total_scale / 16.0);
        parts.push(r.value);
        error += r.error;
        converged &= r.converged;
    }
    Ok(QuadratureResult {
        value: tree_sum(&parts),
        error: error + shell_remainder(weight, delta, m),
        converged,
        level: 0,
    })
}

/// Ratio of the quadrature value of `∫ e^{-α|ξ|} e^{i⟨ξ,x⟩} dξ` to the
/// Poisson kernel `g_α(x)`: the spectral scale `c`.
pub fn calibrate_spectral_scale(alpha: f64, x: [f64; 2]) -> Result<f64> {
    let k = crate::kernels::PoissonKernel::new(alpha)?;
    let q = inverse_transform_of_symbol(&Kernel::Poisson(k), x, 1e-12)?;
    Ok(q.value / k.eval(x))
}

/// Error norms between `f` and an interpolant, measured on the Fourier side.
///
/// Energies (`*_sq`) are stored alongside the norms; the total is computed
/// from its parts, never measured separately.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub l2_in_band: f64,
    pub l2_tail: f64,
    pub l2_total: f64,
    /// Zero unless filled in by [`error_sup`].
    pub sup_error: f64,
    pub in_band_sq: f64,
    pub tail_sq: f64,
    pub total_sq: f64,
    /// Bound on the tail energy beyond `M` annuli (included in `tail_sq`).
    pub tail_remainder_sq: f64,
    /// `‖F[I]‖²` over the band square.
    pub interpolant_in_band_sq: f64,
    /// `‖I‖_{L²(R²)}` by Plancherel.
    pub interpolant_norm: f64,
    /// Sum of level differences over all region integrals, in energy units.
    pub quadrature_error_estimate: f64,
    pub truncation_m: usize,
    pub converged: bool,
}

fn check_band(f: &BandlimitedFunction, delta: f64) -> Result<()> {
    if f.beta() > delta {
        return Err(Error::invalid(
            "beta",
            format!("band radius {} exceeds the band square half-width {delta}", f.beta()),
        ));
    }
    Ok(())
}

/// `‖F - F[I]‖` over `S_δ` and beyond, with `M` annuli measured. `None`
/// picks `M` so the remainder bound is below `1e-14` of the reference
/// energy `‖f‖² + ‖F[I]‖²_{S_δ}`.
pub fn error_l2(f: &BandlimitedFunction, interp: &Interpolant, m: Option<usize>) -> Result<ErrorReport> {
    let delta = interp.nodes().delta();
    check_band(f, delta)?;
    let kernel = interp.kernel();
    let graded = needs_grading(&kernel);
    let transform = spectral_transform(interp);
    let symbol = transform.symbol();
    let weight = |rho: f64| transform.radial_factor(rho).powi(2);
    let f_sq = f.l2_norm().powi(2);
    let energy = plane_energy(symbol, delta, weight, graded, f_sq, m)?;

    // ∫_{S_δ} |F - T|² = ∫_{S_δ} |T|² + ‖F‖² - 2 ∫_{B_β} F Re T
    let cross = if f.is_zero() || symbol.is_zero() {
        QuadratureResult::zero()
    } else {
        let integrand = WeightedReal {
            symbol,
            weight: |rho: f64| f.spectrum_radial(rho) * transform.radial_factor(rho),
        };
        let tol = QUADRATURE_REL * (f_sq + energy.in_band.value);
        integrate(&Region::disk(f.beta(), graded), &integrand, tol)
    };
    let in_band_sq = (energy.in_band.value + f_sq - 2.0 * cross.value).max(0.0);
    let tail_sq = energy.tail();
    let total_sq = in_band_sq + tail_sq;
    Ok(ErrorReport {
        l2_in_band: in_band_sq.sqrt(),
        l2_tail: tail_sq.sqrt(),
        l2_total: total_sq.sqrt(),
        sup_error: 0.0,
        in_band_sq,
        tail_sq,
        total_sq,
        tail_remainder_sq: energy.remainder,
        interpolant_in_band_sq: energy.in_band.value,
        interpolant_norm: (energy.in_band.value + tail_sq).sqrt(),
        quadrature_error_estimate: energy.error() + 2.0 * cross.error,
        truncation_m: energy.truncation_m,
        converged: energy.converged && cross.converged,
    })
}

/// Square sampling grid for sup-norm measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct GridSpec {
    /// Half-width of the square `[-extent, extent]²`.
    pub extent: f64,
    /// Points per axis, endpoints included.
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            extent: 5.0,
            points: 41,
        }
    }
}

impl GridSpec {
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let axis: Vec<f64> = if self.points <= 1 {
            vec![0.0]
        } else {
            let h = 2.0 * self.extent / (self.points - 1) as f64;
            (0..self.points).map(|i| -self.extent + h * i as f64).collect()
        };
        axis.iter()
            .flat_map(|&x| axis.iter().map(move |&y| [x, y]))
            .collect()
    }
}

/// `max |f(x) - I(x)|` over the grid.
pub fn error_sup(f: &BandlimitedFunction, interp: &Interpolant, grid: GridSpec) -> Result<f64> {
    error_sup_at(f, interp, &grid.nodes())
}

pub fn error_sup_at(f: &BandlimitedFunction, interp: &Interpolant, points: &[[f64; 2]]) -> Result<f64> {
    let values = interp.evaluate_many(points)?;
    Ok(points
        .iter()
        .zip(values)
        .map(|(&x, v)| (f.eval(x) - v).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub node: [i64; 2],
    /// `∫_{S_δ} F(ξ) e^{i⟨ξ,x_k⟩} dξ`.
    pub band_side: f64,
    /// `∫_{R²} F[I](ξ) e^{i⟨ξ,x_k⟩} dξ`, remainder bound included in the error.
    pub plane_side: f64,
    pub plane_error: f64,
    /// `2π f(x_k)` and `2π I(x_k)`, the closed forms of the two sides.
    pub sample_side: f64,
    pub interpolant_side: f64,
    pub relative_difference: f64,
    pub tol: f64,
    pub conclusive: bool,
    pub pass: bool,
}

/// Both sides of `∫_{S_δ} F e^{i⟨ξ,x_k⟩} = ∫_{R²} F[I] e^{i⟨ξ,x_k⟩}`.
pub fn check_interpolation_identity(
    f: &BandlimitedFunction,
    interp: &Interpolant,
    k: [i64; 2],
    tol: f64,
) -> Result<IdentityReport> {
    let nodes = interp.nodes();
    let delta = nodes.delta();
    check_band(f, delta)?;
    let xk = nodes.point(k).ok_or(Error::UnknownNode(k[0], k[1]))?;
    let kernel = interp.kernel();
    let graded = needs_grading(&kernel);
    let quad_tol = 1e-3 * tol;

    let band_side = if f.is_zero() {
        QuadratureResult::zero()
    } else {
        let integrand = FnIntegrand::new(
            |xi: [f64; 2]| f.spectrum(xi) * (xi[0] * xk[0] + xi[1] * xk[1]).cos(),
            xk[0].abs().max(xk[1].abs()),
        );
        let scale = f.l2_norm() * (PI * f.beta() * f.beta()).sqrt();
        integrate(&Region::disk(f.beta(), false), &integrand, quad_tol * scale)
    };

    let transform = spectral_transform(interp);
    let shifted = transform.symbol().translated(xk);
    let plane_side = if shifted.is_zero() {
        QuadratureResult::zero()
    } else {
        let factor = |rho: f64| transform.radial_factor(rho);
        let integrand = WeightedReal {
            symbol: &shifted,
            weight: factor,
        };
        let l1 = shifted.l1_norm();
        let scale = band_side.value.abs().max(f64::MIN_POSITIVE);
        let mut parts = Vec::new();
        let first = integrate(&Region::square(delta, graded), &integrand, quad_tol * scale);
        let mut error = first.error;
        let mut converged = first.converged;
        parts.push(first.value);
        let mut m = 1;
        let remainder = |m: usize| l1 * shell_remainder(factor, delta, m);
        while remainder(m) > quad_tol * scale && m < MAX_ANNULI {
            m += 1;
            let r = integrate(&Region::annulus(m, delta), &integrand, quad_tol * scale / 16.0);
            error += r.error;
            converged &= r.converged;
            parts.push(r.value);
        }
        QuadratureResult {
            value: tree_sum(&parts),
            error: error + remainder(m),
            converged,
            level: 0,
        }
    };

    let sample_side = TAU * f.eval(xk);
    let interpolant_side = TAU * interp.evaluate(xk)?;
    let a = band_side.value;
    let b = plane_side.value;
    let denom = a.abs().max(b.abs());
    let relative_difference = if denom == 0.0 { 0.0 } else { (a - b).abs() / denom };
    let conclusive = band_side.converged && plane_side.converged;
    Ok(IdentityReport {
        node: k,
        band_side: a,
        plane_side: b,
        plane_error: plane_side.error,
        sample_side,
        interpolant_side,
        relative_difference,
        tol,
        conclusive,
        pass: conclusive && relative_difference <= tol,
    })
}

/// Measured-versus-bound outcome of a named check.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub check: String,
    pub inputs: Value,
    pub measured: f64,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl BoundCheck {
    fn new(check: &str, inputs: Value, measured: f64, bound: f64, warning: Option<String>) -> Self {
        let ratio = if bound > 0.0 {
            measured / bound
        } else if measured == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            check: check.to_string(),
            inputs,
            measured,
            bound,
            ratio,
            pass: measured <= bound,
            warning,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("plain data serializes")
    }
}

fn alpha_warning(alpha: f64, delta: f64) -> Option<String> {
    let threshold = a_delta(delta);
    (alpha < threshold).then(|| {
        format!("alpha = {alpha} is below A_delta = {threshold:.6}; the bound is not claimed here")
    })
}

/// `‖F[I]‖_{L²(R² ∖ S_δ)} ≤ 4 B² e^{αδ(√2-1)} ‖F‖` with `B = B̂ · slack`.
pub fn tail_bound_check(
    report: &ErrorReport,
    f: &BandlimitedFunction,
    interp: &Interpolant,
    riesz: &RieszEstimate,
    slack: f64,
) -> BoundCheck {
    let alpha = interp.kernel().alpha();
    let delta = interp.nodes().delta();
    let b = riesz.b_hat * slack;
    let bound = 4.0 * b * b * (alpha * delta * (SQRT_2 - 1.0)).exp() * f.l2_norm();
    let inputs = json!({
        "function": f.label(),
        "kernel": interp.kernel().label(),
        "delta": delta,
        "nodes": interp.nodes().len(),
        "b_hat": riesz.b_hat,
        "slack": slack,
        "truncation_m": report.truncation_m,
    });
    BoundCheck::new("tail-bound", inputs, report.l2_tail, bound, alpha_warning(alpha, delta))
}

pub fn check_tail_bound(
    f: &BandlimitedFunction,
    interp: &Interpolant,
    riesz: &RieszEstimate,
    m: Option<usize>,
    slack: f64,
) -> Result<BoundCheck> {
    let report = error_l2(f, interp, m)?;
    Ok(tail_bound_check(&report, f, interp, riesz, slack))
}

/// `‖I‖_{L²(R²)} ≤ 13 B⁴ e^{αδ(√2-1)} ‖f‖` with `B = B̂ · slack`.
pub fn operator_norm_check(
    report: &ErrorReport,
    f: &BandlimitedFunction,
    interp: &Interpolant,
    riesz: &RieszEstimate,
    slack: f64,
) -> BoundCheck {
    let alpha = interp.kernel().alpha();
    let delta = interp.nodes().delta();
    let b = riesz.b_hat * slack;
    let bound = 13.0 * b.powi(4) * (alpha * delta * (SQRT_2 - 1.0)).exp() * f.l2_norm();
    let inputs = json!({
        "function": f.label(),
        "kernel": interp.kernel().label(),
        "delta": delta,
        "nodes": interp.nodes().len(),
        "b_hat": riesz.b_hat,
        "slack": slack,
    });
    BoundCheck::new(
        "operator-norm",
        inputs,
        report.interpolant_norm,
        bound,
        alpha_warning(alpha, delta),
    )
}

pub fn check_operator_norm(
    f: &BandlimitedFunction,
    interp: &Interpolant,
    riesz: &RieszEstimate,
    slack: f64,
) -> Result<BoundCheck> {
    let report = error_l2(f, interp, None)?;
    Ok(operator_norm_check(&report, f, interp, riesz, slack))
}
