//! Brute-force oracles shared by the integration suites.
//!
//! These integrate directly on tensor or polar Gauss-Legendre grids built
//! here, without touching the library's spectral machinery.

#![allow(dead_code)]

use std::f64::consts::PI;

use poisson_interp::quadrature::rule;
use poisson_interp::Interpolant;

/// Composite 32-point rule on `[a, b]` split into `panels` pieces.
pub fn composite(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let g = rule(32);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * g.len());
    for p in 0..panels {
        let lo = a + p as f64 * h;
        out.extend(g.mapped(lo, lo + h));
    }
    out
}

/// `∫_{[-δ,δ]²} e^{-i⟨ξ,t⟩} dξ` by tensor quadrature. The sine part
/// cancels by symmetry, so only the cosine is integrated.
pub fn exponential_gram_entry(t: [f64; 2], delta: f64) -> f64 {
    let panels = 2 + (delta * t[0].abs().max(t[1].abs()) / PI).ceil() as usize;
    let axis = composite(-delta, delta, panels);
    let mut sum = 0.0;
    for &(x, wx) in &axis {
        for &(y, wy) in &axis {
            sum += wx * wy * (x * t[0] + y * t[1]).cos();
        }
    }
    sum
}

/// `(2π)^{-1} ∫_{|ξ|≤β} e^{i⟨ξ,x⟩} dξ` in polar coordinates, with `x = (r, 0)`.
pub fn ball_inverse_transform(beta: f64, r: f64) -> f64 {
    let panels = 4 + (beta * r / PI).ceil() as usize;
    let radial = composite(0.0, beta, panels);
    let angular = composite(0.0, 2.0 * PI, 2 * panels);
    let mut sum = 0.0;
    for &(rho, wr) in &radial {
        let mut inner = 0.0;
        for &(th, wt) in &angular {
            inner += wt * (rho * r * th.cos()).cos();
        }
        sum += wr * rho * inner;
    }
    sum / (2.0 * PI)
}

/// `∫_{R²} |I(x)|² dx` by polar quadrature about `center` out to `radius`,
/// plus the far-field tail of a sum of kernels decaying like `c r^{-3}`.
pub fn spatial_norm_sq(interp: &Interpolant, center: [f64; 2], radius: f64) -> f64 {
    let alpha = interp.kernel().alpha();
    // geometric radial panels resolve the unit-scale core and the long tail
    let mut edges = vec![0.0, 0.25 * alpha.min(1.0)];
    while *edges.last().unwrap() < radius {
        let next = (edges.last().unwrap() * 1.5).min(radius);
        edges.push(next);
    }
    let angular = composite(0.0, 2.0 * PI, 64);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for w in edges.windows(2) {
        for (r, wr) in composite(w[0], w[1], 2) {
            for &(th, wt) in &angular {
                pts.push([center[0] + r * th.cos(), center[1] + r * th.sin()]);
                wts.push(wr * wt * r);
            }
        }
    }
    let vals = interp.evaluate_many(&pts).unwrap();
    let body: f64 = vals.iter().zip(&wts).map(|(v, w)| v * v * w).sum();
    // I(x) ≈ (Σ a_j) α / (2π r³) far away; ∫_R^∞ (c/r³)² 2πr dr = π c² / (2 R⁴)
    let c = interp.coefficients().iter().sum::<f64>() * alpha / (2.0 * PI);
    body + PI * c * c / (2.0 * radius.powi(4))
}
