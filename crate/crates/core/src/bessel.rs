//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Ascending power series below [`SERIES_SWITCH`], Hankel's asymptotic
//! expansion truncated at its smallest term above it. Absolute accuracy is
//! better than 1e-10 on `[0, 1e4]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Largest argument evaluated by the power series.
///
/// The series loses roughly `log10(max term)` digits to cancellation
/// (about 4 at z = 12) while the asymptotic expansion's smallest term is
/// near `e^{-2z}`, so 12 keeps both sides below 1e-11.
pub const SERIES_SWITCH: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Zero,
    One,
}

impl Order {
    fn nu(self) -> u32 {
        match self {
            Order::Zero => 0,
            Order::One => 1,
        }
    }
}

/// `J_n(z)` for `n ∈ {0, 1}` and `z ≥ 0`. Negative arguments use parity.
pub fn bessel_j(order: Order, z: f64) -> f64 {
    let (z, sign) = if z < 0.0 {
        (-z, if order == Order::One { -1.0 } else { 1.0 })
    } else {
        (z, 1.0)
    };
    let v = if z < SERIES_SWITCH {
        series(order.nu(), z)
    } else {
        asymptotic(order.nu(), z)
    };
    sign * v
}

pub fn j0(z: f64) -> f64 {
    bessel_j(Order::Zero, z)
}

pub fn j1(z: f64) -> f64 {
    bessel_j(Order::One, z)
}

/// `J₁(z)/z`, finite at the origin (limit 1/2).
pub fn j1_over_z(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        0.5 - z * z / 16.0
    } else {
        j1(z) / z
    }
}

pub(crate) fn series(nu: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    let mut term = if nu == 0 { 1.0 } else { half };
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (f64::from(k) * f64::from(k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) || k > 200 {
            break;
        }
    }
    sum
}

pub(crate) fn asymptotic(nu: u32, z: f64) -> f64 {
    let mu = 4.0 * f64::from(nu * nu);
    let inv8z = 1.0 / (8.0 * z);
    // a_k / z^k accumulated with alternating assignment to P (even k) and Q (odd k).
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60u32 {
        let odd = f64::from(2 * k - 1);
        let next = term * (mu - odd * odd) * inv8z / f64::from(k);
        if next.abs() >= last.abs() || next == 0.0 {
            break;
        }
        // sign pattern: P = a0 - a2 + a4 - ..., Q = a1 - a3 + ...
        let signed = if (k / 2) % 2 == 0 { next } else { -next };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
        last = next;
        term = next;
        if next.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = z.sin_cos();
    let (cos_chi, sin_chi) = match nu {
        0 => ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2),
        _ => ((s - c) * FRAC_1_SQRT_2, (-s - c) * FRAC_1_SQRT_2),
    };
    (2.0 / (PI * z)).sqrt() * (p * cos_chi - q * sin_chi)
}
