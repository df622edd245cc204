//! Tensor Gauss–Legendre panels over squares, square rings and disks.
//!
//! Rectangles are integrated on tensor grids so integrands built from
//! exponential sums can be evaluated by matrix products. Polar sectors
//! cover the neighbourhood of the origin, where radial weights such as
//! `e^{-α|ξ|}` are not smooth in Cartesian coordinates.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rayon::prelude::*;

use crate::quadrature::{rule, tree_sum};

/// Gauss–Legendre order used on every panel.
pub const ORDER: usize = 20;

/// Highest refinement level tried before a result is declared inconclusive.
pub const MAX_LEVEL: u32 = 3;

/// Largest level-0 panel width, whatever the integrand's bandwidth.
pub const MAX_PANEL_WIDTH: f64 = 4.0;

/// Oscillation periods allowed per level-0 panel.
const PERIODS_PER_PANEL: f64 = 2.0;

/// Geometric pieces used to grade the innermost radial panel at level 0.
const GRADING_PIECES: u32 = 6;

/// Radius of a sector boundary as a function of the polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialBound {
    Circle(f64),
    /// The square `[-h, h]²`.
    Square(f64),
}

impl RadialBound {
    pub fn at(self, theta: f64) -> f64 {
        match self {
            RadialBound::Circle(r) => r,
            RadialBound::Square(h) => h / theta.cos().abs().max(theta.sin().abs()),
        }
    }
}

/// One cell of a region decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Patch {
    Rect {
        x: [f64; 2],
        y: [f64; 2],
    },
    /// `{(r cos θ, r sin θ) : θ0 ≤ θ ≤ θ1, inner(θ) ≤ r ≤ outer(θ)}`. The
    /// angular range never straddles a multiple of `π/4`.
    Sector {
        theta: [f64; 2],
        inner: RadialBound,
        outer: RadialBound,
        /// Grade the innermost radial panel geometrically toward `r = 0`.
        graded: bool,
    },
}

impl Patch {
    pub fn area(&self) -> f64 {
        match *self {
            Patch::Rect { x, y } => (x[1] - x[0]) * (y[1] - y[0]),
            Patch::Sector {
                theta,
                inner,
                outer,
                ..
            } => sector_area(theta, outer) - sector_area(theta, inner),
        }
    }
}

/// `∫ R(θ)²/2 dθ` over the sector.
fn sector_area(theta: [f64; 2], bound: RadialBound) -> f64 {
    match bound {
        RadialBound::Circle(r) => 0.5 * r * r * (theta[1] - theta[0]),
        RadialBound::Square(h) => {
            let mid = 0.5 * (theta[0] + theta[1]);
            let axis = (mid / FRAC_PI_2).round() * FRAC_PI_2;
            0.5 * h * h * ((theta[1] - axis).tan() - (theta[0] - axis).tan())
        }
    }
}

/// A finite union of non-overlapping patches.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Region {
    patches: Vec<Patch>,
}

fn sectors(inner: RadialBound, outer: RadialBound, graded: bool) -> Vec<Patch> {
    (0..8)
        .map(|k| Patch::Sector {
            theta: [k as f64 * FRAC_PI_4, (k + 1) as f64 * FRAC_PI_4],
            inner,
            outer,
            graded,
        })
        .collect()
}

/// `n` equal cuts of `[a, b]`.
fn cuts(a: f64, b: f64, n: usize) -> Vec<[f64; 2]> {
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            [lo, hi]
        })
        .collect()
}

impl Region {
    pub fn from_patches(patches: Vec<Patch>) -> Self {
        Self { patches }
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn area(&self) -> f64 {
        self.patches.iter().map(Patch::area).sum()
    }

    pub fn union(mut self, other: Region) -> Self {
        self.patches.extend(other.patches);
        self
    }

    /// The disk `|ξ| ≤ r` as eight polar sectors.
    pub fn disk(r: f64, graded: bool) -> Self {
        Self::from_patches(sectors(RadialBound::Circle(0.0), RadialBound::Circle(r), graded))
    }

    /// The square `[-h, h]²`: polar sectors on the central quarter, tensor
    /// cells on the surrounding ring.
    pub fn square(h: f64, graded: bool) -> Self {
        let hc = 0.25 * h;
        Self::from_patches(sectors(RadialBound::Circle(0.0), RadialBound::Square(hc), graded))
            .union(Self::ring(hc, h))
    }

    /// `[-h_out, h_out]² ∖ (-h_in, h_in)²` as four corner squares and four
    /// side strips, the strips cut into cells no longer than the ring width.
    pub fn ring(h_in: f64, h_out: f64) -> Self {
        assert!(0.0 < h_in && h_in < h_out, "ring needs 0 < h_in < h_out");
        let width = h_out - h_in;
        let pieces = ((2.0 * h_in / width).ceil() as usize).max(1);
        let side = cuts(-h_in, h_in, pieces);
        let mut patches = Vec::with_capacity(4 + 4 * pieces);
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                patches.push(Patch::Rect {
                    x: ordered(sx * h_in, sx * h_out),
                    y: ordered(sy * h_in, sy * h_out),
                });
            }
        }
        for s in [-1.0, 1.0] {
            let band = ordered(s * h_in, s * h_out);
            for &c in &side {
                patches.push(Patch::Rect { x: band, y: c });
                patches.push(Patch::Rect { x: c, y: band });
            }
        }
        Self { patches }
    }

    /// Annulus `m S_δ ∖ (m-1) S_δ`, `m ≥ 2`.
    pub fn annulus(m: usize, delta: f64) -> Self {
        assert!(m >= 2, "annulus index starts at 2");
        Self::ring((m - 1) as f64 * delta, m as f64 * delta)
    }
}

fn ordered(a: f64, b: f64) -> [f64; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Something that can be integrated over a region.
pub trait Integrand: Sync {
    /// Values at arbitrary points.
    fn points(&self, pts: &[[f64; 2]]) -> Vec<f64>;

    /// Values on the tensor grid `xs × ys`, indexed `p * ys.len() + q`.
    fn grid(&self, xs: &[f64], ys: &[f64]) -> Vec<f64> {
        let pts: Vec<[f64; 2]> = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| [x, y]))
            .collect();
        self.points(&pts)
    }

    /// Highest angular frequency along either axis, used to size panels.
    fn bandwidth(&self) -> f64 {
        0.0
    }
}

/// A pointwise closure with a declared bandwidth.
pub struct FnIntegrand<F> {
    pub f: F,
    pub bandwidth: f64,
}

impl<F: Fn([f64; 2]) -> f64 + Sync> FnIntegrand<F> {
    pub fn new(f: F, bandwidth: f64) -> Self {
        Self { f, bandwidth }
    }
}

impl<F: Fn([f64; 2]) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn points(&self, pts: &[[f64; 2]]) -> Vec<f64> {
        pts.iter().map(|&p| (self.f)(p)).collect()
    }

    fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

/// Panel layout shared by every patch of one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub order: usize,
    /// Largest panel width at level 0.
    pub width: f64,
    pub level: u32,
}

impl QuadratureGrid {
    /// Level-0 grid allowing two oscillation periods per panel.
    pub fn for_bandwidth(bandwidth: f64) -> Self {
        let width = if bandwidth > 0.0 {
            (PERIODS_PER_PANEL * std::f64::consts::TAU / bandwidth).min(MAX_PANEL_WIDTH)
        } else {
            MAX_PANEL_WIDTH
        };
        Self {
            order: ORDER,
            width,
            level: 0,
        }
    }

    pub fn at_level(self, level: u32) -> Self {
        Self { level, ..self }
    }

    /// Panel count for a length: the level-0 count doubled per level.
    fn panels(&self, length: f64) -> usize {
        let base = ((length / self.width).ceil() as usize).max(1);
        base << self.level
    }

    fn axis(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        rule(self.order).composite(lo, hi, self.panels(hi - lo))
    }

    /// Nodes and weights in the radial parameter `s ∈ [0, 1]`.
    fn radial(&self, length: f64, graded: bool) -> (Vec<f64>, Vec<f64>) {
        let panels = self.panels(length);
        let gl = rule(self.order);
        let mut edges = Vec::with_capacity(panels + 16);
        edges.push(0.0);
        let first = 1.0 / panels as f64;
        if graded {
            let pieces = GRADING_PIECES + 2 * self.level;
            for k in (1..=pieces).rev() {
                edges.push(first * 0.5f64.powi(k as i32));
            }
        }
        for i in 1..=panels {
            edges.push(if i == panels { 1.0 } else { first * i as f64 });
        }
        let mut s = Vec::with_capacity(edges.len() * self.order);
        let mut w = Vec::with_capacity(edges.len() * self.order);
        for e in edges.windows(2) {
            for (x, wx) in gl.mapped(e[0], e[1]) {
                s.push(x);
                w.push(wx);
            }
        }
        (s, w)
    }
}

fn rect_sum(x: [f64; 2], y: [f64; 2], integrand: &dyn Integrand, grid: QuadratureGrid) -> f64 {
    let (xs, wx) = grid.axis(x[0], x[1]);
    let (ys, wy) = grid.axis(y[0], y[1]);
    let values = integrand.grid(&xs, &ys);
    let q = ys.len();
    let mut total = 0.0;
    for (p, w) in wx.iter().enumerate() {
        let row = &values[p * q..(p + 1) * q];
        let inner: f64 = row.iter().zip(&wy).map(|(v, w)| v * w).sum();
        total += w * inner;
    }
    total
}

fn sector_sum(
    theta: [f64; 2],
    inner: RadialBound,
    outer: RadialBound,
    graded: bool,
    integrand: &dyn Integrand,
    grid: QuadratureGrid,
) -> f64 {
    let r_max = outer.at(theta[0]).max(outer.at(theta[1]));
    let r_min = inner.at(theta[0]).min(inner.at(theta[1]));
    let angular = grid.axis_panels_for_arc(theta, r_max);
    let graded = graded && r_min == 0.0;
    let (ss, ws) = grid.radial(r_max - r_min, graded);
    let mut pts = Vec::with_capacity(angular.0.len() * ss.len());
    let mut wts = Vec::with_capacity(pts.capacity());
    for (&th, &wt) in angular.0.iter().zip(&angular.1) {
        let (sin, cos) = th.sin_cos();
        let r0 = inner.at(th);
        let span = outer.at(th) - r0;
        for (&s, &w) in ss.iter().zip(&ws) {
            let r = r0 + s * span;
            pts.push([r * cos, r * sin]);
            wts.push(wt * w * span * r);
        }
    }
    let values = integrand.points(&pts);
    values.iter().zip(&wts).map(|(v, w)| v * w).sum()
}

impl QuadratureGrid {
    fn axis_panels_for_arc(&self, theta: [f64; 2], radius: f64) -> (Vec<f64>, Vec<f64>) {
        let panels = (((theta[1] - theta[0]) * radius / self.width).ceil() as usize).max(1) << self.level;
        rule(self.order).composite(theta[0], theta[1], panels)
    }
}

/// Region integral at one fixed grid; patches run in parallel and are
/// reduced by a fixed tree in patch order.
pub fn integrate_at(region: &Region, integrand: &dyn Integrand, grid: QuadratureGrid) -> f64 {
    let values: Vec<f64> = region
        .patches
        .par_iter()
        .map(|patch| match *patch {
            Patch::Rect { x, y } => rect_sum(x, y, integrand, grid),
            Patch::Sector {
                theta,
                inner,
                outer,
                graded,
            } => sector_sum(theta, inner, outer, graded, integrand, grid),
        })
        .collect();
    tree_sum(&values)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// `|I_ℓ - I_{ℓ-1}|` at the returned level.
    pub error: f64,
    pub converged: bool,
    pub level: u32,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            error: 0.0,
            converged: true,
            level: 0,
        }
    }
}

/// Refines from level 0 until consecutive levels differ by at most `tol`.
pub fn integrate(region: &Region, integrand: &dyn Integrand, tol: f64) -> QuadratureResult {
    integrate_from(region, integrand, tol, QuadratureGrid::for_bandwidth(integrand.bandwidth()))
}

pub fn integrate_from(
    region: &Region,
    integrand: &dyn Integrand,
    tol: f64,
    base: QuadratureGrid,
) -> QuadratureResult {
    let mut previous = integrate_at(region, integrand, base.at_level(base.level));
    let mut error = f64::INFINITY;
    for level in base.level + 1..=base.level + MAX_LEVEL {
        let current = integrate_at(region, integrand, base.at_level(level));
        error = (current - previous).abs();
        previous = current;
        if error <= tol {
            return QuadratureResult {
                value: current,
                error,
                converged: true,
                level,
            };
        }
    }
    QuadratureResult {
        value: previous,
        error,
        converged: false,
        level: base.level + MAX_LEVEL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn one() -> FnIntegrand<impl Fn([f64; 2]) -> f64 + Sync> {
        FnIntegrand::new(|_| 1.0, 0.0)
    }

    #[test]
    fn disk_area() {
        let r = integrate(&Region::disk(1.0, false), &one(), 1e-13);
        assert!(r.converged);
        assert!((r.value - PI).abs() < 1e-13);
        assert!((Region::disk(2.0, true).area() - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn square_area() {
        let sq = Region::square(PI, false);
        let r = integrate(&sq, &one(), 1e-12);
        assert!((r.value - 4.0 * PI * PI).abs() < 1e-12);
        assert!((sq.area() - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn annulus_area_is_2m_minus_1_squares() {
        let delta = 0.7;
        for m in 2..=10 {
            let a = Region::annulus(m, delta).area() / (4.0 * delta * delta);
            assert!((a - (2 * m - 1) as f64).abs() < 1e-12);
            assert!(a <= 4.0 * (m - 1) as f64);
        }
    }

    #[test]
    fn polynomial_over_square_is_exact() {
        let f = FnIntegrand::new(|x: [f64; 2]| x[0] * x[0] * x[1] * x[1] + x[0], 0.0);
        let r = integrate(&Region::square(1.5, false), &f, 1e-12);
        let exact = (2.0 * 1.5f64.powi(3) / 3.0).powi(2);
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn exponential_over_plane() {
        // 2π ∫₀^∞ e^{-r} r dr = 2π; the plane beyond 40 contributes < 1e-15.
        let f = FnIntegrand::new(|x: [f64; 2]| (-x[0].hypot(x[1])).exp(), 0.0);
        let mut region = Region::square(1.0, false);
        for m in 2..=40 {
            region = region.union(Region::annulus(m, 1.0));
        }
        let r = integrate(&region, &f, 1e-12);
        assert!(r.converged);
        assert!((r.value - 2.0 * PI).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn grading_handles_radial_cusp() {
        // ∫_{|ξ|≤1} |ξ|^{1/2} dξ = 2π/(5/2)
        let f = FnIntegrand::new(|x: [f64; 2]| x[0].hypot(x[1]).sqrt(), 0.0);
        let r = integrate(&Region::disk(1.0, true), &f, 1e-10);
        assert!((r.value - 2.0 * PI / 2.5).abs() < 1e-10);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let f = FnIntegrand::new(|x: [f64; 2]| (3.0 * x[0] - 2.0 * x[1]).cos() * (-x[0].abs()).exp(), 6.0);
        let region = Region::square(2.0, false).union(Region::annulus(2, 2.0));
        let grid = QuadratureGrid::for_bandwidth(6.0);
        let a = integrate_at(&region, &f, grid);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| integrate_at(&region, &f, grid));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn cap_reports_inconclusive() {
        let f = FnIntegrand::new(|x: [f64; 2]| if x[0] > 0.123 { 1.0 } else { 0.0 }, 0.0);
        let r = integrate(&Region::square(1.0, false), &f, 1e-15);
        assert!(!r.converged);
        assert_eq!(r.level, MAX_LEVEL);
    }
}
