//! Gram systems, interpolants and their Fourier-side description.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::linalg;
use crate::nodes::{NodeSet, RieszEstimate};
use crate::spectral;

/// Relative residual demanded of every solve.
pub const SOLVE_TOL: f64 = 1e-12;

/// Default slack applied to `B̂` in bound checks.
pub const DEFAULT_SLACK: f64 = 1.2;

/// Kernel matrix `G_kj = g(x_k - x_j)` of a node set.
#[derive(Debug, Clone)]
pub struct GramSystem {
    nodes: NodeSet,
    kernel: Kernel,
    matrix: DMatrix<f64>,
}

impl GramSystem {
    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn assemble(nodes: &NodeSet, kernel: impl Into<Kernel>) -> Result<GramSystem> {
    let kernel = kernel.into();
    let pts = nodes.points();
    let n = pts.len();
    let matrix = match kernel {
        Kernel::Poisson(k) => {
            // r² is computed from differences, so rows are exactly symmetric.
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            let dx = pts[a][0] - pts[b][0];
                            let dy = pts[a][1] - pts[b][1];
                            k.eval_sq(dx * dx + dy * dy)
                        })
                        .collect()
                })
                .collect();
            DMatrix::from_fn(n, n, |a, b| rows[a][b])
        }
        Kernel::Generalized(_) => {
            let mut radii = Vec::with_capacity(n * (n + 1) / 2);
            for a in 0..n {
                for b in a..n {
                    radii.push((pts[a][0] - pts[b][0]).hypot(pts[a][1] - pts[b][1]));
                }
            }
            let values = kernel.radial_many(&radii)?;
            let mut m = DMatrix::zeros(n, n);
            let mut it = values.into_iter();
            for a in 0..n {
                for b in a..n {
                    let v = it.next().expect("one value per pair");
                    m[(a, b)] = v;
                    m[(b, a)] = v;
                }
            }
            m
        }
    };
    Ok(GramSystem {
        nodes: nodes.clone(),
        kernel,
        matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Cholesky,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub relative_residual: f64,
    pub method: SolveMethod,
    /// `λ_max / λ_min` of the Gram matrix.
    pub condition_estimate: f64,
    /// Refinement steps or CG iterations.
    pub iterations: usize,
}

/// A solved interpolant `I(x) = Σ_j a_j g(x - x_j)`.
#[derive(Debug, Clone)]
pub struct Interpolant {
    nodes: NodeSet,
    kernel: Kernel,
    coefficients: Vec<f64>,
    report: Option<SolveReport>,
}

pub fn solve(system: &GramSystem, samples: &[f64]) -> Result<Interpolant> {
    solve_with_tol(system, samples, SOLVE_TOL)
}

/// Cholesky with refinement first; Jacobi-preconditioned CG if the
/// factorization breaks down or misses `tol`.
pub fn solve_with_tol(system: &GramSystem, samples: &[f64], tol: f64) -> Result<Interpolant> {
    let n = system.len();
    if samples.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: samples.len(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let a = system.matrix();
    let b = DVector::from_column_slice(samples);
    let mut detail = String::from("Cholesky factorization failed");
    if let Some((x, res, chol)) = linalg::cholesky_solve(a, &b, tol) {
        if res <= tol {
            let lmax = linalg::power_lambda_max(a, 60);
            let lmin = linalg::inverse_lambda_min(&chol, 60);
            return Ok(Interpolant {
                nodes: system.nodes.clone(),
                kernel: system.kernel,
                coefficients: x.as_slice().to_vec(),
                report: Some(SolveReport {
                    relative_residual: res,
                    method: SolveMethod::Cholesky,
                    condition_estimate: lmax / lmin,
                    iterations: 0,
                }),
            });
        }
        detail = format!("Cholesky residual {res:e} above {tol:e}");
    }
    let cg = linalg::preconditioned_cg(a, &b, tol, 10 * n);
    if cg.converged {
        let (lmin, lmax) = linalg::symmetric_extremes(a);
        return Ok(Interpolant {
            nodes: system.nodes.clone(),
            kernel: system.kernel,
            coefficients: cg.x.as_slice().to_vec(),
            report: Some(SolveReport {
                relative_residual: cg.relative_residual,
                method: SolveMethod::ConjugateGradient,
                condition_estimate: lmax / lmin,
                iterations: cg.iterations,
            }),
        });
    }
    Err(Error::NotPositiveDefinite {
        n,
        alpha: system.kernel.alpha(),
        detail: format!(
            "{detail}; CG stopped at residual {:e} after {} iterations",
            cg.relative_residual, cg.iterations
        ),
    })
}

impl Interpolant {
    /// An interpolant with prescribed coefficients and no solve report.
    pub fn from_coefficients(
        nodes: &NodeSet,
        kernel: impl Into<Kernel>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        if coefficients.len() != nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                actual: coefficients.len(),
            });
        }
        Ok(Self {
            nodes: nodes.clone(),
            kernel: kernel.into(),
            coefficients,
            report: None,
        })
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn report(&self) -> Option<&SolveReport> {
        self.report.as_ref()
    }

    /// The same interpolant with every coefficient set to zero.
    pub fn zeroed(&self) -> Self {
        Self {
            coefficients: vec![0.0; self.coefficients.len()],
            report: None,
            ..self.clone()
        }
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Result<f64> {
        let pts = self.nodes.points();
        match self.kernel {
            Kernel::Poisson(k) => Ok(self
                .coefficients
                .iter()
                .zip(pts)
                .map(|(a, p)| {
                    let dx = x[0] - p[0];
                    let dy = x[1] - p[1];
                    a * k.eval_sq(dx * dx + dy * dy)
                })
                .sum()),
            Kernel::Generalized(_) => {
                let radii: Vec<f64> = pts.iter().map(|p| (x[0] - p[0]).hypot(x[1] - p[1])).collect();
                let values = self.kernel.radial_many(&radii)?;
                Ok(self.coefficients.iter().zip(values).map(|(a, g)| a * g).sum())
            }
        }
    }

    /// Values at many points; each sum runs in index order.
    pub fn evaluate_many(&self, xs: &[[f64; 2]]) -> Result<Vec<f64>> {
        match self.kernel {
            Kernel::Poisson(_) => xs.par_iter().map(|&x| self.evaluate(x)).collect(),
            Kernel::Generalized(_) => {
                let pts = self.nodes.points();
                let radii: Vec<f64> = xs
                    .iter()
                    .flat_map(|x| pts.iter().map(move |p| (x[0] - p[0]).hypot(x[1] - p[1])))
                    .collect();
                let values = self.kernel.radial_many(&radii)?;
                Ok(values
                    .chunks(pts.len())
                    .map(|row| self.coefficients.iter().zip(row).map(|(a, g)| a * g).sum())
                    .collect())
            }
        }
    }

    pub fn symbol(&self) -> SpectralSymbol {
        SpectralSymbol::new(self.coefficients.clone(), self.nodes.points().to_vec())
    }
}

/// Exponential sum `u(ξ) = Σ_j a_j e^{-i⟨ξ, x_j⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSymbol {
    coefficients: Vec<f64>,
    points: Vec<[f64; 2]>,
}

impl SpectralSymbol {
    pub fn new(coefficients: Vec<f64>, points: Vec<[f64; 2]>) -> Self {
        assert_eq!(coefficients.len(), points.len(), "one coefficient per point");
        Self {
            coefficients,
            points,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&a| a == 0.0)
    }

    /// `Σ |a_j|`, a uniform bound on `|u|`.
    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|a| a.abs()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coefficients.iter().map(|a| a * a).sum()
    }

    /// The sum with every node moved by `-shift`.
    pub fn translated(&self, shift: [f64; 2]) -> Self {
        Self {
            coefficients: self.coefficients.clone(),
            points: self
                .points
                .iter()
                .map(|p| [p[0] - shift[0], p[1] - shift[1]])
                .collect(),
        }
    }

    /// Largest coordinate spread `max_{j,k} |x_j - x_k|_∞`: the highest
    /// frequency present in `|u|²`.
    pub fn spread(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        if self.points.is_empty() {
            0.0
        } else {
            (hi[0] - lo[0]).max(hi[1] - lo[1])
        }
    }

    /// Largest coordinate magnitude `max_j |x_j|_∞`: the highest frequency
    /// in `u` itself.
    pub fn reach(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, xi: [f64; 2]) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (a, p) in self.coefficients.iter().zip(&self.points) {
            let (s, c) = (xi[0] * p[0] + xi[1] * p[1]).sin_cos();
            re += a * c;
            im -= a * s;
        }
        Complex64::new(re, im)
    }

    pub fn eval_points(&self, xis: &[[f64; 2]]) -> Vec<Complex64> {
        xis.iter().map(|&xi| self.eval(xi)).collect()
    }

    /// `u` on the tensor grid `xs × ys` as `(Re u, Im u)`, each `|xs| × |ys|`.
    ///
    /// Uses `e^{-i(θ+φ)} = (cos θ cos φ - sin θ sin φ) - i (sin θ cos φ + cos θ sin φ)`
    /// so the grid costs four matrix products.
    pub fn eval_grid(&self, xs: &[f64], ys: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.points.len();
        let (p, q) = (xs.len(), ys.len());
        let mut ac = DMatrix::zeros(p, n);
        let mut as_ = DMatrix::zeros(p, n);
        for j in 0..n {
            let a = self.coefficients[j];
            let xj = self.points[j][0];
            for (r, &x) in xs.iter().enumerate() {
                let (s, c) = (x * xj).sin_cos();
                ac[(r, j)] = a * c;
                as_[(r, j)] = a * s;
            }
        }
        let mut cy = DMatrix::zeros(n, q);
        let mut sy = DMatrix::zeros(n, q);
        for j in 0..n {
            let yj = self.points[j][1];
            for (c, &y) in ys.iter().enumerate() {
                let (s, co) = (y * yj).sin_cos();
                cy[(j, c)] = co;
                sy[(j, c)] = s;
            }
        }
        let re = &ac * &cy - &as_ * &sy;
        let im = -(&as_ * &cy + &ac * &sy);
        (re, im)
    }
}

/// `F[I](ξ) = (2π/c) · symbol(|ξ|) · u(ξ)` under the unitary transform,
/// where `c` is the kernel's spectral scale.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    kernel: Kernel,
    symbol: SpectralSymbol,
}

pub fn spectral_transform(interp: &Interpolant) -> SpectralTransform {
    SpectralTransform {
        kernel: interp.kernel,
        symbol: interp.symbol(),
    }
}

impl SpectralTransform {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn symbol(&self) -> &SpectralSymbol {
        &self.symbol
    }

    /// Radial factor multiplying `u(ξ)`.
    pub fn radial_factor(&self, rho: f64) -> f64 {
        self.kernel.transform_factor() * self.kernel.symbol_radius(rho)
    }

    pub fn eval(&self, xi: [f64; 2]) -> Complex64 {
        self.symbol.eval(xi) * self.radial_factor(xi[0].hypot(xi[1]))
    }
}

/// Outcome of the two-sided quadratic-form check.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticFormReport {
    pub alpha: f64,
    pub delta: f64,
    pub coefficient_norm_sq: f64,
    /// `∫ e^{-α|ξ|} |H(ξ)|² dξ` by spectral quadrature.
    pub q: f64,
    pub quadrature_error: f64,
    /// `(2π)² aᵀ G a` from the assembled Gram matrix.
    pub q_gram: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub b: f64,
    pub slack: f64,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
    pub conclusive: bool,
    pub lower_pass: bool,
    pub upper_pass: bool,
}

impl QuadraticFormReport {
    pub fn pass(&self) -> bool {
        self.conclusive && self.lower_pass && self.upper_pass
    }
}

/// Checks `e^{-√2αδ} λ_min(E) ‖a‖² ≤ Q ≤ (B² + 4B⁶ q/(1-q)²) ‖a‖²` with
/// `q = e^{-αδ}` and `B = B̂ · slack`.
pub fn quadratic_form_bounds(
    nodes: &NodeSet,
    alpha: f64,
    a: &[f64],
    riesz: &RieszEstimate,
    slack: f64,
) -> Result<QuadraticFormReport> {
    if a.len() != nodes.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            actual: a.len(),
        });
    }
    let norm_sq: f64 = a.iter().map(|v| v * v).sum();
    if !(norm_sq > 0.0) {
        return Err(Error::invalid("a", "coefficient vector must be non-zero"));
    }
    let kernel = crate::kernels::PoissonKernel::new(alpha)?;
    let delta = nodes.delta();
    let symbol = SpectralSymbol::new(a.to_vec(), nodes.points().to_vec());
    let measured = spectral::quadratic_form(&symbol, delta, |rho| (-alpha * rho).exp())?;

    let gram = assemble(nodes, kernel)?;
    let av = DVector::from_column_slice(a);
    let q_gram = crate::kernels::POISSON_SPECTRAL_SCALE * av.dot(&(gram.matrix() * &av));

    let b = riesz.b_hat * slack;
    let qd = (-alpha * delta).exp();
    let lower_bound = (-std::f64::consts::SQRT_2 * alpha * delta).exp() * riesz.lambda_min * norm_sq;
    let upper_bound = (b * b + 4.0 * b.powi(6) * qd / (1.0 - qd).powi(2)) * norm_sq;
    let q = measured.value;
    let conclusive = measured.converged && measured.error <= 1e-6 * q.abs();
    Ok(QuadraticFormReport {
        alpha,
        delta,
        coefficient_norm_sq: norm_sq,
        q,
        quadrature_error: measured.error,
        q_gram,
        lower_bound,
        upper_bound,
        b,
        slack,
        lower_ratio: lower_bound / q,
        upper_ratio: q / upper_bound,
        conclusive,
        lower_pass: q >= lower_bound,
        upper_pass: q <= upper_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{GeneralizedKernel, PoissonKernel};
    use crate::nodes::{exponential_gram, generate_lattice, riesz_estimate, BandSquare, NodeKind};
    use crate::spaces::{jinc_function, samples_on};
    use std::f64::consts::PI;

    fn custom(points: Vec<[f64; 2]>) -> NodeSet {
        let indices = (0..points.len() as i64).map(|i| [i, 0]).collect();
        NodeSet::from_parts(BandSquare::new(PI).unwrap(), 0, NodeKind::ExactLattice, indices, points)
            .unwrap()
    }

    #[test]
    fn single_node_gram_and_solve() {
        let nodes = generate_lattice(PI, 0).unwrap();
        let sys = assemble(&nodes, PoissonKernel::new(1.0).unwrap()).unwrap();
        assert!((sys.matrix()[(0, 0)] - 1.0 / (2.0 * PI)).abs() < 1e-16);
        for alpha in [0.5, 1.0, 3.0] {
            let sys = assemble(&nodes, PoissonKernel::new(alpha).unwrap()).unwrap();
            let i = solve(&sys, &[0.7]).unwrap();
            let expect = 2.0 * PI * alpha * alpha * 0.7;
            assert!((i.coefficients()[0] - expect).abs() < 1e-13 * expect);
        }
    }

    #[test]
    fn two_node_off_diagonal() {
        let nodes = custom(vec![[0.0, 0.0], [1.0, 2.0f64.sqrt()]]);
        let sys = assemble(&nodes, PoissonKernel::new(1.0).unwrap()).unwrap();
        assert!((sys.matrix()[(0, 1)] - 1.0 / (16.0 * PI)).abs() < 1e-15);
        assert_eq!(sys.matrix()[(0, 1)], sys.matrix()[(1, 0)]);
    }

    #[test]
    fn lattice_gram_is_diagonally_dominant_and_symmetric() {
        let nodes = generate_lattice(PI, 1).unwrap();
        let sys = assemble(&nodes, PoissonKernel::new(0.25).unwrap()).unwrap();
        let m = sys.matrix();
        assert_eq!(m.nrows(), 9);
        assert_eq!(m, &m.transpose());
        for i in 0..9 {
            let off: f64 = (0..9).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            assert!(m[(i, i)] > off);
            assert_eq!(m[(i, i)], m[(0, 0)]);
        }
    }

    #[test]
    fn zero_samples_give_zero_coefficients() {
        let nodes = generate_lattice(PI, 2).unwrap();
        let sys = assemble(&nodes, PoissonKernel::new(1.0).unwrap()).unwrap();
        let i = solve(&sys, &vec![0.0; nodes.len()]).unwrap();
        assert!(i.coefficients().iter().all(|&a| a == 0.0));
        assert_eq!(i.report().unwrap().relative_residual, 0.0);
        assert_eq!(i.evaluate([0.3, -1.2]).unwrap(), 0.0);
    }

    #[test]
    fn jinc_interpolation_reproduces_samples() {
        let nodes = generate_lattice(PI, 4).unwrap();
        let f = jinc_function(0.25).unwrap();
        let y = samples_on(&f, &nodes);
        let sys = assemble(&nodes, PoissonKernel::new(1.0).unwrap()).unwrap();
        let i = solve(&sys, &y).unwrap();
        let rep = i.report().unwrap();
        assert!(rep.relative_residual <= 1e-12);
        assert_eq!(rep.method, SolveMethod::Cholesky);
        let back = i.evaluate_many(nodes.points()).unwrap();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (b, s) in back.iter().zip(&y) {
            assert!((b - s).abs() <= 1e-9 * ynorm);
        }
    }

    #[test]
    fn single_node_evaluation() {
        let nodes = generate_lattice(PI, 0).unwrap();
        let i = Interpolant::from_coefficients(&nodes, PoissonKernel::new(1.0).unwrap(), vec![2.0 * PI])
            .unwrap();
        let v = i.evaluate([1.0, 2.0f64.sqrt()]).unwrap();
        assert!((v - 0.125).abs() < 1e-15);
    }

    #[test]
    fn unreachable_tolerance_fails_both_paths() {
        let nodes = generate_lattice(PI, 1).unwrap();
        let sys = assemble(&nodes, PoissonKernel::new(1.0).unwrap()).unwrap();
        let y: Vec<f64> = (0..9).map(|i| (i as f64).cos()).collect();
        let r = solve_with_tol(&sys, &y, 1e-40);
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
        let ok = solve_with_tol(&sys, &y, 1e-12).unwrap();
        assert_eq!(ok.report().unwrap().method, SolveMethod::Cholesky);
    }

    #[test]
    fn generalized_gram_matches_poisson_at_omega_one() {
        let nodes = generate_lattice(PI, 1).unwrap();
        let p = assemble(&nodes, PoissonKernel::new(1.0).unwrap()).unwrap();
        let g = assemble(&nodes, GeneralizedKernel::new(1.0, 1.0).unwrap()).unwrap();
        let scale = crate::kernels::POISSON_SPECTRAL_SCALE;
        for (a, b) in p.matrix().iter().zip(g.matrix().iter()) {
            assert!((a * scale - b).abs() < 1e-8 * b.abs());
        }
    }

    #[test]
    fn gram_is_positive_definite_over_alpha_range() {
        for w in [2, 6, 10] {
            let nodes = generate_lattice(PI, w).unwrap();
            for alpha in [0.5, 1.0, 2.0, 4.0] {
                let sys = assemble(&nodes, PoissonKernel::new(alpha).unwrap()).unwrap();
                let (lo, _) = linalg::symmetric_extremes(sys.matrix());
                assert!(lo > 0.0, "W={w} alpha={alpha}: {lo}");
            }
        }
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let s = SpectralSymbol::new(vec![1.0, -0.4, 2.5], vec![[0.0, 0.1], [1.3, -2.0], [-0.7, 0.9]]);
        let xs = [-1.0, 0.2, 2.9];
        let ys = [0.5, -3.1];
        let (re, im) = s.eval_grid(&xs, &ys);
        for (p, &x) in xs.iter().enumerate() {
            for (q, &y) in ys.iter().enumerate() {
                let u = s.eval([x, y]);
                assert!((re[(p, q)] - u.re).abs() < 1e-13);
                assert!((im[(p, q)] - u.im).abs() < 1e-13);
                assert!(u.norm() <= s.l1_norm() + 1e-15);
            }
        }
    }

    #[test]
    fn single_node_transform() {
        let nodes = generate_lattice(PI, 0).unwrap();
        let i = Interpolant::from_coefficients(&nodes, PoissonKernel::new(1.5).unwrap(), vec![1.0])
            .unwrap();
        let t = spectral_transform(&i);
        for xi in [[0.0f64, 0.0], [0.3, -2.0], [4.0, 4.0]] {
            let r = xi[0].hypot(xi[1]);
            let expect = (-1.5 * r).exp() / (2.0 * PI);
            let v = t.eval(xi);
            assert!((v.re - expect).abs() < 1e-16 && v.im.abs() < 1e-16);
        }
        assert_eq!(spectral_transform(&i.zeroed()).eval([0.1, 0.2]).norm(), 0.0);
    }

    #[test]
    fn single_node_quadratic_form() {
        let nodes = generate_lattice(PI, 0).unwrap();
        let riesz = riesz_estimate(&exponential_gram(&nodes)).unwrap();
        let rep = quadratic_form_bounds(&nodes, 1.0, &[1.0], &riesz, DEFAULT_SLACK).unwrap();
        assert!((rep.q - 2.0 * PI).abs() < 1e-9);
        assert!((rep.q_gram - 2.0 * PI).abs() < 1e-12);
        let lower = (-std::f64::consts::SQRT_2 * PI).exp() * 4.0 * PI * PI;
        assert!((rep.lower_bound - lower).abs() < 1e-12);
        assert!((lower - 0.464344379272502).abs() < 1e-12);
        assert!(rep.pass());
    }

    #[test]
    fn quadratic_form_is_homogeneous() {
        let nodes = generate_lattice(PI, 1).unwrap();
        let riesz = riesz_estimate(&exponential_gram(&nodes)).unwrap();
        let a: Vec<f64> = (0..9).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        let base = quadratic_form_bounds(&nodes, 2.0, &a, &riesz, DEFAULT_SLACK).unwrap();
        let t = 3.0;
        let scaled: Vec<f64> = a.iter().map(|v| v * t).collect();
        let rep = quadratic_form_bounds(&nodes, 2.0, &scaled, &riesz, DEFAULT_SLACK).unwrap();
        assert!((rep.q - t * t * base.q).abs() < 1e-9 * rep.q);
        assert!((rep.lower_bound - t * t * base.lower_bound).abs() < 1e-12 * rep.lower_bound);
        assert!((rep.upper_bound - t * t * base.upper_bound).abs() < 1e-12 * rep.upper_bound);
        assert_eq!(rep.pass(), base.pass());
    }
}
