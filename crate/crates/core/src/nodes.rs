//! Sampling nodes for the band square `S_δ = [-δ, δ]²`.
//!
//! Node families are indexed by `j ∈ {-W..W}²`. The exact lattice
//! `x_j = (π/δ) j` is orthogonal for `S_δ`; perturbed families move each
//! node by at most `(π/δ) L` and stay complete interpolating sequences as
//! long as `L` is below the Kadec-type bound of [`kadec_bound`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::BufRead;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest perturbation accepted under the relaxed (override) rule in two
/// dimensions.
pub const RELAXED_BOUND_2D: f64 = 1.0 / 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSquare {
    delta: f64,
}

impl BandSquare {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::invalid("delta", format!("must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Lattice spacing `π/δ` of the orthogonal exponential basis.
    pub fn spacing(&self) -> f64 {
        PI / self.delta
    }

    pub fn area(&self) -> f64 {
        4.0 * self.delta * self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NodeKind {
    ExactLattice,
    Perturbed { radius: f64, seed: u64 },
}

/// Which admissibility rule a perturbation radius is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerturbationRule {
    /// `L < kadec_bound(2)`, the value guaranteed by the Favier–Zalik theorem.
    #[default]
    Kadec,
    /// `L ≤ 1/20`, the relaxed two-dimensional value. Must be requested
    /// explicitly.
    RelaxedTwentieth,
}

impl PerturbationRule {
    pub fn bound(self) -> f64 {
        match self {
            PerturbationRule::Kadec => kadec_bound(2),
            PerturbationRule::RelaxedTwentieth => RELAXED_BOUND_2D,
        }
    }

    fn admits(self, radius: f64) -> bool {
        match self {
            PerturbationRule::Kadec => radius < self.bound(),
            PerturbationRule::RelaxedTwentieth => radius <= self.bound(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            PerturbationRule::Kadec => "Kadec-type bound for n = 2",
            PerturbationRule::RelaxedTwentieth => "relaxed 1/20 bound for n = 2",
        }
    }
}

/// Finite section of a node family, in a fixed index order.
#[derive(Debug, Clone)]
pub struct NodeSet {
    band: BandSquare,
    window: u32,
    kind: NodeKind,
    indices: Vec<[i64; 2]>,
    points: Vec<[f64; 2]>,
    lookup: HashMap<[i64; 2], usize>,
}

impl NodeSet {
    /// Builds a node set from explicit parts, validating distinctness.
    pub fn from_parts(
        band: BandSquare,
        window: u32,
        kind: NodeKind,
        indices: Vec<[i64; 2]>,
        points: Vec<[f64; 2]>,
    ) -> Result<Self> {
        if indices.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                actual: points.len(),
            });
        }
        if indices.is_empty() {
            return Err(Error::invalid("nodes", "node set is empty"));
        }
        let mut lookup = HashMap::with_capacity(indices.len());
        for (pos, j) in indices.iter().enumerate() {
            if lookup.insert(*j, pos).is_some() {
                return Err(Error::invalid(
                    "nodes",
                    format!("duplicate index ({}, {})", j[0], j[1]),
                ));
            }
        }
        if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::invalid("nodes", "non-finite coordinate"));
        }
        let set = Self {
            band,
            window,
            kind,
            indices,
            points,
            lookup,
        };
        if set.len() > 1 && set.min_separation() <= 0.0 {
            return Err(Error::invalid("nodes", "nodes are not distinct"));
        }
        Ok(set)
    }

    pub fn band(&self) -> BandSquare {
        self.band
    }

    pub fn delta(&self) -> f64 {
        self.band.delta
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn indices(&self) -> &[[i64; 2]] {
        &self.indices
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn position(&self, j: [i64; 2]) -> Option<usize> {
        self.lookup.get(&j).copied()
    }

    pub fn point(&self, j: [i64; 2]) -> Option<[f64; 2]> {
        self.position(j).map(|p| self.points[p])
    }

    pub fn iter(&self) -> impl Iterator<Item = ([i64; 2], [f64; 2])> + '_ {
        self.indices.iter().copied().zip(self.points.iter().copied())
    }

    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (a, p) in self.points.iter().enumerate() {
            for q in &self.points[a + 1..] {
                best = best.min((p[0] - q[0]).hypot(p[1] - q[1]));
            }
        }
        best
    }

    /// Largest distance `|x_j - (π/δ) j|` over the set.
    pub fn max_displacement(&self) -> f64 {
        let h = self.band.spacing();
        self.iter()
            .map(|(j, x)| (x[0] - h * j[0] as f64).hypot(x[1] - h * j[1] as f64))
            .fold(0.0, f64::max)
    }

    /// Writes the text node format: `#` header lines, then `j1 j2 x y`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# poisson-interp node set");
        let _ = writeln!(out, "# delta = {}", self.delta());
        let _ = writeln!(out, "# window = {}", self.window);
        match self.kind {
            NodeKind::ExactLattice => {
                let _ = writeln!(out, "# kind = lattice");
            }
            NodeKind::Perturbed { radius, seed } => {
                let _ = writeln!(out, "# kind = perturbed");
                let _ = writeln!(out, "# L = {radius}");
                let _ = writeln!(out, "# seed = {seed}");
            }
        }
        for (j, x) in self.iter() {
            let _ = writeln!(out, "{} {} {} {}", j[0], j[1], x[0], x[1]);
        }
        out
    }

    /// Parses the text node format written by [`NodeSet::to_text`].
    ///
    /// `delta` must appear in the header. `window` defaults to the largest
    /// index magnitude and `kind` to `lattice`.
    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let mut delta = None;
        let mut window = None;
        let mut kind_name = String::from("lattice");
        let mut radius = None;
        let mut seed = None;
        let mut indices = Vec::new();
        let mut points = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let line_no = lineno + 1;
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    let value = value.trim();
                    let col = line.find('=').unwrap_or(0) + 2;
                    let num = |v: &str| -> Result<f64> {
                        v.parse::<f64>().map_err(|e| Error::Parse {
                            line: line_no,
                            column: col,
                            message: format!("{e}: `{v}`"),
                        })
                    };
                    match key.trim() {
                        "delta" => delta = Some(num(value)?),
                        "window" => window = Some(num(value)? as u32),
                        "kind" => kind_name = value.to_string(),
                        "L" => radius = Some(num(value)?),
                        "seed" => seed = Some(num(value)? as u64),
                        _ => {}
                    }
                }
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("expected `j1 j2 x y`, found {} fields", fields.len()),
                });
            }
            let column_of = |k: usize| line.find(fields[k]).map_or(1, |c| c + 1);
            let int = |k: usize| -> Result<i64> {
                fields[k].parse::<i64>().map_err(|e| Error::Parse {
                    line: line_no,
                    column: column_of(k),
                    message: format!("{e}: `{}`", fields[k]),
                })
            };
            let float = |k: usize| -> Result<f64> {
                fields[k].parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    column: column_of(k),
                    message: format!("{e}: `{}`", fields[k]),
                })
            };
            indices.push([int(0)?, int(1)?]);
            points.push([float(2)?, float(3)?]);
        }
        let delta = delta.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing `# delta = ...` header".into(),
        })?;
        let window = window.unwrap_or_else(|| {
            indices
                .iter()
                .map(|j| j[0].unsigned_abs().max(j[1].unsigned_abs()))
                .max()
                .unwrap_or(0) as u32
        });
        let kind = match kind_name.as_str() {
            "lattice" => NodeKind::ExactLattice,
            "perturbed" => NodeKind::Perturbed {
                radius: radius.unwrap_or(f64::NAN),
                seed: seed.unwrap_or(0),
            },
            other => {
                return Err(Error::Parse {
                    line: 1,
                    column: 1,
                    message: format!("unknown node kind `{other}`"),
                })
            }
        };
        Self::from_parts(BandSquare::new(delta)?, window, kind, indices, points)
    }
}

fn window_indices(window: u32) -> impl Iterator<Item = [i64; 2]> {
    let w = i64::from(window);
    (-w..=w).flat_map(move |a| (-w..=w).map(move |b| [a, b]))
}

/// Exact lattice `x_j = (π/δ) j` on the window `{-W..W}²`.
pub fn generate_lattice(delta: f64, window: u32) -> Result<NodeSet> {
    let band = BandSquare::new(delta)?;
    let h = band.spacing();
    let indices: Vec<[i64; 2]> = window_indices(window).collect();
    let points = indices
        .iter()
        .map(|j| [h * j[0] as f64, h * j[1] as f64])
        .collect();
    NodeSet::from_parts(band, window, NodeKind::ExactLattice, indices, points)
}

/// Perturbed lattice `x_j = (π/δ)(j + ε_j)` with `|ε_j| ≤ L`.
///
/// `ε_j` is uniform on the disk of radius `L`, drawn from a ChaCha stream
/// keyed on `(seed, j)`, so a node depends only on its own index and
/// windows of the same family are nested.
pub fn generate_perturbed(
    delta: f64,
    window: u32,
    radius: f64,
    seed: u64,
    rule: PerturbationRule,
) -> Result<NodeSet> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::invalid("L", format!("must be non-negative, got {radius}")));
    }
    if radius > 0.0 && !rule.admits(radius) {
        return Err(Error::PerturbationTooLarge {
            radius,
            bound: rule.bound(),
            which: rule.label(),
        });
    }
    let band = BandSquare::new(delta)?;
    let h = band.spacing();
    let indices: Vec<[i64; 2]> = window_indices(window).collect();
    let points = indices
        .iter()
        .map(|&j| {
            let eps = perturbation(seed, j, radius);
            [h * (j[0] as f64 + eps[0]), h * (j[1] as f64 + eps[1])]
        })
        .collect();
    NodeSet::from_parts(
        band,
        window,
        NodeKind::Perturbed { radius, seed },
        indices,
        points,
    )
}

fn perturbation(seed: u64, j: [i64; 2], radius: f64) -> [f64; 2] {
    if radius == 0.0 {
        return [0.0, 0.0];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = (u64::from(j[0] as i32 as u32) << 32) | u64::from(j[1] as i32 as u32);
    rng.set_stream(stream);
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let r = radius * u.sqrt();
    let (s, c) = (2.0 * PI * v).sin_cos();
    [r * c, r * s]
}

/// Admissible perturbation radius `π⁻¹ arccos((1 - 9^{1-n})/√2) - 1/4`
/// for the integer lattice in `n` dimensions.
pub fn kadec_bound(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be at least 1");
    let t = (1.0 - 9f64.powi(1 - n as i32)) / std::f64::consts::SQRT_2;
    t.acos() / PI - 0.25
}

/// `2 sin(δt)/t`, i.e. `∫_{-δ}^{δ} e^{-iξt} dξ`.
pub fn interval_transform(delta: f64, t: f64) -> f64 {
    let z = delta * t;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        2.0 * delta * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        2.0 * z.sin() / t
    }
}

/// Gram matrix of the exponentials `e^{i⟨·,x_j⟩}` in `L²(S_δ)`.
///
/// Entry `(j, k)` is `∫_{S_δ} e^{-i⟨ξ, x_j - x_k⟩} dξ`, which is real and
/// separable. Rows are assembled independently.
pub fn exponential_gram(nodes: &NodeSet) -> DMatrix<f64> {
    exponential_gram_of(nodes.points(), nodes.delta())
}

/// [`exponential_gram`] for bare points.
pub fn exponential_gram_of(pts: &[[f64; 2]], delta: f64) -> DMatrix<f64> {
    let n = pts.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    let u = [pts[a][0] - pts[b][0], pts[a][1] - pts[b][1]];
                    interval_transform(delta, u[0]) * interval_transform(delta, u[1])
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |a, b| rows[a][b])
}

/// Finite-section Riesz constants of an exponential system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszEstimate {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub b_hat: f64,
}

impl RieszEstimate {
    pub fn from_extremes(lambda_min: f64, lambda_max: f64) -> Self {
        let b_hat = lambda_max.sqrt().max(1.0 / lambda_min.sqrt());
        Self {
            lambda_min,
            lambda_max,
            b_hat,
        }
    }
}

/// Extreme eigenvalues of an exponential Gram and the resulting `B̂`.
///
/// `B̂` underestimates the Riesz constant of the infinite family: finite
/// sections can only raise `λ_min` and lower `λ_max`.
pub fn riesz_estimate(gram: &DMatrix<f64>) -> Result<RieszEstimate> {
    if gram.nrows() == 0 || gram.nrows() != gram.ncols() {
        return Err(Error::invalid("gram", "must be a non-empty square matrix"));
    }
    let eig = SymmetricEigen::new(gram.clone());
    let lambda_min = eig.eigenvalues.min();
    let lambda_max = eig.eigenvalues.max();
    let tolerance = 1e-12 * lambda_max.abs().max(f64::MIN_POSITIVE);
    if lambda_min <= tolerance {
        return Err(Error::DegenerateSection {
            lambda_min,
            tolerance,
        });
    }
    Ok(RieszEstimate::from_extremes(lambda_min, lambda_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_examples() {
        let n = generate_lattice(PI, 1).unwrap();
        assert_eq!(n.len(), 9);
        assert_eq!(n.point([0, 0]), Some([0.0, 0.0]));
        assert_eq!(n.point([1, 0]), Some([1.0, 0.0]));

        let single = generate_lattice(PI / 2.0, 0).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.points()[0], [0.0, 0.0]);

        let unit = generate_lattice(1.0, 1).unwrap();
        assert_eq!(unit.point([1, 1]), Some([PI, PI]));
    }

    #[test]
    fn zero_perturbation_reproduces_lattice() {
        let lat = generate_lattice(PI, 2).unwrap();
        for seed in [0, 7, 12345] {
            let p = generate_perturbed(PI, 2, 0.0, seed, PerturbationRule::Kadec).unwrap();
            assert_eq!(lat.points(), p.points());
            assert_eq!(lat.indices(), p.indices());
        }
    }

    #[test]
    fn perturbation_stays_within_radius() {
        let p = generate_perturbed(PI, 2, 0.03, 7, PerturbationRule::Kadec).unwrap();
        assert!(p.max_displacement() <= 0.03 + 1e-15);
        assert!(p.max_displacement() > 0.0);
        let q = generate_perturbed(2.0, 3, 0.03, 7, PerturbationRule::Kadec).unwrap();
        assert!(q.max_displacement() <= (PI / 2.0) * 0.03 + 1e-15);
    }

    #[test]
    fn relaxed_rule_requires_override() {
        let err = generate_perturbed(PI, 2, 0.05, 7, PerturbationRule::Kadec).unwrap_err();
        assert!(matches!(err, Error::PerturbationTooLarge { .. }));
        assert!(generate_perturbed(PI, 2, 0.05, 7, PerturbationRule::RelaxedTwentieth).is_ok());
        assert!(generate_perturbed(PI, 2, 0.051, 7, PerturbationRule::RelaxedTwentieth).is_err());
        assert!(generate_perturbed(PI, 2, -0.01, 7, PerturbationRule::Kadec).is_err());
    }

    #[test]
    fn perturbations_are_keyed_on_index() {
        let small = generate_perturbed(PI, 1, 0.03, 11, PerturbationRule::Kadec).unwrap();
        let large = generate_perturbed(PI, 3, 0.03, 11, PerturbationRule::Kadec).unwrap();
        for (j, x) in small.iter() {
            assert_eq!(large.point(j), Some(x));
        }
        let other = generate_perturbed(PI, 1, 0.03, 12, PerturbationRule::Kadec).unwrap();
        assert_ne!(small.points(), other.points());
    }

    #[test]
    fn kadec_bound_values() {
        assert!((kadec_bound(1) - 0.25).abs() < 1e-15);
        let b2 = kadec_bound(2);
        assert!((b2 - 0.033_653_104_061_214_54).abs() < 1e-14);
        assert!(b2 < RELAXED_BOUND_2D);
        // bisection on cos for the same closed form
        let target = (1.0 - 1.0 / 9.0) / std::f64::consts::SQRT_2;
        let (mut lo, mut hi) = (0.0, PI / 2.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid.cos() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo / PI - 0.25 - b2).abs() < 1e-14);
    }

    #[test]
    fn lattice_gram_is_scaled_identity() {
        for delta in [0.25, 1.0, PI, 5.0] {
            let n = generate_lattice(delta, 2).unwrap();
            let g = exponential_gram(&n);
            let d = 4.0 * delta * delta;
            for a in 0..n.len() {
                for b in 0..n.len() {
                    let expect = if a == b { d } else { 0.0 };
                    assert!((g[(a, b)] - expect).abs() <= 1e-12 * d, "delta {delta}");
                }
            }
        }
    }

    #[test]
    fn gram_small_cases() {
        let single = generate_lattice(2.0, 0).unwrap();
        let g = exponential_gram(&single);
        assert_eq!(g.nrows(), 1);
        assert_eq!(g[(0, 0)], 16.0);

        let delta = 1.3;
        let band = BandSquare::new(delta).unwrap();
        let two = NodeSet::from_parts(
            band,
            1,
            NodeKind::ExactLattice,
            vec![[0, 0], [1, 0]],
            vec![[0.0, 0.0], [PI / delta, 0.0]],
        )
        .unwrap();
        let g = exponential_gram(&two);
        assert!(g[(0, 1)].abs() < 1e-14);
        assert_eq!(g[(0, 1)], g[(1, 0)]);
    }

    #[test]
    fn riesz_examples() {
        let n = generate_lattice(PI, 2).unwrap();
        let r = riesz_estimate(&exponential_gram(&n)).unwrap();
        let four_pi2 = 4.0 * PI * PI;
        assert!((r.lambda_min - four_pi2).abs() < 1e-10 * four_pi2);
        assert!((r.lambda_max - four_pi2).abs() < 1e-10 * four_pi2);
        assert!((r.b_hat - 2.0 * PI).abs() < 1e-10 * 2.0 * PI);

        let n = generate_lattice(0.25, 1).unwrap();
        let r = riesz_estimate(&exponential_gram(&n)).unwrap();
        assert!((r.b_hat - 2.0).abs() < 1e-10);

        let p = generate_perturbed(PI, 3, 0.03, 7, PerturbationRule::Kadec).unwrap();
        let r = riesz_estimate(&exponential_gram(&p)).unwrap();
        assert!(r.lambda_min > 0.0);
        assert!(r.b_hat >= 2.0 * PI);
    }

    #[test]
    fn degenerate_gram_is_rejected() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            riesz_estimate(&g),
            Err(Error::DegenerateSection { .. })
        ));
    }

    #[test]
    fn section_extremes_are_monotone_in_window() {
        let mut prev: Option<RieszEstimate> = None;
        for w in 1..=3 {
            let p = generate_perturbed(PI, w, 0.03, 3, PerturbationRule::Kadec).unwrap();
            let r = riesz_estimate(&exponential_gram(&p)).unwrap();
            if let Some(q) = prev {
                assert!(r.lambda_min <= q.lambda_min * (1.0 + 1e-12));
                assert!(r.lambda_max >= q.lambda_max * (1.0 - 1e-12));
            }
            prev = Some(r);
        }
    }

    #[test]
    fn text_format_round_trip() {
        let p = generate_perturbed(PI, 2, 0.02, 5, PerturbationRule::Kadec).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("# poisson-interp node set\n# delta = "));
        let q = NodeSet::from_text(text.as_bytes()).unwrap();
        assert_eq!(p.points(), q.points());
        assert_eq!(p.indices(), q.indices());
        assert_eq!(p.kind(), q.kind());
        assert_eq!(q.window(), 2);
    }

    #[test]
    fn text_format_reports_position_of_bad_field() {
        let text = "# delta = 3\n0 0 0.0 0.0\n1 0 1.0 zz\n";
        match NodeSet::from_text(text.as_bytes()) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, 9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(NodeSet::from_text("0 0 0 0\n".as_bytes()).is_err());
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let band = BandSquare::new(1.0).unwrap();
        let r = NodeSet::from_parts(
            band,
            1,
            NodeKind::ExactLattice,
            vec![[0, 0], [1, 0]],
            vec![[0.5, 0.5], [0.5, 0.5]],
        );
        assert!(r.is_err());
    }
}
