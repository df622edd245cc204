mod common;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use poisson_interp::interp::Interpolant;
use poisson_interp::kernels::{GeneralizedKernel, Kernel, PoissonKernel};
use poisson_interp::nodes::{exponential_gram_of, generate_lattice};
use poisson_interp::spaces::jinc_function;
use poisson_interp::spectral::error_l2;
use poisson_interp::{BandlimitedFunction, NodeKind, NodeSet};

#[test]
fn exponential_gram_matches_tensor_quadrature() {
    let delta = PI;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let a = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let b = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let e = exponential_gram_of(&[a, b], delta);
        let t = [a[0] - b[0], a[1] - b[1]];
        let oracle = common::exponential_gram_entry(t, delta);
        assert!((e[(0, 1)] - oracle).abs() <= 1e-8 * oracle.abs(), "{t:?}: {} vs {oracle}", e[(0, 1)]);
        assert!((e[(0, 0)] - 4.0 * delta * delta).abs() < 1e-12);
    }
}

#[test]
fn jinc_matches_ball_quadrature() {
    for beta in [0.25, 1.0, PI / 6.0] {
        let f = jinc_function(beta).unwrap();
        for r in [0.0, 0.5, 3.0, 17.0, 40.0] {
            let oracle = common::ball_inverse_transform(beta, r);
            let v = f.eval([r, 0.0]);
            let scale = f.eval([0.0, 0.0]);
            assert!((v - oracle).abs() <= 1e-7 * scale, "beta {beta} r {r}: {v} vs {oracle}");
        }
    }
}

#[test]
fn two_node_norm_agrees_in_space_and_frequency() {
    let lattice = generate_lattice(PI, 1).unwrap();
    let nodes = NodeSet::from_parts(
        lattice.band(),
        1,
        NodeKind::ExactLattice,
        vec![[0, 0], [1, 0]],
        vec![[0.0, 0.0], [1.0, 0.0]],
    )
    .unwrap();
    let interp = Interpolant::from_coefficients(&nodes, PoissonKernel::new(1.0).unwrap(), vec![1.0, -0.5]).unwrap();
    let spatial = common::spatial_norm_sq(&interp, [0.5, 0.0], 400.0);
    let zero = BandlimitedFunction::zero(0.25).unwrap();
    let spectral = error_l2(&zero, &interp, None).unwrap().l2_total.powi(2);
    assert!((spatial - spectral).abs() <= 0.02 * spectral, "{spatial} vs {spectral}");
}

#[test]
fn generalized_kernel_at_omega_one_is_scaled_poisson() {
    for alpha in [0.7, 2.0] {
        let g: Kernel = GeneralizedKernel::new(alpha, 1.0).unwrap().into();
        let p = PoissonKernel::new(alpha).unwrap();
        for r in [0.0, 0.3, 1.0, 2.5, 6.0] {
            let expect = 4.0 * PI * PI * p.eval([r, 0.0]);
            let v = g.radial(r).unwrap();
            assert!((v - expect).abs() <= 1e-7 * expect, "alpha {alpha} r {r}");
        }
    }
}

#[test]
fn gaussian_symbol_at_origin() {
    // ∫ e^{-α|ξ|²} dξ = π / α
    for alpha in [1.0, 2.0] {
        let g: Kernel = GeneralizedKernel::new(alpha, 2.0).unwrap().into();
        let v = g.radial(0.0).unwrap();
        assert!((v - PI / alpha).abs() <= 1e-8 * PI / alpha);
    }
}
