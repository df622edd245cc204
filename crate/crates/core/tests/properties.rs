use std::f64::consts::PI;

use proptest::prelude::*;

use poisson_interp::interp::{assemble, solve};
use poisson_interp::kernels::{GeneralizedKernel, Kernel, PoissonKernel};
use poisson_interp::nodes::{generate_lattice, generate_perturbed, PerturbationRule};
use poisson_interp::NodeSet;

fn kernel_strategy() -> impl Strategy<Value = Kernel> {
    prop_oneof![
        (0.3f64..4.0).prop_map(|a| PoissonKernel::new(a).unwrap().into()),
        (0.5f64..3.0, 0.5f64..2.0).prop_map(|(a, w)| GeneralizedKernel::new(a, w).unwrap().into()),
    ]
}

fn perturbed(window: u32, radius: f64, seed: u64) -> NodeSet {
    generate_perturbed(PI, window, radius, seed, PerturbationRule::Kadec).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gram_is_exactly_symmetric(kernel in kernel_strategy(), seed in any::<u64>(), radius in 0.0f64..0.033) {
        let nodes = perturbed(2, radius, seed);
        let sys = assemble(&nodes, kernel).unwrap();
        let m = sys.matrix();
        prop_assert_eq!(m, &m.transpose());
    }

    #[test]
    fn zero_radius_perturbation_is_the_lattice(window in 0u32..5, seed in any::<u64>()) {
        let lattice = generate_lattice(PI, window).unwrap();
        let p = generate_perturbed(PI, window, 0.0, seed, PerturbationRule::Kadec).unwrap();
        prop_assert_eq!(lattice.indices(), p.indices());
        prop_assert_eq!(lattice.points(), p.points());
    }

    #[test]
    fn coefficients_follow_node_permutation(
        alpha in 0.5f64..3.0,
        seed in any::<u64>(),
        order in Just((0..25).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let nodes = perturbed(2, 0.02, seed);
        let samples: Vec<f64> = (0..nodes.len()).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3).collect();
        let kernel = PoissonKernel::new(alpha).unwrap();
        let base = solve(&assemble(&nodes, kernel).unwrap(), &samples).unwrap();

        let permuted = NodeSet::from_parts(
            nodes.band(),
            nodes.window(),
            nodes.kind(),
            order.iter().map(|&i| nodes.indices()[i]).collect(),
            order.iter().map(|&i| nodes.points()[i]).collect(),
        ).unwrap();
        let ps: Vec<f64> = order.iter().map(|&i| samples[i]).collect();
        let moved = solve(&assemble(&permuted, kernel).unwrap(), &ps).unwrap();
        let scale = max_abs(base.coefficients());
        for (k, &i) in order.iter().enumerate() {
            prop_assert!((moved.coefficients()[k] - base.coefficients()[i]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn interpolant_follows_translation(
        kernel in kernel_strategy(),
        shift in prop::array::uniform2(-50.0f64..50.0),
        probe in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let nodes = generate_lattice(PI, 1).unwrap();
        let samples: Vec<f64> = (0..nodes.len()).map(|i| (i as f64 * 0.9).sin()).collect();
        let base = solve(&assemble(&nodes, kernel).unwrap(), &samples).unwrap();

        let shifted = NodeSet::from_parts(
            nodes.band(),
            nodes.window(),
            nodes.kind(),
            nodes.indices().to_vec(),
            nodes.points().iter().map(|p| [p[0] + shift[0], p[1] + shift[1]]).collect(),
        ).unwrap();
        let sys = assemble(&shifted, kernel).unwrap();
        let scale = max_abs(sys.matrix().as_slice());
        let gram = assemble(&nodes, kernel).unwrap();
        for (a, b) in sys.matrix().iter().zip(gram.matrix().iter()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        let moved = solve(&sys, &samples).unwrap();
        let v0 = base.evaluate(probe).unwrap();
        let v1 = moved.evaluate([probe[0] + shift[0], probe[1] + shift[1]]).unwrap();
        // Σ|a_j| K(0) bounds |I| everywhere, so it is the natural scale
        let bound: f64 = base.coefficients().iter().map(|a| a.abs()).sum::<f64>() * kernel.radial(0.0).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-12 * bound, "{} vs {}", v0, v1);
    }

    #[test]
    fn solve_is_homogeneous(alpha in 0.5f64..3.0, c in -1e3f64..1e3, seed in any::<u64>()) {
        let nodes = perturbed(2, 0.02, seed);
        let samples: Vec<f64> = (0..nodes.len()).map(|i| (i as f64).cos()).collect();
        let sys = assemble(&nodes, PoissonKernel::new(alpha).unwrap()).unwrap();
        let base = solve(&sys, &samples).unwrap();
        let scaled: Vec<f64> = samples.iter().map(|s| c * s).collect();
        let out = solve(&sys, &scaled).unwrap();
        let scale = max_abs(base.coefficients()) * c.abs();
        for (a, b) in out.coefficients().iter().zip(base.coefficients()) {
            prop_assert!((a - c * b).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
        }
    }
}
