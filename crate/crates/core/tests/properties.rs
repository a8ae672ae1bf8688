mod common;

use proptest::prelude::*;

use nonlocal_lwr::diagnostics::{l1_error, total_variation};
use nonlocal_lwr::kernel::quadrature_weights;
use nonlocal_lwr::{Grid1D, GridState, KernelFamily, KernelSpec};

fn pass(check: common::Check) {
    match check {
        Ok(detail) => println!("{detail}"),
        Err(detail) => panic!("{detail}"),
    }
}

#[test]
fn mass_is_conserved_by_all_schemes() {
    pass(common::mass_conservation(8));
}

#[test]
fn godunov_maximum_principle() {
    pass(common::maximum_principle(50));
}

#[test]
fn godunov_entropy_inequality() {
    pass(common::entropy_inequality(10));
}

#[test]
fn godunov_tv_growth_bound() {
    pass(common::tv_growth(12));
}

#[test]
fn fluxes_nonnegative_and_velocities_bounded() {
    pass(common::flux_and_velocity_bounds(12));
}

#[test]
fn affine_velocity_models_coincide() {
    pass(common::affine_coincidence(6));
}

#[test]
fn fast_and_direct_backends_agree() {
    pass(common::backend_agreement(8));
}

#[test]
fn kernel_weight_mass_and_refinement() {
    pass(common::weight_properties());
}

#[test]
fn lipschitz_stability_holds() {
    pass(common::lipschitz_scenarios(5));
}

fn state(values: Vec<f64>) -> GridState {
    let grid = Grid1D::new(1.0, values.len()).unwrap();
    GridState::new(grid, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tv_is_rotation_invariant(values in prop::collection::vec(0.0f64..=1.0, 2..200), shift in 0usize..200) {
        let mut rotated = values.clone();
        let k = shift % values.len();
        rotated.rotate_left(k);
        let a = total_variation(&state(values));
        let b = total_variation(&state(rotated));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn tv_of_reversed_profile_matches(values in prop::collection::vec(0.0f64..=1.0, 2..200)) {
        let mut rev = values.clone();
        rev.reverse();
        let a = total_variation(&state(values));
        let b = total_variation(&state(rev));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn l1_is_a_metric(
        triple in (2usize..150).prop_flat_map(|m| (
            prop::collection::vec(0.0f64..=1.0, m),
            prop::collection::vec(0.0f64..=1.0, m),
            prop::collection::vec(0.0f64..=1.0, m),
        ))
    ) {
        let (a, b, c) = (state(triple.0), state(triple.1), state(triple.2));
        let ab = l1_error(&a, &b).unwrap();
        let ba = l1_error(&b, &a).unwrap();
        let bc = l1_error(&b, &c).unwrap();
        let ac = l1_error(&a, &c).unwrap();
        prop_assert_eq!(l1_error(&a, &a).unwrap(), 0.0);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-15);
        prop_assert!(ac <= ab + bc + 1e-15);
    }

    #[test]
    fn weights_split_under_refinement(
        n in 1usize..60,
        m in 10usize..400,
        w0 in 0.1f64..3.0,
        family in 0u8..3,
        a in 0.0f64..0.5,
    ) {
        let h = 1.0 / m as f64;
        let eta = n as f64 * h;
        let family = match family {
            0 => KernelFamily::Constant,
            1 => KernelFamily::DowncastParabola,
            _ => KernelFamily::CustomPolynomial { coefficients: vec![1.0, -a, -a] },
        };
        let spec = KernelSpec { family, eta, w0 };
        let coarse = quadrature_weights(&spec, h).unwrap();
        let fine = quadrature_weights(&spec, h / 2.0).unwrap();
        prop_assert_eq!(coarse.gamma().len(), n);
        prop_assert_eq!(fine.gamma().len(), 2 * n);
        let sum: f64 = coarse.gamma().iter().sum();
        prop_assert!((sum - w0).abs() <= 1e-14 * w0.max(1.0) * 4.0);
        for (k, g) in coarse.gamma().iter().enumerate() {
            prop_assert!((fine.gamma()[2 * k] + fine.gamma()[2 * k + 1] - g).abs() <= 1e-14 * w0.max(1.0));
        }
        prop_assert!(coarse.gamma().windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}
