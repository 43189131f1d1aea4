//! Property-based invariants of the analytic layer and the formatting
//! contract; fast checks complementing the acceptance suite.

use proptest::prelude::*;

use cpwall::closedform;
use cpwall::units::{density_to_physical, to_reduced, Constants, PhysicalSetup, UnitSystem};

proptest! {
    #[test]
    fn sigma_hat_is_positive_and_bounded_by_its_peak(u in 0.0..50.0f64) {
        let v = closedform::sigma_hat(u).unwrap();
        prop_assert!(v > 0.0);
        prop_assert!(v <= 17.0);
    }

    #[test]
    fn sigma_hat_is_strictly_decreasing(u in 0.0..40.0f64, h in 1e-3..1.0f64) {
        let a = closedform::sigma_hat(u).unwrap();
        let b = closedform::sigma_hat(u + h).unwrap();
        prop_assert!(b < a, "sigma_hat({u}) = {a} !> sigma_hat({}) = {b}", u + h);
    }

    #[test]
    fn enclosed_fraction_is_a_cdf(r in 0.0..100.0f64, h in 1e-3..5.0f64) {
        let a = closedform::enclosed_force_fraction(r).unwrap();
        let b = closedform::enclosed_force_fraction(r + h).unwrap();
        prop_assert!((0.0..1.0).contains(&a));
        prop_assert!(b > a, "fraction must be strictly increasing");
    }

    #[test]
    fn reduced_coordinate_is_scale_invariant(
        rho in 0.0..10.0f64,
        d in 0.01..10.0f64,
        lambda in 0.01..100.0f64,
    ) {
        let base = PhysicalSetup::new(1.0, d, UnitSystem::Natural).unwrap();
        let scaled = PhysicalSetup::new(1.0, lambda * d, UnitSystem::Natural).unwrap();
        let u = to_reduced(&base, rho).unwrap();
        let u_scaled = to_reduced(&scaled, lambda * rho).unwrap();
        prop_assert!((u - u_scaled).abs() <= 1e-12 * u.max(1.0));
    }

    #[test]
    fn physical_density_is_linear_in_alpha(
        alpha in 1e-3..1e3f64,
        factor in 1e-2..1e2f64,
        s in 0.0..17.0f64,
    ) {
        let c = Constants::default();
        let one = PhysicalSetup::new(alpha, 1.0, UnitSystem::Natural).unwrap();
        let two = PhysicalSetup::new(alpha * factor, 1.0, UnitSystem::Natural).unwrap();
        let a = density_to_physical(s, &one, &c).unwrap();
        let b = density_to_physical(s, &two, &c).unwrap();
        prop_assert!((b - factor * a).abs() <= 1e-12 * b.abs().max(1e-300));
    }

    #[test]
    fn float_format_parses_back_within_half_ulp_of_12_digits(
        x in prop::num::f64::NORMAL | prop::num::f64::ZERO,
    ) {
        let printed = cpwall::cli::fmt_float(x);
        let back: f64 = printed.parse().unwrap();
        let tol = 1e-11 * x.abs();
        prop_assert!((back - x).abs() <= tol.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn wall_and_atom_forces_cancel_exactly(
        alpha in 1e-6..1e6f64,
        d in 1e-3..1e3f64,
    ) {
        let c = Constants::default();
        let setup = PhysicalSetup::new(alpha, d, UnitSystem::Natural).unwrap();
        let atom = closedform::atom_force(&setup, &c).unwrap();
        let wall = closedform::wall_force(&setup, &c).unwrap();
        prop_assert!(atom + wall == 0.0);
        prop_assert!(atom < 0.0, "atom force points toward the wall");
    }
}
