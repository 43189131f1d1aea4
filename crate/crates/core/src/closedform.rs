//! Analytic force-density results and derived plate-engineering quantities.
//!
//! All core math lives in reduced variables: u = rho/d and densities in
//! units of hbar*c*alpha / (4 pi^2 d^7). The reduced density is
//!
//! ```text
//! sigma_hat(u) = (17 + 10 u^2) / (1 + u^2)^(9/2)
//! ```
//!
//! and its plate integral 2 pi Int u sigma_hat du = 6 pi, which restores to
//! the total wall force 3 hbar c alpha / (2 pi d^5) once the prefactor and
//! the rho = u d substitution are put back.

use serde::{Deserialize, Serialize};

use crate::specfun::{bisect, integrate, QuadratureResult, QuadratureSpec};
use crate::units::{Constants, PhysicalSetup, UnitSystem};
use crate::{Error, Result};

/// Which computational path produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    ModeSum,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::ClosedForm => write!(f, "closed_form"),
            Method::Quadrature => write!(f, "quadrature"),
            Method::ModeSum => write!(f, "mode_sum"),
        }
    }
}

/// Sampled reduced density over a radial grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, method: Method) -> Result<RadialProfile> {
        let profile = RadialProfile { grid, values, method };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::Domain("profile grid/values length mismatch".into()));
        }
        if self.grid.first().is_some_and(|&u| u < 0.0) {
            return Err(Error::Domain("profile grid must be >= 0".into()));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("profile grid must be strictly increasing".into()));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain("profile values must be finite and > 0".into()));
        }
        Ok(())
    }
}

/// Integration domain on the plate, in units of d, centered on the foot
/// point P of the atom's perpendicular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PlateRegion {
    FullPlane,
    Disk { radius: f64 },
    Annulus { r1: f64, r2: f64 },
    /// Points with x >= axis_offset.
    HalfPlane { axis_offset: f64 },
}

impl PlateRegion {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PlateRegion::FullPlane => Ok(()),
            PlateRegion::Disk { radius } => {
                if radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!("disk radius must be > 0, got {radius}")))
                }
            }
            PlateRegion::Annulus { r1, r2 } => {
                if 0.0 <= r1 && r1 < r2 && r2.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "annulus needs 0 <= r1 < r2, got r1={r1} r2={r2}"
                    )))
                }
            }
            PlateRegion::HalfPlane { axis_offset } => {
                if axis_offset.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain("half-plane offset must be finite".into()))
                }
            }
        }
    }
}

/// In-plane axis through P, given by its unit direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub ux: f64,
    pub uy: f64,
}

impl Axis {
    pub fn new(dx: f64, dy: f64) -> Result<Axis> {
        let norm = f64::hypot(dx, dy);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("axis direction must be a nonzero vector".into()));
        }
        Ok(Axis { ux: dx / norm, uy: dy / norm })
    }

    /// Signed lever arm of the in-plane point (x, y): the z component of
    /// r x axis_dir, so points on the positive-x side of the y axis get a
    /// positive arm.
    fn lever(&self, x: f64, y: f64) -> f64 {
        x * self.uy - y * self.ux
    }
}

/// Reduced force density (17 + 10 u^2) / (1 + u^2)^(9/2).
pub fn sigma_hat(u: f64) -> Result<f64> {
    if !u.is_finite() || u < 0.0 {
        return Err(Error::Domain(format!("u must be finite and >= 0, got {u}")));
    }
    Ok(sigma_hat_with_coeff(17.0, u))
}

/// Same formula with the constant coefficient exposed. The physical value
/// is 17; other values exist for negative-control tests only.
pub fn sigma_hat_with_coeff(coeff: f64, u: f64) -> f64 {
    let t = 1.0 + u * u;
    (coeff + 10.0 * u * u) / (t.powi(4) * t.sqrt())
}

fn sigma_hat_raw(u: f64) -> f64 {
    sigma_hat_with_coeff(17.0, u)
}

fn hbar_c_for(setup: &PhysicalSetup, constants: &Constants) -> f64 {
    match setup.unit_system {
        UnitSystem::Natural => 1.0,
        UnitSystem::Si => constants.hbar_c,
    }
}

/// Casimir-Polder force on the atom: -3 hbar c alpha / (2 pi d^5).
/// Negative means attraction toward the wall.
pub fn atom_force(setup: &PhysicalSetup, constants: &Constants) -> Result<f64> {
    setup.validate()?;
    constants.validate()?;
    let hbar_c = hbar_c_for(setup, constants);
    Ok(-3.0 * hbar_c * setup.alpha / (2.0 * std::f64::consts::PI * setup.d.powi(5)))
}

/// Total force on the wall, exactly the negation of [`atom_force`].
pub fn wall_force(setup: &PhysicalSetup, constants: &Constants) -> Result<f64> {
    Ok(-atom_force(setup, constants)?)
}

/// 2 pi Int_0^inf u sigma_hat(u) du by adaptive quadrature; equals 6 pi.
pub fn plate_integral_reduced(spec: &QuadratureSpec) -> QuadratureResult {
    let mut r = integrate(|u| u * sigma_hat_raw(u), 0.0, f64::INFINITY, spec);
    r.value *= 2.0 * std::f64::consts::PI;
    r.error_estimate *= 2.0 * std::f64::consts::PI;
    r
}

/// Fraction of the total wall force carried by the disk of radius R
/// (in units of d): 1 - (2 t^(-5/2) + t^(-7/2)) / 3 with t = 1 + R^2.
pub fn enclosed_force_fraction(radius: f64) -> Result<f64> {
    if !radius.is_finite() && radius != f64::INFINITY {
        return Err(Error::Domain(format!("radius must be >= 0, got {radius}")));
    }
    if radius < 0.0 {
        return Err(Error::Domain(format!("radius must be >= 0, got {radius}")));
    }
    if radius == f64::INFINITY {
        return Ok(1.0);
    }
    let t = 1.0 + radius * radius;
    Ok(1.0 - (2.0 * t.powf(-2.5) + t.powf(-3.5)) / 3.0)
}

/// Radius (in units of d) of the disk carrying half the total wall force.
pub fn half_force_radius() -> Result<f64> {
    // fraction is monotone from 0 toward 1, so the root is unique
    bisect(
        |r| enclosed_force_fraction(r).expect("r >= 0 inside bracket") - 0.5,
        0.0,
        4.0,
        1e-12,
        200,
    )
}

/// Torque of the reduced density about an in-plane axis through P, over a
/// plate region, by nested adaptive quadrature.
///
/// Output units: hbar*c*alpha / (4 pi^2 d^4) (reduced density times area
/// times lever arm, all lengths in units of d).
pub fn torque_about_axis(
    region: &PlateRegion,
    axis: &Axis,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    region.validate()?;
    spec.validate()?;
    let result = match *region {
        PlateRegion::FullPlane => torque_polar(axis, 0.0, f64::INFINITY, spec),
        PlateRegion::Disk { radius } => torque_polar(axis, 0.0, radius, spec),
        PlateRegion::Annulus { r1, r2 } => torque_polar(axis, r1, r2, spec),
        PlateRegion::HalfPlane { axis_offset } => torque_half_plane(axis, axis_offset, spec),
    };
    if !result.converged {
        return Err(Error::NonConvergence {
            what: "torque quadrature".into(),
            value: result.value,
            error: result.error_estimate,
        });
    }
    Ok(result)
}

fn torque_polar(axis: &Axis, r_lo: f64, r_hi: f64, spec: &QuadratureSpec) -> QuadratureResult {
    use std::f64::consts::PI;
    let inner_spec = *spec;
    let mut evals = 0usize;
    let mut inner_err = 0.0f64;
    let mut inner_bad = false;
    // capture per-call bookkeeping through cells
    let evals_cell = std::cell::Cell::new(0usize);
    let err_cell = std::cell::Cell::new(0.0f64);
    let bad_cell = std::cell::Cell::new(false);
    let radial = |u: f64| {
        let angular = integrate(
            |phi| axis.lever(u * phi.cos(), u * phi.sin()),
            0.0,
            2.0 * PI,
            &inner_spec,
        );
        evals_cell.set(evals_cell.get() + angular.evaluations);
        err_cell.set(err_cell.get() + angular.error_estimate);
        if !angular.converged {
            bad_cell.set(true);
        }
        u * sigma_hat_raw(u) * angular.value
    };
    let outer = integrate(radial, r_lo, r_hi, spec);
    evals += evals_cell.get() + outer.evaluations;
    inner_err += err_cell.get();
    inner_bad |= bad_cell.get();
    QuadratureResult {
        value: outer.value,
        error_estimate: outer.error_estimate + inner_err * spec.rel_tol.max(1e-14),
        evaluations: evals,
        converged: outer.converged && !inner_bad,
    }
}

fn torque_half_plane(axis: &Axis, offset: f64, spec: &QuadratureSpec) -> QuadratureResult {
    // x >= offset, y over the whole line; integrate y symmetrically
    let inner_spec = *spec;
    let evals_cell = std::cell::Cell::new(0usize);
    let bad_cell = std::cell::Cell::new(false);
    let line = |x: f64| {
        let along_y = integrate(
            |y: f64| {
                let u = f64::hypot(x, y);
                let s = sigma_hat_raw(u);
                s * (axis.lever(x, y) + axis.lever(x, -y))
            },
            0.0,
            f64::INFINITY,
            &inner_spec,
        );
        evals_cell.set(evals_cell.get() + along_y.evaluations);
        if !along_y.converged {
            bad_cell.set(true);
        }
        along_y.value
    };
    let outer = if offset >= 0.0 {
        integrate(line, offset, f64::INFINITY, spec)
    } else {
        // split at zero so the doubling tail starts on the decaying side
        let left = integrate(line, offset, 0.0, spec);
        let right = integrate(line, 0.0, f64::INFINITY, spec);
        QuadratureResult {
            value: left.value + right.value,
            error_estimate: left.error_estimate + right.error_estimate,
            evaluations: left.evaluations + right.evaluations,
            converged: left.converged && right.converged,
        }
    };
    QuadratureResult {
        value: outer.value,
        error_estimate: outer.error_estimate,
        evaluations: outer.evaluations + evals_cell.get(),
        converged: outer.converged && !bad_cell.get(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sigma_hat_examples() {
        assert_eq!(sigma_hat(0.0).unwrap(), 17.0);
        let v = sigma_hat(1.0).unwrap();
        assert!((v - 27.0 / 2.0f64.powf(4.5)).abs() < 1e-15);
        assert!((v - 1.193243).abs() < 1e-6);
        // leading asymptote 10/u^7 within 4% at u = 10
        let u = 10.0f64;
        let asym = 10.0 / u.powi(7);
        assert!((sigma_hat(u).unwrap() / asym - 1.0).abs() < 0.04);
    }

    #[test]
    fn sigma_hat_rejects_bad_input() {
        assert!(sigma_hat(-0.5).is_err());
        assert!(sigma_hat(f64::NAN).is_err());
        assert!(sigma_hat(f64::INFINITY).is_err());
    }

    #[test]
    fn sigma_hat_positive_and_strictly_decreasing() {
        let mut prev = sigma_hat(0.0).unwrap();
        for i in 1..=2000 {
            let u = i as f64 * 0.01;
            let v = sigma_hat(u).unwrap();
            assert!(v > 0.0 && v.is_finite());
            assert!(v < prev, "not decreasing at u={u}");
            prev = v;
        }
    }

    #[test]
    fn sigma_hat_tail_times_u7_approaches_10() {
        assert!((sigma_hat(200.0).unwrap() * 200.0f64.powi(7) - 10.0).abs() < 0.01);
        assert!((sigma_hat(2000.0).unwrap() * 2000.0f64.powi(7) - 10.0).abs() < 1e-4);
    }

    #[test]
    fn atom_force_examples() {
        let c = Constants::default();
        let f = |alpha: f64, d: f64| {
            atom_force(
                &PhysicalSetup::new(alpha, d, UnitSystem::Natural).unwrap(),
                &c,
            )
            .unwrap()
        };
        assert!((f(1.0, 1.0) + 3.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((f(1.0, 1.0) + 0.477465).abs() < 1e-6);
        assert!((f(1.0, 2.0) + 3.0 / (64.0 * PI)).abs() < 1e-16);
        assert!((f(2.0, 1.0) + 3.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn wall_force_is_exact_negation() {
        let c = Constants::default();
        for (alpha, d) in [(1.0, 1.0), (2.7, 0.3), (1e-30, 4.2e-7)] {
            let setup = PhysicalSetup::new(alpha, d, UnitSystem::Natural).unwrap();
            let fa = atom_force(&setup, &c).unwrap();
            let fw = wall_force(&setup, &c).unwrap();
            assert_eq!(fw, -fa);
            assert!(fw > 0.0);
        }
        let si = PhysicalSetup::new(1.0, 1.0, UnitSystem::Si).unwrap();
        assert!((wall_force(&si, &c).unwrap() - 3.0 * c.hbar_c / (2.0 * PI)).abs() < 1e-40);
    }

    #[test]
    fn plate_integral_equals_six_pi() {
        let spec = QuadratureSpec::default();
        let r = plate_integral_reduced(&spec);
        assert!(r.converged);
        assert!((r.value / (6.0 * PI) - 1.0).abs() < 1e-8, "value {}", r.value);
    }

    #[test]
    fn enclosed_fraction_examples() {
        assert_eq!(enclosed_force_fraction(0.0).unwrap(), 0.0);
        // 1 - (2^(-3/2) + 2^(-7/2)/2) ... frozen: 1 - (2*2^(-5/2) + 2^(-7/2))/3
        assert!((enclosed_force_fraction(1.0).unwrap() - 0.8526860872528026).abs() < 1e-12);
        assert_eq!(enclosed_force_fraction(f64::INFINITY).unwrap(), 1.0);
        assert!((enclosed_force_fraction(1e8).unwrap() - 1.0).abs() < 1e-15);
        assert!(enclosed_force_fraction(-1.0).is_err());
    }

    #[test]
    fn enclosed_fraction_monotone() {
        let mut prev = -1.0;
        for i in 0..=500 {
            let r = i as f64 * 0.02;
            let f = enclosed_force_fraction(r).unwrap();
            assert!(f >= 0.0 && f < 1.0);
            assert!(f > prev || (f == 0.0 && prev < 0.0));
            prev = f;
        }
    }

    #[test]
    fn enclosed_fraction_matches_direct_quadrature() {
        // independent route: 2 pi Int_0^R u sigma_hat du / (6 pi)
        let spec = QuadratureSpec::default();
        for radius in [0.3, 1.0, 2.5] {
            let num = integrate(|u| u * sigma_hat_raw(u), 0.0, radius, &spec);
            assert!(num.converged);
            let frac = num.value / 3.0; // 2 pi / (6 pi)
            let analytic = enclosed_force_fraction(radius).unwrap();
            assert!((frac - analytic).abs() < 1e-9, "R={radius}");
        }
    }

    #[test]
    fn half_force_radius_value() {
        let r = half_force_radius().unwrap();
        assert!((r - 0.5293).abs() < 1e-3, "r = {r}");
        let f = enclosed_force_fraction(r).unwrap();
        assert!((f - 0.5).abs() < 1e-11);
    }

    #[test]
    fn torque_symmetry_zeros() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-8).with_abs_tol(1e-9);
        let axis = Axis::new(0.0, 1.0).unwrap();
        let full = torque_about_axis(&PlateRegion::FullPlane, &axis, &spec).unwrap();
        assert!(full.value.abs() < 1e-7, "full plane torque {}", full.value);
        let disk = torque_about_axis(&PlateRegion::Disk { radius: 2.0 }, &axis, &spec).unwrap();
        assert!(disk.value.abs() < 1e-7, "disk torque {}", disk.value);
        let tilted = Axis::new(1.0, 1.0).unwrap();
        let ann = torque_about_axis(
            &PlateRegion::Annulus { r1: 0.5, r2: 1.5 },
            &tilted,
            &spec,
        )
        .unwrap();
        assert!(ann.value.abs() < 1e-7, "annulus torque {}", ann.value);
    }

    #[test]
    fn torque_half_plane_positive_and_matches_moment_integral() {
        // For the half plane x > 0 about the y axis the polar reduction gives
        // (Int_{-pi/2}^{pi/2} cos phi dphi) Int_0^inf u^2 sigma_hat du
        // = 2 (17 J2 + 10 J4) with beta-function values J2 = 8/105,
        // J4 = 2/35, i.e. 2 * 196/105 = 56/15.
        let spec = QuadratureSpec::default().with_rel_tol(1e-9);
        let axis = Axis::new(0.0, 1.0).unwrap();
        let t = torque_about_axis(
            &PlateRegion::HalfPlane { axis_offset: 0.0 },
            &axis,
            &spec,
        )
        .unwrap();
        assert!(t.value > 0.0);
        assert!((t.value - 56.0 / 15.0).abs() < 1e-6, "torque {}", t.value);
    }

    #[test]
    fn region_validation() {
        assert!(PlateRegion::Disk { radius: 0.0 }.validate().is_err());
        assert!(PlateRegion::Annulus { r1: 2.0, r2: 1.0 }.validate().is_err());
        assert!(PlateRegion::Annulus { r1: 0.0, r2: 1.0 }.validate().is_ok());
        assert!(Axis::new(0.0, 0.0).is_err());
    }

    #[test]
    fn radial_profile_validation() {
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![17.0, 1.19], Method::ClosedForm).is_ok());
        assert!(RadialProfile::new(vec![1.0, 0.5], vec![1.0, 2.0], Method::ClosedForm).is_err());
        assert!(RadialProfile::new(vec![0.0, 1.0], vec![17.0, -1.0], Method::ClosedForm).is_err());
        assert!(RadialProfile::new(vec![0.0], vec![17.0, 1.0], Method::ClosedForm).is_err());
    }
}
