//! Physical constants, unit systems and the reduced-variable boundary.
//!
//! Everything downstream works in dimensionless reduced variables
//! (u = rho/d, densities in units of hbar*c*alpha / (4 pi^2 d^7)); this
//! module owns the conversion to physical quantities and the constants
//! configuration.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 2014/2018 CODATA defining values.
pub const HBAR_SI: f64 = 1.054571817e-34; // J s
pub const C_SI: f64 = 299792458.0; // m / s

/// Fundamental constants used by the presentation layer (SI values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// hbar * c in J m.
    pub hbar_c: f64,
    /// Speed of light in m / s.
    pub c: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            hbar_c: HBAR_SI * C_SI,
            c: C_SI,
        }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar_c > 0.0 && self.hbar_c.is_finite()) {
            return Err(Error::Config(format!(
                "hbar_c must be strictly positive, got {}",
                self.hbar_c
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config(format!(
                "c must be strictly positive, got {}",
                self.c
            )));
        }
        Ok(())
    }

    /// Parse a flat `key = value` plain-text config. Lines starting with `#`
    /// are comments. Unknown keys are errors.
    pub fn from_config_str(text: &str) -> Result<Constants> {
        let mut constants = Constants::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Config(format!("line {}: invalid number `{}`", lineno + 1, value.trim()))
            })?;
            match key {
                "hbar_c" => constants.hbar_c = value,
                "c" => constants.c = value,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}` (known keys: hbar_c, c)",
                        lineno + 1
                    )))
                }
            }
        }
        constants.validate()?;
        Ok(constants)
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<Constants> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }
}

/// The two supported unit systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// hbar = c = 1, lengths in the caller's chosen length unit.
    Natural,
    /// SI presentation using [`Constants`].
    Si,
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<UnitSystem> {
        match s.to_ascii_lowercase().as_str() {
            "natural" => Ok(UnitSystem::Natural),
            "si" => Ok(UnitSystem::Si),
            other => Err(Error::Config(format!(
                "unknown unit system `{other}` (expected `natural` or `si`)"
            ))),
        }
    }
}

impl std::fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitSystem::Natural => write!(f, "natural"),
            UnitSystem::Si => write!(f, "si"),
        }
    }
}

/// The physical scene: one atom at distance `d` from the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    /// Static polarizability, dimension length^3.
    pub alpha: f64,
    /// Atom-wall distance.
    pub d: f64,
    pub unit_system: UnitSystem,
}

impl PhysicalSetup {
    pub fn new(alpha: f64, d: f64, unit_system: UnitSystem) -> Result<PhysicalSetup> {
        let setup = PhysicalSetup { alpha, d, unit_system };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::Domain(format!("distance must be > 0, got {}", self.d)));
        }
        Ok(())
    }
}

/// Atom polarizability, optionally with a wavenumber-dependent profile.
///
/// The far-zone computations only ever use the static value; the profile is
/// carried so a caller can describe the atom it models and must reduce to
/// the static value at k = 0.
pub struct PolarizabilityModel {
    static_value: f64,
    profile: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl PolarizabilityModel {
    pub fn fixed(static_value: f64) -> Result<PolarizabilityModel> {
        if !(static_value > 0.0 && static_value.is_finite()) {
            return Err(Error::Domain(format!(
                "static polarizability must be > 0, got {static_value}"
            )));
        }
        Ok(PolarizabilityModel { static_value, profile: None })
    }

    pub fn with_profile<F>(static_value: f64, profile: F) -> Result<PolarizabilityModel>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let model = PolarizabilityModel {
            static_value,
            profile: Some(Box::new(profile)),
        };
        if !(static_value > 0.0 && static_value.is_finite()) {
            return Err(Error::Domain(format!(
                "static polarizability must be > 0, got {static_value}"
            )));
        }
        let at_zero = model.at(0.0);
        if (at_zero - static_value).abs() > 1e-12 * static_value.abs() {
            return Err(Error::Domain(format!(
                "dynamic profile must reduce to the static value at k = 0 \
                 (profile(0) = {at_zero}, static = {static_value})"
            )));
        }
        Ok(model)
    }

    pub fn static_value(&self) -> f64 {
        self.static_value
    }

    pub fn at(&self, k: f64) -> f64 {
        match &self.profile {
            Some(p) => p(k),
            None => self.static_value,
        }
    }
}

impl std::fmt::Debug for PolarizabilityModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolarizabilityModel")
            .field("static_value", &self.static_value)
            .field("profile", &self.profile.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

/// In-plane distance to reduced coordinate u = rho / d.
pub fn to_reduced(setup: &PhysicalSetup, rho: f64) -> Result<f64> {
    setup.validate()?;
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("rho must be >= 0, got {rho}")));
    }
    Ok(rho / setup.d)
}

/// Reduced density to a physical pressure: hbar*c*alpha / (4 pi^2 d^7) times
/// `sigma_hat`. In natural units hbar = c = 1.
pub fn density_to_physical(
    sigma_hat: f64,
    setup: &PhysicalSetup,
    constants: &Constants,
) -> Result<f64> {
    setup.validate()?;
    constants.validate()?;
    if !sigma_hat.is_finite() {
        return Err(Error::Domain(format!("sigma_hat must be finite, got {sigma_hat}")));
    }
    let hbar_c = match setup.unit_system {
        UnitSystem::Natural => 1.0,
        UnitSystem::Si => constants.hbar_c,
    };
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    Ok(hbar_c * setup.alpha / (four_pi_sq * setup.d.powi(7)) * sigma_hat)
}
