//! Finite-cavity discrete evaluation of the force density from first
//! principles: box mode functions, polarization sums, stress-tensor
//! coefficients A and B, dressed-vacuum amplitudes and the double mode sum.
//!
//! The cavity on the atom side of the wall is the box
//! `-L1/2 < x,y < L1/2`, `L < z < L1`, with allowed wavevectors
//! `k = (l pi/L1, m pi/L1, n pi/(L1-L))`. The continuum treatment takes
//! L, L1 to infinity analytically; here the sum is evaluated at desk scale
//! with a smooth frequency cutoff `exp(-k/k_c)`, and a documented cutoff
//! schedule demonstrates convergence toward the closed form. The pair
//! weight `exp(-(k+k')/k_c)` is equivalent to starting the continuum
//! regulator integral at x = 1/k_c, which is what makes the cutoff bias
//! analyzable.

use serde::{Deserialize, Serialize};

use crate::closedform;
use crate::units::PhysicalSetup;
use crate::{Error, Result};

const SQRT_8: f64 = 2.8284271247461903;

/// Finite-cavity geometry and per-axis mode cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeBox {
    /// Plate position L (wall at z = L).
    pub plate_z: f64,
    /// Outer box coordinate L1 (> plate_z).
    pub outer: f64,
    /// Per-axis integer cutoff for l, m, n.
    pub n_max: usize,
}

impl ModeBox {
    pub fn new(plate_z: f64, outer: f64, n_max: usize) -> Result<ModeBox> {
        let b = ModeBox { plate_z, outer, n_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.plate_z > 0.0 && self.outer > self.plate_z && self.outer.is_finite()) {
            return Err(Error::Domain(format!(
                "mode box needs L1 > L > 0, got L={} L1={}",
                self.plate_z, self.outer
            )));
        }
        if self.n_max < 1 {
            return Err(Error::Domain("n_max must be >= 1".into()));
        }
        Ok(())
    }

    /// Cavity depth L1 - L perpendicular to the wall.
    pub fn depth(&self) -> f64 {
        self.outer - self.plate_z
    }

    /// Cavity volume V = L1^2 (L1 - L).
    pub fn volume(&self) -> f64 {
        self.outer * self.outer * self.depth()
    }

    fn contains(&self, r: [f64; 3]) -> bool {
        let half = 0.5 * self.outer;
        (-half..=half).contains(&r[0])
            && (-half..=half).contains(&r[1])
            && (self.plate_z..=self.outer).contains(&r[2])
    }
}

/// One cavity mode: wavevector, polarization index and unit vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub kvec: [f64; 3],
    pub pol: usize,
    pub evec: [f64; 3],
}

impl Mode {
    pub fn k(&self) -> f64 {
        norm(self.kvec)
    }
}

fn norm(v: [f64; 3]) -> f64 {
    dot(v, v).sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Orthonormal polarization pair transverse to `kvec`, built from the
/// coordinate axis least aligned with it. Any valid pair gives identical
/// polarization-summed results.
pub fn polarization_pair(kvec: [f64; 3]) -> Result<[[f64; 3]; 2]> {
    let k = norm(kvec);
    if k == 0.0 {
        return Err(Error::Domain("zero wavevector has no transverse plane".into()));
    }
    let khat = [kvec[0] / k, kvec[1] / k, kvec[2] / k];
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let least = (0..3)
        .min_by(|&a, &b| khat[a].abs().total_cmp(&khat[b].abs()))
        .expect("three axes");
    let e1_raw = cross(axes[least], khat);
    let n1 = norm(e1_raw);
    let e1 = [e1_raw[0] / n1, e1_raw[1] / n1, e1_raw[2] / n1];
    let e2 = cross(khat, e1);
    Ok([e1, e2])
}

/// Enumerate all modes with l, m, n in [0, n_max], excluding the zero
/// vector and wavevectors with fewer than two nonzero components (their
/// printed mode functions vanish identically).
pub fn enumerate_modes(mode_box: &ModeBox) -> Result<Vec<Mode>> {
    mode_box.validate()?;
    let mut modes = Vec::new();
    let kxy = std::f64::consts::PI / mode_box.outer;
    let kz_step = std::f64::consts::PI / mode_box.depth();
    for l in 0..=mode_box.n_max {
        for m in 0..=mode_box.n_max {
            for n in 0..=mode_box.n_max {
                let nonzero = (l > 0) as usize + (m > 0) as usize + (n > 0) as usize;
                if nonzero < 2 {
                    continue;
                }
                let kvec = [l as f64 * kxy, m as f64 * kxy, n as f64 * kz_step];
                let pair = polarization_pair(kvec)?;
                for (pol, evec) in pair.into_iter().enumerate() {
                    modes.push(Mode { kvec, pol, evec });
                }
            }
        }
    }
    Ok(modes)
}

/// Cavity mode function at a point inside the box, as printed:
/// sqrt(8) times cosine/sine products with the conducting-wall phases.
pub fn mode_function(mode: &Mode, r: [f64; 3], mode_box: &ModeBox) -> Result<[f64; 3]> {
    mode_box.validate()?;
    if !mode_box.contains(r) {
        return Err(Error::Domain(format!(
            "position {r:?} outside the cavity box"
        )));
    }
    Ok(mode_function_unchecked(mode, r, mode_box))
}

fn mode_function_unchecked(mode: &Mode, r: [f64; 3], mode_box: &ModeBox) -> [f64; 3] {
    let half = 0.5 * mode_box.outer;
    let ax = mode.kvec[0] * (r[0] + half);
    let ay = mode.kvec[1] * (r[1] + half);
    let az = mode.kvec[2] * (r[2] - mode_box.plate_z);
    let (sx, cx) = ax.sin_cos();
    let (sy, cy) = ay.sin_cos();
    let (sz, cz) = az.sin_cos();
    [
        SQRT_8 * mode.evec[0] * cx * sy * sz,
        SQRT_8 * mode.evec[1] * sx * cy * sz,
        SQRT_8 * mode.evec[2] * sx * sy * cz,
    ]
}

/// Polarization-summed outer product: delta_ab - khat_a khat_b.
pub fn transverse_projector(kvec: [f64; 3]) -> Result<[[f64; 3]; 3]> {
    let k = norm(kvec);
    if k == 0.0 {
        return Err(Error::Domain("projector undefined for the zero vector".into()));
    }
    let khat = [kvec[0] / k, kvec[1] / k, kvec[2] / k];
    let mut p = [[0.0f64; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            p[a][b] = f64::from(u8::from(a == b)) - khat[a] * khat[b];
        }
    }
    Ok(p)
}

/// Stress coefficient A(k j) at the in-plane point (x, y):
/// sqrt(k) (e)_z sin(k_x (x + L1/2)) sin(k_y (y + L1/2)).
pub fn stress_coeff_a(mode: &Mode, x: f64, y: f64, mode_box: &ModeBox) -> f64 {
    let half = 0.5 * mode_box.outer;
    mode.k().sqrt()
        * mode.evec[2]
        * (mode.kvec[0] * (x + half)).sin()
        * (mode.kvec[1] * (y + half)).sin()
}

/// The two per-mode factors of B, with the 1/sqrt(k) prefactor folded in,
/// so that B(kj, k'j') = b1 b1' + b2 b2'.
fn b_factors(mode: &Mode, x: f64, y: f64, mode_box: &ModeBox) -> (f64, f64) {
    let half = 0.5 * mode_box.outer;
    let inv_sqrt_k = 1.0 / mode.k().sqrt();
    let ax = mode.kvec[0] * (x + half);
    let ay = mode.kvec[1] * (y + half);
    let curl_x = mode.evec[2] * mode.kvec[0] - mode.evec[0] * mode.kvec[2];
    let curl_y = mode.evec[2] * mode.kvec[1] - mode.evec[1] * mode.kvec[2];
    (
        inv_sqrt_k * curl_x * ax.cos() * ay.sin(),
        inv_sqrt_k * curl_y * ax.sin() * ay.cos(),
    )
}

/// Stress coefficient B(k j, k' j') at the in-plane point (x, y), the
/// two-term magnetic part with the 1/sqrt(k k') prefactor.
pub fn stress_coeff_b(mode: &Mode, other: &Mode, x: f64, y: f64, mode_box: &ModeBox) -> f64 {
    let (b1, b2) = b_factors(mode, x, y, mode_box);
    let (c1, c2) = b_factors(other, x, y, mode_box);
    b1 * c1 + b2 * c2
}

/// Two-photon amplitude of the dressed vacuum for a mode pair:
/// -(pi/V) alpha sqrt(k k')/(k + k') f(k j, r_A) . f(k' j', r_A),
/// with the static polarizability (far zone) and r_A = (0, 0, L + d).
pub fn dressed_amplitude(
    mode: &Mode,
    other: &Mode,
    setup: &PhysicalSetup,
    mode_box: &ModeBox,
) -> Result<f64> {
    setup.validate()?;
    mode_box.validate()?;
    let r_atom = [0.0, 0.0, mode_box.plate_z + setup.d];
    if !mode_box.contains(r_atom) {
        return Err(Error::Domain(format!(
            "atom position z = {} outside the cavity (L = {}, L1 = {})",
            r_atom[2], mode_box.plate_z, mode_box.outer
        )));
    }
    let f = mode_function_unchecked(mode, r_atom, mode_box);
    let g = mode_function_unchecked(other, r_atom, mode_box);
    let (k, kp) = (mode.k(), other.k());
    Ok(-(std::f64::consts::PI / mode_box.volume())
        * setup.alpha
        * (k * kp).sqrt()
        / (k + kp)
        * dot(f, g))
}

/// Cutoff policy for the pair sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    /// Smooth frequency cutoff: each pair term is weighted by
    /// exp(-(k + k')/k_c). Must be well above 1/d for a small bias.
    pub k_c: f64,
    /// Enumeration budget; exceeding it is an error rather than a stall.
    pub max_modes: usize,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec { k_c: 3.0, max_modes: 40_000 }
    }
}

/// Result of one discrete pair-sum evaluation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeSumEval {
    /// Reduced-unit density, comparable with the continuum paths.
    pub reduced: f64,
    pub modes: usize,
    /// Set when n_max pi / (L1 - L) < 10 / d, i.e. the dominant
    /// wavenumbers are not covered by the enumerated modes.
    pub cutoff_warning: bool,
}

/// Discrete double mode sum for the reduced force density at the plate
/// point (x, y).
///
/// Physical form: sigma = (8 pi hbar c / V^2) sum alpha sqrt(k k')/(k+k')
/// (f . f') [A A' + B] over ordered mode pairs; the reduced value divides
/// out hbar c alpha / (4 pi^2 d^7). Summation order is fixed and the
/// accumulator compensated, so results are bit-reproducible.
pub fn sigma_modesum(
    x: f64,
    y: f64,
    mode_box: &ModeBox,
    setup: &PhysicalSetup,
    cutoff: &CutoffSpec,
) -> Result<ModeSumEval> {
    setup.validate()?;
    mode_box.validate()?;
    if !(cutoff.k_c > 0.0) {
        return Err(Error::Domain("cutoff k_c must be > 0".into()));
    }
    let r_atom = [0.0, 0.0, mode_box.plate_z + setup.d];
    if !mode_box.contains(r_atom) {
        return Err(Error::Domain(format!(
            "atom at z = {} is outside the cavity",
            r_atom[2]
        )));
    }

    let modes = enumerate_modes(mode_box)?;
    if modes.len() > cutoff.max_modes {
        return Err(Error::BudgetExceeded(format!(
            "{} modes enumerated, budget is {}",
            modes.len(),
            cutoff.max_modes
        )));
    }

    let cutoff_warning =
        (mode_box.n_max as f64) * std::f64::consts::PI / mode_box.depth() < 10.0 / setup.d;

    // per-mode precomputation
    struct Pre {
        k: f64,
        sqrt_k_weighted: f64, // sqrt(k) exp(-k/k_c)
        f_atom: [f64; 3],
        a: f64,
        b1: f64,
        b2: f64,
    }
    let pre: Vec<Pre> = modes
        .iter()
        .map(|mode| {
            let k = mode.k();
            let (b1, b2) = b_factors(mode, x, y, mode_box);
            Pre {
                k,
                sqrt_k_weighted: k.sqrt() * (-k / cutoff.k_c).exp(),
                f_atom: mode_function_unchecked(mode, r_atom, mode_box),
                a: stress_coeff_a(mode, x, y, mode_box),
                b1,
                b2,
            }
        })
        .collect();

    // ordered pair sum = diagonal + 2x the upper triangle (every factor is
    // exchange symmetric); Neumaier-compensated accumulation
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut add = |term: f64| {
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    };
    for (i, p) in pre.iter().enumerate() {
        for q in &pre[i..] {
            let overlap = dot(p.f_atom, q.f_atom);
            if overlap == 0.0 {
                continue;
            }
            let coupling = p.a * q.a + p.b1 * q.b1 + p.b2 * q.b2;
            if coupling == 0.0 {
                continue;
            }
            let term =
                p.sqrt_k_weighted * q.sqrt_k_weighted / (p.k + q.k) * overlap * coupling;
            add(if std::ptr::eq(p, q) { term } else { 2.0 * term });
        }
    }
    let pair_sum = sum + comp;

    // (8 pi hbar c alpha / V^2) -> reduced units via 4 pi^2 d^7 / (hbar c alpha)
    let v = mode_box.volume();
    let reduced = 32.0 * std::f64::consts::PI.powi(3) * setup.d.powi(7) / (v * v) * pair_sum;
    Ok(ModeSumEval {
        reduced,
        modes: modes.len(),
        cutoff_warning,
    })
}

/// One stage of the convergence study.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StudyRow {
    pub n_max: usize,
    /// Cavity depth over atom-wall distance.
    pub depth_over_d: f64,
    pub k_c: f64,
    pub value: f64,
    /// |value / sigma_hat(u) - 1| against the continuum closed form.
    pub deviation: f64,
}

/// The documented desk-scale cutoff schedule: the smooth regulator k_c is
/// held fixed at 3/d while the box and per-axis mode count grow together,
/// mirroring the analytic structure of the continuum treatment (box limit
/// at fixed regulator). The discrete sum approaches the regulated
/// continuum value from above as the mode spacing shrinks; the residual
/// regulator bias at k_c = 3/d is what remains at the final stage.
pub fn default_schedule() -> Vec<(usize, f64, f64)> {
    vec![
        (8, 2.5, 3.0),
        (12, 3.0, 3.0),
        (16, 4.0, 3.0),
        (20, 5.0, 3.0),
        (24, 6.0, 3.0),
    ]
}

/// Run the cutoff schedule at the plate point rho = (x, y) and compare
/// against the continuum closed form.
pub fn convergence_study(
    schedule: &[(usize, f64, f64)],
    x: f64,
    y: f64,
    setup: &PhysicalSetup,
    max_modes: usize,
) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::with_capacity(schedule.len());
    let u = f64::hypot(x, y) / setup.d;
    let continuum = closedform::sigma_hat(u)?;
    for &(n_max, depth_over_d, k_c) in schedule {
        let plate_z = setup.d; // L = d puts the atom at D = 2L; any L > 0 works
        let mode_box = ModeBox::new(plate_z, plate_z + depth_over_d * setup.d, n_max)?;
        let cutoff = CutoffSpec { k_c: k_c / setup.d, max_modes };
        let eval = sigma_modesum(x, y, &mode_box, setup, &cutoff)?;
        rows.push(StudyRow {
            n_max,
            depth_over_d,
            k_c,
            value: eval.reduced,
            deviation: (eval.reduced / continuum - 1.0).abs(),
        });
    }
    Ok(rows)
}
