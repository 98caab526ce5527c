//! Physical constants and the unit conversions used at the I/O boundary.
//!
//! Values are CODATA 2018. Everything downstream works in Hartree atomic
//! units; eV, fs and cm only appear when reading inputs or reporting results.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Constants that enter the cross-section prefactors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Fine-structure constant.
    pub alpha: f64,
    /// Bohr radius in cm.
    pub bohr_cm: f64,
    /// Atomic unit of time in s.
    pub tau0_s: f64,
    /// Speed of light in cm/s.
    pub c_cm_s: f64,
    /// Hartree energy in eV.
    pub hartree_ev: f64,
    /// Atomic unit of time in fs.
    pub autime_fs: f64,
    /// Electron mass in kg.
    pub electron_mass_kg: f64,
    /// Reduced Planck constant in J s.
    pub hbar_js: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    alpha: 7.297_352_569_3e-3,
    bohr_cm: 5.291_772_109_03e-9,
    tau0_s: 2.418_884_326_585_7e-17,
    c_cm_s: 2.997_924_58e10,
    hartree_ev: 27.211_386_245_988,
    autime_fs: 2.418_884_326_585_7e-2,
    electron_mass_kg: 9.109_383_701_5e-31,
    hbar_js: 1.054_571_817e-34,
};

/// One Goeppert-Mayer unit in cm^4 s / photon.
pub const GM_CM4_S: f64 = 1e-50;

impl PhysicalConstants {
    /// m_e a0^2 / hbar, recomputed from its constituents (SI, seconds).
    pub fn tau0_from_definition(&self) -> f64 {
        let bohr_m = self.bohr_cm * 1e-2;
        self.electron_mass_kg * bohr_m * bohr_m / self.hbar_js
    }
}

pub fn ev_to_hartree(ev: f64) -> Result<f64> {
    if !ev.is_finite() {
        return Err(Error::domain(format!("energy must be finite, got {ev} eV")));
    }
    Ok(ev / CODATA_2018.hartree_ev)
}

pub fn hartree_to_ev(hartree: f64) -> f64 {
    hartree * CODATA_2018.hartree_ev
}

pub fn fs_to_au_time(fs: f64) -> Result<f64> {
    if !(fs >= 0.0) || !fs.is_finite() {
        return Err(Error::domain(format!(
            "time must be finite and non-negative, got {fs} fs"
        )));
    }
    Ok(fs / CODATA_2018.autime_fs)
}

pub fn au_time_to_fs(au: f64) -> f64 {
    au * CODATA_2018.autime_fs
}

/// Dimensional scale `4 pi^3 alpha a0^5 / (A_e tau0 c)` in cm^2 that turns
/// the atomic-unit product `g |W|^2` into an entangled cross section.
pub fn cross_section_prefactor(area_cm2: f64) -> Result<f64> {
    if !(area_cm2 > 0.0) || !area_cm2.is_finite() {
        return Err(Error::domain(format!(
            "entanglement area must be positive, got {area_cm2} cm^2"
        )));
    }
    let k = CODATA_2018;
    Ok(4.0 * PI.powi(3) * k.alpha * k.bohr_cm.powi(5) / (area_cm2 * k.tau0_s * k.c_cm_s))
}

/// Classical two-photon prefactor `8 pi^3 alpha a0^5 / c` in cm^4 s.
///
/// This is the entangled prefactor multiplied by `2 A_e T_e`, i.e. the
/// classical cross section obtained from the entangled one in the long
/// entanglement-time limit, with `omega_h^2 g |S|^2` in atomic units.
pub fn classical_prefactor_cm4s() -> f64 {
    let k = CODATA_2018;
    8.0 * PI.powi(3) * k.alpha * k.bohr_cm.powi(5) / k.c_cm_s
}

pub fn cm4s_to_gm(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!(
            "classical cross section must be non-negative, got {x}"
        )));
    }
    Ok(x / GM_CM4_S)
}
