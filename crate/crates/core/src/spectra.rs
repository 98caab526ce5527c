//! Cross sections, spectra and parameter scans.
//!
//! Entangled cross sections are
//! `sigma = prefactor(A_e) * g(omega_T - Omega_f) * <|W|^2>` in cm^2, where
//! `<.>` is either the isotropic orientation average or a single fixed
//! orientation. For a superposition of a monochromatic (MC) and bichromatic
//! (BC) pair the average is expanded as
//!
//! ```text
//! <|W_qs|^2> = c^2 <|W_mc|^2> + s^2 <|W_bc|^2> + 2 c s Re(e^{-i phi} <W_mc conj(W_bc)>)
//! ```
//!
//! with `c = cos(theta/2)`, `s = sin(theta/2)`, so the MC x BC cross term is
//! averaged at tensor level before any squaring.
//!
//! Classical cross sections use the long-time amplitude with degenerate
//! photons and are reported in GM:
//! `sigma = P * omega_h^2 * g(2 omega_h - Omega_f) * <|S|^2>`, with the
//! prefactor `P` (cm^4 s) carried explicitly in [`CtpaParams`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::amplitude::{
    check_bloch_angles, check_unit, contract, default_t_e, lineshape, transition_tensor,
    transition_tensor_long_time, w_scale, LinewidthParams, McsConfig, PhotonPairConfig, Tensor,
};
use crate::error::{Error, Result};
use crate::molecule::{ExcitedStateSet, FinalStateSelector, Vec3};
use crate::orientation::{bilinear_isotropic_average, PolarizationScheme};
use crate::units::{
    au_time_to_fs, classical_prefactor_cm4s, cross_section_prefactor, ev_to_hartree, hartree_to_ev,
    GM_CM4_S,
};

/// How amplitude bilinears are reduced to a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    /// Isotropic average with lab polarizations given by the scheme.
    Isotropic(PolarizationScheme),
    /// Molecule frame equals lab frame; each pair's own polarizations are used.
    Fixed,
}

impl Default for Averaging {
    fn default() -> Self {
        Averaging::Isotropic(PolarizationScheme::PerpendicularLinear)
    }
}

impl Averaging {
    pub fn name(self) -> &'static str {
        match self {
            Averaging::Isotropic(s) => s.name(),
            Averaging::Fixed => "fixed-orientation",
        }
    }
}

/// Linewidths and prefactor for classical two-photon absorption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtpaParams {
    /// intermediate linewidth, hartree
    pub kappa: f64,
    /// final-state linewidth, hartree
    pub gamma: f64,
    /// dimensional prefactor, cm^4 s
    pub prefactor_cm4s: f64,
    /// polarizations used with [`Averaging::Fixed`]
    pub pol1: Vec3,
    pub pol2: Vec3,
}

impl Default for CtpaParams {
    /// kappa = 0.05 eV, Gamma = 0.1 eV, prefactor `8 pi^3 alpha a0^5 / c`.
    fn default() -> Self {
        CtpaParams {
            kappa: ev_to_hartree(0.05).unwrap(),
            gamma: ev_to_hartree(0.1).unwrap(),
            prefactor_cm4s: classical_prefactor_cm4s(),
            pol1: Vec3::x(),
            pol2: Vec3::y(),
        }
    }
}

impl CtpaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("classical kappa", self.kappa),
            ("classical gamma", self.gamma),
            ("classical prefactor", self.prefactor_cm4s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        check_unit("pol1", &self.pol1)?;
        check_unit("pol2", &self.pol2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaUnit {
    /// entangled cross section, cm^2
    Cm2,
    /// classical cross section, GM
    Gm,
}

/// Every input that affected a cross section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub t_e_fs: Option<f64>,
    pub t_e_prime_fs: Option<f64>,
    pub kappa_ev: f64,
    pub gamma_ev: f64,
    pub area_cm2: Option<f64>,
    pub averaging: Averaging,
    pub final_states: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossSectionResult {
    pub value: f64,
    pub unit: SigmaUnit,
    pub omega_h_ev: f64,
    pub metadata: Metadata,
}

impl CrossSectionResult {
    pub fn value_cm2(&self) -> Option<f64> {
        (self.unit == SigmaUnit::Cm2).then_some(self.value)
    }

    pub fn value_gm(&self) -> Option<f64> {
        (self.unit == SigmaUnit::Gm).then_some(self.value)
    }
}

/// The three averaged bilinears that fix `<|W_qs|^2>` for every Bloch angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interference {
    /// `<|W_mc|^2>`
    pub mc: f64,
    /// `<|W_bc|^2>`
    pub bc: f64,
    /// `<W_mc conj(W_bc)>`
    pub cross: Complex64,
}

impl Interference {
    pub fn mean_square(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = (0.5 * theta).sin_cos();
        let phase = Complex64::from_polar(1.0, -phi);
        let v = c * c * self.mc + s * s * self.bc + 2.0 * c * s * (phase * self.cross).re;
        v.max(0.0)
    }
}

/// `W`-scaled tensor of one pair together with its polarizations.
struct Channel {
    tensor: Tensor,
    pol1: Vec3,
    pol2: Vec3,
}

impl Channel {
    fn entangled(
        model: &ExcitedStateSet,
        f: FinalStateSelector,
        pair: &PhotonPairConfig,
        kappa: f64,
    ) -> Result<Self> {
        pair.validate()?;
        let scale = w_scale(pair.omega1, pair.omega2, pair.t_e)?;
        let m = transition_tensor(model, f, pair.omega1, pair.omega2, kappa, pair.t_e)?;
        Ok(Channel {
            tensor: m * Complex64::new(scale, 0.0),
            pol1: pair.pol1,
            pol2: pair.pol2,
        })
    }
}

fn bilinear(a: &Channel, b: &Channel, averaging: Averaging) -> Complex64 {
    match averaging {
        Averaging::Isotropic(scheme) => bilinear_isotropic_average(&a.tensor, &b.tensor, scheme),
        Averaging::Fixed => {
            contract(&a.tensor, &a.pol1, &a.pol2) * contract(&b.tensor, &b.pol1, &b.pol2).conj()
        }
    }
}

fn mean_square(a: &Channel, averaging: Averaging) -> f64 {
    match averaging {
        Averaging::Isotropic(scheme) => bilinear_isotropic_average(&a.tensor, &a.tensor, scheme)
            .re
            .max(0.0),
        Averaging::Fixed => contract(&a.tensor, &a.pol1, &a.pol2).norm_sqr(),
    }
}

fn entangled_metadata(
    lw: &LinewidthParams,
    averaging: Averaging,
    f: &[usize],
    t_e: f64,
) -> Metadata {
    Metadata {
        theta: None,
        phi: None,
        t_e_fs: Some(au_time_to_fs(t_e)),
        t_e_prime_fs: None,
        kappa_ev: hartree_to_ev(lw.kappa),
        gamma_ev: hartree_to_ev(lw.gamma),
        area_cm2: Some(lw.area),
        averaging,
        final_states: f.to_vec(),
    }
}

/// Entangled cross section in cm^2 for one pair and one final state.
pub fn etpa_cross_section(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    pair: &PhotonPairConfig,
    lw: &LinewidthParams,
    averaging: Averaging,
) -> Result<CrossSectionResult> {
    lw.validate()?;
    let channel = Channel::entangled(model, f, pair, lw.kappa)?;
    let omega_t = pair.total_frequency();
    let g = lineshape(omega_t - model.energy(f.index()), lw.gamma)?;
    let value = cross_section_prefactor(lw.area)? * g * mean_square(&channel, averaging);
    Ok(CrossSectionResult {
        value,
        unit: SigmaUnit::Cm2,
        omega_h_ev: hartree_to_ev(0.5 * omega_t),
        metadata: entangled_metadata(lw, averaging, &[f.index()], pair.t_e),
    })
}

/// Averaged MC/BC bilinears of a superposition; independent of the Bloch angles.
pub fn interference(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    mcs: &McsConfig,
    lw: &LinewidthParams,
    averaging: Averaging,
) -> Result<Interference> {
    mcs.validate()?;
    lw.validate()?;
    let mc = Channel::entangled(model, f, &mcs.mc, lw.kappa)?;
    let bc = Channel::entangled(model, f, &mcs.bc, lw.kappa)?;
    Ok(Interference {
        mc: mean_square(&mc, averaging),
        bc: mean_square(&bc, averaging),
        cross: bilinear(&mc, &bc, averaging),
    })
}

fn mcs_metadata(
    mcs: &McsConfig,
    lw: &LinewidthParams,
    averaging: Averaging,
    f: &[usize],
) -> Metadata {
    Metadata {
        theta: Some(mcs.theta),
        phi: Some(mcs.phi),
        t_e_prime_fs: Some(au_time_to_fs(mcs.bc.t_e)),
        ..entangled_metadata(lw, averaging, f, mcs.mc.t_e)
    }
}

/// Cross section in cm^2 of a multichromatic superposition.
pub fn mcs_cross_section(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    mcs: &McsConfig,
    lw: &LinewidthParams,
    averaging: Averaging,
) -> Result<CrossSectionResult> {
    let amps = interference(model, f, mcs, lw, averaging)?;
    let omega_t = mcs.mc.total_frequency();
    let g = lineshape(omega_t - model.energy(f.index()), lw.gamma)?;
    let value = cross_section_prefactor(lw.area)? * g * amps.mean_square(mcs.theta, mcs.phi);
    Ok(CrossSectionResult {
        value,
        unit: SigmaUnit::Cm2,
        omega_h_ev: hartree_to_ev(0.5 * omega_t),
        metadata: mcs_metadata(mcs, lw, averaging, &[f.index()]),
    })
}

/// Classical two-photon cross section in GM at half-frequency `omega_h`
/// (hartree), with both photons at `omega_h`.
pub fn ctpa_cross_section(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    omega_h: f64,
    params: &CtpaParams,
    averaging: Averaging,
) -> Result<CrossSectionResult> {
    params.validate()?;
    if !(omega_h > 0.0) || !omega_h.is_finite() {
        return Err(Error::domain(format!(
            "omega_h must be positive, got {omega_h}"
        )));
    }
    let m = transition_tensor_long_time(model, f, omega_h, omega_h, params.kappa)?;
    let channel = Channel {
        tensor: m,
        pol1: params.pol1,
        pol2: params.pol2,
    };
    let g = lineshape(2.0 * omega_h - model.energy(f.index()), params.gamma)?;
    let cm4s = params.prefactor_cm4s * omega_h * omega_h * g * mean_square(&channel, averaging);
    Ok(CrossSectionResult {
        value: cm4s / GM_CM4_S,
        unit: SigmaUnit::Gm,
        omega_h_ev: hartree_to_ev(omega_h),
        metadata: Metadata {
            theta: None,
            phi: None,
            t_e_fs: None,
            t_e_prime_fs: None,
            kappa_ev: hartree_to_ev(params.kappa),
            gamma_ev: hartree_to_ev(params.gamma),
            area_cm2: None,
            averaging,
            final_states: vec![f.index()],
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMode {
    Mc,
    Bc,
    Mcs,
    Ctpa,
}

/// Everything about the photon pairs of a spectrum except their frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairTemplate {
    /// MC entanglement time, a.u.
    pub t_e: f64,
    /// BC entanglement time, a.u.
    pub t_e_prime: f64,
    /// Fraction of `omega_T` carried by the first BC photon.
    pub split: f64,
    pub theta: f64,
    pub phi: f64,
    pub pol1: Vec3,
    pub pol2: Vec3,
}

impl Default for PairTemplate {
    /// 100 fs for both pairs, BC split 1/3 : 2/3, theta = 60 deg, phi = 0,
    /// cross-polarized photons.
    fn default() -> Self {
        PairTemplate {
            t_e: default_t_e(),
            t_e_prime: default_t_e(),
            split: 1.0 / 3.0,
            theta: PI / 3.0,
            phi: 0.0,
            pol1: Vec3::x(),
            pol2: Vec3::y(),
        }
    }
}

impl PairTemplate {
    pub fn mc_pair(&self, omega_h: f64) -> Result<PhotonPairConfig> {
        PhotonPairConfig::new(omega_h, omega_h, self.t_e, self.pol1, self.pol2)
    }

    /// BC pair with `omega1' = split * omega_T` and `omega2' = omega_T - omega1'`.
    pub fn bc_pair(&self, omega_h: f64) -> Result<PhotonPairConfig> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::domain(format!(
                "frequency split must lie strictly between 0 and 1, got {}",
                self.split
            )));
        }
        let omega_t = 2.0 * omega_h;
        let omega1 = self.split * omega_t;
        PhotonPairConfig::new(
            omega1,
            omega_t - omega1,
            self.t_e_prime,
            self.pol1,
            self.pol2,
        )
    }

    pub fn mcs(&self, omega_h: f64) -> Result<McsConfig> {
        McsConfig::new(
            self.mc_pair(omega_h)?,
            self.bc_pair(omega_h)?,
            self.theta,
            self.phi,
        )
    }
}

/// Settings shared by every point of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    pub linewidths: LinewidthParams,
    pub classical: CtpaParams,
    pub averaging: Averaging,
    /// Final states with `|Omega_f - omega_T|` up to this many final
    /// linewidths contribute to a spectrum point.
    pub window_linewidths: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            linewidths: LinewidthParams::default(),
            classical: CtpaParams::default(),
            averaging: Averaging::default(),
            window_linewidths: 10.0,
        }
    }
}

/// Cross-section curve over a grid of half-frequencies `omega_h` in eV.
///
/// At each point `omega_T = 2 omega_h`; every candidate final state within
/// the window around `omega_T` contributes its own `|W|^2` and the
/// contributions are summed incoherently.
pub fn spectrum(
    model: &ExcitedStateSet,
    finals: &[FinalStateSelector],
    template: &PairTemplate,
    config: &EngineConfig,
    omega_h_grid_ev: &[f64],
    mode: SpectrumMode,
) -> Result<Vec<CrossSectionResult>> {
    if omega_h_grid_ev.is_empty() {
        return Err(Error::domain("spectrum grid is empty"));
    }
    if omega_h_grid_ev.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("spectrum grid must be strictly ascending"));
    }
    if !(config.window_linewidths >= 0.0) {
        return Err(Error::domain("final-state window must be non-negative"));
    }
    let gamma = match mode {
        SpectrumMode::Ctpa => config.classical.gamma,
        _ => config.linewidths.gamma,
    };
    let window = config.window_linewidths * gamma;
    let lw = &config.linewidths;
    let mut out = Vec::with_capacity(omega_h_grid_ev.len());
    for &omega_h_ev in omega_h_grid_ev {
        let omega_h = ev_to_hartree(omega_h_ev)?;
        let omega_t = 2.0 * omega_h;
        let active: Vec<FinalStateSelector> = finals
            .iter()
            .copied()
            .filter(|f| (model.energy(f.index()) - omega_t).abs() <= window)
            .collect();
        let indices: Vec<usize> = active.iter().map(|f| f.index()).collect();
        let mut value = 0.0;
        let (unit, metadata) = match mode {
            SpectrumMode::Mc | SpectrumMode::Bc => {
                let pair = if mode == SpectrumMode::Mc {
                    template.mc_pair(omega_h)?
                } else {
                    template.bc_pair(omega_h)?
                };
                for &f in &active {
                    value += etpa_cross_section(model, f, &pair, lw, config.averaging)?.value;
                }
                (
                    SigmaUnit::Cm2,
                    entangled_metadata(lw, config.averaging, &indices, pair.t_e),
                )
            }
            SpectrumMode::Mcs => {
                let mcs = template.mcs(omega_h)?;
                for &f in &active {
                    value += mcs_cross_section(model, f, &mcs, lw, config.averaging)?.value;
                }
                (
                    SigmaUnit::Cm2,
                    mcs_metadata(&mcs, lw, config.averaging, &indices),
                )
            }
            SpectrumMode::Ctpa => {
                let mut metadata = None;
                for &f in &active {
                    let r =
                        ctpa_cross_section(model, f, omega_h, &config.classical, config.averaging)?;
                    value += r.value;
                    metadata.get_or_insert(r.metadata);
                }
                let mut metadata = metadata.unwrap_or(Metadata {
                    theta: None,
                    phi: None,
                    t_e_fs: None,
                    t_e_prime_fs: None,
                    kappa_ev: hartree_to_ev(config.classical.kappa),
                    gamma_ev: hartree_to_ev(config.classical.gamma),
                    area_cm2: None,
                    averaging: config.averaging,
                    final_states: vec![],
                });
                metadata.final_states = indices;
                (SigmaUnit::Gm, metadata)
            }
        };
        out.push(CrossSectionResult {
            value,
            unit,
            omega_h_ev,
            metadata,
        });
    }
    Ok(out)
}

/// Entangled cross section of `pair` for each entanglement time in `te_grid_fs`.
pub fn te_sweep(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    pair: &PhotonPairConfig,
    lw: &LinewidthParams,
    averaging: Averaging,
    te_grid_fs: &[f64],
) -> Result<Vec<CrossSectionResult>> {
    te_grid_fs
        .iter()
        .map(|&fs| {
            if !(fs > 0.0) || !fs.is_finite() {
                return Err(Error::domain(format!(
                    "entanglement times must be positive, got {fs} fs"
                )));
            }
            let t_e = crate::units::fs_to_au_time(fs)?;
            etpa_cross_section(model, f, &pair.with_t_e(t_e), lw, averaging)
        })
        .collect()
}

/// Final state whose excitation energy is closest to `omega_t` (hartree);
/// ties go to the lower state.
pub fn nearest_final_state(model: &ExcitedStateSet, omega_t: f64) -> FinalStateSelector {
    let index = (1..=model.n_states())
        .min_by(|&a, &b| {
            let da = (model.energy(a) - omega_t).abs();
            let db = (model.energy(b) - omega_t).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        })
        .unwrap_or(1);
    FinalStateSelector::new(model, index).expect("index drawn from the model")
}

/// MCS cross sections over a theta x phi grid (radians).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// row-major, one row per theta
    pub values: Vec<f64>,
    pub omega_h_ev: f64,
    pub metadata: Metadata,
}

impl ScanGrid {
    pub fn value(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta * self.phi.len() + i_phi]
    }

    pub fn cell(&self, i_theta: usize, i_phi: usize) -> CrossSectionResult {
        CrossSectionResult {
            value: self.value(i_theta, i_phi),
            unit: SigmaUnit::Cm2,
            omega_h_ev: self.omega_h_ev,
            metadata: Metadata {
                theta: Some(self.theta[i_theta]),
                phi: Some(self.phi[i_phi]),
                ..self.metadata.clone()
            },
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.phi.len().max(1))
    }
}

pub fn bloch_scan(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    mcs_template: &McsConfig,
    lw: &LinewidthParams,
    averaging: Averaging,
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<ScanGrid> {
    if theta_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::domain(
            "Bloch scan needs at least one theta and one phi",
        ));
    }
    for &theta in theta_grid {
        check_bloch_angles(theta, 0.0)?;
    }
    for &phi in phi_grid {
        check_bloch_angles(0.0, phi)?;
    }
    let amps = interference(model, f, mcs_template, lw, averaging)?;
    let omega_t = mcs_template.mc.total_frequency();
    let scale =
        cross_section_prefactor(lw.area)? * lineshape(omega_t - model.energy(f.index()), lw.gamma)?;
    let mut values = Vec::with_capacity(theta_grid.len() * phi_grid.len());
    for &theta in theta_grid {
        for &phi in phi_grid {
            values.push(scale * amps.mean_square(theta, phi));
        }
    }
    let mut metadata = mcs_metadata(mcs_template, lw, averaging, &[f.index()]);
    metadata.theta = None;
    metadata.phi = None;
    Ok(ScanGrid {
        theta: theta_grid.to_vec(),
        phi: phi_grid.to_vec(),
        values,
        omega_h_ev: hartree_to_ev(0.5 * omega_t),
        metadata,
    })
}
