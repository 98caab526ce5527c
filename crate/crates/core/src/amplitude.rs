//! Sum-over-states two-photon transition amplitudes.
//!
//! For a pair of photons with frequencies `omega1`, `omega2`, entanglement
//! time `t_e` and linear polarizations `pol1`, `pol2`, the transition
//! function is
//!
//! ```text
//! S = sum_j (mu_fj . pol2)(mu_j0 . pol1) D_j(omega1) + (1 <-> 2)
//! D_j(omega) = {1 - exp[-i (Omega_j - omega - i kappa) t_e]} / (Omega_j - omega - i kappa)
//! ```
//!
//! and the entangled amplitude is `W = sqrt(omega1 omega2 / t_e) S`. The
//! exchange term swaps both the frequency and the polarization of the two
//! photons. That is carried by the Cartesian tensor
//! `M[a][b] = T[a][b](omega1) + T[b][a](omega2)` with
//! `T[a][b](omega) = sum_j mu_fj[a] mu_j0[b] D_j(omega)`, so
//! `S = pol2 . M . pol1`. Keeping the tensor around lets the orientation
//! average act on it before any polarization is fixed.
//!
//! The intermediate sum runs over every excited state except the final state
//! itself; permanent-dipole terms are not modelled.
//!
//! Everything here is in Hartree atomic units.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::molecule::{ExcitedStateSet, FinalStateSelector, Vec3};
use crate::units::{ev_to_hartree, fs_to_au_time};

pub type Tensor = Matrix3<Complex64>;

/// Largest deviation of `|pol|` from one accepted for a polarization vector.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Largest mismatch of `omega1 + omega2` between the two pair states of a
/// superposition, in hartree.
pub const ENERGY_CONSERVATION_TOLERANCE: f64 = 1e-10;

/// One entangled photon pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonPairConfig {
    /// hartree
    pub omega1: f64,
    /// hartree
    pub omega2: f64,
    /// entanglement time, atomic units
    pub t_e: f64,
    pub pol1: Vec3,
    pub pol2: Vec3,
}

impl PhotonPairConfig {
    pub fn new(omega1: f64, omega2: f64, t_e: f64, pol1: Vec3, pol2: Vec3) -> Result<Self> {
        let pair = PhotonPairConfig {
            omega1,
            omega2,
            t_e,
            pol1,
            pol2,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Pair with perpendicular linear polarizations along x and y.
    pub fn cross_polarized(omega1: f64, omega2: f64, t_e: f64) -> Result<Self> {
        Self::new(omega1, omega2, t_e, Vec3::x(), Vec3::y())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("omega1", self.omega1), ("omega2", self.omega2)] {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::domain(format!(
                    "photon frequency {name} must be positive, got {w} hartree"
                )));
            }
        }
        if !(self.t_e >= 0.0) || !self.t_e.is_finite() {
            return Err(Error::domain(format!(
                "entanglement time must be non-negative, got {} a.u.",
                self.t_e
            )));
        }
        check_unit("pol1", &self.pol1)?;
        check_unit("pol2", &self.pol2)
    }

    pub fn total_frequency(&self) -> f64 {
        self.omega1 + self.omega2
    }

    pub fn with_t_e(self, t_e: f64) -> Self {
        PhotonPairConfig { t_e, ..self }
    }
}

/// Coherent superposition `cos(theta/2)|MC> + sin(theta/2) e^{i phi}|BC>` of a
/// monochromatic and a bichromatic pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McsConfig {
    pub mc: PhotonPairConfig,
    pub bc: PhotonPairConfig,
    /// polar Bloch angle, radians
    pub theta: f64,
    /// azimuthal Bloch angle, radians
    pub phi: f64,
}

impl McsConfig {
    pub fn new(mc: PhotonPairConfig, bc: PhotonPairConfig, theta: f64, phi: f64) -> Result<Self> {
        let cfg = McsConfig { mc, bc, theta, phi };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.mc.validate()?;
        self.bc.validate()?;
        check_bloch_angles(self.theta, self.phi)?;
        let gap = (self.mc.total_frequency() - self.bc.total_frequency()).abs();
        if gap > ENERGY_CONSERVATION_TOLERANCE {
            return Err(Error::domain(format!(
                "energy conservation violated: MC pair carries {} hartree but BC pair carries {} hartree; \
                 perturbation theory demands energy conservation",
                self.mc.total_frequency(),
                self.bc.total_frequency()
            )));
        }
        Ok(())
    }

    pub fn with_angles(self, theta: f64, phi: f64) -> Self {
        McsConfig { theta, phi, ..self }
    }
}

/// Intermediate linewidth, final linewidth and entanglement area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinewidthParams {
    /// hartree
    pub kappa: f64,
    /// hartree
    pub gamma: f64,
    /// cm^2
    pub area: f64,
}

impl Default for LinewidthParams {
    /// kappa = 0.01 eV, Gamma = 1e-8 eV, A_e = 1e-8 cm^2.
    fn default() -> Self {
        LinewidthParams {
            kappa: ev_to_hartree(0.01).unwrap(),
            gamma: ev_to_hartree(1e-8).unwrap(),
            area: 1e-8,
        }
    }
}

impl LinewidthParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("area", self.area),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Default entanglement time, 100 fs, in atomic units.
pub fn default_t_e() -> f64 {
    fs_to_au_time(100.0).unwrap()
}

pub(crate) fn check_unit(name: &str, v: &Vec3) -> Result<()> {
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::domain(format!(
            "polarization {name} must be a unit vector, |{name}| = {norm}"
        )));
    }
    Ok(())
}

pub(crate) fn check_bloch_angles(theta: f64, phi: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!(
            "theta must lie in [0, pi], got {theta}"
        )));
    }
    if !(0.0..=2.0 * PI).contains(&phi) {
        return Err(Error::domain(format!(
            "phi must lie in [0, 2 pi], got {phi}"
        )));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!(
            "intermediate linewidth kappa must be positive, got {kappa}"
        )));
    }
    Ok(())
}

/// `D_j(omega)` for intermediate energy `omega_j`.
pub fn resolvent_factor(omega_j: f64, omega: f64, kappa: f64, t_e: f64) -> Result<Complex64> {
    check_kappa(kappa)?;
    if !(t_e >= 0.0) {
        return Err(Error::domain(format!(
            "entanglement time must be non-negative, got {t_e}"
        )));
    }
    Ok(resolvent(omega_j - omega, kappa, t_e))
}

#[inline]
fn resolvent(detuning: f64, kappa: f64, t_e: f64) -> Complex64 {
    let z = Complex64::new(detuning, -kappa);
    let phase = Complex64::new(0.0, -t_e) * z;
    (Complex64::new(1.0, 0.0) - phase.exp()) / z
}

#[inline]
fn resolvent_long_time(detuning: f64, kappa: f64) -> Complex64 {
    Complex64::new(detuning, -kappa).inv()
}

fn one_photon_tensor(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    omega: f64,
    factor: impl Fn(f64) -> Complex64,
) -> Tensor {
    let f = f.index();
    let mut t = Tensor::zeros();
    for j in (1..=model.n_states()).filter(|&j| j != f) {
        let d = factor(model.energy(j) - omega);
        let outer = model.interstate_dipole(f, j) * model.ground_dipole(j).transpose();
        t += outer.map(|x| d * x);
    }
    t
}

/// Two-photon tensor `M` with `S = pol2 . M . pol1`.
pub fn transition_tensor(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    omega1: f64,
    omega2: f64,
    kappa: f64,
    t_e: f64,
) -> Result<Tensor> {
    FinalStateSelector::new(model, f.index())?;
    check_kappa(kappa)?;
    if !(t_e >= 0.0) {
        return Err(Error::domain(format!(
            "entanglement time must be non-negative, got {t_e}"
        )));
    }
    let t1 = one_photon_tensor(model, f, omega1, |d| resolvent(d, kappa, t_e));
    let t2 = one_photon_tensor(model, f, omega2, |d| resolvent(d, kappa, t_e));
    Ok(t1 + t2.transpose())
}

/// [`transition_tensor`] in the limit of an infinitely long interaction, where
/// the bracket in `D_j` tends to one. This is the classical amplitude.
pub fn transition_tensor_long_time(
    model: &ExcitedStateSet,
    f: FinalStateSelector,
    omega1: f64,
    omega2: f64,
    kappa: f64,
) -> Result<Tensor> {
    FinalStateSelector::new(model, f.index())?;
    check_kappa(kappa)?;
    let t1 = one_photon_tensor(model, f, omega1, |d| resolvent_long_time(d, kappa));
    let t2 = one_photon_tensor(model, f, omega2, |d| resolvent_long_time(d, kappa));
    Ok(t1 + t2.transpose())
}

/// `pol2 . M . pol1`
pub fn s_amplitude(m: &Tensor, pol1: &Vec3, pol2: &Vec3) -> Result<Complex64> {
    check_unit("pol1", pol1)?;
    check_unit("pol2", pol2)?;
    Ok(contract(m, pol1, pol2))
}

#[inline]
pub(crate) fn contract(m: &Tensor, pol1: &Vec3, pol2: &Vec3) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            s += m[(a, b)] * (pol2[a] * pol1[b]);
        }
    }
    s
}

/// `sqrt(omega1 omega2 / t_e)`, the factor turning `S` into `W`.
pub fn w_scale(omega1: f64, omega2: f64, t_e: f64) -> Result<f64> {
    if !(t_e > 0.0) || !t_e.is_finite() {
        return Err(Error::domain(format!(
            "entanglement time must be positive to form W, got {t_e} a.u."
        )));
    }
    if !(omega1 > 0.0) || !(omega2 > 0.0) {
        return Err(Error::domain("photon frequencies must be positive"));
    }
    Ok((omega1 * omega2 / t_e).sqrt())
}

/// `W = sqrt(omega1 omega2 / t_e) S`. `t_e = 0` is rejected; the `t_e -> 0`
/// limit of `W` is zero and has to be taken by the caller.
pub fn w_amplitude(s: Complex64, omega1: f64, omega2: f64, t_e: f64) -> Result<Complex64> {
    Ok(s * w_scale(omega1, omega2, t_e)?)
}

/// `cos(theta/2) W_mc + sin(theta/2) e^{i phi} W_bc`
pub fn w_superposed(w_mc: Complex64, w_bc: Complex64, theta: f64, phi: f64) -> Result<Complex64> {
    check_bloch_angles(theta, phi)?;
    let (s, c) = (0.5 * theta).sin_cos();
    Ok(w_mc * c + Complex64::from_polar(s, phi) * w_bc)
}

/// Normalized Lorentzian `pi^-1 (Gamma/2) / (d^2 + (Gamma/2)^2)`.
///
/// Written as `(2 / (pi Gamma)) / (1 + (2 d / Gamma)^2)` so that the peak is
/// exactly `2 / (pi Gamma)`.
pub fn lineshape(delta_omega: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!(
            "final linewidth must be positive, got {gamma}"
        )));
    }
    let x = 2.0 * delta_omega / gamma;
    Ok(2.0 / (PI * gamma) / (1.0 + x * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molecule::synthetic_ladder;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn resolvent_examples() {
        assert_eq!(resolvent_factor(0.3, 0.1, 0.01, 0.0).unwrap(), c(0.0, 0.0));

        // at resonance D = (1 - e^{-kappa t}) / (-i kappa) = i (1 - e^{-1}) / 0.01
        let d = resolvent_factor(0.5, 0.5, 0.01, 100.0).unwrap();
        let expected = (1.0 - (-1.0f64).exp()) / 0.01;
        assert!(d.re.abs() < 1e-12 * expected);
        assert_relative_eq!(d.im, expected, max_relative = 1e-9);
        assert_relative_eq!(d.im, 63.212_055_882_855_77, max_relative = 1e-9);

        // mpmath, 50 digits: (1 - exp(-i(1 - 0.01i)10)) / (1 - 0.01i)
        let d = resolvent_factor(1.0, 0.0, 0.01, 10.0).unwrap();
        let expected = c(1.763_969_425_547_809, -0.474_610_963_078_713_74);
        assert!((d - expected).norm() <= 1e-12 * expected.norm(), "{d}");

        assert!(resolvent_factor(1.0, 0.0, 0.0, 10.0).is_err());
        assert!(resolvent_factor(1.0, 0.0, -0.1, 10.0).is_err());
    }

    proptest! {
        #[test]
        fn resolvent_bounded(det in -1.0f64..1.0, kappa in 1e-4f64..0.5, t in 0.0f64..1e4) {
            let d = resolvent_factor(det, 0.0, kappa, t).unwrap();
            let bound = (1.0 + (-kappa * t).exp()) / c(det, -kappa).norm();
            prop_assert!(d.norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zero_interstate_dipoles_give_zero_tensor() {
        let zero = vec![vec![Vec3::zeros(); 3]; 3];
        let m = ExcitedStateSet::from_hartree(
            &[0.05, 0.07, 0.1],
            vec![Vec3::new(1.0, 2.0, 3.0); 3],
            zero,
        )
        .unwrap();
        let f = FinalStateSelector::new(&m, 3).unwrap();
        let t = transition_tensor(&m, f, 0.05, 0.05, 0.01, 100.0).unwrap();
        assert_eq!(t, Tensor::zeros());
    }

    #[test]
    fn two_state_tensor_matches_hand_expansion() {
        let m = synthetic_ladder(2, 0.05, 1.0).unwrap();
        let f = FinalStateSelector::new(&m, 2).unwrap();
        let (w1, w2, kappa, te) = (0.03, 0.07, 0.004, 250.0);
        let t = transition_tensor(&m, f, w1, w2, kappa, te).unwrap();

        // one intermediate: mu_21 = (0.5, 0, 0), mu_10 = (0, 0, 1)
        let omega1 = m.energy(1);
        let d = |w: f64| {
            let z = c(omega1 - w, -kappa);
            (c(1.0, 0.0) - (c(0.0, -te) * z).exp()) / z
        };
        let mut expected = Tensor::zeros();
        expected[(0, 2)] = d(w1) * 0.5;
        expected[(2, 0)] = d(w2) * 0.5;
        for a in 0..3 {
            for b in 0..3 {
                assert!((t[(a, b)] - expected[(a, b)]).norm() <= 1e-12 * expected.camax().max(1.0));
            }
        }
        // pol1 = z, pol2 = x picks the first ordering only
        let s = s_amplitude(&t, &Vec3::z(), &Vec3::x()).unwrap();
        assert!((s - d(w1) * 0.5).norm() <= 1e-12 * s.norm());
    }

    #[test]
    fn degenerate_frequencies_give_symmetric_tensor() {
        let m = synthetic_ladder(4, 0.03, 1.0).unwrap();
        let m = ExcitedStateSet::from_hartree(
            m.energies(),
            (1..=4)
                .map(|j| Vec3::new(0.3 * j as f64, -0.2, 1.0))
                .collect(),
            (1..=4)
                .map(|f| {
                    (1..=4)
                        .map(|j| Vec3::new(0.1, 0.5 / (f + j) as f64, 0.2))
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        let f = FinalStateSelector::new(&m, 4).unwrap();
        let t = transition_tensor(&m, f, 0.06, 0.06, 0.01, 300.0).unwrap();
        assert_eq!(t, t.transpose());
    }

    #[test]
    fn s_amplitude_examples() {
        let id = Tensor::identity();
        assert_eq!(
            s_amplitude(&id, &Vec3::x(), &Vec3::y()).unwrap(),
            c(0.0, 0.0)
        );
        assert_eq!(
            s_amplitude(&id, &Vec3::x(), &Vec3::x()).unwrap(),
            c(1.0, 0.0)
        );

        let m = Tensor::from_fn(|a, b| c(a as f64 + 0.1 * b as f64, (3 * a + b) as f64 - 2.0));
        // pol1 = x, pol2 = y selects M[y][x]
        assert_eq!(s_amplitude(&m, &Vec3::x(), &Vec3::y()).unwrap(), m[(1, 0)]);
        assert!(s_amplitude(&m, &Vec3::new(1.0, 1.0, 0.0), &Vec3::y()).is_err());
    }

    #[test]
    fn w_amplitude_examples() {
        assert_eq!(
            w_amplitude(c(0.0, 0.0), 0.03, 0.03, 4134.0).unwrap(),
            c(0.0, 0.0)
        );
        let w = w_amplitude(c(1.0, 0.0), 0.03, 0.03, 4134.0).unwrap();
        assert_relative_eq!(w.re, (0.0009f64 / 4134.0).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w.re, 4.666e-4, max_relative = 1e-3);
        let s = c(0.3, -1.2);
        let w1 = w_amplitude(s, 0.02, 0.05, 100.0).unwrap();
        let w2 = w_amplitude(s, 0.02, 0.05, 200.0).unwrap();
        assert_relative_eq!(w2.norm() * 2f64.sqrt(), w1.norm(), max_relative = 1e-14);
        assert!(w_amplitude(s, 0.02, 0.05, 0.0).is_err());
    }

    #[test]
    fn w_superposed_examples() {
        let (a, b) = (c(0.3, -0.7), c(-1.1, 0.2));
        for phi in [0.0, 1.0, PI, 2.0 * PI] {
            assert_eq!(w_superposed(a, b, 0.0, phi).unwrap(), a);
            let pole = w_superposed(a, b, PI, phi).unwrap();
            assert_relative_eq!(pole.norm(), b.norm(), max_relative = 1e-15);
        }
        let w = c(0.8, 0.1);
        assert!(w_superposed(w, w, PI / 2.0, PI).unwrap().norm() < 1e-15);

        // theta = 60 deg: 75 % MC, 25 % BC once the cross term is removed
        let (s, cth) = (PI / 6.0).sin_cos();
        assert_relative_eq!(cth * cth, 0.75, max_relative = 1e-15);
        assert_relative_eq!(s * s, 0.25, max_relative = 1e-15);
        let ws = w_superposed(a, b, PI / 3.0, 0.0).unwrap().norm_sqr();
        let cross = 2.0 * cth * s * (a.conj() * b).re;
        assert_relative_eq!(
            ws - cross,
            0.75 * a.norm_sqr() + 0.25 * b.norm_sqr(),
            max_relative = 1e-14
        );

        assert!(w_superposed(a, b, -0.1, 0.0).is_err());
        assert!(w_superposed(a, b, 0.1, 7.0).is_err());
    }

    #[test]
    fn lineshape_examples() {
        let gamma = 3.7e-10;
        assert_eq!(lineshape(0.0, gamma).unwrap(), 2.0 / (PI * gamma));
        assert_eq!(
            lineshape(gamma / 2.0, gamma).unwrap(),
            lineshape(0.0, gamma).unwrap() / 2.0
        );
        assert!(lineshape(0.0, 0.0).is_err());
    }

    #[test]
    fn lineshape_normalized() {
        // composite Simpson on [-1000 Gamma, 1000 Gamma] with the width
        // resolved by a fine step; the analytic tail mass outside is
        // 2 atan(1/2000)... ~ 3.2e-4
        let gamma = 0.2;
        let n = 2_000_000;
        let (a, b) = (-1000.0 * gamma, 1000.0 * gamma);
        let h = (b - a) / n as f64;
        let mut sum = lineshape(a, gamma).unwrap() + lineshape(b, gamma).unwrap();
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * lineshape(a + i as f64 * h, gamma).unwrap();
        }
        let integral = sum * h / 3.0;
        assert!((integral - 1.0).abs() < 1e-3, "{integral}");
    }

    #[test]
    fn pair_validation() {
        assert!(PhotonPairConfig::cross_polarized(0.05, 0.05, 100.0).is_ok());
        assert!(PhotonPairConfig::cross_polarized(0.0, 0.05, 100.0).is_err());
        assert!(PhotonPairConfig::cross_polarized(0.05, 0.05, -1.0).is_err());
        assert!(
            PhotonPairConfig::new(0.05, 0.05, 1.0, Vec3::new(1.0, 1e-5, 0.0), Vec3::y()).is_err()
        );
    }

    #[test]
    fn mcs_energy_conservation() {
        let mc = PhotonPairConfig::cross_polarized(0.06, 0.06, 4000.0).unwrap();
        let bc = PhotonPairConfig::cross_polarized(0.04, 0.08, 3000.0).unwrap();
        assert!(McsConfig::new(mc, bc, 1.0, 0.5).is_ok());
        let bad = PhotonPairConfig::cross_polarized(0.04, 0.081, 3000.0).unwrap();
        let err = McsConfig::new(mc, bad, 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("energy conservation"));
        assert!(McsConfig::new(mc, bc, 3.2, 0.5).is_err());
        assert!(McsConfig::new(mc, bc, 1.0, -0.5).is_err());
    }
}
