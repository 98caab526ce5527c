//! Two-photon absorption cross sections of molecules for classical light,
//! entangled photon pairs, and coherent superpositions of a monochromatic and
//! a bichromatic entangled pair, evaluated from sum-over-states excited-state
//! data.
//!
//! The physics runs in Hartree atomic units; [`units`] converts at the edges.

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod error;
pub mod molecule;
pub mod orientation;
pub mod spectra;
pub mod units;

pub use amplitude::{
    lineshape, resolvent_factor, s_amplitude, transition_tensor, w_amplitude, w_superposed,
    LinewidthParams, McsConfig, PhotonPairConfig, Tensor,
};
pub use error::{Error, Result};
pub use molecule::{
    parse_molecule_file, render_molecule_file, synthetic_ladder, ExcitedStateSet,
    FinalStateSelector, Vec3,
};
pub use orientation::{bilinear_isotropic_average, quadrature_average, PolarizationScheme};
pub use spectra::{
    bloch_scan, ctpa_cross_section, etpa_cross_section, interference, mcs_cross_section,
    nearest_final_state, spectrum, te_sweep, Averaging, CrossSectionResult, CtpaParams,
    EngineConfig, Interference, Metadata, PairTemplate, ScanGrid, SigmaUnit, SpectrumMode,
};
pub use units::{PhysicalConstants, CODATA_2018};
