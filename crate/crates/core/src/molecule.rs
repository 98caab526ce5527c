//! Excited-state data for sum-over-states amplitudes.
//!
//! States are numbered from 1; the ground state is the implicit index 0 and
//! sits at zero energy. Energies are held in eV as read and in hartree for
//! the physics, the hartree values always being derived from the eV ones so
//! that rendering and re-parsing a model reproduces it bit for bit.
//!
//! # Document format
//!
//! A molecule is a TOML document with exactly four keys:
//!
//! ```toml
//! n_states = 2
//! energies_ev = [1.64, 3.28]
//! ground_dipoles_au = [[0.0, 0.0, 1.0], [0.0, 0.0, 0.5]]
//! interstate_dipoles_au = [
//!     [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0]],
//!     [[0.5, 0.0, 0.0], [0.0, 0.0, 0.0]],
//! ]
//! ```
//!
//! `interstate_dipoles_au[f-1][j-1]` is the transition dipole between excited
//! states `f` and `j`. The matrix must be symmetric to within
//! [`SYMMETRY_TOLERANCE_AU`]; smaller mismatches are averaged away.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{hartree_to_ev, CODATA_2018};

pub type Vec3 = Vector3<f64>;

/// Largest |mu_fj - mu_jf| component accepted before a model is rejected.
pub const SYMMETRY_TOLERANCE_AU: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitedStateSet {
    energies_ev: Vec<f64>,
    energies: Vec<f64>,
    ground_dipoles: Vec<Vec3>,
    // row-major n x n, zero-based
    interstate: Vec<Vec3>,
}

/// A valid final-state index for a particular [`ExcitedStateSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FinalStateSelector(usize);

impl FinalStateSelector {
    pub fn new(model: &ExcitedStateSet, f_index: usize) -> Result<Self> {
        if f_index == 0 || f_index > model.n_states() {
            return Err(Error::validation(
                "final_state",
                format!(
                    "index {f_index} outside 1..={} (state 0 is the ground state)",
                    model.n_states()
                ),
            ));
        }
        Ok(FinalStateSelector(f_index))
    }

    pub fn index(self) -> usize {
        self.0
    }
}

impl ExcitedStateSet {
    /// Builds a model from energies in eV and dipoles in atomic units,
    /// enforcing every model invariant.
    pub fn from_ev(
        energies_ev: Vec<f64>,
        ground_dipoles: Vec<Vec3>,
        interstate: Vec<Vec<Vec3>>,
    ) -> Result<Self> {
        let n = energies_ev.len();
        if n == 0 {
            return Err(Error::validation(
                "energies_ev",
                "at least one excited state is required",
            ));
        }
        for (i, &e) in energies_ev.iter().enumerate() {
            if !e.is_finite() || e <= 0.0 {
                return Err(Error::validation(
                    format!("energies_ev[{i}]"),
                    format!("excitation energies must be finite and positive, got {e}"),
                ));
            }
        }
        if let Some(i) = energies_ev.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::validation(
                format!("energies_ev[{}]", i + 1),
                "energies must be sorted in non-decreasing order",
            ));
        }
        if ground_dipoles.len() != n {
            return Err(Error::validation(
                "ground_dipoles_au",
                format!("expected {n} vectors, found {}", ground_dipoles.len()),
            ));
        }
        if let Some(i) = ground_dipoles.iter().position(|v| !all_finite(v)) {
            return Err(Error::validation(
                format!("ground_dipoles_au[{i}]"),
                "components must be finite",
            ));
        }
        if interstate.len() != n {
            return Err(Error::validation(
                "interstate_dipoles_au",
                format!("expected {n} rows, found {}", interstate.len()),
            ));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (f, row) in interstate.iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(
                    format!("interstate_dipoles_au[{f}]"),
                    format!("expected {n} vectors, found {}", row.len()),
                ));
            }
            for (j, v) in row.iter().enumerate() {
                if !all_finite(v) {
                    return Err(Error::validation(
                        format!("interstate_dipoles_au[{f}][{j}]"),
                        "components must be finite",
                    ));
                }
            }
            flat.extend_from_slice(row);
        }
        for f in 0..n {
            for j in (f + 1)..n {
                let a = flat[f * n + j];
                let b = flat[j * n + f];
                let gap = (a - b).amax();
                if gap > SYMMETRY_TOLERANCE_AU {
                    return Err(Error::validation(
                        format!("interstate_dipoles_au[{f}][{j}]"),
                        format!(
                            "dipole between states {} and {} is not symmetric (max deviation {gap:e} a.u.)",
                            f + 1,
                            j + 1
                        ),
                    ));
                }
                if a != b {
                    let mean = (a + b) * 0.5;
                    flat[f * n + j] = mean;
                    flat[j * n + f] = mean;
                }
            }
        }
        let energies = energies_ev
            .iter()
            .map(|e| e / CODATA_2018.hartree_ev)
            .collect();
        Ok(ExcitedStateSet {
            energies_ev,
            energies,
            ground_dipoles,
            interstate: flat,
        })
    }

    /// Same as [`from_ev`](Self::from_ev) with energies given in hartree.
    pub fn from_hartree(
        energies: &[f64],
        ground_dipoles: Vec<Vec3>,
        interstate: Vec<Vec<Vec3>>,
    ) -> Result<Self> {
        let ev = energies.iter().map(|&e| hartree_to_ev(e)).collect();
        Self::from_ev(ev, ground_dipoles, interstate)
    }

    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    /// Excitation energy of state `j` (1-based) in hartree.
    pub fn energy(&self, j: usize) -> f64 {
        self.energies[j - 1]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energies_ev(&self) -> &[f64] {
        &self.energies_ev
    }

    /// mu_{j0}
    pub fn ground_dipole(&self, j: usize) -> Vec3 {
        self.ground_dipoles[j - 1]
    }

    /// mu_{fj}
    pub fn interstate_dipole(&self, f: usize, j: usize) -> Vec3 {
        let n = self.n_states();
        self.interstate[(f - 1) * n + (j - 1)]
    }

    /// A copy with every transition dipole multiplied by `factor`.
    pub fn scaled_dipoles(&self, factor: f64) -> Self {
        ExcitedStateSet {
            energies_ev: self.energies_ev.clone(),
            energies: self.energies.clone(),
            ground_dipoles: self.ground_dipoles.iter().map(|v| v * factor).collect(),
            interstate: self.interstate.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn to_document(&self) -> MoleculeDocument {
        let n = self.n_states();
        MoleculeDocument {
            n_states: n,
            energies_ev: self.energies_ev.clone(),
            ground_dipoles_au: self.ground_dipoles.iter().map(to_array).collect(),
            interstate_dipoles_au: self
                .interstate
                .chunks(n)
                .map(|row| row.iter().map(to_array).collect())
                .collect(),
        }
    }
}

fn all_finite(v: &Vec3) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn to_array(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// On-disk representation of a molecule model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeDocument {
    pub n_states: usize,
    pub energies_ev: Vec<f64>,
    pub ground_dipoles_au: Vec<[f64; 3]>,
    pub interstate_dipoles_au: Vec<Vec<[f64; 3]>>,
}

impl MoleculeDocument {
    pub fn into_model(self) -> Result<ExcitedStateSet> {
        let n = self.n_states;
        if n == 0 {
            return Err(Error::validation(
                "n_states",
                "at least one excited state is required",
            ));
        }
        if self.energies_ev.len() != n {
            return Err(Error::validation(
                "energies_ev",
                format!(
                    "n_states is {n} but {} energies were given",
                    self.energies_ev.len()
                ),
            ));
        }
        ExcitedStateSet::from_ev(
            self.energies_ev,
            self.ground_dipoles_au
                .iter()
                .map(|a| Vec3::from(*a))
                .collect(),
            self.interstate_dipoles_au
                .iter()
                .map(|row| row.iter().map(|a| Vec3::from(*a)).collect())
                .collect(),
        )
    }
}

pub fn parse_molecule_file(text: &str) -> Result<ExcitedStateSet> {
    let doc: MoleculeDocument = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| line_column(text, span.start))
            .unwrap_or((0, 0));
        Error::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    doc.into_model()
}

pub fn render_molecule_file(model: &ExcitedStateSet) -> String {
    let doc = model.to_document();
    let mut out = String::new();
    out.push_str(&format!("n_states = {}\n", doc.n_states));
    out.push_str(&format!(
        "energies_ev = [{}]\n",
        join_floats(&doc.energies_ev)
    ));
    out.push_str("ground_dipoles_au = [\n");
    for v in &doc.ground_dipoles_au {
        out.push_str(&format!("    [{}],\n", join_floats(v)));
    }
    out.push_str("]\ninterstate_dipoles_au = [\n");
    for row in &doc.interstate_dipoles_au {
        let cells: Vec<String> = row
            .iter()
            .map(|v| format!("[{}]", join_floats(v)))
            .collect();
        out.push_str(&format!("    [{}],\n", cells.join(", ")));
    }
    out.push_str("]\n");
    out
}

// `{:?}` is the shortest representation that round-trips and always carries a
// decimal point or exponent, so TOML reads it back as the same float.
fn join_floats(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Deterministic `n`-state test model: `Omega_j = j * gap`, `mu_{j0}` along z
/// with magnitude `dipole_scale / j`, and `mu_{fj}` along x with magnitude
/// `dipole_scale / (1 + |f - j|)`.
pub fn synthetic_ladder(n: usize, gap: f64, dipole_scale: f64) -> Result<ExcitedStateSet> {
    if n < 2 {
        return Err(Error::validation(
            "n",
            format!("ladder needs at least 2 states, got {n}"),
        ));
    }
    if !(gap > 0.0) || !gap.is_finite() {
        return Err(Error::validation(
            "gap",
            format!("must be positive, got {gap}"),
        ));
    }
    if !(dipole_scale > 0.0) || !dipole_scale.is_finite() {
        return Err(Error::validation(
            "dipole_scale",
            format!("must be positive, got {dipole_scale}"),
        ));
    }
    let energies: Vec<f64> = (1..=n).map(|j| j as f64 * gap).collect();
    let ground = (1..=n)
        .map(|j| Vec3::new(0.0, 0.0, dipole_scale / j as f64))
        .collect();
    let inter = (1..=n)
        .map(|f| {
            (1..=n)
                .map(|j| Vec3::new(dipole_scale / (1.0 + f.abs_diff(j) as f64), 0.0, 0.0))
                .collect()
        })
        .collect();
    ExcitedStateSet::from_hartree(&energies, ground, inter)
}
