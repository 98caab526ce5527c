//! Subcommand runners. Each one resolves its parameters, calls the library
//! and hands the numbers to the output writers untouched.

use std::fmt;
use std::path::Path;

use etpa_core::units::{ev_to_hartree, fs_to_au_time, hartree_to_ev};
use etpa_core::{
    bloch_scan, nearest_final_state, parse_molecule_file, spectrum, te_sweep, Averaging,
    CtpaParams, EngineConfig, ExcitedStateSet, FinalStateSelector, LinewidthParams, PairTemplate,
    PolarizationScheme, SpectrumMode,
};

use crate::args::{
    AveragingArg, Common, CtpaArgs, EntangledArgs, EtpaArgs, McsArgs, McsScanArgs, PairMode,
    PointArgs, SpectrumArgs, SuperpositionArgs, TeSweepArgs,
};
use crate::grid::{deg_to_rad, linspace_deg};
use crate::output::{render, Document, RunManifest};

/// Overrides the classical prefactor `8 pi^3 alpha a0^5 / c` (cm^4 s).
pub const PREFACTOR_ENV: &str = "ETPA_CTPA_PREFACTOR_CM4S";

#[derive(Debug)]
pub enum CliError {
    /// unreadable, malformed or inconsistent input
    Input(String),
    /// parameters outside the physical domain
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<etpa_core::Error> for CliError {
    fn from(e: etpa_core::Error) -> Self {
        match e {
            etpa_core::Error::Domain(_) => CliError::Domain(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Loaded {
    model: ExcitedStateSet,
    manifest: RunManifest,
}

fn load(command: &'static str, common: &Common) -> Result<Loaded> {
    let path = &common.molecule;
    let bytes = std::fs::read(path).map_err(|e| {
        CliError::Input(format!(
            "cannot read molecule file `{}`: {e}",
            path.display()
        ))
    })?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Input(format!("molecule file `{}` is not UTF-8", path.display())))?;
    let model = parse_molecule_file(text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut manifest = RunManifest::new(command, path.display().to_string(), &bytes, common.format);
    manifest.set("averaging", averaging(common.averaging).name());
    Ok(Loaded { model, manifest })
}

fn averaging(arg: AveragingArg) -> Averaging {
    match arg {
        AveragingArg::Perpendicular => {
            Averaging::Isotropic(PolarizationScheme::PerpendicularLinear)
        }
        AveragingArg::Parallel => Averaging::Isotropic(PolarizationScheme::ParallelLinear),
        AveragingArg::Fixed => Averaging::Fixed,
    }
}

fn emit(doc: &Document, manifest: &RunManifest, output: Option<&Path>) -> Result<()> {
    let text = render(doc, manifest);
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
        }
    }
}

fn finals(model: &ExcitedStateSet, requested: &[usize]) -> Result<Vec<FinalStateSelector>> {
    if requested.is_empty() {
        return Ok((1..=model.n_states())
            .map(|i| FinalStateSelector::new(model, i))
            .collect::<etpa_core::Result<_>>()?);
    }
    Ok(requested
        .iter()
        .map(|&i| FinalStateSelector::new(model, i))
        .collect::<etpa_core::Result<_>>()?)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Domain(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn linewidths(args: &EntangledArgs, manifest: &mut RunManifest) -> Result<LinewidthParams> {
    manifest.set("kappa_ev", args.kappa_ev);
    manifest.set("gamma_ev", args.gamma_ev);
    manifest.set("area_cm2", args.area_cm2);
    let lw = LinewidthParams {
        kappa: ev_to_hartree(args.kappa_ev)?,
        gamma: ev_to_hartree(args.gamma_ev)?,
        area: args.area_cm2,
    };
    lw.validate()?;
    Ok(lw)
}

fn te(name: &str, fs: f64) -> Result<f64> {
    Ok(fs_to_au_time(positive(name, fs)?)?)
}

fn classical_prefactor(manifest: &mut RunManifest) -> Result<f64> {
    let (value, source) = match std::env::var(PREFACTOR_ENV) {
        Ok(raw) => {
            let v = raw
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0 && v.is_finite());
            let v = v.ok_or_else(|| {
                CliError::Input(format!("{PREFACTOR_ENV}=`{raw}` is not a positive number"))
            })?;
            (v, PREFACTOR_ENV)
        }
        Err(std::env::VarError::NotPresent) => {
            (CtpaParams::default().prefactor_cm4s, "codata-2018")
        }
        Err(e) => return Err(CliError::Input(format!("{PREFACTOR_ENV}: {e}"))),
    };
    manifest.set("prefactor_cm4s", value);
    manifest.set("prefactor_source", source);
    Ok(value)
}

fn record_spectrum(args: &SpectrumArgs, manifest: &mut RunManifest) {
    manifest.set("omega_h_ev", &args.omega_h.0);
    manifest.set("final_states", &args.finals);
    manifest.set("window_linewidths", args.window);
}

fn curve(x_name: &'static str, y_name: &'static str, x: &[f64], y: Vec<f64>) -> Document {
    Document::Curve {
        x_name,
        y_name,
        x: x.to_vec(),
        y,
    }
}

fn run_spectrum(
    common: &Common,
    spec: &SpectrumArgs,
    loaded: Loaded,
    template: PairTemplate,
    config: EngineConfig,
    mode: SpectrumMode,
) -> Result<()> {
    let Loaded {
        model,
        mut manifest,
    } = loaded;
    record_spectrum(spec, &mut manifest);
    let finals = finals(&model, &spec.finals)?;
    let config = EngineConfig {
        averaging: averaging(common.averaging),
        window_linewidths: spec.window,
        ..config
    };
    let results = spectrum(&model, &finals, &template, &config, &spec.omega_h.0, mode)?;
    let y_name = if mode == SpectrumMode::Ctpa {
        "sigma_gm"
    } else {
        "sigma_cm2"
    };
    let y = results.iter().map(|r| r.value).collect();
    emit(
        &curve("omega_h_ev", y_name, &spec.omega_h.0, y),
        &manifest,
        common.output.as_deref(),
    )
}

pub fn run_ctpa(args: &CtpaArgs) -> Result<()> {
    let mut loaded = load("ctpa", &args.common)?;
    let m = &mut loaded.manifest;
    m.set("kappa_ev", args.kappa_ev);
    m.set("gamma_ev", args.gamma_ev);
    let classical = CtpaParams {
        kappa: ev_to_hartree(args.kappa_ev)?,
        gamma: ev_to_hartree(args.gamma_ev)?,
        prefactor_cm4s: classical_prefactor(m)?,
        ..CtpaParams::default()
    };
    classical.validate()?;
    let config = EngineConfig {
        classical,
        ..EngineConfig::default()
    };
    run_spectrum(
        &args.common,
        &args.spectrum,
        loaded,
        PairTemplate::default(),
        config,
        SpectrumMode::Ctpa,
    )
}

pub fn run_etpa(args: &EtpaArgs) -> Result<()> {
    let mut loaded = load("etpa", &args.common)?;
    let m = &mut loaded.manifest;
    let linewidths = linewidths(&args.entangled, m)?;
    m.set("mode", args.mode);
    m.set("te_fs", args.te);
    m.set("split", args.split);
    let t_e = te("--te", args.te)?;
    // the single pair of a pure MC or BC run uses --te
    let template = PairTemplate {
        t_e,
        t_e_prime: t_e,
        split: args.split,
        ..PairTemplate::default()
    };
    let config = EngineConfig {
        linewidths,
        ..EngineConfig::default()
    };
    let mode = match args.mode {
        PairMode::Mc => SpectrumMode::Mc,
        PairMode::Bc => SpectrumMode::Bc,
    };
    run_spectrum(&args.common, &args.spectrum, loaded, template, config, mode)
}

fn superposition(
    pairs: &SuperpositionArgs,
    theta_deg: f64,
    phi_deg: f64,
    manifest: &mut RunManifest,
) -> Result<PairTemplate> {
    manifest.set("te_fs", pairs.te);
    manifest.set("te_prime_fs", pairs.te_prime);
    manifest.set("split", pairs.split);
    Ok(PairTemplate {
        t_e: te("--te", pairs.te)?,
        t_e_prime: te("--te-prime", pairs.te_prime)?,
        split: pairs.split,
        theta: deg_to_rad(theta_deg),
        phi: deg_to_rad(phi_deg),
        ..PairTemplate::default()
    })
}

pub fn run_mcs(args: &McsArgs) -> Result<()> {
    let mut loaded = load("mcs", &args.common)?;
    let m = &mut loaded.manifest;
    let linewidths = linewidths(&args.entangled, m)?;
    m.set("theta_deg", args.theta);
    m.set("phi_deg", args.phi);
    let template = superposition(&args.pairs, args.theta, args.phi, m)?;
    let config = EngineConfig {
        linewidths,
        ..EngineConfig::default()
    };
    run_spectrum(
        &args.common,
        &args.spectrum,
        loaded,
        template,
        config,
        SpectrumMode::Mcs,
    )
}

/// Final state and half frequency (hartree) of a single-point run.
fn point(
    model: &ExcitedStateSet,
    args: &PointArgs,
    manifest: &mut RunManifest,
) -> Result<(FinalStateSelector, f64)> {
    let requested = ev_to_hartree(args.omega_h)?;
    positive("--omega-h", requested)?;
    let f = match args.final_state {
        Some(i) => FinalStateSelector::new(model, i)?,
        None => nearest_final_state(model, 2.0 * requested),
    };
    let omega_h = if args.on_resonance {
        0.5 * model.energy(f.index())
    } else {
        requested
    };
    manifest.set("final_state", f.index());
    manifest.set("on_resonance", args.on_resonance);
    manifest.set("omega_h_ev", hartree_to_ev(omega_h));
    Ok((f, omega_h))
}

pub fn run_mcs_scan(args: &McsScanArgs) -> Result<()> {
    let Loaded {
        model,
        mut manifest,
    } = load("mcs-scan", &args.common)?;
    let m = &mut manifest;
    let lw = linewidths(&args.entangled, m)?;
    let (f, omega_h) = point(&model, &args.point, m)?;
    let (n_theta, n_phi) = args.grid;
    m.set("grid", [n_theta, n_phi]);
    let template = superposition(&args.pairs, 0.0, 0.0, m)?;
    let theta_deg = linspace_deg(n_theta, 180.0);
    let phi_deg = linspace_deg(n_phi, 360.0);
    let theta: Vec<f64> = theta_deg.iter().map(|&d| deg_to_rad(d)).collect();
    let phi: Vec<f64> = phi_deg.iter().map(|&d| deg_to_rad(d)).collect();
    let scan = bloch_scan(
        &model,
        f,
        &template.mcs(omega_h)?,
        &lw,
        averaging(args.common.averaging),
        &theta,
        &phi,
    )?;
    let values = scan.rows().map(<[f64]>::to_vec).collect();
    let doc = Document::Matrix {
        y_name: "sigma_cm2",
        theta_deg,
        phi_deg,
        values,
    };
    emit(&doc, &manifest, args.common.output.as_deref())
}

pub fn run_te_sweep(args: &TeSweepArgs) -> Result<()> {
    let Loaded {
        model,
        mut manifest,
    } = load("te-sweep", &args.common)?;
    let m = &mut manifest;
    let lw = linewidths(&args.entangled, m)?;
    let (f, omega_h) = point(&model, &args.point, m)?;
    m.set("mode", args.mode);
    m.set("split", args.split);
    m.set("te_fs", &args.te_range.0);
    let template = PairTemplate {
        split: args.split,
        ..PairTemplate::default()
    };
    let pair = match args.mode {
        PairMode::Mc => template.mc_pair(omega_h)?,
        PairMode::Bc => template.bc_pair(omega_h)?,
    };
    let results = te_sweep(
        &model,
        f,
        &pair,
        &lw,
        averaging(args.common.averaging),
        &args.te_range.0,
    )?;
    let y = results.iter().map(|r| r.value).collect();
    emit(
        &curve("t_e_fs", "sigma_cm2", &args.te_range.0, y),
        &manifest,
        args.common.output.as_deref(),
    )
}
