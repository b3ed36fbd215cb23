use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use coherence_kit::io::{self, FormatError, StateData};
use coherence_kit::poly::{self, HomogeneousPolynomial};
use coherence_kit::roof::{self, SolverConfig};
use coherence_kit::state::{self, DensityMatrix, PureState, DEFAULT_ZERO_TOL};
use coherence_kit::symmetric::{self, TwirlMode, MAX_EXACT_TWIRL_DIM};
use coherence_kit::{CoherenceError, Complex64};
use thiserror::Error;

const AUDIT_RECONSTRUCTION_TOL: f64 = 1e-8;
const AUDIT_VALUE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error(transparent)]
    Core(#[from] CoherenceError),
    #[error("witness audit failed: {0}")]
    Audit(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Audit(_) => 3,
            _ => 2,
        }
    }
}

/// Text for standard output together with the exit code.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

pub enum Selector {
    Poly(PathBuf),
    G,
    L1,
}

pub enum WitnessPoly {
    File(PathBuf),
    G(usize),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn load_state(path: &Path) -> Result<StateData, CliError> {
    io::parse_state(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_owned(),
        source,
    })
}

fn load_pure(path: &Path) -> Result<PureState, CliError> {
    match load_state(path)? {
        StateData::Pure(psi) => Ok(psi),
        StateData::Mixed(_) => Err(CliError::Usage(format!(
            "{}: expected a pure state (`amplitudes`)",
            path.display()
        ))),
    }
}

fn load_polynomial(path: &Path) -> Result<HomogeneousPolynomial, CliError> {
    io::parse_polynomial(&read(path)?).map_err(|source| CliError::Format {
        path: path.to_owned(),
        source,
    })
}

/// Twelve significant digits; an exact zero prints as `0`.
pub fn significant12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).clamp(0, 40) as usize;
    format!("{x:.decimals$}")
}

/// Six decimals without a negative sign on values that round to zero.
pub fn fixed6(x: f64) -> String {
    if x.abs() < 5e-7 {
        "0.000000".into()
    } else {
        format!("{x:.6}")
    }
}

fn complex6(z: Complex64) -> String {
    let im = fixed6(z.im.abs());
    let sign = if z.im < 0.0 && im != "0.000000" { '-' } else { '+' };
    format!("{}{sign}{im}i", fixed6(z.re))
}

fn amplitudes6(psi: &PureState) -> String {
    let parts: Vec<String> = psi.amplitudes().iter().map(|&z| complex6(z)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn measure(path: &Path, selector: Selector, scale: Option<f64>) -> Result<Outcome, CliError> {
    let psi = load_pure(path)?;
    let d = psi.dim();
    let (label, value) = match selector {
        Selector::G => {
            let g = poly::g_polynomial(d)?;
            ("C_G", poly::evaluate(&g, &psi, scale.unwrap_or(d as f64))?)
        }
        Selector::L1 => {
            if d != 2 {
                return Err(CliError::Usage("l1 polynomial form defined for d=2 only".into()));
            }
            ("C_l1", scale.unwrap_or(1.0) * poly::c_l1_pure(&psi)?)
        }
        Selector::Poly(file) => {
            let p = load_polynomial(&file)?;
            ("C_p", poly::evaluate(&p, &psi, scale.unwrap_or(1.0))?)
        }
    };
    let rank = state::dephased_rank(&psi, DEFAULT_ZERO_TOL);
    let mut out = String::new();
    let _ = writeln!(out, "{label} = {}", significant12(value));
    let _ = writeln!(out, "dephased rank = {rank} (d = {d})");
    if label == "C_G" && rank < d {
        let _ = writeln!(out, "note: dephased rank below d, so the value is necessarily 0");
    }
    Ok(Outcome::ok(out))
}

pub fn symmetric(dim: usize, points: usize, out_path: &Path) -> Result<Outcome, CliError> {
    let curve = symmetric::sweep_symmetric_curve(dim, 1.0 / dim as f64, 1.0, points)?;
    write(out_path, &symmetric::curve_to_csv(&curve))?;
    Ok(Outcome::ok(format!("wrote {} rows to {}\n", curve.len(), out_path.display())))
}

pub fn roof(
    path: &Path,
    restarts: usize,
    size: Option<usize>,
    seed: u64,
    witness: Option<&Path>,
) -> Result<Outcome, CliError> {
    let rho = load_state(path)?.to_density_matrix()?;
    let d = rho.dim();
    let g = poly::g_polynomial(d)?;
    let scale = d as f64;
    let cfg = SolverConfig {
        decomposition_size: size,
        restarts,
        seed,
        ..SolverConfig::default()
    };
    let result = roof::minimize_convex_roof(&rho, &g, scale, &cfg)?;
    audit(&rho, &result, &g, scale)?;
    let bound = symmetric::cg_lower_bound(&rho);

    let mut out = String::new();
    let _ = writeln!(out, "convex roof C_G <= {}", fixed6(result.value));
    let _ = writeln!(out, "lower bound      = {}", fixed6(bound));
    let _ = writeln!(out, "gap              = {:.3e}", result.value - bound);
    let _ = writeln!(
        out,
        "witness: {} states, restart {} of {restarts}, seed {seed}",
        result.decomposition.len(),
        result.restart
    );
    if let Some(file) = witness {
        write(file, &io::decomposition_to_json(&result.decomposition))?;
        let _ = writeln!(out, "wrote witness to {}", file.display());
    }
    Ok(Outcome::ok(out))
}

fn audit(
    rho: &DensityMatrix,
    result: &roof::RoofResult,
    g: &HomogeneousPolynomial,
    scale: f64,
) -> Result<(), CliError> {
    let recon = result.decomposition.reconstruction_error(rho);
    if recon.is_nan() || recon > AUDIT_RECONSTRUCTION_TOL {
        return Err(CliError::Audit(format!("reconstruction error {recon:e}")));
    }
    let recheck = roof::average_measure(&result.decomposition, g, scale)?;
    let mismatch = (recheck - result.value).abs();
    if mismatch.is_nan() || mismatch > AUDIT_VALUE_TOL {
        return Err(CliError::Audit(format!(
            "reported value {} but the witness evaluates to {recheck}",
            result.value
        )));
    }
    Ok(())
}

pub fn witness(
    selector: WitnessPoly,
    scale: Option<f64>,
    state1: &Path,
    state2: &Path,
) -> Result<Outcome, CliError> {
    let (p, default_scale) = match selector {
        WitnessPoly::File(file) => (load_polynomial(&file)?, 1.0),
        WitnessPoly::G(d) => (poly::g_polynomial(d)?, d as f64),
    };
    let scale = scale.unwrap_or(default_scale);
    let (psi1, psi2) = (load_pure(state1)?, load_pure(state2)?);
    let witnesses = poly::zero_coherence_witness(&p, &psi1, &psi2)?;

    let mut out = String::new();
    let _ = writeln!(out, "{} zero-coherence witness(es)", witnesses.len());
    for w in &witnesses {
        let value = poly::evaluate(&p, &w.state, scale)?;
        match w.omega {
            Some(z) => {
                let _ = writeln!(out, "omega = {}", complex6(z));
            }
            None => {
                let _ = writeln!(out, "omega = infinity (state2)");
            }
        }
        let _ = writeln!(out, "  state = {}", amplitudes6(&w.state));
        let _ = writeln!(out, "  value = {value:.3e}");
    }
    Ok(Outcome::ok(out))
}

pub fn twirl(path: &Path, sample: Option<usize>, seed: u64, out_path: &Path) -> Result<Outcome, CliError> {
    let rho = load_state(path)?.to_density_matrix()?;
    let mode = match sample {
        Some(samples) => TwirlMode::Sampled { samples, seed },
        None if rho.dim() > MAX_EXACT_TWIRL_DIM => {
            return Err(CliError::Usage(format!(
                "exact twirl supports d <= {MAX_EXACT_TWIRL_DIM} (got d = {}); pass --sample N",
                rho.dim()
            )))
        }
        None => TwirlMode::Exact,
    };
    let twirled = symmetric::twirl(&rho, mode)?;
    write(out_path, &io::density_matrix_to_json(&twirled))?;
    let mut out = String::new();
    let _ = writeln!(out, "K before = {:.12}", symmetric::overlap_k(&rho));
    let _ = writeln!(out, "K after  = {:.12}", symmetric::overlap_k(&twirled));
    let _ = writeln!(out, "wrote twirled state to {}", out_path.display());
    Ok(Outcome::ok(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant12(1.0), "1.00000000000");
        assert_eq!(significant12(0.0), "0");
        assert_eq!(significant12(0.932169751786), "0.932169751786");
        assert_eq!(significant12(12.5), "12.5000000000");
    }

    #[test]
    fn six_decimals_never_negative_zero() {
        assert_eq!(fixed6(-1e-9), "0.000000");
        assert_eq!(complex6(Complex64::new(-0.8164965809, -1e-12)), "-0.816497+0.000000i");
        assert_eq!(complex6(Complex64::new(0.5, -0.25)), "0.500000-0.250000i");
    }
}
