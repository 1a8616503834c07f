//! Parsing of the basis, state, gate and effect specs accepted on the command line.

use std::path::{Path, PathBuf};

use kdq::algebra::random::{random_density_matrix, random_pure_state, random_unitary};
use kdq::algebra::{
    checked_pow, clock, hadamard, qft_matrix, shift, ComplexMatrix, DensityMatrix, PureState,
};
use kdq::kd::BasisPair;
use serde_json::Value;

use crate::error::CliError;
use crate::output::load;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_seed(spec: &str, rest: &str) -> Result<u64, CliError> {
    rest.parse()
        .map_err(|_| usage(format!("bad seed in spec `{spec}`")))
}

fn parse_index(spec: &str, rest: &str) -> Result<usize, CliError> {
    rest.parse()
        .map_err(|_| usage(format!("bad index in spec `{spec}`")))
}

fn check_index(spec: &str, i: usize, bound: usize) -> Result<usize, CliError> {
    if i >= bound {
        return Err(usage(format!(
            "index {i} in `{spec}` must be below {bound}"
        )));
    }
    Ok(i)
}

fn file_path(rest: &str) -> PathBuf {
    PathBuf::from(rest)
}

pub fn require_d(d: Option<usize>) -> Result<usize, CliError> {
    d.ok_or_else(|| usage("--d is required"))
}

/// Basis pair over d^n, per-qudit unless a file supplies a global transition.
pub fn basis(spec: &str, d: usize, n: usize) -> Result<BasisPair, CliError> {
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    let bp = match spec {
        "qft" => BasisPair::qft(d, n)?,
        "hadamard" => {
            if d != 2 {
                return Err(usage("the hadamard basis needs --d 2"));
            }
            BasisPair::hadamard(n)?
        }
        _ => {
            if let Some(rest) = spec.strip_prefix("random:") {
                let seed = parse_seed(spec, rest)?;
                BasisPair::from_factors(
                    (0..n as u64)
                        .map(|q| random_unitary(d, seed.wrapping_add(q)))
                        .collect(),
                )?
            } else if let Some(rest) = spec.strip_prefix("file:") {
                basis_file(rest, d, n)?
            } else {
                return Err(usage(format!("unknown basis spec `{spec}`")));
            }
        }
    };
    let dim = checked_pow(d, n)?;
    if bp.dim() != dim {
        return Err(CliError::Kd(kdq::KdError::DimensionMismatch {
            expected: dim,
            found: bp.dim(),
        }));
    }
    Ok(bp)
}

/// A BasisPair artifact, a d×d factor replicated per qudit, or a D×D transition.
fn basis_file(rest: &str, d: usize, n: usize) -> Result<BasisPair, CliError> {
    let path = file_path(rest);
    let value: Value = load(&path)?;
    if value.get("v").is_some() {
        return Ok(serde_json::from_value(value)?);
    }
    let m: ComplexMatrix = serde_json::from_value(value)?;
    if m.rows() == d && n > 1 {
        Ok(BasisPair::from_factors(vec![m; n])?)
    } else {
        Ok(BasisPair::new(m)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    A(usize),
    B(usize),
    MaximallyMixed,
    RandomMixed(u64),
    RandomPure(u64),
    File(PathBuf),
}

impl StateSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        if spec == "mixed" {
            return Ok(StateSpec::MaximallyMixed);
        }
        if let Some(rest) = spec.strip_prefix("mixed:") {
            return Ok(StateSpec::RandomMixed(parse_seed(spec, rest)?));
        }
        if let Some(rest) = spec.strip_prefix("random:") {
            return Ok(StateSpec::RandomPure(parse_seed(spec, rest)?));
        }
        if let Some(rest) = spec.strip_prefix("file:") {
            return Ok(StateSpec::File(file_path(rest)));
        }
        if let Some(rest) = spec.strip_prefix('a') {
            return Ok(StateSpec::A(parse_index(spec, rest)?));
        }
        if let Some(rest) = spec.strip_prefix('b') {
            return Ok(StateSpec::B(parse_index(spec, rest)?));
        }
        Err(usage(format!("unknown state spec `{spec}`")))
    }
}

/// A pure state or density matrix loaded from JSON.
enum FileState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl FileState {
    fn load(path: &Path) -> Result<Self, CliError> {
        let m: ComplexMatrix = load(path)?;
        if m.cols() == 1 {
            Ok(FileState::Pure(PureState::new(m.into_vec())?))
        } else {
            Ok(FileState::Mixed(DensityMatrix::new(m)?))
        }
    }

    fn dim(&self) -> usize {
        match self {
            FileState::Pure(p) => p.dim(),
            FileState::Mixed(r) => r.dim(),
        }
    }
}

pub fn pure_state(spec: &str, bp: &BasisPair) -> Result<PureState, CliError> {
    let dim = bp.dim();
    let psi = match StateSpec::parse(spec)? {
        StateSpec::A(i) => bp.a_state(check_index(spec, i, dim)?),
        StateSpec::B(j) => bp.b_state(check_index(spec, j, dim)?),
        StateSpec::RandomPure(seed) => random_pure_state(dim, seed),
        StateSpec::File(path) => match FileState::load(&path)? {
            FileState::Pure(p) => p,
            FileState::Mixed(_) => return Err(usage(format!("`{spec}` is not a pure state"))),
        },
        StateSpec::MaximallyMixed | StateSpec::RandomMixed(_) => {
            return Err(usage(format!("`{spec}` is not a pure state")))
        }
    };
    check_dim(psi.dim(), dim)?;
    Ok(psi)
}

pub fn density(spec: &str, bp: &BasisPair) -> Result<DensityMatrix, CliError> {
    let dim = bp.dim();
    let rho = match StateSpec::parse(spec)? {
        StateSpec::MaximallyMixed => DensityMatrix::maximally_mixed(dim)?,
        StateSpec::RandomMixed(seed) => random_density_matrix(dim, seed),
        StateSpec::File(path) => match FileState::load(&path)? {
            FileState::Pure(p) => p.to_density(),
            FileState::Mixed(r) => r,
        },
        _ => pure_state(spec, bp)?.to_density(),
    };
    check_dim(rho.dim(), dim)?;
    Ok(rho)
}

fn check_dim(found: usize, expected: usize) -> Result<(), CliError> {
    if found != expected {
        return Err(CliError::Kd(kdq::KdError::DimensionMismatch {
            expected,
            found,
        }));
    }
    Ok(())
}

/// Either one object per qudit or a single object on the whole register.
pub enum Factored<T> {
    Local(Vec<T>),
    Global(T),
}

/// Per-qudit input states for the sampler; random seeds advance by one per qudit.
pub fn factored_density(
    spec: &str,
    bp: &BasisPair,
    d: usize,
    n: usize,
) -> Result<Factored<DensityMatrix>, CliError> {
    let Some(factors) = bp.factors() else {
        return Ok(Factored::Global(density(spec, bp)?));
    };
    let parsed = StateSpec::parse(spec)?;
    if let StateSpec::File(path) = &parsed {
        let state = FileState::load(path)?;
        if state.dim() != d || n == 1 {
            return Ok(Factored::Global(density(spec, bp)?));
        }
    }
    let mut out = Vec::with_capacity(n);
    for (q, factor) in factors.iter().enumerate() {
        let single = BasisPair::from_factors(vec![factor.clone()])?;
        let local = match &parsed {
            StateSpec::RandomMixed(seed) => format!("mixed:{}", seed.wrapping_add(q as u64)),
            StateSpec::RandomPure(seed) => format!("random:{}", seed.wrapping_add(q as u64)),
            _ => spec.to_string(),
        };
        out.push(density(&local, &single)?);
    }
    Ok(Factored::Local(out))
}

/// Effect F: projector onto a<i>/b<j>, identity, or a Hermitian matrix file.
pub fn effect(spec: &str, bp: &BasisPair) -> Result<ComplexMatrix, CliError> {
    let dim = bp.dim();
    if spec == "identity" {
        return Ok(ComplexMatrix::identity(dim));
    }
    if let Some(rest) = spec.strip_prefix("file:") {
        let m: ComplexMatrix = load(&file_path(rest))?;
        check_dim(m.rows(), dim)?;
        return Ok(m);
    }
    match StateSpec::parse(spec)? {
        StateSpec::A(_) | StateSpec::B(_) => Ok(pure_state(spec, bp)?.projector()),
        _ => Err(usage(format!("unknown effect spec `{spec}`"))),
    }
}

pub fn factored_effect(
    spec: &str,
    bp: &BasisPair,
    d: usize,
) -> Result<Factored<ComplexMatrix>, CliError> {
    let Some(factors) = bp.factors() else {
        return Ok(Factored::Global(effect(spec, bp)?));
    };
    if let Some(rest) = spec.strip_prefix("file:") {
        let m: ComplexMatrix = load(&file_path(rest))?;
        if m.rows() != d || factors.len() == 1 {
            return Ok(Factored::Global(effect(spec, bp)?));
        }
    }
    factors
        .iter()
        .map(|factor| effect(spec, &BasisPair::from_factors(vec![factor.clone()])?))
        .collect::<Result<Vec<_>, _>>()
        .map(Factored::Local)
}

/// Unitary on d^n; named gates act identically on every qudit.
pub fn gate(spec: &str, d: usize, n: usize) -> Result<ComplexMatrix, CliError> {
    let local = match spec {
        "qft" => Some(qft_matrix(d)),
        "hadamard" => {
            if d != 2 {
                return Err(usage("the hadamard gate needs --d 2"));
            }
            Some(hadamard())
        }
        "shift" => Some(shift(d)),
        "clock" => Some(clock(d)),
        "identity" => Some(ComplexMatrix::identity(d)),
        _ => None,
    };
    if let Some(m) = local {
        return Ok(ComplexMatrix::kron_all(&vec![m; n])?);
    }
    let dim = checked_pow(d, n)?;
    if let Some(rest) = spec.strip_prefix("random:") {
        return Ok(random_unitary(dim, parse_seed(spec, rest)?));
    }
    if let Some(rest) = spec.strip_prefix("file:") {
        let m: ComplexMatrix = load(&file_path(rest))?;
        check_dim(m.rows(), dim)?;
        return Ok(m);
    }
    Err(usage(format!("unknown gate spec `{spec}`")))
}

pub fn kraus(path: &Path) -> Result<Vec<ComplexMatrix>, CliError> {
    load(path)
}
