use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kdq::algebra::DEFAULT_DIMENSION_CAP;
use kdq::bounds::MUB_TOL;
use kdq::kd::POSITIVITY_TOL;
use kdq::sampler::{DEFAULT_LANES, DEFAULT_SAMPLE_CAP};
use kdq::spectral::WIGNER_IMAG_TOL;
use kdq::superop::{CHANNEL_TOL, PERMUTATION_TOL};
use serde::Serialize;

const SPEC_HELP: &str = "Basis specs: qft, hadamard, random:<seed>, file:<path>. \
State specs: a<i>, b<j>, mixed, mixed:<seed>, random:<seed>, file:<path>. \
Gate specs: qft, hadamard, shift, clock, identity, random:<seed>, file:<path>.";

#[derive(Parser, Debug)]
#[command(
    name = "kdq",
    version,
    about = "Kirkwood-Dirac quasiprobability toolkit",
    after_help = SPEC_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Largest Hilbert-space dimension accepted by constructors.
    #[arg(long, global = true, env = "KDQ_DIM_CAP", default_value_t = DEFAULT_DIMENSION_CAP)]
    pub dim_cap: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build, evolve and inspect KD distributions.
    #[command(subcommand)]
    Kd(KdCommand),
    /// Build and classify KD superoperators.
    #[command(subcommand)]
    Superop(SuperopCommand),
    /// Monte Carlo estimation of Born probabilities.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Fourier self-similarity and the discrete Wigner function.
    #[command(subcommand)]
    Spectral(SpectralCommand),
    /// Magnitude bounds and state-validity checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Simulated cycle-test measurements.
    #[command(subcommand)]
    Cycle(CycleCommand),
}

#[derive(Subcommand, Debug)]
pub enum KdCommand {
    /// KD distribution of a state.
    Build(KdBuildArgs),
    /// Apply a unitary or channel to a distribution.
    Evolve(KdEvolveArgs),
    /// Basis-A and basis-B marginals.
    Marginals(SourceArgs),
}

#[derive(Subcommand, Debug)]
pub enum SuperopCommand {
    Build(SuperopBuildArgs),
    /// Stochasticity, generalized-permutation certificate and positivity witness.
    Classify(ClassifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Sample paths until the Hoeffding budget for (epsilon, delta) is met.
    Estimate(EstimateArgs),
    /// Negativity budget and required sample count without sampling.
    Budget(BudgetArgs),
}

#[derive(Subcommand, Debug)]
pub enum SpectralCommand {
    /// Self-similarity, convolution and Hermiticity residuals (QFT basis).
    Selfsim(SourceArgs),
    /// Discrete Wigner function (odd d, QFT basis).
    Wigner(WignerArgs),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Support-size bounds and MUB uniformity for a pure state.
    Bounds(BoundsArgs),
    /// Whether a distribution belongs to a Hermitian operator.
    Hermiticity(HermiticityArgs),
}

#[derive(Subcommand, Debug)]
pub enum CycleCommand {
    /// Estimate Q_ij, or a superoperator element when --k, --l and --u are given.
    Run(CycleArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpaceArgs {
    /// Local dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of qudits.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Basis pair spec.
    #[arg(long, default_value = "qft")]
    pub v: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SourceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    /// State spec; ignored when --dist is given.
    #[arg(long)]
    pub state: Option<String>,
    /// Previously written KD distribution.
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KdBuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub state: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OperationArgs {
    /// Gate spec for a unitary.
    #[arg(long, conflicts_with = "kraus")]
    pub u: Option<String>,
    /// JSON array of Kraus matrices.
    #[arg(long)]
    pub kraus: Option<PathBuf>,
    /// Allowed deviation of Σ K†K from the identity.
    #[arg(long, default_value_t = CHANNEL_TOL)]
    pub channel_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KdEvolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperationArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SuperopBuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperationArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub u: String,
    /// Entry tolerance for stochasticity.
    #[arg(long, default_value_t = 1e-10)]
    pub stochastic_tol: f64,
    /// A column entry of modulus ≥ 1 − tol marks a permutation.
    #[arg(long, default_value_t = PERMUTATION_TOL)]
    pub perm_tol: f64,
    #[arg(long, default_value_t = POSITIVITY_TOL)]
    pub positivity_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProblemArgs {
    /// Circuit JSON: {"d", "n", "gates": [{"targets", "u"}]}.
    #[arg(long)]
    pub circuit: PathBuf,
    /// Basis pair spec, applied per qudit.
    #[arg(long, default_value = "qft")]
    pub v: String,
    /// Input state spec, applied per qudit.
    #[arg(long, default_value = "a0")]
    pub state: String,
    /// Measured effect: a<i>, b<j>, identity or file:<path>, applied per qudit.
    #[arg(long, default_value = "a0")]
    pub povm: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent RNG streams; results depend on (seed, lanes).
    #[arg(long, default_value_t = DEFAULT_LANES)]
    pub lanes: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_CAP)]
    pub sample_cap: u64,
    /// Also compute the exact value by dense propagation.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BudgetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WignerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Largest imaginary part tolerated before the table is rejected.
    #[arg(long, default_value_t = WIGNER_IMAG_TOL)]
    pub imag_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    /// Pure state spec.
    #[arg(long)]
    pub state: String,
    #[arg(long, default_value_t = MUB_TOL)]
    pub mub_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HermiticityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartArg {
    Re,
    Im,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DenominatorArg {
    Exact,
    Swap,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CycleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    /// State spec; required for Q_ij.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    #[arg(long, requires_all = ["l", "u"])]
    pub k: Option<usize>,
    #[arg(long, requires_all = ["k", "u"])]
    pub l: Option<usize>,
    /// Gate spec for superoperator elements.
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Which part of the invariant to measure.
    #[arg(long, value_enum, default_value_t = PartArg::Both)]
    pub s: PartArg,
    #[arg(long, value_enum, default_value_t = DenominatorArg::Exact)]
    pub denominator: DenominatorArg,
}
