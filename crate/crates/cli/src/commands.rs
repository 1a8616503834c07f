use kdq::algebra::set_dimension_cap;
use kdq::bounds::{
    check_bounds, default_phases, enumerate_positive_states, mub_uniformity, BoundReport,
    Uniformity,
};
use kdq::cycle::{
    estimate_quasiprobability, estimate_superop_element, superop_registers, Denominator,
};
use kdq::kd::{build_kd, build_kd_pure, marginals, BasisPair, KdDist};
use kdq::sampler::{hoeffding_samples, Circuit, EstimateConfig, NegativityBudget, SamplingProblem};
use kdq::spectral::{
    convolution_residual, hat_dft, hermiticity_residual, kd_to_wigner_with_tol,
    self_similarity_residual,
};
use kdq::superop::{
    generalized_permutation_certificate, is_stochastic, preserves_positivity_on,
    superop_from_kraus, superop_from_unitary, GenPermCertificate, KdSuperop,
};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::args::*;
use crate::error::CliError;
use crate::output::{emit, load, Table};
use crate::specs::{self, Factored};

type Res = Result<(), CliError>;

pub fn run(cli: &Cli) -> Res {
    set_dimension_cap(cli.dim_cap);
    match &cli.command {
        Command::Kd(KdCommand::Build(a)) => kd_build(cli, a),
        Command::Kd(KdCommand::Evolve(a)) => kd_evolve(cli, a),
        Command::Kd(KdCommand::Marginals(a)) => kd_marginals(cli, a),
        Command::Superop(SuperopCommand::Build(a)) => superop_build(cli, a),
        Command::Superop(SuperopCommand::Classify(a)) => superop_classify(cli, a),
        Command::Simulate(SimulateCommand::Estimate(a)) => simulate_estimate(cli, a),
        Command::Simulate(SimulateCommand::Budget(a)) => simulate_budget(cli, a),
        Command::Spectral(SpectralCommand::Selfsim(a)) => spectral_selfsim(cli, a),
        Command::Spectral(SpectralCommand::Wigner(a)) => spectral_wigner(cli, a),
        Command::Verify(VerifyCommand::Bounds(a)) => verify_bounds(cli, a),
        Command::Verify(VerifyCommand::Hermiticity(a)) => verify_hermiticity(cli, a),
        Command::Cycle(CycleCommand::Run(a)) => cycle_run(cli, a),
    }
}

fn space_basis(space: &SpaceArgs) -> Result<BasisPair, CliError> {
    specs::basis(&space.v, specs::require_d(space.d)?, space.n)
}

/// Distribution from --dist, or built from --state; --d defaults to the
/// distribution's dimension with n = 1.
fn source(args: &SourceArgs) -> Result<(KdDist, BasisPair), CliError> {
    match (&args.dist, &args.state) {
        (Some(path), _) => {
            let q: KdDist = load(path)?;
            let (d, n) = match args.space.d {
                Some(d) => (d, args.space.n),
                None => (q.dim(), 1),
            };
            let bp = specs::basis(&args.space.v, d, n)?;
            if bp.dim() != q.dim() {
                return Err(CliError::Kd(kdq::KdError::DimensionMismatch {
                    expected: bp.dim(),
                    found: q.dim(),
                }));
            }
            Ok((q, bp))
        }
        (None, Some(state)) => {
            let bp = space_basis(&args.space)?;
            let rho = specs::density(state, &bp)?;
            Ok((build_kd(&rho, &bp)?, bp))
        }
        (None, None) => Err(CliError::Usage(
            "one of --dist or --state is required".into(),
        )),
    }
}

fn complex_table(header: &'static str, dim: usize, get: impl Fn(usize, usize) -> C64) -> Table {
    let mut t = Table::new(header);
    for i in 0..dim {
        for j in 0..dim {
            let z = get(i, j);
            t.push(format!("{i},{j},{},{}", z.re, z.im));
        }
    }
    t
}

fn kd_table(q: &KdDist) -> Table {
    complex_table("i,j,re,im", q.dim(), |i, j| q.get(i, j))
}

fn kd_build(cli: &Cli, a: &KdBuildArgs) -> Res {
    let bp = space_basis(&a.space)?;
    let q = build_kd(&specs::density(&a.state, &bp)?, &bp)?;
    emit(cli, "kd build", a, &q, Some(kd_table(&q)))
}

fn operation(
    op: &OperationArgs,
    bp: &BasisPair,
    d: usize,
    n: usize,
) -> Result<KdSuperop, CliError> {
    match (&op.u, &op.kraus) {
        (Some(u), None) => Ok(superop_from_unitary(&specs::gate(u, d, n)?, bp)?),
        (None, Some(path)) => {
            let kraus = specs::kraus(path)?;
            let residual = kdq::superop::channel_residual(&kraus)?;
            if residual > op.channel_tol {
                return Err(CliError::Kd(kdq::KdError::NotAChannel { residual }));
            }
            Ok(superop_from_kraus(&kraus, bp)?)
        }
        _ => Err(CliError::Usage(
            "exactly one of --u or --kraus is required".into(),
        )),
    }
}

/// Local dimension and qudit count implied by the space flags or the basis.
fn layout(space: &SpaceArgs, bp: &BasisPair) -> (usize, usize) {
    match space.d {
        Some(d) => (d, space.n),
        None => (bp.dim(), 1),
    }
}

fn kd_evolve(cli: &Cli, a: &KdEvolveArgs) -> Res {
    let (q, bp) = source(&a.source)?;
    let (d, n) = layout(&a.source.space, &bp);
    let out = operation(&a.op, &bp, d, n)?.apply(&q)?;
    emit(cli, "kd evolve", a, &out, Some(kd_table(&out)))
}

fn kd_marginals(cli: &Cli, a: &SourceArgs) -> Res {
    let (q, _) = source(a)?;
    let m = marginals(&q);
    let mut t = Table::new("basis,index,probability");
    for (basis, probs) in [("a", &m.probs_a), ("b", &m.probs_b)] {
        for (k, p) in probs.iter().enumerate() {
            t.push(format!("{basis},{k},{p}"));
        }
    }
    emit(cli, "kd marginals", a, &m, Some(t))
}

fn superop_build(cli: &Cli, a: &SuperopBuildArgs) -> Res {
    let bp = space_basis(&a.space)?;
    let (d, n) = layout(&a.space, &bp);
    let e = operation(&a.op, &bp, d, n)?;
    let m = e.matrix();
    let table = complex_table("row,col,re,im", m.rows(), |r, c| m.row(r)[c]);
    emit(cli, "superop build", a, &e, Some(table))
}

#[derive(Serialize)]
struct Classification {
    stochastic: bool,
    gen_perm: bool,
    positivity_preserving_on_fixture: bool,
    fixture_states: usize,
    induced_l1: f64,
    certificate: Option<GenPermCertificate>,
}

/// Enumerated positive pure states, or the basis states when the search is too large.
fn positivity_fixture(bp: &BasisPair, d: usize) -> Result<Vec<KdDist>, CliError> {
    let states = match enumerate_positive_states(bp, &default_phases(d)) {
        Ok(states) => states,
        Err(kdq::KdError::InvalidArgument(_)) => (0..bp.dim())
            .flat_map(|k| [bp.a_state(k), bp.b_state(k)])
            .collect(),
        Err(e) => return Err(e.into()),
    };
    Ok(states
        .iter()
        .map(|psi| build_kd_pure(psi, bp))
        .collect::<kdq::Result<_>>()?)
}

fn superop_classify(cli: &Cli, a: &ClassifyArgs) -> Res {
    let bp = space_basis(&a.space)?;
    let (d, n) = layout(&a.space, &bp);
    let u = specs::gate(&a.u, d, n)?;
    let e = superop_from_unitary(&u, &bp)?;
    let certificate = generalized_permutation_certificate(&u, &bp, a.perm_tol)?;
    let fixture = positivity_fixture(&bp, d)?;
    let result = Classification {
        stochastic: is_stochastic(&e, a.stochastic_tol),
        gen_perm: certificate.is_some(),
        positivity_preserving_on_fixture: preserves_positivity_on(&e, &fixture, a.positivity_tol)?,
        fixture_states: fixture.len(),
        induced_l1: e.induced_l1(),
        certificate,
    };
    let mut t = Table::new("stochastic,gen_perm,positivity_preserving_on_fixture,induced_l1");
    t.push(format!(
        "{},{},{},{}",
        result.stochastic,
        result.gen_perm,
        result.positivity_preserving_on_fixture,
        result.induced_l1
    ));
    emit(cli, "superop classify", a, &result, Some(t))
}

fn full_density(
    f: Factored<kdq::algebra::DensityMatrix>,
) -> Result<kdq::algebra::DensityMatrix, CliError> {
    Ok(match f {
        Factored::Global(r) => r,
        Factored::Local(rs) => {
            let mut it = rs.into_iter();
            let first = it
                .next()
                .ok_or_else(|| CliError::Usage("empty register".into()))?;
            it.try_fold(first, |acc, r| acc.tensor(&r))?
        }
    })
}

fn full_effect(
    f: Factored<kdq::algebra::ComplexMatrix>,
) -> Result<kdq::algebra::ComplexMatrix, CliError> {
    Ok(match f {
        Factored::Global(m) => m,
        Factored::Local(ms) => kdq::algebra::ComplexMatrix::kron_all(&ms)?,
    })
}

fn problem(p: &ProblemArgs) -> Result<SamplingProblem, CliError> {
    let circuit: Circuit = load(&p.circuit)?;
    let (d, n) = (circuit.d(), circuit.n());
    let bp = specs::basis(&p.v, d, n)?;
    let rho = specs::factored_density(&p.state, &bp, d, n)?;
    let f = specs::factored_effect(&p.povm, &bp, d)?;
    Ok(match (bp.factors().is_some(), rho, f) {
        (true, Factored::Local(rs), Factored::Local(fs)) => {
            SamplingProblem::product(&circuit, &bp, &rs, &fs)?
        }
        (_, rho, f) => {
            SamplingProblem::global(&circuit, &bp, &full_density(rho)?, &full_effect(f)?)?
        }
    })
}

fn simulate_estimate(cli: &Cli, a: &EstimateArgs) -> Res {
    let problem = problem(&a.problem)?;
    let config = EstimateConfig {
        sample_cap: a.sample_cap,
        lanes: a.lanes.max(1),
    };
    let mut report = kdq::sampler::estimate_born(&problem, a.epsilon, a.delta, a.seed, config)?;
    if a.exact {
        report.exact = Some(problem.exact_value()?.re);
    }
    let mut t = Table::new(kdq::sampler::EstimateReport::CSV_HEADER);
    t.push(report.to_csv_row());
    emit(cli, "simulate estimate", a, &report, Some(t))
}

#[derive(Serialize)]
struct BudgetReport {
    budget: NegativityBudget,
    path_count: f64,
    required_samples: f64,
}

fn simulate_budget(cli: &Cli, a: &BudgetArgs) -> Res {
    let problem = problem(&a.problem)?;
    let budget = problem.negativity_budget();
    let required_samples = hoeffding_samples(a.epsilon, a.delta, budget.n_t).ceil();
    let mut t = Table::new("gate,norm");
    for (k, g) in budget.gate_norms.iter().enumerate() {
        t.push(format!("{k},{g}"));
    }
    let result = BudgetReport {
        path_count: problem.path_count(),
        required_samples,
        budget,
    };
    emit(cli, "simulate budget", a, &result, Some(t))
}

#[derive(Serialize)]
struct SelfSimReport {
    self_similarity_residual: f64,
    convolution_residual: f64,
    hermiticity_residual: f64,
}

fn spectral_selfsim(cli: &Cli, a: &SourceArgs) -> Res {
    let (q, bp) = source(a)?;
    let qhat = hat_dft(&q, &bp)?;
    let result = SelfSimReport {
        self_similarity_residual: self_similarity_residual(&qhat),
        convolution_residual: convolution_residual(&q, &bp)?,
        hermiticity_residual: hermiticity_residual(&q, &bp)?,
    };
    let table = complex_table("x,y,re,im", qhat.dim(), |x, y| qhat.get(x, y));
    emit(cli, "spectral selfsim", a, &result, Some(table))
}

fn spectral_wigner(cli: &Cli, a: &WignerArgs) -> Res {
    let (q, bp) = source(&a.source)?;
    let w = kd_to_wigner_with_tol(&q, &bp, a.imag_tol)?;
    let dim = w.as_slice().len().isqrt();
    let mut t = Table::new("p,q,w");
    for p in 0..dim {
        for qq in 0..dim {
            t.push(format!("{p},{qq},{}", w.get(p, qq)));
        }
    }
    emit(cli, "spectral wigner", a, &w, Some(t))
}

#[derive(Serialize)]
struct BoundsOutput {
    bounds: BoundReport,
    /// Present when the basis pair is mutually unbiased.
    uniformity: Option<Uniformity>,
}

fn verify_bounds(cli: &Cli, a: &BoundsArgs) -> Res {
    let bp = space_basis(&a.space)?;
    let psi = specs::pure_state(&a.state, &bp)?;
    let bounds = check_bounds(&psi, &bp)?;
    let uniformity = if bp.is_mub(a.mub_tol) {
        Some(mub_uniformity(&psi, &bp, a.mub_tol)?)
    } else {
        None
    };
    let mut t = Table::new(
        "max_abs_q,upper_bound,upper_satisfied,min_nonzero_q,lower_bound,lower_satisfied",
    );
    t.push(format!(
        "{},{},{},{},{},{}",
        bounds.max_abs_q,
        bounds.upper_bound,
        bounds.upper_satisfied,
        bounds.min_nonzero_q,
        bounds.lower_bound,
        bounds.lower_satisfied
    ));
    emit(
        cli,
        "verify bounds",
        a,
        &BoundsOutput { bounds, uniformity },
        Some(t),
    )
}

#[derive(Serialize)]
struct HermiticityReport {
    residual: f64,
    hermitian: bool,
}

fn verify_hermiticity(cli: &Cli, a: &HermiticityArgs) -> Res {
    let (q, bp) = source(&a.source)?;
    let residual = hermiticity_residual(&q, &bp)?;
    let result = HermiticityReport {
        residual,
        hermitian: residual <= a.tol,
    };
    let mut t = Table::new("residual,hermitian");
    t.push(format!("{},{}", result.residual, result.hermitian));
    emit(cli, "verify hermiticity", a, &result, Some(t))
}

#[derive(Serialize)]
#[serde(untagged)]
enum CycleResult<T: Serialize> {
    Part {
        part: &'static str,
        report: kdq::cycle::ShotReport,
        exact: f64,
    },
    Full {
        estimate: T,
        exact: C64,
    },
}

fn cycle_run(cli: &Cli, a: &CycleArgs) -> Res {
    let bp = space_basis(&a.space)?;
    let (d, n) = layout(&a.space, &bp);
    let mut t = Table::new("part,estimate,stderr,exact,zeros,ones");
    if let (Some(k), Some(l), Some(u)) = (a.k, a.l, &a.u) {
        let u = specs::gate(u, d, n)?;
        let index = (a.i, a.j, k, l);
        superop_registers(&u, index, &bp)?;
        let mode = match a.denominator {
            DenominatorArg::Exact => Denominator::Exact,
            DenominatorArg::Swap => Denominator::SwapTest,
        };
        let est = estimate_superop_element(&u, index, &bp, a.shots, a.seed, mode)?;
        let exact = superop_from_unitary(&u, &bp)?.element(a.i, a.j, k, l);
        let scale = bp.overlap(k, l).norm_sqr();
        let numerator = &est.numerator;
        for (part, r, x) in [
            ("re", &numerator.real_part, exact.re * scale),
            ("im", &numerator.imag_part, exact.im * scale),
        ] {
            t.push(format!(
                "{part},{},{},{x},{},{}",
                r.estimate, r.stderr, r.zeros, r.ones
            ));
        }
        return match a.s {
            PartArg::Both => emit(
                cli,
                "cycle run",
                a,
                &CycleResult::Full {
                    estimate: est,
                    exact,
                },
                Some(t),
            ),
            part => {
                let (name, report, x) = pick(
                    part,
                    numerator.real_part.clone(),
                    numerator.imag_part.clone(),
                    exact * scale,
                );
                emit(
                    cli,
                    "cycle run",
                    a,
                    &CycleResult::<()>::Part {
                        part: name,
                        report,
                        exact: x,
                    },
                    Some(t),
                )
            }
        };
    }
    let state = a
        .state
        .as_deref()
        .ok_or_else(|| CliError::Usage("--state is required for Q_ij".into()))?;
    let rho = specs::density(state, &bp)?;
    let est = estimate_quasiprobability(&rho, a.i, a.j, &bp, a.shots, a.seed)?;
    let exact = build_kd(&rho, &bp)?.get(a.i, a.j);
    for (part, r, x) in [
        ("re", &est.real_part, exact.re),
        ("im", &est.imag_part, exact.im),
    ] {
        t.push(format!(
            "{part},{},{},{x},{},{}",
            r.estimate, r.stderr, r.zeros, r.ones
        ));
    }
    match a.s {
        PartArg::Both => emit(
            cli,
            "cycle run",
            a,
            &CycleResult::Full {
                estimate: est,
                exact,
            },
            Some(t),
        ),
        part => {
            let (name, report, x) = pick(part, est.real_part.clone(), est.imag_part.clone(), exact);
            emit(
                cli,
                "cycle run",
                a,
                &CycleResult::<()>::Part {
                    part: name,
                    report,
                    exact: x,
                },
                Some(t),
            )
        }
    }
}

fn pick(
    part: PartArg,
    re: kdq::cycle::ShotReport,
    im: kdq::cycle::ShotReport,
    exact: C64,
) -> (&'static str, kdq::cycle::ShotReport, f64) {
    match part {
        PartArg::Im => ("im", im, exact.im),
        _ => ("re", re, exact.re),
    }
}
