//! Acceptance gate. Runs every criterion, prints one line each, and exits
//! nonzero if any criterion misses its tolerance or its wall-clock budget.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use kdq::algebra::random::{
    random_density_matrix, random_hermitian, random_kraus, random_permutation_with,
    random_pure_state, random_unitary, rng_from_seed,
};
use kdq::algebra::{
    hadamard, permutation_matrix, qft_matrix, wh_x, wh_z, ComplexMatrix, DensityMatrix, PureState,
    QuditIndexVector,
};
use kdq::bounds::{
    check_bounds, default_phases, enumerate_positive_states, kd_inner_product, mub_uniformity,
    support_overlap, MUB_TOL,
};
use kdq::cycle::{
    analytic_p0, estimate_quasiprobability, estimate_superop_element, statevector_p0, Denominator,
    PhaseFlag,
};
use kdq::kd::{build_kd, build_kd_pure, is_kd_positive, reconstruct_rho, BasisPair, KdDist};
use kdq::sampler::{
    embed_gate, estimate_born, hoeffding_samples, Circuit, EstimateConfig, SamplingProblem,
};
use kdq::spectral::{
    hat_dft, hermiticity_residual, kd_to_wigner, self_similarity_residual,
    wigner_from_phase_points, wigner_imaginary_residue, wigner_to_kd,
};
use kdq::superop::{
    born_exact_complex, dual_vector, generalized_permutation_certificate, is_stochastic,
    superop_from_kraus, superop_from_unitary, KdSuperop,
};
use num_complex::Complex64 as C64;
use rand::Rng;

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn projector(psi: &PureState) -> ComplexMatrix {
    psi.projector()
}

fn random_phase<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=5 {
        for t in 0..100u64 {
            let seed = 1000 * d as u64 + t;
            let rho = random_density_matrix(d, seed);
            let bp = BasisPair::new(random_unitary(d, seed ^ 0xabcd)).unwrap();
            let q = build_kd(&rho, &bp).unwrap();
            let back = reconstruct_rho(&q, &bp).unwrap();
            worst = worst.max(back.matrix().max_abs_diff(rho.matrix()));
        }
    }
    outcome(worst <= 1e-10, format!("worst ‖ρ' − ρ‖_max = {worst:.2e}"))
}

fn criterion_2() -> Outcome {
    let (mut evo, mut cols, mut tr) = (0.0f64, 0.0f64, 0.0f64);
    for d in 2..=3 {
        for t in 0..50u64 {
            let seed = 2000 * d as u64 + t;
            let kraus = if t % 2 == 0 {
                vec![random_unitary(d, seed)]
            } else {
                random_kraus(d, 1 + (t as usize / 2) % 3, seed)
            };
            let bp = BasisPair::new(random_unitary(d, seed + 7)).unwrap();
            let e = superop_from_kraus(&kraus, &bp).unwrap();
            let rho = random_density_matrix(d, seed + 13);
            let lhs = e.apply(&build_kd(&rho, &bp).unwrap()).unwrap();
            let rhs = build_kd(&rho.apply_kraus(&kraus).unwrap(), &bp).unwrap();
            evo = evo.max(lhs.max_abs_diff(&rhs));
            cols = cols.max(e.column_sum_residual());
            let expected: f64 = kraus.iter().map(|k| k.trace().norm_sqr()).sum();
            tr = tr.max((e.trace() - C64::new(expected, 0.0)).norm());
        }
    }
    outcome(
        evo <= 1e-10 && cols <= 1e-10 && tr <= 1e-9,
        format!("evolution {evo:.2e}, column sums {cols:.2e}, trace {tr:.2e}"),
    )
}

/// Unitaries mixing known generalized permutations with generic ones.
fn criterion_3_fixture(d: usize, seed: u64) -> Vec<ComplexMatrix> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let z = wh_z(&QuditIndexVector::new(d, vec![a]).unwrap());
            let x = wh_x(&QuditIndexVector::new(d, vec![b]).unwrap());
            out.push(x.matmul(&z).unwrap().scale(random_phase(&mut rng)));
        }
    }
    for c in (1..d).filter(|c| gcd(*c, d) == 1) {
        let perm: Vec<usize> = (0..d).map(|x| (c * x) % d).collect();
        out.push(permutation_matrix(&perm).unwrap());
    }
    for _ in 0..10 {
        let perm = random_permutation_with(&mut rng, d);
        let p = permutation_matrix(&perm).unwrap();
        let phases: Vec<C64> = (0..d).map(|_| random_phase(&mut rng)).collect();
        out.push(p.matmul(&ComplexMatrix::diagonal(&phases)).unwrap());
    }
    for _ in 0..5 {
        let phases: Vec<C64> = (0..d).map(|_| random_phase(&mut rng)).collect();
        out.push(ComplexMatrix::diagonal(&phases));
    }
    out.push(qft_matrix(d));
    out.push(qft_matrix(d).adjoint());
    if d == 2 {
        out.push(hadamard());
    }
    for t in 0..12 {
        out.push(random_unitary(d, seed + 100 + t));
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion_3() -> Outcome {
    let (mut total, mut certified, mut disagreements) = (0, 0, 0);
    let mut worst_cert = 0.0f64;
    for d in 2..=3 {
        for (v, vname) in [
            (qft_matrix(d), "qft"),
            (random_unitary(d, 31 + d as u64), "random"),
        ] {
            let bp = BasisPair::new(v).unwrap();
            for u in criterion_3_fixture(d, 300 + d as u64) {
                total += 1;
                let e = superop_from_unitary(&u, &bp).unwrap();
                let cert = generalized_permutation_certificate(&u, &bp, 1e-8).unwrap();
                if is_stochastic(&e, 1e-10) != cert.is_some() {
                    disagreements += 1;
                    eprintln!("  disagreement at d={d}, V={vname}");
                }
                if let Some(c) = cert {
                    certified += 1;
                    let p = c.permutation_superop();
                    worst_cert = worst_cert.max(e.matrix().max_abs_diff(p.matrix()));
                }
            }
        }
    }
    outcome(
        disagreements == 0 && certified > 0 && total >= 50 && worst_cert <= 1e-10,
        format!(
            "{total} unitaries, {certified} certified, {disagreements} disagreements, \
             certificate residual {worst_cert:.2e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let bp = BasisPair::qft(3, 1).unwrap();
    let e = superop_from_unitary(&qft_matrix(3), &bp).unwrap();
    let mut all_positive = true;
    for k in 0..3 {
        for psi in [bp.a_state(k), bp.b_state(k)] {
            let out = e.apply(&build_kd_pure(&psi, &bp).unwrap()).unwrap();
            all_positive &= is_kd_positive(&out, 1e-10);
        }
    }
    let stochastic = is_stochastic(&e, 1e-10);
    let norm = e.induced_l1();
    outcome(
        all_positive && !stochastic && norm > 1.1,
        format!(
            "basis outputs positive: {all_positive}, stochastic: {stochastic}, ‖Ê‖₁ = {norm:.4}"
        ),
    )
}

struct Instance {
    name: &'static str,
    problem: SamplingProblem,
    exact: C64,
}

/// Dense oracle: propagate the full KD vector through full-space superoperators.
fn dense_oracle(
    circuit: &Circuit,
    bp: &BasisPair,
    rho: &DensityMatrix,
    f: &ComplexMatrix,
) -> (C64, C64) {
    let ops: Vec<KdSuperop> = circuit
        .gates()
        .iter()
        .map(|g| {
            let full = embed_gate(&g.u, &g.targets, circuit.d(), circuit.n()).unwrap();
            superop_from_unitary(&full, bp).unwrap()
        })
        .collect();
    let kd = born_exact_complex(
        &dual_vector(f, bp).unwrap(),
        &ops,
        &build_kd(rho, bp).unwrap(),
    )
    .unwrap();
    let direct = rho
        .evolve(&circuit.unitary().unwrap())
        .unwrap()
        .expectation(f)
        .unwrap();
    (kd, direct)
}

fn product_instance(
    name: &'static str,
    circuit: Circuit,
    factors: Vec<ComplexMatrix>,
    seed: u64,
) -> Instance {
    let (d, n) = (circuit.d(), circuit.n());
    let bp = BasisPair::from_factors(factors).unwrap();
    let rhos: Vec<DensityMatrix> = (0..n)
        .map(|q| random_density_matrix(d, seed + q as u64))
        .collect();
    let fs: Vec<ComplexMatrix> = (0..n)
        .map(|q| random_hermitian(d, seed + 50 + q as u64))
        .collect();
    let rho = rhos
        .iter()
        .skip(1)
        .fold(rhos[0].clone(), |acc, r| acc.tensor(r).unwrap());
    let f = ComplexMatrix::kron_all(&fs).unwrap();
    let (exact, direct) = dense_oracle(&circuit, &bp, &rho, &f);
    assert!(
        (exact - direct).norm() < 1e-10,
        "{name}: KD oracle disagrees with direct trace"
    );
    let problem = SamplingProblem::product(&circuit, &bp, &rhos, &fs).unwrap();
    Instance {
        name,
        problem,
        exact,
    }
}

fn cnot() -> ComplexMatrix {
    permutation_matrix(&[0, 1, 3, 2]).unwrap()
}

fn sampler_instances() -> Vec<Instance> {
    let mut out = Vec::new();

    let mut c = Circuit::empty(2, 1).unwrap();
    for s in 0..3 {
        c.push(vec![0], random_unitary(2, 500 + s)).unwrap();
    }
    out.push(product_instance(
        "qubit, three random gates",
        c,
        vec![hadamard()],
        510,
    ));

    let mut c = Circuit::empty(3, 1).unwrap();
    c.push(vec![0], qft_matrix(3)).unwrap();
    c.push(vec![0], random_unitary(3, 520)).unwrap();
    c.push(vec![0], random_unitary(3, 521)).unwrap();
    out.push(product_instance(
        "qutrit, QFT and random gates",
        c,
        vec![qft_matrix(3)],
        530,
    ));

    let mut c = Circuit::empty(2, 2).unwrap();
    c.push(vec![0], hadamard()).unwrap();
    c.push(vec![0, 1], cnot()).unwrap();
    out.push(product_instance(
        "two qubits, H then CNOT",
        c,
        vec![hadamard(), hadamard()],
        540,
    ));

    let mut c = Circuit::empty(2, 2).unwrap();
    c.push(vec![1, 0], random_unitary(4, 550)).unwrap();
    c.push(vec![1], random_unitary(2, 551)).unwrap();
    c.push(vec![0, 1], random_unitary(4, 552)).unwrap();
    out.push(product_instance(
        "two qubits, random V and gates",
        c,
        vec![random_unitary(2, 553), random_unitary(2, 554)],
        560,
    ));

    let mut c = Circuit::empty(3, 2).unwrap();
    c.push(vec![0, 1], random_unitary(9, 570)).unwrap();
    c.push(vec![1], qft_matrix(3)).unwrap();
    out.push(product_instance(
        "two qutrits, entangling gate",
        c,
        vec![qft_matrix(3), qft_matrix(3)],
        580,
    ));

    let mut c = Circuit::empty(2, 3).unwrap();
    c.push(vec![0], hadamard()).unwrap();
    c.push(vec![0, 1], cnot()).unwrap();
    c.push(vec![1, 2], cnot()).unwrap();
    out.push(product_instance(
        "three qubits, GHZ preparation",
        c,
        vec![hadamard(), hadamard(), hadamard()],
        590,
    ));

    let mut c = Circuit::empty(2, 2).unwrap();
    c.push(vec![0, 1], random_unitary(4, 600)).unwrap();
    c.push(vec![1], hadamard()).unwrap();
    let bp = BasisPair::new(random_unitary(4, 601)).unwrap();
    let rho = random_density_matrix(4, 602);
    let f = random_hermitian(4, 603);
    let (exact, direct) = dense_oracle(&c, &bp, &rho, &f);
    assert!((exact - direct).norm() < 1e-10);
    out.push(Instance {
        name: "entangled basis, global fallback",
        problem: SamplingProblem::global(&c, &bp, &rho, &f).unwrap(),
        exact,
    });
    out
}

fn criterion_5() -> Outcome {
    let (mut worst_sum, mut worst_excess, mut checked) = (0.0f64, f64::NEG_INFINITY, 0usize);
    let mut ok = true;
    for (idx, inst) in sampler_instances().into_iter().enumerate() {
        let paths = inst.problem.path_count();
        if paths > 1e5 {
            eprintln!("  skipped {}: {paths} paths", inst.name);
            continue;
        }
        checked += 1;
        let sum = inst.problem.exhaustive_path_sum(1e5).unwrap();
        let err = (sum - inst.exact).norm();
        worst_sum = worst_sum.max(err);
        if err > 1e-12 {
            ok = false;
            eprintln!("  {}: path sum off by {err:.2e}", inst.name);
        }
        let n_t = inst.problem.negativity_budget().n_t;
        let mut rng = rng_from_seed(700 + idx as u64);
        for _ in 0..20_000 {
            let z = inst.problem.sample_path(&mut rng).z.norm();
            worst_excess = worst_excess.max(z - n_t);
        }
    }
    ok &= worst_excess <= 1e-9 && checked >= 6;
    outcome(
        ok,
        format!(
            "{checked} instances, worst path-sum error {worst_sum:.2e}, max |z| − N_T = {worst_excess:.2e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut c = Circuit::empty(2, 2).unwrap();
    c.push(vec![0], hadamard()).unwrap();
    c.push(vec![0, 1], cnot()).unwrap();
    let bp = BasisPair::from_factors(vec![hadamard(), hadamard()]).unwrap();
    let zero = PureState::basis(2, 0).unwrap();
    let rhos = vec![zero.to_density(), zero.to_density()];
    let fs = vec![projector(&zero), projector(&zero)];
    let problem = SamplingProblem::product(&c, &bp, &rhos, &fs).unwrap();
    let exact = problem.exact_value().unwrap().re;
    let (eps, delta) = (0.1, 0.1);
    let n_t = problem.negativity_budget().n_t;
    let expected_samples = hoeffding_samples(eps, delta, n_t).ceil() as u64;
    let mut hits = 0;
    let mut samples_ok = true;
    for seed in 0..200u64 {
        let report = estimate_born(&problem, eps, delta, seed, EstimateConfig::default()).unwrap();
        samples_ok &= report.samples_used == expected_samples;
        if (report.estimate - exact).abs() <= eps {
            hits += 1;
        }
    }
    let rate = hits as f64 / 200.0;
    outcome(
        rate >= 0.85 && samples_ok && (exact - 0.5).abs() < 1e-12,
        format!(
            "N_T = {n_t}, {expected_samples} samples per run, {hits}/200 within ε ({:.1}%)",
            100.0 * rate
        ),
    )
}

fn criterion_7() -> Outcome {
    let bp = BasisPair::qft(3, 1).unwrap();
    let e = superop_from_unitary(&qft_matrix(3), &bp).unwrap();
    let g = e.induced_l1();
    let a0 = bp.a_state(0);
    let mut csv = String::from("k,g,n_t,model,relative_error,positive\n");
    let (mut worst_rel, mut all_positive) = (0.0f64, true);
    let mut q = build_kd_pure(&a0, &bp).unwrap();
    for k in 1..=5 {
        q = e.apply(&q).unwrap();
        let positive = is_kd_positive(&q, 1e-10);
        all_positive &= positive;
        let mut c = Circuit::empty(3, 1).unwrap();
        for _ in 0..k {
            c.push(vec![0], qft_matrix(3)).unwrap();
        }
        let problem =
            SamplingProblem::product(&c, &bp, &[a0.to_density()], &[projector(&a0)]).unwrap();
        let budget = problem.negativity_budget();
        let model = budget.n_q * budget.f_inf * g.powi(k);
        let rel = (budget.n_t - model).abs() / model;
        worst_rel = worst_rel.max(rel);
        writeln!(csv, "{k},{g},{},{model},{rel:e},{positive}", budget.n_t).unwrap();
    }
    print!("{csv}");
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("negativity_growth.csv");
    std::fs::write(&path, &csv).unwrap();
    outcome(
        g > 1.0 && all_positive && worst_rel <= 1e-10,
        format!(
            "g = {g:.6}, positive at every step: {all_positive}, worst relative error {worst_rel:.2e}, csv at {}",
            path.display()
        ),
    )
}

fn criterion_8() -> Outcome {
    let (mut self_sim, mut herm, mut herm_bad) = (0.0f64, 0.0f64, f64::INFINITY);
    let configs = [(2, 1), (3, 1), (4, 1), (5, 1), (2, 2), (3, 2)];
    for (d, n) in configs {
        let bp = BasisPair::qft(d, n).unwrap();
        let dim = bp.dim();
        for t in 0..100u64 {
            let seed = 8000 + 1000 * (d * 10 + n) as u64 + t;
            let q = build_kd(&random_density_matrix(dim, seed), &bp).unwrap();
            self_sim = self_sim.max(self_similarity_residual(&hat_dft(&q, &bp).unwrap()));
            herm = herm.max(hermiticity_residual(&q, &bp).unwrap());
            let mut bad = q.as_slice().to_vec();
            let at = (t as usize * 7) % bad.len();
            bad[at] += C64::new(0.01, 0.0);
            let bad = KdDist::new(dim, bad).unwrap();
            herm_bad = herm_bad.min(hermiticity_residual(&bad, &bp).unwrap());
        }
    }
    outcome(
        self_sim <= 1e-9 && herm <= 1e-9 && herm_bad >= 1e-3,
        format!(
            "self-similarity {self_sim:.2e}, Hermiticity {herm:.2e}, perturbed minimum {herm_bad:.2e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let (mut oracle, mut imag, mut total, mut kd_trip, mut w_trip) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (d, n) in [(3, 1), (5, 1), (3, 2)] {
        let bp = BasisPair::qft(d, n).unwrap();
        let dim = bp.dim();
        for t in 0..30u64 {
            let seed = 9000 + 100 * (d * 10 + n) as u64 + t;
            let rho = if t % 3 == 0 {
                random_pure_state(dim, seed).to_density()
            } else {
                random_density_matrix(dim, seed)
            };
            let q = build_kd(&rho, &bp).unwrap();
            let w = kd_to_wigner(&q, &bp).unwrap();
            let w_ref = wigner_from_phase_points(&rho, d, n).unwrap();
            oracle = oracle.max(w.max_abs_diff(&w_ref));
            imag = imag.max(wigner_imaginary_residue(&q, &bp).unwrap());
            total = total.max((w.total() - 1.0).abs());
            kd_trip = kd_trip.max(wigner_to_kd(&w).unwrap().max_abs_diff(&q));
            let other = random_density_matrix(dim, seed + 50_000);
            let w2 = wigner_from_phase_points(&other, d, n).unwrap();
            let back = kd_to_wigner(&wigner_to_kd(&w2).unwrap(), &bp).unwrap();
            w_trip = w_trip.max(back.max_abs_diff(&w2));
        }
    }
    outcome(
        oracle <= 1e-10 && imag <= 1e-10 && total <= 1e-10 && kd_trip <= 1e-10 && w_trip <= 1e-10,
        format!(
            "oracle {oracle:.2e}, imaginary {imag:.2e}, ΣW − 1 {total:.2e}, \
             KD→W→KD {kd_trip:.2e}, W→KD→W {w_trip:.2e}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut violations = 0usize;
    let mut configs: Vec<(String, BasisPair)> = (2..=5)
        .map(|d| (format!("QFT_{d}"), BasisPair::qft(d, 1).unwrap()))
        .collect();
    configs.push(("H⊗H".into(), BasisPair::hadamard(2).unwrap()));
    configs.push((
        "random V, D=3".into(),
        BasisPair::new(random_unitary(3, 10_001)).unwrap(),
    ));
    configs.push((
        "random V, D=4".into(),
        BasisPair::new(random_unitary(4, 10_002)).unwrap(),
    ));
    for (ci, (_, bp)) in configs.iter().enumerate() {
        for t in 0..500u64 {
            let psi = random_pure_state(bp.dim(), 10_100 + 1000 * ci as u64 + t);
            if !check_bounds(&psi, bp).unwrap().upper_satisfied {
                violations += 1;
            }
        }
    }

    let fixtures = [
        BasisPair::qft(2, 1).unwrap(),
        BasisPair::qft(3, 1).unwrap(),
        BasisPair::qft(4, 1).unwrap(),
        BasisPair::qft(5, 1).unwrap(),
        BasisPair::hadamard(2).unwrap(),
        BasisPair::hadamard(3).unwrap(),
    ];
    let (mut states, mut non_uniform, mut saw_quarter) = (0usize, 0usize, false);
    let mut overlap_err = 0.0f64;
    for bp in &fixtures {
        let d_local = bp.factors().map(|f| f[0].rows()).unwrap_or(bp.dim());
        let found = enumerate_positive_states(bp, &default_phases(d_local)).unwrap();
        let dists: Vec<KdDist> = found
            .iter()
            .map(|p| build_kd_pure(p, bp).unwrap())
            .collect();
        for (psi, q) in found.iter().zip(&dists) {
            states += 1;
            if !mub_uniformity(psi, bp, MUB_TOL).unwrap().holds() {
                non_uniform += 1;
            }
            if bp.dim() == 4
                && bp.factors().is_some_and(|f| f.len() == 2)
                && q.as_slice().iter().any(|z| (z.re - 0.25).abs() < 1e-12)
            {
                saw_quarter = true;
            }
        }
        let dim = bp.dim() as f64;
        for a in 0..found.len() {
            for b in a..found.len() {
                let k = support_overlap(&dists[a], &dists[b], 1e-10);
                let direct = found[a].inner(&found[b]).norm();
                let via_kd = kd_inner_product(&dists[a], &dists[b], bp).unwrap();
                let model = k as f64 / dim;
                overlap_err = overlap_err
                    .max((direct - model.sqrt()).abs())
                    .max((via_kd - model).abs());
            }
        }
    }
    outcome(
        violations == 0 && non_uniform == 0 && saw_quarter && overlap_err <= 1e-9,
        format!(
            "{violations} upper-bound violations over {} states, {states} positive states \
             ({non_uniform} non-uniform), overlap error {overlap_err:.2e}",
            500 * configs.len()
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut p0_err = 0.0f64;
    let mut cases = 0usize;
    for k in 2..=8u32 {
        for dim in 2..=16usize {
            if dim.pow(k) > 256 {
                continue;
            }
            let states: Vec<PureState> = (0..k as u64)
                .map(|r| random_pure_state(dim, 11_000 + 100 * dim as u64 + 10 * k as u64 + r))
                .collect();
            for s in [PhaseFlag::Real, PhaseFlag::Imag] {
                let a = analytic_p0(&states, s).unwrap();
                let b = statevector_p0(&states, s).unwrap();
                p0_err = p0_err.max((a - b).abs());
                cases += 1;
            }
        }
    }

    let shots = 100_000;
    let (mut q_hits, mut e_hits) = (0, 0);
    for t in 0..100u64 {
        let bp = BasisPair::new(random_unitary(3, 12_000 + t)).unwrap();
        let rho = random_density_matrix(3, 12_500 + t);
        let (i, j) = ((t % 3) as usize, ((t / 3) % 3) as usize);
        let exact = build_kd(&rho, &bp).unwrap().get(i, j);
        let est = estimate_quasiprobability(&rho, i, j, &bp, shots, 13_000 + t).unwrap();
        if est.agrees_with(exact, 4.0) {
            q_hits += 1;
        }

        let u = random_unitary(3, 14_000 + t);
        let idx = (
            (t % 3) as usize,
            ((t / 3) % 3) as usize,
            ((t / 9) % 3) as usize,
            ((t / 27) % 3) as usize,
        );
        let e = superop_from_unitary(&u, &bp).unwrap();
        let exact = bp.overlap(idx.2, idx.3).norm_sqr() * e.element(idx.0, idx.1, idx.2, idx.3);
        let est =
            estimate_superop_element(&u, idx, &bp, shots, 15_000 + t, Denominator::Exact).unwrap();
        if est.numerator.agrees_with(exact, 4.0) {
            e_hits += 1;
        }
    }
    outcome(
        p0_err <= 1e-10 && q_hits >= 95 && e_hits >= 95,
        format!(
            "p0 analytic vs statevector {p0_err:.2e} over {cases} circuits, \
             Q_ij within 4σ {q_hits}/100, superop numerator within 4σ {e_hits}/100"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "reconstruction fidelity", 5, criterion_1),
        (2, "superoperator correctness", 10, criterion_2),
        (3, "stochastic iff generalized permutation", 10, criterion_3),
        (4, "positivity without stochasticity", 1, criterion_4),
        (5, "sampler unbiasedness", 30, criterion_5),
        (6, "Hoeffding coverage", 60, criterion_6),
        (7, "exponential negativity budget", 5, criterion_7),
        (8, "Fourier self-similarity", 20, criterion_8),
        (9, "Wigner pipeline", 20, criterion_9),
        (10, "support bounds and MUB uniformity", 20, criterion_10),
        (11, "cycle tests", 120, criterion_11),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = result.pass && in_time;
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.2}s of {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
