//! Simulated cycle tests.
//!
//! An ancilla in |+>, an optional phase gate P = diag(1, i), a controlled
//! cyclic shift of k registers and a final Hadamard give
//! p(0) = (1 + Re[e^{-isπ/2} B]) / 2 with B the Bargmann invariant of the
//! register states. Register order for the quasiprobability test is
//! (|b_j>, |a_i>, |ψ>); for a superoperator element it is
//! (|a_i>, U|a_k>, U|b_l>, |b_j>).

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::algebra::{ComplexMatrix, DensityMatrix, PureState, C_I, C_ONE, C_ZERO};
use crate::error::{KdError, Result};
use crate::kd::{BasisPair, ZERO_TOL};
use crate::superop::GATE_UNITARY_TOL;

/// Largest joint register dimension D^k simulated as a statevector.
pub const STATEVECTOR_CAP: usize = 256;
/// An estimated denominator must exceed this many standard errors.
pub const DENOMINATOR_SIGMAS: f64 = 10.0;

/// <φ_1|φ_2><φ_2|φ_3> ··· <φ_k|φ_1>
pub fn bargmann(states: &[PureState]) -> Result<C64> {
    let first = states
        .first()
        .ok_or_else(|| KdError::InvalidArgument("no states".into()))?;
    for s in states {
        if s.dim() != first.dim() {
            return Err(KdError::DimensionMismatch {
                expected: first.dim(),
                found: s.dim(),
            });
        }
    }
    Ok((0..states.len())
        .map(|r| states[r].inner(&states[(r + 1) % states.len()]))
        .product())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseFlag {
    /// s = 0, measures the real part.
    Real,
    /// s = 1, measures the imaginary part.
    Imag,
}

impl PhaseFlag {
    pub fn from_bit(s: u8) -> Result<Self> {
        match s {
            0 => Ok(Self::Real),
            1 => Ok(Self::Imag),
            _ => Err(KdError::InvalidArgument(format!(
                "phase flag must be 0 or 1, got {s}"
            ))),
        }
    }

    /// e^{-isπ/2}
    fn rotation(self) -> C64 {
        match self {
            Self::Real => C_ONE,
            Self::Imag => -C_I,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleExperiment {
    registers: Vec<PureState>,
    s: PhaseFlag,
    shots: u64,
    seed: u64,
}

impl CycleExperiment {
    pub fn new(registers: Vec<PureState>, s: PhaseFlag, shots: u64, seed: u64) -> Result<Self> {
        if registers.len() < 2 {
            return Err(KdError::InvalidArgument(
                "a cycle needs at least 2 registers".into(),
            ));
        }
        if shots == 0 {
            return Err(KdError::InvalidArgument("shots must be positive".into()));
        }
        bargmann(&registers)?;
        Ok(Self {
            registers,
            s,
            shots,
            seed,
        })
    }

    pub fn registers(&self) -> &[PureState] {
        &self.registers
    }

    pub fn flag(&self) -> PhaseFlag {
        self.s
    }

    pub fn p0(&self) -> f64 {
        analytic_p0(&self.registers, self.s).expect("validated registers")
    }
}

pub fn analytic_p0(registers: &[PureState], s: PhaseFlag) -> Result<f64> {
    let b = bargmann(registers)?;
    Ok((1.0 + (s.rotation() * b).re) / 2.0)
}

/// Ancilla probability of 0 from the full circuit: H, P^s, controlled cyclic
/// shift (controlled-SWAPs on registers (k-1,k), …, (1,2)), H.
pub fn statevector_p0(registers: &[PureState], s: PhaseFlag) -> Result<f64> {
    let k = registers.len();
    let dim = registers
        .first()
        .ok_or_else(|| KdError::InvalidArgument("no registers".into()))?
        .dim();
    bargmann(registers)?;
    let joint = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(dim));
    let joint = match joint {
        Some(j) if j <= STATEVECTOR_CAP => j,
        _ => {
            return Err(KdError::DimensionCap {
                requested: joint.unwrap_or(usize::MAX),
                cap: STATEVECTOR_CAP,
            })
        }
    };
    // |Φ> = φ_1 ⊗ … ⊗ φ_k, register 1 most significant
    let mut phi = vec![C_ONE];
    for r in registers {
        phi = phi
            .iter()
            .flat_map(|a| r.amplitudes().iter().map(move |b| a * b))
            .collect();
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut branch0: Vec<C64> = phi.iter().map(|z| z * h).collect();
    let mut branch1 = branch0.clone();
    if s == PhaseFlag::Imag {
        branch1.iter_mut().for_each(|z| *z *= C_I);
    }
    let place = |r: usize| dim.pow((k - 1 - r) as u32);
    for r in (0..k - 1).rev() {
        let (wa, wb) = (place(r), place(r + 1));
        let mut swapped = vec![C_ZERO; joint];
        for (idx, &amp) in branch1.iter().enumerate() {
            let (xa, xb) = ((idx / wa) % dim, (idx / wb) % dim);
            let target = idx - xa * wa - xb * wb + xb * wa + xa * wb;
            swapped[target] = amp;
        }
        branch1 = swapped;
    }
    for (a, b) in branch0.iter_mut().zip(&branch1) {
        *a = (*a + b) * h;
    }
    Ok(branch0.iter().map(|z| z.norm_sqr()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotReport {
    pub zeros: u64,
    pub ones: u64,
    /// 2·zeros/shots - 1
    pub estimate: f64,
    pub stderr: f64,
    pub p0: f64,
}

impl ShotReport {
    fn from_counts(zeros: u64, shots: u64, p0: f64) -> Self {
        let p_hat = zeros as f64 / shots as f64;
        Self {
            zeros,
            ones: shots - zeros,
            estimate: 2.0 * p_hat - 1.0,
            stderr: 2.0 * (p_hat * (1.0 - p_hat) / shots as f64).sqrt(),
            p0,
        }
    }

    pub fn shots(&self) -> u64 {
        self.zeros + self.ones
    }
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p.clamp(0.0, 1.0))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn run_cycle_test(exp: &CycleExperiment) -> ShotReport {
    let p0 = exp.p0();
    let mut rng = stream(exp.seed, 0);
    ShotReport::from_counts(binomial(&mut rng, exp.shots, p0), exp.shots, p0)
}

/// Shots where the last register is drawn per shot from a weighted ensemble:
/// multinomial counts per component, then a binomial outcome count for each.
fn run_mixture(
    prefix: &[PureState],
    ensemble: &[(f64, PureState)],
    s: PhaseFlag,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ShotReport> {
    let mut remaining_shots = shots;
    let mut remaining_weight = 1.0;
    let mut zeros = 0;
    let mut p0 = 0.0;
    for (idx, (w, psi)) in ensemble.iter().enumerate() {
        let mut regs = prefix.to_vec();
        regs.push(psi.clone());
        let p = analytic_p0(&regs, s)?;
        p0 += w * p;
        let count = if idx + 1 == ensemble.len() {
            remaining_shots
        } else {
            binomial(rng, remaining_shots, w / remaining_weight)
        };
        remaining_shots -= count;
        remaining_weight -= w;
        zeros += binomial(rng, count, p);
    }
    Ok(ShotReport::from_counts(zeros, shots, p0))
}

/// Real and imaginary parts estimated from separate s = 0 and s = 1 runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub value: C64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub real_part: ShotReport,
    pub imag_part: ShotReport,
}

impl ComplexEstimate {
    fn from_parts(real_part: ShotReport, imag_part: ShotReport) -> Self {
        Self {
            value: C64::new(real_part.estimate, imag_part.estimate),
            stderr_re: real_part.stderr,
            stderr_im: imag_part.stderr,
            real_part,
            imag_part,
        }
    }

    /// Both components within `sigmas` standard errors of `exact`.
    pub fn agrees_with(&self, exact: C64, sigmas: f64) -> bool {
        (self.value.re - exact.re).abs() <= sigmas * self.stderr_re
            && (self.value.im - exact.im).abs() <= sigmas * self.stderr_im
    }
}

pub fn estimate_bargmann(states: &[PureState], shots: u64, seed: u64) -> Result<ComplexEstimate> {
    let re = CycleExperiment::new(states.to_vec(), PhaseFlag::Real, shots, seed)?;
    let im = CycleExperiment::new(states.to_vec(), PhaseFlag::Imag, shots, seed)?;
    let mut rng_re = stream(seed, 0);
    let mut rng_im = stream(seed, 1);
    let (p_re, p_im) = (re.p0(), im.p0());
    Ok(ComplexEstimate::from_parts(
        ShotReport::from_counts(binomial(&mut rng_re, shots, p_re), shots, p_re),
        ShotReport::from_counts(binomial(&mut rng_im, shots, p_im), shots, p_im),
    ))
}

/// Cycle-test estimate of Q_ij(ρ); mixed ρ is sampled through its eigenvectors.
pub fn estimate_quasiprobability(
    rho: &DensityMatrix,
    i: usize,
    j: usize,
    bp: &BasisPair,
    shots: u64,
    seed: u64,
) -> Result<ComplexEstimate> {
    let dim = bp.dim();
    if rho.dim() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    if i >= dim || j >= dim {
        return Err(KdError::InvalidArgument(format!(
            "index ({i}, {j}) out of range"
        )));
    }
    if shots == 0 {
        return Err(KdError::InvalidArgument("shots must be positive".into()));
    }
    let ensemble = rho.eigen_mixture()?;
    let prefix = [bp.b_state(j), bp.a_state(i)];
    let re = run_mixture(
        &prefix,
        &ensemble,
        PhaseFlag::Real,
        shots,
        &mut stream(seed, 0),
    )?;
    let im = run_mixture(
        &prefix,
        &ensemble,
        PhaseFlag::Imag,
        shots,
        &mut stream(seed, 1),
    )?;
    Ok(ComplexEstimate::from_parts(re, im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Denominator {
    /// |<b_l|a_k>|² computed from the basis pair.
    Exact,
    /// |<b_l|a_k>|² estimated with a simulated SWAP test.
    SwapTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperopEstimate {
    /// Estimate of (Ê_U)_{ij,kl}.
    pub value: C64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// Cycle-test estimate of |<b_l|a_k>|² (Ê_U)_{ij,kl}.
    pub numerator: ComplexEstimate,
    pub denominator: f64,
    pub denominator_stderr: f64,
    pub denominator_mode: Denominator,
}

/// The four registers whose Bargmann invariant is |<b_l|a_k>|² (Ê_U)_{ij,kl}.
pub fn superop_registers(
    u: &ComplexMatrix,
    (i, j, k, l): (usize, usize, usize, usize),
    bp: &BasisPair,
) -> Result<Vec<PureState>> {
    let dim = bp.dim();
    if u.rows() != dim || u.cols() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            found: u.rows().max(u.cols()),
        });
    }
    let residual = u.unitarity_residual();
    if residual > GATE_UNITARY_TOL {
        return Err(KdError::NotUnitary { residual });
    }
    if [i, j, k, l].iter().any(|&x| x >= dim) {
        return Err(KdError::InvalidArgument(format!(
            "index ({i}, {j}, {k}, {l}) out of range"
        )));
    }
    Ok(vec![
        bp.a_state(i),
        bp.a_state(k).evolve(u)?,
        bp.b_state(l).evolve(u)?,
        bp.b_state(j),
    ])
}

pub fn estimate_superop_element(
    u: &ComplexMatrix,
    index: (usize, usize, usize, usize),
    bp: &BasisPair,
    shots: u64,
    seed: u64,
    mode: Denominator,
) -> Result<SuperopEstimate> {
    let registers = superop_registers(u, index, bp)?;
    let (_, _, k, l) = index;
    let numerator = estimate_bargmann(&registers, shots, seed)?;
    let (den, den_err) = match mode {
        Denominator::Exact => {
            let den = bp.overlap(k, l).norm_sqr();
            if den.sqrt() <= ZERO_TOL {
                return Err(KdError::DenominatorTooSmall {
                    value: den,
                    stderr: 0.0,
                });
            }
            (den, 0.0)
        }
        Denominator::SwapTest => {
            let exp = CycleExperiment::new(
                vec![bp.a_state(k), bp.b_state(l)],
                PhaseFlag::Real,
                shots,
                seed,
            )?;
            let p0 = exp.p0();
            let report =
                ShotReport::from_counts(binomial(&mut stream(seed, 2), shots, p0), shots, p0);
            if report.estimate < DENOMINATOR_SIGMAS * report.stderr || report.estimate <= 0.0 {
                return Err(KdError::DenominatorTooSmall {
                    value: report.estimate,
                    stderr: report.stderr,
                });
            }
            (report.estimate, report.stderr)
        }
    };
    let n = numerator.value;
    let stderr = |part: f64, part_err: f64| {
        ((part_err / den).powi(2) + (part * den_err / (den * den)).powi(2)).sqrt()
    };
    Ok(SuperopEstimate {
        value: n / den,
        stderr_re: stderr(n.re, numerator.stderr_re),
        stderr_im: stderr(n.im, numerator.stderr_im),
        numerator,
        denominator: den,
        denominator_stderr: den_err,
        denominator_mode: mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::{random_density_matrix, random_pure_state, random_unitary};
    use crate::algebra::{qft_matrix, shift};
    use crate::kd::build_kd;
    use crate::superop::superop_from_unitary;

    #[test]
    fn bargmann_basics() {
        let psi = random_pure_state(3, 1);
        let b = bargmann(&[psi.clone(), psi.clone(), psi.clone()]).unwrap();
        assert!((b - C_ONE).norm() < 1e-12);

        let states: Vec<PureState> = (0..4).map(|s| random_pure_state(3, s)).collect();
        let b = bargmann(&states).unwrap();
        let mut rotated = states.clone();
        rotated.rotate_left(1);
        assert!((bargmann(&rotated).unwrap() - b).norm() < 1e-12);
        let mut reversed = states.clone();
        reversed.reverse();
        assert!((bargmann(&reversed).unwrap() - b.conj()).norm() < 1e-12);

        let projs: Vec<ComplexMatrix> = states.iter().map(PureState::projector).collect();
        let prod = projs[1..]
            .iter()
            .fold(projs[0].clone(), |acc, p| acc.matmul(p).unwrap());
        assert!((prod.trace() - b).norm() < 1e-12);
        assert!(bargmann(&[random_pure_state(2, 0), random_pure_state(3, 0)]).is_err());
    }

    #[test]
    fn registers_reproduce_kd_entries() {
        let bp = BasisPair::qft(3, 1).unwrap();
        let psi = random_pure_state(3, 5);
        let q = build_kd(&psi.to_density(), &bp).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let b = bargmann(&[bp.b_state(j), bp.a_state(i), psi.clone()]).unwrap();
                assert!((b - q.get(i, j)).norm() < 1e-12);
            }
        }
        let u = random_unitary(3, 2);
        let e = superop_from_unitary(&u, &bp).unwrap();
        for (i, j, k, l) in [(0, 1, 2, 0), (1, 1, 1, 1), (2, 0, 1, 2)] {
            let b = bargmann(&superop_registers(&u, (i, j, k, l), &bp).unwrap()).unwrap();
            let want = e.element(i, j, k, l) * bp.overlap(k, l).norm_sqr();
            assert!((b - want).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_matches_statevector() {
        let bp = BasisPair::qft(3, 1).unwrap();
        let psi = random_pure_state(3, 4);
        let regs = vec![bp.b_state(2), bp.a_state(1), psi];
        for s in [PhaseFlag::Real, PhaseFlag::Imag] {
            let a = analytic_p0(&regs, s).unwrap();
            let v = statevector_p0(&regs, s).unwrap();
            assert!((a - v).abs() < 1e-12);
        }
        let four: Vec<PureState> = (0..4).map(|s| random_pure_state(4, s)).collect();
        for s in [PhaseFlag::Real, PhaseFlag::Imag] {
            let a = analytic_p0(&four, s).unwrap();
            assert!((a - statevector_p0(&four, s).unwrap()).abs() < 1e-12);
        }
        let five: Vec<PureState> = (0..5).map(|s| random_pure_state(4, s)).collect();
        assert!(matches!(
            statevector_p0(&five, PhaseFlag::Real),
            Err(KdError::DimensionCap { .. })
        ));
    }

    #[test]
    fn imaginary_flag_reads_positive_imaginary_part() {
        let bp = BasisPair::hadamard(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(vec![C64::new(s, 0.0), C64::new(0.0, s)]).unwrap();
        let regs = vec![bp.b_state(1), bp.a_state(0), psi];
        let b = bargmann(&regs).unwrap();
        assert!(b.im.abs() > 0.1);
        let p = statevector_p0(&regs, PhaseFlag::Imag).unwrap();
        assert!((2.0 * p - 1.0 - b.im).abs() < 1e-12);
    }

    #[test]
    fn shot_reports() {
        let psi = random_pure_state(2, 3);
        let exp =
            CycleExperiment::new(vec![psi.clone(), psi.clone()], PhaseFlag::Real, 1000, 1).unwrap();
        let r = run_cycle_test(&exp);
        assert_eq!(r.zeros, 1000);
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.shots(), 1000);
        assert_eq!(run_cycle_test(&exp), r);

        let bp = BasisPair::hadamard(1).unwrap();
        let regs = vec![bp.b_state(1), bp.a_state(0), bp.a_state(0)];
        let exp = CycleExperiment::new(regs.clone(), PhaseFlag::Real, 100_000, 2).unwrap();
        let r = run_cycle_test(&exp);
        assert!((r.estimate - 0.5).abs() <= 3.0 * r.stderr);
        let exp = CycleExperiment::new(regs, PhaseFlag::Imag, 100_000, 2).unwrap();
        let r = run_cycle_test(&exp);
        assert!(r.estimate.abs() <= 3.0 * r.stderr);
        assert!(CycleExperiment::new(vec![psi], PhaseFlag::Real, 10, 0).is_err());
    }

    #[test]
    fn quasiprobability_estimates() {
        let bp = BasisPair::hadamard(1).unwrap();
        let rho = bp.a_state(0).to_density();
        let est = estimate_quasiprobability(&rho, 0, 0, &bp, 100_000, 3).unwrap();
        assert!(est.agrees_with(C64::new(0.5, 0.0), 3.0));
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let est = estimate_quasiprobability(&mixed, 1, 0, &bp, 100_000, 4).unwrap();
        assert!((est.value.re - 0.25).abs() <= 3.0 * est.stderr_re);

        let bp3 = BasisPair::qft(3, 1).unwrap();
        let rho = random_density_matrix(3, 8);
        let q = build_kd(&rho, &bp3).unwrap();
        let est = estimate_quasiprobability(&rho, 1, 2, &bp3, 1_000_000, 5).unwrap();
        assert!((est.real_part.p0 * 2.0 - 1.0 - q.get(1, 2).re).abs() < 1e-10);
        assert!((est.imag_part.p0 * 2.0 - 1.0 - q.get(1, 2).im).abs() < 1e-10);
        assert!(est.agrees_with(q.get(1, 2), 4.0));
    }

    #[test]
    fn superop_element_estimates() {
        let bp = BasisPair::hadamard(1).unwrap();
        let id = ComplexMatrix::identity(2);
        let est = estimate_superop_element(&id, (0, 1, 0, 1), &bp, 100_000, 1, Denominator::Exact)
            .unwrap();
        assert!((est.value.re - 1.0).abs() <= 3.0 * est.stderr_re + 1e-12);

        let x = shift(2);
        let e = superop_from_unitary(&x, &bp).unwrap();
        let est =
            estimate_superop_element(&x, (1, 0, 0, 0), &bp, 100_000, 2, Denominator::SwapTest)
                .unwrap();
        assert!((est.value - e.element(1, 0, 0, 0)).norm() < 0.05);

        let bp3 = BasisPair::qft(3, 1).unwrap();
        let f = qft_matrix(3);
        let e = superop_from_unitary(&f, &bp3).unwrap();
        let est =
            estimate_superop_element(&f, (0, 1, 2, 1), &bp3, 1_000_000, 3, Denominator::Exact)
                .unwrap();
        let want = e.element(0, 1, 2, 1);
        assert!((est.value.re - want.re).abs() <= 4.0 * est.stderr_re);
        assert!((est.value.im - want.im).abs() <= 4.0 * est.stderr_im);
    }

    #[test]
    fn estimated_denominator_too_small() {
        // |<b_0|a_0>| = sin(1e-3) cannot be resolved with few shots
        let theta: f64 = 1e-3;
        let rot = ComplexMatrix::from_real_rows(&[
            &[theta.cos(), -theta.sin()],
            &[theta.sin(), theta.cos()],
        ])
        .unwrap();
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let bp = BasisPair::new(swap.matmul(&rot).unwrap()).unwrap();
        let err = estimate_superop_element(
            &ComplexMatrix::identity(2),
            (0, 0, 0, 0),
            &bp,
            100,
            1,
            Denominator::SwapTest,
        )
        .unwrap_err();
        assert!(matches!(err, KdError::DenominatorTooSmall { .. }));
    }
}
