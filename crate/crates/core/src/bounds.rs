//! Magnitude bounds on pure-state quasiprobabilities, uniformity of KD
//! positive states over mutually unbiased bases, and the distribution-level
//! inner product.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{omega, PureState, C_I, C_ONE};
use crate::error::{KdError, Result};
use crate::kd::{
    build_kd_pure, completeness_stats, is_kd_positive, support_uncertainties, BasisPair, KdDist,
    POSITIVITY_TOL, ZERO_TOL,
};

/// Entries above this modulus count as nonzero for the lower bound.
pub const NONZERO_TOL: f64 = 1e-10;
pub const BOUND_SLACK: f64 = 1e-10;
pub const MUB_TOL: f64 = 1e-10;
/// Largest candidate count the positive-state search will visit.
pub const ENUMERATION_CAP: f64 = 2e5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub max_abs_q: f64,
    /// Smallest nonzero |Q_ij|.
    pub min_nonzero_q: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// (m, M), the extreme overlaps |<a_i|b_j>|.
    pub overlap_range: (f64, f64),
    pub upper_bound: f64,
    /// m³ when the distribution is KD positive, otherwise 0.
    pub lower_bound: f64,
    pub kd_positive: bool,
    pub upper_satisfied: bool,
    pub lower_satisfied: bool,
}

pub fn check_bounds(psi: &PureState, bp: &BasisPair) -> Result<BoundReport> {
    let q = build_kd_pure(psi, bp)?;
    let support = support_uncertainties(psi, bp, ZERO_TOL)?;
    let (m, big_m) = completeness_stats(bp);
    let upper_bound = big_m.powi(3) * ((support.n_a * support.n_b) as f64).sqrt();
    let mags: Vec<f64> = q.as_slice().iter().map(|z| z.norm()).collect();
    let max_abs_q = mags.iter().copied().fold(0.0, f64::max);
    let min_nonzero_q = mags
        .iter()
        .copied()
        .filter(|&x| x > NONZERO_TOL)
        .fold(f64::INFINITY, f64::min);
    let kd_positive = is_kd_positive(&q, POSITIVITY_TOL);
    let lower_bound = if kd_positive { m.powi(3) } else { 0.0 };
    Ok(BoundReport {
        max_abs_q,
        min_nonzero_q,
        n_a: support.n_a,
        n_b: support.n_b,
        overlap_range: (m, big_m),
        upper_bound,
        lower_bound,
        kd_positive,
        upper_satisfied: max_abs_q <= upper_bound + BOUND_SLACK,
        lower_satisfied: !kd_positive || min_nonzero_q >= lower_bound - BOUND_SLACK,
    })
}

fn require_mub(bp: &BasisPair) -> Result<()> {
    let deviation = bp.mub_deviation();
    if deviation > MUB_TOL {
        return Err(KdError::NotMub { deviation });
    }
    Ok(())
}

/// Each clause of the uniformity property, evaluated separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uniformity {
    pub kd_positive: bool,
    /// Every entry is 0 or 1/D.
    pub uniform_entries: bool,
    /// n_A · n_B = D.
    pub support_product: bool,
    /// Amplitudes on the supports have moduli 1/√n_A and 1/√n_B.
    pub flat_amplitudes: bool,
}

impl Uniformity {
    pub fn holds(&self) -> bool {
        self.kd_positive && self.uniform_entries && self.support_product && self.flat_amplitudes
    }
}

pub fn mub_uniformity(psi: &PureState, bp: &BasisPair, tol: f64) -> Result<Uniformity> {
    require_mub(bp)?;
    let dim = bp.dim();
    let q = build_kd_pure(psi, bp)?;
    let inv = 1.0 / dim as f64;
    let uniform_entries = q
        .as_slice()
        .iter()
        .all(|z| z.norm() <= tol || (z - C64::new(inv, 0.0)).norm() <= tol);
    let support = support_uncertainties(psi, bp, ZERO_TOL)?;
    let in_b = bp.transition().adjoint().apply(psi.amplitudes())?;
    let flat = |amps: &[C64], count: usize| {
        let want = (1.0 / count as f64).sqrt();
        amps.iter()
            .filter(|z| z.norm() > ZERO_TOL)
            .all(|z| (z.norm() - want).abs() <= tol.max(1e-9))
    };
    Ok(Uniformity {
        kd_positive: is_kd_positive(&q, tol),
        uniform_entries,
        support_product: support.n_a * support.n_b == dim,
        flat_amplitudes: flat(psi.amplitudes(), support.n_a) && flat(&in_b, support.n_b),
    })
}

pub fn check_mub_uniformity(psi: &PureState, bp: &BasisPair, tol: f64) -> Result<bool> {
    Ok(mub_uniformity(psi, bp, tol)?.holds())
}

/// Σ_ij Q1*_ij Q2_ij / |<a_i|b_j>|², which equals |<ψ|φ>|² for pure states.
pub fn kd_inner_product_complex(q1: &KdDist, q2: &KdDist, bp: &BasisPair) -> Result<C64> {
    bp.check_informationally_complete(ZERO_TOL)?;
    let dim = bp.dim();
    for q in [q1, q2] {
        if q.dim() != dim {
            return Err(KdError::DimensionMismatch {
                expected: dim,
                found: q.dim(),
            });
        }
    }
    Ok(q1
        .as_slice()
        .iter()
        .zip(q2.as_slice())
        .zip(bp.transition().as_slice())
        .map(|((a, b), v)| a.conj() * b / v.norm_sqr())
        .sum())
}

pub fn kd_inner_product(q1: &KdDist, q2: &KdDist, bp: &BasisPair) -> Result<f64> {
    Ok(kd_inner_product_complex(q1, q2, bp)?.re)
}

/// Number of entries nonzero in both distributions.
pub fn support_overlap(q1: &KdDist, q2: &KdDist, tol: f64) -> usize {
    q1.as_slice()
        .iter()
        .zip(q2.as_slice())
        .filter(|(a, b)| a.norm() > tol && b.norm() > tol)
        .count()
}

/// Phases tried on each amplitude: d-th roots of unity, or {1, i, -1, -i} for qubits.
pub fn default_phases(d: usize) -> Vec<C64> {
    if d == 2 {
        vec![C_ONE, C_I, -C_ONE, -C_I]
    } else {
        (0..d).map(|k| omega(d, k)).collect()
    }
}

/// KD positive pure states among the uniform-amplitude candidates
/// Σ_{i∈S} e^{iθ_i}|a_i> / √|S|, with θ_i drawn from `phases` and the first
/// phase on S fixed to 1. A test fixture, not a complete classification.
pub fn enumerate_positive_states(bp: &BasisPair, phases: &[C64]) -> Result<Vec<PureState>> {
    let dim = bp.dim();
    let p = phases.len() as f64;
    let candidates = ((p + 1.0).powi(dim as i32) - 1.0) / p;
    if dim >= usize::BITS as usize || candidates > ENUMERATION_CAP {
        return Err(KdError::InvalidArgument(format!(
            "{candidates:.0} candidate states exceed the enumeration cap"
        )));
    }
    let mut found = Vec::new();
    for mask in 1usize..(1 << dim) {
        let support: Vec<usize> = (0..dim).filter(|&i| mask >> i & 1 == 1).collect();
        let norm = 1.0 / (support.len() as f64).sqrt();
        let free = support.len() - 1;
        let combos = phases.len().pow(free as u32);
        for code in 0..combos {
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            amps[support[0]] = C64::new(norm, 0.0);
            let mut rest = code;
            for &i in &support[1..] {
                amps[i] = phases[rest % phases.len()] * norm;
                rest /= phases.len();
            }
            let psi = PureState::normalized(amps)?;
            if is_kd_positive(&build_kd_pure(&psi, bp)?, POSITIVITY_TOL) {
                found.push(psi);
            }
        }
    }
    Ok(found)
}
