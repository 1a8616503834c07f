//! Kirkwood-Dirac distributions over a pair of orthonormal bases.
//!
//! Basis A is always the computational basis and basis B is given by the
//! columns of a unitary transition matrix V, so that <a_i|b_j> = V_ij and
//!
//! ```text
//! Q_ij(ρ) = <b_j|a_i><a_i|ρ|b_j> = conj(V_ij) · (ρ V)_ij
//! ```
//!
//! Distributions are stored row-major; the flat view `q[i·D + j] = Q_ij` is
//! the vectorised distribution that superoperators act on.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{
    check_dimension, complex_from, pairs_from, qft_matrix, ComplexMatrix, DensityMatrix, PureState,
    C_ZERO,
};
use crate::error::{KdError, Result};

/// Default threshold below which an overlap or amplitude counts as zero.
pub const ZERO_TOL: f64 = 1e-10;
/// Default tolerance on imaginary parts and negativity for KD positivity.
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-12;
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Reference bases A (computational) and B = V·A.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPair {
    transition: ComplexMatrix,
    factors: Option<Vec<ComplexMatrix>>,
}

impl BasisPair {
    pub fn new(transition: ComplexMatrix) -> Result<Self> {
        check_dimension(transition.rows())?;
        let residual = transition.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(KdError::NotUnitary { residual });
        }
        Ok(Self {
            transition,
            factors: None,
        })
    }

    /// V = V_1 ⊗ ... ⊗ V_n over qudits of equal local dimension.
    pub fn from_factors(factors: Vec<ComplexMatrix>) -> Result<Self> {
        let d = factors
            .first()
            .map(|f| f.rows())
            .ok_or_else(|| KdError::InvalidArgument("no basis factors".into()))?;
        for f in &factors {
            if f.rows() != d || f.cols() != d {
                return Err(KdError::DimensionMismatch {
                    expected: d,
                    found: f.rows().max(f.cols()),
                });
            }
            let residual = f.unitarity_residual();
            if residual > UNITARY_TOL {
                return Err(KdError::NotUnitary { residual });
            }
        }
        check_dimension(crate::algebra::checked_pow(d, factors.len())?)?;
        let transition = ComplexMatrix::kron_all(&factors)?;
        Ok(Self {
            transition,
            factors: Some(factors),
        })
    }

    /// Per-qudit Fourier basis pair, V = QFT_d^{⊗n}.
    pub fn qft(d: usize, n: usize) -> Result<Self> {
        if d < 2 || n == 0 {
            return Err(KdError::InvalidArgument(format!(
                "qft basis needs d >= 2, n >= 1 (got {d}, {n})"
            )));
        }
        Self::from_factors(vec![qft_matrix(d); n])
    }

    /// V = H^{⊗n} on qubits.
    pub fn hadamard(n: usize) -> Result<Self> {
        Self::qft(2, n)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.transition.rows()
    }

    pub fn transition(&self) -> &ComplexMatrix {
        &self.transition
    }

    pub fn factors(&self) -> Option<&[ComplexMatrix]> {
        self.factors.as_deref()
    }

    /// (d, n) when the pair carries per-qudit factors.
    pub fn product_shape(&self) -> Option<(usize, usize)> {
        self.factors.as_ref().map(|fs| (fs[0].rows(), fs.len()))
    }

    /// (d, n) when V = QFT_d^{⊗n}.
    pub fn qft_layout(&self) -> Option<(usize, usize)> {
        let factors = self.factors.as_ref()?;
        let d = factors[0].rows();
        let f = qft_matrix(d);
        factors
            .iter()
            .all(|x| x.max_abs_diff(&f) <= UNITARY_TOL)
            .then_some((d, factors.len()))
    }

    /// <a_i|b_j>
    pub fn overlap(&self, i: usize, j: usize) -> C64 {
        self.transition[(i, j)]
    }

    pub fn a_state(&self, i: usize) -> PureState {
        PureState::basis(self.dim(), i).expect("index in range")
    }

    pub fn b_state(&self, j: usize) -> PureState {
        PureState::new(self.transition.column(j)).expect("columns of a unitary are normalised")
    }

    /// Fails on the first overlap with modulus at or below `zero_tol`.
    pub fn check_informationally_complete(&self, zero_tol: f64) -> Result<()> {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                let overlap = self.overlap(i, j).norm();
                if overlap <= zero_tol {
                    return Err(KdError::NotInformationallyComplete { i, j, overlap });
                }
            }
        }
        Ok(())
    }

    /// max_ij | |V_ij| - 1/√D |
    pub fn mub_deviation(&self) -> f64 {
        let target = 1.0 / (self.dim() as f64).sqrt();
        self.transition
            .as_slice()
            .iter()
            .map(|z| (z.norm() - target).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_mub(&self, tol: f64) -> bool {
        self.mub_deviation() <= tol
    }
}

#[derive(Serialize, Deserialize)]
struct BasisPairRepr {
    dim: usize,
    v: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<ComplexMatrix>>,
}

impl Serialize for BasisPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BasisPairRepr {
            dim: self.dim(),
            v: self.transition.clone(),
            factors: self.factors.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BasisPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = BasisPairRepr::deserialize(deserializer)?;
        if repr.v.rows() != repr.dim {
            return Err(D::Error::custom("dim does not match v"));
        }
        let mut bp = BasisPair::new(repr.v).map_err(D::Error::custom)?;
        if let Some(factors) = repr.factors {
            let rebuilt = BasisPair::from_factors(factors).map_err(D::Error::custom)?;
            if rebuilt.transition.max_abs_diff(&bp.transition) > UNITARY_TOL {
                return Err(D::Error::custom("factors do not reproduce v"));
            }
            bp.factors = rebuilt.factors;
        }
        Ok(bp)
    }
}

/// A D×D table of quasiprobabilities, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KdDist {
    dim: usize,
    q: Vec<C64>,
}

impl KdDist {
    /// Arbitrary tables are allowed; normalisation is only checked softly.
    pub fn new(dim: usize, q: Vec<C64>) -> Result<Self> {
        if q.len() != dim * dim {
            return Err(KdError::DimensionMismatch {
                expected: dim * dim,
                found: q.len(),
            });
        }
        if q.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(KdError::InvalidMatrix("non-finite quasiprobability".into()));
        }
        Ok(Self { dim, q })
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(KdError::InvalidMatrix(
                "distribution table must be square".into(),
            ));
        }
        Self::new(m.rows(), m.as_slice().to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.q[i * self.dim + j]
    }

    /// Row-major vectorised view, `flat[i·D + j] = Q_ij`.
    pub fn as_slice(&self) -> &[C64] {
        &self.q
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.dim, self.dim, self.q.clone()).expect("validated")
    }

    /// |Σ Q_ij - 1|
    pub fn normalization_defect(&self) -> f64 {
        (self.q.iter().sum::<C64>() - C64::new(1.0, 0.0)).norm()
    }

    /// Present when the table does not sum to one within tolerance.
    pub fn normalization_warning(&self) -> Option<f64> {
        let defect = self.normalization_defect();
        (defect > NORMALIZATION_TOL).then_some(defect)
    }

    pub fn max_abs_diff(&self, other: &KdDist) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.q
            .iter()
            .zip(&other.q)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct KdDistRepr {
    dim: usize,
    q: Vec<[f64; 2]>,
}

impl Serialize for KdDist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        KdDistRepr {
            dim: self.dim,
            q: pairs_from(&self.q),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KdDist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = KdDistRepr::deserialize(deserializer)?;
        KdDist::new(repr.dim, complex_from(&repr.q)).map_err(serde::de::Error::custom)
    }
}

/// Rank-one frame operator Λ_ij = |a_i><b_j| / <b_j|a_i>.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub i: usize,
    pub j: usize,
    pub operator: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub n_a: usize,
    pub n_b: usize,
    pub support_a: BTreeSet<usize>,
    pub support_b: BTreeSet<usize>,
    pub zero_tol: f64,
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(KdError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Q_ij = conj(V_ij)·(ρV)_ij.
pub fn build_kd(rho: &DensityMatrix, bp: &BasisPair) -> Result<KdDist> {
    check_dims(bp.dim(), rho.dim())?;
    build_kd_unchecked(rho.matrix(), bp)
}

/// The same map applied to any square operator; used for invalid-table fixtures.
pub fn build_kd_unchecked(op: &ComplexMatrix, bp: &BasisPair) -> Result<KdDist> {
    check_dims(bp.dim(), op.rows())?;
    let v = bp.transition();
    let rho_v = op.matmul(v)?;
    let q = v
        .as_slice()
        .iter()
        .zip(rho_v.as_slice())
        .map(|(vij, rv)| vij.conj() * rv)
        .collect();
    KdDist::new(bp.dim(), q)
}

pub fn build_kd_pure(psi: &PureState, bp: &BasisPair) -> Result<KdDist> {
    build_kd(&psi.to_density(), bp)
}

pub fn frame(i: usize, j: usize, bp: &BasisPair) -> Result<Frame> {
    frame_with_tol(i, j, bp, ZERO_TOL)
}

pub fn frame_with_tol(i: usize, j: usize, bp: &BasisPair, zero_tol: f64) -> Result<Frame> {
    let dim = bp.dim();
    if i >= dim || j >= dim {
        return Err(KdError::InvalidArgument(format!(
            "frame index ({i}, {j}) out of range"
        )));
    }
    let overlap = bp.overlap(i, j);
    if overlap.norm() <= zero_tol {
        return Err(KdError::NotInformationallyComplete {
            i,
            j,
            overlap: overlap.norm(),
        });
    }
    let a = bp.a_state(i);
    let b = bp.b_state(j);
    let operator = ComplexMatrix::outer(a.amplitudes(), b.amplitudes()).scale(1.0 / overlap.conj());
    Ok(Frame { i, j, operator })
}

/// Σ_ij Q_ij Λ_ij for an arbitrary table.
pub fn reconstruct_operator(q: &KdDist, bp: &BasisPair) -> Result<ComplexMatrix> {
    check_dims(bp.dim(), q.dim())?;
    bp.check_informationally_complete(ZERO_TOL)?;
    let dim = bp.dim();
    let v = bp.transition();
    // (Σ_j Q_ij Λ_ij)_{i,c} = Σ_j Q_ij conj(V_cj) / conj(V_ij)
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let w = q.get(i, j) / v[(i, j)].conj();
            if w == C_ZERO {
                continue;
            }
            for c in 0..dim {
                out[(i, c)] += w * v[(c, j)].conj();
            }
        }
    }
    Ok(out)
}

pub const RECONSTRUCTION_TOL: f64 = 1e-9;

pub fn reconstruct_rho(q: &KdDist, bp: &BasisPair) -> Result<DensityMatrix> {
    DensityMatrix::with_tolerance(reconstruct_operator(q, bp)?, RECONSTRUCTION_TOL)
}

/// Born probabilities in A and B recovered by summing rows and columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    pub probs_a: Vec<f64>,
    pub probs_b: Vec<f64>,
    /// Largest imaginary residue among the row and column sums.
    pub imag_residue: f64,
}

pub fn marginals(q: &KdDist) -> Marginals {
    let dim = q.dim();
    let mut residue: f64 = 0.0;
    let probs_a = (0..dim)
        .map(|i| {
            let s: C64 = (0..dim).map(|j| q.get(i, j)).sum();
            residue = residue.max(s.im.abs());
            s.re
        })
        .collect();
    let probs_b = (0..dim)
        .map(|j| {
            let s: C64 = (0..dim).map(|i| q.get(i, j)).sum();
            residue = residue.max(s.im.abs());
            s.re
        })
        .collect();
    Marginals {
        probs_a,
        probs_b,
        imag_residue: residue,
    }
}

/// N(Q) = Σ_ij |Q_ij|, the l1 norm of the vectorised distribution.
pub fn total_nonpositivity(q: &KdDist) -> f64 {
    q.as_slice().iter().map(|z| z.norm()).sum()
}

pub fn is_kd_positive(q: &KdDist, tol: f64) -> bool {
    q.as_slice()
        .iter()
        .all(|z| z.im.abs() <= tol && z.re >= -tol)
}

pub fn support_uncertainties(
    psi: &PureState,
    bp: &BasisPair,
    zero_tol: f64,
) -> Result<SupportReport> {
    check_dims(bp.dim(), psi.dim())?;
    let support_a: BTreeSet<usize> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > zero_tol)
        .map(|(i, _)| i)
        .collect();
    let in_b = bp.transition().adjoint().apply(psi.amplitudes())?;
    let support_b: BTreeSet<usize> = in_b
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > zero_tol)
        .map(|(j, _)| j)
        .collect();
    Ok(SupportReport {
        n_a: support_a.len(),
        n_b: support_b.len(),
        support_a,
        support_b,
        zero_tol,
    })
}

/// (m, M): smallest and largest |<a_i|b_j>|.
pub fn completeness_stats(bp: &BasisPair) -> (f64, f64) {
    bp.transition()
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .fold((f64::INFINITY, 0.0), |(lo, hi), x| (lo.min(x), hi.max(x)))
}
