//! Superoperators acting on vectorised KD distributions.
//!
//! For a channel with Kraus operators K_μ the matrix elements are
//!
//! ```text
//! Ê_{ij,kl} = Σ_μ (<b_j|a_i> / <b_l|a_k>) <a_i|K_μ|a_k> <b_l|K_μ†|b_j>
//! ```
//!
//! with flat row index i·D + j and column index k·D + l. Every such matrix
//! is left quasi-stochastic: its columns sum to one.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{complex_from, pairs_from, ComplexMatrix, C_ONE, C_ZERO};
use crate::error::{KdError, Result};
use crate::kd::{is_kd_positive, BasisPair, KdDist, ZERO_TOL};

pub const CHANNEL_TOL: f64 = 1e-10;
pub const GATE_UNITARY_TOL: f64 = 1e-10;
/// Tolerance used when scanning for phased permutations.
pub const PERMUTATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct KdSuperop {
    dim: usize,
    m: ComplexMatrix,
}

impl KdSuperop {
    pub fn new(dim: usize, m: ComplexMatrix) -> Result<Self> {
        if m.rows() != dim * dim || m.cols() != dim * dim {
            return Err(KdError::DimensionMismatch {
                expected: dim * dim,
                found: m.rows().max(m.cols()),
            });
        }
        Ok(Self { dim, m })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            m: ComplexMatrix::identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    /// Ê(i,j ; k,l)
    pub fn element(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.m[(i * self.dim + j, k * self.dim + l)]
    }

    pub fn apply(&self, q: &KdDist) -> Result<KdDist> {
        if q.dim() != self.dim {
            return Err(KdError::DimensionMismatch {
                expected: self.dim,
                found: q.dim(),
            });
        }
        KdDist::new(self.dim, self.m.apply(q.as_slice())?)
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &KdSuperop) -> Result<KdSuperop> {
        Ok(Self {
            dim: self.dim,
            m: self.m.matmul(&first.m)?,
        })
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn column_sum_residual(&self) -> f64 {
        let n = self.m.cols();
        (0..n)
            .map(|c| ((0..n).map(|r| self.m[(r, c)]).sum::<C64>() - C_ONE).norm())
            .fold(0.0, f64::max)
    }

    pub fn row_sum_residual(&self) -> f64 {
        let n = self.m.rows();
        (0..n)
            .map(|r| (self.m.row(r).iter().sum::<C64>() - C_ONE).norm())
            .fold(0.0, f64::max)
    }

    /// l1 norm of one column.
    pub fn column_l1(&self, col: usize) -> f64 {
        (0..self.m.rows()).map(|r| self.m[(r, col)].norm()).sum()
    }

    /// Induced l1 norm, the largest column l1 norm.
    pub fn induced_l1(&self) -> f64 {
        (0..self.m.cols())
            .map(|c| self.column_l1(c))
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct SuperopRepr {
    dim: usize,
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for KdSuperop {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SuperopRepr {
            dim: self.dim,
            rows: self.m.rows(),
            cols: self.m.cols(),
            entries: pairs_from(self.m.as_slice()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for KdSuperop {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SuperopRepr::deserialize(deserializer)?;
        let m = ComplexMatrix::new(repr.rows, repr.cols, complex_from(&repr.entries))
            .map_err(D::Error::custom)?;
        KdSuperop::new(repr.dim, m).map_err(D::Error::custom)
    }
}

/// Row-stacked vector, `flat[i·D + j] = Q_ij`.
pub fn vectorize(q: &KdDist) -> Vec<C64> {
    q.as_slice().to_vec()
}

/// Inverse of [`vectorize`]; the length must be a perfect square.
pub fn devectorize(v: Vec<C64>) -> Result<KdDist> {
    let dim = v.len().isqrt();
    if dim * dim != v.len() {
        return Err(KdError::DimensionMismatch {
            expected: dim * dim,
            found: v.len(),
        });
    }
    KdDist::new(dim, v)
}

/// max |Σ_μ K_μ†K_μ - I|
pub fn channel_residual(kraus: &[ComplexMatrix]) -> Result<f64> {
    let dim = kraus
        .first()
        .map(|k| k.rows())
        .ok_or_else(|| KdError::InvalidArgument("empty Kraus list".into()))?;
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for k in kraus {
        if k.rows() != dim || k.cols() != dim {
            return Err(KdError::DimensionMismatch {
                expected: dim,
                found: k.rows().max(k.cols()),
            });
        }
        acc = acc.add(&k.adjoint().matmul(k)?)?;
    }
    Ok(acc.max_abs_diff(&ComplexMatrix::identity(dim)))
}

pub fn superop_from_kraus(kraus: &[ComplexMatrix], bp: &BasisPair) -> Result<KdSuperop> {
    let residual = channel_residual(kraus)?;
    if residual > CHANNEL_TOL {
        return Err(KdError::NotAChannel { residual });
    }
    let dim = bp.dim();
    if kraus[0].rows() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            found: kraus[0].rows(),
        });
    }
    bp.check_informationally_complete(ZERO_TOL)?;
    let v = bp.transition();
    let v_dag = v.adjoint();
    let d2 = dim * dim;
    // <b_j|a_i> for rows, 1/<b_l|a_k> for columns
    let num: Vec<C64> = v.as_slice().iter().map(|z| z.conj()).collect();
    let inv: Vec<C64> = v.as_slice().iter().map(|z| 1.0 / z.conj()).collect();

    let mut m = ComplexMatrix::zeros(d2, d2);
    for k_op in kraus {
        // <b_l|K†|b_j> = conj(<b_j|K|b_l>) = conj((V†KV)_jl)
        let in_b = v_dag.matmul(k_op)?.matmul(v)?;
        for i in 0..dim {
            for j in 0..dim {
                let row = i * dim + j;
                let n_ij = num[row];
                for k in 0..dim {
                    let a_part = n_ij * k_op[(i, k)];
                    if a_part == C_ZERO {
                        continue;
                    }
                    for l in 0..dim {
                        let col = k * dim + l;
                        m[(row, col)] += a_part * inv[col] * in_b[(j, l)].conj();
                    }
                }
            }
        }
    }
    KdSuperop::new(dim, m)
}

pub fn superop_from_unitary(u: &ComplexMatrix, bp: &BasisPair) -> Result<KdSuperop> {
    let residual = u.unitarity_residual();
    if residual > GATE_UNITARY_TOL {
        return Err(KdError::NotUnitary { residual });
    }
    superop_from_kraus(std::slice::from_ref(u), bp)
}

/// F_e = Tr(Ê) / D².
pub fn entanglement_fidelity(e: &KdSuperop) -> f64 {
    e.trace().re / (e.dim() * e.dim()) as f64
}

/// max |(Ê_{U†})_{ij,kl} - |<b_j|a_i>/<b_l|a_k>|² conj((Ê_U)_{kl,ij})|
pub fn inverse_relation_residual(u: &ComplexMatrix, bp: &BasisPair) -> Result<f64> {
    let forward = superop_from_unitary(u, bp)?;
    let inverse = superop_from_unitary(&u.adjoint(), bp)?;
    let dim = bp.dim();
    let w: Vec<f64> = bp
        .transition()
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    let d2 = dim * dim;
    let mut worst: f64 = 0.0;
    for r in 0..d2 {
        for c in 0..d2 {
            let predicted = forward.matrix()[(c, r)].conj() * (w[r] / w[c]);
            worst = worst.max((inverse.matrix()[(r, c)] - predicted).norm());
        }
    }
    Ok(worst)
}

/// A POVM element expressed as a functional on KD vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    dim: usize,
    f: Vec<C64>,
}

impl DualVector {
    pub fn new(dim: usize, f: Vec<C64>) -> Result<Self> {
        if f.len() != dim * dim {
            return Err(KdError::DimensionMismatch {
                expected: dim * dim,
                found: f.len(),
            });
        }
        Ok(Self { dim, f })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.f
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.f[i * self.dim + j]
    }

    /// <<F|Q>> = Σ_I F_I Q_I
    pub fn contract(&self, q: &KdDist) -> Result<C64> {
        if q.dim() != self.dim {
            return Err(KdError::DimensionMismatch {
                expected: self.dim,
                found: q.dim(),
            });
        }
        Ok(self.f.iter().zip(q.as_slice()).map(|(a, b)| a * b).sum())
    }

    pub fn linf(&self) -> f64 {
        self.f.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn l1(&self) -> f64 {
        self.f.iter().map(|z| z.norm()).sum()
    }
}

/// F_ij = <b_j|F|a_i> / <b_j|a_i>.
pub fn dual_vector(f: &ComplexMatrix, bp: &BasisPair) -> Result<DualVector> {
    let dim = bp.dim();
    if f.rows() != dim || f.cols() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            found: f.rows().max(f.cols()),
        });
    }
    bp.check_informationally_complete(ZERO_TOL)?;
    let v = bp.transition();
    let vf = v.adjoint().matmul(f)?;
    let entries = (0..dim * dim)
        .map(|flat| {
            let (i, j) = (flat / dim, flat % dim);
            vf[(j, i)] / v[(i, j)].conj()
        })
        .collect();
    DualVector::new(dim, entries)
}

/// <<F| Ê_N ··· Ê_1 |Q>>, with `ops[0]` applied first.
pub fn born_exact_complex(f: &DualVector, ops: &[KdSuperop], q: &KdDist) -> Result<C64> {
    let mut state = q.clone();
    for op in ops {
        state = op.apply(&state)?;
    }
    f.contract(&state)
}

pub fn born_exact(f: &DualVector, ops: &[KdSuperop], q: &KdDist) -> Result<f64> {
    Ok(born_exact_complex(f, ops, q)?.re)
}

/// Real non-negative entries with unit column sums.
pub fn is_stochastic(e: &KdSuperop, tol: f64) -> bool {
    let entries_ok = e
        .matrix()
        .as_slice()
        .iter()
        .all(|z| z.im.abs() <= tol && z.re >= -tol);
    entries_ok && e.column_sum_residual() <= tol
}

/// True when every input distribution that is KD positive stays KD positive.
pub fn preserves_positivity_on(e: &KdSuperop, inputs: &[KdDist], tol: f64) -> Result<bool> {
    for q in inputs.iter().filter(|q| is_kd_positive(q, tol)) {
        if !is_kd_positive(&e.apply(q)?, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Witness that U permutes both reference bases up to phases:
/// U|a_i> = e^{iθ_i}|a_{σ_A(i)}> and U|b_j> = e^{iφ_j}|b_{σ_B(j)}>.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenPermCertificate {
    pub sigma_a: Vec<usize>,
    pub theta: Vec<f64>,
    pub sigma_b: Vec<usize>,
    pub phi: Vec<f64>,
}

impl GenPermCertificate {
    /// σ_A ⊗ σ_B as a 0/1 superoperator.
    pub fn permutation_superop(&self) -> KdSuperop {
        let dim = self.sigma_a.len();
        let mut m = ComplexMatrix::zeros(dim * dim, dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                m[(self.sigma_a[k] * dim + self.sigma_b[l], k * dim + l)] = C_ONE;
            }
        }
        KdSuperop { dim, m }
    }

    /// Largest deviation between U acting on each basis vector and the phased
    /// image the certificate predicts.
    pub fn residual(&self, u: &ComplexMatrix, bp: &BasisPair) -> Result<f64> {
        let dim = bp.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            let image = u.apply(bp.a_state(i).amplitudes())?;
            let target = bp.a_state(self.sigma_a[i]);
            let ph = C64::from_polar(1.0, self.theta[i]);
            for (x, t) in image.iter().zip(target.amplitudes()) {
                worst = worst.max((x - ph * t).norm());
            }
        }
        for j in 0..dim {
            let image = u.apply(bp.b_state(j).amplitudes())?;
            let target = bp.b_state(self.sigma_b[j]);
            let ph = C64::from_polar(1.0, self.phi[j]);
            for (x, t) in image.iter().zip(target.amplitudes()) {
                worst = worst.max((x - ph * t).norm());
            }
        }
        Ok(worst)
    }
}

/// Reads off σ and phases when every column has exactly one entry of modulus
/// at least 1 - tol.
fn phased_permutation(m: &ComplexMatrix, tol: f64) -> Option<(Vec<usize>, Vec<f64>)> {
    let dim = m.cols();
    let mut sigma = Vec::with_capacity(dim);
    let mut phases = Vec::with_capacity(dim);
    let mut used = vec![false; dim];
    for c in 0..dim {
        let mut hits = (0..m.rows()).filter(|&r| m[(r, c)].norm() >= 1.0 - tol);
        let r = hits.next()?;
        if hits.next().is_some() || std::mem::replace(&mut used[r], true) {
            return None;
        }
        sigma.push(r);
        phases.push(m[(r, c)].arg());
    }
    Some((sigma, phases))
}

pub fn generalized_permutation_certificate(
    u: &ComplexMatrix,
    bp: &BasisPair,
    tol: f64,
) -> Result<Option<GenPermCertificate>> {
    let residual = u.unitarity_residual();
    if residual > GATE_UNITARY_TOL {
        return Err(KdError::NotUnitary { residual });
    }
    if u.rows() != bp.dim() {
        return Err(KdError::DimensionMismatch {
            expected: bp.dim(),
            found: u.rows(),
        });
    }
    let Some((sigma_a, theta)) = phased_permutation(u, tol) else {
        return Ok(None);
    };
    let v = bp.transition();
    let in_b = v.adjoint().matmul(u)?.matmul(v)?;
    let Some((sigma_b, phi)) = phased_permutation(&in_b, tol) else {
        return Ok(None);
    };
    Ok(Some(GenPermCertificate {
        sigma_a,
        theta,
        sigma_b,
        phi,
    }))
}
