//! Monte Carlo Born-rule estimation over KD index-pair paths.
//!
//! A path I_0 → I_1 → … → I_N is drawn with I_0 ~ |Q|/N[Q] and each I_k from
//! the normalised magnitudes of column I_{k-1} of the k-th gate superoperator.
//! The random variable
//!
//! ```text
//! z = N[Q] Ph(Q_{I_0}) Π_k ‖(Ê_k)_{·,I_{k-1}}‖₁ Ph((Ê_k)_{I_k,I_{k-1}}) F_{I_N}
//! ```
//!
//! is an unbiased estimator of Tr(F U ρ U†) bounded by the total
//! non-positivity N_T. When ρ, F and the basis pair factor over qudits, each
//! step only resamples the index pairs of the gate's targets.

use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{checked_pow, phase, ComplexMatrix, DensityMatrix, C_ONE};
use crate::error::{KdError, Result};
use crate::kd::{build_kd, BasisPair, KdDist};
use crate::superop::{dual_vector, superop_from_unitary, DualVector, KdSuperop, GATE_UNITARY_TOL};

pub const DEFAULT_PATH_CAP: f64 = 1e7;
pub const DEFAULT_SAMPLE_CAP: u64 = 200_000_000;
pub const DEFAULT_LANES: usize = 8;
/// Largest dimension for the dense single-register fallback.
pub const GLOBAL_DIM_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub targets: Vec<usize>,
    pub u: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr")]
pub struct Circuit {
    d: usize,
    n: usize,
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
struct CircuitRepr {
    d: usize,
    n: usize,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = KdError;
    fn try_from(r: CircuitRepr) -> Result<Self> {
        Circuit::new(r.d, r.n, r.gates)
    }
}

impl Circuit {
    pub fn new(d: usize, n: usize, gates: Vec<Gate>) -> Result<Self> {
        if d < 2 || n == 0 {
            return Err(KdError::InvalidCircuit(format!(
                "need d >= 2 and n >= 1, got d={d}, n={n}"
            )));
        }
        let mut c = Circuit {
            d,
            n,
            gates: Vec::new(),
        };
        for g in gates {
            c.push(g.targets, g.u)?;
        }
        Ok(c)
    }

    pub fn empty(d: usize, n: usize) -> Result<Self> {
        Self::new(d, n, Vec::new())
    }

    pub fn push(&mut self, targets: Vec<usize>, u: ComplexMatrix) -> Result<()> {
        if targets.is_empty() || targets.len() > 2 {
            return Err(KdError::InvalidCircuit(format!(
                "gates act on 1 or 2 qudits, got {}",
                targets.len()
            )));
        }
        if targets.iter().any(|&t| t >= self.n) {
            return Err(KdError::InvalidCircuit(format!(
                "target out of range in {targets:?}"
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(KdError::InvalidCircuit(format!(
                "repeated target in {targets:?}"
            )));
        }
        let local = checked_pow(self.d, targets.len())?;
        if u.rows() != local || u.cols() != local {
            return Err(KdError::DimensionMismatch {
                expected: local,
                found: u.rows().max(u.cols()),
            });
        }
        let residual = u.unitarity_residual();
        if residual > GATE_UNITARY_TOL {
            return Err(KdError::NotUnitary { residual });
        }
        self.gates.push(Gate { targets, u });
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn dim(&self) -> Result<usize> {
        checked_pow(self.d, self.n)
    }

    /// U_N ··· U_1 on the full register.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::identity(self.dim()?);
        for g in &self.gates {
            acc = embed_gate(&g.u, &g.targets, self.d, self.n)?.matmul(&acc)?;
        }
        Ok(acc)
    }
}

/// Place value of qudit `q` in a big-endian register of `n` qudits.
fn weight(d: usize, n: usize, q: usize) -> usize {
    d.pow((n - 1 - q) as u32)
}

/// Local big-endian index of the target digits, in target-list order.
fn gather(digits: &[usize], targets: &[usize], d: usize) -> usize {
    targets.iter().fold(0, |acc, &t| acc * d + digits[t])
}

fn scatter(digits: &mut [usize], targets: &[usize], d: usize, mut local: usize) {
    for &t in targets.iter().rev() {
        digits[t] = local % d;
        local /= d;
    }
}

/// Dense D×D unitary acting as `u` on `targets` and trivially elsewhere.
pub fn embed_gate(
    u: &ComplexMatrix,
    targets: &[usize],
    d: usize,
    n: usize,
) -> Result<ComplexMatrix> {
    let dim = checked_pow(d, n)?;
    let local = checked_pow(d, targets.len())?;
    if u.rows() != local {
        return Err(KdError::DimensionMismatch {
            expected: local,
            found: u.rows(),
        });
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0; n];
    for c in 0..dim {
        for (q, digit) in digits.iter_mut().enumerate() {
            *digit = (c / weight(d, n, q)) % d;
        }
        let c_loc = gather(&digits, targets, d);
        for r_loc in 0..local {
            scatter(&mut digits, targets, d, r_loc);
            let r = digits.iter().fold(0, |acc, &x| acc * d + x);
            out[(r, c)] = u[(r_loc, c_loc)];
        }
    }
    Ok(out)
}

/// Superoperator of `gate` over its targets, built from the targets' basis factors.
pub fn local_superop(gate: &Gate, bp: &BasisPair) -> Result<KdSuperop> {
    let factors = bp.factors().ok_or(KdError::NonProductBasis)?;
    let mut local = Vec::with_capacity(gate.targets.len());
    for &t in &gate.targets {
        local.push(
            factors
                .get(t)
                .ok_or_else(|| KdError::InvalidCircuit(format!("no basis factor for qudit {t}")))?
                .clone(),
        );
    }
    superop_from_unitary(&gate.u, &BasisPair::from_factors(local)?)
}

/// Dense D²×D² superoperator of a local one tensored with the identity.
pub fn embed_superop(
    local: &KdSuperop,
    targets: &[usize],
    d: usize,
    n: usize,
) -> Result<KdSuperop> {
    let dim = checked_pow(d, n)?;
    let kd = checked_pow(d, targets.len())?;
    if local.dim() != kd {
        return Err(KdError::DimensionMismatch {
            expected: kd,
            found: local.dim(),
        });
    }
    let mut m = ComplexMatrix::zeros(dim * dim, dim * dim);
    let (mut di, mut dj) = (vec![0; n], vec![0; n]);
    for col in 0..dim * dim {
        let (i, j) = (col / dim, col % dim);
        for q in 0..n {
            di[q] = (i / weight(d, n, q)) % d;
            dj[q] = (j / weight(d, n, q)) % d;
        }
        let c_loc = gather(&di, targets, d) * kd + gather(&dj, targets, d);
        for r_loc in 0..kd * kd {
            let e = local.matrix()[(r_loc, c_loc)];
            if e.norm() == 0.0 {
                continue;
            }
            scatter(&mut di, targets, d, r_loc / kd);
            scatter(&mut dj, targets, d, r_loc % kd);
            let fold = |v: &[usize]| v.iter().fold(0, |acc, &x| acc * d + x);
            m[(fold(&di) * dim + fold(&dj), col)] = e;
        }
    }
    KdSuperop::new(dim, m)
}

pub fn vector_l1(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Cumulative magnitudes, used for inverse-CDF draws.
#[derive(Debug, Clone)]
struct Cdf {
    cum: Vec<f64>,
    last_positive: usize,
}

impl Cdf {
    fn new(weights: impl Iterator<Item = f64>) -> Self {
        let mut cum = Vec::new();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (k, w) in weights.enumerate() {
            if w > 0.0 {
                last_positive = k;
            }
            acc += w;
            cum.push(acc);
        }
        Self { cum, last_positive }
    }

    fn total(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        let k = self.cum.partition_point(|&c| c <= u);
        k.min(self.last_positive)
    }
}

#[derive(Debug, Clone)]
struct LocalOp {
    targets: Vec<usize>,
    kd: usize,
    superop: KdSuperop,
    columns: Vec<Cdf>,
}

impl LocalOp {
    fn new(targets: Vec<usize>, superop: KdSuperop) -> Self {
        let kd = superop.dim();
        let m = superop.matrix();
        let columns = (0..kd * kd)
            .map(|c| Cdf::new((0..kd * kd).map(|r| m[(r, c)].norm())))
            .collect();
        Self {
            targets,
            kd,
            superop,
            columns,
        }
    }

    fn column_index(&self, i: &[usize], j: &[usize], d: usize) -> usize {
        gather(i, &self.targets, d) * self.kd + gather(j, &self.targets, d)
    }
}

/// One sampled path with its estimator value.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    /// `indices[k][q]` is the (i, j) pair of qudit q after step k.
    pub indices: Vec<Vec<(usize, usize)>>,
    pub z: C64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativityBudget {
    pub n_q: f64,
    pub gate_norms: Vec<f64>,
    pub f_inf: f64,
    pub n_t: f64,
}

/// Factorised initial distribution, gate superoperators and POVM dual.
#[derive(Debug, Clone)]
pub struct SamplingProblem {
    d: usize,
    n: usize,
    q: Vec<KdDist>,
    q_cdf: Vec<Cdf>,
    ops: Vec<LocalOp>,
    f: Vec<DualVector>,
}

impl SamplingProblem {
    /// `q` and `f` hold one factor per qudit; `ops` are (targets, local superop).
    pub fn new(
        d: usize,
        n: usize,
        q: Vec<KdDist>,
        ops: Vec<(Vec<usize>, KdSuperop)>,
        f: Vec<DualVector>,
    ) -> Result<Self> {
        if q.len() != n || f.len() != n {
            return Err(KdError::DimensionMismatch {
                expected: n,
                found: if q.len() != n { q.len() } else { f.len() },
            });
        }
        for (qq, ff) in q.iter().zip(&f) {
            if qq.dim() != d || ff.dim() != d {
                return Err(KdError::DimensionMismatch {
                    expected: d,
                    found: if qq.dim() != d { qq.dim() } else { ff.dim() },
                });
            }
            if vector_l1(qq.as_slice()) == 0.0 {
                return Err(KdError::ZeroDistribution);
            }
        }
        let mut local_ops = Vec::with_capacity(ops.len());
        for (targets, e) in ops {
            if targets.is_empty() || targets.iter().any(|&t| t >= n) {
                return Err(KdError::InvalidCircuit(format!("bad targets {targets:?}")));
            }
            let kd = checked_pow(d, targets.len())?;
            if e.dim() != kd {
                return Err(KdError::DimensionMismatch {
                    expected: kd,
                    found: e.dim(),
                });
            }
            local_ops.push(LocalOp::new(targets, e));
        }
        let q_cdf = q
            .iter()
            .map(|qq| Cdf::new(qq.as_slice().iter().map(|z| z.norm())))
            .collect();
        Ok(Self {
            d,
            n,
            q,
            q_cdf,
            ops: local_ops,
            f,
        })
    }

    /// Product input ρ = ⊗ρ_q, F = ⊗F_q over a product basis pair.
    pub fn product(
        circuit: &Circuit,
        bp: &BasisPair,
        rho_factors: &[DensityMatrix],
        f_factors: &[ComplexMatrix],
    ) -> Result<Self> {
        let factors = bp.factors().ok_or(KdError::NonProductBasis)?;
        let (d, n) = (circuit.d(), circuit.n());
        if factors.len() != n || factors[0].rows() != d {
            return Err(KdError::DimensionMismatch {
                expected: n,
                found: factors.len(),
            });
        }
        if rho_factors.len() != n || f_factors.len() != n {
            return Err(KdError::DimensionMismatch {
                expected: n,
                found: rho_factors.len().min(f_factors.len()),
            });
        }
        let mut q = Vec::with_capacity(n);
        let mut f = Vec::with_capacity(n);
        for k in 0..n {
            let single = BasisPair::from_factors(vec![factors[k].clone()])?;
            q.push(build_kd(&rho_factors[k], &single)?);
            f.push(dual_vector(&f_factors[k], &single)?);
        }
        let ops = circuit
            .gates()
            .iter()
            .map(|g| Ok((g.targets.clone(), local_superop(g, bp)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, n, q, ops, f)
    }

    /// Dense fallback treating the register as one qudit of dimension D.
    pub fn global(
        circuit: &Circuit,
        bp: &BasisPair,
        rho: &DensityMatrix,
        f: &ComplexMatrix,
    ) -> Result<Self> {
        let dim = circuit.dim()?;
        if dim > GLOBAL_DIM_CAP {
            return Err(KdError::DimensionCap {
                requested: dim,
                cap: GLOBAL_DIM_CAP,
            });
        }
        if bp.dim() != dim {
            return Err(KdError::DimensionMismatch {
                expected: dim,
                found: bp.dim(),
            });
        }
        let ops = circuit
            .gates()
            .iter()
            .map(|g| {
                let full = embed_gate(&g.u, &g.targets, circuit.d(), circuit.n())?;
                Ok((vec![0], superop_from_unitary(&full, bp)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            dim,
            1,
            vec![build_kd(rho, bp)?],
            ops,
            vec![dual_vector(f, bp)?],
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    pub fn local_superops(&self) -> impl Iterator<Item = (&[usize], &KdSuperop)> {
        self.ops
            .iter()
            .map(|op| (op.targets.as_slice(), &op.superop))
    }

    pub fn negativity_budget(&self) -> NegativityBudget {
        let n_q = self.q.iter().map(|q| vector_l1(q.as_slice())).product();
        let gate_norms: Vec<f64> = self.ops.iter().map(|op| op.superop.induced_l1()).collect();
        let f_inf = self.f.iter().map(DualVector::linf).product();
        let n_t = n_q * gate_norms.iter().product::<f64>() * f_inf;
        NegativityBudget {
            n_q,
            gate_norms,
            f_inf,
            n_t,
        }
    }

    /// Number of index chains with a possibly nonzero weight.
    pub fn path_count(&self) -> f64 {
        let dim = (self.d as f64).powi(self.n as i32);
        self.ops
            .iter()
            .fold(dim * dim, |acc, op| acc * (op.kd * op.kd) as f64)
    }

    /// <<F| Ê_N ··· Ê_1 |Q>> by propagating the dense KD vector.
    pub fn exact_value(&self) -> Result<C64> {
        let dim = checked_pow(self.d, self.n)?;
        let (mut di, mut dj) = (vec![0; self.n], vec![0; self.n]);
        let split = |flat: usize, di: &mut [usize], dj: &mut [usize]| {
            let (i, j) = (flat / dim, flat % dim);
            for q in 0..self.n {
                di[q] = (i / weight(self.d, self.n, q)) % self.d;
                dj[q] = (j / weight(self.d, self.n, q)) % self.d;
            }
        };
        let fold = |v: &[usize]| v.iter().fold(0, |acc, &x| acc * self.d + x);
        let mut state: Vec<C64> = (0..dim * dim)
            .map(|flat| {
                split(flat, &mut di, &mut dj);
                (0..self.n).map(|q| self.q[q].get(di[q], dj[q])).product()
            })
            .collect();
        for op in &self.ops {
            let mut next = vec![C64::new(0.0, 0.0); dim * dim];
            for (flat, &v) in state.iter().enumerate() {
                if v.norm() == 0.0 {
                    continue;
                }
                split(flat, &mut di, &mut dj);
                let col = op.column_index(&di, &dj, self.d);
                for r in 0..op.kd * op.kd {
                    let e = op.superop.matrix()[(r, col)];
                    if e.norm() == 0.0 {
                        continue;
                    }
                    scatter(&mut di, &op.targets, self.d, r / op.kd);
                    scatter(&mut dj, &op.targets, self.d, r % op.kd);
                    next[fold(&di) * dim + fold(&dj)] += e * v;
                }
            }
            state = next;
        }
        Ok(state
            .iter()
            .enumerate()
            .map(|(flat, &v)| {
                split(flat, &mut di, &mut dj);
                v * self.f_value(&di, &dj)
            })
            .sum())
    }

    fn f_value(&self, i: &[usize], j: &[usize]) -> C64 {
        (0..self.n).map(|q| self.f[q].get(i[q], j[q])).product()
    }

    /// Draws one path; when `record` is given, every step's pairs are pushed.
    fn draw_path<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        i: &mut [usize],
        j: &mut [usize],
        mut record: Option<&mut Vec<Vec<(usize, usize)>>>,
    ) -> C64 {
        let d = self.d;
        let mut z = C_ONE;
        for q in 0..self.n {
            let flat = self.q_cdf[q].draw(rng);
            i[q] = flat / d;
            j[q] = flat % d;
            z *= self.q_cdf[q].total() * phase(self.q[q].as_slice()[flat]);
        }
        if let Some(rec) = record.as_deref_mut() {
            rec.push(i.iter().copied().zip(j.iter().copied()).collect());
        }
        for op in &self.ops {
            let col = op.column_index(i, j, d);
            let cdf = &op.columns[col];
            let r = cdf.draw(rng);
            z *= cdf.total() * phase(op.superop.matrix()[(r, col)]);
            scatter(i, &op.targets, d, r / op.kd);
            scatter(j, &op.targets, d, r % op.kd);
            if let Some(rec) = record.as_deref_mut() {
                rec.push(i.iter().copied().zip(j.iter().copied()).collect());
            }
        }
        z * self.f_value(i, j)
    }

    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> PathSample {
        let (mut i, mut j) = (vec![0; self.n], vec![0; self.n]);
        let mut indices = Vec::with_capacity(self.ops.len() + 1);
        let z = self.draw_path(rng, &mut i, &mut j, Some(&mut indices));
        PathSample {
            indices,
            z,
            x: z.re,
        }
    }

    /// Sum of Q_{I_0} Π (Ê_k)_{I_k,I_{k-1}} F_{I_N} over all chains, paired
    /// with the expectation of z under the sampling distribution.
    fn enumerate(&self, cap: f64) -> Result<(C64, C64)> {
        let paths = self.path_count();
        if paths > cap {
            return Err(KdError::PathSpaceTooLarge { paths, cap });
        }
        let d = self.d;
        let mut i = vec![0; self.n];
        let mut j = vec![0; self.n];
        let mut acc = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let per_qudit = d * d;
        let total = per_qudit.pow(self.n as u32);
        for start in 0..total {
            let mut rest = start;
            let mut weight = C_ONE;
            let mut prob = 1.0;
            let mut z = C_ONE;
            for q in (0..self.n).rev() {
                let flat = rest % per_qudit;
                rest /= per_qudit;
                i[q] = flat / d;
                j[q] = flat % d;
                let v = self.q[q].as_slice()[flat];
                weight *= v;
                let norm = self.q_cdf[q].total();
                prob *= v.norm() / norm;
                z *= norm * phase(v);
            }
            if prob == 0.0 {
                continue;
            }
            self.descend(0, &mut i, &mut j, weight, prob, z, &mut acc);
        }
        Ok(acc)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        step: usize,
        i: &mut [usize],
        j: &mut [usize],
        weight: C64,
        prob: f64,
        z: C64,
        acc: &mut (C64, C64),
    ) {
        if step == self.ops.len() {
            let f = self.f_value(i, j);
            acc.0 += weight * f;
            acc.1 += prob * z * f;
            return;
        }
        let op = &self.ops[step];
        let col = op.column_index(i, j, self.d);
        let norm = op.columns[col].total();
        let (saved_i, saved_j): (Vec<usize>, Vec<usize>) = (
            op.targets.iter().map(|&t| i[t]).collect(),
            op.targets.iter().map(|&t| j[t]).collect(),
        );
        for r in 0..op.kd * op.kd {
            let e = op.superop.matrix()[(r, col)];
            if e.norm() == 0.0 {
                continue;
            }
            scatter(i, &op.targets, self.d, r / op.kd);
            scatter(j, &op.targets, self.d, r % op.kd);
            self.descend(
                step + 1,
                i,
                j,
                weight * e,
                prob * e.norm() / norm,
                z * norm * phase(e),
                acc,
            );
        }
        for (k, &t) in op.targets.iter().enumerate() {
            i[t] = saved_i[k];
            j[t] = saved_j[k];
        }
    }

    /// Exact path-sum expansion of the Born probability.
    pub fn exhaustive_path_sum(&self, cap: f64) -> Result<C64> {
        Ok(self.enumerate(cap)?.0)
    }

    /// E[z] computed by weighting every path's estimator value by its probability.
    pub fn exhaustive_expectation(&self, cap: f64) -> Result<C64> {
        Ok(self.enumerate(cap)?.1)
    }

    /// Mean of z over `samples` paths split across `lanes` independent streams.
    pub fn mean_estimate(&self, samples: u64, seed: u64, lanes: usize) -> C64 {
        if samples == 0 {
            return C64::new(0.0, 0.0);
        }
        let lanes = lanes.max(1) as u64;
        let sums: Vec<C64> = (0..lanes)
            .into_par_iter()
            .map(|lane| {
                let count = samples / lanes + u64::from(lane < samples % lanes);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(lane);
                let (mut i, mut j) = (vec![0; self.n], vec![0; self.n]);
                let mut sum = C64::new(0.0, 0.0);
                for _ in 0..count {
                    sum += self.draw_path(&mut rng, &mut i, &mut j, None);
                }
                sum
            })
            .collect();
        sums.iter().sum::<C64>() / samples as f64
    }
}

/// (2/ε²) N_T² ln(2/δ), before rounding up.
pub fn hoeffding_samples(epsilon: f64, delta: f64, n_t: f64) -> f64 {
    2.0 / (epsilon * epsilon) * n_t * n_t * (2.0 / delta).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    pub sample_cap: u64,
    pub lanes: usize,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            sample_cap: DEFAULT_SAMPLE_CAP,
            lanes: DEFAULT_LANES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    /// Mean imaginary part of z; zero in expectation.
    pub imag_mean: f64,
    pub samples_used: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub n_t: f64,
    pub gate_norms: Vec<f64>,
    pub seed: u64,
    pub lanes: usize,
    pub exact: Option<f64>,
    pub elapsed_seconds: f64,
}

impl EstimateReport {
    pub const CSV_HEADER: &'static str = "estimate,exact,n_t,samples,seconds";

    pub fn to_csv_row(&self) -> String {
        let exact = self.exact.map(|e| e.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{}",
            self.estimate, exact, self.n_t, self.samples_used, self.elapsed_seconds
        )
    }

    /// Equality ignoring wall-clock time.
    pub fn same_outcome(&self, other: &EstimateReport) -> bool {
        let mut a = self.clone();
        a.elapsed_seconds = other.elapsed_seconds;
        &a == other
    }
}

pub fn estimate_born(
    problem: &SamplingProblem,
    epsilon: f64,
    delta: f64,
    seed: u64,
    config: EstimateConfig,
) -> Result<EstimateReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(KdError::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(KdError::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let budget = problem.negativity_budget();
    let required = hoeffding_samples(epsilon, delta, budget.n_t).ceil();
    if !required.is_finite() || required > config.sample_cap as f64 {
        return Err(KdError::BudgetExceeded {
            required,
            cap: config.sample_cap,
        });
    }
    let samples = required as u64;
    let started = Instant::now();
    let mean = problem.mean_estimate(samples, seed, config.lanes);
    Ok(EstimateReport {
        estimate: mean.re,
        imag_mean: mean.im,
        samples_used: samples,
        epsilon,
        delta,
        n_t: budget.n_t,
        gate_norms: budget.gate_norms,
        seed,
        lanes: config.lanes.max(1),
        exact: None,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}
