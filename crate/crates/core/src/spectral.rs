//! Fourier structure of KD distributions over QFT^{⊗n} basis pairs, and the
//! map to the odd-dimension discrete Wigner function.
//!
//! Two transforms are kept apart on purpose:
//!
//! * hat:   Q̂(x,y) = Σ_{a,b} ω^{-(a·x + b·y)} Q(a,b), no prefactor;
//! * tilde: Q̃(a,b) = d^{-n} Σ_{i,j} ω^{-i·a + j·b} Q(i,j).
//!
//! Table indices are flat Z_d^n vectors, row-major over (first, second).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    checked_pow, complex_from, flat_dot, flat_neg, omega, pairs_from, ComplexMatrix, DensityMatrix,
    C_ZERO,
};
use crate::error::{KdError, Result};
use crate::kd::{BasisPair, KdDist, ZERO_TOL};

/// Largest imaginary part tolerated before a Wigner table is rejected.
pub const WIGNER_IMAG_TOL: f64 = 1e-9;

/// Complex table over Z_d^n × Z_d^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct ComplexTable {
    d: usize,
    n: usize,
    values: Vec<C64>,
}

/// Weyl-Heisenberg expectation table indexed by (a, b).
pub type WhTable = ComplexTable;

#[derive(Serialize, Deserialize)]
struct TableRepr {
    d: usize,
    n: usize,
    values: Vec<[f64; 2]>,
}

impl TryFrom<TableRepr> for ComplexTable {
    type Error = KdError;
    fn try_from(r: TableRepr) -> Result<Self> {
        ComplexTable::new(r.d, r.n, complex_from(&r.values))
    }
}

impl From<ComplexTable> for TableRepr {
    fn from(t: ComplexTable) -> Self {
        TableRepr {
            d: t.d,
            n: t.n,
            values: pairs_from(&t.values),
        }
    }
}

impl ComplexTable {
    pub fn new(d: usize, n: usize, values: Vec<C64>) -> Result<Self> {
        let dim = checked_pow(d, n)?;
        if values.len() != dim * dim {
            return Err(KdError::DimensionMismatch {
                expected: dim * dim,
                found: values.len(),
            });
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(KdError::InvalidMatrix("non-finite table entry".into()));
        }
        Ok(Self { d, n, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.values.len().isqrt()
    }

    pub fn get(&self, x: usize, y: usize) -> C64 {
        self.values[x * self.dim() + y]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &ComplexTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn as_matrix(&self) -> ComplexMatrix {
        let dim = self.dim();
        ComplexMatrix::new(dim, dim, self.values.clone()).expect("square table")
    }
}

/// Real Wigner table W(p, q) for odd d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WignerRepr", into = "WignerRepr")]
pub struct WignerDist {
    d: usize,
    n: usize,
    w: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WignerRepr {
    d: usize,
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<WignerRepr> for WignerDist {
    type Error = KdError;
    fn try_from(r: WignerRepr) -> Result<Self> {
        WignerDist::new(r.d, r.n, r.values)
    }
}

impl From<WignerDist> for WignerRepr {
    fn from(w: WignerDist) -> Self {
        WignerRepr {
            d: w.d,
            n: w.n,
            values: w.w,
        }
    }
}

impl WignerDist {
    pub fn new(d: usize, n: usize, w: Vec<f64>) -> Result<Self> {
        require_odd(d)?;
        let dim = checked_pow(d, n)?;
        if w.len() != dim * dim {
            return Err(KdError::DimensionMismatch {
                expected: dim * dim,
                found: w.len(),
            });
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(KdError::InvalidMatrix("non-finite Wigner entry".into()));
        }
        Ok(Self { d, n, w })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.w.len().isqrt()
    }

    pub fn get(&self, p: usize, q: usize) -> f64 {
        self.w[p * self.dim() + q]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Σ_p W(p, q), indexed by q.
    pub fn marginal_q(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|q| (0..dim).map(|p| self.get(p, q)).sum())
            .collect()
    }

    /// Σ_q W(p, q), indexed by p.
    pub fn marginal_p(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|p| (0..dim).map(|q| self.get(p, q)).sum())
            .collect()
    }

    pub fn max_abs_diff(&self, other: &WignerDist) -> f64 {
        self.w
            .iter()
            .zip(&other.w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn require_odd(d: usize) -> Result<()> {
    if d.is_multiple_of(2) {
        return Err(KdError::EvenDimension(d));
    }
    Ok(())
}

/// 2^{-1} mod d for odd d.
pub fn half(d: usize) -> Result<usize> {
    require_odd(d)?;
    Ok(d.div_ceil(2) % d)
}

/// (d, n) of a QFT^{⊗n} pair matching the table size.
fn fourier_layout(q: &KdDist, bp: &BasisPair) -> Result<(usize, usize)> {
    let (d, n) = bp.qft_layout().ok_or(KdError::WrongBasisFamily)?;
    if q.dim() != bp.dim() {
        return Err(KdError::DimensionMismatch {
            expected: bp.dim(),
            found: q.dim(),
        });
    }
    Ok((d, n))
}

/// F_{x,a} = ω^{sign·x·a} over Z_d^n.
fn fourier_kernel(d: usize, n: usize, negative: bool) -> ComplexMatrix {
    let dim = d.pow(n as u32);
    ComplexMatrix::from_fn(dim, dim, |x, a| {
        let k = flat_dot(d, n, x, a);
        omega(d, if negative { d - k } else { k })
    })
}

/// max_{u,v} |Q_uv - Σ_ij (<a_i|b_v><b_v|a_u><a_u|b_j> / <a_i|b_j>) Q*_ij|
pub fn hermiticity_residual(q: &KdDist, bp: &BasisPair) -> Result<f64> {
    bp.check_informationally_complete(ZERO_TOL)?;
    let dim = bp.dim();
    if q.dim() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            found: q.dim(),
        });
    }
    let v = bp.transition();
    // inner[u][i] = Σ_j <a_u|b_j> Q*_ij / <a_i|b_j>
    let mut worst: f64 = 0.0;
    for u in 0..dim {
        let inner: Vec<C64> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| v[(u, j)] * q.get(i, j).conj() / v[(i, j)])
                    .sum()
            })
            .collect();
        for vv in 0..dim {
            let mirrored: C64 =
                (0..dim).map(|i| v[(i, vv)] * inner[i]).sum::<C64>() * v[(u, vv)].conj();
            worst = worst.max((q.get(u, vv) - mirrored).norm());
        }
    }
    Ok(worst)
}

/// Unnormalised transform with both signs negative, on any table.
pub fn hat_dft_table(t: &ComplexTable) -> ComplexTable {
    let p = fourier_kernel(t.d, t.n, true);
    let out = p
        .matmul(&t.as_matrix())
        .and_then(|m| m.matmul(&p))
        .expect("square");
    ComplexTable {
        d: t.d,
        n: t.n,
        values: out.into_vec(),
    }
}

pub fn kd_table(q: &KdDist, bp: &BasisPair) -> Result<ComplexTable> {
    let (d, n) = fourier_layout(q, bp)?;
    ComplexTable::new(d, n, q.as_slice().to_vec())
}

pub fn hat_dft(q: &KdDist, bp: &BasisPair) -> Result<ComplexTable> {
    Ok(hat_dft_table(&kd_table(q, bp)?))
}

/// max_{x,y} |Q̂(-x,-y) - ω^{x·y} Q̂(x,y)*|
pub fn self_similarity_residual(qhat: &ComplexTable) -> f64 {
    let (d, n, dim) = (qhat.d, qhat.n, qhat.dim());
    let mut worst: f64 = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            let mirrored = qhat.get(flat_neg(d, n, x), flat_neg(d, n, y));
            let predicted = omega(d, flat_dot(d, n, x, y)) * qhat.get(x, y).conj();
            worst = worst.max((mirrored - predicted).norm());
        }
    }
    worst
}

/// max_{x,y} |hat(Q*)(x,y) - ω^{-x·y} Q̂(x,y)|
pub fn convolution_residual(q: &KdDist, bp: &BasisPair) -> Result<f64> {
    let table = kd_table(q, bp)?;
    let conj = ComplexTable {
        values: table.values.iter().map(|z| z.conj()).collect(),
        ..table.clone()
    };
    let (qh, ch) = (hat_dft_table(&table), hat_dft_table(&conj));
    let (d, n, dim) = (table.d, table.n, table.dim());
    let mut worst: f64 = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            let k = flat_dot(d, n, x, y);
            worst = worst.max((ch.get(x, y) - omega(d, d - k) * qh.get(x, y)).norm());
        }
    }
    Ok(worst)
}

/// Ω(a,b) = d^{-n} ω^{a·b}
pub fn omega_kernel(d: usize, n: usize) -> Result<ComplexTable> {
    let dim = checked_pow(d, n)?;
    let scale = 1.0 / dim as f64;
    let values = (0..dim * dim)
        .map(|flat| omega(d, flat_dot(d, n, flat / dim, flat % dim)) * scale)
        .collect();
    ComplexTable::new(d, n, values)
}

/// One representative (x, y) per orbit {(x,y), (-x,-y)}: the smaller flat index.
pub fn fundamental_domain(d: usize, n: usize) -> Vec<(usize, usize)> {
    let dim = d.pow(n as u32);
    (0..dim * dim)
        .filter(|&flat| {
            let (x, y) = (flat / dim, flat % dim);
            flat <= flat_neg(d, n, x) * dim + flat_neg(d, n, y)
        })
        .map(|flat| (flat / dim, flat % dim))
        .collect()
}

/// Rebuilds a self-similar table from its fundamental-domain entries; the
/// remaining entries of `partial` are ignored.
pub fn complete_self_similar(partial: &ComplexTable) -> ComplexTable {
    let (d, n, dim) = (partial.d, partial.n, partial.dim());
    let mut values = vec![C_ZERO; dim * dim];
    for (x, y) in fundamental_domain(d, n) {
        let v = partial.get(x, y);
        values[x * dim + y] = v;
        let (mx, my) = (flat_neg(d, n, x), flat_neg(d, n, y));
        if (mx, my) != (x, y) {
            values[mx * dim + my] = omega(d, flat_dot(d, n, x, y)) * v.conj();
        }
    }
    ComplexTable { d, n, values }
}

pub fn tilde_dft(q: &KdDist, bp: &BasisPair) -> Result<WhTable> {
    let table = kd_table(q, bp)?;
    let (d, n) = (table.d, table.n);
    let scale = C64::new(1.0 / d.pow(n as u32) as f64, 0.0);
    let out = fourier_kernel(d, n, true)
        .matmul(&table.as_matrix())?
        .matmul(&fourier_kernel(d, n, false))?
        .scale(scale);
    ComplexTable::new(d, n, out.into_vec())
}

/// Q(i,j) = d^{-n} Σ_{a,b} ω^{i·a - j·b} Q̃(a,b)
pub fn inverse_tilde_dft(t: &WhTable) -> Result<KdDist> {
    let (d, n) = (t.d, t.n);
    let scale = C64::new(1.0 / d.pow(n as u32) as f64, 0.0);
    let out = fourier_kernel(d, n, false)
        .matmul(&t.as_matrix())?
        .matmul(&fourier_kernel(d, n, true))?
        .scale(scale);
    KdDist::from_matrix(&out)
}

/// d^{-n} Tr(ρ Z^a X^b), computed from matrix elements.
pub fn wh_expectations(rho: &DensityMatrix, d: usize, n: usize) -> Result<WhTable> {
    let dim = checked_pow(d, n)?;
    if rho.dim() != dim {
        return Err(KdError::DimensionMismatch {
            expected: dim,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let scale = 1.0 / dim as f64;
    // Tr(ρ Z^a X^b) = Σ_m ω^{a·(m+b)} ρ_{m, m+b}
    let values = (0..dim * dim)
        .map(|flat| {
            let (a, b) = (flat / dim, flat % dim);
            (0..dim)
                .map(|mm| {
                    let shifted = add_flat(d, n, mm, b);
                    omega(d, flat_dot(d, n, a, shifted)) * m[(mm, shifted)]
                })
                .sum::<C64>()
                * scale
        })
        .collect();
    ComplexTable::new(d, n, values)
}

fn add_flat(d: usize, n: usize, a: usize, b: usize) -> usize {
    let (mut a, mut b) = (a, b);
    let (mut out, mut place) = (0, 1);
    for _ in 0..n {
        out += ((a % d + b % d) % d) * place;
        place *= d;
        a /= d;
        b /= d;
    }
    out
}

/// T(a,b) = ω^{-(a·b)/2} Q̃(a,b)*
pub fn phased_wh_table(t: &WhTable) -> Result<WhTable> {
    let (d, n, dim) = (t.d, t.n, t.dim());
    let h = half(d)?;
    let values = (0..dim * dim)
        .map(|flat| {
            let k = flat_dot(d, n, flat / dim, flat % dim) * h % d;
            omega(d, d - k) * t.values[flat].conj()
        })
        .collect();
    ComplexTable::new(d, n, values)
}

/// Inverse of [`phased_wh_table`].
pub fn unphased_wh_table(t: &WhTable) -> Result<WhTable> {
    let (d, n, dim) = (t.d, t.n, t.dim());
    let h = half(d)?;
    let values = (0..dim * dim)
        .map(|flat| {
            let k = flat_dot(d, n, flat / dim, flat % dim) * h % d;
            (omega(d, k) * t.values[flat]).conj()
        })
        .collect();
    ComplexTable::new(d, n, values)
}

/// W(p,q) = d^{-n} Σ_{r,s} ω^{p·s - q·r} T(r,s)
pub fn kd_to_wigner(q: &KdDist, bp: &BasisPair) -> Result<WignerDist> {
    kd_to_wigner_with_tol(q, bp, WIGNER_IMAG_TOL)
}

/// As [`kd_to_wigner`], rejecting imaginary parts above `imag_tol`.
pub fn kd_to_wigner_with_tol(q: &KdDist, bp: &BasisPair, imag_tol: f64) -> Result<WignerDist> {
    let (d, n, w) = wigner_complex(q, bp)?;
    let residue = max_imag(&w);
    if residue > imag_tol {
        return Err(KdError::NotHermitian { residue });
    }
    WignerDist::new(d, n, w.as_slice().iter().map(|z| z.re).collect())
}

/// Largest imaginary part of the pre-projection Wigner table.
pub fn wigner_imaginary_residue(q: &KdDist, bp: &BasisPair) -> Result<f64> {
    Ok(max_imag(&wigner_complex(q, bp)?.2))
}

fn max_imag(w: &ComplexMatrix) -> f64 {
    w.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

fn wigner_complex(q: &KdDist, bp: &BasisPair) -> Result<(usize, usize, ComplexMatrix)> {
    let (d, n) = fourier_layout(q, bp)?;
    require_odd(d)?;
    let t = phased_wh_table(&tilde_dft(q, bp)?)?;
    let dim = t.dim();
    // (P* Tᵀ P)_{pq} with P_{r,q} = ω^{-r·q}
    let w = fourier_kernel(d, n, false)
        .matmul(&t.as_matrix().transpose())?
        .matmul(&fourier_kernel(d, n, true))?
        .scale(C64::new(1.0 / dim as f64, 0.0));
    Ok((d, n, w))
}

/// Inverse symplectic transform, un-phase, conjugate, inverse tilde transform.
pub fn wigner_to_kd(w: &WignerDist) -> Result<KdDist> {
    let (d, n, dim) = (w.d, w.n, w.dim());
    let wm = ComplexMatrix::from_fn(dim, dim, |p, q| C64::new(w.get(p, q), 0.0));
    // T(r,s) = d^{-n} Σ_{p,q} ω^{q·r - p·s} W(p,q) = d^{-n} (P* Wᵀ P)_{rs}
    let t = fourier_kernel(d, n, false)
        .matmul(&wm.transpose())?
        .matmul(&fourier_kernel(d, n, true))?
        .scale(C64::new(1.0 / dim as f64, 0.0));
    let t = ComplexTable::new(d, n, t.into_vec())?;
    inverse_tilde_dft(&unphased_wh_table(&t)?)
}

/// A^{p,q} = d^{-n} Σ_{r,s} ω^{p·s - q·r} ω^{-(r·s)/2} Z^r X^s
pub fn phase_point_operator(p: usize, q: usize, d: usize, n: usize) -> Result<ComplexMatrix> {
    let h = half(d)?;
    let dim = checked_pow(d, n)?;
    if p >= dim || q >= dim {
        return Err(KdError::InvalidArgument(format!(
            "phase point ({p}, {q}) out of range"
        )));
    }
    let mut a = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for s in 0..dim {
            let k = (flat_dot(d, n, p, s) + d - flat_dot(d, n, q, r) + d
                - flat_dot(d, n, r, s) * h % d)
                % d;
            let coeff = omega(d, k);
            // (Z^r X^s)_{m+s, m} = ω^{r·(m+s)}
            for m in 0..dim {
                let row = add_flat(d, n, m, s);
                a[(row, m)] += coeff * omega(d, flat_dot(d, n, r, row));
            }
        }
    }
    Ok(a.scale(C64::new(1.0 / dim as f64, 0.0)))
}

/// W(p,q) = d^{-n} Tr(ρ A^{p,q}) by direct construction of every A^{p,q}.
pub fn wigner_from_phase_points(rho: &DensityMatrix, d: usize, n: usize) -> Result<WignerDist> {
    let dim = checked_pow(d, n)?;
    let mut w = Vec::with_capacity(dim * dim);
    for p in 0..dim {
        for q in 0..dim {
            let a = phase_point_operator(p, q, d, n)?;
            w.push(rho.expectation(&a)?.re / dim as f64);
        }
    }
    WignerDist::new(d, n, w)
}
