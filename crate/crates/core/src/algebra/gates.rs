use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{ComplexMatrix, QuditIndexVector, C_ONE};
use crate::error::{KdError, Result};

/// ω^k with ω = exp(2πi/d); the exponent is reduced mod d first.
pub fn omega(d: usize, k: usize) -> C64 {
    let k = k % d;
    C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
}

/// Single-qudit Fourier matrix, entry (j, k) = d^{-1/2} ω^{jk}.
pub fn qft_matrix(d: usize) -> ComplexMatrix {
    assert!(d >= 2, "qft_matrix needs d >= 2");
    let norm = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| omega(d, j * k) * norm)
}

pub fn hadamard() -> ComplexMatrix {
    qft_matrix(2)
}

/// Clock operator Z = Σ_m ω^m |m><m|.
pub fn clock(d: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (0..d).map(|m| omega(d, m)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// Shift operator X = Σ_m |m+1><m|.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        m[((k + 1) % d, k)] = C_ONE;
    }
    m
}

/// Z^a = Σ_m ω^{a·m} |m><m| over Z_d^n.
pub fn wh_z(a: &QuditIndexVector) -> ComplexMatrix {
    let (d, n) = (a.d(), a.n());
    let diag: Vec<C64> = QuditIndexVector::all(d, n)
        .map(|m| omega(d, a.dot(&m)))
        .collect();
    ComplexMatrix::diagonal(&diag)
}

/// X^b = Σ_m |m+b><m| over Z_d^n.
pub fn wh_x(b: &QuditIndexVector) -> ComplexMatrix {
    let (d, n) = (b.d(), b.n());
    let dim = d.pow(n as u32);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for m in QuditIndexVector::all(d, n) {
        out[(m.add(b).to_index(), m.to_index())] = C_ONE;
    }
    out
}

/// Matrix sending |i> to |perm[i]>.
pub fn permutation_matrix(perm: &[usize]) -> Result<ComplexMatrix> {
    let dim = perm.len();
    let mut seen = vec![false; dim];
    for &p in perm {
        if p >= dim || std::mem::replace(&mut seen[p], true) {
            return Err(KdError::InvalidArgument(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (i, &p) in perm.iter().enumerate() {
        out[(p, i)] = C_ONE;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random::random_index_vector;

    #[test]
    fn qft_two_is_hadamard() {
        let h = qft_matrix(2);
        let s = 1.0 / 2f64.sqrt();
        let expected = ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn qft_three_first_column_constant() {
        let f = qft_matrix(3);
        for r in 0..3 {
            assert!((f[(r, 0)] - C64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn qft_unitary_and_symmetric() {
        for d in 2..=8 {
            let f = qft_matrix(d);
            assert!(f.unitarity_residual() < 1e-12, "d = {d}");
            assert!(f.max_abs_diff(&f.transpose()) < 1e-15);
        }
    }

    #[test]
    fn zero_vectors_give_identity() {
        let zero = QuditIndexVector::zero(3, 2);
        assert_eq!(wh_z(&zero), ComplexMatrix::identity(9));
        assert_eq!(wh_x(&zero), ComplexMatrix::identity(9));
    }

    #[test]
    fn shift_wraps() {
        let b = QuditIndexVector::new(3, vec![1]).unwrap();
        let x = wh_x(&b);
        let ket2 = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C_ONE];
        let out = x.apply(&ket2).unwrap();
        assert_eq!(out[0], C_ONE);
        assert_eq!(x, shift(3));
        assert_eq!(wh_z(&b), clock(3));
    }

    #[test]
    fn weyl_commutation_relation() {
        // X^b Z^a = ω^{-a·b} Z^a X^b
        for seed in 0..20 {
            let a = random_index_vector(3, 2, seed);
            let b = random_index_vector(3, 2, seed + 1000);
            let lhs = wh_x(&b).matmul(&wh_z(&a)).unwrap();
            let k = (3 - a.dot(&b)) % 3;
            let rhs = wh_z(&a).matmul(&wh_x(&b)).unwrap().scale(omega(3, k));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn group_law_exhaustive_d3_n2() {
        for b in QuditIndexVector::all(3, 2) {
            for c in QuditIndexVector::all(3, 2) {
                let prod = wh_x(&b).matmul(&wh_x(&c)).unwrap();
                assert!(prod.max_abs_diff(&wh_x(&b.add(&c))) < 1e-12);
                let prod = wh_z(&b).matmul(&wh_z(&c)).unwrap();
                assert!(prod.max_abs_diff(&wh_z(&b.add(&c))) < 1e-12);
            }
        }
    }

    #[test]
    fn permutation_matrix_validation() {
        let p = permutation_matrix(&[1, 2, 0]).unwrap();
        assert_eq!(p[(1, 0)], C_ONE);
        assert!(permutation_matrix(&[0, 0]).is_err());
        assert!(permutation_matrix(&[2, 0]).is_err());
    }
}
