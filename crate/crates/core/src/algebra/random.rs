//! Seeded random test inputs. Every generator is deterministic in its seed.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, DensityMatrix, PureState, QuditIndexVector, C_ZERO};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix_with<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    random_matrix_with(&mut rng_from_seed(seed), rows, cols)
}

pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

pub fn random_pure_state(dim: usize, seed: u64) -> PureState {
    random_pure_state_with(&mut rng_from_seed(seed), dim)
}

/// Orthonormalises the columns of a tall Gaussian matrix (two Gram-Schmidt
/// passes), giving an isometry with `cols` orthonormal columns.
pub fn random_isometry_with<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let g = random_matrix_with(rng, rows, cols);
    let mut columns: Vec<Vec<C64>> = (0..cols).map(|c| g.column(c)).collect();
    for c in 0..cols {
        for _pass in 0..2 {
            for prev in 0..c {
                let overlap: C64 = columns[prev]
                    .iter()
                    .zip(&columns[c])
                    .map(|(p, x)| p.conj() * x)
                    .sum();
                let (head, tail) = columns.split_at_mut(c);
                for (x, p) in tail[0].iter_mut().zip(&head[prev]) {
                    *x -= overlap * p;
                }
            }
        }
        let norm = columns[c].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in columns[c].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(rows, cols, |r, c| columns[c][r])
}

pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_isometry_with(rng, dim, dim)
}

pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    random_unitary_with(&mut rng_from_seed(seed), dim)
}

/// Full-rank mixed state G G† / Tr(G G†).
pub fn random_density_matrix_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = random_matrix_with(rng, dim, dim);
    let gg = g.matmul(&g.adjoint()).expect("square");
    let tr = gg.trace().re;
    let mut m = gg.scale(C64::new(1.0 / tr, 0.0));
    // exact Hermiticity keeps the 1e-12 validation honest
    for r in 0..dim {
        m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
        for c in r + 1..dim {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
    }
    DensityMatrix::new(m).expect("G G† is a valid state")
}

pub fn random_density_matrix(dim: usize, seed: u64) -> DensityMatrix {
    random_density_matrix_with(&mut rng_from_seed(seed), dim)
}

pub fn random_hermitian(dim: usize, seed: u64) -> ComplexMatrix {
    let g = random_matrix(dim, dim, seed);
    g.add(&g.adjoint())
        .expect("square")
        .scale(C64::new(0.5, 0.0))
}

/// Kraus operators cut from a random isometry C^dim -> C^{count·dim}.
pub fn random_kraus_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    count: usize,
) -> Vec<ComplexMatrix> {
    let w = random_isometry_with(rng, dim * count, dim);
    (0..count)
        .map(|mu| ComplexMatrix::from_fn(dim, dim, |r, c| w[(mu * dim + r, c)]))
        .collect()
}

pub fn random_kraus(dim: usize, count: usize, seed: u64) -> Vec<ComplexMatrix> {
    random_kraus_with(&mut rng_from_seed(seed), dim, count)
}

pub fn random_index_vector(d: usize, n: usize, seed: u64) -> QuditIndexVector {
    let mut rng = rng_from_seed(seed);
    QuditIndexVector::new(d, (0..n).map(|_| rng.random_range(0..d)).collect()).expect("digits < d")
}

/// Random permutation of 0..dim (Fisher-Yates).
pub fn random_permutation_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

pub fn zero_vector(dim: usize) -> Vec<C64> {
    vec![C_ZERO; dim]
}
