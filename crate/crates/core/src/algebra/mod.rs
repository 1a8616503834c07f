//! Dense complex linear algebra: matrices, states, qudit index arithmetic,
//! structured gates and seeded random inputs.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64 as C64;

use crate::error::{KdError, Result};

mod gates;
mod index;
mod matrix;
pub mod random;
mod state;

pub use gates::{clock, hadamard, omega, permutation_matrix, qft_matrix, shift, wh_x, wh_z};
pub use index::QuditIndexVector;
pub(crate) use index::{flat_dot, flat_neg};
pub use matrix::ComplexMatrix;
pub(crate) use matrix::{complex_from, pairs_from};
pub use state::{DensityMatrix, PureState};

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);
pub const C_I: C64 = C64::new(0.0, 1.0);

pub const DEFAULT_DIMENSION_CAP: usize = 128;

static DIMENSION_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIMENSION_CAP);

/// Largest Hilbert-space dimension accepted by constructors.
pub fn dimension_cap() -> usize {
    DIMENSION_CAP.load(Ordering::Relaxed)
}

pub fn set_dimension_cap(cap: usize) {
    DIMENSION_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_dimension(dim: usize) -> Result<()> {
    let cap = dimension_cap();
    if dim > cap {
        return Err(KdError::DimensionCap {
            requested: dim,
            cap,
        });
    }
    Ok(())
}

/// Matrices may be as wide as a superoperator over a capped Hilbert space.
pub(crate) fn check_entry_cap(rows: usize, cols: usize) -> Result<()> {
    let cap = dimension_cap().saturating_mul(dimension_cap());
    let worst = rows.max(cols);
    if worst > cap {
        return Err(KdError::DimensionCap {
            requested: worst,
            cap,
        });
    }
    Ok(())
}

/// Unit-modulus phase of `z`; the phase of zero is taken to be 1.
pub fn phase(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C_ONE
    } else {
        z / r
    }
}

/// `d^n`, failing on overflow.
pub fn checked_pow(d: usize, n: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc
            .checked_mul(d)
            .ok_or_else(|| KdError::InvalidArgument(format!("{d}^{n} overflows")))?;
    }
    Ok(acc)
}
