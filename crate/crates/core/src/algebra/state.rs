use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{check_dimension, ComplexMatrix, C_ONE, C_ZERO};
use crate::error::{KdError, Result};

pub const STATE_NORM_TOL: f64 = 1e-12;
pub const DENSITY_TOL: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        check_dimension(amplitudes.len())?;
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(KdError::InvalidState(format!("norm {norm} != 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = norm2(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(KdError::InvalidState(
                "cannot normalise a zero vector".into(),
            ));
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(KdError::InvalidArgument(format!(
                "basis index {k} >= {dim}"
            )));
        }
        let mut v = vec![C_ZERO; dim];
        v[k] = C_ONE;
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// <self|other>
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// U|ψ>, renormalised to absorb rounding.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<PureState> {
        PureState::normalized(u.apply(&self.amplitudes)?)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.projector(),
        }
    }

    /// Tensor product |self> ⊗ |other>.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut v = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                v.push(a * b);
            }
        }
        PureState::normalized(v)
    }
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, DENSITY_TOL)
    }

    /// Validates Hermiticity and trace at `tol`; eigenvalues must exceed -1e-10.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(KdError::InvalidState(
                "density matrix must be square".into(),
            ));
        }
        check_dimension(matrix.rows())?;
        let herm = matrix.hermiticity_residual();
        if herm > tol {
            return Err(KdError::InvalidState(format!(
                "not Hermitian (residual {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C_ONE).norm() > tol {
            return Err(KdError::InvalidState(format!("trace {tr} != 1")));
        }
        let dm = Self { matrix };
        let min_eig = dm.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_FLOOR {
            return Err(KdError::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(dm)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dimension(dim)?;
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        })
    }

    /// Convex mixture Σ w_k ρ_k.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, r)| r.dim())
            .ok_or_else(|| KdError::InvalidArgument("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(KdError::InvalidArgument("negative mixture weight".into()));
            }
            acc = acc.add(&rho.matrix.scale(C64::new(*w, 0.0)))?;
        }
        Self::with_tolerance(acc, 1e-10)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// U ρ U†
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Ok(Self { matrix: m })
    }

    /// Σ_μ K_μ ρ K_μ†
    pub fn apply_kraus(&self, kraus: &[ComplexMatrix]) -> Result<DensityMatrix> {
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for k in kraus {
            acc = acc.add(&k.matmul(&self.matrix)?.matmul(&k.adjoint())?)?;
        }
        Ok(Self { matrix: acc })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(Self {
            matrix: self.matrix.kron(&other.matrix)?,
        })
    }

    /// Tr(F ρ)
    pub fn expectation(&self, f: &ComplexMatrix) -> Result<C64> {
        Ok(f.matmul(&self.matrix)?.trace())
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.to_nalgebra());
        eig.eigenvalues.iter().copied().collect()
    }

    /// Spectral decomposition with weights clipped at zero and renormalised.
    /// Only components with positive weight are returned.
    pub fn eigen_mixture(&self) -> Result<Vec<(f64, PureState)>> {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.to_nalgebra());
        let mut parts = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= 0.0 {
                continue;
            }
            let col: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            parts.push((lambda, PureState::normalized(col)?));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        for (w, _) in parts.iter_mut() {
            *w /= total;
        }
        Ok(parts)
    }
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexMatrix::new(self.dim(), 1, self.amplitudes.clone())
            .expect("finite amplitudes")
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        if m.cols() != 1 {
            return Err(serde::de::Error::custom("pure state must be a column"));
        }
        PureState::new(m.into_vec()).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
