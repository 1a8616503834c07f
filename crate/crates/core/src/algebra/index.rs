use crate::error::{KdError, Result};

/// A vector in Z_d^n with modular dot product and addition.
///
/// Flat indices use big-endian digit order, so the first qudit is the most
/// significant digit, matching the ordering of Kronecker products.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuditIndexVector {
    d: usize,
    digits: Vec<usize>,
}

impl QuditIndexVector {
    pub fn new(d: usize, digits: Vec<usize>) -> Result<Self> {
        if d < 2 {
            return Err(KdError::InvalidArgument(format!("local dimension {d} < 2")));
        }
        if let Some(&bad) = digits.iter().find(|&&x| x >= d) {
            return Err(KdError::InvalidArgument(format!(
                "digit {bad} outside Z_{d}"
            )));
        }
        Ok(Self { d, digits })
    }

    pub fn zero(d: usize, n: usize) -> Self {
        Self {
            d,
            digits: vec![0; n],
        }
    }

    pub fn from_index(d: usize, n: usize, mut index: usize) -> Self {
        let mut digits = vec![0; n];
        for slot in digits.iter_mut().rev() {
            *slot = index % d;
            index /= d;
        }
        Self { d, digits }
    }

    pub fn to_index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &x| acc * self.d + x)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Σ_k a_k b_k mod d.
    pub fn dot(&self, other: &Self) -> usize {
        debug_assert_eq!(self.digits.len(), other.digits.len());
        self.digits
            .iter()
            .zip(&other.digits)
            .fold(0, |acc, (&a, &b)| (acc + a * b) % self.d)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            d: self.d,
            digits: self
                .digits
                .iter()
                .zip(&other.digits)
                .map(|(&a, &b)| (a + b) % self.d)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            digits: self.digits.iter().map(|&a| (self.d - a) % self.d).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// All vectors of Z_d^n in flat-index order.
    pub fn all(d: usize, n: usize) -> impl Iterator<Item = Self> {
        let total = d.pow(n as u32);
        (0..total).map(move |k| Self::from_index(d, n, k))
    }
}

/// Modular dot product of two flat indices interpreted as Z_d^n vectors.
pub(crate) fn flat_dot(d: usize, n: usize, mut a: usize, mut b: usize) -> usize {
    let mut acc = 0;
    for _ in 0..n {
        acc = (acc + (a % d) * (b % d)) % d;
        a /= d;
        b /= d;
    }
    acc
}

/// Component-wise negation of a flat index in Z_d^n.
pub(crate) fn flat_neg(d: usize, n: usize, mut a: usize) -> usize {
    let mut out = 0;
    let mut place = 1;
    for _ in 0..n {
        out += ((d - a % d) % d) * place;
        place *= d;
        a /= d;
    }
    out
}
