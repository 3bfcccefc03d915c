//! Integer lattices `M` and `N = Hom(M, Z)`, exact vectors in them, and the
//! dual pairing between the two.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::{JsonInt, JsonRational};

/// Which of the two dual lattices a vector lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Lattice {
    /// Characters of the torus; home of polytopes such as the anticanonical one.
    M,
    /// One-parameter subgroups; home of fans and the Fano polytope.
    N,
}

impl Lattice {
    pub fn dual(self) -> Lattice {
        match self {
            Lattice::M => Lattice::N,
            Lattice::N => Lattice::M,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected a vector of lattice {expected:?}, found {found:?}")]
    LatticeMismatch { expected: Lattice, found: Lattice },
}

/// An exact point of `M` or `N`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeVector {
    lattice: Lattice,
    coords: Vec<BigInt>,
}

impl LatticeVector {
    /// Panics on an empty coordinate list; ambient dimension is at least one.
    pub fn new(lattice: Lattice, coords: Vec<BigInt>) -> Self {
        assert!(!coords.is_empty(), "lattice vectors need dimension >= 1");
        LatticeVector { lattice, coords }
    }

    pub fn from_i64s(lattice: Lattice, coords: &[i64]) -> Self {
        Self::new(lattice, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Shorthand for an `M`-vector.
    pub fn m(coords: &[i64]) -> Self {
        Self::from_i64s(Lattice::M, coords)
    }

    /// Shorthand for an `N`-vector.
    pub fn n(coords: &[i64]) -> Self {
        Self::from_i64s(Lattice::N, coords)
    }

    pub fn zero(lattice: Lattice, dim: usize) -> Self {
        Self::new(lattice, vec![BigInt::zero(); dim])
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(lattice: Lattice, dim: usize, i: usize) -> Self {
        let mut v = Self::zero(lattice, dim);
        v.coords[i] = BigInt::one();
        v
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The same coordinates viewed in another lattice.
    pub fn retag(&self, lattice: Lattice) -> Self {
        LatticeVector {
            lattice,
            coords: self.coords.clone(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector {
            lattice: self.lattice,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.coords
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }

    /// Coordinates as machine integers, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coords.iter().map(ToPrimitive::to_i64).collect()
    }

    /// Euclidean dot product of coordinates, ignoring lattice tags.
    pub(crate) fn dot(&self, other: &LatticeVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Content (gcd of entries) of the vector; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        use num_integer::Integer;
        self.coords
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub(crate) fn to_json(&self) -> Vec<JsonInt> {
        self.coords.iter().cloned().map(JsonInt).collect()
    }

    pub(crate) fn from_json(lattice: Lattice, coords: &[JsonInt]) -> Self {
        Self::new(lattice, coords.iter().map(|c| c.0.clone()).collect())
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.lattice, self)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn check_compatible(a: &LatticeVector, b: &LatticeVector) {
    assert_eq!(a.lattice, b.lattice, "adding vectors of different lattices");
    assert_eq!(a.dim(), b.dim(), "adding vectors of different dimensions");
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        check_compatible(self, rhs);
        LatticeVector {
            lattice: self.lattice,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        check_compatible(self, rhs);
        LatticeVector {
            lattice: self.lattice,
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector {
            lattice: self.lattice,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// The dual pairing `<m, n>` of an `M`-vector with an `N`-vector.
pub fn pair(m: &LatticeVector, n: &LatticeVector) -> Result<BigInt, LatticeError> {
    if m.lattice != Lattice::M {
        return Err(LatticeError::LatticeMismatch {
            expected: Lattice::M,
            found: m.lattice,
        });
    }
    if n.lattice != Lattice::N {
        return Err(LatticeError::LatticeMismatch {
            expected: Lattice::N,
            found: n.lattice,
        });
    }
    if m.dim() != n.dim() {
        return Err(LatticeError::DimensionMismatch {
            left: m.dim(),
            right: n.dim(),
        });
    }
    Ok(m.dot(n))
}

/// An exact rational point, used for barycentric coordinates and for polar
/// vertices that fail to be integral.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint {
    coords: Vec<BigRational>,
}

impl RationalPoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        RationalPoint { coords }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    /// The integral point, when every coordinate is an integer.
    pub fn to_lattice(&self, lattice: Lattice) -> Option<LatticeVector> {
        self.is_integral().then(|| {
            LatticeVector::new(lattice, self.coords.iter().map(|c| c.to_integer()).collect())
        })
    }

    /// Index `k` if this is the `k`-th standard basis vector.
    pub fn as_standard_basis(&self) -> Option<usize> {
        let mut hit = None;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_one() {
                if hit.is_some() {
                    return None;
                }
                hit = Some(k);
            } else if !c.is_zero() {
                return None;
            }
        }
        hit
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coords.iter().all(|c| !c.is_negative())
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<JsonRational> = self.coords.iter().cloned().map(JsonRational).collect();
        v.serialize(s)
    }
}
