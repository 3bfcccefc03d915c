//! Mutations of line bundles on `ℙⁿ` at the level of `K_0`.
//!
//! Classes are written in the basis `[O], [O(1)], ..., [O(n)]`; any other
//! `[O(k)]` is reduced with the Koszul relation
//! `Σ_j (-1)^j C(n+1, j) [O(k - j)] = 0`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fan::{self, Fan, FanError, SupportFunction, ToricDivisor};
use crate::json::JsonInt;
use crate::klyachko::{self, BundleError, EquivariantBundle};
use crate::lattice::{Lattice, LatticeVector};
use crate::polytope::{self, PolytopeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MutationError {
    #[error("classes live on P^{left} and P^{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} coefficients, got {found}")]
    Length { expected: usize, found: usize },
    #[error("class is not that of a line bundle")]
    NotALineBundle,
    #[error("Hom(O({a}), O({b})) = 0, so the mutation is undefined")]
    Undefined { a: i64, b: i64 },
    #[error("projective space must have positive dimension")]
    ZeroDimension,
    #[error("degree is only defined on a fan with Picard group Z")]
    NoDegree,
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k {
        return BigInt::zero();
    }
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(n + 1 - j) / BigInt::from(j))
}

/// An element of `K_0(ℙⁿ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K0Class {
    n: usize,
    coefficients: Vec<BigInt>,
}

impl K0Class {
    pub fn new(n: usize, coefficients: Vec<BigInt>) -> Result<Self, MutationError> {
        if n == 0 {
            return Err(MutationError::ZeroDimension);
        }
        if coefficients.len() != n + 1 {
            return Err(MutationError::Length {
                expected: n + 1,
                found: coefficients.len(),
            });
        }
        Ok(K0Class { n, coefficients })
    }

    pub fn zero(n: usize) -> Self {
        K0Class {
            n,
            coefficients: vec![BigInt::zero(); n + 1],
        }
    }

    /// `[O(k)]`.
    pub fn line_bundle(n: usize, k: i64) -> Self {
        assert!(n > 0, "projective space must have positive dimension");
        let width = n as i64 + 1;
        let koszul: Vec<BigInt> = (0..=width).map(|j| binomial(width, j)).collect();
        let unit = |i: usize| {
            let mut c = vec![BigInt::zero(); n + 1];
            c[i] = BigInt::one();
            c
        };
        // window[j] = [O(start + j)]
        let mut window: Vec<Vec<BigInt>> = (0..=n).map(unit).collect();
        let mut start = 0i64;
        while k > start + n as i64 {
            // [O(t)] = Σ_{j ≥ 1} (-1)^{j+1} C(n+1, j) [O(t - j)]
            let mut next = vec![BigInt::zero(); n + 1];
            for j in 1..=width as usize {
                let sign = if j % 2 == 1 { 1 } else { -1 };
                for (x, y) in next.iter_mut().zip(&window[n + 1 - j]) {
                    *x += BigInt::from(sign) * &koszul[j] * y;
                }
            }
            window.remove(0);
            window.push(next);
            start += 1;
        }
        while k < start {
            // [O(t - n - 1)] = (-1)^n Σ_{j ≤ n} (-1)^j C(n+1, j) [O(t - j)]
            let mut prev = vec![BigInt::zero(); n + 1];
            for j in 0..=n {
                let sign = if (n + j).is_multiple_of(2) { 1 } else { -1 };
                for (x, y) in prev.iter_mut().zip(&window[n - j]) {
                    *x += BigInt::from(sign) * &koszul[j] * y;
                }
            }
            window.pop();
            window.insert(0, prev);
            start -= 1;
        }
        K0Class {
            n,
            coefficients: window.swap_remove((k - start) as usize),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn rank(&self) -> BigInt {
        self.coefficients.iter().sum()
    }

    /// `c_1` as an integer multiple of the hyperplane class.
    pub fn degree(&self) -> BigInt {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * BigInt::from(k))
            .sum()
    }

    pub fn euler_characteristic(&self) -> BigInt {
        let n = self.n as i64;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| c * binomial(n + k as i64, n))
            .sum()
    }

    pub fn invariants(&self) -> Invariants {
        Invariants {
            rank: self.rank(),
            degree: self.degree(),
            euler_characteristic: self.euler_characteristic(),
        }
    }

    fn check(&self, other: &K0Class) -> Result<(), MutationError> {
        if self.n != other.n {
            return Err(MutationError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &K0Class) -> Result<K0Class, MutationError> {
        self.check(other)?;
        Ok(K0Class {
            n: self.n,
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &K0Class) -> Result<K0Class, MutationError> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> K0Class {
        K0Class {
            n: self.n,
            coefficients: self.coefficients.iter().map(|c| c * k).collect(),
        }
    }

    /// `[E] ⊗ [O(j)]`.
    pub fn twist(&self, j: i64) -> K0Class {
        self.coefficients
            .iter()
            .enumerate()
            .fold(K0Class::zero(self.n), |acc, (k, c)| {
                let term = K0Class::line_bundle(self.n, k as i64 + j).scale(c);
                acc.add(&term).expect("same ambient dimension")
            })
    }

    /// `Some(k)` when this is `[O(k)]`.
    pub fn as_line_bundle(&self) -> Option<i64> {
        if !self.rank().is_one() {
            return None;
        }
        let k = self.degree().to_i64()?;
        (K0Class::line_bundle(self.n, k) == *self).then_some(k)
    }
}

/// `(rank, c_1, χ)` of a class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub rank: BigInt,
    pub degree: BigInt,
    pub euler_characteristic: BigInt,
}

impl Invariants {
    pub fn add(&self, other: &Invariants) -> Invariants {
        Invariants {
            rank: &self.rank + &other.rank,
            degree: &self.degree + &other.degree,
            euler_characteristic: &self.euler_characteristic + &other.euler_characteristic,
        }
    }

    pub fn scale(&self, k: &BigInt) -> Invariants {
        Invariants {
            rank: &self.rank * k,
            degree: &self.degree * k,
            euler_characteristic: &self.euler_characteristic * k,
        }
    }
}

/// `dim Hom(O(a), O(b))` on `ℙⁿ`: the number of lattice points in the
/// standard simplex dilated by `b - a`.
pub fn hom_dimension(a: i64, b: i64, n: usize) -> Result<BigInt, MutationError> {
    if n == 0 {
        return Err(MutationError::ZeroDimension);
    }
    let d = b - a;
    if d < 0 {
        return Ok(BigInt::zero());
    }
    if d == 0 {
        return Ok(BigInt::one());
    }
    let mut vertices = vec![LatticeVector::zero(Lattice::M, n)];
    vertices.extend((0..n).map(|i| LatticeVector::basis(Lattice::M, n, i)));
    let simplex = polytope::convex_hull(&vertices)?.dilate(&BigInt::from(d))?;
    Ok(BigInt::from(polytope::lattice_points(&simplex).len()))
}

/// `[L_E F] = dim Hom(E, F) [E] - [F]` for line bundles `E`, `F`.
pub fn left_mutation(e: &K0Class, f: &K0Class) -> Result<K0Class, MutationError> {
    e.check(f)?;
    let a = e.as_line_bundle().ok_or(MutationError::NotALineBundle)?;
    let b = f.as_line_bundle().ok_or(MutationError::NotALineBundle)?;
    let hom = hom_dimension(a, b, e.n)?;
    if hom.is_zero() {
        return Err(MutationError::Undefined { a, b });
    }
    e.scale(&hom).sub(f)
}

/// Degree of `c_1(E)` on a fan with `Pic = Z`, read off from the weight
/// sums at the fixed points and normalised so that `V(ρ_0)` has degree 1.
pub fn klyachko_degree(bundle: &EquivariantBundle) -> Result<BigInt, MutationError> {
    let fan: &Arc<Fan> = bundle.fan();
    let sums = (0..fan.maximal_cones().len()).map(|k| bundle.weight_sum(k)).collect();
    let det = SupportFunction::new(fan.clone(), sums)?.divisor();
    let picard = fan::picard_quotient(fan);
    if picard.rank() != 1 || !picard.torsion().is_empty() {
        return Err(MutationError::NoDegree);
    }
    let unit = picard.class(&ToricDivisor::prime(fan.clone(), 0))?.free[0].0.clone();
    let class = picard.class(&det)?.free[0].0.clone();
    if unit.abs() != BigInt::one() {
        return Err(MutationError::NoDegree);
    }
    Ok(class * unit)
}

/// `χ(E)` for a bundle on `ℙⁿ` whose positive twists have no higher
/// cohomology: `h⁰(E(d))` for `d = 1..=n+1` is interpolated at `d = 0`.
pub fn klyachko_euler_characteristic(bundle: &EquivariantBundle) -> Result<BigInt, MutationError> {
    let fan = bundle.fan();
    let n = fan.dimension() as i64;
    let xs: Vec<i64> = (1..=n + 1).collect();
    let ys = xs
        .iter()
        .map(|&d| {
            let mut c = vec![0i64; fan.rays().len()];
            c[0] = d;
            let twisted = bundle.twist(&ToricDivisor::from_i64s(fan.clone(), &c)?)?;
            Ok(BigInt::from(twisted.global_sections_dimension()))
        })
        .collect::<Result<Vec<_>, MutationError>>()?;
    let mut value = BigRational::zero();
    for (j, (xj, yj)) in xs.iter().zip(&ys).enumerate() {
        let mut term = BigRational::from_integer(yj.clone());
        for (i, xi) in xs.iter().enumerate() {
            if i != j {
                term *= BigRational::new((-xi).into(), (xj - xi).into());
            }
        }
        value += term;
    }
    Ok(value.to_integer())
}

/// `(rank, c_1, χ)` of `Ω¹_{ℙⁿ}` from its Klyachko data.
pub fn cotangent_invariants(n: usize) -> Result<Invariants, MutationError> {
    let space = fan::projective_space(n)?;
    let omega = klyachko::cotangent_bundle(space.fan())?;
    Ok(Invariants {
        rank: BigInt::from(omega.weights(0).len()),
        degree: klyachko_degree(&omega)?,
        euler_characteristic: klyachko_euler_characteristic(&omega)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationCheck {
    pub name: String,
    pub lhs: JsonInt,
    pub rhs: JsonInt,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationReport {
    pub checks: Vec<MutationCheck>,
    pub pass: bool,
}

fn check(name: impl Into<String>, lhs: BigInt, rhs: BigInt) -> MutationCheck {
    MutationCheck {
        name: name.into(),
        pass: lhs == rhs,
        lhs: JsonInt(lhs),
        rhs: JsonInt(rhs),
    }
}

fn invariant_checks(prefix: &str, lhs: &Invariants, rhs: &Invariants) -> Vec<MutationCheck> {
    vec![
        check(format!("{prefix}: rank"), lhs.rank.clone(), rhs.rank.clone()),
        check(format!("{prefix}: c1"), lhs.degree.clone(), rhs.degree.clone()),
        check(
            format!("{prefix}: chi"),
            lhs.euler_characteristic.clone(),
            rhs.euler_characteristic.clone(),
        ),
    ]
}

/// On `ℙⁿ`: `Hom(O, O(1))` has dimension `n + 1`; `L_O(O(1)) ⊗ O(-1)`
/// has the invariants of `Ω¹` as computed from Klyachko data; and
/// `[Ω¹] + [O] = (n+1)[O(-1)]` holds in rank, `c_1` and `χ`.
pub fn verify_beilinson_mutation(n: usize) -> Result<MutationReport, MutationError> {
    if n == 0 {
        return Err(MutationError::ZeroDimension);
    }
    let o = K0Class::line_bundle(n, 0);
    let o1 = K0Class::line_bundle(n, 1);
    let omega = cotangent_invariants(n)?;
    let mutated = left_mutation(&o, &o1)?.twist(-1);

    let mut checks = vec![check(
        "dim Hom(O, O(1))",
        hom_dimension(0, 1, n)?,
        binomial(n as i64 + 1, n as i64),
    )];
    checks.extend(invariant_checks("L_O(O(1)) (x) O(-1) vs Omega^1", &mutated.invariants(), &omega));
    checks.push(check(
        "chi(Omega^1) vs Bott formula",
        omega.euler_characteristic.clone(),
        BigInt::from(-1),
    ));
    let lhs = omega.add(&o.invariants());
    let rhs = K0Class::line_bundle(n, -1).invariants().scale(&BigInt::from(n + 1));
    checks.extend(invariant_checks("[Omega^1] + [O] vs (n+1)[O(-1)]", &lhs, &rhs));
    Ok(MutationReport {
        pass: checks.iter().all(|c| c.pass),
        checks,
    })
}
