//! Fans of smooth Fano polytopes, torus-invariant divisors, support
//! functions and the Picard group.
//!
//! Sign convention: a support function `ψ` corresponds to the divisor
//! `D_ψ = Σ_ρ ψ(n_ρ) V(ρ)`. Under this convention the anticanonical support
//! function takes the value `-1` on every ray generator, and its per-cone
//! functionals are the vertices of the anticanonical polytope.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::json::JsonInt;
use crate::lattice::{pair, Lattice, LatticeVector};
use crate::linalg::{self, Solution};
use crate::polytope::{self, PolarDual, Polytope, PolytopeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("ray {0} is not a primitive N-vector of the fan dimension")]
    BadRay(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {0} is not spanned by dimension-many independent rays")]
    BadCone(usize),
    #[error("cone {0} is not smooth")]
    NotSmooth(usize),
    #[error("polytope is not a Fano polytope")]
    NotFano,
    #[error("support function is discontinuous across cones {0} and {1}")]
    Discontinuous(usize, usize),
    #[error("expected {expected} values, got {found}")]
    Length { expected: usize, found: usize },
    #[error("objects live on different fans")]
    FanMismatch,
    #[error("no integral functional on cone {0}")]
    NonIntegral(usize),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("closed form disagrees with solved functional for divisor {divisor} on cone {cone}: solved {solved}, expected {expected}")]
    LemmaMismatch {
        divisor: usize,
        cone: usize,
        solved: LatticeVector,
        expected: LatticeVector,
    },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// A complete simplicial fan given by its rays and maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dimension: usize,
    rays: Vec<LatticeVector>,
    maximal_cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn new(rays: Vec<LatticeVector>, maximal_cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        let dimension = rays.first().map(LatticeVector::dim).ok_or(FanError::ZeroDimension)?;
        for (i, r) in rays.iter().enumerate() {
            if r.dim() != dimension || r.lattice() != Lattice::N || !r.is_primitive() {
                return Err(FanError::BadRay(i));
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay(j, i));
            }
        }
        let mut cones = Vec::with_capacity(maximal_cones.len());
        for (k, mut cone) in maximal_cones.into_iter().enumerate() {
            cone.sort_unstable();
            cone.dedup();
            if cone.len() != dimension || cone.iter().any(|&i| i >= rays.len()) {
                return Err(FanError::BadCone(k));
            }
            let m: Vec<Vec<BigInt>> = cone.iter().map(|&i| rays[i].coords().to_vec()).collect();
            if linalg::det_integer(&m).is_zero() {
                return Err(FanError::BadCone(k));
            }
            cones.push(cone);
        }
        Ok(Fan {
            dimension,
            rays,
            maximal_cones: cones,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn maximal_cones(&self) -> &[Vec<usize>] {
        &self.maximal_cones
    }

    pub fn cone(&self, k: usize) -> &[usize] {
        &self.maximal_cones[k]
    }

    pub fn cone_determinant(&self, k: usize) -> BigInt {
        let m: Vec<Vec<BigInt>> = self.maximal_cones[k]
            .iter()
            .map(|&i| self.rays[i].coords().to_vec())
            .collect();
        linalg::det_integer(&m)
    }

    pub fn is_smooth(&self) -> bool {
        (0..self.maximal_cones.len()).all(|k| self.cone_determinant(k).abs().is_one())
    }

    /// Pairs of distinct maximal cones sharing at least one ray, with the
    /// shared rays.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for a in 0..self.maximal_cones.len() {
            for b in a + 1..self.maximal_cones.len() {
                let shared: Vec<usize> = self.maximal_cones[a]
                    .iter()
                    .filter(|i| self.maximal_cones[b].contains(i))
                    .copied()
                    .collect();
                if !shared.is_empty() {
                    out.push((a, b, shared));
                }
            }
        }
        out
    }

    /// Same rays and cones, possibly indexed differently.
    pub fn same_fan_as(&self, other: &Fan) -> bool {
        let cone_sets = |f: &Fan| -> BTreeSet<BTreeSet<LatticeVector>> {
            f.maximal_cones
                .iter()
                .map(|c| c.iter().map(|&i| f.rays[i].clone()).collect())
                .collect()
        };
        let rays_a: BTreeSet<_> = self.rays.iter().collect();
        let rays_b: BTreeSet<_> = other.rays.iter().collect();
        rays_a == rays_b && cone_sets(self) == cone_sets(other)
    }

    /// Solves `<m, n_ρ> = values[j]` for the rays `ρ` of cone `k` (in cone
    /// order); `None` if the solution is not integral.
    pub(crate) fn functional_on_cone(&self, k: usize, values: &[BigInt]) -> Option<LatticeVector> {
        let rows: Vec<Vec<BigInt>> = self.maximal_cones[k]
            .iter()
            .map(|&i| self.rays[i].coords().to_vec())
            .collect();
        let b: Vec<_> = values
            .iter()
            .map(|v| num_rational::BigRational::from_integer(v.clone()))
            .collect();
        match linalg::solve(&linalg::int_rows_to_q(&rows), &b, self.dimension) {
            Solution::Unique(x) => {
                let pt = crate::lattice::RationalPoint::new(x);
                pt.to_lattice(Lattice::M)
            }
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct FanJson {
    dimension: usize,
    rays: Vec<Vec<JsonInt>>,
    maximal_cones: Vec<Vec<usize>>,
}

impl Serialize for Fan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FanJson {
            dimension: self.dimension,
            rays: self.rays.iter().map(LatticeVector::to_json).collect(),
            maximal_cones: self.maximal_cones.clone(),
        }
        .serialize(s)
    }
}

fn same_fan(a: &Arc<Fan>, b: &Arc<Fan>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Rays are the vertices of the Fano polytope; maximal cones are its facets.
pub fn fan_from_fano_polytope(fano: &Polytope) -> Result<Fan, FanError> {
    if fano.lattice() != Lattice::N || !polytope::is_fano_polytope(fano) {
        return Err(FanError::NotFano);
    }
    let cones = (0..fano.facets().len()).map(|f| fano.facet_vertices(f)).collect();
    let fan = Fan::new(fano.vertices().to_vec(), cones)?;
    if let Some(k) = (0..fan.maximal_cones.len()).find(|&k| !fan.cone_determinant(k).abs().is_one()) {
        return Err(FanError::NotSmooth(k));
    }
    Ok(fan)
}

/// `Σ a_ρ V(ρ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricDivisor {
    fan: Arc<Fan>,
    coefficients: Vec<BigInt>,
}

impl ToricDivisor {
    pub fn new(fan: Arc<Fan>, coefficients: Vec<BigInt>) -> Result<Self, FanError> {
        if coefficients.len() != fan.rays.len() {
            return Err(FanError::Length {
                expected: fan.rays.len(),
                found: coefficients.len(),
            });
        }
        Ok(ToricDivisor { fan, coefficients })
    }

    pub fn from_i64s(fan: Arc<Fan>, coefficients: &[i64]) -> Result<Self, FanError> {
        Self::new(fan, coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(fan: Arc<Fan>) -> Self {
        let c = vec![BigInt::zero(); fan.rays.len()];
        ToricDivisor { fan, coefficients: c }
    }

    /// The prime divisor `V(ρ)`.
    pub fn prime(fan: Arc<Fan>, ray: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coefficients[ray] = BigInt::one();
        d
    }

    /// `-Σ V(ρ)`, whose support function has value `-1` on every ray.
    pub fn anticanonical(fan: Arc<Fan>) -> Self {
        let c = vec![-BigInt::one(); fan.rays.len()];
        ToricDivisor { fan, coefficients: c }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn negate(&self) -> Self {
        ToricDivisor {
            fan: self.fan.clone(),
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &ToricDivisor) -> Result<Self, FanError> {
        if !same_fan(&self.fan, &other.fan) {
            return Err(FanError::FanMismatch);
        }
        Ok(ToricDivisor {
            fan: self.fan.clone(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

impl Serialize for ToricDivisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            fan: &'a Fan,
            coefficients: Vec<JsonInt>,
        }
        Wire {
            fan: &self.fan,
            coefficients: self.coefficients.iter().cloned().map(JsonInt).collect(),
        }
        .serialize(s)
    }
}

/// A conewise-linear integral function, stored as one functional `m(ψ,σ)`
/// per maximal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportFunction {
    fan: Arc<Fan>,
    functionals: Vec<LatticeVector>,
}

impl SupportFunction {
    /// Checks lattice, dimension and continuity across every pair of cones
    /// sharing a ray.
    pub fn new(fan: Arc<Fan>, functionals: Vec<LatticeVector>) -> Result<Self, FanError> {
        if functionals.len() != fan.maximal_cones.len() {
            return Err(FanError::Length {
                expected: fan.maximal_cones.len(),
                found: functionals.len(),
            });
        }
        if let Some(k) = functionals
            .iter()
            .position(|m| m.lattice() != Lattice::M || m.dim() != fan.dimension)
        {
            return Err(FanError::NonIntegral(k));
        }
        for (a, b, shared) in fan.adjacent_pairs() {
            for ray in shared {
                let n = fan.ray(ray);
                if pair(&functionals[a], n).unwrap() != pair(&functionals[b], n).unwrap() {
                    return Err(FanError::Discontinuous(a, b));
                }
            }
        }
        Ok(SupportFunction { fan, functionals })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn functionals(&self) -> &[LatticeVector] {
        &self.functionals
    }

    /// `m(ψ, σ_k)`.
    pub fn functional(&self, cone: usize) -> &LatticeVector {
        &self.functionals[cone]
    }

    /// `ψ(n_ρ)`, read off from any cone containing `ρ`.
    pub fn value_on_ray(&self, ray: usize) -> BigInt {
        let k = self
            .fan
            .maximal_cones
            .iter()
            .position(|c| c.contains(&ray))
            .expect("every ray lies in a maximal cone");
        pair(&self.functionals[k], self.fan.ray(ray)).unwrap()
    }

    /// `D_ψ = Σ ψ(n_ρ) V(ρ)`.
    pub fn divisor(&self) -> ToricDivisor {
        ToricDivisor {
            fan: self.fan.clone(),
            coefficients: (0..self.fan.rays.len()).map(|r| self.value_on_ray(r)).collect(),
        }
    }
}

impl Serialize for SupportFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            fan: &'a Fan,
            functionals: &'a [LatticeVector],
        }
        Wire {
            fan: &self.fan,
            functionals: &self.functionals,
        }
        .serialize(s)
    }
}

/// Inverse of `ψ ↦ D_ψ`: on each maximal cone solve `<m, n_ρ> = a_ρ`.
pub fn support_function_of_divisor(d: &ToricDivisor) -> Result<SupportFunction, FanError> {
    let fan = &d.fan;
    let functionals = (0..fan.maximal_cones.len())
        .map(|k| {
            let values: Vec<BigInt> = fan.maximal_cones[k]
                .iter()
                .map(|&i| d.coefficients[i].clone())
                .collect();
            fan.functional_on_cone(k, &values).ok_or(FanError::NonIntegral(k))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SupportFunction::new(fan.clone(), functionals)
}

/// A smooth toric Fano variety: Fano polytope `Δ°`, anticanonical polytope
/// `Δ = (Δ°)°`, the fan, and the vertex `m_σ` of `Δ` attached to each
/// maximal cone.
#[derive(Clone, Debug)]
pub struct ToricFano {
    fano_polytope: Polytope,
    polytope: Polytope,
    fan: Arc<Fan>,
    cone_vertices: Vec<LatticeVector>,
}

impl ToricFano {
    /// Builds the data from a Fano polytope, keeping the polytope's own ray
    /// and facet order.
    pub fn from_fano_polytope(fano: Polytope) -> Result<Self, FanError> {
        let fan = fan_from_fano_polytope(&fano)?;
        Self::assemble(fano, Arc::new(fan))
    }

    fn assemble(fano: Polytope, fan: Arc<Fan>) -> Result<Self, FanError> {
        let polytope = match polytope::polar_dual(&fano)? {
            PolarDual::Integral(p) => p,
            PolarDual::Rational(_) => return Err(FanError::NotFano),
        };
        let anti = support_function_of_divisor(&ToricDivisor::anticanonical(fan.clone()))?;
        let cone_vertices = anti.functionals.clone();
        debug_assert!(cone_vertices.iter().all(|v| polytope.vertex_index(v).is_some()));
        Ok(ToricFano {
            fano_polytope: fano,
            polytope,
            fan,
            cone_vertices,
        })
    }

    pub fn fano_polytope(&self) -> &Polytope {
        &self.fano_polytope
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn dimension(&self) -> usize {
        self.fan.dimension
    }

    /// `m_σ` for each maximal cone, in cone order.
    pub fn cone_vertices(&self) -> &[LatticeVector] {
        &self.cone_vertices
    }
}

/// `ℙⁿ` with rays ordered `e_0 = -Σe_i, e_1, ..., e_n` and maximal cones
/// ordered so that `σ_k` is spanned by every ray except `e_k`.
pub fn projective_space(n: usize) -> Result<ToricFano, FanError> {
    if n == 0 {
        return Err(FanError::ZeroDimension);
    }
    let mut rays = vec![LatticeVector::from_i64s(Lattice::N, &vec![-1; n])];
    rays.extend((0..n).map(|i| LatticeVector::basis(Lattice::N, n, i)));
    let fano = polytope::convex_hull(&rays)?;
    let generic = fan_from_fano_polytope(&fano)?;
    let cones = (0..=n).map(|k| (0..=n).filter(|&i| i != k).collect()).collect();
    let fan = Fan::new(rays, cones)?;
    debug_assert!(fan.same_fan_as(&generic));
    ToricFano::assemble(fano, Arc::new(fan))
}

/// The closed forms for `m(ψ_i, σ_k)` where `ψ_i` is the support function of
/// `-V(ρ_i)` on `ℙⁿ` (indices as in [`projective_space`]).
pub fn euler_summand_closed_form(n: usize, i: usize, k: usize) -> LatticeVector {
    let dual = |j: usize| LatticeVector::basis(Lattice::M, n, j - 1);
    let zero = LatticeVector::zero(Lattice::M, n);
    match (i, k) {
        (i, k) if i == k => zero,
        (0, k) => dual(k),
        (i, 0) => -&dual(i),
        (i, k) => &dual(k) - &dual(i),
    }
}

/// Table of `m(ψ_i, σ_k)` for the divisors `-V(ρ_i)` on `ℙⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerSummandTable {
    pub n: usize,
    /// `entries[i][k] = m(ψ_i, σ_k)`.
    pub entries: Vec<Vec<LatticeVector>>,
}

/// Solves for every `m(ψ_i, σ_k)` and checks each against the closed form;
/// any disagreement is an error.
pub fn euler_summand_table(n: usize) -> Result<EulerSummandTable, FanError> {
    let space = projective_space(n)?;
    let fan = space.fan.clone();
    let mut entries = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let psi = support_function_of_divisor(&ToricDivisor::prime(fan.clone(), i).negate())?;
        for k in 0..=n {
            let expected = euler_summand_closed_form(n, i, k);
            if psi.functionals[k] != expected {
                return Err(FanError::LemmaMismatch {
                    divisor: i,
                    cone: k,
                    solved: psi.functionals[k].clone(),
                    expected,
                });
            }
        }
        entries.push(psi.functionals);
    }
    Ok(EulerSummandTable { n, entries })
}

/// Support function of the anticanonical divisor on `ℙⁿ`.
pub fn anticanonical_support(n: usize) -> Result<SupportFunction, FanError> {
    let space = projective_space(n)?;
    support_function_of_divisor(&ToricDivisor::anticanonical(space.fan.clone()))
}

/// `Pic = coker(M → Div_T, m ↦ (<m, n_ρ>)_ρ)` via Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardGroup {
    fan: Arc<Fan>,
    rank: usize,
    torsion: Vec<BigInt>,
    // nonzero invariant factors of the ray matrix; entries equal to one
    // contribute nothing
    invariants: Vec<BigInt>,
    row_transform: Vec<Vec<BigInt>>,
}

/// Class of a divisor in `Z^rank ⊕ ⊕ Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PicardClass {
    pub free: Vec<JsonInt>,
    pub torsion: Vec<JsonInt>,
}

impl PicardClass {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(|c| c.0.is_zero())
    }
}

pub fn picard_quotient(fan: &Arc<Fan>) -> PicardGroup {
    let rows: Vec<Vec<BigInt>> = fan.rays.iter().map(|r| r.coords().to_vec()).collect();
    let smith = linalg::smith_normal_form(&rows, fan.dimension);
    let rank = fan.rays.len() - smith.invariants.len();
    let torsion = smith.invariants.iter().filter(|d| !d.is_one()).cloned().collect();
    PicardGroup {
        fan: fan.clone(),
        rank,
        torsion,
        invariants: smith.invariants,
        row_transform: smith.row_transform,
    }
}

impl PicardGroup {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn class(&self, d: &ToricDivisor) -> Result<PicardClass, FanError> {
        if !same_fan(&self.fan, &d.fan) {
            return Err(FanError::FanMismatch);
        }
        let y = linalg::mat_vec(&self.row_transform, &d.coefficients);
        let r = self.invariants.len();
        let torsion = self
            .invariants
            .iter()
            .zip(&y)
            .filter(|(t, _)| !t.is_one())
            .map(|(t, v)| JsonInt(num_integer::Integer::mod_floor(v, t)))
            .collect();
        let free = y[r..].iter().cloned().map(JsonInt).collect();
        Ok(PicardClass { free, torsion })
    }
}
