//! Torus-equivariant vector bundles on smooth toric varieties, encoded as
//! one decreasing filtration `E_ρ(i)` of a fixed vector space per ray.
//!
//! For each maximal cone `σ` with rays `ρ_1..ρ_n` (a lattice basis), the
//! filtrations split `E` into weight spaces `E^σ(m)`, characterised by
//!
//! ```text
//! E_ρ(i) = Σ_{<m, n_ρ> >= i} E^σ(m)      for every ρ in σ(1).
//! ```
//!
//! The splitting is computed as follows. Weights `m` correspond bijectively
//! to tuples `a_j = <m, n_{ρ_j}>`; only tuples of jump indices can carry a
//! nonzero piece. With `F(a) = ∩_j E_{ρ_j}(a_j)`, inclusion–exclusion over
//! the `2^n` shifts `a + 1_S` gives `dim E^σ(m)`, and a representative piece
//! is any complement of `Σ_j F(a + e_j)` inside `F(a)`. Afterwards the
//! direct-sum property and the identity above are re-checked exactly; a
//! failure means the filtrations are not compatible on that cone.
//!
//! Filtrations are over `Q` rather than `C`; every subspace used here is
//! defined over the rationals.
//!
//! Line bundles: `O(Σ a_ρ V(ρ))` has `E_ρ(i) = E` for `i <= a_ρ` and `0`
//! above, so its weight on `σ` is the functional `m(ψ_D, σ)` of
//! [`crate::fan::support_function_of_divisor`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fan::{Fan, ToricDivisor};
use crate::json::JsonRational;
use crate::lattice::{pair, Lattice, LatticeVector};
use crate::linalg::{self, QMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("expected one filtration per ray ({expected}), got {found}")]
    FiltrationCount { expected: usize, found: usize },
    #[error("filtration for ray {ray}: {reason}")]
    BadFiltration { ray: usize, reason: String },
    #[error("filtrations are not compatible on cone {cone}: {reason}")]
    Incompatible { cone: usize, reason: String },
    #[error("cone {0} is not smooth")]
    NonSmoothCone(usize),
    #[error("bundles live on different fans")]
    FanMismatch,
    #[error("direct sum of no bundles")]
    EmptySum,
    #[error("level {0} does not fit in 64 bits")]
    LevelOverflow(BigInt),
    #[error(transparent)]
    Fan(#[from] crate::fan::FanError),
}

/// A subspace of `Q^r`, stored by its reduced row echelon basis so that
/// equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: QMatrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| (0..ambient).map(|j| linalg::q((i == j) as i64)).collect())
            .collect();
        Subspace { ambient, basis }
    }

    /// Span of arbitrary vectors of length `ambient`.
    pub fn span(ambient: usize, vectors: QMatrix) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == ambient));
        let ech = linalg::rref(vectors, ambient);
        Subspace {
            ambient,
            basis: ech.rows,
        }
    }

    /// Span of the given standard basis vectors.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vecs = indices
            .iter()
            .map(|&i| (0..ambient).map(|j| linalg::q((i == j) as i64)).collect())
            .collect();
        Self::span(ambient, vecs)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        if other.basis.is_empty() || self.is_full() || self == other {
            return self.clone();
        }
        if self.basis.is_empty() || other.is_full() {
            return other.clone();
        }
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, v)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.basis.is_empty() || other.is_full() || self == other {
            return self.clone();
        }
        if other.basis.is_empty() || self.is_full() {
            return other.clone();
        }
        // columns a_1..a_p, -b_1..-b_q; kernel vectors give the coefficients
        let p = self.basis.len();
        let cols: Vec<Vec<BigRational>> = self
            .basis
            .iter()
            .cloned()
            .chain(other.basis.iter().map(|b| b.iter().map(|x| -x.clone()).collect()))
            .collect();
        let rows: QMatrix = (0..self.ambient)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        let kernel = linalg::null_space(&rows, cols.len());
        let vecs = kernel
            .iter()
            .map(|k| {
                (0..self.ambient)
                    .map(|i| (0..p).map(|j| &k[j] * &self.basis[j][i]).sum())
                    .collect()
            })
            .collect();
        Subspace::span(self.ambient, vecs)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        if other.basis.is_empty() || self.is_full() || self == other {
            return true;
        }
        if other.dim() >= self.dim() {
            return false;
        }
        self.sum(other).dim() == self.dim()
    }

    /// A complement of `inner` inside `self`, chosen greedily from the
    /// echelon basis of `self`. Returned as a plain list of vectors.
    fn complement_of(&self, inner: &Subspace) -> QMatrix {
        let mut acc = inner.basis.clone();
        let mut picked = Vec::new();
        for v in &self.basis {
            let mut trial = acc.clone();
            trial.push(v.clone());
            if linalg::rank(&trial, self.ambient) > acc.len() {
                acc = linalg::rref(trial, self.ambient).rows;
                picked.push(v.clone());
            }
        }
        picked
    }

    /// Embeds `Q^r` as the coordinates `offset..offset + r` of `Q^total`.
    fn embed(&self, offset: usize, total: usize) -> Subspace {
        let vecs = self
            .basis
            .iter()
            .map(|row| {
                let mut v = vec![BigRational::zero(); total];
                v[offset..offset + self.ambient].clone_from_slice(row);
                v
            })
            .collect();
        Subspace::span(total, vecs)
    }

    fn to_json(&self) -> Vec<Vec<JsonRational>> {
        self.basis
            .iter()
            .map(|r| r.iter().cloned().map(JsonRational).collect())
            .collect()
    }
}

/// A decreasing `Z`-filtration of `Q^r`.
///
/// `E(i)` is the subspace stored at the largest key `<= i`, and the whole
/// space when `i` is below every key. The last stored subspace is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    ray: usize,
    full: Subspace,
    jumps: BTreeMap<i64, Subspace>,
}

impl Filtration {
    pub fn new(ray: usize, ambient: usize, jumps: Vec<(i64, Subspace)>) -> Result<Self, BundleError> {
        let bad = |reason: &str| BundleError::BadFiltration {
            ray,
            reason: reason.to_string(),
        };
        if jumps.is_empty() {
            return Err(bad("no levels given"));
        }
        let mut map = BTreeMap::new();
        for (i, s) in jumps {
            if s.ambient != ambient {
                return Err(bad("subspace of wrong ambient dimension"));
            }
            if map.insert(i, s).is_some() {
                return Err(bad("repeated level"));
            }
        }
        let full = Subspace::full(ambient);
        let mut prev = &full;
        for s in map.values() {
            if !prev.contains(s) {
                return Err(bad("not decreasing"));
            }
            prev = s;
        }
        if prev.dim() != 0 {
            return Err(bad("does not reach zero"));
        }
        Ok(Filtration {
            ray,
            full,
            jumps: map,
        })
    }

    /// `E(i) = E` for `i <= level`, zero above: the rank-one filtration
    /// jumping at `level`.
    pub fn step(ray: usize, ambient: usize, level: i64) -> Self {
        Self::new(ray, ambient, vec![(level + 1, Subspace::zero(ambient))])
            .expect("a single drop to zero is a valid filtration")
    }

    pub fn ray(&self) -> usize {
        self.ray
    }

    pub fn ambient(&self) -> usize {
        self.full.ambient
    }

    pub fn at(&self, i: i64) -> &Subspace {
        self.jumps
            .range(..=i)
            .next_back()
            .map(|(_, s)| s)
            .unwrap_or(&self.full)
    }

    /// Levels `i` with `E(i) ≠ E(i + 1)`.
    pub fn jump_indices(&self) -> Vec<i64> {
        self.jumps
            .keys()
            .filter(|&&k| self.at(k - 1) != self.at(k))
            .map(|k| k - 1)
            .collect()
    }

    /// `(lo, hi)` with `E(i) = E` for `i <= lo` and `E(i) = 0` for `i >= hi`.
    pub fn saturation_bounds(&self) -> (i64, i64) {
        let lo = *self.jumps.keys().next().unwrap() - 1;
        let hi = *self.jumps.keys().next_back().unwrap();
        (lo, hi)
    }

    fn embed(&self, offset: usize, total: usize) -> Filtration {
        Filtration {
            ray: self.ray,
            full: self.full.embed(offset, total),
            jumps: self.jumps.iter().map(|(&i, s)| (i, s.embed(offset, total))).collect(),
        }
    }
}

/// Wire form `{ray, jumps: [{i, basis}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiltrationJson {
    pub ray: usize,
    pub jumps: Vec<JumpJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpJson {
    pub i: i64,
    pub basis: Vec<Vec<JsonRational>>,
}

impl From<&Filtration> for FiltrationJson {
    fn from(f: &Filtration) -> Self {
        FiltrationJson {
            ray: f.ray,
            jumps: f
                .jumps
                .iter()
                .map(|(&i, s)| JumpJson { i, basis: s.to_json() })
                .collect(),
        }
    }
}

impl FiltrationJson {
    pub fn into_filtration(&self, ambient: usize) -> Result<Filtration, BundleError> {
        let jumps = self
            .jumps
            .iter()
            .map(|j| {
                if j.basis.iter().any(|v| v.len() != ambient) {
                    return Err(BundleError::BadFiltration {
                        ray: self.ray,
                        reason: "basis vector of wrong length".into(),
                    });
                }
                let vecs = j.basis.iter().map(|v| v.iter().map(|x| x.0.clone()).collect()).collect();
                Ok((j.i, Subspace::span(ambient, vecs)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Filtration::new(self.ray, ambient, jumps)
    }
}

/// Weights at one cone, listed with multiplicity: `{cone, weights}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightTable {
    pub cone: usize,
    pub weights: Vec<LatticeVector>,
}

pub type Decomposition = BTreeMap<LatticeVector, Subspace>;

/// An equivariant bundle with its weight decompositions computed eagerly.
#[derive(Clone, Debug)]
pub struct EquivariantBundle {
    fan: Arc<Fan>,
    rank: usize,
    filtrations: Vec<Filtration>,
    decompositions: Vec<Decomposition>,
}

fn to_level(x: BigInt) -> Result<i64, BundleError> {
    x.to_i64().ok_or(BundleError::LevelOverflow(x))
}

fn decompose_cone(fan: &Fan, filtrations: &[Filtration], cone: usize, rank: usize) -> Result<Decomposition, BundleError> {
    let rays = fan.cone(cone);
    if !fan.cone_determinant(cone).magnitude().to_u8().is_some_and(|d| d == 1) {
        return Err(BundleError::NonSmoothCone(cone));
    }
    let incompatible = |reason: String| BundleError::Incompatible { cone, reason };
    let filts: Vec<&Filtration> = rays.iter().map(|&r| &filtrations[r]).collect();

    let mut cache: HashMap<Vec<i64>, Subspace> = HashMap::new();
    let mut level_space = |a: &[i64]| -> Subspace {
        cache
            .entry(a.to_vec())
            .or_insert_with(|| {
                filts
                    .iter()
                    .zip(a)
                    .fold(Subspace::full(rank), |acc, (f, &i)| acc.intersect(f.at(i)))
            })
            .clone()
    };

    let jump_sets: Vec<Vec<i64>> = filts.iter().map(|f| f.jump_indices()).collect();
    let n = rays.len();
    let mut pieces = Decomposition::new();
    for a in jump_sets.iter().multi_cartesian_product() {
        let a: Vec<i64> = a.into_iter().copied().collect();
        let mut dim: i64 = 0;
        for mask in 0u32..(1 << n) {
            let shifted: Vec<i64> = (0..n).map(|j| a[j] + ((mask >> j) & 1) as i64).collect();
            let d = level_space(&shifted).dim() as i64;
            dim += if mask.count_ones() % 2 == 0 { d } else { -d };
        }
        if dim < 0 {
            return Err(incompatible(format!("negative multiplicity at levels {a:?}")));
        }
        if dim == 0 {
            continue;
        }
        let top = level_space(&a);
        let higher = (0..n).fold(Subspace::zero(rank), |acc, j| {
            let mut b = a.clone();
            b[j] += 1;
            acc.sum(&level_space(&b))
        });
        let piece = top.complement_of(&higher);
        if piece.len() as i64 != dim {
            return Err(incompatible(format!("piece at levels {a:?} has wrong dimension")));
        }
        let values: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let m = fan
            .functional_on_cone(cone, &values)
            .ok_or(BundleError::NonSmoothCone(cone))?;
        pieces.insert(m, Subspace::span(rank, piece));
    }

    let total: usize = pieces.values().map(Subspace::dim).sum();
    if total != rank {
        return Err(incompatible(format!("pieces have total dimension {total}, rank is {rank}")));
    }
    let all = pieces.values().fold(Subspace::zero(rank), |acc, s| acc.sum(s));
    if all.dim() != rank {
        return Err(incompatible("pieces do not form a direct sum".into()));
    }
    for (&ray, f) in rays.iter().zip(&filts) {
        let (lo, hi) = f.saturation_bounds();
        for i in lo..=hi {
            let rebuilt = reconstruct(&pieces, fan.ray(ray), i, rank)?;
            if &rebuilt != f.at(i) {
                return Err(incompatible(format!("ray {ray} level {i} is not a sum of weight spaces")));
            }
        }
    }
    Ok(pieces)
}

fn reconstruct(pieces: &Decomposition, ray: &LatticeVector, i: i64, rank: usize) -> Result<Subspace, BundleError> {
    let mut acc = Subspace::zero(rank);
    for (m, s) in pieces {
        if to_level(pair(m, ray).unwrap())? >= i {
            acc = acc.sum(s);
        }
    }
    Ok(acc)
}

/// Builds a bundle from one filtration per ray (in ray order), computing
/// and verifying every cone's weight decomposition.
pub fn make_bundle(fan: Arc<Fan>, filtrations: Vec<Filtration>) -> Result<EquivariantBundle, BundleError> {
    if filtrations.len() != fan.rays().len() {
        return Err(BundleError::FiltrationCount {
            expected: fan.rays().len(),
            found: filtrations.len(),
        });
    }
    let rank = filtrations[0].ambient();
    for (r, f) in filtrations.iter().enumerate() {
        if f.ray != r {
            return Err(BundleError::BadFiltration {
                ray: r,
                reason: format!("listed for ray {}", f.ray),
            });
        }
        if f.ambient() != rank {
            return Err(BundleError::BadFiltration {
                ray: r,
                reason: "ambient dimension differs from the other rays".into(),
            });
        }
    }
    let decompositions = (0..fan.maximal_cones().len())
        .map(|k| decompose_cone(&fan, &filtrations, k, rank))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EquivariantBundle {
        fan,
        rank,
        filtrations,
        decompositions,
    })
}

impl EquivariantBundle {
    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn filtrations(&self) -> &[Filtration] {
        &self.filtrations
    }

    pub fn filtration(&self, ray: usize) -> &Filtration {
        &self.filtrations[ray]
    }

    /// `E^σ(m)` for every weight `m` with a nonzero piece.
    pub fn decomposition(&self, cone: usize) -> &Decomposition {
        &self.decompositions[cone]
    }

    /// `W(E, σ)` as a set.
    pub fn weights(&self, cone: usize) -> BTreeSet<LatticeVector> {
        self.decompositions[cone].keys().cloned().collect()
    }

    /// `W(E, σ)` with multiplicities `dim E^σ(m)`.
    pub fn weight_multiset(&self, cone: usize) -> BTreeMap<LatticeVector, usize> {
        self.decompositions[cone]
            .iter()
            .map(|(m, s)| (m.clone(), s.dim()))
            .collect()
    }

    /// Dimension-weighted sum of the weights at `σ`.
    pub fn weight_sum(&self, cone: usize) -> LatticeVector {
        self.decompositions[cone].iter().fold(
            LatticeVector::zero(Lattice::M, self.fan.dimension()),
            |acc, (m, s)| &acc + &m.scale(&BigInt::from(s.dim())),
        )
    }

    pub fn weight_table(&self, cone: usize) -> WeightTable {
        let weights = self
            .weight_multiset(cone)
            .into_iter()
            .flat_map(|(m, d)| std::iter::repeat_n(m, d))
            .collect();
        WeightTable { cone, weights }
    }

    pub fn filtrations_json(&self) -> Vec<FiltrationJson> {
        self.filtrations.iter().map(FiltrationJson::from).collect()
    }

    /// `E ⊗ O(D)`: every filtration is shifted up by the coefficient of `D`
    /// on its ray.
    pub fn twist(&self, d: &ToricDivisor) -> Result<EquivariantBundle, BundleError> {
        if !Arc::ptr_eq(d.fan(), &self.fan) && **d.fan() != *self.fan {
            return Err(BundleError::FanMismatch);
        }
        let filtrations = self
            .filtrations
            .iter()
            .zip(d.coefficients())
            .map(|(f, a)| {
                let a = to_level(a.clone())?;
                let jumps = f
                    .jumps
                    .iter()
                    .map(|(&i, s)| Ok((i.checked_add(a).ok_or(BundleError::LevelOverflow(a.into()))?, s.clone())))
                    .collect::<Result<BTreeMap<_, _>, BundleError>>()?;
                Ok(Filtration {
                    ray: f.ray,
                    full: f.full.clone(),
                    jumps,
                })
            })
            .collect::<Result<Vec<_>, BundleError>>()?;
        make_bundle(self.fan.clone(), filtrations)
    }

    /// `h⁰(E) = Σ_m dim ∩_ρ E_ρ(⟨m, n_ρ⟩)`.
    pub fn global_sections_dimension(&self) -> usize {
        let dim = self.fan.dimension();
        let rays = self.fan.rays();
        // m contributes only if ⟨m, n_ρ⟩ < hi_ρ on every ray
        let bounds: Vec<BigRational> = self
            .filtrations
            .iter()
            .map(|f| BigRational::from_integer((f.saturation_bounds().1 - 1).into()))
            .collect();
        let feasible = |m: &[BigRational]| {
            rays.iter().zip(&bounds).all(|(r, b)| {
                let v: BigRational = m.iter().zip(r.to_rational()).map(|(x, y)| x * y).sum();
                v <= *b
            })
        };
        let mut lo: Option<Vec<BigRational>> = None;
        let mut hi: Option<Vec<BigRational>> = None;
        for subset in (0..rays.len()).combinations(dim) {
            let a: QMatrix = subset.iter().map(|&r| rays[r].to_rational()).collect();
            let b: Vec<BigRational> = subset.iter().map(|&r| bounds[r].clone()).collect();
            if let linalg::Solution::Unique(v) = linalg::solve(&a, &b, dim) {
                if feasible(&v) {
                    let merge = |acc: &mut Option<Vec<BigRational>>, pick: fn(&BigRational, &BigRational) -> bool| {
                        let cur = acc.get_or_insert_with(|| v.clone());
                        for (c, x) in cur.iter_mut().zip(&v) {
                            if pick(x, c) {
                                *c = x.clone();
                            }
                        }
                    };
                    merge(&mut lo, |x, c| x < c);
                    merge(&mut hi, |x, c| x > c);
                }
            }
        }
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return 0;
        };
        let ranges: Vec<std::ops::RangeInclusive<i64>> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| {
                let l = l.ceil().to_integer().to_i64().expect("section box exceeds i64");
                let h = h.floor().to_integer().to_i64().expect("section box exceeds i64");
                l..=h
            })
            .collect();
        ranges
            .into_iter()
            .multi_cartesian_product()
            .map(|c| {
                let m = LatticeVector::from_i64s(Lattice::M, &c);
                let mut proper = Vec::new();
                for (f, r) in self.filtrations.iter().zip(rays) {
                    let s = match to_level(pair(&m, r).unwrap()) {
                        Ok(i) => f.at(i),
                        Err(_) => return 0,
                    };
                    match s.dim() {
                        0 => return 0,
                        d if d == self.rank => {}
                        _ => proper.push(s),
                    }
                }
                proper
                    .into_iter()
                    .try_fold(Subspace::full(self.rank), |acc, s| {
                        let s = acc.intersect(s);
                        (s.dim() > 0).then_some(s)
                    })
                    .map_or(0, |s| s.dim())
            })
            .sum()
    }
}

/// `O(D)`: the rank-one bundle whose filtration on `ρ` drops from `E` to
/// zero just above level `a_ρ`.
pub fn line_bundle(d: &ToricDivisor) -> Result<EquivariantBundle, BundleError> {
    let filtrations = d
        .coefficients()
        .iter()
        .enumerate()
        .map(|(r, a)| Ok(Filtration::step(r, 1, to_level(a.clone())?)))
        .collect::<Result<Vec<_>, BundleError>>()?;
    make_bundle(d.fan().clone(), filtrations)
}

/// Block direct sum of bundles on a common fan.
pub fn direct_sum(bundles: &[EquivariantBundle]) -> Result<EquivariantBundle, BundleError> {
    let first = bundles.first().ok_or(BundleError::EmptySum)?;
    if bundles
        .iter()
        .any(|b| !Arc::ptr_eq(&b.fan, &first.fan) && *b.fan != *first.fan)
    {
        return Err(BundleError::FanMismatch);
    }
    let total: usize = bundles.iter().map(|b| b.rank).sum();
    let nrays = first.fan.rays().len();
    let mut filtrations = Vec::with_capacity(nrays);
    for r in 0..nrays {
        let mut offset = 0;
        let embedded: Vec<Filtration> = bundles
            .iter()
            .map(|b| {
                let e = b.filtrations[r].embed(offset, total);
                offset += b.rank;
                e
            })
            .collect();
        let levels: BTreeSet<i64> = embedded.iter().flat_map(|f| f.jumps.keys().copied()).collect();
        let jumps = levels
            .into_iter()
            .map(|i| {
                let s = embedded
                    .iter()
                    .fold(Subspace::zero(total), |acc, f| acc.sum(f.at(i)));
                (i, s)
            })
            .collect();
        filtrations.push(Filtration::new(r, total, jumps)?);
    }
    make_bundle(first.fan.clone(), filtrations)
}

/// `Ω¹`: on `E = M_Q`, `E_ρ(i)` is everything for `i < 0`, `ker n_ρ` at
/// `i = 0` and zero for `i > 0`.
pub fn cotangent_bundle(fan: &Arc<Fan>) -> Result<EquivariantBundle, BundleError> {
    let n = fan.dimension();
    let filtrations = fan
        .rays()
        .iter()
        .enumerate()
        .map(|(r, ray)| {
            let kernel = linalg::null_space(&vec![ray.to_rational()], n);
            Filtration::new(
                r,
                n,
                vec![(0, Subspace::span(n, kernel)), (1, Subspace::zero(n))],
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    make_bundle(fan.clone(), filtrations)
}

/// Weights of the trivial bundle of rank `r`, used as a sanity fixture.
pub fn trivial_bundle(fan: &Arc<Fan>, rank: usize) -> Result<EquivariantBundle, BundleError> {
    let filtrations = (0..fan.rays().len())
        .map(|r| Filtration::step(r, rank, 0))
        .collect();
    make_bundle(fan.clone(), filtrations)
}

/// The weights of `Ω¹_{ℙⁿ}` at `σ_k` in closed form: `{-e_i^*}` at `σ_0`,
/// and `{e_k^*} ∪ {e_k^* - e_i^* : i ≠ k}` otherwise.
pub fn cotangent_closed_form(n: usize, k: usize) -> BTreeSet<LatticeVector> {
    let dual = |j: usize| LatticeVector::basis(Lattice::M, n, j - 1);
    if k == 0 {
        return (1..=n).map(|i| -&dual(i)).collect();
    }
    let mut w: BTreeSet<LatticeVector> = (1..=n).filter(|&i| i != k).map(|i| &dual(k) - &dual(i)).collect();
    w.insert(dual(k));
    w
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CotangentCone {
    pub cone: usize,
    pub weights: Vec<LatticeVector>,
    pub closed_form: Vec<LatticeVector>,
    pub weight_sum: LatticeVector,
    pub anticanonical: LatticeVector,
    /// `m(ψ_i, σ)` for the summands `O(-V(ρ_i))` of the Euler sequence.
    pub euler_summands: Vec<LatticeVector>,
    pub closed_form_match: bool,
    pub anticanonical_match: bool,
    pub euler_multiset_match: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CotangentReport {
    pub n: usize,
    pub cones: Vec<CotangentCone>,
    pub pass: bool,
}

/// Weights of `Ω¹` on `ℙⁿ` compared at every cone with the closed form,
/// with the anticanonical functional (weights summed with multiplicity)
/// and with the middle term of the Euler sequence:
/// `W(Ω¹, σ) ⊎ {0} = ⊎_i {m(ψ_i, σ)}`.
pub fn cotangent_report(n: usize) -> Result<CotangentReport, BundleError> {
    let space = crate::fan::projective_space(n)?;
    let omega = cotangent_bundle(space.fan())?;
    let table = crate::fan::euler_summand_table(n)?;
    let anti = crate::fan::anticanonical_support(n)?;
    let cones: Vec<CotangentCone> = (0..=n)
        .map(|k| {
            let multiset = omega.weight_multiset(k);
            let weights: Vec<LatticeVector> = multiset
                .iter()
                .flat_map(|(m, &d)| std::iter::repeat_n(m.clone(), d))
                .collect();
            let closed_form: Vec<LatticeVector> = cotangent_closed_form(n, k).into_iter().collect();
            let mut summands: Vec<LatticeVector> = table.entries.iter().map(|row| row[k].clone()).collect();
            summands.sort();
            let mut with_zero = weights.clone();
            with_zero.push(LatticeVector::zero(Lattice::M, n));
            with_zero.sort();
            let weight_sum = omega.weight_sum(k);
            let anticanonical = anti.functional(k).clone();
            CotangentCone {
                cone: k,
                closed_form_match: weights == closed_form,
                anticanonical_match: weight_sum == anticanonical,
                euler_multiset_match: with_zero == summands,
                weights,
                closed_form,
                weight_sum,
                anticanonical,
                euler_summands: summands,
            }
        })
        .collect();
    Ok(CotangentReport {
        n,
        pass: cones
            .iter()
            .all(|c| c.closed_form_match && c.anticanonical_match && c.euler_multiset_match),
        cones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{projective_space, support_function_of_divisor};

    fn m(c: &[i64]) -> LatticeVector {
        LatticeVector::m(c)
    }

    fn set(v: &[&[i64]]) -> BTreeSet<LatticeVector> {
        v.iter().map(|c| m(c)).collect()
    }

    fn qv(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| linalg::q(x)).collect()
    }

    #[test]
    fn subspace_lattice_operations() {
        let a = Subspace::span(3, vec![qv(&[1, 0, 0]), qv(&[0, 1, 0])]);
        let b = Subspace::span(3, vec![qv(&[0, 1, 0]), qv(&[0, 0, 1])]);
        assert_eq!(a.intersect(&b), Subspace::span(3, vec![qv(&[0, 2, 0])]));
        assert_eq!(a.sum(&b), Subspace::full(3));
        assert!(a.contains(&Subspace::coordinate(3, &[0])));
        assert!(!a.contains(&Subspace::coordinate(3, &[2])));
        let line = Subspace::span(3, vec![qv(&[1, 1, 0])]);
        assert_eq!(line.intersect(&Subspace::coordinate(3, &[0])).dim(), 0);
    }

    #[test]
    fn filtration_validation() {
        let full_then_zero = Filtration::new(0, 2, vec![(1, Subspace::zero(2))]).unwrap();
        assert_eq!(full_then_zero.at(0).dim(), 2);
        assert_eq!(full_then_zero.at(1).dim(), 0);
        assert_eq!(full_then_zero.jump_indices(), vec![0]);
        let increasing = Filtration::new(
            0,
            2,
            vec![(0, Subspace::coordinate(2, &[0])), (1, Subspace::coordinate(2, &[1]))],
        );
        assert!(increasing.is_err());
        let unsaturated = Filtration::new(0, 2, vec![(0, Subspace::coordinate(2, &[0]))]);
        assert!(unsaturated.is_err());
    }

    #[test]
    fn line_bundle_weight_is_support_functional() {
        let p2 = projective_space(2).unwrap();
        let d = ToricDivisor::prime(p2.fan().clone(), 1).negate();
        let l = line_bundle(&d).unwrap();
        assert_eq!(l.weights(0), set(&[&[-1, 0]]));
        let psi = support_function_of_divisor(&d).unwrap();
        for k in 0..3 {
            assert_eq!(l.weights(k), [psi.functional(k).clone()].into_iter().collect());
        }
    }

    #[test]
    fn trivial_bundle_has_zero_weight() {
        let p2 = projective_space(2).unwrap();
        let o = trivial_bundle(p2.fan(), 1).unwrap();
        for k in 0..3 {
            assert_eq!(o.weights(k), set(&[&[0, 0]]));
            assert!(o.weight_sum(k).is_zero());
        }
    }

    #[test]
    fn cotangent_weights_p2() {
        let p2 = projective_space(2).unwrap();
        let omega = cotangent_bundle(p2.fan()).unwrap();
        assert_eq!(omega.rank(), 2);
        assert_eq!(omega.weights(0), set(&[&[-1, 0], &[0, -1]]));
        assert_eq!(omega.weights(1), set(&[&[1, 0], &[1, -1]]));
        assert_eq!(omega.weights(2), set(&[&[0, 1], &[-1, 1]]));
        assert_eq!(omega.weight_sum(0), m(&[-1, -1]));
        assert_eq!(omega.weight_sum(1), m(&[2, -1]));
        // each weight space of σ_0 is the coordinate line e_i^*
        let d0 = omega.decomposition(0);
        assert_eq!(d0[&m(&[-1, 0])], Subspace::coordinate(2, &[0]));
    }

    #[test]
    fn cotangent_weights_p1() {
        let p1 = projective_space(1).unwrap();
        let omega = cotangent_bundle(p1.fan()).unwrap();
        assert_eq!(omega.weights(0), set(&[&[-1]]));
        assert_eq!(omega.weights(1), set(&[&[1]]));
    }

    #[test]
    fn direct_sum_of_euler_summands() {
        let p2 = projective_space(2).unwrap();
        let fan = p2.fan().clone();
        let summands: Vec<_> = (0..3)
            .map(|i| line_bundle(&ToricDivisor::prime(fan.clone(), i).negate()).unwrap())
            .collect();
        let e = direct_sum(&summands).unwrap();
        assert_eq!(e.rank(), 3);
        let want: BTreeMap<LatticeVector, usize> =
            [(m(&[1, 0]), 1), (m(&[0, 0]), 1), (m(&[1, -1]), 1)].into_iter().collect();
        assert_eq!(e.weight_multiset(1), want);

        let single = direct_sum(&summands[..1]).unwrap();
        for k in 0..3 {
            assert_eq!(single.weight_multiset(k), summands[0].weight_multiset(k));
        }
        assert_eq!(direct_sum(&[]).unwrap_err(), BundleError::EmptySum);
    }

    #[test]
    fn doubled_line_bundle_on_p1() {
        let p1 = projective_space(1).unwrap();
        let o_minus_1 = line_bundle(&ToricDivisor::prime(p1.fan().clone(), 0).negate()).unwrap();
        let e = direct_sum(&[o_minus_1.clone(), o_minus_1]).unwrap();
        assert_eq!(e.rank(), 2);
        for k in 0..2 {
            let ms = e.weight_multiset(k);
            assert_eq!(ms.len(), 1);
            assert_eq!(ms.values().copied().collect::<Vec<_>>(), vec![2]);
        }
    }

    #[test]
    fn three_lines_in_a_plane_are_incompatible() {
        // rank 2 on P^3, cone σ_0 = <e_1, e_2, e_3>: each of its rays carries
        // a different line at level 1. No basis of Q^2 is adapted to all three.
        let p3 = projective_space(3).unwrap();
        let lines = [qv(&[1, 0]), qv(&[0, 1]), qv(&[1, 1])];
        let mut filtrations = vec![Filtration::step(0, 2, 0)];
        for (j, line) in lines.iter().enumerate() {
            filtrations.push(
                Filtration::new(
                    j + 1,
                    2,
                    vec![(1, Subspace::span(2, vec![line.clone()])), (2, Subspace::zero(2))],
                )
                .unwrap(),
            );
        }
        let err = make_bundle(p3.fan().clone(), filtrations).unwrap_err();
        assert!(matches!(err, BundleError::Incompatible { cone: 0, .. }), "{err}");
    }

    #[test]
    fn two_flags_on_a_p2_cone_always_split() {
        // Two rays per cone on P^2, so any pair of flags has a common
        // adapted basis; generic lines give compatible data.
        let p2 = projective_space(2).unwrap();
        let flag = |ray: usize, v: &[i64]| {
            Filtration::new(
                ray,
                2,
                vec![(1, Subspace::span(2, vec![qv(v)])), (2, Subspace::zero(2))],
            )
            .unwrap()
        };
        let bundle = make_bundle(
            p2.fan().clone(),
            vec![flag(0, &[1, 2]), flag(1, &[3, -1]), flag(2, &[1, 1])],
        )
        .unwrap();
        for k in 0..3 {
            assert_eq!(bundle.weight_multiset(k).values().sum::<usize>(), 2);
        }
    }

    #[test]
    fn wrong_filtration_count() {
        let p2 = projective_space(2).unwrap();
        let err = make_bundle(p2.fan().clone(), vec![Filtration::step(0, 1, 0)]).unwrap_err();
        assert_eq!(err, BundleError::FiltrationCount { expected: 3, found: 1 });
    }

    #[test]
    fn cotangent_reports_pass() {
        for n in 1..=4 {
            let r = cotangent_report(n).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let r = cotangent_report(2).unwrap();
        assert_eq!(r.cones[1].weights, vec![m(&[1, -1]), m(&[1, 0])]);
        assert_eq!(r.cones[1].weight_sum, m(&[2, -1]));
        assert_eq!(r.cones[1].euler_summands, vec![m(&[0, 0]), m(&[1, -1]), m(&[1, 0])]);
    }

    #[test]
    fn filtration_json_round_trip() {
        let p2 = projective_space(2).unwrap();
        let omega = cotangent_bundle(p2.fan()).unwrap();
        let wire = omega.filtrations_json();
        let text = serde_json::to_string(&wire[1]).unwrap();
        assert_eq!(text, r#"{"ray":1,"jumps":[{"i":0,"basis":[["0/1","1/1"]]},{"i":1,"basis":[]}]}"#);
        let back: FiltrationJson = serde_json::from_str(&text).unwrap();
        assert_eq!(&back.into_filtration(2).unwrap(), omega.filtration(1));
        let table = serde_json::to_string(&omega.weight_table(0)).unwrap();
        assert_eq!(table, r#"{"cone":0,"weights":[[-1,0],[0,-1]]}"#);
    }

    fn binomial(n: u64, k: u64) -> usize {
        (1..=k).fold(1u64, |acc, j| acc * (n + 1 - j) / j) as usize
    }

    #[test]
    fn sections_of_line_bundles() {
        for n in 1..=3usize {
            let pn = projective_space(n).unwrap();
            for d in -2i64..=4 {
                let mut c = vec![0i64; n + 1];
                c[0] = d;
                let l = line_bundle(&ToricDivisor::from_i64s(pn.fan().clone(), &c).unwrap()).unwrap();
                let expected = if d < 0 { 0 } else { binomial(n as u64 + d as u64, n as u64) };
                assert_eq!(l.global_sections_dimension(), expected, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn sections_of_twisted_cotangent() {
        // 3 h0(O(d-1)) - h0(O(d)) on the plane
        let p2 = projective_space(2).unwrap();
        let omega = cotangent_bundle(p2.fan()).unwrap();
        assert_eq!(omega.global_sections_dimension(), 0);
        for (d, h0) in [(1, 0), (2, 3), (3, 8)] {
            let dd = ToricDivisor::from_i64s(p2.fan().clone(), &[d, 0, 0]).unwrap();
            assert_eq!(omega.twist(&dd).unwrap().global_sections_dimension(), h0);
        }
    }

    #[test]
    fn twist_adds_weights() {
        let p2 = projective_space(2).unwrap();
        let omega = cotangent_bundle(p2.fan()).unwrap();
        let d = ToricDivisor::from_i64s(p2.fan().clone(), &[1, 2, -1]).unwrap();
        let twisted = omega.twist(&d).unwrap();
        let l = line_bundle(&d).unwrap();
        for k in 0..3 {
            let shift = l.weights(k).into_iter().next().unwrap();
            let expected: BTreeSet<LatticeVector> = omega.weights(k).iter().map(|w| w + &shift).collect();
            assert_eq!(twisted.weights(k), expected);
        }
    }
}
