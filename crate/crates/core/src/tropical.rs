//! Tropical Lagrangian sections over a simplex `Δ`, lifted to the universal
//! cover `Δ × M_R`.
//!
//! A lift is recorded by an integral height `h(m_σ) ∈ M` at every vertex of
//! `Δ`; the Lagrangian itself is the graph of the affine interpolant. The
//! deck group `M` acts by translating all heights. The weight set of a lift
//! at a vertex is its fibre over that vertex.
//!
//! Surgery of a multisection `L_1` with a section `L_2` is tracked on fibres:
//! away from the surgery points the result is `L_1 ∪ L_2`, and at each
//! vertex carrying a surgery point the common height is removed from the
//! fibre.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fan::{self, FanError, SupportFunction, ToricDivisor, ToricFano};
use crate::klyachko::{self, BundleError};
use crate::lattice::{Lattice, LatticeVector, RationalPoint};
use crate::linalg::{self, QMatrix, Solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LagrangianError {
    #[error("base must be a full-dimensional simplex of M-points")]
    NotASimplex,
    #[error("expected {expected} heights, got {found}")]
    HeightCount { expected: usize, found: usize },
    #[error("height {0} is not an M-vector of the base dimension")]
    BadHeight(usize),
    #[error("lifts live over different bases")]
    BaseMismatch,
    #[error("a multisection needs at least one component")]
    EmptyMultisection,
    #[error("component {component}: intersection with the second section is {kind}")]
    NotSurgerable { component: usize, kind: &'static str },
    #[error("components {first} and {second} both meet the second section at vertex {vertex}")]
    SharedSurgeryVertex {
        vertex: usize,
        first: usize,
        second: usize,
    },
    #[error("non-transverse: the lifts meet in a positive-dimensional set")]
    NonTransverse,
    #[error("coincident nonzero weight {weight} at vertex {vertex}")]
    CoincidentWeights { vertex: usize, weight: LatticeVector },
    #[error("rotation class is only defined for sections over a segment")]
    NotOneDimensional,
    #[error("the surgered fibre over vertex {0} is not a single point")]
    NotASection(usize),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// The simplex `Δ` with its vertices listed in cone order, so vertex `k`
/// is `m_{σ_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftBase {
    vertices: Vec<LatticeVector>,
}

impl LiftBase {
    pub fn new(vertices: Vec<LatticeVector>) -> Result<Arc<Self>, LagrangianError> {
        let dim = vertices.first().map(LatticeVector::dim).ok_or(LagrangianError::NotASimplex)?;
        if vertices.len() != dim + 1
            || vertices.iter().any(|v| v.dim() != dim || v.lattice() != Lattice::M)
        {
            return Err(LagrangianError::NotASimplex);
        }
        let rows: QMatrix = vertices[1..].iter().map(|v| (v - &vertices[0]).to_rational()).collect();
        if linalg::rank(&rows, dim) != dim {
            return Err(LagrangianError::NotASimplex);
        }
        Ok(Arc::new(LiftBase { vertices }))
    }

    /// `Δ` of a toric Fano variety whose polytope is a simplex.
    pub fn of(space: &ToricFano) -> Result<Arc<Self>, LagrangianError> {
        Self::new(space.cone_vertices().to_vec())
    }

    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertex_index(&self, v: &LatticeVector) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }
}

fn same_base(a: &Arc<LiftBase>, b: &Arc<LiftBase>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// The graph over `Δ` of the affine map interpolating integral vertex
/// heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineLift {
    base: Arc<LiftBase>,
    heights: Vec<LatticeVector>,
    label: Option<String>,
}

impl AffineLift {
    pub fn new(base: Arc<LiftBase>, heights: Vec<LatticeVector>) -> Result<Self, LagrangianError> {
        if heights.len() != base.vertices.len() {
            return Err(LagrangianError::HeightCount {
                expected: base.vertices.len(),
                found: heights.len(),
            });
        }
        let dim = base.dimension();
        if let Some(k) = heights.iter().position(|h| h.dim() != dim || h.lattice() != Lattice::M) {
            return Err(LagrangianError::BadHeight(k));
        }
        Ok(AffineLift {
            base,
            heights,
            label: None,
        })
    }

    /// `Δ × {0}`.
    pub fn zero_section(base: Arc<LiftBase>) -> Self {
        let h = vec![LatticeVector::zero(Lattice::M, base.dimension()); base.vertices.len()];
        AffineLift {
            base,
            heights: h,
            label: Some("zero section".into()),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn base(&self) -> &Arc<LiftBase> {
        &self.base
    }

    pub fn heights(&self) -> &[LatticeVector] {
        &self.heights
    }

    pub fn height(&self, vertex: usize) -> &LatticeVector {
        &self.heights[vertex]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Shifts every height by `m`; the projected Lagrangian is unchanged.
    pub fn deck_translate(&self, m: &LatticeVector) -> AffineLift {
        AffineLift {
            base: self.base.clone(),
            heights: self.heights.iter().map(|h| h + m).collect(),
            label: self.label.clone(),
        }
    }

    /// Height of the lift at the point with barycentric coordinates `λ`.
    pub fn height_at(&self, barycentric: &RationalPoint) -> Vec<BigRational> {
        let dim = self.base.dimension();
        (0..dim)
            .map(|j| {
                barycentric
                    .coords()
                    .iter()
                    .zip(&self.heights)
                    .map(|(l, h)| l * BigRational::from_integer(h.coords()[j].clone()))
                    .sum()
            })
            .collect()
    }

    fn difference(&self, other: &AffineLift) -> Vec<LatticeVector> {
        self.heights.iter().zip(&other.heights).map(|(a, b)| a - b).collect()
    }
}

/// Lift of a tropical section: vertex `m_σ` is raised to height `m(ψ, σ)`.
pub fn lift_of_support_function(space: &ToricFano, psi: &SupportFunction) -> Result<AffineLift, LagrangianError> {
    if !Arc::ptr_eq(psi.fan(), space.fan()) && **psi.fan() != **space.fan() {
        return Err(FanError::FanMismatch.into());
    }
    AffineLift::new(LiftBase::of(space)?, psi.functionals().to_vec())
}

/// Fibres of a Lagrangian over the vertices of `Δ`.
pub trait WeightFibres {
    fn base(&self) -> &Arc<LiftBase>;

    /// `W(L, m_σ)`: the heights of `L` over vertex `vertex`.
    fn weights_at(&self, vertex: usize) -> BTreeSet<LatticeVector>;
}

impl WeightFibres for AffineLift {
    fn base(&self) -> &Arc<LiftBase> {
        &self.base
    }

    fn weights_at(&self, vertex: usize) -> BTreeSet<LatticeVector> {
        [self.heights[vertex].clone()].into_iter().collect()
    }
}

pub fn lagrangian_weights<L: WeightFibres + ?Sized>(l: &L, vertex: usize) -> BTreeSet<LatticeVector> {
    l.weights_at(vertex)
}

/// A finite union of affine lifts over a common base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSection {
    components: Vec<AffineLift>,
}

impl MultiSection {
    pub fn new(components: Vec<AffineLift>) -> Result<Self, LagrangianError> {
        let first = components.first().ok_or(LagrangianError::EmptyMultisection)?;
        if components.iter().any(|c| !same_base(&c.base, &first.base)) {
            return Err(LagrangianError::BaseMismatch);
        }
        Ok(MultiSection { components })
    }

    pub fn components(&self) -> &[AffineLift] {
        &self.components
    }

    pub fn deck_translate(&self, m: &LatticeVector) -> MultiSection {
        MultiSection {
            components: self.components.iter().map(|c| c.deck_translate(m)).collect(),
        }
    }
}

impl WeightFibres for MultiSection {
    fn base(&self) -> &Arc<LiftBase> {
        &self.components[0].base
    }

    fn weights_at(&self, vertex: usize) -> BTreeSet<LatticeVector> {
        self.components.iter().flat_map(|c| c.weights_at(vertex)).collect()
    }
}

/// How a lift meets another section over `Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Empty,
    /// A single point, at vertex `vertex` of `Δ`.
    Vertex { vertex: usize, point: RationalPoint },
    /// A single point which is not a vertex of `Δ`.
    Interior { point: RationalPoint },
}

impl Intersection {
    fn kind(&self) -> &'static str {
        match self {
            Intersection::Empty => "empty",
            Intersection::Vertex { .. } => "a single vertex",
            Intersection::Interior { .. } => "a single non-vertex point",
        }
    }
}

/// Points of `L ∩ L'` over `Δ`, in barycentric coordinates.
///
/// The set `{λ in the simplex : Σ λ_k (h_k - h'_k) = 0}` is a polytope; its
/// vertices are the unique nonnegative solutions supported on some subset
/// of vertices, enumerated over all supports.
pub fn intersection(l: &AffineLift, other: &AffineLift) -> Result<Intersection, LagrangianError> {
    if !same_base(&l.base, &other.base) {
        return Err(LagrangianError::BaseMismatch);
    }
    let diff = l.difference(other);
    let dim = l.base.dimension();
    let count = diff.len();
    let mut found: BTreeSet<RationalPoint> = BTreeSet::new();
    for mask in 1u64..(1 << count) {
        let support: Vec<usize> = (0..count).filter(|k| (mask >> k) & 1 == 1).collect();
        let mut rows: QMatrix = (0..dim)
            .map(|j| {
                support
                    .iter()
                    .map(|&k| BigRational::from_integer(diff[k].coords()[j].clone()))
                    .collect()
            })
            .collect();
        rows.push(vec![BigRational::one(); support.len()]);
        let mut rhs = vec![BigRational::zero(); dim];
        rhs.push(BigRational::one());
        if let Solution::Unique(x) = linalg::solve(&rows, &rhs, support.len()) {
            if x.iter().all(|v| v.is_positive()) {
                let mut lambda = vec![BigRational::zero(); count];
                for (&k, v) in support.iter().zip(x) {
                    lambda[k] = v;
                }
                found.insert(RationalPoint::new(lambda));
            }
        }
    }
    let mut points = found.into_iter();
    match (points.next(), points.next()) {
        (None, _) => Ok(Intersection::Empty),
        (Some(_), Some(_)) => Err(LagrangianError::NonTransverse),
        (Some(point), None) => Ok(match point.as_standard_basis() {
            Some(vertex) => Intersection::Vertex { vertex, point },
            None => Intersection::Interior { point },
        }),
    }
}

pub fn intersections_with_zero_section(l: &AffineLift) -> Result<Intersection, LagrangianError> {
    intersection(l, &AffineLift::zero_section(l.base.clone()))
}

/// Where a component of `L_1` was joined to `L_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurgeryPoint {
    pub vertex: usize,
    pub component: usize,
    pub barycentric: RationalPoint,
}

/// `L_1 # L_2` for a multisection `L_1` meeting the section `L_2` once per
/// component, each time at a different vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeredSection {
    multisection: MultiSection,
    second: AffineLift,
    surgery_points: Vec<SurgeryPoint>,
}

pub fn surgery(l1: &MultiSection, l2: &AffineLift) -> Result<SurgeredSection, LagrangianError> {
    let mut points: Vec<SurgeryPoint> = Vec::new();
    for (c, comp) in l1.components.iter().enumerate() {
        let hit = intersection(comp, l2).map_err(|e| match e {
            LagrangianError::NonTransverse => LagrangianError::NotSurgerable {
                component: c,
                kind: "positive-dimensional",
            },
            other => other,
        })?;
        match hit {
            Intersection::Vertex { vertex, point } => {
                if let Some(p) = points.iter().find(|p| p.vertex == vertex) {
                    return Err(LagrangianError::SharedSurgeryVertex {
                        vertex,
                        first: p.component,
                        second: c,
                    });
                }
                points.push(SurgeryPoint {
                    vertex,
                    component: c,
                    barycentric: point,
                });
            }
            other => {
                return Err(LagrangianError::NotSurgerable {
                    component: c,
                    kind: other.kind(),
                })
            }
        }
    }
    // distinct components sharing a height away from L_2 would make the
    // fibre a multiset; refuse rather than pick a convention
    for vertex in 0..l2.base.vertices.len() {
        let mut seen = BTreeSet::new();
        for comp in &l1.components {
            let h = comp.height(vertex);
            if h != l2.height(vertex) && !seen.insert(h.clone()) {
                return Err(LagrangianError::CoincidentWeights {
                    vertex,
                    weight: h.clone(),
                });
            }
        }
    }
    Ok(SurgeredSection {
        multisection: l1.clone(),
        second: l2.clone(),
        surgery_points: points,
    })
}

impl SurgeredSection {
    pub fn multisection(&self) -> &MultiSection {
        &self.multisection
    }

    pub fn second(&self) -> &AffineLift {
        &self.second
    }

    pub fn surgery_points(&self) -> &[SurgeryPoint] {
        &self.surgery_points
    }

    pub fn has_surgery_at(&self, vertex: usize) -> bool {
        self.surgery_points.iter().any(|p| p.vertex == vertex)
    }

    /// When every fibre is a single point (always the case over a segment
    /// in the Euler configuration), the section with those heights.
    pub fn as_section(&self) -> Result<AffineLift, LagrangianError> {
        let heights = (0..self.second.base.vertices.len())
            .map(|v| {
                let w = self.weights_at(v);
                if w.len() == 1 {
                    Ok(w.into_iter().next().unwrap())
                } else {
                    Err(LagrangianError::NotASection(v))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AffineLift::new(self.second.base.clone(), heights)?.with_label("surgered"))
    }
}

impl WeightFibres for SurgeredSection {
    fn base(&self) -> &Arc<LiftBase> {
        &self.second.base
    }

    fn weights_at(&self, vertex: usize) -> BTreeSet<LatticeVector> {
        let mut w = self.multisection.weights_at(vertex);
        w.insert(self.second.height(vertex).clone());
        if self.has_surgery_at(vertex) {
            w.remove(self.second.height(vertex));
        }
        w
    }
}

/// The lifts of `ψ_0, ..., ψ_n`, the support functions of `-V(ρ_i)` on `ℙⁿ`.
pub fn euler_multisection(space: &ToricFano) -> Result<MultiSection, LagrangianError> {
    let fan = space.fan();
    let base = LiftBase::of(space)?;
    let components = (0..fan.rays().len())
        .map(|i| {
            let psi = fan::support_function_of_divisor(&ToricDivisor::prime(fan.clone(), i).negate())?;
            Ok(AffineLift::new(base.clone(), psi.functionals().to_vec())?.with_label(format!("-V(rho_{i})")))
        })
        .collect::<Result<Vec<_>, LagrangianError>>()?;
    MultiSection::new(components)
}

/// Per-cone comparison of the surgered fibre with the weights of `Ω¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeComparison {
    pub vertex: LatticeVector,
    pub surgered: Vec<LatticeVector>,
    pub cotangent: Vec<LatticeVector>,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub n: usize,
    pub cones: Vec<ConeComparison>,
    pub pass: bool,
}

/// Builds the Euler configuration on `ℙⁿ`, performs the surgery with the
/// zero section and compares fibres with the weights of the cotangent
/// bundle at every maximal cone.
pub fn verify_main_theorem(n: usize) -> Result<TheoremReport, LagrangianError> {
    let space = fan::projective_space(n)?;
    let l1 = euler_multisection(&space)?;
    let l2 = AffineLift::zero_section(LiftBase::of(&space)?);
    let surgered = surgery(&l1, &l2)?;
    let omega = klyachko::cotangent_bundle(space.fan())?;
    Ok(compare_with_bundle(&space, &surgered, &omega))
}

pub(crate) fn compare_with_bundle(
    space: &ToricFano,
    l: &impl WeightFibres,
    bundle: &klyachko::EquivariantBundle,
) -> TheoremReport {
    let cones: Vec<ConeComparison> = space
        .cone_vertices()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let surgered = l.weights_at(k);
            let cotangent = bundle.weights(k);
            ConeComparison {
                vertex: v.clone(),
                matches: surgered == cotangent,
                surgered: surgered.into_iter().collect(),
                cotangent: cotangent.into_iter().collect(),
            }
        })
        .collect();
    TheoremReport {
        n: space.dimension(),
        pass: cones.iter().all(|c| c.matches),
        cones,
    }
}

/// Winding number of a section over `Δ = [-1, 1]`: the height at `-1`
/// minus the height at `+1`.
pub fn rotation_class(l: &AffineLift) -> Result<BigInt, LagrangianError> {
    if l.base.dimension() != 1 {
        return Err(LagrangianError::NotOneDimensional);
    }
    let at = |x: i64| {
        let k = l
            .base
            .vertex_index(&LatticeVector::m(&[x]))
            .ok_or(LagrangianError::NotOneDimensional)?;
        Ok::<_, LagrangianError>(l.heights[k].coords()[0].clone())
    };
    Ok(at(-1)? - at(1)?)
}

/// The handle `H(t) = a(t) + i b(t)` of the local surgery model:
/// `H(t) = t` for `t <= -1`, `H(t) = i t` for `t >= 1`, and on `[-1, 1]`
///
/// ```text
/// a(t) = -(1 - t)^2 / 4,   b(t) = (1 + t)^2 / 4,
/// ```
///
/// which is `C^1` at `t = ±1` with `a', b' > 0` on `(-1, 1)`.
pub fn handle_curve(t: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    if *t <= -one.clone() {
        return (t.clone(), BigRational::zero());
    }
    if *t >= one {
        return (BigRational::zero(), t.clone());
    }
    let four = BigRational::from_integer(4.into());
    let a = -((&one - t) * (&one - t)) / &four;
    let b = ((&one + t) * (&one + t)) / four;
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::projective_space;

    fn m(c: &[i64]) -> LatticeVector {
        LatticeVector::m(c)
    }

    fn set(v: &[&[i64]]) -> BTreeSet<LatticeVector> {
        v.iter().map(|c| m(c)).collect()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn lift_heights_follow_support_function() {
        let p2 = projective_space(2).unwrap();
        let psi = fan::support_function_of_divisor(&ToricDivisor::prime(p2.fan().clone(), 1).negate()).unwrap();
        let l = lift_of_support_function(&p2, &psi).unwrap();
        assert_eq!(l.heights(), &[m(&[-1, 0]), m(&[0, 0]), m(&[-1, 1])]);

        let zero = fan::support_function_of_divisor(&ToricDivisor::zero(p2.fan().clone())).unwrap();
        let z = lift_of_support_function(&p2, &zero).unwrap();
        assert_eq!(z.heights(), AffineLift::zero_section(LiftBase::of(&p2).unwrap()).heights());
    }

    #[test]
    fn p1_lift_of_psi0() {
        let p1 = projective_space(1).unwrap();
        let psi0 = fan::support_function_of_divisor(&ToricDivisor::prime(p1.fan().clone(), 0).negate()).unwrap();
        let l = lift_of_support_function(&p1, &psi0).unwrap();
        // vertex -1 (σ_0) at height 0, vertex +1 (σ_1) at height 1
        assert_eq!(l.base().vertices(), &[m(&[-1]), m(&[1])]);
        assert_eq!(l.heights(), &[m(&[0]), m(&[1])]);
    }

    #[test]
    fn deck_translation() {
        let p1 = projective_space(1).unwrap();
        let base = LiftBase::of(&p1).unwrap();
        let z = AffineLift::zero_section(base.clone());
        assert_eq!(z.deck_translate(&m(&[0])), z);
        assert_eq!(z.deck_translate(&m(&[1])).heights(), &[m(&[1]), m(&[1])]);
        // heights listed (at -1, at +1); (h_+, h_-) = (1, -1)
        let l = AffineLift::new(base, vec![m(&[-1]), m(&[1])]).unwrap();
        let t = l.deck_translate(&m(&[-1]));
        assert_eq!(t.heights(), &[m(&[-2]), m(&[0])]);
        assert_eq!(rotation_class(&l).unwrap(), rotation_class(&t).unwrap());
        assert_eq!(rotation_class(&t).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn weights_of_euler_multisection() {
        let p2 = projective_space(2).unwrap();
        let l1 = euler_multisection(&p2).unwrap();
        assert_eq!(lagrangian_weights(&l1, 1), set(&[&[1, 0], &[0, 0], &[1, -1]]));
        let z = AffineLift::zero_section(LiftBase::of(&p2).unwrap());
        for k in 0..3 {
            assert_eq!(lagrangian_weights(&z, k), set(&[&[0, 0]]));
        }
        let s = surgery(&l1, &z).unwrap();
        assert_eq!(lagrangian_weights(&s, 1), set(&[&[1, 0], &[1, -1]]));
    }

    #[test]
    fn intersection_classification() {
        let p2 = projective_space(2).unwrap();
        let base = LiftBase::of(&p2).unwrap();
        let l1 = euler_multisection(&p2).unwrap();
        match intersections_with_zero_section(&l1.components()[1]).unwrap() {
            Intersection::Vertex { vertex, point } => {
                assert_eq!(vertex, 1);
                assert_eq!(point.coords(), &[rat(0, 1), rat(1, 1), rat(0, 1)]);
            }
            other => panic!("expected a vertex, got {other:?}"),
        }

        let z = AffineLift::zero_section(base.clone());
        assert_eq!(intersections_with_zero_section(&z), Err(LagrangianError::NonTransverse));

        // λ_0 - λ_1 = 0 and λ_2 = 0 force λ = (1/2, 1/2, 0)
        let edge = AffineLift::new(base.clone(), vec![m(&[1, 0]), m(&[-1, 0]), m(&[0, 1])]).unwrap();
        assert_eq!(
            intersections_with_zero_section(&edge).unwrap(),
            Intersection::Interior {
                point: RationalPoint::new(vec![rat(1, 2), rat(1, 2), rat(0, 1)])
            }
        );

        // with the third height at 0 the whole segment from (1/2,1/2,0) to
        // the vertex (0,0,1) lies on the zero section
        let segment = AffineLift::new(base.clone(), vec![m(&[1, 0]), m(&[-1, 0]), m(&[0, 0])]).unwrap();
        assert_eq!(intersections_with_zero_section(&segment), Err(LagrangianError::NonTransverse));

        let above = AffineLift::new(base, vec![m(&[1, 0]), m(&[2, 0]), m(&[1, 1])]).unwrap();
        assert_eq!(intersections_with_zero_section(&above).unwrap(), Intersection::Empty);
    }

    #[test]
    fn interior_point_lies_on_zero_height() {
        let p2 = projective_space(2).unwrap();
        let base = LiftBase::of(&p2).unwrap();
        let l = AffineLift::new(base, vec![m(&[2, -1]), m(&[-1, 0]), m(&[0, 3])]).unwrap();
        if let Intersection::Interior { point } = intersections_with_zero_section(&l).unwrap() {
            assert!(l.height_at(&point).iter().all(Zero::is_zero));
            assert!(point.is_nonnegative());
        } else {
            panic!("expected an interior point");
        }
    }

    #[test]
    fn euler_multisection_meets_zero_at_distinct_vertices() {
        for n in [1, 2, 4] {
            let space = projective_space(n).unwrap();
            let l1 = euler_multisection(&space).unwrap();
            assert_eq!(l1.components().len(), n + 1);
            let vertices: BTreeSet<usize> = l1
                .components()
                .iter()
                .map(|c| match intersections_with_zero_section(c).unwrap() {
                    Intersection::Vertex { vertex, .. } => vertex,
                    other => panic!("{other:?}"),
                })
                .collect();
            assert_eq!(vertices.len(), n + 1);
        }
    }

    #[test]
    fn surgery_on_p1() {
        let p1 = projective_space(1).unwrap();
        let l1 = euler_multisection(&p1).unwrap();
        let z = AffineLift::zero_section(LiftBase::of(&p1).unwrap());
        let s = surgery(&l1, &z).unwrap();
        assert_eq!(s.weights_at(0), set(&[&[-1]]));
        assert_eq!(s.weights_at(1), set(&[&[1]]));
        assert_eq!(rotation_class(&s.as_section().unwrap()).unwrap(), BigInt::from(-2));
    }

    #[test]
    fn surgery_refuses_degenerate_configurations() {
        let p2 = projective_space(2).unwrap();
        let base = LiftBase::of(&p2).unwrap();
        let z = AffineLift::zero_section(base.clone());
        let only_zero = MultiSection::new(vec![z.clone()]).unwrap();
        assert!(matches!(
            surgery(&only_zero, &z),
            Err(LagrangianError::NotSurgerable { component: 0, .. })
        ));
        let above = AffineLift::new(base.clone(), vec![m(&[1, 0]), m(&[2, 0]), m(&[1, 1])]).unwrap();
        assert!(matches!(
            surgery(&MultiSection::new(vec![above]).unwrap(), &z),
            Err(LagrangianError::NotSurgerable { kind: "empty", .. })
        ));
        let l1 = euler_multisection(&p2).unwrap();
        let doubled = MultiSection::new(vec![l1.components()[0].clone(), l1.components()[0].clone()]).unwrap();
        assert!(matches!(surgery(&doubled, &z), Err(LagrangianError::SharedSurgeryVertex { .. })));
    }

    #[test]
    fn coincident_heights_are_reported() {
        let p2 = projective_space(2).unwrap();
        let base = LiftBase::of(&p2).unwrap();
        let z = AffineLift::zero_section(base.clone());
        // both meet the zero section at different vertices but share the
        // height (1, 1) over vertex 2
        let a = AffineLift::new(base.clone(), vec![m(&[0, 0]), m(&[1, 0]), m(&[1, 1])]).unwrap();
        let b = AffineLift::new(base, vec![m(&[2, 0]), m(&[0, 0]), m(&[1, 1])]).unwrap();
        let err = surgery(&MultiSection::new(vec![a, b]).unwrap(), &z).unwrap_err();
        assert_eq!(err, LagrangianError::CoincidentWeights { vertex: 2, weight: m(&[1, 1]) });
    }

    #[test]
    fn theorem_small_cases() {
        let r = verify_main_theorem(2).unwrap();
        assert!(r.pass);
        assert_eq!(r.cones.len(), 3);
        assert!(r.cones.iter().all(|c| c.surgered.len() == 2 && c.cotangent.len() == 2));
        let r1 = verify_main_theorem(1).unwrap();
        assert!(r1.pass);
        assert_eq!(r1.cones[0].surgered, vec![m(&[-1])]);
        assert_eq!(r1.cones[1].surgered, vec![m(&[1])]);
        let json = serde_json::to_string(&r1).unwrap();
        assert_eq!(
            json,
            r#"{"n":1,"cones":[{"vertex":[-1],"surgered":[[-1]],"cotangent":[[-1]],"match":true},{"vertex":[1],"surgered":[[1]],"cotangent":[[1]],"match":true}],"pass":true}"#
        );
    }

    #[test]
    fn rotation_class_examples() {
        let p1 = projective_space(1).unwrap();
        let base = LiftBase::of(&p1).unwrap();
        assert_eq!(rotation_class(&AffineLift::zero_section(base.clone())).unwrap(), BigInt::zero());
        // (h_+, h_-) = (0, -1)
        let l = AffineLift::new(base, vec![m(&[-1]), m(&[0])]).unwrap();
        assert_eq!(rotation_class(&l).unwrap(), BigInt::from(-1));
        let p2 = projective_space(2).unwrap();
        let z2 = AffineLift::zero_section(LiftBase::of(&p2).unwrap());
        assert_eq!(rotation_class(&z2), Err(LagrangianError::NotOneDimensional));
    }

    #[test]
    fn handle_boundary_conditions() {
        let (a, b) = handle_curve(&rat(-2, 1));
        assert_eq!((a, b), (rat(-2, 1), rat(0, 1)));
        let (a, b) = handle_curve(&rat(2, 1));
        assert_eq!((a, b), (rat(0, 1), rat(2, 1)));
        // continuous at ±1
        assert_eq!(handle_curve(&rat(-1, 1)), (rat(-1, 1), rat(0, 1)));
        assert_eq!(handle_curve(&rat(1, 1)), (rat(0, 1), rat(1, 1)));
    }

    #[test]
    fn handle_is_monotone_inside() {
        let samples: Vec<(BigRational, BigRational)> =
            (1..=101).map(|j| handle_curve(&rat(-51 + j, 51))).collect();
        for w in samples.windows(2) {
            assert!(w[1].0 > w[0].0);
            assert!(w[1].1 > w[0].1);
        }
    }
}
