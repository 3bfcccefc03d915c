//! Full-dimensional lattice polytopes in vertex + facet form, polar duality,
//! reflexivity and the Fano condition, faces and lattice points.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::JsonInt;
use crate::lattice::{Lattice, LatticeVector, RationalPoint};
use crate::linalg::{self, QMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("no points given")]
    Empty,
    #[error("points mix lattices or dimensions")]
    Inhomogeneous,
    #[error("points span an affine space of dimension {affine_dim} in ambient dimension {ambient}")]
    Degenerate { affine_dim: usize, ambient: usize },
    #[error("the origin is not in the interior")]
    OriginNotInterior,
    #[error("face dimension {k} out of range 0..={dim}")]
    FaceDimension { k: usize, dim: usize },
    #[error("serialized polytope is inconsistent: {0}")]
    Inconsistent(String),
}

/// `{x : <x, normal> >= offset}` with equality on the facet itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    normal: LatticeVector,
    offset: BigInt,
}

impl Facet {
    pub fn normal(&self) -> &LatticeVector {
        &self.normal
    }

    pub fn offset(&self) -> &BigInt {
        &self.offset
    }

    /// `<x, normal> - offset`; nonnegative exactly on the polytope side.
    pub fn slack(&self, x: &LatticeVector) -> BigInt {
        x.dot(&self.normal) - &self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    dimension: usize,
    lattice: Lattice,
    vertices: Vec<LatticeVector>,
    facets: Vec<Facet>,
}

/// Result of polar duality: integral polytopes come back as polytopes, the
/// rest as their (rational) vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolarDual {
    Integral(Polytope),
    Rational(Vec<RationalPoint>),
}

impl PolarDual {
    pub fn is_integral(&self) -> bool {
        matches!(self, PolarDual::Integral(_))
    }

    pub fn integral(self) -> Option<Polytope> {
        match self {
            PolarDual::Integral(p) => Some(p),
            PolarDual::Rational(_) => None,
        }
    }

    pub fn vertices(&self) -> Vec<RationalPoint> {
        match self {
            PolarDual::Integral(p) => p
                .vertices
                .iter()
                .map(|v| RationalPoint::new(v.to_rational()))
                .collect(),
            PolarDual::Rational(v) => v.clone(),
        }
    }
}

fn affine_dimension(points: &[&LatticeVector]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    let rows: QMatrix = rest.iter().map(|p| (*p - *first).to_rational()).collect();
    linalg::rank(&rows, first.dim())
}

/// Convex hull of a finite point set.
///
/// Facets are found by exhaustive search over `dim`-subsets of the points:
/// a subset spanning a hyperplane with every point on one side gives a facet.
pub fn convex_hull(points: &[LatticeVector]) -> Result<Polytope, PolytopeError> {
    let first = points.first().ok_or(PolytopeError::Empty)?;
    let dim = first.dim();
    let lattice = first.lattice();
    if points.iter().any(|p| p.dim() != dim || p.lattice() != lattice) {
        return Err(PolytopeError::Inhomogeneous);
    }
    let pts: Vec<LatticeVector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let refs: Vec<&LatticeVector> = pts.iter().collect();
    let affine_dim = affine_dimension(&refs);
    if affine_dim < dim {
        return Err(PolytopeError::Degenerate {
            affine_dim,
            ambient: dim,
        });
    }

    let mut facets = BTreeSet::new();
    for combo in (0..pts.len()).combinations(dim) {
        let base = &pts[combo[0]];
        let rows: QMatrix = combo[1..].iter().map(|&i| (&pts[i] - base).to_rational()).collect();
        let kernel = linalg::null_space(&rows, dim);
        if kernel.len() != 1 {
            continue;
        }
        let normal = LatticeVector::new(lattice.dual(), linalg::primitive_integer(&kernel[0]));
        let offset = base.dot(&normal);
        let slacks: Vec<BigInt> = pts.iter().map(|p| p.dot(&normal) - &offset).collect();
        if slacks.iter().all(|s| !s.is_negative()) {
            facets.insert(Facet { normal, offset });
        } else if slacks.iter().all(|s| !s.is_positive()) {
            facets.insert(Facet {
                normal: -&normal,
                offset: -offset,
            });
        }
    }
    let facets: Vec<Facet> = facets.into_iter().collect();

    let vertices = pts
        .into_iter()
        .filter(|p| {
            let tight: QMatrix = facets
                .iter()
                .filter(|f| f.slack(p).is_zero())
                .map(|f| f.normal.to_rational())
                .collect();
            linalg::rank(&tight, dim) == dim
        })
        .collect();

    Ok(Polytope {
        dimension: dim,
        lattice,
        vertices,
        facets,
    })
}

impl Polytope {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, x: &LatticeVector) -> bool {
        self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    pub fn origin_is_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset.is_negative())
    }

    /// Indices of the vertices lying on facet `f`.
    pub fn facet_vertices(&self, f: usize) -> Vec<usize> {
        let facet = &self.facets[f];
        (0..self.vertices.len())
            .filter(|&i| facet.slack(&self.vertices[i]).is_zero())
            .collect()
    }

    pub fn vertex_index(&self, v: &LatticeVector) -> Option<usize> {
        self.vertices.iter().position(|w| w == v)
    }

    /// The same polytope with every vertex multiplied by `k > 0`.
    pub fn dilate(&self, k: &BigInt) -> Result<Polytope, PolytopeError> {
        assert!(k.is_positive());
        let pts: Vec<LatticeVector> = self.vertices.iter().map(|v| v.scale(k)).collect();
        convex_hull(&pts)
    }
}

/// `{y : <x, y> >= -1 for all x in P}`.
pub fn polar_dual(p: &Polytope) -> Result<PolarDual, PolytopeError> {
    if !p.origin_is_interior() {
        return Err(PolytopeError::OriginNotInterior);
    }
    // facet <x,a> >= b with b < 0 gives the dual vertex a / (-b)
    let verts: Vec<RationalPoint> = p
        .facets
        .iter()
        .map(|f| {
            let denom = -f.offset.clone();
            RationalPoint::new(
                f.normal
                    .coords()
                    .iter()
                    .map(|c| BigRational::new(c.clone(), denom.clone()))
                    .collect(),
            )
        })
        .collect();
    let dual = p.lattice.dual();
    let integral: Option<Vec<LatticeVector>> = verts.iter().map(|v| v.to_lattice(dual)).collect();
    match integral {
        Some(pts) => Ok(PolarDual::Integral(convex_hull(&pts)?)),
        None => {
            let mut verts = verts;
            verts.sort();
            Ok(PolarDual::Rational(verts))
        }
    }
}

/// The origin is interior and the polar dual is integral.
pub fn is_reflexive(p: &Polytope) -> bool {
    matches!(polar_dual(p), Ok(PolarDual::Integral(_)))
}

/// Reflexive, and the vertices of every facet form a lattice basis.
pub fn is_fano_polytope(p: &Polytope) -> bool {
    if !is_reflexive(p) {
        return false;
    }
    (0..p.facets.len()).all(|f| {
        let idx = p.facet_vertices(f);
        if idx.len() != p.dimension {
            return false;
        }
        let m: Vec<Vec<BigInt>> = idx.iter().map(|&i| p.vertices[i].coords().to_vec()).collect();
        linalg::det_integer(&m).abs().is_one()
    })
}

/// All `k`-dimensional faces, each given as the sorted indices of its
/// vertices. `faces(P, dim)` is `P` itself; `faces(P, 0)` the vertices.
pub fn faces(p: &Polytope, k: usize) -> Result<Vec<Vec<usize>>, PolytopeError> {
    if k > p.dimension {
        return Err(PolytopeError::FaceDimension {
            k,
            dim: p.dimension,
        });
    }
    if k == p.dimension {
        return Ok(vec![(0..p.vertices.len()).collect()]);
    }
    // every proper face is an intersection of facets
    let mut all: BTreeSet<Vec<usize>> = (0..p.facets.len()).map(|f| p.facet_vertices(f)).collect();
    loop {
        let current: Vec<Vec<usize>> = all.iter().cloned().collect();
        let mut grew = false;
        for (a, b) in current.iter().tuple_combinations() {
            let meet: Vec<usize> = a.iter().filter(|i| b.contains(i)).copied().collect();
            if !meet.is_empty() && all.insert(meet) {
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    Ok(all
        .into_iter()
        .filter(|face| {
            let pts: Vec<&LatticeVector> = face.iter().map(|&i| &p.vertices[i]).collect();
            affine_dimension(&pts) == k
        })
        .collect())
}

/// `P ∩ lattice`, by scanning the bounding box and filtering with the
/// facet inequalities. Sorted lexicographically.
pub fn lattice_points(p: &Polytope) -> Vec<LatticeVector> {
    let dim = p.dimension;
    let lo: Vec<BigInt> = (0..dim)
        .map(|i| p.vertices.iter().map(|v| v.coords()[i].clone()).min().unwrap())
        .collect();
    let hi: Vec<BigInt> = (0..dim)
        .map(|i| p.vertices.iter().map(|v| v.coords()[i].clone()).max().unwrap())
        .collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let x = LatticeVector::new(p.lattice, cur.clone());
        if p.contains(&x) {
            out.push(x);
        }
        // odometer, last coordinate fastest
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                cur[i + 1..dim].clone_from_slice(&lo[i + 1..dim]);
                break;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetJson {
    pub normal: Vec<JsonInt>,
    pub offset: JsonInt,
}

/// Wire form `{dimension, vertices, facets}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dimension: usize,
    pub vertices: Vec<Vec<JsonInt>>,
    pub facets: Vec<FacetJson>,
}

impl From<&Polytope> for PolytopeJson {
    fn from(p: &Polytope) -> Self {
        PolytopeJson {
            dimension: p.dimension,
            vertices: p.vertices.iter().map(LatticeVector::to_json).collect(),
            facets: p
                .facets
                .iter()
                .map(|f| FacetJson {
                    normal: f.normal.to_json(),
                    offset: JsonInt(f.offset.clone()),
                })
                .collect(),
        }
    }
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolytopeJson::from(self).serialize(s)
    }
}

impl PolytopeJson {
    /// Rebuilds the polytope in the given lattice, checking that the stored
    /// vertices and facets are exactly what the hull of the vertices gives.
    pub fn into_polytope(&self, lattice: Lattice) -> Result<Polytope, PolytopeError> {
        if self.vertices.iter().any(|v| v.len() != self.dimension) {
            return Err(PolytopeError::Inconsistent("vertex of wrong dimension".into()));
        }
        let pts: Vec<LatticeVector> = self
            .vertices
            .iter()
            .map(|v| LatticeVector::from_json(lattice, v))
            .collect();
        let p = convex_hull(&pts)?;
        let given: BTreeSet<Facet> = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: LatticeVector::from_json(lattice.dual(), &f.normal),
                offset: f.offset.0.clone(),
            })
            .collect();
        let computed: BTreeSet<Facet> = p.facets.iter().cloned().collect();
        if given != computed {
            return Err(PolytopeError::Inconsistent("facets disagree with vertex hull".into()));
        }
        if p.vertices.len() != pts.len() {
            return Err(PolytopeError::Inconsistent("redundant vertices".into()));
        }
        Ok(p)
    }
}
