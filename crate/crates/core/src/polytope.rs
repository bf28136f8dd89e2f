//! Lattice polytopes in dimensions 1 to 3: Newton polytopes, Minkowski sums,
//! normalized mixed volumes and strict interior containment.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::algebra::MultiPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("ambient dimension {0} is not supported (1 to 3 only)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a polytope needs at least one point")]
    Empty,
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("polytope is not full-dimensional (affine dimension {affine} < {ambient})")]
    NotFullDimensional { affine: usize, ambient: usize },
    #[error("mixed volume in dimension {dim} needs {dim} polytopes, got {found}")]
    WrongCount { dim: usize, found: usize },
}

/// A facet inequality `normal · x ≤ offset` with an outward primitive normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Facet {
    fn slack(&self, p: &[i64]) -> i128 {
        self.offset as i128 - dot(&self.normal, p)
    }
}

/// The convex hull of finitely many integer points, stored by its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePolytope {
    ambient_dim: usize,
    vertices: Vec<Vec<i64>>,
}

impl LatticePolytope {
    /// Convex hull of `points`; redundant and interior points are discarded.
    pub fn from_points(ambient_dim: usize, points: &[Vec<i64>]) -> Result<Self, PolytopeError> {
        if !(1..=3).contains(&ambient_dim) {
            return Err(PolytopeError::UnsupportedDimension(ambient_dim));
        }
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        if let Some(p) = points.iter().find(|p| p.len() != ambient_dim) {
            return Err(PolytopeError::DimensionMismatch {
                expected: ambient_dim,
                found: p.len(),
            });
        }
        let pts: Vec<Vec<i64>> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut vertices = extreme_points(ambient_dim, &pts);
        vertices.sort();
        Ok(Self {
            ambient_dim,
            vertices,
        })
    }

    /// Builds a polytope from a vertex list.
    pub fn new(ambient_dim: usize, vertices: Vec<Vec<i64>>) -> Result<Self, PolytopeError> {
        Self::from_points(ambient_dim, &vertices)
    }

    pub fn point(p: Vec<i64>) -> Result<Self, PolytopeError> {
        let d = p.len();
        Self::from_points(d, &[p])
    }

    /// The standard simplex `conv{0, e_1, …, e_n}` scaled by `k`.
    pub fn simplex(ambient_dim: usize, k: i64) -> Result<Self, PolytopeError> {
        let mut pts = vec![vec![0; ambient_dim]];
        for i in 0..ambient_dim {
            let mut e = vec![0; ambient_dim];
            e[i] = k;
            pts.push(e);
        }
        Self::from_points(ambient_dim, &pts)
    }

    /// The box `[0, k_1] × … × [0, k_n]`.
    pub fn lattice_box(sides: &[i64]) -> Result<Self, PolytopeError> {
        let n = sides.len();
        let pts: Vec<Vec<i64>> = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { sides[i] } else { 0 })
                    .collect()
            })
            .collect();
        Self::from_points(n, &pts)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        affine_basis(&self.vertices).len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.ambient_dim
    }

    pub fn translate(&self, v: &[i64]) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            vertices: self
                .vertices
                .iter()
                .map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    /// `k · P` for `k ≥ 0`.
    pub fn dilate(&self, k: i64) -> Self {
        assert!(k >= 0, "negative dilation");
        let verts: Vec<Vec<i64>> = self
            .vertices
            .iter()
            .map(|p| p.iter().map(|a| a * k).collect())
            .collect();
        Self::from_points(self.ambient_dim, &verts).expect("dilation keeps dimension")
    }

    /// `n! · Vol_n(P)`, an integer for lattice polytopes; zero unless full-dimensional.
    pub fn normalized_volume(&self) -> i64 {
        if !self.is_full_dimensional() {
            return 0;
        }
        match self.ambient_dim {
            1 => self.vertices[1][0] - self.vertices[0][0],
            2 => {
                let ring = hull2(&self.vertices.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>());
                let mut twice = 0i128;
                for i in 0..ring.len() {
                    let a = ring[i];
                    let b = ring[(i + 1) % ring.len()];
                    twice += a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128;
                }
                twice.abs() as i64
            }
            _ => {
                let pts: Vec<[i64; 3]> = self.vertices.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let tris = hull3(&pts);
                let o = pts[0];
                let mut six = 0i128;
                for t in &tris {
                    six += orient3(o, pts[t[0]], pts[t[1]], pts[t[2]]);
                }
                six.abs() as i64
            }
        }
    }

    /// Facet inequalities of a full-dimensional polytope.
    pub fn facets(&self) -> Result<Vec<Facet>, PolytopeError> {
        let affine = self.affine_dim();
        if affine != self.ambient_dim {
            return Err(PolytopeError::NotFullDimensional {
                affine,
                ambient: self.ambient_dim,
            });
        }
        let facets = match self.ambient_dim {
            1 => vec![
                Facet { normal: vec![-1], offset: -self.vertices[0][0] },
                Facet { normal: vec![1], offset: self.vertices[1][0] },
            ],
            2 => {
                let ring = hull2(&self.vertices.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>());
                (0..ring.len())
                    .map(|i| {
                        let a = ring[i];
                        let b = ring[(i + 1) % ring.len()];
                        // ccw ring: outward normal is the edge rotated clockwise
                        primitive_facet(vec![b[1] - a[1], a[0] - b[0]], &[a[0], a[1]])
                    })
                    .collect()
            }
            _ => {
                let pts: Vec<[i64; 3]> = self.vertices.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let set: BTreeSet<Facet> = hull3(&pts)
                    .iter()
                    .map(|t| {
                        let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
                        primitive_facet(cross(sub3(b, a), sub3(c, a)).to_vec(), &a)
                    })
                    .collect();
                set.into_iter().collect()
            }
        };
        Ok(facets)
    }

    /// Whether `p` lies in the polytope (`strict`: in its interior, which
    /// requires a full-dimensional polytope).
    pub fn contains(&self, p: &[i64], strict: bool) -> Result<bool, PolytopeError> {
        if p.len() != self.ambient_dim {
            return Err(PolytopeError::DimensionMismatch {
                expected: self.ambient_dim,
                found: p.len(),
            });
        }
        let basis = affine_basis(&self.vertices);
        if basis.len() == self.ambient_dim {
            let facets = self.facets()?;
            return Ok(facets.iter().all(|f| {
                let s = f.slack(p);
                if strict { s > 0 } else { s >= 0 }
            }));
        }
        if strict {
            return Err(PolytopeError::NotFullDimensional {
                affine: basis.len(),
                ambient: self.ambient_dim,
            });
        }
        let origin = &self.vertices[0];
        let mut rows: Vec<Vec<i128>> = basis
            .iter()
            .map(|b| b.iter().map(|&x| x as i128).collect())
            .collect();
        rows.push(p.iter().zip(origin).map(|(a, b)| (a - b) as i128).collect());
        if rank(&rows) > basis.len() {
            return Ok(false);
        }
        if basis.is_empty() {
            return Ok(true);
        }
        // project onto coordinates on which the affine hull maps injectively
        let coords = injective_coordinates(&basis);
        let proj = |q: &[i64]| coords.iter().map(|&i| q[i]).collect::<Vec<_>>();
        let projected: Vec<Vec<i64>> = self.vertices.iter().map(|v| proj(v)).collect();
        let low = LatticePolytope::from_points(coords.len(), &projected)?;
        low.contains(&proj(p), false)
    }

    /// Lattice points of the polytope (or of its interior when `strict`).
    pub fn lattice_points(&self, strict: bool) -> Result<Vec<Vec<i64>>, PolytopeError> {
        let n = self.ambient_dim;
        let lo: Vec<i64> = (0..n)
            .map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap())
            .collect();
        let hi: Vec<i64> = (0..n)
            .map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap())
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            if self.contains(&cur, strict)? {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(out);
                }
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Whether every vertex of `other` lies in this polytope.
    pub fn contains_polytope(&self, other: &LatticePolytope) -> Result<bool, PolytopeError> {
        for v in &other.vertices {
            if !self.contains(v, false)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Convex hull of the exponent vectors of a nonzero polynomial in 1 to 3 variables.
pub fn newton_polytope(p: &MultiPoly) -> Result<LatticePolytope, PolytopeError> {
    if p.is_zero() {
        return Err(PolytopeError::ZeroPolynomial);
    }
    let n = p.num_vars();
    if !(1..=3).contains(&n) {
        return Err(PolytopeError::UnsupportedDimension(n));
    }
    let pts: Vec<Vec<i64>> = p
        .exponents()
        .map(|e| e.iter().map(|&k| k as i64).collect())
        .collect();
    LatticePolytope::from_points(n, &pts)
}

pub fn minkowski_sum(
    p: &LatticePolytope,
    q: &LatticePolytope,
) -> Result<LatticePolytope, PolytopeError> {
    if p.ambient_dim != q.ambient_dim {
        return Err(PolytopeError::DimensionMismatch {
            expected: p.ambient_dim,
            found: q.ambient_dim,
        });
    }
    let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            pts.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
        }
    }
    LatticePolytope::from_points(p.ambient_dim, &pts)
}

/// Normalized mixed volume of `n` polytopes in `R^n`: the Bernstein count of
/// torus solutions of a generic system with these Newton polytopes.
///
/// Computed as `Σ_{∅≠S} (−1)^{n−|S|} Vol(Σ_{i∈S} P_i)`.
pub fn mixed_volume(polys: &[LatticePolytope]) -> Result<u64, PolytopeError> {
    let n = polys.first().map(|p| p.ambient_dim).unwrap_or(0);
    if polys.len() != n || n == 0 {
        return Err(PolytopeError::WrongCount {
            dim: n,
            found: polys.len(),
        });
    }
    if let Some(p) = polys.iter().find(|p| p.ambient_dim != n) {
        return Err(PolytopeError::DimensionMismatch {
            expected: n,
            found: p.ambient_dim,
        });
    }
    let mut total: i128 = 0;
    for mask in 1usize..(1 << n) {
        let mut acc: Option<LatticePolytope> = None;
        for (i, p) in polys.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = Some(match acc {
                    None => p.clone(),
                    Some(a) => minkowski_sum(&a, p)?,
                });
            }
        }
        let vol = acc.expect("nonempty subset").normalized_volume() as i128;
        let size = mask.count_ones() as usize;
        if (n - size).is_multiple_of(2) {
            total += vol;
        } else {
            total -= vol;
        }
    }
    let fact: i128 = (1..=n as i128).product();
    debug_assert!(total >= 0 && total % fact == 0, "mixed volume {total}/{fact}");
    Ok((total / fact) as u64)
}

/// True iff every vertex of `q` satisfies every facet inequality of `p` strictly.
pub fn strict_interior_contains(
    p: &LatticePolytope,
    q: &LatticePolytope,
) -> Result<bool, PolytopeError> {
    if p.ambient_dim != q.ambient_dim {
        return Err(PolytopeError::DimensionMismatch {
            expected: p.ambient_dim,
            found: q.ambient_dim,
        });
    }
    let facets = p.facets()?;
    Ok(q
        .vertices
        .iter()
        .all(|v| facets.iter().all(|f| f.slack(v) > 0)))
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn primitive_facet(normal: Vec<i64>, on: &[i64]) -> Facet {
    let g = normal.iter().fold(0, |acc, &x| gcd(acc, x)).max(1);
    let normal: Vec<i64> = normal.into_iter().map(|x| x / g).collect();
    let offset = dot(&normal, on) as i64;
    Facet { normal, offset }
}

fn sub3(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `det(b − a, c − a, d − a)`.
fn orient3(a: [i64; 3], b: [i64; 3], c: [i64; 3], d: [i64; 3]) -> i128 {
    let n = cross(sub3(b, a), sub3(c, a));
    let w = sub3(d, a);
    n[0] as i128 * w[0] as i128 + n[1] as i128 * w[1] as i128 + n[2] as i128 * w[2] as i128
}

fn cross2(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Counter-clockwise hull of planar points without collinear vertices.
/// Degenerate inputs return the one or two extreme points.
fn hull2(points: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut pts: Vec<[i64; 2]> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<[i64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross2(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[i64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    lower
}

/// Outward-oriented triangles of the hull of full-dimensional 3D points
/// (incremental construction, exact integer predicates).
fn hull3(pts: &[[i64; 3]]) -> Vec<[usize; 3]> {
    let n = pts.len();
    let i0 = 0;
    let i1 = (1..n).find(|&i| pts[i] != pts[i0]).expect("two distinct points");
    let i2 = (1..n)
        .find(|&i| cross(sub3(pts[i1], pts[i0]), sub3(pts[i], pts[i0])) != [0, 0, 0])
        .expect("three affinely independent points");
    let i3 = (1..n)
        .find(|&i| orient3(pts[i0], pts[i1], pts[i2], pts[i]) != 0)
        .expect("four affinely independent points");
    let seed = [i0, i1, i2, i3];
    let mut faces: Vec<[usize; 3]> = Vec::new();
    for skip in 0..4 {
        let f: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| seed[k]).collect();
        let mut tri = [f[0], f[1], f[2]];
        if orient3(pts[tri[0]], pts[tri[1]], pts[tri[2]], pts[seed[skip]]) > 0 {
            tri.swap(1, 2);
        }
        faces.push(tri);
    }
    for (idx, &p) in pts.iter().enumerate() {
        if seed.contains(&idx) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|t| orient3(pts[t[0]], pts[t[1]], pts[t[2]], p) > 0)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut vis_edges: HashSet<(usize, usize)> = HashSet::new();
        for (t, _) in faces.iter().zip(&visible).filter(|(_, v)| **v) {
            vis_edges.insert((t[0], t[1]));
            vis_edges.insert((t[1], t[2]));
            vis_edges.insert((t[2], t[0]));
        }
        let mut next: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, v)| !**v)
            .map(|(t, _)| *t)
            .collect();
        let mut horizon: Vec<(usize, usize)> = vis_edges
            .iter()
            .filter(|(a, b)| !vis_edges.contains(&(*b, *a)))
            .copied()
            .collect();
        horizon.sort();
        for (a, b) in horizon {
            next.push([a, b, idx]);
        }
        faces = next;
    }
    faces
}

/// A maximal set of independent difference vectors `v_i − v_0`.
fn affine_basis(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(origin) = points.first() else {
        return Vec::new();
    };
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for p in points.iter().skip(1) {
        let d: Vec<i64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
        let mut rows: Vec<Vec<i128>> = basis
            .iter()
            .map(|b| b.iter().map(|&x| x as i128).collect())
            .collect();
        rows.push(d.iter().map(|&x| x as i128).collect());
        if rank(&rows) > basis.len() {
            basis.push(d);
        }
    }
    basis
}

/// Rank of a small integer matrix by fraction-free elimination.
fn rank(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let (a, b) = (m[r][c], m[i][c]);
                let pivot_row = m[r].clone();
                for (v, p) in m[i].iter_mut().zip(&pivot_row).take(cols) {
                    *v = *v * a - p * b;
                }
                let g = m[i].iter().fold(0i128, |acc, &x| gcd128(acc, x));
                if g > 1 {
                    for x in m[i].iter_mut() {
                        *x /= g;
                    }
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Coordinates whose projection is injective on the span of `basis`.
fn injective_coordinates(basis: &[Vec<i64>]) -> Vec<usize> {
    let n = basis[0].len();
    let d = basis.len();
    let subsets: Vec<Vec<usize>> = match d {
        1 => (0..n).map(|i| vec![i]).collect(),
        2 => (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| vec![i, j]))
            .collect(),
        _ => vec![(0..n).collect()],
    };
    subsets
        .into_iter()
        .find(|s| {
            let rows: Vec<Vec<i128>> = basis
                .iter()
                .map(|b| s.iter().map(|&i| b[i] as i128).collect())
                .collect();
            rank(&rows) == d
        })
        .expect("some coordinate projection is injective")
}

fn extreme_points(n: usize, pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let basis = affine_basis(pts);
    match basis.len() {
        0 => vec![pts[0].clone()],
        1 => {
            let dir = &basis[0];
            let key = |p: &Vec<i64>| dot(dir, p);
            let lo = pts.iter().min_by_key(|p| key(p)).unwrap().clone();
            let hi = pts.iter().max_by_key(|p| key(p)).unwrap().clone();
            vec![lo, hi]
        }
        d if d == n && n == 2 => hull2(&pts.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>())
            .into_iter()
            .map(|q| q.to_vec())
            .collect(),
        2 => {
            // planar set in 3-space
            let coords = injective_coordinates(&basis);
            let proj: Vec<[i64; 2]> = pts.iter().map(|p| [p[coords[0]], p[coords[1]]]).collect();
            let ring = hull2(&proj);
            pts.iter()
                .zip(&proj)
                .filter(|(_, q)| ring.contains(q))
                .map(|(p, _)| p.clone())
                .collect()
        }
        _ => {
            let arr: Vec<[i64; 3]> = pts.iter().map(|p| [p[0], p[1], p[2]]).collect();
            let tris = hull3(&arr);
            let mut planes: BTreeSet<Facet> = BTreeSet::new();
            for t in &tris {
                let (a, b, c) = (arr[t[0]], arr[t[1]], arr[t[2]]);
                planes.insert(primitive_facet(cross(sub3(b, a), sub3(c, a)).to_vec(), &a));
            }
            let mut out: BTreeSet<Vec<i64>> = BTreeSet::new();
            for f in &planes {
                let on: Vec<Vec<i64>> = pts.iter().filter(|p| f.slack(p) == 0).cloned().collect();
                for v in extreme_points(3, &on) {
                    out.insert(v);
                }
            }
            out.into_iter().collect()
        }
    }
}
