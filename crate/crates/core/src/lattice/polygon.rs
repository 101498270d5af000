use serde::{Deserialize, Serialize};

use super::{angle_cmp, delta_class, det2, LatticeError, Seed, V2};
use crate::scalar::{ext_gcd, Scalar, Q};

/// A convex lattice polygon containing the origin in its interior, listed counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polygon<T> {
    vertices: Vec<V2<T>>,
}

/// Lattice data of one edge: primitive direction (counterclockwise traversal),
/// lattice distance from the origin, and lattice length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeData<T> {
    pub direction: V2<T>,
    pub distance: T,
    pub length: T,
}

fn sub<T: Scalar>(a: V2<T>, b: V2<T>) -> V2<T> {
    [a[0] - b[0], a[1] - b[1]]
}

impl<T: Scalar> Polygon<T> {
    /// Validates strict convexity, counterclockwise order and that the origin is interior.
    pub fn new(vertices: Vec<V2<T>>) -> Result<Self, LatticeError> {
        let n = vertices.len();
        if n < 3 {
            return Err(LatticeError::InvalidPolygon("fewer than three vertices".into()));
        }
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if det2(sub(b, a), sub(c, b)) <= T::zero() {
                return Err(LatticeError::InvalidPolygon("not strictly convex counterclockwise".into()));
            }
            if det2(a, b) <= T::zero() {
                return Err(LatticeError::InvalidPolygon("origin not interior".into()));
            }
        }
        // positive turns can still wind around the origin more than once
        if !super::is_cyclically_ordered(&vertices) {
            return Err(LatticeError::InvalidPolygon("boundary winds more than once".into()));
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[V2<T>] {
        &self.vertices
    }

    pub fn edges(&self) -> Vec<EdgeData<T>> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let d = sub(self.vertices[(i + 1) % n], a);
                let length = d[0].gcd(&d[1]);
                let direction = [d[0] / length, d[1] / length];
                EdgeData { direction, distance: det2(a, direction).abs(), length }
            })
            .collect()
    }

    /// The two T-polygon conditions: primitive vertices, and every edge length
    /// divisible by its lattice distance from the origin.
    pub fn is_t_polygon(&self) -> bool {
        self.vertices.iter().all(|v| v[0].gcd(&v[1]) == T::one())
            && self.edges().iter().all(|e| (e.length % e.distance).is_zero())
    }

    /// Twice the Euclidean area.
    pub fn normalized_area(&self) -> T {
        let n = self.vertices.len();
        (0..n).fold(T::zero(), |acc, i| acc + det2(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn transform(&self, g: &[[T; 2]; 2]) -> Self {
        Polygon { vertices: self.vertices.iter().map(|&v| apply(g, v)).collect() }
    }
}

pub(crate) fn apply<T: Scalar>(g: &[[T; 2]; 2], v: V2<T>) -> V2<T> {
    [g[0][0] * v[0] + g[0][1] * v[1], g[1][0] * v[0] + g[1][1] * v[1]]
}

pub(crate) fn mul2<T: Scalar>(a: &[[T; 2]; 2], b: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let mut p = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    p
}

/// Inverse of an element of SL(2, Z).
pub(crate) fn inv_sl2<T: Scalar>(g: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]]
}

/// The half-plane intersection `{v : ⟨v, ψ(e_i)⟩ ≥ −c_i}` for a q-Painlevé seed.
pub fn t_polygon<T: Scalar>(s: &Seed<T>) -> Result<Polygon<T>, LatticeError> {
    let delta = delta_class(s)?;
    let images = s.psi_images();
    let mut planes: Vec<(V2<T>, T)> = Vec::new();
    for (u, &c) in images.iter().zip(&delta.coefficients) {
        match planes.iter().find(|(w, _)| w == u) {
            Some((_, c0)) if *c0 != c => {
                return Err(LatticeError::NotLatticePolygon("parallel images with different δ-coefficients".into()))
            }
            Some(_) => {}
            None => planes.push((*u, c)),
        }
    }
    // det(v, u) = u_y x − u_x y ≥ −c
    let feasible = |p: &[Q<T>; 2]| {
        planes.iter().all(|(u, c)| {
            Q::from_integer(u[1]) * p[0] - Q::from_integer(u[0]) * p[1] >= Q::from_integer(-*c)
        })
    };
    let mut points: Vec<[Q<T>; 2]> = Vec::new();
    for (i, (u1, c1)) in planes.iter().enumerate() {
        for (u2, c2) in &planes[i + 1..] {
            let (a1, b1, a2, b2) = (u1[1], -u1[0], u2[1], -u2[0]);
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let x = Q::new(-*c1 * b2 + *c2 * b1, det);
            let y = Q::new(-a1 * *c2 + a2 * *c1, det);
            let p = [x, y];
            if feasible(&p) && !points.contains(&p) {
                points.push(p);
            }
        }
    }
    let mut vertices = Vec::with_capacity(points.len());
    for p in points {
        if !p[0].is_integer() || !p[1].is_integer() {
            return Err(LatticeError::NotLatticePolygon(format!("vertex ({}, {}) is not integral", p[0], p[1])));
        }
        vertices.push([p[0].to_integer(), p[1].to_integer()]);
    }
    vertices.sort_by(|a, b| angle_cmp(*a, *b));
    Polygon::new(vertices)
}

/// The edge data predicted from the seed: one edge per distinct ψ-image `u`,
/// traversed in direction `−u`, at distance `c` and of length `c` times the multiplicity.
pub fn predicted_edges<T: Scalar>(s: &Seed<T>) -> Result<Vec<EdgeData<T>>, LatticeError> {
    let delta = delta_class(s)?;
    let mut out: Vec<EdgeData<T>> = Vec::new();
    for (u, &c) in s.psi_images().iter().zip(&delta.coefficients) {
        let direction = [-u[0], -u[1]];
        match out.iter_mut().find(|e| e.direction == direction) {
            Some(e) => e.length = e.length + c,
            None => out.push(EdgeData { direction, distance: c, length: c }),
        }
    }
    out.sort();
    Ok(out)
}

/// SL(2, Z) normal form of a polygon.
pub fn canonical_polygon<T: Scalar>(p: &Polygon<T>) -> Polygon<T> {
    canonical_polygon_with_transform(p).0
}

/// The normal form together with a `g ∈ SL(2, Z)` such that `normal = g · p`
/// up to the choice of starting vertex.
///
/// For every vertex `v_i`, the map sending the primitive direction of the edge
/// `v_i → v_{i+1}` to `(1, 0)` is unique up to shears `(x, y) ↦ (x + k y, y)`; the
/// shear is fixed by putting the image of `v_i` in `0 ≤ x < |y|`. The normal form is
/// the lexicographically least vertex list, started at the image of `v_i`.
pub fn canonical_polygon_with_transform<T: Scalar>(p: &Polygon<T>) -> (Polygon<T>, [[T; 2]; 2]) {
    let n = p.vertices.len();
    let mut best: Option<(Vec<V2<T>>, [[T; 2]; 2])> = None;
    for i in 0..n {
        let v = p.vertices[i];
        let d = sub(p.vertices[(i + 1) % n], v);
        let g = d[0].gcd(&d[1]);
        let u = [d[0] / g, d[1] / g];
        let (_, s0, t0) = ext_gcd(u[0], u[1]);
        let g0 = [[s0, t0], [-u[1], u[0]]];
        let w = apply(&g0, v);
        let x = w[0].mod_floor(&w[1].abs());
        let k = (x - w[0]) / w[1];
        let shear = [[T::one(), k], [T::zero(), T::one()]];
        let g = mul2(&shear, &g0);
        let list: Vec<V2<T>> = (0..n).map(|j| apply(&g, p.vertices[(i + j) % n])).collect();
        if best.as_ref().map_or(true, |(b, _)| list < *b) {
            best = Some((list, g));
        }
    }
    let (vertices, g) = best.expect("polygon has vertices");
    (Polygon { vertices }, g)
}
