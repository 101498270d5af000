//! The Grothendieck lattice `K(Z) = Z[O] ⊕ NS(Z) ⊕ Zδ` of a del Pezzo surface.
//!
//! A class is stored as `(r, c1, m)` with `m = χ − r`. The Euler form comes from
//! Riemann–Roch, and the reflection and twist actions are plain integer matrices
//! acting on the coordinate vector `(r, c1_1, …, c1_ρ, m)`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::{gcd_all, s as sc, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DelPezzoError {
    #[error("blow-up of the plane in {0} points is not del Pezzo (at most 8)")]
    InvalidSurface(u8),
    #[error("expected a class with {expected} Néron–Severi coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("not a root: {0}")]
    NotRoot(String),
    #[error("twist is not integral")]
    NotIntegral,
    #[error("not an element of O(Z): {0}")]
    NotOrthogonal(String),
    #[error("group order exceeds the limit {0}")]
    GroupTooLarge(usize),
}

/// A del Pezzo surface, as an abstract lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Surface {
    /// The plane blown up in `m` points; `m = 0` is the plane itself.
    #[serde(rename = "dP")]
    BlowupP2 { m: u8 },
    #[serde(rename = "P1xP1")]
    P1xP1,
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surface::BlowupP2 { m: 0 } => write!(f, "P2"),
            Surface::BlowupP2 { m } => write!(f, "dP{m}"),
            Surface::P1xP1 => write!(f, "P1xP1"),
        }
    }
}

impl Surface {
    pub fn blowup(m: u8) -> Result<Self, DelPezzoError> {
        let s = Surface::BlowupP2 { m };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), DelPezzoError> {
        match *self {
            Surface::BlowupP2 { m } if m > 8 => Err(DelPezzoError::InvalidSurface(m)),
            _ => Ok(()),
        }
    }

    /// Rank of the Néron–Severi lattice.
    pub fn rho(&self) -> usize {
        match *self {
            Surface::BlowupP2 { m } => 1 + m as usize,
            Surface::P1xP1 => 2,
        }
    }

    /// Rank of `K(Z)`, which is also the length of a full exceptional collection.
    pub fn n(&self) -> usize {
        self.rho() + 2
    }

    /// The intersection matrix on the standard basis `(H, E_1, …)` or `(f_1, f_2)`.
    pub fn intersection_matrix<T: Scalar>(&self) -> Matrix<T> {
        match *self {
            Surface::BlowupP2 { .. } => {
                let mut g = Matrix::identity(self.rho());
                for i in 1..self.rho() {
                    g[(i, i)] = -T::one();
                }
                g
            }
            Surface::P1xP1 => Matrix::from_rows(vec![vec![T::zero(), T::one()], vec![T::one(), T::zero()]])
                .expect("square"),
        }
    }

    /// The canonical class `K_Z`.
    pub fn canonical<T: Scalar>(&self) -> Vec<T> {
        match *self {
            Surface::BlowupP2 { .. } => {
                let mut k = vec![T::one(); self.rho()];
                k[0] = sc(-3);
                k
            }
            Surface::P1xP1 => vec![sc(-2), sc(-2)],
        }
    }

    /// The intersection product on `NS(Z)`.
    pub fn dot<T: Scalar>(&self, a: &[T], b: &[T]) -> T {
        self.intersection_matrix().bilinear(a, b)
    }

    /// `K_Z²`.
    pub fn degree<T: Scalar>(&self) -> T {
        let k = self.canonical();
        self.dot(&k, &k)
    }

    /// The divisibility `ℓ` of `K_Z` in `NS(Z)`: the positive generator of `{D · K_Z}`.
    pub fn divisibility<T: Scalar>(&self) -> T {
        let k = self.canonical::<T>();
        gcd_all(&self.intersection_matrix().mul_vec(&k))
    }

    /// An NS class `L` with `L · (−K_Z) = ℓ`.
    pub fn degree_generator<T: Scalar>(&self) -> Vec<T> {
        match *self {
            Surface::BlowupP2 { m: 0 } => vec![T::one()],
            Surface::BlowupP2 { m } => {
                // E_1 has degree 1
                let mut v = vec![T::zero(); 1 + m as usize];
                v[1] = T::one();
                v
            }
            Surface::P1xP1 => vec![T::one(), T::zero()],
        }
    }

    /// The Euler form as a Gram matrix on `(r, c1, m)` coordinates: `χ(x, y) = xᵀ M y`.
    pub fn euler_matrix<T: Scalar>(&self) -> Matrix<T> {
        let n = self.n();
        let rho = self.rho();
        let g = self.intersection_matrix::<T>();
        let gk = g.mul_vec(&self.canonical());
        let mut m = Matrix::zeros(n, n);
        m[(0, 0)] = T::one();
        m[(0, n - 1)] = T::one();
        m[(n - 1, 0)] = T::one();
        for i in 0..rho {
            m[(1 + i, 0)] = gk[i];
            for j in 0..rho {
                m[(1 + i, 1 + j)] = -g[(i, j)];
            }
        }
        m
    }

    /// The map `ψ = (r, d)` as a `2 × n` matrix.
    pub fn psi_matrix<T: Scalar>(&self) -> Matrix<T> {
        let n = self.n();
        let g = self.intersection_matrix::<T>();
        let gk = g.mul_vec(&self.canonical());
        let mut p = Matrix::zeros(2, n);
        p[(0, 0)] = T::one();
        for i in 0..self.rho() {
            p[(1, 1 + i)] = -gk[i];
        }
        p
    }

    fn check_ns<T>(&self, v: &[T]) -> Result<(), DelPezzoError> {
        if v.len() != self.rho() {
            return Err(DelPezzoError::Dimension { expected: self.rho(), got: v.len() });
        }
        Ok(())
    }
}

/// A class in `K(Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KClass<T> {
    pub r: T,
    pub c1: Vec<T>,
    pub m: T,
}

impl<T: Scalar> KClass<T> {
    pub fn new(r: T, c1: Vec<T>, m: T) -> Self {
        KClass { r, c1, m }
    }

    /// `[O_Z]`.
    pub fn structure_sheaf(s: &Surface) -> Self {
        KClass { r: T::one(), c1: vec![T::zero(); s.rho()], m: T::zero() }
    }

    /// The class `δ` of a skyscraper sheaf.
    pub fn point(s: &Surface) -> Self {
        KClass { r: T::zero(), c1: vec![T::zero(); s.rho()], m: T::one() }
    }

    /// A rank-zero class `(0, C, 0)`.
    pub fn from_ns(c: Vec<T>) -> Self {
        KClass { r: T::zero(), c1: c, m: T::zero() }
    }

    /// The line bundle `O(D)`, with `m = (D² − D·K_Z)/2`.
    pub fn line_bundle(s: &Surface, d: &[T]) -> Result<Self, DelPezzoError> {
        tensor(s, &Self::structure_sheaf(s), d)
    }

    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.c1.len() + 2);
        v.push(self.r);
        v.extend_from_slice(&self.c1);
        v.push(self.m);
        v
    }

    pub fn from_vec(v: &[T]) -> Self {
        let n = v.len();
        KClass { r: v[0], c1: v[1..n - 1].to_vec(), m: v[n - 1] }
    }

    pub fn chi(&self) -> T {
        self.r + self.m
    }

    /// `d = c1 · (−K_Z)`.
    pub fn degree(&self, s: &Surface) -> T {
        -s.dot(&self.c1, &s.canonical())
    }

    /// `ψ = (r, d)`.
    pub fn psi(&self, s: &Surface) -> [T; 2] {
        [self.r, self.degree(s)]
    }

    pub fn neg(&self) -> Self {
        KClass { r: -self.r, c1: self.c1.iter().map(|&x| -x).collect(), m: -self.m }
    }

    pub fn add(&self, o: &Self) -> Self {
        KClass {
            r: self.r + o.r,
            c1: self.c1.iter().zip(&o.c1).map(|(&a, &b)| a + b).collect(),
            m: self.m + o.m,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: T) -> Self {
        KClass { r: k * self.r, c1: self.c1.iter().map(|&x| k * x).collect(), m: k * self.m }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.m.is_zero() && self.c1.iter().all(|x| x.is_zero())
    }
}

/// `χ(E, F) = r_E χ_F + r_F χ_E − r_E r_F − c1_E · c1_F − r_F d_E`.
pub fn euler_chi<T: Scalar>(s: &Surface, e: &KClass<T>, f: &KClass<T>) -> T {
    e.r * f.chi() + f.r * e.chi() - e.r * f.r - s.dot(&e.c1, &f.c1) - f.r * e.degree(s)
}

/// Twist by the line bundle `O(D)`: `r' = r`, `c1' = c1 + rD`, and
/// `m' = m + c1·D + r(D² − D·K_Z)/2`, which keeps Riemann–Roch consistent.
pub fn tensor<T: Scalar>(s: &Surface, e: &KClass<T>, d: &[T]) -> Result<KClass<T>, DelPezzoError> {
    s.check_ns(d)?;
    s.check_ns(&e.c1)?;
    let k = s.canonical();
    let two: T = s_two();
    let num = s.dot(d, d) - s.dot(d, &k);
    if !(num % two).is_zero() {
        return Err(DelPezzoError::NotIntegral);
    }
    Ok(KClass {
        r: e.r,
        c1: e.c1.iter().zip(d).map(|(&c, &x)| c + e.r * x).collect(),
        m: e.m + s.dot(&e.c1, d) + e.r * (num / two),
    })
}

fn s_two<T: Scalar>() -> T {
    T::one() + T::one()
}

/// The matrix of `E ↦ E ⊗ O(D)` on `(r, c1, m)` coordinates.
pub fn tensor_matrix<T: Scalar>(s: &Surface, d: &[T]) -> Result<Matrix<T>, DelPezzoError> {
    let n = s.n();
    let cols: Result<Vec<Vec<T>>, _> = (0..n)
        .map(|j| {
            let mut v = vec![T::zero(); n];
            v[j] = T::one();
            tensor(s, &KClass::from_vec(&v), d).map(|c| c.to_vec())
        })
        .collect();
    Ok(Matrix::from_cols(&cols?).expect("square"))
}

/// All `α ∈ K_Z^⊥ ⊂ NS(Z)` with `α² = −2`, lifted to `(0, α, 0)`, sorted.
pub fn finite_roots<T: Scalar>(s: &Surface) -> Vec<KClass<T>> {
    let rho = s.rho();
    let bound = 3i64;
    let g = s.intersection_matrix::<T>();
    let k = s.canonical::<T>();
    let gk = g.mul_vec(&k);
    let mut out = Vec::new();
    let mut v = vec![T::zero(); rho];
    match s {
        Surface::P1xP1 => {
            for a in -bound..=bound {
                for b in -bound..=bound {
                    v[0] = sc(a);
                    v[1] = sc(b);
                    if g.bilinear(&v, &v) == sc(-2) && crate::scalar::dot(&v, &gk).is_zero() {
                        out.push(KClass::from_ns(v.clone()));
                    }
                }
            }
        }
        Surface::BlowupP2 { .. } => {
            // α = aH − Σ b_i E_i with Σ b_i = 3a and Σ b_i² = a² + 2
            for a in -bound..=bound {
                v[0] = sc(a);
                blowup_roots(&mut v, 1, 3 * a, a * a + 2, bound, &mut out);
            }
        }
    }
    out.sort();
    out
}

fn blowup_roots<T: Scalar>(v: &mut Vec<T>, i: usize, sum_left: i64, sq_left: i64, bound: i64, out: &mut Vec<KClass<T>>) {
    if i == v.len() {
        if sum_left == 0 && sq_left == 0 {
            out.push(KClass::from_ns(v.clone()));
        }
        return;
    }
    let remaining = (v.len() - i) as i64;
    // Cauchy–Schwarz: the remaining b's must satisfy (Σ b)² ≤ remaining · Σ b²
    if sum_left * sum_left > remaining * sq_left {
        return;
    }
    for b in -bound..=bound {
        if b * b > sq_left {
            continue;
        }
        v[i] = sc(-b);
        blowup_roots(v, i + 1, sum_left - b, sq_left - b * b, bound, out);
    }
    v[i] = T::zero();
}

/// `{α + kδ : α finite root, |k| ≤ bound}`.
pub fn affine_roots<T: Scalar>(s: &Surface, height_bound: u32) -> Vec<KClass<T>> {
    let mut out = Vec::new();
    for r in finite_roots::<T>(s) {
        let h = height_bound as i64;
        for k in -h..=h {
            let mut a = r.clone();
            a.m = sc(k);
            out.push(a);
        }
    }
    out.sort();
    out
}

fn check_root<T: Scalar>(s: &Surface, alpha: &KClass<T>) -> Result<(), DelPezzoError> {
    s.check_ns(&alpha.c1)?;
    if euler_chi(s, alpha, alpha) != s_two() {
        return Err(DelPezzoError::NotRoot("χ(α, α) ≠ 2".into()));
    }
    if alpha.psi(s) != [T::zero(), T::zero()] {
        return Err(DelPezzoError::NotRoot("ψ(α) ≠ 0".into()));
    }
    Ok(())
}

/// `s_α(β) = β − χ(β, α) α`.
pub fn reflect<T: Scalar>(s: &Surface, alpha: &KClass<T>, beta: &KClass<T>) -> Result<KClass<T>, DelPezzoError> {
    check_root(s, alpha)?;
    s.check_ns(&beta.c1)?;
    Ok(beta.sub(&alpha.scale(euler_chi(s, beta, alpha))))
}

/// The matrix of `s_α` on `(r, c1, m)` coordinates.
pub fn reflection_matrix<T: Scalar>(s: &Surface, alpha: &KClass<T>) -> Result<Matrix<T>, DelPezzoError> {
    check_root(s, alpha)?;
    let n = s.n();
    let cols: Vec<Vec<T>> = (0..n)
        .map(|j| {
            let mut v = vec![T::zero(); n];
            v[j] = T::one();
            let b = KClass::from_vec(&v);
            b.sub(&alpha.scale(euler_chi(s, &b, alpha))).to_vec()
        })
        .collect();
    Ok(Matrix::from_cols(&cols).expect("square"))
}

/// A generic linear functional that does not vanish on any root: the coordinate
/// weights are powers of 7, and root coordinates lie in `[−3, 3]`.
fn height<T: Scalar>(r: &KClass<T>) -> T {
    let seven: T = sc(7);
    let mut w = T::one();
    let mut h = T::zero();
    for &c in &r.c1 {
        h = h + c * w;
        w = w * seven;
    }
    h
}

/// Positive roots with respect to the fixed generic functional.
pub fn positive_roots<T: Scalar>(s: &Surface) -> Vec<KClass<T>> {
    finite_roots(s).into_iter().filter(|r| height(r) > T::zero()).collect()
}

/// Positive roots that are not a sum of two positive roots.
pub fn simple_roots<T: Scalar>(s: &Surface) -> Vec<KClass<T>> {
    let pos = positive_roots::<T>(s);
    let set: HashSet<&KClass<T>> = pos.iter().collect();
    pos.iter()
        .filter(|a| !pos.iter().any(|b| set.contains(&a.sub(b)) && b != *a))
        .cloned()
        .collect()
}

/// An element of the finite Weyl group, with a word in simple reflections when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WeylElement<T> {
    pub matrix: Matrix<T>,
    /// The element is `s_{word[0]} ∘ s_{word[1]} ∘ …`, as classes of the reflecting roots.
    pub word: Option<Vec<KClass<T>>>,
}

/// An Euler isometry of `K(Z)` preserving rank and degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OrthogonalElement<T> {
    pub matrix: Matrix<T>,
}

/// The finite Weyl group as an explicit list of matrices.
#[derive(Debug, Clone)]
pub struct WeylGroup<T> {
    pub simple_roots: Vec<KClass<T>>,
    pub elements: Vec<Matrix<T>>,
}

impl<T: Scalar> WeylGroup<T> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &Matrix<T>) -> bool {
        self.elements.contains(m)
    }
}

/// Default cap on the size of an explicit Weyl group closure. `W(E_6)` has order
/// 51840; `E_7` and `E_8` must be requested with a larger limit.
pub const DEFAULT_WEYL_LIMIT: usize = 60_000;

/// Breadth-first closure of the simple reflections, stopping with an error once
/// more than `limit` elements have been found.
pub fn weyl_closure<T: Scalar>(s: &Surface, limit: usize) -> Result<WeylGroup<T>, DelPezzoError> {
    let simple = simple_roots::<T>(s);
    let gens: Vec<Matrix<T>> =
        simple.iter().map(|a| reflection_matrix(s, a).expect("finite roots are roots")).collect();
    let id = Matrix::identity(s.n());
    let mut seen: HashSet<Matrix<T>> = HashSet::new();
    let mut elements = vec![id.clone()];
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = g.mul(&x);
            if seen.insert(y.clone()) {
                if elements.len() >= limit {
                    return Err(DelPezzoError::GroupTooLarge(limit));
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(WeylGroup { simple_roots: simple, elements })
}

/// Writes `w` as a product of simple reflections by descent.
///
/// While some simple root `α` has `w(α)` negative, replace `w` by `w s_α`. Each
/// step lowers the number of positive roots sent to negative ones, so this stops.
/// The element lies in `W(Z)` exactly when what remains is the identity.
pub fn weyl_word<T: Scalar>(s: &Surface, w: &Matrix<T>) -> Option<Vec<KClass<T>>> {
    let simple = simple_roots::<T>(s);
    let refl: Vec<Matrix<T>> = simple.iter().map(|a| reflection_matrix(s, a).expect("root")).collect();
    let bound = positive_roots::<T>(s).len();
    let mut cur = w.clone();
    let mut word = Vec::new();
    for _ in 0..=bound {
        let descent = simple.iter().position(|a| {
            let image = KClass::from_vec(&cur.mul_vec(&a.to_vec()));
            height(&image) < T::zero()
        });
        match descent {
            Some(i) => {
                cur = cur.mul(&refl[i]);
                word.push(simple[i].clone());
            }
            None => break,
        }
    }
    if cur != Matrix::identity(s.n()) {
        return None;
    }
    // w s_{i_1} … s_{i_k} = 1, hence w = s_{i_k} … s_{i_1}
    word.reverse();
    Some(word)
}

/// Composes the reflections of a word, left factor first.
pub fn word_matrix<T: Scalar>(s: &Surface, word: &[KClass<T>]) -> Result<Matrix<T>, DelPezzoError> {
    let mut m = Matrix::identity(s.n());
    for a in word {
        m = m.mul(&reflection_matrix(s, a)?);
    }
    Ok(m)
}

/// Description of the root lattice `R(Z) ⊂ K_Z^⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RootLatticeType<T> {
    /// Components joined by `+`, e.g. `A2+A1`; `A0` when there are no roots.
    pub label: String,
    pub components: Vec<String>,
    pub simple_roots: Vec<KClass<T>>,
    /// A generator of the orthogonal complement of `R(Z)` in `K_Z^⊥`, with its
    /// square, when that complement has rank one.
    pub orthogonal_generator: Option<(Vec<T>, T)>,
}

/// Classifies the Dynkin diagram of the simple roots into irreducible components.
pub fn root_lattice_type<T: Scalar>(s: &Surface) -> RootLatticeType<T> {
    let simple = simple_roots::<T>(s);
    let k = simple.len();
    let adj: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && !s.dot(&simple[i].c1, &simple[j].c1).is_zero()).collect())
        .collect();
    let mut seen = vec![false; k];
    let mut components = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < comp.len() {
            for &j in &adj[comp[i]] {
                if !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            i += 1;
        }
        components.push(classify_component(&comp, &adj));
    }
    components.sort_by(|a, b| dynkin_rank(b).cmp(&dynkin_rank(a)).then_with(|| a.cmp(b)));
    let label = if components.is_empty() { "A0".to_string() } else { components.join("+") };
    RootLatticeType { label, components, simple_roots: simple.clone(), orthogonal_generator: orthogonal_generator(s, &simple) }
}

fn dynkin_rank(label: &str) -> usize {
    label[1..].parse().unwrap_or(0)
}

fn classify_component(comp: &[usize], adj: &[Vec<usize>]) -> String {
    let k = comp.len();
    let branch = comp.iter().find(|&&v| adj[v].len() >= 3);
    let Some(&center) = branch else {
        return format!("A{k}");
    };
    // arm lengths from the trivalent vertex
    let mut arms: Vec<usize> = adj[center]
        .iter()
        .map(|&first| {
            let (mut prev, mut cur, mut len) = (center, first, 1);
            loop {
                let next: Vec<usize> = adj[cur].iter().copied().filter(|&x| x != prev).collect();
                if next.len() != 1 {
                    break len;
                }
                prev = cur;
                cur = next[0];
                len += 1;
            }
        })
        .collect();
    arms.sort_unstable();
    match arms.as_slice() {
        [1, 1, _] => format!("D{k}"),
        [1, 2, 2] => "E6".into(),
        [1, 2, 3] => "E7".into(),
        [1, 2, 4] => "E8".into(),
        _ => format!("?{k}"),
    }
}

fn orthogonal_generator<T: Scalar>(s: &Surface, simple: &[KClass<T>]) -> Option<(Vec<T>, T)> {
    let g = s.intersection_matrix::<T>();
    let mut rows = vec![g.mul_vec(&s.canonical())];
    rows.extend(simple.iter().map(|a| g.mul_vec(&a.c1)));
    let ker = Matrix::from_rows(rows).expect("rectangular").integer_kernel();
    if ker.len() != 1 {
        return None;
    }
    let v = ker[0].clone();
    let sq = g.bilinear(&v, &v);
    Some((v, sq))
}

/// Whether `f` preserves the Euler form and commutes with `ψ`.
pub fn validate_orthogonal<T: Scalar>(s: &Surface, f: &Matrix<T>) -> Result<(), DelPezzoError> {
    let n = s.n();
    if f.rows() != n || f.cols() != n {
        return Err(DelPezzoError::NotOrthogonal(format!("expected a {n}×{n} matrix")));
    }
    let e = s.euler_matrix::<T>();
    if f.transpose().mul(&e).mul(f) != e {
        return Err(DelPezzoError::NotOrthogonal("does not preserve the Euler form".into()));
    }
    let p = s.psi_matrix::<T>();
    if p.mul(f) != p {
        return Err(DelPezzoError::NotOrthogonal("does not preserve rank and degree".into()));
    }
    Ok(())
}

/// Splits `f ∈ O(Z)` as `f = T_D ∘ w` with `w ∈ W(Z)` and `D ∈ K_Z^⊥`.
///
/// `f([O])` has rank one and degree zero, so it is `[O(D)]` with `D · K_Z = 0`;
/// then `w = T_{−D} ∘ f` fixes `[O]`, and membership of `w` in `W(Z)` is decided
/// by simple-reflection descent.
pub fn orthogonal_decompose<T: Scalar>(
    s: &Surface,
    f: &OrthogonalElement<T>,
) -> Result<(WeylElement<T>, Vec<T>), DelPezzoError> {
    validate_orthogonal(s, &f.matrix)?;
    let o = KClass::<T>::structure_sheaf(s);
    let image = KClass::from_vec(&f.matrix.mul_vec(&o.to_vec()));
    let d = image.c1.clone();
    if KClass::line_bundle(s, &d)? != image {
        return Err(DelPezzoError::NotOrthogonal("image of [O] is not a line bundle class".into()));
    }
    let neg: Vec<T> = d.iter().map(|&x| -x).collect();
    let w = tensor_matrix(s, &neg)?.mul(&f.matrix);
    let word = weyl_word(s, &w).ok_or_else(|| DelPezzoError::NotOrthogonal("residual is not in W(Z)".into()))?;
    Ok((WeylElement { matrix: w, word: Some(word) }, d))
}

/// Recomposes `T_D ∘ w`.
pub fn orthogonal_compose<T: Scalar>(s: &Surface, w: &Matrix<T>, d: &[T]) -> Result<Matrix<T>, DelPezzoError> {
    Ok(tensor_matrix(s, d)?.mul(w))
}

/// Groups finite roots by their NS vector, for lookups.
pub fn root_index<T: Scalar>(s: &Surface) -> HashMap<Vec<T>, KClass<T>> {
    finite_roots::<T>(s).into_iter().map(|r| (r.c1.clone(), r)).collect()
}

pub fn is_positive_root<T: Scalar>(r: &KClass<T>) -> bool {
    height(r).is_positive()
}
