//! An independent check of the intersection form on `Ker ψ` through toric geometry.
//!
//! The ψ-images of a seed are rays of a complete fan, refined until smooth. The
//! surface `Ȳ` of that fan has boundary divisors `D_1, …, D_m`; blowing up one
//! boundary point per seed vector gives `Y` with exceptional curves `E_i`. A
//! kernel vector `a` maps to `ι(a) = π^*C_a − Σ a_i E_i`, where `C_a` is the class
//! on `Ȳ` meeting `D_ρ` in `Σ_{i on ρ} a_i` points. Its intersection numbers are
//! compared with `−χ_s̃`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{angle_cmp, det2, kernel_basis, kernel_gram, LatticeError, Seed, V2};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("ray {0:?} is zero or not primitive")]
    NotPrimitive(String),
    #[error("no class has these intersection numbers: Σ α_i u_i ≠ 0")]
    Inconsistent,
    #[error("fan is not smooth and complete: {0}")]
    InvalidFan(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A smooth complete fan, rays listed counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Fan<T> {
    pub rays: Vec<V2<T>>,
}

impl<T: Scalar> Fan<T> {
    /// Checks smoothness `det(u_i, u_{i+1}) = 1` around the whole circle.
    pub fn new(rays: Vec<V2<T>>) -> Result<Self, ToricError> {
        let m = rays.len();
        if m < 3 {
            return Err(ToricError::InvalidFan("fewer than three rays".into()));
        }
        for i in 0..m {
            if det2(rays[i], rays[(i + 1) % m]) != T::one() {
                return Err(ToricError::InvalidFan(format!("cone {} is not unimodular", i + 1)));
            }
        }
        // consecutive determinants of 1 could still wind more than once
        let turns = (0..m).filter(|&i| angle_cmp(rays[(i + 1) % m], rays[i]).is_lt()).count();
        if turns != 1 {
            return Err(ToricError::InvalidFan("rays wind more than once".into()));
        }
        Ok(Fan { rays })
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Index of the ray equal to `u`.
    pub fn position(&self, u: V2<T>) -> Option<usize> {
        self.rays.iter().position(|&r| r == u)
    }
}

fn check_primitive<T: Scalar>(v: V2<T>) -> Result<(), ToricError> {
    if v[0].gcd(&v[1]) != T::one() {
        return Err(ToricError::NotPrimitive(format!("{v:?}")));
    }
    Ok(())
}

/// The counterclockwise angle from `u` to `v` is at least `π`.
fn wide_gap<T: Scalar>(u: V2<T>, v: V2<T>) -> bool {
    let d = det2(u, v);
    d < T::zero() || (d.is_zero() && u[0] * v[0] + u[1] * v[1] <= T::zero())
}

/// Completes and smooths a set of rays.
///
/// While some gap between consecutive rays is at least `π`, the negatives of the
/// two rays bounding it are added; a gap between opposite rays gets the
/// perpendicular ray. Then each cone of determinant `d > 1` is refined by the
/// Hirzebruch–Jung rule: insert `w = (a u + u′)/d` with `0 < a < d` chosen to make
/// `w` integral, so that `det(u, w) = 1`, and continue with the cone `(w, u′)`.
pub fn complete_fan<T: Scalar>(vectors: &[V2<T>]) -> Result<Fan<T>, ToricError> {
    for &v in vectors {
        check_primitive(v)?;
    }
    let mut rays: Vec<V2<T>> = Vec::new();
    let add = |rays: &mut Vec<V2<T>>, v: V2<T>| {
        if !rays.contains(&v) {
            rays.push(v);
            rays.sort_by(|a, b| angle_cmp(*a, *b));
        }
    };
    for &v in vectors {
        add(&mut rays, v);
    }
    if rays.is_empty() {
        add(&mut rays, [T::one(), T::zero()]);
    }
    loop {
        let m = rays.len();
        let gap = (0..m).find(|&i| m == 1 || wide_gap(rays[i], rays[(i + 1) % m]));
        let Some(i) = gap else { break };
        let (u, v) = (rays[i], rays[(i + 1) % m]);
        let (nu, nv) = ([-u[0], -u[1]], [-v[0], -v[1]]);
        if !rays.contains(&nu) || !rays.contains(&nv) {
            add(&mut rays, nu);
            add(&mut rays, nv);
        } else {
            add(&mut rays, [-u[1], u[0]]);
        }
    }
    let m = rays.len();
    let mut out = Vec::new();
    for i in 0..m {
        let (mut u, v) = (rays[i], rays[(i + 1) % m]);
        out.push(u);
        loop {
            let d = det2(u, v);
            if d == T::one() {
                break;
            }
            let mut a = T::one();
            while !((a * u[0] + v[0]) % d).is_zero() || !((a * u[1] + v[1]) % d).is_zero() {
                a = a + T::one();
            }
            let w = [(a * u[0] + v[0]) / d, (a * u[1] + v[1]) / d];
            out.push(w);
            u = w;
        }
    }
    Fan::new(out)
}

/// The Néron–Severi lattice of the toric surface of a smooth complete fan.
///
/// A class is recorded through its intersection numbers `α_i = C · D_i`; these
/// satisfy `Σ α_i u_i = 0`, and the pairing is unimodular, so this is faithful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricNS<T> {
    pub fan: Fan<T>,
    /// `D_i · D_j`.
    pub intersection: Matrix<T>,
}

impl<T: Scalar> ToricNS<T> {
    pub fn new(fan: Fan<T>) -> Self {
        let m = fan.len();
        let mut g = Matrix::zeros(m, m);
        for i in 0..m {
            let prev = fan.rays[(i + m - 1) % m];
            let next = fan.rays[(i + 1) % m];
            // u_{i−1} + u_{i+1} = a_i u_i with a_i = det(u_{i−1}, u_{i+1})
            g[(i, i)] = -det2(prev, next);
            g[(i, (i + 1) % m)] = T::one();
            g[((i + 1) % m, i)] = T::one();
        }
        ToricNS { fan, intersection: g }
    }

    /// `rank NS(Ȳ) = m − 2`.
    pub fn rank(&self) -> usize {
        self.intersection.rank()
    }

    fn check_consistent(&self, alphas: &[T]) -> Result<(), ToricError> {
        if alphas.len() != self.fan.len() {
            return Err(ToricError::Inconsistent);
        }
        let mut sum = [T::zero(); 2];
        for (a, u) in alphas.iter().zip(&self.fan.rays) {
            sum[0] = sum[0] + *a * u[0];
            sum[1] = sum[1] + *a * u[1];
        }
        if sum != [T::zero(), T::zero()] {
            return Err(ToricError::Inconsistent);
        }
        Ok(())
    }

    /// A divisor `Σ x_i D_i` (rational coefficients) with the given intersection numbers.
    pub fn divisor_for(&self, alphas: &[T]) -> Result<Vec<Q<T>>, ToricError> {
        self.check_consistent(alphas)?;
        self.intersection.solve_rational(alphas).ok_or(ToricError::Inconsistent)
    }

    /// `C · C′` for classes given by intersection numbers, through the intersection matrix.
    pub fn pairing(&self, alpha: &[T], beta: &[T]) -> Result<T, ToricError> {
        self.check_consistent(beta)?;
        let x = self.divisor_for(alpha)?;
        let v = x.iter().zip(beta).fold(Q::zero(), |acc, (xi, &b)| acc + *xi * Q::from_integer(b));
        if !v.is_integer() {
            return Err(ToricError::Inconsistent);
        }
        Ok(v.to_integer())
    }
}

/// `C · C = Σ_{i<j} α_i α_j det(u_i, u_j)` for the class with `C · D_i = α_i`.
pub fn toric_self_intersection<T: Scalar>(ns: &ToricNS<T>, alphas: &[T]) -> Result<T, ToricError> {
    ns.check_consistent(alphas)?;
    let u = &ns.fan.rays;
    let mut total = T::zero();
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            total = total + alphas[i] * alphas[j] * det2(u[i], u[j]);
        }
    }
    Ok(total)
}

/// The blow-up `Y → Ȳ` in one boundary point per seed vector.
#[derive(Debug, Clone)]
pub struct BlownNS<T> {
    pub toric: ToricNS<T>,
    /// `assignment[i]` is the ray (0-based) carrying `ψ(e_{i+1})`.
    pub assignment: Vec<usize>,
}

/// A class `π^*C − Σ e_i E_i` on `Y`, with `C` given by its intersection numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BlownClass<T> {
    pub toric: Vec<T>,
    pub exceptional: Vec<T>,
}

impl<T: Scalar> BlownNS<T> {
    pub fn for_seed(s: &Seed<T>) -> Result<Self, ToricError> {
        let images = s.psi_images();
        let fan = complete_fan(&images)?;
        let assignment = images.iter().map(|&u| fan.position(u).expect("input rays are kept")).collect();
        Ok(BlownNS { toric: ToricNS::new(fan), assignment })
    }

    /// `(π^*C − Σ e_i E_i) · (π^*C′ − Σ e′_i E_i) = C · C′ − Σ e_i e′_i`.
    pub fn dot(&self, a: &BlownClass<T>, b: &BlownClass<T>) -> Result<T, ToricError> {
        let toric = self.toric.pairing(&a.toric, &b.toric)?;
        let e = a.exceptional.iter().zip(&b.exceptional).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
        Ok(toric - e)
    }

    /// Intersection with the strict transform `π^*D̄_ρ − Σ_{i on ρ} E_i`.
    pub fn dot_boundary(&self, a: &BlownClass<T>, rho: usize) -> T {
        let on_ray = self
            .assignment
            .iter()
            .zip(&a.exceptional)
            .filter(|(&r, _)| r == rho)
            .fold(T::zero(), |acc, (_, &e)| acc + e);
        a.toric[rho] - on_ray
    }

    /// `ι(a) = π^*C_a − Σ a_i E_i` for `a` in seed coordinates.
    pub fn iota(&self, a: &[T]) -> Result<BlownClass<T>, ToricError> {
        let mut alphas = vec![T::zero(); self.toric.fan.len()];
        for (&r, &x) in self.assignment.iter().zip(a) {
            alphas[r] = alphas[r] + x;
        }
        self.toric.check_consistent(&alphas)?;
        Ok(BlownClass { toric: alphas, exceptional: a.to_vec() })
    }

    /// `ι^{-1}(α) = Σ (α · E_i) e_i`.
    pub fn iota_inverse(&self, a: &BlownClass<T>) -> Vec<T> {
        a.exceptional.clone()
    }

    /// Rank of `Λ = {α : α · D_ρ = 0 for every boundary component}`.
    pub fn lambda_rank(&self) -> usize {
        let m = self.toric.fan.len();
        let n = self.assignment.len();
        let mut rows = Vec::new();
        for c in 0..2 {
            let mut row = vec![T::zero(); m + n];
            for (i, u) in self.toric.fan.rays.iter().enumerate() {
                row[i] = u[c];
            }
            rows.push(row);
        }
        for rho in 0..m {
            let mut row = vec![T::zero(); m + n];
            row[rho] = T::one();
            for (i, &r) in self.assignment.iter().enumerate() {
                if r == rho {
                    row[m + i] = -T::one();
                }
            }
            rows.push(row);
        }
        m + n - Matrix::from_rows(rows).expect("rectangular").rank()
    }
}

/// One comparison `ι(k_p) · ι(k_q)` against the intersection form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Comparison<T> {
    pub pair: (usize, usize),
    pub lhs: T,
    pub rhs: T,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OracleReport<T> {
    pub fan: Fan<T>,
    pub comparisons: Vec<Comparison<T>>,
    pub passed: bool,
}

impl<T: Scalar> OracleReport<T> {
    pub fn failures(&self) -> impl Iterator<Item = &Comparison<T>> {
        self.comparisons.iter().filter(|c| !c.ok)
    }
}

/// Compares `ι(k_p) · ι(k_q)` with `(k_p, k_q)_S` on a kernel basis.
pub fn oracle_check<T: Scalar>(s: &Seed<T>) -> Result<OracleReport<T>, ToricError> {
    let kb = kernel_basis(s.ambient());
    oracle_check_against(s, &kernel_gram(s, &kb))
}

/// Like [`oracle_check`], with the right-hand sides read from a supplied Gram matrix
/// on the standard kernel basis.
pub fn oracle_check_against<T: Scalar>(s: &Seed<T>, gram: &Matrix<T>) -> Result<OracleReport<T>, ToricError> {
    let blown = BlownNS::for_seed(s)?;
    let kb = kernel_basis(s.ambient());
    let classes: Vec<BlownClass<T>> =
        kb.vectors.iter().map(|k| blown.iota(&s.coordinates(k))).collect::<Result<_, _>>()?;
    let mut comparisons = Vec::new();
    for p in 0..classes.len() {
        for q in 0..classes.len() {
            let lhs = blown.dot(&classes[p], &classes[q])?;
            let rhs = gram[(p, q)];
            comparisons.push(Comparison { pair: (p + 1, q + 1), lhs, rhs, ok: lhs == rhs });
        }
    }
    let passed = comparisons.iter().all(|c| c.ok);
    Ok(OracleReport { fan: blown.toric.fan, comparisons, passed })
}
