//! Exceptional collections on del Pezzo surfaces, at the level of classes in `K(Z)`.
//!
//! A [`Collection`] is an ordered list of classes `E_1, …, E_n`. Its dual classes
//! `F_j = L_{E_1} ⋯ L_{E_{j−1}} E_j` form the seed `s(E)` of `N = K(Z)` with
//! `ψ = (rank, degree)`. Tilts, rotations and reorderings act on collections, and a
//! [`Trace`] records a sequence of them for replay.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delpezzo::{euler_chi, tensor, DelPezzoError, KClass, Surface};
use crate::lattice::{det2, CyclicSeed, LatticeError, Seed, Ambient};
use crate::matrix::Matrix;
use crate::scalar::{Scalar, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HelixError {
    #[error(transparent)]
    DelPezzo(#[from] DelPezzoError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("a full collection on {surface} has {expected} objects, got {got}")]
    Length { surface: Surface, expected: usize, got: usize },
    #[error("not exceptional: χ(E_{i}, E_{j}) = {value}")]
    NotExceptional { i: usize, j: usize, value: String },
    #[error("(r, d) of E_{0} is not a primitive vector")]
    NotPrimitive(usize),
    #[error("not a shift of a bundle collection: ranks must be all positive or all negative")]
    NotBundleShift,
    #[error("slope chain fails at position {0}")]
    SlopeChain(usize),
    #[error("index {index} out of range 1..={n}")]
    Index { index: usize, n: usize },
    #[error("collection is not good for E_{0}")]
    NotGood(usize),
    #[error("tilt at position 1 is degenerate")]
    DegenerateTilt,
    #[error("objects {0}..={1} are not mutually orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("step {index} ({step}) failed: {reason}")]
    Replay { index: usize, step: String, reason: Box<HelixError> },
}

/// An ordered list of classes on a surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Collection<T> {
    pub surface: Surface,
    pub objects: Vec<KClass<T>>,
}

/// Exact slopes witnessing `μ_1 ≤ … ≤ μ_n ≤ μ_1 + K_Z²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VeryStrongCertificate<T> {
    pub slopes: Vec<Q<T>>,
    /// The input had all ranks negative and was read as its shift by one.
    pub shifted: bool,
}

impl<T: Scalar> PartialEq for VeryStrongCertificate<T> {
    fn eq(&self, other: &Self) -> bool {
        self.slopes == other.slopes && self.shifted == other.shifted
    }
}

impl<T: Scalar> Eq for VeryStrongCertificate<T> {}

impl<T: Scalar> Collection<T> {
    /// Validates class-level exceptionality and primitivity of every `(r, d)`.
    pub fn new(surface: Surface, objects: Vec<KClass<T>>) -> Result<Self, HelixError> {
        let c = Collection { surface, objects };
        c.validate()?;
        Ok(c)
    }

    pub(crate) fn new_unchecked(surface: Surface, objects: Vec<KClass<T>>) -> Self {
        Collection { surface, objects }
    }

    pub fn validate(&self) -> Result<(), HelixError> {
        let s = &self.surface;
        s.validate()?;
        if self.objects.len() != s.n() {
            return Err(HelixError::Length { surface: *s, expected: s.n(), got: self.objects.len() });
        }
        for (i, e) in self.objects.iter().enumerate() {
            if e.c1.len() != s.rho() {
                return Err(DelPezzoError::Dimension { expected: s.rho(), got: e.c1.len() }.into());
            }
            let [r, d] = e.psi(s);
            if r.gcd(&d) != T::one() {
                return Err(HelixError::NotPrimitive(i + 1));
            }
        }
        for i in 0..self.n() {
            for j in 0..=i {
                let v = euler_chi(s, &self.objects[i], &self.objects[j]);
                let expected = if i == j { T::one() } else { T::zero() };
                if v != expected {
                    return Err(HelixError::NotExceptional { i: i + 1, j: j + 1, value: v.to_string() });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn object(&self, j: usize) -> &KClass<T> {
        &self.objects[j - 1]
    }

    fn check_index(&self, j: usize) -> Result<usize, HelixError> {
        if j == 0 || j > self.n() {
            Err(HelixError::Index { index: j, n: self.n() })
        } else {
            Ok(j - 1)
        }
    }

    /// Multiplies every class by `−1`.
    pub fn shift(&self) -> Self {
        Collection { surface: self.surface, objects: self.objects.iter().map(KClass::neg).collect() }
    }

    /// The classes as columns of an `n × n` matrix.
    pub fn class_matrix(&self) -> Matrix<T> {
        Matrix::from_cols(&self.objects.iter().map(KClass::to_vec).collect::<Vec<_>>()).expect("square")
    }

    /// `ψ`-images of the dual classes in index order.
    pub fn dual_psi(&self) -> Vec<[T; 2]> {
        dual_collection(self).iter().map(|f| f.psi(&self.surface)).collect()
    }
}

impl<T: Scalar> fmt::Display for Collection<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (", self.surface)?;
        for (i, e) in self.objects.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[{}; {:?}; {}]", e.r, e.c1, e.m)?;
        }
        write!(f, ")")
    }
}

/// Checks that the collection is, up to a global shift, a collection of bundles
/// with `μ_1 ≤ … ≤ μ_n ≤ μ_1 + K_Z²`.
pub fn check_very_strong<T: Scalar>(c: &Collection<T>) -> Result<VeryStrongCertificate<T>, HelixError> {
    c.validate()?;
    let (c, shifted) = normalize_shift(c)?;
    let s = &c.surface;
    let slopes: Vec<Q<T>> = c.objects.iter().map(|e| Q::new(e.degree(s), e.r)).collect();
    for i in 1..slopes.len() {
        if slopes[i] < slopes[i - 1] {
            return Err(HelixError::SlopeChain(i + 1));
        }
    }
    if slopes[slopes.len() - 1] > slopes[0] + Q::from_integer(s.degree()) {
        return Err(HelixError::SlopeChain(slopes.len()));
    }
    Ok(VeryStrongCertificate { slopes, shifted })
}

/// Negates a collection whose ranks are all negative; rejects mixed or zero ranks.
pub fn normalize_shift<T: Scalar>(c: &Collection<T>) -> Result<(Collection<T>, bool), HelixError> {
    if c.objects.iter().all(|e| e.r > T::zero()) {
        Ok((c.clone(), false))
    } else if c.objects.iter().all(|e| e.r < T::zero()) {
        Ok((c.shift(), true))
    } else {
        Err(HelixError::NotBundleShift)
    }
}

/// `[L_F A] = [A] − χ(F, A)[F]`.
pub fn left_mutate_class<T: Scalar>(s: &Surface, f: &KClass<T>, a: &KClass<T>) -> KClass<T> {
    a.sub(&f.scale(euler_chi(s, f, a)))
}

/// `[R_F A] = [A] − χ(A, F)[F]`.
pub fn right_mutate_class<T: Scalar>(s: &Surface, f: &KClass<T>, a: &KClass<T>) -> KClass<T> {
    a.sub(&f.scale(euler_chi(s, a, f)))
}

/// The dual classes `F_1, …, F_n` in index order, with `F_j = L_{E_1} ⋯ L_{E_{j−1}} E_j`.
/// Read backwards, `(F_n, …, F_1)` is the dual collection.
pub fn dual_collection<T: Scalar>(c: &Collection<T>) -> Vec<KClass<T>> {
    let s = &c.surface;
    (0..c.n())
        .map(|j| {
            let mut x = c.objects[j].clone();
            for i in (0..j).rev() {
                x = left_mutate_class(s, &c.objects[i], &x);
            }
            x
        })
        .collect()
}

/// The seed `s(E) = {[F_i]}` of `K(Z)`, stored in index order.
pub fn seed_of<T: Scalar>(c: &Collection<T>) -> Result<Seed<T>, HelixError> {
    check_very_strong(c)?;
    Ok(seed_of_unchecked(c)?)
}

pub(crate) fn seed_of_unchecked<T: Scalar>(c: &Collection<T>) -> Result<Seed<T>, LatticeError> {
    let ambient = Ambient::new(c.surface.psi_matrix())?;
    let cols: Vec<Vec<T>> = dual_collection(c).iter().map(KClass::to_vec).collect();
    Seed::new(ambient, Matrix::from_cols(&cols).expect("square"))
}

/// The seed with the index order as its cyclic ordering.
pub fn cyclic_seed_of<T: Scalar>(c: &Collection<T>) -> Result<CyclicSeed<T>, HelixError> {
    Ok(CyclicSeed::in_storage_order(seed_of(c)?)?)
}

/// Rotation of the thread along the helix: `+1` gives `(E_2, …, E_n, E_1 ⊗ ω^{-1})`,
/// `−1` gives `(E_n ⊗ ω, E_1, …, E_{n−1})`.
pub fn rotate_thread<T: Scalar>(c: &Collection<T>, k: i64) -> Collection<T> {
    let s = &c.surface;
    let kz = s.canonical::<T>();
    let minus_k: Vec<T> = kz.iter().map(|&x| -x).collect();
    let mut objects = c.objects.clone();
    for _ in 0..k.unsigned_abs() {
        if k > 0 {
            let first = objects.remove(0);
            objects.push(tensor(s, &first, &minus_k).expect("dimensions match"));
        } else {
            let last = objects.pop().expect("nonempty");
            objects.insert(0, tensor(s, &last, &kz).expect("dimensions match"));
        }
    }
    Collection::new_unchecked(*s, objects)
}

fn brackets<T: Scalar>(c: &Collection<T>) -> Vec<[T; 2]> {
    c.dual_psi()
}

/// Goodness for `E_j`: `⟨F_k, F_j⟩ ≤ 0` for `k > j` and `≥ 0` for `k < j`.
pub fn is_good<T: Scalar>(c: &Collection<T>, j: usize) -> bool {
    let Ok(jj) = c.check_index(j) else { return false };
    good_pattern(&brackets(c), jj)
}

fn good_pattern<T: Scalar>(psi: &[[T; 2]], jj: usize) -> bool {
    psi.iter().enumerate().all(|(k, &f)| {
        let b = det2(f, psi[jj]);
        match k.cmp(&jj) {
            std::cmp::Ordering::Greater => b <= T::zero(),
            std::cmp::Ordering::Less => b >= T::zero(),
            std::cmp::Ordering::Equal => true,
        }
    })
}

/// The sign pattern under which the right tilt of `E_1` to position `j` matches the
/// seed mutation `μ_1^−`: `⟨F_i, F_1⟩ ≤ 0` for `1 < i ≤ j` and `≥ 0` for `i > j`.
pub fn is_good_minus<T: Scalar>(c: &Collection<T>, j: usize) -> bool {
    let Ok(jj) = c.check_index(j) else { return false };
    let psi = brackets(c);
    psi.iter().enumerate().skip(1).all(|(i, &f)| {
        let b = det2(f, psi[0]);
        if i <= jj {
            b <= T::zero()
        } else {
            b >= T::zero()
        }
    })
}

/// Rotates the thread so that the object now at index `j` becomes good at a
/// position `p > 1`. Offsets are tried in the order `0, −1, 1, −2, 2, …`.
///
/// Returns the rotated collection, the rotation offset `k` and the new index
/// `p = j − k` of the tracked object.
pub fn find_good_thread<T: Scalar>(c: &Collection<T>, j: usize) -> Result<(Collection<T>, i64, usize), HelixError> {
    c.check_index(j)?;
    let n = c.n() as i64;
    let j = j as i64;
    let mut offsets = vec![0i64];
    for t in 1..n {
        offsets.push(-t);
        offsets.push(t);
    }
    for k in offsets {
        let p = j - k;
        if p < 2 || p > n {
            continue;
        }
        let r = rotate_thread(c, k);
        if is_good(&r, p as usize) {
            return Ok((r, k, p as usize));
        }
    }
    Err(HelixError::NotGood(j as usize))
}

/// Like [`find_good_thread`] for the right tilt: rotates so that the object now at
/// index `j` sits first and some `p > 1` satisfies [`is_good_minus`].
pub fn find_good_minus_thread<T: Scalar>(c: &Collection<T>, j: usize) -> Result<(Collection<T>, i64, usize), HelixError> {
    c.check_index(j)?;
    let k = j as i64 - 1;
    let r = rotate_thread(c, k);
    (2..=r.n())
        .find(|&p| is_good_minus(&r, p))
        .map(|p| (r, k, p))
        .ok_or(HelixError::NotGood(j))
}

/// The left tilt of `E_j` to the front: `(L_{E_1} ⋯ L_{E_{j−1}} E_j [−1], E_1, …)`,
/// whose first class is `−[F_j]`.
pub fn tilt_plus<T: Scalar>(c: &Collection<T>, j: usize) -> Result<Collection<T>, HelixError> {
    let jj = c.check_index(j)?;
    if jj == 0 {
        return Err(HelixError::DegenerateTilt);
    }
    if !is_good(c, j) {
        return Err(HelixError::NotGood(j));
    }
    let s = &c.surface;
    let mut x = c.objects[jj].clone();
    for i in (0..jj).rev() {
        x = left_mutate_class(s, &c.objects[i], &x);
    }
    let mut objects = Vec::with_capacity(c.n());
    objects.push(x.neg());
    objects.extend(c.objects.iter().enumerate().filter(|&(i, _)| i != jj).map(|(_, e)| e.clone()));
    Ok(Collection::new_unchecked(*s, objects))
}

/// The right tilt of `E_1` to position `j`: `(E_2, …, E_j, R_{E_j} ⋯ R_{E_2} E_1 [1], E_{j+1}, …)`.
pub fn tilt_minus<T: Scalar>(c: &Collection<T>, j: usize) -> Result<Collection<T>, HelixError> {
    let jj = c.check_index(j)?;
    if jj == 0 {
        return Err(HelixError::DegenerateTilt);
    }
    if !is_good_minus(c, j) {
        return Err(HelixError::NotGood(j));
    }
    let s = &c.surface;
    let mut x = c.objects[0].clone();
    for i in 1..=jj {
        x = right_mutate_class(s, &c.objects[i], &x);
    }
    let mut objects: Vec<KClass<T>> = c.objects[1..=jj].to_vec();
    objects.push(x.neg());
    objects.extend(c.objects[jj + 1..].iter().cloned());
    Ok(Collection::new_unchecked(*s, objects))
}

/// Whether the objects at positions `i..=j` (either order) are mutually orthogonal,
/// which at the level of classes means equal `ψ` up to a positive multiple.
pub fn can_reorder<T: Scalar>(c: &Collection<T>, i: usize, j: usize) -> bool {
    if c.check_index(i).is_err() || c.check_index(j).is_err() || i == j {
        return false;
    }
    let (lo, hi) = (i.min(j) - 1, i.max(j) - 1);
    let s = &c.surface;
    (lo..=hi).all(|a| {
        (lo..=hi).all(|b| a == b || euler_chi(s, &c.objects[a], &c.objects[b]).is_zero())
    })
}

/// Swaps two objects of a mutually orthogonal block.
pub fn reorder<T: Scalar>(c: &Collection<T>, i: usize, j: usize) -> Result<Collection<T>, HelixError> {
    c.check_index(i)?;
    c.check_index(j)?;
    if !can_reorder(c, i, j) {
        return Err(HelixError::NotOrthogonal(i.min(j), i.max(j)));
    }
    let mut objects = c.objects.clone();
    objects.swap(i - 1, j - 1);
    Ok(Collection::new_unchecked(c.surface, objects))
}

/// One elementary operation on collections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", bound = "T: Scalar")]
pub enum Step<T> {
    #[serde(rename = "rotate")]
    Rotate { k: i64 },
    #[serde(rename = "shift")]
    Shift { k: i64 },
    #[serde(rename = "reorder")]
    Reorder { i: usize, j: usize },
    #[serde(rename = "tensor")]
    Tensor { c1: Vec<T> },
    #[serde(rename = "tilt+")]
    TiltPlus { j: usize },
    #[serde(rename = "tilt-")]
    TiltMinus { j: usize },
}

impl<T: Scalar> fmt::Display for Step<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Rotate { k } => write!(f, "rotate {k}"),
            Step::Shift { k } => write!(f, "shift {k}"),
            Step::Reorder { i, j } => write!(f, "reorder {i} {j}"),
            Step::Tensor { c1 } => write!(f, "tensor {c1:?}"),
            Step::TiltPlus { j } => write!(f, "tilt+ {j}"),
            Step::TiltMinus { j } => write!(f, "tilt- {j}"),
        }
    }
}

impl<T: Scalar> Step<T> {
    pub fn apply(&self, c: &Collection<T>) -> Result<Collection<T>, HelixError> {
        match self {
            Step::Rotate { k } => Ok(rotate_thread(c, *k)),
            Step::Shift { k } => Ok(if k.rem_euclid(2) == 1 { c.shift() } else { c.clone() }),
            Step::Reorder { i, j } => reorder(c, *i, *j),
            Step::Tensor { c1 } => {
                let objects = c
                    .objects
                    .iter()
                    .map(|e| tensor(&c.surface, e, c1))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Collection::new_unchecked(c.surface, objects))
            }
            Step::TiltPlus { j } => tilt_plus(c, *j),
            Step::TiltMinus { j } => tilt_minus(c, *j),
        }
    }
}

/// A replayable sequence of steps, serialized as a plain array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct Trace<T> {
    pub steps: Vec<Step<T>>,
}

impl<T> Default for Trace<T> {
    fn default() -> Self {
        Trace { steps: Vec::new() }
    }
}

impl<T: Scalar> fmt::Display for Trace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "(empty)");
        }
        let parts: Vec<String> = self.steps.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl<T: Scalar> Trace<T> {
    pub fn new(steps: Vec<Step<T>>) -> Self {
        Trace { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: Step<T>) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: &Trace<T>) {
        self.steps.extend(other.steps.iter().cloned());
    }

    /// Merges adjacent rotations, shifts and tensors and drops trivial steps.
    pub fn simplify(&self) -> Self {
        let mut out: Vec<Step<T>> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let merged = match (out.last_mut(), step) {
                (Some(Step::Rotate { k }), Step::Rotate { k: k2 }) => {
                    *k += k2;
                    true
                }
                (Some(Step::Shift { k }), Step::Shift { k: k2 }) => {
                    *k += k2;
                    true
                }
                (Some(Step::Tensor { c1 }), Step::Tensor { c1: d }) => {
                    c1.iter_mut().zip(d).for_each(|(a, &b)| *a = *a + b);
                    true
                }
                _ => false,
            };
            if !merged {
                out.push(step.clone());
            }
            let trivial = match out.last() {
                Some(Step::Rotate { k }) => *k == 0,
                Some(Step::Shift { k }) => *k % 2 == 0,
                Some(Step::Tensor { c1 }) => c1.iter().all(|x| x.is_zero()),
                _ => false,
            };
            if trivial {
                out.pop();
            }
        }
        Trace { steps: out }
    }
}

/// Applies the steps in order, reporting the first failure with its index.
pub fn replay<T: Scalar>(c: &Collection<T>, t: &Trace<T>) -> Result<Collection<T>, HelixError> {
    let mut cur = c.clone();
    for (index, step) in t.steps.iter().enumerate() {
        cur = step.apply(&cur).map_err(|e| HelixError::Replay {
            index,
            step: step.to_string(),
            reason: Box::new(e),
        })?;
    }
    Ok(cur)
}

/// All steps applicable to `c`, for random walks.
pub fn applicable_steps<T: Scalar>(c: &Collection<T>, tensor_range: i64) -> Vec<Step<T>> {
    let n = c.n();
    let mut steps: Vec<Step<T>> = vec![Step::Rotate { k: 1 }, Step::Rotate { k: -1 }];
    for j in 2..=n {
        if is_good(c, j) {
            steps.push(Step::TiltPlus { j });
        }
        if is_good_minus(c, j) {
            steps.push(Step::TiltMinus { j });
        }
    }
    for i in 1..n {
        for j in i + 1..=n {
            if can_reorder(c, i, j) {
                steps.push(Step::Reorder { i, j });
            }
        }
    }
    if tensor_range > 0 {
        steps.push(Step::Tensor { c1: vec![T::zero(); c.surface.rho()] });
    }
    steps
}

/// A random walk of `len` applicable steps from `c`. Tensor steps draw each
/// coordinate uniformly from `[−tensor_range, tensor_range]`.
pub fn random_trace<T: Scalar, R: Rng + ?Sized>(
    c: &Collection<T>,
    len: usize,
    tensor_range: i64,
    rng: &mut R,
) -> (Trace<T>, Collection<T>) {
    let mut cur = c.clone();
    let mut trace = Trace::default();
    for _ in 0..len {
        let steps = applicable_steps(&cur, tensor_range);
        let mut step = steps.choose(rng).expect("rotations always apply").clone();
        if let Step::Tensor { c1 } = &mut step {
            for x in c1.iter_mut() {
                *x = crate::scalar::s(rng.gen_range(-tensor_range..=tensor_range));
            }
        }
        cur = step.apply(&cur).expect("step was applicable");
        trace.push(step);
    }
    (trace, cur)
}
