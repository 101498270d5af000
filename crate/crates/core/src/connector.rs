//! Search for a sequence of elementary operations relating two very strong
//! collections on the same surface.
//!
//! The stages run in order:
//!
//! 1. tilt until the T-polygons agree up to `SL(2, Z)`;
//! 2. rotate until the dual ψ-vectors agree up to one `f ∈ SL(2, Z)`, index by index;
//! 3. twist by a line bundle, which removes `f`;
//! 4. read off the residual isometry `g ∈ O(Z)` and split it as `T_D ∘ w`;
//! 5. realize `w ∈ W(Z)` by tilts, rotations and reorderings;
//! 6. twist by `D`.
//!
//! The trace is replayed before it is returned, and must reproduce the target exactly.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::delpezzo::{
    orthogonal_decompose, validate_orthogonal, weyl_word, DelPezzoError, KClass, OrthogonalElement, Surface, WeylElement,
    DEFAULT_WEYL_LIMIT,
};
use crate::helix::{
    can_reorder, check_very_strong, find_good_thread, is_good, is_good_minus, replay, rotate_thread, seed_of_unchecked,
    tilt_minus, tilt_plus, Collection, HelixError, Step, Trace,
};
use crate::lattice::{apply2, canonical_polygon_with_transform, det2, inv_sl2, kernel_basis, kernel_gram, mul2, t_polygon, Polygon};
use crate::matrix::Matrix;
use crate::scalar::{s, Scalar};

/// Search bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Maximal number of tilts in the polygon search.
    pub depth: usize,
    /// Maximal number of collections visited by any one search.
    pub max_states: usize,
    /// Maximal length of the conjugating paths used to expose roots.
    pub weyl_depth: usize,
    /// Maximal size of an explicit Weyl group.
    pub weyl_limit: usize,
    /// Collections with a larger class entry are not expanded by the polygon search.
    pub max_entry: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { depth: 8, max_states: 200_000, weyl_depth: 4, weyl_limit: DEFAULT_WEYL_LIMIT, max_entry: 1 << 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectError {
    #[error("invalid input: {0}")]
    Invalid(#[from] HelixError),
    #[error("collections live on different surfaces: {invariant} differs ({left} vs {right})")]
    SurfaceMismatch { invariant: String, left: String, right: String },
    #[error("search exhausted in stage {stage}: {detail}")]
    SearchExhausted { stage: String, detail: String },
    #[error("precondition of stage {stage} fails: {detail}")]
    Precondition { stage: String, detail: String },
    #[error("internal error in stage {stage}: {detail}")]
    Internal { stage: String, detail: String },
}

impl From<DelPezzoError> for ConnectError {
    fn from(e: DelPezzoError) -> Self {
        ConnectError::Invalid(e.into())
    }
}

fn internal(stage: &str, detail: impl Into<String>) -> ConnectError {
    ConnectError::Internal { stage: stage.into(), detail: detail.into() }
}

/// One line of the per-stage log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub stage: String,
    pub steps: usize,
    pub detail: String,
}

/// A verified trace together with its stage log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Connection<T> {
    pub trace: Trace<T>,
    pub log: Vec<StageLog>,
}

/// Invariants of `(Ker ψ, intersection form)` that tell surfaces apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeInvariants {
    pub rank: usize,
    pub radical_rank: usize,
    pub discriminant: i128,
}

/// Rank of `K(Z)`, rank of the radical of the form on `Ker ψ`, and the
/// discriminant of `K_Z^⊥`.
pub fn lattice_invariants<T: Scalar>(c: &Collection<T>) -> Result<LatticeInvariants, ConnectError> {
    let seed = seed_of_unchecked(c).map_err(HelixError::from)?;
    let gram = kernel_gram(&seed, &kernel_basis(seed.ambient()));
    let radical_rank = gram.rows() - gram.rank();
    let s = &c.surface;
    let g = s.intersection_matrix::<T>();
    let k_perp = Matrix::from_rows(vec![g.mul_vec(&s.canonical())]).expect("one row").integer_kernel();
    let mut d = Matrix::<T>::zeros(k_perp.len(), k_perp.len());
    for (i, a) in k_perp.iter().enumerate() {
        for (j, b) in k_perp.iter().enumerate() {
            d[(i, j)] = g.bilinear(a, b);
        }
    }
    let discriminant = d.det().to_i128().expect("fits in i128");
    Ok(LatticeInvariants { rank: c.n(), radical_rank, discriminant })
}

fn check_same_surface<T: Scalar>(a: &Collection<T>, b: &Collection<T>) -> Result<(), ConnectError> {
    if a.surface == b.surface {
        return Ok(());
    }
    let ia = lattice_invariants(a)?;
    let ib = lattice_invariants(b)?;
    let (invariant, left, right) = if ia.rank != ib.rank {
        ("rank of K(Z)", ia.rank.to_string(), ib.rank.to_string())
    } else if ia.radical_rank != ib.radical_rank {
        ("radical rank", ia.radical_rank.to_string(), ib.radical_rank.to_string())
    } else if ia.discriminant != ib.discriminant {
        ("discriminant of K_Z^⊥", ia.discriminant.to_string(), ib.discriminant.to_string())
    } else {
        ("surface", a.surface.to_string(), b.surface.to_string())
    };
    Err(ConnectError::SurfaceMismatch { invariant: invariant.into(), left, right })
}

fn polygon_of<T: Scalar>(c: &Collection<T>) -> Result<Polygon<T>, ConnectError> {
    let seed = seed_of_unchecked(c).map_err(|e| internal("polygons", e.to_string()))?;
    t_polygon(&seed).map_err(|e| internal("polygons", e.to_string()))
}

/// Result of the polygon stage: tilting `a` along `source` and `b` along `target`
/// gives collections whose T-polygons differ by `g ∈ SL(2, Z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonAlignment<T> {
    pub source: Trace<T>,
    pub target: Trace<T>,
    pub g: [[T; 2]; 2],
}

struct Side<T> {
    seen: HashMap<Polygon<T>, (Trace<T>, [[T; 2]; 2])>,
    frontier: Vec<(Collection<T>, Trace<T>)>,
    depth: usize,
}

impl<T: Scalar> Side<T> {
    fn new(c: &Collection<T>) -> Result<Self, ConnectError> {
        let (canon, h) = canonical_polygon_with_transform(&polygon_of(c)?);
        Ok(Side { seen: HashMap::from([(canon, (Trace::default(), h))]), frontier: vec![(c.clone(), Trace::default())], depth: 0 })
    }
}

fn small_enough<T: Scalar>(c: &Collection<T>, bound: T) -> bool {
    c.objects.iter().all(|e| e.to_vec().iter().all(|x| x.abs() <= bound))
}

/// One tilt (after the rotation making it good) from `x`, in every possible way.
/// With `reversible`, only tilts that a right tilt undoes are kept.
fn tilt_moves<T: Scalar>(x: &Collection<T>, reversible: bool) -> Vec<(Trace<T>, Collection<T>)> {
    let mut out = Vec::new();
    for j in 1..=x.n() {
        let Ok((r, k, p)) = find_good_thread(x, j) else { continue };
        let Ok(y) = tilt_plus(&r, p) else { continue };
        if reversible && !is_good_minus(&y, p) {
            continue;
        }
        let mut t = Trace::default();
        if k != 0 {
            t.push(Step::Rotate { k });
        }
        t.push(Step::TiltPlus { j: p });
        out.push((t, y));
    }
    out
}

/// Inverse of a trace made of rotations and tilts.
pub fn invert_trace<T: Scalar>(t: &Trace<T>) -> Trace<T> {
    Trace::new(t.steps.iter().rev().map(inverse_step).collect())
}

/// Bidirectional breadth-first search over tilts for a pair of collections,
/// one reached from `a` and one from `b`, whose T-polygons are
/// `SL(2, Z)`-equivalent.
///
/// Each side deduplicates by canonical polygon, since the polygon fixes the
/// ψ-images of the seed. The side with the smaller frontier grows by one layer
/// at a time; the two depths add up to at most `limits.depth`. Tilts on the `b`
/// side are kept only when a right tilt undoes them, so that the path can be
/// run backwards. Collections with an entry above `limits.max_entry` are not
/// expanded: on surfaces with few blowups the classes grow doubly exponentially
/// along a tilt path.
pub fn align_polygons<T: Scalar>(
    a: &Collection<T>,
    b: &Collection<T>,
    limits: &Limits,
) -> Result<PolygonAlignment<T>, ConnectError> {
    let bound: T = s(limits.max_entry);
    let mut sides = [Side::new(a)?, Side::new(b)?];
    let meet = |sides: &[Side<T>; 2], canon: &Polygon<T>| -> Option<PolygonAlignment<T>> {
        let (ta, ha) = sides[0].seen.get(canon)?;
        let (tb, hb) = sides[1].seen.get(canon)?;
        Some(PolygonAlignment { source: ta.clone(), target: tb.clone(), g: mul2(&inv_sl2(ha), hb) })
    };
    let start = sides[0].seen.keys().next().expect("one polygon").clone();
    if let Some(found) = meet(&sides, &start) {
        return Ok(found);
    }
    let mut pruned = 0usize;
    while sides[0].depth + sides[1].depth < limits.depth {
        let live: Vec<usize> = (0..2).filter(|&i| !sides[i].frontier.is_empty()).collect();
        let Some(&i) = live.iter().min_by_key(|&&i| sides[i].frontier.len()) else { break };
        let frontier = std::mem::take(&mut sides[i].frontier);
        sides[i].depth += 1;
        let mut next = Vec::new();
        for (x, trace) in &frontier {
            for (t, y) in tilt_moves(x, i == 1) {
                if !small_enough(&y, bound) {
                    pruned += 1;
                    continue;
                }
                let (canon, h) = canonical_polygon_with_transform(&polygon_of(&y)?);
                if sides[i].seen.contains_key(&canon) {
                    continue;
                }
                let mut path = trace.clone();
                path.extend(&t);
                sides[i].seen.insert(canon.clone(), (path.clone(), h));
                if let Some(found) = meet(&sides, &canon) {
                    return Ok(found);
                }
                if sides[0].seen.len() + sides[1].seen.len() > limits.max_states {
                    return Err(ConnectError::SearchExhausted {
                        stage: "polygons".into(),
                        detail: format!("state limit {} reached", limits.max_states),
                    });
                }
                next.push((y, path));
            }
        }
        sides[i].frontier = next;
    }
    Err(ConnectError::SearchExhausted {
        stage: "polygons".into(),
        detail: format!(
            "no common polygon within {} tilts ({} from the source, {} from the target, {} polygons seen, {} collections over the entry bound {})",
            limits.depth,
            sides[0].depth,
            sides[1].depth,
            sides[0].seen.len() + sides[1].seen.len(),
            pruned,
            limits.max_entry
        ),
    })
}

/// The unique `f ∈ SL(2, Z)` with `f(v_i) = w_i` for all `i`, if one exists.
fn solve_sl2<T: Scalar>(v: &[[T; 2]], w: &[[T; 2]]) -> Option<[[T; 2]; 2]> {
    let i = 0;
    let j = (1..v.len()).find(|&j| !det2(v[i], v[j]).is_zero())?;
    let d = det2(v[i], v[j]);
    // f = W V^{-1}, V = [v_i v_j] as columns
    let vinv = [[v[j][1], -v[j][0]], [-v[i][1], v[i][0]]];
    let wm = [[w[i][0], w[j][0]], [w[i][1], w[j][1]]];
    let num = mul2(&wm, &vinv);
    if num.iter().flatten().any(|&x| !(x % d).is_zero()) {
        return None;
    }
    let f = [[num[0][0] / d, num[0][1] / d], [num[1][0] / d, num[1][1] / d]];
    if f[0][0] * f[1][1] - f[0][1] * f[1][0] != T::one() {
        return None;
    }
    v.iter().zip(w).all(|(&x, &y)| apply2(&f, x) == y).then_some(f)
}

/// Rotates `a` until its dual ψ-vectors are `f` applied to those of `b`, index by index.
pub fn align_vectors<T: Scalar>(
    a: &Collection<T>,
    b: &Collection<T>,
) -> Result<(Trace<T>, [[T; 2]; 2]), ConnectError> {
    let psi_b = b.dual_psi();
    for r in 0..a.n() as i64 {
        let x = rotate_thread(a, -r);
        if let Some(f) = solve_sl2(&psi_b, &x.dual_psi()) {
            let t = if r == 0 { Trace::default() } else { Trace::new(vec![Step::Rotate { k: -r }]) };
            return Ok((t, f));
        }
    }
    Err(ConnectError::Precondition {
        stage: "vectors".into(),
        detail: "dual ψ-vectors do not agree up to SL(2, Z) and rotation".into(),
    })
}

/// Twists `a` by a line bundle so that its dual ψ-vectors equal those of `b`.
///
/// The duals must satisfy `ψ(F_i(a)) = f ψ(F_i(b))` for a shear `f: (r, d) ↦ (r, d − k r)`;
/// the twist has degree `k`, a multiple of the divisibility `ℓ` of `K_Z`.
pub fn align_twist<T: Scalar>(a: &Collection<T>, b: &Collection<T>) -> Result<Trace<T>, ConnectError> {
    let f = solve_sl2(&b.dual_psi(), &a.dual_psi()).ok_or_else(|| ConnectError::Precondition {
        stage: "twist".into(),
        detail: "dual ψ-vectors are not related indexwise by SL(2, Z)".into(),
    })?;
    if f[0] != [T::one(), T::zero()] || f[1][1] != T::one() {
        return Err(internal("twist", format!("{f:?} is not a shear fixing the rank")));
    }
    let k = -f[1][0];
    let s = &a.surface;
    let l = s.divisibility::<T>();
    if !(k % l).is_zero() {
        return Err(internal("twist", format!("degree {k} is not divisible by {l}")));
    }
    // prefer the twist matching a rank-one object, which often leaves nothing for Pic⁰
    let d = a
        .objects
        .iter()
        .zip(&b.objects)
        .find(|(x, y)| x.r == T::one() && y.r == T::one())
        .map(|(x, y)| y.c1.iter().zip(&x.c1).map(|(&p, &q)| p - q).collect::<Vec<T>>())
        .filter(|d| KClass::from_ns(d.clone()).degree(s) == k)
        .unwrap_or_else(|| s.degree_generator::<T>().iter().map(|&g| g * (k / l)).collect());
    if d.iter().all(|x| x.is_zero()) {
        return Ok(Trace::default());
    }
    Ok(Trace::new(vec![Step::Tensor { c1: d }]))
}

/// The isometry `g = B_b B_a^{-1}` with `g(E_i(a)) = E_i(b)`, validated in `O(Z)`.
pub fn orthogonal_residual<T: Scalar>(a: &Collection<T>, b: &Collection<T>) -> Result<OrthogonalElement<T>, ConnectError> {
    let ba = a.class_matrix();
    let inv = ba.inverse_unimodular().ok_or_else(|| internal("residual", "classes do not form a basis"))?;
    let g = b.class_matrix().mul(&inv);
    validate_orthogonal(&a.surface, &g).map_err(|e| internal("residual", e.to_string()))?;
    Ok(OrthogonalElement { matrix: g })
}

fn inverse_step<T: Scalar>(step: &Step<T>) -> Step<T> {
    match step {
        Step::Rotate { k } => Step::Rotate { k: -k },
        Step::TiltPlus { j } => Step::TiltMinus { j: *j },
        Step::TiltMinus { j } => Step::TiltPlus { j: *j },
        other => other.clone(),
    }
}

fn conjugate<T: Scalar>(path: &[Step<T>], middle: Step<T>) -> Trace<T> {
    let mut steps = path.to_vec();
    steps.push(middle);
    steps.extend(path.iter().rev().map(inverse_step));
    Trace::new(steps)
}

/// Moves whose inverse is again a legal move, so that paths can be undone.
fn reversible_moves<T: Scalar>(x: &Collection<T>) -> Vec<(Step<T>, Collection<T>)> {
    let mut out = vec![(Step::Rotate { k: 1 }, rotate_thread(x, 1)), (Step::Rotate { k: -1 }, rotate_thread(x, -1))];
    for j in 2..=x.n() {
        if let Ok(y) = tilt_plus(x, j) {
            if is_good_minus(&y, j) {
                out.push((Step::TiltPlus { j }, y));
            }
        }
        if let Ok(y) = tilt_minus(x, j) {
            if is_good(&y, j) {
                out.push((Step::TiltMinus { j }, y));
            }
        }
    }
    out
}

/// A reflection realized on a fixed collection `c`: replaying `trace` on `c`
/// gives `matrix · c` classwise.
#[derive(Debug, Clone)]
struct Generator<T> {
    trace: Trace<T>,
    matrix: Matrix<T>,
    weyl_part: Matrix<T>,
}

/// Realizes `w ∈ W(Z)` on `c`: replaying the returned trace on `c` yields the
/// classes `w(E_i)`, index by index.
///
/// A root becomes visible on a collection reached by a path of rotations and
/// tilts when two mutually orthogonal objects sit in one block; reordering them
/// and undoing the path reflects `c` in a root. Since every operation commutes
/// with Euler isometries preserving `ψ`, running the realizations of `r_1, …, r_k`
/// in turn applies `r_1 ⋯ r_k`. The search looks for a word in the images of these
/// reflections in `W(Z) = O(Z)/Pic⁰(Z)`, and a final twist absorbs the `Pic⁰` part.
pub fn realize_weyl<T: Scalar>(c: &Collection<T>, w: &WeylElement<T>, limits: &Limits) -> Result<Trace<T>, ConnectError> {
    let w = &w.matrix;
    let s = c.surface;
    let id = Matrix::identity(s.n());
    if *w == id {
        return Ok(Trace::default());
    }
    if weyl_word(&s, w).is_none() {
        return Err(internal("weyl", "element is not in W(Z)"));
    }
    let base = c.class_matrix();
    let base_inv = base.inverse_unimodular().ok_or_else(|| internal("weyl", "classes do not form a basis"))?;
    let mut gens: Vec<Generator<T>> = Vec::new();
    let mut gen_seen: HashSet<Matrix<T>> = HashSet::new();
    let mut visited: HashSet<Collection<T>> = HashSet::from([c.clone()]);
    let mut frontier: Vec<(Collection<T>, Vec<Step<T>>)> = vec![(c.clone(), Vec::new())];
    for depth in 0..=limits.weyl_depth {
        for (x, path) in &frontier {
            for i in 1..x.n() {
                for j in i + 1..=x.n() {
                    if !can_reorder(x, i, j) || x.objects[i - 1] == x.objects[j - 1] {
                        continue;
                    }
                    let trace = conjugate(path, Step::Reorder { i, j });
                    let Ok(y) = replay(c, &trace) else { continue };
                    let matrix = y.class_matrix().mul(&base_inv);
                    if !gen_seen.insert(matrix.clone()) {
                        continue;
                    }
                    let Ok((wp, _)) = orthogonal_decompose(&s, &OrthogonalElement { matrix: matrix.clone() }) else {
                        continue;
                    };
                    gens.push(Generator { trace, matrix, weyl_part: wp.matrix });
                }
            }
        }
        if let Some(word) = word_in_generators(&gens, w, &id, limits.weyl_limit) {
            return assemble(c, &s, &gens, &word, w, &base_inv);
        }
        if depth == limits.weyl_depth {
            break;
        }
        let mut next = Vec::new();
        for (x, path) in &frontier {
            for (step, y) in reversible_moves(x) {
                if visited.len() > limits.max_states {
                    return Err(ConnectError::SearchExhausted {
                        stage: "weyl".into(),
                        detail: format!("state limit {} reached", limits.max_states),
                    });
                }
                if visited.insert(y.clone()) {
                    let mut p = path.clone();
                    p.push(step);
                    next.push((y, p));
                }
            }
        }
        frontier = next;
    }
    Err(ConnectError::SearchExhausted {
        stage: "weyl".into(),
        detail: format!(
            "{} reflections exposed within path length {}, not enough to reach the target",
            gens.len(),
            limits.weyl_depth
        ),
    })
}

/// Breadth-first search in the group generated by the Weyl parts, multiplying on the right.
fn word_in_generators<T: Scalar>(gens: &[Generator<T>], target: &Matrix<T>, id: &Matrix<T>, limit: usize) -> Option<Vec<usize>> {
    let mut parent: HashMap<Matrix<T>, (Matrix<T>, usize)> = HashMap::new();
    let mut seen: HashSet<Matrix<T>> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id.clone()]);
    while let Some(x) = queue.pop_front() {
        if x == *target {
            let mut word = Vec::new();
            let mut cur = x;
            while let Some((prev, g)) = parent.get(&cur) {
                word.push(*g);
                cur = prev.clone();
            }
            word.reverse();
            return Some(word);
        }
        for (gi, g) in gens.iter().enumerate() {
            let y = x.mul(&g.weyl_part);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                parent.insert(y.clone(), (x.clone(), gi));
                queue.push_back(y);
            }
        }
    }
    None
}

fn assemble<T: Scalar>(
    c: &Collection<T>,
    s: &Surface,
    gens: &[Generator<T>],
    word: &[usize],
    w: &Matrix<T>,
    base_inv: &Matrix<T>,
) -> Result<Trace<T>, ConnectError> {
    let mut trace = Trace::default();
    let mut u = Matrix::identity(s.n());
    for &g in word {
        trace.extend(&gens[g].trace);
        u = u.mul(&gens[g].matrix);
    }
    let y = replay(c, &trace).map_err(|e| internal("weyl", e.to_string()))?;
    if y.class_matrix().mul(base_inv) != u {
        return Err(internal("weyl", "realized reflections do not compose as expected"));
    }
    // w u^{-1} is a pure twist T_D
    let correction = w.mul(&u.inverse_unimodular().expect("isometry"));
    let (wp, d) = orthogonal_decompose(s, &OrthogonalElement { matrix: correction })?;
    if wp.matrix != Matrix::identity(s.n()) {
        return Err(internal("weyl", "correction is not a twist"));
    }
    if d.iter().any(|x| !x.is_zero()) {
        trace.push(Step::Tensor { c1: d });
    }
    Ok(trace.simplify())
}

struct Run<T> {
    x: Collection<T>,
    trace: Trace<T>,
    log: Vec<StageLog>,
}

impl<T: Scalar> Run<T> {
    fn stage(&mut self, name: &str, t: Trace<T>, detail: String) -> Result<(), ConnectError> {
        self.x = replay(&self.x, &t).map_err(|e| internal(name, e.to_string()))?;
        self.log.push(StageLog { stage: name.into(), steps: t.len(), detail });
        self.trace.extend(&t);
        Ok(())
    }
}

/// Runs the whole pipeline. The returned trace has been replayed on `a` and gives `b`.
pub fn connect<T: Scalar>(a: &Collection<T>, b: &Collection<T>, limits: &Limits) -> Result<Connection<T>, ConnectError> {
    a.validate()?;
    b.validate()?;
    check_same_surface(a, b)?;
    let cert_a = check_very_strong(a)?;
    let cert_b = check_very_strong(b)?;
    let s = a.surface;
    let target = if cert_b.shifted { b.shift() } else { b.clone() };
    let mut run = Run { x: a.clone(), trace: Trace::default(), log: Vec::new() };

    if cert_a.shifted {
        run.stage("shift", Trace::new(vec![Step::Shift { k: 1 }]), "source has negative ranks".into())?;
    }
    let aligned = align_polygons(&run.x, &target, limits)?;
    run.stage("polygons", aligned.source, format!("g = {:?}", aligned.g))?;
    let back = invert_trace(&aligned.target);
    let target_end = target.clone();
    let target = replay(&target, &aligned.target).map_err(|e| internal("polygons", e.to_string()))?;
    if replay(&target, &back).ok().as_ref() != Some(&target_end) {
        return Err(internal("polygons", "target path cannot be undone"));
    }
    run.log.push(StageLog {
        stage: "target-path".into(),
        steps: back.len(),
        detail: "tilts from the target, undone at the end".into(),
    });
    let (t, f) = align_vectors(&run.x, &target)?;
    run.stage("vectors", t, format!("f = {f:?}"))?;
    let t = align_twist(&run.x, &target)?;
    run.stage("twist", t, format!("shear {:?}", f[1][0]))?;
    if run.x.dual_psi() != target.dual_psi() {
        return Err(internal("twist", "dual ψ-vectors still differ"));
    }
    let g = orthogonal_residual(&run.x, &target)?;
    let (w, d) = orthogonal_decompose(&s, &g)?;
    let word_len = w.word.as_ref().map_or(0, Vec::len);
    run.log.push(StageLog { stage: "residual".into(), steps: 0, detail: format!("Weyl word length {word_len}, D = {d:?}") });
    let t = realize_weyl(&run.x, &w, limits)?;
    run.stage("weyl", t, format!("{word_len} simple reflections"))?;
    let g = orthogonal_residual(&run.x, &target)?;
    let (w, d) = orthogonal_decompose(&s, &g)?;
    if w.matrix != Matrix::identity(s.n()) {
        return Err(internal("pic0", "residual Weyl part is not trivial"));
    }
    let t = if d.iter().all(|v| v.is_zero()) { Trace::default() } else { Trace::new(vec![Step::Tensor { c1: d.clone() }]) };
    run.stage("pic0", t, format!("D = {d:?}"))?;
    run.stage("undo", back, "target path run backwards".into())?;
    if cert_b.shifted {
        run.stage("shift", Trace::new(vec![Step::Shift { k: 1 }]), "target has negative ranks".into())?;
    }
    let Run { trace, mut log, .. } = run;
    let trace = trace.simplify();
    let end = replay(a, &trace).map_err(|e| internal("verify", e.to_string()))?;
    if end != *b {
        return Err(internal("verify", "replay does not reproduce the target"));
    }
    log.push(StageLog { stage: "verify".into(), steps: trace.len(), detail: "replay reproduces the target exactly".into() });
    Ok(Connection { trace, log })
}

/// The shear `(r, d) ↦ (r, d + k r)`.
pub fn shear<T: Scalar>(k: i64) -> [[T; 2]; 2] {
    [[T::one(), T::zero()], [s(k), T::one()]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::delpezzo::{reflection_matrix, tensor};
    use crate::helix::{reorder, tilt_plus};

    fn bs() -> Collection<i64> {
        corpus::get("p1xp1-bs").unwrap()
    }

    fn twist(c: &Collection<i64>, d: &[i64]) -> Collection<i64> {
        Step::Tensor { c1: d.to_vec() }.apply(c).unwrap()
    }

    #[test]
    fn identical_inputs() {
        let c = bs();
        let r = connect(&c, &c, &Limits::default()).unwrap();
        assert!(r.trace.is_empty());
        let p = align_polygons(&c, &c, &Limits::default()).unwrap();
        assert!(p.source.is_empty() && p.target.is_empty());
        assert_eq!(p.g, [[1, 0], [0, 1]]);
        let (t, f) = align_vectors(&c, &c).unwrap();
        assert!(t.is_empty());
        assert_eq!(f, [[1, 0], [0, 1]]);
        assert!(align_twist(&c, &c).unwrap().is_empty());
        assert_eq!(orthogonal_residual(&c, &c).unwrap().matrix, Matrix::identity(4));
        assert!(realize_weyl(&c, &WeylElement { matrix: Matrix::identity(4), word: None }, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn pure_twist() {
        let c = bs();
        let b = twist(&c, &[1, 1]);
        let r = connect(&c, &b, &Limits::default()).unwrap();
        assert_eq!(r.trace, Trace::new(vec![Step::Tensor { c1: vec![1, 1] }]));
        let (_, f) = align_vectors(&c, &b).unwrap();
        assert_eq!(f, shear::<i64>(-4));
    }

    #[test]
    fn one_tilt_polygon() {
        let c = bs();
        let b = tilt_plus(&c, 2).unwrap();
        let p = align_polygons(&c, &b, &Limits::default()).unwrap();
        assert_eq!(p.source.len() + p.target.len(), 1);
        let x = replay(&c, &p.source).unwrap();
        let y = replay(&b, &p.target).unwrap();
        assert_eq!(replay(&y, &invert_trace(&p.target)).unwrap(), b);
        let pa = canonical_polygon_with_transform(&polygon_of(&x).unwrap()).0;
        let pb = canonical_polygon_with_transform(&polygon_of(&y).unwrap()).0;
        assert_eq!(pa, pb);
    }

    #[test]
    fn rotation_alignment() {
        let c = bs();
        let b = rotate_thread(&c, 1);
        let (t, f) = align_vectors(&c, &b).unwrap();
        let y = replay(&c, &t).unwrap();
        let apply = |v: [i64; 2]| [f[0][0] * v[0] + f[0][1] * v[1], f[1][0] * v[0] + f[1][1] * v[1]];
        assert_eq!(y.dual_psi(), b.dual_psi().into_iter().map(apply).collect::<Vec<_>>());
        let b = reorder(&c, 2, 3).unwrap();
        let (t, f) = align_vectors(&c, &b).unwrap();
        assert!(t.is_empty());
        assert_eq!(f, [[1, 0], [0, 1]]);
    }

    #[test]
    fn reflection_realized_by_reorder() {
        let c = bs();
        let s = Surface::P1xP1;
        let beta = KClass::from_ns(vec![1, -1]);
        let sb = reflection_matrix(&s, &beta).unwrap();
        let t = realize_weyl(&c, &WeylElement { matrix: sb.clone(), word: None }, &Limits::default()).unwrap();
        assert_eq!(t, Trace::new(vec![Step::Reorder { i: 2, j: 3 }]));
        let b = Collection::new(s, c.objects.iter().map(|e| KClass::from_vec(&sb.mul_vec(&e.to_vec()))).collect()).unwrap();
        assert_eq!(orthogonal_residual(&c, &b).unwrap().matrix, sb);
    }

    #[test]
    fn regression_fixture() {
        let c = bs();
        let b = twist(&tilt_plus(&reorder(&c, 2, 3).unwrap(), 2).unwrap(), &[1, 0]);
        let r = connect(&c, &b, &Limits::default()).unwrap();
        assert_eq!(replay(&c, &r.trace).unwrap(), b);
        let alt = corpus::get("p1xp1-alt").unwrap();
        let p = align_polygons(&c, &alt, &Limits { depth: 6, ..Limits::default() }).unwrap();
        assert!(p.source.len() + p.target.len() <= 12);
        let r = connect(&c, &alt, &Limits::default()).unwrap();
        assert_eq!(replay(&c, &r.trace).unwrap(), alt);
    }

    #[test]
    fn shifted_target() {
        let c = bs();
        let b = tilt_plus(&c, 2).unwrap().shift();
        let r = connect(&c, &b, &Limits::default()).unwrap();
        assert_eq!(replay(&c, &r.trace).unwrap(), b);
        assert_eq!(r.trace.steps.last(), Some(&Step::Shift { k: 1 }));
    }

    #[test]
    fn rejects_other_surface() {
        let p2 = corpus::get::<i64>("p2-beilinson").unwrap();
        match connect(&p2, &bs(), &Limits::default()) {
            Err(ConnectError::SurfaceMismatch { invariant, .. }) => assert_eq!(invariant, "rank of K(Z)"),
            other => panic!("unexpected {other:?}"),
        }
        let dp1 = corpus::get::<i64>("dp1-lines").unwrap();
        match connect(&dp1, &bs(), &Limits::default()) {
            Err(ConnectError::SurfaceMismatch { invariant, left, right }) => {
                assert_eq!(invariant, "discriminant of K_Z^⊥");
                assert_eq!((left.as_str(), right.as_str()), ("-8", "-2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn twist_helper_matches_tensor() {
        let c = bs();
        let t = twist(&c, &[2, -1]);
        for (x, y) in c.objects.iter().zip(&t.objects) {
            assert_eq!(&tensor(&c.surface, x, &[2, -1]).unwrap(), y);
        }
    }
}
