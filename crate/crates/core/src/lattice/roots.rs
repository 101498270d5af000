use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{check_index, LatticeError, Seed, Sign};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// A root `e_j − e_k` of some seed in the mutation class, with the mutation word
/// (applied left to right) and the index pair that exhibit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Root<T> {
    pub vector: Vec<T>,
    pub word: Vec<(usize, Sign)>,
    pub pair: (usize, usize),
}

/// Breadth-first search over mutations up to `depth`, collecting the differences
/// of basis vectors with equal ψ-images. The result is closed under negation and
/// sorted by vector; the first witness found in breadth-first order is kept.
pub fn find_roots<T: Scalar>(s: &Seed<T>, depth: usize) -> Vec<Root<T>> {
    let mut found: BTreeMap<Vec<T>, Root<T>> = BTreeMap::new();
    let mut seen: HashSet<Vec<Vec<T>>> = HashSet::new();
    seen.insert(s.canonical_columns());
    let mut frontier = vec![(s.clone(), Vec::new())];
    for level in 0..=depth {
        let mut next = Vec::new();
        for (seed, word) in &frontier {
            collect_roots(seed, word, &mut found);
            if level == depth {
                continue;
            }
            for j in 1..=seed.rank() {
                for eps in [Sign::Plus, Sign::Minus] {
                    let m = seed.mutate(j, eps).expect("index in range");
                    if seen.insert(m.canonical_columns()) {
                        let mut w: Vec<(usize, Sign)> = word.clone();
                        w.push((j, eps));
                        next.push((m, w));
                    }
                }
            }
        }
        frontier = next;
    }
    found.into_values().collect()
}

fn collect_roots<T: Scalar>(seed: &Seed<T>, word: &[(usize, Sign)], found: &mut BTreeMap<Vec<T>, Root<T>>) {
    let images = seed.psi_images();
    for j in 0..seed.rank() {
        for k in 0..seed.rank() {
            if j != k && images[j] == images[k] {
                let a = seed.vector(j + 1);
                let b = seed.vector(k + 1);
                let v: Vec<T> = a.iter().zip(&b).map(|(&x, &y)| x - y).collect();
                found.entry(v.clone()).or_insert_with(|| Root { vector: v, word: word.to_vec(), pair: (j + 1, k + 1) });
            }
        }
    }
}

/// The automorphism of `N` exchanging `e_j` and `e_k` and fixing the other basis vectors.
pub fn swap_parallel<T: Scalar>(s: &Seed<T>, j: usize, k: usize) -> Result<Matrix<T>, LatticeError> {
    let jj = check_index(j, s.rank())?;
    let kk = check_index(k, s.rank())?;
    if jj == kk || s.psi_image(j) != s.psi_image(k) {
        return Err(LatticeError::NotParallel(j, k));
    }
    let mut swapped = s.basis().clone();
    swapped.swap_cols(jj, kk);
    let inv = s.basis().inverse_unimodular().expect("seed basis is unimodular");
    Ok(swapped.mul(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{cyclic_order, intersection_form, Ambient};

    fn identity_seed(images: &[[i64; 2]]) -> Seed<i64> {
        let n = images.len();
        let mut psi = Matrix::zeros(2, n);
        for (j, v) in images.iter().enumerate() {
            psi[(0, j)] = v[0];
            psi[(1, j)] = v[1];
        }
        Seed::new(Ambient::new(psi).unwrap(), Matrix::identity(n)).unwrap()
    }

    #[test]
    fn depth_zero_roots() {
        let s = identity_seed(&[[1, 0], [-1, 2], [-1, 2], [1, -4]]);
        let roots = find_roots(&s, 0);
        let vs: Vec<_> = roots.iter().map(|r| r.vector.clone()).collect();
        assert_eq!(vs, vec![vec![0, -1, 1, 0], vec![0, 1, -1, 0]]);
        let p2 = identity_seed(&[[1, 0], [-2, 3], [1, -3]]);
        assert!(find_roots(&p2, 0).is_empty());
    }

    #[test]
    fn roots_have_square_minus_two() {
        let s = identity_seed(&[[1, 0], [-1, 2], [-1, 2], [1, -4]]);
        for r in find_roots(&s, 2) {
            assert_eq!(intersection_form(&s, &r.vector, &r.vector).unwrap(), -2);
            let mut t = s.clone();
            for &(j, eps) in &r.word {
                t = t.mutate(j, eps).unwrap();
            }
            let (a, b) = r.pair;
            let diff: Vec<i64> = t.vector(a).iter().zip(t.vector(b)).map(|(x, y)| x - y).collect();
            assert_eq!(diff, r.vector);
        }
    }

    #[test]
    fn swap_agrees_with_reflection_formula() {
        let s = identity_seed(&[[1, 0], [-1, 2], [-1, 2], [1, -4]]);
        let t = swap_parallel(&s, 2, 3).unwrap();
        assert_eq!(t.mul_vec(&s.vector(2)), s.vector(3));
        assert_eq!(t.mul(&t), Matrix::identity(4));
        let cs = cyclic_order(&s);
        let alpha: Vec<i64> = s.vector(2).iter().zip(s.vector(3)).map(|(x, y)| x - y).collect();
        for i in 1..=4 {
            let beta = s.vector(i);
            let c = cs.chi_tilde(&beta, &alpha);
            let expected: Vec<i64> = beta.iter().zip(&alpha).map(|(&b, &a)| b - c * a).collect();
            assert_eq!(t.mul_vec(&beta), expected);
        }
        assert_eq!(swap_parallel(&s, 1, 2), Err(LatticeError::NotParallel(1, 2)));
    }
}
