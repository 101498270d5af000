use std::cmp::Ordering;

use super::{LatticeError, Seed, V2};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `det(u, v) = u.x v.y − u.y v.x`.
#[inline]
pub fn det2<T: Scalar>(u: V2<T>, v: V2<T>) -> T {
    u[0] * v[1] - u[1] * v[0]
}

fn half<T: Scalar>(v: V2<T>) -> u8 {
    if v[1] > T::zero() || (v[1].is_zero() && v[0] > T::zero()) {
        0
    } else {
        1
    }
}

/// Compares the arguments of two nonzero vectors in `[0, 2π)`, exactly.
pub fn angle_cmp<T: Scalar>(a: V2<T>, b: V2<T>) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| T::zero().cmp(&det2(a, b)))
}

/// Whether the sequence admits arguments `θ_1 ≤ … ≤ θ_n ≤ θ_1 + 2π`.
///
/// Reading the arguments in `[0, 2π)`, the sequence may drop at most once, and if
/// it drops the last vector may not pass the first.
pub fn is_cyclically_ordered<T: Scalar>(vs: &[V2<T>]) -> bool {
    let descents = vs.windows(2).filter(|w| angle_cmp(w[1], w[0]) == Ordering::Less).count();
    match descents {
        0 => true,
        1 => angle_cmp(vs[vs.len() - 1], vs[0]) != Ordering::Greater,
        _ => false,
    }
}

/// A seed with a chosen counterclockwise cyclic ordering of its basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSeed<T> {
    seed: Seed<T>,
    order: Vec<usize>,
}

/// Sorts the basis by the argument of its ψ-image in `[0, 2π)`.
/// Parallel images keep their storage order.
pub fn cyclic_order<T: Scalar>(s: &Seed<T>) -> CyclicSeed<T> {
    let images = s.psi_images();
    let mut order: Vec<usize> = (1..=s.rank()).collect();
    order.sort_by(|&i, &j| angle_cmp(images[i - 1], images[j - 1]));
    CyclicSeed { seed: s.clone(), order }
}

impl<T: Scalar> CyclicSeed<T> {
    /// Validates that `order` is a permutation of `1..=n` giving a cyclic ordering.
    pub fn new(seed: Seed<T>, order: Vec<usize>) -> Result<Self, LatticeError> {
        let n = seed.rank();
        let mut seen = vec![false; n];
        for &o in &order {
            if o == 0 || o > n || seen[o - 1] {
                return Err(LatticeError::NotCyclic);
            }
            seen[o - 1] = true;
        }
        if order.len() != n {
            return Err(LatticeError::NotCyclic);
        }
        let images: Vec<_> = order.iter().map(|&i| seed.psi_image(i)).collect();
        if !is_cyclically_ordered(&images) {
            return Err(LatticeError::NotCyclic);
        }
        Ok(CyclicSeed { seed, order })
    }

    /// The storage order, if it is itself a cyclic ordering.
    pub fn in_storage_order(seed: Seed<T>) -> Result<Self, LatticeError> {
        let order = (1..=seed.rank()).collect();
        Self::new(seed, order)
    }

    pub fn seed(&self) -> &Seed<T> {
        &self.seed
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The Gram matrix of `χ_s̃` in the seed basis (storage indices).
    pub fn chi_matrix(&self) -> Matrix<T> {
        let n = self.seed.rank();
        let mut position = vec![0; n];
        for (p, &i) in self.order.iter().enumerate() {
            position[i - 1] = p;
        }
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = match position[i].cmp(&position[j]) {
                    Ordering::Equal => T::one(),
                    Ordering::Greater => self.seed.bracket_ij(i + 1, j + 1),
                    Ordering::Less => T::zero(),
                };
            }
        }
        m
    }

    /// `χ_s̃(a, b)` for reference vectors `a`, `b`.
    pub fn chi_tilde(&self, a: &[T], b: &[T]) -> T {
        let x = self.seed.coordinates(a);
        let y = self.seed.coordinates(b);
        self.chi_matrix().bilinear(&x, &y)
    }
}
