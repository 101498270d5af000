use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{angle_cmp, check_index, det2, LatticeError, V2};
use crate::matrix::Matrix;
use crate::scalar::{pos, Scalar};

/// Mutation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn apply<T: Scalar>(self, v: T) -> T {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }
}

/// The lattice `N = Z^n` together with `ψ` given as a `2 × n` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ambient<T> {
    psi: Matrix<T>,
}

impl<T: Scalar> Ambient<T> {
    pub fn new(psi: Matrix<T>) -> Result<Self, LatticeError> {
        if psi.rows() != 2 {
            return Err(LatticeError::Dimension("ψ must have two rows".into()));
        }
        if psi.rank() != 2 {
            return Err(LatticeError::PsiRank);
        }
        Ok(Ambient { psi })
    }

    pub fn rank(&self) -> usize {
        self.psi.cols()
    }

    pub fn psi_matrix(&self) -> &Matrix<T> {
        &self.psi
    }

    pub fn psi(&self, v: &[T]) -> V2<T> {
        let p = self.psi.mul_vec(v);
        [p[0], p[1]]
    }

    /// The pulled-back bracket `⟨a, b⟩ = det(ψ a, ψ b)`.
    pub fn bracket(&self, a: &[T], b: &[T]) -> T {
        det2(self.psi(a), self.psi(b))
    }

    pub fn in_kernel(&self, v: &[T]) -> bool {
        v.len() == self.rank() && self.psi(v) == [T::zero(), T::zero()]
    }
}

/// An ordered basis `e_1, …, e_n` of `N`, stored as the columns of a matrix.
///
/// Column order is storage only: [`Seed::same_seed`] compares seeds as multisets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeedJson<T>", into = "SeedJson<T>", bound = "T: Scalar")]
pub struct Seed<T> {
    ambient: Ambient<T>,
    basis: Matrix<T>,
}

/// Wire format `{"rank": n, "psi": [[…], […]], "basis": [[…], …]}`, matrices row-major.
#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct SeedJson<T> {
    rank: usize,
    psi: Matrix<T>,
    basis: Matrix<T>,
}

impl<T: Scalar> TryFrom<SeedJson<T>> for Seed<T> {
    type Error = LatticeError;

    fn try_from(j: SeedJson<T>) -> Result<Self, LatticeError> {
        if j.psi.cols() != j.rank {
            return Err(LatticeError::Dimension(format!("ψ must have {} columns", j.rank)));
        }
        Seed::new(Ambient::new(j.psi)?, j.basis)
    }
}

impl<T: Scalar> From<Seed<T>> for SeedJson<T> {
    fn from(s: Seed<T>) -> Self {
        SeedJson { rank: s.rank(), psi: s.ambient.psi, basis: s.basis }
    }
}

impl<T: Scalar> Seed<T> {
    pub fn new(ambient: Ambient<T>, basis: Matrix<T>) -> Result<Self, LatticeError> {
        let n = ambient.rank();
        if basis.rows() != n || basis.cols() != n {
            return Err(LatticeError::Dimension(format!("basis must be {n}×{n}")));
        }
        let d = basis.det();
        if d.abs() != T::one() {
            return Err(LatticeError::NotUnimodular(d.to_string()));
        }
        let s = Seed { ambient, basis };
        for i in 0..n {
            let [x, y] = s.psi_image(i + 1);
            if x.gcd(&y) != T::one() {
                return Err(LatticeError::NotPrimitive(i + 1));
            }
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(ambient: Ambient<T>, basis: Matrix<T>) -> Self {
        Seed { ambient, basis }
    }

    pub fn ambient(&self) -> &Ambient<T> {
        &self.ambient
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.ambient.rank()
    }

    /// The basis vector `e_j` (1-based) in reference coordinates.
    pub fn vector(&self, j: usize) -> Vec<T> {
        self.basis.col(j - 1)
    }

    pub fn vectors(&self) -> Vec<Vec<T>> {
        self.basis.to_cols()
    }

    pub fn psi_image(&self, j: usize) -> V2<T> {
        self.ambient.psi(&self.vector(j))
    }

    pub fn psi_images(&self) -> Vec<V2<T>> {
        (1..=self.rank()).map(|j| self.psi_image(j)).collect()
    }

    /// `⟨e_i, e_j⟩` for 1-based indices.
    pub fn bracket_ij(&self, i: usize, j: usize) -> T {
        det2(self.psi_image(i), self.psi_image(j))
    }

    /// Coordinates of a reference vector in the seed basis.
    pub fn coordinates(&self, v: &[T]) -> Vec<T> {
        let inv = self.basis.inverse_unimodular().expect("seed basis is unimodular");
        inv.mul_vec(v)
    }

    /// The reference vector with the given seed coordinates.
    pub fn combine(&self, coeffs: &[T]) -> Vec<T> {
        self.basis.mul_vec(coeffs)
    }

    /// The mutation `μ_j^ε`: `e_j ↦ −e_j` and `e_i ↦ e_i + [ε⟨e_i,e_j⟩]_+ e_j`.
    pub fn mutate(&self, j: usize, eps: Sign) -> Result<Self, LatticeError> {
        let jj = check_index(j, self.rank())?;
        let mut basis = self.basis.clone();
        for i in 0..self.rank() {
            if i == jj {
                continue;
            }
            let b = pos(eps.apply(self.bracket_ij(i + 1, j)));
            basis.add_col_multiple(i, jj, b);
        }
        for r in 0..self.rank() {
            basis[(r, jj)] = -basis[(r, jj)];
        }
        Ok(Seed::new_unchecked(self.ambient.clone(), basis))
    }

    /// The transvection `T_{e_j}^ε`: `e_i ↦ e_i + ε⟨e_i,e_j⟩ e_j`.
    pub fn apply_t(&self, j: usize, eps: Sign) -> Result<Self, LatticeError> {
        let jj = check_index(j, self.rank())?;
        let mut basis = self.basis.clone();
        for i in 0..self.rank() {
            let b = eps.apply(self.bracket_ij(i + 1, j));
            basis.add_col_multiple(i, jj, b);
        }
        Ok(Seed::new_unchecked(self.ambient.clone(), basis))
    }

    /// The columns in canonical order: by angle class of their ψ-image, then lexicographically.
    pub fn canonical_columns(&self) -> Vec<Vec<T>> {
        let mut cols = self.vectors();
        cols.sort_by(|a, b| {
            let pa = self.ambient.psi(a);
            let pb = self.ambient.psi(b);
            angle_cmp(pa, pb).then_with(|| a.cmp(b))
        });
        cols
    }

    /// The same seed with columns in canonical storage order.
    pub fn canonical(&self) -> Self {
        let basis = Matrix::from_cols(&self.canonical_columns()).expect("square basis");
        Seed::new_unchecked(self.ambient.clone(), basis)
    }

    /// Multiset equality of basis vectors over the same ambient lattice.
    pub fn same_seed(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.canonical_columns() == other.canonical_columns()
    }

    /// Lexicographic comparison of canonical forms, for deterministic tie-breaking.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.canonical_columns().cmp(&other.canonical_columns())
    }
}
