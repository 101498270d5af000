use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{cyclic_order, Ambient, LatticeError, Seed};
use crate::matrix::Matrix;
use crate::scalar::{primitive, primitive_from_rational, Scalar, Q};

/// A saturated basis of `K = Ker ψ` in reference coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelBasis<T> {
    pub vectors: Vec<Vec<T>>,
}

pub fn kernel_basis<T: Scalar>(ambient: &Ambient<T>) -> KernelBasis<T> {
    KernelBasis { vectors: ambient.psi_matrix().integer_kernel() }
}

/// The intersection form `(a, b)_S = −χ_s̃(a, b)` on `K`.
pub fn intersection_form<T: Scalar>(s: &Seed<T>, a: &[T], b: &[T]) -> Result<T, LatticeError> {
    if !s.ambient().in_kernel(a) || !s.ambient().in_kernel(b) {
        return Err(LatticeError::NotInKernel);
    }
    Ok(-cyclic_order(s).chi_tilde(a, b))
}

/// The Gram matrix of the intersection form on the given kernel vectors.
pub fn kernel_gram<T: Scalar>(s: &Seed<T>, kb: &KernelBasis<T>) -> Matrix<T> {
    let chi = cyclic_order(s).chi_matrix();
    let inv = s.basis().inverse_unimodular().expect("seed basis is unimodular");
    let coords: Vec<Vec<T>> = kb.vectors.iter().map(|v| inv.mul_vec(v)).collect();
    let k = coords.len();
    let mut g = Matrix::zeros(k, k);
    for p in 0..k {
        for q in 0..k {
            g[(p, q)] = -chi.bilinear(&coords[p], &coords[q]);
        }
    }
    g
}

/// Evidence attached to a q-Painlevé decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate<T> {
    /// A nonzero vector of `K` pairing to zero with all of `K`.
    Radical(Vec<T>),
    /// A vector of `K` with positive self-pairing.
    PositiveWitness(Vec<T>),
    /// The form is negative definite, so there is no radical.
    NegativeDefinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QPainleve<T> {
    pub q_painleve: bool,
    pub certificate: Certificate<T>,
}

/// Outcome of symmetric elimination on a form `Q`: either `Q` is positive
/// semi-definite, or a vector (in the input coordinates) with `Q(w) < 0`.
fn positive_semidefinite<T: Scalar>(q: &Matrix<T>) -> Result<(), Vec<Q<T>>> {
    let k = q.rows();
    let mut a: Vec<Vec<Q<T>>> =
        (0..k).map(|i| q.row(i).iter().map(|&v| Q::from_integer(v)).collect()).collect();
    let mut basis: Vec<Vec<Q<T>>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    let mut active: Vec<usize> = (0..k).collect();
    loop {
        if let Some(&i) = active.iter().find(|&&i| !a[i][i].is_zero()) {
            if a[i][i].is_negative() {
                return Err(basis[i].clone());
            }
            active.retain(|&x| x != i);
            for &j in &active {
                let f = a[j][i] / a[i][i];
                if f.is_zero() {
                    continue;
                }
                for c in 0..k {
                    let t = a[i][c];
                    a[j][c] = a[j][c] - f * t;
                }
                for r in 0..k {
                    let t = a[r][i];
                    a[r][j] = a[r][j] - f * t;
                }
                for c in 0..k {
                    let t = basis[i][c];
                    basis[j][c] = basis[j][c] - f * t;
                }
            }
            continue;
        }
        // all remaining diagonal entries vanish
        for &i in &active {
            for &j in &active {
                if i != j && !a[i][j].is_zero() {
                    // Q(x b_i + b_j) = 2 x Q_ij, negative for x = −sign(Q_ij)
                    let x = if a[i][j].is_positive() { -Q::one() } else { Q::one() };
                    return Err((0..k).map(|c| x * basis[i][c] + basis[j][c]).collect());
                }
            }
        }
        return Ok(());
    }
}

fn kernel_combination<T: Scalar>(kb: &KernelBasis<T>, coeffs: &[T], n: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    for (c, k) in coeffs.iter().zip(&kb.vectors) {
        for (x, &y) in v.iter_mut().zip(k) {
            *x = *x + *c * y;
        }
    }
    v
}

/// Decides whether the intersection form on `K` is negative semi-definite but not
/// negative definite, by exact symmetric elimination over the rationals.
pub fn is_q_painleve<T: Scalar>(s: &Seed<T>) -> QPainleve<T> {
    let kb = kernel_basis(s.ambient());
    let g = kernel_gram(s, &kb);
    let k = g.rows();
    let mut neg = g.clone();
    for i in 0..k {
        for j in 0..k {
            neg[(i, j)] = -g[(i, j)];
        }
    }
    if let Err(w) = positive_semidefinite(&neg) {
        let coeffs = primitive_from_rational(&w);
        return QPainleve {
            q_painleve: false,
            certificate: Certificate::PositiveWitness(kernel_combination(&kb, &coeffs, s.rank())),
        };
    }
    match g.integer_kernel().first() {
        Some(r) => QPainleve {
            q_painleve: true,
            certificate: Certificate::Radical(primitive(&kernel_combination(&kb, r, s.rank()))),
        },
        None => QPainleve { q_painleve: false, certificate: Certificate::NegativeDefinite },
    }
}

/// The primitive radical vector `δ_S = Σ c_i e_i` with all `c_i > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta<T> {
    pub vector: Vec<T>,
    pub coefficients: Vec<T>,
}

pub fn delta_class<T: Scalar>(s: &Seed<T>) -> Result<Delta<T>, LatticeError> {
    if !is_q_painleve(s).q_painleve {
        return Err(LatticeError::NotQPainleve);
    }
    let kb = kernel_basis(s.ambient());
    let radical = kernel_gram(s, &kb).integer_kernel();
    if radical.len() != 1 {
        return Err(LatticeError::RadicalRank(radical.len()));
    }
    let mut vector = primitive(&kernel_combination(&kb, &radical[0], s.rank()));
    let mut coefficients = s.coordinates(&vector);
    if coefficients.iter().all(|c| c.is_negative()) {
        vector.iter_mut().for_each(|x| *x = -*x);
        coefficients.iter_mut().for_each(|x| *x = -*x);
    }
    if !coefficients.iter().all(|c| c.is_positive()) {
        return Err(LatticeError::NoPositiveRadical);
    }
    Ok(Delta { vector, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(psi_rows: [Vec<i64>; 2], basis_cols: &[Vec<i64>]) -> Seed<i64> {
        let psi = Matrix::from_rows(psi_rows.to_vec()).unwrap();
        Seed::new(Ambient::new(psi).unwrap(), Matrix::from_cols(basis_cols).unwrap()).unwrap()
    }

    fn identity_seed(images: &[[i64; 2]]) -> Seed<i64> {
        let rows = [images.iter().map(|v| v[0]).collect(), images.iter().map(|v| v[1]).collect()];
        let n = images.len();
        let cols: Vec<Vec<i64>> =
            (0..n).map(|j| (0..n).map(|i| i64::from(i == j)).collect()).collect();
        seed(rows, &cols)
    }

    #[test]
    fn projective_plane_delta() {
        // ψ-images (1,0), (−2,3), (1,−3) as for the Beilinson collection
        let s = identity_seed(&[[1, 0], [-2, 3], [1, -3]]);
        let q = is_q_painleve(&s);
        assert!(q.q_painleve);
        let d = delta_class(&s).unwrap();
        assert_eq!(d.coefficients, vec![1, 1, 1]);
        assert_eq!(s.ambient().psi(&d.vector), [0, 0]);
        assert_eq!(intersection_form(&s, &d.vector, &d.vector).unwrap(), 0);
    }

    #[test]
    fn rank_two_is_negative_definite() {
        let s = identity_seed(&[[1, 0], [0, 1]]);
        let q = is_q_painleve(&s);
        assert!(!q.q_painleve);
        assert_eq!(q.certificate, Certificate::NegativeDefinite);
        assert!(delta_class(&s).is_err());
    }

    #[test]
    fn positive_witness_found_by_search() {
        // the rays of the projective plane, each repeated k times: the boundary
        // cycle becomes negative definite once k is large enough
        let mut found = None;
        for k in 1..=5 {
            let images: Vec<[i64; 2]> =
                [[1, 0], [0, 1], [-1, -1]].iter().flat_map(|&v| std::iter::repeat(v).take(k)).collect();
            let s = identity_seed(&images);
            let q = is_q_painleve(&s);
            if let Certificate::PositiveWitness(w) = &q.certificate {
                assert!(!q.q_painleve);
                assert!(intersection_form(&s, w, w).unwrap() > 0);
                found = Some(k);
                break;
            }
        }
        assert_eq!(found, Some(4));
    }

    #[test]
    fn rejects_vectors_outside_kernel() {
        let s = identity_seed(&[[1, 0], [-2, 3], [1, -3]]);
        assert_eq!(intersection_form(&s, &[1, 0, 0], &[1, 1, 1]), Err(LatticeError::NotInKernel));
        assert_eq!(intersection_form(&s, &[0, 0, 0], &[0, 0, 0]), Ok(0));
    }

    #[test]
    fn psd_elimination() {
        let m = Matrix::from_rows(vec![vec![2i64, 1], vec![1, 2]]).unwrap();
        assert!(positive_semidefinite(&m).is_ok());
        let m = Matrix::from_rows(vec![vec![0i64, 1], vec![1, 0]]).unwrap();
        assert!(positive_semidefinite(&m).is_err());
        let m = Matrix::from_rows(vec![vec![1i64, 2], vec![2, 1]]).unwrap();
        let w = positive_semidefinite(&m).unwrap_err();
        let w = primitive_from_rational(&w);
        assert!(m.bilinear(&w, &w) < 0);
    }
}
