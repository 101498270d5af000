use dphelix::delpezzo::{
    euler_chi, finite_roots, orthogonal_compose, orthogonal_decompose, reflection_matrix, tensor, tensor_matrix,
    validate_orthogonal, weyl_closure, word_matrix, KClass, OrthogonalElement, Surface, DEFAULT_WEYL_LIMIT,
};
use dphelix::matrix::Matrix;
use proptest::prelude::*;

const SURFACES: [Surface; 7] = [
    Surface::BlowupP2 { m: 0 },
    Surface::P1xP1,
    Surface::BlowupP2 { m: 1 },
    Surface::BlowupP2 { m: 2 },
    Surface::BlowupP2 { m: 3 },
    Surface::BlowupP2 { m: 4 },
    Surface::BlowupP2 { m: 5 },
];

fn surface() -> impl Strategy<Value = Surface> {
    prop::sample::select(SURFACES.to_vec())
}

fn class(s: Surface) -> impl Strategy<Value = KClass<i64>> {
    (-6i64..=6, prop::collection::vec(-6i64..=6, s.rho()), -20i64..=20).prop_map(|(r, c1, m)| KClass::new(r, c1, m))
}

fn surface_and_classes(k: usize) -> impl Strategy<Value = (Surface, Vec<KClass<i64>>)> {
    surface().prop_flat_map(move |s| (Just(s), prop::collection::vec(class(s), k)))
}

/// A basis of `K_Z^⊥ ⊂ NS(Z)`.
fn k_perp(s: &Surface) -> Vec<Vec<i64>> {
    let gk = s.intersection_matrix::<i64>().mul_vec(&s.canonical());
    Matrix::from_rows(vec![gk]).unwrap().integer_kernel()
}

fn combination(basis: &[Vec<i64>], coeffs: &[i64], len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    for (b, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// A generator of `O(Z)`: a finite reflection, or a twist by an element of `K_Z^⊥`.
#[derive(Debug, Clone)]
enum Gen {
    Reflect(usize),
    Twist(Vec<i64>),
}

fn generator_matrix(s: &Surface, g: &Gen) -> Matrix<i64> {
    match g {
        Gen::Reflect(i) => {
            let roots = finite_roots::<i64>(s);
            if roots.is_empty() {
                Matrix::identity(s.n())
            } else {
                reflection_matrix(s, &roots[i % roots.len()]).unwrap()
            }
        }
        Gen::Twist(c) => tensor_matrix(s, &combination(&k_perp(s), c, s.rho())).unwrap(),
    }
}

fn generators() -> impl Strategy<Value = Vec<Gen>> {
    let gen = prop_oneof![
        (0usize..1000).prop_map(Gen::Reflect),
        prop::collection::vec(-2i64..=2, 8).prop_map(Gen::Twist),
    ];
    prop::collection::vec(gen, 0..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn skew_part_of_euler_form((s, v) in surface_and_classes(2)) {
        let (e, f) = (&v[0], &v[1]);
        let skew = euler_chi(&s, e, f) - euler_chi(&s, f, e);
        prop_assert_eq!(skew, e.r * f.degree(&s) - f.r * e.degree(&s));
    }

    #[test]
    fn euler_form_on_rank_zero_is_minus_intersection((s, v) in surface_and_classes(2)) {
        let e = KClass::new(0, v[0].c1.clone(), v[0].m);
        let f = KClass::new(0, v[1].c1.clone(), v[1].m);
        prop_assert_eq!(euler_chi(&s, &e, &f), -s.dot(&e.c1, &f.c1));
    }

    #[test]
    fn twisting_preserves_euler_form((s, v) in surface_and_classes(2), d in prop::collection::vec(-4i64..=4, 9)) {
        let d = &d[..s.rho()];
        let e = tensor(&s, &v[0], d).unwrap();
        let f = tensor(&s, &v[1], d).unwrap();
        prop_assert_eq!(euler_chi(&s, &e, &f), euler_chi(&s, &v[0], &v[1]));
        let line = KClass::line_bundle(&s, d).unwrap();
        prop_assert_eq!(euler_chi(&s, &line, &line), 1);
    }

    #[test]
    fn kernel_of_psi_is_k_perp_plus_points((s, v) in surface_and_classes(1), c in prop::collection::vec(-5i64..=5, 9)) {
        let psi = s.psi_matrix::<i64>();
        let kernel = psi.integer_kernel();
        prop_assert_eq!(kernel.len(), s.n() - 2);
        let basis = k_perp(&s);
        prop_assert_eq!(basis.len() + 1, kernel.len());
        for x in &kernel {
            let k = KClass::from_vec(x);
            prop_assert_eq!(k.r, 0);
            prop_assert_eq!(k.degree(&s), 0);
        }
        let member = KClass::new(0, combination(&basis, &c, s.rho()), v[0].m);
        prop_assert_eq!(psi.mul_vec(&member.to_vec()), vec![0, 0]);
        prop_assert_eq!(v[0].psi(&s) == [0, 0], psi.mul_vec(&v[0].to_vec()) == vec![0, 0]);
    }

    #[test]
    fn generators_preserve_euler_form(s in surface(), gens in generators()) {
        let e = s.euler_matrix::<i64>();
        for g in &gens {
            let m = generator_matrix(&s, g);
            prop_assert_eq!(m.transpose().mul(&e).mul(&m), e.clone());
            prop_assert!(validate_orthogonal(&s, &m).is_ok());
        }
    }

    #[test]
    fn decomposition_round_trip(s in surface(), gens in generators()) {
        let f = gens.iter().fold(Matrix::identity(s.n()), |acc, g| acc.mul(&generator_matrix(&s, g)));
        let (w, d) = orthogonal_decompose(&s, &OrthogonalElement { matrix: f.clone() }).unwrap();
        prop_assert_eq!(orthogonal_compose(&s, &w.matrix, &d).unwrap(), f);
        prop_assert_eq!(s.dot(&d, &s.canonical()), 0);
        prop_assert_eq!(word_matrix(&s, w.word.as_ref().unwrap()).unwrap(), w.matrix);
    }
}

#[test]
fn weyl_orders() {
    let expected = [1, 2, 1, 2, 12, 120, 1920];
    for (s, &order) in SURFACES.iter().zip(&expected) {
        assert_eq!(weyl_closure::<i64>(s, DEFAULT_WEYL_LIMIT).unwrap().order(), order, "{s}");
    }
}
