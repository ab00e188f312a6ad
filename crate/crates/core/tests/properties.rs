use algdeg_core::degen::{random_applicable_pair, verify_lindeg};
use algdeg_core::exactla::{Matrix, Subspace};
use algdeg_core::gfield::{Field, GaloisField};
use algdeg_core::spinmx::GeneratorSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u64, u32); 6] = [(2, 3), (3, 1), (3, 2), (5, 1), (2, 2), (7, 1)];

fn field_and_elems() -> impl Strategy<Value = (GaloisField, u32, u32, u32)> {
    (0..FIELDS.len()).prop_flat_map(|i| {
        let (p, k) = FIELDS[i];
        let f = GaloisField::new(p, k).unwrap();
        let q = f.size();
        (Just(f), 0..q, 0..q, 0..q)
    })
}

fn vectors(q: u32, count: usize, len: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    prop::collection::vec(prop::collection::vec(0..q, len), 0..=count)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms((f, a, b, c) in field_and_elems()) {
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
        prop_assert_eq!(f.pow(&a, f.size() as u64), a);
        match f.inv(&a) {
            Some(x) => prop_assert!(f.is_one(&f.mul(&a, &x))),
            None => prop_assert!(f.is_zero(&a)),
        }
    }

    #[test]
    fn sum_and_intersection_dimensions(a in vectors(4, 5, 7), b in vectors(4, 5, 7)) {
        let f = GaloisField::new(2, 2).unwrap();
        let sa = Subspace::from_vectors(&f, 7, a);
        let sb = Subspace::from_vectors(&f, 7, b);
        let sum = sa.sum(&sb).unwrap();
        let cap = sa.intersect(&sb).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), sa.dim() + sb.dim());
        prop_assert!(sum.contains_subspace(&sa) && sum.contains_subspace(&sb));
        prop_assert!(sa.contains_subspace(&cap) && sb.contains_subspace(&cap));
    }

    #[test]
    fn rank_nullity(rows in prop::collection::vec(prop::collection::vec(0u32..5, 6), 1..6)) {
        let f = GaloisField::new(5, 1).unwrap();
        let m = Matrix::from_rows(&f, 6, &rows).unwrap();
        prop_assert_eq!(m.rank() + m.null_space().dim(), 6);
    }

}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn truncation_stays_in_orbit_span(seed in any::<u64>(), i in 0..3usize) {
        let (p, k) = [(5, 1), (7, 1), (2, 3)][i];
        let f = GaloisField::new(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lambda, q) = random_applicable_pair(&f, 3, &mut rng);
        prop_assert!(verify_lindeg(&lambda, &q, &GeneratorSet::standard(&f, 3)).unwrap());
    }
}
