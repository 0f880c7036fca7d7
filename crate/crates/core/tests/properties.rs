use std::sync::Arc;

use clubcat::algebra::{colimit_act, AlgebraObject};
use clubcat::fixtures;
use clubcat::io::{self, Document};
use clubcat::semidirect::Guardrails;
use clubcat::simpset::{ez_factor, product, standard_simplex, MonotoneMap};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn monotone() -> impl Strategy<Value = MonotoneMap> {
    (0usize..5, prop::collection::vec(0usize..5, 1..6)).prop_map(|(cod, mut v)| {
        for x in &mut v {
            *x = (*x).min(cod);
        }
        v.sort_unstable();
        MonotoneMap::new(v, cod).unwrap()
    })
}

/// Strictly increasing chains of `k + 1` points in `[p] x [q]`.
fn chains(p: usize, q: usize, k: usize) -> usize {
    fn go(p: usize, q: usize, last: Option<(usize, usize)>, left: usize) -> usize {
        if left == 0 {
            return 1;
        }
        let mut n = 0;
        for a in 0..=p {
            for b in 0..=q {
                if last.is_none_or(|(x, y)| (x, y) != (a, b) && x <= a && y <= b) {
                    n += go(p, q, Some((a, b)), left - 1);
                }
            }
        }
        n
    }
    go(p, q, None, k + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epi_mono_factorization(theta in monotone()) {
        let (d, s) = ez_factor(&theta);
        prop_assert!(d.is_injective());
        prop_assert!(s.is_surjective());
        prop_assert_eq!(d.after(&s), theta);
    }

    #[test]
    fn product_of_simplices_counts_chains(p in 0usize..3, q in 0usize..3) {
        let trunc = 3;
        let got = product(&standard_simplex(p, trunc), &standard_simplex(q, trunc)).nondeg_counts();
        let want: Vec<usize> = (0..=trunc).map(|k| chains(p, q, k)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn diagrams_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Document::Diagram(fixtures::random_diagram(&mut rng, 3, 3));
        let text = io::serialize(&d).unwrap();
        let back = io::parse_str(&text, &Guardrails::for_law_checks()).unwrap();
        prop_assert_eq!(io::serialize(&back).unwrap(), text);
    }

    #[test]
    fn colimit_classes_are_compatible(seed in any::<u64>(), shape in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shapes = fixtures::algebra_shapes(2);
        let shape: &Arc<_> = &shapes[shape % shapes.len()];
        let x: AlgebraObject = fixtures::random_set_family(&mut rng, shape, 3);
        let c = colimit_act(&x);
        let cat = x.diagram.category();
        for m in 0..cat.morphism_count() {
            for (e, &img) in x.diagram.map(m).iter().enumerate() {
                prop_assert_eq!(c.class_of(cat.src(m), e), c.class_of(cat.tgt(m), img));
            }
        }
        let total: usize = x.diagram.sizes().iter().sum();
        prop_assert!(c.size <= total);
        prop_assert_eq!(c.representatives.len(), c.size);
    }
}
