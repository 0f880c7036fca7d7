use std::sync::Arc;

use clubcat::fincat::FinCategory;
use clubcat::fixtures;
use clubcat::io::{self, Document};
use clubcat::operads::{com, operad_to_club, swap_pair, unital_ass};
use clubcat::semidirect::Guardrails;
use clubcat::simpset::{boundary, horn, standard_simplex, SimplicialMap, SimplicialSet};
use clubcat::sset_club::SimplexFamily;
use clubcat::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn round_trip(d: &Document) -> Document {
    let text = io::serialize(d).unwrap();
    let back = io::parse_str(&text, &Guardrails::for_law_checks()).unwrap();
    assert_eq!(back.kind(), d.kind());
    assert_eq!(io::serialize(&back).unwrap(), text, "second serialization differs");
    back
}

#[test]
fn categories_and_diagrams() {
    for c in [FinCategory::walking_arrow(), FinCategory::ordinal(3), FinCategory::monoid(&["e", "x"], &[vec![0, 1], vec![1, 0]])] {
        let Document::Category(back) = round_trip(&Document::Category(c.clone())) else { panic!() };
        assert_eq!(back.objects(), c.objects());
        assert_eq!(back.comp_entries(), c.comp_entries());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let d = fixtures::random_diagram(&mut rng, 3, 3);
        round_trip(&Document::Diagram(d));
    }
}

#[test]
fn operads_and_clubs() {
    let Document::Operad(op) = round_trip(&Document::Operad(unital_ass(3))) else { panic!() };
    assert_eq!(op, unital_ass(3));
    for s in [com(3), swap_pair()] {
        let Document::SymOperad(back) = round_trip(&Document::SymOperad(s.clone())) else { panic!() };
        assert_eq!(back, s);
    }
    let club = operad_to_club(&unital_ass(2), &Guardrails::for_law_checks()).unwrap();
    round_trip(&Document::Club(club));
}

#[test]
fn simplicial_documents() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in [standard_simplex(2, 3), boundary(2, 2), horn(2, 1, 2)] {
        let Document::SSet(back) = round_trip(&Document::SSet(s.clone())) else { panic!() };
        assert_eq!(back, s);
        let s = Arc::new(s);
        round_trip(&Document::Map(SimplicialMap::to_point(s.clone())));
        round_trip(&Document::ClubObject(fixtures::random_family(&mut rng, &s)));
    }
    let t: Arc<SimplicialSet> = Arc::new(standard_simplex(1, 2));
    let x = SimplexFamily::constant(t.clone(), Arc::new(boundary(2, 2)));
    let Document::ClubObject(back) = round_trip(&Document::ClubObject(x.clone())) else { panic!() };
    assert_eq!(back, x);
}

#[test]
fn algebra_documents() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for shape in fixtures::algebra_shapes(2) {
        let x = fixtures::random_set_family(&mut rng, &shape, 3);
        round_trip(&Document::Algebra(x.clone()));
        let id = clubcat::algebra::AlgebraMorphism::identity(Arc::new(x));
        round_trip(&Document::AlgebraMorphism(id));
    }
}

#[test]
fn versions_and_schema_errors() {
    let g = Guardrails::default();
    let good = io::serialize(&Document::Category(FinCategory::walking_arrow())).unwrap();
    let wrong = good.replace("\"version\": 1", "\"version\": 2");
    assert!(matches!(io::parse_str(&wrong, &g), Err(Error::Schema(_))));
    let mut missing: serde_json::Value = serde_json::from_str(&good).unwrap();
    missing.as_object_mut().unwrap().remove("version");
    assert!(matches!(io::document_from_value(missing, &g), Err(Error::Schema(_))));
    assert!(matches!(io::parse_str("{\"version\": 1, \"kind\": \"category\", \"objects\": [", &g), Err(Error::Json(_))));
    let dangling = r#"{"version":1,"kind":"category","objects":["a"],"morphisms":[{"id":"1a","src":"a","tgt":"b"}],
        "identities":{"a":"1a"},"comp":[["1a","1a","1a"]]}"#;
    assert!(io::parse_str(dangling, &g).is_err());
    // Z/2 parses; breaking a unit law does not
    let bad_laws = r#"{"version":1,"kind":"category","objects":["a"],
        "morphisms":[{"id":"e","src":"a","tgt":"a"},{"id":"x","src":"a","tgt":"a"}],
        "identities":{"a":"e"},"comp":[["e","e","e"],["e","x","x"],["x","e","x"],["x","x","e"]]}"#;
    assert!(io::parse_str(bad_laws, &g).is_ok());
    let bad_unit = bad_laws.replace(r#"["e","x","x"]"#, r#"["e","x","e"]"#);
    assert!(matches!(io::parse_str(&bad_unit, &g), Err(Error::Invalid(_)) | Err(Error::Schema(_))));
}
