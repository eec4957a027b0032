use std::path::PathBuf;
use std::sync::Arc;

use orbsum::enumerate::{random_realization, Alphabet};
use orbsum::text::{parse, serialize, Document, Realization};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixtures() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "orb"))
        .collect();
    files.sort();
    files
}

#[test]
fn fixtures_round_trip() {
    let files = fixtures();
    assert!(files.len() >= 4);
    for f in files {
        let doc = parse(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc, "{}", f.display());
    }
}

fn random_document(seed: u64, edges: usize) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alphabet = if seed.is_multiple_of(2) {
        Alphabet::standard()
    } else {
        Alphabet::cyclic(3)
    };
    let tree = random_realization(&mut rng, &alphabet, edges, true);
    let atoms: Vec<_> = alphabet
        .atoms
        .iter()
        .filter(|a| !a.is_identity())
        .map(Arc::clone)
        .collect();
    Document {
        atoms,
        realizations: vec![Realization {
            name: "R".into(),
            tree,
        }],
    }
}

proptest! {
    #[test]
    fn random_documents_round_trip(seed in 0u64..10_000, edges in 0usize..8) {
        let doc = random_document(seed, edges);
        let text = serialize(&doc);
        prop_assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn garbage_never_panics(s in "[a-z0-9 (){};:.,=>#-]{0,60}") {
        let _ = parse(&s);
    }
}
