//! End-to-end flows across modules.

mod common;

use common::*;
use evencycle::discovery::{
    classify_pair, find_wsequence, search_siblings, whitney_equivalent, CatalogSpec, SiblingRecord, Tag, DEFAULT_BUDGET,
};
use evencycle::ops::{apply_wsequence, whitney_flip};
use evencycle::planted::{plant, random_two_connected, PlantedKind};
use evencycle::templates::{build_named_twins, build_split_siblings};
use evencycle::{enumerate_k_separations, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn planted_pairs_survive_a_record_round_trip() {
    for kind in PlantedKind::ALL {
        let p = plant(kind, 1000).unwrap();
        let rec = SiblingRecord::from_pair(&p.pair);
        assert_eq!(rec.pair(), p.pair);
        if kind != PlantedKind::TriangleTriad {
            rec.verify().unwrap();
        }
        let (a, b) = p.pair.signed();
        let again = SiblingRecord::new(a, b).unwrap();
        let (l1, l2) = (Local::new(&again.g1), Local::new(&again.g2));
        assert_eq!(l1.even_cuts(l1.vmask(&again.t1)), l2.even_cuts(l2.vmask(&again.t2)), "{}", kind.name());
    }
}

#[test]
fn planted_templates_rebuild_their_pairs() {
    for seed in 0..5 {
        let nova = plant(PlantedKind::Nova, seed).unwrap();
        let rebuilt = build_split_siblings(nova.split.as_ref().unwrap()).unwrap();
        assert_eq!(rebuilt, nova.pair);
        let twist = plant(PlantedKind::Twist, seed).unwrap();
        let named = build_named_twins(twist.pieces.as_ref().unwrap()).unwrap();
        assert_eq!(named.pair, twist.pair);
    }
}

#[test]
fn classification_tags_fresh_seeds() {
    for kind in PlantedKind::ALL {
        let Some(want) = Tag::of_planted(kind) else { continue };
        for seed in 500..503 {
            let p = plant(kind, seed).unwrap();
            let c = classify_pair(&SiblingRecord::from_pair(&p.pair), DEFAULT_BUDGET);
            assert!(c.tags.contains(&want), "{} seed {seed}: {:?} {:?}", kind.name(), c.tags, c.reason);
            assert!(c.witnesses.iter().any(|w| w.tag() == want && !w.describe().is_empty()));
        }
    }
}

#[test]
fn searched_pairs_classify_without_contradiction() {
    let recs = search_siblings(CatalogSpec { max_vertices: 4, max_edges: 6, loops: false }, DEFAULT_BUDGET).unwrap();
    assert!(!recs.is_empty());
    for rec in recs.iter().take(200) {
        rec.verify().unwrap();
        let c = classify_pair(rec, DEFAULT_BUDGET);
        assert!(!c.tags.is_empty());
        // An unclassified pair carries no witnesses and says why.
        if c.tags.contains(&Tag::Unclassified) {
            assert_eq!(c.tags.len(), 1);
            assert!(c.witnesses.is_empty() && c.reason.is_some());
        }
    }
}

fn scrambled(rng: &mut impl Rng, g: &Graph, steps: usize) -> Graph {
    let mut cur = g.clone();
    for _ in 0..steps {
        let seps = enumerate_k_separations(&cur, 2).unwrap();
        if seps.is_empty() {
            break;
        }
        cur = whitney_flip(&cur, &seps[rng.gen_range(0..seps.len())]).unwrap();
    }
    cur
}

#[test]
fn found_wsequences_connect_equivalent_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let n = rng.gen_range(4..8);
        let chords = rng.gen_range(0..3);
        let g = random_two_connected(&mut rng, n, chords);
        let h = scrambled(&mut rng, &g, 4);
        assert!(whitney_equivalent(&g, &h, DEFAULT_BUDGET).unwrap());
        let s = find_wsequence(&g, &h, DEFAULT_BUDGET).unwrap().expect("equivalent graphs are connected by flips");
        assert!(apply_wsequence(&g, &s).unwrap().same_up_to_renaming(&h));
        assert_eq!(Local::new(&g).cycles(), Local::new(&h).cycles());
    }
}
