//! Independent paths to the same answer must agree: the free-group image
//! against the trace calculus, and schemes against the homotopies built on them.

use carpet_core::free_group::puncture_word;
use carpet_core::homotopy_builder::{build_homotopy, certify_containment, convergence_gap};
use carpet_core::sample::{random_loop_with, random_sequence, random_trivial_loop};
use carpet_core::trace_calculus::{coherent_scheme, verify_scheme, TraceWord, DEFAULT_CAP};
use carpet_core::word_encoding::{encode_word, refine, CyclicWord, RefinementCorrespondence};
use carpet_core::{DefiningSequence, PolyLoop};

fn chain(lp: &PolyLoop, seq: &DefiningSequence, depth: u32) -> (Vec<TraceWord>, Vec<RefinementCorrespondence>) {
    let words: Vec<CyclicWord> = (1..=depth).map(|i| encode_word(lp, seq, i).unwrap()).collect();
    let refs = words.windows(2).map(|w| refine(&w[0], &w[1]).unwrap()).collect();
    (words.iter().map(TraceWord::from_cyclic).collect(), refs)
}

#[test]
fn scheme_exists_exactly_for_trivial_loops() {
    for (depth, steps, density) in [(2u32, 30usize, 0.5), (3, 60, 0.3), (3, 60, 0.1), (4, 100, 0.1), (5, 150, 0.02)] {
        for seed in 0..60 {
            let seq = random_sequence(depth, seed, density);
            let lp = if seed % 2 == 0 {
                random_trivial_loop(&seq, depth, seed, steps)
            } else {
                random_loop_with(&seq, depth, seed, steps)
            };
            let (words, refs) = chain(&lp, &seq, depth);
            let trivial = puncture_word(&lp, &seq, depth).unwrap().is_empty();
            match coherent_scheme(&words, &refs, DEFAULT_CAP) {
                Ok(s) => {
                    assert!(trivial, "depth {depth} seed {seed}: scheme for a nontrivial loop");
                    assert!(verify_scheme(&words, &refs, &s).unwrap());
                }
                Err(e) => assert!(!trivial, "depth {depth} seed {seed}: trivial loop without scheme: {e}"),
            }
        }
    }
}

#[test]
fn homotopies_on_random_spaces() {
    for (seq, depth, steps) in [(random_sequence(3, 1, 0.3), 3u32, 50usize), (random_sequence(4, 2, 0.1), 4, 60)] {
        for seed in 0..12u64 {
            let lp = random_trivial_loop(&seq, depth, seed, steps);
            let (words, refs) = chain(&lp, &seq, depth);
            let scheme = coherent_scheme(&words, &refs, DEFAULT_CAP).unwrap();
            let hs: Vec<_> = scheme
                .diagrams
                .iter()
                .enumerate()
                .map(|(k, d)| build_homotopy(&lp, &seq, k as u32 + 1, d).unwrap())
                .collect();
            for h in &hs {
                let rep = certify_containment(h, &seq, h.level).unwrap();
                assert!(rep.is_clean(), "seed {seed} level {}: {:?}", h.level, rep.violations.first());
            }
            for w in hs.windows(2) {
                let g = convergence_gap(&w[0], &w[1], 2).unwrap();
                assert!(g.holds, "seed {seed} level {}: {} > {}", g.level, g.max_sq, g.bound_sq);
            }
        }
    }
}
