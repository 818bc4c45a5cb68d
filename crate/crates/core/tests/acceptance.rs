//! Acceptance suite. Each test prints one `criterion N [PASS|FAIL]` line to
//! stderr, bypassing output capture, and then asserts.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use carpet_core::decider::{check_certificate, decide, DecideOptions, Fixture, Verdict};
use carpet_core::free_group::{bonding_map, cyclic_reduce, puncture_word, winding_vector, FreeLetter, FreeWord};
use carpet_core::grid_geometry::{GridSquare, LevelCorridors};
use carpet_core::homotopy_builder::{
    build_cellulation, build_homotopy, certify_containment, convergence_gap, verify_containment, LevelHomotopy,
};
use carpet_core::sample::{
    central_ring, commutator_fixture, loop_with_vertices, random_loop_with, random_sequence, random_trivial_loop,
    random_walk,
};
use carpet_core::trace_calculus::{
    coherent_scheme, enumerate_diagrams, induce_diagram, move_search_trivial, trace_trivial, verify_scheme,
    CancellationDiagram, TraceError, TraceWord, DEFAULT_CAP,
};
use carpet_core::word_encoding::{
    cyclic_eq, encode_word, realize_symbols, refine, refinement_map, walk_symbols, CyclicWord, RefinementCorrespondence,
};
use carpet_core::{DefiningSequence, PolyLoop};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, title: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n} [{status}] {title}: {detail}");
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("fixtures")
}

fn dump(seq: &DefiningSequence, lp: &PolyLoop, level: u32, free: &FreeWord, word: &CyclicWord, detail: String) -> String {
    let fx = Fixture {
        space: seq.to_file(),
        lp: lp.clone(),
        level,
        free_word: free.clone(),
        corridor_word: word.to_text(),
        detail,
    };
    match fx.dump(&fixture_dir()) {
        Ok(p) => p.display().to_string(),
        Err(e) => format!("(fixture not written: {e})"),
    }
}

fn omega3() -> TraceWord {
    let mut w = TraceWord::parse("d3 d2 l d2^-1 l^-1 d3^-1 k d1 l^-1 d2 l d2^-1 d1^-1 k^-1", &[("l", "d2")]).unwrap();
    for v in ["d1", "d2", "d3"] {
        w.set_family(v, 2);
    }
    w.set_family("l", 1);
    w.set_family("k", 1);
    w
}

#[test]
fn criterion_1_worked_word() {
    let t = Instant::now();
    let w3 = omega3();
    let trivial = trace_trivial(&w3);
    let without = trace_trivial(&TraceWord::parse(&w3.to_string(), &[]).unwrap());
    let mut w2 = TraceWord::parse("D D^-1 D D^-1", &[]).unwrap();
    w2.set_family("D", 2);
    let r = RefinementCorrespondence::new(vec![(0, 1), (3, 5), (7, 9), (11, 12)], vec![]);
    let scheme = coherent_scheme(&[w2.clone(), w3.clone()], std::slice::from_ref(&r), DEFAULT_CAP).unwrap();
    let separate = CancellationDiagram::new([(0, 1), (2, 3)]);
    let nested = CancellationDiagram::new([(0, 3), (1, 2)]);
    let induced = induce_diagram(&w2, &w3, &scheme.diagrams[1], &r, 10).unwrap();
    let verified = verify_scheme(&[w2, w3], &[r], &scheme).unwrap();
    let elapsed = t.elapsed();
    let ok = trivial
        && !without
        && scheme.diagrams[0] == separate
        && induced == vec![separate.clone()]
        && !induced.contains(&nested)
        && verified
        && elapsed < Duration::from_secs(1);
    report(
        1,
        "worked word reduction",
        ok,
        &format!(
            "trace-trivial {trivial} (without the commutation {without}); induced level-2 diagram {}; {elapsed:?}",
            scheme.diagrams[0]
        ),
    );
    assert!(ok);
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn random_trace_word(rng: &mut ChaCha8Rng, subset: usize) -> TraceWord {
    let commute: Vec<(&str, &str)> =
        PAIRS.iter().enumerate().filter(|(k, _)| subset >> k & 1 == 1).map(|(_, &(a, b))| (NAMES[a], NAMES[b])).collect();
    let mut letters: Vec<(usize, i8)> = Vec::new();
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(0..=10);
        for _ in 0..n {
            letters.push((rng.gen_range(0..4), if rng.gen_bool(0.5) { 1 } else { -1 }));
        }
    } else {
        // a trivial word, scrambled by commuting swaps
        let pairs = rng.gen_range(0..=5);
        for _ in 0..pairs {
            let at = rng.gen_range(0..=letters.len());
            let (s, e) = (rng.gen_range(0..4), if rng.gen_bool(0.5) { 1 } else { -1 });
            letters.splice(at..at, [(s, e), (s, -e)]);
        }
        for _ in 0..20 {
            if letters.len() < 2 {
                break;
            }
            let k = rng.gen_range(0..letters.len() - 1);
            let (a, b) = (letters[k].0, letters[k + 1].0);
            let (lo, hi) = (a.min(b), a.max(b));
            if a != b && commute.contains(&(NAMES[lo], NAMES[hi])) {
                letters.swap(k, k + 1);
            }
        }
        if rng.gen_bool(0.3) && !letters.is_empty() {
            let k = rng.gen_range(0..letters.len());
            letters[k].1 = -letters[k].1;
        }
    }
    let text: Vec<String> =
        letters.iter().map(|&(s, e)| if e > 0 { NAMES[s].to_string() } else { format!("{}^-1", NAMES[s]) }).collect();
    TraceWord::parse(&text.join(" "), &commute).unwrap()
}

#[test]
fn criterion_2_oracle_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let total = 10_000;
    let (mut agree, mut trivial) = (0, 0);
    let mut first_bad = None;
    for k in 0..total {
        let w = random_trace_word(&mut rng, k % 64);
        let (fast, slow) = (trace_trivial(&w), move_search_trivial(&w));
        if fast == slow {
            agree += 1;
        } else if first_bad.is_none() {
            first_bad = Some(format!("{w} with {:?}", w.commuting_pairs()));
        }
        trivial += usize::from(slow);
    }
    let elapsed = t.elapsed();
    let ok = agree == total && elapsed < Duration::from_secs(60);
    report(
        2,
        "oracle equivalence",
        ok,
        &format!("{agree}/{total} agree ({trivial} trivial), all 64 commutation subsets, {elapsed:?}; first mismatch {first_bad:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_3_nontriviality() {
    let seq = DefiningSequence::full_carpet(3).unwrap();
    let lp = central_ring(3);
    let t = Instant::now();
    let cert = decide(&lp, &seq, 3, DecideOptions::default()).unwrap();
    let t_ring = t.elapsed();
    let g = FreeWord(vec![FreeLetter::new(GridSquare::new(1, 1, 1), 1)]);
    let ring_ok = cert.verdict == Verdict::Nontrivial { level: 1, witness: g } && t_ring < Duration::from_secs(1);

    let (seq, lp) = commutator_fixture();
    let t = Instant::now();
    let cert2 = decide(&lp, &seq, 2, DecideOptions::default()).unwrap();
    let t_comm = t.elapsed();
    let (g1, g2) = (GridSquare::new(1, 1, 1), GridSquare::new(2, 1, 1));
    let commutator = vec![FreeLetter::new(g1, 1), FreeLetter::new(g2, 1), FreeLetter::new(g1, -1), FreeLetter::new(g2, -1)];
    let winding_zero = winding_vector(&lp, &seq, 2).unwrap().values().all(|&v| v == 0);
    let comm_ok = match &cert2.verdict {
        Verdict::Nontrivial { level: 2, witness } => {
            let core = cyclic_reduce(witness).0;
            witness.len() >= 4 && cyclic_eq(&core, &commutator)
        }
        _ => false,
    } && winding_zero
        && t_comm < Duration::from_secs(1);
    let ok = ring_ok && comm_ok;
    report(
        3,
        "nontriviality detection",
        ok,
        &format!(
            "central ring -> {} ({t_ring:?}); commutator -> {} with zero winding {winding_zero} ({t_comm:?})",
            cert.verdict, cert2.verdict
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_thread_compatibility() {
    let seq = DefiningSequence::full_carpet(4).unwrap();
    let mut failures = Vec::new();
    let mut nontrivial = 0;
    let total = 120u64;
    for seed in 0..total {
        let lp = if seed % 2 == 0 {
            random_loop_with(&seq, 4, seed, 40)
        } else {
            random_trivial_loop(&seq, 4, seed, 40)
        };
        let free: Vec<FreeWord> = (1..=4).map(|i| puncture_word(&lp, &seq, i).unwrap()).collect();
        nontrivial += usize::from(!free[3].is_empty());
        for i in 1..=4u32 {
            let k = i as usize - 1;
            let word = encode_word(&lp, &seq, i).unwrap();
            if i < 4 && bonding_map(&free[k + 1], i) != free[k] {
                let detail = format!("bonding map of level {} image is not the level {i} image", i + 1);
                failures.push(dump(&seq, &lp, i, &free[k], &word, detail));
            }
            if trace_trivial(&TraceWord::from_cyclic(&word)) != free[k].is_empty() {
                let detail = format!("trace triviality differs from free word {}", free[k]);
                failures.push(dump(&seq, &lp, i, &free[k], &word, detail));
            }
        }
    }
    let ok = failures.is_empty();
    report(
        4,
        "thread compatibility",
        ok,
        &format!("{total} loops in the depth-4 carpet ({nontrivial} nontrivial), {} mismatches {failures:?}", failures.len()),
    );
    assert!(ok);
}

#[test]
fn criterion_5_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let total = 240;
    let mut good = 0;
    let mut bad = Vec::new();
    for k in 0..total {
        let level = (k % 3) as u32 + 1;
        let seq = if k % 2 == 0 {
            DefiningSequence::full_carpet(3).unwrap()
        } else {
            random_sequence(3, k as u64, 0.3)
        };
        let walk = random_walk(&seq, level, rng.gen_range(2..20), &mut rng);
        let table = LevelCorridors::new(&seq, level).unwrap();
        let Some(word) = walk_symbols(&table, &walk) else {
            bad.push(format!("walk {k} left the junction graph"));
            continue;
        };
        let lp = realize_symbols(&seq, level, &word, walk[0]).unwrap();
        let back = encode_word(&lp, &seq, level).unwrap().symbols();
        if cyclic_eq(&back, &word) {
            good += 1;
        } else {
            bad.push(format!("case {k} at level {level}"));
        }
    }
    let ok = good == total;
    report(5, "round-trip encoding", ok, &format!("{good}/{total} words at levels 1..=3 round-trip; failures {bad:?}"));
    assert!(ok);
}

fn scheme_homotopies(seq: &DefiningSequence, lp: &PolyLoop, depth: u32) -> Result<Vec<LevelHomotopy>, String> {
    let words: Vec<CyclicWord> = (1..=depth).map(|i| encode_word(lp, seq, i).unwrap()).collect();
    let refs: Vec<RefinementCorrespondence> = (1..depth).map(|i| refinement_map(lp, seq, i).unwrap()).collect();
    let traces: Vec<TraceWord> = words.iter().map(TraceWord::from_cyclic).collect();
    let scheme = coherent_scheme(&traces, &refs, DEFAULT_CAP).map_err(|e| e.to_string())?;
    scheme
        .diagrams
        .iter()
        .enumerate()
        .map(|(k, d)| build_homotopy(lp, seq, k as u32 + 1, d).map_err(|e| e.to_string()))
        .collect()
}

#[test]
fn criterion_6_convergence() {
    let t = Instant::now();
    let seq = DefiningSequence::full_carpet(4).unwrap();
    let (mut loops, mut gaps, mut worst) = (0, 0, 0.0f64);
    let mut violations = Vec::new();
    let mut seed = 0u64;
    while loops < 24 {
        let lp = random_trivial_loop(&seq, 4, seed, 50);
        seed += 1;
        if encode_word(&lp, &seq, 4).unwrap().is_empty() {
            continue;
        }
        loops += 1;
        let hs = match scheme_homotopies(&seq, &lp, 4) {
            Ok(hs) => hs,
            Err(e) => {
                violations.push(format!("seed {}: {e}", seed - 1));
                continue;
            }
        };
        for h in &hs {
            let exact = certify_containment(h, &seq, h.level).unwrap();
            let sampled = verify_containment(h, &seq, h.level, 3).unwrap();
            if !exact.is_clean() || !sampled.is_clean() {
                violations.push(format!("seed {}: containment at level {}", seed - 1, h.level));
            }
        }
        for w in hs.windows(2) {
            let g = convergence_gap(&w[0], &w[1], 1).unwrap();
            gaps += 1;
            worst = worst.max((g.max_sq.to_f64() / g.bound_sq.to_f64()).sqrt());
            if !g.holds {
                violations.push(format!("seed {}: gap {} > bound at level {}", seed - 1, g.max_sq, g.level));
            }
        }
    }
    let elapsed = t.elapsed();
    let ok = violations.is_empty() && elapsed < Duration::from_secs(120);
    report(
        6,
        "convergence bound",
        ok,
        &format!(
            "{loops} loops, {gaps} consecutive pairs; exact supremum over the whole disk, worst gap {worst:.3} of 6/3^i; {elapsed:?}; violations {violations:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_structural_invariants() {
    let (mut loops, mut homotopies, mut diagrams, mut crossings) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for seed in 0..220u64 {
        let depth = (seed % 3) as u32 + 2;
        let seq = if seed % 4 == 0 { DefiningSequence::full_carpet(depth).unwrap() } else { random_sequence(depth, seed, 0.3) };
        let lp = if seed % 2 == 0 {
            random_trivial_loop(&seq, depth, seed, 30)
        } else {
            random_loop_with(&seq, depth, seed, 30)
        };
        loops += 1;
        let words: Vec<CyclicWord> = (1..=depth).map(|i| encode_word(&lp, &seq, i).unwrap()).collect();
        for i in 1..depth {
            if let Err(e) = refine(&words[i as usize - 1], &words[i as usize]) {
                failures.push(format!("seed {seed}: {e}"));
            }
        }
        for (k, word) in words.iter().enumerate() {
            let level = k as u32 + 1;
            let trace = TraceWord::from_cyclic(word);
            let all = match enumerate_diagrams(&trace, 64) {
                Ok(ds) => ds,
                Err(TraceError::CapExceeded { partial, .. }) => partial,
                Err(e) => {
                    failures.push(format!("seed {seed}: {e}"));
                    continue;
                }
            };
            for (j, d) in all.iter().enumerate() {
                diagrams += 1;
                let cel = match build_cellulation(word, d) {
                    Ok(c) => c,
                    Err(e) => {
                        failures.push(format!("seed {seed} level {level}: {e}"));
                        continue;
                    }
                };
                for x in &cel.crossings {
                    crossings += 1;
                    let (a, b) = (&cel.chords[x.chords.0], &cel.chords[x.chords.1]);
                    let (ca, cb) = (cel.bands[a.band].corridor, cel.bands[b.band].corridor);
                    if !word.commute(&ca, &cb) {
                        failures.push(format!("seed {seed} level {level}: bands of {ca} and {cb} cross"));
                    }
                }
                if j < 2 {
                    let h = build_homotopy(&lp, &seq, level, d).unwrap();
                    homotopies += 1;
                    if !certify_containment(&h, &seq, level).unwrap().is_clean() {
                        failures.push(format!("seed {seed} level {level}: containment"));
                    }
                }
            }
        }
    }
    let ok = failures.is_empty();
    report(
        7,
        "structural invariants",
        ok,
        &format!(
            "{loops} loops refine consistently; {diagrams} diagrams with {crossings} chord crossings, all between commuting corridors; {homotopies} homotopies contained; failures {failures:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_performance() {
    let seq = DefiningSequence::full_carpet(5).unwrap();
    let (mut worst_decide, mut worst_check) = (Duration::ZERO, Duration::ZERO);
    let mut classes = Vec::new();
    let mut all_ok = true;
    for seed in 0..6u64 {
        let lp = loop_with_vertices(&seq, 5, seed, 200, seed % 2 == 0);
        assert_eq!(lp.len(), 200);
        let t = Instant::now();
        let cert = decide(&lp, &seq, 5, DecideOptions::default()).unwrap();
        worst_decide = worst_decide.max(t.elapsed());
        let t = Instant::now();
        all_ok &= check_certificate(&cert, &seq, &lp).ok;
        worst_check = worst_check.max(t.elapsed());
        classes.push(cert.verdict.class());
    }
    let ok = all_ok && worst_decide < Duration::from_secs(1) && worst_check < Duration::from_millis(100);
    report(
        8,
        "performance",
        ok,
        &format!("depth-5 carpet, 200-vertex loops {classes:?}: worst decide {worst_decide:?}, worst check {worst_check:?}"),
    );
    assert!(ok);
}
