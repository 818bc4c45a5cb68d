//! Fixture loops and seeded random loop generators.
//!
//! Loops are built from closed walks on the junction cells (both indices even)
//! of a level grid. A step between neighbouring junctions crosses exactly one
//! corridor, so the walk fixes the level word; jitter places the vertices at
//! random rational points of the visited cells.

use std::collections::{HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::free_group::ray_crossings;
use crate::grid_geometry::{validate_loop, DefiningSequence, GridSquare, PolyLoop};
use crate::rational::{pow3, Point, Rational};
use crate::word_encoding::{walk_loop, Junction};

/// Denominator used for jittered coordinates inside a cell.
const JITTER: i64 = 97;

/// Counter-clockwise rectangle walk through the junctions `(c0, r0)` and `(c1, r1)`.
pub fn ring_walk(c0: i64, r0: i64, c1: i64, r1: i64) -> Vec<Junction> {
    let mut w = Vec::new();
    let mut c = c0;
    while c < c1 {
        w.push((c, r0));
        c += 2;
    }
    let mut r = r0;
    while r < r1 {
        w.push((c1, r));
        r += 2;
    }
    while c > c0 {
        w.push((c, r1));
        c -= 2;
    }
    while r > r0 {
        w.push((c0, r));
        r -= 2;
    }
    w
}

/// Junction ring hugging a hole on the grid of `level >= hole.level`.
pub fn hole_ring(hole: &GridSquare, level: u32) -> Vec<Junction> {
    let ((t0, t1), (u0, u1)) = hole.cell_span(level);
    ring_walk(t0 - 1, u0 - 1, t1, u1)
}

/// The closed walk traversed backwards from the same base junction.
pub fn reverse_walk(walk: &[Junction]) -> Vec<Junction> {
    let mut out = walk.to_vec();
    if out.len() > 1 {
        out[1..].reverse();
    }
    out
}

/// Counter-clockwise ring around the central hole, valid in every level space up to `level`.
pub fn central_ring(level: u32) -> PolyLoop {
    walk_loop(level, &hole_ring(&GridSquare::new(1, 1, 1), level))
}

/// Explicit depth-2 space with holes `[1,1,1]` and `[2,1,1]`, and the commutator
/// `l₁ l₂ l₁⁻¹ l₂⁻¹` of counter-clockwise rings around them based at junction `(2,2)`.
pub fn commutator_fixture() -> (DefiningSequence, PolyLoop) {
    let seq = DefiningSequence::explicit(2, [GridSquare::new(1, 1, 1), GridSquare::new(2, 1, 1)])
        .expect("fixture holes are eligible");
    let l1 = ring_walk(2, 2, 6, 6);
    let l2 = vec![(2, 2), (0, 2), (0, 0), (2, 0)];
    let mut walk = l1.clone();
    walk.extend(&l2);
    walk.extend(reverse_walk(&l1));
    walk.extend(reverse_walk(&l2));
    (seq, walk_loop(2, &walk))
}

/// Seeded explicit sequence keeping each eligible square with probability `density`.
pub fn random_sequence(depth: u32, seed: u64, density: f64) -> DefiningSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = DefiningSequence::full_carpet(depth.min(crate::grid_geometry::MAX_FULL_CARPET_DEPTH))
        .expect("depth within the procedural range");
    let kept: Vec<GridSquare> = full.removed().iter().copied().filter(|_| rng.gen_bool(density)).collect();
    DefiningSequence::explicit(depth, kept).expect("eligible squares")
}

fn junction_ok(seq: &DefiningSequence, level: u32, j: Junction) -> bool {
    seq.cell_in_space(level, j.0, j.1)
}

/// Junctions reachable in one step, in a fixed order.
pub fn junction_neighbors(seq: &DefiningSequence, level: u32, j: Junction) -> Vec<Junction> {
    [(2, 0), (0, 2), (-2, 0), (0, -2)]
        .iter()
        .filter_map(|&(dx, dy)| {
            let next = (j.0 + dx, j.1 + dy);
            let cell = (j.0 + dx / 2, j.1 + dy / 2);
            (junction_ok(seq, level, next) && seq.cell_in_space(level, cell.0, cell.1)).then_some(next)
        })
        .collect()
}

fn all_junctions(seq: &DefiningSequence, level: u32) -> Vec<Junction> {
    let n = pow3(level);
    (0..n)
        .step_by(2)
        .flat_map(|a| (0..n).step_by(2).map(move |b| (a, b)))
        .filter(|&j| junction_ok(seq, level, j))
        .collect()
}

/// Shortest junction path from `a` to `b`, excluding `b`.
fn path_between(seq: &DefiningSequence, level: u32, a: Junction, b: Junction) -> Vec<Junction> {
    let mut prev: HashMap<Junction, Junction> = HashMap::new();
    let mut queue = VecDeque::from([a]);
    prev.insert(a, a);
    while let Some(j) = queue.pop_front() {
        if j == b {
            break;
        }
        for n in junction_neighbors(seq, level, j) {
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(n) {
                e.insert(j);
                queue.push_back(n);
            }
        }
    }
    let mut path = Vec::new();
    let mut j = b;
    while j != a {
        j = prev[&j];
        path.push(j);
    }
    path.reverse();
    path
}

/// Random closed walk: a free random walk, closed by a shortest path home,
/// optionally wrapped around a random hole.
pub fn random_walk<R: Rng>(seq: &DefiningSequence, level: u32, steps: usize, rng: &mut R) -> Vec<Junction> {
    let junctions = all_junctions(seq, level);
    let start = *junctions.choose(rng).expect("level space has junctions");
    let mut walk = vec![start];
    let mut j = start;
    for _ in 0..steps {
        let ns = junction_neighbors(seq, level, j);
        j = *ns.choose(rng).expect("junction graph has no isolated vertices");
        walk.push(j);
    }
    let holes: Vec<&GridSquare> = seq.holes_up_to(level).collect();
    if !holes.is_empty() && rng.gen_bool(0.5) {
        let ring = hole_ring(holes.choose(rng).unwrap(), level);
        let ring = if rng.gen_bool(0.5) { ring } else { reverse_walk(&ring) };
        walk.extend(path_between(seq, level, j, ring[0]).into_iter().skip(1));
        for &r in ring.iter().chain(std::iter::once(&ring[0])) {
            if walk.last() != Some(&r) {
                walk.push(r);
            }
        }
        j = ring[0];
    }
    walk.extend(path_between(seq, level, j, start).into_iter().skip(1));
    if walk.len() > 1 && walk.last() == Some(&start) {
        walk.pop();
    }
    walk
}

/// Random tree-like closed walk: every step is eventually retraced, so the
/// resulting loop is null-homotopic in every level space.
pub fn random_tree_walk<R: Rng>(seq: &DefiningSequence, level: u32, steps: usize, rng: &mut R) -> Vec<Junction> {
    let junctions = all_junctions(seq, level);
    let start = *junctions.choose(rng).expect("level space has junctions");
    let mut stack = vec![start];
    let mut walk = vec![start];
    for _ in 0..steps {
        let top = *stack.last().unwrap();
        if stack.len() > 1 && rng.gen_bool(0.4) {
            stack.pop();
            walk.push(*stack.last().unwrap());
        } else {
            let n = *junction_neighbors(seq, level, top).choose(rng).unwrap();
            stack.push(n);
            walk.push(n);
        }
    }
    while stack.len() > 1 {
        stack.pop();
        walk.push(*stack.last().unwrap());
    }
    walk.pop();
    walk
}

fn jitter_point<R: Rng>(level: u32, cell: (i64, i64), rng: &mut R) -> Point {
    let n = pow3(level);
    let mut coord = |t: i64| Rational::new(t * JITTER + rng.gen_range(1..JITTER), n * JITTER);
    let x = coord(cell.0);
    let y = coord(cell.1);
    Point::new(x, y)
}

/// Places a random point in every visited junction cell; sometimes dips into a
/// neighbouring cell and returns without crossing it.
pub fn jittered_loop<R: Rng>(seq: &DefiningSequence, level: u32, walk: &[Junction], rng: &mut R) -> PolyLoop {
    if walk.len() <= 1 {
        let j = walk.first().copied().unwrap_or((0, 0));
        let mut v = vec![jitter_point(level, j, rng), jitter_point(level, j, rng), jitter_point(level, j, rng)];
        v.dedup();
        return if v.len() == 3 { PolyLoop::new(v) } else { walk_loop(level, &[j]) };
    }
    let n = pow3(level);
    let mut v: Vec<Point> = Vec::with_capacity(walk.len() * 2);
    for &j in walk {
        v.push(jitter_point(level, j, rng));
        if rng.gen_bool(0.2) {
            let (dx, dy) = *[(1, 0), (0, 1), (-1, 0), (0, -1)].choose(rng).unwrap();
            let dip = (j.0 + dx, j.1 + dy);
            if dip.0 >= 0 && dip.1 >= 0 && dip.0 < n && dip.1 < n && seq.cell_in_space(level, dip.0, dip.1) {
                v.push(jitter_point(level, dip, rng));
                v.push(jitter_point(level, j, rng));
            }
        }
    }
    PolyLoop::new(v)
}

fn accept(seq: &DefiningSequence, level: u32, lp: &PolyLoop) -> bool {
    validate_loop(lp, seq, level).is_ok() && ray_crossings(lp, seq, level).is_ok()
}

fn retry(
    seq: &DefiningSequence,
    level: u32,
    seed: u64,
    mut make: impl FnMut(&mut ChaCha8Rng) -> Vec<Junction>,
) -> PolyLoop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let walk = make(&mut rng);
        let lp = jittered_loop(seq, level, &walk, &mut rng);
        if accept(seq, level, &lp) {
            return lp;
        }
    }
    let walk = make(&mut rng);
    walk_loop(level, &walk)
}

/// A random valid loop at `level` (general homotopy class).
pub fn random_loop(seq: &DefiningSequence, level: u32, seed: u64) -> PolyLoop {
    random_loop_with(seq, level, seed, 24)
}

pub fn random_loop_with(seq: &DefiningSequence, level: u32, seed: u64, steps: usize) -> PolyLoop {
    retry(seq, level, seed, |rng| random_walk(seq, level, steps, rng))
}

/// A random valid loop at `level` that is null-homotopic in every level space.
pub fn random_trivial_loop(seq: &DefiningSequence, level: u32, seed: u64, steps: usize) -> PolyLoop {
    retry(seq, level, seed, |rng| random_tree_walk(seq, level, steps, rng))
}

/// A random valid loop with exactly `vertices` vertices, trivial in every
/// level space when `trivial` is set. Long edges are subdivided to pad.
pub fn loop_with_vertices(seq: &DefiningSequence, level: u32, seed: u64, vertices: usize, trivial: bool) -> PolyLoop {
    let mut steps = vertices.max(6) / 2;
    let mut attempt = 0u64;
    let mut lp = loop {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let lp = if trivial { random_trivial_loop(seq, level, s, steps) } else { random_loop_with(seq, level, s, steps) };
        attempt += 1;
        if lp.len() <= vertices && accept(seq, level, &lp) {
            break lp;
        }
        steps = (steps * 9 / 10).max(1);
    };
    let fractions = [(37, 97), (41, 89), (29, 83), (53, 101), (17, 43)];
    while lp.len() < vertices {
        let n = lp.len();
        let j = (0..n).max_by_key(|&j| {
            let (a, b) = lp.edge(j);
            (a.dist2(b), std::cmp::Reverse(j))
        });
        let j = j.expect("loop has edges");
        let (a, b) = lp.edge(j);
        let (a, b) = (a.clone(), b.clone());
        let mut placed = false;
        for &(p, q) in &fractions {
            let mut v = lp.vertices.clone();
            v.insert(j + 1, a.lerp(&b, &Rational::new(p, q)));
            let cand = PolyLoop::new(v);
            if accept(seq, level, &cand) {
                lp = cand;
                placed = true;
                break;
            }
        }
        assert!(placed, "no admissible subdivision point on edge {j}");
    }
    lp
}
