//! Level homotopies from cancellation diagrams.
//!
//! The disk is modelled as a convex polygon whose vertices are the boundary
//! parameters in increasing order, the `k`-th placed at the integer point
//! `(k, k²)`. Every matched letter pair becomes a band bounded by two straight
//! chords; band chords carry the constant transverse coordinate of their
//! corridor's boundary lines. The arrangement of chords cuts the disk into
//! convex faces, each mapped into a target region of the level space by a fan
//! of affine triangles around its centroid.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::grid_geometry::{
    level_space_contains, segment_meets_interior, CorridorId, DefiningSequence, GeometryError, GridSquare,
    Orientation, PolyLoop,
};
use crate::rational::{orient, pow3, Point, Rational};
use crate::trace_calculus::{diagram_valid, CancellationDiagram, TraceError, TraceWord};
use crate::word_encoding::{encode_word, CyclicWord, EncodingError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomotopyError {
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("chords of bands {0} and {1} cross but their corridors do not")]
    ChordCrossing(usize, usize),
    #[error("no admissible target region for face {face}")]
    AssignmentFailure { face: usize },
    #[error("incompatible homotopies: {0}")]
    IncompatibleHomotopies(String),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<TraceError> for HomotopyError {
    fn from(e: TraceError) -> Self {
        HomotopyError::MalformedDiagram(e.to_string())
    }
}

/// Type of a grid cell: how many corridors contain it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SquareType {
    pub cell: (i64, i64),
    pub kind: u8,
}

/// Types of all level-`i` cells of the level space, row by row.
pub fn classify_squares(seq: &DefiningSequence, i: u32) -> Result<Vec<SquareType>, GeometryError> {
    seq.check_level(i)?;
    let n = pow3(i);
    let mut out = Vec::new();
    for u in 0..n {
        for t in 0..n {
            if seq.cell_in_space(i, t, u) {
                out.push(SquareType { cell: (t, u), kind: (t % 2 + u % 2) as u8 });
            }
        }
    }
    Ok(out)
}

fn slot(k: usize) -> Point {
    let k = k as i64;
    Point::new(Rational::from_integer(k), Rational::from_integer(k * k))
}

/// A chord between two boundary vertices, mapped onto one boundary line of a corridor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chord {
    pub band: usize,
    pub ends: (usize, usize),
    pub orientation: Orientation,
    /// Constant `y` (horizontal) or `x` (vertical) coordinate along the chord.
    pub line: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Band {
    /// Matched letter positions.
    pub letters: (usize, usize),
    #[serde(serialize_with = "ser_display")]
    pub corridor: CorridorId,
    pub chords: [usize; 2],
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub chords: (usize, usize),
    pub vertex: usize,
}

/// A convex face of the arrangement, counter-clockwise, with the bands containing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub bands: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cellulation {
    /// Boundary parameters in increasing order; vertex `k < params.len()` sits at `params[k]`.
    pub params: Vec<Rational>,
    pub points: Vec<Point>,
    pub chords: Vec<Chord>,
    pub bands: Vec<Band>,
    pub crossings: Vec<Crossing>,
    pub faces: Vec<Face>,
}

impl Cellulation {
    pub fn boundary_len(&self) -> usize {
        self.params.len()
    }

    /// Position of the boundary point with parameter `t`.
    pub fn boundary_point(&self, t: &Rational) -> Point {
        let m = self.params.len();
        let t = wrap(t);
        let k = match self.params.binary_search(&t) {
            Ok(k) => return self.points[k].clone(),
            Err(0) => m - 1,
            Err(k) => k - 1,
        };
        let (t0, mut t1) = (self.params[k].clone(), self.params[(k + 1) % m].clone());
        let mut tt = t;
        if k + 1 == m {
            t1 = &t1 + &Rational::one();
            if tt < t0 {
                tt = &tt + &Rational::one();
            }
        }
        let s = &(&tt - &t0) / &(&t1 - &t0);
        self.points[k].lerp(&self.points[(k + 1) % m], &s)
    }

    /// Whether two chords cross in the interior.
    pub fn chords_cross(&self, a: usize, b: usize) -> bool {
        interleave(self.chords[a].ends, self.chords[b].ends)
    }
}

fn wrap(t: &Rational) -> Rational {
    let f = Rational::from_integer(t.floor());
    t - &f
}

fn interleave(a: (usize, usize), b: (usize, usize)) -> bool {
    let (a0, a1) = (a.0.min(a.1), a.0.max(a.1));
    let inside = |x: usize| a0 < x && x < a1;
    let shared = [a0, a1].contains(&b.0) || [a0, a1].contains(&b.1);
    !shared && inside(b.0) != inside(b.1)
}

/// Band lines of a corridor: `(entry line for a positive crossing, the other)`.
fn corridor_lines(id: &CorridorId) -> (Rational, Rational) {
    let n = pow3(id.level);
    (Rational::new(2 * id.stratum - 1, n), Rational::new(2 * id.stratum, n))
}

fn line_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Point {
    let r = b.sub(a);
    let s = d.sub(c);
    let t = &c.sub(a).cross(&s) / &r.cross(&s);
    a.lerp(b, &t)
}

fn direction_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    let zero = Rational::zero();
    let half = |d: &Point| if d.y > zero || (d.y == zero && d.x > zero) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| zero.cmp(&a.cross(b)))
}

/// Bands for a diagram of `word`, on the boundary parameters of its letters.
pub fn build_cellulation(word: &CyclicWord, d: &CancellationDiagram) -> Result<Cellulation, HomotopyError> {
    build_cellulation_on(word, d, &[])
}

/// As [`build_cellulation`], with extra boundary vertices at the parameters `extra`.
pub fn build_cellulation_on(
    word: &CyclicWord,
    d: &CancellationDiagram,
    extra: &[Rational],
) -> Result<Cellulation, HomotopyError> {
    let n = word.len();
    let partner = d.partner_table(n)?;
    if let Some(p) = partner.iter().position(|&q| q == usize::MAX) {
        return Err(HomotopyError::MalformedDiagram(format!("letter {p} is unmatched")));
    }
    for &(a, b) in &d.pairs {
        if word.letters[a].symbol() != word.letters[b].symbol().inverse() {
            return Err(HomotopyError::MalformedDiagram(format!("letters {a} and {b} are not inverse")));
        }
    }
    let mut set: BTreeSet<Rational> = extra.iter().map(wrap).collect();
    for k in 0..3 {
        set.insert(Rational::new(k, 3));
    }
    for l in &word.letters {
        set.insert(l.source.start.clone());
        set.insert(l.source.end.clone());
    }
    let params: Vec<Rational> = set.into_iter().collect();
    let index: HashMap<&Rational, usize> = params.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let mut points: Vec<Point> = (0..params.len()).map(slot).collect();

    let mut chords = Vec::new();
    let mut bands = Vec::new();
    for &(p, q) in &d.pairs {
        let (l, m) = (&word.letters[p], &word.letters[q]);
        let (lo, hi) = corridor_lines(&l.corridor);
        let (entry, exit) = if l.sign > 0 { (lo, hi) } else { (hi, lo) };
        let b = bands.len();
        let o = l.corridor.orientation;
        chords.push(Chord { band: b, ends: (index[&l.source.start], index[&m.source.end]), orientation: o, line: entry });
        chords.push(Chord { band: b, ends: (index[&l.source.end], index[&m.source.start]), orientation: o, line: exit });
        bands.push(Band { letters: (p, q), corridor: l.corridor, chords: [2 * b, 2 * b + 1] });
    }

    let mut crossings = Vec::new();
    let mut on_chord: Vec<Vec<usize>> = chords.iter().map(|c| vec![c.ends.0, c.ends.1]).collect();
    let mut at: HashMap<Point, usize> = HashMap::new();
    for a in 0..chords.len() {
        for b in a + 1..chords.len() {
            let (ca, cb) = (&chords[a], &chords[b]);
            if ca.band == cb.band || !interleave(ca.ends, cb.ends) {
                continue;
            }
            let (ia, ib) = (&bands[ca.band].corridor, &bands[cb.band].corridor);
            if ca.orientation == cb.orientation || !word.commute(ia, ib) {
                return Err(HomotopyError::ChordCrossing(ca.band, cb.band));
            }
            let x = line_intersection(&points[ca.ends.0], &points[ca.ends.1], &points[cb.ends.0], &points[cb.ends.1]);
            let v = *at.entry(x.clone()).or_insert_with(|| {
                points.push(x);
                points.len() - 1
            });
            on_chord[a].push(v);
            on_chord[b].push(v);
            crossings.push(Crossing { chords: (a, b), vertex: v });
        }
    }

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let m = params.len();
    for k in 0..m {
        let (u, v) = (k, (k + 1) % m);
        edges.insert((u.min(v), u.max(v)));
    }
    for list in &mut on_chord {
        let start = points[list[0]].clone();
        list.sort_by(|&u, &v| points[u].dist2(&start).cmp(&points[v].dist2(&start)));
        list.dedup();
        for w in list.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let faces = trace_faces(&points, &edges)
        .into_iter()
        .map(|vertices| {
            let c = centroid(&vertices.iter().map(|&v| points[v].clone()).collect::<Vec<_>>());
            let inside = (0..bands.len())
                .filter(|&b| {
                    let [c0, c1] = bands[b].chords;
                    let side = |ch: &Chord, other: &Chord| {
                        let (a, bb) = (&points[ch.ends.0], &points[ch.ends.1]);
                        orient(a, bb, &c) == orient(a, bb, &points[other.ends.0])
                    };
                    side(&chords[c0], &chords[c1]) && side(&chords[c1], &chords[c0])
                })
                .collect();
            Face { vertices, bands: inside }
        })
        .collect();
    Ok(Cellulation { params, points, chords, bands, crossings, faces })
}

fn centroid(pts: &[Point]) -> Point {
    let n = Rational::from_integer(pts.len() as i64);
    let sx: Rational = pts.iter().map(|p| p.x.clone()).sum();
    let sy: Rational = pts.iter().map(|p| p.y.clone()).sum();
    Point::new(&sx / &n, &sy / &n)
}

/// Bounded faces of a planar straight-line graph, counter-clockwise.
fn trace_faces(points: &[Point], edges: &BTreeSet<(usize, usize)>) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for (v, list) in adj.iter_mut().enumerate() {
        list.sort_by(|&a, &b| direction_cmp(&points[a].sub(&points[v]), &points[b].sub(&points[v])));
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut faces = Vec::new();
    for &(u0, v0) in edges {
        for start in [(u0, v0), (v0, u0)] {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            loop {
                seen.insert(cur);
                cycle.push(cur.0);
                let (a, b) = cur;
                let list = &adj[b];
                let idx = list.iter().position(|&x| x == a).expect("edge is symmetric");
                let c = list[(idx + list.len() - 1) % list.len()];
                cur = (b, c);
                if cur == start {
                    break;
                }
            }
            let area: Rational = (0..cycle.len())
                .map(|k| points[cycle[k]].cross(&points[cycle[(k + 1) % cycle.len()]]))
                .sum();
            if area > Rational::zero() {
                faces.push(cycle);
            }
        }
    }
    faces.sort_by_key(|f| {
        let k = (0..f.len()).min_by_key(|&k| f[k]).unwrap_or(0);
        let mut r = f.clone();
        r.rotate_left(k);
        r
    });
    faces
        .into_iter()
        .map(|mut f| {
            let k = (0..f.len()).min_by_key(|&k| f[k]).unwrap_or(0);
            f.rotate_left(k);
            f
        })
        .collect()
}

/// Where a face is mapped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TargetRegion {
    /// A rectangle of level cells, all in the level space.
    Cells { t0: i64, t1: i64, u0: i64, u1: i64 },
    /// The cells of the 3x3 block around a junction cell that lie in the level
    /// space; star-shaped about the junction cell.
    Junction { t: i64, u: i64 },
}

impl TargetRegion {
    pub fn cell_count(&self) -> i64 {
        match self {
            TargetRegion::Cells { t0, t1, u0, u1 } => (t1 - t0 + 1) * (u1 - u0 + 1),
            TargetRegion::Junction { .. } => 9,
        }
    }
}

fn covering(lo: &Rational, hi: &Rational, n: i64) -> Vec<(i64, i64)> {
    let scale = Rational::from_integer(n);
    let t0 = (lo * &scale).floor();
    let t1 = (hi * &scale).ceil() - 1;
    if t0 <= t1 {
        vec![(t0, t1)]
    } else {
        vec![(t1, t1), (t0, t0)]
    }
}

fn hole_of_cell(seq: &DefiningSequence, i: u32, t: i64, u: i64) -> Option<GridSquare> {
    (1..=i).find_map(|s| {
        let f = pow3(i - s);
        let (ts, us) = (t / f, u / f);
        let sq = GridSquare::new(s, (ts + 1) / 2, (us + 1) / 2);
        (ts % 2 == 1 && us % 2 == 1 && seq.is_removed(&sq)).then_some(sq)
    })
}

fn clamp(v: &Rational, lo: Rational, hi: Rational) -> Rational {
    v.clone().max(lo).min(hi)
}

/// The smallest admissible region for a face with boundary values `vals`, and
/// the value of the fan apex.
fn fit_region(seq: &DefiningSequence, i: u32, vals: &[Point]) -> Option<(TargetRegion, Point)> {
    let n = pow3(i);
    let xmin = vals.iter().map(|p| p.x.clone()).min()?;
    let xmax = vals.iter().map(|p| p.x.clone()).max()?;
    let ymin = vals.iter().map(|p| p.y.clone()).min()?;
    let ymax = vals.iter().map(|p| p.y.clone()).max()?;
    let avg = centroid(vals);
    for &(t0, t1) in &covering(&xmin, &xmax, n) {
        for &(u0, u1) in &covering(&ymin, &ymax, n) {
            if t0 < 0 || u0 < 0 || t1 >= n || u1 >= n {
                continue;
            }
            if (t0..=t1).all(|t| (u0..=u1).all(|u| seq.cell_in_space(i, t, u))) {
                return Some((TargetRegion::Cells { t0, t1, u0, u1 }, avg));
            }
        }
    }
    let scale = Rational::from_integer(n);
    let (sx0, sx1, sy0, sy1) = (&xmin * &scale, &xmax * &scale, &ymin * &scale, &ymax * &scale);
    let tr = (sx0.floor() - 1)..=(sx1.ceil() + 1);
    let ur = (sy0.floor() - 1)..=(sy1.ceil() + 1);
    for u in ur.filter(|u| u % 2 == 0) {
        for t in tr.clone().filter(|t| t % 2 == 0) {
            let fits_x = Rational::from_integer(t - 1) <= sx0 && sx1 <= Rational::from_integer(t + 2);
            let fits_y = Rational::from_integer(u - 1) <= sy0 && sy1 <= Rational::from_integer(u + 2);
            if !fits_x || !fits_y || !seq.cell_in_space(i, t, u) {
                continue;
            }
            let holes: BTreeSet<GridSquare> = (t - 1..=t + 1)
                .flat_map(|a| (u - 1..=u + 1).map(move |b| (a, b)))
                .filter(|&(a, b)| a >= 0 && b >= 0 && a < n && b < n)
                .filter_map(|(a, b)| hole_of_cell(seq, i, a, b))
                .collect();
            let clear = (0..vals.len()).all(|k| {
                let (p, q) = (&vals[k], &vals[(k + 1) % vals.len()]);
                holes.iter().all(|h| !segment_meets_interior(p, q, h) && !h.interior_contains(p))
            });
            if clear {
                let apex = Point::new(
                    clamp(&avg.x, Rational::new(t, n), Rational::new(t + 1, n)),
                    clamp(&avg.y, Rational::new(u, n), Rational::new(u + 1, n)),
                );
                return Some((TargetRegion::Junction { t, u }, apex));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceFill {
    pub target: TargetRegion,
    pub apex: Point,
    pub apex_value: Point,
}

/// One affine piece: domain corners and their values, counter-clockwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub face: usize,
    pub corners: [Point; 3],
    pub values: [Point; 3],
}

impl Triangle {
    fn contains(&self, z: &Point) -> bool {
        let [a, b, c] = &self.corners;
        orient(a, b, z) >= 0 && orient(b, c, z) >= 0 && orient(c, a, z) >= 0
    }

    fn value_at(&self, z: &Point) -> Point {
        let [a, b, c] = &self.corners;
        let area = b.sub(a).cross(&c.sub(a));
        let la = &b.sub(z).cross(&c.sub(z)) / &area;
        let lb = &c.sub(z).cross(&a.sub(z)) / &area;
        let lc = &a.sub(z).cross(&b.sub(z)) / &area;
        let [ha, hb, hc] = &self.values;
        ha.scale(&la).add(&hb.scale(&lb)).add(&hc.scale(&lc))
    }

    /// Barycentric grid point `(a, b, r - a - b) / r`, in the domain and its value.
    fn sample(&self, a: i64, b: i64, r: i64) -> (Point, Point) {
        let w = [Rational::new(a, r), Rational::new(b, r), Rational::new(r - a - b, r)];
        let mix = |p: &[Point; 3]| p[0].scale(&w[0]).add(&p[1].scale(&w[1])).add(&p[2].scale(&w[2]));
        (mix(&self.corners), mix(&self.values))
    }

    fn bbox(&self) -> [f64; 4] {
        let xs = self.corners.iter().map(|p| p.x.to_f64());
        let ys = self.corners.iter().map(|p| p.y.to_f64());
        [
            xs.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
            ys.clone().fold(f64::INFINITY, f64::min),
            ys.fold(f64::NEG_INFINITY, f64::max),
        ]
    }
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Debug, Clone)]
struct Locator {
    origin: (f64, f64),
    cell: (f64, f64),
    size: usize,
    buckets: Vec<Vec<usize>>,
    corners: Vec<[[f64; 2]; 3]>,
}

impl Locator {
    fn new(tris: &[Triangle]) -> Self {
        let size = ((tris.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let bb: Vec<[f64; 4]> = tris.iter().map(Triangle::bbox).collect();
        let x0 = bb.iter().map(|b| b[0]).fold(f64::INFINITY, f64::min);
        let x1 = bb.iter().map(|b| b[1]).fold(f64::NEG_INFINITY, f64::max);
        let y0 = bb.iter().map(|b| b[2]).fold(f64::INFINITY, f64::min);
        let y1 = bb.iter().map(|b| b[3]).fold(f64::NEG_INFINITY, f64::max);
        let cell = (((x1 - x0) / size as f64).max(1e-9), ((y1 - y0) / size as f64).max(1e-9));
        let corners = tris.iter().map(|t| t.corners.clone().map(|p| [p.x.to_f64(), p.y.to_f64()])).collect();
        let mut loc = Locator { origin: (x0, y0), cell, size, buckets: vec![Vec::new(); size * size], corners };
        for (k, b) in bb.iter().enumerate() {
            let (a0, a1) = loc.range(b[0], b[1], true);
            let (c0, c1) = loc.range(b[2], b[3], false);
            for gx in a0..=a1 {
                for gy in c0..=c1 {
                    loc.buckets[gy * size + gx].push(k);
                }
            }
        }
        loc
    }

    fn range(&self, lo: f64, hi: f64, x: bool) -> (usize, usize) {
        let (o, c) = if x { (self.origin.0, self.cell.0) } else { (self.origin.1, self.cell.1) };
        let f = |v: f64| (((v - o) / c).floor().max(0.0) as usize).min(self.size - 1);
        (f(lo - c * 1e-6), f(hi + c * 1e-6))
    }

    /// False only when `z` is certainly outside triangle `k`.
    fn may_contain(&self, k: usize, z: [f64; 2]) -> bool {
        let [a, b, c] = self.corners[k];
        [(a, b), (b, c), (c, a)].iter().all(|&(p, q)| fast_orient(p, q, z) != Some(-1))
    }

    fn candidates(&self, bb: [f64; 4]) -> BTreeSet<usize> {
        let (a0, a1) = self.range(bb[0], bb[1], true);
        let (c0, c1) = self.range(bb[2], bb[3], false);
        let mut out = BTreeSet::new();
        for gx in a0..=a1 {
            for gy in c0..=c1 {
                out.extend(&self.buckets[gy * self.size + gx]);
            }
        }
        out
    }
}

/// The level-`i` homotopy of a loop built from one cancellation diagram.
#[derive(Debug, Clone)]
pub struct LevelHomotopy {
    pub level: u32,
    pub cellulation: Cellulation,
    /// Value at every cellulation vertex.
    pub values: Vec<Point>,
    pub fills: Vec<FaceFill>,
    pub triangles: Vec<Triangle>,
    lp: PolyLoop,
    seq: DefiningSequence,
    word: CyclicWord,
    diagram: CancellationDiagram,
    locator: Locator,
}

/// Builds `H_i` for `loop` from a valid diagram of its level-`i` word.
pub fn build_homotopy(
    lp: &PolyLoop,
    seq: &DefiningSequence,
    i: u32,
    d: &CancellationDiagram,
) -> Result<LevelHomotopy, HomotopyError> {
    build_homotopy_on(lp, seq, i, d, &[])
}

/// As [`build_homotopy`], with extra boundary vertices.
pub fn build_homotopy_on(
    lp: &PolyLoop,
    seq: &DefiningSequence,
    i: u32,
    d: &CancellationDiagram,
    extra: &[Rational],
) -> Result<LevelHomotopy, HomotopyError> {
    let word = encode_word(lp, seq, i)?;
    if !diagram_valid(&TraceWord::from_cyclic(&word), d)? {
        return Err(HomotopyError::MalformedDiagram(format!("{d} is not realizable")));
    }
    let mut params: Vec<Rational> = (0..lp.len()).map(|j| lp.vertex_param(j)).collect();
    params.extend_from_slice(extra);
    let cel = build_cellulation_on(&word, d, &params)?;
    let mut values: Vec<Point> = cel.params.iter().map(|t| lp.point_at(t)).collect();
    for v in cel.params.len()..cel.points.len() {
        let c = cel.crossings.iter().find(|c| c.vertex == v).expect("crossing vertex");
        let (a, b) = (&cel.chords[c.chords.0], &cel.chords[c.chords.1]);
        let (h, vv) = if a.orientation == Orientation::Horizontal { (a, b) } else { (b, a) };
        values.push(Point::new(vv.line.clone(), h.line.clone()));
    }
    let mut fills = Vec::with_capacity(cel.faces.len());
    let mut triangles = Vec::new();
    for (f, face) in cel.faces.iter().enumerate() {
        let vals: Vec<Point> = face.vertices.iter().map(|&v| values[v].clone()).collect();
        let (target, apex_value) = fit_region(seq, i, &vals).ok_or(HomotopyError::AssignmentFailure { face: f })?;
        let apex = centroid(&face.vertices.iter().map(|&v| cel.points[v].clone()).collect::<Vec<_>>());
        let k = face.vertices.len();
        for j in 0..k {
            let (a, b) = (face.vertices[j], face.vertices[(j + 1) % k]);
            triangles.push(Triangle {
                face: f,
                corners: [apex.clone(), cel.points[a].clone(), cel.points[b].clone()],
                values: [apex_value.clone(), values[a].clone(), values[b].clone()],
            });
        }
        fills.push(FaceFill { target, apex, apex_value });
    }
    let locator = Locator::new(&triangles);
    Ok(LevelHomotopy {
        level: i,
        cellulation: cel,
        values,
        fills,
        triangles,
        lp: lp.clone(),
        seq: seq.clone(),
        word,
        diagram: d.clone(),
        locator,
    })
}

impl LevelHomotopy {
    pub fn word(&self) -> &CyclicWord {
        &self.word
    }

    pub fn diagram(&self) -> &CancellationDiagram {
        &self.diagram
    }

    fn rebuild_on(&self, extra: &[Rational]) -> Result<LevelHomotopy, HomotopyError> {
        build_homotopy_on(&self.lp, &self.seq, self.level, &self.diagram, extra)
    }

    fn locate(&self, z: &Point) -> Option<usize> {
        let (x, y) = (z.x.to_f64(), z.y.to_f64());
        let near = self.locator.candidates([x, x, y, y]);
        let hit = |k: &usize| self.locator.may_contain(*k, [x, y]) && self.triangles[*k].contains(z);
        near.into_iter().find(hit).or_else(|| (0..self.triangles.len()).find(hit))
    }
}

/// `H(z)` for a point of the domain polygon; `None` outside it.
pub fn evaluate(h: &LevelHomotopy, z: &Point) -> Option<Point> {
    h.locate(z).map(|k| h.triangles[k].value_at(z))
}

/// `H` at the boundary point with parameter `t`.
pub fn evaluate_boundary(h: &LevelHomotopy, t: &Rational) -> Point {
    let z = h.cellulation.boundary_point(t);
    evaluate(h, &z).expect("boundary points lie in the domain")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentViolation {
    pub face: usize,
    pub triangle: usize,
    pub value: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentReport {
    pub level: u32,
    pub resolution: u32,
    pub samples: usize,
    pub violations: Vec<ContainmentViolation>,
}

impl ContainmentReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples every triangle on a barycentric grid with `resolution` steps per
/// side and checks that each value lies in the level space.
pub fn verify_containment(
    h: &LevelHomotopy,
    seq: &DefiningSequence,
    i: u32,
    resolution: u32,
) -> Result<ContainmentReport, GeometryError> {
    let r = resolution.max(1) as i64;
    let mut samples = 0;
    let mut violations = Vec::new();
    for (k, tri) in h.triangles.iter().enumerate() {
        for a in 0..=r {
            for b in 0..=r - a {
                let (_, v) = tri.sample(a, b, r);
                samples += 1;
                if !level_space_contains(seq, i, &v)? {
                    violations.push(ContainmentViolation { face: tri.face, triangle: k, value: v });
                }
            }
        }
    }
    Ok(ContainmentReport { level: i, resolution, samples, violations })
}

/// Exact containment: the image of every triangle, the convex hull of its
/// three values, lies in the unit square and misses the open interior of every
/// removed square of level `<= i`. Implies a clean report at any resolution.
pub fn certify_containment(h: &LevelHomotopy, seq: &DefiningSequence, i: u32) -> Result<ContainmentReport, GeometryError> {
    seq.check_level(i)?;
    let (zero, one) = (Rational::zero(), Rational::one());
    let mut violations = Vec::new();
    for (k, tri) in h.triangles.iter().enumerate() {
        let vals = &tri.values;
        let outside = vals.iter().find(|v| v.x < zero || v.x > one || v.y < zero || v.y > one);
        let hit = outside.cloned().or_else(|| {
            holes_near(seq, i, vals).into_iter().find(|sq| triangle_meets_open_square(vals, sq)).map(|sq| {
                let (x, y) = (sq.x_range(), sq.y_range());
                Point::new(x.0.midpoint(&x.1), y.0.midpoint(&y.1))
            })
        });
        if let Some(value) = hit {
            violations.push(ContainmentViolation { face: tri.face, triangle: k, value });
        }
    }
    Ok(ContainmentReport { level: i, resolution: 0, samples: h.triangles.len(), violations })
}

fn holes_near(seq: &DefiningSequence, i: u32, vals: &[Point; 3]) -> Vec<GridSquare> {
    let xmin = vals.iter().map(|p| &p.x).min().unwrap();
    let xmax = vals.iter().map(|p| &p.x).max().unwrap();
    let ymin = vals.iter().map(|p| &p.y).min().unwrap();
    let ymax = vals.iter().map(|p| &p.y).max().unwrap();
    let mut out = Vec::new();
    for s in 1..=i {
        let n = Rational::from_integer(pow3(s));
        let (t0, t1) = ((xmin * &n).floor(), (xmax * &n).ceil() - 1);
        let (u0, u1) = ((ymin * &n).floor(), (ymax * &n).ceil() - 1);
        for t in (t0..=t1).filter(|t| t % 2 == 1) {
            for u in (u0..=u1).filter(|u| u % 2 == 1) {
                let sq = GridSquare::new(s, (t + 1) / 2, (u + 1) / 2);
                if seq.is_removed(&sq) {
                    out.push(sq);
                }
            }
        }
    }
    out
}

/// Whether a closed, possibly degenerate, triangle meets the open square `sq`.
fn triangle_meets_open_square(tri: &[Point; 3], sq: &GridSquare) -> bool {
    let (x, y) = (sq.x_range(), sq.y_range());
    let corners = [
        Point::new(x.0.clone(), y.0.clone()),
        Point::new(x.1.clone(), y.0.clone()),
        Point::new(x.1.clone(), y.1.clone()),
        Point::new(x.0.clone(), y.1.clone()),
    ];
    let mut axes = vec![Point::new(Rational::one(), Rational::zero()), Point::new(Rational::zero(), Rational::one())];
    for e in 0..3 {
        let d = tri[(e + 1) % 3].sub(&tri[e]);
        if d != Point::default() {
            axes.push(Point::new(-&d.y, d.x));
        }
    }
    let dot = |a: &Point, b: &Point| &(&a.x * &b.x) + &(&a.y * &b.y);
    !axes.iter().any(|n| {
        let t: Vec<Rational> = tri.iter().map(|p| dot(p, n)).collect();
        let q: Vec<Rational> = corners.iter().map(|p| dot(p, n)).collect();
        let (tmin, tmax) = (t.iter().min().unwrap(), t.iter().max().unwrap());
        let (qmin, qmax) = (q.iter().min().unwrap(), q.iter().max().unwrap());
        tmax <= qmin || qmax <= tmin
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// Level of the coarser homotopy.
    pub level: u32,
    pub samples: usize,
    /// Largest squared distance found.
    pub max_sq: Rational,
    /// `(6 / 3^level)²`.
    pub bound_sq: Rational,
    pub holds: bool,
    /// Domain point attaining `max_sq`.
    pub worst: Option<Point>,
}

/// Largest `|H_i(z) - H_{i+1}(z)|²` over common sample points, compared
/// exactly with `(6/3^i)²`.
///
/// Both homotopies are rebuilt on the union of their boundary vertices so that
/// they share one domain. The sample set contains every vertex of the common
/// refinement of the two triangulations, where the supremum of the squared
/// distance is attained, plus a barycentric grid of `resolution` steps on each
/// coarse triangle.
pub fn convergence_gap(
    coarse: &LevelHomotopy,
    fine: &LevelHomotopy,
    resolution: u32,
) -> Result<GapReport, HomotopyError> {
    if coarse.lp != fine.lp {
        return Err(HomotopyError::IncompatibleHomotopies("different loops".into()));
    }
    if fine.level != coarse.level + 1 {
        return Err(HomotopyError::IncompatibleHomotopies(format!(
            "levels {} and {} are not consecutive",
            coarse.level, fine.level
        )));
    }
    let mut common: BTreeSet<Rational> = coarse.cellulation.params.iter().cloned().collect();
    common.extend(fine.cellulation.params.iter().cloned());
    let common: Vec<Rational> = common.into_iter().collect();
    let hc = coarse.rebuild_on(&common)?;
    let hf = fine.rebuild_on(&common)?;
    debug_assert_eq!(hc.cellulation.params, hf.cellulation.params);

    let mut best: (Rational, Option<Point>) = (Rational::zero(), None);
    let mut best_f = 0.0f64;
    let mut samples = 0;
    let mut offer = |approx: f64, exact: &dyn Fn() -> (Rational, Point)| {
        samples += 1;
        if best.1.is_some() && approx < best_f * (1.0 - 1e-6) {
            return;
        }
        let (d, z) = exact();
        if best.1.is_none() || d > best.0 {
            best_f = d.to_f64();
            best = (d, Some(z));
        }
    };
    let corners = |h: &LevelHomotopy| {
        let mut m: BTreeMap<Point, Point> = BTreeMap::new();
        for t in &h.triangles {
            for k in 0..3 {
                m.entry(t.corners[k].clone()).or_insert_with(|| t.values[k].clone());
            }
        }
        m
    };
    for (z, vc) in corners(&hc) {
        if let Some(vf) = evaluate(&hf, &z) {
            offer(f64::INFINITY, &|| (vc.dist2(&vf), z.clone()));
        }
    }
    for (z, vf) in corners(&hf) {
        if let Some(vc) = evaluate(&hc, &z) {
            offer(f64::INFINITY, &|| (vc.dist2(&vf), z.clone()));
        }
    }
    let ec = unique_edges(&hc.triangles);
    let mut ef = unique_edges(&hf.triangles);
    ef.sort_by(|a, b| a.bbox[0].total_cmp(&b.bbox[0]));
    for a in &ec {
        let end = ef.partition_point(|b| b.bbox[0] <= a.bbox[1] + SLACK * (1.0 + a.bbox[1].abs()));
        for b in &ef[..end] {
            if !boxes_meet(&a.bbox, &b.bbox) || !may_cross(a, b) {
                continue;
            }
            let (p, q) = (&a.ends[0], &a.ends[1]);
            let (c, d) = (&b.ends[0], &b.ends[1]);
            if !proper_cross(p, q, c, d) {
                continue;
            }
            offer(a.crossing_gap_f64(b), &|| {
                let (r, s) = (q.sub(p), d.sub(c));
                let den = r.cross(&s);
                let ta = &c.sub(p).cross(&s) / &den;
                let tb = &c.sub(p).cross(&r) / &den;
                let vc = a.vals[0].lerp(&a.vals[1], &ta);
                let vf = b.vals[0].lerp(&b.vals[1], &tb);
                (vc.dist2(&vf), p.lerp(q, &ta))
            });
        }
    }
    let r = resolution as i64;
    if r > 0 {
        for tri in &hc.triangles {
            for a in 0..=r {
                for b in 0..=r - a {
                    let (z, vc) = tri.sample(a, b, r);
                    if let Some(vf) = evaluate(&hf, &z) {
                        offer(f64::INFINITY, &|| (vc.dist2(&vf), z.clone()));
                    }
                }
            }
        }
    }
    let bound = Rational::new(6, pow3(coarse.level));
    let bound_sq = &bound * &bound;
    Ok(GapReport {
        level: coarse.level,
        samples,
        holds: best.0 <= bound_sq,
        max_sq: best.0,
        bound_sq,
        worst: best.1,
    })
}

const SLACK: f64 = 1e-9;

struct Edge {
    ends: [Point; 2],
    vals: [Point; 2],
    f: [[f64; 2]; 2],
    fv: [[f64; 2]; 2],
    /// `[xmin, xmax, ymin, ymax]`.
    bbox: [f64; 4],
}

impl Edge {
    /// Float estimate of the squared value gap where two edges cross.
    fn crossing_gap_f64(&self, other: &Edge) -> f64 {
        let [p, q] = self.f;
        let [c, d] = other.f;
        let (r, s) = ([q[0] - p[0], q[1] - p[1]], [d[0] - c[0], d[1] - c[1]]);
        let w = [c[0] - p[0], c[1] - p[1]];
        let cross = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
        let den = cross(r, s);
        let (ta, tb) = (cross(w, s) / den, cross(w, r) / den);
        let lerp = |v: [[f64; 2]; 2], t: f64| [v[0][0] + t * (v[1][0] - v[0][0]), v[0][1] + t * (v[1][1] - v[0][1])];
        let (x, y) = (lerp(self.fv, ta), lerp(other.fv, tb));
        (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)
    }
}

fn unique_edges(tris: &[Triangle]) -> Vec<Edge> {
    let mut map: BTreeMap<(Point, Point), [Point; 2]> = BTreeMap::new();
    for t in tris {
        for e in 0..3 {
            let (i, j) = (e, (e + 1) % 3);
            let (i, j) = if t.corners[i] < t.corners[j] { (i, j) } else { (j, i) };
            map.entry((t.corners[i].clone(), t.corners[j].clone()))
                .or_insert_with(|| [t.values[i].clone(), t.values[j].clone()]);
        }
    }
    let f64p = |p: &Point| [p.x.to_f64(), p.y.to_f64()];
    map.into_iter()
        .map(|((a, b), vals)| {
            let f = [f64p(&a), f64p(&b)];
            let fv = [f64p(&vals[0]), f64p(&vals[1])];
            let bbox = [f[0][0].min(f[1][0]), f[0][0].max(f[1][0]), f[0][1].min(f[1][1]), f[0][1].max(f[1][1])];
            Edge { ends: [a, b], vals, f, fv, bbox }
        })
        .collect()
}

fn boxes_meet(a: &[f64; 4], b: &[f64; 4]) -> bool {
    let tol = |u: f64, v: f64| SLACK * (1.0 + u.abs().max(v.abs()));
    a[0] <= b[1] + tol(a[0], b[1])
        && b[0] <= a[1] + tol(b[0], a[1])
        && a[2] <= b[3] + tol(a[2], b[3])
        && b[2] <= a[3] + tol(b[2], a[3])
}

/// Sign of `orient(a, b, c)` when the float estimate is unambiguous.
fn fast_orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<i32> {
    let l = (b[0] - a[0]) * (c[1] - a[1]);
    let r = (b[1] - a[1]) * (c[0] - a[0]);
    let det = l - r;
    let bound = SLACK * (l.abs() + r.abs()) + f64::MIN_POSITIVE;
    if det > bound {
        Some(1)
    } else if det < -bound {
        Some(-1)
    } else {
        None
    }
}

/// False only when the segments certainly do not cross properly.
fn may_cross(a: &Edge, b: &Edge) -> bool {
    let strict = |p: Option<i32>, q: Option<i32>| !matches!((p, q), (Some(x), Some(y)) if x * y >= 0);
    strict(fast_orient(a.f[0], a.f[1], b.f[0]), fast_orient(a.f[0], a.f[1], b.f[1]))
        && strict(fast_orient(b.f[0], b.f[1], a.f[0]), fast_orient(b.f[0], b.f[1], a.f[1]))
}

fn proper_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0 && o3 * o4 < 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{central_ring, random_trivial_loop};
    use crate::trace_calculus::first_diagram;
    use crate::word_encoding::walk_loop;

    fn q1() -> DefiningSequence {
        DefiningSequence::explicit(1, [GridSquare::new(1, 1, 1)]).unwrap()
    }

    #[test]
    fn square_types() {
        let types = classify_squares(&q1(), 1).unwrap();
        assert_eq!(types.len(), 8);
        let count = |k| types.iter().filter(|s| s.kind == k).count();
        assert_eq!((count(0), count(1), count(2)), (4, 4, 0));
        let empty = DefiningSequence::explicit(1, []).unwrap();
        let types = classify_squares(&empty, 1).unwrap();
        assert_eq!(types.iter().find(|s| s.cell == (1, 1)).unwrap().kind, 2);
        let full = classify_squares(&DefiningSequence::full_carpet(2).unwrap(), 2).unwrap();
        let count = |k| full.iter().filter(|s| s.kind == k).count();
        assert_eq!((full.len(), count(0), count(1), count(2)), (60, 24, 36, 0));
    }

    #[test]
    fn left_corridor_excursion() {
        // junction (0, 0) to (0, 2) and back through the left corridor
        let seq = q1();
        let lp = walk_loop(1, &[(0, 0), (0, 2)]);
        let word = encode_word(&lp, &seq, 1).unwrap();
        assert_eq!(word.to_text(), "H:1:1:0/1+ H:1:1:0/1-");
        let d = CancellationDiagram::new([(0, 1)]);
        let cel = build_cellulation(&word, &d).unwrap();
        assert_eq!(cel.bands.len(), 1);
        assert_eq!(cel.faces.len(), 3);
        let h = build_homotopy(&lp, &seq, 1, &d).unwrap();
        let band_faces: Vec<_> = (0..cel.faces.len()).filter(|&f| !h.cellulation.faces[f].bands.is_empty()).collect();
        assert_eq!(band_faces.len(), 1);
        assert_eq!(h.fills[band_faces[0]].target, TargetRegion::Cells { t0: 0, t1: 0, u0: 1, u1: 1 });
        assert!(verify_containment(&h, &seq, 1, 64).unwrap().is_clean());
        assert!(certify_containment(&h, &seq, 1).unwrap().is_clean());
        for j in 0..lp.len() {
            let t = lp.vertex_param(j);
            assert_eq!(evaluate_boundary(&h, &t), lp.vertices[j]);
        }
    }

    #[test]
    fn boundary_and_transverse_laws() {
        let seq = DefiningSequence::full_carpet(3).unwrap();
        for seed in 0..6 {
            let lp = random_trivial_loop(&seq, 3, seed, 16);
            for i in 1..=3 {
                let word = encode_word(&lp, &seq, i).unwrap();
                let d = first_diagram(&TraceWord::from_cyclic(&word)).unwrap();
                let h = build_homotopy(&lp, &seq, i, &d).unwrap();
                let m = h.cellulation.params.len();
                for k in 0..m {
                    let (t0, t1) = (&h.cellulation.params[k], &h.cellulation.params[(k + 1) % m]);
                    let t1 = if k + 1 == m { t1 + &Rational::one() } else { t1.clone() };
                    let mid = wrap(&t0.midpoint(&t1));
                    assert_eq!(evaluate_boundary(&h, t0), lp.point_at(t0));
                    assert_eq!(evaluate_boundary(&h, &mid), lp.point_at(&mid));
                }
                for ch in &h.cellulation.chords {
                    let (a, b) = (&h.cellulation.points[ch.ends.0], &h.cellulation.points[ch.ends.1]);
                    for s in [Rational::new(1, 3), Rational::new(1, 2), Rational::new(5, 7)] {
                        let v = evaluate(&h, &a.lerp(b, &s)).unwrap();
                        let c = if ch.orientation == Orientation::Horizontal { v.y } else { v.x };
                        assert_eq!(c, ch.line);
                    }
                }
                assert!(verify_containment(&h, &seq, i, 6).unwrap().is_clean());
                assert!(certify_containment(&h, &seq, i).unwrap().is_clean());
            }
        }
    }

    #[test]
    fn commuting_corridors_cross() {
        let seq = DefiningSequence::explicit(2, [GridSquare::new(2, 1, 1)]).unwrap();
        let lp = walk_loop(1, &crate::sample::ring_walk(0, 0, 2, 2));
        let word = encode_word(&lp, &seq, 1).unwrap();
        assert_eq!(word.to_text(), "V:1:1:0/1+ H:1:1:0/1+ V:1:1:0/1- H:1:1:0/1-");
        let d = CancellationDiagram::new([(0, 2), (1, 3)]);
        let h = build_homotopy(&lp, &seq, 1, &d).unwrap();
        assert_eq!(h.cellulation.crossings.len(), 4);
        assert_eq!(h.cellulation.faces.len(), 9);
        let centre = h.cellulation.faces.iter().position(|f| f.bands.len() == 2).unwrap();
        assert_eq!(h.fills[centre].target, TargetRegion::Cells { t0: 1, t1: 1, u0: 1, u1: 1 });
        assert!(verify_containment(&h, &seq, 1, 16).unwrap().is_clean());
        let h2 = build_homotopy(&lp, &seq, 2, &first_diagram(&TraceWord::from_cyclic(&encode_word(&lp, &seq, 2).unwrap())).unwrap()).unwrap();
        assert!(verify_containment(&h2, &seq, 2, 8).unwrap().is_clean());
        assert!(convergence_gap(&h, &h2, 3).unwrap().holds);
    }

    #[test]
    fn open_square_contact() {
        let sq = GridSquare::new(1, 1, 1);
        let p = |x: i64, y: i64| Point::new(Rational::new(x, 9), Rational::new(y, 9));
        assert!(!triangle_meets_open_square(&[p(0, 0), p(3, 0), p(3, 9)], &sq));
        assert!(triangle_meets_open_square(&[p(0, 0), p(4, 0), p(4, 9)], &sq));
        assert!(!triangle_meets_open_square(&[p(0, 6), p(3, 9), p(0, 9)], &sq));
        assert!(!triangle_meets_open_square(&[p(0, 5), p(4, 9), p(0, 9)], &sq));
        assert!(triangle_meets_open_square(&[p(0, 0), p(9, 9), p(0, 9)], &sq));
        assert!(triangle_meets_open_square(&[p(4, 4), p(4, 4), p(4, 4)], &sq));
        assert!(!triangle_meets_open_square(&[p(3, 3), p(6, 3), p(6, 3)], &sq));
        assert!(triangle_meets_open_square(&[p(2, 2), p(7, 7), p(7, 7)], &sq));
    }

    #[test]
    fn forged_assignment_is_reported() {
        let seq = q1();
        let lp = walk_loop(1, &[(0, 0), (0, 2)]);
        let mut h = build_homotopy(&lp, &seq, 1, &CancellationDiagram::new([(0, 1)])).unwrap();
        let centre = Point::new(Rational::new(1, 2), Rational::new(1, 2));
        h.triangles[0].values[0] = centre.clone();
        let rep = verify_containment(&h, &seq, 1, 4).unwrap();
        assert!(rep.violations.iter().any(|v| v.triangle == 0 && v.value == centre));
        let rep = certify_containment(&h, &seq, 1).unwrap();
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].triangle, 0);
    }

    #[test]
    fn forged_diagrams_are_rejected() {
        let seq = DefiningSequence::full_carpet(1).unwrap();
        let lp = central_ring(1);
        let word = encode_word(&lp, &seq, 1).unwrap();
        assert_eq!(word.len(), 4);
        let forged = CancellationDiagram::new([(0, 2), (1, 3)]);
        assert!(matches!(build_homotopy(&lp, &seq, 1, &forged), Err(HomotopyError::MalformedDiagram(_))));
    }

    #[test]
    fn gap_between_levels() {
        let seq = DefiningSequence::full_carpet(3).unwrap();
        let lp = random_trivial_loop(&seq, 3, 3, 12);
        let hs: Vec<LevelHomotopy> = (1..=3)
            .map(|i| {
                let word = encode_word(&lp, &seq, i).unwrap();
                build_homotopy(&lp, &seq, i, &first_diagram(&TraceWord::from_cyclic(&word)).unwrap()).unwrap()
            })
            .collect();
        for k in 0..2 {
            let g = convergence_gap(&hs[k], &hs[k + 1], 4).unwrap();
            assert!(g.holds, "{g:?}");
        }
        assert!(matches!(convergence_gap(&hs[0], &hs[2], 2), Err(HomotopyError::IncompatibleHomotopies(_))));
    }
}
