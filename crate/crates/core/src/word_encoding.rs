//! Corridor words of polygonal loops.
//!
//! At level `i` a loop is cut by the grid lines `y = j/3^i` and `x = j/3^i`.
//! Each boundary-line-to-boundary-line passage through a corridor becomes a
//! signed letter; the horizontal and vertical families are merged by source
//! interval into a cyclic word.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::grid_geometry::{
    CorridorId, DefiningSequence, GeometryError, LevelCorridors, Orientation, PolyLoop,
};
use crate::rational::{pow3, Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("degenerate position at vertex {vertex}: {detail}")]
    DegeneratePosition { vertex: usize, detail: String },
    #[error("refinement violation between levels {level} and {}: {detail}", level + 1)]
    RefinementViolation { level: u32, detail: String },
    #[error("letters {first} and {second} cannot be joined inside the level space")]
    Unroutable { first: usize, second: usize },
    #[error("corridor {0} does not exist in this space")]
    UnknownCorridor(CorridorId),
    #[error("word mixes letters of levels {0} and {1}")]
    MixedLevels(u32, u32),
    #[error("malformed word text: {0}")]
    Malformed(String),
}

/// Interval `[start, end]` of the parameter circle `[0,1)`; when `end < start`
/// it wraps through `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossingInterval {
    pub start: Rational,
    pub end: Rational,
    pub corridor: CorridorId,
    pub sign: i8,
}

impl CrossingInterval {
    pub fn wraps(&self) -> bool {
        self.end < self.start
    }

    /// The interval as a linear range `[a, b]` with `b` possibly past `1`.
    fn unwrapped(&self) -> (Rational, Rational) {
        if self.wraps() {
            (self.start.clone(), &self.end + &Rational::one())
        } else {
            (self.start.clone(), self.end.clone())
        }
    }

    /// Whether the open interiors of two intervals meet on the circle.
    pub fn overlaps(&self, other: &CrossingInterval) -> bool {
        let (a0, a1) = self.unwrapped();
        let (b0, b1) = other.unwrapped();
        let one = Rational::one();
        [Rational::zero(), one.clone(), -one].iter().any(|shift| {
            let (c0, c1) = (&b0 + shift, &b1 + shift);
            a0 < c1 && c0 < a1
        })
    }

    /// Whether `t` lies in the closed interval (cyclically).
    pub fn contains(&self, t: &Rational) -> bool {
        if self.wraps() {
            *t >= self.start || *t <= self.end
        } else {
            self.start <= *t && *t <= self.end
        }
    }
}

/// A corridor with a direction of traversal; the text form is `H:1:2:0/1+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedCorridor {
    pub corridor: CorridorId,
    pub sign: i8,
}

impl SignedCorridor {
    pub fn new(corridor: CorridorId, sign: i8) -> Self {
        SignedCorridor { corridor, sign }
    }

    pub fn inverse(self) -> Self {
        SignedCorridor { corridor: self.corridor, sign: -self.sign }
    }
}

impl fmt::Display for SignedCorridor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.corridor, if self.sign > 0 { '+' } else { '-' })
    }
}

impl FromStr for SignedCorridor {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, sign) = match s.chars().last() {
            Some('+') => (&s[..s.len() - 1], 1),
            Some('-') => (&s[..s.len() - 1], -1),
            _ => return Err(EncodingError::Malformed(s.to_string())),
        };
        let corridor = body.parse().map_err(|_| EncodingError::Malformed(s.to_string()))?;
        Ok(SignedCorridor { corridor, sign })
    }
}

/// Parses space-separated letters.
pub fn parse_word(text: &str) -> Result<Vec<SignedCorridor>, EncodingError> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn format_word(word: &[SignedCorridor]) -> String {
    word.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub corridor: CorridorId,
    pub sign: i8,
    pub source: CrossingInterval,
}

impl Letter {
    pub fn symbol(&self) -> SignedCorridor {
        SignedCorridor { corridor: self.corridor, sign: self.sign }
    }

    pub fn orientation(&self) -> Orientation {
        self.corridor.orientation
    }
}

/// Horizontal/vertical corridor pairs whose inner regions meet.
pub type Commutation = BTreeSet<(CorridorId, CorridorId)>;

/// Which letter goes first when a horizontal and a vertical source interval overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    HorizontalFirst,
    VerticalFirst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicWord {
    pub level: u32,
    pub letters: Vec<Letter>,
    pub commutes: Commutation,
}

impl CyclicWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn symbols(&self) -> Vec<SignedCorridor> {
        self.letters.iter().map(Letter::symbol).collect()
    }

    pub fn commute(&self, a: &CorridorId, b: &CorridorId) -> bool {
        self.commutes.contains(&(*a, *b)) || self.commutes.contains(&(*b, *a))
    }

    pub fn to_text(&self) -> String {
        format_word(&self.symbols())
    }

    /// Equality up to rotation of the letter sequence.
    pub fn cyclic_eq(&self, other: &CyclicWord) -> bool {
        cyclic_eq(&self.symbols(), &other.symbols())
    }
}

/// Start index of the lexicographically least rotation.
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let (a, b) = (&s[(i + k) % n], &s[(j + k) % n]);
        match a.cmp(b) {
            std::cmp::Ordering::Equal => k += 1,
            std::cmp::Ordering::Greater => {
                i += k + 1;
                if i == j {
                    i += 1;
                }
                k = 0;
            }
            std::cmp::Ordering::Less => {
                j += k + 1;
                if i == j {
                    j += 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

pub fn canonical_rotation<T: Ord + Clone>(s: &[T]) -> Vec<T> {
    let r = least_rotation(s);
    s[r..].iter().chain(&s[..r]).cloned().collect()
}

pub fn cyclic_eq<T: Ord + Clone>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && canonical_rotation(a) == canonical_rotation(b)
}

/// Formal inverse: reversed order, flipped signs.
pub fn inverse_word(w: &[SignedCorridor]) -> Vec<SignedCorridor> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// One transversal passage of a grid line.
#[derive(Debug, Clone)]
struct LineEvent {
    param: Rational,
    line: i64,
    forward: bool,
    along: Rational,
}

fn axis(p: &Point, o: Orientation) -> (&Rational, &Rational) {
    // (coordinate across the stratum, coordinate along it)
    match o {
        Orientation::Horizontal => (&p.y, &p.x),
        Orientation::Vertical => (&p.x, &p.y),
    }
}

fn line_events(lp: &PolyLoop, level: u32, o: Orientation) -> Result<Vec<LineEvent>, EncodingError> {
    let n = pow3(level);
    let scale = Rational::from_integer(n);
    let count = Rational::from_integer(lp.len() as i64);
    let mut events = Vec::new();
    for e in 0..lp.len() {
        let (p, q) = lp.edge(e);
        let (pc, pa) = axis(p, o);
        let (qc, qa) = axis(q, o);
        let (ps, qs) = (pc * &scale, qc * &scale);
        if ps.is_integer() {
            return Err(EncodingError::DegeneratePosition {
                vertex: e,
                detail: format!("vertex lies on grid line {}", pc),
            });
        }
        if ps == qs {
            continue;
        }
        let (pf, qf) = (ps.floor(), qs.floor());
        let forward = qs > ps;
        let lines: Box<dyn Iterator<Item = i64>> = if forward {
            Box::new(pf + 1..=qf)
        } else {
            Box::new((qf + 1..=pf).rev())
        };
        let dc = qc - pc;
        let da = qa - pa;
        for j in lines {
            let y = Rational::new(j, n);
            let s = &(&y - pc) / &dc;
            let along = pa + &(&s * &da);
            let param = &(&Rational::from_integer(e as i64) + &s) / &count;
            events.push(LineEvent { param, line: j, forward, along });
        }
    }
    Ok(events)
}

fn family(
    lp: &PolyLoop,
    level: u32,
    o: Orientation,
    table: &LevelCorridors,
) -> Result<Vec<CrossingInterval>, EncodingError> {
    let events = line_events(lp, level, o)?;
    let len = events.len();
    let mut out = Vec::new();
    for k in 0..len {
        let (e1, e2) = (&events[k], &events[(k + 1) % len]);
        if e1.forward != e2.forward {
            continue;
        }
        // strip cell index entered by e1 and left by e2
        let (row, exit) = if e1.forward { (e1.line, e1.line + 1) } else { (e1.line - 1, e1.line - 1) };
        if row % 2 == 0 || e2.line != exit {
            continue;
        }
        let stratum = (row + 1) / 2;
        let corridor = table
            .locate(o, stratum, &e1.along)
            .or_else(|| table.locate(o, stratum, &e2.along))
            .ok_or_else(|| EncodingError::DegeneratePosition {
                vertex: 0,
                detail: format!("crossing of stratum {stratum} outside every corridor"),
            })?;
        out.push(CrossingInterval {
            start: e1.param.clone(),
            end: e2.param.clone(),
            corridor: corridor.id,
            sign: if e1.forward { 1 } else { -1 },
        });
    }
    // the wrapping interval (if any) was produced first; keep start order
    out.sort_by(|a, b| a.start.cmp(&b.start));
    Ok(out)
}

/// The horizontal and vertical crossing families of level `i`, each ordered by start.
pub fn crossing_intervals(
    lp: &PolyLoop,
    seq: &DefiningSequence,
    i: u32,
) -> Result<(Vec<CrossingInterval>, Vec<CrossingInterval>), EncodingError> {
    let table = LevelCorridors::new(seq, i)?;
    crossing_intervals_with(lp, &table)
}

pub fn crossing_intervals_with(
    lp: &PolyLoop,
    table: &LevelCorridors,
) -> Result<(Vec<CrossingInterval>, Vec<CrossingInterval>), EncodingError> {
    let h = family(lp, table.level, Orientation::Horizontal, table)?;
    let v = family(lp, table.level, Orientation::Vertical, table)?;
    Ok((h, v))
}

/// Corridor pairs `(h, v)` of level `i` whose inner regions intersect.
pub fn crossing_relation(seq: &DefiningSequence, i: u32) -> Result<Commutation, EncodingError> {
    let table = LevelCorridors::new(seq, i)?;
    Ok(crossing_relation_with(&table))
}

pub fn crossing_relation_with(table: &LevelCorridors) -> Commutation {
    let mut out = Commutation::new();
    for h in table.iter().filter(|c| c.orientation() == Orientation::Horizontal) {
        let row = h.stratum_cell();
        let first_odd = h.id.start + (1 - h.id.start.rem_euclid(2));
        for col in (first_odd..h.end).step_by(2) {
            if let Some(v) = table.locate_cell(Orientation::Vertical, (col + 1) / 2, row) {
                out.insert((h.id, v.id));
            }
        }
    }
    out
}

fn into_letter(iv: CrossingInterval) -> Letter {
    Letter { corridor: iv.corridor, sign: iv.sign, source: iv }
}

/// Merges the two families by start, placing the preferred orientation first
/// when a horizontal and a vertical interval overlap.
pub fn merge_families(h: Vec<CrossingInterval>, v: Vec<CrossingInterval>, tie: TieBreak) -> Vec<Letter> {
    let mut out = Vec::with_capacity(h.len() + v.len());
    let (mut hi, mut vi) = (h.into_iter().peekable(), v.into_iter().peekable());
    loop {
        let take_h = match (hi.peek(), vi.peek()) {
            (None, None) => break,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => {
                if a.overlaps(b) {
                    tie == TieBreak::HorizontalFirst
                } else {
                    a.start < b.start
                }
            }
        };
        let next = if take_h { hi.next() } else { vi.next() };
        out.extend(next.map(into_letter));
    }
    // An overlap across parameter 0 puts the pair at opposite ends of the list.
    if out.len() >= 2 {
        let (first, last) = (&out[0], &out[out.len() - 1]);
        if first.orientation() != last.orientation() && first.source.overlaps(&last.source) {
            let want_first = match tie {
                TieBreak::HorizontalFirst => Orientation::Horizontal,
                TieBreak::VerticalFirst => Orientation::Vertical,
            };
            if first.orientation() == want_first {
                out.rotate_left(1);
            }
        }
    }
    out
}

/// The cyclic corridor word `ω_i` of the loop.
pub fn encode_word(lp: &PolyLoop, seq: &DefiningSequence, i: u32) -> Result<CyclicWord, EncodingError> {
    encode_word_with(lp, seq, i, TieBreak::default())
}

pub fn encode_word_with(
    lp: &PolyLoop,
    seq: &DefiningSequence,
    i: u32,
    tie: TieBreak,
) -> Result<CyclicWord, EncodingError> {
    let table = LevelCorridors::new(seq, i)?;
    encode_with_table(lp, &table, tie)
}

pub fn encode_with_table(lp: &PolyLoop, table: &LevelCorridors, tie: TieBreak) -> Result<CyclicWord, EncodingError> {
    let (h, v) = crossing_intervals_with(lp, table)?;
    Ok(CyclicWord {
        level: table.level,
        letters: merge_families(h, v, tie),
        commutes: crossing_relation_with(table),
    })
}

/// A level-`i+1` pair of letters in the two substrata of one level-`i` stratum
/// that together make up a level-`i` letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Merge {
    pub fine_first: usize,
    pub fine_second: usize,
    pub coarse: usize,
}

/// Letter correspondence between `ω_i` (coarse) and `ω_{i+1}` (fine), by position.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct RefinementCorrespondence {
    /// Per coarse letter: the fine letters at the two ends of its interval.
    pub ends: Vec<(usize, usize)>,
    pub merges: Vec<Merge>,
}

impl RefinementCorrespondence {
    pub fn new(ends: Vec<(usize, usize)>, merges: Vec<Merge>) -> Self {
        RefinementCorrespondence { ends, merges }
    }
}

fn is_substratum(fine_cell: i64, coarse_cell: i64) -> bool {
    fine_cell == 3 * coarse_cell || fine_cell == 3 * coarse_cell + 2
}

/// Checks (and returns) the correspondence between two consecutive words of one loop.
pub fn refine(coarse: &CyclicWord, fine: &CyclicWord) -> Result<RefinementCorrespondence, EncodingError> {
    let level = coarse.level;
    let violation = |detail: String| EncodingError::RefinementViolation { level, detail };
    if fine.level != level + 1 {
        return Err(violation(format!("fine word has level {}", fine.level)));
    }
    let mut by_start: HashMap<(Orientation, &Rational), usize> = HashMap::new();
    let mut by_end: HashMap<(Orientation, &Rational), usize> = HashMap::new();
    for (idx, l) in fine.letters.iter().enumerate() {
        by_start.insert((l.orientation(), &l.source.start), idx);
        by_end.insert((l.orientation(), &l.source.end), idx);
    }
    let nested = |c: &Letter, f: &Letter| {
        let (cs, fs) = (2 * c.corridor.stratum - 1, 2 * f.corridor.stratum - 1);
        f.sign == c.sign && is_substratum(fs, cs) && 3 * c.corridor.start <= f.corridor.start
    };
    let mut ends = Vec::with_capacity(coarse.len());
    for (idx, c) in coarse.letters.iter().enumerate() {
        let o = c.orientation();
        let first = by_start.get(&(o, &c.source.start)).copied();
        let last = by_end.get(&(o, &c.source.end)).copied();
        match (first, last) {
            (Some(a), Some(b)) if nested(c, &fine.letters[a]) && nested(c, &fine.letters[b]) => ends.push((a, b)),
            _ => return Err(violation(format!("letter {idx} ({}) has no end sub-letters", c.symbol()))),
        }
    }
    let mut coarse_by_span: HashMap<(Orientation, &Rational, &Rational), usize> = HashMap::new();
    for (idx, c) in coarse.letters.iter().enumerate() {
        coarse_by_span.insert((c.orientation(), &c.source.start, &c.source.end), idx);
    }
    let mut merges = Vec::new();
    for o in [Orientation::Horizontal, Orientation::Vertical] {
        let fam: Vec<usize> = (0..fine.len()).filter(|&k| fine.letters[k].orientation() == o).collect();
        if fam.len() < 2 {
            continue;
        }
        for w in 0..fam.len() {
            let (a, b) = (fam[w], fam[(w + 1) % fam.len()]);
            let (la, lb) = (&fine.letters[a], &fine.letters[b]);
            let (ca, cb) = (la.corridor.stratum * 2 - 1, lb.corridor.stratum * 2 - 1);
            let (ra, rb) = (ca.div_euclid(3), cb.div_euclid(3));
            if ra != rb || ra % 2 == 0 || ca == cb || ca % 3 == 1 || cb % 3 == 1 {
                continue;
            }
            match coarse_by_span.get(&(o, &la.source.start, &lb.source.end)) {
                Some(&coarse) => merges.push(Merge { fine_first: a, fine_second: b, coarse }),
                None => return Err(violation(format!("fine letters {a} and {b} merge to no coarse letter"))),
            }
        }
    }
    merges.sort_by_key(|m| (m.coarse, m.fine_first));
    Ok(RefinementCorrespondence { ends, merges })
}

/// Encodes levels `i` and `i+1` and returns their verified correspondence.
pub fn refinement_map(lp: &PolyLoop, seq: &DefiningSequence, i: u32) -> Result<RefinementCorrespondence, EncodingError> {
    seq.check_level(i + 1)?;
    let coarse = encode_word(lp, seq, i)?;
    let fine = encode_word(lp, seq, i + 1)?;
    refine(&coarse, &fine)
}

/// Junction cell (both indices even) of a level grid.
pub type Junction = (i64, i64);

/// Step of a junction walk for one letter: `(from, to, crossing cell)`.
fn letter_step(j: Junction, l: &SignedCorridor) -> (Junction, (i64, i64)) {
    let s = 2 * l.corridor.stratum - 1;
    match (l.corridor.orientation, l.sign > 0) {
        (Orientation::Horizontal, true) => ((j.0, j.1 + 2), (j.0, s)),
        (Orientation::Horizontal, false) => ((j.0, j.1 - 2), (j.0, s)),
        (Orientation::Vertical, true) => ((j.0 + 2, j.1), (s, j.1)),
        (Orientation::Vertical, false) => ((j.0 - 2, j.1), (s, j.1)),
    }
}

/// Junction where a letter's crossing must start, given the crossing position along the corridor.
fn entry_junction(l: &SignedCorridor, along: i64) -> Junction {
    let s = 2 * l.corridor.stratum - 1;
    let across = if l.sign > 0 { s - 1 } else { s + 1 };
    match l.corridor.orientation {
        Orientation::Horizontal => (along, across),
        Orientation::Vertical => (across, along),
    }
}

/// Walks the word from a start junction; returns the junction sequence or the failing letter index.
fn chain(
    seq: &DefiningSequence,
    table: &LevelCorridors,
    word: &[SignedCorridor],
    start: Junction,
) -> Result<Vec<Junction>, usize> {
    let level = table.level;
    let mut walk = Vec::with_capacity(word.len());
    let mut j = start;
    for (idx, l) in word.iter().enumerate() {
        let along = match l.corridor.orientation {
            Orientation::Horizontal => j.0,
            Orientation::Vertical => j.1,
        };
        let expected = entry_junction(l, along);
        let corridor = table.get(&l.corridor).ok_or(idx)?;
        let inside = corridor.id.start <= along && along < corridor.end;
        let (next, cell) = letter_step(j, l);
        if expected != j
            || !inside
            || !seq.cell_in_space(level, cell.0, cell.1)
            || !seq.cell_in_space(level, j.0, j.1)
            || !seq.cell_in_space(level, next.0, next.1)
        {
            return Err(idx);
        }
        walk.push(j);
        j = next;
    }
    if j != start {
        return Err(word.len());
    }
    Ok(walk)
}

/// Lane point inside a junction cell, in quarter-cell units relative to its corner.
fn lane(from: Junction, to: Junction, at_end: bool) -> (i64, i64) {
    let dx = (to.0 - from.0).signum();
    let dy = (to.1 - from.1).signum();
    let base = if at_end { to } else { from };
    let (qx, qy) = match (dx, dy, at_end) {
        (0, 1, false) => (1, 3),
        (0, 1, true) => (1, 1),
        (0, -1, false) => (3, 1),
        (0, -1, true) => (3, 3),
        (1, 0, false) => (3, 1),
        (1, 0, true) => (1, 1),
        (-1, 0, false) => (1, 3),
        (-1, 0, true) => (3, 3),
        _ => (2, 2),
    };
    (4 * base.0 + qx, 4 * base.1 + qy)
}

/// The polygonal loop of a closed junction walk at `level`: each step runs along
/// a lane a quarter cell off the junction centers, so back-and-forth steps use
/// distinct parallel segments. A walk of length zero becomes a small triangle
/// inside the junction cell.
pub fn walk_loop(level: u32, walk: &[Junction]) -> PolyLoop {
    let d = 4 * pow3(level);
    let pt = |(a, b): (i64, i64)| Point::new(Rational::new(a, d), Rational::new(b, d));
    if walk.len() <= 1 {
        let j = walk.first().copied().unwrap_or((0, 0));
        return PolyLoop::new(vec![
            pt((4 * j.0 + 1, 4 * j.1 + 1)),
            pt((4 * j.0 + 3, 4 * j.1 + 1)),
            pt((4 * j.0 + 1, 4 * j.1 + 3)),
        ]);
    }
    let mut v = Vec::with_capacity(2 * walk.len());
    for k in 0..walk.len() {
        let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
        v.push(pt(lane(a, b, false)));
        v.push(pt(lane(a, b, true)));
    }
    PolyLoop::new(v)
}

/// Candidate start junctions of a word, smallest coordinates first.
fn start_candidates(table: &LevelCorridors, first: &SignedCorridor) -> Vec<Junction> {
    let Some(c) = table.get(&first.corridor) else { return Vec::new() };
    let lo = c.id.start + c.id.start.rem_euclid(2);
    let mut out: Vec<Junction> = (lo..c.end).step_by(2).map(|a| entry_junction(first, a)).collect();
    out.sort();
    out
}

/// A canonical loop in `S_i` traversing the given corridors in order.
pub fn realize_symbols(
    seq: &DefiningSequence,
    level: u32,
    word: &[SignedCorridor],
    basepoint: Junction,
) -> Result<PolyLoop, EncodingError> {
    seq.check_level(level)?;
    if let Some(l) = word.iter().find(|l| l.corridor.level != level) {
        return Err(EncodingError::MixedLevels(level, l.corridor.level));
    }
    if word.is_empty() {
        return Ok(walk_loop(level, &[basepoint]));
    }
    let table = LevelCorridors::new(seq, level)?;
    if let Some(l) = word.iter().find(|l| table.get(&l.corridor).is_none()) {
        return Err(EncodingError::UnknownCorridor(l.corridor));
    }
    let mut furthest = 0;
    for start in start_candidates(&table, &word[0]) {
        match chain(seq, &table, word, start) {
            Ok(walk) => return Ok(walk_loop(level, &walk)),
            Err(idx) => furthest = furthest.max(idx),
        }
    }
    let n = word.len();
    let first = furthest.min(n - 1);
    let first = if furthest == 0 { 0 } else { first.saturating_sub(1) };
    Err(EncodingError::Unroutable { first, second: (first + 1) % n })
}

/// Realizes a cyclic word; the empty word becomes a triangle in the corner junction cell.
pub fn realize_word(word: &CyclicWord, seq: &DefiningSequence) -> Result<PolyLoop, EncodingError> {
    realize_symbols(seq, word.level, &word.symbols(), (0, 0))
}

/// The letters produced by a closed junction walk.
pub fn walk_symbols(table: &LevelCorridors, walk: &[Junction]) -> Option<Vec<SignedCorridor>> {
    let mut out = Vec::with_capacity(walk.len());
    for k in 0..walk.len() {
        let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
        let (o, sign, stratum_cell, along) = match (b.0 - a.0, b.1 - a.1) {
            (0, 2) => (Orientation::Horizontal, 1, a.1 + 1, a.0),
            (0, -2) => (Orientation::Horizontal, -1, a.1 - 1, a.0),
            (2, 0) => (Orientation::Vertical, 1, a.0 + 1, a.1),
            (-2, 0) => (Orientation::Vertical, -1, a.0 - 1, a.1),
            _ => return None,
        };
        let c = table.locate_cell(o, (stratum_cell + 1) / 2, along)?;
        out.push(SignedCorridor::new(c.id, sign));
    }
    Some(out)
}
