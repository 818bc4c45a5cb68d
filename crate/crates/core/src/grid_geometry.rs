//! Sierpiński-like spaces on the ternary grid.
//!
//! Level `i` uses the grid of `3^i × 3^i` closed cells; cell `(t, u)` is
//! `[t/3^i, (t+1)/3^i] × [u/3^i, (u+1)/3^i]`. The candidate holes of level `i`
//! are the cells with both indices odd, i.e. `[(2k−1)/3^i, 2k/3^i] ×
//! [(2m−1)/3^i, 2m/3^i]`. A defining sequence removes the interiors of a chosen
//! subset of the eligible ones, level by level.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::{pow3, Point, Rational};

/// Deepest level accepted for any defining sequence.
pub const MAX_DEPTH: u32 = 20;
/// Deepest level for the procedural full carpet (it materialises every hole).
pub const MAX_FULL_CARPET_DEPTH: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("level {level} is outside 1..={depth}")]
    LevelOutOfRange { level: u32, depth: u32 },
    #[error("depth {0} is not supported")]
    UnsupportedDepth(u32),
    #[error("square {0} is not eligible")]
    IneligibleSquare(GridSquare),
    #[error("squares {0} and {1} overlap")]
    OverlappingSquares(GridSquare, GridSquare),
    #[error("malformed space description: {0}")]
    Malformed(String),
}

/// A candidate hole `[(2k−1)/3^i, 2k/3^i] × [(2m−1)/3^i, 2m/3^i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridSquare {
    pub level: u32,
    pub k: i64,
    pub m: i64,
}

impl GridSquare {
    pub fn new(level: u32, k: i64, m: i64) -> Self {
        GridSquare { level, k, m }
    }

    /// Whether the square sits inside `[0,1]²` on a supported level.
    pub fn in_unit_square(&self) -> bool {
        self.level >= 1
            && self.level <= MAX_DEPTH
            && self.k >= 1
            && self.m >= 1
            && 2 * self.k <= pow3(self.level)
            && 2 * self.m <= pow3(self.level)
    }

    pub fn x_range(&self) -> (Rational, Rational) {
        let n = pow3(self.level);
        (Rational::new(2 * self.k - 1, n), Rational::new(2 * self.k, n))
    }

    pub fn y_range(&self) -> (Rational, Rational) {
        let n = pow3(self.level);
        (Rational::new(2 * self.m - 1, n), Rational::new(2 * self.m, n))
    }

    pub fn center(&self) -> Point {
        let d = 2 * pow3(self.level);
        Point::new(Rational::new(4 * self.k - 1, d), Rational::new(4 * self.m - 1, d))
    }

    pub fn side(&self) -> Rational {
        Rational::grid_unit(self.level)
    }

    /// Squared diameter `2 / 9^level`; the diameter itself is `√2 / 3^level`.
    pub fn diameter_squared(&self) -> Rational {
        let s = self.side();
        &(&s * &s) * &Rational::from_integer(2)
    }

    /// Cell indices of this square on the grid of `level`.
    pub fn cell(&self) -> (i64, i64) {
        (2 * self.k - 1, 2 * self.m - 1)
    }

    /// Half-open cell-index ranges covered on the finer grid of level `j >= self.level`.
    pub fn cell_span(&self, j: u32) -> ((i64, i64), (i64, i64)) {
        let f = pow3(j - self.level);
        (
            (f * (2 * self.k - 1), f * 2 * self.k),
            (f * (2 * self.m - 1), f * 2 * self.m),
        )
    }

    /// Closed containment of `self` in `other`.
    pub fn contained_in(&self, other: &GridSquare) -> bool {
        let (ax, ay) = (self.x_range(), self.y_range());
        let (bx, by) = (other.x_range(), other.y_range());
        bx.0 <= ax.0 && ax.1 <= bx.1 && by.0 <= ay.0 && ay.1 <= by.1
    }

    /// Whether the open interiors of the two squares meet.
    pub fn interiors_meet(&self, other: &GridSquare) -> bool {
        let (ax, ay) = (self.x_range(), self.y_range());
        let (bx, by) = (other.x_range(), other.y_range());
        ax.0 < bx.1 && bx.0 < ax.1 && ay.0 < by.1 && by.0 < ay.1
    }

    /// Whether `p` lies in the open interior.
    pub fn interior_contains(&self, p: &Point) -> bool {
        let (x, y) = (self.x_range(), self.y_range());
        x.0 < p.x && p.x < x.1 && y.0 < p.y && p.y < y.1
    }
}

impl fmt::Display for GridSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.level, self.k, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Explicit,
    FullCarpet,
}

/// Which eligible squares are removed at each level `1..=depth`.
#[derive(Debug, Clone)]
pub struct DefiningSequence {
    depth: u32,
    pattern: Pattern,
    removed: BTreeSet<GridSquare>,
    lookup: HashSet<GridSquare>,
    // (level, m) -> sorted k of removed squares in that row of holes
    by_row: BTreeMap<(u32, i64), Vec<i64>>,
    // (level, k) -> sorted m
    by_col: BTreeMap<(u32, i64), Vec<i64>>,
}

impl PartialEq for DefiningSequence {
    fn eq(&self, other: &Self) -> bool {
        self.depth == other.depth && self.pattern == other.pattern && self.removed == other.removed
    }
}

impl Eq for DefiningSequence {}

/// Is the level-`i` candidate `(k, m)` outside every coarser candidate?
fn is_eligible(i: u32, k: i64, m: i64) -> bool {
    let (t, u) = (2 * k - 1, 2 * m - 1);
    (1..i).all(|s| {
        let f = pow3(i - s);
        let (ts, us) = (t / f, u / f);
        !(ts % 2 == 1 && us % 2 == 1)
    })
}

fn check_level(level: u32, depth: u32) -> Result<(), GeometryError> {
    if level == 0 || level > depth {
        Err(GeometryError::LevelOutOfRange { level, depth })
    } else {
        Ok(())
    }
}

impl DefiningSequence {
    /// An explicit choice of removed squares. Every square must be eligible and
    /// of level `<= depth`.
    pub fn explicit(
        depth: u32,
        removed: impl IntoIterator<Item = GridSquare>,
    ) -> Result<Self, GeometryError> {
        if depth == 0 || depth > MAX_DEPTH {
            return Err(GeometryError::UnsupportedDepth(depth));
        }
        let removed: BTreeSet<GridSquare> = removed.into_iter().collect();
        for sq in &removed {
            if !sq.in_unit_square() || sq.level > depth || !is_eligible(sq.level, sq.k, sq.m) {
                return Err(GeometryError::IneligibleSquare(*sq));
            }
        }
        // Eligible squares never overlap; the check below guards the indexes.
        let seq = Self::build(depth, Pattern::Explicit, removed);
        for sq in &seq.removed {
            for s in 1..sq.level {
                let f = pow3(sq.level - s);
                let (t, u) = sq.cell();
                let coarse = GridSquare::new(s, (t / f + 1) / 2, (u / f + 1) / 2);
                if (t / f) % 2 == 1 && (u / f) % 2 == 1 && seq.lookup.contains(&coarse) {
                    return Err(GeometryError::OverlappingSquares(coarse, *sq));
                }
            }
        }
        Ok(seq)
    }

    /// The procedural pattern removing every eligible square of every level `<= depth`.
    pub fn full_carpet(depth: u32) -> Result<Self, GeometryError> {
        if depth == 0 || depth > MAX_FULL_CARPET_DEPTH {
            return Err(GeometryError::UnsupportedDepth(depth));
        }
        let mut removed = BTreeSet::new();
        for i in 1..=depth {
            removed.extend(eligible_level(i));
        }
        Ok(Self::build(depth, Pattern::FullCarpet, removed))
    }

    fn build(depth: u32, pattern: Pattern, removed: BTreeSet<GridSquare>) -> Self {
        let mut by_row: BTreeMap<(u32, i64), Vec<i64>> = BTreeMap::new();
        let mut by_col: BTreeMap<(u32, i64), Vec<i64>> = BTreeMap::new();
        for sq in &removed {
            by_row.entry((sq.level, sq.m)).or_default().push(sq.k);
            by_col.entry((sq.level, sq.k)).or_default().push(sq.m);
        }
        for v in by_row.values_mut().chain(by_col.values_mut()) {
            v.sort_unstable();
        }
        let lookup = removed.iter().copied().collect();
        DefiningSequence { depth, pattern, removed, lookup, by_row, by_col }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn removed(&self) -> &BTreeSet<GridSquare> {
        &self.removed
    }

    pub fn is_removed(&self, sq: &GridSquare) -> bool {
        self.lookup.contains(sq)
    }

    /// Removed squares of level `<= level`, in canonical order.
    pub fn holes_up_to(&self, level: u32) -> impl Iterator<Item = &GridSquare> {
        self.removed.iter().filter(move |s| s.level <= level)
    }

    /// Highest level that actually has a removed square.
    pub fn max_hole_level(&self) -> Option<u32> {
        self.removed.iter().map(|s| s.level).max()
    }

    /// Whether the space has no holes beyond `level`, so that `S = S_level`.
    /// The procedural full carpet stands for the infinite carpet and never is.
    pub fn is_finite_at(&self, level: u32) -> bool {
        match self.pattern {
            Pattern::FullCarpet => false,
            Pattern::Explicit => self.max_hole_level().is_none_or(|m| m <= level),
        }
    }

    pub fn check_level(&self, level: u32) -> Result<(), GeometryError> {
        check_level(level, self.depth)
    }

    /// Whether the closed cell `(t, u)` of the level-`level` grid lies in `S_level`.
    pub fn cell_in_space(&self, level: u32, t: i64, u: i64) -> bool {
        let n = pow3(level);
        if t < 0 || u < 0 || t >= n || u >= n {
            return false;
        }
        (1..=level).all(|s| {
            let f = pow3(level - s);
            let (ts, us) = (t / f, u / f);
            !(ts % 2 == 1
                && us % 2 == 1
                && self.lookup.contains(&GridSquare::new(s, (ts + 1) / 2, (us + 1) / 2)))
        })
    }

    /// Sorted `k` of removed level-`s` squares in hole row `m`.
    pub(crate) fn row_holes(&self, s: u32, m: i64) -> &[i64] {
        self.by_row.get(&(s, m)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Sorted `m` of removed level-`s` squares in hole column `k`.
    pub(crate) fn col_holes(&self, s: u32, k: i64) -> &[i64] {
        self.by_col.get(&(s, k)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile {
            depth: self.depth,
            pattern: self.pattern,
            removed: match self.pattern {
                Pattern::Explicit => self.removed.iter().map(|s| [s.level as i64, s.k, s.m]).collect(),
                Pattern::FullCarpet => Vec::new(),
            },
        }
    }

    pub fn from_file(file: &SpaceFile) -> Result<Self, GeometryError> {
        match file.pattern {
            Pattern::FullCarpet => Self::full_carpet(file.depth),
            Pattern::Explicit => {
                let mut squares = Vec::with_capacity(file.removed.len());
                for r in &file.removed {
                    let level = u32::try_from(r[0])
                        .map_err(|_| GeometryError::Malformed(format!("bad level {}", r[0])))?;
                    squares.push(GridSquare::new(level, r[1], r[2]));
                }
                Self::explicit(file.depth, squares)
            }
        }
    }
}

/// On-disk form of a defining sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub depth: u32,
    pub pattern: Pattern,
    #[serde(default)]
    pub removed: Vec<[i64; 3]>,
}

fn eligible_level(i: u32) -> Vec<GridSquare> {
    let half = pow3(i) / 2;
    let mut out = Vec::new();
    for k in 1..=half {
        for m in 1..=half {
            if is_eligible(i, k, m) {
                out.push(GridSquare::new(i, k, m));
            }
        }
    }
    out
}

/// All candidate squares of level `i` not contained in a candidate of a coarser
/// level. Does not depend on which squares the sequence removes.
pub fn eligible_squares(seq: &DefiningSequence, i: u32) -> Result<BTreeSet<GridSquare>, GeometryError> {
    seq.check_level(i)?;
    Ok(eligible_level(i).into_iter().collect())
}

/// Whether `p` belongs to `S_i`, i.e. avoids the open interior of every removed
/// square of level `<= i`.
pub fn level_space_contains(seq: &DefiningSequence, i: u32, p: &Point) -> Result<bool, GeometryError> {
    seq.check_level(i)?;
    let zero = Rational::zero();
    let one = Rational::one();
    if p.x < zero || p.x > one || p.y < zero || p.y > one {
        return Ok(false);
    }
    for s in 1..=i {
        let scale = Rational::from_integer(pow3(s));
        let (sx, sy) = (&p.x * &scale, &p.y * &scale);
        if sx.is_integer() || sy.is_integer() {
            continue;
        }
        let (tx, ty) = (sx.floor(), sy.floor());
        if tx % 2 == 1 && ty % 2 == 1 && seq.is_removed(&GridSquare::new(s, (tx + 1) / 2, (ty + 1) / 2)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn letter(self) -> char {
        match self {
            Orientation::Horizontal => 'H',
            Orientation::Vertical => 'V',
        }
    }

    pub fn other(self) -> Self {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

/// Deterministic corridor identifier: orientation, level, stratum and the grid
/// index where the corridor's extent starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorridorId {
    pub orientation: Orientation,
    pub level: u32,
    pub stratum: i64,
    pub start: i64,
}

impl CorridorId {
    pub fn start_rational(&self) -> Rational {
        Rational::new(self.start, pow3(self.level))
    }
}

impl fmt::Display for CorridorId {
    /// `H:level:stratum:start`, with the start as a reduced `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}",
            self.orientation.letter(),
            self.level,
            self.stratum,
            self.start_rational()
        )
    }
}

impl std::str::FromStr for CorridorId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeometryError::Malformed(format!("corridor id {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let orientation = match parts[0] {
            "H" => Orientation::Horizontal,
            "V" => Orientation::Vertical,
            _ => return Err(bad()),
        };
        let level: u32 = parts[1].parse().map_err(|_| bad())?;
        if level == 0 || level > MAX_DEPTH {
            return Err(bad());
        }
        let stratum: i64 = parts[2].parse().map_err(|_| bad())?;
        let start: Rational = parts[3].parse().map_err(|_| bad())?;
        let scaled = &start * &Rational::from_integer(pow3(level));
        if !scaled.is_integer() {
            return Err(bad());
        }
        Ok(CorridorId { orientation, level, stratum, start: scaled.floor() })
    }
}

/// The closure of one component of `S_i` intersected with an open stratum strip.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Corridor {
    pub id: CorridorId,
    /// Grid index (level `id.level`) where the extent ends; the extent along
    /// the long axis is `[id.start, end] / 3^level`.
    pub end: i64,
}

impl Corridor {
    pub fn orientation(&self) -> Orientation {
        self.id.orientation
    }

    pub fn level(&self) -> u32 {
        self.id.level
    }

    /// Row (horizontal) or column (vertical) cell index of the stratum.
    pub fn stratum_cell(&self) -> i64 {
        2 * self.id.stratum - 1
    }

    /// Extent along the long axis.
    pub fn extent(&self) -> (Rational, Rational) {
        let n = pow3(self.id.level);
        (Rational::new(self.id.start, n), Rational::new(self.end, n))
    }

    /// The two boundary-line coordinates across the corridor (`y` for
    /// horizontal corridors, `x` for vertical ones).
    pub fn cross_range(&self) -> (Rational, Rational) {
        let n = pow3(self.id.level);
        (Rational::new(2 * self.id.stratum - 1, n), Rational::new(2 * self.id.stratum, n))
    }

    pub fn center_line(&self) -> Rational {
        Rational::new(4 * self.id.stratum - 1, 2 * pow3(self.id.level))
    }

    /// Closed rectangle `(x_range, y_range)`.
    pub fn rect(&self) -> ((Rational, Rational), (Rational, Rational)) {
        match self.id.orientation {
            Orientation::Horizontal => (self.extent(), self.cross_range()),
            Orientation::Vertical => (self.cross_range(), self.extent()),
        }
    }

    /// Cell-index rectangle `(t0..t1, u0..u1)` (half-open) on its level's grid.
    pub fn cell_rect(&self) -> ((i64, i64), (i64, i64)) {
        let s = self.stratum_cell();
        match self.id.orientation {
            Orientation::Horizontal => ((self.id.start, self.end), (s, s + 1)),
            Orientation::Vertical => ((s, s + 1), (self.id.start, self.end)),
        }
    }

    /// Whether the inner regions (open across, closed along) of two corridors meet.
    pub fn inner_regions_meet(&self, other: &Corridor) -> bool {
        let (ax, ay) = self.inner_bounds();
        let (bx, by) = other.inner_bounds();
        overlaps(&ax, &bx) && overlaps(&ay, &by)
    }

    // (lo, hi, lo_open, hi_open) per axis
    fn inner_bounds(&self) -> (Bound, Bound) {
        let (ext, cross) = (self.extent(), self.cross_range());
        let along = Bound { lo: ext.0, hi: ext.1, open: false };
        let across = Bound { lo: cross.0, hi: cross.1, open: true };
        match self.id.orientation {
            Orientation::Horizontal => (along, across),
            Orientation::Vertical => (across, along),
        }
    }
}

struct Bound {
    lo: Rational,
    hi: Rational,
    open: bool,
}

fn overlaps(a: &Bound, b: &Bound) -> bool {
    if a.open || b.open {
        a.lo < b.hi && b.lo < a.hi
    } else {
        a.lo <= b.hi && b.lo <= a.hi
    }
}

/// Half-open cell-index intervals blocked by removed squares in the stratum strip
/// of cell index `cell` (a row for horizontal corridors, a column for vertical).
fn blocked_spans(seq: &DefiningSequence, i: u32, orientation: Orientation, cell: i64) -> Vec<(i64, i64)> {
    let mut spans = Vec::new();
    for s in 1..=i {
        let f = pow3(i - s);
        let cs = cell / f;
        if cs % 2 == 0 {
            continue;
        }
        let index = (cs + 1) / 2;
        let along = match orientation {
            Orientation::Horizontal => seq.row_holes(s, index),
            Orientation::Vertical => seq.col_holes(s, index),
        };
        spans.extend(along.iter().map(|&a| (f * (2 * a - 1), f * 2 * a)));
    }
    spans.sort_unstable();
    spans
}

/// Corridors of one orientation on one stratum, ordered along the long axis.
pub fn stratum_corridors(seq: &DefiningSequence, i: u32, orientation: Orientation, stratum: i64) -> Vec<Corridor> {
    let n = pow3(i);
    let cell = 2 * stratum - 1;
    let mut out = Vec::new();
    let mut start = 0;
    for (lo, hi) in blocked_spans(seq, i, orientation, cell) {
        if lo > start {
            out.push(Corridor { id: CorridorId { orientation, level: i, stratum, start }, end: lo });
        }
        start = start.max(hi);
    }
    if start < n {
        out.push(Corridor { id: CorridorId { orientation, level: i, stratum, start }, end: n });
    }
    out
}

/// All corridors of `S_i`: horizontal ones first, each family ordered by
/// stratum and then by extent start.
pub fn corridors(seq: &DefiningSequence, i: u32) -> Result<Vec<Corridor>, GeometryError> {
    seq.check_level(i)?;
    let strata = pow3(i) / 2;
    let mut out = Vec::new();
    for orientation in [Orientation::Horizontal, Orientation::Vertical] {
        for m in 1..=strata {
            out.extend(stratum_corridors(seq, i, orientation, m));
        }
    }
    Ok(out)
}

/// Corridors of one level, indexed for lookups by stratum.
#[derive(Debug, Clone)]
pub struct LevelCorridors {
    pub level: u32,
    horizontal: BTreeMap<i64, Vec<Corridor>>,
    vertical: BTreeMap<i64, Vec<Corridor>>,
}

impl LevelCorridors {
    pub fn new(seq: &DefiningSequence, i: u32) -> Result<Self, GeometryError> {
        seq.check_level(i)?;
        let mut horizontal = BTreeMap::new();
        let mut vertical = BTreeMap::new();
        for m in 1..=pow3(i) / 2 {
            horizontal.insert(m, stratum_corridors(seq, i, Orientation::Horizontal, m));
            vertical.insert(m, stratum_corridors(seq, i, Orientation::Vertical, m));
        }
        Ok(LevelCorridors { level: i, horizontal, vertical })
    }

    pub fn stratum(&self, orientation: Orientation, stratum: i64) -> &[Corridor] {
        let map = match orientation {
            Orientation::Horizontal => &self.horizontal,
            Orientation::Vertical => &self.vertical,
        };
        map.get(&stratum).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The corridor of the given stratum whose closed extent contains `pos`.
    pub fn locate(&self, orientation: Orientation, stratum: i64, pos: &Rational) -> Option<&Corridor> {
        let scaled = pos * &Rational::from_integer(pow3(self.level));
        self.stratum(orientation, stratum)
            .iter()
            .find(|c| Rational::from_integer(c.id.start) <= scaled && scaled <= Rational::from_integer(c.end))
    }

    /// The corridor of the stratum containing the cell index `along` on its long axis.
    pub fn locate_cell(&self, orientation: Orientation, stratum: i64, along: i64) -> Option<&Corridor> {
        self.stratum(orientation, stratum)
            .iter()
            .find(|c| c.id.start <= along && along < c.end)
    }

    pub fn get(&self, id: &CorridorId) -> Option<&Corridor> {
        self.stratum(id.orientation, id.stratum).iter().find(|c| c.id == *id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Corridor> {
        self.horizontal.values().chain(self.vertical.values()).flatten()
    }
}

/// A closed polygonal curve with exact vertices. The parameter circle is
/// `[0, 1)`; vertex `j` of `n` sits at parameter `j / n` and each edge is
/// traversed affinely.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyLoop {
    pub vertices: Vec<Point>,
}

/// On-disk form of a loop: `{"vertices": [["p/q", "p/q"], ...]}`.
pub type LoopFile = PolyLoop;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum LoopViolation {
    #[error("closed path must end at its first vertex")]
    NotClosed,
    #[error("degenerate edge at vertex {index}")]
    DegenerateEdge { index: usize },
    #[error("vertex {index} lies outside the open unit square")]
    OutsideUnitSquare { index: usize },
    #[error("vertex {index} lies on the level-{level} grid line {axis} = {line}")]
    VertexOnGridLine { index: usize, level: u32, axis: char, line: Rational },
    #[error("edge {edge} enters the interior of removed square {square}")]
    EdgeInHole { edge: usize, square: GridSquare },
    #[error("level {level} exceeds the space depth {depth}")]
    DepthOutOfRange { level: u32, depth: u32 },
}

impl PolyLoop {
    pub fn new(vertices: Vec<Point>) -> Self {
        PolyLoop { vertices }
    }

    /// Builds a loop from a path whose last point repeats the first.
    pub fn from_closed_path(mut path: Vec<Point>) -> Result<Self, LoopViolation> {
        if path.len() < 2 || path.first() != path.last() {
            return Err(LoopViolation::NotClosed);
        }
        path.pop();
        Ok(PolyLoop { vertices: path })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, j: usize) -> (&Point, &Point) {
        let n = self.vertices.len();
        (&self.vertices[j], &self.vertices[(j + 1) % n])
    }

    /// Parameter of vertex `j`.
    pub fn vertex_param(&self, j: usize) -> Rational {
        Rational::new(j as i64, self.vertices.len() as i64)
    }

    /// Global parameter of the point at local position `s ∈ [0,1]` on edge `j`.
    pub fn edge_param(&self, j: usize, s: &Rational) -> Rational {
        &(&Rational::from_integer(j as i64) + s) / &Rational::from_integer(self.vertices.len() as i64)
    }

    /// The point at parameter `t` (taken modulo 1).
    pub fn point_at(&self, t: &Rational) -> Point {
        let n = self.vertices.len() as i64;
        let scaled = t * &Rational::from_integer(n);
        let whole = scaled.floor();
        let frac = &scaled - &Rational::from_integer(whole);
        let j = whole.rem_euclid(n) as usize;
        let (p, q) = self.edge(j);
        p.lerp(q, &frac)
    }

    /// The same curve traversed backwards, still starting at vertex 0.
    pub fn reversed(&self) -> PolyLoop {
        let mut v = Vec::with_capacity(self.vertices.len());
        if let Some(first) = self.vertices.first() {
            v.push(first.clone());
            v.extend(self.vertices[1..].iter().rev().cloned());
        }
        PolyLoop { vertices: v }
    }

    /// Inserts the midpoint of every edge; the image is unchanged.
    pub fn subdivided(&self) -> PolyLoop {
        let mut v = Vec::with_capacity(2 * self.vertices.len());
        for j in 0..self.vertices.len() {
            let (p, q) = self.edge(j);
            v.push(p.clone());
            v.push(p.lerp(q, &Rational::new(1, 2)));
        }
        PolyLoop { vertices: v }
    }
}

fn on_grid_line(c: &Rational, level: u32) -> bool {
    (c * &Rational::from_integer(pow3(level))).is_integer()
}

/// Parameter range `[s0, s1]` of segment `p -> q` inside the closed axis-aligned
/// rectangle, if non-empty (Liang–Barsky clipping in exact arithmetic).
pub fn clip_segment(
    p: &Point,
    q: &Point,
    x: &(Rational, Rational),
    y: &(Rational, Rational),
) -> Option<(Rational, Rational)> {
    let mut s0 = Rational::zero();
    let mut s1 = Rational::one();
    let d = q.sub(p);
    for (pc, dc, lo, hi) in [(&p.x, &d.x, &x.0, &x.1), (&p.y, &d.y, &y.0, &y.1)] {
        if dc.is_zero() {
            if pc < lo || pc > hi {
                return None;
            }
            continue;
        }
        let a = &(lo - pc) / dc;
        let b = &(hi - pc) / dc;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a > s0 {
            s0 = a;
        }
        if b < s1 {
            s1 = b;
        }
        if s0 > s1 {
            return None;
        }
    }
    Some((s0, s1))
}

/// Whether segment `p -> q` meets the open interior of `sq`.
pub fn segment_meets_interior(p: &Point, q: &Point, sq: &GridSquare) -> bool {
    match clip_segment(p, q, &sq.x_range(), &sq.y_range()) {
        Some((s0, s1)) if s0 < s1 => sq.interior_contains(&p.lerp(q, &s0.midpoint(&s1))),
        Some((s0, _)) => sq.interior_contains(&p.lerp(q, &s0)),
        None => false,
    }
}

/// First removed square (by level, then position) whose interior the segment enters.
pub fn first_hole_hit(seq: &DefiningSequence, depth: u32, p: &Point, q: &Point) -> Option<GridSquare> {
    for s in 1..=depth.min(seq.depth()) {
        let n = pow3(s);
        let scale = Rational::from_integer(n);
        let (xa, xb) = (p.x.clone().min(q.x.clone()), p.x.clone().max(q.x.clone()));
        let t0 = (&xa * &scale).floor().max(0);
        let t1 = (&xb * &scale).floor().min(n - 1);
        for t in t0..=t1 {
            if t % 2 == 0 {
                continue;
            }
            let k = (t + 1) / 2;
            let rows = seq.col_holes(s, k);
            if rows.is_empty() {
                continue;
            }
            // y-range of the segment within the column's slab
            let slab = (Rational::new(t, n), Rational::new(t + 1, n));
            let full_y = (Rational::zero(), Rational::one());
            let Some((s0, s1)) = clip_segment(p, q, &slab, &full_y) else { continue };
            let (ya, yb) = (p.lerp(q, &s0).y, p.lerp(q, &s1).y);
            let (ya, yb) = if ya <= yb { (ya, yb) } else { (yb, ya) };
            let u0 = (&ya * &scale).floor();
            let u1 = (&yb * &scale).floor();
            for &m in rows {
                let u = 2 * m - 1;
                if u < u0 || u > u1 {
                    continue;
                }
                let sq = GridSquare::new(s, k, m);
                if segment_meets_interior(p, q, &sq) {
                    return Some(sq);
                }
            }
        }
    }
    None
}

/// Checks the loop invariants against the grid up to `depth`, reporting the
/// first violation.
pub fn validate_loop(lp: &PolyLoop, seq: &DefiningSequence, depth: u32) -> Result<(), LoopViolation> {
    if depth == 0 || depth > seq.depth() {
        return Err(LoopViolation::DepthOutOfRange { level: depth, depth: seq.depth() });
    }
    let n = lp.len();
    if n < 3 {
        return Err(LoopViolation::DegenerateEdge { index: 0 });
    }
    let zero = Rational::zero();
    let one = Rational::one();
    for (index, v) in lp.vertices.iter().enumerate() {
        if v.x <= zero || v.x >= one || v.y <= zero || v.y >= one {
            return Err(LoopViolation::OutsideUnitSquare { index });
        }
        for level in 1..=depth {
            for (axis, c) in [('x', &v.x), ('y', &v.y)] {
                if on_grid_line(c, level) {
                    return Err(LoopViolation::VertexOnGridLine { index, level, axis, line: c.clone() });
                }
            }
        }
    }
    for j in 0..n {
        let (p, q) = lp.edge(j);
        if p == q {
            return Err(LoopViolation::DegenerateEdge { index: j });
        }
    }
    for j in 0..n {
        let (p, q) = lp.edge(j);
        if let Some(square) = first_hole_hit(seq, depth, p, q) {
            return Err(LoopViolation::EdgeInHole { edge: j, square });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(a: i64, b: i64, c: i64, d: i64) -> Point {
        Point::frac(a, b, c, d)
    }

    fn central_square_loop() -> PolyLoop {
        PolyLoop::new(vec![pt(1, 6, 1, 6), pt(5, 6, 1, 6), pt(5, 6, 5, 6), pt(1, 6, 5, 6)])
    }

    #[test]
    fn eligible_level_one_and_two() {
        let seq = DefiningSequence::full_carpet(3).unwrap();
        let q1 = eligible_squares(&seq, 1).unwrap();
        assert_eq!(q1.into_iter().collect::<Vec<_>>(), vec![GridSquare::new(1, 1, 1)]);
        assert_eq!(eligible_squares(&seq, 2).unwrap().len(), 12);
        assert!(matches!(eligible_squares(&seq, 4), Err(GeometryError::LevelOutOfRange { .. })));
    }

    #[test]
    fn eligible_level_three_matches_enumeration() {
        // Exhaustive containment test over k, m in 1..=13 against all coarser candidates.
        let seq = DefiningSequence::full_carpet(3).unwrap();
        let coarse: Vec<GridSquare> = (1..3)
            .flat_map(|s| {
                let h = pow3(s) / 2;
                (1..=h).flat_map(move |k| (1..=h).map(move |m| GridSquare::new(s, k, m)))
            })
            .collect();
        let brute: BTreeSet<GridSquare> = (1..=13)
            .flat_map(|k| (1..=13).map(move |m| GridSquare::new(3, k, m)))
            .filter(|q| !coarse.iter().any(|c| q.contained_in(c)))
            .collect();
        assert_eq!(brute.len(), 96);
        assert_eq!(eligible_squares(&seq, 3).unwrap(), brute);
    }

    #[test]
    fn eligibility_partition() {
        // Every candidate is eligible or inside exactly one coarser eligible square.
        for i in 1..=4u32 {
            let h = pow3(i) / 2;
            for k in 1..=h {
                for m in 1..=h {
                    let q = GridSquare::new(i, k, m);
                    let holders: usize = (1..i)
                        .map(|s| {
                            let hs = pow3(s) / 2;
                            (1..=hs)
                                .flat_map(|a| (1..=hs).map(move |b| GridSquare::new(s, a, b)))
                                .filter(|c| is_eligible(c.level, c.k, c.m) && q.contained_in(c))
                                .count()
                        })
                        .sum();
                    assert_eq!(is_eligible(i, k, m), holders == 0);
                    assert!(holders <= 1, "{q}");
                }
            }
        }
    }

    #[test]
    fn diameters_form_null_sequence() {
        let seq = DefiningSequence::full_carpet(4).unwrap();
        for sq in seq.removed() {
            let n = pow3(sq.level);
            assert_eq!(sq.diameter_squared(), Rational::new(2, n * n));
        }
        let eps2 = Rational::new(1, 100);
        let big = seq.removed().iter().filter(|s| s.diameter_squared() > eps2).count();
        assert_eq!(big, 1 + 12);
    }

    #[test]
    fn space_membership() {
        let seq = DefiningSequence::full_carpet(2).unwrap();
        assert!(!level_space_contains(&seq, 1, &pt(1, 2, 1, 2)).unwrap());
        assert!(level_space_contains(&seq, 1, &pt(1, 3, 1, 2)).unwrap());
        assert!(level_space_contains(&seq, 1, &pt(1, 6, 1, 6)).unwrap());
        // 1/6 is the center of the level-2 hole [1/9, 2/9]^2.
        assert!(!level_space_contains(&seq, 2, &pt(1, 6, 1, 6)).unwrap());
        assert!(level_space_contains(&seq, 2, &pt(1, 9, 1, 6)).unwrap());
        assert!(matches!(level_space_contains(&seq, 3, &pt(1, 6, 1, 6)), Err(GeometryError::LevelOutOfRange { .. })));
    }

    #[test]
    fn corridors_without_and_with_center_hole() {
        let empty = DefiningSequence::explicit(1, []).unwrap();
        let c = corridors(&empty, 1).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].rect(), ((Rational::zero(), Rational::one()), (Rational::new(1, 3), Rational::new(2, 3))));
        assert_eq!(c[1].orientation(), Orientation::Vertical);

        let holed = DefiningSequence::explicit(1, [GridSquare::new(1, 1, 1)]).unwrap();
        let c = corridors(&holed, 1).unwrap();
        assert_eq!(c.len(), 4);
        let h: Vec<_> = c.iter().filter(|c| c.orientation() == Orientation::Horizontal).map(|c| c.extent()).collect();
        assert_eq!(h, vec![(Rational::zero(), Rational::new(1, 3)), (Rational::new(2, 3), Rational::one())]);
    }

    #[test]
    fn full_carpet_level_two_corridor_count() {
        // Hand count: hole rows 1 and 7 give 5 single-cell corridors each,
        // rows 3 and 5 give 4 each (the central hole removes one more cell).
        let seq = DefiningSequence::full_carpet(2).unwrap();
        let c = corridors(&seq, 2).unwrap();
        assert_eq!(c.len(), 36);
        assert!(c.iter().all(|c| c.end - c.id.start == 1));
    }

    #[test]
    fn corridor_disjointness() {
        let seq = DefiningSequence::full_carpet(3).unwrap();
        for i in 1..=3 {
            let c = corridors(&seq, i).unwrap();
            for (a, x) in c.iter().enumerate() {
                for y in &c[a + 1..] {
                    if x.orientation() == y.orientation() {
                        assert!(!x.inner_regions_meet(y), "{} {}", x.id, y.id);
                    }
                }
            }
        }
    }

    #[test]
    fn corridor_id_round_trip() {
        let id = CorridorId { orientation: Orientation::Vertical, level: 2, stratum: 3, start: 6 };
        assert_eq!(id.to_string(), "V:2:3:2/3");
        assert_eq!("V:2:3:2/3".parse::<CorridorId>().unwrap(), id);
        assert!("V:2:3:1/2".parse::<CorridorId>().is_err());
    }

    #[test]
    fn validate_examples() {
        let seq = DefiningSequence::full_carpet(2).unwrap();
        assert_eq!(validate_loop(&central_square_loop(), &seq, 1), Ok(()));
        let two = PolyLoop::new(vec![pt(1, 6, 1, 6), pt(1, 5, 1, 6)]);
        assert_eq!(validate_loop(&two, &seq, 1), Err(LoopViolation::DegenerateEdge { index: 0 }));
        let on_line = PolyLoop::new(vec![pt(1, 3, 1, 2), pt(1, 6, 1, 6), pt(1, 5, 1, 7)]);
        assert!(matches!(
            validate_loop(&on_line, &seq, 1),
            Err(LoopViolation::VertexOnGridLine { index: 0, level: 1, axis: 'x', .. })
        ));
        let through = PolyLoop::new(vec![pt(1, 6, 1, 2), pt(5, 6, 1, 2), pt(5, 6, 1, 7)]);
        assert_eq!(
            validate_loop(&through, &seq, 1),
            Err(LoopViolation::EdgeInHole { edge: 0, square: GridSquare::new(1, 1, 1) })
        );
        assert_eq!(PolyLoop::from_closed_path(vec![pt(1, 6, 1, 6), pt(1, 5, 1, 6)]), Err(LoopViolation::NotClosed));
    }

    #[test]
    fn edge_along_hole_boundary_is_not_inside() {
        let sq = GridSquare::new(1, 1, 1);
        let p = pt(1, 3, 1, 6);
        let q = pt(1, 3, 5, 6);
        assert!(!segment_meets_interior(&p, &q, &sq));
        assert!(segment_meets_interior(&pt(1, 6, 1, 2), &pt(5, 6, 1, 2), &sq));
        assert!(!segment_meets_interior(&pt(1, 6, 1, 6), &pt(1, 3, 1, 3), &sq));
    }

    #[test]
    fn space_file_round_trip() {
        let seq = DefiningSequence::explicit(2, [GridSquare::new(1, 1, 1), GridSquare::new(2, 1, 1)]).unwrap();
        let json = serde_json::to_string(&seq.to_file()).unwrap();
        assert_eq!(json, r#"{"depth":2,"pattern":"explicit","removed":[[1,1,1],[2,1,1]]}"#);
        let back: SpaceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(DefiningSequence::from_file(&back).unwrap(), seq);
        assert!(DefiningSequence::explicit(2, [GridSquare::new(2, 2, 2)]).is_err());
    }
}
