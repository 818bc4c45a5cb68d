//! Images of loops in the free groups `π₁(S_i)`.
//!
//! Every removed square contributes one generator. Each hole center gets a ray
//! `z + t·(1, −q)` with the same steep slope `q = 2·3^N + 1`; two such rays
//! never meet, and each stays inside the level-`N` column of its center. The
//! signed sequence of ray crossings, freely reduced, is the loop's element of
//! the fundamental group of the plane minus the centers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::grid_geometry::{DefiningSequence, GeometryError, GridSquare, PolyLoop};
use crate::rational::{pow3, Point, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeGroupError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("vertex {vertex} lies on the ray of hole {hole}")]
    VertexOnRay { vertex: usize, hole: GridSquare },
    #[error("edge {edge} runs along the ray of hole {hole}")]
    EdgeAlongRay { edge: usize, hole: GridSquare },
    #[error("malformed free word: {0}")]
    Malformed(String),
}

/// A generator with exponent `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeLetter {
    pub hole: GridSquare,
    pub exp: i8,
}

impl FreeLetter {
    pub fn new(hole: GridSquare, exp: i8) -> Self {
        FreeLetter { hole, exp }
    }

    pub fn inverse(self) -> Self {
        FreeLetter { hole: self.hole, exp: -self.exp }
    }
}

impl fmt::Display for FreeLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g[{},{},{}]", self.hole.level, self.hole.k, self.hole.m)?;
        if self.exp < 0 {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct FreeWord(pub Vec<FreeLetter>);

impl FreeWord {
    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Exponent sum per generator.
    pub fn exponent_sums(&self) -> BTreeMap<GridSquare, i64> {
        let mut out = BTreeMap::new();
        for l in &self.0 {
            *out.entry(l.hole).or_insert(0) += i64::from(l.exp);
        }
        out
    }
}

impl fmt::Display for FreeWord {
    /// Space-separated generators; the identity prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, l) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for FreeWord {
    type Err = FreeGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(FreeWord::empty());
        }
        let bad = |t: &str| FreeGroupError::Malformed(t.to_string());
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (body, exp) = match tok.strip_suffix("^-1") {
                Some(b) => (b, -1),
                None => (tok, 1),
            };
            let inner = body.strip_prefix("g[").and_then(|b| b.strip_suffix(']')).ok_or_else(|| bad(tok))?;
            let nums: Vec<i64> = inner
                .split(',')
                .map(|n| n.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(tok))?;
            let [level, k, m] = nums[..] else { return Err(bad(tok)) };
            let level = u32::try_from(level).map_err(|_| bad(tok))?;
            out.push(FreeLetter::new(GridSquare::new(level, k, m), exp));
        }
        Ok(FreeWord(out))
    }
}

impl serde::Serialize for FreeWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for FreeWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Free reduction with a stack.
pub fn reduce(word: &FreeWord) -> FreeWord {
    let mut out: Vec<FreeLetter> = Vec::with_capacity(word.len());
    for &l in &word.0 {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    FreeWord(out)
}

/// Reduced word with matching inverse ends stripped: a canonical
/// representative of the conjugacy class up to rotation.
pub fn cyclic_reduce(word: &FreeWord) -> FreeWord {
    let r = reduce(word);
    let (mut a, mut b) = (0, r.len());
    while b - a >= 2 && r.0[a] == r.0[b - 1].inverse() {
        a += 1;
        b -= 1;
    }
    FreeWord(r.0[a..b].to_vec())
}

/// Drops every generator of level above `level` and reduces: the map
/// `π₁(S_{level+1}) → π₁(S_level)` (applied repeatedly for larger gaps).
pub fn bonding_map(word: &FreeWord, level: u32) -> FreeWord {
    reduce(&FreeWord(word.0.iter().filter(|l| l.hole.level <= level).copied().collect()))
}

/// A hole center with its ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Puncture {
    pub hole: GridSquare,
    pub center: Point,
    /// Ray direction `(1, −slope)`.
    pub slope: i64,
}

impl Puncture {
    pub fn direction(&self) -> Point {
        Point::new(Rational::one(), Rational::from_integer(-self.slope))
    }
}

/// Ray slope shared by all punctures of a sequence.
pub fn ray_slope(seq: &DefiningSequence) -> i64 {
    2 * pow3(seq.depth()) + 1
}

pub fn punctures(seq: &DefiningSequence, level: u32) -> Vec<Puncture> {
    let slope = ray_slope(seq);
    seq.holes_up_to(level).map(|&hole| Puncture { hole, center: hole.center(), slope }).collect()
}

/// One signed crossing of a ray, located on the loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayCrossing {
    pub edge: usize,
    pub at: Rational,
    pub letter: FreeLetter,
}

/// Buckets hole centers by level-`depth` column, each sorted by center `y`.
struct RayIndex {
    columns: HashMap<i64, Vec<(Rational, GridSquare)>>,
    depth: u32,
    slope: i64,
}

impl RayIndex {
    fn new(seq: &DefiningSequence, level: u32) -> Self {
        let depth = seq.depth();
        let n = pow3(depth);
        let mut columns: HashMap<i64, Vec<(Rational, GridSquare)>> = HashMap::new();
        for hole in seq.holes_up_to(level) {
            let c = hole.center();
            let col = (&c.x * &Rational::from_integer(n)).floor();
            columns.entry(col).or_default().push((c.y, *hole));
        }
        for v in columns.values_mut() {
            v.sort();
        }
        RayIndex { columns, depth, slope: ray_slope(seq) }
    }

    /// Holes whose ray might meet the segment.
    fn candidates<'a>(&'a self, p: &Point, q: &Point) -> impl Iterator<Item = GridSquare> + 'a {
        let n = Rational::from_integer(pow3(self.depth));
        let (x0, x1) = if p.x <= q.x { (&p.x, &q.x) } else { (&q.x, &p.x) };
        let min_y = if p.y <= q.y { p.y.clone() } else { q.y.clone() };
        let (c0, c1) = ((x0 * &n).floor(), (x1 * &n).floor());
        (c0..=c1).flat_map(move |c| {
            let holes = self.columns.get(&c).map(Vec::as_slice).unwrap_or(&[]);
            let from = holes.partition_point(|(y, _)| *y < min_y);
            holes[from..].iter().map(|(_, h)| *h)
        })
    }
}

/// Intersection of segment `p -> q` with the ray from `z`, as `(s, sign)`.
fn ray_hit(
    p: &Point,
    q: &Point,
    z: &Point,
    d: &Point,
) -> Result<Option<(Rational, i8)>, ()> {
    let e = q.sub(p);
    let denom = e.cross(d);
    let zp = z.sub(p);
    if denom.is_zero() {
        // parallel; only collinear overlap with the ray matters
        if zp.cross(d).is_zero() {
            let tp = p.sub(z).dot(d);
            let tq = q.sub(z).dot(d);
            if tp.signum() >= 0 || tq.signum() >= 0 {
                return Err(());
            }
        }
        return Ok(None);
    }
    let s = &zp.cross(d) / &denom;
    let t = &zp.cross(&e) / &denom;
    if s.signum() < 0 || s > Rational::one() || t.signum() < 0 {
        return Ok(None);
    }
    if s.is_zero() || s == Rational::one() {
        return Err(());
    }
    let sign = if d.cross(&e).signum() > 0 { 1 } else { -1 };
    Ok(Some((s, sign)))
}

/// All ray crossings of holes up to `level`, in loop order.
pub fn ray_crossings(lp: &PolyLoop, seq: &DefiningSequence, level: u32) -> Result<Vec<RayCrossing>, FreeGroupError> {
    seq.check_level(level)?;
    let index = RayIndex::new(seq, level);
    let d = Point::new(Rational::one(), Rational::from_integer(-index.slope));
    let mut out = Vec::new();
    for edge in 0..lp.len() {
        let (p, q) = lp.edge(edge);
        let mut hits = Vec::new();
        for hole in index.candidates(p, q) {
            let z = hole.center();
            match ray_hit(p, q, &z, &d) {
                Ok(Some((s, sign))) => hits.push(RayCrossing { edge, at: s, letter: FreeLetter::new(hole, sign) }),
                Ok(None) => {}
                Err(()) => {
                    let on_p = p.sub(&z).cross(&d).is_zero();
                    let on_q = q.sub(&z).cross(&d).is_zero();
                    return Err(if on_p || on_q {
                        FreeGroupError::VertexOnRay { vertex: if on_p { edge } else { (edge + 1) % lp.len() }, hole }
                    } else {
                        FreeGroupError::EdgeAlongRay { edge, hole }
                    });
                }
            }
        }
        hits.sort_by(|a, b| a.at.cmp(&b.at));
        out.extend(hits);
    }
    Ok(out)
}

/// Reduced free word of the loop in `π₁(S_i)`.
pub fn puncture_word(lp: &PolyLoop, seq: &DefiningSequence, i: u32) -> Result<FreeWord, FreeGroupError> {
    let crossings = ray_crossings(lp, seq, i)?;
    Ok(reduce(&FreeWord(crossings.into_iter().map(|c| c.letter).collect())))
}

/// Signed crossing totals for every hole of level `<= i`.
pub fn winding_vector(lp: &PolyLoop, seq: &DefiningSequence, i: u32) -> Result<BTreeMap<GridSquare, i64>, FreeGroupError> {
    let crossings = ray_crossings(lp, seq, i)?;
    let mut out: BTreeMap<GridSquare, i64> = seq.holes_up_to(i).map(|h| (*h, 0)).collect();
    for c in crossings {
        *out.entry(c.letter.hole).or_insert(0) += i64::from(c.letter.exp);
    }
    Ok(out)
}

/// `[w_1, …, w_n]`, computed from one pass of ray crossings at level `n`.
pub fn shape_image(lp: &PolyLoop, seq: &DefiningSequence, n: u32) -> Result<Vec<FreeWord>, FreeGroupError> {
    let crossings = ray_crossings(lp, seq, n)?;
    let raw = FreeWord(crossings.into_iter().map(|c| c.letter).collect());
    Ok((1..=n).map(|i| bonding_map(&raw, i)).collect())
}
