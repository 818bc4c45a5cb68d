//! Cancellation with commutation.
//!
//! Letters are signed symbols; two letters of distinct symbols may swap when
//! their symbols commute, and adjacent inverse letters cancel. A word is
//! trivial when the moves reach the empty word. A cancellation diagram is the
//! matching of positions that a successful move sequence deletes together; as
//! chords on the circle, crossing chords must carry commuting symbols.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::word_encoding::{CyclicWord, RefinementCorrespondence, SignedCorridor};

/// Default per-level cap on diagrams visited by the searches.
pub const DEFAULT_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("more than {cap} diagrams")]
    CapExceeded { cap: usize, partial: Vec<CancellationDiagram> },
    #[error("no induced diagram: {0}")]
    NoInducedDiagram(String),
    #[error("no coherent scheme through level {level}")]
    NotFound { level: u32 },
    #[error("malformed trace word: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceLetter {
    pub sym: u32,
    pub sign: i8,
}

impl TraceLetter {
    pub fn inverse(self) -> Self {
        TraceLetter { sym: self.sym, sign: -self.sign }
    }
}

/// A linearized cyclic word over interned symbols with a commutation relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceWord {
    pub letters: Vec<TraceLetter>,
    pub names: Vec<String>,
    commute: HashSet<(u32, u32)>,
    /// Per symbol: letters of one family never cross each other's lines.
    family: Vec<u8>,
    /// Offset of the first letter in the cyclic word it was cut from.
    pub rotation: usize,
}

/// Corridor names carry their orientation; other names share family 0.
fn default_family(name: &str) -> u8 {
    if name.starts_with("H:") {
        1
    } else if name.starts_with("V:") {
        2
    } else {
        0
    }
}

fn key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl TraceWord {
    /// Builds a word from named letters; `commute` lists commuting name pairs.
    pub fn from_named<S: AsRef<str>>(letters: &[(S, i8)], commute: &[(S, S)]) -> Self {
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut intern = |n: &str, names: &mut Vec<String>| -> u32 {
            *ids.entry(n.to_string()).or_insert_with(|| {
                names.push(n.to_string());
                (names.len() - 1) as u32
            })
        };
        let letters: Vec<TraceLetter> = letters
            .iter()
            .map(|(n, s)| TraceLetter { sym: intern(n.as_ref(), &mut names), sign: *s })
            .collect();
        let commute = commute
            .iter()
            .map(|(a, b)| key(intern(a.as_ref(), &mut names), intern(b.as_ref(), &mut names)))
            .filter(|(a, b)| a != b)
            .collect();
        let family = names.iter().map(|n| default_family(n)).collect();
        TraceWord { letters, names, commute, family, rotation: 0 }
    }

    pub fn family(&self, sym: u32) -> u8 {
        self.family[sym as usize]
    }

    /// Assigns a family to a named symbol; unknown names are ignored.
    pub fn set_family(&mut self, name: &str, family: u8) {
        if let Some(k) = self.names.iter().position(|n| n == name) {
            self.family[k] = family;
        }
    }

    /// Parses letters such as `d3 l^-1 k`, with commuting pairs given by name.
    pub fn parse(text: &str, commute: &[(&str, &str)]) -> Result<Self, TraceError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, sign) = match tok.strip_suffix("^-1") {
                Some(n) => (n, -1),
                None => (tok, 1),
            };
            if name.is_empty() {
                return Err(TraceError::Malformed(tok.to_string()));
            }
            letters.push((name, sign));
        }
        Ok(Self::from_named(&letters, commute))
    }

    /// Interns corridor letters; the commutation keeps only pairs of present corridors.
    pub fn from_symbols(word: &[SignedCorridor], commutes: &BTreeSet<(crate::CorridorId, crate::CorridorId)>) -> Self {
        let named: Vec<(String, i8)> = word.iter().map(|l| (l.corridor.to_string(), l.sign)).collect();
        let present: HashSet<crate::CorridorId> = word.iter().map(|l| l.corridor).collect();
        let pairs: Vec<(String, String)> = commutes
            .iter()
            .filter(|(a, b)| present.contains(a) && present.contains(b))
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Self::from_named(&named, &pairs)
    }

    pub fn from_cyclic(word: &CyclicWord) -> Self {
        Self::from_symbols(&word.symbols(), &word.commutes)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Whether letters of the two symbols may swap (never for equal symbols).
    pub fn commutes(&self, a: u32, b: u32) -> bool {
        a != b && self.commute.contains(&key(a, b))
    }

    pub fn commuting_pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = self
            .commute
            .iter()
            .map(|&(a, b)| (self.names[a as usize].clone(), self.names[b as usize].clone()))
            .collect();
        v.sort();
        v
    }

    pub fn letter_name(&self, pos: usize) -> String {
        let l = self.letters[pos];
        let n = &self.names[l.sym as usize];
        if l.sign > 0 {
            n.clone()
        } else {
            format!("{n}^-1")
        }
    }

    /// The same word cut at a different position.
    pub fn rotated(&self, by: usize) -> TraceWord {
        let mut w = self.clone();
        if !w.letters.is_empty() {
            let by = by % w.letters.len();
            w.letters.rotate_left(by);
            w.rotation = (self.rotation + by) % w.letters.len();
        }
        w
    }

    pub fn sub_word(&self, positions: &[usize]) -> TraceWord {
        TraceWord { letters: positions.iter().map(|&p| self.letters[p]).collect(), rotation: 0, ..self.clone() }
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.len()).map(|p| self.letter_name(p)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Incremental reduction: the reduced word is kept as a stack; an appended
/// letter scans back over letters that commute with it and cancels against
/// the first blocking letter if that is its inverse.
#[derive(Debug, Clone, Default)]
pub struct Reducer {
    stack: Vec<TraceLetter>,
}

impl Reducer {
    pub fn new() -> Self {
        Reducer { stack: Vec::new() }
    }

    pub fn push(&mut self, w: &TraceWord, l: TraceLetter) {
        let mut k = self.stack.len();
        while k > 0 {
            let top = self.stack[k - 1];
            if w.commutes(top.sym, l.sym) {
                k -= 1;
                continue;
            }
            if top == l.inverse() {
                self.stack.remove(k - 1);
                return;
            }
            break;
        }
        self.stack.push(l);
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn reduced(&self) -> &[TraceLetter] {
        &self.stack
    }
}

/// A reduced representative of the word.
pub fn trace_reduce(w: &TraceWord) -> Vec<TraceLetter> {
    let mut r = Reducer::new();
    for &l in &w.letters {
        r.push(w, l);
    }
    r.stack
}

/// Whether the word reduces to the empty word. Rotations are conjugates, so
/// the cyclic question has the same answer as the linear one.
pub fn trace_trivial(w: &TraceWord) -> bool {
    trace_reduce(w).is_empty()
}

/// Brute-force reference: breadth-first search over all words reachable by
/// single swaps and cancellations. Exponential; meant for short words.
pub fn move_search_trivial(w: &TraceWord) -> bool {
    let start = w.letters.clone();
    let mut seen: HashSet<Vec<TraceLetter>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur.is_empty() {
            return true;
        }
        for p in 0..cur.len().saturating_sub(1) {
            let (a, b) = (cur[p], cur[p + 1]);
            let mut next = None;
            if a == b.inverse() {
                let mut n = cur.clone();
                n.drain(p..p + 2);
                next = Some(n);
            } else if w.commutes(a.sym, b.sym) {
                let mut n = cur.clone();
                n.swap(p, p + 1);
                next = Some(n);
            }
            if let Some(n) = next {
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
    }
    false
}

/// A perfect matching of letter positions, pairs `(i, j)` with `i < j`
/// sorted by `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct CancellationDiagram {
    pub pairs: Vec<(usize, usize)>,
}

impl CancellationDiagram {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort();
        CancellationDiagram { pairs }
    }

    pub fn partner_table(&self, n: usize) -> Result<Vec<usize>, TraceError> {
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in &self.pairs {
            if a >= n || b >= n || a >= b {
                return Err(TraceError::MalformedDiagram(format!("pair ({a},{b}) out of range or unordered")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(TraceError::MalformedDiagram(format!("position matched twice in ({a},{b})")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        if self.pairs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TraceError::MalformedDiagram("pairs are not sorted".into()));
        }
        Ok(partner)
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        let p = (pair.0.min(pair.1), pair.0.max(pair.1));
        self.pairs.binary_search(&p).is_ok()
    }
}

impl fmt::Display for CancellationDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            write!(f, "({a},{b})")?;
        }
        Ok(())
    }
}

fn check_matching(w: &TraceWord, d: &CancellationDiagram) -> Result<Vec<usize>, TraceError> {
    let partner = d.partner_table(w.len())?;
    if let Some(p) = partner.iter().position(|&q| q == usize::MAX) {
        return Err(TraceError::MalformedDiagram(format!("position {p} is unmatched")));
    }
    for &(a, b) in &d.pairs {
        if w.letters[a] != w.letters[b].inverse() {
            return Err(TraceError::MalformedDiagram(format!("positions {a} and {b} are not inverse letters")));
        }
    }
    Ok(partner)
}

/// Whether the matching is realized by the moves. Greedy nested elimination:
/// repeatedly delete a pair whose remaining enclosed letters all commute with it.
pub fn diagram_valid(w: &TraceWord, d: &CancellationDiagram) -> Result<bool, TraceError> {
    check_matching(w, d)?;
    let mut alive = vec![true; w.len()];
    let mut left: Vec<(usize, usize)> = d.pairs.clone();
    while !left.is_empty() {
        let before = left.len();
        left.retain(|&(a, b)| {
            let x = w.letters[a].sym;
            let free = (a + 1..b).all(|k| !alive[k] || w.commutes(w.letters[k].sym, x));
            if free {
                alive[a] = false;
                alive[b] = false;
            }
            !free
        });
        if left.len() == before {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Chord form of validity: interleaved pairs must carry commuting symbols.
pub fn chords_compatible(w: &TraceWord, d: &CancellationDiagram) -> Result<bool, TraceError> {
    check_matching(w, d)?;
    for (n, &(a, b)) in d.pairs.iter().enumerate() {
        for &(c, e) in &d.pairs[n + 1..] {
            let interleaved = (a < c && c < b && b < e) || (c < a && a < e && e < b);
            if interleaved && !w.commutes(w.letters[a].sym, w.letters[c].sym) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Depth-first enumeration of valid complete diagrams in lexicographic order
/// of partner choices. With `regions`, only positions with equal labels may
/// be paired. The visitor may stop the search.
pub fn visit_diagrams(
    w: &TraceWord,
    regions: Option<&[u32]>,
    mut visit: impl FnMut(&CancellationDiagram) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = w.len();
    if n % 2 == 1 {
        return ControlFlow::Continue(());
    }
    let none = usize::MAX;
    let mut partner = vec![none; n];
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut resume: Option<(usize, usize)> = None;
    loop {
        let (p, from) = match resume.take() {
            Some((p, q)) => (p, q + 1),
            None => match frames.last().map_or(Some(0), |&(p, _)| (p + 1..n).find(|&k| partner[k] == none)) {
                Some(p) if p < n => (p, p + 1),
                _ => {
                    let d = CancellationDiagram::new((0..n).filter(|&k| partner[k] > k).map(|k| (k, partner[k])));
                    if visit(&d).is_break() {
                        return ControlFlow::Break(());
                    }
                    match frames.pop() {
                        Some((p, q)) => {
                            partner[p] = none;
                            partner[q] = none;
                            resume = Some((p, q));
                            continue;
                        }
                        None => return ControlFlow::Continue(()),
                    }
                }
            },
        };
        match next_partner(w, regions, &partner, p, from) {
            Some(q) => {
                partner[p] = q;
                partner[q] = p;
                frames.push((p, q));
            }
            None => match frames.pop() {
                Some((pp, qq)) => {
                    partner[pp] = none;
                    partner[qq] = none;
                    resume = Some((pp, qq));
                }
                None => return ControlFlow::Continue(()),
            },
        }
    }
}

/// Smallest admissible partner `q >= from` for the first unmatched position `p`.
fn next_partner(w: &TraceWord, regions: Option<&[u32]>, partner: &[usize], p: usize, from: usize) -> Option<usize> {
    let none = usize::MAX;
    let x = w.letters[p];
    let mut inside = Reducer::new();
    let end = from.min(w.len()).max(p + 1);
    for (&l, &j) in w.letters[p + 1..end].iter().zip(&partner[p + 1..end]) {
        if j == none && !w.commutes(l.sym, x.sym) {
            inside.push(w, l);
        }
    }
    for q in from..w.len() {
        let same_region = regions.is_none_or(|r| r[p] == r[q]);
        if partner[q] == none
            && w.letters[q] == x.inverse()
            && same_region
            && inside.is_empty()
            && admissible(w, partner, p, q)
        {
            return Some(q);
        }
        if partner[q] == none && !w.commutes(w.letters[q].sym, x.sym) {
            inside.push(w, w.letters[q]);
        }
    }
    None
}

fn admissible(w: &TraceWord, partner: &[usize], p: usize, q: usize) -> bool {
    let none = usize::MAX;
    let x = w.letters[p].sym;
    for (l, &j) in w.letters[p + 1..q].iter().zip(&partner[p + 1..q]) {
        if j != none && (j < p || j > q) && !w.commutes(l.sym, x) {
            return false;
        }
    }
    let mut rest = Reducer::new();
    for (k, (&l, &j)) in w.letters.iter().zip(partner).enumerate() {
        if k != p && k != q && j == none {
            rest.push(w, l);
        }
    }
    rest.is_empty()
}

/// All valid complete diagrams, at most `cap` of them.
pub fn enumerate_diagrams(w: &TraceWord, cap: usize) -> Result<Vec<CancellationDiagram>, TraceError> {
    let mut out = Vec::new();
    let mut over = false;
    let _ = visit_diagrams(w, None, |d| {
        if out.len() == cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(d.clone());
        ControlFlow::Continue(())
    });
    if over {
        return Err(TraceError::CapExceeded { cap, partial: out });
    }
    Ok(out)
}

/// The first valid diagram, if any.
pub fn first_diagram(w: &TraceWord) -> Option<CancellationDiagram> {
    let mut found = None;
    let _ = visit_diagrams(w, None, |d| {
        found = Some(d.clone());
        ControlFlow::Break(())
    });
    found
}

/// Region labels of the coarse letters cut out by a fine diagram.
///
/// Fine chords of one family never cross, so they split the disk into
/// regions. A coarse letter sits on the boundary just after its first end
/// sub-letter; a coarse chord may not cross a fine chord of its family, so
/// coarse letters can only pair within a region.
pub fn region_labels(
    coarse: &TraceWord,
    fine: &TraceWord,
    fine_d: &CancellationDiagram,
    r: &RefinementCorrespondence,
) -> Result<Vec<u32>, TraceError> {
    if r.ends.len() != coarse.len() {
        return Err(TraceError::NoInducedDiagram("correspondence does not cover the coarse word".into()));
    }
    let n = fine.len();
    let partner = check_matching(fine, fine_d)?;
    let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
    for (c, &(first, _)) in r.ends.iter().enumerate() {
        if first >= n {
            return Err(TraceError::NoInducedDiagram(format!("end sub-letter {first} out of range")));
        }
        at.entry(first).or_default().push(c);
    }
    let mut labels = vec![0u32; coarse.len()];
    let mut next_id = 0u32;
    let families: BTreeSet<u8> = coarse.letters.iter().map(|l| coarse.family(l.sym)).collect();
    for fam in families {
        let root = next_id;
        next_id += 1;
        let mut current = root;
        let mut stack = Vec::new();
        for (p, (l, &q)) in fine.letters.iter().zip(&partner).enumerate() {
            if fine.family(l.sym) == fam {
                if q > p {
                    stack.push(current);
                    current = next_id;
                    next_id += 1;
                } else {
                    current = stack.pop().unwrap_or(root);
                }
            }
            for &c in at.get(&p).into_iter().flatten() {
                if coarse.family(coarse.letters[c].sym) == fam {
                    labels[c] = current;
                }
            }
        }
    }
    Ok(labels)
}

/// Visits the coarse diagrams induced by a fine one.
pub fn visit_induced(
    coarse: &TraceWord,
    fine: &TraceWord,
    fine_d: &CancellationDiagram,
    r: &RefinementCorrespondence,
    visit: impl FnMut(&CancellationDiagram) -> ControlFlow<()>,
) -> Result<ControlFlow<()>, TraceError> {
    let labels = region_labels(coarse, fine, fine_d, r)?;
    Ok(visit_diagrams(coarse, Some(&labels), visit))
}

/// All coarse diagrams induced by `fine_d` (up to `cap`).
pub fn induce_diagram(
    coarse: &TraceWord,
    fine: &TraceWord,
    fine_d: &CancellationDiagram,
    r: &RefinementCorrespondence,
    cap: usize,
) -> Result<Vec<CancellationDiagram>, TraceError> {
    let mut out = Vec::new();
    let mut over = false;
    let _ = visit_induced(coarse, fine, fine_d, r, |d| {
        if out.len() == cap {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(d.clone());
        ControlFlow::Continue(())
    })?;
    if over {
        return Err(TraceError::CapExceeded { cap, partial: out });
    }
    if out.is_empty() {
        return Err(TraceError::NoInducedDiagram(format!("no coarse diagram is compatible with {fine_d}")));
    }
    Ok(out)
}

/// Whether `coarse_d` is among the diagrams induced by `fine_d`.
pub fn induces(
    coarse: &TraceWord,
    coarse_d: &CancellationDiagram,
    fine: &TraceWord,
    fine_d: &CancellationDiagram,
    r: &RefinementCorrespondence,
) -> Result<bool, TraceError> {
    let labels = region_labels(coarse, fine, fine_d, r)?;
    Ok(diagram_valid(coarse, coarse_d)? && coarse_d.pairs.iter().all(|&(a, b)| labels[a] == labels[b]))
}

/// One diagram per level, each inducing the one below. Index 0 is level 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoherentScheme {
    pub diagrams: Vec<CancellationDiagram>,
}

/// Searches for a coherent chain backwards from the deepest level, keeping
/// fine diagrams that have a full chain below them. `refinements[k]` links
/// `words[k]` to `words[k + 1]`; `cap` bounds the diagrams tried per level.
pub fn coherent_scheme(
    words: &[TraceWord],
    refinements: &[RefinementCorrespondence],
    cap: usize,
) -> Result<CoherentScheme, TraceError> {
    if words.is_empty() {
        return Ok(CoherentScheme::default());
    }
    if refinements.len() + 1 != words.len() {
        return Err(TraceError::Malformed("need one correspondence per adjacent pair of levels".into()));
    }
    if let Some(k) = words.iter().position(|w| !trace_trivial(w)) {
        return Err(TraceError::NotFound { level: k as u32 + 1 });
    }
    let mut search = Search { words, refinements, cap, tried: vec![0; words.len()], dead: HashSet::new(), error: None };
    let top = words.len() - 1;
    let mut chain = None;
    let _ = visit_diagrams(&words[top], None, |d| search.step(top, d, &mut chain));
    if let Some(e) = search.error {
        return Err(e);
    }
    match chain {
        Some(c) => Ok(CoherentScheme { diagrams: c }),
        None => Err(TraceError::NotFound { level: words.len() as u32 }),
    }
}

struct Search<'a> {
    words: &'a [TraceWord],
    refinements: &'a [RefinementCorrespondence],
    cap: usize,
    tried: Vec<usize>,
    dead: HashSet<(usize, CancellationDiagram)>,
    error: Option<TraceError>,
}

impl Search<'_> {
    /// Tries to extend `d` (at index `k`) down to level 1; on success `chain`
    /// holds the diagrams from index `k` downwards.
    fn step(&mut self, k: usize, d: &CancellationDiagram, chain: &mut Option<Vec<CancellationDiagram>>) -> ControlFlow<()> {
        self.tried[k] += 1;
        if self.tried[k] > self.cap {
            self.error = Some(TraceError::CapExceeded { cap: self.cap, partial: Vec::new() });
            return ControlFlow::Break(());
        }
        if k == 0 {
            *chain = Some(vec![d.clone()]);
            return ControlFlow::Break(());
        }
        if self.dead.contains(&(k, d.clone())) {
            return ControlFlow::Continue(());
        }
        let mut below = None;
        let res = visit_induced(&self.words[k - 1], &self.words[k], d, &self.refinements[k - 1], |c| {
            self.step(k - 1, c, &mut below)
        });
        if self.error.is_some() {
            return ControlFlow::Break(());
        }
        match (res, below) {
            (Ok(_), Some(mut tail)) => {
                tail.push(d.clone());
                *chain = Some(tail);
                ControlFlow::Break(())
            }
            (Err(TraceError::NoInducedDiagram(_)), _) | (Ok(_), None) => {
                self.dead.insert((k, d.clone()));
                ControlFlow::Continue(())
            }
            (Err(e), _) => {
                self.error = Some(e);
                ControlFlow::Break(())
            }
        }
    }
}

/// Re-verifies a scheme level by level.
pub fn verify_scheme(
    words: &[TraceWord],
    refinements: &[RefinementCorrespondence],
    scheme: &CoherentScheme,
) -> Result<bool, TraceError> {
    if scheme.diagrams.len() != words.len() || refinements.len() + 1 != words.len().max(1) {
        return Ok(false);
    }
    for (w, d) in words.iter().zip(&scheme.diagrams) {
        if !diagram_valid(w, d)? {
            return Ok(false);
        }
    }
    for k in 1..words.len() {
        if !induces(&words[k - 1], &scheme.diagrams[k - 1], &words[k], &scheme.diagrams[k], &refinements[k - 1])? {
            return Ok(false);
        }
    }
    Ok(true)
}
