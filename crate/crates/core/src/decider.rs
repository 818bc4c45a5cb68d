//! Verdicts and checkable certificates.
//!
//! The verdict comes from the free-group images of the loop. The corridor
//! words and their cancellation diagrams are computed alongside as independent
//! evidence; if the two disagree the decision aborts with a fixture that
//! reproduces the disagreement.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::free_group::{shape_image, FreeGroupError, FreeWord};
use crate::grid_geometry::{validate_loop, DefiningSequence, LoopViolation, PolyLoop, SpaceFile};
use crate::trace_calculus::{coherent_scheme, trace_trivial, verify_scheme, CoherentScheme, TraceError, TraceWord};
use crate::word_encoding::{encode_word, refine, CyclicWord, EncodingError, RefinementCorrespondence};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Nontrivial { level: u32, witness: FreeWord },
    TrivialUpTo { depth: u32, scheme: CoherentScheme, conclusive: bool },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn class(&self) -> &'static str {
        match self {
            Verdict::Nontrivial { .. } => "nontrivial",
            Verdict::TrivialUpTo { .. } => "trivial",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Nontrivial { level, witness } => write!(f, "nontrivial at level {level}: {witness}"),
            Verdict::TrivialUpTo { depth, conclusive: true, .. } => {
                write!(f, "null-homotopic (the space has no holes beyond level {depth})")
            }
            Verdict::TrivialUpTo { depth, .. } => write!(
                f,
                "null-homotopic in every level space up to {depth}; nontriviality, if present, will appear at some finite level"
            ),
            Verdict::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
        }
    }
}

/// Per-level evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEvidence {
    pub level: u32,
    /// The corridor word, in the text form of [`CyclicWord::to_text`].
    pub corridor_word: String,
    pub free_word: FreeWord,
    pub trace_trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub space_sha256: String,
    pub loop_sha256: String,
    pub depth: u32,
    pub verdict: Verdict,
    pub levels: Vec<LevelEvidence>,
}

/// Everything needed to replay a disagreement between the two computations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub space: SpaceFile,
    #[serde(rename = "loop")]
    pub lp: PolyLoop,
    pub level: u32,
    pub free_word: FreeWord,
    pub corridor_word: String,
    pub detail: String,
}

impl Fixture {
    /// Writes the fixture as `disagreement-<hash>.json` under `dir`.
    pub fn dump(&self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        let name = format!("disagreement-{}.json", &sha256_hex(body.as_bytes())[..16]);
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("invalid loop: {0}")]
    InvalidLoop(#[from] LoopViolation),
    #[error("free-group and corridor-word computations disagree at level {}: {}", .0.level, .0.detail)]
    Disagreement(Box<Fixture>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Cap on diagram enumeration per level.
    pub cap: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { cap: crate::trace_calculus::DEFAULT_CAP }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn space_hash(seq: &DefiningSequence) -> String {
    sha256_hex(&serde_json::to_vec(&seq.to_file()).expect("space files serialize"))
}

pub fn loop_hash(lp: &PolyLoop) -> String {
    sha256_hex(&serde_json::to_vec(lp).expect("loops serialize"))
}

fn degenerate(e: impl fmt::Display) -> Verdict {
    Verdict::Inconclusive { reason: format!("degenerate input: {e}") }
}

struct Evidence {
    words: Vec<CyclicWord>,
    traces: Vec<TraceWord>,
    levels: Vec<LevelEvidence>,
}

fn gather(lp: &PolyLoop, seq: &DefiningSequence, free: &[FreeWord]) -> Result<Evidence, EncodingError> {
    let mut ev = Evidence { words: Vec::new(), traces: Vec::new(), levels: Vec::new() };
    for (k, w) in free.iter().enumerate() {
        let level = k as u32 + 1;
        let word = encode_word(lp, seq, level)?;
        let trace = TraceWord::from_cyclic(&word);
        ev.levels.push(LevelEvidence {
            level,
            corridor_word: word.to_text(),
            free_word: w.clone(),
            trace_trivial: trace_trivial(&trace),
        });
        ev.words.push(word);
        ev.traces.push(trace);
    }
    Ok(ev)
}

fn disagreement(seq: &DefiningSequence, lp: &PolyLoop, ev: &LevelEvidence, detail: String) -> DecideError {
    DecideError::Disagreement(Box::new(Fixture {
        space: seq.to_file(),
        lp: lp.clone(),
        level: ev.level,
        free_word: ev.free_word.clone(),
        corridor_word: ev.corridor_word.clone(),
        detail,
    }))
}

/// Decides the loop's class in the level spaces `S_1, …, S_depth`.
pub fn decide(lp: &PolyLoop, seq: &DefiningSequence, depth: u32, opts: DecideOptions) -> Result<Certificate, DecideError> {
    validate_loop(lp, seq, depth)?;
    let cert = |verdict: Verdict, levels: Vec<LevelEvidence>| Certificate {
        version: CERTIFICATE_VERSION,
        space_sha256: space_hash(seq),
        loop_sha256: loop_hash(lp),
        depth,
        verdict,
        levels,
    };
    let free = match shape_image(lp, seq, depth) {
        Ok(f) => f,
        Err(e @ (FreeGroupError::VertexOnRay { .. } | FreeGroupError::EdgeAlongRay { .. })) => {
            return Ok(cert(degenerate(e), Vec::new()))
        }
        Err(e) => return Ok(cert(Verdict::Inconclusive { reason: e.to_string() }, Vec::new())),
    };
    let first = free.iter().position(|w| !w.is_empty());
    let upto = first.map_or(free.len(), |k| k + 1);
    let ev = match gather(lp, seq, &free[..upto]) {
        Ok(ev) => ev,
        Err(e) => return Ok(cert(degenerate(e), Vec::new())),
    };
    for l in &ev.levels {
        if l.trace_trivial != l.free_word.is_empty() {
            let detail = format!("free word `{}` but corridor word trace-trivial = {}", l.free_word, l.trace_trivial);
            return Err(disagreement(seq, lp, l, detail));
        }
    }
    if let Some(k) = first {
        let verdict = Verdict::Nontrivial { level: k as u32 + 1, witness: free[k].clone() };
        return Ok(cert(verdict, ev.levels));
    }
    let refinements: Vec<RefinementCorrespondence> = match ev.words.windows(2).map(|w| refine(&w[0], &w[1])).collect() {
        Ok(r) => r,
        Err(e) => return Ok(cert(degenerate(e), ev.levels)),
    };
    match coherent_scheme(&ev.traces, &refinements, opts.cap) {
        Ok(scheme) => {
            let verdict = Verdict::TrivialUpTo { depth, scheme, conclusive: seq.is_finite_at(depth) };
            Ok(cert(verdict, ev.levels))
        }
        Err(TraceError::CapExceeded { cap, .. }) => {
            let reason = format!("diagram enumeration exceeded the cap of {cap}");
            Ok(cert(Verdict::Inconclusive { reason }, ev.levels))
        }
        Err(e) => {
            let level = match &e {
                TraceError::NotFound { level } => *level,
                _ => 1,
            };
            let l = &ev.levels[(level.max(1) - 1) as usize];
            Err(disagreement(seq, lp, l, format!("all free words are trivial but no coherent scheme exists: {e}")))
        }
    }
}

/// Outcome of [`check_certificate`]; `failures` is empty iff `ok`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Re-verifies a certificate against the space and loop it claims to describe.
pub fn check_certificate(cert: &Certificate, seq: &DefiningSequence, lp: &PolyLoop) -> CheckReport {
    let mut failures = Vec::new();
    check_into(cert, seq, lp, &mut failures);
    CheckReport { ok: failures.is_empty(), failures }
}

fn check_into(cert: &Certificate, seq: &DefiningSequence, lp: &PolyLoop, fail: &mut Vec<String>) {
    if cert.version != CERTIFICATE_VERSION {
        fail.push(format!("unsupported certificate version {}", cert.version));
        return;
    }
    if cert.space_sha256 != space_hash(seq) {
        fail.push("space hash mismatch".into());
    }
    if cert.loop_sha256 != loop_hash(lp) {
        fail.push("loop hash mismatch".into());
    }
    if !fail.is_empty() {
        return;
    }
    if let Verdict::Inconclusive { .. } = cert.verdict {
        return;
    }
    if let Err(e) = validate_loop(lp, seq, cert.depth) {
        fail.push(format!("loop does not validate: {e}"));
        return;
    }
    let upto = match &cert.verdict {
        Verdict::Nontrivial { level, .. } => *level,
        _ => cert.depth,
    };
    if upto == 0 || upto > cert.depth || cert.levels.len() != upto as usize {
        fail.push(format!("expected evidence for levels 1..={upto}, found {}", cert.levels.len()));
        return;
    }
    let free = match shape_image(lp, seq, upto) {
        Ok(f) => f,
        Err(e) => {
            fail.push(format!("free words not computable: {e}"));
            return;
        }
    };
    let mut words = Vec::new();
    for (k, ev) in cert.levels.iter().enumerate() {
        let level = k as u32 + 1;
        if ev.level != level {
            fail.push(format!("evidence {k} is labelled level {}", ev.level));
        }
        if ev.free_word != free[k] {
            fail.push(format!("level {level}: free word {} differs from {}", ev.free_word, free[k]));
        }
        match encode_word(lp, seq, level) {
            Ok(w) => {
                if w.to_text() != ev.corridor_word {
                    fail.push(format!("level {level}: corridor word differs"));
                }
                if trace_trivial(&TraceWord::from_cyclic(&w)) != ev.trace_trivial {
                    fail.push(format!("level {level}: trace triviality differs"));
                }
                words.push(w);
            }
            Err(e) => fail.push(format!("level {level}: {e}")),
        }
    }
    if !fail.is_empty() {
        return;
    }
    match &cert.verdict {
        Verdict::Nontrivial { level, witness } => {
            let k = *level as usize - 1;
            if witness.is_empty() || !witness.is_reduced() || *witness != free[k] {
                fail.push(format!("witness {witness} is not the reduced level-{level} image"));
            }
            if let Some(j) = free[..k].iter().position(|w| !w.is_empty()) {
                fail.push(format!("the loop is already nontrivial at level {}", j + 1));
            }
        }
        Verdict::TrivialUpTo { depth, scheme, conclusive } => {
            if let Some(j) = free.iter().position(|w| !w.is_empty()) {
                fail.push(format!("the loop is nontrivial at level {}", j + 1));
            }
            if *conclusive != seq.is_finite_at(*depth) {
                fail.push("conclusive flag does not match the space".into());
            }
            let traces: Vec<TraceWord> = words.iter().map(TraceWord::from_cyclic).collect();
            let refs: Result<Vec<_>, _> = words.windows(2).map(|w| refine(&w[0], &w[1])).collect();
            match refs.map_err(|e| e.to_string()).and_then(|r| {
                verify_scheme(&traces, &r, scheme).map_err(|e| e.to_string())
            }) {
                Ok(true) => {}
                Ok(false) => fail.push("scheme does not verify".into()),
                Err(e) => fail.push(format!("scheme check failed: {e}")),
            }
        }
        Verdict::Inconclusive { .. } => {}
    }
}
