//! Deterministic SVG drawings of level spaces, loops and band cellulations.
//!
//! Coordinates are converted to floating point only here, and printed with a
//! fixed number of decimals so the output is byte-stable.

use std::fmt::Write;

use crate::grid_geometry::{corridors, DefiningSequence, GeometryError, Orientation, PolyLoop};
use crate::homotopy_builder::Cellulation;
use crate::rational::{pow3, Point, Rational};
use crate::word_encoding::{encode_word, CyclicWord, EncodingError};

const SIZE: f64 = 810.0;
const MARGIN: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn sx(x: &Rational) -> f64 {
    MARGIN + x.to_f64() * SIZE
}

fn sy(y: &Rational) -> f64 {
    MARGIN + (1.0 - y.to_f64()) * SIZE
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">"#,
        num(w),
        num(h)
    );
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, num(w), num(h));
}

fn rect(out: &mut String, x0: &Rational, x1: &Rational, y0: &Rational, y1: &Rational, style: &str) {
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" {style}/>"#,
        num(sx(x0)),
        num(sy(y1)),
        num(sx(x1) - sx(x0)),
        num(sy(y0) - sy(y1)),
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The level-`level` space: grid, holes, corridors, and optionally a loop with
/// its corridor letters.
pub fn render_space(seq: &DefiningSequence, lp: Option<&PolyLoop>, level: u32) -> Result<String, RenderError> {
    seq.check_level(level)?;
    let word = lp.map(|lp| encode_word(lp, seq, level)).transpose()?;
    let mut out = String::new();
    header(&mut out, SIZE + 2.0 * MARGIN, SIZE + 2.0 * MARGIN);
    let n = pow3(level);
    let (zero, one) = (Rational::zero(), Rational::one());

    let _ = writeln!(out, r#"<g id="corridors">"#);
    for c in corridors(seq, level)? {
        let id = c.id;
        let lo = Rational::new(2 * id.stratum - 1, n);
        let hi = Rational::new(2 * id.stratum, n);
        let (a, b) = (Rational::new(id.start, n), Rational::new(c.end, n));
        match id.orientation {
            Orientation::Horizontal => rect(&mut out, &a, &b, &lo, &hi, r##"fill="#4a90d9" fill-opacity="0.25""##),
            Orientation::Vertical => rect(&mut out, &lo, &hi, &a, &b, r##"fill="#e08a3c" fill-opacity="0.25""##),
        }
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g id="grid" stroke="#c8c8c8" stroke-width="0.5">"##);
    for k in 0..=n {
        let t = Rational::new(k, n);
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
            num(sx(&t)),
            num(sy(&zero)),
            num(sy(&one))
        );
        let _ = writeln!(
            out,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#,
            num(sy(&t)),
            num(sx(&zero)),
            num(sx(&one))
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r##"<g id="holes" fill="#202020">"##);
    for h in seq.holes_up_to(level) {
        let (x, y) = (h.x_range(), h.y_range());
        rect(&mut out, &x.0, &x.1, &y.0, &y.1, "");
    }
    let _ = writeln!(out, "</g>");
    rect(&mut out, &zero, &one, &zero, &one, r##"fill="none" stroke="#000000" stroke-width="1.5""##);

    if let (Some(lp), Some(word)) = (lp, &word) {
        let pts: Vec<String> = lp.vertices.iter().map(|p| format!("{},{}", num(sx(&p.x)), num(sy(&p.y)))).collect();
        let _ = writeln!(
            out,
            r##"<polygon id="loop" points="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
            pts.join(" ")
        );
        if let Some(p) = lp.vertices.first() {
            let _ = writeln!(out, r##"<circle cx="{}" cy="{}" r="4" fill="#c0392b"/>"##, num(sx(&p.x)), num(sy(&p.y)));
        }
        let _ = writeln!(out, r##"<g id="letters" font-family="monospace" font-size="11" fill="#1a1a1a">"##);
        for (k, l) in word.letters.iter().enumerate() {
            let mid = interval_mid(&l.source.start, &l.source.end);
            let p = lp.point_at(&mid);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}">{}:{}</text>"#,
                num(sx(&p.x) + 3.0),
                num(sy(&p.y) - 3.0),
                k,
                escape(&l.symbol().to_string())
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn interval_mid(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.midpoint(b)
    } else {
        let m = a.midpoint(&(b + &Rational::one()));
        if m >= Rational::one() {
            &m - &Rational::one()
        } else {
            m
        }
    }
}

/// A cellulation drawn on a round disk: boundary vertex `k` of `m` at angle
/// `2πk/m`, chords straight, bands shaded by orientation.
pub fn render_cellulation(cel: &Cellulation, word: Option<&CyclicWord>) -> String {
    let r = SIZE / 2.0 - 40.0;
    let c = MARGIN + SIZE / 2.0;
    let m = cel.boundary_len();
    let at = |k: usize| {
        let a = std::f64::consts::TAU * k as f64 / m as f64;
        (c + r * a.cos(), c - r * a.sin())
    };
    let mut out = String::new();
    header(&mut out, SIZE + 2.0 * MARGIN, SIZE + 2.0 * MARGIN);
    let _ = writeln!(
        out,
        r##"<circle cx="{0}" cy="{0}" r="{1}" fill="#fafafa" stroke="#000000" stroke-width="1.5"/>"##,
        num(c),
        num(r)
    );
    let _ = writeln!(out, r#"<g id="bands">"#);
    for b in &cel.bands {
        let (c0, c1) = (&cel.chords[b.chords[0]], &cel.chords[b.chords[1]]);
        let corners = [c0.ends.0, c0.ends.1, c1.ends.0, c1.ends.1];
        let pts: Vec<String> = corners.iter().map(|&k| at(k)).map(|(x, y)| format!("{},{}", num(x), num(y))).collect();
        let fill = match b.corridor.orientation {
            Orientation::Horizontal => "#4a90d9",
            Orientation::Vertical => "#e08a3c",
        };
        let _ = writeln!(out, r#"<polygon points="{}" fill="{fill}" fill-opacity="0.3"/>"#, pts.join(" "));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g id="chords" stroke="#1a1a1a" stroke-width="1">"##);
    for ch in &cel.chords {
        let ((x0, y0), (x1, y1)) = (at(ch.ends.0), at(ch.ends.1));
        let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, num(x0), num(y0), num(x1), num(y1));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r##"<g id="marks" font-family="monospace" font-size="11" fill="#1a1a1a">"##);
    if let Some(word) = word {
        for (k, l) in word.letters.iter().enumerate() {
            let Ok(a) = cel.params.binary_search(&l.source.start) else { continue };
            let Ok(b) = cel.params.binary_search(&l.source.end) else { continue };
            let _ = writeln!(
                out,
                r##"<path d="M {0} {1} A {2} {2} 0 0 0 {3} {4}" fill="none" stroke="#c0392b" stroke-width="4"/>"##,
                num(at(a).0),
                num(at(a).1),
                num(r),
                num(at(b).0),
                num(at(b).1)
            );
            let mid = (a + b) as f64 / 2.0 + if b < a { m as f64 / 2.0 } else { 0.0 };
            let ang = std::f64::consts::TAU * mid / m as f64;
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">{}:{}</text>"#,
                num(c + (r + 18.0) * ang.cos()),
                num(c - (r + 18.0) * ang.sin() + 4.0),
                k,
                escape(&l.symbol().to_string())
            );
        }
    }
    for k in 0..m {
        let (x, y) = at(k);
        let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="2.5"/>"#, num(x), num(y));
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

/// Scaled position of a point of the unit square in [`render_space`] output.
pub fn canvas_position(p: &Point) -> (f64, f64) {
    (sx(&p.x), sy(&p.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decider::sha256_hex;
    use crate::homotopy_builder::build_cellulation;
    use crate::sample::central_ring;
    use crate::trace_calculus::CancellationDiagram;
    use crate::word_encoding::walk_loop;

    #[test]
    fn carpet_drawing_is_stable() {
        let seq = DefiningSequence::full_carpet(3).unwrap();
        let svg = render_space(&seq, None, 3).unwrap();
        assert_eq!(svg.matches("<rect").count(), 2 + seq.holes_up_to(3).count() + corridors(&seq, 3).unwrap().len());
        assert_eq!(svg, render_space(&seq, None, 3).unwrap());
        assert_eq!(sha256_hex(svg.as_bytes()), CARPET_HASH);
    }

    #[test]
    fn central_ring_drawing() {
        let seq = DefiningSequence::full_carpet(1).unwrap();
        let svg = render_space(&seq, Some(&central_ring(1)), 1).unwrap();
        assert_eq!(corridors(&seq, 1).unwrap().len(), 4);
        assert_eq!(svg.matches("<text").count(), 4);
        assert!(svg.contains(r#"<polygon id="loop""#));
        assert_eq!(sha256_hex(svg.as_bytes()), RING_HASH);
    }

    #[test]
    fn single_band() {
        let seq = DefiningSequence::explicit(1, [crate::grid_geometry::GridSquare::new(1, 1, 1)]).unwrap();
        let lp = walk_loop(1, &[(0, 0), (0, 2)]);
        let word = encode_word(&lp, &seq, 1).unwrap();
        let cel = build_cellulation(&word, &CancellationDiagram::new([(0, 1)])).unwrap();
        let svg = render_cellulation(&cel, Some(&word));
        assert_eq!(svg.matches("fill-opacity=\"0.3\"").count(), 1);
        assert_eq!(svg.matches("<line").count(), 2);
    }

    #[test]
    fn positions_flip_y() {
        let (x, y) = canvas_position(&Point::new(Rational::zero(), Rational::zero()));
        assert_eq!((x, y), (MARGIN, MARGIN + SIZE));
    }

    const CARPET_HASH: &str = "a38cd5c94dc8b3ab305f227654417efff65362f7d551541a9a58a567ee9b5e21";
    const RING_HASH: &str = "dd6ad1477c67f53becb3e4ee0da71bbb4da4945a1924aef3d87f4cf3d4ceb5ac";
}
