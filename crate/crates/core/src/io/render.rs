//! One-dimensional tile diagrams of a window of the tiling built from the
//! fixed point, as SVG or as aligned text.

use std::fmt::Write;

use num_traits::ToPrimitive;

use super::request::{RenderFormat, RENDER_TILE_CAP};
use crate::algebra::{Field, Scalar};
use crate::spectrum::LengthVector;
use crate::subst::{FixedPoint, Substitution};
use crate::{Error, Result};

/// Letters of the fixed point that may be generated to reach a window.
pub const SEGMENT_CAP: usize = 1_000_000;

const COLORS: [&str; 8] = ["#8fb8de", "#f2c57c", "#a8d5a2", "#e59a9a", "#c3a6d8", "#f0e68c", "#9ad0d0", "#d8b4a0"];

struct Segment {
    letters: Vec<u8>,
    /// Left end of each tile, plus the right end of the last one.
    pos: Vec<f64>,
    /// Order-`j` supertile boundaries (as tile indices), for `j = 1..=m`.
    boundaries: Vec<Vec<usize>>,
    first: usize,
    last: usize,
}

fn segment(sigma: &Substitution, l: &LengthVector, t0: f64, t1: f64, supertiles: u32) -> Result<Segment> {
    let fp = FixedPoint::new(sigma)?;
    let lens = l.approx();
    let mut letters = Vec::new();
    let mut counts = vec![0u64; sigma.n()];
    let mut pos = vec![0.0];
    let mut chunk = 1024;
    // Grow until the window is covered.
    loop {
        let want = chunk.min(SEGMENT_CAP);
        let text = fp.prefix(want);
        for &a in &text[letters.len()..] {
            counts[a as usize] += 1;
            letters.push(a);
            pos.push(counts.iter().zip(&lens).map(|(&c, &x)| c as f64 * x).sum());
        }
        if *pos.last().unwrap() >= t1 {
            break;
        }
        if want == SEGMENT_CAP || text.len() < want {
            return Err(Error::Invalid(format!("window end {t1} lies beyond the generated segment")));
        }
        chunk *= 4;
    }
    let first = pos.partition_point(|&x| x <= t0).saturating_sub(1);
    let last = pos.partition_point(|&x| x < t1).min(letters.len());
    if last - first > RENDER_TILE_CAP {
        return Err(Error::Invalid(format!("window covers {} tiles, above the cap of {RENDER_TILE_CAP}", last - first)));
    }
    let mut boundaries = Vec::new();
    let p = fp.power();
    for j in 1..=supertiles {
        let r = j.div_ceil(p) * p - j;
        let sup: Vec<usize> = sigma.image_lengths(j).iter().map(|x| x.to_usize().unwrap_or(usize::MAX)).collect();
        let mut b = Vec::new();
        let mut at = 0usize;
        'fill: for &c in &fp.prefix(letters.len()) {
            for a in sigma.apply(&[c], r as usize)? {
                if at > last {
                    break 'fill;
                }
                if at >= first {
                    b.push(at);
                }
                at = at.saturating_add(sup[a as usize]);
            }
        }
        boundaries.push(b);
    }
    Ok(Segment { letters, pos, boundaries, first, last })
}

/// Draws the tiles meeting `[t0, t1]`, marking order-`j` supertile
/// boundaries for `j <= supertiles`. An empty window gives an empty
/// document.
pub fn render_segment(
    sigma: &Substitution,
    l: &LengthVector,
    t0: &Scalar,
    t1: &Scalar,
    format: RenderFormat,
    supertiles: u32,
) -> Result<String> {
    if t0.signum_exact()? == std::cmp::Ordering::Less {
        return Err(Error::Invalid("window must start at or after 0".into()));
    }
    match t1.cmp_exact(t0)? {
        std::cmp::Ordering::Less => return Err(Error::Invalid("window end precedes its start".into())),
        std::cmp::Ordering::Equal => {
            return Ok(match format {
                RenderFormat::Text => String::new(),
                RenderFormat::Svg => "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"></svg>\n".into(),
            })
        }
        std::cmp::Ordering::Greater => {}
    }
    let (a, b) = (t0.approx(), t1.approx());
    let seg = segment(sigma, l, a, b, supertiles)?;
    let min_len = l.approx().into_iter().fold(f64::INFINITY, f64::min);
    Ok(match format {
        RenderFormat::Text => text(sigma, &seg, a, b, min_len),
        RenderFormat::Svg => svg(sigma, &seg, a, b, min_len),
    })
}

fn text(sigma: &Substitution, seg: &Segment, t0: f64, t1: f64, min_len: f64) -> String {
    let scale = (1.0 / min_len).min(2000.0 / (t1 - t0));
    let col = |x: f64| (((x - t0) * scale).round().max(0.0)) as usize;
    let width = col(t1);
    let mut tiles = vec![' '; width];
    let mut starts = vec![' '; width + 1];
    for i in seg.first..seg.last {
        let (s, e) = (col(seg.pos[i].max(t0)), col(seg.pos[i + 1].min(t1)));
        for c in tiles.iter_mut().take(e).skip(s) {
            *c = sigma.letter(seg.letters[i]);
        }
        if seg.pos[i] >= t0 {
            starts[s] = '|';
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "tiles   {}", tiles.iter().collect::<String>());
    let _ = writeln!(out, "starts  {}", starts.iter().collect::<String>().trim_end());
    for (j, b) in seg.boundaries.iter().enumerate() {
        let mut row = vec![' '; width + 1];
        for &i in b {
            let x = seg.pos[i];
            if x >= t0 && x <= t1 {
                row[col(x)] = '|';
            }
        }
        let _ = writeln!(out, "order {:<2}{}", j + 1, row.iter().collect::<String>().trim_end());
    }
    let mut ruler = vec![' '; width + 1];
    let mut labels = String::new();
    // Keep labels at least four columns apart.
    let step = ((t1 - t0) / 8.0).max(1.0).round().max((4.0 / scale).ceil());
    let mut x = (t0 / step).ceil() * step;
    while x <= t1 {
        let c = col(x);
        ruler[c] = '+';
        while labels.len() < c {
            labels.push(' ');
        }
        if labels.len() == c {
            let _ = write!(labels, "{x}");
        }
        x += step;
    }
    let _ = writeln!(out, "        {}", ruler.iter().collect::<String>().trim_end());
    let _ = writeln!(out, "        {labels}");
    out
}

fn svg(sigma: &Substitution, seg: &Segment, t0: f64, t1: f64, min_len: f64) -> String {
    let scale = (40.0 / min_len).min(4000.0 / (t1 - t0));
    let px = |x: f64| (x - t0) * scale;
    let depth = seg.boundaries.len() as f64;
    let (w, h) = (px(t1), 60.0 + 8.0 * depth);
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.3}\" height=\"{h:.3}\" viewBox=\"0 0 {w:.3} {h:.3}\">");
    for i in seg.first..seg.last {
        let (s, e) = (px(seg.pos[i].max(t0)), px(seg.pos[i + 1].min(t1)));
        let c = seg.letters[i] as usize;
        let _ = writeln!(
            out,
            "  <rect x=\"{s:.3}\" y=\"10\" width=\"{:.3}\" height=\"30\" fill=\"{}\" stroke=\"#333\" stroke-width=\"0.5\"/>",
            e - s,
            COLORS[c % COLORS.len()]
        );
        if e - s >= 8.0 {
            let _ = writeln!(
                out,
                "  <text x=\"{:.3}\" y=\"30\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
                (s + e) / 2.0,
                sigma.letter(seg.letters[i])
            );
        }
    }
    for (j, b) in seg.boundaries.iter().enumerate() {
        let y = 48.0 + 8.0 * j as f64;
        for &i in b {
            let x = seg.pos[i];
            if x >= t0 && x <= t1 {
                let _ = writeln!(
                    out,
                    "  <line x1=\"{0:.3}\" y1=\"4\" x2=\"{0:.3}\" y2=\"{y:.3}\" stroke=\"#000\" stroke-width=\"{1}\"/>",
                    px(x),
                    j + 1
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dk_text_ruler() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        let t = render_segment(&dk, &l, &Scalar::int(0), &Scalar::int(10), RenderFormat::Text, 1).unwrap();
        assert!(t.starts_with("tiles   aabaabbbba\n"), "{t}");
        assert!(t.contains("order 1 |     |"), "{t}");
    }

    #[test]
    fn empty_window() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        let z = Scalar::int(0);
        assert_eq!(render_segment(&dk, &l, &z, &z, RenderFormat::Text, 0).unwrap(), "");
        assert!(!render_segment(&dk, &l, &z, &z, RenderFormat::Svg, 0).unwrap().contains("<rect"));
    }

    #[test]
    fn fibonacci_svg() {
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        let spec = crate::algebra::Spectral::new(&fib.matrix()).unwrap();
        let l = LengthVector::perron(&spec);
        let s = render_segment(&fib, &l, &Scalar::int(0), &Scalar::int(20), RenderFormat::Svg, 2).unwrap();
        let widths: std::collections::BTreeSet<String> = s
            .lines()
            .filter(|x| x.contains("<rect"))
            .filter_map(|x| x.split("width=\"").nth(1).map(|w| w.split('"').next().unwrap().to_string()))
            .collect();
        // Two tile sizes in golden ratio (the last tile may be clipped).
        let w: Vec<f64> = widths.iter().map(|x| x.parse().unwrap()).collect();
        assert!(w.iter().any(|&x| (x - 40.0).abs() < 1e-3));
        assert!(w.iter().any(|&x| (x - 40.0 * 1.618034).abs() < 1e-2));
    }
}
