//! Standalone SVG 1.1 figures of period distributions.

use std::collections::BTreeMap;
use std::fmt::Write;

use toric_core::stats::{clt_report, PeriodDataset};

use crate::error::{CliError, CliResult};
use crate::io::join_coords;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Scatter1d,
    Scatter2d,
    CltHist,
}

impl std::str::FromStr for FigureKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "scatter-1d" => Ok(FigureKind::Scatter1d),
            "scatter-2d" => Ok(FigureKind::Scatter2d),
            "clt-hist" => Ok(FigureKind::CltHist),
            _ => Err(CliError::Usage(format!("unknown figure kind {s}"))),
        }
    }
}

/// Nonzero period values below the cutoff with their multiplicities, and
/// the number of vanishing periods.
pub fn value_counts(ds: &PeriodDataset, x: u64) -> (BTreeMap<Vec<i64>, u64>, u64) {
    let mut m = BTreeMap::new();
    let mut zeros = 0;
    for (_, z) in ds.up_to(x) {
        if z.iter().all(|&c| c == 0) {
            zeros += 1;
        } else {
            *m.entry(z.clone()).or_insert(0) += 1;
        }
    }
    (m, zeros)
}

/// Linear map from a data interval onto a pixel interval.
struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
        Axis { lo, hi, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn header(out: &mut String, title: &str, attrs: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}"{attrs}>"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>"##);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, ax: &Axis, ay: &Axis, xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN / 2.0);
    let _ = writeln!(out, r##"<g id="axes" stroke="#000000" stroke-width="1">"##);
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g id="labels" font-family="sans-serif" font-size="12">"#);
    for (v, px) in [(ax.lo, ax.from), (ax.hi, ax.to)] {
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(v));
    }
    for (v, py) in [(ay.lo, ay.from), (ay.hi, ay.to)] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{py:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, tick(v));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
    let _ = writeln!(out, "</g>");
}

fn tick(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn frame() -> (f64, f64, f64, f64) {
    (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN / 2.0)
}

/// Rational field: one point `(z, #{E : 𝔓_E = z})` per nonzero value.
pub fn scatter_1d(counts: &BTreeMap<Vec<i64>, u64>, zeros: u64, title: &str) -> CliResult<String> {
    if counts.keys().any(|k| k.len() != 1) {
        return Err(CliError::domain("scatter-1d needs a rational Hecke field"));
    }
    let xs: Vec<f64> = counts.keys().map(|k| k[0] as f64).collect();
    let top = counts.values().copied().max().unwrap_or(0) as f64;
    let (x0, x1, y0, y1) = frame();
    let ax = Axis::new(
        xs.iter().copied().fold(f64::INFINITY, f64::min).min(0.0),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0),
        x0,
        x1,
    );
    let ay = Axis::new(0.0, top.max(1.0), y0, y1);
    let mut out = String::new();
    header(&mut out, title, &format!(r#" data-zero-count="{zeros}""#));
    axes(&mut out, &ax, &ay, "z", "count");
    let _ = writeln!(out, r##"<g id="points" fill="#1f4e9c">"##);
    for (k, &c) in counts {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" data-z="{}" data-count="{c}"/>"#,
            ax.map(k[0] as f64),
            ay.map(c as f64),
            k[0]
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    Ok(out)
}

/// Points `(z_i, z_j)` of two coordinates, darker with multiplicity.
pub fn scatter_pair(counts: &BTreeMap<Vec<i64>, u64>, zeros: u64, i: usize, j: usize, title: &str) -> String {
    let mut proj: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for (k, &c) in counts {
        *proj.entry((k[i], k[j])).or_insert(0) += c;
    }
    let (x0, x1, y0, y1) = frame();
    let bound = |f: fn(&(i64, i64)) -> i64| {
        let v: Vec<f64> = proj.keys().map(|p| f(p) as f64).collect();
        (v.iter().copied().fold(0.0, f64::min), v.iter().copied().fold(0.0, f64::max))
    };
    let (a0, a1) = bound(|p| p.0);
    let (b0, b1) = bound(|p| p.1);
    let ax = Axis::new(a0, a1, x0, x1);
    let ay = Axis::new(b0, b1, y0, y1);
    let top = proj.values().copied().max().unwrap_or(1) as f64;
    let mut out = String::new();
    header(&mut out, title, &format!(r#" data-zero-count="{zeros}" data-coordinates="{i};{j}""#));
    let names = ["a", "b", "c", "d", "e", "f", "g", "h"];
    axes(&mut out, &ax, &ay, names.get(i).unwrap_or(&"x"), names.get(j).unwrap_or(&"y"));
    let _ = writeln!(out, r##"<g id="points" fill="#1f4e9c">"##);
    for (&(a, b), &c) in &proj {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill-opacity="{:.3}" data-z="{a};{b}" data-count="{c}"/>"#,
            ax.map(a as f64),
            ay.map(b as f64),
            0.15 + 0.85 * (c as f64 / top).sqrt()
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

/// Histogram of the central-limit statistic with the normal density.
pub fn clt_hist(ds: &PeriodDataset, x: u64, title: &str) -> String {
    const LO: f64 = -4.0;
    const HI: f64 = 4.0;
    const BINS: usize = 32;
    let rep = clt_report(ds, x);
    let width = (HI - LO) / BINS as f64;
    let mut bins = vec![0u64; BINS];
    let (mut below, mut above) = (0u64, 0u64);
    for &(t, _) in &rep.samples {
        if t < LO {
            below += 1;
        } else if t >= HI {
            above += 1;
        } else {
            bins[((t - LO) / width) as usize] += 1;
        }
    }
    let n = rep.samples.len().max(1) as f64;
    let dens: Vec<f64> = bins.iter().map(|&b| b as f64 / (n * width)).collect();
    let top = dens.iter().copied().fold(0.5, f64::max);
    let (x0, x1, y0, y1) = frame();
    let ax = Axis::new(LO, HI, x0, x1);
    let ay = Axis::new(0.0, top, y0, y1);
    let mut out = String::new();
    header(
        &mut out,
        title,
        &format!(
            r#" data-samples="{}" data-below="{below}" data-above="{above}" data-ks="{:.6}""#,
            rep.samples.len(),
            rep.ks_distance
        ),
    );
    axes(&mut out, &ax, &ay, "statistic", "density");
    let _ = writeln!(out, r##"<g id="bins" fill="#9cb4d8" stroke="#1f4e9c" stroke-width="0.5">"##);
    for (k, (&b, &d)) in bins.iter().zip(&dens).enumerate() {
        let l = LO + k as f64 * width;
        let (px, py) = (ax.map(l), ay.map(d));
        let _ = writeln!(
            out,
            r#"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" data-count="{b}"/>"#,
            ax.map(l + width) - px,
            y0 - py
        );
    }
    let _ = writeln!(out, "</g>");
    let pts: Vec<String> = (0..=160)
        .map(|k| {
            let t = LO + k as f64 * (HI - LO) / 160.0;
            let d = (-(t * t) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            format!("{:.2},{:.2}", ax.map(t), ay.map(d))
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline id="normal" fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##,
        pts.join(" ")
    );
    let _ = writeln!(out, "</svg>");
    out
}

/// Raw `(coordinates, count)` lines accompanying projected figures.
pub fn counts_csv(counts: &BTreeMap<Vec<i64>, u64>) -> String {
    let mut s = String::from("coords,count\n");
    for (k, c) in counts {
        let _ = writeln!(s, "{},{c}", join_coords(k));
    }
    s
}

/// The `(data-z, data-count)` pairs of an emitted scatter figure.
pub fn parse_points(svg: &str) -> Vec<(String, u64)> {
    let attr = |line: &str, key: &str| -> Option<String> {
        let i = line.find(&format!(r#"{key}=""#))? + key.len() + 2;
        Some(line[i..].split('"').next()?.to_string())
    };
    svg.lines()
        .filter(|l| l.starts_with("<circle"))
        .filter_map(|l| Some((attr(l, "data-z")?, attr(l, "data-count")?.parse().ok()?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_dataset_draws_axes_only() {
        let svg = scatter_1d(&BTreeMap::new(), 0, "empty").unwrap();
        assert!(svg.contains(r#"<g id="axes""#));
        assert!(parse_points(&svg).is_empty());
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn points_round_trip() {
        let m: BTreeMap<Vec<i64>, u64> = [(vec![-2], 5), (vec![1], 7), (vec![3], 1)].into_iter().collect();
        let svg = scatter_1d(&m, 4, "t").unwrap();
        let back: BTreeMap<Vec<i64>, u64> =
            parse_points(&svg).into_iter().map(|(z, c)| (vec![z.parse().unwrap()], c)).collect();
        assert_eq!(back, m);
        assert!(svg.contains(r#"data-zero-count="4""#));
        let two: BTreeMap<Vec<i64>, u64> = [(vec![1, 2], 3), (vec![-1, 0], 2)].into_iter().collect();
        assert!(scatter_1d(&two, 0, "t").is_err());
        let p = parse_points(&scatter_pair(&two, 0, 0, 1, "t"));
        assert_eq!(p, vec![("-1;0".to_string(), 2), ("1;2".to_string(), 3)]);
    }
}
