//! Outlier extraction, the stem-and-leaf text display and SVG index plots.

use std::fmt::{self, Write as _};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats;

/// Stems allowed before the leaf unit is coarsened.
const MAX_STEMS: i64 = 40;
/// Keeps `floor` from dropping a digit on values like `0.3 / 0.1`.
const FLOOR_SLACK: f64 = 1e-9;

/// One stem of the display. Negative stems are kept apart from positive ones
/// so that `-0` and `0` are distinct rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stem {
    pub negative: bool,
    /// Magnitude of the stem in units of ten leaves.
    pub magnitude: u64,
    /// Every leaf digit of the stem, ascending.
    pub leaves: Vec<u8>,
}

impl Stem {
    /// Ordering key: `-2 < -1 < -0 < 0 < 1`.
    fn key(&self) -> i64 {
        if self.negative {
            -(self.magnitude as i64) - 1
        } else {
            self.magnitude as i64
        }
    }

    pub fn label(&self) -> String {
        if self.negative {
            format!("-{}", self.magnitude)
        } else {
            self.magnitude.to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StemLine {
    Stem(Stem),
    /// A run of empty interior stems, shown as a single vertical ellipsis.
    Gap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StemLeafDisplay {
    /// The leaf unit is `10^unit_exponent`.
    pub unit_exponent: i32,
    pub leaf_cap: usize,
    pub lines: Vec<StemLine>,
}

impl StemLeafDisplay {
    pub fn unit(&self) -> f64 {
        10f64.powi(self.unit_exponent)
    }

    /// Where the decimal point sits relative to the bar.
    pub fn header(&self) -> String {
        let d = self.unit_exponent + 1;
        match d.cmp(&0) {
            std::cmp::Ordering::Equal => "The decimal point is at the |".to_string(),
            std::cmp::Ordering::Greater => {
                format!("The decimal point is {d} digit(s) to the right of the |")
            }
            std::cmp::Ordering::Less => {
                format!("The decimal point is {} digit(s) to the left of the |", -d)
            }
        }
    }

    pub fn stems(&self) -> impl Iterator<Item = &Stem> {
        self.lines.iter().filter_map(|l| match l {
            StemLine::Stem(s) => Some(s),
            StemLine::Gap => None,
        })
    }

    /// Total number of leaves, shown or overflowing.
    pub fn count(&self) -> usize {
        self.stems().map(|s| s.leaves.len()).sum()
    }

    /// Lowest value of every leaf, reconstructed from stem, leaf and unit.
    pub fn values(&self) -> Vec<f64> {
        let u = self.unit();
        self.stems()
            .flat_map(|s| {
                s.leaves.iter().map(move |&l| {
                    let m = (10 * s.magnitude + l as u64) as f64 * u;
                    if s.negative {
                        -m
                    } else {
                        m
                    }
                })
            })
            .collect()
    }
}

impl fmt::Display for StemLeafDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  {}", self.header())?;
        writeln!(f)?;
        let width = self.stems().map(|s| s.label().len()).max().unwrap_or(1);
        for line in &self.lines {
            match line {
                StemLine::Gap => writeln!(f, "{:>width$}", "\u{22ee}")?,
                StemLine::Stem(s) => {
                    let shown: String = s
                        .leaves
                        .iter()
                        .take(self.leaf_cap)
                        .map(|d| char::from(b'0' + d))
                        .collect();
                    write!(f, "{:>width$} | {}", s.label(), shown)?;
                    if s.leaves.len() > self.leaf_cap {
                        write!(f, "+{}", s.leaves.len() - self.leaf_cap)?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

fn check_finite(scores: &[f64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("scores must be finite".into()));
    }
    Ok(())
}

fn split(v: f64, unit: f64) -> (bool, u64, u8) {
    let q = (v.abs() / unit + FLOOR_SLACK).floor() as u64;
    (v < 0.0, q / 10, (q % 10) as u8)
}

fn stem_key(negative: bool, magnitude: u64) -> i64 {
    Stem {
        negative,
        magnitude,
        leaves: Vec::new(),
    }
    .key()
}

/// Stem-and-leaf display with an automatically chosen leaf unit: one digit
/// below the leading digit of the largest magnitude, coarsened until at most
/// 40 stems are spanned.
pub fn stem_leaf(scores: &[f64], leaf_cap: usize) -> Result<StemLeafDisplay> {
    check_finite(scores)?;
    let top = scores.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut e = if top > 0.0 {
        top.log10().floor() as i32 - 1
    } else {
        0
    };
    loop {
        let unit = 10f64.powi(e);
        let keys = scores.iter().map(|&v| {
            let (neg, m, _) = split(v, unit);
            stem_key(neg, m)
        });
        let (lo, hi) = keys.fold((i64::MAX, i64::MIN), |(lo, hi), k| (lo.min(k), hi.max(k)));
        if hi - lo < MAX_STEMS {
            return stem_leaf_with_unit(scores, e, leaf_cap);
        }
        e += 1;
    }
}

/// Stem-and-leaf display with leaf unit `10^unit_exponent`.
pub fn stem_leaf_with_unit(scores: &[f64], unit_exponent: i32, leaf_cap: usize) -> Result<StemLeafDisplay> {
    check_finite(scores)?;
    let unit = 10f64.powi(unit_exponent);
    let mut stems: Vec<Stem> = Vec::new();
    let mut parts: Vec<(bool, u64, u8)> = scores.iter().map(|&v| split(v, unit)).collect();
    parts.sort_by_key(|&(neg, m, leaf)| (stem_key(neg, m), leaf));
    for (neg, m, leaf) in parts {
        match stems.last_mut() {
            Some(s) if s.negative == neg && s.magnitude == m => s.leaves.push(leaf),
            _ => stems.push(Stem {
                negative: neg,
                magnitude: m,
                leaves: vec![leaf],
            }),
        }
    }
    let mut lines = Vec::with_capacity(stems.len());
    let mut prev: Option<i64> = None;
    for s in stems {
        let k = s.key();
        if matches!(prev, Some(p) if k > p + 1) {
            lines.push(StemLine::Gap);
        }
        prev = Some(k);
        lines.push(StemLine::Stem(s));
    }
    Ok(StemLeafDisplay {
        unit_exponent,
        leaf_cap,
        lines,
    })
}

/// Indices (0-based) whose `|score|` exceeds the Tukey upper fence
/// `Q3 + 1.5 IQR` of the magnitudes, ordered by decreasing magnitude.
pub fn detect_outliers(scores: &[f64]) -> Result<Vec<usize>> {
    if scores.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: scores.len(),
        });
    }
    check_finite(scores)?;
    let mut mags: Vec<f64> = scores.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let q1 = stats::quantile_sorted(&mags, 0.25);
    let q3 = stats::quantile_sorted(&mags, 0.75);
    let fence = q3 + 1.5 * (q3 - q1);
    let mut out: Vec<usize> = (0..scores.len())
        .filter(|&i| scores[i].abs() > fence)
        .collect();
    out.sort_by(|&a, &b| scores[b].abs().total_cmp(&scores[a].abs()).then(a.cmp(&b)));
    Ok(out)
}

const PLOT_W: f64 = 720.0;
const PLOT_H: f64 = 420.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn marker(out: &mut String, shape: usize, x: f64, y: f64, class: &str, color: &str) {
    let r = 3.5;
    match shape % 3 {
        0 => {
            let _ = writeln!(
                out,
                r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{color}"/>"#
            );
        }
        1 => {
            let _ = writeln!(
                out,
                r#"<rect class="{class}" x="{:.2}" y="{:.2}" width="{:.1}" height="{:.1}" fill="{color}"/>"#,
                x - r,
                y - r,
                2.0 * r,
                2.0 * r
            );
        }
        _ => {
            let _ = writeln!(
                out,
                r#"<polygon class="{class}" points="{x:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
                y - r,
                x - r,
                y + r,
                x + r,
                y + r
            );
        }
    }
}

/// SVG index plot of `(i, score_i)`, one marker per observation (1-based
/// x axis). With `labels`, each distinct group (in order of first
/// appearance) gets its own colour and marker shape and a legend entry.
pub fn index_plot_svg(scores: &[f64], labels: Option<&[String]>) -> Result<String> {
    check_finite(scores)?;
    if let Some(l) = labels {
        if l.len() != scores.len() {
            return Err(Error::InvalidData(format!(
                "{} labels for {} scores",
                l.len(),
                scores.len()
            )));
        }
    }
    let mut groups: Vec<&str> = Vec::new();
    let group_of: Vec<usize> = match labels {
        None => vec![0; scores.len()],
        Some(l) => l
            .iter()
            .map(|g| match groups.iter().position(|h| h == g) {
                Some(k) => k,
                None => {
                    groups.push(g);
                    groups.len() - 1
                }
            })
            .collect(),
    };

    let n = scores.len();
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (ylo, yhi) = (lo - 0.05 * span, hi + 0.05 * span);
    let pw = PLOT_W - MARGIN_L - MARGIN_R;
    let ph = PLOT_H - MARGIN_T - MARGIN_B;
    let sx = |i: usize| MARGIN_L + if n > 1 { pw * i as f64 / (n - 1) as f64 } else { pw / 2.0 };
    let sy = |v: f64| MARGIN_T + ph * (yhi - v) / (yhi - ylo);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{PLOT_W}" height="{PLOT_H}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (MARGIN_L, MARGIN_L + pw, MARGIN_T, MARGIN_T + ph);
    let _ = writeln!(
        out,
        r#"<path class="axes" d="M{x0} {y0} L{x0} {y1} L{x1} {y1}" stroke="black" fill="none"/>"#
    );
    let zero = sy(0.0);
    let _ = writeln!(
        out,
        r##"<line class="zero" x1="{x0}" y1="{zero:.2}" x2="{x1}" y2="{zero:.2}" stroke="#999999" stroke-dasharray="4 3"/>"##
    );
    for t in 0..=4 {
        let v = ylo + (yhi - ylo) * t as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{:.1}" y="{:.2}" text-anchor="end">{v:.3e}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    for t in 0..=4 {
        let i = (n - 1) * t / 4;
        let x = sx(i);
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{x:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y1 + 16.0,
            i + 1
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="xlabel" x="{:.1}" y="{:.1}" text-anchor="middle">observation index</text>"#,
        x0 + pw / 2.0,
        PLOT_H - 16.0
    );
    let _ = writeln!(
        out,
        r#"<text class="ylabel" x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">influence</text>"#,
        y0 + ph / 2.0,
        y0 + ph / 2.0
    );
    for (i, &v) in scores.iter().enumerate() {
        let g = group_of[i];
        let class = format!("marker g{g}");
        marker(&mut out, g, sx(i), sy(v), &class, PALETTE[g % PALETTE.len()]);
    }
    for (g, name) in groups.iter().enumerate() {
        let y = y0 + 10.0 + 20.0 * g as f64;
        marker(&mut out, g, x1 + 20.0, y, &format!("legend g{g}"), PALETTE[g % PALETTE.len()]);
        let _ = writeln!(
            out,
            r#"<text class="legend-label" x="{:.1}" y="{:.1}">{}</text>"#,
            x1 + 30.0,
            y + 4.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Write [`index_plot_svg`] to `path`.
pub fn index_plot(scores: &[f64], labels: Option<&[String]>, path: &Path) -> Result<()> {
    let svg = index_plot_svg(scores, labels)?;
    std::fs::write(path, svg)?;
    Ok(())
}
