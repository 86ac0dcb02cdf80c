//! Static SVG plots: survival traces and box plots of `τ_γ`.
//!
//! Output depends only on the input values, so identical inputs give
//! byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::decay::quantile_sorted;
use crate::error::{Error, Result};
use crate::harness::{fit_dataset, mean_traces};
use crate::io::{FitRow, ResultRow};

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Linear or base-10 logarithmic axis mapping.
#[derive(Clone, Copy, Debug)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    px0: f64,
    px1: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, log: bool, px0: f64, px1: f64) -> Self {
        let (mut lo, mut hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        if hi <= lo {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            lo -= pad;
            hi += pad;
        }
        Axis { lo, hi, log, px0, px1 }
    }

    fn map(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        self.px0 + (v - self.lo) / (self.hi - self.lo) * (self.px1 - self.px0)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            (self.lo.floor() as i32..=self.hi.ceil() as i32)
                .map(|k| 10f64.powi(k))
                .filter(|&v| {
                    let l = v.log10();
                    l >= self.lo - 1e-9 && l <= self.hi + 1e-9
                })
                .collect()
        } else {
            (0..=4).map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0).collect()
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e3).contains(&v.abs()) {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 10.0,
        esc(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        (TOP + H - BOTTOM) / 2.0,
        esc(ylabel)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    );
}

fn y_ticks(out: &mut String, y: &Axis) {
    for v in y.ticks() {
        let py = y.map(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT - 4.0,
            LEFT - 6.0,
            py + 4.0,
            tick_label(v)
        );
    }
}

fn legend(out: &mut String, labels: &[String]) {
    for (i, l) in labels.iter().enumerate() {
        let y = TOP + 10.0 + 16.0 * i as f64;
        let x = W - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x + 18.0,
            PALETTE[i % PALETTE.len()],
            x + 24.0,
            y + 4.0,
            esc(l)
        );
    }
}

/// Line plot of `(t, p)` series; `log_y` plots the survival on a log scale.
pub fn line_plot(title: &str, series: &[(String, Vec<(f64, f64)>)], log_y: bool) -> Result<String> {
    let pts = series.iter().flat_map(|s| s.1.iter());
    let (mut t0, mut t1, mut p0, mut p1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, p) in pts {
        if log_y && !(p > 0.0) {
            continue;
        }
        t0 = t0.min(t);
        t1 = t1.max(t);
        p0 = p0.min(p);
        p1 = p1.max(p);
    }
    if !t0.is_finite() {
        return Err(Error::Data("nothing to plot".into()));
    }
    let x = Axis::new(t0, t1, false, LEFT, W - RIGHT);
    let y = if log_y {
        Axis::new(p0, p1, true, H - BOTTOM, TOP)
    } else {
        Axis::new(p0.min(0.0), p1.max(1.0), false, H - BOTTOM, TOP)
    };
    let mut out = String::new();
    frame(&mut out, title, "duration (s)", if log_y { "P0 (log)" } else { "P0" });
    for v in x.ticks() {
        let px = x.map(v);
        let _ = writeln!(
            out,
            r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#333"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            H - BOTTOM,
            H - BOTTOM + 4.0,
            H - BOTTOM + 16.0,
            tick_label(v)
        );
    }
    y_ticks(&mut out, &y);
    for (i, (_, s)) in series.iter().enumerate() {
        let path: Vec<String> = s
            .iter()
            .filter(|(_, p)| !log_y || *p > 0.0)
            .map(|&(t, p)| format!("{:.1},{:.1}", x.map(t), y.map(p)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            path.join(" ")
        );
    }
    legend(&mut out, &series.iter().map(|s| s.0.clone()).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    Ok(out)
}

/// Box-and-whisker statistics with whiskers at the most extreme data within
/// 1.5×IQR of the box.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
    /// Values left out because they are infinite.
    pub infinite: usize,
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let infinite = values.len() - v.len();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (
        quantile_sorted(&v, 0.25),
        quantile_sorted(&v, 0.5),
        quantile_sorted(&v, 0.75),
    );
    let iqr = q3 - q1;
    let (lo, hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v.iter().copied().filter(|x| *x >= lo && *x <= hi).collect();
    Some(BoxStats {
        q1,
        median,
        q3,
        whisker_lo: inside.first().copied().unwrap_or(q1),
        whisker_hi: inside.last().copied().unwrap_or(q3),
        outliers: v.into_iter().filter(|x| *x < lo || *x > hi).collect(),
        infinite,
    })
}

/// Box plot of one value list per label. Infinite values are counted in the
/// label instead of drawn.
pub fn box_plot(title: &str, ylabel: &str, groups: &[(String, Vec<f64>)], log_y: bool) -> Result<String> {
    let stats: Vec<Option<BoxStats>> = groups.iter().map(|g| box_stats(&g.1)).collect();
    let finite = stats.iter().flatten().flat_map(|s| {
        [s.whisker_lo, s.whisker_hi]
            .into_iter()
            .chain(s.outliers.iter().copied())
    });
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in finite {
        if log_y && !(v > 0.0) {
            continue;
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return Err(Error::Data("no finite values to plot".into()));
    }
    let y = Axis::new(lo, hi, log_y, H - BOTTOM, TOP);
    let mut out = String::new();
    frame(&mut out, title, "method", ylabel);
    y_ticks(&mut out, &y);
    let slot = (W - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (i, ((label, _), s)) in groups.iter().zip(&stats).enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let color = PALETTE[i % PALETTE.len()];
        let mut text = esc(label);
        if let Some(s) = s {
            let hw = (slot * 0.3).min(30.0);
            let (yq1, yq3, ym) = (y.map(s.q1), y.map(s.q3), y.map(s.median));
            let _ = writeln!(
                out,
                r##"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{yq1:.1}" stroke="#333"/><line x1="{cx:.1}" y1="{yq3:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#333"/>"##,
                y.map(s.whisker_lo),
                y.map(s.whisker_hi)
            );
            let _ = writeln!(
                out,
                r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{color}" fill-opacity="0.35" stroke="{color}"/><line x1="{:.1}" y1="{ym:.1}" x2="{:.1}" y2="{ym:.1}" stroke="#000" stroke-width="2"/>"##,
                cx - hw,
                yq3.min(yq1),
                2.0 * hw,
                (yq1 - yq3).abs(),
                cx - hw,
                cx + hw
            );
            for o in &s.outliers {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{cx:.1}" cy="{:.1}" r="2.5" fill="none" stroke="{color}"/>"#,
                    y.map(*o)
                );
            }
            if s.infinite > 0 {
                text.push_str(&format!(" (+{} inf)", s.infinite));
            }
        } else {
            text.push_str(" (all inf)");
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{text}</text>"#,
            H - BOTTOM + 16.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `survival.svg` (state- and embedding-averaged traces per method) and
/// `tau.svg` (τ_γ over embeddings per method). Fits are computed from the
/// results when not supplied.
pub fn render_report(results: &[ResultRow], fits: Option<&[FitRow]>, log_y: bool) -> Result<Vec<(String, String)>> {
    let mut per_method: BTreeMap<String, BTreeMap<u64, (f64, f64, usize)>> = BTreeMap::new();
    for ((method, _), pts) in mean_traces(results) {
        let m = per_method.entry(method).or_default();
        for (t, p) in pts {
            let e = m.entry(t.to_bits()).or_insert((t, 0.0, 0));
            e.1 += p;
            e.2 += 1;
        }
    }
    let series: Vec<(String, Vec<(f64, f64)>)> = per_method
        .into_iter()
        .map(|(m, pts)| {
            let mut v: Vec<(f64, f64)> = pts.into_values().map(|(t, s, n)| (t, s / n as f64)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            (m, v)
        })
        .collect();
    let survival = line_plot("Survival probability", &series, log_y)?;
    let owned;
    let fits = match fits {
        Some(f) => f,
        None => {
            owned = fit_dataset(results)?;
            &owned
        }
    };
    let mut taus: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for f in fits {
        taus.entry(f.method.clone()).or_default().push(f.fit.tau_gamma);
    }
    let groups: Vec<(String, Vec<f64>)> = taus.into_iter().collect();
    let mut files = vec![("survival.svg".to_string(), survival)];
    match box_plot("Characteristic time over embeddings", "tau_gamma (s)", &groups, true) {
        Ok(svg) => files.push(("tau.svg".to_string(), svg)),
        Err(Error::Data(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(files)
}
