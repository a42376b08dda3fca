//! SVG rendering: phase space-time heatmaps and sweep surfaces.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use acca_core::TopologyKind;

use crate::format::{fmt_num, SweepRow};

/// Hue in `[0, 1)` of an angle in `[-π, π)`.
pub fn hue_of(theta: f64) -> f64 {
    ((theta + PI) / TAU).clamp(0.0, 1.0 - f64::EPSILON)
}

pub fn theta_of_hue(hue: f64) -> f64 {
    hue * TAU - PI
}

/// Hue quantised to tenths of a degree.
fn hue_key(theta: f64) -> u32 {
    ((hue_of(theta) * 3600.0).floor() as u32).min(3599)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Sites left to right, records top to bottom. Each row is one stored state.
/// Runs of equal colour within a row are merged into one rectangle.
pub fn spacetime_svg(title: &str, rows: &[Vec<f64>]) -> String {
    let n = rows.first().map_or(0, Vec::len);
    let h = rows.len();
    let (px_w, px_h) = (800usize, 600usize);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{px_w}" height="{px_h}" viewBox="0 0 {n} {h}" preserveAspectRatio="none" shape-rendering="crispEdges">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    for (y, row) in rows.iter().enumerate() {
        let mut x = 0;
        while x < row.len() {
            let key = hue_key(row[x]);
            let mut end = x + 1;
            while end < row.len() && hue_key(row[end]) == key {
                end += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{x}" y="{y}" width="{}" height="1" fill="hsl({}.{},100%,50%)"/>"#,
                end - x,
                key / 10,
                key % 10
            );
            x = end;
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Piecewise-linear viridis-like ramp on `[0, 1]`.
fn ramp(v: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.00, [68.0, 1.0, 84.0]),
        (0.25, [59.0, 82.0, 139.0]),
        (0.50, [33.0, 145.0, 140.0]),
        (0.75, [94.0, 201.0, 98.0]),
        (1.00, [253.0, 231.0, 37.0]),
    ];
    let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
    let i = STOPS.iter().rposition(|s| s.0 <= v).unwrap_or(0).min(STOPS.len() - 2);
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let f = (v - a.0) / (b.0 - a.0);
    let mix = |k: usize| (a.1[k] + f * (b.1[k] - a.1[k])).round() as u8;
    (mix(0), mix(1), mix(2))
}

/// Which column of `sweep.csv` a surface shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    R,
    AbsY,
    AbsTau1,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::R, Metric::AbsY, Metric::AbsTau1];

    pub fn name(self) -> &'static str {
        match self {
            Metric::R => "R",
            Metric::AbsY => "absY",
            Metric::AbsTau1 => "absTau1",
        }
    }

    pub fn value(self, row: &SweepRow) -> f64 {
        match self {
            Metric::R => row.mean_r,
            Metric::AbsY => row.mean_abs_y,
            Metric::AbsTau1 => row.mean_abs_tau1,
        }
    }
}

fn sorted_unique<T: PartialOrd + Copy>(xs: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = xs.collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v.dedup();
    v
}

/// One panel per (topology, ε), `k_mid` along x and `k_noise` along y with
/// the smallest values at the bottom-left corner. Colour scale is `[0, 1]`.
pub fn sweep_svg(rows: &[SweepRow], metric: Metric) -> String {
    let mut panels: Vec<(TopologyKind, f64)> = Vec::new();
    for r in rows {
        if !panels.iter().any(|&(t, e)| t == r.topology && e == r.epsilon) {
            panels.push((r.topology, r.epsilon));
        }
    }
    let kms = sorted_unique(rows.iter().map(|r| r.k_mid));
    let kns = sorted_unique(rows.iter().map(|r| r.k_noise));
    let cell = 40usize;
    let (left, top, gap) = (60usize, 40usize, 30usize);
    let pw = kms.len() * cell;
    let ph = kns.len() * cell;
    let width = left + panels.len() * (pw + gap + left / 2) + gap;
    let height = top + ph + 60;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, "<title>mean {}</title>", metric.name());
    for (p, &(topo, eps)) in panels.iter().enumerate() {
        let x0 = left + p * (pw + gap + left / 2);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{topo}, ε = {}</text>"#, x0 + pw / 2, top - 15, fmt_num(eps));
        for r in rows.iter().filter(|r| r.topology == topo && r.epsilon == eps) {
            let (Some(ix), Some(iy)) = (kms.iter().position(|&k| k == r.k_mid), kns.iter().position(|&k| k == r.k_noise)) else {
                continue;
            };
            let v = metric.value(r);
            let (cr, cg, cb) = ramp(v);
            let x = x0 + ix * cell;
            let y = top + (kns.len() - 1 - iy) * cell;
            let _ = writeln!(
                out,
                r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="rgb({cr},{cg},{cb})"><title>k_mid={} k_noise={} {}={}</title></rect>"#,
                r.k_mid,
                r.k_noise,
                metric.name(),
                fmt_num(v)
            );
        }
        for (i, k) in kms.iter().enumerate() {
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{k}</text>"#, x0 + i * cell + cell / 2, top + ph + 15);
        }
        for (i, k) in kns.iter().enumerate() {
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{k}</text>"#, x0 - 4, top + (kns.len() - 1 - i) * cell + cell / 2 + 4);
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">k_mid</text>"#, x0 + pw / 2, top + ph + 32);
    }
    let _ = writeln!(out, r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">k_noise</text>"#, top + ph / 2, top + ph / 2);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hue_is_a_bijection_on_the_circle() {
        assert_eq!(hue_of(-PI), 0.0);
        assert_eq!(hue_of(0.0), 0.5);
        for k in 0..1000 {
            let theta = -PI + TAU * k as f64 / 1000.0;
            let h = hue_of(theta);
            assert!((0.0..1.0).contains(&h));
            assert!((theta_of_hue(h) - theta).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_colours_merge_within_a_row() {
        let svg = spacetime_svg("t", &[vec![0.0; 5], vec![0.0, 0.0, 3.0, 3.0, -3.0]]);
        assert_eq!(svg.matches("<rect").count(), 4);
        assert!(svg.contains(r#"width="5" height="1" fill="hsl(180.0,100%,50%)""#));
        assert!(svg.contains(r#"viewBox="0 0 5 2""#));
    }

    #[test]
    fn sweep_origin_is_bottom_left() {
        let row = |k_mid, k_noise, v| SweepRow {
            topology: TopologyKind::Path,
            epsilon: 0.002,
            k_mid,
            k_noise,
            mean_r: v,
            se_r: None,
            mean_abs_y: v,
            se_abs_y: None,
            mean_abs_tau1: v,
            se_abs_tau1: None,
            replicates: 1,
        };
        let rows = vec![row(1, 0, 0.0), row(1, 5, 1.0), row(9, 0, 0.5), row(9, 5, 0.5)];
        let svg = sweep_svg(&rows, Metric::R);
        // smallest k_noise sits on the lower row (larger y)
        assert!(svg.contains(r#"<rect x="60" y="80" width="40" height="40" fill="rgb(68,1,84)"><title>k_mid=1 k_noise=0"#));
        assert!(svg.contains(r#"<rect x="60" y="40" width="40" height="40" fill="rgb(253,231,37)"><title>k_mid=1 k_noise=5"#));
        assert!(svg.contains(r#"<rect x="100" y="80""#));
    }
}
