//! Envelope functions, spectral gaps and an SVG scatter of resonance sets.

use std::fmt::Write;

use serde::Serialize;

use crate::error::SpectralError;
use crate::resonance::Resonance;

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Provenance {
    pub surface: String,
    pub order: usize,
    pub region: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceSet {
    pub resonances: Vec<Resonance>,
    pub provenance: Provenance,
}

impl ResonanceSet {
    pub fn new(mut resonances: Vec<Resonance>, provenance: Provenance) -> Self {
        resonances.sort_by(|a, b| {
            a.im.total_cmp(&b.im)
                .then(a.re.total_cmp(&b.re))
                .then(a.irrep.cmp(&b.irrep))
        });
        ResonanceSet { resonances, provenance }
    }

    fn filtered<'a>(&'a self, irrep: Option<&'a str>) -> impl Iterator<Item = &'a Resonance> + 'a {
        self.resonances
            .iter()
            .filter(move |r| irrep.is_none_or(|l| r.irrep == l))
    }

    pub fn labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.resonances.iter().map(|r| r.irrep.clone()).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// h_w(t) = max{Re s : |Im s − t| ≤ w} per t; None marks an empty window.
pub fn envelope(set: &ResonanceSet, irrep: Option<&str>, w: f64, ts: &[f64]) -> Vec<Option<f64>> {
    assert!(w > 0.0, "window must be positive");
    ts.iter()
        .map(|&t| {
            set.filtered(irrep)
                .filter(|r| (r.im - t).abs() <= w)
                .map(|r| r.re)
                .reduce(f64::max)
        })
        .collect()
}

/// sup{Re s : |Im s| > K}, excluding the zero within 1e-6 of δ.
pub fn gap(set: &ResonanceSet, irrep: Option<&str>, k: f64, delta: f64) -> Result<f64, SpectralError> {
    let lead = set
        .filtered(irrep)
        .enumerate()
        .filter(|(_, r)| (r.s() - delta).norm() < 1e-6)
        .min_by(|a, b| (a.1.s() - delta).norm().total_cmp(&(b.1.s() - delta).norm()))
        .map(|(i, _)| i);
    set.filtered(irrep)
        .enumerate()
        .filter(|(i, r)| Some(*i) != lead && r.im.abs() > k)
        .map(|(_, r)| r.re)
        .reduce(f64::max)
        .ok_or(SpectralError::EmptyAboveK(k))
}

/// Fixed colour per irrep label.
pub fn color_for(label: &str) -> &'static str {
    match label {
        "I_1" | "A1+" => "#00008b",
        "I_2" | "A1-" => "#6fa8dc",
        "II_1" | "A2+" => "#d7191c",
        "II_2" | "A2-" => "#f28e2b",
        "III_1" | "V_1" | "E1+" => "#1a7f37",
        "III_2" | "V_2" | "E1-" => "#7ccf7c",
        "full" => "#000000",
        _ => "#7f7f7f",
    }
}

/// Scatter plot of Re(s) against Im(s), one colour per irrep.
pub fn render_svg(set: &ResonanceSet) -> String {
    let (w, h, m) = (640.0, 480.0, 50.0);
    let xs = set.resonances.iter().map(|r| r.re);
    let ys = set.resonances.iter().map(|r| r.im);
    let (mut x0, mut x1) = (
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
    );
    let (mut y0, mut y1) = (
        ys.clone().fold(f64::INFINITY, f64::min),
        ys.fold(f64::NEG_INFINITY, f64::max),
    );
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 < 1e-9 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">Re(s)</text>"#,
        w / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})">Im(s)</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
        let _ = writeln!(
            s,
            r#"<text x="{anchor_x:.2}" y="{}" font-size="10" text-anchor="middle">{v:.3}</text>"#,
            h - m + 14.0
        );
    }
    for (v, anchor_y) in [(y0, py(y0)), (y1, py(y1))] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{anchor_y:.2}" font-size="10" text-anchor="end">{v:.1}</text>"#,
            m - 4.0
        );
    }
    for r in &set.resonances {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"><title>{} {:.6}{:+.6}i</title></circle>"#,
            px(r.re),
            py(r.im),
            color_for(&r.irrep),
            r.irrep,
            r.re,
            r.im
        );
    }
    for (i, lab) in set.labels().iter().enumerate() {
        let y = m + 14.0 * i as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{y}" r="4" fill="{}"/>"#,
            w - m - 60.0,
            color_for(lab)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11">{lab}</text>"#,
            w - m - 50.0,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
