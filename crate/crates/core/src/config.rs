//! Run configuration as `key = value` lines, plus shared number formatting.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::geometry::SurfaceSpec;
use crate::symbolic::GroupChoice;

/// Keys with typed fields, in render order. Anything else lands in `extra`.
pub const TYPED_KEYS: [&str; 7] = ["surface", "group", "order", "rect", "reps", "out", "threads"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub surface: Option<SurfaceSpec>,
    pub group: Option<GroupChoice>,
    pub order: Option<usize>,
    pub rect: Option<[f64; 4]>,
    pub reps: Option<String>,
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub extra: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            let (k, v) = (k.trim().replace('_', "-"), v.trim());
            let bad = |e: String| format!("line {}: {k}: {e}", no + 1);
            match k.as_str() {
                "surface" => cfg.surface = Some(v.parse::<SurfaceSpec>().map_err(|e| bad(e.to_string()))?),
                "group" => cfg.group = Some(v.parse::<GroupChoice>().map_err(|e| bad(e.to_string()))?),
                "order" => cfg.order = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "rect" => cfg.rect = Some(crate::resonance::SearchRegion::parse_rect(v).map_err(bad)?),
                "reps" => cfg.reps = Some(v.to_string()),
                "out" => cfg.out = Some(v.to_string()),
                "threads" => cfg.threads = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "" => return Err(format!("line {}: empty key", no + 1)),
                _ => {
                    cfg.extra.insert(k, v.to_string());
                }
            }
        }
        Ok(cfg)
    }

    /// Key/value pairs in a fixed order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = vec![];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        push("surface", self.surface.map(|s| s.to_string()));
        push("group", self.group.map(|g| g.to_string()));
        push("order", self.order.map(|o| o.to_string()));
        push("rect", self.rect.map(|r| r.map(|x| x.to_string()).join(",")));
        push("reps", self.reps.clone());
        push("out", self.out.clone());
        push("threads", self.threads.map(|t| t.to_string()));
        for (k, v) in &self.extra {
            out.push((k.clone(), v.clone()));
        }
        out
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// C-style `%.12e`: 12 fraction digits, signed exponent of at least two digits.
pub fn fmt_e12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("exponent digits");
    format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}
