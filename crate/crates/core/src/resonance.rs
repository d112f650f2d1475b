//! Zeros of truncated zeta functions and the critical exponent.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cycle::{eval_target, local_relative_error, OrbitTable, Target};
use crate::error::ZetaError;
use crate::exec::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub grid_re: f64,
    pub grid_im: f64,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, grid_re: f64, grid_im: f64) -> Result<Self, String> {
        let ok = re_min < re_max
            && im_min < im_max
            && grid_re > 0.0
            && grid_im > 0.0
            && [re_min, re_max, im_min, im_max, grid_re, grid_im]
                .iter()
                .all(|v| v.is_finite());
        if !ok {
            return Err(format!(
                "bad region [{re_min},{re_max}]x[{im_min},{im_max}] steps {grid_re},{grid_im}"
            ));
        }
        Ok(SearchRegion {
            re_min,
            re_max,
            im_min,
            im_max,
            grid_re,
            grid_im,
        })
    }

    /// Region with the default grid for a table: 0.02 in Re, min(0.25, π/(4 L_max)) in Im.
    pub fn with_default_grid(rect: [f64; 4], table: &OrbitTable) -> Result<Self, String> {
        let lmax = table.max_lambda().max(1e-12);
        Self::new(rect[0], rect[1], rect[2], rect[3], 0.02, (PI / (4.0 * lmax)).min(0.25))
    }

    /// Parse "re0,re1,im0,im1".
    pub fn parse_rect(s: &str) -> Result<[f64; 4], String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad rectangle {s:?}: {e}"))?;
        <[f64; 4]>::try_from(v).map_err(|_| format!("rectangle needs 4 numbers: {s:?}"))
    }

    pub fn rect(&self) -> [f64; 4] {
        [self.re_min, self.re_max, self.im_min, self.im_max]
    }

    pub fn seeds(&self) -> Vec<Complex64> {
        let nr = ((self.re_max - self.re_min) / self.grid_re).round().max(1.0) as usize;
        let ni = ((self.im_max - self.im_min) / self.grid_im).round().max(1.0) as usize;
        let mut out = Vec::with_capacity((nr + 1) * (ni + 1));
        for j in 0..=ni {
            let y = self.im_min + (self.im_max - self.im_min) * j as f64 / ni as f64;
            for i in 0..=nr {
                let x = self.re_min + (self.re_max - self.re_min) * i as f64 / nr as f64;
                out.push(Complex64::new(x, y));
            }
        }
        out
    }

    pub fn contains(&self, s: Complex64, pad: f64) -> bool {
        s.re >= self.re_min - pad && s.re <= self.re_max + pad && s.im >= self.im_min - pad && s.im <= self.im_max + pad
    }

    /// Padding: a few grid steps.
    pub fn pad(&self) -> f64 {
        4.0 * self.grid_re.max(self.grid_im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub residual_tol: f64,
    pub step_tol: f64,
    pub dedup_radius: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 80,
            residual_tol: 1e-10,
            step_tol: 1e-12,
            dedup_radius: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub s: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

fn newton<F>(f: &F, seed: Complex64, region: &SearchRegion, opts: &NewtonOptions) -> Option<Zero>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let pad = region.pad();
    let max_step = 8.0 * region.grid_re.max(region.grid_im);
    let mut s = seed;
    let mut prev_step = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let (v, d) = f(s);
        if !(v.is_finite() && d.is_finite()) || d.norm() == 0.0 {
            return None;
        }
        let mut step = v / d;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        s -= step;
        if !region.contains(s, pad) {
            return None;
        }
        let size = step.norm() / s.norm().max(1.0);
        // near a (near-)double zero rounding noise in f/f' can keep the step
        // above step_tol; stop once it is small and no longer contracting
        let stalled = size < 1e-8 && step.norm() > 0.5 * prev_step;
        prev_step = step.norm();
        if size < opts.step_tol || stalled {
            let (v, d) = f(s);
            let scale = 1.0 + d.norm() * s.norm().max(1.0);
            if v.norm() < opts.residual_tol * scale {
                return Some(Zero {
                    s,
                    residual: v.norm(),
                    iterations: it,
                });
            }
            return None;
        }
    }
    None
}

/// Sort by (Im, Re) and merge points closer than `radius`, keeping the smallest residual.
pub fn dedup_zeros(mut zs: Vec<Zero>, radius: f64) -> Vec<Zero> {
    zs.sort_by(|a, b| a.s.im.total_cmp(&b.s.im).then(a.s.re.total_cmp(&b.s.re)));
    let mut out: Vec<Zero> = vec![];
    for z in zs {
        let mut merged = false;
        for k in out.iter_mut().rev() {
            if z.s.im - k.s.im > radius {
                break;
            }
            if (z.s - k.s).norm() < radius {
                if z.residual < k.residual {
                    *k = z;
                }
                merged = true;
                break;
            }
        }
        if !merged {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.s.im.total_cmp(&b.s.im).then(a.s.re.total_cmp(&b.s.re)));
    out
}

/// Newton from every grid node of the region; returns zeros inside the padded region.
pub fn find_zeros<F>(f: F, region: &SearchRegion, opts: &NewtonOptions, exec: Execution) -> Vec<Zero>
where
    F: Fn(Complex64) -> (Complex64, Complex64) + Sync + Send,
{
    let seeds = region.seeds();
    let found: Vec<Option<Zero>> = exec::map(&seeds, exec, |&s0| newton(&f, s0, region, opts));
    dedup_zeros(found.into_iter().flatten().collect(), opts.dedup_radius)
}

/// Look for a second zero next to each known one by Newton on f(s)/(s − z).
/// Recovers partners of near-double zeros that the grid seeds all missed.
pub fn find_partners<F>(f: F, zeros: &[Zero], region: &SearchRegion, opts: &NewtonOptions, exec: Execution) -> Vec<Zero>
where
    F: Fn(Complex64) -> (Complex64, Complex64) + Sync + Send,
{
    let found: Vec<Vec<Zero>> = exec::map(zeros, exec, |z0| {
        let g = |s: Complex64| {
            let (v, d) = f(s);
            let q = v / (s - z0.s);
            (q, (d - q) / (s - z0.s))
        };
        let mut out = vec![];
        for k in 0..4 {
            let seed = z0.s + Complex64::from_polar(1e-3, 0.3 + k as f64 * PI / 2.0);
            if let Some(z) = newton(&g, seed, region, opts) {
                // judge the candidate on f itself
                let (v, d) = f(z.s);
                let scale = 1.0 + d.norm() * z.s.norm().max(1.0);
                if v.norm() < opts.residual_tol * scale && (z.s - z0.s).norm() >= opts.dedup_radius {
                    out.push(Zero {
                        residual: v.norm(),
                        ..z
                    });
                }
            }
        }
        out
    });
    let mut all = zeros.to_vec();
    all.extend(found.into_iter().flatten());
    dedup_zeros(all, opts.dedup_radius)
}

fn arg_segment<F>(
    f: &F,
    a: Complex64,
    fa: (Complex64, Complex64),
    b: Complex64,
    fb: (Complex64, Complex64),
    depth: u32,
    evals: &mut usize,
) -> Result<f64, ()>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let trap = ((fa.1 / fa.0 + fb.1 / fb.0) * (b - a) * 0.5).im;
    let exact = (fb.0 / fa.0).arg();
    if (trap - exact).abs() < 0.1 && exact.abs() < 1.0 {
        return Ok(exact);
    }
    if depth > 48 || *evals > 2_000_000 {
        return Err(());
    }
    let m = (a + b) * 0.5;
    let fm = f(m);
    *evals += 1;
    if (fm.0 / fm.1).norm() < 1e-6 {
        return Err(());
    }
    Ok(arg_segment(f, a, fa, m, fm, depth + 1, evals)? + arg_segment(f, m, fm, b, fb, depth + 1, evals)?)
}

fn winding<F>(f: &F, rect: [f64; 4]) -> Result<i64, ()>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let [x0, x1, y0, y1] = rect;
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let mut total = 0.0;
    let mut evals = 0usize;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        // coarse initial partition, then adaptive refinement per piece
        let pieces = ((b - a).norm() / 0.05).ceil().max(4.0) as usize;
        let mut pa = a;
        let mut fpa = f(pa);
        if (fpa.0 / fpa.1).norm() < 1e-6 {
            return Err(());
        }
        for j in 1..=pieces {
            let pb = a + (b - a) * (j as f64 / pieces as f64);
            let fpb = f(pb);
            evals += 1;
            if (fpb.0 / fpb.1).norm() < 1e-6 {
                return Err(());
            }
            total += arg_segment(f, pa, fpa, pb, fpb, 0, &mut evals)?;
            pa = pb;
            fpa = fpb;
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Winding number of f around a rectangle [re0,re1]x[im0,im1]. When a zero
/// sits within 1e-6 of the contour the rectangle is pushed outward slightly
/// and retried, up to five times. Returns the count and the rectangle used.
pub fn argument_count<F>(f: F, rect: [f64; 4]) -> Result<(i64, [f64; 4]), ZetaError>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let mut r = rect;
    let size = (rect[1] - rect[0]).min(rect[3] - rect[2]);
    for attempt in 0..=5 {
        if let Ok(n) = winding(&f, r) {
            return Ok((n, r));
        }
        if attempt == 5 {
            break;
        }
        let eps = size * 1e-4 * (1.0 + attempt as f64) * (1.0 + 0.37 * attempt as f64);
        r = [
            rect[0] - eps,
            rect[1] + 0.7 * eps,
            rect[2] - 1.3 * eps,
            rect[3] + 0.9 * eps,
        ];
    }
    Err(ZetaError::ContourTooClose)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resonance {
    pub re: f64,
    pub im: f64,
    pub irrep: String,
    pub order: usize,
    pub residual: f64,
    pub newton_iterations: usize,
    /// Largest R_n around the zero.
    pub local_error: f64,
    /// local_error ≤ 1e-2
    pub trusted: bool,
}

impl Resonance {
    pub fn s(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

pub const TRUST_THRESHOLD: f64 = 1e-2;

pub fn target_label(table: &OrbitTable, target: Target) -> String {
    match target {
        Target::Irrep(i) => table.characters.irreps[i].label.clone(),
        Target::Full => "full".into(),
    }
}

/// Result of a search over one rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub resonances: Vec<Resonance>,
    /// Zeros inside `count_rect`.
    pub found_inside: usize,
    pub argument_count: i64,
    pub count_rect: [f64; 4],
}

impl CellReport {
    pub fn consistent(&self) -> bool {
        self.found_inside as i64 == self.argument_count
    }
}

/// Zeros of one target in a region with the argument-principle cross-check.
/// When the counts disagree the grid is refined up to twice.
pub fn search_resonances(
    table: &OrbitTable,
    target: Target,
    order: usize,
    region: &SearchRegion,
    opts: &NewtonOptions,
    exec: Execution,
) -> Result<CellReport, ZetaError> {
    table.evaluator(0, order)?;
    let f = |s: Complex64| eval_target(table, target, order, s).expect("order checked");
    let (count, crect) = argument_count(f, region.rect())?;
    let mut reg = *region;
    let mut zeros;
    let mut attempt = 0;
    let inside = |zs: &[Zero]| {
        zs.iter()
            .filter(|z| z.s.re >= crect[0] && z.s.re <= crect[1] && z.s.im >= crect[2] && z.s.im <= crect[3])
            .count() as i64
    };
    loop {
        zeros = find_zeros(f, &reg, opts, exec);
        if inside(&zeros) != count {
            zeros = find_partners(f, &zeros, &reg, opts, exec);
        }
        if inside(&zeros) == count || attempt == 2 {
            break;
        }
        reg.grid_re /= 2.0;
        reg.grid_im /= 2.0;
        attempt += 1;
    }
    let label = target_label(table, target);
    let resonances: Vec<Resonance> = exec::map(&zeros, exec, |z| {
        let local = local_relative_error(table, target, order, z.s).unwrap_or(f64::INFINITY);
        Resonance {
            re: z.s.re,
            im: z.s.im,
            irrep: label.clone(),
            order,
            residual: z.residual,
            newton_iterations: z.iterations,
            local_error: local,
            trusted: local <= TRUST_THRESHOLD,
        }
    });
    let found_inside = resonances
        .iter()
        .filter(|r| r.re >= crect[0] && r.re <= crect[1] && r.im >= crect[2] && r.im <= crect[3])
        .count();
    Ok(CellReport {
        resonances,
        found_inside,
        argument_count: count,
        count_rect: crect,
    })
}

/// Largest real zero of the trivial-irrep factor in (0, 1).
pub fn critical_exponent(table: &OrbitTable, order: usize) -> Result<f64, ZetaError> {
    let ev = table.evaluator(table.trivial_index(), order)?;
    let z = |x: f64| ev.eval(Complex64::new(x, 0.0)).re;
    let steps = 400;
    let mut hi = 1.0;
    let mut zhi = z(hi);
    for k in (0..steps).rev() {
        let lo = k as f64 / steps as f64;
        let zlo = if k == 0 { z(1e-9) } else { z(lo) };
        if zlo == 0.0 {
            return Ok(lo);
        }
        if zlo.signum() != zhi.signum() {
            let (mut a, mut b, mut za) = (lo.max(1e-9), hi, zlo);
            while b - a > 1e-13 {
                let m = 0.5 * (a + b);
                let zm = z(m);
                if zm == 0.0 {
                    return Ok(m);
                }
                if zm.signum() == za.signum() {
                    a = m;
                    za = zm;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        hi = lo;
        zhi = zlo;
    }
    Err(ZetaError::NoRealZero)
}

/// max over a of min over b of |a − b|, symmetrised.
pub fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one(a, b).max(one(b, a))
}
