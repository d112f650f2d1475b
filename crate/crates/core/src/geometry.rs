//! Surfaces and their IFS schemes: the flow-adapted scheme of a symmetric
//! n-funnel surface and the Bowen–Series scheme of a 3-funnel surface.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::GeometryError;
use crate::moebius::{displacement_length, mobius_image_disk, product_scaled, Disk, Matrix2, ScaledMatrix};
use crate::symmetry::{act_on_symbol, Group, GroupElement};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceSpec {
    SymmetricFunnels { nf: u32, psi: f64 },
    ThreeFunnel { l1: f64, l2: f64, l3: f64 },
}

impl SurfaceSpec {
    pub fn symmetric(nf: u32, psi: f64) -> Self {
        SurfaceSpec::SymmetricFunnels { nf, psi }
    }

    pub fn three_funnel(l1: f64, l2: f64, l3: f64) -> Self {
        SurfaceSpec::ThreeFunnel { l1, l2, l3 }
    }

    pub fn build(&self) -> Result<IfsScheme, GeometryError> {
        match *self {
            SurfaceSpec::SymmetricFunnels { nf, psi } => build_flow_adapted(nf, psi),
            SurfaceSpec::ThreeFunnel { l1, l2, l3 } => build_bowen_series(l1, l2, l3),
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::SymmetricFunnels { nf, psi } => write!(f, "sym:{nf}:{psi}"),
            SurfaceSpec::ThreeFunnel { l1, l2, l3 } => write!(f, "bs:{l1},{l2},{l3}"),
        }
    }
}

impl FromStr for SurfaceSpec {
    type Err = GeometryError;

    /// `sym:<nf>:<psi>` or `bs:<l1>,<l2>,<l3>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || GeometryError::Parse(s.to_string());
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("sym:") {
            let (nf, psi) = rest.split_once(':').ok_or_else(err)?;
            let nf = nf.trim().parse().map_err(|_| err())?;
            let psi = psi.trim().parse().map_err(|_| err())?;
            Ok(SurfaceSpec::SymmetricFunnels { nf, psi })
        } else if let Some(rest) = s.strip_prefix("bs:") {
            let v: Vec<f64> = rest
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| err()))
                .collect::<Result<_, _>>()?;
            match v[..] {
                [l1, l2, l3] => Ok(SurfaceSpec::ThreeFunnel { l1, l2, l3 }),
                _ => Err(err()),
            }
        } else {
            Err(err())
        }
    }
}

/// Which product of generators realizes a closed word.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedWordRule {
    /// Alternating product of the reflections R_j; `r[j]` is R_{j+1}.
    FlowAdapted { nf: u32, r: Vec<Matrix2> },
    /// `S_{w_n}^{-1} ⋯ S_{w_1}^{-1}`; `s_inv[j]` is S_{j+1}^{-1}.
    BowenSeries { s_inv: Vec<Matrix2> },
}

/// Disks, adjacency and edge maps of a holomorphic IFS, plus its symmetry group.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsScheme {
    pub spec: SurfaceSpec,
    pub disks: Vec<Disk>,
    pub adjacency: Vec<Vec<bool>>,
    /// `edge_maps[i][j]` is φ_{i+1,j+1} for allowed transitions.
    pub edge_maps: Vec<Vec<Option<Matrix2>>>,
    pub rule: ClosedWordRule,
    /// Largest symmetry group of the scheme.
    pub symmetry: Group,
    /// Offset between the two copies (flow-adapted only).
    pub delta_offset: f64,
    /// Trace-condition parameter a (Bowen–Series only).
    pub param_a: f64,
}

impl IfsScheme {
    pub fn n_symbols(&self) -> usize {
        self.disks.len()
    }

    pub fn allowed(&self, from: u8, to: u8) -> bool {
        self.adjacency[from as usize - 1][to as usize - 1]
    }

    pub fn edge_map(&self, from: u8, to: u8) -> Option<&Matrix2> {
        self.edge_maps[from as usize - 1][to as usize - 1].as_ref()
    }

    /// Successors of a symbol in increasing order.
    pub fn successors(&self, from: u8) -> impl Iterator<Item = u8> + '_ {
        (1..=self.n_symbols() as u8).filter(move |&j| self.allowed(from, j))
    }

    /// Möbius matrix of the geometric action of `g` on the disk of `symbol`.
    pub fn symmetry_matrix(&self, g: &GroupElement, symbol: u8) -> Matrix2 {
        match g.group {
            Group::DihedralZ2 { n } => {
                let nf = n as u32;
                let alpha = 2.0 * PI / nf as f64;
                let (c, s) = ((alpha / 2.0).cos(), (alpha / 2.0).sin());
                let rot = Matrix2::new(c, s, -s, c);
                let t = Matrix2::translation(self.delta_offset);
                let tinv = Matrix2::translation(-self.delta_offset);
                let mut copy = (symbol as u32 - 1) / nf;
                let mut m = Matrix2::IDENTITY;
                // g = g1^rot g2^refl g3^swap, applied right to left
                if g.swap {
                    m = if copy == 0 { t } else { tinv } * m;
                    copy ^= 1;
                }
                if g.refl {
                    let r = if copy == 0 {
                        Matrix2::new(-1.0, 0.0, 0.0, 1.0)
                    } else {
                        Matrix2::new(-1.0, 2.0 * self.delta_offset, 0.0, 1.0)
                    };
                    m = r * m;
                }
                let step = if copy == 0 { rot } else { t * rot * tinv };
                step.pow(g.rot as u32) * m
            }
            Group::Klein | Group::Z2 => {
                let a = self.param_a;
                let mut m = Matrix2::IDENTITY;
                if g.swap {
                    m = Matrix2::new(0.0, a.sqrt(), 1.0 / a.sqrt(), 0.0) * m;
                }
                if g.refl {
                    m = Matrix2::new(-1.0, 0.0, 0.0, 1.0) * m;
                }
                m
            }
            Group::Trivial => Matrix2::IDENTITY,
        }
    }
}

/// Cayley images a_j, b_j of the funnel arcs.
pub fn funnel_endpoints(nf: u32, psi: f64) -> Vec<(f64, f64)> {
    (1..=nf)
        .map(|j| {
            let th = PI * (2.0 * j as f64 - 1.0) / nf as f64 - PI;
            (((th - psi / 2.0) / 2.0).tan(), ((th + psi / 2.0) / 2.0).tan())
        })
        .collect()
}

/// Flow-adapted IFS of the symmetric n_f-funnel surface X_{n_f,ψ}.
pub fn build_flow_adapted(nf: u32, psi: f64) -> Result<IfsScheme, GeometryError> {
    if !(3..=120).contains(&nf) {
        return Err(GeometryError::InvalidFunnelCount(nf));
    }
    if !(psi > 0.0 && psi < 2.0 * PI / nf as f64) {
        return Err(GeometryError::InvalidPsi { nf, psi });
    }
    let ends = funnel_endpoints(nf, psi);
    let delta = ends[nf as usize - 1].1 - ends[0].0 + 1.0;
    let base: Vec<Disk> = ends
        .iter()
        .map(|&(a, b)| Disk::new(0.5 * (a + b), 0.5 * (b - a)))
        .collect();
    let r: Vec<Matrix2> = base
        .iter()
        .map(|d| {
            let (m, rr) = (d.center, d.radius);
            Matrix2::new(m, rr * rr - m * m, 1.0, -m).scale(1.0 / rr)
        })
        .collect();
    let n = 2 * nf as usize;
    let nfu = nf as usize;
    let mut disks = base.clone();
    disks.extend(base.iter().map(|d| Disk::new(d.center + delta, d.radius)));
    let mut adjacency = vec![vec![false; n]; n];
    let mut edge_maps = vec![vec![None; n]; n];
    let t = Matrix2::translation(delta);
    let tinv = Matrix2::translation(-delta);
    for i in 0..nfu {
        for j in 0..nfu {
            if i == j {
                continue;
            }
            adjacency[i][j + nfu] = true;
            adjacency[j + nfu][i] = true;
            edge_maps[i][j + nfu] = Some(t * r[j]);
            edge_maps[j + nfu][i] = Some(r[i] * tinv);
        }
    }
    let scheme = IfsScheme {
        spec: SurfaceSpec::SymmetricFunnels { nf, psi },
        disks,
        adjacency,
        edge_maps,
        rule: ClosedWordRule::FlowAdapted { nf, r },
        symmetry: Group::DihedralZ2 { n: nf as u8 },
        delta_offset: delta,
        param_a: 0.0,
    };
    let report = validate_ifs(&scheme);
    if !report.all_pass() {
        return Err(GeometryError::ValidationFailed(report.summary()));
    }
    Ok(scheme)
}

const A_BRACKET: (f64, f64) = (1.0, 1e8);

/// Root a > 1 of Tr(S_1 S_2^{-1}) = −2cosh(l_3/2), by bisection in log a.
pub fn solve_bowen_series_a(l1: f64, l2: f64, l3: f64) -> Result<f64, GeometryError> {
    let (ch1, sh1) = ((l1 / 2.0).cosh(), (l1 / 2.0).sinh());
    let (ch2, sh2) = ((l2 / 2.0).cosh(), (l2 / 2.0).sinh());
    let ch3 = (l3 / 2.0).cosh();
    let f = |la: f64| {
        let a = la.exp();
        2.0 * ch1 * ch2 - sh1 * sh2 * (a + 1.0 / a) + 2.0 * ch3
    };
    let (mut lo, mut hi) = (A_BRACKET.0.ln(), A_BRACKET.1.ln());
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(GeometryError::NoSuchSurface(format!(
            "trace condition has no sign change for a in [{}, {:e}] (l = {l1}, {l2}, {l3})",
            A_BRACKET.0, A_BRACKET.1
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Generators S_1, S_2 of the Bowen–Series scheme.
pub fn bowen_series_generators(l1: f64, l2: f64, a: f64) -> (Matrix2, Matrix2) {
    let (ch1, sh1) = ((l1 / 2.0).cosh(), (l1 / 2.0).sinh());
    let (ch2, sh2) = ((l2 / 2.0).cosh(), (l2 / 2.0).sinh());
    (
        Matrix2::new(ch1, sh1, sh1, ch1),
        Matrix2::new(ch2, a * sh2, sh2 / a, ch2),
    )
}

/// Bowen–Series IFS of the 3-funnel surface X_{l1,l2,l3}.
pub fn build_bowen_series(l1: f64, l2: f64, l3: f64) -> Result<IfsScheme, GeometryError> {
    if !(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) {
        return Err(GeometryError::InvalidLengths(l1, l2, l3));
    }
    let a = solve_bowen_series_a(l1, l2, l3)?;
    let (s1, s2) = bowen_series_generators(l1, l2, a);
    let s = [s1, s2, s1.inverse(), s2.inverse()];
    let coth = |x: f64| 1.0 / x.tanh();
    let disks = vec![
        Disk::new(-coth(l1 / 2.0), 1.0 / (l1 / 2.0).sinh()),
        Disk::new(-a * coth(l2 / 2.0), a / (l2 / 2.0).sinh()),
        Disk::new(coth(l1 / 2.0), 1.0 / (l1 / 2.0).sinh()),
        Disk::new(a * coth(l2 / 2.0), a / (l2 / 2.0).sinh()),
    ];
    let mut adjacency = vec![vec![false; 4]; 4];
    let mut edge_maps = vec![vec![None; 4]; 4];
    let s_inv: Vec<Matrix2> = s.iter().map(|m| m.inverse()).collect();
    for i in 0..4 {
        for j in 0..4 {
            if (i as i32 - j as i32).abs() != 2 {
                adjacency[i][j] = true;
                edge_maps[i][j] = Some(s_inv[j]);
            }
        }
    }
    let symmetry = if (l1 - l2).abs() <= 1e-12 * l1.max(l2) {
        Group::Klein
    } else {
        Group::Z2
    };
    let scheme = IfsScheme {
        spec: SurfaceSpec::ThreeFunnel { l1, l2, l3 },
        disks,
        adjacency,
        edge_maps,
        rule: ClosedWordRule::BowenSeries { s_inv },
        symmetry,
        delta_offset: 0.0,
        param_a: a,
    };
    let report = validate_ifs(&scheme);
    if !report.all_pass() {
        return Err(GeometryError::NoSuchSurface(report.summary()));
    }
    Ok(scheme)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    /// Pairs of symbols whose closed disks meet.
    pub overlapping_disks: Vec<(u8, u8)>,
    /// Edges whose image is not strictly inside the target disk (or whose pole is inside).
    pub escaping_images: Vec<(u8, u8)>,
    /// Pairs of edges whose image disks meet.
    pub overlapping_images: Vec<((u8, u8), (u8, u8))>,
}

impl ValidationReport {
    pub fn disjoint_ok(&self) -> bool {
        self.overlapping_disks.is_empty()
    }

    pub fn nesting_ok(&self) -> bool {
        self.escaping_images.is_empty()
    }

    pub fn separation_ok(&self) -> bool {
        self.overlapping_images.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.disjoint_ok() && self.nesting_ok() && self.separation_ok()
    }

    pub fn summary(&self) -> String {
        format!(
            "disjoint disks: {} ({:?}); images nested: {} ({:?}); images separated: {} ({:?})",
            pass(self.disjoint_ok()),
            self.overlapping_disks,
            pass(self.nesting_ok()),
            self.escaping_images,
            pass(self.separation_ok()),
            self.overlapping_images
        )
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

/// Check disk disjointness, image nesting and image separation.
pub fn validate_ifs(s: &IfsScheme) -> ValidationReport {
    let n = s.n_symbols();
    let mut rep = ValidationReport::default();
    for i in 0..n {
        for j in i + 1..n {
            if !s.disks[i].disjoint(&s.disks[j]) {
                rep.overlapping_disks.push((i as u8 + 1, j as u8 + 1));
            }
        }
    }
    let mut images = vec![];
    for i in 0..n {
        for j in 0..n {
            let Some(m) = s.edge_maps[i][j] else { continue };
            match mobius_image_disk(&m, &s.disks[i]) {
                Ok(img) if img.strictly_inside(&s.disks[j]) => images.push(((i as u8 + 1, j as u8 + 1), img)),
                _ => rep.escaping_images.push((i as u8 + 1, j as u8 + 1)),
            }
        }
    }
    for (k, (e1, d1)) in images.iter().enumerate() {
        for (e2, d2) in &images[k + 1..] {
            if !d1.disjoint(d2) {
                rep.overlapping_images.push((*e1, *e2));
            }
        }
    }
    rep
}

fn check_word(s: &IfsScheme, w: &[u8]) -> Result<(), GeometryError> {
    if w.len() < 2 {
        return Err(GeometryError::EmptyWord);
    }
    if w[0] != w[w.len() - 1] {
        return Err(GeometryError::NotClosed);
    }
    for p in w.windows(2) {
        let ok = (1..=s.n_symbols() as u8).contains(&p[0])
            && (1..=s.n_symbols() as u8).contains(&p[1])
            && s.allowed(p[0], p[1]);
        if !ok {
            return Err(GeometryError::InvalidTransition { from: p[0], to: p[1] });
        }
    }
    Ok(())
}

/// Matrix whose displacement length is the geodesic length of a closed word.
pub fn closed_word_matrix(s: &IfsScheme, w: &[u8]) -> Result<ScaledMatrix, GeometryError> {
    check_word(s, w)?;
    let n = w.len() - 1;
    match &s.rule {
        ClosedWordRule::FlowAdapted { nf, r } => {
            let nf = *nf as usize;
            // the rightmost factor always belongs to a second-copy symbol
            let syms = if w[0] as usize <= nf { &w[1..] } else { &w[..n] };
            let ms: Vec<Matrix2> = syms.iter().rev().map(|&x| r[(x as usize - 1) % nf]).collect();
            Ok(product_scaled(&ms))
        }
        ClosedWordRule::BowenSeries { s_inv } => {
            let ms: Vec<Matrix2> = w[1..].iter().rev().map(|&x| s_inv[x as usize - 1]).collect();
            Ok(product_scaled(&ms))
        }
    }
}

/// Geodesic length of a closed word.
pub fn closed_word_length(s: &IfsScheme, w: &[u8]) -> Result<f64, GeometryError> {
    Ok(displacement_length(&closed_word_matrix(s, w)?)?)
}

/// Length of the geodesic winding once around a funnel, i.e. of the closed
/// word (n_f+2, 1, n_f+2) of the reduced class (−1) squared.
pub fn funnel_length(nf: u32, psi: f64) -> Result<f64, GeometryError> {
    let s = build_flow_adapted(nf, psi)?;
    let top = nf as u8 + 2;
    closed_word_length(&s, &[top, 1, top])
}

/// ψ with funnel_length(n_f, ψ) = target, by bisection.
pub fn psi_for_length(nf: u32, target: f64) -> Result<f64, GeometryError> {
    let hi_psi = 2.0 * PI / nf as f64 - 1e-6;
    let lo_psi = 1e-6;
    let samples = 64;
    let mut prev = f64::INFINITY;
    let mut values = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let psi = lo_psi + (hi_psi - lo_psi) * k as f64 / samples as f64;
        let l = funnel_length(nf, psi)?;
        if l >= prev {
            return Err(GeometryError::NotMonotone(psi));
        }
        prev = l;
        values.push(l);
    }
    let (lmax, lmin) = (values[0], values[samples]);
    if !(target < lmax && target > lmin) {
        return Err(GeometryError::OutOfRange {
            target,
            lo: lmin,
            hi: lmax,
        });
    }
    let (mut lo, mut hi) = (lo_psi, hi_psi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let l = funnel_length(nf, mid)?;
        if (l - target).abs() < 1e-12 {
            return Ok(mid);
        }
        if l > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Image of a real point under the symmetry action, for symmetry tests.
pub fn act_on_point(s: &IfsScheme, g: &GroupElement, symbol: u8, u: f64) -> (u8, f64) {
    let m = s.symmetry_matrix(g, symbol);
    (
        act_on_symbol(g, symbol),
        m.apply_real(u).expect("point in a disk is not a pole"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::matrix_length;
    use crate::symmetry::element_order;
    use approx::assert_relative_eq;

    #[test]
    fn reference_surfaces_have_their_funnel_widths() {
        assert!((funnel_length(3, 0.5930).unwrap() - 7.0).abs() < 0.04);
        assert!((funnel_length(3, 0.1723).unwrap() - 12.0).abs() < 0.04);
        assert!((funnel_length(3, 0.3631).unwrap() - 9.0).abs() < 0.04);
    }

    #[test]
    fn four_funnel_width_matches_cross_ratio_oracle() {
        // hyperbolic distance between the geodesics over two adjacent funnel
        // arcs, from the cross ratio of their endpoints
        for &psi in &[0.1010, 0.10956, 0.3, 0.9] {
            let e = funnel_endpoints(4, psi);
            let ((a1, b1), (a2, b2)) = (e[0], e[1]);
            let x = (a2 - a1) * (b2 - b1) / ((b1 - a1) * (b2 - a2));
            let oracle = 2.0 * (2.0 * x - 1.0).acosh();
            assert_relative_eq!(funnel_length(4, psi).unwrap(), oracle, max_relative = 1e-10);
        }
        assert!((funnel_length(4, 0.1010).unwrap() - 13.326).abs() < 1e-3);
    }

    #[test]
    fn invalid_psi() {
        assert!(matches!(
            build_flow_adapted(3, 0.0),
            Err(GeometryError::InvalidPsi { .. })
        ));
        assert!(matches!(
            build_flow_adapted(3, 2.1),
            Err(GeometryError::InvalidPsi { .. })
        ));
        assert!(matches!(
            build_flow_adapted(2, 0.1),
            Err(GeometryError::InvalidFunnelCount(2))
        ));
    }

    #[test]
    fn bowen_series_trace_condition() {
        let s = build_bowen_series(7.0, 7.0, 7.01).unwrap();
        let a = solve_bowen_series_a(7.0, 7.0, 7.01).unwrap();
        let (s1, s2) = bowen_series_generators(7.0, 7.0, a);
        let tr = (s1 * s2.inverse()).trace();
        assert!((tr + 2.0 * (7.01f64 / 2.0).cosh()).abs() < 1e-9);
        assert_relative_eq!(matrix_length(&(s1 * s2.inverse())).unwrap(), 7.01, max_relative = 1e-12);
        assert_eq!(s.symmetry, Group::Klein);
        // closed-form root of a + 1/a = 2(ch1 ch2 + ch3)/(sh1 sh2)
        let (c, sh) = (3.5f64.cosh(), 3.5f64.sinh());
        let k = 2.0 * (c * c + (3.505f64).cosh()) / (sh * sh);
        let closed = 0.5 * (k + (k * k - 4.0).sqrt());
        assert_relative_eq!(a, closed, max_relative = 1e-12);
    }

    #[test]
    fn bowen_series_sigma2_conjugates_generators() {
        let a = solve_bowen_series_a(5.0, 5.0, 5.0).unwrap();
        let (s1, s2) = bowen_series_generators(5.0, 5.0, a);
        let sig = Matrix2::new(0.0, a.sqrt(), 1.0 / a.sqrt(), 0.0);
        let c = sig * s1 * sig;
        for (x, y) in [(c.a, s2.a), (c.b, s2.b), (c.c, s2.c), (c.d, s2.d)] {
            assert!((x - y).abs() < 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn bowen_series_out_of_bracket() {
        let e = build_bowen_series(1.0, 1.0, 100.0).unwrap_err();
        match e {
            GeometryError::NoSuchSurface(msg) => assert!(msg.contains("sign change")),
            other => panic!("{other:?}"),
        }
        assert!(build_bowen_series(2.0, 3.0, 4.0).is_ok());
        assert_eq!(build_bowen_series(2.0, 3.0, 4.0).unwrap().symmetry, Group::Z2);
    }

    #[test]
    fn validation_catches_overlaps() {
        assert!(validate_ifs(&build_bowen_series(12.0, 12.0, 12.0).unwrap()).all_pass());
        let mut s = build_flow_adapted(3, 0.5930).unwrap();
        s.disks[1] = Disk::new(s.disks[0].center + 0.5 * s.disks[0].radius, s.disks[1].radius);
        let r = validate_ifs(&s);
        assert!(!r.disjoint_ok());
        assert!(r.overlapping_disks.contains(&(1, 2)));
    }

    #[test]
    fn sweep_validates() {
        for nf in 3..=6u32 {
            let top = 2.0 * PI / nf as f64;
            for k in 1..=20 {
                let psi = top * k as f64 / 21.0;
                let s = build_flow_adapted(nf, psi).unwrap();
                assert!(validate_ifs(&s).all_pass(), "nf={nf} psi={psi}");
            }
        }
    }

    #[test]
    fn worked_lengths() {
        let s = build_flow_adapted(3, 0.5930).unwrap();
        let l = closed_word_length(&s, &[5, 3, 4, 2, 6, 1, 5]).unwrap();
        assert!((l / 6.0 - 3.530).abs() < 0.005);
        let l = closed_word_length(&s, &[5, 1, 5]).unwrap();
        assert!((l - 7.0).abs() < 0.04);
        let b = build_bowen_series(4.0, 5.0, 6.0).unwrap();
        assert_relative_eq!(closed_word_length(&b, &[1, 1]).unwrap(), 4.0, max_relative = 1e-12);
        assert_relative_eq!(closed_word_length(&b, &[2, 2]).unwrap(), 5.0, max_relative = 1e-12);
        // S_1 S_2^{-1} realized by the word (4,1) up to inversion
        assert_relative_eq!(closed_word_length(&b, &[4, 1, 4]).unwrap(), 6.0, max_relative = 1e-10);
    }

    #[test]
    fn word_errors() {
        let s = build_flow_adapted(3, 0.5930).unwrap();
        assert_eq!(
            closed_word_matrix(&s, &[1, 5, 2]).unwrap_err(),
            GeometryError::NotClosed
        );
        assert_eq!(
            closed_word_matrix(&s, &[1, 4, 1]).unwrap_err(),
            GeometryError::InvalidTransition { from: 1, to: 4 }
        );
    }

    #[test]
    fn psi_round_trip() {
        for nf in 3..=5u32 {
            for l in 5..=15 {
                let psi = psi_for_length(nf, l as f64).unwrap();
                assert!((funnel_length(nf, psi).unwrap() - l as f64).abs() < 1e-8);
            }
        }
        assert!((psi_for_length(3, 7.0).unwrap() - 0.5930).abs() < 5e-5);
        assert!((psi_for_length(3, 12.0).unwrap() - 0.1723).abs() < 5e-5);
        assert!(matches!(psi_for_length(3, 1e4), Err(GeometryError::OutOfRange { .. })));
    }

    #[test]
    fn symmetry_commutes_with_edge_maps() {
        let schemes = (3..=6u32)
            .map(|nf| build_flow_adapted(nf, 0.7 * PI / nf as f64).unwrap())
            .chain([
                build_bowen_series(6.0, 6.0, 7.0).unwrap(),
                build_bowen_series(5.0, 6.0, 7.0).unwrap(),
            ]);
        for s in schemes {
            let grp = s.symmetry;
            for g in grp.elements() {
                for i in 1..=s.n_symbols() as u8 {
                    for j in s.successors(i).collect::<Vec<_>>() {
                        let (gi, gj) = (act_on_symbol(&g, i), act_on_symbol(&g, j));
                        assert!(s.allowed(gi, gj));
                        let phi = s.edge_map(i, j).unwrap();
                        let phi_g = s.edge_map(gi, gj).unwrap();
                        let d = s.disks[i as usize - 1];
                        for k in 0..10 {
                            let u = d.center + d.radius * (-0.9 + 0.2 * k as f64);
                            let lhs = act_on_point(&s, &g, j, phi.apply_real(u).unwrap()).1;
                            let (_, gu) = act_on_point(&s, &g, i, u);
                            let rhs = phi_g.apply_real(gu).unwrap();
                            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "{lhs} {rhs}");
                        }
                    }
                }
            }
            // generator orders survive the geometric realization
            for g in grp.elements() {
                let m = element_order(&g);
                let d = s.disks[0];
                let mut x = (1u8, d.center + 0.3 * d.radius);
                for _ in 0..m {
                    x = act_on_point(&s, &g, x.0, x.1);
                }
                assert_eq!(x.0, 1);
                assert!((x.1 - (d.center + 0.3 * d.radius)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["sym:3:0.593", "bs:7,7,7.01", "sym:4:0.101"] {
            let p: SurfaceSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("sym:3".parse::<SurfaceSpec>().is_err());
        assert!("bs:1,2".parse::<SurfaceSpec>().is_err());
    }
}
