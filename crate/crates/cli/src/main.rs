use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgAction, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use schottky_zeta::config::{fmt_e12, RunConfig};
use schottky_zeta::cycle::{
    build_orbit_table_with, closed_word_trace, eval_full_zeta, eval_target, pair_trace, reduced_trace, relative_error,
    Enumerator, OrbitTable, Target, TermSign,
};
use schottky_zeta::exec::{configure_threads, Execution};
use schottky_zeta::geometry::{funnel_length, psi_for_length, validate_ifs, SurfaceSpec};
use schottky_zeta::resonance::{critical_exponent, search_resonances, NewtonOptions, Resonance, SearchRegion};
use schottky_zeta::spectral::{envelope, gap, render_svg, Provenance, ResonanceSet};
use schottky_zeta::symbolic::{cross_check, GroupChoice};
use schottky_zeta::symmetry::{cycle_notation, symbol_permutation, CharacterTable, Group, GroupElement};
use schottky_zeta::{GeometryError, GroupError, MoebiusError, SpectralError, SymbolicError, ZetaError};

#[derive(Parser)]
#[command(
    name = "schottky-zeta",
    version,
    about = "Symmetry-reduced Selberg zeta functions of Schottky surfaces"
)]
struct Cli {
    /// key = value file; the keys are flag names, flags on the command line win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: ZETA_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumArg {
    Auto,
    Reduced,
    Brute,
}

impl From<EnumArg> for Enumerator {
    fn from(e: EnumArg) -> Self {
        match e {
            EnumArg::Auto => Enumerator::Auto,
            EnumArg::Reduced => Enumerator::Reduced,
            EnumArg::Brute => Enumerator::BruteForce,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Signed,
    Unsigned,
}

#[derive(clap::Args, Clone)]
struct TableArgs {
    /// sym:<nf>:<psi> or bs:<l1>,<l2>,<l3>
    #[arg(long)]
    surface: String,
    #[arg(long, default_value = "full")]
    group: String,
    #[arg(long, value_enum, default_value = "auto")]
    enumerator: EnumArg,
    /// Sign convention for multipliers in the term denominators
    #[arg(long, value_enum, default_value = "signed")]
    term_sign: SignArg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Disks, generators and validation of a surface
    SurfaceInfo {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Opening angle ψ giving funnel width `length`
    PsiForLength {
        #[arg(long)]
        nf: u32,
        #[arg(long)]
        length: f64,
    },
    /// Character table of a symmetry group
    Chartable {
        /// d<n>, klein, z2, trivial
        #[arg(long, conflicts_with = "surface")]
        name: Option<String>,
        #[arg(long)]
        surface: Option<String>,
        #[arg(long, default_value = "full")]
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prime classes of G-closed words
    Orbits {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Value, derivative and relative error of a truncated zeta function
    Zeta {
        #[command(flatten)]
        table: TableArgs,
        /// Irrep label or "full"
        #[arg(long, default_value = "full")]
        rep: String,
        #[arg(long)]
        order: usize,
        /// Complex point, e.g. "0.5+12.3i"
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Zeros in a rectangle
    Resonances {
        #[command(flatten)]
        table: TableArgs,
        /// Comma-separated irrep labels, "all" or "full"
        #[arg(long, default_value = "all")]
        reps: String,
        #[arg(long)]
        order: usize,
        /// re0,re1,im0,im1
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        #[arg(long)]
        grid_re: Option<f64>,
        #[arg(long)]
        grid_im: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Critical exponent
    Delta {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        order: usize,
    },
    /// R_n along a horizontal line
    ErrorScan {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, default_value = "full")]
        rep: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 1000.0)]
        im: f64,
        #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Envelope functions from a resonance CSV
    Envelope {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        w: f64,
        #[arg(long, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Comma-separated labels; default every label in the file
        #[arg(long)]
        reps: Option<String>,
        #[arg(long)]
        trusted_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral gap from a resonance CSV
    Gap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// Leading zero to exclude; default the largest real zero in the file
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        reps: Option<String>,
        #[arg(long)]
        trusted_only: bool,
    },
    /// Internal consistency checks
    Selftest,
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Raised when a computed result fails its own consistency check.
#[derive(Debug)]
struct Inconsistent(String);

impl std::fmt::Display for Inconsistent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Inconsistent {}

fn geometry_code(e: &GeometryError) -> u8 {
    match e {
        GeometryError::Moebius(_) => 3,
        _ => 2,
    }
}

fn symbolic_code(e: &SymbolicError) -> u8 {
    match e {
        SymbolicError::Geometry(g) => geometry_code(g),
        SymbolicError::Mismatch(_) => 3,
        _ => 2,
    }
}

/// 1 usage, 2 validation, 3 numerical.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 1;
        }
        if cause.is::<Inconsistent>() || cause.is::<MoebiusError>() || cause.is::<SpectralError>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<GeometryError>() {
            return geometry_code(e);
        }
        if cause.is::<GroupError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<SymbolicError>() {
            return symbolic_code(e);
        }
        if let Some(e) = cause.downcast_ref::<ZetaError>() {
            return match e {
                ZetaError::OrderTooHigh { .. } | ZetaError::Group(_) => 2,
                ZetaError::Symbolic(s) => symbolic_code(s),
                _ => 3,
            };
        }
    }
    2
}

fn parse_surface(s: &str) -> Result<SurfaceSpec> {
    Ok(s.parse::<SurfaceSpec>()?)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || usage(format!("cannot parse complex number {s:?}"));
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut cut = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                cut = Some(k);
                break;
            }
        }
        let (re, im) = match cut {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        Ok(Complex64::new(
            re.parse().map_err(|_| bad())?,
            im.parse().map_err(|_| bad())?,
        ))
    } else {
        Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

fn build_table(a: &TableArgs, order: usize) -> Result<OrbitTable> {
    let spec = parse_surface(&a.surface)?;
    let scheme = spec.build()?;
    let choice: GroupChoice = a.group.parse().map_err(usage)?;
    let sign = match a.term_sign {
        SignArg::Signed => TermSign::Signed,
        SignArg::Unsigned => TermSign::Unsigned,
    };
    Ok(build_orbit_table_with(
        &scheme,
        choice,
        order,
        a.enumerator.into(),
        sign,
        Execution::Parallel,
    )?)
}

fn parse_target(table: &OrbitTable, rep: &str) -> Result<Target> {
    if rep == "full" {
        return Ok(Target::Full);
    }
    table.irrep_index(rep).map(Target::Irrep).map_err(|_| {
        let known: Vec<_> = table.characters.irreps.iter().map(|i| i.label.as_str()).collect();
        usage(format!(
            "unknown representation {rep:?}; known: full, {}",
            known.join(", ")
        ))
    })
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn element_name(g: &GroupElement) -> String {
    match g.group.symbol_count() {
        Some(n) => symbol_permutation(g, n).map(|p| cycle_notation(&p)).unwrap_or_default(),
        None => "e".into(),
    }
}

fn named_group(name: &str) -> Result<Group> {
    let n = name.to_ascii_lowercase();
    match n.as_str() {
        "klein" => Ok(Group::Klein),
        "z2" => Ok(Group::Z2),
        "trivial" => Ok(Group::Trivial),
        _ => n
            .strip_prefix('d')
            .and_then(|k| k.parse::<u8>().ok())
            .filter(|&k| k >= 3)
            .map(|n| Group::DihedralZ2 { n })
            .ok_or_else(|| usage(format!("unknown group {name:?} (d<n>, klein, z2, trivial)"))),
    }
}

fn cmd_surface_info(surface: &str, json: &Option<PathBuf>) -> Result<u8> {
    let spec = parse_surface(surface)?;
    let scheme = spec.build()?;
    let report = validate_ifs(&scheme);
    println!("surface: {spec}");
    println!("symbols: {}", scheme.n_symbols());
    println!("symmetry: {}", scheme.symmetry.name());
    match spec {
        SurfaceSpec::SymmetricFunnels { nf, psi } => {
            println!("funnel width: {}", fmt_e12(funnel_length(nf, psi)?));
            println!("copy offset: {}", fmt_e12(scheme.delta_offset));
        }
        SurfaceSpec::ThreeFunnel { .. } => println!("generator parameter a: {}", fmt_e12(scheme.param_a)),
    }
    for (k, d) in scheme.disks.iter().enumerate() {
        println!(
            "disk {}: center {} radius {}",
            k + 1,
            fmt_e12(d.center),
            fmt_e12(d.radius)
        );
    }
    println!("validation: {}", report.summary());
    if let Some(p) = json {
        #[derive(Serialize)]
        struct Info<'a> {
            surface: String,
            symbols: usize,
            symmetry: String,
            disks: &'a [schottky_zeta::Disk],
            validation_passed: bool,
        }
        write_json(
            p,
            &Info {
                surface: spec.to_string(),
                symbols: scheme.n_symbols(),
                symmetry: scheme.symmetry.name(),
                disks: &scheme.disks,
                validation_passed: report.all_pass(),
            },
        )?;
    }
    Ok(if report.all_pass() { 0 } else { 2 })
}

fn cmd_chartable(name: &Option<String>, surface: &Option<String>, group: &str, out: &Option<PathBuf>) -> Result<u8> {
    let g = match (name, surface) {
        (Some(n), _) => named_group(n)?,
        (None, Some(s)) => {
            let scheme = parse_surface(s)?.build()?;
            let choice: GroupChoice = group.parse().map_err(usage)?;
            schottky_zeta::symbolic::resolve_group(&scheme, choice)?
        }
        (None, None) => return Err(usage("give --name or --surface")),
    };
    let table = CharacterTable::new(g);
    let mut w = csv::Writer::from_writer(open_out(out)?);
    let mut header = vec!["irrep".to_string(), "dim".to_string()];
    header.extend(
        table
            .classes
            .iter()
            .map(|c| format!("{}[{}]", element_name(&c.representative), c.members.len())),
    );
    w.write_record(&header)?;
    for (ir, row) in table.irreps.iter().zip(table.rows()) {
        let mut rec = vec![ir.label.clone(), ir.dim.to_string()];
        rec.extend(row.iter().map(|v| format!("{}", v.round() as i64)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(0)
}

#[derive(Serialize)]
struct OrbitRow {
    word: String,
    reduced: String,
    n_w: usize,
    g_w: String,
    m_w: u32,
    length: String,
    length_per_m: String,
    multiplier_sign: i8,
}

fn cmd_orbits(a: &TableArgs, order: usize, out: &Option<PathBuf>, json: &Option<PathBuf>) -> Result<u8> {
    let t = build_table(a, order)?;
    let rows: Vec<OrbitRow> = t
        .classes
        .iter()
        .map(|d| OrbitRow {
            word: d
                .canonical
                .word
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            reduced: d.reduced_word.as_ref().map(|r| r.to_string()).unwrap_or_default(),
            n_w: d.n_w,
            g_w: element_name(&d.g_w),
            m_w: d.m_w,
            length: fmt_e12(d.length),
            length_per_m: fmt_e12(d.length_per_period()),
            multiplier_sign: d.multiplier_sign as i8,
        })
        .collect();
    let mut w = csv::Writer::from_writer(open_out(out)?);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    if let Some(p) = json {
        write_json(p, &rows)?;
    }
    Ok(0)
}

fn cmd_zeta(a: &TableArgs, rep: &str, order: usize, s: &str) -> Result<u8> {
    let s = parse_complex(s)?;
    let t = build_table(a, order)?;
    let target = parse_target(&t, rep)?;
    let (z, dz) = eval_target(&t, target, order, s)?;
    println!("value: {} {}", fmt_e12(z.re), fmt_e12(z.im));
    println!("derivative: {} {}", fmt_e12(dz.re), fmt_e12(dz.im));
    if order >= 1 {
        println!("relative_error: {}", fmt_e12(relative_error(&t, target, order, s)?));
    }
    Ok(0)
}

#[derive(Serialize, Deserialize)]
struct ResonanceRow {
    re: String,
    im: String,
    rep: String,
    order: usize,
    residual: String,
    trust_mask: u8,
}

fn row_of(r: &Resonance) -> ResonanceRow {
    ResonanceRow {
        re: fmt_e12(r.re),
        im: fmt_e12(r.im),
        rep: r.irrep.clone(),
        order: r.order,
        residual: fmt_e12(r.residual),
        trust_mask: r.trusted as u8,
    }
}

fn resonance_of(r: ResonanceRow) -> Result<Resonance> {
    let f = |s: &str| s.trim().parse::<f64>().map_err(|e| anyhow!("bad number {s:?}: {e}"));
    Ok(Resonance {
        re: f(&r.re)?,
        im: f(&r.im)?,
        irrep: r.rep,
        order: r.order,
        residual: f(&r.residual)?,
        newton_iterations: 0,
        local_error: if r.trust_mask == 1 { 0.0 } else { f64::INFINITY },
        trusted: r.trust_mask == 1,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_resonances(
    a: &TableArgs,
    reps: &str,
    order: usize,
    rect: &str,
    grid_re: Option<f64>,
    grid_im: Option<f64>,
    out: &Option<PathBuf>,
    json: &Option<PathBuf>,
    svg: &Option<PathBuf>,
) -> Result<u8> {
    let rect = SearchRegion::parse_rect(rect).map_err(usage)?;
    let t = build_table(a, order)?;
    let mut region = SearchRegion::with_default_grid(rect, &t).map_err(usage)?;
    if let Some(g) = grid_re {
        region.grid_re = g;
    }
    if let Some(g) = grid_im {
        region.grid_im = g;
    }
    SearchRegion::new(rect[0], rect[1], rect[2], rect[3], region.grid_re, region.grid_im).map_err(usage)?;
    let targets: Vec<Target> = match reps {
        "all" => (0..t.n_irreps()).map(Target::Irrep).collect(),
        _ => reps
            .split(',')
            .map(|r| parse_target(&t, r.trim()))
            .collect::<Result<_>>()?,
    };
    let mut all = vec![];
    let mut mismatch = vec![];
    for target in targets {
        let rep = search_resonances(
            &t,
            target,
            order,
            &region,
            &NewtonOptions::default(),
            Execution::Parallel,
        )?;
        let [x0, x1, y0, y1] = rep.count_rect;
        let inside: Vec<Resonance> = rep
            .resonances
            .iter()
            .filter(|r| r.re >= x0 && r.re <= x1 && r.im >= y0 && r.im <= y1)
            .cloned()
            .collect();
        let label = schottky_zeta::resonance::target_label(&t, target);
        eprintln!(
            "{label}: {} zeros, argument principle {}",
            inside.len(),
            rep.argument_count
        );
        if !rep.consistent() {
            mismatch.push(label);
        }
        all.extend(inside);
    }
    let set = ResonanceSet::new(
        all,
        Provenance {
            surface: a.surface.clone(),
            order,
            region: format!("{rect:?}"),
        },
    );
    let mut w = csv::Writer::from_writer(open_out(out)?);
    for r in &set.resonances {
        w.serialize(row_of(r))?;
    }
    if set.resonances.is_empty() {
        w.write_record(["re", "im", "rep", "order", "residual", "trust_mask"])?;
    }
    w.flush()?;
    if let Some(p) = json {
        write_json(p, &set)?;
    }
    if let Some(p) = svg {
        fs::write(p, render_svg(&set)).with_context(|| format!("writing {}", p.display()))?;
    }
    if !mismatch.is_empty() {
        return Err(Inconsistent(format!(
            "zero count differs from the argument principle for {}",
            mismatch.join(", ")
        ))
        .into());
    }
    Ok(0)
}

fn cmd_delta(a: &TableArgs, order: usize) -> Result<u8> {
    let t = build_table(a, order)?;
    println!("{}", fmt_e12(critical_exponent(&t, order)?));
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_error_scan(
    a: &TableArgs,
    rep: &str,
    order: usize,
    im: f64,
    x0: f64,
    x1: f64,
    points: usize,
    out: &Option<PathBuf>,
) -> Result<u8> {
    if order == 0 || points < 2 || x1 <= x0 {
        return Err(usage("need order >= 1, points >= 2 and x0 < x1"));
    }
    let t = build_table(a, order)?;
    let target = parse_target(&t, rep)?;
    let xs: Vec<f64> = (0..points)
        .map(|k| x0 + (x1 - x0) * k as f64 / (points - 1) as f64)
        .collect();
    let rs = schottky_zeta::exec::map(&xs, Execution::Parallel, |&x| {
        relative_error(&t, target, order, Complex64::new(x, im))
    });
    let mut w = csv::Writer::from_writer(open_out(out)?);
    w.write_record(["x", "im", "relative_error", "within_1e-2"])?;
    for (x, r) in xs.iter().zip(rs) {
        let r = r?;
        w.write_record([fmt_e12(*x), fmt_e12(im), fmt_e12(r), ((r <= 1e-2) as u8).to_string()])?;
    }
    w.flush()?;
    Ok(0)
}

fn read_resonances(path: &Path, trusted_only: bool) -> Result<ResonanceSet> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut v = vec![];
    for row in rdr.deserialize::<ResonanceRow>() {
        let r = resonance_of(row.with_context(|| format!("parsing {}", path.display()))?)?;
        if !trusted_only || r.trusted {
            v.push(r);
        }
    }
    Ok(ResonanceSet::new(v, Provenance::default()))
}

fn rep_filter(set: &ResonanceSet, reps: &Option<String>) -> Vec<String> {
    match reps {
        Some(r) => r.split(',').map(|s| s.trim().to_string()).collect(),
        None => set.labels(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_envelope(
    input: &Path,
    w: f64,
    t0: f64,
    t1: f64,
    points: usize,
    reps: &Option<String>,
    trusted_only: bool,
    out: &Option<PathBuf>,
) -> Result<u8> {
    if w <= 0.0 || points < 1 || t1 < t0 {
        return Err(usage("need w > 0, points >= 1 and t0 <= t1"));
    }
    let set = read_resonances(input, trusted_only)?;
    let ts: Vec<f64> = if points == 1 {
        vec![t0]
    } else {
        (0..points)
            .map(|k| t0 + (t1 - t0) * k as f64 / (points - 1) as f64)
            .collect()
    };
    let mut wr = csv::Writer::from_writer(open_out(out)?);
    wr.write_record(["t", "rep", "h"])?;
    for label in rep_filter(&set, reps) {
        for (t, h) in ts.iter().zip(envelope(&set, Some(&label), w, &ts)) {
            wr.write_record([
                fmt_e12(*t),
                label.clone(),
                h.map(fmt_e12).unwrap_or_else(|| "empty".into()),
            ])?;
        }
    }
    wr.flush()?;
    Ok(0)
}

fn cmd_gap(input: &Path, k: f64, delta: Option<f64>, reps: &Option<String>, trusted_only: bool) -> Result<u8> {
    let set = read_resonances(input, trusted_only)?;
    let delta = match delta {
        Some(d) => d,
        None => set
            .resonances
            .iter()
            .filter(|r| r.im.abs() < 1e-9)
            .map(|r| r.re)
            .reduce(f64::max)
            .ok_or_else(|| usage("no real zero in the input; pass --delta"))?,
    };
    println!("delta: {}", fmt_e12(delta));
    for label in rep_filter(&set, reps) {
        match gap(&set, Some(&label), k, delta) {
            Ok(g) => println!("{label}: {}", fmt_e12(g)),
            Err(e) => println!("{label}: {e}"),
        }
    }
    println!("all: {}", fmt_e12(gap(&set, None, k, delta)?));
    Ok(0)
}

fn cmd_selftest() -> Result<u8> {
    let mut ok = true;
    let mut report = |name: &str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };
    let s3 = SurfaceSpec::symmetric(3, 0.5930).build()?;
    let s4 = SurfaceSpec::symmetric(4, 0.3).build()?;
    for (name, sch) in [("sym:3:0.593", &s3), ("sym:4:0.3", &s4)] {
        let t = build_orbit_table_with(
            sch,
            GroupChoice::Full,
            4,
            Enumerator::Auto,
            TermSign::Signed,
            Execution::Parallel,
        )?;
        let mut worst: f64 = 0.0;
        let mut worst_irrep: f64 = 0.0;
        for n in 1..=4 {
            for x in [0.15, 0.4, 0.77, 1.3, 2.2] {
                let s = Complex64::new(x, 0.0);
                let plain = closed_word_trace(sch, n, s)?;
                let red = reduced_trace(&t, n, s);
                worst = worst.max((red - plain).norm() / plain.norm().max(1e-300));
                // characters cancel inside each irrep sum, so compare against the
                // positive trivial-character sum scaled by the largest dimension
                let mass = pair_trace(sch, t.group, t.trivial_index(), n, s, TermSign::Unsigned)?.norm()
                    * t.characters.irreps.iter().map(|i| i.dim).max().unwrap_or(1) as f64;
                for i in 0..t.n_irreps() {
                    let direct = pair_trace(sch, t.group, i, n, s, TermSign::Signed)?;
                    let from_table = schottky_zeta::cycle::coeff_a(&t, i, n, s) * -(n as f64);
                    worst_irrep = worst_irrep.max((direct - from_table).norm() / mass);
                }
            }
        }
        report(
            &format!("trace identity {name}"),
            worst <= 1e-10,
            format!("max rel {worst:.2e}"),
        );
        report(
            &format!("per-irrep traces {name}"),
            worst_irrep <= 1e-10,
            format!("max rel {worst_irrep:.2e}"),
        );
    }
    let full = build_orbit_table_with(
        &s3,
        GroupChoice::Full,
        4,
        Enumerator::Auto,
        TermSign::Signed,
        Execution::Parallel,
    )?;
    let triv = build_orbit_table_with(
        &s3,
        GroupChoice::Trivial,
        8,
        Enumerator::Auto,
        TermSign::Signed,
        Execution::Parallel,
    )?;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let s = Complex64::new(1.5 + 1.5 * ((k * 7) % 20) as f64 / 19.0, -20.0 + 2.1 * k as f64);
        let a = eval_full_zeta(&full, 4, s)?;
        let b = eval_full_zeta(&triv, 8, s)?;
        worst = worst.max((a / b - 1.0).norm());
    }
    report("factorization sym:3:0.593", worst <= 1e-8, format!("max {worst:.2e}"));
    for (nf, psi, n) in [(3, 0.5930, 4), (4, 0.1010, 4), (5, 0.4, 3)] {
        let sch = SurfaceSpec::symmetric(nf, psi).build()?;
        let pass = cross_check(&sch, n)?;
        report(
            &format!("enumerator cross-check sym:{nf}:{psi} order {n}"),
            pass,
            String::new(),
        );
    }
    if ok {
        Ok(0)
    } else {
        Err(Inconsistent("selftest failed".into()).into())
    }
}

/// Append config entries as flags unless the command line already sets them.
fn merge_config(argv: Vec<String>) -> Result<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| usage("--config needs a path"))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| usage(format!("reading config {path}: {e}")))?;
    let cfg = RunConfig::parse(&text).map_err(|e| usage(format!("config {path}: {e}")))?;

    let cmd = Cli::command();
    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| cmd.get_subcommands().find(|s| s.get_name() == a))
        .ok_or_else(|| usage("missing subcommand"))?;
    let mut out = argv.clone();
    for (key, value) in cfg.entries() {
        let flag = format!("--{key}");
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        match arg {
            Some(a) if matches!(a.get_action(), ArgAction::SetTrue) => {
                if value == "true" {
                    out.push(flag);
                }
            }
            Some(_) => out.push(format!("{flag}={value}")),
            None => return Err(usage(format!("config key {key:?} is not a flag of {}", sub.get_name()))),
        }
    }
    Ok(out)
}

fn setup_threads(argv: &[String], cli: &Cli) -> Result<()> {
    let on_line = argv.iter().any(|a| a == "--threads" || a.starts_with("--threads="));
    let env = std::env::var("ZETA_THREADS").ok();
    let n = match (on_line, env) {
        (false, Some(v)) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("bad ZETA_THREADS {v:?}")))?,
        ),
        _ => cli.threads,
    };
    if let Some(n) = n {
        if n == 0 {
            bail!(usage("thread count must be positive"));
        }
        configure_threads(n);
    }
    Ok(())
}

fn run(argv: Vec<String>) -> Result<u8> {
    let merged = merge_config(argv.clone())?;
    let cli = match Cli::try_parse_from(&merged) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(0);
            }
            let msg = e.to_string();
            return Err(usage(
                msg.strip_prefix("error: ").unwrap_or(&msg).trim_end().to_string(),
            ));
        }
    };
    setup_threads(&argv, &cli)?;
    match &cli.cmd {
        Cmd::SurfaceInfo { surface, json } => cmd_surface_info(surface, json),
        Cmd::PsiForLength { nf, length } => {
            println!("{:.12}", psi_for_length(*nf, *length)?);
            Ok(0)
        }
        Cmd::Chartable {
            name,
            surface,
            group,
            out,
        } => cmd_chartable(name, surface, group, out),
        Cmd::Orbits {
            table,
            order,
            out,
            json,
        } => cmd_orbits(table, *order, out, json),
        Cmd::Zeta { table, rep, order, s } => cmd_zeta(table, rep, *order, s),
        Cmd::Resonances {
            table,
            reps,
            order,
            rect,
            grid_re,
            grid_im,
            out,
            json,
            svg,
        } => cmd_resonances(table, reps, *order, rect, *grid_re, *grid_im, out, json, svg),
        Cmd::Delta { table, order } => cmd_delta(table, *order),
        Cmd::ErrorScan {
            table,
            rep,
            order,
            im,
            x0,
            x1,
            points,
            out,
        } => cmd_error_scan(table, rep, *order, *im, *x0, *x1, *points, out),
        Cmd::Envelope {
            input,
            w,
            t0,
            t1,
            points,
            reps,
            trusted_only,
            out,
        } => cmd_envelope(input, *w, *t0, *t1, *points, reps, *trusted_only, out),
        Cmd::Gap {
            input,
            k,
            delta,
            reps,
            trusted_only,
        } => cmd_gap(input, *k, *delta, reps, *trusted_only),
        Cmd::Selftest => cmd_selftest(),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let c = |a, b| Complex64::new(a, b);
        assert_eq!(parse_complex("0.5+12.3i").unwrap(), c(0.5, 12.3));
        assert_eq!(parse_complex("-0.2-1e3i").unwrap(), c(-0.2, -1000.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("1 - i").unwrap(), c(1.0, -1.0));
        assert!(parse_complex("x+yi").is_err());
    }

    #[test]
    fn clap_definition_is_valid() {
        Cli::command().debug_assert();
    }

    #[test]
    fn group_names() {
        assert_eq!(named_group("D3").unwrap(), Group::DihedralZ2 { n: 3 });
        assert_eq!(named_group("klein").unwrap(), Group::Klein);
        assert!(named_group("d2").is_err());
    }
}
