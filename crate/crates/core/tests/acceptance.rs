//! Acceptance criteria A1–A10. Each test prints one PASS/FAIL line.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schottky_zeta::cycle::{
    build_orbit_table, closed_word_trace, euler_product_oracle, eval_full_zeta, pair_trace, reduced_trace,
    relative_error, Enumerator, OrbitTable, Target, TermSign,
};
use schottky_zeta::exec::Execution;
use schottky_zeta::geometry::{build_bowen_series, build_flow_adapted, psi_for_length};
use schottky_zeta::resonance::{critical_exponent, search_resonances, set_distance, NewtonOptions, SearchRegion};
use schottky_zeta::spectral::{gap, Provenance, ResonanceSet};
use schottky_zeta::symbolic::{cross_check, enumerate_prime_classes_bruteforce, GroupChoice};
use schottky_zeta::symmetry::{element_from_permutation, parse_cycles, CharacterTable, Group};

const A2_TOL: f64 = 0.005;
const A3_TOL: f64 = 5e-5;
const A5_TOL: f64 = 1e-8;
const A6_TOL: f64 = 1e-4;
const A7_TOL: f64 = 1e-10;
const A8_TOL: f64 = 1e-2;
const A9_BOUND: f64 = 1e-9;
const A9_TRUST: f64 = 1e-3;
const A9_SETDIST: f64 = 1e-6;
const A10_RATIO: f64 = 0.1;

fn report(id: &str, pass: bool, detail: &str) {
    println!("{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id}: {detail}");
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn table(nf: u32, psi: f64, choice: GroupChoice, order: usize) -> OrbitTable {
    let s = build_flow_adapted(nf, psi).unwrap();
    build_orbit_table(&s, choice, order, Enumerator::Auto).unwrap()
}

/// Published table: column headers in cycle notation, then (label, row).
struct Published {
    name: &'static str,
    group: Group,
    n_symbols: usize,
    columns: &'static [&'static str],
    rows: &'static [(&'static str, &'static [i64])],
}

const D3_TABLE: Published = Published {
    name: "D3xZ2",
    group: Group::DihedralZ2 { n: 3 },
    n_symbols: 6,
    columns: &[
        "()",
        "(2,3)(5,6)",
        "(1,2,3)(4,5,6)",
        "(1,4)(2,5)(3,6)",
        "(1,4)(2,6)(3,5)",
        "(1,5,3,4,2,6)",
    ],
    rows: &[
        ("I_1", &[1, 1, 1, 1, 1, 1]),
        ("I_2", &[1, 1, 1, -1, -1, -1]),
        ("II_1", &[1, -1, 1, 1, -1, 1]),
        ("II_2", &[1, -1, 1, -1, 1, -1]),
        ("III_1", &[2, 0, -1, -2, 0, 1]),
        ("III_2", &[2, 0, -1, 2, 0, -1]),
    ],
};

const D4_TABLE: Published = Published {
    name: "D4xZ2",
    group: Group::DihedralZ2 { n: 4 },
    n_symbols: 8,
    columns: &[
        "()",
        "(2,4)(6,8)",
        "(1,2)(3,4)(5,6)(7,8)",
        "(1,2,3,4)(5,6,7,8)",
        "(1,3)(2,4)(5,7)(6,8)",
        "(1,5)(2,6)(3,7)(4,8)",
        "(1,5)(2,8)(3,7)(4,6)",
        "(1,6)(2,5)(3,8)(4,7)",
        "(1,6,3,8)(2,7,4,5)",
        "(1,7)(2,8)(3,5)(4,6)",
    ],
    rows: &[
        ("I_1", &[1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
        ("I_2", &[1, 1, 1, 1, 1, -1, -1, -1, -1, -1]),
        ("II_1", &[1, 1, -1, -1, 1, 1, 1, -1, -1, 1]),
        ("II_2", &[1, 1, -1, -1, 1, -1, -1, 1, 1, -1]),
        ("III_1", &[1, -1, -1, 1, 1, -1, 1, 1, -1, -1]),
        ("III_2", &[1, -1, -1, 1, 1, 1, -1, -1, 1, 1]),
        ("IV_1", &[1, -1, 1, -1, 1, -1, 1, -1, 1, -1]),
        ("IV_2", &[1, -1, 1, -1, 1, 1, -1, 1, -1, 1]),
        ("V_1", &[2, 0, 0, 0, -2, 2, 0, 0, 0, -2]),
        ("V_2", &[2, 0, 0, 0, -2, -2, 0, 0, 0, 2]),
    ],
};

const KLEIN_TABLE: Published = Published {
    name: "Z2xZ2",
    group: Group::Klein,
    n_symbols: 4,
    columns: &["()", "(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)"],
    rows: &[
        ("A", &[1, 1, 1, 1]),
        ("B", &[1, 1, -1, -1]),
        ("C", &[1, -1, 1, 1]),
        ("D", &[1, -1, -1, 1]),
    ],
};

/// Mismatching entries, or a structural problem, for one published table.
fn compare_table(p: &Published) -> Vec<String> {
    let t = CharacterTable::new(p.group);
    let mut bad = vec![];
    if t.irreps.len() != p.rows.len() || t.classes.len() != p.columns.len() {
        bad.push(format!("{}: shape {}x{}", p.name, t.irreps.len(), t.classes.len()));
        return bad;
    }
    // columns: locate each printed representative among the generated classes
    let mut col_class = vec![];
    for col in p.columns {
        let perm = parse_cycles(col, p.n_symbols).unwrap();
        match element_from_permutation(p.group, &perm) {
            Some(g) => col_class.push(t.class_index(&g)),
            None => bad.push(format!("{}: {col} is not a group element", p.name)),
        }
    }
    let mut sorted = col_class.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != p.columns.len() {
        bad.push(format!("{}: printed columns do not hit distinct classes", p.name));
        return bad;
    }
    let rows = t.rows();
    for (label, printed) in p.rows {
        let Some(i) = t.irreps.iter().position(|ir| ir.label == *label) else {
            bad.push(format!("{}: no irrep {label}", p.name));
            continue;
        };
        for (j, &want) in printed.iter().enumerate() {
            let got = rows[i][col_class[j]];
            if got != want as f64 {
                bad.push(format!(
                    "{} {label} at {}: printed {want}, generated {got}",
                    p.name, p.columns[j]
                ));
            }
        }
    }
    bad
}

#[test]
fn a1_character_tables() {
    let mut bad = vec![];
    for p in [&D3_TABLE, &D4_TABLE, &KLEIN_TABLE] {
        bad.extend(compare_table(p));
    }
    let detail = if bad.is_empty() {
        "D3xZ2, D4xZ2, Z2xZ2 match entrywise".to_string()
    } else {
        bad.join("; ")
    };
    report("A1", bad.is_empty(), &detail);
}

fn is_rotation(a: &[i8], b: &[i8]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|k| a[k..].iter().chain(&a[..k]).eq(b.iter()))
}

#[test]
fn a2_worked_lengths() {
    let t = table(3, 0.5930, GroupChoice::Full, 2);
    let want: [(&[i8], f64); 3] = [(&[1], 3.530), (&[-1], 3.500), (&[1, -1], 7.032)];
    let mut ok = true;
    let mut parts = vec![];
    for (syms, v) in want {
        let d = t
            .classes
            .iter()
            .find(|d| d.reduced_word.as_ref().is_some_and(|r| is_rotation(&r.symbols, syms)))
            .expect("class present");
        let got = d.length_per_period();
        ok &= (got - v).abs() <= A2_TOL;
        parts.push(format!("{syms:?} {got:.4} (want {v})"));
    }
    report("A2", ok, &parts.join(", "));
}

#[test]
fn a3_psi_table() {
    let want = [
        (3u32, 12.0, 0.1723),
        (3, 9.0, 0.3631),
        (3, 7.0, 0.5930),
        (4, 13.0, 0.1010),
    ];
    let mut ok = true;
    let mut parts = vec![];
    for (nf, len, psi) in want {
        let got = psi_for_length(nf, len).unwrap();
        let pass = (got - psi).abs() <= A3_TOL;
        ok &= pass;
        parts.push(format!(
            "({nf},{len})->{got:.5} want {psi}{}",
            if pass { "" } else { " MISS" }
        ));
    }
    report("A3", ok, &parts.join(", "));
}

#[test]
fn a4_orbit_counts() {
    let bs = build_bowen_series(7.0, 7.0, 7.01).unwrap();
    let klein = enumerate_prime_classes_bruteforce(&bs, Group::Klein, 6, Execution::Parallel).unwrap();
    let d3 = build_flow_adapted(3, 0.5930).unwrap();
    let agree = cross_check(&d3, 6).unwrap();
    let n_d3 = table(3, 0.5930, GroupChoice::Full, 6).classes.len();
    report(
        "A4",
        klein.len() == 196 && agree,
        &format!(
            "Z2xZ2 order 6: {} classes (want 196); D3xZ2 order 6: {n_d3} classes, enumerators agree: {agree}",
            klein.len()
        ),
    );
}

#[test]
fn a5_factorization() {
    let full = table(3, 0.5930, GroupChoice::Full, 4);
    let triv = table(3, 0.5930, GroupChoice::Trivial, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = c(rng.gen_range(1.5..3.0), rng.gen_range(-50.0..50.0));
        let p = eval_full_zeta(&full, 4, s).unwrap();
        let z = eval_full_zeta(&triv, 8, s).unwrap();
        worst = worst.max((p / z - 1.0).norm());
    }
    report(
        "A5",
        worst <= A5_TOL,
        &format!("max |ratio - 1| = {worst:.3e} over 20 points"),
    );
}

#[test]
fn a6_euler_product() {
    let full = table(3, 0.5930, GroupChoice::Full, 6);
    // closed words up to 8 letters cover every primitive geodesic shorter than
    // the shortest 10-letter one
    let triv = table(3, 0.5930, GroupChoice::Trivial, 8);
    let cutoff = 17.0;
    let shortest_missing = 5.0
        * triv
            .classes
            .iter()
            .map(|d| d.length / (d.n_w as f64 / 2.0))
            .fold(f64::INFINITY, f64::min);
    assert!(shortest_missing > cutoff);
    let lengths: Vec<f64> = triv.classes.iter().map(|d| d.length).collect();
    let s = c(2.0, 0.0);
    let e = euler_product_oracle(&lengths, s, cutoff).unwrap();
    let z = eval_full_zeta(&full, 6, s).unwrap();
    let rel = ((z - e) / e).norm();
    report(
        "A6",
        rel <= A6_TOL,
        &format!("Z(2) = {:.12}, product = {:.12}, rel {rel:.3e}", z.re, e.re),
    );
}

#[test]
fn a7_trace_identity() {
    let sch = build_flow_adapted(3, 0.5930).unwrap();
    let t = build_orbit_table(&sch, GroupChoice::Full, 4, Enumerator::Auto).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let xs: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..3.0)).collect();
    let mut worst: f64 = 0.0;
    for n in 1..=4 {
        for &x in &xs {
            let s = c(x, 0.0);
            let plain = closed_word_trace(&sch, n, s).unwrap();
            let from_pairs: Complex64 = (0..t.n_irreps())
                .map(|i| pair_trace(&sch, t.group, i, n, s, TermSign::Signed).unwrap())
                .sum();
            let from_table = reduced_trace(&t, n, s);
            // odd n has no closed words; measure against the unsigned term mass there
            let mass = pair_trace(&sch, t.group, t.trivial_index(), n, s, TermSign::Unsigned)
                .unwrap()
                .norm();
            let scale = plain.norm().max(mass);
            worst = worst
                .max((from_pairs - plain).norm() / scale)
                .max((from_table - plain).norm() / scale);
        }
    }
    report(
        "A7",
        worst <= A7_TOL,
        &format!("max relative deviation {worst:.3e} (n = 1..4, s = {xs:.3?})"),
    );
}

#[test]
fn a8_convergence_at_height_1000() {
    let t = table(3, 0.1723, GroupChoice::Full, 6);
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for k in 0..50 {
        let x = -0.2 + 1.2 * k as f64 / 49.0;
        let r = relative_error(&t, Target::Full, 6, c(x, 1000.0)).unwrap();
        if r > worst {
            worst = r;
            at = x;
        }
    }
    report("A8", worst <= A8_TOL, &format!("max R_6 = {worst:.3e} at x = {at:.3}"));
}

#[test]
fn a9_spectral_structure() {
    let t = table(3, 0.5930, GroupChoice::Full, 6);
    let delta = critical_exponent(&t, 6).unwrap();
    let rect = [0.0, delta + 0.1, 0.0, 50.0];
    let region = SearchRegion::with_default_grid(rect, &t).unwrap();
    let opts = NewtonOptions::default();
    let inside = |z: &schottky_zeta::resonance::Resonance| {
        z.re >= rect[0] - 1e-6 && z.re <= rect[1] && z.im >= rect[2] - 1e-6 && z.im <= rect[3]
    };

    let mut per_irrep = vec![];
    let mut counts_ok = true;
    for i in 0..t.n_irreps() {
        let r = search_resonances(&t, Target::Irrep(i), 6, &region, &opts, Execution::Parallel).unwrap();
        counts_ok &= r.consistent();
        per_irrep.extend(r.resonances.into_iter().filter(|z| inside(z)));
    }
    let full = search_resonances(&t, Target::Full, 6, &region, &opts, Execution::Parallel).unwrap();
    counts_ok &= full.consistent();
    let full_zeros: Vec<Complex64> = full.resonances.iter().filter(|z| inside(z)).map(|z| z.s()).collect();
    let union: Vec<Complex64> = per_irrep.iter().map(|z| z.s()).collect();
    let dist = set_distance(&union, &full_zeros);

    let mut above = vec![];
    for z in &per_irrep {
        let leading = (z.s() - delta).norm() < 1e-6;
        if !leading && z.local_error <= A9_TRUST && z.re > delta + A9_BOUND {
            above.push(z.s());
        }
    }
    let i1 = t.characters.irreps[t.trivial_index()].label.clone();
    let set = ResonanceSet::new(per_irrep, Provenance::default());
    let g0 = gap(&set, Some(&i1), 0.0, delta);

    let pass = delta > 0.0
        && delta < 1.0
        && above.is_empty()
        && g0.as_ref().is_ok_and(|g| *g < delta)
        && dist < A9_SETDIST
        && counts_ok;
    report(
        "A9",
        pass,
        &format!(
            "delta = {delta:.10}, {} irrep zeros / {} full zeros, set distance {dist:.2e}, above delta: {above:?}, G0 = {g0:?}, argument counts consistent: {counts_ok}",
            union.len(),
            full_zeros.len()
        ),
    );
}

#[test]
fn a10_shadowing() {
    let t = table(3, 0.5930, GroupChoice::Full, 2);
    let ev = t.evaluator(t.irrep_index("I_1").unwrap(), 2).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let x = 0.2 + 0.8 * k as f64 / 19.0;
        let b = ev.block(2, c(x, 0.0));
        let sum: Complex64 = b.iter().sum();
        let biggest = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst = worst.max(sum.norm() / biggest);
    }
    report(
        "A10",
        worst <= A10_RATIO,
        &format!("max |sum B_2r| / max |B_2r| = {worst:.3e} on [0.2, 1]"),
    );
}
