//! Truncated symmetry-reduced zeta functions via the cycle expansion.

use num_complex::Complex64;

use crate::error::{SymbolicError, ZetaError};
use crate::exec::Execution;
use crate::geometry::{closed_word_length, IfsScheme, SurfaceSpec};
use crate::symbolic::{
    all_pairs, canonicalize, circle_walk, enumerate_prime_classes_bruteforce, enumerate_reduced_with, iterate_pair,
    orbit, power_orbit_multiplicity, resolve_group, GroupChoice, PrimeClassDatum,
};
use crate::symmetry::{character, element_order, power, CharacterTable, Group};

/// Which prime-class enumerator feeds the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Enumerator {
    /// Lyndon words and the circle walk where available, brute force otherwise.
    #[default]
    Auto,
    Reduced,
    BruteForce,
}

/// Sign convention for the multiplier (φ_w∘g)' in the term denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermSign {
    /// Use the true sign ε of the multiplier: 1/(1 − ε^l e^{−lL/m}).
    #[default]
    Signed,
    /// Treat every multiplier as positive: 1/(1 − e^{−lL/m}).
    Unsigned,
}

/// One (class, power) contribution with t = n_w·l.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub class: usize,
    pub l: usize,
    pub t: usize,
    /// l·L/m
    pub lambda: f64,
    /// Combinatorial weight; 1/l when the group acts freely.
    pub weight: f64,
    /// Sign of the multiplier of the l-th power.
    pub sign: f64,
    /// χ(g_w^l) for every irrep, in table order.
    pub chars: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTable {
    pub spec: SurfaceSpec,
    pub group: Group,
    pub characters: CharacterTable,
    pub max_order: usize,
    pub classes: Vec<PrimeClassDatum>,
    /// Sorted by t.
    pub terms: Vec<Term>,
    pub term_sign: TermSign,
}

/// Prime classes of a scheme under a group.
pub fn enumerate_classes(
    scheme: &IfsScheme,
    group: Group,
    max_order: usize,
    enumerator: Enumerator,
    exec: Execution,
) -> Result<Vec<PrimeClassDatum>, SymbolicError> {
    let reduced_ok = matches!(scheme.spec, SurfaceSpec::SymmetricFunnels { .. }) && group == scheme.symmetry;
    match enumerator {
        Enumerator::Reduced | Enumerator::Auto if reduced_ok => {
            enumerate_reduced_with(scheme, max_order, &circle_walk, exec)
        }
        Enumerator::Reduced => Err(SymbolicError::NotSymmetricFunnel),
        _ => enumerate_prime_classes_bruteforce(scheme, group, max_order, exec),
    }
}

pub fn build_orbit_table(
    scheme: &IfsScheme,
    choice: GroupChoice,
    max_order: usize,
    enumerator: Enumerator,
) -> Result<OrbitTable, ZetaError> {
    build_orbit_table_with(
        scheme,
        choice,
        max_order,
        enumerator,
        TermSign::Signed,
        Execution::default(),
    )
}

pub fn build_orbit_table_with(
    scheme: &IfsScheme,
    choice: GroupChoice,
    max_order: usize,
    enumerator: Enumerator,
    term_sign: TermSign,
    exec: Execution,
) -> Result<OrbitTable, ZetaError> {
    let group = resolve_group(scheme, choice)?;
    let classes = enumerate_classes(scheme, group, max_order, enumerator, exec)?;
    Ok(table_from_classes(scheme.spec, group, classes, max_order, term_sign))
}

/// Assemble terms from a list of prime classes.
pub fn table_from_classes(
    spec: SurfaceSpec,
    group: Group,
    classes: Vec<PrimeClassDatum>,
    max_order: usize,
    term_sign: TermSign,
) -> OrbitTable {
    let characters = CharacterTable::new(group);
    let mult = power_orbit_multiplicity(&classes, max_order);
    let g_order = group.order() as f64;
    let mut terms = vec![];
    for (ci, c) in classes.iter().enumerate() {
        for l in 1..=max_order / c.n_w {
            let q = iterate_pair(&c.canonical, l);
            let t = c.n_w * l;
            let orbit_size = orbit(&q).len() as f64;
            let k = mult[&canonicalize(&q)] as f64;
            let gl = power(&c.g_w, l as i64);
            let sign = match term_sign {
                TermSign::Signed => c.multiplier_sign.powi(l as i32),
                TermSign::Unsigned => 1.0,
            };
            terms.push(Term {
                class: ci,
                l,
                t,
                lambda: l as f64 * c.length_per_period(),
                weight: orbit_size / (g_order * t as f64 * k),
                sign,
                chars: characters.irreps.iter().map(|ir| character(ir, &gl)).collect(),
            });
        }
    }
    terms.sort_by_key(|x| (x.t, x.class, x.l));
    OrbitTable {
        spec,
        group,
        characters,
        max_order,
        classes,
        terms,
        term_sign,
    }
}

impl OrbitTable {
    pub fn irrep_index(&self, label: &str) -> Result<usize, ZetaError> {
        self.characters
            .irreps
            .iter()
            .position(|i| i.label == label)
            .ok_or_else(|| ZetaError::Group(crate::error::GroupError::UnknownIrrep(label.into())))
    }

    /// Index of the trivial representation.
    pub fn trivial_index(&self) -> usize {
        let lab = &self.characters.trivial_irrep().label;
        self.characters.irreps.iter().position(|i| &i.label == lab).unwrap()
    }

    pub fn n_irreps(&self) -> usize {
        self.characters.irreps.len()
    }

    pub fn evaluator(&self, irrep: usize, order: usize) -> Result<ZetaEvaluator<'_>, ZetaError> {
        if order > self.max_order {
            return Err(ZetaError::OrderTooHigh {
                requested: order,
                available: self.max_order,
            });
        }
        assert!(irrep < self.n_irreps());
        Ok(ZetaEvaluator {
            table: self,
            irrep,
            order,
        })
    }

    /// Longest λ = L/m·l among the terms.
    pub fn max_lambda(&self) -> f64 {
        self.terms.iter().map(|t| t.lambda).fold(0.0, f64::max)
    }

    /// χ(g_w^l) for a class and power.
    pub fn character_at(&self, class: usize, l: usize, irrep: usize) -> f64 {
        self.terms
            .iter()
            .find(|t| t.class == class && t.l == l)
            .map(|t| t.chars[irrep])
            .expect("power within table order")
    }
}

/// T for one term and irrep: weight·d_χ·χ(g^l)·e^{−sλ}/(1 − sign·e^{−λ}).
pub fn term_value(table: &OrbitTable, term: &Term, irrep: usize, s: Complex64) -> Complex64 {
    let d = table.characters.irreps[irrep].dim as f64;
    let coef = term.weight * d * term.chars[irrep] / (1.0 - term.sign * (-term.lambda).exp());
    (-s * term.lambda).exp() * coef
}

/// T^χ_{[w],l}(s) for a class of the table.
pub fn term_t(table: &OrbitTable, class: usize, l: usize, irrep: usize, s: Complex64) -> Complex64 {
    let term = table
        .terms
        .iter()
        .find(|t| t.class == class && t.l == l)
        .expect("power within table order");
    term_value(table, term, irrep, s)
}

/// a_t(s) = −Σ_{n_w·l = t} T, for t = 1..=order, with s-derivatives.
pub fn coefficients(table: &OrbitTable, irrep: usize, order: usize, s: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut a = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut da = a.clone();
    for term in table.terms.iter().take_while(|t| t.t <= order) {
        let v = term_value(table, term, irrep, s);
        a[term.t] -= v;
        da[term.t] += v * term.lambda;
    }
    (a, da)
}

pub fn coeff_a(table: &OrbitTable, irrep: usize, t: usize, s: Complex64) -> Complex64 {
    coefficients(table, irrep, t, s).0[t]
}

/// Triangle B[N][r] (1 ≤ r ≤ N ≤ n) and its derivative.
pub fn recurrence_triangle(a: &[Complex64], da: &[Complex64]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let n = a.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut b = vec![vec![zero; n + 1]; n + 1];
    let mut db = b.clone();
    for big_n in 1..=n {
        b[big_n][1] = a[big_n];
        db[big_n][1] = da[big_n];
        for r in 2..=big_n {
            let (mut acc, mut dacc) = (zero, zero);
            for t in 1..=big_n - r + 1 {
                acc += b[big_n - t][r - 1] * a[t];
                dacc += db[big_n - t][r - 1] * a[t] + b[big_n - t][r - 1] * da[t];
            }
            b[big_n][r] = acc / r as f64;
            db[big_n][r] = dacc / r as f64;
        }
    }
    (b, db)
}

/// B_{N,r} from a coefficient array `a` (index 0 unused).
pub fn recurrence_b(a: &[Complex64], big_n: usize, r: usize) -> Complex64 {
    assert!(1 <= r && r <= big_n && big_n < a.len());
    let da = vec![Complex64::new(0.0, 0.0); a.len()];
    recurrence_triangle(&a[..=big_n], &da[..=big_n]).0[big_n][r]
}

/// Z^{χ,(n)} for one irrep and truncation order.
#[derive(Debug, Clone, Copy)]
pub struct ZetaEvaluator<'a> {
    pub table: &'a OrbitTable,
    pub irrep: usize,
    pub order: usize,
}

impl ZetaEvaluator<'_> {
    pub fn label(&self) -> &str {
        &self.table.characters.irreps[self.irrep].label
    }

    /// Z^{(k)}(s) and derivatives for k = 0..=order.
    pub fn partial_sums(&self, s: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let (a, da) = coefficients(self.table, self.irrep, self.order, s);
        let (b, db) = recurrence_triangle(&a, &da);
        let mut z = vec![Complex64::new(1.0, 0.0)];
        let mut dz = vec![Complex64::new(0.0, 0.0)];
        for big_n in 1..=self.order {
            let blk: Complex64 = b[big_n][1..=big_n].iter().sum();
            let dblk: Complex64 = db[big_n][1..=big_n].iter().sum();
            z.push(z[big_n - 1] + blk);
            dz.push(dz[big_n - 1] + dblk);
        }
        (z, dz)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.eval_with_derivative(s).0
    }

    pub fn eval_derivative(&self, s: Complex64) -> Complex64 {
        self.eval_with_derivative(s).1
    }

    pub fn eval_with_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let (z, dz) = self.partial_sums(s);
        (z[self.order], dz[self.order])
    }

    /// B_{N,r}(s) for r = 1..=N.
    pub fn block(&self, big_n: usize, s: Complex64) -> Vec<Complex64> {
        let (a, da) = coefficients(self.table, self.irrep, big_n, s);
        recurrence_triangle(&a, &da).0[big_n][1..=big_n].to_vec()
    }
}

/// Either one irrep factor or the product over all irreps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Irrep(usize),
    Full,
}

/// Z^{(k)} and derivatives for k = 0..=order for a target.
pub fn target_partial_sums(
    table: &OrbitTable,
    target: Target,
    order: usize,
    s: Complex64,
) -> Result<(Vec<Complex64>, Vec<Complex64>), ZetaError> {
    match target {
        Target::Irrep(i) => Ok(table.evaluator(i, order)?.partial_sums(s)),
        Target::Full => {
            let one = Complex64::new(1.0, 0.0);
            let mut p = vec![one; order + 1];
            let mut dp = vec![Complex64::new(0.0, 0.0); order + 1];
            for i in 0..table.n_irreps() {
                let (z, dz) = table.evaluator(i, order)?.partial_sums(s);
                for k in 0..=order {
                    dp[k] = dp[k] * z[k] + p[k] * dz[k];
                    p[k] *= z[k];
                }
            }
            Ok((p, dp))
        }
    }
}

pub fn eval_target(
    table: &OrbitTable,
    target: Target,
    order: usize,
    s: Complex64,
) -> Result<(Complex64, Complex64), ZetaError> {
    let (z, dz) = target_partial_sums(table, target, order, s)?;
    Ok((z[order], dz[order]))
}

/// Product of all irrep factors at order n.
pub fn eval_full_zeta(table: &OrbitTable, order: usize, s: Complex64) -> Result<Complex64, ZetaError> {
    Ok(eval_target(table, Target::Full, order, s)?.0)
}

/// R_n(s) = |Z^{(n−1)}(s) − Z^{(n)}(s)| / |Z^{(n)}(s)|.
pub fn relative_error(table: &OrbitTable, target: Target, n: usize, s: Complex64) -> Result<f64, ZetaError> {
    assert!(n >= 1);
    let (z, _) = target_partial_sums(table, target, n, s)?;
    let den = z[n].norm();
    if den < 1e-300 {
        return Err(ZetaError::DegenerateDenominator);
    }
    Ok((z[n - 1] - z[n]).norm() / den)
}

/// Probe radius for the local relative error at a zero.
pub const TRUST_PROBE_RADIUS: f64 = 0.05;

/// Largest R_n over four points around s. R_n itself is singular at a zero
/// of Z^{(n)}, so this is the accuracy measure attached to resonances.
pub fn local_relative_error(table: &OrbitTable, target: Target, n: usize, s: Complex64) -> Result<f64, ZetaError> {
    let r = TRUST_PROBE_RADIUS;
    let probes = [s + r, s - r, s + Complex64::new(0.0, r), s - Complex64::new(0.0, r)];
    let mut worst: f64 = 0.0;
    for p in probes {
        worst = worst.max(relative_error(table, target, n, p)?);
    }
    Ok(worst)
}

/// ∏_γ ∏_k (1 − e^{−(s+k)l(γ)}) over the given primitive lengths ≤ cutoff.
pub fn euler_product_oracle(lengths: &[f64], s: Complex64, cutoff: f64) -> Result<Complex64, ZetaError> {
    if s.re <= 1.0 {
        return Err(ZetaError::NotConvergent(s.re));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for &l in lengths.iter().filter(|&&l| l <= cutoff) {
        let mut k = 0.0;
        while (-(s.re + k) * l).exp() >= 1e-18 {
            prod *= 1.0 - (-(s + k) * l).exp();
            k += 1.0;
        }
    }
    Ok(prod)
}

/// Σ over G-closed pairs of length n of (d_χ/|G|)·χ(g)·e^{−sλ}/(1 − ε e^{−λ}),
/// with λ = L(w^m)/m computed for each pair separately.
pub fn pair_trace(
    scheme: &IfsScheme,
    group: Group,
    irrep: usize,
    n: usize,
    s: Complex64,
    term_sign: TermSign,
) -> Result<Complex64, ZetaError> {
    let table = CharacterTable::new(group);
    let ir = &table.irreps[irrep];
    let mut acc = Complex64::new(0.0, 0.0);
    for p in all_pairs(scheme, group, n) {
        let m = element_order(&p.g) as usize;
        let lam = closed_word_length(scheme, &iterate_pair(&p, m).word).map_err(SymbolicError::from)? / m as f64;
        let datum = PrimeClassDatum::from_pair(scheme, &p, None)?;
        let sign = match term_sign {
            TermSign::Signed => datum.multiplier_sign,
            TermSign::Unsigned => 1.0,
        };
        let c = ir.dim as f64 * character(ir, &p.g) / group.order() as f64;
        acc += (-s * lam).exp() * (c / (1.0 - sign * (-lam).exp()));
    }
    Ok(acc)
}

/// Σ over closed words of length n of e^{−sL}/(1 − e^{−L}).
pub fn closed_word_trace(scheme: &IfsScheme, n: usize, s: Complex64) -> Result<Complex64, ZetaError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in all_pairs(scheme, Group::Trivial, n) {
        let l = closed_word_length(scheme, &p.word).map_err(SymbolicError::from)?;
        acc += (-s * l).exp() / (1.0 - (-l).exp());
    }
    Ok(acc)
}

/// Σ_χ of −n·a_n^χ(s), the reduced side of the trace identity.
pub fn reduced_trace(table: &OrbitTable, n: usize, s: Complex64) -> Complex64 {
    (0..table.n_irreps())
        .map(|i| coeff_a(table, i, n, s) * -(n as f64))
        .sum()
}
