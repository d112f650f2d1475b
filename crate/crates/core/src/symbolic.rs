//! Words, G-closed pairs, the G × Z action and prime-class enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::SymbolicError;
use crate::exec::{self, Execution};
use crate::geometry::{build_flow_adapted, closed_word_length, IfsScheme, SurfaceSpec};
use crate::symmetry::{
    act_on_symbol, closing_element, conjugate, element_order, inverse, mul, orientation_sign, power, CharacterTable,
    Group, GroupElement, Orientation,
};

/// A word `(w_0, …, w_n)` together with a closing element g, `g·w_n = w_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GClosedPair {
    pub word: Vec<u8>,
    pub g: GroupElement,
}

impl GClosedPair {
    pub fn new(word: Vec<u8>, g: GroupElement) -> Self {
        debug_assert!(word.len() >= 2);
        debug_assert_eq!(act_on_symbol(&g, word[word.len() - 1]), word[0]);
        Self { word, g }
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.word.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for GClosedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.word.iter().map(|s| s.to_string()).collect();
        write!(f, "(({}), {:?})", w.join(","), (self.g.rot, self.g.refl, self.g.swap))
    }
}

/// Which symmetry group to factor by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupChoice {
    /// The largest group attached to the scheme.
    #[default]
    Full,
    /// Z2 × Z2 on a Bowen–Series scheme.
    Klein,
    Trivial,
}

impl std::str::FromStr for GroupChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(GroupChoice::Full),
            "klein" => Ok(GroupChoice::Klein),
            "trivial" => Ok(GroupChoice::Trivial),
            _ => Err(format!("unknown group '{s}' (full | klein | trivial)")),
        }
    }
}

impl fmt::Display for GroupChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupChoice::Full => "full",
            GroupChoice::Klein => "klein",
            GroupChoice::Trivial => "trivial",
        })
    }
}

pub fn resolve_group(scheme: &IfsScheme, choice: GroupChoice) -> Result<Group, SymbolicError> {
    match choice {
        GroupChoice::Full => Ok(scheme.symmetry),
        GroupChoice::Trivial => Ok(Group::Trivial),
        GroupChoice::Klein if scheme.symmetry == Group::Klein => Ok(Group::Klein),
        GroupChoice::Klein => Err(SymbolicError::Group(crate::error::GroupError::ContextMismatch)),
    }
}

/// `h·(w, g) = (hw, hgh⁻¹)`.
pub fn act(h: &GroupElement, p: &GClosedPair) -> GClosedPair {
    GClosedPair {
        word: p.word.iter().map(|&s| act_on_symbol(h, s)).collect(),
        g: conjugate(h, &p.g),
    }
}

/// `σ_L(w, g) = ((w_1, …, w_n, g⁻¹w_1), g)`.
pub fn shift_left(p: &GClosedPair) -> GClosedPair {
    let gi = inverse(&p.g);
    let mut word = p.word[1..].to_vec();
    word.push(act_on_symbol(&gi, p.word[1]));
    GClosedPair { word, g: p.g }
}

/// `σ_R(w, g) = ((g w_{n-1}, w_0, …, w_{n-1}), g)`, inverse of `shift_left`.
pub fn shift_right(p: &GClosedPair) -> GClosedPair {
    let n = p.len();
    let mut word = Vec::with_capacity(n + 1);
    word.push(act_on_symbol(&p.g, p.word[n - 1]));
    word.extend_from_slice(&p.word[..n]);
    GClosedPair { word, g: p.g }
}

/// k-fold iteration: `(g^{k-1}w_0, …, g^{k-1}w_n, g^{k-2}w_1, …, w_1, …, w_n)` with element g^k.
pub fn iterate_pair(p: &GClosedPair, k: usize) -> GClosedPair {
    assert!(k >= 1);
    let n = p.len();
    let mut word = Vec::with_capacity(k * n + 1);
    let top = power(&p.g, k as i64 - 1);
    word.extend(p.word.iter().map(|&s| act_on_symbol(&top, s)));
    for j in (0..k - 1).rev() {
        let h = power(&p.g, j as i64);
        word.extend(p.word[1..].iter().map(|&s| act_on_symbol(&h, s)));
    }
    GClosedPair {
        word,
        g: power(&p.g, k as i64),
    }
}

/// Full G × Z orbit.
pub fn orbit(p: &GClosedPair) -> BTreeSet<GClosedPair> {
    let elems = p.g.group.elements();
    let mut out = BTreeSet::new();
    let mut q = p.clone();
    // σ_L^n acts as g⁻¹, so n shifts and all of G cover the orbit
    for _ in 0..p.len() {
        for h in &elems {
            out.insert(act(h, &q));
        }
        q = shift_left(&q);
    }
    out
}

/// Lexicographic minimum of the orbit.
pub fn canonicalize(p: &GClosedPair) -> GClosedPair {
    let elems = p.g.group.elements();
    let mut best: Option<GClosedPair> = None;
    let mut q = p.clone();
    for _ in 0..p.len() {
        for h in &elems {
            let c = act(h, &q);
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
        q = shift_left(&q);
    }
    best.expect("nonempty orbit")
}

/// Not an iteration of a shorter pair.
pub fn is_prime(p: &GClosedPair) -> bool {
    let n = p.len();
    let elems = p.g.group.elements();
    for d in 1..n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let k = n / d;
        let tail = p.word[n - d..].to_vec();
        for h in &elems {
            if power(h, k as i64) != p.g || act_on_symbol(h, tail[d]) != tail[0] {
                continue;
            }
            let q = GClosedPair {
                word: tail.clone(),
                g: *h,
            };
            if iterate_pair(&q, k) == *p {
                return false;
            }
        }
    }
    true
}

/// Symbols of a reduced word. `flipped` marks the extra classes of even n_f:
/// the all-zero words (0)^k whose closing element reverses the final
/// orientation. These are prime exactly for k a power of two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    pub symbols: Vec<i8>,
    pub flipped: bool,
}

impl ReducedWord {
    pub fn new(symbols: Vec<i8>) -> Self {
        Self {
            symbols,
            flipped: false,
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.symbols.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", s.join(","))?;
        if self.flipped {
            f.write_str("*")?;
        }
        Ok(())
    }
}

/// The reduced alphabet in increasing order.
pub fn reduced_alphabet(nf: u8) -> Vec<i8> {
    let nf = nf as i8;
    if nf % 2 == 1 {
        let h = (nf - 1) / 2;
        (-h..=h).filter(|&k| k != 0).collect()
    } else {
        let h = (nf - 2) / 2;
        (-h..=h).collect()
    }
}

/// Decode a reduced word by walking around the boundary circles.
pub fn circle_walk(nf: u8, rw: &ReducedWord) -> Result<GClosedPair, SymbolicError> {
    let alphabet = reduced_alphabet(nf);
    if rw.symbols.is_empty() {
        return Err(SymbolicError::InvalidSymbol(0));
    }
    let n = nf as i64;
    let (mut copy, mut pos, mut o) = (0i64, 0i64, Orientation::Pos);
    let mut word = vec![1u8];
    for &k in &rw.symbols {
        if !alphabet.contains(&k) {
            return Err(SymbolicError::InvalidSymbol(k));
        }
        let step = if k == 0 { n / 2 } else { k.unsigned_abs() as i64 };
        pos = (pos + o.sign() * step).rem_euclid(n);
        copy ^= 1;
        if k < 0 {
            o = o.flip();
        }
        word.push((copy * n + pos + 1) as u8);
    }
    if let Some(&k) = rw.symbols.iter().find(|&&k| rw.flipped && k != 0) {
        return Err(SymbolicError::InvalidSymbol(k));
    }
    let end_o = if rw.flipped { o.flip() } else { o };
    let g = closing_element(nf, (1, Orientation::Pos), (*word.last().unwrap(), end_o));
    Ok(GClosedPair::new(word, g))
}

/// Lyndon words of length 1..=max_n over `0..k`, in generation order (FKM).
pub fn lyndon_words(k: usize, max_n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    if k == 0 || max_n == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        if !w.is_empty() && w.len() <= max_n {
            out.push(w.clone());
        }
        // next prenecklace: repeat w to length max_n, then increment
        let m = w.len();
        while w.len() < max_n {
            w.push(w[w.len() - m]);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            Some(x) => *x += 1,
            None => break,
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimeClassDatum {
    pub canonical: GClosedPair,
    pub n_w: usize,
    pub g_w: GroupElement,
    pub m_w: u32,
    /// Geodesic length of the closed word w^{m_w}.
    pub length: f64,
    /// Sign of (φ_w∘g_w)' at the fixed point.
    pub multiplier_sign: f64,
    pub reduced_word: Option<ReducedWord>,
}

impl PrimeClassDatum {
    pub fn from_pair(
        scheme: &IfsScheme,
        p: &GClosedPair,
        reduced_word: Option<ReducedWord>,
    ) -> Result<Self, SymbolicError> {
        let canonical = canonicalize(p);
        let g_w = canonical.g;
        let m_w = element_order(&g_w);
        let closed = iterate_pair(&canonical, m_w as usize);
        let length = closed_word_length(scheme, &closed.word)?;
        let mut sign = orientation_sign(&g_w);
        for e in canonical.word.windows(2) {
            let m = scheme.edge_map(e[0], e[1]).expect("adjacency-valid word");
            if m.det() < 0.0 {
                sign = -sign;
            }
        }
        Ok(Self {
            n_w: canonical.len(),
            canonical,
            g_w,
            m_w,
            length,
            multiplier_sign: sign,
            reduced_word,
        })
    }

    /// L / m.
    pub fn length_per_period(&self) -> f64 {
        self.length / self.m_w as f64
    }
}

/// All adjacency-valid words with `n` transitions starting at `first`.
pub fn words_from(scheme: &IfsScheme, first: u8, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![];
    let mut stack = vec![vec![first]];
    while let Some(w) = stack.pop() {
        if w.len() == n + 1 {
            out.push(w);
            continue;
        }
        let last = *w.last().unwrap();
        for s in scheme.successors(last) {
            let mut v = w.clone();
            v.push(s);
            stack.push(v);
        }
    }
    out.sort();
    out
}

/// Every G-closed pair with `n` transitions.
pub fn all_pairs(scheme: &IfsScheme, group: Group, n: usize) -> Vec<GClosedPair> {
    let elems = group.elements();
    let mut out = vec![];
    for first in 1..=scheme.n_symbols() as u8 {
        for w in words_from(scheme, first, n) {
            for g in &elems {
                if act_on_symbol(g, w[n]) == w[0] {
                    out.push(GClosedPair { word: w.clone(), g: *g });
                }
            }
        }
    }
    out
}

const BRUTE_FORCE_LIMIT: f64 = 1e8;

fn sort_classes(v: &mut [PrimeClassDatum]) {
    v.sort_by(|a, b| (a.n_w, &a.canonical).cmp(&(b.n_w, &b.canonical)));
}

/// Exhaustive enumeration of prime classes with n_w ≤ max_n.
pub fn enumerate_prime_classes_bruteforce(
    scheme: &IfsScheme,
    group: Group,
    max_n: usize,
    exec: Execution,
) -> Result<Vec<PrimeClassDatum>, SymbolicError> {
    let size = (scheme.n_symbols() as f64).powi(max_n as i32);
    if size > BRUTE_FORCE_LIMIT {
        return Err(SymbolicError::TooLarge(size));
    }
    let elems = group.elements();
    let firsts: Vec<u8> = (1..=scheme.n_symbols() as u8).collect();
    let mut canon = BTreeSet::new();
    for n in 1..=max_n {
        let parts = exec::map(&firsts, exec, |&f| {
            let mut set = BTreeSet::new();
            for w in words_from(scheme, f, n) {
                for g in &elems {
                    if act_on_symbol(g, w[n]) == w[0] {
                        set.insert(canonicalize(&GClosedPair { word: w.clone(), g: *g }));
                    }
                }
            }
            set
        });
        for s in parts {
            canon.extend(s);
        }
    }
    let reps: Vec<GClosedPair> = canon.into_iter().filter(is_prime).collect();
    let data = exec::map(&reps, exec, |p| PrimeClassDatum::from_pair(scheme, p, None));
    let mut out = data.into_iter().collect::<Result<Vec<_>, _>>()?;
    sort_classes(&mut out);
    Ok(out)
}

type Walker<'a> = dyn Fn(u8, &ReducedWord) -> Result<GClosedPair, SymbolicError> + Sync + 'a;

/// Reduced words, one per prime class, for n_w ≤ max_n.
pub fn reduced_words(nf: u8, max_n: usize) -> Vec<ReducedWord> {
    let alphabet = reduced_alphabet(nf);
    let mut out: Vec<ReducedWord> = lyndon_words(alphabet.len(), max_n)
        .into_iter()
        .map(|w| ReducedWord::new(w.into_iter().map(|i| alphabet[i]).collect()))
        .collect();
    if nf.is_multiple_of(2) {
        let mut k = 1;
        while k <= max_n {
            out.push(ReducedWord {
                symbols: vec![0; k],
                flipped: true,
            });
            k *= 2;
        }
    }
    out
}

/// Prime classes of X_{n_f,ψ} under D_{n_f} × Z2 from Lyndon words and the circle walk.
pub fn enumerate_prime_classes_reduced(nf: u32, psi: f64, max_n: usize) -> Result<Vec<PrimeClassDatum>, SymbolicError> {
    let scheme = build_flow_adapted(nf, psi)?;
    enumerate_reduced_with(&scheme, max_n, &circle_walk, Execution::default())
}

/// Reduced enumeration on a prebuilt scheme with an explicit walk.
pub fn enumerate_reduced_with(
    scheme: &IfsScheme,
    max_n: usize,
    walk: &Walker<'_>,
    exec: Execution,
) -> Result<Vec<PrimeClassDatum>, SymbolicError> {
    let SurfaceSpec::SymmetricFunnels { nf, .. } = scheme.spec else {
        return Err(SymbolicError::NotSymmetricFunnel);
    };
    let words = reduced_words(nf as u8, max_n);
    let data = exec::map(&words, exec, |rw| {
        let p = walk(nf as u8, rw)?;
        PrimeClassDatum::from_pair(scheme, &p, Some(rw.clone()))
    });
    let mut out = data.into_iter().collect::<Result<Vec<_>, _>>()?;
    sort_classes(&mut out);
    Ok(out)
}

/// Both enumerators agree on the full group of a symmetric funnel scheme.
pub fn cross_check(scheme: &IfsScheme, max_n: usize) -> Result<bool, SymbolicError> {
    cross_check_with(scheme, max_n, &circle_walk)
}

pub fn cross_check_with(scheme: &IfsScheme, max_n: usize, walk: &Walker<'_>) -> Result<bool, SymbolicError> {
    let brute = enumerate_prime_classes_bruteforce(scheme, scheme.symmetry, max_n, Execution::default())?;
    let reduced = enumerate_reduced_with(scheme, max_n, walk, Execution::default())?;
    let table = CharacterTable::new(scheme.symmetry);
    let key = |d: &PrimeClassDatum| (d.n_w, d.m_w, table.class_index(&d.g_w), d.canonical.clone());
    let mut a: Vec<_> = brute.iter().map(|d| (key(d), d.length)).collect();
    let mut b: Vec<_> = reduced.iter().map(|d| (key(d), d.length)).collect();
    a.sort_by(|x, y| x.0.cmp(&y.0));
    b.sort_by(|x, y| x.0.cmp(&y.0));
    if a.len() != b.len() {
        return Err(SymbolicError::Mismatch(format!(
            "brute force found {} classes, reduced walk {}",
            a.len(),
            b.len()
        )));
    }
    for (x, y) in a.iter().zip(&b) {
        if x.0 != y.0 || (x.1 - y.1).abs() > 1e-9 * x.1.max(1.0) {
            return Err(SymbolicError::Mismatch(format!(
                "n_w={} m_w={} class={} {} L={} vs n_w={} m_w={} class={} {} L={}",
                x.0 .0, x.0 .1, x.0 .2, x.0 .3, x.1, y.0 .0, y.0 .1, y.0 .2, y.0 .3, y.1
            )));
        }
    }
    Ok(true)
}

/// Counts of prime classes per length 1..=max_n.
pub fn counts_by_length(classes: &[PrimeClassDatum], max_n: usize) -> Vec<usize> {
    let mut c = vec![0; max_n];
    for d in classes {
        if d.n_w >= 1 && d.n_w <= max_n {
            c[d.n_w - 1] += 1;
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeActionReport {
    pub free: bool,
    /// A pair and a nonidentity element fixing it.
    pub witness: Option<(GClosedPair, GroupElement)>,
}

/// Whether G acts freely on the G-closed pairs with n ≤ max_order.
pub fn check_free_action(scheme: &IfsScheme, group: Group, max_order: usize) -> FreeActionReport {
    let elems: Vec<GroupElement> = group.elements().into_iter().filter(|g| !g.is_identity()).collect();
    for n in 1..=max_order {
        for p in all_pairs(scheme, group, n) {
            for h in &elems {
                if act(h, &p) == p {
                    return FreeActionReport {
                        free: false,
                        witness: Some((p, *h)),
                    };
                }
            }
        }
    }
    FreeActionReport {
        free: true,
        witness: None,
    }
}

/// Number of (class, power) pairs hitting each canonical orbit of c^l with
/// n_w·l ≤ max_order.
pub fn power_orbit_multiplicity(classes: &[PrimeClassDatum], max_order: usize) -> BTreeMap<GClosedPair, usize> {
    let mut m = BTreeMap::new();
    for c in classes {
        for l in 1..=max_order / c.n_w {
            *m.entry(canonicalize(&iterate_pair(&c.canonical, l))).or_insert(0) += 1;
        }
    }
    m
}

/// Group elements mapping the last letter of a word to its first.
pub fn closing_elements(group: Group, word: &[u8]) -> Vec<GroupElement> {
    group
        .elements()
        .into_iter()
        .filter(|g| act_on_symbol(g, word[word.len() - 1]) == word[0])
        .collect()
}

/// Composition helper used in tests: g·h as group elements.
pub fn compose(g: &GroupElement, h: &GroupElement) -> GroupElement {
    mul(g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_bowen_series;
    use crate::symmetry::{cycle_notation, symbol_permutation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d3_scheme() -> IfsScheme {
        build_flow_adapted(3, 0.5930).unwrap()
    }

    fn perm_str(g: &GroupElement, n: usize) -> String {
        cycle_notation(&symbol_permutation(g, n).unwrap())
    }

    fn random_pair(s: &IfsScheme, rng: &mut ChaCha8Rng, n: usize) -> GClosedPair {
        let pairs = all_pairs(s, s.symmetry, n);
        pairs[rng.gen_range(0..pairs.len())].clone()
    }

    #[test]
    fn walk_examples() {
        let p = circle_walk(3, &ReducedWord::new(vec![1])).unwrap();
        assert_eq!(p.word, vec![1, 5]);
        assert_eq!(perm_str(&p.g, 6), "(1,6,2,4,3,5)");
        let p = circle_walk(3, &ReducedWord::new(vec![-1])).unwrap();
        assert_eq!(p.word, vec![1, 5]);
        assert_eq!(perm_str(&p.g, 6), "(1,5)(2,4)(3,6)");
        let p = circle_walk(3, &ReducedWord::new(vec![1, -1])).unwrap();
        assert_eq!(p.word, vec![1, 5, 3]);
        assert_eq!(perm_str(&p.g, 6), "(1,3)(4,6)");
        assert_eq!(
            circle_walk(3, &ReducedWord::new(vec![2])),
            Err(SymbolicError::InvalidSymbol(2))
        );
        assert_eq!(
            circle_walk(3, &ReducedWord::new(vec![0])),
            Err(SymbolicError::InvalidSymbol(0))
        );
    }

    #[test]
    fn alphabets() {
        assert_eq!(reduced_alphabet(3), vec![-1, 1]);
        assert_eq!(reduced_alphabet(4), vec![-1, 0, 1]);
        assert_eq!(reduced_alphabet(5), vec![-2, -1, 1, 2]);
        for nf in 3..=8 {
            assert_eq!(reduced_alphabet(nf).len(), nf as usize - 1);
        }
    }

    #[test]
    fn lyndon_counts() {
        // binary Lyndon words by length: 2, 1, 2, 3, 6, 9
        let w = lyndon_words(2, 6);
        let mut c = [0; 6];
        for x in &w {
            c[x.len() - 1] += 1;
        }
        assert_eq!(c, [2, 1, 2, 3, 6, 9]);
        let w3 = lyndon_words(3, 4);
        assert_eq!(w3.len(), 3 + 3 + 8 + 18);
    }

    #[test]
    fn act_and_shifts() {
        let s = d3_scheme();
        let p = circle_walk(3, &ReducedWord::new(vec![1])).unwrap();
        let g3 = Group::DihedralZ2 { n: 3 }.element(0, false, true);
        let q = act(&g3, &p);
        assert_eq!(q.word, vec![4, 2]);
        assert_eq!(q.g, conjugate(&g3, &p.g));

        let p = circle_walk(3, &ReducedWord::new(vec![1, -1])).unwrap();
        let l = shift_left(&p);
        assert_eq!(&l.word[..2], &[5, 3]);
        assert_eq!(l.word[2], act_on_symbol(&inverse(&p.g), 5));
        assert_eq!(l.g, p.g);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let p = random_pair(&s, &mut rng, n);
            assert_eq!(shift_right(&shift_left(&p)), p);
            assert_eq!(shift_left(&shift_right(&p)), p);
        }
    }

    #[test]
    fn iteration() {
        let p = circle_walk(3, &ReducedWord::new(vec![-1])).unwrap();
        assert_eq!(iterate_pair(&p, 1), p);
        let q = iterate_pair(&p, 2);
        assert_eq!(q.word, vec![5, 1, 5]);
        assert!(q.g.is_identity());
        let p = circle_walk(3, &ReducedWord::new(vec![1])).unwrap();
        let m = element_order(&p.g) as usize;
        assert!(iterate_pair(&p, 2 * m).g.is_identity());
        assert_eq!(iterate_pair(&p, m).word, vec![5, 3, 4, 2, 6, 1, 5]);
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        let s = d3_scheme();
        let grp = s.symmetry;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let p = random_pair(&s, &mut rng, n);
            let c = canonicalize(&p);
            assert_eq!(canonicalize(&shift_left(&p)), c);
            let h = grp.elements()[rng.gen_range(0..grp.order())];
            assert_eq!(canonicalize(&act(&h, &p)), c);
            assert_eq!(canonicalize(&c), c);
        }
    }

    #[test]
    fn bruteforce_counts() {
        let s = d3_scheme();
        let c = enumerate_prime_classes_bruteforce(&s, s.symmetry, 3, Execution::Sequential).unwrap();
        assert_eq!(counts_by_length(&c, 3), vec![2, 1, 2]);
        let t = enumerate_prime_classes_bruteforce(&s, Group::Trivial, 2, Execution::Sequential).unwrap();
        assert_eq!(counts_by_length(&t, 2), vec![0, 6]);
        assert!(t.iter().all(|d| d.canonical.word.first() == d.canonical.word.last()));
    }

    #[test]
    fn klein_count_is_196() {
        let s = build_bowen_series(7.0, 7.0, 7.01).unwrap();
        let c = enumerate_prime_classes_bruteforce(&s, Group::Klein, 6, Execution::Parallel).unwrap();
        assert_eq!(counts_by_length(&c, 6), vec![3, 3, 8, 18, 48, 116]);
        assert_eq!(c.len(), 196);
    }

    #[test]
    fn reduced_enumeration_examples() {
        let c = enumerate_prime_classes_reduced(3, 0.5930, 1).unwrap();
        let rw: Vec<String> = c.iter().map(|d| d.reduced_word.as_ref().unwrap().to_string()).collect();
        assert_eq!(c.len(), 2);
        assert!(rw.contains(&"(1)".to_string()) && rw.contains(&"(-1)".to_string()));
        let c2 = enumerate_prime_classes_reduced(3, 0.5930, 2).unwrap();
        assert_eq!(c2.len(), 3);
        assert!(c2
            .iter()
            .any(|d| d.reduced_word.as_ref().unwrap().symbols == vec![-1, 1]));
        let c6 = enumerate_prime_classes_reduced(3, 0.5930, 6).unwrap();
        assert_eq!(counts_by_length(&c6, 6), vec![2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn worked_class_data() {
        let c = enumerate_prime_classes_reduced(3, 0.5930, 2).unwrap();
        let get = |syms: &[i8]| {
            c.iter()
                .find(|d| d.reduced_word.as_ref().unwrap().symbols == syms)
                .unwrap()
        };
        let (a, b, ab) = (get(&[1]), get(&[-1]), get(&[-1, 1]));
        assert_eq!((a.n_w, a.m_w), (1, 6));
        assert_eq!((b.n_w, b.m_w), (1, 2));
        assert_eq!((ab.n_w, ab.m_w), (2, 2));
        assert!((a.length_per_period() - 3.530).abs() < 0.005);
        assert!((b.length_per_period() - 3.500).abs() < 0.005);
        assert!((ab.length_per_period() - 7.032).abs() < 0.005);
        assert_eq!(a.multiplier_sign, -1.0);
        assert_eq!(b.multiplier_sign, 1.0);
        assert_eq!(ab.multiplier_sign, -1.0);
    }

    #[test]
    fn enumerators_agree() {
        for (nf, psi, n) in [(3, 0.5930, 4), (4, 0.1010, 4), (4, 0.3, 6), (5, 0.4, 3), (6, 0.3, 4)] {
            let s = build_flow_adapted(nf, psi).unwrap();
            match cross_check(&s, n) {
                Ok(ok) => assert!(ok),
                Err(e) => panic!("nf={nf}: {e}"),
            }
        }
    }

    #[test]
    fn corrupted_walk_is_caught() {
        let s = d3_scheme();
        let bad = |nf: u8, rw: &ReducedWord| -> Result<GClosedPair, SymbolicError> {
            let flipped: Vec<i8> = rw.symbols.iter().map(|&k| if k == 1 { -1 } else { k }).collect();
            circle_walk(nf, &ReducedWord::new(flipped))
        };
        assert!(matches!(cross_check_with(&s, 3, &bad), Err(SymbolicError::Mismatch(_))));
    }

    #[test]
    fn counting_identity_for_odd_nf() {
        for (nf, max_n) in [(3u32, 6usize), (5, 4)] {
            let c = enumerate_prime_classes_reduced(nf, 0.3, max_n).unwrap();
            let p = counts_by_length(&c, max_n);
            for n in 1..=max_n {
                let s: usize = (1..=n).filter(|d| n % d == 0).map(|d| d * p[d - 1]).sum();
                assert_eq!(s, (nf as usize - 1).pow(n as u32), "nf={nf} n={n}");
            }
        }
    }

    #[test]
    fn free_action() {
        let s = d3_scheme();
        assert!(check_free_action(&s, s.symmetry, 6).free);
        let b = build_bowen_series(7.0, 7.0, 7.01).unwrap();
        assert!(check_free_action(&b, Group::Klein, 6).free);
        assert!(check_free_action(&s, Group::Trivial, 4).free);
        let s4 = build_flow_adapted(4, 0.1010).unwrap();
        let r = check_free_action(&s4, s4.symmetry, 2);
        assert!(!r.free);
        let (p, h) = r.witness.unwrap();
        assert_eq!(act(&h, &p), p);
    }

    #[test]
    fn orbit_sizes_under_free_action() {
        let s = d3_scheme();
        let c = enumerate_prime_classes_bruteforce(&s, s.symmetry, 4, Execution::Sequential).unwrap();
        for d in &c {
            assert_eq!(orbit(&d.canonical).len(), s.symmetry.order() * d.n_w);
        }
    }

    #[test]
    fn length_invariant_along_orbit() {
        let s = d3_scheme();
        let c = enumerate_prime_classes_reduced(3, 0.5930, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in &c {
            let members: Vec<GClosedPair> = orbit(&d.canonical).into_iter().collect();
            for _ in 0..10 {
                let q = &members[rng.gen_range(0..members.len())];
                let w = iterate_pair(q, element_order(&q.g) as usize);
                let l = closed_word_length(&s, &w.word).unwrap();
                assert!((l - d.length).abs() < 1e-10 * d.length);
            }
        }
    }

    #[test]
    fn power_law() {
        let s = d3_scheme();
        let c = enumerate_prime_classes_reduced(3, 0.5930, 3).unwrap();
        for d in &c {
            for k in 2..=3 {
                let q = iterate_pair(&d.canonical, k);
                let m = element_order(&q.g) as usize;
                let l = closed_word_length(&s, &iterate_pair(&q, m).word).unwrap();
                let per_q = l / m as f64;
                assert!((per_q - k as f64 * d.length_per_period()).abs() < 1e-10 * per_q);
            }
        }
    }

    #[test]
    fn geodesic_multisets_agree() {
        // each D3xZ2 class stands for |G|/m_w primitive closed words of length n_w m_w
        let s = d3_scheme();
        let triv = enumerate_prime_classes_bruteforce(&s, Group::Trivial, 8, Execution::Parallel).unwrap();
        let sym = enumerate_prime_classes_reduced(3, 0.5930, 8).unwrap();
        let mut a: Vec<f64> = triv.iter().map(|d| d.length).collect();
        let mut b = vec![];
        for d in sym.iter().filter(|d| d.n_w * d.m_w as usize <= 8) {
            for _ in 0..s.symmetry.order() / d.m_w as usize {
                b.push(d.length);
            }
        }
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9 * x);
        }
    }
}
