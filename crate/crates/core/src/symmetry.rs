//! Finite symmetry groups of the IFS schemes: D_n × Z2, Z2 × Z2, Z2 and the
//! trivial group, with exact arithmetic, closed-form characters and the
//! action on disk symbols.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use crate::error::GroupError;

/// A symmetry group together with the symbol set it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    /// D_n × Z2 acting on the 2n circles of a symmetric n-funnel surface.
    DihedralZ2 {
        n: u8,
    },
    /// {e, σ1, σ2, σ1σ2} acting on the 4 Bowen–Series disks.
    Klein,
    /// {e, σ1} acting on the 4 Bowen–Series disks.
    Z2,
    Trivial,
}

/// Group element. For `DihedralZ2` this is `g1^rot g2^refl g3^swap`; for the
/// Bowen–Series groups `refl` is σ1 and `swap` is σ2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub group: Group,
    pub rot: u8,
    pub refl: bool,
    pub swap: bool,
}

impl GroupElement {
    /// Integer code used for lexicographic ordering of closed pairs.
    pub fn encode(&self) -> u32 {
        (self.rot as u32) * 4 + (self.refl as u32) * 2 + self.swap as u32
    }

    pub fn is_identity(&self) -> bool {
        self.rot == 0 && !self.refl && !self.swap
    }
}

/// Traversal direction of a boundary circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Pos,
    Neg,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Pos => Orientation::Neg,
            Orientation::Neg => Orientation::Pos,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Orientation::Pos => 1,
            Orientation::Neg => -1,
        }
    }
}

impl Group {
    pub fn order(&self) -> usize {
        match self {
            Group::DihedralZ2 { n } => 4 * *n as usize,
            Group::Klein => 4,
            Group::Z2 => 2,
            Group::Trivial => 1,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: *self,
            rot: 0,
            refl: false,
            swap: false,
        }
    }

    /// Build an element, reducing `rot` modulo n.
    pub fn element(&self, rot: i64, refl: bool, swap: bool) -> GroupElement {
        match self {
            Group::DihedralZ2 { n } => GroupElement {
                group: *self,
                rot: rot.rem_euclid(*n as i64) as u8,
                refl,
                swap,
            },
            Group::Klein => GroupElement {
                group: *self,
                rot: 0,
                refl,
                swap,
            },
            Group::Z2 => GroupElement {
                group: *self,
                rot: 0,
                refl,
                swap: false,
            },
            Group::Trivial => self.identity(),
        }
    }

    /// All elements in increasing encoding order.
    pub fn elements(&self) -> Vec<GroupElement> {
        match self {
            Group::DihedralZ2 { n } => {
                let mut v = Vec::with_capacity(self.order());
                for rot in 0..*n {
                    for refl in [false, true] {
                        for swap in [false, true] {
                            v.push(GroupElement {
                                group: *self,
                                rot,
                                refl,
                                swap,
                            });
                        }
                    }
                }
                v
            }
            Group::Klein => [(false, false), (false, true), (true, false), (true, true)]
                .iter()
                .map(|&(r, s)| GroupElement {
                    group: *self,
                    rot: 0,
                    refl: r,
                    swap: s,
                })
                .collect(),
            Group::Z2 => vec![self.identity(), self.element(0, true, false)],
            Group::Trivial => vec![self.identity()],
        }
    }

    /// Number of symbols the group permutes, `None` for the trivial group.
    pub fn symbol_count(&self) -> Option<usize> {
        match self {
            Group::DihedralZ2 { n } => Some(2 * *n as usize),
            Group::Klein | Group::Z2 => Some(4),
            Group::Trivial => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Group::DihedralZ2 { n } => format!("D{n}xZ2"),
            Group::Klein => "Z2xZ2".into(),
            Group::Z2 => "Z2".into(),
            Group::Trivial => "trivial".into(),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
    if g.group != h.group {
        return Err(GroupError::GroupMismatch);
    }
    Ok(mul(g, h))
}

/// Product `gh`, meaning "apply h first". Panics on mixed groups.
pub fn mul(g: &GroupElement, h: &GroupElement) -> GroupElement {
    assert_eq!(g.group, h.group, "group mismatch");
    match g.group {
        Group::DihedralZ2 { .. } => {
            let k2 = if g.refl { -(h.rot as i64) } else { h.rot as i64 };
            g.group.element(g.rot as i64 + k2, g.refl ^ h.refl, g.swap ^ h.swap)
        }
        _ => g.group.element(0, g.refl ^ h.refl, g.swap ^ h.swap),
    }
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    match g.group {
        Group::DihedralZ2 { .. } if !g.refl => g.group.element(-(g.rot as i64), false, g.swap),
        // reflections and all Klein elements are involutions up to the swap bit
        _ => *g,
    }
}

pub fn power(g: &GroupElement, k: i64) -> GroupElement {
    let base = if k < 0 { inverse(g) } else { *g };
    let mut acc = g.group.identity();
    for _ in 0..k.unsigned_abs() {
        acc = mul(&acc, &base);
    }
    acc
}

/// Minimal m ≥ 1 with g^m = e.
pub fn element_order(g: &GroupElement) -> u32 {
    let mut acc = *g;
    let mut m = 1;
    while !acc.is_identity() {
        acc = mul(&acc, g);
        m += 1;
    }
    m
}

pub fn conjugate(h: &GroupElement, g: &GroupElement) -> GroupElement {
    mul(&mul(h, g), &inverse(h))
}

/// Image of a 1-based symbol.
pub fn act_on_symbol(g: &GroupElement, s: u8) -> u8 {
    match g.group {
        Group::DihedralZ2 { n } => {
            let n = n as i64;
            let s0 = s as i64 - 1;
            let (copy, p) = (s0 / n, s0 % n);
            let p = if g.refl { -p - 1 } else { p } + g.rot as i64;
            let copy = copy ^ g.swap as i64;
            (copy * n + p.rem_euclid(n) + 1) as u8
        }
        Group::Klein | Group::Z2 => {
            let s0 = s - 1;
            (s0 ^ (2 * g.refl as u8 + g.swap as u8)) + 1
        }
        Group::Trivial => s,
    }
}

/// Sign of the derivative of the geometric action on the real line.
pub fn orientation_sign(g: &GroupElement) -> f64 {
    let flips = match g.group {
        Group::DihedralZ2 { .. } => g.refl as u8,
        _ => g.refl as u8 + g.swap as u8,
    };
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Permutation of the symbols `1..=n_symbols` as an image table (index 0 is symbol 1).
pub fn symbol_permutation(g: &GroupElement, n_symbols: usize) -> Result<Vec<u8>, GroupError> {
    if let Some(k) = g.group.symbol_count() {
        if k != n_symbols {
            return Err(GroupError::ContextMismatch);
        }
    }
    Ok((1..=n_symbols as u8).map(|s| act_on_symbol(g, s)).collect())
}

/// Cycle notation, 1-based, fixed points omitted; `()` for the identity.
pub fn cycle_notation(perm: &[u8]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] as usize == start + 1 {
            continue;
        }
        let mut cyc = vec![];
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push((i + 1).to_string());
            i = perm[i] as usize - 1;
        }
        out.push('(');
        out.push_str(&cyc.join(","));
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

/// Parse cycle notation such as `(1,2)(3,4)` into an image table.
pub fn parse_cycles(s: &str, n_symbols: usize) -> Result<Vec<u8>, GroupError> {
    let err = || GroupError::Parse(s.to_string());
    let mut perm: Vec<u8> = (1..=n_symbols as u8).collect();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let close = rest.find(')').ok_or_else(err)?;
        if !rest.starts_with('(') {
            return Err(err());
        }
        let body = &rest[1..close];
        if !body.trim().is_empty() {
            let pts: Vec<u8> = body
                .split(',')
                .map(|t| t.trim().parse::<u8>().map_err(|_| err()))
                .collect::<Result<_, _>>()?;
            for (i, &a) in pts.iter().enumerate() {
                if a == 0 || a as usize > n_symbols {
                    return Err(err());
                }
                perm[a as usize - 1] = pts[(i + 1) % pts.len()];
            }
        }
        rest = rest[close + 1..].trim_start();
    }
    Ok(perm)
}

/// Element whose symbol action equals `perm`.
pub fn element_from_permutation(group: Group, perm: &[u8]) -> Option<GroupElement> {
    group
        .elements()
        .into_iter()
        .find(|g| symbol_permutation(g, perm.len()).map(|p| p == perm).unwrap_or(false))
}

/// The unique element of D_n × Z2 carrying the oriented circle `end` to
/// `start`. Reflections reverse orientation; rotations and the copy swap keep it.
pub fn closing_element(n_f: u8, start: (u8, Orientation), end: (u8, Orientation)) -> GroupElement {
    let group = Group::DihedralZ2 { n: n_f };
    let n = n_f as i64;
    let (s0, e0) = (start.0 as i64 - 1, end.0 as i64 - 1);
    let (cs, ps) = (s0 / n, s0 % n);
    let (ce, pe) = (e0 / n, e0 % n);
    let refl = start.1 != end.1;
    let moved = if refl { -pe - 1 } else { pe };
    group.element(ps - moved, refl, cs != ce)
}

/// Transport of an oriented circle by a dihedral element.
pub fn act_on_oriented(g: &GroupElement, c: (u8, Orientation)) -> (u8, Orientation) {
    let o = if g.refl { c.1.flip() } else { c.1 };
    (act_on_symbol(g, c.0), o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DihedralBase {
    /// trivial on D_n
    A1,
    /// −1 on reflections
    A2,
    /// −1 on odd rotations, reflections through a symbol fixed (n even)
    B1,
    /// −1 on odd rotations, the other reflection class fixed (n even)
    B2,
    /// two-dimensional, 2cos(2πk r/n) on rotations
    E(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrrepKind {
    Dihedral {
        base: DihedralBase,
        swap_sign: i8,
    },
    /// signs on σ1 and σ2
    Klein {
        s1: i8,
        s2: i8,
    },
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Irrep {
    pub label: String,
    pub dim: u32,
    pub kind: IrrepKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjClass {
    pub representative: GroupElement,
    pub members: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub group: Group,
    pub irreps: Vec<Irrep>,
    pub classes: Vec<ConjClass>,
}

fn sign(b: bool) -> f64 {
    if b {
        -1.0
    } else {
        1.0
    }
}

/// Character value of an irrep at an element, from closed-form formulas.
pub fn character(irrep: &Irrep, g: &GroupElement) -> f64 {
    match (irrep.kind, g.group) {
        (IrrepKind::Dihedral { base, swap_sign }, Group::DihedralZ2 { n }) => {
            let r = g.rot as i64;
            let odd = r % 2 == 1;
            let d = match base {
                DihedralBase::A1 => 1.0,
                DihedralBase::A2 => sign(g.refl),
                // for a reflection p ↦ −p−1+r the parity of r picks the class
                DihedralBase::B1 => {
                    if g.refl {
                        sign(!odd)
                    } else {
                        sign(odd)
                    }
                }
                DihedralBase::B2 => sign(odd),
                DihedralBase::E(k) => {
                    if g.refl {
                        0.0
                    } else {
                        // reduce so that r and −r give bit-identical values
                        let n = n as i64;
                        let kr = (k as i64 * r).rem_euclid(n);
                        let kr = kr.min(n - kr);
                        let v = 2.0 * (2.0 * PI * kr as f64 / n as f64).cos();
                        // exact integers where the value is one (n = 3, 4, 6)
                        if (v - v.round()).abs() < 1e-12 {
                            v.round()
                        } else {
                            v
                        }
                    }
                }
            };
            if g.swap {
                d * swap_sign as f64
            } else {
                d
            }
        }
        (IrrepKind::Klein { s1, s2 }, Group::Klein | Group::Z2) => {
            let mut v = 1.0;
            if g.refl {
                v *= s1 as f64;
            }
            if g.swap {
                v *= s2 as f64;
            }
            v
        }
        (IrrepKind::Trivial, _) => 1.0,
        _ => panic!("irrep {} does not belong to {}", irrep.label, g.group),
    }
}

impl CharacterTable {
    pub fn new(group: Group) -> Self {
        let irreps = match group {
            Group::DihedralZ2 { n } => dihedral_irreps(n),
            Group::Klein => ["A", "B", "C", "D"]
                .iter()
                .zip([(1, 1), (-1, 1), (1, -1), (-1, -1)])
                .map(|(l, (s1, s2))| Irrep {
                    label: l.to_string(),
                    dim: 1,
                    kind: IrrepKind::Klein { s1, s2 },
                })
                .collect(),
            Group::Z2 => [("A", 1), ("B", -1)]
                .iter()
                .map(|&(l, s1)| Irrep {
                    label: l.to_string(),
                    dim: 1,
                    kind: IrrepKind::Klein { s1, s2: 1 },
                })
                .collect(),
            Group::Trivial => {
                vec![Irrep {
                    label: "1".into(),
                    dim: 1,
                    kind: IrrepKind::Trivial,
                }]
            }
        };
        Self {
            group,
            irreps,
            classes: conjugacy_classes(group),
        }
    }

    pub fn irrep(&self, label: &str) -> Result<&Irrep, GroupError> {
        self.irreps
            .iter()
            .find(|i| i.label == label)
            .ok_or_else(|| GroupError::UnknownIrrep(label.to_string()))
    }

    /// The trivial representation (always the first row).
    pub fn trivial_irrep(&self) -> &Irrep {
        &self.irreps[0]
    }

    pub fn value(&self, label: &str, g: &GroupElement) -> Result<f64, GroupError> {
        if g.group != self.group {
            return Err(GroupError::GroupMismatch);
        }
        Ok(character(self.irrep(label)?, g))
    }

    /// Rows of character values, one column per conjugacy class.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.irreps
            .iter()
            .map(|ir| self.classes.iter().map(|c| character(ir, &c.representative)).collect())
            .collect()
    }

    pub fn class_index(&self, g: &GroupElement) -> usize {
        self.classes
            .iter()
            .position(|c| c.members.contains(g))
            .expect("element belongs to some class")
    }
}

fn dihedral_irreps(n: u8) -> Vec<Irrep> {
    use DihedralBase::*;
    let one = |label: &str, base, swap_sign| Irrep {
        label: label.to_string(),
        dim: 1,
        kind: IrrepKind::Dihedral { base, swap_sign },
    };
    let two = |label: String, k, swap_sign| Irrep {
        label,
        dim: 2,
        kind: IrrepKind::Dihedral { base: E(k), swap_sign },
    };
    match n {
        3 => vec![
            one("I_1", A1, 1),
            one("I_2", A1, -1),
            one("II_1", A2, 1),
            one("II_2", A2, -1),
            two("III_1".into(), 1, -1),
            two("III_2".into(), 1, 1),
        ],
        4 => vec![
            one("I_1", A1, 1),
            one("I_2", A1, -1),
            one("II_1", B1, 1),
            one("II_2", B1, -1),
            one("III_1", A2, -1),
            one("III_2", A2, 1),
            one("IV_1", B2, -1),
            one("IV_2", B2, 1),
            two("V_1".into(), 1, 1),
            two("V_2".into(), 1, -1),
        ],
        _ => {
            let mut v = vec![];
            let mut bases = vec![("A1", A1), ("A2", A2)];
            if n.is_multiple_of(2) {
                bases.push(("B1", B1));
                bases.push(("B2", B2));
            }
            for (name, b) in bases {
                v.push(one(&format!("{name}+"), b, 1));
                v.push(one(&format!("{name}-"), b, -1));
            }
            for k in 1..=((n - 1) / 2) {
                v.push(two(format!("E{k}+"), k, 1));
                v.push(two(format!("E{k}-"), k, -1));
            }
            // the trivial representation must come first
            v[0].label = "I_1".into();
            v
        }
    }
}

/// Conjugacy classes, ordered by their minimal element.
pub fn conjugacy_classes(group: Group) -> Vec<ConjClass> {
    let elems = group.elements();
    let mut done = BTreeSet::new();
    let mut out = vec![];
    for g in &elems {
        if done.contains(g) {
            continue;
        }
        let members: BTreeSet<GroupElement> = elems.iter().map(|h| conjugate(h, g)).collect();
        done.extend(members.iter().copied());
        out.push(ConjClass {
            representative: *g,
            members: members.into_iter().collect(),
        });
    }
    out
}

/// Σ_g χ1(g) χ2(g) / |G| for every pair of irreps.
pub fn orthogonality_matrix(table: &CharacterTable) -> Vec<Vec<f64>> {
    let elems = table.group.elements();
    let k = table.irreps.len();
    let mut m = vec![vec![0.0; k]; k];
    for (i, a) in table.irreps.iter().enumerate() {
        for (j, b) in table.irreps.iter().enumerate() {
            let s: f64 = elems.iter().map(|g| character(a, g) * character(b, g)).sum();
            m[i][j] = s / elems.len() as f64;
        }
    }
    m
}
