//! Types and expressions with holes.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

/// A type that may contain type holes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HTyp {
    Num,
    Arrow(Box<HTyp>, Box<HTyp>),
    Hole,
}

impl HTyp {
    pub fn arrow(dom: HTyp, cod: HTyp) -> HTyp {
        HTyp::Arrow(Box::new(dom), Box::new(cod))
    }

    /// True if the type contains no type holes.
    pub fn is_complete(&self) -> bool {
        match self {
            HTyp::Num => true,
            HTyp::Hole => false,
            HTyp::Arrow(a, b) => a.is_complete() && b.is_complete(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            HTyp::Num | HTyp::Hole => 0,
            HTyp::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn children(&self) -> Vec<&HTyp> {
        match self {
            HTyp::Arrow(a, b) => vec![a, b],
            _ => vec![],
        }
    }
}

/// Name of an expression hole. Allocated by [`HoleGen`] and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoleName(pub u64);

impl fmt::Display for HoleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Monotone hole-name allocator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HoleGen {
    next: u64,
}

impl HoleGen {
    pub fn new() -> HoleGen {
        HoleGen { next: 0 }
    }

    pub fn starting_at(next: u64) -> HoleGen {
        HoleGen { next }
    }

    /// An allocator that will never hand out a name already used in `e`.
    pub fn above(e: &HExp) -> HoleGen {
        let next = e.hole_names().into_iter().map(|u| u.0 + 1).max().unwrap_or(0);
        HoleGen { next }
    }

    pub fn peek(&self) -> u64 {
        self.next
    }

    /// Raise the counter so it is at least `floor`.
    pub fn bump_to(&mut self, floor: u64) {
        self.next = self.next.max(floor);
    }

    pub fn fresh(&mut self) -> HoleName {
        let u = HoleName(self.next);
        self.next += 1;
        u
    }
}

/// An expression that may contain empty holes and non-empty holes.
///
/// A non-empty hole marks a subterm whose type is inconsistent with its
/// position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HExp {
    Var(String),
    Lam(String, Box<HExp>),
    Ap(Box<HExp>, Box<HExp>),
    Num(BigInt),
    Plus(Box<HExp>, Box<HExp>),
    Asc(Box<HExp>, HTyp),
    EHole(HoleName),
    NEHole(HoleName, Box<HExp>),
}

impl HExp {
    pub fn var(x: &str) -> HExp {
        HExp::Var(x.to_string())
    }

    pub fn lam(x: &str, body: HExp) -> HExp {
        HExp::Lam(x.to_string(), Box::new(body))
    }

    pub fn ap(f: HExp, a: HExp) -> HExp {
        HExp::Ap(Box::new(f), Box::new(a))
    }

    pub fn num(n: i64) -> HExp {
        HExp::Num(BigInt::from(n))
    }

    pub fn plus(l: HExp, r: HExp) -> HExp {
        HExp::Plus(Box::new(l), Box::new(r))
    }

    pub fn asc(e: HExp, t: HTyp) -> HExp {
        HExp::Asc(Box::new(e), t)
    }

    pub fn hole(u: u64) -> HExp {
        HExp::EHole(HoleName(u))
    }

    pub fn nehole(u: u64, e: HExp) -> HExp {
        HExp::NEHole(HoleName(u), Box::new(e))
    }

    /// Expression children in path order. Ascription annotations are not
    /// expression children.
    pub fn children(&self) -> Vec<&HExp> {
        match self {
            HExp::Var(_) | HExp::Num(_) | HExp::EHole(_) => vec![],
            HExp::Lam(_, b) => vec![b],
            HExp::Ap(f, a) => vec![f, a],
            HExp::Plus(l, r) => vec![l, r],
            HExp::Asc(e, _) => vec![e],
            HExp::NEHole(_, e) => vec![e],
        }
    }

    /// Short constructor tag used in diagnostics and suggestion contexts.
    pub fn tag(&self) -> &'static str {
        match self {
            HExp::Var(_) => "var",
            HExp::Lam(..) => "lam",
            HExp::Ap(..) => "ap",
            HExp::Num(_) => "num",
            HExp::Plus(..) => "plus",
            HExp::Asc(..) => "asc",
            HExp::EHole(_) => "hole",
            HExp::NEHole(..) => "nehole",
        }
    }

    pub fn depth(&self) -> usize {
        let sub = self.children().into_iter().map(HExp::depth).max();
        match (self, sub) {
            (HExp::Asc(_, t), Some(d)) => 1 + d.max(t.depth()),
            (_, Some(d)) => 1 + d,
            (_, None) => 0,
        }
    }

    /// Number of expression and type nodes.
    pub fn size(&self) -> usize {
        fn typ_size(t: &HTyp) -> usize {
            1 + t.children().into_iter().map(typ_size).sum::<usize>()
        }
        let own = match self {
            HExp::Asc(_, t) => typ_size(t),
            _ => 0,
        };
        1 + own + self.children().into_iter().map(HExp::size).sum::<usize>()
    }

    /// Hole names in pre-order, duplicates included.
    pub fn hole_names(&self) -> Vec<HoleName> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<HoleName>) {
        match self {
            HExp::EHole(u) => out.push(*u),
            HExp::NEHole(u, e) => {
                out.push(*u);
                e.collect_holes(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_holes(out);
                }
            }
        }
    }

    /// First hole name that occurs more than once, if any.
    pub fn duplicate_hole(&self) -> Option<HoleName> {
        let mut seen = BTreeSet::new();
        self.hole_names().into_iter().find(|u| !seen.insert(*u))
    }

    pub fn is_complete(&self) -> bool {
        match self {
            HExp::EHole(_) | HExp::NEHole(..) => false,
            HExp::Asc(e, t) => t.is_complete() && e.is_complete(),
            _ => self.children().into_iter().all(HExp::is_complete),
        }
    }

    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(e: &HExp, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match e {
                HExp::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                HExp::Lam(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in e.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Replace the empty hole `u` by `filler`. Capture is intended: the filler
    /// sees the hole's binders. Returns `None` if `u` is not an empty hole here.
    pub fn fill_hole(&self, u: HoleName, filler: &HExp) -> Option<HExp> {
        let mut found = false;
        let out = self.fill_inner(u, filler, &mut found);
        found.then_some(out)
    }

    pub(crate) fn fill_inner(&self, u: HoleName, filler: &HExp, found: &mut bool) -> HExp {
        match self {
            HExp::EHole(v) if *v == u => {
                *found = true;
                filler.clone()
            }
            HExp::Var(_) | HExp::Num(_) | HExp::EHole(_) => self.clone(),
            HExp::Lam(x, b) => HExp::Lam(x.clone(), Box::new(b.fill_inner(u, filler, found))),
            HExp::Ap(f, a) => HExp::ap(f.fill_inner(u, filler, found), a.fill_inner(u, filler, found)),
            HExp::Plus(l, r) => HExp::plus(l.fill_inner(u, filler, found), r.fill_inner(u, filler, found)),
            HExp::Asc(e, t) => HExp::asc(e.fill_inner(u, filler, found), t.clone()),
            HExp::NEHole(v, e) => HExp::NEHole(*v, Box::new(e.fill_inner(u, filler, found))),
        }
    }

    /// Rename holes to 0, 1, 2, ... in pre-order. Two programs are equal up
    /// to hole naming iff their canonical forms are equal.
    pub fn canonical_holes(&self) -> HExp {
        fn go(e: &HExp, next: &mut u64) -> HExp {
            let mut fresh = || {
                let u = HoleName(*next);
                *next += 1;
                u
            };
            match e {
                HExp::EHole(_) => HExp::EHole(fresh()),
                HExp::NEHole(_, s) => {
                    let u = fresh();
                    HExp::NEHole(u, Box::new(go(s, next)))
                }
                HExp::Var(_) | HExp::Num(_) => e.clone(),
                HExp::Lam(x, b) => HExp::Lam(x.clone(), Box::new(go(b, next))),
                HExp::Ap(f, a) => {
                    let f = go(f, next);
                    HExp::ap(f, go(a, next))
                }
                HExp::Plus(l, r) => {
                    let l = go(l, next);
                    HExp::plus(l, go(r, next))
                }
                HExp::Asc(s, t) => HExp::asc(go(s, next), t.clone()),
            }
        }
        go(self, &mut 0)
    }
}

/// Identifiers match `[a-zA-Z_][a-zA-Z0-9_]*`.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ident_lexical_rules() {
        assert!(is_ident("x"));
        assert!(is_ident("_tmp9"));
        assert!(!is_ident("9x"));
        assert!(!is_ident(""));
        assert!(!is_ident("a-b"));
    }

    #[test]
    fn fill_replaces_only_named_hole() {
        let e = HExp::plus(HExp::hole(1), HExp::hole(2));
        let filled = e.fill_hole(HoleName(1), &HExp::num(3)).unwrap();
        assert_eq!(filled, HExp::plus(HExp::num(3), HExp::hole(2)));
        assert!(e.fill_hole(HoleName(9), &HExp::num(3)).is_none());
        // non-empty holes are not filled
        let ne = HExp::nehole(4, HExp::num(1));
        assert!(ne.fill_hole(HoleName(4), &HExp::num(3)).is_none());
    }

    #[test]
    fn free_vars_respect_binders() {
        let e = HExp::lam("x", HExp::plus(HExp::var("x"), HExp::var("y")));
        assert_eq!(e.free_vars().into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
    }

    #[test]
    fn hole_gen_is_monotone() {
        let mut g = HoleGen::above(&HExp::plus(HExp::hole(3), HExp::nehole(7, HExp::num(1))));
        assert_eq!(g.fresh(), HoleName(8));
        assert_eq!(g.fresh(), HoleName(9));
        g.bump_to(4);
        assert_eq!(g.fresh(), HoleName(10));
    }

    #[test]
    fn canonical_holes_is_preorder() {
        let e = HExp::ap(HExp::nehole(9, HExp::hole(4)), HExp::hole(2));
        assert_eq!(e.canonical_holes(), HExp::ap(HExp::nehole(0, HExp::hole(1)), HExp::hole(2)));
        assert_eq!(e.duplicate_hole(), None);
        assert_eq!(HExp::plus(HExp::hole(1), HExp::hole(1)).duplicate_hole(), Some(HoleName(1)));
    }
}
