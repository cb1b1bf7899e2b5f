//! Seeded generators of well-typed terms and edit states, plus exhaustive
//! enumeration of small terms. Used by the property suites and the
//! acceptance harness.

use std::collections::HashMap;
use std::rc::Rc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::statics::{consistent, matched_arrow, synthesize, TypeCtx};
use crate::syntax::{HExp, HTyp, HoleGen};
use crate::zipper::{positions, ZExp};

/// Binder names drawn by the generators.
pub const NAMES: [&str; 3] = ["x", "y", "f"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_typ<R: Rng>(rng: &mut R, depth: usize) -> HTyp {
    let leaf = |rng: &mut R| if rng.random_bool(0.5) { HTyp::Num } else { HTyp::Hole };
    if depth == 0 || rng.random_bool(0.5) {
        return leaf(rng);
    }
    HTyp::arrow(random_typ(rng, depth - 1), random_typ(rng, depth - 1))
}

/// Type-directed term generator. Hole names come from `holes`.
pub struct TermGen<'r, R> {
    pub rng: &'r mut R,
    pub holes: HoleGen,
}

impl<'r, R: Rng> TermGen<'r, R> {
    pub fn new(rng: &'r mut R) -> Self {
        TermGen { rng, holes: HoleGen::new() }
    }

    fn leaf(&mut self, ctx: &TypeCtx) -> (HExp, HTyp) {
        let vars: Vec<_> = ctx.iter().collect();
        match self.rng.random_range(0..3) {
            0 if !vars.is_empty() => {
                let (x, t) = vars.choose(self.rng).expect("nonempty");
                (HExp::var(x), (*t).clone())
            }
            1 => (HExp::EHole(self.holes.fresh()), HTyp::Hole),
            _ => (HExp::num(self.rng.random_range(0..10)), HTyp::Num),
        }
    }

    /// A term that synthesizes under `ctx`, of depth at most `depth`.
    pub fn syn(&mut self, ctx: &TypeCtx, depth: usize) -> (HExp, HTyp) {
        if depth == 0 || self.rng.random_bool(0.2) {
            return self.leaf(ctx);
        }
        let d = depth - 1;
        match self.rng.random_range(0..4) {
            0 => (HExp::plus(self.ana(ctx, &HTyp::Num, d), self.ana(ctx, &HTyp::Num, d)), HTyp::Num),
            1 => {
                for _ in 0..3 {
                    let (f, tf) = self.syn(ctx, d);
                    if let Some((dom, cod)) = matched_arrow(&tf) {
                        return (HExp::ap(f, self.ana(ctx, &dom, d)), cod);
                    }
                }
                self.leaf(ctx)
            }
            2 => {
                let t = random_typ(self.rng, d.min(2));
                (HExp::asc(self.ana(ctx, &t, d), t.clone()), t)
            }
            _ => {
                let u = self.holes.fresh();
                (HExp::NEHole(u, Box::new(self.syn(ctx, d).0)), HTyp::Hole)
            }
        }
    }

    /// A term that analyzes against `t` under `ctx`, of depth at most `depth`.
    pub fn ana(&mut self, ctx: &TypeCtx, t: &HTyp, depth: usize) -> HExp {
        if depth > 0 && self.rng.random_bool(0.5) {
            if let Some((dom, cod)) = matched_arrow(t) {
                let x = *NAMES.choose(self.rng).expect("nonempty");
                return HExp::lam(x, self.ana(&ctx.extend(x, dom), &cod, depth - 1));
            }
        }
        if self.rng.random_bool(0.1) {
            return HExp::EHole(self.holes.fresh());
        }
        let (e, found) = self.syn(ctx, depth);
        if consistent(t, &found) {
            e
        } else if depth > 0 {
            let u = self.holes.fresh();
            HExp::NEHole(u, Box::new(self.syn(ctx, depth - 1).0))
        } else {
            HExp::EHole(self.holes.fresh())
        }
    }
}

/// A closed term that synthesizes in the empty context.
pub fn random_term<R: Rng>(rng: &mut R, depth: usize) -> HExp {
    let e = TermGen::new(rng).syn(&TypeCtx::new(), depth).0;
    debug_assert!(synthesize(&TypeCtx::new(), &e).is_ok());
    e
}

/// A random statically meaningful edit state with the cursor anywhere.
pub fn random_state<R: Rng>(rng: &mut R, depth: usize) -> ZExp {
    let e = random_term(rng, depth);
    let at = positions(&e).choose(rng).expect("root is a position").clone();
    ZExp::new(e, at).expect("positions are valid")
}

/// Exhaustive enumeration of well-scoped terms by size.
///
/// The alphabet is the variables `x` and `y`, the literal 1, every
/// ascription type up to size 3, and holes. Hole names are assigned in
/// pre-order afterwards.
pub struct Enumerator {
    memo: HashMap<(usize, u8), Rc<Vec<HExp>>>,
    types: Vec<HTyp>,
}

const VARS: [&str; 2] = ["x", "y"];

fn typ_size(t: &HTyp) -> usize {
    1 + t.children().into_iter().map(typ_size).sum::<usize>()
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator::new()
    }
}

impl Enumerator {
    pub fn new() -> Enumerator {
        let small = [HTyp::Num, HTyp::Hole];
        let mut types = small.to_vec();
        for a in &small {
            for b in &small {
                types.push(HTyp::arrow(a.clone(), b.clone()));
            }
        }
        Enumerator { memo: HashMap::new(), types }
    }

    fn list(&mut self, n: usize, scope: u8) -> Rc<Vec<HExp>> {
        if let Some(v) = self.memo.get(&(n, scope)) {
            return v.clone();
        }
        let mut out = Vec::new();
        self.each(n, scope, &mut |e| out.push(e));
        let v = Rc::new(out);
        self.memo.insert((n, scope), v.clone());
        v
    }

    fn each(&mut self, n: usize, scope: u8, f: &mut dyn FnMut(HExp)) {
        if n == 0 {
            return;
        }
        if n == 1 {
            for (i, x) in VARS.iter().enumerate() {
                if scope & (1 << i) != 0 {
                    f(HExp::var(x));
                }
            }
            f(HExp::num(1));
            f(HExp::hole(0));
            return;
        }
        for (i, x) in VARS.iter().enumerate() {
            for b in self.list(n - 1, scope | (1 << i)).iter() {
                f(HExp::lam(x, b.clone()));
            }
        }
        for s in self.list(n - 1, scope).iter() {
            f(HExp::nehole(0, s.clone()));
        }
        for t in self.types.clone() {
            let ts = typ_size(&t);
            if ts < n {
                for s in self.list(n - 1 - ts, scope).iter() {
                    f(HExp::asc(s.clone(), t.clone()));
                }
            }
        }
        for i in 1..n - 1 {
            let left = self.list(i, scope);
            let right = self.list(n - 1 - i, scope);
            for l in left.iter() {
                for r in right.iter() {
                    f(HExp::ap(l.clone(), r.clone()));
                    f(HExp::plus(l.clone(), r.clone()));
                }
            }
        }
    }

    /// Calls `f` on every closed term of size at most `max_size` that
    /// synthesizes in the empty context.
    pub fn well_typed(&mut self, max_size: usize, f: &mut dyn FnMut(&HExp)) {
        let ctx = TypeCtx::new();
        for n in 1..=max_size {
            self.each(n, 0, &mut |e| {
                if synthesize(&ctx, &e).is_ok() {
                    f(&e.canonical_holes());
                }
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_terms_are_well_typed_and_bounded() {
        let mut r = rng(7);
        for depth in 0..7 {
            for _ in 0..200 {
                let e = random_term(&mut r, depth);
                assert!(synthesize(&TypeCtx::new(), &e).is_ok(), "{e}");
                assert!(e.depth() <= depth, "{e} exceeds {depth}");
                assert!(e.duplicate_hole().is_none());
            }
        }
    }

    #[test]
    fn enumeration_counts_by_size() {
        let mut en = Enumerator::new();
        let mut sizes = Vec::new();
        en.well_typed(3, &mut |e| sizes.push(e.size()));
        // size 1: the literal and the hole
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 2);
        // size 2: marks of those two
        assert_eq!(sizes.iter().filter(|&&s| s == 2).count(), 2);
        assert!(sizes.iter().all(|&s| s <= 3));
    }

    #[test]
    fn enumerated_sizes_are_exact() {
        let mut en = Enumerator::new();
        for n in 1..=5 {
            for e in en.list(n, 0).iter() {
                assert_eq!(e.size(), n, "{e}");
            }
        }
    }
}
