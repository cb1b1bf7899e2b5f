//! Oracles and generators shared by the integration suites. Everything here
//! is written against the definitions, not against the library's own
//! helpers, so agreement is evidence rather than tautology.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hazel_core::action::{Direction, Shape};
use hazel_core::dynamics::{eval_in, Env, EvalResult};
use hazel_core::gen::TermGen;
use hazel_core::notebook::{CellId, Notebook};
use hazel_core::statics::{position_at, Position};
use hazel_core::{cursor_info, holes_of, synthesize, Action, HExp, HTyp, HoleKind, HoleName, StaticError, TypeCtx, ZExp};
use rand::seq::IndexedRandom;
use rand::Rng;

/// The most precise type below both arguments, if any. Two types are
/// consistent exactly when they have one.
pub fn meet(a: &HTyp, b: &HTyp) -> Option<HTyp> {
    match (a, b) {
        (HTyp::Hole, t) | (t, HTyp::Hole) => Some(t.clone()),
        (HTyp::Num, HTyp::Num) => Some(HTyp::Num),
        (HTyp::Arrow(a1, a2), HTyp::Arrow(b1, b2)) => Some(HTyp::arrow(meet(a1, b1)?, meet(a2, b2)?)),
        _ => None,
    }
}

/// All types of depth at most `d`, without duplicates.
pub fn types_upto(d: usize) -> Vec<HTyp> {
    let mut out = vec![HTyp::Num, HTyp::Hole];
    for _ in 0..d {
        let prev = out.clone();
        for a in &prev {
            for b in &prev {
                let t = HTyp::arrow(a.clone(), b.clone());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Final results as the evaluation rules describe them: values, and
/// indeterminate forms built from holes and blocked eliminations.
pub fn is_value(r: &EvalResult) -> bool {
    matches!(r, EvalResult::VNum(_) | EvalResult::VClosure(..))
}

pub fn is_indeterminate(r: &EvalResult) -> bool {
    let final_env = |env: &Env| env.iter().all(|(_, v)| is_final(v));
    match r {
        EvalResult::IHole(_, env) => final_env(env),
        EvalResult::INEHole(_, inner, env) => is_final(inner) && final_env(env),
        EvalResult::IAp(f, a) => {
            let head_blocked = is_indeterminate(f) || matches!(**f, EvalResult::VNum(_));
            head_blocked && is_final(f) && is_final(a)
        }
        EvalResult::IPlus(l, r) => {
            let blocked = !(matches!(**l, EvalResult::VNum(_)) && matches!(**r, EvalResult::VNum(_)));
            blocked && is_final(l) && is_final(r)
        }
        _ => false,
    }
}

pub fn is_final(r: &EvalResult) -> bool {
    match r {
        EvalResult::VNum(_) => true,
        EvalResult::VClosure(_, _, env) => env.iter().all(|(_, v)| is_final(v)),
        _ => is_indeterminate(r),
    }
}

/// A wide action alphabet: every shape, bound and unbound variable names,
/// several binders and literals, out-of-range children.
pub fn wide_alphabet<R: Rng>(rng: &mut R, ctx: &TypeCtx, z: &ZExp) -> Vec<Action> {
    let mut names: BTreeSet<String> = ["x", "y", "f", "zz"].iter().map(|s| s.to_string()).collect();
    if let Ok(info) = cursor_info(ctx, z) {
        names.extend(info.ctx.iter().map(|(x, _)| x.clone()));
    }
    let mut out = vec![
        Action::Move(Direction::Child(0)),
        Action::Move(Direction::Child(1)),
        Action::Move(Direction::Child(2)),
        Action::Move(Direction::Parent),
        Action::Move(Direction::NextHole),
        Action::Move(Direction::PrevHole),
        Action::construct(Shape::Asc),
        Action::construct(Shape::Ap),
        Action::construct(Shape::Plus),
        Action::construct(Shape::NEHole),
        Action::construct(Shape::Arrow),
        Action::construct(Shape::Num),
        Action::num(0),
        Action::num(rng.random_range(-50..50)),
        Action::Del,
        Action::Finish,
    ];
    for x in &names {
        out.push(Action::var(x));
        out.push(Action::lam(x));
    }
    out
}

/// A random filler for one empty hole of `e` that `fill` should accept, with
/// hole names from `floor` up. Retries a few times since fillers in synthetic
/// positions may break the surrounding application.
pub fn random_fill<R: Rng>(rng: &mut R, ctx: &TypeCtx, e: &HExp, floor: u64, depth: usize) -> Option<(HoleName, HExp)> {
    let empties: Vec<_> = holes_of(e).into_iter().filter(|h| h.kind == HoleKind::Empty).collect();
    let hole = empties.choose(rng)?.clone();
    let (hctx, pos) = position_at(ctx, e, &hole.path).ok()?;
    let goal = match pos? {
        Position::Syn => HTyp::Hole,
        Position::Ana(t) => t,
    };
    for _ in 0..8 {
        let mut g = TermGen::new(&mut *rng);
        g.holes = hazel_core::HoleGen::starting_at(floor);
        let filler = g.ana(&hctx, &goal, depth);
        if hazel_core::fill(ctx, e, hole.name, &filler).is_ok() {
            return Some((hole.name, filler));
        }
    }
    None
}

/// Type and result of every cell, recomputed from nothing, cell by cell.
pub fn recompute_oracle(nb: &Notebook) -> Vec<(Result<HTyp, StaticError>, Option<EvalResult>)> {
    let mut done: Vec<(String, Result<HTyp, StaticError>, Option<EvalResult>)> = Vec::new();
    for c in nb.cells() {
        let mut ctx = TypeCtx::new();
        let mut env = Env::new();
        let fv = c.expr().free_vars();
        for (name, t, r) in &done {
            if let Ok(t) = t {
                ctx.insert(name.clone(), t.clone());
                if fv.contains(name) {
                    env.insert(name.clone(), r.clone().expect("typed cells have results"));
                }
            }
        }
        let t = synthesize(&ctx, c.expr());
        let r = t.as_ref().ok().map(|_| eval_in(&env, c.expr()));
        done.push((c.name.clone(), t, r));
    }
    done.into_iter().map(|(_, t, r)| (t, r)).collect()
}

/// Cells that must be recomputed after cell `i` changes: the least set
/// containing `i` and closed under "mentions a name of a member".
pub fn closure_oracle(nb: &Notebook, i: usize) -> Vec<CellId> {
    let cells = nb.cells();
    let mut set = BTreeSet::from([i]);
    loop {
        let names: BTreeSet<&str> = set.iter().map(|&k| cells[k].name.as_str()).collect();
        let grown: BTreeSet<usize> = (0..cells.len())
            .filter(|&j| j > i && cells[j].expr().free_vars().iter().any(|x| names.contains(x.as_str())))
            .chain(set.iter().copied())
            .collect();
        if grown == set {
            break;
        }
        set = grown;
    }
    set.into_iter().map(|k| cells[k].id.clone()).collect()
}

/// A notebook with up to `max_cells` cells; later cells may use earlier ones.
pub fn random_notebook<R: Rng>(rng: &mut R, max_cells: usize, depth: usize) -> Notebook {
    let mut nb = Notebook::new();
    let n = rng.random_range(1..=max_cells);
    for k in 0..n {
        let ctx = nb.ctx_before(nb.cells().len());
        let mut g = TermGen::new(&mut *rng);
        g.holes = nb.holes();
        let e = g.syn(&ctx, depth).0;
        nb = nb.add_cell(&format!("v{k}"), Some(e)).expect("fresh name and holes").0;
    }
    nb
}
