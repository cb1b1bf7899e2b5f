//! Small-step, substitution-based evaluator.
//!
//! This is a second route to the same normal forms as [`super::eval_in`]:
//! holes carry an explicit substitution instead of an environment, and
//! lambdas are substituted into rather than closed over. [`readback`] maps a
//! big-step result into this representation so the two can be compared.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use thiserror::Error;

use crate::syntax::{HExp, HTyp, HoleName};

use super::EvalResult;

pub type Subst = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Box<Term>),
    Ap(Box<Term>, Box<Term>),
    Num(BigInt),
    Plus(Box<Term>, Box<Term>),
    Asc(Box<Term>, HTyp),
    Hole(HoleName, Subst),
    NEHole(HoleName, Box<Term>, Subst),
}

/// Internal term for `e` whose free variables are `scope`. Holes start with
/// the identity substitution over their scope.
pub fn elaborate(e: &HExp, scope: &BTreeSet<String>) -> Term {
    let ident = |scope: &BTreeSet<String>| scope.iter().map(|x| (x.clone(), Term::Var(x.clone()))).collect::<Subst>();
    match e {
        HExp::Var(x) => Term::Var(x.clone()),
        HExp::Lam(x, b) => {
            let mut inner = scope.clone();
            inner.insert(x.clone());
            Term::Lam(x.clone(), Box::new(elaborate(b, &inner)))
        }
        HExp::Ap(f, a) => Term::Ap(Box::new(elaborate(f, scope)), Box::new(elaborate(a, scope))),
        HExp::Num(n) => Term::Num(n.clone()),
        HExp::Plus(l, r) => Term::Plus(Box::new(elaborate(l, scope)), Box::new(elaborate(r, scope))),
        HExp::Asc(s, t) => Term::Asc(Box::new(elaborate(s, scope)), t.clone()),
        HExp::EHole(u) => Term::Hole(*u, ident(scope)),
        HExp::NEHole(u, s) => Term::NEHole(*u, Box::new(elaborate(s, scope)), ident(scope)),
    }
}

/// `[d/x]t`. `d` must be closed, so no capture can occur.
pub fn subst(d: &Term, x: &str, t: &Term) -> Term {
    let in_sigma = |s: &Subst| s.iter().map(|(y, v)| (y.clone(), subst(d, x, v))).collect::<Subst>();
    match t {
        Term::Var(y) if y == x => d.clone(),
        Term::Var(_) | Term::Num(_) => t.clone(),
        Term::Lam(y, _) if y == x => t.clone(),
        Term::Lam(y, b) => Term::Lam(y.clone(), Box::new(subst(d, x, b))),
        Term::Ap(f, a) => Term::Ap(Box::new(subst(d, x, f)), Box::new(subst(d, x, a))),
        Term::Plus(l, r) => Term::Plus(Box::new(subst(d, x, l)), Box::new(subst(d, x, r))),
        Term::Asc(s, ty) => Term::Asc(Box::new(subst(d, x, s)), ty.clone()),
        Term::Hole(u, s) => Term::Hole(*u, in_sigma(s)),
        Term::NEHole(u, b, s) => Term::NEHole(*u, Box::new(subst(d, x, b)), in_sigma(s)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Stuck {
    #[error("free variable `{0}`")]
    FreeVar(String),
    #[error("no normal form within {0} steps")]
    OutOfFuel(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next(Term),
    Final,
}

pub fn is_final(t: &Term) -> bool {
    match t {
        Term::Num(_) | Term::Lam(..) | Term::Hole(..) => true,
        Term::Var(_) | Term::Asc(..) => false,
        Term::NEHole(_, b, _) => is_final(b),
        Term::Ap(f, a) => is_final(f) && is_final(a) && !matches!(**f, Term::Lam(..)),
        Term::Plus(l, r) => is_final(l) && is_final(r) && !matches!((&**l, &**r), (Term::Num(_), Term::Num(_))),
    }
}

/// One left-to-right call-by-value step.
pub fn step(t: &Term) -> Result<Step, Stuck> {
    let next = match t {
        Term::Var(x) => return Err(Stuck::FreeVar(x.clone())),
        Term::Num(_) | Term::Lam(..) | Term::Hole(..) => return Ok(Step::Final),
        Term::Asc(s, _) => (**s).clone(),
        Term::NEHole(u, b, s) => match step(b)? {
            Step::Next(b2) => Term::NEHole(*u, Box::new(b2), s.clone()),
            Step::Final => return Ok(Step::Final),
        },
        Term::Ap(f, a) => {
            if let Step::Next(f2) = step(f)? {
                Term::Ap(Box::new(f2), a.clone())
            } else if let Step::Next(a2) = step(a)? {
                Term::Ap(f.clone(), Box::new(a2))
            } else if let Term::Lam(x, body) = &**f {
                subst(a, x, body)
            } else {
                return Ok(Step::Final);
            }
        }
        Term::Plus(l, r) => {
            if let Step::Next(l2) = step(l)? {
                Term::Plus(Box::new(l2), r.clone())
            } else if let Step::Next(r2) = step(r)? {
                Term::Plus(l.clone(), Box::new(r2))
            } else if let (Term::Num(a), Term::Num(b)) = (&**l, &**r) {
                Term::Num(a + b)
            } else {
                return Ok(Step::Final);
            }
        }
    };
    Ok(Step::Next(next))
}

/// Step to a final term, or fail after `fuel` steps.
pub fn run(t: &Term, fuel: usize) -> Result<(Term, usize), Stuck> {
    let mut cur = t.clone();
    for n in 0..fuel {
        match step(&cur)? {
            Step::Next(t2) => cur = t2,
            Step::Final => return Ok((cur, n)),
        }
    }
    Err(Stuck::OutOfFuel(fuel))
}

/// Evaluate a closed program by stepping.
pub fn normalize(e: &HExp) -> Result<Term, Stuck> {
    run(&elaborate(e, &BTreeSet::new()), 1_000_000).map(|(t, _)| t)
}

/// Express a big-step result as a closed internal term.
pub fn readback(r: &EvalResult) -> Term {
    let sigma = |env: &super::Env| env.iter().map(|(x, v)| (x.clone(), readback(v))).collect::<Subst>();
    match r {
        EvalResult::VNum(n) => Term::Num(n.clone()),
        EvalResult::VClosure(x, body, env) => {
            let mut scope: BTreeSet<String> = env.iter().map(|(y, _)| y.clone()).collect();
            scope.insert(x.clone());
            let mut lam = Term::Lam(x.clone(), Box::new(elaborate(body, &scope)));
            for (y, v) in env.iter() {
                lam = subst(&readback(v), y, &lam);
            }
            lam
        }
        EvalResult::IHole(u, env) => Term::Hole(*u, sigma(env)),
        EvalResult::INEHole(u, inner, env) => Term::NEHole(*u, Box::new(readback(inner)), sigma(env)),
        EvalResult::IAp(f, a) => Term::Ap(Box::new(readback(f)), Box::new(readback(a))),
        EvalResult::IPlus(l, r) => Term::Plus(Box::new(readback(l)), Box::new(readback(r))),
    }
}
