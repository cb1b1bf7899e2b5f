//! Ranked action suggestions.
//!
//! The candidate set is every action of a finite alphabet that
//! [`apply_action`] accepts at the current state, so an invalid action can
//! never be offered. Candidates are scored by a smoothed categorical model
//! conditioned on a small description of the cursor's surroundings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::action::{apply_action, Action, Direction, Shape};
use crate::script::script_start;
use crate::statics::{cursor_info, Mode, TypeCtx};
use crate::syntax::{HTyp, HoleGen};
use crate::zipper::{resolve, Focus, ZExp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeKind {
    Synthesized,
    Analyzed,
    Type,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GoalCon {
    Num,
    Arrow,
    Hole,
    None,
}

impl GoalCon {
    fn of(t: &HTyp) -> GoalCon {
        match t {
            HTyp::Num => GoalCon::Num,
            HTyp::Arrow(..) => GoalCon::Arrow,
            HTyp::Hole => GoalCon::Hole,
        }
    }
}

/// What the model conditions on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuggestionContext {
    pub mode: ModeKind,
    pub goal: GoalCon,
    pub node: String,
    pub parent: String,
}

fn focus_tag(f: Focus<'_>) -> &'static str {
    match f {
        Focus::Exp(e) => e.tag(),
        Focus::Typ(HTyp::Num) => "tnum",
        Focus::Typ(HTyp::Arrow(..)) => "tarrow",
        Focus::Typ(HTyp::Hole) => "thole",
    }
}

impl SuggestionContext {
    /// `None` when the state is not statically meaningful.
    pub fn of(ctx: &TypeCtx, z: &ZExp) -> Option<SuggestionContext> {
        let info = cursor_info(ctx, z).ok()?;
        let (mode, goal) = match &info.mode {
            Mode::Synthesized(t) => (ModeKind::Synthesized, GoalCon::of(t)),
            Mode::AnalyzedAgainst(t) => (ModeKind::Analyzed, GoalCon::of(t)),
            Mode::TypePosition => (ModeKind::Type, GoalCon::None),
        };
        let steps = z.cursor().steps();
        let parent = match steps.split_last() {
            None => "root",
            Some((_, up)) => focus_tag(resolve(z.expr(), up).expect("prefix of a valid path")),
        };
        Some(SuggestionContext { mode, goal, node: focus_tag(z.focus()).to_string(), parent: parent.to_string() })
    }
}

impl fmt::Display for SuggestionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            ModeKind::Synthesized => "synthesized",
            ModeKind::Analyzed => "analyzed",
            ModeKind::Type => "type",
        };
        let goal = match self.goal {
            GoalCon::Num => "num",
            GoalCon::Arrow => "arrow",
            GoalCon::Hole => "hole",
            GoalCon::None => "none",
        };
        write!(f, "({mode} {goal} {} {})", self.node, self.parent)
    }
}

impl FromStr for SuggestionContext {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let inner = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(|| format!("context `{s}` is not parenthesized"))?;
        let words: Vec<&str> = inner.split_whitespace().collect();
        let [mode, goal, node, parent] = words[..] else {
            return Err(format!("context `{s}` needs four fields"));
        };
        let mode = match mode {
            "synthesized" => ModeKind::Synthesized,
            "analyzed" => ModeKind::Analyzed,
            "type" => ModeKind::Type,
            _ => return Err(format!("unknown mode `{mode}`")),
        };
        let goal = match goal {
            "num" => GoalCon::Num,
            "arrow" => GoalCon::Arrow,
            "hole" => GoalCon::Hole,
            "none" => GoalCon::None,
            _ => return Err(format!("unknown goal `{goal}`")),
        };
        Ok(SuggestionContext { mode, goal, node: node.to_string(), parent: parent.to_string() })
    }
}

/// Action class: literals, variables and binders collapse to one class each.
pub fn action_class(a: &Action) -> String {
    match a {
        Action::Construct(Shape::NumLit(_)) => "construct num".to_string(),
        Action::Construct(Shape::Var(_)) => "construct var".to_string(),
        Action::Construct(Shape::Lam(_)) => "construct lam".to_string(),
        _ => a.to_string(),
    }
}

/// First of `x`, `y`, `z`, `x1`, `x2`, ... not bound in `ctx`.
pub fn fresh_binder(ctx: &TypeCtx) -> String {
    ["x", "y", "z"]
        .into_iter()
        .map(str::to_string)
        .chain((1..).map(|i| format!("x{i}")))
        .find(|x| ctx.get(x).is_none())
        .expect("unbounded supply")
}

/// The finite alphabet at a state: every shape, the variables in scope at
/// the cursor, one literal and one binder, deletion, finishing and moves.
pub fn alphabet(ctx: &TypeCtx, z: &ZExp) -> Vec<Action> {
    let inner = cursor_info(ctx, z).map(|i| i.ctx).unwrap_or_else(|_| ctx.clone());
    let mut out = vec![
        Action::Move(Direction::Child(0)),
        Action::Move(Direction::Child(1)),
        Action::Move(Direction::Parent),
        Action::Move(Direction::NextHole),
        Action::Move(Direction::PrevHole),
        Action::Construct(Shape::Asc),
    ];
    out.extend(inner.iter().map(|(x, _)| Action::var(x)));
    out.extend([
        Action::Construct(Shape::Lam(fresh_binder(&inner))),
        Action::Construct(Shape::Ap),
        Action::Construct(Shape::NumLit(BigInt::from(0))),
        Action::Construct(Shape::Plus),
        Action::Construct(Shape::NEHole),
        Action::Construct(Shape::Arrow),
        Action::Construct(Shape::Num),
        Action::Del,
        Action::Finish,
    ]);
    out
}

/// Actions of the alphabet that succeed at `z`, in alphabet order.
pub fn enumerate_valid(ctx: &TypeCtx, z: &ZExp) -> Vec<Action> {
    let base = HoleGen::above(z.expr());
    alphabet(ctx, z)
        .into_iter()
        .filter(|a| {
            let mut gen = base;
            apply_action(ctx, z, a, &mut gen).is_ok()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub action: Action,
    pub probability: f64,
}

/// Counts of action classes per context, with additive smoothing.
#[derive(Debug, Clone, PartialEq)]
pub struct SuggestionModel {
    pub alpha: f64,
    counts: BTreeMap<(SuggestionContext, String), u64>,
}

impl Default for SuggestionModel {
    fn default() -> Self {
        SuggestionModel::new(1.0)
    }
}

/// A recorded editing session: a start state and the actions applied to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub ctx: TypeCtx,
    pub start: ZExp,
    pub actions: Vec<Action>,
}

impl Trace {
    /// A trace from the standard script start state.
    pub fn from_script(actions: Vec<Action>) -> Trace {
        Trace { ctx: TypeCtx::new(), start: script_start().0, actions }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace {trace} fails at step {step}: {reason}")]
pub struct MalformedTrace {
    pub trace: usize,
    pub step: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model line {line}: {message}")]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

impl SuggestionModel {
    pub fn new(alpha: f64) -> SuggestionModel {
        assert!(alpha > 0.0, "smoothing constant must be positive");
        SuggestionModel { alpha, counts: BTreeMap::new() }
    }

    pub fn count(&self, c: &SuggestionContext, class: &str) -> u64 {
        self.counts.get(&(c.clone(), class.to_string())).copied().unwrap_or(0)
    }

    pub fn observe(&mut self, c: SuggestionContext, class: String) {
        *self.counts.entry((c, class)).or_default() += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&SuggestionContext, &str, u64)> {
        self.counts.iter().map(|((c, a), n)| (c, a.as_str(), *n))
    }

    /// Text form: a header `alpha<TAB>value`, then one
    /// `context<TAB>class<TAB>count` row per nonzero cell.
    pub fn save(&self) -> String {
        let mut out = format!("alpha\t{}\n", self.alpha);
        for ((c, a), n) in &self.counts {
            out.push_str(&format!("{c}\t{a}\t{n}\n"));
        }
        out
    }

    pub fn load(text: &str) -> Result<SuggestionModel, ModelParseError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| ModelParseError { line: line + 1, message };
        let (i, header) = lines.next().ok_or_else(|| err(0, "missing alpha header".into()))?;
        let alpha = header
            .strip_prefix("alpha\t")
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|a| *a > 0.0)
            .ok_or_else(|| err(i, "expected `alpha<TAB><positive number>`".into()))?;
        let mut model = SuggestionModel::new(alpha);
        for (i, line) in lines {
            let cols: Vec<&str> = line.split('\t').collect();
            let [c, a, n] = cols[..] else {
                return Err(err(i, "expected three tab-separated columns".into()));
            };
            let c: SuggestionContext = c.parse().map_err(|m| err(i, m))?;
            let n: u64 = n.trim().parse().map_err(|_| err(i, format!("bad count `{n}`")))?;
            if model.counts.insert((c, a.to_string()), n).is_some() {
                return Err(err(i, "duplicate row".into()));
            }
        }
        Ok(model)
    }
}

/// Count every (context, class) pair along the given traces.
pub fn train(traces: &[Trace]) -> Result<SuggestionModel, MalformedTrace> {
    let mut model = SuggestionModel::default();
    for (ti, t) in traces.iter().enumerate() {
        let mut z = t.start.clone();
        let mut gen = HoleGen::above(z.expr());
        for (step, a) in t.actions.iter().enumerate() {
            let malformed = |reason: String| MalformedTrace { trace: ti, step, reason };
            let c = SuggestionContext::of(&t.ctx, &z).ok_or_else(|| malformed("state is not statically meaningful".into()))?;
            z = apply_action(&t.ctx, &z, a, &mut gen).map_err(|e| malformed(e.to_string()))?;
            model.observe(c, action_class(a));
        }
    }
    Ok(model)
}

/// Probabilities of every valid action, most likely first, ties by action
/// text. Sums to one whenever any action is valid.
pub fn distribution(model: &SuggestionModel, ctx: &TypeCtx, z: &ZExp) -> Vec<Suggestion> {
    let Some(c) = SuggestionContext::of(ctx, z) else {
        return Vec::new();
    };
    let scored: Vec<(Action, f64)> = enumerate_valid(ctx, z)
        .into_iter()
        .map(|a| {
            let w = model.count(&c, &action_class(&a)) as f64 + model.alpha;
            (a, w)
        })
        .collect();
    let total: f64 = scored.iter().map(|(_, w)| w).sum();
    let mut out: Vec<(String, Suggestion)> =
        scored.into_iter().map(|(a, w)| (a.to_string(), Suggestion { action: a, probability: w / total })).collect();
    out.sort_by(|(ta, a), (tb, b)| b.probability.total_cmp(&a.probability).then_with(|| ta.cmp(tb)));
    out.into_iter().map(|(_, s)| s).collect()
}

/// The `k` most probable valid actions.
pub fn rank(model: &SuggestionModel, ctx: &TypeCtx, z: &ZExp, k: usize) -> Vec<Suggestion> {
    let mut all = distribution(model, ctx, z);
    all.truncate(k);
    all
}
