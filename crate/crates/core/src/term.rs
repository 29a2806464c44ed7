//! Terms over a single-sorted signature, substitutions between numbered
//! contexts, and equality modulo a rewrite system.
//!
//! Variables use level indexing: context `n` has variables `x0 .. x(n-1)` at
//! fixed positions, so weakening to `n + 1` leaves every term untouched.

use std::fmt;

use indexmap::IndexMap;
use rand::Rng;

use crate::error::{Error, Result};

/// Default number of rewrite steps allowed while normalizing one term.
pub const DEFAULT_REWRITE_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    ops: IndexMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ops<I, S>(ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::new();
        for (name, arity) in ops {
            sig.add_op(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add_op(&mut self, name: impl Into<String>, arity: usize) -> Result<()> {
        let name = name.into();
        if self.ops.contains_key(&name) {
            return Err(Error::DuplicateOp(name));
        }
        self.ops.insert(name, arity);
        Ok(())
    }

    pub fn arity(&self, op: &str) -> Option<usize> {
        self.ops.get(op).copied()
    }

    /// Operation symbols in declaration order.
    pub fn ops(&self) -> impl Iterator<Item = (&str, usize)> {
        self.ops.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn has_constants(&self) -> bool {
        self.ops.values().any(|&a| a == 0)
    }

    fn has_proper_ops(&self) -> bool {
        self.ops.values().any(|&a| a > 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Self {
        Term::Var(i)
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(op.into(), args)
    }

    pub fn constant(op: impl Into<String>) -> Self {
        Term::App(op.into(), Vec::new())
    }

    /// Nesting depth of applications; variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// Smallest context this term is well-formed in, ignoring the signature.
    pub fn min_ctx(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::min_ctx).max().unwrap_or(0),
        }
    }

    pub fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Term::Var(i) => out.push(*i),
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    fn check(&self, sig: &Signature, ctx: usize) -> Result<()> {
        match self {
            Term::Var(i) if *i < ctx => Ok(()),
            Term::Var(_) => Err(Error::MalformedTerm {
                term: self.to_string(),
                ctx,
            }),
            Term::App(op, args) => {
                let arity = sig.arity(op).ok_or_else(|| Error::UnknownOp(op.clone()))?;
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        op: op.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig, ctx))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn wf_term(t: &Term, sig: &Signature, ctx: usize) -> bool {
    t.check(sig, ctx).is_ok()
}

/// Checks well-formedness, reporting which condition failed.
pub fn check_term(t: &Term, sig: &Signature, ctx: usize) -> Result<()> {
    t.check(sig, ctx)
}

/// A morphism `dom -> cod` of the contextual category: one term in context
/// `dom` for each of the `cod` target variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sub {
    dom: usize,
    components: Vec<Term>,
}

impl Sub {
    /// Builds a substitution, checking that every component only mentions
    /// variables below `dom`.
    pub fn new(dom: usize, components: Vec<Term>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|t| t.min_ctx() > dom) {
            return Err(Error::MalformedTerm {
                term: bad.to_string(),
                ctx: dom,
            });
        }
        Ok(Sub { dom, components })
    }

    pub(crate) fn new_unchecked(dom: usize, components: Vec<Term>) -> Self {
        Sub { dom, components }
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Term] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Term> {
        self.components
    }

    /// Substitution `n -> k` picking out the listed variables.
    pub fn projection(dom: usize, vars: impl IntoIterator<Item = usize>) -> Self {
        Sub {
            dom,
            components: vars.into_iter().map(Term::Var).collect(),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        self.components.iter().try_for_each(|t| t.check(sig, self.dom))
    }
}

impl fmt::Display for Sub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}](", self.dom)?;
        for (k, t) in self.components.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

pub fn identity_sub(n: usize) -> Sub {
    Sub::projection(n, 0..n)
}

/// Replaces `Var(j)` in `t` by the `j`-th component of `f`.
pub fn apply_sub(t: &Term, f: &Sub) -> Result<Term> {
    match t {
        Term::Var(j) => f
            .components
            .get(*j)
            .cloned()
            .ok_or_else(|| Error::MalformedTerm {
                term: t.to_string(),
                ctx: f.cod(),
            }),
        Term::App(op, args) => Ok(Term::App(
            op.clone(),
            args.iter()
                .map(|a| apply_sub(a, f))
                .collect::<Result<_>>()?,
        )),
    }
}

/// Diagrammatic composite `f ∘ g : f.dom -> g.cod` (first `f`, then `g`).
pub fn compose(f: &Sub, g: &Sub) -> Result<Sub> {
    if f.cod() != g.dom {
        return Err(Error::dims(
            "compose",
            format!("{f} has codomain {}, {g} has domain {}", f.cod(), g.dom),
        ));
    }
    let components = g
        .components
        .iter()
        .map(|t| apply_sub(t, f))
        .collect::<Result<_>>()?;
    Ok(Sub {
        dom: f.dom,
        components,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub ctx: usize,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewriteSystem {
    rules: Vec<Rule>,
    budget: u64,
}

impl RewriteSystem {
    pub fn new(rules: Vec<Rule>) -> Result<Self> {
        for r in &rules {
            if matches!(r.lhs, Term::Var(_)) {
                return Err(Error::InvalidRule(format!(
                    "left-hand side {} is a variable",
                    r.lhs
                )));
            }
            if r.lhs.min_ctx() > r.ctx || r.rhs.min_ctx() > r.ctx {
                return Err(Error::InvalidRule(format!(
                    "{} -> {} mentions variables outside context {}",
                    r.lhs, r.rhs, r.ctx
                )));
            }
            let (mut lv, mut rv) = (Vec::new(), Vec::new());
            r.lhs.vars(&mut lv);
            r.rhs.vars(&mut rv);
            if let Some(v) = rv.iter().find(|v| !lv.contains(v)) {
                return Err(Error::InvalidRule(format!(
                    "x{v} occurs in {} but not in {}",
                    r.rhs, r.lhs
                )));
            }
        }
        Ok(RewriteSystem {
            rules,
            budget: DEFAULT_REWRITE_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    fn check(&self, sig: &Signature) -> Result<()> {
        for r in &self.rules {
            r.lhs.check(sig, r.ctx)?;
            r.rhs.check(sig, r.ctx)?;
        }
        Ok(())
    }
}

fn matches(pat: &Term, t: &Term, binding: &mut Vec<Option<Term>>) -> bool {
    match pat {
        Term::Var(i) => match &binding[*i] {
            Some(bound) => bound == t,
            None => {
                binding[*i] = Some(t.clone());
                true
            }
        },
        Term::App(op, pargs) => match t {
            Term::App(top, targs) if top == op && targs.len() == pargs.len() => pargs
                .iter()
                .zip(targs)
                .all(|(p, a)| matches(p, a, binding)),
            _ => false,
        },
    }
}

fn instantiate(t: &Term, binding: &[Option<Term>]) -> Term {
    match t {
        Term::Var(i) => binding[*i].clone().expect("rhs variables occur in lhs"),
        Term::App(op, args) => Term::App(
            op.clone(),
            args.iter().map(|a| instantiate(a, binding)).collect(),
        ),
    }
}

struct Normalizer<'a> {
    rws: &'a RewriteSystem,
    steps: u64,
    root: &'a Term,
}

impl Normalizer<'_> {
    fn run(&mut self, t: &Term) -> Result<Term> {
        let t = match t {
            Term::Var(_) => return Ok(t.clone()),
            Term::App(op, args) => Term::App(
                op.clone(),
                args.iter().map(|a| self.run(a)).collect::<Result<_>>()?,
            ),
        };
        for rule in &self.rws.rules {
            let mut binding = vec![None; rule.ctx];
            if matches(&rule.lhs, &t, &mut binding) {
                self.steps += 1;
                if self.steps > self.rws.budget {
                    return Err(Error::BudgetExceeded {
                        what: format!("normalizing {}", self.root),
                        required: format!("more than {} rewrite steps", self.rws.budget),
                        budget: self.rws.budget,
                    });
                }
                let next = instantiate(&rule.rhs, &binding);
                return self.run(&next);
            }
        }
        Ok(t)
    }
}

/// Leftmost-innermost normal form of `t`.
pub fn normalize(t: &Term, rws: &RewriteSystem) -> Result<Term> {
    Normalizer {
        rws,
        steps: 0,
        root: t,
    }
    .run(t)
}

pub fn normalize_sub(f: &Sub, rws: &RewriteSystem) -> Result<Sub> {
    Ok(Sub {
        dom: f.dom,
        components: f
            .components
            .iter()
            .map(|t| normalize(t, rws))
            .collect::<Result<_>>()?,
    })
}

/// Componentwise equality, after normalization when a rewrite system is given.
pub fn sub_eq(f: &Sub, g: &Sub, rws: Option<&RewriteSystem>) -> Result<bool> {
    if f.dom != g.dom || f.cod() != g.cod() {
        return Err(Error::dims(
            "sub_eq",
            format!("{f} is {}->{}, {g} is {}->{}", f.dom, f.cod(), g.dom, g.cod()),
        ));
    }
    match rws {
        None => Ok(f == g),
        Some(rws) => {
            for (a, b) in f.components.iter().zip(&g.components) {
                if a != b && normalize(a, rws)? != normalize(b, rws)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// All terms of nesting depth at most `depth` in context `ctx`: variables by
/// index, then operations in signature order with argument tuples in
/// lexicographic order over the next-shallower list.
pub fn enumerate_terms(sig: &Signature, ctx: usize, depth: usize) -> Vec<Term> {
    let mut current = build_level(sig, ctx, &[]);
    for _ in 0..depth {
        current = build_level(sig, ctx, &current);
    }
    current
}

fn build_level(sig: &Signature, ctx: usize, below: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = (0..ctx).map(Term::Var).collect();
    for (op, arity) in sig.ops() {
        if arity == 0 {
            out.push(Term::constant(op));
            continue;
        }
        if below.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; arity];
        loop {
            out.push(Term::App(
                op.to_string(),
                idx.iter().map(|&i| below[i].clone()).collect(),
            ));
            if !advance(&mut idx, below.len()) {
                break;
            }
        }
    }
    out
}

/// Steps `idx` to the next tuple in lexicographic order, last position
/// fastest. Returns false after the last tuple.
pub(crate) fn advance(idx: &mut [usize], base: usize) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < base {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

/// Number of terms `enumerate_terms` would return, saturating.
pub fn count_terms(sig: &Signature, ctx: usize, depth: usize) -> u128 {
    let leaves = ctx as u128 + sig.ops().filter(|&(_, a)| a == 0).count() as u128;
    let mut count = leaves;
    for _ in 0..depth {
        let mut next = leaves;
        for (_, arity) in sig.ops().filter(|&(_, a)| a > 0) {
            next = next.saturating_add(count.saturating_pow(arity as u32));
        }
        count = next;
    }
    count
}

/// Whether context `ctx` has infinitely many terms over `sig`.
pub fn infinitely_many_terms(sig: &Signature, ctx: usize) -> bool {
    (ctx > 0 || sig.has_constants()) && sig.has_proper_ops()
}

/// A random term of depth at most `depth`, or `None` when context `ctx` has
/// no terms at all.
pub fn random_term<R: Rng + ?Sized>(
    sig: &Signature,
    ctx: usize,
    depth: usize,
    rng: &mut R,
) -> Option<Term> {
    let constants: Vec<&str> = sig
        .ops()
        .filter(|&(_, a)| a == 0)
        .map(|(op, _)| op)
        .collect();
    let proper: Vec<(&str, usize)> = sig.ops().filter(|&(_, a)| a > 0).collect();
    let leaves = ctx + constants.len();
    if leaves == 0 {
        return None;
    }
    fn go<R: Rng + ?Sized>(
        ctx: usize,
        constants: &[&str],
        proper: &[(&str, usize)],
        depth: usize,
        rng: &mut R,
    ) -> Term {
        if depth > 0 && !proper.is_empty() && rng.gen_bool(0.6) {
            let (op, arity) = proper[rng.gen_range(0..proper.len())];
            let args = (0..arity)
                .map(|_| go(ctx, constants, proper, depth - 1, rng))
                .collect();
            return Term::App(op.to_string(), args);
        }
        let k = rng.gen_range(0..ctx + constants.len());
        if k < ctx {
            Term::Var(k)
        } else {
            Term::constant(constants[k - ctx])
        }
    }
    Some(go(ctx, &constants, &proper, depth, rng))
}

/// A random substitution `dom -> cod` with components of depth at most `depth`.
pub fn random_sub<R: Rng + ?Sized>(
    sig: &Signature,
    dom: usize,
    cod: usize,
    depth: usize,
    rng: &mut R,
) -> Option<Sub> {
    let components = (0..cod)
        .map(|_| random_term(sig, dom, depth, rng))
        .collect::<Option<Vec<_>>>()?;
    Some(Sub { dom, components })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub ctx: usize,
    pub lhs: Term,
    pub rhs: Term,
}

/// A finitely presented single-sorted algebraic theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryPresentation {
    pub name: String,
    pub signature: Signature,
    pub equations: Vec<Equation>,
    /// Oriented rules deciding equality; their completeness is asserted by
    /// whoever wrote the presentation, not checked.
    pub rewrites: Option<RewriteSystem>,
}

impl TheoryPresentation {
    pub fn free(name: impl Into<String>, signature: Signature) -> Self {
        TheoryPresentation {
            name: name.into(),
            signature,
            equations: Vec::new(),
            rewrites: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for eq in &self.equations {
            eq.lhs.check(&self.signature, eq.ctx)?;
            eq.rhs.check(&self.signature, eq.ctx)?;
        }
        if let Some(rws) = &self.rewrites {
            rws.check(&self.signature)?;
        }
        Ok(())
    }

    pub fn rewrites(&self) -> Option<&RewriteSystem> {
        self.rewrites.as_ref()
    }

    pub fn normalize(&self, t: &Term) -> Result<Term> {
        match &self.rewrites {
            Some(rws) => normalize(t, rws),
            None => Ok(t.clone()),
        }
    }

    pub fn normalize_sub(&self, f: &Sub) -> Result<Sub> {
        match &self.rewrites {
            Some(rws) => normalize_sub(f, rws),
            None => Ok(f.clone()),
        }
    }

    /// The free magma: one binary operation `m`, no equations.
    pub fn magma() -> Self {
        Self::free("Magma", Signature::from_ops([("m", 2)]).unwrap())
    }

    /// Monoids: unit `e`, multiplication `m`, with unit and associativity
    /// equations oriented as a complete rewrite system.
    pub fn monoid() -> Self {
        let signature = Signature::from_ops([("e", 0), ("m", 2)]).unwrap();
        let m = |a, b| Term::app("m", vec![a, b]);
        let e = || Term::constant("e");
        let x = Term::Var;
        let equations = vec![
            Equation {
                ctx: 1,
                lhs: m(e(), x(0)),
                rhs: x(0),
            },
            Equation {
                ctx: 1,
                lhs: m(x(0), e()),
                rhs: x(0),
            },
            Equation {
                ctx: 3,
                lhs: m(m(x(0), x(1)), x(2)),
                rhs: m(x(0), m(x(1), x(2))),
            },
        ];
        let rules = equations
            .iter()
            .map(|e| Rule {
                ctx: e.ctx,
                lhs: e.lhs.clone(),
                rhs: e.rhs.clone(),
            })
            .collect();
        TheoryPresentation {
            name: "Monoid".into(),
            signature,
            equations,
            rewrites: Some(RewriteSystem::new(rules).unwrap()),
        }
    }
}
