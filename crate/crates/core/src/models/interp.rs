//! Interpretations of a presented theory in a finite clone, and brute-force
//! model enumeration.

use std::fmt;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::report::budget_error;
use crate::term::{Sub, Term, TheoryPresentation};

use super::clone::{CloneMor, FiniteClone};

/// Assigns each operation symbol of arity `r` a function `U^r -> U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    target: FiniteClone,
    ops: IndexMap<String, OpTable>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTable {
    pub arity: usize,
    /// Indexed by argument tuples in lexicographic order.
    pub values: Vec<usize>,
}

impl Interpretation {
    pub fn new(target: FiniteClone, ops: IndexMap<String, OpTable>) -> Result<Self> {
        let k = target.carrier();
        for (name, t) in &ops {
            if t.values.len() != target.size(t.arity) || t.values.iter().any(|&v| v >= k) {
                return Err(Error::dims(
                    "interpretation",
                    format!("table for `{name}` does not describe a map U^{} -> U", t.arity),
                ));
            }
        }
        Ok(Interpretation { target, ops })
    }

    pub fn target(&self) -> &FiniteClone {
        &self.target
    }

    pub fn op(&self, name: &str) -> Option<&OpTable> {
        self.ops.get(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = (&str, &OpTable)> {
        self.ops.iter().map(|(n, t)| (n.as_str(), t))
    }

    /// The induced morphism `U^m -> U^n` of a substitution `m -> n`.
    pub fn apply_sub(&self, f: &Sub) -> Result<CloneMor> {
        let c = &self.target;
        let mut table = Vec::with_capacity(c.size(f.dom()));
        for i in 0..c.size(f.dom()) {
            let env = c.decode(i, f.dom());
            let out = f
                .components()
                .iter()
                .map(|t| eval_term(t, self, &env))
                .collect::<Result<Vec<_>>>()?;
            table.push(c.encode(&out) as u32);
        }
        c.from_table(f.dom(), f.cod(), table)
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (name, t)) in self.ops.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}={:?}", t.values)?;
        }
        Ok(())
    }
}

pub fn eval_term(t: &Term, interp: &Interpretation, env: &[usize]) -> Result<usize> {
    match t {
        Term::Var(i) => env.get(*i).copied().ok_or_else(|| Error::MalformedTerm {
            term: t.to_string(),
            ctx: env.len(),
        }),
        Term::App(op, args) => {
            let table = interp
                .ops
                .get(op)
                .ok_or_else(|| Error::UnknownOp(op.clone()))?;
            if table.arity != args.len() {
                return Err(Error::ArityMismatch {
                    op: op.clone(),
                    expected: table.arity,
                    found: args.len(),
                });
            }
            let k = interp.target.carrier();
            let mut index = 0;
            for a in args {
                index = index * k + eval_term(a, interp, env)?;
            }
            Ok(table.values[index])
        }
    }
}

/// Whether every equation of `pres` holds under every environment.
pub fn check_model(pres: &TheoryPresentation, interp: &Interpretation) -> Result<bool> {
    Ok(first_violation(pres, interp)?.is_none())
}

/// The first equation and environment where `interp` fails, if any.
pub fn first_violation(
    pres: &TheoryPresentation,
    interp: &Interpretation,
) -> Result<Option<(usize, Vec<usize>)>> {
    let c = interp.target();
    for (ei, eq) in pres.equations.iter().enumerate() {
        for i in 0..c.size(eq.ctx) {
            let env = c.decode(i, eq.ctx);
            if eval_term(&eq.lhs, interp, &env)? != eval_term(&eq.rhs, interp, &env)? {
                return Ok(Some((ei, env)));
            }
        }
    }
    Ok(None)
}

/// All models of `pres` on a `k`-element carrier, ops assigned in signature
/// order with each table counted lexicographically (first op slowest).
pub fn enumerate_models(
    pres: &TheoryPresentation,
    k: usize,
    budget: u64,
) -> Result<Vec<Interpretation>> {
    let target = super::clone::clone(k)?;
    let ops: Vec<(&str, usize)> = pres.signature.ops().collect();
    let sizes: Vec<usize> = ops.iter().map(|&(_, a)| target.size(a)).collect();

    let mut total: u128 = 1;
    for &s in &sizes {
        total = total.saturating_mul((k as u128).saturating_pow(s as u32));
    }
    if total > budget as u128 {
        return Err(budget_error(
            format!("enumerating models of {} on {k} elements", pres.name),
            total,
            budget,
        ));
    }

    // One odometer over the concatenation of all tables.
    let width: usize = sizes.iter().sum();
    let mut digits = vec![0usize; width];
    let mut out = Vec::new();
    loop {
        let mut tables = IndexMap::new();
        let mut at = 0;
        for (&(name, arity), &s) in ops.iter().zip(&sizes) {
            tables.insert(
                name.to_string(),
                OpTable {
                    arity,
                    values: digits[at..at + s].to_vec(),
                },
            );
            at += s;
        }
        let interp = Interpretation { target, ops: tables };
        if check_model(pres, &interp)? {
            out.push(interp);
        }
        if !crate::term::advance(&mut digits, k) {
            break;
        }
    }
    Ok(out)
}
