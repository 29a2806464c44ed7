//! The skeleton category of finite sets and Lawvere theory structures over
//! a category whose objects are the natural numbers.
//!
//! A Lawvere structure is read here in the contextual orientation: a finite
//! function `f : stn(m) -> stn(n)` maps to a morphism `n -> m`.

use std::collections::HashSet;
use std::fmt;

use crate::category::{probe_homs, Category, MorOf};
use crate::error::{Error, Result};
use crate::report::{CheckReport, ProbeSpec, Tally};
use crate::term::{Sub, TheoryPresentation};
use crate::term_model::TermModel;

/// A function `stn(m) -> stn(n)` given by its table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinFun {
    m: usize,
    n: usize,
    table: Vec<usize>,
}

impl FinFun {
    pub fn new(n: usize, table: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = table.iter().find(|&&v| v >= n) {
            return Err(Error::OutOfRange {
                what: "finite function codomain",
                index: bad,
                size: n,
            });
        }
        Ok(FinFun {
            m: table.len(),
            n,
            table,
        })
    }

    pub fn identity(n: usize) -> Self {
        FinFun {
            m: n,
            n,
            table: (0..n).collect(),
        }
    }

    /// The unique function out of the empty set.
    pub fn empty(n: usize) -> Self {
        FinFun {
            m: 0,
            n,
            table: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// All `n^m` functions `stn(m) -> stn(n)` in lexicographic table order.
    pub fn all(m: usize, n: usize) -> Vec<FinFun> {
        if m > 0 && n == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; m];
        loop {
            out.push(FinFun {
                m,
                n,
                table: idx.clone(),
            });
            if !crate::term::advance(&mut idx, n) {
                break;
            }
        }
        out
    }
}

impl fmt::Display for FinFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}->{}", self.table, self.m, self.n)
    }
}

/// Inclusion of the initial segment `stn(m) -> stn(m + n)`.
pub fn ii1(m: usize, n: usize) -> FinFun {
    FinFun {
        m,
        n: m + n,
        table: (0..m).collect(),
    }
}

/// Inclusion of the concluding segment `stn(n) -> stn(m + n)`, `j ↦ m + j`.
pub fn ii2(m: usize, n: usize) -> FinFun {
    FinFun {
        m: n,
        n: m + n,
        table: (m..m + n).collect(),
    }
}

/// Diagrammatic composite: first `f`, then `g`.
pub fn finfun_compose(f: &FinFun, g: &FinFun) -> Result<FinFun> {
    if f.n != g.m {
        return Err(Error::dims(
            "finfun_compose",
            format!("{f} then {g}"),
        ));
    }
    Ok(FinFun {
        m: f.m,
        n: g.n,
        table: f.table.iter().map(|&i| g.table[i]).collect(),
    })
}

/// A Lawvere theory structure `L : F -> T` on a category with objects ℕ,
/// presented in the opposite (contextual) orientation.
pub trait Lawvere {
    type Cat: Category<Ob = usize>;

    fn category(&self) -> &Self::Cat;

    /// `L(f)` for `f : stn(m) -> stn(n)`, a morphism `n -> m`.
    fn mor_map(&self, f: &FinFun) -> Result<MorOf<Self::Cat>>;

    /// The push-out mediator: given `u : k -> m` and `v : k -> n`, the unique
    /// `w : k -> m + n` with `w ∘ L(ii1) = u` and `w ∘ L(ii2) = v`.
    fn merge(&self, u: &MorOf<Self::Cat>, v: &MorOf<Self::Cat>) -> Result<MorOf<Self::Cat>>;

    /// Inverse of `merge`: precomposition with `L(ii1(m, n))` and `L(ii2(m, n))`.
    #[allow(clippy::type_complexity)]
    fn split(
        &self,
        w: &MorOf<Self::Cat>,
        m: usize,
        n: usize,
    ) -> Result<(MorOf<Self::Cat>, MorOf<Self::Cat>)> {
        let cat = self.category();
        if cat.cod(w) != m + n {
            return Err(Error::dims(
                "split",
                format!("codomain {} is not {m}+{n}", cat.cod(w)),
            ));
        }
        Ok((
            cat.compose(w, &self.mor_map(&ii1(m, n))?)?,
            cat.compose(w, &self.mor_map(&ii2(m, n))?)?,
        ))
    }
}

/// The Lawvere structure of the syntactic category: `L(f)` is the tuple of
/// variables `(x_{f(0)}, …, x_{f(m-1)})`.
pub fn term_lawvere(pres: TheoryPresentation) -> Result<TermModel> {
    TermModel::new(pres)
}

impl Lawvere for TermModel {
    type Cat = TermModel;

    fn category(&self) -> &TermModel {
        self
    }

    fn mor_map(&self, f: &FinFun) -> Result<Sub> {
        Ok(Sub::projection(f.n, f.table.iter().copied()))
    }

    fn merge(&self, u: &Sub, v: &Sub) -> Result<Sub> {
        if u.dom() != v.dom() {
            return Err(Error::dims(
                "merge",
                format!("{u} and {v} have different domains"),
            ));
        }
        let mut comps = u.components().to_vec();
        comps.extend_from_slice(v.components());
        Ok(Sub::new_unchecked(u.dom(), comps))
    }
}

/// Picks probe pairs from two lists: the full product when it has at most
/// `limit` elements, otherwise a deterministic spread of `limit` pairs.
pub(crate) fn probe_pairs<'a, A, B>(xs: &'a [A], ys: &'a [B], limit: usize) -> Vec<(&'a A, &'a B)> {
    if xs.is_empty() || ys.is_empty() {
        return Vec::new();
    }
    if xs.len() * ys.len() <= limit {
        return xs.iter().flat_map(|x| ys.iter().map(move |y| (x, y))).collect();
    }
    (0..limit)
        .map(|i| (&xs[i % xs.len()], &ys[(i * 7 + i / xs.len()) % ys.len()]))
        .collect()
}

fn eq_or_dims<C: Category>(cat: &C, f: &C::Mor, g: &C::Mor) -> Result<bool> {
    if cat.dom(f) != cat.dom(g) || cat.cod(f) != cat.cod(g) {
        return Ok(false);
    }
    cat.mor_eq(f, g)
}

/// Runs the Lawvere law suite: functor laws over every pair of composable
/// finite functions up to `max_fun`, initiality of `0`, and the push-out
/// conditions in merge/split form up to `max_n`.
pub fn verify_lawvere<L: Lawvere>(lw: &L, probe: &ProbeSpec) -> Result<CheckReport> {
    let cat = lw.category();
    let mut report = CheckReport::new();

    for n in 0..=probe.max_fun {
        let mut t = Tally::new("L1 functor identity", format!("n={n}"));
        let id = FinFun::identity(n);
        t.case(
            lw.mor_map(&id).and_then(|m| eq_or_dims(cat, &m, &cat.id(&n))),
            || format!("L(id_{n}) != id_{n}"),
        )?;
        report.add(t);
    }

    for a in 0..=probe.max_fun {
        for b in 0..=probe.max_fun {
            let fs = FinFun::all(a, b);
            for c in 0..=probe.max_fun {
                let gs = FinFun::all(b, c);
                let mut t = Tally::new("L2 functor composition", format!("{a}->{b}->{c}"));
                for f in &fs {
                    let lf = lw.mor_map(f)?;
                    for g in &gs {
                        let outcome = (|| {
                            let lhs = lw.mor_map(&finfun_compose(f, g)?)?;
                            let rhs = cat.compose(&lw.mor_map(g)?, &lf)?;
                            eq_or_dims(cat, &lhs, &rhs)
                        })();
                        t.case(outcome, || {
                            format!("L({f} then {g}) != L({g}) then L({f})")
                        })?;
                    }
                }
                report.add(t);
            }
        }
    }

    for k in 0..=probe.max_n {
        let mut t = Tally::new("L3 initial object", format!("k={k}"));
        let bang = lw.mor_map(&FinFun::empty(k))?;
        let unique = match cat.hom_set(&k, &0, probe.exhaustive_cap) {
            Some(all) => all.len() == 1 && eq_or_dims(cat, &all[0], &bang)?,
            None => false,
        };
        t.case(Ok(unique && cat.cod(&bang) == 0 && cat.dom(&bang) == k), || {
            format!("Hom({k},0) is not the singleton {{{}}}", cat.show_mor(&bang))
        })?;
        report.add(t);
    }

    for k in 0..=probe.max_n {
        for m in 0..=probe.max_n {
            for n in 0..=probe.max_n - m {
                check_pushout(lw, probe, k, m, n, &mut report)?;
            }
        }
    }
    Ok(report)
}

fn check_pushout<L: Lawvere>(
    lw: &L,
    probe: &ProbeSpec,
    k: usize,
    m: usize,
    n: usize,
    report: &mut CheckReport,
) -> Result<()> {
    let cat = lw.category();
    let inst = format!("k={k} m={m} n={n}");
    let mut rng = probe.rng(&format!("pushout {inst}"));
    let us = probe_homs(cat, &k, &m, probe.samples, probe.depth, &mut rng);
    let vs = probe_homs(cat, &k, &n, probe.samples, probe.depth, &mut rng);
    let ws = probe_homs(cat, &k, &(m + n), probe.samples, probe.depth, &mut rng);

    let mut inv = Tally::new("L4 split after merge", inst.clone());
    let mut red = Tally::new("L5 merge reduces to (m,1) steps", inst.clone());
    for (u, v) in probe_pairs(&us, &vs, probe.samples) {
        let witness = || format!("u={} v={}", cat.show_mor(u), cat.show_mor(v));
        inv.case(
            (|| {
                let (u2, v2) = lw.split(&lw.merge(u, v)?, m, n)?;
                Ok(eq_or_dims(cat, &u2, u)? && eq_or_dims(cat, &v2, v)?)
            })(),
            witness,
        )?;
        red.case(
            (|| {
                let direct = lw.merge(u, v)?;
                let mut acc = u.clone();
                for j in 0..n {
                    let coord = cat.compose(v, &lw.mor_map(&FinFun::new(n, vec![j])?)?)?;
                    acc = lw.merge(&acc, &coord)?;
                }
                eq_or_dims(cat, &direct, &acc)
            })(),
            witness,
        )?;
    }
    report.add(inv);
    report.add(red);

    let mut back = Tally::new("L4 merge after split", inst.clone());
    for w in &ws {
        back.case(
            (|| {
                let (u, v) = lw.split(w, m, n)?;
                eq_or_dims(cat, &lw.merge(&u, &v)?, w)
            })(),
            || format!("w={}", cat.show_mor(w)),
        )?;
    }
    report.add(back);

    // Exhaustive mediator uniqueness: split is injective on Hom(k, m+n) and
    // the cardinalities match, so every (u, v) has exactly one mediator.
    let cap = probe.exhaustive_cap;
    if let (Some(cu), Some(cv), Some(all)) = (
        cat.hom_count(&k, &m),
        cat.hom_count(&k, &n),
        cat.hom_set(&k, &(m + n), cap),
    ) {
        let mut t = Tally::new("L6 mediator uniqueness (exhaustive)", inst);
        let mut seen = HashSet::new();
        let mut injective = true;
        let mut clash = None;
        for w in &all {
            let (u, v) = lw.split(w, m, n)?;
            if !seen.insert((cat.canon(&u)?, cat.canon(&v)?)) {
                injective = false;
                clash.get_or_insert_with(|| cat.show_mor(w));
            }
        }
        let bijective = injective && all.len() as u128 == cu * cv;
        t.case(Ok(bijective), || match clash {
            Some(w) => format!("two mediators share the split of {w}"),
            None => format!("|Hom(k,m+n)|={} but |Hom(k,m)|*|Hom(k,n)|={}", all.len(), cu * cv),
        })?;
        report.add(t);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{identity_sub, Term};

    #[test]
    fn injection_examples() {
        assert_eq!(ii1(2, 1).table(), &[0, 1]);
        assert_eq!(ii1(2, 1).n(), 3);
        assert_eq!(ii2(2, 1).table(), &[2]);
        assert_eq!(ii2(2, 1).n(), 3);
        assert_eq!(ii2(0, 3), FinFun::identity(3));
    }

    #[test]
    fn finfun_compose_examples() {
        let f = FinFun::new(2, vec![1, 0]).unwrap();
        let g = FinFun::new(1, vec![0, 0]).unwrap();
        assert_eq!(finfun_compose(&f, &g).unwrap().table(), &[0, 0]);
        assert_eq!(finfun_compose(&f, &FinFun::identity(2)).unwrap(), f);
        assert_eq!(finfun_compose(&FinFun::identity(2), &f).unwrap(), f);
        assert!(finfun_compose(&g, &g).is_err());
    }

    #[test]
    fn all_counts() {
        for m in 0..4 {
            for n in 0..4 {
                assert_eq!(FinFun::all(m, n).len(), n.pow(m as u32));
            }
        }
    }

    #[test]
    fn term_mor_map_examples() {
        let t = term_lawvere(TheoryPresentation::magma()).unwrap();
        assert_eq!(t.mor_map(&FinFun::identity(2)).unwrap(), identity_sub(2));
        let l = t.mor_map(&ii1(1, 1)).unwrap();
        assert_eq!(l, Sub::new(2, vec![Term::Var(0)]).unwrap());
        let f = FinFun::new(3, vec![2]).unwrap();
        assert_eq!(
            t.mor_map(&f).unwrap(),
            Sub::new(3, vec![Term::Var(2)]).unwrap()
        );
    }

    #[test]
    fn merge_examples() {
        let t = term_lawvere(TheoryPresentation::magma()).unwrap();
        let m = |a, b| Term::app("m", vec![a, b]);
        let u = Sub::new(1, vec![Term::Var(0)]).unwrap();
        let v = Sub::new(1, vec![m(Term::Var(0), Term::Var(0))]).unwrap();
        let w = t.merge(&u, &v).unwrap();
        assert_eq!(
            w,
            Sub::new(1, vec![Term::Var(0), m(Term::Var(0), Term::Var(0))]).unwrap()
        );
        assert_eq!(t.split(&w, 1, 1).unwrap(), (u.clone(), v.clone()));
        let empty = Sub::new(1, vec![]).unwrap();
        assert_eq!(t.merge(&empty, &v).unwrap(), v);
        assert!(t.merge(&identity_sub(2), &v).is_err());
    }

    #[test]
    fn free_magma_passes() {
        let t = term_lawvere(TheoryPresentation::magma()).unwrap();
        let report = verify_lawvere(&t, &ProbeSpec::default()).unwrap();
        assert!(report.all_pass(), "{report}");
    }

    struct Reflected(TermModel);

    impl Lawvere for Reflected {
        type Cat = TermModel;
        fn category(&self) -> &TermModel {
            &self.0
        }
        // Precompose with the reversal of stn(n): swaps the images of ii1 and ii2
        // when m = n.
        fn mor_map(&self, f: &FinFun) -> Result<Sub> {
            let n = f.n();
            Ok(Sub::projection(n, f.table().iter().map(|&i| n - 1 - i)))
        }
        fn merge(&self, u: &Sub, v: &Sub) -> Result<Sub> {
            self.0.merge(u, v)
        }
    }

    #[test]
    fn corrupted_mor_map_is_caught() {
        let t = Reflected(term_lawvere(TheoryPresentation::magma()).unwrap());
        let report = verify_lawvere(&t, &ProbeSpec::default()).unwrap();
        assert!(report.has_failure("L1"));
        let w = report.failures().next().unwrap().witness.clone().unwrap();
        assert!(!w.is_empty());
    }
}
