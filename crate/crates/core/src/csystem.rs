//! C-system structures (contextual categories) and the axiom suite A1–A8.
//!
//! | id | law                                                                  |
//! |----|----------------------------------------------------------------------|
//! | A1 | the only object of length 0 is `pt`                                  |
//! | A2 | `l(ft X) = l(X) - 1` for `l(X) > 0`, `ft(pt) = pt`                   |
//! | A3 | `pt` is final                                                        |
//! | A4 | `p_X : X -> ft X`, `p_pt = id`                                       |
//! | A5 | `l(f*X) = l(Y) + 1`, `ft(f*X) = Y`, `q(f,X) ∘ p_X = p_{f*X} ∘ f`     |
//! | A6 | `id*X = X`, `q(id, X) = id`                                          |
//! | A7 | `(g∘f)*X = g*(f*X)`, `q(g∘f, X) = q(g, f*X) ∘ q(f, X)`               |
//! | A8 | canonical squares are pullbacks; `s_f` is the section they determine |

use std::collections::HashSet;

use crate::category::{probe_homs, Category, MorOf};
use crate::error::{Error, Result};
use crate::report::{CheckReport, ProbeSpec, Tally};
use crate::term::{Sub, Term, TheoryPresentation};
use crate::term_model::TermModel;
use crate::theory::probe_pairs;

pub trait CSystem: Category {
    fn length(&self, x: &Self::Ob) -> usize;
    fn pt(&self) -> Self::Ob;
    fn ft(&self, x: &Self::Ob) -> Self::Ob;
    /// The display map `X -> ft X`.
    fn p(&self, x: &Self::Ob) -> Self::Mor;
    /// `f*X` for `f : Y -> ft X`, `l(X) > 0`.
    fn fstar(&self, f: &Self::Mor, x: &Self::Ob) -> Result<Self::Ob>;
    /// The top arrow `f*X -> X` of the canonical square over `f`.
    fn q(&self, f: &Self::Mor, x: &Self::Ob) -> Result<Self::Mor>;
    /// For `f : Y -> X` with `l(X) > 0`, the section `Y -> (f ∘ p_X)*X`.
    fn s(&self, f: &Self::Mor) -> Result<Self::Mor>;
    /// The unique morphism `X -> pt`.
    fn terminal(&self, x: &Self::Ob) -> Self::Mor;
    /// Objects of length at most `max_len` used as probes.
    fn probe_objects(&self, max_len: usize) -> Vec<Self::Ob>;
}

/// A C-system with exactly one object of each length.
pub trait LBijective: CSystem {
    /// `l⁻¹(n)`.
    fn object(&self, n: usize) -> Self::Ob;
}

/// The C-system of a presented theory, built from closed formulas.
pub fn term_csystem(pres: TheoryPresentation) -> Result<TermModel> {
    TermModel::new(pres)
}

fn need_positive(op: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition {
            op,
            detail: "object has length 0".into(),
        });
    }
    Ok(())
}

impl CSystem for TermModel {
    fn length(&self, x: &usize) -> usize {
        *x
    }

    fn pt(&self) -> usize {
        0
    }

    fn ft(&self, x: &usize) -> usize {
        x.saturating_sub(1)
    }

    fn p(&self, x: &usize) -> Sub {
        Sub::projection(*x, 0..x.saturating_sub(1))
    }

    fn fstar(&self, f: &Sub, x: &usize) -> Result<usize> {
        need_positive("fstar", *x)?;
        if f.cod() != x - 1 {
            return Err(Error::dims("fstar", format!("{f} does not land in ft({x})")));
        }
        Ok(f.dom() + 1)
    }

    fn q(&self, f: &Sub, x: &usize) -> Result<Sub> {
        let m = self.fstar(f, x)? - 1;
        let mut comps = f.components().to_vec();
        comps.push(Term::Var(m));
        Ok(Sub::new_unchecked(m + 1, comps))
    }

    fn s(&self, f: &Sub) -> Result<Sub> {
        need_positive("s", f.cod())?;
        let m = f.dom();
        let mut comps: Vec<Term> = (0..m).map(Term::Var).collect();
        comps.push(f.components()[f.cod() - 1].clone());
        Ok(Sub::new_unchecked(m, comps))
    }

    fn terminal(&self, x: &usize) -> Sub {
        Sub::new_unchecked(*x, Vec::new())
    }

    fn probe_objects(&self, max_len: usize) -> Vec<usize> {
        (0..=max_len).collect()
    }
}

impl LBijective for TermModel {
    fn object(&self, n: usize) -> usize {
        n
    }
}

fn same<C: Category>(c: &C, f: &C::Mor, g: &C::Mor) -> Result<bool> {
    if c.dom(f) != c.dom(g) || c.cod(f) != c.cod(g) {
        return Ok(false);
    }
    c.mor_eq(f, g)
}

/// The unique `h : Z -> f*X` with `h ∘ p_{f*X} = a` and `h ∘ q(f, X) = b`,
/// computed as `s_b ∘ q(a, f*X)`.
pub fn mediator<C: CSystem>(
    c: &C,
    a: &C::Mor,
    b: &C::Mor,
    f: &C::Mor,
    x: &C::Ob,
) -> Result<C::Mor> {
    need_positive("mediator", c.length(x))?;
    if c.cod(b) != *x || c.dom(a) != c.dom(b) || c.cod(a) != c.dom(f) || c.cod(f) != c.ft(x) {
        return Err(Error::dims(
            "mediator",
            format!(
                "a={} b={} f={} over X={}",
                c.show_mor(a),
                c.show_mor(b),
                c.show_mor(f),
                c.show_ob(x)
            ),
        ));
    }
    let af = c.compose(a, f)?;
    let bp = c.compose(b, &c.p(x))?;
    if !c.mor_eq(&af, &bp)? {
        return Err(Error::Precondition {
            op: "mediator",
            detail: format!(
                "square does not commute: a∘f = {}, b∘p_X = {}",
                c.show_mor(&af),
                c.show_mor(&bp)
            ),
        });
    }
    let fx = c.fstar(f, x)?;
    c.compose(&c.s(b)?, &c.q(a, &fx)?)
}

/// Evaluates A1–A8 on the probe objects of `c` up to `probe.max_n`.
pub fn check_csystem<C: CSystem>(c: &C, probe: &ProbeSpec) -> Result<CheckReport> {
    let objs = c.probe_objects(probe.max_n);
    let positive: Vec<&C::Ob> = objs.iter().filter(|x| c.length(x) > 0).collect();
    let mut report = CheckReport::new();
    let show = |x: &C::Ob| c.show_ob(x);

    // A1
    let mut t = Tally::new("A1 unique object of length 0", "all probes");
    let pt = c.pt();
    t.case(Ok(c.length(&pt) == 0), || format!("l(pt) = {}", c.length(&pt)))?;
    for x in objs.iter().filter(|x| c.length(x) == 0) {
        t.case(Ok(*x == pt), || format!("{} has length 0", show(x)))?;
    }
    report.add(t);

    // A2, A4
    let mut a2 = Tally::new("A2 ft lowers length", "all probes");
    let mut a4 = Tally::new("A4 display maps", "all probes");
    a2.case(Ok(c.ft(&pt) == pt), || "ft(pt) != pt".into())?;
    a4.case(same(c, &c.p(&pt), &c.id(&pt)), || "p_pt != id".into())?;
    for x in &positive {
        a2.case(Ok(c.length(&c.ft(x)) + 1 == c.length(x)), || {
            format!("X={}", show(x))
        })?;
        let p = c.p(x);
        a4.case(Ok(c.dom(&p) == **x && c.cod(&p) == c.ft(x)), || {
            format!("p_X={} for X={}", c.show_mor(&p), show(x))
        })?;
    }
    report.add(a2);
    report.add(a4);

    // A3
    for y in &objs {
        let mut t = Tally::new("A3 pt is final", format!("Y={}", show(y)));
        let bang = c.terminal(y);
        t.case(Ok(c.dom(&bang) == *y && c.cod(&bang) == pt), || {
            format!("terminal({}) = {}", show(y), c.show_mor(&bang))
        })?;
        if let Some(all) = c.hom_set(y, &pt, probe.exhaustive_cap) {
            t.case(
                Ok(all.len() == 1 && same(c, &all[0], &bang)?),
                || format!("|Hom({}, pt)| = {}", show(y), all.len()),
            )?;
        }
        if c.length(y) > 0 {
            let via_ft = c.compose(&c.p(y), &c.terminal(&c.ft(y)));
            t.case(via_ft.and_then(|v| same(c, &v, &bang)), || {
                format!("terminal({}) != p ∘ terminal(ft)", show(y))
            })?;
        }
        report.add(t);
    }

    // (Y, X) pairs are thinned to an even spread when there are many.
    let pair_stride = (objs.len() * positive.len())
        .div_ceil(probe.samples.max(1) * 4)
        .max(1);
    let mut pair_index = 0;
    for x in &positive {
        let ftx = c.ft(x);
        // A6
        let mut t = Tally::new("A6 identity pullback", format!("X={}", show(x)));
        let id = c.id(&ftx);
        t.case(c.fstar(&id, x).map(|fx| fx == **x), || {
            format!("id*X != X for X={}", show(x))
        })?;
        t.case(c.q(&id, x).and_then(|q| same(c, &q, &c.id(x))), || {
            format!("q(id, X) != id for X={}", show(x))
        })?;
        report.add(t);

        for y in &objs {
            pair_index += 1;
            if (pair_index - 1) % pair_stride != 0 {
                continue;
            }
            let inst = format!("Y={} X={}", show(y), show(x));
            let mut rng = probe.rng(&format!("A5 {inst}"));
            let fs = probe_homs(c, y, &ftx, probe.samples, probe.depth, &mut rng);
            // A5
            let mut t = Tally::new("A5 canonical square", inst.clone());
            for f in &fs {
                t.case(check_square(c, f, x, y), || {
                    format!("f={} X={}", c.show_mor(f), show(x))
                })?;
            }
            report.add(t);

            // A8, section part
            let gs = probe_homs(c, y, x, probe.samples, probe.depth, &mut rng);
            let mut t = Tally::new("A8 section", inst.clone());
            for g in &gs {
                t.case(check_section(c, g, x, probe), || {
                    format!("f={} X={}", c.show_mor(g), show(x))
                })?;
            }
            report.add(t);
        }
    }

    // Triples: sampled when there are many objects.
    let mut triples = Vec::new();
    for z in &objs {
        for y in &objs {
            for x in &positive {
                triples.push((z, y, *x));
            }
        }
    }
    if triples.len() > probe.samples {
        let stride = triples.len().div_ceil(probe.samples.max(1));
        triples = triples.into_iter().step_by(stride).collect();
    }
    let mut work = probe.pullback_work;
    for (z, y, x) in triples {
        let inst = format!("Z={} Y={} X={}", show(z), show(y), show(x));
        let ftx = c.ft(x);
        let mut rng = probe.rng(&format!("A7 {inst}"));
        let gs = probe_homs(c, z, y, probe.samples, probe.depth, &mut rng);
        let fs = probe_homs(c, y, &ftx, probe.samples, probe.depth, &mut rng);

        let mut t = Tally::new("A7 pullback composition", inst.clone());
        for (g, f) in probe_pairs(&gs, &fs, probe.samples) {
            t.case(check_q_composition(c, g, f, x), || {
                format!("g={} f={} X={}", c.show_mor(g), c.show_mor(f), show(x))
            })?;
        }
        report.add(t);

        let mut ex = Tally::new("A8 pullback (exhaustive)", inst.clone());
        let mut rec = Tally::new("A8 pullback (recovery)", inst.clone());
        for f in &fs {
            let fx = match c.fstar(f, x) {
                Ok(fx) => fx,
                Err(e) => {
                    rec.case(Err(e), || format!("f={}", c.show_mor(f)))?;
                    continue;
                }
            };
            if let Some(outcome) = exhaustive_pullback(c, z, y, x, f, &fx, probe, &mut work)? {
                ex.case(outcome, || {
                    format!("f={} X={} Z={}", c.show_mor(f), show(x), show(z))
                })?;
            } else {
                let hs = probe_homs(c, z, &fx, probe.samples.min(8), probe.depth, &mut rng);
                for h in &hs {
                    rec.case(check_recovery(c, h, f, x, &fx), || {
                        format!("h={} f={} X={}", c.show_mor(h), c.show_mor(f), show(x))
                    })?;
                }
            }
        }
        if ex.cases() > 0 {
            report.add(ex);
        }
        if rec.cases() > 0 {
            report.add(rec);
        }
    }

    Ok(report.sorted())
}

fn check_square<C: CSystem>(c: &C, f: &C::Mor, x: &C::Ob, y: &C::Ob) -> Result<bool> {
    let fx = c.fstar(f, x)?;
    if c.length(&fx) != c.length(y) + 1 || c.ft(&fx) != *y {
        return Ok(false);
    }
    let q = c.q(f, x)?;
    if c.dom(&q) != fx || c.cod(&q) != *x {
        return Err(Error::dims(
            "q",
            format!("q(f,X) = {} is not f*X -> X", c.show_mor(&q)),
        ));
    }
    let top = c.compose(&q, &c.p(x))?;
    let bottom = c.compose(&c.p(&fx), f)?;
    same(c, &top, &bottom)
}

fn check_q_composition<C: CSystem>(c: &C, g: &C::Mor, f: &C::Mor, x: &C::Ob) -> Result<bool> {
    let gf = c.compose(g, f)?;
    let fx = c.fstar(f, x)?;
    if c.fstar(&gf, x)? != c.fstar(g, &fx)? {
        return Ok(false);
    }
    let lhs = c.q(&gf, x)?;
    let rhs = c.compose(&c.q(g, &fx)?, &c.q(f, x)?)?;
    same(c, &lhs, &rhs)
}

fn check_section<C: CSystem>(c: &C, f: &C::Mor, x: &C::Ob, probe: &ProbeSpec) -> Result<bool> {
    let y = c.dom(f);
    let fp = c.compose(f, &c.p(x))?;
    let target = c.fstar(&fp, x)?;
    let sf = c.s(f)?;
    if c.dom(&sf) != y || c.cod(&sf) != target {
        return Ok(false);
    }
    let qfp = c.q(&fp, x)?;
    let satisfies = |h: &C::Mor| -> Result<bool> {
        Ok(same(c, &c.compose(h, &c.p(&target))?, &c.id(&y))?
            && same(c, &c.compose(h, &qfp)?, f)?)
    };
    if !satisfies(&sf)? {
        return Ok(false);
    }
    if let Some(all) = c.hom_set(&y, &target, probe.exhaustive_cap) {
        let mut count = 0;
        for h in &all {
            if satisfies(h)? {
                count += 1;
            }
        }
        return Ok(count == 1);
    }
    Ok(true)
}

/// `h` is recovered as the mediator of its own projections.
fn check_recovery<C: CSystem>(
    c: &C,
    h: &C::Mor,
    f: &C::Mor,
    x: &C::Ob,
    fx: &C::Ob,
) -> Result<bool> {
    let a = c.compose(h, &c.p(fx))?;
    let b = c.compose(h, &c.q(f, x)?)?;
    let back = mediator(c, &a, &b, f, x)?;
    same(c, &back, h)
}

/// Exhaustive pullback check for one square: `h ↦ (h∘p, h∘q)` is a bijection
/// from `Hom(Z, f*X)` onto the commuting pairs, and the mediator formula
/// picks the unique preimage. Returns `None` when the hom-sets are too large
/// or the work budget is spent.
#[allow(clippy::too_many_arguments)]
fn exhaustive_pullback<C: CSystem>(
    c: &C,
    z: &C::Ob,
    y: &C::Ob,
    x: &C::Ob,
    f: &C::Mor,
    fx: &C::Ob,
    probe: &ProbeSpec,
    work: &mut u64,
) -> Result<Option<Result<bool>>> {
    let cap = probe.exhaustive_cap;
    let (Some(ca), Some(cb)) = (c.hom_count(z, y), c.hom_count(z, x)) else {
        return Ok(None);
    };
    let pairs = ca.saturating_mul(cb);
    if ca > cap as u128 || cb > cap as u128 || pairs > *work as u128 {
        return Ok(None);
    }
    let Some(hs) = c.hom_set(z, fx, cap) else {
        return Ok(None);
    };
    *work -= pairs as u64;
    let (as_, bs) = (
        c.hom_set(z, y, cap).expect("counted"),
        c.hom_set(z, x, cap).expect("counted"),
    );
    let q = c.q(f, x)?;
    let pfx = c.p(fx);
    let px = c.p(x);

    let mut images = HashSet::new();
    for h in &hs {
        let a = c.canon(&c.compose(h, &pfx)?)?;
        let b = c.canon(&c.compose(h, &q)?)?;
        if !images.insert((a, b)) {
            return Ok(Some(Ok(false)));
        }
    }
    let bps: Vec<MorOf<C>> = bs
        .iter()
        .map(|b| c.compose(b, &px).and_then(|m| c.canon(&m)))
        .collect::<Result<_>>()?;
    let mut commuting = 0usize;
    for a in &as_ {
        let af = c.canon(&c.compose(a, f)?)?;
        for (b, bp) in bs.iter().zip(&bps) {
            if af != *bp {
                continue;
            }
            commuting += 1;
            if !images.contains(&(c.canon(a)?, c.canon(b)?)) {
                return Ok(Some(Ok(false)));
            }
            let h = mediator(c, a, b, f, x)?;
            let ok = same(c, &c.compose(&h, &pfx)?, a)? && same(c, &c.compose(&h, &q)?, b)?;
            if !ok {
                return Ok(Some(Ok(false)));
            }
        }
    }
    Ok(Some(Ok(commuting == hs.len())))
}
