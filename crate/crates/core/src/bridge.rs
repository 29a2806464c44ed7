//! Translations between Lawvere theory structures and l-bijective C-systems,
//! theory morphisms given by operation assignments, and round-trip checks.
//!
//! [`lc`] reads a C-system off a Lawvere structure: `p_n = L(ii1(n-1, 1))`,
//! `f*X` has length `l(Y) + 1`, and `q`, `s` are push-out mediators. [`cl`]
//! goes back using only the abstract C-system operations: projections
//! [`pi`] are built by induction and `L_f` ([`cl_mor`]) by pullback
//! mediators.

use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::category::{probe_homs, Category, MorOf, ObOf};
use crate::csystem::{mediator, CSystem, LBijective};
use crate::error::{Error, Result};
use crate::report::{CheckReport, ProbeSpec, Tally};
use crate::term::{apply_sub, check_term, Sub, Term, TheoryPresentation};
use crate::term_model::TermModel;
use crate::theory::{finfun_compose, ii1, ii2, probe_pairs, FinFun, Lawvere};

fn same<C: Category>(c: &C, f: &C::Mor, g: &C::Mor) -> Result<bool> {
    if c.dom(f) != c.dom(g) || c.cod(f) != c.cod(g) {
        return Ok(false);
    }
    c.mor_eq(f, g)
}

// ---------------------------------------------------------------------------
// LC

/// The C-system determined by a Lawvere structure.
#[derive(Debug, Clone)]
pub struct LcSystem<L> {
    lw: L,
}

pub fn lc<L: Lawvere>(lw: L) -> LcSystem<L> {
    LcSystem { lw }
}

impl<L: Lawvere> LcSystem<L> {
    pub fn lawvere(&self) -> &L {
        &self.lw
    }

    fn structure(&self, f: &FinFun) -> MorOf<L::Cat> {
        self.lw
            .mor_map(f)
            .unwrap_or_else(|e| panic!("structure map undefined on {f}: {e}"))
    }
}

impl<L: Lawvere> Category for LcSystem<L> {
    type Ob = usize;
    type Mor = MorOf<L::Cat>;

    fn dom(&self, f: &Self::Mor) -> usize {
        self.lw.category().dom(f)
    }

    fn cod(&self, f: &Self::Mor) -> usize {
        self.lw.category().cod(f)
    }

    fn id(&self, x: &usize) -> Self::Mor {
        self.lw.category().id(x)
    }

    fn compose(&self, f: &Self::Mor, g: &Self::Mor) -> Result<Self::Mor> {
        self.lw.category().compose(f, g)
    }

    fn canon(&self, f: &Self::Mor) -> Result<Self::Mor> {
        self.lw.category().canon(f)
    }

    fn mor_eq(&self, f: &Self::Mor, g: &Self::Mor) -> Result<bool> {
        self.lw.category().mor_eq(f, g)
    }

    fn hom_count(&self, x: &usize, y: &usize) -> Option<u128> {
        self.lw.category().hom_count(x, y)
    }

    fn hom_set(&self, x: &usize, y: &usize, cap: u64) -> Option<Vec<Self::Mor>> {
        self.lw.category().hom_set(x, y, cap)
    }

    fn sample_hom(
        &self,
        x: &usize,
        y: &usize,
        depth: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<Self::Mor> {
        self.lw.category().sample_hom(x, y, depth, rng)
    }

    fn show_ob(&self, x: &usize) -> String {
        self.lw.category().show_ob(x)
    }

    fn show_mor(&self, f: &Self::Mor) -> String {
        self.lw.category().show_mor(f)
    }
}

impl<L: Lawvere> CSystem for LcSystem<L> {
    fn length(&self, x: &usize) -> usize {
        *x
    }

    fn pt(&self) -> usize {
        0
    }

    fn ft(&self, x: &usize) -> usize {
        x.saturating_sub(1)
    }

    fn p(&self, x: &usize) -> Self::Mor {
        if *x == 0 {
            return self.id(x);
        }
        self.structure(&ii1(x - 1, 1))
    }

    fn fstar(&self, f: &Self::Mor, x: &usize) -> Result<usize> {
        if *x == 0 {
            return Err(Error::Precondition {
                op: "fstar",
                detail: "object has length 0".into(),
            });
        }
        if self.cod(f) + 1 != *x {
            return Err(Error::dims(
                "fstar",
                format!("{} does not land in ft({x})", self.show_mor(f)),
            ));
        }
        Ok(self.dom(f) + 1)
    }

    /// `merge(p ∘ f, L(ii2(m, 1)))`.
    fn q(&self, f: &Self::Mor, x: &usize) -> Result<Self::Mor> {
        let m = self.fstar(f, x)? - 1;
        let head = self.compose(&self.p(&(m + 1)), f)?;
        self.lw.merge(&head, &self.lw.mor_map(&ii2(m, 1))?)
    }

    /// `merge(id, f ∘ L(ii2(n-1, 1)))`.
    fn s(&self, f: &Self::Mor) -> Result<Self::Mor> {
        let n = self.cod(f);
        if n == 0 {
            return Err(Error::Precondition {
                op: "s",
                detail: "object has length 0".into(),
            });
        }
        let m = self.dom(f);
        let last = self.compose(f, &self.lw.mor_map(&ii2(n - 1, 1))?)?;
        self.lw.merge(&self.id(&m), &last)
    }

    fn terminal(&self, x: &usize) -> Self::Mor {
        self.structure(&FinFun::empty(*x))
    }

    fn probe_objects(&self, max_len: usize) -> Vec<usize> {
        (0..=max_len).collect()
    }
}

impl<L: Lawvere> LBijective for LcSystem<L> {
    fn object(&self, n: usize) -> usize {
        n
    }
}

// ---------------------------------------------------------------------------
// CL

/// `π^n_i : l⁻¹(n) -> l⁻¹(1)`, the `i`-th projection.
pub fn pi<C: LBijective>(c: &C, n: usize, i: usize) -> Result<C::Mor> {
    if i >= n {
        return Err(Error::OutOfRange {
            what: "projection index",
            index: i,
            size: n,
        });
    }
    // π^{i+1}_i is the top projection; higher levels prepend display maps.
    let mut acc = if i == 0 {
        c.id(&c.object(1))
    } else {
        c.q(&c.terminal(&c.object(i)), &c.object(1))?
    };
    for level in i + 2..=n {
        acc = c.compose(&c.p(&c.object(level)), &acc)?;
    }
    Ok(acc)
}

/// `L_f : l⁻¹(n) -> l⁻¹(m)` for `f : stn(m) -> stn(n)`.
pub fn cl_mor<C: LBijective>(c: &C, f: &FinFun) -> Result<C::Mor> {
    let (m, n) = (f.m(), f.n());
    match m {
        0 => Ok(c.terminal(&c.object(n))),
        1 => pi(c, n, f.apply(0)),
        _ => {
            let a = cl_mor(c, &finfun_compose(&ii1(m - 1, 1), f)?)?;
            let b = cl_mor(c, &finfun_compose(&ii2(m - 1, 1), f)?)?;
            mediator(c, &a, &b, &c.terminal(&c.object(m - 1)), &c.object(1))
        }
    }
}

/// The Lawvere structure determined by an l-bijective C-system.
#[derive(Debug, Clone)]
pub struct ClTheory<C> {
    cs: C,
}

pub fn cl<C: LBijective<Ob = usize>>(cs: C) -> ClTheory<C> {
    ClTheory { cs }
}

impl<C: LBijective<Ob = usize>> ClTheory<C> {
    pub fn csystem(&self) -> &C {
        &self.cs
    }
}

impl<C: LBijective<Ob = usize>> Lawvere for ClTheory<C> {
    type Cat = C;

    fn category(&self) -> &C {
        &self.cs
    }

    fn mor_map(&self, f: &FinFun) -> Result<C::Mor> {
        cl_mor(&self.cs, f)
    }

    /// Appends the components of `v` one at a time, each step a pullback
    /// mediator over `terminal`.
    fn merge(&self, u: &C::Mor, v: &C::Mor) -> Result<C::Mor> {
        let c = &self.cs;
        if c.dom(u) != c.dom(v) {
            return Err(Error::dims(
                "merge",
                format!("{} and {} have different domains", c.show_mor(u), c.show_mor(v)),
            ));
        }
        let b = c.length(&c.cod(v));
        if b == 0 {
            return Ok(u.clone());
        }
        let vb = c.object(b);
        let init = c.compose(v, &c.p(&vb))?;
        let last = c.compose(v, &pi(c, b, b - 1)?)?;
        let w = self.merge(u, &init)?;
        let base = c.terminal(&c.cod(&w));
        mediator(c, &w, &last, &base, &c.object(1))
    }
}

// ---------------------------------------------------------------------------
// Comparisons

/// Field-by-field comparison of two C-systems on the objects and sampled
/// morphisms of `a`.
pub fn compare_csystems<A, B>(a: &A, b: &B, probe: &ProbeSpec) -> Result<CheckReport>
where
    A: CSystem,
    B: CSystem<Ob = A::Ob, Mor = A::Mor>,
{
    let objs = a.probe_objects(probe.max_n);
    let mut report = CheckReport::new();

    let mut t = Tally::new("S1 pt, length, ft", "all probes");
    t.case(Ok(a.pt() == b.pt()), || "pt differs".into())?;
    for x in &objs {
        t.case(
            Ok(a.length(x) == b.length(x) && a.ft(x) == b.ft(x)),
            || format!("X={}", a.show_ob(x)),
        )?;
    }
    report.add(t);

    let mut tp = Tally::new("S2 p", "all probes");
    let mut tt = Tally::new("S3 terminal", "all probes");
    for x in &objs {
        tp.case(same(a, &a.p(x), &b.p(x)), || {
            format!("X={}: {} vs {}", a.show_ob(x), a.show_mor(&a.p(x)), a.show_mor(&b.p(x)))
        })?;
        tt.case(same(a, &a.terminal(x), &b.terminal(x)), || {
            format!("X={}", a.show_ob(x))
        })?;
    }
    report.add(tp);
    report.add(tt);

    for x in objs.iter().filter(|x| a.length(x) > 0) {
        let ftx = a.ft(x);
        let mut tq = Tally::new("S4 fstar and q", format!("X={}", a.show_ob(x)));
        let mut ts = Tally::new("S5 s", format!("X={}", a.show_ob(x)));
        for y in &objs {
            let mut rng = probe.rng(&format!("compare {} {}", a.show_ob(y), a.show_ob(x)));
            for f in probe_homs(a, y, &ftx, probe.samples, probe.depth, &mut rng) {
                tq.case(
                    (|| {
                        Ok(a.fstar(&f, x)? == b.fstar(&f, x)?
                            && same(a, &a.q(&f, x)?, &b.q(&f, x)?)?)
                    })(),
                    || format!("f={} X={}", a.show_mor(&f), a.show_ob(x)),
                )?;
            }
            for g in probe_homs(a, y, x, probe.samples, probe.depth, &mut rng) {
                ts.case(
                    (|| same(a, &a.s(&g)?, &b.s(&g)?))(),
                    || format!("f={}", a.show_mor(&g)),
                )?;
            }
        }
        report.add(tq);
        report.add(ts);
    }
    Ok(report.sorted())
}

/// Extensional comparison of two Lawvere structures, reading morphisms of
/// `b` in `a` through `conv`.
pub fn compare_lawvere_with<A, B, F>(a: &A, b: &B, probe: &ProbeSpec, conv: F) -> Result<CheckReport>
where
    A: Lawvere,
    B: Lawvere,
    F: Fn(&MorOf<B::Cat>) -> Result<MorOf<A::Cat>>,
{
    let (ca, cb) = (a.category(), b.category());
    let mut report = CheckReport::new();

    let mut t = Tally::new("T1 object map", "all probes");
    for n in 0..=probe.max_n {
        let id = FinFun::identity(n);
        t.case(
            (|| {
                let (ia, ib) = (a.mor_map(&id)?, b.mor_map(&id)?);
                Ok(ca.dom(&ia) == n && cb.dom(&ib) == n && same(ca, &conv(&ib)?, &ca.id(&n))?)
            })(),
            || format!("n={n}"),
        )?;
    }
    report.add(t);

    for m in 0..=probe.max_fun {
        for n in 0..=probe.max_fun {
            let mut t = Tally::new("T2 mor_map", format!("{m}->{n}"));
            for f in FinFun::all(m, n) {
                t.case(
                    (|| same(ca, &a.mor_map(&f)?, &conv(&b.mor_map(&f)?)?))(),
                    || format!("f={f}"),
                )?;
            }
            report.add(t);
        }
    }

    let bound = probe.max_n.min(3);
    for k in 0..=bound {
        let mut t = Tally::new("T3 merge", format!("k={k}"));
        for m in 0..=bound {
            for n in 0..=bound - m {
                let mut rng = probe.rng(&format!("merge {k} {m} {n}"));
                let us = probe_homs(cb, &k, &m, probe.samples, probe.depth, &mut rng);
                let vs = probe_homs(cb, &k, &n, probe.samples, probe.depth, &mut rng);
                for (u, v) in probe_pairs(&us, &vs, probe.samples) {
                    t.case(
                        (|| {
                            let lhs = a.merge(&conv(u)?, &conv(v)?)?;
                            same(ca, &lhs, &conv(&b.merge(u, v)?)?)
                        })(),
                        || format!("u={} v={}", cb.show_mor(u), cb.show_mor(v)),
                    )?;
                }
            }
        }
        report.add(t);
    }
    Ok(report.sorted())
}

pub fn compare_lawvere<A, B>(a: &A, b: &B, probe: &ProbeSpec) -> Result<CheckReport>
where
    A: Lawvere,
    B: Lawvere,
    B::Cat: Category<Mor = MorOf<A::Cat>>,
{
    compare_lawvere_with(a, b, probe, |f| Ok(f.clone()))
}

/// `cl(lc(L))` against `L`.
pub fn roundtrip_lawvere<L: Lawvere + Clone>(lw: &L, probe: &ProbeSpec) -> Result<CheckReport> {
    let back = cl(lc(lw.clone()));
    compare_lawvere(lw, &back, probe)
}

/// `lc(cl(C))` against `C`.
pub fn roundtrip_csystem<C>(cs: &C, probe: &ProbeSpec) -> Result<CheckReport>
where
    C: LBijective<Ob = usize> + Clone,
{
    let back = lc(cl(cs.clone()));
    compare_csystems(cs, &back, probe)
}

/// `L_f ∘ π^m_i = π^n_{f(i)}` for every finite function with `m, n ≤ max`.
pub fn check_projection_compat<C: LBijective>(c: &C, max: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    for m in 1..=max {
        for n in 1..=max {
            let mut t = Tally::new("P1 projections", format!("{m}->{n}"));
            for f in FinFun::all(m, n) {
                let lf = cl_mor(c, &f)?;
                for i in 0..m {
                    t.case(
                        (|| same(c, &c.compose(&lf, &pi(c, m, i)?)?, &pi(c, n, f.apply(i))?))(),
                        || format!("f={f} i={i}"),
                    )?;
                }
            }
            report.add(t);
        }
    }
    Ok(report)
}

/// Morphisms `n -> m` agreeing after every `π^m_i` are equal; checked by
/// enumerating each hom-set with at most `cap` elements.
pub fn check_joint_monicity<C: LBijective>(c: &C, max: usize, cap: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    for n in 0..=max {
        for m in 0..=max {
            let (src, dst) = (c.object(n), c.object(m));
            let Some(all) = c.hom_set(&src, &dst, cap) else {
                continue;
            };
            let pis = (0..m).map(|i| pi(c, m, i)).collect::<Result<Vec<_>>>()?;
            let mut t = Tally::new("P2 joint monicity", format!("{n}->{m}"));
            let mut seen: HashMap<Vec<C::Mor>, C::Mor> = HashMap::new();
            for f in &all {
                let key = pis
                    .iter()
                    .map(|p| c.compose(f, p).and_then(|g| c.canon(&g)))
                    .collect::<Result<Vec<_>>>()?;
                let clash = seen.insert(key, f.clone());
                t.case(
                    match &clash {
                        Some(g) => same(c, f, g),
                        None => Ok(true),
                    },
                    || {
                        format!(
                            "{} and {} agree on all projections",
                            c.show_mor(f),
                            clash.as_ref().map(|g| c.show_mor(g)).unwrap_or_default()
                        )
                    },
                )?;
            }
            report.add(t);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Homomorphisms

/// A map of C-systems between l-bijective systems.
pub trait CsHomomorphism {
    type Source: LBijective;
    type Target: LBijective;

    fn source(&self) -> &Self::Source;
    fn target(&self) -> &Self::Target;
    fn ob(&self, x: &ObOf<Self::Source>) -> ObOf<Self::Target>;
    fn mor(&self, f: &MorOf<Self::Source>) -> Result<MorOf<Self::Target>>;
}

/// H0 functoriality, H1 length, H2 `pt`, H3 `ft`, H4 `p`, H5 `f*` and `q`
/// on `probe.samples` seeded `(f, X)`, and preservation of `π^n_i`.
pub fn check_cs_homomorphism<H: CsHomomorphism>(h: &H, probe: &ProbeSpec) -> Result<CheckReport> {
    let (s, t) = (h.source(), h.target());
    let objs = s.probe_objects(probe.max_n);
    let positive: Vec<&ObOf<H::Source>> = objs.iter().filter(|x| s.length(x) > 0).collect();
    let mut report = CheckReport::new();

    let mut h0 = Tally::new("H0 functor", "all probes");
    let mut h1 = Tally::new("H1 length", "all probes");
    let mut h3 = Tally::new("H3 ft", "all probes");
    let mut h4 = Tally::new("H4 p", "all probes");
    for x in &objs {
        let hx = h.ob(x);
        h0.case(h.mor(&s.id(x)).and_then(|m| same(t, &m, &t.id(&hx))), || {
            format!("H(id) != id at X={}", s.show_ob(x))
        })?;
        h1.case(Ok(t.length(&hx) == s.length(x)), || format!("X={}", s.show_ob(x)))?;
        h3.case(Ok(h.ob(&s.ft(x)) == t.ft(&hx)), || format!("X={}", s.show_ob(x)))?;
        h4.case(h.mor(&s.p(x)).and_then(|m| same(t, &m, &t.p(&hx))), || {
            format!("X={}", s.show_ob(x))
        })?;
    }
    let mut rng = probe.rng("H0 composition");
    for _ in 0..probe.samples {
        let pick = |rng: &mut ChaCha8Rng| &objs[rng.gen_range(0..objs.len())];
        let (z, y, x) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let gs = probe_homs(s, z, y, 1, probe.depth, &mut rng);
        let fs = probe_homs(s, y, x, 1, probe.depth, &mut rng);
        if let (Some(g), Some(f)) = (gs.first(), fs.first()) {
            h0.case(
                (|| {
                    let lhs = h.mor(&s.compose(g, f)?)?;
                    same(t, &lhs, &t.compose(&h.mor(g)?, &h.mor(f)?)?)
                })(),
                || format!("g={} f={}", s.show_mor(g), s.show_mor(f)),
            )?;
        }
    }
    report.add(h0);
    report.add(h1);
    let mut h2 = Tally::new("H2 pt", "all probes");
    h2.case(Ok(h.ob(&s.pt()) == t.pt()), || "H(pt) != pt".into())?;
    report.add(h2);
    report.add(h3);
    report.add(h4);

    let mut h5 = Tally::new("H5 q", "sampled (f,X)");
    let mut rng = probe.rng("H5 q");
    let mut drawn = 0;
    let mut attempts = 0;
    while drawn < probe.samples && attempts < probe.samples * 10 && !positive.is_empty() {
        attempts += 1;
        let x = positive[rng.gen_range(0..positive.len())];
        let y = &objs[rng.gen_range(0..objs.len())];
        let Some(f) = probe_homs(s, y, &s.ft(x), 1, probe.depth, &mut rng).pop() else {
            continue;
        };
        drawn += 1;
        h5.case(
            (|| {
                let hf = h.mor(&f)?;
                let hx = h.ob(x);
                Ok(h.ob(&s.fstar(&f, x)?) == t.fstar(&hf, &hx)?
                    && same(t, &h.mor(&s.q(&f, x)?)?, &t.q(&hf, &hx)?)?)
            })(),
            || format!("f={} X={}", s.show_mor(&f), s.show_ob(x)),
        )?;
    }
    report.add(h5);

    let mut hp = Tally::new("H6 projections", "all probes");
    for n in 1..=probe.max_n {
        hp.case(Ok(h.ob(&s.object(n)) == t.object(n)), || format!("H(l⁻¹({n}))"))?;
        for i in 0..n {
            hp.case(
                (|| same(t, &h.mor(&pi(s, n, i)?)?, &pi(t, n, i)?))(),
                || format!("pi({n},{i})"),
            )?;
        }
    }
    report.add(hp);
    Ok(report.sorted())
}

/// The identity homomorphism of a C-system.
#[derive(Debug, Clone)]
pub struct Identity<C>(pub C);

impl<C: LBijective> CsHomomorphism for Identity<C> {
    type Source = C;
    type Target = C;

    fn source(&self) -> &C {
        &self.0
    }

    fn target(&self) -> &C {
        &self.0
    }

    fn ob(&self, x: &C::Ob) -> C::Ob {
        x.clone()
    }

    fn mor(&self, f: &C::Mor) -> Result<C::Mor> {
        Ok(f.clone())
    }
}

// ---------------------------------------------------------------------------
// Operation assignments

/// A morphism of presented theories: each source operation of arity `r`
/// goes to a target term in `r` variables.
#[derive(Debug, Clone)]
pub struct OpAssignment {
    source: TermModel,
    target: TermModel,
    images: Arc<IndexMap<String, Term>>,
}

impl OpAssignment {
    /// Checks that every source operation has a well-formed image; equations
    /// are checked separately by [`OpAssignment::check_equations`].
    pub fn new(
        source: TheoryPresentation,
        target: TheoryPresentation,
        images: IndexMap<String, Term>,
    ) -> Result<Self> {
        let source = TermModel::new(source)?;
        let target = TermModel::new(target)?;
        Self::from_models(source, target, images)
    }

    fn from_models(
        source: TermModel,
        target: TermModel,
        images: IndexMap<String, Term>,
    ) -> Result<Self> {
        let sig = &source.presentation().signature;
        for name in images.keys() {
            if sig.arity(name).is_none() {
                return Err(Error::UnknownOp(name.clone()));
            }
        }
        let mut ordered = IndexMap::new();
        for (op, arity) in sig.ops() {
            let image = images.get(op).ok_or_else(|| Error::InvalidPresentation(format!(
                "operation `{op}` has no image"
            )))?;
            check_term(image, &target.presentation().signature, arity)?;
            ordered.insert(op.to_string(), image.clone());
        }
        Ok(OpAssignment {
            source,
            target,
            images: Arc::new(ordered),
        })
    }

    pub fn identity(pres: TheoryPresentation) -> Result<Self> {
        let model = TermModel::new(pres)?;
        let images = model
            .presentation()
            .signature
            .ops()
            .map(|(op, r)| (op.to_string(), Term::app(op, (0..r).map(Term::Var).collect())))
            .collect();
        Self::from_models(model.clone(), model, images)
    }

    pub fn source(&self) -> &TermModel {
        &self.source
    }

    pub fn target(&self) -> &TermModel {
        &self.target
    }

    pub fn image(&self, op: &str) -> Option<&Term> {
        self.images.get(op)
    }

    pub fn images(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.images.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Replaces every operation by its image, in context `ctx`.
    pub fn translate_term(&self, t: &Term, ctx: usize) -> Result<Term> {
        match t {
            Term::Var(i) => {
                if *i >= ctx {
                    return Err(Error::MalformedTerm {
                        term: t.to_string(),
                        ctx,
                    });
                }
                Ok(t.clone())
            }
            Term::App(op, args) => {
                let image = self.images.get(op).ok_or_else(|| Error::UnknownOp(op.clone()))?;
                let args = args
                    .iter()
                    .map(|a| self.translate_term(a, ctx))
                    .collect::<Result<Vec<_>>>()?;
                apply_sub(image, &Sub::new(ctx, args)?)
            }
        }
    }

    pub fn translate_sub(&self, f: &Sub) -> Result<Sub> {
        let comps = f
            .components()
            .iter()
            .map(|t| self.translate_term(t, f.dom()))
            .collect::<Result<Vec<_>>>()?;
        Sub::new(f.dom(), comps)
    }

    /// Diagrammatic composite: `self`, then `next`.
    pub fn then(&self, next: &OpAssignment) -> Result<OpAssignment> {
        if self.target.presentation() != next.source.presentation() {
            return Err(Error::dims(
                "assignment composition",
                format!(
                    "target {} is not source {}",
                    self.target.presentation().name,
                    next.source.presentation().name
                ),
            ));
        }
        let sig = &self.source.presentation().signature;
        let images = self
            .images
            .iter()
            .map(|(op, t)| {
                let r = sig.arity(op).expect("validated");
                Ok((op.clone(), next.translate_term(t, r)?))
            })
            .collect::<Result<IndexMap<_, _>>>()?;
        Self::from_models(self.source.clone(), next.target.clone(), images)
    }

    /// Whether both assignments send every operation to equal terms in the
    /// target theory.
    pub fn same_images(&self, other: &OpAssignment) -> Result<bool> {
        if self.images.len() != other.images.len() {
            return Ok(false);
        }
        let sig = &self.source.presentation().signature;
        for (op, t) in self.images.iter() {
            let Some(u) = other.images.get(op) else {
                return Ok(false);
            };
            let r = sig.arity(op).expect("validated");
            let (f, g) = (Sub::new(r, vec![t.clone()])?, Sub::new(r, vec![u.clone()])?);
            if !self.target.mor_eq(&f, &g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// One entry per source equation: its translation must hold in the target.
    pub fn check_equations(&self) -> Result<CheckReport> {
        let mut report = CheckReport::new();
        for (i, eq) in self.source.presentation().equations.iter().enumerate() {
            let mut t = Tally::new("E equation preserved", format!("#{i} {} = {}", eq.lhs, eq.rhs));
            let lhs = self.translate_term(&eq.lhs, eq.ctx)?;
            let rhs = self.translate_term(&eq.rhs, eq.ctx)?;
            let (f, g) = (Sub::new(eq.ctx, vec![lhs.clone()])?, Sub::new(eq.ctx, vec![rhs.clone()])?);
            let normal = |s: &Sub| -> String {
                self.target
                    .canon(s)
                    .map(|n| n.components()[0].to_string())
                    .unwrap_or_else(|e| e.to_string())
            };
            t.case(self.target.mor_eq(&f, &g), || {
                format!(
                    "[{}] {} = {} becomes {} = {}, normal forms {} and {}",
                    eq.ctx,
                    eq.lhs,
                    eq.rhs,
                    lhs,
                    rhs,
                    normal(&f),
                    normal(&g)
                )
            })?;
            report.add(t);
        }
        Ok(report)
    }
}

/// The functor `Sub ↦ translated Sub` of a validated assignment. It is at
/// once the theory morphism and the C-system homomorphism.
#[derive(Debug, Clone)]
pub struct AssignmentFunctor {
    assignment: OpAssignment,
}

impl AssignmentFunctor {
    pub fn assignment(&self) -> &OpAssignment {
        &self.assignment
    }
}

/// Validates equation preservation and returns the induced functor; a
/// violated equation is reported with its translation.
pub fn assignment_to_functor(a: &OpAssignment) -> Result<AssignmentFunctor> {
    let report = a.check_equations()?;
    if let Some(bad) = report.failures().next() {
        return Err(Error::Precondition {
            op: "assignment_to_functor",
            detail: format!(
                "equation {} not preserved: {}",
                bad.instance,
                bad.witness.as_deref().unwrap_or("")
            ),
        });
    }
    Ok(AssignmentFunctor {
        assignment: a.clone(),
    })
}

impl CsHomomorphism for AssignmentFunctor {
    type Source = TermModel;
    type Target = TermModel;

    fn source(&self) -> &TermModel {
        &self.assignment.source
    }

    fn target(&self) -> &TermModel {
        &self.assignment.target
    }

    fn ob(&self, x: &usize) -> usize {
        *x
    }

    fn mor(&self, f: &Sub) -> Result<Sub> {
        self.assignment.translate_sub(f)
    }
}

/// Reads an assignment back off a homomorphism of syntactic C-systems: the
/// image of `σ` is `H` applied to the generic term `σ(x0, …, x_{r-1})`.
pub fn recover_assignment<H>(h: &H) -> Result<OpAssignment>
where
    H: CsHomomorphism<Source = TermModel, Target = TermModel>,
{
    let sig = &h.source().presentation().signature;
    let mut images = IndexMap::new();
    for (op, r) in sig.ops() {
        let generic = Sub::new(r, vec![Term::app(op, (0..r).map(Term::Var).collect())])?;
        let image = h.mor(&generic)?;
        if image.dom() != r || image.cod() != 1 {
            return Err(Error::dims(
                "recover_assignment",
                format!("image of {op} is {image}"),
            ));
        }
        images.insert(op.to_string(), image.into_components().remove(0));
    }
    OpAssignment::from_models(h.source().clone(), h.target().clone(), images)
}

/// Morphism-level round trip: assignment → homomorphism → assignment is the
/// identity, the functor preserves the structure map, and translation
/// respects identities and composition.
pub fn roundtrip_assignment(a: &OpAssignment, probe: &ProbeSpec) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    let h = assignment_to_functor(a)?;
    let (src, tgt) = (a.source(), a.target());

    let mut t = Tally::new("M1 recover images", a.source.presentation().name.clone());
    t.case(recover_assignment(&h).and_then(|b| b.same_images(a)), || {
        "recovered images differ".into()
    })?;
    report.add(t);

    let mut t = Tally::new("M2 structure map preserved", "all FinFuns");
    for m in 0..=probe.max_fun {
        for n in 0..=probe.max_fun {
            for f in FinFun::all(m, n) {
                t.case(
                    (|| same(tgt, &h.mor(&src.mor_map(&f)?)?, &tgt.mor_map(&f)?))(),
                    || format!("f={f}"),
                )?;
            }
        }
    }
    report.add(t);

    let left = OpAssignment::identity(src.presentation().clone())?.then(a)?;
    let right = a.then(&OpAssignment::identity(tgt.presentation().clone())?)?;
    let mut t = Tally::new("M3 identity laws", "images");
    t.case(left.same_images(a), || "id then A != A".into())?;
    t.case(right.same_images(a), || "A then id != A".into())?;
    report.add(t);

    if src.presentation() == tgt.presentation() {
        let aa = assignment_to_functor(&a.then(a)?)?;
        let mut t = Tally::new("M4 composition", "sampled Subs");
        let mut rng = probe.rng("M4 composition");
        for m in 0..=probe.max_n {
            for n in 0..=probe.max_n {
                for f in probe_homs(src, &m, &n, probe.samples.min(10), probe.depth, &mut rng) {
                    t.case(
                        (|| same(tgt, &aa.mor(&f)?, &h.mor(&h.mor(&f)?)?))(),
                        || format!("f={f}"),
                    )?;
                }
            }
        }
        report.add(t);
    }
    Ok(report.sorted())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csystem::{check_csystem, term_csystem};
    use crate::models::{clone, CloneMor, FiniteClone};
    use crate::theory::{term_lawvere, verify_lawvere};

    fn magma() -> TermModel {
        TermModel::new(TheoryPresentation::magma()).unwrap()
    }

    fn monoid() -> TermModel {
        TermModel::new(TheoryPresentation::monoid()).unwrap()
    }

    fn opposite() -> OpAssignment {
        let mut images = IndexMap::new();
        images.insert("e".to_string(), Term::constant("e"));
        images.insert("m".to_string(), Term::app("m", vec![Term::Var(1), Term::Var(0)]));
        OpAssignment::new(TheoryPresentation::monoid(), TheoryPresentation::monoid(), images)
            .unwrap()
    }

    #[test]
    fn pi_in_term_model() {
        let c = magma();
        assert_eq!(pi(&c, 1, 0).unwrap(), crate::term::identity_sub(1));
        assert_eq!(pi(&c, 3, 1).unwrap(), Sub::projection(3, [1]));
        for n in 1..=5 {
            for i in 0..n {
                assert_eq!(pi(&c, n, i).unwrap(), Sub::projection(n, [i]));
            }
        }
        assert!(matches!(pi(&c, 2, 2), Err(Error::OutOfRange { .. })));
    }

    /// The recursion `π^{n+1}_i = p ∘ π^n_i`, `π^{n+1}_n = q(terminal, 1)`
    /// checked pointwise in clone(2).
    #[test]
    fn pi_in_clone_satisfies_recursion() {
        let c = clone(2).unwrap();
        let first = pi(&c, 2, 0).unwrap();
        for i in 0..4 {
            let u = c.decode(i, 2);
            assert_eq!(first.apply(i), u[0]);
        }
        for n in 1..4 {
            for i in 0..n {
                let lhs = pi(&c, n + 1, i).unwrap();
                let rhs = c.compose(&c.p(&(n + 1)), &pi(&c, n, i).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
            let last = pi(&c, n + 1, n).unwrap();
            assert_eq!(last, c.q(&c.terminal(&n), &1).unwrap());
        }
    }

    #[test]
    fn cl_mor_examples() {
        let c = magma();
        let f = FinFun::new(3, vec![2, 0]).unwrap();
        assert_eq!(cl_mor(&c, &f).unwrap(), Sub::projection(3, [2, 0]));
        for m in 0..=3 {
            assert_eq!(cl_mor(&c, &FinFun::identity(m)).unwrap(), crate::term::identity_sub(m));
            assert_eq!(cl_mor(&c, &ii1(m, 1)).unwrap(), c.p(&(m + 1)));
        }
        // agrees with the variable-tuple structure map on everything small
        for m in 0..=3 {
            for n in 0..=3 {
                for f in FinFun::all(m, n) {
                    assert_eq!(cl_mor(&c, &f).unwrap(), c.mor_map(&f).unwrap());
                }
            }
        }
    }

    #[test]
    fn cl_mor_in_clone_reindexes() {
        let c = clone(2).unwrap();
        for m in 0..=2 {
            for n in 0..=2 {
                for f in FinFun::all(m, n) {
                    let got = cl_mor(&c, &f).unwrap();
                    let expect = c.tabulate(n, m, |u| f.table().iter().map(|&j| u[j]).collect());
                    assert_eq!(got, expect, "f={f}");
                }
            }
        }
    }

    #[test]
    fn lc_matches_closed_formulas() {
        let probe = ProbeSpec::default().with_max_n(3).with_samples(20);
        for pres in [TheoryPresentation::magma(), TheoryPresentation::monoid()] {
            let direct = term_csystem(pres.clone()).unwrap();
            let via = lc(term_lawvere(pres).unwrap());
            let r = compare_csystems(&direct, &via, &probe).unwrap();
            assert!(r.all_pass(), "{r}");
            for x in 0..4 {
                assert_eq!(via.q(&via.id(&x), &(x + 1)).unwrap(), via.id(&(x + 1)));
            }
        }
    }

    #[test]
    fn lc_of_clone_projects() {
        let c = lc(clone(2).unwrap());
        let p2 = c.p(&2);
        let k = clone(2).unwrap();
        for i in 0..4 {
            assert_eq!(k.decode(p2.apply(i), 1), vec![k.decode(i, 2)[0]]);
        }
        let r = compare_csystems(&clone(2).unwrap(), &c, &ProbeSpec::default().with_max_n(2)).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn cl_of_csystems_pass_lawvere_laws() {
        let probe = ProbeSpec::default().with_max_n(2).with_max_fun(2).with_samples(10);
        let r = verify_lawvere(&cl(monoid()), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
        let r = verify_lawvere(&cl(clone(2).unwrap()), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
        let r = compare_lawvere(&term_lawvere(TheoryPresentation::monoid()).unwrap(), &cl(monoid()), &probe)
            .unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn round_trips_small() {
        let probe = ProbeSpec::default().with_max_n(3).with_max_fun(3).with_samples(10);
        let r = roundtrip_lawvere(&magma(), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
        let r = roundtrip_csystem(&monoid(), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
        let r = roundtrip_csystem(&clone(2).unwrap(), &probe.clone().with_max_n(2)).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn projection_compat_and_monicity() {
        let r = check_projection_compat(&magma(), 3).unwrap();
        assert!(r.all_pass(), "{r}");
        let c = clone(2).unwrap();
        let r = check_joint_monicity(&c, 2, 4096).unwrap();
        assert!(r.all_pass(), "{r}");
        assert_eq!(r.entries().len(), 9);
    }

    /// Broken monicity witness: a category where two distinct morphisms
    /// have the same projections is reported.
    #[test]
    fn monicity_detects_collapse() {
        #[derive(Clone)]
        struct Collapsed(FiniteClone);
        impl Category for Collapsed {
            type Ob = usize;
            type Mor = CloneMor;
            fn dom(&self, f: &CloneMor) -> usize {
                self.0.dom(f)
            }
            fn cod(&self, f: &CloneMor) -> usize {
                self.0.cod(f)
            }
            fn id(&self, x: &usize) -> CloneMor {
                self.0.id(x)
            }
            fn compose(&self, f: &CloneMor, g: &CloneMor) -> Result<CloneMor> {
                // forget everything about maps into length 1
                let h = self.0.compose(f, g)?;
                if h.cod() == 1 {
                    let zero = self.0.from_table(0, 1, vec![0])?;
                    return self.0.compose(&self.0.terminal(&h.dom()), &zero);
                }
                Ok(h)
            }
            fn hom_count(&self, x: &usize, y: &usize) -> Option<u128> {
                self.0.hom_count(x, y)
            }
            fn hom_set(&self, x: &usize, y: &usize, cap: u64) -> Option<Vec<CloneMor>> {
                self.0.hom_set(x, y, cap)
            }
            fn sample_hom(&self, x: &usize, y: &usize, d: usize, r: &mut ChaCha8Rng) -> Option<CloneMor> {
                self.0.sample_hom(x, y, d, r)
            }
        }
        impl CSystem for Collapsed {
            fn length(&self, x: &usize) -> usize {
                *x
            }
            fn pt(&self) -> usize {
                0
            }
            fn ft(&self, x: &usize) -> usize {
                self.0.ft(x)
            }
            fn p(&self, x: &usize) -> CloneMor {
                self.0.p(x)
            }
            fn fstar(&self, f: &CloneMor, x: &usize) -> Result<usize> {
                self.0.fstar(f, x)
            }
            fn q(&self, f: &CloneMor, x: &usize) -> Result<CloneMor> {
                self.0.q(f, x)
            }
            fn s(&self, f: &CloneMor) -> Result<CloneMor> {
                self.0.s(f)
            }
            fn terminal(&self, x: &usize) -> CloneMor {
                self.0.terminal(x)
            }
            fn probe_objects(&self, n: usize) -> Vec<usize> {
                (0..=n).collect()
            }
        }
        impl LBijective for Collapsed {
            fn object(&self, n: usize) -> usize {
                n
            }
        }
        let r = check_joint_monicity(&Collapsed(clone(2).unwrap()), 1, 4096).unwrap();
        assert!(r.has_failure("P2"), "{r}");
    }

    #[test]
    fn opposite_monoid_is_a_homomorphism() {
        let a = opposite();
        let h = assignment_to_functor(&a).unwrap();
        let probe = ProbeSpec::default().with_max_n(3).with_samples(30);
        let r = check_cs_homomorphism(&h, &probe).unwrap();
        assert!(r.all_pass(), "{r}");
        let r = roundtrip_assignment(&a, &probe.clone().with_max_fun(2)).unwrap();
        assert!(r.all_pass(), "{r}");
        // applying the opposite twice gives back the original multiplication
        let twice = a.then(&a).unwrap();
        assert!(twice.same_images(&OpAssignment::identity(TheoryPresentation::monoid()).unwrap()).unwrap());
    }

    #[test]
    fn identity_homomorphism_passes() {
        let probe = ProbeSpec::default().with_max_n(2).with_samples(10);
        let r = check_cs_homomorphism(&Identity(clone(2).unwrap()), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
        let a = OpAssignment::identity(TheoryPresentation::magma()).unwrap();
        let r = check_cs_homomorphism(&assignment_to_functor(&a).unwrap(), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn broken_assignment_rejected() {
        let mut images = IndexMap::new();
        images.insert("e".to_string(), Term::constant("e"));
        images.insert("m".to_string(), Term::constant("e"));
        let a = OpAssignment::new(TheoryPresentation::monoid(), TheoryPresentation::monoid(), images)
            .unwrap();
        let r = a.check_equations().unwrap();
        let failed: Vec<&str> = r.failures().map(|e| e.instance.as_str()).collect();
        assert!(failed.iter().any(|i| i.starts_with("#1 m(x0,e()) = x0")), "{r}");
        let err = assignment_to_functor(&a).unwrap_err().to_string();
        assert!(err.contains("m(e(),x0) = x0 becomes e() = x0"), "{err}");
    }

    #[test]
    fn assignment_validation() {
        let mut images = IndexMap::new();
        images.insert("m".to_string(), Term::Var(2));
        assert!(OpAssignment::new(TheoryPresentation::magma(), TheoryPresentation::magma(), images).is_err());
        assert!(OpAssignment::new(
            TheoryPresentation::magma(),
            TheoryPresentation::magma(),
            IndexMap::new()
        )
        .is_err());
    }

    /// A map that reverses every display map breaks H4.
    #[test]
    fn broken_homomorphism_reported() {
        struct Twist(TermModel);
        impl CsHomomorphism for Twist {
            type Source = TermModel;
            type Target = TermModel;
            fn source(&self) -> &TermModel {
                &self.0
            }
            fn target(&self) -> &TermModel {
                &self.0
            }
            fn ob(&self, x: &usize) -> usize {
                *x
            }
            fn mor(&self, f: &Sub) -> Result<Sub> {
                let mut comps = f.components().to_vec();
                comps.reverse();
                Sub::new(f.dom(), comps)
            }
        }
        let probe = ProbeSpec::default().with_max_n(3).with_samples(10);
        let r = check_cs_homomorphism(&Twist(magma()), &probe).unwrap();
        let bad = r.failures().find(|e| e.check.starts_with("H4")).expect("H4 fails");
        assert!(bad.witness.as_deref().unwrap().starts_with("X=3"), "{r}");
    }

    #[test]
    fn checks_on_lc_images() {
        let probe = ProbeSpec::default().with_max_n(2).with_samples(10);
        let r = check_csystem(&lc(clone(2).unwrap()), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
    }
}
