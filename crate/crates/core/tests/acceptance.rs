//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails. All comparisons are exact; each
//! criterion has a 60 s wall-clock limit.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rand_chacha::ChaCha8Rng;

use lawvere_core::bridge::{
    assignment_to_functor, check_cs_homomorphism, check_joint_monicity, check_projection_compat,
    cl, compare_csystems, compare_lawvere, compare_lawvere_with, lc, roundtrip_assignment,
    roundtrip_csystem, roundtrip_lawvere, LcSystem, OpAssignment,
};
use lawvere_core::csystem::{check_csystem, term_csystem};
use lawvere_core::models::telescope::{const_family, telescope_csystem, TelescopeSpec};
use lawvere_core::models::{clone, enumerate_models};
use lawvere_core::subsystem::{check_closure, generate_subsystem, Tower};
use lawvere_core::term::{Sub, Term, TheoryPresentation};
use lawvere_core::term_model::TermModel;
use lawvere_core::theory::{finfun_compose, ii1, term_lawvere};
use lawvere_core::{
    CSystem, Category, CheckReport, FinFun, LBijective, Lawvere, ProbeSpec, Result,
};

const LIMIT: Duration = Duration::from_secs(60);

fn magma() -> TheoryPresentation {
    TheoryPresentation::magma()
}

fn monoid() -> TheoryPresentation {
    TheoryPresentation::monoid()
}

fn require(report: &CheckReport, what: &str) -> usize {
    if let Some(bad) = report.failures().next() {
        panic!(
            "{what}: {} {} witness {}",
            bad.check,
            bad.instance,
            bad.witness.as_deref().unwrap_or("-")
        );
    }
    report.entries().len()
}

/// `L(f then g) = L(g) then L(f)` over every composable pair with sizes ≤ 3.
fn functor_pairs<L: Lawvere>(lw: &L) -> (usize, usize) {
    let cat = lw.category();
    let (mut cases, mut failures) = (0, 0);
    for a in 0..=3 {
        for b in 0..=3 {
            for c in 0..=3 {
                for f in FinFun::all(a, b) {
                    for g in FinFun::all(b, c) {
                        cases += 1;
                        let lhs = lw.mor_map(&finfun_compose(&f, &g).unwrap()).unwrap();
                        let rhs = cat
                            .compose(&lw.mor_map(&g).unwrap(), &lw.mor_map(&f).unwrap())
                            .unwrap();
                        if !cat.mor_eq(&lhs, &rhs).unwrap() {
                            failures += 1;
                        }
                    }
                }
            }
        }
    }
    (cases, failures)
}

fn criterion_1() -> String {
    let k = clone(2).unwrap();
    let runs = [
        ("term(Magma)", functor_pairs(&term_lawvere(magma()).unwrap())),
        ("clone(2)", functor_pairs(&k)),
        ("cl(term(Magma))", functor_pairs(&cl(term_csystem(magma()).unwrap()))),
        ("cl(clone(2))", functor_pairs(&cl(k))),
    ];
    let mut parts = Vec::new();
    for (name, (cases, failures)) in runs {
        assert_eq!(failures, 0, "{name}: {failures} of {cases} pairs differ");
        parts.push(format!("{name} {cases}"));
    }
    format!("functor laws exact on all composable pairs m,n<=3 ({})", parts.join(", "))
}

fn criterion_2() -> String {
    let a = require(&check_projection_compat(&term_csystem(magma()).unwrap(), 4).unwrap(), "term");
    let b = require(&check_projection_compat(&clone(2).unwrap(), 4).unwrap(), "clone(2)");
    format!("L_f∘π_i = π_f(i) exact, m,n<=4, all i ({a}+{b} groups)")
}

fn criterion_3() -> String {
    let c = clone(2).unwrap();
    let report = check_joint_monicity(&c, 2, 4096).unwrap();
    let groups = require(&report, "clone(2)");
    assert_eq!(groups, 9, "every hom-set with m,n<=2 enumerated");
    format!("joint monicity exhaustive on clone(2), m,n<=2 ({groups} hom-sets)")
}

fn criterion_4() -> String {
    let base = ProbeSpec::default();
    let mut counts = Vec::new();
    let r = check_csystem(&term_csystem(magma()).unwrap(), &base).unwrap();
    counts.push(("term(Magma)", require(&r, "term(Magma)")));
    let r = check_csystem(&term_csystem(monoid()).unwrap(), &base).unwrap();
    counts.push(("term(Monoid)", require(&r, "term(Monoid)")));

    // Domain sizes |U^m| <= 4, with enough work budget to enumerate every square.
    let exhaustive = base.clone().with_max_n(2);
    let exhaustive = ProbeSpec {
        pullback_work: u64::MAX,
        ..exhaustive
    };
    let r = check_csystem(&clone(2).unwrap(), &exhaustive).unwrap();
    counts.push(("clone(2)", require(&r, "clone(2)")));
    assert!(
        !r.entries().iter().any(|e| e.check.contains("(recovery)")),
        "every A8 pullback on clone(2) is checked exhaustively"
    );
    let squares = r
        .entries()
        .iter()
        .filter(|e| e.check == "A8 pullback (exhaustive)")
        .count();
    assert_eq!(squares, 18, "all (Z,Y,X) triples with lengths <= 2");

    let r = check_csystem(&clone(3).unwrap(), &base.clone().with_max_n(2)).unwrap();
    counts.push(("clone(3)", require(&r, "clone(3)")));
    let tele = telescope_csystem(TelescopeSpec::new(2)).unwrap();
    let r = check_csystem(&tele, &base.clone().with_max_n(2)).unwrap();
    counts.push(("telescope(2)", require(&r, "telescope(2)")));

    let shown: Vec<String> = counts.iter().map(|(n, c)| format!("{n} {c}")).collect();
    format!(
        "A1-A8 clean ({}); A8 exhaustive on clone(2) for {squares} triples",
        shown.join(", ")
    )
}

fn criterion_5() -> String {
    let probe = ProbeSpec::default()
        .with_max_n(5)
        .with_max_fun(4)
        .with_samples(100)
        .with_depth(3)
        .with_seed(5);
    let mut total = 0;
    for pres in [magma(), monoid()] {
        let name = pres.name.clone();
        let model = TermModel::new(pres.clone()).unwrap();
        total += require(&roundtrip_lawvere(&model, &probe).unwrap(), &format!("cl(lc({name}))"));
        total += require(&roundtrip_csystem(&model, &probe).unwrap(), &format!("lc(cl({name}))"));
        let direct = term_csystem(pres.clone()).unwrap();
        let built = lc(term_lawvere(pres).unwrap());
        total += require(&compare_csystems(&direct, &built, &probe).unwrap(), "lc vs closed formulas");
    }
    let k = clone(2).unwrap();
    total += require(&roundtrip_lawvere(&k, &probe).unwrap(), "cl(lc(clone(2)))");
    total += require(&roundtrip_csystem(&k, &probe).unwrap(), "lc(cl(clone(2)))");
    // exhaustive at m,n <= 2: every hom-set involved has at most 256 elements
    let small = ProbeSpec::default().with_max_n(2).with_max_fun(2).with_samples(256);
    total += require(&roundtrip_lawvere(&k, &small).unwrap(), "cl(lc(clone(2))) exhaustive");
    total += require(&roundtrip_csystem(&k, &small).unwrap(), "lc(cl(clone(2))) exhaustive");
    format!(
        "round trips exact for Magma, Monoid, clone(2) (objects<=5, FinFuns<=4, 100 Subs depth<=3); lc = closed formulas ({total} groups)"
    )
}

fn opposite_monoid() -> OpAssignment {
    let mut images = IndexMap::new();
    images.insert("e".to_string(), Term::constant("e"));
    images.insert("m".to_string(), Term::app("m", vec![Term::Var(1), Term::Var(0)]));
    OpAssignment::new(monoid(), monoid(), images).unwrap()
}

fn criterion_6() -> String {
    let a = opposite_monoid();
    let h = assignment_to_functor(&a).unwrap();
    let probe = ProbeSpec::default().with_max_n(4).with_samples(50).with_seed(6);
    let report = check_cs_homomorphism(&h, &probe).unwrap();
    require(&report, "opposite monoid");
    let h5 = report
        .entries()
        .iter()
        .find(|e| e.check == "H5 q")
        .expect("H5 present");
    assert!(h5.instance.contains("(50 cases)"), "{}", h5.instance);
    require(&roundtrip_assignment(&a, &probe).unwrap(), "assignment round trip");
    "opposite monoid: H0-H5 and π-preservation pass, H5 on 50 seeded (f,X), n<=4".into()
}

/// Brute-force count of models of the monoid axioms on {0,1}, independent of
/// the term evaluator.
fn monoids_on_two() -> usize {
    let mut count = 0;
    for e in 0..2usize {
        for table in 0..16usize {
            let op = |a: usize, b: usize| (table >> (a * 2 + b)) & 1;
            let unit = (0..2).all(|x| op(e, x) == x && op(x, e) == x);
            let assoc = (0..8usize).all(|i| {
                let (a, b, c) = (i & 1, (i >> 1) & 1, (i >> 2) & 1);
                op(op(a, b), c) == op(a, op(b, c))
            });
            count += usize::from(unit && assoc);
        }
    }
    count
}

fn criterion_7() -> String {
    let monoids = enumerate_models(&monoid(), 2, 1_000_000).unwrap().len();
    let magmas = enumerate_models(&magma(), 2, 1_000_000).unwrap().len();
    assert_eq!(monoids, monoids_on_two());
    assert_eq!(monoids, 4);
    assert_eq!(magmas, 2usize.pow(4));
    format!("models on 2 elements: Monoid {monoids}, Magma {magmas}")
}

fn criterion_8() -> String {
    let base = telescope_csystem(TelescopeSpec::new(2)).unwrap();
    let sub = generate_subsystem(Tower::new(base, const_family(2, 1)).unwrap());
    let mut counts = Vec::new();
    for m in 0..=2usize {
        for n in 0..=2usize {
            let got = sub.hom_set(&m, &n, 4096).expect("enumerable").len() as u128;
            // functions from a 2^m-element set to a 2^n-element set
            let expect = (1u128 << n).pow(1 << m);
            assert_eq!(got, expect, "|C_X({m},{n})|");
            assert_eq!(sub.hom_count(&m, &n), Some(expect));
            counts.push(got.to_string());
        }
    }
    let probe = ProbeSpec::default().with_max_n(2).with_max_fun(2).with_samples(50);
    require(&check_csystem(&sub, &probe).unwrap(), "C_X axioms");
    require(&check_closure(&sub, &probe).unwrap(), "C_X closure");
    let k = clone(2).unwrap();
    let report = compare_lawvere_with(&k, &cl(sub.clone()), &probe, |f| {
        k.from_table(f.dom().len(), f.cod().len(), f.map().iter().map(|&v| v as u32).collect())
    })
    .unwrap();
    require(&report, "cl(C_X) vs clone(2)");
    format!(
        "C_X over telescope(2): |C_X(m,n)| = {} for m,n<=2; A1-A8 clean; cl(C_X) = clone(2) on FinFuns<=2",
        counts.join(",")
    )
}

#[derive(Clone, Copy, Debug)]
enum Mutation {
    /// New variable first: `p` drops `x0`, `q` puts the fresh variable in front.
    SwapInjections,
    DropLastQ,
}

#[derive(Clone)]
struct Mutant {
    inner: LcSystem<TermModel>,
    kind: Mutation,
}

impl Category for Mutant {
    type Ob = usize;
    type Mor = Sub;

    fn dom(&self, f: &Sub) -> usize {
        self.inner.dom(f)
    }

    fn cod(&self, f: &Sub) -> usize {
        self.inner.cod(f)
    }

    fn id(&self, x: &usize) -> Sub {
        self.inner.id(x)
    }

    fn compose(&self, f: &Sub, g: &Sub) -> Result<Sub> {
        self.inner.compose(f, g)
    }

    fn mor_eq(&self, f: &Sub, g: &Sub) -> Result<bool> {
        self.inner.mor_eq(f, g)
    }

    fn hom_count(&self, x: &usize, y: &usize) -> Option<u128> {
        self.inner.hom_count(x, y)
    }

    fn hom_set(&self, x: &usize, y: &usize, cap: u64) -> Option<Vec<Sub>> {
        self.inner.hom_set(x, y, cap)
    }

    fn sample_hom(&self, x: &usize, y: &usize, d: usize, rng: &mut ChaCha8Rng) -> Option<Sub> {
        self.inner.sample_hom(x, y, d, rng)
    }

    fn show_mor(&self, f: &Sub) -> String {
        f.to_string()
    }
}

impl CSystem for Mutant {
    fn length(&self, x: &usize) -> usize {
        *x
    }

    fn pt(&self) -> usize {
        0
    }

    fn ft(&self, x: &usize) -> usize {
        self.inner.ft(x)
    }

    fn p(&self, x: &usize) -> Sub {
        match self.kind {
            Mutation::SwapInjections if *x > 0 => {
                let lw = self.inner.lawvere();
                lw.mor_map(&lawvere_core::theory::ii2(1, x - 1)).unwrap()
            }
            _ => self.inner.p(x),
        }
    }

    fn fstar(&self, f: &Sub, x: &usize) -> Result<usize> {
        self.inner.fstar(f, x)
    }

    fn q(&self, f: &Sub, x: &usize) -> Result<Sub> {
        match self.kind {
            Mutation::SwapInjections => {
                let m = self.fstar(f, x)? - 1;
                let lw = self.inner.lawvere();
                let tail = self.compose(&self.p(&(m + 1)), f)?;
                lw.merge(&lw.mor_map(&ii1(1, m))?, &tail)
            }
            Mutation::DropLastQ => {
                let full = self.inner.q(f, x)?;
                let mut comps = full.into_components();
                comps.pop();
                Sub::new(self.dom(f) + 1, comps)
            }
        }
    }

    fn s(&self, f: &Sub) -> Result<Sub> {
        self.inner.s(f)
    }

    fn terminal(&self, x: &usize) -> Sub {
        self.inner.terminal(x)
    }

    fn probe_objects(&self, max_len: usize) -> Vec<usize> {
        self.inner.probe_objects(max_len)
    }
}

impl LBijective for Mutant {
    fn object(&self, n: usize) -> usize {
        n
    }
}

fn first_witness(report: &CheckReport, prefix: &str) -> String {
    let bad = report
        .failures()
        .find(|e| e.check.starts_with(prefix))
        .unwrap_or_else(|| panic!("mutation not caught by {prefix}"));
    format!(
        "{} {}: {}",
        bad.check,
        bad.instance,
        bad.witness.as_deref().expect("failures carry witnesses")
    )
}

fn criterion_9() -> String {
    let probe = ProbeSpec::default().with_max_n(3).with_max_fun(3).with_samples(20);
    let lw = term_lawvere(magma()).unwrap();
    let direct = term_csystem(magma()).unwrap();

    let swapped = Mutant {
        inner: lc(lw.clone()),
        kind: Mutation::SwapInjections,
    };
    let vs_closed = compare_csystems(&direct, &swapped, &probe).unwrap();
    let w1 = first_witness(&vs_closed, "S2 p");
    let back = compare_lawvere(&lw, &cl(swapped), &probe).unwrap();
    first_witness(&back, "T2 mor_map");

    let dropped = Mutant {
        inner: lc(lw),
        kind: Mutation::DropLastQ,
    };
    let axioms = check_csystem(&dropped, &probe).unwrap();
    let w2 = first_witness(&axioms, "A5");

    let mut images = IndexMap::new();
    images.insert("e".to_string(), Term::constant("e"));
    images.insert("m".to_string(), Term::constant("e"));
    let broken = OpAssignment::new(monoid(), monoid(), images).unwrap();
    let eqs = broken.check_equations().unwrap();
    let w3 = first_witness(&eqs, "E");
    assert!(assignment_to_functor(&broken).is_err());

    format!("swap ii1/ii2 caught [{w1}]; drop last q component caught [{w2}]; m ↦ e() rejected [{w3}]")
}

type Criterion = fn() -> String;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("1 functor laws", criterion_1),
        ("2 projection compatibility", criterion_2),
        ("3 joint monicity", criterion_3),
        ("4 C-system axioms", criterion_4),
        ("5 round trip", criterion_5),
        ("6 homomorphism compatibility", criterion_6),
        ("7 model oracle", criterion_7),
        ("8 subsystem theorem", criterion_8),
        ("9 mutation sensitivity", criterion_9),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        match outcome {
            Ok(summary) if elapsed <= LIMIT => {
                println!("PASS criterion {name}: {summary} [{:.1}s]", elapsed.as_secs_f64());
            }
            Ok(_) => {
                failed += 1;
                println!("FAIL criterion {name}: exceeded {}s [{:.1}s]", LIMIT.as_secs(), elapsed.as_secs_f64());
            }
            Err(panic) => {
                failed += 1;
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into());
                println!("FAIL criterion {name}: {msg} [{:.1}s]", elapsed.as_secs_f64());
            }
        }
    }
    std::panic::set_hook(default_hook);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
