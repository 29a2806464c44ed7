//! The l-bijective C-system `C_X` generated by an object `X` of length 1:
//! objects are the iterated extensions `X^{*n}`, morphisms are all base
//! morphisms between them.

use std::sync::{Arc, RwLock};

use rand_chacha::ChaCha8Rng;

use crate::category::{probe_homs, Category};
use crate::csystem::{CSystem, LBijective};
use crate::error::{Error, Result};
use crate::report::{CheckReport, ProbeSpec, Tally};

/// The objects `X^{*0} = pt`, `X^{*(n+1)} = terminal(X^{*n})* X`, computed
/// on demand and cached.
#[derive(Debug)]
pub struct Tower<C: CSystem> {
    base: C,
    x: C::Ob,
    cache: RwLock<Vec<C::Ob>>,
}

impl<C: CSystem> Tower<C> {
    pub fn new(base: C, x: C::Ob) -> Result<Self> {
        if base.length(&x) != 1 {
            return Err(Error::Precondition {
                op: "tower",
                detail: format!("{} has length {}, not 1", base.show_ob(&x), base.length(&x)),
            });
        }
        let cache = RwLock::new(vec![base.pt(), x.clone()]);
        Ok(Tower { base, x, cache })
    }

    pub fn base(&self) -> &C {
        &self.base
    }

    pub fn generator(&self) -> &C::Ob {
        &self.x
    }

    pub fn x_star(&self, n: usize) -> Result<C::Ob> {
        if let Some(x) = self.cache.read().expect("tower cache").get(n) {
            return Ok(x.clone());
        }
        let mut cache = self.cache.write().expect("tower cache");
        while cache.len() <= n {
            let top = cache.last().expect("non-empty");
            let next = self.base.fstar(&self.base.terminal(top), &self.x)?;
            cache.push(next);
        }
        Ok(cache[n].clone())
    }

    fn level(&self, n: usize) -> C::Ob {
        self.x_star(n)
            .unwrap_or_else(|e| panic!("tower level {n} undefined: {e}"))
    }
}

/// `C_X` over a shared tower.
#[derive(Debug)]
pub struct Subsystem<C: CSystem> {
    tower: Arc<Tower<C>>,
}

impl<C: CSystem> Clone for Subsystem<C> {
    fn clone(&self) -> Self {
        Subsystem {
            tower: self.tower.clone(),
        }
    }
}

pub fn generate_subsystem<C: CSystem>(tower: Tower<C>) -> Subsystem<C> {
    Subsystem {
        tower: Arc::new(tower),
    }
}

impl<C: CSystem> Subsystem<C> {
    pub fn tower(&self) -> &Tower<C> {
        &self.tower
    }

    fn base(&self) -> &C {
        &self.tower.base
    }

    fn index(&self, x: &C::Ob) -> usize {
        self.base().length(x)
    }
}

impl<C: CSystem> Category for Subsystem<C> {
    type Ob = usize;
    type Mor = C::Mor;

    fn dom(&self, f: &C::Mor) -> usize {
        self.index(&self.base().dom(f))
    }

    fn cod(&self, f: &C::Mor) -> usize {
        self.index(&self.base().cod(f))
    }

    fn id(&self, n: &usize) -> C::Mor {
        self.base().id(&self.tower.level(*n))
    }

    fn compose(&self, f: &C::Mor, g: &C::Mor) -> Result<C::Mor> {
        self.base().compose(f, g)
    }

    fn canon(&self, f: &C::Mor) -> Result<C::Mor> {
        self.base().canon(f)
    }

    fn mor_eq(&self, f: &C::Mor, g: &C::Mor) -> Result<bool> {
        self.base().mor_eq(f, g)
    }

    fn hom_count(&self, m: &usize, n: &usize) -> Option<u128> {
        let (a, b) = (self.tower.x_star(*m).ok()?, self.tower.x_star(*n).ok()?);
        self.base().hom_count(&a, &b)
    }

    fn hom_set(&self, m: &usize, n: &usize, cap: u64) -> Option<Vec<C::Mor>> {
        let (a, b) = (self.tower.x_star(*m).ok()?, self.tower.x_star(*n).ok()?);
        self.base().hom_set(&a, &b, cap)
    }

    fn sample_hom(&self, m: &usize, n: &usize, depth: usize, rng: &mut ChaCha8Rng) -> Option<C::Mor> {
        let (a, b) = (self.tower.x_star(*m).ok()?, self.tower.x_star(*n).ok()?);
        self.base().sample_hom(&a, &b, depth, rng)
    }

    fn show_mor(&self, f: &C::Mor) -> String {
        self.base().show_mor(f)
    }
}

impl<C: CSystem> CSystem for Subsystem<C> {
    fn length(&self, n: &usize) -> usize {
        *n
    }

    fn pt(&self) -> usize {
        0
    }

    fn ft(&self, n: &usize) -> usize {
        n.saturating_sub(1)
    }

    fn p(&self, n: &usize) -> C::Mor {
        self.base().p(&self.tower.level(*n))
    }

    fn fstar(&self, f: &C::Mor, n: &usize) -> Result<usize> {
        let fx = self.base().fstar(f, &self.tower.x_star(*n)?)?;
        let k = self.index(&fx);
        if fx != self.tower.x_star(k)? {
            return Err(Error::Precondition {
                op: "fstar",
                detail: format!("{} leaves the tower", self.base().show_ob(&fx)),
            });
        }
        Ok(k)
    }

    fn q(&self, f: &C::Mor, n: &usize) -> Result<C::Mor> {
        self.base().q(f, &self.tower.x_star(*n)?)
    }

    fn s(&self, f: &C::Mor) -> Result<C::Mor> {
        self.base().s(f)
    }

    fn terminal(&self, n: &usize) -> C::Mor {
        self.base().terminal(&self.tower.level(*n))
    }

    fn probe_objects(&self, max_len: usize) -> Vec<usize> {
        (0..=max_len).collect()
    }
}

impl<C: CSystem> LBijective for Subsystem<C> {
    fn object(&self, n: usize) -> usize {
        n
    }
}

/// Closure of the tower under the base operations: K1 lengths, K2 `ft`,
/// K3 `f*` for sampled `f : X^{*m} -> X^{*n}`.
pub fn check_closure<C: CSystem>(sub: &Subsystem<C>, probe: &ProbeSpec) -> Result<CheckReport> {
    let tower = sub.tower();
    let base = tower.base();
    let mut report = CheckReport::new();

    let mut k1 = Tally::new("K1 length", "tower");
    let mut k2 = Tally::new("K2 ft stable", "tower");
    for n in 0..=probe.max_n + 1 {
        let x = tower.x_star(n)?;
        k1.case(Ok(base.length(&x) == n), || format!("l(X^*{n}) = {}", base.length(&x)))?;
        if n > 0 {
            k2.case(Ok(base.ft(&x) == tower.x_star(n - 1)?), || {
                format!("ft(X^*{n}) = {}", base.show_ob(&base.ft(&x)))
            })?;
        }
    }
    report.add(k1);
    report.add(k2);

    for m in 0..=probe.max_n {
        for n in 0..probe.max_n {
            let mut t = Tally::new("K3 fstar stable", format!("{m}->{n}"));
            let mut rng = probe.rng(&format!("closure {m} {n}"));
            let (xm, xn) = (tower.x_star(m)?, tower.x_star(n)?);
            let target = tower.x_star(m + 1)?;
            let next = tower.x_star(n + 1)?;
            for f in probe_homs(base, &xm, &xn, probe.samples, probe.depth, &mut rng) {
                t.case(base.fstar(&f, &next).map(|fx| fx == target), || {
                    format!("f={}", base.show_mor(&f))
                })?;
            }
            report.add(t);
        }
    }
    Ok(report)
}
