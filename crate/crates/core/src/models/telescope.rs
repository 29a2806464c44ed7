//! Finite telescopes: towers of dependent finite sets, forming a C-system
//! whose morphisms are arbitrary functions between total sets.
//!
//! A telescope of length `n` lists, for each level `i < n`, a fiber size
//! over every element of the total set of the first `i` levels. Elements of
//! a total set are numbered in lexicographic order, so the element
//! `(parent, c)` at level `i + 1` has index `offset(parent) + c`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::category::Category;
use crate::csystem::CSystem;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_TOTAL: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Telescope {
    fibers: Vec<Vec<usize>>,
}

impl Telescope {
    pub fn empty() -> Self {
        Telescope { fibers: Vec::new() }
    }

    /// Checks shapes and that every total set has at most `max_total` elements.
    pub fn new(fibers: Vec<Vec<usize>>, max_total: usize) -> Result<Self> {
        let mut total = 1usize;
        for (i, level) in fibers.iter().enumerate() {
            if level.len() != total {
                return Err(Error::dims(
                    "telescope",
                    format!("level {i} has {} fibers over {total} elements", level.len()),
                ));
            }
            total = level.iter().sum();
            if total > max_total {
                return Err(Error::BudgetExceeded {
                    what: format!("telescope level {i}"),
                    required: total.to_string(),
                    budget: max_total as u64,
                });
            }
        }
        Ok(Telescope { fibers })
    }

    pub fn len(&self) -> usize {
        self.fibers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fibers.is_empty()
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    /// Number of elements in the total set of the whole telescope.
    pub fn total(&self) -> usize {
        self.fibers.last().map_or(1, |l| l.iter().sum())
    }

    fn last(&self) -> &[usize] {
        self.fibers.last().expect("positive length")
    }

    /// Start index of each fiber of the last level.
    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.last()
            .iter()
            .map(|&s| {
                let o = acc;
                acc += s;
                o
            })
            .collect()
    }

    /// Parent in the previous level of each element of the total set.
    fn parents(&self) -> Vec<usize> {
        self.last()
            .iter()
            .enumerate()
            .flat_map(|(parent, &s)| std::iter::repeat_n(parent, s))
            .collect()
    }

    pub fn truncate(&self) -> Telescope {
        let mut fibers = self.fibers.clone();
        fibers.pop();
        Telescope { fibers }
    }

    /// Every element of the total set as a tuple of choices.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        let mut elems = vec![Vec::new()];
        for level in &self.fibers {
            let mut next = Vec::new();
            for (e, &s) in elems.iter().zip(level) {
                for c in 0..s {
                    let mut t = e.clone();
                    t.push(c);
                    next.push(t);
                }
            }
            elems = next;
        }
        elems
    }
}

impl fmt::Display for Telescope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, level) in self.fibers.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let parts: Vec<String> = level.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join(","))?;
        }
        f.write_str(">")
    }
}

/// The telescope with every fiber of size `b`; its total set is `B^n`.
pub fn const_family(b: usize, n: usize) -> Telescope {
    Telescope {
        fibers: (0..n).map(|i| vec![b; b.pow(i as u32)]).collect(),
    }
}

/// A function between total sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TeleMor {
    dom: Arc<Telescope>,
    cod: Arc<Telescope>,
    map: Vec<usize>,
}

impl TeleMor {
    pub fn new(dom: Telescope, cod: Telescope, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.total() || map.iter().any(|&v| v >= cod.total()) {
            return Err(Error::dims(
                "telescope morphism",
                format!("map of length {} from {dom} to {cod}", map.len()),
            ));
        }
        Ok(TeleMor {
            dom: Arc::new(dom),
            cod: Arc::new(cod),
            map,
        })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn dom(&self) -> &Telescope {
        &self.dom
    }

    pub fn cod(&self) -> &Telescope {
        &self.cod
    }
}

impl fmt::Display for TeleMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} {:?}", self.dom, self.cod, self.map)
    }
}

/// Bounds for the telescope C-system's probe objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TelescopeSpec {
    /// Largest fiber size among probe objects.
    pub max_fiber: usize,
    /// Largest total set allowed among probe objects.
    pub max_total: usize,
}

impl TelescopeSpec {
    pub fn new(max_fiber: usize) -> Self {
        TelescopeSpec {
            max_fiber,
            max_total: DEFAULT_MAX_TOTAL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TelescopeCSystem {
    spec: TelescopeSpec,
}

pub fn telescope_csystem(spec: TelescopeSpec) -> Result<TelescopeCSystem> {
    if spec.max_fiber > spec.max_total {
        return Err(Error::BudgetExceeded {
            what: "telescope fiber size".into(),
            required: spec.max_fiber.to_string(),
            budget: spec.max_total as u64,
        });
    }
    Ok(TelescopeCSystem { spec })
}

impl TelescopeCSystem {
    pub fn spec(&self) -> TelescopeSpec {
        self.spec
    }

    fn mor(&self, dom: &Telescope, cod: &Telescope, map: Vec<usize>) -> TeleMor {
        TeleMor {
            dom: Arc::new(dom.clone()),
            cod: Arc::new(cod.clone()),
            map,
        }
    }
}

fn positive(op: &'static str, x: &Telescope) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Precondition {
            op,
            detail: "telescope has length 0".into(),
        });
    }
    Ok(())
}

impl Category for TelescopeCSystem {
    type Ob = Telescope;
    type Mor = TeleMor;

    fn dom(&self, f: &TeleMor) -> Telescope {
        (*f.dom).clone()
    }

    fn cod(&self, f: &TeleMor) -> Telescope {
        (*f.cod).clone()
    }

    fn id(&self, x: &Telescope) -> TeleMor {
        self.mor(x, x, (0..x.total()).collect())
    }

    fn compose(&self, f: &TeleMor, g: &TeleMor) -> Result<TeleMor> {
        if f.cod != g.dom {
            return Err(Error::dims("compose", format!("{f} then {g}")));
        }
        Ok(TeleMor {
            dom: f.dom.clone(),
            cod: g.cod.clone(),
            map: f.map.iter().map(|&i| g.map[i]).collect(),
        })
    }

    fn hom_count(&self, y: &Telescope, x: &Telescope) -> Option<u128> {
        (x.total() as u128).checked_pow(y.total() as u32)
    }

    fn hom_set(&self, y: &Telescope, x: &Telescope, cap: u64) -> Option<Vec<TeleMor>> {
        if self.hom_count(y, x)? > cap as u128 {
            return None;
        }
        let (dom, cod) = (Arc::new(y.clone()), Arc::new(x.clone()));
        let mut out = Vec::new();
        if x.total() == 0 && y.total() > 0 {
            return Some(out);
        }
        let mut idx = vec![0usize; y.total()];
        loop {
            out.push(TeleMor {
                dom: dom.clone(),
                cod: cod.clone(),
                map: idx.clone(),
            });
            if !crate::term::advance(&mut idx, x.total()) {
                break;
            }
        }
        Some(out)
    }

    fn sample_hom(
        &self,
        y: &Telescope,
        x: &Telescope,
        _depth: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<TeleMor> {
        if x.total() == 0 && y.total() > 0 {
            return None;
        }
        let map = (0..y.total()).map(|_| rng.gen_range(0..x.total())).collect();
        Some(self.mor(y, x, map))
    }

    fn show_ob(&self, x: &Telescope) -> String {
        x.to_string()
    }

    fn show_mor(&self, f: &TeleMor) -> String {
        f.to_string()
    }
}

impl CSystem for TelescopeCSystem {
    fn length(&self, x: &Telescope) -> usize {
        x.len()
    }

    fn pt(&self) -> Telescope {
        Telescope::empty()
    }

    fn ft(&self, x: &Telescope) -> Telescope {
        x.truncate()
    }

    fn p(&self, x: &Telescope) -> TeleMor {
        if x.is_empty() {
            return self.id(x);
        }
        self.mor(x, &x.truncate(), x.parents())
    }

    /// `Y` extended by the fibers of `X` pulled back along `f`.
    fn fstar(&self, f: &TeleMor, x: &Telescope) -> Result<Telescope> {
        positive("fstar", x)?;
        if *f.cod != x.truncate() {
            return Err(Error::dims("fstar", format!("{f} does not land in ft({x})")));
        }
        let last = x.last();
        let mut fibers = f.dom.fibers.clone();
        fibers.push(f.map.iter().map(|&b| last[b]).collect());
        Ok(Telescope { fibers })
    }

    /// `(y, c) ↦ (f(y), c)`.
    fn q(&self, f: &TeleMor, x: &Telescope) -> Result<TeleMor> {
        let fx = self.fstar(f, x)?;
        let offsets = x.offsets();
        let map = fx
            .last()
            .iter()
            .enumerate()
            .flat_map(|(y, &s)| {
                let base = offsets[f.map[y]];
                (0..s).map(move |c| base + c)
            })
            .collect();
        Ok(self.mor(&fx, x, map))
    }

    /// `y ↦ (y, last choice of f(y))`.
    fn s(&self, f: &TeleMor) -> Result<TeleMor> {
        let x = &*f.cod;
        positive("s", x)?;
        let parents = x.parents();
        let offsets = x.offsets();
        let mut fibers = f.dom.fibers.clone();
        fibers.push(f.map.iter().map(|&v| x.last()[parents[v]]).collect());
        let target = Telescope { fibers };
        let target_offsets = target.offsets();
        let map = f
            .map
            .iter()
            .enumerate()
            .map(|(y, &v)| target_offsets[y] + (v - offsets[parents[v]]))
            .collect();
        Ok(self.mor(&f.dom, &target, map))
    }

    fn terminal(&self, x: &Telescope) -> TeleMor {
        self.mor(x, &Telescope::empty(), vec![0; x.total()])
    }

    /// All telescopes up to `max_len` with fibers of size at most
    /// `max_fiber` and total sets within `max_total`.
    fn probe_objects(&self, max_len: usize) -> Vec<Telescope> {
        let mut out = vec![Telescope::empty()];
        let mut frontier = vec![Telescope::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for t in &frontier {
                let base = t.total();
                let mut idx = vec![0usize; base];
                loop {
                    let sum: usize = idx.iter().sum();
                    if sum <= self.spec.max_total {
                        let mut fibers = t.fibers.clone();
                        fibers.push(idx.clone());
                        next.push(Telescope { fibers });
                    }
                    if !crate::term::advance(&mut idx, self.spec.max_fiber + 1) {
                        break;
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csystem::check_csystem;
    use crate::report::ProbeSpec;

    fn sys() -> TelescopeCSystem {
        telescope_csystem(TelescopeSpec::new(2)).unwrap()
    }

    #[test]
    fn const_family_shape() {
        let t = const_family(2, 3);
        assert_eq!(t.total(), 8);
        assert_eq!(sys().ft(&t), const_family(2, 2));
        assert_eq!(t.elements().len(), 8);
    }

    #[test]
    fn hom_counts() {
        let c = sys();
        let b = const_family(2, 1);
        assert_eq!(c.hom_set(&b, &b, 100).unwrap().len(), 4);
        let empty_fiber = Telescope::new(vec![vec![0]], 64).unwrap();
        assert_eq!(c.hom_set(&b, &empty_fiber, 100).unwrap().len(), 0);
        assert_eq!(c.hom_set(&empty_fiber, &b, 100).unwrap().len(), 1);
    }

    #[test]
    fn rejects_oversized() {
        assert!(Telescope::new(vec![vec![65]], 64).is_err());
        assert!(Telescope::new(vec![vec![2, 2]], 64).is_err());
    }

    /// Brute-force pullback: the set {(y, x) | f(y) = p(x)} with projections,
    /// compared against f*X, p_{f*X} and q(f, X) element by element.
    #[test]
    fn fstar_matches_fibered_product() {
        let c = sys();
        let x = Telescope::new(vec![vec![2], vec![1, 3]], 64).unwrap();
        let y = Telescope::new(vec![vec![3]], 64).unwrap();
        let ftx = c.ft(&x);
        let px = c.p(&x);
        for f in c.hom_set(&y, &ftx, 1000).unwrap() {
            let mut pullback = Vec::new();
            for yi in 0..y.total() {
                for xi in 0..x.total() {
                    if f.map()[yi] == px.map()[xi] {
                        pullback.push((yi, xi));
                    }
                }
            }
            let fx = c.fstar(&f, &x).unwrap();
            let p = c.p(&fx);
            let q = c.q(&f, &x).unwrap();
            let got: Vec<(usize, usize)> = (0..fx.total()).map(|e| (p.map()[e], q.map()[e])).collect();
            assert_eq!(got, pullback);
        }
    }

    #[test]
    fn section_picks_the_graph() {
        let c = sys();
        let x = Telescope::new(vec![vec![2], vec![1, 2]], 64).unwrap();
        let y = const_family(2, 1);
        for f in c.hom_set(&y, &x, 1000).unwrap() {
            let s = c.s(&f).unwrap();
            let target = c.cod(&s);
            let elems = target.elements();
            let xs = x.elements();
            for (yi, &e) in s.map().iter().enumerate() {
                let t = &elems[e];
                assert_eq!(t[..1], [yi]);
                assert_eq!(t[1], *xs[f.map()[yi]].last().unwrap());
            }
        }
    }

    #[test]
    fn probe_objects_count() {
        // 1 + 3 + (1 + 3 + 9)
        assert_eq!(sys().probe_objects(2).len(), 17);
    }

    #[test]
    fn laws_hold() {
        let probe = ProbeSpec::default().with_max_n(2).with_samples(12);
        let r = check_csystem(&sys(), &probe).unwrap();
        assert!(r.all_pass(), "{r}");
    }
}
