//! The full clone on a finite carrier `U = {0, …, k-1}`.
//!
//! A morphism `m -> n` is a function `U^m -> U^n`, stored as a table indexed
//! by input tuples in lexicographic order (first coordinate most
//! significant), each entry the index of the output tuple.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::category::Category;
use crate::csystem::{CSystem, LBijective};
use crate::error::{Error, Result};
use crate::theory::{FinFun, Lawvere};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CloneMor {
    dom: usize,
    cod: usize,
    table: Vec<u32>,
}

impl CloneMor {
    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn apply(&self, input: usize) -> usize {
        self.table[input] as usize
    }
}

impl fmt::Display for CloneMor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} {:?}", self.dom, self.cod, self.table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteClone {
    k: usize,
}

/// The clone on a carrier with `k ≥ 1` elements.
pub fn clone(k: usize) -> Result<FiniteClone> {
    if k == 0 {
        return Err(Error::Precondition {
            op: "clone",
            detail: "carrier must be non-empty".into(),
        });
    }
    Ok(FiniteClone { k })
}

impl FiniteClone {
    pub fn carrier(&self) -> usize {
        self.k
    }

    /// `|U^n|`.
    pub fn size(&self, n: usize) -> usize {
        self.k.pow(n as u32)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &u| acc * self.k + u)
    }

    pub fn decode(&self, mut index: usize, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = index % self.k;
            index /= self.k;
        }
        out
    }

    /// Builds a morphism from a function on tuples.
    pub fn tabulate(&self, dom: usize, cod: usize, f: impl Fn(&[usize]) -> Vec<usize>) -> CloneMor {
        let table = (0..self.size(dom))
            .map(|i| {
                let out = f(&self.decode(i, dom));
                debug_assert_eq!(out.len(), cod);
                self.encode(&out) as u32
            })
            .collect();
        CloneMor { dom, cod, table }
    }

    pub fn from_table(&self, dom: usize, cod: usize, table: Vec<u32>) -> Result<CloneMor> {
        if table.len() != self.size(dom) || table.iter().any(|&v| v as usize >= self.size(cod)) {
            return Err(Error::dims(
                "clone table",
                format!("table of length {} for {dom}->{cod}", table.len()),
            ));
        }
        Ok(CloneMor { dom, cod, table })
    }
}

impl Category for FiniteClone {
    type Ob = usize;
    type Mor = CloneMor;

    fn dom(&self, f: &CloneMor) -> usize {
        f.dom
    }

    fn cod(&self, f: &CloneMor) -> usize {
        f.cod
    }

    fn id(&self, n: &usize) -> CloneMor {
        CloneMor {
            dom: *n,
            cod: *n,
            table: (0..self.size(*n) as u32).collect(),
        }
    }

    fn compose(&self, f: &CloneMor, g: &CloneMor) -> Result<CloneMor> {
        if f.cod != g.dom {
            return Err(Error::dims("compose", format!("{f} then {g}")));
        }
        Ok(CloneMor {
            dom: f.dom,
            cod: g.cod,
            table: f.table.iter().map(|&i| g.table[i as usize]).collect(),
        })
    }

    fn hom_count(&self, m: &usize, n: &usize) -> Option<u128> {
        let base = (self.k as u128).checked_pow(*n as u32)?;
        let exp = self.k.checked_pow(*m as u32)?;
        Some(base.checked_pow(exp as u32).unwrap_or(u128::MAX))
    }

    fn hom_set(&self, m: &usize, n: &usize, cap: u64) -> Option<Vec<CloneMor>> {
        if self.hom_count(m, n)? > cap as u128 {
            return None;
        }
        let base = self.size(*n);
        let mut idx = vec![0usize; self.size(*m)];
        let mut out = Vec::new();
        if base == 0 {
            return Some(out);
        }
        loop {
            out.push(CloneMor {
                dom: *m,
                cod: *n,
                table: idx.iter().map(|&v| v as u32).collect(),
            });
            if !crate::term::advance(&mut idx, base) {
                break;
            }
        }
        Some(out)
    }

    fn sample_hom(&self, m: &usize, n: &usize, _depth: usize, rng: &mut ChaCha8Rng) -> Option<CloneMor> {
        let base = self.size(*n);
        Some(CloneMor {
            dom: *m,
            cod: *n,
            table: (0..self.size(*m))
                .map(|_| rng.gen_range(0..base) as u32)
                .collect(),
        })
    }

    fn show_ob(&self, n: &usize) -> String {
        n.to_string()
    }

    fn show_mor(&self, f: &CloneMor) -> String {
        f.to_string()
    }
}

fn positive(op: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Precondition {
            op,
            detail: "object has length 0".into(),
        });
    }
    Ok(())
}

impl CSystem for FiniteClone {
    fn length(&self, x: &usize) -> usize {
        *x
    }

    fn pt(&self) -> usize {
        0
    }

    fn ft(&self, x: &usize) -> usize {
        x.saturating_sub(1)
    }

    /// Drops the last coordinate.
    fn p(&self, x: &usize) -> CloneMor {
        if *x == 0 {
            return self.id(x);
        }
        let k = self.k as u32;
        CloneMor {
            dom: *x,
            cod: x - 1,
            table: (0..self.size(*x) as u32).map(|i| i / k).collect(),
        }
    }

    fn fstar(&self, f: &CloneMor, x: &usize) -> Result<usize> {
        positive("fstar", *x)?;
        if f.cod + 1 != *x {
            return Err(Error::dims("fstar", format!("{f} does not land in ft({x})")));
        }
        Ok(f.dom + 1)
    }

    /// `(u, x) ↦ (f(u), x)`.
    fn q(&self, f: &CloneMor, x: &usize) -> Result<CloneMor> {
        let m = self.fstar(f, x)? - 1;
        let k = self.k as u32;
        Ok(CloneMor {
            dom: m + 1,
            cod: *x,
            table: (0..self.size(m + 1) as u32)
                .map(|i| f.table[(i / k) as usize] * k + i % k)
                .collect(),
        })
    }

    /// `u ↦ (u, last coordinate of f(u))`.
    fn s(&self, f: &CloneMor) -> Result<CloneMor> {
        positive("s", f.cod)?;
        let k = self.k as u32;
        Ok(CloneMor {
            dom: f.dom,
            cod: f.dom + 1,
            table: f
                .table
                .iter()
                .enumerate()
                .map(|(u, &v)| u as u32 * k + v % k)
                .collect(),
        })
    }

    fn terminal(&self, x: &usize) -> CloneMor {
        CloneMor {
            dom: *x,
            cod: 0,
            table: vec![0; self.size(*x)],
        }
    }

    fn probe_objects(&self, max_len: usize) -> Vec<usize> {
        (0..=max_len).collect()
    }
}

impl LBijective for FiniteClone {
    fn object(&self, n: usize) -> usize {
        n
    }
}

impl Lawvere for FiniteClone {
    type Cat = FiniteClone;

    fn category(&self) -> &FiniteClone {
        self
    }

    /// Reindexing of coordinates: `u ↦ (u_{f(0)}, …, u_{f(m-1)})`.
    fn mor_map(&self, f: &FinFun) -> Result<CloneMor> {
        Ok(self.tabulate(f.n(), f.m(), |u| {
            f.table().iter().map(|&j| u[j]).collect()
        }))
    }

    fn merge(&self, u: &CloneMor, v: &CloneMor) -> Result<CloneMor> {
        if u.dom != v.dom {
            return Err(Error::dims("merge", format!("{u} and {v}")));
        }
        let shift = self.size(v.cod) as u32;
        Ok(CloneMor {
            dom: u.dom,
            cod: u.cod + v.cod,
            table: u
                .table
                .iter()
                .zip(&v.table)
                .map(|(&a, &b)| a * shift + b)
                .collect(),
        })
    }
}
