//! The syntactic category of a presented theory: objects are context sizes,
//! morphisms `m -> n` are `n`-tuples of terms in context `m`, taken modulo
//! the presentation's rewrite system.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::category::Category;
use crate::error::Result;
use crate::term::{
    self, enumerate_terms, identity_sub, infinitely_many_terms, random_sub, Sub,
    TheoryPresentation,
};

#[derive(Debug, Clone)]
pub struct TermModel {
    pres: Arc<TheoryPresentation>,
}

impl TermModel {
    pub fn new(pres: TheoryPresentation) -> Result<Self> {
        pres.validate()?;
        Ok(TermModel {
            pres: Arc::new(pres),
        })
    }

    pub fn presentation(&self) -> &TheoryPresentation {
        &self.pres
    }

    /// Distinct normal forms among variables and constants of context `m`.
    fn leaves(&self, m: usize) -> Result<Vec<term::Term>> {
        let mut out = Vec::new();
        for t in enumerate_terms(&self.pres.signature, m, 0) {
            let t = self.pres.normalize(&t)?;
            if !out.contains(&t) {
                out.push(t);
            }
        }
        Ok(out)
    }
}

impl Category for TermModel {
    type Ob = usize;
    type Mor = Sub;

    fn dom(&self, f: &Sub) -> usize {
        f.dom()
    }

    fn cod(&self, f: &Sub) -> usize {
        f.cod()
    }

    fn id(&self, n: &usize) -> Sub {
        identity_sub(*n)
    }

    fn compose(&self, f: &Sub, g: &Sub) -> Result<Sub> {
        term::compose(f, g)
    }

    fn canon(&self, f: &Sub) -> Result<Sub> {
        self.pres.normalize_sub(f)
    }

    fn mor_eq(&self, f: &Sub, g: &Sub) -> Result<bool> {
        if f.dom() != g.dom() || f.cod() != g.cod() {
            return Ok(false);
        }
        term::sub_eq(f, g, self.pres.rewrites())
    }

    fn hom_count(&self, m: &usize, n: &usize) -> Option<u128> {
        if *n == 0 {
            return Some(1);
        }
        if infinitely_many_terms(&self.pres.signature, *m) {
            return None;
        }
        let leaves = self.leaves(*m).ok()?.len() as u128;
        Some(leaves.saturating_pow(*n as u32))
    }

    fn hom_set(&self, m: &usize, n: &usize, cap: u64) -> Option<Vec<Sub>> {
        if self.hom_count(m, n)? > cap as u128 {
            return None;
        }
        let leaves = self.leaves(*m).ok()?;
        let mut out = Vec::new();
        if *n > 0 && leaves.is_empty() {
            return Some(out);
        }
        let mut idx = vec![0usize; *n];
        loop {
            out.push(Sub::new_unchecked(
                *m,
                idx.iter().map(|&i| leaves[i].clone()).collect(),
            ));
            if !term::advance(&mut idx, leaves.len()) {
                break;
            }
        }
        Some(out)
    }

    fn sample_hom(&self, m: &usize, n: &usize, depth: usize, rng: &mut ChaCha8Rng) -> Option<Sub> {
        random_sub(&self.pres.signature, *m, *n, depth, rng)
    }

    fn show_ob(&self, n: &usize) -> String {
        n.to_string()
    }

    fn show_mor(&self, f: &Sub) -> String {
        f.to_string()
    }
}
