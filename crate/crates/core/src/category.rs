//! The abstract category interface every instance implements.
//!
//! Composition is written in diagrammatic order throughout: `compose(f, g)`
//! is "first `f`, then `g`" and requires `cod(f) == dom(g)`.

use std::fmt::Debug;
use std::hash::Hash;

use rand_chacha::ChaCha8Rng;

use crate::error::Result;

pub type MorOf<C> = <C as Category>::Mor;
pub type ObOf<C> = <C as Category>::Ob;

pub trait Category {
    type Ob: Clone + PartialEq + Debug;
    type Mor: Clone + Eq + Hash + Debug;

    fn dom(&self, f: &Self::Mor) -> Self::Ob;
    fn cod(&self, f: &Self::Mor) -> Self::Ob;
    fn id(&self, x: &Self::Ob) -> Self::Mor;
    fn compose(&self, f: &Self::Mor, g: &Self::Mor) -> Result<Self::Mor>;

    /// A representative such that two morphisms are equal iff their
    /// canonical forms are identical.
    fn canon(&self, f: &Self::Mor) -> Result<Self::Mor> {
        Ok(f.clone())
    }

    fn mor_eq(&self, f: &Self::Mor, g: &Self::Mor) -> Result<bool> {
        if f == g {
            return Ok(true);
        }
        Ok(self.canon(f)? == self.canon(g)?)
    }

    /// Size of `Hom(x, y)`, or `None` when it is infinite.
    fn hom_count(&self, x: &Self::Ob, y: &Self::Ob) -> Option<u128>;

    /// Every morphism `x -> y` (canonical forms, no repeats), when the
    /// hom-set is finite and has at most `cap` elements.
    fn hom_set(&self, x: &Self::Ob, y: &Self::Ob, cap: u64) -> Option<Vec<Self::Mor>>;

    /// A random morphism `x -> y`, `None` when the hom-set is empty.
    /// `depth` bounds syntactic size where that applies.
    fn sample_hom(
        &self,
        x: &Self::Ob,
        y: &Self::Ob,
        depth: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<Self::Mor>;

    fn show_ob(&self, x: &Self::Ob) -> String {
        format!("{x:?}")
    }

    fn show_mor(&self, f: &Self::Mor) -> String {
        format!("{f:?}")
    }
}

/// The whole hom-set when it has at most `limit` elements, otherwise
/// `limit` random draws.
pub fn probe_homs<C: Category>(
    cat: &C,
    x: &C::Ob,
    y: &C::Ob,
    limit: usize,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<C::Mor> {
    if let Some(all) = cat.hom_set(x, y, limit as u64) {
        return all;
    }
    (0..limit)
        .map_while(|_| cat.sample_hom(x, y, depth, rng))
        .collect()
}

/// Composes a non-empty chain left to right.
pub fn compose_all<C: Category>(cat: &C, chain: &[&C::Mor]) -> Result<C::Mor> {
    let (first, rest) = chain.split_first().expect("non-empty chain");
    rest.iter()
        .try_fold((*first).clone(), |acc, g| cat.compose(&acc, g))
}
