//! The set of broken bonds.

use std::collections::BTreeSet;

/// Broken bonds as unordered pairs `(p, q)` with `p < q`, plus per-node
/// partner lists for row-local gathers.
///
/// Bonds only ever enter the ledger; there is no removal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BondLedger {
    pairs: BTreeSet<(usize, usize)>,
    partners: Vec<Vec<usize>>,
}

impl BondLedger {
    pub fn new(n_nodes: usize) -> Self {
        Self { pairs: BTreeSet::new(), partners: vec![Vec::new(); n_nodes] }
    }

    /// Break `(p, q)`. Returns `false` if it was already broken.
    pub fn insert(&mut self, p: usize, q: usize) -> bool {
        assert_ne!(p, q, "a node cannot bond with itself");
        let key = (p.min(q), p.max(q));
        if !self.pairs.insert(key) {
            return false;
        }
        self.partners[p].push(q);
        self.partners[q].push(p);
        true
    }

    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.pairs.contains(&(p.min(q), p.max(q)))
    }

    /// Partners of `p` across broken bonds (the set `v_p`).
    pub fn broken(&self, p: usize) -> &[usize] {
        &self.partners[p]
    }

    pub fn broken_count(&self, p: usize) -> usize {
        self.partners[p].len()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn nodes(&self) -> usize {
        self.partners.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn memory_bytes(&self) -> usize {
        self.pairs.len() * 48 + self.partners.len() * 24
    }
}
