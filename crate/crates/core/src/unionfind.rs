//! Lock-free disjoint-set structure over pixel labels.
//!
//! Labels double as parent links: roots satisfy `L(x) = x`. Merging always
//! redirects the larger root to the smaller one, so the surviving
//! representative of a component is the minimum linear index it contains.
//! That rule makes the merged partition independent of execution order and
//! interleaving, which is what the equivalence tests rely on. Union by rank
//! is deliberately not used: it would break min-root determinism.

use std::sync::atomic::AtomicU32;

use crate::grid::{LabelField, ORD};

/// Follows parent links from `x` to its root, halving the path along the way.
/// Compression attempts may lose races; that only costs a retry, never
/// correctness, because parents move strictly toward smaller indices.
pub(crate) fn find_raw(parents: &[AtomicU32], x: u32) -> u32 {
    let mut x = x;
    loop {
        let p = parents[x as usize].load(ORD);
        if p == x {
            return x;
        }
        let gp = parents[p as usize].load(ORD);
        if gp != p {
            let _ = parents[x as usize].compare_exchange_weak(p, gp, ORD, ORD);
        }
        x = gp;
    }
}

/// Merges the sets containing `a` and `b`; the smaller root survives.
pub(crate) fn union_raw(parents: &[AtomicU32], a: u32, b: u32) {
    let mut ra = find_raw(parents, a);
    let mut rb = find_raw(parents, b);
    loop {
        if ra == rb {
            return;
        }
        let (hi, lo) = if ra > rb { (ra, rb) } else { (rb, ra) };
        match parents[hi as usize].compare_exchange(hi, lo, ORD, ORD) {
            Ok(_) => return,
            Err(_) => {
                // hi was concurrently relinked; chase the new roots and retry.
                ra = find_raw(parents, hi);
                rb = find_raw(parents, lo);
            }
        }
    }
}

/// A disjoint-set view over a label store. `find` and `union` take `&self`
/// and are safe to call concurrently from any number of workers.
#[derive(Debug)]
pub struct DisjointSet {
    parents: Vec<AtomicU32>,
}

impl DisjointSet {
    /// `n` singleton sets.
    pub fn new(n: usize) -> Self {
        Self {
            parents: (0..n).map(|i| AtomicU32::new(i as u32)).collect(),
        }
    }

    /// Adopts an existing label field as the parent store. The field must be
    /// acyclic apart from self-loops (true for any watershed intermediate).
    pub fn from_labels(labels: &LabelField) -> Self {
        Self {
            parents: labels.to_vec().into_iter().map(AtomicU32::new).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn find(&self, x: usize) -> usize {
        find_raw(&self.parents, x as u32) as usize
    }

    pub fn union(&self, a: usize, b: usize) {
        union_raw(&self.parents, a as u32, b as u32);
    }

    pub fn same_set(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Flattens every element to its root and returns the result as labels.
    pub fn into_label_field(self) -> LabelField {
        let flat: Vec<u32> = (0..self.parents.len())
            .map(|x| find_raw(&self.parents, x as u32))
            .collect();
        LabelField::from_vec(flat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Textbook sequential union-find with the same min-root merge rule.
    struct SeqDsu {
        parent: Vec<usize>,
    }

    impl SeqDsu {
        fn new(n: usize) -> Self {
            Self {
                parent: (0..n).collect(),
            }
        }
        fn find(&mut self, x: usize) -> usize {
            if self.parent[x] != x {
                let r = self.find(self.parent[x]);
                self.parent[x] = r;
                return r;
            }
            x
        }
        fn union(&mut self, a: usize, b: usize) {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra != rb {
                let (hi, lo) = if ra > rb { (ra, rb) } else { (rb, ra) };
                self.parent[hi] = lo;
            }
        }
    }

    #[test]
    fn find_on_identity_is_identity() {
        let ds = DisjointSet::new(8);
        assert_eq!(ds.find(5), 5);
    }

    #[test]
    fn find_follows_chain_to_root() {
        let labels = LabelField::from_vec(vec![0, 1, 1, 2]);
        let ds = DisjointSet::from_labels(&labels);
        assert_eq!(ds.find(3), 1);
    }

    #[test]
    fn union_is_idempotent_on_self() {
        let ds = DisjointSet::new(8);
        ds.union(5, 5);
        assert_eq!(ds.into_label_field().to_vec(), (0..8u32).collect::<Vec<_>>());
    }

    #[test]
    fn union_keeps_minimum_root() {
        let ds = DisjointSet::new(10);
        ds.union(7, 3);
        assert_eq!(ds.find(7), 3);
        assert_eq!(ds.find(3), 3);
    }

    #[test]
    fn find_is_idempotent() {
        let ds = DisjointSet::new(16);
        ds.union(9, 2);
        ds.union(15, 9);
        let r = ds.find(15);
        assert_eq!(ds.find(r), r);
    }

    #[test]
    fn random_unions_match_sequential_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 256;
        let unions: Vec<(usize, usize)> = (0..400)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let ds = DisjointSet::new(n);
        let mut seq = SeqDsu::new(n);
        for &(a, b) in &unions {
            ds.union(a, b);
            seq.union(a, b);
        }
        for x in 0..n {
            assert_eq!(ds.find(x), seq.find(x));
        }
    }

    #[test]
    fn concurrent_unions_reach_the_sequential_fixed_point() {
        // 1000 random unions applied from many workers at once must produce
        // the same partition as a sequential replay in any order.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        let n = 512;
        let unions: Vec<(usize, usize)> = (0..1000)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();

        let ds = DisjointSet::new(n);
        rayon::scope(|s| {
            for chunk in unions.chunks(125) {
                let ds = &ds;
                s.spawn(move |_| {
                    for &(a, b) in chunk {
                        ds.union(a, b);
                    }
                });
            }
        });

        let mut seq = SeqDsu::new(n);
        for &(a, b) in &unions {
            seq.union(a, b);
        }
        for x in 0..n {
            assert_eq!(ds.find(x), seq.find(x), "component root mismatch at {x}");
        }
    }
}
