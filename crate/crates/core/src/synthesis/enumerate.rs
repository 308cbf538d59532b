//! Counting and ordered enumeration of grammar terms by part count.
//!
//! Terms of one part count are listed in lexicographic order of their
//! pre-order variant sequence. Because that order compares the root first
//! and then the children left to right, the `k` smallest terms of a
//! nonterminal can be assembled from the `k` smallest terms of its children
//! without materializing everything.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{Request, Term, TreeGrammar};

struct Enumerator<'g> {
    grammar: &'g TreeGrammar,
    /// `counts[n][s]`: number of terms of nonterminal `n` with part count `s`.
    counts: Vec<Vec<u128>>,
    computed_up_to: usize,
    memo: BTreeMap<(usize, usize), (Vec<Term>, bool)>,
}

impl<'g> Enumerator<'g> {
    fn new(grammar: &'g TreeGrammar) -> Self {
        Enumerator {
            grammar,
            counts: alloc::vec![alloc::vec![0]; grammar.nonterminals().len()],
            computed_up_to: 0,
            memo: BTreeMap::new(),
        }
    }

    fn children_of(&self, nonterminal: usize, production: usize) -> Vec<(usize, usize)> {
        let p = &self.grammar.productions(nonterminal)[production];
        p.children.iter().copied().zip(self.grammar.multiplicities(p)).collect()
    }

    fn count(&self, nonterminal: usize, size: usize) -> u128 {
        self.counts[nonterminal].get(size).copied().unwrap_or(0)
    }

    /// Number of child tuples of `seq` with weighted total `rem`, using
    /// counts computed so far.
    fn seq_count(&self, seq: &[(usize, usize)], rem: usize) -> u128 {
        // table[r] for the current suffix, built right to left.
        let mut table = alloc::vec![0u128; rem + 1];
        table[0] = 1;
        for &(child, mult) in seq.iter().rev() {
            let mut next = alloc::vec![0u128; rem + 1];
            for (r, slot) in next.iter_mut().enumerate() {
                let mut total = 0u128;
                let mut s1 = 1;
                while mult * s1 <= r {
                    let c = self.count(child, s1);
                    if c != 0 {
                        total = total.saturating_add(c.saturating_mul(table[r - mult * s1]));
                    }
                    s1 += 1;
                }
                *slot = total;
            }
            table = next;
        }
        table[rem]
    }

    fn ensure_counts(&mut self, size: usize) {
        while self.computed_up_to < size {
            let s = self.computed_up_to + 1;
            let mut column = Vec::with_capacity(self.counts.len());
            for n in 0..self.counts.len() {
                let total = (0..self.grammar.productions(n).len())
                    .map(|p| self.seq_count(&self.children_of(n, p), s - 1))
                    .fold(0u128, u128::saturating_add);
                column.push(total);
            }
            for (n, c) in column.into_iter().enumerate() {
                self.counts[n].push(c);
            }
            self.computed_up_to = s;
        }
    }

    /// The `k` smallest terms of `nonterminal` with part count `size`.
    fn first_k(&mut self, nonterminal: usize, size: usize, k: usize) -> Vec<Term> {
        if k == 0 || self.count(nonterminal, size) == 0 {
            return Vec::new();
        }
        if let Some((terms, complete)) = self.memo.get(&(nonterminal, size)) {
            if *complete || terms.len() >= k {
                return terms.iter().take(k).cloned().collect();
            }
        }
        let mut out = Vec::new();
        for p in 0..self.grammar.productions(nonterminal).len() {
            if out.len() >= k {
                break;
            }
            let grammar = self.grammar;
            let id = &grammar.variant(grammar.productions(nonterminal)[p].variant).id;
            let children = self.children_of(nonterminal, p);
            for tuple in self.seq_first(&children, size - 1, k - out.len()) {
                out.push(Term::new(id.clone(), tuple));
            }
        }
        let complete = out.len() < k;
        self.memo.insert((nonterminal, size), (out.clone(), complete));
        out
    }

    /// The `k` smallest child tuples of `seq` with weighted total `rem`.
    fn seq_first(&mut self, seq: &[(usize, usize)], rem: usize, k: usize) -> Vec<Vec<Term>> {
        if k == 0 {
            return Vec::new();
        }
        let Some((&(child, mult), rest)) = seq.split_first() else {
            return if rem == 0 { alloc::vec![Vec::new()] } else { Vec::new() };
        };
        let mut candidates: Vec<(Term, usize)> = Vec::new();
        let mut s1 = 1;
        while mult * s1 <= rem {
            if self.count(child, s1) > 0 && self.seq_count(rest, rem - mult * s1) > 0 {
                // Each candidate completes to at least one tuple.
                candidates.extend(self.first_k(child, s1, k).into_iter().map(|t| (t, s1)));
            }
            s1 += 1;
        }
        candidates.sort_by(|a, b| a.0.cmp(&b.0));
        candidates.truncate(k);

        let mut out = Vec::new();
        for (head, s1) in candidates {
            for mut tail in self.seq_first(rest, rem - mult * s1, k - out.len()) {
                tail.insert(0, head.clone());
                out.push(tail);
            }
            if out.len() >= k {
                break;
            }
        }
        out
    }
}

/// Exact number of terms with the given multiplicity-weighted part count.
/// Saturates at `u128::MAX`.
pub fn count_terms(grammar: &TreeGrammar, part_count: usize) -> u128 {
    let Some(start) = grammar.start() else { return 0 };
    if part_count == 0 {
        return 0;
    }
    let mut e = Enumerator::new(grammar);
    e.ensure_counts(part_count);
    e.count(start, part_count)
}

/// All terms of one part count, in enumeration order.
pub fn terms_of_size(grammar: &TreeGrammar, part_count: usize) -> Vec<Term> {
    let Some(start) = grammar.start() else { return Vec::new() };
    if part_count == 0 {
        return Vec::new();
    }
    let mut e = Enumerator::new(grammar);
    e.ensure_counts(part_count);
    e.first_k(start, part_count, usize::MAX)
}

/// Per-size quotas: `⌊limit / |sizes|⌋` each, the remainder one apiece to the
/// smallest sizes.
pub fn size_quotas(sizes: &BTreeSet<usize>, limit: usize) -> Vec<(usize, usize)> {
    if sizes.is_empty() {
        return Vec::new();
    }
    let base = limit / sizes.len();
    let extra = limit % sizes.len();
    sizes.iter().enumerate().map(|(i, s)| (*s, base + usize::from(i < extra))).collect()
}

/// The first `request.limit` terms: smallest part count first, or split
/// across `request.sizes` by [`size_quotas`].
pub fn enumerate(grammar: &TreeGrammar, request: &Request) -> Vec<Term> {
    let Some(start) = grammar.start() else { return Vec::new() };
    let mut e = Enumerator::new(grammar);
    let mut out = Vec::new();
    match &request.sizes {
        Some(sizes) => {
            for (size, quota) in size_quotas(sizes, request.limit) {
                if size == 0 || quota == 0 {
                    continue;
                }
                e.ensure_counts(size);
                out.extend(e.first_k(start, size, quota));
            }
        }
        None => {
            let max = grammar.max_part_count();
            let mut size = 1;
            while out.len() < request.limit && max.is_none_or(|m| size <= m) {
                e.ensure_counts(size);
                out.extend(e.first_k(start, size, request.limit - out.len()));
                size += 1;
            }
        }
    }
    out
}
