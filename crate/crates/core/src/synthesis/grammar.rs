use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use super::{canonical_of, propagate_variants, provides_atom, Combinator, CombinatorVariant, Request, SynthesisError};
use crate::taxonomy::{Atom, TaxonomyContext};
use crate::types::{subtype_le, CanonicalType};

/// A grammar nonterminal: all terms whose root result is below `required`,
/// whose subtree contains every atom of `demand`, and none of `excluded`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nonterminal {
    pub required: CanonicalType,
    pub demand: BTreeSet<Atom>,
    pub excluded: BTreeSet<Atom>,
}

impl Nonterminal {
    /// The intersection type this nonterminal stands for.
    pub fn ty(&self, ctx: &TaxonomyContext) -> CanonicalType {
        canonical_of(ctx, self.required.atoms().chain(self.demand.iter()))
    }
}

/// Application of a variant to child nonterminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    /// Index into [`TreeGrammar::variants`].
    pub variant: usize,
    /// Indices into [`TreeGrammar::nonterminals`], one per argument.
    pub children: Vec<usize>,
}

/// The inhabitation result: every nonterminal is reachable from the start
/// and derives at least one finite term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeGrammar {
    start_type: CanonicalType,
    start: Option<usize>,
    nonterminals: Vec<Nonterminal>,
    rules: Vec<Vec<Production>>,
    variants: Vec<CombinatorVariant>,
    /// Combinator index of each variant.
    variant_source: Vec<usize>,
    combinators: Vec<Combinator>,
}

impl TreeGrammar {
    /// Requested type: canonical form of target and propagated atoms.
    pub fn start_type(&self) -> &CanonicalType {
        &self.start_type
    }

    /// `None` when the request has no inhabitant.
    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_none()
    }

    pub fn nonterminals(&self) -> &[Nonterminal] {
        &self.nonterminals
    }

    pub fn productions(&self, nonterminal: usize) -> &[Production] {
        &self.rules[nonterminal]
    }

    pub fn production_count(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }

    pub fn variants(&self) -> &[CombinatorVariant] {
        &self.variants
    }

    pub fn variant(&self, index: usize) -> &CombinatorVariant {
        &self.variants[index]
    }

    pub fn combinators(&self) -> &[Combinator] {
        &self.combinators
    }

    /// The unmodified combinator behind a variant.
    pub fn source(&self, variant: usize) -> &Combinator {
        &self.combinators[self.variant_source[variant]]
    }

    /// Argument multiplicities of a production, in argument order.
    pub fn multiplicities(&self, production: &Production) -> impl Iterator<Item = usize> + '_ {
        self.source(production.variant).args.iter().map(|a| a.multiplicity)
    }

    /// Whether the grammar derives only finitely many terms.
    pub fn is_finite(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        fn visit(g: &TreeGrammar, n: usize, state: &mut [u8]) -> bool {
            match state[n] {
                1 => return false,
                2 => return true,
                _ => {}
            }
            state[n] = 1;
            for p in &g.rules[n] {
                for &c in &p.children {
                    if !visit(g, c, state) {
                        return false;
                    }
                }
            }
            state[n] = 2;
            true
        }
        let mut state = alloc::vec![0u8; self.nonterminals.len()];
        self.start.is_none_or(|s| visit(self, s, &mut state))
    }

    /// Largest part count of any term, for finite grammars.
    pub fn max_part_count(&self) -> Option<usize> {
        if !self.is_finite() {
            return None;
        }
        fn max_of(g: &TreeGrammar, n: usize, memo: &mut [Option<usize>]) -> usize {
            if let Some(m) = memo[n] {
                return m;
            }
            let m = g.rules[n]
                .iter()
                .map(|p| {
                    1 + p
                        .children
                        .iter()
                        .zip(g.multiplicities(p).collect::<Vec<_>>())
                        .map(|(c, mult)| mult * max_of(g, *c, memo))
                        .sum::<usize>()
                })
                .max()
                .unwrap_or(0);
            memo[n] = Some(m);
            m
        }
        let mut memo = alloc::vec![None; self.nonterminals.len()];
        Some(self.start.map_or(0, |s| max_of(self, s, &mut memo)))
    }
}

/// Demand-driven inhabitation of `request.target` with the propagated atoms
/// demanded, followed by pruning of unproductive and unreachable
/// nonterminals.
pub fn inhabit(
    ctx: &TaxonomyContext,
    combinators: &[Combinator],
    request: &Request,
) -> Result<TreeGrammar, SynthesisError> {
    request.validate(ctx, usize::MAX)?;
    let start_nt = Nonterminal {
        required: canonical_of(ctx, request.target.atoms()),
        demand: request.propagated.atom_set().clone(),
        excluded: BTreeSet::new(),
    };
    let start_type = start_nt.ty(ctx);

    let mut index: BTreeMap<Nonterminal, usize> = BTreeMap::new();
    let mut nonterminals: Vec<Nonterminal> = Vec::new();
    let mut rules: Vec<Vec<Production>> = Vec::new();
    let mut variants: Vec<CombinatorVariant> = Vec::new();
    let mut variant_source: Vec<usize> = Vec::new();
    let mut variant_memo: BTreeMap<(usize, BTreeSet<Atom>), Vec<usize>> = BTreeMap::new();
    let mut queue = VecDeque::new();

    let mut intern = |nt: Nonterminal, nonterminals: &mut Vec<Nonterminal>, rules: &mut Vec<Vec<Production>>, queue: &mut VecDeque<usize>| {
        *index.entry(nt).or_insert_with_key(|nt| {
            nonterminals.push(nt.clone());
            rules.push(Vec::new());
            queue.push_back(nonterminals.len() - 1);
            nonterminals.len() - 1
        })
    };
    intern(start_nt, &mut nonterminals, &mut rules, &mut queue);

    while let Some(n) = queue.pop_front() {
        let nt = nonterminals[n].clone();
        if nt.demand.intersection(&nt.excluded).next().is_some() {
            continue;
        }
        let mut productions = Vec::new();
        for (ci, comb) in combinators.iter().enumerate() {
            if !subtype_le(ctx, &comb.result, &nt.required) {
                continue;
            }
            if nt.excluded.iter().any(|f| provides_atom(ctx, &comb.result, f)) {
                continue;
            }
            let vids = variant_memo.entry((ci, nt.demand.clone())).or_insert_with(|| {
                propagate_variants(ctx, comb, &nt.demand)
                    .into_iter()
                    .map(|v| {
                        variants.push(v);
                        variant_source.push(ci);
                        variants.len() - 1
                    })
                    .collect()
            });
            for &vi in vids.iter() {
                let children = variants[vi]
                    .args
                    .iter()
                    .zip(&comb.args)
                    .map(|(va, arg)| {
                        let child = Nonterminal {
                            required: arg.required.clone(),
                            demand: va.demand.clone(),
                            excluded: nt.excluded.union(&va.excluded).cloned().collect(),
                        };
                        intern(child, &mut nonterminals, &mut rules, &mut queue)
                    })
                    .collect();
                productions.push(Production { variant: vi, children });
            }
        }
        productions.sort_by(|a, b| variants[a.variant].id.cmp(&variants[b.variant].id));
        rules[n] = productions;
    }

    Ok(prune(start_type, nonterminals, rules, variants, variant_source, combinators.to_vec()))
}

fn prune(
    start_type: CanonicalType,
    nonterminals: Vec<Nonterminal>,
    rules: Vec<Vec<Production>>,
    variants: Vec<CombinatorVariant>,
    variant_source: Vec<usize>,
    combinators: Vec<Combinator>,
) -> TreeGrammar {
    let n = nonterminals.len();
    let mut productive = alloc::vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if !productive[i] && rules[i].iter().any(|p| p.children.iter().all(|c| productive[*c])) {
                productive[i] = true;
                changed = true;
            }
        }
    }

    let mut reachable = alloc::vec![false; n];
    let mut order = Vec::new();
    if n > 0 && productive[0] {
        let mut stack = alloc::vec![0usize];
        reachable[0] = true;
        while let Some(i) = stack.pop() {
            order.push(i);
            for p in rules[i].iter().filter(|p| p.children.iter().all(|c| productive[*c])) {
                for &c in &p.children {
                    if !reachable[c] {
                        reachable[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
    }
    order.sort_unstable();

    let renumber: BTreeMap<usize, usize> = order.iter().enumerate().map(|(new, old)| (*old, new)).collect();
    let mut used_variants = BTreeMap::new();
    let mut new_variants = Vec::new();
    let mut new_sources = Vec::new();
    let mut new_rules = Vec::with_capacity(order.len());
    for &old in &order {
        let prods = rules[old]
            .iter()
            .filter(|p| p.children.iter().all(|c| productive[*c]))
            .map(|p| {
                let variant = *used_variants.entry(p.variant).or_insert_with(|| {
                    new_variants.push(variants[p.variant].clone());
                    new_sources.push(variant_source[p.variant]);
                    new_variants.len() - 1
                });
                Production { variant, children: p.children.iter().map(|c| renumber[c]).collect() }
            })
            .collect();
        new_rules.push(prods);
    }

    TreeGrammar {
        start_type,
        start: if order.is_empty() { None } else { Some(0) },
        nonterminals: order.iter().map(|i| nonterminals[*i].clone()).collect(),
        rules: new_rules,
        variants: new_variants,
        variant_source: new_sources,
        combinators,
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{combinators_from_catalog, Request};
    use super::*;
    use crate::catalog::Catalog;
    use crate::types::TypeExpr;

    fn arm_request() -> Request {
        Request::new(TypeExpr::atom(Atom::parts("Arm")))
    }

    #[test]
    fn toy_arm_grammar_shape() {
        let cat = toy_arm_catalog(false);
        let g = inhabit(cat.taxonomy(), &combinators_from_catalog(&cat), &arm_request()).unwrap();
        // Oracle by hand: Arm → base(Link), Link → bracket(Eff), Eff → gripper.
        assert_eq!(g.nonterminals().len(), 3);
        assert_eq!(g.production_count(), 3);
        assert_eq!(g.start_type().as_expr(), &TypeExpr::atom(Atom::parts("Arm")));
        assert!(g.is_finite());
        assert_eq!(g.max_part_count(), Some(3));
    }

    #[test]
    fn empty_catalog_has_no_start() {
        let ctx = arm_taxonomy();
        let g = inhabit(&ctx, &combinators_from_catalog(&Catalog::empty(ctx.clone())), &arm_request()).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.nonterminals().len(), 0);
        assert_eq!(g.production_count(), 0);
    }

    #[test]
    fn unknown_atom_in_request() {
        let cat = toy_arm_catalog(false);
        let req = Request::new(TypeExpr::atom(Atom::parts("Ghost")));
        assert!(matches!(
            inhabit(cat.taxonomy(), &combinators_from_catalog(&cat), &req),
            Err(SynthesisError::UnknownAtomInRequest(_))
        ));
    }

    #[test]
    fn extension_makes_grammar_infinite() {
        let cat = toy_arm_catalog(true);
        let g = inhabit(cat.taxonomy(), &combinators_from_catalog(&cat), &arm_request()).unwrap();
        assert!(!g.is_finite());
        assert_eq!(g.max_part_count(), None);
    }

    #[test]
    fn propagated_demand_routes_to_rotation_bracket() {
        let cat = self_rotate_catalog(true);
        let req = arm_request().with_propagated(TypeExpr::atom(Atom::attributes("SelfRotate")));
        let g = inhabit(cat.taxonomy(), &combinators_from_catalog(&cat), &req).unwrap();
        let start = g.start().unwrap();
        // Every production carrying the demand hands it on or is the
        // rotation bracket itself.
        for (i, nt) in g.nonterminals().iter().enumerate() {
            if nt.demand.is_empty() {
                continue;
            }
            for p in g.productions(i) {
                let comb = g.source(p.variant);
                let handed_on = p.children.iter().any(|c| !g.nonterminals()[*c].demand.is_empty());
                assert!(comb.id.part_id == "rot-bracket" || handed_on);
            }
        }
        assert!(!g.nonterminals()[start].demand.is_empty());

        let without = self_rotate_catalog(false);
        let g = inhabit(without.taxonomy(), &combinators_from_catalog(&without), &req).unwrap();
        assert!(g.is_empty());
    }
}
