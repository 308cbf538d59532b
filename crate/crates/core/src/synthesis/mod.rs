//! Combinatory-logic synthesis over the catalog.
//!
//! Every configuration of every part becomes a [`Combinator`] whose
//! arguments are the configuration's argument groups. A [`Request`] asks for
//! inhabitants of a target type, optionally demanding that some propagated
//! atoms appear somewhere in the assembly. [`inhabit`] builds the tree
//! grammar of all inhabitants; [`enumerate`] lists its terms smallest first.
//!
//! # Propagated atoms
//!
//! A propagated atom `p` is present in a term when some node's combinator
//! result is `≤ {p}`. A node demanded to contain `p` either provides it
//! itself, or hands the demand to exactly one argument. To keep the grammar
//! unambiguous the demand always goes to the *first* argument whose subtree
//! contains `p`; the arguments before it are forbidden from containing `p`.
//! Each assembly is therefore derived by exactly one grammar derivation.

mod check;
mod enumerate;
mod grammar;

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::catalog::{Catalog, JointKind};
use crate::taxonomy::{Atom, Hierarchy, TaxonomyContext};
use crate::types::{CanonicalType, TypeExpr};

pub use check::{check_term, contains_atom, part_count, IllTypedTerm};
pub use enumerate::{count_terms, enumerate, size_quotas, terms_of_size};
pub use grammar::{inhabit, Nonterminal, Production, TreeGrammar};

/// Default number of enumerated terms.
pub const DEFAULT_LIMIT: usize = 100;
/// Default cap on the number of propagated atoms.
pub const DEFAULT_PROPAGATED_CAP: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("request references unknown atom {0}")]
    UnknownAtomInRequest(Atom),
    #[error("request target is empty")]
    EmptyTarget,
    #[error("request target may not contain formats atom {0}")]
    FormatsInTarget(Atom),
    #[error("{count} propagated atoms exceed the cap of {cap}")]
    TooManyPropagated { count: usize, cap: usize },
    #[error("limit must be positive")]
    ZeroLimit,
    #[error("requested part counts must be positive")]
    ZeroSize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CombinatorId {
    pub part_id: String,
    pub config_id: String,
}

impl fmt::Display for CombinatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.part_id, self.config_id)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorArg {
    pub required: CanonicalType,
    /// Number of identical sub-assemblies this argument stands for.
    pub multiplicity: usize,
    pub joint_kind: JointKind,
    pub members: Vec<String>,
}

/// A typed building block: one configuration of one part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combinator {
    pub id: CombinatorId,
    pub args: Vec<CombinatorArg>,
    pub result: CanonicalType,
    pub root_uuid: String,
}

impl Combinator {
    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

/// One combinator per configuration, ordered by `(part id, config id)`.
pub fn combinators_from_catalog(catalog: &Catalog) -> Vec<Combinator> {
    catalog
        .configurations()
        .into_iter()
        .map(|cfg| Combinator {
            id: CombinatorId { part_id: cfg.part_id, config_id: cfg.config_id.clone() },
            args: cfg
                .arg_groups
                .into_iter()
                .map(|g| CombinatorArg {
                    required: g.required,
                    multiplicity: g.members.len(),
                    joint_kind: g.joint_kind,
                    members: g.members,
                })
                .collect(),
            result: cfg.provided,
            root_uuid: cfg.config_id,
        })
        .collect()
}

/// A synthesis request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Request {
    /// Parts and attributes atoms the root must provide.
    pub target: TypeExpr,
    /// Atoms that must appear somewhere in the assembly.
    pub propagated: TypeExpr,
    /// Requested part counts; `None` means smallest first.
    pub sizes: Option<BTreeSet<usize>>,
    pub limit: usize,
}

impl Request {
    pub fn new(target: TypeExpr) -> Self {
        Request { target, propagated: TypeExpr::top(), sizes: None, limit: DEFAULT_LIMIT }
    }

    pub fn with_propagated(mut self, propagated: TypeExpr) -> Self {
        self.propagated = propagated;
        self
    }

    pub fn with_sizes<I: IntoIterator<Item = usize>>(mut self, sizes: I) -> Self {
        self.sizes = Some(sizes.into_iter().collect());
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn validate(&self, ctx: &TaxonomyContext, propagated_cap: usize) -> Result<(), SynthesisError> {
        if self.target.is_empty() {
            return Err(SynthesisError::EmptyTarget);
        }
        if let Some(a) = self.target.in_hierarchy(Hierarchy::Formats).next() {
            return Err(SynthesisError::FormatsInTarget(a.clone()));
        }
        if let Some(a) = self.target.first_unknown(ctx).or_else(|| self.propagated.first_unknown(ctx)) {
            return Err(SynthesisError::UnknownAtomInRequest(a.clone()));
        }
        if self.propagated.len() > propagated_cap {
            return Err(SynthesisError::TooManyPropagated { count: self.propagated.len(), cap: propagated_cap });
        }
        if self.limit == 0 {
            return Err(SynthesisError::ZeroLimit);
        }
        if self.sizes.as_ref().is_some_and(|s| s.contains(&0)) {
            return Err(SynthesisError::ZeroSize);
        }
        Ok(())
    }
}

/// Where a demanded propagated atom is satisfied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    /// The combinator's own result provides it.
    Intrinsic,
    /// Handed to the argument with this index.
    Arg(usize),
}

/// Combinator plus the placement of every demanded atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariantId {
    pub combinator: CombinatorId,
    /// Sorted by atom.
    pub assignment: Vec<(Atom, Placement)>,
}

impl VariantId {
    pub fn plain(combinator: CombinatorId) -> Self {
        VariantId { combinator, assignment: Vec::new() }
    }

    /// Assignment key: `hierarchy:name=*` for intrinsic atoms and
    /// `hierarchy:name=i` for atoms handed to argument `i`, comma separated.
    pub fn assignment_key(&self) -> String {
        let mut key = String::new();
        for (i, (atom, placement)) in self.assignment.iter().enumerate() {
            if i > 0 {
                key.push(',');
            }
            key.push_str(&atom.to_string());
            match placement {
                Placement::Intrinsic => key.push_str("=*"),
                Placement::Arg(a) => {
                    key.push('=');
                    key.push_str(&a.to_string());
                }
            }
        }
        key
    }

    /// Inverse of `Display`, for ids without `/` in part or config ids.
    pub fn parse(s: &str) -> Option<VariantId> {
        let (part_id, rest) = s.split_once('/')?;
        let (config_id, key) = rest.split_once('/')?;
        let mut assignment = Vec::new();
        if !key.is_empty() {
            for entry in key.split(',') {
                let (atom, placement) = entry.rsplit_once('=')?;
                let (hierarchy, name) = atom.split_once(':')?;
                let placement = match placement {
                    "*" => Placement::Intrinsic,
                    i => Placement::Arg(i.parse().ok()?),
                };
                assignment.push((Atom::new(hierarchy.parse().ok()?, name), placement));
            }
        }
        Some(VariantId {
            combinator: CombinatorId { part_id: part_id.into(), config_id: config_id.into() },
            assignment,
        })
    }
}

impl Ord for VariantId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.combinator
            .cmp(&other.combinator)
            .then_with(|| self.assignment.cmp(&other.assignment))
    }
}

impl PartialOrd for VariantId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.combinator, self.assignment_key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantArg {
    /// Original argument type met with the atoms handed to it.
    pub required: CanonicalType,
    /// Propagated atoms this argument's subtree must contain.
    pub demand: BTreeSet<Atom>,
    /// Propagated atoms this argument's subtree must not contain.
    pub excluded: BTreeSet<Atom>,
}

/// A combinator with its types rewritten for a demanded set of propagated
/// atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorVariant {
    pub id: VariantId,
    pub args: Vec<VariantArg>,
    /// Original result met with the demanded atoms.
    pub result: CanonicalType,
}

/// Canonical form of `atoms`; atoms unknown to `ctx` are kept as is.
pub(crate) fn canonical_of<'a, I>(ctx: &TaxonomyContext, atoms: I) -> CanonicalType
where
    I: IntoIterator<Item = &'a Atom>,
{
    crate::types::minimize(ctx, &atoms.into_iter().cloned().collect())
}

/// Whether `ty ≤ {atom}`.
pub(crate) fn provides_atom(ctx: &TaxonomyContext, ty: &TypeExpr, atom: &Atom) -> bool {
    ty.atoms().any(|a| ctx.is_subatom(a, atom))
}

/// Rewrites `combinator` for the propagated atoms in `demanded`.
///
/// Atoms the result already provides are intrinsic. Every total assignment
/// of the remaining atoms to arguments yields one variant, in lexicographic
/// order of the assignment (first atom most significant). A leaf cannot
/// source anything, so it has no variants when a residual atom remains.
pub fn propagate_variants(
    ctx: &TaxonomyContext,
    combinator: &Combinator,
    demanded: &BTreeSet<Atom>,
) -> Vec<CombinatorVariant> {
    let (intrinsic, residual): (Vec<&Atom>, Vec<&Atom>) =
        demanded.iter().partition(|p| provides_atom(ctx, &combinator.result, p));
    let arity = combinator.arity();
    if arity == 0 && !residual.is_empty() {
        return Vec::new();
    }
    let result = canonical_of(ctx, combinator.result.atoms().chain(demanded.iter()));

    let mut variants = Vec::new();
    let mut choice = alloc::vec![0usize; residual.len()];
    loop {
        let mut assignment: Vec<(Atom, Placement)> =
            intrinsic.iter().map(|a| ((*a).clone(), Placement::Intrinsic)).collect();
        assignment.extend(residual.iter().zip(&choice).map(|(a, i)| ((*a).clone(), Placement::Arg(*i))));
        assignment.sort();

        let args = combinator
            .args
            .iter()
            .enumerate()
            .map(|(i, arg)| {
                let demand: BTreeSet<Atom> = residual
                    .iter()
                    .zip(&choice)
                    .filter(|(_, c)| **c == i)
                    .map(|(a, _)| (*a).clone())
                    .collect();
                let excluded: BTreeSet<Atom> = residual
                    .iter()
                    .zip(&choice)
                    .filter(|(_, c)| **c > i)
                    .map(|(a, _)| (*a).clone())
                    .collect();
                VariantArg { required: canonical_of(ctx, arg.required.atoms().chain(demand.iter())), demand, excluded }
            })
            .collect();
        variants.push(CombinatorVariant {
            id: VariantId { combinator: combinator.id.clone(), assignment },
            args,
            result: result.clone(),
        });

        // Odometer over assignments, last atom fastest.
        let mut pos = residual.len();
        loop {
            if pos == 0 {
                return variants;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < arity {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// A synthesized assembly candidate: a tree of combinator variants.
///
/// The derived order compares the root variant first and then the children
/// left to right, which equals lexicographic order of the pre-order variant
/// sequence because pre-order encodings of complete terms are prefix-free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub variant: VariantId,
    pub children: Vec<Term>,
}

impl Term {
    pub fn leaf(variant: VariantId) -> Self {
        Term { variant, children: Vec::new() }
    }

    pub fn new(variant: VariantId, children: Vec<Term>) -> Self {
        Term { variant, children }
    }

    /// Number of term nodes (not weighted by multiplicity).
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Term::node_count).sum::<usize>()
    }

    /// Variant ids in pre-order.
    pub fn preorder(&self) -> Vec<&VariantId> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![self];
        while let Some(t) = stack.pop() {
            out.push(&t.variant);
            stack.extend(t.children.iter().rev());
        }
        out
    }

    /// The same tree with propagation assignments dropped.
    pub fn erased(&self) -> Term {
        Term {
            variant: VariantId::plain(self.variant.combinator.clone()),
            children: self.children.iter().map(Term::erased).collect(),
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures;
