use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Placement, Term};
use crate::catalog::{derive_configurations, Catalog, Configuration};
use crate::taxonomy::Atom;
use crate::types::{canonicalize, subtype_le, CanonicalType, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IllTypedReason {
    UnknownPart(String),
    UnknownConfiguration(String),
    ArityMismatch { expected: usize, got: usize },
    /// Assigned as intrinsic, but the result does not provide it.
    NotIntrinsic(Atom),
    NoSuchArgument { atom: Atom, arg: usize },
    DuplicateAssignment(Atom),
    ArgumentMismatch { arg: usize, expected: TypeExpr, found: TypeExpr },
    UnknownAtom(Atom),
}

/// A term that does not type-check, with the child-index path to the
/// offending node.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("ill-typed term at {}: {reason:?}", path_string(.path))]
pub struct IllTypedTerm {
    pub path: Vec<usize>,
    pub reason: IllTypedReason,
}

fn path_string(path: &[usize]) -> String {
    let mut s = String::from("0");
    for p in path {
        s.push('.');
        s.push_str(&alloc::format!("{p}"));
    }
    s
}

impl fmt::Display for IllTypedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn configuration(catalog: &Catalog, term: &Term) -> Result<Configuration, IllTypedReason> {
    let id = &term.variant.combinator;
    let part = catalog.part(&id.part_id).ok_or_else(|| IllTypedReason::UnknownPart(id.part_id.clone()))?;
    derive_configurations(catalog.taxonomy(), part)
        .ok()
        .and_then(|cs| cs.into_iter().find(|c| c.config_id == id.config_id))
        .ok_or_else(|| IllTypedReason::UnknownConfiguration(id.config_id.clone()))
}

/// Recomputes the type of `term` bottom-up from the catalog's configurations
/// and each node's propagation assignment, checking every argument.
///
/// The type of a node is its configuration's provided type met with all
/// atoms its assignment places. An atom placed on argument `i` is added to
/// that argument's required type.
pub fn check_term(catalog: &Catalog, term: &Term) -> Result<CanonicalType, IllTypedTerm> {
    let mut path = Vec::new();
    check_at(catalog, term, &mut path)
}

fn check_at(catalog: &Catalog, term: &Term, path: &mut Vec<usize>) -> Result<CanonicalType, IllTypedTerm> {
    let fail = |path: &Vec<usize>, reason| IllTypedTerm { path: path.clone(), reason };
    let ctx = catalog.taxonomy();
    let config = configuration(catalog, term).map_err(|r| fail(path, r))?;
    if config.arg_groups.len() != term.children.len() {
        return Err(fail(
            path,
            IllTypedReason::ArityMismatch { expected: config.arg_groups.len(), got: term.children.len() },
        ));
    }

    let mut placed_per_arg: Vec<TypeExpr> = alloc::vec![TypeExpr::top(); term.children.len()];
    let mut seen = BTreeSet::new();
    for (atom, placement) in &term.variant.assignment {
        if !seen.insert(atom) {
            return Err(fail(path, IllTypedReason::DuplicateAssignment(atom.clone())));
        }
        match placement {
            Placement::Intrinsic => {
                if !subtype_le(ctx, &config.provided, &TypeExpr::atom(atom.clone())) {
                    return Err(fail(path, IllTypedReason::NotIntrinsic(atom.clone())));
                }
            }
            Placement::Arg(i) => match placed_per_arg.get_mut(*i) {
                Some(t) => {
                    t.insert(atom.clone());
                }
                None => return Err(fail(path, IllTypedReason::NoSuchArgument { atom: atom.clone(), arg: *i })),
            },
        }
    }

    for (i, (child, group)) in term.children.iter().zip(&config.arg_groups).enumerate() {
        path.push(i);
        let found = check_at(catalog, child, path)?;
        let expected = group.required.union(&placed_per_arg[i]);
        if !subtype_le(ctx, &found, &expected) {
            return Err(fail(
                path,
                IllTypedReason::ArgumentMismatch { arg: i, expected, found: found.into_expr() },
            ));
        }
        path.pop();
    }

    let placed: TypeExpr = term.variant.assignment.iter().map(|(a, _)| a.clone()).collect();
    canonicalize(ctx, &config.provided.union(&placed)).map_err(|crate::types::TypeError::UnknownAtom(a)| {
        fail(path, IllTypedReason::UnknownAtom(a))
    })
}

/// Multiplicity-weighted part count: `1 + Σ mᵢ · count(childᵢ)`.
pub fn part_count(catalog: &Catalog, term: &Term) -> Option<usize> {
    let config = configuration(catalog, term).ok()?;
    let mut total = 1;
    for (child, group) in term.children.iter().zip(&config.arg_groups) {
        total += group.members.len() * part_count(catalog, child)?;
    }
    Some(total)
}

/// Whether some node's part provides `atom` through its configuration type.
pub fn contains_atom(catalog: &Catalog, term: &Term, atom: &Atom) -> bool {
    let target = TypeExpr::atom(atom.clone());
    configuration(catalog, term).is_ok_and(|c| subtype_le(catalog.taxonomy(), &c.provided, &target))
        || term.children.iter().any(|c| contains_atom(catalog, c, atom))
}
