//! Intersection types over taxonomy atoms.
//!
//! A [`TypeExpr`] is a finite set of atoms read as their intersection; the
//! empty set is the top type. `σ ≤ τ` holds when every atom of `τ` is a
//! super-atom of some atom of `σ`.

use alloc::collections::BTreeSet;
use core::fmt;
use core::ops::Deref;

use crate::taxonomy::{Atom, Hierarchy, TaxonomyContext};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unknown atom {0}")]
    UnknownAtom(Atom),
}

/// A finite intersection of atoms, kept sorted by `(hierarchy, name)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeExpr(BTreeSet<Atom>);

impl TypeExpr {
    /// The top type.
    pub fn top() -> Self {
        TypeExpr(BTreeSet::new())
    }

    pub fn atom(atom: Atom) -> Self {
        TypeExpr(BTreeSet::from([atom]))
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.0.iter()
    }

    pub fn atom_set(&self) -> &BTreeSet<Atom> {
        &self.0
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.0.insert(atom)
    }

    pub fn union(&self, other: &TypeExpr) -> TypeExpr {
        TypeExpr(self.0.union(&other.0).cloned().collect())
    }

    pub fn in_hierarchy(&self, hierarchy: Hierarchy) -> impl Iterator<Item = &Atom> + '_ {
        self.0.iter().filter(move |a| a.hierarchy == hierarchy)
    }

    /// The first atom not known to `ctx`, if any.
    pub fn first_unknown(&self, ctx: &TaxonomyContext) -> Option<&Atom> {
        self.0.iter().find(|a| !ctx.contains(a))
    }
}

impl FromIterator<Atom> for TypeExpr {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        TypeExpr(iter.into_iter().collect())
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// A [`TypeExpr`] with no atom implied by another member. Unique per
/// subtype-equivalence class because the taxonomies are acyclic.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalType(TypeExpr);

impl CanonicalType {
    pub fn top() -> Self {
        CanonicalType(TypeExpr::top())
    }

    pub fn as_expr(&self) -> &TypeExpr {
        &self.0
    }

    pub fn into_expr(self) -> TypeExpr {
        self.0
    }
}

impl Deref for CanonicalType {
    type Target = TypeExpr;

    fn deref(&self) -> &TypeExpr {
        &self.0
    }
}

impl AsRef<TypeExpr> for CanonicalType {
    fn as_ref(&self) -> &TypeExpr {
        &self.0
    }
}

impl AsRef<TypeExpr> for TypeExpr {
    fn as_ref(&self) -> &TypeExpr {
        self
    }
}

impl fmt::Display for CanonicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `sigma ≤ tau`.
pub fn subtype_le(ctx: &TaxonomyContext, sigma: &TypeExpr, tau: &TypeExpr) -> bool {
    tau.atoms().all(|b| sigma.atoms().any(|a| ctx.is_subatom(a, b)))
}

/// Drops every atom that is a strict super-atom of another member.
pub fn canonicalize(ctx: &TaxonomyContext, sigma: &TypeExpr) -> Result<CanonicalType, TypeError> {
    if let Some(a) = sigma.first_unknown(ctx) {
        return Err(TypeError::UnknownAtom(a.clone()));
    }
    Ok(minimize(ctx, sigma))
}

/// Minimization without the known-atom check; unknown atoms only relate to
/// themselves and are therefore kept.
pub(crate) fn minimize(ctx: &TaxonomyContext, sigma: &TypeExpr) -> CanonicalType {
    CanonicalType(
        sigma
            .atoms()
            .filter(|b| !sigma.atoms().any(|a| a != *b && ctx.is_subatom(a, b)))
            .cloned()
            .collect(),
    )
}

/// Greatest lower bound: the canonical form of the union.
pub fn meet(ctx: &TaxonomyContext, sigma: &TypeExpr, tau: &TypeExpr) -> Result<CanonicalType, TypeError> {
    canonicalize(ctx, &sigma.union(tau))
}
