//! The three named subtype hierarchies and their reflexive-transitive
//! subtype relation.
//!
//! A [`Taxonomy`] is a DAG over atom names of one [`Hierarchy`]; an edge
//! `(child, parent)` states that `child` is a subtype of `parent`. A
//! [`TaxonomyContext`] bundles one taxonomy per hierarchy together with the
//! memoized ancestor closure of every node. Contexts are immutable values:
//! every mutation returns a new context.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// One of the three subtype hierarchies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hierarchy {
    /// Mating geometry of a connection.
    Formats,
    /// Intent of a part.
    Parts,
    /// Everything else worth querying.
    Attributes,
}

impl Hierarchy {
    pub const ALL: [Hierarchy; 3] = [Hierarchy::Formats, Hierarchy::Parts, Hierarchy::Attributes];

    pub fn as_str(self) -> &'static str {
        match self {
            Hierarchy::Formats => "formats",
            Hierarchy::Parts => "parts",
            Hierarchy::Attributes => "attributes",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Hierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Hierarchy {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "formats" => Ok(Hierarchy::Formats),
            "parts" => Ok(Hierarchy::Parts),
            "attributes" => Ok(Hierarchy::Attributes),
            other => Err(TaxonomyError::UnknownHierarchy(other.to_string())),
        }
    }
}

/// A named type in one hierarchy. Ordered by `(hierarchy, name)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub hierarchy: Hierarchy,
    pub name: String,
}

impl Atom {
    pub fn new(hierarchy: Hierarchy, name: impl Into<String>) -> Self {
        Atom { hierarchy, name: name.into() }
    }

    pub fn formats(name: impl Into<String>) -> Self {
        Atom::new(Hierarchy::Formats, name)
    }

    pub fn parts(name: impl Into<String>) -> Self {
        Atom::new(Hierarchy::Parts, name)
    }

    pub fn attributes(name: impl Into<String>) -> Self {
        Atom::new(Hierarchy::Attributes, name)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.hierarchy, self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("duplicate name `{name}` in hierarchy {hierarchy}")]
    DuplicateName { hierarchy: Hierarchy, name: String },
    #[error("unknown parent `{name}` in hierarchy {hierarchy}")]
    UnknownParent { hierarchy: Hierarchy, name: String },
    #[error("unknown node `{name}` in hierarchy {hierarchy}")]
    UnknownNode { hierarchy: Hierarchy, name: String },
    #[error("edge ({child}, {parent}) in hierarchy {hierarchy} would create a cycle")]
    WouldCreateCycle { hierarchy: Hierarchy, child: String, parent: String },
    #[error("invalid atom name {0:?}: names must be non-empty and free of control characters")]
    InvalidName(String),
    #[error("unknown hierarchy `{0}`")]
    UnknownHierarchy(String),
    #[error("hierarchy {0} given more than once")]
    DuplicateHierarchy(Hierarchy),
}

fn check_name(name: &str) -> Result<(), TaxonomyError> {
    if name.is_empty() || name.chars().any(char::is_control) {
        return Err(TaxonomyError::InvalidName(name.to_string()));
    }
    Ok(())
}

/// A single subtype DAG. Edges are `(child, parent)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Taxonomy {
    hierarchy: Hierarchy,
    nodes: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

impl Taxonomy {
    pub fn empty(hierarchy: Hierarchy) -> Self {
        Taxonomy { hierarchy, nodes: BTreeSet::new(), edges: BTreeSet::new() }
    }

    /// Builds a taxonomy from a node list and `(child, parent)` edges,
    /// rejecting duplicate or malformed names, dangling edges and cycles.
    pub fn from_parts<N, E>(hierarchy: Hierarchy, nodes: N, edges: E) -> Result<Self, TaxonomyError>
    where
        N: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let mut tax = Taxonomy::empty(hierarchy);
        for name in nodes {
            check_name(&name)?;
            if tax.nodes.contains(&name) {
                return Err(TaxonomyError::DuplicateName { hierarchy, name });
            }
            tax.nodes.insert(name);
        }
        for (child, parent) in edges {
            if !tax.nodes.contains(&child) {
                return Err(TaxonomyError::UnknownNode { hierarchy, name: child });
            }
            if !tax.nodes.contains(&parent) {
                return Err(TaxonomyError::UnknownParent { hierarchy, name: parent });
            }
            tax.edges.insert((child, parent));
        }
        if let Some((child, parent)) = tax.find_cycle_edge() {
            return Err(TaxonomyError::WouldCreateCycle { hierarchy, child, parent });
        }
        Ok(tax)
    }

    pub fn hierarchy(&self) -> Hierarchy {
        self.hierarchy
    }

    /// Node names in lexicographic order.
    pub fn nodes(&self) -> impl Iterator<Item = &str> + '_ {
        self.nodes.iter().map(String::as_str)
    }

    /// `(child, parent)` edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges.iter().map(|(c, p)| (c.as_str(), p.as_str()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.nodes.contains(name)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn parents<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |(c, _)| c == name).map(|(_, p)| p.as_str())
    }

    pub fn children<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |(_, p)| p == name).map(|(c, _)| c.as_str())
    }

    /// Kahn's algorithm; returns an edge on a cycle if the graph is not a DAG.
    fn find_cycle_edge(&self) -> Option<(String, String)> {
        let mut indegree: BTreeMap<&str, usize> = self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        for (_, p) in &self.edges {
            *indegree.get_mut(p.as_str()).expect("edge endpoint is a node") += 1;
        }
        let mut ready: Vec<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut removed = 0;
        while let Some(n) = ready.pop() {
            removed += 1;
            for p in self.parents(n) {
                let d = indegree.get_mut(p).expect("edge endpoint is a node");
                *d -= 1;
                if *d == 0 {
                    ready.push(p);
                }
            }
        }
        if removed == self.nodes.len() {
            return None;
        }
        self.edges
            .iter()
            .find(|(c, p)| indegree[c.as_str()] > 0 && indegree[p.as_str()] > 0)
            .cloned()
    }

    /// Names in a topological order, children before parents.
    pub fn topological_order(&self) -> Vec<&str> {
        let mut indegree: BTreeMap<&str, usize> = self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        for (_, p) in &self.edges {
            *indegree.get_mut(p.as_str()).unwrap() += 1;
        }
        let mut ready: Vec<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop() {
            order.push(n);
            for p in self.parents(n) {
                let d = indegree.get_mut(p).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(p);
                }
            }
        }
        order
    }

    fn ancestors_of(&self, name: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![name];
        while let Some(n) = stack.pop() {
            if seen.insert(n.to_string()) {
                stack.extend(self.parents(n));
            }
        }
        seen
    }
}

/// One taxonomy per hierarchy plus the memoized ancestor closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaxonomyContext {
    taxonomies: [Taxonomy; 3],
    closure: BTreeMap<Atom, BTreeSet<String>>,
}

impl Default for TaxonomyContext {
    fn default() -> Self {
        TaxonomyContext::new([
            Taxonomy::empty(Hierarchy::Formats),
            Taxonomy::empty(Hierarchy::Parts),
            Taxonomy::empty(Hierarchy::Attributes),
        ])
    }
}

impl TaxonomyContext {
    fn new(taxonomies: [Taxonomy; 3]) -> Self {
        let mut closure = BTreeMap::new();
        for tax in &taxonomies {
            for name in &tax.nodes {
                closure.insert(Atom::new(tax.hierarchy, name.clone()), tax.ancestors_of(name));
            }
        }
        TaxonomyContext { taxonomies, closure }
    }

    /// Assembles a context from up to three taxonomies; missing hierarchies
    /// are empty.
    pub fn from_taxonomies<I>(taxonomies: I) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = Taxonomy>,
    {
        let mut slots: [Option<Taxonomy>; 3] = [None, None, None];
        for tax in taxonomies {
            let slot = &mut slots[tax.hierarchy.index()];
            if slot.is_some() {
                return Err(TaxonomyError::DuplicateHierarchy(tax.hierarchy));
            }
            *slot = Some(tax);
        }
        let [f, p, a] = slots;
        Ok(TaxonomyContext::new([
            f.unwrap_or_else(|| Taxonomy::empty(Hierarchy::Formats)),
            p.unwrap_or_else(|| Taxonomy::empty(Hierarchy::Parts)),
            a.unwrap_or_else(|| Taxonomy::empty(Hierarchy::Attributes)),
        ]))
    }

    pub fn taxonomy(&self, hierarchy: Hierarchy) -> &Taxonomy {
        &self.taxonomies[hierarchy.index()]
    }

    pub fn taxonomies(&self) -> &[Taxonomy; 3] {
        &self.taxonomies
    }

    /// Returns a context with one hierarchy replaced wholesale.
    pub fn with_taxonomy(&self, taxonomy: Taxonomy) -> Self {
        let mut taxonomies = self.taxonomies.clone();
        let idx = taxonomy.hierarchy.index();
        taxonomies[idx] = taxonomy;
        TaxonomyContext::new(taxonomies)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.closure.contains_key(atom)
    }

    /// All stored atoms in `(hierarchy, name)` order.
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.closure.keys()
    }

    /// Reflexive-transitive ancestors of a stored atom.
    pub fn ancestors(&self, atom: &Atom) -> Option<&BTreeSet<String>> {
        self.closure.get(atom)
    }

    /// `a ≤ b`: same hierarchy and `b` is among the ancestors of `a`.
    /// Unknown atoms relate only to themselves.
    pub fn is_subatom(&self, a: &Atom, b: &Atom) -> bool {
        if a.hierarchy != b.hierarchy {
            return false;
        }
        match self.closure.get(a) {
            Some(anc) => anc.contains(&b.name),
            None => a.name == b.name,
        }
    }

    pub fn create_node(&self, atom: &Atom, parents: &[&str]) -> Result<Self, TaxonomyError> {
        let hierarchy = atom.hierarchy;
        check_name(&atom.name)?;
        let tax = self.taxonomy(hierarchy);
        if tax.contains(&atom.name) {
            return Err(TaxonomyError::DuplicateName { hierarchy, name: atom.name.clone() });
        }
        if let Some(p) = parents.iter().find(|p| !tax.contains(p)) {
            return Err(TaxonomyError::UnknownParent { hierarchy, name: p.to_string() });
        }
        let mut tax = tax.clone();
        tax.nodes.insert(atom.name.clone());
        for p in parents {
            tax.edges.insert((atom.name.clone(), p.to_string()));
        }
        // A fresh node has no children, so no cycle can appear.
        debug_assert!(tax.find_cycle_edge().is_none());
        Ok(self.with_taxonomy(tax))
    }

    /// Adds a subtype edge between existing nodes.
    pub fn add_edge(&self, hierarchy: Hierarchy, child: &str, parent: &str) -> Result<Self, TaxonomyError> {
        let tax = self.taxonomy(hierarchy);
        if !tax.contains(child) {
            return Err(TaxonomyError::UnknownNode { hierarchy, name: child.to_string() });
        }
        if !tax.contains(parent) {
            return Err(TaxonomyError::UnknownParent { hierarchy, name: parent.to_string() });
        }
        if self.is_subatom(&Atom::new(hierarchy, parent), &Atom::new(hierarchy, child)) {
            return Err(TaxonomyError::WouldCreateCycle {
                hierarchy,
                child: child.to_string(),
                parent: parent.to_string(),
            });
        }
        let mut tax = tax.clone();
        tax.edges.insert((child.to_string(), parent.to_string()));
        Ok(self.with_taxonomy(tax))
    }

    /// Removes a node; its children are re-parented to its parents so that
    /// reachability among the surviving nodes is unchanged.
    pub fn delete_node(&self, hierarchy: Hierarchy, name: &str) -> Result<Self, TaxonomyError> {
        let tax = self.taxonomy(hierarchy);
        if !tax.contains(name) {
            return Err(TaxonomyError::UnknownNode { hierarchy, name: name.to_string() });
        }
        let parents: Vec<String> = tax.parents(name).map(String::from).collect();
        let children: Vec<String> = tax.children(name).map(String::from).collect();
        let mut next = tax.clone();
        next.nodes.remove(name);
        next.edges.retain(|(c, p)| c != name && p != name);
        for c in &children {
            for p in &parents {
                next.edges.insert((c.clone(), p.clone()));
            }
        }
        Ok(self.with_taxonomy(next))
    }

    pub fn rename_node(&self, hierarchy: Hierarchy, old: &str, new: &str) -> Result<Self, TaxonomyError> {
        check_name(new)?;
        let tax = self.taxonomy(hierarchy);
        if !tax.contains(old) {
            return Err(TaxonomyError::UnknownNode { hierarchy, name: old.to_string() });
        }
        if tax.contains(new) {
            return Err(TaxonomyError::DuplicateName { hierarchy, name: new.to_string() });
        }
        let relabel = |s: &String| if s == old { new.to_string() } else { s.clone() };
        let next = Taxonomy {
            hierarchy,
            nodes: tax.nodes.iter().map(relabel).collect(),
            edges: tax.edges.iter().map(|(c, p)| (relabel(c), relabel(p))).collect(),
        };
        Ok(self.with_taxonomy(next))
    }
}
