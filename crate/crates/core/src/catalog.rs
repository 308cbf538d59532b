//! The part repository.
//!
//! Each [`Part`] carries joint origins: part-local frames annotated with a
//! provided and/or required type. Every provided joint origin roots one
//! [`Configuration`] of the part; the remaining requiring joint origins
//! become its argument groups.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::kinematics::Pose;
use crate::money::Money;
use crate::taxonomy::{Atom, Hierarchy, TaxonomyContext};
use crate::types::{canonicalize, meet, CanonicalType, TypeExpr};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JointKind {
    #[default]
    Rigid,
    Revolute,
}

impl JointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JointKind::Rigid => "rigid",
            JointKind::Revolute => "revolute",
        }
    }
}

impl fmt::Display for JointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for JointKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rigid" => Ok(JointKind::Rigid),
            "revolute" => Ok(JointKind::Revolute),
            other => Err(alloc::format!("unknown joint kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointOrigin {
    pub uuid: String,
    pub label: String,
    /// Part-local frame.
    pub frame: Pose,
    pub provides: Option<TypeExpr>,
    pub requires: Option<TypeExpr>,
    /// Kind of joint created when something is attached here. Only
    /// meaningful when `requires` is present.
    pub joint_kind: JointKind,
    pub group_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Part {
    pub part_id: String,
    pub name: String,
    /// Atoms from the parts and attributes hierarchies only.
    pub part_types: TypeExpr,
    pub unit_cost: Option<Money>,
    pub joint_origins: Vec<JointOrigin>,
}

impl Part {
    pub fn joint_origin(&self, uuid: &str) -> Option<&JointOrigin> {
        self.joint_origins.iter().find(|jo| jo.uuid == uuid)
    }

    /// Joint origins sorted by uuid and frames in canonical sign.
    pub fn canonicalized(&self) -> Part {
        let mut part = self.clone();
        part.joint_origins.sort_by(|a, b| a.uuid.cmp(&b.uuid));
        for jo in &mut part.joint_origins {
            jo.frame = jo.frame.canonical();
        }
        part
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    /// Neither provides nor requires.
    MissingAnnotation,
    UnknownAtom(Atom),
    FormatsInPartTypes(Atom),
    DuplicateUuid(String),
    GroupMemberWithoutRequires(String),
    GroupRequiresMismatch(String),
    GroupKindMismatch(String),
    /// Empty, or containing `/` (reserved as a separator in variant ids).
    InvalidIdentifier(String),
    NegativeCost,
    /// The part cannot root any configuration.
    NoProvidedJointOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Offending joint origin, if the finding is local to one.
    pub joint_origin: Option<String>,
    pub kind: DiagnosticKind,
}

impl Diagnostic {
    fn error(joint_origin: Option<&str>, kind: DiagnosticKind) -> Self {
        Diagnostic { severity: Severity::Error, joint_origin: joint_origin.map(String::from), kind }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: ")?;
        if let Some(jo) = &self.joint_origin {
            write!(f, "joint origin {jo}: ")?;
        }
        match &self.kind {
            DiagnosticKind::MissingAnnotation => f.write_str("needs a provided or a required type"),
            DiagnosticKind::UnknownAtom(a) => write!(f, "unknown atom {a}"),
            DiagnosticKind::FormatsInPartTypes(a) => write!(f, "part types may not contain formats atom {a}"),
            DiagnosticKind::DuplicateUuid(u) => write!(f, "duplicate uuid {u}"),
            DiagnosticKind::GroupMemberWithoutRequires(g) => write!(f, "member of group {g} has no required type"),
            DiagnosticKind::GroupRequiresMismatch(g) => write!(f, "members of group {g} require different types"),
            DiagnosticKind::GroupKindMismatch(g) => write!(f, "members of group {g} declare different joint kinds"),
            DiagnosticKind::InvalidIdentifier(id) => write!(f, "invalid identifier {id:?}"),
            DiagnosticKind::NegativeCost => f.write_str("unit cost is negative"),
            DiagnosticKind::NoProvidedJointOrigin => f.write_str("no joint origin provides a type; the part is unusable"),
        }
    }
}

fn valid_identifier(id: &str) -> bool {
    !id.is_empty() && !id.contains('/') && !id.chars().any(char::is_control)
}

/// Checks that a part is sufficiently typed. An empty result means the part
/// is fully usable; warnings alone still allow storing it.
pub fn validate_part(ctx: &TaxonomyContext, part: &Part) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !valid_identifier(&part.part_id) {
        out.push(Diagnostic::error(None, DiagnosticKind::InvalidIdentifier(part.part_id.clone())));
    }
    if part.unit_cost.is_some_and(Money::is_negative) {
        out.push(Diagnostic::error(None, DiagnosticKind::NegativeCost));
    }
    for atom in part.part_types.atoms() {
        if atom.hierarchy == Hierarchy::Formats {
            out.push(Diagnostic::error(None, DiagnosticKind::FormatsInPartTypes(atom.clone())));
        } else if !ctx.contains(atom) {
            out.push(Diagnostic::error(None, DiagnosticKind::UnknownAtom(atom.clone())));
        }
    }

    let mut seen = BTreeSet::new();
    for jo in &part.joint_origins {
        let here = Some(jo.uuid.as_str());
        if !valid_identifier(&jo.uuid) {
            out.push(Diagnostic::error(here, DiagnosticKind::InvalidIdentifier(jo.uuid.clone())));
        }
        if !seen.insert(jo.uuid.as_str()) {
            out.push(Diagnostic::error(here, DiagnosticKind::DuplicateUuid(jo.uuid.clone())));
        }
        if jo.provides.is_none() && jo.requires.is_none() {
            out.push(Diagnostic::error(here, DiagnosticKind::MissingAnnotation));
        }
        for atom in jo.provides.iter().chain(jo.requires.iter()).flat_map(TypeExpr::atoms) {
            if !ctx.contains(atom) {
                out.push(Diagnostic::error(here, DiagnosticKind::UnknownAtom(atom.clone())));
            }
        }
    }

    let mut groups: BTreeMap<&str, Vec<&JointOrigin>> = BTreeMap::new();
    for jo in &part.joint_origins {
        if let Some(g) = &jo.group_id {
            groups.entry(g.as_str()).or_default().push(jo);
        }
    }
    for (g, members) in groups {
        if let Some(m) = members.iter().find(|m| m.requires.is_none()) {
            out.push(Diagnostic::error(Some(&m.uuid), DiagnosticKind::GroupMemberWithoutRequires(g.to_string())));
            continue;
        }
        let canon: Vec<Option<CanonicalType>> = members
            .iter()
            .map(|m| m.requires.as_ref().and_then(|r| canonicalize(ctx, r).ok()))
            .collect();
        if canon.windows(2).any(|w| w[0] != w[1]) {
            out.push(Diagnostic::error(None, DiagnosticKind::GroupRequiresMismatch(g.to_string())));
        }
        if members.windows(2).any(|w| w[0].joint_kind != w[1].joint_kind) {
            out.push(Diagnostic::error(None, DiagnosticKind::GroupKindMismatch(g.to_string())));
        }
    }

    if !part.joint_origins.iter().any(|jo| jo.provides.is_some()) {
        out.push(Diagnostic {
            severity: Severity::Warning,
            joint_origin: None,
            kind: DiagnosticKind::NoProvidedJointOrigin,
        });
    }
    out
}

/// One argument of a configuration: a set of joint origins that receive
/// identical sub-assemblies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgGroup {
    /// The group id, or the member uuid for ungrouped joint origins.
    pub group_key: String,
    pub required: CanonicalType,
    pub joint_kind: JointKind,
    /// Sorted uuids; the multiplicity is their count.
    pub members: Vec<String>,
}

impl ArgGroup {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// A way of using a part, rooted at one provided joint origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub part_id: String,
    /// Uuid of the root joint origin.
    pub config_id: String,
    /// Root provides met with the part types.
    pub provided: CanonicalType,
    pub arg_groups: Vec<ArgGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("part {part_id} is invalid: {}", first_error(.diagnostics))]
    InvalidPart { part_id: String, diagnostics: Vec<Diagnostic> },
    #[error("part {part_id} references unknown atom {atom}")]
    UnknownAtom { part_id: String, atom: Atom },
    #[error("joint origin uuid {uuid} is used by parts {first} and {second}")]
    DuplicateUuid { uuid: String, first: String, second: String },
    #[error("duplicate part id {0}")]
    DuplicatePartId(String),
    #[error("unknown part {0}")]
    UnknownPart(String),
    #[error("negative cost")]
    NegativeCost,
}

fn first_error(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .find(|d| d.is_error())
        .map(|d| d.to_string())
        .unwrap_or_default()
}

fn check_part(ctx: &TaxonomyContext, part: &Part) -> Result<(), CatalogError> {
    let diagnostics = validate_part(ctx, part);
    if let Some(atom) = diagnostics.iter().find_map(|d| match &d.kind {
        DiagnosticKind::UnknownAtom(a) => Some(a.clone()),
        _ => None,
    }) {
        return Err(CatalogError::UnknownAtom { part_id: part.part_id.clone(), atom });
    }
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(CatalogError::InvalidPart { part_id: part.part_id.clone(), diagnostics });
    }
    Ok(())
}

/// One configuration per provided joint origin, ordered by root uuid.
pub fn derive_configurations(ctx: &TaxonomyContext, part: &Part) -> Result<Vec<Configuration>, CatalogError> {
    check_part(ctx, part)?;
    let unknown = |atom: Atom| CatalogError::UnknownAtom { part_id: part.part_id.clone(), atom };

    let mut roots: Vec<&JointOrigin> = part.joint_origins.iter().filter(|jo| jo.provides.is_some()).collect();
    roots.sort_by(|a, b| a.uuid.cmp(&b.uuid));

    let mut configs = Vec::with_capacity(roots.len());
    for root in roots {
        let provides = root.provides.as_ref().expect("filtered on provides");
        let provided = meet(ctx, provides, &part.part_types).map_err(|crate::types::TypeError::UnknownAtom(a)| unknown(a))?;

        let mut groups: BTreeMap<String, ArgGroup> = BTreeMap::new();
        for jo in part.joint_origins.iter().filter(|jo| jo.uuid != root.uuid) {
            let Some(requires) = &jo.requires else { continue };
            let key = jo.group_id.clone().unwrap_or_else(|| jo.uuid.clone());
            let required = canonicalize(ctx, requires).map_err(|crate::types::TypeError::UnknownAtom(a)| unknown(a))?;
            groups
                .entry(if jo.group_id.is_some() { alloc::format!("g:{key}") } else { alloc::format!("u:{key}") })
                .or_insert_with(|| ArgGroup { group_key: key, required, joint_kind: jo.joint_kind, members: Vec::new() })
                .members
                .push(jo.uuid.clone());
        }
        let mut arg_groups: Vec<ArgGroup> = groups.into_values().collect();
        for g in &mut arg_groups {
            g.members.sort();
        }
        arg_groups.sort_by(|a, b| (&a.group_key, &a.members[0]).cmp(&(&b.group_key, &b.members[0])));

        configs.push(Configuration {
            part_id: part.part_id.clone(),
            config_id: root.uuid.clone(),
            provided,
            arg_groups,
        });
    }
    Ok(configs)
}

/// Validated parts over a taxonomy context. Immutable; updates return a new
/// catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    taxonomy: TaxonomyContext,
    parts: BTreeMap<String, Part>,
    /// uuid → owning part id.
    uuids: BTreeMap<String, String>,
}

impl Catalog {
    pub fn new<I>(taxonomy: TaxonomyContext, parts: I) -> Result<Catalog, CatalogError>
    where
        I: IntoIterator<Item = Part>,
    {
        let mut catalog = Catalog { taxonomy, parts: BTreeMap::new(), uuids: BTreeMap::new() };
        for part in parts {
            catalog.insert(part)?;
        }
        Ok(catalog)
    }

    pub fn empty(taxonomy: TaxonomyContext) -> Catalog {
        Catalog { taxonomy, parts: BTreeMap::new(), uuids: BTreeMap::new() }
    }

    fn insert(&mut self, part: Part) -> Result<(), CatalogError> {
        if self.parts.contains_key(&part.part_id) {
            return Err(CatalogError::DuplicatePartId(part.part_id));
        }
        check_part(&self.taxonomy, &part)?;
        for jo in &part.joint_origins {
            if let Some(owner) = self.uuids.get(&jo.uuid) {
                return Err(CatalogError::DuplicateUuid {
                    uuid: jo.uuid.clone(),
                    first: owner.clone(),
                    second: part.part_id.clone(),
                });
            }
        }
        for jo in &part.joint_origins {
            self.uuids.insert(jo.uuid.clone(), part.part_id.clone());
        }
        self.parts.insert(part.part_id.clone(), part);
        Ok(())
    }

    pub fn taxonomy(&self) -> &TaxonomyContext {
        &self.taxonomy
    }

    /// Parts in part id order.
    pub fn parts(&self) -> impl Iterator<Item = &Part> + '_ {
        self.parts.values()
    }

    pub fn part(&self, part_id: &str) -> Option<&Part> {
        self.parts.get(part_id)
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The part owning a joint origin, and the joint origin itself.
    pub fn joint_origin(&self, uuid: &str) -> Option<(&Part, &JointOrigin)> {
        let part = self.parts.get(self.uuids.get(uuid)?)?;
        Some((part, part.joint_origin(uuid)?))
    }

    pub fn set_cost(&self, part_id: &str, cost: Money) -> Result<Catalog, CatalogError> {
        if cost.is_negative() {
            return Err(CatalogError::NegativeCost);
        }
        let mut next = self.clone();
        next.parts
            .get_mut(part_id)
            .ok_or_else(|| CatalogError::UnknownPart(part_id.to_string()))?
            .unit_cost = Some(cost);
        Ok(next)
    }

    /// Inserts or replaces a part.
    pub fn upsert_part(&self, part: Part) -> Result<Catalog, CatalogError> {
        let mut next = self.without_part(&part.part_id);
        next.insert(part)?;
        Ok(next)
    }

    pub fn without_part(&self, part_id: &str) -> Catalog {
        let mut next = self.clone();
        next.parts.remove(part_id);
        next.uuids.retain(|_, owner| owner != part_id);
        next
    }

    /// Revalidates all parts against another taxonomy context.
    pub fn with_taxonomy(&self, taxonomy: TaxonomyContext) -> Result<Catalog, CatalogError> {
        Catalog::new(taxonomy, self.parts.values().cloned())
    }

    /// All configurations, ordered by `(part id, config id)`.
    pub fn configurations(&self) -> Vec<Configuration> {
        self.parts
            .values()
            .flat_map(|p| derive_configurations(&self.taxonomy, p).expect("catalog parts are validated"))
            .collect()
    }
}
