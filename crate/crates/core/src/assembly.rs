//! Occurrence trees, link partitions, assembly programs and bills of
//! materials.
//!
//! A term expands into an occurrence tree by copying each child subtree once
//! per member of its argument group. Occurrence ids are dotted pre-order
//! paths: the root is `"0"`, its children `"0.0"`, `"0.1"`, ...

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::catalog::{derive_configurations, Catalog, JointKind};
use crate::money::Money;
use crate::synthesis::{check_term, IllTypedTerm, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceNode {
    pub id: String,
    pub part_id: String,
    /// Root joint origin of the occurrence's configuration. `None` when it
    /// could not be recovered from a program.
    pub config_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceEdge {
    pub parent: usize,
    /// Requiring joint origin on the parent.
    pub parent_uuid: String,
    pub child: usize,
    /// Providing joint origin on the child.
    pub child_uuid: String,
    pub kind: JointKind,
}

/// Nodes in pre-order, edges ordered by child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceTree {
    nodes: Vec<OccurrenceNode>,
    edges: Vec<OccurrenceEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AssemblyError {
    #[error(transparent)]
    IllTyped(#[from] IllTypedTerm),
}

impl OccurrenceTree {
    pub fn nodes(&self) -> &[OccurrenceNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[OccurrenceEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Edge entering `child`, if it is not the root.
    pub fn parent_edge(&self, child: usize) -> Option<&OccurrenceEdge> {
        self.edges.iter().find(|e| e.child == child)
    }

    /// Equality where a missing configuration matches any configuration.
    pub fn same_assembly(&self, other: &OccurrenceTree) -> bool {
        self.edges == other.edges
            && self.nodes.len() == other.nodes.len()
            && self.nodes.iter().zip(&other.nodes).all(|(a, b)| {
                a.id == b.id
                    && a.part_id == b.part_id
                    && match (&a.config_id, &b.config_id) {
                        (Some(x), Some(y)) => x == y,
                        _ => true,
                    }
            })
    }
}

/// Expands a well-typed term into its occurrence tree.
pub fn expand_term(catalog: &Catalog, term: &Term) -> Result<OccurrenceTree, AssemblyError> {
    check_term(catalog, term)?;
    let mut tree = OccurrenceTree { nodes: Vec::new(), edges: Vec::new() };
    expand(catalog, term, String::from("0"), None, &mut tree);
    Ok(tree)
}

fn expand(
    catalog: &Catalog,
    term: &Term,
    id: String,
    entering: Option<(usize, String, JointKind)>,
    tree: &mut OccurrenceTree,
) {
    let cid = &term.variant.combinator;
    let index = tree.nodes.len();
    tree.nodes.push(OccurrenceNode {
        id: id.clone(),
        part_id: cid.part_id.clone(),
        config_id: Some(cid.config_id.clone()),
    });
    if let Some((parent, parent_uuid, kind)) = entering {
        tree.edges.push(OccurrenceEdge {
            parent,
            parent_uuid,
            child: index,
            child_uuid: cid.config_id.clone(),
            kind,
        });
    }
    // check_term succeeded, so the part and configuration exist.
    let config = catalog
        .part(&cid.part_id)
        .and_then(|p| derive_configurations(catalog.taxonomy(), p).ok())
        .and_then(|cs| cs.into_iter().find(|c| c.config_id == cid.config_id))
        .expect("checked term has a configuration");
    let mut k = 0;
    for (child, group) in term.children.iter().zip(&config.arg_groups) {
        for member in &group.members {
            expand(catalog, child, format!("{id}.{k}"), Some((index, member.clone(), group.joint_kind)), tree);
            k += 1;
        }
    }
}

/// Rigidly connected components of an occurrence tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkPartition {
    /// Link index of each occurrence.
    link_of: Vec<usize>,
    link_ids: Vec<String>,
}

impl LinkPartition {
    pub fn link_of(&self, occurrence: usize) -> usize {
        self.link_of[occurrence]
    }

    pub fn link_id(&self, link: usize) -> &str {
        &self.link_ids[link]
    }

    pub fn link_ids(&self) -> &[String] {
        &self.link_ids
    }

    pub fn len(&self) -> usize {
        self.link_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.link_ids.is_empty()
    }

    /// Occurrence indices of one link, in pre-order.
    pub fn members(&self, link: usize) -> Vec<usize> {
        (0..self.link_of.len()).filter(|&o| self.link_of[o] == link).collect()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Union-find over rigid edges. Links are numbered by their first occurrence
/// in pre-order and named `L0`, `L1`, ...
pub fn partition_links(tree: &OccurrenceTree) -> LinkPartition {
    let n = tree.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in tree.edges() {
        if e.kind == JointKind::Rigid {
            let (a, b) = (find(&mut parent, e.parent), find(&mut parent, e.child));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    let mut number = BTreeMap::new();
    let mut link_of = Vec::with_capacity(n);
    for o in 0..n {
        let r = find(&mut parent, o);
        let next = number.len();
        link_of.push(*number.entry(r).or_insert(next));
    }
    let link_ids = (0..number.len()).map(|i| format!("L{i}")).collect();
    LinkPartition { link_of, link_ids }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub part_id: String,
    pub quantity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub occurrence: String,
    pub link: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramJoint {
    pub kind: JointKind,
    pub parent: String,
    pub parent_uuid: String,
    pub child: String,
    pub child_uuid: String,
}

/// CAD-independent build instructions: insert parts, create links, move
/// occurrences into links, then create joints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssemblyProgram {
    pub insertions: Vec<Insertion>,
    pub links: Vec<String>,
    pub moves: Vec<Move>,
    pub joints: Vec<ProgramJoint>,
}

/// Compiles the program for an occurrence tree. Insertions follow first
/// appearance in pre-order; moves and joints follow pre-order.
pub fn compile_program(tree: &OccurrenceTree, partition: &LinkPartition) -> AssemblyProgram {
    let mut insertions: Vec<Insertion> = Vec::new();
    for node in tree.nodes() {
        match insertions.iter_mut().find(|i| i.part_id == node.part_id) {
            Some(i) => i.quantity += 1,
            None => insertions.push(Insertion { part_id: node.part_id.clone(), quantity: 1 }),
        }
    }
    let moves = tree
        .nodes()
        .iter()
        .enumerate()
        .map(|(o, n)| Move { occurrence: n.id.clone(), link: partition.link_id(partition.link_of(o)).to_string() })
        .collect();
    let joints = tree
        .edges()
        .iter()
        .map(|e| ProgramJoint {
            kind: e.kind,
            parent: tree.nodes[e.parent].id.clone(),
            parent_uuid: e.parent_uuid.clone(),
            child: tree.nodes[e.child].id.clone(),
            child_uuid: e.child_uuid.clone(),
        })
        .collect();
    AssemblyProgram { insertions, links: partition.link_ids().to_vec(), moves, joints }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("part {0} is inserted twice")]
    DuplicateInsertion(String),
    #[error("insertion of {0} has quantity zero")]
    ZeroQuantity(String),
    #[error("part {0} is not in the catalog")]
    UnknownPart(String),
    #[error("link {0} is created twice")]
    DuplicateLink(String),
    #[error("link {0} was never created")]
    UnknownLink(String),
    #[error("occurrence {0} is moved twice")]
    DuplicateMove(String),
    #[error("malformed occurrence id {0}")]
    MalformedOccurrenceId(String),
    #[error("occurrence {0} is moved before its parent")]
    MoveOrder(String),
    #[error("occurrence {0} is referenced but never moved")]
    UnmovedOccurrence(String),
    #[error("joint origin {0} is not in the catalog")]
    UnknownJointOrigin(String),
    #[error("joint origin {uuid} does not belong to {occurrence}'s part")]
    PartConflict { occurrence: String, uuid: String },
    #[error("occurrence {0} has more than one parent joint")]
    MultipleParents(String),
    #[error("joint between {parent} and {child} does not follow the occurrence ids")]
    NotAChild { parent: String, child: String },
    #[error("occurrence {0} has no parent joint")]
    MissingParent(String),
    #[error("the part of occurrence {0} cannot be determined")]
    UndeterminedPart(String),
    #[error("{part_id}: inserted {inserted}, used {used}")]
    QuantityMismatch { part_id: String, inserted: usize, used: usize },
    #[error("occurrence {0} is in a link that does not match the rigid joints")]
    LinkMismatch(String),
    #[error("the program has no occurrences")]
    Empty,
}

fn parse_path(id: &str) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for seg in id.split('.') {
        if seg.is_empty() || (seg.len() > 1 && seg.starts_with('0')) || !seg.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        out.push(seg.parse().ok()?);
    }
    (out.first() == Some(&0)).then_some(out)
}

/// Replays a program against a catalog and rebuilds the occurrence tree and
/// link partition it describes, checking every step.
///
/// Occurrence parts are recovered from the joint-origin uuids. The root's
/// configuration is set only when exactly one of its providing joint origins
/// is consistent with the joints it parents.
pub fn replay(catalog: &Catalog, program: &AssemblyProgram) -> Result<(OccurrenceTree, LinkPartition), ProgramError> {
    let mut inserted = BTreeMap::new();
    for ins in &program.insertions {
        if ins.quantity == 0 {
            return Err(ProgramError::ZeroQuantity(ins.part_id.clone()));
        }
        if catalog.part(&ins.part_id).is_none() {
            return Err(ProgramError::UnknownPart(ins.part_id.clone()));
        }
        if inserted.insert(ins.part_id.clone(), ins.quantity).is_some() {
            return Err(ProgramError::DuplicateInsertion(ins.part_id.clone()));
        }
    }
    let mut links = BTreeSet::new();
    for l in &program.links {
        if !links.insert(l.as_str()) {
            return Err(ProgramError::DuplicateLink(l.clone()));
        }
    }

    let mut paths: BTreeMap<Vec<usize>, (String, String)> = BTreeMap::new();
    for m in &program.moves {
        let path = parse_path(&m.occurrence).ok_or_else(|| ProgramError::MalformedOccurrenceId(m.occurrence.clone()))?;
        if !links.contains(m.link.as_str()) {
            return Err(ProgramError::UnknownLink(m.link.clone()));
        }
        if path.len() > 1 && !paths.contains_key(&path[..path.len() - 1]) {
            return Err(ProgramError::MoveOrder(m.occurrence.clone()));
        }
        if path.len() == 1 && !paths.is_empty() {
            return Err(ProgramError::MoveOrder(m.occurrence.clone()));
        }
        if paths.insert(path, (m.occurrence.clone(), m.link.clone())).is_some() {
            return Err(ProgramError::DuplicateMove(m.occurrence.clone()));
        }
    }
    if paths.is_empty() {
        return Err(ProgramError::Empty);
    }

    // Pre-order is the numeric order of paths.
    let ids: Vec<String> = paths.values().map(|(id, _)| id.clone()).collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut part_of: Vec<Option<String>> = alloc::vec![None; ids.len()];
    let assign = |o: usize, uuid: &str, part_of: &mut Vec<Option<String>>| -> Result<(), ProgramError> {
        let (part, _) = catalog.joint_origin(uuid).ok_or_else(|| ProgramError::UnknownJointOrigin(uuid.into()))?;
        match &part_of[o] {
            Some(p) if *p != part.part_id => {
                Err(ProgramError::PartConflict { occurrence: ids[o].clone(), uuid: uuid.into() })
            }
            _ => {
                part_of[o] = Some(part.part_id.clone());
                Ok(())
            }
        }
    };

    let mut edges: Vec<Option<OccurrenceEdge>> = alloc::vec![None; ids.len()];
    let mut used_parent_uuids: Vec<BTreeSet<String>> = alloc::vec![BTreeSet::new(); ids.len()];
    for j in &program.joints {
        let p = *index.get(j.parent.as_str()).ok_or_else(|| ProgramError::UnmovedOccurrence(j.parent.clone()))?;
        let c = *index.get(j.child.as_str()).ok_or_else(|| ProgramError::UnmovedOccurrence(j.child.clone()))?;
        let is_child = j.child.rsplit_once('.').is_some_and(|(head, _)| head == j.parent);
        if !is_child {
            return Err(ProgramError::NotAChild { parent: j.parent.clone(), child: j.child.clone() });
        }
        if edges[c].is_some() {
            return Err(ProgramError::MultipleParents(j.child.clone()));
        }
        assign(p, &j.parent_uuid, &mut part_of)?;
        assign(c, &j.child_uuid, &mut part_of)?;
        if !used_parent_uuids[p].insert(j.parent_uuid.clone()) {
            return Err(ProgramError::PartConflict { occurrence: j.parent.clone(), uuid: j.parent_uuid.clone() });
        }
        edges[c] = Some(OccurrenceEdge {
            parent: p,
            parent_uuid: j.parent_uuid.clone(),
            child: c,
            child_uuid: j.child_uuid.clone(),
            kind: j.kind,
        });
    }
    for (o, e) in edges.iter().enumerate().skip(1) {
        if e.is_none() {
            return Err(ProgramError::MissingParent(ids[o].clone()));
        }
    }
    if ids.len() == 1 && part_of[0].is_none() {
        if let [only] = program.insertions.as_slice() {
            part_of[0] = Some(only.part_id.clone());
        }
    }

    let mut used: BTreeMap<String, usize> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(ids.len());
    for (o, id) in ids.iter().enumerate() {
        let part_id = part_of[o].clone().ok_or_else(|| ProgramError::UndeterminedPart(id.clone()))?;
        *used.entry(part_id.clone()).or_default() += 1;
        let config_id = match &edges[o] {
            Some(e) => Some(e.child_uuid.clone()),
            None => root_config(catalog, &part_id, &used_parent_uuids[o]),
        };
        nodes.push(OccurrenceNode { id: id.clone(), part_id, config_id });
    }
    for (part_id, &n) in &inserted {
        let u = used.get(part_id).copied().unwrap_or(0);
        if u != n {
            return Err(ProgramError::QuantityMismatch { part_id: part_id.clone(), inserted: n, used: u });
        }
    }
    if let Some((part_id, &u)) = used.iter().find(|(p, _)| !inserted.contains_key(*p)) {
        return Err(ProgramError::QuantityMismatch { part_id: part_id.clone(), inserted: 0, used: u });
    }

    let tree = OccurrenceTree { nodes, edges: edges.into_iter().flatten().collect() };
    let partition = partition_links(&tree);
    // The program's links must be exactly the rigid components, under the
    // same naming.
    let declared: Vec<&str> = paths.values().map(|(_, l)| l.as_str()).collect();
    for (o, l) in declared.iter().enumerate() {
        if partition.link_id(partition.link_of(o)) != *l {
            return Err(ProgramError::LinkMismatch(ids[o].clone()));
        }
    }
    if partition.len() != program.links.len() {
        return Err(ProgramError::LinkMismatch(ids[0].clone()));
    }
    Ok((tree, partition))
}

fn root_config(catalog: &Catalog, part_id: &str, used: &BTreeSet<String>) -> Option<String> {
    let part = catalog.part(part_id)?;
    let configs = derive_configurations(catalog.taxonomy(), part).ok()?;
    let mut fits = configs.into_iter().filter(|c| {
        let members: BTreeSet<&String> = c.arg_groups.iter().flat_map(|g| &g.members).collect();
        members.len() == used.len() && used.iter().all(|u| members.contains(u))
    });
    match (fits.next(), fits.next()) {
        (Some(c), None) => Some(c.config_id),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BomRow {
    pub part_id: String,
    pub name: String,
    pub quantity: usize,
    pub unit_cost: Option<Money>,
    pub row_total: Option<Money>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bom {
    /// Sorted by part id.
    pub rows: Vec<BomRow>,
    /// Sum over rows with a known unit cost.
    pub total_known_cost: Money,
    /// False when some row has no unit cost.
    pub cost_complete: bool,
}

/// Bill of materials with quantities from the occurrence tree.
pub fn bom_and_cost(catalog: &Catalog, tree: &OccurrenceTree) -> Bom {
    let mut quantities: BTreeMap<&str, usize> = BTreeMap::new();
    for n in tree.nodes() {
        *quantities.entry(n.part_id.as_str()).or_default() += 1;
    }
    let rows: Vec<BomRow> = quantities
        .into_iter()
        .map(|(part_id, quantity)| {
            let part = catalog.part(part_id);
            let unit_cost = part.and_then(|p| p.unit_cost);
            BomRow {
                part_id: part_id.into(),
                name: part.map(|p| p.name.clone()).unwrap_or_default(),
                quantity,
                unit_cost,
                row_total: unit_cost.map(|c| c.times(quantity as u64)),
            }
        })
        .collect();
    Bom {
        total_known_cost: rows.iter().filter_map(|r| r.row_total).sum(),
        cost_complete: rows.iter().all(|r| r.unit_cost.is_some()),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::fixtures::*;
    use crate::synthesis::{CombinatorId, VariantId};
    use alloc::vec;

    fn node(part: &str, config: &str, children: Vec<Term>) -> Term {
        Term::new(VariantId::plain(CombinatorId { part_id: part.into(), config_id: config.into() }), children)
    }

    fn arm() -> Term {
        node("base", "base-p", vec![node("bracket", "bracket-p", vec![node("gripper", "gripper-p", vec![])])])
    }

    #[test]
    fn toy_arm_expansion() {
        let cat = toy_arm_catalog(false);
        let tree = expand_term(&cat, &arm()).unwrap();
        let ids: Vec<&str> = tree.nodes().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["0", "0.0", "0.0.0"]);
        assert_eq!(tree.edges().len(), 2);
        assert_eq!(tree.edges()[0].kind, JointKind::Revolute);
        assert_eq!(tree.edges()[0].parent_uuid, "base-r");
        assert_eq!(tree.edges()[0].child_uuid, "bracket-p");
        assert_eq!(tree.edges()[1].kind, JointKind::Rigid);

        let partition = partition_links(&tree);
        assert_eq!(partition.link_ids(), ["L0", "L1"]);
        assert_eq!(partition.members(1), [1, 2]);
    }

    #[test]
    fn ill_typed_terms_are_rejected() {
        let cat = toy_arm_catalog(false);
        let bad = node("base", "base-p", vec![node("gripper", "gripper-p", vec![])]);
        assert!(matches!(expand_term(&cat, &bad), Err(AssemblyError::IllTyped(_))));
    }

    fn grouped_catalog() -> Catalog {
        let mut taxonomy = arm_taxonomy();
        taxonomy = taxonomy.create_node(&crate::taxonomy::Atom::parts("Wheel"), &[]).unwrap();
        let wheel = crate::taxonomy::Atom::parts("Wheel");
        let mut a = requires("axle-a", &[wheel.clone()], JointKind::Revolute);
        let mut b = requires("axle-b", &[wheel.clone()], JointKind::Revolute);
        a.group_id = Some("axles".into());
        b.group_id = Some("axles".into());
        let chassis = part(
            "chassis",
            &[],
            Some(20.0),
            vec![provides("chassis-p", &[crate::taxonomy::Atom::parts("Arm")]), a, b],
        );
        let hub = part(
            "hub",
            &[],
            None,
            vec![
                provides("hub-p", &[wheel.clone()]),
                requires("hub-r", &[crate::taxonomy::Atom::parts("Eff")], JointKind::Rigid),
            ],
        );
        let cap = part("cap", &[], Some(0.5), vec![provides("cap-p", &[crate::taxonomy::Atom::parts("Eff")])]);
        Catalog::new(taxonomy, vec![chassis, hub, cap]).unwrap()
    }

    fn grouped_term() -> Term {
        node("chassis", "chassis-p", vec![node("hub", "hub-p", vec![node("cap", "cap-p", vec![])])])
    }

    #[test]
    fn group_multiplicity_copies_subtrees() {
        let cat = grouped_catalog();
        let tree = expand_term(&cat, &grouped_term()).unwrap();
        let ids: Vec<&str> = tree.nodes().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["0", "0.0", "0.0.0", "0.1", "0.1.0"]);
        let uuids: Vec<&str> = tree.edges().iter().map(|e| e.parent_uuid.as_str()).collect();
        assert_eq!(uuids, ["axle-a", "hub-r", "axle-b", "hub-r"]);
        let partition = partition_links(&tree);
        assert_eq!(partition.len(), 3);
        assert_eq!(partition.link_of(4), partition.link_of(3));
        assert_ne!(partition.link_of(1), partition.link_of(3));
    }

    #[test]
    fn program_round_trip() {
        for (cat, term) in [(toy_arm_catalog(false), arm()), (grouped_catalog(), grouped_term())] {
            let tree = expand_term(&cat, &term).unwrap();
            let partition = partition_links(&tree);
            let program = compile_program(&tree, &partition);
            let (replayed, replayed_partition) = replay(&cat, &program).unwrap();
            assert!(replayed.same_assembly(&tree));
            assert_eq!(replayed_partition, partition);
        }
    }

    #[test]
    fn program_aggregates_insertions() {
        let cat = grouped_catalog();
        let tree = expand_term(&cat, &grouped_term()).unwrap();
        let program = compile_program(&tree, &partition_links(&tree));
        let ins: Vec<(&str, usize)> = program.insertions.iter().map(|i| (i.part_id.as_str(), i.quantity)).collect();
        assert_eq!(ins, [("chassis", 1), ("hub", 2), ("cap", 2)]);
        assert_eq!(program.links, ["L0", "L1", "L2"]);
        assert_eq!(program.moves.len(), 5);
        assert_eq!(program.joints.len(), 4);
    }

    #[test]
    fn replay_rejects_broken_programs() {
        let cat = toy_arm_catalog(false);
        let tree = expand_term(&cat, &arm()).unwrap();
        let good = compile_program(&tree, &partition_links(&tree));

        let mut p = good.clone();
        p.insertions[0].quantity = 2;
        assert!(matches!(replay(&cat, &p), Err(ProgramError::QuantityMismatch { .. })));

        let mut p = good.clone();
        p.moves[2].link = "L0".into();
        assert!(matches!(replay(&cat, &p), Err(ProgramError::LinkMismatch(_))));

        let mut p = good.clone();
        p.moves.swap(0, 1);
        assert!(matches!(replay(&cat, &p), Err(ProgramError::MoveOrder(_))));

        let mut p = good.clone();
        p.joints.pop();
        assert!(matches!(replay(&cat, &p), Err(ProgramError::MissingParent(_))));

        let mut p = good.clone();
        p.joints[0].child_uuid = "gripper-p".into();
        assert!(matches!(replay(&cat, &p), Err(ProgramError::PartConflict { .. })));

        let mut p = good.clone();
        p.links.push("L9".into());
        assert!(matches!(replay(&cat, &p), Err(ProgramError::LinkMismatch(_))));

        let mut p = good;
        p.moves[1].link = "nope".into();
        assert!(matches!(replay(&cat, &p), Err(ProgramError::UnknownLink(_))));
    }

    #[test]
    fn bom_with_missing_cost() {
        let cat = grouped_catalog();
        let tree = expand_term(&cat, &grouped_term()).unwrap();
        let bom = bom_and_cost(&cat, &tree);
        let rows: Vec<(&str, usize)> = bom.rows.iter().map(|r| (r.part_id.as_str(), r.quantity)).collect();
        assert_eq!(rows, [("cap", 2), ("chassis", 1), ("hub", 2)]);
        assert!(!bom.cost_complete);
        assert_eq!(bom.total_known_cost, Money::from_f64(21.0).unwrap());
        assert_eq!(bom.rows[2].row_total, None);

        let tree = expand_term(&toy_arm_catalog(false), &arm()).unwrap();
        let bom = bom_and_cost(&toy_arm_catalog(false), &tree);
        assert!(bom.cost_complete);
        assert_eq!(bom.total_known_cost, Money::from_f64(16.5).unwrap());
    }
}
