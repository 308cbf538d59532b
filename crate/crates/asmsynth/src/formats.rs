//! JSON documents for taxonomies, types, parts, requests, results, programs,
//! bills of materials and scenes.
//!
//! Every `save_*` function writes canonical form: sorted sets, canonical
//! quaternion signs, pretty-printed with a trailing newline. Loading then
//! saving a document therefore yields its canonical form.

use asmsynth_core::assembly::{Bom, Insertion, Move, ProgramJoint};
use asmsynth_core::catalog::{CatalogError, JointKind, JointOrigin, Part};
use asmsynth_core::kinematics::{KinematicsError, PosedAssembly};
use asmsynth_core::synthesis::VariantId;
use asmsynth_core::taxonomy::TaxonomyError;
use asmsynth_core::{
    AssemblyProgram, Atom, Hierarchy, Money, Pose, Quaternion, Request, Taxonomy, TaxonomyContext, Term,
    TypeExpr,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Schema(e.to_string())
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn parse_hierarchy(s: &str) -> Result<Hierarchy, FormatError> {
    s.parse().map_err(|_| FormatError::Taxonomy(TaxonomyError::UnknownHierarchy(s.to_string())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyDoc {
    pub hierarchy: String,
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl TaxonomyDoc {
    pub fn from_taxonomy(tax: &Taxonomy) -> Self {
        TaxonomyDoc {
            hierarchy: tax.hierarchy().as_str().to_string(),
            nodes: tax.nodes().map(String::from).collect(),
            edges: tax.edges().map(|(c, p)| (c.to_string(), p.to_string())).collect(),
        }
    }

    pub fn to_taxonomy(&self) -> Result<Taxonomy, FormatError> {
        let h = parse_hierarchy(&self.hierarchy)?;
        Ok(Taxonomy::from_parts(h, self.nodes.iter().cloned(), self.edges.iter().cloned())?)
    }
}

/// One hierarchy, or a combined file holding an array of them.
#[derive(Deserialize)]
#[serde(untagged)]
enum TaxonomyFile {
    One(TaxonomyDoc),
    Many(Vec<TaxonomyDoc>),
}

pub fn load_taxonomy(json: &str) -> Result<Taxonomy, FormatError> {
    serde_json::from_str::<TaxonomyDoc>(json)?.to_taxonomy()
}

pub fn save_taxonomy(tax: &Taxonomy) -> String {
    to_pretty(&TaxonomyDoc::from_taxonomy(tax))
}

/// Loads the given documents (each a single hierarchy or an array) into one
/// context.
pub fn load_taxonomies<'a, I>(documents: I) -> Result<TaxonomyContext, FormatError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut taxonomies = Vec::new();
    for json in documents {
        let docs = match serde_json::from_str::<TaxonomyFile>(json) {
            Ok(TaxonomyFile::One(d)) => vec![d],
            Ok(TaxonomyFile::Many(ds)) => ds,
            // Re-parse as a single document for a precise message.
            Err(_) => vec![serde_json::from_str::<TaxonomyDoc>(json)?],
        };
        for d in docs {
            taxonomies.push(d.to_taxonomy()?);
        }
    }
    Ok(TaxonomyContext::from_taxonomies(taxonomies)?)
}

/// Combined document with all three hierarchies.
pub fn save_taxonomies(ctx: &TaxonomyContext) -> String {
    let docs: Vec<TaxonomyDoc> = ctx.taxonomies().iter().map(TaxonomyDoc::from_taxonomy).collect();
    to_pretty(&docs)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeExprDoc {
    #[serde(default)]
    pub formats: Vec<String>,
    #[serde(default)]
    pub parts: Vec<String>,
    #[serde(default)]
    pub attributes: Vec<String>,
}

impl TypeExprDoc {
    pub fn from_type(ty: &TypeExpr) -> Self {
        let names = |h| ty.in_hierarchy(h).map(|a| a.name.clone()).collect();
        TypeExprDoc {
            formats: names(Hierarchy::Formats),
            parts: names(Hierarchy::Parts),
            attributes: names(Hierarchy::Attributes),
        }
    }

    pub fn to_type(&self) -> TypeExpr {
        let atoms = |h: Hierarchy, names: &[String]| names.iter().map(move |n| Atom::new(h, n.clone())).collect::<Vec<_>>();
        atoms(Hierarchy::Formats, &self.formats)
            .into_iter()
            .chain(atoms(Hierarchy::Parts, &self.parts))
            .chain(atoms(Hierarchy::Attributes, &self.attributes))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDoc {
    pub origin: [f64; 3],
    pub quaternion: [f64; 4],
}

impl FrameDoc {
    pub fn from_pose(pose: &Pose) -> Self {
        let p = pose.canonical();
        let q = p.rotation;
        FrameDoc { origin: p.translation, quaternion: [q.w, q.x, q.y, q.z] }
    }

    pub fn to_pose(&self) -> Result<Pose, FormatError> {
        let [w, x, y, z] = self.quaternion;
        Ok(Pose::new(self.origin, Quaternion::new(w, x, y, z))?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKindDoc {
    #[default]
    Rigid,
    Revolute,
}

impl From<JointKind> for JointKindDoc {
    fn from(k: JointKind) -> Self {
        match k {
            JointKind::Rigid => JointKindDoc::Rigid,
            JointKind::Revolute => JointKindDoc::Revolute,
        }
    }
}

impl From<JointKindDoc> for JointKind {
    fn from(k: JointKindDoc) -> Self {
        match k {
            JointKindDoc::Rigid => JointKind::Rigid,
            JointKindDoc::Revolute => JointKind::Revolute,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct JointOriginDoc {
    pub uuid: String,
    #[serde(default)]
    pub label: String,
    pub frame: FrameDoc,
    #[serde(default)]
    pub provides: Option<TypeExprDoc>,
    #[serde(default)]
    pub requires: Option<TypeExprDoc>,
    #[serde(default)]
    pub joint_kind: JointKindDoc,
    #[serde(default)]
    pub group_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PartDoc {
    pub part_id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub part_types: TypeExprDoc,
    #[serde(default)]
    pub unit_cost: Option<f64>,
    #[serde(default)]
    pub joint_origins: Vec<JointOriginDoc>,
}

impl PartDoc {
    pub fn from_part(part: &Part) -> Self {
        let part = part.canonicalized();
        PartDoc {
            part_id: part.part_id.clone(),
            name: part.name.clone(),
            part_types: TypeExprDoc::from_type(&part.part_types),
            unit_cost: part.unit_cost.map(Money::to_f64),
            joint_origins: part
                .joint_origins
                .iter()
                .map(|jo| JointOriginDoc {
                    uuid: jo.uuid.clone(),
                    label: jo.label.clone(),
                    frame: FrameDoc::from_pose(&jo.frame),
                    provides: jo.provides.as_ref().map(TypeExprDoc::from_type),
                    requires: jo.requires.as_ref().map(TypeExprDoc::from_type),
                    joint_kind: jo.joint_kind.into(),
                    group_id: jo.group_id.clone(),
                })
                .collect(),
        }
    }

    pub fn to_part(&self) -> Result<Part, FormatError> {
        let unit_cost = match self.unit_cost {
            Some(c) => Some(Money::from_f64(c).ok_or_else(|| FormatError::Schema(format!("invalid unit cost {c}")))?),
            None => None,
        };
        let mut joint_origins = Vec::with_capacity(self.joint_origins.len());
        for jo in &self.joint_origins {
            joint_origins.push(JointOrigin {
                uuid: jo.uuid.clone(),
                label: jo.label.clone(),
                frame: jo.frame.to_pose()?,
                provides: jo.provides.as_ref().map(TypeExprDoc::to_type),
                requires: jo.requires.as_ref().map(TypeExprDoc::to_type),
                joint_kind: jo.joint_kind.into(),
                group_id: jo.group_id.clone(),
            });
        }
        Ok(Part {
            part_id: self.part_id.clone(),
            name: self.name.clone(),
            part_types: self.part_types.to_type(),
            unit_cost,
            joint_origins,
        })
    }
}

pub fn load_part(json: &str) -> Result<Part, FormatError> {
    serde_json::from_str::<PartDoc>(json)?.to_part()
}

pub fn save_part(part: &Part) -> String {
    to_pretty(&PartDoc::from_part(part))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestDoc {
    pub target: TypeExprDoc,
    #[serde(default)]
    pub propagated: TypeExprDoc,
    #[serde(default)]
    pub sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub limit: Option<usize>,
}

impl RequestDoc {
    pub fn from_request(req: &Request) -> Self {
        RequestDoc {
            target: TypeExprDoc::from_type(&req.target),
            propagated: TypeExprDoc::from_type(&req.propagated),
            sizes: req.sizes.as_ref().map(|s| s.iter().copied().collect()),
            limit: Some(req.limit),
        }
    }

    pub fn to_request(&self) -> Request {
        let mut req = Request::new(self.target.to_type()).with_propagated(self.propagated.to_type());
        if let Some(sizes) = &self.sizes {
            req = req.with_sizes(sizes.iter().copied());
        }
        if let Some(limit) = self.limit {
            req = req.with_limit(limit);
        }
        req
    }
}

pub fn load_request(json: &str) -> Result<Request, FormatError> {
    Ok(serde_json::from_str::<RequestDoc>(json)?.to_request())
}

pub fn save_request(req: &Request) -> String {
    to_pretty(&RequestDoc::from_request(req))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub variant: String,
    #[serde(default)]
    pub children: Vec<TermDoc>,
}

impl TermDoc {
    pub fn from_term(term: &Term) -> Self {
        TermDoc {
            variant: term.variant.to_string(),
            children: term.children.iter().map(TermDoc::from_term).collect(),
        }
    }

    pub fn to_term(&self) -> Result<Term, FormatError> {
        let variant = VariantId::parse(&self.variant)
            .ok_or_else(|| FormatError::Schema(format!("malformed variant id {:?}", self.variant)))?;
        let children = self.children.iter().map(TermDoc::to_term).collect::<Result<_, _>>()?;
        Ok(Term::new(variant, children))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ResultDoc {
    #[serde(rename = "type")]
    pub ty: TypeExprDoc,
    pub part_count: usize,
    pub term: TermDoc,
}

pub fn load_results(json: &str) -> Result<Vec<ResultDoc>, FormatError> {
    Ok(serde_json::from_str(json)?)
}

pub fn save_results(results: &[ResultDoc]) -> String {
    to_pretty(&results)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramDoc {
    pub insertions: Vec<(String, usize)>,
    pub links: Vec<String>,
    pub moves: Vec<(String, String)>,
    pub joints: Vec<(JointKindDoc, String, String, String, String)>,
}

impl ProgramDoc {
    pub fn from_program(p: &AssemblyProgram) -> Self {
        ProgramDoc {
            insertions: p.insertions.iter().map(|i| (i.part_id.clone(), i.quantity)).collect(),
            links: p.links.clone(),
            moves: p.moves.iter().map(|m| (m.occurrence.clone(), m.link.clone())).collect(),
            joints: p
                .joints
                .iter()
                .map(|j| (j.kind.into(), j.parent.clone(), j.parent_uuid.clone(), j.child.clone(), j.child_uuid.clone()))
                .collect(),
        }
    }

    pub fn to_program(&self) -> AssemblyProgram {
        AssemblyProgram {
            insertions: self
                .insertions
                .iter()
                .map(|(part_id, quantity)| Insertion { part_id: part_id.clone(), quantity: *quantity })
                .collect(),
            links: self.links.clone(),
            moves: self
                .moves
                .iter()
                .map(|(occurrence, link)| Move { occurrence: occurrence.clone(), link: link.clone() })
                .collect(),
            joints: self
                .joints
                .iter()
                .map(|(kind, parent, parent_uuid, child, child_uuid)| ProgramJoint {
                    kind: (*kind).into(),
                    parent: parent.clone(),
                    parent_uuid: parent_uuid.clone(),
                    child: child.clone(),
                    child_uuid: child_uuid.clone(),
                })
                .collect(),
        }
    }
}

pub fn load_program(json: &str) -> Result<AssemblyProgram, FormatError> {
    Ok(serde_json::from_str::<ProgramDoc>(json)?.to_program())
}

pub fn save_program(program: &AssemblyProgram) -> String {
    to_pretty(&ProgramDoc::from_program(program))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BomRowDoc {
    pub part_id: String,
    pub name: String,
    pub quantity: usize,
    pub unit_cost: Option<f64>,
    pub row_total: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BomDoc {
    pub rows: Vec<BomRowDoc>,
    pub total_known_cost: f64,
    pub cost_complete: bool,
}

impl BomDoc {
    pub fn from_bom(bom: &Bom) -> Self {
        BomDoc {
            rows: bom
                .rows
                .iter()
                .map(|r| BomRowDoc {
                    part_id: r.part_id.clone(),
                    name: r.name.clone(),
                    quantity: r.quantity,
                    unit_cost: r.unit_cost.map(Money::to_f64),
                    row_total: r.row_total.map(Money::to_f64),
                })
                .collect(),
            total_known_cost: bom.total_known_cost.to_f64(),
            cost_complete: bom.cost_complete,
        }
    }
}

pub fn save_bom(bom: &Bom) -> String {
    to_pretty(&BomDoc::from_bom(bom))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SceneEntry {
    pub occ: String,
    pub part_id: String,
    pub origin: [f64; 3],
    pub quaternion: [f64; 4],
}

pub fn scene_entries(posed: &PosedAssembly) -> Vec<SceneEntry> {
    posed
        .poses
        .iter()
        .map(|(occ, part_id, pose)| {
            let f = FrameDoc::from_pose(pose);
            SceneEntry { occ: occ.clone(), part_id: part_id.clone(), origin: f.origin, quaternion: f.quaternion }
        })
        .collect()
}

pub fn save_scene(entries: &[SceneEntry]) -> String {
    to_pretty(&entries)
}

pub fn load_scene(json: &str) -> Result<Vec<SceneEntry>, FormatError> {
    Ok(serde_json::from_str(json)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAXONOMY: &str = r#"{"hierarchy": "parts", "nodes": ["Screw", "Fastener"], "edges": [["Screw", "Fastener"]]}"#;

    #[test]
    fn taxonomy_round_trip_is_canonical() {
        let saved = save_taxonomy(&load_taxonomy(TAXONOMY).unwrap());
        assert!(saved.find("\"Fastener\"").unwrap() < saved.find("\"Screw\"").unwrap());
        assert_eq!(save_taxonomy(&load_taxonomy(&saved).unwrap()), saved);
    }

    #[test]
    fn taxonomy_errors() {
        let missing = r#"{"hierarchy": "parts", "nodes": ["A"], "edges": [["A", "B"]]}"#;
        assert!(matches!(load_taxonomy(missing), Err(FormatError::Taxonomy(TaxonomyError::UnknownParent { .. }))));
        let cycle = r#"{"hierarchy": "parts", "nodes": ["A", "B"], "edges": [["A", "B"], ["B", "A"]]}"#;
        assert!(matches!(load_taxonomy(cycle), Err(FormatError::Taxonomy(TaxonomyError::WouldCreateCycle { .. }))));
        let dup = r#"{"hierarchy": "parts", "nodes": ["A", "A"]}"#;
        assert!(matches!(load_taxonomy(dup), Err(FormatError::Taxonomy(TaxonomyError::DuplicateName { .. }))));
        assert!(matches!(load_taxonomy(r#"{"nodes": []}"#), Err(FormatError::Schema(_))));
        let bad_h = r#"{"hierarchy": "colors", "nodes": []}"#;
        assert!(matches!(load_taxonomy(bad_h), Err(FormatError::Taxonomy(TaxonomyError::UnknownHierarchy(_)))));
    }

    #[test]
    fn combined_taxonomies() {
        let combined = format!("[{TAXONOMY}, {{\"hierarchy\": \"attributes\", \"nodes\": [\"Wood\"]}}]");
        let ctx = load_taxonomies([combined.as_str()]).unwrap();
        assert!(ctx.contains(&Atom::attributes("Wood")));
        assert!(ctx.is_subatom(&Atom::parts("Screw"), &Atom::parts("Fastener")));
        let saved = save_taxonomies(&ctx);
        assert_eq!(save_taxonomies(&load_taxonomies([saved.as_str()]).unwrap()), saved);
        assert!(load_taxonomies([TAXONOMY, TAXONOMY]).is_err());
    }

    #[test]
    fn part_round_trip() {
        let json = r#"{
            "partId": "cube", "name": "Wooden cube",
            "partTypes": {"parts": ["Cube"], "attributes": ["Wood"]},
            "unitCost": 12.5,
            "jointOrigins": [
                {"uuid": "b", "label": "top", "frame": {"origin": [0, 0, 10], "quaternion": [-1, 0, 0, 0]},
                 "provides": {"formats": ["Face"]}, "requires": null, "jointKind": "rigid", "groupId": null},
                {"uuid": "a", "label": "bottom", "frame": {"origin": [0, 0, 0], "quaternion": [0, -1, 0, 0]},
                 "provides": {"formats": ["Face"]}}
            ]
        }"#;
        let part = load_part(json).unwrap();
        assert_eq!(part.unit_cost, Money::from_f64(12.5));
        let saved = save_part(&part);
        assert_eq!(save_part(&load_part(&saved).unwrap()), saved);
        let doc: PartDoc = serde_json::from_str(&saved).unwrap();
        assert_eq!(doc.joint_origins[0].uuid, "a");
        assert_eq!(doc.joint_origins[0].frame.quaternion, [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(doc.joint_origins[1].frame.quaternion, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn part_schema_errors() {
        let bad_kind = r#"{"partId": "x", "jointOrigins": [{"uuid": "u", "frame": {"origin": [0,0,0], "quaternion": [1,0,0,0]}, "jointKind": "prismatic"}]}"#;
        assert!(matches!(load_part(bad_kind), Err(FormatError::Schema(_))));
        let non_unit = r#"{"partId": "x", "jointOrigins": [{"uuid": "u", "frame": {"origin": [0,0,0], "quaternion": [2,0,0,0]}}]}"#;
        assert!(matches!(load_part(non_unit), Err(FormatError::Kinematics(_))));
        assert!(matches!(load_part(r#"{"partId": "x", "color": "red"}"#), Err(FormatError::Schema(_))));
    }

    #[test]
    fn request_defaults() {
        let req = load_request(r#"{"target": {"parts": ["Arm"]}}"#).unwrap();
        assert_eq!(req.limit, 100);
        assert!(req.propagated.is_empty());
        assert!(req.sizes.is_none());
        let req = load_request(r#"{"target": {"parts": ["Arm"]}, "sizes": [5, 3], "limit": 2}"#).unwrap();
        let saved = save_request(&req);
        assert!(saved.contains("\"limit\": 2"));
        assert_eq!(save_request(&load_request(&saved).unwrap()), saved);
    }

    #[test]
    fn program_document_shape() {
        let json = r#"{"insertions": [["base", 1], ["arm", 2]], "links": ["L0", "L1"],
            "moves": [["0", "L0"], ["0.0", "L1"], ["0.1", "L1"]],
            "joints": [["revolute", "0", "u1", "0.0", "u2"], ["rigid", "0", "u3", "0.1", "u2"]]}"#;
        let program = load_program(json).unwrap();
        assert_eq!(program.joints[0].kind, JointKind::Revolute);
        let saved = save_program(&program);
        assert_eq!(save_program(&load_program(&saved).unwrap()), saved);
    }
}
