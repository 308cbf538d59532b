//! Small catalogs shared by the synthesis and assembly unit tests.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Combinator, CombinatorArg, CombinatorId};
use crate::catalog::{Catalog, JointKind, JointOrigin, Part};
use crate::kinematics::Pose;
use crate::money::Money;
use crate::taxonomy::{Atom, TaxonomyContext};
use crate::types::{canonicalize, TypeExpr};

pub fn ty(atoms: &[Atom]) -> TypeExpr {
    atoms.iter().cloned().collect()
}

pub fn provides(uuid: &str, atoms: &[Atom]) -> JointOrigin {
    JointOrigin {
        uuid: uuid.into(),
        label: uuid.into(),
        frame: Pose::IDENTITY,
        provides: Some(ty(atoms)),
        requires: None,
        joint_kind: JointKind::Rigid,
        group_id: None,
    }
}

pub fn requires(uuid: &str, atoms: &[Atom], kind: JointKind) -> JointOrigin {
    JointOrigin {
        uuid: uuid.into(),
        label: uuid.into(),
        frame: Pose::translate(0.0, 0.0, 10.0),
        provides: None,
        requires: Some(ty(atoms)),
        joint_kind: kind,
        group_id: None,
    }
}

pub fn part(id: &str, types: &[Atom], cost: Option<f64>, jos: Vec<JointOrigin>) -> Part {
    Part {
        part_id: id.into(),
        name: String::from(id),
        part_types: ty(types),
        unit_cost: cost.and_then(Money::from_f64),
        joint_origins: jos,
    }
}

pub fn arm_taxonomy() -> TaxonomyContext {
    let mut ctx = TaxonomyContext::default();
    for a in [
        Atom::parts("Arm"),
        Atom::parts("Link"),
        Atom::parts("Eff"),
        Atom::attributes("SelfRotate"),
    ] {
        ctx = ctx.create_node(&a, &[]).unwrap();
    }
    ctx
}

/// base: {Link} → {Arm}; bracket: {Eff} → {Link}; gripper: {Eff};
/// optionally extension: {Link} → {Link}.
pub fn toy_arm_catalog(with_extension: bool) -> Catalog {
    let link = Atom::parts("Link");
    let eff = Atom::parts("Eff");
    let mut parts = vec![
        part(
            "base",
            &[],
            Some(10.0),
            vec![provides("base-p", &[Atom::parts("Arm")]), requires("base-r", &[link.clone()], JointKind::Revolute)],
        ),
        part(
            "bracket",
            &[],
            Some(2.5),
            vec![provides("bracket-p", &[link.clone()]), requires("bracket-r", &[eff.clone()], JointKind::Rigid)],
        ),
        part("gripper", &[], Some(4.0), vec![provides("gripper-p", &[eff])]),
    ];
    if with_extension {
        parts.push(part(
            "extension",
            &[],
            Some(1.0),
            vec![provides("ext-p", &[link.clone()]), requires("ext-r", &[link], JointKind::Revolute)],
        ));
    }
    Catalog::new(arm_taxonomy(), parts).unwrap()
}

/// Toy arm with extension plus a rotation bracket whose part type carries
/// SelfRotate.
pub fn self_rotate_catalog(with_rotation_bracket: bool) -> Catalog {
    let mut cat = toy_arm_catalog(true);
    if with_rotation_bracket {
        cat = cat
            .upsert_part(part(
                "rot-bracket",
                &[Atom::attributes("SelfRotate")],
                Some(3.0),
                vec![
                    provides("rot-p", &[Atom::parts("Link")]),
                    requires("rot-r", &[Atom::parts("Eff")], JointKind::Revolute),
                ],
            ))
            .unwrap();
    }
    cat
}

/// A binary combinator `{X} {X} → {X}` over attributes P and Q.
pub fn binary_combinator() -> (TaxonomyContext, Combinator) {
    let mut ctx = TaxonomyContext::default();
    for a in [Atom::parts("X"), Atom::attributes("P"), Atom::attributes("Q")] {
        ctx = ctx.create_node(&a, &[]).unwrap();
    }
    let x = canonicalize(&ctx, &ty(&[Atom::parts("X")])).unwrap();
    let arg = |m: &str| CombinatorArg {
        required: x.clone(),
        multiplicity: 1,
        joint_kind: JointKind::Rigid,
        members: vec![m.into()],
    };
    let comb = Combinator {
        id: CombinatorId { part_id: "pair".into(), config_id: "pair-p".into() },
        args: vec![arg("pair-a"), arg("pair-b")],
        result: x,
        root_uuid: "pair-p".into(),
    };
    (ctx, comb)
}
