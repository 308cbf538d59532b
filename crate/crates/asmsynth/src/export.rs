//! URDF export.
//!
//! One URDF link per rigid link of the assembly. The root link's frame is the
//! world frame; every other link's frame is the mated joint-origin frame of
//! the revolute joint entering it, so visuals sit at fixed offsets and each
//! joint rotates about its local z-axis. Lengths are written in meters.

use std::fmt::Write;

use asmsynth_core::assembly::{LinkPartition, OccurrenceTree};
use asmsynth_core::catalog::{Catalog, JointKind};
use asmsynth_core::kinematics::{PosedAssembly, FLIP};
use asmsynth_core::Pose;

const MM_TO_M: f64 = 0.001;

fn num(x: f64) -> String {
    // Rounding noise below a picometer would make exports platform-sensitive.
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn origin(pose: &Pose) -> String {
    let t = pose.translation.map(|v| num(v * MM_TO_M));
    // -π and π are the same angle; pick one so tiny noise cannot flip it.
    let rpy = pose
        .rotation
        .to_rpy()
        .map(|a| if a < -std::f64::consts::PI + 1e-9 { std::f64::consts::PI } else { a })
        .map(num);
    format!("<origin xyz=\"{} {} {}\" rpy=\"{} {} {}\"/>", t[0], t[1], t[2], rpy[0], rpy[1], rpy[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// URDF 1.0 document for a posed assembly. Joint origins are taken at zero
/// angle, so the output does not depend on the pose's angles.
pub fn export_urdf(
    catalog: &Catalog,
    tree: &OccurrenceTree,
    partition: &LinkPartition,
    posed: &PosedAssembly,
    robot_name: &str,
) -> String {
    let world = |o: usize| posed.poses[o].2;
    let frame = |uuid: &str| catalog.joint_origin(uuid).map(|(_, jo)| jo.frame).unwrap_or(Pose::IDENTITY);

    let mut link_frames = vec![Pose::IDENTITY; partition.len()];
    let mut joints = Vec::new();
    for e in tree.edges().iter().filter(|e| e.kind == JointKind::Revolute) {
        let link = partition.link_of(e.child);
        link_frames[link] = world(e.child).compose(&frame(&e.child_uuid));
        joints.push(e);
    }

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\"?>\n");
    let _ = writeln!(out, "<robot name=\"{}\">", escape(robot_name));
    for (link, link_frame) in link_frames.iter().enumerate() {
        let _ = writeln!(out, "  <link name=\"{}\">", partition.link_id(link));
        let inv = link_frame.invert();
        for o in partition.members(link) {
            let node = &tree.nodes()[o];
            let _ = writeln!(out, "    <visual name=\"{}\">", escape(&node.id));
            let _ = writeln!(out, "      {}", origin(&inv.compose(&world(o))));
            let _ = writeln!(
                out,
                "      <geometry><mesh filename=\"package://parts/{}.stl\" scale=\"0.001 0.001 0.001\"/></geometry>",
                escape(&node.part_id)
            );
            out.push_str("    </visual>\n");
        }
        out.push_str("  </link>\n");
    }
    for (k, e) in joints.iter().enumerate() {
        let parent_link = partition.link_of(e.parent);
        let child_link = partition.link_of(e.child);
        let mated = world(e.parent).compose(&frame(&e.parent_uuid)).compose(&Pose::rotation(FLIP));
        let local = link_frames[parent_link].invert().compose(&mated);
        let (p, c) = (&tree.nodes()[e.parent].id, &tree.nodes()[e.child].id);
        let _ = writeln!(out, "  <joint name=\"J{k}\" type=\"revolute\">");
        let _ = writeln!(out, "    <!-- {} {} -> {} {} -->", escape(p), escape(&e.parent_uuid), escape(c), escape(&e.child_uuid));
        let _ = writeln!(out, "    <parent link=\"{}\"/>", partition.link_id(parent_link));
        let _ = writeln!(out, "    <child link=\"{}\"/>", partition.link_id(child_link));
        let _ = writeln!(out, "    {}", origin(&local));
        out.push_str("    <axis xyz=\"0 0 1\"/>\n");
        out.push_str("    <limit lower=\"-3.141592653589793\" upper=\"3.141592653589793\" effort=\"0\" velocity=\"0\"/>\n");
        out.push_str("  </joint>\n");
    }
    out.push_str("</robot>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::synthesize;
    use crate::toy_arm;
    use asmsynth_core::kinematics::dof;

    #[test]
    fn counts_follow_the_partition() {
        let catalog = toy_arm::catalog();
        let request = toy_arm::arm_request().with_sizes([5]);
        let result = synthesize(&catalog, &request).unwrap().into_iter().find(|r| dof(&r.tree) == 2).unwrap();
        let posed = result.pose(&catalog, &[0.0, 0.0]).unwrap();
        let urdf = export_urdf(&catalog, &result.tree, &result.partition, &posed, "arm");
        assert_eq!(urdf.matches("<link name=").count(), 3);
        assert_eq!(urdf.matches("<joint name=").count(), 2);
        assert_eq!(urdf.matches("<visual ").count(), 5);

        // Joint origins are taken at zero angle.
        let bent = result.pose(&catalog, &[0.4, -1.1]).unwrap();
        assert_eq!(export_urdf(&catalog, &result.tree, &result.partition, &bent, "arm"), urdf);
    }

    #[test]
    fn single_part() {
        let catalog = toy_arm::catalog();
        let leaf = asmsynth_core::Term::leaf(asmsynth_core::synthesis::VariantId::plain(
            asmsynth_core::synthesis::CombinatorId { part_id: "gripper".into(), config_id: "gripper-mount".into() },
        ));
        let result = crate::pipeline::CompiledResult::compile(&catalog, leaf).unwrap();
        let posed = result.pose(&catalog, &[]).unwrap();
        let urdf = export_urdf(&catalog, &result.tree, &result.partition, &posed, "g");
        assert_eq!(urdf.matches("<link name=").count(), 1);
        assert_eq!(urdf.matches("<joint ").count(), 0);
    }

    #[test]
    fn numbers() {
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1e-15), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-12.0), "-12");
    }
}
