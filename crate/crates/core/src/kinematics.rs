//! Rigid-body poses, joint-origin mating and forward kinematics.
//!
//! Lengths are millimeters and angles radians. A [`Pose`] maps coordinates
//! of its local frame into the parent frame: `p_parent = R · p_local + t`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::assembly::{AssemblyProgram, OccurrenceTree};
use crate::catalog::{Catalog, JointKind};

/// Tolerance on `|q| = 1` for poses read from outside.
pub const UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("quaternion norm {0} is not 1")]
    NonUnitQuaternion(f64),
    #[error("expected {expected} joint angles, got {got}")]
    AngleCountMismatch { expected: usize, got: usize },
    #[error("unknown joint origin {0}")]
    UnknownJointOrigin(String),
    #[error("program joint for occurrence {0} has no matching edge in the occurrence tree")]
    JointMismatch(String),
}

/// Unit quaternion `w + xi + yj + zk` (Hamilton convention).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Rotation by `angle` about a unit `axis`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = libm::sincos(angle / 2.0);
        Quaternion::new(c, axis[0] * s, axis[1] * s, axis[2] * s)
    }

    pub fn rot_x(angle: f64) -> Self {
        Quaternion::from_axis_angle([1.0, 0.0, 0.0], angle)
    }

    pub fn rot_y(angle: f64) -> Self {
        Quaternion::from_axis_angle([0.0, 1.0, 0.0], angle)
    }

    pub fn rot_z(angle: f64) -> Self {
        Quaternion::from_axis_angle([0.0, 0.0, 1.0], angle)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Quaternion::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn conjugate(&self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn mul(&self, o: &Quaternion) -> Self {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }

    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        // v' = v + 2w (u × v) + 2 u × (u × v)
        let u = [self.x, self.y, self.z];
        let c = cross(u, v);
        let cc = cross(u, c);
        [
            v[0] + 2.0 * (self.w * c[0] + cc[0]),
            v[1] + 2.0 * (self.w * c[1] + cc[1]),
            v[2] + 2.0 * (self.w * c[2] + cc[2]),
        ]
    }

    /// Sign convention for output: `w ≥ 0`; when `w = 0` the first nonzero
    /// vector component is positive. Negative zeros are cleared.
    pub fn canonical(&self) -> Self {
        let flip = if self.w != 0.0 {
            self.w < 0.0
        } else {
            [self.x, self.y, self.z].into_iter().find(|c| *c != 0.0).is_some_and(|c| c < 0.0)
        };
        let s = if flip { -1.0 } else { 1.0 };
        Quaternion::new(
            clear_neg_zero(s * self.w),
            clear_neg_zero(s * self.x),
            clear_neg_zero(s * self.y),
            clear_neg_zero(s * self.z),
        )
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let Quaternion { w, x, y, z } = *self;
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }

    /// Fixed-axis roll/pitch/yaw such that `R = Rz(yaw) · Ry(pitch) · Rx(roll)`.
    pub fn to_rpy(&self) -> [f64; 3] {
        let m = self.to_matrix();
        let pitch = libm::asin((-m[2][0]).clamp(-1.0, 1.0));
        if libm::fabs(m[2][0]) < 1.0 - 1e-12 {
            let roll = libm::atan2(m[2][1], m[2][2]);
            let yaw = libm::atan2(m[1][0], m[0][0]);
            [roll, pitch, yaw]
        } else {
            // Gimbal lock: fold yaw into roll.
            let roll = libm::atan2(-m[1][2], m[1][1]);
            [roll, pitch, 0.0]
        }
    }
}

fn clear_neg_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Rigid transform: rotation followed by translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub translation: [f64; 3],
    pub rotation: Quaternion,
}

impl Default for Pose {
    fn default() -> Self {
        Pose::IDENTITY
    }
}

impl Pose {
    pub const IDENTITY: Pose = Pose { translation: [0.0; 3], rotation: Quaternion::IDENTITY };

    /// Rejects rotations whose norm is off by more than [`UNIT_TOLERANCE`].
    pub fn new(translation: [f64; 3], rotation: Quaternion) -> Result<Self, KinematicsError> {
        let n = rotation.norm();
        if !n.is_finite() || libm::fabs(n - 1.0) > UNIT_TOLERANCE || translation.iter().any(|t| !t.is_finite()) {
            return Err(KinematicsError::NonUnitQuaternion(n));
        }
        Ok(Pose { translation, rotation })
    }

    pub fn translate(x: f64, y: f64, z: f64) -> Self {
        Pose { translation: [x, y, z], rotation: Quaternion::IDENTITY }
    }

    pub fn rotation(rotation: Quaternion) -> Self {
        Pose { translation: [0.0; 3], rotation }
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        let r = self.rotation.rotate(other.translation);
        Pose {
            translation: [
                self.translation[0] + r[0],
                self.translation[1] + r[1],
                self.translation[2] + r[2],
            ],
            rotation: self.rotation.mul(&other.rotation).normalized(),
        }
    }

    pub fn invert(&self) -> Pose {
        let inv = self.rotation.conjugate();
        let t = inv.rotate(self.translation);
        Pose { translation: [-t[0], -t[1], -t[2]], rotation: inv }
    }

    pub fn transform_point(&self, p: [f64; 3]) -> [f64; 3] {
        let r = self.rotation.rotate(p);
        [r[0] + self.translation[0], r[1] + self.translation[1], r[2] + self.translation[2]]
    }

    pub fn z_axis(&self) -> [f64; 3] {
        self.rotation.rotate([0.0, 0.0, 1.0])
    }

    /// Row-major homogeneous matrix.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let r = self.rotation.to_matrix();
        let t = self.translation;
        [
            [r[0][0], r[0][1], r[0][2], t[0]],
            [r[1][0], r[1][1], r[1][2], t[1]],
            [r[2][0], r[2][1], r[2][2], t[2]],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    /// Same pose with the canonical quaternion sign.
    pub fn canonical(&self) -> Pose {
        Pose {
            translation: self.translation.map(clear_neg_zero),
            rotation: self.rotation.canonical(),
        }
    }
}

/// Half-turn about x: mated frames share their origin and x-axis, with
/// anti-parallel z-axes.
pub const FLIP: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };

/// World pose of a child part whose joint origin `child_jo` is mated to the
/// parent's joint origin `parent_jo`, rotated by `theta` about the mated
/// z-axis.
pub fn mate_child_pose(parent_world: &Pose, parent_jo: &Pose, child_jo: &Pose, theta: f64) -> Pose {
    parent_world
        .compose(parent_jo)
        .compose(&Pose::rotation(FLIP))
        .compose(&Pose::rotation(Quaternion::rot_z(theta)))
        .compose(&child_jo.invert())
}

/// Axis of a revolute joint in world coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct JointAxis {
    pub parent: String,
    pub child: String,
    /// Unit vector along the mated z-axis.
    pub axis: [f64; 3],
    pub pivot: [f64; 3],
}

/// World pose of every occurrence plus the revolute axes.
#[derive(Clone, Debug, PartialEq)]
pub struct PosedAssembly {
    /// Aligned with the occurrence tree's pre-order.
    pub poses: Vec<(String, String, Pose)>,
    /// Revolute joints in program order.
    pub joint_axes: Vec<JointAxis>,
}

impl PosedAssembly {
    pub fn pose_of(&self, occurrence: &str) -> Option<&Pose> {
        self.poses.iter().find(|(occ, _, _)| occ == occurrence).map(|(_, _, p)| p)
    }
}

/// Number of revolute joints.
pub fn dof(tree: &OccurrenceTree) -> usize {
    tree.edges().iter().filter(|e| e.kind == JointKind::Revolute).count()
}

/// Poses the tree with the root at identity. Revolute joints take angles in
/// program joint order; rigid joints are mated at zero.
pub fn forward_kinematics(
    catalog: &Catalog,
    tree: &OccurrenceTree,
    program: &AssemblyProgram,
    angles: &[f64],
) -> Result<PosedAssembly, KinematicsError> {
    let expected = dof(tree);
    if angles.len() != expected {
        return Err(KinematicsError::AngleCountMismatch { expected, got: angles.len() });
    }
    let frame = |uuid: &str| {
        catalog
            .joint_origin(uuid)
            .map(|(_, jo)| jo.frame)
            .ok_or_else(|| KinematicsError::UnknownJointOrigin(uuid.into()))
    };

    let mut theta = alloc::vec![0.0; tree.len()];
    let mut next_angle = angles.iter();
    for joint in &program.joints {
        if joint.kind != JointKind::Revolute {
            continue;
        }
        let child = tree
            .index_of(&joint.child)
            .ok_or_else(|| KinematicsError::JointMismatch(joint.child.clone()))?;
        theta[child] = *next_angle.next().ok_or(KinematicsError::AngleCountMismatch {
            expected,
            got: angles.len(),
        })?;
    }

    let mut world = alloc::vec![Pose::IDENTITY; tree.len()];
    let mut joint_axes = Vec::new();
    // Edges are stored in child pre-order, so parents are posed first.
    for edge in tree.edges() {
        let parent_jo = frame(&edge.parent_uuid)?;
        let child_jo = frame(&edge.child_uuid)?;
        let angle = if edge.kind == JointKind::Revolute { theta[edge.child] } else { 0.0 };
        world[edge.child] = mate_child_pose(&world[edge.parent], &parent_jo, &child_jo, angle);
    }
    for joint in &program.joints {
        if joint.kind != JointKind::Revolute {
            continue;
        }
        let parent = tree.index_of(&joint.parent).ok_or_else(|| KinematicsError::JointMismatch(joint.parent.clone()))?;
        let mated = world[parent]
            .compose(&frame(&joint.parent_uuid)?)
            .compose(&Pose::rotation(FLIP));
        joint_axes.push(JointAxis {
            parent: joint.parent.clone(),
            child: joint.child.clone(),
            axis: mated.z_axis(),
            pivot: mated.translation,
        });
    }
    let poses = tree
        .nodes()
        .iter()
        .zip(world)
        .map(|(node, pose)| (node.id.clone(), node.part_id.clone(), pose))
        .collect();
    Ok(PosedAssembly { poses, joint_axes })
}
