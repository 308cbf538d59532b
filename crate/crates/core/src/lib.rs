//! Synthesis of mechanical assemblies from a catalog of typed parts.
//!
//! Parts carry joint origins annotated with intersection types drawn from
//! three subtype hierarchies. Every provided joint origin yields a
//! configuration of its part, and every configuration becomes a combinator.
//! Inhabitation of a requested type produces a tree grammar whose terms are
//! assembly candidates; each term compiles to an [`assembly::AssemblyProgram`]
//! with a link partition at the non-rigid joints, a bill of materials and a
//! forward-kinematics model.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the HTTP
//! service and the command line live in the `asmsynth` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod catalog;
pub mod kinematics;
pub mod money;
pub mod synthesis;
pub mod taxonomy;
pub mod types;

pub use assembly::{AssemblyProgram, Bom, LinkPartition, OccurrenceTree};
pub use catalog::{Catalog, Configuration, JointKind, JointOrigin, Part};
pub use kinematics::{Pose, Quaternion};
pub use money::Money;
pub use synthesis::{Combinator, Request, Term, TreeGrammar};
pub use taxonomy::{Atom, Hierarchy, Taxonomy, TaxonomyContext};
pub use types::{CanonicalType, TypeExpr};
