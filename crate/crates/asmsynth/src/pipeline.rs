//! Request → grammar → terms → occurrence trees, programs and BOMs.

use asmsynth_core::assembly::{
    bom_and_cost, compile_program, expand_term, partition_links, AssemblyError, Bom, LinkPartition,
    OccurrenceTree,
};
use asmsynth_core::kinematics::{forward_kinematics, KinematicsError, PosedAssembly};
use asmsynth_core::synthesis::{
    check_term, combinators_from_catalog, enumerate, inhabit, part_count, SynthesisError, DEFAULT_PROPAGATED_CAP,
};
use asmsynth_core::{AssemblyProgram, CanonicalType, Catalog, Request, Term};

use crate::formats::{FormatError, ResultDoc, TermDoc, TypeExprDoc};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// A synthesized term with everything derived from it.
#[derive(Clone, Debug)]
pub struct CompiledResult {
    pub term: Term,
    pub ty: CanonicalType,
    pub part_count: usize,
    pub tree: OccurrenceTree,
    pub partition: LinkPartition,
    pub program: AssemblyProgram,
    pub bom: Bom,
}

impl CompiledResult {
    pub fn compile(catalog: &Catalog, term: Term) -> Result<Self, PipelineError> {
        let ty = check_term(catalog, &term).map_err(AssemblyError::from)?;
        let tree = expand_term(catalog, &term)?;
        let part_count = part_count(catalog, &term).unwrap_or(tree.len());
        let partition = partition_links(&tree);
        let program = compile_program(&tree, &partition);
        let bom = bom_and_cost(catalog, &tree);
        Ok(CompiledResult { term, ty, part_count, tree, partition, program, bom })
    }

    pub fn doc(&self) -> ResultDoc {
        ResultDoc {
            ty: TypeExprDoc::from_type(&self.ty),
            part_count: self.part_count,
            term: TermDoc::from_term(&self.term),
        }
    }

    pub fn pose(&self, catalog: &Catalog, angles: &[f64]) -> Result<PosedAssembly, KinematicsError> {
        forward_kinematics(catalog, &self.tree, &self.program, angles)
    }
}

/// Validates the request (propagated atoms capped at `propagated_cap`),
/// synthesizes and compiles every enumerated term.
pub fn synthesize_with_cap(
    catalog: &Catalog,
    request: &Request,
    propagated_cap: usize,
) -> Result<Vec<CompiledResult>, PipelineError> {
    request.validate(catalog.taxonomy(), propagated_cap)?;
    let grammar = inhabit(catalog.taxonomy(), &combinators_from_catalog(catalog), request)?;
    enumerate(&grammar, request).into_iter().map(|t| CompiledResult::compile(catalog, t)).collect()
}

pub fn synthesize(catalog: &Catalog, request: &Request) -> Result<Vec<CompiledResult>, PipelineError> {
    synthesize_with_cap(catalog, request, DEFAULT_PROPAGATED_CAP)
}

/// Re-checks and compiles a stored result.
pub fn compile_doc(catalog: &Catalog, doc: &ResultDoc) -> Result<CompiledResult, PipelineError> {
    CompiledResult::compile(catalog, doc.term.to_term()?)
}
