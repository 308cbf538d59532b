mod common;

use std::collections::BTreeSet;

use asmsynth_core::assembly::{bom_and_cost, compile_program, expand_term, partition_links, replay};
use asmsynth_core::catalog::JointKind;
use asmsynth_core::kinematics::dof;
use asmsynth_core::synthesis::{combinators_from_catalog, enumerate, inhabit, part_count};
use asmsynth_core::Request;

#[test]
fn compiled_programs_replay_to_their_trees() {
    let mut checked = 0;
    for seed in 0..60 {
        let catalog = common::random_catalog(seed, 6);
        let request = Request::new(common::random_target(seed)).with_sizes(1..=6).with_limit(600);
        let grammar = inhabit(catalog.taxonomy(), &combinators_from_catalog(&catalog), &request).unwrap();
        for term in enumerate(&grammar, &request) {
            let tree = expand_term(&catalog, &term).unwrap();
            assert_eq!(Some(tree.len()), part_count(&catalog, &term));
            assert_eq!(tree.edges().len(), tree.len() - 1);

            let partition = partition_links(&tree);
            assert_eq!(partition.len(), 1 + dof(&tree));
            for e in tree.edges() {
                let same = partition.link_of(e.parent) == partition.link_of(e.child);
                assert_eq!(same, e.kind == JointKind::Rigid);
            }

            let program = compile_program(&tree, &partition);
            assert_eq!(program.joints.len(), tree.len() - 1);
            assert_eq!(program.insertions.iter().map(|i| i.quantity).sum::<usize>(), tree.len());
            let moved: BTreeSet<&str> = program.moves.iter().map(|m| m.occurrence.as_str()).collect();
            assert_eq!(moved.len(), tree.len());
            for (k, m) in program.moves.iter().enumerate() {
                if let Some((parent, _)) = m.occurrence.rsplit_once('.') {
                    assert!(program.moves[..k].iter().any(|p| p.occurrence == parent));
                }
            }

            let (replayed, replayed_partition) = replay(&catalog, &program).unwrap();
            assert!(replayed.same_assembly(&tree), "seed {seed}");
            assert_eq!(replayed_partition, partition);
            assert_eq!(bom_and_cost(&catalog, &replayed), bom_and_cost(&catalog, &tree));
            assert_eq!(compile_program(&replayed, &replayed_partition), program);
            checked += 1;
        }
    }
    assert!(checked > 100, "only {checked} programs");
}

#[test]
fn leaf_programs() {
    for seed in 0..20 {
        let catalog = common::random_catalog(seed, 6);
        let request = Request::new(common::random_target(seed)).with_sizes([1]);
        let grammar = inhabit(catalog.taxonomy(), &combinators_from_catalog(&catalog), &request).unwrap();
        for term in enumerate(&grammar, &request) {
            let tree = expand_term(&catalog, &term).unwrap();
            let program = compile_program(&tree, &partition_links(&tree));
            assert_eq!(
                (program.insertions.len(), program.links.len(), program.moves.len(), program.joints.len()),
                (1, 1, 1, 0)
            );
            let (replayed, _) = replay(&catalog, &program).unwrap();
            assert!(replayed.same_assembly(&tree));
        }
    }
}
