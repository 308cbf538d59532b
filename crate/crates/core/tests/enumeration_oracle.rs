mod common;

use std::collections::BTreeSet;

use asmsynth_core::synthesis::{
    check_term, combinators_from_catalog, contains_atom, count_terms, enumerate, inhabit, part_count,
};
use asmsynth_core::types::subtype_le;
use asmsynth_core::{Atom, Request, Term, TypeExpr};
use proptest::prelude::*;

const MAX_SIZE: usize = 5;

/// Returns the oracle's term count per size, for coverage checks.
fn check_against_oracle(seed: u64, propagated: TypeExpr) -> Vec<usize> {
    let catalog = common::random_catalog(seed, 6);
    let target = common::random_target(seed);
    let oracle = common::brute_force(&catalog, &target, &propagated, MAX_SIZE);
    let request = Request::new(target.clone()).with_propagated(propagated.clone());
    let grammar = inhabit(catalog.taxonomy(), &combinators_from_catalog(&catalog), &request).unwrap();

    let mut sizes = Vec::new();
    for size in 1..=MAX_SIZE {
        sizes.push(oracle[&size].len());
        let req = request.clone().with_sizes([size]).with_limit(1_000_000);
        let terms = enumerate(&grammar, &req);
        assert!(terms.windows(2).all(|w| w[0] < w[1]), "seed {seed}: order at size {size}");
        assert_eq!(terms.len() as u128, count_terms(&grammar, size), "seed {seed}: count at size {size}");

        let erased: Vec<Term> = terms.iter().map(Term::erased).collect();
        let unique: BTreeSet<Term> = erased.iter().cloned().collect();
        assert_eq!(unique.len(), erased.len(), "seed {seed}: duplicate assemblies at size {size}");
        assert_eq!(&unique, &oracle[&size], "seed {seed}: oracle mismatch at size {size}");

        for t in &terms {
            let ty = check_term(&catalog, t).unwrap();
            assert!(subtype_le(catalog.taxonomy(), &ty, &target));
            assert_eq!(part_count(&catalog, t), Some(size));
            for p in propagated.atoms() {
                assert!(contains_atom(&catalog, t, p));
            }
        }
    }
    sizes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plain_requests_match_brute_force(seed in any::<u64>()) {
        check_against_oracle(seed, TypeExpr::top());
    }

    #[test]
    fn propagated_requests_match_brute_force(seed in any::<u64>(), pick in 0usize..3) {
        let propagated = match pick {
            0 => TypeExpr::atom(Atom::attributes("A0")),
            1 => TypeExpr::atom(Atom::parts("T3")),
            _ => [Atom::attributes("A0"), Atom::attributes("A1")].into_iter().collect(),
        };
        check_against_oracle(seed, propagated);
    }
}

#[test]
fn fixed_seeds_match_brute_force() {
    let mut totals = [0usize; MAX_SIZE];
    let mut propagated_total = 0;
    for seed in 0..20 {
        for (t, n) in totals.iter_mut().zip(check_against_oracle(seed, TypeExpr::top())) {
            *t += n;
        }
        propagated_total += check_against_oracle(seed, TypeExpr::atom(Atom::attributes("A1"))).iter().sum::<usize>();
    }
    eprintln!("oracle terms per size: {totals:?}, propagated: {propagated_total}");
    // The seeds must exercise nested terms, not only leaves.
    assert!(totals[2..].iter().all(|&n| n > 0), "{totals:?}");
    assert!(propagated_total > 0);
}

#[test]
fn enumeration_is_deterministic() {
    for seed in 0..10 {
        let catalog = common::random_catalog(seed, 6);
        let request = Request::new(common::random_target(seed));
        let run = || {
            let g = inhabit(catalog.taxonomy(), &combinators_from_catalog(&catalog), &request).unwrap();
            enumerate(&g, &request)
        };
        assert_eq!(run(), run());
    }
}
