//! Random catalogs and an exhaustive application-and-filter oracle.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use asmsynth_core::catalog::{derive_configurations, Catalog, JointKind, JointOrigin, Part};
use asmsynth_core::synthesis::{CombinatorId, VariantId};
use asmsynth_core::types::subtype_le;
use asmsynth_core::{Atom, Pose, Term, TaxonomyContext, TypeExpr};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const PART_ATOMS: [&str; 4] = ["T0", "T1", "T2", "T3"];
pub const ATTRIBUTE_ATOMS: [&str; 2] = ["A0", "A1"];

fn random_taxonomy(rng: &mut StdRng) -> TaxonomyContext {
    let mut ctx = TaxonomyContext::default();
    for (i, name) in PART_ATOMS.iter().enumerate() {
        let parents: Vec<&str> = PART_ATOMS[..i].iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        ctx = ctx.create_node(&Atom::parts(*name), &parents).unwrap();
    }
    for name in ATTRIBUTE_ATOMS {
        ctx = ctx.create_node(&Atom::attributes(name), &[]).unwrap();
    }
    ctx
}

fn random_parts_type(rng: &mut StdRng, max: usize) -> TypeExpr {
    let n = rng.gen_range(1..=max);
    PART_ATOMS.choose_multiple(rng, n).map(|n| Atom::parts(*n)).collect()
}

fn jo(uuid: String, provides: Option<TypeExpr>, requires: Option<TypeExpr>, kind: JointKind) -> JointOrigin {
    JointOrigin {
        label: uuid.clone(),
        uuid,
        frame: Pose::translate(0.0, 0.0, 5.0),
        provides,
        requires,
        joint_kind: kind,
        group_id: None,
    }
}

/// A valid catalog with at most `max_parts` parts whose configurations have
/// at most two arguments.
pub fn random_catalog(seed: u64, max_parts: usize) -> Catalog {
    let mut rng = StdRng::seed_from_u64(seed);
    let ctx = random_taxonomy(&mut rng);
    let n_parts = rng.gen_range(1..=max_parts);
    let mut parts = Vec::new();
    for p in 0..n_parts {
        let mut jos = Vec::new();
        let n_provided = rng.gen_range(1..=2);
        for k in 0..n_provided {
            jos.push(jo(format!("p{p}-p{k}"), Some(random_parts_type(&mut rng, 2)), None, JointKind::Rigid));
        }
        let n_required = rng.gen_range(0..=2);
        let group = n_required == 2 && rng.gen_bool(0.3);
        let shared = random_parts_type(&mut rng, 1);
        for k in 0..n_required {
            let kind = if rng.gen_bool(0.5) { JointKind::Rigid } else { JointKind::Revolute };
            let requires = if group { shared.clone() } else { random_parts_type(&mut rng, 1) };
            let mut j = jo(format!("p{p}-r{k}"), None, Some(requires), if group { JointKind::Revolute } else { kind });
            if group {
                j.group_id = Some("g".into());
            }
            jos.push(j);
        }
        let part_types: TypeExpr =
            ATTRIBUTE_ATOMS.iter().filter(|_| rng.gen_bool(0.3)).map(|a| Atom::attributes(*a)).collect();
        parts.push(Part {
            part_id: format!("part{p}"),
            name: format!("Part {p}"),
            part_types,
            unit_cost: None,
            joint_origins: jos,
        });
    }
    Catalog::new(ctx, parts).unwrap()
}

pub fn random_target(seed: u64) -> TypeExpr {
    let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
    TypeExpr::atom(Atom::parts(*PART_ATOMS.choose(&mut rng).unwrap()))
}

struct Typed {
    term: Term,
    ty: TypeExpr,
    provides: BTreeSet<Atom>,
}

/// Every plain term with part count at most `max_size`, built by applying each
/// configuration to every tuple of smaller terms and keeping the applications
/// whose children fit the argument types.
///
/// Returns well-typed terms of type ≤ `target` containing every atom of
/// `propagated`, keyed by part count.
pub fn brute_force(
    catalog: &Catalog,
    target: &TypeExpr,
    propagated: &TypeExpr,
    max_size: usize,
) -> BTreeMap<usize, BTreeSet<Term>> {
    let ctx = catalog.taxonomy();
    let configs: Vec<_> = catalog.parts().flat_map(|p| derive_configurations(ctx, p).unwrap()).collect();
    let mut by_size: Vec<Vec<Typed>> = (0..=max_size).map(|_| Vec::new()).collect();
    for size in 1..=max_size {
        for c in &configs {
            let mults: Vec<usize> = c.arg_groups.iter().map(|g| g.members.len()).collect();
            // Choose child terms one argument at a time, tracking the weighted size.
            let mut picks: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
            for m in &mults {
                let mut next = Vec::new();
                for pick in &picks {
                    let used: usize = pick.iter().map(|&(s, _)| s).zip(&mults).map(|(s, m)| s * m).sum();
                    for s in 1..size {
                        if used + m * s > size - 1 {
                            break;
                        }
                        for k in 0..by_size[s].len() {
                            let mut p = pick.clone();
                            p.push((s, k));
                            next.push(p);
                        }
                    }
                }
                picks = next;
            }
            for pick in picks {
                let used: usize = pick.iter().map(|&(s, _)| s).zip(&mults).map(|(s, m)| s * m).sum();
                if 1 + used != size {
                    continue;
                }
                let fits = pick.iter().zip(&c.arg_groups).all(|(&(s, k), g)| {
                    subtype_le(ctx, &by_size[s][k].ty, g.required.as_expr())
                });
                if !fits {
                    continue;
                }
                let children: Vec<Term> = pick.iter().map(|&(s, k)| by_size[s][k].term.clone()).collect();
                let mut provides: BTreeSet<Atom> = ctx
                    .atoms()
                    .filter(|a| subtype_le(ctx, c.provided.as_expr(), &TypeExpr::atom((*a).clone())))
                    .cloned()
                    .collect();
                for &(s, k) in &pick {
                    provides.extend(by_size[s][k].provides.iter().cloned());
                }
                let term = Term::new(
                    VariantId::plain(CombinatorId { part_id: c.part_id.clone(), config_id: c.config_id.clone() }),
                    children,
                );
                by_size[size].push(Typed { term, ty: c.provided.as_expr().clone(), provides });
            }
        }
    }
    let mut out = BTreeMap::new();
    for (size, terms) in by_size.into_iter().enumerate().skip(1) {
        let set: BTreeSet<Term> = terms
            .into_iter()
            .filter(|t| subtype_le(ctx, &t.ty, target) && propagated.atoms().all(|p| t.provides.contains(p)))
            .map(|t| t.term)
            .collect();
        out.insert(size, set);
    }
    out
}
