//! The bundled toy arm catalog: a base plate, two motors, three brackets
//! (one of them self-rotating), an extension link and two effectors.

use asmsynth_core::{Catalog, Request};

use crate::formats;

pub const TAXONOMIES: &str = include_str!("../data/toy-arm/taxonomies.json");

pub const PARTS: [(&str, &str); 9] = [
    ("base-plate", include_str!("../data/toy-arm/parts/base-plate.json")),
    ("bracket-l", include_str!("../data/toy-arm/parts/bracket-l.json")),
    ("bracket-u", include_str!("../data/toy-arm/parts/bracket-u.json")),
    ("extension-link", include_str!("../data/toy-arm/parts/extension-link.json")),
    ("gripper", include_str!("../data/toy-arm/parts/gripper.json")),
    ("motor-a", include_str!("../data/toy-arm/parts/motor-a.json")),
    ("motor-b", include_str!("../data/toy-arm/parts/motor-b.json")),
    ("rotation-bracket", include_str!("../data/toy-arm/parts/rotation-bracket.json")),
    ("suction-cup", include_str!("../data/toy-arm/parts/suction-cup.json")),
];

pub const ARM_REQUEST: &str = include_str!("../data/toy-arm/requests/arm.json");
pub const SELF_ROTATE_REQUEST: &str = include_str!("../data/toy-arm/requests/self-rotate.json");
pub const SIZES_REQUEST: &str = include_str!("../data/toy-arm/requests/sizes.json");

pub fn catalog() -> Catalog {
    let ctx = formats::load_taxonomies([TAXONOMIES]).expect("bundled taxonomies are valid");
    let parts = PARTS.iter().map(|(_, json)| formats::load_part(json).expect("bundled parts are valid"));
    Catalog::new(ctx, parts).expect("bundled catalog is valid")
}

/// Target {Arm}, nothing propagated, default limit.
pub fn arm_request() -> Request {
    formats::load_request(ARM_REQUEST).expect("bundled request is valid")
}

pub fn self_rotate_request() -> Request {
    formats::load_request(SELF_ROTATE_REQUEST).expect("bundled request is valid")
}

pub fn sizes_request() -> Request {
    formats::load_request(SIZES_REQUEST).expect("bundled request is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use asmsynth_core::synthesis::{combinators_from_catalog, count_terms, inhabit};

    #[test]
    fn bundled_files_are_canonical() {
        let ctx = formats::load_taxonomies([TAXONOMIES]).unwrap();
        assert_eq!(formats::save_taxonomies(&ctx), TAXONOMIES);
        for (id, json) in PARTS {
            let part = formats::load_part(json).unwrap();
            assert_eq!(part.part_id, id);
            assert_eq!(formats::save_part(&part), json, "{id}");
        }
        for json in [ARM_REQUEST, SELF_ROTATE_REQUEST, SIZES_REQUEST] {
            assert_eq!(formats::save_request(&formats::load_request(json).unwrap()), json);
        }
    }

    #[test]
    fn arm_counts() {
        let catalog = catalog();
        assert_eq!(catalog.len(), 9);
        let request = arm_request();
        let grammar = inhabit(catalog.taxonomy(), &combinators_from_catalog(&catalog), &request).unwrap();
        // base, motor and one of two effectors with either motor.
        assert_eq!(count_terms(&grammar, 1), 0);
        assert_eq!(count_terms(&grammar, 2), 0);
        assert_eq!(count_terms(&grammar, 3), 4);
        // One extension link in front of the motor.
        assert_eq!(count_terms(&grammar, 4), 4);
        // Either two extensions, or motor, bracket, motor, effector.
        assert_eq!(count_terms(&grammar, 5), 4 + 2 * 3 * 4);
    }
}
