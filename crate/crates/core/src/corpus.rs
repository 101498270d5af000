//! Shipped collections of line bundles, each checked to be very strong when loaded.

use crate::delpezzo::{KClass, Surface};
use crate::helix::{check_very_strong, Collection, HelixError};
use crate::scalar::{s, Scalar};

/// A named collection with a short description.
#[derive(Debug, Clone)]
pub struct CorpusEntry<T> {
    pub name: &'static str,
    pub description: &'static str,
    pub collection: Collection<T>,
}

struct Spec {
    name: &'static str,
    description: &'static str,
    surface: Surface,
    /// `c1` of each line bundle in the standard NS basis.
    divisors: &'static [&'static [i64]],
}

const SPECS: &[Spec] = &[
    Spec {
        name: "p1xp1-bs",
        description: "(O, O(1,0), O(0,1), O(1,1)) on P1xP1",
        surface: Surface::P1xP1,
        divisors: &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]],
    },
    Spec {
        name: "p1xp1-alt",
        description: "(O, O(1,0), O(1,1), O(2,1)) on P1xP1",
        surface: Surface::P1xP1,
        divisors: &[&[0, 0], &[1, 0], &[1, 1], &[2, 1]],
    },
    Spec {
        name: "p2-beilinson",
        description: "(O, O(1), O(2)) on P2",
        surface: Surface::BlowupP2 { m: 0 },
        divisors: &[&[0], &[1], &[2]],
    },
    Spec {
        name: "dp1-lines",
        description: "(O, O(H-E), O(H), O(2H-E)) on the plane blown up in one point",
        surface: Surface::BlowupP2 { m: 1 },
        divisors: &[&[0, 0], &[1, -1], &[1, 0], &[2, -1]],
    },
    Spec {
        name: "dp2-lines",
        description: "(O, O(H-E1), O(H-E2), O(H), O(2H-E1-E2)) on the plane blown up in two points",
        surface: Surface::BlowupP2 { m: 2 },
        divisors: &[&[0, 0, 0], &[1, -1, 0], &[1, 0, -1], &[1, 0, 0], &[2, -1, -1]],
    },
    Spec {
        name: "dp3-lines",
        description: "(O, O(H-E1), O(H-E2), O(H-E3), O(H), O(2H-E1-E2-E3)) on the plane blown up in three points",
        surface: Surface::BlowupP2 { m: 3 },
        divisors: &[
            &[0, 0, 0, 0],
            &[1, -1, 0, 0],
            &[1, 0, -1, 0],
            &[1, 0, 0, -1],
            &[1, 0, 0, 0],
            &[2, -1, -1, -1],
        ],
    },
];

fn build<T: Scalar>(spec: &Spec) -> Result<CorpusEntry<T>, HelixError> {
    let objects = spec
        .divisors
        .iter()
        .map(|d| KClass::line_bundle(&spec.surface, &d.iter().map(|&x| s(x)).collect::<Vec<T>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let collection = Collection::new(spec.surface, objects)?;
    check_very_strong(&collection)?;
    Ok(CorpusEntry { name: spec.name, description: spec.description, collection })
}

/// Every entry, in a fixed order. Fails if any entry is not very strong.
pub fn entries<T: Scalar>() -> Result<Vec<CorpusEntry<T>>, HelixError> {
    SPECS.iter().map(build).collect()
}

pub fn names() -> Vec<&'static str> {
    SPECS.iter().map(|s| s.name).collect()
}

pub fn get<T: Scalar>(name: &str) -> Option<Collection<T>> {
    let spec = SPECS.iter().find(|s| s.name == name)?;
    Some(build(spec).expect("corpus entries are checked by tests").collection)
}
