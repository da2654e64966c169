//! Bundled example data: the three worked tables, the simplest feasible set
//! and the elliptic-saddle configuration.

use crate::feasible::{FeasibleError, FeasibleSet};
use crate::skeleton::{parse_configuration, Configuration};

pub const TABLE1_JSON: &str = include_str!("../fixtures/table1.json");
pub const TABLE2_JSON: &str = include_str!("../fixtures/table2.json");
pub const TABLE3_JSON: &str = include_str!("../fixtures/table3.json");
pub const SIMPLEST_JSON: &str = include_str!("../fixtures/simplest.json");
pub const ELLIPTIC_SADDLE_JSON: &str = include_str!("../fixtures/elliptic_saddle.json");

/// Single chain of three nested loops inside one heteroclinic sector.
pub fn table1() -> FeasibleSet {
    FeasibleSet::from_json(TABLE1_JSON).expect("bundled fixture is valid")
}

/// Three heteroclinic sectors; fails the adjacent-representative condition
/// across the wrap-around, so this returns an error.
pub fn table2() -> Result<FeasibleSet, FeasibleError> {
    FeasibleSet::from_json(TABLE2_JSON)
}

/// Thirteen keys over four heteroclinic sectors.
pub fn table3() -> FeasibleSet {
    FeasibleSet::from_json(TABLE3_JSON).expect("bundled fixture is valid")
}

/// One heteroclinic separatrix and one homoclinic loop.
pub fn simplest() -> FeasibleSet {
    FeasibleSet::from_json(SIMPLEST_JSON).expect("bundled fixture is valid")
}

pub fn elliptic_saddle() -> Configuration {
    parse_configuration(ELLIPTIC_SADDLE_JSON).expect("bundled fixture is valid")
}

/// Looks a fixture up by name, for the CLI and the demo.
pub fn feasible_by_name(name: &str) -> Option<Result<FeasibleSet, FeasibleError>> {
    match name {
        "table1" => Some(Ok(table1())),
        "table2" => Some(table2()),
        "table3" => Some(Ok(table3())),
        "simplest" => Some(Ok(simplest())),
        _ => None,
    }
}
