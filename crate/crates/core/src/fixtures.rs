//! Shipped synthetic scenario fixtures.
//!
//! These are classical-model desk systems, not reproductions of any real
//! network:
//!
//! * `single_machine` - one machine feeding a constant-impedance load, 0.1 pu load step;
//! * `two_area` - two machines, one per area, fault at the midpoint bus;
//! * `three_area` - three meshed areas with two machines each, fault in area A;
//! * `thirteen_area` - a 13-area ring with chords and 20 machines.

use crate::config::ScenarioFile;

pub const SINGLE_MACHINE: &str = include_str!("../fixtures/single_machine.json");
pub const TWO_AREA: &str = include_str!("../fixtures/two_area.json");
pub const THREE_AREA: &str = include_str!("../fixtures/three_area.json");
pub const THIRTEEN_AREA: &str = include_str!("../fixtures/thirteen_area.json");

pub const ALL: [(&str, &str); 4] = [
    ("single_machine", SINGLE_MACHINE),
    ("two_area", TWO_AREA),
    ("three_area", THREE_AREA),
    ("thirteen_area", THIRTEEN_AREA),
];

/// Parses a shipped fixture by name.
pub fn load(name: &str) -> Option<ScenarioFile> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ScenarioFile::from_json(text).expect("shipped fixture parses"))
}

pub fn single_machine() -> ScenarioFile {
    ScenarioFile::from_json(SINGLE_MACHINE).expect("shipped fixture parses")
}

pub fn two_area() -> ScenarioFile {
    ScenarioFile::from_json(TWO_AREA).expect("shipped fixture parses")
}

pub fn three_area() -> ScenarioFile {
    ScenarioFile::from_json(THREE_AREA).expect("shipped fixture parses")
}

pub fn thirteen_area() -> ScenarioFile {
    ScenarioFile::from_json(THIRTEEN_AREA).expect("shipped fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Severity;

    #[test]
    fn fixtures_are_runnable() {
        for (name, _) in ALL {
            let s = load(name).unwrap();
            s.check_runnable().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.scenario_id(), name);
        }
    }

    #[test]
    fn fixture_shapes() {
        assert_eq!(single_machine().grid.area_ids().len(), 1);
        assert_eq!(two_area().grid.area_ids().len(), 2);
        let three = three_area();
        assert_eq!(three.grid.area_ids(), vec!["A", "B", "C"]);
        assert_eq!(three.grid.generators.len(), 6);
        let thirteen = thirteen_area();
        assert_eq!(thirteen.grid.area_ids().len(), 13);
        assert_eq!(thirteen.grid.generators.len(), 20);
    }

    #[test]
    fn multi_area_fixtures_have_no_structural_findings() {
        for s in [three_area(), thirteen_area()] {
            assert!(crate::validate(&s.grid).iter().all(|f| f.severity == Severity::Warning));
        }
    }
}
