//! Independent check of a slot decision against the per-slot constraints:
//! one selection per satellite, only visible stations, no more concurrent
//! satellites than antennas, and well-formed (binary) selections.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::model::Scenario;
use crate::orbit::ContactTable;
use crate::scheduler::Assignment;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// More than one selection for a satellite.
    MultipleSelections { satellite: String },
    /// Station not in the satellite's visible set.
    NotVisible { satellite: String, station: String },
    /// More satellites on a station than it has antennas, or one antenna
    /// used twice.
    AntennaCapacity { station: String, detail: String },
    /// A selection that does not name a real satellite, antenna or data
    /// center, or whose unassigned list disagrees with its selections.
    Malformed { detail: String },
}

impl Violation {
    pub fn constraint(&self) -> &'static str {
        match self {
            Violation::MultipleSelections { .. } => "one station and data center per satellite",
            Violation::NotVisible { .. } => "visible stations only",
            Violation::AntennaCapacity { .. } => "antenna capacity",
            Violation::Malformed { .. } => "binary selection",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.constraint())?;
        match self {
            Violation::MultipleSelections { satellite } => {
                write!(f, "satellite {satellite} has more than one selection")
            }
            Violation::NotVisible { satellite, station } => {
                write!(f, "satellite {satellite} cannot see ground station {station}")
            }
            Violation::AntennaCapacity { station, detail } => write!(f, "ground station {station}: {detail}"),
            Violation::Malformed { detail } => f.write_str(detail),
        }
    }
}

pub fn check_assignment(
    assignment: &Assignment,
    scenario: &Scenario,
    contacts: &ContactTable,
    slot: usize,
) -> Result<(), Violation> {
    let sat_id = |s: usize| scenario.satellites[s].id.clone();
    let gs_id = |g: usize| scenario.ground_stations[g].id.clone();

    if assignment.slot != slot {
        return Err(Violation::Malformed {
            detail: format!("assignment for slot {} applied at slot {slot}", assignment.slot),
        });
    }

    let mut selected = HashSet::new();
    let mut antennas = HashSet::new();
    let mut per_station = vec![0usize; scenario.ground_stations.len()];
    for leg in &assignment.legs {
        if leg.satellite >= scenario.satellites.len() {
            return Err(Violation::Malformed {
                detail: format!("unknown satellite index {}", leg.satellite),
            });
        }
        let g = leg.antenna.station;
        if g >= scenario.ground_stations.len() {
            return Err(Violation::Malformed {
                detail: format!("unknown ground station index {g}"),
            });
        }
        if leg.data_center >= scenario.data_centers.len() {
            return Err(Violation::Malformed {
                detail: format!("unknown data center index {}", leg.data_center),
            });
        }
        if !(leg.amount.is_finite() && leg.amount >= 0.0) {
            return Err(Violation::Malformed {
                detail: format!(
                    "selection for satellite {} has amount {}",
                    sat_id(leg.satellite),
                    leg.amount
                ),
            });
        }
        if !selected.insert(leg.satellite) {
            return Err(Violation::MultipleSelections {
                satellite: sat_id(leg.satellite),
            });
        }
        if contacts.rate(leg.satellite, g, slot).is_none() {
            return Err(Violation::NotVisible {
                satellite: sat_id(leg.satellite),
                station: gs_id(g),
            });
        }
        let capacity = scenario.ground_stations[g].antennas;
        if leg.antenna.index >= capacity {
            return Err(Violation::AntennaCapacity {
                station: gs_id(g),
                detail: format!("antenna index {} but only {capacity} antennas", leg.antenna.index),
            });
        }
        if !antennas.insert(leg.antenna) {
            return Err(Violation::AntennaCapacity {
                station: gs_id(g),
                detail: format!("antenna {} assigned twice", leg.antenna.index),
            });
        }
        per_station[g] += 1;
        if per_station[g] > capacity {
            return Err(Violation::AntennaCapacity {
                station: gs_id(g),
                detail: format!("{} satellites on {capacity} antennas", per_station[g]),
            });
        }
    }
    for &s in &assignment.unassigned {
        if selected.contains(&s) || s >= scenario.satellites.len() {
            return Err(Violation::Malformed {
                detail: format!("satellite index {s} listed as unassigned but selected or unknown"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::InstanceBuilder;
    use crate::model::AntennaRef;
    use crate::scheduler::Leg;

    fn leg(s: usize, g: usize, index: usize) -> Leg {
        Leg {
            satellite: s,
            antenna: AntennaRef { station: g, index },
            data_center: 0,
            amount: 1.0,
        }
    }

    fn inst() -> crate::fixtures::SlotInstance {
        InstanceBuilder::new()
            .satellite(&[(0, 10.0)])
            .satellite(&[(0, 10.0)])
            .station(20.0, 1)
            .station(20.0, 2)
            .data_center(0.01, 0.006)
            .contact(0, 0, 100.0)
            .contact(1, 0, 100.0)
            .contact(0, 1, 100.0)
            .build()
    }

    fn check(legs: Vec<Leg>) -> Result<(), Violation> {
        let i = inst();
        check_assignment(
            &Assignment::from_legs(i.slot, 2, legs),
            &i.scenario,
            &i.contacts,
            i.slot,
        )
    }

    #[test]
    fn accepts_feasible() {
        assert!(check(vec![leg(0, 1, 1), leg(1, 0, 0)]).is_ok());
        assert!(check(vec![]).is_ok());
    }

    #[test]
    fn rejects_each_constraint() {
        assert!(matches!(
            check(vec![leg(0, 0, 0), leg(0, 1, 0)]),
            Err(Violation::MultipleSelections { .. })
        ));
        assert!(matches!(check(vec![leg(1, 1, 0)]), Err(Violation::NotVisible { .. })));
        assert!(matches!(
            check(vec![leg(0, 0, 0), leg(1, 0, 0)]),
            Err(Violation::AntennaCapacity { .. })
        ));
        assert!(matches!(
            check(vec![leg(0, 0, 1)]),
            Err(Violation::AntennaCapacity { .. })
        ));
        let mut bad = leg(0, 0, 0);
        bad.data_center = 3;
        assert!(matches!(check(vec![bad]), Err(Violation::Malformed { .. })));
    }

    #[test]
    fn message_names_constraint_and_entity() {
        let msg = check(vec![leg(1, 1, 0)]).unwrap_err().to_string();
        assert!(msg.contains("visible stations only") && msg.contains("sat-1") && msg.contains("gs-1"));
    }
}
