use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use super::*;
use crate::error::ContactPlanError;
use crate::model::AntennaRef;

pub const CONTACT_PLAN_HEADER: [&str; 5] = [
    "slot",
    "satellite_id",
    "ground_station_id",
    "elevation_deg",
    "rate_mb_per_min",
];

/// One satellite–station visibility in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub slot: usize,
    pub satellite: usize,
    pub station: usize,
    pub elevation_deg: f64,
    /// R_{s,g}(t), MB/min.
    pub rate: f64,
}

/// Per-slot visibility sets and link rates over the whole horizon.
///
/// Each slot's contacts are sorted by (satellite, station), so S(t), G^s(t)
/// and A^s(t) are contiguous runs and come out in index order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContactTable {
    slots: Vec<Vec<Contact>>,
}

impl ContactTable {
    /// Builds the table from the scenario's contact plan if it names one,
    /// otherwise from the built-in propagator.
    pub fn build(scenario: &Scenario) -> Result<Self, ContactPlanError> {
        match &scenario.sim.contact_plan_path {
            Some(path) => Self::load_csv(path, scenario),
            None => Ok(Self::propagate(scenario)),
        }
    }

    pub fn empty(horizon: usize) -> Self {
        Self {
            slots: vec![Vec::new(); horizon],
        }
    }

    /// Computes contacts with the circular-orbit propagator.
    pub fn propagate(scenario: &Scenario) -> Self {
        let stations: Vec<GeoPoint> = scenario.ground_stations.iter().map(station_point).collect();
        let mask = scenario.sim.elevation_mask_deg;
        let slots = (0..scenario.sim.horizon)
            .into_par_iter()
            .map(|t| {
                let mut out = Vec::new();
                for (s, sat) in scenario.satellites.iter().enumerate() {
                    let sub = propagate(sat, t, scenario.sim.tau);
                    let reach = max_central_angle(sat.altitude_km, mask);
                    for (g, &st) in stations.iter().enumerate() {
                        if central_angle(sub, st) > reach + 1e-9 {
                            continue;
                        }
                        let elevation_deg = elevation_deg(sub, sat.altitude_km, st);
                        if elevation_deg < mask {
                            continue;
                        }
                        out.push(Contact {
                            slot: t,
                            satellite: s,
                            station: g,
                            elevation_deg,
                            rate: gsl_rate(scenario, s, g, t, elevation_deg),
                        });
                    }
                }
                out
            })
            .collect();
        Self { slots }
    }

    /// Builds a table from explicit contacts. Contacts outside the horizon
    /// are dropped; duplicates keep the first occurrence.
    pub fn from_contacts(horizon: usize, contacts: impl IntoIterator<Item = Contact>) -> Self {
        let mut table = Self::empty(horizon);
        let mut seen = HashSet::new();
        for c in contacts {
            if c.slot < horizon && seen.insert((c.slot, c.satellite, c.station)) {
                table.slots[c.slot].push(c);
            }
        }
        for slot in &mut table.slots {
            slot.sort_by_key(|c| (c.satellite, c.station));
        }
        table
    }

    pub fn horizon(&self) -> usize {
        self.slots.len()
    }

    /// All contacts of slot `t`, sorted by (satellite, station).
    pub fn contacts(&self, t: usize) -> &[Contact] {
        self.slots.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Contact> {
        self.slots.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// S(t): satellites with at least one visible station, ascending.
    pub fn visible_satellites(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.contacts(t).iter().map(|c| c.satellite).collect();
        out.dedup();
        out
    }

    /// Contacts of satellite `s` at slot `t`; one per station in G^s(t).
    pub fn stations_for(&self, s: usize, t: usize) -> &[Contact] {
        let c = self.contacts(t);
        let lo = c.partition_point(|x| x.satellite < s);
        let hi = c.partition_point(|x| x.satellite <= s);
        &c[lo..hi]
    }

    pub fn contact(&self, s: usize, g: usize, t: usize) -> Option<&Contact> {
        self.stations_for(s, t).iter().find(|c| c.station == g)
    }

    /// R_{s,g}(t) if (s, g) is a contact at `t`.
    pub fn rate(&self, s: usize, g: usize, t: usize) -> Option<f64> {
        self.contact(s, g, t).map(|c| c.rate)
    }

    /// A^s(t): every antenna of every station in G^s(t).
    pub fn antennas_for(&self, s: usize, t: usize, scenario: &Scenario) -> Vec<AntennaRef> {
        self.stations_for(s, t)
            .iter()
            .flat_map(|c| {
                (0..scenario.ground_stations[c.station].antennas).map(move |index| AntennaRef {
                    station: c.station,
                    index,
                })
            })
            .collect()
    }

    /// Writes the contact-plan CSV.
    pub fn write_csv<W: Write>(&self, writer: W, scenario: &Scenario) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CONTACT_PLAN_HEADER)?;
        for c in self.iter() {
            w.write_record([
                c.slot.to_string(),
                scenario.satellites[c.satellite].id.clone(),
                scenario.ground_stations[c.station].id.clone(),
                c.elevation_deg.to_string(),
                c.rate.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self, scenario: &Scenario) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, scenario).expect("writing to memory");
        buf
    }

    pub fn load_csv(path: &Path, scenario: &Scenario) -> Result<Self, ContactPlanError> {
        let file = std::fs::File::open(path).map_err(|source| ContactPlanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file, scenario)
    }

    /// Parses and validates a contact-plan CSV. Rows may come in any order.
    pub fn read_csv<R: Read>(reader: R, scenario: &Scenario) -> Result<Self, ContactPlanError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut records = rdr.records();
        let parse_err = |line: u64, reason: String| ContactPlanError::Parse { line, reason };

        match records.next() {
            None => return Ok(Self::empty(scenario.sim.horizon)),
            Some(header) => {
                let header = header.map_err(|e| parse_err(1, e.to_string()))?;
                let fields: Vec<&str> = header.iter().map(str::trim).collect();
                if fields != CONTACT_PLAN_HEADER {
                    return Err(parse_err(
                        1,
                        format!(
                            "expected header {:?}, found {:?}",
                            CONTACT_PLAN_HEADER.join(","),
                            fields.join(",")
                        ),
                    ));
                }
            }
        }

        let mut table = Self::empty(scenario.sim.horizon);
        let mut seen = HashSet::new();
        for record in records {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != CONTACT_PLAN_HEADER.len() {
                return Err(parse_err(line, format!("expected 5 fields, found {}", record.len())));
            }
            let field = |i: usize| record[i].trim();
            let slot: usize = field(0)
                .parse()
                .map_err(|_| parse_err(line, format!("bad slot {:?}", field(0))))?;
            let satellite = scenario
                .satellite_index(field(1))
                .ok_or_else(|| ContactPlanError::UnknownId {
                    line,
                    kind: "satellite",
                    id: field(1).to_string(),
                })?;
            let station = scenario
                .station_index(field(2))
                .ok_or_else(|| ContactPlanError::UnknownId {
                    line,
                    kind: "ground station",
                    id: field(2).to_string(),
                })?;
            let elevation_deg: f64 = field(3)
                .parse()
                .map_err(|_| parse_err(line, format!("bad elevation {:?}", field(3))))?;
            let rate: f64 = field(4)
                .parse()
                .map_err(|_| parse_err(line, format!("bad rate {:?}", field(4))))?;
            if slot >= scenario.sim.horizon {
                return Err(parse_err(
                    line,
                    format!("slot {slot} outside horizon {}", scenario.sim.horizon),
                ));
            }
            if !(elevation_deg.is_finite() && elevation_deg <= 90.0) {
                return Err(parse_err(line, format!("elevation {elevation_deg} out of range")));
            }
            if elevation_deg < scenario.sim.elevation_mask_deg {
                return Err(parse_err(
                    line,
                    format!(
                        "elevation {elevation_deg} below mask {}",
                        scenario.sim.elevation_mask_deg
                    ),
                ));
            }
            if !(rate.is_finite() && rate > 0.0) {
                return Err(parse_err(line, format!("rate must be positive (got {rate})")));
            }
            if !seen.insert((slot, satellite, station)) {
                return Err(parse_err(line, "duplicate contact".to_string()));
            }
            table.slots[slot].push(Contact {
                slot,
                satellite,
                station,
                elevation_deg,
                rate,
            });
        }
        for slot in &mut table.slots {
            slot.sort_by_key(|c| (c.satellite, c.station));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(sats: &[(f64, f64)], stations: &[(f64, f64)], horizon: usize) -> Scenario {
        let doc = serde_json::json!({
            "satellites": sats.iter().enumerate().map(|(i, (inc, raan))| serde_json::json!({
                "id": format!("sat-{i}"), "altitude_km": 475.0, "inclination_deg": inc, "raan_deg": raan
            })).collect::<Vec<_>>(),
            "ground_stations": stations.iter().enumerate().map(|(i, (lat, lon))| serde_json::json!({
                "id": format!("gs-{i}"), "provider": "p", "lat_deg": lat, "lon_deg": lon,
                "antennas": 2, "price": 20.0
            })).collect::<Vec<_>>(),
            "data_centers": [{"id": "dc", "provider": "p", "price": 0.01, "processing": 0.006}],
            "sim": {"tau": 1.0, "horizon": horizon, "xi": 60.0, "v": 1.0, "seed": 3,
                    "policy": "skygs", "backhaul_default": 7500.0}
        });
        Scenario::from_json(&doc.to_string()).unwrap()
    }

    #[test]
    fn empty_plan_has_no_contacts() {
        let sc = scenario(&[(97.4, 0.0)], &[(0.0, 0.0)], 10);
        let t = ContactTable::read_csv(&b""[..], &sc).unwrap();
        assert!(t.is_empty());
        let t = ContactTable::read_csv(
            &b"slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min\n"[..],
            &sc,
        )
        .unwrap();
        assert!(t.is_empty());
        assert_eq!(t.horizon(), 10);
        assert!((0..10).all(|s| t.visible_satellites(s).is_empty()));
    }

    #[test]
    fn single_row_plan() {
        let sc = scenario(&[(97.4, 0.0), (97.4, 90.0)], &[(0.0, 0.0), (10.0, 10.0)], 10);
        let csv = "slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min\n3,sat-0,gs-0,45,500\n";
        let t = ContactTable::read_csv(csv.as_bytes(), &sc).unwrap();
        assert_eq!(t.visible_satellites(3), vec![0]);
        assert_eq!(t.stations_for(0, 3).len(), 1);
        assert_eq!(t.stations_for(0, 3)[0].station, 0);
        assert_eq!(t.rate(0, 0, 3), Some(500.0));
        assert_eq!(t.rate(0, 1, 3), None);
        assert_eq!(t.antennas_for(0, 3, &sc).len(), 2);
        assert!(t.visible_satellites(2).is_empty());
    }

    #[test]
    fn rows_need_not_be_sorted() {
        let sc = scenario(&[(97.4, 0.0), (97.4, 90.0)], &[(0.0, 0.0), (10.0, 10.0)], 10);
        let csv = "slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min\n\
                   5,sat-1,gs-1,20,100\n5,sat-0,gs-1,20,200\n1,sat-1,gs-0,20,300\n5,sat-0,gs-0,20,400\n";
        let t = ContactTable::read_csv(csv.as_bytes(), &sc).unwrap();
        let order: Vec<_> = t.contacts(5).iter().map(|c| (c.satellite, c.station)).collect();
        assert_eq!(order, vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(t.visible_satellites(5), vec![0, 1]);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn malformed_rows_report_line() {
        let sc = scenario(&[(97.4, 0.0)], &[(0.0, 0.0)], 10);
        let head = "slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min\n";
        let cases = [
            ("1,sat-0,gs-0,45,abc\n", 2),
            ("1,sat-0,gs-0,45,100\nx,sat-0,gs-0,45,100\n", 3),
            ("1,sat-0,gs-0,5,100\n", 2),
            ("1,sat-0,gs-0,45,-1\n", 2),
            ("11,sat-0,gs-0,45,100\n", 2),
            ("1,sat-0,gs-0,45,100\n1,sat-0,gs-0,50,100\n", 3),
            ("1,sat-0,gs-0\n", 2),
        ];
        for (body, line) in cases {
            let err = ContactTable::read_csv(format!("{head}{body}").as_bytes(), &sc).unwrap_err();
            match err {
                ContactPlanError::Parse { line: l, .. } => assert_eq!(l, line, "{body}"),
                other => panic!("unexpected {other}"),
            }
        }
        let err = ContactTable::read_csv("bad,header\n".as_bytes(), &sc).unwrap_err();
        assert!(matches!(err, ContactPlanError::Parse { line: 1, .. }));
    }

    #[test]
    fn unknown_ids() {
        let sc = scenario(&[(97.4, 0.0)], &[(0.0, 0.0)], 10);
        let csv = "slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min\n1,sat-9,gs-0,45,1\n";
        assert!(matches!(
            ContactTable::read_csv(csv.as_bytes(), &sc),
            Err(ContactPlanError::UnknownId {
                kind: "satellite",
                line: 2,
                ..
            })
        ));
        let csv = "slot,satellite_id,ground_station_id,elevation_deg,rate_mb_per_min\n1,sat-0,gs-9,45,1\n";
        assert!(matches!(
            ContactTable::read_csv(csv.as_bytes(), &sc),
            Err(ContactPlanError::UnknownId {
                kind: "ground station",
                ..
            })
        ));
    }

    /// An equatorial orbit at 475 km reaches at most ~21.5° of central angle
    /// from the equator, so a station at 80° latitude never sees it.
    #[test]
    fn equatorial_orbit_never_seen_from_high_latitude() {
        let sc = scenario(&[(0.0, 0.0)], &[(80.0, 0.0), (0.0, 0.0)], 1440);
        let t = ContactTable::propagate(&sc);
        assert!(t.iter().all(|c| c.station != 0));
        // Oracle: the closest approach is the latitude difference.
        let st = GeoPoint {
            lat_deg: 80.0,
            lon_deg: 0.0,
        };
        let best = (0..1440)
            .map(|i| elevation_deg(propagate(&sc.satellites[0], i, 1.0), 475.0, st))
            .fold(f64::MIN, f64::max);
        assert!(best < 0.0);
        // The equatorial station does see it.
        assert!(t.iter().any(|c| c.station == 1));
    }

    #[test]
    fn propagated_rates_bounded_and_positive() {
        let sc = scenario(
            &[(97.4, 0.0), (97.4, 120.0), (53.0, 40.0)],
            &[(78.0, 15.0), (-33.0, 18.0), (40.0, -100.0)],
            1440,
        );
        let t = ContactTable::propagate(&sc);
        assert!(!t.is_empty());
        for c in t.iter() {
            assert!(c.elevation_deg >= sc.sim.elevation_mask_deg);
            assert!(c.rate > 0.0 && c.rate <= sc.sim.r_max * sc.sim.noise.1);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let sc = scenario(&[(97.4, 0.0), (97.4, 120.0)], &[(78.0, 15.0), (-33.0, 18.0)], 600);
        let t = ContactTable::propagate(&sc);
        let bytes = t.to_csv_bytes(&sc);
        let back = ContactTable::read_csv(bytes.as_slice(), &sc).unwrap();
        assert_eq!(t, back);
        assert_eq!(bytes, back.to_csv_bytes(&sc));
    }
}
