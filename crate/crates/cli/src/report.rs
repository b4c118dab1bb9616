//! Occupancy reports: per-plate fill rates, full-plate counts and the
//! fill-band histogram (100, [75,100), [50,75), [25,50), [0,25) percent).

use std::fmt;

use serde::{Deserialize, Serialize};

use platepack_core::model::{PlateGeometry, Solution};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct FillBands {
    pub full: usize,
    pub high: usize,
    pub mid: usize,
    pub low: usize,
    pub minimal: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub plate_count: usize,
    /// Fill rates in percent, two decimals, sorted descending.
    pub occupancy_rates: Vec<f64>,
    pub full_plates: usize,
    /// Fill rate of the first plate that is not full, if any.
    pub first_non_full: Option<f64>,
    pub bands: FillBands,
    pub occupied_wells: u64,
}

/// Summarizes a solution. Fully empty plates are dropped first. Band
/// edges fall on exact well counts (a quarter of a plate), so banding
/// does not depend on rounding.
pub fn report(sol: &Solution, geom: &PlateGeometry) -> Report {
    let per_plate = geom.wells_per_plate();
    let quarter = per_plate / 4;
    let mut occupied: Vec<u32> = sol
        .plates
        .iter()
        .map(|p| p.occupied())
        .filter(|&o| o > 0)
        .collect();
    occupied.sort_unstable_by(|a, b| b.cmp(a));

    let mut bands = FillBands::default();
    for &o in &occupied {
        if o == per_plate {
            bands.full += 1;
        } else if o >= 3 * quarter {
            bands.high += 1;
        } else if o >= 2 * quarter {
            bands.mid += 1;
        } else if o >= quarter {
            bands.low += 1;
        } else {
            bands.minimal += 1;
        }
    }

    let rates: Vec<f64> = occupied
        .iter()
        .map(|&o| round2(o as f64 * 100.0 / per_plate as f64))
        .collect();
    Report {
        plate_count: occupied.len(),
        full_plates: bands.full,
        first_non_full: rates.iter().copied().find(|&r| r < 100.0),
        bands,
        occupied_wells: occupied.iter().map(|&o| o as u64).sum(),
        occupancy_rates: rates,
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plates: {}", self.plate_count)?;
        writeln!(f, "occupied wells: {}", self.occupied_wells)?;
        let rates: Vec<String> = self
            .occupancy_rates
            .iter()
            .map(|r| format!("{r:.2}"))
            .collect();
        writeln!(f, "occupancy: {}", rates.join("/"))?;
        writeln!(f, "full plates: {}", self.full_plates)?;
        match self.first_non_full {
            Some(r) => writeln!(f, "first non-full: {r:.2}")?,
            None => writeln!(f, "first non-full: -")?,
        }
        writeln!(
            f,
            "bands: 100%: {}  [75,100): {}  [50,75): {}  [25,50): {}  (0,25): {}",
            self.bands.full, self.bands.high, self.bands.mid, self.bands.low, self.bands.minimal
        )
    }
}
