use std::io::{Read, Write};

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{SkillsError, Surface};
use crate::geometry::Point2;

/// One row of a shot trace. Lengths in inches, world coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub player_id: String,
    pub tournament_id: String,
    pub round: u8,
    pub hole: u8,
    pub shot_number: u32,
    pub surface: Surface,
    pub start_x: f64,
    pub start_y: f64,
    pub end_x: f64,
    pub end_y: f64,
    pub pin_x: f64,
    pub pin_y: f64,
    pub date: NaiveDate,
}

impl ShotRecord {
    pub fn start(&self) -> Point2 {
        Point2::new(self.start_x, self.start_y)
    }

    pub fn end(&self) -> Point2 {
        Point2::new(self.end_x, self.end_y)
    }

    pub fn pin(&self) -> Point2 {
        Point2::new(self.pin_x, self.pin_y)
    }
}

pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<ShotRecord>, SkillsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_records_csv<W: Write>(writer: W, records: &[ShotRecord]) -> Result<(), SkillsError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Records dated within `months` months up to and including `reference`.
pub fn filter_window(records: &[ShotRecord], reference: NaiveDate, months: u32) -> Vec<ShotRecord> {
    let start = reference
        .checked_sub_months(Months::new(months))
        .unwrap_or(NaiveDate::MIN);
    records
        .iter()
        .filter(|r| r.date > start && r.date <= reference)
        .cloned()
        .collect()
}
