use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{OfferRecord, PriceRule};
use crate::error::{Error, Result};
use crate::money::Money;

const HEADER: [&str; 7] = [
    "period_visiting",
    "hotel_rating",
    "distance_to_sea",
    "beds_requested",
    "breakfast_type",
    "sites_within_10km",
    "accepted_price",
];

#[derive(Deserialize)]
struct Row {
    period_visiting: u8,
    hotel_rating: f64,
    distance_to_sea: f64,
    beds_requested: u8,
    breakfast_type: u8,
    sites_within_10km: u8,
    accepted_price: String,
}

pub fn read_dataset(path: &Path) -> Result<Vec<OfferRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_from(file, &path.display().to_string())
}

/// Reads tab-separated records with a header row naming the seven columns.
pub fn read_dataset_from(reader: impl Read, source: &str) -> Result<Vec<OfferRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(HEADER) {
        return Err(Error::Parse {
            location: format!("{source}:1"),
            message: format!("expected header {}", HEADER.join(" ")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| Error::Parse {
            location: format!(
                "{source}:{}",
                e.position().map_or(0, |p| p.line())
            ),
            message: e.to_string(),
        })?;
        let line = out.len() + 2;
        let at = |message: String| Error::Parse {
            location: format!("{source}:{line}"),
            message,
        };
        let price: Money = row
            .accepted_price
            .parse()
            .map_err(|e| at(format!("accepted_price: {e}")))?;
        let record = OfferRecord {
            period_visiting: row.period_visiting,
            hotel_rating: row.hotel_rating,
            distance_to_sea: row.distance_to_sea,
            beds_requested: row.beds_requested,
            breakfast_type: row.breakfast_type,
            sites_within_10km: row.sites_within_10km,
            accepted_price: price,
        };
        let problems = record.violations();
        if !problems.is_empty() {
            return Err(at(problems.join("; ")));
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_dataset(path: &Path, records: &[OfferRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset_to(file, records).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn write_dataset_to(mut out: impl Write, records: &[OfferRecord]) -> Result<()> {
    let io = |e| Error::io("<output>", e);
    writeln!(out, "{}", HEADER.join("\t")).map_err(io)?;
    for r in records {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.period_visiting,
            r.hotel_rating,
            r.distance_to_sea,
            r.beds_requested,
            r.breakfast_type,
            r.sites_within_10km,
            r.accepted_price
        )
        .map_err(io)?;
    }
    Ok(())
}

/// One rule per line in display form.
pub fn write_ruleset(mut out: impl Write, rules: &[PriceRule]) -> Result<()> {
    for r in rules {
        writeln!(out, "{r}").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}
