//! Single-document JSON persistence.
//!
//! The whole store lives in one file. Saves write a sibling temporary file,
//! fsync it and rename it over the target while holding an exclusive lock on
//! `<file>.lock`, so readers only ever see complete documents.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::auction::{validate_bid, Instance, InstanceDoc};
use crate::error::{Error, Result};
use crate::forward::{build_model, validate_solution, SolveResult};
use crate::rules::{HotelProfile, OfferRecord};

pub const SCHEMA_VERSION: u32 = 1;

/// A stored forward auction: the auction with its bids, and the last result
/// of clearing it.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionEntry {
    pub instance: Instance,
    pub latest_result: Option<SolveResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoreRoot {
    pub currency: String,
    pub forward_auctions: BTreeMap<u64, AuctionEntry>,
    pub reverse_history: Vec<OfferRecord>,
    pub hotel_profiles: BTreeMap<String, HotelProfile>,
}

impl Default for StoreRoot {
    fn default() -> Self {
        StoreRoot {
            currency: "EUR".to_owned(),
            forward_auctions: BTreeMap::new(),
            reverse_history: Vec::new(),
            hotel_profiles: BTreeMap::new(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreDoc {
    schema_version: u32,
    currency: String,
    #[serde(default)]
    forward_auctions: BTreeMap<u64, AuctionEntryDoc>,
    #[serde(default)]
    reverse_history: Vec<OfferRecord>,
    #[serde(default)]
    hotel_profiles: BTreeMap<String, HotelProfile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuctionEntryDoc {
    instance: InstanceDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    latest_result: Option<SolveResult>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

impl StoreRoot {
    /// Every invariant violation, each prefixed with the path of the
    /// offending record.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (id, entry) in &self.forward_auctions {
            let at = format!("forward_auctions.{id}");
            if entry.instance.currency != self.currency {
                out.push(format!(
                    "{at}: currency {} differs from store currency {}",
                    entry.instance.currency, self.currency
                ));
            }
            let mut clean = true;
            for bid in &entry.instance.bids {
                let report = validate_bid(bid, &entry.instance.auction);
                if !report.is_clean() {
                    clean = false;
                    out.push(format!("{at}.bids: {report}"));
                }
            }
            if let (true, Some(result)) = (clean, &entry.latest_result) {
                let mode = result.solution.objective_mode;
                match build_model(&entry.instance.auction, &entry.instance.bids, mode) {
                    Ok(model) => {
                        for v in validate_solution(&model, &result.solution) {
                            out.push(format!("{at}.latest_result: {v}"));
                        }
                    }
                    Err(e) => out.push(format!("{at}: {e}")),
                }
            }
        }
        for (i, r) in self.reverse_history.iter().enumerate() {
            for v in r.violations() {
                out.push(format!("reverse_history[{i}]: {v}"));
            }
        }
        for (id, p) in &self.hotel_profiles {
            for v in p.violations() {
                out.push(format!("hotel_profiles.{id}: {v}"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::StoreValidation(v))
        }
    }

    /// Parses and validates a store document.
    pub fn from_json(text: &str) -> Result<Self> {
        let parse = |e: serde_json::Error| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        };
        let probe: VersionProbe = serde_json::from_str(text).map_err(parse)?;
        if probe.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaVersion(probe.schema_version));
        }
        let doc: StoreDoc = serde_json::from_str(text).map_err(parse)?;
        let mut forward_auctions = BTreeMap::new();
        for (id, entry) in doc.forward_auctions {
            let instance = Instance::from_doc(entry.instance).map_err(|e| match e {
                Error::Parse { location, message } => Error::Parse {
                    location: format!("forward_auctions.{id}.instance.{location}"),
                    message,
                },
                other => Error::Parse {
                    location: format!("forward_auctions.{id}.instance"),
                    message: other.to_string(),
                },
            })?;
            forward_auctions.insert(
                id,
                AuctionEntry {
                    instance,
                    latest_result: entry.latest_result,
                },
            );
        }
        let root = StoreRoot {
            currency: doc.currency,
            forward_auctions,
            reverse_history: doc.reverse_history,
            hotel_profiles: doc.hotel_profiles,
        };
        root.validate()?;
        Ok(root)
    }

    pub fn to_json(&self) -> String {
        let doc = StoreDoc {
            schema_version: SCHEMA_VERSION,
            currency: self.currency.clone(),
            forward_auctions: self
                .forward_auctions
                .iter()
                .map(|(id, e)| {
                    (
                        *id,
                        AuctionEntryDoc {
                            instance: e.instance.to_doc(),
                            latest_result: e.latest_result.clone(),
                        },
                    )
                })
                .collect(),
            reverse_history: self.reverse_history.clone(),
            hotel_profiles: self.hotel_profiles.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("store documents always serialize")
    }
}

pub fn load(path: &Path) -> Result<StoreRoot> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    StoreRoot::from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

/// Validates `root` and atomically replaces the file at `path` with it.
///
/// On any error the previous file is left untouched.
pub fn save(root: &StoreRoot, path: &Path) -> Result<()> {
    root.validate()?;
    let _lock = lock(path)?;
    let tmp = write_temp(root, path)?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    sync_parent(path);
    Ok(())
}

/// Holds an exclusive advisory lock until dropped.
fn lock(path: &Path) -> Result<File> {
    let lock_path = lock_path(path);
    let file = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock_path)
        .map_err(|e| Error::io(&lock_path, e))?;
    file.lock().map_err(|e| Error::io(&lock_path, e))?;
    Ok(file)
}

fn lock_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".lock");
    path.with_file_name(name)
}

fn write_temp(root: &StoreRoot, path: &Path) -> Result<tempfile::NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".store-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| Error::io(dir, e))?;
    let io = |e| Error::io(tmp_path_hint(path), e);
    tmp.write_all(root.to_json().as_bytes()).map_err(io)?;
    tmp.write_all(b"\n").map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    Ok(tmp)
}

fn tmp_path_hint(path: &Path) -> PathBuf {
    path.with_extension("tmp")
}

fn sync_parent(path: &Path) {
    // Best effort: makes the rename durable on filesystems that need it.
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
}
