//! On-disk cache of Nahm sum expansions, keyed by a SHA-256 of the
//! quadruple, constraint and order.

use std::fs;
use std::path::{Path, PathBuf};

use nahm_core::qseries::SeriesRecord;
use nahm_core::{nahm_sum, LatticeConstraint, NahmQuadruple, QSeries, Rational, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "NAHM_CACHE_DIR";

#[derive(Serialize)]
struct Key<'a> {
    quadruple: &'a NahmQuadruple,
    constraint: Option<&'a LatticeConstraint>,
    order: String,
}

pub fn key(quad: &NahmQuadruple, constraint: Option<&LatticeConstraint>, order: &Rational) -> String {
    let k = Key { quadruple: quad, constraint, order: order.to_string() };
    let bytes = serde_json::to_vec(&k).expect("key serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Cache location: explicit flag, then `NAHM_CACHE_DIR`, then the user
/// cache directory.
pub fn resolve_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(ENV_VAR).map(PathBuf::from)).or_else(|| {
        std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
            .map(|d| d.join("nahm"))
    })
}

fn load(path: &Path) -> Option<QSeries> {
    let text = fs::read_to_string(path).ok()?;
    let rec: SeriesRecord = serde_json::from_str(&text).ok()?;
    QSeries::from_record(&rec).ok()
}

/// `nahm_sum`, served from `dir` when a matching entry exists. Unreadable
/// entries are recomputed; write failures are ignored.
pub fn nahm_sum_cached(
    dir: Option<&Path>,
    quad: &NahmQuadruple,
    constraint: Option<&LatticeConstraint>,
    order: &Rational,
) -> Result<QSeries> {
    let Some(dir) = dir else {
        return nahm_sum(quad, order, constraint);
    };
    let path = dir.join(format!("{}.json", key(quad, constraint, order)));
    if let Some(s) = load(&path) {
        return Ok(s);
    }
    let s = nahm_sum(quad, order, constraint)?;
    if fs::create_dir_all(dir).is_ok() {
        let tmp = path.with_extension("tmp");
        let body = serde_json::to_string(&s.to_record()).expect("record serializes");
        if fs::write(&tmp, body).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
    Ok(s)
}
