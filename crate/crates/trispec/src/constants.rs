//! Per-triplet constants: limiting words and the stopping constant, with a JSON cache.

use crate::hyperbolic_core::Triplet;
use crate::tiling::{Tiling, TilingError};
use crate::words::{table_words, LimitingWords};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Environment variable overriding the cache directory.
pub const CONSTANTS_DIR_ENV: &str = "TRISPEC_CONSTANTS_DIR";

/// Builds the limiting words for `t`: the four boundary words by path-following,
/// the exceptional pair from closed forms.
pub fn build_limiting_words(tiling: &Tiling) -> Result<LimitingWords, TilingError> {
    let n = tiling.limiting_words_numeric(0)?;
    let tw = table_words(tiling.triplet());
    Ok(LimitingWords { u_l: n.u_l, u_r: n.u_r, v_l: n.v_l, v_r: n.v_r, w_l: tw.w_l, w_r: tw.w_r })
}

/// Everything cached for one triplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletConstants {
    pub triplet: Triplet,
    pub limiting_words: LimitingWords,
    pub c: Option<f64>,
    pub tool_version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ConstantsError {
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error(transparent)]
    Spectrum(#[from] crate::spectrum::SpectrumError),
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where cached constants live: `$TRISPEC_CONSTANTS_DIR`, else `./trispec-constants`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os(CONSTANTS_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("trispec-constants"))
}

fn cache_path(t: Triplet) -> PathBuf {
    cache_dir().join(format!("{}_{}_{}.json", t.p, t.q, t.r))
}

/// Computes the constants of `t` from scratch.
pub fn compute(tiling: &Tiling, with_c: bool) -> Result<TripletConstants, ConstantsError> {
    let lw = build_limiting_words(tiling)?;
    let c = if with_c { Some(crate::spectrum::stopping_constant(tiling, &lw)?.c) } else { None };
    Ok(TripletConstants {
        triplet: tiling.triplet(),
        limiting_words: lw,
        c,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Loads cached constants, computing and storing them on a miss or when `c` is
/// requested but absent. A cache that cannot be written is not an error.
pub fn load_or_compute(tiling: &Tiling, with_c: bool) -> Result<TripletConstants, ConstantsError> {
    let path = cache_path(tiling.triplet());
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(k) = serde_json::from_str::<TripletConstants>(&text) {
            if k.triplet == tiling.triplet() && (!with_c || k.c.is_some()) {
                return Ok(k);
            }
        }
    }
    let k = compute(tiling, with_c)?;
    let _ = store(&k);
    Ok(k)
}

pub fn store(k: &TripletConstants) -> Result<PathBuf, ConstantsError> {
    let path = cache_path(k.triplet);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, serde_json::to_string_pretty(k)?)?;
    Ok(path)
}
