//! Fundamental-solution evaluators with an on-disk table cache.
//!
//! Only the Fourier route has tables worth keeping. They are stored as CSV in
//! the directory named by `LAYERPOT_CACHE_DIR`, under a file name derived
//! from a SHA-256 of the coefficient JSON and the Fourier parameters.

use anyhow::{Context, Result};
use layerpot::coefficients::{CoefficientSpec, Profile};
use layerpot::greens::{evaluator_for, FourierGreen, FourierParams, GreenFunction};
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const CACHE_ENV: &str = "LAYERPOT_CACHE_DIR";

struct Cached {
    fourier: FourierGreen,
    path: PathBuf,
    loaded: usize,
}

pub struct Evaluator {
    pub green: Arc<dyn GreenFunction>,
    cached: Option<Cached>,
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Hex digest identifying a coefficient document and evaluator parameters.
pub fn cache_key(spec: &CoefficientSpec, params: &FourierParams) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(spec)?);
    h.update(b"\n");
    h.update(serde_json::to_string(params)?);
    Ok(h.finalize()[..16].iter().map(|b| format!("{b:02x}")).collect())
}

impl Evaluator {
    pub fn build(
        spec: &CoefficientSpec,
        params: &FourierParams,
        cache: Option<&Path>,
    ) -> Result<Self> {
        let field = spec.build()?;
        let uses_tables = !matches!(
            field.profile,
            Profile::Constant(_) | Profile::GraphMetric { .. }
        );
        let Some(dir) = cache.filter(|_| uses_tables) else {
            return Ok(Self {
                green: evaluator_for(&field, params)?,
                cached: None,
            });
        };
        let fourier = FourierGreen::new(field, params.clone())?;
        let path = dir.join(format!("fourier-{}.csv", cache_key(spec, params)?));
        let loaded = match File::open(&path) {
            Ok(f) => fourier
                .read_tables(&mut BufReader::new(f))
                .with_context(|| format!("reading cache file {}", path.display()))?,
            Err(_) => 0,
        };
        Ok(Self {
            green: Arc::new(fourier.clone()),
            cached: Some(Cached {
                fourier,
                path,
                loaded,
            }),
        })
    }

    /// Octaves read from the cache when the evaluator was built.
    pub fn loaded(&self) -> usize {
        self.cached.as_ref().map_or(0, |c| c.loaded)
    }

    /// Write the tables back when new octaves were built. Returns the file
    /// written, if any.
    pub fn persist(&self) -> Result<Option<PathBuf>> {
        let Some(c) = &self.cached else {
            return Ok(None);
        };
        if c.fourier.built_octaves() <= c.loaded {
            return Ok(None);
        }
        let dir = c.path.parent().expect("cache file has a directory");
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating cache directory {}", dir.display()))?;
        let tmp = c.path.with_extension("csv.tmp");
        {
            let mut out = BufWriter::new(
                File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?,
            );
            c.fourier.write_tables(&mut out)?;
            out.flush()?;
        }
        std::fs::rename(&tmp, &c.path)
            .with_context(|| format!("moving cache file into {}", c.path.display()))?;
        Ok(Some(c.path.clone()))
    }
}
