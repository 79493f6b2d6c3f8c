use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use expresso::{parse_drawing, DrawingF64};
use rayon::prelude::*;

/// Unreadable or malformed input; the process exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

pub fn read_drawing(path: &Path) -> Result<DrawingF64> {
    let text = read_text(path)?;
    parse_drawing(&text).map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

/// `.drw` files directly inside `dir`, sorted by path.
fn drawing_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| InputError(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .with_context(|| format!("listing {}", dir.display()))?
            .path();
        if path.is_file() && path.extension().is_some_and(|e| e == "drw") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads every drawing named by `paths` (files, or directories of `.drw`
/// files) in parallel. The result is sorted by drawing id; ids must be
/// unique.
pub fn load_drawings(paths: &[PathBuf]) -> Result<Vec<DrawingF64>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            files.extend(drawing_files(p)?);
        } else {
            files.push(p.clone());
        }
    }
    let mut drawings = files
        .par_iter()
        .map(|f| read_drawing(f))
        .collect::<Result<Vec<_>>>()?;
    drawings.sort_by(|a, b| a.id().cmp(b.id()));
    let mut seen = BTreeSet::new();
    for d in &drawings {
        if !seen.insert(d.id()) {
            return Err(
                InputError(format!("drawing id '{}' occurs more than once", d.id())).into(),
            );
        }
    }
    Ok(drawings)
}

pub fn load_set(dir: &Path, min: usize) -> Result<Vec<DrawingF64>> {
    let drawings = load_drawings(&[dir.to_path_buf()])?;
    if drawings.len() < min {
        bail!(
            "{} holds {} drawing(s), need at least {min}",
            dir.display(),
            drawings.len()
        );
    }
    Ok(drawings)
}
