//! Data directories: `taxonomies.json` (combined) or `taxonomies/*.json`,
//! plus one file per part under `parts/`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use asmsynth_core::catalog::{validate_part, Catalog, CatalogError, Diagnostic, Severity};
use asmsynth_core::{Part, TaxonomyContext};

use crate::formats::{self, FormatError};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{}: no taxonomies.json or taxonomies/ directory", .0.display())]
    NoTaxonomies(PathBuf),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

fn read(path: &Path) -> Result<String, DataError> {
    fs::read_to_string(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), DataError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| DataError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, contents).map_err(|source| DataError::Io { path: path.to_path_buf(), source })
}

/// `*.json` files of a directory in name order.
fn json_files(dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    let entries = fs::read_dir(dir).map_err(|source| DataError::Io { path: dir.to_path_buf(), source })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|source| DataError::Io { path: dir.to_path_buf(), source })?.path();
        if path.extension().is_some_and(|e| e == "json") && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// One finding of a catalog check, located by file.
#[derive(Debug)]
pub struct Finding {
    pub file: PathBuf,
    pub part_id: Option<String>,
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

#[derive(Clone, Debug)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn combined_taxonomies(&self) -> PathBuf {
        self.root.join("taxonomies.json")
    }

    fn taxonomy_dir(&self) -> PathBuf {
        self.root.join("taxonomies")
    }

    fn parts_dir(&self) -> PathBuf {
        self.root.join("parts")
    }

    fn taxonomy_files(&self) -> Result<Vec<PathBuf>, DataError> {
        let combined = self.combined_taxonomies();
        if combined.is_file() {
            return Ok(vec![combined]);
        }
        let dir = self.taxonomy_dir();
        if dir.is_dir() {
            return json_files(&dir);
        }
        Err(DataError::NoTaxonomies(self.root.clone()))
    }

    pub fn load_taxonomies(&self) -> Result<TaxonomyContext, DataError> {
        let files = self.taxonomy_files()?;
        let mut texts = Vec::new();
        for f in &files {
            texts.push(read(f)?);
        }
        // Per-file parsing first so an error names its file.
        for (f, t) in files.iter().zip(&texts) {
            formats::load_taxonomies([t.as_str()])
                .map_err(|source| DataError::Format { path: f.clone(), source })?;
        }
        formats::load_taxonomies(texts.iter().map(String::as_str))
            .map_err(|source| DataError::Format { path: self.root.clone(), source })
    }

    /// Parses every part file without cross-part checks.
    pub fn load_parts(&self) -> Result<Vec<(PathBuf, Part)>, DataError> {
        let dir = self.parts_dir();
        if !dir.is_dir() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for f in json_files(&dir)? {
            let part = formats::load_part(&read(&f)?).map_err(|source| DataError::Format { path: f.clone(), source })?;
            out.push((f, part));
        }
        Ok(out)
    }

    pub fn load_catalog(&self) -> Result<Catalog, DataError> {
        let ctx = self.load_taxonomies()?;
        let parts = self.load_parts()?;
        Ok(Catalog::new(ctx, parts.into_iter().map(|(_, p)| p))?)
    }

    /// Every problem with the directory's part files: schema errors,
    /// per-part diagnostics, duplicate part ids and shared uuids.
    pub fn check_catalog(&self, ctx: &TaxonomyContext) -> Result<Vec<Finding>, DataError> {
        let dir = self.parts_dir();
        let files = if dir.is_dir() { json_files(&dir)? } else { Vec::new() };
        let mut findings = Vec::new();
        let mut part_ids: BTreeMap<String, PathBuf> = BTreeMap::new();
        let mut uuids: BTreeMap<String, (PathBuf, String)> = BTreeMap::new();
        for f in files {
            let part = match formats::load_part(&read(&f)?) {
                Ok(p) => p,
                Err(e) => {
                    findings.push(Finding { file: f, part_id: None, severity: Severity::Error, message: e.to_string() });
                    continue;
                }
            };
            let diagnostic = |d: Diagnostic| Finding {
                file: f.clone(),
                part_id: Some(part.part_id.clone()),
                severity: d.severity,
                message: d.to_string(),
            };
            findings.extend(validate_part(ctx, &part).into_iter().map(diagnostic));
            if let Some(first) = part_ids.insert(part.part_id.clone(), f.clone()) {
                findings.push(Finding {
                    file: f.clone(),
                    part_id: Some(part.part_id.clone()),
                    severity: Severity::Error,
                    message: format!("error: duplicate part id, also in {}", first.display()),
                });
            }
            for jo in &part.joint_origins {
                match uuids.get(&jo.uuid) {
                    Some((file, owner)) if owner != &part.part_id => findings.push(Finding {
                        file: f.clone(),
                        part_id: Some(part.part_id.clone()),
                        severity: Severity::Error,
                        message: format!("error: uuid {} is also used by {owner} in {}", jo.uuid, file.display()),
                    }),
                    Some(_) => {}
                    None => {
                        uuids.insert(jo.uuid.clone(), (f.clone(), part.part_id.clone()));
                    }
                }
            }
        }
        Ok(findings)
    }

    /// Writes taxonomies in the layout the directory already uses; a fresh
    /// directory gets a combined file. Per-hierarchy files keep their names.
    pub fn save_taxonomies(&self, ctx: &TaxonomyContext) -> Result<(), DataError> {
        let dir = self.taxonomy_dir();
        if self.combined_taxonomies().is_file() || !dir.is_dir() {
            return write(&self.combined_taxonomies(), &formats::save_taxonomies(ctx));
        }
        let mut files = BTreeMap::new();
        for f in json_files(&dir)? {
            if let Ok(tax) = formats::load_taxonomy(&read(&f)?) {
                files.insert(tax.hierarchy(), f);
            }
        }
        for tax in ctx.taxonomies() {
            let path = files.get(&tax.hierarchy()).cloned().unwrap_or_else(|| dir.join(format!("{}.json", tax.hierarchy())));
            write(&path, &formats::save_taxonomy(tax))?;
        }
        Ok(())
    }

    /// Writes a part to the file it was loaded from, or `parts/<partId>.json`.
    pub fn save_part(&self, part: &Part) -> Result<(), DataError> {
        let existing = self.load_parts()?.into_iter().find(|(_, p)| p.part_id == part.part_id).map(|(f, _)| f);
        let path = existing.unwrap_or_else(|| self.parts_dir().join(format!("{}.json", part.part_id)));
        write(&path, &formats::save_part(part))
    }

    /// Writes a whole catalog as a fresh data directory.
    pub fn write_catalog(&self, catalog: &Catalog) -> Result<(), DataError> {
        write(&self.combined_taxonomies(), &formats::save_taxonomies(catalog.taxonomy()))?;
        for part in catalog.parts() {
            write(&self.parts_dir().join(format!("{}.json", part.part_id)), &formats::save_part(part))?;
        }
        Ok(())
    }
}
