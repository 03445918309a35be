//! Loading projects from disk: a Solidity file is translated in memory, a
//! directory is read as `.eb` files plus an optional translation report.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::eb::Project;
use crate::ebtext::{parse_project, EbTextError};
use crate::sol::{parse_contract, validate_contract, SolError, ValidationError};
use crate::translate::{translate, TranslateError, TranslationReport};

pub const REPORT_SUFFIX: &str = ".report.json";

#[derive(Debug, Clone)]
pub struct LoadedProject {
    pub project: Project,
    pub report: Option<TranslationReport>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}:{col}: error: {source}")]
    Sol { file: String, line: u32, col: u32, source: SolError },
    #[error("{file}:{line}:{col}: error: {source}")]
    Validation { file: String, line: u32, col: u32, source: ValidationError },
    #[error("{file}:{line}:{col}: error: {source}")]
    Translate { file: String, line: u32, col: u32, source: TranslateError },
    #[error(transparent)]
    EbText(#[from] EbTextError),
    #[error("{}: malformed translation report: {source}", path.display())]
    Report { path: PathBuf, source: serde_json::Error },
    #[error("{}: no .eb files", .0.display())]
    Empty(PathBuf),
    #[error("{}: expected a .sol file or a directory of .eb files", .0.display())]
    Unrecognized(PathBuf),
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Parses, validates and translates Solidity `text` from file `file`.
pub fn translate_source(file: &str, text: &str) -> Result<LoadedProject, LoadError> {
    let ast = parse_contract(text).map_err(|e| {
        let s = e.span();
        LoadError::Sol { file: file.to_string(), line: s.line, col: s.col, source: e }
    })?;
    let checked = validate_contract(ast).map_err(|e| {
        let s = e.span();
        LoadError::Validation { file: file.to_string(), line: s.line, col: s.col, source: e }
    })?;
    let (project, mut report) = translate(&checked).map_err(|e| {
        let s = e.span();
        LoadError::Translate { file: file.to_string(), line: s.line, col: s.col, source: e }
    })?;
    report.source = Some(file.to_string());
    Ok(LoadedProject { project, report: Some(report) })
}

/// Loads a `.sol` file or a directory of `.eb` files.
pub fn load(path: &Path) -> Result<LoadedProject, LoadError> {
    if path.is_dir() {
        return load_dir(path);
    }
    if path.extension().is_some_and(|e| e == "sol") {
        return translate_source(&file_name(path), &read(path)?);
    }
    Err(LoadError::Unrecognized(path.to_path_buf()))
}

fn load_dir(dir: &Path) -> Result<LoadedProject, LoadError> {
    let entries = fs::read_dir(dir).map_err(|source| LoadError::Io { path: dir.to_path_buf(), source })?;
    let mut paths = Vec::new();
    for e in entries {
        let e = e.map_err(|source| LoadError::Io { path: dir.to_path_buf(), source })?;
        paths.push(e.path());
    }
    paths.sort();
    let mut files = Vec::new();
    let mut report = None;
    for p in &paths {
        let name = file_name(p);
        if name.ends_with(".eb") {
            files.push((name, read(p)?));
        } else if name.ends_with(REPORT_SUFFIX) && report.is_none() {
            let r: TranslationReport =
                serde_json::from_str(&read(p)?).map_err(|source| LoadError::Report { path: p.clone(), source })?;
            report = Some(r);
        }
    }
    if files.is_empty() {
        return Err(LoadError::Empty(dir.to_path_buf()));
    }
    let name = report.as_ref().map_or_else(|| file_name(dir), |r: &TranslationReport| r.contract.clone());
    let project = parse_project(&name, &files)?;
    Ok(LoadedProject { project, report })
}
