//! On-disk corpus layout:
//!
//! ```text
//! <root>/manifest.json          { "<id>": { "text": "<path>", "category": "<Category>" } }
//! <root>/gold/<id>.tsv
//! <root>/hyp/<annotator>/<id>.tsv
//! ```
//!
//! Text paths in the manifest are relative to the corpus root.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{AnnotationSet, Category, Corpus, Document, GOLD};

use super::diagnostic::Parsed;
use super::standoff::{parse_standoff, parse_standoff_unbound, write_standoff};

pub const MANIFEST: &str = "manifest.json";
pub const GOLD_DIR: &str = "gold";
pub const HYP_DIR: &str = "hyp";
pub const EXTENSION: &str = "tsv";

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: invalid manifest: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> LayoutError + '_ {
    move |source| LayoutError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub text: String,
    pub category: Category,
}

pub type Manifest = BTreeMap<String, ManifestEntry>;

pub fn read_manifest(root: &Path) -> Result<Manifest, LayoutError> {
    let path = root.join(MANIFEST);
    let raw = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&raw).map_err(|source| LayoutError::Manifest { path, source })
}

pub fn load_corpus(root: &Path) -> Result<Parsed<Corpus>, LayoutError> {
    let manifest = read_manifest(root)?;
    let mut corpus = Corpus::default();
    let mut diagnostics = Vec::new();

    for (id, entry) in manifest {
        let path = root.join(&entry.text);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        corpus.add_document(Document {
            id,
            text,
            category: entry.category,
        });
    }

    for (id, path) in annotation_files(&root.join(GOLD_DIR))? {
        let set = read_set(&corpus, &id, GOLD, &path, &mut diagnostics)?;
        corpus.add_gold(set);
    }

    let hyp_root = root.join(HYP_DIR);
    if hyp_root.is_dir() {
        for annotator in sorted_entries(&hyp_root)? {
            if !annotator.is_dir() {
                continue;
            }
            let name = annotator
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            for (id, path) in annotation_files(&annotator)? {
                let set = read_set(&corpus, &id, &name, &path, &mut diagnostics)?;
                corpus.add_hypothesis(set);
            }
        }
    }

    Ok(Parsed {
        value: corpus,
        diagnostics,
    })
}

fn read_set(
    corpus: &Corpus,
    id: &str,
    source: &str,
    path: &Path,
    diagnostics: &mut Vec<super::diagnostic::Diagnostic>,
) -> Result<AnnotationSet, LayoutError> {
    let content = fs::read_to_string(path).map_err(io_err(path))?;
    let parsed = match corpus.documents.get(id) {
        Some(doc) => parse_standoff(id, source, &doc.text, &content),
        None => parse_standoff_unbound(id, source, &content),
    };
    diagnostics.extend(parsed.diagnostics);
    Ok(parsed.value)
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, LayoutError> {
    let mut entries = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(dir))?;
    entries.sort();
    Ok(entries)
}

/// `(doc id, path)` for every `*.tsv` file directly inside `dir`.
fn annotation_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, LayoutError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    Ok(sorted_entries(dir)?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == EXTENSION))
        .filter_map(|p| {
            let id = p.file_stem()?.to_string_lossy().into_owned();
            Some((id, p))
        })
        .collect())
}

pub fn hypothesis_dir(root: &Path, annotator: &str) -> PathBuf {
    root.join(HYP_DIR).join(annotator)
}

pub fn set_path(dir: &Path, doc_id: &str) -> PathBuf {
    dir.join(format!("{doc_id}.{EXTENSION}"))
}

/// Writes `set` in canonical standoff form to `<dir>/<doc id>.tsv`.
pub fn write_set(dir: &Path, set: &AnnotationSet) -> Result<(), LayoutError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = set_path(dir, &set.doc_id);
    fs::write(&path, write_standoff(set)).map_err(io_err(&path))
}

/// Writes a complete corpus: manifest, texts under `texts/`, gold and hypotheses.
pub fn write_corpus(root: &Path, corpus: &Corpus) -> Result<(), LayoutError> {
    let texts = root.join("texts");
    fs::create_dir_all(&texts).map_err(io_err(&texts))?;
    let mut manifest = Manifest::new();
    for (id, doc) in &corpus.documents {
        let rel = format!("texts/{id}.txt");
        let path = root.join(&rel);
        fs::write(&path, &doc.text).map_err(io_err(&path))?;
        manifest.insert(
            id.clone(),
            ManifestEntry {
                text: rel,
                category: doc.category,
            },
        );
    }
    let path = root.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))?;

    for set in corpus.gold.values() {
        write_set(&root.join(GOLD_DIR), set)?;
    }
    for (name, sets) in &corpus.hypotheses {
        for set in sets.values() {
            write_set(&hypothesis_dir(root, name), set)?;
        }
    }
    Ok(())
}

/// SHA-256 over the manifest, every referenced text and every annotation file,
/// visited in a fixed order. Hex encoded.
pub fn corpus_digest(root: &Path) -> Result<String, LayoutError> {
    let manifest = read_manifest(root)?;
    let mut files = vec![(MANIFEST.to_string(), root.join(MANIFEST))];
    for entry in manifest.values() {
        files.push((entry.text.clone(), root.join(&entry.text)));
    }
    for (id, path) in annotation_files(&root.join(GOLD_DIR))? {
        files.push((format!("{GOLD_DIR}/{id}"), path));
    }
    let hyp_root = root.join(HYP_DIR);
    if hyp_root.is_dir() {
        for dir in sorted_entries(&hyp_root)? {
            let name = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            for (id, path) in annotation_files(&dir)? {
                files.push((format!("{HYP_DIR}/{name}/{id}"), path));
            }
        }
    }

    let mut hasher = Sha256::new();
    for (label, path) in files {
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        hasher.update(label.as_bytes());
        hasher.update([0]);
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}
