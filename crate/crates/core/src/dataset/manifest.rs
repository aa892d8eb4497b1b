use std::path::{Path, PathBuf};

use super::{load_csv, planted, Dataset, LabelColumn, PlantedSpec};
use crate::error::{Error, Result};

/// One dataset listed in a benchmark manifest.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifestEntry {
    Csv {
        path: PathBuf,
        label: LabelColumn,
        has_header: bool,
    },
    Synthetic(PlantedSpec),
}

impl ManifestEntry {
    /// Display name used in reports before the dataset is loaded.
    pub fn name(&self) -> String {
        match self {
            ManifestEntry::Csv { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            ManifestEntry::Synthetic(spec) => format!(
                "planted_n{}_d{}_k{}_s{}",
                spec.objects, spec.features, spec.informative, spec.seed
            ),
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        match self {
            ManifestEntry::Csv {
                path,
                label,
                has_header,
            } => load_csv(path, label, *has_header),
            ManifestEntry::Synthetic(spec) => planted(spec).map(|(ds, _)| ds),
        }
    }
}

/// Parses a manifest: one dataset per line.
///
/// ```text
/// # comment
/// data/leukemia.csv,class
/// data/raw.csv,0,noheader
/// synthetic:60,1000,10,3
/// ```
///
/// Each CSV line is `path[,label column[,header|noheader]]`; the label
/// defaults to the last column and a header row is assumed. Relative paths
/// resolve against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(spec) = line.strip_prefix("synthetic:") {
            entries.push(ManifestEntry::Synthetic(spec.parse()?));
            continue;
        }
        let mut parts = line.splitn(3, ',').map(str::trim);
        let path = PathBuf::from(parts.next().unwrap_or_default());
        let label = parts
            .next()
            .map(|l| l.parse().expect("infallible"))
            .unwrap_or(LabelColumn::Last);
        let has_header = match parts.next() {
            None | Some("header") => true,
            Some("noheader") => false,
            Some(other) => {
                return Err(Error::Parse {
                    row: lineno + 1,
                    column: 3,
                    message: format!("expected header or noheader, found {other:?}"),
                })
            }
        };
        let path = if path.is_relative() {
            base_dir.join(path)
        } else {
            path
        };
        entries.push(ManifestEntry::Csv {
            path,
            label,
            has_header,
        });
    }
    Ok(entries)
}
