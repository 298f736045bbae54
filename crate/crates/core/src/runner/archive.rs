//! Line-delimited JSON run archive: one header line, then records and
//! snapshots in the order the run produced them.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::Config;
use crate::evolution::{AttemptRecord, GenerationSnapshot, Population, RunArchive, RunObserver};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("cannot access archive `{path}`: {message}")]
    Io { path: PathBuf, message: String },
    #[error("corrupt archive `{path}`: {message}")]
    CorruptArchive { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveHeader {
    pub run_id: String,
    pub format_version: u32,
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(ArchiveHeader),
    Record(AttemptRecord),
    Snapshot(GenerationSnapshot),
}

/// Header plus archive contents, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredArchive {
    pub header: ArchiveHeader,
    pub archive: RunArchive,
}

/// Stable identifier derived from the configuration alone.
pub fn run_id(config: &Config) -> String {
    let canonical = serde_json::to_string(config).expect("configs serialize");
    // FNV-1a, stable across toolchains
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in canonical.bytes() {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!(
        "{}-{}-s{}-{:016x}",
        config.problem_name(),
        serde_json::to_value(config.run.management).expect("enum serializes").as_str().unwrap_or("run"),
        config.run.seed,
        hash
    )
}

impl StoredArchive {
    pub fn new(config: Config) -> Self {
        Self {
            header: ArchiveHeader {
                run_id: run_id(&config),
                format_version: FORMAT_VERSION,
                config,
            },
            archive: RunArchive::default(),
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &Line| {
            out.push_str(&serde_json::to_string(line).expect("archive lines serialize"));
            out.push('\n');
        };
        push(&Line::Header(self.header.clone()));
        // records and snapshots interleave by generation
        let mut records = self.archive.records.iter().peekable();
        for snap in &self.archive.snapshots {
            while let Some(r) = records.next_if(|r| r.generation <= snap.generation) {
                push(&Line::Record(r.clone()));
            }
            push(&Line::Snapshot(snap.clone()));
        }
        for r in records {
            push(&Line::Record(r.clone()));
        }
        out
    }

    pub fn write_atomic(&self, path: &Path) -> Result<(), ArchiveError> {
        write_atomic(path, self.to_jsonl().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self, ArchiveError> {
        let file = std::fs::File::open(path).map_err(|e| ArchiveError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(BufReader::new(file), path)
    }

    pub fn parse(reader: impl BufRead, path: &Path) -> Result<Self, ArchiveError> {
        let corrupt = |message: String| ArchiveError::CorruptArchive {
            path: path.to_path_buf(),
            message,
        };
        let mut header = None;
        let mut archive = RunArchive::default();
        for (k, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| corrupt(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|e| corrupt(format!("line {}: {e}", k + 1)))?;
            match (parsed, header.is_some()) {
                (Line::Header(h), false) => header = Some(h),
                (Line::Header(_), true) => return Err(corrupt(format!("line {}: second header", k + 1))),
                (_, false) => return Err(corrupt("first line is not a header".into())),
                (Line::Record(r), true) => {
                    if archive.records.last().is_some_and(|p| p.id >= r.id) {
                        return Err(corrupt(format!("line {}: record ids not increasing", k + 1)));
                    }
                    check_record(&r).map_err(|m| corrupt(format!("line {}: {m}", k + 1)))?;
                    archive.records.push(r);
                }
                (Line::Snapshot(s), true) => {
                    if s.member_ids.len() != s.dd_scores.len() {
                        return Err(corrupt(format!("line {}: snapshot ids and scores differ in length", k + 1)));
                    }
                    archive.snapshots.push(s);
                }
            }
        }
        let header = header.ok_or_else(|| corrupt("empty archive".into()))?;
        if header.format_version != FORMAT_VERSION {
            return Err(corrupt(format!("unsupported format version {}", header.format_version)));
        }
        Ok(Self { header, archive })
    }

    pub fn record(&self, id: u64) -> Option<&AttemptRecord> {
        self.archive
            .records
            .binary_search_by_key(&id, |r| r.id)
            .ok()
            .map(|i| &self.archive.records[i])
    }
}

/// Writes to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ArchiveError> {
    let io = |e: std::io::Error| ArchiveError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Admitted with finite objectives, or failed with a category.
fn check_record(r: &AttemptRecord) -> Result<(), String> {
    match (r.admitted, &r.objectives, r.failure_category) {
        (true, Some(o), None) if !o.is_empty() && o.iter().all(|v| v.is_finite()) => Ok(()),
        (true, _, _) => Err(format!("admitted record {} lacks finite objectives", r.id)),
        (false, _, Some(_)) => Ok(()),
        (false, _, None) => Err(format!("failed record {} has no category", r.id)),
    }
}

/// Rewrites the archive file after every generation and prints progress.
pub struct ArchiveWriter<'a> {
    pub stored: StoredArchive,
    path: PathBuf,
    progress: Option<&'a mut dyn Write>,
}

impl<'a> ArchiveWriter<'a> {
    pub fn new(config: Config, path: PathBuf, progress: Option<&'a mut dyn Write>) -> Self {
        Self {
            stored: StoredArchive::new(config),
            path,
            progress,
        }
    }

    pub fn flush(&self) -> Result<(), String> {
        self.stored.write_atomic(&self.path).map_err(|e| e.to_string())
    }
}

impl RunObserver for ArchiveWriter<'_> {
    fn on_record(&mut self, record: &AttemptRecord) -> Result<(), String> {
        self.stored.archive.records.push(record.clone());
        Ok(())
    }

    fn on_generation(&mut self, snapshot: &GenerationSnapshot, population: &Population) -> Result<(), String> {
        self.stored.archive.snapshots.push(snapshot.clone());
        self.flush()?;
        if let Some(out) = self.progress.as_mut() {
            let admitted = self
                .stored
                .archive
                .records
                .iter()
                .filter(|r| r.generation == snapshot.generation && r.admitted)
                .count();
            let progress = super::metrics::live_progress(&self.stored.archive, population);
            writeln!(
                out,
                "generation {:>3}  admitted {:>3}  front {:>3}  archive_hv {:.6}",
                snapshot.generation, admitted, progress.front_size, progress.archive_hv
            )
            .map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_header_is_corrupt() {
        let text = "{\"kind\":\"snapshot\",\"generation\":0,\"member_ids\":[],\"dd_scores\":[]}\n";
        let err = StoredArchive::parse(text.as_bytes(), Path::new("a.jsonl")).unwrap_err();
        assert!(matches!(err, ArchiveError::CorruptArchive { .. }));
        let err = StoredArchive::parse("".as_bytes(), Path::new("a.jsonl")).unwrap_err();
        assert!(err.to_string().contains("empty archive"));
    }
}
