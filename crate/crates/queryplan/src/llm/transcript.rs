//! Line-delimited JSON transcripts: every exchange appended while recording,
//! replayed by fingerprint for deterministic offline runs. A replay miss is
//! an error — there is no silent live fallback.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::LlmError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub run_id: String,
    pub seq: u64,
    pub fingerprint: String,
    pub system: String,
    pub user: String,
    pub response: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

/// Serialized appender; exchanges from concurrent runs interleave whole-line.
pub struct TranscriptWriter {
    inner: Mutex<BufWriter<File>>,
}

impl TranscriptWriter {
    pub fn create(path: &Path) -> Result<Self, LlmError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| LlmError::Transcript(format!("open {}: {e}", path.display())))?;
        Ok(TranscriptWriter {
            inner: Mutex::new(BufWriter::new(file)),
        })
    }

    pub fn append(&self, entry: &TranscriptEntry) -> Result<(), LlmError> {
        let line = serde_json::to_string(entry)
            .map_err(|e| LlmError::Transcript(format!("serialize entry: {e}")))?;
        let mut writer = self.inner.lock().expect("transcript writer poisoned");
        writer
            .write_all(line.as_bytes())
            .and_then(|_| writer.write_all(b"\n"))
            .and_then(|_| writer.flush())
            .map_err(|e| LlmError::Transcript(format!("append entry: {e}")))
    }
}

/// Replay index: entries grouped by fingerprint, served in recorded order.
/// Re-queries beyond the recorded count repeat the last entry, so cached or
/// repeated prompts stay deterministic.
pub struct TranscriptIndex {
    by_fingerprint: HashMap<String, (Vec<TranscriptEntry>, usize)>,
}

impl TranscriptIndex {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let file = File::open(path)
            .map_err(|e| LlmError::Transcript(format!("open {}: {e}", path.display())))?;
        let mut by_fingerprint: HashMap<String, (Vec<TranscriptEntry>, usize)> = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line =
                line.map_err(|e| LlmError::Transcript(format!("read line {}: {e}", i + 1)))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: TranscriptEntry = serde_json::from_str(&line)
                .map_err(|e| LlmError::Transcript(format!("parse line {}: {e}", i + 1)))?;
            by_fingerprint
                .entry(entry.fingerprint.clone())
                .or_default()
                .0
                .push(entry);
        }
        Ok(TranscriptIndex { by_fingerprint })
    }

    pub fn len(&self) -> usize {
        self.by_fingerprint.values().map(|(v, _)| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_fingerprint.is_empty()
    }

    pub fn lookup(&mut self, fingerprint: &str) -> Result<TranscriptEntry, LlmError> {
        match self.by_fingerprint.get_mut(fingerprint) {
            Some((entries, cursor)) => {
                let entry = entries[(*cursor).min(entries.len() - 1)].clone();
                *cursor += 1;
                Ok(entry)
            }
            None => Err(LlmError::ReplayMiss {
                fingerprint: fingerprint.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(fingerprint: &str, response: &str, seq: u64) -> TranscriptEntry {
        TranscriptEntry {
            run_id: "r".into(),
            seq,
            fingerprint: fingerprint.into(),
            system: "s".into(),
            user: "u".into(),
            response: response.into(),
            prompt_tokens: 10,
            completion_tokens: 5,
        }
    }

    #[test]
    fn write_then_load_round_trip() {
        let dir = std::env::temp_dir().join(format!("qp-transcript-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.jsonl");
        let _ = std::fs::remove_file(&path);
        {
            let writer = TranscriptWriter::create(&path).unwrap();
            writer.append(&entry("fp1", "first", 0)).unwrap();
            writer.append(&entry("fp1", "second", 1)).unwrap();
            writer.append(&entry("fp2", "other", 2)).unwrap();
        }
        let mut index = TranscriptIndex::load(&path).unwrap();
        assert_eq!(index.len(), 3);
        assert_eq!(index.lookup("fp1").unwrap().response, "first");
        assert_eq!(index.lookup("fp1").unwrap().response, "second");
        // Exhausted fingerprints repeat the last recorded answer.
        assert_eq!(index.lookup("fp1").unwrap().response, "second");
        assert_eq!(index.lookup("fp2").unwrap().response, "other");
        match index.lookup("fp9") {
            Err(LlmError::ReplayMiss { fingerprint }) => assert_eq!(fingerprint, "fp9"),
            other => panic!("expected replay miss, got {other:?}"),
        }
        std::fs::remove_file(&path).unwrap();
    }
}
