//! Non-intrusive log acquisition: periodic polling of a local (or staged)
//! log file with restart-safe checkpoints and rotation detection.

use std::fs::{File, Metadata};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::process::Command;

use thiserror::Error;

/// Persistent read position. Saved as human-inspectable `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Checkpoint {
    /// Device/inode based identity of the file last read, if known.
    pub identity: Option<u64>,
    /// Byte offset of the first undelivered byte.
    pub offset: u64,
    /// Number of complete lines delivered so far.
    pub line_no: u64,
    /// Timestamp string of the last delivered record, informational only.
    pub last_timestamp: Option<String>,
}

impl Checkpoint {
    /// Load a checkpoint file; a missing file yields the default (start of
    /// log) so first runs need no setup.
    pub fn load(path: &Path) -> io::Result<Checkpoint> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Ok(Checkpoint::default())
            }
            Err(e) => return Err(e),
        };
        let mut cp = Checkpoint::default();
        for line in text.lines() {
            let Some((key, value)) = line.split_once('=') else {
                continue;
            };
            match key.trim() {
                "identity" => cp.identity = value.trim().parse().ok(),
                "offset" => cp.offset = value.trim().parse().unwrap_or(0),
                "line_no" => cp.line_no = value.trim().parse().unwrap_or(0),
                "last_timestamp" => {
                    let v = value.trim();
                    if !v.is_empty() {
                        cp.last_timestamp = Some(v.to_string());
                    }
                }
                _ => {}
            }
        }
        Ok(cp)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let mut file = File::create(path)?;
        if let Some(id) = self.identity {
            writeln!(file, "identity={id}")?;
        }
        writeln!(file, "offset={}", self.offset)?;
        writeln!(file, "line_no={}", self.line_no)?;
        if let Some(ts) = &self.last_timestamp {
            writeln!(file, "last_timestamp={ts}")?;
        }
        Ok(())
    }
}

/// Complete lines appended since the checkpoint.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PollOutput {
    pub chunk: String,
    /// 1-based line number of the chunk's first line.
    pub first_line_no: u64,
    pub rotated: bool,
}

#[cfg(unix)]
fn file_identity(meta: &Metadata) -> u64 {
    use std::os::unix::fs::MetadataExt;
    meta.dev().wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ meta.ino()
}

#[cfg(not(unix))]
fn file_identity(_meta: &Metadata) -> u64 {
    0
}

/// Read bytes appended since `cp`, advancing the checkpoint. A partial
/// trailing line (no newline yet) is held back until a later poll completes
/// it. Rotation or truncation restarts from offset 0 and sets the flag.
pub fn poll(path: &Path, cp: &mut Checkpoint) -> io::Result<PollOutput> {
    let mut file = File::open(path)?;
    let meta = file.metadata()?;
    let identity = file_identity(&meta);

    let mut rotated = false;
    if matches!(cp.identity, Some(old) if old != identity) || meta.len() < cp.offset {
        cp.offset = 0;
        cp.line_no = 0;
        rotated = true;
    }
    cp.identity = Some(identity);

    file.seek(SeekFrom::Start(cp.offset))?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf)?;

    // Deliver only up to the last complete line.
    let complete = match buf.iter().rposition(|&b| b == b'\n') {
        Some(pos) => pos + 1,
        None => 0,
    };
    buf.truncate(complete);

    let chunk = String::from_utf8_lossy(&buf).into_owned();
    let first_line_no = cp.line_no + 1;
    cp.offset += complete as u64;
    cp.line_no += chunk.lines().count() as u64;

    Ok(PollOutput {
        chunk,
        first_line_no,
        rotated,
    })
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("failed to run fetch hook: {0}")]
    Spawn(#[from] io::Error),
    #[error("fetch hook exited with {status}: {stderr}")]
    Failed { status: i32, stderr: String },
    #[error("fetch hook printed no staged path")]
    NoStagedPath,
    #[error("fetch hook reported staged path {0} but it does not exist")]
    Missing(PathBuf),
}

/// Run the operator-supplied copy command (the remote transport stays
/// outside this tool). The hook must print the staged local path on stdout.
pub fn run_fetch_hook(command: &str) -> Result<PathBuf, FetchError> {
    let output = Command::new("sh").arg("-c").arg(command).output()?;
    if !output.status.success() {
        return Err(FetchError::Failed {
            status: output.status.code().unwrap_or(-1),
            stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
        });
    }
    let stdout = String::from_utf8_lossy(&output.stdout);
    let path = stdout
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or(FetchError::NoStagedPath)?;
    let path = PathBuf::from(path);
    if !path.exists() {
        return Err(FetchError::Missing(path));
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn append(path: &Path, text: &str) {
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .unwrap();
        f.write_all(text.as_bytes()).unwrap();
    }

    #[test]
    fn poll_delivers_appended_lines() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("dev.log");
        append(&log, "a\nb\n");
        let mut cp = Checkpoint::default();
        let out = poll(&log, &mut cp).unwrap();
        assert_eq!(out.chunk, "a\nb\n");
        assert_eq!(out.first_line_no, 1);
        assert!(!out.rotated);

        append(&log, "c\nd\ne\n");
        let out = poll(&log, &mut cp).unwrap();
        assert_eq!(out.chunk, "c\nd\ne\n");
        assert_eq!(out.first_line_no, 3);
    }

    #[test]
    fn poll_unchanged_file_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("dev.log");
        append(&log, "a\n");
        let mut cp = Checkpoint::default();
        poll(&log, &mut cp).unwrap();
        let before = cp.clone();
        let out = poll(&log, &mut cp).unwrap();
        assert!(out.chunk.is_empty());
        assert_eq!(cp, before);
    }

    #[test]
    fn poll_detects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("dev.log");
        append(&log, "a\nb\n");
        let mut cp = Checkpoint::default();
        poll(&log, &mut cp).unwrap();

        fs::write(&log, "").unwrap();
        let out = poll(&log, &mut cp).unwrap();
        assert!(out.rotated);
        assert!(out.chunk.is_empty());
        assert_eq!(cp.offset, 0);
    }

    #[test]
    fn poll_detects_replacement() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("dev.log");
        append(&log, "old old old old\n");
        let mut cp = Checkpoint::default();
        poll(&log, &mut cp).unwrap();

        fs::remove_file(&log).unwrap();
        append(&log, "fresh\n");
        let out = poll(&log, &mut cp).unwrap();
        assert!(out.rotated);
        assert_eq!(out.chunk, "fresh\n");
        assert_eq!(out.first_line_no, 1);
    }

    #[test]
    fn partial_line_held_back_until_complete() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("dev.log");
        append(&log, "complete\npart");
        let mut cp = Checkpoint::default();
        let out = poll(&log, &mut cp).unwrap();
        assert_eq!(out.chunk, "complete\n");

        append(&log, "ial\n");
        let out = poll(&log, &mut cp).unwrap();
        assert_eq!(out.chunk, "partial\n");
        assert_eq!(out.first_line_no, 2);
    }

    #[test]
    fn checkpoint_survives_restart_without_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("dev.log");
        let cp_path = dir.path().join("cp");
        let mut delivered = String::new();

        append(&log, "1\n2\n");
        {
            let mut cp = Checkpoint::load(&cp_path).unwrap();
            delivered.push_str(&poll(&log, &mut cp).unwrap().chunk);
            cp.save(&cp_path).unwrap();
        }
        append(&log, "3\n");
        {
            // simulated process restart: reload from disk
            let mut cp = Checkpoint::load(&cp_path).unwrap();
            delivered.push_str(&poll(&log, &mut cp).unwrap().chunk);
            cp.save(&cp_path).unwrap();
        }
        append(&log, "4\n5\n");
        {
            let mut cp = Checkpoint::load(&cp_path).unwrap();
            delivered.push_str(&poll(&log, &mut cp).unwrap().chunk);
            cp.save(&cp_path).unwrap();
        }
        assert_eq!(delivered, "1\n2\n3\n4\n5\n");
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp");
        let cp = Checkpoint {
            identity: Some(42),
            offset: 1234,
            line_no: 56,
            last_timestamp: Some("10:15:02".to_string()),
        };
        cp.save(&path).unwrap();
        assert_eq!(Checkpoint::load(&path).unwrap(), cp);
    }

    #[test]
    fn missing_checkpoint_is_default() {
        let dir = tempfile::tempdir().unwrap();
        let cp = Checkpoint::load(&dir.path().join("absent")).unwrap();
        assert_eq!(cp, Checkpoint::default());
    }

    #[test]
    fn fetch_hook_stages_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let fixture = dir.path().join("fixture.log");
        let staged = dir.path().join("staged.log");
        fs::write(&fixture, "hello\n").unwrap();
        let cmd = format!(
            "cp {} {} && echo {}",
            fixture.display(),
            staged.display(),
            staged.display()
        );
        let path = run_fetch_hook(&cmd).unwrap();
        assert_eq!(path, staged);
        assert!(path.exists());
    }

    #[test]
    fn failing_fetch_hook_is_a_diagnostic() {
        let err = run_fetch_hook("exit 3").unwrap_err();
        match err {
            FetchError::Failed { status, .. } => assert_eq!(status, 3),
            other => panic!("expected Failed, got {other:?}"),
        }
    }

    #[test]
    fn silent_fetch_hook_is_an_error() {
        let err = run_fetch_hook("true").unwrap_err();
        assert!(matches!(err, FetchError::NoStagedPath));
    }
}
