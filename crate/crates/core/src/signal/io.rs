//! On-disk formats: recording traces and dataset manifests.
//!
//! A trace is UTF-8 text: optional leading `#` comment lines, one header
//! line `time_s,mag_db,phase_rad`, then one row per sample. Values are
//! written with Rust's shortest round-trip float formatting, so
//! write-then-ingest reproduces a recording bit for bit.
//!
//! A dataset directory holds `manifest.txt` (key-value provenance lines and
//! a recording index) next to one trace file per recording.

use super::{
    generator_id, ActivityLabel, ActivityRecording, Dataset, Manifest, Sex, SignalError,
    SubjectSpec,
};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const TRACE_HEADER: &str = "time_s,mag_db,phase_rad";
pub const MANIFEST_FORMAT: &str = "creepwave-dataset v1";

/// Render a recording as trace-file text, prefixing the given `#` comments.
pub fn render_trace(recording: &ActivityRecording, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{TRACE_HEADER}");
    for (i, (mag, phase)) in recording
        .magnitude_db
        .iter()
        .zip(&recording.phase_rad)
        .enumerate()
    {
        let t = i as f64 / recording.sample_rate_hz;
        let _ = writeln!(out, "{t},{mag},{phase}");
    }
    out
}

pub fn write_trace(
    path: &Path,
    recording: &ActivityRecording,
    comments: &[String],
) -> Result<(), SignalError> {
    fs::write(path, render_trace(recording, comments))?;
    Ok(())
}

/// Parse a trace file, attaching the given label metadata.
pub fn ingest_trace(
    path: &Path,
    subject: SubjectSpec,
    activity: ActivityLabel,
    trial: u32,
) -> Result<ActivityRecording, SignalError> {
    let text = fs::read_to_string(path)?;
    let name = path.display().to_string();
    parse_trace(&text, &name, subject, activity, trial)
}

pub fn parse_trace(
    text: &str,
    path: &str,
    subject: SubjectSpec,
    activity: ActivityLabel,
    trial: u32,
) -> Result<ActivityRecording, SignalError> {
    let err = |line: usize, message: String| SignalError::Parse {
        path: path.to_string(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().starts_with('#') || l.trim().is_empty() => continue,
            Some((n, l)) => break (n, l),
            None => return Err(err(0, "empty trace file".into())),
        }
    };
    if header.1.trim() != TRACE_HEADER {
        return Err(err(
            header.0 + 1,
            format!("expected header {TRACE_HEADER:?}, found {:?}", header.1.trim()),
        ));
    }

    let mut times = Vec::new();
    let mut magnitude_db = Vec::new();
    let mut phase_rad = Vec::new();
    for (n, line) in lines {
        let line_no = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split(',');
        let mut field = |name: &str| {
            fields
                .next()
                .ok_or_else(|| err(line_no, format!("missing column {name}")))
                .and_then(|raw| {
                    raw.trim()
                        .parse::<f64>()
                        .map_err(|_| err(line_no, format!("non-numeric {name}: {raw:?}")))
                })
        };
        let t = field("time_s")?;
        let mag = field("mag_db")?;
        let phase = field("phase_rad")?;
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(err(
                    line_no,
                    format!("non-monotone timestamp {t} after {prev}"),
                ));
            }
        }
        times.push(t);
        magnitude_db.push(mag);
        phase_rad.push(phase);
    }
    if times.len() < 2 {
        return Err(err(0, format!("need at least 2 samples, found {}", times.len())));
    }

    // Rate from the full span; every gap must agree with it.
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    for (i, pair) in times.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if (gap - dt).abs() > 1e-6 * dt.max(1e-12) {
            return Err(err(
                // +2 header-relative: rows started after the header line.
                0,
                format!("non-uniform sample spacing near row {}: gap {gap}, expected {dt}", i + 2),
            ));
        }
    }
    let sample_rate_hz = 1.0 / dt;
    Ok(ActivityRecording {
        subject,
        activity,
        trial,
        sample_rate_hz,
        duration_s: n as f64 / sample_rate_hz,
        magnitude_db,
        phase_rad,
    })
}

fn trace_file_name(recording: &ActivityRecording) -> String {
    format!(
        "rec_{}_{}_t{:02}.csv",
        recording.subject.id,
        recording.activity.name(),
        recording.trial
    )
}

/// Write a dataset directory: manifest plus one trace file per recording.
pub fn write_dataset(
    dir: &Path,
    dataset: &Dataset,
    comments: &[String],
) -> Result<PathBuf, SignalError> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    for c in comments {
        let _ = writeln!(manifest, "# {c}");
    }
    let m = &dataset.manifest;
    let _ = writeln!(manifest, "format = {MANIFEST_FORMAT}");
    let _ = writeln!(manifest, "generator = {}", m.generator);
    if let Some(seed) = m.seed {
        let _ = writeln!(manifest, "seed = {seed}");
    }
    let _ = writeln!(manifest, "sample_rate_hz = {}", m.sample_rate_hz);
    let _ = writeln!(manifest, "duration_s = {}", m.duration_s);
    let _ = writeln!(manifest, "recordings = {}", dataset.recordings.len());
    let _ = writeln!(manifest, "[recordings]");
    for recording in &dataset.recordings {
        let file = trace_file_name(recording);
        write_trace(&dir.join(&file), recording, comments)?;
        let s = &recording.subject;
        let sex = match s.sex {
            Sex::Male => "male",
            Sex::Female => "female",
        };
        let _ = writeln!(
            manifest,
            "{},{},{},{},{},{},{},{},{}",
            s.id,
            s.height_cm,
            s.weight_kg,
            s.thigh_circumference_cm,
            s.age_years,
            sex,
            recording.activity.name(),
            recording.trial,
            file,
        );
    }
    let manifest_path = dir.join("manifest.txt");
    fs::write(&manifest_path, manifest)?;
    Ok(manifest_path)
}

/// Load a dataset directory written by [`write_dataset`].
pub fn read_dataset(dir: &Path) -> Result<Dataset, SignalError> {
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path)?;
    let name = manifest_path.display().to_string();
    let err = |line: usize, message: String| SignalError::Parse {
        path: name.clone(),
        line,
        message,
    };

    let mut seed = None;
    let mut generator = String::from("ingested");
    let mut sample_rate_hz = None;
    let mut duration_s = None;
    let mut recordings = Vec::new();
    let mut in_index = false;
    let mut format_seen = false;
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed == "[recordings]" {
            in_index = true;
            continue;
        }
        if !in_index {
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected key = value, found {trimmed:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "format" => {
                    if value != MANIFEST_FORMAT {
                        return Err(err(line_no, format!("unsupported format {value:?}")));
                    }
                    format_seen = true;
                }
                "generator" => generator = value.to_string(),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|_| {
                        err(line_no, format!("seed must be an integer, found {value:?}"))
                    })?)
                }
                "sample_rate_hz" => sample_rate_hz = value.parse::<f64>().ok(),
                "duration_s" => duration_s = value.parse::<f64>().ok(),
                "recordings" => {}
                _ => return Err(err(line_no, format!("unknown manifest key {key:?}"))),
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 9 {
            return Err(err(line_no, format!("expected 9 index fields, found {}", fields.len())));
        }
        let parse_f64 = |i: usize, what: &str| {
            fields[i]
                .parse::<f64>()
                .map_err(|_| err(line_no, format!("bad {what}: {:?}", fields[i])))
        };
        let sex = match fields[5] {
            "male" => Sex::Male,
            "female" => Sex::Female,
            other => return Err(err(line_no, format!("bad sex: {other:?}"))),
        };
        let subject = SubjectSpec::new(
            fields[0],
            parse_f64(1, "height")?,
            parse_f64(2, "weight")?,
            parse_f64(3, "circumference")?,
            fields[4]
                .parse::<u32>()
                .map_err(|_| err(line_no, format!("bad age: {:?}", fields[4])))?,
            sex,
        )?;
        let activity = ActivityLabel::parse(fields[6])?;
        let trial = fields[7]
            .parse::<u32>()
            .map_err(|_| err(line_no, format!("bad trial: {:?}", fields[7])))?;
        recordings.push(ingest_trace(&dir.join(fields[8]), subject, activity, trial)?);
    }
    if !format_seen {
        return Err(err(0, "missing format line".into()));
    }
    let first = recordings
        .first()
        .ok_or_else(|| err(0, "manifest lists no recordings".into()))?;
    Ok(Dataset {
        manifest: Manifest {
            seed,
            generator,
            sample_rate_hz: sample_rate_hz.unwrap_or(first.sample_rate_hz),
            duration_s: duration_s.unwrap_or(first.duration_s),
        },
        recordings,
    })
}

/// Manifest for a dataset assembled from ingested traces.
pub fn ingested_manifest(sample_rate_hz: f64, duration_s: f64) -> Manifest {
    Manifest {
        seed: None,
        generator: "ingested".to_string(),
        sample_rate_hz,
        duration_s,
    }
}

/// Standard provenance header lines for generated output files.
pub fn provenance_comments(seed: Option<u64>, flags: &str) -> Vec<String> {
    let mut out = vec![format!("generated by {}", generator_id())];
    if let Some(seed) = seed {
        out.push(format!("seed: {seed}"));
    }
    if !flags.is_empty() {
        out.push(format!("flags: {flags}"));
    }
    out
}
