//! Corpus directory scanning and filename label parsing.

use std::path::{Path, PathBuf};

use walkdir::WalkDir;

use super::{AudioError, ClipRecord, Corpus, Emotion, Provenance};

/// A `.wav` file that did not yield a record.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ScanReport {
    pub records: Vec<ClipRecord>,
    pub skipped: Vec<SkippedFile>,
}

fn stem(path: &Path) -> &str {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("")
}

fn unknown(path: &Path, code: &str) -> AudioError {
    AudioError::UnknownLabelCode { path: path.to_path_buf(), code: code.to_string() }
}

/// RAVDESS: `MM-VC-EE-II-SS-RR-AA.wav`, emotion is the third field.
fn parse_ravdess(path: &Path) -> Result<(Emotion, Option<String>), AudioError> {
    let fields: Vec<&str> = stem(path).split('-').collect();
    if fields.len() != 7 {
        return Err(unknown(path, stem(path)));
    }
    let emotion = match fields[2] {
        "01" => Emotion::Neutral,
        "02" => Emotion::Calm,
        "03" => Emotion::Happy,
        "04" => Emotion::Sad,
        "05" => Emotion::Angry,
        "06" => Emotion::Fear,
        "07" => Emotion::Disgust,
        "08" => Emotion::Surprise,
        code => return Err(unknown(path, code)),
    };
    Ok((emotion, Some(fields[6].to_string())))
}

/// CREMA-D: `SPEAKER_SENTENCE_EMO_LEVEL.wav`.
fn parse_cremad(path: &Path) -> Result<(Emotion, Option<String>), AudioError> {
    let tokens: Vec<&str> = stem(path).split('_').collect();
    if tokens.len() < 3 {
        return Err(unknown(path, stem(path)));
    }
    let emotion = match tokens[2] {
        "ANG" => Emotion::Angry,
        "DIS" => Emotion::Disgust,
        "FEA" => Emotion::Fear,
        "HAP" => Emotion::Happy,
        "NEU" => Emotion::Neutral,
        "SAD" => Emotion::Sad,
        code => return Err(unknown(path, code)),
    };
    Ok((emotion, Some(tokens[0].to_string())))
}

/// SAVEE: letter code plus take number, either `DC_sa01.wav` (flattened) or
/// `DC/sa01.wav` (speaker directory).
fn parse_savee(path: &Path) -> Result<(Emotion, Option<String>), AudioError> {
    let s = stem(path);
    let (speaker, code) = match s.split_once('_') {
        Some((spk, rest)) => (Some(spk.to_string()), rest),
        None => (
            path.parent()
                .and_then(|p| p.file_name())
                .and_then(|n| n.to_str())
                .map(str::to_string),
            s,
        ),
    };
    let letters = code.trim_end_matches(|c: char| c.is_ascii_digit());
    let emotion = match letters {
        "a" => Emotion::Angry,
        "d" => Emotion::Disgust,
        "f" => Emotion::Fear,
        "h" => Emotion::Happy,
        "n" => Emotion::Neutral,
        "sa" => Emotion::Sad,
        "su" => Emotion::Surprise,
        _ => return Err(unknown(path, letters)),
    };
    Ok((emotion, speaker))
}

/// TESS: `SPEAKER_word_emotion.wav`, with `ps` for pleasant surprise.
fn parse_tess(path: &Path) -> Result<(Emotion, Option<String>), AudioError> {
    let s = stem(path);
    let tokens: Vec<&str> = s.split('_').collect();
    if tokens.len() < 2 {
        return Err(unknown(path, s));
    }
    let suffix = tokens[tokens.len() - 1].to_ascii_lowercase();
    let emotion = match suffix.as_str() {
        "angry" => Emotion::Angry,
        "disgust" => Emotion::Disgust,
        "fear" => Emotion::Fear,
        "happy" => Emotion::Happy,
        "neutral" => Emotion::Neutral,
        "sad" => Emotion::Sad,
        "ps" | "surprise" | "surprised" => Emotion::Surprise,
        _ => return Err(unknown(path, &suffix)),
    };
    Ok((emotion, Some(tokens[0].to_ascii_uppercase())))
}

/// Maps a file name to its emotion (and speaker, when the convention carries one).
pub fn parse_label(dataset: Corpus, path: &Path) -> Result<(Emotion, Option<String>), AudioError> {
    match dataset {
        Corpus::Ravdess => parse_ravdess(path),
        Corpus::Cremad => parse_cremad(path),
        Corpus::Savee => parse_savee(path),
        Corpus::Tess => parse_tess(path),
    }
}

fn is_wav(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

/// Walks `root` and labels every `.wav` file, in lexicographic path order.
/// Files with unmapped codes are skipped with a warning.
pub fn scan_dataset(root: &Path, dataset: Corpus) -> Result<ScanReport, AudioError> {
    if !root.is_dir() {
        return Err(AudioError::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "dataset root is not a directory"),
        ));
    }
    let mut paths = Vec::new();
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = entry.map_err(|e| {
            let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
            AudioError::io(path, e.into())
        })?;
        if entry.file_type().is_file() && is_wav(entry.path()) {
            paths.push(entry.into_path());
        }
    }
    paths.sort();

    let mut report = ScanReport::default();
    for path in paths {
        match parse_label(dataset, &path) {
            Ok((emotion, speaker)) => report.records.push(ClipRecord {
                path,
                dataset,
                emotion,
                speaker,
                provenance: Provenance::Original,
            }),
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                report.skipped.push(SkippedFile { path, reason: e.to_string() });
            }
        }
    }
    if report.records.is_empty() {
        return Err(AudioError::EmptyScan(root.to_path_buf()));
    }
    Ok(report)
}
