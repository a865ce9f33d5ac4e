use std::io::{Read, Write};
use std::path::PathBuf;

use super::{AudioError, ClipRecord};

pub const MANIFEST_HEADER: [&str; 5] = ["path", "dataset", "emotion", "speaker", "provenance"];

fn csv_err(e: csv::Error) -> AudioError {
    AudioError::BadManifest(e.to_string())
}

/// Writes records as `path,dataset,emotion,speaker,provenance` CSV.
pub fn write_manifest<W: Write>(out: W, records: &[ClipRecord]) -> Result<(), AudioError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MANIFEST_HEADER).map_err(csv_err)?;
    for r in records {
        let path = r.path.to_string_lossy();
        let dataset = r.dataset.to_string();
        let emotion = r.emotion.to_string();
        let provenance = r.provenance.to_string();
        w.write_record([
            path.as_ref(),
            &dataset,
            &emotion,
            r.speaker.as_deref().unwrap_or(""),
            &provenance,
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| AudioError::BadManifest(e.to_string()))
}

pub fn read_manifest<R: Read>(input: R) -> Result<Vec<ClipRecord>, AudioError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(AudioError::BadManifest(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let bad = |m: String| AudioError::BadManifest(m);
        out.push(ClipRecord {
            path: PathBuf::from(&row[0]),
            dataset: row[1].parse().map_err(bad)?,
            emotion: row[2].parse().map_err(bad)?,
            speaker: (!row[3].is_empty()).then(|| row[3].to_string()),
            provenance: row[4].parse().map_err(bad)?,
        });
    }
    Ok(out)
}
