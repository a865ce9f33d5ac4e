use std::path::Path;
use std::process::{Command, Output};

use serkit::audio_io::{write_wav, AudioClip};

fn serkit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_serkit"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn missing_root_exits_2_naming_path() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.toml", "tess_root = \"no_such_corpus\"\n");
    let o = serkit(&["--config", "c.toml", "scan"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no_such_corpus"), "{}", stderr(&o));
}

#[test]
fn unknown_key_exits_2_naming_key() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::create_dir(tmp.path().join("data")).unwrap();
    write(tmp.path(), "c.toml", "tess_root = \"data\"\nbatch = 8\n");
    let o = serkit(&["--config", "c.toml", "run"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`batch`"), "{}", stderr(&o));
}

#[test]
fn bad_emotion_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = serkit(&["viz", "--emotion", "bored"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tess_scan_is_labelled_and_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("tess");
    std::fs::create_dir(&data).unwrap();
    let clip = AudioClip::new((0..4000).map(|i| (i as f64 * 0.05).sin() * 0.3).collect(), 24_414);
    for name in ["OAF_back_angry", "OAF_back_ps", "YAF_dog_sad", "YAF_dog_fear"] {
        write_wav(data.join(format!("{name}.wav")), &clip).unwrap();
    }
    write(tmp.path(), "c.toml", "tess_root = \"tess\"\n");
    let read = |out: &str| {
        let o = serkit(&["--config", "c.toml", "--out", out, "scan"], tmp.path());
        assert!(o.status.success(), "{}", stderr(&o));
        let dir = tmp.path().join(out);
        (std::fs::read(dir.join("manifest.csv")).unwrap(), std::fs::read(dir.join("histogram.csv")).unwrap())
    };
    let first = read("a");
    assert_eq!(first, read("b"));
    let manifest = String::from_utf8(first.0).unwrap();
    let rows: Vec<&str> = manifest.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("tess")));
    assert!(String::from_utf8(first.1).unwrap().contains("surprise,1"));
}

#[test]
fn synth_then_run_writes_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = serkit(&["--out", "corpus", "synth", "--clips-per-class", "3", "--seconds", "1"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    write(
        tmp.path(),
        "c.toml",
        "ravdess_root = \"corpus\"\nclip_seconds = 1.0\nwavelet_levels = 4\nepochs = 1\nbatch_size = 8\nstretch_rates = []\npitch_semitones = [3.0]\n",
    );
    let o = serkit(&["--config", "c.toml", "--out", "run", "--seed-override", "dropout=5", "--threads", "1", "run"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run = tmp.path().join("run");
    for f in [
        "MANIFEST",
        "config.toml",
        "seeds.csv",
        "split_hash.txt",
        "features.csv",
        "train.csv",
        "test.csv",
        "standardizer.json",
        "train_report.csv",
        "epoch_timing.csv",
        "confusion.csv",
        "recall.csv",
        "model.ckpt",
    ] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let manifest = std::fs::read_to_string(run.join("MANIFEST")).unwrap();
    assert!(manifest.ends_with("status complete\n"), "{manifest}");
    assert!(std::fs::read_to_string(run.join("seeds.csv")).unwrap().contains("dropout,5"));
    // 18 train originals, each with noise and one pitch variant.
    assert_eq!(std::fs::read_to_string(run.join("train.csv")).unwrap().lines().count(), 1 + 18 * 3);

    // The resolved config replays the run.
    let o = serkit(&["--config", "run/config.toml", "--out", "replay", "run"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["train_report.csv", "confusion.csv", "split_hash.txt"] {
        assert_eq!(std::fs::read(run.join(f)).unwrap(), std::fs::read(tmp.path().join("replay").join(f)).unwrap(), "{f}");
    }
}
