use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use checksynth::cocoio::read_dataset;
use serde_json::json;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_checksynth"));
    c.env_remove("CHECKSYNTH_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "checksynth {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Scaffolded inputs with extracted samples; returns the config path.
fn prepared(dir: &Path, persons: usize, templates: usize) -> PathBuf {
    let persons = persons.to_string();
    let templates = templates.to_string();
    run(&["scaffold", s(dir), "--persons", &persons, "--templates", &templates, "--seed", "3"]);
    let cfg = dir.join("checksynth.toml");
    let manifest = dir.join("sheets/manifest.csv");
    let out = run(&["--config", s(&cfg), "extract", "--manifest", s(&manifest)]);
    assert!(stdout(&out).starts_with("extracted "));
    cfg
}

#[test]
fn end_to_end_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 2, 2);

    let v = run(&["--config", s(&cfg), "validate", "--samples", s(&dir.path().join("samples/samples.json"))]);
    assert!(stdout(&v).contains("0 protocol flag(s)"), "{}", stdout(&v));

    let out = dir.path().join("ds");
    let g = run(&[
        "--config", s(&cfg), "generate", "--out", s(&out),
        "--genuine-train", "6", "--genuine-val", "3", "--forged-train", "2", "--forged-val", "1",
    ]);
    let text = stdout(&g);
    assert!(text.contains("train"), "{text}");
    let train = read_dataset(&out.join("instances_train.json")).unwrap();
    let val = read_dataset(&out.join("instances_val.json")).unwrap();
    assert_eq!(train.images.len(), 8);
    assert_eq!(val.images.len(), 4);
    let forged = |ds: &checksynth::cocoio::CocoDataset| ds.annotations.iter().filter(|a| a.category_id == 6).count();
    assert_eq!((forged(&train), forged(&val)), (2, 1));
    for img in train.images.iter().chain(&val.images) {
        assert!(out.join(&img.file_name).is_file());
    }

    run(&["validate", "--dataset", s(&out.join("instances_val.json"))]);
    let st = run(&["stats", s(&out)]);
    let table = stdout(&st);
    for label in ["Courtesy", "Legal", "Date", "Payee", "Small", "Large"] {
        assert!(table.contains(label), "{table}");
    }

    // Ground truth fed back as predictions scores perfectly.
    let preds: Vec<_> = val
        .annotations
        .iter()
        .map(|a| json!({"image_id": a.image_id, "category_id": a.category_id, "bbox": a.bbox, "score": 1.0}))
        .collect();
    let pred_path = dir.path().join("pred.json");
    std::fs::write(&pred_path, serde_json::to_string(&preds).unwrap()).unwrap();
    let json_out = dir.path().join("result.json");
    let e = run(&[
        "evaluate", "--pred", s(&pred_path), "--gt", s(&out.join("instances_val.json")),
        "--layout", "overall", "--json", s(&json_out),
    ]);
    assert!(stdout(&e).contains("100.0"), "{}", stdout(&e));
    let result: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(result["mAP"], 1.0);
}

#[test]
fn tiny_config_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 1, 1);
    let mut text = std::fs::read_to_string(&cfg).unwrap();
    text = text
        .replace("genuine_train = 2352", "genuine_train = 2")
        .replace("genuine_val = 1008", "genuine_val = 0")
        .replace("forged_train = 700", "forged_train = 1")
        .replace("forged_val = 300", "forged_val = 0");
    std::fs::write(&cfg, text).unwrap();
    run(&["--config", s(&cfg), "generate"]);
    let train = read_dataset(&dir.path().join("dataset/instances_train.json")).unwrap();
    assert_eq!(train.images.len(), 3);
    assert_eq!(train.annotations.len(), 15);
    let val = read_dataset(&dir.path().join("dataset/instances_val.json")).unwrap();
    assert!(val.images.is_empty());
}

#[test]
fn config_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 1, 1);
    let out = dir.path().join("env_ds");
    let o = bin()
        .env("CHECKSYNTH_CONFIG", &cfg)
        .args(["generate", "--out", s(&out), "--genuine-train", "1", "--genuine-val", "0", "--forged-train", "0", "--forged-val", "0"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_dataset(&out.join("instances_train.json")).unwrap().images.len(), 1);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 1, 2);
    let gen = |name: &str| {
        let out = dir.path().join(name);
        run(&[
            "--config", s(&cfg), "generate", "--out", s(&out),
            "--genuine-train", "5", "--genuine-val", "2", "--forged-train", "2", "--forged-val", "1",
        ]);
        out
    };
    let (a, b) = (gen("a"), gen("b"));
    for f in ["instances_train.json", "instances_val.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
    }
    let ds = read_dataset(&a.join("instances_train.json")).unwrap();
    for img in &ds.images {
        assert_eq!(std::fs::read(a.join(&img.file_name)).unwrap(), std::fs::read(b.join(&img.file_name)).unwrap());
    }

    let c = dir.path().join("c");
    run(&[
        "--config", s(&cfg), "generate", "--out", s(&c), "--seed", "99",
        "--genuine-train", "5", "--genuine-val", "2", "--forged-train", "2", "--forged-val", "1",
    ]);
    assert_ne!(
        std::fs::read(a.join("instances_train.json")).unwrap(),
        std::fs::read(c.join("instances_train.json")).unwrap()
    );
}

#[test]
fn extract_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = prepared(dir.path(), 1, 1);
    let index = dir.path().join("samples/samples.json");
    let first = std::fs::read(&index).unwrap();
    run(&["--config", s(&cfg), "extract", "--manifest", s(&dir.path().join("sheets/manifest.csv"))]);
    assert_eq!(std::fs::read(&index).unwrap(), first);
}

#[test]
fn empty_manifest_extracts_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.csv");
    std::fs::write(&manifest, "sheet_file,person_id,forged,pen,x,y,w,h\n").unwrap();
    let out = run(&["extract", "--manifest", s(&manifest), "--out", s(&dir.path().join("samples"))]);
    assert!(stdout(&out).starts_with("extracted 0 samples"));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let o = bin().args(["evaluate", "--pred", s(&missing), "--gt", s(&missing)]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    // Asking for more checks than the samples can supply.
    let cfg = prepared(dir.path(), 1, 1);
    let o = bin()
        .args(["--config", s(&cfg), "generate", "--genuine-train", "100000"])
        .output()
        .unwrap();
    assert!(!o.status.success());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "no_such_key = 1\n").unwrap();
    let o = bin().args(["--config", s(&bad), "stats", s(dir.path())]).output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn dilate_directory() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("in");
    std::fs::create_dir(&src).unwrap();
    let mut img = image::GrayImage::from_pixel(7, 7, image::Luma([255]));
    img.put_pixel(3, 3, image::Luma([0]));
    img.save(src.join("dot.png")).unwrap();
    std::fs::write(src.join("junk.png"), b"junk").unwrap();
    let dst = dir.path().join("out");
    let o = run(&["dilate", s(&src), s(&dst), "--radius", "1"]);
    assert!(stdout(&o).contains("dilated 1 images"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("junk.png"));
    let out = image::open(dst.join("dot.png")).unwrap().to_luma8();
    let dark = out.pixels().filter(|p| p[0] == 0).count();
    assert_eq!(dark, 9);
}
