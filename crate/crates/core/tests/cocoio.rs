use std::collections::BTreeMap;

use checksynth::cocoio::{
    assign_splits, compute_stats, read_dataset, write_dataset, CocoDataset, SizeBuckets, Split, SplitConfig,
    SplitKey, Violation,
};
use checksynth::composer::{compose_check, synthetic_template, ComposeConfig, GeneratedCheck, GlyphAtlas};
use checksynth::demo::scribble_sample;
use checksynth::seed;
use checksynth::sheets::Pen;
use proptest::prelude::*;
use rand::Rng;

fn checks(n: usize, seed_value: u64) -> Vec<GeneratedCheck> {
    let templates: Vec<_> = (0..3).map(|i| synthetic_template(&format!("t{i}"), 420, 190, i)).collect();
    let atlas = GlyphAtlas::builtin();
    let cfg = ComposeConfig::default();
    let mut rng = seed::stream_from_u64(seed_value);
    (0..n)
        .map(|i| {
            let person = format!("p{:02}", rng.gen_range(0..5));
            let forged = rng.gen_bool(0.3);
            let pen = if rng.gen() { Pen::Ballpoint } else { Pen::Pencil };
            let sample = scribble_sample(&person, forged, pen, i as u64);
            let t = &templates[rng.gen_range(0..templates.len())];
            compose_check(t, &sample, &atlas, &mut rng, &cfg).unwrap()
        })
        .collect()
}

#[test]
fn fifty_checks_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cs = checks(50, 1);
    let written = write_dataset(&cs, "train", dir.path()).unwrap();
    let back = read_dataset(&dir.path().join("instances_train.json")).unwrap();
    assert_eq!(back, written);
    assert_eq!(back.images.len(), 50);
    assert_eq!(back.annotations.len(), 250);
    assert!(back.validate().is_empty());
    for (img, check) in back.images.iter().zip(&cs) {
        let on_disk = image::open(dir.path().join(&img.file_name)).unwrap().to_rgb8();
        assert_eq!(on_disk, check.image);
    }
    for a in &back.annotations {
        let check = &cs[a.image_id as usize - 1];
        let sig = a.category_id >= 5;
        assert_eq!(a.attributes.person_id.is_some(), sig);
        if sig {
            assert_eq!(a.attributes.person_id.as_deref(), Some(check.signature.person_id.as_str()));
            assert_eq!(a.attributes.forged, Some(a.category_id == 6));
        }
    }
}

#[test]
fn one_check_one_image_five_annotations() {
    let cs = checks(1, 2);
    let ds = CocoDataset::from_checks(&cs, "val", &["a.png".to_string()]);
    assert_eq!(ds.images.len(), 1);
    assert_eq!(ds.annotations.len(), 5);
    let mut cats: Vec<u64> = ds.annotations.iter().map(|a| a.category_id).collect();
    cats.sort();
    cats.dedup();
    assert_eq!(cats.len(), 5);
    for a in &ds.annotations {
        assert_eq!(a.area, a.bbox[2] * a.bbox[3]);
    }
}

#[test]
fn violations_detected() {
    let cs = checks(2, 3);
    let mut ds = CocoDataset::from_checks(&cs, "val", &["a.png".into(), "b.png".into()]);
    ds.annotations[0].image_id = 77;
    ds.annotations[1].id = ds.annotations[2].id;
    ds.annotations[3].category_id = 42;
    ds.annotations[4].area += 1.0;
    ds.annotations[5].bbox[0] = 1e6;
    let v = ds.validate();
    assert!(v.iter().any(|x| matches!(x, Violation::DanglingImage { image_id: 77, .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::DuplicateAnnotationId { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::UnknownCategory { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::AreaMismatch { .. })));
    assert!(v.iter().any(|x| matches!(x, Violation::BboxOutsideImage { .. })));
}

#[test]
fn malformed_file_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    std::fs::write(&p, "{\"images\": 3}").unwrap();
    assert!(read_dataset(&p).is_err());
}

#[test]
fn stats_rows_partition_class_totals() {
    let cs = checks(30, 4);
    let names: Vec<String> = (0..30).map(|i| format!("{i}.png")).collect();
    let ds = CocoDataset::from_checks(&cs, "train", &names);
    for buckets in [SizeBuckets::default(), SizeBuckets::new(500.0, 3000.0).unwrap()] {
        let stats = compute_stats(&ds, &buckets);
        let mut want: BTreeMap<u64, usize> = BTreeMap::new();
        for a in &ds.annotations {
            *want.entry(a.category_id).or_default() += 1;
        }
        for (cat, n) in want {
            assert_eq!(stats.row(cat).iter().sum::<usize>(), n);
            assert_eq!(stats.total(cat), n);
        }
    }
}

#[test]
fn bucket_edges_are_strict() {
    let b = SizeBuckets::default();
    use checksynth::cocoio::SizeBucket::*;
    assert_eq!(b.bucket(1023.0), Small);
    assert_eq!(b.bucket(1024.0), Medium);
    assert_eq!(b.bucket(9215.0), Medium);
    assert_eq!(b.bucket(9216.0), Large);
    assert!(SizeBuckets::new(10.0, 10.0).is_none());
}

fn keys(genuine: usize, forged: usize, persons: usize) -> Vec<SplitKey> {
    (0..genuine + forged)
        .map(|i| SplitKey {
            forged: i >= genuine,
            person_id: format!("p{}", i % persons),
        })
        .collect()
}

proptest! {
    #[test]
    fn split_counts_are_exact(
        gt in 0usize..30, gv in 0usize..30, ft in 0usize..15, fv in 0usize..15,
        extra_g in 0usize..20, extra_f in 0usize..20, s in any::<u64>(),
    ) {
        let cfg = SplitConfig { genuine_train: gt, genuine_val: gv, forged_train: ft, forged_val: fv, writer_disjoint: false };
        let items = keys(gt + gv + extra_g, ft + fv + extra_f, 7);
        let mut rng = seed::stream_from_u64(s);
        let out = assign_splits(&items, &cfg, &mut rng).unwrap();
        for split in Split::ALL {
            for forged in [false, true] {
                let n = items.iter().zip(&out).filter(|(k, o)| k.forged == forged && **o == Some(split)).count();
                prop_assert_eq!(n, cfg.count(split, forged));
            }
        }
    }

    #[test]
    fn writer_disjoint_keeps_persons_apart(s in any::<u64>()) {
        let cfg = SplitConfig { genuine_train: 30, genuine_val: 10, forged_train: 15, forged_val: 5, writer_disjoint: true };
        let items = keys(50, 25, 5);
        let mut rng = seed::stream_from_u64(s);
        if let Ok(out) = assign_splits(&items, &cfg, &mut rng) {
            let mut seen: BTreeMap<&str, Split> = BTreeMap::new();
            for (k, o) in items.iter().zip(&out) {
                if let Some(sp) = o {
                    prop_assert_eq!(*seen.entry(&k.person_id).or_insert(*sp), *sp);
                }
            }
        }
    }
}

#[test]
fn insufficient_items_rejected() {
    let cfg = SplitConfig::reference();
    let mut rng = seed::stream_from_u64(0);
    assert!(assign_splits(&keys(100, 100, 3), &cfg, &mut rng).is_err());
}
