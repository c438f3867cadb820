mod common;

use std::fs;

use common::*;
use serde_json::Value;

use specmosaic::dataset::read_manifest;
use specmosaic::io::{read_cube, read_cube_with_meta, write_cube, write_pgm16};
use specmosaic::sfa::mosaic;
use specmosaic::SfaPattern;

#[test]
fn fvmap_identical_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_cube(&mut rng(30), 32, 32, 4);
    let ap = dir.path().join("a");
    write_cube(&a, &ap).unwrap();
    let out = dir.path().join("map");
    let pgm = dir.path().join("map.pgm");
    run_ok(&["fvmap", s(&ap), s(&ap), "-o", s(&out), "--pgm", s(&pgm)], None);
    let m = read_cube(&out).unwrap();
    assert_eq!(m.dims(), (32, 32, 1));
    assert!(m.as_slice().iter().all(|&x| x == 0.0));
    let bytes = fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n32 32\n255\n"));
}

#[test]
fn metrics_identical_pair() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_cube(&mut rng(31), 16, 16, 3).map(|x| x + 0.05);
    write_cube(&a, &dir.path().join("a")).unwrap();
    let list = dir.path().join("pairs.jsonl");
    fs::write(&list, "{\"reconstruction\": \"a\", \"reference\": \"a\"}\n").unwrap();
    let out = dir.path().join("report.json");
    run_ok(&["metrics", s(&list), "-o", s(&out)], None);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["mean_ssim"], 1.0);
    assert_eq!(v["mean_sam"], 0.0);
    assert_eq!(v["mean_psnr"], "inf");
    assert_eq!(v["peak"], 1.0);
    assert_eq!(v["tool_version"], specmosaic::TOOL_VERSION);
}

#[test]
fn usage_errors_exit_2() {
    let out = run_cli(&["fvmap", "only-one-arg"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = run_cli(&["no-such-command"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = std::process::Command::new(bin())
        .args(["mosaic", "x", "--pattern", "4x4", "-o", "y"])
        .env("SPECMOSAIC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn processing_error_reports_record() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_cube(&mut rng(32), 16, 16, 2);
    write_cube(&a, &dir.path().join("a")).unwrap();
    let list = dir.path().join("pairs.jsonl");
    fs::write(
        &list,
        "{\"reconstruction\": \"a\", \"reference\": \"a\"}\n{\"reconstruction\": \"a\", \"reference\": \"missing\"}\n",
    )
    .unwrap();
    let out = run_cli(&["metrics", s(&list), "-o", s(&dir.path().join("r.json"))], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("record 1"), "{err}");
}

#[test]
fn mosaic_then_demosaic() {
    let dir = tempfile::tempdir().unwrap();
    let c = random_cube(&mut rng(33), 12, 12, 9);
    let cp = dir.path().join("c");
    write_cube(&c, &cp).unwrap();
    let mp = dir.path().join("m");
    run_ok(&["mosaic", s(&cp), "--pattern", "3x3", "-o", s(&mp)], None);
    let (m, meta) = read_cube_with_meta(&mp).unwrap();
    let p = SfaPattern::row_major(3).unwrap();
    assert_eq!(meta.pattern.as_ref(), Some(&p));
    assert_eq!(m.as_slice(), mosaic(&c, &p).unwrap().as_slice());

    // Pattern taken from the mosaic sidecar.
    let dp = dir.path().join("d");
    run_ok(&["demosaic", s(&mp), "-o", s(&dp)], None);
    assert_eq!(read_cube(&dp).unwrap().dims(), (12, 12, 9));
}

#[test]
fn pattern_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let pat = dir.path().join("p.json");
    fs::write(&pat, "{\"period\": 2, \"band_at\": [3, 1, 2, 0]}").unwrap();
    let c = specmosaic::SpectralCube::from_fn(2, 2, 4, |_, _, k| k as f32 / 10.0).unwrap();
    let cp = dir.path().join("c");
    write_cube(&c, &cp).unwrap();
    let mp = dir.path().join("m");
    run_ok(&["mosaic", s(&cp), "--pattern", s(&pat), "-o", s(&mp)], None);
    assert_eq!(read_cube(&mp).unwrap().as_slice(), &[0.3, 0.1, 0.2, 0.0]);

    fs::write(&pat, "{\"period\": 2, \"band_at\": [0, 0, 1, 2]}").unwrap();
    let out = run_cli(&["mosaic", s(&cp), "--pattern", s(&pat), "-o", s(&mp)], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demosaic_pgm_input() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("frame.pgm");
    write_pgm16(&pgm, 8, 8, &[32768; 64]).unwrap();
    let out = dir.path().join("cube");
    run_ok(&["demosaic", s(&pgm), "--pattern", "2x2", "-o", s(&out)], None);
    let c = read_cube(&out).unwrap();
    assert_eq!(c.dims(), (8, 8, 4));
    assert!(c.as_slice().iter().all(|&x| x == (32768.0f64 / 65535.0) as f32));

    let out = run_cli(&["demosaic", s(&pgm), "-o", s(&dir.path().join("x"))], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn patchify_writes_aligned_tiles() {
    let dir = tempfile::tempdir().unwrap();
    let c = random_cube(&mut rng(34), 20, 20, 4);
    let cp = dir.path().join("scene");
    write_cube(&c, &cp).unwrap();
    let out = dir.path().join("tiles");
    run_ok(&["patchify", s(&cp), "--patch", "8", "8", "--pattern", "2x2", "-o", s(&out)], None);
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "scene__00000_00000.json",
            "scene__00000_00008.json",
            "scene__00008_00000.json",
            "scene__00008_00008.json"
        ]
    );
    let t = read_cube(&out.join("scene__00008_00000")).unwrap();
    assert_eq!(t.get(0, 3, 2), c.get(8, 3, 2));

    let bad = run_cli(&["patchify", s(&cp), "--patch", "9", "9", "--pattern", "2x2", "-o", s(&out)], None);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn pairs_select_and_metrics_surface() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    let cubes: Vec<_> = (0..3).map(|_| flat_cube(&mut rng(35), 16, 16, 16)).collect();
    write_cube_dir(&src, &cubes);
    let ds = dir.path().join("ds");
    run_ok(&["pairs", s(&src), "--pattern", "4x4", "-o", s(&ds)], None);
    let manifest = ds.join("manifest.jsonl");
    let recs = read_manifest(&manifest).unwrap();
    assert_eq!(recs.len(), 3);
    let line: Value = serde_json::from_str(fs::read_to_string(&manifest).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(line["aug"], "identity");
    assert_eq!(line["origin"], serde_json::json!([0, 0]));

    let hard = dir.path().join("sel").join("hard.jsonl");
    run_ok(&["select-hard", s(&manifest), "-o", s(&hard)], None);
    assert!(read_manifest(&hard).unwrap().is_empty());
    let verdicts = read_manifest(&dir.path().join("sel").join("hard.verdicts.jsonl")).unwrap();
    assert_eq!(verdicts.len(), 3);
    assert!(verdicts.iter().all(|r| r.hard == Some(false) && r.count == Some(0)));
    // Rebased paths still resolve.
    assert!(read_cube(&verdicts[0].cube_path(&dir.path().join("sel"))).is_ok());

    let report = dir.path().join("report.json");
    run_ok(&["metrics", s(&manifest), "-o", s(&report)], None);
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["per_image"].as_array().unwrap().len(), 3);
    assert_eq!(v["mean_psnr"], "inf");
}

#[test]
fn pairs_rejects_band_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    write_cube_dir(&src, &[random_cube(&mut rng(36), 8, 8, 3)]);
    let out = run_cli(&["pairs", s(&src), "--pattern", "2x2", "-o", s(&dir.path().join("ds"))], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("record 0"));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_cube(&mut rng(37), 24, 24, 4);
    let b = random_cube(&mut rng(38), 24, 24, 4);
    let (ap, bp) = (dir.path().join("a"), dir.path().join("b"));
    write_cube(&a, &ap).unwrap();
    write_cube(&b, &bp).unwrap();
    let (o1, o2) = (dir.path().join("m1"), dir.path().join("m2"));
    run_ok(&["fvmap", s(&ap), s(&bp), "-o", s(&o1)], Some(1));
    run_ok(&["fvmap", s(&ap), s(&bp), "-o", s(&o2)], Some(3));
    assert_eq!(fs::read(o1.with_extension("bsq")).unwrap(), fs::read(o2.with_extension("bsq")).unwrap());
    assert_eq!(fs::read(o1.with_extension("json")).unwrap(), fs::read(o2.with_extension("json")).unwrap());
}
