//! End-to-end checks of the `texturecrop` binary: work-directory layout,
//! manifest idempotence, exit codes and the external-scorer file exchange.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use texturecrop::pixel::PixelImage;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_texturecrop"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Four 64x64 images: two textured (label 1), two flat-ish (label 0).
fn noise_64(rng: &mut ChaCha8Rng) -> PixelImage<f64> {
    let data: Vec<f64> = (0..64 * 64).map(|_| rng.gen_range(0.0..=1.0)).collect();
    PixelImage::new(64, 64, 1, data).unwrap()
}

fn small_dataset(dir: &Path) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut rows = String::from("path,label,subset\n");
    for i in 0..2 {
        let img = noise_64(&mut rng);
        let name = format!("textured_{i}.png");
        img.save_png(&dir.join(&name)).unwrap();
        rows.push_str(&format!("{name},1,small\n"));
    }
    for i in 0..2 {
        let img = PixelImage::<f64>::from_fn(64, 64, 1, |x, _, _| 0.45 + x as f64 / 640.0).unwrap();
        let name = format!("smooth_{i}.png");
        img.save_png(&dir.join(&name)).unwrap();
        rows.push_str(&format!("{name},0,small\n"));
    }
    let manifest = dir.join("dataset.csv");
    std::fs::write(&manifest, rows).unwrap();
    manifest
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn pipeline_subcommands_produce_work_layout_and_are_idempotent() {
    let dir = tmp_dir("cli_pipeline");
    let dataset = small_dataset(&dir);
    let work = dir.join("work");

    let crop_args = |work: &Path| {
        vec![
            "crop".into(),
            "--dataset".into(),
            dataset.display().to_string(),
            "--work".into(),
            work.display().to_string(),
            "--window".into(),
            "16".into(),
            "--stride".into(),
            "16".into(),
            "--export-crops".into(),
        ]
    };
    run_ok(bin().args(crop_args(&work)));
    let crops_first = std::fs::read(work.join("crops.jsonl")).unwrap();
    assert!(work.join("crops").join("textured_0_0_0.png").exists());

    // Re-running produces byte-identical manifests.
    run_ok(bin().args(crop_args(&work)));
    let crops_second = std::fs::read(work.join("crops.jsonl")).unwrap();
    assert_eq!(crops_first, crops_second);

    run_ok(bin().args([
        "score",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &work.display().to_string(),
        "--scorer",
        "proxy:2",
        "--window",
        "16",
        "--stride",
        "16",
    ]));
    run_ok(bin().args([
        "aggregate",
        "--work",
        &work.display().to_string(),
        "--agg",
        "average",
    ]));
    let out = run_ok(bin().args([
        "evaluate",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &work.display().to_string(),
    ]));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("small"), "table: {table}");
    assert!(table.contains("overall"));

    for artifact in ["crops.jsonl", "scores.jsonl", "aggregated.jsonl", "report.json", "config.json"] {
        assert!(work.join(artifact).exists(), "{artifact} missing");
    }

    // The textured class scores above the smooth class under the proxy.
    let report = texturecrop::manifest::read_report(&work.join("report.json")).unwrap();
    assert_eq!(report.overall.auc, 1.0);
}

#[test]
fn run_command_matches_manual_pipeline_and_one_point_ablation() {
    let dir = tmp_dir("cli_run_equivalence");
    let dataset = small_dataset(&dir);

    let manual = dir.join("manual");
    run_ok(bin().args([
        "crop",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &manual.display().to_string(),
        "--window",
        "16",
        "--stride",
        "16",
    ]));
    run_ok(bin().args([
        "score",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &manual.display().to_string(),
        "--scorer",
        "proxy:2",
        "--window",
        "16",
        "--stride",
        "16",
    ]));
    run_ok(bin().args([
        "aggregate",
        "--work",
        &manual.display().to_string(),
        "--agg",
        "average",
    ]));
    run_ok(bin().args([
        "evaluate",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &manual.display().to_string(),
    ]));

    let fused = dir.join("fused");
    run_ok(bin().args([
        "run",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &fused.display().to_string(),
        "--scorer",
        "proxy:2",
        "--window",
        "16",
        "--stride",
        "16",
    ]));
    for artifact in ["crops.jsonl", "scores.jsonl", "aggregated.jsonl"] {
        assert_eq!(
            std::fs::read(manual.join(artifact)).unwrap(),
            std::fs::read(fused.join(artifact)).unwrap(),
            "{artifact} differs between fused run and manual pipeline"
        );
    }

    // A one-point grid reproduces the plain pipeline's report.
    let ablate_work = dir.join("ablate");
    run_ok(bin().args([
        "ablate",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &ablate_work.display().to_string(),
        "--scorer",
        "proxy:2",
        "--window",
        "16",
        "--stride",
        "16",
        "--strides",
        "16",
    ]));
    let manual_report = texturecrop::manifest::read_report(&manual.join("report.json")).unwrap();
    let point_report = texturecrop::manifest::read_report(
        &ablate_work.join("grid").join("stride16").join("report.json"),
    )
    .unwrap();
    assert_eq!(manual_report.overall, point_report.overall);
    assert_eq!(manual_report.subsets, point_report.subsets);
}

#[test]
fn external_scorer_file_exchange_round_trips() {
    let dir = tmp_dir("cli_external");
    let dataset = small_dataset(&dir);
    let work = dir.join("work");

    run_ok(bin().args([
        "crop",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &work.display().to_string(),
        "--window",
        "16",
        "--stride",
        "16",
        "--export-crops",
    ]));

    // Stand-in external detector: read the crop manifest, score each
    // exported PNG by its mean intensity, write the score manifest.
    let crops = texturecrop::manifest::read_crop_manifest(&work.join("crops.jsonl")).unwrap();
    let mut lines = Vec::new();
    for crop in &crops {
        let png = work.join("crops").join(format!("{}.png", crop.crop_id));
        let bytes = std::fs::read(&png).unwrap();
        let img: PixelImage<f64> = texturecrop::pixel::decode_image(&bytes).unwrap();
        let mean = img.data().iter().sum::<f64>() / img.data().len() as f64;
        lines.push(texturecrop::manifest::ScoreLine {
            crop_id: crop.crop_id.clone(),
            score: mean,
        });
    }
    texturecrop::manifest::write_score_manifest(&work.join("scores.jsonl"), &lines).unwrap();

    run_ok(bin().args([
        "aggregate",
        "--work",
        &work.display().to_string(),
        "--agg",
        "median",
    ]));
    run_ok(bin().args([
        "evaluate",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &work.display().to_string(),
    ]));
    let report = texturecrop::manifest::read_report(&work.join("report.json")).unwrap();
    assert_eq!(report.aggregation.to_string(), "median");
}

#[test]
fn aggregate_aborts_on_missing_score() {
    let dir = tmp_dir("cli_missing_score");
    let dataset = small_dataset(&dir);
    let work = dir.join("work");

    run_ok(bin().args([
        "crop",
        "--dataset",
        &dataset.display().to_string(),
        "--work",
        &work.display().to_string(),
        "--window",
        "16",
        "--stride",
        "16",
    ]));
    // Score manifest missing every crop.
    std::fs::write(work.join("scores.jsonl"), "").unwrap();
    let out = bin()
        .args(["aggregate", "--work", &work.display().to_string()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing score"), "stderr: {stderr}");
}

#[test]
fn decode_failures_are_skipped_with_nonzero_exit() {
    let dir = tmp_dir("cli_bad_image");
    let dataset = small_dataset(&dir);
    std::fs::write(dir.join("broken.png"), b"not a png").unwrap();
    let mut rows = std::fs::read_to_string(&dataset).unwrap();
    rows.push_str("broken.png,1,small\n");
    std::fs::write(&dataset, rows).unwrap();

    let work = dir.join("work");
    let out = bin()
        .args([
            "crop",
            "--dataset",
            &dataset.display().to_string(),
            "--work",
            &work.display().to_string(),
            "--window",
            "16",
            "--stride",
            "16",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success(), "bad image must fail the run");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("broken.png"), "stderr: {stderr}");

    // The healthy images were still processed.
    let crops = texturecrop::manifest::read_crop_manifest(&work.join("crops.jsonl")).unwrap();
    assert!(crops.iter().any(|c| c.image_id == "textured_0"));
    assert!(!crops.iter().any(|c| c.image_id == "broken"));
}

#[test]
fn ablate_records_point_failures_and_continues() {
    let dir = tmp_dir("cli_ablate_failure");
    let dataset = small_dataset(&dir);
    let work = dir.join("work");

    // Window 0 is invalid; the other point still runs.
    let out = bin()
        .args([
            "ablate",
            "--dataset",
            &dataset.display().to_string(),
            "--work",
            &work.display().to_string(),
            "--scorer",
            "proxy:2",
            "--stride",
            "16",
            "--windows",
            "0,16",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("1 grid points failed"), "stderr: {stderr}");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(work.join("ablation.json")).unwrap())
            .unwrap();
    let points = summary["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    // Successful point sorts first, the failed one carries its error.
    assert_eq!(points[0]["id"], "window16");
    assert!(points[0]["error"].is_null());
    assert_eq!(points[1]["id"], "window0");
    assert!(points[1]["error"].as_str().unwrap().contains("window"));
}

#[test]
fn ten_crop_emits_ten_lines_and_flat_texture_crop_falls_back() {
    let dir = tmp_dir("cli_methods");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let img = noise_64(&mut rng);
    img.save_png(&dir.join("textured.png")).unwrap();
    let flat = PixelImage::<f64>::from_fn(64, 64, 1, |_, _, _| 0.5).unwrap();
    flat.save_png(&dir.join("flat.png")).unwrap();
    std::fs::write(
        dir.join("dataset.csv"),
        "path,label,subset\ntextured.png,1,s\nflat.png,0,s\n",
    )
    .unwrap();

    let ten_work = dir.join("ten");
    run_ok(bin().args([
        "crop",
        "--dataset",
        &dir.join("dataset.csv").display().to_string(),
        "--work",
        &ten_work.display().to_string(),
        "--method",
        "tencrop",
        "--window",
        "16",
    ]));
    let crops = texturecrop::manifest::read_crop_manifest(&ten_work.join("crops.jsonl")).unwrap();
    assert_eq!(crops.iter().filter(|c| c.image_id == "textured").count(), 10);
    assert_eq!(crops.iter().filter(|c| c.flipped).count(), 10);

    let texture_work = dir.join("texture");
    run_ok(bin().args([
        "crop",
        "--dataset",
        &dir.join("dataset.csv").display().to_string(),
        "--work",
        &texture_work.display().to_string(),
        "--window",
        "16",
        "--stride",
        "16",
    ]));
    let crops =
        texturecrop::manifest::read_crop_manifest(&texture_work.join("crops.jsonl")).unwrap();
    let flat_lines: Vec<_> = crops.iter().filter(|c| c.image_id == "flat").collect();
    assert_eq!(flat_lines.len(), 1);
    assert!(flat_lines[0].fallback);
}
