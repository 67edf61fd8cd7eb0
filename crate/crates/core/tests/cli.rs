use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tvho::experiments::translating_boxes;
use tvho::io::{decode_volume, encode_pgm, encode_volume, import_frames, read_volume, write_volume, Dtype};
use tvho::VideoTensor;

fn tvho(args: &[&str]) -> Output {
    tvho_env(args, &[])
}

fn tvho_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tvho"));
    cmd.args(args).env_remove("TVHO_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn kernel_design_prints_full_kernel() {
    let o = tvho(&["kernel", "design", "--length", "5", "--accuracy", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals, vec![0.125, 0.25, 0.0, -0.25, -0.125]);
}

#[test]
fn usage_and_argument_errors_exit_one() {
    assert_eq!(tvho(&["badcmd"]).status.code(), Some(1));
    assert_eq!(tvho(&["kernel", "design", "--length", "4", "--accuracy", "2"]).status.code(), Some(1));
    assert_eq!(tvho(&["--help"]).status.code(), Some(0));
}

#[test]
fn diff_applies_boundary_rule() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.txt");
    fs::write(&input, "0\n1\n2\n3\n").unwrap();
    let o = tvho(&["diff", "--length", "3", "--accuracy", "2", "--bc", "ar", "--input", s(&input)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals, vec![1.0; 4]);
    let o = tvho(&["diff", "--length", "3", "--accuracy", "2", "--bc", "zero", "--input", s(&input)]);
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals, vec![0.5, 1.0, 1.0, -1.0]);
}

#[test]
fn tv_subcommand_reads_volumes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ramp.vol");
    let f = VideoTensor::from_fn(4, 4, 4, |i, _, _| i as f64);
    write_volume(&path, &f, Dtype::F64).unwrap();
    let o = tvho(&["tv", "--input", s(&path)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // a unit ramp along rows, extended exactly: slope 1 at all 64 pixels
    let tv: f64 = stdout(&o).trim().parse().unwrap();
    assert!((tv - 64.0).abs() < 1e-12);
}

#[test]
fn volume_f64_round_trip_is_bit_identical() {
    let f = VideoTensor::from_fn(3, 5, 2, |i, j, t| (i as f64 - 1.3) * (j as f64 + 0.1) / (t as f64 + 7.0));
    let bytes = encode_volume(&f, Dtype::F64).unwrap();
    let back = decode_volume(&bytes, Path::new("mem")).unwrap();
    assert!(f.as_slice().iter().zip(back.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!(back.shape(), (3, 5, 2));
}

#[test]
fn volume_u8_rounds_half_away_from_zero() {
    let f = VideoTensor::from_vec(2, 2, 1, vec![254.5, -3.0, 300.0, 0.49]).unwrap();
    let back = decode_volume(&encode_volume(&f, Dtype::U8).unwrap(), Path::new("mem")).unwrap();
    assert_eq!(back.as_slice(), &[255.0, 0.0, 255.0, 0.0]);
}

#[test]
fn truncated_volume_names_both_sizes() {
    let f = VideoTensor::zeros(4, 4, 2);
    let mut bytes = encode_volume(&f, Dtype::F64).unwrap();
    bytes.truncate(bytes.len() - 9);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.vol");
    fs::write(&path, &bytes).unwrap();
    let msg = read_volume(&path).unwrap_err().to_string();
    assert!(msg.contains("expected 277") && msg.contains("found 268"), "{msg}");
    let o = tvho(&["tv", "--input", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected 277"));
}

fn write_frames(dir: &Path, frames: &[(&str, usize, usize)]) {
    for (k, (name, rows, cols)) in frames.iter().enumerate() {
        let px: Vec<u8> = (0..rows * cols).map(|p| (p * 7 + k) as u8).collect();
        fs::write(dir.join(name), encode_pgm(*rows, *cols, &px)).unwrap();
    }
}

#[test]
fn pgm_frames_import_in_name_order() {
    let dir = tempfile::tempdir().unwrap();
    let px: Vec<u8> = (0..12).map(|p| p as u8 * 10).collect();
    fs::write(dir.path().join("b.pgm"), encode_pgm(3, 4, &px)).unwrap();
    fs::write(dir.path().join("a.pgm"), encode_pgm(3, 4, &px)).unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let v = import_frames(dir.path()).unwrap();
    assert_eq!(v.shape(), (3, 4, 2));
    assert_eq!(v.frame(0), v.frame(1));
    // row-major pixels land in column-major order
    assert_eq!(v.get(1, 0, 0), 40.0);
    assert_eq!(v.get(0, 1, 0), 10.0);
}

#[test]
fn mixed_frame_sizes_name_both_files() {
    let dir = tempfile::tempdir().unwrap();
    write_frames(dir.path(), &[("f0.pgm", 4, 4), ("f1.pgm", 4, 5)]);
    let msg = import_frames(dir.path()).unwrap_err().to_string();
    assert!(msg.contains("f0.pgm") && msg.contains("f1.pgm"), "{msg}");
}

#[test]
fn pgm_with_wide_maxval_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = b"P5\n2 2\n65535\n".to_vec();
    bytes.extend_from_slice(&[0; 8]);
    fs::write(dir.path().join("deep.pgm"), bytes).unwrap();
    assert!(import_frames(dir.path()).unwrap_err().to_string().contains("deep.pgm"));
    let empty = tempfile::tempdir().unwrap();
    assert!(import_frames(empty.path()).unwrap_err().to_string().contains("no PGM frames"));
}

/// Writes a small phantom and samples it; returns (measurements, plan).
fn sampled(dir: &Path, rate: &str) -> (PathBuf, PathBuf) {
    let vol = dir.join("phantom.vol");
    let o = tvho(&["phantom", "--size", "8,8,8", "--output", s(&vol)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b = dir.join("b.txt");
    let o = tvho(&["sample", "--input", s(&vol), "--rate", rate, "--seed", "3", "--output", s(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let plan = dir.join("b.txt.plan.json");
    assert!(plan.exists());
    (b, plan)
}

#[test]
fn mismatched_measurements_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (_, plan) = sampled(dir.path(), "0.5");
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1\n2\n3\n4\n5\n").unwrap();
    let out = dir.path().join("f.vol");
    let o = tvho(&["reconstruct", "--measurements", s(&bad), "--plan", s(&plan), "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("5") && msg.contains("256"), "{msg}");
}

#[test]
fn reconstruct_and_rerun_reproduce_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (b, plan) = sampled(dir.path(), "0.5");
    let out = dir.path().join("f.vol");
    let o = tvho(&["reconstruct", "--measurements", s(&b), "--plan", s(&plan), "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read(&out).unwrap();
    let meta_path = dir.path().join("f.vol.meta.json");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(meta["seeds"], serde_json::json!([3]));
    assert!(meta["config"].as_str().unwrap().contains("kernel_length"));
    fs::remove_file(&out).unwrap();
    let o = tvho(&["rerun", s(&meta_path)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read(&out).unwrap(), first);
    // a coarse sanity bound; 8 frames at half rate is a small problem
    let truth = translating_boxes(8, 8, 8);
    let f = read_volume(&out).unwrap();
    let err = f.sub(&truth).norm() / truth.norm();
    assert!(err < 0.2, "{err}");
}

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "sweep".to_string(),
            "--size".into(),
            "8,8,8".into(),
            "--rates".into(),
            "0.3,0.6".into(),
            "--seeds".into(),
            "1,2".into(),
            "--no-timing".into(),
            "--emit-plot-data".into(),
            "--output".into(),
            s(p).into(),
        ]
    };
    let run = |p: &Path, threads: &str| {
        let v = args(p);
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        let o = tvho_env(&refs, &[("TVHO_THREADS", threads)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    };
    run(&a, "0");
    run(&b, "0");
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("rate,seed,frame_index,psnr_db,nmse,iterations,wall_time_s\n"));
    // 2 rates x 2 seeds x (8 frames + mean)
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 9);
    assert!(dir.path().join("a.csv.rate.csv").exists());
    assert!(dir.path().join("a.csv.frames.csv").exists());
    let c = dir.path().join("c.csv");
    run(&c, "2");
    assert_eq!(text, fs::read_to_string(&c).unwrap());
}
