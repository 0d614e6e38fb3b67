use std::path::Path;
use std::process::{Command, Output};

use mwp::imgio::{read_pgm, write_pgm};
use tempfile::TempDir;

fn mwp(args: &[&str]) -> Output {
    mwp_env(args, &[])
}

fn mwp_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mwp"));
    cmd.args(args).env_remove("MWP_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn mwp")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn phantom(dir: &TempDir, kind: &str, size: u32) -> std::path::PathBuf {
    let out = dir.path().join(format!("{kind}.pgm"));
    let o = mwp(&["phantom", "--kind", kind, "--size", &size.to_string(), "--seed", "7", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn compress_decompress_round_trip_is_canonical() {
    let dir = TempDir::new().unwrap();
    // non-canonical header: comment and odd whitespace
    let src = dir.path().join("a.pgm");
    let pixels: Vec<u8> = (0..40 * 24).map(|i| (i * 7 % 251) as u8).collect();
    let mut bytes = b"P5\n# scanner output\n40   24\n255\n".to_vec();
    bytes.extend_from_slice(&pixels);
    std::fs::write(&src, &bytes).unwrap();
    let (c, out) = (dir.path().join("a.mwp"), dir.path().join("b.pgm"));
    for extra in [&[][..], &["--no-predict"], &["--selection", "exhaustive", "--levels", "2"]] {
        let mut args = vec!["compress", p(&src), p(&c)];
        args.extend_from_slice(extra);
        assert!(mwp(&args).status.success());
        assert!(mwp(&["decompress", p(&c), p(&out)]).status.success());
        let canonical = write_pgm(&read_pgm(&bytes).unwrap());
        assert_eq!(std::fs::read(&out).unwrap(), canonical);
    }
}

#[test]
fn sixteen_bit_round_trip() {
    let dir = TempDir::new().unwrap();
    let img = mwp::GrayImage::from_fn(33, 20, mwp::BitDepth::Sixteen, |r, c| ((r * 3001 + c * 977) % 65536) as u16).unwrap();
    let src = dir.path().join("deep.pgm");
    std::fs::write(&src, write_pgm(&img)).unwrap();
    let (c, out) = (dir.path().join("deep.mwp"), dir.path().join("back.pgm"));
    assert!(mwp(&["compress", p(&src), p(&c), "--levels", "2"]).status.success());
    assert!(mwp(&["decompress", p(&c), p(&out)]).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&src).unwrap());
}

#[test]
fn usage_errors_exit_one_without_output() {
    let dir = TempDir::new().unwrap();
    let src = phantom(&dir, "ramp", 16);
    let out = dir.path().join("never.mwp");
    for args in [
        vec!["compress", p(&src), p(&out), "--bogus"],
        vec!["compress", p(&src), p(&out), "--levels", "9"],
        vec!["compress", p(&src), p(&out), "--selection", "random"],
        vec!["compress", p(&src), p(&out), "--levels", "5"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = mwp(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(!out.exists());
    }
    assert_eq!(mwp(&["--help"]).status.code(), Some(0));
    assert_eq!(mwp(&["--version"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_two_without_output() {
    let dir = TempDir::new().unwrap();
    let src = phantom(&dir, "gaussian_blob", 32);
    let c = dir.path().join("x.mwp");
    assert!(mwp(&["compress", p(&src), p(&c)]).status.success());
    let mut bytes = std::fs::read(&c).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    let bad = dir.path().join("bad.mwp");
    std::fs::write(&bad, &bytes).unwrap();
    let out = dir.path().join("out.pgm");
    let o = mwp(&["decompress", p(&bad), p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
    assert!(!out.exists());

    let o = mwp(&["decompress", p(&dir.path().join("missing.mwp")), p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = mwp(&["compress", p(&c), p(&out)]);
    assert_eq!(o.status.code(), Some(2), "container is not a PGM");
    assert!(!out.exists());
}

#[test]
fn analyze_writes_one_csv_per_detail_band_plus_correlations() {
    let dir = TempDir::new().unwrap();
    let src = phantom(&dir, "smooth_noise", 64);
    let out = dir.path().join("analysis");
    assert!(mwp(&["analyze", p(&src), "--out-dir", p(&out)]).status.success());
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    assert!(names.contains(&"correlations.csv".to_string()));
    let hl1 = std::fs::read_to_string(out.join("HL1.csv")).unwrap();
    assert_eq!(hl1.lines().next().unwrap(), "band_id,row,col,actual,predicted,residual");
    assert_eq!(hl1.lines().count(), 1 + 8 * 8);
    for line in hl1.lines().skip(1) {
        let f: Vec<i64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!(f[2] - f[3], f[4]);
    }
    assert!(mwp(&["analyze", p(&src), "--out-dir", p(&out), "--levels", "1"]).status.success());
}

fn strip_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.split(',').take(3).collect::<Vec<_>>().join(","))
        .collect()
}

#[test]
fn bench_rows_per_config_sorted_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    for kind in ["smooth_noise", "constant", "ramp", "gaussian_blob"] {
        let o = mwp(&["phantom", "--kind", kind, "--size", "32", "--out", p(&corpus.join(format!("{kind}.pgm")))]);
        assert!(o.status.success());
    }
    std::fs::write(corpus.join("notes.txt"), "ignored").unwrap();
    let csv_path = dir.path().join("bench.csv");
    let o = mwp(&["bench", "--corpus-dir", p(&corpus), "--out-csv", p(&csv_path), "--repeats", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1.48"));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "image,method-config,bpp,enc_ms,dec_ms");
    assert_eq!(lines.len(), 1 + 4 * 3);
    for config in ["greedy", "exhaustive", "no-predict"] {
        assert_eq!(lines.iter().filter(|l| l.split(',').nth(1) == Some(config)).count(), 4);
    }
    let images: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    let mut sorted = images.clone();
    sorted.sort();
    assert_eq!(images, sorted);

    let o = mwp_env(&["bench", "--corpus", p(&corpus), "--repeats", "1"], &[("MWP_THREADS", "3")]);
    assert!(o.status.success());
    assert_eq!(strip_timing(&String::from_utf8(o.stdout).unwrap()), strip_timing(&csv));

    let o = mwp_env(&["bench", "--corpus", p(&corpus)], &[("MWP_THREADS", "many")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn phantom_rejects_unknown_kind_and_tiny_size() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.pgm");
    assert_eq!(mwp(&["phantom", "--kind", "zebra", "--out", p(&out)]).status.code(), Some(1));
    assert_eq!(mwp(&["phantom", "--kind", "ramp", "--size", "4", "--out", p(&out)]).status.code(), Some(1));
    assert!(!out.exists());
}
