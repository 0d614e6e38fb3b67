use std::path::{Path, PathBuf};

use mwp::imgio::{read_pgm, write_pgm};
use mwp::{codec, CodecConfig, GrayImage, Report};
use rayon::prelude::*;

use crate::args::{Command, Selection};
use crate::output::{read, write_atomic, Failure, Outcome};

/// Non-binding figures printed under the bench summary: bits per pixel
/// for MRI and CT sets and encode/decode seconds, measured elsewhere on
/// different images and hardware.
const REFERENCE_LINES: [&str; 2] = [
    "reference: MRI average 1.48 bpp, CT average 1.42 bpp (other images; not comparable)",
    "reference: encode 2.57 s, decode 3.14 s (other hardware; not comparable)",
];

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Compress {
            input,
            output,
            levels,
            selection,
            no_predict,
        } => {
            let mut cfg = config(levels, selection);
            cfg.predict = !no_predict;
            let img = load_pgm(&input)?;
            let bytes = codec::compress_to_bytes(&img, &cfg).map_err(|e| Failure::codec(&input, e))?;
            write_atomic(&output, &bytes)?;
            let bpp = 8.0 * bytes.len() as f64 / img.pixel_count() as f64;
            eprintln!("{} -> {}: {} bytes, {bpp:.4} bpp", input.display(), output.display(), bytes.len());
            Ok(())
        }
        Command::Decompress { input, output } => {
            let bytes = read(&input)?;
            let img = codec::decompress_bytes(&bytes).map_err(|e| Failure::codec(&input, e))?;
            write_atomic(&output, &write_pgm(&img))
        }
        Command::Analyze {
            input,
            out_dir,
            levels,
            selection,
        } => analyze(&input, &out_dir, &config(levels, selection)),
        Command::Bench {
            corpus_dir,
            out_csv,
            repeats,
            levels,
        } => bench(&corpus_dir, out_csv.as_deref(), repeats, levels),
        Command::Phantom { kind, size, seed, out } => {
            let side = size as usize;
            let img = mwp::make_phantom(kind.into(), side, side, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            write_atomic(&out, &write_pgm(&img))
        }
    }
}

fn config(levels: u8, selection: Selection) -> CodecConfig {
    CodecConfig::default().with_levels(levels).with_selection(selection.into())
}

fn load_pgm(path: &Path) -> Outcome<GrayImage> {
    read_pgm(&read(path)?).map_err(|e| Failure::codec(path, e))
}

fn analyze(input: &Path, out_dir: &Path, cfg: &CodecConfig) -> Outcome {
    let img = load_pgm(input)?;
    let analysis = codec::analyze(&img, cfg).map_err(|e| Failure::codec(input, e))?;
    let mut files: Vec<(PathBuf, String)> = analysis
        .bands
        .iter()
        .map(|b| (out_dir.join(format!("{}.csv", b.label)), b.predictions_csv()))
        .collect();
    files.push((out_dir.join("correlations.csv"), analysis.correlations_csv()));
    std::fs::create_dir_all(out_dir).map_err(|e| Failure::io(out_dir, e))?;
    for (path, text) in &files {
        write_atomic(path, text.as_bytes())?;
    }
    for b in &analysis.bands {
        println!("{:<5} {}", b.label, b.model);
    }
    Ok(())
}

/// Thread count from `MWP_THREADS`; 0 or unset means sequential.
fn threads() -> Outcome<usize> {
    match std::env::var("MWP_THREADS") {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("MWP_THREADS must be a non-negative integer, got {v:?}"))),
    }
}

const BENCH_CONFIGS: [&str; 3] = ["greedy", "exhaustive", "no-predict"];

fn bench_config(name: &str, levels: u8) -> CodecConfig {
    let base = CodecConfig::default().with_levels(levels);
    match name {
        "greedy" => base,
        "exhaustive" => base.with_selection(mwp::SelectionMode::Exhaustive),
        _ => base.without_prediction(),
    }
}

struct Row {
    image: String,
    config: &'static str,
    report: Report,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn bench_image(path: &Path, name: &str, repeats: u32, levels: u8) -> Outcome<Vec<Row>> {
    let img = load_pgm(path)?;
    let mut rows = Vec::new();
    for config in BENCH_CONFIGS {
        let cfg = bench_config(config, levels);
        let mut runs = Vec::new();
        for _ in 0..repeats {
            runs.push(mwp::measure(&img, &cfg).map_err(|e| Failure::codec(path, e))?);
        }
        let mut report = runs[0].clone();
        report.encode_ms = median(runs.iter().map(|r| r.encode_ms).collect());
        report.decode_ms = median(runs.iter().map(|r| r.decode_ms).collect());
        rows.push(Row {
            image: name.to_string(),
            config,
            report,
        });
    }
    Ok(rows)
}

fn bench(dir: &Path, out_csv: Option<&Path>, repeats: u32, levels: u8) -> Outcome {
    let threads = threads()?;
    let mut images: Vec<(String, PathBuf)> = std::fs::read_dir(dir)
        .map_err(|e| Failure::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .filter_map(|p| Some((p.file_name()?.to_string_lossy().into_owned(), p)))
        .collect();
    images.sort();
    if images.is_empty() {
        return Err(Failure::Usage(format!("{}: no .pgm files found", dir.display())));
    }
    let work = |(name, path): &(String, PathBuf)| bench_image(path, name, repeats, levels);
    let results: Vec<Outcome<Vec<Row>>> = if threads == 0 {
        images.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))?;
        pool.install(|| images.par_iter().map(work).collect())
    };
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }

    let mut csv = String::from(Report::CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.report.csv_row(&row.image, row.config));
        csv.push('\n');
    }
    match out_csv {
        Some(path) => write_atomic(path, csv.as_bytes())?,
        None => print!("{csv}"),
    }

    eprintln!("{:<12}{:>8}{:>12}{:>12}", "config", "bpp", "enc ms", "dec ms");
    for config in BENCH_CONFIGS {
        let sel: Vec<&Report> = rows.iter().filter(|r| r.config == config).map(|r| &r.report).collect();
        let avg = |f: fn(&Report) -> f64| sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64;
        eprintln!(
            "{config:<12}{:>8.4}{:>12.2}{:>12.2}",
            avg(|r| r.bpp),
            avg(|r| r.encode_ms),
            avg(|r| r.decode_ms)
        );
    }
    for line in REFERENCE_LINES {
        eprintln!("{line}");
    }
    Ok(())
}
