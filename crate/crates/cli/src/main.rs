//! `epmodem`: run grid scenarios, block tests and BER sweeps.
//!
//! Exit codes: 0 success, 1 a scheduled frame was not decoded, 2 usage or
//! configuration error.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use epmodem::experiments::{
    agc_step_response, agc_test, ber_sweep, carrier_test, framesync_test, timing_test, BlockConfig, SweepConfig,
};
use epmodem::export::{chip_table, probe_table, write_csv, write_json, write_json_lines, FileHeader, Table};
use epmodem::gridsim::{run_scenario, GridScenario, ScenarioSummary};

#[derive(Parser)]
#[command(name = "epmodem", version, about = "Energy-packet powerline transceiver and DC grid simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a grid scenario and write its trace and summary.
    Run(RunArgs),
    /// Run one receiver block against its test stimulus.
    Blocktest(BlockArgs),
    /// Bit error rate and frame detection rate against SNR.
    BerSweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Run seed; overrides the scenario's `rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Probe columns to write, comma separated, or `all`.
    #[arg(long, value_delimiter = ',')]
    probes: Vec<String>,
    /// Format of sampled tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Serialize)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Block {
    Agc,
    Carrier,
    Timing,
    Framesync,
}

#[derive(Args, Serialize)]
struct BlockArgs {
    #[arg(value_enum)]
    block: Block,
    /// Carrier phase offset in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase_offset: f64,
    /// Carrier frequency offset in Hz.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    freq_offset: f64,
    /// Chip-clock offset in Hz.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    sro: f64,
    /// SNR in dB; noise-free if omitted.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<f64>,
    /// Spreading code of the receiver.
    #[arg(long, default_value_t = 3)]
    code: usize,
    /// Spreading code of the transmitted frames (framesync alternates 3 and 5 if omitted).
    #[arg(long)]
    stimulus_code: Option<usize>,
    /// Frames in frame-based stimuli.
    #[arg(long)]
    frames: Option<usize>,
    /// Length of chip-stream stimuli in seconds.
    #[arg(long)]
    duration: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SweepArgs {
    /// SNR points in dB, comma separated; `inf` is noise-free, `-inf` noise only.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    snr: Vec<f64>,
    /// Runs per SNR point.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Frames per run.
    #[arg(long, default_value_t = 10)]
    frames: usize,
    #[arg(long, default_value_t = 3)]
    code: usize,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

/// What was run and where it went, written next to the outputs.
#[derive(Serialize)]
struct RunManifest<'a, T: Serialize> {
    command: &'a str,
    seed: u64,
    args: &'a T,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Blocktest(a) => cmd_blocktest(&a),
        Command::BerSweep(a) => cmd_ber_sweep(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

#[derive(Serialize)]
struct TableJson<'a> {
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

fn write_table(out: &OutputArgs, stem: &str, header: &FileHeader, table: &Table) -> Result<PathBuf> {
    let path = out.out.join(format!("{stem}.{}", if out.format == Format::Csv { "csv" } else { "json" }));
    let w = create(&path)?;
    match out.format {
        Format::Csv => write_csv(w, header, table)?,
        Format::Json => write_json(w, header, &TableJson { columns: &table.columns, rows: &table.rows })?,
    }
    Ok(path)
}

fn write_summary<T: Serialize>(out: &OutputArgs, name: &str, header: &FileHeader, value: &T) -> Result<PathBuf> {
    let path = out.out.join(name);
    write_json(create(&path)?, header, value)?;
    Ok(path)
}

/// Resolve `--probes` against the columns a table offers.
fn probe_columns<'a>(requested: &'a [String], available: &[String], default: &[&'a str]) -> Result<Vec<&'a str>> {
    if requested.iter().any(|p| p == "all") {
        return Ok(Vec::new());
    }
    let names: Vec<&str> =
        if requested.is_empty() { default.to_vec() } else { requested.iter().map(String::as_str).collect() };
    for n in &names {
        if !available.iter().any(|c| c == n) {
            bail!("unknown probe '{n}', available: {}", available[1..].join(", "));
        }
    }
    Ok(names)
}

fn select(table: &Table, names: &[&str]) -> Result<Table> {
    if names.is_empty() {
        Ok(table.clone())
    } else {
        Ok(table.select(names)?)
    }
}

fn cmd_run(a: &RunArgs) -> Result<ExitCode> {
    let bytes = fs::read(&a.scenario).with_context(|| format!("cannot read scenario {}", a.scenario.display()))?;
    let text = std::str::from_utf8(&bytes).context("scenario is not UTF-8")?;
    let mut scenario =
        GridScenario::from_json(text).with_context(|| format!("invalid scenario {}", a.scenario.display()))?;
    if let Some(seed) = a.output.seed {
        scenario.impairments.rng_seed = seed;
    }
    let probe_names = probe_table(&[]).columns;
    let probes =
        if a.output.probes.is_empty() { Vec::new() } else { probe_columns(&a.output.probes, &probe_names, &[])? };
    if !a.output.probes.is_empty() {
        let mut rx = scenario.receiver_config();
        rx.record_probes = true;
        scenario.receiver = Some(rx);
    }
    let seed = scenario.impairments.rng_seed;
    let header = FileHeader::new(seed, &bytes);

    let trace = run_scenario(&scenario)?;
    let summary = ScenarioSummary::new(&scenario, &trace)?;

    fs::create_dir_all(&a.output.out).with_context(|| format!("cannot create {}", a.output.out.display()))?;
    write_table(&a.output, "trace", &header, &trace.table())?;
    if !a.output.probes.is_empty() {
        for (name, rec) in trace.load_names.iter().zip(&trace.receptions) {
            write_table(&a.output, &format!("probes_{name}"), &header, &select(&probe_table(&rec.probes), &probes)?)?;
        }
    }
    write_summary(&a.output, "summary.json", &header, &summary)?;
    write_json_lines(create(&a.output.out.join("messages.jsonl"))?, &header, &summary.detections)?;
    write_summary(&a.output, "manifest.json", &header, &RunManifest { command: "run", seed, args: a })?;

    for d in &summary.detections {
        println!(
            "{}: message at {:.6} s, valid {:.6} s, {} A for {} ms",
            d.load,
            d.detection_time_s,
            d.valid_time_s,
            d.message.current_a(),
            d.message.duration_ms
        );
    }
    for e in &summary.energy {
        println!("{}: {:.6} J", e.load, e.total_j);
    }
    let missed: Vec<String> = summary
        .frames
        .iter()
        .flat_map(|f| f.receivers.iter().filter(|r| !r.decoded).map(move |r| format!("{} @ {} s", r.load, f.time_s)))
        .collect();
    println!("BER {} over {} bits", summary.ber, summary.bits);
    if missed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("not decoded: {}", missed.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn cmd_blocktest(a: &BlockArgs) -> Result<ExitCode> {
    let mut cfg = BlockConfig {
        phase_offset_rad: a.phase_offset,
        freq_offset_hz: a.freq_offset,
        sro_hz: a.sro,
        snr_db: a.snr,
        code: a.code,
        stimulus_code: a.stimulus_code,
        seed: a.output.seed.unwrap_or(0),
        ..BlockConfig::default()
    };
    match a.block {
        Block::Framesync => cfg.frames = 20,
        Block::Timing => cfg.duration_s = 1.5,
        _ => {}
    }
    if let Some(f) = a.frames {
        cfg.frames = f;
    }
    if let Some(d) = a.duration {
        cfg.duration_s = d;
    }
    let manifest = RunManifest { command: "blocktest", seed: cfg.seed, args: a };
    let header = FileHeader::new(cfg.seed, &serde_json::to_vec(&manifest)?);

    let (table, defaults, summary): (Table, &[&str], serde_json::Value) = match a.block {
        Block::Agc => {
            let r = agc_test(&cfg)?;
            let mut t = probe_table(&r.probes);
            let gains: Vec<f64> = r
                .probes
                .iter()
                .map(|p| r.schedule.iter().rev().find(|s| s.start_s <= p.time_s).map_or(r.schedule[0].gain, |s| s.gain))
                .collect();
            t.add_column("channel_gain", &gains)?;
            let steps: Vec<_> = [0.5, 1.25].iter().map(|&c| agc_step_response(c, 1.0, 0.01)).collect();
            println!("settled output levels {:?}, spread {:.4}", r.settled_levels, r.level_spread);
            for s in &steps {
                println!(
                    "step c = {}: time constant {:?} samples (nominal {:.1}), error after 5 tau {:.2e}",
                    s.c, s.time_constant_samples, s.nominal_time_constant, s.error_after_5_tau
                );
            }
            (t, &["agc_gain", "agc_out", "channel_gain"], serde_json::json!({ "block": r, "step_responses": steps }))
        }
        Block::Carrier => {
            let r = carrier_test(&cfg)?;
            let mut t = probe_table(&r.probes);
            t.add_column("expected_phase", &r.expected_phase)?;
            println!(
                "settled {:?} s, final phase {:.4} rad (error {:.4}), residual PED mean {:.2e}, max symbol angle {:.4}, decoded {}/{}",
                r.settle_time_s,
                r.final_phase_acc,
                r.final_phase_error,
                r.residual_ped_mean,
                r.max_symbol_angle,
                r.score.decoded,
                r.score.expected
            );
            (t, &["phase_err", "phase_acc", "expected_phase", "carrier_lock"], serde_json::to_value(&r)?)
        }
        Block::Timing => {
            let r = timing_test(&cfg)?;
            println!(
                "cluster sigma {:.4} of amplitude {:.4}, mu period {:?} chips, chip phase period {:?} chips",
                r.cluster_sigma, r.amplitude, r.mu_period_chips, r.chip_phase_period_chips
            );
            (chip_table(&r.chips), &["re", "im", "mu", "chip_phase", "ted_err"], serde_json::to_value(&r)?)
        }
        Block::Framesync => {
            let r = framesync_test(&cfg)?;
            println!(
                "code {}: {} detections, {} of {} own frames found, {} not matching an own frame",
                r.code,
                r.detections.len(),
                r.score.detected,
                r.score.expected,
                r.score.false_detections
            );
            (probe_table(&r.probes), &["corr_metric"], serde_json::to_value(&r)?)
        }
    };
    let cols = probe_columns(&a.output.probes, &table.columns, defaults)?;
    fs::create_dir_all(&a.output.out).with_context(|| format!("cannot create {}", a.output.out.display()))?;
    let stem = serde_json::to_value(a.block)?.as_str().unwrap_or("block").to_string();
    write_table(&a.output, &stem, &header, &select(&table, &cols)?)?;
    write_summary(&a.output, &format!("{stem}_summary.json"), &header, &summary)?;
    write_summary(&a.output, "manifest.json", &header, &manifest)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ber_sweep(a: &SweepArgs) -> Result<ExitCode> {
    if a.snr.iter().any(|s| s.is_nan()) {
        bail!("SNR values must be numbers, inf or -inf");
    }
    let mut cfg = SweepConfig::combined(a.snr.clone(), a.seeds);
    cfg.frames = a.frames;
    cfg.code = a.code;
    cfg.base_seed = a.output.seed.unwrap_or(0);
    let manifest = RunManifest { command: "ber-sweep", seed: cfg.base_seed, args: a };
    let header = FileHeader::new(cfg.base_seed, &serde_json::to_vec(&manifest)?);
    let rows = ber_sweep(&cfg)?;

    let mut t = Table::new([
        "snr_db",
        "runs",
        "frames",
        "detected",
        "decoded",
        "false_detections",
        "bit_errors",
        "bits",
        "ber",
        "ber_low",
        "ber_high",
        "detection_rate",
    ]);
    println!("{:>8} {:>10} {:>22} {:>10} {:>8}", "snr_db", "ber", "95% interval", "detection", "false");
    for r in &rows {
        t.push(vec![
            r.snr_db,
            r.runs as f64,
            r.frames as f64,
            r.detected as f64,
            r.decoded as f64,
            r.false_detections as f64,
            r.bit_errors as f64,
            r.bits as f64,
            r.ber,
            r.ber_low,
            r.ber_high,
            r.detection_rate,
        ]);
        println!(
            "{:>8} {:>10.3e} {:>22} {:>10.3} {:>8}",
            r.snr_db,
            r.ber,
            format!("[{:.2e}, {:.2e}]", r.ber_low, r.ber_high),
            r.detection_rate,
            r.false_detections
        );
    }
    fs::create_dir_all(&a.output.out).with_context(|| format!("cannot create {}", a.output.out.display()))?;
    write_table(&a.output, "ber_sweep", &header, &t)?;
    write_summary(&a.output, "ber_sweep_summary.json", &header, &rows)?;
    write_summary(&a.output, "manifest.json", &header, &manifest)?;
    Ok(ExitCode::SUCCESS)
}
