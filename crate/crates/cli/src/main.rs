//! Command-line front end: code construction, decoding-cost evaluation and
//! sweeps, bit-level rate tables, and Monte-Carlo link simulation, all
//! emitting CSV for external plotting.
//!
//! Exit codes: 0 on success, 2 for usage errors, 1 for computation or I/O
//! failures (single-line diagnostic on stderr).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polar_mlc::code::CodeFile;
use polar_mlc::construction::construct_code;
use polar_mlc::decoder::CombineRule;
use polar_mlc::latency::{tc_code, tc_rate_sweep, DesignRule};
use polar_mlc::mlc::{
    design_mlc_with, level_rates_for, mlc_tc_sweep, total_mutual_information_for,
    AskConstellation, BitOrder,
};
use polar_mlc::sim::{run_mlc, run_single_code, ChannelConfig, SimOptions};

#[derive(Parser)]
#[command(
    name = "polar-mlc",
    version,
    about = "Polar code construction, decoding-cost analysis, and multi-level coded-modulation tools"
)]
struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Suppress non-essential output such as per-node breakdowns.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an information set via density evolution and emit a code file.
    Construct(ConstructArgs),
    /// Evaluate the decoding cost of a code: total cycles, then one
    /// `depth,index,kind,cost` line per visited node.
    Tc(TcArgs),
    /// Decoding cost across a rate grid; CSV `rate,K,tc`.
    TcSweep(TcSweepArgs),
    /// Per-level rates of an ASK constellation; CSV
    /// `snr_db,rate_1..rate_m,total_mi`.
    MlcRates(MlcRatesArgs),
    /// Multi-level design cost across an SNR grid; CSV
    /// `snr_db,tc_1..tc_m,tc_total`.
    MlcTc(MlcTcArgs),
    /// Monte-Carlo link simulation of one code over BPSK; CSV
    /// `snr_db,frames,bit_errors,frame_errors,ber,fer`.
    Simulate(SimulateArgs),
    /// Monte-Carlo simulation of the multi-level scheme with multistage
    /// decoding; aggregate columns then per-level `ber_i,fer_i`.
    SimulateMlc(SimulateMlcArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Tree depth; the block length is 2^n.
    #[arg(long)]
    n: u32,
    /// Number of information bits.
    #[arg(long)]
    k: usize,
    /// Design SNR Es/sigma^2 in dB for density evolution.
    #[arg(long)]
    design_snr_db: f64,
    /// Record this list size in the emitted code file.
    #[arg(long)]
    list_size: Option<usize>,
}

#[derive(Args)]
struct TcArgs {
    /// Code description file (`n=`, optional `L=`, `A=` lines).
    #[arg(long)]
    code: PathBuf,
    /// List size; falls back to the code file's `L=` line.
    #[arg(long)]
    list_size: Option<usize>,
}

#[derive(Args)]
struct TcSweepArgs {
    /// Tree depth; the block length is 2^n.
    #[arg(long)]
    n: u32,
    /// List size used by the cost model.
    #[arg(long)]
    list_size: usize,
    /// Rate grid: `start:stop:step` (inclusive), a single value, or a
    /// comma-separated list.
    #[arg(long)]
    rates: String,
    /// Fixed design SNR in dB; the default matches each rate's capacity
    /// plus 0.02 bits.
    #[arg(long)]
    design_snr_db: Option<f64>,
}

#[derive(Args)]
struct MlcRatesArgs {
    /// Bits per symbol; the constellation is 2^m-ASK.
    #[arg(long)]
    m: u32,
    /// SNR grid in dB: `start:stop:step`, a single value, or a comma list.
    #[arg(long)]
    snr_db: String,
    /// Make level 1 the most significant label bit instead of the least.
    #[arg(long)]
    msb_first: bool,
}

#[derive(Args)]
struct MlcTcArgs {
    /// Bits per symbol; the constellation is 2^m-ASK.
    #[arg(long)]
    m: u32,
    /// Tree depth of the per-level codes; each level spans 2^n symbols.
    #[arg(long)]
    n: u32,
    /// List size used by the cost model.
    #[arg(long)]
    list_size: usize,
    /// Levels with rate below epsilon are frozen, above 1-epsilon uncoded.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// SNR grid in dB: `start:stop:step`, a single value, or a comma list.
    #[arg(long)]
    snr_db: String,
    /// Make level 1 the most significant label bit instead of the least.
    #[arg(long)]
    msb_first: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Code description file (`n=`, optional `L=`, `A=` lines).
    #[arg(long)]
    code: PathBuf,
    /// Decoder list size; falls back to the code file's `L=` line.
    #[arg(long)]
    list_size: Option<usize>,
    /// SNR grid in dB: `start:stop:step`, a single value, or a comma list.
    #[arg(long)]
    snr_db: String,
    /// Frames per SNR point.
    #[arg(long)]
    frames: u64,
    /// Master seed; (seed, frame index) determines every sample.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stop a point early once this many frame errors are counted.
    #[arg(long)]
    max_frame_errors: Option<u64>,
    /// Decode with plain descent instead of the fast special-node rules.
    #[arg(long)]
    no_fast_nodes: bool,
    /// Use the min-sum approximation on the check side.
    #[arg(long)]
    min_sum: bool,
}

#[derive(Args)]
struct SimulateMlcArgs {
    /// Bits per symbol; the constellation is 2^m-ASK.
    #[arg(long)]
    m: u32,
    /// Tree depth of the per-level codes; each frame spans 2^n symbols.
    #[arg(long)]
    n: u32,
    /// Decoder list size.
    #[arg(long)]
    list_size: usize,
    /// Levels with rate below epsilon are frozen, above 1-epsilon uncoded.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// SNR grid in dB: `start:stop:step`, a single value, or a comma list.
    #[arg(long)]
    snr_db: String,
    /// Frames per SNR point.
    #[arg(long)]
    frames: u64,
    /// Master seed; (seed, frame index) determines every sample.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Condition higher levels on the transmitted bits instead of decisions.
    #[arg(long)]
    genie: bool,
    /// Make level 1 the most significant label bit instead of the least.
    #[arg(long)]
    msb_first: bool,
    /// Stop a point early once this many frame errors are counted.
    #[arg(long)]
    max_frame_errors: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let result = match &cli.output {
                Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match result {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("polar-mlc: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("polar-mlc: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<String, String> {
    match &cli.command {
        Command::Construct(args) => construct(args),
        Command::Tc(args) => tc(args, cli.quiet),
        Command::TcSweep(args) => tc_sweep(args),
        Command::MlcRates(args) => mlc_rates(args),
        Command::MlcTc(args) => mlc_tc_cmd(args),
        Command::Simulate(args) => simulate(args),
        Command::SimulateMlc(args) => simulate_mlc(args),
    }
}

/// Parses `start:stop:step` (endpoints inclusive within half a step), a
/// single value, or a comma-separated list of either.
fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => values.push(parse_f64(single)?),
            [start, stop, step] => {
                let start = parse_f64(start)?;
                let stop = parse_f64(stop)?;
                let step = parse_f64(step)?;
                if step <= 0.0 {
                    return Err(format!("grid step must be positive in {part:?}"));
                }
                if stop < start {
                    return Err(format!("empty grid {part:?}"));
                }
                let mut i = 0u64;
                loop {
                    let v = start + i as f64 * step;
                    if v > stop + step / 2.0 {
                        break;
                    }
                    values.push(v);
                    i += 1;
                }
            }
            _ => return Err(format!("expected value or start:stop:step, got {part:?}")),
        }
    }
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(values)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("not a number: {s:?}"))
}

fn bit_order(msb_first: bool) -> BitOrder {
    if msb_first {
        BitOrder::MsbFirst
    } else {
        BitOrder::LsbFirst
    }
}

fn load_code(path: &PathBuf) -> Result<CodeFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    CodeFile::parse(&text).map_err(|e| e.to_string())
}

fn resolve_list_size(flag: Option<usize>, file: &CodeFile) -> Result<usize, String> {
    flag.or(file.list_size)
        .ok_or_else(|| "no list size: pass --list-size or add an L= line to the code file".into())
}

fn construct(args: &ConstructArgs) -> Result<String, String> {
    let code = construct_code(args.n, args.k, args.design_snr_db).map_err(|e| e.to_string())?;
    Ok(CodeFile { code, list_size: args.list_size }.render())
}

fn tc(args: &TcArgs, quiet: bool) -> Result<String, String> {
    let file = load_code(&args.code)?;
    let list_size = resolve_list_size(args.list_size, &file)?;
    let report = tc_code(&file.code, list_size);
    let mut out = format!("{}\n", report.total);
    if !quiet {
        out.push_str("depth,index,kind,cost\n");
        for c in &report.per_node {
            let _ = writeln!(out, "{},{},{},{}", c.node.depth(), c.node.index(), c.kind, c.cost);
        }
    }
    Ok(out)
}

fn tc_sweep(args: &TcSweepArgs) -> Result<String, String> {
    let rates = parse_grid(&args.rates)?;
    let design = match args.design_snr_db {
        Some(snr) => DesignRule::FixedSnrDb(snr),
        None => DesignRule::CapacityMatched,
    };
    let rows = tc_rate_sweep(args.n, args.list_size, &rates, design).map_err(|e| e.to_string())?;
    let mut out = String::from("rate,K,tc\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{}", row.rate, row.k, row.tc);
    }
    Ok(out)
}

fn mlc_rates(args: &MlcRatesArgs) -> Result<String, String> {
    let grid = parse_grid(&args.snr_db)?;
    let cst =
        AskConstellation::with_bit_order(args.m, bit_order(args.msb_first)).map_err(|e| e.to_string())?;
    let mut out = String::from("snr_db");
    for i in 1..=args.m {
        let _ = write!(out, ",rate_{i}");
    }
    out.push_str(",total_mi\n");
    for snr_db in grid {
        let rates = level_rates_for(&cst, snr_db).map_err(|e| e.to_string())?;
        let total = total_mutual_information_for(&cst, snr_db).map_err(|e| e.to_string())?;
        let _ = write!(out, "{snr_db}");
        for r in &rates.rates {
            let _ = write!(out, ",{r}");
        }
        let _ = writeln!(out, ",{total}");
    }
    Ok(out)
}

fn mlc_tc_cmd(args: &MlcTcArgs) -> Result<String, String> {
    let grid = parse_grid(&args.snr_db)?;
    let rows = mlc_tc_sweep(
        args.m,
        &grid,
        args.n,
        args.list_size,
        args.epsilon,
        bit_order(args.msb_first),
    )
    .map_err(|e| e.to_string())?;
    let mut out = String::from("snr_db");
    for i in 1..=args.m {
        let _ = write!(out, ",tc_{i}");
    }
    out.push_str(",tc_total\n");
    for row in rows {
        let _ = write!(out, "{}", row.snr_db);
        for tc in &row.level_tc {
            let _ = write!(out, ",{tc}");
        }
        let _ = writeln!(out, ",{}", row.total_tc);
    }
    Ok(out)
}

fn simulate(args: &SimulateArgs) -> Result<String, String> {
    let file = load_code(&args.code)?;
    let list_size = resolve_list_size(args.list_size, &file)?;
    let grid = parse_grid(&args.snr_db)?;
    let opts = SimOptions {
        fast_nodes: !args.no_fast_nodes,
        rule: if args.min_sum { CombineRule::MinSum } else { CombineRule::Exact },
        max_frame_errors: args.max_frame_errors,
    };
    let mut out = String::from("snr_db,frames,bit_errors,frame_errors,ber,fer\n");
    for snr_db in grid {
        let channel = ChannelConfig { snr_db, seed: args.seed };
        let r = run_single_code(&file.code, list_size, &channel, args.frames, &opts)
            .map_err(|e| e.to_string())?;
        let _ = writeln!(
            out,
            "{snr_db},{},{},{},{},{}",
            r.frames, r.bit_errors, r.frame_errors, r.ber, r.fer
        );
    }
    Ok(out)
}

fn simulate_mlc(args: &SimulateMlcArgs) -> Result<String, String> {
    let grid = parse_grid(&args.snr_db)?;
    let cst =
        AskConstellation::with_bit_order(args.m, bit_order(args.msb_first)).map_err(|e| e.to_string())?;
    let opts = SimOptions { max_frame_errors: args.max_frame_errors, ..Default::default() };
    let mut out = String::from("snr_db,frames,bit_errors,frame_errors,ber,fer");
    for i in 1..=args.m {
        let _ = write!(out, ",ber_{i}");
    }
    for i in 1..=args.m {
        let _ = write!(out, ",fer_{i}");
    }
    out.push('\n');
    for snr_db in grid {
        let design = design_mlc_with(&cst, snr_db, args.n, args.list_size, args.epsilon)
            .map_err(|e| e.to_string())?;
        let channel = ChannelConfig { snr_db, seed: args.seed };
        let r = run_mlc(&design, &channel, args.frames, args.genie, &opts)
            .map_err(|e| e.to_string())?;
        let a = &r.aggregate;
        let _ = write!(
            out,
            "{snr_db},{},{},{},{},{}",
            a.frames, a.bit_errors, a.frame_errors, a.ber, a.fer
        );
        for level in &r.per_level {
            let _ = write!(out, ",{}", level.ber);
        }
        for level in &r.per_level {
            let _ = write!(out, ",{}", level.fer);
        }
        out.push('\n');
    }
    Ok(out)
}
