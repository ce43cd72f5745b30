//! Command-line front end: error-rate sweeps, throughput tables, topology
//! inspection and codec self-checks, driven by a `key = value` config file
//! with flag overrides.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use turbofabric::harness::{
    ber_csv, run_ber, run_throughput_sweep, throughput_csv, RunConfig, SweepGrid,
};
use turbofabric::llr_codec::{
    bl_to_sl, pfp_decode, pfp_encode, pfp_width, sl_to_bl, BitLlr, SymbolLlr, LLR_BITS,
};
use turbofabric::noc::{build_routing_table, gen_topology, ArbPolicy, NocKind};
use turbofabric::{Error, Result};

#[derive(Parser)]
#[command(
    name = "turbofabric",
    about = "Cycle-accurate simulation of parallel turbo decoders on a network-on-chip",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo bit/frame error rates over a list of SNR points (CSV).
    Ber(BerArgs),
    /// Exchange-cycle counts and decoded throughput for a config grid (CSV).
    Throughput(ThroughputArgs),
    /// Describe a network topology: degree, diameter, routing distances.
    Topology(TopologyArgs),
    /// Self-check the packed extrinsic representations.
    CodecCheck(CodecCheckArgs),
}

/// Settings shared by the simulation subcommands. Every flag mirrors a
/// config-file key and overrides it.
#[derive(Args, Default)]
struct ConfigArgs {
    /// Config file of `key = value` lines (# comments allowed).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Code preset: lte (binary) or wimax (double binary).
    #[arg(long)]
    code: Option<String>,
    /// Block length: information bits (lte) or couples (wimax).
    #[arg(long)]
    n: Option<String>,
    /// Permutation file overriding the built-in interleaver presets.
    #[arg(long)]
    perm_file: Option<String>,
    /// Number of parallel workers (network nodes).
    #[arg(long)]
    p: Option<String>,
    /// Full decoding iterations (two half iterations each).
    #[arg(long)]
    iterations: Option<String>,
    /// SISO algorithm: log-map or max-log.
    #[arg(long)]
    mode: Option<String>,
    /// Fractional bits of the channel LLR fixed-point grid.
    #[arg(long)]
    frac_bits: Option<String>,
    /// Extrinsic wire format: scalar, sl, bl or bl-pfp.
    #[arg(long)]
    llr_mode: Option<String>,
    /// Mantissa bits for bl-pfp.
    #[arg(long)]
    n_xi: Option<String>,
    /// Send threshold K, or `off`.
    #[arg(long)]
    abr_k: Option<String>,
    /// Extrinsic transport: direct or noc.
    #[arg(long)]
    exchange: Option<String>,
    /// Network topology: kautz or debruijn.
    #[arg(long)]
    topology: Option<String>,
    /// Node degree of the network.
    #[arg(long)]
    d: Option<String>,
    /// Output arbitration: rr (round robin) or fl (longest FIFO first).
    #[arg(long)]
    policy: Option<String>,
    /// Packets injected per node per cycle (0 < R <= 1).
    #[arg(long)]
    rate: Option<String>,
    /// Network FIFO depth, or `unbounded`.
    #[arg(long)]
    fifo_cap: Option<String>,
    /// Comma-separated Eb/N0 points in dB.
    #[arg(long)]
    snr_db: Option<String>,
    /// Base RNG seed; frames derive their own streams from it.
    #[arg(long)]
    seed: Option<String>,
    /// Frame cap per SNR point.
    #[arg(long)]
    max_frames: Option<String>,
    /// Stop an SNR point after this many frame errors.
    #[arg(long)]
    min_error_events: Option<String>,
    /// Frames to average in throughput runs.
    #[arg(long)]
    frames: Option<String>,
    /// Decoder clock in MHz.
    #[arg(long)]
    f_clk_mhz: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn build(&self, defaults: &[(&str, &str)]) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (k, v) in defaults {
            cfg.set(k, v)?;
        }
        if let Some(path) = &self.config {
            cfg.apply_text(&std::fs::read_to_string(path)?)?;
        }
        let overrides: [(&str, &Option<String>); 21] = [
            ("code", &self.code),
            ("n", &self.n),
            ("perm-file", &self.perm_file),
            ("p", &self.p),
            ("iterations", &self.iterations),
            ("mode", &self.mode),
            ("frac-bits", &self.frac_bits),
            ("llr-mode", &self.llr_mode),
            ("n-xi", &self.n_xi),
            ("abr-k", &self.abr_k),
            ("exchange", &self.exchange),
            ("topology", &self.topology),
            ("d", &self.d),
            ("policy", &self.policy),
            ("rate", &self.rate),
            ("fifo-cap", &self.fifo_cap),
            ("snr-db", &self.snr_db),
            ("seed", &self.seed),
            ("max-frames", &self.max_frames),
            ("min-error-events", &self.min_error_events),
            ("frames", &self.frames),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(v) = &self.f_clk_mhz {
            cfg.set("f-clk-mhz", v)?;
        }
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Args)]
struct BerArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Args)]
struct ThroughputArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Comma-separated worker counts to sweep (overrides --p).
    #[arg(long)]
    p_list: Option<String>,
    /// Comma-separated degrees to sweep (overrides --d).
    #[arg(long)]
    d_list: Option<String>,
    /// Comma-separated injection rates to sweep (overrides --rate).
    #[arg(long)]
    rate_list: Option<String>,
    /// Comma-separated policies to sweep (overrides --policy).
    #[arg(long)]
    policy_list: Option<String>,
    /// Comma-separated send thresholds (numbers or `off`) to sweep.
    #[arg(long)]
    abr_k_list: Option<String>,
    /// Comma-separated wire formats to sweep.
    #[arg(long)]
    llr_mode_list: Option<String>,
}

#[derive(Args)]
struct TopologyArgs {
    /// kautz or debruijn.
    #[arg(long, default_value = "kautz")]
    topology: String,
    /// Node count.
    #[arg(long)]
    p: usize,
    /// Node degree.
    #[arg(long)]
    d: usize,
    /// Also print every node's successor list.
    #[arg(long)]
    links: bool,
}

#[derive(Args)]
struct CodecCheckArgs {
    /// Mantissa bits to examine.
    #[arg(long, default_value = "4")]
    n_xi: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Ber(a) => cmd_ber(a),
        Cmd::Throughput(a) => cmd_throughput(a),
        Cmd::Topology(a) => cmd_topology(a),
        Cmd::CodecCheck(a) => cmd_codec_check(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for configuration problems, 3 for failures of a valid simulation.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::PermFile { .. }
        | Error::InvalidPolynomial { .. }
        | Error::NonBijective { .. }
        | Error::NoCirculationState { .. }
        | Error::Unreachable { .. } => 2,
        Error::Deadlock { .. }
        | Error::DuplicateDelivery { .. }
        | Error::ZeroCycles
        | Error::Io(_) => 3,
    }
}

fn cmd_ber(a: BerArgs) -> Result<()> {
    let cfg = a.cfg.build(&[])?;
    let dec = cfg.build_decoder()?;
    let points = run_ber(&dec, &cfg.snr_db, &cfg.ber_options())?;
    a.cfg.emit(&ber_csv(&points))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn cmd_throughput(a: ThroughputArgs) -> Result<()> {
    // Throughput is only defined over the network; a config file may still
    // explicitly select `direct` and get a clear error.
    let cfg = a.cfg.build(&[("exchange", "noc")])?;

    let mut grid = SweepGrid::default();
    let mut probe = cfg.clone();
    if let Some(s) = &a.p_list {
        for t in split_list(s) {
            probe.set("p", t)?;
            grid.p.push(probe.p);
        }
    }
    if let Some(s) = &a.d_list {
        for t in split_list(s) {
            probe.set("d", t)?;
            grid.d.push(parse_usize("d-list", t)?);
        }
    }
    if let Some(s) = &a.rate_list {
        for t in split_list(s) {
            grid.rate.push(parse_f64("rate-list", t)?);
        }
    }
    if let Some(s) = &a.policy_list {
        for t in split_list(s) {
            grid.policy.push(match t {
                "rr" => ArbPolicy::RoundRobin,
                "fl" => ArbPolicy::FifoLength,
                _ => {
                    return Err(Error::Config(format!(
                        "invalid value {t:?} for policy-list: expected rr or fl"
                    )))
                }
            });
        }
    }
    if let Some(s) = &a.abr_k_list {
        for t in split_list(s) {
            grid.abr_k.push(if t == "off" {
                None
            } else {
                Some(parse_i32("abr-k-list", t)?)
            });
        }
    }
    if let Some(s) = &a.llr_mode_list {
        for t in split_list(s) {
            probe.set("llr-mode", t)?;
            grid.llr_mode.push(t.to_string());
        }
    }

    let rows = run_throughput_sweep(&cfg, &grid, &cfg.throughput_options()?)?;
    a.cfg.emit(&throughput_csv(&rows))
}

fn cmd_topology(a: TopologyArgs) -> Result<()> {
    let kind = match a.topology.as_str() {
        "kautz" => NocKind::Kautz,
        "debruijn" => NocKind::DeBruijn,
        other => {
            return Err(Error::Config(format!(
                "invalid value {other:?} for topology: expected kautz or debruijn"
            )))
        }
    };
    let topo = gen_topology(kind, a.p, a.d)?;
    let table = build_routing_table(&topo);
    let p = topo.p;
    let mut sum = 0u64;
    for src in 0..p as u32 {
        for dst in 0..p as u32 {
            sum += table.hops(src, dst) as u64;
        }
    }
    println!("topology: {}", a.topology);
    println!("nodes: {p}");
    println!("degree: {}", topo.d);
    println!("self-loops: {}", topo.self_loops);
    println!("diameter: {}", topo.diameter);
    println!("mean-hops: {:.3}", sum as f64 / (p * p) as f64);
    if a.links {
        for (i, succ) in topo.succ.iter().enumerate() {
            let list: Vec<String> = succ.iter().map(|s| s.to_string()).collect();
            println!("{i}: {}", list.join(" "));
        }
    }
    Ok(())
}

fn cmd_codec_check(a: CodecCheckArgs) -> Result<()> {
    if !(1..LLR_BITS).contains(&a.n_xi) {
        return Err(Error::Config(format!(
            "invalid value {} for n-xi: expected 1..={}",
            a.n_xi,
            LLR_BITS - 1
        )));
    }
    println!("payload widths (bits): sl=24 bl=16 bl-pfp(n-xi={})={}", a.n_xi, pfp_width(a.n_xi));

    // Worst-case pseudo-floating-point rounding over every mantissa pair:
    // truncating to n_xi bits with a shared exponent can drop at most the
    // low (8 - n_xi) bits of each component.
    let mut max_err = 0i32;
    for a_raw in i8::MIN..=i8::MAX {
        for b_raw in i8::MIN..=i8::MAX {
            let x = BitLlr { a: a_raw, b: b_raw };
            let y = pfp_decode(pfp_encode(x, a.n_xi), a.n_xi);
            let err = (x.a as i32 - y.a as i32)
                .abs()
                .max((x.b as i32 - y.b as i32).abs());
            max_err = max_err.max(err);
        }
    }
    let bound = (1i32 << (LLR_BITS - a.n_xi)) - 1;
    println!("pfp max |error| over all 65536 inputs: {max_err} (bound {bound})");
    if max_err > bound {
        return Err(Error::Config("pfp error bound violated".into()));
    }

    // Projection to bit level must keep the winning symbol recoverable:
    // re-expanding and taking the argmax agrees wherever the symbol-level
    // argmax is unique.
    let mut checked = 0u64;
    for l01 in (-128..=127).step_by(3) {
        for l10 in (-128..=127).step_by(3) {
            for l11 in (-128..=127).step_by(3) {
                let s = SymbolLlr {
                    lam01: l01 as i8,
                    lam10: l10 as i8,
                    lam11: l11 as i8,
                };
                let vals = [0, s.lam01 as i32, s.lam10 as i32, s.lam11 as i32];
                let best = (0..4).max_by_key(|&i| vals[i]).unwrap();
                if vals.iter().filter(|&&v| v == vals[best]).count() > 1 {
                    continue; // ties may fall either way
                }
                let r = bl_to_sl(sl_to_bl(s));
                let rvals = [0, r.lam01 as i32, r.lam10 as i32, r.lam11 as i32];
                let rbest = (0..4).max_by_key(|&i| rvals[i]).unwrap();
                if best != rbest {
                    return Err(Error::Config(format!(
                        "hard decision changed for {s:?}: {best} -> {rbest}"
                    )));
                }
                checked += 1;
            }
        }
    }
    println!("bit-level projection kept the hard decision on {checked} unique-argmax inputs");
    println!("ok");
    Ok(())
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}: expected an integer")))
}

fn parse_i32(key: &str, v: &str) -> Result<i32> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}: expected an integer")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value {v:?} for {key}: expected a number")))
}
