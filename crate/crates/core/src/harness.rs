//! Monte Carlo driver: BPSK/AWGN channel, error-rate and throughput runs,
//! text configuration, and CSV reporting.
//!
//! Every frame is seeded from `(seed, frame index)` alone, so results never
//! depend on chunking or worker count, and two runs with the same seed are
//! byte-identical. The same frame index also draws the same noise at every
//! SNR point and for every decoder variant — gap measurements between
//! variants therefore use common random numbers.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::abr::AbrConfig;
use crate::codes::{encode_binary, encode_duobinary, Code};
use crate::decoder::{
    ChannelLlrs, Decoder, DecoderConfig, ExchangeKind, FrameResult, LlrMode, NocParams,
};
use crate::error::{Error, Result};
use crate::interleave::{arp_preset, gen_arp, gen_qpp, load_permutation, qpp_preset, Permutation};
use crate::noc::{ArbPolicy, NocKind};
use crate::siso::DecodeMode;

/// All streams are rate 1/3: systematic plus one parity per constituent.
pub const CODE_RATE: f64 = 1.0 / 3.0;
pub const DEFAULT_CLOCK_HZ: f64 = 200.0e6;

/// BPSK over AWGN with Eb/N0 given in dB: bits map to ±1, the noise variance
/// is `1 / (2 · rate · 10^(snr/10))`, and the soft output `2y/σ²` is rounded
/// to the decoder's fixed-point grid and saturated to the 6-bit range.
#[derive(Debug, Clone, Copy)]
pub struct Channel {
    sigma: f64,
    gain: f64,
    scale: f64,
}

impl Channel {
    pub fn new(snr_db: f64, frac_bits: u32) -> Channel {
        let sigma2 = 1.0 / (2.0 * CODE_RATE * 10f64.powf(snr_db / 10.0));
        Channel {
            sigma: sigma2.sqrt(),
            gain: 2.0 / sigma2,
            scale: (1i32 << frac_bits) as f64,
        }
    }

    /// Transmit one bit and observe its quantized LLR.
    pub fn llr<R: Rng>(&self, bit: u8, rng: &mut R) -> i8 {
        let x = if bit == 1 { 1.0 } else { -1.0 };
        let z: f64 = rng.sample(StandardNormal);
        let y = x + self.sigma * z;
        (y * self.gain * self.scale).round().clamp(-32.0, 31.0) as i8
    }

    fn pair<R: Rng>(&self, bits: &[u8; 2], rng: &mut R) -> [i8; 2] {
        [self.llr(bits[0], rng), self.llr(bits[1], rng)]
    }
}

/// Independent generator for one frame: same `(seed, frame)` pair, same
/// draws, regardless of which thread or chunk runs it.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Draw random information, encode, pass through the channel, decode, and
/// count errors against the transmitted information.
pub fn simulate_frame(dec: &Decoder, ch: &Channel, rng: &mut ChaCha12Rng) -> Result<FrameOutcome> {
    let cfg = dec.config();
    let n = cfg.perm.n;
    let (llrs, reference) = if cfg.code.symbols == 2 {
        let info: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
        let info2: Vec<u8> = cfg.perm.fwd.iter().map(|&k| info[k as usize]).collect();
        let cw = encode_binary(&cfg.code, &info, &info2);
        let llrs = ChannelLlrs::Binary {
            sys: cw.sys.iter().map(|&b| ch.llr(b, rng)).collect(),
            par1: cw.par1.iter().map(|&b| ch.llr(b, rng)).collect(),
            par2: cw.par2.iter().map(|&b| ch.llr(b, rng)).collect(),
            tail1: cw.tail1.iter().map(|t| ch.pair(t, rng)).collect(),
            tail2: cw.tail2.iter().map(|t| ch.pair(t, rng)).collect(),
        };
        (llrs, info)
    } else {
        let couples: Vec<[u8; 2]> = (0..n)
            .map(|_| [rng.gen_range(0..2u8), rng.gen_range(0..2u8)])
            .collect();
        let couples2: Vec<[u8; 2]> = (0..n)
            .map(|j| {
                let c = couples[cfg.perm.fwd[j] as usize];
                if cfg.perm.swap[j] {
                    [c[1], c[0]]
                } else {
                    c
                }
            })
            .collect();
        let cw = encode_duobinary(&cfg.code, &couples, &couples2)?;
        // Couples are stored `[A, B]`; the decoder's lane 0 is the low
        // symbol bit B. Parity couples `[Y, W]` are already in lane order.
        let llrs = ChannelLlrs::Duobinary {
            sys: cw.sys.iter().map(|c| ch.pair(&[c[1], c[0]], rng)).collect(),
            par1: cw.par1.iter().map(|c| ch.pair(c, rng)).collect(),
            par2: cw.par2.iter().map(|c| ch.pair(c, rng)).collect(),
        };
        let syms = couples.iter().map(|c| c[0] << 1 | c[1]).collect();
        (llrs, syms)
    };

    let result = dec.decode_frame(&llrs)?;
    let mut bit_errors = 0u64;
    for (have, want) in result.decisions.iter().zip(&reference) {
        bit_errors += (have ^ want).count_ones() as u64;
    }
    Ok(FrameOutcome {
        bit_errors,
        frame_error: bit_errors > 0,
        result,
    })
}

#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub frame_error: bool,
    pub result: FrameResult,
}

/// Information bits per frame: the block length for binary codes, two bits
/// per couple for double-binary ones.
pub fn info_bits(cfg: &DecoderConfig) -> u64 {
    cfg.perm.n as u64 * (cfg.code.symbols as u64 / 2)
}

#[derive(Debug, Clone, Copy)]
pub struct BerOptions {
    pub seed: u64,
    pub max_frames: u64,
    /// Stop a point early once this many frame errors have been seen.
    pub min_error_events: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct BerPoint {
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
}

/// Simulate one SNR point until `min_error_events` frame errors or
/// `max_frames`, whichever comes first. Frames run in parallel chunks, but
/// the chunk boundaries are fixed, so the stopping point is deterministic.
pub fn run_ber_point(dec: &Decoder, snr_db: f64, opt: &BerOptions) -> Result<BerPoint> {
    if opt.min_error_events == 0 {
        return Err(Error::Config("min-error-events must be at least 1".into()));
    }
    let ch = Channel::new(snr_db, dec.config().frac_bits);
    let n_b = info_bits(dec.config());
    const CHUNK: u64 = 32;

    let mut frames = 0u64;
    let mut bit_errors = 0u64;
    let mut frame_errors = 0u64;
    while frames < opt.max_frames && frame_errors < opt.min_error_events {
        let take = CHUNK.min(opt.max_frames - frames);
        let outcomes: Result<Vec<(u64, bool)>> = (frames..frames + take)
            .into_par_iter()
            .map(|f| {
                let mut rng = frame_rng(opt.seed, f);
                let out = simulate_frame(dec, &ch, &mut rng)?;
                Ok((out.bit_errors, out.frame_error))
            })
            .collect();
        for (be, fe) in outcomes? {
            bit_errors += be;
            frame_errors += fe as u64;
        }
        frames += take;
    }
    Ok(BerPoint {
        snr_db,
        frames,
        bit_errors,
        frame_errors,
        ber: bit_errors as f64 / (frames as f64 * n_b as f64),
        fer: frame_errors as f64 / frames as f64,
    })
}

pub fn run_ber(dec: &Decoder, snr_list: &[f64], opt: &BerOptions) -> Result<Vec<BerPoint>> {
    snr_list
        .iter()
        .map(|&snr| run_ber_point(dec, snr, opt))
        .collect()
}

/// Decoded bits per second given per-half-iteration exchange cycle counts.
pub fn throughput(n_b: u64, f_clk_hz: f64, iterations: u64, n0: f64, n1: f64) -> Result<f64> {
    if !(n0 + n1 > 0.0) {
        return Err(Error::ZeroCycles);
    }
    Ok(n_b as f64 * f_clk_hz / (iterations as f64 * (n0 + n1)))
}

#[derive(Debug, Clone, Copy)]
pub struct ThroughputOptions {
    pub seed: u64,
    pub frames: u64,
    pub snr_db: f64,
    pub f_clk_hz: f64,
}

/// One row of the throughput report; `n_cyc0`/`n_cyc1` are mean exchange
/// cycles per half iteration of the respective constituent.
#[derive(Debug, Clone)]
pub struct ThroughputRow {
    pub code: String,
    pub n: usize,
    pub p: usize,
    pub d: usize,
    pub r: f64,
    pub topology: String,
    pub policy: String,
    pub llr_mode: String,
    pub abr_k: String,
    pub n_cyc0: f64,
    pub n_cyc1: f64,
    pub throughput_mbps: f64,
    pub suppressed_ratio: f64,
    pub fifo_max: usize,
}

pub fn run_throughput(cfg: &RunConfig, opt: &ThroughputOptions) -> Result<ThroughputRow> {
    let noc = match cfg.exchange {
        Exchange::Noc(np) => np,
        Exchange::Direct => {
            return Err(Error::Config(
                "throughput needs exchange=noc (direct exchange has no cycle cost)".into(),
            ))
        }
    };
    if opt.frames == 0 {
        return Err(Error::Config("frames must be at least 1".into()));
    }
    let dec = cfg.build_decoder()?;
    let ch = Channel::new(opt.snr_db, dec.config().frac_bits);
    let iterations = dec.config().iterations as u64;

    let outcomes: Result<Vec<FrameOutcome>> = (0..opt.frames)
        .into_par_iter()
        .map(|f| simulate_frame(&dec, &ch, &mut frame_rng(opt.seed, f)))
        .collect();
    let outcomes = outcomes?;

    let mut cyc0 = 0.0;
    let mut cyc1 = 0.0;
    let mut sent = 0u64;
    let mut suppressed = 0u64;
    let mut fifo_max = 0usize;
    for o in &outcomes {
        cyc0 += o.result.cyc0 as f64;
        cyc1 += o.result.cyc1 as f64;
        sent += o.result.sent;
        suppressed += o.result.suppressed;
        fifo_max = fifo_max.max(o.result.net_fifo_max);
    }
    let denom = (opt.frames * iterations) as f64;
    let n_cyc0 = cyc0 / denom;
    let n_cyc1 = cyc1 / denom;
    let mbps = throughput(info_bits(dec.config()), opt.f_clk_hz, iterations, n_cyc0, n_cyc1)?
        / 1.0e6;

    Ok(ThroughputRow {
        code: cfg.code.to_string(),
        n: cfg.n,
        p: cfg.p,
        d: noc.d,
        r: noc.rate,
        topology: match noc.kind {
            NocKind::Kautz => "kautz".into(),
            NocKind::DeBruijn => "debruijn".into(),
        },
        policy: match noc.policy {
            ArbPolicy::RoundRobin => "rr".into(),
            ArbPolicy::FifoLength => "fl".into(),
        },
        llr_mode: llr_mode_name(cfg.effective_llr_mode()),
        abr_k: match cfg.abr_k {
            Some(k) => k.to_string(),
            None => "off".into(),
        },
        n_cyc0,
        n_cyc1,
        throughput_mbps: mbps,
        suppressed_ratio: if sent + suppressed == 0 {
            0.0
        } else {
            suppressed as f64 / (sent + suppressed) as f64
        },
        fifo_max,
    })
}

/// Value lists to cross for a throughput table; empty lists keep the base
/// configuration's value.
#[derive(Debug, Clone, Default)]
pub struct SweepGrid {
    pub p: Vec<usize>,
    pub d: Vec<usize>,
    pub rate: Vec<f64>,
    pub policy: Vec<ArbPolicy>,
    pub abr_k: Vec<Option<i32>>,
    pub llr_mode: Vec<String>,
}

pub fn run_throughput_sweep(
    base: &RunConfig,
    grid: &SweepGrid,
    opt: &ThroughputOptions,
) -> Result<Vec<ThroughputRow>> {
    fn or_base<T: Clone>(list: &[T], base: T) -> Vec<T> {
        if list.is_empty() {
            vec![base]
        } else {
            list.to_vec()
        }
    }
    let base_noc = match base.exchange {
        Exchange::Noc(np) => np,
        Exchange::Direct => {
            return Err(Error::Config(
                "throughput needs exchange=noc (direct exchange has no cycle cost)".into(),
            ))
        }
    };
    let ps = or_base(&grid.p, base.p);
    let ds = or_base(&grid.d, base_noc.d);
    let rates = or_base(&grid.rate, base_noc.rate);
    let policies = or_base(&grid.policy, base_noc.policy);
    let ks = or_base(&grid.abr_k, base.abr_k);
    let modes = if grid.llr_mode.is_empty() {
        vec![None]
    } else {
        grid.llr_mode.iter().map(|m| Some(m.clone())).collect()
    };

    let mut rows = Vec::new();
    for &p in &ps {
        for &d in &ds {
            for &rate in &rates {
                for &policy in &policies {
                    for &k in &ks {
                        for mode in &modes {
                            let mut cfg = base.clone();
                            cfg.p = p;
                            cfg.exchange = Exchange::Noc(NocParams {
                                d,
                                rate,
                                policy,
                                ..base_noc
                            });
                            cfg.abr_k = k;
                            if let Some(m) = mode {
                                cfg.set("llr-mode", m)?;
                            }
                            rows.push(run_throughput(&cfg, opt)?);
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub const BER_CSV_HEADER: &str = "snr_db,frames,bit_errors,frame_errors,ber,fer";
pub const THROUGHPUT_CSV_HEADER: &str = "code,N,P,D,R,topology,policy,llr_mode,abr_k,n_cyc0,n_cyc1,throughput_mbps,suppressed_ratio,fifo_max";

pub fn ber_csv(points: &[BerPoint]) -> String {
    let mut out = String::from(BER_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e}",
            p.snr_db, p.frames, p.bit_errors, p.frame_errors, p.ber, p.fer
        );
    }
    out
}

pub fn throughput_csv(rows: &[ThroughputRow]) -> String {
    let mut out = String::from(THROUGHPUT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.2},{:.2},{:.3},{:.4},{}",
            r.code,
            r.n,
            r.p,
            r.d,
            r.r,
            r.topology,
            r.policy,
            r.llr_mode,
            r.abr_k,
            r.n_cyc0,
            r.n_cyc1,
            r.throughput_mbps,
            r.suppressed_ratio,
            r.fifo_max
        );
    }
    out
}

fn llr_mode_name(mode: LlrMode) -> String {
    match mode {
        LlrMode::Scalar => "scalar".into(),
        LlrMode::Sl => "sl".into(),
        LlrMode::Bl => "bl".into(),
        LlrMode::BlPfp { .. } => "bl-pfp".into(),
    }
}

/// Code preset selected by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodePreset {
    Lte,
    Wimax,
}

impl CodePreset {
    pub fn code(self) -> Code {
        match self {
            CodePreset::Lte => Code::lte_rsc(),
            CodePreset::Wimax => Code::wimax_ctc(),
        }
    }
}

impl std::fmt::Display for CodePreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CodePreset::Lte => "lte",
            CodePreset::Wimax => "wimax",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Exchange {
    Direct,
    Noc(NocParams),
}

/// Full run description, fed from a `key = value` text file and/or
/// individual overrides. Unset optional fields fall back to defaults that
/// depend on the code family.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub code: CodePreset,
    pub n: usize,
    pub perm_file: Option<PathBuf>,
    pub p: usize,
    pub iterations: usize,
    pub mode: DecodeMode,
    pub frac_bits: Option<u32>,
    pub llr_mode: Option<String>,
    pub n_xi: u8,
    pub abr_k: Option<i32>,
    pub exchange: Exchange,
    pub snr_db: Vec<f64>,
    pub seed: u64,
    pub max_frames: u64,
    pub min_error_events: u64,
    pub frames: u64,
    pub f_clk_hz: f64,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            code: CodePreset::Lte,
            n: 6144,
            perm_file: None,
            p: 1,
            iterations: 8,
            mode: DecodeMode::LogMap,
            frac_bits: None,
            llr_mode: None,
            n_xi: 4,
            abr_k: None,
            exchange: Exchange::Direct,
            snr_db: vec![1.0],
            seed: 1,
            max_frames: 10_000,
            min_error_events: 100,
            frames: 20,
            f_clk_hz: DEFAULT_CLOCK_HZ,
        }
    }
}

fn bad<T>(key: &str, value: &str, want: &str) -> Result<T> {
    Err(Error::Config(format!(
        "invalid value {value:?} for {key}: expected {want}"
    )))
}

impl RunConfig {
    /// Apply one `key = value` setting. Keys use the CLI flag spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "code" => {
                self.code = match v {
                    "lte" => CodePreset::Lte,
                    "wimax" => CodePreset::Wimax,
                    _ => return bad(key, v, "lte or wimax"),
                }
            }
            "n" => self.n = parse(key, v, "a positive integer")?,
            "perm-file" => self.perm_file = Some(PathBuf::from(v)),
            "p" => self.p = parse(key, v, "a positive integer")?,
            "iterations" => self.iterations = parse(key, v, "a positive integer")?,
            "mode" => {
                self.mode = match v {
                    "log-map" => DecodeMode::LogMap,
                    "max-log" => DecodeMode::MaxLog,
                    _ => return bad(key, v, "log-map or max-log"),
                }
            }
            "frac-bits" => self.frac_bits = Some(parse(key, v, "an integer in 1..=5")?),
            "llr-mode" => match v {
                "scalar" | "sl" | "bl" | "bl-pfp" => self.llr_mode = Some(v.to_string()),
                _ => return bad(key, v, "scalar, sl, bl or bl-pfp"),
            },
            "n-xi" => self.n_xi = parse(key, v, "an integer in 1..=7")?,
            "abr-k" => {
                self.abr_k = match v {
                    "off" => None,
                    _ => Some(parse(key, v, "a non-negative integer or off")?),
                }
            }
            "exchange" => match v {
                "direct" => self.exchange = Exchange::Direct,
                "noc" => {
                    if let Exchange::Direct = self.exchange {
                        self.exchange = Exchange::Noc(default_noc());
                    }
                }
                _ => return bad(key, v, "direct or noc"),
            },
            "topology" => {
                let kind = match v {
                    "kautz" => NocKind::Kautz,
                    "debruijn" => NocKind::DeBruijn,
                    _ => return bad(key, v, "kautz or debruijn"),
                };
                self.noc_mut().kind = kind;
            }
            "d" => self.noc_mut().d = parse(key, v, "a positive integer")?,
            "policy" => {
                let p = match v {
                    "rr" => ArbPolicy::RoundRobin,
                    "fl" => ArbPolicy::FifoLength,
                    _ => return bad(key, v, "rr or fl"),
                };
                self.noc_mut().policy = p;
            }
            "rate" => {
                let r: f64 = parse(key, v, "a number in (0, 1]")?;
                self.noc_mut().rate = r;
            }
            "fifo-cap" => {
                self.noc_mut().fifo_cap = match v {
                    "unbounded" => None,
                    _ => Some(parse(key, v, "a positive integer or unbounded")?),
                }
            }
            "snr-db" => {
                let list: Result<Vec<f64>> =
                    v.split(',').map(|s| parse(key, s.trim(), "a number")).collect();
                let list = list?;
                if list.is_empty() {
                    return bad(key, v, "a comma-separated list of numbers");
                }
                self.snr_db = list;
            }
            "seed" => self.seed = parse(key, v, "an unsigned integer")?,
            "max-frames" => self.max_frames = parse(key, v, "a positive integer")?,
            "min-error-events" => self.min_error_events = parse(key, v, "a positive integer")?,
            "frames" => self.frames = parse(key, v, "a positive integer")?,
            "f-clk-mhz" => {
                let mhz: f64 = parse(key, v, "a positive number")?;
                if !(mhz > 0.0) {
                    return bad(key, v, "a positive number");
                }
                self.f_clk_hz = mhz * 1.0e6;
            }
            _ => return Err(Error::Config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment, blank lines are
    /// skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", idx + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &std::path::Path) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    fn noc_mut(&mut self) -> &mut NocParams {
        if let Exchange::Direct = self.exchange {
            self.exchange = Exchange::Noc(default_noc());
        }
        match &mut self.exchange {
            Exchange::Noc(np) => np,
            Exchange::Direct => unreachable!(),
        }
    }

    fn binary(&self) -> bool {
        self.code == CodePreset::Lte
    }

    pub fn effective_frac_bits(&self) -> u32 {
        self.frac_bits.unwrap_or(if self.binary() { 3 } else { 2 })
    }

    pub fn effective_llr_mode(&self) -> LlrMode {
        match self.llr_mode.as_deref() {
            Some("scalar") => LlrMode::Scalar,
            Some("sl") => LlrMode::Sl,
            Some("bl") => LlrMode::Bl,
            Some("bl-pfp") => LlrMode::BlPfp { n_xi: self.n_xi },
            Some(_) => unreachable!("names validated in set()"),
            None if self.binary() => LlrMode::Scalar,
            None => LlrMode::Sl,
        }
    }

    pub fn permutation(&self) -> Result<Permutation> {
        if let Some(path) = &self.perm_file {
            let perm = load_permutation(path)?;
            if perm.n != self.n {
                return Err(Error::Config(format!(
                    "perm-file holds {} entries but n = {}",
                    perm.n, self.n
                )));
            }
            return Ok(perm);
        }
        match self.code {
            CodePreset::Lte => {
                let (f1, f2) = qpp_preset(self.n).ok_or_else(|| {
                    Error::Config(format!(
                        "no built-in interleaver for lte n = {}; give perm-file",
                        self.n
                    ))
                })?;
                gen_qpp(self.n, f1, f2)
            }
            CodePreset::Wimax => {
                let (p0, ps) = arp_preset(self.n).ok_or_else(|| {
                    Error::Config(format!(
                        "no built-in interleaver for wimax n = {}; give perm-file",
                        self.n
                    ))
                })?;
                gen_arp(self.n, p0, ps)
            }
        }
    }

    pub fn build_decoder(&self) -> Result<Decoder> {
        Decoder::new(DecoderConfig {
            code: self.code.code(),
            perm: self.permutation()?,
            p: self.p,
            iterations: self.iterations,
            mode: self.mode,
            frac_bits: self.effective_frac_bits(),
            llr_mode: self.effective_llr_mode(),
            abr: self.abr_k.map(AbrConfig::new),
            exchange: match self.exchange {
                Exchange::Direct => ExchangeKind::Direct,
                Exchange::Noc(np) => ExchangeKind::Noc(np),
            },
        })
    }

    pub fn ber_options(&self) -> BerOptions {
        BerOptions {
            seed: self.seed,
            max_frames: self.max_frames,
            min_error_events: self.min_error_events,
        }
    }

    pub fn throughput_options(&self) -> Result<ThroughputOptions> {
        if self.snr_db.len() != 1 {
            return Err(Error::Config(format!(
                "throughput needs exactly one snr-db value, got {}",
                self.snr_db.len()
            )));
        }
        Ok(ThroughputOptions {
            seed: self.seed,
            frames: self.frames,
            snr_db: self.snr_db[0],
            f_clk_hz: self.f_clk_hz,
        })
    }
}

fn default_noc() -> NocParams {
    NocParams {
        kind: NocKind::Kautz,
        d: 2,
        policy: ArbPolicy::RoundRobin,
        rate: 1.0,
        fifo_cap: None,
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, want: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}: expected {want}")))
}
