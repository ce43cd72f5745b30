//! The iterative parallel decoder: P SISO workers per constituent code,
//! extrinsic exchange (direct scatter or cycle-accurate network), adaptive
//! send suppression and the packed extrinsic representations.
//!
//! Dataflow per half iteration: every worker runs its trellis slice, the
//! fresh extrinsics pass the send criterion, survivors are packed and
//! scattered to the a-priori memory of the other constituent (the second
//! constituent reads and writes through the permutation). Functional values
//! and exchange timing are separated: cycle counts come from the network
//! simulation of exactly the surviving traffic.

use crate::abr::{self, AbrConfig};
use crate::codes::Code;
use crate::codes::Trellis;
use crate::error::{Error, Result};
use crate::interleave::{build_exchange_map, ExchangeMap, Permutation};
use crate::llr_codec::{bl_to_sl, pfp_decode, pfp_encode, sl_to_bl, Payload, SymbolLlr};
use crate::noc::{
    build_routing_table, gen_topology, run_exchange, ArbPolicy, NocConfig, NocKind, Packet,
    RoutingTable, Topology,
};
use crate::siso::{certain_state, DecodeMode, Siso, SliceIn};

/// How extrinsic values are represented on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LlrMode {
    /// One 8-bit LLR (binary codes).
    Scalar,
    /// Symbol level: the full triple.
    Sl,
    /// Bit level: two projected LLRs.
    Bl,
    /// Bit level with pseudo-floating-point mantissas.
    BlPfp { n_xi: u8 },
}

#[derive(Debug, Clone, Copy)]
pub struct NocParams {
    pub kind: NocKind,
    pub d: usize,
    pub policy: ArbPolicy,
    pub rate: f64,
    pub fifo_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub enum ExchangeKind {
    /// Functional scatter with no timing (cycle counts stay zero).
    Direct,
    Noc(NocParams),
}

#[derive(Debug, Clone)]
pub struct DecoderConfig {
    pub code: Code,
    pub perm: Permutation,
    pub p: usize,
    pub iterations: usize,
    pub mode: DecodeMode,
    pub frac_bits: u32,
    pub llr_mode: LlrMode,
    pub abr: Option<AbrConfig>,
    pub exchange: ExchangeKind,
}

/// Quantized channel LLRs, positive favoring bit/symbol one. Lane order
/// follows the trellis: for double binary, `sys[k] = [couple bit B, bit A]`
/// and `par[k] = [Y, W]`. Binary tails carry `[systematic, parity]` pairs.
#[derive(Debug, Clone)]
pub enum ChannelLlrs {
    Binary {
        sys: Vec<i8>,
        par1: Vec<i8>,
        par2: Vec<i8>,
        tail1: Vec<[i8; 2]>,
        tail2: Vec<[i8; 2]>,
    },
    Duobinary {
        sys: Vec<[i8; 2]>,
        par1: Vec<[i8; 2]>,
        par2: Vec<[i8; 2]>,
    },
}

#[derive(Debug, Clone)]
pub struct FrameResult {
    /// Binary codes: one bit per step. Double binary: one symbol (0..=3,
    /// couple (A<<1)|B) per step.
    pub decisions: Vec<u8>,
    /// Exchange cycles summed over iterations, first constituent's halves.
    pub cyc0: u64,
    /// Same for the second constituent's halves.
    pub cyc1: u64,
    pub sent: u64,
    pub suppressed: u64,
    pub net_fifo_max: usize,
}

#[derive(Debug)]
pub struct Decoder {
    cfg: DecoderConfig,
    trellis: Trellis,
    siso: Siso,
    /// Scatter maps: `[0]` carries first-constituent output into the second
    /// constituent's memory (through the inverse permutation), `[1]` the
    /// reverse direction (through the forward permutation).
    maps: [ExchangeMap; 2],
    net: Option<(Topology, RoutingTable, NocConfig)>,
    s: usize,
}

impl Decoder {
    pub fn new(cfg: DecoderConfig) -> Result<Decoder> {
        let n = cfg.perm.n;
        let binary = cfg.code.symbols == 2;
        match cfg.llr_mode {
            LlrMode::Scalar if !binary => {
                return Err(Error::Config(
                    "scalar extrinsics need a binary code".into(),
                ))
            }
            LlrMode::Sl | LlrMode::Bl | LlrMode::BlPfp { .. } if binary => {
                return Err(Error::Config(
                    "symbol extrinsic modes need a double-binary code".into(),
                ))
            }
            LlrMode::BlPfp { n_xi } if !(1..=7).contains(&n_xi) => {
                return Err(Error::Config(format!(
                    "mantissa width {n_xi} outside 1..=7"
                )))
            }
            _ => {}
        }
        if cfg.iterations == 0 {
            return Err(Error::Config("need at least one iteration".into()));
        }
        if !(1..=5).contains(&cfg.frac_bits) {
            return Err(Error::Config(format!(
                "fractional bits {} outside 1..=5",
                cfg.frac_bits
            )));
        }
        if let Some(a) = &cfg.abr {
            if a.k < 0 {
                return Err(Error::Config("send threshold must be non-negative".into()));
            }
        }
        let maps = [
            build_exchange_map(&cfg.perm.inv, cfg.p)?,
            build_exchange_map(&cfg.perm.fwd, cfg.p)?,
        ];
        let s = maps[0].s;
        if cfg.p > 1 && (cfg.p - 1) * s >= n {
            return Err(Error::Config(format!(
                "{} workers leave an empty slice on a frame of {n}",
                cfg.p
            )));
        }
        let net = match cfg.exchange {
            ExchangeKind::Direct => None,
            ExchangeKind::Noc(np) => {
                if !(np.rate > 0.0 && np.rate <= 1.0) {
                    return Err(Error::Config(format!(
                        "injection rate {} outside (0, 1]",
                        np.rate
                    )));
                }
                if np.fifo_cap == Some(0) {
                    return Err(Error::Config("FIFO capacity must be at least 1".into()));
                }
                let topo = gen_topology(np.kind, cfg.p, np.d)?;
                let table = build_routing_table(&topo);
                let noc_cfg = NocConfig {
                    policy: np.policy,
                    rate: np.rate,
                    fifo_cap: np.fifo_cap,
                };
                Some((topo, table, noc_cfg))
            }
        };
        let trellis = cfg.code.trellis();
        let siso = Siso::new(cfg.mode, cfg.frac_bits);
        Ok(Decoder {
            cfg,
            trellis,
            siso,
            maps,
            net,
            s,
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    /// Info steps handled by worker `i`, as a half-open range.
    fn slice_bounds(&self, i: usize) -> (usize, usize) {
        let lo = i * self.s;
        let hi = ((i + 1) * self.s).min(self.cfg.perm.n);
        (lo, hi)
    }

    fn pack(&self, v: &[i8]) -> Payload {
        match self.cfg.llr_mode {
            LlrMode::Scalar => Payload::Scalar(v[0]),
            LlrMode::Sl => Payload::Symbol(triple(v)),
            LlrMode::Bl => Payload::Bit(sl_to_bl(triple(v))),
            LlrMode::BlPfp { n_xi } => Payload::Pfp {
                word: pfp_encode(sl_to_bl(triple(v)), n_xi as u32),
                n_xi,
            },
        }
    }

    fn unpack(&self, p: Payload, out: &mut [i8]) {
        match p {
            Payload::Scalar(v) => out[0] = v,
            Payload::Symbol(s) => untriple(s, out),
            Payload::Bit(b) => untriple(bl_to_sl(b), out),
            Payload::Pfp { word, n_xi } => untriple(bl_to_sl(pfp_decode(word, n_xi as u32)), out),
        }
    }

    pub fn decode_frame(&self, ch: &ChannelLlrs) -> Result<FrameResult> {
        let n = self.cfg.perm.n;
        let t = &self.trellis;
        let q = t.symbols - 1;
        let (sl, pl) = (t.sys_lanes, t.par_lanes);
        let m_tail = if self.cfg.code.is_circular() {
            0
        } else {
            self.cfg.code.memory
        };
        let steps_all = n + m_tail;
        let p = self.cfg.p;

        // Lane-flattened channel inputs per constituent, tails appended.
        let mut sys = [vec![0i8; steps_all * sl], vec![0i8; steps_all * sl]];
        let mut par = [vec![0i8; steps_all * pl], vec![0i8; steps_all * pl]];
        match ch {
            ChannelLlrs::Binary {
                sys: s,
                par1,
                par2,
                tail1,
                tail2,
            } => {
                if self.cfg.code.symbols != 2 {
                    return Err(Error::Config("binary LLRs for a double-binary code".into()));
                }
                if s.len() != n
                    || par1.len() != n
                    || par2.len() != n
                    || tail1.len() != m_tail
                    || tail2.len() != m_tail
                {
                    return Err(Error::Config("channel LLR shape mismatch".into()));
                }
                sys[0][..n].copy_from_slice(s);
                par[0][..n].copy_from_slice(par1);
                par[1][..n].copy_from_slice(par2);
                for j in 0..n {
                    sys[1][j] = s[self.cfg.perm.fwd[j] as usize];
                }
                for (k, (ta, tb)) in tail1.iter().zip(tail2).enumerate() {
                    sys[0][n + k] = ta[0];
                    par[0][n + k] = ta[1];
                    sys[1][n + k] = tb[0];
                    par[1][n + k] = tb[1];
                }
            }
            ChannelLlrs::Duobinary {
                sys: s,
                par1,
                par2,
            } => {
                if self.cfg.code.symbols != 4 {
                    return Err(Error::Config("couple LLRs for a binary code".into()));
                }
                if s.len() != n || par1.len() != n || par2.len() != n {
                    return Err(Error::Config("channel LLR shape mismatch".into()));
                }
                for k in 0..n {
                    sys[0][2 * k] = s[k][0];
                    sys[0][2 * k + 1] = s[k][1];
                    par[0][2 * k] = par1[k][0];
                    par[0][2 * k + 1] = par1[k][1];
                    par[1][2 * k] = par2[k][0];
                    par[1][2 * k + 1] = par2[k][1];
                }
                for j in 0..n {
                    let k = self.cfg.perm.fwd[j] as usize;
                    let (lo, hi) = if self.cfg.perm.swap[j] {
                        (s[k][1], s[k][0])
                    } else {
                        (s[k][0], s[k][1])
                    };
                    sys[1][2 * j] = lo;
                    sys[1][2 * j + 1] = hi;
                }
            }
        }

        let states = t.states;
        let zero_metrics = vec![0i32; states];
        // Boundary metrics per constituent and worker, imported from the
        // neighbor's previous half iteration (next-iteration initialization).
        let mut alpha_in = [vec![zero_metrics.clone(); p], vec![zero_metrics.clone(); p]];
        let mut beta_in = alpha_in.clone();
        if !self.cfg.code.is_circular() {
            for c in 0..2 {
                alpha_in[c][0] = certain_state(states, 0);
                beta_in[c][p - 1] = certain_state(states, 0);
            }
        }

        // A-priori memories (tail region stays zero), latest first-constituent
        // extrinsics for the final decision, and delivery stamps.
        let mut apr = [vec![0i8; steps_all * q], vec![0i8; steps_all * q]];
        let mut ext_keep = vec![0i8; n * q];
        let mut ext_buf = vec![0i8; steps_all * q];
        let mut stamp = vec![0u32; n];
        let mut value = vec![0i8; q];
        // The send criterion compares each fresh extrinsic with the entry
        // the destination currently stores for that step: the last value
        // this constituent delivered (tracked after codec round trip, in
        // this constituent's step order). A step that never sent has no
        // baseline and always sends.
        let mut shadow = [vec![0i8; n * q], vec![0i8; n * q]];
        let mut shadow_valid = [vec![false; n], vec![false; n]];
        let guarded = self
            .cfg
            .abr
            .as_ref()
            .is_some_and(|a| abr::conservative(a.k, self.cfg.frac_bits));
        let settled = abr::settled_margin(self.cfg.frac_bits);

        let mut cyc = [0u64; 2];
        let (mut sent, mut suppressed) = (0u64, 0u64);
        let mut fifo_max = 0usize;

        for it in 0..self.cfg.iterations {
            for c in 0..2 {
                let epoch = (2 * it + c + 1) as u32;

                let mut alpha_next = alpha_in[c].clone();
                let mut beta_next = beta_in[c].clone();
                for i in 0..p {
                    let (lo, hi) = self.slice_bounds(i);
                    let hi_full = if i == p - 1 { hi + m_tail } else { hi };
                    let io = SliceIn {
                        steps: hi_full - lo,
                        sys: &sys[c][lo * sl..hi_full * sl],
                        par: &par[c][lo * pl..hi_full * pl],
                        apr: &apr[c][lo * q..hi_full * q],
                        init_alpha: &alpha_in[c][i],
                        init_beta: &beta_in[c][i],
                    };
                    let out = self.siso.run(t, &io);
                    ext_buf[lo * q..hi_full * q].copy_from_slice(&out.ext);
                    if i + 1 < p {
                        alpha_next[i + 1] = out.alpha_out;
                    }
                    if i > 0 {
                        beta_next[i - 1] = out.beta_out;
                    }
                }
                alpha_in[c] = alpha_next;
                beta_in[c] = beta_next;
                if c == 0 {
                    ext_keep.copy_from_slice(&ext_buf[..n * q]);
                }

                // Send decisions over the info steps of this constituent.
                let apr_dst = {
                    let [a0, a1] = &mut apr;
                    if c == 0 {
                        a1
                    } else {
                        a0
                    }
                };
                let dests = &self.maps[c].dest;
                let swap = &self.cfg.perm.swap;
                let sh = &mut shadow[c];
                let shv = &mut shadow_valid[c];

                let mut offers: Vec<Option<Payload>> = Vec::with_capacity(n);
                for g in 0..n {
                    let ext_g = &ext_buf[g * q..(g + 1) * q];
                    let base = &sh[g * q..(g + 1) * q];
                    let moved = !shv[g]
                        || match &self.cfg.abr {
                            None => true,
                            Some(a) if q == 1 => abr::binary_send(ext_g[0], base[0], a),
                            Some(a) => abr::symbol_send(triple(ext_g), triple(base), a),
                        };
                    // Under a conservative threshold a stable step may rest
                    // only once its decision is settled; aggressive
                    // thresholds suppress on stability alone.
                    let send =
                        moved || (guarded && abr::decision_margin(ext_g) < settled);
                    if !send {
                        suppressed += 1;
                        offers.push(None);
                        continue;
                    }
                    sent += 1;
                    value.copy_from_slice(ext_g);
                    if c == 1 && q == 3 && swap[g] {
                        value.swap(0, 1);
                    }
                    let payload = self.pack(&value);
                    offers.push(Some(payload));
                    // Record what the destination will hold after decoding
                    // the payload, mapped back to this constituent's step
                    // order, so the next comparison sees the real entry.
                    self.unpack(payload, &mut value);
                    if c == 1 && q == 3 && swap[g] {
                        value.swap(0, 1);
                    }
                    sh[g * q..(g + 1) * q].copy_from_slice(&value);
                    shv[g] = true;
                }

                let mut commit = |node: u32, addr: u32, payload: Payload| -> Result<()> {
                    let pos = node as usize * self.s + addr as usize;
                    debug_assert!(pos < n);
                    if stamp[pos] == epoch {
                        return Err(Error::DuplicateDelivery {
                            node: node as usize,
                            addr: addr as usize,
                        });
                    }
                    stamp[pos] = epoch;
                    self.unpack(payload, &mut value);
                    if c == 0 && q == 3 && swap[pos] {
                        value.swap(0, 1);
                    }
                    apr_dst[pos * q..(pos + 1) * q].copy_from_slice(&value);
                    Ok(())
                };

                match &self.net {
                    None => {
                        for (g, offer) in offers.iter().enumerate() {
                            if let Some(payload) = offer {
                                let (node, addr) = dests[g];
                                commit(node, addr, *payload)?;
                            }
                        }
                    }
                    Some((topo, table, noc_cfg)) => {
                        let mut traffic: Vec<Vec<Option<Packet>>> = Vec::with_capacity(p);
                        for i in 0..p {
                            let (lo, hi) = self.slice_bounds(i);
                            traffic.push(
                                (lo..hi)
                                    .map(|g| {
                                        offers[g].map(|payload| {
                                            let (node, addr) = dests[g];
                                            Packet {
                                                src: i as u32,
                                                dest: node,
                                                addr,
                                                payload,
                                            }
                                        })
                                    })
                                    .collect(),
                            );
                        }
                        let out = run_exchange(topo, table, noc_cfg, &traffic)?;
                        cyc[c] += out.stats.cycles;
                        fifo_max = fifo_max.max(out.stats.net_fifo_max);
                        for dv in out.deliveries {
                            commit(dv.node, dv.addr, dv.payload)?;
                        }
                    }
                }
            }
        }

        // A-posteriori decision per step: systematic channel contribution
        // plus the refreshed a-priori plus the first constituent's last
        // extrinsic; ties fall to the lowest symbol.
        let mut decisions = vec![0u8; n];
        for k in 0..n {
            let mut best_sym = 0u8;
            let mut best = 0i32;
            for u in 1..t.symbols as u8 {
                let mut metric =
                    apr[0][k * q + u as usize - 1] as i32 + ext_keep[k * q + u as usize - 1] as i32;
                for b in 0..sl {
                    if u >> b & 1 == 1 {
                        metric += sys[0][k * sl + b] as i32;
                    }
                }
                if metric > best {
                    best = metric;
                    best_sym = u;
                }
            }
            decisions[k] = best_sym;
        }

        Ok(FrameResult {
            decisions,
            cyc0: cyc[0],
            cyc1: cyc[1],
            sent,
            suppressed,
            net_fifo_max: fifo_max,
        })
    }
}

fn triple(v: &[i8]) -> SymbolLlr {
    SymbolLlr {
        lam01: v[0],
        lam10: v[1],
        lam11: v[2],
    }
}

fn untriple(s: SymbolLlr, out: &mut [i8]) {
    out[0] = s.lam01;
    out[1] = s.lam10;
    out[2] = s.lam11;
}
