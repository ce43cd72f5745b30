//! Constituent convolutional codes and their trellis representation.
//!
//! Two families are supported:
//!
//! * binary recursive systematic convolutional codes given by a feedback and
//!   a feedforward polynomial in the usual octal notation (MSB = tap on the
//!   current input), terminated by tail bits, e.g. the 8-state (13, 15) code;
//! * the 8-state double-binary circular RSC used by the IEEE 802.16 CTC,
//!   terminated by a circulation state.
//!
//! Both encoders are parallel concatenations of two identical constituent
//! encoders, the second fed with the permuted information sequence.

use crate::error::{Error, Result};

/// One trellis transition.
///
/// `sys` and `par` are lane bitmasks: bit `b` set means systematic (resp.
/// parity) lane `b` carries a one on this edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: u8,
    pub to: u8,
    /// Input symbol: the bit for binary codes, `(a << 1) | b` for double binary.
    pub sym: u8,
    pub sys: u8,
    pub par: u8,
}

/// Complete single-step trellis, shared by every trellis step.
#[derive(Debug, Clone)]
pub struct Trellis {
    pub states: usize,
    /// Number of input symbols (2 for binary, 4 for double binary).
    pub symbols: usize,
    pub sys_lanes: usize,
    pub par_lanes: usize,
    /// Edges sorted by `(from, sym)`; exactly `states * symbols` entries.
    pub edges: Vec<Edge>,
}

impl Trellis {
    /// Edges leaving `state`, in input-symbol order.
    pub fn from_state(&self, state: usize) -> &[Edge] {
        let k = self.symbols;
        &self.edges[state * k..(state + 1) * k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Recursive systematic binary code; polynomials in octal notation with
    /// the most significant bit as the current-input tap.
    BinaryRsc { feedback: u32, parity: u32 },
    /// The 8-state double-binary circular RSC of the IEEE 802.16 CTC.
    DuobinaryCrsc,
}

#[derive(Debug, Clone, Copy)]
pub struct Code {
    pub kind: CodeKind,
    pub memory: usize,
    pub states: usize,
    pub symbols: usize,
    pub sys_lanes: usize,
    pub par_lanes: usize,
}

impl Code {
    pub fn binary_rsc(feedback: u32, parity: u32) -> Result<Code> {
        if feedback < 0b11 {
            return Err(Error::InvalidPolynomial {
                poly: feedback,
                reason: "feedback polynomial needs at least one memory tap",
            });
        }
        if feedback & 1 == 0 {
            return Err(Error::InvalidPolynomial {
                poly: feedback,
                reason: "feedback polynomial must have its oldest tap set",
            });
        }
        let len = 32 - feedback.leading_zeros() as usize;
        if parity == 0 || (32 - parity.leading_zeros() as usize) > len {
            return Err(Error::InvalidPolynomial {
                poly: parity,
                reason: "parity polynomial longer than the feedback polynomial",
            });
        }
        let memory = len - 1;
        Ok(Code {
            kind: CodeKind::BinaryRsc { feedback, parity },
            memory,
            states: 1 << memory,
            symbols: 2,
            sys_lanes: 1,
            par_lanes: 1,
        })
    }

    /// The classic 8-state (13, 15) code.
    pub fn lte_rsc() -> Code {
        Code::binary_rsc(0o13, 0o15).expect("constants are valid")
    }

    pub fn wimax_ctc() -> Code {
        Code {
            kind: CodeKind::DuobinaryCrsc,
            memory: 3,
            states: 8,
            symbols: 4,
            sys_lanes: 2,
            par_lanes: 2,
        }
    }

    pub fn is_circular(&self) -> bool {
        matches!(self.kind, CodeKind::DuobinaryCrsc)
    }

    /// One encoder step: returns `(next_state, parity lane mask)`.
    ///
    /// For binary codes `sym` is the information bit; for double binary it is
    /// `(a << 1) | b`.
    pub fn step(&self, state: usize, sym: u8) -> (usize, u8) {
        match self.kind {
            CodeKind::BinaryRsc { feedback, parity } => {
                let m = self.memory;
                let fb = parity_of(((sym as u32) << m | state as u32) & feedback);
                let aug = (fb as u32) << m | state as u32;
                let out = parity_of(aug & parity);
                ((aug >> 1) as usize, out)
            }
            CodeKind::DuobinaryCrsc => {
                let (a, b) = ((sym >> 1) & 1, sym & 1);
                let (s1, s2, s3) = ((state >> 2) as u8 & 1, (state >> 1) as u8 & 1, state as u8 & 1);
                let w = a ^ b ^ s1 ^ s3;
                let y = w ^ s2 ^ s3;
                let v = w ^ s3;
                let next = ((w as usize) << 2) | (((s1 ^ b) as usize) << 1) | (s2 ^ b) as usize;
                (next, y | v << 1)
            }
        }
    }

    /// Tail input that drives the feedback to zero (binary codes only), so the
    /// register shifts towards the all-zero state.
    pub fn tail_bit(&self, state: usize) -> u8 {
        match self.kind {
            CodeKind::BinaryRsc { feedback, .. } => {
                let m = self.memory;
                // Choose the input making the feedback zero.
                parity_of((state as u32) & feedback & ((1 << m) - 1))
            }
            CodeKind::DuobinaryCrsc => unreachable!("circular codes have no tail"),
        }
    }

    pub fn trellis(&self) -> Trellis {
        let mut edges = Vec::with_capacity(self.states * self.symbols);
        for s in 0..self.states {
            for sym in 0..self.symbols as u8 {
                let (to, par) = self.step(s, sym);
                edges.push(Edge {
                    from: s as u8,
                    to: to as u8,
                    sym,
                    sys: sym,
                    par,
                });
            }
        }
        Trellis {
            states: self.states,
            symbols: self.symbols,
            sys_lanes: self.sys_lanes,
            par_lanes: self.par_lanes,
            edges,
        }
    }

    /// Circulation state: the start state that reproduces itself after
    /// encoding `n` symbols whose zero-input closure ends in `end_from_zero`.
    ///
    /// Uses the linearity of the state update: encoding from state `x` ends in
    /// `M^n x + end_from_zero`, so the circulation state solves
    /// `(I + M^n) x = end_from_zero` over GF(2).
    pub fn circulation_state(&self, n: usize, end_from_zero: usize) -> Result<usize> {
        let m_n = self.state_matrix_power(n);
        let mut solution = None;
        for x in 0..self.states {
            if apply_columns(&m_n, x) ^ x == end_from_zero {
                if solution.replace(x).is_some() {
                    return Err(Error::NoCirculationState { n });
                }
            }
        }
        solution.ok_or(Error::NoCirculationState { n })
    }

    /// Zero-input state-update matrix to the n-th power, stored column-wise.
    fn state_matrix_power(&self, n: usize) -> Vec<usize> {
        let m = self.memory;
        let mut acc: Vec<usize> = (0..m).map(|j| 1 << j).collect(); // identity
        let mut base: Vec<usize> = (0..m).map(|j| self.step(1 << j, 0).0).collect();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = compose(&base, &acc);
            }
            base = compose(&base, &base);
            e >>= 1;
        }
        acc
    }
}

fn parity_of(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// `b` applied first, then `a`, both column-wise GF(2) matrices.
fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&col| apply_columns(a, col)).collect()
}

fn apply_columns(m: &[usize], x: usize) -> usize {
    let mut y = 0;
    for (j, &col) in m.iter().enumerate() {
        if x >> j & 1 == 1 {
            y ^= col;
        }
    }
    y
}

/// Codeword of the binary parallel concatenation: systematic stream, one
/// parity stream per constituent, and per-constituent tail sections of
/// `(systematic, parity)` pairs.
#[derive(Debug, Clone)]
pub struct BinaryCodeword {
    pub sys: Vec<u8>,
    pub par1: Vec<u8>,
    pub par2: Vec<u8>,
    pub tail1: Vec<[u8; 2]>,
    pub tail2: Vec<[u8; 2]>,
}

/// Encode `info` with both constituents; `info2` is the already permuted
/// sequence fed to the second encoder.
pub fn encode_binary(code: &Code, info: &[u8], info2: &[u8]) -> BinaryCodeword {
    assert_eq!(info.len(), info2.len());
    let (par1, tail1) = encode_binary_one(code, info);
    let (par2, tail2) = encode_binary_one(code, info2);
    BinaryCodeword {
        sys: info.to_vec(),
        par1,
        par2,
        tail1,
        tail2,
    }
}

fn encode_binary_one(code: &Code, bits: &[u8]) -> (Vec<u8>, Vec<[u8; 2]>) {
    let mut state = 0;
    let mut par = Vec::with_capacity(bits.len());
    for &b in bits {
        let (next, p) = code.step(state, b);
        par.push(p);
        state = next;
    }
    let mut tail = Vec::with_capacity(code.memory);
    for _ in 0..code.memory {
        let b = code.tail_bit(state);
        let (next, p) = code.step(state, b);
        tail.push([b, p]);
        state = next;
    }
    debug_assert_eq!(state, 0);
    (par, tail)
}

/// Codeword of the double-binary parallel concatenation: systematic couples
/// plus one `(y, w)` parity couple per constituent and step.
#[derive(Debug, Clone)]
pub struct DuobinaryCodeword {
    pub sys: Vec<[u8; 2]>,
    pub par1: Vec<[u8; 2]>,
    pub par2: Vec<[u8; 2]>,
}

/// Encode couples with both circular constituents; `couples2` is the
/// permuted (and possibly intra-couple swapped) sequence of the second one.
pub fn encode_duobinary(
    code: &Code,
    couples: &[[u8; 2]],
    couples2: &[[u8; 2]],
) -> Result<DuobinaryCodeword> {
    assert_eq!(couples.len(), couples2.len());
    Ok(DuobinaryCodeword {
        sys: couples.to_vec(),
        par1: encode_duobinary_one(code, couples)?,
        par2: encode_duobinary_one(code, couples2)?,
    })
}

fn encode_duobinary_one(code: &Code, couples: &[[u8; 2]]) -> Result<Vec<[u8; 2]>> {
    let run = |start: usize, out: Option<&mut Vec<[u8; 2]>>| -> usize {
        let mut state = start;
        let mut sink = out;
        for c in couples {
            let sym = c[0] << 1 | c[1];
            let (next, p) = code.step(state, sym);
            if let Some(v) = sink.as_deref_mut() {
                v.push([p & 1, p >> 1]);
            }
            state = next;
        }
        state
    };
    let end = run(0, None);
    let start = code.circulation_state(couples.len(), end)?;
    let mut par = Vec::with_capacity(couples.len());
    let closed = run(start, Some(&mut par));
    debug_assert_eq!(closed, start);
    Ok(par)
}
