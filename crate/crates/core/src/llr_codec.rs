//! Representations of the exchanged extrinsic values.
//!
//! Double-binary extrinsics are natively symbol-level: three LLRs per couple
//! against the `00` reference. They can travel in compressed forms, either as
//! two bit-level LLRs or, further, as a pseudo-floating-point word that drops
//! sign-extension bits shared by both components.

pub const LLR_BITS: u32 = 8;

/// Symbol-level LLRs of one couple against the all-zero couple; `lam10` is
/// the couple `a = 1, b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymbolLlr {
    pub lam01: i8,
    pub lam10: i8,
    pub lam11: i8,
}

impl SymbolLlr {
    pub fn get(&self, sym: u8) -> i32 {
        match sym {
            0 => 0,
            1 => self.lam01 as i32,
            2 => self.lam10 as i32,
            3 => self.lam11 as i32,
            _ => unreachable!(),
        }
    }

    /// Exchange the roles of the two bits (`01` and `10` trade places).
    pub fn swapped(&self) -> SymbolLlr {
        SymbolLlr {
            lam01: self.lam10,
            lam10: self.lam01,
            lam11: self.lam11,
        }
    }
}

/// Bit-level LLRs of the two bits of a couple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BitLlr {
    pub a: i8,
    pub b: i8,
}

/// Pseudo-floating-point compression of a [`BitLlr`]: both mantissas share
/// one exponent, the number of sign-extension bits stripped from each
/// component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PfpWord {
    pub xi_a: i8,
    pub xi_b: i8,
    pub sigma: u8,
}

fn sat8(x: i32) -> i8 {
    x.clamp(i8::MIN as i32, i8::MAX as i32) as i8
}

/// Project symbol-level LLRs onto the two bits:
/// `a = max(lam10, lam11) - max(0, lam01)` and symmetrically for `b`.
pub fn sl_to_bl(s: SymbolLlr) -> BitLlr {
    let (l01, l10, l11) = (s.lam01 as i32, s.lam10 as i32, s.lam11 as i32);
    BitLlr {
        a: sat8(l10.max(l11) - 0.max(l01)),
        b: sat8(l01.max(l11) - 0.max(l10)),
    }
}

/// Rebuild symbol-level LLRs from two bit-level LLRs, by sign quadrant.
pub fn bl_to_sl(l: BitLlr) -> SymbolLlr {
    let (a, b) = (l.a as i32, l.b as i32);
    let mu = a.max(b);
    let (l10, l01, l11) = match (a >= 0, b >= 0) {
        (true, true) => (mu - b, mu - a, mu),
        (true, false) => (a, 0, a + b),
        (false, true) => (0, b, a + b),
        (false, false) => (a, b, a + b - mu),
    };
    SymbolLlr {
        lam01: sat8(l01),
        lam10: sat8(l10),
        lam11: sat8(l11),
    }
}

/// Count of redundant sign bits: leading bits equal to the sign bit, minus
/// the sign bit itself.
fn redundancy(x: i8) -> u32 {
    let u = x as u8;
    let probe = if u & 0x80 == 0 { u } else { !u };
    // `probe` has its leading run of sign-equal bits as zeros.
    (probe.leading_zeros().min(8)) - 1
}

/// Exponent width needed to encode `0..=LLR_BITS - n_xi`.
pub fn sigma_bits(n_xi: u32) -> u32 {
    let max_sigma = LLR_BITS - n_xi;
    32 - max_sigma.leading_zeros()
}

/// Transmitted payload width in bits for a pseudo-floating-point word.
pub fn pfp_width(n_xi: u32) -> u32 {
    2 * n_xi + sigma_bits(n_xi)
}

/// Compress to `n_xi`-bit mantissas with a shared exponent.
pub fn pfp_encode(l: BitLlr, n_xi: u32) -> PfpWord {
    assert!((1..LLR_BITS).contains(&n_xi));
    let cap = LLR_BITS - n_xi;
    let sigma = redundancy(l.a).min(cap).min(redundancy(l.b).min(cap));
    let shift = cap - sigma;
    PfpWord {
        xi_a: l.a >> shift,
        xi_b: l.b >> shift,
        sigma: sigma as u8,
    }
}

pub fn pfp_decode(w: PfpWord, n_xi: u32) -> BitLlr {
    let shift = LLR_BITS - n_xi - w.sigma as u32;
    BitLlr {
        a: ((w.xi_a as i32) << shift) as i8,
        b: ((w.xi_b as i32) << shift) as i8,
    }
}

/// Everything a packet can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    /// A binary extrinsic LLR.
    Scalar(i8),
    Symbol(SymbolLlr),
    Bit(BitLlr),
    Pfp { word: PfpWord, n_xi: u8 },
}

impl Payload {
    pub fn width_bits(&self) -> u32 {
        match self {
            Payload::Scalar(_) => LLR_BITS,
            Payload::Symbol(_) => 3 * LLR_BITS,
            Payload::Bit(_) => 2 * LLR_BITS,
            Payload::Pfp { n_xi, .. } => pfp_width(*n_xi as u32),
        }
    }
}
