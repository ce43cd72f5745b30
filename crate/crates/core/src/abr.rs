//! Adaptive bandwidth reduction: decide per trellis step whether the freshly
//! computed extrinsic value is different enough from the value the
//! destination already holds (the last extrinsic this constituent delivered
//! for the step) to be worth sending. Suppressed steps leave the receiver's
//! previous a-priori entry in place.
//!
//! Two regimes share the threshold `k`. While `k` stays conservative
//! (at most 1.5 natural LLR units), a stable step may rest only once its
//! decision margin is decisively settled, so marginal bits keep flowing
//! even when they wander slowly. Beyond that, the caller has chosen
//! bandwidth over fidelity and stability alone suppresses.

use crate::llr_codec::SymbolLlr;

/// Decision margin, in natural LLR units, beyond which a value counts as
/// settled under a conservative threshold: the leading hypothesis must be
/// `e^10` times more likely than the runner-up before its step may rest.
const SETTLED_MARGIN_NAT: i32 = 10;

/// Largest threshold, in halves of a natural LLR unit, that still runs in
/// the guarded regime.
const CONSERVATIVE_LIMIT_HALF_NAT: i32 = 3;

/// Scale the settled-margin bound onto the quantization grid.
pub fn settled_margin(frac_bits: u32) -> i32 {
    SETTLED_MARGIN_NAT << frac_bits
}

/// Whether threshold `k` (in quantization steps) runs in the guarded
/// regime for the given grid.
pub fn conservative(k: i32, frac_bits: u32) -> bool {
    2 * k <= CONSERVATIVE_LIMIT_HALF_NAT << frac_bits
}

/// Margin between the best and second-best symbol hypothesis of one
/// extrinsic entry. The stored offsets are scores relative to the
/// reference symbol, whose own score is zero; for a binary entry this
/// reduces to `|ext|`.
pub fn decision_margin(ext: &[i8]) -> i32 {
    let mut top = 0i32;
    let mut second = i32::MIN;
    for &v in ext {
        let v = v as i32;
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
    }
    top - second
}

#[derive(Debug, Clone, Copy)]
pub struct AbrConfig {
    /// Threshold in LLR quantization steps; 0 sends everything.
    pub k: i32,
    /// Include the implicit zero LLR of the reference symbol in the
    /// two-largest-metrics scan of the symbol criterion.
    pub include_reference: bool,
}

impl AbrConfig {
    pub fn new(k: i32) -> AbrConfig {
        AbrConfig {
            k,
            include_reference: true,
        }
    }
}

/// Binary criterion: send when `|ext - apr| >= k`.
pub fn binary_send(ext: i8, apr: i8, cfg: &AbrConfig) -> bool {
    (ext as i32 - apr as i32).abs() >= cfg.k
}

/// Gap between the largest and second largest of the four symbol metrics
/// (three stored LLRs plus the implicit zero of the reference symbol).
fn top_two_gap(s: SymbolLlr, include_reference: bool) -> i32 {
    let mut top = i32::MIN;
    let mut second = i32::MIN;
    let vals = [s.lam01 as i32, s.lam10 as i32, s.lam11 as i32];
    let all = [0, vals[0], vals[1], vals[2]];
    let slice = if include_reference { &all[..] } else { &all[1..] };
    for &v in slice {
        if v > top {
            second = top;
            top = v;
        } else if v > second {
            second = v;
        }
    }
    top - second
}

/// Symbol criterion: compare the decision-confidence gaps of the new
/// extrinsic and of the stored a-priori; send when they differ by `k` or
/// more.
pub fn symbol_send(ext: SymbolLlr, apr: SymbolLlr, cfg: &AbrConfig) -> bool {
    let d_ext = top_two_gap(ext, cfg.include_reference);
    let d_apr = top_two_gap(apr, cfg.include_reference);
    (d_ext - d_apr).abs() >= cfg.k
}
