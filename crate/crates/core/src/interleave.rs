//! Permutations between the two constituent decoders and the mapping of
//! permuted positions onto processing elements.

use crate::error::{Error, Result};
use std::path::Path;

/// A bijection over `0..n` at trellis-step granularity (bits for binary
/// codes, couples for double-binary codes).
///
/// `fwd[k]` is the source position read at permuted position `k`. For the
/// double-binary code, `swap[k]` marks permuted positions whose couple is
/// exchanged before entering the second encoder; it is all-false for the
/// other constructions.
#[derive(Debug, Clone)]
pub struct Permutation {
    pub n: usize,
    pub fwd: Vec<u32>,
    pub inv: Vec<u32>,
    pub swap: Vec<bool>,
}

impl Permutation {
    fn from_fwd(fwd: Vec<u32>, swap: Vec<bool>) -> Result<Permutation> {
        let n = fwd.len();
        let mut inv = vec![u32::MAX; n];
        for (k, &src) in fwd.iter().enumerate() {
            if src as usize >= n {
                return Err(Error::NonBijective {
                    index: k,
                    reason: "maps out of range",
                });
            }
            if inv[src as usize] != u32::MAX {
                return Err(Error::NonBijective {
                    index: k,
                    reason: "collides with an earlier index",
                });
            }
            inv[src as usize] = k as u32;
        }
        Ok(Permutation { n, fwd, inv, swap })
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation {
            n,
            fwd: (0..n as u32).collect(),
            inv: (0..n as u32).collect(),
            swap: vec![false; n],
        }
    }
}

/// Quadratic permutation `fwd[k] = (f1*k + f2*k^2) mod n`.
pub fn gen_qpp(n: usize, f1: u64, f2: u64) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::Config("permutation length must be positive".into()));
    }
    let m = n as u64;
    let fwd = (0..n as u64)
        .map(|k| (((f1 % m) * (k % m) + (f2 % m) * (k * k % m)) % m) as u32)
        .collect();
    Permutation::from_fwd(fwd, vec![false; n])
}

/// Known quadratic coefficient pairs, by block length.
pub fn qpp_preset(n: usize) -> Option<(u64, u64)> {
    match n {
        40 => Some((3, 10)),
        48 => Some((7, 12)),
        64 => Some((7, 16)),
        96 => Some((11, 24)),
        128 => Some((15, 32)),
        5120 => Some((39, 80)),
        6144 => Some((263, 480)),
        _ => None,
    }
}

/// IEEE 802.16 CTC interleaver parameters `(p0, p1, p2, p3)`, by couple count.
pub fn arp_preset(n: usize) -> Option<(u64, [u64; 3])> {
    let (p0, p1, p2, p3) = match n {
        24 => (5, 0, 0, 0),
        36 => (11, 18, 0, 18),
        48 => (13, 24, 0, 24),
        72 => (11, 6, 0, 6),
        96 => (7, 48, 24, 72),
        108 => (11, 54, 56, 2),
        120 => (13, 60, 0, 60),
        144 => (17, 74, 72, 2),
        180 => (11, 90, 0, 90),
        192 => (11, 96, 48, 144),
        216 => (13, 108, 0, 108),
        240 => (13, 120, 60, 180),
        480 => (53, 62, 12, 2),
        960 => (43, 64, 300, 824),
        1440 => (43, 720, 360, 540),
        1920 => (31, 8, 24, 16),
        2400 => (53, 66, 24, 2),
        _ => return None,
    };
    Some((p0, [p1, p2, p3]))
}

/// Almost regular permutation over couples, with the standard's two steps:
/// couples at even permuted positions are read swapped, and addresses follow
/// `p0*j + 1` plus one of four offsets selected by `j mod 4`.
pub fn gen_arp(n: usize, p0: u64, p: [u64; 3]) -> Result<Permutation> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::Config(format!(
            "couple count {n} must be a positive multiple of 4"
        )));
    }
    let m = n as u64;
    let offset = [1, 1 + m / 2 + p[0], 1 + p[1], 1 + m / 2 + p[2]];
    let fwd: Vec<u32> = (0..n as u64)
        .map(|j| ((p0 % m * (j % m) + offset[(j % 4) as usize]) % m) as u32)
        .collect();
    let swap = (0..n).map(|j| j % 2 == 0).collect();
    Permutation::from_fwd(fwd, swap)
}

/// Load a permutation from its text form: first line `n`, then `n` lines each
/// holding one 0-based source index.
pub fn load_permutation(path: &Path) -> Result<Permutation> {
    parse_permutation(&std::fs::read_to_string(path)?)
}

pub fn parse_permutation(text: &str) -> Result<Permutation> {
    if text.starts_with('\u{feff}') {
        return Err(Error::PermFile {
            line: 1,
            reason: "file starts with a byte-order mark".into(),
        });
    }
    let mut lines = text.split('\n').enumerate();
    let (_, first) = lines.next().ok_or_else(|| Error::PermFile {
        line: 1,
        reason: "empty file".into(),
    })?;
    let n: usize = parse_entry(first, 1)?;
    let mut fwd = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.is_empty() {
            // Sole trailing newline is fine; anything else is corruption.
            if fwd.len() == n && idx == count_lines(text) - 1 {
                continue;
            }
            return Err(Error::PermFile {
                line: line_no,
                reason: "blank line".into(),
            });
        }
        if fwd.len() == n {
            return Err(Error::PermFile {
                line: line_no,
                reason: format!("more than {n} entries"),
            });
        }
        fwd.push(parse_entry(trimmed, line_no)? as u32);
    }
    if fwd.len() != n {
        return Err(Error::PermFile {
            line: count_lines(text),
            reason: format!("expected {n} entries, found {}", fwd.len()),
        });
    }
    let len = fwd.len();
    Permutation::from_fwd(fwd, vec![false; len]).map_err(|e| match e {
        Error::NonBijective { index, reason } => Error::PermFile {
            line: index + 2,
            reason: format!("entry {reason}"),
        },
        other => other,
    })
}

fn count_lines(text: &str) -> usize {
    text.split('\n').count()
}

fn parse_entry(s: &str, line: usize) -> Result<usize> {
    s.trim_end_matches('\r')
        .parse::<usize>()
        .map_err(|_| Error::PermFile {
            line,
            reason: format!("not an unsigned integer: {s:?}"),
        })
}

/// Where each locally produced extrinsic value must be written on the other
/// side of the exchange.
///
/// With `s = ceil(n / p)`, the value produced for global step `k` lands at
/// processing element `theta(k) / s`, local address `theta(k) mod s`.
#[derive(Debug, Clone)]
pub struct ExchangeMap {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    /// Per source global index: `(destination node, destination address)`.
    pub dest: Vec<(u32, u32)>,
}

pub fn build_exchange_map(theta: &[u32], p: usize) -> Result<ExchangeMap> {
    let n = theta.len();
    if p == 0 || p > n {
        return Err(Error::Config(format!(
            "node count {p} must be in 1..={n}"
        )));
    }
    let s = n.div_ceil(p);
    let dest = theta
        .iter()
        .map(|&m| ((m as usize / s) as u32, (m as usize % s) as u32))
        .collect();
    Ok(ExchangeMap { n, p, s, dest })
}

impl ExchangeMap {
    /// Number of trellis steps handled by node `i`.
    pub fn slice_len(&self, i: usize) -> usize {
        let lo = i * self.s;
        let hi = self.n.min(lo + self.s);
        hi.saturating_sub(lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qpp_small_values() {
        let p = gen_qpp(40, 3, 10).unwrap();
        assert_eq!(p.fwd[0], 0);
        assert_eq!(p.fwd[1], 13);
    }

    #[test]
    fn qpp_lte_sizes_are_bijective() {
        for n in [40usize, 5120, 6144] {
            let (f1, f2) = qpp_preset(n).unwrap();
            let p = gen_qpp(n, f1, f2).unwrap();
            let mut seen = vec![false; n];
            for &v in &p.fwd {
                assert!(!std::mem::replace(&mut seen[v as usize], true));
            }
            for k in 0..n {
                assert_eq!(p.fwd[p.inv[k] as usize] as usize, k);
            }
        }
    }

    #[test]
    fn qpp_rejects_non_bijective_coefficients() {
        // f1 sharing a factor with n breaks bijectivity.
        assert!(matches!(
            gen_qpp(40, 4, 0),
            Err(Error::NonBijective { .. })
        ));
    }

    #[test]
    fn arp_wimax_sizes_are_bijective() {
        for n in [24usize, 96, 240, 960, 1920, 2400] {
            let (p0, p) = arp_preset(n).unwrap();
            let perm = gen_arp(n, p0, p).unwrap();
            let mut seen = vec![false; n];
            for &v in &perm.fwd {
                assert!(!std::mem::replace(&mut seen[v as usize], true), "n = {n}");
            }
        }
    }

    #[test]
    fn arp_swap_alternates_with_position() {
        let (p0, p) = arp_preset(1920).unwrap();
        let perm = gen_arp(1920, p0, p).unwrap();
        for j in 0..perm.n {
            assert_eq!(perm.swap[j], j % 2 == 0);
        }
    }

    #[test]
    fn arp_rejects_bad_lengths() {
        assert!(gen_arp(30, 7, [0, 0, 0]).is_err());
        assert!(gen_arp(0, 7, [0, 0, 0]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        let text = "4\n2\n0\n3\n1\n";
        let p = parse_permutation(text).unwrap();
        assert_eq!(p.fwd, vec![2, 0, 3, 1]);
        assert_eq!(p.inv, vec![1, 3, 0, 2]);
    }

    #[test]
    fn parse_rejects_corruption_with_line_numbers() {
        let dupe = parse_permutation("3\n1\n1\n2\n").unwrap_err();
        assert!(matches!(dupe, Error::PermFile { line: 3, .. }), "{dupe}");

        let blank = parse_permutation("3\n1\n\n2\n0\n").unwrap_err();
        assert!(matches!(blank, Error::PermFile { line: 3, .. }), "{blank}");

        let bom = parse_permutation("\u{feff}3\n0\n1\n2\n").unwrap_err();
        assert!(matches!(bom, Error::PermFile { line: 1, .. }), "{bom}");

        let range = parse_permutation("3\n0\n1\n7\n").unwrap_err();
        assert!(matches!(range, Error::PermFile { line: 4, .. }), "{range}");

        let short = parse_permutation("3\n0\n1\n").unwrap_err();
        assert!(matches!(short, Error::PermFile { .. }), "{short}");
    }

    #[test]
    fn exchange_map_identity_and_permuted() {
        let id = Permutation::identity(16);
        let m = build_exchange_map(&id.fwd, 4).unwrap();
        assert_eq!(m.s, 4);
        assert_eq!(m.dest[1 * 4 + 1], (1, 1));

        let mut theta = id.fwd.clone();
        theta[5] = 14;
        theta[14] = 5;
        let m = build_exchange_map(&theta, 4).unwrap();
        assert_eq!(m.dest[5], (3, 2));
    }

    #[test]
    fn exchange_map_uneven_last_slice() {
        // n = 10, p = 4 -> s = 3, last slice has a single step.
        let id = Permutation::identity(10);
        let m = build_exchange_map(&id.fwd, 4).unwrap();
        assert_eq!(m.s, 3);
        assert_eq!(m.slice_len(3), 1);
        assert_eq!(m.dest[9], (3, 0));
    }

    #[test]
    fn exchange_map_rejects_bad_node_count() {
        let id = Permutation::identity(8);
        assert!(build_exchange_map(&id.fwd, 0).is_err());
        assert!(build_exchange_map(&id.fwd, 9).is_err());
    }

    proptest! {
        #[test]
        fn exchange_map_is_injective(n in 1usize..400, p in 1usize..64, seed in 0u64..1000) {
            prop_assume!(p <= n);
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let mut theta: Vec<u32> = (0..n as u32).collect();
            theta.shuffle(&mut rng);
            let m = build_exchange_map(&theta, p).unwrap();
            let mut seen = std::collections::HashSet::new();
            for &(d, t) in &m.dest {
                prop_assert!((t as usize) < m.slice_len(d as usize));
                prop_assert!(seen.insert((d, t)));
            }
        }

        #[test]
        fn permutation_round_trip(n in 1usize..300, seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let mut fwd: Vec<u32> = (0..n as u32).collect();
            fwd.shuffle(&mut rng);
            let p = Permutation::from_fwd(fwd, vec![false; n]).unwrap();
            for k in 0..n {
                prop_assert_eq!(p.inv[p.fwd[k] as usize] as usize, k);
                prop_assert_eq!(p.fwd[p.inv[k] as usize] as usize, k);
            }
        }
    }
}
