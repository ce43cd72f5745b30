//! Fixed-point soft-input soft-output decoding of one trellis slice.
//!
//! All LLRs live on the intrinsic quantization grid (`frac_bits` fractional
//! bits); positive values favor the symbol/bit value one. Path metrics are
//! kept on 16 bits by subtracting the per-step maximum, and the max* of the
//! full log-MAP mode adds a small correction table addressed by `|a - b|`.
//!
//! The extrinsic output for symbol `u` against the reference symbol `0` is
//! the difference of the two combined edge metrics
//! `alpha[from] + gamma_ext + beta[to]`, where `gamma_ext` keeps only the
//! parity contribution, so neither the a-priori value nor the systematic
//! channel LLR of the step leaks back into what is exchanged.

use crate::codes::Trellis;

/// Lowest representable path metric (16-bit internal width).
pub const METRIC_FLOOR: i32 = i16::MIN as i32;
const METRIC_CEIL: i32 = i16::MAX as i32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    MaxLog,
    LogMap,
}

#[derive(Debug, Clone)]
pub struct Siso {
    pub mode: DecodeMode,
    pub frac_bits: u32,
    lut: [i32; 8],
}

/// Inputs for one slice pass. `sys` and `par` hold one entry per step and
/// lane; `apr` one entry per step and nonzero symbol. `init_alpha` and
/// `init_beta` are normalized boundary metrics (all zero meaning no
/// knowledge).
pub struct SliceIn<'a> {
    pub steps: usize,
    pub sys: &'a [i8],
    pub par: &'a [i8],
    pub apr: &'a [i8],
    pub init_alpha: &'a [i32],
    pub init_beta: &'a [i32],
}

#[derive(Debug, Clone)]
pub struct SliceOut {
    /// Saturated extrinsic LLRs, one entry per step and nonzero symbol.
    pub ext: Vec<i8>,
    /// Normalized forward metrics after the last step.
    pub alpha_out: Vec<i32>,
    /// Normalized backward metrics before the first step.
    pub beta_out: Vec<i32>,
}

impl Siso {
    pub fn new(mode: DecodeMode, frac_bits: u32) -> Siso {
        let scale = (1u32 << frac_bits) as f64;
        let mut lut = [0i32; 8];
        for (i, v) in lut.iter_mut().enumerate() {
            *v = ((1.0 + (-(i as f64) / scale).exp()).ln() * scale).round() as i32;
        }
        Siso { mode, frac_bits, lut }
    }

    /// max(a, b), plus the correction term in log-MAP mode. Values beyond the
    /// table carry no correction. Saturates at the internal metric width.
    #[inline]
    pub fn max_star(&self, a: i32, b: i32) -> i32 {
        let m = a.max(b);
        let corrected = match self.mode {
            DecodeMode::MaxLog => m,
            DecodeMode::LogMap => {
                let d = (a - b).unsigned_abs() as usize;
                if d < self.lut.len() {
                    m + self.lut[d]
                } else {
                    m
                }
            }
        };
        corrected.clamp(METRIC_FLOOR, METRIC_CEIL)
    }

    #[inline]
    fn fold(&self, acc: i32, v: i32) -> i32 {
        if acc == i32::MIN {
            v
        } else {
            self.max_star(acc, v)
        }
    }

    /// Branch metric: a-priori of the edge symbol plus the channel LLRs of
    /// the systematic and parity lanes carrying ones.
    #[inline]
    pub fn gamma(sys_mask: u8, par_mask: u8, sym: u8, sys: &[i8], par: &[i8], apr: &[i8]) -> i32 {
        let mut g = if sym == 0 { 0 } else { apr[sym as usize - 1] as i32 };
        for (b, &l) in sys.iter().enumerate() {
            if sys_mask >> b & 1 == 1 {
                g += l as i32;
            }
        }
        for (b, &l) in par.iter().enumerate() {
            if par_mask >> b & 1 == 1 {
                g += l as i32;
            }
        }
        g
    }

    /// Parity-only part of the branch metric.
    #[inline]
    pub fn gamma_ext(par_mask: u8, par: &[i8]) -> i32 {
        let mut g = 0;
        for (b, &l) in par.iter().enumerate() {
            if par_mask >> b & 1 == 1 {
                g += l as i32;
            }
        }
        g
    }

    /// One forward step over `gammas` (one entry per trellis edge), writing
    /// normalized metrics into `out`.
    pub fn forward_step(&self, t: &Trellis, alpha: &[i32], gammas: &[i32], out: &mut [i32]) {
        out.fill(i32::MIN);
        for (e, &g) in t.edges.iter().zip(gammas) {
            let cand = alpha[e.from as usize] + g;
            out[e.to as usize] = self.fold(out[e.to as usize], cand);
        }
        normalize(out);
    }

    /// One backward step: `beta` holds metrics after the step, `out` gets the
    /// normalized metrics before it.
    pub fn backward_step(&self, t: &Trellis, beta: &[i32], gammas: &[i32], out: &mut [i32]) {
        out.fill(i32::MIN);
        for (e, &g) in t.edges.iter().zip(gammas) {
            let cand = beta[e.to as usize] + g;
            out[e.from as usize] = self.fold(out[e.from as usize], cand);
        }
        normalize(out);
    }

    /// Extrinsic LLRs of one step from the surrounding metrics and the
    /// parity-only branch metrics, saturated to the exchanged width.
    pub fn extrinsic(
        &self,
        t: &Trellis,
        alpha: &[i32],
        beta: &[i32],
        gammas_ext: &[i32],
        out: &mut [i8],
    ) {
        let mut m = [i32::MIN; 4];
        for (e, &g) in t.edges.iter().zip(gammas_ext) {
            let v = alpha[e.from as usize] + g + beta[e.to as usize];
            m[e.sym as usize] = self.fold(m[e.sym as usize], v);
        }
        for u in 1..t.symbols {
            out[u - 1] = (m[u] - m[0]).clamp(i8::MIN as i32, i8::MAX as i32) as i8;
        }
    }

    /// Full slice pass: forward sweep, then a fused backward/output sweep.
    pub fn run(&self, t: &Trellis, io: &SliceIn) -> SliceOut {
        let states = t.states;
        let n_edges = t.edges.len();
        let ext_stride = t.symbols - 1;
        debug_assert_eq!(io.sys.len(), io.steps * t.sys_lanes);
        debug_assert_eq!(io.par.len(), io.steps * t.par_lanes);
        debug_assert_eq!(io.apr.len(), io.steps * ext_stride);

        let mut gammas = vec![0i32; io.steps * n_edges];
        for k in 0..io.steps {
            let sys = &io.sys[k * t.sys_lanes..(k + 1) * t.sys_lanes];
            let par = &io.par[k * t.par_lanes..(k + 1) * t.par_lanes];
            let apr = &io.apr[k * ext_stride..(k + 1) * ext_stride];
            for (i, e) in t.edges.iter().enumerate() {
                gammas[k * n_edges + i] = Self::gamma(e.sys, e.par, e.sym, sys, par, apr);
            }
        }

        let mut alpha = vec![0i32; (io.steps + 1) * states];
        alpha[..states].copy_from_slice(io.init_alpha);
        for k in 0..io.steps {
            let (head, tail) = alpha.split_at_mut((k + 1) * states);
            self.forward_step(
                t,
                &head[k * states..],
                &gammas[k * n_edges..(k + 1) * n_edges],
                &mut tail[..states],
            );
        }

        let mut ext = vec![0i8; io.steps * ext_stride];
        let mut beta = io.init_beta.to_vec();
        let mut beta_prev = vec![0i32; states];
        let mut gext = vec![0i32; n_edges];
        for k in (0..io.steps).rev() {
            let par = &io.par[k * t.par_lanes..(k + 1) * t.par_lanes];
            for (i, e) in t.edges.iter().enumerate() {
                gext[i] = Self::gamma_ext(e.par, par);
            }
            self.extrinsic(
                t,
                &alpha[k * states..(k + 1) * states],
                &beta,
                &gext,
                &mut ext[k * ext_stride..(k + 1) * ext_stride],
            );
            self.backward_step(
                t,
                &beta,
                &gammas[k * n_edges..(k + 1) * n_edges],
                &mut beta_prev,
            );
            std::mem::swap(&mut beta, &mut beta_prev);
        }

        SliceOut {
            ext,
            alpha_out: alpha[io.steps * states..].to_vec(),
            beta_out: beta,
        }
    }
}

fn normalize(m: &mut [i32]) {
    let top = *m.iter().max().expect("non-empty metric vector");
    for v in m.iter_mut() {
        *v = (*v - top).max(METRIC_FLOOR);
    }
}

/// Boundary metrics expressing certainty about one state (termination).
pub fn certain_state(states: usize, state: usize) -> Vec<i32> {
    let mut v = vec![METRIC_FLOOR; states];
    v[state] = 0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::Code;
    use rand::{Rng, SeedableRng};

    #[test]
    fn lut_matches_correction_function() {
        let siso = Siso::new(DecodeMode::LogMap, 3);
        assert_eq!(siso.max_star(0, 0), 6); // ln 2 at three fractional bits
        let expected: Vec<i32> = (0..8)
            .map(|i| ((1.0 + (-(i as f64) / 8.0).exp()).ln() * 8.0).round() as i32)
            .collect();
        assert_eq!(siso.lut.to_vec(), expected);
        let mut prev = i32::MAX;
        for &v in &siso.lut {
            assert!(v >= 0 && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn max_star_modes() {
        let ml = Siso::new(DecodeMode::MaxLog, 3);
        assert_eq!(ml.max_star(3, 7), 7);
        let lm = Siso::new(DecodeMode::LogMap, 3);
        assert_eq!(lm.max_star(3, 7), 7 + lm.lut[4]);
        assert_eq!(lm.max_star(0, 100), 100); // beyond the table
    }

    #[test]
    fn max_star_is_symmetric_and_dominates_max() {
        let lm = Siso::new(DecodeMode::LogMap, 3);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = rng.gen_range(-2000..2000);
            let b = rng.gen_range(-2000..2000);
            assert_eq!(lm.max_star(a, b), lm.max_star(b, a));
            assert!(lm.max_star(a, b) >= a.max(b));
            assert!(lm.max_star(a, b) <= a.max(b) + lm.lut[0]);
        }
    }

    #[test]
    fn gamma_known_value() {
        // Binary edge with systematic one and parity one.
        let g = Siso::gamma(1, 1, 1, &[2], &[-2], &[4]);
        assert_eq!(g, 4);
        assert_eq!(Siso::gamma_ext(1, &[-2]), -2);
        let zero = Siso::gamma(1, 1, 1, &[0], &[0], &[0]);
        assert_eq!(zero, 0);
    }

    #[test]
    fn all_zero_inputs_give_zero_extrinsics() {
        for mode in [DecodeMode::MaxLog, DecodeMode::LogMap] {
            for code in [Code::lte_rsc(), Code::wimax_ctc()] {
                let t = code.trellis();
                let steps = 12;
                let io = SliceIn {
                    steps,
                    sys: &vec![0; steps * t.sys_lanes],
                    par: &vec![0; steps * t.par_lanes],
                    apr: &vec![0; steps * (t.symbols - 1)],
                    init_alpha: &vec![0; t.states],
                    init_beta: &vec![0; t.states],
                };
                let siso = Siso::new(mode, 3);
                let out = siso.run(&t, &io);
                assert!(out.ext.iter().all(|&e| e == 0), "{mode:?}");
                assert!(out.alpha_out.iter().all(|&a| a == 0));
                assert!(out.beta_out.iter().all(|&b| b == 0));
            }
        }
    }

    /// Exhaustive path-enumeration reference for max-log extrinsics with
    /// uniform boundary metrics.
    pub(crate) fn path_oracle(code: &Code, steps: usize, sys: &[i8], par: &[i8], apr: &[i8]) -> Vec<i8> {
        let t = code.trellis();
        let stride = t.symbols - 1;
        let mut best = vec![[i64::MIN; 4]; steps];
        let mut syms = vec![0u8; steps];
        let mut pars = vec![0u8; steps];

        fn walk(
            code: &Code,
            state: usize,
            k: usize,
            steps: usize,
            syms: &mut [u8],
            pars: &mut [u8],
            sys: &[i8],
            par: &[i8],
            apr: &[i8],
            best: &mut [[i64; 4]],
        ) {
            if k == steps {
                let code_sys_lanes = code.sys_lanes;
                let code_par_lanes = code.par_lanes;
                let mut total = 0i64;
                for j in 0..steps {
                    let u = syms[j];
                    let mut g = if u == 0 {
                        0i64
                    } else {
                        apr[j * (code.symbols - 1) + u as usize - 1] as i64
                    };
                    for b in 0..code_sys_lanes {
                        if u >> b & 1 == 1 {
                            g += sys[j * code_sys_lanes + b] as i64;
                        }
                    }
                    for b in 0..code_par_lanes {
                        if pars[j] >> b & 1 == 1 {
                            g += par[j * code_par_lanes + b] as i64;
                        }
                    }
                    total += g;
                }
                for j in 0..steps {
                    let u = syms[j] as usize;
                    if total > best[j][u] {
                        best[j][u] = total;
                    }
                }
                return;
            }
            for sym in 0..code.symbols as u8 {
                let (next, p) = code.step(state, sym);
                syms[k] = sym;
                pars[k] = p;
                walk(code, next, k + 1, steps, syms, pars, sys, par, apr, best);
            }
        }

        for start in 0..code.states {
            walk(
                code, start, 0, steps, &mut syms, &mut pars, sys, par, apr, &mut best,
            );
        }

        let mut ext = vec![0i8; steps * stride];
        for k in 0..steps {
            for u in 1..t.symbols {
                let mut apriori = apr[k * stride + u - 1] as i64;
                for b in 0..code.sys_lanes {
                    if u >> b & 1 == 1 {
                        apriori += sys[k * code.sys_lanes + b] as i64;
                    }
                }
                let v = best[k][u] - best[k][0] - apriori;
                ext[k * stride + u - 1] = v.clamp(i8::MIN as i64, i8::MAX as i64) as i8;
            }
        }
        ext
    }

    #[test]
    fn max_log_extrinsics_match_path_enumeration() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let siso = Siso::new(DecodeMode::MaxLog, 3);
        for code in [Code::binary_rsc(0o7, 0o5).unwrap(), Code::wimax_ctc()] {
            let t = code.trellis();
            let steps = 4;
            for _ in 0..50 {
                let sys: Vec<i8> =
                    (0..steps * t.sys_lanes).map(|_| rng.gen_range(-32..32)).collect();
                let par: Vec<i8> =
                    (0..steps * t.par_lanes).map(|_| rng.gen_range(-32..32)).collect();
                let apr: Vec<i8> = (0..steps * (t.symbols - 1))
                    .map(|_| rng.gen_range(-128..=127))
                    .collect();
                let io = SliceIn {
                    steps,
                    sys: &sys,
                    par: &par,
                    apr: &apr,
                    init_alpha: &vec![0; t.states],
                    init_beta: &vec![0; t.states],
                };
                let got = siso.run(&t, &io);
                let want = path_oracle(&code, steps, &sys, &par, &apr);
                assert_eq!(got.ext, want);
            }
        }
    }

    #[test]
    fn extrinsic_invariant_under_step_metric_shift() {
        // Shifting every branch metric of one step by a constant must leave
        // max-log extrinsics untouched.
        let code = Code::lte_rsc();
        let t = code.trellis();
        let siso = Siso::new(DecodeMode::MaxLog, 3);
        let alpha = vec![0, -3, -7, -1, -4, -9, -2, -5];
        let beta = vec![-2, 0, -5, -8, -1, -6, -3, -4];
        let gext: Vec<i32> = (0..t.edges.len() as i32).map(|i| (i * 7) % 13 - 6).collect();
        let shifted: Vec<i32> = gext.iter().map(|g| g + 25).collect();
        let mut a = [0i8; 1];
        let mut b = [0i8; 1];
        siso.extrinsic(&t, &alpha, &beta, &gext, &mut a);
        siso.extrinsic(&t, &alpha, &beta, &shifted, &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn boundary_exports_are_normalized() {
        let code = Code::lte_rsc();
        let t = code.trellis();
        let siso = Siso::new(DecodeMode::LogMap, 3);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(12);
        let steps = 40;
        let sys: Vec<i8> = (0..steps).map(|_| rng.gen_range(-32..32)).collect();
        let par: Vec<i8> = (0..steps).map(|_| rng.gen_range(-32..32)).collect();
        let io = SliceIn {
            steps,
            sys: &sys,
            par: &par,
            apr: &vec![0; steps],
            init_alpha: &certain_state(8, 0),
            init_beta: &vec![0; 8],
        };
        let out = siso.run(&t, &io);
        assert_eq!(*out.alpha_out.iter().max().unwrap(), 0);
        assert_eq!(*out.beta_out.iter().max().unwrap(), 0);
        assert!(out.alpha_out.iter().all(|&v| v >= METRIC_FLOOR));
    }
}
