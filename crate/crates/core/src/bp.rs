//! Plain flooding belief propagation on the unrolled trellis.
//!
//! Messages live in the LLR domain with the crate's log-odds-of-one
//! convention (see [`crate::channel`]). One full iteration is a variable
//! layer followed by a check layer:
//!
//! - variable to check: `x_e = l_v + Σ_{e'≠e, same v} x_{e'}`, clipped to
//!   `[−A, A]`;
//! - check to variable: `x_e = 2·atanh( Π_{e'≠e, same c} tanh(x_{e'}/2) )`,
//!   with the product clamped to `±(1 − 1e−12)` before the atanh;
//! - final marginalization: `o_v = l_v + Σ_{e', same v} x_{e'}`.
//!
//! The channel LLRs themselves are clipped to `[−A, A]` on entry, so the
//! weighted decoder with all weights equal to one reproduces these outputs
//! bit for bit. All sums and products run left to right over the canonical
//! edge order; decoding is bit-for-bit deterministic.

use crate::code_graph::TrellisLayout;

/// Default message clip bound A.
pub const CLIP_A_DEFAULT: f64 = 8.0;
/// Clamp margin for the check-layer product before atanh.
pub const ATANH_EPS: f64 = 1e-12;

/// `tanh` forced to be exactly odd.
///
/// libm implementations are not guaranteed to satisfy
/// `tanh(−x) == −tanh(x)` to the last ulp, and the decoder's exact
/// codeword-covariance property depends on it; evaluating on `|x|` and
/// restoring the sign makes the symmetry structural.
#[inline]
pub(crate) fn tanh_odd(x: f64) -> f64 {
    x.abs().tanh().copysign(x)
}

/// `atanh` forced to be exactly odd (glibc's is not).
#[inline]
pub(crate) fn atanh_odd(x: f64) -> f64 {
    x.abs().atanh().copysign(x)
}

/// Decoder settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    /// Full iterations L to run.
    pub iterations: usize,
    /// Message clip bound A.
    pub clip_a: f64,
    /// Stop after any full iteration whose hard decision satisfies all
    /// checks. Off by default: the reference schedule runs fixed L.
    pub early_stop: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            iterations: 5,
            clip_a: CLIP_A_DEFAULT,
            early_stop: false,
        }
    }
}

/// Output of one decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Hard decisions; bit v is 1 iff the marginal is strictly positive
    /// (ties decode to 0).
    pub hard_bits: Vec<u8>,
    /// Final marginals `o_v` (log-odds of bit one).
    pub marginals: Vec<f64>,
    /// Whether `hard_bits` satisfies every parity check.
    pub syndrome_ok: bool,
    /// Full iterations actually run.
    pub iterations_run: usize,
}

/// Reusable message buffers for repeated decodes on one layout.
#[derive(Debug, Clone)]
pub struct MessageState {
    /// Odd-layer outputs (variable to check), length E.
    pub var_to_chk: Vec<f64>,
    /// Even-layer outputs (check to variable), length E.
    pub chk_to_var: Vec<f64>,
    /// Final marginals, length N.
    pub marginals: Vec<f64>,
    llr_clip: Vec<f64>,
    tanh: Vec<f64>,
    pre: Vec<f64>,
    suf: Vec<f64>,
    hard: Vec<u8>,
}

impl MessageState {
    pub fn new(layout: &TrellisLayout) -> Self {
        let e = layout.num_edges();
        let d = layout.max_chk_degree();
        MessageState {
            var_to_chk: vec![0.0; e],
            chk_to_var: vec![0.0; e],
            marginals: vec![0.0; layout.n()],
            llr_clip: vec![0.0; layout.n()],
            tanh: vec![0.0; e],
            pre: vec![0.0; d + 1],
            suf: vec![0.0; d + 1],
            hard: vec![0u8; layout.n()],
        }
    }
}

/// Per-check leave-one-out products of tanh-domain values.
///
/// For every check c with incident edges e_1 < … < e_d, writes
/// `out[e_j] = Π_{i≠j} vals[e_i]`, evaluated via prefix/suffix passes in
/// canonical edge order (no division, fixed grouping).
pub(crate) fn leave_one_out_products(
    layout: &TrellisLayout,
    vals: &[f64],
    out: &mut [f64],
    pre: &mut [f64],
    suf: &mut [f64],
) {
    for c in 0..layout.num_checks() {
        let edges = layout.chk_edges(c);
        let d = edges.len();
        pre[0] = 1.0;
        for (i, &e) in edges.iter().enumerate() {
            pre[i + 1] = pre[i] * vals[e as usize];
        }
        suf[d] = 1.0;
        for i in (0..d).rev() {
            suf[i] = vals[edges[i] as usize] * suf[i + 1];
        }
        for (j, &e) in edges.iter().enumerate() {
            out[e as usize] = pre[j] * suf[j + 1];
        }
    }
}

/// Variable-side layer: `out[e] = clamp(llr[v(e)] + Σ vn_inputs, ±A)`.
///
/// `prev_chk_to_var` holds the previous even layer (all zeros before the
/// first iteration). The sum runs left to right over ascending edge ids.
pub fn bp_variable_layer(
    layout: &TrellisLayout,
    llr: &[f64],
    prev_chk_to_var: &[f64],
    clip_a: f64,
    out: &mut [f64],
) {
    assert_eq!(llr.len(), layout.n());
    assert_eq!(prev_chk_to_var.len(), layout.num_edges());
    assert_eq!(out.len(), layout.num_edges());
    for e in 0..layout.num_edges() {
        let mut s = llr[layout.edge_var(e)];
        for &input in layout.vn_inputs(e) {
            s += prev_chk_to_var[input as usize];
        }
        out[e] = s.clamp(-clip_a, clip_a);
    }
}

/// Check-side layer: `out[e] = 2·atanh(clamp(Π tanh(cn_inputs/2)))`.
pub fn bp_check_layer(layout: &TrellisLayout, prev_var_to_chk: &[f64], out: &mut [f64]) {
    let e = layout.num_edges();
    let d = layout.max_chk_degree();
    let mut tanh = vec![0.0; e];
    let mut pre = vec![0.0; d + 1];
    let mut suf = vec![0.0; d + 1];
    check_layer_into(layout, prev_var_to_chk, out, &mut tanh, &mut pre, &mut suf);
}

fn check_layer_into(
    layout: &TrellisLayout,
    prev_var_to_chk: &[f64],
    out: &mut [f64],
    tanh: &mut [f64],
    pre: &mut [f64],
    suf: &mut [f64],
) {
    assert_eq!(prev_var_to_chk.len(), layout.num_edges());
    assert_eq!(out.len(), layout.num_edges());
    for (t, &m) in tanh.iter_mut().zip(prev_var_to_chk.iter()) {
        *t = tanh_odd(m * 0.5);
    }
    leave_one_out_products(layout, tanh, out, pre, suf);
    let lim = 1.0 - ATANH_EPS;
    for x in out.iter_mut() {
        *x = 2.0 * atanh_odd(x.clamp(-lim, lim));
    }
}

/// Final marginalization: `out[v] = llr[v] + Σ_{e of v} chk_to_var[e]`.
pub fn bp_marginalize(
    layout: &TrellisLayout,
    llr: &[f64],
    chk_to_var: &[f64],
    out: &mut [f64],
) {
    assert_eq!(llr.len(), layout.n());
    assert_eq!(chk_to_var.len(), layout.num_edges());
    assert_eq!(out.len(), layout.n());
    for v in 0..layout.n() {
        let mut s = llr[v];
        for e in layout.out_inputs(v) {
            s += chk_to_var[e];
        }
        out[v] = s;
    }
}

/// Hard decision: bit 1 iff the log-odds-of-one marginal is positive.
pub fn hard_decision(marginals: &[f64], out: &mut [u8]) {
    for (b, &o) in out.iter_mut().zip(marginals.iter()) {
        *b = (o > 0.0) as u8;
    }
}

/// Run the full decoder. Allocates fresh buffers; use
/// [`bp_decode_into`] with a kept [`MessageState`] in tight loops.
pub fn bp_decode(layout: &TrellisLayout, llr: &[f64], cfg: &BpConfig) -> DecodeResult {
    let mut state = MessageState::new(layout);
    bp_decode_into(layout, llr, cfg, &mut state)
}

/// Run the full decoder using caller-owned buffers.
pub fn bp_decode_into(
    layout: &TrellisLayout,
    llr: &[f64],
    cfg: &BpConfig,
    state: &mut MessageState,
) -> DecodeResult {
    assert!(cfg.iterations >= 1, "at least one iteration required");
    assert_eq!(llr.len(), layout.n());

    for (c, &l) in state.llr_clip.iter_mut().zip(llr.iter()) {
        *c = l.clamp(-cfg.clip_a, cfg.clip_a);
    }
    state.chk_to_var.iter_mut().for_each(|x| *x = 0.0);

    let mut iterations_run = 0;
    for iter in 1..=cfg.iterations {
        iterations_run = iter;
        // Split borrows: the layer kernels take disjoint buffers.
        let MessageState {
            var_to_chk,
            chk_to_var,
            llr_clip,
            tanh,
            pre,
            suf,
            ..
        } = state;
        bp_variable_layer(layout, llr_clip, chk_to_var, cfg.clip_a, var_to_chk);
        check_layer_into(layout, var_to_chk, chk_to_var, tanh, pre, suf);

        if cfg.early_stop || iter == cfg.iterations {
            let MessageState {
                chk_to_var,
                llr_clip,
                marginals,
                hard,
                ..
            } = state;
            bp_marginalize(layout, llr_clip, chk_to_var, marginals);
            hard_decision(marginals, hard);
            if cfg.early_stop && layout.syndrome_ok(hard) {
                break;
            }
        }
    }

    let syndrome_ok = layout.syndrome_ok(&state.hard);
    DecodeResult {
        hard_bits: state.hard.clone(),
        marginals: state.marginals.clone(),
        syndrome_ok,
        iterations_run,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_graph::{compile_trellis, construct_bch, ParityCheckCode};

    fn single_check_code(n: usize) -> TrellisLayout {
        let code =
            ParityCheckCode::from_edges(n, 1, (0..n).map(|v| (v, 0))).unwrap();
        compile_trellis(&code, 1)
    }

    fn hamming_7_4() -> (ParityCheckCode, TrellisLayout) {
        let mut entries = Vec::new();
        for v in 0..7usize {
            for c in 0..3usize {
                if ((v + 1) >> c) & 1 == 1 {
                    entries.push((v, c));
                }
            }
        }
        let code = ParityCheckCode::from_edges(7, 3, entries).unwrap();
        let layout = compile_trellis(&code, 5);
        (code, layout)
    }

    #[test]
    fn first_variable_layer_replicates_llr() {
        let code = construct_bch(4, 1).unwrap();
        let layout = compile_trellis(&code, 1);
        let llr: Vec<f64> = (0..15).map(|v| v as f64 - 7.0).collect();
        let zeros = vec![0.0; layout.num_edges()];
        let mut out = vec![0.0; layout.num_edges()];
        bp_variable_layer(&layout, &llr, &zeros, 8.0, &mut out);
        for e in 0..layout.num_edges() {
            assert_eq!(out[e], llr[layout.edge_var(e)].clamp(-8.0, 8.0));
        }
    }

    #[test]
    fn degree_one_variable_passes_llr_through() {
        let layout = single_check_code(3);
        let llr = [1.5, -0.5, 3.0];
        let prev = [9.0, 9.0, 9.0]; // must be ignored: vn_inputs are empty
        let mut out = [0.0; 3];
        bp_variable_layer(&layout, &llr, &prev, 8.0, &mut out);
        assert_eq!(out, [1.5, -0.5, 3.0]);
    }

    #[test]
    fn variable_layer_hand_case() {
        // One variable in three checks; edge 0 sums the other two inputs.
        let code = ParityCheckCode::from_edges(1, 3, vec![(0, 0), (0, 1), (0, 2)]).unwrap();
        let layout = compile_trellis(&code, 1);
        let prev = [0.0, 0.5, -0.25];
        let mut out = [0.0; 3];
        bp_variable_layer(&layout, &[1.0], &prev, 8.0, &mut out);
        assert!((out[0] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn variable_layer_clips_to_a() {
        let code = ParityCheckCode::from_edges(1, 3, vec![(0, 0), (0, 1), (0, 2)]).unwrap();
        let layout = compile_trellis(&code, 1);
        let prev = [0.0, 7.0, 7.0];
        let mut out = [0.0; 3];
        bp_variable_layer(&layout, &[5.0], &prev, 8.0, &mut out);
        assert_eq!(out[0], 8.0);
        bp_variable_layer(&layout, &[-5.0], &[0.0, -7.0, -7.0], 8.0, &mut out);
        assert_eq!(out[0], -8.0);
    }

    #[test]
    fn check_layer_zero_absorbs() {
        let layout = single_check_code(3);
        let prev = [0.0, 2.0, -1.0];
        let mut out = [0.0; 3];
        bp_check_layer(&layout, &prev, &mut out);
        // Outputs toward edges 1 and 2 include the zero input.
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
        assert!(out[0] != 0.0);
    }

    #[test]
    fn check_layer_hand_case() {
        let layout = single_check_code(3);
        let m = 2.0 * 0.5f64.atanh();
        let prev = [0.0, m, m];
        let mut out = [0.0; 3];
        bp_check_layer(&layout, &prev, &mut out);
        assert!((out[0] - 0.5108256237659907).abs() < 1e-12);
    }

    #[test]
    fn check_layer_sign_parity() {
        let layout = single_check_code(4);
        let prev = [1.0, 2.0, 0.5, 1.5];
        let mut out = vec![0.0; 4];
        bp_check_layer(&layout, &prev, &mut out);
        assert!(out.iter().all(|&x| x > 0.0));

        let flipped = [1.0, -2.0, 0.5, 1.5];
        let mut out2 = vec![0.0; 4];
        bp_check_layer(&layout, &flipped, &mut out2);
        // Outputs not fed by the flipped edge change sign; the output
        // toward the flipped edge itself does not.
        assert!(out2[1] > 0.0);
        for e in [0, 2, 3] {
            assert!((out2[e] + out[e]).abs() < 1e-12);
        }
    }

    #[test]
    fn marginalize_with_zero_messages_returns_llr() {
        let layout = single_check_code(3);
        let llr = [0.5, -1.0, 2.0];
        let zeros = vec![0.0; 3];
        let mut out = [0.0; 3];
        bp_marginalize(&layout, &llr, &zeros, &mut out);
        assert_eq!(out, llr);
    }

    #[test]
    fn marginalize_reinforces_agreeing_signs() {
        let layout = single_check_code(3);
        let llr = [-1.0, -1.0, -1.0];
        let msgs = vec![-0.5; 3];
        let mut out = [0.0; 3];
        bp_marginalize(&layout, &llr, &msgs, &mut out);
        for v in 0..3 {
            assert!(out[v].abs() > llr[v].abs());
        }
    }

    #[test]
    fn one_iteration_matches_hand_computation_on_toy_code() {
        // Single parity check on 3 variables, one iteration:
        // o_v = l_v + 2 atanh(tanh(l_a/2) tanh(l_b/2)).
        let layout = single_check_code(3);
        let llr = [0.8, -0.4, 1.2];
        let res = bp_decode(
            &layout,
            &llr,
            &BpConfig {
                iterations: 1,
                clip_a: 8.0,
                early_stop: false,
            },
        );
        for v in 0..3 {
            let others: Vec<f64> = (0..3).filter(|&u| u != v).map(|u| llr[u]).collect();
            let expect =
                llr[v] + 2.0 * ((others[0] * 0.5).tanh() * (others[1] * 0.5).tanh()).atanh();
            assert!((res.marginals[v] - expect).abs() < 1e-12, "v={v}");
        }
    }

    #[test]
    fn noiseless_zero_codeword_decodes_clean() {
        let (_, layout) = hamming_7_4();
        let llr = vec![-6.0; 7];
        let res = bp_decode(&layout, &llr, &BpConfig::default());
        assert_eq!(res.hard_bits, vec![0u8; 7]);
        assert!(res.syndrome_ok);
        assert_eq!(res.iterations_run, 5);
    }

    #[test]
    fn corrects_every_single_flip_on_hamming() {
        // A flipped bit at high SNR crosses zero but stays weaker than the
        // clean bits (noise barely pushed it over); BP recovers all seven
        // positions within the default five iterations.
        let (_, layout) = hamming_7_4();
        for flip in 0..7 {
            let mut llr = vec![-4.0; 7];
            llr[flip] = 2.0; // bit looks like a (weak) one
            let res = bp_decode(&layout, &llr, &BpConfig::default());
            assert_eq!(res.hard_bits, vec![0u8; 7], "flip at {flip}");
            assert!(res.syndrome_ok);
        }
    }

    #[test]
    fn all_zero_llr_is_a_fixed_point_with_zero_tiebreak() {
        let (_, layout) = hamming_7_4();
        let llr = vec![0.0; 7];
        let res = bp_decode(&layout, &llr, &BpConfig::default());
        assert_eq!(res.marginals, vec![0.0; 7]);
        assert_eq!(res.hard_bits, vec![0u8; 7]);
        assert!(res.syndrome_ok);
    }

    #[test]
    fn early_stop_halts_on_clean_input() {
        let (_, layout) = hamming_7_4();
        let llr = vec![-6.0; 7];
        let res = bp_decode(
            &layout,
            &llr,
            &BpConfig {
                iterations: 50,
                clip_a: 8.0,
                early_stop: true,
            },
        );
        assert!(res.syndrome_ok);
        assert_eq!(res.iterations_run, 1);
    }

    #[test]
    fn decoding_is_deterministic() {
        let code = construct_bch(4, 1).unwrap();
        let layout = compile_trellis(&code, 5);
        let llr: Vec<f64> = (0..15).map(|v| ((v * 37 % 11) as f64 - 5.0) * 0.7).collect();
        let a = bp_decode(&layout, &llr, &BpConfig::default());
        let b = bp_decode(&layout, &llr, &BpConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn codeword_covariance_is_exact() {
        // Decoding sign-flipped LLRs equals flipping the decode of the
        // original: hard bits XOR c, marginals negated where c_v = 1.
        let (mut code, layout) = hamming_7_4();
        code.derive_generator();
        let gen = code.generator().unwrap().clone();
        let llr: Vec<f64> = (0..7).map(|v| (v as f64 * 0.83).sin() * 3.0).collect();
        let base = bp_decode(&layout, &llr, &BpConfig::default());
        for idx in 0..16u64 {
            let cw = gen.encode_index(idx);
            let flipped: Vec<f64> = llr
                .iter()
                .zip(cw.iter())
                .map(|(&l, &c)| if c == 1 { -l } else { l })
                .collect();
            let res = bp_decode(&layout, &flipped, &BpConfig::default());
            for v in 0..7 {
                assert_eq!(res.hard_bits[v], base.hard_bits[v] ^ cw[v], "cw {idx} bit {v}");
                let expect = if cw[v] == 1 { -base.marginals[v] } else { base.marginals[v] };
                assert_eq!(res.marginals[v], expect, "cw {idx} marginal {v}");
            }
        }
    }

    #[test]
    fn single_check_posterior_is_exact_on_even_degree_codes() {
        // Brute-force oracle: enumerate the even-weight codewords of a
        // single-check code and compare exact posterior log-odds with one
        // BP iteration (cycle-free graph, huge clip bound).
        for n in [2usize, 4, 6, 8, 10, 12] {
            let layout = single_check_code(n);
            let llr: Vec<f64> = (0..n)
                .map(|v| ((v as f64 + 1.0) * 1.234).sin() * 2.5)
                .collect();
            let res = bp_decode(
                &layout,
                &llr,
                &BpConfig {
                    iterations: 1,
                    clip_a: 1e9,
                    early_stop: false,
                },
            );
            for v in 0..n {
                let mut odds = [0.0f64; 2]; // [P(bit=0), P(bit=1)] up to scale
                for w in 0..(1u32 << n) {
                    if w.count_ones() % 2 != 0 {
                        continue;
                    }
                    let weight: f64 = (0..n)
                        .map(|u| if (w >> u) & 1 == 1 { llr[u] } else { 0.0 })
                        .sum::<f64>()
                        .exp();
                    odds[((w >> v) & 1) as usize] += weight;
                }
                let exact = odds[1].ln() - odds[0].ln();
                assert!(
                    (res.marginals[v] - exact).abs() <= 1e-9 * exact.abs().max(1.0),
                    "n={n} v={v}: got {} want {exact}",
                    res.marginals[v]
                );
            }
        }
    }

    #[test]
    fn messages_never_exceed_clip_bound() {
        let code = construct_bch(4, 1).unwrap();
        let layout = compile_trellis(&code, 5);
        let llr: Vec<f64> = (0..15).map(|v| (v as f64 - 7.0) * 5.0).collect();
        let mut state = MessageState::new(&layout);
        let cfg = BpConfig::default();
        bp_decode_into(&layout, &llr, &cfg, &mut state);
        assert!(state.var_to_chk.iter().all(|&x| x.abs() <= cfg.clip_a));
    }
}
