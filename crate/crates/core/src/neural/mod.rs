//! The weighted message-passing decoder.
//!
//! Same trellis as [`crate::bp`], but every input of every processing
//! element carries a trainable weight. Odd layers work in the tanh domain:
//!
//! `x_e = tanh( ½ · clamp(w_v·l_v + Σ w_{e,e'}·x̃_{e'}, ±A) )`
//!
//! where x̃ are the previous check-layer outputs (LLR domain, zero before
//! the first iteration). Even layers multiply the tanh-domain inputs
//! directly: `x̃_e = 2·atanh( Π x_{e'} )`, product clamped as in plain BP.
//! Each marginalization readout is a sigmoid over weighted inputs:
//!
//! `o_v = σ( w_v·l_v + Σ w_{v,e'}·x̃_{e'} )`
//!
//! With all weights equal to one this reproduces plain BP bit for bit
//! (identical clipping and left-to-right reduction order); the sigmoid
//! logit then equals the BP marginal exactly.
//!
//! Channel LLRs are clipped to ±A on entry, exactly as in [`crate::bp`].
//!
//! The forward pass records a [`ForwardTape`] (activations, clip masks,
//! readout logits) from which [`backward`] computes exact reverse-mode
//! gradients; clipped and clamped regions propagate zero gradient.

mod backward;
mod checkpoint;
mod loss;
mod stats;
mod weights;

pub use backward::{backward, backward_into, BackwardScratch};
pub use checkpoint::{checkpoint_load, checkpoint_load_any, checkpoint_save};
pub use loss::{cross_entropy_from_logits, cross_entropy_loss, multiloss, sigmoid, LossKind};
pub use stats::{weight_stats, GroupStats, WeightStats};
pub use weights::{Gradient, WeightInit, WeightLayout, WeightSet};

use crate::bp::{atanh_odd, leave_one_out_products, tanh_odd, DecodeResult, ATANH_EPS};
use crate::code_graph::TrellisLayout;
use crate::error::Result;

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone)]
pub struct ForwardTape {
    iterations: usize,
    /// Clipped channel LLRs actually consumed by the layers.
    pub llr: Vec<f64>,
    /// Odd-layer activations, tanh domain, in (−1, 1). `L × E`.
    pub odd_x: Vec<Vec<f64>>,
    /// True where the odd-layer pre-activation hit the clip bound.
    pub odd_sat: Vec<Vec<bool>>,
    /// Even-layer outputs, LLR domain. `L × E`.
    pub even_x: Vec<Vec<f64>>,
    /// Clamped per-edge products feeding the even-layer atanh. `L × E`.
    pub even_p: Vec<Vec<f64>>,
    /// True where the product clamp engaged.
    pub even_sat: Vec<Vec<bool>>,
    /// Pre-sigmoid readout logits; one row per marginalization group,
    /// the last row is the final output.
    pub logits: Vec<Vec<f64>>,
}

impl ForwardTape {
    fn new(trellis: &TrellisLayout, readouts: usize) -> Self {
        let l = trellis.iterations();
        let e = trellis.num_edges();
        let n = trellis.n();
        ForwardTape {
            iterations: l,
            llr: vec![0.0; n],
            odd_x: vec![vec![0.0; e]; l],
            odd_sat: vec![vec![false; e]; l],
            even_x: vec![vec![0.0; e]; l],
            even_p: vec![vec![0.0; e]; l],
            even_sat: vec![vec![false; e]; l],
            logits: vec![vec![0.0; n]; readouts],
        }
    }

    /// Full BP iterations L recorded on this tape.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn readout_count(&self) -> usize {
        self.logits.len()
    }

    /// Logits of the final marginalization (Eq.-style output layer).
    pub fn final_logits(&self) -> &[f64] {
        self.logits.last().expect("tape always has a final readout")
    }

    /// Soft outputs σ(logit) of readout `r`, each in (0, 1).
    pub fn soft_outputs(&self, r: usize) -> Vec<f64> {
        self.logits[r].iter().map(|&z| loss::sigmoid(z)).collect()
    }
}

/// Run the weighted forward pass and record the tape.
///
/// The number of readouts follows the weight layout: one for plain
/// weights, one per iteration for multiloss weights.
pub fn neural_forward(
    trellis: &TrellisLayout,
    weights: &WeightSet,
    llr: &[f64],
    clip_a: f64,
) -> Result<ForwardTape> {
    weights.layout().compatible_with(trellis)?;
    assert_eq!(llr.len(), trellis.n(), "llr length must equal n");

    let l = trellis.iterations();
    let e = trellis.num_edges();
    let multiloss = weights.layout().multiloss();
    let mut tape = ForwardTape::new(trellis, weights.layout().readout_count());

    for (dst, &src) in tape.llr.iter_mut().zip(llr.iter()) {
        *dst = src.clamp(-clip_a, clip_a);
    }

    let dmax = trellis.max_chk_degree();
    let mut pre = vec![0.0; dmax + 1];
    let mut suf = vec![0.0; dmax + 1];
    let lim = 1.0 - ATANH_EPS;

    for t in 0..l {
        // Odd hidden layer 2t+1.
        let w_self = weights.hidden_self(t);
        let w_edge = weights.hidden_edge(t);
        let odd_x = &mut tape.odd_x[t];
        let prev_even: Option<&[f64]> = if t > 0 { Some(&tape.even_x[t - 1]) } else { None };
        for eid in 0..e {
            let v = trellis.edge_var(eid);
            let mut s = w_self[v] * tape.llr[v];
            if let Some(prev) = prev_even {
                let base = trellis.vn_base(eid);
                for (j, &input) in trellis.vn_inputs(eid).iter().enumerate() {
                    s += w_edge[base + j] * prev[input as usize];
                }
            }
            let sc = s.clamp(-clip_a, clip_a);
            tape.odd_sat[t][eid] = sc != s;
            odd_x[eid] = tanh_odd(0.5 * sc);
        }

        // Even hidden layer 2t+2.
        leave_one_out_products(trellis, &tape.odd_x[t], &mut tape.even_p[t], &mut pre, &mut suf);
        for eid in 0..e {
            let p = tape.even_p[t][eid];
            let pc = p.clamp(-lim, lim);
            tape.even_sat[t][eid] = pc != p;
            tape.even_p[t][eid] = pc;
            tape.even_x[t][eid] = 2.0 * atanh_odd(pc);
        }

        // Marginalization readout(s).
        if multiloss || t == l - 1 {
            let r = if multiloss { t } else { 0 };
            let ro_self = weights.readout_self(r);
            let ro_edge = weights.readout_edge(r);
            for v in 0..trellis.n() {
                let mut z = ro_self[v] * tape.llr[v];
                for eid in trellis.out_inputs(v) {
                    z += ro_edge[eid] * tape.even_x[t][eid];
                }
                tape.logits[r][v] = z;
            }
        }
    }

    Ok(tape)
}

/// Reusable buffers for tape-free inference.
#[derive(Debug, Clone)]
pub struct NeuralScratch {
    llr_clip: Vec<f64>,
    odd: Vec<f64>,
    even: Vec<f64>,
    pre: Vec<f64>,
    suf: Vec<f64>,
    logits: Vec<f64>,
    hard: Vec<u8>,
}

impl NeuralScratch {
    pub fn new(trellis: &TrellisLayout) -> Self {
        let e = trellis.num_edges();
        let d = trellis.max_chk_degree();
        NeuralScratch {
            llr_clip: vec![0.0; trellis.n()],
            odd: vec![0.0; e],
            even: vec![0.0; e],
            pre: vec![0.0; d + 1],
            suf: vec![0.0; d + 1],
            logits: vec![0.0; trellis.n()],
            hard: vec![0u8; trellis.n()],
        }
    }
}

/// Decode one frame with the weighted decoder (final readout only).
///
/// `marginals` in the result are the pre-sigmoid logits, which share the
/// log-odds-of-one orientation of BP marginals; bit v decodes to 1 iff the
/// soft output exceeds ½, i.e. iff the logit is positive.
pub fn neural_decode(
    trellis: &TrellisLayout,
    weights: &WeightSet,
    llr: &[f64],
    clip_a: f64,
) -> Result<DecodeResult> {
    let mut scratch = NeuralScratch::new(trellis);
    neural_decode_into(trellis, weights, llr, clip_a, &mut scratch)
}

/// As [`neural_decode`], reusing caller-owned buffers.
pub fn neural_decode_into(
    trellis: &TrellisLayout,
    weights: &WeightSet,
    llr: &[f64],
    clip_a: f64,
    scratch: &mut NeuralScratch,
) -> Result<DecodeResult> {
    weights.layout().compatible_with(trellis)?;
    assert_eq!(llr.len(), trellis.n(), "llr length must equal n");

    let l = trellis.iterations();
    let e = trellis.num_edges();
    let lim = 1.0 - ATANH_EPS;

    for (dst, &src) in scratch.llr_clip.iter_mut().zip(llr.iter()) {
        *dst = src.clamp(-clip_a, clip_a);
    }
    scratch.even.iter_mut().for_each(|x| *x = 0.0);

    for t in 0..l {
        let w_self = weights.hidden_self(t);
        let w_edge = weights.hidden_edge(t);
        for eid in 0..e {
            let v = trellis.edge_var(eid);
            let mut s = w_self[v] * scratch.llr_clip[v];
            if t > 0 {
                let base = trellis.vn_base(eid);
                for (j, &input) in trellis.vn_inputs(eid).iter().enumerate() {
                    s += w_edge[base + j] * scratch.even[input as usize];
                }
            }
            scratch.odd[eid] = tanh_odd(0.5 * s.clamp(-clip_a, clip_a));
        }
        let NeuralScratch {
            odd, even, pre, suf, ..
        } = scratch;
        leave_one_out_products(trellis, odd, even, pre, suf);
        for x in even.iter_mut() {
            *x = 2.0 * atanh_odd(x.clamp(-lim, lim));
        }
    }

    let r = weights.layout().readout_count() - 1;
    let ro_self = weights.readout_self(r);
    let ro_edge = weights.readout_edge(r);
    for v in 0..trellis.n() {
        let mut z = ro_self[v] * scratch.llr_clip[v];
        for eid in trellis.out_inputs(v) {
            z += ro_edge[eid] * scratch.even[eid];
        }
        scratch.logits[v] = z;
        scratch.hard[v] = (z > 0.0) as u8;
    }

    Ok(DecodeResult {
        hard_bits: scratch.hard.clone(),
        marginals: scratch.logits.clone(),
        syndrome_ok: trellis.syndrome_ok(&scratch.hard),
        iterations_run: l,
    })
}
