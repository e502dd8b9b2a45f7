//! Exact reverse-mode gradients through the recorded forward tape.
//!
//! The unrolled graph is static, so the sweep is hand-written rather than
//! taped dynamically: seed at the readout logits with `(σ(z) − y)/N`, walk
//! the layers back in fixed index order, and stop gradient flow wherever
//! the forward pass clipped (odd-layer pre-activations) or clamped
//! (even-layer products). Leave-one-out product derivatives are formed by
//! prefix/suffix passes over the check's inputs with the differentiated
//! input excluded — no division, so zero activations are handled exactly.
//!
//! Accumulation order is fixed, making gradients bit-for-bit reproducible.

use super::loss::{sigmoid, LossKind};
use super::weights::{Gradient, WeightSet};
use super::ForwardTape;
use crate::code_graph::TrellisLayout;
use crate::error::{Error, Result};

/// Reusable buffers for [`backward_into`].
#[derive(Debug, Clone)]
pub struct BackwardScratch {
    /// dLoss/d(even-layer output), current layer.
    g_even: Vec<f64>,
    /// dLoss/d(even-layer output), one layer down; swapped each step.
    g_even_prev: Vec<f64>,
    /// dLoss/d(odd-layer tanh output).
    g_odd: Vec<f64>,
    /// Per-check input copy.
    xs: Vec<f64>,
    /// Upstream sensitivities per check output.
    up: Vec<f64>,
    /// Exclusion-array prefix/suffix products.
    pre: Vec<f64>,
    suf: Vec<f64>,
}

impl BackwardScratch {
    pub fn new(trellis: &TrellisLayout) -> Self {
        let e = trellis.num_edges();
        let d = trellis.max_chk_degree();
        BackwardScratch {
            g_even: vec![0.0; e],
            g_even_prev: vec![0.0; e],
            g_odd: vec![0.0; e],
            xs: vec![0.0; d],
            up: vec![0.0; d],
            pre: vec![0.0; d + 1],
            suf: vec![0.0; d + 1],
        }
    }
}

/// Gradient of the chosen loss with respect to every weight.
pub fn backward(
    trellis: &TrellisLayout,
    weights: &WeightSet,
    tape: &ForwardTape,
    labels: &[u8],
    loss_kind: LossKind,
) -> Result<Gradient> {
    let mut grad = Gradient::zeros(weights.layout().clone());
    let mut scratch = BackwardScratch::new(trellis);
    backward_into(trellis, weights, tape, labels, loss_kind, &mut grad, &mut scratch)?;
    Ok(grad)
}

/// As [`backward`], accumulating into `grad` (useful over a mini-batch).
pub fn backward_into(
    trellis: &TrellisLayout,
    weights: &WeightSet,
    tape: &ForwardTape,
    labels: &[u8],
    loss_kind: LossKind,
    grad: &mut Gradient,
    scratch: &mut BackwardScratch,
) -> Result<()> {
    weights.layout().compatible_with(trellis)?;
    if grad.layout() != weights.layout() {
        return Err(Error::LayoutMismatch(
            "gradient layout differs from weight layout".into(),
        ));
    }
    let l = trellis.iterations();
    let n = trellis.n();
    let e = trellis.num_edges();
    assert_eq!(labels.len(), n, "label length must equal n");
    match loss_kind {
        LossKind::Multi if tape.readout_count() != l => {
            return Err(Error::LayoutMismatch(
                "multiloss backward needs one readout per iteration".into(),
            ));
        }
        _ => {}
    }

    scratch.g_even.iter_mut().for_each(|x| *x = 0.0);

    for t in (0..l).rev() {
        // Readout seeding at this even layer: the final marginalization for
        // the plain loss, every marginalization for the multiloss.
        let readout = match loss_kind {
            LossKind::Single => (t == l - 1).then(|| tape.readout_count() - 1),
            LossKind::Multi => Some(t),
        };
        if let Some(r) = readout {
            let ro_edge = weights.readout_edge(r);
            let logits = &tape.logits[r];
            for v in 0..n {
                let dz = (sigmoid(logits[v]) - f64::from(labels[v] & 1)) / n as f64;
                if dz == 0.0 {
                    continue;
                }
                grad.readout_self_mut(r)[v] += dz * tape.llr[v];
                let ro_edge_grad = grad.readout_edge_mut(r);
                for eid in trellis.out_inputs(v) {
                    ro_edge_grad[eid] += dz * tape.even_x[t][eid];
                    scratch.g_even[eid] += dz * ro_edge[eid];
                }
            }
        }

        // Even layer backward: x̃ = 2·atanh(P), P = Π inputs (clamped).
        scratch.g_odd.iter_mut().for_each(|x| *x = 0.0);
        for c in 0..trellis.num_checks() {
            let edges = trellis.chk_edges(c);
            let d = edges.len();
            let mut any = false;
            for (j, &eid) in edges.iter().enumerate() {
                let eid = eid as usize;
                scratch.xs[j] = tape.odd_x[t][eid];
                let u = scratch.g_even[eid];
                scratch.up[j] = if u != 0.0 && !tape.even_sat[t][eid] {
                    let p = tape.even_p[t][eid];
                    any = true;
                    u * 2.0 / (1.0 - p * p)
                } else {
                    0.0
                };
            }
            if !any {
                continue;
            }
            for j in 0..d {
                let dj = scratch.up[j];
                if dj == 0.0 {
                    continue;
                }
                // Leave-one-out over the inputs with position j excluded.
                let m = d - 1;
                scratch.pre[0] = 1.0;
                for kk in 0..m {
                    let src = if kk < j { kk } else { kk + 1 };
                    scratch.pre[kk + 1] = scratch.pre[kk] * scratch.xs[src];
                }
                scratch.suf[m] = 1.0;
                for kk in (0..m).rev() {
                    let src = if kk < j { kk } else { kk + 1 };
                    scratch.suf[kk] = scratch.xs[src] * scratch.suf[kk + 1];
                }
                for kk in 0..m {
                    let src = if kk < j { kk } else { kk + 1 };
                    let partial = scratch.pre[kk] * scratch.suf[kk + 1];
                    scratch.g_odd[edges[src] as usize] += dj * partial;
                }
            }
        }

        // Odd layer backward: x = tanh(s/2), s clipped.
        scratch.g_even_prev.iter_mut().for_each(|x| *x = 0.0);
        let w_edge = weights.hidden_edge(t);
        let (g_self, g_edge) = grad.hidden_group_mut(t);
        for eid in 0..e {
            let gx = scratch.g_odd[eid];
            if gx == 0.0 || tape.odd_sat[t][eid] {
                continue;
            }
            let x = tape.odd_x[t][eid];
            let ds = gx * 0.5 * (1.0 - x * x);
            let v = trellis.edge_var(eid);
            g_self[v] += ds * tape.llr[v];
            if t > 0 {
                let base = trellis.vn_base(eid);
                let prev_even = &tape.even_x[t - 1];
                for (j, &input) in trellis.vn_inputs(eid).iter().enumerate() {
                    scratch.g_even_prev[input as usize] += ds * w_edge[base + j];
                    g_edge[base + j] += ds * prev_even[input as usize];
                }
            }
        }
        std::mem::swap(&mut scratch.g_even, &mut scratch.g_even_prev);
    }

    Ok(())
}
