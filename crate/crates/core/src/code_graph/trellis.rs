//! The unrolled message-passing trellis.
//!
//! L full flooding iterations of belief propagation unroll into 2L hidden
//! layers of width E (one processing element per Tanner-graph edge per
//! layer), plus an output marginalization layer of width N. The layout
//! precomputes, for every edge e = (v, c):
//!
//! - `vn_inputs(e)`: the edges e' = (v, c'), c' ≠ c feeding the odd
//!   (variable-side) element of e;
//! - `cn_inputs(e)`: the edges e' = (v', c), v' ≠ v feeding the even
//!   (check-side) element of e;
//! - `out_inputs(v)`: all edges of v, the fan-in of the marginalization.
//!
//! The layout is a pure function of the parity-check matrix and L;
//! recompiling yields identical index tables.

use super::{Edge, ParityCheckCode};

#[derive(Debug, Clone, PartialEq)]
pub struct TrellisLayout {
    iterations: usize,
    n: usize,
    m: usize,
    edges: Vec<Edge>,
    var_off: Vec<u32>,
    chk_edges_flat: Vec<u32>,
    chk_off: Vec<u32>,
    vn_inputs_flat: Vec<u32>,
    vn_off: Vec<u32>,
    cn_inputs_flat: Vec<u32>,
    cn_off: Vec<u32>,
}

impl TrellisLayout {
    /// Number of full BP iterations L.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Number of hidden layers, 2L.
    pub fn hidden_layers(&self) -> usize {
        2 * self.iterations
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Variable node of edge `e`.
    pub fn edge_var(&self, e: usize) -> usize {
        self.edges[e].v as usize
    }

    /// Check node of edge `e`.
    pub fn edge_chk(&self, e: usize) -> usize {
        self.edges[e].c as usize
    }

    /// Input edges of the odd-layer element of edge `e`: same variable,
    /// other checks. Ascending edge ids.
    pub fn vn_inputs(&self, e: usize) -> &[u32] {
        &self.vn_inputs_flat[self.vn_off[e] as usize..self.vn_off[e + 1] as usize]
    }

    /// Input edges of the even-layer element of edge `e`: same check,
    /// other variables. Ascending edge ids.
    pub fn cn_inputs(&self, e: usize) -> &[u32] {
        &self.cn_inputs_flat[self.cn_off[e] as usize..self.cn_off[e + 1] as usize]
    }

    /// Marginalization fan-in of variable `v`: all of its edges. Thanks to
    /// the canonical column-major edge order this is a contiguous id range.
    pub fn out_inputs(&self, v: usize) -> std::ops::Range<usize> {
        self.var_off[v] as usize..self.var_off[v + 1] as usize
    }

    pub fn var_degree(&self, v: usize) -> usize {
        (self.var_off[v + 1] - self.var_off[v]) as usize
    }

    pub fn chk_degree(&self, c: usize) -> usize {
        (self.chk_off[c + 1] - self.chk_off[c]) as usize
    }

    /// Edge ids incident to check `c`, ascending.
    pub fn chk_edges(&self, c: usize) -> &[u32] {
        &self.chk_edges_flat[self.chk_off[c] as usize..self.chk_off[c + 1] as usize]
    }

    /// Largest check degree; sizes the per-check scratch buffers.
    pub fn max_chk_degree(&self) -> usize {
        (0..self.m).map(|c| self.chk_degree(c)).max().unwrap_or(0)
    }

    /// Offset of edge `e`'s block inside the flat `vn_inputs` indexing;
    /// edge-weight vectors use the same flat layout.
    pub fn vn_base(&self, e: usize) -> usize {
        self.vn_off[e] as usize
    }

    /// Total number of (e, e') pairs, i.e. Σ_v d_v (d_v − 1).
    pub fn vn_total(&self) -> usize {
        self.vn_inputs_flat.len()
    }

    /// Syndrome check against the layout's own adjacency.
    pub fn syndrome_ok(&self, bits: &[u8]) -> bool {
        (0..self.m).all(|c| {
            self.chk_edges(c)
                .iter()
                .fold(0u8, |acc, &eid| acc ^ (bits[self.edges[eid as usize].v as usize] & 1))
                == 0
        })
    }
}

/// Compile the unrolled trellis for `iterations` ≥ 1 full BP iterations.
pub fn compile_trellis(code: &ParityCheckCode, iterations: usize) -> TrellisLayout {
    assert!(iterations >= 1, "at least one iteration required");
    let n = code.n();
    let m = code.num_checks();
    let num_edges = code.num_edges();
    let edges = code.edges().to_vec();

    let var_off: Vec<u32> = (0..=n)
        .map(|v| if v == 0 { 0 } else { code.var_edges(v - 1).end as u32 })
        .collect();
    let chk_off: Vec<u32> = {
        let mut off = vec![0u32; m + 1];
        for c in 0..m {
            off[c + 1] = off[c] + code.chk_degree(c) as u32;
        }
        off
    };
    let chk_edges_flat: Vec<u32> = (0..m).flat_map(|c| code.chk_edges(c).iter().copied()).collect();

    let mut vn_off = vec![0u32; num_edges + 1];
    let mut vn_inputs_flat = Vec::new();
    let mut cn_off = vec![0u32; num_edges + 1];
    let mut cn_inputs_flat = Vec::new();
    for e in 0..num_edges {
        let v = edges[e].v as usize;
        for sibling in code.var_edges(v) {
            if sibling != e {
                vn_inputs_flat.push(sibling as u32);
            }
        }
        vn_off[e + 1] = vn_inputs_flat.len() as u32;

        let c = edges[e].c as usize;
        for &sibling in code.chk_edges(c) {
            if sibling as usize != e {
                cn_inputs_flat.push(sibling);
            }
        }
        cn_off[e + 1] = cn_inputs_flat.len() as u32;
    }

    TrellisLayout {
        iterations,
        n,
        m,
        edges,
        var_off,
        chk_edges_flat,
        chk_off,
        vn_inputs_flat,
        vn_off,
        cn_inputs_flat,
        cn_off,
    }
}

/// Exact number of trainable scalars for a weighted decoder on `layout`.
///
/// Each odd hidden layer owns N self-LLR weights plus one weight per
/// (e, e') input pair; the output marginalization owns N + E weights. With
/// `multiloss`, every iteration gets its own marginalization group instead
/// of only the last.
pub fn count_parameters(layout: &TrellisLayout, multiloss: bool) -> usize {
    let l = layout.iterations();
    let per_odd = layout.n() + layout.vn_total();
    let per_readout = layout.n() + layout.num_edges();
    l * per_odd + per_readout * if multiloss { l } else { 1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_graph::construct_bch;

    #[test]
    fn bch_15_11_layout_dimensions() {
        let code = construct_bch(4, 1).unwrap();
        let layout = compile_trellis(&code, 5);
        assert_eq!(layout.hidden_layers(), 10);
        assert_eq!(layout.num_edges(), 32);
        for e in 0..layout.num_edges() {
            let v = layout.edge_var(e);
            let c = layout.edge_chk(e);
            assert_eq!(layout.vn_inputs(e).len(), layout.var_degree(v) - 1);
            assert_eq!(layout.cn_inputs(e).len(), layout.chk_degree(c) - 1);
        }
        for v in 0..layout.n() {
            assert_eq!(layout.out_inputs(v).len(), layout.var_degree(v));
        }
    }

    #[test]
    fn degree_one_variable_has_empty_vn_inputs() {
        let code = crate::code_graph::ParityCheckCode::from_edges(
            3,
            1,
            vec![(0, 0), (1, 0), (2, 0)],
        )
        .unwrap();
        let layout = compile_trellis(&code, 1);
        for e in 0..3 {
            assert!(layout.vn_inputs(e).is_empty());
            assert_eq!(layout.cn_inputs(e).len(), 2);
        }
    }

    #[test]
    fn two_by_two_all_ones() {
        let code = crate::code_graph::ParityCheckCode::from_edges(
            2,
            2,
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        )
        .unwrap();
        let layout = compile_trellis(&code, 2);
        for e in 0..4 {
            assert_eq!(layout.vn_inputs(e).len(), 1);
            assert_eq!(layout.cn_inputs(e).len(), 1);
        }
    }

    #[test]
    fn compilation_is_deterministic() {
        let code = construct_bch(5, 2).unwrap();
        let a = compile_trellis(&code, 3);
        let b = compile_trellis(&code, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn parameter_counts_match_brute_force() {
        // Independent oracle: recompute the counts straight from the
        // variable degrees of H.
        let code = construct_bch(4, 1).unwrap();
        let n = code.n();
        let pair_count: usize = (0..n)
            .map(|v| code.var_degree(v) * (code.var_degree(v) - 1))
            .sum();
        assert_eq!(pair_count, 48);
        let e = code.num_edges();

        let l5 = compile_trellis(&code, 5);
        assert_eq!(count_parameters(&l5, false), 5 * (n + pair_count) + (n + e));
        assert_eq!(count_parameters(&l5, false), 362);
        assert_eq!(count_parameters(&l5, true), 5 * (n + pair_count) + 5 * (n + e));
        assert_eq!(count_parameters(&l5, true), 550);

        let l1 = compile_trellis(&code, 1);
        assert_eq!(count_parameters(&l1, false), 110);
    }
}
