//! Trainable parameter storage for the weighted decoder.
//!
//! All scalars live in one flat vector in a frozen canonical order:
//!
//! 1. for each iteration t = 0..L−1 (odd hidden layer 2t+1):
//!    N self-LLR weights, then one weight per (e, e') pair, e ascending
//!    and e' in `vn_inputs(e)` order;
//! 2. one marginalization group per readout — N self weights then E edge
//!    weights — a single group for the plain loss, L groups (one per
//!    iteration) for the multiloss variant, last group = final output.
//!
//! Checkpoints, gradients and the optimizer all share this layout.

use crate::code_graph::{count_parameters, TrellisLayout};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use std::ops::Range;

/// Shape metadata tying a flat parameter vector to a trellis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightLayout {
    iterations: usize,
    n: usize,
    num_edges: usize,
    vn_total: usize,
    multiloss: bool,
}

impl WeightLayout {
    pub fn new(layout: &TrellisLayout, multiloss: bool) -> Self {
        WeightLayout {
            iterations: layout.iterations(),
            n: layout.n(),
            num_edges: layout.num_edges(),
            vn_total: layout.vn_total(),
            multiloss,
        }
    }

    pub(crate) fn from_parts(
        iterations: usize,
        n: usize,
        num_edges: usize,
        vn_total: usize,
        multiloss: bool,
    ) -> Self {
        WeightLayout {
            iterations,
            n,
            num_edges,
            vn_total,
            multiloss,
        }
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn vn_total(&self) -> usize {
        self.vn_total
    }

    pub fn multiloss(&self) -> bool {
        self.multiloss
    }

    /// Number of marginalization groups (1, or L under multiloss).
    pub fn readout_count(&self) -> usize {
        if self.multiloss {
            self.iterations
        } else {
            1
        }
    }

    fn per_odd(&self) -> usize {
        self.n + self.vn_total
    }

    fn per_readout(&self) -> usize {
        self.n + self.num_edges
    }

    /// Total trainable scalar count.
    pub fn total(&self) -> usize {
        self.iterations * self.per_odd() + self.readout_count() * self.per_readout()
    }

    pub(crate) fn hidden_self_range(&self, t: usize) -> Range<usize> {
        debug_assert!(t < self.iterations);
        let base = t * self.per_odd();
        base..base + self.n
    }

    pub(crate) fn hidden_edge_range(&self, t: usize) -> Range<usize> {
        debug_assert!(t < self.iterations);
        let base = t * self.per_odd() + self.n;
        base..base + self.vn_total
    }

    pub(crate) fn readout_self_range(&self, r: usize) -> Range<usize> {
        debug_assert!(r < self.readout_count());
        let base = self.iterations * self.per_odd() + r * self.per_readout();
        base..base + self.n
    }

    pub(crate) fn readout_edge_range(&self, r: usize) -> Range<usize> {
        debug_assert!(r < self.readout_count());
        let base = self.iterations * self.per_odd() + r * self.per_readout() + self.n;
        base..base + self.num_edges
    }

    /// Must hold before weights built from this layout touch `trellis`.
    pub fn compatible_with(&self, trellis: &TrellisLayout) -> Result<()> {
        if self.iterations != trellis.iterations()
            || self.n != trellis.n()
            || self.num_edges != trellis.num_edges()
            || self.vn_total != trellis.vn_total()
        {
            return Err(Error::LayoutMismatch(format!(
                "weights built for L={} n={} E={} pairs={}, trellis has L={} n={} E={} pairs={}",
                self.iterations,
                self.n,
                self.num_edges,
                self.vn_total,
                trellis.iterations(),
                trellis.n(),
                trellis.num_edges(),
                trellis.vn_total()
            )));
        }
        Ok(())
    }
}

/// How fresh weights are initialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightInit {
    /// All weights 1.0: the decoder starts exactly at plain BP.
    Ones,
    /// Gaussian around `mean` with deviation `std`.
    Normal { mean: f64, std: f64 },
}

/// The full trainable parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    layout: WeightLayout,
    values: Vec<f64>,
}

/// Per-parameter loss gradient, same flat layout as [`WeightSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    layout: WeightLayout,
    values: Vec<f64>,
}

macro_rules! shared_accessors {
    ($ty:ident) => {
        impl $ty {
            pub fn layout(&self) -> &WeightLayout {
                &self.layout
            }

            pub fn len(&self) -> usize {
                self.values.len()
            }

            pub fn is_empty(&self) -> bool {
                self.values.is_empty()
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [f64] {
                &mut self.values
            }

            /// Self-LLR weights of odd hidden layer `2t+1`, length N.
            pub fn hidden_self(&self, t: usize) -> &[f64] {
                &self.values[self.layout.hidden_self_range(t)]
            }

            pub fn hidden_self_mut(&mut self, t: usize) -> &mut [f64] {
                let r = self.layout.hidden_self_range(t);
                &mut self.values[r]
            }

            /// (e, e') weights of odd hidden layer `2t+1`; index with
            /// `TrellisLayout::vn_base(e) + j`.
            pub fn hidden_edge(&self, t: usize) -> &[f64] {
                &self.values[self.layout.hidden_edge_range(t)]
            }

            pub fn hidden_edge_mut(&mut self, t: usize) -> &mut [f64] {
                let r = self.layout.hidden_edge_range(t);
                &mut self.values[r]
            }

            /// Both slices of odd layer `2t+1` at once (self, edge).
            pub fn hidden_group_mut(&mut self, t: usize) -> (&mut [f64], &mut [f64]) {
                let sr = self.layout.hidden_self_range(t);
                let er = self.layout.hidden_edge_range(t);
                debug_assert_eq!(sr.end, er.start);
                let slice = &mut self.values[sr.start..er.end];
                slice.split_at_mut(er.start - sr.start)
            }

            /// Self-LLR weights of marginalization group `r`, length N.
            pub fn readout_self(&self, r: usize) -> &[f64] {
                &self.values[self.layout.readout_self_range(r)]
            }

            pub fn readout_self_mut(&mut self, r: usize) -> &mut [f64] {
                let range = self.layout.readout_self_range(r);
                &mut self.values[range]
            }

            /// Edge weights of marginalization group `r`, length E.
            pub fn readout_edge(&self, r: usize) -> &[f64] {
                &self.values[self.layout.readout_edge_range(r)]
            }

            pub fn readout_edge_mut(&mut self, r: usize) -> &mut [f64] {
                let range = self.layout.readout_edge_range(r);
                &mut self.values[range]
            }
        }
    };
}

shared_accessors!(WeightSet);
shared_accessors!(Gradient);

impl WeightSet {
    /// Fresh weights for `trellis`; see [`WeightInit`].
    pub fn init(
        trellis: &TrellisLayout,
        multiloss: bool,
        init: WeightInit,
        rng: &mut impl Rng,
    ) -> Self {
        let layout = WeightLayout::new(trellis, multiloss);
        let total = layout.total();
        debug_assert_eq!(total, count_parameters(trellis, multiloss));
        let values = match init {
            WeightInit::Ones => vec![1.0; total],
            WeightInit::Normal { mean, std } => (0..total)
                .map(|_| mean + std * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        };
        WeightSet { layout, values }
    }

    /// All-ones weights: exactly plain BP.
    pub fn ones(trellis: &TrellisLayout, multiloss: bool) -> Self {
        let layout = WeightLayout::new(trellis, multiloss);
        let total = layout.total();
        WeightSet {
            layout,
            values: vec![1.0; total],
        }
    }

    pub(crate) fn from_values(layout: WeightLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.total() {
            return Err(Error::LayoutMismatch(format!(
                "expected {} weights, got {}",
                layout.total(),
                values.len()
            )));
        }
        Ok(WeightSet { layout, values })
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Gradient {
    pub fn zeros(layout: WeightLayout) -> Self {
        let total = layout.total();
        Gradient {
            layout,
            values: vec![0.0; total],
        }
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Elementwise accumulate `other` into `self`.
    pub fn add_assign(&mut self, other: &Gradient) {
        assert_eq!(self.layout, other.layout, "gradient layouts must match");
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
