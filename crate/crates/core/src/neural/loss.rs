//! Cross-entropy objectives over the decoder's soft outputs.
//!
//! The per-example loss is `−(1/N) Σ_v [y_v log o_v + (1−y_v) log(1−o_v)]`
//! with `o_v = σ(z_v)`. It is evaluated on the logits via the identity
//! `−[y log σ(z) + (1−y) log(1−σ(z))] = softplus(z) − y·z`, which is
//! algebraically the same expression but never takes log of 0.
//!
//! The multiloss variant sums the per-readout cross-entropies of all L
//! intermediate marginalizations; each term keeps its own 1/N factor and
//! the sum over readouts is not renormalized.

use super::ForwardTape;
use crate::error::{Error, Result};

/// Which objective to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossKind {
    /// Cross-entropy of the final marginalization only.
    #[default]
    Single,
    /// Sum of cross-entropies over every per-iteration marginalization.
    Multi,
}

impl LossKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LossKind::Single => "single",
            LossKind::Multi => "multiloss",
        }
    }
}

/// Logistic function 1 / (1 + e^{−z}).
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Numerically stable log(1 + e^x).
#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Mean binary cross-entropy of one readout, evaluated on logits.
pub fn cross_entropy_from_logits(logits: &[f64], labels: &[u8]) -> f64 {
    assert_eq!(logits.len(), labels.len(), "label length must equal n");
    let n = logits.len() as f64;
    logits
        .iter()
        .zip(labels.iter())
        .map(|(&z, &y)| softplus(z) - f64::from(y & 1) * z)
        .sum::<f64>()
        / n
}

/// Cross-entropy of the tape's final readout.
pub fn cross_entropy_loss(tape: &ForwardTape, labels: &[u8]) -> f64 {
    cross_entropy_from_logits(tape.final_logits(), labels)
}

/// Sum of per-readout cross-entropies over all L marginalizations.
///
/// Errors unless the tape carries one readout per iteration (i.e. was
/// produced by multiloss weights).
pub fn multiloss(tape: &ForwardTape, labels: &[u8]) -> Result<f64> {
    if tape.readout_count() != tape.iterations() {
        return Err(Error::LayoutMismatch(format!(
            "multiloss needs {} readouts on the tape, found {}",
            tape.iterations(),
            tape.readout_count()
        )));
    }
    Ok(tape
        .logits
        .iter()
        .map(|z| cross_entropy_from_logits(z, labels))
        .sum())
}

/// Dispatch on [`LossKind`].
pub(crate) fn loss_of(tape: &ForwardTape, labels: &[u8], kind: LossKind) -> Result<f64> {
    match kind {
        LossKind::Single => Ok(cross_entropy_loss(tape, labels)),
        LossKind::Multi => multiloss(tape, labels),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_graph::{compile_trellis, construct_bch};
    use crate::neural::{neural_forward, WeightSet};

    /// Logit z with σ(z) = o.
    fn logit(o: f64) -> f64 {
        (o / (1.0 - o)).ln()
    }

    #[test]
    fn uniform_prediction_costs_ln2() {
        let logits = vec![0.0; 8];
        let labels = vec![0u8; 8];
        let loss = cross_entropy_from_logits(&logits, &labels);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn perfect_prediction_of_zero_costs_nothing() {
        let logits = vec![-500.0; 4];
        let labels = vec![0u8; 4];
        let loss = cross_entropy_from_logits(&logits, &labels);
        assert!(loss >= 0.0);
        assert!(loss < 1e-200);
    }

    #[test]
    fn mixed_case_matches_direct_formula() {
        // o = (0.5, sigma(-1)), y = 0: loss = (ln 2 + ln(1/(1-sigma(-1))))/2.
        let logits = vec![0.0, -1.0];
        let labels = vec![0u8, 0];
        let loss = cross_entropy_from_logits(&logits, &labels);
        assert!((loss - 0.5032044340390841).abs() < 1e-15);
    }

    #[test]
    fn loss_is_nonnegative_and_saturating_extremes_are_finite() {
        let logits = vec![1e6, -1e6, 0.0];
        for labels in [[0u8, 0, 0], [1, 1, 1]] {
            let loss = cross_entropy_from_logits(&logits, &labels);
            assert!(loss.is_finite());
            assert!(loss >= 0.0);
        }
    }

    #[test]
    fn ones_labels_mirror_zeros() {
        let logits = vec![0.7, -1.3, 2.0];
        let flipped: Vec<f64> = logits.iter().map(|z| -z).collect();
        let a = cross_entropy_from_logits(&logits, &[0, 0, 0]);
        let b = cross_entropy_from_logits(&flipped, &[1, 1, 1]);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn multiloss_with_one_iteration_degenerates_to_single() {
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 1);
        let weights = WeightSet::ones(&trellis, true);
        let llr: Vec<f64> = (0..15).map(|v| (v as f64 - 7.0) * 0.3).collect();
        let labels = vec![0u8; 15];
        let tape = neural_forward(&trellis, &weights, &llr, 8.0).unwrap();
        let ml = multiloss(&tape, &labels).unwrap();
        let single = cross_entropy_loss(&tape, &labels);
        assert_eq!(ml, single);
    }

    #[test]
    fn multiloss_of_uniform_readouts_is_l_times_ln2() {
        // All-zero weights drive every readout to one half.
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 5);
        let mut weights = WeightSet::ones(&trellis, true);
        weights.values_mut().iter_mut().for_each(|w| *w = 0.0);
        let llr: Vec<f64> = (0..15).map(|v| v as f64 * 0.1).collect();
        let labels = vec![0u8; 15];
        let tape = neural_forward(&trellis, &weights, &llr, 8.0).unwrap();
        let ml = multiloss(&tape, &labels).unwrap();
        assert!((ml - 5.0 * std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn multiloss_hand_case_on_injected_readouts() {
        // Readouts (0.5, 0.4, 0.3, 0.2, 0.1) on a single bit, label 0:
        // the terms are −ln(1−o).
        let readouts = [0.5, 0.4, 0.3, 0.2, 0.1];
        let total: f64 = readouts
            .iter()
            .map(|&o| cross_entropy_from_logits(&[logit(o)], &[0]))
            .sum();
        assert!((total - 1.8891518152367044).abs() < 1e-12);
    }

    #[test]
    fn multiloss_requires_readouts_on_tape() {
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 3);
        let weights = WeightSet::ones(&trellis, false);
        let llr = vec![0.5; 15];
        let labels = vec![0u8; 15];
        let tape = neural_forward(&trellis, &weights, &llr, 8.0).unwrap();
        assert!(multiloss(&tape, &labels).is_err());
        assert!(cross_entropy_loss(&tape, &labels).is_finite());
    }
}
