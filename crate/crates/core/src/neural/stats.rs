//! Per-group weight statistics and histograms, rendered as plain text.

use super::weights::WeightSet;

/// Statistics for one weight group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub name: String,
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
    /// (bin lower edge, bin upper edge, count); empty for empty groups.
    pub histogram: Vec<(f64, f64, usize)>,
}

impl GroupStats {
    fn from_values(name: String, values: &[f64], bins: usize) -> Self {
        let count = values.len();
        if count == 0 {
            return GroupStats {
                name,
                count,
                min: f64::NAN,
                max: f64::NAN,
                mean: f64::NAN,
                variance: f64::NAN,
                histogram: Vec::new(),
            };
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;

        let histogram = if min == max {
            // Degenerate spread: a single bin holds everything.
            vec![(min, max, count)]
        } else {
            let width = (max - min) / bins as f64;
            let mut hist: Vec<(f64, f64, usize)> = (0..bins)
                .map(|b| (min + b as f64 * width, min + (b + 1) as f64 * width, 0))
                .collect();
            for &v in values {
                let idx = (((v - min) / width) as usize).min(bins - 1);
                hist[idx].2 += 1;
            }
            hist
        };
        GroupStats {
            name,
            count,
            min,
            max,
            mean,
            variance,
            histogram,
        }
    }
}

/// Statistics for all groups of a weight set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStats {
    pub groups: Vec<GroupStats>,
    pub bins: usize,
}

/// Summarize every weight group: per-layer self and edge groups following
/// the canonical order, then the marginalization groups.
pub fn weight_stats(weights: &WeightSet, bins: usize) -> WeightStats {
    assert!(bins >= 1, "at least one histogram bin required");
    let layout = weights.layout();
    let mut groups = Vec::new();
    for t in 0..layout.iterations() {
        groups.push(GroupStats::from_values(
            format!("hidden[{t}].self"),
            weights.hidden_self(t),
            bins,
        ));
        groups.push(GroupStats::from_values(
            format!("hidden[{t}].edge"),
            weights.hidden_edge(t),
            bins,
        ));
    }
    for r in 0..layout.readout_count() {
        let name = if layout.multiloss() && r + 1 < layout.readout_count() {
            format!("readout[{r}]")
        } else {
            "readout[final]".to_string()
        };
        groups.push(GroupStats::from_values(
            format!("{name}.self"),
            weights.readout_self(r),
            bins,
        ));
        groups.push(GroupStats::from_values(
            format!("{name}.edge"),
            weights.readout_edge(r),
            bins,
        ));
    }
    WeightStats { groups, bins }
}

impl std::fmt::Display for WeightStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<20} {:>8} {:>12} {:>12} {:>12} {:>12}",
            "group", "count", "min", "max", "mean", "variance"
        )?;
        for g in &self.groups {
            writeln!(
                f,
                "{:<20} {:>8} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                g.name, g.count, g.min, g.max, g.mean, g.variance
            )?;
        }
        for g in &self.groups {
            if g.histogram.is_empty() {
                continue;
            }
            writeln!(f, "\nhistogram {}", g.name)?;
            for (lo, hi, count) in &g.histogram {
                writeln!(f, "  [{lo:>10.4}, {hi:>10.4})  {count}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_graph::{compile_trellis, construct_bch};
    use crate::neural::{WeightInit, WeightSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_ones_gives_single_bin_and_zero_variance() {
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 2);
        let weights = WeightSet::ones(&trellis, false);
        let stats = weight_stats(&weights, 20);
        for g in &stats.groups {
            assert_eq!(g.histogram.len(), 1);
            assert_eq!(g.histogram[0].2, g.count);
            assert_eq!(g.variance, 0.0);
            assert_eq!(g.min, 1.0);
            assert_eq!(g.max, 1.0);
        }
    }

    #[test]
    fn group_inventory_matches_layout() {
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 3);
        let single = weight_stats(&WeightSet::ones(&trellis, false), 10);
        // 3 hidden layers x 2 groups + 1 readout x 2 groups.
        assert_eq!(single.groups.len(), 8);
        let multi = weight_stats(&WeightSet::ones(&trellis, true), 10);
        assert_eq!(multi.groups.len(), 12);
        let total: usize = multi.groups.iter().map(|g| g.count).sum();
        assert_eq!(total, WeightSet::ones(&trellis, true).len());
    }

    #[test]
    fn histogram_counts_cover_all_values() {
        let code = construct_bch(4, 1).unwrap();
        let trellis = compile_trellis(&code, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let weights = WeightSet::init(
            &trellis,
            false,
            WeightInit::Normal { mean: 1.0, std: 0.4 },
            &mut rng,
        );
        let stats = weight_stats(&weights, 16);
        for g in &stats.groups {
            let total: usize = g.histogram.iter().map(|(_, _, c)| c).sum();
            assert_eq!(total, g.count, "{}", g.name);
            assert!(g.variance > 0.0);
        }
        let text = stats.to_string();
        assert!(text.contains("hidden[0].self"));
        assert!(text.contains("readout[final].edge"));
    }
}
