//! Box-plot statistics and z-score normalization.

use serde::{Deserialize, Serialize};

/// Whisker reach in IQR units.
pub const WHISKER_IQR: f64 = 1.5;

/// Box-plot summary. All statistics are `None` for an empty group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub n: usize,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    /// Smallest value at or above `q1 - 1.5 * IQR`.
    pub whisker_low: Option<f64>,
    /// Largest value at or below `q3 + 1.5 * IQR`.
    pub whisker_high: Option<f64>,
    pub outlier_count: usize,
}

impl BoxStats {
    pub fn empty() -> Self {
        BoxStats {
            n: 0,
            median: None,
            q1: None,
            q3: None,
            whisker_low: None,
            whisker_high: None,
            outlier_count: 0,
        }
    }

    /// # Panics
    /// On NaN input.
    pub fn from_values(values: &[f64]) -> Self {
        assert!(values.iter().all(|v| !v.is_nan()), "box statistics on NaN");
        if values.is_empty() {
            return BoxStats::empty();
        }
        let mut scratch = values.to_vec();
        let q1 = quantile_select(&mut scratch, 0.25);
        let median = quantile_select(&mut scratch, 0.5);
        let q3 = quantile_select(&mut scratch, 0.75);
        let iqr = q3 - q1;
        let lo_fence = q1 - WHISKER_IQR * iqr;
        let hi_fence = q3 + WHISKER_IQR * iqr;
        let mut whisker_low = f64::INFINITY;
        let mut whisker_high = f64::NEG_INFINITY;
        let mut outliers = 0;
        for &v in values {
            if v < lo_fence || v > hi_fence {
                outliers += 1;
            } else {
                whisker_low = whisker_low.min(v);
                whisker_high = whisker_high.max(v);
            }
        }
        BoxStats {
            n: values.len(),
            median: Some(median),
            q1: Some(q1),
            q3: Some(q3),
            whisker_low: Some(whisker_low),
            whisker_high: Some(whisker_high),
            outlier_count: outliers,
        }
    }
}

/// Linear-interpolation quantile (`h = (n - 1) p`) using selection rather
/// than a full sort. Reorders `values`.
pub fn quantile_select(values: &mut [f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    assert!((0.0..=1.0).contains(&p), "quantile level {p} outside [0, 1]");
    let h = (values.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let (_, &mut lo_value, upper) = values.select_nth_unstable_by(lo, f64::total_cmp);
    if frac == 0.0 || upper.is_empty() {
        return lo_value;
    }
    let hi_value = upper.iter().copied().fold(f64::INFINITY, f64::min);
    lo_value + frac * (hi_value - lo_value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScored {
    pub values: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of the raw values.
    pub std: f64,
    /// Zero spread (or fewer than two values): every output is 0.
    pub degenerate: bool,
}

/// `(x - mean) / std` with the population standard deviation.
pub fn zscore(values: &[f64]) -> ZScored {
    let n = values.len();
    if n == 0 {
        return ZScored {
            values: vec![],
            mean: 0.0,
            std: 0.0,
            degenerate: true,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    if std == 0.0 || n < 2 {
        return ZScored {
            values: vec![0.0; n],
            mean,
            std,
            degenerate: true,
        };
    }
    ZScored {
        values: values.iter().map(|v| (v - mean) / std).collect(),
        mean,
        std,
        degenerate: false,
    }
}
