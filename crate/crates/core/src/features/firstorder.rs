//! The 16 first-order intensity statistics, computed over raw HU in the ROI.

use super::{FeatureError, FeatureVector, DEFAULT_BIN_WIDTH};
use crate::stats;
use crate::volume::{BinaryMask, ScalarVolume};

pub const FIRST_ORDER_IDS: [&str; 16] = [
    "firstorder_Minimum",
    "firstorder_Maximum",
    "firstorder_Mean",
    "firstorder_Median",
    "firstorder_Range",
    "firstorder_Variance",
    "firstorder_Skewness",
    "firstorder_Kurtosis",
    "firstorder_MeanAbsoluteDeviation",
    "firstorder_RobustMeanAbsoluteDeviation",
    "firstorder_RootMeanSquared",
    "firstorder_Percentile10",
    "firstorder_Percentile90",
    "firstorder_InterquartileRange",
    "firstorder_Entropy",
    "firstorder_Uniformity",
];

pub fn first_order_features(
    v: &ScalarVolume,
    roi: &BinaryMask,
) -> Result<FeatureVector, FeatureError> {
    if !roi.matches_volume(v) {
        return Err(FeatureError::GeometryMismatch);
    }
    let xs: Vec<f64> = v
        .data
        .iter()
        .zip(&roi.data)
        .filter(|(_, &b)| b)
        .map(|(&x, _)| x)
        .collect();
    if xs.is_empty() {
        return Err(FeatureError::EmptyRoi);
    }
    let n = xs.len() as f64;
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = stats::mean(&xs);
    let p10 = stats::percentile(&xs, 10.0);
    let p25 = stats::percentile(&xs, 25.0);
    let p75 = stats::percentile(&xs, 75.0);
    let p90 = stats::percentile(&xs, 90.0);
    let mad = xs.iter().map(|x| (x - mean).abs()).sum::<f64>() / n;
    let robust: Vec<f64> = xs.iter().cloned().filter(|&x| x >= p10 && x <= p90).collect();
    let rmad = if robust.is_empty() {
        0.0
    } else {
        let rm = stats::mean(&robust);
        robust.iter().map(|x| (x - rm).abs()).sum::<f64>() / robust.len() as f64
    };
    let rms = (xs.iter().map(|x| x * x).sum::<f64>() / n).sqrt();

    // Entropy/Uniformity over the fixed 25-HU histogram.
    let mut counts = std::collections::BTreeMap::new();
    for &x in &xs {
        let bin = ((x - min) / DEFAULT_BIN_WIDTH).floor() as i64;
        *counts.entry(bin).or_insert(0usize) += 1;
    }
    let mut entropy = 0.0;
    let mut uniformity = 0.0;
    for (_, c) in counts {
        let p = c as f64 / n;
        entropy -= p * p.log2();
        uniformity += p * p;
    }

    let mut out = FeatureVector::new();
    out.push("firstorder_Minimum", min);
    out.push("firstorder_Maximum", max);
    out.push("firstorder_Mean", mean);
    out.push("firstorder_Median", stats::median(&xs));
    out.push("firstorder_Range", max - min);
    out.push("firstorder_Variance", stats::variance(&xs));
    out.push("firstorder_Skewness", stats::skewness(&xs));
    out.push("firstorder_Kurtosis", stats::kurtosis(&xs));
    out.push("firstorder_MeanAbsoluteDeviation", mad);
    out.push("firstorder_RobustMeanAbsoluteDeviation", rmad);
    out.push("firstorder_RootMeanSquared", rms);
    out.push("firstorder_Percentile10", p10);
    out.push("firstorder_Percentile90", p90);
    out.push("firstorder_InterquartileRange", p75 - p25);
    out.push("firstorder_Entropy", entropy);
    out.push("firstorder_Uniformity", uniformity);
    Ok(out)
}
