use serde::{Deserialize, Serialize};

/// Mean, range and sample standard deviation of a set of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// (count − 1) divisor; unavailable below two values.
    pub sd: Option<f64>,
}

impl SummaryStats {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return SummaryStats {
                count,
                mean: None,
                min: None,
                max: None,
                sd: None,
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let sd = (count >= 2).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (count - 1) as f64).sqrt()
        });
        SummaryStats {
            count,
            mean: Some(mean),
            min: values.iter().copied().reduce(f64::min),
            max: values.iter().copied().reduce(f64::max),
            sd,
        }
    }
}
