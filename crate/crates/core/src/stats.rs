//! Order-fixed reductions and resampling errors.

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Normalized correlation `mean(xy) / sqrt(mean(x²)·mean(y²))` of paired
/// samples with its leave-one-out jackknife standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationEstimate {
    pub value: f64,
    pub stderr: f64,
    /// False when `mean(x²)·mean(y²)` is too small to divide by.
    pub reliable: bool,
}

/// Below this product of second moments the ratio is reported as unreliable.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-12;

pub fn correlation_jackknife(x: &[f64], y: &[f64]) -> CorrelationEstimate {
    assert_eq!(x.len(), y.len(), "paired samples");
    let n = x.len();
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| a * b));
    let sxx = compensated_sum(x.iter().map(|a| a * a));
    let syy = compensated_sum(y.iter().map(|b| b * b));
    let ratio = |xy: f64, xx: f64, yy: f64, m: f64| {
        let denom = (xx / m) * (yy / m);
        if denom < DEGENERATE_DENOMINATOR {
            None
        } else {
            Some((xy / m) / denom.sqrt())
        }
    };
    let Some(value) = ratio(sxy, sxx, syy, n as f64) else {
        return CorrelationEstimate {
            value: f64::NAN,
            stderr: f64::NAN,
            reliable: false,
        };
    };
    if n < 2 {
        return CorrelationEstimate {
            value,
            stderr: f64::NAN,
            reliable: false,
        };
    }
    let m = (n - 1) as f64;
    let loo: Vec<f64> = (0..n)
        .map(|i| ratio(sxy - x[i] * y[i], sxx - x[i] * x[i], syy - y[i] * y[i], m).unwrap_or(value))
        .collect();
    let loo_mean = mean(&loo);
    let spread = compensated_sum(loo.iter().map(|v| (v - loo_mean).powi(2)));
    CorrelationEstimate {
        value,
        stderr: (m / n as f64 * spread).sqrt(),
        reliable: true,
    }
}
