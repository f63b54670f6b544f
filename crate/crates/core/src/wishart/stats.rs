//! Monte Carlo summaries with standard errors.

/// An estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// Standard errors between the estimate and an exact value.
    pub fn z(&self, exact: f64) -> f64 {
        z_score(self.value - exact, self.se)
    }

    /// Joint standard errors between two independent estimates.
    pub fn z_against(&self, other: &Estimate) -> f64 {
        z_score(self.value - other.value, self.se.hypot(other.se))
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff.abs() / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len().max(1) as f64
}

/// Sample mean with standard error `s/√n`.
pub fn mean(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = mean_of(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Estimate { value: m, se: (var / n).sqrt() }
}

/// Sample covariance of paired draws; the standard error is that of the mean of centered products.
pub fn covariance(xs: &[f64], ys: &[f64]) -> Estimate {
    let (mx, my) = (mean_of(xs), mean_of(ys));
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let mut est = mean(&products);
    let n = xs.len() as f64;
    est.value *= n / (n - 1.0).max(1.0);
    est
}

pub fn variance(xs: &[f64]) -> Estimate {
    covariance(xs, xs)
}
