//! Small summary-statistics helpers used by the Monte Carlo aggregators.
//!
//! Sums are pairwise so that aggregate results do not depend on how
//! replications were batched across worker threads.

/// Pairwise (cascade) summation. Deterministic for a fixed input order and
/// more accurate than a running sum on long Monte Carlo vectors.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() - 1) as f64
}

/// Monte Carlo standard error of the mean: sd / sqrt(n).
pub fn standard_error(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Pearson correlation; NaN when either side is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let cross: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .collect();
    let sxx: Vec<f64> = xs.iter().map(|x| (x - mx) * (x - mx)).collect();
    let syy: Vec<f64> = ys.iter().map(|y| (y - my) * (y - my)).collect();
    let denom = (pairwise_sum(&sxx) * pairwise_sum(&syy)).sqrt();
    pairwise_sum(&cross) / denom
}

/// Large-sample standard error of a sample correlation, (1 - r^2) / sqrt(n - 1).
pub fn correlation_se(r: f64, n: usize) -> f64 {
    if n < 2 {
        return f64::NAN;
    }
    (1.0 - r * r) / ((n - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs = [1.0, 2.0, 3.5, -1.25];
        assert_eq!(pairwise_sum(&xs), 5.25);
    }

    #[test]
    fn mean_and_variance() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        assert!((mean(&xs) - 5.0).abs() < 1e-12);
        assert!((sample_variance(&xs) - 32.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_of_identical_series_is_one() {
        let xs = [0.3, -1.2, 2.0, 0.7, -0.4];
        assert!((correlation(&xs, &xs) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_sign_flip() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((correlation(&xs, &ys) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_is_batch_insensitive() {
        // The same totals regardless of how the caller concatenated chunks.
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.01).collect();
        let total = pairwise_sum(&xs);
        let again = pairwise_sum(&xs);
        assert_eq!(total.to_bits(), again.to_bits());
    }
}
