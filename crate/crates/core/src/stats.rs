//! Small statistics kit: means, standard errors, Kolmogorov–Smirnov tests.

/// Arithmetic mean. `None` for an empty slice.
pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Standard error of the mean with the `n - 1` variance. `None` below two samples.
pub fn standard_error(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let n = xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    Some((var / n).sqrt())
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // series converges slowly here and the value is 1 to double precision
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Supremum distance between the CDFs.
    pub statistic: f64,
    /// Effective sample size used for the p-value.
    pub n_eff: f64,
    pub p_value: f64,
}

impl KsResult {
    fn new(statistic: f64, n_eff: f64) -> Self {
        let sq = n_eff.sqrt();
        // Stephens' small-sample correction
        let lambda = (sq + 0.12 + 0.11 / sq) * statistic;
        KsResult { statistic, n_eff, p_value: kolmogorov_sf(lambda) }
    }

    /// Whether the null hypothesis survives at level `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// One-sample KS test of `samples` against a continuous CDF. Sorts in place.
pub fn ks_one_sample(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    KsResult::new(d, n)
}

/// Two-sample KS test. Sorts both inputs in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> KsResult {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    KsResult::new(d, n_eff)
}

/// Pearson chi-square statistic of observed counts against equal expected counts.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    #[test]
    fn mean_and_se() {
        assert_eq!(mean(&[]), None);
        assert!((mean(&[0.7; 10]).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(standard_error(&[1.0]), None);
        let se = standard_error(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        // sample sd = sqrt(5/3), se = sd / 2
        assert!((se - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_reference_points() {
        // classical critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(5.0) < 1e-20);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shifted() {
        let mut rng = SimRng::new(1);
        let mut xs: Vec<f64> = (0..10_000).map(|_| rng.unit()).collect();
        assert!(ks_one_sample(&mut xs, |x| x.clamp(0.0, 1.0)).passes(0.01));
        let mut ys: Vec<f64> = (0..10_000).map(|_| rng.unit().powf(1.2)).collect();
        assert!(!ks_one_sample(&mut ys, |x| x.clamp(0.0, 1.0)).passes(0.01));
    }

    #[test]
    fn two_sample_ks() {
        let mut rng = SimRng::new(2);
        let mut a: Vec<f64> = (0..500).map(|_| rng.unit()).collect();
        let mut b: Vec<f64> = (0..700).map(|_| rng.unit()).collect();
        assert!(ks_two_sample(&mut a, &mut b).passes(0.01));
        let mut c: Vec<f64> = (0..700).map(|_| rng.unit() + 0.2).collect();
        assert!(!ks_two_sample(&mut a, &mut c).passes(0.01));
        // identical samples have distance zero
        let mut d = a.clone();
        assert_eq!(ks_two_sample(&mut a, &mut d).statistic, 0.0);
    }

    #[test]
    fn chi_square_of_exact_counts_is_zero() {
        assert_eq!(chi_square_uniform(&[5, 5, 5, 5]), 0.0);
        assert!((chi_square_uniform(&[6, 4]) - 0.4).abs() < 1e-15);
    }
}
