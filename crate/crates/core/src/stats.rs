//! Small statistical helpers shared by the ERP interval analysis and the
//! evaluation harness.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

pub fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && x[order[j]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Two-sided paired t-test of `a - b`.
///
/// Identical samples give `t = 0, p = 1`. A non-zero constant difference has
/// no finite statistic and is an error.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = mean(&d);
    let var = variance(&d);
    let df = (n - 1) as f64;
    if var == 0.0 {
        if m == 0.0 {
            return Ok(TTest { t: 0.0, df, p: 1.0 });
        }
        return Err(Error::ConstantDifference(m));
    }
    let t = m / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    let p = (2.0 * (1.0 - dist.cdf(t.abs()))).min(1.0);
    Ok(TTest { t, df, p })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// Mann–Whitney U of the first sample.
    pub u: f64,
    pub z: f64,
    /// One-sided p-value for the first sample being stochastically larger.
    pub p_greater: f64,
    pub p_two_sided: f64,
}

/// Wilcoxon rank-sum (Mann–Whitney) test, normal approximation with tie
/// correction.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = average_ranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let u = r1 - n1f * (n1f + 1.0) / 2.0;
    let mu = n1f * n2f / 2.0;

    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(RankSumTest {
            u,
            z: 0.0,
            p_greater: 0.5,
            p_two_sided: 1.0,
        });
    }
    let z = (u - mu) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(RankSumTest {
        u,
        z,
        p_greater: 1.0 - normal.cdf(z),
        p_two_sided: (2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[0.9, 0.1, 0.5, 0.5]), vec![4.0, 1.0, 2.5, 2.5]);
    }

    #[test]
    fn identical_pairs_give_zero_statistic() {
        let x = [1.0, 2.0, 5.0];
        let t = paired_t_test(&x, &x).unwrap();
        assert_eq!((t.t, t.p), (0.0, 1.0));
    }

    #[test]
    fn constant_difference_is_an_error() {
        let err = paired_t_test(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::ConstantDifference(d) if d == 1.0));
        assert!(paired_t_test(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn paired_t_matches_hand_computation() {
        // d = (1, 2, 3, 6): mean 3, var 14/3, t = 3 / sqrt(14/12).
        let t = paired_t_test(&[2.0, 4.0, 6.0, 10.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((t.t - 3.0 / (14.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert_eq!(t.df, 3.0);
        // t = 2.7775 with 3 df: tabulated two-sided p lies between 0.05 and 0.1.
        assert!(t.p > 0.05 && t.p < 0.1, "{}", t.p);
    }

    #[test]
    fn paired_t_is_calibrated_under_the_null() {
        let mut significant = 0;
        for seed in 0..1000u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a: Vec<f64> = (0..15).map(|_| StandardNormal.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..15).map(|_| StandardNormal.sample(&mut rng)).collect();
            if paired_t_test(&a, &b).unwrap().p <= 0.05 {
                significant += 1;
            }
        }
        // p > 0.05 in at least 90% of seeds.
        assert!(significant <= 100, "{significant}");
    }

    #[test]
    fn rank_sum_detects_shift() {
        let a: Vec<f64> = (0..30).map(|i| i as f64 + 10.0).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let r = rank_sum_test(&a, &b).unwrap();
        assert!(r.p_greater < 0.01);
        assert!(r.u > 450.0);
        let same = rank_sum_test(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(same.p_two_sided, 1.0);
    }
}
