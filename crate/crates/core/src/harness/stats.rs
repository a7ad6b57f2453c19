//! Two-sample pooled-variance Student's t-test.
//!
//! The pooled form matches the reported degrees of freedom
//! `n1 + n2 - 2`. Only the magnitude of t is reported, compared against
//! the three fixed critical values 1.96 / 2.58 / 3.29 (p = 0.05, 0.01,
//! 0.001 at large df).

use crate::error::{Error, Result};

pub const T_CRIT_P05: f64 = 1.96;
pub const T_CRIT_P01: f64 = 2.58;
pub const T_CRIT_P001: f64 = 3.29;

#[derive(Debug, Clone)]
pub struct TTestReport {
    /// |t|; infinity when both variances are zero and the means differ.
    pub t: f64,
    pub n1: usize,
    pub n2: usize,
    pub df: usize,
    pub significant_p05: bool,
    pub significant_p01: bool,
    pub significant_p001: bool,
}

fn mean_and_sample_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

pub fn t_test(sample1: &[f64], sample2: &[f64]) -> Result<TTestReport> {
    let (n1, n2) = (sample1.len(), sample2.len());
    if n1 < 2 || n2 < 2 {
        return Err(Error::contract(format!(
            "t_test requires at least 2 observations per sample, got {n1} and {n2}"
        )));
    }
    let (m1, v1) = mean_and_sample_var(sample1);
    let (m2, v2) = mean_and_sample_var(sample2);
    let df = n1 + n2 - 2;

    let t = if v1 == 0.0 && v2 == 0.0 {
        if m1 == m2 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        let pooled = ((n1 - 1) as f64 * v1 + (n2 - 1) as f64 * v2) / df as f64;
        (m1 - m2).abs() / (pooled * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt()
    };

    Ok(TTestReport {
        t,
        n1,
        n2,
        df,
        significant_p05: t > T_CRIT_P05,
        significant_p01: t > T_CRIT_P01,
        significant_p001: t > T_CRIT_P001,
    })
}

/// Serialize t for CSV output: `inf` for the degenerate all-different case.
pub fn format_t(t: f64) -> String {
    if t.is_infinite() {
        "inf".to_string()
    } else {
        format!("{t}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_samples_give_zero() {
        let s = [1.0, 2.0, 3.0];
        let r = t_test(&s, &s).unwrap();
        assert_eq!(r.t, 0.0);
        assert!(!r.significant_p05);
    }

    #[test]
    fn constant_distinct_samples_give_infinity() {
        let ones = vec![1.0; 200];
        let zeros = vec![0.0; 200];
        let r = t_test(&ones, &zeros).unwrap();
        assert!(r.t.is_infinite());
        assert_eq!(r.df, 398);
        assert!(r.significant_p001);
        assert_eq!(format_t(r.t), "inf");
    }

    #[test]
    fn hand_computed_example() {
        // pooled s^2 = 2.5, se = 1, |diff| = 2 -> t = 2
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [3.0, 4.0, 5.0, 6.0, 7.0];
        let r = t_test(&a, &b).unwrap();
        assert!((r.t - 2.0).abs() <= 1e-12);
        assert_eq!(r.df, 8);
        assert!(r.significant_p05);
        assert!(!r.significant_p01);
    }

    #[test]
    fn symmetry_and_scale_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..10).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let b: Vec<f64> = (0..15).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let ab = t_test(&a, &b).unwrap().t;
            let ba = t_test(&b, &a).unwrap().t;
            assert!((ab - ba).abs() <= 1e-12 * ab.max(1.0));

            let c = 3.5;
            let ac: Vec<f64> = a.iter().map(|x| x * c).collect();
            let bc: Vec<f64> = b.iter().map(|x| x * c).collect();
            let scaled = t_test(&ac, &bc).unwrap().t;
            assert!((scaled - ab).abs() <= 1e-9 * ab.max(1.0));
        }
    }

    #[test]
    fn too_small_samples_rejected() {
        assert!(t_test(&[1.0], &[1.0, 2.0]).is_err());
    }
}
