use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::MeasureError;
use crate::Scalar;

/// Smallest range ever reported, meters.
const RANGE_FLOOR: f64 = 1e-6;

/// Gaussian ranging noise on the path length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtmConfig<T> {
    sigma: T,
}

impl<T: Scalar> FtmConfig<T> {
    pub fn new(sigma_m: T) -> Result<Self, MeasureError> {
        if !(sigma_m >= T::zero() && sigma_m.is_finite()) {
            return Err(MeasureError::InvalidSigma(sigma_m.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { sigma: sigma_m })
    }

    pub fn exact() -> Self {
        Self { sigma: T::zero() }
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }
}

/// `true_length + ε` with `ε ~ N(0, σ²)`, floored at one micrometer so a
/// range is always positive.
pub fn ftm_distance<T, R>(true_length: T, cfg: &FtmConfig<T>, rng: &mut R) -> T
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    debug_assert!(true_length > T::zero());
    if cfg.sigma == T::zero() {
        return true_length;
    }
    let z: T = StandardNormal.sample(rng);
    (true_length + cfg.sigma * z).max(T::lit(RANGE_FLOOR))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_sigma_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(ftm_distance(3.25, &FtmConfig::exact(), &mut rng), 3.25);
    }

    #[test]
    fn centimeter_noise_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = FtmConfig::new(0.01).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| ftm_distance(4.0, &cfg, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 4.0).abs() < 1e-3, "{mean}");
        assert!((var.sqrt() - 0.01).abs() < 1e-3, "{}", var.sqrt());
    }

    #[test]
    fn tiny_range_stays_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = FtmConfig::new(5.0).unwrap();
        assert!((0..10_000).all(|_| ftm_distance(0.001, &cfg, &mut rng) > 0.0));
    }

    #[test]
    fn rejects_negative_sigma() {
        assert!(FtmConfig::new(-0.1).is_err());
        assert!(FtmConfig::new(f64::NAN).is_err());
    }
}
