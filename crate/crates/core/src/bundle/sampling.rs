//! Seeded sample points on `TM`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundle::TangentPoint;
use crate::error::{Error, Result};

/// Axis-aligned box for base points and fibre coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub base: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<Vec<[f64; 2]>>,
}

impl SampleBox {
    pub fn new(base: Vec<[f64; 2]>) -> SampleBox {
        SampleBox { base, fiber: None }
    }

    /// Fibre box, defaulting to `[-1, 1]` per coordinate.
    pub fn fiber_or_default(&self) -> Vec<[f64; 2]> {
        self.fiber.clone().unwrap_or_else(|| vec![[-1.0, 1.0]; self.base.len()])
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.base.len() != n {
            return Err(Error::InvalidSamples(format!(
                "base box has {} intervals, model dimension is {n}",
                self.base.len()
            )));
        }
        if let Some(f) = &self.fiber {
            if f.len() != n {
                return Err(Error::InvalidSamples(format!(
                    "fiber box has {} intervals, model dimension is {n}",
                    f.len()
                )));
            }
        }
        for [lo, hi] in self.base.iter().chain(self.fiber.iter().flatten()) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidSamples(format!("bad interval [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    pub count: usize,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub sample_box: Option<SampleBox>,
}

impl SampleSpec {
    pub fn new(seed: u64, count: usize) -> SampleSpec {
        SampleSpec {
            seed,
            count,
            sample_box: None,
        }
    }

    pub fn with_box(mut self, b: SampleBox) -> SampleSpec {
        self.sample_box = Some(b);
        self
    }

    /// The spec with its box filled in from `default` when absent.
    pub fn resolved(&self, default: &SampleBox) -> SampleSpec {
        let mut b = self.sample_box.clone().unwrap_or_else(|| default.clone());
        if b.fiber.is_none() {
            b.fiber = Some(b.fiber_or_default());
        }
        SampleSpec {
            seed: self.seed,
            count: self.count,
            sample_box: Some(b),
        }
    }

    /// Draw `count` tangent points, uniformly in the box. The same seed
    /// always yields the same points in the same order.
    pub fn points(&self, n: usize, default: &SampleBox) -> Result<Vec<TangentPoint>> {
        if self.count == 0 {
            return Err(Error::InvalidSamples("count must be at least 1".into()));
        }
        let spec = self.resolved(default);
        let b = spec.sample_box.expect("resolved spec has a box");
        b.validate(n)?;
        let fiber = b.fiber_or_default();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut draw = |[lo, hi]: [f64; 2]| if lo == hi { lo } else { rng.gen_range(lo..hi) };
        Ok((0..self.count)
            .map(|_| {
                let x = b.base.iter().map(|iv| draw(*iv)).collect();
                let xi = fiber.iter().map(|iv| draw(*iv)).collect();
                TangentPoint { x, xi }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_points() {
        let b = SampleBox::new(vec![[0.0, 1.0], [2.0, 3.0]]);
        let s = SampleSpec::new(11, 5);
        let p1 = s.points(2, &b).unwrap();
        let p2 = s.points(2, &b).unwrap();
        assert_eq!(p1, p2);
        assert!(p1.iter().all(|p| (0.0..1.0).contains(&p.x[0]) && (2.0..3.0).contains(&p.x[1])));
        assert!(p1.iter().all(|p| p.xi.iter().all(|v| (-1.0..1.0).contains(v))));
    }

    #[test]
    fn empty_sample_set_rejected() {
        let b = SampleBox::new(vec![[0.0, 1.0]]);
        assert!(matches!(SampleSpec::new(1, 0).points(1, &b), Err(Error::InvalidSamples(_))));
    }

    #[test]
    fn box_dimension_checked() {
        let b = SampleBox::new(vec![[0.0, 1.0]]);
        assert!(SampleSpec::new(1, 3).points(2, &b).is_err());
    }
}
