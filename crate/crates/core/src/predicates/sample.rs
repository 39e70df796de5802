//! Deterministic sampling schedules shared by the estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::metric::{ConstantReport, DiscreteSpace, Ratio, VertexId};
use crate::scalar::Scalar;

/// Sampling schedule for a constant estimate.
///
/// Sample `i` draws all of its randomness from its own ChaCha stream
/// `(seed, i)`, so results do not depend on worker count and enlarging
/// `samples` only appends samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub seed: u64,
    /// Number of (center, radius) samples.
    pub samples: usize,
    /// Point pairs per sample.
    pub pairs: usize,
    /// Radius range; in units of the space diameter unless `absolute`.
    pub r_min: f64,
    pub r_max: f64,
    #[serde(default)]
    pub absolute: bool,
    /// Ratio of the geometric search grid for λ-type constants.
    pub grid_ratio: f64,
    /// Largest grid value; reaching it reports failure.
    pub cap: f64,
    /// Discretization slack recorded with every report.
    pub slack: f64,
    /// Number of radii per center for regression-type estimates.
    #[serde(default = "default_radii")]
    pub radii: usize,
    /// Optional fixed centers replacing random center selection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<VertexId>>,
}

fn default_radii() -> usize {
    9
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            seed: 0,
            samples: 64,
            pairs: 8,
            r_min: 0.05,
            r_max: 0.5,
            absolute: false,
            grid_ratio: 1.05,
            cap: 1000.0,
            slack: 1.2,
            radii: default_radii(),
            centers: None,
        }
    }
}

impl SampleSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_pairs(mut self, pairs: usize) -> Self {
        self.pairs = pairs;
        self
    }

    /// Radius range in units of the space diameter.
    pub fn with_relative_radii(mut self, r_min: f64, r_max: f64) -> Self {
        self.r_min = r_min;
        self.r_max = r_max;
        self.absolute = false;
        self
    }

    /// Radius range in absolute length units.
    pub fn with_absolute_radii(mut self, r_min: f64, r_max: f64) -> Self {
        self.r_min = r_min;
        self.r_max = r_max;
        self.absolute = true;
        self
    }

    pub fn with_centers(mut self, centers: Vec<VertexId>) -> Self {
        self.centers = Some(centers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return input("sample count must be at least 1");
        }
        if !(self.r_min > 0.0 && self.r_min <= self.r_max && self.r_max.is_finite()) {
            return input(format!("invalid radius range [{}, {}]", self.r_min, self.r_max));
        }
        if !(self.grid_ratio > 1.0 && self.cap >= 1.0 && self.cap.is_finite()) {
            return input("search grid needs ratio > 1 and a finite cap >= 1");
        }
        Ok(())
    }

    /// Random stream of sample `index`.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Absolute radius range for a space of diameter `diam`.
    pub fn radius_range(&self, diam: f64) -> (f64, f64) {
        if self.absolute {
            (self.r_min, self.r_max)
        } else {
            (self.r_min * diam, self.r_max * diam)
        }
    }

    /// Log-uniform radius in the absolute range.
    pub fn draw_radius(&self, rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
        if range.0 == range.1 {
            return range.0;
        }
        let t: f64 = rng.gen();
        (range.0.ln() + t * (range.1.ln() - range.0.ln())).exp()
    }

    /// Geometric radius ladder from `range.0` to `range.1` with `self.radii` steps.
    pub fn radius_ladder(&self, range: (f64, f64)) -> Vec<f64> {
        let k = self.radii.max(2);
        (0..k)
            .map(|i| {
                let t = i as f64 / (k - 1) as f64;
                (range.0.ln() + t * (range.1.ln() - range.0.ln())).exp()
            })
            .collect()
    }

    /// Center of sample `index`: the fixed list (cycled) or a uniform draw
    /// from `pool`.
    pub fn draw_center(&self, rng: &mut ChaCha8Rng, index: usize, pool: &[VertexId]) -> VertexId {
        match &self.centers {
            Some(c) if !c.is_empty() => c[index % c.len()],
            _ => pool[rng.gen_range(0..pool.len())],
        }
    }

    /// Smallest grid value `ratio^k` (k >= 0) that is `> x` (`strict`) or
    /// `>= x`; `None` when it would exceed the cap.
    pub fn snap(&self, x: f64, strict: bool) -> Option<f64> {
        if x.is_nan() || x.is_infinite() {
            return None;
        }
        let mut k = if x <= 1.0 { 0 } else { (x.ln() / self.grid_ratio.ln()).floor() as i32 };
        loop {
            let g = self.grid_ratio.powi(k);
            if g > self.cap * (1.0 + 1e-12) {
                return None;
            }
            if g > x || (!strict && g >= x) {
                return Some(g);
            }
            k += 1;
        }
    }

    /// Report skeleton carrying this schedule's metadata.
    pub fn report<S: Scalar>(
        &self,
        name: &str,
        reference: &str,
        space: &DiscreteSpace<S>,
        range: (f64, f64),
    ) -> ConstantReport {
        let mut r = ConstantReport::new(name, reference, Ratio::Finite(0.0));
        r.seed = self.seed;
        r.r_min = range.0;
        r.r_max = range.1;
        r.slack = self.slack;
        r.resolution = space.h().as_f64();
        r.samples = 0;
        r
    }
}

/// Per-sample outcome merged by the estimators.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Outcome {
    /// Grid value attained and the raw requirement.
    Value { grid: f64, raw: f64, aux: f64 },
    /// Requirement exceeded the cap.
    Capped { raw: f64, aux: f64 },
    Skipped,
}

/// Folds outcomes in index order into `report` (max-type merge).
pub(crate) fn merge_max(report: &mut ConstantReport, outcomes: &[Outcome], cap: f64) -> (f64, f64) {
    let mut best = 0.0f64;
    let mut raw_max = 0.0f64;
    let mut aux_max = 0.0f64;
    for o in outcomes {
        match *o {
            Outcome::Value { grid, raw, aux } => {
                report.samples += 1;
                best = best.max(grid);
                raw_max = raw_max.max(raw);
                aux_max = aux_max.max(aux);
            }
            Outcome::Capped { raw, aux } => {
                report.samples += 1;
                report.capped = true;
                best = cap;
                raw_max = raw_max.max(raw);
                aux_max = aux_max.max(aux);
            }
            Outcome::Skipped => report.skipped += 1,
        }
    }
    report.value = Ratio::Finite(best);
    (raw_max, aux_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_to_geometric_grid() {
        let s = SampleSpec::default();
        assert_eq!(s.snap(0.5, true), Some(1.0));
        assert_eq!(s.snap(1.0, true), Some(1.05));
        assert_eq!(s.snap(1.0, false), Some(1.0));
        let g = s.snap(3.0, true).unwrap();
        assert!(g > 3.0 && g / 1.05 <= 3.0);
        assert_eq!(s.snap(2000.0, true), None);
        assert_eq!(s.snap(f64::INFINITY, false), None);
    }

    #[test]
    fn streams_are_index_local() {
        let s = SampleSpec::default().with_seed(7);
        let a: u64 = s.rng(3).gen();
        let b: u64 = s.rng(3).gen();
        let c: u64 = s.rng(4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(SampleSpec::default().with_samples(0).validate().is_err());
        assert!(SampleSpec::default().with_relative_radii(0.5, 0.1).validate().is_err());
    }
}
