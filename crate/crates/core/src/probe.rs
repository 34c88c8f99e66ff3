//! Probe families: the coefficient vectors the lower-bound estimators
//! maximize over. Layered geometric magnitudes mirror the band structure the
//! proof-style extremizers have; sign indicators cover the constant-coefficient
//! parameters; seeded random vectors add bulk coverage.

use alloc::vec;
use alloc::vec::Vec;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::sets;

#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub seed: u64,
    pub random_count: usize,
    /// Max support size for the exhaustive signed-indicator block.
    pub support_cap: usize,
    pub grid_s: f64,
    pub grid_levels: usize,
    /// When set, random magnitudes snap to the geometric grid `s^-j`, so the
    /// whole family stays inside the exhaustive-oracle search space.
    pub grid_valued: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            seed: 11,
            random_count: 64,
            support_cap: 3,
            grid_s: 2.0,
            grid_levels: 6,
            grid_valued: true,
        }
    }
}

/// A deterministic list of coefficient-space probe vectors with sup-norm 1.
#[derive(Debug, Clone)]
pub struct ProbeFamily {
    vectors: Vec<Vec<f64>>,
    grid_valued: bool,
}

/// The exhaustive signed-indicator block stops growing past this many
/// vectors (large dimensions would otherwise swamp the family).
const INDICATOR_BLOCK_CAP: usize = 8192;

impl ProbeFamily {
    /// Start from nothing and add vectors by hand (estimators reject an
    /// empty family).
    pub fn empty() -> ProbeFamily {
        ProbeFamily {
            vectors: Vec::new(),
            grid_valued: false,
        }
    }

    pub fn build(dim: usize, cfg: &ProbeConfig) -> ProbeFamily {
        let mut vectors = Vec::new();

        // (i) signed indicators on supports up to the cap
        let cap = cfg.support_cap.min(dim);
        for k in 1..=cap {
            sets::for_each_subset_of_size(dim, k, |mask| {
                if vectors.len() >= INDICATOR_BLOCK_CAP {
                    return;
                }
                let indices = sets::mask_indices(mask, dim);
                for sign_mask in 0..(1u32 << k) {
                    let mut v = vec![0.0; dim];
                    for (pos, &j) in indices.iter().enumerate() {
                        v[j] = if sign_mask >> pos & 1 == 1 { -1.0 } else { 1.0 };
                    }
                    vectors.push(v);
                }
            });
        }

        // (ii) layered staircases: bands of width w at consecutive grid levels
        for w in 1..=dim {
            for alternate in [false, true] {
                let mut v = vec![0.0; dim];
                for i in 0..dim {
                    let level = (i / w).min(cfg.grid_levels);
                    let sign = if alternate && i % 2 == 1 { -1.0 } else { 1.0 };
                    v[i] = sign * math::powf(cfg.grid_s, -(level as f64));
                }
                vectors.push(v);
            }
        }

        // (iii) seeded random vectors
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.random_count {
            let mut v = vec![0.0; dim];
            let mut nonzero = false;
            for slot in v.iter_mut() {
                if rng.random_range(0..4) == 0 {
                    continue;
                }
                let sign = if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
                let mag = if cfg.grid_valued {
                    let level: u32 = rng.random_range(0..=cfg.grid_levels as u32);
                    math::powf(cfg.grid_s, -(level as f64))
                } else {
                    rng.random_range(1e-6..1.0)
                };
                *slot = sign * mag;
                nonzero = true;
            }
            if !nonzero {
                v[rng.random_range(0..dim)] = 1.0;
            }
            vectors.push(v);
        }

        ProbeFamily {
            vectors,
            grid_valued: cfg.grid_valued,
        }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn grid_valued(&self) -> bool {
        self.grid_valued
    }

    /// Import a witness coefficient vector from another estimator, renormalized
    /// to sup-norm 1 so it stays inside the coefficient unit ball.
    pub fn add_witness_vector(&mut self, coeffs: &[f64]) {
        let peak = math::max_abs(coeffs);
        if peak == 0.0 {
            return;
        }
        let v: Vec<f64> = coeffs.iter().map(|c| c / peak).collect();
        if !self.vectors.contains(&v) {
            self.grid_valued = false;
            self.vectors.push(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_is_deterministic_and_in_the_unit_ball() {
        let cfg = ProbeConfig::default();
        let a = ProbeFamily::build(5, &cfg);
        let b = ProbeFamily::build(5, &cfg);
        assert_eq!(a.vectors(), b.vectors());
        assert!(!a.is_empty());
        for v in a.vectors() {
            assert!(math::max_abs(v) <= 1.0 + 1e-15);
            assert!(math::max_abs(v) > 0.0);
        }
    }

    #[test]
    fn contains_single_coordinate_probes() {
        let fam = ProbeFamily::build(4, &ProbeConfig::default());
        for j in 0..4 {
            let mut e = vec![0.0; 4];
            e[j] = 1.0;
            assert!(fam.vectors().contains(&e));
        }
    }

    #[test]
    fn witness_import_renormalizes() {
        let mut fam = ProbeFamily::build(3, &ProbeConfig::default());
        let before = fam.len();
        fam.add_witness_vector(&[0.0, 4.0, -2.0]);
        assert_eq!(fam.len(), before + 1);
        assert_eq!(fam.vectors().last().unwrap(), &vec![0.0, 1.0, -0.5]);
    }
}
