use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Dataset, FrameEmbedding, LabeledSequence, SequenceLabel};
use crate::error::{Error, Result};

/// Number of view keypoints a sequence's genus trajectory passes through.
const VIEW_KEYPOINTS: usize = 4;

/// Parameters of the synthetic Genus/Differentia generator.
///
/// Every (genus, instance) pair owns one coordinate axis. A genus center sits
/// on the diagonal of its instances' axes, scaled so that distinct genus
/// centers are `differentia_offset` apart; an instance's discriminative view
/// is its genus center displaced by `differentia_offset` along the instance
/// axis. Shared views wander within `genus_spread` of the center along a
/// per-sequence trajectory, and every frame gets up to `noise` of jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_genera: usize,
    pub instances_per_genus: usize,
    pub sequences_with_differentia: usize,
    pub sequences_without_differentia: usize,
    pub frames_per_sequence: usize,
    pub dim: usize,
    pub genus_spread: f64,
    pub differentia_offset: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    /// Five object types with two instances each, five videos with and five
    /// without the discriminative view per instance, three seconds at 60 fps.
    fn default() -> Self {
        SyntheticConfig {
            num_genera: 5,
            instances_per_genus: 2,
            sequences_with_differentia: 5,
            sequences_without_differentia: 5,
            frames_per_sequence: 180,
            dim: 32,
            genus_spread: 0.5,
            differentia_offset: 5.0,
            noise: 0.05,
            seed: 0,
        }
    }
}

impl SyntheticConfig {
    pub fn min_dim(&self) -> usize {
        self.num_genera * self.instances_per_genus
    }

    fn validate(&self) -> Result<()> {
        let counts = [
            ("num_genera", self.num_genera),
            ("instances_per_genus", self.instances_per_genus),
            ("sequences_with_differentia", self.sequences_with_differentia),
            ("sequences_without_differentia", self.sequences_without_differentia),
            ("frames_per_sequence", self.frames_per_sequence),
            ("dim", self.dim),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive")));
        }
        if self.dim < self.min_dim() {
            return Err(Error::InvalidArgument(format!(
                "dim {} cannot hold {} distinct differentia directions",
                self.dim,
                self.min_dim()
            )));
        }
        for (name, v) in [
            ("genus_spread", self.genus_spread),
            ("differentia_offset", self.differentia_offset),
            ("noise", self.noise),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }

    pub fn genus_label(g: usize) -> String {
        format!("genus{g}")
    }

    pub fn instance_id(g: usize, i: usize) -> String {
        format!("genus{g}/instance{i}")
    }

    fn axis(&self, g: usize, i: usize) -> usize {
        g * self.instances_per_genus + i
    }

    /// Center of genus `g`.
    pub fn genus_center(&self, g: usize) -> Vec<f64> {
        let per_axis = self.differentia_offset / (2.0 * self.instances_per_genus as f64).sqrt();
        let mut c = vec![0.0; self.dim];
        for i in 0..self.instances_per_genus {
            c[self.axis(g, i)] = per_axis;
        }
        c
    }

    /// Location of the discriminative view of instance `i` of genus `g`.
    pub fn differentia_center(&self, g: usize, i: usize) -> Vec<f64> {
        let mut c = self.genus_center(g);
        c[self.axis(g, i)] += self.differentia_offset;
        c
    }

    /// Length of the discriminative run in a sequence of `n` frames.
    fn differentia_len(n: usize) -> usize {
        (n / 2).max(1)
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// A point at most `radius` away from the origin.
fn jitter(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    if radius == 0.0 {
        return vec![0.0; dim];
    }
    let r = radius * rng.random::<f64>();
    unit_vector(rng, dim).into_iter().map(|x| x * r).collect()
}

fn to_frame(values: Vec<f64>) -> FrameEmbedding {
    FrameEmbedding::from_finite(values.into_iter().map(|v| v as f32).collect())
}

/// Generates a labeled dataset, deterministically in `config.seed`.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.frames_per_sequence;
    let dim = config.dim;
    let run_len = SyntheticConfig::differentia_len(n);
    let mut sequences = Vec::new();

    for g in 0..config.num_genera {
        let center = config.genus_center(g);
        for i in 0..config.instances_per_genus {
            let diff_center = config.differentia_center(g, i);
            let flavours = std::iter::repeat_n(true, config.sequences_with_differentia)
                .chain(std::iter::repeat_n(false, config.sequences_without_differentia));
            for (k, with_view) in flavours.enumerate() {
                let keypoints: Vec<Vec<f64>> = (0..VIEW_KEYPOINTS).map(|_| unit_vector(&mut rng, dim)).collect();
                let run_start = if with_view {
                    rng.random_range(0..=n - run_len)
                } else {
                    n
                };
                let run = run_start..run_start + run_len;

                let frames = (0..n)
                    .map(|t| {
                        let base: Vec<f64> = if run.contains(&t) {
                            diff_center.clone()
                        } else {
                            let view = view_at(&keypoints, t, n);
                            center
                                .iter()
                                .zip(&view)
                                .map(|(c, u)| c + config.genus_spread * u)
                                .collect()
                        };
                        let j = jitter(&mut rng, dim, config.noise);
                        to_frame(base.iter().zip(&j).map(|(b, e)| b + e).collect())
                    })
                    .collect();

                let flag = if with_view { 'd' } else { 'n' };
                sequences.push(LabeledSequence {
                    sequence_id: format!("g{g}-i{i}-{flag}{k}"),
                    frames,
                    label: SequenceLabel {
                        genus_label: SyntheticConfig::genus_label(g),
                        instance_id: SyntheticConfig::instance_id(g, i),
                        has_differentia: with_view,
                    },
                });
            }
        }
    }
    Ok(Dataset {
        dimension: dim,
        sequences,
    })
}

/// Piecewise-linear interpolation between unit keypoints; the result has
/// norm at most one.
fn view_at(keypoints: &[Vec<f64>], t: usize, n: usize) -> Vec<f64> {
    let segments = keypoints.len() - 1;
    let pos = if n > 1 {
        t as f64 / (n - 1) as f64 * segments as f64
    } else {
        0.0
    };
    let seg = (pos.floor() as usize).min(segments - 1);
    let w = pos - seg as f64;
    keypoints[seg]
        .iter()
        .zip(&keypoints[seg + 1])
        .map(|(a, b)| (1.0 - w) * a + w * b)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::frame_distance;

    fn small(noise: f64, spread: f64) -> SyntheticConfig {
        SyntheticConfig {
            num_genera: 2,
            instances_per_genus: 2,
            sequences_with_differentia: 2,
            sequences_without_differentia: 2,
            frames_per_sequence: 100,
            dim: 16,
            genus_spread: spread,
            differentia_offset: 5.0,
            noise,
            seed: 7,
        }
    }

    #[test]
    fn counts_and_labels() {
        let ds = generate_synthetic(&small(0.01, 0.1)).unwrap();
        assert_eq!(ds.sequences.len(), 16);
        assert!(ds
            .sequences
            .iter()
            .all(|s| s.frames.len() == 100 && s.frames[0].dim() == 16));
        let with_view = ds.sequences.iter().filter(|s| s.label.has_differentia).count();
        assert_eq!(with_view, 8);
    }

    #[test]
    fn degenerate_generator_hits_the_center_exactly() {
        let cfg = small(0.0, 0.0);
        let ds = generate_synthetic(&cfg).unwrap();
        for s in &ds.sequences {
            let g: usize = s.label.genus_label.trim_start_matches("genus").parse().unwrap();
            let center: Vec<f32> = cfg.genus_center(g).into_iter().map(|v| v as f32).collect();
            let on_center = s.frames.iter().filter(|f| f.as_slice() == center.as_slice()).count();
            let expected = if s.label.has_differentia { 50 } else { 100 };
            assert_eq!(on_center, expected, "{}", s.sequence_id);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let cfg = small(0.01, 0.1);
        generate_synthetic(&cfg).unwrap().write(dir_a.path()).unwrap();
        generate_synthetic(&cfg).unwrap().write(dir_b.path()).unwrap();
        for entry in std::fs::read_dir(dir_a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            let a = std::fs::read(dir_a.path().join(&name)).unwrap();
            let b = std::fs::read(dir_b.path().join(&name)).unwrap();
            assert_eq!(a, b, "{name:?}");
        }
        let other = SyntheticConfig { seed: 8, ..cfg.clone() };
        assert_ne!(generate_synthetic(&cfg).unwrap(), generate_synthetic(&other).unwrap());
    }

    #[test]
    fn rejects_too_small_dimension_and_zero_counts() {
        let cfg = SyntheticConfig {
            dim: 3,
            ..small(0.0, 0.0)
        };
        assert!(matches!(generate_synthetic(&cfg), Err(Error::InvalidArgument(_))));
        let cfg = SyntheticConfig {
            frames_per_sequence: 0,
            ..small(0.0, 0.0)
        };
        assert!(generate_synthetic(&cfg).is_err());
    }

    #[test]
    fn separable_without_noise() {
        // offset > 2 * spread with zero noise: the discriminative frames of
        // two sibling instances are farther apart than any two shared views.
        let cfg = SyntheticConfig {
            num_genera: 1,
            frames_per_sequence: 20,
            ..small(0.0, 1.5)
        };
        let ds = generate_synthetic(&cfg).unwrap();
        let mut shared = Vec::new();
        let mut diff: Vec<(String, &FrameEmbedding)> = Vec::new();
        for s in &ds.sequences {
            let center = cfg.differentia_center(0, s.label.instance_id.ends_with('1') as usize);
            let center: Vec<f32> = center.into_iter().map(|v| v as f32).collect();
            for f in &s.frames {
                if f.as_slice() == center.as_slice() {
                    diff.push((s.label.instance_id.clone(), f));
                } else {
                    shared.push(f);
                }
            }
        }
        let mut max_shared: f64 = 0.0;
        for a in &shared {
            for b in &shared {
                max_shared = max_shared.max(frame_distance(a.as_slice(), b.as_slice()).unwrap());
            }
        }
        let mut min_diff = f64::INFINITY;
        for (ia, a) in &diff {
            for (ib, b) in &diff {
                if ia != ib {
                    min_diff = min_diff.min(frame_distance(a.as_slice(), b.as_slice()).unwrap());
                }
            }
        }
        assert!(!diff.is_empty() && !shared.is_empty());
        assert!(max_shared <= 2.0 * cfg.genus_spread + 1e-6);
        assert!(min_diff > max_shared, "{min_diff} vs {max_shared}");
    }
}
