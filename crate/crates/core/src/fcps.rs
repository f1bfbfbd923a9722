//! Seeded generators for the nine FCPS-style labeled benchmark shapes.
//!
//! The shapes reproduce the qualitative separability structure of the
//! originals (which features carry class signal, and whether clusters are
//! linearly separable), not their exact point lists. Reports should refer to
//! them as "<shape>-like" data.

use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FcpsShape {
    Atom,
    Chainlink,
    EngyTime,
    Hepta,
    Lsun,
    Target,
    Tetra,
    TwoDiamonds,
    WingNut,
}

pub const ALL_SHAPES: [FcpsShape; 9] = [
    FcpsShape::Atom,
    FcpsShape::Chainlink,
    FcpsShape::EngyTime,
    FcpsShape::Hepta,
    FcpsShape::Lsun,
    FcpsShape::Target,
    FcpsShape::Tetra,
    FcpsShape::TwoDiamonds,
    FcpsShape::WingNut,
];

impl FcpsShape {
    pub fn dimensionality(self) -> usize {
        match self {
            FcpsShape::Atom | FcpsShape::Chainlink | FcpsShape::Hepta | FcpsShape::Tetra => 3,
            _ => 2,
        }
    }

    pub fn cluster_count(self) -> usize {
        match self {
            FcpsShape::Hepta => 7,
            FcpsShape::Tetra => 4,
            FcpsShape::Lsun => 3,
            _ => 2,
        }
    }

    /// Default sample size: large enough for a meaningful held-out split
    /// while keeping runs in the seconds range.
    pub fn default_n(self) -> usize {
        if self.dimensionality() == 2 {
            800
        } else {
            600
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FcpsShape::Atom => "atom",
            FcpsShape::Chainlink => "chainlink",
            FcpsShape::EngyTime => "engytime",
            FcpsShape::Hepta => "hepta",
            FcpsShape::Lsun => "lsun",
            FcpsShape::Target => "target",
            FcpsShape::Tetra => "tetra",
            FcpsShape::TwoDiamonds => "twodiamonds",
            FcpsShape::WingNut => "wingnut",
        }
    }
}

impl fmt::Display for FcpsShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FcpsShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(char::is_ascii_alphanumeric).collect::<String>().to_lowercase();
        ALL_SHAPES
            .into_iter()
            .find(|sh| sh.name() == key)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown shape '{s}'")))
    }
}

/// Generation request: shape, total points, seed and extra isotropic jitter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub shape: FcpsShape,
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub noise: f64,
}

impl GenSpec {
    pub fn new(shape: FcpsShape, n: usize, seed: u64, noise: f64) -> Result<Self> {
        let spec = GenSpec { shape, n, seed, noise };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 * self.shape.cluster_count() {
            return Err(Error::InvalidSpec(format!(
                "n={} below 2 x cluster count for {}",
                self.n, self.shape
            )));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::InvalidSpec(format!("noise {} must be >= 0", self.noise)));
        }
        Ok(())
    }
}

/// Catalog of all nine shapes with dimensionality and true cluster count,
/// in stable order.
pub fn shape_catalog() -> Vec<(FcpsShape, usize, usize)> {
    ALL_SHAPES
        .into_iter()
        .map(|s| (s, s.dimensionality(), s.cluster_count()))
        .collect()
}

/// Generates a labeled dataset for the requested shape. Same spec (including
/// seed) produces bit-identical output.
pub fn generate(spec: &GenSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let counts = cluster_counts(spec.shape, spec.n);

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(spec.n);
    let mut labels: Vec<usize> = Vec::with_capacity(spec.n);
    for (cluster0, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            let mut x = sample_point(spec.shape, cluster0, count, &mut rng);
            if spec.noise > 0.0 {
                for v in &mut x {
                    *v += spec.noise * normal(&mut rng);
                }
            }
            points.push(x);
            labels.push(cluster0 + 1);
        }
    }

    let dim = spec.shape.dimensionality();
    let names = (1..=dim).map(|j| format!("x{j}")).collect();
    Dataset::new(Matrix::from_rows(&points)?, names, Some(labels), false, false)
}

fn balanced_counts(n: usize, c: usize) -> Vec<usize> {
    let base = n / c;
    let extra = n % c;
    (0..c).map(|i| base + usize::from(i < extra)).collect()
}

/// Per-cluster point counts. Balanced within one point, except where the
/// shape dictates otherwise: Target's ring and Atom's shell carry most of
/// the mass around their small central cores.
fn cluster_counts(shape: FcpsShape, n: usize) -> Vec<usize> {
    match shape {
        FcpsShape::Target => crate::data::largest_remainder_sizes(n, &[0.3, 0.7]),
        FcpsShape::Atom => crate::data::largest_remainder_sizes(n, &[0.25, 0.75]),
        _ => balanced_counts(n, shape.cluster_count()),
    }
}

fn sample_point(shape: FcpsShape, cluster0: usize, cluster_n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match shape {
        FcpsShape::TwoDiamonds => {
            let cx = if cluster0 == 0 { -1.5 } else { 1.5 };
            let (u, v) = sample_l1_ball(rng);
            vec![cx + u, v]
        }
        FcpsShape::WingNut => {
            // Mirrored rectangles with density rising toward the inner edge.
            let t = rng.random::<f64>().sqrt();
            let y = rng.random_range(-1.0..1.0);
            let x = if cluster0 == 0 { -2.1 + 2.0 * t } else { 2.1 - 2.0 * t };
            vec![x, y]
        }
        FcpsShape::EngyTime => {
            if cluster0 == 0 {
                vec![-1.1 + 1.0 * normal(rng), -0.9 + 0.75 * normal(rng)]
            } else {
                vec![1.1 + 0.55 * normal(rng), 0.9 + 1.05 * normal(rng)]
            }
        }
        FcpsShape::Lsun => match cluster0 {
            0 => sample_l_shape(rng),
            1 => sample_ellipse(rng, 0.9, 0.8, 0.4, 0.25),
            _ => sample_ellipse(rng, -0.9, 1.6, 0.25, 0.5),
        },
        FcpsShape::Target => {
            if cluster0 == 0 {
                vec![0.1 * normal(rng), 0.1 * normal(rng)]
            } else {
                // Broad annulus hugging the core, with four small corner
                // blobs folded into the class.
                let corners = cluster_n >= 34 && rng.random::<f64>() < 0.12;
                if corners {
                    let sx = if rng.random::<f64>() < 0.5 { -1.8 } else { 1.8 };
                    let sy = if rng.random::<f64>() < 0.5 { -1.8 } else { 1.8 };
                    vec![sx + 0.05 * normal(rng), sy + 0.05 * normal(rng)]
                } else {
                    let r = rng.random_range(0.35..1.5);
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    vec![r * theta.cos(), r * theta.sin()]
                }
            }
        }
        FcpsShape::Atom => {
            if cluster0 == 0 {
                vec![0.06 * normal(rng), 0.06 * normal(rng), 0.06 * normal(rng)]
            } else {
                let dir = sample_unit_sphere(rng);
                let r = 1.0 + 0.05 * normal(rng);
                dir.into_iter().map(|d| r * d).collect()
            }
        }
        FcpsShape::Chainlink => {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let rho = 0.1 * rng.random::<f64>().sqrt();
            let ring = 1.0 + rho * phi.cos();
            let h = rho * phi.sin();
            if cluster0 == 0 {
                // Torus in the xy-plane, centered at the origin.
                vec![ring * theta.cos(), ring * theta.sin(), h]
            } else {
                // Interlocked torus in the xz-plane, centered at (1, 0, 0).
                vec![1.0 + ring * theta.cos(), h, ring * theta.sin()]
            }
        }
        FcpsShape::Hepta => {
            let centers = [
                [0.0, 0.0, 0.0],
                [3.0, 0.0, 0.0],
                [-3.0, 0.0, 0.0],
                [0.0, 3.0, 0.0],
                [0.0, -3.0, 0.0],
                [0.0, 0.0, 3.0],
                [0.0, 0.0, -3.0],
            ];
            let c = centers[cluster0];
            (0..3).map(|k| c[k] + 0.3 * normal(rng)).collect()
        }
        FcpsShape::Tetra => {
            let s = 1.0 / (2.0 * 2.0f64.sqrt());
            let vertices = [
                [s, s, s],
                [s, -s, -s],
                [-s, s, -s],
                [-s, -s, s],
            ];
            let v = vertices[cluster0];
            (0..3).map(|k| v[k] + 0.15 * normal(rng)).collect()
        }
    }
}

fn sample_l1_ball(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let u: f64 = rng.random_range(-1.0..1.0);
        let v: f64 = rng.random_range(-1.0..1.0);
        if u.abs() + v.abs() <= 1.0 {
            return (u, v);
        }
    }
}

fn sample_ellipse(rng: &mut ChaCha8Rng, cx: f64, cy: f64, ax: f64, ay: f64) -> Vec<f64> {
    loop {
        let u = rng.random_range(-1.0..1.0);
        let v = rng.random_range(-1.0..1.0);
        if u * u + v * v <= 1.0 {
            return vec![cx + ax * u, cy + ay * v];
        }
    }
}

fn sample_l_shape(rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Horizontal bar [-2, 0.3] x [-2, -1.5] and vertical bar
    // [-2, -1.5] x [-1.5, 0.3], picked by area.
    let horizontal_area = 2.3 * 0.5;
    let vertical_area = 0.5 * 1.8;
    let pick = rng.random_range(0.0..horizontal_area + vertical_area);
    if pick < horizontal_area {
        vec![rng.random_range(-2.0..0.3), rng.random_range(-2.0..-1.5)]
    } else {
        vec![rng.random_range(-2.0..-1.5), rng.random_range(-1.5..0.3)]
    }
}

fn sample_unit_sphere(rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v = vec![normal(rng), normal(rng), normal(rng)];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// One standard normal draw via Box-Muller.
pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12);
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_nine_entries() {
        let catalog = shape_catalog();
        assert_eq!(catalog.len(), 9);
        assert!(catalog.iter().all(|&(_, d, c)| (d == 2 || d == 3) && c >= 2));
    }

    #[test]
    fn catalog_twodiamonds_and_atom() {
        let catalog = shape_catalog();
        let td = catalog.iter().find(|(s, _, _)| *s == FcpsShape::TwoDiamonds).unwrap();
        assert_eq!((td.1, td.2), (2, 2));
        let atom = catalog.iter().find(|(s, _, _)| *s == FcpsShape::Atom).unwrap();
        assert_eq!((atom.1, atom.2), (3, 2));
    }

    #[test]
    fn same_seed_bit_identical() {
        for shape in ALL_SHAPES {
            let spec = GenSpec::new(shape, 120, 42, 0.01).unwrap();
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a, b, "{shape} not reproducible");
        }
    }

    #[test]
    fn labels_cover_every_cluster() {
        for shape in ALL_SHAPES {
            let spec = GenSpec::new(shape, 2 * shape.cluster_count(), 5, 0.0).unwrap();
            let d = generate(&spec).unwrap();
            let labels = d.labels().unwrap();
            for c in 1..=shape.cluster_count() {
                assert!(labels.contains(&c), "{shape} missing label {c}");
            }
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let err = GenSpec::new(FcpsShape::Hepta, 13, 0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
        let err = GenSpec::new(FcpsShape::Atom, 100, 0, -0.5).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn two_diamonds_separates_along_feature_1_only() {
        let d = generate(&GenSpec::new(FcpsShape::TwoDiamonds, 800, 1, 0.0).unwrap()).unwrap();
        let labels = d.labels().unwrap();
        let sizes = [
            labels.iter().filter(|&&l| l == 1).count(),
            labels.iter().filter(|&&l| l == 2).count(),
        ];
        assert_eq!(sizes, [400, 400]);

        let mean = |feat: usize, cls: usize| -> f64 {
            let vals: Vec<f64> = (0..d.n()).filter(|&i| labels[i] == cls).map(|i| d.row(i)[feat]).collect();
            vals.iter().sum::<f64>() / vals.len() as f64
        };
        assert!((mean(0, 1) - mean(0, 2)).abs() > 2.0, "feature 1 must separate");

        let col2 = d.feature_column(1);
        let m2 = col2.iter().sum::<f64>() / col2.len() as f64;
        let sd2 = (col2.iter().map(|v| (v - m2).powi(2)).sum::<f64>() / col2.len() as f64).sqrt();
        let bound = 3.0 * sd2 / (400f64).sqrt();
        assert!((mean(1, 1) - mean(1, 2)).abs() < bound, "feature 2 means differ beyond {bound}");
    }

    #[test]
    fn hepta_blobs_well_separated() {
        let d = generate(&GenSpec::new(FcpsShape::Hepta, 212, 1, 0.0).unwrap()).unwrap();
        assert_eq!(d.p(), 3);
        let labels = d.labels().unwrap();
        let mut centroids = vec![[0.0f64; 3]; 7];
        let mut counts = vec![0usize; 7];
        for i in 0..d.n() {
            let c = labels[i] - 1;
            counts[c] += 1;
            for k in 0..3 {
                centroids[c][k] += d.row(i)[k];
            }
        }
        for c in 0..7 {
            assert!(counts[c] >= 30);
            for k in 0..3 {
                centroids[c][k] /= counts[c] as f64;
            }
        }
        for a in 0..7 {
            for b in a + 1..7 {
                let dist: f64 = (0..3)
                    .map(|k| (centroids[a][k] - centroids[b][k]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(dist > 2.5, "centroids {a},{b} too close: {dist}");
            }
        }
        // Blobs are tight around their centroids.
        for i in 0..d.n() {
            let c = labels[i] - 1;
            let dist: f64 = (0..3)
                .map(|k| (d.row(i)[k] - centroids[c][k]).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(dist < 1.5);
        }
    }

    #[test]
    fn tetra_centroid_distances_equal_within_5_percent() {
        let d = generate(&GenSpec::new(FcpsShape::Tetra, 400, 1, 0.0).unwrap()).unwrap();
        let labels = d.labels().unwrap();
        let mut centroids = vec![[0.0f64; 3]; 4];
        let mut counts = vec![0usize; 4];
        for i in 0..d.n() {
            let c = labels[i] - 1;
            counts[c] += 1;
            for k in 0..3 {
                centroids[c][k] += d.row(i)[k];
            }
        }
        for c in 0..4 {
            for k in 0..3 {
                centroids[c][k] /= counts[c] as f64;
            }
        }
        let mut dists = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                dists.push(
                    (0..3)
                        .map(|k| (centroids[a][k] - centroids[b][k]).powi(2))
                        .sum::<f64>()
                        .sqrt(),
                );
            }
        }
        let mean = dists.iter().sum::<f64>() / dists.len() as f64;
        for dist in &dists {
            assert!(
                (dist - mean).abs() / mean < 0.05,
                "tetra centroid distance {dist} deviates from mean {mean}"
            );
        }
    }

    #[test]
    fn feature1_threshold_classifies_twodiamonds_and_wingnut() {
        for shape in [FcpsShape::TwoDiamonds, FcpsShape::WingNut] {
            for seed in 0..5 {
                let d = generate(&GenSpec::new(shape, 800, seed, 0.0).unwrap()).unwrap();
                let labels = d.labels().unwrap();
                let correct = (0..d.n())
                    .filter(|&i| (d.row(i)[0] < 0.0) == (labels[i] == 1))
                    .count();
                assert!(
                    correct as f64 >= 0.99 * d.n() as f64,
                    "{shape} seed {seed}: {correct}/800"
                );
            }
        }
    }

    #[test]
    fn shape_from_str_variants() {
        assert_eq!("TwoDiamonds".parse::<FcpsShape>().unwrap(), FcpsShape::TwoDiamonds);
        assert_eq!("two_diamonds".parse::<FcpsShape>().unwrap(), FcpsShape::TwoDiamonds);
        assert_eq!("wingnut".parse::<FcpsShape>().unwrap(), FcpsShape::WingNut);
        assert!("blob".parse::<FcpsShape>().is_err());
    }
}
