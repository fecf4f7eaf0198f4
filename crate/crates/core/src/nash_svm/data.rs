//! Synthetic classification data: two Gaussian blobs and small 8x8 digit
//! images standing in for a handwritten 3-vs-8 task.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::domain::LabeledDataset;

/// `n_per_class` samples labeled `+1` from `N((1,-1), I/2)` followed by as many
/// labeled `-1` from `N((-1,1), I/2)`, uniformly weighted.
pub fn gaussian_blobs(n_per_class: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.5f64.sqrt()).expect("valid standard deviation");
    let mut features = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for (label, center) in [(1.0, [1.0, -1.0]), (-1.0, [-1.0, 1.0])] {
        for _ in 0..n_per_class {
            features.push(center.iter().map(|c| c + noise.sample(&mut rng)).collect());
            labels.push(label);
        }
    }
    LabeledDataset::uniform(features, labels).expect("blob data is well formed")
}

const THREE: [&str; 8] = ["..####..", ".#....#.", "......#.", "...###..", "......#.", "......#.", ".#....#.", "..####.."];
const EIGHT: [&str; 8] = ["..####..", ".#....#.", ".#....#.", "..####..", ".#....#.", ".#....#.", ".#....#.", "..####.."];

fn template(rows: &[&str; 8]) -> Vec<f64> {
    rows.iter().flat_map(|r| r.bytes().map(|b| if b == b'#' { 1.0 } else { 0.0 })).collect()
}

/// `n` images in `[0,1]^64`, alternating "3" (label `+1`) and "8" (label `-1`),
/// each a stroke template with a random one-pixel shift and pixel noise,
/// clipped to the unit box.
pub fn synthetic_digits(n: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.15).expect("valid standard deviation");
    let templates = [(1.0, template(&THREE)), (-1.0, template(&EIGHT))];
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let (label, base) = &templates[k % 2];
        let dx: i32 = rng.random_range(-1..=1);
        let dy: i32 = rng.random_range(-1..=1);
        let mut img = vec![0.0; 64];
        for r in 0..8i32 {
            for c in 0..8i32 {
                let (sr, sc) = (r - dy, c - dx);
                let v = if (0..8).contains(&sr) && (0..8).contains(&sc) { base[(sr * 8 + sc) as usize] } else { 0.0 };
                img[(r * 8 + c) as usize] = (v + noise.sample(&mut rng)).clamp(0.0, 1.0);
            }
        }
        features.push(img);
        labels.push(*label);
    }
    LabeledDataset::uniform(features, labels).expect("digit data is well formed")
}
