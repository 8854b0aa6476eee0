//! Deterministic synthetic digit dataset in the same IDX shape as MNIST
//! (28x28 grayscale, labels 0..9), for environments where the real files
//! are not available. Digits are rendered from a 5x7 glyph font under
//! random rotation, scale, translation, ink level, and pixel noise.

use std::path::Path;

use rayon::prelude::*;

use crate::dnn::mnist::{write_pair, Dataset};
use crate::error::Result;
use crate::rng::SplitMix64;

const GLYPHS: [[&str; 7]; 10] = [
    ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
    ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],
    ["01110", "10001", "00001", "00010", "00100", "01000", "11111"],
    ["11111", "00010", "00100", "00010", "00001", "10001", "01110"],
    ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],
    ["11111", "10000", "11110", "00001", "00001", "10001", "01110"],
    ["00110", "01000", "10000", "11110", "10001", "10001", "01110"],
    ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],
    ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],
    ["01110", "10001", "10001", "01111", "00001", "00010", "01100"],
];

const GW: usize = 5;
const GH: usize = 7;
const SIDE: usize = 28;

fn glyph_bitmap(digit: u8) -> [[f64; GW]; GH] {
    let mut g = [[0.0; GW]; GH];
    for (y, row) in GLYPHS[digit as usize].iter().enumerate() {
        for (x, ch) in row.chars().enumerate() {
            g[y][x] = if ch == '1' { 1.0 } else { 0.0 };
        }
    }
    g
}

fn render_digit(digit: u8, rng: &mut SplitMix64, out: &mut [u8]) {
    let g = glyph_bitmap(digit);
    let scale = rng.range_f64(2.2, 3.2);
    let theta = rng.range_f64(-0.26, 0.26);
    let dx = rng.range_f64(-2.5, 2.5);
    let dy = rng.range_f64(-2.5, 2.5);
    let ink = rng.range_f64(0.65, 1.0);
    let noise_amp = rng.range_f64(0.02, 0.06);
    let (st, ct) = theta.sin_cos();
    let cx = 13.5 + dx;
    let cy = 13.5 + dy;

    let sample = |gx: f64, gy: f64| -> f64 {
        let x0 = gx.floor() as isize;
        let y0 = gy.floor() as isize;
        let fx = gx - x0 as f64;
        let fy = gy - y0 as f64;
        let at = |x: isize, y: isize| -> f64 {
            if x >= 0 && (x as usize) < GW && y >= 0 && (y as usize) < GH {
                g[y as usize][x as usize]
            } else {
                0.0
            }
        };
        at(x0, y0) * (1.0 - fx) * (1.0 - fy)
            + at(x0 + 1, y0) * fx * (1.0 - fy)
            + at(x0, y0 + 1) * (1.0 - fx) * fy
            + at(x0 + 1, y0 + 1) * fx * fy
    };

    for y in 0..SIDE {
        for x in 0..SIDE {
            // inverse affine into glyph space, then bilinear sample
            let rx = x as f64 - cx;
            let ry = y as f64 - cy;
            let u = (rx * ct + ry * st) / scale + GW as f64 / 2.0;
            let v = (-rx * st + ry * ct) / scale + GH as f64 / 2.0;
            let val = sample(u - 0.5, v - 0.5) * ink;
            out[y * SIDE + x] = (val * 255.0).clamp(0.0, 255.0) as u8;
        }
    }
    for px in out.iter_mut() {
        let noise = noise_amp * (rng.unit_f64() - 0.5) * 2.0 * 255.0;
        *px = (*px as f64 + noise).clamp(0.0, 255.0) as u8;
    }
}

/// Generate `count` labeled digits. Each image has its own RNG stream
/// derived from `(seed, index)`, so generation is order-independent and
/// parallel while staying bit-reproducible.
pub fn generate_synthetic(count: usize, seed: u64) -> Dataset {
    let len = SIDE * SIDE;
    let mut images = vec![0u8; count * len];
    let mut labels = vec![0u8; count];
    labels
        .par_iter_mut()
        .zip(images.par_chunks_mut(len))
        .enumerate()
        .for_each(|(i, (label, image))| {
            let mut rng = SplitMix64::new(
                seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1),
            );
            *label = (rng.next_u64() % 10) as u8;
            render_digit(*label, &mut rng, image);
        });
    Dataset { images, labels, count, rows: SIDE, cols: SIDE }
}

/// Write a synthetic train/test pair in the four standard IDX files.
pub fn write_synthetic_dir(dir: &Path, n_train: usize, n_test: usize, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let train = generate_synthetic(n_train, seed);
    // distinct stream for the test split
    let test = generate_synthetic(n_test, seed ^ 0xA076_1D64_78BD_642F);
    write_pair(
        &train,
        &dir.join("train-images-idx3-ubyte"),
        &dir.join("train-labels-idx1-ubyte"),
    )?;
    write_pair(
        &test,
        &dir.join("t10k-images-idx3-ubyte"),
        &dir.join("t10k-labels-idx1-ubyte"),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_labeled() {
        let a = generate_synthetic(32, 7);
        let b = generate_synthetic(32, 7);
        assert_eq!(a, b);
        assert!(a.labels.iter().all(|&l| l < 10));
        // ink actually lands on the canvas
        assert!(a.images.iter().filter(|&&p| p > 128).count() > 32 * 20);
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_synthetic(8, 1);
        let b = generate_synthetic(8, 2);
        assert_ne!(a.images, b.images);
    }

    #[test]
    fn synthetic_dir_loads_back() {
        let dir = tempfile::tempdir().unwrap();
        write_synthetic_dir(dir.path(), 20, 10, 42).unwrap();
        let (train, test) = crate::dnn::mnist::load_mnist(dir.path()).unwrap();
        assert_eq!(train.count, 20);
        assert_eq!(test.count, 10);
        assert_eq!(train.rows, 28);
    }
}
