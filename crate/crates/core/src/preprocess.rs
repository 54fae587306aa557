//! Optional input stages ahead of the watershed: Gaussian smoothing and
//! gradient magnitude. Both are off by default so raw images stay the
//! baseline.

use rayon::prelude::*;

use crate::grid::{GridImage, Intensity};

/// Separable discrete Gaussian with kernel radius `ceil(3 * sigma)`, weights
/// normalized to sum 1 and borders clamped to the edge sample. Intermediate
/// planes stay in floating point; rounding to the integer range happens once
/// at the end. `sigma <= 0` returns the input unchanged.
pub fn gaussian_blur<T: Intensity>(img: &GridImage<T>, sigma: f64) -> GridImage<T> {
    if sigma <= 0.0 {
        return img.clone();
    }
    let radius = (3.0 * sigma).ceil() as usize;
    let mut kernel: Vec<f64> = (-(radius as isize)..=radius as isize)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }

    let dims = img.dims();
    let mut field: Vec<f64> = img.data().iter().map(|v| v.to_f64()).collect();
    for axis in 0..dims.len() {
        field = blur_axis(&field, dims, axis, &kernel, radius);
    }
    let data = field.iter().map(|&v| T::from_f64_clamped(v)).collect();
    GridImage::new(dims.to_vec(), data).expect("blur preserves the image shape")
}

fn blur_axis(field: &[f64], dims: &[usize], axis: usize, kernel: &[f64], radius: usize) -> Vec<f64> {
    let stride: usize = dims[axis + 1..].iter().product();
    let extent = dims[axis];
    let mut out = vec![0.0; field.len()];
    out.par_iter_mut().enumerate().for_each(|(p, o)| {
        let c = (p / stride) % extent;
        let mut acc = 0.0;
        for (i, w) in kernel.iter().enumerate() {
            let k = i as isize - radius as isize;
            let cc = (c as isize + k).clamp(0, extent as isize - 1);
            let q = (p as isize + (cc - c as isize) * stride as isize) as usize;
            acc += w * field[q];
        }
        *o = acc;
    });
    out
}

/// Gradient magnitude: central differences per axis (one-sided full steps at
/// the borders), Euclidean norm, rounded to nearest and saturating at the
/// sample type's maximum.
pub fn gradient_magnitude<T: Intensity>(img: &GridImage<T>) -> GridImage<T> {
    let dims = img.dims().to_vec();
    let data: Vec<T> = (0..img.len())
        .into_par_iter()
        .map(|p| {
            let mut sq = 0.0f64;
            for axis in 0..dims.len() {
                let stride: usize = dims[axis + 1..].iter().product();
                let extent = dims[axis];
                if extent == 1 {
                    continue;
                }
                let c = (p / stride) % extent;
                let d = if c == 0 {
                    img.get(p + stride).to_f64() - img.get(p).to_f64()
                } else if c + 1 == extent {
                    img.get(p).to_f64() - img.get(p - stride).to_f64()
                } else {
                    (img.get(p + stride).to_f64() - img.get(p - stride).to_f64()) / 2.0
                };
                sq += d * d;
            }
            T::from_f64_clamped(sq.sqrt())
        })
        .collect();
    GridImage::new(dims, data).expect("gradient preserves the image shape")
}
