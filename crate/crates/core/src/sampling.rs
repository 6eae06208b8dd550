//! Seeded pseudorandom matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix_group::CMatrix;

pub type SampleRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 100;

/// Resampling threshold on `|det|` for random group elements.
pub const MIN_ABS_DET: f64 = 0.1;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

/// Complex standard-normal matrix conditioned on `|det| > 0.1`.
pub fn random_gl<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let m = ginibre(rng, n);
        if m.determinant().norm() > MIN_ABS_DET {
            return m;
        }
    }
}

/// Real standard-normal matrix conditioned on `|det| > 0.1`, as complex.
pub fn random_gl_real<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), 0.0));
        if m.determinant().norm() > MIN_ABS_DET {
            return m;
        }
    }
}

/// Haar-distributed unitary via QR with the phase fix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let qr = ginibre(rng, n).qr();
    let (q, r) = qr.unpack();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    let g = ginibre(rng, n);
    (&g + g.adjoint()).scale(0.5 * scale)
}

/// Uniformly random direction in realified `gl_n(C)`, unit Euclidean norm.
pub fn random_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..2 * n * n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// `count` tuples of `arity` random elements of `GL_n`.
pub fn random_tuples<R: Rng>(rng: &mut R, n: usize, arity: usize, count: usize) -> Vec<Vec<CMatrix>> {
    (0..count)
        .map(|_| (0..arity).map(|_| random_gl(rng, n)).collect())
        .collect()
}
