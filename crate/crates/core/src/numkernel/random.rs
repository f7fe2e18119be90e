//! Seeded random draws: unit vectors, skew-Hermitian matrices, unitaries.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)` so that
//! independent workers never share state and results do not depend on
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{expm_skew, ComplexMatrix, ComplexVector, C64};

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Uniform point on the unit sphere of ℂⁿ (normalized complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    loop {
        let v = ComplexVector::from_vec((0..n).map(|_| complex_normal(rng)).collect());
        if let Ok(u) = v.normalized() {
            return u;
        }
    }
}

/// Skew-Hermitian matrix with Gaussian entries.
pub fn random_skew_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = C64::new(0.0, d);
        for j in i + 1..n {
            let z = complex_normal(rng) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = -z.conj();
        }
    }
    m
}

/// `exp` of a Gaussian skew-Hermitian matrix scaled by π. Not Haar, but it
/// covers the whole group, which is all the upper-bound oracles need.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let l = random_skew_hermitian(n, rng);
    expm_skew(&l, std::f64::consts::PI).expect("Gaussian skew-Hermitian matrix is valid")
}
