//! Seeded sampling of kets, states and unitaries.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};

use crate::linalg::{c, CMatrix, DensityMatrix, Ket, UnitaryOp, C64};

pub type WorkbenchRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for `(seed, index)`, used for per-round Monte Carlo seeds.
pub fn derived_rng(seed: u64, index: u64) -> WorkbenchRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn haar_ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Ket {
    loop {
        let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
        if let Ok(k) = Ket::normalize(vec![dim], v) {
            return k;
        }
    }
}

/// Ginibre-ensemble mixed state, `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dims: Vec<usize>) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_noisy(dims, m.unscale(tr)).expect("Ginibre matrix is a valid state")
}

/// Haar-random unitary via Gram-Schmidt on a Gaussian matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryOp {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution is Haar
    let mut u = q.clone();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] = q[(i, j)] * phase;
        }
    }
    UnitaryOp::new(u).expect("QR factor is unitary")
}

/// One multinomial draw of `shots` trials, via sequential binomials.
pub fn multinomial<R: Rng + ?Sized>(rng: &mut R, shots: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0; probs.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = Binomial::new(remaining, q).expect("q in [0, 1]").sample(rng);
        counts[k] = n;
        remaining -= n;
        mass -= p.max(0.0);
    }
    counts
}

/// Independent Poisson counts with means `shots · p_k`.
pub fn poisson_counts<R: Rng + ?Sized>(rng: &mut R, shots: u64, probs: &[f64]) -> Vec<u64> {
    probs
        .iter()
        .map(|&p| {
            let mean = shots as f64 * p.max(0.0);
            if mean > 0.0 {
                Poisson::new(mean).expect("positive mean").sample(rng) as u64
            } else {
                0
            }
        })
        .collect()
}
