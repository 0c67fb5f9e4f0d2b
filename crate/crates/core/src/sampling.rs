//! Seeded random inputs for property checks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::second_quant::{CMatrix, CVector, MatrixElements};

pub type CheckRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CheckRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn complex_vec(rng: &mut impl Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex(rng)).collect()
}

pub fn unit_vector(rng: &mut impl Rng, len: usize) -> CVector {
    loop {
        let v = CVector::from_vec(complex_vec(rng, len));
        let n = v.norm();
        if n > 1e-3 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

/// Uniform permutation of `0..n` (Fisher-Yates).
pub fn permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

/// Random Hermitian `T` and a random two-body table obeying
/// `V_klpq = conj(V_qplk)`. `density` is the chance that any given
/// `(k, l, p, q)` seeds an entry.
pub fn matrix_elements(rng: &mut impl Rng, modes: usize, density: f64) -> MatrixElements {
    let mut t = CMatrix::zeros(modes, modes);
    for k in 0..modes {
        t[(k, k)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for l in k + 1..modes {
            let x = complex(rng);
            t[(k, l)] = x;
            t[(l, k)] = x.conj();
        }
    }
    let mut v: BTreeMap<_, Complex64> = BTreeMap::new();
    for k in 0..modes {
        for l in 0..modes {
            for p in 0..modes {
                for q in 0..modes {
                    if rng.random::<f64>() >= density {
                        continue;
                    }
                    let x = complex(rng);
                    *v.entry((k, l, p, q)).or_default() += x;
                    *v.entry((q, p, l, k)).or_default() += x.conj();
                }
            }
        }
    }
    MatrixElements::new(t, v).expect("sampled elements are Hermitian")
}
