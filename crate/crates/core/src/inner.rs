//! The symmetric (`∘`, bosonic) and antisymmetric (`•`, fermionic) products.
//!
//! On basis sequences both products are sums over permutations of Kronecker
//! deltas: the permanent or determinant of `M_ab = δ(f_a, g_b)`. Because the
//! matrix only contains deltas, neither needs an `n!` enumeration: the
//! permanent is `Π n_k!` when the two multisets agree and 0 otherwise, and the
//! determinant is the relative sorting parity when both sequences are the same
//! repeat-free set and 0 otherwise.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{QSpaceError, Result};
use crate::fock::{Amplitude, FockSpace, FockVector, MadeState, ModeIndex, Statistics};
use crate::tolerance::NULL_NORM_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductKind {
    /// `∘`, used for bosons.
    Symmetric,
    /// `•`, used for fermions.
    Antisymmetric,
}

impl ProductKind {
    pub fn for_statistics(stats: Statistics) -> Self {
        match stats {
            Statistics::Boson => ProductKind::Symmetric,
            Statistics::Fermion => ProductKind::Antisymmetric,
        }
    }

    pub fn statistics(self) -> Statistics {
        match self {
            ProductKind::Symmetric => Statistics::Boson,
            ProductKind::Antisymmetric => Statistics::Fermion,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ProductKind::Symmetric => "symmetric",
            ProductKind::Antisymmetric => "antisymmetric",
        }
    }

    fn check(self, stats: Statistics) -> Result<()> {
        if self.statistics() == stats {
            Ok(())
        } else {
            Err(QSpaceError::ProductKindMismatch {
                kind: self.name(),
                expected: self.statistics(),
                found: stats,
            })
        }
    }
}

fn inversion_parity(seq: &[ModeIndex]) -> bool {
    let mut odd = false;
    for (i, a) in seq.iter().enumerate() {
        for b in &seq[i + 1..] {
            if a > b {
                odd = !odd;
            }
        }
    }
    odd
}

fn sorted(seq: &[ModeIndex]) -> Vec<ModeIndex> {
    let mut s = seq.to_vec();
    s.sort_unstable();
    s
}

/// Product of two basis sequences `f` and `g`.
///
/// Zero when the lengths differ. Otherwise the permanent (`Symmetric`) or the
/// determinant (`Antisymmetric`) of the delta matrix `δ(f_a, g_b)`.
pub fn basis_product(kind: ProductKind, f: &[ModeIndex], g: &[ModeIndex]) -> i64 {
    if f.len() != g.len() {
        return 0;
    }
    let fs = sorted(f);
    if fs != sorted(g) {
        return 0;
    }
    match kind {
        ProductKind::Symmetric => fs
            .chunk_by(|a, b| a == b)
            .map(|block| (1..=block.len() as i64).product::<i64>())
            .product(),
        ProductKind::Antisymmetric => {
            if fs.windows(2).any(|w| w[0] == w[1]) {
                0
            } else if inversion_parity(f) == inversion_parity(g) {
                1
            } else {
                -1
            }
        }
    }
}

/// Sesquilinear extension of [`basis_product`] to vectors: antilinear in `a`.
pub fn inner(kind: ProductKind, a: &FockVector, b: &FockVector) -> Result<Complex64> {
    kind.check(a.stats())?;
    kind.check(b.stats())?;
    if a.space().modes != b.space().modes {
        return Err(QSpaceError::ModeCountMismatch {
            left: a.space().modes,
            right: b.space().modes,
        });
    }
    // Keys are canonical, so only identical states can overlap.
    let mut acc = Complex64::new(0.0, 0.0);
    for (state, alpha) in a.terms() {
        let beta = b.amplitude(state);
        if beta.norm() == 0.0 {
            continue;
        }
        let seq = state.mode_sequence();
        acc += alpha.conj() * beta * basis_product(kind, &seq, &seq) as f64;
    }
    Ok(acc)
}

/// `inner` with the product kind chosen from the vectors' statistics.
pub fn inner_auto(a: &FockVector, b: &FockVector) -> Result<Complex64> {
    inner(ProductKind::for_statistics(a.stats()), a, b)
}

/// `sqrt(inner(a, a))`.
pub fn norm(a: &FockVector) -> f64 {
    inner_auto(a, a)
        .map(|z| z.re.max(0.0).sqrt())
        .unwrap_or(0.0)
}

pub fn is_null_norm(a: &FockVector) -> bool {
    is_null_norm_with(a, NULL_NORM_TOL)
}

pub fn is_null_norm_with(a: &FockVector, tol: f64) -> bool {
    inner_auto(a, a).map(|z| z.re <= tol).unwrap_or(false)
}

/// `a ≅ b`: the difference is a combination of null-norm vectors.
pub fn similar(a: &FockVector, b: &FockVector) -> Result<bool> {
    Ok(is_null_norm(&a.sub(b)?))
}

/// A linear combination of *ordered* basis sequences, before any
/// canonicalization.
///
/// `|ε1ε2)` and `|ε2ε1)` are different keys here. This is the raw space the
/// products are defined on; [`OrderedVector::quotient`] maps it onto
/// canonical [`FockVector`]s without changing any product.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedVector {
    space: FockSpace,
    terms: BTreeMap<Vec<ModeIndex>, Amplitude>,
}

impl OrderedVector {
    pub fn new(space: FockSpace) -> Self {
        OrderedVector {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn add_term(&mut self, seq: &[ModeIndex], amp: Amplitude) -> Result<()> {
        for &m in seq {
            self.space.check_mode(m)?;
        }
        *self
            .terms
            .entry(seq.to_vec())
            .or_insert(Complex64::new(0.0, 0.0)) += amp;
        Ok(())
    }

    pub fn from_terms<'a, I>(space: FockSpace, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [ModeIndex], Amplitude)>,
    {
        let mut v = Self::new(space);
        for (seq, amp) in terms {
            v.add_term(seq, amp)?;
        }
        Ok(v)
    }

    /// Encodes the product `|ψ1⟩ ⊗ |ψ2⟩ ⊗ …` of single-particle amplitude
    /// vectors as `Σ ψ1_i ψ2_j … |ε_i ε_j …)`.
    pub fn product_of(space: FockSpace, factors: &[&[Amplitude]]) -> Result<Self> {
        for f in factors {
            if f.len() != space.modes {
                return Err(QSpaceError::DimensionMismatch {
                    expected: space.modes,
                    found: f.len(),
                });
            }
        }
        let mut v = Self::new(space);
        let mut idx = vec![0usize; factors.len()];
        loop {
            let amp = idx
                .iter()
                .zip(factors)
                .map(|(&i, f)| f[i])
                .fold(Complex64::new(1.0, 0.0), |acc, x| acc * x);
            if amp.norm() != 0.0 {
                let seq: Vec<ModeIndex> = idx.iter().copied().map(ModeIndex).collect();
                v.add_term(&seq, amp)?;
            }
            // odometer increment over modes^n label tuples
            let mut k = factors.len();
            loop {
                if k == 0 {
                    return Ok(v);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < space.modes {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<ModeIndex>, &Amplitude)> {
        self.terms.iter()
    }

    pub fn inner(&self, other: &OrderedVector) -> Result<Complex64> {
        if self.space != other.space {
            return Err(QSpaceError::StatisticsMismatch {
                expected: self.space.stats,
                found: other.space.stats,
            });
        }
        let kind = ProductKind::for_statistics(self.space.stats);
        let mut acc = Complex64::new(0.0, 0.0);
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                let p = basis_product(kind, f, g);
                if p != 0 {
                    acc += a.conj() * b * p as f64;
                }
            }
        }
        Ok(acc)
    }

    pub fn is_null_norm(&self) -> bool {
        self.inner(self)
            .map(|z| z.re <= NULL_NORM_TOL)
            .unwrap_or(false)
    }

    /// Canonical image: every sequence goes through
    /// [`FockSpace::make_state`], carrying its sign; null sequences vanish.
    pub fn quotient(&self) -> Result<FockVector> {
        let mut out = self.space.zero();
        for (seq, &amp) in &self.terms {
            if let MadeState::Occupied(state, sign) = self.space.make_state(seq)? {
                out.accumulate(state, amp * sign.as_f64());
            }
        }
        out.prune();
        Ok(out)
    }
}
