//! Mode labels, occupation-number basis states and sparse complex vectors
//! over them.
//!
//! A bosonic [`OccupationState`] is a multiset of modes: the order in which
//! particles were listed is not stored anywhere, so permuting them cannot be
//! observed. A fermionic state is kept in strictly increasing mode order and
//! any reordering is carried as an explicit [`Sign`] on the amplitude.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{QSpaceError, Result};
use crate::tolerance::PRUNE_TOL;

pub type Amplitude = Complex64;

/// Label of a single-particle level. Ordered by the integer id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex(pub usize);

impl ModeIndex {
    pub fn id(self) -> usize {
        self.0
    }
}

impl From<usize> for ModeIndex {
    fn from(id: usize) -> Self {
        ModeIndex(id)
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ε{}", self.0)
    }
}

/// Converts a slice of raw ids into mode labels.
pub fn modes(ids: &[usize]) -> Vec<ModeIndex> {
    ids.iter().copied().map(ModeIndex).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Boson => f.write_str("boson"),
            Statistics::Fermion => f.write_str("fermion"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// A basis occupation assignment.
///
/// Only occupied modes are stored, in increasing mode order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState {
    stats: Statistics,
    occ: Vec<(ModeIndex, u32)>,
    total_n: u32,
}

impl OccupationState {
    pub fn vacuum(stats: Statistics) -> Self {
        OccupationState {
            stats,
            occ: Vec::new(),
            total_n: 0,
        }
    }

    /// Builds a state from `(mode, count)` pairs in any order. Zero counts are
    /// dropped and repeated modes accumulate.
    pub fn from_counts<I>(stats: Statistics, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ModeIndex, u32)>,
    {
        let mut map: BTreeMap<ModeIndex, u32> = BTreeMap::new();
        for (mode, count) in counts {
            if count > 0 {
                *map.entry(mode).or_insert(0) += count;
            }
        }
        if stats == Statistics::Fermion {
            if let Some((mode, &count)) = map.iter().find(|(_, &c)| c > 1) {
                return Err(QSpaceError::PauliViolation {
                    mode: mode.0,
                    count,
                });
            }
        }
        let total_n = map.values().sum();
        Ok(OccupationState {
            stats,
            occ: map.into_iter().collect(),
            total_n,
        })
    }

    /// Builds a state from a dense occupation vector `[n_0, n_1, ...]`.
    pub fn from_dense(stats: Statistics, dense: &[u32]) -> Result<Self> {
        Self::from_counts(
            stats,
            dense.iter().enumerate().map(|(k, &n)| (ModeIndex(k), n)),
        )
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn total_n(&self) -> u32 {
        self.total_n
    }

    pub fn count(&self, mode: ModeIndex) -> u32 {
        self.occ
            .binary_search_by_key(&mode, |&(m, _)| m)
            .map(|i| self.occ[i].1)
            .unwrap_or(0)
    }

    /// Occupied modes with their counts, increasing mode order.
    pub fn occupations(&self) -> &[(ModeIndex, u32)] {
        &self.occ
    }

    /// Highest occupied mode, if any.
    pub fn max_mode(&self) -> Option<ModeIndex> {
        self.occ.last().map(|&(m, _)| m)
    }

    /// The state's symbol `ε_{i1} ε_{i2} ...` with each mode repeated by its
    /// count, in canonical (increasing) order.
    pub fn mode_sequence(&self) -> Vec<ModeIndex> {
        self.occ
            .iter()
            .flat_map(|&(m, n)| std::iter::repeat_n(m, n as usize))
            .collect()
    }

    pub fn dense(&self, modes: usize) -> Vec<u32> {
        let mut out = vec![0; modes];
        for &(m, n) in &self.occ {
            if m.0 < modes {
                out[m.0] = n;
            }
        }
        out
    }

    /// `Π_k n_k!`, the self-product of the raw bosonic basis vector. Always 1
    /// for fermions.
    pub fn factorial_weight(&self) -> f64 {
        self.occ
            .iter()
            .map(|&(_, n)| (1..=n).map(f64::from).product::<f64>())
            .product()
    }

    /// Number of occupied modes strictly below `mode`.
    pub(crate) fn occupied_before(&self, mode: ModeIndex) -> usize {
        self.occ.partition_point(|&(m, _)| m < mode)
    }

    pub(crate) fn with_delta(&self, mode: ModeIndex, delta: i32) -> Option<Self> {
        let mut occ = self.occ.clone();
        match occ.binary_search_by_key(&mode, |&(m, _)| m) {
            Ok(i) => {
                let n = occ[i].1 as i64 + delta as i64;
                if n < 0 {
                    return None;
                }
                if n == 0 {
                    occ.remove(i);
                } else {
                    occ[i].1 = n as u32;
                }
            }
            Err(i) => {
                if delta < 0 {
                    return None;
                }
                if delta > 0 {
                    occ.insert(i, (mode, delta as u32));
                }
            }
        }
        let total_n = (self.total_n as i64 + delta as i64) as u32;
        Some(OccupationState {
            stats: self.stats,
            occ,
            total_n,
        })
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for m in self.mode_sequence() {
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

/// Result of canonicalizing a list of occupied modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MadeState {
    Occupied(OccupationState, Sign),
    /// A fermionic list with a repeated mode: a null-norm vector.
    Null,
}

impl MadeState {
    pub fn state(&self) -> Option<&OccupationState> {
        match self {
            MadeState::Occupied(s, _) => Some(s),
            MadeState::Null => None,
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        match self {
            MadeState::Occupied(_, sign) => Some(*sign),
            MadeState::Null => None,
        }
    }
}

/// Statistics and mode count shared by every vector of one Fock space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    pub stats: Statistics,
    pub modes: usize,
}

impl FockSpace {
    pub fn new(stats: Statistics, modes: usize) -> Self {
        FockSpace { stats, modes }
    }

    pub fn bosonic(modes: usize) -> Self {
        Self::new(Statistics::Boson, modes)
    }

    pub fn fermionic(modes: usize) -> Self {
        Self::new(Statistics::Fermion, modes)
    }

    pub fn check_mode(&self, mode: ModeIndex) -> Result<()> {
        if mode.0 < self.modes {
            Ok(())
        } else {
            Err(QSpaceError::InvalidMode {
                mode: mode.0,
                modes: self.modes,
            })
        }
    }

    pub fn check_state(&self, state: &OccupationState) -> Result<()> {
        if state.stats != self.stats {
            return Err(QSpaceError::StatisticsMismatch {
                expected: self.stats,
                found: state.stats,
            });
        }
        match state.max_mode() {
            Some(m) => self.check_mode(m),
            None => Ok(()),
        }
    }

    /// Canonicalizes an occupied-mode list.
    ///
    /// Bosons: the multiset of the list, sign always `+`. Fermions: the sorted
    /// list with the parity of the sorting permutation, or [`MadeState::Null`]
    /// when a mode repeats.
    pub fn make_state(&self, mode_list: &[ModeIndex]) -> Result<MadeState> {
        for &m in mode_list {
            self.check_mode(m)?;
        }
        let counts = mode_list.iter().map(|&m| (m, 1));
        match self.stats {
            Statistics::Boson => Ok(MadeState::Occupied(
                OccupationState::from_counts(Statistics::Boson, counts)?,
                Sign::Plus,
            )),
            Statistics::Fermion => {
                let mut inversions = 0usize;
                for (i, a) in mode_list.iter().enumerate() {
                    for b in &mode_list[i + 1..] {
                        if a == b {
                            return Ok(MadeState::Null);
                        }
                        if a > b {
                            inversions += 1;
                        }
                    }
                }
                let state = OccupationState::from_counts(Statistics::Fermion, counts)?;
                Ok(MadeState::Occupied(
                    state,
                    Sign::from_parity(inversions % 2 == 1),
                ))
            }
        }
    }

    pub fn state_from_dense(&self, dense: &[u32]) -> Result<OccupationState> {
        if dense.len() != self.modes {
            return Err(QSpaceError::DimensionMismatch {
                expected: self.modes,
                found: dense.len(),
            });
        }
        OccupationState::from_dense(self.stats, dense)
    }

    pub fn zero(&self) -> FockVector {
        FockVector {
            space: *self,
            terms: BTreeMap::new(),
        }
    }

    /// `|0)`.
    pub fn vacuum(&self) -> FockVector {
        self.basis_vector(OccupationState::vacuum(self.stats))
    }

    /// The raw basis quasi-function for `state`, amplitude 1.
    pub fn basis_vector(&self, state: OccupationState) -> FockVector {
        let mut v = self.zero();
        v.terms.insert(state, Complex64::new(1.0, 0.0));
        v
    }

    /// The unit-normalized occupation ket `|… n_k …⟩`, i.e. the raw basis
    /// vector divided by `sqrt(Π n_k!)`.
    pub fn ket(&self, state: OccupationState) -> FockVector {
        let scale = 1.0 / state.factorial_weight().sqrt();
        let mut v = self.zero();
        v.terms.insert(state, Complex64::new(scale, 0.0));
        v
    }

    /// `|ε_{i1} ε_{i2} …)` for an arbitrary mode list, with the fermionic
    /// reordering sign folded into the amplitude. Null lists give the zero
    /// vector.
    pub fn product_state(&self, mode_list: &[ModeIndex]) -> Result<FockVector> {
        Ok(match self.make_state(mode_list)? {
            MadeState::Occupied(state, sign) => {
                let mut v = self.basis_vector(state);
                if sign == Sign::Minus {
                    v = v.scale(Complex64::new(-1.0, 0.0));
                }
                v
            }
            MadeState::Null => self.zero(),
        })
    }
}

/// Sparse complex linear combination of basis states of one space.
///
/// Amplitudes refer to the raw basis quasi-functions, whose bosonic
/// self-product is `Π n_k!`. See [`FockVector::from_ket_coefficients`] for the
/// normalized-ket view.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    space: FockSpace,
    terms: BTreeMap<OccupationState, Amplitude>,
}

impl FockVector {
    pub fn from_terms<I>(space: FockSpace, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationState, Amplitude)>,
    {
        let mut v = space.zero();
        for (state, amp) in terms {
            space.check_state(&state)?;
            *v.terms.entry(state).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        v.prune();
        Ok(v)
    }

    /// Builds a vector from coefficients on normalized kets.
    pub fn from_ket_coefficients<I>(space: FockSpace, coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = (OccupationState, Amplitude)>,
    {
        Self::from_terms(
            space,
            coefficients.into_iter().map(|(s, c)| {
                let w = s.factorial_weight().sqrt();
                (s, c / w)
            }),
        )
    }

    /// Coefficients on normalized kets: raw amplitude times `sqrt(Π n_k!)`.
    pub fn ket_coefficients(&self) -> impl Iterator<Item = (&OccupationState, Amplitude)> {
        self.terms
            .iter()
            .map(|(s, &a)| (s, a * s.factorial_weight().sqrt()))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn stats(&self) -> Statistics {
        self.space.stats
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, state: &OccupationState) -> Amplitude {
        self.terms
            .get(state)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationState, &Amplitude)> {
        self.terms.iter()
    }

    pub fn max_particles(&self) -> u32 {
        self.terms.keys().map(|s| s.total_n).max().unwrap_or(0)
    }

    fn check_compatible(&self, other: &FockVector) -> Result<()> {
        if self.space.stats != other.space.stats {
            return Err(QSpaceError::StatisticsMismatch {
                expected: self.space.stats,
                found: other.space.stats,
            });
        }
        if self.space.modes != other.space.modes {
            return Err(QSpaceError::ModeCountMismatch {
                left: self.space.modes,
                right: other.space.modes,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FockVector) -> Result<FockVector> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (s, &a) in &other.terms {
            *out.terms
                .entry(s.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &FockVector) -> Result<FockVector> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, gamma: Amplitude) -> FockVector {
        let mut out = self.clone();
        for a in out.terms.values_mut() {
            *a *= gamma;
        }
        out.prune();
        out
    }

    /// Largest amplitude magnitude difference against `other`.
    pub fn max_abs_diff(&self, other: &FockVector) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.terms.values().map(|a| a.norm()).fold(0.0, f64::max))
    }

    pub(crate) fn accumulate(&mut self, state: OccupationState, amp: Amplitude) {
        *self.terms.entry(state).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    pub(crate) fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() >= PRUNE_TOL);
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}{:+}i){}", a.re, a.im, s)?;
        }
        Ok(())
    }
}

/// `a + b`, failing on mixed statistics.
pub fn vec_add(a: &FockVector, b: &FockVector) -> Result<FockVector> {
    a.add(b)
}

/// `γ * a`.
pub fn vec_scale(gamma: Amplitude, a: &FockVector) -> FockVector {
    a.scale(gamma)
}
