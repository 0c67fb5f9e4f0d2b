//! Creation and annihilation operators, formal operator expressions and the
//! (anti)commutation checker.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::TruncatedBasis;
use crate::error::{QSpaceError, Result};
use crate::fock::{FockSpace, FockVector, ModeIndex, OccupationState, Statistics};
use crate::inner::norm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Create,
    Annihilate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LadderOp {
    pub action: Action,
    pub mode: ModeIndex,
}

impl LadderOp {
    pub fn create(mode: usize) -> Self {
        LadderOp {
            action: Action::Create,
            mode: ModeIndex(mode),
        }
    }

    pub fn annihilate(mode: usize) -> Self {
        LadderOp {
            action: Action::Annihilate,
            mode: ModeIndex(mode),
        }
    }
}

/// One product `coeff * F1 F2 … Fk`; `F1` is applied last.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTerm {
    pub coeff: Complex64,
    pub factors: Vec<LadderOp>,
}

/// A formal sum of operator products. Applied, never simplified.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct OperatorExpr {
    pub terms: Vec<OperatorTerm>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(coeff: Complex64) -> Self {
        Self::term(coeff, Vec::new())
    }

    pub fn term(coeff: Complex64, factors: Vec<LadderOp>) -> Self {
        OperatorExpr {
            terms: vec![OperatorTerm { coeff, factors }],
        }
    }

    pub fn single(op: LadderOp) -> Self {
        Self::term(Complex64::new(1.0, 0.0), vec![op])
    }

    /// `N_k = a†_k a_k`.
    pub fn number(mode: usize) -> Self {
        Self::term(
            Complex64::new(1.0, 0.0),
            vec![LadderOp::create(mode), LadderOp::annihilate(mode)],
        )
    }

    /// `Σ_k N_k` over `modes` modes.
    pub fn total_number(modes: usize) -> Self {
        (0..modes).fold(Self::zero(), |acc, k| acc.plus(&Self::number(k)))
    }

    pub fn push(&mut self, coeff: Complex64, factors: Vec<LadderOp>) {
        self.terms.push(OperatorTerm { coeff, factors });
    }

    pub fn plus(&self, other: &OperatorExpr) -> OperatorExpr {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn scaled(&self, gamma: Complex64) -> OperatorExpr {
        OperatorExpr {
            terms: self
                .terms
                .iter()
                .map(|t| OperatorTerm {
                    coeff: t.coeff * gamma,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    /// Operator product `self · other` (other acts first).
    pub fn times(&self, other: &OperatorExpr) -> OperatorExpr {
        let mut out = OperatorExpr::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().copied());
                out.push(a.coeff * b.coeff, factors);
            }
        }
        out
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
        a.times(b)
            .plus(&b.times(a).scaled(Complex64::new(-1.0, 0.0)))
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
        a.times(b).plus(&b.times(a))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest mode referenced by any factor.
    pub fn max_mode(&self) -> Option<ModeIndex> {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.mode))
            .max()
    }

    /// True when every term has as many creators as annihilators.
    pub fn conserves_number(&self) -> bool {
        self.terms.iter().all(|t| {
            let created = t
                .factors
                .iter()
                .filter(|f| f.action == Action::Create)
                .count();
            2 * created == t.factors.len()
        })
    }
}

fn check_stats(expected: Statistics, v: &FockVector) -> Result<()> {
    if v.stats() == expected {
        Ok(())
    } else {
        Err(QSpaceError::StatisticsMismatch {
            expected,
            found: v.stats(),
        })
    }
}

/// Bosonic ladder action.
///
/// On unit kets this is `a|…n…⟩ = √n |…n−1…⟩` and `a†|…n…⟩ = √(n+1) |…n+1…⟩`.
/// Vectors store amplitudes on raw basis vectors of norm² `Π n_k!`; passing
/// the ket rule through that normalization leaves integer factors:
/// `a† f = f⁺` and `a f = n f⁻`. Working with the integer form keeps
/// `a† a` exact.
pub fn apply_boson(op: LadderOp, v: &FockVector) -> Result<FockVector> {
    check_stats(Statistics::Boson, v)?;
    v.space().check_mode(op.mode)?;
    let mut out = v.space().zero();
    for (state, &amp) in v.terms() {
        match op.action {
            Action::Create => {
                if let Some(next) = state.with_delta(op.mode, 1) {
                    out.accumulate(next, amp);
                }
            }
            Action::Annihilate => {
                let n = state.count(op.mode);
                if n == 0 {
                    continue;
                }
                if let Some(next) = state.with_delta(op.mode, -1) {
                    out.accumulate(next, amp * n as f64);
                }
            }
        }
    }
    out.prune();
    Ok(out)
}

/// Fermionic ladder action on canonical states.
///
/// `C†_α` prepends `α` and reorders, picking up `(−1)^(occupied modes
/// before α)`; on an `α`-occupied state the result is the null vector.
/// `C_α` removes `α` with the same sign, and vanishes when `α` is empty.
pub fn apply_fermion(op: LadderOp, v: &FockVector) -> Result<FockVector> {
    check_stats(Statistics::Fermion, v)?;
    v.space().check_mode(op.mode)?;
    let mut out = v.space().zero();
    for (state, &amp) in v.terms() {
        let occupied = state.count(op.mode) == 1;
        let delta = match (op.action, occupied) {
            (Action::Create, false) => 1,
            (Action::Annihilate, true) => -1,
            _ => continue,
        };
        let sign = if state.occupied_before(op.mode) % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        if let Some(next) = state.with_delta(op.mode, delta) {
            out.accumulate(next, amp * sign);
        }
    }
    out.prune();
    Ok(out)
}

pub fn apply(op: LadderOp, v: &FockVector) -> Result<FockVector> {
    match v.stats() {
        Statistics::Boson => apply_boson(op, v),
        Statistics::Fermion => apply_fermion(op, v),
    }
}

/// Components dropped because an intermediate state exceeded a particle cap.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationEvent {
    pub term: usize,
    pub state: OccupationState,
    pub magnitude: f64,
}

/// Applies `e` to `v`; factors of each term act right to left.
pub fn apply_expr(e: &OperatorExpr, v: &FockVector) -> Result<FockVector> {
    Ok(apply_expr_inner(e, v, None)?.0)
}

/// Like [`apply_expr`] but drops, and reports, every intermediate component
/// carrying more than `cap` particles.
pub fn apply_expr_capped(
    e: &OperatorExpr,
    v: &FockVector,
    cap: u32,
) -> Result<(FockVector, Vec<TruncationEvent>)> {
    apply_expr_inner(e, v, Some(cap))
}

fn apply_expr_inner(
    e: &OperatorExpr,
    v: &FockVector,
    cap: Option<u32>,
) -> Result<(FockVector, Vec<TruncationEvent>)> {
    let mut total = v.space().zero();
    let mut events = Vec::new();
    for (t, term) in e.terms.iter().enumerate() {
        let mut w = v.clone();
        for &op in term.factors.iter().rev() {
            w = apply(op, &w)?;
            if let Some(cap) = cap {
                let (kept, dropped) = split_over_cap(&w, cap);
                events.extend(
                    dropped
                        .into_iter()
                        .map(|(state, magnitude)| TruncationEvent {
                            term: t,
                            state,
                            magnitude,
                        }),
                );
                w = kept;
            }
            if w.is_zero() {
                break;
            }
        }
        total = total.add(&w.scale(term.coeff))?;
    }
    Ok((total, events))
}

fn split_over_cap(w: &FockVector, cap: u32) -> (FockVector, Vec<(OccupationState, f64)>) {
    if w.max_particles() <= cap {
        return (w.clone(), Vec::new());
    }
    let mut kept = w.space().zero();
    let mut dropped = Vec::new();
    for (s, &a) in w.terms() {
        if s.total_n() > cap {
            dropped.push((s.clone(), a.norm()));
        } else {
            kept.accumulate(s.clone(), a);
        }
    }
    (kept, dropped)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationFamily {
    /// `[a_α, a†_β] − δ` or `{C_α, C†_β} − δ`.
    Mixed,
    /// `[a_α, a_β]` or `{C_α, C_β}`.
    AnnihilateAnnihilate,
    /// `[a†_α, a†_β]` or `{C†_α, C†_β}`.
    CreateCreate,
}

impl RelationFamily {
    pub const ALL: [RelationFamily; 3] = [
        RelationFamily::Mixed,
        RelationFamily::AnnihilateAnnihilate,
        RelationFamily::CreateCreate,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub family: RelationFamily,
    pub checked: usize,
    /// States whose evaluation would have left the truncated basis.
    pub truncated: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorReport {
    pub stats: Statistics,
    pub alpha: ModeIndex,
    pub beta: ModeIndex,
    pub families: Vec<FamilyReport>,
}

impl CommutatorReport {
    pub fn max_residual(&self) -> f64 {
        self.families
            .iter()
            .map(|f| f.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn checked(&self) -> usize {
        self.families.iter().map(|f| f.checked).sum()
    }
}

/// The bracket expression whose action must vanish for `family`: the
/// commutator for bosons, the anticommutator for fermions, minus `δ_αβ` in
/// the mixed case.
pub fn relation_expr(
    stats: Statistics,
    family: RelationFamily,
    alpha: ModeIndex,
    beta: ModeIndex,
) -> OperatorExpr {
    let (x, y) = match family {
        RelationFamily::Mixed => (LadderOp::annihilate(alpha.0), LadderOp::create(beta.0)),
        RelationFamily::AnnihilateAnnihilate => {
            (LadderOp::annihilate(alpha.0), LadderOp::annihilate(beta.0))
        }
        RelationFamily::CreateCreate => (LadderOp::create(alpha.0), LadderOp::create(beta.0)),
    };
    let (x, y) = (OperatorExpr::single(x), OperatorExpr::single(y));
    let bracket = match stats {
        Statistics::Boson => OperatorExpr::commutator(&x, &y),
        Statistics::Fermion => OperatorExpr::anticommutator(&x, &y),
    };
    if family == RelationFamily::Mixed && alpha == beta {
        bracket.plus(&OperatorExpr::scalar(Complex64::new(-1.0, 0.0)))
    } else {
        bracket
    }
}

/// Evaluates every relation family for the pair `(α, β)` on each basis ket
/// and reports the largest residual norm.
///
/// Brackets are applied with the basis particle cap. A state whose evaluation
/// would leave the cap (e.g. `a a†` on a state with `N_max` bosons) is
/// counted as truncated rather than checked.
pub fn commutator_check(
    basis: &TruncatedBasis,
    alpha: ModeIndex,
    beta: ModeIndex,
) -> Result<CommutatorReport> {
    let space: FockSpace = basis.space();
    space.check_mode(alpha)?;
    space.check_mode(beta)?;
    let cap = basis.particle_cap();
    let families = RelationFamily::ALL
        .iter()
        .map(|&family| {
            let expr = relation_expr(space.stats, family, alpha, beta);
            let outcomes = basis
                .states()
                .par_iter()
                .map(|s| {
                    let ket = space.ket(s.clone());
                    let (r, events) = apply_expr_capped(&expr, &ket, cap)?;
                    Ok(if events.is_empty() {
                        Some(norm(&r))
                    } else {
                        None
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let checked = outcomes.iter().filter(|o| o.is_some()).count();
            Ok(FamilyReport {
                family,
                checked,
                truncated: outcomes.len() - checked,
                max_residual: outcomes.iter().flatten().copied().fold(0.0, f64::max),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutatorReport {
        stats: space.stats,
        alpha,
        beta,
        families,
    })
}

/// Runs [`commutator_check`] over every ordered mode pair.
pub fn commutator_sweep(basis: &TruncatedBasis) -> Result<Vec<CommutatorReport>> {
    let m = basis.space().modes;
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            out.push(commutator_check(basis, ModeIndex(a), ModeIndex(b))?);
        }
    }
    Ok(out)
}
