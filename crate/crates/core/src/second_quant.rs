//! Second-quantized Hamiltonians on truncated occupation bases: assembly from
//! one- and two-body matrix elements, dense matrices, spectra and unitary
//! evolution (ħ = 1).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{Selector, TruncatedBasis};
use crate::error::{QSpaceError, Result};
use crate::fock::{FockVector, Statistics};
use crate::inner::inner_auto;
use crate::ladder::{apply_expr_capped, LadderOp, OperatorExpr, TruncationEvent};
use crate::tolerance::{
    EIGEN_RESIDUAL_TOL, EVOLUTION_NORM_TOL, INITIAL_NORM_TOL, MATRIX_ELEMENT_HERMITIAN_TOL,
    PRUNE_TOL, SPECTRUM_HERMITIAN_TOL,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest mode count for which a dense `M⁴` two-body table is accepted.
pub const MAX_DENSE_V_MODES: usize = 8;

pub type TwoBodyKey = (usize, usize, usize, usize);

/// One-body `T_kl` and two-body `V_klpq` matrix elements of
/// `H = Σ T_kl a†_k a_l + ½ Σ V_klpq a†_k a†_l a_p a_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElements {
    modes: usize,
    one_body: CMatrix,
    two_body: BTreeMap<TwoBodyKey, Complex64>,
}

impl MatrixElements {
    pub fn new(one_body: CMatrix, two_body: BTreeMap<TwoBodyKey, Complex64>) -> Result<Self> {
        let modes = one_body.nrows();
        if one_body.ncols() != modes {
            return Err(QSpaceError::DimensionMismatch {
                expected: modes,
                found: one_body.ncols(),
            });
        }
        for &(k, l, p, q) in two_body.keys() {
            for idx in [k, l, p, q] {
                if idx >= modes {
                    return Err(QSpaceError::InvalidMode { mode: idx, modes });
                }
            }
        }
        let me = MatrixElements {
            modes,
            one_body,
            two_body: two_body
                .into_iter()
                .filter(|(_, v)| v.norm() != 0.0)
                .collect(),
        };
        me.check_hermitian()?;
        Ok(me)
    }

    pub fn one_body_only(one_body: CMatrix) -> Result<Self> {
        Self::new(one_body, BTreeMap::new())
    }

    /// Builds from a dense `M⁴` table indexed `[k][l][p][q]` (row-major).
    pub fn from_dense_two_body(one_body: CMatrix, dense: &[Complex64]) -> Result<Self> {
        let m = one_body.nrows();
        if m > MAX_DENSE_V_MODES {
            return Err(QSpaceError::SizeCap {
                what: "modes for a dense two-body table",
                value: m,
                max: MAX_DENSE_V_MODES,
            });
        }
        if dense.len() != m.pow(4) {
            return Err(QSpaceError::DimensionMismatch {
                expected: m.pow(4),
                found: dense.len(),
            });
        }
        let mut v = BTreeMap::new();
        for (i, &x) in dense.iter().enumerate() {
            if x.norm() != 0.0 {
                v.insert((i / (m * m * m), (i / (m * m)) % m, (i / m) % m, i % m), x);
            }
        }
        Self::new(one_body, v)
    }

    fn check_hermitian(&self) -> Result<()> {
        let t = &self.one_body;
        let mut dev: f64 = 0.0;
        for k in 0..self.modes {
            for l in 0..self.modes {
                dev = dev.max((t[(k, l)] - t[(l, k)].conj()).norm());
            }
        }
        if dev > MATRIX_ELEMENT_HERMITIAN_TOL {
            return Err(QSpaceError::NonHermitian {
                what: "one-body matrix T",
                deviation: dev,
            });
        }
        let mut dev: f64 = 0.0;
        for (&(k, l, p, q), &v) in &self.two_body {
            dev = dev.max((v - self.v(q, p, l, k).conj()).norm());
        }
        if dev > MATRIX_ELEMENT_HERMITIAN_TOL {
            return Err(QSpaceError::NonHermitian {
                what: "two-body table V (V_klpq = conj V_qplk)",
                deviation: dev,
            });
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn t(&self, k: usize, l: usize) -> Complex64 {
        self.one_body[(k, l)]
    }

    pub fn v(&self, k: usize, l: usize, p: usize, q: usize) -> Complex64 {
        self.two_body
            .get(&(k, l, p, q))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn one_body(&self) -> &CMatrix {
        &self.one_body
    }

    pub fn two_body(&self) -> &BTreeMap<TwoBodyKey, Complex64> {
        &self.two_body
    }

    /// Two-site hopping `T = [[0, -t], [-t, 0]]`, no interaction.
    pub fn two_site_hopping(t: f64) -> Self {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-t, 0.0),
                Complex64::new(-t, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        Self::one_body_only(m).expect("hopping matrix is Hermitian")
    }
}

/// `Σ T_kl a†_k a_l + ½ Σ V_klpq a†_k a†_l a_p a_q`, zero terms dropped.
pub fn build_hamiltonian(me: &MatrixElements) -> OperatorExpr {
    let mut h = OperatorExpr::zero();
    for k in 0..me.modes {
        for l in 0..me.modes {
            let t = me.t(k, l);
            if t.norm() >= PRUNE_TOL {
                h.push(t, vec![LadderOp::create(k), LadderOp::annihilate(l)]);
            }
        }
    }
    for (&(k, l, p, q), &v) in &me.two_body {
        if v.norm() >= PRUNE_TOL {
            h.push(
                v * 0.5,
                vec![
                    LadderOp::create(k),
                    LadderOp::create(l),
                    LadderOp::annihilate(p),
                    LadderOp::annihilate(q),
                ],
            );
        }
    }
    h
}

/// Dense matrix of an operator on a truncated basis, plus any truncation
/// events met while assembling it.
#[derive(Clone, Debug)]
pub struct BasisMatrix {
    pub matrix: CMatrix,
    pub truncation: Vec<TruncationEvent>,
}

/// `H_ij = (b_i | e | b_j)` on normalized kets.
///
/// Components of `e|b_j⟩` outside the basis are reported as truncation
/// events; for an `UpTo` basis they also include intermediates above the cap.
pub fn matrix_in_basis(e: &OperatorExpr, basis: &TruncatedBasis) -> Result<BasisMatrix> {
    let space = basis.space();
    if let Some(m) = e.max_mode() {
        space.check_mode(m)?;
    }
    let n = basis.len();
    let cap = match basis.selector() {
        Selector::UpTo(n_max) => n_max,
        Selector::Sector(_) => u32::MAX,
    };
    let columns = basis
        .states()
        .par_iter()
        .enumerate()
        .map(|(j, sj)| {
            let ket = space.ket(sj.clone());
            let (image, mut events) = apply_expr_capped(e, &ket, cap)?;
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for (state, _) in image.terms() {
                match basis.index_of(state) {
                    Some(i) => {
                        let bra = space.ket(state.clone());
                        col[i] = inner_auto(&bra, &image)?;
                    }
                    None => events.push(TruncationEvent {
                        term: j,
                        state: state.clone(),
                        magnitude: image.amplitude(state).norm(),
                    }),
                }
            }
            Ok((col, events))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = CMatrix::zeros(n, n);
    let mut truncation = Vec::new();
    for (j, (col, events)) in columns.into_iter().enumerate() {
        for (i, x) in col.into_iter().enumerate() {
            matrix[(i, j)] = x;
        }
        truncation.extend(events);
    }
    Ok(BasisMatrix { matrix, truncation })
}

pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            dev = dev.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    dev
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: CMatrix,
}

impl Spectrum {
    /// Largest `|H v − λ v|` over all pairs.
    pub fn max_residual(&self, h: &CMatrix) -> f64 {
        (0..self.values.len())
            .map(|i| {
                let v = self.vectors.column(i);
                (h * v - v * Complex64::new(self.values[i], 0.0)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a dense Hermitian matrix.
pub fn spectrum(h: &CMatrix) -> Result<Spectrum> {
    if h.nrows() != h.ncols() {
        return Err(QSpaceError::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let dev = hermitian_deviation(h);
    if dev > SPECTRUM_HERMITIAN_TOL {
        return Err(QSpaceError::NonHermitian {
            what: "matrix",
            deviation: dev,
        });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(Spectrum {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    let s = Spectrum { values, vectors };
    debug_assert!(s.max_residual(h) <= EIGEN_RESIDUAL_TOL * (1.0 + h.norm()));
    Ok(s)
}

/// Spectral propagator for a fixed Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Propagator {
    spectrum: Spectrum,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self> {
        Ok(Propagator {
            spectrum: spectrum(h)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.values.len()
    }

    /// `e^{-iHt} ψ = U e^{-iΛt} U† ψ`.
    pub fn propagate(&self, psi: &CVector, t: f64) -> CVector {
        let u = &self.spectrum.vectors;
        let mut c = u.adjoint() * psi;
        for (ci, &lambda) in c.iter_mut().zip(&self.spectrum.values) {
            *ci *= Complex64::from_polar(1.0, -lambda * t);
        }
        u * c
    }
}

fn check_initial(h: &CMatrix, psi0: &CVector) -> Result<()> {
    if psi0.len() != h.nrows() {
        return Err(QSpaceError::DimensionMismatch {
            expected: h.nrows(),
            found: psi0.len(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > INITIAL_NORM_TOL {
        return Err(QSpaceError::NotNormalized { norm });
    }
    Ok(())
}

/// `ψ(t)` for `ψ(0) = ψ0`. `steps` only sets how many intermediate samples the
/// drift check looks at; the propagation itself is exact.
pub fn evolve(h: &CMatrix, psi0: &CVector, t: f64, steps: usize) -> Result<CVector> {
    let mut samples = evolve_samples(h, psi0, t, steps)?;
    Ok(samples.pop().expect("at least one sample").1)
}

/// `ψ(t_k)` at `t_k = k t / steps` for `k = 0..=steps`.
pub fn evolve_samples(
    h: &CMatrix,
    psi0: &CVector,
    t: f64,
    steps: usize,
) -> Result<Vec<(f64, CVector)>> {
    if steps == 0 {
        return Err(QSpaceError::InvalidArgument(
            "steps must be positive".into(),
        ));
    }
    check_initial(h, psi0)?;
    let prop = Propagator::new(h)?;
    (0..=steps)
        .map(|k| {
            let tk = t * k as f64 / steps as f64;
            let psi = prop.propagate(psi0, tk);
            let drift = (psi.norm() - 1.0).abs();
            if drift > EVOLUTION_NORM_TOL {
                return Err(QSpaceError::NormDrift { drift, time: tk });
            }
            Ok((tk, psi))
        })
        .collect()
}

/// Dense coefficient vector of `v` on the normalized kets of `basis`.
pub fn coefficients_in_basis(v: &FockVector, basis: &TruncatedBasis) -> Result<CVector> {
    let space = basis.space();
    if v.stats() != space.stats {
        return Err(QSpaceError::StatisticsMismatch {
            expected: space.stats,
            found: v.stats(),
        });
    }
    let mut out = CVector::zeros(basis.len());
    for (state, c) in v.ket_coefficients() {
        let i = basis.index_of(state).ok_or_else(|| {
            QSpaceError::InvalidArgument(format!("state {state} is outside the basis"))
        })?;
        out[i] = c;
    }
    Ok(out)
}

/// Inverse of [`coefficients_in_basis`].
pub fn vector_from_coefficients(c: &CVector, basis: &TruncatedBasis) -> Result<FockVector> {
    FockVector::from_ket_coefficients(
        basis.space(),
        basis.states().iter().cloned().zip(c.iter().copied()),
    )
}

/// `⟨n_k⟩` for every mode and `⟨N⟩` for a coefficient vector on `basis`.
pub fn occupancies(c: &CVector, basis: &TruncatedBasis) -> (Vec<f64>, f64) {
    let m = basis.space().modes;
    let mut occ = vec![0.0; m];
    let mut total = 0.0;
    for (s, amp) in basis.states().iter().zip(c.iter()) {
        let p = amp.norm_sqr();
        for &(mode, n) in s.occupations() {
            occ[mode.0] += p * n as f64;
        }
        total += p * s.total_n() as f64;
    }
    (occ, total)
}

/// Sector-`n` Hamiltonian matrix for `me`.
pub fn sector_matrix(me: &MatrixElements, stats: Statistics, n: u32) -> Result<CMatrix> {
    let basis = TruncatedBasis::sector(crate::fock::FockSpace::new(stats, me.modes()), n)?;
    Ok(matrix_in_basis(&build_hamiltonian(me), &basis)?.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real_matrix(n: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_iterator(n, n, data.iter().map(|&x| c(x))).transpose()
    }

    #[test]
    fn hamiltonian_expressions() {
        let h = build_hamiltonian(&MatrixElements::two_site_hopping(1.0));
        assert_eq!(h.len(), 2);

        let mut v = BTreeMap::new();
        v.insert((1, 1, 1, 1), c(3.0));
        let me = MatrixElements::new(CMatrix::zeros(2, 2), v).unwrap();
        let h = build_hamiltonian(&me);
        assert_eq!(h.len(), 1);
        assert_eq!(h.terms[0].coeff, c(1.5));
        assert_eq!(
            h.terms[0].factors,
            vec![
                LadderOp::create(1),
                LadderOp::create(1),
                LadderOp::annihilate(1),
                LadderOp::annihilate(1)
            ]
        );

        let h = build_hamiltonian(&MatrixElements::one_body_only(CMatrix::identity(3, 3)).unwrap());
        assert_eq!(h, OperatorExpr::total_number(3));
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let t = real_matrix(2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(
            MatrixElements::one_body_only(t),
            Err(QSpaceError::NonHermitian { .. })
        ));
        let mut v = BTreeMap::new();
        v.insert((0, 1, 1, 0), Complex64::new(0.0, 1.0));
        assert!(MatrixElements::new(CMatrix::zeros(2, 2), v).is_err());
    }

    #[test]
    fn dense_two_body_cap() {
        let t = CMatrix::zeros(9, 9);
        assert!(matches!(
            MatrixElements::from_dense_two_body(t, &[]),
            Err(QSpaceError::SizeCap { .. })
        ));
        let mut dense = vec![c(0.0); 16];
        dense[0] = c(2.0); // V_0000
        let me = MatrixElements::from_dense_two_body(CMatrix::zeros(2, 2), &dense).unwrap();
        assert_eq!(me.v(0, 0, 0, 0), c(2.0));
        assert_eq!(me.two_body().len(), 1);
    }

    #[test]
    fn number_operator_is_n_times_identity() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for n in 0..=3 {
                let basis = TruncatedBasis::sector(FockSpace::new(stats, 3), n).unwrap();
                let m = matrix_in_basis(&OperatorExpr::total_number(3), &basis).unwrap();
                assert!(m.truncation.is_empty());
                let expected = CMatrix::identity(basis.len(), basis.len()) * c(n as f64);
                assert!((m.matrix - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hopping_sectors() {
        let me = MatrixElements::two_site_hopping(1.0);
        let h1 = sector_matrix(&me, Statistics::Boson, 1).unwrap();
        assert!((h1 - real_matrix(2, &[0.0, -1.0, -1.0, 0.0])).norm() < 1e-14);

        let h2 = sector_matrix(&me, Statistics::Boson, 2).unwrap();
        assert_eq!(h2.nrows(), 3);
        let s = spectrum(&h2).unwrap();
        for (got, want) in s.values.iter().zip([-2.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-9);
        }

        let f2 = sector_matrix(&me, Statistics::Fermion, 2).unwrap();
        let s = spectrum(&f2).unwrap();
        assert_eq!(s.values.len(), 1);
        assert!(s.values[0].abs() < 1e-12);
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&real_matrix(2, &[0.0, -1.0, -1.0, 0.0])).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-12 && (s.values[1] - 1.0).abs() < 1e-12);

        let d = real_matrix(3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        let s = spectrum(&d).unwrap();
        assert_eq!(s.values, vec![-1.0, 2.0, 3.0]);
        assert!(s.max_residual(&d) < 1e-12);

        assert!(matches!(
            spectrum(&real_matrix(2, &[0.0, 1.0, 0.0, 0.0])),
            Err(QSpaceError::NonHermitian { .. })
        ));
    }

    #[test]
    fn complex_hermitian_residual() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0),
                Complex64::new(0.5, 0.3),
                Complex64::new(0.0, -0.2),
                Complex64::new(0.5, -0.3),
                c(-0.4),
                Complex64::new(1.1, 0.7),
                Complex64::new(0.0, 0.2),
                Complex64::new(1.1, -0.7),
                c(0.25),
            ],
        );
        let s = spectrum(&h).unwrap();
        assert!(s.max_residual(&h) < 1e-9);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn evolution_examples() {
        let psi0 = CVector::from_vec(vec![c(0.6), Complex64::new(0.0, 0.8)]);
        let zero = CMatrix::zeros(2, 2);
        assert!((evolve(&zero, &psi0, 3.7, 5).unwrap() - &psi0).norm() < 1e-15);

        let h = real_matrix(2, &[0.0, -1.0, -1.0, 0.0]);
        let s = spectrum(&h).unwrap();
        let lambda = s.values[1];
        let v: CVector = s.vectors.column(1).into();
        let out = evolve(&h, &v, std::f64::consts::PI / lambda, 10).unwrap();
        assert!((out + &v).norm() < 1e-9);

        // Rabi transfer |n1=1⟩ → |n2=1⟩ at t = π/2 for t_hop = 1
        let start = CVector::from_vec(vec![c(0.0), c(1.0)]);
        let out = evolve(&h, &start, std::f64::consts::FRAC_PI_2, 1).unwrap();
        assert!(out[0].norm_sqr() > 1.0 - 1e-12);
    }

    #[test]
    fn evolution_rejects_bad_input() {
        let h = CMatrix::zeros(2, 2);
        let bad = CVector::from_vec(vec![c(1.0), c(1.0)]);
        assert!(matches!(
            evolve(&h, &bad, 1.0, 1),
            Err(QSpaceError::NotNormalized { .. })
        ));
        let ok = CVector::from_vec(vec![c(1.0), c(0.0)]);
        assert!(evolve(&h, &ok, 1.0, 0).is_err());
    }

    #[test]
    fn non_conserving_expression_reports_truncation() {
        let basis = TruncatedBasis::up_to(FockSpace::bosonic(1), 2).unwrap();
        let e = OperatorExpr::single(LadderOp::create(0));
        let m = matrix_in_basis(&e, &basis).unwrap();
        assert_eq!(m.truncation.len(), 1);
        assert!((m.matrix[(1, 0)] - c(1.0)).norm() < 1e-14);
        assert!((m.matrix[(2, 1)] - c(2f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn coefficient_round_trip() {
        let basis = TruncatedBasis::up_to(FockSpace::bosonic(2), 2).unwrap();
        let c0 = CVector::from_fn(basis.len(), |i, _| Complex64::new(i as f64, 1.0));
        let v = vector_from_coefficients(&c0, &basis).unwrap();
        assert!((coefficients_in_basis(&v, &basis).unwrap() - c0).norm() < 1e-14);
    }
}
