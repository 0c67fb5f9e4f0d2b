//! Brute-force labeled tensor products.
//!
//! The standard construction: label the particles, work in the full `Mⁿ`
//! dimensional product space, then project with the symmetrizer or
//! antisymmetrizer. Nothing here is efficient and nothing here calls the
//! occupation-number products or ladder operators, so it can check them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QSpaceError, Result};
use crate::fock::{FockSpace, FockVector, OccupationState, Statistics};
use crate::second_quant::{CMatrix, MatrixElements};
use crate::tolerance::{ORTHOGONALIZATION_TOL, SYMMETRIZED_TOL};

pub const MAX_PARTICLES: usize = 4;
pub const MAX_MODES: usize = 4;

fn check_caps(modes: usize, n: usize) -> Result<()> {
    if n > MAX_PARTICLES {
        return Err(QSpaceError::SizeCap {
            what: "particles",
            value: n,
            max: MAX_PARTICLES,
        });
    }
    if modes > MAX_MODES {
        return Err(QSpaceError::SizeCap {
            what: "modes",
            value: modes,
            max: MAX_MODES,
        });
    }
    Ok(())
}

/// All permutations of `0..n` with their signs (+1 / -1), by cycle count.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        current: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if current.len() == n {
            out.push((current.clone(), cycle_sign(current)));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

fn cycle_sign(p: &[usize]) -> f64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1.0;
    for start in 0..p.len() {
        let mut j = start;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// A vector of `H ⊗ … ⊗ H` (`n` factors, `dim = M`), indexed by the label
/// tuple `(i_1, …, i_n)` with particle 1 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledTensor {
    n: usize,
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl LabeledTensor {
    pub fn zeros(dim: usize, n: usize) -> Result<Self> {
        check_caps(dim, n)?;
        Ok(LabeledTensor {
            n,
            dim,
            amplitudes: vec![Complex64::new(0.0, 0.0); dim.pow(n as u32)],
        })
    }

    pub fn from_amplitudes(dim: usize, n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_caps(dim, n)?;
        if amplitudes.len() != dim.pow(n as u32) {
            return Err(QSpaceError::DimensionMismatch {
                expected: dim.pow(n as u32),
                found: amplitudes.len(),
            });
        }
        Ok(LabeledTensor { n, dim, amplitudes })
    }

    /// `e_{l1} ⊗ e_{l2} ⊗ …`.
    pub fn basis(dim: usize, labels: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(dim, labels.len())?;
        if let Some(&bad) = labels.iter().find(|&&l| l >= dim) {
            return Err(QSpaceError::InvalidMode {
                mode: bad,
                modes: dim,
            });
        }
        let i = t.index(labels);
        t.amplitudes[i] = Complex64::new(1.0, 0.0);
        Ok(t)
    }

    /// `ψ1 ⊗ ψ2 ⊗ …` for single-particle vectors of length `dim`.
    pub fn product(dim: usize, factors: &[&[Complex64]]) -> Result<Self> {
        let mut t = Self::zeros(dim, factors.len())?;
        for (i, amp) in t.amplitudes.iter_mut().enumerate() {
            let labels = labels_of(i, dim, factors.len());
            *amp = labels
                .iter()
                .zip(factors)
                .map(|(&l, f)| f[l])
                .fold(Complex64::new(1.0, 0.0), |a, b| a * b);
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn index(&self, labels: &[usize]) -> usize {
        labels.iter().fold(0, |acc, &l| acc * self.dim + l)
    }

    pub fn labels(&self, index: usize) -> Vec<usize> {
        labels_of(index, self.dim, self.n)
    }

    pub fn get(&self, labels: &[usize]) -> Complex64 {
        self.amplitudes[self.index(labels)]
    }

    /// `⟨self|other⟩`, label by label.
    pub fn inner(&self, other: &LabeledTensor) -> Complex64 {
        if self.n != other.n || self.dim != other.dim {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn sub(&self, other: &LabeledTensor) -> LabeledTensor {
        LabeledTensor {
            n: self.n,
            dim: self.dim,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `P_π`: particle `k` takes the label particle `π(k)` had.
    pub fn permuted(&self, perm: &[usize]) -> LabeledTensor {
        let mut out = self.clone();
        for i in 0..self.amplitudes.len() {
            let labels = self.labels(i);
            let moved: Vec<usize> = perm.iter().map(|&p| labels[p]).collect();
            out.amplitudes[self.index(&moved)] = self.amplitudes[i];
        }
        out
    }
}

fn labels_of(mut index: usize, dim: usize, n: usize) -> Vec<usize> {
    let mut labels = vec![0; n];
    for k in (0..n).rev() {
        labels[k] = index % dim;
        index /= dim;
    }
    labels
}

/// `σⁿ(v) = (1/n!) Σ_P P v` or `τⁿ(v) = (1/n!) Σ_P s^P P v`.
pub fn symmetrize(v: &LabeledTensor, stats: Statistics) -> LabeledTensor {
    let perms = permutations(v.n);
    let scale = 1.0 / perms.len() as f64;
    let mut out = LabeledTensor {
        n: v.n,
        dim: v.dim,
        amplitudes: vec![Complex64::new(0.0, 0.0); v.amplitudes.len()],
    };
    for (perm, sign) in &perms {
        let w = v.permuted(perm);
        let s = match stats {
            Statistics::Boson => 1.0,
            Statistics::Fermion => *sign,
        };
        for (o, a) in out.amplitudes.iter_mut().zip(&w.amplitudes) {
            *o += a * (s * scale);
        }
    }
    out
}

/// Distance of `v` from its own projection.
pub fn projection_residual(v: &LabeledTensor, stats: Statistics) -> f64 {
    symmetrize(v, stats).sub(v).norm()
}

/// Maps a symmetrized (or antisymmetrized) tensor onto occupation space.
///
/// The orthonormal vectors of the projected subspace are
/// `√(n!/Π n_k!) σ(e_s)` (bosons) and `√(n!) τ(e_s)` (fermions), with `s` the
/// sorted label tuple of an occupation. Each is sent to the matching unit
/// occupation ket, which makes the map an isometry.
pub fn to_occupation(v: &LabeledTensor, stats: Statistics) -> Result<FockVector> {
    let residual = projection_residual(v, stats);
    if residual > SYMMETRIZED_TOL {
        return Err(QSpaceError::NotSymmetrized { residual });
    }
    let space = FockSpace::new(stats, v.dim);
    let n_fact: f64 = (1..=v.n).map(|k| k as f64).product();
    let mut coeffs = Vec::new();
    for i in 0..v.amplitudes.len() {
        let labels = v.labels(i);
        if labels.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let mut dense = vec![0u32; v.dim];
        for &l in &labels {
            dense[l] += 1;
        }
        let state = match OccupationState::from_dense(stats, &dense) {
            Ok(s) => s,
            Err(QSpaceError::PauliViolation { .. }) => continue,
            Err(e) => return Err(e),
        };
        let weight = state.factorial_weight();
        // ⟨unit basis| v⟩ = scale · ⟨e_s | v⟩ since the projector fixes v
        let scale = (n_fact / weight).sqrt();
        coeffs.push((state, v.amplitudes[i] * scale));
    }
    FockVector::from_ket_coefficients(space, coeffs)
}

/// Matrix of `Σ_i T^(i) + Σ_{i<j} V^(i,j)` on the `Mⁿ` labeled space.
///
/// The pair term for particles `i, j` moves `q → k` on `i` and `p → l` on
/// `j` with amplitude `V_klpq`, averaged over the two ways of assigning
/// `(i, j)` so that it is symmetric under exchange.
pub fn first_quantized_h(me: &MatrixElements, n: usize) -> Result<CMatrix> {
    let m = me.modes();
    check_caps(m, n)?;
    let size = m.pow(n as u32);
    let mut h = DMatrix::<Complex64>::zeros(size, size);
    for row in 0..size {
        let a = labels_of(row, m, n);
        for col in 0..size {
            let b = labels_of(col, m, n);
            let mut x = Complex64::new(0.0, 0.0);
            for i in 0..n {
                if (0..n).all(|k| k == i || a[k] == b[k]) {
                    x += me.t(a[i], b[i]);
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    if (0..n).all(|k| k == i || k == j || a[k] == b[k]) {
                        let direct = me.v(a[i], a[j], b[j], b[i]);
                        let swapped = me.v(a[j], a[i], b[i], b[j]);
                        x += (direct + swapped) * 0.5;
                    }
                }
            }
            h[(row, col)] = x;
        }
    }
    Ok(h)
}

/// Dense matrix of `P_π` on the labeled space.
pub fn permutation_matrix(dim: usize, n: usize, perm: &[usize]) -> Result<CMatrix> {
    let size = dim.pow(n as u32);
    let mut p = DMatrix::<Complex64>::zeros(size, size);
    for col in 0..size {
        let e = LabeledTensor::basis(dim, &labels_of(col, dim, n))?;
        let moved = e.permuted(perm);
        for (row, a) in moved.amplitudes.iter().enumerate() {
            p[(row, col)] = *a;
        }
    }
    Ok(p)
}

/// Dense matrix of `σⁿ` or `τⁿ`.
pub fn projector(dim: usize, n: usize, stats: Statistics) -> Result<CMatrix> {
    check_caps(dim, n)?;
    let size = dim.pow(n as u32);
    let mut p = DMatrix::<Complex64>::zeros(size, size);
    for col in 0..size {
        let e = LabeledTensor::basis(dim, &labels_of(col, dim, n))?;
        let s = symmetrize(&e, stats);
        for (row, a) in s.amplitudes.iter().enumerate() {
            p[(row, col)] = *a;
        }
    }
    Ok(p)
}

/// Orthonormal basis (columns) of the projector's range, by Gram-Schmidt over
/// its columns.
pub fn range_basis(projector: &CMatrix) -> CMatrix {
    let mut cols: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for j in 0..projector.ncols() {
        let mut v: nalgebra::DVector<Complex64> = projector.column(j).into();
        for _ in 0..2 {
            for q in &cols {
                let overlap = q.dotc(&v);
                v -= q * overlap;
            }
        }
        let nv = v.norm();
        if nv > ORTHOGONALIZATION_TOL {
            cols.push(v / Complex64::new(nv, 0.0));
        }
    }
    if cols.is_empty() {
        return CMatrix::zeros(projector.nrows(), 0);
    }
    CMatrix::from_columns(&cols)
}

/// `Q† H Q` for `Q` an orthonormal basis of the (anti)symmetric subspace.
pub fn restricted_h(me: &MatrixElements, n: usize, stats: Statistics) -> Result<CMatrix> {
    let h = first_quantized_h(me, n)?;
    let q = range_basis(&projector(me.modes(), n, stats)?);
    Ok(q.adjoint() * h * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::second_quant::spectrum;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn symmetrize_examples() {
        let e12 = LabeledTensor::basis(3, &[1, 2]).unwrap();
        let s = symmetrize(&e12, Statistics::Boson);
        assert_eq!(s.get(&[1, 2]), c(0.5));
        assert_eq!(s.get(&[2, 1]), c(0.5));
        assert_eq!(s.norm(), 0.5f64.sqrt());

        let e11 = LabeledTensor::basis(3, &[1, 1]).unwrap();
        assert_eq!(symmetrize(&e11, Statistics::Fermion).norm(), 0.0);

        let v =
            LabeledTensor::from_amplitudes(3, 1, vec![c(1.0), c(-2.0), Complex64::new(0.0, 3.0)])
                .unwrap();
        assert_eq!(symmetrize(&v, Statistics::Boson), v);
        assert_eq!(symmetrize(&v, Statistics::Fermion), v);
    }

    #[test]
    fn size_caps() {
        assert!(matches!(
            LabeledTensor::zeros(5, 2),
            Err(QSpaceError::SizeCap { .. })
        ));
        assert!(matches!(
            LabeledTensor::zeros(2, 5),
            Err(QSpaceError::SizeCap { .. })
        ));
    }

    #[test]
    fn to_occupation_examples() {
        let e11 = symmetrize(
            &LabeledTensor::basis(3, &[1, 1]).unwrap(),
            Statistics::Boson,
        );
        let v = to_occupation(&e11, Statistics::Boson).unwrap();
        let space = FockSpace::bosonic(3);
        let ket = space.ket(space.state_from_dense(&[0, 2, 0]).unwrap());
        assert!(v.max_abs_diff(&ket).unwrap() < 1e-15);

        let t12 = symmetrize(
            &LabeledTensor::basis(3, &[1, 2]).unwrap(),
            Statistics::Fermion,
        );
        let v = to_occupation(&t12, Statistics::Fermion).unwrap();
        let f = FockSpace::fermionic(3);
        let target = f.ket(f.state_from_dense(&[0, 1, 1]).unwrap());
        // norm of τ(e1⊗e2) is 1/√2; the image keeps that and the + sign
        assert!(v.max_abs_diff(&target.scale(c(0.5f64.sqrt()))).unwrap() < 1e-15);

        let vac = LabeledTensor::from_amplitudes(3, 0, vec![c(1.0)]).unwrap();
        assert_eq!(
            to_occupation(&vac, Statistics::Boson).unwrap(),
            space.vacuum()
        );

        let raw = LabeledTensor::basis(3, &[1, 2]).unwrap();
        assert!(matches!(
            to_occupation(&raw, Statistics::Boson),
            Err(QSpaceError::NotSymmetrized { .. })
        ));
    }

    #[test]
    fn projectors_are_orthogonal_projections() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for (m, n) in [(2, 2), (3, 2), (3, 3), (2, 4)] {
                let p = projector(m, n, stats).unwrap();
                assert!((&p * &p - &p).norm() < 1e-12);
                assert!((p.adjoint() - &p).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn first_quantized_examples() {
        let me = MatrixElements::two_site_hopping(1.0);
        assert!((first_quantized_h(&me, 1).unwrap() - me.one_body()).norm() < 1e-15);

        let h2 = first_quantized_h(&me, 2).unwrap();
        let id = CMatrix::identity(2, 2);
        let t = me.one_body();
        assert!((h2 - (t.kronecker(&id) + id.kronecker(t))).norm() < 1e-15);

        let r = restricted_h(&me, 2, Statistics::Boson).unwrap();
        let s = spectrum(&r).unwrap();
        for (got, want) in s.values.iter().zip([-2.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        let r = restricted_h(&me, 2, Statistics::Fermion).unwrap();
        assert_eq!(r.nrows(), 1);
        assert!(r[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let odd = perms.iter().filter(|(_, s)| *s < 0.0).count();
        assert_eq!(odd, 3);
        assert_eq!(cycle_sign(&[1, 0, 2]), -1.0);
        assert_eq!(cycle_sign(&[1, 2, 0]), 1.0);
    }
}
