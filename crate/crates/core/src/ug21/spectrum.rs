use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};

use super::{c, j_form, ComplexMatrix3, Tolerances, U21Matrix, C64};
use crate::error::{Error, Result};
use crate::rational::mod_z_real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsometryType {
    Elliptic,
    Parabolic,
    Loxodromic,
}

/// Eigenvalues closer than this (relative to the matrix scale) are treated as
/// one cluster. A Jordan block of size `k` splits its eigenvalue by roughly
/// `ε^{1/k}` in floating point, so the radius must comfortably exceed the
/// cube root of machine precision.
const CLUSTER_RADIUS: f64 = 1e-4;

/// Principal-angle threshold (sine) for deciding that two subspaces meet.
const INTERSECTION_SIN: f64 = 1e-4;

/// Convergence thresholds tried in turn. Near-scalar matrices with rounding
/// noise can stall the QR iteration at the tightest one.
const SCHUR_EPS: [f64; 4] = [1e-15, 1e-13, 1e-11, 1e-9];

pub fn eigenvalues(m: &U21Matrix) -> Result<[C64; 3]> {
    let schur = SCHUR_EPS
        .iter()
        .find_map(|&eps| Schur::try_new(*m.matrix(), eps, 10_000))
        .ok_or_else(|| Error::DegenerateSpectrum("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let ev = [t[(0, 0)], t[(1, 1)], t[(2, 2)]];
    if ev.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::DegenerateSpectrum("non-finite eigenvalue".into()));
    }
    Ok(ev)
}

/// A group of numerically coincident eigenvalues.
#[derive(Clone, Debug)]
struct Cluster {
    mean: C64,
    size: usize,
    spread: f64,
}

fn scale_of(m: &ComplexMatrix3) -> f64 {
    super::max_abs(m).max(1.0)
}

fn clusters(ev: &[C64; 3], scale: f64) -> Vec<Cluster> {
    let radius = CLUSTER_RADIUS * scale;
    // Union-find on three elements is just a label array.
    let mut label = [0usize, 1, 2];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (ev[i] - ev[j]).norm() <= radius {
                let (from, to) = (label[j], label[i]);
                for l in label.iter_mut() {
                    if *l == from {
                        *l = to;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for root in 0..3 {
        let members: Vec<C64> = (0..3).filter(|&k| label[k] == root).map(|k| ev[k]).collect();
        if members.is_empty() {
            continue;
        }
        let mean = members.iter().sum::<C64>() / c(members.len() as f64, 0.0);
        let spread = members.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
        out.push(Cluster {
            mean,
            size: members.len(),
            spread,
        });
    }
    out
}

/// Orthonormal basis (columns) of the numerical null space of `m - μI`.
fn eigenspace(m: &ComplexMatrix3, cl: &Cluster, tol: &Tolerances) -> Result<DMatrix<C64>> {
    let shifted = m - ComplexMatrix3::identity() * cl.mean;
    let svd = SVD::try_new(shifted, false, true, 1e-15, 10_000)
        .ok_or_else(|| Error::DegenerateSpectrum("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("requested");
    let sigma_max = svd_norm(m)?;
    let threshold = (tol.classify * sigma_max).max(10.0 * cl.spread);
    let cols: Vec<DVector<C64>> = (0..3)
        .filter(|&k| svd.singular_values[k] <= threshold)
        .map(|k| DVector::from_iterator(3, v_t.row(k).iter().map(|z| z.conj())))
        .collect();
    Ok(if cols.is_empty() {
        DMatrix::zeros(3, 0)
    } else {
        DMatrix::from_columns(&cols)
    })
}

fn svd_norm(m: &ComplexMatrix3) -> Result<f64> {
    let svd = SVD::try_new(*m, false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::DegenerateSpectrum("SVD did not converge".into()))?;
    Ok(svd.singular_values.max())
}

/// Elliptic iff all eigenvalues lie on the unit circle and `m` is
/// diagonalizable; parabolic iff unit-modulus but defective; otherwise
/// loxodromic.
///
/// Eigenvalue moduli are read off cluster means, which are far better
/// conditioned than individual eigenvalues of a defective matrix.
pub fn classify(m: &U21Matrix, tol: &Tolerances) -> Result<IsometryType> {
    let a = m.matrix();
    let ev = eigenvalues(m)?;
    let cls = clusters(&ev, scale_of(a));
    if cls.iter().any(|cl| (cl.mean.norm() - 1.0).abs() > tol.classify) {
        return Ok(IsometryType::Loxodromic);
    }
    for cl in cls.iter().filter(|cl| cl.size > 1) {
        if eigenspace(a, cl, tol)?.ncols() < cl.size {
            return Ok(IsometryType::Parabolic);
        }
    }
    Ok(IsometryType::Elliptic)
}

/// Eigenvalue angles in turns, each in `[0, 1)`.
pub fn eigenvalue_angles(m: &U21Matrix) -> Result<[f64; 3]> {
    let ev = eigenvalues(m)?;
    Ok(ev.map(|z| mod_z_real(z.arg() / TAU)))
}

fn eigenspaces(m: &ComplexMatrix3, tol: &Tolerances) -> Result<Vec<DMatrix<C64>>> {
    let ev = eigenvalues(&U21Matrix::new_unchecked(*m))?;
    clusters(&ev, scale_of(m))
        .iter()
        .map(|cl| eigenspace(m, cl, tol))
        .filter(|r| r.as_ref().map_or(true, |q| q.ncols() > 0))
        .collect()
}

/// Orthonormal basis of the intersection of two column spaces (both with
/// orthonormal columns), via principal angles.
fn intersect(p: &DMatrix<C64>, q: &DMatrix<C64>) -> DMatrix<C64> {
    if p.ncols() == 0 || q.ncols() == 0 {
        return DMatrix::zeros(3, 0);
    }
    let cross = p.adjoint() * q;
    let svd = SVD::new(cross, true, false);
    let u = svd.u.expect("requested");
    let cos_min = (1.0 - INTERSECTION_SIN * INTERSECTION_SIN).sqrt();
    let cols: Vec<DVector<C64>> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] >= cos_min)
        .map(|k| p * u.column(k))
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(3, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

fn has_common_eigenvector(
    space: &DMatrix<C64>,
    rest: &[ComplexMatrix3],
    tol: &Tolerances,
) -> Result<bool> {
    if space.ncols() == 0 {
        return Ok(false);
    }
    let Some((first, tail)) = rest.split_first() else {
        return Ok(true);
    };
    for e in eigenspaces(first, tol)? {
        if has_common_eigenvector(&intersect(space, &e), tail, tol)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// True iff the matrices share an eigenvector (a common invariant complex
/// line), found by intersecting eigenspaces across the list.
pub fn is_reducible(ms: &[U21Matrix], tol: &Tolerances) -> Result<bool> {
    let mats: Vec<ComplexMatrix3> = ms.iter().map(|m| *m.matrix()).collect();
    let (first, rest) = mats
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("is_reducible needs at least one matrix".into()))?;
    for e in eigenspaces(first, tol)? {
        if has_common_eigenvector(&e, rest, tol)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `m = V · diag(e^{2πi f}) · V^{-1}` with `V ∈ U(2,1)`; the third column of
/// `V` is the negative-type eigenvector.
#[derive(Clone, Debug)]
pub struct EllipticDecomposition {
    pub conjugator: U21Matrix,
    /// Eigenvalue angles in turns, in `[0, 1)`, matching the columns of `V`.
    pub fractions: [f64; 3],
}

pub fn elliptic_decompose(m: &U21Matrix, tol: &Tolerances) -> Result<EllipticDecomposition> {
    let a = m.matrix();
    let ev = eigenvalues(m)?;
    let j = j_form();
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for cl in clusters(&ev, scale_of(a)) {
        if (cl.mean.norm() - 1.0).abs() > tol.classify {
            return Err(Error::DegenerateSpectrum("eigenvalue off the unit circle".into()));
        }
        let q = eigenspace(a, &cl, tol)?;
        if q.ncols() < cl.size {
            return Err(Error::DegenerateSpectrum("matrix is not diagonalizable".into()));
        }
        let j_dyn = DMatrix::from_fn(3, 3, |r, s| j[(r, s)]);
        let form = q.adjoint() * &j_dyn * &q;
        let form = (&form + form.adjoint()) * c(0.5, 0.0);
        let eig = SymmetricEigen::try_new(form, 1e-15, 10_000)
            .ok_or_else(|| Error::DegenerateSpectrum("Hermitian eigensolver failed".into()))?;
        let fraction = mod_z_real(cl.mean.arg() / TAU);
        for k in 0..q.ncols() {
            let h = eig.eigenvalues[k];
            if h.abs() < 1e-6 {
                return Err(Error::DegenerateSpectrum("null eigenvector".into()));
            }
            let v = &q * eig.eigenvectors.column(k) * c(1.0 / h.abs().sqrt(), 0.0);
            if h > 0.0 {
                positive.push((v, fraction));
            } else {
                negative.push((v, fraction));
            }
        }
    }
    if positive.len() != 2 || negative.len() != 1 {
        return Err(Error::DegenerateSpectrum("eigenvectors do not have signature (2,1)".into()));
    }
    let cols: Vec<_> = positive.iter().chain(negative.iter()).collect();
    let v = ComplexMatrix3::from_fn(|r, s| cols[s].0[r]);
    Ok(EllipticDecomposition {
        conjugator: U21Matrix::new_unchecked(v),
        fractions: [cols[0].1, cols[1].1, cols[2].1],
    })
}

#[cfg(test)]
mod tests {
    use super::super::{cis, diag, diag_turns, max_abs, random_u21};
    use super::*;

    fn u(m: ComplexMatrix3) -> U21Matrix {
        U21Matrix::new_unchecked(m)
    }

    fn loxodromic_unit() -> U21Matrix {
        let (ch, sh) = (1f64.cosh(), 1f64.sinh());
        u(ComplexMatrix3::new(
            c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(ch, 0.0), c(sh, 0.0),
            c(0.0, 0.0), c(sh, 0.0), c(ch, 0.0),
        ))
    }

    fn parabolic_case2() -> U21Matrix {
        u(ComplexMatrix3::new(
            c(1.0, -1.0), c(0.0, 0.0), c(0.0, 1.0),
            c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            c(0.0, -1.0), c(0.0, 0.0), c(1.0, 1.0),
        ))
    }

    /// Unipotent with a single Jordan block of size 3.
    fn parabolic_case1() -> U21Matrix {
        let e = ComplexMatrix3::new(
            c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
        );
        let g = ComplexMatrix3::new(
            c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0),
        );
        u(ComplexMatrix3::identity() + e + g * c(0.5, 0.0))
    }

    #[test]
    fn classify_examples() {
        let tol = Tolerances::default();
        let m = u(diag(c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)));
        assert_eq!(classify(&m, &tol).unwrap(), IsometryType::Elliptic);
        assert_eq!(classify(&loxodromic_unit(), &tol).unwrap(), IsometryType::Loxodromic);
        assert_eq!(classify(&parabolic_case2(), &tol).unwrap(), IsometryType::Parabolic);
        assert_eq!(classify(&parabolic_case1(), &tol).unwrap(), IsometryType::Parabolic);
        assert_eq!(classify(&U21Matrix::identity(), &tol).unwrap(), IsometryType::Elliptic);
        let reflection = u(diag(c(1.0, 0.0), c(1.0, 0.0), cis(0.9)));
        assert_eq!(classify(&reflection, &tol).unwrap(), IsometryType::Elliptic);
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        let tol = Tolerances::default();
        let cases = [
            u(diag_turns([0.5, 0.5, 0.0])),
            u(diag_turns([0.1, 0.3, 0.7])),
            loxodromic_unit(),
            parabolic_case1(),
            parabolic_case2(),
        ];
        for m in cases {
            let expected = classify(&m, &tol).unwrap();
            for seed in 0..100 {
                let p = random_u21(seed, 0.8);
                assert_eq!(classify(&m.conjugate_by(&p), &tol).unwrap(), expected);
            }
        }
    }

    #[test]
    fn reducibility_examples() {
        let tol = Tolerances::default();
        let ds = [
            u(diag_turns([0.1, 0.2, 0.3])),
            u(diag_turns([0.5, 0.5, 0.0])),
        ];
        assert!(is_reducible(&ds, &tol).unwrap());
        assert!(is_reducible(&[random_u21(5, 1.0)], &tol).unwrap());
        // A generic pair has no common eigenvector.
        assert!(!is_reducible(&[random_u21(5, 1.0), random_u21(6, 1.0)], &tol).unwrap());
        // Conjugating a reducible pair keeps it reducible.
        let p = random_u21(7, 0.9);
        let conj: Vec<_> = ds.iter().map(|m| m.conjugate_by(&p)).collect();
        assert!(is_reducible(&conj, &tol).unwrap());
    }

    #[test]
    fn decomposition_reconstructs() {
        let tol = Tolerances::default();
        for seed in 0..50 {
            let p = random_u21(100 + seed, 0.9);
            let m = u(diag_turns([0.15, 0.6, 0.85])).conjugate_by(&p);
            let d = elliptic_decompose(&m, &tol).unwrap();
            assert!(d.conjugator.residual() < 1e-9);
            assert!((d.fractions[2] - 0.85).abs() < 1e-9);
            let rebuilt = u(diag_turns(d.fractions)).conjugate_by(&d.conjugator);
            assert!(max_abs(&(rebuilt.into_inner() - m.into_inner())) < 1e-9);
        }
    }

    #[test]
    fn decomposition_with_repeated_eigenvalue() {
        let tol = Tolerances::default();
        let p = random_u21(3, 0.7);
        let m = u(diag_turns([0.5, 0.5, 0.0])).conjugate_by(&p);
        let d = elliptic_decompose(&m, &tol).unwrap();
        assert!((d.fractions[0] - 0.5).abs() < 1e-9);
        assert!((d.fractions[1] - 0.5).abs() < 1e-9);
        assert!(d.fractions[2].min(1.0 - d.fractions[2]) < 1e-9);
        assert!(d.conjugator.residual() < 1e-9);
    }

    #[test]
    fn decomposition_rejects_non_elliptic() {
        let tol = Tolerances::default();
        assert!(elliptic_decompose(&loxodromic_unit(), &tol).is_err());
        assert!(elliptic_decompose(&parabolic_case2(), &tol).is_err());
    }
}
