//! Numerical reconstruction of representations of a Seifert group with
//! prescribed elliptic conjugacy classes.
//!
//! `x_1` is frozen to its diagonal form and `h` to its scalar, so the
//! unknowns are the conjugators `U_i = exp(X_i)` of `x_i = U_i D_i U_i^{-1}`
//! for `i ≥ 2`. Each restart runs Nelder–Mead on `‖x_1⋯x_n − I‖²` and then
//! a Levenberg–Marquardt polish with a finite-difference Jacobian.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{mod_z_real, Rational};
use crate::seifert::{
    canonical_lift_data, CentralAngles, FixtureCase, GeneratorAngles, LiftedRepData,
    SeifertPresentation,
};
use crate::ug21::{
    cis, diag_turns, elliptic_decompose, eigenvalue_angles, lie_exp, ComplexMatrix3, GElement,
    LieAlgebraElement, Tolerances, U21Matrix, LIE_ALGEBRA_DIM,
};

/// Residual at or below which a search counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-6;
/// Residual at which a restart stops early.
pub const REFINED_TARGET: f64 = 1e-8;
/// Largest distance, in turns, between a computed eigenvalue angle and the
/// target fraction it is snapped to.
pub const SNAP_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_BUDGET: usize = 64;
pub const MAX_NM_EVALUATIONS: usize = 20_000;

const LM_MAX_ITERATIONS: usize = 200;
const FD_STEP: f64 = 1e-7;
const START_SIGMA: f64 = 0.7;
/// Restarts are evaluated in fixed-size batches; the search stops after
/// the first batch that reaches [`REFINED_TARGET`].
const BATCH: usize = 8;

/// The central element's class: `h = e^{2πi f} I` lifted to
/// `(h, 2π(3f + k1), 2π(f + k2))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralTarget {
    pub fraction: Rational,
    #[serde(default)]
    pub k1: i64,
    #[serde(default)]
    pub k2: i64,
}

/// Target eigenvalue angle fractions per generator. The third fraction of
/// each generator belongs to the negative-type eigenvector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTarget {
    pub generators: Vec<[Rational; 3]>,
    pub central: CentralTarget,
}

fn check_fraction(f: &Rational) -> Result<()> {
    if f < &Rational::zero() || f >= &Rational::one() {
        return Err(Error::InvalidArgument(format!("target fraction {f} is not in [0, 1)")));
    }
    Ok(())
}

impl ClassTarget {
    pub fn new(generators: Vec<[Rational; 3]>, central: CentralTarget) -> Result<Self> {
        let t = ClassTarget {
            generators,
            central,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        self.generators.iter().flatten().try_for_each(check_fraction)?;
        check_fraction(&self.central.fraction)
    }

    /// The trivial classes for `n` generators.
    pub fn trivial(n: usize) -> Self {
        ClassTarget {
            generators: vec![std::array::from_fn(|_| Rational::zero()); n],
            central: CentralTarget {
                fraction: Rational::zero(),
                k1: 0,
                k2: 0,
            },
        }
    }

    /// Reduces a fixture's angle data to a target.
    pub fn from_fixture(case: &FixtureCase) -> Self {
        let t2 = &case.central.theta2;
        let fraction = t2.fract_floor();
        let k2 = t2.floor().to_i64().expect("small fixture integer");
        let k1 = (&case.central.theta1 - &fraction * 3).to_i64().unwrap_or(0);
        ClassTarget {
            generators: case
                .generators
                .iter()
                .map(|g| g.fractions.clone().map(|f| f.fract_floor()))
                .collect(),
            central: CentralTarget { fraction, k1, k2 },
        }
    }

    fn check_len(&self, pres: &SeifertPresentation) -> Result<()> {
        if self.generators.len() != pres.n() {
            return Err(Error::LengthMismatch {
                expected: pres.n(),
                got: self.generators.len(),
            });
        }
        Ok(())
    }

    /// The `G`-angles forced by `x_i^{a_i} h^{b_i} = 1`:
    /// `θ_2(x_i) = −b_i θ_2(h)/a_i` and `θ_1(x_i) = −b_i θ_1(h)/a_i`.
    pub fn lift_angles(
        &self,
        pres: &SeifertPresentation,
    ) -> Result<(Vec<GeneratorAngles>, CentralAngles)> {
        self.check_len(pres)?;
        let central = CentralAngles {
            theta1: &self.central.fraction * 3 + self.central.k1,
            theta2: &self.central.fraction + self.central.k2,
        };
        let mut gens = Vec::with_capacity(pres.n());
        for (i, f) in self.generators.iter().enumerate() {
            let (a, b) = (Rational::from_integer(pres.a[i]), pres.b[i]);
            let theta2 = -(&central.theta2 * b) / &a;
            let theta1 = -(&central.theta1 * b) / &a;
            if !theta2.congruent_mod_one(&f[2]) {
                return Err(Error::Unliftable(format!(
                    "generator {}: forced θ2/2π = {theta2} is not congruent to {}",
                    i + 1,
                    f[2]
                )));
            }
            let sum: Rational = f.iter().sum();
            if !theta1.congruent_mod_one(&sum) {
                return Err(Error::Unliftable(format!(
                    "generator {}: forced θ1/2π = {theta1} is not congruent to {sum}",
                    i + 1
                )));
            }
            gens.push(GeneratorAngles::new(f.clone(), theta1, theta2));
        }
        Ok((gens, central))
    }

    /// Exact lift data of the target classes, without any search.
    pub fn lift_data(&self, pres: &SeifertPresentation) -> Result<LiftedRepData> {
        let (gens, central) = self.lift_angles(pres)?;
        canonical_lift_data(pres, &gens, &central)
    }

    fn fractions_f64(&self, i: usize) -> [f64; 3] {
        self.generators[i].clone().map(|f| f.to_f64())
    }

    fn central_scalar(&self) -> f64 {
        self.central.fraction.to_f64()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub matrices: Vec<U21Matrix>,
    pub residual: f64,
    pub seed: u64,
    /// Objective evaluations used by the winning restart.
    pub iterations: usize,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Turn distance on the circle.
fn circle_distance(x: f64, y: f64) -> f64 {
    let d = mod_z_real(x - y);
    d.min(1.0 - d)
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn spectral_penalty(m: &U21Matrix, target: [f64; 3]) -> Result<f64> {
    let angles = eigenvalue_angles(m)?;
    Ok(PERMUTATIONS
        .iter()
        .map(|p| (0..3).map(|k| circle_distance(angles[p[k]], target[k]).powi(2)).sum::<f64>())
        .fold(f64::INFINITY, f64::min))
}

fn frobenius_sq_minus_identity(m: &ComplexMatrix3) -> f64 {
    (m - ComplexMatrix3::identity()).norm_squared()
}

/// `Σ_i ‖x_i^{a_i} h^{b_i} − I‖² + ‖x_1⋯x_n − I‖²` plus, for each generator,
/// the squared turn mismatch of its eigenvalue angles against the target
/// under the best assignment.
pub fn relation_residual(
    pres: &SeifertPresentation,
    ms: &[U21Matrix],
    target: &ClassTarget,
) -> Result<f64> {
    target.check_len(pres)?;
    if ms.len() != pres.n() {
        return Err(Error::LengthMismatch {
            expected: pres.n(),
            got: ms.len(),
        });
    }
    let h = target.central_scalar();
    let mut total = 0.0;
    let mut product = ComplexMatrix3::identity();
    for (i, m) in ms.iter().enumerate() {
        let (a, b) = (pres.a[i], pres.b[i]);
        let power = m.pow(a as u32).into_inner() * cis(TAU * h * b as f64);
        total += frobenius_sq_minus_identity(&power);
        total += spectral_penalty(m, target.fractions_f64(i))?;
        product *= m.matrix();
    }
    Ok(total + frobenius_sq_minus_identity(&product))
}

/// The generator matrices for a parameter vector.
struct Model {
    diagonals: Vec<ComplexMatrix3>,
}

impl Model {
    fn new(target: &ClassTarget) -> Self {
        Model {
            diagonals: (0..target.generators.len())
                .map(|i| diag_turns(target.fractions_f64(i)))
                .collect(),
        }
    }

    fn dim(&self) -> usize {
        LIE_ALGEBRA_DIM * (self.diagonals.len() - 1)
    }

    fn conjugator(params: &[f64], i: usize) -> U21Matrix {
        let v: [f64; LIE_ALGEBRA_DIM] = params[LIE_ALGEBRA_DIM * (i - 1)..LIE_ALGEBRA_DIM * i]
            .try_into()
            .expect("parameter block");
        lie_exp(&LieAlgebraElement::from_coords(&v))
    }

    fn matrices(&self, params: &[f64]) -> Vec<U21Matrix> {
        self.diagonals
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let d = U21Matrix::new_unchecked(*d);
                if i == 0 {
                    d
                } else {
                    d.conjugate_by(&Self::conjugator(params, i))
                }
            })
            .collect()
    }

    /// Real and imaginary parts of `x_1⋯x_n − I`. The power relations and
    /// the spectra hold identically in this parametrization.
    fn residual_vector(&self, params: &[f64]) -> [f64; 18] {
        let mut product = ComplexMatrix3::identity();
        for m in self.matrices(params) {
            product *= m.matrix();
        }
        let d = product - ComplexMatrix3::identity();
        std::array::from_fn(|k| {
            let z = d[((k / 2) / 3, (k / 2) % 3)];
            if k % 2 == 0 {
                z.re
            } else {
                z.im
            }
        })
    }

    fn objective(&self, params: &[f64]) -> f64 {
        self.residual_vector(params).iter().map(|x| x * x).sum()
    }
}

/// Standard Nelder–Mead with dimension-adapted coefficients. Returns the
/// best vertex, its value and the evaluation count.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    f_target: f64,
) -> (Vec<f64>, f64, usize) {
    let d = x0.len();
    let dn = d as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / dn, 0.75 - 0.5 / dn, 1.0 - 1.0 / dn);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for k in 0..d {
        let mut x = x0.to_vec();
        x[k] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut evals = d + 1;
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (ci - wi)).collect()
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[d].1);
        if best <= f_target || worst - best <= 1e-15 * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dn;
            }
        }
        let xr = along(&centroid, &simplex[d].0, alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(&centroid, &simplex[d].0, gamma);
            let fe = f(&xe);
            evals += 1;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let xc = along(&centroid, &simplex[d].0, rho * alpha);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(&centroid, &simplex[d].0, -rho);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < fr.min(simplex[d].1) {
                simplex[d] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, fx) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *fx = f(x);
                }
                evals += d;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, evals)
}

/// Levenberg–Marquardt on the residual vector with a central-difference
/// Jacobian. Returns the final point, objective and evaluation count.
fn levenberg_marquardt(model: &Model, x0: Vec<f64>) -> (Vec<f64>, f64, usize) {
    let d = x0.len();
    let mut x = x0;
    let mut r = DVector::from_row_slice(&model.residual_vector(&x));
    let mut fx = r.norm_squared();
    let mut evals = 1;
    let mut lambda = 1e-3;
    for _ in 0..LM_MAX_ITERATIONS {
        if fx <= 1e-28 {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), d);
        for k in 0..d {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += FD_STEP;
            xm[k] -= FD_STEP;
            let rp = model.residual_vector(&xp);
            let rm = model.residual_vector(&xm);
            for row in 0..r.len() {
                jac[(row, k)] = (rp[row] - rm[row]) / (2.0 * FD_STEP);
            }
        }
        evals += 2 * d;
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for k in 0..d {
                a[(k, k)] += lambda * (jtj[(k, k)] + 1e-12);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&jtr));
            let xn: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let rn = DVector::from_row_slice(&model.residual_vector(&xn));
            evals += 1;
            let fn_ = rn.norm_squared();
            if fn_ < fx {
                let small_step = delta.norm() <= 1e-15 * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt());
                x = xn;
                r = rn;
                fx = fn_;
                lambda = (lambda / 10.0).max(1e-15);
                improved = !small_step;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (x, fx, evals)
}

struct RestartOutcome {
    index: usize,
    params: Vec<f64>,
    objective: f64,
    evals: usize,
}

fn run_restart(model: &Model, seed: u64, index: usize) -> RestartOutcome {
    let dim = model.dim();
    let start: Vec<f64> = if index == 0 {
        vec![0.0; dim]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let normal = Normal::new(0.0, START_SIGMA).expect("valid sigma");
        (0..dim).map(|_| normal.sample(&mut rng)).collect()
    };
    let f = |p: &[f64]| model.objective(p);
    let (x, fx, nm_evals) = if f(&start) <= 1e-28 {
        (start, 0.0, 1)
    } else {
        nelder_mead(&f, &start, 0.5, MAX_NM_EVALUATIONS, 1e-6)
    };
    let (params, objective, lm_evals) = if fx <= 1e-28 {
        (x, fx, 0)
    } else {
        levenberg_marquardt(model, x)
    };
    RestartOutcome {
        index,
        params,
        objective,
        evals: nm_evals + lm_evals,
    }
}

/// Multi-start search for matrices in the target classes satisfying the
/// relations. Deterministic in `(seed, budget)`; restart 0 starts from the
/// all-diagonal configuration.
pub fn find_representation(
    pres: &SeifertPresentation,
    target: &ClassTarget,
    seed: u64,
    budget: usize,
) -> Result<SearchResult> {
    pres.validate()?;
    target.validate()?;
    target.lift_data(pres)?;
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let model = Model::new(target);
    let mut best: Option<RestartOutcome> = None;
    let mut first = 0;
    while first < budget {
        let last = (first + BATCH).min(budget);
        let batch: Vec<RestartOutcome> = (first..last)
            .into_par_iter()
            .map(|index| run_restart(&model, seed, index))
            .collect();
        for outcome in batch {
            let better = best.as_ref().is_none_or(|b| {
                outcome.objective < b.objective
                    || (outcome.objective == b.objective && outcome.index < b.index)
            });
            if better {
                best = Some(outcome);
            }
        }
        let done = best.as_ref().is_some_and(|b| b.objective <= REFINED_TARGET * 1e-4);
        first = last;
        if done {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let matrices = model.matrices(&best.params);
    let residual = relation_residual(pres, &matrices, target)?;
    let result = SearchResult {
        matrices,
        residual,
        seed,
        iterations: best.evals,
        restart: best.index,
    };
    if result.residual > CONVERGENCE_THRESHOLD {
        return Err(Error::NoConvergence(Box::new(result)));
    }
    Ok(result)
}

/// Snaps computed angles to the target's fractions. The negative-type angle
/// must match the third fraction; the positive pair may match the first two
/// in either order. Returns the target index for each computed slot.
fn snap_slots(angles: [f64; 3], target: &[f64; 3]) -> Result<[usize; 3]> {
    let fail = |angle: f64| {
        let distance = target
            .iter()
            .map(|&t| circle_distance(angle, t))
            .fold(f64::INFINITY, f64::min);
        Error::SnapFailure { angle, distance }
    };
    for &a in &angles {
        if target.iter().all(|&t| circle_distance(a, t) > SNAP_TOLERANCE) {
            return Err(fail(a));
        }
    }
    if circle_distance(angles[2], target[2]) > SNAP_TOLERANCE {
        return Err(fail(angles[2]));
    }
    let worst = |order: [usize; 2]| {
        circle_distance(angles[0], target[order[0]]).max(circle_distance(angles[1], target[order[1]]))
    };
    let (straight, swapped) = (worst([0, 1]), worst([1, 0]));
    let order = if straight <= swapped { [0, 1] } else { [1, 0] };
    if straight.min(swapped) > SNAP_TOLERANCE {
        let bad = if circle_distance(angles[0], target[order[0]]) > SNAP_TOLERANCE {
            angles[0]
        } else {
            angles[1]
        };
        return Err(fail(bad));
    }
    Ok([order[0], order[1], 2])
}

fn lift_mismatch(e: Error) -> Error {
    Error::LiftMismatch(e.to_string())
}

/// Exact lift data read back from found matrices: eigenvalue angles are
/// snapped to the target fractions, and the `G`-lifts implied by the target
/// are checked to multiply to the identity before [`canonical_lift_data`]
/// is applied.
pub fn extract_lift_data(
    pres: &SeifertPresentation,
    res: &SearchResult,
    target: &ClassTarget,
    tol: &Tolerances,
) -> Result<LiftedRepData> {
    if res.residual > CONVERGENCE_THRESHOLD {
        return Err(Error::NoConvergence(Box::new(res.clone())));
    }
    if res.matrices.len() != pres.n() {
        return Err(Error::LengthMismatch {
            expected: pres.n(),
            got: res.matrices.len(),
        });
    }
    let (gens, central) = target.lift_angles(pres)?;
    let mut product = GElement::identity();
    for (i, m) in res.matrices.iter().enumerate() {
        let dec = elliptic_decompose(m, tol)?;
        let t = target.fractions_f64(i);
        let slots = snap_slots(dec.fractions, &t)?;
        let diag = diag_turns(slots.map(|k| t[k]));
        let exact = GElement::new_unchecked(
            U21Matrix::new_unchecked(diag),
            TAU * gens[i].theta1.to_f64(),
            TAU * gens[i].theta2.to_f64(),
        );
        let conj = crate::ug21::lift_to_g(&dec.conjugator, 0, 0);
        let g = exact.conjugate_by(&conj).map_err(lift_mismatch)?;
        product = product.mul(&g).map_err(lift_mismatch)?;
    }
    let dist = product.distance(&GElement::identity());
    if dist > 1e-6 {
        return Err(Error::LiftMismatch(format!(
            "product of lifted generators is {dist:e} from the identity in G"
        )));
    }
    canonical_lift_data(pres, &gens, &central)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seifert::{cs_closed, sigma_2_3_11, sigma_2_3_11_fixture};
    use crate::ug21::{is_reducible, random_u21};

    #[test]
    fn trivial_target_solves_at_diagonal_start() {
        let pres = sigma_2_3_11();
        let target = ClassTarget::trivial(3);
        let res = find_representation(&pres, &target, 0, 1).unwrap();
        assert!(res.residual <= 1e-12);
        assert_eq!(res.restart, 0);
        let d = extract_lift_data(&pres, &res, &target, &Tolerances::default()).unwrap();
        assert_eq!(d, LiftedRepData::trivial(3).with_derived_s(&pres));
    }

    #[test]
    fn random_start_has_positive_residual() {
        let pres = sigma_2_3_11();
        let target = ClassTarget::from_fixture(&sigma_2_3_11_fixture()[4]);
        let model = Model::new(&target);
        let ms = model.matrices(&[0.3; 18]);
        assert!(relation_residual(&pres, &ms, &target).unwrap() > 1e-3);
    }

    #[test]
    fn fixture_targets_lift_to_table_values() {
        let pres = sigma_2_3_11();
        for case in sigma_2_3_11_fixture() {
            let target = ClassTarget::from_fixture(&case);
            let d = target.lift_data(&pres).unwrap();
            assert_eq!(cs_closed(&pres, &d).unwrap(), case.expected);
        }
    }

    #[test]
    fn case_five_reconstruction() {
        let pres = sigma_2_3_11();
        let case = &sigma_2_3_11_fixture()[4];
        let target = ClassTarget::from_fixture(case);
        let tol = Tolerances::default();
        let res = find_representation(&pres, &target, 1, 16).unwrap();
        assert!(res.residual <= REFINED_TARGET, "{}", res.residual);
        let again = relation_residual(&pres, &res.matrices, &target).unwrap();
        assert!((again - res.residual).abs() <= 1e-12);
        assert!(!is_reducible(&res.matrices, &tol).unwrap());
        let d = extract_lift_data(&pres, &res, &target, &tol).unwrap();
        assert_eq!(cs_closed(&pres, &d).unwrap(), case.expected);

        let p = random_u21(5, 0.5);
        let conj: Vec<_> = res.matrices.iter().map(|m| m.conjugate_by(&p)).collect();
        let r2 = relation_residual(&pres, &conj, &target).unwrap();
        assert!((r2 - res.residual).abs() <= 1e-9);
        let d2 = extract_lift_data(&pres, &SearchResult { matrices: conj, residual: r2, ..res.clone() }, &target, &tol).unwrap();
        assert_eq!(d2, d);

        let repeat = find_representation(&pres, &target, 1, 16).unwrap();
        assert_eq!(repeat.residual, res.residual);
        assert_eq!(repeat.matrices, res.matrices);
    }

    #[test]
    fn snapping() {
        let t = [0.5, 1.0 / 3.0, 0.0];
        assert_eq!(snap_slots([1.0 / 3.0 + 1e-6, 0.5, 1.0 - 1e-7], &t).unwrap(), [1, 0, 2]);
        assert!(matches!(snap_slots([0.25, 0.5, 0.0], &t), Err(Error::SnapFailure { .. })));
        assert!(matches!(snap_slots([0.0, 0.5, 1.0 / 3.0], &t), Err(Error::SnapFailure { .. })));
    }

    #[test]
    fn infeasible_target_is_unliftable() {
        let pres = sigma_2_3_11();
        let z = Rational::zero;
        let target = ClassTarget::new(
            vec![[Rational::new(1, 3), Rational::new(2, 3), z()], [z(), z(), z()], [z(), z(), z()]],
            CentralTarget { fraction: z(), k1: 0, k2: 0 },
        )
        .unwrap();
        assert!(matches!(find_representation(&pres, &target, 0, 4), Err(Error::Unliftable(_))));
    }

    #[test]
    fn target_json_shape() {
        let target = ClassTarget::from_fixture(&sigma_2_3_11_fixture()[2]);
        let v = serde_json::to_value(&target).unwrap();
        assert_eq!(v["generators"][0][0], "1/2");
        assert_eq!(v["central"]["k2"], 2);
        let back: ClassTarget = serde_json::from_value(v).unwrap();
        assert_eq!(back, target);
    }
}
