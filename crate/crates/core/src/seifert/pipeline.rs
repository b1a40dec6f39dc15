//! The cut-and-paste computation `Σ = X ∪ (−S)`, with `X` the complement of
//! a neighbourhood `S` of the last exceptional fibre.
//!
//! On `∂X` the flat connection is an elliptic normal form whose meridian and
//! longitude angles are
//!
//! ```text
//! α = a_n P + b_n P_0,   β = −a' P + c P_0,   a' = a_1⋯a_{n−1},  c = a' Σ_{i<n} b_i/a_i
//! ```
//!
//! where `P = (p_n, q_n, r_n)` at the start of the path and `P = −Σ_{i<n} P_i`
//! at its end. The endpoint has `β = (N, −N, 0)`, which a gauge transformation
//! removes, and the connection with `β = 0` extends flatly over `X` with zero
//! invariant. The same steps on the solid torus give `cs(B_0)`.

use serde::Serialize;

use crate::cs_variation::elliptic_linear_variation_exact;
use crate::error::{Error, Result};
use crate::rational::{mod_z, ModZ, Rational};

use super::{validate_rep, LiftedRepData, SeifertPresentation};

/// Every intermediate quantity of the computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PipelineTrace {
    pub a_prime: Rational,
    pub c: Rational,
    pub alpha_start: [Rational; 3],
    pub beta_start: [Rational; 3],
    pub alpha_end: [Rational; 3],
    pub beta_end: [Rational; 3],
    /// `N = a' Σ_{i<n} s_i/a_i`.
    pub winding: Rational,
    /// `cs(A_1) − cs(A_0)` along the linear path.
    pub variation: Rational,
    pub cs_a_end: Rational,
    pub cs_a_start: Rational,
    /// `−½a(Σ_{i<n} s_i/a_i)(−Σp + Σq + 2s_n/a_n) − ½(p_0Σp + q_0Σq + r_0Σr)`.
    pub cs_a_formula: Rational,
    pub cs_b: Rational,
    /// `½a(s_n/a_n)(−Σp + Σq + 2Σ_{i<n} s_i/a_i)`.
    pub cs_b_formula: Rational,
    pub cs: ModZ,
}

fn triple(f: impl Fn(usize) -> Rational) -> [Rational; 3] {
    std::array::from_fn(f)
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidRepData {
            constraint: format!("pipeline identity {what}"),
        })
    }
}

/// Runs the decomposition and returns all intermediate values. Each step's
/// consistency with its closed form is checked exactly.
pub fn pipeline_trace(pres: &SeifertPresentation, data: &LiftedRepData) -> Result<PipelineTrace> {
    validate_rep(pres, data)?.into_result()?;
    let data = data.clone().with_derived_s(pres);
    let n = pres.n();
    let last = n - 1;
    let half = Rational::new(1, 2);
    let order = pres.order();
    let a_prime: Rational = pres.a[..last]
        .iter()
        .map(|&x| Rational::from_integer(x))
        .fold(Rational::one(), |acc, x| acc * x);
    let c: Rational = pres.a[..last]
        .iter()
        .zip(&pres.b)
        .map(|(&ai, &bi)| Rational::new(bi, ai))
        .sum::<Rational>()
        * &a_prime;
    let a_n = Rational::from_integer(pres.a[last]);
    let b_n = Rational::from_integer(pres.b[last]);

    let comp = |k: usize| -> &Vec<Rational> {
        match k {
            0 => &data.p,
            1 => &data.q,
            _ => &data.r,
        }
    };
    let central = [&data.p0, &data.q0, &data.r0];
    let start = triple(|k| comp(k)[last].clone());
    let end = triple(|k| -comp(k)[..last].iter().sum::<Rational>());
    let alpha = |p: &[Rational; 3]| triple(|k| &a_n * &p[k] + &b_n * central[k]);
    let beta = |p: &[Rational; 3]| triple(|k| -(&a_prime * &p[k]) + &c * central[k]);
    let (alpha_start, beta_start) = (alpha(&start), beta(&start));
    let (alpha_end, beta_end) = (alpha(&end), beta(&end));

    let s: Vec<Rational> = data.s.iter().cloned().map(Rational::from_bigint).collect();
    let s_over_a_head: Rational = s[..last]
        .iter()
        .zip(&pres.a)
        .map(|(s, &ai)| s / Rational::from_integer(ai))
        .sum();
    let s_n = &s[last];
    let winding = &a_prime * &s_over_a_head;
    check(
        winding.is_integer()
            && beta_end == [winding.clone(), -&winding, Rational::zero()],
        "beta(A_1) = (N, -N, 0)",
    )?;
    check(
        alpha_start == [s_n.clone(), -s_n, Rational::zero()],
        "alpha(B_0) = (s_n, -s_n, 0)",
    )?;

    let variation = elliptic_linear_variation_exact(
        (&alpha_start, &beta_start),
        (&alpha_end, &beta_end),
    );
    // Removing the longitude winding leaves a connection extending over X.
    let cs_a_end = -(&winding * (&alpha_end[0] - &alpha_end[1]) * &half);
    let cs_a_start = &cs_a_end - &variation;

    let (sp, sq, sr) = (data.sum_p(), data.sum_q(), data.sum_r());
    let cs_a_formula = -(&half
        * &order
        * &s_over_a_head
        * (-&sp + &sq + s_n * Rational::from_integer(2) / &a_n))
        - &half * (&data.p0 * &sp + &data.q0 * &sq + &data.r0 * &sr);
    check(
        cs_a_start.congruent_mod_one(&cs_a_formula),
        "cs(A_0) closed form",
    )?;

    // On the solid torus the meridian winding s_n is removed instead.
    let cs_b = s_n * (&beta_start[0] - &beta_start[1]) * &half;
    let cs_b_formula =
        &half * &order * (s_n / &a_n) * (-&sp + &sq + &s_over_a_head * Rational::from_integer(2));
    check(cs_b.congruent_mod_one(&cs_b_formula), "cs(B_0) closed form")?;

    let cs = mod_z(&(&cs_a_start - &cs_b));
    Ok(PipelineTrace {
        a_prime,
        c,
        alpha_start,
        beta_start,
        alpha_end,
        beta_end,
        winding,
        variation,
        cs_a_end,
        cs_a_start,
        cs_a_formula,
        cs_b,
        cs_b_formula,
        cs,
    })
}

/// `cs(A_0) − cs(B_0)` reduced to `[0, 1)`.
pub fn cs_pipeline(pres: &SeifertPresentation, data: &LiftedRepData) -> Result<ModZ> {
    Ok(pipeline_trace(pres, data)?.cs)
}

#[cfg(test)]
mod tests {
    use super::super::{cs_closed, make_random_rep, sigma_2_3_11, sigma_2_3_11_fixture};
    use super::*;

    #[test]
    fn trivial_data() {
        let pres = sigma_2_3_11();
        assert_eq!(cs_pipeline(&pres, &LiftedRepData::trivial(3)).unwrap(), ModZ::zero());
    }

    #[test]
    fn fixtures_agree() {
        let pres = sigma_2_3_11();
        for case in sigma_2_3_11_fixture() {
            let data = case.lift(&pres).unwrap();
            assert_eq!(cs_pipeline(&pres, &data).unwrap(), case.expected, "case {}", case.case);
        }
    }

    #[test]
    fn random_data_agrees_with_closed_formula() {
        for a in [vec![2, 3, 5], vec![2, 3, 11], vec![3, 4, 5, 7]] {
            let pres = SeifertPresentation::from_invariants(a).unwrap();
            for seed in 0..100 {
                let data = make_random_rep(&pres, seed);
                assert_eq!(
                    cs_pipeline(&pres, &data).unwrap(),
                    cs_closed(&pres, &data).unwrap(),
                    "{:?} seed {seed}",
                    pres.a
                );
            }
        }
    }

    #[test]
    fn invalid_data_is_rejected() {
        let pres = sigma_2_3_11();
        let mut d = LiftedRepData::trivial(3);
        d.p[0] = Rational::new(1, 3);
        assert!(matches!(cs_pipeline(&pres, &d), Err(Error::InvalidRepData { .. })));
    }
}
