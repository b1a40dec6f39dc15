//! Lifting conjugacy-class angle data to exact [`LiftedRepData`], a random
//! generator of valid data, and the moves that leave `cs` unchanged.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{LiftedRepData, SeifertPresentation};

/// A generator's class in `G`: `(diag(e^{2πif_1}, e^{2πif_2}, e^{2πif_3}), 2πθ_1, 2πθ_2)`.
/// The fractions are only meaningful mod 1; the `θ` are exact turns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorAngles {
    pub fractions: [Rational; 3],
    pub theta1: Rational,
    pub theta2: Rational,
}

impl GeneratorAngles {
    pub fn new(fractions: [Rational; 3], theta1: Rational, theta2: Rational) -> Self {
        GeneratorAngles {
            fractions,
            theta1,
            theta2,
        }
    }
}

/// The central element `(e^{2πiθ_2} I, 2πθ_1, 2πθ_2)`, in turns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralAngles {
    pub theta1: Rational,
    pub theta2: Rational,
}

fn unliftable(what: String) -> Error {
    Error::Unliftable(what)
}

/// Exact lift data for the given classes.
///
/// `r_i` and `r_0` are read off `θ_2`; `p_i` keeps the given representative of
/// its class and `q_i = θ_1 − p_i − r_i`. The central `p_0` is the
/// representative of `r_0` in `[0, 1)`, and `q_0 = θ_1 − p_0 − r_0`.
pub fn canonical_lift_data(
    pres: &SeifertPresentation,
    generators: &[GeneratorAngles],
    central: &CentralAngles,
) -> Result<LiftedRepData> {
    let n = pres.n();
    if generators.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: generators.len(),
        });
    }
    let r0 = central.theta2.clone();
    let p0 = r0.fract_floor();
    let q0 = &central.theta1 - &p0 - &r0;
    if !q0.congruent_mod_one(&r0) {
        return Err(unliftable(format!(
            "central θ1/2π = {} is not congruent to 3 θ2/2π = {}",
            central.theta1,
            &r0 * 3
        )));
    }
    let mut data = LiftedRepData {
        p0,
        q0,
        r0,
        p: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
    };
    for (i, g) in generators.iter().enumerate() {
        let idx = i + 1;
        let r = g.theta2.clone();
        if !r.congruent_mod_one(&g.fractions[2]) {
            return Err(unliftable(format!(
                "generator {idx}: θ2/2π = {r} is not congruent to the fraction {}",
                g.fractions[2]
            )));
        }
        let p = g.fractions[0].clone();
        let q = &g.theta1 - &p - &r;
        if !q.congruent_mod_one(&g.fractions[1]) {
            return Err(unliftable(format!(
                "generator {idx}: θ1/2π = {} is not congruent to the sum of fractions",
                g.theta1
            )));
        }
        let (a, b) = (pres.a[i], pres.b[i]);
        let s = &p * a + &data.p0 * b;
        if !s.is_integer() {
            return Err(unliftable(format!(
                "generator {idx}: a_ip_i+b_ip_0 = {s} for every representative of p_i"
            )));
        }
        let q_lift = &q * a + &data.q0 * b;
        if q_lift != -&s {
            return Err(unliftable(format!(
                "generator {idx}: a_iq_i+b_iq_0 = {q_lift}, expected {}",
                -&s
            )));
        }
        let r_lift = &r * a + &data.r0 * b;
        if !r_lift.is_zero() {
            return Err(unliftable(format!(
                "generator {idx}: a_ir_i+b_ir_0 = {r_lift}, expected 0"
            )));
        }
        data.p.push(p);
        data.q.push(q);
        data.r.push(r);
        data.s.push(s.numer().clone());
    }
    Ok(data)
}

/// The free integers behind a [`LiftedRepData`]: `r_0`, the integer offsets
/// `p_0 − r_0` and `q_0 − r_0`, and the `s_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepDraw {
    pub r0: Rational,
    pub p_offset: i64,
    pub q_offset: i64,
    pub s: Vec<i64>,
}

/// Sets `p_i`, `q_i`, `r_i` from the constraints; valid by construction.
pub fn rep_from_draw(pres: &SeifertPresentation, draw: &RepDraw) -> LiftedRepData {
    let p0 = &draw.r0 + draw.p_offset;
    let q0 = &draw.r0 + draw.q_offset;
    let r0 = draw.r0.clone();
    let mut data = LiftedRepData {
        p: Vec::new(),
        q: Vec::new(),
        r: Vec::new(),
        s: Vec::new(),
        p0,
        q0,
        r0,
    };
    for (i, &s) in draw.s.iter().enumerate() {
        let a = Rational::from_integer(pres.a[i]);
        let b = pres.b[i];
        data.p.push((Rational::from_integer(s) - &data.p0 * b) / &a);
        data.q.push((Rational::from_integer(-s) - &data.q0 * b) / &a);
        data.r.push(-(&data.r0 * b) / &a);
        data.s.push(BigInt::from(s));
    }
    data
}

/// Seeded random valid data: `r_0 = k + j/d` with `d ≤ 12`, offsets in
/// `[−3, 3]` and `s_i ∈ [−5, 5]`.
pub fn make_random_rep(pres: &SeifertPresentation, seed: u64) -> LiftedRepData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=12i64);
    let r0 = Rational::new(rng.random_range(-3..=3i64) * d + rng.random_range(0..d), d);
    let draw = RepDraw {
        r0,
        p_offset: rng.random_range(-3..=3),
        q_offset: rng.random_range(-3..=3),
        s: (0..pres.n()).map(|_| rng.random_range(-5..=5)).collect(),
    };
    rep_from_draw(pres, &draw)
}

/// `(p_i, q_i, s_i) → (p_i + k, q_i − k, s_i + a_i k)`.
pub fn lift_shift(pres: &SeifertPresentation, data: &LiftedRepData, i: usize, k: i64) -> LiftedRepData {
    let mut out = data.clone().with_derived_s(pres);
    out.p[i] = &out.p[i] + k;
    out.q[i] = &out.q[i] - k;
    if let Some(s) = out.s.get_mut(i) {
        *s += BigInt::from(pres.a[i]) * k;
    }
    out
}

/// `(p, p_0) ↔ (q, q_0)` with every `s_i` negated.
pub fn global_swap(data: &LiftedRepData) -> LiftedRepData {
    LiftedRepData {
        p0: data.q0.clone(),
        q0: data.p0.clone(),
        r0: data.r0.clone(),
        p: data.q.clone(),
        q: data.p.clone(),
        r: data.r.clone(),
        s: data.s.iter().map(|s| -s).collect(),
    }
}

/// `(p_0, q_0) → (p_0 + k, q_0 − k)`, with `p_i`, `q_i` kept and `s_i`
/// recomputed.
pub fn central_shift(pres: &SeifertPresentation, data: &LiftedRepData, k: i64) -> LiftedRepData {
    let mut out = data.clone();
    out.p0 = &out.p0 + k;
    out.q0 = &out.q0 - k;
    out.s.clear();
    out.with_derived_s(pres)
}

#[cfg(test)]
mod tests {
    use super::super::{cs_closed, sigma_2_3_11, validate_rep};
    use super::*;

    #[test]
    fn zero_draw_is_trivial() {
        let pres = sigma_2_3_11();
        let draw = RepDraw {
            r0: Rational::zero(),
            p_offset: 0,
            q_offset: 0,
            s: vec![0; 3],
        };
        assert_eq!(rep_from_draw(&pres, &draw), LiftedRepData::trivial(3));
    }

    #[test]
    fn random_reps_validate_and_repeat() {
        let pres = sigma_2_3_11();
        for seed in 0..100 {
            let d = make_random_rep(&pres, seed);
            assert!(validate_rep(&pres, &d).unwrap().passed(), "seed {seed}");
            assert_eq!(d, make_random_rep(&pres, seed));
        }
        assert_ne!(make_random_rep(&pres, 1), make_random_rep(&pres, 2));
    }

    #[test]
    fn moves_keep_validity_and_invariant() {
        let pres = SeifertPresentation::from_invariants(vec![2, 3, 7]).unwrap();
        for seed in 0..50 {
            let d = make_random_rep(&pres, seed);
            let cs = cs_closed(&pres, &d).unwrap();
            for moved in [
                lift_shift(&pres, &d, (seed % 3) as usize, 2),
                lift_shift(&pres, &d, 0, -1),
                global_swap(&d),
                central_shift(&pres, &d, 3),
            ] {
                assert!(validate_rep(&pres, &moved).unwrap().passed());
                assert_eq!(cs_closed(&pres, &moved).unwrap(), cs);
            }
        }
    }

    #[test]
    fn inconsistent_fraction_is_unliftable() {
        let pres = sigma_2_3_11();
        let z = Rational::zero;
        let gens = vec![
            GeneratorAngles::new([Rational::new(1, 3), Rational::new(2, 3), z()], z(), z()),
            GeneratorAngles::new([z(), z(), z()], z(), z()),
            GeneratorAngles::new([z(), z(), z()], z(), z()),
        ];
        let central = CentralAngles {
            theta1: z(),
            theta2: z(),
        };
        assert!(matches!(
            canonical_lift_data(&pres, &gens, &central),
            Err(Error::Unliftable(_))
        ));
    }
}
