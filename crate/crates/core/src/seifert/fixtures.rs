//! The five irreducible classes of `Σ(2,3,11)` with their invariants.

use serde::Serialize;

use crate::error::Result;
use crate::rational::{mod_z, ModZ, Rational};

use super::{canonical_lift_data, CentralAngles, GeneratorAngles, LiftedRepData, SeifertPresentation};

/// `x_1^2 h^{-1} = x_2^3 h = x_3^{11} h^2 = x_1 x_2 x_3 = 1`.
pub fn sigma_2_3_11() -> SeifertPresentation {
    SeifertPresentation {
        a: vec![2, 3, 11],
        b: vec![-1, 1, 2],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureCase {
    /// 1-based case number.
    pub case: usize,
    pub generators: Vec<GeneratorAngles>,
    pub central: CentralAngles,
    pub expected: ModZ,
}

impl FixtureCase {
    pub fn lift(&self, pres: &SeifertPresentation) -> Result<LiftedRepData> {
        canonical_lift_data(pres, &self.generators, &self.central)
    }
}

fn q(s: &str) -> Rational {
    s.parse().expect("fixture literal")
}

fn generator(f: [&str; 3], theta2: &str) -> GeneratorAngles {
    GeneratorAngles::new(f.map(q), Rational::zero(), q(theta2))
}

/// The five classes in order, with expected values 13/66, 13/66, 7/66, 7/66, 25/66.
pub fn sigma_2_3_11_fixture() -> Vec<FixtureCase> {
    // (fractions per generator, θ2/2π per generator, central θ2/2π, value)
    type Row = ([[&'static str; 3]; 3], [&'static str; 3], &'static str, &'static str);
    let rows: [Row; 5] = [
        (
            [["0", "1/2", "1/2"], ["0", "2/3", "1/3"], ["6/11", "3/11", "2/11"]],
            ["-1/2", "1/3", "2/11"],
            "-1",
            "13/66",
        ),
        (
            [["0", "1/2", "1/2"], ["1/3", "0", "2/3"], ["-6/11", "-3/11", "-2/11"]],
            ["1/2", "-1/3", "-2/11"],
            "1",
            "13/66",
        ),
        (
            [["1/2", "1/2", "0"], ["0", "2/3", "1/3"], ["-2/11", "-5/11", "-4/11"]],
            ["1", "-2/3", "-4/11"],
            "2",
            "7/66",
        ),
        (
            [["1/2", "1/2", "0"], ["1/3", "0", "2/3"], ["2/11", "5/11", "4/11"]],
            ["-1", "2/3", "4/11"],
            "-2",
            "7/66",
        ),
        (
            [["1/2", "1/2", "0"], ["1/3", "2/3", "0"], ["-1/11", "1/11", "0"]],
            ["0", "0", "0"],
            "0",
            "25/66",
        ),
    ];
    rows.iter()
        .enumerate()
        .map(|(i, (fracs, t2, h2, expected))| FixtureCase {
            case: i + 1,
            generators: (0..3).map(|k| generator(fracs[k], t2[k])).collect(),
            central: CentralAngles {
                theta1: Rational::zero(),
                theta2: q(h2),
            },
            expected: mod_z(&q(expected)),
        })
        .collect()
}
