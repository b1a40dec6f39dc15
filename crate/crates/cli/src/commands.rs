use serde::Deserialize;
use serde_json::{json, Value};

use csinv::cs_variation::{cs_delta_closed, cs_delta_quadrature, ConnectionPath, DEFAULT_PANELS};
use csinv::repfinder::{
    extract_lift_data, find_representation, ClassTarget, CONVERGENCE_THRESHOLD, DEFAULT_BUDGET,
};
use csinv::seifert::{
    burns_epstein, canonical_lift_data, cs_closed, cs_pipeline, sigma_2_3_11,
    sigma_2_3_11_fixture, validate_rep, CentralAngles, GeneratorAngles, LiftedRepData,
    SeifertPresentation,
};
use csinv::ug21::json::{GElementRepr, MatrixRepr};
use csinv::ug21::{check_u21, classify, eigenvalue_angles, g_multiply, is_reducible, GElement};
use csinv::{Error, ModZ, U21Matrix};

use crate::{exit, CommandOutcome, Options};

/// Largest accepted gap between the closed and quadrature variations.
pub const VARIATION_TOLERANCE: f64 = 1e-8;

fn parse<T: for<'de> Deserialize<'de>>(input: &str) -> Result<T, CommandOutcome> {
    serde_json::from_str(input).map_err(|e| CommandOutcome::malformed(format!("malformed input: {e}")))
}

fn lib<T>(r: csinv::Result<T>) -> Result<T, CommandOutcome> {
    r.map_err(|e| CommandOutcome::from_error(&e))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn run(f: impl FnOnce() -> Result<CommandOutcome, CommandOutcome>) -> CommandOutcome {
    f().unwrap_or_else(|e| e)
}

#[derive(Deserialize)]
struct PresentationInput {
    a: Vec<i64>,
    #[serde(default)]
    b: Option<Vec<i64>>,
}

impl PresentationInput {
    fn build(self) -> csinv::Result<SeifertPresentation> {
        match self.b {
            Some(b) => SeifertPresentation::new(self.a, b),
            None => SeifertPresentation::from_invariants(self.a),
        }
    }
}

#[derive(Deserialize)]
struct CsSeifertInput {
    presentation: PresentationInput,
    #[serde(default)]
    data: Option<LiftedRepData>,
    #[serde(default)]
    generators: Option<Vec<GeneratorAngles>>,
    #[serde(default)]
    central: Option<CentralAngles>,
}

fn cs_fields(cs: &ModZ, pipeline: &ModZ) -> Value {
    json!({
        "cs": cs,
        "burns_epstein": burns_epstein(cs),
        "cs_decimal": cs.to_f64(),
        "pipeline_cs": pipeline,
        "pipeline_agrees": cs == pipeline,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

/// The invariant of one representation from its lift data, or
/// from `G`-angle data via the canonical lift.
pub fn cmd_cs_seifert(input: &str, _opts: &Options) -> CommandOutcome {
    run(|| {
        let inp: CsSeifertInput = parse(input)?;
        let pres = lib(inp.presentation.build())?;
        let data = match (inp.data, inp.generators, inp.central) {
            (Some(d), _, _) => d,
            (None, Some(g), Some(c)) => lib(canonical_lift_data(&pres, &g, &c))?,
            _ => {
                return Err(CommandOutcome::malformed(
                    "input needs either `data` or both `generators` and `central`",
                ))
            }
        };
        let report = lib(validate_rep(&pres, &data))?;
        if !report.passed() {
            let diagnostics = report.failures().map(|c| c.describe()).collect();
            return Ok(CommandOutcome::fail(
                json!({ "presentation": pres, "checks": report.checks }),
                exit::VALIDATION,
                diagnostics,
            ));
        }
        let data = data.with_derived_s(&pres);
        let cs = lib(cs_closed(&pres, &data))?;
        let pipeline = lib(cs_pipeline(&pres, &data))?;
        let agrees = cs == pipeline;
        let payload = merge(json!({ "presentation": pres, "data": data }), cs_fields(&cs, &pipeline));
        Ok(if agrees {
            CommandOutcome::ok(payload)
        } else {
            CommandOutcome::fail(
                payload,
                exit::VALIDATION,
                vec![format!("closed formula {cs} disagrees with the pipeline {pipeline}")],
            )
        })
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyTableOptions {
    /// 1-based case number; all five when absent.
    pub case: Option<usize>,
    pub pipeline_only: bool,
}

/// Runs the built-in `Σ(2,3,11)` cases and compares with the table.
pub fn cmd_verify_table(vt: &VerifyTableOptions, _opts: &Options) -> CommandOutcome {
    run(|| {
        let pres = sigma_2_3_11();
        let fixture = sigma_2_3_11_fixture();
        let cases: Vec<_> = match vt.case {
            Some(k) if (1..=fixture.len()).contains(&k) => vec![fixture[k - 1].clone()],
            Some(k) => {
                return Err(CommandOutcome::malformed(format!(
                    "case {k} is out of range 1..={}",
                    fixture.len()
                )))
            }
            None => fixture,
        };
        let mut rows = Vec::new();
        let mut diagnostics = Vec::new();
        let mut matched = 0;
        for case in &cases {
            let data = lib(case.lift(&pres))?;
            let pipeline = lib(cs_pipeline(&pres, &data))?;
            let closed = if vt.pipeline_only {
                None
            } else {
                Some(lib(cs_closed(&pres, &data))?)
            };
            let ok = pipeline == case.expected && closed.as_ref().is_none_or(|c| *c == case.expected);
            if ok {
                matched += 1;
            } else {
                diagnostics.push(format!(
                    "case {}: expected {}, closed {}, pipeline {pipeline}",
                    case.case,
                    case.expected,
                    closed.as_ref().map_or("-".into(), |c| c.to_string())
                ));
            }
            let mut row = json!({
                "case": case.case,
                "expected": case.expected,
                "cs_pipeline": pipeline,
                "match": ok,
                "generators": case.generators,
                "central": case.central,
                "data": data,
            });
            if let Some(c) = closed {
                row["cs_closed"] = to_value(&c);
            }
            rows.push(row);
        }
        let payload = json!({
            "presentation": pres,
            "pipeline_only": vt.pipeline_only,
            "cases": rows,
            "matched": matched,
            "total": cases.len(),
        });
        Ok(if matched == cases.len() {
            CommandOutcome::ok(payload)
        } else {
            CommandOutcome::fail(payload, exit::VALIDATION, diagnostics)
        })
    })
}

/// Accepts a bare matrix or an object with a `matrix` field.
fn parse_matrix(input: &str) -> Result<csinv::ug21::ComplexMatrix3, CommandOutcome> {
    let v: Value = parse(input)?;
    let inner = match v {
        Value::Object(mut o) if o.contains_key("matrix") => o.remove("matrix").expect("key present"),
        other => other,
    };
    let repr: MatrixRepr = serde_json::from_value(inner)
        .map_err(|e| CommandOutcome::malformed(format!("malformed matrix: {e}")))?;
    let m = lib(repr.to_matrix())?;
    if !csinv::ug21::is_finite(&m) {
        return Err(CommandOutcome::from_error(&Error::NonFinite));
    }
    Ok(m)
}

fn not_in_group(residual: f64, opts: &Options) -> CommandOutcome {
    CommandOutcome::fail(
        json!({ "u21_residual": residual, "in_u21": false, "tol_group": opts.tol.group }),
        exit::VALIDATION,
        vec![format!(
            "matrix is not in U(2,1): residual {residual:e} exceeds {:e}",
            opts.tol.group
        )],
    )
}

/// Isometry type and eigenvalue angles of a `U(2,1)` matrix.
pub fn cmd_classify(input: &str, opts: &Options) -> CommandOutcome {
    run(|| {
        let m = parse_matrix(input)?;
        let residual = check_u21(&m);
        if residual > opts.tol.group {
            return Ok(not_in_group(residual, opts));
        }
        let u = U21Matrix::new_unchecked(m);
        let kind = lib(classify(&u, &opts.tol))?;
        let angles = lib(eigenvalue_angles(&u))?;
        Ok(CommandOutcome::ok(json!({
            "u21_residual": residual,
            "type": kind,
            "eigenvalue_angles": angles,
        })))
    })
}

/// Membership test `‖A^H J A − J‖ ≤ tol_group`.
pub fn cmd_check_u21(input: &str, opts: &Options) -> CommandOutcome {
    run(|| {
        let m = parse_matrix(input)?;
        let residual = check_u21(&m);
        Ok(if residual > opts.tol.group {
            not_in_group(residual, opts)
        } else {
            CommandOutcome::ok(json!({
                "u21_residual": residual,
                "in_u21": true,
                "tol_group": opts.tol.group,
            }))
        })
    })
}

/// Closed-form and quadrature Chern–Simons variation along a path.
pub fn cmd_variation(input: &str, _opts: &Options) -> CommandOutcome {
    run(|| {
        let path: ConnectionPath = parse(input)?;
        let closed = lib(cs_delta_closed(&path))?;
        let quad = lib(cs_delta_quadrature(&path, DEFAULT_PANELS))?;
        let diff = (closed - quad).abs();
        let payload = json!({
            "family": path.family,
            "closed_form": closed,
            "quadrature": quad,
            "abs_difference": diff,
            "panels": DEFAULT_PANELS,
        });
        Ok(if diff <= VARIATION_TOLERANCE {
            CommandOutcome::ok(payload)
        } else {
            CommandOutcome::fail(
                payload,
                exit::VALIDATION,
                vec![format!("quadrature differs from the closed form by {diff:e}")],
            )
        })
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MulInput {
    List(Vec<GElementRepr>),
    Factors { factors: Vec<GElementRepr> },
}

/// Product of `G` elements, left to right.
pub fn cmd_mul(input: &str, opts: &Options) -> CommandOutcome {
    run(|| {
        let factors = match parse::<MulInput>(input)? {
            MulInput::List(v) | MulInput::Factors { factors: v } => v,
        };
        if factors.is_empty() {
            return Err(CommandOutcome::malformed("no factors given"));
        }
        let mut product = GElement::identity();
        for f in &factors {
            let g = lib(f.to_element(&opts.tol))?;
            product = lib(g_multiply(&product, &g))?;
        }
        let (d1, d2) = product.congruence_defects();
        Ok(CommandOutcome::ok(json!({
            "product": product,
            "factors": factors.len(),
            "congruence_defects": [d1, d2],
        })))
    })
}

#[derive(Clone, Copy, Debug)]
pub struct FindRepsOptions {
    pub seed: u64,
    pub budget: usize,
    /// Use the built-in `Σ(2,3,11)` target for this case instead of input.
    pub case: Option<usize>,
}

impl Default for FindRepsOptions {
    fn default() -> Self {
        FindRepsOptions {
            seed: 1,
            budget: DEFAULT_BUDGET,
            case: None,
        }
    }
}

#[derive(Deserialize)]
struct FindRepsInput {
    presentation: PresentationInput,
    target: ClassTarget,
}

/// Numerical search for a representation in the target classes, followed by
/// exact extraction of its lift data and invariant.
pub fn cmd_find_reps(input: Option<&str>, fr: &FindRepsOptions, opts: &Options) -> CommandOutcome {
    run(|| {
        let (pres, target, expected) = match fr.case {
            Some(k) => {
                let fixture = sigma_2_3_11_fixture();
                let case = fixture.get(k.wrapping_sub(1)).ok_or_else(|| {
                    CommandOutcome::malformed(format!("case {k} is out of range 1..={}", fixture.len()))
                })?;
                (sigma_2_3_11(), ClassTarget::from_fixture(case), Some(case.expected.clone()))
            }
            None => {
                let text = input.ok_or_else(|| CommandOutcome::malformed("no input given"))?;
                let inp: FindRepsInput = parse(text)?;
                let pres = lib(inp.presentation.build())?;
                lib(inp.target.validate())?;
                (pres, inp.target, None)
            }
        };
        let base = json!({ "presentation": pres, "target": target, "seed": fr.seed, "budget": fr.budget });
        let res = match find_representation(&pres, &target, fr.seed, fr.budget) {
            Ok(r) => r,
            Err(Error::NoConvergence(best)) => {
                let err = Error::NoConvergence(best.clone());
                return Ok(CommandOutcome::fail(
                    merge(base, json!({ "search": *best })),
                    exit::NO_CONVERGENCE,
                    vec![err.to_string()],
                ));
            }
            Err(e) => return Err(CommandOutcome::from_error(&e)),
        };
        let with_search = |e: Error| {
            let mut o = CommandOutcome::from_error(&e);
            o.payload = merge(base.clone(), json!({ "search": res }));
            o
        };
        let data = extract_lift_data(&pres, &res, &target, &opts.tol).map_err(with_search)?;
        let irreducible = !is_reducible(&res.matrices, &opts.tol).map_err(with_search)?;
        let cs = lib(cs_closed(&pres, &data))?;
        let pipeline = lib(cs_pipeline(&pres, &data))?;
        let mut payload = merge(
            merge(base.clone(), json!({ "search": res, "irreducible": irreducible, "data": data })),
            cs_fields(&cs, &pipeline),
        );
        let mut diagnostics = Vec::new();
        if let Some(e) = &expected {
            payload["expected"] = to_value(e);
            if *e != cs {
                diagnostics.push(format!("extracted invariant {cs} differs from expected {e}"));
            }
        }
        if cs != pipeline {
            diagnostics.push(format!("closed formula {cs} disagrees with the pipeline {pipeline}"));
        }
        debug_assert!(res.residual <= CONVERGENCE_THRESHOLD);
        Ok(if diagnostics.is_empty() {
            CommandOutcome::ok(payload)
        } else {
            CommandOutcome::fail(payload, exit::VALIDATION, diagnostics)
        })
    })
}
