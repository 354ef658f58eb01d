//! Command dispatch: validated spec in, report out.
//!
//! Verdict-bearing outcomes (including negative ones like a failed
//! invariance check or a NONE decomposition) produce a report; operational
//! problems (engine preconditions, unusable inputs) produce a `RunError`
//! carrying the engine's own error text.

use crate::report::Report;
use crate::spec::{
    affine_json, domain_json, group_function_from_indices, Command, ExtendFunction, ProblemSpec,
};
use feqn_core::domains::{
    check_invariance, find_symmetric_subdomain, weighted_image, Domain, InvarianceCertificate,
    ShrinkKind, Violation,
};
use feqn_core::equation::{characterize, homogeneity_field, verify_affine_solution};
use feqn_core::extension::{extend_general_linear, plan_centers, sample_affine_on_cover};
use feqn_core::groups::{
    check_weighted_pexider, enumerate_homomorphisms, solve_pexider_unrestricted, GroupFunction,
};
use feqn_core::rational::{rat, Rational};
use feqn_core::sampling::DEFAULT_SEED;
use serde_json::{Map, Value};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Engine(String),
    #[error("spec is missing `{0}` despite validation; this is a bug")]
    MissingField(&'static str),
}

fn engine<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Engine(e.to_string())
}

pub fn run(spec: &ProblemSpec, seed_override: Option<u64>) -> Result<Report, RunError> {
    let start = Instant::now();
    let seed = seed_override.or(spec.seed).unwrap_or(DEFAULT_SEED);
    let mut report = match spec.command {
        Command::CheckInvariance => run_check_invariance(spec)?,
        Command::Characterize => run_characterize(spec)?,
        Command::Verify => run_verify(spec, seed)?,
        Command::Extend => run_extend(spec)?,
        Command::EnumerateFinite => run_enumerate(spec)?,
        Command::WeightedCheck => run_weighted(spec)?,
        Command::Shrink => run_shrink(spec)?,
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

fn new_report(command: &'static str, verdict: impl Into<String>) -> Report {
    Report {
        command,
        verdict: verdict.into(),
        seed: None,
        body: Map::new(),
        elapsed: std::time::Duration::ZERO,
    }
}

fn rational_str(x: &Rational) -> Value {
    Value::String(x.to_string())
}

fn vector_json(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rational_str).collect())
}

fn tuple_json(points: &[Vec<Rational>]) -> Value {
    Value::Array(points.iter().map(|p| vector_json(p)).collect())
}

fn violation_json(v: &Violation) -> Value {
    serde_json::json!({
        "tuple": tuple_json(&v.tuple),
        "combination": vector_json(&v.combination),
    })
}

fn require<'s, T>(field: Option<&'s T>, name: &'static str) -> Result<&'s T, RunError> {
    field.ok_or(RunError::MissingField(name))
}

fn run_check_invariance(spec: &ProblemSpec) -> Result<Report, RunError> {
    let domain = require(spec.domain.as_ref(), "domain")?;
    let equation = require(spec.equation.as_ref(), "equation")?;
    let check = check_invariance(domain, equation.alphas()).map_err(engine)?;
    let mut report = new_report(
        "check-invariance",
        if check.holds { "true" } else { "false" },
    );
    report.body.insert("domain".into(), domain_json(domain));
    match &check.certificate {
        InvarianceCertificate::ImageIncluded(wi) => {
            report.body.insert("image".into(), domain_json(&wi.image));
            report
                .body
                .insert("positive_sum".into(), rational_str(&wi.positive_sum));
            report
                .body
                .insert("negative_sum".into(), rational_str(&wi.negative_sum));
            report.body.insert(
                "certificate".into(),
                Value::String("weighted image included in the domain".into()),
            );
        }
        InvarianceCertificate::ConePositiveCoefficients => {
            report.body.insert(
                "certificate".into(),
                Value::String(
                    "all coefficients positive on an open convex cone: αK = K + K = K".into(),
                ),
            );
        }
        InvarianceCertificate::ConeWholeSpace => {
            report.body.insert(
                "certificate".into(),
                Value::String("the cone is the whole space".into()),
            );
        }
        InvarianceCertificate::Violated(v) => {
            report.body.insert("witness".into(), violation_json(v));
        }
    }
    Ok(report)
}

fn run_characterize(spec: &ProblemSpec) -> Result<Report, RunError> {
    let equation = require(spec.equation.as_ref(), "equation")?;
    let family = characterize(equation);
    let field = homogeneity_field(equation.alphas()).map_err(engine)?;
    let mut report = new_report("characterize", "characterized");
    report
        .body
        .insert("offset_free".into(), Value::Bool(family.offset_free));
    report.body.insert(
        "linear_part_allowed".into(),
        Value::Bool(family.linear_part_allowed),
    );
    report
        .body
        .insert("beta_sum".into(), rational_str(&family.beta_sum));
    report.body.insert(
        "forced_offset".into(),
        match family.forced_offset() {
            Some(zero) => rational_str(&zero),
            None => Value::Null,
        },
    );
    report.body.insert(
        "homogeneity_constraints".into(),
        Value::Array(
            family
                .homogeneity_constraints
                .iter()
                .map(|(a, b)| Value::Array(vec![rational_str(a), rational_str(b)]))
                .collect(),
        ),
    );
    report.body.insert(
        "field".into(),
        serde_json::json!({
            "name": "Q",
            "generators": family.field_generators.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "derived_factors": field.derived_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "statement": field.statement,
        }),
    );
    report.body.insert(
        "notes".into(),
        Value::Array(
            family
                .notes
                .iter()
                .map(|n| Value::String(n.clone()))
                .collect(),
        ),
    );
    Ok(report)
}

fn run_verify(spec: &ProblemSpec, seed: u64) -> Result<Report, RunError> {
    let domain = require(spec.domain.as_ref(), "domain")?;
    let equation = require(spec.equation.as_ref(), "equation")?;
    let candidate = require(spec.candidate.as_ref(), "candidate")?;
    let trials = spec.trials.unwrap_or(1000);
    let outcome =
        verify_affine_solution(equation, domain, candidate, trials, seed).map_err(engine)?;
    let mut report = new_report("verify", if outcome.passed { "pass" } else { "fail" });
    report.seed = Some(seed);
    report
        .body
        .insert("trials".into(), serde_json::json!(outcome.trials));
    report
        .body
        .insert("candidate".into(), affine_json(candidate));
    if let Some(v) = &outcome.first_violation {
        report.body.insert(
            "first_violation".into(),
            serde_json::json!({
                "trial": v.trial,
                "tuple": tuple_json(&v.tuple),
            }),
        );
        report.body.insert("lhs".into(), vector_json(&v.lhs));
        report.body.insert("rhs".into(), vector_json(&v.rhs));
    }
    Ok(report)
}

fn run_extend(spec: &ProblemSpec) -> Result<Report, RunError> {
    let domain = require(spec.domain.as_ref(), "domain")?;
    let equation = require(spec.equation.as_ref(), "equation")?;
    let function = require(spec.function.as_ref(), "function")?;
    // sampling a closed form and probing the table must use one radius
    let (samples, radius) = match function {
        ExtendFunction::Table(table) => (table.clone(), spec.radius.clone()),
        ExtendFunction::Affine(map) => {
            let radius = spec
                .radius
                .clone()
                .unwrap_or_else(|| default_radius(domain));
            let patches = spec.patches.unwrap_or(4);
            let centers = plan_centers(domain, equation, patches, &radius).map_err(engine)?;
            (
                sample_affine_on_cover(map, equation, &centers, &radius),
                Some(radius),
            )
        }
    };
    let extension = extend_general_linear(equation, domain, &samples, radius).map_err(engine)?;
    let mut report = new_report("extend", "extended");
    report
        .body
        .insert("A".into(), affine_json(&extension.map)["A"].clone());
    report
        .body
        .insert("b".into(), vector_json(extension.map.offset()));
    report
        .body
        .insert("u".into(), vector_json(extension.map.offset()));
    report.body.insert(
        "u_i".into(),
        Value::Array(
            extension
                .piece_offsets
                .iter()
                .map(|u| vector_json(u))
                .collect(),
        ),
    );
    report.body.insert("unique".into(), Value::Bool(true));
    report
        .body
        .insert("components".into(), serde_json::json!(1));
    report
        .body
        .insert("patches".into(), serde_json::json!(extension.patch_count));
    report
        .body
        .insert("samples".into(), serde_json::json!(samples.len()));
    Ok(report)
}

/// Radius for sampling a closed form: an eighth of the narrowest finite
/// side, or 1/8 on fully unbounded domains.
fn default_radius(domain: &Domain) -> Rational {
    let sides = match domain {
        Domain::Interval(iv) => std::slice::from_ref(iv).to_vec(),
        Domain::Box(b) => b.sides().to_vec(),
        Domain::Cone(_) => return feqn_core::rational::ratio(1, 8),
    };
    let mut width: Option<Rational> = None;
    for side in &sides {
        if let (Some(lo), Some(hi)) = (side.lo_finite(), side.hi_finite()) {
            let w = hi - lo;
            width = Some(match width {
                None => w,
                Some(m) => m.min(w),
            });
        }
    }
    match width {
        Some(w) => w / rat(8),
        None => feqn_core::rational::ratio(1, 8),
    }
}

fn run_enumerate(spec: &ProblemSpec) -> Result<Report, RunError> {
    let group = require(spec.group.as_ref(), "group")?;
    let codomain = require(spec.codomain.as_ref(), "codomain")?;
    let homs = enumerate_homomorphisms(group, codomain).map_err(engine)?;
    let mut report = new_report("enumerate-finite", format!("{} homomorphisms", homs.len()));
    report
        .body
        .insert("count".into(), serde_json::json!(homs.len()));
    report.body.insert(
        "domain_group".into(),
        serde_json::json!({"moduli": group.moduli()}),
    );
    report.body.insert(
        "codomain_group".into(),
        serde_json::json!({"moduli": codomain.moduli()}),
    );
    // value tables as codomain element indices, capped for readability
    const LISTING_CAP: usize = 64;
    let listed: Vec<Value> = homs.iter().take(LISTING_CAP).map(hom_table_json).collect();
    report
        .body
        .insert("homomorphisms".into(), Value::Array(listed));
    if homs.len() > LISTING_CAP {
        report.body.insert(
            "listing_truncated_at".into(),
            serde_json::json!(LISTING_CAP),
        );
    }
    Ok(report)
}

fn hom_table_json(h: &GroupFunction) -> Value {
    let codomain = h.codomain();
    Value::Array(
        h.table()
            .iter()
            .map(|v| serde_json::json!(codomain.index_of(v)))
            .collect(),
    )
}

fn run_weighted(spec: &ProblemSpec) -> Result<Report, RunError> {
    let group = require(spec.group.as_ref(), "group")?;
    let codomain = spec.codomain.as_ref().unwrap_or(group);
    let weights = require(spec.weights.as_ref(), "alphas")?;
    let f_table = require(spec.f_table.as_ref(), "f")?;
    let g_tables = require(spec.g_tables.as_ref(), "gs")?;
    let f = group_function_from_indices(group, codomain, f_table, "f").map_err(engine)?;
    let mut gs = Vec::with_capacity(g_tables.len());
    for (i, t) in g_tables.iter().enumerate() {
        gs.push(
            group_function_from_indices(group, codomain, t, &format!("gs[{i}]")).map_err(engine)?,
        );
    }

    let all_ones = weights.iter().all(|&w| w == 1);
    let outcome = check_weighted_pexider(weights, &f, &gs).map_err(engine)?;
    let verdict = match (outcome.equation_holds, &outcome.decomposition) {
        (false, _) => "equation-fails",
        (true, Some(_)) => "decomposed",
        (true, None) => "no-decomposition",
    };
    let mut report = new_report("weighted-check", verdict);
    report
        .body
        .insert("equation_holds".into(), Value::Bool(outcome.equation_holds));
    report.body.insert(
        "candidates_searched".into(),
        serde_json::json!(outcome.candidates_searched),
    );
    if let Some(witness) = &outcome.violation {
        report.body.insert(
            "violation".into(),
            serde_json::json!(witness
                .iter()
                .map(|e| group.index_of(e))
                .collect::<Vec<_>>()),
        );
    }
    match &outcome.decomposition {
        None => {
            report
                .body
                .insert("decomposition".into(), Value::String("NONE".into()));
        }
        Some(d) => {
            let mut dec = Map::new();
            dec.insert("A".into(), hom_table_json(&d.hom));
            dec.insert("y".into(), serde_json::json!(codomain.index_of(&d.offset)));
            if let Some(ys) = &d.g_offsets {
                dec.insert(
                    "y_i".into(),
                    serde_json::json!(ys.iter().map(|y| codomain.index_of(y)).collect::<Vec<_>>()),
                );
            }
            report
                .body
                .insert("decomposition".into(), Value::Object(dec));
        }
    }
    // cross-check against the unweighted solver when the weights reduce to it
    if all_ones {
        let direct = solve_pexider_unrestricted(&f, &gs);
        report.body.insert(
            "unrestricted_agrees".into(),
            Value::Bool(match (&outcome.decomposition, direct) {
                (Some(d), Ok(solved)) => d.hom == solved.hom && d.offset == solved.offset,
                (None, Err(_)) => true,
                _ => false,
            }),
        );
    }
    Ok(report)
}

fn run_shrink(spec: &ProblemSpec) -> Result<Report, RunError> {
    let domain = require(spec.domain.as_ref(), "domain")?;
    let equation = require(spec.equation.as_ref(), "equation")?;
    let Domain::Interval(interval) = domain else {
        return Err(RunError::Engine(
            "the shrink command needs an interval domain".into(),
        ));
    };
    let out = find_symmetric_subdomain(interval, equation.alphas()).map_err(engine)?;
    let mut report = new_report(
        "shrink",
        format!("({}, {})", out.interval.lo(), out.interval.hi()),
    );
    report.body.insert(
        "interval".into(),
        domain_json(&Domain::Interval(out.interval.clone())),
    );
    report.body.insert(
        "kind".into(),
        Value::String(
            match out.kind {
                ShrinkKind::AllPositiveUnchanged => "all-positive-unchanged",
                ShrinkKind::WholeLine => "whole-line",
                ShrinkKind::AlreadySymmetric => "already-symmetric",
                ShrinkKind::Reflected => "reflected",
            }
            .into(),
        ),
    );
    // the absorbing property, recomputed for the report
    let zero = rat(0);
    let abs: Vec<Rational> = equation
        .alphas()
        .iter()
        .map(|a| if *a < zero { -a } else { a.clone() })
        .collect();
    let image = weighted_image(&Domain::Interval(out.interval.clone()), &abs).map_err(engine)?;
    report
        .body
        .insert("abs_image".into(), domain_json(&image.image));
    Ok(report)
}
