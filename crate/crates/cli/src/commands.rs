use serde_json::{json, Value};

use conemetric::cones::archimedean_spot_check;
use conemetric::fixedpoint::{
    banach_iterate_with, estimate_contraction, ContractionProblem, ProblemSpec,
};
use conemetric::io::{self, CheckConeInput, NormInput, TopologyInput};
use conemetric::metric::{ball_identity, ball_inclusion, basis_check, scalarize_with, ConeMetric};
use conemetric::ordernorm::compare_norms;
use conemetric::report::{CheckReport, Violation};
use conemetric::sequences::{SequenceSpec, DEFAULT_EPS_LADDER};
use conemetric::suite::{run_suite, SuiteConfig};
use conemetric::{OrderUnitSpace, Result};

use crate::{Config, Outcome};

type Input<'a> = (&'a str, &'a str);

const DEFAULT_ARCHIMEDEAN_SAMPLES: usize = 1000;
const ARCHIMEDEAN_N_MAX: u32 = 1000;
const DEFAULT_BASIS_TRIALS: usize = 200;

fn violation(check: &str, v: &Violation) -> Value {
    json!({ "check": check, "kind": v.kind, "witness": v.witness, "detail": v.detail })
}

fn push_report(out: &mut Outcome, report: &CheckReport) {
    out.violations.extend(
        report
            .violations
            .iter()
            .map(|v| violation(&report.check, v)),
    );
    out.results.push(json!(report));
}

pub fn check_cone(cfg: &Config, (text, origin): Input) -> Result<Outcome> {
    let input: CheckConeInput = io::parse_json(text, origin)?;
    let cone = &input.cone;
    let tol = cfg.membership;
    let mut out = Outcome::default();
    out.results.push(json!({
        "check": "cone",
        "label": cone.label(),
        "family": cone.kind(),
        "ambient_dim": cone.ambient_dim(),
        "canonical_unit": cone.canonical_unit(),
    }));
    if let Some(e) = &input.e {
        let slack = cone.slack(e)?;
        let interior = cone.interior_contains(e, tol)?;
        let unit = cone.is_order_unit(e, tol)?;
        let dominates = cone.dominates_every_direction(e)?;
        let in_band = (slack - tol).abs() <= cfg.boundary_band;
        out.results.push(json!({
            "check": "order_unit",
            "e": e,
            "slack": slack,
            "interior": interior,
            "is_order_unit": unit,
            "dominates_every_direction": dominates,
            "boundary_excluded": in_band,
        }));
        if !in_band && !(interior == unit && unit == dominates) {
            out.violations.push(json!({
                "check": "order_unit",
                "kind": "unit_routes",
                "witness": [e],
                "detail": format!("interior {interior}, is_order_unit {unit}, domination {dominates}"),
            }));
        }
    }
    for (i, p) in input.points.iter().enumerate() {
        out.results.push(json!({
            "check": "membership",
            "index": i,
            "point": p,
            "slack": cone.slack(p)?,
            "contains": cone.contains(p, tol)?,
            "interior": cone.interior_contains(p, tol)?,
        }));
    }
    let samples = cfg.trials.unwrap_or(DEFAULT_ARCHIMEDEAN_SAMPLES);
    let arch = archimedean_spot_check(cone, samples, ARCHIMEDEAN_N_MAX, cfg.seed);
    out.results.push(json!({
        "check": "archimedean",
        "samples": arch.samples,
        "n_max": arch.n_max,
        "dominated": arch.dominated,
        "violations": arch.violations.len(),
    }));
    for v in &arch.violations {
        out.violations.push(json!({
            "check": "archimedean",
            "kind": "archimedean",
            "witness": [format!("sample {}", v.sample)],
            "detail": json!(v),
        }));
    }
    Ok(out)
}

pub fn norm(cfg: &Config, (text, origin): Input) -> Result<Outcome> {
    let input: NormInput = io::parse_json(text, origin)?;
    let e = input.e.unwrap_or_else(|| input.cone.canonical_unit());
    let space = OrderUnitSpace::new(input.cone, e, cfg.membership)?;
    let cmp = compare_norms(&space, &input.x, cfg.gauge_rel)?;
    let mut out = Outcome::default();
    if !cmp.agree {
        out.violations.push(json!({
            "check": "norm",
            "kind": "norm_agreement",
            "witness": [input.x],
            "detail": format!("gauge {:e}, dual {:e}", cmp.gauge, cmp.dual),
        }));
    }
    out.results.push(json!(cmp));
    Ok(out)
}

fn load_metric(cfg: &Config, m: &ConeMetric) -> Result<ConeMetric> {
    io::metric_with_membership_tol(m, cfg.membership)
}

pub fn verify_metric(cfg: &Config, (text, origin): Input) -> Result<Outcome> {
    let m: ConeMetric = io::parse_json(text, origin)?;
    let m = load_metric(cfg, &m)?;
    let mut out = Outcome::default();
    let report = m.verify_axioms(cfg.membership);
    push_report(&mut out, &report);
    if report.passed() {
        let s = scalarize_with(&m, cfg.gauge_rel)?;
        let values: Vec<Vec<f64>> = (0..s.len())
            .map(|i| (0..s.len()).map(|j| s.value(i, j)).collect())
            .collect();
        let ids: Vec<&str> = (0..m.len()).map(|i| m.id(i)).collect();
        out.results
            .push(json!({ "check": "scalarized", "ids": ids, "values": values }));
    }
    Ok(out)
}

pub fn topology_check(cfg: &Config, (text, origin): Input) -> Result<Outcome> {
    let input: TopologyInput = io::parse_json(text, origin)?;
    let m = load_metric(cfg, &input.metric)?;
    let s = scalarize_with(&m, cfg.gauge_rel)?;
    let mut out = Outcome::default();
    for &mu in &input.mu {
        let mut report = CheckReport::new(format!("ball_identity(mu={mu})"));
        for x in 0..s.len() {
            report.merge(ball_identity(&s, x, mu, cfg.boundary_band)?);
        }
        report.normalize();
        push_report(&mut out, &report);
    }
    for &r in &input.r {
        let bound = (1.0 / r).floor() as usize + 1;
        let mut ks = Vec::with_capacity(s.len());
        for x in 0..s.len() {
            let k = ball_inclusion(&s, x, r)?;
            if k > bound {
                out.violations.push(json!({
                    "check": "ball_inclusion",
                    "kind": "inclusion",
                    "witness": [m.id(x)],
                    "detail": format!("r={r}, k={k} > {bound}"),
                }));
            }
            ks.push(k);
        }
        out.results.push(json!({
            "check": "ball_inclusion",
            "r": r,
            "bound": bound,
            "max_k": ks.iter().copied().max().unwrap_or(0),
            "k": ks,
        }));
    }
    let basis = basis_check(&s, cfg.trials.unwrap_or(DEFAULT_BASIS_TRIALS), cfg.seed)?;
    push_report(&mut out, &basis);
    Ok(out)
}

pub fn cauchy_check(cfg: &Config, (text, origin): Input) -> Result<Outcome> {
    let mut spec: SequenceSpec = io::parse_json(text, origin)?;
    if let Some(space) = &spec.params.space {
        spec.params.space = Some(io::with_membership_tol(space, cfg.membership)?);
    }
    if let Some(m) = &spec.params.metric {
        spec.params.metric = Some(load_metric(cfg, m)?);
    }
    let eps_list = spec
        .eps
        .clone()
        .unwrap_or_else(|| DEFAULT_EPS_LADDER.to_vec());
    let generated = spec.generate()?;
    let prefix = generated.prefix()?;
    let limit = match &spec.params.limit {
        Some(id) => Some(generated.metric.source().index_of(id)?),
        None => None,
    };
    let e = prefix.cone_metric().space().unit().clone();
    let mut out = Outcome::default();
    out.results.push(json!({
        "check": "sequence",
        "generator": spec.generator,
        "N": prefix.len(),
        "terms": generated.points.iter().map(|&p| generated.metric.source().id(p)).collect::<Vec<_>>(),
        "ground_truth": generated.truth,
    }));
    for &eps in &eps_list {
        let lll = prefix.is_lll_u_cauchy(&e, eps)?;
        let scalar = prefix.scalar_cauchy(eps)?;
        let truth = generated.truth.label(eps, cfg.boundary_band);
        let mut entry = json!({
            "check": "cauchy",
            "eps": eps,
            "lll_e": lll,
            "scalar": scalar,
            "expected": truth,
        });
        if let Some(x) = limit {
            entry["converges_lll"] = json!(prefix.converges_lll(x, eps)?);
            entry["converges_scalar"] = json!(prefix.scalar_converges(x, eps)?);
        }
        out.results.push(entry);
        if let (Some(want), Some(got)) = (truth, scalar.as_bool()) {
            if want != got {
                out.violations.push(json!({
                    "check": "cauchy",
                    "kind": "ground_truth",
                    "witness": [format!("eps={eps}")],
                    "detail": format!("expected cauchy={want}"),
                }));
            }
        }
        let report = prefix.cauchy_equivalence(eps, cfg.boundary_band)?;
        push_report(&mut out, &report);
    }
    out.results
        .push(json!({ "check": "lll_cauchy", "report": prefix.is_lll_cauchy(&eps_list)? }));
    Ok(out)
}

pub fn fixpoint(
    cfg: &Config,
    (text, origin): Input,
    x0: &str,
    tol: f64,
    max_iter: usize,
) -> Result<Outcome> {
    let spec: ProblemSpec = io::parse_json(text, origin)?;
    let built = spec.build()?;
    let metric = load_metric(cfg, built.metric())?;
    let p = ContractionProblem::new(metric, built.images().to_vec(), built.k_claimed())?;
    let s = scalarize_with(p.metric(), cfg.gauge_rel)?;
    let start = p.metric().index_of(x0)?;
    let outcome = banach_iterate_with(&p, &s, start, tol, max_iter)?;
    let mut out = Outcome::default();
    out.results.push(json!(outcome));
    let k = estimate_contraction(&p).unwrap_or(outcome.k);
    let bad = p.scalar_transfer_violations(&s, k, 1e-9);
    for &(x, y) in &bad {
        out.violations.push(json!({
            "check": "scalar_transfer",
            "kind": "scalar_transfer",
            "witness": [p.metric().id(x), p.metric().id(y)],
            "detail": format!("d(Tx,Ty) = {:e} > k d(x,y) = {:e}", s.value(p.image(x), p.image(y)), k * s.value(x, y)),
        }));
    }
    out.results
        .push(json!({ "check": "scalar_transfer", "k": k, "violations": bad.len() }));
    Ok(out)
}

pub fn suite(cfg: &Config) -> Outcome {
    let suite_cfg = SuiteConfig {
        seed: cfg.seed,
        samples: cfg.trials.unwrap_or(SuiteConfig::default().samples),
        membership_tol: cfg.membership,
        gauge_rel_tol: cfg.gauge_rel,
        boundary_band: cfg.boundary_band,
    };
    let report = run_suite(&suite_cfg);
    let mut out = Outcome::default();
    for c in &report.criteria {
        let name = format!("criterion {}", c.id);
        out.violations
            .extend(c.violations.iter().map(|v| violation(&name, v)));
        out.results.push(json!(c));
    }
    out
}
