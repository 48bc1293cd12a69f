//! The acceptance battery: seeded property checks over every cone family,
//! metric family, sequence generator and fixed-point demo. Each check is
//! reported with its trial count, failures and boundary exclusions; the
//! serialized report is byte-identical for a fixed configuration.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::{random_vector, Cone};
use crate::error::{Error, Result};
use crate::fixedpoint::{self, ContractionProblem};
use crate::linalg::Vector;
use crate::metric::{
    ball_identity, ball_inclusion, basis_check, random_table, scalarize_with, sum_transfer_holds,
    Component, ConeMetric, ScalarKind, ScalarizedMetric,
};
use crate::ordernorm::{
    compare_norms, OrderUnitSpace, DEFAULT_BOUNDARY_BAND, DEFAULT_GAUGE_REL_TOL,
    DEFAULT_MEMBERSHIP_TOL,
};
use crate::par;
use crate::report::{to_json_pretty, Violation};
use crate::sequences::{GeneratorKind, GeneratorParams, SequenceSpec};

/// Ball identity reports and `(r, k)` inclusion counts at one point.
type PointChecks = (Vec<crate::report::CheckReport>, Vec<(f64, usize)>);

/// At most this many violations are listed per criterion; the failure
/// count is always complete.
pub const MAX_LISTED_VIOLATIONS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Samples per cone for the sampled criteria.
    pub samples: usize,
    pub membership_tol: f64,
    pub gauge_rel_tol: f64,
    pub boundary_band: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            samples: 1000,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            gauge_rel_tol: DEFAULT_GAUGE_REL_TOL,
            boundary_band: DEFAULT_BOUNDARY_BAND,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub failures: usize,
    pub boundary_excluded: usize,
    pub detail: String,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

/// Accumulates one criterion.
struct Tally {
    trials: usize,
    failures: usize,
    excluded: usize,
    violations: Vec<Violation>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            trials: 0,
            failures: 0,
            excluded: 0,
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, v: Violation) {
        self.failures += 1;
        self.violations.push(v);
    }

    fn error(&mut self, context: String, e: &Error) {
        self.fail(Violation::new("error", vec![context], e.to_string()));
    }

    fn absorb(&mut self, o: Outcome) {
        match o {
            Outcome::Pass => self.trials += 1,
            Outcome::Excluded => self.excluded += 1,
            Outcome::Fail(v) => {
                self.trials += 1;
                self.fail(v);
            }
        }
    }

    fn finish(mut self, id: u32, name: &str, detail: String) -> CriterionResult {
        self.violations
            .sort_by(|a, b| (&a.kind, &a.witness).cmp(&(&b.kind, &b.witness)));
        self.violations.truncate(MAX_LISTED_VIOLATIONS);
        CriterionResult {
            id,
            name: name.to_string(),
            passed: self.failures == 0,
            trials: self.trials,
            failures: self.failures,
            boundary_excluded: self.excluded,
            detail,
            violations: self.violations,
        }
    }
}

enum Outcome {
    Pass,
    Excluded,
    Fail(Violation),
}

fn outcome_of(r: Result<Outcome>, witness: impl FnOnce() -> String) -> Outcome {
    r.unwrap_or_else(|e| Outcome::Fail(Violation::new("error", vec![witness()], e.to_string())))
}

/// The cones every sampled criterion runs over.
pub fn suite_cones() -> Vec<Cone> {
    let mut cones: Vec<Cone> = (2..=5).map(|n| Cone::orthant(n).expect("n >= 1")).collect();
    cones.extend((3..=5).map(|n| Cone::lorentz(n).expect("n >= 2")));
    cones.extend((2..=3).map(|k| Cone::psd(k).expect("k >= 1")));
    let g = |c: &[f64]| Vector::new(c.to_vec()).expect("finite");
    cones.push(
        Cone::polyhedral(vec![
            g(&[1.0, 0.0, 0.0]),
            g(&[0.0, 1.0, 0.0]),
            g(&[0.0, 0.0, 1.0]),
            g(&[1.0, 1.0, -0.5]),
        ])
        .expect("full rank"),
    );
    cones
}

fn rng_for(seed: u64, criterion: u64, group: u64, sample: u64) -> ChaCha8Rng {
    par::stream_rng(seed, (criterion << 48) | (group << 32) | sample)
}

fn random_space(cone: &Cone, tol: f64, rng: &mut ChaCha8Rng) -> Result<OrderUnitSpace> {
    let e = cone.random_order_unit(rng);
    OrderUnitSpace::new(cone.clone(), e, tol)
}

fn sampled(
    cfg: &SuiteConfig,
    criterion: u64,
    f: impl Fn(&Cone, &mut ChaCha8Rng) -> Result<Outcome> + Sync,
) -> Tally {
    let cones = suite_cones();
    let n = cfg.samples;
    let outcomes = par::map_indices(cones.len() * n, |i| {
        let (c, s) = (i / n, i % n);
        let cone = &cones[c];
        let mut rng = rng_for(cfg.seed, criterion, c as u64, s as u64);
        outcome_of(f(cone, &mut rng), || format!("{} sample {s}", cone.label()))
    });
    let mut t = Tally::new();
    outcomes.into_iter().for_each(|o| t.absorb(o));
    t
}

fn criterion_norms(cfg: &SuiteConfig) -> CriterionResult {
    let t = sampled(cfg, 1, |cone, rng| {
        let space = random_space(cone, cfg.membership_tol, rng)?;
        let x =
            random_vector(cone.ambient_dim(), rng).scale(10f64.powf(rng.random_range(-3.0..3.0)));
        let cmp = compare_norms(&space, &x, cfg.gauge_rel_tol)?;
        Ok(if cmp.agree {
            Outcome::Pass
        } else {
            Outcome::Fail(Violation::new(
                "norm_agreement",
                vec![cone.label(), format!("{:?}", x.coords())],
                format!("gauge {:e}, dual {:e}", cmp.gauge, cmp.dual),
            ))
        })
    });
    t.finish(
        1,
        "norm oracle agreement",
        "|gauge - dual| <= 1e-9 max(1, dual)".into(),
    )
}

fn criterion_units(cfg: &SuiteConfig) -> CriterionResult {
    let tol = cfg.membership_tol;
    let band = cfg.boundary_band;
    let t = sampled(cfg, 2, |cone, rng| {
        let dim = cone.ambient_dim();
        let y = match rng.random_range(0..4) {
            0 => cone.random_order_unit(rng),
            1 => cone.random_element(rng),
            2 => &cone.random_element(rng) + &random_vector(dim, rng).scale(0.3),
            _ => random_vector(dim, rng),
        };
        let slack = cone.slack(&y)?;
        if (slack - tol).abs() <= band {
            return Ok(Outcome::Excluded);
        }
        let interior = cone.interior_contains(&y, tol)?;
        let unit = cone.is_order_unit(&y, tol)?;
        let definition = cone.dominates_every_direction(&y)?;
        Ok(if interior == unit && unit == definition {
            Outcome::Pass
        } else {
            Outcome::Fail(Violation::new(
                "unit_routes",
                vec![cone.label(), format!("{:?}", y.coords())],
                format!("interior {interior}, is_order_unit {unit}, domination {definition}, slack {slack:e}"),
            ))
        })
    });
    t.finish(
        2,
        "interior points are exactly the order units",
        "interior vs is_order_unit vs domination".into(),
    )
}

fn criterion_strict_dominance(cfg: &SuiteConfig) -> CriterionResult {
    let t = sampled(cfg, 3, |cone, rng| {
        let space = random_space(cone, cfg.membership_tol, rng)?;
        let mut w = cone.random_element(rng);
        if w.is_zero() {
            w = space.unit().clone();
        }
        let pw = space.gauge_norm(&w, cfg.gauge_rel_tol)?;
        let v = w.scale(rng.random_range(0.5..1.5) / pw);
        let p = space.gauge_norm(&v, cfg.gauge_rel_tol)?;
        if (p - 1.0).abs() <= cfg.boundary_band {
            return Ok(Outcome::Excluded);
        }
        let strict = space.strictly_dominated_by_unit(&v)?;
        Ok(if strict == (p < 1.0) {
            Outcome::Pass
        } else {
            Outcome::Fail(Violation::new(
                "strict_unit_dominance",
                vec![cone.label(), format!("{:?}", v.coords())],
                format!("e - v unit {strict}, p(v) = {p:e}"),
            ))
        })
    });
    t.finish(
        3,
        "e - v is a unit iff p(v) < 1",
        "v in K, |p(v) - 1| > band".into(),
    )
}

/// The four metric families used by the ball-identity criterion.
pub fn suite_metrics(seed: u64, tol: f64) -> Result<Vec<(String, ConeMetric)>> {
    let mut rng = par::stream_rng(seed, 4 << 48);
    let plane = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect()
    };
    let o3 = Cone::orthant(3)?;
    let discrete_space = random_space(&o3, tol, &mut rng)?;
    let c = o3.random_order_unit(&mut rng);
    let discrete = ConeMetric::discrete(discrete_space, 8, c)?;

    let l3 = Cone::lorentz(3)?;
    let scaled_space = random_space(&l3, tol, &mut rng)?;
    let mut c = l3.random_element(&mut rng);
    if c.is_zero() {
        c = l3.canonical_unit();
    }
    let scaled = ConeMetric::scaled(scaled_space, plane(&mut rng, 12), c, ScalarKind::Euclidean)?;

    let comp_space = random_space(&o3, tol, &mut rng)?;
    let components = vec![
        Component {
            rho: ScalarKind::Euclidean,
            scale: 1.0,
        },
        Component {
            rho: ScalarKind::L1,
            scale: 0.5,
        },
        Component {
            rho: ScalarKind::Max,
            scale: 2.0,
        },
    ];
    let componentwise = ConeMetric::componentwise(comp_space, plane(&mut rng, 10), components)?;

    let table_space = random_space(&Cone::psd(2)?, tol, &mut rng)?;
    let table = random_table(&table_space, 20, rng.random())?;
    Ok(vec![
        ("discrete".into(), discrete),
        ("scaled".into(), scaled),
        ("componentwise".into(), componentwise),
        ("table".into(), table),
    ])
}

const MUS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
const RADII: [f64; 3] = [1.0, 0.3, 0.05];

fn criterion_balls(cfg: &SuiteConfig) -> CriterionResult {
    let mut t = Tally::new();
    let metrics = match suite_metrics(cfg.seed, cfg.membership_tol) {
        Ok(m) => m,
        Err(e) => {
            t.error("building metrics".into(), &e);
            return t.finish(4, "ball identities", String::new());
        }
    };
    let mut max_k = Vec::new();
    for (name, m) in &metrics {
        let s = match scalarize_with(m, cfg.gauge_rel_tol) {
            Ok(s) => s,
            Err(e) => {
                t.error(name.clone(), &e);
                continue;
            }
        };
        let per_point = par::map_indices(s.len(), |x| -> Result<PointChecks> {
            let reports = MUS
                .iter()
                .map(|&mu| ball_identity(&s, x, mu, cfg.boundary_band))
                .collect::<Result<_>>()?;
            let ks = RADII
                .iter()
                .map(|&r| Ok((r, ball_inclusion(&s, x, r)?)))
                .collect::<Result<_>>()?;
            Ok((reports, ks))
        });
        let mut worst = 0usize;
        for (x, res) in per_point.into_iter().enumerate() {
            match res {
                Ok((reports, ks)) => {
                    for r in reports {
                        t.trials += r.trials;
                        t.excluded += r.boundary_excluded;
                        for v in r.violations {
                            t.fail(Violation::new(
                                v.kind,
                                [vec![name.clone()], v.witness].concat(),
                                v.detail,
                            ));
                        }
                    }
                    for (r, k) in ks {
                        t.trials += 1;
                        worst = worst.max(k);
                        if k > (1.0 / r).floor() as usize + 1 {
                            t.fail(Violation::new(
                                "inclusion",
                                vec![name.clone(), m.id(x).into()],
                                format!("r={r}, k={k}"),
                            ));
                        }
                    }
                }
                Err(e) => t.error(format!("{name} point {}", m.id(x)), &e),
            }
        }
        match basis_check(&s, 50, cfg.seed) {
            Ok(r) => {
                t.trials += r.trials;
                for v in r.violations {
                    t.fail(Violation::new(
                        v.kind,
                        [vec![name.clone()], v.witness].concat(),
                        v.detail,
                    ));
                }
            }
            Err(e) => t.error(format!("{name} basis"), &e),
        }
        max_k.push(format!("{name}: max k {worst}"));
    }
    t.finish(4, "ball identities and inclusions", max_k.join(", "))
}

fn criterion_cauchy(cfg: &SuiteConfig) -> CriterionResult {
    const EPS: [f64; 3] = [1.0, 0.1, 0.01];
    let kinds: Vec<GeneratorKind> = std::iter::repeat_n(GeneratorKind::Orbit, 60)
        .chain(std::iter::repeat_n(GeneratorKind::Alternating, 20))
        .chain(std::iter::repeat_n(GeneratorKind::Noisy, 20))
        .collect();
    let cones = [Cone::orthant(2), Cone::lorentz(3), Cone::psd(2)];
    let results = par::map_indices(kinds.len(), |i| -> Result<(Tally, usize)> {
        let mut rng = rng_for(cfg.seed, 5, 0, i as u64);
        let cone = cones[i % cones.len()].clone()?;
        let space = random_space(&cone, cfg.membership_tol, &mut rng)?;
        let spec = SequenceSpec {
            generator: kinds[i],
            params: GeneratorParams {
                space: Some(space),
                ..GeneratorParams::default()
            },
            n: 40,
            seed: rng.random(),
            eps: None,
        };
        let g = spec.generate()?;
        let prefix = g.prefix()?;
        let mut t = Tally::new();
        let mut decided = 0;
        let label = format!("sequence {i} ({:?})", kinds[i]).to_lowercase();
        for eps in EPS {
            let r = prefix.cauchy_equivalence(eps, cfg.boundary_band)?;
            t.trials += r.trials;
            t.excluded += r.boundary_excluded;
            for v in r.violations {
                t.fail(Violation::new(
                    v.kind,
                    vec![label.clone(), format!("eps={eps}")],
                    v.detail,
                ));
            }
            if r.boundary_excluded > 0 {
                continue;
            }
            let verdict = prefix.scalar_cauchy(eps)?;
            decided += usize::from(verdict.is_decided());
            if let Some(want) = g.truth.label(eps, cfg.boundary_band) {
                t.trials += 1;
                if verdict.as_bool() != Some(want) {
                    t.fail(Violation::new(
                        "ground_truth",
                        vec![label.clone(), format!("eps={eps}")],
                        format!("expected cauchy={want}, verdict {verdict:?}"),
                    ));
                }
            }
        }
        // Unit-change rescaling is checked inside; a mismatch is an error.
        prefix.is_lll_cauchy(&EPS)?;
        t.trials += 1;
        Ok((t, decided))
    });
    let mut t = Tally::new();
    let mut decided = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((sub, d)) => {
                t.trials += sub.trials;
                t.excluded += sub.excluded;
                t.failures += sub.failures;
                t.violations.extend(sub.violations);
                decided += d;
            }
            Err(e) => t.error(format!("sequence {i}"), &e),
        }
    }
    // ε = (μ-1)/μ at μ = 2.
    let mu: f64 = 2.0;
    let eps = (mu - 1.0) / mu;
    t.trials += 1;
    if !(eps == 0.5 && eps * eps == 0.25 && eps * eps == ((mu - 1.0) / mu) * eps) {
        t.fail(Violation::new(
            "proof_identity",
            vec![],
            format!("eps^2 = {}", eps * eps),
        ));
    }
    t.finish(
        5,
        "Cauchy equivalence",
        format!(
            "{decided} decided (sequence, eps) cases of {}",
            kinds.len() * EPS.len()
        ),
    )
}

fn check_fixed_point(
    t: &mut Tally,
    name: &str,
    p: &ContractionProblem,
    s: &ScalarizedMetric,
    fixed: usize,
    starts: &[usize],
) -> Result<String> {
    const TOL: f64 = 1e-8;
    let k = fixedpoint::estimate_contraction(p).ok_or(Error::NotContraction(None))?;
    let mut finals = Vec::new();
    for &x0 in starts {
        let out = fixedpoint::banach_iterate_with(p, s, x0, TOL, 10_000)?;
        let witness = || vec![name.to_string(), p.metric().id(x0).to_string()];
        t.trials += 1;
        let err = s.value(out.fixed_index, fixed);
        if err > TOL {
            t.fail(Violation::new(
                "fixed_point_accuracy",
                witness(),
                format!("distance to fixed point {err:e}"),
            ));
        }
        for (n, (&x, b)) in out.iterate_indices.iter().zip(&out.bound_trace).enumerate() {
            t.trials += 1;
            if s.value(x, fixed) > b * (1.0 + 1e-6) {
                t.fail(Violation::new(
                    "a_priori_bound",
                    witness(),
                    format!("n={n}: {:e} > {b:e}", s.value(x, fixed)),
                ));
            }
        }
        finals.push(out.fixed_index);
    }
    for w in finals.windows(2) {
        t.trials += 1;
        if s.value(w[0], w[1]) > 2.0 * TOL {
            t.fail(Violation::new(
                "uniqueness",
                vec![name.to_string()],
                format!("{:e}", s.value(w[0], w[1])),
            ));
        }
    }
    let bad = p.scalar_transfer_violations(s, k, 1e-9);
    t.trials += s.len() * (s.len() - 1) / 2;
    for (x, y) in bad {
        t.fail(Violation::new(
            "scalar_transfer",
            vec![
                name.to_string(),
                p.metric().id(x).into(),
                p.metric().id(y).into(),
            ],
            "",
        ));
    }
    Ok(format!("{name}: k = {k:.6}"))
}

fn criterion_fixed_point(cfg: &SuiteConfig) -> CriterionResult {
    let mut t = Tally::new();
    let mut details = Vec::new();
    let mut run = |name: &str, built: Result<(ContractionProblem, usize, Vec<usize>)>| {
        let r = built.and_then(|(p, fixed, starts)| {
            let s = scalarize_with(p.metric(), cfg.gauge_rel_tol)?;
            check_fixed_point(&mut t, name, &p, &s, fixed, &starts)
        });
        match r {
            Ok(d) => details.push(d),
            Err(e) => t.error(name.to_string(), &e),
        }
    };
    run(
        "dyadic halving",
        fixedpoint::dyadic_halving(fixedpoint::DEFAULT_DYADIC_DEPTH).and_then(|(p, fixed)| {
            let starts = vec![p.metric().index_of("d0")?, p.metric().index_of("d5")?];
            Ok((p, fixed, starts))
        }),
    );
    run(
        "affine",
        fixedpoint::affine_demo().and_then(|(p, fixed, x0)| {
            let other = p.metric().index_of("x5")?;
            Ok((p, fixed, vec![x0, other]))
        }),
    );
    // The affine fixed point must also match an independent linear solve.
    if let Ok((p, fixed, _)) = fixedpoint::affine_demo() {
        t.trials += 1;
        let got = p.metric().points()[fixed]
            .coords
            .clone()
            .unwrap_or_default();
        let a = [[0.5, 0.25], [-0.25, 0.25]];
        let residual = (0..2)
            .map(|i| (got[i] - a[i][0] * got[0] - a[i][1] * got[1] - [1.0, -0.5][i]).abs())
            .fold(0.0, f64::max);
        if residual > 1e-12 {
            t.fail(Violation::new(
                "linear_solve",
                vec!["affine".into()],
                format!("residual {residual:e}"),
            ));
        }
    }
    t.finish(6, "Banach iteration", details.join(", "))
}

fn criterion_monotone(cfg: &SuiteConfig) -> CriterionResult {
    let mut t = sampled(cfg, 7, |cone, rng| {
        let space = random_space(cone, cfg.membership_tol, rng)?;
        let u = cone.random_element(rng).scale(rng.random_range(0.0..5.0));
        let w = cone.random_element(rng).scale(rng.random_range(0.0..5.0));
        let v = &u + &w;
        let pu = space.gauge_norm(&u, cfg.gauge_rel_tol)?;
        let pv = space.gauge_norm(&v, cfg.gauge_rel_tol)?;
        Ok(if pu <= pv + 1e-9 {
            Outcome::Pass
        } else {
            Outcome::Fail(Violation::new(
                "monotonicity",
                vec![cone.label()],
                format!("p(u) {pu:e} > p(v) {pv:e}"),
            ))
        })
    });
    // The sum-inequality transfer on a table metric, with the triangle
    // inequality as the cone-order premise.
    let transfer = (|| -> Result<(usize, Vec<Violation>)> {
        let mut rng = par::stream_rng(cfg.seed, 7 << 48 | 1 << 40);
        let space = random_space(&Cone::lorentz(3)?, cfg.membership_tol, &mut rng)?;
        let m = random_table(&space, 12, rng.random())?;
        let s = scalarize_with(&m, cfg.gauge_rel_tol)?;
        let n = s.len();
        let rows = par::map_indices(n, |a| -> Result<(usize, Vec<Violation>)> {
            let mut checked = 0;
            let mut bad = Vec::new();
            for b in 0..n {
                for z in 0..n {
                    if let Some(ok) =
                        sum_transfer_holds(&s, a, b, &[(a, z), (z, b)], cfg.membership_tol)?
                    {
                        checked += 1;
                        if !ok {
                            bad.push(Violation::new(
                                "sum_transfer",
                                vec![m.id(a).into(), m.id(b).into(), m.id(z).into()],
                                "",
                            ));
                        }
                    }
                }
            }
            Ok((checked, bad))
        });
        let mut total = 0;
        let mut bad = Vec::new();
        for r in rows {
            let (c, v) = r?;
            total += c;
            bad.extend(v);
        }
        Ok((total, bad))
    })();
    match transfer {
        Ok((checked, bad)) => {
            t.trials += checked;
            bad.into_iter().for_each(|v| t.fail(v));
        }
        Err(e) => t.error("sum transfer".into(), &e),
    }
    t.finish(
        7,
        "monotonicity of p",
        "p(u) <= p(v) + 1e-9 for 0 <= u <= v".into(),
    )
}

fn criterion_normality(cfg: &SuiteConfig) -> CriterionResult {
    let mut t = Tally::new();
    let mut estimates = Vec::new();
    for n in 2..=5 {
        let cone = Cone::orthant(n).expect("n >= 1");
        let c = fixedpoint::normality_constant(
            &cone,
            10 * cfg.samples,
            cfg.seed ^ (8 << 48 | n as u64),
        );
        t.trials += 10 * cfg.samples;
        if c > 1.0 + 1e-9 {
            t.fail(Violation::new(
                "normality",
                vec![cone.label()],
                format!("estimate {c:e}"),
            ));
        }
        estimates.push(format!("{}: {c:.12}", cone.label()));
    }
    t.finish(8, "normality of the orthant", estimates.join(", "))
}

/// Criteria 1 to 8.
pub fn run_battery(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    vec![
        criterion_norms(cfg),
        criterion_units(cfg),
        criterion_strict_dominance(cfg),
        criterion_balls(cfg),
        criterion_cauchy(cfg),
        criterion_fixed_point(cfg),
        criterion_monotone(cfg),
        criterion_normality(cfg),
    ]
}

/// The battery run twice; criterion 9 records whether both runs serialize
/// to the same bytes.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let first = run_battery(cfg);
    let second = run_battery(cfg);
    let bytes = |c: &Vec<CriterionResult>| to_json_pretty(c).expect("suite results serialize");
    let (a, b) = (bytes(&first), bytes(&second));
    let same = a == b;
    let mut t = Tally::new();
    t.trials = 1;
    if !same {
        let at = a
            .bytes()
            .zip(b.bytes())
            .position(|(x, y)| x != y)
            .unwrap_or(a.len().min(b.len()));
        t.fail(Violation::new(
            "determinism",
            vec![],
            format!("reports differ at byte {at}"),
        ));
    }
    let mut criteria = first;
    criteria.push(t.finish(9, "determinism", format!("{} bytes per run", a.len())));
    SuiteReport {
        config: cfg.clone(),
        criteria,
    }
}
