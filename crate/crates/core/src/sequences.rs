//! Cauchy and convergence predicates on finite sequence prefixes.
//!
//! Every predicate only sees `N` terms, so a verdict is three-valued:
//!
//! * `Holds { k }`: the tail starting at term `k` (1-based) meets the
//!   threshold and covers at least the second half of the prefix.
//! * `Fails`: the threshold is still violated in the last quarter of the
//!   prefix and the tail diameter is not shrinking (the last-quarter
//!   diameter exceeds half of the last-half diameter).
//! * `Undecided`: anything else, typically a sequence that is still
//!   approaching its limit at the horizon.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::metric::{scalarize, ConeMetric, ScalarKind, ScalarizedMetric};
use crate::ordernorm::OrderUnitSpace;
use crate::par;
use crate::report::{CheckReport, Violation};

/// The first `N` terms of a sequence in the domain of a metric.
#[derive(Clone, Debug)]
pub struct SequencePrefix<'a> {
    metric: &'a ScalarizedMetric,
    points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Holds { k: usize },
    Fails { witness: (usize, usize) },
    Undecided { k: Option<usize> },
}

impl Verdict {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Undecided { .. })
    }

    /// `Some(true)` for `Holds`, `Some(false)` for `Fails`.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::Holds { .. } => Some(true),
            Verdict::Fails { .. } => Some(false),
            Verdict::Undecided { .. } => None,
        }
    }
}

impl<'a> SequencePrefix<'a> {
    pub fn new(metric: &'a ScalarizedMetric, points: Vec<usize>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(
                "a sequence prefix needs at least two terms".into(),
            ));
        }
        if let Some(&p) = points.iter().find(|&&p| p >= metric.len()) {
            return Err(Error::UnknownPoint(format!("index {p}")));
        }
        Ok(SequencePrefix { metric, points })
    }

    pub fn from_ids(metric: &'a ScalarizedMetric, ids: &[String]) -> Result<Self> {
        let cone_metric = metric.source();
        let points = ids
            .iter()
            .map(|id| cone_metric.index_of(id))
            .collect::<Result<Vec<_>>>()?;
        SequencePrefix::new(metric, points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn metric(&self) -> &ScalarizedMetric {
        self.metric
    }

    pub fn cone_metric(&self) -> &ConeMetric {
        self.metric.source()
    }

    fn dist(&self, n: usize, m: usize) -> Vector {
        self.cone_metric().dist(self.points[n], self.points[m])
    }

    fn scalar(&self, n: usize, m: usize) -> f64 {
        self.metric.value(self.points[n], self.points[m])
    }

    /// `d(x_n, x_m) ⋘ eps u` for all `n, m >= k`.
    pub fn is_lll_u_cauchy(&self, u: &Vector, eps: f64) -> Result<Verdict> {
        let space = self.cone_metric().space();
        let cone = space.cone();
        if !cone.is_order_unit(u, space.tol())? {
            return Err(Error::NotOrderUnit);
        }
        check_eps(eps)?;
        let threshold = u.scale(eps);
        let close = |n: usize, m: usize| -> Result<bool> {
            cone.is_order_unit_unchecked((&threshold - &self.dist(n, m)).coords(), space.tol())
        };
        // Cone-order size of a pair relative to u: inf { t : t u - d ⋘-dominates }.
        let u_space = space.with_unit(u.clone())?;
        let size = |n: usize, m: usize| -> Result<f64> {
            u_space.unit_dominance_threshold(&self.dist(n, m))
        };
        pair_verdict(self.len(), close, size)
    }

    /// `d̄(x_n, x_m) < eps` for all `n, m >= k`.
    pub fn scalar_cauchy(&self, eps: f64) -> Result<Verdict> {
        check_eps(eps)?;
        pair_verdict(
            self.len(),
            |n, m| Ok(self.scalar(n, m) < eps),
            |n, m| Ok(self.scalar(n, m)),
        )
    }

    /// ⋘-Cauchy with respect to the space's unit `e` at every threshold in
    /// `eps_list`. A second unit `u'` is evaluated alongside: with `ρe <= u'`
    /// and `σu' <= e`, a `Holds` verdict at `eps` for one unit must give
    /// `Holds` at `eps/ρ` (resp. `eps/σ`) for the other.
    pub fn is_lll_cauchy(&self, eps_list: &[f64]) -> Result<LllCauchyReport> {
        if eps_list.is_empty() {
            return Err(Error::InvalidInput("eps list must not be empty".into()));
        }
        let space = self.cone_metric().space();
        let e = space.unit().clone();
        let secondary = secondary_unit(space)?;
        let shrink = 1.0 - 1e-9;
        let rho = space.max_scale_below(&secondary)? * shrink;
        let sigma = space.with_unit(secondary.clone())?.max_scale_below(&e)? * shrink;
        let mut per_eps = Vec::with_capacity(eps_list.len());
        for &eps in eps_list {
            let primary = self.is_lll_u_cauchy(&e, eps)?;
            let other = self.is_lll_u_cauchy(&secondary, eps)?;
            if matches!(primary, Verdict::Holds { .. })
                && !matches!(
                    self.is_lll_u_cauchy(&secondary, eps / rho)?,
                    Verdict::Holds { .. }
                )
            {
                return Err(Error::RouteMismatch {
                    op: "is_lll_cauchy",
                    detail: format!(
                        "Cauchy at eps={eps} for e but not at eps/rho={} for u'",
                        eps / rho
                    ),
                });
            }
            if matches!(other, Verdict::Holds { .. })
                && !matches!(
                    self.is_lll_u_cauchy(&e, eps / sigma)?,
                    Verdict::Holds { .. }
                )
            {
                return Err(Error::RouteMismatch {
                    op: "is_lll_cauchy",
                    detail: format!(
                        "Cauchy at eps={eps} for u' but not at eps/sigma={} for e",
                        eps / sigma
                    ),
                });
            }
            per_eps.push(EpsVerdict {
                eps,
                unit_e: primary,
                unit_secondary: other,
            });
        }
        let cauchy = per_eps
            .iter()
            .all(|v| matches!(v.unit_e, Verdict::Holds { .. }));
        Ok(LllCauchyReport {
            cauchy,
            per_eps,
            secondary_unit: secondary,
            rho,
            sigma,
        })
    }

    /// `d(x_n, x) ⋘ eps e` for all `n >= k`, computed both directly and as
    /// eventual membership in `B_⋘(x, eps e)`; the two must agree exactly.
    pub fn converges_lll(&self, x: usize, eps: f64) -> Result<Verdict> {
        check_eps(eps)?;
        let m = self.cone_metric();
        if x >= m.len() {
            return Err(Error::UnknownPoint(format!("index {x}")));
        }
        let space = m.space();
        let u = space.unit().scale(eps);
        let direct: Vec<bool> = (0..self.len())
            .map(|n| {
                space.cone().is_order_unit_unchecked(
                    (&u - &m.dist(self.points[n], x)).coords(),
                    space.tol(),
                )
            })
            .collect::<Result<_>>()?;
        let ball = m.ball_lll(x, &u)?;
        let via_ball: Vec<bool> = self
            .points
            .iter()
            .map(|p| ball.binary_search(p).is_ok())
            .collect();
        if direct != via_ball {
            return Err(Error::RouteMismatch {
                op: "converges_lll",
                detail: "unit-dominance and ball formulations differ".into(),
            });
        }
        let sizes: Vec<f64> = (0..self.len())
            .map(|n| space.unit_dominance_threshold(&m.dist(self.points[n], x)))
            .collect::<Result<_>>()?;
        Ok(single_verdict(&direct, &sizes))
    }

    /// Scalar counterpart of [`SequencePrefix::converges_lll`].
    pub fn scalar_converges(&self, x: usize, eps: f64) -> Result<Verdict> {
        check_eps(eps)?;
        let close: Vec<bool> = self
            .points
            .iter()
            .map(|&p| self.metric.value(p, x) < eps)
            .collect();
        let sizes: Vec<f64> = self
            .points
            .iter()
            .map(|&p| self.metric.value(p, x))
            .collect();
        Ok(single_verdict(&close, &sizes))
    }

    /// Compares the ⋘-e-Cauchy and scalar-Cauchy verdicts at `eps`. If some
    /// pair has `|d̄ - eps| < band * eps` the case is excluded. Also checks
    /// the arithmetic identity `ε² = ((μ-1)/μ) ε` at `μ = 2`.
    pub fn cauchy_equivalence(&self, eps: f64, band: f64) -> Result<CheckReport> {
        let mut report = CheckReport::new(format!("cauchy_equivalence(eps={eps})"));
        // With μ = 2 the threshold ε = (μ-1)/μ satisfies ε² = ε/μ = 1/4.
        let mu: f64 = 2.0;
        let e2 = (mu - 1.0) / mu;
        if e2 * e2 != e2 / mu || e2 * e2 != 0.25 {
            report.violations.push(Violation::new(
                "proof_identity",
                vec![],
                format!("eps^2 = {}", e2 * e2),
            ));
        }
        let n = self.len();
        let in_band =
            (0..n).any(|i| (i + 1..n).any(|j| (self.scalar(i, j) - eps).abs() < band * eps));
        if in_band {
            report.boundary_excluded = 1;
            return Ok(report);
        }
        report.trials = 1;
        let lll = self.is_lll_u_cauchy(self.cone_metric().space().unit(), eps)?;
        let scalar = self.scalar_cauchy(eps)?;
        if lll != scalar {
            report.violations.push(Violation::new(
                "cauchy_equivalence",
                vec![format!("eps={eps}")],
                format!("order-unit verdict {lll:?}, scalar verdict {scalar:?}"),
            ));
        }
        Ok(report)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "eps must be positive and finite, got {eps}"
        )))
    }
}

/// Per-threshold verdicts of [`SequencePrefix::is_lll_cauchy`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsVerdict {
    pub eps: f64,
    pub unit_e: Verdict,
    pub unit_secondary: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LllCauchyReport {
    pub cauchy: bool,
    pub per_eps: Vec<EpsVerdict>,
    pub secondary_unit: Vector,
    pub rho: f64,
    pub sigma: f64,
}

/// `e + (z + λe)/2` with `z = (1, 0, ..., 0)` lifted into the cone; a unit
/// that is not a multiple of `e`.
fn secondary_unit(space: &OrderUnitSpace) -> Result<Vector> {
    let z = Vector::basis(space.dim(), 0);
    let lift = space.dual_sup(&-&z)?;
    let w = z.axpy(lift, space.unit());
    Ok(space.unit().axpy(0.5, &w))
}

fn decide(
    n: usize,
    k_min: usize,
    witness: (usize, usize),
    half_diam: f64,
    quarter_diam: f64,
) -> Verdict {
    if k_min <= n / 2 {
        Verdict::Holds { k: k_min + 1 }
    } else if k_min > (3 * n) / 4 && quarter_diam > 0.5 * half_diam {
        Verdict::Fails {
            witness: (witness.0 + 1, witness.1 + 1),
        }
    } else {
        Verdict::Undecided {
            k: (k_min < n).then_some(k_min + 1),
        }
    }
}

/// Smallest 0-based `k` with `close(i, j)` for all `k <= i < j < n`, found
/// by scanning rows from the end.
fn pair_verdict(
    n: usize,
    close: impl Fn(usize, usize) -> Result<bool>,
    size: impl Fn(usize, usize) -> Result<f64>,
) -> Result<Verdict> {
    let mut k_min = 0;
    let mut witness = (0, 0);
    'rows: for i in (0..n).rev() {
        for j in (i + 1)..n {
            if !close(i, j)? {
                k_min = i + 1;
                witness = (i, j);
                break 'rows;
            }
        }
    }
    if k_min <= n / 2 {
        return Ok(decide(n, k_min, witness, 0.0, 0.0));
    }
    let diameter = |from: usize| -> Result<f64> {
        let mut d = 0.0f64;
        for i in from..n {
            for j in (i + 1)..n {
                d = d.max(size(i, j)?);
            }
        }
        Ok(d)
    };
    Ok(decide(
        n,
        k_min,
        witness,
        diameter(n / 2)?,
        diameter((3 * n) / 4)?,
    ))
}

fn single_verdict(close: &[bool], sizes: &[f64]) -> Verdict {
    let n = close.len();
    let k_min = close.iter().rposition(|c| !c).map_or(0, |i| i + 1);
    let max_from = |from: usize| sizes[from..].iter().copied().fold(0.0, f64::max);
    let witness = if k_min > 0 {
        (k_min - 1, k_min - 1)
    } else {
        (0, 0)
    };
    if k_min <= n / 2 {
        return decide(n, k_min, witness, 0.0, 0.0);
    }
    decide(n, k_min, witness, max_from(n / 2), max_from((3 * n) / 4))
}

/// What a generator knows about its sequence independently of the
/// predicates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroundTruth {
    /// Convergent; every pair of terms from index `N/2` on is closer than
    /// `tail_bound` in the scalar metric.
    Convergent {
        tail_bound: f64,
    },
    /// Two points at scalar distance `distance`, alternating.
    Alternating {
        distance: f64,
    },
    Unknown,
}

impl GroundTruth {
    /// Expected Cauchy verdict at `eps`, when the prefix is long enough to
    /// decide it and `eps` is outside the boundary band.
    pub fn label(&self, eps: f64, band: f64) -> Option<bool> {
        match *self {
            GroundTruth::Convergent { tail_bound } => {
                (tail_bound < eps * (1.0 - band)).then_some(true)
            }
            GroundTruth::Alternating { distance } => {
                if (distance - eps).abs() < band * eps {
                    None
                } else {
                    Some(distance < eps)
                }
            }
            GroundTruth::Unknown => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Orbit,
    Noisy,
    Alternating,
    Table,
}

/// A generated sequence with its scalarized metric and ground truth.
#[derive(Clone, Debug)]
pub struct GeneratedSequence {
    pub kind: GeneratorKind,
    pub metric: ScalarizedMetric,
    pub points: Vec<usize>,
    pub truth: GroundTruth,
}

impl GeneratedSequence {
    pub fn prefix(&self) -> Result<SequencePrefix<'_>> {
        SequencePrefix::new(&self.metric, self.points.clone())
    }
}

/// Parameters for generated sequences; missing values are drawn from the seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<OrderUnitSpace>,
    /// Contraction ratio of orbits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Initial noise amplitude for noisy orbits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// Scalar distance between the two alternating points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// Table generator: the metric and the identifiers of the terms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<ConeMetric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<String>>,
    /// Table generator: identifier of a candidate limit point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
}

/// `{"generator", "params", "N", "seed"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub generator: GeneratorKind,
    #[serde(default)]
    pub params: GeneratorParams,
    #[serde(rename = "N", default = "default_len")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Thresholds to evaluate; the default ladder when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
}

fn default_len() -> usize {
    40
}

impl SequenceSpec {
    pub fn generate(&self) -> Result<GeneratedSequence> {
        if self.n < 2 {
            return Err(Error::InvalidInput("N must be at least 2".into()));
        }
        let mut rng = par::stream_rng(self.seed, 0);
        if self.generator == GeneratorKind::Table {
            let metric =
                self.params.metric.clone().ok_or_else(|| {
                    Error::InvalidInput("table generator needs params.metric".into())
                })?;
            let ids = self.params.sequence.clone().ok_or_else(|| {
                Error::InvalidInput("table generator needs params.sequence".into())
            })?;
            let metric = scalarize(&metric)?;
            let points = ids
                .iter()
                .map(|id| metric.source().index_of(id))
                .collect::<Result<Vec<_>>>()?;
            return Ok(GeneratedSequence {
                kind: GeneratorKind::Table,
                metric,
                points,
                truth: GroundTruth::Unknown,
            });
        }
        let space = match &self.params.space {
            Some(s) => s.clone(),
            None => OrderUnitSpace::canonical(crate::cones::Cone::orthant(2)?),
        };
        // Direction c with p(c) = 1, so that d̄(x, y) = |x - y|.
        let w = space.cone().random_element(&mut rng);
        let pw = space.norm(&w)?;
        let c = if pw > 1e-6 {
            w.scale(1.0 / pw)
        } else {
            space.unit().clone()
        };

        let n = self.n;
        let unit_dir = |rng: &mut rand_chacha::ChaCha8Rng| -> [f64; 2] {
            let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            [a.cos(), a.sin()]
        };
        let (coords, truth): (Vec<Vec<f64>>, GroundTruth) = match self.generator {
            GeneratorKind::Orbit | GeneratorKind::Noisy => {
                // Keep q^(N-1) above 1e-5 so late terms stay distinguishable
                // from each other at the membership tolerance.
                let q_lo = 1e-5f64.powf(1.0 / (n - 1) as f64).max(0.3);
                let q = self
                    .params
                    .q
                    .unwrap_or_else(|| rng.random_range(q_lo..q_lo + 0.6 * (1.0 - q_lo)));
                if !(0.0..1.0).contains(&q) {
                    return Err(Error::InvalidInput(format!(
                        "orbit ratio must lie in [0, 1), got {q}"
                    )));
                }
                let centre = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let dir = unit_dir(&mut rng);
                let radius: f64 = rng.random_range(0.5..2.0);
                let noisy = self.generator == GeneratorKind::Noisy;
                let sigma = if noisy {
                    self.params
                        .noise
                        .unwrap_or_else(|| rng.random_range(0.01..0.1))
                } else {
                    0.0
                };
                let decay: f64 = rng.random_range(0.3..0.8);
                let coords = (0..n)
                    .map(|i| {
                        let shrink = q.powi(i as i32) * radius;
                        let jitter = sigma * decay.powi(i as i32) * rng.random_range(0.0..1.0);
                        let jd = unit_dir(&mut rng);
                        vec![
                            centre[0] + shrink * dir[0] + jitter * jd[0],
                            centre[1] + shrink * dir[1] + jitter * jd[1],
                        ]
                    })
                    .collect();
                let half = (n / 2) as i32;
                let tail_bound = radius * q.powi(half) + 2.0 * sigma * decay.powi(half);
                (coords, GroundTruth::Convergent { tail_bound })
            }
            GeneratorKind::Alternating => {
                let s = self
                    .params
                    .distance
                    .unwrap_or_else(|| rng.random_range(0.05..2.0));
                if s.is_nan() || s <= 0.0 {
                    return Err(Error::InvalidInput(
                        "alternating distance must be positive".into(),
                    ));
                }
                let a = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let dir = unit_dir(&mut rng);
                let b = [a[0] + s * dir[0], a[1] + s * dir[1]];
                let coords = (0..n)
                    .map(|i| if i % 2 == 0 { a.to_vec() } else { b.to_vec() })
                    .collect();
                (coords, GroundTruth::Alternating { distance: s })
            }
            GeneratorKind::Table => unreachable!("handled above"),
        };
        let (domain, points) = dedup(coords);
        let metric = ConeMetric::scaled(space, domain, c, ScalarKind::Euclidean)?;
        let metric = scalarize(&metric)?;
        let truth = match truth {
            GroundTruth::Alternating { .. } => GroundTruth::Alternating {
                distance: metric.value(0, 1),
            },
            t => t,
        };
        Ok(GeneratedSequence {
            kind: self.generator,
            metric,
            points,
            truth,
        })
    }
}

/// Distinct coordinate vectors and the index sequence into them.
fn dedup(coords: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut domain: Vec<Vec<f64>> = Vec::new();
    let mut points = Vec::with_capacity(coords.len());
    for c in coords {
        match domain.iter().position(|d| *d == c) {
            Some(i) => points.push(i),
            None => {
                points.push(domain.len());
                domain.push(c);
            }
        }
    }
    (domain, points)
}

/// The default thresholds for Cauchy ladders.
pub const DEFAULT_EPS_LADDER: [f64; 4] = [1.0, 0.5, 0.1, 0.01];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Cone;

    fn line_metric(xs: &[f64]) -> ScalarizedMetric {
        let space = OrderUnitSpace::canonical(Cone::orthant(2).unwrap());
        let coords = xs.iter().map(|x| vec![*x]).collect();
        let m = ConeMetric::scaled(
            space,
            coords,
            Vector::new(vec![1.0, 1.0]).unwrap(),
            ScalarKind::L1,
        )
        .unwrap();
        scalarize(&m).unwrap()
    }

    #[test]
    fn constant_sequence_is_cauchy_from_the_start() {
        let s = line_metric(&[0.3]);
        let p = SequencePrefix::new(&s, vec![0; 10]).unwrap();
        let e = s.source().space().unit().clone();
        for eps in [1.0, 1e-6] {
            assert_eq!(p.is_lll_u_cauchy(&e, eps).unwrap(), Verdict::Holds { k: 1 });
            assert_eq!(p.scalar_cauchy(eps).unwrap(), Verdict::Holds { k: 1 });
            assert_eq!(p.converges_lll(0, eps).unwrap(), Verdict::Holds { k: 1 });
        }
        assert!(p.is_lll_cauchy(&DEFAULT_EPS_LADDER).unwrap().cauchy);
    }

    /// Partial sums of 2^-i with d = (|x-y|, |x-y|): the tail from term k
    /// has diameter below 2^{-k+1}.
    #[test]
    fn partial_sums_of_halves_are_cauchy() {
        let xs: Vec<f64> = (0..30i32).map(|k| 2.0 - 2f64.powi(1 - k)).collect();
        let s = line_metric(&xs);
        let p = SequencePrefix::new(&s, (0..30).collect()).unwrap();
        let e = s.source().space().unit().clone();
        match p.is_lll_u_cauchy(&e, 0.1).unwrap() {
            Verdict::Holds { k } => assert!(k <= 6, "k = {k}"),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            p.is_lll_u_cauchy(&e, 0.1).unwrap(),
            p.scalar_cauchy(0.1).unwrap()
        );
        let limit = line_metric(&[xs.as_slice(), &[2.0]].concat());
        let p = SequencePrefix::new(&limit, (0..30).collect()).unwrap();
        assert!(matches!(
            p.converges_lll(30, 0.01).unwrap(),
            Verdict::Holds { .. }
        ));
    }

    #[test]
    fn alternating_pair_is_not_cauchy_below_its_distance() {
        let s = line_metric(&[0.0, 1.0]);
        let p = SequencePrefix::new(&s, (0..20).map(|i| i % 2).collect()).unwrap();
        let e = s.source().space().unit().clone();
        assert!(matches!(
            p.is_lll_u_cauchy(&e, 0.5).unwrap(),
            Verdict::Fails { .. }
        ));
        assert!(matches!(
            p.scalar_cauchy(0.5).unwrap(),
            Verdict::Fails { .. }
        ));
        assert_eq!(p.scalar_cauchy(1.5).unwrap(), Verdict::Holds { k: 1 });
        let report = p.is_lll_cauchy(&[1.5, 0.5]).unwrap();
        assert!(!report.cauchy);
        assert!(report.rho > 0.0 && report.sigma > 0.0);
    }

    #[test]
    fn convergence_to_the_wrong_point_fails() {
        let xs: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).chain([3.0]).collect();
        let s = line_metric(&xs);
        let p = SequencePrefix::new(&s, (0..20).collect()).unwrap();
        assert!(matches!(
            p.converges_lll(20, 0.5).unwrap(),
            Verdict::Fails { .. }
        ));
        assert_eq!(
            p.converges_lll(20, 0.5).unwrap(),
            p.scalar_converges(20, 0.5).unwrap()
        );
    }

    #[test]
    fn slow_orbit_is_undecided() {
        let xs: Vec<f64> = (0..20).map(|k| 0.97f64.powi(k)).collect();
        let s = line_metric(&xs);
        let p = SequencePrefix::new(&s, (0..20).collect()).unwrap();
        assert!(matches!(
            p.scalar_cauchy(0.01).unwrap(),
            Verdict::Undecided { .. }
        ));
    }

    #[test]
    fn proof_identity_and_equivalence() {
        let xs: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        let s = line_metric(&xs);
        let p = SequencePrefix::new(&s, (0..20).collect()).unwrap();
        let r = p.cauchy_equivalence(0.01, 1e-7).unwrap();
        assert!(r.passed() && r.trials == 1);
        let mu: f64 = 2.0;
        let eps = (mu - 1.0) / mu;
        assert_eq!(eps * eps, 0.25);
        assert_eq!(eps * eps, ((mu - 1.0) / mu) * eps);
    }

    #[test]
    fn prefix_validation() {
        let s = line_metric(&[0.0, 1.0]);
        assert!(SequencePrefix::new(&s, vec![0]).is_err());
        assert!(SequencePrefix::new(&s, vec![0, 5]).is_err());
        let p = SequencePrefix::new(&s, vec![0, 1]).unwrap();
        assert!(p.scalar_cauchy(0.0).is_err());
        assert!(p
            .is_lll_u_cauchy(&Vector::new(vec![1.0, 0.0]).unwrap(), 1.0)
            .is_err());
    }

    #[test]
    fn generators_match_their_labels() {
        for (i, kind) in [
            GeneratorKind::Orbit,
            GeneratorKind::Noisy,
            GeneratorKind::Alternating,
        ]
        .into_iter()
        .enumerate()
        {
            let spec = SequenceSpec {
                generator: kind,
                params: GeneratorParams::default(),
                n: 40,
                seed: i as u64,
                eps: None,
            };
            let g = spec.generate().unwrap();
            let p = g.prefix().unwrap();
            for eps in [1.0, 0.1, 0.01] {
                if let Some(label) = g.truth.label(eps, 1e-7) {
                    assert_eq!(
                        p.scalar_cauchy(eps).unwrap().as_bool(),
                        Some(label),
                        "{kind:?} eps={eps}"
                    );
                }
            }
        }
    }

    #[test]
    fn sequence_spec_json() {
        let spec: SequenceSpec =
            serde_json::from_str(r#"{"generator":"orbit","params":{"q":0.5},"N":16,"seed":3}"#)
                .unwrap();
        assert_eq!(spec.n, 16);
        assert_eq!(spec.params.q, Some(0.5));
        assert!(serde_json::from_str::<SequenceSpec>(r#"{"generator":"spiral"}"#).is_err());
    }
}
