//! Cone-valued metrics on finite point sets and their scalarization.
//!
//! A [`ConeMetric`] assigns to each pair of points a distance vector in the
//! cone. Composing with the order-unit norm gives a [`ScalarizedMetric`]. On a
//! finite domain the topological statements about the two become set
//! identities between balls, which [`ball_identity`], [`ball_inclusion`]
//! and [`basis_check`] evaluate point by point.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cones::FamilyKind;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::ordernorm::{OrderUnitSpace, DEFAULT_BOUNDARY_BAND, DEFAULT_GAUGE_REL_TOL};
use crate::par;
use crate::report::{CheckReport, Violation};

/// A point of the domain: an identifier and, for the built-in coordinate
/// families, its coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

impl Point {
    pub fn new(id: impl Into<String>, coords: Vec<f64>) -> Self {
        Point {
            id: id.into(),
            coords: Some(coords),
        }
    }

    pub fn label(id: impl Into<String>) -> Self {
        Point {
            id: id.into(),
            coords: None,
        }
    }
}

/// Real-valued metrics on coordinate vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Euclidean,
    L1,
    Max,
}

impl ScalarKind {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            ScalarKind::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            ScalarKind::L1 => diffs.sum(),
            ScalarKind::Max => diffs.fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub rho: ScalarKind,
    pub scale: f64,
}

/// How distances are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum MetricFamily {
    /// `d(x, y) = c` for `x != y`, with `c` an order unit.
    Discrete { c: Vector },
    /// `d(x, y) = rho(x, y) c`, with `c` a nonzero cone element.
    Scaled { c: Vector, rho: ScalarKind },
    /// `d(x, y)_i = scale_i * rho_i(x, y)` over an orthant.
    Componentwise { components: Vec<Component> },
    /// Explicit distance vectors, `matrix[i][j] = d(point_i, point_j)`.
    Table { matrix: Vec<Vec<Vector>> },
}

/// A cone-valued distance on a finite domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricSpec", into = "MetricSpec")]
pub struct ConeMetric {
    space: OrderUnitSpace,
    points: Vec<Point>,
    family: MetricFamily,
    index: HashMap<String, usize>,
}

/// JSON form: `{"space", "family", "params", "points"}`. Points may be
/// given as bare identifier strings or as `{"id", "coords"}` objects.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSpec {
    pub space: OrderUnitSpace,
    #[serde(flatten)]
    pub family: MetricFamily,
    pub points: Vec<PointSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Id(String),
    Full(Point),
}

impl From<PointSpec> for Point {
    fn from(p: PointSpec) -> Self {
        match p {
            PointSpec::Id(id) => Point::label(id),
            PointSpec::Full(p) => p,
        }
    }
}

impl TryFrom<MetricSpec> for ConeMetric {
    type Error = Error;

    fn try_from(spec: MetricSpec) -> Result<Self> {
        ConeMetric::new(
            spec.space,
            spec.points.into_iter().map(Point::from).collect(),
            spec.family,
        )
    }
}

impl From<ConeMetric> for MetricSpec {
    fn from(m: ConeMetric) -> Self {
        MetricSpec {
            space: m.space,
            family: m.family,
            points: m.points.into_iter().map(PointSpec::Full).collect(),
        }
    }
}

impl ConeMetric {
    /// Validates the family parameters against the space. Built-in families
    /// satisfy the axioms by construction; tables must additionally pass
    /// [`ConeMetric::verify_axioms`] before they are scalarized.
    pub fn new(space: OrderUnitSpace, points: Vec<Point>, family: MetricFamily) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMetric(
                "domain must contain at least one point".into(),
            ));
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.id.clone(), i).is_some() {
                return Err(Error::InvalidMetric(format!(
                    "duplicate point id `{}`",
                    p.id
                )));
            }
        }
        let dim = space.dim();
        let tol = space.tol();
        let needs_coords = |points: &[Point]| -> Result<()> {
            let first = points[0].coords.as_ref().map(Vec::len);
            for p in points {
                match (&p.coords, first) {
                    (Some(c), Some(n)) if c.len() == n && c.iter().all(|v| v.is_finite()) => {}
                    _ => {
                        return Err(Error::InvalidMetric(format!(
                            "point `{}` needs finite coordinates of a common dimension",
                            p.id
                        )))
                    }
                }
            }
            Ok(())
        };
        match &family {
            MetricFamily::Discrete { c } => {
                c.check_dim(dim)?;
                if !space.cone().is_order_unit(c, tol)? {
                    return Err(Error::InvalidMetric(
                        "discrete metric needs c in the interior".into(),
                    ));
                }
            }
            MetricFamily::Scaled { c, .. } => {
                c.check_dim(dim)?;
                needs_coords(&points)?;
                if c.is_zero() || !space.cone().contains(c, tol)? {
                    return Err(Error::InvalidMetric(
                        "scaled metric needs a nonzero c in the cone".into(),
                    ));
                }
            }
            MetricFamily::Componentwise { components } => {
                if space.cone().kind() != FamilyKind::Orthant {
                    return Err(Error::InvalidMetric(
                        "componentwise metrics are defined over an orthant".into(),
                    ));
                }
                if components.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: components.len(),
                    });
                }
                if components
                    .iter()
                    .any(|c| !(c.scale >= 0.0 && c.scale.is_finite()))
                    || components.iter().all(|c| c.scale == 0.0)
                {
                    return Err(Error::InvalidMetric(
                        "component scales must be nonnegative, not all zero".into(),
                    ));
                }
                needs_coords(&points)?;
            }
            MetricFamily::Table { matrix } => {
                if matrix.len() != points.len()
                    || matrix.iter().any(|row| row.len() != points.len())
                {
                    return Err(Error::InvalidMetric(format!(
                        "table must be {n} x {n}",
                        n = points.len()
                    )));
                }
                for v in matrix.iter().flatten() {
                    v.check_dim(dim)?;
                }
            }
        }
        Ok(ConeMetric {
            space,
            points,
            family,
            index,
        })
    }

    pub fn discrete(space: OrderUnitSpace, n: usize, c: Vector) -> Result<Self> {
        let points = (0..n).map(|i| Point::label(format!("p{i}"))).collect();
        ConeMetric::new(space, points, MetricFamily::Discrete { c })
    }

    pub fn scaled(
        space: OrderUnitSpace,
        coords: Vec<Vec<f64>>,
        c: Vector,
        rho: ScalarKind,
    ) -> Result<Self> {
        ConeMetric::new(space, numbered(coords), MetricFamily::Scaled { c, rho })
    }

    pub fn componentwise(
        space: OrderUnitSpace,
        coords: Vec<Vec<f64>>,
        components: Vec<Component>,
    ) -> Result<Self> {
        ConeMetric::new(
            space,
            numbered(coords),
            MetricFamily::Componentwise { components },
        )
    }

    pub fn table(
        space: OrderUnitSpace,
        ids: Vec<String>,
        matrix: Vec<Vec<Vector>>,
    ) -> Result<Self> {
        ConeMetric::new(
            space,
            ids.into_iter().map(Point::label).collect(),
            MetricFamily::Table { matrix },
        )
    }

    pub fn space(&self) -> &OrderUnitSpace {
        &self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn family(&self) -> &MetricFamily {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.points[i].id
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Index of the point whose coordinates are within `tol` (max-norm) of
    /// `coords`, preferring the closest.
    pub fn find_by_coords(&self, coords: &[f64], tol: f64) -> Option<usize> {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(i, p)| {
                let c = p.coords.as_ref()?;
                (c.len() == coords.len()).then(|| (i, ScalarKind::Max.eval(c, coords)))
            })
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    /// Distance vector between the points with indices `i` and `j`.
    pub fn dist(&self, i: usize, j: usize) -> Vector {
        match &self.family {
            MetricFamily::Discrete { c } => {
                if i == j {
                    Vector::zeros(c.dim())
                } else {
                    c.clone()
                }
            }
            MetricFamily::Scaled { c, rho } => c.scale(rho.eval(self.coords(i), self.coords(j))),
            MetricFamily::Componentwise { components } => Vector::from_raw(
                components
                    .iter()
                    .map(|comp| comp.scale * comp.rho.eval(self.coords(i), self.coords(j)))
                    .collect(),
            ),
            MetricFamily::Table { matrix } => matrix[i][j].clone(),
        }
    }

    fn coords(&self, i: usize) -> &[f64] {
        self.points[i]
            .coords
            .as_deref()
            .expect("validated at construction")
    }

    /// Checks identity, symmetry and cone-valuedness on all pairs and the
    /// cone-order triangle inequality `d(x,y) <= d(x,z) + d(y,z)` on all
    /// triples, each with slack `tol`.
    pub fn verify_axioms(&self, tol: f64) -> CheckReport {
        let n = self.len();
        let cone = self.space.cone();
        let dists: Vec<Vec<Vector>> =
            par::map_indices(n, |i| (0..n).map(|j| self.dist(i, j)).collect());
        let inf_norm = |v: &Vector| v.coords().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut violations = par::flat_map_indices(n, |i| {
            let mut out = Vec::new();
            for j in 0..n {
                let d = &dists[i][j];
                let (a, b) = (self.id(i).to_string(), self.id(j).to_string());
                let slack = cone.slack_unchecked(d.coords());
                if slack < -tol {
                    out.push(Violation::new(
                        "nonnegativity",
                        vec![a.clone(), b.clone()],
                        format!("slack {slack:e}"),
                    ));
                }
                let size = inf_norm(d);
                if i == j && size > tol {
                    out.push(Violation::new(
                        "identity",
                        vec![a.clone()],
                        format!("|d(x,x)| = {size:e}"),
                    ));
                }
                if i != j && size == 0.0 {
                    out.push(Violation::new(
                        "identity",
                        vec![a.clone(), b.clone()],
                        "d(x,y) = 0 for x != y",
                    ));
                }
                if i < j {
                    let asym = inf_norm(&(d - &dists[j][i]));
                    if asym > tol {
                        out.push(Violation::new(
                            "symmetry",
                            vec![a.clone(), b.clone()],
                            format!("|d(x,y) - d(y,x)| = {asym:e}"),
                        ));
                    }
                }
                for (z, (diz, djz)) in dists[i].iter().zip(&dists[j]).enumerate() {
                    let gap = &(diz + djz) - d;
                    let s = cone.slack_unchecked(gap.coords());
                    if s < -tol {
                        out.push(Violation::new(
                            "triangle",
                            vec![a.clone(), b.clone(), self.id(z).to_string()],
                            format!("slack {s:e}"),
                        ));
                    }
                }
            }
            out
        });
        violations.sort_by(|a, b| (&a.kind, &a.witness).cmp(&(&b.kind, &b.witness)));
        CheckReport {
            check: "verify_axioms".into(),
            trials: n * n + n * n * n,
            violations,
            boundary_excluded: 0,
        }
    }

    /// Points `y` with `u - d(x, y)` an order unit.
    pub fn ball_lll(&self, x: usize, u: &Vector) -> Result<Vec<usize>> {
        u.check_dim(self.space.dim())?;
        let cone = self.space.cone();
        if !cone.is_order_unit(u, self.space.tol())? {
            return Err(Error::NotOrderUnit);
        }
        let mut out = Vec::new();
        for y in 0..self.len() {
            if cone.is_order_unit_unchecked((u - &self.dist(x, y)).coords(), self.space.tol())? {
                out.push(y);
            }
        }
        Ok(out)
    }
}

fn numbered(coords: Vec<Vec<f64>>) -> Vec<Point> {
    coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| Point::new(format!("p{i}"), c))
        .collect()
}

/// The real metric `p(d(x, y))`, tabulated over the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarizedMetric {
    source: ConeMetric,
    values: Vec<f64>,
}

/// Scalarizes with the default gauge tolerance.
pub fn scalarize(m: &ConeMetric) -> Result<ScalarizedMetric> {
    scalarize_with(m, DEFAULT_GAUGE_REL_TOL)
}

/// Verifies the cone axioms, tabulates `p(d(x, y))` by the gauge route and
/// then checks the ordinary metric axioms on the table. A failure of the
/// latter after the former passed is reported as a route mismatch.
pub fn scalarize_with(m: &ConeMetric, rel_tol: f64) -> Result<ScalarizedMetric> {
    let report = m.verify_axioms(m.space.tol());
    if !report.passed() {
        return Err(Error::AxiomsViolated(report.violations.len()));
    }
    let n = m.len();
    let rows: Vec<Result<Vec<f64>>> = par::map_indices(n, |i| {
        (0..n)
            .map(|j| {
                if i == j {
                    Ok(0.0)
                } else {
                    m.space.gauge_norm(&m.dist(i, j), rel_tol)
                }
            })
            .collect()
    });
    let mut values = Vec::with_capacity(n * n);
    for row in rows {
        values.extend(row?);
    }
    let s = ScalarizedMetric {
        source: m.clone(),
        values,
    };
    if let Some(v) = s.axiom_violations(1e-9).into_iter().next() {
        return Err(Error::RouteMismatch {
            op: "scalarize",
            detail: format!("{}: {}", v.kind, v.detail),
        });
    }
    Ok(s)
}

impl ScalarizedMetric {
    pub fn source(&self) -> &ConeMetric {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Metric axioms of the table with relative slack `tol`.
    pub fn axiom_violations(&self, tol: f64) -> Vec<Violation> {
        let n = self.len();
        let id = |i: usize| self.source.id(i).to_string();
        let mut out = par::flat_map_indices(n, |i| {
            let mut out = Vec::new();
            for j in 0..n {
                let d = self.value(i, j);
                if d < 0.0 || (i == j) != (d == 0.0) {
                    out.push(Violation::new(
                        "identity",
                        vec![id(i), id(j)],
                        format!("d = {d:e}"),
                    ));
                }
                if (d - self.value(j, i)).abs() > tol * d.max(1.0) {
                    out.push(Violation::new("symmetry", vec![id(i), id(j)], ""));
                }
                for z in 0..n {
                    let rhs = self.value(i, z) + self.value(j, z);
                    if d > rhs + tol * rhs.max(1.0) {
                        out.push(Violation::new(
                            "triangle",
                            vec![id(i), id(j), id(z)],
                            format!("{d:e} > {rhs:e}"),
                        ));
                    }
                }
            }
            out
        });
        out.sort_by(|a, b| (&a.kind, &a.witness).cmp(&(&b.kind, &b.witness)));
        out
    }

    /// `{ y : p(d(x, y)) < r }`.
    pub fn ball_scalar(&self, x: usize, r: f64) -> Result<Vec<usize>> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "ball radius must be positive and finite, got {r}"
            )));
        }
        Ok((0..self.len()).filter(|&y| self.value(x, y) < r).collect())
    }
}

/// Compares, for every `y`, membership in `B_⋘(x, μe)`, in
/// `⋃_{r<1} { y : d(x,y) < rμe }` and in the scalar ball of radius `μ`.
/// Points with `|p(d(x,y)) - μ| < band * μ` are excluded and counted.
pub fn ball_identity(s: &ScalarizedMetric, x: usize, mu: f64, band: f64) -> Result<CheckReport> {
    let m = s.source();
    let space = m.space();
    let u = space.unit().scale(mu);
    let order_ball = m.ball_lll(x, &u)?;
    let scalar_ball = s.ball_scalar(x, mu)?;
    let mut report = CheckReport::new(format!("ball_identity(x={}, mu={mu})", m.id(x)));
    for y in 0..m.len() {
        if (s.value(x, y) - mu).abs() < band * mu {
            report.boundary_excluded += 1;
            continue;
        }
        report.trials += 1;
        let in_a = order_ball.binary_search(&y).is_ok();
        let in_c = scalar_ball.binary_search(&y).is_ok();
        let in_b = space.unit_dominance_threshold(&m.dist(x, y).scale(1.0 / mu))? < 1.0;
        if in_a != in_c || in_a != in_b {
            report.violations.push(Violation::new(
                "ball_identity",
                vec![m.id(x).to_string(), m.id(y).to_string()],
                format!("order-unit ball {in_a}, strict-multiple union {in_b}, scalar ball {in_c}"),
            ));
        }
    }
    Ok(report)
}

/// Smallest `k >= 1` with `B_⋘(x, e/k) ⊆ B(x, r)`. Any `k > 1/r` must work,
/// so failing to find one up to `floor(1/r) + 1` is an error.
pub fn ball_inclusion(s: &ScalarizedMetric, x: usize, r: f64) -> Result<usize> {
    let scalar_ball = s.ball_scalar(x, r)?;
    let limit = (1.0 / r).floor() as usize + 1;
    let e = s.source().space().unit();
    for k in 1..=limit {
        let order_ball = s.source().ball_lll(x, &e.scale(1.0 / k as f64))?;
        if order_ball
            .iter()
            .all(|y| scalar_ball.binary_search(y).is_ok())
        {
            return Ok(k);
        }
    }
    Err(Error::RouteMismatch {
        op: "ball_inclusion",
        detail: format!("no k <= {limit} gives an order-unit ball inside the radius-{r} ball"),
    })
}

/// Samples pairs of balls `B_⋘(x_i, u_i)` and checks that every point of
/// their intersection has a ball `B_⋘(y, μe)` with dyadic `μ` inside the
/// intersection; also checks `B_⋘(x, r* e / 2) ⊆ B_⋘(x, u)` with
/// `r* = max { r : re <= u }`.
pub fn basis_check(s: &ScalarizedMetric, trials: usize, seed: u64) -> Result<CheckReport> {
    let m = s.source();
    let space = m.space();
    let n = m.len();
    let scale = s.max_value().max(1e-3);
    let outcomes: Vec<Result<Vec<Violation>>> = par::map_indices(trials, |t| {
        let mut rng = par::stream_rng(seed, t as u64);
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> (usize, Vector) {
            let x = rng.random_range(0..n);
            let u = space.cone().random_order_unit(rng);
            let u = u.scale(scale * rng.random_range(0.2..1.2) / space.norm(&u).unwrap_or(1.0));
            (x, u)
        };
        let (x1, u1) = draw(&mut rng);
        let (x2, u2) = draw(&mut rng);
        let b1 = m.ball_lll(x1, &u1)?;
        let b2 = m.ball_lll(x2, &u2)?;
        let inter: Vec<usize> = b1
            .iter()
            .copied()
            .filter(|y| b2.binary_search(y).is_ok())
            .collect();
        let mut out = Vec::new();
        for &y in &inter {
            let mut found = false;
            for j in -8..=60 {
                let mu = 2f64.powi(-j);
                let ball = m.ball_lll(y, &space.unit().scale(mu))?;
                if ball.iter().all(|z| inter.binary_search(z).is_ok()) {
                    found = true;
                    break;
                }
            }
            if !found {
                out.push(Violation::new(
                    "basis",
                    vec![format!("trial {t}"), m.id(y).to_string()],
                    "no dyadic ball around y fits in the intersection",
                ));
            }
        }
        let r_star = space.max_scale_below(&u1)?;
        if r_star <= 0.0 {
            out.push(Violation::new(
                "unit_scale",
                vec![format!("trial {t}")],
                "max_scale_below(u) = 0 for an order unit",
            ));
        } else {
            let small = m.ball_lll(x1, &space.unit().scale(0.5 * r_star))?;
            if !small.iter().all(|y| b1.binary_search(y).is_ok()) {
                out.push(Violation::new(
                    "unit_ball_inclusion",
                    vec![format!("trial {t}"), m.id(x1).to_string()],
                    format!("B(x, r* e / 2) not inside B(x, u) with r* = {r_star:e}"),
                ));
            }
        }
        Ok(out)
    });
    let mut report = CheckReport::new("basis_check");
    report.trials = trials;
    for o in outcomes {
        report.violations.extend(o?);
    }
    report.normalize();
    Ok(report)
}

/// Norm of a cone-valued sum compared with the sum of norms; used for the
/// sum-inequality transfer `d(a,b) <= Σ d(a_i,b_i)  ⟹  p(d(a,b)) <= Σ p(d(a_i,b_i))`.
pub fn sum_transfer_holds(
    s: &ScalarizedMetric,
    a: usize,
    b: usize,
    pairs: &[(usize, usize)],
    tol: f64,
) -> Result<Option<bool>> {
    let m = s.source();
    let cone = m.space().cone();
    let mut total = Vector::zeros(m.space().dim());
    for &(i, j) in pairs {
        total = &total + &m.dist(i, j);
    }
    let dominated = cone.slack_unchecked((&total - &m.dist(a, b)).coords()) >= -tol;
    if !dominated {
        return Ok(None);
    }
    let rhs: f64 = pairs.iter().map(|&(i, j)| s.value(i, j)).sum();
    Ok(Some(s.value(a, b) <= rhs + 1e-9))
}

/// Default boundary band used by the topology checks.
pub const BOUNDARY_BAND: f64 = DEFAULT_BOUNDARY_BAND;

/// A random table metric on `n` points. With `ρ(x, y) = (3 + |x - y|) / 6`
/// for planar positions in `[-1, 1]^2`, every entry is `ρ w` with
/// `e <= w <= 1.5 e` in the cone order. Since `|x - y| < 3` the scalar `ρ`
/// satisfies `ρ(x,z) + ρ(y,z) >= 1.5 ρ(x,y)`, which gives the cone-order
/// triangle inequality.
pub fn random_table(space: &OrderUnitSpace, n: usize, seed: u64) -> Result<ConeMetric> {
    let mut rng = par::stream_rng(seed, 0);
    let pos: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let e = space.unit();
    let cone = space.cone();
    let mut matrix = vec![vec![Vector::zeros(space.dim()); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let rho = (3.0 + ScalarKind::Euclidean.eval(&pos[i], &pos[j])) / 6.0;
            let k = cone.random_element(&mut rng);
            let pk = space.norm(&k)?;
            let w = if pk > 0.0 {
                e.axpy(rng.random_range(0.0..0.5) / pk, &k)
            } else {
                e.clone()
            };
            let d = w.scale(rho);
            matrix[i][j] = d.clone();
            matrix[j][i] = d;
        }
    }
    let ids = (0..n).map(|i| format!("t{i}")).collect();
    ConeMetric::table(space.clone(), ids, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Cone;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn orthant2() -> OrderUnitSpace {
        OrderUnitSpace::new(Cone::orthant(2).unwrap(), v(&[1.0, 1.0]), 1e-9).unwrap()
    }

    #[test]
    fn discrete_metric_satisfies_axioms() {
        let m = ConeMetric::discrete(orthant2(), 5, v(&[1.0, 2.0])).unwrap();
        assert!(m.verify_axioms(1e-9).passed());
        let single = ConeMetric::discrete(orthant2(), 1, v(&[1.0, 1.0])).unwrap();
        assert!(single.verify_axioms(0.0).passed());
    }

    #[test]
    fn asymmetric_table_is_flagged() {
        let z = v(&[0.0, 0.0]);
        let matrix = vec![vec![z.clone(), v(&[1.0, 1.0])], vec![v(&[2.0, 2.0]), z]];
        let m = ConeMetric::table(orthant2(), vec!["a".into(), "b".into()], matrix).unwrap();
        let report = m.verify_axioms(1e-9);
        assert!(report
            .violations
            .iter()
            .any(|v| v.kind == "symmetry" && v.witness == ["a", "b"]));
        assert_eq!(
            scalarize(&m),
            Err(Error::AxiomsViolated(report.violations.len()))
        );
    }

    #[test]
    fn scalarize_examples() {
        let m = ConeMetric::discrete(orthant2(), 4, v(&[1.0, 1.0])).unwrap();
        let s = scalarize(&m).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.value(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let comps = vec![
            Component {
                rho: ScalarKind::L1,
                scale: 1.0,
            },
            Component {
                rho: ScalarKind::L1,
                scale: 2.0,
            },
        ];
        let m =
            ConeMetric::componentwise(orthant2(), vec![vec![0.0], vec![0.75], vec![-1.5]], comps)
                .unwrap();
        let s = scalarize(&m).unwrap();
        assert!((s.value(1, 2) - 2.0 * 2.25).abs() < 1e-11);
        assert!((s.value(0, 1) - 1.5).abs() < 1e-11);
    }

    #[test]
    fn family_preconditions() {
        assert!(ConeMetric::discrete(orthant2(), 3, v(&[1.0, 0.0])).is_err());
        assert!(
            ConeMetric::scaled(orthant2(), vec![vec![0.0]], v(&[0.0, 0.0]), ScalarKind::L1)
                .is_err()
        );
        let lorentz = OrderUnitSpace::canonical(Cone::lorentz(2).unwrap());
        let comps = vec![
            Component {
                rho: ScalarKind::L1,
                scale: 1.0
            };
            2
        ];
        assert!(ConeMetric::componentwise(lorentz, vec![vec![0.0]], comps).is_err());
        let dup = vec![Point::label("a"), Point::label("a")];
        assert!(ConeMetric::new(
            orthant2(),
            dup,
            MetricFamily::Discrete { c: v(&[1.0, 1.0]) }
        )
        .is_err());
    }

    #[test]
    fn order_unit_ball_examples() {
        let m = ConeMetric::discrete(orthant2(), 4, v(&[1.0, 1.0])).unwrap();
        let e = m.space().unit().clone();
        assert_eq!(m.ball_lll(0, &e.scale(2.0)).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(m.ball_lll(0, &e).unwrap(), vec![0]);
        assert_eq!(m.ball_lll(2, &e.scale(0.01)).unwrap(), vec![2]);
        assert_eq!(m.ball_lll(0, &v(&[1.0, 0.0])), Err(Error::NotOrderUnit));
    }

    #[test]
    fn scalar_ball_examples() {
        let m = ConeMetric::discrete(orthant2(), 4, v(&[1.0, 1.0])).unwrap();
        let s = scalarize(&m).unwrap();
        assert_eq!(s.ball_scalar(1, 1.0).unwrap(), vec![1]);
        assert_eq!(s.ball_scalar(1, 1.5).unwrap().len(), 4);
        assert!(s.ball_scalar(0, f64::INFINITY).is_err());
        assert!(s.ball_scalar(0, 0.0).is_err());
    }

    #[test]
    fn ball_identity_and_inclusion_on_a_line() {
        let coords: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 * 0.037]).collect();
        let m = ConeMetric::scaled(orthant2(), coords, v(&[1.0, 0.5]), ScalarKind::L1).unwrap();
        let s = scalarize(&m).unwrap();
        for mu in [0.1, 0.5, 1.0] {
            let r = ball_identity(&s, 3, mu, BOUNDARY_BAND).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert_eq!(ball_inclusion(&s, 0, 1.0).unwrap(), 1);
        assert!(ball_inclusion(&s, 0, 0.3).unwrap() <= 4);
        let single =
            scalarize(&ConeMetric::discrete(orthant2(), 1, v(&[1.0, 1.0])).unwrap()).unwrap();
        assert_eq!(ball_inclusion(&single, 0, 0.05).unwrap(), 1);
        assert!(ball_identity(&single, 0, 1.0, BOUNDARY_BAND)
            .unwrap()
            .passed());
    }

    /// Scaling distances by 4 and the radius by 1/4 gives the same verdicts.
    #[test]
    fn ball_identity_is_scale_coherent() {
        let coords: Vec<Vec<f64>> = (0..12).map(|i| vec![(i as f64).sqrt()]).collect();
        let small =
            ConeMetric::scaled(orthant2(), coords.clone(), v(&[0.25, 0.25]), ScalarKind::L1)
                .unwrap();
        let big = ConeMetric::scaled(orthant2(), coords, v(&[1.0, 1.0]), ScalarKind::L1).unwrap();
        let (ss, sb) = (scalarize(&small).unwrap(), scalarize(&big).unwrap());
        let a = ball_identity(&ss, 0, 0.25, BOUNDARY_BAND).unwrap();
        let b = ball_identity(&sb, 0, 1.0, BOUNDARY_BAND).unwrap();
        assert!(a.passed() && b.passed());
        assert_eq!(
            small
                .ball_lll(0, &small.space().unit().scale(0.25))
                .unwrap(),
            big.ball_lll(0, big.space().unit()).unwrap()
        );
    }

    #[test]
    fn basis_check_passes_on_discrete_and_table() {
        let m = ConeMetric::discrete(orthant2(), 6, v(&[1.0, 1.0])).unwrap();
        assert!(basis_check(&scalarize(&m).unwrap(), 50, 1)
            .unwrap()
            .passed());
        let t = random_table(&OrderUnitSpace::canonical(Cone::lorentz(3).unwrap()), 12, 4).unwrap();
        assert!(basis_check(&scalarize(&t).unwrap(), 50, 1)
            .unwrap()
            .passed());
    }

    #[test]
    fn json_metric_spec() {
        let json = r#"{
            "space": {"cone": {"family": "orthant", "n": 2}, "e": [1.0, 1.0]},
            "family": "scaled",
            "params": {"c": [1.0, 2.0], "rho": "euclidean"},
            "points": [{"id": "a", "coords": [0.0, 0.0]}, {"id": "b", "coords": [3.0, 4.0]}]
        }"#;
        let m: ConeMetric = serde_json::from_str(json).unwrap();
        assert_eq!(m.dist(0, 1).coords(), &[5.0, 10.0]);
        let table = r#"{
            "space": {"cone": {"family": "orthant", "n": 1}, "e": [1.0]},
            "family": "table",
            "params": {"matrix": [[[0.0], [1.0]], [[1.0], [0.0]]]},
            "points": ["a", "b"]
        }"#;
        let m: ConeMetric = serde_json::from_str(table).unwrap();
        assert_eq!(m.index_of("b").unwrap(), 1);
        assert!(m.index_of("c").is_err());
        let back: ConeMetric = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
