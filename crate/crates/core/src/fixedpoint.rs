//! Cone-order contractions on finite domains and Banach iteration through
//! the scalarized metric.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bisect;
use crate::cones::{Cone, DOMINATION_DOUBLINGS};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::metric::{scalarize, ConeMetric, MetricFamily, ScalarKind, ScalarizedMetric};
use crate::ordernorm::{OrderUnitSpace, DEFAULT_GAUGE_REL_TOL};
use crate::par;

/// `inf { k >= 0 : k u - v ∈ K }`, or `None` when no `k <= 2^60` works.
/// Both arguments must lie in the cone up to the space's tolerance.
pub fn min_dominating_scale(space: &OrderUnitSpace, u: &Vector, v: &Vector) -> Result<Option<f64>> {
    let cone = space.cone();
    let tol = space.tol();
    if !cone.contains(u, tol)? {
        return Err(Error::NotInCone(format!("u = {:?}", u.coords())));
    }
    if !cone.contains(v, tol)? {
        return Err(Error::NotInCone(format!("v = {:?}", v.coords())));
    }
    Ok(min_dominating_scale_unchecked(cone, u.coords(), v.coords()))
}

fn min_dominating_scale_unchecked(cone: &Cone, u: &[f64], v: &[f64]) -> Option<f64> {
    let pred = |k: f64| {
        let w: Vec<f64> = u.iter().zip(v).map(|(a, b)| k * a - b).collect();
        cone.slack_unchecked(&w) >= 0.0
    };
    bisect::inf_nonneg(pred, DEFAULT_GAUGE_REL_TOL, DOMINATION_DOUBLINGS)
}

/// Scale needed for one pair. Image distances below `tol · e` are
/// indistinguishable from zero at the membership tolerance and need none;
/// this is what lets a finite grid carry a contraction whose last point
/// has nowhere exact to go.
fn pair_scale(space: &OrderUnitSpace, u: &[f64], v: &[f64]) -> Option<f64> {
    let e = space.unit().coords();
    let tol = space.tol();
    let rest: Vec<f64> = e.iter().zip(v).map(|(ei, vi)| tol * ei - vi).collect();
    if space.cone().slack_unchecked(&rest) >= 0.0 {
        return Some(0.0);
    }
    min_dominating_scale_unchecked(space.cone(), u, v)
}

/// A self-map of a finite metric domain, given by the index of each image.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionProblem {
    metric: ConeMetric,
    images: Vec<usize>,
    k_claimed: Option<f64>,
}

impl ContractionProblem {
    pub fn new(metric: ConeMetric, images: Vec<usize>, k_claimed: Option<f64>) -> Result<Self> {
        if images.len() != metric.len() {
            return Err(Error::DimensionMismatch {
                expected: metric.len(),
                found: images.len(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&i| i >= metric.len()) {
            return Err(Error::UnknownPoint(format!("image index {bad}")));
        }
        let p = ContractionProblem {
            metric,
            images,
            k_claimed,
        };
        if let Some(k) = k_claimed {
            if !(0.0..1.0).contains(&k) {
                return Err(Error::InvalidInput(format!(
                    "k_claimed must lie in [0, 1), got {k}"
                )));
            }
            if let Some((x, y)) = p.claim_violation(k) {
                return Err(Error::InvalidInput(format!(
                    "k_claimed = {k} fails on the pair ({}, {})",
                    p.metric.id(x),
                    p.metric.id(y)
                )));
            }
        }
        Ok(p)
    }

    /// Builds the map `x ↦ T(x)` by coordinates: each image is matched to
    /// the nearest domain point within `snap` in the max norm.
    pub fn from_fn(
        metric: ConeMetric,
        map: impl Fn(&[f64]) -> Vec<f64>,
        snap: f64,
        k_claimed: Option<f64>,
    ) -> Result<Self> {
        let images = metric
            .points()
            .iter()
            .map(|p| {
                let coords = p.coords.as_deref().ok_or_else(|| {
                    Error::InvalidInput(format!("point {} has no coordinates", p.id))
                })?;
                let image = map(coords);
                metric.find_by_coords(&image, snap).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "image of {} at {image:?} is not in the domain",
                        p.id
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ContractionProblem::new(metric, images, k_claimed)
    }

    pub fn metric(&self) -> &ConeMetric {
        &self.metric
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn k_claimed(&self) -> Option<f64> {
        self.k_claimed
    }

    pub fn image(&self, x: usize) -> usize {
        self.images[x]
    }

    fn claim_violation(&self, k: f64) -> Option<(usize, usize)> {
        let space = self.metric.space();
        let n = self.metric.len();
        par::flat_map_indices(n, |x| {
            ((x + 1)..n)
                .filter(|&y| {
                    let d = self.metric.dist(x, y);
                    let dt = self.metric.dist(self.images[x], self.images[y]);
                    let w = &d.scale(k) - &dt;
                    space.cone().slack_unchecked(w.coords()) < -space.tol()
                })
                .map(|y| (x, y))
                .collect()
        })
        .into_iter()
        .next()
    }

    /// Verifies the scalar transfer `d̄(Tx, Ty) <= k d̄(x, y) + slack` on all
    /// pairs and returns the offending pairs.
    pub fn scalar_transfer_violations(
        &self,
        s: &ScalarizedMetric,
        k: f64,
        slack: f64,
    ) -> Vec<(usize, usize)> {
        let n = self.metric.len();
        par::flat_map_indices(n, |x| {
            ((x + 1)..n)
                .filter(|&y| s.value(self.images[x], self.images[y]) > k * s.value(x, y) + slack)
                .map(|y| (x, y))
                .collect()
        })
    }
}

/// Largest pairwise dominating scale `d(Tx, Ty) <= k d(x, y)` over distinct
/// pairs, or `None` when some pair is not dominated at all. Pairs whose
/// image distance is below the membership tolerance contribute nothing.
pub fn estimate_contraction(p: &ContractionProblem) -> Option<f64> {
    let m = &p.metric;
    let space = m.space();
    let n = m.len();
    let per_row = par::map_indices(n, |x| {
        let mut worst = 0.0f64;
        for y in (x + 1)..n {
            let d = m.dist(x, y);
            let dt = m.dist(p.images[x], p.images[y]);
            worst = worst.max(pair_scale(space, d.coords(), dt.coords())?);
        }
        Some(worst)
    });
    per_row
        .into_iter()
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BanachOutcome {
    pub fixed_point: String,
    /// Number of applications of the map.
    pub iterations: usize,
    pub k: f64,
    pub iterates: Vec<String>,
    /// `k^n / (1 - k) · d̄(x_0, x_1)` for each recorded iterate.
    pub bound_trace: Vec<f64>,
    #[serde(skip)]
    pub fixed_index: usize,
    #[serde(skip)]
    pub iterate_indices: Vec<usize>,
}

/// Iterates `x_{n+1} = T(x_n)` until the a-posteriori estimate
/// `d̄(x_n, x_{n+1}) k / (1 - k)` drops below `tol`.
pub fn banach_iterate(
    p: &ContractionProblem,
    x0: usize,
    tol: f64,
    max_iter: usize,
) -> Result<BanachOutcome> {
    let s = scalarize(&p.metric)?;
    banach_iterate_with(p, &s, x0, tol, max_iter)
}

/// [`banach_iterate`] with a precomputed scalarization of the problem's metric.
pub fn banach_iterate_with(
    p: &ContractionProblem,
    s: &ScalarizedMetric,
    x0: usize,
    tol: f64,
    max_iter: usize,
) -> Result<BanachOutcome> {
    if x0 >= p.metric.len() {
        return Err(Error::UnknownPoint(format!("index {x0}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let k = if p.metric.len() < 2 {
        0.0
    } else {
        match estimate_contraction(p) {
            Some(k) if k < 1.0 => k,
            other => return Err(Error::NotContraction(other)),
        }
    };
    let stop = tol * (1.0 - k) / k.max(1e-300);
    let d01 = s.value(x0, p.images[x0]);
    let mut iterates = vec![x0];
    let mut x = x0;
    let mut done = None;
    for n in 0..max_iter {
        let next = p.images[x];
        let d = s.value(x, next);
        if d == 0.0 {
            done = Some(n);
            break;
        }
        iterates.push(next);
        x = next;
        if d < stop {
            done = Some(n + 1);
            break;
        }
    }
    let Some(iterations) = done else {
        return Err(Error::MaxIterExhausted {
            max_iter,
            best: p.metric.id(x).to_string(),
        });
    };
    let bound_trace = (0..iterates.len())
        .map(|n| k.powi(n as i32) / (1.0 - k) * d01)
        .collect();
    Ok(BanachOutcome {
        fixed_point: p.metric.id(x).to_string(),
        iterations,
        k,
        iterates: iterates
            .iter()
            .map(|&i| p.metric.id(i).to_string())
            .collect(),
        bound_trace,
        fixed_index: x,
        iterate_indices: iterates,
    })
}

/// Sampled lower bound on the normality constant of `cone` for the
/// Euclidean norm: the largest `|x| / |x + w|` over random `x, w ∈ K`.
pub fn normality_constant(cone: &Cone, samples: usize, seed: u64) -> f64 {
    use rand::Rng;
    par::map_indices(samples, |i| {
        let mut rng = par::stream_rng(seed, i as u64);
        let x = cone.random_element(&mut rng);
        let t: f64 = rng.random_range(0.0..2.0);
        let w = cone.random_element(&mut rng).scale(t);
        let y = &x + &w;
        let ny = y.norm();
        if ny > 0.0 {
            x.norm() / ny
        } else {
            0.0
        }
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// `(I - A)^{-1} b`, or `None` when `I - A` is singular.
pub fn affine_fixed_point(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return None;
    }
    let m = DMatrix::from_fn(n, n, |i, j| f64::from(i == j) - a[i][j]);
    let x = m.lu().solve(&DVector::from_column_slice(b))?;
    Some(x.iter().copied().collect())
}

fn apply_affine(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(row, bi)| row.iter().zip(x).map(|(r, xi)| r * xi).sum::<f64>() + bi)
        .collect()
}

/// The halving map on `{0} ∪ {2^-j : 0 <= j <= depth}` with distance
/// `|x - y| (1, 1)` in the orthant of the plane. The smallest grid point is
/// mapped to `0`, which raises the contraction factor above `1/2` by about
/// `2^-depth / tol`.
pub fn dyadic_halving(depth: u32) -> Result<(ContractionProblem, usize)> {
    let space = OrderUnitSpace::canonical(Cone::orthant(2)?);
    let coords: Vec<Vec<f64>> = std::iter::once(vec![0.0])
        .chain((0..=depth).map(|j| vec![0.5f64.powi(j as i32)]))
        .collect();
    let ids: Vec<String> = std::iter::once("zero".to_string())
        .chain((0..=depth).map(|j| format!("d{j}")))
        .collect();
    let points = ids
        .iter()
        .zip(coords)
        .map(|(id, c)| crate::metric::Point::new(id.clone(), c))
        .collect();
    let family = MetricFamily::Scaled {
        c: Vector::new(vec![1.0, 1.0])?,
        rho: ScalarKind::L1,
    };
    let metric = ConeMetric::new(space, points, family)?;
    let n = metric.len();
    let images = (0..n)
        .map(|i| if i == 0 || i + 1 == n { 0 } else { i + 1 })
        .collect();
    Ok((ContractionProblem::new(metric, images, None)?, 0))
}

/// An affine contraction of the plane restricted to an orbit of `x0` and
/// its analytic fixed point, under `d(x, y) = |x - y|_∞ (1, 1)`. Returns
/// the problem, the index of the fixed point and the index of `x0`.
pub fn affine_orbit(
    a: &[Vec<f64>],
    b: &[f64],
    x0: &[f64],
    steps: usize,
    snap: f64,
) -> Result<(ContractionProblem, usize, usize)> {
    let fixed =
        affine_fixed_point(a, b).ok_or_else(|| Error::InvalidInput("I - A is singular".into()))?;
    if x0.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            found: x0.len(),
        });
    }
    let mut coords = vec![x0.to_vec()];
    for _ in 0..steps {
        let next = apply_affine(a, b, coords.last().expect("nonempty"));
        if ScalarKind::Max.eval(&next, &fixed) <= snap {
            break;
        }
        coords.push(next);
    }
    let fixed_index = coords.len();
    coords.push(fixed);
    let mut ids: Vec<String> = (0..fixed_index).map(|i| format!("x{i}")).collect();
    ids.push("fixed".into());
    let points = ids
        .into_iter()
        .zip(coords)
        .map(|(id, c)| crate::metric::Point::new(id, c))
        .collect();
    let space = OrderUnitSpace::canonical(Cone::orthant(2)?);
    let family = MetricFamily::Scaled {
        c: Vector::new(vec![1.0, 1.0])?,
        rho: ScalarKind::Max,
    };
    let metric = ConeMetric::new(space, points, family)?;
    let problem = ContractionProblem::from_fn(metric, |x| apply_affine(a, b, x), snap, None)?;
    Ok((problem, fixed_index, 0))
}

/// The affine demo map `A = [[0.5, 0.25], [-0.25, 0.25]]`, `b = (1, -0.5)`,
/// started at `(4, 3)`. Its max-norm contraction factor is `0.75`.
pub fn affine_demo() -> Result<(ContractionProblem, usize, usize)> {
    let a = vec![vec![0.5, 0.25], vec![-0.25, 0.25]];
    affine_orbit(&a, &[1.0, -0.5], &[4.0, 3.0], 400, 1e-12)
}

fn default_snap() -> f64 {
    1e-9
}

fn default_depth() -> u32 {
    DEFAULT_DYADIC_DEPTH
}

pub const DEFAULT_DYADIC_DEPTH: u32 = 60;

fn default_steps() -> usize {
    400
}

/// JSON problem description, tagged by `"kind"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Explicit images by point identifier.
    Table {
        metric: ConeMetric,
        images: BTreeMap<String, String>,
        #[serde(default)]
        k_claimed: Option<f64>,
    },
    /// `T(x) = A x + b` on a metric with coordinates, snapped to the domain.
    Affine {
        metric: ConeMetric,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default = "default_snap")]
        snap: f64,
        #[serde(default)]
        k_claimed: Option<f64>,
    },
    /// The halving map on a dyadic grid.
    DyadicHalving {
        #[serde(default = "default_depth")]
        depth: u32,
    },
    /// An affine map on the orbit of `x0` plus the analytic fixed point.
    AffineOrbit {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        x0: Vec<f64>,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default = "default_snap")]
        snap: f64,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<ContractionProblem> {
        match self {
            ProblemSpec::Table {
                metric,
                images,
                k_claimed,
            } => {
                let mut idx = vec![None; metric.len()];
                for (from, to) in images {
                    idx[metric.index_of(from)?] = Some(metric.index_of(to)?);
                }
                let images = idx
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.ok_or_else(|| {
                            Error::InvalidInput(format!("no image for {}", metric.id(i)))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ContractionProblem::new(metric.clone(), images, *k_claimed)
            }
            ProblemSpec::Affine {
                metric,
                a,
                b,
                snap,
                k_claimed,
            } => {
                let dim = b.len();
                if a.len() != dim || a.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidInput(
                        "A must be square with the size of b".into(),
                    ));
                }
                ContractionProblem::from_fn(
                    metric.clone(),
                    |x| apply_affine(a, b, x),
                    *snap,
                    *k_claimed,
                )
            }
            ProblemSpec::DyadicHalving { depth } => Ok(dyadic_halving(*depth)?.0),
            ProblemSpec::AffineOrbit {
                a,
                b,
                x0,
                steps,
                snap,
            } => Ok(affine_orbit(a, b, x0, *steps, *snap)?.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn orthant2() -> OrderUnitSpace {
        OrderUnitSpace::canonical(Cone::orthant(2).unwrap())
    }

    fn line(xs: &[f64]) -> ConeMetric {
        let coords = xs.iter().map(|x| vec![*x]).collect();
        ConeMetric::scaled(orthant2(), coords, v(&[1.0, 1.0]), ScalarKind::L1).unwrap()
    }

    #[test]
    fn dominating_scale_examples() {
        let s = orthant2();
        let k = min_dominating_scale(&s, &v(&[1.0, 1.0]), &v(&[0.5, 0.25]))
            .unwrap()
            .unwrap();
        assert!((k - 0.5).abs() < 1e-11);
        assert_eq!(
            min_dominating_scale(&s, &v(&[1.0, 1.0]), &v(&[0.0, 0.0])).unwrap(),
            Some(0.0)
        );
        assert_eq!(
            min_dominating_scale(&s, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(),
            None
        );
        assert!(min_dominating_scale(&s, &v(&[-1.0, 0.0]), &v(&[0.0, 1.0])).is_err());
        let a = min_dominating_scale(&s, &v(&[3.0, 2.0]), &v(&[1.0, 1.5]))
            .unwrap()
            .unwrap();
        let b = min_dominating_scale(&s, &v(&[6.0, 4.0]), &v(&[2.0, 3.0]))
            .unwrap()
            .unwrap();
        assert!((a - 0.75).abs() < 1e-11 && (a - b).abs() < 1e-11);
    }

    #[test]
    fn contraction_estimates() {
        let xs = [0.0, 1.0, 2.0, 4.0];
        let id = ContractionProblem::new(line(&xs), vec![0, 1, 2, 3], None).unwrap();
        assert!(estimate_contraction(&id).unwrap() >= 1.0);
        let reflect = ContractionProblem::from_fn(
            line(&[0.0, 1.0, 3.0, 4.0]),
            |x| vec![4.0 - x[0]],
            1e-12,
            None,
        )
        .unwrap();
        assert_eq!(reflect.images(), &[3, 2, 1, 0]);
        assert!(estimate_contraction(&reflect).unwrap() >= 1.0);
        assert!(ContractionProblem::from_fn(line(&xs), |x| vec![x[0] / 2.0], 1e-12, None).is_err());
        let constant = ContractionProblem::new(line(&xs), vec![2; 4], Some(0.0)).unwrap();
        assert_eq!(estimate_contraction(&constant), Some(0.0));
        assert!(ContractionProblem::new(line(&xs), vec![0, 1, 2, 3], Some(0.5)).is_err());
        assert!(matches!(
            banach_iterate(&id, 0, 1e-8, 10),
            Err(Error::NotContraction(_))
        ));
    }

    #[test]
    fn halving_on_the_dyadic_grid() {
        let (p, fixed) = dyadic_halving(DEFAULT_DYADIC_DEPTH).unwrap();
        let k = estimate_contraction(&p).unwrap();
        assert!((0.5..0.5 + 1e-9).contains(&k), "k = {k}");
        let s = scalarize(p.metric()).unwrap();
        let x0 = p.metric().index_of("d0").unwrap();
        let out = banach_iterate_with(&p, &s, x0, 1e-8, 1000).unwrap();
        assert!(s.value(out.fixed_index, fixed) < 1e-8);
        // b_n = 0.5^n / 0.5 · 0.5 = 0.5^n.
        for (n, (&x, b)) in out.iterate_indices.iter().zip(&out.bound_trace).enumerate() {
            assert!((b - 0.5f64.powi(n as i32)).abs() < 1e-6 * b);
            assert!(s.value(x, fixed) <= b * (1.0 + 1e-6));
        }
        assert!(p.scalar_transfer_violations(&s, k, 1e-9).is_empty());
        let at_zero = banach_iterate_with(&p, &s, fixed, 1e-8, 10).unwrap();
        assert_eq!((at_zero.iterations, at_zero.fixed_index), (0, fixed));
    }

    #[test]
    fn affine_demo_reaches_the_linear_solve() {
        let (p, fixed, x0) = affine_demo().unwrap();
        let k = estimate_contraction(&p).unwrap();
        assert!(k <= 0.75 + 1e-9);
        let out = banach_iterate(&p, x0, 1e-8, 10_000).unwrap();
        let got = p.metric().points()[out.fixed_index].coords.clone().unwrap();
        // (I - A) x = b by hand: [[0.5, -0.25], [0.25, 0.75]] x = (1, -0.5).
        let det = 0.5 * 0.75 + 0.25 * 0.25;
        let want = [
            (0.75 * 1.0 + 0.25 * -0.5) / det,
            (0.5 * -0.5 - 0.25 * 1.0) / det,
        ];
        assert!(
            ScalarKind::Max.eval(&got, &want) < 1e-8,
            "{got:?} vs {want:?}"
        );
        let s = scalarize(p.metric()).unwrap();
        assert!(s.value(out.fixed_index, fixed) < 1e-8);
        assert!(p.scalar_transfer_violations(&s, k, 1e-9).is_empty());
    }

    #[test]
    fn exhaustion_reports_the_last_iterate() {
        let (p, _, x0) = affine_demo().unwrap();
        match banach_iterate(&p, x0, 1e-8, 2) {
            Err(Error::MaxIterExhausted { max_iter: 2, best }) => assert_eq!(best, "x2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn normality_of_the_orthant() {
        let c = normality_constant(&Cone::orthant(3).unwrap(), 2000, 1);
        assert!(c <= 1.0 + 1e-9 && c > 0.0);
        assert_eq!(c, normality_constant(&Cone::orthant(3).unwrap(), 2000, 1));
    }

    #[test]
    fn table_problem_from_json() {
        let spec = r#"{
            "kind": "table",
            "metric": {"space": {"cone": {"family": "orthant", "n": 2}, "e": [1, 1]},
                       "family": "discrete", "params": {"c": [1, 1]}, "points": ["a", "b"]},
            "images": {"a": "a", "b": "a"}
        }"#;
        let p = serde_json::from_str::<ProblemSpec>(spec)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(estimate_contraction(&p), Some(0.0));
        let out = banach_iterate(&p, 1, 1e-8, 10).unwrap();
        assert_eq!(out.fixed_point, "a");
    }
}
