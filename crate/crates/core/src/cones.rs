//! Closed, pointed, full-dimensional cones in `R^n`.
//!
//! Four families are supported: the nonnegative orthant, the Lorentz
//! (second-order) cone `{x : x_0 >= |x_rest|}`, the cone of positive
//! semidefinite matrices in packed coordinates (see [`crate::linalg`]), and
//! polyhedral cones `{x : <f_i, x> >= 0}` given by dual generators `f_i`.
//!
//! Every family is reduced to a single concave, positively homogeneous
//! *slack* function: the minimum of its defining inequalities. Membership,
//! interior membership and order-unit detection are all read off the slack.

use nalgebra::{Cholesky, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bisect;
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::par;

/// Tolerance used by the Archimedean spot check when deciding membership.
pub const ARCHIMEDEAN_TOL: f64 = 1e-9;

/// Largest multiplier tried when testing domination by a multiple of `e`.
pub(crate) const DOMINATION_DOUBLINGS: u32 = 60;

#[derive(Clone, Debug, PartialEq)]
enum Family {
    Orthant,
    Lorentz,
    Psd { order: usize },
    Polyhedral(Polyhedral),
}

#[derive(Clone, Debug, PartialEq)]
struct Polyhedral {
    gens: Vec<Vector>,
    norms: Vec<f64>,
    interior: Vector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Orthant,
    Lorentz,
    Psd,
    Polyhedral,
}

/// A concrete cone together with its ambient dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeSpec", into = "ConeSpec")]
pub struct Cone {
    family: Family,
    dim: usize,
}

/// JSON form of a cone. For `psd`, `n` is the matrix order `k` and the
/// ambient dimension is `k(k+1)/2`; for the other families `n` is the
/// ambient dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub family: FamilyKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_gens: Option<Vec<Vec<f64>>>,
}

impl TryFrom<ConeSpec> for Cone {
    type Error = Error;

    fn try_from(spec: ConeSpec) -> Result<Self> {
        match spec.family {
            FamilyKind::Orthant => Cone::orthant(spec.n),
            FamilyKind::Lorentz => Cone::lorentz(spec.n),
            FamilyKind::Psd => Cone::psd(spec.n),
            FamilyKind::Polyhedral => {
                let gens = spec.dual_gens.ok_or_else(|| {
                    Error::InvalidCone("polyhedral cone needs `dual_gens`".into())
                })?;
                let gens = gens
                    .into_iter()
                    .map(Vector::new)
                    .collect::<Result<Vec<_>>>()?;
                if let Some(g) = gens.iter().find(|g| g.dim() != spec.n) {
                    return Err(Error::DimensionMismatch {
                        expected: spec.n,
                        found: g.dim(),
                    });
                }
                Cone::polyhedral(gens)
            }
        }
    }
}

impl From<Cone> for ConeSpec {
    fn from(cone: Cone) -> Self {
        let (family, n, dual_gens) = match &cone.family {
            Family::Orthant => (FamilyKind::Orthant, cone.dim, None),
            Family::Lorentz => (FamilyKind::Lorentz, cone.dim, None),
            Family::Psd { order } => (FamilyKind::Psd, *order, None),
            Family::Polyhedral(p) => (
                FamilyKind::Polyhedral,
                cone.dim,
                Some(p.gens.iter().map(|g| g.coords().to_vec()).collect()),
            ),
        };
        ConeSpec {
            family,
            n,
            dual_gens,
        }
    }
}

impl Cone {
    pub fn orthant(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCone(
                "orthant dimension must be positive".into(),
            ));
        }
        Ok(Cone {
            family: Family::Orthant,
            dim: n,
        })
    }

    pub fn lorentz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCone(
                "Lorentz cone needs dimension >= 2".into(),
            ));
        }
        Ok(Cone {
            family: Family::Lorentz,
            dim: n,
        })
    }

    /// Cone of `k x k` positive semidefinite matrices.
    pub fn psd(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCone(
                "PSD matrix order must be positive".into(),
            ));
        }
        Ok(Cone {
            family: Family::Psd { order: k },
            dim: linalg::packed_len(k),
        })
    }

    /// `{x : <f_i, x> >= 0 for all i}`. The generators must have full rank
    /// and the cone must have nonempty interior; redundant generators are
    /// allowed.
    pub fn polyhedral(gens: Vec<Vector>) -> Result<Self> {
        let first = gens.first().ok_or_else(|| {
            Error::InvalidCone("polyhedral cone needs at least one dual generator".into())
        })?;
        let dim = first.dim();
        for g in &gens {
            g.check_dim(dim)?;
        }
        if gens.iter().any(|g| g.is_zero()) {
            return Err(Error::InvalidCone("zero dual generator".into()));
        }
        let mat = DMatrix::from_fn(gens.len(), dim, |i, j| gens[i][j]);
        let rank = mat.rank(1e-10 * mat.norm().max(1.0));
        if rank < dim {
            return Err(Error::InvalidCone(format!(
                "dual generators have rank {rank} < {dim}; the cone would not be pointed"
            )));
        }
        let norms: Vec<f64> = gens.iter().map(Vector::norm).collect();
        let interior = find_interior_point(&gens, &norms)
            .ok_or_else(|| Error::InvalidCone("polyhedral cone has empty interior".into()))?;
        Ok(Cone {
            family: Family::Polyhedral(Polyhedral {
                gens,
                norms,
                interior,
            }),
            dim,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> FamilyKind {
        match self.family {
            Family::Orthant => FamilyKind::Orthant,
            Family::Lorentz => FamilyKind::Lorentz,
            Family::Psd { .. } => FamilyKind::Psd,
            Family::Polyhedral(_) => FamilyKind::Polyhedral,
        }
    }

    /// Short human-readable label, e.g. `lorentz(3)`.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Orthant => format!("orthant({})", self.dim),
            Family::Lorentz => format!("lorentz({})", self.dim),
            Family::Psd { order } => format!("psd({order})"),
            Family::Polyhedral(p) => format!("polyhedral({}x{})", p.gens.len(), self.dim),
        }
    }

    pub fn dual_gens(&self) -> Option<&[Vector]> {
        match &self.family {
            Family::Polyhedral(p) => Some(&p.gens),
            _ => None,
        }
    }

    /// A fixed interior point: the all-ones vector, `(1, 0, ..., 0)`, the
    /// packed identity, or a well-centred interior point of a polyhedral cone.
    pub fn canonical_unit(&self) -> Vector {
        match &self.family {
            Family::Orthant => Vector::from_raw(vec![1.0; self.dim]),
            Family::Lorentz => Vector::basis(self.dim, 0),
            Family::Psd { order } => linalg::pack(&DMatrix::identity(*order, *order)),
            Family::Polyhedral(p) => p.interior.clone(),
        }
    }

    /// Minimum over the defining inequalities. Nonnegative exactly on the
    /// cone and positive exactly on its interior.
    pub fn slack(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(self.slack_unchecked(x.coords()))
    }

    pub(crate) fn slack_unchecked(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Orthant => x.iter().copied().fold(f64::INFINITY, f64::min),
            Family::Lorentz => x[0] - linalg::norm(&x[1..]),
            Family::Psd { order } => linalg::sym_eigen_extremes(&linalg::unpack(x, *order)).0,
            Family::Polyhedral(p) => p
                .gens
                .iter()
                .zip(&p.norms)
                .map(|(g, n)| linalg::dot(g.coords(), x) / n)
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        Ok(self.slack(x)? >= -tol)
    }

    pub fn interior_contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        Ok(self.slack(x)? > tol)
    }

    /// Whether `e` is an order unit, decided through interior membership.
    /// For polyhedral cones the unnormalised dual-side test
    /// `<f_i, e> > tol * |f_i|` is evaluated as well and must agree.
    pub fn is_order_unit(&self, e: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        e.check_dim(self.dim)?;
        self.is_order_unit_unchecked(e.coords(), tol)
    }

    pub(crate) fn is_order_unit_unchecked(&self, e: &[f64], tol: f64) -> Result<bool> {
        if e.iter().all(|c| *c == 0.0) {
            return Ok(false);
        }
        let primal = self.slack_unchecked(e) > tol;
        if let Family::Polyhedral(p) = &self.family {
            let dual = p
                .gens
                .iter()
                .zip(&p.norms)
                .all(|(g, n)| linalg::dot(g.coords(), e) > tol * n);
            if dual != primal {
                return Err(Error::RouteMismatch {
                    op: "is_order_unit",
                    detail: format!("normalized test gives {primal}, dual-side test gives {dual}"),
                });
            }
        }
        Ok(primal)
    }

    /// Order-unit test straight from the definition: `e` is a nonzero element
    /// of the cone and every coordinate direction `±b_i` is dominated by some
    /// multiple `λe` with `λ <= 2^60`. Domination of the `2n` directions
    /// implies domination of every vector.
    pub fn dominates_every_direction(&self, e: &Vector) -> Result<bool> {
        e.check_dim(self.dim)?;
        if e.is_zero() || self.slack_unchecked(e.coords()) < 0.0 {
            return Ok(false);
        }
        for i in 0..self.dim {
            for sign in [1.0, -1.0] {
                let dominated = bisect::inf_nonneg(
                    |lam| {
                        let mut v = e.scale(lam).into_coords();
                        v[i] -= sign;
                        self.slack_unchecked(&v) >= 0.0
                    },
                    1e-3,
                    DOMINATION_DOUBLINGS,
                );
                if dominated.is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `sup { f(x) : f in K*, f(e) = 1 }`, the largest value of `x` over the
    /// states normalised at `e`.
    pub fn dual_sup(&self, e: &Vector, x: &Vector) -> Result<f64> {
        e.check_dim(self.dim)?;
        x.check_dim(self.dim)?;
        if !self.is_order_unit_unchecked(e.coords(), 0.0)? {
            return Err(Error::NotOrderUnit);
        }
        Ok(self.dual_sup_unchecked(e.coords(), x.coords()))
    }

    pub(crate) fn dual_sup_unchecked(&self, e: &[f64], x: &[f64]) -> f64 {
        match &self.family {
            Family::Orthant => x
                .iter()
                .zip(e)
                .map(|(xi, ei)| xi / ei)
                .fold(f64::NEG_INFINITY, f64::max),
            Family::Lorentz => lorentz_dual_sup(e, x),
            Family::Psd { order } => psd_dual_sup(e, x, *order),
            Family::Polyhedral(p) => p
                .gens
                .iter()
                .map(|g| linalg::dot(g.coords(), x) / linalg::dot(g.coords(), e))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// A unit-norm functional `f` in the dual cone together with `f(y)`,
    /// chosen to make `f(y)` large. A positive value certifies `y ∉ -K`.
    pub fn separation_witness(&self, y: &Vector) -> Result<(Vector, f64)> {
        y.check_dim(self.dim)?;
        let f = match &self.family {
            Family::Orthant => {
                let (i, _) = y
                    .coords()
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .expect("non-empty");
                Vector::basis(self.dim, i)
            }
            Family::Lorentz => {
                let rest = &y.coords()[1..];
                let n = linalg::norm(rest);
                let mut f = vec![std::f64::consts::FRAC_1_SQRT_2; 1];
                if n > 0.0 {
                    f.extend(rest.iter().map(|r| r / n * std::f64::consts::FRAC_1_SQRT_2));
                } else {
                    f[0] = 1.0;
                    f.extend(std::iter::repeat_n(0.0, self.dim - 1));
                }
                Vector::from_raw(f)
            }
            Family::Psd { order } => {
                let (_, v) = linalg::sym_top_eigenpair(&linalg::unpack(y.coords(), *order));
                let v = nalgebra::DVector::from_vec(v);
                linalg::pack(&(&v * v.transpose()))
            }
            Family::Polyhedral(p) => {
                let (i, _) = p
                    .gens
                    .iter()
                    .zip(&p.norms)
                    .map(|(g, n)| g.dot(y) / n)
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty");
                p.gens[i].scale(1.0 / p.norms[i])
            }
        };
        let value = f.dot(y);
        Ok((f, value))
    }

    /// A random element of the cone, occasionally on its boundary.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        match &self.family {
            Family::Orthant => Vector::from_raw(
                (0..self.dim)
                    .map(|_| {
                        if rng.random_bool(0.1) {
                            0.0
                        } else {
                            rng.sample::<f64, _>(StandardNormal).abs()
                        }
                    })
                    .collect(),
            ),
            Family::Lorentz => {
                let rest: Vec<f64> = (0..self.dim - 1)
                    .map(|_| rng.sample(StandardNormal))
                    .collect();
                let lift = if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.sample::<f64, _>(StandardNormal).abs()
                };
                let mut v = vec![linalg::norm(&rest) + lift];
                v.extend(rest);
                Vector::from_raw(v)
            }
            Family::Psd { order } => {
                let k = *order;
                let rank = rng.random_range(1..=k);
                let g = DMatrix::from_fn(k, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
                linalg::pack(&(&g * g.transpose()))
            }
            Family::Polyhedral(p) => {
                let z = random_vector(self.dim, rng);
                let shift = self.dual_sup_unchecked(p.interior.coords(), (-&z).coords());
                let lift = if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.sample::<f64, _>(StandardNormal).abs()
                };
                z.axpy(shift + lift, &p.interior)
            }
        }
    }

    /// A random positive functional normalised so that `f(e) = 1`.
    pub(crate) fn random_state<R: Rng + ?Sized>(&self, e: &[f64], rng: &mut R) -> Vector {
        let dirichlet = |m: usize, rng: &mut R| -> Vec<f64> {
            let w: Vec<f64> = (0..m).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| x / total).collect()
        };
        let raw = match &self.family {
            Family::Orthant => {
                let w = dirichlet(self.dim, rng);
                return Vector::from_raw(w.iter().zip(e).map(|(wi, ei)| wi / ei).collect());
            }
            Family::Polyhedral(p) => {
                let w = dirichlet(p.gens.len(), rng);
                let mut f = vec![0.0; self.dim];
                for (wi, g) in w.iter().zip(&p.gens) {
                    let s = wi / linalg::dot(g.coords(), e);
                    for (fj, gj) in f.iter_mut().zip(g.coords()) {
                        *fj += s * gj;
                    }
                }
                return Vector::from_raw(f);
            }
            Family::Lorentz => {
                let theta = random_vector(self.dim - 1, rng);
                let radius = if rng.random_bool(0.5) {
                    1.0
                } else {
                    rng.random::<f64>()
                };
                let scale = radius / theta.norm().max(f64::MIN_POSITIVE);
                let mut f = vec![1.0];
                f.extend(theta.coords().iter().map(|c| c * scale));
                f
            }
            Family::Psd { order } => {
                let k = *order;
                let rank = if rng.random_bool(0.5) { 1 } else { k };
                let g = DMatrix::from_fn(k, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
                linalg::pack(&(&g * g.transpose())).into_coords()
            }
        };
        let norm = linalg::dot(&raw, e);
        Vector::from_raw(raw.into_iter().map(|c| c / norm).collect())
    }

    /// A random order unit: the canonical unit plus a random cone element.
    pub fn random_order_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        let w = self.random_element(rng);
        let s: f64 = rng.random_range(0.0..2.0);
        self.canonical_unit().axpy(s, &w)
    }
}

impl Vector {
    pub(crate) fn into_coords(self) -> Vec<f64> {
        self.into()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "tolerance must be finite and nonnegative, got {tol}"
        )))
    }
}

/// Standard normal coordinates.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    Vector::from_raw((0..dim).map(|_| rng.sample(StandardNormal)).collect())
}

/// Perceptron for a strictly feasible point of `<f_i, x> > 0`, followed by
/// a subgradient pass that pushes up the smallest normalised margin.
fn find_interior_point(gens: &[Vector], norms: &[f64]) -> Option<Vector> {
    let dim = gens[0].dim();
    let unit: Vec<Vec<f64>> = gens
        .iter()
        .zip(norms)
        .map(|(g, n)| g.coords().iter().map(|c| c / n).collect())
        .collect();
    let margin = |x: &[f64]| -> (usize, f64) {
        unit.iter()
            .map(|u| linalg::dot(u, x))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty")
    };

    let mut x: Vec<f64> = vec![0.0; dim];
    for u in &unit {
        for (xi, ui) in x.iter_mut().zip(u) {
            *xi += ui;
        }
    }
    let mut updates = 0usize;
    loop {
        let (i, m) = margin(&x);
        if m > 0.0 {
            break;
        }
        updates += 1;
        if updates > 200_000 {
            return None;
        }
        for (xi, ui) in x.iter_mut().zip(&unit[i]) {
            *xi += ui;
        }
    }

    let normalize = |v: &mut Vec<f64>| {
        let n = linalg::norm(v);
        v.iter_mut().for_each(|c| *c /= n);
    };
    normalize(&mut x);
    let mut best = x.clone();
    let mut best_margin = margin(&best).1;
    for t in 0..2000 {
        let (i, _) = margin(&x);
        let step = 0.5 / (1.0 + t as f64).sqrt();
        for (xi, ui) in x.iter_mut().zip(&unit[i]) {
            *xi += step * ui;
        }
        normalize(&mut x);
        let m = margin(&x).1;
        if m > best_margin {
            best_margin = m;
            best = x.clone();
        }
    }
    Some(Vector::from_raw(best))
}

/// Lorentz dual supremum. States normalised at `e = (t0, v0)` have the form
/// `s (1, θ)` with `|θ| = 1` at the extreme points, so the supremum is
/// `max_θ (x_0 + <θ, x_rest>) / (t0 + <θ, v0>)`. The maximiser lies in the
/// plane spanned by `x_rest` and `v0`, where the objective is unimodal in the
/// angle.
fn lorentz_dual_sup(e: &[f64], x: &[f64]) -> f64 {
    let (t0, v0) = (e[0], &e[1..]);
    let (a, b) = (x[0], &x[1..]);
    let v0_norm = linalg::norm(v0);
    if v0_norm == 0.0 {
        return (a + linalg::norm(b)) / t0;
    }
    if b.len() == 1 {
        return [1.0, -1.0]
            .iter()
            .map(|s| (a + s * b[0]) / (t0 + s * v0[0]))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    let u1: Vec<f64> = v0.iter().map(|c| c / v0_norm).collect();
    let b1 = linalg::dot(b, &u1);
    let perp: Vec<f64> = b.iter().zip(&u1).map(|(bi, ui)| bi - b1 * ui).collect();
    // With b parallel to v0 the second direction only matters through its
    // zero component, so its exact choice is irrelevant.
    let b2 = linalg::norm(&perp);
    let objective = |phi: f64| (a + b1 * phi.cos() + b2 * phi.sin()) / (t0 + v0_norm * phi.cos());

    const GRID: usize = 64;
    let step = std::f64::consts::TAU / GRID as f64;
    let (best_idx, best_val) = (0..GRID)
        .map(|j| (j, objective(j as f64 * step)))
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("non-empty grid");
    let centre = best_idx as f64 * step;
    let (mut lo, mut hi) = (centre - step, centre + step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while hi - lo > 1e-13 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = objective(d);
        }
    }
    best_val.max(fc).max(fd).max(objective(0.5 * (lo + hi)))
}

/// `λ_max(L^{-1} X L^{-T})` with `E = L L^T`, the generalised eigenvalue
/// that equals `λ_max(E^{-1/2} X E^{-1/2})`.
fn psd_dual_sup(e: &[f64], x: &[f64], k: usize) -> f64 {
    let em = linalg::unpack(e, k);
    let xm = linalg::unpack(x, k);
    let chol = Cholesky::new(em).expect("order unit of the PSD cone is positive definite");
    let l = chol.l();
    let y = l
        .solve_lower_triangular(&xm)
        .expect("nonsingular Cholesky factor");
    let m = l
        .solve_lower_triangular(&y.transpose())
        .expect("nonsingular Cholesky factor");
    linalg::sym_eigen_extremes(&m).1
}

/// One sampled failure of the Archimedean property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArchimedeanViolation {
    pub sample: usize,
    pub y: Vector,
    pub x: Vector,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArchimedeanReport {
    pub samples: usize,
    pub n_max: u32,
    /// Samples where `n y <= x` held for every `n <= n_max`.
    pub dominated: usize,
    pub violations: Vec<ArchimedeanViolation>,
}

/// Samples pairs `(y, x)` with `x ∈ K` and records a violation whenever
/// `n y <= x` for all `n <= n_max` even though `y` is separated from `-K` by
/// a unit dual functional with margin `m` large enough that `n_max * m`
/// exceeds `|x|`. In a closed cone that combination is impossible.
pub fn archimedean_spot_check(
    cone: &Cone,
    sample_count: usize,
    n_max: u32,
    seed: u64,
) -> ArchimedeanReport {
    let n_max = n_max.max(1);
    let tol = ARCHIMEDEAN_TOL;
    let outcomes = par::map_indices(sample_count, |i| {
        let mut rng = par::stream_rng(seed, i as u64);
        let x = cone
            .random_element(&mut rng)
            .scale(rng.random_range(0.0..10.0));
        let y = match i % 3 {
            0 => random_vector(cone.ambient_dim(), &mut rng),
            1 => -&cone.random_element(&mut rng),
            _ => {
                let noise = random_vector(cone.ambient_dim(), &mut rng).scale(1e-3);
                &(-&cone.random_element(&mut rng)) + &noise
            }
        };
        let dominated =
            (1..=n_max).all(|n| cone.slack_unchecked(x.axpy(-(n as f64), &y).coords()) >= -tol);
        if !dominated {
            return (false, None);
        }
        let (_, margin) = cone.separation_witness(&y).expect("dimension matches");
        let violation = (margin > tol && n_max as f64 * margin > x.norm() + tol).then_some(
            ArchimedeanViolation {
                sample: i,
                y,
                x,
                margin,
            },
        );
        (true, violation)
    });
    ArchimedeanReport {
        samples: sample_count,
        n_max,
        dominated: outcomes.iter().filter(|o| o.0).count(),
        violations: outcomes.into_iter().filter_map(|o| o.1).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pack;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn diag(d: &[f64]) -> Vector {
        pack(&DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            d,
        )))
    }

    fn sample_poly() -> Cone {
        Cone::polyhedral(vec![
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[0.0, 0.0, 1.0]),
            v(&[1.0, 1.0, -0.5]),
        ])
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let o2 = Cone::orthant(2).unwrap();
        assert!(o2.contains(&v(&[0.0, 0.0]), 0.0).unwrap());
        assert!(!o2.contains(&v(&[1.0, -0.1]), 0.0).unwrap());
        let l3 = Cone::lorentz(3).unwrap();
        assert!(l3.contains(&v(&[1.0, 0.6, 0.8]), 0.0).unwrap());
    }

    #[test]
    fn interior_examples() {
        assert!(Cone::orthant(3)
            .unwrap()
            .interior_contains(&v(&[1.0, 1.0, 1.0]), 1e-9)
            .unwrap());
        assert!(!Cone::lorentz(3)
            .unwrap()
            .interior_contains(&v(&[1.0, 1.0, 0.0]), 1e-9)
            .unwrap());
        assert!(Cone::psd(2)
            .unwrap()
            .interior_contains(&diag(&[2.0, 3.0]), 1e-9)
            .unwrap());
    }

    #[test]
    fn order_unit_examples() {
        let o2 = Cone::orthant(2).unwrap();
        assert!(o2.is_order_unit(&v(&[1.0, 1.0]), 1e-9).unwrap());
        assert!(!o2.is_order_unit(&v(&[1.0, 0.0]), 1e-9).unwrap());
        assert!(!o2.is_order_unit(&v(&[0.0, 0.0]), 0.0).unwrap());
        let l3 = Cone::lorentz(3).unwrap();
        assert!(l3.is_order_unit(&v(&[1.0, 0.999, 0.0]), 1e-9).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let o2 = Cone::orthant(2).unwrap();
        assert_eq!(
            o2.contains(&v(&[1.0, 2.0, 3.0]), 0.0),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(o2.is_order_unit(&v(&[1.0]), 0.0).is_err());
        assert!(o2.contains(&v(&[1.0, 1.0]), -1.0).is_err());
    }

    #[test]
    fn dual_sup_examples() {
        let o3 = Cone::orthant(3).unwrap();
        let e = v(&[1.0, 1.0, 1.0]);
        assert_eq!(o3.dual_sup(&e, &v(&[3.0, -1.0, 2.0])).unwrap(), 3.0);
        let p2 = Cone::psd(2).unwrap();
        let i2 = diag(&[1.0, 1.0]);
        assert!((p2.dual_sup(&i2, &diag(&[2.0, -3.0])).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(
            o3.dual_sup(&v(&[1.0, 0.0, 1.0]), &e),
            Err(Error::NotOrderUnit)
        );
    }

    #[test]
    fn dual_sup_of_unit_is_one() {
        let mut rng = par::stream_rng(11, 0);
        for cone in [
            Cone::orthant(4).unwrap(),
            Cone::lorentz(4).unwrap(),
            Cone::psd(3).unwrap(),
            sample_poly(),
        ] {
            let e = cone.random_order_unit(&mut rng);
            let s = cone.dual_sup(&e, &e).unwrap();
            assert!((s - 1.0).abs() < 1e-14, "{}: {s}", cone.label());
        }
    }

    /// Brute force over extreme states `(1, θ)/(t0 + <θ, v0>)` with θ on a
    /// fine angular grid; independent of the plane reduction and golden search.
    #[test]
    fn lorentz_dual_sup_matches_angular_brute_force() {
        let cone = Cone::lorentz(3).unwrap();
        let e = v(&[1.0, 0.3, -0.4]);
        let x = v(&[0.2, -1.0, 0.7]);
        let mut best = f64::NEG_INFINITY;
        let steps = 200_000;
        for j in 0..steps {
            let phi = j as f64 / steps as f64 * std::f64::consts::TAU;
            let (c, s) = (phi.cos(), phi.sin());
            let val = (x[0] + c * x[1] + s * x[2]) / (e[0] + c * e[1] + s * e[2]);
            best = best.max(val);
        }
        let got = cone.dual_sup(&e, &x).unwrap();
        assert!(
            got >= best - 1e-12 && got - best < 1e-7,
            "got {got}, brute {best}"
        );
    }

    #[test]
    fn dual_sup_with_axis_unit_has_closed_form() {
        let cone = Cone::lorentz(3).unwrap();
        let e = v(&[2.0, 0.0, 0.0]);
        let x = v(&[0.5, 0.3, 0.4]);
        assert!((cone.dual_sup(&e, &x).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polyhedral_rejects_rank_deficiency_and_empty_interior() {
        assert!(Cone::polyhedral(vec![v(&[1.0, 0.0]), v(&[2.0, 0.0])]).is_err());
        assert!(Cone::polyhedral(vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0])]).is_err());
        assert!(Cone::polyhedral(vec![]).is_err());
        let p = sample_poly();
        assert!(p.interior_contains(&p.canonical_unit(), 1e-6).unwrap());
    }

    #[test]
    fn definition_route_agrees_with_interior_route() {
        let mut rng = par::stream_rng(5, 0);
        for cone in [
            Cone::orthant(3).unwrap(),
            Cone::lorentz(3).unwrap(),
            Cone::psd(2).unwrap(),
            sample_poly(),
        ] {
            for _ in 0..200 {
                let e = &cone.canonical_unit()
                    + &random_vector(cone.ambient_dim(), &mut rng).scale(0.6);
                let slack = cone.slack(&e).unwrap();
                if slack.abs() < 1e-7 {
                    continue;
                }
                assert_eq!(
                    cone.dominates_every_direction(&e).unwrap(),
                    cone.is_order_unit(&e, 1e-9).unwrap(),
                    "{} at {:?}",
                    cone.label(),
                    e
                );
            }
        }
    }

    #[test]
    fn archimedean_examples() {
        let o2 = Cone::orthant(2).unwrap();
        let report = archimedean_spot_check(&o2, 1000, 50, 0);
        assert!(report.violations.is_empty());
        assert!(report.dominated > 0);
        // y = (-1, -1) lies in -K, so its witness margin is negative.
        let (_, m) = o2.separation_witness(&v(&[-1.0, -1.0])).unwrap();
        assert!(m < 0.0);
        let (_, m) = o2.separation_witness(&v(&[0.0, 0.0])).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn json_round_trip() {
        let p = sample_poly();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"family\":\"polyhedral\""));
        let back: Cone = serde_json::from_str(&s).unwrap();
        assert_eq!(back.dual_gens(), p.dual_gens());
        let psd: Cone = serde_json::from_str(r#"{"family":"psd","n":3}"#).unwrap();
        assert_eq!(psd.ambient_dim(), 6);
        assert!(serde_json::from_str::<Cone>(r#"{"family":"polyhedral","n":2}"#).is_err());
    }
}
