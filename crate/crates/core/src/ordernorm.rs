//! The order-unit norm `p(x) = inf { λ >= 0 : -λe <= x <= λe }`.
//!
//! Two independent routes are provided. [`OrderUnitSpace::gauge_norm`] bisects
//! on membership of `λe ± x` in the cone (the Minkowski gauge of the order
//! interval `[-e, e]`). [`OrderUnitSpace::dual_norm`] evaluates
//! `sup |f(x)|` over the positive functionals with `f(e) = 1` through
//! family-specific closed forms. They must agree to floating-point accuracy.

use serde::{Deserialize, Serialize};

use crate::bisect;
use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::par;

pub const DEFAULT_GAUGE_REL_TOL: f64 = 1e-12;
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;
pub const DEFAULT_BOUNDARY_BAND: f64 = 1e-7;
pub const GAUGE_MAX_DOUBLINGS: u32 = 200;

/// A cone with a validated order unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceSpec", into = "SpaceSpec")]
pub struct OrderUnitSpace {
    cone: Cone,
    e: Vector,
    tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub cone: Cone,
    pub e: Vector,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_MEMBERSHIP_TOL
}

impl TryFrom<SpaceSpec> for OrderUnitSpace {
    type Error = Error;

    fn try_from(s: SpaceSpec) -> Result<Self> {
        OrderUnitSpace::new(s.cone, s.e, s.tol)
    }
}

impl From<OrderUnitSpace> for SpaceSpec {
    fn from(s: OrderUnitSpace) -> Self {
        SpaceSpec {
            cone: s.cone,
            e: s.e,
            tol: s.tol,
        }
    }
}

impl OrderUnitSpace {
    pub fn new(cone: Cone, e: Vector, tol: f64) -> Result<Self> {
        e.check_dim(cone.ambient_dim())?;
        if !cone.is_order_unit(&e, tol)? {
            return Err(Error::NotOrderUnit);
        }
        Ok(OrderUnitSpace { cone, e, tol })
    }

    /// The space over `cone` with its canonical unit.
    pub fn canonical(cone: Cone) -> Self {
        let e = cone.canonical_unit();
        OrderUnitSpace::new(cone, e, DEFAULT_MEMBERSHIP_TOL).expect("canonical unit is interior")
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn unit(&self) -> &Vector {
        &self.e
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.cone.ambient_dim()
    }

    /// Minkowski gauge of `[-e, e]` by doubling then bisection. The bracket
    /// starts at `[0, 1]` and stops once `hi - lo <= rel_tol * max(1, hi)`.
    pub fn gauge_norm(&self, x: &Vector, rel_tol: f64) -> Result<f64> {
        x.check_dim(self.dim())?;
        if rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if x.is_zero() {
            return Ok(0.0);
        }
        let e = self.e.coords();
        let xs = x.coords();
        let feasible = |lam: f64| {
            let mut buf = vec![0.0; xs.len()];
            [-1.0, 1.0].iter().all(|sign| {
                for ((b, ei), xi) in buf.iter_mut().zip(e).zip(xs) {
                    *b = lam * ei + sign * xi;
                }
                self.cone.slack_unchecked(&buf) >= 0.0
            })
        };
        bisect::inf_nonneg(feasible, rel_tol, GAUGE_MAX_DOUBLINGS).ok_or(Error::BracketFailed {
            op: "gauge_norm",
            doublings: GAUGE_MAX_DOUBLINGS,
        })
    }

    /// `p(x)` through the default gauge tolerance.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        self.gauge_norm(x, DEFAULT_GAUGE_REL_TOL)
    }

    /// `sup_{f ∈ H_e} |f(x)| = max(dual_sup(x), dual_sup(-x))`.
    pub fn dual_norm(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        let up = self.cone.dual_sup_unchecked(self.e.coords(), x.coords());
        let down = self.cone.dual_sup_unchecked(self.e.coords(), (-x).coords());
        Ok(up.max(down))
    }

    /// `sup { f(x) : f ∈ H_e }`, i.e. the least `λ` with `x <= λe`.
    pub fn dual_sup(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(self.cone.dual_sup_unchecked(self.e.coords(), x.coords()))
    }

    /// `count` states drawn deterministically from `seed`.
    pub fn sample_states(&self, count: usize, seed: u64) -> StateSample {
        let functionals = par::map_indices(count, |i| {
            let mut rng = par::stream_rng(seed, i as u64);
            self.cone.random_state(self.e.coords(), &mut rng)
        });
        StateSample {
            functionals,
            seed,
            count,
        }
    }

    /// Whether `e - x` is an order unit. The answer is cross-checked against
    /// the threshold `r* = inf { r : re - x is interior }`: `e - x` is a unit
    /// exactly when `r* < 1`. Away from the boundary band a disagreement is
    /// reported as an error.
    pub fn strictly_dominated_by_unit(&self, x: &Vector) -> Result<bool> {
        x.check_dim(self.dim())?;
        let diff = &self.e - x;
        let direct = self.cone.is_order_unit_unchecked(diff.coords(), self.tol)?;
        let threshold = self.unit_dominance_threshold(x)?;
        if (threshold - 1.0).abs() > DEFAULT_BOUNDARY_BAND && (threshold < 1.0) != direct {
            return Err(Error::RouteMismatch {
                op: "strictly_dominated_by_unit",
                detail: format!("e - x unit test gives {direct}, threshold is {threshold}"),
            });
        }
        Ok(direct)
    }

    /// `inf { r ∈ R : re - x ∈ int K }` with the space's interior margin.
    pub fn unit_dominance_threshold(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim())?;
        let e = self.e.coords();
        let xs = x.coords();
        bisect::inf_real(
            |r| {
                let v: Vec<f64> = e.iter().zip(xs).map(|(ei, xi)| r * ei - xi).collect();
                self.cone.slack_unchecked(&v) > self.tol
            },
            DEFAULT_GAUGE_REL_TOL,
            GAUGE_MAX_DOUBLINGS,
        )
        .ok_or(Error::BracketFailed {
            op: "unit_dominance_threshold",
            doublings: GAUGE_MAX_DOUBLINGS,
        })
    }

    /// `sup { r >= 0 : u - re ∈ K }`, zero when `u` is on the boundary or
    /// outside the cone.
    pub fn max_scale_below(&self, u: &Vector) -> Result<f64> {
        u.check_dim(self.dim())?;
        let e = self.e.coords();
        let us = u.coords();
        bisect::sup_nonneg(
            |r| {
                let v: Vec<f64> = us.iter().zip(e).map(|(ui, ei)| ui - r * ei).collect();
                self.cone.slack_unchecked(&v) >= 0.0
            },
            DEFAULT_GAUGE_REL_TOL,
            GAUGE_MAX_DOUBLINGS,
        )
        .ok_or(Error::BracketFailed {
            op: "max_scale_below",
            doublings: GAUGE_MAX_DOUBLINGS,
        })
    }

    /// A new space over the same cone with a different unit.
    pub fn with_unit(&self, e: Vector) -> Result<Self> {
        OrderUnitSpace::new(self.cone.clone(), e, self.tol)
    }
}

/// Inner product `<f, x>`, the value of the evaluation map at state `f`.
pub fn pi_eval(x: &Vector, f: &Vector) -> Result<f64> {
    f.check_dim(x.dim())?;
    Ok(x.dot(f))
}

/// A finite sample of the state space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateSample {
    pub functionals: Vec<Vector>,
    pub seed: u64,
    pub count: usize,
}

impl StateSample {
    /// `max_f |f(x)|` over the sample; a lower bound for the dual norm.
    pub fn sup_abs(&self, x: &Vector) -> f64 {
        self.functionals
            .iter()
            .map(|f| f.dot(x).abs())
            .fold(0.0, f64::max)
    }
}

/// Output of the `norm` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormComparison {
    pub gauge: f64,
    pub dual: f64,
    pub agree: bool,
}

/// Agreement test `|gauge - dual| <= 1e-9 * max(1, dual)`.
pub fn norms_agree(gauge: f64, dual: f64) -> bool {
    (gauge - dual).abs() <= 1e-9 * dual.abs().max(1.0)
}

pub fn compare_norms(space: &OrderUnitSpace, x: &Vector, rel_tol: f64) -> Result<NormComparison> {
    let gauge = space.gauge_norm(x, rel_tol)?;
    let dual = space.dual_norm(x)?;
    Ok(NormComparison {
        gauge,
        dual,
        agree: norms_agree(gauge, dual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::random_vector;
    use crate::linalg::pack;
    use nalgebra::{DMatrix, DVector};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn space(cone: Cone, e: &[f64]) -> OrderUnitSpace {
        OrderUnitSpace::new(cone, v(e), 1e-9).unwrap()
    }

    fn diag(d: &[f64]) -> Vector {
        pack(&DMatrix::from_diagonal(&DVector::from_row_slice(d)))
    }

    #[test]
    fn gauge_examples() {
        let s = space(Cone::orthant(2).unwrap(), &[1.0, 1.0]);
        let g = s.gauge_norm(&v(&[3.0, -1.0]), 1e-12).unwrap();
        assert!((g - 3.0).abs() <= 3e-12);
        assert_eq!(s.gauge_norm(&v(&[0.0, 0.0]), 1e-12).unwrap(), 0.0);

        let l = space(Cone::lorentz(3).unwrap(), &[1.0, 0.0, 0.0]);
        let g = l.gauge_norm(&v(&[0.5, 0.3, 0.4]), 1e-12).unwrap();
        assert!((g - 1.0).abs() <= 1e-12, "{g}");
    }

    #[test]
    fn gauge_rejects_bad_tolerance() {
        let s = space(Cone::orthant(2).unwrap(), &[1.0, 1.0]);
        assert!(s.gauge_norm(&v(&[1.0, 1.0]), 0.0).is_err());
        assert!(s.gauge_norm(&v(&[1.0]), 1e-12).is_err());
    }

    #[test]
    fn dual_norm_examples() {
        let p = space(Cone::psd(2).unwrap(), diag(&[1.0, 1.0]).coords());
        assert!((p.dual_norm(&diag(&[2.0, -3.0])).unwrap() - 3.0).abs() < 1e-14);
        let o = space(Cone::orthant(3).unwrap(), &[2.0, 1.0, 1.0]);
        assert_eq!(o.dual_norm(&v(&[4.0, 0.0, 0.0])).unwrap(), 2.0);
        assert_eq!(o.dual_norm(o.unit()).unwrap(), 1.0);
    }

    #[test]
    fn unit_has_norm_one_on_both_routes() {
        let mut rng = par::stream_rng(3, 0);
        for cone in [
            Cone::orthant(3).unwrap(),
            Cone::lorentz(4).unwrap(),
            Cone::psd(2).unwrap(),
        ] {
            let s = OrderUnitSpace::canonical(cone.clone());
            assert_eq!(s.norm(s.unit()).unwrap(), 1.0);
            assert_eq!(s.dual_norm(s.unit()).unwrap(), 1.0);
            let e = cone.random_order_unit(&mut rng);
            let s = s.with_unit(e).unwrap();
            assert_eq!(s.norm(s.unit()).unwrap(), 1.0);
            assert!((s.dual_norm(s.unit()).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pi_eval_examples() {
        assert_eq!(pi_eval(&v(&[1.0, 2.0]), &v(&[0.5, 0.5])).unwrap(), 1.5);
        assert_eq!(pi_eval(&v(&[3.0, -1.0]), &v(&[1.0, 0.0])).unwrap(), 3.0);
        assert!(pi_eval(&v(&[3.0, -1.0]), &v(&[1.0])).is_err());
    }

    #[test]
    fn states_are_normalised_and_bounded_by_dual_norm() {
        let o = space(Cone::orthant(2).unwrap(), &[1.0, 1.0]);
        let one = o.sample_states(1, 42);
        let f = &one.functionals[0];
        assert!(f[0] >= 0.0 && f[1] >= 0.0 && (f[0] + f[1] - 1.0).abs() < 1e-15);

        let mut rng = par::stream_rng(9, 0);
        for cone in [
            Cone::orthant(3).unwrap(),
            Cone::lorentz(3).unwrap(),
            Cone::psd(2).unwrap(),
        ] {
            let e = cone.random_order_unit(&mut rng);
            let s = OrderUnitSpace::new(cone.clone(), e, 1e-9).unwrap();
            let sample = s.sample_states(10_000, 1);
            assert!(sample
                .functionals
                .iter()
                .all(|f| (pi_eval(s.unit(), f).unwrap() - 1.0).abs() < 1e-12));
            let x = random_vector(cone.ambient_dim(), &mut rng);
            assert!(sample.sup_abs(&x) <= s.dual_norm(&x).unwrap() + 1e-9);
            assert_eq!(s.sample_states(10, 5), s.sample_states(10, 5));
        }
    }

    #[test]
    fn strict_unit_dominance_examples() {
        let s = space(Cone::orthant(1).unwrap(), &[1.0]);
        assert!(s.strictly_dominated_by_unit(&v(&[0.5])).unwrap());
        assert!(!s.strictly_dominated_by_unit(s.unit()).unwrap());
        assert!(s.strictly_dominated_by_unit(&v(&[-7.0])).unwrap());
    }

    /// With r = 1/2 and λ = 2 (so that rλ = λ - 1), x < e/2 gives e < 2(e - x).
    #[test]
    fn half_unit_domination_construction() {
        let s = space(Cone::orthant(3).unwrap(), &[1.0, 2.0, 0.5]);
        let x = v(&[0.3, 0.9, -1.0]);
        let (r, lam) = (0.5, 2.0);
        assert_eq!(r * lam, lam - 1.0);
        assert!(s
            .cone()
            .interior_contains(&(&s.unit().scale(r) - &x), 0.0)
            .unwrap());
        let gap = &(s.unit() - &x).scale(lam) - s.unit();
        assert!(s.cone().interior_contains(&gap, 0.0).unwrap());
        assert!(s.strictly_dominated_by_unit(&x).unwrap());
    }

    #[test]
    fn max_scale_below_examples() {
        let s = space(Cone::orthant(2).unwrap(), &[1.0, 1.0]);
        assert_eq!(s.max_scale_below(&v(&[3.0, 3.0])).unwrap(), 3.0);
        assert!((s.max_scale_below(&v(&[2.0, 5.0])).unwrap() - 2.0).abs() < 1e-11);
        assert_eq!(s.max_scale_below(&v(&[0.0, 5.0])).unwrap(), 0.0);
        assert_eq!(s.max_scale_below(s.unit()).unwrap(), 1.0);
    }

    #[test]
    fn space_rejects_non_units() {
        assert_eq!(
            OrderUnitSpace::new(Cone::orthant(2).unwrap(), v(&[1.0, 0.0]), 1e-9),
            Err(Error::NotOrderUnit)
        );
        let json = r#"{"cone":{"family":"lorentz","n":3},"e":[1.0,0.2,0.1]}"#;
        let s: OrderUnitSpace = serde_json::from_str(json).unwrap();
        assert_eq!(s.tol(), DEFAULT_MEMBERSHIP_TOL);
        assert!(serde_json::from_str::<OrderUnitSpace>(
            r#"{"cone":{"family":"lorentz","n":3},"e":[1.0,1.0,0.0]}"#
        )
        .is_err());
    }
}
