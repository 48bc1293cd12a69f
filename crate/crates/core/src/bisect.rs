//! Bracketing and bisection for monotone predicates on the real line.

/// Shrinks `[lo, hi]` where `pred(lo)` is false and `pred(hi)` is true until
/// `hi - lo <= rel_tol * max(1, |hi|)`. Returns the final bracket.
pub(crate) fn bisect(
    pred: impl Fn(f64) -> bool,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> (f64, f64) {
    while hi - lo > rel_tol * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// `inf { t >= 0 : pred(t) }` for a predicate that is false below and true
/// above its threshold. The upper bound starts at 1 and doubles at most
/// `max_doublings` times; `None` means no feasible point was found.
pub(crate) fn inf_nonneg(
    pred: impl Fn(f64) -> bool,
    rel_tol: f64,
    max_doublings: u32,
) -> Option<f64> {
    if pred(0.0) {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while !pred(hi) {
        if doublings == max_doublings {
            return None;
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    Some(bisect(&pred, lo, hi, rel_tol).1)
}

/// `sup { t >= 0 : pred(t) }` for a predicate that is true below and false
/// above its threshold. Returns 0 when `pred(0)` fails and `None` when the
/// predicate still holds after `max_doublings` doublings.
pub(crate) fn sup_nonneg(
    pred: impl Fn(f64) -> bool,
    rel_tol: f64,
    max_doublings: u32,
) -> Option<f64> {
    if !pred(0.0) {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while pred(hi) {
        if doublings == max_doublings {
            return None;
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    Some(bisect(|t| !pred(t), lo, hi, rel_tol).0)
}

/// `inf { t : pred(t) }` over the whole real line for an increasing predicate.
pub(crate) fn inf_real(
    pred: impl Fn(f64) -> bool,
    rel_tol: f64,
    max_doublings: u32,
) -> Option<f64> {
    if !pred(0.0) {
        return inf_nonneg(pred, rel_tol, max_doublings);
    }
    let mut hi = 0.0;
    let mut lo = -1.0;
    let mut doublings = 0;
    while pred(lo) {
        if doublings == max_doublings {
            return None;
        }
        hi = lo;
        lo *= 2.0;
        doublings += 1;
    }
    Some(bisect(&pred, lo, hi, rel_tol).1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root_threshold() {
        let t = inf_nonneg(|t| t * t >= 2.0, 1e-14, 200).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn exact_dyadic_thresholds_are_hit() {
        assert_eq!(inf_nonneg(|t| t >= 3.0, 1e-12, 200), Some(3.0));
        assert_eq!(sup_nonneg(|t| t <= 3.0, 1e-12, 200), Some(3.0));
    }

    #[test]
    fn gives_up_after_cap() {
        assert_eq!(inf_nonneg(|_| false, 1e-12, 10), None);
        assert_eq!(sup_nonneg(|_| true, 1e-12, 10), None);
        assert_eq!(sup_nonneg(|_| false, 1e-12, 10), Some(0.0));
    }

    #[test]
    fn real_line_threshold_can_be_negative() {
        let t = inf_real(|t| t >= -5.5, 1e-14, 200).unwrap();
        assert_eq!(t, -5.5);
        let t = inf_real(|t| t > 0.25, 1e-14, 200).unwrap();
        assert!((t - 0.25).abs() < 1e-13);
    }
}
