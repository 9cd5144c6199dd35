//! One-dimensional searches on BigReal.

use super::bigreal::BigReal;

/// Golden-section minimization of a unimodal `f` on [a, b] until the bracket
/// is narrower than `tol`. Returns (argmin, f(argmin), evaluations).
pub fn golden_section<F>(a: &BigReal, b: &BigReal, tol: &BigReal, mut f: F) -> (BigReal, BigReal, usize)
where
    F: FnMut(&BigReal) -> BigReal,
{
    let prec = a.precision().max(b.precision());
    let five = BigReal::from_i64(5, prec);
    let invphi = (five.sqrt() - BigReal::one(prec)) / BigReal::from_i64(2, prec);
    let mut lo = a.clone();
    let mut hi = b.clone();
    let mut x1 = &hi - (&hi - &lo) * &invphi;
    let mut x2 = &lo + (&hi - &lo) * &invphi;
    let mut f1 = f(&x1);
    let mut f2 = f(&x2);
    let mut evals = 2;
    while &hi - &lo > *tol && x1 < x2 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = &hi - (&hi - &lo) * &invphi;
            f1 = f(&x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = &lo + (&hi - &lo) * &invphi;
            f2 = f(&x2);
        }
        evals += 1;
    }
    if f1 <= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    }
}

/// Bisection for a sign change of `f` on [a, b]; `f(a)` and `f(b)` must differ in sign.
pub fn bisect_root<F>(a: &BigReal, b: &BigReal, tol: &BigReal, mut f: F) -> Option<BigReal>
where
    F: FnMut(&BigReal) -> BigReal,
{
    let prec = a.precision().max(b.precision());
    let half = BigReal::ratio(1, 2, prec);
    let mut lo = a.clone();
    let mut hi = b.clone();
    let flo = f(&lo);
    let fhi = f(&hi);
    if flo.is_negative() == fhi.is_negative() && !flo.is_zero() && !fhi.is_zero() {
        return None;
    }
    let lo_neg = flo.is_negative();
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) * &half;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(&mid);
        if fm.is_zero() {
            return Some(mid);
        }
        if fm.is_negative() == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo + hi) * half)
}
