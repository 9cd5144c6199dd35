//! Symmetric eigensolvers at working precision.

use super::bigreal::{dot, BigReal, Precision};
use super::matrix::{SymBandedMatrix, SymTridiagonalMatrix};
use crate::error::{Result, TunnelError};

/// Largest dimension accepted by [`dense_eigen_small`].
pub const DENSE_LIMIT: usize = 600;

/// Zero pivots are replaced by this value: 2^(−4·bits) at the given precision.
fn pivot_floor(prec: Precision) -> BigReal {
    BigReal::from_i64(2, prec).powi(-4 * prec.bits() as i64)
}

/// Number of eigenvalues strictly below `lambda`.
pub fn sturm_count(m: &SymTridiagonalMatrix, lambda: &BigReal) -> usize {
    let e2: Vec<BigReal> = m.offdiag.iter().map(BigReal::sqr).collect();
    sturm_count_sq(&m.diag, &e2, lambda)
}

fn sturm_count_sq(diag: &[BigReal], e2: &[BigReal], lambda: &BigReal) -> usize {
    let floor = pivot_floor(lambda.precision().max(diag[0].precision()));
    let mut count = 0;
    let mut q = &diag[0] - lambda;
    for i in 0..diag.len() {
        if i > 0 {
            q = &diag[i] - lambda - &e2[i - 1] / &q;
        }
        if q.is_zero() {
            q = floor.clone();
        }
        if q.is_negative() {
            count += 1;
        }
    }
    count
}

/// Interval containing the whole spectrum.
pub fn gershgorin(m: &SymTridiagonalMatrix) -> (BigReal, BigReal) {
    let n = m.dim();
    let mut lo = m.diag[0].clone();
    let mut hi = m.diag[0].clone();
    for i in 0..n {
        let mut r = BigReal::zero(m.precision());
        if i > 0 {
            r += m.offdiag[i - 1].abs();
        }
        if i + 1 < n {
            r += m.offdiag[i].abs();
        }
        lo = lo.min(&(&m.diag[i] - &r));
        hi = hi.max(&(&m.diag[i] + &r));
    }
    let pad = (&hi - &lo).abs() * lo.lit(1e-8) + lo.lit(1e-30);
    (lo - &pad, hi + pad)
}

/// Eigenvalues with indices `i_lo..=i_hi` (ascending), each bracketed to width `tol`.
pub fn eigenvalues_bisection(
    m: &SymTridiagonalMatrix,
    i_lo: usize,
    i_hi: usize,
    tol: &BigReal,
) -> Result<Vec<BigReal>> {
    let n = m.dim();
    if i_lo > i_hi || i_hi >= n {
        return Err(TunnelError::InvalidInput(format!("index range [{i_lo}, {i_hi}] for n = {n}")));
    }
    let prec = m.precision();
    let limit = BigReal::from_i64(10, prec).powi(-(prec.digits() as i64) + 5);
    if !tol.is_positive() || *tol < limit {
        return Err(TunnelError::ToleranceTooSmall { tol: tol.to_sci(6), digits: prec.digits() });
    }
    let e2: Vec<BigReal> = m.offdiag.iter().map(BigReal::sqr).collect();
    let (lo, hi) = gershgorin(m);
    let mut out: Vec<Option<BigReal>> = vec![None; i_hi - i_lo + 1];
    let half = BigReal::ratio(1, 2, prec);
    // Stack of (a, b, count(a), count(b)); split by index count only.
    let mut stack = vec![(lo, hi, 0usize, n)];
    while let Some((a, b, ca, cb)) = stack.pop() {
        if cb <= ca || cb <= i_lo || ca > i_hi {
            continue;
        }
        let mid = (&a + &b) * &half;
        let width = &b - &a;
        if width <= *tol || mid <= a || mid >= b {
            for k in ca.max(i_lo)..cb.min(i_hi + 1) {
                out[k - i_lo] = Some(mid.clone());
            }
            continue;
        }
        let cm = sturm_count_sq(&m.diag, &e2, &mid);
        stack.push((mid.clone(), b, cm, cb));
        stack.push((a, mid, ca, cm));
    }
    Ok(out.into_iter().map(|v| v.expect("every index bracketed")).collect())
}

/// Working storage for bulge chasing: offsets 0..=b+1 above the diagonal.
struct BulgeBand {
    n: usize,
    width: usize,
    up: Vec<Vec<BigReal>>,
    zero: BigReal,
}

impl BulgeBand {
    fn get(&self, i: usize, j: usize) -> &BigReal {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        if d > self.width {
            &self.zero
        } else {
            &self.up[d][i]
        }
    }

    fn set(&mut self, i: usize, j: usize, v: BigReal) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        if d > self.width {
            debug_assert!(v.is_zero(), "fill outside bulge band at ({i},{j})");
            return;
        }
        self.up[d][i] = v;
    }

    /// Similarity by the rotation [[c, s], [−s, c]] acting on planes (p, p+1).
    fn rotate(&mut self, p: usize, c: &BigReal, s: &BigReal) {
        let q = p + 1;
        let lo = p.saturating_sub(self.width + 1);
        let hi = (q + self.width + 1).min(self.n - 1);
        for t in lo..=hi {
            if t == p || t == q {
                continue;
            }
            let ap = self.get(t, p).clone();
            let aq = self.get(t, q).clone();
            if ap.is_zero() && aq.is_zero() {
                continue;
            }
            self.set(t, p, c * &ap + s * &aq);
            self.set(t, q, c * &aq - s * &ap);
        }
        let app = self.get(p, p).clone();
        let aqq = self.get(q, q).clone();
        let apq = self.get(p, q).clone();
        let cc = c.sqr();
        let ss = s.sqr();
        let cs = c * s;
        let two_cs_apq = (&cs * &apq) * app.int(2);
        self.set(p, p, &cc * &app + &two_cs_apq + &ss * &aqq);
        self.set(q, q, &ss * &app - &two_cs_apq + &cc * &aqq);
        self.set(p, q, &cs * (&aqq - &app) + (&cc - &ss) * &apq);
    }
}

/// Orthogonal reduction of a banded matrix to tridiagonal form by Givens
/// rotations with bulge chasing. Spectrum preserved to working precision.
pub fn band_reduce_givens(m: &SymBandedMatrix) -> SymTridiagonalMatrix {
    let n = m.dim();
    let b = m.halfband();
    let prec = m.precision();
    if b <= 1 || n <= 2 {
        let diag = m.band(0).to_vec();
        let offdiag = if n > 1 {
            if b == 0 {
                vec![BigReal::zero(prec); n - 1]
            } else {
                m.band(1).to_vec()
            }
        } else {
            Vec::new()
        };
        return SymTridiagonalMatrix { diag, offdiag };
    }
    let width = b + 1;
    let mut up: Vec<Vec<BigReal>> = (0..=b).map(|d| m.band(d).to_vec()).collect();
    up.push(vec![BigReal::zero(prec); n.saturating_sub(width)]);
    let mut w = BulgeBand { n, width, up, zero: BigReal::zero(prec) };
    for kk in (2..=b).rev() {
        for i in 0..n.saturating_sub(kk) {
            let mut row = i;
            let mut col = i + kk;
            while col < n {
                let y = w.get(row, col).clone();
                if !y.is_zero() {
                    let x = w.get(row, col - 1).clone();
                    let r = (x.sqr() + y.sqr()).sqrt();
                    let c = &x / &r;
                    let s = &y / &r;
                    w.rotate(col - 1, &c, &s);
                    w.set(row, col, BigReal::zero(prec));
                    w.set(row, col - 1, r);
                }
                row = col - 1;
                col += kk;
            }
        }
    }
    let diag = w.up[0].clone();
    let offdiag = w.up[1].clone();
    SymTridiagonalMatrix { diag, offdiag }
}

/// Lowest `count` eigenvalues of a banded matrix: Givens reduction, then bisection.
pub fn banded_lowest(m: &SymBandedMatrix, count: usize, tol: &BigReal) -> Result<Vec<BigReal>> {
    if count == 0 || count > m.dim() {
        return Err(TunnelError::InvalidInput(format!("count {count} for dimension {}", m.dim())));
    }
    let t = band_reduce_givens(m);
    eigenvalues_bisection(&t, 0, count - 1, tol)
}

/// Seed vector for Lanczos.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedRule {
    FirstUnit,
    AllOnes,
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub tridiagonal: SymTridiagonalMatrix,
    pub seed: SeedRule,
    pub steps: usize,
    /// An invariant subspace was found before `num_lanczos` steps.
    pub breakdown: bool,
}

/// Lanczos tridiagonalization with full reorthogonalization (two Gram-Schmidt passes).
pub fn band_to_tridiagonal(
    m: &SymBandedMatrix,
    num_lanczos: usize,
    seed: SeedRule,
) -> Result<LanczosResult> {
    let n = m.dim();
    if num_lanczos == 0 || num_lanczos > n {
        return Err(TunnelError::InvalidInput(format!("num_lanczos {num_lanczos} for n = {n}")));
    }
    let prec = m.precision();
    let mut q0 = vec![BigReal::zero(prec); n];
    match seed {
        SeedRule::FirstUnit => q0[0] = BigReal::one(prec),
        SeedRule::AllOnes => {
            let v = BigReal::from_u64(n as u64, prec).sqrt().recip();
            q0.iter_mut().for_each(|x| *x = v.clone());
        }
    }
    let scale = m
        .band(0)
        .iter()
        .map(BigReal::abs)
        .fold(BigReal::one(prec), |a, b| a.max(&b));
    let breakdown_tol = &scale * BigReal::from_i64(10, prec).powi(-(prec.digits() as i64) + 5);
    let mut basis: Vec<Vec<BigReal>> = vec![q0];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut breakdown = false;
    for j in 0..num_lanczos {
        let q = &basis[j];
        let mut w = m.mul_vec(q);
        let a = dot(q, &w, prec);
        for _ in 0..2 {
            for v in &basis {
                let h = dot(v, &w, prec);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= &h * vi;
                }
            }
        }
        alpha.push(a);
        if j + 1 == num_lanczos {
            break;
        }
        let b = dot(&w, &w, prec).sqrt();
        if b <= breakdown_tol {
            breakdown = true;
            break;
        }
        let inv = b.recip();
        beta.push(b);
        basis.push(w.iter().map(|x| x * &inv).collect());
    }
    let steps = alpha.len();
    Ok(LanczosResult {
        tridiagonal: SymTridiagonalMatrix { diag: alpha, offdiag: beta },
        seed,
        steps,
        breakdown,
    })
}

/// Eigen decomposition of a small dense symmetric matrix by cyclic Jacobi.
/// Returns ascending eigenvalues and, if requested, matching unit eigenvectors.
pub fn jacobi_dense(
    mut a: Vec<Vec<BigReal>>,
    with_vectors: bool,
) -> Result<(Vec<BigReal>, Option<Vec<Vec<BigReal>>>)> {
    let n = a.len();
    if n == 0 {
        return Err(TunnelError::InvalidInput("empty matrix".into()));
    }
    if n > DENSE_LIMIT {
        return Err(TunnelError::DenseLimit { n, limit: DENSE_LIMIT });
    }
    let prec = a[0][0].precision();
    let eps = prec.epsilon();
    let mut v: Vec<Vec<BigReal>> = if with_vectors {
        (0..n)
            .map(|i| (0..n).map(|j| BigReal::from_i64((i == j) as i64, prec)).collect())
            .collect()
    } else {
        Vec::new()
    };
    let frob = {
        let mut s = BigReal::zero(prec);
        for row in &a {
            for x in row {
                s += x.sqr();
            }
        }
        s.sqrt()
    };
    let thresh = &frob * &eps;
    let one = BigReal::one(prec);
    for _sweep in 0..100 {
        let mut off = BigReal::zero(prec);
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j].sqr();
            }
        }
        if off.sqrt() <= thresh {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= &thresh * &eps {
                    continue;
                }
                let theta = (&a[q][q] - &a[p][p]) / (a[p][q].int(2) * &a[p][q]);
                let t = {
                    let r = (theta.sqr() + &one).sqrt();
                    let t = (theta.abs() + r).recip();
                    if theta.is_negative() {
                        -t
                    } else {
                        t
                    }
                };
                let c = (t.sqr() + &one).sqrt().recip();
                let s = &t * &c;
                let apq = a[p][q].clone();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p].clone();
                    let akq = a[k][q].clone();
                    let nkp = &c * &akp - &s * &akq;
                    let nkq = &s * &akp + &c * &akq;
                    a[k][p] = nkp.clone();
                    a[p][k] = nkp;
                    a[k][q] = nkq.clone();
                    a[q][k] = nkq;
                }
                a[p][p] = &a[p][p] - &t * &apq;
                a[q][q] = &a[q][q] + &t * &apq;
                a[p][q] = BigReal::zero(prec);
                a[q][p] = BigReal::zero(prec);
                if with_vectors {
                    for row in v.iter_mut() {
                        let vp = row[p].clone();
                        let vq = row[q].clone();
                        row[p] = &c * &vp - &s * &vq;
                        row[q] = &s * &vp + &c * &vq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).expect("finite eigenvalues").then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i][i].clone()).collect();
    let vectors = with_vectors.then(|| {
        order
            .iter()
            .map(|&col| {
                let mut x: Vec<BigReal> = v.iter().map(|row| row[col].clone()).collect();
                // Deterministic sign: largest-magnitude component positive.
                let mut best = 0;
                for (i, xi) in x.iter().enumerate() {
                    if xi.abs() > x[best].abs() {
                        best = i;
                    }
                }
                if x[best].is_negative() {
                    x.iter_mut().for_each(|e| *e = -&*e);
                }
                x
            })
            .collect()
    });
    Ok((values, vectors))
}

/// Dense matrices accepted by [`dense_eigen_small`].
pub trait DenseSource {
    fn dense(&self) -> Vec<Vec<BigReal>>;
}

impl DenseSource for SymBandedMatrix {
    fn dense(&self) -> Vec<Vec<BigReal>> {
        self.to_dense()
    }
}

impl DenseSource for SymTridiagonalMatrix {
    fn dense(&self) -> Vec<Vec<BigReal>> {
        self.to_dense()
    }
}

/// All eigenvalues (and optionally eigenvectors) of a matrix with n ≤ [`DENSE_LIMIT`].
pub fn dense_eigen_small(
    m: &impl DenseSource,
    with_vectors: bool,
) -> Result<super::matrix::Spectrum> {
    let a = m.dense();
    let digits = a.first().map(|r| r[0].digits()).unwrap_or(0);
    let (values, vectors) = jacobi_dense(a, with_vectors)?;
    Ok(super::matrix::Spectrum::bare(values, vectors, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn tri(d: &[i64], e: &[i64]) -> SymTridiagonalMatrix {
        SymTridiagonalMatrix::new(
            d.iter().map(|&x| BigReal::from_i64(x, p())).collect(),
            e.iter().map(|&x| BigReal::from_i64(x, p())).collect(),
        )
        .unwrap()
    }

    #[test]
    fn sturm_counts_small_case() {
        let m = tri(&[2, 2], &[1]);
        assert_eq!(sturm_count(&m, &BigReal::from_i64(0, p())), 0);
        assert_eq!(sturm_count(&m, &BigReal::from_i64(2, p())), 1);
        assert_eq!(sturm_count(&m, &BigReal::from_i64(10, p())), 2);
    }

    #[test]
    fn bisection_rejects_unreachable_tolerance() {
        let m = tri(&[2, 2], &[1]);
        let tol = BigReal::from_i64(10, p()).powi(-39);
        assert!(matches!(
            eigenvalues_bisection(&m, 0, 1, &tol),
            Err(TunnelError::ToleranceTooSmall { .. })
        ));
    }

    #[test]
    fn givens_reduction_keeps_trace_and_frobenius() {
        let prec = p();
        let n = 9;
        let mut m = SymBandedMatrix::zeros(n, 3, prec).unwrap();
        for i in 0..n {
            for d in 0..=3 {
                if i + d < n {
                    m.set(i, i + d, BigReal::from_i64(((i * 7 + d * 3) % 5) as i64 - 2, prec));
                }
            }
        }
        let t = band_reduce_givens(&m);
        let tr_m = m.band(0).iter().fold(BigReal::zero(prec), |a, x| a + x);
        let tr_t = t.diag.iter().fold(BigReal::zero(prec), |a, x| a + x);
        assert!((tr_m - tr_t).abs() < prec.epsilon() * BigReal::from_i64(1000, prec));
        let fro = |a: Vec<Vec<BigReal>>| {
            a.iter().flatten().fold(BigReal::zero(prec), |s, x| s + x.sqr())
        };
        let diff = fro(m.to_dense()) - fro(t.to_dense());
        assert!(diff.abs() < prec.epsilon() * BigReal::from_i64(1000, prec));
    }
}
