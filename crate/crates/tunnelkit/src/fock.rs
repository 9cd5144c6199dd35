//! Truncated Hamiltonians in the occupation-number basis |0⟩..|M⟩.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::{Result, TunnelError};
use crate::numerics::{
    banded_lowest, jacobi_dense, BigReal, Parity, Precision, Spectrum, SymBandedMatrix, DENSE_LIMIT,
};
use crate::potentials::PotentialSpec;

/// Matrix elements of (a + a†)^k between occupation states:
/// ⟨n+j|(a+a†)^k|n⟩ = P_{k,j}(n)·√((n+j)!/n!), so that
/// ⟨n+j|X^k|n⟩ = q_{k,j}(n)·√((n+j)!/n!) with q_{k,j} = 2^(−k/2)·P_{k,j}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderPolynomial {
    pub k: usize,
    /// Integer coefficients of P_{k,j}(n), lowest power first.
    pub poly: BTreeMap<i64, Vec<i64>>,
}

fn poly_add(a: &mut Vec<i64>, b: &[i64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// (n + s)·p(n)
fn poly_shift_mul(p: &[i64], s: i64) -> Vec<i64> {
    let mut out = vec![0; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i] += s * c;
        out[i + 1] += c;
    }
    out
}

/// Expand X^k by the recursion P_{k+1,j}(n) = P_{k,j−1}(n) + (n+j+1)·P_{k,j+1}(n).
pub fn ladder_expand(k: usize) -> Result<LadderPolynomial> {
    if !(1..=10).contains(&k) {
        return Err(TunnelError::InvalidInput(format!("ladder power {k} outside 1..=10")));
    }
    let mut cur: BTreeMap<i64, Vec<i64>> = BTreeMap::from([(0, vec![1])]);
    for _ in 0..k {
        let mut next: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
        for (&j, p) in &cur {
            // a† raises: contributes to j+1 unchanged.
            poly_add(next.entry(j + 1).or_default(), p);
            // a lowers: P_{k,j} feeds j−1 with factor (n + j).
            poly_add(next.entry(j - 1).or_default(), &poly_shift_mul(p, j));
        }
        for p in next.values_mut() {
            while p.len() > 1 && *p.last().unwrap() == 0 {
                p.pop();
            }
        }
        cur = next;
    }
    Ok(LadderPolynomial { k, poly: cur })
}

impl LadderPolynomial {
    /// q_{k,j} as exact rationals for even k (odd k carries a factor √2).
    pub fn q_rational(&self, j: i64) -> Option<Vec<Rational64>> {
        if self.k % 2 == 1 {
            return None;
        }
        let den = 1i64 << (self.k / 2);
        Some(match self.poly.get(&j) {
            Some(p) => p.iter().map(|&c| Rational64::new(c, den)).collect(),
            None => vec![Rational64::from_integer(0)],
        })
    }

    /// q_{k,j}(n) at working precision.
    pub fn q(&self, j: i64, n: u64, prec: Precision) -> BigReal {
        let Some(p) = self.poly.get(&j) else {
            return BigReal::zero(prec);
        };
        let nn = BigReal::from_u64(n, prec);
        let mut acc = BigReal::zero(prec);
        for c in p.iter().rev() {
            acc = acc * &nn + BigReal::from_i64(*c, prec);
        }
        acc / BigReal::from_i64(2, prec).sqrt().powi(self.k as i64)
    }

    /// ⟨n+j|X^k|n⟩ for j ≥ 0.
    pub fn element(&self, j: u64, n: u64, prec: Precision) -> BigReal {
        let mut prod = BigReal::one(prec);
        for i in 1..=j {
            prod *= BigReal::from_u64(n + i, prec);
        }
        self.q(j as i64, n, prec) * prod.sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct FockMatrixBuild {
    pub spec: PotentialSpec,
    pub cutoff: usize,
    pub matrix: SymBandedMatrix,
}

/// Closed-form quartic matrix with V = εx²/2 + g x⁴/4 + c.
fn quartic_matrix(eps: &BigReal, g: &BigReal, c: &BigReal, m: usize) -> Result<SymBandedMatrix> {
    let prec = g.precision().max(eps.precision());
    let n = m + 1;
    let mut h = SymBandedMatrix::zeros(n, 4, prec)?;
    let one = BigReal::one(prec);
    let half = BigReal::ratio(1, 2, prec);
    let quarter = BigReal::ratio(1, 4, prec);
    let g16 = g / BigReal::from_i64(16, prec);
    let one_eps_half = (&one + eps) * &half;
    let eps_m1 = eps - &one;
    for i in 0..n {
        let k = BigReal::from_u64(i as u64, prec);
        let kk = i as i64;
        let diag = (&k + &half) * &one_eps_half
            + &g16 * BigReal::from_i64(6 * kk * kk + 6 * kk + 3, prec)
            + c;
        h.set(i, i, diag);
        if i + 2 < n {
            let r = BigReal::from_i64((kk + 1) * (kk + 2), prec).sqrt();
            let v = (g * (&k + BigReal::ratio(3, 2, prec)) + &eps_m1) * &quarter * r;
            h.set(i, i + 2, v);
        }
        if i + 4 < n {
            let r = BigReal::from_i64((kk + 1) * (kk + 2) * (kk + 3) * (kk + 4), prec).sqrt();
            h.set(i, i + 4, &g16 * r);
        }
    }
    Ok(h)
}

/// Quartic oscillator H = P²/2 + εX²/2 + gX⁴/4 + c.
pub fn build_anharmonic(eps: &BigReal, g: &BigReal, c: &BigReal, m: usize) -> Result<FockMatrixBuild> {
    if m < 4 {
        return Err(TunnelError::InvalidInput(format!("cutoff M = {m} < 4")));
    }
    Ok(FockMatrixBuild {
        spec: PotentialSpec::AnharmonicQuartic { eps: eps.clone(), g: g.clone(), c: c.clone() },
        cutoff: m,
        matrix: quartic_matrix(eps, g, c, m)?,
    })
}

/// Double well: quartic with ε → −1/2, g → g/2 and 1/(8g) added to the diagonal.
pub fn build_double_well(g: &BigReal, m: usize) -> Result<FockMatrixBuild> {
    if !g.is_positive() || m < 4 {
        return Err(TunnelError::InvalidInput(format!("double well needs g > 0, M >= 4 (M = {m})")));
    }
    let prec = g.precision();
    let eps = BigReal::ratio(-1, 2, prec);
    let gh = g / BigReal::from_i64(2, prec);
    let c = (g * BigReal::from_i64(8, prec)).recip();
    Ok(FockMatrixBuild {
        spec: PotentialSpec::DoubleWell { g: g.clone() },
        cutoff: m,
        matrix: quartic_matrix(&eps, &gh, &c, m)?,
    })
}

/// H = P²/2 + Σ_k b_k X^k for scaled coefficients b_0..b_10, written as
/// N + 1/2 + (b_2 − 1/2)X² + the remaining powers.
pub fn polynomial_matrix(scaled: &[BigReal], m: usize) -> Result<SymBandedMatrix> {
    let prec = scaled[0].precision();
    let deg = scaled.len() - 1;
    if deg > 10 {
        return Err(TunnelError::InvalidInput(format!("degree {deg} > 10")));
    }
    let n = m + 1;
    let hb = deg.max(2).min(n - 1);
    let mut h = SymBandedMatrix::zeros(n, hb, prec)?;
    let half = BigReal::ratio(1, 2, prec);
    for i in 0..n {
        h.set(i, i, BigReal::from_u64(i as u64, prec) + &half + &scaled[0]);
    }
    for (k, coeff) in scaled.iter().enumerate().skip(1) {
        let c = if k == 2 { coeff - &half } else { coeff.clone() };
        if c.is_zero() {
            continue;
        }
        let lad = ladder_expand(k)?;
        for i in 0..n {
            for j in (k % 2..=k).step_by(2) {
                if i + j >= n || j > hb {
                    continue;
                }
                let e = lad.element(j as u64, i as u64, prec);
                let v = h.get(i, i + j) + &c * e;
                h.set(i, i + j, v);
            }
        }
    }
    Ok(h)
}

/// Triple well H = N + 1/2 + (δ/2)X² + Σ_{k=4..10} c_k g^(k/2−1) X^k.
pub fn build_triple_well(g: &BigReal, delta: &BigReal, m: usize) -> Result<FockMatrixBuild> {
    if !g.is_positive() || m < 10 {
        return Err(TunnelError::InvalidInput(format!("triple well needs g > 0, M >= 10 (M = {m})")));
    }
    let spec = PotentialSpec::TripleWell { g: g.clone(), delta: delta.clone() };
    let scaled = spec.scaled_polynomial().expect("polynomial family");
    Ok(FockMatrixBuild { spec, cutoff: m, matrix: polynomial_matrix(&scaled, m)? })
}

/// Builder dispatch by family.
pub fn build(spec: &PotentialSpec, m: usize) -> Result<FockMatrixBuild> {
    match spec {
        PotentialSpec::AnharmonicQuartic { eps, g, c } => build_anharmonic(eps, g, c, m),
        PotentialSpec::DoubleWell { g } => build_double_well(g, m),
        PotentialSpec::TripleWell { g, delta } => build_triple_well(g, delta, m),
        PotentialSpec::Polynomial { .. } => {
            let scaled = spec.scaled_polynomial().expect("polynomial family");
            Ok(FockMatrixBuild { spec: spec.clone(), cutoff: m, matrix: polynomial_matrix(&scaled, m)? })
        }
        PotentialSpec::Cosine { .. } => Err(TunnelError::Unsupported(
            "cosine potential uses the plane-wave basis".into(),
        )),
    }
}

/// Default cutoff M = ceil(1.6/g) (at least `floor`).
pub fn default_cutoff(g: f64, floor: usize) -> usize {
    ((1.6 / g).ceil() as usize).max(floor)
}

/// Bisection width used for eigenvalue requests: 10^(−digits+5), the finest the bisection accepts.
pub fn default_tolerance(prec: Precision) -> BigReal {
    BigReal::from_i64(10, prec).powi(-(prec.digits() as i64) + 5)
}

impl FockMatrixBuild {
    pub fn precision(&self) -> Precision {
        self.matrix.precision()
    }

    /// Even- and odd-n blocks (odd block absent when M = 0).
    pub fn parity_blocks(&self) -> Result<(SymBandedMatrix, Option<SymBandedMatrix>)> {
        self.matrix.parity_blocks()
    }

    /// Lowest `count` eigenvalues of one parity block.
    pub fn block_lowest(&self, parity: Parity, count: usize) -> Result<Spectrum> {
        let (even, odd) = self.parity_blocks()?;
        let block = match parity {
            Parity::Even => even,
            Parity::Odd => odd.ok_or_else(|| TunnelError::InvalidInput("no odd block".into()))?,
            Parity::None => self.matrix.clone(),
        };
        let count = count.min(block.dim());
        let values = banded_lowest(&block, count, &default_tolerance(self.precision()))?;
        Ok(Spectrum {
            values,
            vectors: None,
            cutoff: Some(self.cutoff),
            sector: None,
            parity,
            digits: self.precision().digits(),
        })
    }

    /// Lowest `count` levels overall, each tagged by parity, ascending.
    pub fn lowest_levels(&self, count: usize) -> Result<Vec<(BigReal, Parity)>> {
        let blocks = if self.matrix.is_parity_even() {
            vec![Parity::Even, Parity::Odd]
        } else {
            vec![Parity::None]
        };
        let spectra: Vec<Result<Spectrum>> =
            blocks.par_iter().map(|&p| self.block_lowest(p, count)).collect();
        let mut all = Vec::new();
        for s in spectra {
            let s = s?;
            all.extend(s.values.into_iter().map(|v| (v, s.parity)));
        }
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
        all.truncate(count);
        Ok(all)
    }

    /// Eigenpairs of one parity block by dense Jacobi; vectors expanded to the full basis.
    pub fn block_eigenpairs(&self, parity: Parity) -> Result<Spectrum> {
        let (even, odd) = self.parity_blocks()?;
        let (block, start, stride) = match parity {
            Parity::Even => (even, 0, 2),
            Parity::Odd => (odd.ok_or_else(|| TunnelError::InvalidInput("no odd block".into()))?, 1, 2),
            Parity::None => (self.matrix.clone(), 0, 1),
        };
        if block.dim() > DENSE_LIMIT {
            return Err(TunnelError::DenseLimit { n: block.dim(), limit: DENSE_LIMIT });
        }
        let (values, vectors) = jacobi_dense(block.to_dense(), true)?;
        let prec = self.precision();
        let full = self.cutoff + 1;
        let vectors = vectors.map(|vs| {
            vs.into_iter()
                .map(|v| {
                    let mut out = vec![BigReal::zero(prec); full];
                    for (i, x) in v.into_iter().enumerate() {
                        out[start + stride * i] = x;
                    }
                    out
                })
                .collect()
        });
        Ok(Spectrum {
            values,
            vectors,
            cutoff: Some(self.cutoff),
            sector: None,
            parity,
            digits: prec.digits(),
        })
    }
}

/// ψ(x) = Σ c_n h_n(x) with orthonormal Hermite functions from the three-term recurrence.
pub fn wavefunction(coeffs: &[BigReal], x_grid: &[BigReal]) -> Vec<BigReal> {
    x_grid
        .iter()
        .map(|x| {
            let prec = x.precision();
            let pi = BigReal::pi(prec);
            let two = BigReal::from_i64(2, prec);
            let mut h_prev = (-(x.sqr()) / &two).exp() / pi.sqrt().sqrt();
            let mut acc = &coeffs[0] * &h_prev;
            if coeffs.len() == 1 {
                return acc;
            }
            let mut h = two.sqrt() * x * &h_prev;
            acc += &coeffs[1] * &h;
            for (n, c) in coeffs.iter().enumerate().skip(2) {
                let k = (n - 1) as i64;
                let next = (&two / BigReal::from_i64(k + 1, prec)).sqrt() * x * &h
                    - (BigReal::from_i64(k, prec) / BigReal::from_i64(k + 1, prec)).sqrt() * &h_prev;
                acc += c * &next;
                h_prev = h;
                h = next;
            }
            acc
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub level: usize,
    pub cutoff: usize,
    pub energy: BigReal,
    /// Change relative to the previous cutoff in the list.
    pub change: Option<BigReal>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Per level, first cutoff whose relative change fell below the threshold.
    pub converged_at: Vec<(usize, Option<usize>)>,
}

/// Eigenvalues of the requested levels for each cutoff in `cutoffs` (ascending).
pub fn convergence_scan(
    spec: &PotentialSpec,
    cutoffs: &[usize],
    levels: &[usize],
    threshold: &BigReal,
) -> Result<ConvergenceTable> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs.is_empty() {
        return Err(TunnelError::InvalidInput("cutoff list must be ascending and nonempty".into()));
    }
    let need = levels.iter().copied().max().unwrap_or(0) + 1;
    let per_m: Vec<Result<Vec<BigReal>>> = cutoffs
        .par_iter()
        .map(|&m| {
            let b = build(spec, m)?;
            Ok(b.lowest_levels(need.min(m + 1))?.into_iter().map(|(e, _)| e).collect())
        })
        .collect();
    let mut energies = Vec::with_capacity(cutoffs.len());
    for r in per_m {
        energies.push(r?);
    }
    let mut rows = Vec::new();
    let mut converged_at = Vec::new();
    for &lvl in levels {
        let mut prev: Option<BigReal> = None;
        let mut conv = None;
        for (mi, &m) in cutoffs.iter().enumerate() {
            let Some(e) = energies[mi].get(lvl).cloned() else { continue };
            let change = prev.as_ref().map(|p| (&e - p).abs());
            if conv.is_none() {
                if let Some(ch) = &change {
                    if ch.clone() / e.abs().max(&BigReal::one(e.precision())) < *threshold {
                        conv = Some(cutoffs[mi - 1]);
                    }
                }
            }
            rows.push(ConvergenceRow { level: lvl, cutoff: m, energy: e.clone(), change });
            prev = Some(e);
        }
        converged_at.push((lvl, conv));
    }
    Ok(ConvergenceTable { rows, converged_at })
}
