//! Cosine potential on a ring of K minima in the plane-wave basis.
//!
//! Sector k of Z_K holds the momenta p_n = 2π√g (k + nK)/K for
//! n = −cutoff..cutoff. The cosine couples only n and n ± 1, so every
//! sector matrix is tridiagonal.

use rayon::prelude::*;

use crate::error::{Result, TunnelError};
use crate::numerics::{
    eigenvalues_bisection, jacobi_dense, BigReal, Parity, Precision, Spectrum, SymTridiagonalMatrix,
    DENSE_LIMIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SectorId {
    pub k: usize,
    pub parity: Parity,
}

#[derive(Clone, Debug)]
pub struct SectorHamiltonian {
    pub sector: SectorId,
    pub sectors: usize,
    pub g: BigReal,
    pub cutoff: usize,
    pub matrix: SymTridiagonalMatrix,
}

fn validate(sectors: usize, k: usize, g: &BigReal, cutoff: usize) -> Result<()> {
    if sectors == 0 || k >= sectors {
        return Err(TunnelError::InvalidInput(format!("sector {k} of K = {sectors}")));
    }
    if !g.is_positive() {
        return Err(TunnelError::InvalidInput("g must be positive".into()));
    }
    if cutoff < 2 {
        return Err(TunnelError::InvalidInput(format!("plane-wave cutoff {cutoff} < 2")));
    }
    Ok(())
}

/// Kinetic energy p²/2 of plane wave n in sector k.
fn kinetic(sectors: usize, k: usize, n: i64, g: &BigReal) -> BigReal {
    let prec = g.precision();
    let pi = BigReal::pi(prec);
    let m = BigReal::from_i64(k as i64 + n * sectors as i64, prec) / BigReal::from_u64(sectors as u64, prec);
    BigReal::from_i64(2, prec) * pi.sqr() * g * m.sqr()
}

/// Potential diagonal 1/(4π²g) and nearest-neighbour coupling −1/(8π²g).
fn potential_terms(g: &BigReal) -> (BigReal, BigReal) {
    let prec = g.precision();
    let pi2 = BigReal::pi(prec).sqr();
    let diag = (BigReal::from_i64(4, prec) * &pi2 * g).recip();
    let off = -(BigReal::from_i64(8, prec) * pi2 * g).recip();
    (diag, off)
}

/// Sector matrix over n = −cutoff..cutoff (row index n + cutoff).
pub fn build_sector(sectors: usize, k: usize, g: &BigReal, cutoff: usize) -> Result<SectorHamiltonian> {
    validate(sectors, k, g, cutoff)?;
    let (vd, vo) = potential_terms(g);
    let c = cutoff as i64;
    let diag = (-c..=c).map(|n| kinetic(sectors, k, n, g) + &vd).collect();
    let offdiag = vec![vo; 2 * cutoff];
    Ok(SectorHamiltonian {
        sector: SectorId { k, parity: Parity::None },
        sectors,
        g: g.clone(),
        cutoff,
        matrix: SymTridiagonalMatrix::new(diag, offdiag)?,
    })
}

/// Smallest cutoff whose edge kinetic energy exceeds 50× the potential scale 1/(4π²g),
/// raised if needed until the plane-wave tail bound drops below 10^(−digits).
pub fn default_cutoff(g: &BigReal) -> usize {
    let gf = g.to_f64();
    let pi2 = std::f64::consts::PI.powi(2);
    let scale = 1.0 / (4.0 * pi2 * gf);
    let mut n = 2usize;
    while 2.0 * pi2 * gf * (n as f64).powi(2) <= 50.0 * scale {
        n += 1;
    }
    // Coefficient ratio bound |c_{n+1}/c_n| ≤ (1/(8π²g)) / (2π²g n² − 1/(4π²g)).
    let target = -(g.digits() as f64);
    let mut log_tail = 0.0;
    let mut m = 1usize;
    loop {
        let gap = 2.0 * pi2 * gf * (m as f64).powi(2) - 2.0 * scale;
        if gap > 0.0 {
            let r = (scale / 2.0) / gap;
            if r < 1.0 {
                log_tail += r.log10();
            }
        }
        if m >= n && log_tail <= target {
            break;
        }
        m += 1;
    }
    m.max(n)
}

/// Bisection width for sector eigenvalues: 10^(−digits+6).
fn tolerance(prec: Precision) -> BigReal {
    BigReal::from_i64(10, prec).powi(-(prec.digits() as i64) + 6)
}

/// Lowest `count` eigenvalues of a sector (or parity block) by bisection.
pub fn sector_lowest(h: &SectorHamiltonian, count: usize) -> Result<Spectrum> {
    let n = h.matrix.dim();
    if count == 0 || count > n {
        return Err(TunnelError::InvalidInput(format!("count {count} for dimension {n}")));
    }
    let prec = h.g.precision();
    let values = eigenvalues_bisection(&h.matrix, 0, count - 1, &tolerance(prec))?;
    Ok(Spectrum {
        values,
        vectors: None,
        cutoff: Some(h.cutoff),
        sector: Some(h.sector.k),
        parity: h.sector.parity,
        digits: prec.digits(),
    })
}

/// Eigenpairs of a sector by dense Jacobi.
pub fn sector_eigenpairs(h: &SectorHamiltonian) -> Result<Spectrum> {
    if h.matrix.dim() > DENSE_LIMIT {
        return Err(TunnelError::DenseLimit { n: h.matrix.dim(), limit: DENSE_LIMIT });
    }
    let (values, vectors) = jacobi_dense(h.matrix.to_dense(), true)?;
    Ok(Spectrum {
        values,
        vectors,
        cutoff: Some(h.cutoff),
        sector: Some(h.sector.k),
        parity: h.sector.parity,
        digits: h.g.digits(),
    })
}

/// Split sector k = 0 or k = K/2 into cosine (even) and sine (odd) blocks.
///
/// For k = 0 the blocks pair n with −n; n = 0 joins the even block. For k = K/2
/// the blocks pair n with −n−1; the top plane wave n = cutoff has no partner
/// inside the basis and is dropped.
pub fn parity_reduce(h: &SectorHamiltonian) -> Result<(SectorHamiltonian, SectorHamiltonian)> {
    let kk = h.sectors;
    let k = h.sector.k;
    let is_zero = k == 0;
    let is_half = kk % 2 == 0 && 2 * k == kk;
    if !is_zero && !is_half {
        return Err(TunnelError::InvalidSector { k, sectors: kk });
    }
    let c = h.cutoff;
    let d = &h.matrix.diag;
    let t = h.matrix.offdiag[0].clone();
    let at = |n: i64| d[(n + c as i64) as usize].clone();
    let (even, odd) = if is_zero {
        let sqrt2 = BigReal::from_i64(2, t.precision()).sqrt();
        let even_d: Vec<BigReal> = (0..=c as i64).map(at).collect();
        let mut even_o = vec![t.clone(); c];
        even_o[0] = &t * &sqrt2;
        let odd_d: Vec<BigReal> = (1..=c as i64).map(at).collect();
        let odd_o = vec![t.clone(); c - 1];
        (
            SymTridiagonalMatrix::new(even_d, even_o)?,
            SymTridiagonalMatrix::new(odd_d, odd_o)?,
        )
    } else {
        let mut even_d: Vec<BigReal> = (0..c as i64).map(at).collect();
        let mut odd_d = even_d.clone();
        even_d[0] = &even_d[0] + &t;
        odd_d[0] = &odd_d[0] - &t;
        let o = vec![t.clone(); c - 1];
        (SymTridiagonalMatrix::new(even_d, o.clone())?, SymTridiagonalMatrix::new(odd_d, o)?)
    };
    let wrap = |m: SymTridiagonalMatrix, parity| SectorHamiltonian {
        sector: SectorId { k, parity },
        sectors: kk,
        g: h.g.clone(),
        cutoff: h.cutoff,
        matrix: m,
    };
    Ok((wrap(even, Parity::Even), wrap(odd, Parity::Odd)))
}

#[derive(Clone, Debug)]
pub struct BandPoint {
    pub k: usize,
    /// θ_k = 2πk/K folded to [0, π].
    pub theta: BigReal,
    pub energy: BigReal,
    /// 2 when sectors k and K−k are distinct, else 1.
    pub degeneracy: usize,
}

/// Lowest eigenvalue of every sector, folded to θ ∈ [0, π] and sorted by θ.
pub fn band_profile(sectors: usize, g: &BigReal, cutoff: usize) -> Result<Vec<BandPoint>> {
    if sectors < 2 {
        return Err(TunnelError::InvalidInput(format!("band profile needs K >= 2, got {sectors}")));
    }
    let prec = g.precision();
    let two_pi = BigReal::pi(prec) * BigReal::from_i64(2, prec);
    let ks: Vec<usize> = (0..=sectors / 2).collect();
    let solved: Vec<Result<BandPoint>> = ks
        .par_iter()
        .map(|&k| {
            let h = build_sector(sectors, k, g, cutoff)?;
            let e = sector_lowest(&h, 1)?.values.remove(0);
            let theta = &two_pi * BigReal::from_u64(k as u64, prec) / BigReal::from_u64(sectors as u64, prec);
            let degeneracy = if k == 0 || 2 * k == sectors { 1 } else { 2 };
            Ok(BandPoint { k, theta, energy: e, degeneracy })
        })
        .collect();
    solved.into_iter().collect()
}

/// Complex samples of a sector Bloch function, (re, im) per grid point:
/// ψ(x) = g^(1/4)/√K Σ c_n exp(i p_n x), p_n = 2π√g (k + nK)/K.
pub fn bloch_wavefunction(
    h: &SectorHamiltonian,
    eigvec: &[BigReal],
    x_grid: &[BigReal],
) -> Result<Vec<(BigReal, BigReal)>> {
    if eigvec.len() != h.matrix.dim() || h.sector.parity != Parity::None {
        return Err(TunnelError::InvalidInput("eigenvector must come from an unreduced sector".into()));
    }
    let prec = h.g.precision();
    let kk = h.sectors as i64;
    let sg = h.g.sqrt();
    let norm = sg.sqrt() / BigReal::from_i64(kk, prec).sqrt();
    let two_pi = BigReal::pi(prec) * BigReal::from_i64(2, prec);
    let c = h.cutoff as i64;
    let momenta: Vec<BigReal> = (-c..=c)
        .map(|n| &two_pi * &sg * BigReal::from_i64(h.sector.k as i64 + n * kk, prec) / BigReal::from_i64(kk, prec))
        .collect();
    Ok(x_grid
        .iter()
        .map(|x| {
            let mut re = BigReal::zero(prec);
            let mut im = BigReal::zero(prec);
            for (cn, p) in eigvec.iter().zip(&momenta) {
                let arg = p * x;
                re += cn * arg.cos();
                im += cn * arg.sin();
            }
            (&re * &norm, &im * &norm)
        })
        .collect())
}

/// Real states of definite parity from a pair ψ_k, ψ_{K−k}:
/// even = (ψ_k + ψ_{K−k})/√2, odd = (ψ_k − ψ_{K−k})/(i√2).
pub fn parity_recombine(
    psi_k: &[(BigReal, BigReal)],
    psi_mk: &[(BigReal, BigReal)],
) -> Result<(Vec<BigReal>, Vec<BigReal>)> {
    if psi_k.len() != psi_mk.len() || psi_k.is_empty() {
        return Err(TunnelError::InvalidInput("paired wavefunctions differ in length".into()));
    }
    let r2 = BigReal::from_i64(2, psi_k[0].0.precision()).sqrt();
    let even = psi_k.iter().zip(psi_mk).map(|(a, b)| (&a.0 + &b.0) / &r2).collect();
    let odd = psi_k.iter().zip(psi_mk).map(|(a, b)| (&a.1 - &b.1) / &r2).collect();
    Ok((even, odd))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_rejects_odd_k_half() {
        let prec = Precision::new(30).unwrap();
        let g = BigReal::parse("0.05", prec).unwrap();
        let h = build_sector(3, 1, &g, 4).unwrap();
        assert!(matches!(parity_reduce(&h), Err(TunnelError::InvalidSector { .. })));
    }
}
