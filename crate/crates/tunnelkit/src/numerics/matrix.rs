//! Symmetric matrices stored by diagonals.

use super::bigreal::{BigReal, Precision};
use crate::error::{Result, TunnelError};

#[derive(Clone, Debug)]
pub struct SymTridiagonalMatrix {
    pub diag: Vec<BigReal>,
    pub offdiag: Vec<BigReal>,
}

impl SymTridiagonalMatrix {
    pub fn new(diag: Vec<BigReal>, offdiag: Vec<BigReal>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(TunnelError::InvalidInput(format!(
                "tridiagonal needs n >= 1 and n-1 off-diagonals, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn precision(&self) -> Precision {
        self.diag[0].precision()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigReal>> {
        let n = self.dim();
        let prec = self.precision();
        let mut a = vec![vec![BigReal::zero(prec); n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i].clone();
            if i + 1 < n {
                a[i][i + 1] = self.offdiag[i].clone();
                a[i + 1][i] = self.offdiag[i].clone();
            }
        }
        a
    }

    pub fn to_banded(&self) -> SymBandedMatrix {
        let n = self.dim();
        let b = usize::from(n > 1);
        let mut bands = vec![self.diag.clone()];
        if b == 1 {
            bands.push(self.offdiag.clone());
        }
        SymBandedMatrix { n, halfband: b, bands }
    }

    pub fn shifted(&self, c: &BigReal) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d + c).collect(),
            offdiag: self.offdiag.clone(),
        }
    }
}

/// `bands[d][i]` holds A[i][i+d] for d = 0..=halfband.
#[derive(Clone, Debug)]
pub struct SymBandedMatrix {
    n: usize,
    halfband: usize,
    bands: Vec<Vec<BigReal>>,
}

impl SymBandedMatrix {
    pub fn zeros(n: usize, halfband: usize, prec: Precision) -> Result<Self> {
        if n == 0 || (halfband >= n && !(n == 1 && halfband == 0)) {
            return Err(TunnelError::InvalidInput(format!(
                "banded matrix needs halfband < n, got n = {n}, b = {halfband}"
            )));
        }
        let bands = (0..=halfband).map(|d| vec![BigReal::zero(prec); n - d]).collect();
        Ok(Self { n, halfband, bands })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn halfband(&self) -> usize {
        self.halfband
    }

    pub fn band(&self, d: usize) -> &[BigReal] {
        &self.bands[d]
    }

    pub fn precision(&self) -> Precision {
        self.bands[0][0].precision()
    }

    pub fn get(&self, i: usize, j: usize) -> BigReal {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        if d > self.halfband {
            BigReal::zero(self.precision())
        } else {
            self.bands[d][i].clone()
        }
    }

    /// Sets A[i][j] and A[j][i]. Entries outside the band are rejected.
    pub fn set(&mut self, i: usize, j: usize, v: BigReal) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = j - i;
        assert!(d <= self.halfband, "entry ({i},{j}) outside halfband {}", self.halfband);
        self.bands[d][i] = v;
    }

    pub fn add_to_diagonal(&mut self, c: &BigReal) {
        for x in &mut self.bands[0] {
            *x += c;
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigReal>> {
        let prec = self.precision();
        let mut a = vec![vec![BigReal::zero(prec); self.n]; self.n];
        for (d, band) in self.bands.iter().enumerate() {
            for (i, v) in band.iter().enumerate() {
                a[i][i + d] = v.clone();
                a[i + d][i] = v.clone();
            }
        }
        a
    }

    /// y = A x, each row summed left to right.
    pub fn mul_vec(&self, x: &[BigReal]) -> Vec<BigReal> {
        let prec = self.precision();
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.halfband);
                let hi = (i + self.halfband).min(self.n - 1);
                let mut acc = BigReal::zero(prec);
                for (j, xj) in x.iter().enumerate().take(hi + 1).skip(lo) {
                    let a = if j >= i { &self.bands[j - i][i] } else { &self.bands[i - j][j] };
                    acc += a * xj;
                }
                acc
            })
            .collect()
    }

    /// True when every odd-offset band is exactly zero.
    pub fn is_parity_even(&self) -> bool {
        self.bands
            .iter()
            .enumerate()
            .filter(|(d, _)| d % 2 == 1)
            .all(|(_, b)| b.iter().all(BigReal::is_zero))
    }

    /// Split into the blocks on even and odd basis indices. Requires
    /// [`is_parity_even`](Self::is_parity_even).
    pub fn parity_blocks(&self) -> Result<(SymBandedMatrix, Option<SymBandedMatrix>)> {
        if !self.is_parity_even() {
            return Err(TunnelError::InvalidInput("matrix couples opposite parities".into()));
        }
        let build = |start: usize| -> Option<SymBandedMatrix> {
            let idx: Vec<usize> = (start..self.n).step_by(2).collect();
            let m = idx.len();
            if m == 0 {
                return None;
            }
            let hb = (self.halfband / 2).min(m - 1);
            let bands = (0..=hb)
                .map(|d| (0..m - d).map(|i| self.get(idx[i], idx[i + d])).collect())
                .collect();
            Some(SymBandedMatrix { n: m, halfband: hb, bands })
        };
        Ok((build(0).expect("n >= 1"), build(1)))
    }
}

/// Basis parity label for spectra and shooting runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    None,
    Even,
    Odd,
}

impl Parity {
    pub fn label(self) -> &'static str {
        match self {
            Parity::None => "none",
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Eigenvalues with provenance.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<BigReal>,
    /// Column eigenvectors, `vectors[i]` belongs to `values[i]`.
    pub vectors: Option<Vec<Vec<BigReal>>>,
    pub cutoff: Option<usize>,
    pub sector: Option<usize>,
    pub parity: Parity,
    pub digits: u32,
}

impl Spectrum {
    pub fn bare(values: Vec<BigReal>, vectors: Option<Vec<Vec<BigReal>>>, digits: u32) -> Self {
        Self { values, vectors, cutoff: None, sector: None, parity: Parity::None, digits }
    }
}
