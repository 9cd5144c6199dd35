//! Exact-versus-semiclassical comparisons, correction fits and the triple-well
//! resonance search.

use rayon::prelude::*;

use crate::error::{Result, TunnelError};
use crate::fock::{self, build_double_well, build_triple_well};
use crate::instanton::{predict, predict_with, ACombination};
use crate::numerics::{golden_section, policy_digits, BigReal, Parity, Precision};
use crate::planewave::{self, build_sector, sector_lowest};
use crate::potentials::{Boundary, PotentialSpec};

/// Families covered by [`splitting_scan`].
#[derive(Clone, Debug, PartialEq)]
pub enum ScanFamily {
    DoubleWell,
    /// Ring of K cosine minima, solved in the plane-wave basis.
    CosineRing(usize),
    /// Triple well at a fixed deformation (decimal string).
    TripleWell { delta: String },
}

#[derive(Clone, Debug)]
pub struct ComparisonPoint {
    pub g: BigReal,
    pub delta_num: BigReal,
    pub delta_wkb: BigReal,
    /// (ΔE_wkb − ΔE_num)/ΔE_wkb.
    pub rel_diff: BigReal,
    pub cutoff: usize,
    pub digits: u32,
}

/// One scan entry; a solver failure is kept next to its coupling.
#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub g: String,
    pub point: Result<ComparisonPoint>,
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub cutoff: Option<usize>,
    pub digits: Option<u32>,
    pub combination: ACombination,
}

fn rough_log10_splitting(family: &ScanFamily, g: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let ln10 = std::f64::consts::LN_10;
    match family {
        ScanFamily::DoubleWell => (4.0 / (g * pi).sqrt()).log10() - 2.0 / (3.0 * g) / ln10,
        ScanFamily::CosineRing(_) => (8.0 / (g.sqrt() * pi.powf(1.5))).log10() - 2.0 / (pi * pi * g) / ln10,
        ScanFamily::TripleWell { .. } => (1.0 / g.sqrt()).log10() - 0.2 / g / ln10,
    }
}

/// Default working digits for a scan point of `family` at coupling g.
pub fn scan_digits(family: &ScanFamily, g: f64) -> u32 {
    match family {
        ScanFamily::TripleWell { .. } => triple_well_digits(g, false),
        _ => policy_digits(rough_log10_splitting(family, g)),
    }
}

/// Digits for a triple-well run at coupling g. `second_order` budgets for the
/// off-resonance splitting, which scales like the side-to-side action.
pub fn triple_well_digits(g: f64, second_order: bool) -> u32 {
    let s = if second_order { 0.4036 } else { 0.2019 };
    policy_digits(-s / g / std::f64::consts::LN_10 - 2.0 * g.log10())
}

fn scan_point(family: &ScanFamily, g_text: &str, opts: &ScanOptions) -> Result<ComparisonPoint> {
    let g_rough: f64 = g_text
        .parse()
        .map_err(|_| TunnelError::InvalidInput(format!("coupling {g_text:?} is not a number")))?;
    if !(g_rough > 0.0) {
        return Err(TunnelError::InvalidInput(format!("coupling {g_text} must be positive")));
    }
    let digits = opts.digits.unwrap_or_else(|| scan_digits(family, g_rough));
    let prec = Precision::new(digits)?;
    let g = BigReal::parse(g_text, prec)?;
    let (delta_num, delta_wkb, cutoff) = match family {
        ScanFamily::DoubleWell => {
            let m = opts.cutoff.unwrap_or_else(|| fock::default_cutoff(g_rough, 4));
            let b = build_double_well(&g, m)?;
            let even = b.block_lowest(Parity::Even, 1)?.values.remove(0);
            let odd = b.block_lowest(Parity::Odd, 1)?.values.remove(0);
            let wkb = predict(&PotentialSpec::double_well(g.clone()))?.splitting;
            (odd - even, wkb, m)
        }
        ScanFamily::CosineRing(k) => {
            let n = opts.cutoff.unwrap_or_else(|| planewave::default_cutoff(&g));
            let e0 = sector_lowest(&build_sector(*k, 0, &g, n)?, 1)?.values.remove(0);
            let e1 = sector_lowest(&build_sector(*k, 1, &g, n)?, 1)?.values.remove(0);
            let wkb = predict(&PotentialSpec::cosine(g.clone(), Boundary::Periodic(*k)))?.splitting;
            (e1 - e0, wkb, n)
        }
        ScanFamily::TripleWell { delta } => {
            let d = BigReal::parse(delta, prec)?;
            let m = opts.cutoff.unwrap_or_else(|| fock::default_cutoff(g_rough, 10));
            let levels = build_triple_well(&g, &d, m)?.lowest_levels(2)?;
            let wkb = predict_with(&PotentialSpec::triple_well(g.clone(), d), opts.combination)?.splitting;
            (&levels[1].0 - &levels[0].0, wkb, m)
        }
    };
    if !delta_num.is_positive() {
        return Err(TunnelError::NonPositive(0));
    }
    let resolution = fock::default_tolerance(prec) * BigReal::from_i64(1000, prec);
    if delta_num < resolution {
        return Err(TunnelError::Unresolved {
            splitting: delta_num.to_f64(),
            resolution: resolution.to_f64(),
            digits,
        });
    }
    let rel_diff = (&delta_wkb - &delta_num) / &delta_wkb;
    Ok(ComparisonPoint { g, delta_num, delta_wkb, rel_diff, cutoff, digits })
}

/// Exact and predicted splittings for each coupling, in input order.
pub fn splitting_scan(family: &ScanFamily, g_grid: &[String], opts: &ScanOptions) -> Result<Vec<ScanOutcome>> {
    if g_grid.is_empty() {
        return Err(TunnelError::InvalidInput("empty coupling grid".into()));
    }
    Ok(g_grid
        .par_iter()
        .map(|g| ScanOutcome { g: g.clone(), point: scan_point(family, g, opts) })
        .collect())
}

#[derive(Clone, Debug)]
pub struct FitResult {
    /// α, β, γ (as many as the degree).
    pub coefficients: Vec<BigReal>,
    pub std_errors: Vec<BigReal>,
    pub residual_norm: BigReal,
    pub points_used: usize,
}

/// Solve the square system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<BigReal>>, mut b: Vec<BigReal>) -> Result<Vec<BigReal>> {
    let n = b.len();
    let prec = b[0].precision();
    let scale = a.iter().flatten().fold(BigReal::zero(prec), |m, x| m.max(&x.abs()));
    let floor = &scale * BigReal::from_i64(10, prec).powi(-(prec.digits() as i64) / 2);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))
            .expect("nonempty");
        if a[piv][col].abs() <= floor {
            return Err(TunnelError::RankDeficient);
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let v = &f * &a[col][c];
                a[r][c] -= v;
            }
            let v = &f * &b[col];
            b[r] -= v;
        }
    }
    let mut x = vec![BigReal::zero(prec); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= &a[r][c] * &x[c];
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x)
}

/// Least squares for rel_diff(g) = αg + βg² + γg³ truncated to `degree` terms.
pub fn fit_corrections(points: &[(BigReal, BigReal)], degree: usize) -> Result<FitResult> {
    if degree == 0 || degree > 3 {
        return Err(TunnelError::InvalidInput(format!("degree {degree} outside 1..=3")));
    }
    if points.len() < degree {
        return Err(TunnelError::InvalidInput(format!("{} points for {degree} coefficients", points.len())));
    }
    let prec = points.iter().map(|p| p.0.precision().max(p.1.precision())).max().expect("nonempty");
    let rows: Vec<Vec<BigReal>> = points
        .iter()
        .map(|(g, _)| (1..=degree as i64).map(|k| g.with_precision(prec).powi(k)).collect())
        .collect();
    let ys: Vec<BigReal> = points.iter().map(|p| p.1.with_precision(prec)).collect();
    let mut normal = vec![vec![BigReal::zero(prec); degree]; degree];
    let mut rhs = vec![BigReal::zero(prec); degree];
    for (row, y) in rows.iter().zip(&ys) {
        for i in 0..degree {
            rhs[i] += &row[i] * y;
            for j in 0..degree {
                normal[i][j] += &row[i] * &row[j];
            }
        }
    }
    let coefficients = solve(normal.clone(), rhs)?;
    let mut rss = BigReal::zero(prec);
    for (row, y) in rows.iter().zip(&ys) {
        let mut fit = BigReal::zero(prec);
        for (x, c) in row.iter().zip(&coefficients) {
            fit += x * c;
        }
        rss += (y - fit).sqr();
    }
    let dof = points.len() - degree;
    let variance = if dof > 0 { &rss / BigReal::from_u64(dof as u64, prec) } else { BigReal::zero(prec) };
    let mut std_errors = Vec::with_capacity(degree);
    for j in 0..degree {
        let mut unit = vec![BigReal::zero(prec); degree];
        unit[j] = BigReal::one(prec);
        let col = solve(normal.clone(), unit)?;
        std_errors.push((&variance * &col[j]).abs().sqrt());
    }
    Ok(FitResult { coefficients, std_errors, residual_norm: rss.sqrt(), points_used: points.len() })
}

#[derive(Clone, Debug)]
pub struct ExpLawFit {
    pub c: BigReal,
    pub s: BigReal,
    /// Root of the summed squared residuals of log(ΔE√g).
    pub residual_norm: BigReal,
}

/// Fit ΔE = C g^(−1/2) e^(−s/g) by a straight line in log(ΔE√g) against 1/g.
pub fn exp_law_fit(points: &[(BigReal, BigReal)]) -> Result<ExpLawFit> {
    if points.len() < 3 {
        return Err(TunnelError::InvalidInput("at least three points are needed".into()));
    }
    if let Some(i) = points.iter().position(|p| !p.1.is_positive() || !p.0.is_positive()) {
        return Err(TunnelError::NonPositive(i));
    }
    let prec = points.iter().map(|p| p.0.precision().max(p.1.precision())).max().expect("nonempty");
    let gmin = points.iter().map(|p| p.0.to_f64()).fold(f64::INFINITY, f64::min);
    let gmax = points.iter().map(|p| p.0.to_f64()).fold(0.0, f64::max);
    if gmax < 2.0 * gmin {
        return Err(TunnelError::InvalidInput("couplings must span a factor of two".into()));
    }
    let xs: Vec<BigReal> = points.iter().map(|p| p.0.with_precision(prec).recip()).collect();
    let ys: Vec<BigReal> =
        points.iter().map(|p| (p.1.with_precision(prec) * p.0.with_precision(prec).sqrt()).ln()).collect();
    let n = BigReal::from_u64(points.len() as u64, prec);
    let mean = |v: &[BigReal]| v.iter().fold(BigReal::zero(prec), |a, x| a + x) / &n;
    let (mx, my) = (mean(&xs), mean(&ys));
    let mut sxy = BigReal::zero(prec);
    let mut sxx = BigReal::zero(prec);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - &mx) * (y - &my);
        sxx += (x - &mx).sqr();
    }
    let slope = sxy / sxx;
    let intercept = &my - &slope * &mx;
    let mut rss = BigReal::zero(prec);
    for (x, y) in xs.iter().zip(&ys) {
        rss += (y - &intercept - &slope * x).sqr();
    }
    Ok(ExpLawFit { c: intercept.exp(), s: -slope, residual_norm: rss.sqrt() })
}

#[derive(Clone, Debug)]
pub struct DeltaCResult {
    pub delta_c: BigReal,
    /// Three lowest levels of the full spectrum at δ_c.
    pub energies: Vec<(BigReal, Parity)>,
    /// E_* − E₀ at the optimum.
    pub gap: BigReal,
    pub evaluations: usize,
    pub cutoff: usize,
    pub digits: u32,
}

#[derive(Clone, Debug)]
pub struct DeltaCOptions {
    pub window: (String, String),
    /// Width in δ; defaults to 10⁻⁴ of the predicted splitting.
    pub tol: Option<String>,
    pub cutoff: Option<usize>,
    pub digits: Option<u32>,
}

impl Default for DeltaCOptions {
    fn default() -> Self {
        Self { window: ("0".into(), "0.3".into()), tol: None, cutoff: None, digits: None }
    }
}

/// Golden-section minimum of the even-block gap E_* − E₀ over δ.
pub fn find_delta_c(g_text: &str, opts: &DeltaCOptions) -> Result<DeltaCResult> {
    let g_rough: f64 = g_text
        .parse()
        .map_err(|_| TunnelError::InvalidInput(format!("coupling {g_text:?} is not a number")))?;
    if !(g_rough > 0.0) {
        return Err(TunnelError::InvalidInput(format!("coupling {g_text} must be positive")));
    }
    let digits = opts.digits.unwrap_or_else(|| triple_well_digits(g_rough, false));
    let prec = Precision::new(digits)?;
    let g = BigReal::parse(g_text, prec)?;
    let lo = BigReal::parse(&opts.window.0, prec)?;
    let hi = BigReal::parse(&opts.window.1, prec)?;
    if hi <= lo {
        return Err(TunnelError::InvalidInput("δ window is empty".into()));
    }
    let m = opts.cutoff.unwrap_or_else(|| fock::default_cutoff(g_rough, 10));
    let tol = match &opts.tol {
        Some(t) => BigReal::parse(t, prec)?,
        None => {
            let est = predict(&PotentialSpec::triple_well(g.clone(), BigReal::zero(prec)))?.splitting;
            est * BigReal::parse("1e-4", prec)?
        }
    };
    let mut failure = None;
    let (delta_c, gap, evaluations) = golden_section(&lo, &hi, &tol, |d| {
        let gap = build_triple_well(&g, d, m)
            .and_then(|b| b.block_lowest(Parity::Even, 2))
            .map(|s| &s.values[1] - &s.values[0]);
        gap.unwrap_or_else(|e| {
            failure.get_or_insert(e);
            d.int(1)
        })
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let margin = &tol * BigReal::from_i64(10, prec);
    if &delta_c - &lo <= margin || &hi - &delta_c <= margin {
        return Err(TunnelError::NoInteriorMinimum);
    }
    let energies = build_triple_well(&g, &delta_c, m)?.lowest_levels(3)?;
    Ok(DeltaCResult { delta_c, energies, gap, evaluations, cutoff: m, digits })
}
