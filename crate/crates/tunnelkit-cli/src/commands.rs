//! Subcommand implementations. Each one produces a single table.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tunnelkit::analysis::{
    exp_law_fit, find_delta_c, fit_corrections, splitting_scan, DeltaCOptions, ScanFamily, ScanOptions,
};
use tunnelkit::instanton::{band_dispersion, gelfand_yaglom_check, predict_with, ACombination};
use tunnelkit::planewave::{
    band_profile, bloch_wavefunction, build_sector, parity_recombine, sector_eigenpairs, sector_lowest,
    SectorHamiltonian,
};
use tunnelkit::potentials::{Boundary, PotentialSpec};
use tunnelkit::shooting::{default_step, find_levels, integrate, m_function, SCAN_SPACING};
use tunnelkit::{fock, planewave, BigReal, Parity, Precision};

use crate::config::{config_err, parse_real, rough, CliResult, Combination, Common, Family};
use crate::output::Table;

/// A table plus the number of grid points that failed and were left out.
pub struct Outcome {
    pub table: Table,
    pub failures: usize,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, failures: 0 }
    }
}

fn sci(x: &BigReal, digits: u32) -> String {
    x.to_sci(digits as usize)
}

fn fock_cutoff(c: &Common, levels: usize) -> CliResult<usize> {
    if let Some(m) = c.cutoff {
        return Ok(m);
    }
    let g = c.g_rough()?;
    let floor = (2 * levels + 10).max(40);
    Ok(match c.family()? {
        Family::Anharmonic => floor,
        _ => fock::default_cutoff(g, floor),
    })
}

fn combination(c: Option<Combination>) -> ACombination {
    c.map(ACombination::from).unwrap_or_default()
}

fn scan_family(c: &Common) -> CliResult<ScanFamily> {
    Ok(match c.family()? {
        Family::DoubleWell => ScanFamily::DoubleWell,
        Family::Cosine => ScanFamily::CosineRing(c.ring()?),
        Family::TripleWell => ScanFamily::TripleWell { delta: c.delta.clone().unwrap_or_else(|| "0".into()) },
        Family::Anharmonic => return Err(config_err("splittings need a multi-well family")),
    })
}

fn grid_or_g(grid: &Option<Vec<String>>, c: &Common) -> CliResult<Vec<String>> {
    let grid = match grid {
        Some(g) => g.clone(),
        None => vec![c.g_text()?.to_string()],
    };
    if grid.is_empty() || grid.iter().any(|g| g.trim().is_empty()) {
        return Err(config_err("coupling grid is empty"));
    }
    for g in &grid {
        if !(rough(g, "coupling")? > 0.0) {
            return Err(config_err(format!("coupling {g} must be positive")));
        }
    }
    Ok(grid)
}

/// Lowest `levels` energies of a cosine ring with their sectors. Sectors k and
/// K−k share one solve so degenerate pairs are bitwise equal.
fn ring_levels(sectors: usize, g: &BigReal, cutoff: usize, levels: usize) -> CliResult<Vec<(BigReal, usize)>> {
    let half: Vec<usize> = (0..=sectors / 2).collect();
    let per: Vec<tunnelkit::Result<Vec<BigReal>>> = half
        .par_iter()
        .map(|&k| Ok(sector_lowest(&build_sector(sectors, k, g, cutoff)?, levels.min(2 * cutoff + 1))?.values))
        .collect();
    let mut all = Vec::new();
    for (&k, values) in half.iter().zip(per) {
        for v in values? {
            if k != 0 && 2 * k != sectors {
                all.push((v.clone(), sectors - k));
            }
            all.push((v, k));
        }
    }
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
    all.truncate(levels);
    Ok(all)
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Number of lowest levels [default: 7].
    #[arg(long)]
    pub levels: Option<usize>,
}

impl SpectrumArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        let levels = self.levels.unwrap_or(7);
        if levels == 0 {
            return Err(config_err("--levels must be positive"));
        }
        let prec = c.precision()?;
        let digits = prec.digits();
        let mut t = Table::new("spectrum", vec!["level", "sector", "parity", "energy", "M", "digits"]);
        t.config = c.echo();
        if c.family()? == Family::Cosine {
            let sectors = c.ring()?;
            let g = c.spec(prec)?.coupling().clone();
            let n = c.cutoff.unwrap_or_else(|| planewave::default_cutoff(&g));
            for (i, (e, k)) in ring_levels(sectors, &g, n, levels)?.iter().enumerate() {
                t.rows.push(vec![i.to_string(), k.to_string(), "none".into(), sci(e, digits), n.to_string(), digits.to_string()]);
            }
            t.set("M", n);
        } else {
            let spec = c.spec(prec)?;
            let m = fock_cutoff(c, levels)?;
            let found = fock::build(&spec, m)?.lowest_levels(levels)?;
            for (i, (e, p)) in found.iter().enumerate() {
                t.rows.push(vec![i.to_string(), String::new(), p.label().into(), sci(e, digits), m.to_string(), digits.to_string()]);
            }
            t.set("M", m);
        }
        t.set("digits", digits);
        t.set("levels", levels);
        Ok(t.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityChoice {
    Even,
    Odd,
    Both,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ShootArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Lower end of the energy window [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    pub emin: Option<String>,
    /// Upper end of the energy window [default: 8].
    #[arg(long)]
    pub emax: Option<String>,
    /// Parities to scan [default: both].
    #[arg(long, value_enum)]
    pub parity: Option<ParityChoice>,
    /// RK4 step [default: 0.01/(1+√emax)].
    #[arg(long)]
    pub h: Option<String>,
    /// Width of the refined energy bracket [default: 1e-10].
    #[arg(long)]
    pub tol: Option<String>,
    /// Write the coarse m(E) grid instead of the levels.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dump_scan: bool,
}

impl ShootArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        if c.family()? == Family::Cosine {
            return Err(config_err("shooting needs a confining family"));
        }
        let prec = Precision::new(c.digits_or(30)?).map_err(|e| config_err(e.to_string()))?;
        let digits = prec.digits();
        let spec = c.spec(prec)?;
        let lo = parse_real(self.emin.as_deref().unwrap_or("0"), prec, "emin")?;
        let hi = parse_real(self.emax.as_deref().unwrap_or("8"), prec, "emax")?;
        if hi <= lo {
            return Err(config_err("energy window is empty"));
        }
        let h = match &self.h {
            Some(s) => parse_real(s, prec, "step")?,
            None => default_step(&hi),
        };
        if !h.is_positive() {
            return Err(config_err("step must be positive"));
        }
        let tol = parse_real(self.tol.as_deref().unwrap_or("1e-10"), prec, "tol")?;
        let parities = match self.parity.unwrap_or(ParityChoice::Both) {
            ParityChoice::Even => vec![Parity::Even],
            ParityChoice::Odd => vec![Parity::Odd],
            ParityChoice::Both => vec![Parity::Even, Parity::Odd],
        };
        let mut echo = c.echo();
        echo.extend([
            ("digits".to_string(), digits.to_string()),
            ("emin".to_string(), sci(&lo, digits)),
            ("emax".to_string(), sci(&hi, digits)),
            ("h".to_string(), sci(&h, digits)),
        ]);
        if self.dump_scan {
            let mut t = Table::new("shoot", vec!["energy", "parity", "m"]);
            t.config = echo;
            let points = ((&hi - &lo).to_f64() / SCAN_SPACING).ceil().max(1.0) as i64;
            let step = (&hi - &lo) / BigReal::from_i64(points, prec);
            let tasks: Vec<(Parity, BigReal)> = parities
                .iter()
                .flat_map(|&p| (0..=points).map(move |i| (p, i)))
                .map(|(p, i)| (p, &lo + &step * BigReal::from_i64(i, prec)))
                .collect();
            let values: Vec<tunnelkit::Result<BigReal>> =
                tasks.par_iter().map(|(p, e)| m_function(&spec, e, *p, &h)).collect();
            for ((p, e), m) in tasks.iter().zip(values) {
                t.rows.push(vec![sci(e, digits), p.label().into(), sci(&m?, digits)]);
            }
            return Ok(t.into());
        }
        let mut found = Vec::new();
        for p in parities {
            found.extend(find_levels(&spec, (&lo, &hi), p, Some(&h), &tol)?);
        }
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
        let details: Vec<tunnelkit::Result<_>> =
            found.par_iter().map(|(e, p)| integrate(&spec, e, *p, &h)).collect();
        let mut t = Table::new("shoot", vec!["level", "parity", "energy", "m_value", "k_bound", "digits"]);
        t.config = echo;
        t.set("tol", sci(&tol, digits));
        for (i, r) in details.into_iter().enumerate() {
            let r = r?;
            t.rows.push(vec![
                i.to_string(),
                r.parity.label().into(),
                sci(&r.energy, digits),
                sci(&r.m_value, digits),
                sci(&r.k_bound, digits),
                digits.to_string(),
            ]);
        }
        Ok(t.into())
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct WkbArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Combination of asymmetric asymptotic constants [default: end].
    #[arg(long, value_enum)]
    pub combination: Option<Combination>,
}

impl WkbArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        let prec = c.precision()?;
        let digits = prec.digits();
        let w = predict_with(&c.spec(prec)?, combination(self.combination))?;
        let mut t = Table::new(
            "wkb",
            vec!["level", "energy", "degeneracy", "splitting", "action", "a_constant", "prefactor"],
        );
        t.config = c.echo();
        t.set("digits", digits);
        for (i, (e, d)) in w.levels.iter().enumerate() {
            t.rows.push(vec![
                i.to_string(),
                sci(e, digits),
                d.to_string(),
                sci(&w.splitting, digits),
                sci(&w.action, digits),
                sci(&w.a_constant, digits),
                sci(&w.prefactor, digits),
            ]);
        }
        Ok(t.into())
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SplittingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated couplings; falls back to --g.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "crate::config::text_list_opt")]
    pub g_grid: Option<Vec<String>>,
    /// Combination of asymmetric asymptotic constants [default: end].
    #[arg(long, value_enum)]
    pub combination: Option<Combination>,
}

fn run_scan(c: &Common, grid: &[String], how: Option<Combination>) -> CliResult<(Table, usize)> {
    let family = scan_family(c)?;
    let opts = ScanOptions { cutoff: c.cutoff, digits: c.explicit_digits()?, combination: combination(how) };
    let outcomes = splitting_scan(&family, grid, &opts)?;
    let mut t = Table::new("splitting", vec!["g", "dE_num", "dE_wkb", "rel_diff", "M", "digits"]);
    t.config = c.echo().into_iter().filter(|(k, _)| k != "g").collect();
    t.set("g_grid", grid.join(";"));
    let mut failures = 0;
    for o in outcomes {
        match o.point {
            Ok(p) => t.rows.push(vec![
                o.g.clone(),
                sci(&p.delta_num, p.digits),
                sci(&p.delta_wkb, p.digits),
                sci(&p.rel_diff, p.digits),
                p.cutoff.to_string(),
                p.digits.to_string(),
            ]),
            Err(e) => {
                eprintln!("g = {}: {e}", o.g);
                failures += 1;
            }
        }
    }
    Ok((t, failures))
}

impl SplittingArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let grid = grid_or_g(&self.g_grid, &self.common)?;
        let (table, failures) = run_scan(&self.common, &grid, self.combination)?;
        Ok(Outcome { table, failures })
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// CSV written by `splitting`; otherwise the scan runs over --g-grid.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated couplings for a fresh scan.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "crate::config::text_list_opt")]
    pub g_grid: Option<Vec<String>>,
    /// Number of correction terms αg, βg², γg³ [default: 2].
    #[arg(long)]
    pub degree: Option<usize>,
    /// Fit ΔE = C g^(−1/2) e^(−s/g) to dE_num instead.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exp_law: bool,
    /// Combination of asymmetric asymptotic constants [default: end].
    #[arg(long, value_enum)]
    pub combination: Option<Combination>,
}

fn read_columns(path: &PathBuf, wanted: &str, prec: Precision) -> CliResult<Vec<(BigReal, BigReal)>> {
    let bad = |e: csv::Error| config_err(format!("{}: {e}", path.display()));
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(bad)?;
    let header = r.headers().map_err(bad)?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| config_err(format!("{}: no column {name:?}", path.display())))
    };
    let (gi, yi) = (col("g")?, col(wanted)?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        out.push((parse_real(&rec[gi], prec, "g")?, parse_real(&rec[yi], prec, wanted)?));
    }
    Ok(out)
}

impl FitArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        let digits = c.digits_or(40)?;
        let prec = Precision::new(digits).map_err(|e| config_err(e.to_string()))?;
        let wanted = if self.exp_law { "dE_num" } else { "rel_diff" };
        let mut failures = 0;
        let points = match &self.input {
            Some(path) => read_columns(path, wanted, prec)?,
            None => {
                let grid = grid_or_g(&self.g_grid, c)?;
                let (scan, failed) = run_scan(c, &grid, self.combination)?;
                failures = failed;
                let col = if self.exp_law { 1 } else { 3 };
                scan.rows
                    .iter()
                    .map(|r| Ok((parse_real(&r[0], prec, "g")?, parse_real(&r[col], prec, wanted)?)))
                    .collect::<CliResult<Vec<_>>>()?
            }
        };
        let mut t = Table::new("fit", vec!["coefficient", "value", "std_error"]);
        t.config = c.echo().into_iter().filter(|(k, _)| k != "g").collect();
        if let Some(p) = &self.input {
            t.set("input", p.display());
        } else if let Some(grid) = &self.g_grid {
            t.set("g_grid", grid.join(";"));
        }
        t.set("digits", digits);
        if self.exp_law {
            t.set("model", "exp-law");
            let f = exp_law_fit(&points)?;
            t.rows.push(vec!["C".into(), sci(&f.c, digits), String::new()]);
            t.rows.push(vec!["s".into(), sci(&f.s, digits), String::new()]);
            t.rows.push(vec!["residual_norm".into(), sci(&f.residual_norm, digits), String::new()]);
        } else {
            let degree = self.degree.unwrap_or(2);
            t.set("degree", degree);
            let f = fit_corrections(&points, degree)?;
            for (name, (v, e)) in ["alpha", "beta", "gamma"].iter().zip(f.coefficients.iter().zip(&f.std_errors)) {
                t.rows.push(vec![name.to_string(), sci(v, digits), sci(e, digits)]);
            }
            t.rows.push(vec!["residual_norm".into(), sci(&f.residual_norm, digits), String::new()]);
        }
        Ok(Outcome { table: t, failures })
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BandArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl BandArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        if c.family.is_some_and(|f| f != Family::Cosine) {
            return Err(config_err("band structure needs the cosine family"));
        }
        let c = Common { family: Some(Family::Cosine), ..c.clone() };
        let sectors = c.ring()?;
        let prec = c.precision()?;
        let digits = prec.digits();
        let g = c.spec(prec)?.coupling().clone();
        let n = c.cutoff.unwrap_or_else(|| planewave::default_cutoff(&g));
        let points = band_profile(sectors, &g, n)?;
        let mut t = Table::new("band", vec!["k", "theta", "energy", "degeneracy", "energy_wkb"]);
        t.config = c.echo();
        t.set("M", n);
        t.set("digits", digits);
        for p in points {
            let wkb = band_dispersion(&g, &p.theta)?;
            t.rows.push(vec![
                p.k.to_string(),
                sci(&p.theta, digits),
                sci(&p.energy, digits),
                p.degeneracy.to_string(),
                sci(&wkb, digits),
            ]);
        }
        Ok(t.into())
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct DeltaCArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Comma-separated couplings; falls back to --g.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "crate::config::text_list_opt")]
    pub g_grid: Option<Vec<String>>,
    /// δ search window as lo,hi [default: 0,0.3].
    #[arg(long, value_delimiter = ',')]
    #[serde(default, deserialize_with = "crate::config::text_list_opt")]
    pub window: Option<Vec<String>>,
    /// Final bracket width in δ [default: 1e-4 of the predicted splitting].
    #[arg(long)]
    pub tol: Option<String>,
}

impl DeltaCArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        if c.family.is_some_and(|f| f != Family::TripleWell) {
            return Err(config_err("the resonance search needs the triple-well family"));
        }
        let grid = grid_or_g(&self.g_grid, c)?;
        let mut opts = DeltaCOptions { tol: self.tol.clone(), cutoff: c.cutoff, digits: c.explicit_digits()?, ..Default::default() };
        if let Some(w) = &self.window {
            match w.as_slice() {
                [lo, hi] => opts.window = (lo.clone(), hi.clone()),
                _ => return Err(config_err("--window takes exactly two values")),
            }
        }
        let results: Vec<_> = grid.par_iter().map(|g| find_delta_c(g, &opts)).collect();
        let mut t = Table::new("delta-c", vec!["g", "delta_c", "E0", "E1", "E2", "ratio", "M", "digits"]);
        t.set("family", Family::TripleWell.label());
        t.set("g_grid", grid.join(";"));
        t.set("window", format!("{};{}", opts.window.0, opts.window.1));
        let mut failures = 0;
        for (g, r) in grid.iter().zip(results) {
            match r {
                Ok(r) => {
                    let e = &r.energies;
                    let ratio = (&e[2].0 - &e[1].0) / (&e[1].0 - &e[0].0);
                    let d = r.digits;
                    t.rows.push(vec![
                        g.clone(),
                        sci(&r.delta_c, d),
                        sci(&e[0].0, d),
                        sci(&e[1].0, d),
                        sci(&e[2].0, d),
                        sci(&ratio, d),
                        r.cutoff.to_string(),
                        d.to_string(),
                    ]);
                }
                Err(e) => {
                    eprintln!("g = {g}: {e}");
                    failures += 1;
                }
            }
        }
        Ok(Outcome { table: t, failures })
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Number of lowest states [default: 2].
    #[arg(long)]
    pub levels: Option<usize>,
    /// Left end of the grid in scaled units [default: −(g^(−1/2) + 4)].
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<String>,
    /// Right end of the grid [default: g^(−1/2) + 4].
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<String>,
    /// Grid points [default: 201].
    #[arg(long)]
    pub points: Option<usize>,
}

impl WavefunctionArgs {
    fn grid(&self, c: &Common, prec: Precision) -> CliResult<Vec<BigReal>> {
        let spacing = || -> CliResult<BigReal> { Ok(c.spec(prec)?.coupling().sqrt().recip()) };
        let reach = match c.family()? {
            Family::Anharmonic => BigReal::from_i64(5, prec),
            Family::Cosine => spacing()?,
            _ => spacing()? + BigReal::from_i64(4, prec),
        };
        let lo = match &self.x_min {
            Some(s) => parse_real(s, prec, "x-min")?,
            None => -reach.clone(),
        };
        let hi = match &self.x_max {
            Some(s) => parse_real(s, prec, "x-max")?,
            None => reach,
        };
        let n = self.points.unwrap_or(201);
        if n < 2 || hi <= lo {
            return Err(config_err("wavefunction grid needs at least 2 points on a nonempty interval"));
        }
        let dx = (&hi - &lo) / BigReal::from_u64(n as u64 - 1, prec);
        Ok((0..n).map(|i| &lo + &dx * BigReal::from_u64(i as u64, prec)).collect())
    }

    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        let levels = self.levels.unwrap_or(2);
        if levels == 0 {
            return Err(config_err("--levels must be positive"));
        }
        let prec = c.precision()?;
        let digits = prec.digits();
        let xs = self.grid(c, prec)?;
        let mut t = Table::new("wavefunction", vec!["level", "sector", "parity", "energy", "x", "psi"]);
        t.config = c.echo();
        t.set("digits", digits);
        t.set("points", xs.len());
        let push = |t: &mut Table, level: usize, sector: String, parity: Parity, e: &BigReal, psi: &[BigReal]| {
            for (x, y) in xs.iter().zip(psi) {
                t.rows.push(vec![
                    level.to_string(),
                    sector.clone(),
                    parity.label().into(),
                    sci(e, digits),
                    sci(x, digits),
                    sci(y, digits),
                ]);
            }
        };
        if c.family()? == Family::Cosine {
            let sectors = c.ring()?;
            let g = c.spec(prec)?.coupling().clone();
            let n = c.cutoff.unwrap_or_else(|| planewave::default_cutoff(&g));
            t.set("M", n);
            let wanted = ring_levels(sectors, &g, n, levels)?;
            let mut solved: Vec<(usize, SectorHamiltonian, tunnelkit::Spectrum)> = Vec::new();
            let mut visits: BTreeMap<usize, usize> = BTreeMap::new();
            let mut level = 0;
            for (e, k) in &wanted {
                if level >= levels {
                    break;
                }
                // The partner K−k is produced together with k by time reversal.
                if 2 * k > sectors {
                    continue;
                }
                let idx = *visits.entry(*k).and_modify(|v| *v += 1).or_insert(0);
                if !solved.iter().any(|s| s.0 == *k) {
                    let h = build_sector(sectors, *k, &g, n)?;
                    let spec = sector_eigenpairs(&h)?;
                    solved.push((*k, h, spec));
                }
                let (_, h, spec) = solved.iter().find(|s| s.0 == *k).expect("solved above");
                let vec = &spec.vectors.as_ref().expect("vectors requested")[idx];
                let psi = bloch_wavefunction(h, vec, &xs)?;
                if *k == 0 || 2 * k == sectors {
                    let re: Vec<BigReal> = psi.iter().map(|p| p.0.clone()).collect();
                    push(&mut t, level, k.to_string(), Parity::None, e, &re);
                    level += 1;
                } else {
                    let conj: Vec<(BigReal, BigReal)> = psi.iter().map(|p| (p.0.clone(), -p.1.clone())).collect();
                    let (even, odd) = parity_recombine(&psi, &conj)?;
                    push(&mut t, level, k.to_string(), Parity::Even, e, &even);
                    level += 1;
                    if level < levels {
                        push(&mut t, level, k.to_string(), Parity::Odd, e, &odd);
                        level += 1;
                    }
                }
            }
            return Ok(t.into());
        }
        let spec = c.spec(prec)?;
        let m = fock_cutoff(c, levels)?;
        t.set("M", m);
        let b = fock::build(&spec, m)?;
        let found = b.lowest_levels(levels)?;
        let mut blocks: Vec<(Parity, tunnelkit::Spectrum)> = Vec::new();
        for (level, (e, p)) in found.iter().enumerate() {
            if !blocks.iter().any(|b| b.0 == *p) {
                blocks.push((*p, b.block_eigenpairs(*p)?));
            }
            let idx = found[..level].iter().filter(|f| f.1 == *p).count();
            let block = &blocks.iter().find(|b| b.0 == *p).expect("solved above").1;
            let mut coeffs = block.vectors.as_ref().expect("vectors requested")[idx].clone();
            // Fix the overall sign: largest coefficient positive.
            let lead = coeffs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite").then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .expect("nonempty");
            if coeffs[lead].is_negative() {
                coeffs.iter_mut().for_each(|x| *x = -x.clone());
            }
            let psi = fock::wavefunction(&coeffs, &xs);
            push(&mut t, level, String::new(), *p, e, &psi);
        }
        Ok(t.into())
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct GyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Well separation a = g^(−1/2); replaces --g when given.
    #[arg(long)]
    #[serde(default, deserialize_with = "crate::config::text_opt")]
    pub a: Option<String>,
    /// Comma-separated Euclidean horizons T [default: 40].
    #[arg(long = "T", value_delimiter = ',')]
    #[serde(rename = "T", default, deserialize_with = "crate::config::text_list_opt")]
    pub horizons: Option<Vec<String>>,
}

impl GyArgs {
    pub fn run(&self) -> CliResult<Outcome> {
        let c = &self.common;
        let family = c.family.unwrap_or(Family::DoubleWell);
        if !matches!(family, Family::DoubleWell | Family::Cosine) {
            return Err(config_err("the determinant check covers the double well and cosine"));
        }
        let digits = c.digits_or(30)?;
        let prec = Precision::new(digits).map_err(|e| config_err(e.to_string()))?;
        let g = match (&self.a, &c.g) {
            (Some(a), _) => {
                let a = parse_real(a, prec, "a")?;
                if !a.is_positive() {
                    return Err(config_err("a must be positive"));
                }
                a.sqr().recip()
            }
            (None, Some(g)) => {
                let g = parse_real(g, prec, "coupling")?;
                if !g.is_positive() {
                    return Err(config_err("coupling must be positive"));
                }
                g
            }
            (None, None) => return Err(config_err("--g or --a is required")),
        };
        let spec = match family {
            Family::Cosine => PotentialSpec::cosine(g, Boundary::InfiniteLine),
            _ => PotentialSpec::double_well(g),
        };
        let horizons = self.horizons.clone().unwrap_or_else(|| vec!["40".into()]);
        if horizons.is_empty() {
            return Err(config_err("horizon list is empty"));
        }
        let ts = horizons.iter().map(|s| parse_real(s, prec, "T")).collect::<CliResult<Vec<_>>>()?;
        let checks: Vec<_> = ts.par_iter().map(|t| gelfand_yaglom_check(&spec, t)).collect();
        let mut t = Table::new("gy-check", vec!["T", "numeric", "closed_form", "ratio", "lambda0", "free_end_value"]);
        t.set("family", family.label());
        match &self.a {
            Some(a) => t.set("a", a),
            None => t.set("g", c.g.as_deref().unwrap_or_default()),
        }
        t.set("digits", digits);
        for (h, r) in horizons.iter().zip(checks) {
            let r = r?;
            let ratio = &r.numeric / &r.closed_form;
            t.rows.push(vec![
                h.clone(),
                sci(&r.numeric, digits),
                sci(&r.closed_form, digits),
                sci(&ratio, digits),
                sci(&r.lambda0, digits),
                sci(&r.free_end_value, digits),
            ]);
        }
        Ok(t.into())
    }
}
