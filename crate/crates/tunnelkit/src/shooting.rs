//! Position-space shooting: RK4 on f'' = 2(V̂(x) − E) f from the symmetry point.

use rayon::prelude::*;

use crate::error::{Result, TunnelError};
use crate::numerics::{golden_section, BigReal, Parity};
use crate::potentials::PotentialSpec;

#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub x: BigReal,
    pub f: BigReal,
    pub df: BigReal,
}

#[derive(Clone, Debug)]
pub struct ShootResult {
    pub energy: BigReal,
    pub parity: Parity,
    /// min of |f| + |f'| over (0, K].
    pub m_value: BigReal,
    /// First x in the forbidden region with f·f' > 0.
    pub k_bound: BigReal,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Scaled potential evaluator with the polynomial coefficients cached.
struct Field {
    coeffs: Vec<BigReal>,
}

impl Field {
    fn new(spec: &PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Cosine { .. } => {
                Err(TunnelError::Unsupported("shooting needs a confining potential".into()))
            }
            _ => Ok(Self { coeffs: spec.scaled_polynomial().expect("polynomial family") }),
        }
    }

    fn value(&self, x: &BigReal) -> BigReal {
        let mut acc = BigReal::zero(x.precision());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Default step 0.01/(1 + √E).
pub fn default_step(energy: &BigReal) -> BigReal {
    let one = energy.int(1);
    BigReal::ratio(1, 100, energy.precision()) / (&one + energy.abs().sqrt())
}

fn initial(parity: Parity, energy: &BigReal) -> Result<(BigReal, BigReal)> {
    let (one, zero) = (energy.int(1), energy.int(0));
    match parity {
        Parity::Even => Ok((one, zero)),
        Parity::Odd => Ok((zero, one)),
        Parity::None => Err(TunnelError::InvalidInput("shooting needs a definite parity".into())),
    }
}

fn run(spec: &PotentialSpec, energy: &BigReal, parity: Parity, h: &BigReal, keep: bool) -> Result<ShootResult> {
    if !h.is_positive() {
        return Err(TunnelError::InvalidInput("step must be positive".into()));
    }
    let field = Field::new(spec)?;
    let prec = energy.precision();
    let two = energy.int(2);
    let half_h = h / &two;
    let sixth_h = h / energy.int(6);
    let blowup = energy.int(10).powi(prec.digits() as i64);
    let accel = |x: &BigReal, f: &BigReal| &two * (field.value(x) - energy) * f;

    let (mut f, mut df) = initial(parity, energy)?;
    let mut x = energy.int(0);
    let mut m_value: Option<BigReal> = None;
    let mut trajectory = keep.then(Vec::new);
    if let Some(t) = trajectory.as_mut() {
        t.push(TrajectoryPoint { x: x.clone(), f: f.clone(), df: df.clone() });
    }
    let mut entered: Option<f64> = None;
    loop {
        let xm = &x + &half_h;
        let xn = &x + h;
        let k1f = df.clone();
        let k1d = accel(&x, &f);
        let k2f = &df + &half_h * &k1d;
        let k2d = accel(&xm, &(&f + &half_h * &k1f));
        let k3f = &df + &half_h * &k2d;
        let k3d = accel(&xm, &(&f + &half_h * &k2f));
        let k4f = &df + h * &k3d;
        let k4d = accel(&xn, &(&f + h * &k3f));
        f = &f + &sixth_h * (k1f + &two * k2f + &two * k3f + k4f);
        df = &df + &sixth_h * (k1d + &two * k2d + &two * k3d + k4d);
        x = xn;

        let size = f.abs() + df.abs();
        if m_value.as_ref().map_or(true, |m| size < *m) {
            m_value = Some(size.clone());
        }
        if let Some(t) = trajectory.as_mut() {
            t.push(TrajectoryPoint { x: x.clone(), f: f.clone(), df: df.clone() });
        }
        let forbidden = field.value(&x) > *energy;
        if forbidden {
            let xf = x.to_f64();
            let start = *entered.get_or_insert(xf);
            if (&f * &df).is_positive() {
                break;
            }
            // A true eigenfunction decays forever; stop once rounding has surely taken over.
            if xf > 4.0 * start + 40.0 {
                break;
            }
        } else if size > blowup {
            return Err(TunnelError::Overflow { x: x.to_f64() });
        }
    }
    Ok(ShootResult {
        energy: energy.clone(),
        parity,
        m_value: m_value.expect("at least one step"),
        k_bound: x,
        trajectory,
    })
}

/// Integrate from the origin with symmetric or antisymmetric initial data and stop at K.
pub fn integrate(spec: &PotentialSpec, energy: &BigReal, parity: Parity, h: &BigReal) -> Result<ShootResult> {
    run(spec, energy, parity, h, true)
}

/// Boundary mismatch m(E) = min over (0, K] of |f| + |f'|.
pub fn m_function(spec: &PotentialSpec, energy: &BigReal, parity: Parity, h: &BigReal) -> Result<BigReal> {
    Ok(run(spec, energy, parity, h, false)?.m_value)
}

/// Coarse grid spacing used by [`find_levels`].
pub const SCAN_SPACING: f64 = 0.05;

/// A refined minimum counts as a level only if m there is this many times
/// smaller than at both neighbouring grid points. Oscillation ripples of m(E)
/// between levels are only percent-deep.
pub const LEVEL_DEPTH: f64 = 100.0;

/// Local minima of m(E) in the window, refined by golden section to width `tol`
/// and kept when at least [`LEVEL_DEPTH`] times deeper than the coarse grid around them.
///
/// `Parity::None` scans both parities and merges the results. With `h = None`
/// the step is fixed at the default for the top of the window.
pub fn find_levels(
    spec: &PotentialSpec,
    window: (&BigReal, &BigReal),
    parity: Parity,
    h: Option<&BigReal>,
    tol: &BigReal,
) -> Result<Vec<(BigReal, Parity)>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(TunnelError::InvalidInput("energy window must be finite and nonempty".into()));
    }
    let step = h.cloned().unwrap_or_else(|| default_step(hi));
    let parities: Vec<Parity> = match parity {
        Parity::None => vec![Parity::Even, Parity::Odd],
        p => vec![p],
    };
    let points = ((hi - lo).to_f64() / SCAN_SPACING).ceil().max(4.0) as usize;
    let spacing = (hi - lo) / lo.int(points as i64);
    let grid: Vec<BigReal> = (0..=points).map(|i| lo + &spacing * lo.int(i as i64)).collect();

    let mut found = Vec::new();
    for p in parities {
        let values: Vec<Result<BigReal>> =
            grid.par_iter().map(|e| m_function(spec, e, p, &step)).collect();
        let values: Vec<BigReal> = values.into_iter().collect::<Result<_>>()?;
        for i in 1..points {
            if values[i] < values[i - 1] && values[i] <= values[i + 1] {
                let mut failure = None;
                let (e, m_min, _) = golden_section(&grid[i - 1], &grid[i + 1], tol, |e| {
                    m_function(spec, e, p, &step).unwrap_or_else(|err| {
                        failure = Some(err);
                        e.int(1)
                    })
                });
                if let Some(err) = failure {
                    return Err(err);
                }
                let floor = values[i - 1].min(&values[i + 1]) / e.lit(LEVEL_DEPTH);
                if m_min < floor {
                    found.push((e, p));
                }
            }
        }
    }
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite energies"));
    Ok(found)
}
