//! Semiclassical side: Euclidean actions, instanton profiles, the asymptotic
//! constants A±, multi-instanton path counts and closed-form splittings.
//!
//! Coordinates here are unscaled (z = x̄/a) and Euclidean time τ is measured
//! in units of the inverse curvature at a unit-frequency minimum.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Result, TunnelError};
use crate::numerics::{tanh_sinh, BigReal, Precision};
use crate::potentials::{Boundary, PotentialSpec};

#[derive(Clone, Debug)]
enum Shape {
    Poly(Vec<BigReal>),
    Cosine,
}

/// An instanton's two endpoints with exact local expansions of V around each.
#[derive(Clone, Debug)]
pub struct WellPair {
    shape: Shape,
    pub start: BigReal,
    pub end: BigReal,
    pub omega_start: BigReal,
    pub omega_end: BigReal,
    /// Coefficients of V(start + u) and V(end − u) in u.
    near_start: Vec<BigReal>,
    near_end: Vec<BigReal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Start,
    End,
}

fn taylor_shift(coeffs: &[BigReal], at: &BigReal, sign: i64) -> Vec<BigReal> {
    let prec = at.precision();
    let n = coeffs.len();
    let mut out = vec![BigReal::zero(prec); n];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = BigReal::zero(prec);
        let mut binom = BigReal::one(prec);
        let mut power = BigReal::one(prec);
        for k in j..n {
            if k > j {
                binom = binom * BigReal::from_u64(k as u64, prec) / BigReal::from_u64((k - j) as u64, prec);
                power = &power * at;
            }
            acc += &coeffs[k] * &binom * &power;
        }
        *slot = if sign < 0 && j % 2 == 1 { -acc } else { acc };
    }
    // The expansion point is a minimum with V = 0.
    if n > 0 {
        out[0] = BigReal::zero(prec);
    }
    if n > 1 {
        out[1] = BigReal::zero(prec);
    }
    out
}

fn horner(coeffs: &[BigReal], x: &BigReal) -> BigReal {
    let mut acc = BigReal::zero(x.precision());
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Adjacent minima used for the single-instanton quantities of each family.
pub fn well_pair(spec: &PotentialSpec) -> Result<WellPair> {
    let prec = spec.precision();
    let one = BigReal::one(prec);
    let (shape, start, end, w0, w1) = match spec {
        PotentialSpec::DoubleWell { .. } => {
            (Shape::Poly(spec.polynomial().expect("polynomial")), -&one, one.clone(), one.clone(), one.clone())
        }
        PotentialSpec::Cosine { .. } => (Shape::Cosine, BigReal::zero(prec), one.clone(), one.clone(), one.clone()),
        PotentialSpec::TripleWell { delta, .. } => (
            Shape::Poly(spec.polynomial().expect("polynomial")),
            -&one,
            BigReal::zero(prec),
            one.clone(),
            (&one + delta).sqrt(),
        ),
        PotentialSpec::Polynomial { coeffs, g, minima } => {
            let m = minima
                .as_ref()
                .filter(|m| m.len() >= 2)
                .ok_or_else(|| TunnelError::Unsupported("polynomial without two minima in its metadata".into()))?;
            let sg = g.sqrt();
            (
                Shape::Poly(coeffs.clone()),
                &m[0].position * &sg,
                &m[1].position * &sg,
                m[0].curvature.sqrt(),
                m[1].curvature.sqrt(),
            )
        }
        PotentialSpec::AnharmonicQuartic { .. } => {
            return Err(TunnelError::Unsupported("instanton quantities need a multi-well family".into()))
        }
    };
    let (near_start, near_end) = match &shape {
        Shape::Poly(c) => (taylor_shift(c, &start, 1), taylor_shift(c, &end, -1)),
        Shape::Cosine => (Vec::new(), Vec::new()),
    };
    Ok(WellPair { shape, start, end, omega_start: w0, omega_end: w1, near_start, near_end })
}

impl WellPair {
    fn precision(&self) -> Precision {
        self.start.precision().max(self.end.precision())
    }

    fn omega(&self, side: Side) -> &BigReal {
        match side {
            Side::Start => &self.omega_start,
            Side::End => &self.omega_end,
        }
    }

    /// V at distance u from one endpoint, accurate for tiny u.
    fn near(&self, side: Side, u: &BigReal) -> BigReal {
        match &self.shape {
            Shape::Poly(_) => horner(
                match side {
                    Side::Start => &self.near_start,
                    Side::End => &self.near_end,
                },
                u,
            ),
            Shape::Cosine => {
                let prec = u.precision();
                let pi = BigReal::pi(prec);
                (&pi * u).sin().sqr() / (pi.sqr() * BigReal::from_i64(2, prec))
            }
        }
    }

    /// (2V − ω²u²)/u³ at distance u from one endpoint, free of cancellation.
    fn cubic_part(&self, side: Side, u: &BigReal) -> BigReal {
        let prec = u.precision();
        match &self.shape {
            Shape::Poly(_) => {
                let c = match side {
                    Side::Start => &self.near_start,
                    Side::End => &self.near_end,
                };
                if c.len() <= 3 {
                    return BigReal::zero(prec);
                }
                horner(&c[3..], u) * BigReal::from_i64(2, prec)
            }
            Shape::Cosine => {
                let pi = BigReal::pi(prec);
                let x = &pi * u;
                if x.abs().to_f64() > 0.5 {
                    return ((x.sin().sqr() / pi.sqr()) - u.sqr()) / u.powi(3);
                }
                // sinc²x − 1 = Σ_{k≥2} (−1)^{k+1} 2^{2k−1} x^{2k−2} / (2k)!
                let x2 = x.sqr();
                let eps = prec.epsilon() * BigReal::from_i64(10, prec).powi(-5);
                let mut term = -(&x2) / BigReal::from_i64(3, prec);
                let mut sum = term.clone();
                let mut k = 2i64;
                while term.abs() > eps {
                    let num = -(&x2) * BigReal::from_i64(4, prec);
                    let den = BigReal::from_i64((2 * k + 1) * (2 * k + 2), prec);
                    term = &term * num / den;
                    sum += &term;
                    k += 1;
                }
                sum / u
            }
        }
    }

    fn midpoint(&self) -> BigReal {
        (&self.start + &self.end) / BigReal::from_i64(2, self.precision())
    }

    /// V at z, picking the nearer endpoint expansion.
    fn value(&self, z: &BigReal) -> BigReal {
        if *z <= self.midpoint() {
            self.near(Side::Start, &(z - &self.start))
        } else {
            self.near(Side::End, &(&self.end - z))
        }
    }

    /// V''(z).
    fn curvature(&self, z: &BigReal) -> BigReal {
        let prec = z.precision();
        match &self.shape {
            Shape::Poly(c) => {
                let mut acc = BigReal::zero(prec);
                for k in (2..c.len()).rev() {
                    acc = acc * z + &c[k] * BigReal::from_i64((k * (k - 1)) as i64, prec);
                }
                acc
            }
            Shape::Cosine => (BigReal::pi(prec) * BigReal::from_i64(2, prec) * z).cos(),
        }
    }
}

fn quad_tol(prec: Precision) -> BigReal {
    BigReal::from_i64(10, prec).powi(-(prec.digits() as i64) + 6)
}

/// ∫ √(2V) between the adjacent minima by tanh-sinh.
pub fn action_quadrature(spec: &PotentialSpec) -> Result<BigReal> {
    let pair = well_pair(spec)?;
    let prec = pair.precision();
    let two = BigReal::from_i64(2, prec);
    let r = tanh_sinh(&pair.start, &pair.end, &quad_tol(prec), |_, da, db| {
        let v = if da <= db { pair.near(Side::Start, da) } else { pair.near(Side::End, db) };
        (&two * v).abs().sqrt()
    })?;
    Ok(r.value)
}

/// Action coefficient s with S0 = s·a² = s/g for one adjacent-minima instanton.
pub fn action_s0(spec: &PotentialSpec) -> Result<BigReal> {
    let prec = spec.precision();
    match spec {
        PotentialSpec::DoubleWell { .. } => Ok(BigReal::ratio(2, 3, prec)),
        PotentialSpec::Cosine { .. } => Ok(BigReal::from_i64(2, prec) / BigReal::pi(prec).sqr()),
        _ => action_quadrature(spec),
    }
}

/// Transit time between the minima at energy shift c̃ = exp(log_shift).
///
/// Each half subtracts the harmonic term 1/√(ω²u² + 2c̃), whose integral is an asinh.
fn transit_time(pair: &WellPair, log_shift: &BigReal) -> Result<BigReal> {
    let prec = pair.precision();
    let two = BigReal::from_i64(2, prec);
    let shift2 = &two * log_shift.exp();
    let root_shift2 = shift2.sqrt();
    let mid = pair.midpoint();
    let mut total = BigReal::zero(prec);
    for side in [Side::Start, Side::End] {
        let w = pair.omega(side).clone();
        let len = match side {
            Side::Start => &mid - &pair.start,
            Side::End => &pair.end - &mid,
        };
        let y = &w * &len / &root_shift2;
        let asinh = (&y + (y.sqr() + BigReal::one(prec)).sqrt()).ln();
        total += asinh / &w;
        let zero = BigReal::zero(prec);
        let rest = tanh_sinh(&zero, &len, &quad_tol(prec), |_, u, _| {
            let x = u.powi(3) * pair.cubic_part(side, u);
            let h2 = (&w * u).sqr() + &shift2;
            let f = (&h2 + &x).sqrt().recip();
            let s = h2.sqrt().recip();
            -(x * f.sqr() * s.sqr() / (f + s))
        })?;
        total += rest.value;
    }
    Ok(total)
}

/// ln c̃ making the transit time equal to `horizon`.
fn solve_shift(pair: &WellPair, horizon: &BigReal) -> Result<BigReal> {
    let prec = pair.precision();
    let half = BigReal::ratio(1, 2, prec);
    let slope = -(pair.omega_start.recip() + pair.omega_end.recip()) * &half;
    let tol = quad_tol(prec) * horizon;
    let mut ell = horizon / &slope;
    for _ in 0..80 {
        let t = transit_time(pair, &ell)?;
        let miss = &t - horizon;
        if miss.abs() <= tol {
            return Ok(ell);
        }
        ell = &ell - &miss / &slope;
        if !ell.is_negative() {
            return Err(TunnelError::HorizonTooShort(horizon.to_f64()));
        }
    }
    Err(TunnelError::NoProfile("energy shift iteration did not settle".into()))
}

#[derive(Clone, Debug)]
pub struct InstantonProfile {
    pub horizon: BigReal,
    pub tau: Vec<BigReal>,
    /// x̄/a on the grid.
    pub position: Vec<BigReal>,
    /// (dx̄/dτ)/a on the grid.
    pub velocity: Vec<BigReal>,
    pub start: BigReal,
    pub end: BigReal,
    pub omega_start: BigReal,
    pub omega_end: BigReal,
    /// Conserved ½ż² − V along the path.
    pub energy_shift: BigReal,
}

fn rk_step_max(prec: Precision) -> f64 {
    10f64.powf(-(prec.digits() as f64) / 8.0).min(0.05)
}

/// State (z, ψ, ψ') advanced with RK4; ψ follows ψ'' = V''(z)ψ.
struct Marcher<'a> {
    pair: &'a WellPair,
    shift2: BigReal,
}

impl Marcher<'_> {
    fn speed(&self, z: &BigReal) -> BigReal {
        let two = z.int(2);
        (&two * self.pair.value(z) + &self.shift2).abs().sqrt()
    }

    fn step(&self, s: &[BigReal; 3], h: &BigReal, fluct: bool) -> [BigReal; 3] {
        let two = h.int(2);
        let half = h / &two;
        let deriv = |st: &[BigReal; 3]| -> [BigReal; 3] {
            let dz = self.speed(&st[0]);
            if fluct {
                [dz, st[2].clone(), self.pair.curvature(&st[0]) * &st[1]]
            } else {
                [dz, h.int(0), h.int(0)]
            }
        };
        let add = |a: &[BigReal; 3], k: &[BigReal; 3], c: &BigReal| -> [BigReal; 3] {
            [&a[0] + c * &k[0], &a[1] + c * &k[1], &a[2] + c * &k[2]]
        };
        let k1 = deriv(s);
        let k2 = deriv(&add(s, &k1, &half));
        let k3 = deriv(&add(s, &k2, &half));
        let k4 = deriv(&add(s, &k3, h));
        let sixth = h / h.int(6);
        let mut out = s.clone();
        for i in 0..3 {
            out[i] = &s[i] + &sixth * (&k1[i] + &two * &k2[i] + &two * &k3[i] + &k4[i]);
        }
        out
    }
}

/// Profile on a grid of `grid_size` intervals spanning [−T/2, T/2] shifted by `tau_offset`.
pub fn instanton_profile_shifted(
    spec: &PotentialSpec,
    horizon: &BigReal,
    grid_size: usize,
    tau_offset: &BigReal,
) -> Result<InstantonProfile> {
    if horizon.to_f64() < 20.0 {
        return Err(TunnelError::HorizonTooShort(horizon.to_f64()));
    }
    if grid_size < 10 {
        return Err(TunnelError::InvalidInput(format!("grid of {grid_size} intervals is too coarse")));
    }
    let pair = well_pair(spec)?;
    let prec = pair.precision();
    let ell = solve_shift(&pair, horizon)?;
    let shift = ell.exp();
    let marcher = Marcher { pair: &pair, shift2: &shift * BigReal::from_i64(2, prec) };
    let dt = horizon / BigReal::from_u64(grid_size as u64, prec);
    let sub = (dt.to_f64() / rk_step_max(prec)).ceil().max(1.0) as usize;
    let h = &dt / BigReal::from_u64(sub as u64, prec);
    let t0 = tau_offset - horizon / BigReal::from_i64(2, prec);

    let mut state = [pair.start.clone(), BigReal::zero(prec), BigReal::zero(prec)];
    let mut tau = Vec::with_capacity(grid_size + 1);
    let mut position = Vec::with_capacity(grid_size + 1);
    let mut velocity = Vec::with_capacity(grid_size + 1);
    for i in 0..=grid_size {
        if i > 0 {
            for _ in 0..sub {
                state = marcher.step(&state, &h, false);
            }
        }
        tau.push(&t0 + &dt * BigReal::from_u64(i as u64, prec));
        velocity.push(marcher.speed(&state[0]));
        position.push(state[0].clone());
    }
    if position.windows(2).any(|w| w[1] < w[0]) {
        return Err(TunnelError::NoProfile("profile is not monotone".into()));
    }
    Ok(InstantonProfile {
        horizon: horizon.clone(),
        tau,
        position,
        velocity,
        start: pair.start.clone(),
        end: pair.end.clone(),
        omega_start: pair.omega_start.clone(),
        omega_end: pair.omega_end.clone(),
        energy_shift: shift,
    })
}

/// Profile on [−T/2, T/2] with `grid_size` intervals.
pub fn instanton_profile(spec: &PotentialSpec, horizon: &BigReal, grid_size: usize) -> Result<InstantonProfile> {
    instanton_profile_shifted(spec, horizon, grid_size, &BigReal::zero(horizon.precision()))
}

/// How A₊ and A₋ are weighted into one constant when the end frequencies differ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ACombination {
    /// A₊^{1/(1+ω)} A₋^{ω/(1+ω)}: invariant under τ-translation of the profile.
    #[default]
    EndWeighted,
    /// A₊^{ω/(1+ω)} A₋^{1/(1+ω)}.
    StartWeighted,
}

#[derive(Clone, Debug)]
pub struct AsymptoticConstants {
    /// Velocity constant toward the end minimum: ż ≈ A₊ e^{−ω τ}.
    pub a_plus: BigReal,
    /// Velocity constant leaving the start minimum: ż ≈ A₋ e^{τ}.
    pub a_minus: BigReal,
    /// Frequency ratio ω_end/ω_start.
    pub omega: BigReal,
}

impl AsymptoticConstants {
    pub fn combined(&self, how: ACombination) -> BigReal {
        let one = self.omega.int(1);
        let denom = &one + &self.omega;
        let (p_plus, p_minus) = match how {
            ACombination::EndWeighted => (denom.recip(), &self.omega / &denom),
            ACombination::StartWeighted => (&self.omega / &denom, denom.recip()),
        };
        (self.a_plus.ln() * p_plus + self.a_minus.ln() * p_minus).exp()
    }
}

/// Relative spread above which a plateau is rejected.
pub const PLATEAU_SPREAD_LIMIT: f64 = 1e-2;

fn plateau_mean(samples: &[BigReal]) -> Result<BigReal> {
    let prec = samples[0].precision();
    let mut sum = BigReal::zero(prec);
    let mut lo = samples[0].clone();
    let mut hi = samples[0].clone();
    for s in samples {
        sum += s;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let mean = sum / BigReal::from_u64(samples.len() as u64, prec);
    let spread = ((hi - lo) / &mean).to_f64();
    if spread > PLATEAU_SPREAD_LIMIT {
        return Err(TunnelError::PlateauNoisy { spread });
    }
    Ok(mean)
}

/// Plateau fit of A₋ and A₊ from e^{∓ωτ} ż(τ).
///
/// Each asymptotic half runs from 2 e-folds inside the boundary to 3 e-folds
/// before the jump; the central 60% of it is averaged.
pub fn asymptotic_a(profile: &InstantonProfile) -> Result<AsymptoticConstants> {
    let n = profile.tau.len();
    let jump = (0..n)
        .max_by(|&i, &j| profile.velocity[i].partial_cmp(&profile.velocity[j]).expect("finite"))
        .expect("nonempty profile");
    let tf = |i: usize| profile.tau[i].to_f64();
    let (w0, w1) = (profile.omega_start.to_f64(), profile.omega_end.to_f64());
    if (tf(jump) - tf(0)) * w0 < 5.0 || (tf(n - 1) - tf(jump)) * w1 < 5.0 {
        return Err(TunnelError::HorizonTooShort(profile.horizon.to_f64()));
    }
    let window = |a: f64, b: f64| -> (f64, f64) {
        let pad = 0.2 * (b - a);
        (a + pad, b - pad)
    };
    let (l0, l1) = window(tf(0) + 2.0 / w0, tf(jump) - 3.0 / w0);
    let (r0, r1) = window(tf(jump) + 3.0 / w1, tf(n - 1) - 2.0 / w1);
    let pick = |lo: f64, hi: f64, sign: i64, w: &BigReal| -> Result<BigReal> {
        let samples: Vec<BigReal> = (0..n)
            .filter(|&i| tf(i) >= lo && tf(i) <= hi)
            .map(|i| {
                let e = (w * &profile.tau[i] * profile.tau[i].int(sign)).exp();
                e * &profile.velocity[i]
            })
            .collect();
        if samples.len() < 3 {
            return Err(TunnelError::HorizonTooShort(profile.horizon.to_f64()));
        }
        plateau_mean(&samples)
    };
    let a_minus = pick(l0, l1, -1, &profile.omega_start)?;
    let a_plus = pick(r0, r1, 1, &profile.omega_end)?;
    Ok(AsymptoticConstants { a_plus, a_minus, omega: &profile.omega_end / &profile.omega_start })
}

/// A± by quadrature, with τ = 0 where the instanton crosses the midpoint of its minima.
///
/// ln A = ln ω + ln L + ∫₀^L [ω/√(2V) − 1/u] du over each half.
pub fn asymptotic_a_exact(spec: &PotentialSpec) -> Result<AsymptoticConstants> {
    let pair = well_pair(spec)?;
    let prec = pair.precision();
    let mid = pair.midpoint();
    let zero = BigReal::zero(prec);
    let mut consts = Vec::with_capacity(2);
    for side in [Side::Start, Side::End] {
        let w = pair.omega(side).clone();
        let len = match side {
            Side::Start => &mid - &pair.start,
            Side::End => &pair.end - &mid,
        };
        let r = tanh_sinh(&zero, &len, &quad_tol(prec), |_, u, _| {
            let c = pair.cubic_part(side, u);
            let p = w.sqr() + u * &c;
            let rp = p.sqrt();
            -(c / (&rp * (&w + &rp)))
        })?;
        consts.push((w.ln() + len.ln() + r.value).exp());
    }
    let a_plus = consts.pop().expect("two sides");
    let a_minus = consts.pop().expect("two sides");
    Ok(AsymptoticConstants { a_plus, a_minus, omega: &pair.omega_end / &pair.omega_start })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WellSite {
    Left,
    Center,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathSetting {
    TwoMinimaPeriodic { same_endpoint: bool },
    ThreeMinimaPeriodic { same_endpoint: bool },
    InfiniteLine { displacement: i64 },
    TripleWell { from: WellSite, to: WellSite },
}

fn pow2(e: u32) -> BigUint {
    BigUint::one() << e
}

/// C(n, k) as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// (c_n^(0), c_n^(1)) on the triangle by the recursions
/// c_n^(1) = 2c_{n−2}^(1) + c_{n−1}^(1) and c_n^(0) = 2c_{n−1}^(1).
pub fn triangle_counts(n: u32) -> (BigUint, BigUint) {
    let mut c1: Vec<BigUint> = vec![BigUint::zero(), BigUint::one()];
    for m in 2..=n as usize {
        let next = &c1[m - 2] * 2u32 + &c1[m - 1];
        c1.push(next);
    }
    let c0 = if n == 0 { BigUint::one() } else { &c1[n as usize - 1] * 2u32 };
    (c0, c1[n as usize].clone())
}

/// Closed forms (2^n + 2(−1)^n)/3 and (2^n − (−1)^n)/3.
pub fn triangle_closed_forms(n: u32) -> (BigUint, BigUint) {
    let p = pow2(n);
    if n % 2 == 0 {
        ((&p + 2u32) / 3u32, (&p - 1u32) / 3u32)
    } else {
        ((&p - 2u32) / 3u32, (&p + 1u32) / 3u32)
    }
}

/// Number of topologically distinct n-instanton paths.
pub fn path_count(setting: PathSetting, n: u32) -> BigUint {
    match setting {
        PathSetting::TwoMinimaPeriodic { same_endpoint } => {
            if (n % 2 == 0) == same_endpoint {
                pow2(n)
            } else {
                BigUint::zero()
            }
        }
        PathSetting::ThreeMinimaPeriodic { same_endpoint } => {
            let (c0, c1) = triangle_counts(n);
            if same_endpoint {
                c0
            } else {
                c1
            }
        }
        PathSetting::InfiniteLine { displacement } => {
            let k = displacement.unsigned_abs();
            let n64 = n as u64;
            if k > n64 || (n64 + k) % 2 == 1 {
                BigUint::zero()
            } else {
                binomial(n64, (n64 + k) / 2)
            }
        }
        PathSetting::TripleWell { from, to } => {
            use WellSite::*;
            let center_hops = matches!(from, Center) as u32 + matches!(to, Center) as u32;
            match center_hops {
                2 if n % 2 == 0 => pow2(n / 2),
                1 if n % 2 == 1 => pow2((n - 1) / 2),
                0 if n % 2 == 0 => {
                    if n == 0 {
                        if from == to {
                            BigUint::one()
                        } else {
                            BigUint::zero()
                        }
                    } else {
                        pow2(n / 2 - 1)
                    }
                }
                _ => BigUint::zero(),
            }
        }
    }
}

fn big_to_real(n: &BigUint, prec: Precision) -> Result<BigReal> {
    BigReal::parse(&n.to_string(), prec)
}

/// Σ_{n ≤ n_max} N_n^(k) xⁿ/n! with line counts N; tends to I_|k|(2x).
pub fn counting_series(k: i64, x: &BigReal, n_max: u32) -> Result<BigReal> {
    let prec = x.precision();
    let mut sum = BigReal::zero(prec);
    let mut term = BigReal::one(prec);
    for n in 0..=n_max {
        if n > 0 {
            term = term * x / BigReal::from_u64(n as u64, prec);
        }
        let count = path_count(PathSetting::InfiniteLine { displacement: k }, n);
        if !count.is_zero() {
            sum += &term * big_to_real(&count, prec)?;
        }
    }
    Ok(sum)
}

/// Nearest-neighbour hopping t = 2/(π^{3/2}√g)·e^{−2/(π²g)} of the cosine lattice.
fn cosine_hopping(g: &BigReal) -> BigReal {
    let prec = g.precision();
    let pi = BigReal::pi(prec);
    let s = BigReal::from_i64(2, prec) / pi.sqr();
    BigReal::from_i64(2, prec) / (pi.powi(3).sqrt() * g.sqrt()) * (-(s / g)).exp()
}

/// Lowest band E(θ) = 1/2 − cos θ · 4/(π^{3/2}√g)·e^{−2/(π²g)}.
pub fn band_dispersion(g: &BigReal, theta: &BigReal) -> Result<BigReal> {
    let prec = g.precision();
    let pi = BigReal::pi(prec);
    if theta.is_negative() || *theta > pi {
        return Err(TunnelError::InvalidInput("θ must lie in [0, π]".into()));
    }
    Ok(BigReal::ratio(1, 2, prec) - theta.cos() * BigReal::from_i64(2, prec) * cosine_hopping(g))
}

#[derive(Clone, Debug)]
pub struct WkbPrediction {
    /// Full action S0 = s/g of one adjacent instanton.
    pub action: BigReal,
    pub a_constant: BigReal,
    /// ΔE·e^{S0}.
    pub prefactor: BigReal,
    /// Distinct energies, ascending, with degeneracies.
    pub levels: Vec<(BigReal, usize)>,
    pub splitting: BigReal,
    /// amplitudes[minimum][state]; states run over levels with multiplicity.
    pub amplitudes: Vec<Vec<BigReal>>,
}

/// Closed-form spectrum with the default A combination.
pub fn predict(spec: &PotentialSpec) -> Result<WkbPrediction> {
    predict_with(spec, ACombination::default())
}

pub fn predict_with(spec: &PotentialSpec, how: ACombination) -> Result<WkbPrediction> {
    let prec = spec.precision();
    let g = spec.coupling().clone();
    let half = BigReal::ratio(1, 2, prec);
    let pi = BigReal::pi(prec);
    let quarter_pi = pi.sqrt().sqrt().recip();
    let s = action_s0(spec)?;
    let action = &s / &g;
    let two = BigReal::from_i64(2, prec);
    match spec {
        PotentialSpec::DoubleWell { .. } => {
            let a_constant = two.clone();
            let prefactor = BigReal::from_i64(4, prec) / (&g * &pi).sqrt();
            let splitting = &prefactor * (-&action).exp();
            let amp = &quarter_pi / two.sqrt();
            Ok(WkbPrediction {
                levels: vec![(&half - &splitting / &two, 1), (&half + &splitting / &two, 1)],
                amplitudes: vec![vec![amp.clone(), -&amp], vec![amp.clone(), amp]],
                action,
                a_constant,
                prefactor,
                splitting,
            })
        }
        PotentialSpec::Cosine { boundary, .. } => {
            let t = cosine_hopping(&g);
            let a_constant = &two / &pi;
            match boundary {
                Boundary::InfiniteLine => {
                    let splitting = BigReal::from_i64(4, prec) * &t;
                    Ok(WkbPrediction {
                        prefactor: &splitting * action.exp(),
                        levels: vec![(&half - &two * &t, 1), (&half + &two * &t, 1)],
                        amplitudes: Vec::new(),
                        action,
                        a_constant,
                        splitting,
                    })
                }
                Boundary::Periodic(k) => {
                    let k = *k;
                    if k < 2 {
                        return Err(TunnelError::Unsupported("a ring needs at least two minima".into()));
                    }
                    let mut energies: Vec<(BigReal, usize)> = Vec::new();
                    for j in 0..=k / 2 {
                        let theta = &two * &pi * BigReal::from_u64(j as u64, prec) / BigReal::from_u64(k as u64, prec);
                        let e = &half - theta.cos() * &two * &t;
                        let deg = if j == 0 || 2 * j == k { 1 } else { 2 };
                        energies.push((e, deg));
                    }
                    energies.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
                    let splitting = &energies[1].0 - &energies[0].0;
                    let amplitudes = ring_amplitudes(k, &quarter_pi);
                    Ok(WkbPrediction {
                        prefactor: &splitting * action.exp(),
                        levels: energies,
                        amplitudes,
                        action,
                        a_constant,
                        splitting,
                    })
                }
            }
        }
        PotentialSpec::TripleWell { .. } => {
            let consts = asymptotic_a_exact(spec)?;
            let a_constant = consts.combined(how);
            let w = consts.omega.clone();
            let one = BigReal::one(prec);
            let prefactor = (two.ln() * BigReal::ratio(3, 4, prec)).exp()
                * (&one + &w).sqrt().sqrt().recip()
                * (&w / &pi).sqrt()
                * &a_constant
                / g.sqrt();
            let splitting = &prefactor * (-&action).exp();
            let side = &quarter_pi * &half;
            let center = (&two * w.sqr() / (&one + &w)).sqrt().sqrt() / two.sqrt() * &quarter_pi;
            let edge = &quarter_pi / two.sqrt();
            let zero = BigReal::zero(prec);
            Ok(WkbPrediction {
                levels: vec![(&half - &splitting, 1), (half.clone(), 1), (&half + &splitting, 1)],
                amplitudes: vec![
                    vec![side.clone(), edge.clone(), -&side],
                    vec![center.clone(), zero, center],
                    vec![side.clone(), -&edge, -&side],
                ],
                action,
                a_constant,
                prefactor,
                splitting,
            })
        }
        PotentialSpec::Polynomial { minima, .. } if minima.as_ref().is_some_and(|m| m.len() == 2) => {
            let consts = asymptotic_a_exact(spec)?;
            if (consts.omega.to_f64() - 1.0).abs() > 1e-12 {
                return Err(TunnelError::Unsupported("two minima of unequal curvature".into()));
            }
            let a_constant = consts.combined(how);
            let prefactor = &two * &a_constant / (&g * &pi).sqrt();
            let splitting = &prefactor * (-&action).exp();
            Ok(WkbPrediction {
                levels: vec![(&half - &splitting / &two, 1), (&half + &splitting / &two, 1)],
                amplitudes: Vec::new(),
                action,
                a_constant,
                prefactor,
                splitting,
            })
        }
        _ => Err(TunnelError::Unsupported("no closed-form prediction for this family".into())),
    }
}

/// Site amplitudes for K = 2 and 3 (empty otherwise). States: ground, then excited.
fn ring_amplitudes(k: usize, base: &BigReal) -> Vec<Vec<BigReal>> {
    let prec = base.precision();
    let r2 = BigReal::from_i64(2, prec).sqrt();
    match k {
        2 => {
            let c = base / &r2;
            vec![vec![c.clone(), c.clone()], vec![c.clone(), -c]]
        }
        3 => {
            let r3 = BigReal::from_i64(3, prec).sqrt();
            let r6 = BigReal::from_i64(6, prec).sqrt();
            let g0 = base / &r3;
            let even_center = base * (BigReal::ratio(2, 3, prec)).sqrt();
            let even_side = -(base / &r6);
            let odd = base / &r2;
            vec![
                vec![g0.clone(), even_center, BigReal::zero(prec)],
                vec![g0.clone(), even_side.clone(), odd.clone()],
                vec![g0, even_side, -odd],
            ]
        }
        _ => Vec::new(),
    }
}

/// RK4 step for the fluctuation equation.
const FLUCTUATION_STEP: f64 = 0.005;

#[derive(Clone, Debug)]
pub struct GelfandYaglom {
    /// κ√λ₀ from the integrated fluctuation equation.
    pub numeric: BigReal,
    /// √(2/S0)·aA.
    pub closed_form: BigReal,
    pub lambda0: BigReal,
    /// Zero-mode tail constant B read off the growing solution.
    pub tail_constant: BigReal,
    /// Free solution ψ⁰(T/2) from the same integrator, compare sinh T.
    pub free_end_value: BigReal,
}

/// Integrates ψ'' = V''(x̄/a) ψ from ψ(−T/2) = 0, ψ'(−T/2) = 1 along the profile.
///
/// On the left half ψ ≈ e^{T/2} y₁/(2B) with y₁ = ẋ/√S0, so B is read off there,
/// λ₀ = 4B²e^{−T}, and ψ(T/2) = 1 in the same asymptotic solution.
pub fn gelfand_yaglom_check(spec: &PotentialSpec, horizon: &BigReal) -> Result<GelfandYaglom> {
    if !matches!(spec, PotentialSpec::DoubleWell { .. } | PotentialSpec::Cosine { .. }) {
        return Err(TunnelError::Unsupported("determinant check covers the double well and cosine".into()));
    }
    if horizon.to_f64() < 30.0 {
        return Err(TunnelError::HorizonTooShort(horizon.to_f64()));
    }
    let pair = well_pair(spec)?;
    let prec = pair.precision();
    let two = BigReal::from_i64(2, prec);
    let ell = solve_shift(&pair, horizon)?;
    let marcher = Marcher { pair: &pair, shift2: ell.exp() * &two };
    let steps = (horizon.to_f64() / FLUCTUATION_STEP).ceil() as usize;
    let h = horizon / BigReal::from_u64(steps as u64, prec);
    let t0 = -(horizon / &two);
    let s = action_s0(spec)?;
    let rs = s.sqrt();
    let half_t = (horizon / &two).exp();

    let mut state = [pair.start.clone(), BigReal::zero(prec), BigReal::one(prec)];
    let mut b_sum = BigReal::zero(prec);
    let mut b_count = 0u64;
    let quarter = -horizon.to_f64() / 4.0;
    for i in 1..=steps / 2 {
        state = marcher.step(&state, &h, true);
        let tau = (&t0 + &h * BigReal::from_u64(i as u64, prec)).to_f64();
        if tau >= quarter {
            let b = &half_t * marcher.speed(&state[0]) / (&two * &rs * &state[1]);
            b_sum += b;
            b_count += 1;
        }
    }
    if b_count == 0 {
        return Err(TunnelError::HorizonTooShort(horizon.to_f64()));
    }
    let b = b_sum / BigReal::from_u64(b_count, prec);

    // Free comparison: ψ'' = ψ with the same initial data.
    let mut free = (BigReal::zero(prec), BigReal::one(prec));
    let sixth = &h / BigReal::from_i64(6, prec);
    let hh = &h / &two;
    for _ in 0..steps {
        let (p, q) = &free;
        let k1 = (q.clone(), p.clone());
        let k2 = (q + &hh * &k1.1, p + &hh * &k1.0);
        let k3 = (q + &hh * &k2.1, p + &hh * &k2.0);
        let k4 = (q + &h * &k3.1, p + &h * &k3.0);
        free = (
            p + &sixth * (&k1.0 + &two * &k2.0 + &two * &k3.0 + &k4.0),
            q + &sixth * (&k1.1 + &two * &k2.1 + &two * &k3.1 + &k4.1),
        );
    }
    let free_end_value = free.0;

    let lambda0 = BigReal::from_i64(4, prec) * b.sqr() * (-horizon).exp();
    let end_value = BigReal::one(prec);
    let numeric = (&lambda0 * &free_end_value / end_value).sqrt();
    let a_constant = asymptotic_a_exact(spec)?.combined(ACombination::EndWeighted);
    let closed_form = (&two / &s).sqrt() * a_constant;
    Ok(GelfandYaglom { numeric, closed_form, lambda0, tail_constant: b, free_end_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(30).unwrap()
    }

    #[test]
    fn binomial_small() {
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn triple_well_center_to_side() {
        let s = PathSetting::TripleWell { from: WellSite::Center, to: WellSite::Right };
        assert_eq!(path_count(s, 5), BigUint::from(4u32));
        assert_eq!(path_count(s, 4), BigUint::zero());
    }

    #[test]
    fn band_rejects_theta_outside() {
        let g = BigReal::parse("0.01", p()).unwrap();
        assert!(band_dispersion(&g, &BigReal::from_i64(4, p())).is_err());
    }

    #[test]
    fn quartic_has_no_instanton() {
        let spec = PotentialSpec::AnharmonicQuartic {
            eps: BigReal::one(p()),
            g: BigReal::one(p()),
            c: BigReal::zero(p()),
        };
        assert!(matches!(action_s0(&spec), Err(TunnelError::Unsupported(_))));
    }
}
