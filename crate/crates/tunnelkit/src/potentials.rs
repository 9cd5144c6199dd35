//! Potential families, their scaled forms and minima.
//!
//! Multi-well families are written in unscaled form V(x) with minima at
//! integer spacing. The Hamiltonian acts with the scaled potential
//! V̂(X) = g⁻¹V(√g X), whose minima sit at multiples of a = g^(−1/2).
//! The quartic oscillator is the exception: g is a coupling there, and
//! V̂ = V.

use crate::error::{Result, TunnelError};
use crate::numerics::{BigReal, Precision};

#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    Periodic(usize),
    InfiniteLine,
}

/// A minimum of the scaled potential with the unscaled curvature V''.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub position: BigReal,
    pub curvature: BigReal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    /// V = εx²/2 + g x⁴/4 + c.
    AnharmonicQuartic { eps: BigReal, g: BigReal, c: BigReal },
    /// V = (x² − 1)²/8.
    DoubleWell { g: BigReal },
    /// V = (1 − cos 2πx)/(4π²).
    Cosine { g: BigReal, boundary: Boundary },
    /// Tenth-order triple well with central curvature 1 + δ.
    TripleWell { g: BigReal, delta: BigReal },
    /// V = Σ coeffs[k] x^k with optional minima metadata (scaled positions).
    Polynomial { coeffs: Vec<BigReal>, g: BigReal, minima: Option<Vec<Minimum>> },
}

/// Triple-well coefficient of x^k split as rational + multiple of 512/(27π²) + δ·rational.
struct TripleTerm {
    power: usize,
    rational: (i64, i64),
    pi_multiple: i64,
    delta: (i64, i64),
}

const TRIPLE_TERMS: [TripleTerm; 5] = [
    TripleTerm { power: 2, rational: (1, 2), pi_multiple: 0, delta: (1, 2) },
    TripleTerm { power: 4, rational: (-85, 24), pi_multiple: 1, delta: (-7, 2) },
    TripleTerm { power: 6, rational: (31, 4), pi_multiple: -3, delta: (15, 2) },
    TripleTerm { power: 8, rational: (-55, 8), pi_multiple: 3, delta: (-13, 2) },
    TripleTerm { power: 10, rational: (13, 6), pi_multiple: -1, delta: (2, 1) },
];

/// Coefficients c_0..c_10 of the triple-well polynomial at deformation δ.
pub fn triple_well_coefficients(delta: &BigReal) -> Vec<BigReal> {
    let prec = delta.precision();
    let pi = BigReal::pi(prec);
    let unit = BigReal::from_i64(512, prec) / (BigReal::from_i64(27, prec) * pi.sqr());
    let mut c = vec![BigReal::zero(prec); 11];
    for t in &TRIPLE_TERMS {
        let r = BigReal::ratio(t.rational.0, t.rational.1, prec);
        let d = BigReal::ratio(t.delta.0, t.delta.1, prec) * delta;
        c[t.power] = r + &unit * BigReal::from_i64(t.pi_multiple, prec) + d;
    }
    c
}

fn poly_eval(coeffs: &[BigReal], x: &BigReal, order: usize) -> BigReal {
    let prec = x.precision();
    let mut acc = BigReal::zero(prec);
    for k in (order..coeffs.len()).rev() {
        let mut falling = 1i64;
        for j in 0..order {
            falling *= (k - j) as i64;
        }
        acc = acc * x + &coeffs[k] * BigReal::from_i64(falling, prec);
    }
    acc
}

fn check_order(order: usize) -> Result<()> {
    if order > 3 {
        return Err(TunnelError::InvalidInput(format!("derivative order {order} > 3")));
    }
    Ok(())
}

impl PotentialSpec {
    pub fn double_well(g: BigReal) -> Self {
        Self::DoubleWell { g }
    }

    pub fn triple_well(g: BigReal, delta: BigReal) -> Self {
        Self::TripleWell { g, delta }
    }

    pub fn cosine(g: BigReal, boundary: Boundary) -> Self {
        Self::Cosine { g, boundary }
    }

    pub fn coupling(&self) -> &BigReal {
        match self {
            Self::AnharmonicQuartic { g, .. }
            | Self::DoubleWell { g }
            | Self::Cosine { g, .. }
            | Self::TripleWell { g, .. }
            | Self::Polynomial { g, .. } => g,
        }
    }

    pub fn precision(&self) -> Precision {
        self.coupling().precision()
    }

    /// Distance between adjacent minima in scaled coordinates, a = g^(−1/2).
    pub fn scale(&self) -> BigReal {
        self.coupling().sqrt().recip()
    }

    /// Unscaled polynomial coefficients, or `None` for the cosine family.
    pub fn polynomial(&self) -> Option<Vec<BigReal>> {
        let prec = self.precision();
        match self {
            Self::AnharmonicQuartic { eps, g, c } => Some(vec![
                c.clone(),
                BigReal::zero(prec),
                eps / BigReal::from_i64(2, prec),
                BigReal::zero(prec),
                g / BigReal::from_i64(4, prec),
            ]),
            Self::DoubleWell { .. } => Some(vec![
                BigReal::ratio(1, 8, prec),
                BigReal::zero(prec),
                BigReal::ratio(-1, 4, prec),
                BigReal::zero(prec),
                BigReal::ratio(1, 8, prec),
            ]),
            Self::TripleWell { delta, .. } => Some(triple_well_coefficients(delta)),
            Self::Polynomial { coeffs, .. } => Some(coeffs.clone()),
            Self::Cosine { .. } => None,
        }
    }

    /// Coefficients of V̂(X) = g⁻¹V(√g X): c_k g^(k/2 − 1). The quartic oscillator is returned as is.
    pub fn scaled_polynomial(&self) -> Option<Vec<BigReal>> {
        let coeffs = self.polynomial()?;
        if matches!(self, Self::AnharmonicQuartic { .. }) {
            return Some(coeffs);
        }
        let g = self.coupling();
        let sg = g.sqrt();
        let mut factor = g.recip();
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            out.push(&c * &factor);
            factor = &factor * &sg;
        }
        Some(out)
    }

    /// d^order V / dx^order at x (unscaled).
    pub fn eval(&self, x: &BigReal, order: usize) -> Result<BigReal> {
        check_order(order)?;
        match self {
            Self::Cosine { .. } => Ok(cosine_unscaled(x, order)),
            _ => Ok(poly_eval(&self.polynomial().expect("polynomial family"), x, order)),
        }
    }

    /// d^order/dX^order of V̂(X).
    pub fn scaled_eval(&self, x: &BigReal, order: usize) -> Result<BigReal> {
        check_order(order)?;
        match self {
            Self::AnharmonicQuartic { .. } => self.eval(x, order),
            Self::Cosine { g, .. } => {
                let sg = g.sqrt();
                let v = cosine_unscaled(&(&sg * x), order);
                Ok(v * sg.powi(order as i64) / g)
            }
            _ => Ok(poly_eval(&self.scaled_polynomial().expect("polynomial family"), x, order)),
        }
    }

    /// Minima of V̂ sorted by position, with unscaled curvature V''.
    pub fn minima(&self) -> Result<Vec<Minimum>> {
        let prec = self.precision();
        let a = self.scale();
        let one = BigReal::one(prec);
        let zero = BigReal::zero(prec);
        let at = |position: BigReal, curvature: BigReal| Minimum { position, curvature };
        match self {
            Self::DoubleWell { .. } => Ok(vec![at(-&a, one.clone()), at(a, one)]),
            Self::Cosine { boundary: Boundary::Periodic(k), .. } => {
                Ok((0..*k).map(|i| at(&a * BigReal::from_u64(i as u64, prec), one.clone())).collect())
            }
            Self::Cosine { boundary: Boundary::InfiniteLine, .. } => Err(TunnelError::Unsupported(
                "the infinite cosine lattice has no finite list of minima".into(),
            )),
            Self::TripleWell { delta, .. } => Ok(vec![
                at(-&a, one.clone()),
                at(zero, &one + delta),
                at(a, one),
            ]),
            Self::AnharmonicQuartic { eps, g, .. } => {
                if !eps.is_negative() {
                    Ok(vec![at(zero, eps.clone())])
                } else {
                    let x = (-eps / g).sqrt();
                    let curv = eps * BigReal::from_i64(-2, prec);
                    Ok(vec![at(-&x, curv.clone()), at(x, curv)])
                }
            }
            Self::Polynomial { minima, .. } => minima
                .clone()
                .ok_or_else(|| TunnelError::Unsupported("polynomial without minima metadata".into())),
        }
    }
}

fn cosine_unscaled(x: &BigReal, order: usize) -> BigReal {
    let prec = x.precision();
    let pi = BigReal::pi(prec);
    let two_pi = &pi * BigReal::from_i64(2, prec);
    let arg = &two_pi * x;
    let four_pi2 = two_pi.sqr();
    match order {
        0 => (BigReal::one(prec) - arg.cos()) / four_pi2,
        1 => arg.sin() / two_pi,
        2 => arg.cos(),
        _ => -(two_pi * arg.sin()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn close(a: &BigReal, b: &BigReal, digits: i64) -> bool {
        (a - b).abs() < BigReal::from_i64(10, a.precision()).powi(-digits)
    }

    #[test]
    fn triple_well_half_point_value() {
        let v = PotentialSpec::triple_well(BigReal::one(p()), BigReal::zero(p()));
        let half = BigReal::ratio(1, 2, p());
        let expect = (BigReal::from_i64(2, p()) * BigReal::pi(p()).sqr()).recip();
        assert!(close(&v.eval(&half, 0).unwrap(), &expect, 35));
    }

    #[test]
    fn triple_well_central_curvature() {
        let d = BigReal::parse("0.1", p()).unwrap();
        let v = PotentialSpec::triple_well(BigReal::one(p()), d);
        let c = v.eval(&BigReal::zero(p()), 2).unwrap();
        assert!(close(&c, &BigReal::parse("1.1", p()).unwrap(), 35));
    }

    #[test]
    fn order_above_three_is_rejected() {
        let v = PotentialSpec::double_well(BigReal::one(p()));
        assert!(v.eval(&BigReal::zero(p()), 4).is_err());
    }
}
