//! Arbitrary-precision real scalar with a decimal digit budget.
//!
//! Backed by `astro-float`. Binary ops run at the larger of the two operand
//! precisions, so mixing a low-precision literal into a high-precision
//! computation never loses bits on the high side.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::{Result, TunnelError};

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision expressed in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub fn new(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(TunnelError::InvalidInput("digits must be positive".into()));
        }
        Ok(Self { digits })
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Mantissa bits, with one extra word of guard bits.
    pub fn bits(self) -> usize {
        let b = (self.digits as f64 * LOG2_10).ceil() as usize + 64;
        b.div_ceil(64) * 64
    }

    /// 10^(−digits), the nominal unit roundoff of this budget.
    pub fn epsilon(self) -> BigReal {
        BigReal::from_i64(10, self).powi(self.digits as i64).recip()
    }
}

/// Decimal digits needed to resolve a splitting of size 10^`log10_splitting`,
/// plus 15 guard digits. Never less than 20.
pub fn policy_digits(log10_splitting: f64) -> u32 {
    let need = (-log10_splitting).ceil().max(0.0) as u32 + 15;
    need.max(20)
}

#[derive(Clone)]
pub struct BigReal {
    v: BigFloat,
    prec: Precision,
}

impl BigReal {
    fn wrap(v: BigFloat, prec: Precision) -> Self {
        Self { v, prec }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(x: i64, prec: Precision) -> Self {
        Self::wrap(BigFloat::from_i64(x, prec.bits()), prec)
    }

    pub fn from_i128(x: i128, prec: Precision) -> Self {
        Self::wrap(BigFloat::from_i128(x, prec.bits()), prec)
    }

    pub fn from_u64(x: u64, prec: Precision) -> Self {
        Self::wrap(BigFloat::from_u64(x, prec.bits()), prec)
    }

    /// Exact binary value of `x`; use [`BigReal::parse`] for decimal literals.
    pub fn from_f64(x: f64, prec: Precision) -> Self {
        Self::wrap(BigFloat::from_f64(x, prec.bits()), prec)
    }

    pub fn ratio(num: i64, den: i64, prec: Precision) -> Self {
        Self::from_i64(num, prec) / Self::from_i64(den, prec)
    }

    /// Parse a decimal literal such as `0.214` or `1e-3` at full precision.
    pub fn parse(s: &str, prec: Precision) -> Result<Self> {
        let t = s.trim();
        let ok = !t.is_empty()
            && t
                .chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        if !ok {
            return Err(TunnelError::InvalidInput(format!("not a number: {s:?}")));
        }
        let v = with_consts(|cc| BigFloat::parse(t, Radix::Dec, prec.bits(), RM, cc));
        if v.is_nan() || v.is_inf() {
            return Err(TunnelError::InvalidInput(format!("not a number: {s:?}")));
        }
        Ok(Self::wrap(v, prec))
    }

    pub fn pi(prec: Precision) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(prec.bits(), RM)), prec)
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn digits(&self) -> u32 {
        self.prec.digits
    }

    /// Same value, re-rounded to `prec`.
    pub fn with_precision(&self, prec: Precision) -> Self {
        let mut v = self.v.clone();
        v.set_precision(prec.bits(), RM).expect("precision change");
        Self::wrap(v, prec)
    }

    /// Integer constant at this value's precision.
    pub fn int(&self, x: i64) -> Self {
        Self::from_i64(x, self.prec)
    }

    /// Binary f64 constant at this value's precision.
    pub fn lit(&self, x: f64) -> Self {
        Self::from_f64(x, self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.v.abs(), self.prec)
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.v.reciprocal(self.prec.bits(), RM), self.prec)
    }

    pub fn sqr(&self) -> Self {
        self * self
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.prec.bits(), RM), self.prec)
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = Self::wrap(self.v.powi(n.unsigned_abs() as usize, self.prec.bits(), RM), self.prec);
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    pub fn pow(&self, e: &BigReal) -> Self {
        let prec = self.prec.max(e.prec);
        Self::wrap(with_consts(|cc| self.v.pow(&e.v, prec.bits(), RM, cc)), prec)
    }

    pub fn exp(&self) -> Self {
        self.unary(|v, p, cc| v.exp(p, RM, cc))
    }

    pub fn ln(&self) -> Self {
        self.unary(|v, p, cc| v.ln(p, RM, cc))
    }

    pub fn sin(&self) -> Self {
        self.unary(|v, p, cc| v.sin(p, RM, cc))
    }

    pub fn cos(&self) -> Self {
        self.unary(|v, p, cc| v.cos(p, RM, cc))
    }

    pub fn sinh(&self) -> Self {
        self.unary(|v, p, cc| v.sinh(p, RM, cc))
    }

    pub fn cosh(&self) -> Self {
        self.unary(|v, p, cc| v.cosh(p, RM, cc))
    }

    pub fn tanh(&self) -> Self {
        self.unary(|v, p, cc| v.tanh(p, RM, cc))
    }

    pub fn atan(&self) -> Self {
        self.unary(|v, p, cc| v.atan(p, RM, cc))
    }

    fn unary(&self, f: impl FnOnce(&BigFloat, usize, &mut Consts) -> BigFloat) -> Self {
        let v = with_consts(|cc| f(&self.v, self.prec.bits(), cc));
        Self::wrap(v, self.prec)
    }

    pub fn floor(&self) -> Self {
        Self::wrap(self.v.floor(), self.prec)
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Nearest f64 (round-trip through a 20-digit decimal string).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        self.to_sci(20).parse().unwrap_or(f64::NAN)
    }

    /// log10|x| as f64, valid far outside the f64 exponent range.
    pub fn log10_abs(&self) -> f64 {
        if self.v.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mant, exp) = self.decimal_parts(20);
        let m: f64 = format!("0.{mant}").parse().unwrap_or(1.0);
        m.log10() + exp as f64
    }

    /// Decimal digits (rounded to `sig` significant figures) and exponent e
    /// such that |x| = 0.d₁d₂… × 10^e.
    fn decimal_parts(&self, sig: usize) -> (String, i64) {
        let s = with_consts(|cc| self.v.abs().format(Radix::Dec, RM, cc)).unwrap_or_default();
        let (mant, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().unwrap_or(0)),
            None => (s.as_str(), 0),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        let all: String = int_part.chars().chain(frac_part.chars()).collect();
        let lead = all.find(|c: char| c != '0').unwrap_or(all.len());
        let digits = &all[lead..];
        let mut e10 = exp + int_part.len() as i64 - lead as i64;
        if digits.is_empty() {
            return ("0".repeat(sig), 0);
        }
        let mut d: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
        if d.len() > sig {
            let round_up = d[sig] >= 5;
            d.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        d.insert(0, 1);
                        d.truncate(sig);
                        e10 += 1;
                        break;
                    }
                    i -= 1;
                    if d[i] == 9 {
                        d[i] = 0;
                    } else {
                        d[i] += 1;
                        break;
                    }
                }
            }
        }
        d.resize(sig, 0);
        (d.iter().map(|x| (x + b'0') as char).collect(), e10)
    }

    /// Scientific notation with exactly `sig` significant digits, e.g. `6.20927e-1`.
    pub fn to_sci(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.v.is_zero() {
            return format!("{}e+0", if sig > 1 { format!("0.{}", "0".repeat(sig - 1)) } else { "0".into() });
        }
        let (d, e10) = self.decimal_parts(sig);
        let sign = if self.is_negative() { "-" } else { "" };
        let exp = e10 - 1;
        let es = if exp < 0 { format!("-{}", -exp) } else { format!("+{exp}") };
        if sig == 1 {
            format!("{sign}{d}e{es}")
        } else {
            format!("{sign}{}.{}e{es}", &d[..1], &d[1..])
        }
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci(self.prec.digits.min(40) as usize))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.prec.digits as usize);
        f.write_str(&self.to_sci(sig))
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(BigFloat::neg(&self.v), self.prec)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $f:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let prec = self.prec.max(rhs.prec);
                BigReal::wrap(self.v.$f(&rhs.v, prec.bits(), RM), prec)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.$m(&rhs)
            }
        }
        impl $atr<&BigReal> for BigReal {
            fn $am(&mut self, rhs: &BigReal) {
                *self = (&*self).$m(rhs);
            }
        }
        impl $atr<BigReal> for BigReal {
            fn $am(&mut self, rhs: BigReal) {
                *self = (&*self).$m(&rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, add);
binop!(Sub, sub, SubAssign, sub_assign, sub);
binop!(Mul, mul, MulAssign, mul_assign, mul);
binop!(Div, div, DivAssign, div_assign, div);

/// Left-to-right sum, so results do not depend on scheduling.
pub fn sum_ordered<'a>(items: impl IntoIterator<Item = &'a BigReal>, prec: Precision) -> BigReal {
    let mut acc = BigReal::zero(prec);
    for x in items {
        acc += x;
    }
    acc
}

/// Left-to-right dot product.
pub fn dot(a: &[BigReal], b: &[BigReal], prec: Precision) -> BigReal {
    let mut acc = BigReal::zero(prec);
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    #[test]
    fn formats_with_fixed_digit_count() {
        let x = BigReal::ratio(1, 3, p(30));
        assert_eq!(x.to_sci(6), "3.33333e-1");
        assert_eq!(BigReal::from_i64(-1250, p(30)).to_sci(3), "-1.25e+3");
        assert_eq!(BigReal::from_f64(9.9996, p(30)).to_sci(4), "1.000e+1");
        assert_eq!(BigReal::zero(p(20)).to_sci(3), "0.00e+0");
    }

    #[test]
    fn pi_matches_known_digits() {
        let pi = BigReal::pi(p(50));
        assert_eq!(pi.to_sci(40), "3.141592653589793238462643383279502884197e+0");
    }

    #[test]
    fn parse_is_exact_in_decimal() {
        let x = BigReal::parse("0.214", p(40)).unwrap();
        let y = BigReal::ratio(214, 1000, p(40));
        assert!((x - y).abs() < p(40).epsilon());
        assert!(BigReal::parse("abc", p(20)).is_err());
    }

    #[test]
    fn log10_of_tiny_values() {
        let x = BigReal::from_i64(10, p(30)).powi(-500) * BigReal::from_i64(3, p(30));
        assert!((x.log10_abs() - (-500.0 + 3f64.log10())).abs() < 1e-12);
    }

    #[test]
    fn policy_adds_guard_digits() {
        assert_eq!(policy_digits(-30.2), 46);
        assert_eq!(policy_digits(-1.0), 20);
    }
}
