//! Dyadic rationals and log-domain magnitudes.
//!
//! Every moment quantity is a product of integers and a power of two, so
//! `m * 2^e` with `m` a big integer represents them exactly.

use alloc::string::String;
use core::cmp::Ordering;
use core::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

const LN_2: f64 = core::f64::consts::LN_2;

/// `mantissa * 2^exponent`, normalized so a nonzero mantissa is odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigUint,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from(BigUint::one())
    }

    pub fn new(mantissa: BigUint, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigUint::one(),
            exponent: e,
        }
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Bits of the integer numerator once written as `p / 2^q`.
    pub fn numerator_bits(&self) -> u64 {
        self.mantissa.bits() + self.exponent.max(0) as u64
    }

    /// Natural log; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_biguint(&self.mantissa) + self.exponent as f64 * LN_2
    }

    /// Nearest `f64`, saturating to infinity.
    pub fn to_f64(&self) -> f64 {
        libm::exp(self.ln())
    }

    /// The integer value, when the exponent is non-negative.
    pub fn to_integer(&self) -> Option<BigUint> {
        (self.exponent >= 0).then(|| &self.mantissa << self.exponent as u64)
    }

    /// Exact decimal expansion. Dyadic fractions always terminate.
    pub fn to_decimal(&self) -> String {
        if self.exponent >= 0 {
            return (&self.mantissa << self.exponent as u64).to_str_radix(10);
        }
        let places = (-self.exponent) as usize;
        // m / 2^k = m * 5^k / 10^k
        let scaled = &self.mantissa * BigUint::from(5u32).pow(places as u32);
        let digits = scaled.to_str_radix(10);
        let mut out = String::new();
        if digits.len() <= places {
            out.push_str("0.");
            for _ in 0..places - digits.len() {
                out.push('0');
            }
            out.push_str(&digits);
        } else {
            let (int, frac) = digits.split_at(digits.len() - places);
            out.push_str(int);
            out.push('.');
            out.push_str(frac);
        }
        out
    }
}

fn ln_biguint(m: &BigUint) -> f64 {
    let bits = m.bits();
    if bits <= 64 {
        return libm::log(m.to_u64().unwrap_or(u64::MAX) as f64);
    }
    let shift = bits - 64;
    let top = (m >> shift).to_u64().unwrap_or(u64::MAX);
    libm::log(top as f64) + shift as f64 * LN_2
}

impl From<BigUint> for Dyadic {
    fn from(m: BigUint) -> Self {
        Dyadic::new(m, 0)
    }
}

impl From<u128> for Dyadic {
    fn from(v: u128) -> Self {
        Dyadic::new(BigUint::from(v), 0)
    }
}

impl From<u64> for Dyadic {
    fn from(v: u64) -> Self {
        Dyadic::new(BigUint::from(v), 0)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &rhs.mantissa << (rhs.exponent - e) as u64;
        Dyadic::new(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        a.cmp(&b)
    }
}

/// A non-negative magnitude held as a natural log, optionally alongside its
/// exact dyadic value.
///
/// `log_e == -inf` is the zero state. When `exact` is present the two agree
/// to floating-point accuracy.
#[derive(Clone, Debug, PartialEq)]
pub struct LogValue {
    pub log_e: f64,
    pub exact: Option<Dyadic>,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue {
            log_e: f64::NEG_INFINITY,
            exact: Some(Dyadic::zero()),
        }
    }

    pub fn from_exact(exact: Dyadic) -> Self {
        LogValue {
            log_e: exact.ln(),
            exact: Some(exact),
        }
    }

    pub fn from_log(log_e: f64) -> Self {
        LogValue { log_e, exact: None }
    }

    pub fn is_zero(&self) -> bool {
        self.log_e == f64::NEG_INFINITY
    }

    /// `exp(log_e)`; infinite when beyond `f64`.
    pub fn value(&self) -> f64 {
        libm::exp(self.log_e)
    }

    /// Exact decimal string when the numerator fits in `max_bits`.
    pub fn decimal(&self, max_bits: u64) -> Option<String> {
        self.exact
            .as_ref()
            .filter(|e| e.numerator_bits() <= max_bits)
            .map(Dyadic::to_decimal)
    }

    /// `|log_e - ln(exact)|`, or zero without an exact value.
    pub fn route_gap(&self) -> f64 {
        match &self.exact {
            Some(e) if e.is_zero() && self.is_zero() => 0.0,
            Some(e) => (self.log_e - e.ln()).abs(),
            None => 0.0,
        }
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

impl Mul for &LogValue {
    type Output = LogValue;
    fn mul(self, rhs: &LogValue) -> LogValue {
        let exact = match (&self.exact, &rhs.exact) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        let log_e = if self.is_zero() || rhs.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.log_e + rhs.log_e
        };
        LogValue { log_e, exact }
    }
}

impl Add for &LogValue {
    type Output = LogValue;
    fn add(self, rhs: &LogValue) -> LogValue {
        let exact = match (&self.exact, &rhs.exact) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        LogValue {
            log_e: log_add_exp(self.log_e, rhs.log_e),
            exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn normalization_and_arithmetic() {
        let a = Dyadic::from(288u64);
        assert_eq!(a.mantissa(), &BigUint::from(9u32));
        assert_eq!(a.exponent(), 5);
        let half = Dyadic::pow2(-1);
        assert_eq!((&a * &half).to_decimal(), "144");
        assert_eq!((&half + &Dyadic::pow2(-3)).to_decimal(), "0.625");
        assert_eq!(Dyadic::zero().to_decimal(), "0");
        assert_eq!(
            (&Dyadic::from(3u64) * &Dyadic::pow2(-4)).to_decimal(),
            "0.1875"
        );
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::pow2(-1) < Dyadic::one());
        assert!(Dyadic::zero() < Dyadic::pow2(-100));
        assert_eq!(Dyadic::from(4u64).cmp(&Dyadic::pow2(2)), Ordering::Equal);
    }

    #[test]
    fn ln_of_large_values() {
        let big = Dyadic::new(BigUint::from(3u32).pow(200), 0);
        assert!((big.ln() - 200.0 * libm::log(3.0)).abs() < 1e-10);
        assert_eq!(big.to_integer().unwrap().to_string().len(), 96);
    }

    #[test]
    fn log_values_combine() {
        let a = LogValue::from_exact(Dyadic::from(6u64));
        let b = LogValue::from_exact(Dyadic::from(10u64));
        let s = &a + &b;
        let p = &a * &b;
        assert_eq!(s.exact.as_ref().unwrap().to_decimal(), "16");
        assert!((s.log_e - libm::log(16.0)).abs() < 1e-14);
        assert!((p.log_e - libm::log(60.0)).abs() < 1e-14);
        let z = &a * &LogValue::zero();
        assert!(z.is_zero());
        assert!(z.exact.unwrap().is_zero());
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
    }
}
