//! Double-double arithmetic (~106-bit significand) on top of `libm`.
//!
//! Just enough to evaluate logarithms, integer roots and floors of the
//! prediction formulas without the f64 rounding that would move a floor
//! across an integer.

use alloc::string::String;
use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const LN2: Dd = Dd {
        hi: core::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_u64(n: u64) -> Dd {
        let hi = n as f64;
        // `hi` is within 2^10 of n, so the difference is exact in i128.
        let lo = (n as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_positive(self) -> bool {
        self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0)
    }

    fn ldexp(self, e: i32) -> Dd {
        Dd {
            hi: libm::ldexp(self.hi, e),
            lo: libm::ldexp(self.lo, e),
        }
    }

    pub fn powi(self, mut e: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Dd {
        self.root(2)
    }

    /// Positive real `k`-th root by Newton iteration from the f64 estimate.
    pub fn root(self, k: u32) -> Dd {
        assert!(k >= 1);
        if k == 1 || self.hi == 0.0 {
            return self;
        }
        assert!(self.is_positive(), "root of a negative number");
        let kk = Dd::from_f64(f64::from(k));
        let mut y = Dd::from_f64(libm::pow(self.hi, 1.0 / f64::from(k)));
        for _ in 0..3 {
            let yk1 = y.powi(k - 1);
            y = y - (yk1 * y - self) / (kk * yk1);
        }
        y
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = libm::round(self.hi / Dd::LN2.hi);
        let r = (self - Dd::LN2 * Dd::from_f64(k)).ldexp(-10);
        // Taylor series on |r| < 2^-10 * ln2 / 2; 14 terms reach 1e-34.
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..=14u64 {
            term = term * r / Dd::from_u64(i);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    /// Natural logarithm of a positive value.
    pub fn ln(self) -> Dd {
        assert!(self.is_positive(), "logarithm of a non-positive number");
        let mut y = Dd::from_f64(libm::log(self.hi));
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    pub fn log2(self) -> Dd {
        self.ln() / Dd::LN2
    }

    pub fn floor(self) -> Dd {
        let fh = libm::floor(self.hi);
        if fh == self.hi {
            let (hi, lo) = quick_two_sum(fh, libm::floor(self.lo));
            Dd { hi, lo }
        } else {
            Dd { hi: fh, lo: 0.0 }
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_integer(self) -> f64 {
        let f = self.floor();
        let below = (self - f).to_f64();
        below.min(1.0 - below)
    }

    /// Floor as an integer; the value must be well inside `i64`.
    pub fn floor_i64(self) -> i64 {
        let f = self.floor();
        f.hi as i64 + f.lo as i64
    }

    /// Positional decimal expansion with `digits` significant digits,
    /// truncated (not rounded).
    pub fn to_decimal(self, digits: usize) -> String {
        let mut out = String::new();
        let mut v = self;
        if v.hi < 0.0 {
            out.push('-');
            v = -v;
        }
        if v.hi == 0.0 {
            out.push('0');
            return out;
        }
        let int = v.floor();
        let mut frac = v - int;
        let int_digits = {
            // Integer part stays below 2^53 for every value we print.
            let i = int.hi as u64 + int.lo as u64;
            let s = alloc::format!("{i}");
            out.push_str(&s);
            if i == 0 {
                0
            } else {
                s.len()
            }
        };
        out.push('.');
        let ten = Dd::from_f64(10.0);
        let mut emitted = int_digits;
        let mut leading = int_digits == 0;
        while emitted < digits {
            frac = frac * ten;
            let digit = frac.floor();
            let dv = digit.hi as u8;
            frac = frac - digit;
            out.push(char::from(b'0' + dv.min(9)));
            if !(leading && dv == 0) {
                leading = false;
                emitted += 1;
            }
        }
        out
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + (self.hi * y.lo + self.lo * y.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from_f64(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, rel: f64) -> bool {
        let diff = (a - b).to_f64().abs();
        diff <= rel * b.to_f64().abs().max(1e-300)
    }

    #[test]
    fn ln2_round_trips_through_exp() {
        assert!(close(Dd::LN2.exp(), Dd::from_f64(2.0), 1e-30));
        assert!(close(Dd::from_f64(2.0).ln(), Dd::LN2, 1e-30));
    }

    #[test]
    fn sqrt_two_digits() {
        // sqrt(2) = 1.41421356237309504880168872420969807856967187537694...
        let s = Dd::from_f64(2.0).sqrt().to_decimal(30);
        assert!(s.starts_with("1.41421356237309504880168872420"), "{s}");
    }

    #[test]
    fn ln_of_ten_digits() {
        // ln 10 = 2.30258509299404568401799145468436420760110148862877...
        let s = Dd::from_f64(10.0).ln().to_decimal(30);
        assert!(s.starts_with("2.3025850929940456840179914546"), "{s}");
    }

    #[test]
    fn cube_root_and_floor() {
        let r = Dd::from_f64(27.0).root(3);
        assert!(close(r, Dd::from_f64(3.0), 1e-30));
        let just_below = Dd::from_f64(3.0) - Dd::from_f64(1e-25);
        assert_eq!(just_below.floor_i64(), 2);
        assert_eq!(Dd::from_f64(-0.5).floor_i64(), -1);
    }

    #[test]
    fn from_u64_is_exact() {
        let n = (1u64 << 60) + 1;
        let d = Dd::from_u64(n);
        assert_eq!(d.hi as u64 as i128 + d.lo as i128, n as i128);
    }

    #[test]
    fn decimal_of_small_fraction() {
        assert_eq!(Dd::from_f64(0.125).to_decimal(3), "0.125");
        assert_eq!(Dd::from_f64(12.5).to_decimal(4), "12.50");
    }
}
