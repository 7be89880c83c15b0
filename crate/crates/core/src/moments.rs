//! First and second moments of the common-subgraph count `W`.
//!
//! `W` counts ordered pairs `(I, J)` of `ell`-tuples of distinct vertices,
//! `I` in the first graph and `J` in the second, whose induced subgraphs are
//! equal. Quantities are returned as [`LogValue`]s: the log route works at
//! any size, the exact route is attached whenever the numerator stays below
//! [`EXACT_BITS_LIMIT`] bits.
//!
//! The second-moment bound sums the pre-asymptotic inequalities
//! `E[W^2] = S_0 + sum_m S_m`, `S_m <= N^(4 ell - 2m) ell^(2m)
//! 2^(-2 C(ell,d) + C(m,d)) T_m` and `T_m <= sum_j n2^(m-j) m^(2j)
//! 2^(-C(m,d) + C(j,d))`, so it is a rigorous upper bound at every finite
//! size. The asymptotic constants that absorb these sums are never formed.

use alloc::string::String;
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{log_add_exp, Dyadic, LogValue};
use crate::subset::binomial;

/// Exact values are skipped above this many numerator bits.
pub const EXACT_BITS_LIMIT: f64 = 65536.0;

/// Reports print exact decimals up to this many numerator bits.
pub const REPORT_EXACT_BITS: u64 = 4096;

const LN_2: f64 = core::f64::consts::LN_2;

fn check_arity(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::ArityTooSmall { arity: d, min: 2 });
    }
    Ok(())
}

/// `C(k, d)` as a shift amount.
fn slots(k: u64, d: usize) -> Result<i64> {
    if k > 1 << 24 {
        return Err(Error::TooLarge("tuple length above 2^24"));
    }
    i64::try_from(binomial(k, d as u64)).map_err(|_| Error::TooLarge("C(ell, d) exceeds i64"))
}

/// `(n)_k = n (n-1) ... (n-k+1)` by product loop.
pub fn falling_exact(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i))
}

/// `ln (n)_k`: direct sum for short products, log-gamma difference beyond.
pub fn ln_falling(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k <= 64 {
        (0..k).map(|i| libm::log((n - i) as f64)).sum()
    } else {
        libm::lgamma(n as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
    }
}

fn ln_pow(base: u64, e: u64) -> f64 {
    if e == 0 {
        0.0
    } else if base == 0 {
        f64::NEG_INFINITY
    } else {
        e as f64 * libm::log(base as f64)
    }
}

fn pow_exact(base: u64, e: u64) -> BigUint {
    BigUint::from(base).pow(e as u32)
}

/// Attaches the exact value when affordable.
fn build(log_e: f64, exact: impl FnOnce() -> Dyadic, numerator_ln: f64) -> LogValue {
    let exact = (numerator_ln / LN_2 <= EXACT_BITS_LIMIT).then(exact);
    LogValue { log_e, exact }
}

/// `E[W] = (n1)_ell (n2)_ell 2^(-C(ell, d))`; the zero state when
/// `ell > n2` (or `ell > n1`).
pub fn expected_w(d: usize, n1: u64, n2: u64, ell: u64) -> Result<LogValue> {
    check_arity(d)?;
    if ell > n1 || ell > n2 {
        return Ok(LogValue::zero());
    }
    let c = slots(ell, d)?;
    let num_ln = ln_falling(n1, ell) + ln_falling(n2, ell);
    Ok(build(
        num_ln - c as f64 * LN_2,
        || Dyadic::new(falling_exact(n1, ell) * falling_exact(n2, ell), -c),
        num_ln,
    ))
}

/// `S_0 = (n1)_(2 ell) ((n2)_ell)^2 2^(-2 C(ell, d))`: pairs of matches whose
/// first-graph tuples are disjoint. Requires `2 ell <= n1` and `ell <= n2`.
pub fn s0_exact(d: usize, n1: u64, n2: u64, ell: u64) -> Result<LogValue> {
    check_arity(d)?;
    if 2 * ell > n1 {
        return Err(Error::OutOfDomain("S_0 needs 2 * ell <= n1"));
    }
    if ell > n2 {
        return Err(Error::OutOfDomain("S_0 needs ell <= n2"));
    }
    let c = slots(ell, d)?;
    let num_ln = ln_falling(n1, 2 * ell) + 2.0 * ln_falling(n2, ell);
    Ok(build(
        num_ln - 2.0 * c as f64 * LN_2,
        || {
            let f2 = falling_exact(n2, ell);
            Dyadic::new(falling_exact(n1, 2 * ell) * &f2 * &f2, -2 * c)
        },
        num_ln,
    ))
}

/// The coarser bound `N^(4 ell) ((n2)_ell / n2^ell)^2 2^(-2 C(ell, d))
/// = n1^(2 ell) ((n2)_ell)^2 2^(-2 C(ell, d))` on `S_0`.
pub fn s0_displayed_bound(d: usize, n1: u64, n2: u64, ell: u64) -> Result<LogValue> {
    check_arity(d)?;
    let c = slots(ell, d)?;
    let num_ln = ln_pow(n1, 2 * ell) + 2.0 * ln_falling(n2, ell);
    Ok(build(
        num_ln - 2.0 * c as f64 * LN_2,
        || {
            let f2 = falling_exact(n2, ell);
            Dyadic::new(pow_exact(n1, 2 * ell) * &f2 * &f2, -2 * c)
        },
        num_ln,
    ))
}

/// `T_m <= sum_{j=0}^{m} n2^(m-j) m^j m^j 2^(-C(m,d) + C(j,d))`.
pub fn tm_bound(d: usize, n2: u64, m: u64) -> Result<LogValue> {
    check_arity(d)?;
    if m == 0 {
        return Err(Error::OutOfDomain("T_m needs m >= 1"));
    }
    let cm = slots(m, d)?;
    let mut log_e = f64::NEG_INFINITY;
    let mut num_ln = f64::NEG_INFINITY;
    for j in 0..=m {
        let cj = slots(j, d)?;
        let term_num = ln_pow(n2, m - j) + ln_pow(m, 2 * j);
        log_e = log_add_exp(log_e, term_num + (cj - cm) as f64 * LN_2);
        num_ln = num_ln.max(term_num + cj as f64 * LN_2);
    }
    Ok(build(
        log_e,
        || {
            (0..=m).fold(Dyadic::zero(), |acc, j| {
                let cj = binomial(j, d as u64) as i64;
                let term = Dyadic::new(pow_exact(n2, m - j) * pow_exact(m, 2 * j), cj - cm);
                &acc + &term
            })
        },
        num_ln + libm::log((m + 1) as f64),
    ))
}

/// `S_m <= N^(4 ell - 2m) ell^(2m) 2^(-2 C(ell,d) + C(m,d)) T_m` with
/// `N^2 = n1 n2`, for `1 <= m <= ell`.
pub fn sm_bound(d: usize, n1: u64, n2: u64, ell: u64, m: u64) -> Result<LogValue> {
    check_arity(d)?;
    if m == 0 || m > ell {
        return Err(Error::OutOfDomain("S_m needs 1 <= m <= ell"));
    }
    let t = tm_bound(d, n2, m)?;
    let cl = slots(ell, d)?;
    let cm = slots(m, d)?;
    let nn = n1
        .checked_mul(n2)
        .ok_or(Error::TooLarge("n1 * n2 overflows u64"))?;
    let pref_num = ln_pow(nn, 2 * ell - m) + ln_pow(ell, 2 * m);
    let prefix = build(
        pref_num + (cm - 2 * cl) as f64 * LN_2,
        || {
            Dyadic::new(
                pow_exact(nn, 2 * ell - m) * pow_exact(ell, 2 * m),
                cm - 2 * cl,
            )
        },
        pref_num,
    );
    Ok(&prefix * &t)
}

/// Upper bound on `E[W^2]`: `S_0 + sum_{m=1}^{ell} (bound on S_m)`.
///
/// `S_0` is an empty sum (zero) when `2 ell > n1`; the whole moment is zero
/// when `ell` exceeds either order.
pub fn second_moment_upper(d: usize, n1: u64, n2: u64, ell: u64) -> Result<LogValue> {
    check_arity(d)?;
    if ell > n1 || ell > n2 {
        return Ok(LogValue::zero());
    }
    let mut total = if 2 * ell <= n1 {
        s0_exact(d, n1, n2, ell)?
    } else {
        LogValue::zero()
    };
    for m in 1..=ell {
        total = &total + &sm_bound(d, n1, n2, ell, m)?;
    }
    Ok(total)
}

/// `min(1, E[W]^2 / E[W^2])`, a lower bound on `P(W > 0)` when `ew2` bounds
/// the second moment from above.
pub fn paley_zygmund_lower(ew: &LogValue, ew2: &LogValue) -> Result<f64> {
    if ew.is_zero() {
        return Ok(0.0);
    }
    if ew2.is_zero() {
        return Err(Error::OutOfDomain("zero second moment with a nonzero mean"));
    }
    if let (Some(a), Some(b)) = (&ew.exact, &ew2.exact) {
        if (a * a) >= *b {
            return Ok(1.0);
        }
    }
    Ok(libm::exp(2.0 * ew.log_e - ew2.log_e).min(1.0))
}

/// `min(1, E[W])`, an upper bound on `P(W > 0)`.
pub fn markov_tail(ew: &LogValue) -> f64 {
    if let Some(e) = &ew.exact {
        if *e >= Dyadic::one() {
            return 1.0;
        }
    }
    ew.value().min(1.0)
}

/// A [`LogValue`] as JSON: `log_e` is null for zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogField {
    pub log_e: Option<f64>,
    pub exact: Option<String>,
}

impl From<&LogValue> for LogField {
    fn from(v: &LogValue) -> Self {
        LogField {
            log_e: (!v.is_zero()).then_some(v.log_e),
            exact: v.decimal(REPORT_EXACT_BITS),
        }
    }
}

/// Moment quantities for one `(d, n1, n2, ell)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub d: usize,
    pub n1: u64,
    pub n2: u64,
    pub ell: u64,
    pub expected_w: LogField,
    /// Absent when `2 ell > n1` or `ell > n2`.
    pub s0: Option<LogField>,
    pub second_moment_upper: LogField,
    pub markov_tail: f64,
    pub paley_zygmund_lower: Option<f64>,
}

impl MomentReport {
    pub fn new(d: usize, n1: u64, n2: u64, ell: u64) -> Result<Self> {
        let ew = expected_w(d, n1, n2, ell)?;
        let s0 = s0_exact(d, n1, n2, ell).ok();
        let ew2 = second_moment_upper(d, n1, n2, ell)?;
        let pz = paley_zygmund_lower(&ew, &ew2).ok();
        Ok(MomentReport {
            d,
            n1,
            n2,
            ell,
            expected_w: LogField::from(&ew),
            s0: s0.as_ref().map(LogField::from),
            second_moment_upper: LogField::from(&ew2),
            markov_tail: markov_tail(&ew),
            paley_zygmund_lower: pz,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(v: &LogValue) -> String {
        v.exact.as_ref().unwrap().to_decimal()
    }

    fn agree(v: &LogValue) {
        let tol = 1e-9 * v.log_e.abs().max(1.0);
        assert!(
            v.route_gap() <= tol,
            "gap {} for {:?}",
            v.route_gap(),
            v.log_e
        );
    }

    #[test]
    fn expected_w_examples() {
        let v = expected_w(3, 4, 4, 3).unwrap();
        assert_eq!(exact(&v), "288");
        agree(&v);
        assert!(expected_w(3, 4, 2, 3).unwrap().is_zero());
        assert_eq!(exact(&expected_w(3, 3, 3, 2).unwrap()), "36");
        assert_eq!(exact(&expected_w(3, 3, 3, 3).unwrap()), "18");
        assert_eq!(exact(&expected_w(3, 5, 5, 0).unwrap()), "1");
    }

    #[test]
    fn expected_w_at_scale_is_log_only_when_huge() {
        let v = expected_w(3, 1 << 20, 1 << 20, 17).unwrap();
        assert!(v.exact.is_some());
        agree(&v);
        let v = expected_w(3, 1 << 40, 1 << 40, 3000).unwrap();
        assert!(v.exact.is_none());
        assert!(v.log_e.is_finite());
    }

    #[test]
    fn falling_factorial_routes_agree() {
        for (n, k) in [(10u64, 3u64), (1000, 70), (1 << 20, 200), (300, 300)] {
            let e = Dyadic::from(falling_exact(n, k));
            let l = ln_falling(n, k);
            assert!((e.ln() - l).abs() <= 1e-9 * l.abs().max(1.0), "n={n} k={k}");
        }
        assert_eq!(falling_exact(3, 4), BigUint::ZERO);
        assert_eq!(ln_falling(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn s0_examples() {
        let v = s0_exact(3, 8, 6, 3).unwrap();
        assert_eq!(exact(&v), "72576000");
        agree(&v);
        assert_eq!(exact(&s0_exact(3, 8, 6, 0).unwrap()), "1");
        assert!(s0_exact(3, 5, 6, 3).is_err());
        assert!(s0_exact(3, 8, 2, 3).is_err());
        let bound = s0_displayed_bound(3, 8, 6, 3).unwrap();
        assert!(v.exact.as_ref().unwrap() <= bound.exact.as_ref().unwrap());
    }

    #[test]
    fn tm_examples() {
        let v = tm_bound(3, 6, 3).unwrap();
        assert_eq!(exact(&v), "1242");
        agree(&v);
        assert_eq!(exact(&tm_bound(3, 1, 1).unwrap()), "2");
        assert!(tm_bound(3, 6, 0).is_err());
        let mut prev = Dyadic::zero();
        for n2 in 1..30 {
            let t = tm_bound(4, n2, 5).unwrap().exact.unwrap();
            assert!(t >= prev);
            prev = t;
        }
    }

    #[test]
    fn sm_examples() {
        let v = sm_bound(3, 8, 6, 3, 3).unwrap();
        assert_eq!(exact(&v), "50065993728");
        assert!((v.log_e - 24.636_607_846_665_81).abs() < 1e-9);
        agree(&v);
        assert!(sm_bound(3, 8, 6, 3, 4).is_err());
        assert!(sm_bound(3, 8, 6, 3, 0).is_err());
        // m = ell, n1 = n2: prefix is N^(2 ell) ell^(2 ell) 2^(-C(ell,d)).
        let v = sm_bound(3, 5, 5, 4, 4).unwrap();
        let t = tm_bound(3, 5, 4).unwrap();
        let expect = 8.0 * libm::log(5.0) + 8.0 * libm::log(4.0) - 4.0 * LN_2 + t.log_e;
        assert!((v.log_e - expect).abs() < 1e-12);
    }

    #[test]
    fn second_moment_below_arity_covers_deterministic_w() {
        // ell < d: W = (4)_2^2 = 144 always.
        let v = second_moment_upper(3, 4, 4, 2).unwrap();
        assert!(v.exact.unwrap() >= Dyadic::from(20736u64));
        assert!(second_moment_upper(3, 4, 2, 3).unwrap().is_zero());
        assert_eq!(exact(&second_moment_upper(3, 4, 4, 0).unwrap()), "1");
    }

    #[test]
    fn second_moment_strictly_above_s0() {
        for ell in 3..6 {
            let s0 = s0_exact(3, 12, 9, ell).unwrap();
            let up = second_moment_upper(3, 12, 9, ell).unwrap();
            assert!(up.exact.unwrap() > s0.exact.unwrap());
        }
    }

    #[test]
    fn tail_bounds() {
        let zero = LogValue::zero();
        assert_eq!(markov_tail(&zero), 0.0);
        assert_eq!(
            paley_zygmund_lower(&zero, &LogValue::from_exact(Dyadic::one())).unwrap(),
            0.0
        );
        let one = LogValue::from_exact(Dyadic::one());
        assert_eq!(markov_tail(&one), 1.0);
        assert_eq!(markov_tail(&LogValue::from_log(5.0)), 1.0);
        let c = LogValue::from_exact(Dyadic::from(7u64));
        let c2 = &c * &c;
        assert_eq!(paley_zygmund_lower(&c, &c2).unwrap(), 1.0);
        assert!(paley_zygmund_lower(&c, &zero).is_err());
        let small = LogValue::from_exact(Dyadic::pow2(-20));
        assert!((markov_tail(&small) - libm::ldexp(1.0, -20)).abs() < 1e-20);
    }

    #[test]
    fn report_serializes_exact_strings() {
        let r = MomentReport::new(3, 4, 4, 3).unwrap();
        assert_eq!(r.expected_w.exact.as_deref(), Some("288"));
        assert!(r.s0.is_none());
        assert_eq!(r.markov_tail, 1.0);
        let r = MomentReport::new(3, 4, 2, 3).unwrap();
        assert_eq!(r.expected_w.log_e, None);
        assert_eq!(r.paley_zygmund_lower, Some(0.0));
    }

    proptest::proptest! {
        #[test]
        fn exact_and_log_routes_agree(d in 3usize..6, n1 in 1u64..200, n2 in 1u64..200, ell in 0u64..40) {
            for v in [expected_w(d, n1, n2, ell).unwrap(), second_moment_upper(d, n1, n2, ell).unwrap()] {
                let tol = 1e-9 * v.log_e.abs().max(1.0);
                proptest::prop_assert!(v.route_gap() <= tol);
            }
            if ell >= 1 {
                let v = tm_bound(d, n2, ell).unwrap();
                proptest::prop_assert!(v.route_gap() <= 1e-9 * v.log_e.abs().max(1.0));
            }
        }
    }
}
