//! Closed-form predictions for the largest common induced subgraph of two
//! independent uniform random d-hypergraphs, `d >= 3`.
//!
//! With `N = sqrt(n1 * n2)`:
//!
//! * `x = (d! log2(n1 n2))^(1/(d-1)) + d/2` locates the two-point window
//!   `floor(x - eps)`, `floor(x + eps)`;
//! * `y = (d! log2 n1)^(1/(d-1)) + d/2` plays the same role when `n2` is
//!   tiny compared to `n1`;
//! * `floor(y - (log2 n1)^(-1/d))` is the inclusion threshold: at or below
//!   it the smaller graph embeds in the larger one w.h.p.
//!
//! Everything is evaluated in double-double precision; reports carry a flag
//! when a floored quantity sits within [`NEAR_INTEGER_GUARD`] of an integer.
//!
//! The window half-width `eps` is the caller's choice. The asymptotic
//! statements need `eps >> log log N / (log N)^(1/(d-1))`; the default is
//! the `(log2 n1)^(-1/d)` used for the equal-order regime.

use alloc::string::String;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::xprec::Dd;

/// Floors whose argument is closer than this to an integer are flagged.
pub const NEAR_INTEGER_GUARD: f64 = 1e-9;

/// Default cutoff for [`classify_regime`].
pub const DEFAULT_THETA: f64 = 1.0;

/// Largest arity with an exactly representable factorial in the evaluator.
pub const MAX_ARITY: usize = 20;

fn check_arity(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::ArityTooSmall { arity: d, min: 3 });
    }
    if d > MAX_ARITY {
        return Err(Error::OutOfDomain("arity above 20"));
    }
    Ok(())
}

fn factorial(d: usize) -> Dd {
    Dd::from_u64((1..=d as u64).product())
}

fn log2_of(n: u64) -> Dd {
    Dd::from_u64(n).log2()
}

/// `(d! * log2(m))^(1/(d-1)) + d/2` with `log2(m)` supplied.
fn shifted_root(d: usize, log2m: Dd) -> Dd {
    (factorial(d) * log2m).root(d as u32 - 1) + Dd::from_f64(d as f64 / 2.0)
}

pub(crate) fn x_dd(d: usize, n1: u64, n2: u64) -> Result<Dd> {
    check_arity(d)?;
    if n1 == 0 || n2 == 0 || (n1 == 1 && n2 == 1) {
        return Err(Error::OutOfDomain("n1 * n2 must be at least 2"));
    }
    Ok(shifted_root(d, log2_of(n1) + log2_of(n2)))
}

pub(crate) fn y_dd(d: usize, n1: u64) -> Result<Dd> {
    check_arity(d)?;
    if n1 < 2 {
        return Err(Error::OutOfDomain("n1 must be at least 2"));
    }
    Ok(shifted_root(d, log2_of(n1)))
}

/// Center of the two-point window for graphs of orders `n1` and `n2`.
pub fn predict_x(d: usize, n1: u64, n2: u64) -> Result<f64> {
    x_dd(d, n1, n2).map(Dd::to_f64)
}

/// Center of the window when `n2` is negligible; equals `predict_x(d, n1, 1)`.
pub fn predict_y(d: usize, n1: u64) -> Result<f64> {
    y_dd(d, n1).map(Dd::to_f64)
}

fn default_epsilon_dd(d: usize, n1: u64) -> Result<Dd> {
    check_arity(d)?;
    if n1 < 2 {
        return Err(Error::OutOfDomain("n1 must be at least 2"));
    }
    Ok(Dd::ONE / log2_of(n1).root(d as u32))
}

/// `(log2 n1)^(-1/d)`, the window half-width of the equal-order regime.
pub fn default_epsilon(d: usize, n1: u64) -> Result<f64> {
    default_epsilon_dd(d, n1).map(Dd::to_f64)
}

/// `(floor(x - eps), floor(x + eps))` for `0 < eps < 1/2`.
///
/// The two floors differ by at most one.
pub fn two_point_window(d: usize, n1: u64, n2: u64, epsilon: f64) -> Result<(i64, i64)> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::OutOfDomain("epsilon must lie in (0, 1/2)"));
    }
    let x = x_dd(d, n1, n2)?;
    let (lo, hi, _) = floors_around(x, Dd::from_f64(epsilon));
    Ok((lo, hi))
}

/// Floors of `v - eps` and `v + eps`, plus whether either argument is
/// within the guard distance of an integer.
fn floors_around(v: Dd, eps: Dd) -> (i64, i64, bool) {
    let below = v - eps;
    let above = v + eps;
    let near = below.dist_to_integer() < NEAR_INTEGER_GUARD
        || above.dist_to_integer() < NEAR_INTEGER_GUARD;
    (below.floor_i64(), above.floor_i64(), near)
}

fn threshold_dd(d: usize, n1: u64) -> Result<Dd> {
    Ok(y_dd(d, n1)? - default_epsilon_dd(d, n1)?)
}

/// `floor((d! log2 n1)^(1/(d-1)) + d/2 - (log2 n1)^(-1/d))`.
pub fn inclusion_threshold(d: usize, n1: u64) -> Result<u64> {
    let t = threshold_dd(d, n1)?.floor_i64();
    // y > sqrt(6) + 1.5 and the subtracted term is at most 1.
    debug_assert!(t >= 0);
    Ok(t.max(0) as u64)
}

/// `a = 2 d! / ln 2`, `N = sqrt(n1 n2)` and the offset `beta` that makes
/// `(a ln N)^(1/(d-1)) + beta` equal a requested integer `ell`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllChoice {
    pub a: f64,
    pub capital_n: f64,
    pub ell: u64,
    pub beta: f64,
}

fn ln_capital_n(n1: u64, n2: u64) -> Dd {
    (Dd::from_u64(n1).ln() + Dd::from_u64(n2).ln()) * Dd::from_f64(0.5)
}

fn a_dd(d: usize) -> Dd {
    Dd::from_f64(2.0) * factorial(d) / Dd::LN2
}

/// `(a ln N)^(1/(d-1))`.
fn scale_dd(d: usize, n1: u64, n2: u64) -> Dd {
    (a_dd(d) * ln_capital_n(n1, n2)).root(d as u32 - 1)
}

fn check_orders(n1: u64, n2: u64) -> Result<()> {
    if n1 == 0 || n2 == 0 || (n1 == 1 && n2 == 1) {
        return Err(Error::OutOfDomain("n1 * n2 must be at least 2"));
    }
    Ok(())
}

impl EllChoice {
    pub fn new(d: usize, n1: u64, n2: u64, ell: u64) -> Result<Self> {
        check_arity(d)?;
        check_orders(n1, n2)?;
        let beta = Dd::from_u64(ell) - scale_dd(d, n1, n2);
        Ok(EllChoice {
            a: a_dd(d).to_f64(),
            capital_n: ln_capital_n(n1, n2).exp().to_f64(),
            ell,
            beta: beta.to_f64(),
        })
    }

    /// `(a ln N)^(1/(d-1))`, which equals `(d! log2(n1 n2))^(1/(d-1))`.
    pub fn scale(d: usize, n1: u64, n2: u64) -> Result<f64> {
        check_arity(d)?;
        check_orders(n1, n2)?;
        Ok(scale_dd(d, n1, n2).to_f64())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfDomain("alpha must lie in (0, 1]"));
    }
    Ok(())
}

/// `U = 2 ln N - (alpha ell - 1)(alpha ell - 2)...(alpha ell - (d-1)) ln 2 / d!`.
pub fn u_alpha_exact(d: usize, n1: u64, n2: u64, ell: u64, alpha: f64) -> Result<f64> {
    check_arity(d)?;
    check_orders(n1, n2)?;
    check_alpha(alpha)?;
    if ell < d as u64 {
        return Err(Error::OutOfDomain("ell must be at least d"));
    }
    let al = Dd::from_f64(alpha) * Dd::from_u64(ell);
    let mut prod = Dd::ONE;
    for i in 1..d as u64 {
        prod = prod * (al - Dd::from_u64(i));
    }
    let u = Dd::from_f64(2.0) * ln_capital_n(n1, n2) - prod * Dd::LN2 / factorial(d);
    Ok(u.to_f64())
}

/// Explicit terms of the asymptotic expansion of [`u_alpha_exact`]:
///
/// `(2 - 2 alpha^(d-1)) ln N
///   + alpha^(d-2) (d-1)/2 * a^((d-2)/(d-1)) ln 2 / d! * (d - 2 alpha beta) (ln N)^((d-2)/(d-1))`.
///
/// The gap to the exact value is `O((ln N)^((d-3)/(d-1)))` for bounded `beta`.
pub fn u_alpha_expansion_leading(d: usize, n1: u64, n2: u64, beta: f64, alpha: f64) -> Result<f64> {
    check_arity(d)?;
    check_orders(n1, n2)?;
    check_alpha(alpha)?;
    let ln_n = ln_capital_n(n1, n2);
    let al = Dd::from_f64(alpha);
    let dm1 = d as u32 - 1;
    let two = Dd::from_f64(2.0);
    let first = (two - two * al.powi(dm1)) * ln_n;
    // x^((d-2)/(d-1)) as the (d-1)-th root of x^(d-2).
    let frac_pow = |x: Dd| x.powi(dm1 - 1).root(dm1);
    let coeff = al.powi(dm1 - 1) * Dd::from_f64(f64::from(dm1) / 2.0) * frac_pow(a_dd(d)) * Dd::LN2
        / factorial(d);
    let second = coeff * (Dd::from_u64(d as u64) - two * al * Dd::from_f64(beta)) * frac_pow(ln_n);
    Ok((first + second).to_f64())
}

/// Which asymptotic regime a finite pair most resembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeHint {
    /// Orders comparable on the log scale: window around `x`.
    Item1,
    /// `n2` tiny but above the inclusion threshold: window around `y`.
    Item2a,
    /// `n2` at or below the inclusion threshold: the smaller graph embeds.
    Item2b,
    /// Too close to the cutoff to call.
    Indeterminate,
}

/// Raw quantities behind a [`RegimeHint`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegimeAssessment {
    pub hint: RegimeHint,
    pub inclusion_threshold: u64,
    /// `log2 n2 / (log2 n1)^(1 - 1/(d-1))`.
    pub ratio: f64,
    pub theta: f64,
}

/// Heuristic regime call for one finite pair.
///
/// The asymptotic regimes are defined for sequences of orders, so a single
/// pair can only be compared against them. `item2b` when
/// `n2 <= inclusion_threshold(d, n1)`, else `item2a` when the ratio is at
/// most `theta`, else `item1`; a ratio within 10% of `theta` gives
/// `indeterminate`.
pub fn classify_regime(d: usize, n1: u64, n2: u64, theta: f64) -> Result<RegimeAssessment> {
    check_arity(d)?;
    if n2 > n1 {
        return Err(Error::OutOfDomain("n2 must not exceed n1"));
    }
    if n2 == 0 || n1 < 2 {
        return Err(Error::OutOfDomain("need n1 >= 2 and n2 >= 1"));
    }
    if theta.is_nan() || theta <= 0.0 {
        return Err(Error::OutOfDomain("theta must be positive"));
    }
    let threshold = inclusion_threshold(d, n1)?;
    let exponent = 1.0 - 1.0 / (d as f64 - 1.0);
    let ratio = libm::log2(n2 as f64) / libm::pow(libm::log2(n1 as f64), exponent);
    let hint = if n2 <= threshold {
        RegimeHint::Item2b
    } else if (ratio - theta).abs() <= 0.1 * theta {
        RegimeHint::Indeterminate
    } else if ratio <= theta {
        RegimeHint::Item2a
    } else {
        RegimeHint::Item1
    };
    Ok(RegimeAssessment {
        hint,
        inclusion_threshold: threshold,
        ratio,
        theta,
    })
}

/// Everything the theory says about one `(d, n1, n2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionReport {
    pub d: usize,
    pub n1: u64,
    pub n2: u64,
    pub x: f64,
    pub y: f64,
    pub x_decimal: String,
    pub y_decimal: String,
    pub epsilon: f64,
    pub window_lo: i64,
    pub window_hi: i64,
    /// The window spans at most two integers only when `epsilon < 1/2`.
    pub epsilon_below_half: bool,
    pub inclusion_threshold: u64,
    pub regime_hint: RegimeHint,
    pub regime_ratio: f64,
    pub theta: f64,
    /// Some floored quantity is within 1e-9 of an integer.
    pub near_integer: bool,
}

/// Significant digits in the decimal strings of a report.
pub const REPORT_DIGITS: usize = 28;

impl PredictionReport {
    /// Builds the report. `epsilon` defaults to `(log2 n1)^(-1/d)`; it may
    /// exceed 1/2 (small `n1`), in which case the window can span three
    /// integers and `epsilon_below_half` is false.
    pub fn new(d: usize, n1: u64, n2: u64, epsilon: Option<f64>, theta: f64) -> Result<Self> {
        let regime = classify_regime(d, n1, n2, theta)?;
        let x = x_dd(d, n1, n2)?;
        let y = y_dd(d, n1)?;
        let eps = match epsilon {
            Some(e) if e > 0.0 && e.is_finite() => Dd::from_f64(e),
            Some(_) => return Err(Error::OutOfDomain("epsilon must be positive")),
            None => default_epsilon_dd(d, n1)?,
        };
        let (window_lo, window_hi, near_window) = floors_around(x, eps);
        let near_threshold = threshold_dd(d, n1)?.dist_to_integer() < NEAR_INTEGER_GUARD;
        let eps = eps.to_f64();
        Ok(PredictionReport {
            d,
            n1,
            n2,
            x: x.to_f64(),
            y: y.to_f64(),
            x_decimal: x.to_decimal(REPORT_DIGITS),
            y_decimal: y.to_decimal(REPORT_DIGITS),
            epsilon: eps,
            window_lo,
            window_hi,
            epsilon_below_half: eps < 0.5,
            inclusion_threshold: regime.inclusion_threshold,
            regime_hint: regime.hint,
            regime_ratio: regime.ratio,
            theta,
            near_integer: near_window || near_threshold,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values below come from a 50-digit mpmath evaluation of the
    // same closed forms.
    const X_3_2P10: f64 = 12.454_451_150_103_322;
    const X_3_2P20: f64 = 16.991_933_384_829_668;

    #[test]
    fn x_reference_values() {
        assert!((predict_x(3, 1024, 1024).unwrap() - X_3_2P10).abs() < 1e-12);
        assert!((predict_x(3, 1 << 20, 1 << 20).unwrap() - X_3_2P20).abs() < 1e-12);
        let direct = libm::sqrt(6.0) + 1.5;
        assert!((predict_x(3, 2, 1).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn y_matches_x_with_unit_second_order() {
        assert!((predict_y(3, 1 << 20).unwrap() - X_3_2P10).abs() < 1e-12);
        for d in 3..7 {
            for n1 in [2u64, 17, 1 << 33] {
                assert_eq!(predict_y(d, n1).unwrap(), predict_x(d, n1, 1).unwrap());
            }
        }
    }

    #[test]
    fn arity_and_order_errors() {
        assert!(matches!(
            predict_x(2, 10, 10),
            Err(Error::ArityTooSmall { .. })
        ));
        assert!(predict_x(3, 1, 1).is_err());
        assert!(predict_y(3, 1).is_err());
        assert!(inclusion_threshold(2, 100).is_err());
    }

    #[test]
    fn window_reference_values() {
        assert_eq!(
            two_point_window(3, 1024, 1024, 0.464_158_883_361_277_9).unwrap(),
            (11, 12)
        );
        assert_eq!(
            two_point_window(3, 1 << 20, 1 << 20, 0.368_403_149_864_038_66).unwrap(),
            (16, 17)
        );
        assert_eq!(two_point_window(3, 1024, 1024, 1e-12).unwrap(), (12, 12));
        assert!(two_point_window(3, 1024, 1024, 0.5).is_err());
        assert!(two_point_window(3, 1024, 1024, 0.0).is_err());
    }

    #[test]
    fn threshold_reference_values() {
        assert_eq!(inclusion_threshold(3, 1 << 20).unwrap(), 12);
        assert_eq!(inclusion_threshold(3, 1 << 10).unwrap(), 8);
        assert_eq!(inclusion_threshold(3, 64).unwrap(), 6);
        assert!(
            inclusion_threshold(3, 1 << 30).unwrap() >= inclusion_threshold(3, 1 << 10).unwrap()
        );
    }

    #[test]
    fn scale_identity_ties_natural_and_binary_logs() {
        for d in 3..=6 {
            for (n1, n2) in [(2u64, 1u64), (1024, 1024), (1 << 40, 12345), (999_999, 3)] {
                let lhs = EllChoice::scale(d, n1, n2).unwrap();
                let rhs = x_dd(d, n1, n2).unwrap().to_f64() - d as f64 / 2.0;
                assert!(((lhs - rhs) / rhs).abs() < 1e-12, "d={d} n1={n1} n2={n2}");
            }
        }
    }

    #[test]
    fn ell_choice_recovers_beta() {
        let c = EllChoice::new(3, 1024, 1024, 12).unwrap();
        assert!((c.beta - 1.045_548_849_896_677_7).abs() < 1e-12);
        assert!((c.a - 17.312_340_490_667_56).abs() < 1e-10);
        assert!((c.capital_n - 1024.0).abs() < 1e-9);
    }

    #[test]
    fn u_alpha_exact_values() {
        let u = u_alpha_exact(3, 1024, 1024, 12, 1.0).unwrap();
        assert!((u - 1.155_245_300_933_242_2).abs() < 1e-12);
        // alpha * ell = 1 kills the product.
        let u = u_alpha_exact(3, 1024, 1024, 4, 0.25).unwrap();
        assert!((u - 2.0 * libm::log(1024.0)).abs() < 1e-12);
        assert!(u_alpha_exact(3, 1024, 1024, 12, 0.0).is_err());
        assert!(u_alpha_exact(3, 1024, 1024, 12, 1.5).is_err());
        assert!(u_alpha_exact(3, 1024, 1024, 2, 1.0).is_err());
    }

    #[test]
    fn u_alpha_exact_decreases_in_alpha() {
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let alpha = 0.2 + 0.04 * k as f64;
            // alpha * 12 > 2 throughout.
            let u = u_alpha_exact(3, 4096, 512, 12, alpha).unwrap();
            assert!(u < prev);
            prev = u;
        }
    }

    #[test]
    fn expansion_values() {
        let beta = 1.045_548_849_896_677_6;
        let lead = u_alpha_expansion_leading(3, 1024, 1024, beta, 1.0).unwrap();
        assert!((lead - 1.150_222_969_932_624).abs() < 1e-12, "{lead}");
        assert!(u_alpha_expansion_leading(4, 99, 7, 2.0, 1.0).unwrap().abs() < 1e-12);
        let half = u_alpha_expansion_leading(3, 1024, 1024, beta, 0.5).unwrap();
        assert!((half - 11.633_894_317_041_807).abs() < 1e-11, "{half}");
    }

    #[test]
    fn regime_examples() {
        assert_eq!(
            classify_regime(3, 1 << 20, 10, DEFAULT_THETA).unwrap().hint,
            RegimeHint::Item2b
        );
        assert_eq!(
            classify_regime(3, 1 << 20, 1 << 20, DEFAULT_THETA)
                .unwrap()
                .hint,
            RegimeHint::Item1
        );
        let a = classify_regime(3, 1 << 20, 14, DEFAULT_THETA).unwrap();
        assert_eq!(a.hint, RegimeHint::Item2a);
        assert!((a.ratio - libm::log2(14.0) / libm::sqrt(20.0)).abs() < 1e-12);
        assert_eq!(
            classify_regime(3, 1 << 20, 14, 0.85).unwrap().hint,
            RegimeHint::Indeterminate
        );
        assert!(classify_regime(3, 10, 11, DEFAULT_THETA).is_err());
    }

    #[test]
    fn report_for_equal_orders() {
        let r = PredictionReport::new(3, 1 << 20, 1 << 20, None, DEFAULT_THETA).unwrap();
        assert_eq!((r.window_lo, r.window_hi), (16, 17));
        assert!(
            r.x_decimal.starts_with("16.99193338482966754071706"),
            "{}",
            r.x_decimal
        );
        assert!(
            r.y_decimal.starts_with("12.45445115010332226913939"),
            "{}",
            r.y_decimal
        );
        assert_eq!(r.inclusion_threshold, 12);
        assert!(r.epsilon_below_half);
        assert!(!r.near_integer);
    }

    #[test]
    fn report_with_large_default_epsilon() {
        // (log2 16)^(-1/3) ~ 0.63: the window is computed but not two-point.
        let r = PredictionReport::new(3, 16, 16, None, DEFAULT_THETA).unwrap();
        assert!(!r.epsilon_below_half);
        assert_eq!((r.window_lo, r.window_hi), (7, 9));
        let r = PredictionReport::new(3, 16, 16, Some(0.25), DEFAULT_THETA).unwrap();
        assert_eq!((r.window_lo, r.window_hi), (8, 8));
    }

    #[test]
    fn window_spans_at_most_one() {
        for d in 3..=5 {
            for k in 2..60u32 {
                let n1 = 1u64 << k;
                for eps in [0.01, 0.2, 0.4999] {
                    let (lo, hi) = two_point_window(d, n1, n1 / 3 + 1, eps).unwrap();
                    assert!(hi - lo == 0 || hi - lo == 1);
                }
            }
        }
    }
}
