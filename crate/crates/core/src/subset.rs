//! Binomial coefficients and the colexicographic ranking of k-subsets.
//!
//! The colex rank of a sorted subset `s_0 < s_1 < ... < s_{k-1}` is
//! `C(s_0, 1) + C(s_1, 2) + ... + C(s_{k-1}, k)`. It does not depend on the
//! size of the ground set, so subsets of `{0..n-1}` occupy exactly the ranks
//! `0..C(n, k)` for every `n`.

use alloc::vec::Vec;

/// Exact binomial coefficient. Panics on `u128` overflow.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step.
        acc = acc
            .checked_mul(n as u128 - k as u128 + i)
            .expect("binomial coefficient overflows u128")
            / i;
    }
    acc
}

/// Binomial coefficient as a `usize`, for sizing bit vectors.
pub fn binomial_usize(n: usize, k: usize) -> Option<usize> {
    usize::try_from(binomial(n as u64, k as u64)).ok()
}

#[inline]
fn choose(n: usize, k: usize) -> usize {
    match k {
        0 => 1,
        1 => n,
        2 => n * n.saturating_sub(1) / 2,
        3 => {
            if n < 3 {
                0
            } else {
                n * (n - 1) / 2 * (n - 2) / 3
            }
        }
        _ => binomial(n as u64, k as u64) as usize,
    }
}

/// Colex rank of a strictly increasing subset.
#[inline]
pub fn rank(sorted: &[usize]) -> usize {
    debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    sorted
        .iter()
        .enumerate()
        .map(|(i, &s)| choose(s, i + 1))
        .sum()
}

/// Inverse of [`rank`] for subsets of size `k`.
pub fn unrank(mut index: usize, k: usize) -> Vec<usize> {
    let mut out = alloc::vec![0; k];
    for i in (1..=k).rev() {
        // Largest c with C(c, i) <= index; c >= i - 1 since C(i-1, i) = 0.
        let mut lo = i - 1;
        let mut hi = i;
        while choose(hi, i) <= index {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if choose(mid, i) <= index {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out[i - 1] = lo;
        index -= choose(lo, i);
    }
    out
}

/// Advances a strictly increasing subset of `{0..n-1}` to its colex
/// successor. Returns `false` after the last subset.
pub fn next_colex(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in 0..k {
        let limit = if i + 1 < k { subset[i + 1] } else { n };
        if subset[i] + 1 < limit {
            subset[i] += 1;
            for (j, slot) in subset.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}
