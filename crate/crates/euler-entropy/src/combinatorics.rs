//! Exact integer combinatorics shared by the counting modules.

use num_bigint::BigUint;
use num_traits::One;

/// n! as an exact integer.
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Binomial coefficient C(n, k) computed by the multiplicative formula.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Double factorial of odd numbers: (2j-1)!! = 1 * 3 * 5 * ... * (2j-1).
///
/// `odd_double_factorial(d - 1)` for even `d` is the number of perfect
/// matchings on `d` points, i.e. pairings at a vertex of degree `d`.
pub fn odd_double_factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut i = 3;
    while i <= n {
        acc *= i;
        i += 2;
    }
    acc
}
