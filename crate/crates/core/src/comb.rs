//! Combinatorial number tables: generalized binomials, Stirling numbers,
//! factorials, and a few small number-theoretic helpers.
//!
//! Everything returns `BigInt` so callers never worry about overflow, and
//! the Stirling orthogonality `sum_k S(m,k) s(k,l) = delta_{ml}` holds
//! exactly.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Generalized binomial coefficient `C(n, k) = n(n-1)...(n-k+1) / k!`.
///
/// `n` may be negative, which is what the truncated expansion of
/// `(1+u)^n` for inverse graph classes needs. Pascal's recurrence
/// `C(n, k) = C(n-1, k) + C(n-1, k-1)` holds for every integer `n`.
pub fn binomial(n: i64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n) - BigInt::from(j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

/// `n!`.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Stirling number of the second kind `S(m, k)`: set partitions of an
/// `m`-set into `k` nonempty blocks.
pub fn stirling_second(m: u64, k: u64) -> BigInt {
    if m == 0 && k == 0 {
        return BigInt::one();
    }
    if k == 0 || k > m {
        return BigInt::zero();
    }
    // S(m,k) = k*S(m-1,k) + S(m-1,k-1)
    let mut row = vec![BigInt::zero(); (m + 1) as usize];
    row[0] = BigInt::one();
    for _ in 1..=m {
        for j in (1..row.len()).rev() {
            let prev = row[j - 1].clone();
            row[j] = BigInt::from(j as u64) * &row[j] + prev;
        }
        row[0] = BigInt::zero();
    }
    row[k as usize].clone()
}

/// Signed Stirling number of the first kind `s(k, l)`, defined by the
/// falling factorial expansion `x(x-1)...(x-k+1) = sum_l s(k, l) x^l`.
pub fn stirling_first_signed(k: u64, l: u64) -> BigInt {
    if k == 0 && l == 0 {
        return BigInt::one();
    }
    if l == 0 || l > k {
        return BigInt::zero();
    }
    // s(k+1,l) = s(k,l-1) - k*s(k,l)
    let mut row = vec![BigInt::zero(); (k + 1) as usize];
    row[0] = BigInt::one();
    for i in 0..k {
        for j in (1..row.len()).rev() {
            let prev = row[j - 1].clone();
            row[j] = prev - BigInt::from(i) * &row[j];
        }
        row[0] = BigInt::zero();
    }
    row[l as usize].clone()
}

/// Primes `p <= bound`, by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    out
}

/// Euler totient, by trial-division factorization.
pub fn euler_phi(mut n: u64) -> u64 {
    assert!(n > 0);
    let mut phi = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// True if `n` has no repeated prime factor.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Multiplicative order of `a` in `(Z/n)^* / {±1}`, for `gcd(a, n) = 1`,
/// `n > 2`. Smallest `r >= 1` with `a^r ≡ ±1 (mod n)`.
pub fn order_mod_up_to_sign(a: u64, n: u64) -> u64 {
    assert!(n > 2 && num_integer::gcd(a, n) == 1);
    let mut x = a % n;
    let mut r = 1;
    while x != 1 && x != n - 1 {
        x = x * (a % n) % n;
        r += 1;
    }
    r
}

/// True if `n` is a power of an odd prime (`p^a`, `a >= 1`).
pub fn is_odd_prime_power(n: u64) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = n;
            while m.is_multiple_of(p) {
                m /= p;
            }
            return m == 1;
        }
        p += 2;
    }
    true // n itself is an odd prime
}
