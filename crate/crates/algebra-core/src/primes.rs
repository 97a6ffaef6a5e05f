//! Word-size prime utilities: deterministic Miller-Rabin for `u64`, a small
//! prime sieve, and the decreasing prime stream feeding multimodular
//! algorithms.

use alloc::vec::Vec;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin: the witness set below decides primality for
/// every `u64` (Sinclair's 7-base set).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= bound` by a plain sieve.
pub fn sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = alloc::vec![false; n + 1];
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

/// Deterministic stream of primes counting downward from a starting point.
/// Used for multimodular Chinese remaindering.
pub struct DescendingPrimes {
    next: u64,
}

impl DescendingPrimes {
    /// Stream starting just below `2^62`.
    pub fn new() -> Self {
        DescendingPrimes { next: (1u64 << 62) - 1 }
    }

    pub fn starting_below(bound: u64) -> Self {
        DescendingPrimes { next: bound - 1 }
    }
}

impl Default for DescendingPrimes {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for DescendingPrimes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.next >= 2 {
            let c = self.next;
            self.next -= 1;
            if is_prime_u64(c) {
                return Some(c);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primality() {
        let small = sieve(2000);
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), small.contains(&n), "n = {n}");
        }
    }

    #[test]
    fn large_primality() {
        assert!(is_prime_u64((1 << 61) - 1)); // Mersenne prime
        assert!(!is_prime_u64(u64::MAX)); // 3 * 5 * 17 * ...
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
    }

    #[test]
    fn descending_stream_is_deterministic() {
        let a: Vec<u64> = DescendingPrimes::new().take(3).collect();
        let b: Vec<u64> = DescendingPrimes::new().take(3).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|&p| is_prime_u64(p) && p < (1 << 62)));
        assert!(a[0] > a[1] && a[1] > a[2]);
    }
}
