//! Small integer utilities shared by the algebraic modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: i64) -> i64 {
    assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn isqrt_big(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    n.sqrt()
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = isqrt(n);
        r * r == n
    }
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization of |n| as (prime, exponent) pairs in increasing order.
pub fn factorize(n: i64) -> Vec<(i64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: i64) -> Vec<i64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_squarefree(n: i64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn primes_up_to(n: i64) -> Vec<i64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).map(|i| i as i64).collect()
}

pub fn valuation(mut n: i64, p: i64) -> u32 {
    assert!(n != 0);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Kronecker symbol (a/n), with the full extension to n ≤ 0 and n even.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (a/n) for odd positive n.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// True iff `d` is a fundamental discriminant (of either sign, d ≠ 0, 1).
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Prime discriminants whose product is the fundamental discriminant `d`.
pub fn prime_discriminants(d: i64) -> Vec<i64> {
    assert!(is_fundamental(d));
    let mut out = Vec::new();
    let mut rest = d;
    for p in prime_divisors(d) {
        if p == 2 {
            continue;
        }
        let ps = if p % 4 == 1 { p } else { -p };
        out.push(ps);
        rest /= ps;
    }
    if d % 4 == 0 {
        out.insert(0, rest);
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn to_i64(n: &BigInt) -> i64 {
    n.to_i64().expect("integer overflow converting to i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_brute(a: i64, p: i64) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            0
        } else if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(17, 1), 1);
        assert_eq!(kronecker(-7, 5), -1);
        assert_eq!(kronecker(161, 19), 1);
        assert_eq!(kronecker(5, 11), 1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(12, 2), 0);
    }

    #[test]
    fn kronecker_matches_euler_on_odd_primes() {
        for p in primes_up_to(200).into_iter().skip(1) {
            for a in -60..60 {
                assert_eq!(kronecker(a, p), legendre_brute(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn fundamental_discriminants() {
        let good = [5, 8, 12, 13, 21, 28, 161, -3, -4, -7, -8, -23, 24];
        let bad = [1, 4, 9, 16, 20, 45, -12, -16, 2, 3];
        for d in good {
            assert!(is_fundamental(d), "{d}");
        }
        for d in bad {
            assert!(!is_fundamental(d), "{d}");
        }
    }

    #[test]
    fn prime_discriminant_products() {
        for d in [5i64, 8, 12, 21, 28, 161, 24, -4, -7, -23, -84, 1155] {
            if !is_fundamental(d) {
                continue;
            }
            let ps = prime_discriminants(d);
            assert_eq!(ps.iter().product::<i64>(), d, "{d}: {ps:?}");
            assert!(ps.iter().all(|&q| is_fundamental(q)));
        }
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..2000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }
}
