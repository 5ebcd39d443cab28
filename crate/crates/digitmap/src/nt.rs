//! Exact number theory on machine-range integers.
//!
//! Everything here operates on quantities derived from a single digit or
//! from f(b-1), so u64 with u128 intermediates is always enough.

/// Euclidean gcd with the convention gcd(0, q) = q.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Trial-division factorization, smallest prime first.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut a = 0u32;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

pub fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of a modulo m, when gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Least k >= 1 with a^k = 1 mod q. Requires gcd(a, q) = 1.
pub fn multiplicative_order(a: u64, q: u64) -> Option<u64> {
    if q == 0 || gcd(a % q.max(1), q) != 1 {
        return None;
    }
    if q == 1 {
        return Some(1);
    }
    let mut ord = euler_phi(q);
    for (p, _) in factorize(ord) {
        while ord % p == 0 && mod_pow(a, ord / p, q) == 1 {
            ord /= p;
        }
    }
    Some(ord)
}

/// Smallest generator of U(p) for prime p.
pub fn primitive_root(p: u64) -> Option<u64> {
    if !is_prime(p) {
        return None;
    }
    if p == 2 {
        return Some(1);
    }
    let phi = p - 1;
    let factors = factorize(phi);
    'outer: for g in 2..p {
        for (f, _) in &factors {
            if mod_pow(g, phi / f, p) == 1 {
                continue 'outer;
            }
        }
        return Some(g);
    }
    None
}
