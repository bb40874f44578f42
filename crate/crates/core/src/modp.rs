//! Arithmetic in Z_p for a prime fitting in 61 bits.
//!
//! All descriptor evaluation and linear algebra run over a fixed prime. The
//! default is the Mersenne prime 2^61 - 1, large enough that Schwartz-Zippel
//! collision probabilities are negligible per coordinate while every product
//! of two residues still fits in a u128 intermediate.

/// Default modulus: the Mersenne prime 2^61 - 1.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

/// Reduce `x` modulo 2^61 - 1 using the Mersenne identity 2^61 = 1 (mod p).
#[inline]
fn mersenne_reduce(x: u128) -> u64 {
    const P: u64 = DEFAULT_PRIME;
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let mut s = lo + (hi & P) + (hi >> 61);
    if s >= P {
        s -= P;
    }
    if s >= P {
        s -= P;
    }
    s
}

/// Add modulo `p`. Operands must already be reduced.
#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// Subtract modulo `p`.
#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// Multiply modulo `p` through a 128-bit intermediate.
#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    let wide = a as u128 * b as u128;
    if p == DEFAULT_PRIME {
        mersenne_reduce(wide)
    } else {
        (wide % p as u128) as u64
    }
}

/// Exponentiation by squaring modulo `p`.
pub fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat: a^(p-2) mod p. Requires a != 0.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "inverse of zero");
    pow(a, p - 2, p)
}

/// Deterministic Miller-Rabin primality test for u64.
///
/// The listed bases are sufficient for all inputs below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
