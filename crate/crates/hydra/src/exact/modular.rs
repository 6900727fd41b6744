use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest prime accepted by the fingerprint machinery; keeps sums of two residues inside u64.
pub const MAX_PRIME: u64 = 1 << 62;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Fermat inverse; `p` must be prime and `a` nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    (a % p != 0).then(|| pow_mod(a, p - 2, p))
}

pub fn neg_mod(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

pub fn reduce_bigint(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits in u64")
}

pub fn reduce_i64(c: i64, p: u64) -> u64 {
    (c as i128).rem_euclid(p as i128) as u64
}

/// Deterministic Miller-Rabin for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// The smaller square root of -1 modulo a prime `p` with p = 1 mod 4.
pub fn sqrt_neg_one(p: u64) -> Option<u64> {
    if p % 4 != 1 || !is_prime(p) {
        return None;
    }
    for a in 2..p {
        if pow_mod(a, (p - 1) / 2, p) == p - 1 {
            let r = pow_mod(a, (p - 1) / 4, p);
            return Some(r.min(p - r));
        }
    }
    None
}

/// Evaluation of factored units at fixed residues modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMap {
    prime: u64,
    gen_residues: Vec<u64>,
    gen_inverses: Vec<u64>,
}

impl ModMap {
    pub fn new(prime: u64, gen_residues: Vec<u64>) -> Result<Self> {
        if prime >= MAX_PRIME || !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        let mut gen_inverses = Vec::with_capacity(gen_residues.len());
        for &r in &gen_residues {
            gen_inverses.push(inv_mod(r, prime).ok_or(Error::ZeroResidue(prime))?);
        }
        Ok(ModMap {
            prime,
            gen_residues,
            gen_inverses,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn gen_residues(&self) -> &[u64] {
        &self.gen_residues
    }

    /// Residue of `sign * prod gen_i^exps_i`.
    pub fn mod_eval(&self, sign: i8, exps: &[i32]) -> u64 {
        assert_eq!(
            exps.len(),
            self.gen_residues.len(),
            "exponent vector length"
        );
        if sign == 0 {
            return 0;
        }
        let p = self.prime;
        let mut acc = 1;
        for (k, &e) in exps.iter().enumerate() {
            if e > 0 {
                acc = mul_mod(acc, pow_mod(self.gen_residues[k], e as u64, p), p);
            } else if e < 0 {
                acc = mul_mod(
                    acc,
                    pow_mod(self.gen_inverses[k], e.unsigned_abs() as u64, p),
                    p,
                );
            }
        }
        if sign < 0 {
            neg_mod(acc, p)
        } else {
            acc
        }
    }
}

const GF5_INV: [u64; 5] = [0, 1, 3, 2, 4];

/// Image of a rational number in GF(5).
pub fn to_gf5(x: &BigRational) -> Result<u8> {
    // BigRational is kept in lowest terms
    let d = reduce_bigint(x.denom(), 5);
    if d.is_zero() {
        return Err(Error::UndefinedImage(5));
    }
    Ok(((reduce_bigint(x.numer(), 5) * GF5_INV[d as usize]) % 5) as u8)
}
