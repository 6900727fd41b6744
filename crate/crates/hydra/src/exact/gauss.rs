use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modular::{inv_mod, mul_mod, pow_mod, reduce_bigint};

/// An element (re + im*i) / 2^two_exp of Z[1/2, i], kept with minimal `two_exp`.
#[derive(Clone, Debug)]
pub struct GaussDyadic {
    re: BigInt,
    im: BigInt,
    two_exp: u32,
}

impl GaussDyadic {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>, two_exp: u32) -> Self {
        let mut g = GaussDyadic {
            re: re.into(),
            im: im.into(),
            two_exp,
        };
        g.canonicalize();
        g
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0, 0)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(0, 1, 0)
    }

    fn canonicalize(&mut self) {
        if self.re.is_zero() && self.im.is_zero() {
            self.two_exp = 0;
            return;
        }
        while self.two_exp > 0 && self.re.is_even() && self.im.is_even() {
            self.re >>= 1;
            self.im >>= 1;
            self.two_exp -= 1;
        }
    }

    pub fn re_num(&self) -> &BigInt {
        &self.re
    }

    pub fn im_num(&self) -> &BigInt {
        &self.im
    }

    pub fn two_exp(&self) -> u32 {
        self.two_exp
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn lift(&self, k: u32) -> (BigInt, BigInt) {
        let s = k - self.two_exp;
        (&self.re << s, &self.im << s)
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.two_exp.max(o.two_exp);
        let (a, b) = self.lift(k);
        let (c, d) = o.lift(k);
        Self::new(a + c, b + d, k)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        GaussDyadic {
            re: -&self.re,
            im: -&self.im,
            two_exp: self.two_exp,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
            self.two_exp + o.two_exp,
        )
    }

    pub fn one_minus(&self) -> Self {
        Self::one().sub(self)
    }

    /// Squared absolute value as (numerator, power of four in the denominator).
    fn norm_parts(&self) -> (BigInt, u32) {
        (&self.re * &self.re + &self.im * &self.im, self.two_exp)
    }

    /// Inverse inside Z[1/2, i]; exists iff the norm is a power of two.
    pub fn inv(&self) -> Option<Self> {
        let (n, k) = self.norm_parts();
        let e = pow2_exponent(&n)?;
        // 2^k/(a+bi) = 2^k (a-bi)/n with n = 2^e
        Some(Self::new(&self.re << k, -(&self.im << k), e))
    }

    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    pub fn pow(&self, n: i32) -> Option<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// log2 |x| for a unit of H2, an exact half-integer.
    pub fn log2_norm(&self) -> Option<Rational64> {
        let (n, k) = self.norm_parts();
        let e = pow2_exponent(&n)? as i64;
        Some(Rational64::new(e - 2 * k as i64, 2))
    }

    /// Writes a unit of H2 as 2^y i^z (1-i)^v with v in {0,1} and z in 0..4.
    pub fn factor_h2(&self) -> Option<(i32, i32, i32)> {
        let (n, k) = self.norm_parts();
        let e = pow2_exponent(&n)? as i64 - 2 * k as i64;
        let v = e.rem_euclid(2);
        let y = (e - v) / 2;
        let two = GaussDyadic::from_int(2).pow(-y as i32)?;
        let t = GaussDyadic::new(1, -1, 0).pow(-v as i32)?;
        let rest = self.mul(&two).mul(&t);
        let z = (0..4).find(|&z| GaussDyadic::i().pow(z).unwrap() == rest)?;
        Some((y as i32, z, v as i32))
    }

    /// Value with i sent to `i_res` modulo `p`, or `None` if 2 is not invertible.
    pub fn eval_mod(&self, p: u64, i_res: u64) -> Option<u64> {
        let h = inv_mod(2, p)?;
        let base = (reduce_bigint(&self.re, p) + mul_mod(reduce_bigint(&self.im, p), i_res, p)) % p;
        Some(mul_mod(base, pow_mod(h, self.two_exp as u64, p), p))
    }

    /// The ring map Z[1/2, i] -> Z[1/2, i] with i sent to `s` (which must square to -1).
    pub fn substitute(&self, s: &GaussDyadic) -> GaussDyadic {
        let num = GaussDyadic::new(self.re.clone(), 0, 0)
            .add(&GaussDyadic::new(self.im.clone(), 0, 0).mul(s));
        num.mul(&GaussDyadic::new(1, 0, self.two_exp))
    }
}

fn pow2_exponent(n: &BigInt) -> Option<u32> {
    if !n.is_positive() {
        return None;
    }
    let t = n.trailing_zeros()?;
    (n >> t).is_one().then(|| t.to_u32()).flatten()
}

impl PartialEq for GaussDyadic {
    fn eq(&self, o: &Self) -> bool {
        let k = self.two_exp.max(o.two_exp);
        self.lift(k) == o.lift(k)
    }
}

impl Eq for GaussDyadic {}

impl Hash for GaussDyadic {
    fn hash<H: Hasher>(&self, h: &mut H) {
        // canonical form is unique, so hashing it agrees with cross-multiplied equality
        self.re.hash(h);
        self.im.hash(h);
        self.two_exp.hash(h);
    }
}

impl fmt::Display for GaussDyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => return write!(f, "0"),
            (false, true) => self.re.to_string(),
            (true, false) => match &self.im {
                x if x.is_one() => "i".to_string(),
                x if (-x).is_one() => "-i".to_string(),
                x => format!("{x}*i"),
            },
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                let a = self.im.abs();
                let im = if a.is_one() {
                    "i".to_string()
                } else {
                    format!("{a}*i")
                };
                format!("{} {} {}", self.re, sign, im)
            }
        };
        if self.two_exp == 0 {
            return write!(f, "{num}");
        }
        let den = BigInt::one() << self.two_exp;
        if !self.re.is_zero() && !self.im.is_zero() {
            write!(f, "({num})/{den}")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(a: i64, b: i64, k: u32) -> GaussDyadic {
        GaussDyadic::new(a, b, k)
    }

    #[test]
    fn canonical_form() {
        let x = g(4, 2, 3);
        assert_eq!(
            (x.re_num().clone(), x.im_num().clone(), x.two_exp()),
            (2.into(), 1.into(), 2)
        );
        assert_eq!(g(2, 0, 1), GaussDyadic::one());
        assert_eq!(g(0, 0, 5).two_exp(), 0);
    }

    #[test]
    fn one_minus_half_plus_half_i() {
        assert_eq!(g(1, 1, 1).one_minus(), g(1, -1, 1));
    }

    #[test]
    fn inverses() {
        assert_eq!(g(1, -1, 0).inv().unwrap(), g(1, 1, 1));
        assert_eq!(GaussDyadic::i().inv().unwrap(), g(0, -1, 0));
        assert_eq!(g(1, 0, 1).inv().unwrap(), g(2, 0, 0));
        assert!(g(3, 0, 0).inv().is_none());
        assert!(g(2, 1, 0).inv().is_none());
    }

    #[test]
    fn log2_norms() {
        assert_eq!(g(1, -1, 0).log2_norm(), Some(Rational64::new(1, 2)));
        assert_eq!(g(1, 0, 1).log2_norm(), Some(Rational64::new(-1, 1)));
        assert_eq!(g(1, 1, 1).log2_norm(), Some(Rational64::new(-1, 2)));
        assert_eq!(g(3, 0, 0).log2_norm(), None);
    }

    #[test]
    fn h2_factorization() {
        // -1 = i^2
        assert_eq!(g(-1, 0, 0).factor_h2(), Some((0, 2, 0)));
        // (1+i)/2 = 2^-1 i (1-i)
        assert_eq!(g(1, 1, 1).factor_h2(), Some((-1, 1, 1)));
        assert_eq!(g(2, 0, 0).factor_h2(), Some((1, 0, 0)));
        assert_eq!(g(1, 2, 0).factor_h2(), None);
    }

    #[test]
    fn conjugation() {
        let s = GaussDyadic::i().neg();
        assert_eq!(g(1, 1, 1).substitute(&s), g(1, -1, 1));
        assert_eq!(g(3, -2, 2).substitute(&GaussDyadic::i()), g(3, -2, 2));
    }

    #[test]
    fn display() {
        assert_eq!(g(1, -1, 1).to_string(), "(1 - i)/2");
        assert_eq!(g(0, -1, 0).to_string(), "-i");
        assert_eq!(g(1, 0, 1).to_string(), "1/2");
        assert_eq!(g(1, 1, 0).to_string(), "1 + i");
    }

    fn unit() -> impl Strategy<Value = GaussDyadic> {
        (-3i32..4, 0i32..4, -3i32..4, any::<bool>()).prop_map(|(y, z, v, neg)| {
            let u = GaussDyadic::from_int(2)
                .pow(y)
                .unwrap()
                .mul(&GaussDyadic::i().pow(z).unwrap())
                .mul(&g(1, -1, 0).pow(v).unwrap());
            if neg {
                u.neg()
            } else {
                u
            }
        })
    }

    proptest! {
        #[test]
        fn log2_norm_is_additive(a in unit(), b in unit()) {
            let s = a.log2_norm().unwrap() + b.log2_norm().unwrap();
            prop_assert_eq!(a.mul(&b).log2_norm().unwrap(), s);
        }

        #[test]
        fn factorization_reconstructs(a in unit()) {
            let (y, z, v) = a.factor_h2().unwrap();
            let back = GaussDyadic::from_int(2).pow(y).unwrap()
                .mul(&GaussDyadic::i().pow(z).unwrap())
                .mul(&g(1, -1, 0).pow(v).unwrap());
            prop_assert_eq!(back, a);
        }
    }
}
