use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::modular::{mul_mod, pow_mod, reduce_bigint};
use crate::error::{Error, Result};

/// Exponent tuple, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one(arity: usize) -> Self {
        Monomial(SmallVec::from_elem(0, arity))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

/// Sparse polynomial over Z in `arity` indeterminates. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialPoly {
    arity: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl MonomialPoly {
    pub fn zero(arity: usize) -> Self {
        MonomialPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::one(arity), c.into());
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, 1)
    }

    pub fn var(arity: usize, j: usize) -> Self {
        assert!(j < arity, "variable index out of range");
        let mut m = Monomial::one(arity);
        m.0[j] = 1;
        let mut p = Self::zero(arity);
        p.add_term(m, BigInt::one());
        p
    }

    /// Builds from (exponents, coefficient) pairs; repeated monomials accumulate.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent tuple length must equal arity");
            p.add_term(Monomial(e.into_iter().collect()), c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree_in(&self, j: usize) -> u32 {
        self.terms.keys().map(|m| m.0[j]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        MonomialPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.arity);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Quotient `self / g` when `g` divides `self` exactly in Z[x], otherwise `None`.
    pub fn exact_div(&self, g: &MonomialPoly) -> Option<MonomialPoly> {
        assert_eq!(self.arity, g.arity);
        let (gm, gc) = g.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero(self.arity);
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(gm)?;
            let (c, r) = rc.div_rem(gc);
            if !r.is_zero() {
                return None;
            }
            let mut t = Self::zero(self.arity);
            t.add_term(m.clone(), c.clone());
            rem = &rem - &(&t * g);
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Value at the given residues modulo `p`.
    pub fn eval_mod(&self, p: u64, residues: &[u64]) -> u64 {
        assert_eq!(residues.len(), self.arity);
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = reduce_bigint(c, p);
            for (r, e) in residues.iter().zip(&m.0) {
                if *e > 0 {
                    t = mul_mod(t, pow_mod(*r, *e as u64, p), p);
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// Formats with the given variable names, terms in ascending order.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mut factors = Vec::new();
            for (j, e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[j].clone()),
                    _ => factors.push(format!("{}^{}", names[j], e)),
                }
            }
            if factors.is_empty() {
                write!(s, "{a}").unwrap();
            } else {
                if !a.is_one() {
                    write!(s, "{a}*").unwrap();
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

pub fn poly_arith(a: &MonomialPoly, b: &MonomialPoly, kind: ArithKind) -> Result<MonomialPoly> {
    a.check_arity(b)?;
    Ok(match kind {
        ArithKind::Add => a + b,
        ArithKind::Sub => a - b,
        ArithKind::Mul => a * b,
    })
}

impl Add for &MonomialPoly {
    type Output = MonomialPoly;
    fn add(self, rhs: &MonomialPoly) -> MonomialPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MonomialPoly {
    type Output = MonomialPoly;
    fn sub(self, rhs: &MonomialPoly) -> MonomialPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MonomialPoly {
    type Output = MonomialPoly;
    fn mul(self, rhs: &MonomialPoly) -> MonomialPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = MonomialPoly::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MonomialPoly {
    type Output = MonomialPoly;
    fn neg(self) -> MonomialPoly {
        MonomialPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> MonomialPoly {
        MonomialPoly::var(1, 0)
    }

    fn c(n: i64) -> MonomialPoly {
        MonomialPoly::constant(1, n)
    }

    // dense coefficient convolution, independent of the sparse map
    fn convolve(x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut out = vec![0; x.len() + y.len() - 1];
        for (i, a) in x.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }

    fn dense(x: &[i64]) -> MonomialPoly {
        MonomialPoly::from_terms(
            1,
            x.iter()
                .enumerate()
                .map(|(k, c)| (vec![k as u32], BigInt::from(*c))),
        )
    }

    #[test]
    fn self_cancellation() {
        let r = poly_arith(&a(), &a(), ArithKind::Sub).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.len(), 0);
    }

    #[test]
    fn difference_of_squares() {
        let r = poly_arith(&(&c(1) - &a()), &(&c(1) + &a()), ArithKind::Mul).unwrap();
        assert_eq!(r, &c(1) - &a().pow(2));
    }

    #[test]
    fn sum_of_cubes_matches_convolution() {
        let q = &(&a().pow(2) - &a()) + &c(1);
        let r = poly_arith(&q, &(&a() + &c(1)), ArithKind::Mul).unwrap();
        assert_eq!(r, dense(&convolve(&[1, -1, 1], &[1, 1])));
        assert_eq!(r, &a().pow(3) + &c(1));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let b = MonomialPoly::var(2, 1);
        assert_eq!(
            poly_arith(&a(), &b, ArithKind::Add),
            Err(Error::ArityMismatch(1, 2))
        );
    }

    #[test]
    fn grlex_order() {
        let m = |v: &[u32]| Monomial(v.iter().copied().collect());
        assert!(m(&[0, 2]) > m(&[1, 0]));
        assert!(m(&[1, 1]) > m(&[0, 2]));
        assert!(m(&[2, 0]) > m(&[1, 1]));
    }

    #[test]
    fn exact_division() {
        let x = MonomialPoly::var(2, 0);
        let y = MonomialPoly::var(2, 1);
        let one = MonomialPoly::one(2);
        let g = &(&x * &y) - &one;
        let f = &(&g * &g) * &(&x - &y);
        assert_eq!(f.exact_div(&g).unwrap(), &g * &(&x - &y));
        assert!(f.exact_div(&(&x + &one)).is_none());
        assert!(f
            .scale(&BigInt::from(3))
            .exact_div(&g.scale(&BigInt::from(2)))
            .is_none());
    }

    #[test]
    fn eval_mod_matches_integer_eval() {
        let q = &(&a().pow(2) - &a()) + &c(1);
        assert_eq!(q.eval_mod(1299709, &[5]), 21);
        assert_eq!((-&q).eval_mod(11, &[3]), 4);
    }

    #[test]
    fn display_ascending() {
        let q = &(&a().pow(2) - &a()) + &c(1);
        assert_eq!(q.display(&["a".into()]), "1 - a + a^2");
        assert_eq!((-&q).display(&["a".into()]), "-1 + a - a^2");
    }
}
