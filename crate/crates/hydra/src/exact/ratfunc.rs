use num_bigint::BigInt;
use num_traits::One;

use super::modular::{inv_mod, mul_mod};
use super::poly::MonomialPoly;
use crate::error::{Error, Result};

/// Quotient of two polynomials, never reduced. Equality is by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: MonomialPoly,
    den: MonomialPoly,
}

impl RatFunc {
    pub fn new(num: MonomialPoly, den: MonomialPoly) -> Result<Self> {
        if num.arity() != den.arity() {
            return Err(Error::ArityMismatch(num.arity(), den.arity()));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(p: MonomialPoly) -> Self {
        let den = MonomialPoly::one(p.arity());
        RatFunc { num: p, den }
    }

    pub fn constant(arity: usize, c: impl Into<BigInt>) -> Self {
        Self::from_poly(MonomialPoly::constant(arity, c))
    }

    pub fn var(arity: usize, j: usize) -> Self {
        Self::from_poly(MonomialPoly::var(arity, j))
    }

    pub fn num(&self) -> &MonomialPoly {
        &self.num
    }

    pub fn den(&self) -> &MonomialPoly {
        &self.den
    }

    pub fn arity(&self) -> usize {
        self.num.arity()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        RatFunc {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        RatFunc {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn one_minus(&self) -> Self {
        RatFunc {
            num: &self.den - &self.num,
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let e = n.unsigned_abs();
        Ok(RatFunc {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// Cross-multiplication equality.
    pub fn exact_eq(&self, o: &Self) -> bool {
        ratfunc_eq(self, o)
    }

    /// Residue at the given point, or `None` when the denominator vanishes there.
    pub fn eval_mod(&self, p: u64, residues: &[u64]) -> Option<u64> {
        let d = inv_mod(self.den.eval_mod(p, residues), p)?;
        Some(mul_mod(self.num.eval_mod(p, residues), d, p))
    }

    /// Composition: indeterminate j is replaced by `images[j]`. The result has the images' arity.
    pub fn substitute(&self, images: &[RatFunc]) -> Result<Self> {
        let n = self.arity();
        if images.len() != n {
            return Err(Error::ArityMismatch(n, images.len()));
        }
        let target = images.first().map(RatFunc::arity).unwrap_or(0);
        if images.iter().any(|r| r.arity() != target) {
            return Err(Error::Expr("substitution images of mixed arity".into()));
        }
        if n == 0 {
            let c = |p: &MonomialPoly| MonomialPoly::constant(target, p.as_constant().unwrap());
            return Self::new(c(&self.num), c(&self.den));
        }
        // every term is scaled by prod den_j^(d_j) so that all exponents become polynomial
        let degs: Vec<u32> = (0..n)
            .map(|j| self.num.degree_in(j).max(self.den.degree_in(j)))
            .collect();
        let powers = |f: &dyn Fn(&RatFunc) -> &MonomialPoly| -> Vec<Vec<MonomialPoly>> {
            images
                .iter()
                .zip(&degs)
                .map(|(img, &d)| {
                    let base = f(img);
                    let mut v = vec![MonomialPoly::one(target)];
                    for k in 1..=d as usize {
                        let next = &v[k - 1] * base;
                        v.push(next);
                    }
                    v
                })
                .collect()
        };
        let num_pows = powers(&|r| &r.num);
        let den_pows = powers(&|r| &r.den);
        let apply = |p: &MonomialPoly| {
            let mut acc = MonomialPoly::zero(target);
            for (m, c) in p.terms() {
                let mut t = MonomialPoly::constant(target, c.clone());
                for j in 0..n {
                    let e = m.0[j] as usize;
                    if e > 0 {
                        t = &t * &num_pows[j][e];
                    }
                    let rest = degs[j] as usize - e;
                    if rest > 0 {
                        t = &t * &den_pows[j][rest];
                    }
                }
                acc = &acc + &t;
            }
            acc
        };
        Self::new(apply(&self.num), apply(&self.den))
    }

    pub fn display(&self, names: &[String]) -> String {
        let wrap = |p: &MonomialPoly| {
            let s = p.display(names);
            if p.len() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        if self.den == MonomialPoly::one(self.arity()) {
            return self.num.display(names);
        }
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }

    pub fn is_one_den(&self) -> bool {
        self.den.as_constant().is_some_and(|c| c.is_one())
    }
}

/// True iff `a.num * b.den - b.num * a.den` is the zero polynomial.
pub fn ratfunc_eq(a: &RatFunc, b: &RatFunc) -> bool {
    assert_eq!(a.arity(), b.arity(), "arity mismatch");
    if a.num == b.num && a.den == b.den {
        return true;
    }
    if a.num.is_zero() || b.num.is_zero() {
        return a.num.is_zero() && b.num.is_zero();
    }
    &a.num * &b.den == &b.num * &a.den
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> RatFunc {
        RatFunc::var(1, 0)
    }

    fn c(n: i64) -> RatFunc {
        RatFunc::constant(1, n)
    }

    #[test]
    fn occurs_in_list_example() {
        let a = c(-1).div(&x().sub(&c(1))).unwrap();
        let b = c(1).div(&c(1).sub(&x())).unwrap();
        assert!(ratfunc_eq(&a, &b));
    }

    #[test]
    fn distinct_polynomials() {
        assert!(!ratfunc_eq(&x(), &x().one_minus()));
    }

    #[test]
    fn factored_against_expanded() {
        // -x/(x^3+1) against -x (x+1)^-1 (x^2-x+1)^-1
        let cube = x().pow(3).unwrap().add(&c(1));
        let a = x().neg().div(&cube).unwrap();
        let q = x().pow(2).unwrap().sub(&x()).add(&c(1));
        let b = x()
            .neg()
            .mul(&x().add(&c(1)).pow(-1).unwrap())
            .mul(&q.pow(-1).unwrap());
        assert!(ratfunc_eq(&a, &b));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(x().div(&c(0)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn substitution_composes() {
        // x -> 1/(1-x) applied three times is the identity
        let s = c(1).div(&x().one_minus()).unwrap();
        let twice = s.substitute(&[s.clone()]).unwrap();
        let thrice = twice.substitute(&[s.clone()]).unwrap();
        assert!(ratfunc_eq(&thrice, &x()));
        assert!(ratfunc_eq(&twice, &x().sub(&c(1)).div(&x()).unwrap()));
    }

    #[test]
    fn substitution_changes_arity() {
        let a = RatFunc::var(2, 0);
        let b = RatFunc::var(2, 1);
        let f = a.mul(&b).sub(&RatFunc::constant(2, 1)).div(&a).unwrap();
        let g = f.substitute(&[x(), x()]).unwrap();
        assert_eq!(g.arity(), 1);
        assert!(ratfunc_eq(
            &g,
            &x().pow(2).unwrap().sub(&c(1)).div(&x()).unwrap()
        ));
    }

    #[test]
    fn substitution_into_zero_denominator() {
        let f = c(1).div(&x().sub(&c(1))).unwrap();
        assert_eq!(f.substitute(&[c(1)]).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn eval_mod_values() {
        let f = x().div(&x().sub(&c(1))).unwrap();
        assert_eq!(f.eval_mod(7, &[1]), None);
        // 3/2 = 3*4 = 12 = 5 mod 7
        assert_eq!(f.eval_mod(7, &[3]), Some(5));
    }

    fn small() -> impl Strategy<Value = RatFunc> {
        let poly = proptest::collection::vec(-3i64..4, 1..4).prop_map(|cs| {
            MonomialPoly::from_terms(
                2,
                cs.iter()
                    .enumerate()
                    .map(|(k, c)| (vec![k as u32 % 2, k as u32 / 2], BigInt::from(*c))),
            )
        });
        (poly.clone(), poly)
            .prop_filter("nonzero denominator", |(_, d)| !d.is_zero())
            .prop_map(|(n, d)| RatFunc::new(n, d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn equality_is_transitive(a in small(), b in small(), k in 1i64..4) {
            // scale one representative so some triples are equal with distinct forms
            let scaled = RatFunc::new(
                a.num().scale(&BigInt::from(k)),
                a.den().scale(&BigInt::from(k)),
            ).unwrap();
            for (p, q, r) in [(&a, &scaled, &b), (&a, &b, &scaled), (&b, &a, &scaled)] {
                if ratfunc_eq(p, q) && ratfunc_eq(q, r) {
                    prop_assert!(ratfunc_eq(p, r));
                }
            }
            prop_assert!(ratfunc_eq(&a, &scaled));
            prop_assert_eq!(ratfunc_eq(&a, &b), ratfunc_eq(&b, &a));
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in small(), b in small(), r in 0u64..101, s in 0u64..101) {
            let p = 101;
            if let (Some(x), Some(y), Some(z)) =
                (a.eval_mod(p, &[r, s]), b.eval_mod(p, &[r, s]), a.mul(&b).eval_mod(p, &[r, s]))
            {
                prop_assert_eq!(mul_mod(x, y, p), z);
            }
        }
    }
}
