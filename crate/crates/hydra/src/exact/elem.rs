use super::gauss::GaussDyadic;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// The ground ring of a partial field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ground {
    /// Q(x_1, ..., x_n) with the given indeterminate names.
    Rational { vars: Vec<String> },
    /// Z[1/2, i].
    Gaussian,
}

impl Ground {
    /// Number of free symbols an automorphism may move: the indeterminates, or `i`.
    pub fn symbol_count(&self) -> usize {
        match self {
            Ground::Rational { vars } => vars.len(),
            Ground::Gaussian => 1,
        }
    }

    pub fn symbol_names(&self) -> Vec<String> {
        match self {
            Ground::Rational { vars } => vars.clone(),
            Ground::Gaussian => vec!["i".into()],
        }
    }

    pub fn constant(&self, n: i64) -> Elem {
        match self {
            Ground::Rational { vars } => Elem::Rat(RatFunc::constant(vars.len(), n)),
            Ground::Gaussian => Elem::Gauss(GaussDyadic::from_int(n)),
        }
    }

    pub fn symbol(&self, j: usize) -> Elem {
        match self {
            Ground::Rational { vars } => Elem::Rat(RatFunc::var(vars.len(), j)),
            Ground::Gaussian => Elem::Gauss(GaussDyadic::i()),
        }
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbol_names().iter().position(|v| v == name)
    }
}

/// A value in either ground ring. Mixing grounds in one operation is a logic error.
#[derive(Clone, Debug)]
pub enum Elem {
    Rat(RatFunc),
    Gauss(GaussDyadic),
}

macro_rules! both {
    ($a:expr, $b:expr, $x:ident, $y:ident => $rat:expr, $gauss:expr) => {
        match ($a, $b) {
            (Elem::Rat($x), Elem::Rat($y)) => $rat,
            (Elem::Gauss($x), Elem::Gauss($y)) => $gauss,
            _ => panic!("mixed ground rings"),
        }
    };
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Rat(r) => r.is_zero(),
            Elem::Gauss(g) => g.is_zero(),
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        both!(self, o, a, b => Elem::Rat(a.add(b)), Elem::Gauss(a.add(b)))
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        both!(self, o, a, b => Elem::Rat(a.sub(b)), Elem::Gauss(a.sub(b)))
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        both!(self, o, a, b => Elem::Rat(a.mul(b)), Elem::Gauss(a.mul(b)))
    }

    pub fn neg(&self) -> Elem {
        match self {
            Elem::Rat(r) => Elem::Rat(r.neg()),
            Elem::Gauss(g) => Elem::Gauss(g.neg()),
        }
    }

    pub fn one_minus(&self) -> Elem {
        match self {
            Elem::Rat(r) => Elem::Rat(r.one_minus()),
            Elem::Gauss(g) => Elem::Gauss(g.one_minus()),
        }
    }

    pub fn inv(&self) -> Result<Elem> {
        match self {
            Elem::Rat(r) => Ok(Elem::Rat(r.inv()?)),
            Elem::Gauss(g) => {
                if g.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                g.inv()
                    .map(Elem::Gauss)
                    .ok_or_else(|| Error::NotGaussDyadic(format!("1/({g})")))
            }
        }
    }

    pub fn div(&self, o: &Elem) -> Result<Elem> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, n: i32) -> Result<Elem> {
        match self {
            Elem::Rat(r) => Ok(Elem::Rat(r.pow(n)?)),
            Elem::Gauss(g) => {
                if n < 0 && g.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                g.pow(n)
                    .map(Elem::Gauss)
                    .ok_or_else(|| Error::NotGaussDyadic(format!("({g})^{n}")))
            }
        }
    }

    pub fn exact_eq(&self, o: &Elem) -> bool {
        both!(self, o, a, b => a.exact_eq(b), a == b)
    }

    /// Residue with the free symbols sent to `symbols` modulo `p`; `None` on a vanishing denominator.
    pub fn eval_mod(&self, p: u64, symbols: &[u64]) -> Option<u64> {
        match self {
            Elem::Rat(r) => r.eval_mod(p, symbols),
            Elem::Gauss(g) => g.eval_mod(p, symbols[0]),
        }
    }

    /// Image under the ring map sending the free symbols to `images`.
    pub fn substitute(&self, images: &[Elem]) -> Result<Elem> {
        match self {
            Elem::Rat(r) => {
                let imgs = images
                    .iter()
                    .map(|e| match e {
                        Elem::Rat(x) => Ok(x.clone()),
                        Elem::Gauss(_) => {
                            Err(Error::Expr("Gaussian image for a rational symbol".into()))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Elem::Rat(r.substitute(&imgs)?))
            }
            Elem::Gauss(g) => match images {
                [Elem::Gauss(s)] => {
                    if s.mul(s) != GaussDyadic::from_int(-1) {
                        return Err(Error::Expr(format!("i -> {s} is not a ring map")));
                    }
                    Ok(Elem::Gauss(g.substitute(s)))
                }
                _ => Err(Error::Expr(
                    "Gaussian substitution takes one Gaussian image".into(),
                )),
            },
        }
    }

    /// Evaluates a rational function at Gaussian-dyadic points.
    pub fn eval_gauss(&self, points: &[GaussDyadic]) -> Result<GaussDyadic> {
        match self {
            Elem::Gauss(g) => Ok(g.clone()),
            Elem::Rat(r) => {
                let ev = |p: &super::poly::MonomialPoly| {
                    let mut acc = GaussDyadic::zero();
                    for (m, c) in p.terms() {
                        let mut t = GaussDyadic::from_int(c.clone());
                        for (x, e) in points.iter().zip(&m.0) {
                            t = t.mul(&x.pow(*e as i32).unwrap());
                        }
                        acc = acc.add(&t);
                    }
                    acc
                };
                let d = ev(r.den());
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                let n = ev(r.num());
                n.checked_div(&d)
                    .ok_or_else(|| Error::NotGaussDyadic(format!("({n})/({d})")))
            }
        }
    }

    pub fn display(&self, ground: &Ground) -> String {
        match self {
            Elem::Rat(r) => r.display(&ground.symbol_names()),
            Elem::Gauss(g) => g.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_substitution_requires_square_root_of_minus_one() {
        let g = Ground::Gaussian;
        let x = Elem::Gauss(GaussDyadic::new(1, 1, 1));
        assert!(x.substitute(&[g.constant(2)]).is_err());
        let conj = x.substitute(&[g.symbol(0).neg()]).unwrap();
        assert!(conj.exact_eq(&Elem::Gauss(GaussDyadic::new(1, -1, 1))));
    }

    #[test]
    fn rational_function_at_gaussian_point() {
        let g = Ground::Rational {
            vars: vec!["a".into()],
        };
        let a = g.symbol(0);
        // a/(a-1) at a = 1-i is (1-i)/(-i) = 1+i
        let f = a.div(&a.sub(&g.constant(1))).unwrap();
        let v = f.eval_gauss(&[GaussDyadic::new(1, -1, 0)]).unwrap();
        assert_eq!(v, GaussDyadic::new(1, 1, 0));
        assert!(f.eval_gauss(&[GaussDyadic::one()]).is_err());
        // 1/(a+1) at a = 2 is 1/3, not in Z[1/2, i]
        let h = g.constant(1).div(&a.add(&g.constant(1))).unwrap();
        assert!(h.eval_gauss(&[GaussDyadic::from_int(2)]).is_err());
    }
}
