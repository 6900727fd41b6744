//! Partial fields: specs, factored units, homomorphisms into GF(5)^m and the
//! table of fundamental elements.

pub mod expr;
pub mod spec;
pub mod table;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use spec::{builtin, builtin_text, LpMode, PartialFieldSpec, BUILTIN_NAMES};
pub use table::{associates, build_fundamental_table, FundamentalTable, TableEntry};

use crate::error::{Error, Result};
use crate::exact::modular::sqrt_neg_one;
use crate::exact::{Elem, GaussDyadic, Ground, ModMap, MonomialPoly, RatFunc};
use spec::SymbolResidue;

/// A point of GF(5)^m.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GfTuple(pub Vec<u8>);

const GF5_INV: [u8; 5] = [0, 1, 3, 2, 4];

impl GfTuple {
    pub fn constant(m: usize, c: u8) -> Self {
        GfTuple(vec![c % 5; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&c| c != 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        GfTuple(self.0.iter().zip(&o.0).map(|(a, b)| a * b % 5).collect())
    }

    pub fn inv(&self) -> Option<Self> {
        self.is_unit()
            .then(|| GfTuple(self.0.iter().map(|&a| GF5_INV[a as usize]).collect()))
    }

    pub fn pow(&self, n: i32) -> Option<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = GfTuple::constant(self.len(), 1);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    pub fn one_minus(&self) -> Self {
        GfTuple(self.0.iter().map(|&a| (6 - a) % 5).collect())
    }

    pub fn drop_last(&self) -> Self {
        GfTuple(self.0[..self.0.len() - 1].to_vec())
    }

    pub fn spaced(&self) -> String {
        self.0
            .iter()
            .map(u8::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for GfTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A unit `sign * prod g_k^exps_k`, or zero. The slot of the generator -1 is kept at 0;
/// its parity lives in `sign`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredElement {
    pub sign: i8,
    pub exps: Vec<i32>,
}

impl FactoredElement {
    pub fn zero(n: usize) -> Self {
        FactoredElement {
            sign: 0,
            exps: vec![0; n],
        }
    }

    pub fn one(n: usize) -> Self {
        FactoredElement {
            sign: 1,
            exps: vec![0; n],
        }
    }

    /// Builds from a raw exponent vector whose `minus_one` slot may hold any integer.
    pub fn from_raw(exps: &[i32], minus_one: usize) -> Self {
        let mut exps = exps.to_vec();
        let sign = if exps[minus_one].rem_euclid(2) == 1 {
            -1
        } else {
            1
        };
        exps[minus_one] = 0;
        FactoredElement { sign, exps }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.exps.len());
        }
        FactoredElement {
            sign: self.sign * o.sign,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| FactoredElement {
            sign: self.sign,
            exps: self.exps.iter().map(|e| -e).collect(),
        })
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    /// Readable product form such as `-alpha^-1 (1-alpha)^2`.
    pub fn display(&self, spec: &PartialFieldSpec) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (g, &e) in spec.generators.iter().zip(&self.exps) {
            if e == 0 {
                continue;
            }
            let base = if g.source.chars().all(|c| c.is_alphanumeric()) {
                g.source.clone()
            } else {
                format!("({})", g.source)
            };
            parts.push(if e == 1 { base } else { format!("{base}^{e}") });
        }
        let body = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        };
        if self.sign < 0 {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// Image of a factored element under phi.
pub fn hom_gf5(spec: &PartialFieldSpec, e: &FactoredElement) -> GfTuple {
    let m = spec.width();
    if e.is_zero() {
        return GfTuple::constant(m, 0);
    }
    let mut acc = GfTuple::constant(m, if e.sign < 0 { 4 } else { 1 });
    for (g, &x) in spec.generators.iter().zip(&e.exps) {
        if x != 0 {
            acc = acc.mul(&g.phi.pow(x).expect("generator images are units"));
        }
    }
    acc
}

/// The exact value of a factored element.
pub fn expand(spec: &PartialFieldSpec, e: &FactoredElement) -> Elem {
    if e.is_zero() {
        return spec.ground.constant(0);
    }
    match &spec.ground {
        Ground::Rational { vars } => {
            let n = vars.len();
            let mut num = MonomialPoly::constant(n, e.sign as i64);
            let mut den = MonomialPoly::one(n);
            for (g, &x) in spec.generators.iter().zip(&e.exps) {
                let Elem::Rat(r) = &g.value else {
                    unreachable!()
                };
                if x > 0 {
                    num = &num * &r.num().pow(x as u32);
                } else if x < 0 {
                    den = &den * &r.num().pow(x.unsigned_abs());
                }
            }
            Elem::Rat(RatFunc::new(num, den).expect("generators are nonzero"))
        }
        Ground::Gaussian => {
            let mut acc = GaussDyadic::from_int(e.sign as i64);
            for (g, &x) in spec.generators.iter().zip(&e.exps) {
                let Elem::Gauss(v) = &g.value else {
                    unreachable!()
                };
                acc = acc.mul(&v.pow(x).expect("H2 generators are units"));
            }
            Elem::Gauss(acc)
        }
    }
}

/// Writes a nonzero element as a signed product of generator powers.
pub fn factor(spec: &PartialFieldSpec, x: &Elem) -> Result<FactoredElement> {
    let n = spec.generators.len();
    if x.is_zero() {
        return Ok(FactoredElement::zero(n));
    }
    let fail = || Error::NotAUnit(x.display(&spec.ground));
    let f = match x {
        Elem::Rat(r) => {
            let mut exps = vec![0i32; n];
            let mut num = r.num().clone();
            let mut den = r.den().clone();
            for (k, g) in spec.generators.iter().enumerate() {
                if k == spec.minus_one {
                    continue;
                }
                let Elem::Rat(gr) = &g.value else {
                    unreachable!()
                };
                let gp = gr.num();
                while let Some(q) = num.exact_div(gp) {
                    num = q;
                    exps[k] += 1;
                }
                while let Some(q) = den.exact_div(gp) {
                    den = q;
                    exps[k] -= 1;
                }
            }
            let (cn, cd) = (
                num.as_constant().ok_or_else(fail)?,
                den.as_constant().ok_or_else(fail)?,
            );
            let sign = if cn == cd {
                1
            } else if cn == -cd {
                -1
            } else {
                return Err(fail());
            };
            FactoredElement { sign, exps }
        }
        Elem::Gauss(g) => {
            let (y, z, v) = g.factor_h2().ok_or_else(fail)?;
            let mut exps = vec![0i32; n];
            for (k, gen) in spec.generators.iter().enumerate() {
                let Elem::Gauss(val) = &gen.value else {
                    unreachable!()
                };
                if *val == GaussDyadic::from_int(2) {
                    exps[k] = y;
                } else if *val == GaussDyadic::i() {
                    exps[k] = z;
                } else if *val == GaussDyadic::new(1, -1, 0) {
                    exps[k] = v;
                }
            }
            FactoredElement { sign: 1, exps }
        }
    };
    if !expand(spec, &f).exact_eq(x) {
        return Err(fail());
    }
    Ok(f)
}

/// Modular fingerprints for one spec: the prime, the residues of the free symbols and of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub map: ModMap,
    pub symbols: Vec<u64>,
}

impl Fingerprint {
    /// Residues for the spec's map at `prime`; the symbol images are those of the spec.
    pub fn at_prime(spec: &PartialFieldSpec, prime: u64) -> Result<Self> {
        let symbols = spec
            .mod_map
            .symbols
            .iter()
            .map(|s| match s {
                SymbolResidue::Fixed(v) => Ok(v % prime),
                SymbolResidue::SqrtNegOne => sqrt_neg_one(prime).ok_or(Error::NotPrime(prime)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_symbols(spec, prime, symbols)
    }

    pub fn with_symbols(spec: &PartialFieldSpec, prime: u64, symbols: Vec<u64>) -> Result<Self> {
        let gens = spec
            .generators
            .iter()
            .map(|g| {
                g.value
                    .eval_mod(prime, &symbols)
                    .ok_or(Error::ZeroResidue(prime))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Fingerprint {
            map: ModMap::new(prime, gens)?,
            symbols,
        })
    }

    pub fn of_factored(&self, e: &FactoredElement) -> u64 {
        self.map.mod_eval(e.sign, &e.exps)
    }

    pub fn of_elem(&self, x: &Elem) -> Option<u64> {
        x.eval_mod(self.map.prime(), &self.symbols)
    }
}

/// One failed consistency check of the GF(5) homomorphism table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomViolation {
    pub generator: usize,
    pub stored: GfTuple,
    pub computed: Option<GfTuple>,
}

/// Recomputes phi of every generator by evaluating it at the images of the free symbols.
pub fn check_hom_table(spec: &PartialFieldSpec) -> Result<Vec<HomViolation>> {
    let m = spec.width();
    let symbol_images: Vec<GfTuple> = (0..spec.ground.symbol_count())
        .map(|j| {
            let s = spec.ground.symbol(j);
            spec.generators
                .iter()
                .find(|g| g.value.exact_eq(&s))
                .map(|g| g.phi.clone())
                .ok_or_else(|| {
                    Error::Spec(format!(
                        "symbol {} is not a generator",
                        spec.ground.symbol_names()[j]
                    ))
                })
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (k, g) in spec.generators.iter().enumerate() {
        let computed = (0..m)
            .map(|c| {
                let pt: Vec<u64> = symbol_images.iter().map(|t| t.0[c] as u64).collect();
                g.value.eval_mod(5, &pt).map(|v| v as u8)
            })
            .collect::<Option<Vec<u8>>>()
            .map(GfTuple);
        if computed.as_ref() != Some(&g.phi) {
            out.push(HomViolation {
                generator: k,
                stored: g.phi.clone(),
                computed,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfield::expr::eval_str;
    use proptest::prelude::*;

    #[test]
    fn phi3_of_generators() {
        let s = builtin("H3").unwrap();
        let imgs: Vec<GfTuple> = (0..4)
            .map(|k| {
                let mut e = FactoredElement::one(4);
                e.exps[k] = 1;
                hom_gf5(&s, &FactoredElement::from_raw(&e.exps, s.minus_one))
            })
            .collect();
        let want = [[4, 4, 4], [2, 3, 4], [4, 3, 2], [3, 2, 3]];
        for (a, b) in imgs.iter().zip(want) {
            assert_eq!(a.0, b.to_vec());
        }
        assert_eq!(hom_gf5(&s, &FactoredElement::zero(4)).0, vec![0, 0, 0]);
    }

    #[test]
    fn phi4_of_one() {
        let s = builtin("H4").unwrap();
        assert_eq!(hom_gf5(&s, &FactoredElement::one(7)).0, vec![1, 1, 1, 1]);
    }

    #[test]
    fn phi5_of_generators() {
        let s = builtin("H5").unwrap();
        assert_eq!(s.generators[0].phi.0, vec![4; 6]);
        assert_eq!(s.generators[1].phi.0, vec![4, 3, 3, 4, 2, 2]);
        assert_eq!(s.generators[9].phi.0, vec![2, 3, 1, 1, 1, 1]);
    }

    #[test]
    fn builtin_hom_tables_are_consistent() {
        for n in BUILTIN_NAMES {
            let s = builtin(n).unwrap();
            assert!(check_hom_table(&s).unwrap().is_empty(), "{n}");
        }
    }

    #[test]
    fn corrupted_hom_image_is_localized() {
        let text = builtin_text("H4").unwrap().replace(
            "gen y alpha*beta-1 : 3 3 1 1",
            "gen y alpha*beta-1 : 3 3 1 2",
        );
        let s = PartialFieldSpec::parse(&text).unwrap();
        let v = check_hom_table(&s).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].generator, 5);
        assert_eq!(v[0].computed, Some(GfTuple(vec![3, 3, 1, 1])));
    }

    #[test]
    fn generator_residues() {
        let h3 = builtin("H3").unwrap();
        let f = Fingerprint::at_prime(&h3, 1299709).unwrap();
        assert_eq!(f.map.gen_residues(), &[1299708, 5, 1299705, 21]);
        let h4 = builtin("H4").unwrap();
        let f = Fingerprint::at_prime(&h4, 179424673).unwrap();
        assert_eq!(
            f.map.gen_residues(),
            &[179424672, 11, 19, 179424663, 179424655, 208, 179424285]
        );
        let h5 = builtin("H5").unwrap();
        let f = Fingerprint::at_prime(&h5, 22801763489).unwrap();
        assert_eq!(
            f.map.gen_residues(),
            &[
                22801763488,
                17,
                47,
                53,
                22801763473,
                22801763443,
                22801763437,
                22801763453,
                22801762743,
                700
            ]
        );
    }

    #[test]
    fn factor_round_trips() {
        let s = builtin("H4").unwrap();
        let x = eval_str("-alpha*(beta-1)/(beta*(alpha-1))", &s.ground).unwrap();
        let f = factor(&s, &x).unwrap();
        // equals -alpha (1-beta) / (beta (1-alpha))
        assert_eq!(f.sign, -1);
        assert_eq!(f.exps, vec![0, 1, -1, -1, 1, 0, 0]);
        assert!(factor(&s, &eval_str("alpha+1", &s.ground).unwrap()).is_err());
        assert!(factor(&s, &eval_str("2*alpha", &s.ground).unwrap()).is_err());
        let h2 = builtin("H2").unwrap();
        let half = eval_str("(1+i)/2", &h2.ground).unwrap();
        let f = factor(&h2, &half).unwrap();
        assert!(expand(&h2, &f).exact_eq(&half));
    }

    fn h4_unit() -> impl Strategy<Value = FactoredElement> {
        (any::<bool>(), proptest::collection::vec(-3i32..4, 6)).prop_map(|(neg, mut e)| {
            e.insert(0, 0);
            FactoredElement {
                sign: if neg { -1 } else { 1 },
                exps: e,
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn phi_is_multiplicative(a in h4_unit(), b in h4_unit()) {
            let s = builtin("H4").unwrap();
            prop_assert_eq!(hom_gf5(&s, &a.mul(&b)), hom_gf5(&s, &a).mul(&hom_gf5(&s, &b)));
        }
    }
}
