//! Representations of U_{2,5}, the cross-ratio domains of GF(5)^m and the lifting
//! functions back into a Hydra field.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Elem;
use crate::pfield::{FactoredElement, Fingerprint, FundamentalTable, GfTuple, PartialFieldSpec};

/// The six normalized GF(5)^1 representations (p, q) of U_{2,5}.
pub const U25_REPS: [(u8, u8); 6] = [(2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 3)];

/// A matrix [[1,1,1],[1,p,q]], given by table indices of p and q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct U25Pair {
    pub p: usize,
    pub q: usize,
}

/// Nonzero-one fundamentals in a deterministic order: Gaussian values by real part, then
/// absolute imaginary part, then imaginary part; rational-function entries in table order.
pub fn enumeration_order(spec: &PartialFieldSpec, table: &FundamentalTable) -> Vec<usize> {
    let mut idx = table.nonzero_one();
    if let crate::exact::Ground::Gaussian = spec.ground {
        let key = |k: &usize| match &table.entries[*k].value {
            Elem::Gauss(g) => {
                let d = BigInt::from(1) << g.two_exp();
                let im = BigRational::new(g.im_num().clone(), d.clone());
                (BigRational::new(g.re_num().clone(), d), im.abs(), im)
            }
            Elem::Rat(_) => unreachable!(),
        };
        idx.sort_by_key(key);
    }
    idx
}

/// Ordered pairs of distinct nonzero-one fundamentals whose quotient is fundamental.
pub fn enumerate_u25(
    spec: &PartialFieldSpec,
    fp: &Fingerprint,
    table: &FundamentalTable,
) -> Vec<U25Pair> {
    let order = enumeration_order(spec, table);
    let mut out = Vec::new();
    for &p in &order {
        for &q in &order {
            if p == q {
                continue;
            }
            let r = table.entries[p]
                .element
                .div(&table.entries[q].element)
                .expect("q is a unit");
            if table.find_factored(spec, fp, &r).is_some() {
                out.push(U25Pair { p, q });
            }
        }
    }
    out
}

/// Ordered selections of `width` distinct representations from `U25_REPS`, in
/// lexicographic order, transposed into a p-tuple and a q-tuple.
pub fn gf5_u25_tuples(width: usize) -> Vec<(GfTuple, GfTuple)> {
    fn rec(width: usize, used: &mut Vec<usize>, out: &mut Vec<(GfTuple, GfTuple)>) {
        if used.len() == width {
            let p = GfTuple(used.iter().map(|&k| U25_REPS[k].0).collect());
            let q = GfTuple(used.iter().map(|&k| U25_REPS[k].1).collect());
            out.push((p, q));
            return;
        }
        for k in 0..U25_REPS.len() {
            if !used.contains(&k) {
                used.push(k);
                rec(width, used, out);
                used.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(width, &mut Vec::new(), &mut out);
    out
}

/// Two coordinates of a pair of images that give the same GF(5) representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceViolation {
    pub pair: usize,
    pub i: usize,
    pub j: usize,
}

/// Coordinate pairs i < j with equal p and equal q; normalized representations are
/// equivalent exactly when equal.
pub fn check_inequivalence(pairs: &[(GfTuple, GfTuple)]) -> Vec<EquivalenceViolation> {
    let mut out = Vec::new();
    for (n, (p, q)) in pairs.iter().enumerate() {
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p.0[i] == p.0[j] && q.0[i] == q.0[j] {
                    out.push(EquivalenceViolation { pair: n, i, j });
                }
            }
        }
    }
    out
}

/// phi images of Hydra-side pairs.
pub fn phi_pairs(table: &FundamentalTable, pairs: &[U25Pair]) -> Vec<(GfTuple, GfTuple)> {
    pairs
        .iter()
        .map(|x| {
            (
                table.entries[x.p].image.clone(),
                table.entries[x.q].image.clone(),
            )
        })
        .collect()
}

/// 0, 1 and the points of {2,3,4}^m in which no value fills three coordinates.
pub fn build_domain(m: usize) -> Vec<GfTuple> {
    let mut out = vec![GfTuple::constant(m, 0), GfTuple::constant(m, 1)];
    let total = 3usize.pow(m as u32);
    for mut n in 0..total {
        let mut t = vec![0u8; m];
        for c in (0..m).rev() {
            t[c] = 2 + (n % 3) as u8;
            n /= 3;
        }
        let crowded = (2..=4).any(|v| t.iter().filter(|&&x| x == v).count() >= 3);
        if !crowded {
            out.push(GfTuple(t));
        }
    }
    out
}

/// Inverse of the lifting homomorphism (phi, or phi without its last coordinate) on the
/// fundamental elements.
#[derive(Clone, Debug)]
pub struct LiftingFn {
    pub width: usize,
    by_tuple: BTreeMap<GfTuple, usize>,
}

/// Image of a table entry under the lifting homomorphism.
pub fn lift_image(spec: &PartialFieldSpec, t: &GfTuple) -> GfTuple {
    if spec.lift_drop_last {
        t.drop_last()
    } else {
        t.clone()
    }
}

impl LiftingFn {
    pub fn lookup(&self, t: &GfTuple) -> Option<usize> {
        self.by_tuple.get(t).copied()
    }

    pub fn len(&self) -> usize {
        self.by_tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_tuple.is_empty()
    }

    pub fn tuples(&self) -> impl Iterator<Item = (&GfTuple, &usize)> {
        self.by_tuple.iter()
    }
}

/// Fails unless the lifting homomorphism maps the table bijectively onto the domain.
pub fn build_lifting_fn(spec: &PartialFieldSpec, table: &FundamentalTable) -> Result<LiftingFn> {
    let width = spec.lift_width();
    let mut by_tuple = BTreeMap::new();
    for (k, e) in table.entries.iter().enumerate() {
        let t = lift_image(spec, &e.image);
        if let Some(j) = by_tuple.insert(t.clone(), k) {
            return Err(Error::Check(format!(
                "{} and {} both map to {t}",
                table.entries[j].value.display(&spec.ground),
                e.value.display(&spec.ground)
            )));
        }
    }
    let domain: HashSet<GfTuple> = build_domain(width).into_iter().collect();
    let image: HashSet<GfTuple> = by_tuple.keys().cloned().collect();
    if image != domain {
        let extra: Vec<String> = image.difference(&domain).map(|t| t.to_string()).collect();
        let missing: Vec<String> = domain.difference(&image).map(|t| t.to_string()).collect();
        return Err(Error::Check(format!(
            "image of the fundamentals differs from the domain: outside {extra:?}, not reached {missing:?}"
        )));
    }
    Ok(LiftingFn { width, by_tuple })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LiftViolation {
    /// A tuple of the pair is not in the cross-ratio domain.
    Domain { pair: usize, tuple: GfTuple },
    /// The lifted quotient p/q is not fundamental.
    Ratio { pair: usize, p: String, q: String },
}

/// Lifts each pair and checks that the quotient of the lifts is fundamental.
pub fn local_lift_check(
    spec: &PartialFieldSpec,
    fp: &Fingerprint,
    table: &FundamentalTable,
    lift: &LiftingFn,
    pairs: &[(GfTuple, GfTuple)],
) -> (Vec<U25Pair>, Vec<LiftViolation>) {
    let mut lifted = Vec::new();
    let mut bad = Vec::new();
    for (n, (p, q)) in pairs.iter().enumerate() {
        let (Some(a), Some(b)) = (lift.lookup(p), lift.lookup(q)) else {
            let tuple = if lift.lookup(p).is_none() {
                p.clone()
            } else {
                q.clone()
            };
            bad.push(LiftViolation::Domain { pair: n, tuple });
            continue;
        };
        let ratio: Option<FactoredElement> =
            table.entries[a].element.div(&table.entries[b].element);
        let ok = ratio.is_some_and(|r| !r.is_zero() && table.find_factored(spec, fp, &r).is_some());
        if ok {
            lifted.push(U25Pair { p: a, q: b });
        } else {
            bad.push(LiftViolation::Ratio {
                pair: n,
                p: table.entries[a].value.display(&spec.ground),
                q: table.entries[b].value.display(&spec.ground),
            });
        }
    }
    (lifted, bad)
}

/// Difference between the lifted GF(5)-side pairs and the Hydra-side pairs, as sets.
pub fn lifted_pairs_mismatch(
    lifted: &[U25Pair],
    hydra: &[U25Pair],
) -> (Vec<U25Pair>, Vec<U25Pair>) {
    let a: HashSet<U25Pair> = lifted.iter().copied().collect();
    let b: HashSet<U25Pair> = hydra.iter().copied().collect();
    let mut only_lifted: Vec<U25Pair> = a.difference(&b).copied().collect();
    let mut only_hydra: Vec<U25Pair> = b.difference(&a).copied().collect();
    only_lifted.sort();
    only_hydra.sort();
    (only_lifted, only_hydra)
}
