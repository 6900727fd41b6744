//! Enumeration proof of the fundamental elements: norm bounds from homomorphisms into
//! H2, a finite box of exponent vectors, a modular sieve and exact verification.

#[cfg(test)]
mod fm;
pub mod lp;

use std::collections::{HashMap, HashSet};

use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::modular::{is_prime, next_prime, MAX_PRIME};
use crate::exact::{Elem, GaussDyadic};
use crate::pfield::{
    expand, FactoredElement, Fingerprint, FundamentalTable, LpMode, PartialFieldSpec,
};
use lp::{coordinate_range, rational, Ineq};

/// log2-norms of the generators under one homomorphism into H2; constrains -1 <= row.e <= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pub coeffs: Vec<Rational64>,
    /// The symbol images that define the homomorphism, for display.
    pub label: String,
}

impl ConstraintRow {
    pub fn value(&self, exps: &[i32]) -> Rational64 {
        self.coeffs
            .iter()
            .zip(exps)
            .map(|(c, &e)| c * Rational64::from(e as i64))
            .sum()
    }
}

pub fn lognorm_rows(spec: &PartialFieldSpec) -> Result<Vec<ConstraintRow>> {
    let names = spec.ground.symbol_names();
    spec.h2_homs
        .iter()
        .map(|h| {
            let label = names
                .iter()
                .zip(&h.sources)
                .map(|(n, s)| format!("{n}->{s}"))
                .collect::<Vec<_>>()
                .join(", ");
            let coeffs = spec
                .generators
                .iter()
                .map(|g| {
                    let img = match &g.value {
                        Elem::Gauss(v) => v.substitute(&h.images[0]),
                        Elem::Rat(_) => g.value.eval_gauss(&h.images)?,
                    };
                    img.log2_norm()
                        .filter(|_| !img.is_zero())
                        .ok_or_else(|| Error::NotH2Unit(format!("{} under {label}", g.source)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ConstraintRow { coeffs, label })
        })
        .collect()
}

/// Inclusive integer interval per exponent slot; the slot of -1 ranges over {0, 1}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateBox {
    pub ranges: Vec<(i64, i64)>,
}

impl CandidateBox {
    pub fn count(&self) -> usize {
        self.ranges
            .iter()
            .map(|(l, h)| (h - l + 1) as usize)
            .product()
    }
}

fn system(rows: &[ConstraintRow], extra: &[(usize, i64, i64)], n: usize, sign: usize) -> Vec<Ineq> {
    let mut sys = Vec::new();
    let unit = |k: usize, c: i64| -> Vec<BigRational> {
        (0..n)
            .map(|j| rational(if j == k { c } else { 0 }, 1))
            .collect()
    };
    for r in rows {
        let c: Vec<BigRational> = r
            .coeffs
            .iter()
            .map(|x| rational(*x.numer(), *x.denom()))
            .collect();
        sys.push(Ineq {
            coeffs: c.clone(),
            rhs: rational(1, 1),
        });
        sys.push(Ineq {
            coeffs: c.iter().map(|x| -x).collect(),
            rhs: rational(1, 1),
        });
    }
    for &(k, lo, hi) in extra.iter().chain([(sign, 0, 1)].iter()) {
        sys.push(Ineq {
            coeffs: unit(k, 1),
            rhs: rational(hi, 1),
        });
        sys.push(Ineq {
            coeffs: unit(k, -1),
            rhs: rational(-lo, 1),
        });
    }
    sys
}

/// Per-slot exact range of the linear program. With `LpMode::Integers` the range is that of
/// the integer points satisfying every constraint, otherwise the real range rounded inward.
pub fn bound_exponents(
    rows: &[ConstraintRow],
    extra: &[(usize, i64, i64)],
    n: usize,
    sign: usize,
    mode: LpMode,
) -> Result<CandidateBox> {
    let sys = system(rows, extra, n, sign);
    let mut ranges = Vec::with_capacity(n);
    for k in 0..n {
        let (lo, hi) = coordinate_range(&sys, k)?;
        let (lo, hi) = lo
            .zip(hi)
            .ok_or_else(|| Error::Lp(format!("exponent slot {k} is unbounded")))?;
        let l = lo
            .ceil()
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Lp("bound overflow".into()))?;
        let h = hi
            .floor()
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::Lp("bound overflow".into()))?;
        if l > h {
            return Err(Error::Lp(format!("no integer value for slot {k}")));
        }
        ranges.push((l, h));
    }
    let real = CandidateBox { ranges };
    match mode {
        LpMode::Reals => Ok(real),
        LpMode::Integers => integer_tighten(&sys, &real),
    }
}

/// Range of the integer points of the system inside `outer`, by depth-first search with
/// interval pruning.
fn integer_tighten(sys: &[Ineq], outer: &CandidateBox) -> Result<CandidateBox> {
    // clear denominators so the search runs in exact i64 arithmetic
    let int_rows: Vec<(Vec<i64>, i64)> = sys
        .iter()
        .map(|q| {
            let l = q
                .coeffs
                .iter()
                .chain([&q.rhs])
                .fold(num_bigint::BigInt::from(1), |acc, c| acc.lcm(c.denom()));
            let scale = |c: &BigRational| (c * BigRational::from(l.clone())).to_integer().to_i64();
            let cs = q.coeffs.iter().map(scale).collect::<Option<Vec<_>>>();
            match (cs, scale(&q.rhs)) {
                (Some(cs), Some(r)) => Ok((cs, r)),
                _ => Err(Error::Lp(
                    "coefficients too large for the integer search".into(),
                )),
            }
        })
        .collect::<Result<_>>()?;
    let n = outer.ranges.len();
    let mut found: Vec<Option<(i64, i64)>> = vec![None; n];
    let mut point = vec![0i64; n];
    fn min_rest(row: &[i64], from: usize, outer: &CandidateBox) -> i64 {
        (from..row.len())
            .map(|j| (row[j] * outer.ranges[j].0).min(row[j] * outer.ranges[j].1))
            .sum()
    }
    fn dfs(
        d: usize,
        partial: &mut Vec<i64>,
        rows: &[(Vec<i64>, i64)],
        outer: &CandidateBox,
        point: &mut Vec<i64>,
        found: &mut Vec<Option<(i64, i64)>>,
    ) {
        if d == point.len() {
            for (k, v) in point.iter().enumerate() {
                found[k] = Some(found[k].map_or((*v, *v), |(l, h)| (l.min(*v), h.max(*v))));
            }
            return;
        }
        for v in outer.ranges[d].0..=outer.ranges[d].1 {
            point[d] = v;
            let ok = rows
                .iter()
                .enumerate()
                .all(|(i, (c, r))| partial[i] + c[d] * v + min_rest(c, d + 1, outer) <= *r);
            if ok {
                for (i, (c, _)) in rows.iter().enumerate() {
                    partial[i] += c[d] * v;
                }
                dfs(d + 1, partial, rows, outer, point, found);
                for (i, (c, _)) in rows.iter().enumerate() {
                    partial[i] -= c[d] * v;
                }
            }
        }
    }
    let mut partial = vec![0i64; int_rows.len()];
    dfs(0, &mut partial, &int_rows, outer, &mut point, &mut found);
    let ranges = found
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Lp("no integer point satisfies the constraints".into()))?;
    Ok(CandidateBox { ranges })
}

/// The bounding box of a spec: its norm rows, extra bounds and LP mode.
pub fn spec_box(spec: &PartialFieldSpec) -> Result<(Vec<ConstraintRow>, CandidateBox)> {
    let rows = lognorm_rows(spec)?;
    let b = bound_exponents(
        &rows,
        &spec.extra_bounds,
        spec.generators.len(),
        spec.minus_one,
        spec.lp_mode,
    )?;
    Ok((rows, b))
}

/// Every exponent vector of the box, first slot slowest.
pub fn enumerate_candidates(b: &CandidateBox, minus_one: usize) -> Vec<FactoredElement> {
    let mut out = Vec::with_capacity(b.count());
    let mut cur: Vec<i32> = b.ranges.iter().map(|r| r.0 as i32).collect();
    if b.ranges.iter().any(|(l, h)| l > h) {
        return out;
    }
    loop {
        out.push(FactoredElement::from_raw(&cur, minus_one));
        let mut k = cur.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if (cur[k] as i64) < b.ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = b.ranges[k].0 as i32;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Survivor {
    pub residue: u64,
    pub element: FactoredElement,
}

#[derive(Clone, Debug)]
pub struct SieveOutcome {
    pub candidates: usize,
    /// Distinct values among the candidates and zero.
    pub distinct: usize,
    pub survivors: Vec<Survivor>,
}

/// Distinct residues of candidates plus zero. Exact values decide distinctness for H2.
fn distinct_values(spec: &PartialFieldSpec, cands: &[FactoredElement]) -> Option<usize> {
    match spec.ground {
        crate::exact::Ground::Gaussian => {
            let set: HashSet<GaussDyadic> = cands
                .iter()
                .map(|c| match expand(spec, c) {
                    Elem::Gauss(g) => g,
                    Elem::Rat(_) => unreachable!(),
                })
                .chain([GaussDyadic::zero()])
                .collect();
            Some(set.len())
        }
        crate::exact::Ground::Rational { .. } => None,
    }
}

/// A fingerprint map injective on the candidate values and zero: the spec's prime (or the
/// first prime from `prime_start`), advancing through the primes until injective.
pub fn resolve_fingerprint(
    spec: &PartialFieldSpec,
    cands: &[FactoredElement],
    prime_start: Option<u64>,
) -> Result<Fingerprint> {
    let mut p = match prime_start {
        Some(n) if is_prime(n) => n,
        Some(n) => next_prime(n),
        None => spec.mod_map.prime,
    };
    let exact = distinct_values(spec, cands);
    const TRIES: usize = 64;
    for _ in 0..TRIES {
        if p >= MAX_PRIME {
            return Err(Error::NotPrime(p));
        }
        if let Ok(fp) = Fingerprint::at_prime(spec, p) {
            let mut set: HashSet<u64> = cands.par_iter().map(|c| fp.of_factored(c)).collect();
            set.insert(0);
            if set.len() == exact.unwrap_or(cands.len() + 1) {
                return Ok(fp);
            }
        }
        p = next_prime(p);
    }
    Err(Error::NoInjectivePrime(TRIES))
}

/// Candidates c with 1 - c also a candidate (or zero).
pub fn fingerprint_sieve(
    spec: &PartialFieldSpec,
    fp: &Fingerprint,
    cands: &[FactoredElement],
) -> Result<SieveOutcome> {
    if let crate::exact::Ground::Gaussian = spec.ground {
        return exact_sieve(spec, fp, cands);
    }
    let p = fp.map.prime();
    let residues: Vec<u64> = cands.par_iter().map(|c| fp.of_factored(c)).collect();
    let mut by_residue: HashMap<u64, usize> = HashMap::with_capacity(residues.len() + 1);
    for (k, r) in residues.iter().enumerate() {
        by_residue.entry(*r).or_insert(k);
    }
    if by_residue.contains_key(&0) || by_residue.len() != cands.len() {
        return Err(Error::Check(format!(
            "fingerprints mod {p} are not injective on the candidates"
        )));
    }
    let n = spec.generators.len();
    let mut survivors: Vec<Survivor> = Vec::new();
    let member = |r: u64| r == 0 || by_residue.contains_key(&r);
    for r in by_residue.keys().copied().chain([0]) {
        if member((1 + p - r) % p) {
            let element = if r == 0 {
                FactoredElement::zero(n)
            } else {
                cands[by_residue[&r]].clone()
            };
            survivors.push(Survivor {
                residue: r,
                element,
            });
        }
    }
    survivors.sort_by_key(|s| s.residue);
    Ok(SieveOutcome {
        candidates: cands.len(),
        distinct: by_residue.len() + 1,
        survivors,
    })
}

fn exact_sieve(
    spec: &PartialFieldSpec,
    fp: &Fingerprint,
    cands: &[FactoredElement],
) -> Result<SieveOutcome> {
    let n = spec.generators.len();
    let mut values: HashMap<GaussDyadic, FactoredElement> = HashMap::new();
    values.insert(GaussDyadic::zero(), FactoredElement::zero(n));
    for c in cands {
        let Elem::Gauss(g) = expand(spec, c) else {
            unreachable!()
        };
        values.entry(g).or_insert_with(|| c.clone());
    }
    let mut survivors: Vec<Survivor> = values
        .iter()
        .filter(|(g, _)| values.contains_key(&g.one_minus()))
        .map(|(_, e)| Survivor {
            residue: fp.of_factored(e),
            element: e.clone(),
        })
        .collect();
    survivors.sort_by_key(|s| s.residue);
    Ok(SieveOutcome {
        candidates: cands.len(),
        distinct: values.len(),
        survivors,
    })
}

/// One failed exact check while verifying the sieve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveViolation {
    pub kind: String,
    pub residue: u64,
    pub detail: String,
}

/// Exact confirmation of the sieve survivors against the closure-built table.
pub fn verify_survivors(
    spec: &PartialFieldSpec,
    fp: &Fingerprint,
    table: &FundamentalTable,
    survivors: &[Survivor],
) -> Vec<SieveViolation> {
    let mut out = Vec::new();
    let p = fp.map.prime();
    if survivors.len() != table.len() {
        out.push(SieveViolation {
            kind: "count".into(),
            residue: 0,
            detail: format!(
                "{} survivors, {} fundamentals from associates",
                survivors.len(),
                table.len()
            ),
        });
    }
    let mut by_residue: HashMap<u64, &Survivor> = HashMap::new();
    for s in survivors {
        if let Some(first) = by_residue.insert(s.residue, s) {
            out.push(SieveViolation {
                kind: "duplicate".into(),
                residue: s.residue,
                detail: format!(
                    "exponents {:?} and {:?} share this residue",
                    first.element.exps, s.element.exps
                ),
            });
        }
    }
    for s in survivors {
        let value = expand(spec, &s.element);
        let recomputed = fp.of_factored(&s.element);
        if recomputed != s.residue {
            out.push(SieveViolation {
                kind: "fingerprint".into(),
                residue: s.residue,
                detail: format!(
                    "exponents {:?} (sign {}) evaluate to {recomputed}",
                    s.element.exps, s.element.sign
                ),
            });
        }
        let partner = (1 + p - s.residue % p) % p;
        match by_residue.get(&partner) {
            None => out.push(SieveViolation {
                kind: "partner".into(),
                residue: s.residue,
                detail: format!("no survivor with residue {partner} = 1 - {}", s.residue),
            }),
            Some(t) => {
                if !value.one_minus().exact_eq(&expand(spec, &t.element)) {
                    out.push(SieveViolation {
                        kind: "coincidence".into(),
                        residue: s.residue,
                        detail: format!(
                            "1 - {:?} (sign {}) != {:?} (sign {}) although fingerprints agree",
                            s.element.exps, s.element.sign, t.element.exps, t.element.sign
                        ),
                    });
                }
            }
        }
        match table.index_of_fingerprint(s.residue) {
            Some(k) if table.entries[k].value.exact_eq(&value) => {}
            _ => out.push(SieveViolation {
                kind: "unmatched".into(),
                residue: s.residue,
                detail: format!(
                    "survivor {} has no equal entry in the associate table",
                    value.display(&spec.ground)
                ),
            }),
        }
    }
    for e in &table.entries {
        if !by_residue.contains_key(&e.fingerprint) {
            out.push(SieveViolation {
                kind: "lost".into(),
                residue: e.fingerprint,
                detail: format!(
                    "fundamental {} missing from the sieve",
                    e.value.display(&spec.ground)
                ),
            });
        }
    }
    out
}

/// Table entries whose exponent vector violates a norm row or an extra bound.
pub fn check_bound_validity(
    rows: &[ConstraintRow],
    extra: &[(usize, i64, i64)],
    table: &FundamentalTable,
) -> Vec<String> {
    let one = Rational64::from(1);
    let mut bad = Vec::new();
    for e in table.entries.iter().filter(|e| !e.element.is_zero()) {
        for r in rows {
            let v = r.value(&e.element.exps);
            if v > one || v < -one {
                bad.push(format!("{:?} gives {v} under {}", e.element.exps, r.label));
            }
        }
        for &(k, lo, hi) in extra {
            let x = e.element.exps[k] as i64;
            if x < lo || x > hi {
                bad.push(format!(
                    "{:?} slot {k} outside [{lo}, {hi}]",
                    e.element.exps
                ));
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfield::{build_fundamental_table, builtin};

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn slot_ranges(spec: &PartialFieldSpec, b: &CandidateBox) -> Vec<(String, i64, i64)> {
        spec.generators
            .iter()
            .zip(&b.ranges)
            .map(|(g, &(l, h))| (g.slot.clone(), l, h))
            .collect()
    }

    #[test]
    fn h4_row_example() {
        let s = builtin("H4").unwrap();
        let rows = lognorm_rows(&s).unwrap();
        let row = rows
            .iter()
            .find(|x| x.label == "alpha->1-i, beta->1+i")
            .unwrap();
        assert_eq!(
            row.coeffs,
            vec![
                r(0, 1),
                r(1, 2),
                r(1, 2),
                r(0, 1),
                r(0, 1),
                r(0, 1),
                r(1, 1)
            ]
        );
        for row in &rows {
            assert_eq!(row.value(&[0; 7]), r(0, 1));
        }
    }

    #[test]
    fn h5_row_example() {
        let s = builtin("H5").unwrap();
        let rows = lognorm_rows(&s).unwrap();
        let row = rows
            .iter()
            .find(|x| x.label == "alpha->2, beta->1-i, gamma->1-i")
            .unwrap();
        let h = r(1, 2);
        let z = r(0, 1);
        assert_eq!(row.coeffs, vec![z, r(1, 1), h, h, z, z, z, h, h, z]);
    }

    #[test]
    fn non_unit_image_is_rejected() {
        let text = crate::pfield::builtin_text("H3")
            .unwrap()
            .replace("h2 alpha=i\n", "h2 alpha=2\n");
        let s = PartialFieldSpec::parse(&text).unwrap();
        // 1 - 2 = -1 is fine but 4 - 2 + 1 = 3 is not a unit of H2
        assert!(matches!(lognorm_rows(&s), Err(Error::NotH2Unit(_))));
    }

    #[test]
    fn pinned_single_row() {
        let rows = [ConstraintRow {
            coeffs: vec![r(0, 1), r(1, 1)],
            label: String::new(),
        }];
        let b = bound_exponents(&rows, &[(1, 0, 0)], 2, 0, LpMode::Reals).unwrap();
        assert_eq!(b.ranges, vec![(0, 1), (0, 0)]);
    }

    #[test]
    fn h4_bounds() {
        let s = builtin("H4").unwrap();
        let (_, b) = spec_box(&s).unwrap();
        let want = [
            ("sign", 0, 1),
            ("u", -1, 1),
            ("v", -1, 1),
            ("w", -3, 3),
            ("x", -3, 3),
            ("y", -1, 1),
            ("z", -2, 2),
        ];
        let got = slot_ranges(&s, &b);
        for (g, w) in got.iter().zip(want) {
            assert_eq!((g.0.as_str(), g.1, g.2), w);
        }
        // the integer program agrees with the rounded real one here
        let rows = lognorm_rows(&s).unwrap();
        let bi = bound_exponents(&rows, &s.extra_bounds, 7, 0, LpMode::Integers).unwrap();
        assert_eq!(bi, b);
    }

    #[test]
    fn h5_bounds() {
        let s = builtin("H5").unwrap();
        let (rows, b) = spec_box(&s).unwrap();
        for (slot, l, h) in slot_ranges(&s, &b) {
            let want = match slot.as_str() {
                "sign" => (0, 1),
                "x" => (-2, 2),
                _ => (-1, 1),
            };
            assert_eq!((l, h), want, "{slot}");
        }
        // the real relaxation reaches 3 in the alpha-gamma slot
        let br = bound_exponents(&rows, &[], 10, 0, LpMode::Reals).unwrap();
        assert_eq!(br.ranges[7], (-3, 3));
    }

    #[test]
    fn simplex_matches_elimination_on_small_fields() {
        for n in ["H2", "H3", "H4"] {
            let s = builtin(n).unwrap();
            let rows = lognorm_rows(&s).unwrap();
            let sys = system(&rows, &s.extra_bounds, s.generators.len(), s.minus_one);
            for k in 0..s.generators.len() {
                assert_eq!(
                    coordinate_range(&sys, k).unwrap(),
                    fm::coordinate_range(&sys, k).unwrap(),
                    "{n} slot {k}"
                );
            }
        }
    }

    #[test]
    fn h3_and_h2_boxes() {
        let s = builtin("H3").unwrap();
        let (_, b) = spec_box(&s).unwrap();
        assert_eq!(b.ranges, vec![(0, 1), (-2, 2), (-2, 2), (-3, 3)]);
        let s = builtin("H2").unwrap();
        let (_, b) = spec_box(&s).unwrap();
        assert_eq!(b.ranges, vec![(0, 1), (-1, 1), (0, 3), (0, 1)]);
    }

    #[test]
    fn candidate_counts() {
        for (n, c) in [("H2", 48), ("H3", 350), ("H4", 13230), ("H5", 65610)] {
            let s = builtin(n).unwrap();
            let (_, b) = spec_box(&s).unwrap();
            let cands = enumerate_candidates(&b, s.minus_one);
            assert_eq!(cands.len(), c, "{n}");
            assert_eq!(b.count(), c);
        }
    }

    #[test]
    fn enumeration_order_is_deterministic() {
        let b = CandidateBox {
            ranges: vec![(0, 1), (-1, 0)],
        };
        let got: Vec<(i8, Vec<i32>)> = enumerate_candidates(&b, 0)
            .into_iter()
            .map(|e| (e.sign, e.exps))
            .collect();
        assert_eq!(
            got,
            vec![
                (1, vec![0, -1]),
                (1, vec![0, 0]),
                (-1, vec![0, -1]),
                (-1, vec![0, 0])
            ]
        );
    }

    fn run(
        name: &str,
    ) -> (
        PartialFieldSpec,
        Fingerprint,
        SieveOutcome,
        FundamentalTable,
        Vec<ConstraintRow>,
    ) {
        let s = builtin(name).unwrap();
        let (rows, b) = spec_box(&s).unwrap();
        let cands = enumerate_candidates(&b, s.minus_one);
        let fp = resolve_fingerprint(&s, &cands, None).unwrap();
        let out = fingerprint_sieve(&s, &fp, &cands).unwrap();
        let t = build_fundamental_table(&s, &fp).unwrap();
        (s, fp, out, t, rows)
    }

    #[test]
    fn h3_sieve_matches_printed_residues() {
        let (s, fp, out, t, rows) = run("H3");
        assert_eq!(fp.map.prime(), 1299709);
        assert_eq!(out.distinct, 351);
        let got: Vec<u64> = out.survivors.iter().map(|x| x.residue).collect();
        let want = [
            0, 1, 5, 21, 123783, 259942, 259946, 311931, 324922, 324927, 495128, 568624, 584869,
            618910, 680800, 714841, 731086, 804582, 974783, 974788, 987779, 1039764, 1039768,
            1175927, 1299689, 1299705,
        ];
        assert_eq!(got, want);
        assert!(verify_survivors(&s, &fp, &t, &out.survivors).is_empty());
        assert!(check_bound_validity(&rows, &s.extra_bounds, &t).is_empty());
    }

    #[test]
    fn sieve_sizes() {
        for (n, size, distinct) in [("H2", 11, 25), ("H4", 56, 13231), ("H5", 92, 65611)] {
            let (s, fp, out, t, rows) = run(n);
            assert_eq!(out.survivors.len(), size, "{n}");
            assert_eq!(out.distinct, distinct, "{n}");
            assert!(
                verify_survivors(&s, &fp, &t, &out.survivors).is_empty(),
                "{n}"
            );
            assert!(
                check_bound_validity(&rows, &s.extra_bounds, &t).is_empty(),
                "{n}"
            );
        }
    }

    #[test]
    fn h2_trivial_and_derived_pairs() {
        let (s, fp, out, t, _) = run("H2");
        let p = fp.map.prime();
        let one = out.survivors.iter().find(|x| x.residue == 1).unwrap();
        assert!(expand(&s, &one.element).one_minus().is_zero());
        let half = crate::pfield::expr::eval_str("(1+i)/2", &s.ground).unwrap();
        let k = t.find_exact(&fp, &half).unwrap();
        let partner = (1 + p - t.entries[k].fingerprint) % p;
        let j = t.index_of_fingerprint(partner).unwrap();
        let want = crate::pfield::expr::eval_str("(1-i)/2", &s.ground).unwrap();
        assert!(t.entries[j].value.exact_eq(&want));
    }

    #[test]
    fn corrupted_survivor_fails_loudly() {
        let (s, fp, out, t, _) = run("H3");
        let mut bad = out.survivors.clone();
        bad[7].residue = (bad[7].residue + 1) % fp.map.prime();
        let v = verify_survivors(&s, &fp, &t, &bad);
        assert!(!v.is_empty());
        assert!(v.iter().any(|x| x.residue == bad[7].residue));
        // a coincidence: claim a unit's partner is a different unit
        let mut swapped = out.survivors.clone();
        let e = swapped[5].element.clone();
        swapped[5].element = swapped[6].element.clone();
        swapped[6].element = e;
        assert!(verify_survivors(&s, &fp, &t, &swapped)
            .iter()
            .any(|x| x.kind == "fingerprint"));
    }

    #[test]
    fn prime_advance_recovers_injectivity() {
        let s = builtin("H3").unwrap();
        let (_, b) = spec_box(&s).unwrap();
        let cands = enumerate_candidates(&b, s.minus_one);
        // the 64 primes after 7 are all too small to separate 350 values
        assert!(matches!(
            resolve_fingerprint(&s, &cands, Some(7)),
            Err(Error::NoInjectivePrime(64))
        ));
        let fp = resolve_fingerprint(&s, &cands, Some(100_000)).unwrap();
        let p = fp.map.prime();
        assert!(p >= 100_000 && p < 1_299_709);
        // every prime skipped on the way was genuinely non-injective
        let mut q = crate::exact::modular::next_prime(99_999);
        while q < p {
            let f = Fingerprint::at_prime(&s, q).unwrap();
            let set: HashSet<u64> = cands.iter().map(|c| f.of_factored(c)).collect();
            assert!(set.len() < cands.len() || set.contains(&0));
            q = crate::exact::modular::next_prime(q);
        }
        let out = fingerprint_sieve(&s, &fp, &cands).unwrap();
        assert_eq!(out.survivors.len(), 26);
    }

    #[test]
    fn sieve_is_deterministic() {
        let (_, _, a, _, _) = run("H4");
        let (_, _, b, _, _) = run("H4");
        let ra: Vec<u64> = a.survivors.iter().map(|s| s.residue).collect();
        let rb: Vec<u64> = b.survivors.iter().map(|s| s.residue).collect();
        assert_eq!(ra, rb);
    }
}
