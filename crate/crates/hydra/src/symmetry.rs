//! Automorphisms of a partial field: substitutions of the free symbols by fundamental
//! elements, found by a modular prefilter and confirmed exactly.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Elem;
use crate::pfield::{Fingerprint, FundamentalTable, PartialFieldSpec};

/// Shared data for the search over one field.
pub struct SymmetryContext<'a> {
    pub spec: &'a PartialFieldSpec,
    pub fp: &'a Fingerprint,
    pub table: &'a FundamentalTable,
    // residues of the fundamentals other than 0 and 1
    reference: HashSet<u64>,
    nonzero_one: Vec<usize>,
}

/// A confirmed automorphism: the table index of each symbol's image and the induced
/// permutation of phi coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Automorphism {
    pub images: Vec<usize>,
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutGroup {
    pub candidates: usize,
    pub prefiltered: usize,
    /// Sorted by image indices; the identity is among them.
    pub members: Vec<Automorphism>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index_of(&self, images: &[usize]) -> Option<usize> {
        self.members
            .binary_search_by(|m| m.images.as_slice().cmp(images))
            .ok()
    }
}

impl<'a> SymmetryContext<'a> {
    pub fn new(
        spec: &'a PartialFieldSpec,
        fp: &'a Fingerprint,
        table: &'a FundamentalTable,
    ) -> Self {
        let nonzero_one = table.nonzero_one();
        let reference = nonzero_one
            .iter()
            .map(|&k| table.entries[k].fingerprint)
            .collect();
        SymmetryContext {
            spec,
            fp,
            table,
            reference,
            nonzero_one,
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.spec.ground.symbol_count()
    }

    /// Size of the space of ordered tuples of distinct nonzero-one fundamentals.
    pub fn candidate_count(&self) -> usize {
        let n = self.nonzero_one.len();
        (0..self.symbol_count()).map(|j| n - j).product()
    }

    /// The `idx`-th candidate in lexicographic order of positions in the nonzero-one list.
    pub fn candidate(&self, mut idx: usize) -> Vec<usize> {
        let k = self.symbol_count();
        let mut pool = self.nonzero_one.clone();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let rest: usize = (1..k - j).map(|t| pool.len() - t).product();
            out.push(pool.remove(idx / rest));
            idx %= rest;
        }
        out
    }

    /// The identity candidate: each symbol sent to itself.
    pub fn identity(&self) -> Result<Vec<usize>> {
        (0..self.symbol_count())
            .map(|j| {
                self.table
                    .find_exact(self.fp, &self.spec.ground.symbol(j))
                    .ok_or_else(|| Error::Check(format!("symbol {j} is not fundamental")))
            })
            .collect()
    }

    /// Modular test: with the symbols sent to the residues of the candidate images, the
    /// nonzero-one fundamentals must again have exactly the reference residues.
    pub fn prefilter(&self, images: &[usize]) -> bool {
        let p = self.fp.map.prime();
        let syms: Vec<u64> = images
            .iter()
            .map(|&k| self.table.entries[k].fingerprint)
            .collect();
        let mut gens = Vec::with_capacity(self.spec.generators.len());
        for g in &self.spec.generators {
            match g.value.eval_mod(p, &syms) {
                Some(r) if r != 0 => gens.push(r),
                _ => return false,
            }
        }
        let Ok(map) = crate::exact::ModMap::new(p, gens) else {
            return false;
        };
        let mut seen = HashSet::with_capacity(self.nonzero_one.len());
        for &k in &self.nonzero_one {
            let e = &self.table.entries[k].element;
            let r = map.mod_eval(e.sign, &e.exps);
            if !self.reference.contains(&r) || !seen.insert(r) {
                return false;
            }
        }
        true
    }

    fn values(&self, images: &[usize]) -> Vec<Elem> {
        images
            .iter()
            .map(|&k| self.table.entries[k].value.clone())
            .collect()
    }

    /// Exact test: every seed maps to a fundamental element.
    pub fn confirm(&self, images: &[usize]) -> bool {
        let vals = self.values(images);
        self.spec
            .seeds
            .iter()
            .all(|(_, s)| match s.substitute(&vals) {
                Ok(x) => self.table.is_fundamental_exact(self.fp, &x),
                Err(_) => false,
            })
    }

    /// The permutation `pi` of phi coordinates with phi(sigma g)_c = phi(g)_pi[c] for every generator.
    pub fn induced_permutation(&self, images: &[usize]) -> Result<Vec<usize>> {
        let m = self.spec.width();
        let img_phi: Vec<_> = images
            .iter()
            .map(|&k| &self.table.entries[k].image)
            .collect();
        let moved: Vec<Vec<u8>> = self
            .spec
            .generators
            .iter()
            .map(|g| {
                (0..m)
                    .map(|c| {
                        let pt: Vec<u64> = img_phi.iter().map(|t| t.0[c] as u64).collect();
                        g.value.eval_mod(5, &pt).map(|v| v as u8)
                    })
                    .collect::<Option<Vec<u8>>>()
                    .ok_or_else(|| Error::Check("generator image vanishes modulo 5".into()))
            })
            .collect::<Result<_>>()?;
        let mut pi = Vec::with_capacity(m);
        for c in 0..m {
            let fits: Vec<usize> = (0..m)
                .filter(|&d| {
                    self.spec
                        .generators
                        .iter()
                        .zip(&moved)
                        .all(|(g, mv)| mv[c] == g.phi.0[d])
                })
                .collect();
            match fits.as_slice() {
                [d] => pi.push(*d),
                _ => {
                    return Err(Error::Check(format!(
                        "images {images:?} induce no coordinate permutation (coordinate {c} has {} matches)",
                        fits.len()
                    )))
                }
            }
        }
        let distinct: HashSet<_> = pi.iter().collect();
        if distinct.len() != m {
            return Err(Error::Check(format!(
                "images {images:?} induce a non-bijective coordinate map"
            )));
        }
        Ok(pi)
    }

    /// Image indices of the composite sigma(tau(.)): each symbol goes to tau's image with
    /// sigma's images substituted. `None` when the result is not a fundamental element.
    pub fn compose(&self, sigma: &[usize], tau: &[usize]) -> Result<Option<Vec<usize>>> {
        let s = self.values(sigma);
        let mut out = Vec::with_capacity(tau.len());
        for &k in tau {
            let x = self.table.entries[k].value.substitute(&s)?;
            match self.table.find_exact(self.fp, &x) {
                Some(j) => out.push(j),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// Full search: prefilter over every candidate, then exact confirmation and the induced
/// permutation for each survivor. `progress` receives (done, total) for the prefilter.
pub fn automorphism_group(
    ctx: &SymmetryContext,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<AutGroup> {
    let total = ctx.candidate_count();
    let done = AtomicUsize::new(0);
    let step = (total / 20).max(1);
    let passed: Vec<Vec<usize>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let c = ctx.candidate(idx);
            let ok = ctx.prefilter(&c);
            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(f) = progress {
                if d % step == 0 || d == total {
                    f(d, total);
                }
            }
            ok.then_some(c)
        })
        .collect();
    let confirmed: Vec<Vec<usize>> = passed
        .par_iter()
        .filter(|c| ctx.confirm(c))
        .cloned()
        .collect();
    let mut members = confirmed
        .into_iter()
        .map(|images| {
            ctx.induced_permutation(&images)
                .map(|permutation| Automorphism {
                    images,
                    permutation,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    members.sort_by(|a, b| a.images.cmp(&b.images));
    Ok(AutGroup {
        candidates: total,
        prefiltered: passed.len(),
        members,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClosureReport {
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

/// Permutation induced by sigma(tau(.)), in the convention of `induced_permutation`.
pub fn compose_permutations(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    sigma.iter().map(|&d| tau[d]).collect()
}

/// Closure, inverses and the homomorphism onto coordinate permutations. With `samples`,
/// only that many random pairs from the seeded generator are composed.
pub fn check_closure(
    ctx: &SymmetryContext,
    group: &AutGroup,
    samples: Option<(usize, u64)>,
) -> Result<ClosureReport> {
    let n = group.members.len();
    let pairs: Vec<(usize, usize)> = match samples {
        None => (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect(),
        Some((count, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        }
    };
    let results: Vec<Option<String>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (s, t) = (&group.members[a], &group.members[b]);
            match ctx.compose(&s.images, &t.images)? {
                None => Ok(Some(format!(
                    "{:?} after {:?} leaves the fundamentals",
                    s.images, t.images
                ))),
                Some(c) => match group.index_of(&c) {
                    None => Ok(Some(format!(
                        "{:?} after {:?} gives {c:?}, not in the group",
                        s.images, t.images
                    ))),
                    Some(k)
                        if group.members[k].permutation
                            != compose_permutations(&s.permutation, &t.permutation) =>
                    {
                        Ok(Some(format!(
                            "{:?} after {:?}: permutation is not multiplicative",
                            s.images, t.images
                        )))
                    }
                    Some(_) => Ok(None),
                },
            }
        })
        .collect::<Result<_>>()?;
    let mut report = ClosureReport {
        pairs_checked: pairs.len(),
        failures: results.into_iter().flatten().collect(),
    };
    // inverses, read off the permutations and then confirmed by composition
    let identity = ctx.identity()?;
    let by_perm: HashMap<&[usize], usize> = group
        .members
        .iter()
        .enumerate()
        .map(|(k, m)| (m.permutation.as_slice(), k))
        .collect();
    for m in &group.members {
        let mut inv = vec![0; m.permutation.len()];
        for (c, &d) in m.permutation.iter().enumerate() {
            inv[d] = c;
        }
        let ok = match by_perm.get(inv.as_slice()) {
            Some(&k) => {
                ctx.compose(&m.images, &group.members[k].images)?.as_deref()
                    == Some(identity.as_slice())
            }
            None => false,
        };
        if !ok {
            report
                .failures
                .push(format!("{:?} has no inverse in the group", m.images));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfield::expr::eval_str;
    use crate::pfield::{build_fundamental_table, builtin};

    fn setup(name: &str) -> (PartialFieldSpec, Fingerprint, FundamentalTable) {
        let s = builtin(name).unwrap();
        let fp = Fingerprint::at_prime(&s, s.mod_map.prime).unwrap();
        let t = build_fundamental_table(&s, &fp).unwrap();
        (s, fp, t)
    }

    fn idx(s: &PartialFieldSpec, fp: &Fingerprint, t: &FundamentalTable, x: &str) -> usize {
        t.find_exact(fp, &eval_str(x, &s.ground).unwrap()).unwrap()
    }

    #[test]
    fn candidate_decoding_is_a_bijection() {
        let (s, fp, t) = setup("H4");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        assert_eq!(ctx.candidate_count(), 54 * 53);
        let all: HashSet<Vec<usize>> = (0..ctx.candidate_count())
            .map(|i| ctx.candidate(i))
            .collect();
        assert_eq!(all.len(), 54 * 53);
        assert!(all.iter().all(|c| c[0] != c[1]));
    }

    #[test]
    fn identity_passes_everything() {
        for n in ["H2", "H3", "H4", "H5"] {
            let (s, fp, t) = setup(n);
            let ctx = SymmetryContext::new(&s, &fp, &t);
            let id = ctx.identity().unwrap();
            assert!(ctx.prefilter(&id), "{n}");
            assert!(ctx.confirm(&id), "{n}");
            assert_eq!(
                ctx.induced_permutation(&id).unwrap(),
                (0..s.width()).collect::<Vec<_>>(),
                "{n}"
            );
        }
    }

    #[test]
    fn h3_examples() {
        let (s, fp, t) = setup("H3");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        let good = idx(&s, &fp, &t, "1/(1-alpha)");
        assert!(ctx.confirm(&[good]));
        let bad = idx(&s, &fp, &t, "(alpha-1)/alpha^2");
        assert!(!ctx.confirm(&[bad]));
        // its image of alpha^2/(alpha-1) is not fundamental
        let x = eval_str("alpha^2/(alpha-1)", &s.ground)
            .unwrap()
            .substitute(&[t.entries[bad].value.clone()])
            .unwrap();
        assert!(!t.is_fundamental_exact(&fp, &x));
    }

    #[test]
    fn h2_conjugation() {
        let (s, fp, t) = setup("H2");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        let g = automorphism_group(&ctx, None).unwrap();
        assert_eq!(g.order(), 2);
        let conj = idx(&s, &fp, &t, "-i");
        assert!(g.index_of(&[conj]).is_some());
        assert_eq!(
            g.members
                .iter()
                .filter(|m| m.permutation == vec![1, 0])
                .count(),
            1
        );
    }

    fn all_permutations(m: usize) -> usize {
        (1..=m).product()
    }

    #[test]
    fn h3_group() {
        let (s, fp, t) = setup("H3");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        let g = automorphism_group(&ctx, None).unwrap();
        assert_eq!(g.candidates, 24);
        assert!(g.prefiltered >= 6);
        assert_eq!(g.order(), 6);
        let perms: HashSet<_> = g.members.iter().map(|m| m.permutation.clone()).collect();
        assert_eq!(perms.len(), all_permutations(3));
        assert!(check_closure(&ctx, &g, None).unwrap().failures.is_empty());
    }

    #[test]
    fn h4_group() {
        let (s, fp, t) = setup("H4");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        let g = automorphism_group(&ctx, None).unwrap();
        assert_eq!(g.prefiltered, 24);
        assert_eq!(g.order(), 24);
        let perms: HashSet<_> = g.members.iter().map(|m| m.permutation.clone()).collect();
        assert_eq!(perms.len(), all_permutations(4));
        let c = check_closure(&ctx, &g, None).unwrap();
        assert_eq!(c.pairs_checked, 576);
        assert!(c.failures.is_empty(), "{:?}", c.failures);
    }

    #[test]
    fn h5_group() {
        let (s, fp, t) = setup("H5");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        assert_eq!(ctx.candidate_count(), 90 * 89 * 88);
        let g = automorphism_group(&ctx, None).unwrap();
        assert_eq!(g.order(), 720);
        let perms: HashSet<_> = g.members.iter().map(|m| m.permutation.clone()).collect();
        assert_eq!(perms.len(), all_permutations(6));
        let c = check_closure(&ctx, &g, Some((200, 7))).unwrap();
        assert_eq!(c.pairs_checked, 200);
        assert!(c.failures.is_empty(), "{:?}", c.failures);
    }

    #[test]
    fn composition_direction() {
        // sigma: alpha -> 1 - alpha, tau: alpha -> 1/alpha; sigma(tau(alpha)) = 1/(1 - alpha)
        let (s, fp, t) = setup("H3");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        let sigma = idx(&s, &fp, &t, "1-alpha");
        let tau = idx(&s, &fp, &t, "1/alpha");
        let want = idx(&s, &fp, &t, "1/(1-alpha)");
        assert_eq!(ctx.compose(&[sigma], &[tau]).unwrap(), Some(vec![want]));
    }

    #[test]
    fn non_automorphism_has_no_permutation_or_fails_confirm() {
        let (s, fp, t) = setup("H4");
        let ctx = SymmetryContext::new(&s, &fp, &t);
        let a = idx(&s, &fp, &t, "alpha");
        let b = idx(&s, &fp, &t, "alpha*beta");
        assert!(!(ctx.prefilter(&[a, b]) && ctx.confirm(&[a, b])));
    }
}
