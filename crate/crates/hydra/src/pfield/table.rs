use std::collections::HashMap;

use super::{expand, factor, hom_gf5, FactoredElement, Fingerprint, GfTuple, PartialFieldSpec};
use crate::error::{Error, Result};
use crate::exact::Elem;

/// The six associates of `p`, deduplicated; {0, 1} when `p` is 0 or 1.
pub fn associates(p: &Elem) -> Vec<Elem> {
    let zero = p.sub(p);
    let one = p.sub(p).one_minus();
    if p.is_zero() || p.exact_eq(&one) {
        return vec![zero, one];
    }
    let q = p.one_minus();
    let forms = [
        p.clone(),
        q.clone(),
        one.div(&q).expect("p != 1"),
        p.div(&q.neg()).expect("p != 1"),
        q.neg().div(p).expect("p != 0"),
        one.div(p).expect("p != 0"),
    ];
    let mut out: Vec<Elem> = Vec::new();
    for f in forms {
        if !out.iter().any(|e| e.exact_eq(&f)) {
            out.push(f);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub element: FactoredElement,
    /// Expanded product of generator powers.
    pub value: Elem,
    pub fingerprint: u64,
    pub image: GfTuple,
}

/// Fundamental elements sorted by fingerprint, 0 and 1 included.
#[derive(Clone, Debug)]
pub struct FundamentalTable {
    pub entries: Vec<TableEntry>,
    by_fingerprint: HashMap<u64, usize>,
    by_image: HashMap<GfTuple, usize>,
}

impl FundamentalTable {
    pub fn new(mut entries: Vec<TableEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.fingerprint);
        let mut by_fingerprint = HashMap::new();
        let mut by_image = HashMap::new();
        for (k, e) in entries.iter().enumerate() {
            if by_fingerprint.insert(e.fingerprint, k).is_some() {
                return Err(Error::Check(format!(
                    "fingerprint {} occurs twice in the table",
                    e.fingerprint
                )));
            }
            if by_image.insert(e.image.clone(), k).is_some() {
                return Err(Error::Check(format!(
                    "phi image {} occurs twice in the table",
                    e.image
                )));
            }
        }
        Ok(FundamentalTable {
            entries,
            by_fingerprint,
            by_image,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of_fingerprint(&self, r: u64) -> Option<usize> {
        self.by_fingerprint.get(&r).copied()
    }

    pub fn index_of_image(&self, t: &GfTuple) -> Option<usize> {
        self.by_image.get(t).copied()
    }

    pub fn fingerprints(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.fingerprint).collect()
    }

    /// Indices of the entries other than 0 and 1, in table order.
    pub fn nonzero_one(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&k| {
                let e = &self.entries[k].element;
                !e.is_zero() && !(e.sign == 1 && e.exps.iter().all(|&x| x == 0))
            })
            .collect()
    }

    /// Index of the entry equal to `x`, by fingerprint lookup and cross-multiplication.
    pub fn find_exact(&self, fp: &Fingerprint, x: &Elem) -> Option<usize> {
        match fp.of_elem(x) {
            Some(r) => self
                .index_of_fingerprint(r)
                .filter(|&k| self.entries[k].value.exact_eq(x)),
            // the denominator vanishes at the fingerprint point, so compare against everything
            None => self.entries.iter().position(|e| e.value.exact_eq(x)),
        }
    }

    pub fn is_fundamental_exact(&self, fp: &Fingerprint, x: &Elem) -> bool {
        self.find_exact(fp, x).is_some()
    }

    /// Index of the entry equal to the factored element `e`.
    pub fn find_factored(
        &self,
        spec: &PartialFieldSpec,
        fp: &Fingerprint,
        e: &FactoredElement,
    ) -> Option<usize> {
        let k = self.index_of_fingerprint(fp.of_factored(e))?;
        let entry = &self.entries[k];
        (entry.element == *e || entry.value.exact_eq(&expand(spec, e))).then_some(k)
    }
}

/// Closure of the seeds under associates, each entry factored over the generators.
pub fn build_fundamental_table(
    spec: &PartialFieldSpec,
    fp: &Fingerprint,
) -> Result<FundamentalTable> {
    let mut values: Vec<Elem> = Vec::new();
    let mut seen: HashMap<Option<u64>, Vec<usize>> = HashMap::new();
    for (_, seed) in &spec.seeds {
        for a in associates(seed) {
            let key = fp.of_elem(&a);
            let bucket = seen.entry(key).or_default();
            // an unfingerprintable value may equal anything, so it is compared against all
            let dup = if key.is_none() {
                values.iter().any(|v| v.exact_eq(&a))
            } else {
                bucket.iter().any(|&k| values[k].exact_eq(&a))
            };
            if !dup {
                bucket.push(values.len());
                values.push(a);
            }
        }
    }
    let mut entries = Vec::with_capacity(values.len());
    for v in &values {
        let element = factor(spec, v)?;
        entries.push(TableEntry {
            fingerprint: fp.of_factored(&element),
            image: hom_gf5(spec, &element),
            value: expand(spec, &element),
            element,
        });
    }
    FundamentalTable::new(entries)
}
