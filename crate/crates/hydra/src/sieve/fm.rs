//! Fourier-Motzkin elimination over exact rationals, with Chernikov's history rule
//! to discard redundant combinations. Too slow for the largest systems, it serves as an
//! independent check on the simplex.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::lp::Ineq;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Tracked {
    ineq: Ineq,
    // indices of the original inequalities this one was combined from
    history: Vec<u64>,
}

fn popcount(h: &[u64]) -> u32 {
    h.iter().map(|w| w.count_ones()).sum()
}

fn normalize(mut q: Ineq) -> Ineq {
    let scale = q.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs());
    if let Some(s) = scale {
        for c in q.coeffs.iter_mut() {
            *c = &*c / &s;
        }
        q.rhs = &q.rhs / &s;
    }
    q
}

/// Removes duplicates, keeping the tightest right-hand side; fails on `0 <= negative`.
fn prune(rows: Vec<Tracked>) -> Result<Vec<Tracked>> {
    let mut best: HashMap<Vec<BigRational>, Tracked> = HashMap::new();
    let mut order = Vec::new();
    for t in rows {
        if t.ineq.coeffs.iter().all(Zero::is_zero) {
            if t.ineq.rhs.is_negative() {
                return Err(Error::Lp("constraint system is infeasible".into()));
            }
            continue;
        }
        let key = t.ineq.coeffs.clone();
        match best.get_mut(&key) {
            Some(b) => {
                if t.ineq.rhs < b.ineq.rhs {
                    *b = t;
                }
            }
            None => {
                order.push(key.clone());
                best.insert(key, t);
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|k| best.remove(&k).unwrap())
        .collect())
}

fn eliminate(rows: Vec<Tracked>, j: usize, eliminated: u32) -> Result<Vec<Tracked>> {
    let (mut pos, mut neg, mut out) = (Vec::new(), Vec::new(), Vec::new());
    for t in rows {
        let c = &t.ineq.coeffs[j];
        if c.is_positive() {
            pos.push(t);
        } else if c.is_negative() {
            neg.push(t);
        } else {
            out.push(t);
        }
    }
    for p in &pos {
        for n in &neg {
            let history: Vec<u64> = p
                .history
                .iter()
                .zip(&n.history)
                .map(|(a, b)| a | b)
                .collect();
            if popcount(&history) > eliminated + 1 {
                continue;
            }
            let a = &p.ineq.coeffs[j];
            let b = -&n.ineq.coeffs[j];
            let coeffs = p
                .ineq
                .coeffs
                .iter()
                .zip(&n.ineq.coeffs)
                .map(|(x, y)| x * &b + y * a)
                .collect();
            let rhs = &p.ineq.rhs * &b + &n.ineq.rhs * a;
            out.push(Tracked {
                ineq: normalize(Ineq { coeffs, rhs }),
                history,
            });
        }
    }
    prune(out)
}

/// Exact minimum and maximum of `x_k` over the polyhedron, `None` where unbounded.
pub fn coordinate_range(
    system: &[Ineq],
    k: usize,
) -> Result<(Option<BigRational>, Option<BigRational>)> {
    let n = system.first().map(|q| q.coeffs.len()).unwrap_or(0);
    let words = system.len().div_ceil(64);
    let mut rows: Vec<Tracked> = system
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut history = vec![0u64; words];
            history[i / 64] |= 1 << (i % 64);
            Tracked {
                ineq: normalize(q.clone()),
                history,
            }
        })
        .collect();
    rows = prune(rows)?;
    let mut remaining: Vec<usize> = (0..n).filter(|&j| j != k).collect();
    let mut eliminated = 0;
    while !remaining.is_empty() {
        // cheapest variable first: fewest new rows
        let (idx, &j) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &j)| {
                let p = rows
                    .iter()
                    .filter(|t| t.ineq.coeffs[j].is_positive())
                    .count();
                let m = rows
                    .iter()
                    .filter(|t| t.ineq.coeffs[j].is_negative())
                    .count();
                p * m
            })
            .unwrap();
        remaining.remove(idx);
        eliminated += 1;
        rows = eliminate(rows, j, eliminated)?;
    }
    let mut lo: Option<BigRational> = None;
    let mut hi: Option<BigRational> = None;
    for t in &rows {
        let a = &t.ineq.coeffs[k];
        let v = &t.ineq.rhs / a;
        if a.is_positive() {
            hi = Some(hi.map_or(v.clone(), |h| h.min(v)));
        } else if a.is_negative() {
            lo = Some(lo.map_or(v.clone(), |l| l.max(v)));
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return Err(Error::Lp("constraint system is infeasible".into()));
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::lp::rational;

    fn q(c: &[(i64, i64)], r: i64) -> Ineq {
        Ineq {
            coeffs: c.iter().map(|&(n, d)| rational(n, d)).collect(),
            rhs: rational(r, 1),
        }
    }

    #[test]
    fn pinned_coordinate() {
        let sys = [q(&[(1, 1)], 0), q(&[(-1, 1)], 0)];
        assert_eq!(
            coordinate_range(&sys, 0).unwrap(),
            (Some(rational(0, 1)), Some(rational(0, 1)))
        );
    }

    #[test]
    fn triangle() {
        // x, y >= 0, x + 2y <= 4
        let sys = [
            q(&[(-1, 1), (0, 1)], 0),
            q(&[(0, 1), (-1, 1)], 0),
            q(&[(1, 1), (2, 1)], 4),
        ];
        assert_eq!(
            coordinate_range(&sys, 0).unwrap(),
            (Some(rational(0, 1)), Some(rational(4, 1)))
        );
        assert_eq!(
            coordinate_range(&sys, 1).unwrap(),
            (Some(rational(0, 1)), Some(rational(2, 1)))
        );
    }

    #[test]
    fn half_integer_rows() {
        // -1 <= x + y/2 <= 1, 0 <= y <= 1
        let sys = [
            q(&[(1, 1), (1, 2)], 1),
            q(&[(-1, 1), (-1, 2)], 1),
            q(&[(0, 1), (1, 1)], 1),
            q(&[(0, 1), (-1, 1)], 0),
        ];
        assert_eq!(
            coordinate_range(&sys, 0).unwrap(),
            (Some(rational(-3, 2)), Some(rational(1, 1)))
        );
    }

    #[test]
    fn unbounded_and_infeasible() {
        let sys = [q(&[(1, 1), (-1, 1)], 0)];
        assert_eq!(coordinate_range(&sys, 0).unwrap(), (None, None));
        let bad = [q(&[(1, 1)], -1), q(&[(-1, 1)], 0)];
        assert!(coordinate_range(&bad, 0).is_err());
    }
}
