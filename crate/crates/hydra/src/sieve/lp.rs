//! Exact two-phase simplex over the rationals, Bland's rule throughout.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `coeffs . x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ineq {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    // objective = value + reduced . x over the nonbasic columns
    reduced: Vec<BigRational>,
    value: BigRational,
}

impl Tableau {
    fn pivot(&mut self, i: usize, j: usize) {
        let p = self.rows[i][j].clone();
        for x in self.rows[i].iter_mut() {
            *x = &*x / &p;
        }
        self.rhs[i] = &self.rhs[i] / &p;
        let (pr, prhs) = (self.rows[i].clone(), self.rhs[i].clone());
        for k in 0..self.rows.len() {
            let f = self.rows[k][j].clone();
            if k != i && !f.is_zero() {
                for (x, y) in self.rows[k].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
                self.rhs[k] -= &f * &prhs;
            }
        }
        let f = self.reduced[j].clone();
        if !f.is_zero() {
            for (x, y) in self.reduced.iter_mut().zip(&pr) {
                *x -= &f * y;
            }
            self.value += &f * &prhs;
        }
        self.basis[i] = j;
    }

    fn set_objective(&mut self, c: &[BigRational]) {
        self.reduced = c.to_vec();
        self.value = BigRational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c[b].clone();
            if !cb.is_zero() {
                for (x, y) in self.reduced.iter_mut().zip(&self.rows[i]) {
                    *x -= &cb * y;
                }
                self.value += &cb * &self.rhs[i];
            }
        }
    }

    /// Runs to optimality over the first `cols` columns; false when unbounded.
    fn optimize(&mut self, cols: usize) -> bool {
        loop {
            let Some(j) = (0..cols).find(|&j| self.reduced[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if a.is_positive() {
                    let ratio = &self.rhs[i] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

/// Maximum of `c . x` over the polyhedron with free `x`; `None` when unbounded.
pub fn maximize(system: &[Ineq], c: &[BigRational]) -> Result<Option<BigRational>> {
    let n = c.len();
    let m = system.len();
    // x = x+ - x-, then one slack per row, then artificials for rows with negative rhs
    let neg_rows: Vec<usize> = (0..m).filter(|&i| system[i].rhs.is_negative()).collect();
    let cols = 2 * n + m + neg_rows.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, q) in system.iter().enumerate() {
        let mut r = vec![BigRational::zero(); cols];
        for (j, a) in q.coeffs.iter().enumerate() {
            r[j] = a.clone();
            r[n + j] = -a;
        }
        r[2 * n + i] = BigRational::one();
        let mut b = q.rhs.clone();
        if let Some(a) = neg_rows.iter().position(|&k| k == i) {
            for x in r.iter_mut() {
                *x = -&*x;
            }
            b = -b;
            r[2 * n + m + a] = BigRational::one();
            basis.push(2 * n + m + a);
        } else {
            basis.push(2 * n + i);
        }
        rows.push(r);
        rhs.push(b);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis,
        reduced: Vec::new(),
        value: BigRational::zero(),
    };
    let real = 2 * n + m;
    if !neg_rows.is_empty() {
        let phase1: Vec<BigRational> = (0..cols)
            .map(|j| {
                if j >= real {
                    -BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect();
        t.set_objective(&phase1);
        t.optimize(cols);
        if t.value.is_negative() {
            return Err(Error::Lp("constraint system is infeasible".into()));
        }
        // drive zero-level artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= real {
                match (0..real).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for r in t.rows.iter_mut() {
            r.truncate(real);
        }
    }
    let mut obj = vec![BigRational::zero(); real];
    for (j, a) in c.iter().enumerate() {
        obj[j] = a.clone();
        obj[n + j] = -a;
    }
    t.set_objective(&obj);
    Ok(t.optimize(real).then_some(t.value))
}

/// Exact minimum and maximum of `x_k` over the polyhedron, `None` where unbounded.
pub fn coordinate_range(
    system: &[Ineq],
    k: usize,
) -> Result<(Option<BigRational>, Option<BigRational>)> {
    let n = system.first().map(|q| q.coeffs.len()).unwrap_or(0);
    let unit = |s: i64| -> Vec<BigRational> {
        (0..n)
            .map(|j| rational(if j == k { s } else { 0 }, 1))
            .collect()
    };
    let hi = maximize(system, &unit(1))?;
    let lo = maximize(system, &unit(-1))?.map(|v| -v);
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

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
    fn origin_outside_the_polyhedron() {
        // 2 <= x <= 5, y >= x + 1, y <= 7
        let sys = [
            q(&[(-1, 1), (0, 1)], -2),
            q(&[(1, 1), (0, 1)], 5),
            q(&[(1, 1), (-1, 1)], -1),
            q(&[(0, 1), (1, 1)], 7),
        ];
        assert_eq!(
            coordinate_range(&sys, 1).unwrap(),
            (Some(rational(3, 1)), Some(rational(7, 1)))
        );
        assert_eq!(
            coordinate_range(&sys, 0).unwrap(),
            (Some(rational(2, 1)), Some(rational(5, 1)))
        );
    }

    #[test]
    fn unbounded_and_infeasible() {
        let sys = [q(&[(1, 1), (-1, 1)], 0)];
        assert_eq!(coordinate_range(&sys, 0).unwrap(), (None, None));
        let bad = [q(&[(1, 1)], -1), q(&[(-1, 1)], 0)];
        assert!(coordinate_range(&bad, 0).is_err());
    }

    fn small_system() -> impl Strategy<Value = Vec<Ineq>> {
        let row = (proptest::collection::vec(-3i64..=3, 3), -2i64..=4).prop_map(|(c, r)| Ineq {
            coeffs: c.into_iter().map(|x| rational(x, 2)).collect(),
            rhs: rational(r, 1),
        });
        // a bounding cube keeps every instance bounded
        proptest::collection::vec(row, 1..7).prop_map(|mut rows| {
            for k in 0..3 {
                for s in [1, -1] {
                    let coeffs = (0..3)
                        .map(|j| rational(if j == k { s } else { 0 }, 1))
                        .collect();
                    rows.push(Ineq {
                        coeffs,
                        rhs: rational(5, 1),
                    });
                }
            }
            rows
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn agrees_with_elimination(sys in small_system(), k in 0usize..3) {
            let a = coordinate_range(&sys, k);
            let b = super::super::fm::coordinate_range(&sys, k);
            match (a, b) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "simplex {:?} vs elimination {:?}", x, y),
            }
        }
    }
}
