//! H3 as the lift partial field of GF(5)^3: the triple-product identities among the chosen
//! cross ratios and the polynomial relations they impose on the lifted generators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Elem, Ground};
use crate::pfield::expr::eval_str;
use crate::pfield::{build_fundamental_table, builtin, factor, hom_gf5, Fingerprint, GfTuple};

/// Cross ratios of GF(5)^3 that generate all the others.
pub const CROSS_RATIO_GENERATORS: [[u8; 3]; 4] = [[2, 2, 3], [2, 3, 2], [2, 3, 3], [2, 3, 4]];

/// Symbols standing for the lifts of the generators above, in the same order.
pub const SYMBOLS: [&str; 4] = ["s223", "s232", "s233", "s234"];

/// Products of lifted cross ratios that must be 1, with denominators multiplied out.
pub const RELATIONS: [&str; 3] = [
    "s223*s234 - (1 - s234)*(s223 - 1)*(s234 - 1)",
    "(1 - s234)*s234*s232 - (s232 - 1)",
    "s234*s234*(1 - s233) - (s234 - 1)",
];

/// A Groebner basis over the integers of the ideal of `RELATIONS`.
pub const BASIS: [&str; 4] = [
    "-1 + s234 - s234^2 + s233*s234^2",
    "-1 + s232 - s232*s234 + s232*s234^2",
    "-s233 + s232*s233 + s234 - s233*s234",
    "-1 + s223 + s232*s234",
];

/// Two readings of the printed value of s223; the second drops the implied grouping.
pub const S223_READINGS: [&str; 2] = [
    "1 - alpha/(1 - alpha + alpha^2)",
    "(1 - alpha)/(1 - alpha + alpha^2)",
];
pub const S232: &str = "1/(1 - alpha + alpha^2)";
pub const S233: &str = "(1 - alpha + alpha^2)/alpha^2";

fn gf(t: [u8; 3]) -> GfTuple {
    GfTuple(t.to_vec())
}

fn frac(a: &GfTuple, b: &GfTuple) -> GfTuple {
    a.mul(&b.inv().expect("denominator is a unit"))
}

fn minus_one(t: &GfTuple) -> GfTuple {
    // t - 1 = -(1 - t)
    GfTuple(t.one_minus().0.iter().map(|&c| (5 - c) % 5).collect())
}

/// The three triples p, q, r with pqr = 1 used in the construction.
pub fn pqr_triples() -> [[GfTuple; 3]; 3] {
    let one = GfTuple::constant(3, 1);
    let [a, b, c, d] = CROSS_RATIO_GENERATORS.map(gf);
    [
        [
            d.one_minus(),
            frac(&minus_one(&a), &a),
            frac(&minus_one(&d), &d),
        ],
        [
            frac(&minus_one(&b), &b),
            frac(&one, &d),
            frac(&one, &d.one_minus()),
        ],
        [
            frac(&minus_one(&d), &d),
            frac(&one, &d),
            frac(&one, &c.one_minus()),
        ],
    ]
}

/// Indices of triples whose coordinatewise product is not (1,1,1).
pub fn check_triples(triples: &[[GfTuple; 3]]) -> Vec<usize> {
    let one = GfTuple::constant(3, 1);
    triples
        .iter()
        .enumerate()
        .filter(|(_, [p, q, r])| p.mul(q).mul(r) != one)
        .map(|(k, _)| k)
        .collect()
}

fn relation_ground() -> Ground {
    Ground::Rational {
        vars: SYMBOLS.iter().map(|s| s.to_string()).collect(),
    }
}

/// Each polynomial after substituting `values` for the symbols, as displayed nonzero
/// residuals (empty when all vanish).
pub fn residuals(polys: &[&str], values: &[Elem], ground: &Ground) -> Result<Vec<String>> {
    let rg = relation_ground();
    let mut out = Vec::new();
    for p in polys {
        let e = eval_str(p, &rg)?;
        let r = e.substitute(values)?;
        if !r.is_zero() {
            out.push(format!("{p} -> {}", r.display(ground)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReadingCheck {
    pub s223: String,
    pub relation_residuals: Vec<String>,
    pub basis_residuals: Vec<String>,
    pub phi_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenesisReport {
    pub triples: Vec<Vec<String>>,
    pub bad_triples: Vec<usize>,
    pub readings: Vec<ReadingCheck>,
    /// The reading that satisfies every relation and reproduces the cross ratios.
    pub chosen: Option<String>,
    /// Lifted generators that are fundamental in H3 with the expected phi image.
    pub fundamental_lifts: Vec<String>,
    pub pass: bool,
}

/// Substitutes the solved values (with `alpha` for s234) into the relations and the basis,
/// and checks the lifts against H3.
pub fn verify_solution() -> Result<GenesisReport> {
    let spec = builtin("H3")?;
    let g = spec.ground.clone();
    let fp = Fingerprint::at_prime(&spec, spec.mod_map.prime)?;
    let table = build_fundamental_table(&spec, &fp)?;
    let triples = pqr_triples();
    let bad_triples = check_triples(&triples);
    let mut readings = Vec::new();
    let mut chosen = None;
    let mut fundamental_lifts = Vec::new();
    for s223 in S223_READINGS {
        let values = [
            eval_str(s223, &g)?,
            eval_str(S232, &g)?,
            eval_str(S233, &g)?,
            eval_str("alpha", &g)?,
        ];
        let relation_residuals = residuals(&RELATIONS, &values, &g)?;
        let basis_residuals = residuals(&BASIS, &values, &g)?;
        let mut phi_matches = true;
        let mut lifts = Vec::new();
        for (v, t) in values.iter().zip(CROSS_RATIO_GENERATORS) {
            let ok = match factor(&spec, v) {
                Ok(f) => hom_gf5(&spec, &f) == gf(t) && table.is_fundamental_exact(&fp, v),
                Err(Error::NotAUnit(_)) => false,
                Err(e) => return Err(e),
            };
            phi_matches &= ok;
            if ok {
                lifts.push(format!("{} = {}", gf(t), v.display(&g)));
            }
        }
        if relation_residuals.is_empty()
            && basis_residuals.is_empty()
            && phi_matches
            && chosen.is_none()
        {
            chosen = Some(s223.to_string());
            fundamental_lifts = lifts;
        }
        readings.push(ReadingCheck {
            s223: s223.to_string(),
            relation_residuals,
            basis_residuals,
            phi_matches,
        });
    }
    let pass = bad_triples.is_empty() && chosen.is_some();
    Ok(GenesisReport {
        triples: triples
            .iter()
            .map(|t| t.iter().map(|x| x.to_string()).collect())
            .collect(),
        bad_triples,
        readings,
        chosen,
        fundamental_lifts,
        pass,
    })
}
