//! Partial-field specifications and their line-oriented text format.
//!
//! ```text
//! name H3
//! ground rational alpha            # or: ground gaussian
//! gen <slot> <expr> : <phi tuple>  # one line per generator, -1 included
//! seed <expr>
//! lift drop-last                   # optional
//! modmap <prime> alpha=5           # gaussian: i=auto
//! h2 alpha=1-i                     # one homomorphism into H2 per line
//! bound <slot> <lo> <hi>
//! lp reals|integers
//! expect fundamentals 26
//! ```

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::expr::eval_str;
use super::GfTuple;
use crate::error::{Error, Result};
use crate::exact::{Elem, GaussDyadic, Ground};

#[derive(Clone, Debug)]
pub struct Generator {
    /// Name of the exponent slot this generator owns.
    pub slot: String,
    pub source: String,
    pub value: Elem,
    /// Image under the GF(5)^m homomorphism.
    pub phi: GfTuple,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolResidue {
    Fixed(u64),
    /// The smaller square root of -1 modulo the prime in use.
    SqrtNegOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMapSpec {
    pub prime: u64,
    pub symbols: Vec<SymbolResidue>,
}

#[derive(Clone, Debug)]
pub struct H2Hom {
    pub sources: Vec<String>,
    pub images: Vec<GaussDyadic>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    Reals,
    Integers,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expectations {
    pub fundamentals: Option<usize>,
    pub candidates: Option<usize>,
    pub automorphisms: Option<usize>,
    pub u25: Option<usize>,
    pub domain: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct PartialFieldSpec {
    pub name: String,
    pub ground: Ground,
    pub generators: Vec<Generator>,
    /// Index of the generator equal to -1.
    pub minus_one: usize,
    pub seeds: Vec<(String, Elem)>,
    /// The lifting homomorphism drops the last coordinate of phi.
    pub lift_drop_last: bool,
    pub mod_map: ModMapSpec,
    pub h2_homs: Vec<H2Hom>,
    pub extra_bounds: Vec<(usize, i64, i64)>,
    pub lp_mode: LpMode,
    pub expect: Expectations,
}

pub const BUILTIN_NAMES: [&str; 4] = ["H2", "H3", "H4", "H5"];

pub fn builtin_text(name: &str) -> Option<&'static str> {
    Some(match name.to_ascii_uppercase().as_str() {
        "H2" => include_str!("../../specs/h2.hydra"),
        "H3" => include_str!("../../specs/h3.hydra"),
        "H4" => include_str!("../../specs/h4.hydra"),
        "H5" => include_str!("../../specs/h5.hydra"),
        _ => return None,
    })
}

pub fn builtin(name: &str) -> Result<PartialFieldSpec> {
    let text = builtin_text(name).ok_or_else(|| Error::Spec(format!("unknown field {name:?}")))?;
    PartialFieldSpec::parse(text)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

impl PartialFieldSpec {
    pub fn arity(&self) -> usize {
        match &self.ground {
            Ground::Rational { vars } => vars.len(),
            Ground::Gaussian => 0,
        }
    }

    /// Width of the GF(5)^m codomain of phi.
    pub fn width(&self) -> usize {
        self.generators[0].phi.0.len()
    }

    /// Width of the lifting homomorphism's codomain.
    pub fn lift_width(&self) -> usize {
        self.width() - usize::from(self.lift_drop_last)
    }

    pub fn slot_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.slot.clone()).collect()
    }

    pub fn generator_values(&self) -> Vec<Elem> {
        self.generators.iter().map(|g| g.value.clone()).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut ground = None;
        let mut gens: Vec<(usize, String, String, String)> = Vec::new();
        let mut seeds = Vec::new();
        let mut lift_drop_last = false;
        let mut modmap = None;
        let mut h2 = Vec::new();
        let mut bounds = Vec::new();
        let mut lp_mode = LpMode::Reals;
        let mut expect = Expectations::default();

        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match key {
                "name" => name = Some(rest.to_string()),
                "ground" => {
                    let mut w = rest.split_whitespace();
                    ground = Some(match w.next() {
                        Some("gaussian") => Ground::Gaussian,
                        Some("rational") => {
                            let vars: Vec<String> = w.map(String::from).collect();
                            if vars.is_empty() || vars.iter().any(|v| v == "i") {
                                return Err(perr(
                                    ln,
                                    "rational ground needs indeterminates other than i",
                                ));
                            }
                            Ground::Rational { vars }
                        }
                        _ => {
                            return Err(perr(ln, "ground must be `gaussian` or `rational <vars>`"))
                        }
                    });
                }
                "gen" => {
                    let (lhs, phi) = rest
                        .rsplit_once(':')
                        .ok_or_else(|| perr(ln, "gen line needs `: <phi tuple>`"))?;
                    let (slot, src) = lhs
                        .trim()
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr(ln, "gen line needs a slot name and an expression"))?;
                    gens.push((
                        ln,
                        slot.to_string(),
                        src.trim().to_string(),
                        phi.trim().to_string(),
                    ));
                }
                "seed" => seeds.push((ln, rest.to_string())),
                "lift" => {
                    if rest != "drop-last" {
                        return Err(perr(ln, "only `lift drop-last` is supported"));
                    }
                    lift_drop_last = true;
                }
                "modmap" => modmap = Some((ln, rest.to_string())),
                "h2" => h2.push((ln, rest.to_string())),
                "bound" => bounds.push((ln, rest.to_string())),
                "lp" => {
                    lp_mode = match rest {
                        "reals" => LpMode::Reals,
                        "integers" => LpMode::Integers,
                        _ => return Err(perr(ln, "lp must be `reals` or `integers`")),
                    }
                }
                "expect" => {
                    let (what, n) = rest
                        .split_once(char::is_whitespace)
                        .ok_or_else(|| perr(ln, "expect <what> <n>"))?;
                    let n: usize = n
                        .trim()
                        .parse()
                        .map_err(|_| perr(ln, "expected count must be a number"))?;
                    let slot = match what {
                        "fundamentals" => &mut expect.fundamentals,
                        "candidates" => &mut expect.candidates,
                        "automorphisms" => &mut expect.automorphisms,
                        "u25" => &mut expect.u25,
                        "domain" => &mut expect.domain,
                        _ => return Err(perr(ln, format!("unknown expectation {what:?}"))),
                    };
                    *slot = Some(n);
                }
                _ => return Err(perr(ln, format!("unknown key {key:?}"))),
            }
        }

        let name = name.ok_or_else(|| perr(0, "missing `name`"))?;
        let ground = ground.ok_or_else(|| perr(0, "missing `ground`"))?;

        let mut generators = Vec::new();
        for (ln, slot, src, phi) in gens {
            let value = eval_str(&src, &ground).map_err(|e| perr(ln, e.to_string()))?;
            if value.is_zero() {
                return Err(perr(ln, "generator is zero"));
            }
            if let Elem::Rat(r) = &value {
                if !r.is_one_den() {
                    return Err(perr(ln, "generators must be polynomials"));
                }
                if r.num().total_degree() == 0 && src.trim() != "-1" {
                    return Err(perr(ln, "only -1 may be a constant generator"));
                }
            }
            let coords = phi
                .split_whitespace()
                .map(|t| t.parse::<u8>().ok().filter(|c| (1..5).contains(c)))
                .collect::<Option<Vec<u8>>>()
                .ok_or_else(|| perr(ln, "phi image coordinates must be nonzero residues mod 5"))?;
            if generators.iter().any(|g: &Generator| g.slot == slot) {
                return Err(perr(ln, format!("duplicate slot {slot:?}")));
            }
            generators.push(Generator {
                slot,
                source: src,
                value,
                phi: GfTuple(coords),
            });
        }
        if generators.is_empty() {
            return Err(perr(0, "no generators"));
        }
        let width = generators[0].phi.0.len();
        if width == 0 || generators.iter().any(|g| g.phi.0.len() != width) {
            return Err(perr(0, "phi images must share one nonzero width"));
        }
        let minus_one_val = ground.constant(-1);
        let ones: Vec<usize> = (0..generators.len())
            .filter(|&k| generators[k].value.exact_eq(&minus_one_val))
            .collect();
        let minus_one = match ones.as_slice() {
            [k] => *k,
            _ => return Err(perr(0, "exactly one generator must equal -1")),
        };
        if ground == Ground::Gaussian {
            let want = ["2", "i", "1-i"].map(|s| eval_str(s, &ground).unwrap());
            let ok = generators.len() == 4
                && want
                    .iter()
                    .all(|w| generators.iter().any(|g| g.value.exact_eq(w)));
            if !ok {
                return Err(perr(0, "gaussian generators must be -1, 2, i, 1-i"));
            }
        }

        let seeds = seeds
            .into_iter()
            .map(|(ln, s)| {
                eval_str(&s, &ground)
                    .map(|e| (s, e))
                    .map_err(|e| perr(ln, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        if seeds.is_empty() {
            return Err(perr(0, "no seeds"));
        }

        let names = ground.symbol_names();
        let assign = |ln: usize, s: &str| -> Result<Vec<String>> {
            let mut out = vec![None; names.len()];
            for part in s.split_whitespace() {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| perr(ln, "expected symbol=value"))?;
                let j = ground
                    .symbol_index(k)
                    .ok_or_else(|| perr(ln, format!("unknown symbol {k:?}")))?;
                if out[j].replace(v.to_string()).is_some() {
                    return Err(perr(ln, format!("{k} assigned twice")));
                }
            }
            out.into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| perr(ln, "every symbol needs a value"))
        };

        let (mln, mtext) = modmap.ok_or_else(|| perr(0, "missing `modmap`"))?;
        let (p, rest) = mtext
            .split_once(char::is_whitespace)
            .ok_or_else(|| perr(mln, "modmap <prime> <sym=res>..."))?;
        let prime: u64 = p.parse().map_err(|_| perr(mln, "bad prime"))?;
        let symbols = assign(mln, rest)?
            .into_iter()
            .map(|v| match v.as_str() {
                "auto" if ground == Ground::Gaussian => Ok(SymbolResidue::SqrtNegOne),
                _ => v
                    .parse()
                    .map(SymbolResidue::Fixed)
                    .map_err(|_| perr(mln, format!("bad residue {v:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let mod_map = ModMapSpec { prime, symbols };

        let gaussian = Ground::Gaussian;
        let h2_homs = h2
            .into_iter()
            .map(|(ln, s)| {
                let sources = assign(ln, &s)?;
                let images = sources
                    .iter()
                    .map(|src| {
                        match eval_str(src, &gaussian).map_err(|e| perr(ln, e.to_string()))? {
                            Elem::Gauss(g) => Ok(g),
                            Elem::Rat(_) => unreachable!(),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(H2Hom { sources, images })
            })
            .collect::<Result<Vec<_>>>()?;

        let extra_bounds = bounds
            .into_iter()
            .map(|(ln, s)| {
                let w: Vec<&str> = s.split_whitespace().collect();
                let [slot, lo, hi] = w.as_slice() else {
                    return Err(perr(ln, "bound <slot> <lo> <hi>"));
                };
                let k = generators
                    .iter()
                    .position(|g| g.slot == *slot)
                    .ok_or_else(|| perr(ln, format!("unknown slot {slot:?}")))?;
                let lo: i64 = lo.parse().map_err(|_| perr(ln, "bad bound"))?;
                let hi: i64 = hi.parse().map_err(|_| perr(ln, "bad bound"))?;
                if lo > hi {
                    return Err(perr(ln, "empty bound"));
                }
                Ok((k, lo, hi))
            })
            .collect::<Result<Vec<_>>>()?;

        if lift_drop_last && width < 2 {
            return Err(perr(0, "cannot drop the only coordinate"));
        }

        Ok(PartialFieldSpec {
            name,
            ground,
            generators,
            minus_one,
            seeds,
            lift_drop_last,
            mod_map,
            h2_homs,
            extra_bounds,
            lp_mode,
            expect,
        })
    }

    /// Canonical text form; parsing it gives back an equivalent spec.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "name {}", self.name).unwrap();
        match &self.ground {
            Ground::Gaussian => writeln!(s, "ground gaussian").unwrap(),
            Ground::Rational { vars } => writeln!(s, "ground rational {}", vars.join(" ")).unwrap(),
        }
        for g in &self.generators {
            writeln!(s, "gen {} {} : {}", g.slot, g.source, g.phi.spaced()).unwrap();
        }
        for (src, _) in &self.seeds {
            writeln!(s, "seed {src}").unwrap();
        }
        if self.lift_drop_last {
            writeln!(s, "lift drop-last").unwrap();
        }
        let names = self.ground.symbol_names();
        let syms: Vec<String> = names
            .iter()
            .zip(&self.mod_map.symbols)
            .map(|(n, r)| match r {
                SymbolResidue::Fixed(v) => format!("{n}={v}"),
                SymbolResidue::SqrtNegOne => format!("{n}=auto"),
            })
            .collect();
        writeln!(s, "modmap {} {}", self.mod_map.prime, syms.join(" ")).unwrap();
        for h in &self.h2_homs {
            let parts: Vec<String> = names
                .iter()
                .zip(&h.sources)
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            writeln!(s, "h2 {}", parts.join(" ")).unwrap();
        }
        for (k, lo, hi) in &self.extra_bounds {
            writeln!(s, "bound {} {lo} {hi}", self.generators[*k].slot).unwrap();
        }
        let mode = match self.lp_mode {
            LpMode::Reals => "reals",
            LpMode::Integers => "integers",
        };
        writeln!(s, "lp {mode}").unwrap();
        let e = &self.expect;
        for (k, v) in [
            ("fundamentals", e.fundamentals),
            ("candidates", e.candidates),
            ("automorphisms", e.automorphisms),
            ("u25", e.u25),
            ("domain", e.domain),
        ] {
            if let Some(v) = v {
                writeln!(s, "expect {k} {v}").unwrap();
            }
        }
        s
    }

    /// SHA-256 of the canonical text: generator expressions, hom tables and all other inputs.
    pub fn fingerprint_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}
