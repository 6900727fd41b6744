//! Staged verification of one field, and of all shipped fields, with text and canonical JSON output.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use serde_json::{json, Value};

use crate::error::Result;
use crate::genesis;
use crate::lift::{
    build_domain, build_lifting_fn, check_inequivalence, enumerate_u25, gf5_u25_tuples, lift_image,
    lifted_pairs_mismatch, local_lift_check, phi_pairs,
};
use crate::pfield::{
    build_fundamental_table, builtin, check_hom_table, Fingerprint, FundamentalTable,
    PartialFieldSpec, BUILTIN_NAMES,
};
use crate::sieve::{
    check_bound_validity, enumerate_candidates, fingerprint_sieve, resolve_fingerprint, spec_box,
    verify_survivors,
};
use crate::symmetry::{automorphism_group, check_closure, SymmetryContext};

/// Deliberate corruption for negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Shift the residue of the sieve survivor at this position by one.
    Fingerprint { index: usize },
}

/// Progress sink: stage name, done, total.
pub type Progress<'a> = &'a (dyn Fn(&str, usize, usize) + Sync);

pub struct ReportOptions<'a> {
    /// Random composition pairs for groups too large to close exhaustively.
    pub closure_samples: usize,
    pub closure_seed: u64,
    /// Groups up to this order are closed over all pairs.
    pub exhaustive_closure_limit: usize,
    pub prime_start: Option<u64>,
    pub fault: Option<Fault>,
    pub progress: Option<Progress<'a>>,
}

impl Default for ReportOptions<'_> {
    fn default() -> Self {
        ReportOptions {
            closure_samples: 200,
            closure_seed: 0x48_7964_7261,
            exhaustive_closure_limit: 24,
            prime_start: None,
            fault: None,
            progress: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub name: &'static str,
    /// Observed count and its expected value, if the spec states one.
    pub counts: BTreeMap<String, (usize, Option<usize>)>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl Stage {
    fn new(name: &'static str) -> Self {
        Stage {
            name,
            counts: BTreeMap::new(),
            violations: Vec::new(),
            notes: Vec::new(),
            seconds: 0.0,
        }
    }

    fn count(&mut self, key: &str, got: usize, want: Option<usize>) {
        if let Some(w) = want {
            if w != got {
                self.violations
                    .push(format!("{key}: found {got}, expected {w}"));
            }
        }
        self.counts.insert(key.to_string(), (got, want));
    }

    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    fn to_json(&self) -> Value {
        let counts: serde_json::Map<String, Value> = self
            .counts
            .iter()
            .map(|(k, (g, w))| (k.clone(), json!({"found": g, "expected": w})))
            .collect();
        json!({
            "name": self.name,
            "pass": self.pass(),
            "counts": counts,
            "violations": self.violations,
            "notes": self.notes,
        })
    }
}

#[derive(Clone, Debug)]
pub struct FieldReport {
    pub field: String,
    pub spec_fingerprint: String,
    pub prime: Option<u64>,
    pub stages: Vec<Stage>,
}

impl FieldReport {
    pub fn pass(&self) -> bool {
        self.stages.iter().all(Stage::pass)
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// The first violation, prefixed by its stage.
    pub fn first_counterexample(&self) -> Option<String> {
        self.stages
            .iter()
            .find_map(|s| s.violations.first().map(|v| format!("{}: {v}", s.name)))
    }

    fn headline(&self, key: &str) -> Option<usize> {
        self.stages
            .iter()
            .find_map(|s| s.counts.get(key).map(|c| c.0))
    }

    pub fn to_json(&self) -> Value {
        let violations: Vec<String> = self
            .stages
            .iter()
            .flat_map(|s| s.violations.iter().map(move |v| format!("{}: {v}", s.name)))
            .collect();
        json!({
            "field": self.field,
            "spec_fingerprint": self.spec_fingerprint,
            "prime": self.prime,
            "counts": {
                "fundamentals": self.headline("fundamentals"),
                "automorphisms": self.headline("automorphisms"),
                "u25_pairs": self.headline("u25_pairs"),
                "domain": self.headline("domain"),
            },
            "stages": self.stages.iter().map(Stage::to_json).collect::<Vec<_>>(),
            "violations": violations,
            "verdict": self.verdict(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}  spec {}  prime {}\n",
            self.field,
            &self.spec_fingerprint[..16],
            self.prime.map_or("-".to_string(), |p| p.to_string())
        );
        for s in &self.stages {
            let counts: Vec<String> = s
                .counts
                .iter()
                .map(|(k, (g, w))| match w {
                    Some(w) => format!("{k} {g}/{w}"),
                    None => format!("{k} {g}"),
                })
                .collect();
            out += &format!(
                "  {:<12} {}  {}  ({:.2}s)\n",
                s.name,
                if s.pass() { "PASS" } else { "FAIL" },
                counts.join(", "),
                s.seconds
            );
            for v in s.violations.iter().take(5) {
                out += &format!("      ! {v}\n");
            }
            if s.violations.len() > 5 {
                out += &format!("      ! ... {} more\n", s.violations.len() - 5);
            }
            for n in &s.notes {
                out += &format!("      - {n}\n");
            }
        }
        out += &format!("  verdict: {}\n", self.verdict());
        out
    }
}

fn timed<T>(mut stage: Stage, f: impl FnOnce(&mut Stage) -> T) -> (Stage, T) {
    let t = Instant::now();
    let r = f(&mut stage);
    stage.seconds = t.elapsed().as_secs_f64();
    (stage, r)
}

fn skipped(name: &'static str, why: &str) -> Stage {
    let mut s = Stage::new(name);
    s.violations.push(format!("not run: {why}"));
    s
}

/// Every check for one field. Errors inside a stage become violations of that stage.
pub fn field_report(spec: &PartialFieldSpec, opts: &ReportOptions) -> FieldReport {
    let mut stages = Vec::new();
    let say = |what: &str| {
        if let Some(p) = opts.progress {
            p(&format!("{} {what}", spec.name), 0, 0);
        }
    };

    // homomorphism table and the sieve, which also fixes the fingerprint prime
    say("sieve");
    let (stage, sieved) = timed(
        Stage::new("sieve"),
        |st| -> Option<(Fingerprint, Vec<_>, Vec<_>)> {
            for v in check_hom_table(spec).unwrap_or_default() {
                st.violations.push(format!(
                    "phi of generator {} ({}) is stored as {} but evaluates to {}",
                    spec.generators[v.generator].slot,
                    spec.generators[v.generator].source,
                    v.stored,
                    v.computed
                        .map_or("an undefined value".to_string(), |t| t.to_string())
                ));
            }
            let (rows, b) = match spec_box(spec) {
                Ok(x) => x,
                Err(e) => {
                    st.violations.push(format!("bounds: {e}"));
                    return None;
                }
            };
            st.notes.push(format!(
                "box {}",
                spec.generators
                    .iter()
                    .zip(&b.ranges)
                    .map(|(g, (l, h))| format!("{}[{l},{h}]", g.slot))
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            let cands = enumerate_candidates(&b, spec.minus_one);
            st.count("candidates", cands.len(), spec.expect.candidates);
            let fp = match resolve_fingerprint(spec, &cands, opts.prime_start) {
                Ok(f) => f,
                Err(e) => {
                    st.violations.push(format!("fingerprint: {e}"));
                    return None;
                }
            };
            match fingerprint_sieve(spec, &fp, &cands) {
                Ok(out) => {
                    st.count("distinct_values", out.distinct, None);
                    st.count("survivors", out.survivors.len(), spec.expect.fundamentals);
                    let mut survivors = out.survivors;
                    if let Some(Fault::Fingerprint { index }) = opts.fault {
                        if let Some(s) = survivors.get_mut(index) {
                            s.residue = (s.residue + 1) % fp.map.prime();
                        }
                    }
                    Some((fp, rows, survivors))
                }
                Err(e) => {
                    st.violations.push(format!("sieve: {e}"));
                    None
                }
            }
        },
    );
    stages.push(stage);
    let prime = sieved.as_ref().map(|s| s.0.map.prime());

    // closure of the seeds, compared with the sieve
    say("table");
    let (stage, table) = timed(
        Stage::new("fundamentals"),
        |st| -> Option<(Fingerprint, FundamentalTable)> {
            let fp = match &sieved {
                Some((fp, _, _)) => fp.clone(),
                None => match Fingerprint::at_prime(spec, spec.mod_map.prime) {
                    Ok(f) => f,
                    Err(e) => {
                        st.violations.push(format!("fingerprint: {e}"));
                        return None;
                    }
                },
            };
            let table = match build_fundamental_table(spec, &fp) {
                Ok(t) => t,
                Err(e) => {
                    st.violations.push(format!("closure of the seeds: {e}"));
                    return None;
                }
            };
            st.count("fundamentals", table.len(), spec.expect.fundamentals);
            if let Some((_, rows, survivors)) = &sieved {
                for v in verify_survivors(spec, &fp, &table, survivors) {
                    st.violations
                        .push(format!("{} at residue {}: {}", v.kind, v.residue, v.detail));
                }
                for b in check_bound_validity(rows, &spec.extra_bounds, &table) {
                    st.violations.push(format!("bound: {b}"));
                }
            }
            Some((fp, table))
        },
    );
    stages.push(stage);
    let Some((fp, table)) = table else {
        for n in ["automorphisms", "u25", "lifting"] {
            stages.push(skipped(n, "no fundamental table"));
        }
        return FieldReport {
            field: spec.name.clone(),
            spec_fingerprint: spec.fingerprint_hex(),
            prime,
            stages,
        };
    };

    say("automorphisms");
    let (stage, ()) = timed(Stage::new("automorphisms"), |st| {
        let ctx = SymmetryContext::new(spec, &fp, &table);
        let progress = |d: usize, t: usize| {
            if let Some(p) = opts.progress {
                p(&format!("{} automorphism prefilter", spec.name), d, t);
            }
        };
        let group = match automorphism_group(&ctx, Some(&progress)) {
            Ok(g) => g,
            Err(e) => {
                st.violations.push(format!("{e}"));
                return;
            }
        };
        st.count("candidates", group.candidates, None);
        st.count("prefiltered", group.prefiltered, None);
        st.count("automorphisms", group.order(), spec.expect.automorphisms);
        let m = spec.width();
        let perms: HashSet<&Vec<usize>> = group.members.iter().map(|a| &a.permutation).collect();
        let sym: usize = (1..=m).product();
        st.count("coordinate_permutations", perms.len(), Some(sym));
        let samples = (group.order() > opts.exhaustive_closure_limit)
            .then_some((opts.closure_samples, opts.closure_seed));
        match check_closure(&ctx, &group, samples) {
            Ok(c) => {
                st.count("compositions", c.pairs_checked, None);
                st.notes.push(if samples.is_some() {
                    "closure sampled".into()
                } else {
                    "closure exhaustive".into()
                });
                st.violations.extend(c.failures);
            }
            Err(e) => st.violations.push(format!("closure: {e}")),
        }
    });
    stages.push(stage);

    say("u25");
    let (stage, hydra_pairs) = timed(Stage::new("u25"), |st| {
        let pairs = enumerate_u25(spec, &fp, &table);
        st.count("u25_pairs", pairs.len(), spec.expect.u25);
        let tuples = gf5_u25_tuples(spec.lift_width());
        st.count("gf5_tuple_pairs", tuples.len(), spec.expect.u25);
        for v in check_inequivalence(&phi_pairs(&table, &pairs)) {
            let x = pairs[v.pair];
            st.violations.push(format!(
                "pair ({}, {}) has equal projections {} and {}",
                table.entries[x.p].value.display(&spec.ground),
                table.entries[x.q].value.display(&spec.ground),
                v.i,
                v.j
            ));
        }
        for v in check_inequivalence(&tuples) {
            st.violations.push(format!(
                "GF(5) pair {} has equal projections {} and {}",
                v.pair, v.i, v.j
            ));
        }
        st.notes.push(format!(
            "inequivalence on phi (width {}), lifting on width {}",
            spec.width(),
            spec.lift_width()
        ));
        pairs
    });
    stages.push(stage);

    say("lifting");
    let (stage, ()) = timed(Stage::new("lifting"), |st| {
        let width = spec.lift_width();
        st.count("domain", build_domain(width).len(), spec.expect.domain);
        let lift = match build_lifting_fn(spec, &table) {
            Ok(l) => l,
            Err(e) => {
                st.violations.push(format!("lifting function: {e}"));
                return;
            }
        };
        for (k, e) in table.entries.iter().enumerate() {
            if lift.lookup(&lift_image(spec, &e.image)) != Some(k) {
                st.violations.push(format!(
                    "round trip fails at {}",
                    e.value.display(&spec.ground)
                ));
            }
        }
        let tuples = gf5_u25_tuples(width);
        let (lifted, bad) = local_lift_check(spec, &fp, &table, &lift, &tuples);
        st.count("lifted_pairs", lifted.len(), spec.expect.u25);
        for b in bad {
            st.violations.push(format!("local lift: {b:?}"));
        }
        let (only_lifted, only_hydra) = lifted_pairs_mismatch(&lifted, &hydra_pairs);
        for x in only_lifted {
            st.violations
                .push(format!("lifted pair {x:?} is not a U25 pair of the field"));
        }
        for x in only_hydra {
            st.violations.push(format!("U25 pair {x:?} is not a lift"));
        }
    });
    stages.push(stage);

    FieldReport {
        field: spec.name.clone(),
        spec_fingerprint: spec.fingerprint_hex(),
        prime,
        stages,
    }
}

/// Report for a shipped field by name.
pub fn builtin_report(name: &str, opts: &ReportOptions) -> Result<FieldReport> {
    Ok(field_report(&builtin(name)?, opts))
}

#[derive(Clone, Debug)]
pub struct VerifyAll {
    pub fields: Vec<FieldReport>,
    pub genesis: std::result::Result<genesis::GenesisReport, String>,
}

pub const SCOPE_NOTE: &str = "Hydra-1 and Hydra-6 are not defined here; only H2-H5 are checked";

impl VerifyAll {
    pub fn pass(&self) -> bool {
        self.fields.iter().all(FieldReport::pass) && self.genesis.as_ref().is_ok_and(|g| g.pass)
    }

    pub fn to_json(&self) -> Value {
        let genesis = match &self.genesis {
            Ok(g) => serde_json::to_value(g).expect("plain data"),
            Err(e) => json!({"error": e, "pass": false}),
        };
        json!({
            "fields": self.fields.iter().map(FieldReport::to_json).collect::<Vec<_>>(),
            "genesis": genesis,
            "notes": [SCOPE_NOTE],
            "verdict": if self.pass() { "PASS" } else { "FAIL" },
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.fields {
            out += &f.to_text();
        }
        match &self.genesis {
            Ok(g) => {
                out += &format!("genesis  {}\n", if g.pass { "PASS" } else { "FAIL" });
                for (k, t) in g.triples.iter().enumerate() {
                    out += &format!("  triple {k}: {}\n", t.join(" "));
                }
                for r in &g.readings {
                    out += &format!(
                        "  s223 = {}: {} relation residuals, {} basis residuals, phi {}\n",
                        r.s223,
                        r.relation_residuals.len(),
                        r.basis_residuals.len(),
                        if r.phi_matches { "matches" } else { "differs" }
                    );
                }
            }
            Err(e) => out += &format!("genesis  FAIL  {e}\n"),
        }
        out += &format!("note: {SCOPE_NOTE}\n");
        out += &format!("verdict: {}\n", if self.pass() { "PASS" } else { "FAIL" });
        out
    }
}

/// All given specs plus the genesis checks.
pub fn verify_specs(specs: &[PartialFieldSpec], opts: &ReportOptions) -> VerifyAll {
    VerifyAll {
        fields: specs.iter().map(|s| field_report(s, opts)).collect(),
        genesis: genesis::verify_solution().map_err(|e| e.to_string()),
    }
}

pub fn verify_all(opts: &ReportOptions) -> Result<VerifyAll> {
    let specs = BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n))
        .collect::<Result<Vec<_>>>()?;
    Ok(verify_specs(&specs, opts))
}

/// Serializes with sorted keys and two-space indentation.
pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}
