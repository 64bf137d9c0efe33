//! Batch front-end: JSON-in/JSON-out subcommands exposing the library's
//! verifications and computations, plus a golden-file regression driver.
//!
//! - Job specs arrive on stdin or through `--job file.json`; every numeric
//!   field is an exact rational string, and reports print exact rationals
//!   back (no floats).
//! - Exit codes: `0` all checks pass, `1` a verification report contains
//!   failures, `2` malformed input.
//! - Output is deterministic for identical job specs: maps iterate in
//!   sorted order and randomized checks take a fixed seed from the job.
//! - `golden <dir>` re-runs every `*.json` job in the directory and
//!   byte-compares against the sibling `*.expected` file.
//! - The environment variable `QEA_DEPTH_CAP` bounds the accepted depth.

use crate::cogroupoid::{locally_finite_closure, verify_cogroupoid_axioms, CogroupoidError};
use crate::contraction::{
    killing_signature, real_form_basis, su_signature_oracle, type_a_table, verify_presentation,
};
use crate::harish_chandra::{central_character, central_element_from, default_test_set, orbit_candidates};
use crate::qea::{AlgebraCtx, AlgElem};
use crate::quantum_space::{
    build_generators, invariant_state, podles_parameters, verify_subalg_relations, TruncatedModule,
};
use crate::root_data::{EpsChar, LambdaChar, RootDatum, Series, Weight};
use crate::scalars::Rat;
use crate::verma::{irreducible_dims, is_unitarizable_up_to, shapovalov_gram, VerdictStatus};
use clap::{Args, Parser, Subcommand};
use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::rc::Rc;
use std::str::FromStr;

/// A batch job: the algebra data shared by every subcommand plus free-form
/// subcommand options. All numbers are exact rational strings.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub series: String,
    pub rank: usize,
    /// Evaluation point for `v = q^(1/D)`; must satisfy `0 < v0 < 1`.
    #[serde(default = "default_v0")]
    pub v0: String,
    /// Node signs of the first character; empty means all `+1`.
    #[serde(default)]
    pub eps: Vec<String>,
    /// Node signs of the second character; empty means all `+1`.
    #[serde(default)]
    pub eta: Vec<String>,
    /// Exponents of the highest-weight character on the fundamental
    /// weights; empty means all zero.
    #[serde(default)]
    pub lambda: Vec<String>,
    #[serde(default)]
    pub depth: i64,
    /// Subcommand name, used by the golden-file driver.
    #[serde(default)]
    pub command: Option<String>,
    /// Subcommand-specific options.
    #[serde(default)]
    pub options: BTreeMap<String, Value>,
}

fn default_v0() -> String {
    "1/2".into()
}

/// Command-line surface: one subcommand per report, plus the golden driver.
#[derive(Parser)]
#[command(
    name = "uqg",
    about = "Exact computations in interpolated quantized enveloping algebras",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Shapovalov Gram blocks for all weights up to the depth.
    Gram(JobArgs),
    /// Positivity scan of the Hermitian form with ranks and any witness.
    Unitary(JobArgs),
    /// Ranks of the irreducible quotient's weight spaces.
    Dims(JobArgs),
    /// Central-character values on the separating test set, with the
    /// candidate exponent characters sharing them.
    Hc(JobArgs),
    /// Central element from the adjoint closure of a torus generator.
    Central(JobArgs),
    /// Dimensions of locally finite adjoint closures of torus generators.
    #[command(name = "adjoint-closure")]
    AdjointClosure(JobArgs),
    /// Quantum homogeneous space: generator relations, two-sphere
    /// parameters, and the invariant state.
    Homspace(JobArgs),
    /// Cogroupoid coassociativity, counit, and antipode laws.
    Axioms(JobArgs),
    /// Contracted Lie algebra: Killing signature and real-form table.
    Contract(JobArgs),
    /// Run every `*.json` job in a directory and byte-compare each report
    /// with the sibling `*.expected` file.
    Golden {
        /// Directory of job/expected pairs.
        dir: PathBuf,
    },
}

#[derive(Args)]
pub struct JobArgs {
    /// Read the job spec from this file instead of stdin.
    #[arg(long)]
    pub job: Option<PathBuf>,
}

/// Everything parsed and validated out of a job spec.
struct Inputs {
    datum: Rc<RootDatum>,
    v0: Rat,
    eps: EpsChar,
    eta: EpsChar,
    lambda: LambdaChar,
    depth: i64,
    options: BTreeMap<String, Value>,
}

/// An input problem: reported on stderr, exit code 2.
#[derive(Debug)]
struct InputError(String);

impl From<String> for InputError {
    fn from(s: String) -> Self {
        InputError(s)
    }
}

fn parse_rat(s: &str) -> Result<Rat, InputError> {
    match s.trim() {
        "+" => Ok(Rat::one()),
        "-" => Ok(-Rat::one()),
        t => Rat::from_str(t).map_err(|e| InputError(format!("bad rational '{s}': {e}"))),
    }
}

fn parse_sign_list(name: &str, given: &[String], rank: usize) -> Result<EpsChar, InputError> {
    if given.is_empty() {
        return Ok(EpsChar::plus(rank));
    }
    if given.len() != rank {
        return Err(InputError(format!(
            "{name} has {} entries, expected {rank}",
            given.len()
        )));
    }
    let values = given.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(EpsChar::from_values(values))
}

fn parse_series(s: &str) -> Result<Series, InputError> {
    match s {
        "A" => Ok(Series::A),
        "B" => Ok(Series::B),
        "C" => Ok(Series::C),
        "D" => Ok(Series::D),
        "G" => Ok(Series::G),
        other => Err(InputError(format!("unknown series '{other}'"))),
    }
}

fn build_inputs(job: &JobSpec) -> Result<Inputs, InputError> {
    let series = parse_series(&job.series)?;
    let datum = RootDatum::build(series, job.rank)
        .map_err(|e| InputError(format!("root datum: {e}")))?;
    let v0 = parse_rat(&job.v0)?;
    if !v0.is_positive() || v0 >= Rat::one() {
        return Err(InputError(format!("v0 = {v0} must satisfy 0 < v0 < 1")));
    }
    if job.depth < 0 {
        return Err(InputError("depth must be nonnegative".into()));
    }
    if let Ok(cap) = std::env::var("QEA_DEPTH_CAP") {
        let cap: i64 = cap
            .parse()
            .map_err(|_| InputError(format!("QEA_DEPTH_CAP = '{cap}' is not an integer")))?;
        if job.depth > cap {
            return Err(InputError(format!(
                "depth {} exceeds QEA_DEPTH_CAP = {cap}",
                job.depth
            )));
        }
    }
    let eps = parse_sign_list("eps", &job.eps, job.rank)?;
    let eta = parse_sign_list("eta", &job.eta, job.rank)?;
    let exps = if job.lambda.is_empty() {
        vec![Rat::zero(); job.rank]
    } else {
        job.lambda.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?
    };
    let lambda = LambdaChar::from_exponents(&datum, exps)
        .map_err(|e| InputError(format!("lambda: {e}")))?;
    Ok(Inputs {
        datum,
        v0,
        eps,
        eta,
        lambda,
        depth: job.depth,
        options: job.options.clone(),
    })
}

fn opt_usize(options: &BTreeMap<String, Value>, key: &str, default: usize) -> Result<usize, InputError> {
    match options.get(key) {
        None => Ok(default),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| InputError(format!("option '{key}' must be a nonnegative integer"))),
        Some(_) => Err(InputError(format!("option '{key}' must be a nonnegative integer"))),
    }
}

fn opt_bool(options: &BTreeMap<String, Value>, key: &str) -> Result<bool, InputError> {
    match options.get(key) {
        None => Ok(false),
        Some(Value::Bool(b)) => Ok(*b),
        Some(_) => Err(InputError(format!("option '{key}' must be a boolean"))),
    }
}

fn opt_nodes(
    options: &BTreeMap<String, Value>,
    key: &str,
    rank: usize,
) -> Result<Vec<usize>, InputError> {
    match options.get(key) {
        None => Ok((0..rank).collect()),
        Some(Value::Array(a)) => {
            let mut out = Vec::new();
            for v in a {
                let n = v
                    .as_u64()
                    .ok_or_else(|| InputError(format!("option '{key}' must list node indices")))?
                    as usize;
                if n >= rank {
                    return Err(InputError(format!("node {n} out of range for rank {rank}")));
                }
                out.push(n);
            }
            Ok(out)
        }
        Some(_) => Err(InputError(format!("option '{key}' must be an array of nodes"))),
    }
}

fn rat_str(r: &Rat) -> String {
    r.to_string()
}

fn weight_json(w: &Weight) -> Value {
    Value::Array(w.0.iter().map(|&c| json!(c)).collect())
}

fn run_gram(inp: &Inputs) -> Result<Value, InputError> {
    let ctx = AlgebraCtx::new(inp.datum.clone(), inp.eps.clone(), inp.eta.clone());
    let mut blocks = Vec::new();
    for alpha in inp.datum.nonneg_root_combos_up_to(inp.depth) {
        let block = shapovalov_gram(&ctx, &inp.lambda, &alpha, inp.depth)
            .map_err(|e| InputError(format!("gram: {e}")))?;
        let m = block
            .eval_at(&inp.v0)
            .map_err(|e| InputError(format!("evaluation: {e}")))?;
        let rank = block
            .rank_at(&inp.v0)
            .map_err(|e| InputError(format!("evaluation: {e}")))?;
        blocks.push(json!({
            "weight": alpha.0,
            "words": block.words,
            "gram": m.iter()
                .map(|row| row.iter().map(rat_str).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "rank": rank,
        }));
    }
    Ok(json!({ "blocks": blocks }))
}

fn run_unitary(inp: &Inputs) -> Result<Value, InputError> {
    let verdict = is_unitarizable_up_to(&inp.datum, &inp.lambda, &inp.eps, inp.depth, &inp.v0)
        .map_err(|e| InputError(format!("unitary: {e}")))?;
    let mut by_height = vec![0usize; (inp.depth + 1) as usize];
    for (alpha, rank) in &verdict.ranks {
        by_height[alpha.height() as usize] += rank;
    }
    let mut out = Map::new();
    out.insert("psd".into(), json!(verdict.status == VerdictStatus::PsdUpToDepth));
    out.insert("ranks".into(), json!(by_height));
    if let Some(w) = &verdict.witness {
        out.insert(
            "witness".into(),
            json!({
                "weight": w.weight.0,
                "vector": w.vector.iter().map(rat_str).collect::<Vec<_>>(),
                "value": rat_str(&w.value),
            }),
        );
    }
    Ok(Value::Object(out))
}

fn run_dims(inp: &Inputs) -> Result<Value, InputError> {
    let ctx = AlgebraCtx::new(inp.datum.clone(), inp.eps.clone(), inp.eta.clone());
    let dims = irreducible_dims(&ctx, &inp.lambda, inp.depth, &inp.v0)
        .map_err(|e| InputError(format!("dims: {e}")))?;
    let total: usize = dims.values().sum();
    let blocks: Vec<Value> = dims
        .iter()
        .map(|(alpha, rank)| json!({ "weight": alpha.0, "rank": rank }))
        .collect();
    Ok(json!({ "blocks": blocks, "total": total }))
}

fn run_hc(inp: &Inputs) -> Result<Value, InputError> {
    let weyl_cap = opt_usize(&inp.options, "weyl_cap", 16384)?;
    let nodes = opt_nodes(&inp.options, "parabolic", inp.datum.rank)?;
    let mut characters = Vec::new();
    for omega in default_test_set(&inp.datum) {
        let value = central_character(&inp.datum, &inp.lambda, &inp.eps, &omega, weyl_cap)
            .map_err(|e| InputError(format!("hc: {e}")))?;
        characters.push(json!({
            "omega": weight_json(&omega),
            "value": value.to_string(),
        }));
    }
    let candidates = orbit_candidates(&inp.datum, &inp.lambda, &nodes, weyl_cap)
        .map_err(|e| InputError(format!("hc: {e}")))?;
    let cand_json: Vec<Value> = candidates
        .iter()
        .map(|c| match c {
            LambdaChar::QPower { exps } => {
                Value::Array(exps.iter().map(|e| json!(rat_str(e))).collect())
            }
            LambdaChar::Values { vals } => {
                Value::Array(vals.iter().map(|v| json!(rat_str(v))).collect())
            }
        })
        .collect();
    Ok(json!({ "characters": characters, "candidates": cand_json }))
}

fn run_central(inp: &Inputs) -> Result<Value, InputError> {
    let node = opt_usize(&inp.options, "node", 0)?;
    if node >= inp.datum.rank {
        return Err(InputError(format!("node {node} out of range")));
    }
    let closure_cap = opt_usize(&inp.options, "closure_cap", 512)?;
    let weyl_cap = opt_usize(&inp.options, "weyl_cap", 16384)?;
    let omega = Weight::fundamental(inp.datum.rank, node);
    match central_element_from(&inp.datum, &inp.eps, &omega, closure_cap, weyl_cap) {
        Ok(elem) => Ok(json!({
            "node": node,
            "terms": elem.terms.len(),
            "failures": Vec::<String>::new(),
        })),
        Err(e) => Ok(json!({
            "node": node,
            "failures": [format!("central element: {e}")],
        })),
    }
}

fn run_adjoint_closure(inp: &Inputs) -> Result<Value, InputError> {
    let cap = opt_usize(&inp.options, "cap", 512)?;
    let positive = opt_bool(&inp.options, "positive")?;
    let ctx = AlgebraCtx::new(inp.datum.clone(), inp.eps.clone(), inp.eta.clone());
    let rank = inp.datum.rank;
    let mut dims = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for r in 0..rank {
        let scale = if positive { 4 } else { -4 };
        let seed = AlgElem::k_point(&ctx, Weight::fundamental(rank, r).scale(scale));
        match locally_finite_closure(&seed, cap) {
            Ok(res) => {
                if positive {
                    failures.push(format!(
                        "closure of node {r} stabilized at {} under the raising direction",
                        res.dim
                    ));
                }
                dims.push(json!({ "node": r, "dim": res.dim }));
            }
            Err(CogroupoidError::CapExceeded { cap, reached }) => {
                if positive {
                    dims.push(json!({ "node": r, "exceeded_cap": true, "reached": reached }));
                } else {
                    failures.push(format!(
                        "closure of node {r} exceeded cap {cap} at dimension {reached}"
                    ));
                }
            }
            Err(e) => return Err(InputError(format!("closure: {e}"))),
        }
    }
    Ok(json!({ "cap": cap, "dims": dims, "failures": failures }))
}

fn run_homspace(inp: &Inputs) -> Result<Value, InputError> {
    // The homogeneous-space constructions live over the star algebra, whose
    // second character index is all-ones.
    let ctx = AlgebraCtx::new(inp.datum.clone(), inp.eps.clone(), EpsChar::plus(inp.datum.rank));
    let module = TruncatedModule::build(&ctx, &inp.lambda, &inp.v0, inp.depth)
        .map_err(|e| InputError(format!("homspace: {e}")))?;
    let gens = build_generators(&module).map_err(|e| InputError(format!("homspace: {e}")))?;
    let report = verify_subalg_relations(&module)
        .map_err(|e| InputError(format!("homspace: {e}")))?;
    let mut podles = Vec::new();
    for r in 0..inp.datum.rank {
        let p = podles_parameters(&module, &gens, r)
            .map_err(|e| InputError(format!("homspace: {e}")))?;
        podles.push(json!({
            "node": p.node,
            "w": rat_str(&p.w),
            "t": rat_str(&p.t),
            "regime": p.regime,
            "interpretation": p.interpretation,
        }));
    }
    let mut out = Map::new();
    out.insert("dim".into(), json!(module.dim()));
    out.insert("complete".into(), json!(module.complete));
    out.insert(
        "relations".into(),
        json!({ "checked": report.checked, "failures": report.failures }),
    );
    out.insert("podles".into(), Value::Array(podles));
    if module.complete {
        let mut phi_z = Vec::new();
        for z in &gens.z {
            let val = invariant_state(&module, &gens, z)
                .map_err(|e| InputError(format!("homspace: {e}")))?;
            phi_z.push(json!(rat_str(&val)));
        }
        out.insert("phi_z".into(), Value::Array(phi_z));
    }
    Ok(Value::Object(out))
}

fn run_axioms(inp: &Inputs) -> Result<Value, InputError> {
    let samples = opt_usize(&inp.options, "samples", 50)?;
    let max_len = opt_usize(&inp.options, "max_len", 4)?;
    let seed = opt_usize(&inp.options, "seed", 0)? as u64;
    let rank = inp.datum.rank;
    let mu = match inp.options.get("mu") {
        Some(Value::Array(a)) => {
            let strs: Vec<String> =
                a.iter().map(|v| v.as_str().unwrap_or_default().to_string()).collect();
            parse_sign_list("mu", &strs, rank)?
        }
        None => EpsChar::plus(rank),
        Some(_) => return Err(InputError("option 'mu' must be an array of rationals".into())),
    };
    let nu = match inp.options.get("nu") {
        Some(Value::Array(a)) => {
            let strs: Vec<String> =
                a.iter().map(|v| v.as_str().unwrap_or_default().to_string()).collect();
            parse_sign_list("nu", &strs, rank)?
        }
        None => EpsChar::plus(rank),
        Some(_) => return Err(InputError("option 'nu' must be an array of rationals".into())),
    };
    let ctx = AlgebraCtx::new(inp.datum.clone(), inp.eps.clone(), inp.eta.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = verify_cogroupoid_axioms(&ctx, &mu, &nu, samples, max_len, &mut rng);
    Ok(json!({ "checked": report.checked, "failures": report.failures }))
}

fn run_contract(job: &JobSpec, inp: &Inputs) -> Result<Value, InputError> {
    let series = parse_series(&job.series)?;
    if job.eps.is_empty() {
        let rows = type_a_table(inp.datum.rank)
            .map_err(|e| InputError(format!("contract: {e}")))?;
        let table: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "eps": r.eps,
                    "signature": [r.signature.0, r.signature.1, r.signature.2],
                    "form": r.form,
                })
            })
            .collect();
        return Ok(json!({ "table": table }));
    }
    let eps: Vec<Rat> = inp.eps.values.clone();
    let alg = real_form_basis(series, inp.datum.rank, &eps)
        .map_err(|e| InputError(format!("contract: {e}")))?;
    let sig = killing_signature(&alg);
    let mut out = Map::new();
    out.insert("signature".into(), json!([sig.0, sig.1, sig.2]));
    let mut failures: Vec<String> = Vec::new();
    if let Ok(oracle) = su_signature_oracle(inp.datum.rank, &eps) {
        let (p, q) = split_from_signs(&eps);
        let form = if p == 0 {
            format!("su({})", inp.datum.rank + 1)
        } else {
            format!("su({p},{q})")
        };
        out.insert("form".into(), json!(form));
        if oracle != sig {
            failures.push(format!(
                "computed signature {sig:?} disagrees with the split-form value {oracle:?}"
            ));
        }
    }
    let presentation = verify_presentation(series, inp.datum.rank, &eps)
        .map_err(|e| InputError(format!("contract: {e}")))?;
    failures.extend(presentation.failures.iter().cloned());
    if !failures.is_empty() {
        out.insert("failures".into(), json!(failures));
    }
    Ok(Value::Object(out))
}

/// Boundary-sign split used for naming the real form.
fn split_from_signs(eps: &[Rat]) -> (usize, usize) {
    let mut sigma = true;
    let mut p = 0usize;
    for e in eps {
        if e.is_negative() {
            sigma = !sigma;
        }
        if !sigma {
            p += 1;
        }
    }
    (p, eps.len() + 1 - p)
}

/// Whether any `failures` array anywhere in the report is non-empty.
fn has_failures(v: &Value) -> bool {
    match v {
        Value::Object(map) => map.iter().any(|(k, val)| {
            if k == "failures" {
                matches!(val, Value::Array(a) if !a.is_empty())
            } else {
                has_failures(val)
            }
        }),
        Value::Array(items) => items.iter().any(has_failures),
        _ => false,
    }
}

fn read_job(args: &JobArgs) -> Result<JobSpec, InputError> {
    let text = match &args.job {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| InputError(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    parse_job(&text)
}

fn parse_job(text: &str) -> Result<JobSpec, InputError> {
    serde_json::from_str(text).map_err(|e| InputError(format!("bad job spec: {e}")))
}

/// Run one named subcommand against a parsed job spec.
pub fn run_command(name: &str, job: &JobSpec) -> Result<Value, String> {
    let inner = |job: &JobSpec| -> Result<Value, InputError> {
        let inp = build_inputs(job)?;
        match name {
            "gram" => run_gram(&inp),
            "unitary" => run_unitary(&inp),
            "dims" => run_dims(&inp),
            "hc" => run_hc(&inp),
            "central" => run_central(&inp),
            "adjoint-closure" => run_adjoint_closure(&inp),
            "homspace" => run_homspace(&inp),
            "axioms" => run_axioms(&inp),
            "contract" => run_contract(job, &inp),
            other => Err(InputError(format!("unknown subcommand '{other}'"))),
        }
    };
    inner(job).map_err(|InputError(msg)| msg)
}

fn run_golden(dir: &Path) -> Result<(Value, i32), InputError> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| InputError(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|r| r.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(InputError(format!("no *.json jobs in {}", dir.display())));
    }
    let mut results = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for path in &entries {
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
        let job = parse_job(&text)?;
        let command = job
            .command
            .clone()
            .ok_or_else(|| InputError(format!("{name}: golden jobs need a 'command' field")))?;
        let expected_path = path.with_extension("expected");
        let expected = std::fs::read_to_string(&expected_path).map_err(|e| {
            InputError(format!("cannot read {}: {e}", expected_path.display()))
        })?;
        match run_command(&command, &job) {
            Ok(report) => {
                let rendered = format!("{report}\n");
                let ok = rendered == expected;
                if !ok {
                    failures.push(format!("{name}: report differs from {}", expected_path.display()));
                }
                results.push(json!({ "job": name, "ok": ok }));
            }
            Err(msg) => {
                failures.push(format!("{name}: {msg}"));
                results.push(json!({ "job": name, "ok": false }));
            }
        }
    }
    let code = i32::from(!failures.is_empty());
    Ok((json!({ "results": results, "failures": failures }), code))
}

/// Entry point: returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let (name, args) = match &cli.cmd {
        Cmd::Gram(a) => ("gram", a),
        Cmd::Unitary(a) => ("unitary", a),
        Cmd::Dims(a) => ("dims", a),
        Cmd::Hc(a) => ("hc", a),
        Cmd::Central(a) => ("central", a),
        Cmd::AdjointClosure(a) => ("adjoint-closure", a),
        Cmd::Homspace(a) => ("homspace", a),
        Cmd::Axioms(a) => ("axioms", a),
        Cmd::Contract(a) => ("contract", a),
        Cmd::Golden { dir } => {
            return match run_golden(dir) {
                Ok((report, code)) => {
                    println!("{report}");
                    code
                }
                Err(InputError(msg)) => {
                    eprintln!("error: {msg}");
                    2
                }
            };
        }
    };
    let job = match read_job(args) {
        Ok(j) => j,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    match run_command(name, &job) {
        Ok(report) => {
            println!("{report}");
            i32::from(has_failures(&report))
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(text: &str) -> JobSpec {
        parse_job(text).unwrap()
    }

    #[test]
    fn unitary_report_matches_the_rank_scan() {
        let report = run_command(
            "unitary",
            &job(r#"{"series":"A","rank":1,"eps":["1"],"lambda":["1/2"],"depth":6}"#),
        )
        .unwrap();
        assert_eq!(
            report.to_string(),
            r#"{"psd":true,"ranks":[1,1,1,0,0,0,0]}"#
        );
    }

    #[test]
    fn contract_report_names_the_real_form() {
        let report = run_command(
            "contract",
            &job(r#"{"series":"A","rank":2,"eps":["-1","1"]}"#),
        )
        .unwrap();
        assert_eq!(report["form"], "su(2,1)");
        assert_eq!(report["signature"], json!([4, 4, 0]));
        assert!(!has_failures(&report));
    }

    #[test]
    fn axioms_report_is_clean_and_seeded() {
        let spec = r#"{"series":"A","rank":1,"depth":0,"options":{"samples":5,"max_len":3}}"#;
        let a = run_command("axioms", &job(spec)).unwrap();
        let b = run_command("axioms", &job(spec)).unwrap();
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a["failures"], json!([]));
    }

    #[test]
    fn bad_inputs_are_rejected_with_diagnostics() {
        assert!(run_command("unitary", &job(r#"{"series":"E","rank":1}"#)).is_err());
        assert!(run_command(
            "unitary",
            &job(r#"{"series":"A","rank":1,"v0":"3/2"}"#)
        )
        .is_err());
        assert!(run_command(
            "unitary",
            &job(r#"{"series":"A","rank":1,"depth":-1}"#)
        )
        .is_err());
        assert!(parse_job(r#"{"series":"A","rank":1,"unknown":3}"#).is_err());
    }

    #[test]
    fn failure_scan_sees_nested_reports() {
        assert!(!has_failures(&json!({"failures": []})));
        assert!(has_failures(&json!({"inner": {"failures": ["x"]}})));
        assert!(has_failures(&json!([{"failures": ["x"]}])));
    }
}
