//! Command dispatch for the `picard` binary. Inputs arrive as text (file
//! contents already read), so every command is a pure function of its
//! arguments and seed.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use picard::cohomology::{
    self, classify_rings, trivialize, ChainComplex, ClassificationProblem, Cochain, CohomologyError, ComplexKind,
};
use picard::composites::random::{random_walk, random_word, WalkConfig};
use picard::composites::{
    canonical_phi, compile_to_kl, equal, evaluate, CompositeError, FormalComposite, MoveKind, Verdict,
};
use picard::group::{FiniteAbelianGroup, GroupError};
use picard::models::{
    self, canonical_between, check_axioms, evaluate_in_model, model_invariants, Coverage, ModelError, ModelSpec,
};
use picard::parse::{parse_composite, parse_word, print_composite, ParseError};
use picard::signs::{
    lr_correction, motivic_skew, realization_correction, Bidegrees, Convention, LrDegrees, LrRule, SignError,
};
use picard::words::{multidegree, Multidegree, TensorWord};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error(transparent)]
    Sign(#[from] SignError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Which sign computation `sign` performs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignKind {
    Lr(LrRule),
    Motivic,
    Realization(Convention),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CohomologyQuery {
    /// `H^k_EM(A;N)`.
    Em(usize),
    /// `H^k(A;N)` from the normalized bar complex.
    Bar(usize),
    /// `H_k(E)` over the integers.
    Homology(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Normalize { word: String },
    Equal { left: String, right: String },
    Eval { script: String },
    Kl { script: String },
    Sign { kind: SignKind, degrees: [Option<String>; 4] },
    Cohomology { a: String, n: Option<String>, query: CohomologyQuery },
    Trivialize { a: String, n: String, alpha: String },
    Classify { a: String, n: String, model: Option<String> },
    ModelCheck { model: String, samples: usize },
    ModelEval { model: String, script: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NotForced,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotForced | Status::Failed => 1,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NotForced => "not-forced",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub result: Value,
    pub text: String,
}

impl Report {
    pub fn to_json(&self) -> String {
        let v = json!({
            "command": self.command,
            "status": self.status.tag(),
            "result": self.result,
        });
        serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.text.clone()
        }
    }
}

/// Exit code for an input error.
pub const INPUT_ERROR: i32 = 2;

/// Shared options.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub gens: Option<usize>,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            gens: None,
            seed: DEFAULT_SEED,
        }
    }
}

fn needed_gens(c: &FormalComposite) -> usize {
    let mut n = c.source.max_generator().map_or(0, |g| g + 1);
    for m in &c.moves {
        let k = match &m.kind {
            MoveKind::Alpha(i) | MoveKind::AlphaHat(i) => i + 1,
            MoveKind::Twist(u, v) => u.max_generator().max(v.max_generator()).map_or(0, |g| g + 1),
            _ => 0,
        };
        n = n.max(k);
    }
    n
}

fn script(text: &str, opts: &Options) -> Result<(FormalComposite, usize), CliError> {
    let c = parse_composite(text, opts.gens)?;
    let n = opts.gens.unwrap_or_else(|| needed_gens(&c).max(1));
    c.validate(n)?;
    Ok((c, n))
}

fn group(text: &str) -> Result<FiniteAbelianGroup, CliError> {
    Ok(text.parse::<FiniteAbelianGroup>()?)
}

fn finite_group(text: &str) -> Result<FiniteAbelianGroup, CliError> {
    let g = group(text)?;
    if !g.is_finite() {
        return Err(CliError::Usage(format!("{g} must be finite here")));
    }
    Ok(g)
}

fn degree_arg(text: &str) -> Result<Multidegree, CliError> {
    let v: Result<Vec<i64>, _> = text.split(',').map(|s| s.trim().parse::<i64>()).collect();
    v.map(Multidegree)
        .map_err(|_| CliError::Usage(format!("`{text}` is not a degree like `2` or `1,-1`")))
}

fn scalar_arg(text: &Option<String>, name: &str) -> Result<Option<i64>, CliError> {
    text.as_ref()
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Usage(format!("--{name} expects an integer")))
        })
        .transpose()
}

fn show_elem(e: &[i64]) -> String {
    if e.len() == 1 {
        e[0].to_string()
    } else {
        format!("({})", e.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
    }
}

fn show_table(a: &FiniteAbelianGroup, c: &Cochain) -> Vec<String> {
    let els = a.elements().expect("finite");
    let size = els.len();
    let mut lines = Vec::new();
    for (pos, v) in c.table.iter().enumerate() {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let mut idx = Vec::with_capacity(c.arity);
        let mut p = pos;
        for _ in 0..c.arity {
            idx.push(p % size);
            p /= size;
        }
        idx.reverse();
        let args: Vec<String> = idx.iter().map(|&i| show_elem(&els[i])).collect();
        lines.push(format!("[{}] = {}", args.join(","), show_elem(v)));
    }
    lines
}

pub fn run(cmd: &Command, opts: &Options) -> Result<Report, CliError> {
    match cmd {
        Command::Normalize { word } => normalize(word, opts),
        Command::Equal { left, right } => equal_cmd(left, right, opts),
        Command::Eval { script: s } => eval_cmd(s, opts),
        Command::Kl { script: s } => kl_cmd(s, opts),
        Command::Sign { kind, degrees } => sign_cmd(kind, degrees),
        Command::Cohomology { a, n, query } => cohomology_cmd(a, n.as_deref(), query),
        Command::Trivialize { a, n, alpha } => trivialize_cmd(a, n, alpha),
        Command::Classify { a, n, model } => classify_cmd(a, n, model.as_deref()),
        Command::ModelCheck { model, samples } => model_check(model, *samples, opts),
        Command::ModelEval { model, script: s } => model_eval(model, s, opts),
    }
}

fn normalize(word: &str, opts: &Options) -> Result<Report, CliError> {
    let w = parse_word(word, opts.gens)?;
    let n = opts.gens.unwrap_or_else(|| w.max_generator().map_or(1, |g| g + 1));
    let phi = canonical_phi(&w, n)?;
    let target = phi.target()?;
    let e = evaluate(&phi, n)?;
    let moves: Vec<String> = phi.moves.iter().map(|m| m.to_string()).collect();
    let text = format!(
        "{}target: {}\ndegree: {}\nevaluation: {}\n",
        print_composite(&phi),
        target,
        multidegree(&w, n),
        e
    );
    Ok(Report {
        command: "normalize",
        status: Status::Ok,
        result: json!({
            "source": w.to_string(),
            "target": target.to_string(),
            "degree": multidegree(&w, n).0,
            "moves": moves,
            "evaluation": e.0,
        }),
        text,
    })
}

fn equal_cmd(left: &str, right: &str, opts: &Options) -> Result<Report, CliError> {
    let (c1, n1) = script(left, opts)?;
    let (c2, n2) = script(right, opts)?;
    let n = n1.max(n2);
    let cmp = equal(&c1, &c2, n)?;
    let status = match cmp.verdict {
        Verdict::ForcedEqual => Status::Ok,
        Verdict::NotForced => Status::NotForced,
    };
    Ok(Report {
        command: "equal",
        status,
        result: json!({
            "verdict": cmp.verdict.to_string(),
            "left": cmp.left.0,
            "right": cmp.right.0,
        }),
        text: format!("{}\nleft: {}\nright: {}\n", cmp.verdict, cmp.left, cmp.right),
    })
}

fn eval_cmd(s: &str, opts: &Options) -> Result<Report, CliError> {
    let (c, n) = script(s, opts)?;
    let target = c.target()?;
    let e = evaluate(&c, n)?;
    Ok(Report {
        command: "eval",
        status: Status::Ok,
        result: json!({
            "source": c.source.to_string(),
            "target": target.to_string(),
            "moves": c.moves.len(),
            "evaluation": e.0,
        }),
        text: format!("{} -> {}\nevaluation: {}\n", c.source, target, e),
    })
}

fn kl_cmd(s: &str, opts: &Options) -> Result<Report, CliError> {
    let (c, n) = script(s, opts)?;
    let (k, subs) = compile_to_kl(&c, n)?;
    let edges: Vec<String> = k.corr.edges().iter().map(|(t, h)| format!("{t}->{h}")).collect();
    let loops: Vec<u64> = (0..n).map(|i| k.loops.count(i)).collect();
    Ok(Report {
        command: "kl",
        status: Status::Ok,
        result: json!({
            "src": k.src.to_string(),
            "dst": k.dst.to_string(),
            "edges": edges,
            "loops": loops,
            "substitutions": subs,
        }),
        text: format!(
            "{}substitutions: {}\n",
            k.to_record(),
            subs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
        ),
    })
}

fn sign_cmd(kind: &SignKind, degrees: &[Option<String>; 4]) -> Result<Report, CliError> {
    let [a, b, c, d] = degrees;
    match kind {
        SignKind::Lr(rule) => {
            let need = |v: &Option<String>, name: &str| {
                v.as_ref()
                    .ok_or_else(|| CliError::Usage(format!("rule {rule} needs --{name}")))
                    .and_then(|t| degree_arg(t))
            };
            let mut deg = LrDegrees::new(&need(a, "a")?, &need(b, "b")?);
            if let Some(t) = c {
                deg = deg.with_c(&degree_arg(t)?);
            }
            if let Some(t) = d {
                deg = deg.with_d(&degree_arg(t)?);
            }
            let s = lr_correction(*rule, &deg)?;
            Ok(Report {
                command: "sign",
                status: Status::Ok,
                result: json!({
                    "rule": rule.tag(),
                    "statement": rule.statement(),
                    "correction": s.to_string(),
                    "exponents": s.0,
                }),
                text: format!("{s}\n"),
            })
        }
        SignKind::Motivic => {
            let get = |v: &Option<String>, name: &str| {
                scalar_arg(v, name)?.ok_or_else(|| CliError::Usage(format!("motivic needs --{name}")))
            };
            let s = motivic_skew(get(a, "a")?, get(b, "b")?, get(c, "c")?, get(d, "d")?);
            Ok(Report {
                command: "sign",
                status: Status::Ok,
                result: json!({"minus_one": s.minus_one, "eps": s.eps}),
                text: format!("{s}\n"),
            })
        }
        SignKind::Realization(conv) => {
            let deg = Bidegrees {
                a: scalar_arg(a, "a")?,
                b: scalar_arg(b, "b")?,
                c: scalar_arg(c, "c")?,
                d: scalar_arg(d, "d")?,
            };
            let s = realization_correction(*conv, &deg)?;
            Ok(Report {
                command: "sign",
                status: Status::Ok,
                result: json!({"convention": conv.to_string(), "sign": s}),
                text: format!("{s}\n"),
            })
        }
    }
}

fn cohomology_cmd(a: &str, n: Option<&str>, query: &CohomologyQuery) -> Result<Report, CliError> {
    let ga = finite_group(a)?;
    let (label, group, reps) = match query {
        CohomologyQuery::Homology(k) => (format!("H_{k}(E; Z)"), cohomology::em_homology(&ga, *k)?, Vec::new()),
        CohomologyQuery::Em(k) | CohomologyQuery::Bar(k) => {
            let gn = finite_group(n.ok_or_else(|| CliError::Usage("coefficient group N is required".into()))?)?;
            let kind = if matches!(query, CohomologyQuery::Em(_)) {
                ComplexKind::EilenbergMacLane
            } else {
                ComplexKind::Bar
            };
            let cx = ChainComplex::new(&ga, kind, true)?;
            let h = cx.cohomology(*k, &gn)?;
            let reps: Vec<Value> = h
                .classes
                .iter()
                .map(|(order, v)| {
                    let values: Vec<String> = cx.bases[*k]
                        .iter()
                        .zip(v)
                        .filter(|(_, x)| x.iter().any(|&y| y != 0))
                        .map(|(s, x)| format!("{} = {}", s.render(&ga), show_elem(x)))
                        .collect();
                    json!({"order": order, "values": values})
                })
                .collect();
            let label = match query {
                CohomologyQuery::Em(_) => format!("H^{k}_EM({ga}; {gn})"),
                _ => format!("H^{k}({ga}; {gn})"),
            };
            (label, h.group, reps)
        }
    };
    let mut text = format!("{label} = {group}\n");
    for (i, r) in reps.iter().enumerate() {
        let _ = writeln!(text, "generator {} (order {}):", i + 1, r["order"]);
        for v in r["values"].as_array().into_iter().flatten() {
            let _ = writeln!(text, "  {}", v.as_str().unwrap_or_default());
        }
    }
    Ok(Report {
        command: "cohomology",
        status: Status::Ok,
        result: json!({
            "group": group.to_string(),
            "invariants": group.moduli(),
            "order": group.order(),
            "representatives": reps,
        }),
        text,
    })
}

fn trivialize_cmd(a: &str, n: &str, alpha: &str) -> Result<Report, CliError> {
    let (ga, gn) = (finite_group(a)?, finite_group(n)?);
    let table = models::parse_table(alpha, "alpha", 3, &ga, &gn)?;
    let alpha = Cochain { arity: 3, table };
    let t = trivialize(&ga, &gn, &alpha)?;
    let count = t.count();
    let mut text = format!("trivializations: {count}\n");
    let particular = t.particular.as_ref().map(|p| show_table(&ga, p));
    match &particular {
        Some(lines) => {
            text.push_str("particular sigma:\n");
            for l in lines {
                let _ = writeln!(text, "  sigma{l}");
            }
        }
        None => text.push_str("alpha is not a coboundary\n"),
    }
    let gens: Vec<Value> = t
        .cocycles
        .iter()
        .map(|(o, c)| json!({"order": o, "values": show_table(&ga, c)}))
        .collect();
    let _ = writeln!(text, "Z^2_norm generators: {}", gens.len());
    Ok(Report {
        command: "trivialize",
        status: if t.particular.is_some() { Status::Ok } else { Status::Failed },
        result: json!({
            "count": count.to_string(),
            "particular": particular,
            "cocycle_generators": gens,
        }),
        text,
    })
}

fn classify_cmd(a: &str, n: &str, model: Option<&str>) -> Result<Report, CliError> {
    let (ga, gn, alpha) = match model {
        Some(text) => {
            let spec: ModelSpec = text.parse()?;
            let m = spec.model;
            if !m.a.is_finite() {
                return Err(CliError::Usage("classification needs a finite A".into()));
            }
            let alpha = Cochain::from_fn(&m.a, &m.n, 3, |x| m.alpha(&x[0], &x[1], &x[2]))?;
            (m.a.clone(), m.n.clone(), Some(alpha))
        }
        None => (finite_group(a)?, finite_group(n)?, None),
    };
    let c = classify_rings(&ClassificationProblem {
        a: ga.clone(),
        n: gn.clone(),
        alpha,
    })?;
    let reps: Vec<Vec<String>> = c.representatives.iter().map(|r| show_table(&ga, r)).collect();
    let mut text = format!(
        "H^2({ga}; {gn}) = {}\nclasses: {}\n",
        c.h2,
        c.representatives.len()
    );
    for (i, r) in reps.iter().enumerate() {
        let _ = writeln!(text, "class {}:", i + 1);
        if r.is_empty() {
            text.push_str("  sigma = 0\n");
        }
        for l in r {
            let _ = writeln!(text, "  sigma{l}");
        }
    }
    Ok(Report {
        command: "classify",
        status: Status::Ok,
        result: json!({
            "h2": c.h2.to_string(),
            "classes": c.representatives.len(),
            "representatives": reps,
        }),
        text,
    })
}

fn model_check(text: &str, samples: usize, opts: &Options) -> Result<Report, CliError> {
    let spec: ModelSpec = text.parse()?;
    let m = &spec.model;
    let coverage = if m.a.is_finite() {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled {
            samples,
            seed: opts.seed,
            bound: 16,
        }
    };
    let axioms = check_axioms(m, coverage)?;
    let n = spec.assignment.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cfg = WalkConfig {
        n,
        max_letters: 6,
        self_twists: true,
        unit_insertions: true,
    };
    let mut endos = Vec::new();
    for _ in 0..20 {
        let w = random_word(&mut rng, n, 1, 4);
        let walk = random_walk(&mut rng, w.clone(), 8, &cfg);
        let back = canonical_between(&walk.target()?, &w, n)?;
        endos.push(walk.then(&back)?);
    }
    let inv_cov = if m.a.is_finite() {
        Coverage::Exhaustive
    } else {
        Coverage::Sampled {
            samples: samples.min(64),
            seed: opts.seed,
            bound: 16,
        }
    };
    let inv = model_invariants(m, &spec.assignment, &endos, inv_cov)?;
    let passed = axioms.passed() && inv.passed();
    let mut out = format!("{m}\n");
    let line = |c: &models::AxiomCheck| {
        format!(
            "{}: {} ({} checked{})\n",
            c.name,
            if c.passed() { "pass" } else { "FAIL" },
            c.checked,
            c.example.as_ref().map(|e| format!(", e.g. {e}")).unwrap_or_default()
        )
    };
    for c in &axioms.checks {
        out.push_str(&line(c));
    }
    for c in [&inv.homomorphism, &inv.two_torsion, &inv.trace_of_identity, &inv.trace_vs_d] {
        out.push_str(&line(c));
    }
    let taus: Vec<String> = inv.taus.iter().map(|t| show_elem(t)).collect();
    let counits: Vec<String> = spec.assignment.counits.iter().map(|t| show_elem(t)).collect();
    let _ = writeln!(out, "tau: {}", taus.join(" "));
    let _ = writeln!(out, "counits: {}", counits.join(" "));
    let checks: Vec<Value> = axioms
        .checks
        .iter()
        .chain([&inv.homomorphism, &inv.two_torsion, &inv.trace_of_identity, &inv.trace_vs_d])
        .map(|c| json!({"name": c.name, "passed": c.passed(), "checked": c.checked, "failures": c.failures}))
        .collect();
    Ok(Report {
        command: "model-check",
        status: if passed { Status::Ok } else { Status::Failed },
        result: json!({
            "model": m.to_string(),
            "exhaustive": axioms.exhaustive,
            "checks": checks,
            "tau": inv.taus,
            "counits": spec.assignment.counits,
        }),
        text: out,
    })
}

fn model_eval(model: &str, s: &str, opts: &Options) -> Result<Report, CliError> {
    let spec: ModelSpec = model.parse()?;
    let gens = opts.gens.or(Some(spec.assignment.len()));
    let (c, n) = script(s, &Options { gens, ..*opts })?;
    let m = &spec.model;
    let value = evaluate_in_model(&c, m, &spec.assignment)?;
    let target = c.target()?;
    let e = evaluate(&c, n)?;
    let mut text = format!("{} -> {}\nvalue: {}\n", c.source, target, show_elem(&value));
    let mut predicted = Value::Null;
    if c.source == TensorWord::Unit && target == TensorWord::Unit {
        let mut p = m.n.zero();
        for i in 0..n {
            if e.get(i) == 1 {
                p = m.n.add(&p, &m.tau(&spec.assignment.objects[i]));
            }
        }
        let _ = writeln!(text, "universal: {e}\npredicted: {}", show_elem(&p));
        predicted = json!(p);
    }
    Ok(Report {
        command: "model-eval",
        status: Status::Ok,
        result: json!({
            "source": c.source.to_string(),
            "target": target.to_string(),
            "value": value,
            "universal": e.0,
            "predicted": predicted,
        }),
        text,
    })
}
