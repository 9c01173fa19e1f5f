//! Finite (and formula-backed) symmetric monoidal categories `C[A,N]`:
//! objects are the elements of an abelian group `A`, every object has
//! endomorphism group `N`, and the structure maps are cochains
//! `α: A^3 -> N`, `β: A^2 -> N`.
//!
//! Reading convention: the associator `(a⊗b)⊗c -> a⊗(b⊗c)` has value
//! `α(a,b,c)` and the twist `a⊗b -> b⊗a` has value `β(b,a) = -β(a,b)`.
//! With it, the pentagon and the two hexagons are exactly the vanishing of
//! `(α,β)` on the four degree-4 boundaries of the Eilenberg-MacLane
//! complex.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composites::{
    canonical_phi, subword, CompositeError, FormalComposite, MoveKind, UnitorSide,
};
use crate::group::{Elem, FiniteAbelianGroup, GroupError};
use crate::words::{multidegree, TensorWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error("cannot enumerate {0}; supply a sampling bound")]
    NeedsSampling(String),
    #[error("cochain table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("assignment covers {got} generators, composite needs {need}")]
    AssignmentSize { got: usize, need: usize },
    #[error("model axioms were not verified")]
    Unverified,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Closed-form models on possibly infinite `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    /// `α = 0`, `β = 0`.
    Strict,
    /// `A = Z`, `N = Z/2` (read multiplicatively as `±1`), `α = 0`,
    /// `β(m,n) = mn mod 2`: one-dimensional graded vector spaces with the
    /// Koszul sign.
    GradedLine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backing {
    /// Row-major tables over the index order of `A`.
    Table { alpha: Vec<Elem>, beta: Vec<Elem> },
    Formula(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedSMC {
    pub a: FiniteAbelianGroup,
    pub n: FiniteAbelianGroup,
    pub backing: Backing,
}

impl ExtendedSMC {
    /// Builds a table-backed model by evaluating `alpha` and `beta` on all
    /// of `A`.
    pub fn from_fns(
        a: FiniteAbelianGroup,
        n: FiniteAbelianGroup,
        alpha: impl Fn(&[i64], &[i64], &[i64]) -> Elem,
        beta: impl Fn(&[i64], &[i64]) -> Elem,
    ) -> Result<Self, ModelError> {
        let els = a.elements()?;
        let mut at = Vec::with_capacity(els.len().pow(3));
        for x in &els {
            for y in &els {
                for z in &els {
                    at.push(n.reduced(alpha(x, y, z)));
                }
            }
        }
        let mut bt = Vec::with_capacity(els.len().pow(2));
        for x in &els {
            for y in &els {
                bt.push(n.reduced(beta(x, y)));
            }
        }
        Ok(ExtendedSMC {
            a,
            n,
            backing: Backing::Table { alpha: at, beta: bt },
        })
    }

    pub fn from_tables(
        a: FiniteAbelianGroup,
        n: FiniteAbelianGroup,
        alpha: Vec<Elem>,
        beta: Vec<Elem>,
    ) -> Result<Self, ModelError> {
        let size = a.order().ok_or_else(|| GroupError::Infinite(a.to_string()))? as usize;
        if alpha.len() != size.pow(3) {
            return Err(ModelError::TableSize {
                got: alpha.len(),
                expected: size.pow(3),
            });
        }
        if beta.len() != size.pow(2) {
            return Err(ModelError::TableSize {
                got: beta.len(),
                expected: size.pow(2),
            });
        }
        for v in alpha.iter().chain(&beta) {
            n.check(v)?;
        }
        let backing = Backing::Table {
            alpha: alpha.into_iter().map(|v| n.reduced(v)).collect(),
            beta: beta.into_iter().map(|v| n.reduced(v)).collect(),
        };
        Ok(ExtendedSMC { a, n, backing })
    }

    pub fn strict(a: FiniteAbelianGroup, n: FiniteAbelianGroup) -> Self {
        ExtendedSMC {
            a,
            n,
            backing: Backing::Formula(Formula::Strict),
        }
    }

    pub fn graded_line() -> Self {
        ExtendedSMC {
            a: FiniteAbelianGroup::integers(),
            n: FiniteAbelianGroup::cyclic(2),
            backing: Backing::Formula(Formula::GradedLine),
        }
    }

    pub fn alpha(&self, x: &[i64], y: &[i64], z: &[i64]) -> Elem {
        match &self.backing {
            Backing::Table { alpha, .. } => {
                let s = self.size();
                alpha[(self.a.index_of(x) * s + self.a.index_of(y)) * s + self.a.index_of(z)].clone()
            }
            Backing::Formula(_) => self.n.zero(),
        }
    }

    pub fn beta(&self, x: &[i64], y: &[i64]) -> Elem {
        match &self.backing {
            Backing::Table { beta, .. } => beta[self.a.index_of(x) * self.size() + self.a.index_of(y)].clone(),
            Backing::Formula(Formula::Strict) => self.n.zero(),
            Backing::Formula(Formula::GradedLine) => self.n.reduced(vec![x[0] * y[0]]),
        }
    }

    /// Value of the twist `x⊗y -> y⊗x`.
    pub fn twist(&self, x: &[i64], y: &[i64]) -> Elem {
        self.n.neg(&self.beta(x, y))
    }

    /// `τ(x) = β(x,x)`, the commuter of the object `x`.
    pub fn tau(&self, x: &[i64]) -> Elem {
        self.beta(x, x)
    }

    fn size(&self) -> usize {
        self.a.order().unwrap_or(0) as usize
    }

    pub fn is_table(&self) -> bool {
        matches!(self.backing, Backing::Table { .. })
    }
}

/// Objects and duality data for the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorAssignment {
    /// Object `a_i` of each generator.
    pub objects: Vec<Elem>,
    /// Value `u_i` of the unit `S -> Xi^-1 ⊗ Xi`.
    pub units: Vec<Elem>,
    /// Value `û_i` of the counit `Xi ⊗ Xi^-1 -> S`.
    pub counits: Vec<Elem>,
}

impl GeneratorAssignment {
    /// Derives the counits from the units in a verified model.
    pub fn new(m: &ExtendedSMC, objects: Vec<Elem>, units: Vec<Elem>) -> Result<Self, ModelError> {
        for x in &objects {
            m.a.check(x)?;
        }
        for u in &units {
            m.n.check(u)?;
        }
        let counits = objects
            .iter()
            .zip(&units)
            .map(|(x, u)| derive_alphahat(m, x, u))
            .collect();
        Ok(GeneratorAssignment {
            objects,
            units,
            counits,
        })
    }

    /// All units zero.
    pub fn with_zero_units(m: &ExtendedSMC, objects: Vec<Elem>) -> Result<Self, ModelError> {
        let units = vec![m.n.zero(); objects.len()];
        Self::new(m, objects, units)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Object of a word: `Σ deg_i(w) a_i`.
    pub fn object(&self, m: &ExtendedSMC, w: &TensorWord) -> Elem {
        let d = multidegree(w, self.len());
        let mut acc = m.a.zero();
        for (k, x) in d.0.iter().zip(&self.objects) {
            acc = m.a.add(&acc, &m.a.scale(*k, x));
        }
        acc
    }
}

/// The counit value making the zig-zag
/// `X -> X⊗S -> X⊗(Y⊗X) -> (X⊗Y)⊗X -> S⊗X -> X` the identity:
/// `û = α(x,-x,x) - u`.
pub fn derive_alphahat(m: &ExtendedSMC, x: &[i64], u: &[i64]) -> Elem {
    let nx = m.a.neg(x);
    m.n.sub(&m.alpha(x, &nx, x), u)
}

/// Value of the second zig-zag `Y -> S⊗Y -> (Y⊗X)⊗Y -> Y⊗(X⊗Y) -> Y⊗S -> Y`.
pub fn second_triangle(m: &ExtendedSMC, x: &[i64], u: &[i64], uhat: &[i64]) -> Elem {
    let nx = m.a.neg(x);
    let v = m.n.add(u, &m.alpha(&nx, x, &nx));
    m.n.add(&v, uhat)
}

/// Sum of the move values of a composite.
pub fn evaluate_in_model(
    c: &FormalComposite,
    m: &ExtendedSMC,
    asg: &GeneratorAssignment,
) -> Result<Elem, ModelError> {
    let need = c.source.max_generator().map_or(0, |g| g + 1).max(
        c.moves
            .iter()
            .filter_map(|mv| match &mv.kind {
                MoveKind::Alpha(i) | MoveKind::AlphaHat(i) => Some(i + 1),
                MoveKind::Twist(u, v) => u.max_generator().max(v.max_generator()).map(|g| g + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0),
    );
    if need > asg.len() {
        return Err(ModelError::AssignmentSize {
            got: asg.len(),
            need,
        });
    }
    let mut total = m.n.zero();
    let mut failure = None;
    c.replay(|_, w, mv| {
        if failure.is_some() {
            return;
        }
        let Some(local) = subword(w, &mv.position) else {
            failure = Some(());
            return;
        };
        let obj = |x: &TensorWord| asg.object(m, x);
        let value = match &mv.kind {
            MoveKind::Assoc => {
                let parts = if mv.inverted {
                    match local {
                        TensorWord::Tensor(p, r) => match &**r {
                            TensorWord::Tensor(q, s) => Some((obj(p), obj(q), obj(s))),
                            _ => None,
                        },
                        _ => None,
                    }
                } else {
                    match local {
                        TensorWord::Tensor(l, s) => match &**l {
                            TensorWord::Tensor(p, q) => Some((obj(p), obj(q), obj(s))),
                            _ => None,
                        },
                        _ => None,
                    }
                };
                parts.map(|(x, y, z)| m.alpha(&x, &y, &z))
            }
            MoveKind::Unitor(UnitorSide::Left) | MoveKind::Unitor(UnitorSide::Right) => Some(m.n.zero()),
            MoveKind::Twist(u, v) => Some(m.twist(&obj(u), &obj(v))),
            MoveKind::Alpha(i) => Some(asg.units[*i].clone()),
            MoveKind::AlphaHat(i) => Some(asg.counits[*i].clone()),
        };
        match value {
            Some(v) => {
                let v = if mv.inverted { m.n.neg(&v) } else { v };
                total = m.n.add(&total, &v);
            }
            None => failure = Some(()),
        }
    })?;
    Ok(total)
}

/// Outcome of one family of axiom instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub example: Option<String>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// How to choose objects when checking axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// All tuples; requires finite `A`.
    Exhaustive,
    /// `samples` random tuples per axiom, drawn with the given seed; entries
    /// of infinite factors range over `-bound..=bound`.
    Sampled { samples: usize, seed: u64, bound: i64 },
}

fn random_elem(m: &ExtendedSMC, rng: &mut ChaCha8Rng, bound: i64) -> Elem {
    m.a.moduli()
        .iter()
        .map(|&q| {
            if q == 0 {
                rng.gen_range(-bound..=bound)
            } else {
                rng.gen_range(0..q as i64)
            }
        })
        .collect()
}

/// Checks the pentagon, both hexagons, normalization (unit) and symmetry
/// by evaluating each diagram in the model.
pub fn check_axioms(m: &ExtendedSMC, coverage: Coverage) -> Result<AxiomReport, ModelError> {
    let tuples: Box<dyn Fn(usize) -> Vec<Vec<Elem>>> = match coverage {
        Coverage::Exhaustive => {
            let els = m
                .a
                .elements()
                .map_err(|_| ModelError::NeedsSampling(m.a.to_string()))?;
            Box::new(move |k| {
                let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
                for _ in 0..k {
                    out = out
                        .into_iter()
                        .flat_map(|t| {
                            els.iter().map(move |e| {
                                let mut t2 = t.clone();
                                t2.push(e.clone());
                                t2
                            })
                        })
                        .collect();
                }
                out
            })
        }
        Coverage::Sampled { samples, seed, bound } => {
            let mm = m.clone();
            Box::new(move |k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                (0..samples)
                    .map(|_| (0..k).map(|_| random_elem(&mm, &mut rng, bound)).collect())
                    .collect()
            })
        }
    };
    let (a, n) = (&m.a, &m.n);
    let mut checks = Vec::new();
    let mut run = |name: &str, k: usize, lhs_minus_rhs: &dyn Fn(&[Elem]) -> Elem| {
        let mut check = AxiomCheck {
            name: name.to_string(),
            checked: 0,
            failures: 0,
            example: None,
        };
        for t in tuples(k) {
            check.checked += 1;
            let v = lhs_minus_rhs(&t);
            if !n.is_zero(&v) {
                check.failures += 1;
                if check.example.is_none() {
                    check.example = Some(format!("{t:?} -> {v:?}"));
                }
            }
        }
        checks.push(check);
    };
    let add = |x: &[i64], y: &[i64]| a.add(x, y);
    let sum = |vs: &[(i64, Elem)]| {
        vs.iter()
            .fold(n.zero(), |acc, (k, v)| n.add(&acc, &n.scale(*k, v)))
    };
    run("pentagon", 4, &|t| {
        let (x, y, z, w) = (&t[0], &t[1], &t[2], &t[3]);
        sum(&[
            (1, m.alpha(&add(x, y), z, w)),
            (1, m.alpha(x, y, &add(z, w))),
            (-1, m.alpha(x, y, z)),
            (-1, m.alpha(x, &add(y, z), w)),
            (-1, m.alpha(y, z, w)),
        ])
    });
    // (x⊗y)⊗z -> x⊗(y⊗z) -> (y⊗z)⊗x -> y⊗(z⊗x)
    //   = (x⊗y)⊗z -> (y⊗x)⊗z -> y⊗(x⊗z) -> y⊗(z⊗x)
    run("hexagon-1", 3, &|t| {
        let (x, y, z) = (&t[0], &t[1], &t[2]);
        sum(&[
            (1, m.alpha(x, y, z)),
            (1, m.twist(x, &add(y, z))),
            (1, m.alpha(y, z, x)),
            (-1, m.twist(x, y)),
            (-1, m.alpha(y, x, z)),
            (-1, m.twist(x, z)),
        ])
    });
    // x⊗(y⊗z) -> (x⊗y)⊗z -> z⊗(x⊗y) -> (z⊗x)⊗y
    //   = x⊗(y⊗z) -> x⊗(z⊗y) -> (x⊗z)⊗y -> (z⊗x)⊗y
    run("hexagon-2", 3, &|t| {
        let (x, y, z) = (&t[0], &t[1], &t[2]);
        sum(&[
            (-1, m.alpha(x, y, z)),
            (1, m.twist(&add(x, y), z)),
            (-1, m.alpha(z, x, y)),
            (-1, m.twist(y, z)),
            (1, m.alpha(x, z, y)),
            (-1, m.twist(x, z)),
        ])
    });
    let zero = a.zero();
    run("unit", 2, &|t| {
        let (x, y) = (&t[0], &t[1]);
        // Every structure map touching the unit object is the identity.
        let vals = [
            m.alpha(&zero, x, y),
            m.alpha(x, &zero, y),
            m.alpha(x, y, &zero),
            m.beta(&zero, x),
            m.beta(x, &zero),
        ];
        vals.iter()
            .find(|v| !n.is_zero(v))
            .cloned()
            .unwrap_or_else(|| n.zero())
    });
    run("symmetry", 2, &|t| n.add(&m.beta(&t[0], &t[1]), &m.beta(&t[1], &t[0])));
    Ok(AxiomReport {
        exhaustive: matches!(coverage, Coverage::Exhaustive),
        checks,
    })
}

/// In-model facts about the commuter `τ(x) = β(x,x)` and traces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// `τ(x) + τ(y) = τ(x+y)` on all pairs checked.
    pub homomorphism: AxiomCheck,
    /// `2τ(x) = 0`.
    pub two_torsion: AxiomCheck,
    /// Closed trace composites of generator identities evaluate to `τ(a_i)`.
    pub trace_of_identity: AxiomCheck,
    /// `tr(f) = τ(object) + D(f)` on trace composites of endomorphisms.
    pub trace_vs_d: AxiomCheck,
    pub taus: Vec<Elem>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.homomorphism.passed()
            && self.two_torsion.passed()
            && self.trace_of_identity.passed()
            && self.trace_vs_d.passed()
    }
}

/// Checks the commuter invariants over all objects (finite `A`) or a
/// sample, plus trace relations for the supplied endomorphisms.
pub fn model_invariants(
    m: &ExtendedSMC,
    asg: &GeneratorAssignment,
    endomorphisms: &[FormalComposite],
    coverage: Coverage,
) -> Result<InvariantReport, ModelError> {
    let objs: Vec<Elem> = match coverage {
        Coverage::Exhaustive => m.a.elements().map_err(|_| ModelError::NeedsSampling(m.a.to_string()))?,
        Coverage::Sampled { samples, seed, bound } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| random_elem(m, &mut rng, bound)).collect()
        }
    };
    let mk = |name: &str| AxiomCheck {
        name: name.to_string(),
        checked: 0,
        failures: 0,
        example: None,
    };
    let note = |c: &mut AxiomCheck, ok: bool, what: String| {
        c.checked += 1;
        if !ok {
            c.failures += 1;
            c.example.get_or_insert(what);
        }
    };
    let n = &m.n;
    let mut hom = mk("tau-homomorphism");
    let mut tors = mk("tau-two-torsion");
    for x in &objs {
        let tx = m.tau(x);
        note(&mut tors, n.is_zero(&n.scale(2, &tx)), format!("{x:?}"));
        for y in &objs {
            let lhs = n.add(&tx, &m.tau(y));
            let rhs = m.tau(&m.a.add(x, y));
            note(&mut hom, n.is_zero(&n.sub(&lhs, &rhs)), format!("{x:?}, {y:?}"));
        }
    }
    let nn = asg.len();
    let mut tr_id = mk("trace-of-identity");
    for i in 0..nn {
        let tr = crate::composites::trace_composite(&FormalComposite::identity(TensorWord::Gen(i)), nn)?;
        let v = evaluate_in_model(&tr, m, asg)?;
        let expect = m.tau(&asg.objects[i]);
        note(&mut tr_id, n.is_zero(&n.sub(&v, &expect)), format!("X{}", i + 1));
    }
    let mut tr_d = mk("trace-vs-d");
    for f in endomorphisms {
        let tr = crate::composites::trace_composite(f, nn)?;
        let v = evaluate_in_model(&tr, m, asg)?;
        let d = evaluate_in_model(f, m, asg)?;
        let expect = n.add(&d, &m.tau(&asg.object(m, &f.source)));
        note(&mut tr_d, n.is_zero(&n.sub(&v, &expect)), f.source.to_string());
    }
    let taus = asg.objects.iter().map(|x| m.tau(x)).collect();
    Ok(InvariantReport {
        homomorphism: hom,
        two_torsion: tors,
        trace_of_identity: tr_id,
        trace_vs_d: tr_d,
        taus,
    })
}

/// Canonical isomorphism `from -> to` between words of equal degree,
/// routed through the power word.
pub fn canonical_between(from: &TensorWord, to: &TensorWord, n: usize) -> Result<FormalComposite, ModelError> {
    let a = canonical_phi(from, n)?;
    let b = canonical_phi(to, n)?.inverse()?;
    Ok(a.then(&b)?)
}

/// A model together with generator data, as read from a model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: ExtendedSMC,
    pub assignment: GeneratorAssignment,
}

fn parse_elem(text: &str, g: &FiniteAbelianGroup) -> Result<Elem, String> {
    let t = text.trim();
    let inner = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(t);
    let v: Result<Vec<i64>, _> = inner
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<i64>())
        .collect();
    let v = v.map_err(|_| format!("`{t}` is not an element"))?;
    if v.len() != g.rank() {
        return Err(format!("`{t}` needs {} coordinates for {g}", g.rank()));
    }
    Ok(g.reduced(v))
}

/// Splits `alpha[1,0,1]`-style indices, allowing tuple elements.
fn split_index(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => parts.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    parts
}

/// Reads `name[x1,...,xk] = v` lines into a full table over `A^k`;
/// unlisted entries are zero and `#` starts a comment.
pub fn parse_table(
    text: &str,
    name: &str,
    arity: usize,
    a: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
) -> Result<Vec<Elem>, ModelError> {
    let size = a.order().ok_or_else(|| GroupError::Infinite(a.to_string()))? as usize;
    let mut table = vec![n.zero(); size.pow(arity as u32)];
    let prefix = format!("{name}[");
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let perr = |reason: String| ModelError::Parse { line, reason };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (lhs, rhs) = content
            .split_once('=')
            .ok_or_else(|| perr("expected `key = value`".into()))?;
        let idx = lhs
            .trim()
            .strip_prefix(&prefix)
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| perr(format!("expected `{name}[...] = value`")))?;
        let parts = split_index(idx);
        if parts.len() != arity {
            return Err(perr(format!("{name} takes {arity} arguments")));
        }
        let mut offset = 0;
        for p in &parts {
            offset = offset * size + a.index_of(&parse_elem(p, a).map_err(perr)?);
        }
        table[offset] = parse_elem(rhs, n).map_err(perr)?;
    }
    Ok(table)
}

impl FromStr for ModelSpec {
    type Err = ModelError;

    /// Model file format, one statement per line (`#` starts a comment):
    /// `A = Z/2 x Z/2`, `N = Z/4`, `builtin = strict | graded-line`,
    /// `alpha[a,b,c] = n`, `beta[a,b] = n`, `gens = a1; a2`,
    /// `units = u1; u2`. Elements of rank-1 groups are integers; others
    /// are tuples `(x,y)`. Unlisted table entries are zero.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut a: Option<FiniteAbelianGroup> = None;
        let mut n: Option<FiniteAbelianGroup> = None;
        let mut builtin: Option<Formula> = None;
        let mut alpha_entries = Vec::new();
        let mut beta_entries = Vec::new();
        let mut gens: Option<(usize, String)> = None;
        let mut units: Option<(usize, String)> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let perr = |reason: String| ModelError::Parse { line, reason };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (lhs, rhs) = content
                .split_once('=')
                .ok_or_else(|| perr("expected `key = value`".into()))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if lhs == "A" {
                a = Some(rhs.parse().map_err(|e: GroupError| perr(e.to_string()))?);
            } else if lhs == "N" {
                n = Some(rhs.parse().map_err(|e: GroupError| perr(e.to_string()))?);
            } else if lhs == "builtin" {
                builtin = Some(match rhs {
                    "strict" => Formula::Strict,
                    "graded-line" => Formula::GradedLine,
                    other => return Err(perr(format!("unknown builtin `{other}`"))),
                });
            } else if lhs == "gens" {
                gens = Some((line, rhs.to_string()));
            } else if lhs == "units" {
                units = Some((line, rhs.to_string()));
            } else if let Some(idx) = lhs.strip_prefix("alpha[").and_then(|s| s.strip_suffix(']')) {
                alpha_entries.push((line, split_index(idx), rhs.to_string()));
            } else if let Some(idx) = lhs.strip_prefix("beta[").and_then(|s| s.strip_suffix(']')) {
                beta_entries.push((line, split_index(idx), rhs.to_string()));
            } else {
                return Err(perr(format!("unknown key `{lhs}`")));
            }
        }
        let model = match builtin {
            Some(Formula::GradedLine) => {
                if !alpha_entries.is_empty() || !beta_entries.is_empty() {
                    return Err(ModelError::Parse {
                        line: alpha_entries.first().or(beta_entries.first()).map_or(0, |e| e.0),
                        reason: "builtin models take no tables".into(),
                    });
                }
                ExtendedSMC::graded_line()
            }
            Some(Formula::Strict) if alpha_entries.is_empty() && beta_entries.is_empty() => {
                ExtendedSMC::strict(
                    a.clone().unwrap_or_else(FiniteAbelianGroup::integers),
                    n.clone().unwrap_or_else(|| FiniteAbelianGroup::cyclic(2)),
                )
            }
            _ => {
                let ga = a.clone().ok_or(ModelError::Parse {
                    line: 0,
                    reason: "missing `A = ...`".into(),
                })?;
                let gn = n.clone().ok_or(ModelError::Parse {
                    line: 0,
                    reason: "missing `N = ...`".into(),
                })?;
                let size = ga.order().ok_or_else(|| ModelError::Parse {
                    line: 0,
                    reason: "tables need a finite A".into(),
                })? as usize;
                let mut at = vec![gn.zero(); size.pow(3)];
                let mut bt = vec![gn.zero(); size.pow(2)];
                for (line, idx, val) in &alpha_entries {
                    let perr = |reason: String| ModelError::Parse { line: *line, reason };
                    if idx.len() != 3 {
                        return Err(perr("alpha takes three arguments".into()));
                    }
                    let xs: Vec<usize> = idx
                        .iter()
                        .map(|s| parse_elem(s, &ga).map(|e| ga.index_of(&e)))
                        .collect::<Result<_, _>>()
                        .map_err(perr)?;
                    at[(xs[0] * size + xs[1]) * size + xs[2]] = parse_elem(val, &gn).map_err(perr)?;
                }
                for (line, idx, val) in &beta_entries {
                    let perr = |reason: String| ModelError::Parse { line: *line, reason };
                    if idx.len() != 2 {
                        return Err(perr("beta takes two arguments".into()));
                    }
                    let xs: Vec<usize> = idx
                        .iter()
                        .map(|s| parse_elem(s, &ga).map(|e| ga.index_of(&e)))
                        .collect::<Result<_, _>>()
                        .map_err(perr)?;
                    bt[xs[0] * size + xs[1]] = parse_elem(val, &gn).map_err(perr)?;
                }
                ExtendedSMC::from_tables(ga, gn, at, bt)?
            }
        };
        let list = |entry: &Option<(usize, String)>, g: &FiniteAbelianGroup| -> Result<Vec<Elem>, ModelError> {
            match entry {
                None => Ok(Vec::new()),
                Some((line, s)) => s
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| parse_elem(p, g))
                    .collect::<Result<_, _>>()
                    .map_err(|reason| ModelError::Parse { line: *line, reason }),
            }
        };
        let mut objects = list(&gens, &model.a)?;
        if objects.is_empty() {
            objects.push(model.a.reduced(vec![1; model.a.rank()]));
        }
        let mut us = list(&units, &model.n)?;
        if us.is_empty() {
            us = vec![model.n.zero(); objects.len()];
        }
        if us.len() != objects.len() {
            return Err(ModelError::Parse {
                line: units.map_or(0, |u| u.0),
                reason: format!("{} units for {} generators", us.len(), objects.len()),
            });
        }
        let assignment = GeneratorAssignment::new(&model, objects, us)?;
        Ok(ModelSpec { model, assignment })
    }
}

impl fmt::Display for ExtendedSMC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.backing {
            Backing::Formula(Formula::Strict) => write!(f, "strict model, A = {}, N = {}", self.a, self.n),
            Backing::Formula(Formula::GradedLine) => write!(f, "graded-line model, A = Z, N = Z/2"),
            Backing::Table { .. } => write!(f, "table model, A = {}, N = {}", self.a, self.n),
        }
    }
}
