//! Sign calculus for `Z^n`-graded rings of maps out of powers of
//! invertible objects: the commuters `τ_{a,b}`, the corrections relating
//! right and left normalizations `[f]_r` and `[f]_l`, symbolic graded
//! products, and the bigraded (motivic) specializations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composites::UniversalSign;
use crate::group::{Elem, FiniteAbelianGroup, GroupError};
use crate::words::Multidegree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignError {
    #[error("unknown rule `{0}` (expected one of a, b, c, d, e, f-r, f-l, g-r, g-r', g-l, g-l')")]
    UnknownRule(String),
    #[error("rule {rule} needs degree `{name}`")]
    MissingDegree { rule: LrRule, name: &'static str },
    #[error("degree vectors have different lengths")]
    LengthMismatch,
    #[error("cannot multiply two module elements `{0}` and `{1}`")]
    ModuleProduct(String, String),
    #[error("convention {convention} needs argument `{name}`")]
    MissingArgument { convention: Convention, name: &'static str },
    #[error("expected {expected} commuter images, got {got}")]
    CommuterCount { expected: usize, got: usize },
    #[error("commuter image {0:?} is not 2-torsion")]
    NotTwoTorsion(Elem),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// `τ_{a,b} = ∏ τ_i^{a_i b_i}`.
pub fn tau(a: &Multidegree, b: &Multidegree) -> UniversalSign {
    let n = a.len().max(b.len());
    UniversalSign::from_exponents((0..n).map(|i| a.get(i) * b.get(i)))
}

/// `τ_{X^a} = τ_{a,a} = ∏ τ_i^{a_i}`, the commuter of a single power.
pub fn tau_of(a: &Multidegree) -> UniversalSign {
    UniversalSign::from_exponents(a.0.iter().copied())
}

/// The relations between `[f]_r`, `[f]_l` and their behaviour under
/// tensoring and composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LrRule {
    /// `[f]_r = [f]_l · τ_{b,a-b}`.
    A,
    /// `[id_c ⊗ f]_r = [f]_r`.
    B,
    /// `[f ⊗ id_c]_r = [f]_r · τ_{a-b,c}`.
    C,
    /// `[f ⊗ id_c]_l = [f]_l`.
    D,
    /// `[id_c ⊗ f]_l = [f]_l · τ_{a-b,c}`.
    E,
    /// `[gf]_r = [g]_r · [f]_r` for `g: X^b -> X^c`.
    FR,
    /// `[gf]_l = [g]_l · [f]_l · τ_{a-b,b-c}`.
    FL,
    /// `[f ⊗ g]_r = [f]_r · [g]_r · τ_{a-b,d}` for `g: X^c -> X^d`.
    GR,
    /// `[f ⊗ g]_r = [g]_r · [f]_r · τ_{a-b,c}`.
    GRSwapped,
    /// `[f ⊗ g]_l = [f]_l · [g]_l · τ_{b,c-d}`.
    GL,
    /// `[f ⊗ g]_l = [g]_l · [f]_l · τ_{a,c-d}`.
    GLSwapped,
}

impl LrRule {
    pub const ALL: [LrRule; 11] = [
        LrRule::A,
        LrRule::B,
        LrRule::C,
        LrRule::D,
        LrRule::E,
        LrRule::FR,
        LrRule::FL,
        LrRule::GR,
        LrRule::GRSwapped,
        LrRule::GL,
        LrRule::GLSwapped,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            LrRule::A => "a",
            LrRule::B => "b",
            LrRule::C => "c",
            LrRule::D => "d",
            LrRule::E => "e",
            LrRule::FR => "f-r",
            LrRule::FL => "f-l",
            LrRule::GR => "g-r",
            LrRule::GRSwapped => "g-r'",
            LrRule::GL => "g-l",
            LrRule::GLSwapped => "g-l'",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            LrRule::A => "[f]_r = [f]_l * t(b, a-b)",
            LrRule::B => "[id_c (x) f]_r = [f]_r",
            LrRule::C => "[f (x) id_c]_r = [f]_r * t(a-b, c)",
            LrRule::D => "[f (x) id_c]_l = [f]_l",
            LrRule::E => "[id_c (x) f]_l = [f]_l * t(a-b, c)",
            LrRule::FR => "[gf]_r = [g]_r * [f]_r",
            LrRule::FL => "[gf]_l = [g]_l * [f]_l * t(a-b, b-c)",
            LrRule::GR => "[f (x) g]_r = [f]_r * [g]_r * t(a-b, d)",
            LrRule::GRSwapped => "[f (x) g]_r = [g]_r * [f]_r * t(a-b, c)",
            LrRule::GL => "[f (x) g]_l = [f]_l * [g]_l * t(b, c-d)",
            LrRule::GLSwapped => "[f (x) g]_l = [g]_l * [f]_l * t(a, c-d)",
        }
    }
}

impl fmt::Display for LrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl FromStr for LrRule {
    type Err = SignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let t = t.strip_prefix("lr-").unwrap_or(t);
        LrRule::ALL
            .iter()
            .copied()
            .find(|r| r.tag() == t)
            .ok_or_else(|| SignError::UnknownRule(s.to_string()))
    }
}

/// Degrees for the lr rules: `f: X^a -> X^b`, and `c` (with `d`) for the
/// identity factor or second map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrDegrees {
    pub a: Option<Multidegree>,
    pub b: Option<Multidegree>,
    pub c: Option<Multidegree>,
    pub d: Option<Multidegree>,
}

impl LrDegrees {
    pub fn new(a: &Multidegree, b: &Multidegree) -> Self {
        LrDegrees {
            a: Some(a.clone()),
            b: Some(b.clone()),
            c: None,
            d: None,
        }
    }

    pub fn with_c(mut self, c: &Multidegree) -> Self {
        self.c = Some(c.clone());
        self
    }

    pub fn with_d(mut self, d: &Multidegree) -> Self {
        self.d = Some(d.clone());
        self
    }
}

/// The correction factor of an lr rule; the `[f]` parts are the caller's.
pub fn lr_correction(rule: LrRule, deg: &LrDegrees) -> Result<UniversalSign, SignError> {
    let need = |v: &Option<Multidegree>, name: &'static str| {
        v.clone().ok_or(SignError::MissingDegree { rule, name })
    };
    let a = need(&deg.a, "a")?;
    let b = need(&deg.b, "b")?;
    if a.len() != b.len() {
        return Err(SignError::LengthMismatch);
    }
    let amb = &a - &b;
    let n = a.len();
    let check_len = |v: &Multidegree| {
        if v.len() == n {
            Ok(())
        } else {
            Err(SignError::LengthMismatch)
        }
    };
    Ok(match rule {
        LrRule::A => tau(&b, &amb),
        LrRule::B | LrRule::D | LrRule::FR => {
            if let Some(c) = &deg.c {
                check_len(c)?;
            }
            UniversalSign::zero(n)
        }
        LrRule::C | LrRule::E => {
            let c = need(&deg.c, "c")?;
            check_len(&c)?;
            tau(&amb, &c)
        }
        LrRule::FL => {
            let c = need(&deg.c, "c")?;
            check_len(&c)?;
            tau(&amb, &(&b - &c))
        }
        LrRule::GR | LrRule::GRSwapped | LrRule::GL | LrRule::GLSwapped => {
            let c = need(&deg.c, "c")?;
            let d = need(&deg.d, "d")?;
            check_len(&c)?;
            check_len(&d)?;
            match rule {
                LrRule::GR => tau(&amb, &d),
                LrRule::GRSwapped => tau(&amb, &c),
                LrRule::GL => tau(&b, &(&c - &d)),
                _ => tau(&a, &(&c - &d)),
            }
        }
    })
}

/// A named element of a graded group, optionally living in a module
/// `π_*(W)` rather than the ring `π_*(S)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradedSymbol {
    pub name: String,
    pub degree: Multidegree,
    pub module: bool,
}

impl GradedSymbol {
    pub fn ring(name: &str, degree: Multidegree) -> Self {
        GradedSymbol {
            name: name.to_string(),
            degree,
            module: false,
        }
    }

    pub fn module(name: &str, degree: Multidegree) -> Self {
        GradedSymbol {
            name: name.to_string(),
            degree,
            module: true,
        }
    }
}

/// A product of symbols in normal order with an accumulated commuter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub symbols: Vec<GradedSymbol>,
    pub unit: UniversalSign,
}

impl Monomial {
    /// Sorts the symbols by name with adjacent transpositions, picking up
    /// `τ(deg u, deg v)` for every transposition of `u` past `v`.
    pub fn normalize(symbols: Vec<GradedSymbol>, mut unit: UniversalSign) -> Monomial {
        let mut symbols = symbols;
        let len = symbols.len();
        for i in 0..len {
            for j in 0..len - 1 - i {
                if symbols[j].name > symbols[j + 1].name {
                    unit.add_assign(&tau(&symbols[j].degree, &symbols[j + 1].degree));
                    symbols.swap(j, j + 1);
                }
            }
        }
        Monomial { symbols, unit }
    }

    pub fn degree(&self, n: usize) -> Multidegree {
        self.symbols
            .iter()
            .fold(Multidegree::zero(n), |acc, s| &acc + &s.degree)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.symbols.iter().map(|s| s.name.clone()).collect();
        if !self.unit.is_zero() {
            parts.push(self.unit.to_string());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Integer combination of normalized monomials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedExpression {
    terms: BTreeMap<Monomial, i64>,
}

impl GradedExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(n: usize) -> Self {
        Self::term(1, Vec::new(), UniversalSign::zero(n))
    }

    pub fn symbol(s: GradedSymbol) -> Self {
        let n = s.degree.len();
        Self::term(1, vec![s], UniversalSign::zero(n))
    }

    /// The unit of `π_0` given by a commuter, e.g. `τ_1`.
    pub fn commuter(unit: UniversalSign) -> Self {
        Self::term(1, Vec::new(), unit)
    }

    /// `coeff * s1 * ... * sk * unit`, normalized.
    pub fn term(coeff: i64, symbols: Vec<GradedSymbol>, unit: UniversalSign) -> Self {
        let mut e = Self::zero();
        e.add_term(coeff, Monomial::normalize(symbols, unit));
        e
    }

    fn add_term(&mut self, coeff: i64, m: Monomial) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &GradedExpression) -> GradedExpression {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(c, m.clone());
        }
        out
    }

    pub fn scale(&self, k: i64) -> GradedExpression {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_term(k * c, m.clone());
        }
        out
    }
}

impl fmt::Display for GradedExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| match c {
                1 => m.to_string(),
                -1 => format!("-{m}"),
                _ => format!("{c}*{m}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Bilinear product; monomials are concatenated and renormalized.
pub fn multiply(x: &GradedExpression, y: &GradedExpression) -> Result<GradedExpression, SignError> {
    let mut out = GradedExpression::zero();
    for (mx, cx) in x.terms() {
        for (my, cy) in y.terms() {
            let mods: Vec<&GradedSymbol> = mx.symbols.iter().chain(&my.symbols).filter(|s| s.module).collect();
            if mods.len() > 1 {
                return Err(SignError::ModuleProduct(mods[0].name.clone(), mods[1].name.clone()));
            }
            let symbols = mx.symbols.iter().chain(&my.symbols).cloned().collect();
            let unit = mx.unit.plus(&my.unit);
            out.add_term(cx * cy, Monomial::normalize(symbols, unit));
        }
    }
    Ok(out)
}

/// Trace and D-invariant relations instantiated at a degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceRelation {
    /// `tr(f) = τ_{X^a} · D(f)` for `f: X^a -> X^a`.
    TraceVsD,
    /// `tr(id_{X^a})^2 = 1`.
    TraceSquared,
    /// `τ_{X^a} = D(t_{X^a,X^a})`, i.e. `τ_{a,a}`.
    TauIsDOfTwist,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationInstance {
    pub statement: String,
    /// The commuter relating both sides.
    pub factor: UniversalSign,
}

pub fn d_of_trace_relations(a: &Multidegree, which: TraceRelation) -> RelationInstance {
    match which {
        TraceRelation::TraceVsD => {
            let factor = tau_of(a);
            RelationInstance {
                statement: format!("tr(f) = {factor} * D(f)"),
                factor,
            }
        }
        TraceRelation::TraceSquared => {
            let t = tau_of(a);
            let factor = t.plus(&t);
            RelationInstance {
                statement: format!("tr(id)^2 = {factor}"),
                factor,
            }
        }
        TraceRelation::TauIsDOfTwist => {
            let factor = tau(a, a);
            RelationInstance {
                statement: format!("D(t) = {factor}"),
                factor,
            }
        }
    }
}

/// `(-1)^minus_one * eps^eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotivicSign {
    pub minus_one: u8,
    pub eps: u8,
}

impl fmt::Display for MotivicSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(-1)^{} * eps^{}", self.minus_one, self.eps)
    }
}

/// Commuting `f ∈ π_{a,b}` past `g ∈ π_{c,d}` in the bigraded ring:
/// `fg = gf · (-1)^{(a-b)(c-d)} · ε^{bd}`.
pub fn motivic_skew(a: i64, b: i64, c: i64, d: i64) -> MotivicSign {
    let e = tau(&Multidegree(vec![a - b, b]), &Multidegree(vec![c - d, d]));
    MotivicSign {
        minus_one: e.get(0),
        eps: e.get(1),
    }
}

/// Which sphere plays the role of the first generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// `X1 = S^{1,0}`, `X2 = S^{1,1}`.
    Simplicial,
    /// `X1 = S^{1,1}`, `X2 = S^{1,0}`.
    Swapped,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Simplicial => write!(f, "X1=S^(1,0)"),
            Convention::Swapped => write!(f, "X1=S^(1,1)"),
        }
    }
}

/// Bidegrees of `f ∈ π_{a,b}` and `g ∈ π_{c,d}`; only the entries used by
/// the chosen convention are required.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bidegrees {
    pub a: Option<i64>,
    pub b: Option<i64>,
    pub c: Option<i64>,
    pub d: Option<i64>,
}

/// The sign `ψ(fg) = ψ(f)ψ(g) · sign` under topological realization:
/// `(-1)^{b(c-d)}` by default and `(-1)^{(a-b)d}` in the swapped
/// convention.
pub fn realization_correction(convention: Convention, deg: &Bidegrees) -> Result<i8, SignError> {
    let need = |v: Option<i64>, name: &'static str| v.ok_or(SignError::MissingArgument { convention, name });
    let e = match convention {
        Convention::Simplicial => need(deg.b, "b")? * (need(deg.c, "c")? - need(deg.d, "d")?),
        Convention::Swapped => (need(deg.a, "a")? - need(deg.b, "b")?) * need(deg.d, "d")?,
    };
    Ok(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// An abelian group `N` with chosen 2-torsion images of `τ_1..τ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommuterGroup {
    pub group: FiniteAbelianGroup,
    pub taus: Vec<Elem>,
}

impl CommuterGroup {
    /// `(Z/2)^n` with `τ_i = e_i`.
    pub fn universal(n: usize) -> Self {
        let group = FiniteAbelianGroup::new(vec![2; n]);
        let taus = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        CommuterGroup { group, taus }
    }

    pub fn new(group: FiniteAbelianGroup, taus: Vec<Elem>) -> Result<Self, SignError> {
        for t in &taus {
            group.check(t)?;
            if !group.is_zero(&group.scale(2, t)) {
                return Err(SignError::NotTwoTorsion(t.clone()));
            }
        }
        Ok(CommuterGroup { group, taus })
    }

    /// Image of `∏ τ_i^{e_i}` in `N`, written additively.
    pub fn image(&self, e: &UniversalSign) -> Result<Elem, SignError> {
        if e.len() > self.taus.len() {
            return Err(SignError::CommuterCount {
                expected: e.len(),
                got: self.taus.len(),
            });
        }
        let mut acc = self.group.zero();
        for (i, t) in self.taus.iter().enumerate() {
            if e.get(i) == 1 {
                acc = self.group.add(&acc, t);
            }
        }
        Ok(acc)
    }
}
