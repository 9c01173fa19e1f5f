//! Formal composites: chains of elementary coherence moves between
//! inverse-restricted words, their universal `(Z/2)^n` evaluation, the
//! canonical isomorphisms `w -> X^a`, and compilation into the diagram
//! category.

pub mod random;

use std::fmt;
use std::mem;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kl::{self, Elementary, KLMorphism, KlError};
use crate::words::{letters, multidegree, power_word, Multidegree, Sign, TensorWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositeError {
    #[error("move {index} ({mv}) does not apply to `{word}`")]
    MoveMismatch { index: usize, mv: String, word: String },
    #[error("move {index}: position {path} does not exist in `{word}`")]
    InvalidPosition { index: usize, path: String, word: String },
    #[error("composites have different endpoints: {left} vs {right}")]
    EndpointMismatch { left: String, right: String },
    #[error("multidegrees differ: {left} vs {right}")]
    DegreeMismatch { left: String, right: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Kl(#[from] KlError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    L,
    R,
}

/// Address of a subword: a sequence of left/right choices from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path(pub Vec<Step>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    /// `R^j`, the `j`-th tail of a right-nested list.
    pub fn rights(j: usize) -> Self {
        Path(vec![Step::R; j])
    }

    pub fn child(&self, step: Step) -> Self {
        let mut p = self.0.clone();
        p.push(step);
        Path(p)
    }

    /// `prefix` followed by `self`.
    pub fn under(&self, prefix: &Path) -> Self {
        Path(prefix.0.iter().chain(self.0.iter()).copied().collect())
    }

    pub fn join(&self, tail: &Path) -> Self {
        tail.under(self)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                Step::L => "L",
                Step::R => "R",
            })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

pub fn subword<'a>(w: &'a TensorWord, path: &Path) -> Option<&'a TensorWord> {
    let mut cur = w;
    for step in &path.0 {
        match cur {
            TensorWord::Tensor(a, b) => {
                cur = if *step == Step::L { a } else { b };
            }
            _ => return None,
        }
    }
    Some(cur)
}

fn subword_mut<'a>(w: &'a mut TensorWord, path: &Path) -> Option<&'a mut TensorWord> {
    let mut cur = w;
    for step in &path.0 {
        match cur {
            TensorWord::Tensor(a, b) => {
                cur = if *step == Step::L { a } else { b };
            }
            _ => return None,
        }
    }
    Some(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitorSide {
    /// `S ⊗ w -> w`.
    Left,
    /// `w ⊗ S -> w`.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    /// `(a ⊗ b) ⊗ c -> a ⊗ (b ⊗ c)`.
    Assoc,
    Unitor(UnitorSide),
    /// `u ⊗ v -> v ⊗ u`.
    Twist(TensorWord, TensorWord),
    /// `S -> Xi^-1 ⊗ Xi`.
    Alpha(usize),
    /// `Xi ⊗ Xi^-1 -> S`.
    AlphaHat(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub position: Path,
    pub inverted: bool,
}

impl Move {
    pub fn new(kind: MoveKind, position: Path) -> Self {
        Move {
            kind,
            position,
            inverted: false,
        }
    }

    pub fn inverse(&self) -> Self {
        Move {
            inverted: !self.inverted,
            ..self.clone()
        }
    }

    pub fn at(mut self, position: Path) -> Self {
        self.position = position;
        self
    }

    /// True for a twist of two single letters of generator `i`.
    pub fn is_self_twist_of(&self, i: usize) -> bool {
        match &self.kind {
            MoveKind::Twist(u, v) => single_letter(u) == Some(i) && single_letter(v) == Some(i),
            _ => false,
        }
    }

    pub fn is_self_twist(&self) -> bool {
        match &self.kind {
            MoveKind::Twist(u, v) => single_letter(u).is_some() && single_letter(u) == single_letter(v),
            _ => false,
        }
    }

    /// Rewrites the subword at this move's position.
    pub fn apply(&self, word: &mut TensorWord) -> Result<(), MoveFailure> {
        let sub = subword_mut(word, &self.position).ok_or(MoveFailure::Position)?;
        let s = mem::replace(sub, TensorWord::Unit);
        match rewrite(&self.kind, self.inverted, s) {
            Ok(new) => {
                *sub = new;
                Ok(())
            }
            Err(old) => {
                *sub = old;
                Err(MoveFailure::Shape)
            }
        }
    }
}

fn single_letter(w: &TensorWord) -> Option<usize> {
    match w {
        TensorWord::Gen(i) | TensorWord::DualGen(i) => Some(*i),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveFailure {
    Position,
    Shape,
}

fn rewrite(kind: &MoveKind, inverted: bool, s: TensorWord) -> Result<TensorWord, TensorWord> {
    use TensorWord::{DualGen, Gen, Tensor, Unit};
    match (kind, inverted) {
        (MoveKind::Assoc, false) => match s {
            Tensor(l, c) => match *l {
                Tensor(a, b) => Ok(Tensor(a, Box::new(Tensor(b, c)))),
                l => Err(Tensor(Box::new(l), c)),
            },
            s => Err(s),
        },
        (MoveKind::Assoc, true) => match s {
            Tensor(a, r) => match *r {
                Tensor(b, c) => Ok(Tensor(Box::new(Tensor(a, b)), c)),
                r => Err(Tensor(a, Box::new(r))),
            },
            s => Err(s),
        },
        (MoveKind::Unitor(UnitorSide::Left), false) => match s {
            Tensor(a, b) if a.is_unit() => Ok(*b),
            s => Err(s),
        },
        (MoveKind::Unitor(UnitorSide::Right), false) => match s {
            Tensor(a, b) if b.is_unit() => Ok(*a),
            s => Err(s),
        },
        (MoveKind::Unitor(UnitorSide::Left), true) => Ok(TensorWord::tensor(Unit, s)),
        (MoveKind::Unitor(UnitorSide::Right), true) => Ok(TensorWord::tensor(s, Unit)),
        (MoveKind::Twist(u, v), inv) => {
            let (first, second) = if inv { (v, u) } else { (u, v) };
            match s {
                Tensor(a, b) if *a == *first && *b == *second => Ok(Tensor(b, a)),
                s => Err(s),
            }
        }
        (MoveKind::Alpha(i), false) | (MoveKind::AlphaHat(i), true) => match s {
            Unit => Ok(if matches!(kind, MoveKind::Alpha(_)) {
                TensorWord::tensor(DualGen(*i), Gen(*i))
            } else {
                TensorWord::tensor(Gen(*i), DualGen(*i))
            }),
            s => Err(s),
        },
        (MoveKind::Alpha(i), true) => match s {
            Tensor(a, b) if *a == DualGen(*i) && *b == Gen(*i) => Ok(Unit),
            s => Err(s),
        },
        (MoveKind::AlphaHat(i), false) => match s {
            Tensor(a, b) if *a == Gen(*i) && *b == DualGen(*i) => Ok(Unit),
            s => Err(s),
        },
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MoveKind::Assoc => write!(f, "assoc")?,
            MoveKind::Unitor(UnitorSide::Left) => write!(f, "unitor-left")?,
            MoveKind::Unitor(UnitorSide::Right) => write!(f, "unitor-right")?,
            MoveKind::Twist(u, v) => write!(f, "twist ({u}, {v})")?,
            MoveKind::Alpha(i) => write!(f, "alpha {}", i + 1)?,
            MoveKind::AlphaHat(i) => write!(f, "alphahat {}", i + 1)?,
        }
        if self.inverted {
            write!(f, " ^-1")?;
        }
        write!(f, " @ {}", self.position)
    }
}

/// An exponent vector in `(Z/2)^n`, read as a product of basic commuters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UniversalSign(pub Vec<u8>);

impl UniversalSign {
    pub fn zero(n: usize) -> Self {
        UniversalSign(vec![0; n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.0[i] = 1;
        e
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = i64>) -> Self {
        UniversalSign(exps.into_iter().map(|k| k.rem_euclid(2) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn plus(&self, other: &UniversalSign) -> UniversalSign {
        let n = self.len().max(other.len());
        UniversalSign((0..n).map(|i| self.get(i) ^ other.get(i)).collect())
    }

    pub fn add_assign(&mut self, other: &UniversalSign) {
        if other.len() > self.len() {
            self.0.resize(other.len(), 0);
        }
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x ^= y;
        }
    }
}

impl fmt::Display for UniversalSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == 1)
            .map(|(i, _)| format!("t{}", i + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A source word and a chain of moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormalComposite {
    pub source: TensorWord,
    pub moves: Vec<Move>,
}

/// Outcome of comparing two composites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ForcedEqual,
    NotForced,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ForcedEqual => write!(f, "ForcedEqual"),
            Verdict::NotForced => write!(f, "NotForced"),
        }
    }
}

impl FormalComposite {
    pub fn identity(source: TensorWord) -> Self {
        FormalComposite {
            source,
            moves: Vec::new(),
        }
    }

    pub fn new(source: TensorWord, moves: Vec<Move>) -> Self {
        FormalComposite { source, moves }
    }

    /// Replays the moves, calling `visit(index, word_before, move)`.
    pub fn replay(
        &self,
        mut visit: impl FnMut(usize, &TensorWord, &Move),
    ) -> Result<TensorWord, CompositeError> {
        if !self.source.is_inverse_restricted() {
            return Err(WordError::NotInverseRestricted.into());
        }
        let mut w = self.source.clone();
        for (index, m) in self.moves.iter().enumerate() {
            visit(index, &w, m);
            m.apply(&mut w).map_err(|e| {
                let (mv, word) = (m.to_string(), w.to_string());
                match e {
                    MoveFailure::Position => CompositeError::InvalidPosition {
                        index,
                        path: m.position.to_string(),
                        word,
                    },
                    MoveFailure::Shape => CompositeError::MoveMismatch { index, mv, word },
                }
            })?;
        }
        Ok(w)
    }

    pub fn target(&self) -> Result<TensorWord, CompositeError> {
        self.replay(|_, _, _| {})
    }

    /// Checks generator indices and replays every move.
    pub fn validate(&self, n: usize) -> Result<TensorWord, CompositeError> {
        self.source.check_indices(n)?;
        for m in &self.moves {
            match &m.kind {
                MoveKind::Twist(u, v) => {
                    u.check_indices(n)?;
                    v.check_indices(n)?;
                }
                MoveKind::Alpha(i) | MoveKind::AlphaHat(i) if *i >= n => {
                    return Err(WordError::GeneratorOutOfRange { index: *i, n }.into())
                }
                _ => {}
            }
        }
        self.target()
    }

    /// Every intermediate word, source first and target last.
    pub fn words(&self) -> Result<Vec<TensorWord>, CompositeError> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        let last = self.replay(|_, w, _| out.push(w.clone()))?;
        out.push(last);
        Ok(out)
    }

    /// The reversed chain of inverted moves.
    pub fn inverse(&self) -> Result<FormalComposite, CompositeError> {
        Ok(FormalComposite {
            source: self.target()?,
            moves: self.moves.iter().rev().map(Move::inverse).collect(),
        })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FormalComposite) -> Result<FormalComposite, CompositeError> {
        let t = self.target()?;
        if t != next.source {
            return Err(CompositeError::EndpointMismatch {
                left: t.to_string(),
                right: next.source.to_string(),
            });
        }
        let mut moves = self.moves.clone();
        moves.extend(next.moves.iter().cloned());
        Ok(FormalComposite {
            source: self.source.clone(),
            moves,
        })
    }

    /// `self ⊗ id_right`.
    pub fn tensor_right(&self, right: &TensorWord) -> FormalComposite {
        self.lifted(Step::L, TensorWord::tensor(self.source.clone(), right.clone()))
    }

    /// `id_left ⊗ self`.
    pub fn tensor_left(&self, left: &TensorWord) -> FormalComposite {
        self.lifted(Step::R, TensorWord::tensor(left.clone(), self.source.clone()))
    }

    fn lifted(&self, step: Step, source: TensorWord) -> FormalComposite {
        let prefix = Path(vec![step]);
        FormalComposite {
            source,
            moves: self
                .moves
                .iter()
                .map(|m| m.clone().at(m.position.under(&prefix)))
                .collect(),
        }
    }
}

/// Mod-2 count of self-twists of generator `i`, after expanding word-level
/// twists into letter transpositions.
pub fn i_parity(c: &FormalComposite, i: usize) -> Result<u8, CompositeError> {
    let expanded = expand_twists(c)?;
    let count = expanded.moves.iter().filter(|m| m.is_self_twist_of(i)).count();
    Ok((count % 2) as u8)
}

/// Universal evaluation: each twist `u ⊗ v -> v ⊗ u` contributes
/// `deg_i(u) deg_i(v)` mod 2; every other move contributes nothing.
pub fn evaluate(c: &FormalComposite, n: usize) -> Result<UniversalSign, CompositeError> {
    c.validate(n)?;
    Ok(twist_total(c, n))
}

fn twist_total(c: &FormalComposite, n: usize) -> UniversalSign {
    let mut e = UniversalSign::zero(n);
    for m in &c.moves {
        if let MoveKind::Twist(u, v) = &m.kind {
            e.add_assign(&twist_sign(u, v, n));
        }
    }
    e
}

pub fn twist_sign(u: &TensorWord, v: &TensorWord, n: usize) -> UniversalSign {
    let (du, dv) = (multidegree(u, n), multidegree(v, n));
    UniversalSign::from_exponents((0..n).map(|i| du.get(i) * dv.get(i)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub verdict: Verdict,
    pub left: UniversalSign,
    pub right: UniversalSign,
}

pub fn equal(c1: &FormalComposite, c2: &FormalComposite, n: usize) -> Result<Comparison, CompositeError> {
    let (t1, t2) = (c1.validate(n)?, c2.validate(n)?);
    if c1.source != c2.source || t1 != t2 {
        return Err(CompositeError::EndpointMismatch {
            left: format!("{} -> {}", c1.source, t1),
            right: format!("{} -> {}", c2.source, t2),
        });
    }
    let (left, right) = (twist_total(c1, n), twist_total(c2, n));
    let verdict = if left == right {
        Verdict::ForcedEqual
    } else {
        Verdict::NotForced
    };
    Ok(Comparison { verdict, left, right })
}

/// Incrementally builds a composite, applying each move as it is pushed.
#[derive(Debug, Clone)]
pub struct Builder {
    source: TensorWord,
    current: TensorWord,
    moves: Vec<Move>,
}

impl Builder {
    pub fn new(source: TensorWord) -> Self {
        Builder {
            current: source.clone(),
            source,
            moves: Vec::new(),
        }
    }

    pub fn current(&self) -> &TensorWord {
        &self.current
    }

    pub fn try_push(&mut self, m: Move) -> Result<(), MoveFailure> {
        m.apply(&mut self.current)?;
        self.moves.push(m);
        Ok(())
    }

    /// Pushes a move the caller knows applies.
    fn push(&mut self, kind: MoveKind, position: Path, inverted: bool) {
        let m = Move {
            kind,
            position,
            inverted,
        };
        if let Err(e) = self.try_push(m.clone()) {
            panic!("internal move {m} failed ({e:?}) on {}", self.current);
        }
    }

    fn extend(&mut self, moves: impl IntoIterator<Item = Move>) {
        for m in moves {
            self.push(m.kind, m.position, m.inverted);
        }
    }

    pub fn finish(self) -> FormalComposite {
        FormalComposite {
            source: self.source,
            moves: self.moves,
        }
    }
}

/// Rewrites the subtree at `p` into a right-nested letter list with no
/// units, returning its letter count. `choose(k)` picks among `k` equally
/// valid orders.
fn flatten_at(b: &mut Builder, p: &Path, choose: &mut dyn FnMut(usize) -> usize) -> usize {
    let is_tensor = match subword(&b.current, p) {
        Some(TensorWord::Tensor(..)) => true,
        Some(TensorWord::Unit) => return 0,
        Some(_) => return 1,
        None => panic!("flatten at missing position {p}"),
    };
    debug_assert!(is_tensor);
    let (pl, pr) = (p.child(Step::L), p.child(Step::R));
    let (la, lb) = if choose(2) == 0 {
        let la = flatten_at(b, &pl, choose);
        (la, flatten_at(b, &pr, choose))
    } else {
        let lb = flatten_at(b, &pr, choose);
        (flatten_at(b, &pl, choose), lb)
    };
    merge_lists(b, p, la, lb, choose);
    la + lb
}

fn merge_lists(b: &mut Builder, p: &Path, la: usize, lb: usize, choose: &mut dyn FnMut(usize) -> usize) {
    if la == 0 && lb == 0 {
        let side = if choose(2) == 0 {
            UnitorSide::Left
        } else {
            UnitorSide::Right
        };
        b.push(MoveKind::Unitor(side), p.clone(), false);
    } else if la == 0 {
        b.push(MoveKind::Unitor(UnitorSide::Left), p.clone(), false);
    } else if lb == 0 {
        b.push(MoveKind::Unitor(UnitorSide::Right), p.clone(), false);
    } else if la > 1 {
        b.push(MoveKind::Assoc, p.clone(), false);
        merge_lists(b, &p.child(Step::R), la - 1, lb, choose);
    }
}

/// Moves turning `w` into the right-nested list of its letters.
pub fn flatten(w: &TensorWord) -> FormalComposite {
    let mut b = Builder::new(w.clone());
    flatten_at(&mut b, &Path::root(), &mut |_| 0);
    b.finish()
}

fn letter_word(l: (usize, Sign)) -> TensorWord {
    TensorWord::letter(l.0, l.1)
}

/// Swap list entries `j, j+1` of a right-nested list of length `m` at `p`.
fn swap_adjacent(b: &mut Builder, p: &Path, list: &mut [(usize, Sign)], j: usize) {
    let m = list.len();
    let twist = MoveKind::Twist(letter_word(list[j]), letter_word(list[j + 1]));
    let at = p.join(&Path::rights(j));
    if j + 2 == m {
        b.push(twist, at, false);
    } else {
        b.push(MoveKind::Assoc, at.clone(), true);
        b.push(twist, at.child(Step::L), false);
        b.push(MoveKind::Assoc, at, false);
    }
    list.swap(j, j + 1);
}

/// Cancel list entries `j, j+1` (same generator, opposite signs).
fn cancel_adjacent(b: &mut Builder, p: &Path, list: &mut Vec<(usize, Sign)>, j: usize) {
    let m = list.len();
    let (g, s) = list[j];
    let (kind, inverted) = match s {
        Sign::Plus => (MoveKind::AlphaHat(g), false),
        Sign::Minus => (MoveKind::Alpha(g), true),
    };
    let at = p.join(&Path::rights(j));
    if j + 2 == m {
        b.push(kind, at, inverted);
        if j > 0 {
            b.push(MoveKind::Unitor(UnitorSide::Right), p.join(&Path::rights(j - 1)), false);
        }
    } else {
        b.push(MoveKind::Assoc, at.clone(), true);
        b.push(kind, at.child(Step::L), inverted);
        b.push(MoveKind::Unitor(UnitorSide::Left), at, false);
    }
    list.drain(j..j + 2);
}

/// Canonical isomorphism `w -> power_word(deg w)` with the choice points
/// delegated to `choose`. Only mixed-generator twists are used.
pub fn canonical_with(w: &TensorWord, n: usize, choose: &mut dyn FnMut(usize) -> usize) -> FormalComposite {
    let mut b = Builder::new(w.clone());
    let root = Path::root();
    flatten_at(&mut b, &root, choose);
    let mut list: Vec<(usize, Sign)> = letters(w).iter().map(|l| (l.generator, l.sign)).collect();
    loop {
        // Candidate actions: adjacent inversions (by generator) first, then
        // adjacent cancellable pairs.
        let mut actions: Vec<(bool, usize)> = Vec::new();
        for j in 0..list.len().saturating_sub(1) {
            let (x, y) = (list[j], list[j + 1]);
            if x.0 > y.0 {
                actions.push((false, j));
            }
        }
        for j in 0..list.len().saturating_sub(1) {
            let (x, y) = (list[j], list[j + 1]);
            if x.0 == y.0 && x.1 != y.1 {
                actions.push((true, j));
            }
        }
        if actions.is_empty() {
            break;
        }
        // Inversions are listed first, so always picking 0 sorts completely
        // before cancelling.
        let (cancel, j) = actions[choose(actions.len())];
        if cancel {
            cancel_adjacent(&mut b, &root, &mut list, j);
        } else {
            swap_adjacent(&mut b, &root, &mut list, j);
        }
    }
    let target = power_word(&multidegree(w, n));
    let unflatten = flatten(&target).inverse().expect("flatten composite replays");
    b.extend(unflatten.moves);
    debug_assert_eq!(b.current, target);
    b.finish()
}

/// The canonical isomorphism `w -> X^a` built without self-twists.
pub fn canonical_phi(w: &TensorWord, n: usize) -> Result<FormalComposite, CompositeError> {
    if !w.is_inverse_restricted() {
        return Err(WordError::NotInverseRestricted.into());
    }
    w.check_indices(n)?;
    Ok(canonical_with(w, n, &mut |_| 0))
}

/// Per-generator count of inverted `Alpha`/`AlphaHat` moves replaced by
/// twisted duality pictures during compilation.
pub type Substitutions = Vec<u64>;

fn local_morphism(m: &Move, local: &TensorWord) -> Result<(Elementary, Option<usize>), CompositeError> {
    let mut after = local.clone();
    m.clone()
        .at(Path::root())
        .apply(&mut after)
        .map_err(|_| CompositeError::MoveMismatch {
            index: 0,
            mv: m.to_string(),
            word: local.to_string(),
        })?;
    let relabel = |src: &TensorWord, dst: &TensorWord| Elementary::Relabel {
        src: src.clone(),
        dst: dst.clone(),
    };
    Ok(match (&m.kind, m.inverted) {
        (MoveKind::Assoc, _) | (MoveKind::Unitor(_), _) => (relabel(local, &after), None),
        (MoveKind::Twist(u, v), false) => (Elementary::Symmetry(u.clone(), v.clone()), None),
        (MoveKind::Twist(u, v), true) => (Elementary::Symmetry(v.clone(), u.clone()), None),
        (MoveKind::Alpha(i), false) => (Elementary::Alpha(*i), None),
        (MoveKind::AlphaHat(i), false) => (Elementary::AlphaHat(*i), None),
        (MoveKind::Alpha(i), true) => (Elementary::TwistedAlphaHat(*i), Some(*i)),
        (MoveKind::AlphaHat(i), true) => (Elementary::TwistedAlpha(*i), Some(*i)),
    })
}

/// Tensors `local` with identities along `path` inside `word`.
fn lift_kl(local: KLMorphism, word: &TensorWord, path: &[Step]) -> KLMorphism {
    match (path.split_first(), word) {
        (None, _) => local,
        (Some((Step::L, rest)), TensorWord::Tensor(a, b)) => {
            kl::tensor(&lift_kl(local, a, rest), &KLMorphism::identity((**b).clone()))
        }
        (Some((Step::R, rest)), TensorWord::Tensor(a, b)) => {
            kl::tensor(&KLMorphism::identity((**a).clone()), &lift_kl(local, b, rest))
        }
        _ => unreachable!("path validated before lifting"),
    }
}

/// Maps every move into the diagram category and composes. Inverted
/// `Alpha`/`AlphaHat` become the twisted cap/cup and are counted in the
/// returned substitution vector.
pub fn compile_to_kl(c: &FormalComposite, n: usize) -> Result<(KLMorphism, Substitutions), CompositeError> {
    c.validate(n)?;
    let mut s = vec![0u64; n];
    let mut acc = KLMorphism::identity(c.source.clone());
    let mut w = c.source.clone();
    for m in &c.moves {
        let local = subword(&w, &m.position).expect("validated position").clone();
        let (e, sub) = local_morphism(m, &local)?;
        if let Some(i) = sub {
            s[i] += 1;
        }
        let step = lift_kl(kl::elementary(&e)?, &w, &m.position.0);
        acc = kl::compose(&step, &acc)?;
        m.apply(&mut w).expect("validated move");
    }
    Ok((acc, s))
}

/// Closes `c: w1 -> w2` (equal degrees) into a composite `S -> S`:
/// `S -> w1' ⊗ w1 -> w1' ⊗ w2 -> S` with canonical caps and cups, where
/// `w1'` is the formal inverse word of `w1`.
pub fn close_up(c: &FormalComposite, n: usize) -> Result<FormalComposite, CompositeError> {
    let w2 = c.validate(n)?;
    let w1 = &c.source;
    let (d1, d2) = (multidegree(w1, n), multidegree(&w2, n));
    if d1 != d2 {
        return Err(CompositeError::DegreeMismatch {
            left: d1.to_string(),
            right: d2.to_string(),
        });
    }
    let inv = w1.inverse_word()?;
    let cup = canonical_phi(&TensorWord::tensor(inv.clone(), w1.clone()), n)?.inverse()?;
    let mid = c.tensor_left(&inv);
    let cap = canonical_phi(&TensorWord::tensor(inv, w2), n)?;
    cup.then(&mid)?.then(&cap)
}

/// Trace of an endomorphism `f: w -> w`:
/// `S -> w'⊗w -> w'⊗w -> w⊗w' -> S` with canonical cup and cap.
pub fn trace_composite(f: &FormalComposite, n: usize) -> Result<FormalComposite, CompositeError> {
    let t = f.validate(n)?;
    let w = f.source.clone();
    if t != w {
        return Err(CompositeError::EndpointMismatch {
            left: w.to_string(),
            right: t.to_string(),
        });
    }
    let inv = w.inverse_word()?;
    let cup = canonical_phi(&TensorWord::tensor(inv.clone(), w.clone()), n)?.inverse()?;
    let mid = f.tensor_left(&inv);
    let twist = FormalComposite::new(
        TensorWord::tensor(inv.clone(), w.clone()),
        vec![Move::new(MoveKind::Twist(inv.clone(), w.clone()), Path::root())],
    );
    let cap = canonical_phi(&TensorWord::tensor(w, inv), n)?;
    cup.then(&mid)?.then(&twist)?.then(&cap)
}

/// Replaces every twist by letter-level transpositions: flatten `u ⊗ v`,
/// move each letter of `v` leftwards past all of `u`, then re-nest as
/// `v ⊗ u`. The result has the same endpoints and evaluation.
pub fn expand_twists(c: &FormalComposite) -> Result<FormalComposite, CompositeError> {
    c.target()?;
    let mut b = Builder::new(c.source.clone());
    for m in &c.moves {
        let (u, v) = match (&m.kind, m.inverted) {
            (MoveKind::Twist(u, v), false) => (u, v),
            (MoveKind::Twist(u, v), true) => (v, u),
            _ => {
                b.push(m.kind.clone(), m.position.clone(), m.inverted);
                continue;
            }
        };
        let p = &m.position;
        let fl = flatten(&TensorWord::tensor(u.clone(), v.clone()));
        b.extend(fl.moves.iter().map(|x| x.clone().at(x.position.under(p))));
        let mut list: Vec<(usize, Sign)> = letters(u)
            .iter()
            .chain(letters(v).iter())
            .map(|l| (l.generator, l.sign))
            .collect();
        let (nu, nv) = (u.letter_count(), v.letter_count());
        for k in 0..nv {
            // letter nu+k moves to position k
            for j in (k..nu + k).rev() {
                swap_adjacent(&mut b, p, &mut list, j);
            }
        }
        let unfl = flatten(&TensorWord::tensor(v.clone(), u.clone())).inverse()?;
        b.extend(unfl.moves.iter().map(|x| x.clone().at(x.position.under(p))));
    }
    Ok(b.finish())
}

/// Multidegree of a composite's source (and target).
pub fn degree(c: &FormalComposite, n: usize) -> Multidegree {
    multidegree(&c.source, n)
}
