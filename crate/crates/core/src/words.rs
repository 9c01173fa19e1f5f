//! Formal tensor words over a finite set of invertible generators.
//!
//! Generators are addressed by zero-based index internally and printed
//! one-based (`X1`, `X2`, ...), which is also what the word grammar accepts.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("signature must have at least one generator")]
    EmptySignature,
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("generator X{} is outside the signature of {n} generators", .index + 1)]
    GeneratorOutOfRange { index: usize, n: usize },
    #[error("word is not inverse-restricted: dual(...) of a compound subword")]
    NotInverseRestricted,
}

/// The generators `X1..Xn` a word is built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    names: Vec<String>,
}

impl Signature {
    /// Signature with default names `X1..Xn`.
    pub fn new(n: usize) -> Result<Self, WordError> {
        Self::with_names((1..=n).map(|i| format!("X{i}")).collect())
    }

    pub fn with_names(names: Vec<String>) -> Result<Self, WordError> {
        if names.is_empty() {
            return Err(WordError::EmptySignature);
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(WordError::DuplicateName(name.clone()));
            }
        }
        Ok(Self { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// One occurrence of a generator in a word, with its sign and reading position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedLetter {
    pub generator: usize,
    pub sign: Sign,
    pub ordinal: usize,
}

impl SignedLetter {
    pub fn flipped(self) -> Self {
        Self {
            sign: self.sign.flip(),
            ..self
        }
    }
}

impl fmt::Display for SignedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X{}{}", self.generator + 1, self.sign)
    }
}

/// A formal tensor expression.
///
/// `Dual` nodes are kept as written; `letters` interprets them by flipping
/// signs. `DualGen(i)` is the chosen inverse `Xi^-1` of a generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TensorWord {
    Unit,
    Gen(usize),
    DualGen(usize),
    Dual(Box<TensorWord>),
    Tensor(Box<TensorWord>, Box<TensorWord>),
}

impl TensorWord {
    pub fn tensor(left: TensorWord, right: TensorWord) -> Self {
        TensorWord::Tensor(Box::new(left), Box::new(right))
    }

    pub fn dual(inner: TensorWord) -> Self {
        TensorWord::Dual(Box::new(inner))
    }

    /// Right-nested tensor of the given factors; the empty product is `Unit`.
    pub fn right_nested(mut factors: Vec<TensorWord>) -> Self {
        match factors.pop() {
            None => TensorWord::Unit,
            Some(last) => factors
                .into_iter()
                .rev()
                .fold(last, |acc, w| TensorWord::tensor(w, acc)),
        }
    }

    /// Word for a single signed letter: `Gen` for `+`, `DualGen` for `-`.
    pub fn letter(generator: usize, sign: Sign) -> Self {
        match sign {
            Sign::Plus => TensorWord::Gen(generator),
            Sign::Minus => TensorWord::DualGen(generator),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, TensorWord::Unit)
    }

    /// Checks generator indices against the signature.
    pub fn validate(&self, sig: &Signature) -> Result<(), WordError> {
        self.check_indices(sig.len())
    }

    pub(crate) fn check_indices(&self, n: usize) -> Result<(), WordError> {
        match self {
            TensorWord::Unit => Ok(()),
            TensorWord::Gen(i) | TensorWord::DualGen(i) => {
                if *i < n {
                    Ok(())
                } else {
                    Err(WordError::GeneratorOutOfRange { index: *i, n })
                }
            }
            TensorWord::Dual(w) => w.check_indices(n),
            TensorWord::Tensor(a, b) => {
                a.check_indices(n)?;
                b.check_indices(n)
            }
        }
    }

    /// True when `Dual` never occurs (inverses only as `DualGen`).
    pub fn is_inverse_restricted(&self) -> bool {
        match self {
            TensorWord::Unit | TensorWord::Gen(_) | TensorWord::DualGen(_) => true,
            TensorWord::Dual(_) => false,
            TensorWord::Tensor(a, b) => a.is_inverse_restricted() && b.is_inverse_restricted(),
        }
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        match self {
            TensorWord::Unit => None,
            TensorWord::Gen(i) | TensorWord::DualGen(i) => Some(*i),
            TensorWord::Dual(w) => w.max_generator(),
            TensorWord::Tensor(a, b) => a.max_generator().max(b.max_generator()),
        }
    }

    /// Number of letters (generator occurrences).
    pub fn letter_count(&self) -> usize {
        match self {
            TensorWord::Unit => 0,
            TensorWord::Gen(_) | TensorWord::DualGen(_) => 1,
            TensorWord::Dual(w) => w.letter_count(),
            TensorWord::Tensor(a, b) => a.letter_count() + b.letter_count(),
        }
    }

    /// Number of tree nodes.
    pub fn node_count(&self) -> usize {
        match self {
            TensorWord::Unit | TensorWord::Gen(_) | TensorWord::DualGen(_) => 1,
            TensorWord::Dual(w) => 1 + w.node_count(),
            TensorWord::Tensor(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// The formal inverse of an inverse-restricted word: every letter is
    /// inverted and the factor order is mirrored.
    pub fn inverse_word(&self) -> Result<TensorWord, WordError> {
        Ok(match self {
            TensorWord::Unit => TensorWord::Unit,
            TensorWord::Gen(i) => TensorWord::DualGen(*i),
            TensorWord::DualGen(i) => TensorWord::Gen(*i),
            TensorWord::Dual(_) => return Err(WordError::NotInverseRestricted),
            TensorWord::Tensor(a, b) => TensorWord::tensor(b.inverse_word()?, a.inverse_word()?),
        })
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorWord::Unit => f.write_str("S"),
            TensorWord::Gen(i) => write!(f, "X{}", i + 1),
            TensorWord::DualGen(i) => write!(f, "X{}^-1", i + 1),
            TensorWord::Dual(w) => write!(f, "dual({w})"),
            TensorWord::Tensor(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

/// Signed letters of `w` in left-to-right order.
pub fn letters(w: &TensorWord) -> Vec<SignedLetter> {
    fn walk(w: &TensorWord, flipped: bool, out: &mut Vec<SignedLetter>) {
        let sign = |s: Sign| if flipped { s.flip() } else { s };
        match w {
            TensorWord::Unit => {}
            TensorWord::Gen(i) => out.push(SignedLetter {
                generator: *i,
                sign: sign(Sign::Plus),
                ordinal: out.len(),
            }),
            TensorWord::DualGen(i) => out.push(SignedLetter {
                generator: *i,
                sign: sign(Sign::Minus),
                ordinal: out.len(),
            }),
            TensorWord::Dual(inner) => walk(inner, !flipped, out),
            TensorWord::Tensor(a, b) => {
                walk(a, flipped, out);
                walk(b, flipped, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(w, false, &mut out);
    out
}

/// An exponent vector in `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multidegree(pub Vec<i64>);

impl Multidegree {
    pub fn zero(n: usize) -> Self {
        Multidegree(vec![0; n])
    }

    /// The i-th standard basis vector.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Multidegree(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> i64) -> Self {
        let n = self.len().max(other.len());
        Multidegree((0..n).map(|i| f(self.get(i), other.get(i))).collect())
    }
}

impl Add for &Multidegree {
    type Output = Multidegree;
    fn add(self, rhs: &Multidegree) -> Multidegree {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Multidegree {
    type Output = Multidegree;
    fn sub(self, rhs: &Multidegree) -> Multidegree {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Multidegree {
    type Output = Multidegree;
    fn neg(self) -> Multidegree {
        Multidegree(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Signed letter count per generator, as a vector of length `n`.
///
/// Letters with index `>= n` are ignored; callers validate first.
pub fn multidegree(w: &TensorWord, n: usize) -> Multidegree {
    let mut a = vec![0; n];
    for l in letters(w) {
        if l.generator < n {
            a[l.generator] += l.sign.as_i64();
        }
    }
    Multidegree(a)
}

/// The nested normal form `X1^a1 * ... * Xn^an`.
///
/// Each block `x^k` is `x * (x * (... * x))` and the blocks are combined
/// right-nested. Negative exponents use `DualGen`; zero blocks are skipped
/// and the all-zero degree gives `Unit`.
pub fn power_word(a: &Multidegree) -> TensorWord {
    let blocks = a
        .0
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 0)
        .map(|(i, &k)| {
            let sign = if k > 0 { Sign::Plus } else { Sign::Minus };
            let reps = k.unsigned_abs() as usize;
            TensorWord::right_nested(vec![TensorWord::letter(i, sign); reps])
        })
        .collect();
    TensorWord::right_nested(blocks)
}
