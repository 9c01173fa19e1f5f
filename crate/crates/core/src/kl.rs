//! The free symmetric monoidal category with left duals on the generators.
//!
//! A morphism `w1 -> w2` is a correspondence (a perfect matching on the
//! signed letters of `w1` flipped, disjoint-union the letters of `w2`, with
//! every edge running from a `-` vertex to a `+` vertex of the same
//! generator) together with a multiset of discarded loops. Only the
//! incidence structure is stored; vertices are addressed by side and
//! ordinal so repeated generators stay distinguishable.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{letters, Sign, SignedLetter, TensorWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlError {
    #[error("cannot compose: codomain {left} does not match domain {right}")]
    EndpointMismatch { left: String, right: String },
    #[error("trace needs an endomorphism, got {src} -> {dst}")]
    NotEndomorphism { src: String, dst: String },
    #[error("letter lists of {src} and {dst} differ; no identity correspondence")]
    LetterMismatch { src: String, dst: String },
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Domain,
    Codomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub side: Side,
    pub ordinal: usize,
}

impl Vertex {
    pub fn dom(ordinal: usize) -> Self {
        Vertex {
            side: Side::Domain,
            ordinal,
        }
    }

    pub fn cod(ordinal: usize) -> Self {
        Vertex {
            side: Side::Codomain,
            ordinal,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Domain => write!(f, "d{}", self.ordinal),
            Side::Codomain => write!(f, "c{}", self.ordinal),
        }
    }
}

/// A sign- and label-compatible perfect matching between two letter lists.
///
/// `partner` is an involution on the combined index space where domain
/// ordinal `i` is `i` and codomain ordinal `j` is `domain.len() + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Correspondence {
    domain: Vec<SignedLetter>,
    codomain: Vec<SignedLetter>,
    partner: Vec<usize>,
}

impl Correspondence {
    /// Builds a correspondence from undirected vertex pairs, checking that
    /// every vertex is covered exactly once and every pair is compatible.
    pub fn from_pairs(
        domain: Vec<SignedLetter>,
        codomain: Vec<SignedLetter>,
        pairs: &[(Vertex, Vertex)],
    ) -> Result<Self, KlError> {
        let total = domain.len() + codomain.len();
        let mut partner = vec![usize::MAX; total];
        let m = domain.len();
        let index = |v: Vertex| -> Result<usize, KlError> {
            let (idx, len) = match v.side {
                Side::Domain => (v.ordinal, m),
                Side::Codomain => (m + v.ordinal, codomain.len()),
            };
            if v.ordinal >= len {
                return Err(KlError::InvalidCorrespondence(format!("vertex {v} out of range")));
            }
            Ok(idx)
        };
        for &(u, v) in pairs {
            let (a, b) = (index(u)?, index(v)?);
            if a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(KlError::InvalidCorrespondence(format!(
                    "vertex used twice in edge {u}-{v}"
                )));
            }
            partner[a] = b;
            partner[b] = a;
        }
        let corr = Correspondence {
            domain,
            codomain,
            partner,
        };
        corr.check()?;
        Ok(corr)
    }

    fn check(&self) -> Result<(), KlError> {
        for (a, &b) in self.partner.iter().enumerate() {
            if b == usize::MAX {
                return Err(KlError::InvalidCorrespondence(format!(
                    "vertex {} is unmatched",
                    self.vertex(a)
                )));
            }
            if self.partner[b] != a {
                return Err(KlError::InvalidCorrespondence("partner map is not an involution".into()));
            }
            let (la, lb) = (self.letter(a), self.letter(b));
            if la.generator != lb.generator {
                return Err(KlError::InvalidCorrespondence(format!(
                    "edge {}-{} joins different generators",
                    self.vertex(a),
                    self.vertex(b)
                )));
            }
            if self.effective_sign(a) == self.effective_sign(b) {
                return Err(KlError::InvalidCorrespondence(format!(
                    "edge {}-{} joins equal signs",
                    self.vertex(a),
                    self.vertex(b)
                )));
            }
        }
        Ok(())
    }

    /// The order-preserving identity correspondence on a letter list.
    pub fn identity(ls: Vec<SignedLetter>) -> Self {
        let m = ls.len();
        let partner = (0..m).map(|i| i + m).chain(0..m).collect();
        Correspondence {
            domain: ls.clone(),
            codomain: ls,
            partner,
        }
    }

    pub fn domain(&self) -> &[SignedLetter] {
        &self.domain
    }

    pub fn codomain(&self) -> &[SignedLetter] {
        &self.codomain
    }

    fn vertex(&self, idx: usize) -> Vertex {
        if idx < self.domain.len() {
            Vertex::dom(idx)
        } else {
            Vertex::cod(idx - self.domain.len())
        }
    }

    fn letter(&self, idx: usize) -> SignedLetter {
        if idx < self.domain.len() {
            self.domain[idx]
        } else {
            self.codomain[idx - self.domain.len()]
        }
    }

    /// Sign after flipping the domain.
    fn effective_sign(&self, idx: usize) -> Sign {
        if idx < self.domain.len() {
            self.domain[idx].sign.flip()
        } else {
            self.codomain[idx - self.domain.len()].sign
        }
    }

    /// The vertex matched with `v`.
    pub fn partner_of(&self, v: Vertex) -> Vertex {
        let idx = match v.side {
            Side::Domain => v.ordinal,
            Side::Codomain => self.domain.len() + v.ordinal,
        };
        self.vertex(self.partner[idx])
    }

    /// Directed edges `(tail, head)`, tail on the `-` side, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out: Vec<(Vertex, Vertex)> = (0..self.partner.len())
            .filter(|&a| self.effective_sign(a) == Sign::Minus)
            .map(|a| (self.vertex(a), self.vertex(self.partner[a])))
            .collect();
        out.sort();
        out
    }
}

/// Multiset of generators labelling discarded loops (formal traces).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceElement(BTreeMap<usize, u64>);

impl TraceElement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: &[(usize, u64)]) -> Self {
        let mut t = Self::new();
        for &(g, c) in counts {
            t.add_loops(g, c);
        }
        t
    }

    pub fn add_loops(&mut self, generator: usize, count: u64) {
        if count > 0 {
            *self.0.entry(generator).or_insert(0) += count;
        }
    }

    pub fn count(&self, generator: usize) -> u64 {
        self.0.get(&generator).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn plus(&self, other: &TraceElement) -> TraceElement {
        let mut out = self.clone();
        for (&g, &c) in &other.0 {
            out.add_loops(g, c);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.0.iter().map(|(&g, &c)| (g, c))
    }
}

impl fmt::Display for TraceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(g, c)| format!("X{}:{c}", g + 1)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KLMorphism {
    pub src: TensorWord,
    pub dst: TensorWord,
    pub corr: Correspondence,
    pub loops: TraceElement,
}

/// Generating morphisms of the category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elementary {
    Identity(TensorWord),
    /// `u ⊗ v -> v ⊗ u`.
    Symmetry(TensorWord, TensorWord),
    /// Associators and unitors: identity correspondence between two words
    /// with the same letter list.
    Relabel { src: TensorWord, dst: TensorWord },
    /// `S -> Xi^-1 ⊗ Xi`.
    Alpha(usize),
    /// `S -> Xi ⊗ Xi^-1`, the twist after the unit.
    TwistedAlpha(usize),
    /// `Xi ⊗ Xi^-1 -> S`.
    AlphaHat(usize),
    /// `Xi^-1 ⊗ Xi -> S`, the counit after the twist.
    TwistedAlphaHat(usize),
    /// `S -> dual(w) ⊗ w`.
    Coevaluation(TensorWord),
    /// `w ⊗ dual(w) -> S`.
    Evaluation(TensorWord),
}

impl KLMorphism {
    pub fn identity(w: TensorWord) -> Self {
        KLMorphism {
            corr: Correspondence::identity(letters(&w)),
            src: w.clone(),
            dst: w,
            loops: TraceElement::new(),
        }
    }

    pub fn from_pairs(
        src: TensorWord,
        dst: TensorWord,
        pairs: &[(Vertex, Vertex)],
    ) -> Result<Self, KlError> {
        let corr = Correspondence::from_pairs(letters(&src), letters(&dst), pairs)?;
        Ok(KLMorphism {
            src,
            dst,
            corr,
            loops: TraceElement::new(),
        })
    }

    /// Permutation morphism: codomain letter `k` is joined to domain letter
    /// `perm[k]`.
    pub fn permutation(src: TensorWord, dst: TensorWord, perm: &[usize]) -> Result<Self, KlError> {
        let pairs: Vec<_> = perm
            .iter()
            .enumerate()
            .map(|(k, &d)| (Vertex::dom(d), Vertex::cod(k)))
            .collect();
        Self::from_pairs(src, dst, &pairs)
    }

    pub fn with_loops(mut self, loops: TraceElement) -> Self {
        self.loops = self.loops.plus(&loops);
        self
    }

    pub fn is_closed(&self) -> bool {
        self.corr.domain.is_empty() && self.corr.codomain.is_empty()
    }

    /// Structured text record: words, letter lists, edges and loops.
    pub fn to_record(&self) -> String {
        let list = |ls: &[SignedLetter]| {
            ls.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let edges = self
            .corr
            .edges()
            .iter()
            .map(|(t, h)| format!("{t}->{h}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "src: {}\ndst: {}\ndomain: {}\ncodomain: {}\nedges: {}\nloops: {}\n",
            self.src,
            self.dst,
            list(&self.corr.domain),
            list(&self.corr.codomain),
            edges,
            self.loops
        )
    }
}

/// Builds the morphism for an elementary move.
pub fn elementary(e: &Elementary) -> Result<KLMorphism, KlError> {
    use TensorWord::{DualGen, Gen, Unit};
    let t = TensorWord::tensor;
    match e {
        Elementary::Identity(w) => Ok(KLMorphism::identity(w.clone())),
        Elementary::Symmetry(u, v) => {
            let (p, q) = (letters(u).len(), letters(v).len());
            let pairs: Vec<_> = (0..p)
                .map(|k| (Vertex::dom(k), Vertex::cod(q + k)))
                .chain((0..q).map(|k| (Vertex::dom(p + k), Vertex::cod(k))))
                .collect();
            KLMorphism::from_pairs(t(u.clone(), v.clone()), t(v.clone(), u.clone()), &pairs)
        }
        Elementary::Relabel { src, dst } => {
            let (ls, ld) = (letters(src), letters(dst));
            if ls != ld {
                return Err(KlError::LetterMismatch {
                    src: src.to_string(),
                    dst: dst.to_string(),
                });
            }
            Ok(KLMorphism {
                src: src.clone(),
                dst: dst.clone(),
                corr: Correspondence::identity(ls),
                loops: TraceElement::new(),
            })
        }
        Elementary::Alpha(i) => {
            KLMorphism::from_pairs(Unit, t(DualGen(*i), Gen(*i)), &[(Vertex::cod(0), Vertex::cod(1))])
        }
        Elementary::TwistedAlpha(i) => {
            KLMorphism::from_pairs(Unit, t(Gen(*i), DualGen(*i)), &[(Vertex::cod(1), Vertex::cod(0))])
        }
        Elementary::AlphaHat(i) => {
            KLMorphism::from_pairs(t(Gen(*i), DualGen(*i)), Unit, &[(Vertex::dom(0), Vertex::dom(1))])
        }
        Elementary::TwistedAlphaHat(i) => {
            KLMorphism::from_pairs(t(DualGen(*i), Gen(*i)), Unit, &[(Vertex::dom(1), Vertex::dom(0))])
        }
        Elementary::Coevaluation(w) => {
            let n = letters(w).len();
            let pairs: Vec<_> = (0..n).map(|k| (Vertex::cod(k), Vertex::cod(n + k))).collect();
            KLMorphism::from_pairs(Unit, t(TensorWord::dual(w.clone()), w.clone()), &pairs)
        }
        Elementary::Evaluation(w) => {
            let n = letters(w).len();
            let pairs: Vec<_> = (0..n).map(|k| (Vertex::dom(k), Vertex::dom(n + k))).collect();
            KLMorphism::from_pairs(t(w.clone(), TensorWord::dual(w.clone())), Unit, &pairs)
        }
    }
}

/// `g ∘ f`: stack the pictures, join edges through the middle level and
/// discard closed loops there, each contributing its generator once.
pub fn compose(g: &KLMorphism, f: &KLMorphism) -> Result<KLMorphism, KlError> {
    if f.dst != g.src {
        return Err(KlError::EndpointMismatch {
            left: f.dst.to_string(),
            right: g.src.to_string(),
        });
    }
    let m = f.corr.domain.len();
    let k = f.corr.codomain.len();
    let l = g.corr.codomain.len();
    let fp = &f.corr.partner;
    let gp = &g.corr.partner;

    // Walk from a middle vertex, leaving through `g` (towards the bottom)
    // or through `f` (towards the top), until an outer vertex is reached.
    // Returns the outer vertex in the result's index space.
    let mut visited = vec![false; k];
    let walk = |mut mid: usize, mut via_g: bool, visited: &mut [bool]| -> usize {
        loop {
            visited[mid] = true;
            if via_g {
                let q = gp[mid];
                if q >= k {
                    return m + (q - k);
                }
                mid = q;
            } else {
                let p = fp[m + mid];
                if p < m {
                    return p;
                }
                mid = p - m;
            }
            via_g = !via_g;
        }
    };

    let mut partner = vec![usize::MAX; m + l];
    for start in 0..m + l {
        if partner[start] != usize::MAX {
            continue;
        }
        let end = if start < m {
            let p = fp[start];
            if p < m {
                p
            } else {
                walk(p - m, true, &mut visited)
            }
        } else {
            let q = gp[k + (start - m)];
            if q >= k {
                m + (q - k)
            } else {
                walk(q, false, &mut visited)
            }
        };
        partner[start] = end;
        partner[end] = start;
    }

    let mut loops = f.loops.plus(&g.loops);
    for start in 0..k {
        if visited[start] {
            continue;
        }
        // A closed cycle inside the middle level.
        let label = f.corr.codomain[start].generator;
        let mut mid = start;
        let mut via_g = true;
        loop {
            visited[mid] = true;
            mid = if via_g { gp[mid] } else { fp[m + mid] - m };
            via_g = !via_g;
            if mid == start && via_g {
                break;
            }
        }
        loops.add_loops(label, 1);
    }

    Ok(KLMorphism {
        src: f.src.clone(),
        dst: g.dst.clone(),
        corr: Correspondence {
            domain: f.corr.domain.clone(),
            codomain: g.corr.codomain.clone(),
            partner,
        },
        loops,
    })
}

fn renumber(ls: &[SignedLetter], offset: usize) -> impl Iterator<Item = SignedLetter> + '_ {
    ls.iter().map(move |l| SignedLetter {
        ordinal: l.ordinal + offset,
        ..*l
    })
}

/// Side-by-side juxtaposition `f ⊗ g`.
pub fn tensor(f: &KLMorphism, g: &KLMorphism) -> KLMorphism {
    let (mf, kf) = (f.corr.domain.len(), f.corr.codomain.len());
    let (mg, kg) = (g.corr.domain.len(), g.corr.codomain.len());
    let m = mf + mg;
    let map_f = |i: usize| if i < mf { i } else { m + (i - mf) };
    let map_g = |i: usize| if i < mg { mf + i } else { m + kf + (i - mg) };
    let mut partner = vec![0; m + kf + kg];
    for (i, &p) in f.corr.partner.iter().enumerate() {
        partner[map_f(i)] = map_f(p);
    }
    for (i, &p) in g.corr.partner.iter().enumerate() {
        partner[map_g(i)] = map_g(p);
    }
    KLMorphism {
        src: TensorWord::tensor(f.src.clone(), g.src.clone()),
        dst: TensorWord::tensor(f.dst.clone(), g.dst.clone()),
        corr: Correspondence {
            domain: f
                .corr
                .domain
                .iter()
                .copied()
                .chain(renumber(&g.corr.domain, mf))
                .collect(),
            codomain: f
                .corr
                .codomain
                .iter()
                .copied()
                .chain(renumber(&g.corr.codomain, kf))
                .collect(),
            partner,
        },
        loops: f.loops.plus(&g.loops),
    }
}

/// Closes an endomorphism up with the (co)evaluation of its object:
/// `S -> dual(w)⊗w -> dual(w)⊗w -> w⊗dual(w) -> S`.
pub fn trace_kl(f: &KLMorphism) -> Result<KLMorphism, KlError> {
    if f.src != f.dst {
        return Err(KlError::NotEndomorphism {
            src: f.src.to_string(),
            dst: f.dst.to_string(),
        });
    }
    let w = f.src.clone();
    let dual = TensorWord::dual(w.clone());
    let coev = elementary(&Elementary::Coevaluation(w.clone()))?;
    let mid = tensor(&KLMorphism::identity(dual.clone()), f);
    let sym = elementary(&Elementary::Symmetry(dual, w.clone()))?;
    let ev = elementary(&Elementary::Evaluation(w))?;
    let out = compose(&mid, &coev)?;
    let out = compose(&sym, &out)?;
    compose(&ev, &out)
}
