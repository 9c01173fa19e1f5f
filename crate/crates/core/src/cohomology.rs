//! Normalized bar complex and the Eilenberg-MacLane complex `E` of an
//! abelian group: integer differentials, homology, cohomology with finite
//! coefficients, trivializations of associators and the classification of
//! standard ring structures.
//!
//! Coefficients `N = Z/m1 x ... x Z/mk` are handled one cyclic factor at a
//! time. For a factor `Z/m`, cocycles form the lattice
//! `L_Z = {f : f·d ≡ 0 mod m}`, read off the Smith form of `d`, and
//! cohomology is `L_Z / (im δ + m Z^r)`, itself a Smith form computation.

mod smith;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{Elem, FiniteAbelianGroup, GroupError};

pub use smith::{gcd, smith, solve_linear_mod, IntMatrix, Smith};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("degree {0} is outside the supported range")]
    Degree(usize),
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("cochain has arity {got}, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("cochain is not normalized")]
    NotNormalized,
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// A free generator of the bar or Eilenberg-MacLane complex; entries are
/// element indices of `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    /// `[a1|...|ak]`.
    Bar(Vec<usize>),
    /// `[a|b]` in degree 3.
    Twist(usize, usize),
    /// `[a|b|c]_1` in degree 4.
    Hex1(usize, usize, usize),
    /// `[a|b|c]_2` in degree 4.
    Hex2(usize, usize, usize),
    /// `[a|b]` in degree 4.
    Symmetry(usize, usize),
}

impl Symbol {
    pub fn entries(&self) -> Vec<usize> {
        match self {
            Symbol::Bar(v) => v.clone(),
            Symbol::Twist(a, b) | Symbol::Symmetry(a, b) => vec![*a, *b],
            Symbol::Hex1(a, b, c) | Symbol::Hex2(a, b, c) => vec![*a, *b, *c],
        }
    }

    /// Some entry is the zero element (index 0).
    pub fn is_degenerate(&self) -> bool {
        self.entries().contains(&0)
    }

    pub fn degree(&self) -> usize {
        match self {
            Symbol::Bar(v) => v.len(),
            Symbol::Twist(..) => 3,
            _ => 4,
        }
    }

    pub fn render(&self, a: &FiniteAbelianGroup) -> String {
        let show = |i: usize| {
            let e = a.element_at(i);
            if e.len() == 1 {
                e[0].to_string()
            } else {
                let parts: Vec<String> = e.iter().map(i64::to_string).collect();
                format!("({})", parts.join(","))
            }
        };
        let body: Vec<String> = self.entries().into_iter().map(show).collect();
        let body = body.join("|");
        match self {
            Symbol::Bar(_) => format!("[{body}]"),
            Symbol::Twist(..) => format!("[{body}]'"),
            Symbol::Hex1(..) => format!("[{body}]_1"),
            Symbol::Hex2(..) => format!("[{body}]_2"),
            Symbol::Symmetry(..) => format!("[{body}]''"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexKind {
    Bar,
    EilenbergMacLane,
}

/// Sums in `A` by element index.
struct AddTable {
    size: usize,
    sum: Vec<usize>,
}

impl AddTable {
    fn new(a: &FiniteAbelianGroup) -> Result<Self, CohomologyError> {
        let els = a.elements()?;
        let size = els.len();
        let mut sum = Vec::with_capacity(size * size);
        for x in &els {
            for y in &els {
                sum.push(a.index_of(&a.add(x, y)));
            }
        }
        Ok(AddTable { size, sum })
    }

    fn add(&self, x: usize, y: usize) -> usize {
        self.sum[x * self.size + y]
    }
}

fn boundary(s: &Symbol, t: &AddTable) -> Vec<(i128, Symbol)> {
    use Symbol::*;
    let p = |x, y| t.add(x, y);
    match s {
        Bar(v) => {
            let k = v.len();
            if k <= 1 {
                return Vec::new();
            }
            let mut out = vec![(1, Bar(v[1..].to_vec()))];
            for i in 0..k - 1 {
                let mut w = v[..i].to_vec();
                w.push(p(v[i], v[i + 1]));
                w.extend_from_slice(&v[i + 2..]);
                out.push((if i % 2 == 0 { -1 } else { 1 }, Bar(w)));
            }
            out.push((if k % 2 == 0 { 1 } else { -1 }, Bar(v[..k - 1].to_vec())));
            out
        }
        Twist(a, b) => vec![(1, Bar(vec![*a, *b])), (-1, Bar(vec![*b, *a]))],
        Hex1(a, b, c) => {
            let (a, b, c) = (*a, *b, *c);
            vec![
                (1, Bar(vec![a, b, c])),
                (-1, Bar(vec![a, c, b])),
                (1, Bar(vec![c, a, b])),
                (-1, Twist(b, c)),
                (1, Twist(p(a, b), c)),
                (-1, Twist(a, c)),
            ]
        }
        Hex2(a, b, c) => {
            let (a, b, c) = (*a, *b, *c);
            vec![
                (1, Bar(vec![a, b, c])),
                (-1, Bar(vec![b, a, c])),
                (1, Bar(vec![b, c, a])),
                (1, Twist(a, b)),
                (-1, Twist(a, p(b, c))),
                (1, Twist(a, c)),
            ]
        }
        Symmetry(a, b) => vec![(1, Twist(*a, *b)), (1, Twist(*b, *a))],
    }
}

fn tuples(size: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..size).map(move |x| {
                    let mut t2 = t.clone();
                    t2.push(x);
                    t2
                })
            })
            .collect();
    }
    out
}

/// A chain complex in degrees `0..=4` with `C_0 = 0`.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub kind: ComplexKind,
    pub normalized: bool,
    pub group: FiniteAbelianGroup,
    pub bases: Vec<Vec<Symbol>>,
    index: Vec<HashMap<Symbol, usize>>,
    /// `d[k]: C_k -> C_{k-1}`, with rows indexed by `C_{k-1}`.
    pub d: Vec<IntMatrix>,
}

pub const TOP_DEGREE: usize = 4;

impl ChainComplex {
    /// The full or normalized (modulo degenerate symbols) complex.
    pub fn new(a: &FiniteAbelianGroup, kind: ComplexKind, normalized: bool) -> Result<Self, CohomologyError> {
        let table = AddTable::new(a)?;
        let size = table.size;
        let mut bases: Vec<Vec<Symbol>> = vec![Vec::new()];
        for k in 1..=TOP_DEGREE {
            let mut b: Vec<Symbol> = tuples(size, k).into_iter().map(Symbol::Bar).collect();
            if kind == ComplexKind::EilenbergMacLane {
                if k == 3 {
                    b.extend(tuples(size, 2).into_iter().map(|t| Symbol::Twist(t[0], t[1])));
                }
                if k == 4 {
                    let t3 = tuples(size, 3);
                    b.extend(t3.iter().map(|t| Symbol::Hex1(t[0], t[1], t[2])));
                    b.extend(t3.iter().map(|t| Symbol::Hex2(t[0], t[1], t[2])));
                    b.extend(tuples(size, 2).into_iter().map(|t| Symbol::Symmetry(t[0], t[1])));
                }
            }
            if normalized {
                b.retain(|s| !s.is_degenerate());
            }
            bases.push(b);
        }
        let index: Vec<HashMap<Symbol, usize>> = bases
            .iter()
            .map(|b| b.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        let mut d = vec![IntMatrix::zeros(0, bases[0].len())];
        for k in 1..=TOP_DEGREE {
            let mut m = IntMatrix::zeros(bases[k - 1].len(), bases[k].len());
            if k >= 2 {
                for (j, s) in bases[k].iter().enumerate() {
                    for (coef, t) in boundary(s, &table) {
                        // Degenerate terms vanish in the normalized quotient.
                        if let Some(&i) = index[k - 1].get(&t) {
                            m.add_to(i, j, coef);
                        }
                    }
                }
            }
            d.push(m);
        }
        Ok(ChainComplex {
            kind,
            normalized,
            group: a.clone(),
            bases,
            index,
            d,
        })
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases[k].len()
    }

    pub fn position(&self, k: usize, s: &Symbol) -> Option<usize> {
        self.index[k].get(s).copied()
    }

    /// `d_k ∘ d_{k+1} = 0` for every `k`, by exact matrix products.
    pub fn check_d_squared(&self) -> Result<bool, CohomologyError> {
        for k in 1..TOP_DEGREE {
            if !self.d[k].mul(&self.d[k + 1])?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Integer homology `H_k`.
    pub fn homology(&self, k: usize) -> Result<FiniteAbelianGroup, CohomologyError> {
        if k == 0 || k >= TOP_DEGREE {
            return Err(CohomologyError::Degree(k));
        }
        let out = smith(&self.d[k], false, false)?;
        let inc = smith(&self.d[k + 1], false, false)?;
        let free = self.dim(k) - out.rank() - inc.rank();
        let mut moduli: Vec<u64> = inc.diagonal.iter().map(|&x| x as u64).collect();
        moduli.extend(std::iter::repeat_n(0, free));
        Ok(FiniteAbelianGroup::new(moduli).canonical())
    }

    /// Cohomology `H^k(Hom(C, N))` for finite `N`, with cocycle and class
    /// representatives.
    pub fn cohomology(&self, k: usize, n: &FiniteAbelianGroup) -> Result<CohomologyGroup, CohomologyError> {
        if k == 0 || k >= TOP_DEGREE {
            return Err(CohomologyError::Degree(k));
        }
        if !n.is_finite() {
            return Err(GroupError::Infinite(n.to_string()).into());
        }
        let r = self.dim(k);
        let next = smith(&self.d[k + 1], true, false)?;
        let mut cocycles = Vec::new();
        let mut classes = Vec::new();
        for (slot, &m) in n.moduli().iter().enumerate() {
            let res = cohomology_mod(&self.d[k], &next, r, m as i128)?;
            let embed = |v: Vec<i128>| -> Vec<Elem> {
                v.into_iter()
                    .map(|x| {
                        let mut e = n.zero();
                        e[slot] = x as i64;
                        e
                    })
                    .collect()
            };
            cocycles.extend(res.cocycles.into_iter().map(|(o, v)| (o as u64, embed(v))));
            classes.extend(res.classes.into_iter().map(|(o, v)| (o as u64, embed(v))));
        }
        let group = FiniteAbelianGroup::new(classes.iter().map(|c| c.0).collect()).canonical();
        Ok(CohomologyGroup {
            degree: k,
            group,
            cocycles,
            classes,
        })
    }

    /// `δf = f ∘ d_{k+1}` for a cochain given on the basis of `C_k`.
    pub fn coboundary(&self, k: usize, n: &FiniteAbelianGroup, f: &[Elem]) -> Result<Vec<Elem>, CohomologyError> {
        if k >= TOP_DEGREE {
            return Err(CohomologyError::Degree(k));
        }
        let m = &self.d[k + 1];
        let mut out = vec![n.zero(); m.cols()];
        for slot in 0..n.rank() {
            let v: Vec<i128> = f.iter().map(|e| e[slot] as i128).collect();
            for (o, x) in out.iter_mut().zip(m.left_apply(&v)?) {
                o[slot] = x as i64;
            }
        }
        for o in &mut out {
            n.reduce(o);
        }
        Ok(out)
    }

    /// Some `f` on `C_k` with `δf = target`, or `None`.
    pub fn solve_coboundary(
        &self,
        k: usize,
        n: &FiniteAbelianGroup,
        target: &[Elem],
    ) -> Result<Option<Vec<Elem>>, CohomologyError> {
        if k >= TOP_DEGREE {
            return Err(CohomologyError::Degree(k));
        }
        let m = &self.d[k + 1];
        let s = smith(m, true, true)?;
        let mut out = vec![n.zero(); m.rows()];
        for (slot, &q) in n.moduli().iter().enumerate() {
            let rhs: Vec<i128> = target.iter().map(|e| e[slot] as i128).collect();
            match solve_mod(&s, &rhs, q as i128)? {
                Some(x) => {
                    for (o, v) in out.iter_mut().zip(x) {
                        o[slot] = v as i64;
                    }
                }
                None => return Ok(None),
            }
        }
        if self.coboundary(k, n, &out)? != target.iter().map(|e| n.reduced(e.clone())).collect::<Vec<_>>() {
            return Err(CohomologyError::Internal("solver certificate failed".into()));
        }
        Ok(Some(out))
    }
}

struct ModResult {
    cocycles: Vec<(i128, Vec<i128>)>,
    classes: Vec<(i128, Vec<i128>)>,
}

fn reduce_vec(v: &mut [i128], m: i128) {
    for x in v {
        *x = x.rem_euclid(m);
    }
}

fn cohomology_mod(prev: &IntMatrix, next: &Smith, r: usize, m: i128) -> Result<ModResult, CohomologyError> {
    let u = next.u.as_ref().expect("row transform");
    let u_inv = next.u_inv.as_ref().expect("row transform");
    // L_Z has basis c_i u_i.
    let c: Vec<i128> = (0..r)
        .map(|i| if i < next.rank() { m / gcd(next.diagonal[i], m) } else { 1 })
        .collect();
    let basis_vec = |y: &[i128]| -> Result<Vec<i128>, CohomologyError> {
        let coeffs: Vec<i128> = y.iter().zip(&c).map(|(a, b)| a * b).collect();
        let mut v = u.left_apply(&coeffs)?;
        reduce_vec(&mut v, m);
        Ok(v)
    };
    let mut cocycles = Vec::new();
    for i in 0..r {
        let order = m / c[i];
        if order > 1 {
            let mut y = vec![0; r];
            y[i] = 1;
            cocycles.push((order, basis_vec(&y)?));
        }
    }
    // Coboundaries and m Z^r, written in the L_Z basis.
    let mut rows = Vec::new();
    for j in 0..prev.rows() {
        let b = u_inv.left_apply(prev.row(j))?;
        let mut y = Vec::with_capacity(r);
        for (x, &ci) in b.iter().zip(&c) {
            if x % ci != 0 {
                return Err(CohomologyError::Internal("coboundary outside the cocycle lattice".into()));
            }
            y.push(x / ci);
        }
        rows.push(y);
    }
    for i in 0..r {
        let mut y = vec![0; r];
        y[i] = m / c[i];
        rows.push(y);
    }
    let mut classes = Vec::new();
    if r > 0 {
        let y = IntMatrix::from_rows(rows);
        let s = smith(&y, false, true)?;
        let v_inv = s.v_inv.as_ref().expect("column transform");
        for (i, &order) in s.diagonal.iter().enumerate() {
            if order > 1 {
                classes.push((order, basis_vec(v_inv.row(i))?));
            }
        }
    }
    Ok(ModResult { cocycles, classes })
}

/// Solves `x · M ≡ rhs (mod m)` given the Smith form `U M V = D`.
fn solve_mod(s: &Smith, rhs: &[i128], m: i128) -> Result<Option<Vec<i128>>, CohomologyError> {
    let u = s.u.as_ref().expect("row transform");
    let v = s.v.as_ref().expect("column transform");
    // x U^{-1} D = rhs V.
    let mut t = Vec::with_capacity(v.cols());
    for j in 0..v.cols() {
        let mut acc = 0i128;
        for (i, &x) in rhs.iter().enumerate() {
            acc = (acc + x.rem_euclid(m) * v.get(i, j).rem_euclid(m)).rem_euclid(m);
        }
        t.push(acc);
    }
    let mut g = vec![0i128; u.rows()];
    for (j, &tj) in t.iter().enumerate() {
        if j < s.rank() {
            match solve_linear_mod(s.diagonal[j], tj, m) {
                Some(x) => g[j] = x,
                None => return Ok(None),
            }
        } else if tj != 0 {
            return Ok(None);
        }
    }
    let mut x = u.left_apply(&g)?;
    reduce_vec(&mut x, m);
    Ok(Some(x))
}

/// `H^k` with explicit generators; `classes` is a direct-sum basis of the
/// cohomology group (orders > 1), `cocycles` one of the cocycle group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub group: FiniteAbelianGroup,
    pub cocycles: Vec<(u64, Vec<Elem>)>,
    pub classes: Vec<(u64, Vec<Elem>)>,
}

impl CohomologyGroup {
    pub fn order(&self) -> u128 {
        self.classes.iter().map(|c| c.0 as u128).product()
    }

    pub fn cocycle_order(&self) -> u128 {
        self.cocycles.iter().map(|c| c.0 as u128).product()
    }
}

/// All `Σ k_i g_i` for a direct-sum basis `(order_i, g_i)`.
pub fn span(n: &FiniteAbelianGroup, len: usize, basis: &[(u64, Vec<Elem>)]) -> Vec<Vec<Elem>> {
    let mut out = vec![vec![n.zero(); len]];
    for (order, g) in basis {
        let mut next = Vec::with_capacity(out.len() * *order as usize);
        for base in &out {
            for k in 0..*order as i64 {
                next.push(
                    base.iter()
                        .zip(g)
                        .map(|(x, y)| n.add(x, &n.scale(k, y)))
                        .collect(),
                );
            }
        }
        out = next;
    }
    out
}

/// A bar cochain `A^arity -> N` as a full table in the index order of `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cochain {
    pub arity: usize,
    pub table: Vec<Elem>,
}

impl Cochain {
    pub fn zero(a: &FiniteAbelianGroup, n: &FiniteAbelianGroup, arity: usize) -> Result<Self, CohomologyError> {
        let size = a.order().ok_or_else(|| GroupError::Infinite(a.to_string()))? as usize;
        Ok(Cochain {
            arity,
            table: vec![n.zero(); size.pow(arity as u32)],
        })
    }

    pub fn from_fn(
        a: &FiniteAbelianGroup,
        n: &FiniteAbelianGroup,
        arity: usize,
        f: impl Fn(&[Elem]) -> Elem,
    ) -> Result<Self, CohomologyError> {
        let els = a.elements()?;
        let table = tuples(els.len(), arity)
            .into_iter()
            .map(|t| {
                let args: Vec<Elem> = t.iter().map(|&i| els[i].clone()).collect();
                n.reduced(f(&args))
            })
            .collect();
        Ok(Cochain { arity, table })
    }

    fn offset(a: &FiniteAbelianGroup, idx: &[usize]) -> usize {
        let size = a.order().unwrap_or(0) as usize;
        idx.iter().fold(0, |acc, &i| acc * size + i)
    }

    pub fn at(&self, a: &FiniteAbelianGroup, idx: &[usize]) -> &Elem {
        &self.table[Self::offset(a, idx)]
    }

    pub fn get(&self, a: &FiniteAbelianGroup, args: &[&[i64]]) -> &Elem {
        let idx: Vec<usize> = args.iter().map(|x| a.index_of(x)).collect();
        self.at(a, &idx)
    }

    pub fn is_normalized(&self, a: &FiniteAbelianGroup, n: &FiniteAbelianGroup) -> bool {
        let size = a.order().unwrap_or(0) as usize;
        tuples(size, self.arity)
            .iter()
            .all(|t| !t.contains(&0) || n.is_zero(self.at(a, t)))
    }

    pub fn add(&self, n: &FiniteAbelianGroup, other: &Cochain) -> Cochain {
        Cochain {
            arity: self.arity,
            table: self.table.iter().zip(&other.table).map(|(x, y)| n.add(x, y)).collect(),
        }
    }

    pub fn sub(&self, n: &FiniteAbelianGroup, other: &Cochain) -> Cochain {
        Cochain {
            arity: self.arity,
            table: self.table.iter().zip(&other.table).map(|(x, y)| n.sub(x, y)).collect(),
        }
    }

    /// Restriction to the basis of `C_arity` of a bar or EM complex.
    pub fn to_vector(&self, cx: &ChainComplex) -> Vec<Elem> {
        cx.bases[self.arity]
            .iter()
            .map(|s| match s {
                Symbol::Bar(v) => self.at(&cx.group, v).clone(),
                _ => panic!("bar cochain evaluated on a non-bar symbol"),
            })
            .collect()
    }

    /// Bar part of a cochain on `C_arity`; symbols missing from a
    /// normalized basis read as zero.
    pub fn from_vector(cx: &ChainComplex, n: &FiniteAbelianGroup, arity: usize, v: &[Elem]) -> Result<Self, CohomologyError> {
        let mut c = Cochain::zero(&cx.group, n, arity)?;
        for (s, x) in cx.bases[arity].iter().zip(v) {
            if let Symbol::Bar(idx) = s {
                let o = Self::offset(&cx.group, idx);
                c.table[o] = x.clone();
            }
        }
        Ok(c)
    }
}

/// A degree-3 cochain on `E`: `α` on `[a|b|c]` and `β` on `[a|b]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmCochain {
    pub alpha: Cochain,
    pub beta: Cochain,
}

impl EmCochain {
    pub fn from_vector(cx: &ChainComplex, n: &FiniteAbelianGroup, v: &[Elem]) -> Result<Self, CohomologyError> {
        let alpha = Cochain::from_vector(cx, n, 3, v)?;
        let mut beta = Cochain::zero(&cx.group, n, 2)?;
        for (s, x) in cx.bases[3].iter().zip(v) {
            if let Symbol::Twist(p, q) = s {
                let o = Cochain::offset(&cx.group, &[*p, *q]);
                beta.table[o] = x.clone();
            }
        }
        Ok(EmCochain { alpha, beta })
    }

    pub fn to_vector(&self, cx: &ChainComplex) -> Vec<Elem> {
        cx.bases[3]
            .iter()
            .map(|s| match s {
                Symbol::Bar(v) => self.alpha.at(&cx.group, v).clone(),
                Symbol::Twist(p, q) => self.beta.at(&cx.group, &[*p, *q]).clone(),
                _ => unreachable!("degree-3 symbols"),
            })
            .collect()
    }
}

/// The degree-4 symbols on which `(α,β)` fails the cocycle condition,
/// evaluated directly from the boundary formulas.
pub fn em_cocycle_defects(
    a: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
    c: &EmCochain,
) -> Result<Vec<(Symbol, Elem)>, CohomologyError> {
    let table = AddTable::new(a)?;
    let size = table.size;
    let mut symbols: Vec<Symbol> = tuples(size, 4).into_iter().map(Symbol::Bar).collect();
    for t in tuples(size, 3) {
        symbols.push(Symbol::Hex1(t[0], t[1], t[2]));
        symbols.push(Symbol::Hex2(t[0], t[1], t[2]));
    }
    symbols.extend(tuples(size, 2).into_iter().map(|t| Symbol::Symmetry(t[0], t[1])));
    let mut out = Vec::new();
    for s in symbols {
        let mut acc = n.zero();
        for (coef, t) in boundary(&s, &table) {
            let v = match &t {
                Symbol::Bar(idx) => c.alpha.at(a, idx),
                Symbol::Twist(p, q) => c.beta.at(a, &[*p, *q]),
                _ => unreachable!("degree-3 symbols"),
            };
            acc = n.add(&acc, &n.scale(coef as i64, v));
        }
        if !n.is_zero(&acc) {
            out.push((s, acc));
        }
    }
    Ok(out)
}

/// Bar differential `δ` of a cochain of arity at most 3.
pub fn bar_delta(a: &FiniteAbelianGroup, n: &FiniteAbelianGroup, c: &Cochain) -> Result<Cochain, CohomologyError> {
    let k = c.arity;
    if k > 3 {
        return Err(CohomologyError::Degree(k));
    }
    if k == 0 {
        return Cochain::zero(a, n, 1);
    }
    let table = AddTable::new(a)?;
    let size = table.size;
    let mut out = Cochain::zero(a, n, k + 1)?;
    for (pos, t) in tuples(size, k + 1).into_iter().enumerate() {
        let mut acc = n.zero();
        for (coef, s) in boundary(&Symbol::Bar(t), &table) {
            if let Symbol::Bar(idx) = s {
                acc = n.add(&acc, &n.scale(coef as i64, c.at(a, &idx)));
            }
        }
        out.table[pos] = acc;
    }
    Ok(out)
}

/// `H_k(E)` over the integers, from the full complex.
pub fn em_homology(a: &FiniteAbelianGroup, k: usize) -> Result<FiniteAbelianGroup, CohomologyError> {
    ChainComplex::new(a, ComplexKind::EilenbergMacLane, false)?.homology(k)
}

/// `H^k_EM(A;N)` computed on normalized cochains.
pub fn em_cohomology(
    a: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
    k: usize,
) -> Result<(ChainComplex, CohomologyGroup), CohomologyError> {
    let cx = ChainComplex::new(a, ComplexKind::EilenbergMacLane, true)?;
    let h = cx.cohomology(k, n)?;
    Ok((cx, h))
}

/// `Hom(Z/p, Z/q)` and `Ext(Z/p, Z/q)` are both `Z/gcd(p,q)`; `p = 0`
/// means `Z`.
pub fn universal_coefficients(
    h_k: &FiniteAbelianGroup,
    h_k_minus_1: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
) -> FiniteAbelianGroup {
    let g = |p: u64, q: u64| if p == 0 { q } else { crate::group::gcd(p, q) };
    let mut moduli = Vec::new();
    for &p in h_k.moduli() {
        for &q in n.moduli() {
            moduli.push(g(p, q));
        }
    }
    for &p in h_k_minus_1.moduli().iter().filter(|&&p| p != 0) {
        for &q in n.moduli() {
            moduli.push(g(p, q));
        }
    }
    FiniteAbelianGroup::new(moduli).canonical()
}

fn check_arity(c: &Cochain, expected: usize) -> Result<(), CohomologyError> {
    if c.arity != expected {
        return Err(CohomologyError::Arity {
            got: c.arity,
            expected,
        });
    }
    Ok(())
}

/// Normalized `σ` with `δσ = α`, as a particular solution plus the group
/// `Z²_norm(A;N)` acting on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trivializations {
    pub particular: Option<Cochain>,
    /// Direct-sum basis of `Z²_norm(A;N)` with orders.
    pub cocycles: Vec<(u64, Cochain)>,
}

impl Trivializations {
    pub fn count(&self) -> u128 {
        if self.particular.is_none() {
            0
        } else {
            self.cocycles.iter().map(|c| c.0 as u128).product()
        }
    }

    /// Every solution, or `None` past `limit`.
    pub fn enumerate(&self, n: &FiniteAbelianGroup, limit: u128) -> Option<Vec<Cochain>> {
        let Some(p) = &self.particular else {
            return Some(Vec::new());
        };
        if self.count() > limit {
            return None;
        }
        let mut out = vec![p.clone()];
        for (order, g) in &self.cocycles {
            let mut next = Vec::new();
            for base in &out {
                let mut cur = base.clone();
                for _ in 0..*order {
                    next.push(cur.clone());
                    cur = cur.add(n, g);
                }
            }
            out = next;
        }
        Some(out)
    }
}

pub fn trivialize(
    a: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
    alpha: &Cochain,
) -> Result<Trivializations, CohomologyError> {
    check_arity(alpha, 3)?;
    if !alpha.is_normalized(a, n) {
        return Err(CohomologyError::NotNormalized);
    }
    let cx = ChainComplex::new(a, ComplexKind::Bar, true)?;
    let z2 = cx.cohomology(2, n)?;
    let cocycles = z2
        .cocycles
        .iter()
        .map(|(o, v)| Ok((*o, Cochain::from_vector(&cx, n, 2, v)?)))
        .collect::<Result<Vec<_>, CohomologyError>>()?;
    let particular = cx
        .solve_coboundary(2, n, &alpha.to_vector(&cx))?
        .map(|v| Cochain::from_vector(&cx, n, 2, &v))
        .transpose()?;
    Ok(Trivializations { particular, cocycles })
}

/// Input to the classification of standard ring structures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationProblem {
    pub a: FiniteAbelianGroup,
    pub n: FiniteAbelianGroup,
    /// Associator of a witnessing model; trivializations of it are
    /// classified. Without it, `α = 0`.
    pub alpha: Option<Cochain>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// `H²(A;N)` from normalized cochains.
    pub h2: FiniteAbelianGroup,
    /// One trivialization per class.
    pub representatives: Vec<Cochain>,
}

pub fn classify_rings(p: &ClassificationProblem) -> Result<Classification, CohomologyError> {
    let (a, n) = (&p.a, &p.n);
    let alpha = match &p.alpha {
        Some(x) => x.clone(),
        None => Cochain::zero(a, n, 3)?,
    };
    let triv = trivialize(a, n, &alpha)?;
    let base = triv
        .particular
        .ok_or_else(|| CohomologyError::Internal("associator admits no trivialization".into()))?;
    let cx = ChainComplex::new(a, ComplexKind::Bar, true)?;
    let h2 = cx.cohomology(2, n)?;
    let representatives = span(n, cx.dim(2), &h2.classes)
        .into_iter()
        .map(|v| Ok(base.add(n, &Cochain::from_vector(&cx, n, 2, &v)?)))
        .collect::<Result<Vec<_>, CohomologyError>>()?;
    Ok(Classification {
        h2: h2.group,
        representatives,
    })
}

/// A normalized `u: A -> N` with `δu = σ1 - σ2`, witnessing that two
/// trivializations give isomorphic standard rings.
pub fn standard_isomorphism(
    a: &FiniteAbelianGroup,
    n: &FiniteAbelianGroup,
    s1: &Cochain,
    s2: &Cochain,
) -> Result<Option<Cochain>, CohomologyError> {
    check_arity(s1, 2)?;
    check_arity(s2, 2)?;
    let cx = ChainComplex::new(a, ComplexKind::Bar, true)?;
    let diff = s1.sub(n, s2);
    cx
        .solve_coboundary(1, n, &diff.to_vector(&cx))?
        .map(|v| Cochain::from_vector(&cx, n, 1, &v))
        .transpose()
}

/// `|H²(A;N)|` by listing all normalized 2-cocycles and 1-coboundaries;
/// `None` when there are more than `limit` cochains.
pub fn h2_order_brute_force(a: &FiniteAbelianGroup, n: &FiniteAbelianGroup, limit: u128) -> Result<Option<u128>, CohomologyError> {
    let size = a.order().ok_or_else(|| GroupError::Infinite(a.to_string()))? as usize;
    let nels = n.elements()?;
    let cells = (size - 1) * (size - 1);
    let total = (nels.len() as u128).checked_pow(cells as u32);
    if total.is_none_or(|t| t > limit) {
        return Ok(None);
    }
    let table = AddTable::new(a)?;
    let mut z2 = 0u128;
    let mut digits = vec![0usize; cells];
    loop {
        let s = |x: usize, y: usize| -> &Elem {
            if x == 0 || y == 0 {
                &nels[0]
            } else {
                &nels[digits[(x - 1) * (size - 1) + (y - 1)]]
            }
        };
        let mut ok = true;
        'check: for x in 1..size {
            for y in 1..size {
                for z in 1..size {
                    let v = n.add(
                        &n.sub(s(y, z), s(table.add(x, y), z)),
                        &n.sub(s(x, table.add(y, z)), s(x, y)),
                    );
                    if !n.is_zero(&v) {
                        ok = false;
                        break 'check;
                    }
                }
            }
        }
        z2 += ok as u128;
        let mut i = 0;
        while i < cells {
            digits[i] += 1;
            if digits[i] < nels.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == cells {
            break;
        }
    }
    // Coboundaries δu of normalized u: A -> N.
    let mut b2 = std::collections::HashSet::new();
    let mut digits = vec![0usize; size - 1];
    loop {
        let u = |x: usize| if x == 0 { &nels[0] } else { &nels[digits[x - 1]] };
        let d: Vec<Elem> = (1..size)
            .flat_map(|x| (1..size).map(move |y| (x, y)))
            .map(|(x, y)| n.add(&n.sub(u(x), u(table.add(x, y))), u(y)))
            .collect();
        b2.insert(d);
        let mut i = 0;
        while i < size - 1 {
            digits[i] += 1;
            if digits[i] < nels.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == size - 1 {
            break;
        }
    }
    Ok(Some(z2 / b2.len() as u128))
}

/// Alternating (antisymmetric, bilinear) forms `A x A -> N`, listed by
/// their values on pairs of generators of the cyclic factors.
pub fn alt_bilinear_forms(a: &FiniteAbelianGroup, n: &FiniteAbelianGroup) -> Result<Vec<Cochain>, CohomologyError> {
    let r = a.rank();
    let nels = n.elements()?;
    let order_ok = |k: u64, x: &Elem| n.is_zero(&n.scale(k as i64, x));
    // Free entries: b(e_i, e_j) for i <= j.
    let mut pairs = Vec::new();
    for i in 0..r {
        for j in i..r {
            pairs.push((i, j));
        }
    }
    let mut choices: Vec<Vec<Elem>> = Vec::new();
    for &(i, j) in &pairs {
        let k = crate::group::gcd(a.moduli()[i], a.moduli()[j]);
        let k = if i == j { crate::group::gcd(k, 2) } else { k };
        choices.push(nels.iter().filter(|x| order_ok(k, x)).cloned().collect());
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; pairs.len()];
    loop {
        let mut b = vec![vec![n.zero(); r]; r];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let v = choices[p][digits[p]].clone();
            b[j][i] = n.neg(&v);
            b[i][j] = v;
        }
        out.push(Cochain::from_fn(a, n, 2, |xy| {
            let mut acc = n.zero();
            for i in 0..r {
                for j in 0..r {
                    acc = n.add(&acc, &n.scale(xy[0][i] * xy[1][j], &b[i][j]));
                }
            }
            acc
        })?);
        let mut p = 0;
        while p < pairs.len() {
            digits[p] += 1;
            if digits[p] < choices[p].len() {
                break;
            }
            digits[p] = 0;
            p += 1;
        }
        if p == pairs.len() {
            break;
        }
    }
    Ok(out)
}

/// `Hom(A/2A, N)`, as tuples of images of the cyclic generators of `A`.
pub fn hom_mod_two(a: &FiniteAbelianGroup, n: &FiniteAbelianGroup) -> Result<Vec<Vec<Elem>>, CohomologyError> {
    let nels = n.elements()?;
    let mut out: Vec<Vec<Elem>> = vec![Vec::new()];
    for &m in a.moduli() {
        let k = crate::group::gcd(m, 2) as i64;
        let opts: Vec<Elem> = nels.iter().filter(|x| n.is_zero(&n.scale(k, x))).cloned().collect();
        out = out
            .into_iter()
            .flat_map(|t| {
                opts.iter().map(move |o| {
                    let mut t2 = t.clone();
                    t2.push(o.clone());
                    t2
                })
            })
            .collect();
    }
    Ok(out)
}

/// Comparison of EM cocycles with the bar complex: every normalized EM
/// 3-cocycle has a bar component that is a coboundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarComparison {
    pub em_h3: FiniteAbelianGroup,
    /// Cocycle generators checked, and how many were trivialized.
    pub generators: usize,
    pub trivialized: usize,
    /// `(α, σ)` with `δσ = α` for each generator.
    pub certificates: Vec<(Cochain, Cochain)>,
    pub alt_bilinear: usize,
    pub hom_mod_two: usize,
    /// `θ ↦ (x ↦ θ(x,x))` hits every element of `Hom(A/2A, N)`.
    pub p_surjective: bool,
}

impl BarComparison {
    pub fn holds(&self) -> bool {
        self.generators == self.trivialized && self.p_surjective
    }
}

pub fn comparison_to_bar(a: &FiniteAbelianGroup, n: &FiniteAbelianGroup) -> Result<BarComparison, CohomologyError> {
    let (em, h3) = em_cohomology(a, n, 3)?;
    let bar = ChainComplex::new(a, ComplexKind::Bar, true)?;
    let mut certificates = Vec::new();
    for (_, v) in &h3.cocycles {
        let c = EmCochain::from_vector(&em, n, v)?;
        if let Some(s) = bar.solve_coboundary(2, n, &c.alpha.to_vector(&bar))? {
            certificates.push((c.alpha.clone(), Cochain::from_vector(&bar, n, 2, &s)?));
        }
    }
    let forms = alt_bilinear_forms(a, n)?;
    let homs = hom_mod_two(a, n)?;
    let gens: Vec<Elem> = (0..a.rank())
        .map(|i| {
            let mut e = a.zero();
            e[i] = 1;
            a.reduced(e)
        })
        .collect();
    let image: std::collections::HashSet<Vec<Elem>> = forms
        .iter()
        .map(|b| gens.iter().map(|g| b.get(a, &[g, g]).clone()).collect())
        .collect();
    let p_surjective = homs.iter().all(|h| image.contains(h));
    Ok(BarComparison {
        em_h3: h3.group,
        generators: h3.cocycles.len(),
        trivialized: certificates.len(),
        certificates,
        alt_bilinear: forms.len(),
        hom_mod_two: homs.len(),
        p_surjective,
    })
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .table
            .iter()
            .map(|e| {
                if e.len() == 1 {
                    e[0].to_string()
                } else {
                    format!("({})", e.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}
