//! Finitely generated abelian groups given by cyclic factors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cannot enumerate the infinite group {0}")]
    Infinite(String),
    #[error("cannot parse group `{text}`: {reason}")]
    Parse { text: String, reason: String },
    #[error("element {elem:?} has {got} coordinates, expected {expected}")]
    Arity { elem: Vec<i64>, got: usize, expected: usize },
}

pub type Elem = Vec<i64>;

/// `Z/m1 x ... x Z/mk`, a modulus of 0 meaning `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
}

impl FiniteAbelianGroup {
    /// Factors of modulus 1 are dropped.
    pub fn new(moduli: Vec<u64>) -> Self {
        FiniteAbelianGroup {
            moduli: moduli.into_iter().filter(|&m| m != 1).collect(),
        }
    }

    pub fn cyclic(m: u64) -> Self {
        Self::new(vec![m])
    }

    pub fn trivial() -> Self {
        Self::new(Vec::new())
    }

    pub fn integers() -> Self {
        Self::new(vec![0])
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_finite(&self) -> bool {
        self.moduli.iter().all(|&m| m != 0)
    }

    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.moduli.iter().product())
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.rank()]
    }

    pub fn reduce(&self, x: &mut [i64]) {
        for (v, &m) in x.iter_mut().zip(&self.moduli) {
            if m != 0 {
                *v = v.rem_euclid(m as i64);
            }
        }
    }

    pub fn reduced(&self, mut x: Elem) -> Elem {
        self.reduce(&mut x);
        x
    }

    pub fn check(&self, x: &[i64]) -> Result<(), GroupError> {
        if x.len() != self.rank() {
            return Err(GroupError::Arity {
                elem: x.to_vec(),
                got: x.len(),
                expected: self.rank(),
            });
        }
        Ok(())
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Elem {
        self.reduced(x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &[i64], y: &[i64]) -> Elem {
        self.reduced(x.iter().zip(y).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self, x: &[i64]) -> Elem {
        self.reduced(x.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64, x: &[i64]) -> Elem {
        self.reduced(x.iter().map(|a| k * a).collect())
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        self.reduced(x.to_vec()).iter().all(|&v| v == 0)
    }

    /// Mixed-radix index of a reduced element of a finite group.
    pub fn index_of(&self, x: &[i64]) -> usize {
        let mut idx = 0usize;
        for (v, &m) in x.iter().zip(&self.moduli) {
            idx = idx * m as usize + v.rem_euclid(m as i64) as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> Elem {
        let mut out = vec![0; self.rank()];
        for (slot, &m) in out.iter_mut().zip(&self.moduli).rev() {
            *slot = (idx % m as usize) as i64;
            idx /= m as usize;
        }
        out
    }

    /// Invariant-factor form: finite factors `d1 | d2 | ...` followed by
    /// the free factors.
    pub fn canonical(&self) -> Self {
        let free = self.moduli.iter().filter(|&&m| m == 0).count();
        let mut fin: Vec<u64> = self.moduli.iter().copied().filter(|&m| m != 0).collect();
        // Pairwise (gcd, lcm) sweeps converge to the divisibility chain.
        for i in 0..fin.len() {
            for j in i + 1..fin.len() {
                let g = gcd(fin[i], fin[j]);
                let l = fin[i] / g * fin[j];
                fin[i] = g;
                fin[j] = l;
            }
        }
        fin.extend(std::iter::repeat_n(0, free));
        Self::new(fin)
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    /// `A/2A`.
    pub fn mod_two(&self) -> Self {
        Self::new(self.moduli.iter().map(|&m| gcd(m, 2)).collect())
    }

    /// All elements in index order.
    pub fn elements(&self) -> Result<Vec<Elem>, GroupError> {
        let order = self.order().ok_or_else(|| GroupError::Infinite(self.to_string()))?;
        Ok((0..order as usize).map(|i| self.element_at(i)).collect())
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .moduli
            .iter()
            .map(|&m| if m == 0 { "Z".to_string() } else { format!("Z/{m}") })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = GroupError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| GroupError::Parse {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let t = text.trim();
        if t == "0" || t == "1" {
            return Ok(Self::trivial());
        }
        let mut moduli = Vec::new();
        for part in t.split(['x', '×', '+']) {
            let p: String = part.chars().filter(|c| !c.is_whitespace()).collect();
            if p == "Z" {
                moduli.push(0);
            } else if let Some(m) = p.strip_prefix("Z/") {
                let m: u64 = m.parse().map_err(|_| err("modulus is not a positive integer"))?;
                if m == 0 {
                    return Err(err("modulus must be positive"));
                }
                moduli.push(m);
            } else {
                return Err(err("expected factors `Z` or `Z/m` separated by `x`"));
            }
        }
        Ok(Self::new(moduli))
    }
}
