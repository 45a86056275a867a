use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{Elt, FieldWithAut};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Group operations needed to propagate automorphisms along walks. Implemented
/// both by concrete Frobenius powers and by symbolic words.
pub trait AutGroup: Clone + PartialEq + fmt::Debug {
    fn identity_like(&self) -> Self;
    /// `self ∘ other`, applying `other` first.
    fn then_after(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
}

/// The automorphism `Frob^k` of GF(p^n).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Aut {
    k: u32,
    n: u32,
}

impl Aut {
    pub fn new(k: i64, n: u32) -> Self {
        Aut { k: k.rem_euclid(n as i64) as u32, n }
    }
    pub fn identity(n: u32) -> Self {
        Aut { k: 0, n }
    }
    pub fn frobenius(n: u32) -> Self {
        Aut::new(1, n)
    }
    pub fn exponent(&self) -> u32 {
        self.k
    }
    pub fn degree(&self) -> u32 {
        self.n
    }
    pub fn is_identity(&self) -> bool {
        self.k == 0
    }

    pub fn compose(&self, other: &Aut) -> Result<Aut> {
        if self.n != other.n {
            return Err(Error::FieldMismatch);
        }
        Ok(Aut::new(self.k as i64 + other.k as i64, self.n))
    }

    pub fn inv(&self) -> Aut {
        Aut::new(-(self.k as i64), self.n)
    }

    pub fn pow(&self, e: i64) -> Aut {
        Aut::new(self.k as i64 * e, self.n)
    }

    fn same_field(&self, f: &FieldWithAut) -> Result<()> {
        if f.n() != self.n {
            Err(Error::FieldMismatch)
        } else {
            Ok(())
        }
    }

    pub fn apply(&self, f: &FieldWithAut, x: Elt) -> Result<Elt> {
        self.same_field(f)?;
        Ok(f.frob(self.k, x))
    }

    /// Entrywise action on a vector.
    pub fn apply_vec(&self, f: &FieldWithAut, v: &[Elt]) -> Vec<Elt> {
        debug_assert_eq!(f.n(), self.n);
        v.iter().map(|&x| f.frob(self.k, x)).collect()
    }

    /// Entrywise action on a matrix.
    pub fn apply_matrix(&self, f: &FieldWithAut, m: &Matrix) -> Result<Matrix> {
        self.same_field(f)?;
        Ok(m.map(|x| f.frob(self.k, x)))
    }

    /// Entrywise action, assuming the field has already been checked.
    pub fn on_matrix(&self, f: &FieldWithAut, m: &Matrix) -> Matrix {
        debug_assert_eq!(f.n(), self.n);
        if self.k == 0 {
            return m.clone();
        }
        m.map(|x| f.frob(self.k, x))
    }

    #[inline]
    pub fn on(&self, f: &FieldWithAut, x: Elt) -> Elt {
        f.frob(self.k, x)
    }
}

impl AutGroup for Aut {
    fn identity_like(&self) -> Self {
        Aut::identity(self.n)
    }
    fn then_after(&self, other: &Self) -> Self {
        Aut::new(self.k as i64 + other.k as i64, self.n)
    }
    fn inverse(&self) -> Self {
        self.inv()
    }
}

impl fmt::Display for Aut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k {
            0 => write!(f, "id"),
            1 => write!(f, "Frob"),
            k => write!(f, "Frob^{k}"),
        }
    }
}

/// A reduced word in named automorphism symbols, read left to right as a
/// composite: `[σ, θ]` is σ∘θ, so θ acts first.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct SymAut {
    letters: Vec<(String, i64)>,
}

impl SymAut {
    pub fn identity() -> Self {
        SymAut { letters: vec![] }
    }

    pub fn symbol(name: &str) -> Self {
        SymAut { letters: vec![(name.to_string(), 1)] }
    }

    /// Parse a product such as `σθσθ^-1` or `s t s t^-1`. Symbols are single
    /// characters or whitespace-separated names; `^-1` or `^k` sets powers.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = SymAut::identity();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' || c == '∘' {
                i += 1;
                continue;
            }
            let name: String;
            if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                name = chars[start..i].iter().collect();
            } else {
                name = c.to_string();
                i += 1;
            }
            let mut e: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let t: String = chars[start..i].iter().collect();
                e = t.parse().map_err(|_| Error::Parse(format!("bad exponent in {s}")))?;
            } else if i < chars.len() && chars[i] == '⁻' {
                i += 1;
                if i < chars.len() && chars[i] == '¹' {
                    i += 1;
                }
                e = -1;
            }
            out = out.then_after(&SymAut { letters: vec![(name, e)] });
        }
        Ok(out)
    }

    pub fn letters(&self) -> &[(String, i64)] {
        &self.letters
    }

    fn reduce(mut v: Vec<(String, i64)>) -> Vec<(String, i64)> {
        let mut out: Vec<(String, i64)> = Vec::with_capacity(v.len());
        for (s, e) in v.drain(..) {
            if e == 0 {
                continue;
            }
            if let Some(last) = out.last_mut() {
                if last.0 == s {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                    continue;
                }
            }
            out.push((s, e));
        }
        out
    }

    /// Exponent sum of each symbol: the image in the abelianization, which is
    /// where Frobenius powers live.
    pub fn abelian(&self) -> BTreeMap<String, i64> {
        let mut m = BTreeMap::new();
        for (s, e) in &self.letters {
            *m.entry(s.clone()).or_insert(0) += e;
        }
        m.retain(|_, e| *e != 0);
        m
    }

    /// Evaluate with concrete automorphisms for each symbol.
    pub fn evaluate(&self, n: u32, value: &dyn Fn(&str) -> Option<Aut>) -> Result<Aut> {
        let mut k: i64 = 0;
        for (s, e) in &self.letters {
            let a = value(s).ok_or_else(|| Error::UnknownName(s.clone()))?;
            if a.degree() != n {
                return Err(Error::FieldMismatch);
            }
            k += a.exponent() as i64 * e;
        }
        Ok(Aut::new(k, n))
    }
}

impl AutGroup for SymAut {
    fn identity_like(&self) -> Self {
        SymAut::identity()
    }
    fn then_after(&self, other: &Self) -> Self {
        let mut v = self.letters.clone();
        v.extend(other.letters.iter().cloned());
        SymAut { letters: SymAut::reduce(v) }
    }
    fn inverse(&self) -> Self {
        SymAut {
            letters: self.letters.iter().rev().map(|(s, e)| (s.clone(), -e)).collect(),
        }
    }
}

impl fmt::Display for SymAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        for (s, e) in &self.letters {
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_laws() {
        let f = Aut::frobenius(2);
        assert!(f.compose(&f).unwrap().is_identity());
        assert_eq!(Aut::new(1, 3).inv(), Aut::new(2, 3));
        assert_eq!(f.compose(&Aut::identity(3)), Err(Error::FieldMismatch));
    }

    #[test]
    fn symbolic_words() {
        let w = SymAut::parse("σθσθ^-1").unwrap();
        assert_eq!(w.abelian(), BTreeMap::from([("σ".to_string(), 2)]));
        let w2 = SymAut::parse("θ^-1 σ θ σ").unwrap();
        assert_ne!(w, w2);
        assert_eq!(w.abelian(), w2.abelian());
        assert_eq!(w.then_after(&w.inverse()), SymAut::identity());
        let w3 = SymAut::parse("σθσθ⁻¹").unwrap();
        assert_eq!(w3, w);
    }
}
