//! Words in the letters `a`, `a⁻¹`, `s*`: the order on words with a given head
//! and sign, admissibility, symmetries and norms, and enumeration of strings
//! and bands with canonical representatives.
//!
//! The same [`Word`] type also carries walks, whose letters are oriented
//! arrows (`Letter::Direct(s)` / `Letter::Inverse(s)` for special loops too).

use std::cmp::Ordering;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::presentation::{Letter, Presentation};

/// Shape of the index set of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Indexed by `{0, …, n}`.
    Finite,
    /// Indexed by ℕ; `letters[cycle_start..]` repeats forever.
    Ray { cycle_start: usize },
    /// Indexed by ℤ with `w_i = letters[(i-1) mod N]`.
    Band,
}

/// A finite, eventually periodic ℕ-indexed, or periodic ℤ-indexed word (or walk).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub v0: usize,
    pub sign: i8,
    pub letters: Vec<Letter>,
    pub shape: Shape,
}

/// The `*`-letter underlying a letter; oriented special loops become `s*`.
pub fn star_of(p: &Presentation, l: Letter) -> Letter {
    match l {
        Letter::Direct(a) | Letter::Inverse(a) if p.is_special(a) => Letter::Star(a),
        _ => l,
    }
}

/// Sign of a letter or of an oriented special loop.
pub fn letter_sign(p: &Presentation, l: Letter) -> i8 {
    p.sign(star_of(p, l))
}

fn check_pair(p: &Presentation, x: Letter, y: Letter) -> Result<()> {
    if p.letter_tail(x) != p.letter_head(y) {
        return Err(Error::InvalidWord(format!(
            "{} cannot be followed by {}",
            p.letter_name(x),
            p.letter_name(y)
        )));
    }
    if letter_sign(p, x.inverse()) == letter_sign(p, y) {
        return Err(Error::InvalidWord(format!(
            "{} and {} have equal signs",
            p.letter_name(x.inverse()),
            p.letter_name(y)
        )));
    }
    Ok(())
}

impl Word {
    pub fn trivial(v: usize, sign: i8) -> Word {
        Word { v0: v, sign, letters: vec![], shape: Shape::Finite }
    }

    /// A finite word; for an empty letter list this is `1_{v0,sign}`.
    pub fn new(p: &Presentation, v0: usize, sign: i8, letters: Vec<Letter>) -> Result<Word> {
        let w = Word { v0, sign, letters, shape: Shape::Finite };
        w.validate(p)?;
        Ok(w)
    }

    /// A non-trivial finite word; head and sign come from the first letter.
    pub fn finite(p: &Presentation, letters: Vec<Letter>) -> Result<Word> {
        let first = *letters.first().ok_or_else(|| Error::InvalidWord("no letters".into()))?;
        Word::new(p, p.letter_head(first), letter_sign(p, first), letters)
    }

    /// The periodic ℤ-indexed word `∞(block)∞` with `w_1 = block[0]`.
    pub fn band(p: &Presentation, block: Vec<Letter>) -> Result<Word> {
        let first = *block.first().ok_or_else(|| Error::InvalidWord("empty band block".into()))?;
        let w = Word { v0: p.letter_head(first), sign: letter_sign(p, first), letters: block, shape: Shape::Band };
        w.validate(p)?;
        Ok(w)
    }

    /// The ℕ-indexed word `prefix · cycle · cycle · …`, stored with the
    /// shortest prefix and primitive cycle.
    pub fn ray(p: &Presentation, mut prefix: Vec<Letter>, mut cycle: Vec<Letter>) -> Result<Word> {
        if cycle.is_empty() {
            return Err(Error::InvalidWord("empty cycle".into()));
        }
        let n = cycle.len();
        if let Some(d) = (1..n).find(|&d| n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d])) {
            cycle.truncate(d);
        }
        while prefix.last() == cycle.last() {
            prefix.pop();
            cycle.rotate_right(1);
        }
        let cycle_start = prefix.len();
        let mut letters = prefix;
        letters.extend(cycle);
        let first = letters[0];
        let w = Word { v0: p.letter_head(first), sign: letter_sign(p, first), letters, shape: Shape::Ray { cycle_start } };
        w.validate(p)?;
        Ok(w)
    }

    pub fn validate(&self, p: &Presentation) -> Result<()> {
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::InvalidWord("sign must be ±1".into()));
        }
        if self.v0 >= p.vertices.len() {
            return Err(Error::InvalidWord("unknown vertex".into()));
        }
        for &l in &self.letters {
            if l.arrow() >= p.arrows.len() || (l.is_star() && !p.is_special(l.arrow())) {
                return Err(Error::InvalidWord("unknown letter".into()));
            }
        }
        if let Some(&first) = self.letters.first() {
            if p.letter_head(first) != self.v0 {
                return Err(Error::InvalidWord("first letter does not start at v0".into()));
            }
            if letter_sign(p, first) != self.sign {
                return Err(Error::InvalidWord("sign differs from the sign of the first letter".into()));
            }
        }
        for w in self.letters.windows(2) {
            check_pair(p, w[0], w[1])?;
        }
        match self.shape {
            Shape::Finite => {}
            Shape::Band => check_pair(p, *self.letters.last().unwrap(), self.letters[0])?,
            Shape::Ray { cycle_start } => {
                if cycle_start >= self.letters.len() {
                    return Err(Error::InvalidWord("empty cycle".into()));
                }
                check_pair(p, *self.letters.last().unwrap(), self.letters[cycle_start])?
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.shape == Shape::Finite
    }
    pub fn is_band(&self) -> bool {
        self.shape == Shape::Band
    }
    pub fn is_trivial(&self) -> bool {
        self.is_finite() && self.letters.is_empty()
    }

    /// Length of a finite word, period block length of a band, stored length of a ray.
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letter `w_i`, if `i` is in `I'`.
    pub fn letter(&self, i: i64) -> Option<Letter> {
        let n = self.letters.len() as i64;
        match self.shape {
            Shape::Finite => (1..=n).contains(&i).then(|| self.letters[(i - 1) as usize]),
            Shape::Band => Some(self.letters[(i - 1).rem_euclid(n) as usize]),
            Shape::Ray { cycle_start } => {
                if i < 1 {
                    None
                } else if i <= n {
                    Some(self.letters[(i - 1) as usize])
                } else {
                    let cs = cycle_start as i64;
                    Some(self.letters[(cs + (i - 1 - cs) % (n - cs)) as usize])
                }
            }
        }
    }

    /// The vertex `v_i(w)`.
    pub fn vertex(&self, p: &Presentation, i: i64) -> usize {
        if self.is_band() {
            return p.letter_tail(self.letter(i).unwrap());
        }
        if i == 0 {
            return self.v0;
        }
        p.letter_tail(self.letter(i).expect("index in range"))
    }

    /// Vertex at the right end of a finite word.
    pub fn end_vertex(&self, p: &Presentation) -> usize {
        self.vertex(p, self.letters.len() as i64)
    }

    /// The sign of `w⁻¹` for a finite word.
    pub fn end_sign(&self, p: &Presentation) -> i8 {
        match self.letters.last() {
            None => -self.sign,
            Some(&l) => letter_sign(p, l.inverse()),
        }
    }

    /// `w⁻¹`; for bands `(w⁻¹)_i = (w_{-i})⁻¹`.
    pub fn inverse(&self, p: &Presentation) -> Result<Word> {
        match self.shape {
            Shape::Finite => {
                if self.letters.is_empty() {
                    return Ok(Word::trivial(self.v0, -self.sign));
                }
                let letters: Vec<Letter> = self.letters.iter().rev().map(|l| l.inverse()).collect();
                Ok(Word { v0: self.end_vertex(p), sign: self.end_sign(p), letters, shape: Shape::Finite })
            }
            Shape::Band => {
                let n = self.letters.len() as i64;
                let block: Vec<Letter> = (1..=n).map(|i| self.letter(-i).unwrap().inverse()).collect();
                let first = block[0];
                Ok(Word { v0: p.letter_head(first), sign: letter_sign(p, first), letters: block, shape: Shape::Band })
            }
            Shape::Ray { .. } => Err(Error::InvalidWord("the inverse of an ℕ-indexed word has no head".into())),
        }
    }

    /// `w[n]` with `w[n]_i = w_{n+i}`; no effect unless ℤ-indexed.
    pub fn shift(&self, p: &Presentation, n: i64) -> Word {
        if !self.is_band() {
            return self.clone();
        }
        let len = self.letters.len() as i64;
        let block: Vec<Letter> = (1..=len).map(|i| self.letter(n + i).unwrap()).collect();
        let first = block[0];
        Word { v0: p.letter_head(first), sign: letter_sign(p, first), letters: block, shape: Shape::Band }
    }

    /// The product `uw`, defined when `u⁻¹` and `w` have the same head and opposite signs.
    pub fn concat(p: &Presentation, u: &Word, w: &Word) -> Result<Word> {
        if !u.is_finite() || w.is_band() {
            return Err(Error::NonConcatenable("left factor must be finite and right factor not ℤ-indexed".into()));
        }
        if u.end_vertex(p) != w.v0 || u.end_sign(p) != -w.sign {
            return Err(Error::NonConcatenable(format!("{} · {}", u.display(p), w.display(p))));
        }
        let mut letters = u.letters.clone();
        if let Shape::Ray { cycle_start } = w.shape {
            letters.extend_from_slice(&w.letters[..cycle_start]);
            return Word::ray(p, letters, w.letters[cycle_start..].to_vec());
        }
        letters.extend(w.letters.iter().copied());
        let shape = w.shape;
        let sign = if u.letters.is_empty() { w.sign } else { u.sign };
        Ok(Word { v0: u.v0, sign, letters, shape })
    }

    /// Whether `w x` is a word for the single letter `x`.
    pub fn extends_by(&self, p: &Presentation, x: Letter) -> bool {
        self.is_finite() && p.letter_head(x) == self.end_vertex(p) && letter_sign(p, x) == -self.end_sign(p)
    }

    /// `w_{≤i}` of a finite word.
    pub fn prefix(&self, p: &Presentation, i: usize) -> Word {
        assert!(self.is_finite() && i <= self.letters.len());
        if i == 0 {
            return Word::trivial(self.v0, self.sign);
        }
        Word { v0: self.v0, sign: self.sign, letters: self.letters[..i].to_vec(), shape: Shape::Finite }
            .with_head(p)
    }

    /// `w_{>i}` of a finite word or ray.
    pub fn suffix(&self, p: &Presentation, i: usize) -> Word {
        match self.shape {
            Shape::Finite => {
                if i >= self.letters.len() {
                    let v = self.end_vertex(p);
                    return Word::trivial(v, -self.end_sign(p));
                }
                Word { v0: 0, sign: 1, letters: self.letters[i..].to_vec(), shape: Shape::Finite }.with_head(p)
            }
            Shape::Ray { cycle_start } => {
                if i < cycle_start {
                    Word {
                        v0: 0,
                        sign: 1,
                        letters: self.letters[i..].to_vec(),
                        shape: Shape::Ray { cycle_start: cycle_start - i },
                    }
                    .with_head(p)
                } else {
                    let c = self.letters.len() - cycle_start;
                    let cycle: Vec<Letter> = (0..c).map(|k| self.letter((i + 1 + k) as i64).unwrap()).collect();
                    Word { v0: 0, sign: 1, letters: cycle, shape: Shape::Ray { cycle_start: 0 } }.with_head(p)
                }
            }
            Shape::Band => panic!("suffix of a ℤ-indexed word; use ray_after"),
        }
    }

    /// `w_{>i}` of a band, as a ray.
    pub fn ray_after(&self, p: &Presentation, i: i64) -> Word {
        let n = self.letters.len() as i64;
        let cycle: Vec<Letter> = (1..=n).map(|k| self.letter(i + k).unwrap()).collect();
        Word { v0: 0, sign: 1, letters: cycle, shape: Shape::Ray { cycle_start: 0 } }.with_head(p)
    }

    /// `(w_{≤i})⁻¹` of a band, as a ray.
    pub fn ray_before(&self, p: &Presentation, i: i64) -> Word {
        let n = self.letters.len() as i64;
        let cycle: Vec<Letter> = (0..n).map(|k| self.letter(i - k).unwrap().inverse()).collect();
        Word { v0: 0, sign: 1, letters: cycle, shape: Shape::Ray { cycle_start: 0 } }.with_head(p)
    }

    fn with_head(mut self, p: &Presentation) -> Word {
        if let Some(&f) = self.letters.first() {
            self.v0 = p.letter_head(f);
            self.sign = letter_sign(p, f);
        }
        self
    }

    /// The word `C*` of a walk.
    pub fn star(&self, p: &Presentation) -> Word {
        Word {
            v0: self.v0,
            sign: self.sign,
            letters: self.letters.iter().map(|&l| star_of(p, l)).collect(),
            shape: self.shape,
        }
    }

    pub fn is_right_end_admissible(&self, p: &Presentation) -> bool {
        if !self.is_finite() {
            return true;
        }
        !p.special.keys().any(|&s| self.extends_by(p, Letter::Star(s)))
    }

    /// Whether `x w` is a word for some `*`-letter `x`.
    fn left_extendable_by_star(&self, p: &Presentation) -> bool {
        p.special.keys().any(|&s| p.letter_tail(Letter::Star(s)) == self.v0 && letter_sign(p, Letter::Star(s)) == -self.sign)
    }

    pub fn is_end_admissible(&self, p: &Presentation) -> bool {
        match self.shape {
            Shape::Band => true,
            Shape::Ray { .. } => !self.left_extendable_by_star(p),
            Shape::Finite => self.is_right_end_admissible(p) && !self.left_extendable_by_star(p),
        }
    }

    /// Neither the word nor its inverse contains `r*` for a zero relation `r`.
    pub fn is_relation_admissible(&self, p: &Presentation) -> bool {
        let patterns = relation_patterns(p);
        let n = self.letters.len() as i64;
        let longest = patterns.iter().map(|x| x.len()).max().unwrap_or(0) as i64;
        let last_start = match self.shape {
            Shape::Finite => n,
            Shape::Band => n,
            Shape::Ray { cycle_start } => cycle_start as i64 + 2 * (n - cycle_start as i64) + longest,
        };
        for pat in &patterns {
            let m = pat.len() as i64;
            for start in 1..=last_start {
                if self.is_finite() && start + m - 1 > n {
                    break;
                }
                if (0..m).all(|k| self.letter(start + k).map(|l| star_of(p, l)) == Some(pat[k as usize])) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the band block is a proper power.
    pub fn is_primitive(&self) -> bool {
        let n = self.letters.len();
        (1..n).filter(|d| n % d == 0).all(|d| (0..n).any(|i| self.letters[i] != self.letters[i % d]))
    }

    /// Text form: letters separated by spaces; `band:` prefix for ℤ-words;
    /// `1_v,+` for trivial words.
    pub fn display(&self, p: &Presentation) -> String {
        if self.letters.is_empty() {
            return format!("1_{},{}", p.vertices[self.v0], if self.sign > 0 { "+" } else { "-" });
        }
        let body: Vec<String> = self.letters.iter().map(|&l| p.letter_name(l)).collect();
        match self.shape {
            Shape::Finite => body.join(" "),
            Shape::Band => format!("band: {}", body.join(" ")),
            Shape::Ray { cycle_start } => {
                let (a, b) = body.split_at(cycle_start);
                format!("{} ({})^inf", a.join(" "), b.join(" ")).trim().to_string()
            }
        }
    }

    pub fn to_json(&self, p: &Presentation) -> Value {
        let letters: Vec<Value> = self
            .letters
            .iter()
            .map(|&l| match l {
                Letter::Star(s) => json!({"star": p.arrows[s].name}),
                Letter::Direct(a) => json!({"arrow": p.arrows[a].name, "dir": "dir"}),
                Letter::Inverse(a) => json!({"arrow": p.arrows[a].name, "dir": "inv"}),
            })
            .collect();
        let mut v = json!({"sign": self.sign, "v0": p.vertices[self.v0], "letters": letters});
        if self.is_band() {
            v["period"] = json!(self.letters.len());
        }
        v
    }

    /// Parse the JSON form. Oriented special loops (`{"arrow":"s","dir":…}`) are
    /// accepted, giving a walk.
    pub fn from_json(p: &Presentation, v: &Value) -> Result<Word> {
        let bad = |m: &str| Error::Parse(format!("word: {m}"));
        let arr = v.get("letters").and_then(|x| x.as_array()).ok_or_else(|| bad("missing letters"))?;
        let mut letters = Vec::with_capacity(arr.len());
        for item in arr {
            if let Some(s) = item.get("star").and_then(|x| x.as_str()) {
                letters.push(p.parse_letter(&format!("{s}*"))?);
                continue;
            }
            let name = item.get("arrow").and_then(|x| x.as_str()).ok_or_else(|| bad("letter needs arrow or star"))?;
            let a = p.arrow_index(name)?;
            letters.push(match item.get("dir").and_then(|x| x.as_str()).unwrap_or("dir") {
                "dir" => Letter::Direct(a),
                "inv" => Letter::Inverse(a),
                d => return Err(bad(&format!("unknown dir {d}"))),
            });
        }
        if v.get("period").map_or(false, |x| !x.is_null()) {
            return Word::band(p, letters);
        }
        if letters.is_empty() {
            let v0 = p.vertex_index(v.get("v0").and_then(|x| x.as_str()).ok_or_else(|| bad("trivial word needs v0"))?)?;
            let sign = v.get("sign").and_then(|x| x.as_i64()).unwrap_or(1) as i8;
            return Word::new(p, v0, sign, vec![]);
        }
        Word::finite(p, letters)
    }
}

/// Parse a text word such as `s* a s*`, `s*as*`, `a^-1 s*`, `band: s* a`, `1_v,+`.
/// Oriented special loops (`s`, `s^-1`) are accepted, giving a walk.
pub fn parse_word(p: &Presentation, text: &str) -> Result<Word> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("band:") {
        return Word::band(p, tokenize(p, rest)?);
    }
    if let Some(rest) = t.strip_prefix("1_") {
        let (v, s) = match rest.rsplit_once(',') {
            Some((v, s)) => (v, s.trim()),
            None => (rest, "+"),
        };
        let sign = match s {
            "+" | "+1" | "1" => 1,
            "-" | "-1" => -1,
            _ => return Err(Error::Parse(format!("bad sign in {t}"))),
        };
        return Word::new(p, p.vertex_index(v.trim())?, sign, vec![]);
    }
    Word::finite(p, tokenize(p, t)?)
}

fn tokenize(p: &Presentation, text: &str) -> Result<Vec<Letter>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() || chars[i] == '.' || chars[i] == '·' {
            i += 1;
            continue;
        }
        let rest: String = chars[i..].iter().collect();
        let best = p
            .arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| rest.starts_with(a.name.as_str()))
            .max_by_key(|(_, a)| a.name.len())
            .map(|(k, a)| (k, a.name.chars().count()));
        let Some((a, used)) = best else {
            return Err(Error::Parse(format!("unknown letter at '{rest}'")));
        };
        i += used;
        let tail: String = chars[i..].iter().collect();
        let letter = if tail.starts_with('*') {
            i += 1;
            if !p.is_special(a) {
                return Err(Error::InvalidWord(format!("{} is not a special loop", p.arrows[a].name)));
            }
            Letter::Star(a)
        } else if tail.starts_with("^-1") {
            i += 3;
            Letter::Inverse(a)
        } else if tail.starts_with("⁻¹") {
            i += 2;
            Letter::Inverse(a)
        } else {
            Letter::Direct(a)
        };
        out.push(letter);
    }
    Ok(out)
}

/// `r*` and `(r*)⁻¹` for every zero relation.
pub fn relation_patterns(p: &Presentation) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for r in &p.zero_relations {
        let pat: Vec<Letter> =
            r.iter().map(|&a| if p.is_special(a) { Letter::Star(a) } else { Letter::Direct(a) }).collect();
        let inv: Vec<Letter> = pat.iter().rev().map(|l| l.inverse()).collect();
        out.push(pat);
        out.push(inv);
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Compare two words of `H(ℓ,ε)`; also returns the length of the longest common
/// prefix (`None` when the words are equal and infinite).
pub fn compare_with_norm(p: &Presentation, u: &Word, w: &Word) -> Result<(Ordering, Option<usize>)> {
    if u.is_band() || w.is_band() {
        return Err(Error::NotComparable("ℤ-indexed words have no head".into()));
    }
    if u.v0 != w.v0 || u.sign != w.sign {
        return Err(Error::NotComparable(format!("{} and {}", u.display(p), w.display(p))));
    }
    let period = |x: &Word| match x.shape {
        Shape::Ray { cycle_start } => x.letters.len() - cycle_start,
        _ => 1,
    };
    let (pu, pw) = (period(u), period(w));
    let horizon = (u.letters.len().max(w.letters.len()) + 2 * (pu / gcd(pu, pw) * pw)) as i64;
    let mut i: i64 = 1;
    loop {
        match (u.letter(i), w.letter(i)) {
            (None, None) => return Ok((Ordering::Equal, Some((i - 1) as usize))),
            (Some(x), Some(y)) if x == y => {
                if i > horizon {
                    return Ok((Ordering::Equal, None));
                }
            }
            (Some(x), Some(y)) => {
                let k = Some((i - 1) as usize);
                return match (x, y) {
                    (Letter::Direct(_), Letter::Inverse(_)) => Ok((Ordering::Less, k)),
                    (Letter::Inverse(_), Letter::Direct(_)) => Ok((Ordering::Greater, k)),
                    _ => Err(Error::NotComparable(format!(
                        "letters {} and {} at position {i}",
                        p.letter_name(x),
                        p.letter_name(y)
                    ))),
                };
            }
            (None, Some(y)) => {
                let k = Some((i - 1) as usize);
                return match y {
                    Letter::Direct(_) => Ok((Ordering::Greater, k)),
                    Letter::Inverse(_) => Ok((Ordering::Less, k)),
                    Letter::Star(_) => Err(Error::NotRightEndAdmissible),
                };
            }
            (Some(x), None) => {
                let k = Some((i - 1) as usize);
                return match x {
                    Letter::Direct(_) => Ok((Ordering::Less, k)),
                    Letter::Inverse(_) => Ok((Ordering::Greater, k)),
                    Letter::Star(_) => Err(Error::NotRightEndAdmissible),
                };
            }
        }
        i += 1;
    }
}

/// The total order on `H(ℓ,ε)`.
pub fn compare(p: &Presentation, u: &Word, w: &Word) -> Result<Ordering> {
    compare_with_norm(p, u, w).map(|r| r.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PositionKind {
    Symmetry,
    NaturallyDirect,
    NaturallyInverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositionClass {
    pub kind: PositionKind,
    /// `‖i‖`; `None` stands for ∞.
    pub norm: Option<usize>,
}

/// Classify a `*`-position of a finite word or band by comparing
/// `(w_{≤i-1})⁻¹` with `w_{>i}`.
pub fn classify_position(p: &Presentation, w: &Word, i: i64) -> Result<PositionClass> {
    let Some(Letter::Star(s)) = w.letter(i).map(|l| star_of(p, l)) else {
        return Err(Error::NotStarLetter(i));
    };
    let sgn = -p.sign(Letter::Star(s));
    let v = p.arrows[s].to;
    let (a, b) = match w.shape {
        Shape::Finite => {
            let i = i as usize;
            let left: Vec<Letter> = w.letters[..i - 1].iter().rev().map(|l| l.inverse()).collect();
            let right: Vec<Letter> = w.letters[i..].to_vec();
            (Word { v0: v, sign: sgn, letters: left, shape: Shape::Finite }, Word { v0: v, sign: sgn, letters: right, shape: Shape::Finite })
        }
        Shape::Band => (w.ray_before(p, i - 1), w.ray_after(p, i)),
        Shape::Ray { .. } => return Err(Error::InvalidWord("positions of ℕ-indexed words are not classified".into())),
    };
    let a = a.star(p);
    let b = b.star(p);
    let (ord, norm) = compare_with_norm(p, &a, &b)?;
    Ok(match ord {
        Ordering::Equal => PositionClass { kind: PositionKind::Symmetry, norm: None },
        Ordering::Greater => PositionClass { kind: PositionKind::NaturallyDirect, norm },
        Ordering::Less => PositionClass { kind: PositionKind::NaturallyInverse, norm },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescriptorKind {
    AsymString,
    SymString,
    AsymBand,
    SymBand,
}

impl DescriptorKind {
    pub fn name(&self) -> &'static str {
        match self {
            DescriptorKind::AsymString => "asymmetric string",
            DescriptorKind::SymString => "symmetric string",
            DescriptorKind::AsymBand => "asymmetric band",
            DescriptorKind::SymBand => "symmetric band",
        }
    }
}

/// A string or band, kept as given (not necessarily canonical).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Descriptor {
    pub word: Word,
    pub symmetric: bool,
}

/// The shape of a symmetric string `u s* u⁻¹` or symmetric band
/// `∞(v s* v⁻¹ u⁻¹ t* u)∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetricForm {
    String { u: Vec<Letter>, s: usize },
    Band { u: Vec<Letter>, v: Vec<Letter>, s: usize, t: usize, p: usize, r: usize },
}

impl Descriptor {
    /// Check the string or band conditions.
    pub fn new(p: &Presentation, word: Word) -> Result<Descriptor> {
        word.validate(p)?;
        if word.letters.iter().any(|l| !l.is_star() && p.is_special(l.arrow())) {
            return Err(Error::InvalidWord("descriptors use s*, not oriented special loops".into()));
        }
        match word.shape {
            Shape::Finite => {
                if !word.is_end_admissible(p) {
                    return Err(Error::NotEndAdmissible);
                }
            }
            Shape::Band => {
                if !word.is_primitive() {
                    return Err(Error::InvalidWord("band block is a proper power".into()));
                }
            }
            Shape::Ray { .. } => return Err(Error::InvalidWord("neither a string nor a band".into())),
        }
        if !word.is_relation_admissible(p) {
            return Err(Error::InvalidWord(format!("{} is not relation-admissible", word.display(p))));
        }
        let symmetric = match word.shape {
            Shape::Finite => !word.is_trivial() && word.inverse(p)? == word,
            _ => {
                let inv = word.inverse(p)?;
                (0..word.len() as i64).any(|k| word.shift(p, k) == inv)
            }
        };
        Ok(Descriptor { word, symmetric })
    }

    pub fn parse(p: &Presentation, text: &str) -> Result<Descriptor> {
        Descriptor::new(p, parse_word(p, text)?)
    }

    pub fn kind(&self) -> DescriptorKind {
        match (self.word.is_band(), self.symmetric) {
            (false, false) => DescriptorKind::AsymString,
            (false, true) => DescriptorKind::SymString,
            (true, false) => DescriptorKind::AsymBand,
            (true, true) => DescriptorKind::SymBand,
        }
    }

    /// The index set `J_w` (in this representative's indexing).
    pub fn jw(&self) -> Vec<i64> {
        let n = self.word.len() as i64;
        match self.kind() {
            DescriptorKind::AsymString => (0..=n).collect(),
            DescriptorKind::SymString => (0..=(n - 1) / 2).collect(),
            DescriptorKind::AsymBand => (0..n).collect(),
            DescriptorKind::SymBand => {
                let (pp, r) = self.band_pr();
                (-(pp as i64)..=r as i64).collect()
            }
        }
    }

    pub fn jw_len(&self) -> usize {
        self.jw().len()
    }

    fn band_pr(&self) -> (usize, usize) {
        let w = &self.word;
        let n = w.len();
        let half = n / 2;
        let i1 = (1..=half as i64)
            .find(|&i| is_band_symmetry(w, i))
            .expect("symmetric band has a symmetry in its first half period") as usize;
        (half - i1, i1 - 1)
    }

    pub fn symmetric_decomposition(&self, p: &Presentation) -> Result<SymmetricForm> {
        if !self.symmetric {
            return Err(Error::NotSymmetric);
        }
        let w = &self.word;
        if w.is_finite() {
            let k = (w.len() - 1) / 2;
            return Ok(SymmetricForm::String { u: w.letters[..k].to_vec(), s: w.letters[k].arrow() });
        }
        let (pp, r) = self.band_pr();
        let n = w.len();
        let _ = p;
        Ok(SymmetricForm::Band {
            u: w.letters[n - pp..].to_vec(),
            v: w.letters[..r].to_vec(),
            s: w.letters[r].arrow(),
            t: w.letters[n / 2 + r].arrow(),
            p: pp,
            r,
        })
    }

    /// Lexicographically least representative among shifts and inverse shifts.
    pub fn canonical(&self, p: &Presentation) -> Descriptor {
        let word = canonical_word(p, &self.word);
        Descriptor { word, symmetric: self.symmetric }
    }

    pub fn is_equivalent(&self, p: &Presentation, other: &Descriptor) -> bool {
        canonical_word(p, &self.word) == canonical_word(p, &other.word)
    }

    pub fn display(&self, p: &Presentation) -> String {
        self.word.display(p)
    }

    pub fn to_json(&self, p: &Presentation) -> Value {
        let mut v = json!({
            "word": self.word.to_json(p),
            "text": self.word.display(p),
            "kind": self.kind().name(),
            "symmetric": self.symmetric,
            "Jw": self.jw_len(),
        });
        if let Ok(form) = self.symmetric_decomposition(p) {
            let names = |ls: &[Letter]| ls.iter().map(|&l| p.letter_name(l)).collect::<Vec<_>>().join(" ");
            v["decomposition"] = match form {
                SymmetricForm::String { u, s } => json!({"u": names(&u), "s": p.arrows[s].name}),
                SymmetricForm::Band { u, v, s, t, p: pp, r } => json!({
                    "u": names(&u), "v": names(&v), "s": p.arrows[s].name, "t": p.arrows[t].name, "p": pp, "r": r
                }),
            };
        }
        v
    }
}

fn is_band_symmetry(w: &Word, i: i64) -> bool {
    let n = w.len() as i64;
    w.letter(i).map_or(false, |l| l.is_star()) && (1..=n).all(|k| w.letter(i + k) == w.letter(i - k).map(|l| l.inverse()))
}

fn ranks(p: &Presentation, ls: &[Letter]) -> Vec<usize> {
    ls.iter().map(|&l| p.letter_rank(l)).collect()
}

/// Lexicographically least word among the shifts of `w` and of `w⁻¹`.
pub fn canonical_word(p: &Presentation, w: &Word) -> Word {
    match w.shape {
        Shape::Finite => {
            if w.is_trivial() {
                return Word::trivial(w.v0, 1);
            }
            let inv = w.inverse(p).expect("finite");
            if ranks(p, &inv.letters) < ranks(p, &w.letters) {
                inv
            } else {
                w.clone()
            }
        }
        Shape::Band => {
            let inv = w.inverse(p).expect("band");
            let n = w.len() as i64;
            let mut best = w.clone();
            let mut best_r = ranks(p, &w.letters);
            for base in [w, &inv] {
                for k in 0..n {
                    let c = base.shift(p, k);
                    let r = ranks(p, &c.letters);
                    if r < best_r {
                        best_r = r;
                        best = c;
                    }
                }
            }
            best
        }
        Shape::Ray { .. } => w.clone(),
    }
}

/// All letters that may follow `last` in a word.
pub fn successors(p: &Presentation, last: Letter) -> Vec<Letter> {
    let v = p.letter_tail(last);
    let want = -p.sign(last.inverse());
    p.letters().iter().copied().filter(|&x| p.letter_head(x) == v && p.sign(x) == want).collect()
}

fn ends_with_relation(p: &Presentation, patterns: &[Vec<Letter>], ls: &[Letter]) -> bool {
    let _ = p;
    patterns.iter().any(|pat| ls.ends_with(pat))
}

/// Strings of length at most `max_len`, one canonical representative per class,
/// ordered by length then letter ranks.
pub fn enumerate_strings(p: &Presentation, max_len: usize) -> Vec<Descriptor> {
    let mut out = Vec::new();
    for v in 0..p.vertices.len() {
        if p.specials_at(v).is_empty() {
            out.push(Descriptor { word: Word::trivial(v, 1), symmetric: false });
        }
    }
    let patterns = relation_patterns(p);
    let mut found: Vec<Vec<Letter>> = Vec::new();
    fn go(p: &Presentation, patterns: &[Vec<Letter>], cur: &mut Vec<Letter>, max_len: usize, found: &mut Vec<Vec<Letter>>) {
        let w = Word { v0: p.letter_head(cur[0]), sign: p.sign(cur[0]), letters: cur.clone(), shape: Shape::Finite };
        if w.is_end_admissible(p) {
            let inv: Vec<Letter> = cur.iter().rev().map(|l| l.inverse()).collect();
            if ranks(p, cur) <= ranks(p, &inv) {
                found.push(cur.clone());
            }
        }
        if cur.len() == max_len {
            return;
        }
        for x in successors(p, *cur.last().unwrap()) {
            cur.push(x);
            if !ends_with_relation(p, patterns, cur) {
                go(p, patterns, cur, max_len, found);
            }
            cur.pop();
        }
    }
    if max_len > 0 {
        for &l in p.letters() {
            let mut cur = vec![l];
            if !ends_with_relation(p, &patterns, &cur) {
                go(p, &patterns, &mut cur, max_len, &mut found);
            }
        }
    }
    found.sort_by_key(|ls| (ls.len(), ranks(p, ls)));
    for ls in found {
        let w = Word::finite(p, ls).expect("enumerated word is valid");
        let symmetric = w.inverse(p).expect("finite") == w;
        out.push(Descriptor { word: w, symmetric });
    }
    out
}

/// Closed letter sequences of length `n` satisfying the cyclic word conditions
/// and cyclic relation-admissibility, in DFS order.
pub fn closed_blocks(p: &Presentation, n: usize, mut keep: impl FnMut(&[Letter]) -> bool, mut visit: impl FnMut(&[Letter])) {
    let patterns = relation_patterns(p);
    let longest = patterns.iter().map(|x| x.len()).max().unwrap_or(0);
    fn go(
        p: &Presentation,
        patterns: &[Vec<Letter>],
        longest: usize,
        n: usize,
        cur: &mut Vec<Letter>,
        keep: &mut dyn FnMut(&[Letter]) -> bool,
        visit: &mut dyn FnMut(&[Letter]),
    ) {
        if !keep(cur) {
            return;
        }
        if cur.len() == n {
            let first = cur[0];
            let last = cur[n - 1];
            if p.letter_tail(last) != p.letter_head(first) || p.sign(last.inverse()) == p.sign(first) {
                return;
            }
            let mut ext: Vec<Letter> = Vec::with_capacity(n + longest * (longest / n.max(1) + 2));
            while ext.len() < n + longest {
                ext.extend_from_slice(cur);
            }
            for start in 0..n {
                for pat in patterns {
                    if ext[start..].starts_with(pat) {
                        return;
                    }
                }
            }
            visit(cur);
            return;
        }
        for x in successors(p, *cur.last().unwrap()) {
            cur.push(x);
            if !ends_with_relation(p, patterns, cur) {
                go(p, patterns, longest, n, cur, keep, visit);
            }
            cur.pop();
        }
    }
    if n == 0 {
        return;
    }
    for &l in p.letters() {
        let mut cur = vec![l];
        if !ends_with_relation(p, &patterns, &cur) {
            go(p, &patterns, longest, n, &mut cur, &mut keep, &mut visit);
        }
    }
}

/// Bands of period at most `max_period`, one canonical representative per
/// class, ordered by period then letter ranks.
pub fn enumerate_bands(p: &Presentation, max_period: usize) -> Vec<Descriptor> {
    let mut out = Vec::new();
    for n in 1..=max_period {
        let mut blocks: Vec<Vec<Letter>> = Vec::new();
        closed_blocks(
            p,
            n,
            |cur| p.letter_rank(cur[0]) <= p.letter_rank(*cur.iter().min_by_key(|&&l| p.letter_rank(l)).unwrap()),
            |cur| blocks.push(cur.to_vec()),
        );
        for b in blocks {
            let w = Word { v0: p.letter_head(b[0]), sign: p.sign(b[0]), letters: b, shape: Shape::Band };
            if !w.is_primitive() || canonical_word(p, &w) != w {
                continue;
            }
            let d = Descriptor::new(p, w).expect("enumerated band is valid");
            out.push(d);
        }
    }
    out
}

impl fmt::Display for PositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PositionKind::Symmetry => "symmetry",
            PositionKind::NaturallyDirect => "naturally direct",
            PositionKind::NaturallyInverse => "naturally inverse",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::bundled;

    #[test]
    fn inverse_and_shift() {
        let p = bundled("e1").unwrap();
        let w = parse_word(&p, "s* a s*").unwrap();
        assert_eq!(w.inverse(&p).unwrap(), parse_word(&p, "s* a^-1 s*").unwrap());
        let b = parse_word(&p, "band: s* a").unwrap();
        assert_eq!(b.shift(&p, 2), b);
        assert_eq!(b.inverse(&p).unwrap().inverse(&p).unwrap(), b);
        let t = Word::trivial(0, 1);
        assert_eq!(t.inverse(&p).unwrap(), Word::trivial(0, -1));
    }

    #[test]
    fn concatenation_needs_matching_signs() {
        let p = bundled("e1").unwrap();
        let s = parse_word(&p, "s*").unwrap();
        let eps = s.sign;
        assert_eq!(Word::concat(&p, &Word::trivial(0, eps), &s).unwrap(), s);
        assert!(matches!(Word::concat(&p, &Word::trivial(0, -eps), &s), Err(Error::NonConcatenable(_))));
        let a = parse_word(&p, "a").unwrap();
        assert_eq!(Word::concat(&p, &s, &a).unwrap(), parse_word(&p, "s* a").unwrap());
        assert!(Word::concat(&p, &a, &a).is_err());
    }

    #[test]
    fn admissibility() {
        let p = bundled("e1").unwrap();
        let a = parse_word(&p, "a").unwrap();
        assert!(!a.is_end_admissible(&p));
        let w = parse_word(&p, "s* a s*").unwrap();
        assert!(w.is_end_admissible(&p) && w.is_relation_admissible(&p));
        let g = bundled("gp2").unwrap();
        let xxx = parse_word(&g, "x x x").unwrap();
        assert!(!xxx.is_relation_admissible(&g));
        assert!(parse_word(&g, "x x").unwrap().is_relation_admissible(&g));
        let inv = parse_word(&g, "x^-1 x^-1 x^-1").unwrap();
        assert!(!inv.is_relation_admissible(&g));
    }

    #[test]
    fn order_cases() {
        let p = bundled("e1").unwrap();
        let a_s = parse_word(&p, "a s*").unwrap();
        let t = Word::trivial(0, a_s.sign);
        assert_eq!(compare(&p, &a_s, &t).unwrap(), Ordering::Less);
        let ai_s = parse_word(&p, "a^-1 s*").unwrap();
        let t2 = Word::trivial(0, ai_s.sign);
        assert_eq!(compare(&p, &t2, &ai_s).unwrap(), Ordering::Less);
        let u = parse_word(&p, "s* a s*").unwrap();
        let v = parse_word(&p, "s* a^-1 s*").unwrap();
        assert_eq!(compare(&p, &u, &v).unwrap(), Ordering::Less);
        assert_eq!(compare(&p, &u, &u).unwrap(), Ordering::Equal);
        assert!(matches!(compare(&p, &u, &a_s), Err(Error::NotComparable(_))));
    }

    #[test]
    fn positions_of_the_symmetric_string() {
        let p = bundled("e1").unwrap();
        let w = parse_word(&p, "s* a^-1 s* a s* a^-1 s* a s*").unwrap();
        assert_eq!(classify_position(&p, &w, 5).unwrap().kind, PositionKind::Symmetry);
        assert_eq!(classify_position(&p, &w, 3).unwrap().kind, PositionKind::NaturallyInverse);
        assert_eq!(classify_position(&p, &w, 7).unwrap().kind, PositionKind::NaturallyDirect);
        assert!(matches!(classify_position(&p, &w, 2), Err(Error::NotStarLetter(2))));
        let s = parse_word(&p, "s*").unwrap();
        assert_eq!(classify_position(&p, &s, 1).unwrap().kind, PositionKind::Symmetry);
    }

    #[test]
    fn e1_enumeration() {
        let p = bundled("e1").unwrap();
        let strings: Vec<String> = enumerate_strings(&p, 3).iter().map(|d| d.display(&p)).collect();
        assert_eq!(strings, vec!["s*", "s* a s*"]);
        let bands = enumerate_bands(&p, 4);
        assert_eq!(bands.len(), 2);
        assert!(!bands[0].symmetric);
        assert_eq!(bands[0].display(&p), "band: s* a");
        let sym = Descriptor::parse(&p, "band: a s* a^-1 s*").unwrap();
        assert!(sym.symmetric && bands[1].symmetric);
        assert!(bands[1].is_equivalent(&p, &sym));
    }

    #[test]
    fn gp2_short_strings() {
        let p = bundled("gp2").unwrap();
        let strings: Vec<String> = enumerate_strings(&p, 1).iter().map(|d| d.display(&p)).collect();
        assert_eq!(strings, vec!["1_v,+", "x", "y"]);
    }

    #[test]
    fn symmetric_forms() {
        let p = bundled("e1").unwrap();
        let d = Descriptor::parse(&p, "band: s* a s* a^-1 s* a^-1 s* a").unwrap();
        let a = p.arrow_index("a").unwrap();
        let s = p.arrow_index("s").unwrap();
        assert_eq!(
            d.symmetric_decomposition(&p).unwrap(),
            SymmetricForm::Band { u: vec![Letter::Direct(a)], v: vec![Letter::Star(s), Letter::Direct(a)], s, t: s, p: 1, r: 2 }
        );
        assert_eq!(d.jw(), vec![-1, 0, 1, 2]);
        let d2 = Descriptor::parse(&p, "band: a s* a^-1 s*").unwrap();
        assert_eq!(
            d2.symmetric_decomposition(&p).unwrap(),
            SymmetricForm::Band { u: vec![], v: vec![Letter::Direct(a)], s, t: s, p: 0, r: 1 }
        );
        let d3 = Descriptor::parse(&p, "s*").unwrap();
        assert_eq!(d3.symmetric_decomposition(&p).unwrap(), SymmetricForm::String { u: vec![], s });
        let d4 = Descriptor::parse(&p, "s* a s*").unwrap();
        assert!(matches!(d4.symmetric_decomposition(&p), Err(Error::NotSymmetric)));
    }
}
