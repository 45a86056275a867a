//! Semilinear clannish presentations: quiver, per-arrow automorphisms, special
//! loops with their quadratics, zero relations, and the derived sign
//! assignment. Also path rewriting to the admissible-path basis.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{Aut, AutGroup, Elt, FieldOps, FieldSpec, FieldWithAut};
use crate::skewquad::{classify_quadratic, SkewQuadratic};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArrow {
    pub name: String,
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub sigma: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSpecial {
    #[serde(rename = "loop")]
    pub loop_name: String,
    pub beta: u32,
    pub gamma: u32,
}

/// A presentation as it appears in input files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPresentation {
    pub field: FieldSpec,
    pub vertices: Vec<String>,
    pub arrows: Vec<RawArrow>,
    #[serde(default)]
    pub special: Vec<RawSpecial>,
    #[serde(default)]
    pub zero_relations: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    /// Tail.
    pub from: usize,
    /// Head.
    pub to: usize,
    pub sigma: Aut,
}

/// A letter of a word: `a`, `a⁻¹` for ordinary arrows, `s*` for special loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Direct(usize),
    Inverse(usize),
    Star(usize),
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::Direct(a) => Letter::Inverse(a),
            Letter::Inverse(a) => Letter::Direct(a),
            Letter::Star(s) => Letter::Star(s),
        }
    }

    pub fn arrow(self) -> usize {
        match self {
            Letter::Direct(a) | Letter::Inverse(a) | Letter::Star(a) => a,
        }
    }

    pub fn is_star(self) -> bool {
        matches!(self, Letter::Star(_))
    }
    pub fn is_direct(self) -> bool {
        matches!(self, Letter::Direct(_))
    }
    pub fn is_inverse(self) -> bool {
        matches!(self, Letter::Inverse(_))
    }
}

/// A path `a₁a₂…aₙ` (aₙ applied first), or the trivial path at a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub head: usize,
    pub tail: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Path {
        Path { head: v, tail: v, arrows: vec![] }
    }
    pub fn len(&self) -> usize {
        self.arrows.len()
    }
    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub field: FieldWithAut,
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    /// Quadratic of each special loop, indexed by arrow.
    pub special: BTreeMap<usize, SkewQuadratic>,
    pub zero_relations: Vec<Vec<usize>>,
    zero_set: HashSet<Vec<usize>>,
    signs: HashMap<Letter, i8>,
    letters: Vec<Letter>,
    raw: RawPresentation,
}

/// A K-linear combination of admissible paths.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    pub terms: BTreeMap<Path, Elt>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coefficient(&self, p: &Path) -> Elt {
        self.terms.get(p).copied().unwrap_or(0)
    }
    fn add_term(&mut self, f: &FieldWithAut, p: Path, c: Elt) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(p.clone()).or_insert(0);
        *e = f.add(*e, c);
        if *e == 0 {
            self.terms.remove(&p);
        }
    }
    pub fn add(&self, f: &FieldWithAut, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (p, &c) in &other.terms {
            out.add_term(f, p.clone(), c);
        }
        out
    }
}

/// A factor in a raw product expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Arrow(usize),
    Scalar(Elt),
    Vertex(usize),
}

impl Presentation {
    pub fn from_json_str(s: &str) -> Result<Presentation> {
        let raw: RawPresentation = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        validate(&raw)
    }

    pub fn raw(&self) -> &RawPresentation {
        &self.raw
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn arrow_index(&self, name: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn is_special(&self, a: usize) -> bool {
        self.special.contains_key(&a)
    }

    pub fn quadratic(&self, s: usize) -> Option<&SkewQuadratic> {
        self.special.get(&s)
    }

    pub fn sigma(&self, a: usize) -> Aut {
        self.arrows[a].sigma
    }

    /// `σ_p = σ_{a₁}∘…∘σ_{aₙ}` for `p = a₁…aₙ`.
    pub fn path_sigma(&self, arrows: &[usize]) -> Aut {
        let mut s = Aut::identity(self.field.n());
        for &a in arrows {
            s = s.then_after(&self.sigma(a));
        }
        s
    }

    pub fn is_zero_relation(&self, arrows: &[usize]) -> bool {
        self.zero_set.contains(arrows)
    }

    pub fn max_relation_len(&self) -> usize {
        self.zero_relations.iter().map(|r| r.len()).max().unwrap_or(0).max(2)
    }

    /// Special loops at a vertex.
    pub fn specials_at(&self, v: usize) -> Vec<usize> {
        self.special.keys().copied().filter(|&s| self.arrows[s].to == v).collect()
    }

    pub fn letter_head(&self, l: Letter) -> usize {
        match l {
            Letter::Direct(a) | Letter::Star(a) => self.arrows[a].to,
            Letter::Inverse(a) => self.arrows[a].from,
        }
    }

    pub fn letter_tail(&self, l: Letter) -> usize {
        match l {
            Letter::Direct(a) | Letter::Star(a) => self.arrows[a].from,
            Letter::Inverse(a) => self.arrows[a].to,
        }
    }

    pub fn sign(&self, l: Letter) -> i8 {
        self.signs[&l]
    }

    /// All letters in the fixed order used for signs and canonical forms.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter_rank(&self, l: Letter) -> usize {
        self.letters.iter().position(|&x| x == l).expect("letter of this presentation")
    }

    pub fn signs(&self) -> Vec<(Letter, i8)> {
        self.letters.iter().map(|&l| (l, self.signs[&l])).collect()
    }

    pub fn letter_name(&self, l: Letter) -> String {
        match l {
            Letter::Direct(a) => self.arrows[a].name.clone(),
            Letter::Inverse(a) => format!("{}^-1", self.arrows[a].name),
            Letter::Star(a) => format!("{}*", self.arrows[a].name),
        }
    }

    /// Parse `a`, `a^-1`, `a⁻¹` or `s*`.
    pub fn parse_letter(&self, tok: &str) -> Result<Letter> {
        let t = tok.trim();
        if let Some(n) = t.strip_suffix('*') {
            let a = self.arrow_index(n)?;
            if !self.is_special(a) {
                return Err(Error::InvalidWord(format!("{n} is not a special loop")));
            }
            return Ok(Letter::Star(a));
        }
        let (name, inv) = if let Some(n) = t.strip_suffix("^-1") {
            (n, true)
        } else if let Some(n) = t.strip_suffix("⁻¹") {
            (n, true)
        } else {
            (t, false)
        };
        let a = self.arrow_index(name)?;
        if self.is_special(a) {
            return Err(Error::InvalidWord(format!("special loop {name} must be written {name}*")));
        }
        Ok(if inv { Letter::Inverse(a) } else { Letter::Direct(a) })
    }

    /// Check that consecutive arrows compose and return the path.
    pub fn make_path(&self, arrows: &[usize]) -> Result<Path> {
        if arrows.is_empty() {
            return Err(Error::NonComposablePath("empty arrow list".into()));
        }
        for w in arrows.windows(2) {
            if self.arrows[w[0]].from != self.arrows[w[1]].to {
                return Err(Error::NonComposablePath(format!(
                    "{}{}",
                    self.arrows[w[0]].name, self.arrows[w[1]].name
                )));
            }
        }
        Ok(Path {
            head: self.arrows[arrows[0]].to,
            tail: self.arrows[*arrows.last().unwrap()].from,
            arrows: arrows.to_vec(),
        })
    }

    pub fn path_name(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            return format!("e_{}", self.vertices[p.head]);
        }
        p.arrows.iter().map(|&a| self.arrows[a].name.as_str()).collect::<Vec<_>>().join("")
    }

    /// Whether the path avoids every zero relation and every `ss`.
    pub fn is_admissible(&self, arrows: &[usize]) -> bool {
        for w in arrows.windows(2) {
            if w[0] == w[1] && self.is_special(w[0]) {
                return false;
            }
        }
        !self.zero_relations.iter().any(|r| contains_run(arrows, r))
    }

    /// Product of two elements under `(λp)(μq) = λσ_p(μ)pq`, reduced.
    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let f = &self.field;
        let mut out = AlgebraElement::zero();
        for (p, &c) in &x.terms {
            let sp = self.path_sigma(&p.arrows);
            for (q, &d) in &y.terms {
                if p.tail != q.head {
                    continue;
                }
                let mut arrows = p.arrows.clone();
                arrows.extend_from_slice(&q.arrows);
                let coef = f.mul(c, sp.on(f, d));
                let r = self.reduce_monomial(coef, p.head, q.tail, arrows);
                out = out.add(f, &r);
            }
        }
        out
    }

    pub fn scalar_path(&self, c: Elt, p: Path) -> AlgebraElement {
        let mut e = AlgebraElement::zero();
        e.add_term(&self.field, p, c);
        e
    }

    /// Normal form of `c·a₁…aₙ` on the admissible paths.
    fn reduce_monomial(&self, c: Elt, head: usize, tail: usize, arrows: Vec<usize>) -> AlgebraElement {
        let f = &self.field;
        let mut out = AlgebraElement::zero();
        let mut stack = vec![(c, arrows)];
        while let Some((c, arrows)) = stack.pop() {
            if c == 0 || self.zero_relations.iter().any(|r| contains_run(&arrows, r)) {
                continue;
            }
            let ss = arrows.windows(2).position(|w| w[0] == w[1] && self.is_special(w[0]));
            match ss {
                None => {
                    let p = if arrows.is_empty() {
                        Path::trivial(head)
                    } else {
                        Path { head, tail, arrows }
                    };
                    out.add_term(f, p, c);
                }
                Some(i) => {
                    // u s s v = σ_u(β) u s v − σ_u(γ) u v
                    let s = arrows[i];
                    let q = &self.special[&s];
                    let su = self.path_sigma(&arrows[..i]);
                    let mut usv = arrows[..=i].to_vec();
                    usv.extend_from_slice(&arrows[i + 2..]);
                    let mut uv = arrows[..i].to_vec();
                    uv.extend_from_slice(&arrows[i + 2..]);
                    stack.push((f.mul(c, su.on(f, q.beta)), usv));
                    stack.push((f.neg(f.mul(c, su.on(f, q.gamma))), uv));
                }
            }
        }
        out
    }

    /// Reduce a sum of products of arrows, scalars and vertex idempotents.
    pub fn reduce_element(&self, expr: &[(Elt, Vec<Factor>)]) -> Result<AlgebraElement> {
        let f = &self.field;
        let mut total = AlgebraElement::zero();
        for (c, factors) in expr {
            let mut acc: Option<AlgebraElement> = None;
            let mut pending_scalar: Elt = *c;
            for fac in factors {
                let next = match fac {
                    Factor::Scalar(l) => {
                        match &mut acc {
                            None => pending_scalar = f.mul(pending_scalar, *l),
                            Some(a) => {
                                let mut b = AlgebraElement::zero();
                                for (p, &d) in &a.terms {
                                    b.add_term(f, p.clone(), f.mul(d, self.path_sigma(&p.arrows).on(f, *l)));
                                }
                                *a = b;
                            }
                        }
                        continue;
                    }
                    Factor::Arrow(a) => {
                        let ar = &self.arrows[*a];
                        if let Some(prev) = &acc {
                            if prev.terms.keys().all(|p| p.tail != ar.to) && !prev.is_zero() {
                                return Err(Error::NonComposablePath(format!("before {}", ar.name)));
                            }
                        }
                        self.scalar_path(1, Path { head: ar.to, tail: ar.from, arrows: vec![*a] })
                    }
                    Factor::Vertex(v) => self.scalar_path(1, Path::trivial(*v)),
                };
                acc = Some(match acc {
                    None => next,
                    Some(a) => self.mul(&a, &next),
                });
            }
            let Some(a) = acc else {
                return Err(Error::NonComposablePath("a bare scalar needs a vertex".into()));
            };
            let mut scaled = AlgebraElement::zero();
            for (p, &d) in &a.terms {
                scaled.add_term(f, p.clone(), f.mul(pending_scalar, d));
            }
            total = total.add(f, &scaled);
        }
        Ok(total)
    }

    /// Admissible paths of length at most `max_len`, by length then by arrow
    /// indices; trivial paths in vertex order first.
    pub fn enumerate_admissible_paths(&self, max_len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = (0..self.vertices.len()).map(Path::trivial).collect();
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for len in 1..=max_len {
            let mut next = Vec::new();
            for p in &layer {
                for a in 0..self.arrows.len() {
                    if let Some(&last) = p.last() {
                        if self.arrows[last].from != self.arrows[a].to {
                            continue;
                        }
                    }
                    let mut q = p.clone();
                    q.push(a);
                    if self.suffix_admissible(&q) {
                        next.push(q);
                    }
                }
            }
            next.sort();
            for q in &next {
                out.push(Path {
                    head: self.arrows[q[0]].to,
                    tail: self.arrows[q[len - 1]].from,
                    arrows: q.clone(),
                });
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        out
    }

    /// Admissibility of `q` given that `q` minus its last arrow is admissible.
    fn suffix_admissible(&self, q: &[usize]) -> bool {
        let n = q.len();
        if n >= 2 && q[n - 1] == q[n - 2] && self.is_special(q[n - 1]) {
            return false;
        }
        !self.zero_relations.iter().any(|r| r.len() <= n && q[n - r.len()..] == r[..])
    }

    /// Whether there are finitely many admissible paths, i.e. `R` is
    /// finite-dimensional: no cycle in the automaton whose states are
    /// admissible windows of length one less than the longest forbidden pattern.
    pub fn is_finite_dimensional(&self) -> bool {
        let w = self.max_relation_len() - 1;
        let states: Vec<Vec<usize>> = self
            .enumerate_admissible_paths(w)
            .into_iter()
            .filter(|p| p.len() == w)
            .map(|p| p.arrows)
            .collect();
        let index: HashMap<Vec<usize>, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let succ: Vec<Vec<usize>> = states
            .iter()
            .map(|s| {
                (0..self.arrows.len())
                    .filter(|&a| self.arrows[*s.last().unwrap()].from == self.arrows[a].to)
                    .filter_map(|a| {
                        let mut q = s.clone();
                        q.push(a);
                        if !self.suffix_admissible(&q) {
                            return None;
                        }
                        index.get(&q[1..]).copied()
                    })
                    .collect()
            })
            .collect();
        // 0 unvisited, 1 on stack, 2 done
        let mut colour = vec![0u8; states.len()];
        for start in 0..states.len() {
            if colour[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            colour[start] = 1;
            while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                if *k < succ[v].len() {
                    let u = succ[v][*k];
                    *k += 1;
                    match colour[u] {
                        1 => return false,
                        0 => {
                            colour[u] = 1;
                            stack.push((u, 0));
                        }
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// K-dimension of `R` when finite.
    pub fn dimension(&self) -> Option<usize> {
        if !self.is_finite_dimensional() {
            return None;
        }
        let bound = self.arrows.len().pow(self.max_relation_len() as u32 - 1) + self.max_relation_len() + 1;
        Some(self.enumerate_admissible_paths(bound).len())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "valid": true,
            "field": self.raw.field,
            "vertices": self.vertices,
            "arrows": self.arrows.iter().map(|a| serde_json::json!({
                "name": a.name,
                "from": self.vertices[a.from],
                "to": self.vertices[a.to],
                "sigma": a.sigma.exponent(),
                "special": self.is_special(self.arrow_index(&a.name).unwrap()),
            })).collect::<Vec<_>>(),
            "special": self.special.iter().map(|(&s, q)| serde_json::json!({
                "loop": self.arrows[s].name,
                "beta": q.beta,
                "gamma": q.gamma,
                "report": classify_quadratic(q).to_json(),
            })).collect::<Vec<_>>(),
            "zero_relations": self.raw.zero_relations,
            "signs": self.signs().iter().map(|&(l, s)| (self.letter_name(l), s)).collect::<BTreeMap<_, _>>(),
            "finite_dimensional": self.is_finite_dimensional(),
            "dimension": self.dimension(),
        })
    }
}

fn contains_run(hay: &[usize], needle: &[usize]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}^{}) with {} vertices, {} arrows, {} special loops",
            self.field.p(),
            self.field.n(),
            self.vertices.len(),
            self.arrows.len(),
            self.special.len()
        )
    }
}

/// Validate a raw presentation, returning the first violation found.
pub fn validate(raw: &RawPresentation) -> Result<Presentation> {
    check(raw).map_err(|mut v| v.remove(0))
}

/// Validate a raw presentation, collecting every violation of the clannish
/// axioms and quadratic hypotheses. Structural errors stop early.
pub fn check(raw: &RawPresentation) -> std::result::Result<Presentation, Vec<Error>> {
    let field = raw.field.build().map_err(|e| vec![e])?;
    let n = field.n();
    let vidx = |name: &str| {
        raw.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| vec![Error::UnknownName(name.to_string())])
    };
    let mut seen = HashSet::new();
    for v in &raw.vertices {
        if !seen.insert(v.clone()) {
            return Err(vec![Error::Parse(format!("duplicate vertex {v}"))]);
        }
    }
    let mut arrows = Vec::new();
    let mut names = HashSet::new();
    for a in &raw.arrows {
        if !names.insert(a.name.clone()) {
            return Err(vec![Error::Parse(format!("duplicate arrow {}", a.name))]);
        }
        if a.name.is_empty() || a.name.ends_with('*') || a.name.contains("^") || a.name.contains(' ') {
            return Err(vec![Error::Parse(format!("bad arrow name {:?}", a.name))]);
        }
        arrows.push(Arrow { name: a.name.clone(), from: vidx(&a.from)?, to: vidx(&a.to)?, sigma: Aut::new(a.sigma, n) });
    }
    let aidx = |name: &str| {
        arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| vec![Error::UnknownName(name.to_string())])
    };
    let mut errors = Vec::new();
    let mut special = BTreeMap::new();
    for s in &raw.special {
        let a = aidx(&s.loop_name)?;
        if arrows[a].from != arrows[a].to {
            return Err(vec![Error::Parse(format!("special arrow {} is not a loop", s.loop_name))]);
        }
        let q = SkewQuadratic::new(&field, arrows[a].sigma, s.beta, s.gamma).map_err(|e| vec![e])?;
        let r = classify_quadratic(&q);
        let bad = |reason: &str| Error::BadQuadratic { loop_name: s.loop_name.clone(), reason: reason.into() };
        if !r.is_normal {
            errors.push(bad("not normal"));
        } else if !r.is_nonsingular {
            errors.push(bad("singular (γ = 0)"));
        } else if !r.is_semisimple() {
            errors.push(bad("not semisimple (case 4)"));
        }
        special.insert(a, q);
    }
    let mut zero_relations = Vec::new();
    for r in &raw.zero_relations {
        let idx = r.iter().map(|x| aidx(x)).collect::<std::result::Result<Vec<_>, _>>()?;
        if idx.len() < 2 {
            return Err(vec![Error::Parse(format!("zero relation {r:?} has length < 2"))]);
        }
        for w in idx.windows(2) {
            if arrows[w[0]].from != arrows[w[1]].to {
                return Err(vec![Error::NonComposablePath(r.join(""))]);
            }
        }
        let loc = r.join("");
        if special.contains_key(&idx[0]) || special.contains_key(idx.last().unwrap()) {
            errors.push(Error::ClannishViolation {
                condition: "zero relation starts or ends with a special loop".into(),
                location: loc.clone(),
            });
        }
        if idx.windows(2).any(|w| w[0] == w[1] && special.contains_key(&w[0])) {
            errors.push(Error::ClannishViolation {
                condition: "zero relation contains a repeated special loop".into(),
                location: loc,
            });
        }
        zero_relations.push(idx);
    }
    let zero_set: HashSet<Vec<usize>> = zero_relations.iter().cloned().collect();
    for (v, name) in raw.vertices.iter().enumerate() {
        if arrows.iter().filter(|a| a.from == v).count() > 2 {
            errors.push(Error::ClannishViolation { condition: "(1)".into(), location: name.clone() });
        }
        if arrows.iter().filter(|a| a.to == v).count() > 2 {
            errors.push(Error::ClannishViolation { condition: "(1')".into(), location: name.clone() });
        }
    }
    for (ai, a) in arrows.iter().enumerate() {
        if special.contains_key(&ai) {
            continue;
        }
        let after = (0..arrows.len())
            .filter(|&c| arrows[c].from == a.to && !zero_set.contains(&vec![c, ai]))
            .count();
        if after > 1 {
            errors.push(Error::ClannishViolation { condition: "(2)".into(), location: a.name.clone() });
        }
        let before = (0..arrows.len())
            .filter(|&c| arrows[c].to == a.from && !zero_set.contains(&vec![ai, c]))
            .count();
        if before > 1 {
            errors.push(Error::ClannishViolation { condition: "(2')".into(), location: a.name.clone() });
        }
    }
    let mut letters = Vec::new();
    for (i, _) in arrows.iter().enumerate() {
        if special.contains_key(&i) {
            letters.push(Letter::Star(i));
        }
    }
    for (i, _) in arrows.iter().enumerate() {
        if !special.contains_key(&i) {
            letters.push(Letter::Direct(i));
            letters.push(Letter::Inverse(i));
        }
    }
    let mut p = Presentation {
        field,
        vertices: raw.vertices.clone(),
        arrows,
        special,
        zero_relations,
        zero_set,
        signs: HashMap::new(),
        letters,
        raw: raw.clone(),
    };
    match assign_signs(&p) {
        Some(s) => p.signs = s,
        None => errors.push(Error::NoSignAssignment),
    }
    if errors.is_empty() {
        Ok(p)
    } else {
        Err(errors)
    }
}

/// Whether two distinct letters may share head and sign.
fn may_share(p: &Presentation, x: Letter, y: Letter) -> bool {
    let pair = |x: Letter, y: Letter| match (x, y) {
        (Letter::Inverse(a), Letter::Direct(b)) => p.zero_set.contains(&vec![a, b]),
        _ => false,
    };
    pair(x, y) || pair(y, x)
}

/// Lexicographically least valid sign assignment in the fixed letter order,
/// with `+1` preferred.
pub fn assign_signs(p: &Presentation) -> Option<HashMap<Letter, i8>> {
    let letters = p.letters.clone();
    let mut signs: Vec<i8> = Vec::with_capacity(letters.len());
    fn go(p: &Presentation, letters: &[Letter], signs: &mut Vec<i8>) -> bool {
        let k = signs.len();
        if k == letters.len() {
            return true;
        }
        let l = letters[k];
        for s in [1i8, -1] {
            let ok = (0..k).all(|j| {
                signs[j] != s || p.letter_head(letters[j]) != p.letter_head(l) || may_share(p, letters[j], l)
            });
            if ok {
                signs.push(s);
                if go(p, letters, signs) {
                    return true;
                }
                signs.pop();
            }
        }
        false
    }
    if go(p, &letters, &mut signs) {
        Some(letters.into_iter().zip(signs).collect())
    } else {
        None
    }
}

pub const E1_JSON: &str = include_str!("../data/e1.json");
pub const GP2_JSON: &str = include_str!("../data/gp2.json");
pub const A4_JSON: &str = include_str!("../data/a4.json");
pub const DIEUDONNE_JSON: &str = include_str!("../data/dieudonne.json");

/// The bundled presentations by name: `e1`, `gp2`, `a4`, `dieudonne`.
pub fn bundled(name: &str) -> Result<Presentation> {
    let s = match name.to_ascii_lowercase().as_str() {
        "e1" => E1_JSON,
        "gp2" => GP2_JSON,
        "a4" => A4_JSON,
        "dieudonne" => DIEUDONNE_JSON,
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Presentation::from_json_str(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_presentations_validate() {
        for name in ["e1", "gp2", "a4", "dieudonne"] {
            bundled(name).unwrap();
        }
    }

    #[test]
    fn e1_signs_and_paths() {
        let p = bundled("e1").unwrap();
        let a = p.arrow_index("a").unwrap();
        let s = p.arrow_index("s").unwrap();
        assert_eq!(p.sign(Letter::Star(s)), 1);
        assert_eq!(p.sign(Letter::Direct(a)), -1);
        assert_eq!(p.sign(Letter::Inverse(a)), -1);
        let names: Vec<String> = p.enumerate_admissible_paths(3).iter().map(|q| p.path_name(q)).collect();
        assert_eq!(names, vec!["e_1", "a", "s", "as", "sa", "asa", "sas"]);
        assert!(!p.is_finite_dimensional());
    }

    #[test]
    fn gp2_signs_and_dimension() {
        let p = bundled("gp2").unwrap();
        let x = p.arrow_index("x").unwrap();
        let y = p.arrow_index("y").unwrap();
        assert_eq!(p.sign(Letter::Direct(x)), 1);
        assert_eq!(p.sign(Letter::Inverse(y)), 1);
        assert_eq!(p.sign(Letter::Direct(y)), -1);
        assert_eq!(p.sign(Letter::Inverse(x)), -1);
        assert_eq!(p.enumerate_admissible_paths(2).len(), 5);
        assert!(p.is_finite_dimensional());
        assert_eq!(p.dimension(), Some(5));
    }

    #[test]
    fn e1_rewriting() {
        let p = bundled("e1").unwrap();
        let a = p.arrow_index("a").unwrap();
        let s = p.arrow_index("s").unwrap();
        let e = p.reduce_element(&[(1, vec![Factor::Arrow(s), Factor::Arrow(s)])]).unwrap();
        assert_eq!(e, p.scalar_path(1, Path::trivial(0)));
        let e = p.reduce_element(&[(1, vec![Factor::Arrow(a), Factor::Arrow(a)])]).unwrap();
        assert!(e.is_zero());
        let e = p
            .reduce_element(&[(1, vec![Factor::Arrow(s), Factor::Scalar(2), Factor::Vertex(0)])])
            .unwrap();
        assert_eq!(e, p.scalar_path(3, p.make_path(&[s]).unwrap()));
    }

    #[test]
    fn violations() {
        let raw = RawPresentation {
            field: FieldSpec { p: 2, n: 1, modulus: None },
            vertices: vec!["1".into(), "2".into(), "3".into(), "4".into()],
            arrows: ["2", "3", "4"]
                .iter()
                .enumerate()
                .map(|(i, t)| RawArrow { name: format!("a{i}"), from: "1".into(), to: t.to_string(), sigma: 0 })
                .collect(),
            special: vec![],
            zero_relations: vec![],
        };
        let e = validate(&raw).unwrap_err();
        assert_eq!(e, Error::ClannishViolation { condition: "(1)".into(), location: "1".into() });
        // three inverse letters share head 1, so no signs exist either
        assert!(check(&raw).unwrap_err().contains(&Error::NoSignAssignment));

        let raw = RawPresentation {
            field: FieldSpec { p: 2, n: 1, modulus: None },
            vertices: vec!["1".into()],
            arrows: vec![RawArrow { name: "a".into(), from: "1".into(), to: "1".into(), sigma: 0 }],
            special: vec![],
            zero_relations: vec![],
        };
        let p = validate(&raw).unwrap();
        let a = Letter::Direct(0);
        assert_eq!((p.sign(a), p.sign(a.inverse())), (1, -1));
    }
}
