//! Walks and their quivers, the canonically associated walk, the automorphisms
//! `π_i`, the parameter rings `R_w` and the modules `M(C_w) ⊗ V`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::presentation::{Letter, Path, Presentation};
use crate::scalars::{Aut, AutGroup, Elt, FieldOps, FieldSpec, FieldWithAut, Matrix, SemilinearMap};
use crate::skewquad::{classify_quadratic, twist_quadratic, SkewQuadratic};
use crate::wordcore::{classify_position, Descriptor, DescriptorKind, PositionKind, Shape, SymmetricForm, Word};

/// A walk: letters are oriented arrows, special loops included. For ℤ-indexed
/// walks `pos` is the period block read at `i ≥ 1` and `neg` the block read at
/// `i ≤ 0`; both are indexed by `(i-1) mod N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    pub v0: usize,
    pub sign: i8,
    pub shape: Shape,
    pub pos: Vec<Letter>,
    pub neg: Vec<Letter>,
}

impl Walk {
    /// A finite walk with `C* ` a word.
    pub fn finite(p: &Presentation, v0: usize, sign: i8, letters: Vec<Letter>) -> Result<Walk> {
        check_oriented(&letters)?;
        let w = Word::new(p, v0, sign, letters.clone())?;
        Ok(Walk { v0: w.v0, sign: w.sign, shape: Shape::Finite, pos: letters, neg: vec![] })
    }

    /// The ℕ-indexed walk `prefix · cycle · cycle · …`.
    pub fn ray(p: &Presentation, prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Walk> {
        check_oriented(&prefix)?;
        check_oriented(&cycle)?;
        let cycle_start = prefix.len();
        let mut pos = prefix;
        pos.extend(cycle);
        let stars: Vec<Letter> = pos.iter().map(|&l| crate::wordcore::star_of(p, l)).collect();
        let w = Word::ray(p, stars[..cycle_start].to_vec(), stars[cycle_start..].to_vec())?;
        Ok(Walk { v0: w.v0, sign: w.sign, shape: Shape::Ray { cycle_start }, pos, neg: vec![] })
    }

    /// The periodic walk `∞(block)∞`.
    pub fn periodic(p: &Presentation, block: Vec<Letter>) -> Result<Walk> {
        Walk::two_sided(p, block.clone(), block)
    }

    /// A ℤ-indexed walk reading `pos` at `i ≥ 1` and `neg` at `i ≤ 0`, with equal stars.
    pub fn two_sided(p: &Presentation, pos: Vec<Letter>, neg: Vec<Letter>) -> Result<Walk> {
        check_oriented(&pos)?;
        check_oriented(&neg)?;
        let w = Word::band(p, pos.clone())?;
        if pos.len() != neg.len() || Word::band(p, neg.clone())?.star(p) != w.star(p) {
            return Err(Error::InvalidWord("the two halves of a walk must have the same word".into()));
        }
        Ok(Walk { v0: w.v0, sign: w.sign, shape: Shape::Band, pos, neg })
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }
    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// `C_i`, if defined.
    pub fn letter(&self, i: i64) -> Option<Letter> {
        let n = self.pos.len() as i64;
        match self.shape {
            Shape::Finite => (1..=n).contains(&i).then(|| self.pos[(i - 1) as usize]),
            Shape::Band => {
                let k = (i - 1).rem_euclid(n) as usize;
                Some(if i >= 1 { self.pos[k] } else { self.neg[k] })
            }
            Shape::Ray { cycle_start } => {
                if i < 1 {
                    None
                } else if i <= n {
                    Some(self.pos[(i - 1) as usize])
                } else {
                    let cs = cycle_start as i64;
                    Some(self.pos[(cs + (i - 1 - cs) % (n - cs)) as usize])
                }
            }
        }
    }

    pub fn vertex(&self, p: &Presentation, i: i64) -> usize {
        match self.letter(i) {
            Some(l) => p.letter_tail(l),
            None if i == 0 && self.shape != Shape::Band => self.v0,
            None => panic!("index {i} outside the walk"),
        }
    }

    /// The word `C*`.
    pub fn star(&self, p: &Presentation) -> Word {
        let letters: Vec<Letter> = self.pos.iter().map(|&l| crate::wordcore::star_of(p, l)).collect();
        Word { v0: self.v0, sign: self.sign, letters, shape: self.shape }
    }

    pub fn display(&self, p: &Presentation) -> String {
        if self.pos.is_empty() {
            return format!("1_{},{}", p.vertices[self.v0], if self.sign > 0 { "+" } else { "-" });
        }
        let names = |ls: &[Letter]| ls.iter().map(|&l| p.letter_name(l)).collect::<Vec<_>>().join(" ");
        match self.shape {
            Shape::Band if self.pos == self.neg => format!("band: {}", names(&self.pos)),
            Shape::Band => format!("({})^inf | ({})^inf", names(&self.neg), names(&self.pos)),
            Shape::Ray { cycle_start } => {
                format!("{} ({})^inf", names(&self.pos[..cycle_start]), names(&self.pos[cycle_start..])).trim_start().to_string()
            }
            Shape::Finite => names(&self.pos),
        }
    }
}

fn check_oriented(ls: &[Letter]) -> Result<()> {
    if ls.iter().any(|l| l.is_star()) {
        return Err(Error::InvalidWord("walk letters are oriented arrows".into()));
    }
    Ok(())
}

/// An arrow of `Q_C`, labelled by `f_C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkArrow {
    pub from: i64,
    pub to: i64,
    pub arrow: usize,
}

/// The part of `Q_C` on the vertices `lo..=hi`.
pub fn quiver_window(c: &Walk, lo: i64, hi: i64) -> Vec<WalkArrow> {
    ((lo + 1)..=hi)
        .filter_map(|i| c.letter(i))
        .zip((lo + 1)..=hi)
        .map(|(l, i)| match l {
            Letter::Direct(a) => WalkArrow { from: i, to: i - 1, arrow: a },
            Letter::Inverse(a) => WalkArrow { from: i - 1, to: i, arrow: a },
            Letter::Star(_) => unreachable!("walks have no star letters"),
        })
        .collect()
}

/// `Q_C` for a finite walk; one period `0..=N` for a ℤ-indexed walk.
pub fn quiver_of_walk(c: &Walk) -> (Vec<i64>, Vec<WalkArrow>) {
    let n = c.len() as i64;
    ((0..=n).collect(), quiver_window(c, 0, n))
}

/// The naturally oriented walk `C_w` with `(C_w)* = w`; symmetries at `i > 0`
/// become `s⁻¹` and at `i ≤ 0` become `s`.
pub fn canonical_walk(p: &Presentation, w: &Word) -> Result<Walk> {
    let orient = |i: i64, positive: bool| -> Result<Letter> {
        let l = w.letter(i).expect("index in range");
        let Letter::Star(s) = l else { return Ok(l) };
        Ok(match classify_position(p, w, i)?.kind {
            PositionKind::NaturallyDirect => Letter::Direct(s),
            PositionKind::NaturallyInverse => Letter::Inverse(s),
            PositionKind::Symmetry if positive => Letter::Inverse(s),
            PositionKind::Symmetry => Letter::Direct(s),
        })
    };
    match w.shape {
        Shape::Finite => {
            if !w.is_end_admissible(p) {
                return Err(Error::NotEndAdmissible);
            }
            let letters = (1..=w.len() as i64).map(|i| orient(i, true)).collect::<Result<Vec<_>>>()?;
            Ok(Walk { v0: w.v0, sign: w.sign, shape: Shape::Finite, pos: letters, neg: vec![] })
        }
        Shape::Band => {
            let n = w.len() as i64;
            let pos = (1..=n).map(|i| orient(i, true)).collect::<Result<Vec<_>>>()?;
            let neg = (1..=n).map(|i| orient(i - n, false)).collect::<Result<Vec<_>>>()?;
            Ok(Walk { v0: w.v0, sign: w.sign, shape: Shape::Band, pos, neg })
        }
        Shape::Ray { .. } => Err(Error::InvalidWord("ℕ-indexed words have no canonical walk here".into())),
    }
}

fn orient_all(w: &Word, direct: bool) -> Result<Walk> {
    let pos: Vec<Letter> = w
        .letters
        .iter()
        .map(|&l| match l {
            Letter::Star(s) if direct => Letter::Direct(s),
            Letter::Star(s) => Letter::Inverse(s),
            l => l,
        })
        .collect();
    let neg = if w.is_band() { pos.clone() } else { vec![] };
    match w.shape {
        Shape::Ray { .. } => Err(Error::InvalidWord("ℕ-indexed words are not supported here".into())),
        shape => Ok(Walk { v0: w.v0, sign: w.sign, shape, pos, neg }),
    }
}

/// `D_w`: every special letter direct.
pub fn special_direct(p: &Presentation, w: &Word) -> Result<Walk> {
    if w.is_finite() && !w.is_end_admissible(p) {
        return Err(Error::NotEndAdmissible);
    }
    orient_all(w, true)
}

/// `D'_w`: every special letter inverse.
pub fn special_inverse(p: &Presentation, w: &Word) -> Result<Walk> {
    if w.is_finite() && !w.is_end_admissible(p) {
        return Err(Error::NotEndAdmissible);
    }
    orient_all(w, false)
}

/// The automorphisms `π_i` for `lo ≤ i ≤ hi`, with `π_0` the identity and
/// `π_j = σ_a π_i` along each arrow `i → j` of `Q_C`. `label` gives `σ_a`.
pub fn pi_automorphisms<G: AutGroup>(c: &Walk, lo: i64, hi: i64, label: &dyn Fn(usize) -> G) -> BTreeMap<i64, G> {
    assert!(lo <= 0 && hi >= 0);
    let mut out = BTreeMap::new();
    let id = label(0).identity_like();
    out.insert(0, id.clone());
    let mut cur = id.clone();
    for i in 1..=hi {
        let Some(l) = c.letter(i) else { break };
        let s = label(l.arrow());
        cur = if l.is_direct() { s.inverse().then_after(&cur) } else { s.then_after(&cur) };
        out.insert(i, cur.clone());
    }
    let mut cur = id;
    for i in (lo + 1..=0).rev() {
        let Some(l) = c.letter(i) else { break };
        let s = label(l.arrow());
        cur = if l.is_direct() { s.then_after(&cur) } else { s.inverse().then_after(&cur) };
        out.insert(i - 1, cur.clone());
    }
    out
}

/// Concrete `π_i` from the arrow automorphisms of a presentation.
pub fn pi_concrete(p: &Presentation, c: &Walk, lo: i64, hi: i64) -> BTreeMap<i64, Aut> {
    pi_automorphisms(c, lo, hi, &|a| p.sigma(a))
}

/// Generators of the parameter ring acting on `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    X,
    XInv,
    Y,
}

/// The twisting data of one generator: `x·λ = aut(λ)·x`, with the relation
/// `quadratic` when the generator is algebraic.
#[derive(Clone, Debug, PartialEq)]
pub struct Twist {
    pub aut: Aut,
    pub quadratic: Option<SkewQuadratic>,
}

/// The ring `R_w` and the index data needed to build `M(C_w) ⊗ V`.
#[derive(Clone, Debug)]
pub struct RwSpec {
    pub kind: DescriptorKind,
    pub walk: Walk,
    pub jw: Vec<i64>,
    pub pi: BTreeMap<i64, Aut>,
    /// `x` (τ_w for strings and asymmetric bands, ρ_w for symmetric bands).
    pub x: Option<Twist>,
    /// `y` (τ_w for symmetric bands).
    pub y: Option<Twist>,
    /// Length or period of the word.
    pub n: usize,
    /// `(p, r)` for symmetric bands.
    pub pr: Option<(usize, usize)>,
}

impl RwSpec {
    pub fn jw_len(&self) -> usize {
        self.jw.len()
    }
}

/// Symbolic automorphisms `(π, x-twist, y-twist)` of a descriptor, with `label`
/// naming the automorphism of each arrow.
pub fn rw_automorphisms<G: AutGroup>(
    p: &Presentation,
    d: &Descriptor,
    label: &dyn Fn(usize) -> G,
) -> Result<(BTreeMap<i64, G>, Option<G>, Option<G>)> {
    let walk = canonical_walk(p, &d.word)?;
    let n = d.word.len() as i64;
    let conj = |pi: &G, s: usize| pi.inverse().then_after(&label(s)).then_after(pi);
    Ok(match d.kind() {
        DescriptorKind::AsymString => (pi_automorphisms(&walk, 0, n, label), None, None),
        DescriptorKind::SymString => {
            let pi = pi_automorphisms(&walk, 0, n, label);
            let k = (n - 1) / 2;
            let s = d.word.letters[k as usize].arrow();
            let x = conj(&pi[&k], s);
            (pi, Some(x), None)
        }
        DescriptorKind::AsymBand => {
            let pi = pi_automorphisms(&walk, 0, n, label);
            let x = pi[&n].inverse().then_after(&pi[&0]);
            (pi, Some(x), None)
        }
        DescriptorKind::SymBand => {
            let SymmetricForm::Band { s, t, p: pp, r, .. } = d.symmetric_decomposition(p)? else { unreachable!() };
            let (pp, r) = (pp as i64, r as i64);
            let pi = pi_automorphisms(&walk, -pp - 1, r + 1, label);
            let x = conj(&pi[&r], s);
            let y = conj(&pi[&-pp], t);
            (pi, Some(x), Some(y))
        }
    })
}

/// `R_w` for a string or band over a concrete presentation.
pub fn rw_descriptor(p: &Presentation, d: &Descriptor) -> Result<RwSpec> {
    let walk = canonical_walk(p, &d.word)?;
    let (pi, xa, ya) = rw_automorphisms(p, d, &|a| p.sigma(a))?;
    let n = d.word.len();
    let quad = |phi: &Aut, s: usize| twist_quadratic(phi.inv(), p.quadratic(s).expect("special loop"));
    let (x, y, pr) = match d.kind() {
        DescriptorKind::AsymString => (None, None, None),
        DescriptorKind::SymString => {
            let k = ((n - 1) / 2) as i64;
            let s = d.word.letters[k as usize].arrow();
            (Some(Twist { aut: xa.unwrap(), quadratic: Some(quad(&pi[&k], s)) }), None, None)
        }
        DescriptorKind::AsymBand => (Some(Twist { aut: xa.unwrap(), quadratic: None }), None, None),
        DescriptorKind::SymBand => {
            let SymmetricForm::Band { s, t, p: pp, r, .. } = d.symmetric_decomposition(p)? else { unreachable!() };
            let x = Twist { aut: xa.unwrap(), quadratic: Some(quad(&pi[&(r as i64)], s)) };
            let y = Twist { aut: ya.unwrap(), quadratic: Some(quad(&pi[&-(pp as i64)], t)) };
            (Some(x), Some(y), Some((pp, r)))
        }
    };
    Ok(RwSpec { kind: d.kind(), walk, jw: d.jw(), pi, x, y, n, pr })
}

/// Write `b_h = b_j z` with `j ∈ J_w` and `z` a monomial in the generators,
/// leftmost generator first.
pub fn reduce_index(spec: &RwSpec, h: i64) -> (i64, Vec<Gen>) {
    let n = spec.n as i64;
    let mut z = Vec::new();
    let mut h = h;
    match spec.kind {
        DescriptorKind::AsymString => {}
        DescriptorKind::SymString => {
            let k = (n - 1) / 2;
            if h > k {
                h = n - h;
                z.push(Gen::X);
            }
        }
        DescriptorKind::AsymBand => {
            while h >= n {
                h -= n;
                z.insert(0, Gen::XInv);
            }
            while h < 0 {
                h += n;
                z.insert(0, Gen::X);
            }
        }
        DescriptorKind::SymBand => {
            let (pp, r) = spec.pr.unwrap();
            let (pp, r) = (pp as i64, r as i64);
            loop {
                if h > r {
                    h = 2 * r + 1 - h;
                    z.insert(0, Gen::X);
                } else if h < -pp {
                    h = -h - 1 - 2 * pp;
                    z.insert(0, Gen::Y);
                } else {
                    break;
                }
            }
        }
    }
    (h, z)
}

/// A finite-dimensional `R_w`-module given by matrices, acting on row vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parameter {
    /// `K^d` for an asymmetric string.
    Free { dim: usize },
    /// `x·v = τ(v)Λ` with `Λ` a root of the twisted quadratic (symmetric string)
    /// or invertible (asymmetric band).
    Single { lambda: Matrix },
    /// Symmetric band: `y·v = τ(v)Λ`, `x·v = ρ(v)Φ`.
    Pair { lambda: Matrix, phi: Matrix },
}

impl Parameter {
    pub fn dim(&self) -> usize {
        match self {
            Parameter::Free { dim } => *dim,
            Parameter::Single { lambda } | Parameter::Pair { lambda, .. } => lambda.rows(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Parameter::Free { dim } => json!({ "dim": dim }),
            Parameter::Single { lambda } => json!({ "lambda": lambda.row_vecs() }),
            Parameter::Pair { lambda, phi } => json!({ "lambda": lambda.row_vecs(), "phi": phi.row_vecs() }),
        }
    }

    pub fn from_json(f: &FieldWithAut, v: &Value) -> Result<Parameter> {
        let mat = |key: &str| -> Result<Option<Matrix>> {
            let Some(x) = v.get(key) else { return Ok(None) };
            let rows: Vec<Vec<u64>> =
                serde_json::from_value(x.clone()).map_err(|e| Error::Parse(format!("{key}: {e}")))?;
            let rows = rows
                .iter()
                .map(|r| r.iter().map(|&c| f.check(c)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Matrix::from_rows(&rows).map(Some)
        };
        if let Some(d) = v.get("dim").and_then(|x| x.as_u64()) {
            return Ok(Parameter::Free { dim: d as usize });
        }
        match (mat("lambda")?, mat("phi")?) {
            (Some(lambda), Some(phi)) => Ok(Parameter::Pair { lambda, phi }),
            (Some(lambda), None) => Ok(Parameter::Single { lambda }),
            _ => Err(Error::Parse("parameter needs dim, lambda or lambda and phi".into())),
        }
    }
}

struct GenAction {
    aut: Aut,
    matrix: Matrix,
}

/// Check a parameter against `R_w` and return the actions of `x`, `x⁻¹`, `y`.
fn parameter_actions(f: &FieldWithAut, spec: &RwSpec, v: &Parameter) -> Result<BTreeMap<Gen, GenAction>> {
    let bad = |m: String| Error::InvalidParameterMatrix(m);
    let mut out = BTreeMap::new();
    let root = |t: &Twist, m: &Matrix, name: &str| -> Result<()> {
        if !m.is_square() {
            return Err(bad(format!("{name} is not square")));
        }
        if let Some(q) = &t.quadratic {
            if !q.is_root(m) {
                return Err(bad(format!("{name} does not satisfy its quadratic relation")));
            }
        }
        Ok(())
    };
    match (spec.kind, v) {
        (DescriptorKind::AsymString, Parameter::Free { .. }) => {}
        (DescriptorKind::SymString, Parameter::Single { lambda }) => {
            let t = spec.x.as_ref().unwrap();
            root(t, lambda, "Λ")?;
            out.insert(Gen::X, GenAction { aut: t.aut, matrix: lambda.clone() });
        }
        (DescriptorKind::AsymBand, Parameter::Single { lambda }) => {
            let t = spec.x.as_ref().unwrap();
            root(t, lambda, "Λ")?;
            let inv = lambda.inverse(f).map_err(|_| bad("Λ is not invertible".into()))?;
            out.insert(Gen::XInv, GenAction { aut: t.aut.inv(), matrix: t.aut.inv().on_matrix(f, &inv) });
            out.insert(Gen::X, GenAction { aut: t.aut, matrix: lambda.clone() });
        }
        (DescriptorKind::SymBand, Parameter::Pair { lambda, phi }) => {
            let (tx, ty) = (spec.x.as_ref().unwrap(), spec.y.as_ref().unwrap());
            root(ty, lambda, "Λ")?;
            root(tx, phi, "Φ")?;
            if lambda.rows() != phi.rows() {
                return Err(bad("Λ and Φ have different sizes".into()));
            }
            out.insert(Gen::X, GenAction { aut: tx.aut, matrix: phi.clone() });
            out.insert(Gen::Y, GenAction { aut: ty.aut, matrix: lambda.clone() });
        }
        (k, _) => return Err(bad(format!("parameter of the wrong shape for a {}", k.name()))),
    }
    Ok(out)
}

fn act(f: &FieldWithAut, actions: &BTreeMap<Gen, GenAction>, z: &[Gen], u: &[Elt]) -> Vec<Elt> {
    let mut v = u.to_vec();
    for g in z.iter().rev() {
        let a = &actions[g];
        v = a.matrix.vec_mul(f, &a.aut.apply_vec(f, &v));
    }
    v
}

/// `a b_i` in `M(C)` as left-scalar multiples of generators `b_h`.
fn arrow_terms(p: &Presentation, c: &Walk, a: usize, i: i64) -> Result<Vec<(Elt, i64)>> {
    let f = &p.field;
    if c.letter(i) == Some(Letter::Direct(a)) {
        return Ok(vec![(f.one(), i - 1)]);
    }
    if c.letter(i + 1) == Some(Letter::Inverse(a)) {
        return Ok(vec![(f.one(), i + 1)]);
    }
    if let Some(q) = p.quadratic(a) {
        let j = if c.letter(i) == Some(Letter::Inverse(a)) {
            i - 1
        } else if c.letter(i + 1) == Some(Letter::Direct(a)) {
            i + 1
        } else {
            return Err(Error::NotEndAdmissible);
        };
        return Ok(vec![(q.beta, i), (f.neg(q.gamma), j)]);
    }
    Ok(vec![])
}

/// A representation of the underlying quiver: `maps[a]` is the matrix of a
/// `σ_a`-semilinear map from the space at the tail of `a` to the space at its head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub field: FieldWithAut,
    pub vertices: Vec<String>,
    pub arrows: Vec<String>,
    pub dims: Vec<usize>,
    pub maps: Vec<SemilinearMap>,
    /// `(i, coordinate)` for each basis vector of each vertex.
    pub labels: Option<Vec<Vec<(i64, usize)>>>,
}

impl Representation {
    pub fn zero(p: &Presentation) -> Representation {
        Representation::with_dims(p, vec![0; p.vertices.len()])
    }

    /// All maps zero.
    pub fn with_dims(p: &Presentation, dims: Vec<usize>) -> Representation {
        let maps = p
            .arrows
            .iter()
            .map(|a| SemilinearMap::new(a.sigma, Matrix::zeros(dims[a.from], dims[a.to])))
            .collect();
        Representation {
            field: p.field.clone(),
            vertices: p.vertices.clone(),
            arrows: p.arrows.iter().map(|a| a.name.clone()).collect(),
            dims,
            maps,
            labels: None,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Offset of each vertex space in the concatenated coordinates.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dims
            .iter()
            .map(|d| {
                let o = acc;
                acc += d;
                o
            })
            .collect()
    }

    pub fn direct_sum(&self, other: &Representation) -> Result<Representation> {
        if self.field != other.field || self.vertices != other.vertices || self.arrows != other.arrows {
            return Err(Error::PresentationMismatch);
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(m, n)| SemilinearMap::new(m.aut, m.matrix.block_diag(&n.matrix)))
            .collect();
        Ok(Representation {
            field: self.field.clone(),
            vertices: self.vertices.clone(),
            arrows: self.arrows.clone(),
            dims,
            maps,
            labels: None,
        })
    }

    /// Whether the representation matches `p`: automorphisms, shapes, the
    /// quadratic identities of the special loops and the zero relations.
    pub fn check(&self, p: &Presentation) -> Result<()> {
        if self.field != p.field || self.vertices != p.vertices || self.arrows.len() != p.arrows.len() {
            return Err(Error::PresentationMismatch);
        }
        for (a, arrow) in p.arrows.iter().enumerate() {
            let m = &self.maps[a];
            if m.aut != arrow.sigma {
                return Err(Error::DimensionMismatch(format!("arrow {} has the wrong automorphism", arrow.name)));
            }
            if m.source_dim() != self.dims[arrow.from] || m.target_dim() != self.dims[arrow.to] {
                return Err(Error::DimensionMismatch(format!("matrix of {} has the wrong shape", arrow.name)));
            }
        }
        for (&s, q) in &p.special {
            if !q.evaluate_matrix(&self.maps[s].matrix).is_zero() {
                return Err(Error::PreconditionViolated(format!(
                    "quadratic relation fails for {}",
                    p.arrows[s].name
                )));
            }
        }
        for r in &p.zero_relations {
            let path = p.make_path(r)?;
            if !self.path_action(p, &path)?.matrix.is_zero() {
                return Err(Error::PreconditionViolated(format!("zero relation {} acts non-trivially", p.path_name(&path))));
            }
        }
        Ok(())
    }

    /// The action of a path: `σ_p`-semilinear from the tail space to the head space.
    pub fn path_action(&self, p: &Presentation, path: &Path) -> Result<SemilinearMap> {
        let f = &self.field;
        let mut acc = SemilinearMap::identity(f, self.dims[path.tail]);
        let mut at = path.tail;
        for &a in path.arrows.iter().rev() {
            if p.arrows[a].from != at {
                return Err(Error::NonComposablePath(p.path_name(path)));
            }
            acc = self.maps[a].after(f, &acc)?;
            at = p.arrows[a].to;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        let dims: serde_json::Map<String, Value> =
            self.vertices.iter().zip(&self.dims).map(|(v, d)| (v.clone(), json!(d))).collect();
        let arrows: serde_json::Map<String, Value> = self
            .arrows
            .iter()
            .zip(&self.maps)
            .map(|(a, m)| (a.clone(), json!({"sigma": m.aut.exponent(), "matrix": m.matrix.row_vecs()})))
            .collect();
        let mut v = json!({
            "field": serde_json::to_value(FieldSpec::of(&self.field)).expect("field spec"),
            "dims": dims,
            "arrows": arrows,
        });
        if let Some(labels) = &self.labels {
            let l: serde_json::Map<String, Value> =
                self.vertices.iter().zip(labels).map(|(v, ls)| (v.clone(), json!(ls))).collect();
            v["labels"] = Value::Object(l);
        }
        v
    }

    pub fn from_json(p: &Presentation, v: &Value) -> Result<Representation> {
        let bad = |m: String| Error::Parse(format!("representation: {m}"));
        if let Some(fs) = v.get("field") {
            let spec: FieldSpec = serde_json::from_value(fs.clone()).map_err(|e| bad(e.to_string()))?;
            if spec.build()? != p.field {
                return Err(Error::FieldMismatch);
            }
        }
        let dims_v = v.get("dims").and_then(|x| x.as_object()).ok_or_else(|| bad("missing dims".into()))?;
        let mut dims = vec![0usize; p.vertices.len()];
        for (name, d) in dims_v {
            dims[p.vertex_index(name)?] = d.as_u64().ok_or_else(|| bad(format!("dimension of {name}")))? as usize;
        }
        let mut rep = Representation::with_dims(p, dims);
        let arrows = v.get("arrows").and_then(|x| x.as_object()).ok_or_else(|| bad("missing arrows".into()))?;
        for (name, a) in arrows {
            let k = p.arrow_index(name)?;
            let (r, c) = (rep.dims[p.arrows[k].from], rep.dims[p.arrows[k].to]);
            if let Some(sig) = a.get("sigma").and_then(|x| x.as_i64()) {
                if Aut::new(sig, p.field.n()) != p.arrows[k].sigma {
                    return Err(bad(format!("automorphism of {name} differs from the presentation")));
                }
            }
            let rows: Vec<Vec<u64>> = serde_json::from_value(a.get("matrix").cloned().unwrap_or(json!([])))
                .map_err(|e| bad(format!("{name}: {e}")))?;
            if rows.len() != r || rows.iter().any(|row| row.len() != c) {
                return Err(Error::DimensionMismatch(format!("matrix of {name} must be {r}×{c}")));
            }
            let mut m = Matrix::zeros(r, c);
            for (i, row) in rows.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    m.set(i, j, p.field.check(x)?);
                }
            }
            rep.maps[k].matrix = m;
        }
        if let Some(l) = v.get("labels").and_then(|x| x.as_object()) {
            let mut labels = vec![vec![]; p.vertices.len()];
            for (name, ls) in l {
                labels[p.vertex_index(name)?] =
                    serde_json::from_value(ls.clone()).map_err(|e| bad(format!("labels: {e}")))?;
            }
            rep.labels = Some(labels);
        }
        Ok(rep)
    }
}

/// Assemble a representation from generators `b_i` (`i ∈ jw`) and the folding
/// rule `reduce`, with each block a copy of `K^d`.
fn assemble(
    p: &Presentation,
    c: &Walk,
    jw: &[i64],
    pi: &BTreeMap<i64, Aut>,
    d: usize,
    reduce: &dyn Fn(i64) -> (i64, Vec<Gen>),
    actions: &BTreeMap<Gen, GenAction>,
) -> Result<Representation> {
    let f = &p.field;
    let nv = p.vertices.len();
    let mut slot: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut dims = vec![0usize; nv];
    let mut labels = vec![vec![]; nv];
    for &i in jw {
        let v = c.vertex(p, i);
        slot.insert(i, (v, dims[v]));
        dims[v] += d;
        labels[v].extend((0..d).map(|k| (i, k)));
    }
    let mut rep = Representation::with_dims(p, dims);
    for (a, arrow) in p.arrows.iter().enumerate() {
        let mut m = Matrix::zeros(rep.dims[arrow.from], rep.dims[arrow.to]);
        for &i in jw {
            let (v, off) = slot[&i];
            if v != arrow.from {
                continue;
            }
            let terms = arrow_terms(p, c, a, i)?;
            for k in 0..d {
                let mut e = vec![f.zero(); d];
                e[k] = f.one();
                let u = pi[&i].inv().apply_vec(f, &e);
                for &(kappa, h) in &terms {
                    let (j, z) = reduce(h);
                    let (vj, offj) = slot[&j];
                    debug_assert_eq!(vj, arrow.to);
                    let y = pi[&j].apply_vec(f, &act(f, actions, &z, &u));
                    for (t, &yt) in y.iter().enumerate() {
                        let cur = m.get(off + k, offj + t);
                        m.set(off + k, offj + t, f.add(cur, f.mul(kappa, yt)));
                    }
                }
            }
        }
        rep.maps[a].matrix = m;
    }
    rep.labels = Some(labels);
    Ok(rep)
}

/// `M(C_w) ⊗_{R_w} V`, with basis ordered by `(i ∈ J_w, coordinate)`.
pub fn build_module(p: &Presentation, d: &Descriptor, v: &Parameter) -> Result<Representation> {
    let spec = rw_descriptor(p, d)?;
    let actions = parameter_actions(&p.field, &spec, v)?;
    let reduce = |h: i64| reduce_index(&spec, h);
    assemble(p, &spec.walk, &spec.jw, &spec.pi, v.dim(), &reduce, &actions)
}

/// The representation on the free module with basis `(b'_i)` of a finite walk,
/// using the defining relations of `M(C)` and the quadratic fallback. It
/// satisfies the zero relations exactly when `C*` is relation-admissible.
pub fn walk_module(p: &Presentation, c: &Walk) -> Result<Representation> {
    if c.shape != Shape::Finite {
        return Err(Error::InvalidWord("walk_module needs a finite walk".into()));
    }
    if !c.star(p).is_end_admissible(p) {
        return Err(Error::NotEndAdmissible);
    }
    let n = c.len() as i64;
    let jw: Vec<i64> = (0..=n).collect();
    let pi = pi_concrete(p, c, 0, n);
    assemble(p, c, &jw, &pi, 1, &|h| (h, vec![]), &BTreeMap::new())
}

/// Roots of a quadratic of size `≤ max_dim` that define simple modules.
pub fn simple_roots(q: &SkewQuadratic, max_dim: usize) -> Vec<Matrix> {
    classify_quadratic(q).simple_modules.into_iter().filter(|m| m.rows() <= max_dim).collect()
}

/// A small library of parameters defining indecomposable `R_w`-modules:
/// `K` for asymmetric strings, the simple modules for symmetric strings, the
/// one-dimensional `λ ≠ 0` (and companion matrices of `p(x)^k` when `τ_w = id`)
/// for asymmetric bands, and pairs of simple modules of equal size for
/// symmetric bands.
pub fn parameter_library(p: &Presentation, d: &Descriptor, max_dim: usize) -> Result<Vec<Parameter>> {
    let spec = rw_descriptor(p, d)?;
    let f = &p.field;
    Ok(match spec.kind {
        DescriptorKind::AsymString => vec![Parameter::Free { dim: 1 }],
        DescriptorKind::SymString => {
            let q = spec.x.as_ref().unwrap().quadratic.as_ref().unwrap();
            simple_roots(q, max_dim).into_iter().map(|lambda| Parameter::Single { lambda }).collect()
        }
        DescriptorKind::AsymBand => {
            if spec.x.as_ref().unwrap().aut.is_identity() {
                laurent_indecomposables(f, max_dim).into_iter().map(|lambda| Parameter::Single { lambda }).collect()
            } else {
                f.elements().filter(|&l| l != 0).map(|l| Parameter::Single { lambda: Matrix::scalar(1, l) }).collect()
            }
        }
        DescriptorKind::SymBand => {
            let qx = spec.x.as_ref().unwrap().quadratic.as_ref().unwrap();
            let qy = spec.y.as_ref().unwrap().quadratic.as_ref().unwrap();
            let mut out = Vec::new();
            for lambda in simple_roots(qy, max_dim) {
                for phi in simple_roots(qx, max_dim) {
                    if lambda.rows() == phi.rows() {
                        out.push(Parameter::Pair { lambda: lambda.clone(), phi });
                    }
                }
            }
            out
        }
    })
}

/// Monic polynomials as coefficient vectors, constant term first.
type Poly = Vec<Elt>;

fn poly_mul(f: &FieldWithAut, a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn poly_rem(f: &FieldWithAut, a: &Poly, m: &Poly) -> Poly {
    let mut r = a.clone();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            let c = f.div(lead, *m.last().unwrap());
            for (i, &y) in m.iter().enumerate() {
                r[shift + i] = f.sub(r[shift + i], f.mul(c, y));
            }
        }
        r.pop();
    }
    r
}

fn monic_polys(f: &FieldWithAut, deg: usize) -> Vec<Poly> {
    let q = f.q() as usize;
    let count = q.pow(deg as u32);
    (0..count)
        .map(|mut code| {
            let mut c: Poly = (0..deg)
                .map(|_| {
                    let x = (code % q) as Elt;
                    code /= q;
                    x
                })
                .collect();
            c.push(f.one());
            c
        })
        .collect()
}

/// Monic irreducible polynomials of degree `deg` other than `x`.
pub fn irreducible_polys(f: &FieldWithAut, deg: usize) -> Vec<Poly> {
    monic_polys(f, deg)
        .into_iter()
        .filter(|c| c[0] != 0)
        .filter(|c| (1..=deg / 2).all(|d| monic_polys(f, d).iter().all(|g| poly_rem(f, c, g).iter().any(|&x| x != 0))))
        .collect()
}

/// Companion matrix for `v ↦ v·C`: `e_i C = e_{i+1}`, `e_{m-1} C = −Σ c_j e_j`.
pub fn companion(f: &FieldWithAut, c: &Poly) -> Matrix {
    let m = c.len() - 1;
    let mut out = Matrix::zeros(m, m);
    for i in 0..m.saturating_sub(1) {
        out.set(i, i + 1, f.one());
    }
    for j in 0..m {
        out.set(m - 1, j, f.neg(c[j]));
    }
    out
}

/// Companion matrices of `p(x)^k` for monic irreducible `p ≠ x` with `k·deg p ≤ max_dim`:
/// the indecomposable finite-dimensional `K[x, x⁻¹]`-modules of that size.
pub fn laurent_indecomposables(f: &FieldWithAut, max_dim: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for deg in 1..=max_dim {
        for p in irreducible_polys(f, deg) {
            let mut pk = p.clone();
            for k in 1..=max_dim / deg {
                if k > 1 {
                    pk = poly_mul(f, &pk, &p);
                }
                out.push(companion(f, &pk));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::bundled;
    use crate::scalars::SymAut;
    use crate::wordcore::parse_word;

    fn e1() -> Presentation {
        bundled("e1").unwrap()
    }

    fn names(p: &Presentation, ls: &[Letter]) -> String {
        ls.iter().map(|&l| p.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn canonical_walk_of_the_symmetric_string() {
        let p = e1();
        let w = parse_word(&p, "s* a^-1 s* a s* a^-1 s* a s*").unwrap();
        let c = canonical_walk(&p, &w).unwrap();
        assert_eq!(names(&p, &c.pos), "s^-1 a^-1 s^-1 a s^-1 a^-1 s a s");
        let s = canonical_walk(&p, &parse_word(&p, "s*").unwrap()).unwrap();
        assert_eq!(names(&p, &s.pos), "s^-1");
    }

    #[test]
    fn canonical_walk_of_the_symmetric_band() {
        let p = e1();
        let w = parse_word(&p, "band: s* a s* a^-1 s* a^-1 s* a").unwrap();
        let c = canonical_walk(&p, &w).unwrap();
        assert_eq!(names(&p, &c.pos), "s a s^-1 a^-1 s^-1 a^-1 s^-1 a");
        assert_eq!(names(&p, &c.neg), "s a s a^-1 s^-1 a^-1 s a");
    }

    #[test]
    fn quiver_of_the_example_walk() {
        let p = e1();
        let s = p.arrow_index("s").unwrap();
        let a = p.arrow_index("a").unwrap();
        let letters = vec![
            Letter::Inverse(s),
            Letter::Inverse(a),
            Letter::Inverse(s),
            Letter::Inverse(a),
            Letter::Inverse(s),
            Letter::Direct(a),
            Letter::Direct(s),
            Letter::Direct(a),
            Letter::Direct(s),
        ];
        let c = Walk::finite(&p, 0, p.sign(Letter::Star(s)), letters).unwrap();
        let (verts, arrows) = quiver_of_walk(&c);
        assert_eq!(verts.len(), 10);
        assert_eq!(arrows[0], WalkArrow { from: 0, to: 1, arrow: s });
        assert_eq!(arrows[4], WalkArrow { from: 4, to: 5, arrow: s });
        assert_eq!(arrows[5], WalkArrow { from: 6, to: 5, arrow: a });
        assert_eq!(arrows[8], WalkArrow { from: 9, to: 8, arrow: s });
    }

    #[test]
    fn pi_chain_of_the_symmetric_string() {
        let p = e1();
        let w = parse_word(&p, "s* a^-1 s* a s* a^-1 s* a s*").unwrap();
        let c = canonical_walk(&p, &w).unwrap();
        let label = |a: usize| SymAut::symbol(if p.arrows[a].name == "s" { "σ" } else { "θ" });
        let pi = pi_automorphisms(&c, 0, 9, &label);
        assert_eq!(pi[&1], SymAut::parse("σ").unwrap());
        assert_eq!(pi[&2], SymAut::parse("θσ").unwrap());
        assert_eq!(pi[&3], SymAut::parse("σθσ").unwrap());
        assert_eq!(pi[&4], SymAut::parse("θ^-1σθσ").unwrap());
    }

    #[test]
    fn twists_of_the_bands() {
        let p = e1();
        let label = |a: usize| SymAut::symbol(if p.arrows[a].name == "s" { "σ" } else { "θ" });
        let d = Descriptor::parse(&p, "band: s* a s* a s* a^-1").unwrap();
        let (_, x, _) = rw_automorphisms(&p, &d, &label).unwrap();
        assert_eq!(x.unwrap(), SymAut::parse("σθσθσθ^-1").unwrap());
        let d = Descriptor::parse(&p, "band: s* a s* a^-1 s* a^-1 s* a").unwrap();
        let (_, x, y) = rw_automorphisms(&p, &d, &label).unwrap();
        assert_eq!(x.unwrap(), SymAut::parse("σθσθ^-1σ^-1").unwrap());
        assert_eq!(y.unwrap().abelian(), SymAut::parse("θσθ^-1").unwrap().abelian());
    }

    #[test]
    fn index_reduction() {
        let p = e1();
        let d = Descriptor::parse(&p, "s* a^-1 s* a s* a^-1 s* a s*").unwrap();
        let spec = rw_descriptor(&p, &d).unwrap();
        assert_eq!(reduce_index(&spec, 7), (2, vec![Gen::X]));
        assert_eq!(reduce_index(&spec, 3), (3, vec![]));
        let d = Descriptor::parse(&p, "band: s* a s* a s* a^-1").unwrap();
        let spec = rw_descriptor(&p, &d).unwrap();
        assert_eq!(reduce_index(&spec, 8), (2, vec![Gen::XInv]));
        assert_eq!(reduce_index(&spec, -1), (5, vec![Gen::X]));
        let d = Descriptor::parse(&p, "band: s* a s* a^-1 s* a^-1 s* a").unwrap();
        let spec = rw_descriptor(&p, &d).unwrap();
        assert_eq!(spec.jw, vec![-1, 0, 1, 2]);
        assert_eq!(reduce_index(&spec, 3), (2, vec![Gen::X]));
        assert_eq!(reduce_index(&spec, -2), (-1, vec![Gen::Y]));
        assert_eq!(reduce_index(&spec, 4), (1, vec![Gen::X]));
        assert_eq!(reduce_index(&spec, 7), (-1, vec![Gen::Y, Gen::X]));
        assert_eq!(reduce_index(&spec, -9), (-1, vec![Gen::X, Gen::Y]));
    }

    #[test]
    fn small_e1_modules() {
        let p = e1();
        let s = p.arrow_index("s").unwrap();
        let a = p.arrow_index("a").unwrap();
        let d = Descriptor::parse(&p, "s*").unwrap();
        let lib = parameter_library(&p, &d, 2).unwrap();
        assert_eq!(lib.len(), 1);
        let m = build_module(&p, &d, &lib[0]).unwrap();
        assert_eq!(m.dims, vec![1]);
        assert!(m.maps[a].matrix.is_zero());
        m.check(&p).unwrap();
        let ss = p.make_path(&[s, s]).unwrap();
        assert_eq!(m.path_action(&p, &ss).unwrap().matrix, Matrix::identity(1));

        let d = Descriptor::parse(&p, "s* a s*").unwrap();
        let m = build_module(&p, &d, &Parameter::Free { dim: 1 }).unwrap();
        assert_eq!(m.dims, vec![4]);
        m.check(&p).unwrap();
    }

    #[test]
    fn e1_band_modules_satisfy_relations() {
        let p = e1();
        for text in ["band: s* a", "band: s* a s* a s* a^-1", "band: s* a s* a^-1 s* a^-1 s* a", "band: a s* a^-1 s*"] {
            let d = Descriptor::parse(&p, text).unwrap();
            for v in parameter_library(&p, &d, 2).unwrap() {
                let m = build_module(&p, &d, &v).unwrap();
                m.check(&p).unwrap();
                assert_eq!(m.total_dim(), d.jw_len() * v.dim());
            }
        }
    }

    #[test]
    fn non_relation_admissible_walk_breaks_a_relation() {
        let g = bundled("gp2").unwrap();
        let x = g.arrow_index("x").unwrap();
        let c = Walk::finite(&g, 0, g.sign(Letter::Direct(x)), vec![Letter::Direct(x); 3]).unwrap();
        let m = walk_module(&g, &c).unwrap();
        assert!(m.check(&g).is_err());
        let c = Walk::finite(&g, 0, g.sign(Letter::Direct(x)), vec![Letter::Direct(x); 2]).unwrap();
        walk_module(&g, &c).unwrap().check(&g).unwrap();
    }

    #[test]
    fn laurent_parameters() {
        let f = FieldWithAut::new(2, 1, None).unwrap();
        let ms = laurent_indecomposables(&f, 3);
        // x+1, (x+1)², (x+1)³, x²+x+1, x³+x+1, x³+x²+1
        assert_eq!(ms.len(), 6);
        assert!(ms.iter().all(|m| m.is_invertible(&f)));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let p = e1();
        let d = Descriptor::parse(&p, "s*").unwrap();
        let r = build_module(&p, &d, &Parameter::Single { lambda: Matrix::scalar(1, 0) });
        assert!(matches!(r, Err(Error::InvalidParameterMatrix(_))));
        let d = Descriptor::parse(&p, "band: s* a").unwrap();
        let r = build_module(&p, &d, &Parameter::Single { lambda: Matrix::scalar(1, 0) });
        assert!(matches!(r, Err(Error::InvalidParameterMatrix(_))));
    }
}
