//! Semilinear relations, the functors `C±`, the subquotients
//! `F_{C,i} = T_{C,i}/B_{C,i}` and the multiplicities of strings and bands.
//!
//! Every subspace is a prime-field subspace of the prime coordinates of
//! [`to_prime_coords`]; K-dimensions are read off after checking K-stability.

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::presentation::{Letter, Presentation};
use crate::scalars::{
    expand_semilinear, from_prime_coords, scalar_action, to_prime_coords, Aut, FieldOps, FieldWithAut, Matrix, PrimeField, Subspace,
};
use crate::skewquad::{twist_quadratic, SkewQuadratic};
use crate::walkmod::{canonical_walk, Representation, Walk};
use crate::wordcore::{
    canonical_word, letter_sign, relation_patterns, star_of, successors, Descriptor, Shape, SymmetricForm, Word,
};

/// A σ-semilinear relation `V → W`: a K-submodule of `V ⊕ _σW`, stored by
/// prime coordinates with the `V` block first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearRelation {
    pub aut: Aut,
    /// K-dimension of `V`.
    pub source: usize,
    /// K-dimension of `W`.
    pub target: usize,
    /// `[K : F_p]`.
    pub degree: usize,
    pub prime: PrimeField,
    pub space: Subspace,
}

impl SemilinearRelation {
    /// The graph `{(v, σ(v)M)}`.
    pub fn graph(f: &FieldWithAut, aut: Aut, m: &Matrix) -> SemilinearRelation {
        let n = f.n() as usize;
        let rows = Matrix::identity(m.rows() * n).hstack(&expand_semilinear(f, aut, m));
        SemilinearRelation {
            aut,
            source: m.rows(),
            target: m.cols(),
            degree: n,
            prime: f.prime_field().clone(),
            space: Subspace::from_matrix(f.prime_field(), &rows),
        }
    }

    pub fn identity(f: &FieldWithAut, dim: usize) -> SemilinearRelation {
        SemilinearRelation::graph(f, Aut::identity(f.n()), &Matrix::identity(dim))
    }

    /// `V ⊕ W`.
    pub fn full(f: &FieldWithAut, aut: Aut, source: usize, target: usize) -> SemilinearRelation {
        let n = f.n() as usize;
        SemilinearRelation {
            aut,
            source,
            target,
            degree: n,
            prime: f.prime_field().clone(),
            space: Subspace::full((source + target) * n),
        }
    }

    /// Wrap a subspace of `V ⊕ W`; it must be closed under the twisted K-action.
    pub fn from_subspace(
        f: &FieldWithAut,
        aut: Aut,
        source: usize,
        target: usize,
        space: Subspace,
    ) -> Result<SemilinearRelation> {
        let n = f.n() as usize;
        if space.ambient() != (source + target) * n {
            return Err(Error::SpaceMismatch("subspace does not live in V ⊕ W".into()));
        }
        let r = SemilinearRelation { aut, source, target, degree: n, prime: f.prime_field().clone(), space };
        if !r.is_k_stable(f) {
            return Err(Error::SpaceMismatch("subspace is not a K-submodule of V ⊕ σW".into()));
        }
        Ok(r)
    }

    /// The relation of an oriented letter: the graph of the arrow or its inverse.
    pub fn of_letter(m: &Representation, l: Letter) -> Result<SemilinearRelation> {
        let get = |a: usize| {
            m.maps.get(a).ok_or_else(|| Error::UnknownName(format!("arrow {a}")))
        };
        match l {
            Letter::Direct(a) => {
                let map = get(a)?;
                Ok(SemilinearRelation::graph(&m.field, map.aut, &map.matrix))
            }
            Letter::Inverse(a) => {
                let map = get(a)?;
                Ok(SemilinearRelation::graph(&m.field, map.aut, &map.matrix).invert())
            }
            Letter::Star(_) => Err(Error::InvalidWord("relations are defined for oriented letters".into())),
        }
    }

    pub fn source_prime(&self) -> usize {
        self.source * self.degree
    }
    pub fn target_prime(&self) -> usize {
        self.target * self.degree
    }

    /// `C⁻¹ = {(w, v) : (v, w) ∈ C}`.
    pub fn invert(&self) -> SemilinearRelation {
        let (s, t) = (self.source_prime(), self.target_prime());
        let perm: Vec<usize> = (s..s + t).chain(0..s).collect();
        let b = self.space.basis().select_cols(&perm);
        SemilinearRelation {
            aut: self.aut.inv(),
            source: self.target,
            target: self.source,
            degree: self.degree,
            prime: self.prime.clone(),
            space: Subspace::from_matrix(&self.prime, &b),
        }
    }

    fn with(&self, aut: Aut, source: usize, target: usize, space: Subspace) -> SemilinearRelation {
        SemilinearRelation { aut, source, target, degree: self.degree, prime: self.prime.clone(), space }
    }

    /// `self ∘ other`: `other` first.
    pub fn compose(&self, other: &SemilinearRelation) -> Result<SemilinearRelation> {
        if other.target != self.source || other.degree != self.degree {
            return Err(Error::SpaceMismatch(format!(
                "composing a relation from a {}-dimensional space after one into a {}-dimensional space",
                self.source, other.target
            )));
        }
        let fp = &self.prime;
        let aut = self.aut.compose(&other.aut)?;
        let (su, sv, sw) = (other.source_prime(), other.target_prime(), self.target_prime());
        let (a, b) = (other.space.basis(), self.space.basis());
        if a.rows() == 0 || b.rows() == 0 {
            let space = Subspace::zero(su + sw);
            return Ok(self.with(aut, other.source, self.target, space));
        }
        let dv = a.block(0, su, a.rows(), sv);
        let cv = b.block(0, 0, b.rows(), sv).map(|x| fp.neg(x));
        let k = dv.vstack(&cv).left_kernel(fp);
        let mut big = Matrix::zeros(a.rows() + b.rows(), su + sw);
        big.set_block(0, 0, &a.block(0, 0, a.rows(), su));
        big.set_block(a.rows(), su, &b.block(0, sv, b.rows(), sw));
        let space = if k.rows() == 0 { Subspace::zero(su + sw) } else { Subspace::from_matrix(fp, &k.mul(fp, &big)) };
        Ok(self.with(aut, other.source, self.target, space))
    }

    /// `CU = {w : (u, w) ∈ C for some u ∈ U}`.
    pub fn apply(&self, u: &Subspace) -> Result<Subspace> {
        let (s, t) = (self.source_prime(), self.target_prime());
        if u.ambient() != s {
            return Err(Error::SpaceMismatch(format!("subspace of dimension {} for a relation from {}", u.ambient(), s)));
        }
        let fp = &self.prime;
        let b = self.space.basis();
        if b.rows() == 0 {
            return Ok(Subspace::zero(t));
        }
        let left = b.block(0, 0, b.rows(), s);
        let right = b.block(0, s, b.rows(), t);
        let coeffs = if s == 0 { Subspace::full(b.rows()) } else { Subspace::preimage(fp, &left, u) };
        if coeffs.is_zero() {
            return Ok(Subspace::zero(t));
        }
        Ok(Subspace::from_matrix(fp, &coeffs.basis().mul(fp, &right)))
    }

    /// `CV`.
    pub fn image(&self) -> Subspace {
        self.apply(&Subspace::full(self.source_prime())).expect("full source")
    }

    /// `(C′, C″)` for a relation on a space, by iterating `C` from `0` and from `V`.
    pub fn stable_pair(&self) -> Result<(Subspace, Subspace)> {
        if self.source != self.target {
            return Err(Error::SpaceMismatch("stable pair of a relation between different spaces".into()));
        }
        let d = self.source_prime();
        let iterate = |start: Subspace| -> Result<Subspace> {
            let mut cur = start;
            for _ in 0..=d {
                let next = self.apply(&cur)?;
                if next == cur {
                    return Ok(cur);
                }
                cur = next;
            }
            Err(Error::LawViolation("iteration of a relation did not stabilise".into()))
        };
        let lower = iterate(Subspace::zero(d))?;
        let upper = iterate(Subspace::full(d))?;
        Ok((lower, upper))
    }

    /// Closure under `λ·(v, w) = (λv, σ(λ)w)` for a generator `λ` of K.
    pub fn is_k_stable(&self, f: &FieldWithAut) -> bool {
        let t = f.t();
        let act = scalar_action(f, t, self.source).block_diag(&scalar_action(f, self.aut.on(f, t), self.target));
        let fp = f.prime_field();
        self.space.contains_space(fp, &self.space.image(fp, &act))
    }

    /// Whether `(v, w)`, given in K-coordinates, lies in the relation.
    pub fn contains_pair(&self, f: &FieldWithAut, v: &[u32], w: &[u32]) -> bool {
        let mut x = to_prime_coords(f, v);
        x.extend(to_prime_coords(f, w));
        self.space.contains(f.prime_field(), &x)
    }
}

/// Whether a prime-field subspace of `K^dim` is a K-subspace.
pub fn is_k_subspace(f: &FieldWithAut, s: &Subspace) -> bool {
    let n = f.n() as usize;
    if s.ambient() % n != 0 {
        return false;
    }
    let act = scalar_action(f, f.t(), s.ambient() / n);
    let fp = f.prime_field();
    s.contains_space(fp, &s.image(fp, &act))
}

/// K-dimension of a K-subspace.
pub fn k_dim(f: &FieldWithAut, s: &Subspace) -> usize {
    s.dim() / f.n() as usize
}

/// The subspace `e_v M`, all of it.
pub fn vertex_space(m: &Representation, v: usize) -> Subspace {
    Subspace::full(m.dims[v] * m.field.n() as usize)
}

/// Whether `(v, w) ∈ X` implies `(w, βw − γv) ∈ X`, checked on a basis of `X`.
pub fn q_bound_check(f: &FieldWithAut, x: &SemilinearRelation, q: &SkewQuadratic) -> bool {
    if x.source != x.target {
        return false;
    }
    let d = x.source_prime();
    let basis = x.space.basis();
    (0..basis.rows()).all(|r| {
        let row = basis.row(r);
        let v = from_prime_coords(f, &row[..d]);
        let w = from_prime_coords(f, &row[d..]);
        let next: Vec<u32> = v.iter().zip(&w).map(|(&a, &b)| f.sub(f.mul(q.beta, b), f.mul(q.gamma, a))).collect();
        x.contains_pair(f, &w, &next)
    })
}

/// The relation `C_1 C_2 ⋯ C_k : e_{v_k}M → e_{v_0}M` of oriented letters read from `head`.
pub fn letters_relation(m: &Representation, p: &Presentation, head: usize, letters: &[Letter]) -> Result<SemilinearRelation> {
    let mut r = SemilinearRelation::identity(&m.field, m.dims[head]);
    let mut at = head;
    for &l in letters {
        if p.letter_head(l) != at {
            return Err(Error::SpaceMismatch(format!("letter {} does not start at {}", p.letter_name(l), p.vertices[at])));
        }
        r = r.compose(&SemilinearRelation::of_letter(m, l)?)?;
        at = p.letter_tail(l);
    }
    Ok(r)
}

fn law(ok: bool, name: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::LawViolation(name.into()))
    }
}

/// `C″ = C′ + C″∩(C⁻¹)″`, `(C⁻¹)″ = (C⁻¹)′ + C″∩(C⁻¹)″`, `C″∩(C⁻¹)′ ⊆ C′` and
/// `C′∩(C⁻¹)″ ⊆ (C⁻¹)′`.
pub fn check_stable_laws(c: &SemilinearRelation) -> Result<()> {
    let fp = &c.prime;
    let (c1, c2) = c.stable_pair()?;
    let (d1, d2) = c.invert().stable_pair()?;
    let both = c2.intersect(fp, &d2);
    law(c1.sum(fp, &both) == c2, "C'' = C' + C''∩(C⁻¹)''")?;
    law(d1.sum(fp, &both) == d2, "(C⁻¹)'' = (C⁻¹)' + C''∩(C⁻¹)''")?;
    law(c1.contains_space(fp, &c2.intersect(fp, &d1)), "C''∩(C⁻¹)' ⊆ C'")?;
    law(d1.contains_space(fp, &c1.intersect(fp, &d2)), "C'∩(C⁻¹)'' ⊆ (C⁻¹)'")
}

/// For a relation bound by a normal non-singular quadratic and `U ⊆ W`:
/// `U∩XW = U∩X⁻¹W` and `(W∩XU) + (U∩XW) = (W∩X⁻¹U) + (U∩X⁻¹W)`.
pub fn check_oneq_laws(x: &SemilinearRelation, u: &Subspace, w: &Subspace) -> Result<()> {
    let fp = &x.prime;
    if !w.contains_space(fp, u) {
        return Err(Error::SpaceMismatch("U is not contained in W".into()));
    }
    let xi = x.invert();
    let (xw, xiw, xu, xiu) = (x.apply(w)?, xi.apply(w)?, x.apply(u)?, xi.apply(u)?);
    law(u.intersect(fp, &xw) == u.intersect(fp, &xiw), "U∩XW = U∩X⁻¹W")?;
    law(w.intersect(fp, &xw) == w.intersect(fp, &xiw), "W∩XW = W∩X⁻¹W")?;
    let lhs = w.intersect(fp, &xu).sum(fp, &u.intersect(fp, &xw));
    let rhs = w.intersect(fp, &xiu).sum(fp, &u.intersect(fp, &xiw));
    law(lhs == rhs, "(W∩XU) + (U∩XW) = (W∩X⁻¹U) + (U∩X⁻¹W)")
}

/// The identities between the stable pairs of `Y⁻¹X⁻¹`, `X⁻¹Y⁻¹`, `XY` and `YX`
/// for two relations bound by normal non-singular quadratics.
pub fn check_symmetric_band_laws(x: &SemilinearRelation, y: &SemilinearRelation) -> Result<()> {
    let fp = &x.prime;
    let (xi, yi) = (x.invert(), y.invert());
    let (a1, a2) = yi.compose(&xi)?.stable_pair()?;
    let (b1, b2) = xi.compose(&yi)?.stable_pair()?;
    let (c1, c2) = x.compose(y)?.stable_pair()?;
    let (d1, d2) = y.compose(x)?.stable_pair()?;
    let cap = |s: &Subspace, t: &Subspace| s.intersect(fp, t);
    let top = cap(&a2, &b2);
    for (s, name) in [
        (cap(&a2, &c2), "(Y⁻¹X⁻¹)''∩(XY)''"),
        (cap(&d2, &b2), "(YX)''∩(X⁻¹Y⁻¹)''"),
        (cap(&d2, &c2), "(YX)''∩(XY)''"),
    ] {
        law(s == top, &format!("(Y⁻¹X⁻¹)''∩(X⁻¹Y⁻¹)'' = {name}"))?;
    }
    let bottom = cap(&a1, &b1);
    for (s, name) in [
        (cap(&a1, &b2), "(Y⁻¹X⁻¹)'∩(X⁻¹Y⁻¹)''"),
        (cap(&a1, &c2), "(Y⁻¹X⁻¹)'∩(XY)''"),
        (cap(&d1, &b2), "(YX)'∩(X⁻¹Y⁻¹)''"),
        (cap(&d1, &c2), "(YX)'∩(XY)''"),
        (cap(&a2, &b1), "(Y⁻¹X⁻¹)''∩(X⁻¹Y⁻¹)'"),
        (cap(&d2, &b1), "(YX)''∩(X⁻¹Y⁻¹)'"),
        (cap(&a2, &c1), "(Y⁻¹X⁻¹)''∩(XY)'"),
        (cap(&d2, &c1), "(YX)''∩(XY)'"),
        (cap(&d1, &b1), "(YX)'∩(X⁻¹Y⁻¹)'"),
        (cap(&a1, &c1), "(Y⁻¹X⁻¹)'∩(XY)'"),
        (cap(&d1, &c1), "(YX)'∩(XY)'"),
    ] {
        law(s == bottom, &format!("(Y⁻¹X⁻¹)'∩(X⁻¹Y⁻¹)' = {name}"))?;
    }
    Ok(())
}

fn ext_letters(p: &Presentation, w: &Word) -> (Option<usize>, Option<usize>) {
    let mut a = None;
    let mut b = None;
    for (k, arrow) in p.arrows.iter().enumerate() {
        let _ = arrow;
        if a.is_none() && w.extends_by(p, star_of(p, Letter::Inverse(k))) {
            a = Some(k);
        }
        if b.is_none() && w.extends_by(p, star_of(p, Letter::Direct(k))) {
            b = Some(k);
        }
    }
    (a, b)
}

/// `(C⁺, C⁻)` of a finite walk whose relation is `r`.
fn finite_plus_minus(m: &Representation, p: &Presentation, star: &Word, r: &SemilinearRelation) -> Result<(Subspace, Subspace)> {
    if !star.is_right_end_admissible(p) {
        return Err(Error::NotRightEndAdmissible);
    }
    let (a, b) = ext_letters(p, star);
    let end = star.end_vertex(p);
    let plus = match a {
        Some(a) => r.compose(&SemilinearRelation::of_letter(m, Letter::Inverse(a))?)?.apply(&Subspace::zero(m.dims[p.arrows[a].to] * m.field.n() as usize))?,
        None => r.apply(&vertex_space(m, end))?,
    };
    let minus = match b {
        Some(b) => r.compose(&SemilinearRelation::of_letter(m, Letter::Direct(b))?)?.apply(&vertex_space(m, p.arrows[b].from))?,
        None => r.apply(&Subspace::zero(m.dims[end] * m.field.n() as usize))?,
    };
    Ok((plus, minus))
}

/// `(D⁺(M), D⁻(M))` for a finite walk or an eventually periodic ray `D = P·E^∞`,
/// where `D⁺ = P(E″)` and `D⁻ = P(E′)`.
pub fn walk_plus_minus(p: &Presentation, m: &Representation, d: &Walk) -> Result<(Subspace, Subspace)> {
    match d.shape {
        Shape::Finite => {
            let r = letters_relation(m, p, d.v0, &d.pos)?;
            finite_plus_minus(m, p, &d.star(p), &r)
        }
        Shape::Ray { cycle_start } => {
            let prefix = letters_relation(m, p, d.v0, &d.pos[..cycle_start])?;
            let start = d.vertex(p, cycle_start as i64);
            let period = letters_relation(m, p, start, &d.pos[cycle_start..])?;
            let (lower, upper) = period.stable_pair()?;
            Ok((prefix.apply(&upper)?, prefix.apply(&lower)?))
        }
        Shape::Band => Err(Error::InvalidWord("D± needs a walk indexed from 0".into())),
    }
}

/// The pieces `(C_{>i}, (C_{≤i})⁻¹)` of a finite or ℤ-indexed walk.
pub fn split_walk(p: &Presentation, c: &Walk, i: i64) -> Result<(Walk, Walk)> {
    let n = c.len() as i64;
    match c.shape {
        Shape::Finite => {
            if i < 0 || i > n {
                return Err(Error::InvalidWord(format!("index {i} outside 0..={n}")));
            }
            let v = c.vertex(p, i);
            let right: Vec<Letter> = c.pos[i as usize..].to_vec();
            let left: Vec<Letter> = c.pos[..i as usize].iter().rev().map(|l| l.inverse()).collect();
            let first_sign = |ls: &[Letter]| ls.first().map(|&l| letter_sign(p, l));
            let (ds, es) = match (first_sign(&right), first_sign(&left)) {
                (Some(x), Some(y)) => (x, y),
                (Some(x), None) => (x, -x),
                (None, Some(y)) => (-y, y),
                (None, None) => (c.sign, -c.sign),
            };
            let d = Walk { v0: v, sign: ds, shape: Shape::Finite, pos: right, neg: vec![] };
            let e = Walk { v0: v, sign: es, shape: Shape::Finite, pos: left, neg: vec![] };
            Ok((d, e))
        }
        Shape::Band => {
            let at = |j: i64| c.letter(j).expect("ℤ-indexed");
            let hi = i.max(0);
            let d_prefix: Vec<Letter> = ((i + 1)..=hi).map(at).collect();
            let d_cycle: Vec<Letter> = ((hi + 1)..=(hi + n)).map(at).collect();
            let lo = i.min(0);
            let e_prefix: Vec<Letter> = ((lo + 1)..=i).rev().map(|j| at(j).inverse()).collect();
            let e_cycle: Vec<Letter> = ((lo - n + 1)..=lo).rev().map(|j| at(j).inverse()).collect();
            Ok((Walk::ray(p, d_prefix, d_cycle)?, Walk::ray(p, e_prefix, e_cycle)?))
        }
        Shape::Ray { .. } => Err(Error::InvalidWord("cannot split a walk indexed from 0".into())),
    }
}

/// `T`, `B` and `dim_K T/B` at a chosen index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorReport {
    pub index: i64,
    pub t_dim: usize,
    pub b_dim: usize,
    pub f_dim: usize,
}

impl FunctorReport {
    pub fn to_json(&self) -> Value {
        json!({"index": self.index, "T_dim": self.t_dim, "B_dim": self.b_dim, "f_dim": self.f_dim})
    }
}

fn subquotient(f: &FieldWithAut, index: i64, d: (Subspace, Subspace), e: (Subspace, Subspace)) -> Result<FunctorReport> {
    let fp = f.prime_field();
    let (dp, dm) = d;
    let (ep, em) = e;
    let t = dp.intersect(fp, &ep);
    let b = dp.intersect(fp, &em).sum(fp, &dm.intersect(fp, &ep));
    if !is_k_subspace(f, &t) || !is_k_subspace(f, &b) {
        return Err(Error::LawViolation("T or B is not a K-subspace".into()));
    }
    if !t.contains_space(fp, &b) {
        return Err(Error::LawViolation("B is not contained in T".into()));
    }
    let (t_dim, b_dim) = (k_dim(f, &t), k_dim(f, &b));
    Ok(FunctorReport { index, t_dim, b_dim, f_dim: t_dim - b_dim })
}

/// `dim_K F_{C,i}(M)` with `T_{C,i} = D⁺∩E⁺`, `B_{C,i} = D⁺∩E⁻ + D⁻∩E⁺` for
/// `D = C_{>i}` and `E = (C_{≤i})⁻¹`.
pub fn f_dim_walk(p: &Presentation, m: &Representation, c: &Walk, i: i64) -> Result<FunctorReport> {
    let (d, e) = split_walk(p, c, i)?;
    let dpm = walk_plus_minus(p, m, &d)?;
    let epm = walk_plus_minus(p, m, &e)?;
    subquotient(&m.field, i, dpm, epm)
}

/// `dim_K F_{C_w}(M)` computed at `i ∈ J_w`.
pub fn f_dim_at(p: &Presentation, m: &Representation, d: &Descriptor, i: i64) -> Result<FunctorReport> {
    if !d.jw().contains(&i) {
        return Err(Error::PreconditionViolated(format!("{i} is not in J_w")));
    }
    f_dim_walk(p, m, &canonical_walk(p, &d.word)?, i)
}

/// `dim_K F_{C_w}(M)` at the least index of `J_w`.
pub fn f_dim(p: &Presentation, m: &Representation, d: &Descriptor) -> Result<FunctorReport> {
    let i = *d.jw().iter().min().expect("J_w is non-empty");
    f_dim_at(p, m, d, i)
}

/// Search bounds for [`multiplicities`]; `None` selects the dimension-based default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_len: Option<usize>,
    pub max_period: Option<usize>,
    /// Verify the relation laws on every relation met during the search.
    pub check_laws: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicity {
    pub descriptor: Descriptor,
    pub f_dim: usize,
}

/// Non-zero multiplicities with `checksum = Σ |J_w|·f_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicities {
    pub entries: Vec<Multiplicity>,
    pub dim: usize,
    pub checksum: usize,
    pub complete: bool,
    pub max_len: usize,
    pub max_period: usize,
    pub laws_checked: usize,
}

impl Multiplicities {
    /// The multiplicity of the class of `d`.
    pub fn get(&self, p: &Presentation, d: &Descriptor) -> usize {
        self.entries.iter().filter(|e| e.descriptor.is_equivalent(p, d)).map(|e| e.f_dim).sum()
    }

    pub fn to_json(&self, p: &Presentation) -> Value {
        let list: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "word": e.descriptor.display(p),
                    "symmetric": e.descriptor.symmetric,
                    "kind": e.descriptor.kind().name(),
                    "f_dim": e.f_dim,
                    "Jw": e.descriptor.jw_len(),
                })
            })
            .collect();
        json!({
            "multiplicities": list,
            "checksum": self.checksum,
            "dim": self.dim,
            "complete": self.complete,
            "max_len": self.max_len,
            "max_period": self.max_period,
        })
    }
}

struct Search<'a> {
    p: &'a Presentation,
    m: &'a Representation,
    check_laws: bool,
    laws: AtomicUsize,
    patterns: Vec<Vec<Letter>>,
    /// Longest asymmetric string and band that can contribute: `|J_w| ≤ dim_K M`.
    asym_len: usize,
    asym_period: usize,
}

/// Whether `ls` extends to a symmetric string `u s* u⁻¹` of length at most `max_len`.
fn symmetric_prefix(ls: &[Letter], max_len: usize) -> bool {
    let len = ls.len();
    (1..=len).any(|c| {
        ls[c - 1].is_star()
            && 2 * c - 1 <= max_len
            && len <= 2 * c - 1
            && (1..=len - c).all(|j| ls[c + j - 1] == ls[c - j - 1].inverse())
    })
}

/// Depth up to which the searches branch in parallel.
const PARALLEL_DEPTH: usize = 4;

fn oriented(l: Letter) -> Letter {
    match l {
        Letter::Star(s) => Letter::Direct(s),
        l => l,
    }
}

fn ranks(p: &Presentation, ls: &[Letter]) -> Vec<usize> {
    ls.iter().map(|&l| p.letter_rank(l)).collect()
}

fn inverse_letters(ls: &[Letter]) -> Vec<Letter> {
    ls.iter().rev().map(|l| l.inverse()).collect()
}

impl<'a> Search<'a> {
    fn laws<T>(&self, f: impl FnOnce() -> Result<T>) -> Result<()> {
        if self.check_laws {
            f()?;
            self.laws.fetch_add(1, AtomicOrdering::Relaxed);
        }
        Ok(())
    }

    fn ends_with_relation(&self, ls: &[Letter]) -> bool {
        self.patterns.iter().any(|pat| ls.ends_with(pat))
    }

    fn star_at(&self, l: usize, eps: i8) -> bool {
        self.p.special.keys().any(|&s| self.p.letter_tail(Letter::Star(s)) == l && self.p.sign(Letter::Star(s)) == -eps)
    }

    fn trivial_strings(&self) -> Result<Vec<(Word, usize)>> {
        let mut out = Vec::new();
        for l in 0..self.p.vertices.len() {
            if self.m.dims[l] == 0 || !self.p.specials_at(l).is_empty() {
                continue;
            }
            let c = Walk { v0: l, sign: 1, shape: Shape::Finite, pos: vec![], neg: vec![] };
            let r = f_dim_walk(self.p, self.m, &c, 0)?;
            if r.f_dim > 0 {
                out.push((Word::trivial(l, 1), r.f_dim));
            }
        }
        Ok(out)
    }

    /// Strings of `H(ℓ,ε)` starting with `x`, through `D_w` at index 0.
    fn strings_from(&self, x: Letter, max_len: usize) -> Result<Vec<(Word, usize)>> {
        let (p, m) = (self.p, self.m);
        let (l, eps) = (p.letter_head(x), p.sign(x));
        if max_len == 0 || m.dims[l] == 0 || self.star_at(l, eps) || self.ends_with_relation(&[x]) {
            return Ok(Vec::new());
        }
        let e = Walk { v0: l, sign: -eps, shape: Shape::Finite, pos: vec![], neg: vec![] };
        let (ep, em) = walk_plus_minus(p, m, &e)?;
        if ep.is_zero() {
            return Ok(Vec::new());
        }
        for &s in p.specials_at(l).iter() {
            self.laws(|| check_oneq_laws(&SemilinearRelation::of_letter(m, Letter::Direct(s))?, &em, &ep))?;
        }
        let r = SemilinearRelation::of_letter(m, oriented(x))?;
        self.string_node(l, eps, &ep, &em, vec![x], r, max_len)
    }

    #[allow(clippy::too_many_arguments)]
    fn string_node(
        &self,
        l: usize,
        eps: i8,
        ep: &Subspace,
        em: &Subspace,
        stars: Vec<Letter>,
        r: SemilinearRelation,
        max_len: usize,
    ) -> Result<Vec<(Word, usize)>> {
        let (p, m) = (self.p, self.m);
        let fp = m.field.prime_field();
        let mut out = Vec::new();
        // Every extension z has T_z ⊆ R(V)∩E⁺ and B_z ⊇ E⁻∩D_z⁺ + R(0)∩E⁺.
        let reach = r.image().intersect(fp, ep);
        let floor = r.apply(&Subspace::zero(r.source_prime()))?.intersect(fp, ep).sum(fp, em);
        if floor.contains_space(fp, &reach) {
            return Ok(out);
        }
        let w = Word { v0: l, sign: eps, letters: stars.clone(), shape: Shape::Finite };
        let inv = inverse_letters(&stars);
        if w.is_right_end_admissible(p) && ranks(p, &stars) <= ranks(p, &inv) {
            let dpm = finite_plus_minus(m, p, &w, &r)?;
            let rep = subquotient(&m.field, 0, dpm, (ep.clone(), em.clone()))?;
            if rep.f_dim > 0 {
                out.push((w.clone(), rep.f_dim));
            }
            if stars == inv {
                self.laws(|| self.symmetric_string_laws(l, &stars, ep, em))?;
            }
        }
        if stars.len() >= max_len {
            return Ok(out);
        }
        let child = |y: Letter| -> Result<Vec<(Word, usize)>> {
            let mut ext = stars.clone();
            ext.push(y);
            let viable = ext.len() <= self.asym_len || symmetric_prefix(&ext, max_len);
            if !viable || self.ends_with_relation(&ext) {
                return Ok(Vec::new());
            }
            let rel = r.compose(&SemilinearRelation::of_letter(m, oriented(y))?)?;
            self.string_node(l, eps, ep, em, ext, rel, max_len)
        };
        let next = successors(p, *stars.last().unwrap());
        let parts: Vec<Vec<(Word, usize)>> = if stars.len() < PARALLEL_DEPTH {
            next.par_iter().map(|&y| child(y)).collect::<Result<_>>()?
        } else {
            next.iter().map(|&y| child(y)).collect::<Result<_>>()?
        };
        out.extend(parts.into_iter().flatten());
        Ok(out)
    }

    /// `X = U s U⁻¹` for `w = u s* u⁻¹`: bound by the twisted quadratic of `s`.
    fn symmetric_string_laws(&self, l: usize, stars: &[Letter], ep: &Subspace, em: &Subspace) -> Result<()> {
        let (p, m) = (self.p, self.m);
        let k = (stars.len() - 1) / 2;
        let letters: Vec<Letter> = stars[..k].iter().map(|&x| oriented(x)).collect();
        let u = letters_relation(m, p, l, &letters)?;
        let s = stars[k].arrow();
        let x = u.compose(&SemilinearRelation::of_letter(m, Letter::Direct(s))?)?.compose(&u.invert())?;
        let q = twist_quadratic(u.aut, p.quadratic(s).expect("special loop"));
        law(q_bound_check(&m.field, &x, &q), "conjugated special loop is bound by the twisted quadratic")?;
        check_oneq_laws(&x, em, ep)?;
        check_stable_laws(&x)
    }

    /// Bands whose block starts with `x`, through `D_w` at index 0.
    fn bands_from(&self, x: Letter, max_period: usize) -> Result<Vec<(Word, usize)>> {
        let (p, m) = (self.p, self.m);
        let l = p.letter_head(x);
        if max_period == 0 || m.dims[l] == 0 || p.letter_rank(x.inverse()) < p.letter_rank(x) || self.ends_with_relation(&[x]) {
            return Ok(Vec::new());
        }
        let r = SemilinearRelation::of_letter(m, oriented(x))?;
        self.band_node(max_period, vec![x], r)
    }

    fn band_node(&self, max_period: usize, stars: Vec<Letter>, r: SemilinearRelation) -> Result<Vec<(Word, usize)>> {
        let (p, m) = (self.p, self.m);
        let mut out = Vec::new();
        // The period relation R = P·S has R″ ⊆ P(V) and R′ ⊇ P(0); if these agree, T ⊆ B.
        let zero = Subspace::zero(r.source_prime());
        if r.image() == r.apply(&zero)? {
            return Ok(out);
        }
        let first = stars[0];
        let n = stars.len();
        let last = stars[n - 1];
        if p.letter_tail(last) == p.letter_head(first) && p.sign(last.inverse()) != p.sign(first) {
            let w = Word { v0: p.letter_head(first), sign: p.sign(first), letters: stars.clone(), shape: Shape::Band };
            if w.is_relation_admissible(p) && w.is_primitive() && canonical_word(p, &w) == w {
                let symmetric = Descriptor::new(p, w.clone())?.symmetric;
                if n <= self.asym_period || symmetric {
                    self.laws(|| check_stable_laws(&r))?;
                    let (r1, r2) = r.stable_pair()?;
                    let (i1, i2) = r.invert().stable_pair()?;
                    let rep = subquotient(&m.field, 0, (r2, r1), (i2, i1))?;
                    if rep.f_dim > 0 {
                        out.push((w.clone(), rep.f_dim));
                    }
                    if symmetric {
                        self.laws(|| self.symmetric_band_laws(&Descriptor::new(p, w)?, &r))?;
                    }
                }
            }
        }
        if n >= max_period {
            return Ok(out);
        }
        let floor = p.letter_rank(first);
        let next: Vec<Letter> = successors(p, last)
            .into_iter()
            .filter(|&y| p.letter_rank(y) >= floor && p.letter_rank(y.inverse()) >= floor)
            .collect();
        let child = |y: Letter| -> Result<Vec<(Word, usize)>> {
            let mut ext = stars.clone();
            ext.push(y);
            if self.ends_with_relation(&ext) {
                return Ok(Vec::new());
            }
            let rel = r.compose(&SemilinearRelation::of_letter(m, oriented(y))?)?;
            self.band_node(max_period, ext, rel)
        };
        let parts: Vec<Vec<(Word, usize)>> = if n < PARALLEL_DEPTH {
            next.par_iter().map(|&y| child(y)).collect::<Result<_>>()?
        } else {
            next.iter().map(|&y| child(y)).collect::<Result<_>>()?
        };
        out.extend(parts.into_iter().flatten());
        Ok(out)
    }

    /// For `∞(v s* v⁻¹ u⁻¹ t* u)∞`: `X = V s V⁻¹`, `Y = U⁻¹ t U` and the period relation is `XY`.
    fn symmetric_band_laws(&self, d: &Descriptor, period: &SemilinearRelation) -> Result<()> {
        let (p, m) = (self.p, self.m);
        let SymmetricForm::Band { s, t, p: pp, r, .. } = d.symmetric_decomposition(p)? else {
            return Err(Error::NotSymmetric);
        };
        let letters: Vec<Letter> = d.word.letters.iter().map(|&x| oriented(x)).collect();
        let n = letters.len();
        let e = letters_relation(m, p, d.word.v0, &letters[..r])?;
        let x = e.compose(&SemilinearRelation::of_letter(m, Letter::Direct(s))?)?.compose(&e.invert())?;
        let u = letters_relation(m, p, p.arrows[t].from, &letters[n - pp..])?;
        let y = u.invert().compose(&SemilinearRelation::of_letter(m, Letter::Direct(t))?)?.compose(&u)?;
        law(x.compose(&y)?.space == period.space, "period relation = XY")?;
        let qx = twist_quadratic(e.aut, p.quadratic(s).expect("special loop"));
        let qy = twist_quadratic(u.aut.inv(), p.quadratic(t).expect("special loop"));
        law(q_bound_check(&m.field, &x, &qx), "X is bound by the twisted quadratic of s")?;
        law(q_bound_check(&m.field, &y, &qy), "Y is bound by the twisted quadratic of t")?;
        check_stable_laws(&x)?;
        check_stable_laws(&y)?;
        check_symmetric_band_laws(&x, &y)
    }
}

/// Default bounds: `|J_w|·f_dim ≤ dim_K M` gives strings of length at most
/// `2·dim_K M − 1` and bands of period at most `2·dim_K M`; beyond `dim_K M − 1`
/// and `dim_K M` only symmetric words are searched.
pub fn default_bounds(m: &Representation) -> (usize, usize) {
    let d = m.total_dim();
    ((2 * d).saturating_sub(1), 2 * d)
}

/// All strings and bands `w` in the search window with `F_{C_w}(M) ≠ 0`.
pub fn multiplicities(p: &Presentation, m: &Representation, opts: &SearchOptions) -> Result<Multiplicities> {
    m.check(p)?;
    let (dl, dp) = default_bounds(m);
    let max_len = opts.max_len.unwrap_or(dl);
    let max_period = opts.max_period.unwrap_or(dp);
    let dim = m.total_dim();
    let search = Search {
        p,
        m,
        check_laws: opts.check_laws,
        laws: AtomicUsize::new(0),
        patterns: relation_patterns(p),
        asym_len: dim.saturating_sub(1),
        asym_period: dim,
    };
    let mut found = search.trivial_strings()?;
    let string_parts: Vec<Vec<(Word, usize)>> =
        p.letters().par_iter().map(|&x| search.strings_from(x, max_len)).collect::<Result<_>>()?;
    let band_parts: Vec<Vec<(Word, usize)>> =
        p.letters().par_iter().map(|&x| search.bands_from(x, max_period)).collect::<Result<_>>()?;
    found.extend(string_parts.into_iter().flatten());
    found.extend(band_parts.into_iter().flatten());
    found.sort_by_key(|(w, _)| (w.is_band(), w.len(), ranks(p, &w.letters), w.v0));
    let mut entries = Vec::with_capacity(found.len());
    for (w, f_dim) in found {
        entries.push(Multiplicity { descriptor: Descriptor::new(p, w)?, f_dim });
    }
    let checksum = entries.iter().map(|e| e.descriptor.jw_len() * e.f_dim).sum();
    Ok(Multiplicities {
        entries,
        dim,
        checksum,
        complete: checksum == dim,
        max_len,
        max_period,
        laws_checked: search.laws.into_inner(),
    })
}

/// Check the relation laws on the relations of `d` evaluated on `M`: the
/// stable laws of a band's period relation, and for symmetric words the
/// quadratic bounds, the `oneq` identities and the four-way identity of the
/// conjugated special loops. Returns the number of law groups checked.
pub fn check_relation_laws(p: &Presentation, m: &Representation, d: &Descriptor) -> Result<usize> {
    m.check(p)?;
    let dim = m.total_dim();
    let search = Search {
        p,
        m,
        check_laws: true,
        laws: AtomicUsize::new(0),
        patterns: relation_patterns(p),
        asym_len: dim.saturating_sub(1),
        asym_period: dim,
    };
    let w = &d.word;
    let letters: Vec<Letter> = w.letters.iter().map(|&x| oriented(x)).collect();
    match w.shape {
        Shape::Band => {
            let r = letters_relation(m, p, w.v0, &letters)?;
            search.laws(|| check_stable_laws(&r))?;
            search.laws(|| check_stable_laws(&r.invert()))?;
            if d.symmetric {
                search.laws(|| search.symmetric_band_laws(d, &r))?;
            }
        }
        Shape::Finite if d.symmetric => {
            let e = Walk { v0: w.v0, sign: -w.sign, shape: Shape::Finite, pos: vec![], neg: vec![] };
            let (ep, em) = walk_plus_minus(p, m, &e)?;
            for &s in p.specials_at(w.v0).iter() {
                search.laws(|| check_oneq_laws(&SemilinearRelation::of_letter(m, Letter::Direct(s))?, &em, &ep))?;
            }
            search.laws(|| search.symmetric_string_laws(w.v0, &w.letters, &ep, &em))?;
        }
        _ => {}
    }
    Ok(search.laws.into_inner())
}
