//! Ground truth independent of strings and bands: homomorphism spaces,
//! endomorphism algebras and their radicals, indecomposability, isomorphism
//! and brute-force decomposition of small representations.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::functor::{multiplicities, Multiplicities, SearchOptions};
use crate::presentation::Presentation;
use crate::scalars::field::{Elt, FieldOps, FieldWithAut, PrimeField};
use crate::scalars::matrix::Matrix;
use crate::scalars::semilinear::{expand_semilinear, solve_additive, SemilinearMap};
use crate::scalars::aut::Aut;
use crate::walkmod::Representation;

pub const DEFAULT_SEED: u64 = 0x5eed_c1a2;
/// Default bound on the prime-field dimension accepted by [`brute_decompose`].
pub const DEFAULT_LIMIT: usize = 12;
const SAMPLES: usize = 400;
const EXHAUSTIVE_ELEMENTS: u64 = 1 << 16;

/// The seed of the randomised steps: `CLANNISH_SEED` if set, else [`DEFAULT_SEED`].
pub fn seed() -> u64 {
    std::env::var("CLANNISH_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

/// A morphism of representations: one K-matrix per vertex, acting on rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub blocks: Vec<Matrix>,
}

impl Morphism {
    pub fn identity(dims: &[usize]) -> Morphism {
        Morphism { blocks: dims.iter().map(|&d| Matrix::identity(d)).collect() }
    }

    /// `self` followed by `other`.
    pub fn then(&self, f: &FieldWithAut, other: &Morphism) -> Morphism {
        Morphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(f, b)).collect() }
    }

    pub fn add(&self, f: &FieldWithAut, other: &Morphism) -> Morphism {
        Morphism { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(f, b)).collect() }
    }

    pub fn scale(&self, f: &FieldWithAut, c: Elt) -> Morphism {
        Morphism { blocks: self.blocks.iter().map(|a| a.scale(f, c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn is_invertible(&self, f: &FieldWithAut) -> bool {
        self.blocks.iter().all(|b| b.is_invertible(f))
    }

    /// Whether the blocks intertwine the arrow actions of `m` and `n`.
    pub fn is_morphism(&self, p: &Presentation, m: &Representation, n: &Representation) -> bool {
        let f = &m.field;
        p.arrows.iter().enumerate().all(|(a, arrow)| {
            let left = m.maps[a].matrix.mul(f, &self.blocks[arrow.to]);
            let right = arrow.sigma.on_matrix(f, &self.blocks[arrow.from]).mul(f, &n.maps[a].matrix);
            left == right
        })
    }

    /// Matrix over the prime field, block diagonal over the vertices.
    pub fn prime_matrix(&self, f: &FieldWithAut) -> Matrix {
        let id = Aut::identity(f.n());
        self.blocks.iter().fold(Matrix::zeros(0, 0), |acc, b| acc.block_diag(&expand_semilinear(f, id, b)))
    }
}

/// A prime-field basis of `Hom(M, N)`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source_dims: Vec<usize>,
    pub target_dims: Vec<usize>,
    pub basis: Vec<Morphism>,
}

impl HomSpace {
    /// Dimension over the prime field.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn same_presentation(m: &Representation, n: &Representation) -> Result<()> {
    if m.field != n.field || m.vertices != n.vertices || m.arrows != n.arrows {
        return Err(Error::PresentationMismatch);
    }
    Ok(())
}

/// Solve `M_a·θ_{h(a)} = σ_a(θ_{t(a)})·N_a` for all arrows `a`.
pub fn hom_space(p: &Presentation, m: &Representation, n: &Representation) -> Result<HomSpace> {
    same_presentation(m, n)?;
    m.check(p)?;
    n.check(p)?;
    let f = &m.field;
    let nv = m.dims.len();
    let mut offsets = Vec::with_capacity(nv);
    let mut total = 0;
    for v in 0..nv {
        offsets.push(total);
        total += m.dims[v] * n.dims[v];
    }
    let split = |x: &Matrix| -> Vec<Matrix> {
        (0..nv)
            .map(|v| {
                let (r, c) = (m.dims[v], n.dims[v]);
                Matrix::from_flat(r, c, x.data()[offsets[v]..offsets[v] + r * c].to_vec())
            })
            .collect()
    };
    let residual = |x: &Matrix| -> Matrix {
        let theta = split(x);
        let mut out = Vec::new();
        for (a, arrow) in p.arrows.iter().enumerate() {
            let left = m.maps[a].matrix.mul(f, &theta[arrow.to]);
            let right = arrow.sigma.on_matrix(f, &theta[arrow.from]).mul(f, &n.maps[a].matrix);
            out.extend_from_slice(left.sub(f, &right).data());
        }
        let len = out.len();
        Matrix::from_flat(1, len, out)
    };
    let (_, kernel) = solve_additive(f, 1, total, residual, None);
    let basis = kernel.iter().map(|x| Morphism { blocks: split(x) }).collect();
    Ok(HomSpace { source_dims: m.dims.clone(), target_dims: n.dims.clone(), basis })
}

/// `End(M)` as an algebra over the prime field, with elements written in the
/// coordinates of a fixed basis.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    pub field: FieldWithAut,
    pub dims: Vec<usize>,
    pub basis: Vec<Morphism>,
    /// Prime-field matrices of the basis elements.
    pub prime: Vec<Matrix>,
    flat: Matrix,
}

impl EndAlgebra {
    pub fn new(p: &Presentation, m: &Representation) -> Result<EndAlgebra> {
        let h = hom_space(p, m, m)?;
        let f = &m.field;
        let prime: Vec<Matrix> = h.basis.iter().map(|b| b.prime_matrix(f)).collect();
        let width = prime.first().map_or(0, |x| x.data().len());
        let flat = Matrix::from_rows_width(&prime.iter().map(|x| x.data().to_vec()).collect::<Vec<_>>(), width);
        Ok(EndAlgebra { field: f.clone(), dims: m.dims.clone(), basis: h.basis, prime, flat })
    }

    /// Dimension over the prime field.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn fp(&self) -> &PrimeField {
        self.field.prime_field()
    }

    pub fn prime_dim(&self) -> usize {
        self.dims.iter().sum::<usize>() * self.field.n() as usize
    }

    pub fn element(&self, c: &[Elt]) -> Morphism {
        let f = &self.field;
        let mut acc = Morphism { blocks: self.dims.iter().map(|&d| Matrix::zeros(d, d)).collect() };
        for (b, &x) in self.basis.iter().zip(c) {
            if x != 0 {
                acc = acc.add(f, &b.scale(f, f.from_int(x as i64)));
            }
        }
        acc
    }

    pub fn prime_element(&self, c: &[Elt]) -> Matrix {
        let fp = self.fp();
        let d = self.prime_dim();
        let mut acc = Matrix::zeros(d, d);
        for (b, &x) in self.prime.iter().zip(c) {
            if x != 0 {
                acc = acc.add(fp, &b.scale(fp, x));
            }
        }
        acc
    }

    /// Coordinates of a prime-field matrix lying in the algebra.
    pub fn coords(&self, x: &Matrix) -> Option<Vec<Elt>> {
        self.flat.solve_left(self.fp(), x.data())
    }

    pub fn identity_coords(&self) -> Vec<Elt> {
        self.coords(&Matrix::identity(self.prime_dim())).expect("the identity is an endomorphism")
    }

    fn product_coords(&self, a: &[Elt], b: &[Elt]) -> Vec<Elt> {
        let x = self.prime_element(a).mul(self.fp(), &self.prime_element(b));
        self.coords(&x).expect("End(M) is closed under composition")
    }

    fn unit(&self, k: usize) -> Vec<Elt> {
        let mut c = vec![0; self.dim()];
        c[k] = 1;
        c
    }

    /// A basis of the Jacobson radical, in coordinates. Iterated trace forms
    /// `g_i(a) = Tr(ã^{p^i})/p^i mod p` of integer lifts cut the algebra down
    /// to the radical after `⌊log_p D⌋ + 1` steps, `D` the matrix size.
    pub fn radical(&self) -> Vec<Vec<Elt>> {
        let fp = self.fp();
        let p = fp.p() as u64;
        let d = self.prime_dim() as u64;
        let r = self.dim();
        let mut current: Vec<Vec<Elt>> = (0..r).map(|k| self.unit(k)).collect();
        let mut i = 0u32;
        let mut pi = 1u64;
        while pi <= d.max(1) {
            if current.is_empty() {
                break;
            }
            let rows: Vec<Vec<Elt>> = current
                .iter()
                .map(|x| {
                    let xm = self.prime_element(x);
                    self.prime.iter().map(|y| trace_digit(&xm.mul(fp, y), p, i)).collect()
                })
                .collect();
            let g = Matrix::from_rows_width(&rows, r);
            let combos = g.left_kernel(fp);
            let basis = Matrix::from_rows_width(&current, r);
            current = combos.mul(fp, &basis).row_vecs();
            i += 1;
            pi *= p;
        }
        current
    }

    /// Structure of `End(M)/J`.
    pub fn semisimple_quotient(&self) -> Quotient {
        let fp = self.fp().clone();
        let r = self.dim();
        let j = self.radical();
        let (jr, pivots) = Matrix::from_rows_width(&j, r).rref(&fp);
        let jrows: Vec<Vec<Elt>> = jr.row_vecs().into_iter().take(pivots.len()).collect();
        let lift: Vec<Vec<Elt>> = (0..r).filter(|k| !pivots.contains(k)).map(|k| self.unit(k)).collect();
        let q = lift.len();
        let mut all = lift.clone();
        all.extend(jrows.iter().cloned());
        let change = Matrix::from_rows_width(&all, r).inverse(&fp).expect("complement of the radical");
        let reduce = |c: &[Elt]| -> Vec<Elt> { change.vec_mul(&fp, c)[..q].to_vec() };
        let mut commutative = true;
        'outer: for a in 0..q {
            for b in a + 1..q {
                let ab = self.product_coords(&lift[a], &lift[b]);
                let ba = self.product_coords(&lift[b], &lift[a]);
                let diff: Vec<Elt> = ab.iter().zip(&ba).map(|(&x, &y)| fp.sub(x, y)).collect();
                if reduce(&diff).iter().any(|&x| x != 0) {
                    commutative = false;
                    break 'outer;
                }
            }
        }
        let mut fixed = Vec::new();
        if commutative && q > 0 {
            let p = fp.p() as u64;
            let rows: Vec<Vec<Elt>> = lift
                .iter()
                .map(|x| {
                    let xm = self.prime_element(x);
                    let xp = xm.pow(&fp, p).sub(&fp, &xm);
                    reduce(&self.coords(&xp).expect("closed under powers"))
                })
                .collect();
            let frob = Matrix::from_rows_width(&rows, q);
            fixed = frob.left_kernel(&fp).row_vecs();
        }
        let radical_dim = jrows.len();
        Quotient { dim: q, radical_dim, commutative, lift, fixed, reduce_matrix: change }
    }

    /// Whether `End(M)` is local: `End(M)/J` is a field.
    pub fn is_local(&self) -> bool {
        let q = self.semisimple_quotient();
        q.dim > 0 && q.commutative && q.fixed.len() == 1
    }

    /// Whether some element `e ≠ 0, 1` with `e² = e` exists, by enumeration.
    pub fn has_nontrivial_idempotent(&self) -> bool {
        let fp = self.fp();
        let one = Matrix::identity(self.prime_dim());
        let mut found = false;
        for_each_vector(fp.p(), self.dim(), |c| {
            let e = self.prime_element(c);
            if !e.is_zero() && e != one && e.mul(fp, &e) == e {
                found = true;
            }
            !found
        });
        found
    }
}

/// `End(M)/J` in coordinates: `lift` spans a complement of `J`; `fixed` is a
/// basis of the fixed points of `x ↦ x^p` in the commutative case, written in
/// the coordinates of `lift`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub dim: usize,
    pub radical_dim: usize,
    pub commutative: bool,
    pub lift: Vec<Vec<Elt>>,
    pub fixed: Vec<Vec<Elt>>,
    reduce_matrix: Matrix,
}

impl Quotient {
    fn reduce(&self, fp: &PrimeField, c: &[Elt]) -> Vec<Elt> {
        self.reduce_matrix.vec_mul(fp, c)[..self.dim].to_vec()
    }
}

/// Visit every vector of `F_p^len` until `visit` returns false.
fn for_each_vector(p: u32, len: usize, mut visit: impl FnMut(&[Elt]) -> bool) {
    let mut c = vec![0; len];
    loop {
        if !visit(&c) {
            return;
        }
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            c[k] += 1;
            if c[k] < p {
                break;
            }
            c[k] = 0;
            k += 1;
        }
    }
}

/// `Tr(ã^{p^i}) / p^i mod p` for the lift `ã` of `a` with entries in `0..p`.
fn trace_digit(a: &Matrix, p: u64, i: u32) -> Elt {
    let modulus = p.pow(i + 1);
    let n = a.rows();
    let lift: Vec<u64> = a.data().iter().map(|&x| x as u64).collect();
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n * n];
        for r in 0..n {
            for k in 0..n {
                let xv = x[r * n + k];
                if xv == 0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] = (out[r * n + c] + xv * y[k * n + c]) % modulus;
                }
            }
        }
        out
    };
    let mut acc: Vec<u64> = (0..n * n).map(|k| u64::from(k / n == k % n)).collect();
    let mut base = lift;
    let mut e = p.pow(i);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    let tr = (0..n).map(|k| acc[k * n + k]).sum::<u64>() % modulus;
    ((tr / p.pow(i)) % p) as Elt
}

/// How [`is_indecomposable_by`] decides locality of `End(M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Radical, then the structure of the semisimple quotient.
    Radical,
    /// Search all elements for a non-trivial idempotent.
    Exhaustive,
    /// Exhaustive when `End(M)` has at most `p^10` elements over a field with at most 4 elements, radical otherwise.
    Auto,
}

pub fn is_indecomposable(p: &Presentation, m: &Representation) -> Result<bool> {
    is_indecomposable_by(p, m, Route::Auto)
}

pub fn is_indecomposable_by(p: &Presentation, m: &Representation, route: Route) -> Result<bool> {
    if m.total_dim() == 0 {
        return Ok(false);
    }
    let alg = EndAlgebra::new(p, m)?;
    let route = match route {
        Route::Auto if alg.dim() <= 10 && m.field.q() <= 4 => Route::Exhaustive,
        Route::Auto => Route::Radical,
        r => r,
    };
    Ok(match route {
        Route::Exhaustive => !alg.has_nontrivial_idempotent(),
        _ => alg.is_local(),
    })
}

/// Fitting decomposition `M = Im θ^d ⊕ Ker θ^d`, as K-bases per vertex, if non-trivial.
pub fn fitting_split(f: &FieldWithAut, theta: &Morphism) -> Option<(Vec<Matrix>, Vec<Matrix>)> {
    let mut image = Vec::new();
    let mut kernel = Vec::new();
    let (mut im_dim, mut total) = (0, 0);
    for b in &theta.blocks {
        let d = b.rows();
        let power = b.pow(f, d as u64);
        let (r, pivots) = power.rref(f);
        let im = r.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
        let ker = power.left_kernel(f);
        im_dim += im.rows();
        total += d;
        image.push(if im.rows() == 0 { Matrix::zeros(0, d) } else { im });
        kernel.push(if ker.rows() == 0 { Matrix::zeros(0, d) } else { ker });
    }
    (im_dim > 0 && im_dim < total).then_some((image, kernel))
}

/// The subrepresentation spanned by the rows of `bases`, in those bases.
pub fn restrict(p: &Presentation, m: &Representation, bases: &[Matrix]) -> Result<Representation> {
    let f = &m.field;
    let dims: Vec<usize> = bases.iter().map(|b| b.rows()).collect();
    let mut maps = Vec::with_capacity(p.arrows.len());
    for (a, arrow) in p.arrows.iter().enumerate() {
        let map = &m.maps[a];
        let images = map.aut.on_matrix(f, &bases[arrow.from]).mul(f, &map.matrix);
        let target = &bases[arrow.to];
        let mut rows = Vec::with_capacity(images.rows());
        for row in images.row_vecs() {
            let x = target.solve_left(f, &row).ok_or_else(|| Error::PreconditionViolated("not a subrepresentation".into()))?;
            rows.push(x);
        }
        maps.push(SemilinearMap::new(map.aut, Matrix::from_rows_width(&rows, dims[arrow.to])));
    }
    Ok(Representation {
        field: f.clone(),
        vertices: m.vertices.clone(),
        arrows: m.arrows.clone(),
        dims,
        maps,
        labels: None,
    })
}

fn split_by(p: &Presentation, m: &Representation, theta: &Morphism) -> Result<Option<(Representation, Representation)>> {
    match fitting_split(&m.field, theta) {
        None => Ok(None),
        Some((im, ker)) => Ok(Some((restrict(p, m, &im)?, restrict(p, m, &ker)?))),
    }
}

fn shifted(alg: &EndAlgebra, c: &[Elt], lambda: Elt) -> Morphism {
    let f = &alg.field;
    let x = alg.element(c);
    let id = Morphism::identity(&alg.dims).scale(f, f.from_int(lambda as i64));
    x.add(f, &id.scale(f, f.from_int(-1)))
}

/// A non-trivial splitting `M ≅ U ⊕ W`, or `None` if `M` is indecomposable.
pub fn find_split(p: &Presentation, m: &Representation, rng: &mut ChaCha8Rng) -> Result<Option<(Representation, Representation)>> {
    if m.total_dim() == 0 {
        return Ok(None);
    }
    let alg = EndAlgebra::new(p, m)?;
    let fp = alg.fp().clone();
    let q = alg.semisimple_quotient();
    if q.commutative && q.fixed.len() == 1 {
        return Ok(None);
    }
    let r = alg.dim();
    if q.commutative {
        // A Frobenius-fixed element outside F_p·1 takes different prime-field
        // values on two factors of End(M)/J.
        let one = q.reduce(&fp, &alg.identity_coords());
        for z in &q.fixed {
            let independent = Matrix::from_rows_width(&[one.clone(), z.clone()], q.dim).rank(&fp) == 2;
            if !independent {
                continue;
            }
            let mut lifted = vec![0; r];
            for (k, &c) in z.iter().enumerate() {
                for (t, &y) in q.lift[k].iter().enumerate() {
                    lifted[t] = fp.add(lifted[t], fp.mul(c, y));
                }
            }
            for lambda in 0..fp.p() {
                if let Some(s) = split_by(p, m, &shifted(&alg, &lifted, lambda))? {
                    return Ok(Some(s));
                }
            }
        }
    }
    for _ in 0..SAMPLES {
        let c: Vec<Elt> = (0..r).map(|_| rng.gen_range(0..fp.p())).collect();
        for lambda in 0..fp.p() {
            if let Some(s) = split_by(p, m, &shifted(&alg, &c, lambda))? {
                return Ok(Some(s));
            }
        }
    }
    if (fp.p() as u64).checked_pow(r as u32).map_or(true, |n| n > EXHAUSTIVE_ELEMENTS) {
        return Err(Error::TooLarge { dim: r, limit: 16 });
    }
    let mut result = None;
    let mut failure = None;
    for_each_vector(fp.p(), r, |c| match split_by(p, m, &alg.element(c)) {
        Ok(Some(s)) => {
            result = Some(s);
            false
        }
        Ok(None) => true,
        Err(e) => {
            failure = Some(e);
            false
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if result.is_none() {
        return Err(Error::PreconditionViolated("no idempotent found in a non-local endomorphism algebra".into()));
    }
    Ok(result)
}

/// Indecomposable summands of `M` (prime-field dimension at most `limit`).
pub fn brute_decompose(p: &Presentation, m: &Representation, limit: usize) -> Result<Vec<Representation>> {
    brute_decompose_seeded(p, m, limit, seed())
}

pub fn brute_decompose_seeded(p: &Presentation, m: &Representation, limit: usize, seed: u64) -> Result<Vec<Representation>> {
    m.check(p)?;
    let prime_dim = m.total_dim() * m.field.n() as usize;
    if prime_dim > limit {
        return Err(Error::TooLarge { dim: prime_dim, limit });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pending = vec![m.clone()];
    let mut out = Vec::new();
    while let Some(x) = pending.pop() {
        if x.total_dim() == 0 {
            continue;
        }
        match find_split(p, &x, &mut rng)? {
            Some((u, w)) => {
                pending.push(w);
                pending.push(u);
            }
            None => out.push(x),
        }
    }
    Ok(out)
}

/// For indecomposable `M`, `N`: some `g∘f` with `f: M → N`, `g: N → M` is invertible.
pub fn indecomposables_isomorphic(p: &Presentation, m: &Representation, n: &Representation) -> Result<bool> {
    if m.dims != n.dims {
        return Ok(false);
    }
    let f = &m.field;
    let there = hom_space(p, m, n)?;
    let back = hom_space(p, n, m)?;
    for a in &there.basis {
        for b in &back.basis {
            if a.then(f, b).is_invertible(f) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Isomorphism by decomposing both sides and matching the summands.
pub fn are_isomorphic(p: &Presentation, m: &Representation, n: &Representation) -> Result<bool> {
    same_presentation(m, n)?;
    if m.dims != n.dims {
        return Ok(false);
    }
    let limit = m.total_dim() * m.field.n() as usize;
    let left = brute_decompose(p, m, limit)?;
    let mut right = brute_decompose(p, n, limit)?;
    if left.len() != right.len() {
        return Ok(false);
    }
    for x in &left {
        let mut hit = None;
        for (k, y) in right.iter().enumerate() {
            if indecomposables_isomorphic(p, x, y)? {
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => {
                right.swap_remove(k);
            }
            None => return Ok(false),
        }
    }
    Ok(true)
}

/// A random representation of a one-vertex presentation with loops `x`, `y`
/// and relations `xy = yx = x³ = y³ = 0`, of dimension `dim`.
pub fn random_gp2(p: &Presentation, dim: usize, rng: &mut ChaCha8Rng) -> Result<Representation> {
    if p.vertices.len() != 1 || p.arrows.len() != 2 {
        return Err(Error::PresentationMismatch);
    }
    let f = &p.field;
    let x = random_nilpotent(f, dim, rng);
    let (_, space) = solve_additive(
        f,
        dim,
        dim,
        |y| {
            let a = x.mul(f, y);
            let b = y.mul(f, &x);
            a.hstack(&b)
        },
        None,
    );
    let mut rep = Representation::with_dims(p, vec![dim]);
    rep.maps[0].matrix = x.clone();
    for _ in 0..64 {
        let mut y = Matrix::zeros(dim, dim);
        for b in &space {
            let c: Elt = rng.gen_range(0..f.p());
            y = y.add(f, &b.scale(f, f.from_int(c as i64)));
        }
        rep.maps[1].matrix = y;
        if rep.check(p).is_ok() {
            if rng.gen_bool(0.5) {
                rep.maps.swap(0, 1);
            }
            return Ok(rep);
        }
    }
    rep.maps[1].matrix = Matrix::zeros(dim, dim);
    rep.check(p)?;
    Ok(rep)
}

/// `P·J·P⁻¹` for a random invertible `P` and nilpotent Jordan blocks of size at most 3.
fn random_nilpotent(f: &FieldWithAut, dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut j = Matrix::zeros(dim, dim);
    let mut at = 0;
    while at < dim {
        let size = rng.gen_range(1..=3).min(dim - at);
        for k in 1..size {
            j.set(at + k - 1, at + k, f.one());
        }
        at += size;
    }
    loop {
        let q = f.q();
        let data: Vec<Elt> = (0..dim * dim).map(|_| rng.gen_range(0..q)).collect();
        let pm = Matrix::from_flat(dim, dim, data);
        if let Ok(inv) = pm.inverse(f) {
            return pm.mul(f, &j).mul(f, &inv);
        }
    }
}

/// A summand of [`oracle_check`] together with the descriptor it carries.
#[derive(Clone, Debug)]
pub struct Summand {
    pub dims: Vec<usize>,
    pub word: Option<String>,
    pub f_dim: usize,
    pub jw: usize,
}

/// Brute-force decomposition against the functorial multiplicities.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub seed: u64,
    pub summands: Vec<Summand>,
    pub multiplicities: Multiplicities,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn agree(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn to_json(&self, p: &Presentation) -> Value {
        let summands: Vec<Value> = self
            .summands
            .iter()
            .map(|s| json!({"dims": s.dims, "word": s.word, "f_dim": s.f_dim, "Jw": s.jw}))
            .collect();
        json!({
            "seed": self.seed,
            "summands": summands,
            "multiplicities": self.multiplicities.to_json(p),
            "agree": self.agree(),
            "mismatches": self.mismatches,
        })
    }
}

/// Each brute-force summand must carry exactly one descriptor `w`, with
/// `dim = |J_w|·f_dim`, and the `f_dim` summed per descriptor must match the
/// multiplicities of `M`.
pub fn oracle_check(p: &Presentation, m: &Representation, opts: &SearchOptions, limit: usize) -> Result<OracleReport> {
    let seed = seed();
    let parts = brute_decompose_seeded(p, m, limit, seed)?;
    let whole = multiplicities(p, m, opts)?;
    let mut mismatches = Vec::new();
    if !whole.complete {
        mismatches.push(format!("checksum {} differs from dimension {}", whole.checksum, whole.dim));
    }
    let mut summands = Vec::with_capacity(parts.len());
    let mut totals: BTreeMap<String, usize> = BTreeMap::new();
    for part in &parts {
        let mult = multiplicities(p, part, opts)?;
        let summand = match mult.entries.as_slice() {
            [e] => {
                let word = e.descriptor.display(p);
                let jw = e.descriptor.jw_len();
                if jw * e.f_dim != part.total_dim() {
                    mismatches.push(format!("summand {word} has dimension {} but |J_w|·f = {}", part.total_dim(), jw * e.f_dim));
                }
                *totals.entry(word.clone()).or_default() += e.f_dim;
                Summand { dims: part.dims.clone(), word: Some(word), f_dim: e.f_dim, jw }
            }
            entries => {
                mismatches.push(format!("summand of dims {:?} carries {} descriptors", part.dims, entries.len()));
                Summand { dims: part.dims.clone(), word: None, f_dim: 0, jw: 0 }
            }
        };
        summands.push(summand);
    }
    let expected: BTreeMap<String, usize> =
        whole.entries.iter().map(|e| (e.descriptor.display(p), e.f_dim)).collect();
    if expected != totals {
        mismatches.push(format!("multiplicities {expected:?} but summands give {totals:?}"));
    }
    Ok(OracleReport { seed, summands, multiplicities: whole, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::bundled;
    use crate::walkmod::{build_module, parameter_library, Parameter};
    use crate::wordcore::{enumerate_bands, enumerate_strings, Descriptor};

    fn module(p: &Presentation, w: &str) -> Representation {
        let d = Descriptor::parse(p, w).unwrap();
        let v = parameter_library(p, &d, 1).unwrap().remove(0);
        build_module(p, &d, &v).unwrap()
    }

    /// Radical by definition: `x ∈ J` iff `x·y` is nilpotent for all `y`.
    fn brute_radical_dim(alg: &EndAlgebra) -> usize {
        let fp = alg.fp().clone();
        let d = alg.prime_dim();
        let mut elements = Vec::new();
        for_each_vector(fp.p(), alg.dim(), |c| {
            elements.push(alg.prime_element(c));
            true
        });
        let count = elements
            .iter()
            .filter(|x| elements.iter().all(|y| x.mul(&fp, y).pow(&fp, d as u64).is_zero()))
            .count();
        let mut dim = 0;
        while (fp.p() as usize).pow(dim) < count {
            dim += 1;
        }
        dim as usize
    }

    #[test]
    fn homs_and_identity() {
        let p = bundled("e1").unwrap();
        let m = module(&p, "s* a s*");
        let h = hom_space(&p, &m, &m).unwrap();
        let alg = EndAlgebra::new(&p, &m).unwrap();
        assert!(alg.coords(&Matrix::identity(alg.prime_dim())).is_some());
        assert!(h.basis.iter().all(|b| b.is_morphism(&p, &m, &m)));
        assert_eq!((m.total_dim(), h.dim()), (4, 6));
        let q = alg.semisimple_quotient();
        assert_eq!((q.dim, q.radical_dim, q.fixed.len()), (2, 4, 1));
        assert!(is_indecomposable(&p, &m).unwrap());
        assert!(is_indecomposable_by(&p, &m, Route::Radical).unwrap());
        let z = Representation::zero(&p);
        assert_eq!(hom_space(&p, &m, &z).unwrap().dim(), 0);
    }

    #[test]
    fn sums_split() {
        let p = bundled("e1").unwrap();
        let m = module(&p, "s*");
        let n = module(&p, "s* a s*");
        let mn = m.direct_sum(&n).unwrap();
        let nm = n.direct_sum(&m).unwrap();
        let mm = m.direct_sum(&m).unwrap();
        for route in [Route::Radical, Route::Exhaustive] {
            assert!(is_indecomposable_by(&p, &m, route).unwrap());
            assert!(!is_indecomposable_by(&p, &mm, route).unwrap());
            assert!(!is_indecomposable_by(&p, &mn, route).unwrap());
        }
        assert!(are_isomorphic(&p, &mn, &nm).unwrap());
        assert!(!are_isomorphic(&p, &mn, &mm).unwrap());
        let parts = brute_decompose(&p, &mn, DEFAULT_LIMIT).unwrap();
        let mut dims: Vec<usize> = parts.iter().map(|x| x.total_dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![m.total_dim(), n.total_dim()]);
        assert_eq!(brute_decompose(&p, &n, DEFAULT_LIMIT).unwrap().len(), 1);
        assert!(matches!(brute_decompose(&p, &mn, 2), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn radical_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = bundled("gp2").unwrap();
        for dim in 1..=4 {
            for _ in 0..6 {
                let m = random_gp2(&p, dim, &mut rng).unwrap();
                let alg = EndAlgebra::new(&p, &m).unwrap();
                if alg.dim() > 7 {
                    continue;
                }
                assert_eq!(alg.radical().len(), brute_radical_dim(&alg));
                assert_eq!(alg.is_local(), !alg.has_nontrivial_idempotent());
            }
        }
        let e1 = bundled("e1").unwrap();
        let m = module(&e1, "s*").direct_sum(&module(&e1, "s*")).unwrap();
        let alg = EndAlgebra::new(&e1, &m).unwrap();
        assert_eq!(alg.radical().len(), brute_radical_dim(&alg));
    }

    #[test]
    fn library_modules_are_indecomposable() {
        for name in ["e1", "gp2", "a4"] {
            let p = bundled(name).unwrap();
            let mut ds = enumerate_strings(&p, 3);
            ds.extend(enumerate_bands(&p, 2));
            let mut built = Vec::new();
            for d in &ds {
                for v in parameter_library(&p, d, 2).unwrap() {
                    let m = build_module(&p, d, &v).unwrap();
                    if m.total_dim() * m.field.n() as usize <= 8 {
                        assert!(is_indecomposable_by(&p, &m, Route::Radical).unwrap(), "{}", d.display(&p));
                        assert!(is_indecomposable_by(&p, &m, Route::Exhaustive).unwrap() || EndAlgebra::new(&p, &m).unwrap().dim() > 12);
                        built.push((d.clone(), m));
                    }
                }
            }
            for (i, (d, m)) in built.iter().enumerate() {
                for (z, n) in &built[i + 1..] {
                    if !d.is_equivalent(&p, z) && m.dims == n.dims {
                        assert!(!indecomposables_isomorphic(&p, m, n).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn gp2_agrees_with_multiplicities() {
        let p = bundled("gp2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_gp2(&p, 4, &mut rng).unwrap();
            let r = oracle_check(&p, &m, &SearchOptions::default(), DEFAULT_LIMIT).unwrap();
            assert!(r.agree(), "{}", r.to_json(&p));
        }
        let free = build_module(&p, &Descriptor::parse(&p, "x").unwrap(), &Parameter::Free { dim: 2 }).unwrap();
        assert_eq!(brute_decompose(&p, &free, DEFAULT_LIMIT).unwrap().len(), 2);
    }
}
