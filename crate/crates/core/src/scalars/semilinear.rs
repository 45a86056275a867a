use serde::{Deserialize, Serialize};

use super::aut::Aut;
use super::field::{Elt, FieldOps, FieldWithAut};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A σ-semilinear map between coordinate spaces, acting on row vectors by
/// `v ↦ σ(v)·M`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SemilinearMap {
    pub aut: Aut,
    pub matrix: Matrix,
}

impl SemilinearMap {
    pub fn new(aut: Aut, matrix: Matrix) -> Self {
        SemilinearMap { aut, matrix }
    }

    pub fn identity(f: &FieldWithAut, n: usize) -> Self {
        SemilinearMap { aut: Aut::identity(f.n()), matrix: Matrix::identity(n) }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.rows()
    }
    pub fn target_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn apply(&self, f: &FieldWithAut, v: &[Elt]) -> Result<Vec<Elt>> {
        if v.len() != self.matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a map with {} rows",
                v.len(),
                self.matrix.rows()
            )));
        }
        if self.aut.degree() != f.n() {
            return Err(Error::FieldMismatch);
        }
        Ok(self.matrix.vec_mul(f, &self.aut.apply_vec(f, v)))
    }

    /// `self ∘ other` (other first): `(σ, M) ∘ (τ, N) = (στ, σ(N)·M)`.
    pub fn after(&self, f: &FieldWithAut, other: &SemilinearMap) -> Result<SemilinearMap> {
        if other.matrix.cols() != self.matrix.rows() {
            return Err(Error::DimensionMismatch("composition of semilinear maps".into()));
        }
        let aut = self.aut.compose(&other.aut)?;
        let n = self.aut.apply_matrix(f, &other.matrix)?;
        Ok(SemilinearMap { aut, matrix: n.mul(f, &self.matrix) })
    }

    /// The matrix of the map over the prime field, in the coordinates of
    /// [`to_prime_coords`].
    pub fn prime_matrix(&self, f: &FieldWithAut) -> Matrix {
        expand_semilinear(f, self.aut, &self.matrix)
    }
}

/// Prime-field coordinates of a K-vector: the digits of each entry in turn.
pub fn to_prime_coords(f: &FieldWithAut, v: &[Elt]) -> Vec<Elt> {
    let mut out = Vec::with_capacity(v.len() * f.n() as usize);
    for &x in v {
        out.extend(f.digits(x));
    }
    out
}

pub fn from_prime_coords(f: &FieldWithAut, v: &[Elt]) -> Vec<Elt> {
    let n = f.n() as usize;
    assert_eq!(v.len() % n, 0);
    v.chunks(n).map(|c| f.from_digits(c)).collect()
}

/// Prime-field matrix of `v ↦ σ(v)·M`.
pub fn expand_semilinear(f: &FieldWithAut, aut: Aut, m: &Matrix) -> Matrix {
    let n = f.n() as usize;
    let (r, c) = (m.rows(), m.cols());
    let mut out = Matrix::zeros(r * n, c * n);
    let mut basis_elt: Vec<Elt> = Vec::with_capacity(n);
    let mut e = 1;
    for _ in 0..n {
        basis_elt.push(e);
        e = f.mul(e, f.t());
    }
    for k in 0..r {
        for (j, &b) in basis_elt.iter().enumerate() {
            let s = aut.on(f, b);
            let row = k * n + j;
            for col in 0..c {
                let y = f.mul(s, m.get(k, col));
                for (d, &digit) in f.digits(y).iter().enumerate() {
                    out.set(row, col * n + d, digit);
                }
            }
        }
    }
    out
}

/// Prime-field matrix of left multiplication by `λ` on `K^dim`.
pub fn scalar_action(f: &FieldWithAut, lambda: Elt, dim: usize) -> Matrix {
    expand_semilinear(f, Aut::identity(f.n()), &Matrix::scalar(dim, lambda))
}

/// Solve `L(X) = rhs` for an unknown `rows × cols` matrix over K, where `L` is
/// additive (linear over the prime field). Returns a particular solution, if
/// one exists, and a prime-field basis of the solutions of `L(X) = 0`.
pub fn solve_additive(
    f: &FieldWithAut,
    rows: usize,
    cols: usize,
    map: impl Fn(&Matrix) -> Matrix,
    rhs: Option<&Matrix>,
) -> (Option<Matrix>, Vec<Matrix>) {
    let n = f.n() as usize;
    let unknowns = rows * cols * n;
    let fp = f.prime_field();
    let mut images: Vec<Vec<Elt>> = Vec::with_capacity(unknowns);
    let mut width = 0;
    for k in 0..unknowns {
        let x = unit_matrix(f, rows, cols, k);
        let img = to_prime_coords(f, map(&x).data());
        width = img.len();
        images.push(img);
    }
    if unknowns == 0 {
        return (Some(Matrix::zeros(rows, cols)), vec![]);
    }
    let a = Matrix::from_rows_width(&images, width);
    let to_matrix = |v: &[Elt]| Matrix::from_flat(rows, cols, from_prime_coords(f, v));
    let kernel = a.left_kernel(fp).row_vecs().iter().map(|v| to_matrix(v)).collect();
    let particular = match rhs {
        None => Some(Matrix::zeros(rows, cols)),
        Some(r) => a.solve_left(fp, &to_prime_coords(f, r.data())).map(|v| to_matrix(&v)),
    };
    (particular, kernel)
}

fn unit_matrix(f: &FieldWithAut, rows: usize, cols: usize, k: usize) -> Matrix {
    let n = f.n() as usize;
    let mut m = Matrix::zeros(rows, cols);
    let pos = k / n;
    let mut d = vec![0; n];
    d[k % n] = 1;
    m.set(pos / cols, pos % cols, f.from_digits(&d));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_on_omega() {
        let f = FieldWithAut::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        let m = SemilinearMap::new(Aut::frobenius(2), Matrix::identity(1));
        assert_eq!(m.apply(&f, &[2]).unwrap(), vec![3]);
        let z = SemilinearMap::new(Aut::frobenius(2), Matrix::zeros(1, 1));
        assert_eq!(z.apply(&f, &[2]).unwrap(), vec![0]);
        assert!(m.apply(&f, &[1, 1]).is_err());
    }

    #[test]
    fn additive_solver_finds_commutant() {
        let f = FieldWithAut::new(2, 2, None).unwrap();
        let a = Matrix::from_rows(&[vec![0, 1], vec![0, 0]]).unwrap();
        let (_, k) = solve_additive(&f, 2, 2, |x| x.mul(&f, &a).sub(&f, &a.mul(&f, x)), None);
        assert_eq!(k.len(), 4);
        for x in &k {
            assert_eq!(x.mul(&f, &a), a.mul(&f, x));
        }
        let (p, _) = solve_additive(&f, 1, 1, |x| x.add(&f, &Aut::frobenius(2).on_matrix(&f, x)), Some(&Matrix::identity(1)));
        let p = p.unwrap();
        assert_eq!(f.add(p.get(0, 0), f.frob(1, p.get(0, 0))), 1);
    }

    #[test]
    fn prime_expansion_matches_action() {
        let f = FieldWithAut::new(3, 2, None).unwrap();
        let m = Matrix::from_rows(&[vec![1, 4, 7], vec![2, 0, 5]]).unwrap();
        let a = Aut::frobenius(2);
        let sm = SemilinearMap::new(a, m);
        let pm = sm.prime_matrix(&f);
        let fp = f.prime_field();
        for x in f.elements() {
            for y in [0, 1, 5, 8] {
                let v = vec![x, y];
                let direct = sm.apply(&f, &v).unwrap();
                let via = pm.vec_mul(fp, &to_prime_coords(&f, &v));
                assert_eq!(from_prime_coords(&f, &via), direct);
            }
        }
    }
}
