use super::field::{Elt, PrimeField};
use super::matrix::Matrix;

/// A subspace of `F_p^ambient`, kept as a reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    pub fn from_matrix(f: &PrimeField, rows: &Matrix) -> Self {
        let (r, _) = rows.rref(f);
        Subspace { ambient: rows.cols(), basis: r }
    }

    pub fn from_rows(f: &PrimeField, ambient: usize, rows: &[Vec<Elt>]) -> Self {
        Subspace::from_matrix(f, &Matrix::from_rows_width(rows, ambient))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn contains(&self, f: &PrimeField, v: &[Elt]) -> bool {
        if v.iter().all(|&x| x == 0) {
            return true;
        }
        let m = self.basis.vstack(&Matrix::from_flat(1, self.ambient, v.to_vec()));
        m.rank(f) == self.dim()
    }

    pub fn contains_space(&self, f: &PrimeField, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        if other.dim() == 0 {
            return true;
        }
        self.basis.vstack(&other.basis).rank(f) == self.dim()
    }

    pub fn sum(&self, f: &PrimeField, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        Subspace::from_matrix(f, &self.basis.vstack(&other.basis))
    }

    pub fn intersect(&self, f: &PrimeField, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient);
        }
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        let a = self.dim();
        let neg_other = other.basis.map(|x| f_neg(f, x));
        let stacked = self.basis.vstack(&neg_other);
        let k = stacked.left_kernel(f);
        let coeffs = k.block(0, 0, k.rows(), a);
        Subspace::from_matrix(f, &coeffs.mul(f, &self.basis))
    }

    /// Image under `v ↦ v·map`.
    pub fn image(&self, f: &PrimeField, map: &Matrix) -> Subspace {
        assert_eq!(map.rows(), self.ambient);
        Subspace::from_matrix(f, &self.basis.mul(f, map))
    }

    /// `{v : v·map ∈ target}`.
    pub fn preimage(f: &PrimeField, map: &Matrix, target: &Subspace) -> Subspace {
        assert_eq!(map.cols(), target.ambient);
        if target.is_full() {
            return Subspace::full(map.rows());
        }
        let ann = target.annihilator(f);
        let composed = map.mul(f, &ann);
        Subspace::from_matrix(f, &composed.left_kernel(f))
    }

    /// Matrix whose columns span `{x : B x = 0}` for the basis `B`; a vector lies
    /// in the subspace iff it is killed by this matrix.
    pub fn annihilator(&self, f: &PrimeField) -> Matrix {
        if self.is_zero() {
            return Matrix::identity(self.ambient);
        }
        self.basis.right_kernel(f).transpose()
    }

    /// Coordinates `[from, from+len)` of every vector.
    pub fn project(&self, f: &PrimeField, from: usize, len: usize) -> Subspace {
        let b = self.basis.block(0, from, self.dim(), len);
        Subspace::from_matrix(f, &b)
    }

    /// Place the subspace into a larger ambient space at offset `at`.
    pub fn embed(&self, ambient: usize, at: usize) -> Subspace {
        let mut b = Matrix::zeros(self.dim(), ambient);
        b.set_block(0, at, &self.basis);
        Subspace { ambient, basis: b }
    }

    /// Extend a basis of `self` to one of `other ⊇ self`; returns the extra rows.
    pub fn complement_in(&self, f: &PrimeField, other: &Subspace) -> Matrix {
        let mut cur = self.basis.clone();
        let mut extra: Vec<Vec<Elt>> = Vec::new();
        let mut rank = cur.rank(f);
        for i in 0..other.dim() {
            let r = other.basis.row(i).to_vec();
            let cand = cur.vstack(&Matrix::from_flat(1, self.ambient, r.clone()));
            let nr = cand.rank(f);
            if nr > rank {
                rank = nr;
                cur = cand;
                extra.push(r);
            }
        }
        Matrix::from_rows_width(&extra, self.ambient)
    }
}

fn f_neg(f: &PrimeField, x: Elt) -> Elt {
    use super::field::FieldOps;
    f.neg(x)
}
