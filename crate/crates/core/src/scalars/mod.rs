//! Finite fields with their Frobenius automorphisms, dense matrices, semilinear
//! maps and prime-field subspaces.

pub mod aut;
pub mod field;
pub mod matrix;
pub mod semilinear;
pub mod subspace;

pub use aut::{Aut, AutGroup, SymAut};
pub use field::{Elt, FieldOps, FieldWithAut, PrimeField};
pub use matrix::Matrix;
pub use semilinear::{expand_semilinear, from_prime_coords, scalar_action, solve_additive, to_prime_coords, SemilinearMap};
pub use subspace::Subspace;

use crate::error::Result;

/// Build GF(p^n); see [`FieldWithAut::new`].
pub fn make_field(p: u32, n: u32, modulus: Option<Vec<u32>>) -> Result<FieldWithAut> {
    FieldWithAut::new(p, n, modulus)
}

/// A field as it appears in input files.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<FieldWithAut> {
        FieldWithAut::new(self.p, self.n, self.modulus.clone())
    }

    pub fn of(f: &FieldWithAut) -> Self {
        FieldSpec { p: f.p(), n: f.n(), modulus: Some(f.modulus().to_vec()) }
    }
}
