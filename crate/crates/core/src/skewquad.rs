//! Monic quadratics `q(x) = x² − βx + γ` in a skew polynomial ring `K[x;σ]`
//! over a finite field, and the quotient `S = K[x;σ]/⟨q⟩`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{solve_additive, Aut, AutGroup, Elt, FieldOps, FieldWithAut, Matrix};

/// Fields up to this size have "for all λ" conditions checked exhaustively.
const EXHAUSTIVE_LIMIT: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewQuadratic {
    pub field: FieldWithAut,
    pub sigma: Aut,
    pub beta: Elt,
    pub gamma: Elt,
}

/// The four mutually exclusive shapes of `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadCase {
    /// `q` has no linear factor; `S` is a division ring.
    Irreducible,
    /// `q = (x−η)(x−μ)` with η not σ-commuting; `S ≅ M₂(D)`.
    MatrixRing,
    /// Distinct σ-commuting roots; `S ≅ K × K`.
    Split,
    /// `q = (x−η)²` with η σ-commuting; `S` not semisimple.
    NonSemisimple,
}

impl QuadCase {
    pub fn number(&self) -> u8 {
        match self {
            QuadCase::Irreducible => 1,
            QuadCase::MatrixRing => 2,
            QuadCase::Split => 3,
            QuadCase::NonSemisimple => 4,
        }
    }

    pub fn is_semisimple(&self) -> bool {
        !matches!(self, QuadCase::NonSemisimple)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticReport {
    pub is_normal: bool,
    pub is_central: bool,
    pub is_nonsingular: bool,
    pub case: QuadCase,
    /// `(η, μ)` with `q = (x−η)(x−μ)`.
    pub factorization: Option<(Elt, Elt)>,
    /// Matrices `Λ` of the simple `S`-modules, acting by `v ↦ σ(v)Λ`.
    pub simple_modules: Vec<Matrix>,
}

impl QuadraticReport {
    pub fn is_semisimple(&self) -> bool {
        self.case.is_semisimple()
    }

    /// Normal, non-singular and semisimple.
    pub fn is_admissible(&self) -> bool {
        self.is_normal && self.is_nonsingular && self.is_semisimple()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "is_normal": self.is_normal,
            "is_central": self.is_central,
            "is_nonsingular": self.is_nonsingular,
            "is_semisimple": self.is_semisimple(),
            "case": self.case.number(),
            "case_name": format!("{:?}", self.case),
            "factorization": self.factorization.map(|(e, m)| serde_json::json!({"eta": e, "mu": m})),
            "simple_modules": self.simple_modules.iter().map(|m| m.row_vecs()).collect::<Vec<_>>(),
        })
    }
}

impl SkewQuadratic {
    pub fn new(field: &FieldWithAut, sigma: Aut, beta: Elt, gamma: Elt) -> Result<Self> {
        if sigma.degree() != field.n() {
            return Err(Error::FieldMismatch);
        }
        field.check(beta as u64)?;
        field.check(gamma as u64)?;
        Ok(SkewQuadratic { field: field.clone(), sigma, beta, gamma })
    }

    /// Test values for "for all λ ∈ K": every element on small fields, otherwise
    /// a multiplicative generator (the conditions are additive and multiplicative).
    fn witnesses(&self) -> Vec<Elt> {
        let f = &self.field;
        if f.q() <= EXHAUSTIVE_LIMIT {
            f.elements().collect()
        } else {
            vec![f.primitive(), f.t()]
        }
    }

    /// `σ(λ)η = ηλ` for all λ.
    pub fn sigma_commutes(&self, eta: Elt) -> bool {
        let f = &self.field;
        self.witnesses()
            .into_iter()
            .all(|l| f.mul(self.sigma.on(f, l), eta) == f.mul(eta, l))
    }

    pub fn is_normal(&self) -> bool {
        let f = &self.field;
        let s = self.sigma;
        let s2 = s.pow(2);
        s.on(f, self.beta) == self.beta
            && s.on(f, self.gamma) == self.gamma
            && self.witnesses().into_iter().all(|l| {
                f.mul(s.on(f, l), self.beta) == f.mul(self.beta, l)
                    && f.mul(s2.on(f, l), self.gamma) == f.mul(self.gamma, l)
            })
    }

    pub fn is_central(&self) -> bool {
        self.is_normal() && self.sigma.pow(2).is_identity()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.gamma != 0
    }

    /// All `(η, μ)` with `q = (x−η)(x−μ)`, ordered by η.
    pub fn factorizations(&self) -> Vec<(Elt, Elt)> {
        let f = &self.field;
        let sinv = self.sigma.inv();
        f.elements()
            .filter_map(|eta| {
                let mu = sinv.on(f, f.sub(self.beta, eta));
                (f.mul(eta, mu) == self.gamma).then_some((eta, mu))
            })
            .collect()
    }

    /// `σ(Λ)Λ − βΛ + γI`.
    pub fn evaluate_matrix(&self, lambda: &Matrix) -> Matrix {
        let f = &self.field;
        let n = lambda.rows();
        self.sigma
            .on_matrix(f, lambda)
            .mul(f, lambda)
            .sub(f, &lambda.scale(f, self.beta))
            .add(f, &Matrix::scalar(n, self.gamma))
    }

    /// Whether `Λ` defines an `S`-module structure on `K^n`.
    pub fn is_root(&self, lambda: &Matrix) -> bool {
        lambda.is_square() && self.evaluate_matrix(lambda).is_zero()
    }

    /// Product in `S` of `a0 + a1·x` and `b0 + b1·x`, using `xλ = σ(λ)x` and
    /// `x² = βx − γ`.
    pub fn quotient_mul(&self, a: (Elt, Elt), b: (Elt, Elt)) -> (Elt, Elt) {
        let f = &self.field;
        let s = |x| self.sigma.on(f, x);
        let x2 = f.mul(a.1, s(b.1));
        let c0 = f.sub(f.mul(a.0, b.0), f.mul(x2, self.gamma));
        let c1 = f.add(f.add(f.mul(a.0, b.1), f.mul(a.1, s(b.0))), f.mul(x2, self.beta));
        (c0, c1)
    }
}

pub fn classify_quadratic(q: &SkewQuadratic) -> QuadraticReport {
    let f = &q.field;
    let is_normal = q.is_normal();
    let facts = q.factorizations();
    let (case, factorization) = if facts.is_empty() {
        (QuadCase::Irreducible, None)
    } else if let Some(&fm) = facts.iter().find(|(eta, _)| !q.sigma_commutes(*eta)) {
        (QuadCase::MatrixRing, Some(fm))
    } else if let Some(&fm) = facts.iter().find(|(eta, mu)| eta != mu) {
        (QuadCase::Split, Some(fm))
    } else {
        (QuadCase::NonSemisimple, Some(facts[0]))
    };
    let simple_modules = match (case, factorization) {
        (QuadCase::Irreducible, _) => {
            vec![Matrix::from_rows(&[vec![0, 1], vec![f.neg(q.gamma), q.beta]]).expect("2x2")]
        }
        (QuadCase::MatrixRing, Some((eta, _))) => vec![Matrix::scalar(1, eta)],
        (QuadCase::Split, Some((eta, mu))) => {
            vec![Matrix::scalar(1, q.sigma.pow(2).on(f, mu)), Matrix::scalar(1, eta)]
        }
        _ => vec![],
    };
    QuadraticReport {
        is_normal,
        is_central: is_normal && q.sigma.pow(2).is_identity(),
        is_nonsingular: q.is_nonsingular(),
        case,
        factorization,
        simple_modules,
    }
}

/// Coefficients `(c0, c1)` with `(c0 + c1·x)·x = 1` in `S`, a two-sided
/// inverse of `x` when `q` is normal.
pub fn quotient_inverse(q: &SkewQuadratic) -> Result<(Elt, Elt)> {
    if !q.is_nonsingular() {
        return Err(Error::SingularQuadratic);
    }
    let f = &q.field;
    let gi = f.inv(q.gamma);
    let c = (f.mul(gi, q.beta), f.neg(gi));
    debug_assert_eq!(q.quotient_mul(c, (0, 1)), (1, 0));
    Ok(c)
}

/// `x² − φ(β)x + φ(γ)` in `K[x; φσφ⁻¹]`.
pub fn twist_quadratic(phi: Aut, q: &SkewQuadratic) -> SkewQuadratic {
    let f = &q.field;
    SkewQuadratic {
        field: f.clone(),
        sigma: phi.then_after(&q.sigma).then_after(&phi.inv()),
        beta: phi.on(f, q.beta),
        gamma: phi.on(f, q.gamma),
    }
}

/// `y² − γ⁻¹βy + γ⁻¹` in `K[y; σ⁻¹]`.
pub fn inverse_quadratic(q: &SkewQuadratic) -> Result<SkewQuadratic> {
    if !q.is_nonsingular() {
        return Err(Error::SingularQuadratic);
    }
    let f = &q.field;
    let gi = f.inv(q.gamma);
    Ok(SkewQuadratic { field: f.clone(), sigma: q.sigma.inv(), beta: f.mul(gi, q.beta), gamma: gi })
}

/// Solve `ΛΞ + σ(Ξ)(σ(Λ) − βI) = I` for a root `Λ` of an admissible `q`.
pub fn solve_unit_equation(lambda: &Matrix, q: &SkewQuadratic) -> Result<Matrix> {
    if !q.is_root(lambda) {
        return Err(Error::PreconditionViolated("Λ is not a root of q".into()));
    }
    let report = classify_quadratic(q);
    if !report.is_admissible() {
        return Err(Error::PreconditionViolated(
            "q must be normal, non-singular and semisimple".into(),
        ));
    }
    let f = &q.field;
    let xi = if f.p() != 2 || q.beta != 0 {
        let (zeta, nu) = if f.p() == 2 {
            (f.inv(q.beta), 0)
        } else {
            let alpha = f.sub(f.mul(q.beta, q.beta), f.mul(f.from_int(4), q.gamma));
            let ai = f.inv(alpha);
            (f.mul(q.beta, ai), f.mul(f.from_int(2), ai))
        };
        let n = lambda.rows();
        q.sigma.on_matrix(f, lambda).scale(f, nu).sub(f, &Matrix::scalar(n, zeta))
    } else {
        solve_by_simples(lambda, q, &report)?
    };
    if !unit_residual(lambda, &xi, q).is_zero() {
        return Err(Error::PreconditionViolated("unit equation has no solution for this Λ".into()));
    }
    Ok(xi)
}

/// `ΛΞ + σ(Ξ)(σ(Λ) − βI) − I`.
pub fn unit_residual(lambda: &Matrix, xi: &Matrix, q: &SkewQuadratic) -> Matrix {
    let f = &q.field;
    let n = lambda.rows();
    let sl = q.sigma.on_matrix(f, lambda).sub(f, &Matrix::scalar(n, q.beta));
    lambda
        .mul(f, xi)
        .add(f, &q.sigma.on_matrix(f, xi).mul(f, &sl))
        .sub(f, &Matrix::identity(n))
}

/// Characteristic 2 with β = 0: write `Λ = σ(Φ)ΓΦ⁻¹` with `Γ` a sum of copies
/// of the unique simple, solve blockwise and conjugate back.
fn solve_by_simples(lambda: &Matrix, q: &SkewQuadratic, report: &QuadraticReport) -> Result<Matrix> {
    let f = &q.field;
    let s = q.sigma;
    let g0 = report.simple_modules[0].clone();
    let theta0 = match report.case {
        QuadCase::Irreducible => Matrix::from_rows(&[vec![0, 0], vec![1, 0]])?,
        QuadCase::MatrixRing => {
            let (eta, _) = report.factorization.expect("case 2 has a factorization");
            let l = f
                .elements()
                .find(|&l| f.mul(s.on(f, l), eta) != f.mul(eta, l))
                .expect("η does not σ-commute");
            let alpha = f.sub(f.mul(s.on(f, l), eta), f.mul(eta, l));
            Matrix::scalar(1, f.mul(l, f.inv(alpha)))
        }
        _ => {
            return Err(Error::PreconditionViolated("characteristic 2 with β = 0 forces case 1 or 2".into()))
        }
    };
    let d = g0.rows();
    let n = lambda.rows();
    // homomorphisms from the simple: σ(P)Λ = Γ₀P
    let (_, homs) = solve_additive(
        f,
        d,
        n,
        |p| s.on_matrix(f, p).mul(f, lambda).sub(f, &g0.mul(f, p)),
        None,
    );
    let mut stack = Matrix::zeros(0, n);
    for p in homs {
        if stack.rows() == n {
            break;
        }
        let cand = stack.vstack(&p);
        if cand.rank(f) == stack.rows() + d {
            stack = cand;
        }
    }
    if stack.rows() != n {
        return Err(Error::PreconditionViolated("module is not a sum of simples".into()));
    }
    let copies = n / d;
    let mut theta = Matrix::zeros(n, n);
    for c in 0..copies {
        theta.set_block(c * d, c * d, &theta0);
    }
    // σ(Φ')Λ = ΓΦ' with Φ' = stack, so Φ = Φ'⁻¹
    let phi_inv = stack;
    let phi = phi_inv.inverse(f)?;
    Ok(phi.mul(f, &theta).mul(f, &s.on_matrix(f, &phi_inv)))
}
