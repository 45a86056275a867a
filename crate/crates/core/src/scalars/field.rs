use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, stored as the integer `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`
/// where `c_0 + c_1 t + ...` is its coefficient vector over the prime field.
pub type Elt = u32;

/// Largest field order we build tables for.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Arithmetic shared by the prime field and its extensions, so the linear
/// algebra in [`crate::scalars::matrix`] can run over either.
pub trait FieldOps {
    fn add(&self, a: Elt, b: Elt) -> Elt;
    fn neg(&self, a: Elt) -> Elt;
    fn mul(&self, a: Elt, b: Elt) -> Elt;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self, a: Elt) -> Elt;
    fn order(&self) -> u32;

    fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }
    fn div(&self, a: Elt, b: Elt) -> Elt {
        self.mul(a, self.inv(b))
    }
}

/// The prime field GF(p) with plain modular arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl FieldOps for PrimeField {
    #[inline]
    fn add(&self, a: Elt, b: Elt) -> Elt {
        if self.p == 2 {
            return a ^ b;
        }
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn neg(&self, a: Elt) -> Elt {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: Elt, b: Elt) -> Elt {
        ((a as u64 * b as u64) % self.p as u64) as Elt
    }
    fn inv(&self, a: Elt) -> Elt {
        assert!(a != 0, "inverse of zero");
        let (mut t, mut nt) = (0i64, 1i64);
        let (mut r, mut nr) = (self.p as i64, a as i64);
        while nr != 0 {
            let q = r / nr;
            (t, nt) = (nt, t - q * nt);
            (r, nr) = (nr, r - q * nr);
        }
        t.rem_euclid(self.p as i64) as Elt
    }
    fn order(&self) -> u32 {
        self.p
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

struct FieldData {
    p: u32,
    n: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<Elt>,
    log: Vec<u32>,
    frob: Vec<Vec<Elt>>,
    add: Option<Vec<Elt>>,
    neg: Vec<Elt>,
    prime: PrimeField,
}

/// The finite field GF(p^n) together with its automorphism group, the powers
/// of Frobenius. Cloning is cheap.
#[derive(Clone)]
pub struct FieldWithAut {
    d: Arc<FieldData>,
}

impl fmt::Debug for FieldWithAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.d.p, self.d.n, self.d.modulus)
    }
}

impl PartialEq for FieldWithAut {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.d, &other.d)
            || (self.d.p == other.d.p && self.d.n == other.d.n && self.d.modulus == other.d.modulus)
    }
}
impl Eq for FieldWithAut {}

/// Polynomials over GF(p) as coefficient vectors, lowest degree first.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], fp: &PrimeField) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let m = poly_trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = fp.inv(m[dm]);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = fp.mul(r[dr], lead_inv);
        for i in 0..=dm {
            let idx = dr - dm + i;
            r[idx] = fp.sub(r[idx], fp.mul(c, m[i]));
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], fp: &PrimeField) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = fp.add(r[i + j], fp.mul(x, y));
        }
    }
    poly_trim(r)
}

fn digits_of(mut x: u32, p: u32, n: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(n as usize);
    for _ in 0..n {
        v.push(x % p);
        x /= p;
    }
    v
}

fn code_of(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// Monic polynomial of degree `n` whose lower coefficients are the base-`p`
/// digits of `code`.
fn monic_from_code(code: u32, p: u32, n: u32) -> Vec<u32> {
    let mut m = digits_of(code, p, n);
    m.push(1);
    m
}

/// Irreducibility over GF(p) by trial division by every monic polynomial of
/// degree at most n/2.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let fp = match PrimeField::new(p) {
        Ok(f) => f,
        Err(_) => return false,
    };
    let m = poly_trim(m.to_vec());
    if m.len() < 2 {
        return false;
    }
    let n = (m.len() - 1) as u32;
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d);
        for code in 0..count {
            let f = monic_from_code(code as u32, p, d);
            if poly_rem(&m, &f, &fp).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `n`, ordering candidates by the
/// integer whose base-`p` digits are the lower coefficients.
pub fn default_modulus(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for code in 0..count {
        let m = monic_from_code(code as u32, p, n);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldWithAut {
    /// Build GF(p^n). `modulus` lists coefficients lowest degree first and must
    /// be monic of degree `n`; when omitted the least irreducible is used.
    pub fn new(p: u32, n: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if n == 0 {
            return Err(Error::ReducibleModulus(n));
        }
        let q64 = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
        if q64 > MAX_FIELD_SIZE {
            return Err(Error::FieldTooLarge(q64));
        }
        let q = q64 as u32;
        let fp = PrimeField::new(p)?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != n as usize + 1 || m[n as usize] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::ReducibleModulus(n));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(n));
                }
                m
            }
            None => default_modulus(p, n),
        };
        let slow_mul = |a: u32, b: u32| -> u32 {
            let pa = poly_trim(digits_of(a, p, n));
            let pb = poly_trim(digits_of(b, p, n));
            let r = poly_rem(&poly_mul(&pa, &pb, &fp), &modulus, &fp);
            code_of(&r, p)
        };
        // primitive element search
        let mut exp = Vec::new();
        let mut log = vec![0u32; q as usize];
        for g in 1..q {
            exp.clear();
            let mut x = 1u32;
            loop {
                exp.push(x);
                x = slow_mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == (q - 1) as usize {
                break;
            }
        }
        debug_assert_eq!(exp.len(), (q - 1) as usize);
        for (i, &e) in exp.iter().enumerate() {
            log[e as usize] = i as u32;
        }
        let neg: Vec<Elt> = (0..q)
            .map(|x| code_of(&digits_of(x, p, n).iter().map(|&c| fp.neg(c)).collect::<Vec<_>>(), p))
            .collect();
        let add = if p != 2 && q <= 512 {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                let da = digits_of(a, p, n);
                for b in 0..q {
                    let db = digits_of(b, p, n);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| fp.add(x, y)).collect();
                    t[(a * q + b) as usize] = code_of(&s, p);
                }
            }
            Some(t)
        } else {
            None
        };
        let mut data = FieldData {
            p,
            n,
            q,
            modulus,
            exp,
            log,
            frob: Vec::new(),
            add,
            neg,
            prime: fp,
        };
        let mut frob = vec![(0..q).collect::<Vec<Elt>>()];
        for k in 1..n as usize {
            let prev = &frob[k - 1];
            let next: Vec<Elt> = (0..q).map(|x| pow_with(&data, prev[x as usize], p)).collect();
            frob.push(next);
        }
        data.frob = frob;
        Ok(FieldWithAut { d: Arc::new(data) })
    }

    pub fn p(&self) -> u32 {
        self.d.p
    }
    pub fn n(&self) -> u32 {
        self.d.n
    }
    pub fn q(&self) -> u32 {
        self.d.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.d.modulus
    }
    pub fn prime_field(&self) -> &PrimeField {
        &self.d.prime
    }

    pub fn zero(&self) -> Elt {
        0
    }
    pub fn one(&self) -> Elt {
        1
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.d.q
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> Elt {
        if self.d.q == 2 {
            1
        } else {
            self.d.exp[1]
        }
    }

    /// The class of `t`, which generates the field over the prime field.
    pub fn t(&self) -> Elt {
        if self.d.n == 1 {
            1
        } else {
            self.d.p
        }
    }

    pub fn check(&self, x: u64) -> Result<Elt> {
        if x < self.d.q as u64 {
            Ok(x as Elt)
        } else {
            Err(Error::BadElement(x))
        }
    }

    /// Prime-field coordinates of `x`.
    pub fn digits(&self, x: Elt) -> Vec<u32> {
        digits_of(x, self.d.p, self.d.n)
    }

    pub fn from_digits(&self, d: &[u32]) -> Elt {
        code_of(d, self.d.p)
    }

    /// Embed an integer of the prime field.
    pub fn from_int(&self, c: i64) -> Elt {
        c.rem_euclid(self.d.p as i64) as Elt
    }

    pub fn pow(&self, x: Elt, e: i64) -> Elt {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let m = (self.d.q - 1) as i64;
        let l = (self.d.log[x as usize] as i64 * e.rem_euclid(m)).rem_euclid(m);
        self.d.exp[l as usize]
    }

    /// Frobenius power: `x ↦ x^(p^k)` with `k` taken mod n.
    #[inline]
    pub fn frob(&self, k: u32, x: Elt) -> Elt {
        self.d.frob[(k % self.d.n) as usize][x as usize]
    }

    /// Elements fixed by `Frob^k`.
    pub fn fixed_field(&self, k: u32) -> Vec<Elt> {
        self.elements().filter(|&x| self.frob(k, x) == x).collect()
    }
}

fn pow_with(d: &FieldData, x: Elt, e: u32) -> Elt {
    if x == 0 {
        return if e == 0 { 1 } else { 0 };
    }
    let m = (d.q - 1) as u64;
    let l = (d.log[x as usize] as u64 * e as u64) % m;
    d.exp[l as usize]
}

impl FieldOps for FieldWithAut {
    #[inline]
    fn add(&self, a: Elt, b: Elt) -> Elt {
        let d = &*self.d;
        if d.p == 2 {
            return a ^ b;
        }
        if d.n == 1 {
            return d.prime.add(a, b);
        }
        if let Some(t) = &d.add {
            return t[(a * d.q + b) as usize];
        }
        let (mut a, mut b) = (a, b);
        let mut r = 0u32;
        let mut scale = 1u32;
        for _ in 0..d.n {
            let s = (a % d.p + b % d.p) % d.p;
            r += s * scale;
            scale = scale.wrapping_mul(d.p);
            a /= d.p;
            b /= d.p;
        }
        r
    }
    #[inline]
    fn neg(&self, a: Elt) -> Elt {
        self.d.neg[a as usize]
    }
    #[inline]
    fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a == 0 || b == 0 {
            return 0;
        }
        let d = &*self.d;
        let m = d.q - 1;
        let mut l = d.log[a as usize] + d.log[b as usize];
        if l >= m {
            l -= m;
        }
        d.exp[l as usize]
    }
    fn inv(&self, a: Elt) -> Elt {
        assert!(a != 0, "inverse of zero");
        let d = &*self.d;
        let m = d.q - 1;
        let l = d.log[a as usize];
        d.exp[((m - l) % m) as usize]
    }
    fn order(&self) -> u32 {
        self.d.q
    }
}
