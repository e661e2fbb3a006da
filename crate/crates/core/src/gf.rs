//! Exact arithmetic in small finite fields GF(p^k).
//!
//! Elements are identified with their base-p integer encoding
//! `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`, where `c_i` are the coefficients of
//! the polynomial representative modulo the field's fixed modulus. The hot
//! path works on bare [`Fe`] encodings through a [`Gf`] handle; the
//! self-describing [`FieldElement`] record carries its field along and is
//! what the checked API hands out.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Monic irreducible moduli for the supported extension fields, listed as
/// coefficients from the constant term up to the leading 1.
///
/// Prime fields (k = 1) use the modulus `t` and are supported for every
/// prime p up to [`MAX_ORDER`].
const MODULUS_TABLE: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 0, 1, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 0, 1, 0, 1]),
    (2, 6, &[1, 0, 0, 0, 0, 1, 1]),
    (2, 7, &[1, 0, 0, 0, 0, 0, 1, 1]),
    (2, 8, &[1, 0, 0, 0, 1, 1, 1, 0, 1]),
    (2, 9, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 1]),
    (2, 10, &[1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1]),
    (2, 11, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1]),
    (2, 12, &[1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 1]),
    (2, 13, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1]),
    (2, 14, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (2, 15, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1]),
    (2, 16, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 0, 2, 1]),
    (3, 4, &[2, 0, 0, 1, 1]),
    (3, 5, &[1, 0, 0, 0, 2, 1]),
    (3, 6, &[2, 0, 0, 0, 0, 1, 1]),
    (3, 7, &[1, 0, 0, 0, 0, 2, 0, 1]),
    (3, 8, &[2, 0, 0, 0, 0, 0, 1, 0, 1]),
    (3, 9, &[1, 0, 0, 0, 0, 2, 0, 0, 0, 1]),
    (3, 10, &[1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 1]),
    (5, 2, &[1, 1, 1]),
    (5, 3, &[2, 0, 1, 1]),
    (5, 4, &[2, 0, 2, 1, 1]),
    (5, 5, &[2, 0, 0, 0, 3, 1]),
    (5, 6, &[1, 0, 0, 1, 0, 0, 1]),
    (7, 2, &[3, 1, 1]),
    (7, 3, &[2, 3, 0, 1]),
    (7, 4, &[3, 0, 1, 1, 1]),
    (7, 5, &[1, 0, 0, 0, 3, 1]),
    (11, 2, &[2, 7, 1]),
    (11, 3, &[3, 0, 1, 1]),
    (11, 4, &[1, 0, 0, 4, 1]),
    (13, 2, &[2, 1, 1]),
    (13, 3, &[2, 0, 1, 1]),
    (13, 4, &[2, 0, 0, 0, 1]),
];

/// Fields up to this order get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("GF({p}^{k}) exceeds the supported order {MAX_ORDER}")]
    TooLarge { p: u32, k: u32 },
    #[error("GF({p}^{k}) has no entry in the modulus table")]
    Unsupported { p: u32, k: u32 },
    #[error("modulus for GF({p}^{k}) is not monic irreducible of degree {k}")]
    BadModulus { p: u32, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("encoding {enc} is out of range for GF({q})")]
    OutOfRange { enc: u64, q: u32 },
    #[error("operands belong to different fields: GF({0}) and GF({1})")]
    FieldMismatch(u32, u32),
}

/// A field element as its integer encoding in `[0, q)`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// Unchecked; range is validated wherever elements enter a code,
    /// divisor or file.
    #[inline]
    pub const fn from_encoding(enc: u32) -> Fe {
        Fe(enc)
    }

    #[inline]
    pub fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Handle to GF(p^k). Cheap to clone; all tables are shared.
#[derive(Clone)]
pub struct Gf(Arc<Inner>);

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// exp[i] = g^i for a fixed primitive element g, doubled to skip a reduction.
    exp: Vec<u32>,
    /// log[x] for x != 0; log[0] is unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.k)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        // the modulus is a function of (p, k)
        self.0.p == other.0.p && self.0.k == other.0.k
    }
}

impl Eq for Gf {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

pub fn is_prime_power(q: u32) -> bool {
    prime_power(q).is_some()
}

/// The pinned modulus for GF(p^k), if the pair is supported.
pub fn table_modulus(p: u32, k: u32) -> Option<Vec<u32>> {
    if k == 1 {
        return Some(vec![0, 1]);
    }
    MODULUS_TABLE
        .iter()
        .find(|(tp, tk, _)| *tp == p && *tk == k)
        .map(|(_, _, m)| m.to_vec())
}

/// All `(p, k)` extension pairs in the modulus table.
pub fn table_entries() -> impl Iterator<Item = (u32, u32)> {
    MODULUS_TABLE.iter().map(|(p, k, _)| (*p, *k))
}

// Dense polynomial helpers over GF(p), coefficients low to high.

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = (top as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (c as u64 * bi as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Brute-force irreducibility: no monic factor of degree 1..=k/2.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Gf {
    /// Builds GF(p^k) with the pinned modulus, validating it on the way.
    pub fn new(p: u32, k: u32) -> Result<Gf, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= MAX_ORDER);
        let Some(q) = q else {
            return Err(FieldError::TooLarge { p, k });
        };
        let q = q as u32;
        let modulus = table_modulus(p, k).ok_or(FieldError::Unsupported { p, k })?;
        if modulus.len() != k as usize + 1
            || modulus[k as usize] != 1
            || modulus.iter().any(|&c| c >= p)
            || (k > 1 && !is_irreducible(&modulus, p))
        {
            return Err(FieldError::BadModulus { p, k });
        }

        let mut inner = Inner {
            p,
            k,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add: None,
        };
        inner.neg = (0..q).map(|a| inner.digitwise(a, 0, |x, _| x, |x| (p - x) % p)).collect();
        inner.build_log_tables();
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = inner.add_slow(a, b);
                }
            }
            inner.add = Some(table);
        }
        Ok(Gf(Arc::new(inner)))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Validated element from an encoding.
    pub fn elem(&self, enc: u64) -> Result<Fe, FieldError> {
        if enc < self.0.q as u64 {
            Ok(Fe(enc as u32))
        } else {
            Err(FieldError::OutOfRange { enc, q: self.0.q })
        }
    }

    /// The image of an integer under Z -> GF(p).
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// All q elements in increasing encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.0.q).map(Fe)
    }

    /// Coefficients of the polynomial representative, constant term first.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.0.k as usize);
        let mut rest = a.0;
        for _ in 0..self.0.k {
            out.push(rest % self.0.p);
            rest /= self.0.p;
        }
        out
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe, FieldError> {
        let mut enc = 0u64;
        for &c in coeffs.iter().rev() {
            enc = enc * self.0.p as u64 + (c % self.0.p) as u64;
        }
        self.elem(enc)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.0;
        if inner.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        match &inner.add {
            Some(t) => Fe(t[(a.0 * inner.q + b.0) as usize]),
            None => Fe(inner.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let inner = &*self.0;
        Fe(inner.exp[(inner.log[a.0 as usize] + inner.log[b.0 as usize]) as usize])
    }

    /// `acc + a * b`, the inner step of every dot product in the crate.
    #[inline]
    pub fn mul_add(&self, acc: Fe, a: Fe, b: Fe) -> Fe {
        self.add(acc, self.mul(a, b))
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let inner = &*self.0;
        let order = inner.q - 1;
        let l = inner.log[a.0 as usize];
        Ok(Fe(inner.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        let inner = &*self.0;
        let order = (inner.q - 1) as u64;
        let l = inner.log[a.0 as usize] as u64 * (e % order) % order;
        Fe(inner.exp[l as usize])
    }

    /// Scalar multiple `n * a` by an integer.
    pub fn scale_int(&self, a: Fe, n: i64) -> Fe {
        self.mul(self.from_int(n), a)
    }

    pub fn element(&self, enc: u64) -> Result<FieldElement, FieldError> {
        Ok(FieldElement { field: self.clone(), value: self.elem(enc)? })
    }

    /// Schoolbook product modulo the modulus, independent of the log tables.
    #[cfg(test)]
    pub(crate) fn mul_reference(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.0.mul_slow(a.0, b.0))
    }
}

impl Inner {
    fn digitwise(&self, a: u32, b: u32, op: impl Fn(u32, u32) -> u32, post: impl Fn(u32) -> u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.k {
            let d = post(op(a % self.p, b % self.p));
            out += d * place;
            place = place.wrapping_mul(self.p);
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        self.digitwise(a, b, |x, y| x + y, |s| s % p)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let k = self.k as usize;
        let p = self.p as u64;
        let da: Vec<u64> = digits(a, self.p, k);
        let db: Vec<u64> = digits(b, self.p, k);
        let mut prod = vec![0u32; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x * y) % p) as u32;
            }
        }
        let r = if k == 1 { prod } else { poly_rem(&prod, &self.modulus, self.p) };
        let mut enc = 0u32;
        for &c in r.iter().rev() {
            enc = enc * self.p + c;
        }
        enc
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        if order == 1 {
            self.exp = vec![1, 1];
            self.log = vec![0, 0];
            return;
        }
        let generator = (2..q)
            .find(|&g| {
                let mut x = g;
                for i in 1..order {
                    if x == 1 {
                        return i == order;
                    }
                    x = self.mul_slow(x, g);
                }
                x == 1
            })
            .expect("a finite field has a primitive element");
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x;
            log[x as usize] = i;
            x = self.mul_slow(x, generator);
        }
        for i in order..2 * order {
            exp[i as usize] = exp[(i - order) as usize];
        }
        self.exp = exp;
        self.log = log;
    }
}

fn digits(mut a: u32, p: u32, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push((a % p) as u64);
        a /= p;
    }
    out
}

/// Operation selector for [`FieldElement::arith`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element that knows its field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Gf,
    value: Fe,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.value.0, self.field)
    }
}

impl FieldElement {
    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.coeffs(self.value)
    }

    pub fn arith(&self, op: Op, other: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field.q(), other.field.q()));
        }
        let (f, a, b) = (&self.field, self.value, other.value);
        let value = match op {
            Op::Add => f.add(a, b),
            Op::Sub => f.sub(a, b),
            Op::Mul => f.mul(a, b),
            Op::Div => f.div(a, b)?,
        };
        Ok(FieldElement { field: self.field.clone(), value })
    }
}
