//! Truncated Laurent series over a finite field with precision tracking.

use std::fmt;

use crate::gf::{Fe, Gf};

/// `Σ coeffs[i] t^(val + i) + O(t^(val + coeffs.len()))`.
///
/// Normalized so that `coeffs[0]` is nonzero; an empty coefficient list is
/// the series `O(t^val)`, known to vanish below `val` and unknown beyond.
#[derive(Clone, PartialEq, Eq)]
pub struct Laurent {
    val: i64,
    coeffs: Vec<Fe>,
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*t^{}", c, self.val + i as i64))
            .collect();
        write!(f, "{} + O(t^{})", terms.join(" + "), self.abs_prec())
    }
}

impl Laurent {
    /// Series from coefficients starting at `t^start`, known below `t^(start + len)`.
    pub fn from_coeffs(start: i64, coeffs: Vec<Fe>) -> Laurent {
        let mut s = Laurent { val: start, coeffs };
        s.normalize();
        s
    }

    pub fn zero_to(prec: i64) -> Laurent {
        Laurent { val: prec, coeffs: Vec::new() }
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(0) => {}
            Some(i) => {
                self.coeffs.drain(..i);
                self.val += i as i64;
            }
            None => {
                self.val += self.coeffs.len() as i64;
                self.coeffs.clear();
            }
        }
    }

    /// Exponent of the leading term, if one is known to be nonzero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    /// Lower bound on the valuation; exact when [`Self::valuation`] is `Some`.
    pub fn val_bound(&self) -> i64 {
        self.val
    }

    /// Coefficients are known for every exponent below this.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.coeffs.len() as i64
    }

    pub fn rel_prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_indeterminate(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^e`, or `None` beyond the known precision.
    pub fn coeff(&self, e: i64) -> Option<Fe> {
        if e < self.val {
            Some(Fe::ZERO)
        } else if e < self.abs_prec() {
            Some(self.coeffs[(e - self.val) as usize])
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<Fe> {
        self.coeffs.first().copied()
    }

    /// Coefficients from the leading term on.
    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn shift(&self, by: i64) -> Laurent {
        Laurent { val: self.val + by, coeffs: self.coeffs.clone() }
    }

    /// Drops everything from `t^prec` on.
    pub fn truncate(&self, prec: i64) -> Laurent {
        if prec >= self.abs_prec() {
            return self.clone();
        }
        if prec <= self.val {
            return Laurent::zero_to(prec.max(self.val));
        }
        Laurent { val: self.val, coeffs: self.coeffs[..(prec - self.val) as usize].to_vec() }
    }

    pub fn mul(&self, gf: &Gf, other: &Laurent) -> Laurent {
        let val = self.val + other.val;
        let len = self.coeffs.len().min(other.coeffs.len());
        Laurent { val, coeffs: mul_trunc(gf, &self.coeffs, &other.coeffs, len) }
    }

    pub fn add(&self, gf: &Gf, other: &Laurent) -> Laurent {
        let start = self.val.min(other.val);
        let end = self.abs_prec().min(other.abs_prec());
        if end <= start {
            return Laurent::zero_to(end);
        }
        let coeffs = (start..end)
            .map(|e| gf.add(self.coeff(e).unwrap(), other.coeff(e).unwrap()))
            .collect();
        Laurent::from_coeffs(start, coeffs)
    }

    pub fn scale(&self, gf: &Gf, c: Fe) -> Laurent {
        if c.is_zero() {
            return Laurent::zero_to(self.abs_prec());
        }
        Laurent { val: self.val, coeffs: self.coeffs.iter().map(|&x| gf.mul(x, c)).collect() }
    }

    /// Multiplicative inverse; `None` for an indeterminate series.
    pub fn inv(&self, gf: &Gf) -> Option<Laurent> {
        if self.coeffs.is_empty() {
            return None;
        }
        Some(Laurent { val: -self.val, coeffs: inv_trunc(gf, &self.coeffs, self.coeffs.len()) })
    }

    pub fn pow(&self, gf: &Gf, e: u32) -> Laurent {
        let len = self.coeffs.len();
        let mut acc = Laurent { val: 0, coeffs: one(len) };
        for _ in 0..e {
            acc = acc.mul(gf, self);
        }
        acc
    }
}

pub(crate) fn one(len: usize) -> Vec<Fe> {
    let mut v = vec![Fe::ZERO; len];
    if len > 0 {
        v[0] = Fe::ONE;
    }
    v
}

/// Power-series product truncated to `len` terms.
pub(crate) fn mul_trunc(gf: &Gf, a: &[Fe], b: &[Fe], len: usize) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = gf.mul_add(out[i + j], x, y);
        }
    }
    out
}

/// `a * (c + t)` truncated to `a.len()` terms.
pub(crate) fn mul_linear(gf: &Gf, a: &[Fe], c: Fe) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; a.len()];
    for i in 0..a.len() {
        let mut v = gf.mul(a[i], c);
        if i > 0 {
            v = gf.add(v, a[i - 1]);
        }
        out[i] = v;
    }
    out
}

/// Inverse of a power series with nonzero constant term, to `len` terms.
pub(crate) fn inv_trunc(gf: &Gf, a: &[Fe], len: usize) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; len];
    if len == 0 {
        return out;
    }
    let a0_inv = gf.inv(a[0]).expect("unit constant term");
    out[0] = a0_inv;
    for k in 1..len {
        let mut s = Fe::ZERO;
        for i in 1..=k.min(a.len() - 1) {
            s = gf.mul_add(s, a[i], out[k - i]);
        }
        out[k] = gf.neg(gf.mul(s, a0_inv));
    }
    out
}
