//! Explicit curves with their rational points, divisors, local expansions
//! and Riemann-Roch spaces.
//!
//! Two families are supported: the projective line over GF(q), and the
//! Hermitian curve `y^q0 + y = x^(q0+1)` over GF(q0^2), of genus
//! `q0 (q0 - 1) / 2` with `q0^3 + 1` rational points and a single point at
//! infinity `P∞`.
//!
//! Local parameters are fixed once per point:
//!
//! * affine points: `t = x - a` (on the Hermitian curve `∂F/∂y = 1`, so this
//!   is a uniformizer everywhere in the affine part);
//! * `P∞` on the line: `t = 1/x`;
//! * `P∞` on the Hermitian curve: `t = x/y`, where `x` and `y` both expand
//!   with leading coefficient 1.
//!
//! Functions are stored as a reduced polynomial in `x, y` (with `y`-degree
//! below `q0`) over a product of known factors: vertical lines `x - a` and
//! tangent lines at affine Hermitian points. Since a tangent line meets the
//! Hermitian curve only at its point of tangency, both factor kinds have
//! all their zeros at rational points with known orders.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rand::Rng;
use thiserror::Error;

use crate::gf::{FieldError, Fe, Gf};
use crate::matrix::Matrix;
use crate::series::{inv_trunc, mul_linear, mul_trunc, one, Laurent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("Hermitian curves need a field of square order, got GF({p}^{k})")]
    NotSquareField { p: u32, k: u32 },
    #[error("point index {0} is not a rational point of this curve")]
    UnknownPoint(usize),
    #[error("no rational point with coordinates {0:?}")]
    NotOnCurve(Vec<u32>),
    #[error("the zero function has no valuation")]
    ZeroFunction,
    #[error("precision {precision} does not determine the valuation")]
    IndeterminateValuation { precision: i64 },
    #[error("precision must be at least 1")]
    BadPrecision,
    #[error("tangent factors exist only at affine points of a Hermitian curve")]
    BadFactor,
    #[error("function is not in L(D): valuation {found} < {required} at point {point}")]
    NotInSpace { point: usize, found: i64, required: i64 },
    #[error("point count {found} differs from the expected {expected}")]
    PointCount { found: usize, expected: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    ProjectiveLine,
    Hermitian { q0: u32 },
}

/// A rational point; on the line `y` is always zero.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Affine { x: Fe, y: Fe },
    Infinity,
}

/// A vertical line `x - a`, or the tangent line at an affine Hermitian
/// point `(a, b)`: `y - b - a^q0 (x - a)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Vertical(Fe),
    Tangent(usize),
}

pub struct Curve {
    kind: CurveKind,
    field: Gf,
    genus: usize,
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    /// Point indices above each x-coordinate, by encoding.
    fibers: Vec<Vec<usize>>,
    /// Pole orders of x and y at infinity.
    x_pole: u64,
    y_pole: u64,
    /// Powers of y kept in reduced form: 1 on the line, q0 on the Hermitian curve.
    y_terms: usize,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CurveKind::ProjectiveLine => write!(f, "P1/{:?}", self.field),
            CurveKind::Hermitian { q0 } => write!(f, "Hermitian(q0={q0})/{:?}", self.field),
        }
    }
}

// ---------------------------------------------------------------------------
// Divisors

/// Finite integer combination of rational points, keyed by point index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Divisor {
    mults: BTreeMap<usize, i64>,
}

impl Divisor {
    pub fn zero() -> Divisor {
        Divisor::default()
    }

    pub fn point(p: usize, m: i64) -> Divisor {
        let mut d = Divisor::zero();
        d.add_point(p, m);
        d
    }

    /// Sum of `points`, each with multiplicity one.
    pub fn reduced(points: &[usize]) -> Divisor {
        let mut d = Divisor::zero();
        for &p in points {
            d.add_point(p, 1);
        }
        d
    }

    pub fn add_point(&mut self, p: usize, m: i64) {
        let e = self.mults.entry(p).or_insert(0);
        *e += m;
        if *e == 0 {
            self.mults.remove(&p);
        }
    }

    pub fn mult(&self, p: usize) -> i64 {
        self.mults.get(&p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.mults.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.mults.iter().map(|(&p, &m)| (p, m))
    }

    pub fn is_zero(&self) -> bool {
        self.mults.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.mults.values().all(|&m| m > 0)
    }

    pub fn scale(&self, k: i64) -> Divisor {
        let mut d = Divisor::zero();
        for (p, m) in self.support() {
            d.add_point(p, m * k);
        }
        d
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (p, m) in rhs.support() {
            d.add_point(p, m);
        }
        d
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        self + &rhs.scale(-1)
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        self.scale(-1)
    }
}

// ---------------------------------------------------------------------------
// Polynomials in x, y

/// `rows[j][i]` is the coefficient of `x^i y^j`; trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    rows: Vec<Vec<Fe>>,
}

impl Poly2 {
    pub fn zero() -> Poly2 {
        Poly2::default()
    }

    pub fn constant(c: Fe) -> Poly2 {
        Poly2::monomial(0, 0, c)
    }

    pub fn monomial(i: usize, j: usize, c: Fe) -> Poly2 {
        let mut rows = vec![Vec::new(); j + 1];
        rows[j] = vec![Fe::ZERO; i + 1];
        rows[j][i] = c;
        let mut p = Poly2 { rows };
        p.trim();
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, Fe)>, gf: &Gf) -> Poly2 {
        let mut p = Poly2::zero();
        for (i, j, c) in terms {
            p.add_term(gf, i, j, c);
        }
        p.trim();
        p
    }

    fn add_term(&mut self, gf: &Gf, i: usize, j: usize, c: Fe) {
        if self.rows.len() <= j {
            self.rows.resize(j + 1, Vec::new());
        }
        let row = &mut self.rows[j];
        if row.len() <= i {
            row.resize(i + 1, Fe::ZERO);
        }
        row[i] = gf.add(row[i], c);
    }

    fn trim(&mut self) {
        for r in &mut self.rows {
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        while self.rows.last().is_some_and(|r| r.is_empty()) {
            self.rows.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Fe {
        self.rows.get(j).and_then(|r| r.get(i)).copied().unwrap_or(Fe::ZERO)
    }

    /// Nonzero terms `(i, j, c)` of `c x^i y^j`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Fe)> + '_ {
        self.rows.iter().enumerate().flat_map(|(j, r)| {
            r.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, &c)| (i, j, c))
        })
    }
}

// ---------------------------------------------------------------------------
// Rational functions

/// `num / Π factor^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly2,
    den: Vec<(Factor, u32)>,
}

fn merge_den(den: impl IntoIterator<Item = (Factor, u32)>) -> Vec<(Factor, u32)> {
    let mut m: BTreeMap<Factor, u32> = BTreeMap::new();
    for (f, e) in den {
        *m.entry(f).or_insert(0) += e;
    }
    m.into_iter().filter(|(_, e)| *e > 0).collect()
}

impl RationalFunction {
    pub fn polynomial(num: Poly2) -> RationalFunction {
        RationalFunction { num, den: Vec::new() }
    }

    pub fn new(num: Poly2, den: Vec<(Factor, u32)>) -> RationalFunction {
        RationalFunction { num, den: merge_den(den) }
    }

    pub fn constant(c: Fe) -> RationalFunction {
        RationalFunction::polynomial(Poly2::constant(c))
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.num
    }

    pub fn denominator(&self) -> &[(Factor, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

// ---------------------------------------------------------------------------
// Riemann-Roch spaces

/// A basis of `L(D)` as `{ g_k / h }` with a shared denominator `h`.
#[derive(Clone, Debug)]
pub struct RiemannRochSpace {
    /// `h`, chosen so that every `g_k` lies in `L(bound · P∞)`.
    pub den: Vec<(Factor, u32)>,
    pub bound: i64,
    /// Monomials `(i, j)` of weight at most `bound`, by increasing weight.
    pub monomials: Vec<(usize, usize)>,
    /// Coefficients of each `g_k` on `monomials`.
    pub coords: Vec<Vec<Fe>>,
    pub basis: Vec<RationalFunction>,
}

impl RiemannRochSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// `x = t^x_shift · x_ser`, `y = t^y_shift · y_ser` at a point.
struct LocalCoords {
    x_shift: i64,
    x_ser: Vec<Fe>,
    y_shift: i64,
    y_ser: Vec<Fe>,
    /// `x_ser = a + t` exactly; enables the cheap linear product.
    x_linear: Option<Fe>,
}

impl Curve {
    pub fn projective_line(field: Gf) -> Curve {
        let q = field.q() as usize;
        let mut points: Vec<Point> = field.elements().map(|x| Point::Affine { x, y: Fe::ZERO }).collect();
        points.push(Point::Infinity);
        let fibers = (0..q).map(|i| vec![i]).collect();
        Curve::assemble(CurveKind::ProjectiveLine, field, 0, points, fibers, 1, 0, 1)
    }

    /// `y^q0 + y = x^(q0+1)` over GF(q0^2).
    pub fn hermitian(field: Gf) -> Result<Curve, CurveError> {
        let (p, k) = (field.p(), field.k());
        if k % 2 != 0 {
            return Err(CurveError::NotSquareField { p, k });
        }
        let q0 = p.pow(k / 2);
        let q = field.q() as usize;
        // bucket b by b^q0 + b
        let mut by_trace: Vec<Vec<Fe>> = vec![Vec::new(); q];
        for b in field.elements() {
            let t = field.add(field.pow(b, q0 as u64), b);
            by_trace[t.encoding() as usize].push(b);
        }
        let mut points = Vec::new();
        let mut fibers = vec![Vec::new(); q];
        for a in field.elements() {
            let norm = field.pow(a, q0 as u64 + 1);
            for &b in &by_trace[norm.encoding() as usize] {
                fibers[a.encoding() as usize].push(points.len());
                points.push(Point::Affine { x: a, y: b });
            }
        }
        points.push(Point::Infinity);
        let expected = (q0 as usize).pow(3) + 1;
        if points.len() != expected {
            return Err(CurveError::PointCount { found: points.len(), expected });
        }
        let genus = (q0 * (q0 - 1) / 2) as usize;
        Ok(Curve::assemble(
            CurveKind::Hermitian { q0 },
            field,
            genus,
            points,
            fibers,
            q0 as u64,
            q0 as u64 + 1,
            q0 as usize,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: CurveKind,
        field: Gf,
        genus: usize,
        points: Vec<Point>,
        fibers: Vec<Vec<usize>>,
        x_pole: u64,
        y_pole: u64,
        y_terms: usize,
    ) -> Curve {
        let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        Curve { kind, field, genus, points, index, fibers, x_pole, y_pole, y_terms }
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// All rational points: affine ones by `(x, y)` encodings, then `P∞`.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, idx: usize) -> Result<Point, CurveError> {
        self.points.get(idx).copied().ok_or(CurveError::UnknownPoint(idx))
    }

    pub fn infinity(&self) -> usize {
        self.points.len() - 1
    }

    pub fn index_of(&self, p: &Point) -> Result<usize, CurveError> {
        self.index.get(p).copied().ok_or_else(|| match p {
            Point::Affine { x, y } => CurveError::NotOnCurve(vec![x.encoding(), y.encoding()]),
            Point::Infinity => CurveError::NotOnCurve(vec![]),
        })
    }

    pub fn check_divisor(&self, d: &Divisor) -> Result<(), CurveError> {
        match d.support().find(|(p, _)| *p >= self.points.len()) {
            Some((p, _)) => Err(CurveError::UnknownPoint(p)),
            None => Ok(()),
        }
    }

    /// Pole order of `x^i y^j` at infinity.
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        i as u64 * self.x_pole + j as u64 * self.y_pole
    }

    /// Largest monomial weight, `None` for the zero polynomial.
    pub fn weighted_degree(&self, g: &Poly2) -> Option<u64> {
        g.terms().map(|(i, j, _)| self.weight(i, j)).max()
    }

    // -- polynomial arithmetic ------------------------------------------------

    pub fn poly_add(&self, a: &Poly2, b: &Poly2) -> Poly2 {
        let mut out = a.clone();
        for (i, j, c) in b.terms() {
            out.add_term(&self.field, i, j, c);
        }
        out.trim();
        out
    }

    pub fn poly_scale(&self, a: &Poly2, c: Fe) -> Poly2 {
        Poly2::from_terms(a.terms().map(|(i, j, x)| (i, j, self.field.mul(x, c))), &self.field)
    }

    pub fn poly_sub(&self, a: &Poly2, b: &Poly2) -> Poly2 {
        self.poly_add(a, &self.poly_scale(b, self.field.neg(Fe::ONE)))
    }

    /// Product, reduced by `y^q0 = x^(q0+1) - y` on the Hermitian curve.
    pub fn poly_mul(&self, a: &Poly2, b: &Poly2) -> Poly2 {
        let gf = &self.field;
        let ydeg = a.rows.len() + b.rows.len();
        let mut rows: Vec<Vec<Fe>> = vec![Vec::new(); ydeg.max(1)];
        for (ja, ra) in a.rows.iter().enumerate() {
            for (jb, rb) in b.rows.iter().enumerate() {
                if ra.is_empty() || rb.is_empty() {
                    continue;
                }
                let row = &mut rows[ja + jb];
                if row.len() < ra.len() + rb.len() - 1 {
                    row.resize(ra.len() + rb.len() - 1, Fe::ZERO);
                }
                for (i, &x) in ra.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (k, &y) in rb.iter().enumerate() {
                        row[i + k] = gf.mul_add(row[i + k], x, y);
                    }
                }
            }
        }
        let mut p = Poly2 { rows };
        self.reduce(&mut p);
        p.trim();
        p
    }

    fn reduce(&self, p: &mut Poly2) {
        let CurveKind::Hermitian { q0 } = self.kind else {
            p.rows.truncate(1);
            return;
        };
        let q0 = q0 as usize;
        let gf = &self.field;
        while p.rows.len() > q0 {
            let j = p.rows.len() - 1;
            let top = p.rows.pop().unwrap();
            // x^i y^j = x^i y^(j-q0) (x^(q0+1) - y)
            for (i, &c) in top.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                p.add_term(gf, i + q0 + 1, j - q0, c);
                p.add_term(gf, i, j - q0 + 1, gf.neg(c));
            }
            p.trim();
        }
    }

    pub fn poly_pow(&self, a: &Poly2, e: u32) -> Poly2 {
        let mut acc = Poly2::constant(Fe::ONE);
        for _ in 0..e {
            acc = self.poly_mul(&acc, a);
        }
        acc
    }

    /// Value at an affine point.
    pub fn poly_eval(&self, g: &Poly2, p: usize) -> Result<Fe, CurveError> {
        let Point::Affine { x, y } = self.point(p)? else {
            return Err(CurveError::UnknownPoint(p));
        };
        let gf = &self.field;
        Ok(g.terms().fold(Fe::ZERO, |acc, (i, j, c)| {
            gf.add(acc, gf.mul(c, gf.mul(gf.pow(x, i as u64), gf.pow(y, j as u64))))
        }))
    }

    pub fn factor_poly(&self, f: Factor) -> Result<Poly2, CurveError> {
        let gf = &self.field;
        match f {
            Factor::Vertical(a) => {
                Ok(Poly2::from_terms([(1, 0, Fe::ONE), (0, 0, gf.neg(a))], gf))
            }
            Factor::Tangent(p) => {
                let (CurveKind::Hermitian { q0 }, Point::Affine { x: a, y: b }) = (self.kind, self.point(p)?) else {
                    return Err(CurveError::BadFactor);
                };
                let slope = gf.pow(a, q0 as u64);
                let constant = gf.sub(gf.mul(slope, a), b);
                Ok(Poly2::from_terms([(0, 1, Fe::ONE), (1, 0, gf.neg(slope)), (0, 0, constant)], gf))
            }
        }
    }

    /// Order of a factor at a point, from its known zero set.
    pub fn factor_valuation(&self, f: Factor, p: usize) -> Result<i64, CurveError> {
        let pt = self.point(p)?;
        Ok(match (f, pt) {
            (Factor::Vertical(_), Point::Infinity) => -(self.x_pole as i64),
            (Factor::Vertical(a), Point::Affine { x, .. }) => (x == a) as i64,
            (Factor::Tangent(_), Point::Infinity) => -(self.y_pole as i64),
            (Factor::Tangent(t), Point::Affine { .. }) => {
                if t == p {
                    self.y_pole as i64
                } else {
                    0
                }
            }
        })
    }

    fn factor_zeros(&self, f: Factor) -> Vec<usize> {
        match f {
            Factor::Vertical(a) => self.fibers[a.encoding() as usize].clone(),
            Factor::Tangent(p) => vec![p],
        }
    }

    fn den_pole(&self, den: &[(Factor, u32)]) -> i64 {
        den.iter()
            .map(|&(f, e)| {
                e as i64
                    * match f {
                        Factor::Vertical(_) => self.x_pole as i64,
                        Factor::Tangent(_) => self.y_pole as i64,
                    }
            })
            .sum()
    }

    fn den_valuation(&self, den: &[(Factor, u32)], p: usize) -> Result<i64, CurveError> {
        let mut v = 0;
        for &(f, e) in den {
            v += e as i64 * self.factor_valuation(f, p)?;
        }
        Ok(v)
    }

    pub fn den_poly(&self, den: &[(Factor, u32)]) -> Result<Poly2, CurveError> {
        let mut acc = Poly2::constant(Fe::ONE);
        for &(f, e) in den {
            acc = self.poly_mul(&acc, &self.poly_pow(&self.factor_poly(f)?, e));
        }
        Ok(acc)
    }

    // -- function arithmetic ---------------------------------------------------

    pub fn function_mul(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.poly_mul(&a.num, &b.num), a.den.iter().chain(&b.den).copied().collect())
    }

    pub fn function_scale(&self, a: &RationalFunction, c: Fe) -> RationalFunction {
        RationalFunction { num: self.poly_scale(&a.num, c), den: a.den.clone() }
    }

    pub fn function_add(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction, CurveError> {
        // common denominator: factor-wise maximum exponent
        let mut lcm: BTreeMap<Factor, u32> = BTreeMap::new();
        for &(f, e) in a.den.iter().chain(&b.den) {
            let x = lcm.entry(f).or_insert(0);
            *x = (*x).max(e);
        }
        let cofactor = |den: &[(Factor, u32)]| -> Vec<(Factor, u32)> {
            lcm.iter()
                .map(|(&f, &e)| (f, e - den.iter().find(|(g, _)| *g == f).map_or(0, |(_, k)| *k)))
                .collect()
        };
        let na = self.poly_mul(&a.num, &self.den_poly(&cofactor(&a.den))?);
        let nb = self.poly_mul(&b.num, &self.den_poly(&cofactor(&b.den))?);
        Ok(RationalFunction::new(self.poly_add(&na, &nb), lcm.into_iter().collect()))
    }

    /// Exact equality after clearing denominators.
    pub fn function_eq(&self, a: &RationalFunction, b: &RationalFunction) -> Result<bool, CurveError> {
        let lhs = self.poly_mul(&a.num, &self.den_poly(&b.den)?);
        let rhs = self.poly_mul(&b.num, &self.den_poly(&a.den)?);
        Ok(lhs == rhs)
    }

    /// The function `x`.
    pub fn x(&self) -> RationalFunction {
        RationalFunction::polynomial(Poly2::monomial(1, 0, Fe::ONE))
    }

    /// The function `y` (zero on the line).
    pub fn y(&self) -> RationalFunction {
        match self.kind {
            CurveKind::ProjectiveLine => RationalFunction::polynomial(Poly2::zero()),
            CurveKind::Hermitian { .. } => RationalFunction::polynomial(Poly2::monomial(0, 1, Fe::ONE)),
        }
    }

    // -- local expansions ------------------------------------------------------

    fn local_coords(&self, p: usize, len: usize) -> Result<LocalCoords, CurveError> {
        let gf = &self.field;
        let pt = self.point(p)?;
        let linear = |a: Fe| {
            let mut v = vec![Fe::ZERO; len];
            if len > 0 {
                v[0] = a;
            }
            if len > 1 {
                v[1] = Fe::ONE;
            }
            v
        };
        Ok(match (self.kind, pt) {
            (CurveKind::ProjectiveLine, Point::Affine { x, .. }) => LocalCoords {
                x_shift: 0,
                x_ser: linear(x),
                y_shift: 0,
                y_ser: vec![Fe::ZERO; len],
                x_linear: Some(x),
            },
            (CurveKind::ProjectiveLine, Point::Infinity) => LocalCoords {
                x_shift: -1,
                x_ser: one(len),
                y_shift: 0,
                y_ser: vec![Fe::ZERO; len],
                x_linear: None,
            },
            (CurveKind::Hermitian { q0 }, Point::Affine { x: a, y: b }) => {
                // y = Σ c_k t^k with y^q0 + y = (a + t)^(q0+1)
                //                            = a^(q0+1) + a^q0 t + a t^q0 + t^(q0+1)
                let q0 = q0 as usize;
                let mut c = vec![Fe::ZERO; len];
                for k in 0..len {
                    let rhs = match k {
                        0 => Fe::ZERO,
                        1 => gf.pow(a, q0 as u64),
                        _ if k == q0 => a,
                        _ if k == q0 + 1 => Fe::ONE,
                        _ => Fe::ZERO,
                    };
                    c[k] = if k == 0 {
                        b
                    } else if k % q0 == 0 {
                        gf.sub(rhs, gf.pow(c[k / q0], q0 as u64))
                    } else {
                        rhs
                    };
                }
                LocalCoords { x_shift: 0, x_ser: linear(a), y_shift: 0, y_ser: c, x_linear: Some(a) }
            }
            (CurveKind::Hermitian { q0 }, Point::Infinity) => {
                // u = 1/y satisfies u + u^q0 = t^(q0+1) for t = x/y
                let q0 = q0 as usize;
                let total = q0 + 1 + len;
                let mut u = vec![Fe::ZERO; total];
                for k in 1..total {
                    let mut v = if k == q0 + 1 { Fe::ONE } else { Fe::ZERO };
                    if k % q0 == 0 {
                        v = gf.sub(v, gf.pow(u[k / q0], q0 as u64));
                    }
                    u[k] = v;
                }
                let y_ser = inv_trunc(gf, &u[q0 + 1..], len);
                LocalCoords {
                    x_shift: -(q0 as i64),
                    x_ser: y_ser.clone(),
                    y_shift: -(q0 as i64 + 1),
                    y_ser,
                    x_linear: None,
                }
            }
        })
    }

    fn shift_at(&self, lc: &LocalCoords, i: usize, j: usize) -> i64 {
        i as i64 * lc.x_shift + j as i64 * lc.y_shift
    }

    /// Series of the monomials `x^i y^j` at a point to absolute precision
    /// `prec`, as `(shift, power series)` pairs.
    fn monomial_series(
        &self,
        p: usize,
        monomials: &[(usize, usize)],
        prec: i64,
    ) -> Result<Vec<(i64, Vec<Fe>)>, CurveError> {
        let gf = &self.field;
        let probe = self.local_coords(p, 0)?;
        let s_min = monomials.iter().map(|&(i, j)| self.shift_at(&probe, i, j)).min().unwrap_or(0);
        let len = (prec - s_min).max(0) as usize;
        let lc = self.local_coords(p, len)?;
        let max_i = monomials.iter().map(|m| m.0).max().unwrap_or(0);
        let max_j = monomials.iter().map(|m| m.1).max().unwrap_or(0);
        let mut xp = vec![one(len)];
        for _ in 0..max_i {
            let last = xp.last().unwrap();
            let next = match lc.x_linear {
                Some(a) => mul_linear(gf, last, a),
                None => mul_trunc(gf, last, &lc.x_ser, len),
            };
            xp.push(next);
        }
        let mut yp = vec![one(len)];
        for _ in 0..max_j {
            let next = mul_trunc(gf, yp.last().unwrap(), &lc.y_ser, len);
            yp.push(next);
        }
        Ok(monomials
            .iter()
            .map(|&(i, j)| {
                let s = self.shift_at(&lc, i, j);
                let l = (prec - s).max(0) as usize;
                let ser = if j == 0 { xp[i][..l].to_vec() } else { mul_trunc(gf, &xp[i], &yp[j], l) };
                (s, ser)
            })
            .collect())
    }

    /// Series of a polynomial at a point, known below `t^prec`.
    pub fn poly_series(&self, g: &Poly2, p: usize, prec: i64) -> Result<Laurent, CurveError> {
        let gf = &self.field;
        let terms: Vec<(usize, usize, Fe)> = g.terms().collect();
        if terms.is_empty() {
            return Ok(Laurent::zero_to(prec));
        }
        let monos: Vec<(usize, usize)> = terms.iter().map(|&(i, j, _)| (i, j)).collect();
        let table = self.monomial_series(p, &monos, prec)?;
        let s_min = table.iter().map(|(s, _)| *s).min().unwrap();
        if prec <= s_min {
            return Ok(Laurent::zero_to(prec));
        }
        let mut acc = vec![Fe::ZERO; (prec - s_min) as usize];
        for (&(_, _, c), (s, ser)) in terms.iter().zip(&table) {
            let off = (s - s_min) as usize;
            for (k, &v) in ser.iter().enumerate() {
                acc[off + k] = gf.mul_add(acc[off + k], c, v);
            }
        }
        Ok(Laurent::from_coeffs(s_min, acc))
    }

    /// Series of `Π factor^e` with relative precision `rel`.
    fn den_series(&self, den: &[(Factor, u32)], p: usize, rel: usize) -> Result<Laurent, CurveError> {
        let gf = &self.field;
        let mut acc = Laurent::from_coeffs(0, one(rel));
        for &(f, e) in den {
            let v = self.factor_valuation(f, p)?;
            let s = self.poly_series(&self.factor_poly(f)?, p, v + rel as i64)?;
            debug_assert_eq!(s.valuation(), Some(v));
            acc = acc.mul(gf, &s.pow(gf, e));
        }
        Ok(acc)
    }

    /// Laurent expansion of `f` at a point in the fixed local parameter,
    /// known below `t^prec`.
    pub fn local_expansion(&self, f: &RationalFunction, p: usize, prec: i64) -> Result<Laurent, CurveError> {
        let gf = &self.field;
        if f.is_zero() {
            return Ok(Laurent::zero_to(prec));
        }
        let v_h = self.den_valuation(&f.den, p)?;
        let probe = self.local_coords(p, 0)?;
        let s_min = f.num.terms().map(|(i, j, _)| self.shift_at(&probe, i, j)).min().unwrap();
        let g = self.poly_series(&f.num, p, prec + v_h)?;
        let rel = (prec + v_h - s_min).max(1) as usize;
        let h_inv = self.den_series(&f.den, p, rel)?.inv(gf).expect("factor series are exact");
        let out = g.mul(gf, &h_inv).truncate(prec);
        debug_assert!(out.abs_prec() >= prec);
        if out.is_indeterminate() {
            return Err(CurveError::IndeterminateValuation { precision: prec });
        }
        Ok(out)
    }

    /// Order of vanishing of a polynomial at an affine point.
    fn poly_valuation_affine(&self, g: &Poly2, p: usize) -> Result<i64, CurveError> {
        // a nonzero g has at most wdeg(g) zeros counted with multiplicity
        let bound = self.weighted_degree(g).ok_or(CurveError::ZeroFunction)? as i64 + 1;
        let mut prec = 4;
        loop {
            let s = self.poly_series(g, p, prec)?;
            if let Some(v) = s.valuation() {
                return Ok(v);
            }
            if prec > bound {
                unreachable!("nonzero polynomial vanishing beyond its degree");
            }
            prec *= 2;
        }
    }

    /// `v_P(f)`: at infinity by the monomial rule, elsewhere from the series.
    pub fn valuation(&self, f: &RationalFunction, p: usize) -> Result<i64, CurveError> {
        if f.is_zero() {
            return Err(CurveError::ZeroFunction);
        }
        let v_num = match self.point(p)? {
            Point::Infinity => -(self.weighted_degree(&f.num).unwrap() as i64),
            Point::Affine { .. } => self.poly_valuation_affine(&f.num, p)?,
        };
        Ok(v_num - self.den_valuation(&f.den, p)?)
    }

    /// The principal divisor of `f`, restricted to rational points.
    pub fn principal_divisor(&self, f: &RationalFunction) -> Result<Divisor, CurveError> {
        let mut d = Divisor::zero();
        for p in 0..self.points.len() {
            d.add_point(p, self.valuation(f, p)?);
        }
        Ok(d)
    }

    // -- Riemann-Roch ----------------------------------------------------------

    pub fn canonical_divisor(&self) -> Divisor {
        match self.kind {
            CurveKind::ProjectiveLine => Divisor::point(self.infinity(), -2),
            CurveKind::Hermitian { .. } => Divisor::point(self.infinity(), 2 * self.genus as i64 - 2),
        }
    }

    /// Denominator clearing the affine poles allowed by `D`. Each fiber
    /// `x = a` gets either one vertical power or tangent powers at its
    /// points, whichever adds the smaller pole order at infinity.
    fn clearing_denominator(&self, d: &Divisor) -> Vec<(Factor, u32)> {
        let mut by_fiber: BTreeMap<Fe, Vec<(usize, i64)>> = BTreeMap::new();
        for (p, m) in d.support() {
            if let (Point::Affine { x, .. }, true) = (self.points[p], m > 0) {
                by_fiber.entry(x).or_default().push((p, m));
            }
        }
        let mut den = Vec::new();
        for (a, pts) in by_fiber {
            let max_m = pts.iter().map(|&(_, m)| m).max().unwrap() as u64;
            let vertical_cost = self.x_pole * max_m;
            let tangent_cost: u64 = match self.kind {
                CurveKind::ProjectiveLine => u64::MAX,
                CurveKind::Hermitian { .. } => {
                    pts.iter().map(|&(_, m)| self.y_pole * (m as u64).div_ceil(self.y_pole)).sum()
                }
            };
            if tangent_cost < vertical_cost {
                for (p, m) in pts {
                    den.push((Factor::Tangent(p), (m as u64).div_ceil(self.y_pole) as u32));
                }
            } else {
                den.push((Factor::Vertical(a), max_m as u32));
            }
        }
        den
    }

    /// Basis of `L(D)`. `extra` multiplies the clearing denominator by
    /// further factors; the space does not depend on them.
    pub fn riemann_roch(&self, d: &Divisor, extra: &[Factor]) -> Result<RiemannRochSpace, CurveError> {
        self.check_divisor(d)?;
        for &f in extra {
            self.factor_poly(f)?;
        }
        let gf = &self.field;
        let den = merge_den(self.clearing_denominator(d).into_iter().chain(extra.iter().map(|&f| (f, 1))));
        let bound = d.mult(self.infinity()) + self.den_pole(&den);
        let mut out = RiemannRochSpace { den: den.clone(), bound, monomials: Vec::new(), coords: Vec::new(), basis: Vec::new() };
        if bound < 0 {
            return Ok(out);
        }
        let mut monomials: Vec<(usize, usize)> = Vec::new();
        for j in 0..self.y_terms {
            let mut i = 0;
            while self.weight(i, j) <= bound as u64 {
                monomials.push((i, j));
                i += 1;
            }
        }
        monomials.sort_by_key(|&(i, j)| (self.weight(i, j), j));

        // v_P(g) >= v_P(h) - v_P(D) at affine points where that is positive
        let mut candidates: BTreeSet<usize> = d.support().map(|(p, _)| p).collect();
        for &(f, _) in &den {
            candidates.extend(self.factor_zeros(f));
        }
        let mut conditions = Matrix::zeros(0, monomials.len());
        for p in candidates {
            if self.points[p] == Point::Infinity {
                continue;
            }
            let r = self.den_valuation(&den, p)? - d.mult(p);
            if r <= 0 {
                continue;
            }
            let table = self.monomial_series(p, &monomials, r)?;
            for e in 0..r as usize {
                let row: Vec<Fe> = table.iter().map(|(_, s)| s[e]).collect();
                conditions.push_row(&row);
            }
        }
        let coords = conditions.nullspace(gf);
        out.basis = coords
            .iter()
            .map(|c| {
                let num = Poly2::from_terms(
                    monomials.iter().zip(c).filter(|(_, x)| !x.is_zero()).map(|(&(i, j), &x)| (i, j, x)),
                    gf,
                );
                RationalFunction { num, den: den.clone() }
            })
            .collect();
        out.monomials = monomials;
        out.coords = coords;
        Ok(out)
    }

    pub fn riemann_roch_basis(&self, d: &Divisor) -> Result<Vec<RationalFunction>, CurveError> {
        Ok(self.riemann_roch(d, &[])?.basis)
    }

    /// `l(D) = dim L(D)`.
    pub fn l_dim(&self, d: &Divisor) -> Result<usize, CurveError> {
        if d.degree() < 0 {
            self.check_divisor(d)?;
            return Ok(0);
        }
        Ok(self.riemann_roch(d, &[])?.dim())
    }

    /// Twisted value `(t^v f)(P)`: the coefficient of `t^-v` in the
    /// expansion of `f`, which must satisfy `v_P(f) >= -v`.
    pub fn twisted_value(&self, f: &RationalFunction, p: usize, v: i64) -> Result<Fe, CurveError> {
        let s = self.local_expansion(f, p, -v + 1).or_else(|e| match e {
            CurveError::IndeterminateValuation { .. } => Ok(Laurent::zero_to(-v + 1)),
            other => Err(other),
        })?;
        if let Some(found) = s.valuation().filter(|&val| val < -v) {
            return Err(CurveError::NotInSpace { point: p, found, required: -v });
        }
        Ok(s.coeff(-v).unwrap())
    }

    /// Linear map `g ↦ (t^v g/h)(P)` on the monomial basis, for a shared
    /// denominator `h`. At infinity only the monomial of weight
    /// `v + pole(h)` contributes, with its own coefficient, since `x`, `y`
    /// and every factor have leading coefficient 1 there.
    pub fn twisted_functional(
        &self,
        monomials: &[(usize, usize)],
        den: &[(Factor, u32)],
        p: usize,
        v: i64,
    ) -> Result<Vec<Fe>, CurveError> {
        let gf = &self.field;
        if self.point(p)? == Point::Infinity {
            let target = v + self.den_pole(den);
            return Ok(monomials
                .iter()
                .map(|&(i, j)| if self.weight(i, j) as i64 == target { Fe::ONE } else { Fe::ZERO })
                .collect());
        }
        let e = -v;
        let v_h = self.den_valuation(den, p)?;
        // affine monomials have nonnegative valuation
        let need = e + v_h + 1;
        if need <= 0 {
            return Ok(vec![Fe::ZERO; monomials.len()]);
        }
        let table = self.monomial_series(p, monomials, need)?;
        let h_inv = self.den_series(den, p, need as usize)?.inv(gf).expect("exact factors");
        Ok(table
            .iter()
            .map(|(_, ser)| {
                // coefficient of t^e in ser * h_inv, h_inv starting at t^-v_h
                let mut acc = Fe::ZERO;
                for (a, &m) in ser.iter().enumerate() {
                    if let Some(c) = h_inv.coeff(e - a as i64) {
                        acc = gf.mul_add(acc, m, c);
                    }
                }
                acc
            })
            .collect())
    }

    /// A random divisor of the given degree on at most four points, with
    /// multiplicities in `[-3, 3]` away from the balancing point.
    pub fn random_divisor<R: Rng>(&self, rng: &mut R, degree: i64) -> Divisor {
        let s = rng.gen_range(1..=4.min(self.points.len()));
        let mut pts: Vec<usize> = Vec::new();
        while pts.len() < s {
            let p = rng.gen_range(0..self.points.len());
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        let mut d = Divisor::zero();
        let mut rest = degree;
        for &p in &pts[..s - 1] {
            let m = rng.gen_range(-3..=3);
            d.add_point(p, m);
            rest -= m;
        }
        d.add_point(pts[s - 1], rest);
        d
    }

    /// Random element of a Riemann-Roch space.
    pub fn random_element<R: Rng>(&self, rng: &mut R, space: &RiemannRochSpace) -> RationalFunction {
        let gf = &self.field;
        let mut num = Poly2::zero();
        for f in &space.basis {
            let c = Fe::from_encoding(rng.gen_range(0..gf.q()));
            num = self.poly_add(&num, &self.poly_scale(&f.num, c));
        }
        RationalFunction { num, den: space.den.clone() }
    }
}
