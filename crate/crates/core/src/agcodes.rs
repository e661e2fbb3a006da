//! Generalized Goppa evaluation codes `C(G, D)` and the divisor searches
//! that make them intersecting.
//!
//! `C(G, D)` is the image of `L(D)` under `f ↦ ((t_i^{v_i} f)(P_i))_i` with
//! `v_i = v_{P_i}(D)`. The supports of `G` and `D` may overlap; the twist by
//! `t_i^{v_i}` keeps every coordinate finite. The kernel is `L(D - G)`, and
//! `l(2D - G) = 0` certifies that the code is intersecting.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codes::{Code, CodeError, Word};
use crate::curves::{Curve, CurveError, Divisor, Point, RationalFunction, RiemannRochSpace};
use crate::gf::Fe;
use crate::matrix::independent_rows;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgError {
    #[error("evaluation point {0} appears twice in G")]
    RepeatedPoint(usize),
    #[error("G has {n} points but the curve has only {available}")]
    TooManyPoints { n: usize, available: usize },
    #[error("G must contain at least one point")]
    EmptyG,
    #[error("deg(D) = {deg} must be below n = {n}")]
    DegreeTooLarge { deg: i64, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no admissible point among {0} candidates; the counting bound was violated")]
    Exhausted(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Evaluation points `P_1..P_n` (point indices, distinct) and the divisor `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCodeSpec {
    g_points: Vec<usize>,
    d: Divisor,
}

impl EvalCodeSpec {
    pub fn new(curve: &Curve, g_points: Vec<usize>, d: Divisor) -> Result<EvalCodeSpec, AgError> {
        if g_points.is_empty() {
            return Err(AgError::EmptyG);
        }
        if g_points.len() > curve.num_points() {
            return Err(AgError::TooManyPoints { n: g_points.len(), available: curve.num_points() });
        }
        let mut seen = vec![false; curve.num_points()];
        for &p in &g_points {
            curve.point(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(AgError::RepeatedPoint(p));
            }
        }
        curve.check_divisor(&d)?;
        Ok(EvalCodeSpec { g_points, d })
    }

    pub fn g_points(&self) -> &[usize] {
        &self.g_points
    }

    pub fn d(&self) -> &Divisor {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.g_points.len()
    }

    pub fn g_divisor(&self) -> Divisor {
        Divisor::reduced(&self.g_points)
    }

    pub fn with_divisor(&self, d: Divisor) -> EvalCodeSpec {
        EvalCodeSpec { g_points: self.g_points.clone(), d }
    }
}

/// The first `n` points in canonical order.
pub fn first_points(curve: &Curve, n: usize) -> Result<Vec<usize>, AgError> {
    if n > curve.num_points() {
        return Err(AgError::TooManyPoints { n, available: curve.num_points() });
    }
    Ok((0..n).collect())
}

/// `((t_i^{v_i} f)(P_i))_i`; fails if `f ∉ L(D)` at some `P_i`.
pub fn evaluate_phi(curve: &Curve, spec: &EvalCodeSpec, f: &RationalFunction) -> Result<Word, AgError> {
    spec.g_points
        .par_iter()
        .map(|&p| Ok(curve.twisted_value(f, p, spec.d.mult(p))?))
        .collect()
}

/// A built evaluation code with the functions behind its generator rows.
#[derive(Clone, Debug)]
pub struct EvalCode {
    pub code: Code,
    pub space: RiemannRochSpace,
    /// Basis functions of `L(D)` whose images form the generator rows.
    pub row_functions: Vec<usize>,
}

impl EvalCode {
    pub fn dim(&self) -> usize {
        self.row_functions.len()
    }

    pub fn row_function(&self, r: usize) -> &RationalFunction {
        &self.space.basis[self.row_functions[r]]
    }
}

/// Images of a basis of `L(D)` with the kernel `L(D - G)` removed.
pub fn build_code(curve: &Curve, spec: &EvalCodeSpec) -> Result<EvalCode, AgError> {
    let gf = curve.field();
    let space = curve.riemann_roch(&spec.d, &[])?;
    let n = spec.n();
    // column i of the evaluation map on the monomial basis
    let functionals: Vec<Vec<Fe>> = spec
        .g_points
        .par_iter()
        .map(|&p| curve.twisted_functional(&space.monomials, &space.den, p, spec.d.mult(p)))
        .collect::<Result<_, _>>()?;
    let images: Vec<Word> = space
        .coords
        .par_iter()
        .map(|c| {
            functionals
                .iter()
                .map(|col| c.iter().zip(col).fold(Fe::ZERO, |acc, (&a, &b)| gf.mul_add(acc, a, b)))
                .collect()
        })
        .collect();
    let keep = independent_rows(gf, &images, n);
    let rows = keep.iter().map(|&i| images[i].clone()).collect();
    let code = Code::linear(gf.clone(), n, rows)?;
    Ok(EvalCode { code, space, row_functions: keep })
}

/// Checks `φ_D(f) ⊙ φ_D'(f') = φ_{D+D'}(f f')` coordinatewise.
pub fn product_compat_check(
    curve: &Curve,
    spec: &EvalCodeSpec,
    spec2: &EvalCodeSpec,
    f: &RationalFunction,
    f2: &RationalFunction,
) -> Result<bool, AgError> {
    if spec.g_points != spec2.g_points {
        return Err(AgError::Precondition("both codes must share G".into()));
    }
    let gf = curve.field();
    let a = evaluate_phi(curve, spec, f)?;
    let b = evaluate_phi(curve, spec2, f2)?;
    let sum = spec.with_divisor(&spec.d + &spec2.d);
    let c = evaluate_phi(curve, &sum, &curve.function_mul(f, f2))?;
    Ok(a.iter().zip(&b).zip(&c).all(|((&x, &y), &z)| gf.mul(x, y) == z))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XingCertificate {
    pub deg_d: i64,
    pub deg_2dg: i64,
    pub l_2dg: usize,
    pub certified: bool,
}

/// Computes `l(2D - G)` exactly; zero certifies that `C(G, D)` is intersecting.
pub fn xing_check(curve: &Curve, spec: &EvalCodeSpec) -> Result<XingCertificate, AgError> {
    let deg_d = spec.d.degree();
    if deg_d >= spec.n() as i64 {
        return Err(AgError::DegreeTooLarge { deg: deg_d, n: spec.n() });
    }
    let a = &spec.d.scale(2) - &spec.g_divisor();
    let l = curve.l_dim(&a)?;
    Ok(XingCertificate { deg_d, deg_2dg: a.degree(), l_2dg: l, certified: l == 0 })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BadPointMode {
    /// `l(A + P) > 0`
    Single,
    /// `l(A + 2P) > 0`
    Double,
}

impl BadPointMode {
    fn step(self) -> i64 {
        match self {
            BadPointMode::Single => 1,
            BadPointMode::Double => 2,
        }
    }

    /// Largest admissible `deg(A)` relative to the genus.
    fn max_degree(self, genus: i64) -> i64 {
        genus - 1 - self.step()
    }
}

fn check_admissible(curve: &Curve, a: &Divisor, mode: BadPointMode) -> Result<(), AgError> {
    let g = curve.genus() as i64;
    if a.degree() > mode.max_degree(g) {
        return Err(AgError::Precondition(format!(
            "deg(A) = {} exceeds g - {} = {}",
            a.degree(),
            mode.step() + 1,
            mode.max_degree(g)
        )));
    }
    if curve.l_dim(a)? != 0 {
        return Err(AgError::Precondition("l(A) must be 0".into()));
    }
    Ok(())
}

fn is_good(curve: &Curve, a: &Divisor, p: usize, mode: BadPointMode) -> Result<bool, AgError> {
    Ok(curve.l_dim(&(a + &Divisor::point(p, mode.step())))? == 0)
}

fn find_point(curve: &Curve, a: &Divisor, candidates: &[usize], mode: BadPointMode) -> Result<usize, AgError> {
    check_admissible(curve, a, mode)?;
    let hit = candidates
        .par_iter()
        .map(|&p| is_good(curve, a, p, mode).map(|ok| ok.then_some(p)))
        .find_map_first(|r| match r {
            Ok(Some(p)) => Some(Ok(p)),
            Ok(None) => None,
            Err(e) => Some(Err(e)),
        });
    hit.unwrap_or(Err(AgError::Exhausted(candidates.len())))
}

/// First candidate `P` with `l(A + P) = 0`; at most `g` points fail.
pub fn find_point_simple(curve: &Curve, a: &Divisor, candidates: &[usize]) -> Result<usize, AgError> {
    find_point(curve, a, candidates, BadPointMode::Single)
}

/// First candidate `P` with `l(A + 2P) = 0`; at most `4g` points fail.
pub fn find_point_double(curve: &Curve, a: &Divisor, candidates: &[usize]) -> Result<usize, AgError> {
    find_point(curve, a, candidates, BadPointMode::Double)
}

/// Number of rational points failing the condition, by full enumeration.
pub fn count_bad_points(curve: &Curve, a: &Divisor, mode: BadPointMode) -> Result<usize, AgError> {
    check_admissible(curve, a, mode)?;
    let bad: Result<Vec<bool>, AgError> =
        (0..curve.num_points()).into_par_iter().map(|p| is_good(curve, a, p, mode).map(|ok| !ok)).collect();
    Ok(bad?.into_iter().filter(|&b| b).count())
}

/// The point every search starts from: the first in canonical order.
pub fn base_point(curve: &Curve) -> usize {
    debug_assert!(curve.points()[0] != Point::Infinity);
    0
}

/// `D` of degree `⌊(n+g-1)/2⌋` with `l(2D - G) = 0`, grown from
/// `⌊(n-1)/2⌋ P₀` one point at a time.
pub fn main_divisor_search(curve: &Curve, g_points: &[usize]) -> Result<Divisor, AgError> {
    let g = curve.genus();
    if curve.num_points() <= 4 * g {
        return Err(AgError::Precondition(format!(
            "need more than 4g = {} rational points, have {}",
            4 * g,
            curve.num_points()
        )));
    }
    let spec = EvalCodeSpec::new(curve, g_points.to_vec(), Divisor::zero())?;
    let n = spec.n() as i64;
    let gdiv = spec.g_divisor();
    let p0 = base_point(curve);
    let mut d = Divisor::point(p0, (n - 1) / 2);
    let target = (n + g as i64 - 1) / 2;
    let all: Vec<usize> = (0..curve.num_points()).collect();
    while d.degree() < target {
        let a = &d.scale(2) - &gdiv;
        let p = find_point_double(curve, &a, &all)?;
        d.add_point(p, 1);
    }
    debug_assert_eq!(curve.l_dim(&(&d.scale(2) - &gdiv))?, 0);
    Ok(d)
}

#[derive(Clone, Debug)]
pub struct IntersectingCode {
    pub spec: EvalCodeSpec,
    pub code: EvalCode,
    pub certificate: XingCertificate,
}

/// `C(G, D)` on the first `n` points with `D` from [`main_divisor_search`].
pub fn build_intersecting(curve: &Curve, n: usize) -> Result<IntersectingCode, AgError> {
    let g = curve.genus();
    if n <= g {
        return Err(AgError::Precondition(format!("n = {n} must exceed g = {g}")));
    }
    let g_points = first_points(curve, n)?;
    let d = main_divisor_search(curve, &g_points)?;
    let spec = EvalCodeSpec::new(curve, g_points, d)?;
    let certificate = xing_check(curve, &spec)?;
    let code = build_code(curve, &spec)?;
    Ok(IntersectingCode { spec, code, certificate })
}

#[derive(Clone, Debug)]
pub struct CodePair {
    pub spec: EvalCodeSpec,
    pub spec2: EvalCodeSpec,
    pub code: EvalCode,
    pub code2: EvalCode,
    /// `l(D + D' - G)`, zero by construction.
    pub l_sum: usize,
}

/// Mutually intersecting `C(G, D)`, `C(G, D')` with `deg D = m` and
/// `deg D' = n + g - 1 - m`.
pub fn construct_pair(curve: &Curve, g_points: &[usize], m: usize) -> Result<CodePair, AgError> {
    let g = curve.genus();
    let n = g_points.len();
    if n <= g || m < g || m >= n {
        return Err(AgError::Precondition(format!("need n > g and g <= m < n (n = {n}, g = {g}, m = {m})")));
    }
    let base = EvalCodeSpec::new(curve, g_points.to_vec(), Divisor::zero())?;
    let gdiv = base.g_divisor();
    let p0 = base_point(curve);
    let d = Divisor::point(p0, m as i64);
    let mut d2 = Divisor::point(p0, (n - 1 - m) as i64);
    let all: Vec<usize> = (0..curve.num_points()).collect();
    for _ in 0..g {
        let a = &(&d + &d2) - &gdiv;
        let p = find_point_simple(curve, &a, &all)?;
        d2.add_point(p, 1);
    }
    let l_sum = curve.l_dim(&(&(&d + &d2) - &gdiv))?;
    let spec = base.with_divisor(d);
    let spec2 = base.with_divisor(d2);
    let code = build_code(curve, &spec)?;
    let code2 = build_code(curve, &spec2)?;
    Ok(CodePair { spec, spec2, code, code2, l_sum })
}
