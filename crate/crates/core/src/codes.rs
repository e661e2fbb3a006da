//! Code containers, the Hamming metric, and verifiers for (2,1)-separation
//! and the (mutually) intersecting support property.
//!
//! A code is (2,1)-separating when no codeword lies metrically between two
//! others: for distinct `x, y, z` there is a coordinate with
//! `y_i ∉ {x_i, z_i}`. All exhaustive checkers reduce this to bitmask
//! tests: with `d(x, y)` the mask of coordinates where `x` and `y` differ,
//! `y` separates `x` from `z` iff `d(x, y) & d(z, y) != 0`.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::{Fe, Gf};
use crate::matrix::Matrix;

pub type Word = Vec<Fe>;

pub const DEFAULT_TRIPLE_CAP: u64 = 1 << 24;
pub const DEFAULT_PAIR_CAP: u64 = 1 << 22;
/// Largest code the enumerating operations will materialize.
pub const WORD_CAP: u128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("code length must be at least 1")]
    EmptyLength,
    #[error("codeword {0} is repeated")]
    DuplicateWord(usize),
    #[error("symbol {sym} out of range for GF({q})")]
    SymbolOutOfRange { sym: u32, q: u32 },
    #[error("generator rows are linearly dependent (rank {rank} < {rows})")]
    DependentRows { rank: usize, rows: usize },
    #[error("{what} count {count} exceeds cap {cap}; use the sampled variant or raise the cap")]
    CapExceeded { what: &'static str, count: u128, cap: u128 },
    #[error("operation requires a binary code")]
    NotBinary,
    #[error("operation requires a linear code")]
    NotLinear,
    #[error("codes are over different fields or lengths")]
    Incompatible,
}

/// Enumeration caps for the exhaustive checkers.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub triples: u64,
    pub pairs: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { triples: DEFAULT_TRIPLE_CAP, pairs: DEFAULT_PAIR_CAP }
    }
}

impl Caps {
    /// Defaults overridden by `TRIPLE_CAP` / `PAIR_CAP` when set.
    pub fn from_env() -> Caps {
        let read = |key: &str, default: u64| {
            std::env::var(key).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(default)
        };
        Caps { triples: read("TRIPLE_CAP", DEFAULT_TRIPLE_CAP), pairs: read("PAIR_CAP", DEFAULT_PAIR_CAP) }
    }

    pub fn unlimited() -> Caps {
        Caps { triples: u64::MAX, pairs: u64::MAX }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeBody {
    Listed(Vec<Word>),
    /// Generator matrix with linearly independent rows.
    Linear(Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    field: Gf,
    n: usize,
    body: CodeBody,
}

impl Code {
    pub fn listed(field: Gf, n: usize, words: Vec<Word>) -> Result<Code, CodeError> {
        if n == 0 {
            return Err(CodeError::EmptyLength);
        }
        let mut seen = std::collections::HashSet::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.len() != n {
                return Err(CodeError::LengthMismatch(w.len(), n));
            }
            check_symbols(&field, w)?;
            if !seen.insert(w) {
                return Err(CodeError::DuplicateWord(i));
            }
        }
        Ok(Code { field, n, body: CodeBody::Listed(words) })
    }

    /// A linear code from generator rows; zero rows gives the zero code.
    pub fn linear(field: Gf, n: usize, rows: Vec<Word>) -> Result<Code, CodeError> {
        if n == 0 {
            return Err(CodeError::EmptyLength);
        }
        for r in &rows {
            if r.len() != n {
                return Err(CodeError::LengthMismatch(r.len(), n));
            }
            check_symbols(&field, r)?;
        }
        let k = rows.len();
        let gen = Matrix::from_rows(rows, n);
        let rank = gen.rank(&field);
        if rank < k {
            return Err(CodeError::DependentRows { rank, rows: k });
        }
        Ok(Code { field, n, body: CodeBody::Linear(gen) })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.size() == Some(0)
    }

    pub fn body(&self) -> &CodeBody {
        &self.body
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.body, CodeBody::Linear(_))
    }

    pub fn generator(&self) -> Option<&Matrix> {
        match &self.body {
            CodeBody::Linear(g) => Some(g),
            CodeBody::Listed(_) => None,
        }
    }

    /// Dimension of a linear code.
    pub fn dim(&self) -> Option<usize> {
        self.generator().map(|g| g.rows())
    }

    /// Number of codewords, or `None` if it does not fit in a u128.
    pub fn size(&self) -> Option<u128> {
        match &self.body {
            CodeBody::Listed(w) => Some(w.len() as u128),
            CodeBody::Linear(g) => (self.field.q() as u128).checked_pow(g.rows() as u32),
        }
    }

    pub fn log2_size(&self) -> f64 {
        match &self.body {
            CodeBody::Listed(w) => (w.len() as f64).log2(),
            CodeBody::Linear(g) => g.rows() as f64 * (self.field.q() as f64).log2(),
        }
    }

    /// Codeword for a message vector (linear codes only).
    pub fn encode(&self, msg: &[Fe]) -> Result<Word, CodeError> {
        let g = self.generator().ok_or(CodeError::NotLinear)?;
        if msg.len() != g.rows() {
            return Err(CodeError::LengthMismatch(msg.len(), g.rows()));
        }
        Ok(g.left_mul(&self.field, msg))
    }

    /// All codewords. Linear codes are listed in base-q message order,
    /// message coordinate 0 varying fastest.
    pub fn codewords(&self) -> Result<Vec<Word>, CodeError> {
        match &self.body {
            CodeBody::Listed(w) => Ok(w.clone()),
            CodeBody::Linear(_) => {
                let size = self.size().unwrap_or(u128::MAX);
                if size > WORD_CAP {
                    return Err(CodeError::CapExceeded { what: "codeword", count: size, cap: WORD_CAP });
                }
                let k = self.dim().unwrap();
                let q = self.field.q();
                Ok((0..size as u64)
                    .map(|idx| {
                        let msg = index_to_message(idx, q, k);
                        self.encode(&msg).unwrap()
                    })
                    .collect())
            }
        }
    }

    /// log2|C| / n.
    pub fn rate_bits(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.log2_size() / self.n as f64
    }

    /// log_q|C| / n.
    pub fn rate_q(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.log2_size() / (self.field.q() as f64).log2() / self.n as f64
    }

    /// k/n in lowest terms, for linear codes.
    pub fn rate_q_exact(&self) -> Option<(u64, u64)> {
        let k = self.dim()? as u64;
        let n = self.n as u64;
        let g = gcd(k, n);
        Some((k / g, n / g))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn check_symbols(field: &Gf, w: &[Fe]) -> Result<(), CodeError> {
    match w.iter().find(|s| s.encoding() >= field.q()) {
        Some(s) => Err(CodeError::SymbolOutOfRange { sym: s.encoding(), q: field.q() }),
        None => Ok(()),
    }
}

pub(crate) fn index_to_message(mut idx: u64, q: u32, k: usize) -> Vec<Fe> {
    let mut msg = Vec::with_capacity(k);
    for _ in 0..k {
        msg.push(Fe::from_encoding((idx % q as u64) as u32));
        idx /= q as u64;
    }
    msg
}

pub fn hamming_distance(x: &[Fe], y: &[Fe]) -> Result<usize, CodeError> {
    if x.len() != y.len() {
        return Err(CodeError::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

pub fn support(w: &[Fe]) -> Vec<usize> {
    w.iter().enumerate().filter(|(_, s)| !s.is_zero()).map(|(i, _)| i).collect()
}

/// Seeded generator shared by every sampled checker.
pub fn rng_from_seed(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Verdicts

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Mode {
    /// Every triple or pair of codewords.
    Exhaustive,
    /// Every split of the coordinates into two parts, via ranks of
    /// punctured generator matrices.
    ExhaustivePartition,
    Sampled { trials: u64, seed: u64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exhaustive => write!(f, "exhaustive"),
            Mode::ExhaustivePartition => write!(f, "exhaustive-partition"),
            Mode::Sampled { trials, seed } => write!(f, "sampled({trials}, seed {seed})"),
        }
    }
}

/// `y` lies between `x` and `z`: no coordinate has `y_i ∉ {x_i, z_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleWitness {
    /// Codeword indices (x, y, z), when the words come from a list.
    pub indices: Option<[usize; 3]>,
    pub x: Word,
    pub y: Word,
    pub z: Word,
}

/// Two nonzero codewords with disjoint supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub a: Word,
    pub b: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<W> {
    pub mode: Mode,
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    fn pass(mode: Mode) -> Self {
        Verdict { mode, witness: None }
    }
}

// ---------------------------------------------------------------------------
// Bit masks

/// Fixed-width rows of packed bits.
struct BitRows {
    stride: usize,
    data: Vec<u64>,
}

impl BitRows {
    fn new(rows: usize, bits: usize) -> BitRows {
        let stride = bits.div_ceil(64).max(1);
        BitRows { stride, data: vec![0; rows * stride] }
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn set(&mut self, i: usize, bit: usize) {
        self.data[i * self.stride + bit / 64] |= 1 << (bit % 64);
    }

    #[inline]
    fn meets(&self, i: usize, j: usize) -> bool {
        self.row(i).iter().zip(self.row(j)).any(|(a, b)| a & b != 0)
    }
}

fn support_masks(words: &[Word], n: usize) -> BitRows {
    let mut m = BitRows::new(words.len(), n);
    for (i, w) in words.iter().enumerate() {
        for (c, s) in w.iter().enumerate() {
            if !s.is_zero() {
                m.set(i, c);
            }
        }
    }
    m
}

pub fn triple_count(m: u128) -> u128 {
    if m < 3 {
        0
    } else {
        m * (m - 1) * (m - 2) / 2
    }
}

// ---------------------------------------------------------------------------
// (2,1)-separation

/// Some coordinate has `y_i ∉ {x_i, z_i}`.
pub fn separates(x: &[Fe], y: &[Fe], z: &[Fe]) -> bool {
    x.iter().zip(y).zip(z).any(|((a, b), c)| b != a && b != c)
}

/// Exhaustive (2,1)-separation check.
///
/// Triples are visited with the middle word `y` outermost, then unordered
/// `{x, z}` with `x < z` lexicographically by index; the reported witness
/// is the first failure in that order.
pub fn check_sep21(code: &Code, caps: Caps) -> Result<Verdict<TripleWitness>, CodeError> {
    let size = code.size().unwrap_or(u128::MAX);
    let triples = triple_count(size);
    if triples > caps.triples as u128 {
        return Err(CodeError::CapExceeded { what: "triple", count: triples, cap: caps.triples as u128 });
    }
    let words = code.codewords()?;
    let m = words.len();
    let n = code.len();
    let hit = (0..m).into_par_iter().find_map_first(|y| {
        let mut masks = BitRows::new(m, n);
        for (x, w) in words.iter().enumerate() {
            for c in 0..n {
                if w[c] != words[y][c] {
                    masks.set(x, c);
                }
            }
        }
        for x in (0..m).filter(|&x| x != y) {
            for z in (x + 1..m).filter(|&z| z != y) {
                if !masks.meets(x, z) {
                    return Some([x, y, z]);
                }
            }
        }
        None
    });
    Ok(Verdict {
        mode: Mode::Exhaustive,
        witness: hit.map(|[x, y, z]| TripleWitness {
            indices: Some([x, y, z]),
            x: words[x].clone(),
            y: words[y].clone(),
            z: words[z].clone(),
        }),
    })
}

/// Random distinct triples; a failure is conclusive, a pass is not.
pub fn check_sep21_sampled(code: &Code, trials: u64, seed: u64) -> Result<Verdict<TripleWitness>, CodeError> {
    let mode = Mode::Sampled { trials, seed };
    let mut rng = rng_from_seed(seed);
    match &code.body {
        CodeBody::Listed(words) => {
            let m = words.len();
            if m < 3 {
                return Ok(Verdict::pass(mode));
            }
            for _ in 0..trials {
                let [x, y, z] = distinct_indices(&mut rng, m);
                if !separates(&words[x], &words[y], &words[z]) {
                    return Ok(Verdict {
                        mode,
                        witness: Some(TripleWitness {
                            indices: Some([x, y, z]),
                            x: words[x].clone(),
                            y: words[y].clone(),
                            z: words[z].clone(),
                        }),
                    });
                }
            }
            Ok(Verdict::pass(mode))
        }
        CodeBody::Linear(g) => {
            if code.size().is_some_and(|s| s < 3) {
                return Ok(Verdict::pass(mode));
            }
            let k = g.rows();
            for _ in 0..trials {
                let msgs = distinct_messages(&mut rng, code.field(), k);
                let [x, y, z] = msgs.map(|m| code.encode(&m).unwrap());
                if !separates(&x, &y, &z) {
                    return Ok(Verdict { mode, witness: Some(TripleWitness { indices: None, x, y, z }) });
                }
            }
            Ok(Verdict::pass(mode))
        }
    }
}

fn distinct_indices(rng: &mut SplitMix64, m: usize) -> [usize; 3] {
    let x = rng.gen_range(0..m);
    let mut y = rng.gen_range(0..m);
    while y == x {
        y = rng.gen_range(0..m);
    }
    let mut z = rng.gen_range(0..m);
    while z == x || z == y {
        z = rng.gen_range(0..m);
    }
    [x, y, z]
}

pub(crate) fn random_message(rng: &mut SplitMix64, gf: &Gf, k: usize) -> Vec<Fe> {
    (0..k).map(|_| Fe::from_encoding(rng.gen_range(0..gf.q()))).collect()
}

fn random_nonzero_message(rng: &mut SplitMix64, gf: &Gf, k: usize) -> Vec<Fe> {
    loop {
        let m = random_message(rng, gf, k);
        if m.iter().any(|s| !s.is_zero()) {
            return m;
        }
    }
}

fn distinct_messages(rng: &mut SplitMix64, gf: &Gf, k: usize) -> [Vec<Fe>; 3] {
    let a = random_message(rng, gf, k);
    let mut b = random_message(rng, gf, k);
    while b == a {
        b = random_message(rng, gf, k);
    }
    let mut c = random_message(rng, gf, k);
    while c == a || c == b {
        c = random_message(rng, gf, k);
    }
    [a, b, c]
}

/// Problem A* form: with words read as support sets, no distinct
/// `A, B, C` satisfy `A ∩ B ⊆ C ⊆ A ∪ B`. Same visiting order as
/// [`check_sep21`] with `C` in the middle position.
pub fn check_set_system(code: &Code, caps: Caps) -> Result<Verdict<TripleWitness>, CodeError> {
    if code.field().q() != 2 {
        return Err(CodeError::NotBinary);
    }
    let size = code.size().unwrap_or(u128::MAX);
    let triples = triple_count(size);
    if triples > caps.triples as u128 {
        return Err(CodeError::CapExceeded { what: "triple", count: triples, cap: caps.triples as u128 });
    }
    let words = code.codewords()?;
    let sets = support_masks(&words, code.len());
    let m = words.len();
    let hit = (0..m).into_par_iter().find_map_first(|c| {
        let sc = sets.row(c);
        for a in (0..m).filter(|&a| a != c) {
            let sa = sets.row(a);
            for b in (a + 1..m).filter(|&b| b != c) {
                let sb = sets.row(b);
                let between = sa.iter().zip(sb).zip(sc).all(|((&wa, &wb), &wc)| {
                    let meet_inside = (wa & wb) & !wc == 0;
                    let inside_join = wc & !(wa | wb) == 0;
                    meet_inside && inside_join
                });
                if between {
                    return Some([a, c, b]);
                }
            }
        }
        None
    });
    Ok(Verdict {
        mode: Mode::Exhaustive,
        witness: hit.map(|[x, y, z]| TripleWitness {
            indices: Some([x, y, z]),
            x: words[x].clone(),
            y: words[y].clone(),
            z: words[z].clone(),
        }),
    })
}

/// `{ d(x, y) : x != y }`.
pub fn distance_set(code: &Code, caps: Caps) -> Result<BTreeSet<usize>, CodeError> {
    let size = code.size().unwrap_or(u128::MAX);
    let pairs = size.saturating_mul(size.saturating_sub(1)) / 2;
    if pairs > caps.pairs as u128 {
        return Err(CodeError::CapExceeded { what: "pair", count: pairs, cap: caps.pairs as u128 });
    }
    let words = code.codewords()?;
    let out = (0..words.len())
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, i| {
            for j in i + 1..words.len() {
                acc.insert(hamming_distance(&words[i], &words[j]).unwrap());
            }
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Intersecting property

/// Number of projective points `(q^k - 1)/(q - 1)`.
pub fn projective_count(q: u32, k: usize) -> u128 {
    let q = q as u128;
    match q.checked_pow(k as u32) {
        Some(v) => (v - 1) / (q - 1),
        None => u128::MAX,
    }
}

/// Messages whose first nonzero coordinate is 1, in base-q order.
fn projective_messages(q: u32, k: usize) -> Vec<Vec<Fe>> {
    let total = (q as u64).pow(k as u32);
    (1..total)
        .map(|idx| index_to_message(idx, q, k))
        .filter(|m| m.iter().find(|s| !s.is_zero()).is_some_and(|s| *s == Fe::ONE))
        .collect()
}

fn require_linear(code: &Code) -> Result<&Matrix, CodeError> {
    code.generator().ok_or(CodeError::NotLinear)
}

/// A nonzero codeword vanishing on every coordinate outside `inside`, if any.
fn codeword_supported_in(code: &Code, inside: &[bool]) -> Option<Word> {
    let g = code.generator()?;
    let outside: Vec<usize> = (0..code.len()).filter(|&c| !inside[c]).collect();
    // messages m with m * G_outside = 0: the left null space of G_outside
    let punctured = g.select_columns(&outside);
    let transposed = transpose(&punctured);
    let ns = transposed.nullspace(code.field());
    ns.into_iter().next().map(|msg| code.encode(&msg).unwrap())
}

fn transpose(m: &Matrix) -> Matrix {
    let mut t = Matrix::zeros(m.cols(), m.rows());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            t.set(c, r, m.get(r, c));
        }
    }
    t
}

fn has_nonzero_word_within(g: &Matrix, gf: &Gf, inside: u64, n: usize) -> bool {
    let outside: Vec<usize> = (0..n).filter(|&c| inside >> c & 1 == 0).collect();
    g.select_columns(&outside).rank(gf) < g.rows()
}

/// Exact intersecting check. Uses representative pairs when their count
/// fits the pair cap, otherwise coordinate splits when `2^(n-1)` fits it.
pub fn check_intersecting(code: &Code, caps: Caps) -> Result<Verdict<PairWitness>, CodeError> {
    let g = require_linear(code)?;
    let k = g.rows();
    if k <= 1 {
        return Ok(Verdict::pass(Mode::Exhaustive));
    }
    let reps = projective_count(code.field().q(), k);
    let pairs = reps.saturating_mul(reps.saturating_add(1)) / 2;
    if pairs <= caps.pairs as u128 {
        return Ok(intersecting_by_pairs(code, code, true));
    }
    let n = code.len();
    if n <= 63 && (1u128 << (n - 1)) <= caps.pairs as u128 {
        return Ok(mutual_by_partition(code, code, true));
    }
    Err(CodeError::CapExceeded { what: "pair", count: pairs, cap: caps.pairs as u128 })
}

/// Exact check that every nonzero `c ∈ a`, `c' ∈ b` share a coordinate.
pub fn check_mutually_intersecting(a: &Code, b: &Code, caps: Caps) -> Result<Verdict<PairWitness>, CodeError> {
    let ga = require_linear(a)?;
    let gb = require_linear(b)?;
    if a.field() != b.field() || a.len() != b.len() {
        return Err(CodeError::Incompatible);
    }
    if ga.rows() == 0 || gb.rows() == 0 {
        return Ok(Verdict::pass(Mode::Exhaustive));
    }
    let q = a.field().q();
    let pairs = projective_count(q, ga.rows()).saturating_mul(projective_count(q, gb.rows()));
    if pairs <= caps.pairs as u128 {
        return Ok(intersecting_by_pairs(a, b, false));
    }
    let n = a.len();
    if n <= 62 && (1u128 << n) <= caps.pairs as u128 {
        return Ok(mutual_by_partition(a, b, false));
    }
    Err(CodeError::CapExceeded { what: "pair", count: pairs, cap: caps.pairs as u128 })
}

fn intersecting_by_pairs(a: &Code, b: &Code, same: bool) -> Verdict<PairWitness> {
    let q = a.field().q();
    let words_a: Vec<Word> =
        projective_messages(q, a.dim().unwrap()).iter().map(|m| a.encode(m).unwrap()).collect();
    let words_b: Vec<Word> = if same {
        words_a.clone()
    } else {
        projective_messages(q, b.dim().unwrap()).iter().map(|m| b.encode(m).unwrap()).collect()
    };
    let mut all = words_a.clone();
    all.extend(words_b.iter().cloned());
    let masks = support_masks(&all, a.len());
    let offset = words_a.len();
    let hit = (0..words_a.len()).into_par_iter().find_map_first(|i| {
        let start = if same { i + 1 } else { 0 };
        (start..words_b.len()).find(|&j| !masks.meets(i, offset + j)).map(|j| (i, j))
    });
    Verdict {
        mode: Mode::Exhaustive,
        witness: hit.map(|(i, j)| PairWitness { a: words_a[i].clone(), b: words_b[j].clone() }),
    }
}

/// `a` and `b` fail to be mutually intersecting iff the coordinates split
/// into `S ⊔ T` with a nonzero word of `a` inside `S` and one of `b`
/// inside `T`.
fn mutual_by_partition(a: &Code, b: &Code, same: bool) -> Verdict<PairWitness> {
    let n = a.len();
    let gf = a.field();
    let (ga, gb) = (a.generator().unwrap(), b.generator().unwrap());
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    // for a single code the split is unordered: pin coordinate 0 into S
    let count: u64 = if same { 1 << (n - 1) } else { 1 << n };
    let hit = (0..count).into_par_iter().find_map_first(|idx| {
        let s = if same { (idx << 1) | 1 } else { idx };
        let t = full & !s;
        let ok = has_nonzero_word_within(ga, gf, s, n) && has_nonzero_word_within(gb, gf, t, n);
        ok.then_some(s)
    });
    let witness = hit.map(|s| {
        let in_s: Vec<bool> = (0..n).map(|c| s >> c & 1 == 1).collect();
        let in_t: Vec<bool> = in_s.iter().map(|x| !x).collect();
        PairWitness {
            a: codeword_supported_in(a, &in_s).expect("rank deficit gives a word"),
            b: codeword_supported_in(b, &in_t).expect("rank deficit gives a word"),
        }
    });
    Verdict { mode: Mode::ExhaustivePartition, witness }
}

/// Random nonzero codeword pairs; conclusive only on failure.
pub fn check_intersecting_sampled(code: &Code, trials: u64, seed: u64) -> Result<Verdict<PairWitness>, CodeError> {
    check_mutually_intersecting_sampled(code, code, trials, seed)
}

pub fn check_mutually_intersecting_sampled(
    a: &Code,
    b: &Code,
    trials: u64,
    seed: u64,
) -> Result<Verdict<PairWitness>, CodeError> {
    let ka = require_linear(a)?.rows();
    let kb = require_linear(b)?.rows();
    if a.field() != b.field() || a.len() != b.len() {
        return Err(CodeError::Incompatible);
    }
    let mode = Mode::Sampled { trials, seed };
    if ka == 0 || kb == 0 {
        return Ok(Verdict::pass(mode));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let x = a.encode(&random_nonzero_message(&mut rng, a.field(), ka)).unwrap();
        let y = b.encode(&random_nonzero_message(&mut rng, b.field(), kb)).unwrap();
        if !x.iter().zip(&y).any(|(u, v)| !u.is_zero() && !v.is_zero()) {
            return Ok(Verdict { mode, witness: Some(PairWitness { a: x, b: y }) });
        }
    }
    Ok(Verdict::pass(mode))
}
