//! Anti-canonical cycles of rational curves and their Zariski decompositions.
//!
//! A [`CycleConfig`] records the self-intersections of the components
//! `C₁, …, C_m` of a cycle; adjacent components meet once (twice when
//! `m = 2`), and `m = 1` is a rational curve with one node whose
//! self-intersection is the whole `C²`. The anti-canonical divisor is the
//! all-ones divisor `C = ΣCᵢ`.
//!
//! Indices are 0-based throughout the library.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::pic0::Order;
use crate::qform::{self, DefinitenessKind, QformError, SymMatrix};
use crate::scalar::{common_denominator, Field, RationalField};
use crate::Rational;

/// Largest cycle accepted by [`zariski_oracle`].
pub const ORACLE_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("invalid configuration: {}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("divisor has {found} coefficients, cycle has {expected} components")]
    DivisorLength { expected: usize, found: usize },
    #[error("divisor is not effective")]
    NotEffective,
    #[error("decomposition failed certification: {0}")]
    Certification(String),
    #[error("oracle limited to {limit} components, got {m}")]
    OracleTooLarge { m: usize, limit: usize },
    #[error("oracle found {0} decompositions, expected exactly one")]
    OracleCandidates(usize),
    #[error("nef part is zero, so m0 is undefined")]
    ZeroNefPart,
    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),
    #[error(transparent)]
    Qform(#[from] QformError),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A violated [`CycleConfig`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    EmptyCycle,
    /// The real structure needs `m = 2k`.
    RealLength {
        m: usize,
        k: usize,
    },
    /// `C̄ᵢ² ≠ Cᵢ²`.
    RealityViolated {
        index: usize,
        conjugate: usize,
        self_int: i64,
        conjugate_self_int: i64,
    },
    MissingN,
    NWithoutRealStructure,
    NegativeN(i64),
    /// `C² ≠ 8 − 2n`.
    CanonicalDegree {
        c_squared: i64,
        n: i64,
    },
    Adjunction {
        index: usize,
        found: i64,
        expected: i64,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyCycle => write!(f, "cycle must have at least one component"),
            Diagnostic::RealLength { m, k } => {
                write!(f, "real structure with k = {k} needs {} components, found {m}", 2 * k)
            }
            Diagnostic::RealityViolated { index, conjugate, self_int, conjugate_self_int } => write!(
                f,
                "reality violated: component {} has self-intersection {self_int} but its conjugate {} has {conjugate_self_int}",
                index + 1,
                conjugate + 1
            ),
            Diagnostic::MissingN => write!(f, "real configuration must record n"),
            Diagnostic::NWithoutRealStructure => write!(f, "n is only meaningful with a real structure"),
            Diagnostic::NegativeN(n) => write!(f, "n must be non-negative, got {n}"),
            Diagnostic::CanonicalDegree { c_squared, n } => {
                write!(f, "C^2 = {c_squared} but 8 - 2n = {}", 8 - 2 * n)
            }
            Diagnostic::Adjunction { index, found, expected } => write!(
                f,
                "adjunction fails at component {}: C.C_i = {found}, expected {expected}",
                index + 1
            ),
        }
    }
}

/// Conjugation `Cᵢ ↔ C̄ᵢ` on a cycle laid out as `C₁…C_k C̄₁…C̄_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RealStructure {
    pub k: usize,
}

impl RealStructure {
    pub fn conjugate(&self, i: usize) -> usize {
        (i + self.k) % (2 * self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleConfig {
    self_ints: Vec<i64>,
    real: Option<RealStructure>,
    n: Option<i64>,
}

impl CycleConfig {
    /// A cycle without real structure.
    pub fn new(self_ints: Vec<i64>) -> Self {
        Self {
            self_ints,
            real: None,
            n: None,
        }
    }

    /// A real cycle `C₁…C_k C̄₁…C̄_k` with the conjugates mirroring `half`.
    pub fn real(half: &[i64], n: i64) -> Self {
        let mut self_ints = half.to_vec();
        self_ints.extend_from_slice(half);
        Self {
            self_ints,
            real: Some(RealStructure { k: half.len() }),
            n: Some(n),
        }
    }

    /// Unchecked constructor; use [`CycleConfig::validate`] afterwards.
    pub fn from_parts(self_ints: Vec<i64>, real: Option<RealStructure>, n: Option<i64>) -> Self {
        Self { self_ints, real, n }
    }

    pub fn m(&self) -> usize {
        self.self_ints.len()
    }

    pub fn self_ints(&self) -> &[i64] {
        &self.self_ints
    }

    pub fn real_structure(&self) -> Option<RealStructure> {
        self.real
    }

    pub fn is_real(&self) -> bool {
        self.real.is_some()
    }

    pub fn k(&self) -> Option<usize> {
        self.real.map(|r| r.k)
    }

    pub fn stored_n(&self) -> Option<i64> {
        self.n
    }

    /// Same self-intersections with the real structure and `n` removed.
    pub fn without_reality(&self) -> Self {
        Self::new(self.self_ints.clone())
    }

    /// Intersection number `CᵢCⱼ`.
    pub fn intersection(&self, i: usize, j: usize) -> i64 {
        let m = self.m();
        if i == j {
            return self.self_ints[i];
        }
        match m {
            2 => 2,
            _ if (i + 1) % m == j || (j + 1) % m == i => 1,
            _ => 0,
        }
    }

    pub fn intersection_matrix(&self) -> SymMatrix {
        SymMatrix::from_fn(self.m(), |i, j| self.intersection(i, j))
    }

    /// `C² = K²`.
    pub fn c_squared(&self) -> i64 {
        (0..self.m())
            .map(|i| (0..self.m()).map(|j| self.intersection(i, j)).sum::<i64>())
            .sum()
    }

    /// `C·Cᵢ`.
    pub fn c_dot(&self, i: usize) -> i64 {
        (0..self.m()).map(|j| self.intersection(i, j)).sum()
    }

    pub fn validate(&self) -> Result<(), Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let m = self.m();
        if m == 0 {
            return Err(vec![Diagnostic::EmptyCycle]);
        }
        if let Some(real) = self.real {
            if m != 2 * real.k || real.k == 0 {
                diags.push(Diagnostic::RealLength { m, k: real.k });
            } else {
                for i in 0..real.k {
                    let j = real.conjugate(i);
                    if self.self_ints[i] != self.self_ints[j] {
                        diags.push(Diagnostic::RealityViolated {
                            index: i,
                            conjugate: j,
                            self_int: self.self_ints[i],
                            conjugate_self_int: self.self_ints[j],
                        });
                    }
                }
            }
            if self.n.is_none() {
                diags.push(Diagnostic::MissingN);
            }
        } else if self.n.is_some() {
            diags.push(Diagnostic::NWithoutRealStructure);
        }
        if let Some(n) = self.n {
            if n < 0 {
                diags.push(Diagnostic::NegativeN(n));
            }
            let c2 = self.c_squared();
            if c2 != 8 - 2 * n {
                diags.push(Diagnostic::CanonicalDegree { c_squared: c2, n });
            }
        }
        for i in 0..m {
            // smooth rational components have C·Cᵢ = Cᵢ² + 2; the nodal
            // curve has arithmetic genus one, so C·C₁ = C₁²
            let expected = if m == 1 {
                self.self_ints[0]
            } else {
                self.self_ints[i] + 2
            };
            let found = self.c_dot(i);
            if found != expected {
                diags.push(Diagnostic::Adjunction {
                    index: i,
                    found,
                    expected,
                });
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(diags)
        }
    }

    /// Stored `n`, or `(8 − C²)/2` when that is an integer.
    pub fn ambient_n(&self) -> Option<i64> {
        if self.n.is_some() {
            return self.n;
        }
        let diff = 8 - self.c_squared();
        (diff % 2 == 0).then_some(diff / 2)
    }

    /// Relabels so that component `shift` becomes the first one.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut self_ints = self.self_ints.clone();
        if !self_ints.is_empty() {
            self_ints.rotate_left(shift % self.m());
        }
        Self {
            self_ints,
            real: self.real,
            n: self.n,
        }
    }

    fn checked(&self) -> Result<(), CycleError> {
        self.validate().map_err(CycleError::Invalid)
    }
}

impl fmt::Display for CycleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let selfs: Vec<String> = self.self_ints.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", selfs.join(", "))?;
        if let Some(r) = self.real {
            write!(f, " real k={}", r.k)?;
        }
        if let Some(n) = self.n {
            write!(f, " n={n}")?;
        }
        Ok(())
    }
}

/// Divisor `Σ rᵢCᵢ` supported on the cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Divisor<T>(pub Vec<T>);

impl<T: Field> Divisor<T> {
    /// The anti-canonical cycle `C` itself.
    pub fn canonical(m: usize) -> Self {
        Divisor(vec![T::one(); m])
    }

    pub fn zero(m: usize) -> Self {
        Divisor(vec![T::zero(); m])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn scaled(&self, s: &T) -> Self {
        Divisor(self.0.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Divisor(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        Divisor(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }
}

impl<T: fmt::Display> fmt::Display for Divisor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Certified Zariski decomposition `D = P + N` of a divisor on the cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub p: Divisor<T>,
    pub n_part: Divisor<T>,
    /// `P²`.
    pub d: T,
    /// `P·Cᵢ` for every component.
    pub p_dot: Vec<T>,
    /// Components with nonzero coefficient in `N`, ascending.
    pub support: Vec<usize>,
}

impl<T: Field> Decomposition<T> {
    pub fn p_is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// `P ≠ 0` and `P² = 0`.
    pub fn is_degenerate_nef(&self) -> bool {
        !self.p_is_zero() && self.d.is_zero()
    }
}

impl<Q: RationalField> Decomposition<Q> {
    /// `m₀` (least positive integer with `m₀P` integral) and the
    /// coefficients of `m₀P`.
    pub fn m0_coefficients(&self) -> Result<(Q::Int, Vec<Q::Int>), CycleError> {
        if self.p_is_zero() {
            return Err(CycleError::ZeroNefPart);
        }
        let m0 = common_denominator(self.p.coeffs());
        let scale = Q::from_int(m0.clone());
        let l = self
            .p
            .coeffs()
            .iter()
            .map(|c| (c.clone() * scale.clone()).numer_int())
            .collect();
        Ok((m0, l))
    }
}

pub fn m0_coefficients<Q: RationalField>(z: &Decomposition<Q>) -> Result<(Q::Int, Vec<Q::Int>), CycleError> {
    z.m0_coefficients()
}

pub fn degree<T: Field>(z: &Decomposition<T>) -> T {
    z.d.clone()
}

pub fn validate(c: &CycleConfig) -> Result<(), Vec<Diagnostic>> {
    c.validate()
}

pub fn intersection_matrix(c: &CycleConfig) -> SymMatrix {
    c.intersection_matrix()
}

pub fn ambient_n(c: &CycleConfig) -> Option<i64> {
    c.ambient_n()
}

/// Zariski decomposition of the anti-canonical cycle.
pub fn zariski_decompose<T: Field>(c: &CycleConfig) -> Result<Decomposition<T>, CycleError> {
    zariski_decompose_divisor(c, &Divisor::canonical(c.m()))
}

/// Zariski decomposition of an effective divisor supported on the cycle.
///
/// The negative support grows one component at a time, always the least
/// index with `(D − N)·Cⱼ < 0`, re-solving `(D − N)·Cᵢ = 0` on the support
/// after every addition. The result is certified before it is returned.
pub fn zariski_decompose_divisor<T: Field>(c: &CycleConfig, d: &Divisor<T>) -> Result<Decomposition<T>, CycleError> {
    c.checked()?;
    check_divisor(c, d)?;
    let mat = c.intersection_matrix();
    let m = c.m();
    let md = mat.apply(d.coeffs());

    let mut support: Vec<usize> = Vec::new();
    let mut n_part = Divisor::zero(m);
    loop {
        let p = d.sub(&n_part);
        let p_dot = mat.apply(p.coeffs());
        let Some(j) = (0..m).find(|j| !support.contains(j) && p_dot[*j].is_negative()) else {
            break;
        };
        support.push(j);
        support.sort_unstable();
        let rhs: Vec<T> = support.iter().map(|&i| md[i].clone()).collect();
        let x = qform::solve_linear(&mat, &support, &rhs).map_err(|e| match e {
            QformError::Singular => CycleError::Certification(format!(
                "singular intersection matrix on support {}",
                one_based(&support)
            )),
            other => CycleError::Qform(other),
        })?;
        n_part = Divisor::zero(m);
        for (&i, v) in support.iter().zip(x) {
            n_part.0[i] = v;
        }
    }
    certify(&mat, d, n_part)
}

fn one_based(idx: &[usize]) -> String {
    let v: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn check_divisor<T: Field>(c: &CycleConfig, d: &Divisor<T>) -> Result<(), CycleError> {
    if d.len() != c.m() {
        return Err(CycleError::DivisorLength {
            expected: c.m(),
            found: d.len(),
        });
    }
    if d.coeffs().iter().any(|x| x.is_negative()) {
        return Err(CycleError::NotEffective);
    }
    Ok(())
}

/// Checks the three defining conditions and fills in the derived data.
fn certify<T: Field>(mat: &SymMatrix, d: &Divisor<T>, n_part: Divisor<T>) -> Result<Decomposition<T>, CycleError> {
    let p = d.sub(&n_part);
    if n_part.coeffs().iter().any(|x| x.is_negative()) {
        return Err(CycleError::Certification(format!(
            "negative part {n_part} is not effective"
        )));
    }
    if p.coeffs().iter().any(|x| x.is_negative()) {
        return Err(CycleError::Certification(format!("nef part {p} is not effective")));
    }
    let p_dot = mat.apply(p.coeffs());
    if let Some(i) = p_dot.iter().position(|x| x.is_negative()) {
        return Err(CycleError::Certification(format!("P.C_{} = {} < 0", i + 1, p_dot[i])));
    }
    let support: Vec<usize> = (0..d.len()).filter(|&i| !n_part.0[i].is_zero()).collect();
    if !support.is_empty() {
        let sub = mat.submatrix(&support)?;
        if qform::classify::<T>(&sub) != DefinitenessKind::NegativeDefinite {
            return Err(CycleError::Certification(format!(
                "support {} of N is not negative definite",
                one_based(&support)
            )));
        }
        if let Some(&i) = support.iter().find(|&&i| !p_dot[i].is_zero()) {
            return Err(CycleError::Certification(format!(
                "P.C_{} = {} on the support of N",
                i + 1,
                p_dot[i]
            )));
        }
    }
    let d_val = p
        .coeffs()
        .iter()
        .zip(&p_dot)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
    Ok(Decomposition {
        p,
        n_part,
        d: d_val,
        p_dot,
        support,
    })
}

/// Independent Zariski decomposition by enumerating every candidate support.
///
/// For each subset `S` whose intersection matrix passes Sylvester's criterion
/// the candidate `N` is obtained by Cramer's rule; the candidate is kept if
/// `N > 0` on `S`, `P = D − N ≥ 0` and `P` is nef. Exactly one candidate must
/// survive.
pub fn zariski_oracle(c: &CycleConfig) -> Result<Decomposition<Rational>, CycleError> {
    zariski_oracle_divisor(c, &Divisor::canonical(c.m()))
}

pub fn zariski_oracle_divisor(c: &CycleConfig, d: &Divisor<Rational>) -> Result<Decomposition<Rational>, CycleError> {
    c.checked()?;
    check_divisor(c, d)?;
    let m = c.m();
    if m > ORACLE_LIMIT {
        return Err(CycleError::OracleTooLarge { m, limit: ORACLE_LIMIT });
    }
    let mat = c.intersection_matrix();
    let scale = common_denominator(d.coeffs());
    let d_int: Vec<BigInt> = d.coeffs().iter().map(|x| x.numer() * (&scale / x.denom())).collect();
    let md: Vec<BigInt> = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from(mat.get(i, j)) * &d_int[j]).sum())
        .collect();

    let mut found: Vec<Divisor<Rational>> = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let s: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let mut n_part = Divisor::<Rational>::zero(m);
        if !s.is_empty() {
            let block: Vec<Vec<BigInt>> = s
                .iter()
                .map(|&i| s.iter().map(|&j| BigInt::from(mat.get(i, j))).collect())
                .collect();
            if !sylvester_negative_definite(&block) {
                continue;
            }
            let det = qform::determinant(&block);
            let mut positive = true;
            for (col, &i) in s.iter().enumerate() {
                let mut replaced = block.clone();
                for (row, &r) in s.iter().enumerate() {
                    replaced[row][col] = md[r].clone();
                }
                let x = Rational::new(qform::determinant(&replaced), det.clone() * &scale);
                if !x.is_positive() {
                    positive = false;
                    break;
                }
                n_part.0[i] = x;
            }
            if !positive {
                continue;
            }
        }
        let p = d.sub(&n_part);
        if p.coeffs().iter().any(|x| x.is_negative()) {
            continue;
        }
        if mat.apply(p.coeffs()).iter().any(|x| x.is_negative()) {
            continue;
        }
        found.push(n_part);
    }
    if found.len() != 1 {
        return Err(CycleError::OracleCandidates(found.len()));
    }
    certify(&mat, d, found.pop().expect("one candidate"))
}

fn sylvester_negative_definite(block: &[Vec<BigInt>]) -> bool {
    (1..=block.len()).all(|k| {
        let lead: Vec<Vec<BigInt>> = block[..k].iter().map(|r| r[..k].iter().map(|v| -v).collect()).collect();
        qform::determinant(&lead).is_positive()
    })
}

/// Anti-Kodaira dimension class of a surface carrying the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kodaira {
    Zero,
    One,
    Two,
    /// `P ≠ 0`, `P² = 0`: decided by the order of `m₀P|_C`.
    NeedsOrder,
}

impl Kodaira {
    pub fn as_str(self) -> &'static str {
        match self {
            Kodaira::Zero => "zero",
            Kodaira::One => "one",
            Kodaira::Two => "two",
            Kodaira::NeedsOrder => "needs_order",
        }
    }

    pub fn value(self) -> Option<u8> {
        match self {
            Kodaira::Zero => Some(0),
            Kodaira::One => Some(1),
            Kodaira::Two => Some(2),
            Kodaira::NeedsOrder => None,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_from_decomposition<T: Field>(z: &Decomposition<T>, order: Option<&Order>) -> Kodaira {
    if z.p_is_zero() {
        Kodaira::Zero
    } else if z.d.is_positive() {
        Kodaira::Two
    } else {
        match order {
            Some(Order::Finite(_)) => Kodaira::One,
            Some(Order::Infinite) => Kodaira::Zero,
            None => Kodaira::NeedsOrder,
        }
    }
}

pub fn classify_kodaira(c: &CycleConfig, order: Option<&Order>) -> Result<Kodaira, CycleError> {
    let z = zariski_decompose::<Rational>(c)?;
    Ok(classify_from_decomposition(&z, order))
}

/// `χ(D) = 1 + (D² + D·C)/2` on a rational surface with `K = −C`.
pub fn riemann_roch_chi(c: &CycleConfig, d: &Divisor<Rational>) -> Result<BigInt, CycleError> {
    c.checked()?;
    if d.len() != c.m() {
        return Err(CycleError::DivisorLength {
            expected: c.m(),
            found: d.len(),
        });
    }
    if let Some(i) = d.coeffs().iter().position(|x| !x.is_integer()) {
        return Err(CycleError::InvalidDivisor(format!(
            "coefficient {} of component {} is not an integer",
            d.0[i],
            i + 1
        )));
    }
    let mat = c.intersection_matrix();
    let dd = mat.pair(d.coeffs(), d.coeffs());
    let dc = mat.pair(d.coeffs(), Divisor::<Rational>::canonical(c.m()).coeffs());
    let twice = (dd + dc).to_integer();
    if twice.is_odd() {
        return Err(CycleError::InvalidDivisor(format!("D^2 + D.C = {twice} is odd")));
    }
    Ok(BigInt::one() + twice / 2)
}
