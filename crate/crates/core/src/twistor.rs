//! Pencils of fundamental divisors and the resolved threefold model.
//!
//! A [`TwistorPencil`] is the combinatorial shadow of a twistor space over
//! `nℂℙ²` whose fundamental system is a pencil: the base curve (a real cycle
//! or a smooth elliptic curve), the restriction `𝒫_λ` of `m₀P` to the base
//! curve along the pencil, and a choice of small resolution at each
//! conjugate pair of nodes.
//!
//! The resolved model records the cycle `𝒞` of `2k + 2` rational curves cut
//! out on `E` by the reducible fibre over `λ₁`, the `f₁`-fibres of every
//! `Eⱼ` over `λ₁`, and the degrees of `ℳ(r, ρ) = f₁*𝒪(r) + ρ·m₀𝑷` on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::config::{BaseSpec, ConfigFile};
use crate::cycles::{
    classify_from_decomposition, riemann_roch_chi, zariski_decompose, CycleConfig, CycleError, Decomposition,
    Diagnostic, Divisor, Kodaira,
};
use crate::pic0::{FamilyProfile, Order, Pic0Error, PicZeroFamily};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TwistorError {
    #[error("invalid pencil: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<PencilDiagnostic>),
    #[error("operation needs a cycle base")]
    NotCycleBase,
    #[error("nef part P is zero")]
    NefPartZero,
    #[error("P^2 = {0}, expected 0")]
    PositiveDegree(Rational),
    #[error("resolved model needs k >= 2, got k = {0}")]
    KTooSmall(usize),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("operation needs the family of restrictions, none given")]
    FamilyRequired,
    #[error("family must be constant of finite order, found {0}")]
    FamilyNotConstantFinite(String),
    #[error("r must be non-negative, got {0}")]
    NegativeR(i64),
    #[error("nu must be positive, got {0}")]
    NonPositiveNu(i64),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Pic0(#[from] Pic0Error),
}

/// A violated [`TwistorPencil`] invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PencilDiagnostic {
    NTooSmall(i64),
    NotReal,
    Cycle(Diagnostic),
    ResolutionLength { expected: usize, found: usize },
    EllipticFamilyNonconstant,
    DegenerateFamily,
}

impl fmt::Display for PencilDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PencilDiagnostic::NTooSmall(n) => write!(f, "n must be at least 4, got {n}"),
            PencilDiagnostic::NotReal => {
                write!(f, "cycle base must carry a real structure (use `self`)")
            }
            PencilDiagnostic::Cycle(d) => d.fmt(f),
            PencilDiagnostic::ResolutionLength { expected, found } => {
                write!(f, "resolution needs {expected} bits, found {found}")
            }
            PencilDiagnostic::EllipticFamilyNonconstant => {
                write!(
                    f,
                    "elliptic base: the normal bundle is a single element, `nonconstant` is meaningless"
                )
            }
            PencilDiagnostic::DegenerateFamily => {
                write!(f, "nonconstant family needs at least two distinct samples")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    Cycle(CycleConfig),
    /// Smooth elliptic base curve; the pencil's family is its normal bundle.
    SmoothElliptic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistorPencil {
    n: i64,
    base: Base,
    family: Option<PicZeroFamily>,
    resolution: Vec<bool>,
}

impl TwistorPencil {
    /// Checked constructor; a missing resolution defaults to all zeros.
    pub fn new(
        n: i64,
        base: Base,
        family: Option<PicZeroFamily>,
        resolution: Option<Vec<bool>>,
    ) -> Result<Self, TwistorError> {
        let mut diags = Vec::new();
        if n < 4 {
            diags.push(PencilDiagnostic::NTooSmall(n));
        }
        let k = match &base {
            Base::Cycle(c) => {
                if let Err(ds) = c.validate() {
                    diags.extend(ds.into_iter().map(PencilDiagnostic::Cycle));
                }
                match c.k() {
                    Some(k) => k,
                    None => {
                        diags.push(PencilDiagnostic::NotReal);
                        0
                    }
                }
            }
            Base::SmoothElliptic => {
                if matches!(family, Some(PicZeroFamily::Nonconstant { .. })) {
                    diags.push(PencilDiagnostic::EllipticFamilyNonconstant);
                }
                0
            }
        };
        let resolution = resolution.unwrap_or_else(|| vec![false; k]);
        if resolution.len() != k {
            diags.push(PencilDiagnostic::ResolutionLength {
                expected: k,
                found: resolution.len(),
            });
        }
        if let Some(f) = &family {
            if f.profile().is_err() {
                diags.push(PencilDiagnostic::DegenerateFamily);
            }
        }
        if !diags.is_empty() {
            return Err(TwistorError::Invalid(diags));
        }
        Ok(Self {
            n,
            base,
            family,
            resolution,
        })
    }

    pub fn from_config(file: &ConfigFile) -> Result<Self, TwistorError> {
        match &file.base {
            BaseSpec::Cycle(c) => {
                let Some(n) = c.stored_n() else {
                    let mut diags = vec![PencilDiagnostic::NotReal];
                    if let Err(ds) = c.validate() {
                        diags.extend(ds.into_iter().map(PencilDiagnostic::Cycle));
                    }
                    return Err(TwistorError::Invalid(diags));
                };
                Self::new(n, Base::Cycle(c.clone()), file.family.clone(), file.resolution.clone())
            }
            BaseSpec::Elliptic { n } => Self::new(*n, Base::SmoothElliptic, file.family.clone(), None),
        }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn family(&self) -> Option<&PicZeroFamily> {
        self.family.as_ref()
    }

    pub fn resolution(&self) -> &[bool] {
        &self.resolution
    }

    pub fn cycle(&self) -> Result<&CycleConfig, TwistorError> {
        match &self.base {
            Base::Cycle(c) => Ok(c),
            Base::SmoothElliptic => Err(TwistorError::NotCycleBase),
        }
    }

    pub fn k(&self) -> Option<usize> {
        match &self.base {
            Base::Cycle(c) => c.k(),
            Base::SmoothElliptic => None,
        }
    }

    fn profile(&self) -> Result<Option<FamilyProfile>, TwistorError> {
        Ok(self.family.as_ref().map(|f| f.profile()).transpose()?)
    }
}

/// Label of a base-cycle component in the real layout, 0-based index.
fn component_label(i: usize, k: usize) -> String {
    if i < k {
        format!("C_{}", i + 1)
    } else {
        format!("Cbar_{}", i - k + 1)
    }
}

/// One reducible member `Sᵢ⁺ + Sᵢ⁻` of the pencil.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberDescriptor {
    pub index: usize,
    pub s_plus: String,
    pub s_minus: String,
    /// Real twistor line through `Cᵢ ∩ C_{i+1}` and its conjugate.
    pub line: String,
    /// Cycle components on `Sᵢ⁺`.
    pub plus_half: Vec<String>,
    /// Cycle components on `Sᵢ⁻`.
    pub minus_half: Vec<String>,
}

/// The `k` reducible members, one per conjugate pair of nodes.
///
/// Member `i` splits the cycle at the node `Cᵢ ∩ C_{i+1}` and its conjugate:
/// `Sᵢ⁺` carries `C_{i+1}, …, C̄ᵢ` and `Sᵢ⁻` the conjugate chain.
pub fn reducible_fibers(p: &TwistorPencil) -> Vec<FiberDescriptor> {
    let Base::Cycle(c) = &p.base else {
        return Vec::new();
    };
    let k = c.k().expect("validated pencil is real");
    let m = 2 * k;
    (0..k)
        .map(|i| {
            let plus: Vec<String> = (1..=k).map(|s| component_label((i + s) % m, k)).collect();
            let minus: Vec<String> = (1..=k).map(|s| component_label((i + k + s) % m, k)).collect();
            FiberDescriptor {
                index: i + 1,
                s_plus: format!("S_{}^+", i + 1),
                s_minus: format!("S_{}^-", i + 1),
                line: format!("L_{}", i + 1),
                plus_half: plus,
                minus_half: minus,
            }
        })
        .collect()
}

/// Least cyclic index `s` with `l[s] > l[s+1]`.
pub fn descent_index(l: &[BigInt]) -> Option<usize> {
    let m = l.len();
    (0..m).find(|&s| l[s] > l[(s + 1) % m])
}

/// `m₀` and `l` of a pencil with `P ≠ 0`, `P² = 0`.
fn degenerate_decomposition(c: &CycleConfig) -> Result<(Decomposition<Rational>, BigInt, Vec<BigInt>), TwistorError> {
    let z = zariski_decompose::<Rational>(c)?;
    if z.p_is_zero() {
        return Err(TwistorError::NefPartZero);
    }
    if !z.d.is_zero() {
        return Err(TwistorError::PositiveDegree(z.d));
    }
    let (m0, l) = z.m0_coefficients()?;
    Ok((z, m0, l))
}

/// Relabels the cycle cyclically, respecting reality, so that `l₁ > l₂`.
pub fn normalize_rotation(p: &TwistorPencil) -> Result<TwistorPencil, TwistorError> {
    let c = p.cycle()?;
    let (_, _, l) = degenerate_decomposition(c)?;
    let k = c.k().expect("validated pencil is real");
    let Some(s) = descent_index(&l) else {
        return Err(TwistorError::InvariantViolation(format!(
            "all coefficients of m0*P are equal ({}), but K^2 = {} forces two distinct values",
            l[0],
            c.c_squared()
        )));
    };
    // l is conjugation invariant, so a descent exists among the first k
    let s = s % k;
    let resolution = (0..k).map(|j| p.resolution[(j + s) % k]).collect();
    Ok(TwistorPencil {
        n: p.n,
        base: Base::Cycle(c.rotated(s)),
        family: p.family.clone(),
        resolution,
    })
}

/// Curves of the resolved fibre over `λ₁`; indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Curve {
    C(usize),
    CBar(usize),
    Delta,
    DeltaBar,
    /// The real twistor line of the first reducible member.
    L,
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::C(i) => write!(f, "C_{{1,{i}}}"),
            Curve::CBar(i) => write!(f, "Cbar_{{1,{i}}}"),
            Curve::Delta => f.write_str("Delta_1"),
            Curve::DeltaBar => f.write_str("Deltabar_1"),
            Curve::L => f.write_str("L_1"),
        }
    }
}

impl Curve {
    pub fn conjugate(self) -> Self {
        match self {
            Curve::C(i) => Curve::CBar(i),
            Curve::CBar(i) => Curve::C(i),
            Curve::Delta => Curve::DeltaBar,
            Curve::DeltaBar => Curve::Delta,
            Curve::L => Curve::L,
        }
    }
}

/// Components `Eⱼ`, `Ēⱼ` of the exceptional divisor `E`; 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExceptionalComponent {
    E(usize),
    EBar(usize),
}

impl fmt::Display for ExceptionalComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExceptionalComponent::E(i) => write!(f, "E_{i}"),
            ExceptionalComponent::EBar(i) => write!(f, "Ebar_{i}"),
        }
    }
}

/// Incidence data of the small resolution over the fibre `λ₁`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedModel {
    k: usize,
    self_ints: Vec<i64>,
    m0: BigInt,
    l: Vec<BigInt>,
    resolution: Vec<bool>,
    cycle: Vec<Curve>,
}

/// Builds the resolved model of a pencil with `P ≠ 0`, `P² = 0` and `k ≥ 2`.
///
/// The labels are normalized first, so `l₁ > l₂` in the result.
pub fn build_resolved_model(p: &TwistorPencil) -> Result<ResolvedModel, TwistorError> {
    let c = p.cycle()?;
    let k = c.k().expect("validated pencil is real");
    degenerate_decomposition(c)?;
    if k < 2 {
        return Err(TwistorError::KTooSmall(k));
    }
    let p = normalize_rotation(p)?;
    let c = p.cycle()?;
    let (_, m0, l) = degenerate_decomposition(c)?;
    let mut cycle = vec![Curve::C(1), Curve::Delta];
    cycle.extend((2..=k).map(Curve::C));
    cycle.push(Curve::CBar(1));
    cycle.push(Curve::DeltaBar);
    cycle.extend((2..=k).map(Curve::CBar));
    Ok(ResolvedModel {
        k,
        self_ints: c.self_ints().to_vec(),
        m0,
        l,
        resolution: p.resolution.clone(),
        cycle,
    })
}

impl ResolvedModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m0(&self) -> &BigInt {
        &self.m0
    }

    pub fn l(&self) -> &[BigInt] {
        &self.l
    }

    pub fn self_ints(&self) -> &[i64] {
        &self.self_ints
    }

    /// Resolution bit at the first node pair.
    pub fn first_bit(&self) -> bool {
        self.resolution[0]
    }

    /// The cycle `𝒞` in adjacency order.
    pub fn cycle(&self) -> &[Curve] {
        &self.cycle
    }

    /// All curves of the model: `𝒞` followed by the line `L₁`.
    pub fn curves(&self) -> Vec<Curve> {
        let mut v = self.cycle.clone();
        v.push(Curve::L);
        v
    }

    pub fn exceptional_components(&self) -> Vec<ExceptionalComponent> {
        (1..=self.k)
            .map(ExceptionalComponent::E)
            .chain((1..=self.k).map(ExceptionalComponent::EBar))
            .collect()
    }

    /// The `f₁`-fibre of a component of `E` over `λ₁`.
    ///
    /// With bit 0 the pair `{S₁⁻, E₂}` is blown up and `Δ₁ ⊂ E₂`; bit 1 is
    /// the mirror with `Δ₁ ⊂ E₁`.
    pub fn fiber(&self, e: ExceptionalComponent) -> Vec<Curve> {
        let special = if self.first_bit() { 1 } else { 2 };
        match e {
            ExceptionalComponent::E(j) if j == special => ordered_pair(Curve::C(j), Curve::Delta, self.first_bit()),
            ExceptionalComponent::EBar(j) if j == special => {
                ordered_pair(Curve::CBar(j), Curve::DeltaBar, self.first_bit())
            }
            ExceptionalComponent::E(j) => vec![Curve::C(j)],
            ExceptionalComponent::EBar(j) => vec![Curve::CBar(j)],
        }
    }

    /// Reducible `f₁`-fibres over `λ₁`.
    pub fn reducible_fibers(&self) -> Vec<(ExceptionalComponent, Vec<Curve>)> {
        self.exceptional_components()
            .into_iter()
            .map(|e| (e, self.fiber(e)))
            .filter(|(_, f)| f.len() > 1)
            .collect()
    }

    fn position(&self, curve: Curve) -> Option<usize> {
        self.cycle.iter().position(|&c| c == curve)
    }

    /// Neighbours of a curve of `𝒞`.
    pub fn neighbours(&self, curve: Curve) -> Vec<Curve> {
        let Some(i) = self.position(curve) else {
            return Vec::new();
        };
        let m = self.cycle.len();
        vec![self.cycle[(i + m - 1) % m], self.cycle[(i + 1) % m]]
    }

    /// `ℳ·C` for the cycle component of a reducible fibre at base index
    /// `i` (0-based), whose other branch meets `E` at base index `j`.
    ///
    /// The self-intersection of the strict transform inside `S₁^±` is
    /// `Cᵢ² + 1`, and `E_j` meets it once.
    fn broken_fibre_degree(&self, i: usize, j: usize, rho: &BigInt) -> BigInt {
        rho * (&self.l[i] * BigInt::from(self.self_ints[i] + 1) + &self.l[j])
    }

    fn base_index(&self, curve: Curve) -> Option<usize> {
        match curve {
            Curve::C(i) => Some(i - 1),
            Curve::CBar(i) => Some(i - 1 + self.k),
            _ => None,
        }
    }
}

fn ordered_pair(c: Curve, delta: Curve, delta_second: bool) -> Vec<Curve> {
    if delta_second {
        vec![c, delta]
    } else {
        vec![delta, c]
    }
}

/// Degrees of `ℳ(r, ρ)` on the curves of `𝒞`.
///
/// A curve forming a whole `f₁`-fibre of some `Eⱼ` is homologous there to
/// the fibre over a smooth member, where `m₀P` has degree zero. In a broken
/// fibre the cycle component is computed from `l` and the
/// self-intersections, and `Δ` takes the opposite value. `L₁` is omitted:
/// its degree is not determined by the model.
pub fn m_class_intersections(model: &ResolvedModel, r: i64, rho: i64) -> BTreeMap<Curve, BigInt> {
    let rho = BigInt::from(rho);
    let m = 2 * model.k;
    // every curve of 𝒞 lies in the fibre over λ₁, so f₁*𝒪(r) contributes r·0
    let pullback = BigInt::from(r) * BigInt::zero();
    let mut out = BTreeMap::new();
    for e in model.exceptional_components() {
        let fibre = model.fiber(e);
        if fibre.len() == 1 {
            out.insert(fibre[0], pullback.clone());
            continue;
        }
        let (curve, delta) = if matches!(fibre[0], Curve::Delta | Curve::DeltaBar) {
            (fibre[1], fibre[0])
        } else {
            (fibre[0], fibre[1])
        };
        let i = model.base_index(curve).expect("cycle component");
        let j = if model.first_bit() {
            (i + m - 1) % m
        } else {
            (i + 1) % m
        };
        let value = &pullback + model.broken_fibre_degree(i, j, &rho);
        out.insert(delta, &pullback - &value);
        out.insert(curve, value);
    }
    out
}

/// Expected degrees on the broken fibres in closed form, `±ρ(l₁ − l₂)`.
pub fn closed_forms(model: &ResolvedModel, rho: i64) -> Vec<(Curve, BigInt)> {
    let gap = BigInt::from(rho) * (&model.l[0] - &model.l[1]);
    let (curve, bar) = if model.first_bit() {
        (Curve::C(1), Curve::CBar(1))
    } else {
        (Curve::C(2), Curve::CBar(2))
    };
    let curve_value = if model.first_bit() { gap.clone() } else { -gap.clone() };
    vec![
        (curve, curve_value.clone()),
        (Curve::Delta, -curve_value.clone()),
        (bar, curve_value.clone()),
        (Curve::DeltaBar, -curve_value),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub step: usize,
    pub hypothesis: String,
    pub evidence: String,
    pub holds: bool,
}

/// A chain of checked numeric hypotheses leading to a conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub name: String,
    pub conclusion: String,
    pub holds: bool,
    pub steps: Vec<DerivationStep>,
}

impl Derivation {
    fn new(name: &str, conclusion: String, hypotheses: Vec<(String, String, bool)>) -> Self {
        let steps: Vec<DerivationStep> = hypotheses
            .into_iter()
            .enumerate()
            .map(|(i, (hypothesis, evidence, holds))| DerivationStep {
                step: i + 1,
                hypothesis,
                evidence,
                holds,
            })
            .collect();
        let holds = steps.iter().all(|s| s.holds);
        Self {
            name: name.to_string(),
            conclusion,
            holds,
            steps,
        }
    }

    /// First failing step, if any.
    pub fn first_failure(&self) -> Option<&DerivationStep> {
        self.steps.iter().find(|s| !s.holds)
    }
}

fn list<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("({})", v.join(", "))
}

fn curve_set(set: &BTreeSet<Curve>, model: &ResolvedModel) -> String {
    list(model.cycle().iter().filter(|c| set.contains(c)))
}

/// Closes `base` under "a degree-0 curve of `𝒞` meeting the base locus lies
/// in it": a section of a degree-0 bundle on `ℙ¹` with a zero vanishes.
fn close_degree_zero(model: &ResolvedModel, degrees: &BTreeMap<Curve, BigInt>, base: &mut BTreeSet<Curve>) {
    loop {
        let next = model.cycle().iter().copied().find(|c| {
            !base.contains(c) && degrees[c].is_zero() && model.neighbours(*c).iter().any(|nb| base.contains(nb))
        });
        match next {
            Some(c) => {
                base.insert(c);
            }
            None => return,
        }
    }
}

/// Derives that `E` is a fixed component of `|ℳ(r, ρ)|` for `ρ > 0`.
///
/// The base locus of any section on `E` is grown from the curves of
/// negative degree, then through degree-0 neighbours, then through broken
/// fibres of total degree 0: if the base locus meets one component of such
/// a fibre away from the other, a non-vertical component through that point
/// would meet every fibre of `Eⱼ`, where the bundle has degree 0 and the
/// section does not vanish. Once all of `𝒞` is covered the section vanishes
/// on a member of `|f₁*𝒪(1)|_E|`, so `H⁰(ℳ(r, ρ)|_E) ≅ H⁰(ℳ(r − 1, ρ)|_E)`
/// for every `r`, and twisting down far enough gives zero.
pub fn prove_e_fixed(model: &ResolvedModel, r: i64, rho: i64) -> Derivation {
    let degrees = m_class_intersections(model, r, rho);
    let negative: BTreeSet<Curve> = degrees
        .iter()
        .filter(|(_, d)| d.is_negative())
        .map(|(c, _)| *c)
        .collect();
    let conclusion = format!("E is a fixed component of |M({r},{rho})|");
    let mut steps = Vec::new();

    let step1 = rho > 0 && !negative.is_empty();
    steps.push((
        "rho > 0 and some curve of the cycle on E has negative M-degree, so it lies in every section's zero locus"
            .to_string(),
        format!(
            "rho = {rho}; negative: {}",
            if negative.is_empty() {
                "none".to_string()
            } else {
                list(negative.iter().map(|c| format!("M.{c} = {}", degrees[c])))
            }
        ),
        step1,
    ));

    let mut base = negative.clone();
    close_degree_zero(model, &degrees, &mut base);
    let zero_curves: BTreeSet<Curve> = model.cycle().iter().copied().filter(|c| degrees[c].is_zero()).collect();
    let chains_covered = zero_curves.iter().all(|c| base.contains(c));
    steps.push((
        "every degree-0 curve of the cycle is reached from the negative curves through degree-0 neighbours".to_string(),
        format!("base locus after propagation: {}", curve_set(&base, model)),
        step1 && chains_covered,
    ));

    let mut fibre_evidence = Vec::new();
    let mut fibre_ok = true;
    loop {
        let mut added = false;
        for (e, fibre) in model.reducible_fibers() {
            let total: BigInt = fibre.iter().map(|c| &degrees[c]).sum();
            if !total.is_zero() {
                fibre_ok = false;
                continue;
            }
            for &a in &fibre {
                if base.contains(&a) {
                    continue;
                }
                let other: Vec<Curve> = fibre.iter().copied().filter(|c| *c != a).collect();
                let touch = model
                    .neighbours(a)
                    .into_iter()
                    .find(|nb| base.contains(nb) && !other.contains(nb));
                if let Some(nb) = touch {
                    base.insert(a);
                    fibre_evidence.push(format!("{a} via fibre of {e} meeting {nb}"));
                    added = true;
                }
            }
        }
        close_degree_zero(model, &degrees, &mut base);
        if !added {
            break;
        }
    }
    let covered = model.cycle().iter().all(|c| base.contains(c));
    steps.push((
        "the broken fibres have total M-degree 0 and the remaining components meet the base locus off the other component"
            .to_string(),
        format!(
            "{}; broken fibre totals zero: {fibre_ok}",
            if fibre_evidence.is_empty() { "no additions".to_string() } else { fibre_evidence.join("; ") }
        ),
        steps.iter().all(|s| s.2) && fibre_ok,
    ));
    steps.push((
        "the whole cycle lies in the zero locus, so restriction to it kills every section and H0(E, M|_E) = 0"
            .to_string(),
        format!("covered {} of {} curves", base.len(), model.cycle().len()),
        steps.iter().all(|s| s.2) && covered,
    ));
    Derivation::new("fixed_component_of_E", conclusion, steps)
}

fn constant_finite_order(p: &TwistorPencil) -> Result<BigInt, TwistorError> {
    match p.profile()? {
        Some(FamilyProfile::ConstantFinite(tau)) => Ok(tau),
        Some(other) => Err(TwistorError::FamilyNotConstantFinite(other.as_str())),
        None => Err(TwistorError::FamilyRequired),
    }
}

/// Projective dimension of `|ℳ(r, ντ)|`, which is `|f₁*𝒪(r)| + ντ·m₀𝑷`.
pub fn pluri_system_dim(p: &TwistorPencil, r: i64, nu: i64) -> Result<i64, TwistorError> {
    constant_finite_order(p)?;
    degenerate_decomposition(p.cycle()?)?;
    if r < 0 {
        return Err(TwistorError::NegativeR(r));
    }
    if nu <= 0 {
        return Err(TwistorError::NonPositiveNu(nu));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    A1,
    A2,
    A3,
    Inconsistent,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::A1 => "a1",
            Verdict::A2 => "a2",
            Verdict::A3 => "a3",
            Verdict::Inconsistent => "inconsistent",
        }
    }

    pub fn algebraic_dimension(self) -> Option<u8> {
        match self {
            Verdict::A1 => Some(1),
            Verdict::A2 => Some(2),
            Verdict::A3 => Some(3),
            Verdict::Inconsistent => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdimReport {
    pub verdict: Verdict,
    /// Short tag of the decision branch taken.
    pub branch: &'static str,
    pub reason: String,
    /// Anti-Kodaira dimension of a generic smooth member.
    pub generic_kodaira: u8,
    pub decomposition: Option<Decomposition<Rational>>,
    pub derivations: Vec<Derivation>,
}

impl AdimReport {
    /// `a ≤ 1 + κ⁻¹` for the generic member.
    pub fn respects_bound(&self) -> bool {
        self.verdict
            .algebraic_dimension()
            .is_none_or(|a| a <= 1 + self.generic_kodaira)
    }
}

fn report(
    verdict: Verdict,
    branch: &'static str,
    reason: &str,
    generic_kodaira: u8,
    decomposition: Option<Decomposition<Rational>>,
) -> AdimReport {
    AdimReport {
        verdict,
        branch,
        reason: reason.to_string(),
        generic_kodaira,
        decomposition,
        derivations: Vec::new(),
    }
}

/// Decides the algebraic dimension of a pencil.
pub fn algebraic_dimension(p: &TwistorPencil) -> Result<AdimReport, TwistorError> {
    let profile = p.profile()?;
    let c = match &p.base {
        Base::SmoothElliptic => {
            if p.n > 4 {
                return Ok(report(
                    Verdict::A1,
                    "elliptic_n_gt_4",
                    "smooth elliptic base with C^2 < 0: h0(mK^-1) = 1 for all m, so kappa^-1 = 0",
                    0,
                    None,
                ));
            }
            return match profile {
                Some(FamilyProfile::ConstantFinite(_)) => Ok(report(
                    Verdict::A2,
                    "elliptic_n4_finite",
                    "smooth elliptic base with n = 4: normal bundle of finite order, kappa^-1 = 1 on every member",
                    1,
                    None,
                )),
                Some(_) => Ok(report(
                    Verdict::A1,
                    "elliptic_n4_infinite",
                    "smooth elliptic base with n = 4: normal bundle of infinite order, kappa^-1 = 0",
                    0,
                    None,
                )),
                None => Err(TwistorError::FamilyRequired),
            };
        }
        Base::Cycle(c) => c,
    };
    let z = zariski_decompose::<Rational>(c)?;
    if z.p_is_zero() {
        return Ok(report(
            Verdict::A1,
            "nef_part_zero",
            "P = 0, so kappa^-1 = 0 on every smooth member and the pencil gives a = 1",
            0,
            Some(z),
        ));
    }
    if z.d.is_positive() {
        return Ok(report(
            Verdict::A3,
            "positive_degree",
            "P^2 > 0 on every smooth member, so kappa^-1 = 2 and the space is Moishezon",
            2,
            Some(z),
        ));
    }
    let k = c.k().expect("validated pencil is real");
    if p.n > 4 && k < 2 {
        return Err(TwistorError::InvariantViolation(format!(
            "n = {} > 4 with P != 0, P^2 = 0 requires k >= 2, got k = {k}",
            p.n
        )));
    }
    match profile {
        None => Err(TwistorError::FamilyRequired),
        Some(FamilyProfile::Nonconstant) => Ok(report(
            Verdict::A1,
            "nonconstant_family",
            "the order of P_lambda varies, so some smooth member has infinite order and kappa^-1 = 0",
            0,
            Some(z),
        )),
        Some(FamilyProfile::ConstantInfinite) => Ok(report(
            Verdict::A1,
            "constant_infinite",
            "P_lambda has infinite order on every smooth member, so kappa^-1 = 0",
            0,
            Some(z),
        )),
        Some(FamilyProfile::ConstantFinite(_)) if p.n == 4 => Ok(report(
            Verdict::A2,
            "n4_constant_finite",
            "n = 4 and P_lambda of constant finite order: kappa^-1 = 1 on every smooth member",
            1,
            Some(z),
        )),
        Some(FamilyProfile::ConstantFinite(tau)) => {
            let generic = generic_member_derivation(c, &z, &tau)?;
            let fixed = fixed_component_derivation(p, &tau)?;
            let mut r = report(
                Verdict::Inconsistent,
                "constant_finite_n_gt_4",
                "n > 4 with P_lambda of constant finite order: the generic-member count gives a = 2 \
                 while the fixed-component argument gives a = 1",
                1,
                Some(z),
            );
            r.derivations = vec![generic, fixed];
            Ok(r)
        }
    }
}

fn generic_member_derivation(
    c: &CycleConfig,
    z: &Decomposition<Rational>,
    tau: &BigInt,
) -> Result<Derivation, TwistorError> {
    let (m0, l) = z.m0_coefficients()?;
    let order = Order::Finite(tau.clone());
    let kodaira = classify_from_decomposition(z, Some(&order));
    let scale = Rational::from_integer(tau * &m0);
    let d = z.p.scaled(&scale).sub(&Divisor::canonical(c.m()));
    let chi = riemann_roch_chi(c, &d)?;
    Ok(Derivation::new(
        "generic_member",
        "a(Z) = 1 + kappa^-1 = 2".to_string(),
        vec![
            (
                "P != 0 and P^2 = 0 on every smooth member".to_string(),
                format!("P = {}, d = {}, m0 = {m0}, l = {}", z.p, z.d, list(&l)),
                !z.p_is_zero() && z.d.is_zero(),
            ),
            (
                "P_lambda has the same finite order on every smooth member".to_string(),
                format!("order = {order}"),
                true,
            ),
            (
                "kappa^-1 = 1 on every smooth member".to_string(),
                format!("classification with order {order}: {kodaira}"),
                kodaira == Kodaira::One,
            ),
            (
                "chi(tau m0 P - C) = 1".to_string(),
                format!("D = {d}, chi = {chi}"),
                chi == BigInt::from(1),
            ),
        ],
    ))
}

fn fixed_component_derivation(p: &TwistorPencil, tau: &BigInt) -> Result<Derivation, TwistorError> {
    let model = build_resolved_model(p)?;
    let normalized = normalize_rotation(p)?;
    let tau_i: i64 = tau
        .try_into()
        .map_err(|_| TwistorError::InvariantViolation(format!("order {tau} too large")))?;
    let m0_i: i64 = model
        .m0()
        .try_into()
        .map_err(|_| TwistorError::InvariantViolation(format!("m0 = {} too large", model.m0())))?;
    let r = tau_i * m0_i;
    let degrees = m_class_intersections(&model, r, tau_i);
    let expected = closed_forms(&model, tau_i);
    let closed_ok = expected.iter().all(|(c, v)| &degrees[c] == v);
    let fixed = prove_e_fixed(&model, r, tau_i);
    let mut dims = Vec::new();
    let mut dims_ok = true;
    for nu in 1..=3 {
        let dim = pluri_system_dim(&normalized, nu * r, nu)?;
        dims_ok &= dim == nu * r;
        dims.push(format!("nu = {nu}: {dim}"));
    }
    Ok(Derivation::new(
        "fixed_component",
        "a(Z) = kappa(Z, F) = 1".to_string(),
        vec![
            (
                "labels are rotated so that l_1 > l_2".to_string(),
                format!("l = {}", list(model.l())),
                model.l()[0] > model.l()[1],
            ),
            (
                format!("M({r},{tau_i}) has degrees -+tau(l_1 - l_2) on the broken fibre over lambda_1"),
                list(expected.iter().map(|(c, _)| format!("M.{c} = {}", degrees[c]))),
                closed_ok,
            ),
            (
                format!("E is a fixed component of |M({r},{tau_i})|"),
                format!(
                    "{} steps, {}",
                    fixed.steps.len(),
                    fixed
                        .first_failure()
                        .map_or("all hold".to_string(), |s| format!("step {} fails", s.step))
                ),
                fixed.holds,
            ),
            (
                "|L^nu| = |f_1^*O(nu tau m0)| + nu tau m0 P has dimension nu tau m0, a rational normal curve image"
                    .to_string(),
                dims.join(", "),
                dims_ok,
            ),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::named;
    use crate::pic0::PicZeroElement;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pencil(c: CycleConfig, family: Option<PicZeroFamily>) -> TwistorPencil {
        let n = c.stored_n().unwrap();
        TwistorPencil::new(n, Base::Cycle(c), family, None).unwrap()
    }

    fn finite(tau: i64) -> Option<PicZeroFamily> {
        Some(PicZeroFamily::Constant(PicZeroElement::unity(q(1, tau))))
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn reducible_fibre_halves() {
        let k3 = pencil(CycleConfig::real(&[-2, -2, -2], 4), None);
        let fibres = reducible_fibers(&k3);
        assert_eq!(fibres.len(), 3);
        let unordered = |a: Vec<String>, b: Vec<String>| if a < b { (a, b) } else { (b, a) };
        let halves: BTreeSet<(Vec<String>, Vec<String>)> = fibres
            .iter()
            .map(|f| unordered(f.plus_half.clone(), f.minus_half.clone()))
            .collect();
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let expected: BTreeSet<_> = [
            (s(&["C_1", "C_2", "C_3"]), s(&["Cbar_1", "Cbar_2", "Cbar_3"])),
            (s(&["C_2", "C_3", "Cbar_1"]), s(&["Cbar_2", "Cbar_3", "C_1"])),
            (s(&["C_3", "Cbar_1", "Cbar_2"]), s(&["Cbar_3", "C_1", "C_2"])),
        ]
        .into_iter()
        .map(|(a, b)| unordered(a, b))
        .collect();
        assert_eq!(halves, expected);
        assert_eq!(fibres[0].plus_half, s(&["C_2", "C_3", "Cbar_1"]));
        assert_eq!(reducible_fibers(&pencil(named::c(), None)).len(), 2);
        assert_eq!(reducible_fibers(&pencil(named::a(), None)).len(), 1);
        let ell = TwistorPencil::new(6, Base::SmoothElliptic, None, None).unwrap();
        assert!(reducible_fibers(&ell).is_empty());
    }

    #[test]
    fn rotation_examples() {
        let c = pencil(named::c(), None);
        assert_eq!(normalize_rotation(&c).unwrap(), c);
        let rotated = TwistorPencil::new(5, Base::Cycle(named::c().rotated(1)), None, Some(vec![true, false])).unwrap();
        let back = normalize_rotation(&rotated).unwrap();
        assert_eq!(back.cycle().unwrap(), &named::c().rotated(2));
        assert_eq!(back.resolution(), &[false, true]);
        assert!(matches!(
            normalize_rotation(&pencil(named::a(), None)),
            Err(TwistorError::InvariantViolation(_))
        ));
        assert_eq!(descent_index(&ints(&[1, 1, 1])), None);
        assert_eq!(descent_index(&ints(&[1, 2, 1, 2])), Some(1));
    }

    #[test]
    fn model_of_fixture_c() {
        let model = build_resolved_model(&pencil(named::c(), None)).unwrap();
        assert_eq!(
            model.cycle(),
            &[
                Curve::C(1),
                Curve::Delta,
                Curve::C(2),
                Curve::CBar(1),
                Curve::DeltaBar,
                Curve::CBar(2)
            ]
        );
        let names: Vec<String> = model.curves().iter().map(|c| c.to_string()).collect();
        assert_eq!(
            names,
            [
                "C_{1,1}",
                "Delta_1",
                "C_{1,2}",
                "Cbar_{1,1}",
                "Deltabar_1",
                "Cbar_{1,2}",
                "L_1"
            ]
        );
        assert_eq!(model.fiber(ExceptionalComponent::E(2)), vec![Curve::Delta, Curve::C(2)]);
        assert_eq!(model.fiber(ExceptionalComponent::E(1)), vec![Curve::C(1)]);
        assert_eq!(model.l(), ints(&[2, 1, 2, 1]).as_slice());
        let k3 = CycleConfig::real(&[-2, -5, -1], 6);
        assert_eq!(build_resolved_model(&pencil(k3, None)).unwrap().cycle().len(), 8);
    }

    #[test]
    fn model_preconditions() {
        assert_eq!(
            build_resolved_model(&pencil(named::b(), None)),
            Err(TwistorError::NefPartZero)
        );
        assert_eq!(
            build_resolved_model(&pencil(named::a(), None)),
            Err(TwistorError::KTooSmall(1))
        );
        assert!(matches!(
            build_resolved_model(&pencil(named::e(), None)),
            Err(TwistorError::PositiveDegree(_))
        ));
    }

    #[test]
    fn intersection_examples() {
        let model = build_resolved_model(&pencil(named::c(), None)).unwrap();
        let one = m_class_intersections(&model, 0, 1);
        assert_eq!(one[&Curve::C(2)], BigInt::from(-1));
        assert_eq!(one[&Curve::Delta], BigInt::from(1));
        assert_eq!(one[&Curve::C(1)], BigInt::from(0));
        assert_eq!(one[&Curve::CBar(1)], BigInt::from(0));
        assert!(!one.contains_key(&Curve::L));
        assert!(m_class_intersections(&model, 4, 0).values().all(|v| v.is_zero()));
        assert_eq!(m_class_intersections(&model, 0, 7)[&Curve::C(2)], BigInt::from(-7));
    }

    #[test]
    fn pairings_are_real() {
        let model = build_resolved_model(&pencil(CycleConfig::real(&[-2, -5, -1], 6), None)).unwrap();
        let d = m_class_intersections(&model, 1, 2);
        for (c, v) in &d {
            assert_eq!(&d[&c.conjugate()], v, "{c}");
        }
    }

    #[test]
    fn mirrored_resolution() {
        let p = TwistorPencil::new(5, Base::Cycle(named::c()), None, Some(vec![true, false])).unwrap();
        let model = build_resolved_model(&p).unwrap();
        assert_eq!(model.fiber(ExceptionalComponent::E(1)), vec![Curve::C(1), Curve::Delta]);
        let d = m_class_intersections(&model, 0, 1);
        assert_eq!(d[&Curve::C(1)], BigInt::from(1));
        assert_eq!(d[&Curve::Delta], BigInt::from(-1));
        assert_eq!(d[&Curve::C(2)], BigInt::from(0));
        for (c, v) in closed_forms(&model, 3) {
            assert_eq!(m_class_intersections(&model, 0, 3)[&c], v);
        }
        assert!(prove_e_fixed(&model, 0, 1).holds);
    }

    #[test]
    fn fixed_component_examples() {
        let model = build_resolved_model(&pencil(named::c(), None)).unwrap();
        let ok = prove_e_fixed(&model, 0, 1);
        assert!(ok.holds, "{ok:?}");
        assert_eq!(ok.conclusion, "E is a fixed component of |M(0,1)|");
        let zero = prove_e_fixed(&model, 0, 0);
        assert!(!zero.holds);
        assert_eq!(zero.first_failure().unwrap().step, 1);
        assert!(prove_e_fixed(&model, -5, 3).holds);
        let negative = prove_e_fixed(&model, 0, -2);
        assert_eq!(negative.first_failure().unwrap().step, 1);
    }

    #[test]
    fn pluri_dimensions() {
        let p = pencil(named::c(), finite(6));
        assert_eq!(pluri_system_dim(&p, 1, 1).unwrap(), 1);
        assert_eq!(pluri_system_dim(&p, 0, 4).unwrap(), 0);
        assert_eq!(pluri_system_dim(&p, 3, 5).unwrap(), 3);
        let moving = pencil(named::c(), Some(PicZeroFamily::nonconstant()));
        assert!(matches!(
            pluri_system_dim(&moving, 1, 1),
            Err(TwistorError::FamilyNotConstantFinite(_))
        ));
        assert_eq!(pluri_system_dim(&p, 1, 0), Err(TwistorError::NonPositiveNu(0)));
    }

    #[test]
    fn decision_table() {
        let a2 = algebraic_dimension(&pencil(named::a(), finite(3))).unwrap();
        assert_eq!(a2.verdict, Verdict::A2);
        let a1 = algebraic_dimension(&pencil(named::c(), Some(PicZeroFamily::nonconstant()))).unwrap();
        assert_eq!(a1.verdict, Verdict::A1);
        let bad = algebraic_dimension(&pencil(named::c(), finite(6))).unwrap();
        assert_eq!(bad.verdict, Verdict::Inconsistent);
        assert_eq!(bad.derivations.len(), 2);
        assert!(bad.derivations.iter().all(|d| d.holds), "{:#?}", bad.derivations);
        let a3 = algebraic_dimension(&pencil(named::e(), Some(PicZeroFamily::nonconstant()))).unwrap();
        assert_eq!(a3.verdict, Verdict::A3);
        assert_eq!(
            algebraic_dimension(&pencil(named::e(), None)).unwrap().verdict,
            Verdict::A3
        );
        let b = algebraic_dimension(&pencil(named::b(), None)).unwrap();
        assert_eq!(b.verdict, Verdict::A1);
        let infinite = Some(PicZeroFamily::Constant(PicZeroElement::new(q(2, 1), q(0, 1)).unwrap()));
        assert_eq!(
            algebraic_dimension(&pencil(named::c(), infinite)).unwrap().verdict,
            Verdict::A1
        );
        assert_eq!(
            algebraic_dimension(&pencil(named::c(), None)),
            Err(TwistorError::FamilyRequired)
        );
        for r in [a2, a1, bad, a3, b] {
            assert!(r.respects_bound());
        }
    }

    #[test]
    fn elliptic_branches() {
        let ell = |n, f| algebraic_dimension(&TwistorPencil::new(n, Base::SmoothElliptic, f, None).unwrap());
        assert_eq!(ell(6, None).unwrap().verdict, Verdict::A1);
        assert_eq!(ell(4, finite(2)).unwrap().verdict, Verdict::A2);
        let inf = Some(PicZeroFamily::Constant(PicZeroElement::new(q(3, 2), q(0, 1)).unwrap()));
        assert_eq!(ell(4, inf).unwrap().verdict, Verdict::A1);
        assert_eq!(ell(4, None), Err(TwistorError::FamilyRequired));
        assert!(matches!(
            TwistorPencil::new(4, Base::SmoothElliptic, Some(PicZeroFamily::nonconstant()), None),
            Err(TwistorError::Invalid(_))
        ));
    }

    #[test]
    fn pencil_validation() {
        let err = TwistorPencil::new(3, Base::Cycle(CycleConfig::real(&[0], 3)), None, Some(vec![])).unwrap_err();
        let TwistorError::Invalid(d) = err else {
            panic!("expected diagnostics")
        };
        assert!(d.contains(&PencilDiagnostic::NTooSmall(3)));
        assert!(d.contains(&PencilDiagnostic::ResolutionLength { expected: 1, found: 0 }));
        let file = ConfigFile::parse("selfints = [-3, -1, -3]").unwrap();
        assert!(matches!(
            TwistorPencil::from_config(&file),
            Err(TwistorError::Invalid(_))
        ));
    }
}
