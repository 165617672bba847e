//! Blow-ups and blow-downs of anti-canonical cycles.
//!
//! Blowing up a node of the cycle inserts the exceptional curve as a new
//! (−1)-component between the two branches; blowing up a smooth point of
//! `Cᵢ` only lowers `Cᵢ²`, because the exceptional curve is then not part of
//! the anti-canonical cycle. In both cases `K²` drops by one per point.
//!
//! Node blow-ups also transport the coefficients `l` of `m₀P`: the inserted
//! slot receives the sum of its two neighbours.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cycles::{zariski_decompose, CycleConfig, CycleError, RealStructure};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("component {index} out of range for a cycle of length {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("component {index} has self-intersection {self_int}, expected -1")]
    NotExceptional { index: usize, self_int: i64 },
    #[error("cannot blow down the only component of the cycle")]
    SingleComponent,
    #[error("single-point surgery on a real configuration needs reality to be dropped")]
    RealityRequired,
    #[error("conjugate-pair surgery needs a real configuration")]
    NotReal,
    #[error("conjugate-pair blow-down needs k >= 2")]
    PairTooShort,
    #[error("transported coefficient list has length {found}, cycle has {expected}")]
    CoefficientLength { expected: usize, found: usize },
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Node between components `i` and `i + 1` (cyclically).
    BlowUpNode(usize),
    BlowUpNodePair(usize),
    BlowUpSmooth(usize),
    BlowDown(usize),
    BlowDownPair(usize),
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepKind::BlowUpNode(i) => write!(f, "blow_up_node({})", i + 1),
            StepKind::BlowUpNodePair(i) => write!(f, "blow_up_node_pair({})", i + 1),
            StepKind::BlowUpSmooth(i) => write!(f, "blow_up_smooth({})", i + 1),
            StepKind::BlowDown(i) => write!(f, "blow_down({})", i + 1),
            StepKind::BlowDownPair(i) => write!(f, "blow_down_pair({})", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryStep {
    pub kind: StepKind,
    pub before: CycleConfig,
    pub after: CycleConfig,
}

/// Result of a node blow-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeBlowUp {
    pub config: CycleConfig,
    /// Positions of the inserted exceptional components in `config`.
    pub inserted: Vec<usize>,
    /// Transported `m₀P` coefficients when the input had `P ≠ 0`, `P² = 0`.
    pub transported_l: Option<Vec<BigInt>>,
}

fn check_index(c: &CycleConfig, index: usize) -> Result<(), SurgeryError> {
    if index >= c.m() {
        return Err(SurgeryError::IndexOutOfRange { index, m: c.m() });
    }
    Ok(())
}

/// `m₀P` coefficients when `P ≠ 0` and `P² = 0`.
fn degenerate_l(c: &CycleConfig) -> Result<Option<Vec<BigInt>>, SurgeryError> {
    let z = zariski_decompose::<Rational>(c)?;
    if !z.is_degenerate_nef() {
        return Ok(None);
    }
    Ok(Some(z.m0_coefficients()?.1))
}

/// Inserts a (−1)-curve at the node after `node`; non-real result.
fn insert_at_node(selfs: &[i64], node: usize) -> (Vec<i64>, usize) {
    let m = selfs.len();
    if m == 1 {
        // the nodal curve has multiplicity two at its node
        return (vec![selfs[0] - 4, -1], 1);
    }
    let mut out = selfs.to_vec();
    out[node] -= 1;
    out[(node + 1) % m] -= 1;
    out.insert(node + 1, -1);
    (out, node + 1)
}

fn insert_l(l: &[BigInt], node: usize) -> Vec<BigInt> {
    let m = l.len();
    let mut out = l.to_vec();
    out.insert(node + 1, &l[node] + &l[(node + 1) % m]);
    out
}

/// Blows up the node between components `node` and `node + 1`.
///
/// On a real configuration the conjugate node must be blown up as well, so
/// this is rejected unless `drop_reality` is set; see [`blow_up_node_pair`].
pub fn blow_up_node(c: &CycleConfig, node: usize, drop_reality: bool) -> Result<NodeBlowUp, SurgeryError> {
    c.validate().map_err(CycleError::Invalid)?;
    check_index(c, node)?;
    if c.is_real() && !drop_reality {
        return Err(SurgeryError::RealityRequired);
    }
    let l = degenerate_l(c)?;
    let (selfs, pos) = insert_at_node(c.self_ints(), node);
    Ok(NodeBlowUp {
        config: CycleConfig::new(selfs),
        inserted: vec![pos],
        transported_l: l.map(|l| {
            if c.m() == 1 {
                vec![l[0].clone(), &l[0] * 2]
            } else {
                insert_l(&l, node)
            }
        }),
    })
}

/// Blows up a node `node < k` together with its conjugate; `n` grows by one.
pub fn blow_up_node_pair(c: &CycleConfig, node: usize) -> Result<NodeBlowUp, SurgeryError> {
    c.validate().map_err(CycleError::Invalid)?;
    let (Some(real), Some(n)) = (c.real_structure(), c.stored_n()) else {
        return Err(SurgeryError::NotReal);
    };
    let k = real.k;
    if node >= k {
        return Err(SurgeryError::IndexOutOfRange { index: node, m: k });
    }
    let l = degenerate_l(c)?;
    let mut half = c.self_ints()[..k].to_vec();
    half[node] -= 1;
    half[(node + 1) % k] -= 1;
    half.insert(node + 1, -1);
    let config = CycleConfig::real(&half, n + 1);
    let transported_l = l.map(|l| {
        let mut h: Vec<BigInt> = l[..k].to_vec();
        // l is conjugation invariant, so the successor of C_k is C̄_1 with l_1
        h.insert(node + 1, &l[node] + &l[(node + 1) % (2 * k)]);
        let mut full = h.clone();
        full.extend(h);
        full
    });
    Ok(NodeBlowUp {
        config,
        inserted: vec![node + 1, node + 2 + k],
        transported_l,
    })
}

/// Blows up a smooth point of component `i`; the result carries no real structure.
pub fn blow_up_smooth(c: &CycleConfig, i: usize) -> Result<CycleConfig, SurgeryError> {
    c.validate().map_err(CycleError::Invalid)?;
    check_index(c, i)?;
    let mut selfs = c.self_ints().to_vec();
    selfs[i] -= 1;
    Ok(CycleConfig::new(selfs))
}

fn remove_exceptional(selfs: &[i64], i: usize) -> Vec<i64> {
    let m = selfs.len();
    if m == 2 {
        // push-forward: (π_*C)² = C² + (C·E)² with C·E = 2
        return vec![selfs[1 - i] + 4];
    }
    let mut out = selfs.to_vec();
    out[(i + m - 1) % m] += 1;
    out[(i + 1) % m] += 1;
    out.remove(i);
    out
}

/// Contracts the (−1)-component `i`.
///
/// On a real configuration the conjugate would have to be contracted too, so
/// this is rejected unless `drop_reality` is set; see [`blow_down_pair`].
pub fn blow_down(c: &CycleConfig, i: usize, drop_reality: bool) -> Result<CycleConfig, SurgeryError> {
    c.validate().map_err(CycleError::Invalid)?;
    check_index(c, i)?;
    if c.m() == 1 {
        return Err(SurgeryError::SingleComponent);
    }
    let s = c.self_ints()[i];
    if s != -1 {
        return Err(SurgeryError::NotExceptional { index: i, self_int: s });
    }
    if c.is_real() && !drop_reality {
        return Err(SurgeryError::RealityRequired);
    }
    Ok(CycleConfig::new(remove_exceptional(c.self_ints(), i)))
}

/// Contracts component `i < k` and its conjugate; `n` drops by one.
pub fn blow_down_pair(c: &CycleConfig, i: usize) -> Result<CycleConfig, SurgeryError> {
    c.validate().map_err(CycleError::Invalid)?;
    let (Some(real), Some(n)) = (c.real_structure(), c.stored_n()) else {
        return Err(SurgeryError::NotReal);
    };
    let k = real.k;
    if i >= k {
        return Err(SurgeryError::IndexOutOfRange { index: i, m: k });
    }
    if k == 1 {
        return Err(SurgeryError::PairTooShort);
    }
    let s = c.self_ints()[i];
    if s != -1 {
        return Err(SurgeryError::NotExceptional { index: i, self_int: s });
    }
    let m = 2 * k;
    let mut selfs = c.self_ints().to_vec();
    for j in [i, real.conjugate(i)] {
        selfs[(j + m - 1) % m] += 1;
        selfs[(j + 1) % m] += 1;
    }
    let half: Vec<i64> = (0..k).filter(|&j| j != i).map(|j| selfs[j]).collect();
    Ok(CycleConfig::from_parts(
        half.iter().chain(&half).copied().collect(),
        Some(RealStructure { k: k - 1 }),
        Some(n - 1),
    ))
}

/// Contracts (−1)-components, least index first, until `C` becomes nef.
///
/// Returns `None` when `P = 0` or when no cycle component can be contracted
/// before `C` is nef. Each contraction drops the real structure.
pub fn contract_to_nef_model(c: &CycleConfig) -> Result<Option<(CycleConfig, Vec<SurgeryStep>)>, SurgeryError> {
    let mut current = c.clone();
    let mut steps = Vec::new();
    loop {
        let z = zariski_decompose::<Rational>(&current)?;
        if z.p_is_zero() {
            return Ok(None);
        }
        if z.n_part.is_zero() {
            return Ok(Some((current, steps)));
        }
        let Some(i) = current.self_ints().iter().position(|&s| s == -1) else {
            return Ok(None);
        };
        if current.m() == 1 {
            return Ok(None);
        }
        let next = blow_down(&current, i, true)?;
        steps.push(SurgeryStep {
            kind: StepKind::BlowDown(i),
            before: current,
            after: next.clone(),
        });
        current = next;
    }
}
