//! Open domains (intervals, boxes, finitely generated cones) with exact
//! decision procedures.
//!
//! Two questions are answered here: whether a coefficient list leaves a
//! domain invariant (`∑ αᵢK ⊆ K`), and how to shrink an invariant interval
//! to a symmetric subinterval that absorbs `∑ |αᵢ|`. Both are decided by
//! endpoint arithmetic for intervals and boxes, and by exact linear
//! programming for cone membership. Failures come with a concrete witness
//! tuple that is re-verified before it is returned.

use crate::rational::{
    abs_sum, format_point, rat, sign_split_sums, vec_add, vec_scale, vec_zero, QMatrix, QVector,
    Rational,
};
use crate::sampling::interior_probes;
use crate::simplex::{maximize, LpOutcome};
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("coefficient list is empty")]
    EmptyCoefficients,
    #[error("coefficient {index} is zero; all coefficients must be non-zero")]
    ZeroCoefficient { index: usize },
    #[error("interval ({lo}, {hi}) is empty; the lower endpoint must be strictly smaller")]
    EmptyInterval { lo: Endpoint, hi: Endpoint },
    #[error("a box needs at least one side")]
    EmptyBox,
    #[error("invalid cone: {0}")]
    InvalidCone(String),
    #[error("weighted images are defined for intervals and boxes; use check_invariance for cones")]
    ConeImage,
    #[error("point dimension {got} does not match domain dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("∑|αᵢ| = {sum} exceeds 1; the symmetric-subdomain construction only covers ∑|αᵢ| ≤ 1")]
    AbsoluteSumExceedsOne { sum: Rational },
    #[error("the coefficients do not leave the interval invariant, so no subdomain is derived")]
    NotInvariant,
}

/// Interval endpoint: an exact rational or an explicit infinity.
///
/// The derived `Ord` gives `NegInf < Finite(_) < PosInf`, which is the
/// extended-line order used for all inclusion tests.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Endpoint::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, Endpoint::Finite(_))
    }

    /// Scale by an exact rational. A zero coefficient annihilates even an
    /// infinite endpoint: the term corresponds to an empty part of the
    /// positive/negative split and contributes nothing.
    fn scale(&self, c: &Rational) -> Endpoint {
        if c.is_zero() {
            return Endpoint::Finite(Rational::zero());
        }
        match (self, c.is_positive()) {
            (Endpoint::Finite(x), _) => Endpoint::Finite(c * x),
            (Endpoint::NegInf, true) | (Endpoint::PosInf, false) => Endpoint::NegInf,
            (Endpoint::PosInf, true) | (Endpoint::NegInf, false) => Endpoint::PosInf,
        }
    }

    fn add(&self, other: &Endpoint) -> Endpoint {
        match (self, other) {
            (Endpoint::Finite(a), Endpoint::Finite(b)) => Endpoint::Finite(a + b),
            (Endpoint::NegInf, Endpoint::PosInf) | (Endpoint::PosInf, Endpoint::NegInf) => {
                unreachable!("opposite infinities never meet in the endpoint formulas")
            }
            (Endpoint::NegInf, _) | (_, Endpoint::NegInf) => Endpoint::NegInf,
            (Endpoint::PosInf, _) | (_, Endpoint::PosInf) => Endpoint::PosInf,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => write!(f, "-inf"),
            Endpoint::Finite(x) => write!(f, "{x}"),
            Endpoint::PosInf => write!(f, "inf"),
        }
    }
}

/// Non-empty open interval with exact or explicitly infinite endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

impl Interval {
    /// `None` endpoints mean -∞ / +∞. Requires `lo < hi`.
    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Result<Self, DomainError> {
        let lo = lo.map_or(Endpoint::NegInf, Endpoint::Finite);
        let hi = hi.map_or(Endpoint::PosInf, Endpoint::Finite);
        Self::from_endpoints(lo, hi)
    }

    pub fn from_endpoints(lo: Endpoint, hi: Endpoint) -> Result<Self, DomainError> {
        if lo >= hi || lo == Endpoint::PosInf || hi == Endpoint::NegInf {
            return Err(DomainError::EmptyInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn whole_line() -> Self {
        Self {
            lo: Endpoint::NegInf,
            hi: Endpoint::PosInf,
        }
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    pub fn lo_finite(&self) -> Option<&Rational> {
        self.lo.finite()
    }

    pub fn hi_finite(&self) -> Option<&Rational> {
        self.hi.finite()
    }

    pub fn is_bounded(&self) -> bool {
        !self.lo.is_infinite() && !self.hi.is_infinite()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let p = Endpoint::Finite(x.clone());
        self.lo < p && p < self.hi
    }

    /// Open-set inclusion `(lo', hi') ⊆ (lo, hi)`: weak endpoint comparison.
    pub fn includes(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `-K`, the reflection through 0.
    pub fn negate(&self) -> Interval {
        Interval {
            lo: self.hi.scale(&-Rational::one()),
            hi: self.lo.scale(&-Rational::one()),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval, DomainError> {
        Interval::from_endpoints(
            self.lo.clone().max(other.lo.clone()),
            self.hi.clone().min(other.hi.clone()),
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Axis-aligned open box: the product of its sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxDomain {
    sides: Vec<Interval>,
}

impl BoxDomain {
    pub fn new(sides: Vec<Interval>) -> Result<Self, DomainError> {
        if sides.is_empty() {
            return Err(DomainError::EmptyBox);
        }
        Ok(Self { sides })
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides
    }

    pub fn dimension(&self) -> usize {
        self.sides.len()
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.sides.len() && self.sides.iter().zip(point).all(|(s, x)| s.contains(x))
    }
}

/// Open finitely generated convex cone: the topological interior of the set
/// of non-negative rational combinations of the generators.
///
/// The generators must span Q^k, otherwise the interior is empty and the
/// domain would be empty; construction rejects that case. Interior
/// membership is equivalent to having a representation with all weights
/// strictly positive, which is decided by exact LP.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    generators: Vec<QVector>,
    dimension: usize,
}

impl Cone {
    pub fn new(generators: Vec<QVector>) -> Result<Self, DomainError> {
        if generators.is_empty() {
            return Err(DomainError::InvalidCone("no generators".into()));
        }
        let dimension = generators[0].len();
        if dimension == 0 {
            return Err(DomainError::InvalidCone(
                "zero-dimensional generator".into(),
            ));
        }
        if generators.iter().any(|g| g.len() != dimension) {
            return Err(DomainError::InvalidCone(
                "generators have mixed dimensions".into(),
            ));
        }
        if generators.iter().any(|g| g.iter().all(Zero::is_zero)) {
            return Err(DomainError::InvalidCone("zero generator".into()));
        }
        let span = QMatrix::from_rows(generators.clone()).expect("non-empty generator list");
        if span.rank() != dimension {
            return Err(DomainError::InvalidCone(format!(
                "generators span a {}-dimensional subspace of Q^{dimension}; \
                 the open cone is empty",
                span.rank()
            )));
        }
        Ok(Self {
            generators,
            dimension,
        })
    }

    pub fn generators(&self) -> &[QVector] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn generator_matrix(&self) -> QMatrix {
        QMatrix::from_columns(self.generators.clone()).expect("validated generators")
    }

    /// Membership in the closed cone: ∃ λ ≥ 0 with ∑ λᵢgᵢ = x.
    pub fn contains_closure(&self, x: &[Rational]) -> bool {
        if x.len() != self.dimension {
            return false;
        }
        let a = self.generator_matrix();
        let zeros = vec![Rational::zero(); a.width()];
        !matches!(maximize(&a, x, &zeros), LpOutcome::Infeasible)
    }

    /// Membership in the open cone (the domain itself): maximize the minimum
    /// weight t in `∑ (sᵢ + t)gᵢ = x, sᵢ ≥ 0`; the point is interior iff the
    /// optimum is positive or unbounded.
    pub fn contains(&self, x: &[Rational]) -> bool {
        if x.len() != self.dimension {
            return false;
        }
        let m = self.generators.len();
        let gen_sum = self
            .generators
            .iter()
            .fold(vec_zero(self.dimension), |acc, g| vec_add(&acc, g));
        // columns: s_1..s_m, t_plus, t_minus
        let mut cols: Vec<QVector> = self.generators.clone();
        cols.push(gen_sum.clone());
        cols.push(vec_scale(&-Rational::one(), &gen_sum));
        let a = QMatrix::from_columns(cols).expect("cone LP columns");
        let mut objective = vec![Rational::zero(); m + 2];
        objective[m] = Rational::one();
        objective[m + 1] = -Rational::one();
        match maximize(&a, x, &objective) {
            LpOutcome::Infeasible => false,
            LpOutcome::Unbounded => true,
            LpOutcome::Optimal { value, .. } => value.is_positive(),
        }
    }

    /// A concrete interior point: the sum of all generators.
    pub fn interior_point(&self) -> QVector {
        self.generators
            .iter()
            .fold(vec_zero(self.dimension), |acc, g| vec_add(&acc, g))
    }

    /// True when the cone is all of Q^k (then every coefficient list leaves
    /// it invariant, even mixed-sign ones).
    pub fn is_whole_space(&self) -> bool {
        (0..self.dimension).all(|j| {
            let mut e = vec_zero(self.dimension);
            e[j] = Rational::one();
            let mut neg = vec_zero(self.dimension);
            neg[j] = -Rational::one();
            self.contains_closure(&e) && self.contains_closure(&neg)
        })
    }
}

/// Domain of a restricted functional equation.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Interval(Interval),
    Box(BoxDomain),
    Cone(Cone),
}

impl Domain {
    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval(_) => 1,
            Domain::Box(b) => b.dimension(),
            Domain::Cone(c) => c.dimension(),
        }
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        match self {
            Domain::Interval(iv) => point.len() == 1 && iv.contains(&point[0]),
            Domain::Box(b) => b.contains(point),
            Domain::Cone(c) => c.contains(point),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Interval(iv) => write!(f, "{iv}"),
            Domain::Box(b) => {
                for (i, s) in b.sides().iter().enumerate() {
                    if i > 0 {
                        write!(f, " × ")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            Domain::Cone(c) => write!(f, "open cone on {} generators", c.generators().len()),
        }
    }
}

/// Exact image `{∑ αᵢxᵢ : xᵢ ∈ K}` of an interval or box, together with the
/// positive/negative coefficient split that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedImage {
    pub image: Domain,
    pub positive_sum: Rational,
    pub negative_sum: Rational,
}

fn validate_alphas(alphas: &[Rational]) -> Result<(), DomainError> {
    if alphas.is_empty() {
        return Err(DomainError::EmptyCoefficients);
    }
    if let Some(index) = alphas.iter().position(Zero::is_zero) {
        return Err(DomainError::ZeroCoefficient { index });
    }
    Ok(())
}

fn interval_image(iv: &Interval, pos: &Rational, neg: &Rational) -> Interval {
    // per-endpoint formula: lo' = α⁺·lo + α⁻·hi, hi' = α⁺·hi + α⁻·lo
    let lo = iv.lo.scale(pos).add(&iv.hi.scale(neg));
    let hi = iv.hi.scale(pos).add(&iv.lo.scale(neg));
    Interval::from_endpoints(lo, hi).expect("image of a non-empty interval is non-empty")
}

/// The exact open image of an interval or box under `x ↦ ∑ αᵢxᵢ`.
pub fn weighted_image(domain: &Domain, alphas: &[Rational]) -> Result<WeightedImage, DomainError> {
    validate_alphas(alphas)?;
    let (pos, neg) = sign_split_sums(alphas);
    let image = match domain {
        Domain::Interval(iv) => Domain::Interval(interval_image(iv, &pos, &neg)),
        Domain::Box(b) => Domain::Box(
            BoxDomain::new(
                b.sides()
                    .iter()
                    .map(|s| interval_image(s, &pos, &neg))
                    .collect(),
            )
            .expect("box image keeps its sides"),
        ),
        Domain::Cone(_) => return Err(DomainError::ConeImage),
    };
    Ok(WeightedImage {
        image,
        positive_sum: pos,
        negative_sum: neg,
    })
}

/// A concrete violation of invariance: a tuple from Kⁿ whose weighted sum
/// escapes K.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub tuple: Vec<QVector>,
    pub combination: QVector,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tuple.iter().map(|p| format_point(p)).collect();
        write!(
            f,
            "tuple [{}] maps to {} outside the domain",
            parts.join(", "),
            format_point(&self.combination)
        )
    }
}

/// Why the invariance verdict holds.
#[derive(Debug, Clone, PartialEq)]
pub enum InvarianceCertificate {
    /// The exact image is included in the domain (intervals and boxes).
    ImageIncluded(WeightedImage),
    /// Cone with all coefficients positive: αK = K + K = K.
    ConePositiveCoefficients,
    /// The cone is all of Q^k, so any combination stays inside.
    ConeWholeSpace,
    /// Invariance fails; the tuple is re-verified before being returned.
    Violated(Violation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceCheck {
    pub holds: bool,
    pub certificate: InvarianceCertificate,
}

/// Decide `∑ αᵢK ⊆ K` exactly, with a certificate either way.
///
/// ```
/// use feqn_core::domains::{check_invariance, Domain, Interval};
/// use feqn_core::rational::ratio;
///
/// let k = Domain::Interval(Interval::new(Some(ratio(-1, 1)), Some(ratio(2, 1))).unwrap());
/// let check = check_invariance(&k, &[ratio(1, 4), ratio(-1, 5)]).unwrap();
/// assert!(check.holds);
/// ```
pub fn check_invariance(
    domain: &Domain,
    alphas: &[Rational],
) -> Result<InvarianceCheck, DomainError> {
    validate_alphas(alphas)?;
    match domain {
        Domain::Interval(_) | Domain::Box(_) => {
            let wi = weighted_image(domain, alphas)?;
            let included = match (&wi.image, domain) {
                (Domain::Interval(im), Domain::Interval(k)) => k.includes(im),
                (Domain::Box(im), Domain::Box(k)) => im
                    .sides()
                    .iter()
                    .zip(k.sides())
                    .all(|(im_side, k_side)| k_side.includes(im_side)),
                _ => unreachable!("image has the shape of its input"),
            };
            if included {
                Ok(InvarianceCheck {
                    holds: true,
                    certificate: InvarianceCertificate::ImageIncluded(wi),
                })
            } else {
                let violation = box_violation(domain, alphas, &wi);
                debug_assert!(!domain.contains(&violation.combination));
                Ok(InvarianceCheck {
                    holds: false,
                    certificate: InvarianceCertificate::Violated(violation),
                })
            }
        }
        Domain::Cone(cone) => {
            if alphas.iter().all(Signed::is_positive) {
                return Ok(InvarianceCheck {
                    holds: true,
                    certificate: InvarianceCertificate::ConePositiveCoefficients,
                });
            }
            if cone.is_whole_space() {
                return Ok(InvarianceCheck {
                    holds: true,
                    certificate: InvarianceCertificate::ConeWholeSpace,
                });
            }
            let violation = cone_violation(cone, alphas);
            assert!(
                !cone.contains(&violation.combination),
                "cone witness must escape the open cone"
            );
            Ok(InvarianceCheck {
                holds: false,
                certificate: InvarianceCertificate::Violated(violation),
            })
        }
    }
}

/// Mixed-sign coefficients on a proper cone: scale one negatively weighted
/// copy of an interior point until the weighted sum has a strictly negative
/// total coefficient; that multiple of an interior point cannot lie in a
/// cone that is not the whole space.
fn cone_violation(cone: &Cone, alphas: &[Rational]) -> Violation {
    let z = cone.interior_point();
    let neg_index = alphas
        .iter()
        .position(|a| a.is_negative())
        .expect("mixed signs were established");
    let rest: Rational = alphas
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != neg_index)
        .map(|(_, a)| a.clone())
        .sum();
    let scale = (&rest / -&alphas[neg_index] + Rational::one()).max(Rational::one());
    let tuple: Vec<QVector> = alphas
        .iter()
        .enumerate()
        .map(|(i, _)| {
            if i == neg_index {
                vec_scale(&scale, &z)
            } else {
                z.clone()
            }
        })
        .collect();
    let combination = weighted_sum(&tuple, alphas);
    Violation { tuple, combination }
}

fn weighted_sum(tuple: &[QVector], alphas: &[Rational]) -> QVector {
    let mut acc = vec_zero(tuple[0].len());
    for (x, a) in tuple.iter().zip(alphas) {
        acc = vec_add(&acc, &vec_scale(a, x));
    }
    acc
}

/// Witness for a failed interval/box inclusion. A deterministic grid of
/// midpoint/quartile tuples is tried first; if none of those escape, a
/// corner-targeted tuple is computed in closed form, which always succeeds
/// when the image is not included.
fn box_violation(domain: &Domain, alphas: &[Rational], wi: &WeightedImage) -> Violation {
    let (sides, image_sides): (Vec<Interval>, Vec<Interval>) = match (domain, &wi.image) {
        (Domain::Interval(k), Domain::Interval(im)) => (vec![k.clone()], vec![im.clone()]),
        (Domain::Box(k), Domain::Box(im)) => (k.sides().to_vec(), im.sides().to_vec()),
        _ => unreachable!("image has the shape of its input"),
    };
    let bad_side = sides
        .iter()
        .zip(&image_sides)
        .position(|(k, im)| !k.includes(im))
        .expect("some side fails inclusion");

    // deterministic grid on the violated coordinate, midpoints elsewhere
    let probes = interior_probes(&sides[bad_side]);
    let n = alphas.len();
    if n <= 8 {
        let mut counters = vec![0usize; n];
        loop {
            let coords: Vec<Rational> = counters.iter().map(|&c| probes[c].clone()).collect();
            let tuple = embed_tuple(&sides, bad_side, &coords);
            let combination = weighted_sum(&tuple, alphas);
            if !domain.contains(&combination) {
                return Violation { tuple, combination };
            }
            let mut idx = 0;
            loop {
                counters[idx] += 1;
                if counters[idx] < probes.len() {
                    break;
                }
                counters[idx] = 0;
                idx += 1;
                if idx == n {
                    break;
                }
            }
            if idx == n {
                break;
            }
        }
    }

    // corner-targeted construction on the violated side
    let k_side = &sides[bad_side];
    let im_side = &image_sides[bad_side];
    let coords = if im_side.hi() > k_side.hi() {
        corner_coordinates(k_side, alphas, true)
    } else {
        debug_assert!(im_side.lo() < k_side.lo());
        corner_coordinates(k_side, alphas, false)
    };
    let tuple = embed_tuple(&sides, bad_side, &coords);
    let combination = weighted_sum(&tuple, alphas);
    assert!(
        !domain.contains(&combination),
        "corner witness must escape the domain"
    );
    Violation { tuple, combination }
}

fn embed_tuple(sides: &[Interval], bad_side: usize, coords: &[Rational]) -> Vec<QVector> {
    coords
        .iter()
        .map(|c| {
            sides
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    if j == bad_side {
                        c.clone()
                    } else {
                        interior_probes(s)[0].clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// One coordinate per tuple slot, pushing the weighted sum past the `high`
/// (or below the `low`) endpoint of the interval, in closed form.
///
/// Each slot walks toward the endpoint that drives the sum in the escape
/// direction. When every such endpoint is finite, the supremum of the sum
/// is finite and an exact margin backoff reaches past the target; when some
/// slot heads for an infinite endpoint, the sum is affine in a ray parameter
/// with non-zero slope and the parameter is solved for exactly. Either way
/// the construction is total: a violated side always yields a witness.
fn corner_coordinates(iv: &Interval, alphas: &[Rational], high: bool) -> Vec<Rational> {
    // a violated endpoint is finite: an infinite one includes any image
    let target = if high {
        iv.hi_finite()
    } else {
        iv.lo_finite()
    }
    .expect("violated endpoint is finite")
    .clone();
    // slot pushes the sum toward hi exactly when sign(α) matches direction
    let toward_hi = |a: &Rational| a.is_positive() == high;
    let backoff_cap = match (iv.lo_finite(), iv.hi_finite()) {
        (Some(lo), Some(hi)) => ((hi - lo) / rat(4)).min(rat(1)),
        _ => rat(1),
    };

    let all_finite = alphas.iter().all(|a| {
        if toward_hi(a) {
            iv.hi_finite().is_some()
        } else {
            iv.lo_finite().is_some()
        }
    });
    if all_finite {
        // the supremum (infimum) of the sum over the closed corners
        let extreme: Rational = alphas
            .iter()
            .map(|a| {
                if toward_hi(a) {
                    a * iv.hi_finite().unwrap()
                } else {
                    a * iv.lo_finite().unwrap()
                }
            })
            .sum();
        let gap = if high {
            &extreme - &target
        } else {
            &target - &extreme
        };
        assert!(gap.is_positive(), "side was established as violated");
        // backing off by ε moves the sum by ε·∑|αᵢ|, so half the gap remains
        let eps = (&gap / (rat(2) * abs_sum(alphas))).min(backoff_cap);
        return alphas
            .iter()
            .map(|a| {
                if toward_hi(a) {
                    iv.hi_finite().unwrap() - &eps
                } else {
                    iv.lo_finite().unwrap() + &eps
                }
            })
            .collect();
    }

    // some slot rides toward an infinite endpoint; coordinate at parameter m
    let coordinate = |a: &Rational, m: &Rational| -> Rational {
        if toward_hi(a) {
            match iv.hi_finite() {
                Some(hi) => hi - &backoff_cap,
                None => iv.lo_finite().map_or_else(|| rat(0), |lo| lo + rat(1)) + m,
            }
        } else {
            match iv.lo_finite() {
                Some(lo) => lo + &backoff_cap,
                None => iv.hi_finite().map_or_else(|| rat(0), |hi| hi - rat(1)) - m,
            }
        }
    };
    let sum_at =
        |m: &Rational| -> Rational { alphas.iter().map(|a| a * coordinate(a, m)).sum() };
    let at_zero = sum_at(&rat(0));
    // slope is ±∑|αᵢ| over the ray slots, never zero here
    let slope = sum_at(&rat(1)) - &at_zero;
    debug_assert!(if high {
        slope.is_positive()
    } else {
        slope.is_negative()
    });
    let m = ((&target - &at_zero) / &slope).max(rat(0)) + rat(1);
    alphas.iter().map(|a| coordinate(a, &m)).collect()
}

/// How the symmetric subinterval was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShrinkKind {
    /// All coefficients positive: the construction targets mixed signs, so
    /// the interval is returned unchanged.
    AllPositiveUnchanged,
    /// The interval was unbounded; invariance with mixed signs forces the
    /// whole line.
    WholeLine,
    /// α⁺ - α⁻ = 1: the endpoint system degenerates to b = -a and the
    /// interval is already symmetric.
    AlreadySymmetric,
    /// General case: K' = K ∩ (-K) = (-c, c) with c = min(-a, b).
    Reflected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricSubdomain {
    pub interval: Interval,
    pub kind: ShrinkKind,
}

/// Shrink an invariant interval to a symmetric subinterval K' = K ∩ (-K)
/// that absorbs the absolute coefficients: `∑ |αᵢ| K' ⊆ K'`.
///
/// Requires `∑ |αᵢ| ≤ 1` (the construction is only proved there) and
/// invariance of K under the signed coefficients.
pub fn find_symmetric_subdomain(
    interval: &Interval,
    alphas: &[Rational],
) -> Result<SymmetricSubdomain, DomainError> {
    validate_alphas(alphas)?;
    let abs = abs_sum(alphas);
    if abs > Rational::one() {
        return Err(DomainError::AbsoluteSumExceedsOne { sum: abs });
    }
    let domain = Domain::Interval(interval.clone());
    let check = check_invariance(&domain, alphas)?;
    if !check.holds {
        return Err(DomainError::NotInvariant);
    }
    if alphas.iter().all(Signed::is_positive) {
        return Ok(SymmetricSubdomain {
            interval: interval.clone(),
            kind: ShrinkKind::AllPositiveUnchanged,
        });
    }
    if !interval.is_bounded() {
        // mixed signs + invariance force the whole line: a weighted sum with
        // a negative coefficient escapes any half-line
        debug_assert_eq!(*interval, Interval::whole_line());
        return Ok(SymmetricSubdomain {
            interval: Interval::whole_line(),
            kind: ShrinkKind::WholeLine,
        });
    }

    let a = interval.lo_finite().expect("bounded").clone();
    let b = interval.hi_finite().expect("bounded").clone();
    let (pos, neg) = sign_split_sums(alphas);
    // invariance rewritten: (1-α⁺)a - α⁻b ≤ 0 and (1-α⁺)b - α⁻a ≥ 0
    let one = Rational::one();
    debug_assert!(!((&one - &pos) * &a - &neg * &b).is_positive());
    debug_assert!(!((&one - &pos) * &b - &neg * &a).is_negative());

    let kind = if &pos - &neg == one {
        // -α⁻(a+b) = 0 with α⁻ ≠ 0 forces b = -a
        debug_assert_eq!(b, -a.clone());
        ShrinkKind::AlreadySymmetric
    } else {
        ShrinkKind::Reflected
    };
    assert!(a.is_negative() && b.is_positive(), "0 must lie inside K");
    let c = (-&a).min(b.clone());
    let shrunk = Interval::new(Some(-&c), Some(c)).expect("c > 0");

    // postconditions: K' ⊆ K and ∑|αᵢ|·K' ⊆ K'
    assert!(interval.includes(&shrunk));
    let abs_alphas: Vec<Rational> = alphas.iter().map(|x| x.abs()).collect();
    let image = weighted_image(&Domain::Interval(shrunk.clone()), &abs_alphas)?;
    if let Domain::Interval(im) = &image.image {
        assert!(shrunk.includes(im), "|α| image must stay inside K'");
    }
    Ok(SymmetricSubdomain {
        interval: shrunk,
        kind,
    })
}
