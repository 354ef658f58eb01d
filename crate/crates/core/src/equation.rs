//! Equation specifications, affine candidates, and the solution-family
//! characterization.
//!
//! An equation `f(∑ αᵢxᵢ) = ∑ βᵢ f(xᵢ)` restricted to an invariant domain is
//! solved by affine maps `f = A·x + b` subject to two exact constraints:
//! the offset is free iff `∑ βᵢ = 1` (otherwise forced to zero), and within
//! the rational-matrix model a non-zero linear part exists iff `αᵢ = βᵢ` for
//! every i, because a rational matrix is automatically homogeneous:
//! `A(αx) = αA(x)`, so `A(αᵢx) = βᵢA(x)` collapses to `(αᵢ - βᵢ)A = 0`.

use crate::domains::{check_invariance, Domain, Violation};
use crate::rational::{format_point, vec_add, vec_scale, vec_zero, QMatrix, QVector, Rational};
use crate::sampling::SampleRng;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EquationError {
    #[error("an equation needs at least two terms, got {0}")]
    TooFewTerms(usize),
    #[error("{side} coefficient {index} is zero")]
    ZeroCoefficient { side: &'static str, index: usize },
    #[error("alphas and betas must have the same length ({alphas} vs {betas})")]
    LengthMismatch { alphas: usize, betas: usize },
    #[error("domain is not invariant under the coefficients: {0}")]
    NotInvariant(Violation),
    #[error("candidate acts on Q^{candidate} but the domain sits in Q^{domain}")]
    DimensionMismatch { candidate: usize, domain: usize },
    #[error("offset length {offset} does not match matrix height {height}")]
    OffsetMismatch { offset: usize, height: usize },
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Domain(#[from] crate::domains::DomainError),
}

/// Coefficient lists (α₁..αₙ), (β₁..βₙ) of a general linear equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSpec {
    alphas: Vec<Rational>,
    betas: Vec<Rational>,
}

impl EquationSpec {
    pub fn new(alphas: Vec<Rational>, betas: Vec<Rational>) -> Result<Self, EquationError> {
        if alphas.len() != betas.len() {
            return Err(EquationError::LengthMismatch {
                alphas: alphas.len(),
                betas: betas.len(),
            });
        }
        if alphas.len() < 2 {
            return Err(EquationError::TooFewTerms(alphas.len()));
        }
        if let Some(index) = alphas.iter().position(Zero::is_zero) {
            return Err(EquationError::ZeroCoefficient {
                side: "alpha",
                index,
            });
        }
        if let Some(index) = betas.iter().position(Zero::is_zero) {
            return Err(EquationError::ZeroCoefficient {
                side: "beta",
                index,
            });
        }
        Ok(Self { alphas, betas })
    }

    pub fn arity(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Rational] {
        &self.betas
    }

    pub fn beta_sum(&self) -> Rational {
        self.betas.iter().sum()
    }
}

/// Affine candidate solution `x ↦ A·x + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    linear: QMatrix,
    offset: QVector,
}

impl AffineMap {
    pub fn new(linear: QMatrix, offset: QVector) -> Result<Self, EquationError> {
        if offset.len() != linear.height() {
            return Err(EquationError::OffsetMismatch {
                offset: offset.len(),
                height: linear.height(),
            });
        }
        Ok(Self { linear, offset })
    }

    pub fn linear(&self) -> &QMatrix {
        &self.linear
    }

    pub fn offset(&self) -> &QVector {
        &self.offset
    }

    pub fn domain_dimension(&self) -> usize {
        self.linear.width()
    }

    pub fn codomain_dimension(&self) -> usize {
        self.linear.height()
    }

    pub fn eval(&self, x: &[Rational]) -> QVector {
        vec_add(&self.linear.mul_vec(x), &self.offset)
    }
}

/// The family of affine solutions admitted by a coefficient spec.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFamily {
    /// A non-zero linear part is representable iff αᵢ = βᵢ for all i.
    pub linear_part_allowed: bool,
    /// The offset is a free parameter iff ∑ βᵢ = 1.
    pub offset_free: bool,
    pub beta_sum: Rational,
    /// Constraints `A(αᵢ·x) = βᵢ·A(x)` as (αᵢ, βᵢ) pairs.
    pub homogeneity_constraints: Vec<(Rational, Rational)>,
    /// Generators of the homogeneity field (the alphas; rational, so the
    /// field is Q itself).
    pub field_generators: Vec<Rational>,
    pub notes: Vec<String>,
}

impl SolutionFamily {
    /// `Some(0)` when the offset is forced, `None` when it is free.
    pub fn forced_offset(&self) -> Option<Rational> {
        (!self.offset_free).then(Rational::zero)
    }
}

/// Classify the affine solutions of the spec.
pub fn characterize(spec: &EquationSpec) -> SolutionFamily {
    let beta_sum = spec.beta_sum();
    let offset_free = beta_sum.is_one();
    let linear_part_allowed = spec.alphas == spec.betas;
    let mut notes = Vec::new();
    if !linear_part_allowed {
        notes.push(
            "some alpha differs from its beta: a rational matrix A satisfies A(alpha*x) = \
             alpha*A(x) identically, so (alpha - beta)*A = 0 forces A = 0; non-zero linear \
             parts for such specs are not representable in the rational-matrix model"
                .to_string(),
        );
    }
    if !offset_free {
        notes.push(format!(
            "sum of betas is {beta_sum}, not 1: the offset is forced to 0 by b = b*{beta_sum}"
        ));
    }
    SolutionFamily {
        linear_part_allowed,
        offset_free,
        beta_sum,
        homogeneity_constraints: spec
            .alphas
            .iter()
            .cloned()
            .zip(spec.betas.iter().cloned())
            .collect(),
        field_generators: spec.alphas.clone(),
        notes,
    }
}

/// First failing trial of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialViolation {
    pub trial: usize,
    pub tuple: Vec<QVector>,
    pub lhs: QVector,
    pub rhs: QVector,
}

impl fmt::Display for TrialViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tuple.iter().map(|p| format_point(p)).collect();
        write!(
            f,
            "trial {}: tuple [{}] gives lhs {} vs rhs {}",
            self.trial,
            parts.join(", "),
            format_point(&self.lhs),
            format_point(&self.rhs)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub passed: bool,
    pub trials: usize,
    pub seed: u64,
    pub first_violation: Option<TrialViolation>,
}

/// Verify a candidate on `trials` seeded tuples from the domain, comparing
/// both sides of the equation exactly. No tolerance: pass means equality on
/// every tuple.
pub fn verify_affine_solution(
    spec: &EquationSpec,
    domain: &Domain,
    candidate: &AffineMap,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, EquationError> {
    if trials == 0 {
        return Err(EquationError::NoTrials);
    }
    if candidate.domain_dimension() != domain.dimension() {
        return Err(EquationError::DimensionMismatch {
            candidate: candidate.domain_dimension(),
            domain: domain.dimension(),
        });
    }
    let invariance = check_invariance(domain, spec.alphas())?;
    if !invariance.holds {
        if let crate::domains::InvarianceCertificate::Violated(v) = invariance.certificate {
            return Err(EquationError::NotInvariant(v));
        }
        unreachable!("failed invariance always carries a violation");
    }

    let mut rng = SampleRng::new(seed);
    let mut first_violation = None;
    for trial in 0..trials {
        let tuple: Vec<QVector> = (0..spec.arity()).map(|_| rng.in_domain(domain)).collect();
        let combined = tuple
            .iter()
            .zip(spec.alphas())
            .fold(vec_zero(domain.dimension()), |acc, (x, a)| {
                vec_add(&acc, &vec_scale(a, x))
            });
        let lhs = candidate.eval(&combined);
        let rhs = tuple
            .iter()
            .zip(spec.betas())
            .fold(vec_zero(candidate.codomain_dimension()), |acc, (x, b)| {
                vec_add(&acc, &vec_scale(b, &candidate.eval(x)))
            });
        if lhs != rhs && first_violation.is_none() {
            first_violation = Some(TrialViolation {
                trial,
                tuple,
                lhs,
                rhs,
            });
        }
    }
    Ok(VerificationReport {
        passed: first_violation.is_none(),
        trials,
        seed,
        first_violation,
    })
}

/// Description of the homogeneity factors forced on the linear part.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneityField {
    pub generators: Vec<Rational>,
    /// Sample factors derivable from the generators, e.g. each reciprocal
    /// 1/α via A(x) = A(α·(x/α)) = α·A(x/α).
    pub derived_factors: Vec<Rational>,
    pub statement: String,
}

/// Close the homogeneity constraints over field operations. Rational
/// generators always generate Q itself, so additivity plus Q-homogeneity is
/// Q-linearity.
pub fn homogeneity_field(alphas: &[Rational]) -> Result<HomogeneityField, EquationError> {
    if alphas.is_empty() {
        return Err(EquationError::TooFewTerms(0));
    }
    if let Some(index) = alphas.iter().position(Zero::is_zero) {
        return Err(EquationError::ZeroCoefficient {
            side: "alpha",
            index,
        });
    }
    let mut derived: Vec<Rational> = Vec::new();
    for a in alphas {
        for factor in [a.clone(), a.recip()] {
            if !derived.contains(&factor) {
                derived.push(factor);
            }
        }
    }
    derived.sort();
    Ok(HomogeneityField {
        generators: alphas.to_vec(),
        derived_factors: derived,
        statement: "every polynomial and rational-function combination of the generators is a \
                    reachable homogeneity factor; with rational generators that closure is all \
                    of Q, and additivity plus Q-homogeneity makes A Q-linear"
            .to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{BoxDomain, Interval};
    use crate::rational::{rat, ratio};

    fn unit_interval() -> Domain {
        Domain::Interval(Interval::new(Some(rat(0)), Some(rat(1))).unwrap())
    }

    fn spec(alphas: &[Rational], betas: &[Rational]) -> EquationSpec {
        EquationSpec::new(alphas.to_vec(), betas.to_vec()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            EquationSpec::new(vec![rat(1)], vec![rat(1)]),
            Err(EquationError::TooFewTerms(1))
        ));
        assert!(matches!(
            EquationSpec::new(vec![rat(1), rat(0)], vec![rat(1), rat(1)]),
            Err(EquationError::ZeroCoefficient {
                side: "alpha",
                index: 1
            })
        ));
        assert!(matches!(
            EquationSpec::new(vec![rat(1), rat(1)], vec![rat(1)]),
            Err(EquationError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn characterize_jensen() {
        let family = characterize(&spec(
            &[ratio(1, 2), ratio(1, 2)],
            &[ratio(1, 2), ratio(1, 2)],
        ));
        assert!(family.linear_part_allowed);
        assert!(family.offset_free);
        assert_eq!(family.forced_offset(), None);
    }

    #[test]
    fn characterize_cauchy() {
        let family = characterize(&spec(&[rat(1), rat(1)], &[rat(1), rat(1)]));
        assert!(family.linear_part_allowed);
        assert!(!family.offset_free);
        assert_eq!(family.forced_offset(), Some(rat(0)));
    }

    #[test]
    fn characterize_mismatched_coefficients() {
        let family = characterize(&spec(&[rat(2), rat(3)], &[rat(3), rat(2)]));
        assert!(!family.linear_part_allowed);
        assert!(!family.offset_free);
        assert!(!family.notes.is_empty());
    }

    // the constraint A(2x) = 3A(x) on a spanning set forces A = 0 for
    // rational matrices: check on a batch of seeded random matrices
    #[test]
    fn mismatched_homogeneity_kills_random_matrices() {
        let mut rng = SampleRng::new(11);
        for _ in 0..50 {
            let entries: Vec<Rational> = (0..4).map(|_| rng.small()).collect();
            let a = QMatrix::from_rows(vec![
                vec![entries[0].clone(), entries[1].clone()],
                vec![entries[2].clone(), entries[3].clone()],
            ])
            .unwrap();
            if a.is_zero() {
                continue;
            }
            let violated = (0..2).any(|j| {
                let mut e = vec_zero(2);
                e[j] = rat(1);
                let doubled = a.mul_vec(&vec_scale(&rat(2), &e));
                let tripled = vec_scale(&rat(3), &a.mul_vec(&e));
                doubled != tripled
            });
            assert!(violated, "non-zero matrix cannot be (2,3)-homogeneous");
        }
    }

    #[test]
    fn verify_jensen_offset_passes() {
        let s = spec(&[ratio(1, 2), ratio(1, 2)], &[ratio(1, 2), ratio(1, 2)]);
        let candidate = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            vec![rat(7)],
        )
        .unwrap();
        let report = verify_affine_solution(&s, &unit_interval(), &candidate, 200, 42).unwrap();
        assert!(report.passed);
        assert!(report.first_violation.is_none());
    }

    #[test]
    fn verify_cauchy_offset_fails_with_witness() {
        // α = β = (1/2, 1/2) keeps (0,1) invariant but β-sum is enforced by
        // the betas; use betas (1,1) with alphas (1/2,1/2) to stay invariant
        // while breaking the offset rule: 3(x+y)/2 + 7 vs (3x+7)+(3y+7)
        let s = spec(&[ratio(1, 2), ratio(1, 2)], &[rat(1), rat(1)]);
        let candidate = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            vec![rat(7)],
        )
        .unwrap();
        let report = verify_affine_solution(&s, &unit_interval(), &candidate, 50, 42).unwrap();
        assert!(!report.passed);
        let v = report.first_violation.expect("witness");
        assert_eq!(v.trial, 0, "every tuple violates, so the first is trial 0");
        assert_ne!(v.lhs, v.rhs);
    }

    #[test]
    fn verify_rejects_non_invariant_domain() {
        // (0,1) with α = (1,1): image (0,2) leaves the domain
        let s = spec(&[rat(1), rat(1)], &[rat(1), rat(1)]);
        let candidate = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            vec![rat(7)],
        )
        .unwrap();
        let err = verify_affine_solution(&s, &unit_interval(), &candidate, 10, 42).unwrap_err();
        assert!(matches!(err, EquationError::NotInvariant(_)));
    }

    #[test]
    fn verify_inner_product_on_quadrant() {
        // Φ(x) = ⟨x, y⟩ solves the equation with positive α = β on the
        // open positive quadrant
        let s = spec(&[ratio(5, 3), ratio(7, 2)], &[ratio(5, 3), ratio(7, 2)]);
        let quadrant = Domain::Box(
            BoxDomain::new(vec![
                Interval::new(Some(rat(0)), None).unwrap(),
                Interval::new(Some(rat(0)), None).unwrap(),
            ])
            .unwrap(),
        );
        let candidate = AffineMap::new(
            QMatrix::from_rows(vec![vec![ratio(2, 9), rat(4)]]).unwrap(),
            vec![rat(0)],
        )
        .unwrap();
        let report = verify_affine_solution(&s, &quadrant, &candidate, 100, 3).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn verify_validates_shapes() {
        let s = spec(&[ratio(1, 2), ratio(1, 2)], &[ratio(1, 2), ratio(1, 2)]);
        // 2-column candidate on a 1-dimensional domain
        let wide = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(1), rat(2)]]).unwrap(),
            vec![rat(0)],
        )
        .unwrap();
        assert!(matches!(
            verify_affine_solution(&s, &unit_interval(), &wide, 5, 1),
            Err(EquationError::DimensionMismatch {
                candidate: 2,
                domain: 1
            })
        ));
        let ok = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(1)]]).unwrap(),
            vec![rat(0)],
        )
        .unwrap();
        assert!(matches!(
            verify_affine_solution(&s, &unit_interval(), &ok, 0, 1),
            Err(EquationError::NoTrials)
        ));
        assert!(matches!(
            AffineMap::new(
                QMatrix::from_rows(vec![vec![rat(1)]]).unwrap(),
                vec![rat(0), rat(0)]
            ),
            Err(EquationError::OffsetMismatch {
                offset: 2,
                height: 1
            })
        ));
    }

    #[test]
    fn verify_on_a_cone_domain() {
        // same inner-product shape, with the quadrant given as a cone
        let s = spec(&[rat(2), rat(3)], &[rat(2), rat(3)]);
        let quadrant = Domain::Cone(
            crate::domains::Cone::new(vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]).unwrap(),
        );
        let candidate = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(5), ratio(-1, 3)]]).unwrap(),
            vec![rat(0)],
        )
        .unwrap();
        let report = verify_affine_solution(&s, &quadrant, &candidate, 100, 17).unwrap();
        assert!(report.passed);
    }

    #[test]
    fn verify_is_deterministic_for_a_seed() {
        let s = spec(&[ratio(1, 2), ratio(1, 2)], &[rat(2), rat(2)]);
        let candidate = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            vec![rat(1)],
        )
        .unwrap();
        let a = verify_affine_solution(&s, &unit_interval(), &candidate, 30, 9).unwrap();
        let b = verify_affine_solution(&s, &unit_interval(), &candidate, 30, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn homogeneity_field_reports_reciprocals() {
        let field = homogeneity_field(&[rat(5)]).unwrap();
        assert!(field.derived_factors.contains(&ratio(1, 5)));
        assert!(field.derived_factors.contains(&rat(5)));

        let field = homogeneity_field(&[ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(field.generators.len(), 2);
        assert!(field.derived_factors.contains(&rat(2)));
    }

    // derived-factor sanity: A(x/5)·5 = A(x) holds for every rational matrix
    #[test]
    fn reciprocal_homogeneity_holds_for_matrices() {
        let mut rng = SampleRng::new(23);
        for _ in 0..20 {
            let a = QMatrix::from_rows(vec![vec![rng.small(), rng.small()]]).unwrap();
            let x = vec![rng.small(), rng.small()];
            let scaled = a.mul_vec(&vec_scale(&ratio(1, 5), &x));
            assert_eq!(vec_scale(&rat(5), &scaled), a.mul_vec(&x));
        }
    }
}
