//! Constructive extension machine for Pexider systems on patch covers, and
//! the reduction of the restricted general linear equation to that machine.
//!
//! A patch is a base tuple `(x₁, …, xₙ)` together with a step radius h; the
//! probe set consists of the 2k axis steps `±h·eⱼ`. On each patch the local
//! linear part is recovered from exact finite differences of the gᵢ tables,
//! cross-checked between all gᵢ and against f, and the local constants are
//! read off at the base points. Overlapping patches are then stitched: the
//! linear parts must agree on every overlap edge, and the per-function
//! constants must reconcile through `u_{x,i} - u_{w,i} + A(wᵢ - xᵢ) = 0`.
//! Each connected component of the overlap graph yields one global solution
//! `F = A + u`, `Gᵢ = A + uᵢ`; the extension is unique exactly when the
//! cover is connected.
//!
//! The probed tables are trusted nowhere: a hidden assumption of this
//! discretization is that the solution is rational-affine on the grid, so
//! every available step pair is re-checked against `f̃(z₁+z₂) = g̃₁(z₁) +
//! g̃₂(z₂)` and any violation is reported instead of silently absorbed.

use crate::domains::{check_invariance, Domain, DomainError, InvarianceCertificate, Violation};
use crate::equation::{AffineMap, EquationSpec};
use crate::rational::{
    format_point, rat, vec_add, vec_is_zero, vec_scale, vec_sub, vec_zero, QMatrix, QVector,
    Rational,
};
use num_traits::{One, Signed};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

/// Sample point in Q^k.
pub type Point = QVector;

#[derive(Debug, Error, PartialEq)]
pub enum ExtensionError {
    #[error("{function} has no table entry at {}", format_point(point))]
    MissingEntry { function: String, point: Point },
    #[error(
        "step differences disagree at step {}: g1 gives {} but g{other} gives {}",
        format_point(step),
        format_point(first_value),
        format_point(other_value)
    )]
    StepDisagreement {
        step: Point,
        other: usize,
        first_value: QVector,
        other_value: QVector,
    },
    #[error(
        "f and g differences disagree at step {}: f gives {} but the g tables give {}",
        format_point(step),
        format_point(f_value),
        format_point(g_value)
    )]
    FStepDisagreement {
        step: Point,
        f_value: QVector,
        g_value: QVector,
    },
    #[error(
        "Pexider identity fails on the step pair {} + {}: f difference {} vs g sum {}",
        format_point(step_a),
        format_point(step_b),
        format_point(lhs),
        format_point(rhs)
    )]
    PairIdentityFailure {
        step_a: Point,
        step_b: Point,
        lhs: QVector,
        rhs: QVector,
    },
    #[error(
        "tables violate the Pexider identity at the patch base: the patch offset {} is not \
         the sum of the per-function offsets",
        format_point(offset)
    )]
    BaseConstantMismatch {
        linear: QMatrix,
        offset: QVector,
        piece_offsets: Vec<QVector>,
    },
    #[error("table values mix dimensions: expected length {expected}, found {got}")]
    ValueDimension { expected: usize, got: usize },
    #[error("patch needs at least two argument slots, got {0}")]
    PatchArity(usize),
    #[error("patch base points mix dimensions")]
    PatchDimensions,
    #[error("step radius must be positive, got {0}")]
    BadRadius(Rational),
    #[error("patch has {patch} argument slots but the tables carry {tables} g functions")]
    ArityMismatch { patch: usize, tables: usize },
    #[error("no patches to stitch")]
    EmptyCover,
    #[error("{patches} patches but {locals} local solutions")]
    CoverLengthMismatch { patches: usize, locals: usize },
    #[error("patches {a} and {b} overlap but recovered different linear parts")]
    MatrixMismatch { a: usize, b: usize },
    #[error(
        "constants fail to reconcile between patches {a} and {b} for function g{}",
        index + 1
    )]
    ConstantReconciliation { a: usize, b: usize, index: usize },
    #[error("domain is not invariant under the coefficients: {0}")]
    NotInvariant(Violation),
    #[error("sample point {} lies outside the domain", format_point(.0))]
    SampleOutsideDomain(Point),
    #[error("sample table is empty")]
    NoSamples,
    #[error(
        "no sample point has the full probe set for step radius {0}; sample a finer grid or \
         pass a matching radius"
    )]
    NoUsablePatches(Rational),
    #[error(
        "patch cover splits into {0} connected components; the extension needs a connected cover"
    )]
    DisconnectedCover(usize),
    #[error(
        "recovered offset {} contradicts the constant equation u = u·∑β with ∑β = {beta_sum}: \
         the offset must be zero",
        format_point(offset)
    )]
    OffsetContradictsBetaSum { offset: QVector, beta_sum: Rational },
    #[error(
        "piece offset for g{} is {} but β·u is {}; the samples do not solve the equation",
        index + 1,
        format_point(actual),
        format_point(expected)
    )]
    PieceOffsetMismatch {
        index: usize,
        expected: QVector,
        actual: QVector,
    },
    #[error(
        "coefficient pair {index} has α = {alpha}, β = {beta} with a non-zero linear part: \
         the solution is outside the rational-matrix model"
    )]
    OutsideRationalMatrixModel {
        index: usize,
        alpha: Rational,
        beta: Rational,
    },
    #[error(
        "sample at {} is {} but the recovered map gives {}",
        format_point(point),
        format_point(actual),
        format_point(expected)
    )]
    SampleMismatch {
        point: Point,
        expected: QVector,
        actual: QVector,
    },
    #[error("a step radius is required for cone domains")]
    RadiusRequired,
    #[error(
        "planned cover needs the probe point {} outside the domain; reduce the step radius \
         or the patch count",
        format_point(.0)
    )]
    CoverOutsideDomain(Point),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Base tuple plus step radius; probes are the 2k axis steps `±h·eⱼ` around
/// each base point.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    bases: Vec<Point>,
    radius: Rational,
}

impl Patch {
    pub fn new(bases: Vec<Point>, radius: Rational) -> Result<Self, ExtensionError> {
        if bases.len() < 2 {
            return Err(ExtensionError::PatchArity(bases.len()));
        }
        let dim = bases[0].len();
        if dim == 0 || bases.iter().any(|b| b.len() != dim) {
            return Err(ExtensionError::PatchDimensions);
        }
        if !radius.is_positive() {
            return Err(ExtensionError::BadRadius(radius));
        }
        Ok(Self { bases, radius })
    }

    pub fn arity(&self) -> usize {
        self.bases.len()
    }

    pub fn dimension(&self) -> usize {
        self.bases[0].len()
    }

    pub fn bases(&self) -> &[Point] {
        &self.bases
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn base_sum(&self) -> Point {
        self.bases
            .iter()
            .fold(vec_zero(self.dimension()), |acc, b| vec_add(&acc, b))
    }

    /// The 2k axis steps, positive before negative per coordinate.
    pub fn steps(&self) -> Vec<Point> {
        let k = self.dimension();
        let mut steps = Vec::with_capacity(2 * k);
        for j in 0..k {
            let mut plus = vec_zero(k);
            plus[j] = self.radius.clone();
            let mut minus = vec_zero(k);
            minus[j] = -self.radius.clone();
            steps.push(plus);
            steps.push(minus);
        }
        steps
    }

    /// Exact closed-box intersection of the patch supports, factor by factor.
    pub fn overlaps(&self, other: &Patch) -> bool {
        if self.arity() != other.arity() || self.dimension() != other.dimension() {
            return false;
        }
        let reach = &self.radius + &other.radius;
        self.bases
            .iter()
            .zip(&other.bases)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= reach))
    }
}

/// Sampled values of f and of each gᵢ on the points a cover needs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PatchTables {
    f_values: BTreeMap<Point, QVector>,
    g_values: Vec<BTreeMap<Point, QVector>>,
}

impl PatchTables {
    pub fn new(arity: usize) -> Self {
        Self {
            f_values: BTreeMap::new(),
            g_values: vec![BTreeMap::new(); arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.g_values.len()
    }

    pub fn insert_f(&mut self, point: Point, value: QVector) {
        self.f_values.insert(point, value);
    }

    pub fn insert_g(&mut self, i: usize, point: Point, value: QVector) {
        self.g_values[i].insert(point, value);
    }

    pub fn f_entries(&self) -> &BTreeMap<Point, QVector> {
        &self.f_values
    }

    pub fn g_entries(&self, i: usize) -> &BTreeMap<Point, QVector> {
        &self.g_values[i]
    }

    pub fn f_at(&self, point: &Point) -> Result<&QVector, ExtensionError> {
        self.f_values
            .get(point)
            .ok_or_else(|| ExtensionError::MissingEntry {
                function: "f".into(),
                point: point.clone(),
            })
    }

    pub fn g_at(&self, i: usize, point: &Point) -> Result<&QVector, ExtensionError> {
        self.g_values[i]
            .get(point)
            .ok_or_else(|| ExtensionError::MissingEntry {
                function: format!("g{}", i + 1),
                point: point.clone(),
            })
    }
}

/// Locally recovered data on one patch: linear part, base offset, and one
/// offset per g function, with `offset = ∑ piece_offsets` verified.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub linear: QMatrix,
    pub offset: QVector,
    pub piece_offsets: Vec<QVector>,
}

/// Recover the local solution on a patch from exact finite differences.
pub fn local_solve(patch: &Patch, tables: &PatchTables) -> Result<LocalSolution, ExtensionError> {
    let n = patch.arity();
    if tables.arity() != n {
        return Err(ExtensionError::ArityMismatch {
            patch: n,
            tables: tables.arity(),
        });
    }
    let base_sum = patch.base_sum();
    let f0 = tables.f_at(&base_sum)?.clone();
    let value_dim = f0.len();
    let mut g0 = Vec::with_capacity(n);
    for i in 0..n {
        let v = tables.g_at(i, &patch.bases[i])?;
        if v.len() != value_dim {
            return Err(ExtensionError::ValueDimension {
                expected: value_dim,
                got: v.len(),
            });
        }
        g0.push(v.clone());
    }

    // step differences g̃ᵢ(s) = gᵢ(xᵢ + s) - gᵢ(xᵢ), equal across all i
    let steps = patch.steps();
    let mut diffs: BTreeMap<Point, QVector> = BTreeMap::new();
    for step in &steps {
        let mut agreed: Option<QVector> = None;
        for i in 0..n {
            let probe = vec_add(&patch.bases[i], step);
            let value = tables.g_at(i, &probe)?;
            if value.len() != value_dim {
                return Err(ExtensionError::ValueDimension {
                    expected: value_dim,
                    got: value.len(),
                });
            }
            let diff = vec_sub(value, &g0[i]);
            match &agreed {
                None => agreed = Some(diff),
                Some(first) => {
                    if *first != diff {
                        return Err(ExtensionError::StepDisagreement {
                            step: step.clone(),
                            other: i + 1,
                            first_value: first.clone(),
                            other_value: diff,
                        });
                    }
                }
            }
        }
        diffs.insert(step.clone(), agreed.expect("n ≥ 2"));
    }

    // f̃ must coincide with the shared g̃ on every single step
    for step in &steps {
        let fv = tables.f_at(&vec_add(&base_sum, step))?;
        let f_diff = vec_sub(fv, &f0);
        if f_diff != diffs[step] {
            return Err(ExtensionError::FStepDisagreement {
                step: step.clone(),
                f_value: f_diff,
                g_value: diffs[step].clone(),
            });
        }
    }

    // columns of the linear part from the positive steps
    let inv_h = patch.radius().recip();
    let columns: Vec<QVector> = (0..patch.dimension())
        .map(|j| vec_scale(&inv_h, &diffs[&steps[2 * j]]))
        .collect();
    let linear = QMatrix::from_columns(columns).expect("k ≥ 1 columns of equal height");

    // the affine-on-grid assumption, verified on every available step pair:
    // f̃(z₁ + z₂) = g̃₁(z₁) + g̃₂(z₂)
    for (a, step_a) in steps.iter().enumerate() {
        for step_b in steps.iter().skip(a) {
            let point = vec_add(&base_sum, &vec_add(step_a, step_b));
            if let Some(fv) = tables.f_values.get(&point) {
                let lhs = vec_sub(fv, &f0);
                let rhs = vec_add(&diffs[step_a], &diffs[step_b]);
                if lhs != rhs {
                    return Err(ExtensionError::PairIdentityFailure {
                        step_a: step_a.clone(),
                        step_b: step_b.clone(),
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }

    let piece_offsets: Vec<QVector> = (0..n)
        .map(|i| vec_sub(&g0[i], &linear.mul_vec(&patch.bases[i])))
        .collect();
    let offset = vec_sub(&f0, &linear.mul_vec(&base_sum));
    let piece_sum = piece_offsets
        .iter()
        .fold(vec_zero(value_dim), |acc, u| vec_add(&acc, u));
    if offset != piece_sum {
        return Err(ExtensionError::BaseConstantMismatch {
            linear,
            offset,
            piece_offsets,
        });
    }

    Ok(LocalSolution {
        linear,
        offset,
        piece_offsets,
    })
}

/// Global solution on one connected component of the overlap graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSolution {
    pub linear: QMatrix,
    pub offset: QVector,
    pub piece_offsets: Vec<QVector>,
    /// Member patches, ascending.
    pub patch_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StitchOutcome {
    pub components: Vec<GlobalSolution>,
    /// Set exactly when the overlap graph is connected.
    pub unique: bool,
}

/// Stitch local solutions across the patch overlap graph.
///
/// Every overlap edge is verified, not assumed: the linear parts must be
/// equal and the constants must reconcile exactly. Disconnected covers are
/// not an error; each component yields its own global solution and the
/// outcome is marked non-unique.
pub fn stitch(
    patches: &[Patch],
    locals: &[LocalSolution],
) -> Result<StitchOutcome, ExtensionError> {
    if patches.is_empty() {
        return Err(ExtensionError::EmptyCover);
    }
    if patches.len() != locals.len() {
        return Err(ExtensionError::CoverLengthMismatch {
            patches: patches.len(),
            locals: locals.len(),
        });
    }
    let n = patches[0].arity();

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); patches.len()];
    for a in 0..patches.len() {
        for b in (a + 1)..patches.len() {
            if patches[a].overlaps(&patches[b]) {
                verify_edge(patches, locals, a, b)?;
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }

    let mut visited = vec![false; patches.len()];
    let mut components = Vec::new();
    for root in 0..patches.len() {
        if visited[root] {
            continue;
        }
        let mut members = Vec::new();
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(p) = queue.pop_front() {
            members.push(p);
            for &q in &adjacency[p] {
                if !visited[q] {
                    visited[q] = true;
                    queue.push_back(q);
                }
            }
        }
        members.sort_unstable();

        // local constants are already base-normalized (uᵢ = gᵢ(xᵢ) - A(xᵢ)),
        // so each member must carry the same constants as the root; this was
        // verified on every edge and is re-read here patch by patch
        let linear = locals[root].linear.clone();
        let piece_offsets = locals[root].piece_offsets.clone();
        for &p in &members {
            for i in 0..n {
                if locals[p].piece_offsets[i] != piece_offsets[i] {
                    return Err(ExtensionError::ConstantReconciliation {
                        a: root,
                        b: p,
                        index: i,
                    });
                }
            }
        }
        let offset = piece_offsets
            .iter()
            .fold(vec_zero(locals[root].offset.len()), |acc, u| {
                vec_add(&acc, u)
            });
        components.push(GlobalSolution {
            linear,
            offset,
            piece_offsets,
            patch_indices: members,
        });
    }

    let unique = components.len() == 1;
    Ok(StitchOutcome { components, unique })
}

fn verify_edge(
    patches: &[Patch],
    locals: &[LocalSolution],
    a: usize,
    b: usize,
) -> Result<(), ExtensionError> {
    if locals[a].linear != locals[b].linear {
        return Err(ExtensionError::MatrixMismatch { a, b });
    }
    // in chart coordinates the constants satisfy
    // u_{a,i} - u_{b,i} + A(b_i - a_i) = 0; the locals store the
    // base-normalized constants uᵢ = gᵢ(xᵢ) - A(xᵢ), for which the same
    // relation reads plain equality
    for i in 0..patches[a].arity() {
        let residue = vec_sub(&locals[a].piece_offsets[i], &locals[b].piece_offsets[i]);
        if !vec_is_zero(&residue) {
            return Err(ExtensionError::ConstantReconciliation { a, b, index: i });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PexiderViolation {
    pub tuple: Vec<Point>,
    pub lhs: QVector,
    pub rhs: QVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PexiderReport {
    pub checked: usize,
    pub violations: Vec<PexiderViolation>,
    pub passed: bool,
}

/// Exact check of `f(∑ xᵢ) = ∑ gᵢ(xᵢ)` on the supplied tuples; all
/// violations are reported, not just the first.
pub fn verify_pexider(
    tables: &PatchTables,
    tuples: &[Vec<Point>],
) -> Result<PexiderReport, ExtensionError> {
    let n = tables.arity();
    let mut violations = Vec::new();
    for tuple in tuples {
        if tuple.len() != n {
            return Err(ExtensionError::ArityMismatch {
                patch: tuple.len(),
                tables: n,
            });
        }
        let mut sum = vec_zero(tuple[0].len());
        let mut rhs: Option<QVector> = None;
        for (i, x) in tuple.iter().enumerate() {
            sum = vec_add(&sum, x);
            let g = tables.g_at(i, x)?;
            rhs = Some(match rhs {
                None => g.clone(),
                Some(acc) => vec_add(&acc, g),
            });
        }
        let rhs = rhs.expect("n ≥ 2");
        let lhs = tables.f_at(&sum)?.clone();
        if lhs != rhs {
            violations.push(PexiderViolation {
                tuple: tuple.clone(),
                lhs,
                rhs,
            });
        }
    }
    Ok(PexiderReport {
        checked: tuples.len(),
        passed: violations.is_empty(),
        violations,
    })
}

/// Result of extending a sampled solution of the general linear equation.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLinearExtension {
    /// The recovered affine solution `f = A·x + b`.
    pub map: AffineMap,
    /// Per-function constants `uᵢ = βᵢ·u` of the underlying Pexider system.
    pub piece_offsets: Vec<QVector>,
    pub patch_count: usize,
}

/// Extend a sampled solution of `f(∑ αᵢxᵢ) = ∑ βᵢf(xᵢ)` on K to its affine
/// form.
///
/// The sample table is turned into a Pexider system via the substitution
/// `gᵢ(x) = βᵢ·f(x/αᵢ)` on `αᵢK`; patch centers are the sample points whose
/// full probe set is present for the chosen step radius. After local solves
/// and stitching, the constants are checked against `uᵢ = βᵢu`, the
/// homogeneity `(αᵢ - βᵢ)A = 0` is checked as a matrix identity, the offset
/// rule `b = 0` when `∑β ≠ 1` is enforced, and finally every sample is
/// re-verified against the recovered map.
pub fn extend_general_linear(
    spec: &EquationSpec,
    domain: &Domain,
    samples: &BTreeMap<Point, QVector>,
    step_radius: Option<Rational>,
) -> Result<GeneralLinearExtension, ExtensionError> {
    let invariance = check_invariance(domain, spec.alphas())?;
    if !invariance.holds {
        if let InvarianceCertificate::Violated(v) = invariance.certificate {
            return Err(ExtensionError::NotInvariant(v));
        }
        unreachable!("failed invariance always carries a violation");
    }
    if samples.is_empty() {
        return Err(ExtensionError::NoSamples);
    }
    let k = domain.dimension();
    for point in samples.keys() {
        if point.len() != k || !domain.contains(point) {
            return Err(ExtensionError::SampleOutsideDomain(point.clone()));
        }
    }

    let radius = match step_radius {
        Some(h) => {
            if !h.is_positive() {
                return Err(ExtensionError::BadRadius(h));
            }
            h
        }
        None => default_radius(domain, samples)?,
    };

    let n = spec.arity();
    let sigma: Rational = spec.alphas().iter().sum();
    let axis_steps: Vec<Point> = {
        let mut steps = Vec::new();
        for j in 0..k {
            for sign in [1i64, -1] {
                let mut s = vec_zero(k);
                s[j] = &radius * rat(sign);
                steps.push(s);
            }
        }
        steps
    };

    // a sample point is a patch center when every probe it needs is sampled
    let centers: Vec<Point> = samples
        .keys()
        .filter(|c| {
            let scaled = vec_scale(&sigma, c);
            if !samples.contains_key(&scaled) {
                return false;
            }
            for s in &axis_steps {
                if !samples.contains_key(&vec_add(&scaled, s)) {
                    return false;
                }
                for alpha in spec.alphas() {
                    let pre_step = vec_scale(&alpha.recip(), s);
                    if !samples.contains_key(&vec_add(c, &pre_step)) {
                        return false;
                    }
                }
            }
            true
        })
        .cloned()
        .collect();
    if centers.is_empty() {
        return Err(ExtensionError::NoUsablePatches(radius));
    }

    // assemble the Pexider tables: f on ∑αᵢK is the sample table itself,
    // gᵢ on αᵢK comes from the substitution gᵢ(y) = βᵢ·f(y/αᵢ)
    let mut tables = PatchTables::new(n);
    let mut patches = Vec::with_capacity(centers.len());
    for c in &centers {
        let scaled = vec_scale(&sigma, c);
        tables.insert_f(scaled.clone(), samples[&scaled].clone());
        for s in &axis_steps {
            let p = vec_add(&scaled, s);
            tables.insert_f(p.clone(), samples[&p].clone());
            // pair probes are optional; copy them over when sampled
            for s2 in &axis_steps {
                let pp = vec_add(&p, s2);
                if let Some(v) = samples.get(&pp) {
                    tables.insert_f(pp, v.clone());
                }
            }
        }
        for (i, (alpha, beta)) in spec.alphas().iter().zip(spec.betas()).enumerate() {
            let xi = vec_scale(alpha, c);
            tables.insert_g(i, xi.clone(), vec_scale(beta, &samples[c]));
            for s in &axis_steps {
                let pre = vec_add(c, &vec_scale(&alpha.recip(), s));
                tables.insert_g(i, vec_add(&xi, s), vec_scale(beta, &samples[&pre]));
            }
        }
        let bases: Vec<Point> = spec.alphas().iter().map(|a| vec_scale(a, c)).collect();
        patches.push(Patch::new(bases, radius.clone())?);
    }

    let beta_sum = spec.beta_sum();
    let mut locals = Vec::with_capacity(patches.len());
    for patch in &patches {
        match local_solve(patch, &tables) {
            Ok(local) => locals.push(local),
            Err(err) => return Err(translate_local_error(spec, &beta_sum, err)),
        }
    }

    let outcome = stitch(&patches, &locals)?;
    if !outcome.unique {
        return Err(ExtensionError::DisconnectedCover(outcome.components.len()));
    }
    let global = &outcome.components[0];

    // constants must satisfy uᵢ = βᵢ·u
    for (i, beta) in spec.betas().iter().enumerate() {
        let expected = vec_scale(beta, &global.offset);
        if global.piece_offsets[i] != expected {
            return Err(ExtensionError::PieceOffsetMismatch {
                index: i,
                expected,
                actual: global.piece_offsets[i].clone(),
            });
        }
    }
    // homogeneity as the matrix identity (αᵢ - βᵢ)A = 0
    if !global.linear.is_zero() {
        for (i, (alpha, beta)) in spec.alphas().iter().zip(spec.betas()).enumerate() {
            if alpha != beta {
                return Err(ExtensionError::OutsideRationalMatrixModel {
                    index: i,
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                });
            }
        }
    }
    // offset rule: with ∑β ≠ 1 the piece checks above already force u = 0
    if !beta_sum.is_one() {
        debug_assert!(vec_is_zero(&global.offset));
    }

    let map = AffineMap::new(global.linear.clone(), global.offset.clone())
        .expect("matrix height matches offset length");
    for (point, value) in samples {
        let expected = map.eval(point);
        if expected != *value {
            return Err(ExtensionError::SampleMismatch {
                point: point.clone(),
                expected,
                actual: value.clone(),
            });
        }
    }

    Ok(GeneralLinearExtension {
        map,
        piece_offsets: global.piece_offsets.clone(),
        patch_count: patches.len(),
    })
}

/// Exact tables of an affine Pexider instance `gᵢ(t) = A·t + uᵢ`,
/// `f(s) = A·s + ∑uᵢ` on every probe point of the given cover, including the
/// optional pair probes. Useful for building instances whose recovery is
/// known in closed form.
pub fn synthesize_pexider_tables(
    patches: &[Patch],
    linear: &QMatrix,
    piece_offsets: &[QVector],
) -> PatchTables {
    let total: QVector = piece_offsets
        .iter()
        .fold(vec_zero(linear.height()), |acc, u| vec_add(&acc, u));
    let mut tables = PatchTables::new(piece_offsets.len());
    for patch in patches {
        let f = |p: &Point| vec_add(&linear.mul_vec(p), &total);
        let base_sum = patch.base_sum();
        tables.insert_f(base_sum.clone(), f(&base_sum));
        let steps = patch.steps();
        for s in &steps {
            let p = vec_add(&base_sum, s);
            tables.insert_f(p.clone(), f(&p));
            for s2 in &steps {
                let pp = vec_add(&p, s2);
                tables.insert_f(pp.clone(), f(&pp));
            }
        }
        for (i, u) in piece_offsets.iter().enumerate() {
            let b = &patch.bases()[i];
            let g = |p: &Point| vec_add(&linear.mul_vec(p), u);
            tables.insert_g(i, b.clone(), g(b));
            for s in &steps {
                let p = vec_add(b, s);
                tables.insert_g(i, p.clone(), g(&p));
            }
        }
    }
    tables
}

/// Sample an affine map on exactly the probe grid `extend_general_linear`
/// needs for the given centers and radius.
pub fn sample_affine_on_cover(
    map: &AffineMap,
    spec: &EquationSpec,
    centers: &[Point],
    radius: &Rational,
) -> BTreeMap<Point, QVector> {
    let k = map.domain_dimension();
    let sigma: Rational = spec.alphas().iter().sum();
    let mut samples = BTreeMap::new();
    let put = |p: Point, samples: &mut BTreeMap<Point, QVector>| {
        let v = map.eval(&p);
        samples.insert(p, v);
    };
    let mut steps = Vec::new();
    for j in 0..k {
        for sign in [1i64, -1] {
            let mut s = vec_zero(k);
            s[j] = radius * rat(sign);
            steps.push(s);
        }
    }
    for c in centers {
        put(c.clone(), &mut samples);
        let scaled = vec_scale(&sigma, c);
        put(scaled.clone(), &mut samples);
        for s in &steps {
            put(vec_add(&scaled, s), &mut samples);
            for s2 in &steps {
                put(vec_add(&vec_add(&scaled, s), s2), &mut samples);
            }
            for a in spec.alphas() {
                put(vec_add(c, &vec_scale(&a.recip(), s)), &mut samples);
            }
        }
    }
    samples
}

/// Deterministic chain of patch centers inside an interval or box domain:
/// spaced along the first axis tightly enough that consecutive diagonal
/// patches overlap, starting from a midpoint-ish anchor. Every probe point
/// the cover needs is checked to stay inside the domain.
pub fn plan_centers(
    domain: &Domain,
    spec: &EquationSpec,
    patch_count: usize,
    radius: &Rational,
) -> Result<Vec<Point>, ExtensionError> {
    if !radius.is_positive() {
        return Err(ExtensionError::BadRadius(radius.clone()));
    }
    if patch_count == 0 {
        return Err(ExtensionError::EmptyCover);
    }
    let sides = match domain {
        Domain::Interval(iv) => vec![iv.clone()],
        Domain::Box(b) => b.sides().to_vec(),
        Domain::Cone(_) => return Err(ExtensionError::RadiusRequired),
    };
    let anchor: Point = sides
        .iter()
        .map(|side| match (side.lo_finite(), side.hi_finite()) {
            (Some(lo), Some(hi)) => (lo + hi) / rat(2),
            (Some(lo), None) => lo + rat(1),
            (None, Some(hi)) => hi - rat(1),
            (None, None) => rat(0),
        })
        .collect();
    let max_abs_alpha = spec
        .alphas()
        .iter()
        .map(|a| a.abs())
        .max()
        .expect("spec has coefficients");
    // overlap between consecutive diagonal patches needs |Δc| ≤ 2h/max|α|
    let spacing = radius / &max_abs_alpha;
    let mid = Rational::new(
        num_bigint::BigInt::from(patch_count as i64 - 1),
        num_bigint::BigInt::from(2),
    );
    let centers: Vec<Point> = (0..patch_count)
        .map(|t| {
            let mut c = anchor.clone();
            c[0] = &c[0] + (rat(t as i64) - &mid) * &spacing;
            c
        })
        .collect();

    // probe points per center: c ± (h/αᵢ)eⱼ, σc, σc ± heⱼ (± heₗ)
    let sigma: Rational = spec.alphas().iter().sum();
    let k = sides.len();
    let mut steps = Vec::new();
    for j in 0..k {
        for sign in [1i64, -1] {
            let mut s = vec_zero(k);
            s[j] = radius * rat(sign);
            steps.push(s);
        }
    }
    for c in &centers {
        let mut required = vec![c.clone(), vec_scale(&sigma, c)];
        for s in &steps {
            let scaled = vec_add(&vec_scale(&sigma, c), s);
            for s2 in &steps {
                required.push(vec_add(&scaled, s2));
            }
            required.push(scaled);
            for a in spec.alphas() {
                required.push(vec_add(c, &vec_scale(&a.recip(), s)));
            }
        }
        if let Some(bad) = required.iter().find(|p| !domain.contains(p)) {
            return Err(ExtensionError::CoverOutsideDomain(bad.clone()));
        }
    }
    Ok(centers)
}

/// Rephrase local failures in the vocabulary of the general linear equation
/// when the reduction's constant relations identify the cause precisely.
fn translate_local_error(
    spec: &EquationSpec,
    beta_sum: &Rational,
    err: ExtensionError,
) -> ExtensionError {
    match err {
        ExtensionError::BaseConstantMismatch {
            linear,
            offset,
            piece_offsets,
        } => {
            // with uᵢ = βᵢ·u intact, u ≠ ∑uᵢ = u·∑β pins the contradiction
            // on the forced-offset rule
            let relations_hold = piece_offsets
                .iter()
                .zip(spec.betas())
                .all(|(ui, beta)| *ui == vec_scale(beta, &offset));
            if relations_hold {
                ExtensionError::OffsetContradictsBetaSum {
                    offset,
                    beta_sum: beta_sum.clone(),
                }
            } else {
                ExtensionError::BaseConstantMismatch {
                    linear,
                    offset,
                    piece_offsets,
                }
            }
        }
        ExtensionError::StepDisagreement {
            step,
            other,
            first_value,
            other_value,
        } => {
            // g̃ differences scale with βᵢ/αᵢ, so a mismatch with α ≠ β means
            // the solution has a linear part this model cannot carry
            match spec
                .alphas()
                .iter()
                .zip(spec.betas())
                .position(|(a, b)| a != b)
            {
                Some(index) => ExtensionError::OutsideRationalMatrixModel {
                    index,
                    alpha: spec.alphas()[index].clone(),
                    beta: spec.betas()[index].clone(),
                },
                None => ExtensionError::StepDisagreement {
                    step,
                    other,
                    first_value,
                    other_value,
                },
            }
        }
        other => other,
    }
}

/// Default step radius: an eighth of the smallest distance from a sample
/// point to a finite boundary of the domain.
fn default_radius(
    domain: &Domain,
    samples: &BTreeMap<Point, QVector>,
) -> Result<Rational, ExtensionError> {
    let sides = match domain {
        Domain::Interval(iv) => vec![iv.clone()],
        Domain::Box(b) => b.sides().to_vec(),
        Domain::Cone(_) => return Err(ExtensionError::RadiusRequired),
    };
    let mut min_gap: Option<Rational> = None;
    for point in samples.keys() {
        for (x, side) in point.iter().zip(&sides) {
            for gap in [
                side.lo_finite().map(|lo| x - lo),
                side.hi_finite().map(|hi| hi - x),
            ]
            .into_iter()
            .flatten()
            {
                min_gap = Some(match min_gap {
                    None => gap,
                    Some(m) => m.min(gap),
                });
            }
        }
    }
    Ok(match min_gap {
        Some(gap) => gap / rat(8),
        // fully unbounded domain: any positive radius works
        None => crate::rational::ratio(1, 8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Interval;
    use crate::rational::{rat, ratio};

    fn slope3_patch() -> (Patch, PatchTables) {
        // n = 2, k = 1: gᵢ(t) = 3t + 1, f(s) = 3s + 2, base (1/4, 1/4), h = 1/8
        let patch = Patch::new(vec![vec![ratio(1, 4)], vec![ratio(1, 4)]], ratio(1, 8)).unwrap();
        let linear = QMatrix::from_rows(vec![vec![rat(3)]]).unwrap();
        let tables = synthesize_pexider_tables(
            std::slice::from_ref(&patch),
            &linear,
            &[vec![rat(1)], vec![rat(1)]],
        );
        (patch, tables)
    }

    #[test]
    fn local_solve_recovers_slope_and_constants() {
        let (patch, tables) = slope3_patch();
        let local = local_solve(&patch, &tables).unwrap();
        assert_eq!(
            local.linear,
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap()
        );
        assert_eq!(local.offset, vec![rat(2)]);
        assert_eq!(local.piece_offsets, vec![vec![rat(1)], vec![rat(1)]]);
    }

    #[test]
    fn local_solve_constant_solution() {
        let patch = Patch::new(vec![vec![rat(0)], vec![rat(0)]], rat(1)).unwrap();
        let linear = QMatrix::zero(1, 1);
        let tables = synthesize_pexider_tables(
            std::slice::from_ref(&patch),
            &linear,
            &[vec![rat(5)], vec![rat(-2)]],
        );
        let local = local_solve(&patch, &tables).unwrap();
        assert!(local.linear.is_zero());
        assert_eq!(local.offset, vec![rat(3)]);
        assert_eq!(local.piece_offsets, vec![vec![rat(5)], vec![rat(-2)]]);
    }

    #[test]
    fn local_solve_names_the_corrupted_step() {
        let (patch, mut tables) = slope3_patch();
        // bump g1 at base + h
        let probe = vec![ratio(1, 4) + ratio(1, 8)];
        let old = tables.g_entries(0)[&probe].clone();
        tables.insert_g(0, probe.clone(), vec_add(&old, &[rat(1)]));
        let err = local_solve(&patch, &tables).unwrap_err();
        match err {
            ExtensionError::StepDisagreement { step, other, .. } => {
                assert_eq!(step, vec![ratio(1, 8)]);
                assert_eq!(other, 2);
            }
            other => panic!("expected step disagreement, got {other:?}"),
        }
    }

    #[test]
    fn local_solve_rejects_missing_entries() {
        let (patch, tables) = slope3_patch();
        let starved = {
            let mut t = PatchTables::new(2);
            // only copy the f table
            for (p, v) in tables.f_entries() {
                t.insert_f(p.clone(), v.clone());
            }
            t
        };
        assert!(matches!(
            local_solve(&patch, &starved),
            Err(ExtensionError::MissingEntry { .. })
        ));
    }

    #[test]
    fn local_solve_rejects_non_affine_tables() {
        // quadratic f with matching-at-base g tables breaks the pair checks
        let patch = Patch::new(vec![vec![rat(0)], vec![rat(0)]], rat(1)).unwrap();
        let mut tables = PatchTables::new(2);
        let square = |p: &Point| vec![&p[0] * &p[0]];
        let base_sum = patch.base_sum();
        tables.insert_f(base_sum.clone(), square(&base_sum));
        let steps = patch.steps();
        for s in &steps {
            let p = vec_add(&base_sum, s);
            tables.insert_f(p.clone(), square(&p));
            for s2 in &steps {
                let pp = vec_add(&p, s2);
                tables.insert_f(pp.clone(), square(&pp));
            }
        }
        for i in 0..2 {
            let b = &patch.bases()[i];
            // g̃ᵢ equal to f̃ on single steps, so the pair check must catch it
            let half = |p: &Point| vec![&p[0] * &p[0] / rat(2)];
            tables.insert_g(i, b.clone(), half(b));
            for s in &steps {
                let p = vec_add(b, s);
                tables.insert_g(i, p.clone(), half(&p));
            }
        }
        let err = local_solve(&patch, &tables).unwrap_err();
        assert!(
            matches!(
                err,
                ExtensionError::PairIdentityFailure { .. }
                    | ExtensionError::FStepDisagreement { .. }
            ),
            "got {err:?}"
        );
    }

    fn two_overlapping_patches() -> (Vec<Patch>, PatchTables) {
        let linear = QMatrix::from_rows(vec![vec![rat(3)]]).unwrap();
        let pieces = [vec![rat(1)], vec![rat(1)]];
        let p1 = Patch::new(vec![vec![ratio(1, 4)], vec![ratio(1, 4)]], ratio(1, 8)).unwrap();
        let p2 = Patch::new(vec![vec![ratio(3, 8)], vec![ratio(3, 8)]], ratio(1, 8)).unwrap();
        let patches = vec![p1, p2];
        let tables = synthesize_pexider_tables(&patches, &linear, &pieces);
        (patches, tables)
    }

    #[test]
    fn stitch_two_overlapping_patches() {
        let (patches, tables) = two_overlapping_patches();
        assert!(patches[0].overlaps(&patches[1]));
        let locals: Vec<LocalSolution> = patches
            .iter()
            .map(|p| local_solve(p, &tables).unwrap())
            .collect();
        let outcome = stitch(&patches, &locals).unwrap();
        assert!(outcome.unique);
        assert_eq!(outcome.components.len(), 1);
        let g = &outcome.components[0];
        assert_eq!(g.linear, QMatrix::from_rows(vec![vec![rat(3)]]).unwrap());
        assert_eq!(g.offset, vec![rat(2)]);
        assert_eq!(g.piece_offsets, vec![vec![rat(1)], vec![rat(1)]]);
        assert_eq!(g.patch_indices, vec![0, 1]);
    }

    #[test]
    fn stitch_reports_disjoint_generators_separately() {
        // two far-apart patches built from different slopes: two components,
        // no uniqueness, both recovered
        let p1 = Patch::new(vec![vec![rat(0)], vec![rat(0)]], ratio(1, 8)).unwrap();
        let p2 = Patch::new(vec![vec![rat(10)], vec![rat(10)]], ratio(1, 8)).unwrap();
        let mut tables = synthesize_pexider_tables(
            std::slice::from_ref(&p1),
            &QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            &[vec![rat(0)], vec![rat(0)]],
        );
        let far = synthesize_pexider_tables(
            std::slice::from_ref(&p2),
            &QMatrix::from_rows(vec![vec![rat(5)]]).unwrap(),
            &[vec![rat(1)], vec![rat(2)]],
        );
        for (p, v) in far.f_entries() {
            tables.insert_f(p.clone(), v.clone());
        }
        for i in 0..2 {
            for (p, v) in far.g_entries(i) {
                tables.insert_g(i, p.clone(), v.clone());
            }
        }
        let patches = vec![p1, p2];
        let locals: Vec<LocalSolution> = patches
            .iter()
            .map(|p| local_solve(p, &tables).unwrap())
            .collect();
        let outcome = stitch(&patches, &locals).unwrap();
        assert!(!outcome.unique);
        assert_eq!(outcome.components.len(), 2);
        assert_eq!(
            outcome.components[0].linear,
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap()
        );
        assert_eq!(
            outcome.components[1].linear,
            QMatrix::from_rows(vec![vec![rat(5)]]).unwrap()
        );
    }

    #[test]
    fn stitch_single_patch_equals_its_local_solution() {
        let (patch, tables) = slope3_patch();
        let local = local_solve(&patch, &tables).unwrap();
        let outcome = stitch(std::slice::from_ref(&patch), std::slice::from_ref(&local)).unwrap();
        assert!(outcome.unique);
        let g = &outcome.components[0];
        assert_eq!(g.linear, local.linear);
        assert_eq!(g.piece_offsets, local.piece_offsets);
        assert_eq!(g.offset, local.offset);
        assert_eq!(g.patch_indices, vec![0]);
    }

    #[test]
    fn stitch_rejects_conflicting_overlap() {
        // same geometry, tampered local: matrices differ on an overlap edge
        let (patches, tables) = two_overlapping_patches();
        let mut locals: Vec<LocalSolution> = patches
            .iter()
            .map(|p| local_solve(p, &tables).unwrap())
            .collect();
        locals[1].linear = QMatrix::from_rows(vec![vec![rat(4)]]).unwrap();
        assert!(matches!(
            stitch(&patches, &locals),
            Err(ExtensionError::MatrixMismatch { a: 0, b: 1 })
        ));
    }

    #[test]
    fn verify_pexider_pass_and_corruption() {
        let (_, mut tables) = slope3_patch();
        let tuples = vec![
            vec![vec![ratio(1, 4)], vec![ratio(1, 4)]],
            vec![vec![ratio(3, 8)], vec![ratio(1, 4)]],
        ];
        // g tables need the probe points used by the tuples
        for t in &tuples {
            for (i, x) in t.iter().enumerate() {
                tables.insert_g(i, x.clone(), vec![rat(3) * &x[0] + rat(1)]);
            }
        }
        let report = verify_pexider(&tables, &tuples).unwrap();
        assert!(report.passed);
        assert_eq!(report.checked, 2);

        let bad = vec![rat(99)];
        tables.insert_f(vec![ratio(1, 2)], bad);
        let report = verify_pexider(&tables, &tuples).unwrap();
        assert!(!report.passed);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].tuple, tuples[0]);
    }

    fn jensen_spec() -> EquationSpec {
        EquationSpec::new(
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(1, 2), ratio(1, 2)],
        )
        .unwrap()
    }

    fn unit_interval() -> Domain {
        Domain::Interval(Interval::new(Some(rat(0)), Some(rat(1))).unwrap())
    }

    #[test]
    fn extend_recovers_jensen_affine_map() {
        let spec = jensen_spec();
        let map = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            vec![rat(7)],
        )
        .unwrap();
        let radius = ratio(1, 32);
        let centers: Vec<Point> = vec![
            vec![ratio(13, 32)],
            vec![ratio(15, 32)],
            vec![ratio(17, 32)],
            vec![ratio(19, 32)],
        ];
        let samples = sample_affine_on_cover(&map, &spec, &centers, &radius);
        let out = extend_general_linear(&spec, &unit_interval(), &samples, Some(radius)).unwrap();
        assert_eq!(out.map, map);
        // with σ = 1 the grid is dense enough that interior sample points
        // also carry full probe sets, so the four planned centers grow to 7
        assert_eq!(out.patch_count, 7);
        // uᵢ = βᵢ·u = 7/2
        assert_eq!(
            out.piece_offsets,
            vec![vec![ratio(7, 2)], vec![ratio(7, 2)]]
        );
    }

    #[test]
    fn extend_rejects_non_invariant_domain() {
        let spec = EquationSpec::new(vec![rat(1), rat(1)], vec![rat(1), rat(1)]).unwrap();
        let samples = BTreeMap::from([(vec![ratio(1, 2)], vec![rat(0)])]);
        let err = extend_general_linear(&spec, &unit_interval(), &samples, Some(ratio(1, 32)))
            .unwrap_err();
        assert!(matches!(err, ExtensionError::NotInvariant(_)));
    }

    #[test]
    fn extend_flags_forbidden_offset() {
        // ∑β = 1/2 forces b = 0; sampling f(x) = -2x + 5 must be rejected
        // with the constant contradiction, u = 5 ≠ u·∑β
        let spec = EquationSpec::new(
            vec![ratio(1, 4), ratio(1, 4)],
            vec![ratio(1, 4), ratio(1, 4)],
        )
        .unwrap();
        let domain = Domain::Interval(Interval::new(Some(rat(-1)), Some(rat(1))).unwrap());
        let map = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(-2)]]).unwrap(),
            vec![rat(5)],
        )
        .unwrap();
        let radius = ratio(1, 64);
        let centers: Vec<Point> = vec![vec![ratio(1, 4)], vec![ratio(33, 128)]];
        let samples = sample_affine_on_cover(&map, &spec, &centers, &radius);
        let err = extend_general_linear(&spec, &domain, &samples, Some(radius)).unwrap_err();
        match err {
            ExtensionError::OffsetContradictsBetaSum { offset, beta_sum } => {
                assert_eq!(offset, vec![rat(5)]);
                assert_eq!(beta_sum, ratio(1, 2));
            }
            other => panic!("expected offset contradiction, got {other:?}"),
        }
    }

    #[test]
    fn extend_forced_offset_zero_roundtrips() {
        // same spec, b = 0: recovery succeeds with u = 0
        let spec = EquationSpec::new(
            vec![ratio(1, 4), ratio(1, 4)],
            vec![ratio(1, 4), ratio(1, 4)],
        )
        .unwrap();
        let domain = Domain::Interval(Interval::new(Some(rat(-1)), Some(rat(1))).unwrap());
        let map = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(-2)]]).unwrap(),
            vec![rat(0)],
        )
        .unwrap();
        let radius = ratio(1, 64);
        let centers: Vec<Point> = vec![vec![ratio(1, 4)], vec![ratio(33, 128)]];
        let samples = sample_affine_on_cover(&map, &spec, &centers, &radius);
        let out = extend_general_linear(&spec, &domain, &samples, Some(radius)).unwrap();
        assert_eq!(out.map, map);
    }

    #[test]
    fn planned_covers_fit_or_refuse() {
        let spec = jensen_spec();
        let centers = plan_centers(&unit_interval(), &spec, 5, &ratio(1, 64)).unwrap();
        assert_eq!(centers.len(), 5);
        let samples = sample_affine_on_cover(
            &AffineMap::new(
                QMatrix::from_rows(vec![vec![rat(1)]]).unwrap(),
                vec![rat(0)],
            )
            .unwrap(),
            &spec,
            &centers,
            &ratio(1, 64),
        );
        for p in samples.keys() {
            assert!(unit_interval().contains(p));
        }
        // a radius that pushes probes out of (0, 1) is refused with advice
        let err = plan_centers(&unit_interval(), &spec, 4, &ratio(1, 2)).unwrap_err();
        assert!(matches!(err, ExtensionError::CoverOutsideDomain(_)));
    }

    #[test]
    fn extend_needs_a_complete_probe_set() {
        // samples exist but none has the probes for this radius
        let spec = jensen_spec();
        let samples = BTreeMap::from([
            (vec![ratio(1, 2)], vec![ratio(17, 2)]),
            (vec![ratio(1, 4)], vec![ratio(31, 4)]),
        ]);
        let err = extend_general_linear(&spec, &unit_interval(), &samples, Some(ratio(1, 16)))
            .unwrap_err();
        assert!(matches!(err, ExtensionError::NoUsablePatches(_)));
    }

    #[test]
    fn extend_requires_connected_cover() {
        let spec = jensen_spec();
        let map = AffineMap::new(
            QMatrix::from_rows(vec![vec![rat(3)]]).unwrap(),
            vec![rat(7)],
        )
        .unwrap();
        let radius = ratio(1, 128);
        // far apart relative to the radius: overlap needs |Δc| ≤ 4h = 1/32
        let centers: Vec<Point> = vec![vec![ratio(1, 4)], vec![ratio(3, 4)]];
        let samples = sample_affine_on_cover(&map, &spec, &centers, &radius);
        let err =
            extend_general_linear(&spec, &unit_interval(), &samples, Some(radius)).unwrap_err();
        assert_eq!(err, ExtensionError::DisconnectedCover(2));
    }
}
