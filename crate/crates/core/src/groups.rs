//! Exhaustive Pexider engine over finite abelian groups.
//!
//! Groups are products of cyclic groups `Z_{m₁} × … × Z_{m_r}` with
//! componentwise modular arithmetic. Everything here is decided by full
//! enumeration behind an explicit size guard: a verdict is a finite proof,
//! never a sample. Witnesses are reported for the lexicographically smallest
//! violating tuple.

use std::fmt;
use thiserror::Error;

const EVALUATION_GUARD: u128 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("modulus {0} is invalid; each cyclic factor needs modulus ≥ 2")]
    BadModulus(u64),
    #[error("group must have at least one cyclic factor")]
    NoFactors,
    #[error("exhaustive check needs {needed} evaluations, over the guard of {limit}")]
    SizeGuard { needed: u128, limit: u128 },
    #[error("functions must share one domain and one codomain")]
    MismatchedCarrier,
    #[error("a Pexider system needs at least two g-functions, got {0}")]
    TooFewFunctions(usize),
    #[error("weight {index} is zero; weights must be non-zero integers")]
    ZeroWeight { index: usize },
    #[error("table has {got} entries but the domain has {expected} elements")]
    WrongTableSize { expected: usize, got: usize },
    #[error("table value {0:?} is not an element of the codomain")]
    BadTableValue(Vec<u64>),
    #[error("the Pexider equation fails at {0:?}")]
    EquationFails(Vec<Vec<u64>>),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

/// Element of a product of cyclic groups, one residue per factor.
pub type GroupElem = Vec<u64>;

/// Product of cyclic groups `Z_{m₁} × … × Z_{m_r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self, GroupError> {
        if moduli.is_empty() {
            return Err(GroupError::NoFactors);
        }
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(GroupError::BadModulus(m));
        }
        Ok(Self { moduli })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u128 {
        self.moduli.iter().map(|&m| m as u128).product()
    }

    pub fn zero(&self) -> GroupElem {
        vec![0; self.moduli.len()]
    }

    pub fn is_element(&self, e: &GroupElem) -> bool {
        e.len() == self.moduli.len() && e.iter().zip(&self.moduli).all(|(&x, &m)| x < m)
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect()
    }

    pub fn sub(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + m - y) % m)
            .collect()
    }

    /// Integer multiple `n·a`, with negative n handled by wraparound.
    pub fn scale(&self, n: i64, a: &GroupElem) -> GroupElem {
        a.iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| ((n as i128 * x as i128).rem_euclid(m as i128)) as u64)
            .collect()
    }

    /// All elements in lexicographic order (first factor most significant).
    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut current = self.zero();
        loop {
            out.push(current.clone());
            // increment as a mixed-radix counter, last digit fastest
            let mut idx = self.moduli.len();
            loop {
                if idx == 0 {
                    return out;
                }
                idx -= 1;
                current[idx] += 1;
                if current[idx] < self.moduli[idx] {
                    break;
                }
                current[idx] = 0;
            }
        }
    }

    /// Lexicographic rank of an element.
    pub fn index_of(&self, e: &GroupElem) -> usize {
        let mut idx: u128 = 0;
        for (&x, &m) in e.iter().zip(&self.moduli) {
            idx = idx * m as u128 + x as u128;
        }
        idx as usize
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "Z{m}")?;
        }
        Ok(())
    }
}

/// Total function between finite abelian groups, stored as a value table in
/// lexicographic element order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupFunction {
    domain: FiniteAbelianGroup,
    codomain: FiniteAbelianGroup,
    table: Vec<GroupElem>,
}

impl GroupFunction {
    pub fn new(
        domain: FiniteAbelianGroup,
        codomain: FiniteAbelianGroup,
        table: Vec<GroupElem>,
    ) -> Result<Self, GroupError> {
        let expected = domain.order() as usize;
        if table.len() != expected {
            return Err(GroupError::WrongTableSize {
                expected,
                got: table.len(),
            });
        }
        if let Some(bad) = table.iter().find(|v| !codomain.is_element(v)) {
            return Err(GroupError::BadTableValue(bad.clone()));
        }
        Ok(Self {
            domain,
            codomain,
            table,
        })
    }

    pub fn from_fn(
        domain: FiniteAbelianGroup,
        codomain: FiniteAbelianGroup,
        f: impl Fn(&GroupElem) -> GroupElem,
    ) -> Result<Self, GroupError> {
        let table = domain.elements().iter().map(&f).collect();
        Self::new(domain, codomain, table)
    }

    pub fn domain(&self) -> &FiniteAbelianGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteAbelianGroup {
        &self.codomain
    }

    pub fn table(&self) -> &[GroupElem] {
        &self.table
    }

    pub fn eval(&self, x: &GroupElem) -> &GroupElem {
        &self.table[self.domain.index_of(x)]
    }

    /// Exhaustive additivity check; `None` means homomorphism, otherwise the
    /// lexicographically smallest failing pair is returned.
    pub fn homomorphism_failure(&self) -> Option<(GroupElem, GroupElem)> {
        let elements = self.domain.elements();
        for a in &elements {
            for b in &elements {
                let lhs = self.eval(&self.domain.add(a, b));
                let rhs = self.codomain.add(self.eval(a), self.eval(b));
                if *lhs != rhs {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        None
    }
}

/// Pexider solution split into a homomorphism and constants:
/// `f = A + y`, `gᵢ = A + yᵢ`, `y = ∑ yᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub hom: GroupFunction,
    pub offset: GroupElem,
    pub piece_offsets: Vec<GroupElem>,
}

fn guard(needed: u128) -> Result<(), GroupError> {
    if needed > EVALUATION_GUARD {
        return Err(GroupError::SizeGuard {
            needed,
            limit: EVALUATION_GUARD,
        });
    }
    Ok(())
}

/// Enumerate every homomorphism G → H.
///
/// A homomorphism out of a product of cyclic groups is fixed by the images
/// of the canonical generators, and a candidate image for a generator of
/// order m must itself be killed by m; per codomain factor Z_n that leaves
/// exactly gcd(m, n) choices. Each enumerated map is still verified
/// exhaustively on all pairs.
pub fn enumerate_homomorphisms(
    g: &FiniteAbelianGroup,
    h: &FiniteAbelianGroup,
) -> Result<Vec<GroupFunction>, GroupError> {
    guard(g.order() * h.order())?;
    let predicted: u128 = g
        .moduli()
        .iter()
        .map(|&m| {
            h.moduli()
                .iter()
                .map(|&n| num_integer::gcd(m, n) as u128)
                .product::<u128>()
        })
        .product();
    guard(predicted)?;

    // per generator, the list of admissible images
    let per_generator: Vec<Vec<GroupElem>> = g
        .moduli()
        .iter()
        .map(|&m| {
            let mut images = vec![vec![]];
            for &n in h.moduli() {
                let gcd = num_integer::gcd(m, n);
                let step = n / gcd;
                let mut extended = Vec::with_capacity(images.len() * gcd as usize);
                for prefix in &images {
                    for j in 0..gcd {
                        let mut e = prefix.clone();
                        e.push(j * step);
                        extended.push(e);
                    }
                }
                images = extended;
            }
            images
        })
        .collect();

    let g_elements = g.elements();
    let mut homs = Vec::new();
    let mut choice = vec![0usize; per_generator.len()];
    loop {
        let gen_images: Vec<&GroupElem> = choice
            .iter()
            .zip(&per_generator)
            .map(|(&c, imgs)| &imgs[c])
            .collect();
        let table: Vec<GroupElem> = g_elements
            .iter()
            .map(|x| {
                let mut acc = h.zero();
                for (&coord, img) in x.iter().zip(&gen_images) {
                    acc = h.add(&acc, &h.scale(coord as i64, img));
                }
                acc
            })
            .collect();
        let hom = GroupFunction::new(g.clone(), h.clone(), table)?;
        if let Some((a, b)) = hom.homomorphism_failure() {
            return Err(GroupError::Internal(format!(
                "generator-built map failed additivity at ({a:?}, {b:?})"
            )));
        }
        homs.push(hom);

        let mut idx = 0;
        loop {
            if idx == choice.len() {
                debug_assert_eq!(homs.len() as u128, predicted);
                return Ok(homs);
            }
            choice[idx] += 1;
            if choice[idx] < per_generator[idx].len() {
                break;
            }
            choice[idx] = 0;
            idx += 1;
        }
    }
}

/// Iterator over all n-tuples of group elements in lexicographic order.
fn for_each_tuple(elements: &[GroupElem], n: usize, mut visit: impl FnMut(&[&GroupElem]) -> bool) {
    let mut counters = vec![0usize; n];
    loop {
        let tuple: Vec<&GroupElem> = counters.iter().map(|&c| &elements[c]).collect();
        if !visit(&tuple) {
            return;
        }
        let mut idx = n;
        loop {
            if idx == 0 {
                return;
            }
            idx -= 1;
            counters[idx] += 1;
            if counters[idx] < elements.len() {
                break;
            }
            counters[idx] = 0;
        }
    }
}

fn check_same_carrier(f: &GroupFunction, gs: &[GroupFunction]) -> Result<(), GroupError> {
    if gs.len() < 2 {
        return Err(GroupError::TooFewFunctions(gs.len()));
    }
    if gs
        .iter()
        .any(|g| g.domain() != f.domain() || g.codomain() != f.codomain())
    {
        return Err(GroupError::MismatchedCarrier);
    }
    Ok(())
}

/// Solve the unweighted Pexider system `f(∑ xᵢ) = ∑ gᵢ(xᵢ)` constructively.
///
/// The equation is first verified exhaustively; failure reports the smallest
/// violating tuple. On success the constants are read off as `yᵢ = gᵢ(0)`,
/// and the centered function `f - y` is checked to coincide with every
/// `gᵢ - yᵢ` and to be a homomorphism. Those inner checks cannot fail for
/// genuine solutions, so a failure there is reported as an internal error.
pub fn solve_pexider_unrestricted(
    f: &GroupFunction,
    gs: &[GroupFunction],
) -> Result<Decomposition, GroupError> {
    check_same_carrier(f, gs)?;
    let x = f.domain();
    let y_group = f.codomain();
    let n = gs.len();
    guard(x.order().pow(n as u32))?;

    let elements = x.elements();
    let mut violation: Option<Vec<GroupElem>> = None;
    for_each_tuple(&elements, n, |tuple| {
        let mut sum = x.zero();
        let mut rhs = y_group.zero();
        for (i, &xi) in tuple.iter().enumerate() {
            sum = x.add(&sum, xi);
            rhs = y_group.add(&rhs, gs[i].eval(xi));
        }
        if *f.eval(&sum) != rhs {
            violation = Some(tuple.iter().map(|&e| e.clone()).collect());
            return false;
        }
        true
    });
    if let Some(witness) = violation {
        return Err(GroupError::EquationFails(witness));
    }

    let zero = x.zero();
    let piece_offsets: Vec<GroupElem> = gs.iter().map(|g| g.eval(&zero).clone()).collect();
    let offset = piece_offsets
        .iter()
        .fold(y_group.zero(), |acc, yi| y_group.add(&acc, yi));
    if *f.eval(&zero) != offset {
        return Err(GroupError::Internal(
            "f(0) differs from the sum of the gᵢ(0)".into(),
        ));
    }

    let centered = GroupFunction::from_fn(x.clone(), y_group.clone(), |e| {
        y_group.sub(f.eval(e), &offset)
    })?;
    for (i, g) in gs.iter().enumerate() {
        for e in &elements {
            let centered_g = y_group.sub(g.eval(e), &piece_offsets[i]);
            if *centered.eval(e) != centered_g {
                return Err(GroupError::Internal(format!(
                    "centered f and centered g{} disagree at {e:?}",
                    i + 1
                )));
            }
        }
    }
    if let Some((a, b)) = centered.homomorphism_failure() {
        return Err(GroupError::Internal(format!(
            "centered f is not additive at ({a:?}, {b:?})"
        )));
    }

    Ok(Decomposition {
        hom: centered,
        offset,
        piece_offsets,
    })
}

/// Decomposition candidate for the weighted equation: `f = A + y`, plus the
/// matching g-side constants when those also hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDecomposition {
    pub hom: GroupFunction,
    pub offset: GroupElem,
    /// `Some` when additionally `gᵢ(x) = A(αᵢx) + yᵢ` for all x and
    /// `y = ∑ yᵢ`; reported but not required for the existence verdict.
    pub g_offsets: Option<Vec<GroupElem>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCheck {
    /// Whether `f(∑ αᵢxᵢ) = ∑ gᵢ(xᵢ)` holds on every tuple.
    pub equation_holds: bool,
    /// Lexicographically smallest violating tuple when it does not.
    pub violation: Option<Vec<GroupElem>>,
    /// The f-side decomposition `f = A + y`, if any homomorphism/offset pair
    /// works.
    pub decomposition: Option<WeightedDecomposition>,
    /// Number of (homomorphism, offset) candidates examined.
    pub candidates_searched: usize,
}

/// Exhaustively verify the weighted Pexider equation and search for a
/// homomorphism-plus-constant decomposition of f.
///
/// The equation check and the decomposition search are independent: the
/// weighted equation can hold while no decomposition exists, which is
/// exactly what the search certifies by exhausting all candidates.
pub fn check_weighted_pexider(
    alphas: &[i64],
    f: &GroupFunction,
    gs: &[GroupFunction],
) -> Result<WeightedCheck, GroupError> {
    check_same_carrier(f, gs)?;
    if alphas.len() != gs.len() {
        return Err(GroupError::MismatchedCarrier);
    }
    if let Some(index) = alphas.iter().position(|&a| a == 0) {
        return Err(GroupError::ZeroWeight { index });
    }
    let x = f.domain();
    let y_group = f.codomain();
    let n = gs.len();
    guard(x.order().pow(n as u32))?;

    let elements = x.elements();
    let mut violation: Option<Vec<GroupElem>> = None;
    for_each_tuple(&elements, n, |tuple| {
        let mut sum = x.zero();
        let mut rhs = y_group.zero();
        for (i, &xi) in tuple.iter().enumerate() {
            sum = x.add(&sum, &x.scale(alphas[i], xi));
            rhs = y_group.add(&rhs, gs[i].eval(xi));
        }
        if *f.eval(&sum) != rhs {
            violation = Some(tuple.iter().map(|&e| e.clone()).collect());
            return false;
        }
        true
    });
    let equation_holds = violation.is_none();

    let homs = enumerate_homomorphisms(x, y_group)?;
    let offsets = y_group.elements();
    guard(homs.len() as u128 * offsets.len() as u128)?;
    let mut candidates_searched = 0usize;
    let mut decomposition = None;
    'search: for hom in &homs {
        for y in &offsets {
            candidates_searched += 1;
            let matches = elements
                .iter()
                .all(|e| *f.eval(e) == y_group.add(hom.eval(e), y));
            if matches {
                let g_offsets = weighted_g_side(alphas, gs, hom, y, &elements);
                decomposition = Some(WeightedDecomposition {
                    hom: hom.clone(),
                    offset: y.clone(),
                    g_offsets,
                });
                break 'search;
            }
        }
    }

    Ok(WeightedCheck {
        equation_holds,
        violation,
        decomposition,
        candidates_searched,
    })
}

/// Check the g-side of a weighted decomposition: `gᵢ(x) = A(αᵢx) + yᵢ` with
/// `yᵢ = gᵢ(0)`, and `y = ∑ yᵢ`.
fn weighted_g_side(
    alphas: &[i64],
    gs: &[GroupFunction],
    hom: &GroupFunction,
    y: &GroupElem,
    elements: &[GroupElem],
) -> Option<Vec<GroupElem>> {
    let x = gs[0].domain();
    let y_group = gs[0].codomain();
    let zero = x.zero();
    let g_offsets: Vec<GroupElem> = gs.iter().map(|g| g.eval(&zero).clone()).collect();
    for ((g, &alpha), yi) in gs.iter().zip(alphas).zip(&g_offsets) {
        for e in elements {
            let expected = y_group.add(hom.eval(&x.scale(alpha, e)), yi);
            if *g.eval(e) != expected {
                return None;
            }
        }
    }
    let total = g_offsets
        .iter()
        .fold(y_group.zero(), |acc, yi| y_group.add(&acc, yi));
    (total == *y).then_some(g_offsets)
}
