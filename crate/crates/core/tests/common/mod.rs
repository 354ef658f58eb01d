//! Shared generators for the property and acceptance suites.
#![allow(dead_code)] // each test binary uses its own subset

use feqn_core::extension::{Patch, Point};
use feqn_core::groups::{FiniteAbelianGroup, GroupElem, GroupFunction};
use feqn_core::rational::{rat, QMatrix, QVector, Rational};
use feqn_core::sampling::SampleRng;

pub fn random_matrix(rng: &mut SampleRng, height: usize, width: usize) -> QMatrix {
    let rows = (0..height)
        .map(|_| (0..width).map(|_| rng.small()).collect())
        .collect();
    QMatrix::from_rows(rows).expect("non-empty shape")
}

pub fn random_vector(rng: &mut SampleRng, len: usize) -> QVector {
    (0..len).map(|_| rng.small()).collect()
}

/// A connected chain of `count` patches in (Q^k)^n with a shared radius:
/// each patch is the previous one nudged by at most the radius per
/// coordinate, which keeps consecutive supports overlapping.
pub fn chained_cover(
    rng: &mut SampleRng,
    arity: usize,
    dimension: usize,
    count: usize,
    radius: &Rational,
) -> Vec<Patch> {
    let mut bases: Vec<Point> = (0..arity)
        .map(|_| (0..dimension).map(|_| rng.small()).collect())
        .collect();
    let mut patches = vec![Patch::new(bases.clone(), radius.clone()).expect("valid patch")];
    let nudges = [
        -radius.clone(),
        -radius / rat(2),
        rat(0),
        radius / rat(2),
        radius.clone(),
    ];
    for _ in 1..count {
        for base in bases.iter_mut() {
            for coord in base.iter_mut() {
                *coord = &*coord + &nudges[rng.index(nudges.len())];
            }
        }
        patches.push(Patch::new(bases.clone(), radius.clone()).expect("valid patch"));
    }
    patches
}

const MODULUS_POOL: &[u64] = &[2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32];

pub fn random_group(rng: &mut SampleRng, max_order: u64) -> FiniteAbelianGroup {
    loop {
        let factors = 1 + rng.index(2);
        let moduli: Vec<u64> = (0..factors)
            .map(|_| MODULUS_POOL[rng.index(MODULUS_POOL.len())])
            .collect();
        if moduli.iter().map(|&m| m as u128).product::<u128>() <= max_order as u128 {
            return FiniteAbelianGroup::new(moduli).expect("valid moduli");
        }
    }
}

/// Random homomorphism G → H via admissible generator images: the image of
/// a generator of order m in a factor Z_n must be a multiple of n/gcd(m,n).
pub fn random_hom(
    rng: &mut SampleRng,
    g: &FiniteAbelianGroup,
    h: &FiniteAbelianGroup,
) -> GroupFunction {
    let images: Vec<GroupElem> = g
        .moduli()
        .iter()
        .map(|&m| {
            h.moduli()
                .iter()
                .map(|&n| {
                    let gcd = gcd(m, n);
                    (n / gcd) * rng.index(gcd as usize) as u64
                })
                .collect()
        })
        .collect();
    let hom = GroupFunction::from_fn(g.clone(), h.clone(), |x| {
        let mut acc = h.zero();
        for (&coord, img) in x.iter().zip(&images) {
            acc = h.add(&acc, &h.scale(coord as i64, img));
        }
        acc
    })
    .expect("total table");
    debug_assert!(hom.homomorphism_failure().is_none());
    hom
}

pub fn random_element(rng: &mut SampleRng, g: &FiniteAbelianGroup) -> GroupElem {
    g.moduli()
        .iter()
        .map(|&m| rng.index(m as usize) as u64)
        .collect()
}

/// `f(x) = base(x) + offset` in the codomain.
pub fn shifted(base: &GroupFunction, offset: &GroupElem) -> GroupFunction {
    let codomain = base.codomain().clone();
    GroupFunction::from_fn(base.domain().clone(), codomain.clone(), |x| {
        codomain.add(base.eval(x), offset)
    })
    .expect("total table")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
