//! Property suite for the patch extension machine: exact round trips on
//! random covers, order independence, edge verification, and agreement with
//! the finite-group solver on integer grids.

mod common;

use common::{chained_cover, random_matrix, random_vector};
use feqn_core::extension::{
    local_solve, stitch, synthesize_pexider_tables, ExtensionError, LocalSolution, Patch,
};
use feqn_core::groups::{solve_pexider_unrestricted, FiniteAbelianGroup, GroupFunction};
use feqn_core::rational::{rat, ratio, vec_add, vec_zero, QMatrix, QVector};
use feqn_core::sampling::SampleRng;

fn random_instance(rng: &mut SampleRng, max_patches: usize) -> (Vec<Patch>, QMatrix, Vec<QVector>) {
    let arity = 2 + rng.index(2);
    let dimension = 1 + rng.index(3);
    let height = 1 + rng.index(3);
    let linear = random_matrix(rng, height, dimension);
    let piece_offsets: Vec<QVector> = (0..arity).map(|_| random_vector(rng, height)).collect();
    let count = 3 + rng.index(max_patches - 2);
    let patches = chained_cover(rng, arity, dimension, count, &ratio(1, 8));
    (patches, linear, piece_offsets)
}

/// local_solve + stitch is an exact round trip for affine generators on
/// connected chained covers.
#[test]
fn roundtrip_on_random_connected_covers() {
    let mut rng = SampleRng::new(501);
    for _ in 0..25 {
        let (patches, linear, piece_offsets) = random_instance(&mut rng, 6);
        let tables = synthesize_pexider_tables(&patches, &linear, &piece_offsets);
        let locals: Vec<LocalSolution> = patches
            .iter()
            .map(|p| local_solve(p, &tables).expect("genuine instance solves"))
            .collect();
        let outcome = stitch(&patches, &locals).expect("genuine instance stitches");
        assert!(outcome.unique, "chained cover must be connected");
        let global = &outcome.components[0];
        assert_eq!(global.linear, linear);
        assert_eq!(global.piece_offsets, piece_offsets);
        let total = piece_offsets
            .iter()
            .fold(vec_zero(linear.height()), |acc, u| vec_add(&acc, u));
        assert_eq!(global.offset, total);
    }
}

/// Stitching is invariant under patch reordering: recovered data identical,
/// membership identical up to the permutation.
#[test]
fn stitch_is_order_independent() {
    let mut rng = SampleRng::new(502);
    for _ in 0..10 {
        let (patches, linear, piece_offsets) = random_instance(&mut rng, 6);
        let tables = synthesize_pexider_tables(&patches, &linear, &piece_offsets);
        let locals: Vec<LocalSolution> = patches
            .iter()
            .map(|p| local_solve(p, &tables).unwrap())
            .collect();
        let baseline = stitch(&patches, &locals).unwrap();

        // reverse, and one deterministic shuffle
        let mut orders: Vec<Vec<usize>> = vec![(0..patches.len()).rev().collect()];
        let mut shuffled: Vec<usize> = (0..patches.len()).collect();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.index(i + 1));
        }
        orders.push(shuffled);

        for order in orders {
            let permuted_patches: Vec<Patch> = order.iter().map(|&i| patches[i].clone()).collect();
            let permuted_locals: Vec<LocalSolution> =
                order.iter().map(|&i| locals[i].clone()).collect();
            let outcome = stitch(&permuted_patches, &permuted_locals).unwrap();
            assert_eq!(outcome.unique, baseline.unique);
            assert_eq!(outcome.components.len(), baseline.components.len());
            let g = &outcome.components[0];
            let b = &baseline.components[0];
            assert_eq!(g.linear, b.linear);
            assert_eq!(g.offset, b.offset);
            assert_eq!(g.piece_offsets, b.piece_offsets);
            // membership maps back through the permutation
            let mut mapped: Vec<usize> = g.patch_indices.iter().map(|&i| order[i]).collect();
            mapped.sort_unstable();
            assert_eq!(mapped, b.patch_indices);
        }
    }
}

/// Tampering with constants on one patch of an overlapping pair is caught by
/// the edge verification, never silently absorbed.
#[test]
fn edge_checks_catch_tampered_constants() {
    let mut rng = SampleRng::new(503);
    let (patches, linear, piece_offsets) = random_instance(&mut rng, 4);
    let tables = synthesize_pexider_tables(&patches, &linear, &piece_offsets);
    let mut locals: Vec<LocalSolution> = patches
        .iter()
        .map(|p| local_solve(p, &tables).unwrap())
        .collect();
    let last = locals.len() - 1;
    locals[last].piece_offsets[0] = vec_add(&locals[last].piece_offsets[0], &[rat(1)]);
    // keep the offset consistent with the sum so only the edge check can fire
    locals[last].offset = vec_add(&locals[last].offset, &[rat(1)]);
    let err = stitch(&patches, &locals).unwrap_err();
    assert!(
        matches!(err, ExtensionError::ConstantReconciliation { .. }),
        "got {err:?}"
    );
}

/// All-zero tables on an integer grid satisfy the unweighted identity on
/// every tuple: the unweighted lift of the zero g-functions from the
/// modular counterexample grid.
#[test]
fn zero_tables_on_integer_grid_verify() {
    use feqn_core::extension::{verify_pexider, PatchTables};
    let mut tables = PatchTables::new(2);
    for s in 0..=6i64 {
        tables.insert_f(vec![rat(s)], vec![rat(0)]);
    }
    for x in 0..=3i64 {
        tables.insert_g(0, vec![rat(x)], vec![rat(0)]);
        tables.insert_g(1, vec![rat(x)], vec![rat(0)]);
    }
    let tuples: Vec<Vec<Vec<feqn_core::rational::Rational>>> = (0..=3i64)
        .flat_map(|a| (0..=3i64).map(move |b| vec![vec![rat(a)], vec![rat(b)]]))
        .collect();
    let report = verify_pexider(&tables, &tuples).unwrap();
    assert!(report.passed);
    assert_eq!(report.checked, 16);

    // corrupting one f value breaks exactly the tuples that sum there
    let mut corrupted = tables.clone();
    corrupted.insert_f(vec![rat(3)], vec![rat(1)]);
    let report = verify_pexider(&corrupted, &tuples).unwrap();
    assert!(!report.passed);
    assert_eq!(report.violations.len(), 4);
    assert_eq!(report.violations[0].tuple, vec![vec![rat(0)], vec![rat(3)]]);
}

/// A cover spanning an integer grid agrees with the finite-group solver on
/// the modular reduction of the same data.
#[test]
fn grid_cover_agrees_with_finite_group_solver() {
    let modulus = 7u64;
    let mut rng = SampleRng::new(504);
    for _ in 0..10 {
        let slope = rng.index(7) as i64;
        let u1 = rng.index(7) as i64;
        let u2 = rng.index(7) as i64;
        let linear = QMatrix::from_rows(vec![vec![rat(slope)]]).unwrap();
        let piece_offsets = vec![vec![rat(u1)], vec![rat(u2)]];

        // diagonal patches spanning every residue 0..7 with unit radius
        let patches: Vec<Patch> = (0..modulus)
            .map(|t| Patch::new(vec![vec![rat(t as i64)], vec![rat(t as i64)]], rat(1)).unwrap())
            .collect();
        let tables = synthesize_pexider_tables(&patches, &linear, &piece_offsets);
        let locals: Vec<LocalSolution> = patches
            .iter()
            .map(|p| local_solve(p, &tables).unwrap())
            .collect();
        let outcome = stitch(&patches, &locals).unwrap();
        assert!(outcome.unique);
        let global = &outcome.components[0];
        assert_eq!(global.linear, linear);
        assert_eq!(global.piece_offsets, piece_offsets);

        // reduce the same affine data mod 7 and solve over Z₇
        let z7 = FiniteAbelianGroup::new(vec![modulus]).unwrap();
        let affine = |c: i64, off: i64| {
            let g = z7.clone();
            GroupFunction::from_fn(z7.clone(), z7.clone(), move |x| {
                g.add(&g.scale(c, x), &g.scale(off, &vec![1]))
            })
            .unwrap()
        };
        let f = affine(slope, u1 + u2);
        let g1 = affine(slope, u1);
        let g2 = affine(slope, u2);
        let decomposition = solve_pexider_unrestricted(&f, &[g1, g2]).unwrap();
        assert_eq!(decomposition.hom, affine(slope, 0));
        assert_eq!(decomposition.offset, vec![((u1 + u2) as u64) % modulus]);
        assert_eq!(
            decomposition.piece_offsets,
            vec![vec![u1 as u64 % modulus], vec![u2 as u64 % modulus]]
        );
    }
}
