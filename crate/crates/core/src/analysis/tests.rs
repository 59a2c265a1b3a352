use super::census::{
    exact_work_estimate, general_position_total, global_sums, histogram, MeetsMatrix,
};
use super::space::LinearSpace;
use super::*;
use crate::design::{develop, Design, DifferenceFamily};
use crate::group::GroupSpec;
use crate::rng::SplitMix64;

fn family(group: GroupSpec, blocks: &[&[u32]]) -> DifferenceFamily {
    let table = crate::group::build_group(&group).unwrap();
    DifferenceFamily {
        rotational: false,
        blocks: blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&x| crate::group::format_element(x, &table))
                    .collect()
            })
            .collect(),
        metadata: vec![],
        group,
    }
}

pub(crate) fn fano() -> Design {
    develop(&family(GroupSpec::Cyclic(7), &[&[0, 1, 3]]))
        .unwrap()
        .design
}

pub(crate) fn sts9() -> Design {
    let group = GroupSpec::DirectProduct(
        Box::new(GroupSpec::Cyclic(3)),
        Box::new(GroupSpec::Cyclic(3)),
    );
    // Lines through the origin of AG(2,3); indices in radix-3 encoding.
    develop(&family(
        group,
        &[&[0, 1, 2], &[0, 3, 6], &[0, 4, 8], &[0, 5, 7]],
    ))
    .unwrap()
    .design
}

pub(crate) fn sts13_cyclic() -> Design {
    develop(&family(GroupSpec::Cyclic(13), &[&[0, 1, 4], &[0, 2, 7]]))
        .unwrap()
        .design
}

/// The non-cyclic STS(13), obtained from the cyclic one by switching a Pasch
/// configuration: blocks {a,b,c},{a,d,e},{f,b,d},{f,c,e} are replaced by
/// {f,b,c},{f,d,e},{a,b,d},{a,c,e}. There are exactly two STS(13) up to
/// isomorphism, so the first switch that changes the isomorphism class is it.
pub(crate) fn sts13_other() -> Design {
    let base = sts13_cyclic();
    let set: std::collections::HashSet<Vec<u32>> = base.blocks().iter().cloned().collect();
    let sorted3 = |x: u32, y: u32, z: u32| {
        let mut b = vec![x, y, z];
        b.sort_unstable();
        b
    };
    for b1 in base.blocks() {
        for b2 in base.blocks() {
            let common: Vec<u32> = b1.iter().copied().filter(|p| b2.contains(p)).collect();
            if b1 == b2 || common.len() != 1 {
                continue;
            }
            let a = common[0];
            let rest1: Vec<u32> = b1.iter().copied().filter(|&p| p != a).collect();
            let rest2: Vec<u32> = b2.iter().copied().filter(|&p| p != a).collect();
            let (b, c) = (rest1[0], rest1[1]);
            for (d, e) in [(rest2[0], rest2[1]), (rest2[1], rest2[0])] {
                for f in 0..13u32 {
                    if b1.contains(&f) || b2.contains(&f) {
                        continue;
                    }
                    let old3 = sorted3(f, b, d);
                    let old4 = sorted3(f, c, e);
                    if !set.contains(&old3) || !set.contains(&old4) {
                        continue;
                    }
                    let mut blocks: Vec<Vec<u32>> = base
                        .blocks()
                        .iter()
                        .filter(|blk| {
                            **blk != *b1 && **blk != *b2 && **blk != old3 && **blk != old4
                        })
                        .cloned()
                        .collect();
                    blocks.push(sorted3(f, b, c));
                    blocks.push(sorted3(f, d, e));
                    blocks.push(sorted3(a, b, d));
                    blocks.push(sorted3(a, c, e));
                    let candidate = Design::new(13, 3, blocks).unwrap();
                    if !crate::design::verify_steiner(&candidate, 1)
                        .unwrap()
                        .is_steiner
                    {
                        continue;
                    }
                    if !are_isomorphic(&base, &candidate, &AnalysisOptions::default()).unwrap() {
                        return candidate;
                    }
                }
            }
        }
    }
    panic!("no class-changing Pasch switch found in STS(13)");
}

/// PG(2,3): projective plane of order 3 from the planar difference set
/// {0,1,3,9} over Z13.
pub(crate) fn pg23() -> Design {
    develop(&family(GroupSpec::Cyclic(13), &[&[0, 1, 3, 9]]))
        .unwrap()
        .design
}

/// Brute-force diagonal census over all C(v,4) quadruples. Independent of
/// the line-pair enumeration it checks.
fn census_oracle(design: &Design) -> [u64; 4] {
    let v = design.v() as usize;
    let mut line = vec![usize::MAX; v * v];
    for (li, block) in design.blocks().iter().enumerate() {
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                line[p as usize * v + q as usize] = li;
                line[q as usize * v + p as usize] = li;
            }
        }
    }
    let line = |p: usize, q: usize| line[p * v + q];
    let meet = |l1: usize, l2: usize| {
        l1 != l2
            && design.blocks()[l1]
                .iter()
                .any(|p| design.blocks()[l2].contains(p))
    };
    let mut hist = [0u64; 4];
    for a in 0..v {
        for b in a + 1..v {
            for c in b + 1..v {
                for d in c + 1..v {
                    let quad = [a, b, c, d];
                    let mut general = true;
                    'triples: for i in 0..2 {
                        for j in i + 1..3 {
                            for l in j + 1..4 {
                                if line(quad[i], quad[j]) == line(quad[i], quad[l]) {
                                    general = false;
                                    break 'triples;
                                }
                            }
                        }
                    }
                    if !general {
                        continue;
                    }
                    let t = [(b, c, d), (c, b, d), (d, b, c)]
                        .iter()
                        .filter(|&&(x, y, z)| meet(line(a, x), line(y, z)))
                        .count();
                    hist[t] += 1;
                }
            }
        }
    }
    hist
}

fn exact_vector(design: &Design) -> InvariantVector {
    invariant_vector(design, CensusMode::Exact, &AnalysisOptions::default()).unwrap()
}

#[test]
fn fano_census_matches_oracle() {
    let d = fano();
    let oracle = census_oracle(&d);
    // Every general-position quadruple of the Fano plane is a line
    // complement and all three of its splits meet.
    assert_eq!(oracle, [0, 0, 0, 7]);
    assert_eq!(exact_vector(&d).diagonal, oracle);
}

#[test]
fn sts9_census_matches_oracle() {
    let d = sts9();
    let oracle = census_oracle(&d);
    assert_eq!(oracle.iter().sum::<u64>(), 54);
    assert_eq!(exact_vector(&d).diagonal, oracle);
}

#[test]
fn sts13_and_pg23_census_match_oracle() {
    for d in [sts13_cyclic(), pg23()] {
        assert_eq!(exact_vector(&d).diagonal, census_oracle(&d));
    }
}

#[test]
fn general_position_totals() {
    for d in [fano(), sts9(), sts13_cyclic(), pg23()] {
        let total = exact_vector(&d).diagonal.iter().sum::<u64>();
        assert_eq!(
            total,
            general_position_total(d.v() as u64, d.k() as u64, d.block_count() as u64)
        );
    }
}

#[test]
fn exact_vector_is_relabeling_invariant() {
    let d = sts13_cyclic();
    let mut rng = SplitMix64::new(42);
    for _ in 0..5 {
        let perm = rng.permutation(13);
        let r = d.relabel(&perm).unwrap();
        assert_eq!(exact_vector(&d), exact_vector(&r));
    }
}

#[test]
fn sampled_census_is_deterministic() {
    let d = pg23();
    let mode = CensusMode::Sampled {
        sample_size: 2000,
        seed: 9,
    };
    let a = invariant_vector(&d, mode, &AnalysisOptions::default()).unwrap();
    let b = invariant_vector(&d, mode, &AnalysisOptions::default()).unwrap();
    assert_eq!(a, b);
    assert!(a.diagonal.iter().sum::<u64>() <= 2000);
}

#[test]
fn too_large_budget_reported() {
    let d = pg23();
    let opts = AnalysisOptions {
        census_work_budget: 10,
        ..Default::default()
    };
    assert!(matches!(
        invariant_vector(&d, CensusMode::Exact, &opts),
        Err(AnalysisError::TooLarge { .. })
    ));
}

/// Brute-force automorphism count over all v! permutations; only viable for
/// the Fano plane.
#[test]
fn fano_automorphisms_by_exhaustion() {
    let d = fano();
    let mut perm: Vec<u32> = (0..7).collect();
    let mut count = 0u64;
    // Heap's algorithm.
    fn heap(k: usize, perm: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
        if k == 1 {
            visit(perm);
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, visit);
            if k.is_multiple_of(2) {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    heap(7, &mut perm, &mut |p| {
        if verify_automorphism(&d, p) {
            count += 1;
        }
    });
    assert_eq!(count, 168);
}

#[test]
fn automorphism_orders_of_known_designs() {
    let opts = AnalysisOptions::default();
    assert_eq!(automorphism_report(&fano(), &[], &opts).unwrap().order, 168);
    assert_eq!(automorphism_report(&sts9(), &[], &opts).unwrap().order, 432);
    assert_eq!(
        automorphism_report(&sts13_cyclic(), &[], &opts)
            .unwrap()
            .order,
        39
    );
    assert_eq!(
        automorphism_report(&pg23(), &[], &opts).unwrap().order,
        5616
    );
}

#[test]
fn generators_actually_generate_the_group() {
    let opts = AnalysisOptions::default();
    for d in [fano(), sts13_cyclic()] {
        let report = automorphism_report(&d, &[], &opts).unwrap();
        for g in &report.generators {
            assert!(verify_automorphism(&d, g));
        }
        let closure =
            permutation_group_order(d.v() as usize, &report.generators, 1_000_000).unwrap();
        assert_eq!(closure, report.order);
    }
}

#[test]
fn certificate_equal_for_the_two_fano_presentations() {
    // STS(7) is unique: the developments of {0,1,3} and {0,2,3} over Z7 are
    // isomorphic.
    let a = fano();
    let b = develop(&family(GroupSpec::Cyclic(7), &[&[0, 2, 3]]))
        .unwrap()
        .design;
    let opts = AnalysisOptions::default();
    assert_ne!(a, b);
    let ca = canonical_certificate(&a, &opts).unwrap();
    let cb = canonical_certificate(&b, &opts).unwrap();
    assert_eq!(ca, cb);
    assert!(are_isomorphic(&a, &b, &opts).unwrap());
}

#[test]
fn certificate_invariant_under_relabeling() {
    let opts = AnalysisOptions::default();
    let mut rng = SplitMix64::new(7);
    for d in [fano(), sts9(), sts13_cyclic(), pg23()] {
        let cert = canonical_certificate(&d, &opts).unwrap();
        let r = d.relabel(&rng.permutation(d.v() as usize)).unwrap();
        assert_eq!(canonical_certificate(&r, &opts).unwrap(), cert);
        // The canonical block list is itself a valid relabeling of the design.
        let canon = Design::new(d.v(), d.k(), cert.canonical_blocks.clone()).unwrap();
        assert!(are_isomorphic(&d, &canon, &opts).unwrap());
    }
}

#[test]
fn the_two_sts13_are_not_isomorphic() {
    let opts = AnalysisOptions::default();
    let a = sts13_cyclic();
    let b = sts13_other();
    assert!(!are_isomorphic(&a, &b, &opts).unwrap());
    assert_eq!(automorphism_report(&b, &[], &opts).unwrap().order, 6);
}

#[test]
fn iso_fast_path_on_parameter_mismatch() {
    let opts = AnalysisOptions::default();
    assert!(!are_isomorphic(&fano(), &sts9(), &opts).unwrap());
}

#[test]
fn hint_must_be_an_automorphism() {
    let d = fano();
    let mut bad: Vec<u32> = (0..7).collect();
    bad.swap(0, 1);
    let err = automorphism_report(&d, &[bad], &AnalysisOptions::default());
    assert!(matches!(
        err,
        Err(AnalysisError::NotAnAutomorphism { index: 0, .. })
    ));
}

#[test]
fn ir_budget_is_respected() {
    let opts = AnalysisOptions {
        ir_node_budget: 2,
        ..Default::default()
    };
    assert!(matches!(
        canonical_certificate(&pg23(), &opts),
        Err(AnalysisError::BudgetExceeded { .. })
    ));
}

#[test]
fn analysis_rejects_non_steiner_designs() {
    let mut blocks = fano().blocks().to_vec();
    blocks.pop();
    let damaged = Design::new(7, 3, blocks).unwrap();
    assert!(matches!(
        canonical_certificate(&damaged, &AnalysisOptions::default()),
        Err(AnalysisError::InvalidDesign(_))
    ));
}

#[test]
fn threaded_census_matches_sequential() {
    let d = pg23();
    let space = LinearSpace::new(&d).unwrap();
    let meets = MeetsMatrix::build(&space);
    let s1 = global_sums(&space, &meets, 1);
    let s4 = global_sums(&space, &meets, 4);
    assert_eq!(s1, s4);
    assert_eq!(histogram(&space, s1), histogram(&space, s4));
    assert!(exact_work_estimate(&space) > 0);
}

#[test]
fn cycle_notation() {
    assert_eq!(format_cycles(&[0, 1, 2]), "()");
    assert_eq!(format_cycles(&[1, 0, 2]), "(0 1)");
    assert_eq!(format_cycles(&[1, 2, 0, 4, 3]), "(0 1 2)(3 4)");
}

#[test]
fn fano_transpositions_are_never_automorphisms() {
    let d = fano();
    for i in 0..7u32 {
        for j in i + 1..7 {
            let mut perm: Vec<u32> = (0..7).collect();
            perm.swap(i as usize, j as usize);
            assert!(!verify_automorphism(&d, &perm), "({i} {j})");
        }
    }
}

#[test]
fn aut_order_is_relabeling_invariant() {
    let opts = AnalysisOptions::default();
    let d = fano();
    let mut rng = SplitMix64::new(11);
    for _ in 0..3 {
        let r = d.relabel(&rng.permutation(7)).unwrap();
        assert_eq!(automorphism_report(&r, &[], &opts).unwrap().order, 168);
    }
}

#[test]
fn distinct_vectors_imply_distinct_certificates() {
    let opts = AnalysisOptions::default();
    let a = sts13_cyclic();
    let b = sts13_other();
    let va = invariant_vector(&a, CensusMode::Exact, &opts).unwrap();
    let vb = invariant_vector(&b, CensusMode::Exact, &opts).unwrap();
    assert_ne!(va, vb);
    let ca = canonical_certificate(&a, &opts).unwrap();
    let cb = canonical_certificate(&b, &opts).unwrap();
    assert_ne!(ca.digest, cb.digest);
}

#[test]
fn seeded_and_unseeded_runs_agree_on_the_order() {
    // Orbit seeding is a pruning aid; the computed group order must not
    // depend on it.
    let opts = AnalysisOptions::default();
    let z7 = crate::group::build_group(&GroupSpec::Cyclic(7)).unwrap();
    let translations = crate::design::left_translation_perms(&z7, false);
    let d = fano();
    for t in &translations {
        assert!(verify_automorphism(&d, t));
    }
    let seeded = automorphism_report(&d, &translations, &opts).unwrap();
    assert_eq!(seeded.order, 168);
    assert_eq!(
        permutation_group_order(7, &translations, 10_000).unwrap(),
        7
    );
    assert_eq!(seeded.order % 7, 0);

    let g9 = crate::group::build_group(&GroupSpec::DirectProduct(
        Box::new(GroupSpec::Cyclic(3)),
        Box::new(GroupSpec::Cyclic(3)),
    ))
    .unwrap();
    let seeded9 = automorphism_report(
        &sts9(),
        &crate::design::left_translation_perms(&g9, false),
        &opts,
    )
    .unwrap();
    assert_eq!(seeded9.order, 432);
}

#[test]
fn projective_plane_of_order_4_automorphisms() {
    // S(2,5,21) is the unique projective plane of order 4; its collineation
    // group has order 120960.
    let mut config = crate::search::SearchConfig::new(GroupSpec::Cyclic(21), 5, false);
    config.limit_solutions = Some(1);
    let outcome = crate::search::search(&config).unwrap();
    let plane = develop(&outcome.families[0]).unwrap().design;
    let report = automorphism_report(&plane, &[], &AnalysisOptions::default()).unwrap();
    assert_eq!(report.order, 120_960);
}

#[test]
fn closure_cap_is_enforced() {
    // S7 blows through a cap of 100 long before its 5040 elements.
    let gens = vec![vec![1, 0, 2, 3, 4, 5, 6], vec![1, 2, 3, 4, 5, 6, 0]];
    assert!(matches!(
        permutation_group_order(7, &gens, 100),
        Err(AnalysisError::BudgetExceeded { .. })
    ));
    assert_eq!(permutation_group_order(7, &gens, 10_000).unwrap(), 5040);
}
