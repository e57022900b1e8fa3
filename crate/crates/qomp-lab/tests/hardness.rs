use qomp_lab::hardness::{
    planted_cover_instance, random_instance, reduce_x3c, reduced_residual, reduced_sparse_solution, verify_reduction,
    x3c_brute, X3cInstance,
};
use qomp_lab::instances::rng;
use qomp_lab::model::Support;
use rand::Rng;

/// Two triples sharing one element on six points: no exact cover exists, yet
/// both atoms together leave a residual of 1/2, below `0.9 sqrt(3/N)`.
#[test]
fn overlapping_pair_beats_the_loose_threshold() {
    let inst = X3cInstance::new(6, vec![[0, 1, 2], [2, 3, 4]]).unwrap();
    assert!(x3c_brute(&inst).unwrap().is_none());
    let red = reduce_x3c(&inst).unwrap();
    let both = Support::from_indices([0, 1]).unwrap();
    let res = reduced_residual(&red, &both);
    assert!((res - 0.5).abs() < 1e-12);
    assert!(res < 0.9 * red.eps_bound);
    let found = reduced_sparse_solution(&inst, 0.9 * red.eps_bound).unwrap();
    assert_eq!(found.map(|s| s.sorted()), Some(vec![0, 1]));
    assert_eq!(verify_reduction(&inst, Some(&both)), None);
}

/// An exact cover leaves zero residual, and `N/3` atoms that overlap leave
/// at least one point uncovered, so at least `1/sqrt(N)` remains. Any
/// threshold below `1/sqrt(N)` therefore separates the two cases.
#[test]
fn threshold_below_one_over_root_n_is_an_equivalence() {
    let mut r = rng(91);
    for i in 0..200 {
        let ground = [3usize, 6, 9, 12, 15][r.gen_range(0..5)];
        let third = ground / 3;
        let inst = if i % 2 == 0 {
            planted_cover_instance(ground, r.gen_range(0..=12 - third), &mut r).unwrap()
        } else {
            random_instance(ground, r.gen_range(third..=12), &mut r).unwrap()
        };
        let eps = 0.9 / (ground as f64).sqrt();
        let cover = x3c_brute(&inst).unwrap();
        let sparse = reduced_sparse_solution(&inst, eps).unwrap();
        assert_eq!(cover.is_some(), sparse.is_some(), "instance {inst:?}");
        if let Some(support) = sparse {
            assert!(verify_reduction(&inst, Some(&support)).is_some());
        }
    }
}
