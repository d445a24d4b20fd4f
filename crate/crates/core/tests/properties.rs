use fdesc_core::algebra::{self, LadderFamily};
use fdesc_core::descriptors::{self, witnesses};
use fdesc_core::linalg::{self, c};
use fdesc_core::states::{self, random_pure_vector};
use fdesc_core::transformations::{local_random_ps_unitary, random_ps_unitary};
use fdesc_core::{
    evolve_descriptors, join, ontic_apply, ontic_project, phenomenal_of, reconstruct_unitary,
    Complex64, FockSpace, ModeSet, PSUnitary,
};
use proptest::prelude::*;

fn subset_of(n: usize, mask: u32) -> Option<ModeSet> {
    let modes: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
    ModeSet::new(modes, n).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolved_descriptors_keep_the_algebra(n in 1usize..=4, seed: u64) {
        let s = FockSpace::new(n).unwrap();
        let u = random_ps_unitary(&s, seed);
        let d = evolve_descriptors(&u, &s.modes(), &s.vacuum()).unwrap();
        prop_assert!(d.algebra_residual() < 1e-10);
    }

    #[test]
    fn phenomenal_map_intertwines_the_action(n in 1usize..=4, seed: u64) {
        let s = FockSpace::new(n).unwrap();
        let u = random_ps_unitary(&s, seed);
        let w = random_ps_unitary(&s, seed ^ 0xABCD);
        let psi0 = random_pure_vector(&s, seed);
        let d = evolve_descriptors(&u, &s.modes(), &psi0).unwrap();
        let lhs = phenomenal_of(&ontic_apply(&w, &d).unwrap()).unwrap();
        let rho = phenomenal_of(&d).unwrap();
        let rhs = w.matrix() * rho.matrix() * w.matrix().adjoint();
        prop_assert!(linalg::distance(lhs.matrix(), &rhs) < 1e-9);
    }

    #[test]
    fn phenomenal_map_matches_schrodinger_evolution(n in 1usize..=4, seed: u64) {
        let s = FockSpace::new(n).unwrap();
        let u = random_ps_unitary(&s, seed);
        let psi0 = random_pure_vector(&s, seed.wrapping_add(1));
        let d = evolve_descriptors(&u, &s.modes(), &psi0).unwrap();
        // oracle: the evolved vector's outer product
        let psi = u.matrix() * psi0.amplitudes();
        let direct = &psi * psi.adjoint();
        prop_assert!(linalg::distance(phenomenal_of(&d).unwrap().matrix(), &direct) < 1e-10);
    }

    #[test]
    fn reconstruction_is_unique_up_to_phase(n in 1usize..=4, seed: u64, alpha in 0.0f64..std::f64::consts::TAU) {
        let s = FockSpace::new(n).unwrap();
        let u = random_ps_unitary(&s, seed);
        let phased = PSUnitary::validate(u.as_operator().scale(Complex64::from_polar(1.0, alpha))).unwrap();
        let du = evolve_descriptors(&u, &s.modes(), &s.vacuum()).unwrap();
        let dv = evolve_descriptors(&phased, &s.modes(), &s.vacuum()).unwrap();
        prop_assert!(du.distance(&dv).unwrap() < 1e-12);
        let ru = reconstruct_unitary(&du).unwrap();
        let rv = reconstruct_unitary(&dv).unwrap();
        prop_assert!(ru.phase_blind_distance(&rv) < 1e-8);
        prop_assert!(ru.phase_blind_distance(&u) < 1e-8);
    }

    #[test]
    fn join_then_project_round_trips(n in 2usize..=4, seed: u64, mask in 1u32..15) {
        let s = FockSpace::new(n).unwrap();
        let full_mask = (1u32 << n) - 1;
        let a_mask = mask & full_mask;
        prop_assume!(a_mask != 0 && a_mask != full_mask);
        let a = subset_of(n, a_mask).unwrap();
        let b = a.complement();
        let u = random_ps_unitary(&s, seed);
        let psi0 = random_pure_vector(&s, seed);
        let da = evolve_descriptors(&u, &a, &psi0).unwrap();
        let db = evolve_descriptors(&u, &b, &psi0).unwrap();
        let joined = join(&da, &db).unwrap();
        prop_assert_eq!(ontic_project(&joined, &a).unwrap(), da);
        prop_assert_eq!(ontic_project(&joined, &b).unwrap(), db);
    }

    #[test]
    fn local_action_leaves_disjoint_descriptors(n in 2usize..=4, seed: u64, mask in 1u32..15) {
        let s = FockSpace::new(n).unwrap();
        let full_mask = (1u32 << n) - 1;
        let a_mask = mask & full_mask;
        prop_assume!(a_mask != 0 && a_mask != full_mask);
        let a = subset_of(n, a_mask).unwrap();
        let b = a.complement();
        let w = local_random_ps_unitary(&a, seed).unwrap();
        let d = evolve_descriptors(&random_ps_unitary(&s, seed ^ 1), &b, &s.vacuum()).unwrap();
        prop_assert!(ontic_apply(&w, &d).unwrap().distance(&d).unwrap() < 1e-10);
    }

    #[test]
    fn monomial_expansion_round_trips(n in 1usize..=4, seed: u64, mask in 1u32..15) {
        let full_mask = (1u32 << n) - 1;
        prop_assume!(mask & full_mask != 0);
        let sub = subset_of(n, mask & full_mask).unwrap();
        let local = local_random_ps_unitary(&sub, seed).unwrap();
        let family = LadderFamily::canonical(&sub).unwrap();
        let coeffs = family.expand(local.matrix()).unwrap();
        prop_assert!(linalg::distance(&family.substitute(&coeffs).unwrap(), local.matrix()) < 1e-10);
        prop_assert!(algebra::is_local_to(local.as_operator(), &sub));
    }

    #[test]
    fn partial_trace_implementations_agree(n in 1usize..=4, seed: u64, mask in 1u32..15) {
        let full_mask = (1u32 << n) - 1;
        prop_assume!(mask & full_mask != 0);
        let keep = subset_of(n, mask & full_mask).unwrap();
        let rho = states::random_phenomenal_state(&ModeSet::full(n), seed).unwrap();
        let fast = states::partial_trace(&rho, &keep).unwrap();
        let oracle = states::partial_trace_jordan_wigner(&rho, &keep).unwrap();
        prop_assert!(linalg::distance(fast.matrix(), &oracle) < 1e-10);
    }
}

/// The join does not depend on which global unitary witnesses it, also when
/// the union leaves modes uncovered.
#[test]
fn proper_union_witnesses_agree_on_the_union() {
    let s = FockSpace::new(4).unwrap();
    let a = ModeSet::new([0, 3], 4).unwrap();
    let b = ModeSet::single(1, 4).unwrap();
    let ab = a.union(&b).unwrap();
    for seed in 0..10 {
        let u = random_ps_unitary(&s, seed);
        let psi0 = random_pure_vector(&s, seed);
        let da = evolve_descriptors(&u, &a, &psi0).unwrap();
        let db = evolve_descriptors(&u, &b, &psi0).unwrap();
        let target = evolve_descriptors(&u, &ab, &psi0).unwrap();
        let found = witnesses(&da, &db, 3, seed).unwrap();
        assert_eq!(found.len(), 3);
        for w in &found {
            let got = evolve_descriptors(w, &ab, &psi0).unwrap();
            assert!(got.distance(&target).unwrap() < 1e-8);
        }
    }
}

/// Product-state marginals: the trace of `ρ_A ∧ ρ_B` over `B` returns `ρ_A`.
#[test]
fn product_state_marginal() {
    let a = ModeSet::new([0, 2], 3).unwrap();
    let b = ModeSet::single(1, 3).unwrap();
    let ra = states::random_phenomenal_state(&a, 1).unwrap();
    let rb = states::random_phenomenal_state(&b, 2).unwrap();
    let joint = states::product_state(&ra, &rb).unwrap();
    assert!(states::partial_trace(&joint, &a).unwrap().distance(&ra) < 1e-12);
    assert!(states::partial_trace(&joint, &b).unwrap().distance(&rb) < 1e-12);
}

#[test]
fn descriptor_state_after_tunneling_is_half_mixed() {
    let s = FockSpace::new(2).unwrap();
    let u = fdesc_core::named_gate(
        fdesc_core::NamedGate::Tunneling {
            i: 0,
            j: 1,
            theta: std::f64::consts::FRAC_PI_4,
        },
        &s,
    )
    .unwrap();
    let d = evolve_descriptors(
        &u,
        &ModeSet::single(1, 2).unwrap(),
        &s.basis_state(&[1, 0]).unwrap(),
    )
    .unwrap();
    let rho = descriptors::phenomenal_of(&d).unwrap();
    assert!((rho.matrix()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-12);
    assert!((rho.matrix()[(1, 1)] - c(0.5, 0.0)).norm() < 1e-12);
}
