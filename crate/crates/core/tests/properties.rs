use num_complex::Complex64;
use proptest::prelude::*;
use qredist::entropy::{
    conditional_mutual_information, entropy, mutual_information, QuantumState, Role, RolePartition,
};
use qredist::linalg::{
    eig_spectrum, partial_trace, purify, random_pure_state, tensor_product, trace_distance, CMatrix,
    DensityMatrix,
};
use qredist::statespec::{format_state, make_hjpw, parse_state, HjpwSpec, StateDocument, Term};
use qredist::tasks::{
    composability_check, fqrs_corner, fqsw_corner, is_achievable, merging_costs, redistribution_corner,
    redistribution_region, time_reversal_dual,
};
use rand::{Rng, SeedableRng};

fn dims_strategy(min: usize, max: usize, max_dim: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=max_dim, min..=max)
}

/// Mixed state on `dims` obtained by tracing out a random environment.
fn random_mixed(dims: &[usize], env: usize, seed: u64) -> DensityMatrix {
    let mut all = dims.to_vec();
    all.push(env);
    let psi = random_pure_state(&all, seed).unwrap();
    psi.reduce(&(0..dims.len()).collect::<Vec<_>>()).unwrap()
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity(dims in dims_strategy(2, 4, 3), seed in any::<u64>(), mask in any::<u8>()) {
        let rho = random_mixed(&dims, 2, seed);
        let keep: Vec<usize> = (0..dims.len()).filter(|i| mask >> i & 1 == 1).collect();
        let r = partial_trace(&rho, &keep).unwrap();
        prop_assert!((r.trace() - rho.trace()).norm() <= 1e-12);
        prop_assert!(max_abs(&(r.entries() - r.entries().adjoint())) <= 1e-12);
        prop_assert!(eig_spectrum(&r).is_ok());
    }

    #[test]
    fn schmidt_spectra_agree(dims in dims_strategy(2, 5, 3), seed in any::<u64>(), mask in any::<u8>()) {
        let psi = random_pure_state(&dims, seed).unwrap();
        let s: Vec<usize> = (0..dims.len()).filter(|i| mask >> i & 1 == 1).collect();
        let t: Vec<usize> = (0..dims.len()).filter(|i| mask >> i & 1 == 0).collect();
        let a = eig_spectrum(&psi.reduce(&s).unwrap()).unwrap();
        let b = eig_spectrum(&psi.reduce(&t).unwrap()).unwrap();
        let k = a.values().len().max(b.values().len());
        for i in 0..k {
            let x = a.values().get(i).copied().unwrap_or(0.0);
            let y = b.values().get(i).copied().unwrap_or(0.0);
            prop_assert!((x - y).abs() <= 1e-9);
        }
        // pure-state entropy duality on both routes
        let hs = QuantumState::subset_entropy(&psi.projector(), &s).unwrap();
        let ht = QuantumState::subset_entropy(&psi.projector(), &t).unwrap();
        prop_assert!((hs - ht).abs() <= 1e-9);
        prop_assert!((entropy(&psi, &s).unwrap() - hs).abs() <= 1e-9);
    }

    #[test]
    fn purify_then_trace_is_identity(dims in dims_strategy(1, 3, 3), env in 1usize..=4, seed in any::<u64>()) {
        let rho = random_mixed(&dims, env, seed);
        let psi = purify(&rho).unwrap();
        prop_assert_eq!(psi.dims().len(), dims.len() + 1);
        let back = psi.reduce(&(0..dims.len()).collect::<Vec<_>>()).unwrap();
        prop_assert!(max_abs(&(back.entries() - rho.entries())) <= 1e-9);
        // the reference marginal is diagonal in the canonical basis
        let reference = psi.reduce(&[dims.len()]).unwrap();
        let e = reference.entries();
        for i in 0..e.nrows() {
            for j in 0..e.ncols() {
                if i != j {
                    prop_assert!(e[(i, j)].norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn trace_distance_is_a_metric(d in 2usize..=4, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (random_mixed(&[d], 2, s1), random_mixed(&[d], 3, s2), random_mixed(&[d], 1, s3));
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, trace_distance(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn tensor_then_trace_recovers_factor(d1 in 1usize..=4, d2 in 1usize..=4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = random_mixed(&[d1], 2, s1);
        let b = random_mixed(&[d2], 2, s2);
        let ab = tensor_product(&a, &b).unwrap();
        let back = partial_trace(&ab, &[0]).unwrap();
        prop_assert!(max_abs(&(back.entries() - a.entries().scale(b.trace().re))) <= 1e-12);
        // entropy is additive on products
        let h = entropy(&ab, &[0, 1]).unwrap();
        prop_assert!((h - entropy(&a, &[0]).unwrap() - entropy(&b, &[0]).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn entropy_inequalities(dims in dims_strategy(4, 4, 3), seed in any::<u64>()) {
        let psi = random_pure_state(&dims, seed).unwrap();
        for h in (0..4).map(|i| entropy(&psi, &[i]).unwrap()) {
            prop_assert!(h >= 0.0);
        }
        for (x, y, z) in [(0, 1, 2), (2, 3, 1), (3, 0, 2), (1, 2, 0)] {
            prop_assert!(conditional_mutual_information(&psi, &[x], &[y], &[z]).unwrap() >= -1e-7);
            prop_assert!(mutual_information(&psi, &[x], &[y]).unwrap() >= -1e-7);
            let mi = mutual_information(&psi, &[x], &[y]).unwrap();
            let cmi = conditional_mutual_information(&psi, &[x], &[y], &[]).unwrap();
            prop_assert!((mi - cmi).abs() <= 1e-12);
        }
        // mixed-state route agrees with the pure-state shortcut
        let rho = psi.reduce(&[0, 1, 2]).unwrap();
        let a = conditional_mutual_information(&rho, &[0], &[1], &[2]).unwrap();
        let b = conditional_mutual_information(&psi, &[0], &[1], &[2]).unwrap();
        prop_assert!((a - b).abs() <= 1e-9);
    }

    #[test]
    fn redistribution_identities(dims in dims_strategy(4, 4, 3), seed in any::<u64>()) {
        let psi = random_pure_state(&dims, seed).unwrap();
        let p = RolePartition::new(vec![0], vec![1], vec![2], vec![3]);
        let corner = redistribution_corner(&psi, &p).unwrap();
        let region = redistribution_region(&psi, &p).unwrap();
        prop_assert!(is_achievable(&region, corner.q, corner.e));
        prop_assert!(!is_achievable(&region, corner.q - 1e-3, corner.e));
        prop_assert!(corner.q >= -5e-8);
        let dual = time_reversal_dual(&psi, &p).unwrap();
        prop_assert!((dual.q - corner.q).abs() <= 1e-9 && (dual.e + corner.e).abs() <= 1e-9);
        let icra = conditional_mutual_information(&psi, &[2], &[3], &[0]).unwrap();
        let icrb = conditional_mutual_information(&psi, &[2], &[3], &[1]).unwrap();
        prop_assert!((icra - icrb).abs() <= 1e-7);
        let m = merging_costs(&psi, &p).unwrap();
        prop_assert!(m.cbits <= mutual_information(&psi, &[3, 0], &[2]).unwrap() + 1e-9);
        prop_assert!(m.cbits >= -1e-7);
    }

    #[test]
    fn special_cases_collapse(dims in dims_strategy(3, 3, 3), seed in any::<u64>()) {
        let psi = random_pure_state(&dims, seed).unwrap();
        let no_a = RolePartition::new(vec![], vec![0], vec![1], vec![2]);
        prop_assert!(fqsw_corner(&psi, &no_a).unwrap().max_deviation(&redistribution_corner(&psi, &no_a).unwrap()) <= 1e-9);
        let no_b = RolePartition::new(vec![0], vec![], vec![1], vec![2]);
        let fqrs = fqrs_corner(&psi, &no_b).unwrap();
        prop_assert!(fqrs.max_deviation(&redistribution_corner(&psi, &no_b).unwrap()) <= 1e-9);
        // the reverse-Shannon corner is the time reverse of the Slepian-Wolf one
        let swapped = no_b.swap_ab();
        let fqsw = fqsw_corner(&psi, &swapped).unwrap();
        prop_assert!((fqsw.q - fqrs.q).abs() <= 1e-9 && (fqsw.e + fqrs.e).abs() <= 1e-9);
    }

    #[test]
    fn composability_holds(dims in dims_strategy(5, 5, 2), seed in any::<u64>()) {
        let psi = random_pure_state(&dims, seed).unwrap();
        let p = RolePartition::from_labels(&[Role::A, Role::B, Role::C, Role::D, Role::R]);
        prop_assert!(composability_check(&psi, &p).unwrap().max_deviation <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hjpw_states_saturate_ssa(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let spec = HjpwSpec::random(&mut rng, 3, 2).unwrap();
        let (psi, p) = make_hjpw(&spec).unwrap();
        let qcmi = conditional_mutual_information(&psi, p.get(Role::C), p.get(Role::R), p.get(Role::B)).unwrap();
        prop_assert!(qcmi.abs() <= 1e-7);
        let e = redistribution_corner(&psi, &p).unwrap().e;
        prop_assert!((e.abs() - spec.block_entropy_gap().unwrap().abs()).abs() <= 1e-7);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let roles: Vec<Role> = (0..n).map(|_| Role::ALL[rng.gen_range(0..5)]).collect();
        let total: usize = dims.iter().product();
        let mut terms = Vec::new();
        for flat in 0..total {
            if rng.gen_bool(0.6) {
                let mut index = vec![0; n];
                let mut rest = flat;
                for (slot, &d) in index.iter_mut().zip(&dims).rev() {
                    *slot = rest % d;
                    rest /= d;
                }
                let amp = Complex64::new(rng.gen_range(-1.0..1.0), if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 });
                terms.push(Term { index, amp });
            }
        }
        if terms.is_empty() {
            terms.push(Term { index: vec![0; n], amp: Complex64::new(1.0, 0.0) });
        }
        let norm = terms.iter().map(|t| t.amp.norm_sqr()).sum::<f64>().sqrt();
        terms.iter_mut().for_each(|t| t.amp /= norm);
        let doc = StateDocument { dims, roles, terms };
        let text = format_state(&doc);
        let parsed = parse_state(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(format_state(&parsed), text);
    }
}
