mod common;

use common::{
    completeness, irrep as irrep_oracle, kron, phi_full, pure_fidelity, total_variation, uhlmann, M,
};
use proptest::prelude::*;
use symmes::designs::{find_channel_design, find_state_design, WeightedUnitarySet};
use symmes::linalg::{random_density, random_pure_state};
use symmes::mes::random_joint_state;
use symmes::mps::clone_demo;
use symmes::protocols::{
    design_state, run_teleportation, run_transformation, teleport_povm, transform_povm,
    BranchOutput,
};
use symmes::rng::seeded;

fn oracle_state_residual(d: &WeightedUnitarySet, rho: &M) -> f64 {
    let n = d.n();
    let mut acc = M::zeros(n + 1, n + 1);
    for e in d.entries() {
        let p = irrep_oracle(&e.unitary.to_dmatrix(), n);
        acc += (&p * rho * p.adjoint()) * common::c(e.weight);
    }
    (acc - M::identity(n + 1, n + 1) * common::c(1.0 / (n + 1) as f64)).norm()
}

fn oracle_channel_residual(d: &WeightedUnitarySet) -> f64 {
    let n = d.n();
    let dim = n + 1;
    let ps: Vec<(f64, M)> = d
        .entries()
        .iter()
        .map(|e| (e.weight, irrep_oracle(&e.unitary.to_dmatrix(), n)))
        .collect();
    let mut worst = 0.0f64;
    for j in 0..dim {
        for k in 0..dim {
            let mut e = M::zeros(dim, dim);
            e[(j, k)] = common::c(1.0);
            let mut acc = M::zeros(dim, dim);
            for (w, p) in &ps {
                acc += (p * &e * p.adjoint()) * common::c(*w);
            }
            if j == k {
                acc -= M::identity(dim, dim) * common::c(1.0 / dim as f64);
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

#[test]
fn state_designs_pass_the_oracle_residual() {
    for n in 1..=6 {
        let rho = random_density(n + 1, n + 1, &mut seeded(n as u64));
        let d = find_state_design(&rho, n, 3).unwrap();
        assert!(d.len() <= (n + 1) * (n + 1) + 1, "n={n} size {}", d.len());
        assert!(oracle_state_residual(&d, &rho) < 1e-8, "n={n}");
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(d.weights().iter().all(|&w| w > 0.0));
    }
}

#[test]
fn channel_designs_pass_the_oracle_residual() {
    for n in 1..=4 {
        let d = find_channel_design(n, 5).unwrap();
        assert!(d.len() <= 4 * (n + 1).pow(4) + 1);
        assert!(oracle_channel_residual(&d) < 1e-8, "n={n}");
    }
}

#[test]
fn transformation_branches_reach_the_target() {
    for n in 1..=4 {
        let mut rng = seeded(40 + n as u64);
        for k in 0..5 {
            let target = random_joint_state(n, &mut rng);
            let design = find_state_design(&design_state(&target), n, k).unwrap();
            let povm = transform_povm(&target, &design).unwrap();
            assert!(completeness(povm.operators()) < 1e-8);

            // probabilities straight from the Kraus operators on the full register
            let phi = phi_full(n);
            let lift = M::identity(1 << n, 1 << n);
            let probs: Vec<f64> = povm
                .operators()
                .iter()
                .map(|op| (kron(op, &lift) * &phi).norm_squared())
                .collect();
            assert!(total_variation(&probs, &design.weights()) < 1e-10);

            let branches = run_transformation(&target, &design, None).unwrap();
            let want = target.to_full().unwrap();
            for b in &branches {
                let BranchOutput::Joint(s) = &b.output else {
                    panic!("transformation yields joint states")
                };
                assert!(pure_fidelity(&s.to_full().unwrap(), &want) > 1.0 - 1e-9);
                assert!((b.probability - probs[b.outcome]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn teleportation_reproduces_pure_and_mixed_inputs() {
    for n in 1..=4 {
        let design = find_channel_design(n, 9).unwrap();
        let povm = teleport_povm(n, &design).unwrap();
        assert!(completeness(povm.operators()) < 1e-8);
        let mut rng = seeded(90 + n as u64);
        for rank in [1, n + 1] {
            let input = random_density(n + 1, rank, &mut rng);
            let run = run_teleportation(&input, &design, 1).unwrap();
            let total: f64 = run.branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for b in &run.branches {
                let BranchOutput::Participants(out) = &b.output else {
                    panic!("teleportation yields participant states")
                };
                assert!(uhlmann(&input, out) > 1.0 - 1e-9, "n={n} rank={rank}");
                assert!((b.probability - b.weight).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn cloning_matches_the_brute_force_optimum() {
    for n in 1..=4 {
        let design = find_channel_design(n, 2).unwrap();
        let psi = random_pure_state(2, &mut seeded(70 + n as u64));
        let oracle = common::cloner_fidelity(n, &psi);
        let report = clone_demo(n, &psi, &design, 4).unwrap();
        for b in &report.branches {
            assert!((b.copy_fidelity - oracle).abs() < 1e-8, "n={n}");
        }
        assert!((report.ideal_fidelity - oracle).abs() < 1e-8);
    }
    let psi = random_pure_state(2, &mut seeded(1));
    assert!((common::cloner_fidelity(2, &psi) - 5.0 / 6.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transformation_probabilities_equal_weights(seed in any::<u64>(), n in 1usize..=4) {
        let target = random_joint_state(n, &mut seeded(seed));
        let design = find_state_design(&design_state(&target), n, seed).unwrap();
        let branches = run_transformation(&target, &design, None).unwrap();
        let p: Vec<f64> = branches.iter().map(|b| b.probability).collect();
        prop_assert!(total_variation(&p, &design.weights()) < 1e-10);
        prop_assert!(branches.iter().all(|b| b.fidelity > 1.0 - 1e-9));
    }

    #[test]
    fn teleported_pure_states_are_exact(seed in any::<u64>(), n in 1usize..=3) {
        let design = find_channel_design(n, seed % 7).unwrap();
        let psi = random_pure_state(n + 1, &mut seeded(seed));
        let input = &psi * psi.adjoint();
        let run = run_teleportation(&input, &design, seed).unwrap();
        prop_assert!(run.sampled_outcome < run.branches.len());
        for b in &run.branches {
            let BranchOutput::Participants(out) = &b.output else { unreachable!() };
            let f = (psi.adjoint() * out * &psi)[(0, 0)].re;
            prop_assert!(f > 1.0 - 1e-9);
        }
    }
}
