mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force, tiny_params};
use vrpsc::exact::{solve_exact, TinyLimit};
use vrpsc::instance::random::random_instance;
use vrpsc::solution::validate;

#[test]
fn exact_solver_matches_brute_force() {
    let (mut feasible, mut infeasible) = (0, 0);
    for seed in 0..80 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = tiny_params(&mut rng, 5);
        let inst = random_instance::<f64, _>(&mut rng, &params).unwrap();
        let exact = solve_exact(&inst, &TinyLimit::default()).unwrap();
        let brute = brute_force(&inst);
        match (&exact, brute) {
            (Some(s), Some(b)) => {
                assert!((s.cost - b).abs() <= 1e-6, "seed {seed}: {} vs {b}", s.cost);
                assert!(validate(&inst, s).is_empty(), "seed {seed}");
                feasible += 1;
            }
            (None, None) => infeasible += 1,
            _ => panic!("seed {seed}: exact {:?} brute {brute:?}", exact.map(|s| s.cost)),
        }
    }
    eprintln!("{feasible} feasible, {infeasible} infeasible");
    assert!(feasible >= 40, "{feasible} feasible, {infeasible} infeasible");
}
