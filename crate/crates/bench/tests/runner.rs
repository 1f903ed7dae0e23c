use std::path::PathBuf;

use softqn::solver::Budget;
use softqn_bench::config::{ExperimentConfig, ExperimentKind};
use softqn_bench::{monte_carlo_with, Execution};

fn small(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(kind);
    cfg.trials = 3;
    cfg.base_seed = 21;
    cfg.n = 10;
    cfg.problems = vec!["TRIDIA".into(), "ARWHEAD".into()];
    cfg.dataset = Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/ijcnn1_synthetic.libsvm"));
    cfg.budget = match cfg.budget {
        Budget::Iterations(_) => Budget::Iterations(60),
        Budget::FunEvals(_) => Budget::FunEvals(150),
    };
    cfg
}

#[cfg(feature = "parallel")]
#[test]
fn serial_and_parallel_agree() {
    for kind in [ExperimentKind::Qp, ExperimentKind::Cutest, ExperimentKind::Logreg, ExperimentKind::Toy] {
        let cfg = small(kind);
        let serial = monte_carlo_with(&cfg, Execution::Serial).unwrap();
        let parallel = monte_carlo_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(serial, parallel, "{}", kind.name());
    }
}

#[test]
fn records_are_laid_out_by_method_then_trial() {
    let cfg = small(ExperimentKind::Cutest);
    let res = monte_carlo_with(&cfg, Execution::Serial).unwrap();
    assert_eq!(res.groups.len(), 2);
    assert_eq!(res.groups[0].problem, "TRIDIA");
    for g in &res.groups {
        assert_eq!(g.records.len(), cfg.methods.len());
        assert_eq!(g.reference.len(), cfg.trials);
        for (m, per_method) in g.records.iter().enumerate() {
            assert_eq!(per_method.len(), cfg.trials);
            let expected = cfg.methods[m].setting.resolve(1.0);
            assert!(per_method.iter().all(|r| r.method == expected.label()));
            assert!(per_method.iter().all(|r| r.fun_evals == 150));
        }
    }
}

#[test]
fn paired_noise_gives_methods_the_same_problem() {
    // QP trials regenerate the problem from the trial seed, so every method
    // starts from the same φ(x₀) and sees the same first gradient.
    let cfg = small(ExperimentKind::Qp);
    let res = monte_carlo_with(&cfg, Execution::Serial).unwrap();
    let g = &res.groups[0];
    for t in 0..cfg.trials {
        let first: Vec<f64> = g.records.iter().map(|m| m[t].true_suboptimality[0]).collect();
        assert!(first.windows(2).all(|w| w[0] == w[1]));
    }
    assert_ne!(g.reference[0], g.reference[1]);
}

#[test]
fn logreg_streams_depend_on_method() {
    let mut cfg = small(ExperimentKind::Logreg);
    cfg.select_methods(&["sgd".into(), "softqn".into()]).unwrap();
    let both = monte_carlo_with(&cfg, Execution::Serial).unwrap();
    cfg.select_methods(&["softqn".into()]).unwrap();
    let alone = monte_carlo_with(&cfg, Execution::Serial).unwrap();
    // Seeds key on the method name, not its position in the list.
    assert_eq!(both.groups[0].records[1], alone.groups[0].records[0]);
}
