//! Instance, schedule and trace files written to disk and read back.

use ucadmm::io::{load_instance_path, load_schedule, read_trace, save_instance, save_results};
use ucadmm::{generate_synthetic, run_increasing_rho, SolverConfig, SyntheticParams};

#[test]
fn instance_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let p = SyntheticParams {
        n_gens: 4,
        n_nodes: 3,
        n_lines: 3,
        n_res: 2,
        n_storage: 1,
        horizon: 12,
        ..Default::default()
    };
    let inst = generate_synthetic(&p, 42).unwrap();
    let path = dir.path().join("inst.json");
    save_instance(&inst, &path).unwrap();
    assert_eq!(load_instance_path(&path).unwrap(), inst);
}

#[test]
fn results_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate_synthetic(
        &SyntheticParams {
            horizon: 6,
            n_storage: 1,
            ..Default::default()
        },
        3,
    )
    .unwrap();
    let r = run_increasing_rho(
        &inst,
        &SolverConfig {
            trace: true,
            ..Default::default()
        },
    )
    .unwrap();
    let (sched, trace) = (dir.path().join("s.json"), dir.path().join("t.csv"));
    save_results(&r, &sched, &trace).unwrap();
    let doc = load_schedule(&sched).unwrap();
    assert_eq!(doc.schedule, r.schedule);
    assert_eq!(doc.objective, r.objective);
    assert_eq!(doc.iterations, r.iterations);
    let back = read_trace(std::fs::File::open(&trace).unwrap()).unwrap();
    assert_eq!(back, r.trace);
    assert!(!back.is_empty());
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_instance_path("/definitely/not/here.json").unwrap_err();
    assert!(matches!(err, ucadmm::UcError::Io(_)));
}
