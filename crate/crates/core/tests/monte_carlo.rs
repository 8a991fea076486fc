use responsibility::aided_decision::ScenarioParams;
use responsibility::simulate::{simulate_aws, SimConfig};

#[test]
fn sample_agrees_with_closed_form() {
    let p = ScenarioParams::reference(2.0, 2.0);
    let n = 200_000;
    let r = simulate_aws(&p, &SimConfig::new(n, 11).unwrap()).unwrap();
    for (y, row) in r.analytic_joint.cells().iter().enumerate() {
        for (x, &q) in row.iter().enumerate() {
            let sigma = (q * (1.0 - q) / n as f64).sqrt();
            let got = r.empirical_joint.cell(y, x);
            assert!(
                (got - q).abs() <= 4.0 * sigma,
                "cell ({y}, {x}): {got} vs {q}"
            );
        }
    }
    assert!((r.empirical_resp - r.analytic_resp).abs() < 0.02);
    assert_eq!(r.counts.iter().flatten().sum::<u64>(), n);
}

#[test]
fn output_is_reproducible() {
    let p = ScenarioParams::reference(1.5, 2.5);
    let cfg = SimConfig::new(50_000, 3).unwrap();
    let a = serde_json::to_string(&simulate_aws(&p, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&simulate_aws(&p, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"analytic_resp\""));
}

#[test]
fn lopsided_tiny_sample_is_degenerate() {
    // With one trial only one action can occur.
    let p = ScenarioParams::reference(2.0, 2.0);
    let err = simulate_aws(&p, &SimConfig::new(1, 0).unwrap()).unwrap_err();
    assert!(matches!(
        err,
        responsibility::Error::DegenerateSample { trials: 1 }
    ));
}
