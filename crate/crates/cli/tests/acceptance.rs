//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

use responsibility::aided_decision::{
    automation_rates, build_tables, dual_criteria, human_conditional_rates, responsibility,
    ScenarioParams,
};
use responsibility::flowmodel::aws_network;
use responsibility::infotheory::{
    conditional_entropy, entropy, joint_entropy, mutual_information, remaining_uncertainty_ratio,
    responsibility_ratio, theil_u, Axis, JointPmf,
};
use responsibility::sdt::{
    optimal_beta, posterior_target_given_alarm, posterior_target_given_noise,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn respcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_respcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> Result<String, String> {
    let out = respcalc(args);
    if !out.status.success() {
        return Err(format!(
            "respcalc {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(String::from_utf8(out.stdout).expect("utf-8 output"))
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Csv {
    fn parse(text: &str) -> Csv {
        let mut lines = text.lines();
        let header = lines
            .next()
            .unwrap_or("")
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| {
                l.split(',')
                    .map(|v| v.parse().expect("numeric cell"))
                    .collect()
            })
            .collect();
        Csv { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .expect("column present")
    }
}

fn preset(name: &str) -> Result<Csv, String> {
    stdout_of(&["sweep", "--preset", name]).map(|s| Csv::parse(&s))
}

fn scenario(rng: &mut ChaCha20Rng) -> ScenarioParams {
    ScenarioParams::new(
        rng.random_range(0.05..0.95),
        rng.random_range(0.1..4.0),
        rng.random_range(0.1..4.0),
    )
    .with_v_ratios(rng.random_range(0.2..5.0), rng.random_range(0.2..5.0))
}

fn criterion_1() -> Check {
    let beta = optimal_beta(0.2, 2.0 / 3.0).map_err(|e| e.to_string())?;
    let report: Value = serde_json::from_str(&stdout_of(&["compute", "--dh", "2", "--da", "2"])?)
        .map_err(|e| e.to_string())?;
    let reported = report["automation"]["beta"].as_f64().unwrap_or(f64::NAN);
    let ok = (beta - 2.6667).abs() <= 1e-4
        && (beta - 8.0 / 3.0).abs() <= 1e-9
        && (reported - beta).abs() <= 1e-12;
    let msg = format!("optimal_beta(0.2, 2/3) = {beta:.12}, report beta = {reported:.12}");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_2() -> Check {
    let csv = preset("fig4")?;
    let (ih, ia, ir) = (csv.col("d_human"), csv.col("d_automation"), csv.col("resp"));
    if csv.rows.len() != 289 {
        return Err(format!("{} rows, expected 289", csv.rows.len()));
    }
    let at = |h: usize, a: usize| &csv.rows[h * 17 + a];
    let mut margin = f64::INFINITY;
    for h in 0..17 {
        for a in 0..17 {
            if a + 1 < 17 {
                if at(h, a + 1)[ia] <= at(h, a)[ia] {
                    return Err("grid not ordered by d_automation".into());
                }
                margin = margin.min(at(h, a)[ir] - at(h, a + 1)[ir]);
            }
            if h + 1 < 17 {
                if at(h + 1, a)[ih] <= at(h, a)[ih] {
                    return Err("grid not ordered by d_human".into());
                }
                margin = margin.min(at(h + 1, a)[ir] - at(h, a)[ir]);
            }
        }
    }
    let msg = format!("smallest step in the expected direction {margin:.3e}");
    if margin >= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn compute_resp(d_h: &str, d_a: &str) -> Result<f64, String> {
    let v: Value = serde_json::from_str(&stdout_of(&["compute", "--dh", d_h, "--da", d_a])?)
        .map_err(|e| e.to_string())?;
    v["resp"].as_f64().ok_or_else(|| "resp missing".to_string())
}

fn criterion_3() -> Check {
    let low = compute_resp("0.05", "5")?;
    let high = compute_resp("5", "0.05")?;
    let msg = format!("resp(0.05, 5) = {low:.3e}, resp(5, 0.05) = {high:.6}");
    if low < 0.01 && high > 0.99 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Check {
    let csv = preset("fig5")?;
    let (ir, ih, ia, iv) = (
        csv.col("r"),
        csv.col("d_human"),
        csv.col("d_automation"),
        csv.col("resp"),
    );
    let max_where = |pred: &dyn Fn(f64) -> bool| {
        csv.rows
            .iter()
            .filter(|r| pred(r[ir]))
            .map(|r| r[iv])
            .fold(0.0, f64::max)
    };
    let ge3 = max_where(&|r| r >= 3.0);
    let gt2 = max_where(&|r| r > 2.0);
    let diag = |d: f64| {
        csv.rows
            .iter()
            .find(|r| (r[ih] - d).abs() < 1e-9 && (r[ia] - d).abs() < 1e-9)
            .map(|r| r[iv])
            .unwrap_or(f64::NAN)
    };
    let (r33, r66) = (diag(3.0), diag(0.6));
    let checks = [
        ("max resp at R >= 3 < 0.10", ge3 < 0.10, ge3),
        ("max resp at R > 2 < 0.20", gt2 < 0.20, gt2),
        ("resp(3, 3) in [0.4, 0.6]", (0.4..=0.6).contains(&r33), r33),
        (
            "resp(0.6, 0.6) in [0.6, 0.8]",
            (0.6..=0.8).contains(&r66),
            r66,
        ),
    ];
    let msg = checks
        .iter()
        .map(|(name, ok, v)| format!("{name}: {} ({v:.4})", if *ok { "ok" } else { "NOT MET" }))
        .collect::<Vec<_>>()
        .join("; ");
    if checks.iter().all(|c| c.1) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Check {
    let a = preset("fig6a")?;
    let (ib, iv) = (a.col("beta_ratio"), a.col("resp"));
    let min_a = a
        .rows
        .iter()
        .filter(|r| (0.1..=10.0).contains(&r[ib]))
        .map(|r| r[iv])
        .fold(f64::INFINITY, f64::min);
    let b = preset("fig6b")?;
    let at = |x: f64| {
        b.rows
            .iter()
            .find(|r| (r[ib] - x).abs() < 1e-9)
            .map(|r| r[iv])
            .unwrap_or(f64::NAN)
    };
    let (one, ten) = (at(1.0), at(10.0));
    let ok = min_a > 0.8 && one < 0.10 && ten - one > 0.15 && (0.3..=0.6).contains(&ten);
    let msg = format!(
        "R=1/3 min resp over [0.1, 10] = {min_a:.4}; R=3 resp(1) = {one:.4}, resp(10) = {ten:.4}"
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = scenario(&mut rng);
        let t = build_tables(&p).map_err(|e| e.to_string())?;
        let auto = automation_rates(&p).map_err(|e| e.to_string())?;
        let dual = dual_criteria(&p, &auto).map_err(|e| e.to_string())?;
        let h = human_conditional_rates(&p, &dual).map_err(|e| e.to_string())?;
        let p_alarm = p.p_t * auto.p_tp + (1.0 - p.p_t) * auto.p_fp;
        let post_a = posterior_target_given_alarm(p.p_t, &auto).map_err(|e| e.to_string())?;
        let post_n = posterior_target_given_noise(p.p_t, &auto).map_err(|e| e.to_string())?;
        let engage = p_alarm * (post_a * h.given_alarm.p_tp + (1.0 - post_a) * h.given_alarm.p_fp)
            + (1.0 - p_alarm) * (post_n * h.given_noise.p_tp + (1.0 - post_n) * h.given_noise.p_fp);
        let rows = t.joint_xy.row_marginal();
        let cols = t.joint_xy.col_marginal();
        for d in [
            rows.probs()[0] - p_alarm,
            rows.probs()[1] - (1.0 - p_alarm),
            cols.probs()[0] - engage,
            cols.probs()[1] - (1.0 - engage),
        ] {
            worst = worst.max(d.abs());
        }
    }
    let msg = format!("1000 scenarios, largest marginal deviation {worst:.3e}");
    if worst <= 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = scenario(&mut rng);
        let closed = responsibility(&p).map_err(|e| e.to_string())?.resp;
        let general = aws_network(&p)
            .and_then(|m| m.general_responsibility())
            .map_err(|e| e.to_string())?
            .resp;
        worst = worst.max((closed - general).abs());
    }
    let msg = format!("100 scenarios, largest |general - closed form| {worst:.3e}");
    if worst <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Check {
    const TRIALS: f64 = 1e6;
    let seeds: Vec<u64> = (1..=20).collect();
    let results: Vec<Result<(bool, f64, f64), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|seed| {
                s.spawn(move || {
                    let seed = seed.to_string();
                    let doc: Value = serde_json::from_str(&stdout_of(&[
                        "simulate", "--trials", "1000000", "--seed", &seed,
                    ])?)
                    .map_err(|e| e.to_string())?;
                    let mut worst_z: f64 = 0.0;
                    for y in ["target", "noise"] {
                        for x in ["engage", "abort"] {
                            let q = doc["analytic_joint"][y][x].as_f64().unwrap_or(f64::NAN);
                            let e = doc["empirical_joint"][y][x].as_f64().unwrap_or(f64::NAN);
                            let sigma = (q * (1.0 - q) / TRIALS).sqrt();
                            worst_z = worst_z.max((e - q).abs() / sigma);
                        }
                    }
                    let gap = (doc["empirical_resp"].as_f64().unwrap_or(f64::NAN)
                        - doc["analytic_resp"].as_f64().unwrap_or(f64::NAN))
                    .abs();
                    Ok((worst_z <= 4.0 && gap < 0.01, worst_z, gap))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("thread"))
            .collect()
    });
    let mut passed = 0;
    let (mut max_z, mut max_gap): (f64, f64) = (0.0, 0.0);
    for r in results {
        let (ok, z, gap) = r?;
        passed += usize::from(ok);
        max_z = max_z.max(z);
        max_gap = max_gap.max(gap);
    }
    let msg = format!(
        "{passed}/20 seeds within 4 sigma and 0.01 (max z {max_z:.2}, max resp gap {max_gap:.2e})"
    );
    if passed >= 19 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_joint(rng: &mut ChaCha20Rng) -> JointPmf {
    let r = rng.random_range(2..=5);
    let c = rng.random_range(2..=5);
    let mut w: Vec<f64> = (0..r * c)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if w.iter().sum::<f64>() == 0.0 {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    JointPmf::from_cells(
        w.chunks(c)
            .map(|row| row.iter().map(|x| x / total).collect())
            .collect(),
    )
    .expect("valid joint")
}

fn criterion_9() -> Check {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut failures = [0usize; 5];
    let mut complement_cases = 0;
    for _ in 0..2000 {
        let j = random_joint(&mut rng);
        let (h_row, h_col, h) = (
            entropy(&j.row_marginal()),
            entropy(&j.col_marginal()),
            joint_entropy(&j),
        );
        if (h - h_row - conditional_entropy(&j, Axis::Row)).abs() > TOL
            || (h - h_col - conditional_entropy(&j, Axis::Col)).abs() > TOL
        {
            failures[0] += 1;
        }
        if mutual_information(&j) < 0.0 {
            failures[1] += 1;
        }
        if conditional_entropy(&j, Axis::Row) > h_col + TOL
            || conditional_entropy(&j, Axis::Col) > h_row + TOL
        {
            failures[2] += 1;
        }
        if let (Ok(u), Ok(rest), Ok(resp)) = (
            theil_u(&j, Axis::Col),
            remaining_uncertainty_ratio(&j, Axis::Col),
            responsibility_ratio(&j),
        ) {
            complement_cases += 1;
            if (u + rest - 1.0).abs() > TOL || (u + resp - 1.0).abs() > TOL {
                failures[3] += 1;
            }
        }
        let (r, c) = j.shape();
        let shift = rng.random_range(1..r.max(2));
        let permuted = JointPmf::from_cells(
            (0..r)
                .map(|i| (0..c).rev().map(|k| j.cell((i + shift) % r, k)).collect())
                .collect(),
        )
        .expect("valid joint");
        let same = match (responsibility_ratio(&j), responsibility_ratio(&permuted)) {
            (Ok(a), Ok(b)) => (a - b).abs() <= TOL,
            (a, b) => a.is_err() && b.is_err(),
        };
        if !same || (joint_entropy(&permuted) - h).abs() > TOL {
            failures[4] += 1;
        }
    }
    let names = [
        "chain rule",
        "I >= 0",
        "conditioning",
        "U + Resp = 1",
        "permutation",
    ];
    let msg = format!(
        "2000 joints ({complement_cases} with non-degenerate action); failures: {}",
        names
            .iter()
            .zip(failures)
            .map(|(n, f)| format!("{n} {f}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if failures.iter().all(|&f| f == 0) && complement_cases >= 1000 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_10() -> Check {
    let a = stdout_of(&["sweep", "--preset", "fig4"])?;
    let b = stdout_of(&["sweep", "--preset", "fig4"])?;
    let sim = ["simulate", "--trials", "100000", "--seed", "42"];
    let c = stdout_of(&sim)?;
    let d = stdout_of(&sim)?;
    let msg = format!(
        "fig4 CSV {} bytes, simulate JSON {} bytes",
        a.len(),
        c.len()
    );
    if a == b && c == d {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("optimal criterion", criterion_1),
        ("monotone sensitivity grid", criterion_2),
        ("sensitivity limits", criterion_3),
        ("sensitivity-ratio anchors", criterion_4),
        ("criterion-mismatch anchors", criterion_5),
        ("table marginals", criterion_6),
        ("general model equals closed form", criterion_7),
        ("Monte Carlo agreement", criterion_8),
        ("information-theory properties", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS  {:>2}. {name}: {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {msg} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
