//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use costcut::data::seeded_rng;
use costcut::decision::{classify, expected_costs, make_policy, policy_from_ratio, Action};
use costcut::encoding::{traffic_light, DesignColumn, DesignMatrix, Provenance, ThresholdSet};
use costcut::evaluation::{
    baseline_all_negative, break_even_ratio, cost_saving_vs_all_negative, diagnostic_metrics,
    required_lr_plus, total_cost, LrForm,
};
use costcut::fixtures::{TRAINING_BENCHMARK, TRAINING_FOREST, VALIDATION_FOREST};
use costcut::glm::{fit, log_likelihood_at, score, FitOptions};
use costcut::selection::{exhaustive_best_aic, stepwise, SelectionConfig};
use costcut::Execution;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{name}: {got} not within {tol} of {want}"))
    }
}

fn c1_cutpoint() -> Outcome {
    let p = make_policy(10.0, 1.0).map_err(|e| e.to_string())?;
    let printed = format!("{:.2}%", 100.0 * p.cutpoint());
    if p.cutpoint() == 1.0 / 11.0 && printed == "9.09%" {
        Ok(format!("cutpoint {} printed {printed}", p.cutpoint()))
    } else {
        Err(format!("cutpoint {} printed {printed}", p.cutpoint()))
    }
}

fn c2_cost_identities() -> Outcome {
    let ten = policy_from_ratio(10.0).unwrap();
    let got = [
        total_cost(&TRAINING_FOREST, &ten),
        total_cost(&TRAINING_BENCHMARK, &ten),
        total_cost(&VALIDATION_FOREST, &ten),
        baseline_all_negative(VALIDATION_FOREST.positives(), &ten),
    ];
    if got == [3614.0, 3211.0, 4173.0, 3480.0] {
        Ok(format!("{got:?}"))
    } else {
        Err(format!("{got:?} != [3614, 3211, 4173, 3480]"))
    }
}

fn c3_lr_plus() -> Outcome {
    let m = diagnostic_metrics(&TRAINING_FOREST).map_err(|e| e.to_string())?;
    within("LR+", m.lr_plus, 7.16, 0.01)?;
    Ok(format!("LR+ = {:.4}", m.lr_plus))
}

fn c4_required_lr() -> Outcome {
    let prev = 322.0 / 30000.0;
    let ratio = required_lr_plus(prev, 0.5, LrForm::ProbabilityRatio).map_err(|e| e.to_string())?;
    let odds = required_lr_plus(prev, 0.5, LrForm::Odds).map_err(|e| e.to_string())?;
    within("probability-ratio form", ratio, 46.58, 0.1)?;
    within("probability-ratio form vs 46.6", ratio, 46.6, 0.1)?;
    within("odds form", odds, 92.17, 0.1)?;
    Ok(format!("probability-ratio {ratio:.3}, odds {odds:.3}"))
}

fn c5_break_even() -> Outcome {
    let r = break_even_ratio(&VALIDATION_FOREST).ok_or("break-even undefined")?;
    within("break-even", r, 14.62, 0.01)?;
    within("break-even vs 15:1", r, 15.0, 0.5)?;
    Ok(format!("{r:.4} (note: quoted as 15:1)"))
}

fn c6_saving() -> Outcome {
    let hundred = policy_from_ratio(100.0).unwrap();
    let s = 100.0 * cost_saving_vs_all_negative(&VALIDATION_FOREST, &hundred).map_err(|e| e.to_string())?;
    within("saving", s, 36.8, 0.1)?;
    within("saving vs 38%", s, 38.0, 2.0)?;
    Ok(format!("{s:.2}% (note: quoted as 38%)"))
}

fn c7_balance() -> Outcome {
    let ten = policy_from_ratio(10.0).unwrap();
    let (lo, hi) = expected_costs(1.0 / 11.0, &ten).map_err(|e| e.to_string())?;
    within("cost if low", lo, 10.0 / 11.0, 1e-12)?;
    within("cost if high", hi, 10.0 / 11.0, 1e-12)?;
    Ok(format!("{lo} / {hi}"))
}

fn c8_argmin() -> Outcome {
    let mut rng = seeded_rng(8);
    let mut agree = 0;
    let total = 10_000;
    for _ in 0..total {
        let p: f64 = rng.random();
        let r = 10f64.powf(rng.random_range(-2.0..3.0));
        let policy = policy_from_ratio(r).unwrap();
        let d = classify(p, &policy).unwrap();
        let argmin = if d.cost_if_high <= d.cost_if_low { Action::HighRisk } else { Action::LowRisk };
        if d.action == argmin {
            agree += 1;
        }
    }
    if agree == total {
        Ok(format!("{agree}/{total} agree"))
    } else {
        Err(format!("{agree}/{total} agree"))
    }
}

fn c9_glm() -> Outcome {
    // Intercept-only closed forms on the 322-in-30000 sample.
    let (n, k) = (30_000usize, 322usize);
    let y: Vec<u8> = (0..n).map(|i| u8::from(i < k)).collect();
    let f = fit(&DesignMatrix::intercept_only(n), &y, &FitOptions::default()).map_err(|e| e.to_string())?;
    let p = k as f64 / n as f64;
    within("intercept", f.coefficients[0], (p / (1.0 - p)).ln(), 1e-10)?;
    within("intercept se", f.std_errors()[0], (1.0 / (n as f64 * p * (1.0 - p))).sqrt(), 1e-10)?;
    let ll = k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
    within("log-likelihood", f.log_likelihood, ll, 1e-10 * ll.abs())?;

    // Score equations, gradient and fitted sum on a five-column synthetic fit.
    let mut rng = seeded_rng(9);
    let n = 3000;
    let mut design = DesignMatrix::intercept_only(n);
    let beta_true = [-2.0, 0.8, -0.5, 1.2, 0.3];
    let mut cols = Vec::new();
    for j in 1..beta_true.len() {
        let col: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
        design = design
            .append_column(
                DesignColumn { name: format!("x{j}"), provenance: Provenance::Linear { variable: format!("x{j}") } },
                col.clone(),
            )
            .unwrap();
        cols.push(col);
    }
    let y: Vec<u8> = (0..n)
        .map(|i| {
            let eta = beta_true[0] + (1..beta_true.len()).map(|j| beta_true[j] * cols[j - 1][i]).sum::<f64>();
            u8::from(rng.random::<f64>() < costcut::probability(eta))
        })
        .collect();
    let f = fit(&design, &y, &FitOptions::default()).map_err(|e| e.to_string())?;
    let nf = n as f64;
    let u = score(&design, &y, &f.coefficients);
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if umax > 1e-6 * nf {
        return Err(format!("score max {umax} exceeds 1e-6 n"));
    }
    let fitted: f64 = f.probabilities_design(&design, Execution::Sequential).unwrap().iter().sum();
    let positives = y.iter().filter(|&&v| v == 1).count() as f64;
    within("fitted sum", fitted, positives, 1e-6 * nf)?;

    let probe: Vec<f64> = f.coefficients.iter().enumerate().map(|(j, b)| b + 0.1 * (j as f64 - 2.0)).collect();
    let grad = score(&design, &y, &probe);
    for j in 0..probe.len() {
        let h = 1e-5;
        let mut plus = probe.clone();
        let mut minus = probe.clone();
        plus[j] += h;
        minus[j] -= h;
        let fd = (log_likelihood_at(&design, &y, &plus) - log_likelihood_at(&design, &y, &minus)) / (2.0 * h);
        let rel = (fd - grad[j]).abs() / grad[j].abs().max(1.0);
        if rel > 1e-5 {
            return Err(format!("gradient {j}: analytic {} vs finite difference {fd}", grad[j]));
        }
    }

    // Rescaling a column changes its coefficient, not the fitted probabilities.
    let scaled: Vec<f64> = cols[0].iter().map(|v| v * 250.0).collect();
    let rescaled = design
        .drop_column("x1")
        .unwrap()
        .append_column(
            DesignColumn { name: "x1".into(), provenance: Provenance::Linear { variable: "x1".into() } },
            scaled,
        )
        .unwrap();
    let g = fit(&rescaled, &y, &FitOptions::default()).map_err(|e| e.to_string())?;
    let pa = f.probabilities_design(&design, Execution::Sequential).unwrap();
    let pb = g.probabilities_design(&rescaled, Execution::Sequential).unwrap();
    let worst = pa.iter().zip(&pb).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if worst > 1e-8 {
        return Err(format!("rescaled probabilities differ by {worst}"));
    }
    Ok(format!("score max {umax:.2e}, rescale gap {worst:.2e}"))
}

fn random_instance(seed: u64) -> (DesignMatrix, Vec<u8>) {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(400..1200);
    let k = rng.random_range(3..=10);
    let mut design = DesignMatrix::intercept_only(n);
    let mut eta = vec![rng.random_range(-2.5..-0.5); n];
    for j in 0..k {
        let binary = rng.random_bool(0.4);
        let col: Vec<f64> = (0..n)
            .map(|_| if binary { f64::from(u8::from(rng.random_bool(0.3))) } else { rng.random_range(0.0..1.0) })
            .collect();
        let beta = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(-1.5..1.5) };
        for (e, x) in eta.iter_mut().zip(&col) {
            *e += beta * x;
        }
        design = design
            .append_column(
                DesignColumn { name: format!("c{j}"), provenance: Provenance::Linear { variable: format!("c{j}") } },
                col,
            )
            .unwrap();
    }
    let y = eta.iter().map(|&e| u8::from(rng.random::<f64>() < costcut::probability(e))).collect();
    (design, y)
}

fn c10_stepwise_oracle() -> Outcome {
    let opts = FitOptions::default();
    let mut worst_gap = 0.0f64;
    for seed in 0..20u64 {
        let (design, y) = random_instance(1000 + seed);
        let (f, trace) = stepwise(&design, &y, &SelectionConfig::default(), &opts).map_err(|e| e.to_string())?;
        let best = exhaustive_best_aic(&design, &y, 12, &opts, Execution::Parallel).map_err(|e| e.to_string())?;
        let gap = f.aic - best.aic;
        if !(-1e-9..=10.0).contains(&gap) {
            return Err(format!("instance {seed}: stepwise {} vs oracle {}", f.aic, best.aic));
        }
        for st in &trace.steps {
            if st.aic_after >= st.aic_before {
                return Err(format!("instance {seed}: step {:?} did not lower AIC", st.columns));
            }
        }
        worst_gap = worst_gap.max(gap);
    }
    Ok(format!("20 instances, largest gap {worst_gap:.4}"))
}

fn c11_traffic_light_merge() -> Outcome {
    let grid: Vec<f64> = (-8..=60).map(|i| f64::from(i) * 0.25).collect();
    let mut checked = 0;
    for t in [[1.0, 4.0, 9.0], [0.0, 0.25, 0.5], [2.5, 7.0, 7.25], [-1.0, 3.0, 14.75]] {
        let set = ThresholdSet::new("x", t.to_vec()).unwrap();
        let full = traffic_light(&grid, &set);
        // Drop the middle dummy and keep the outer two.
        let rows: Vec<[f64; 2]> = (0..grid.len()).map(|i| [full[0][i], full[2][i]]).collect();
        let band = |x: f64| t.iter().filter(|&&c| x >= c).count();
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                let merged = |b: usize| if b == 2 { 1 } else { b };
                let same = merged(band(grid[i])) == merged(band(grid[j]));
                if (rows[i] == rows[j]) != same {
                    return Err(format!("thresholds {t:?}: x={} and x={} disagree", grid[i], grid[j]));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} pairs"))
}

fn c12_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    common::run_pipeline(a.path());
    common::run_pipeline(b.path());
    for name in common::PIPELINE_FILES {
        let x = std::fs::read(a.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        let y = std::fs::read(b.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        if x != y {
            return Err(format!("{name} differs between runs"));
        }
    }
    let check = common::costcut(a.path(), &["paper-check"]);
    if check.status.code() != Some(0) {
        return Err(format!("paper-check exited {:?}", check.status.code()));
    }
    Ok(format!("{} files identical; paper-check exit 0", common::PIPELINE_FILES.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("cutpoint 1/11 printed as 9.09%", c1_cutpoint),
        ("integer cost identities", c2_cost_identities),
        ("LR+ 7.16 on training forest counts", c3_lr_plus),
        ("required LR+ for 50% posterior", c4_required_lr),
        ("break-even cost ratio", c5_break_even),
        ("saving vs all-negative at 100:1", c6_saving),
        ("expected-cost balance at the cutpoint", c7_balance),
        ("classify equals expected-cost argmin", c8_argmin),
        ("logistic fit correctness", c9_glm),
        ("stepwise AIC vs exhaustive oracle", c10_stepwise_oracle),
        ("traffic-light merge", c11_traffic_light_merge),
        ("end-to-end determinism", c12_determinism),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({detail})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {:>2}: {name} ({why})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
