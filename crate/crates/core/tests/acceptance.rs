//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use isp_core::analysis::{
    approx_error_sweep, closed_form_error, closed_form_sweep, cube_sweep, lower_bound_constant,
    lower_bound_inequality_holds, perturbation_power_check, ptilde_crossing_time,
    sole_pg_failure_sweep, speedup_table,
};
use isp_core::closed_form::pg2_full_transfer;
use isp_core::reduced::{
    block_2x2, parallel_grover, reduced_grover_register, reduced_iam_register, reduced_oracle,
};
use isp_core::schedule::{
    compose_blocks, k3_paper_schedule, optimize_k3_constants, parallel_peak, pg2_schedule,
    sequential_grover_schedule, sequential_peak, success_threshold,
};
use isp_core::statevector::random_equivalence_cases;
use isp_core::{EdgeKind, K3Constants, ProblemParams, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn sweep_ns(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).step_by(2).collect()
}

fn oracle_equivalence() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 1..=3 {
        for n in 1..=5 {
            let params = ProblemParams::new(k, n)?;
            for c in random_equivalence_cases(&params, 50, 200, 2024, |s| s.reduced(&params))? {
                worst = worst.max(c.deviation).max(c.residual);
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-10 && elapsed <= Duration::from_secs(120),
        format!(
            "{cases} sequences, max deviation {worst:.3e} (<= 1e-10), {:.1}s (<= 120s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn pg2_closed_form() -> Result<Outcome> {
    let params = ProblemParams::new(2, 20)?;
    let err = closed_form_error(&params, &[0.3, 0.7, pg2_full_transfer()])?;
    let bound = 5.0 / params.sqrt_size();
    let sweep = closed_form_sweep(&sweep_ns(10, 24), &[0.3, 0.7, pg2_full_transfer()])?;
    outcome(
        err <= bound && (sweep.slope + 0.5).abs() <= 0.1,
        format!(
            "error at 2^20 {err:.3e} (<= {bound:.3e}), slope {:.4} (-0.5 +/- 0.1)",
            sweep.slope
        ),
    )
}

fn sqrt2_speedup() -> Result<Outcome> {
    let params = ProblemParams::new(2, 20)?;
    let threshold = success_threshold(&params);
    let seq = sequential_peak(&params)?;
    let par = parallel_peak(&params)?;
    let ratio = seq.coefficient / par.coefficient;
    outcome(
        (ratio - std::f64::consts::SQRT_2).abs() <= 0.01
            && seq.sink_probability >= threshold
            && par.sink_probability >= threshold,
        format!(
            "ratio {ratio:.5} (sqrt2 +/- 0.01), sequential {:.5} @ {:.6}, PG_2 {:.5} @ {:.6} (>= {threshold:.6})",
            seq.coefficient, seq.sink_probability, par.coefficient, par.sink_probability
        ),
    )
}

fn sole_pg3_failure() -> Result<Outcome> {
    let report = sole_pg_failure_sweep(3, &sweep_ns(14, 24))?;
    let below = report.sweep.rows.iter().all(|r| r.value < 0.99);
    let stable: Vec<f64> = report
        .sweep
        .rows
        .iter()
        .filter(|r| [1u64 << 16, 1 << 20, 1 << 24].contains(&r.size))
        .map(|r| r.value)
        .collect();
    let spread = stable.iter().cloned().fold(f64::MIN, f64::max)
        - stable.iter().cloned().fold(f64::MAX, f64::min);
    outcome(
        below && stable.len() == 3 && spread <= 0.01,
        format!(
            "plateau {:.5}, max {:.5} (< 0.99), spread over 2^16/2^20/2^24 {spread:.2e} (<= 0.01)",
            report.plateau,
            report.sweep.max_value()
        ),
    )
}

fn k3_schedule() -> Result<Outcome> {
    let mut fitted_c = 0.0f64;
    let mut total = 0.0;
    let mut worst_const = 0.0f64;
    let reference = K3Constants::REFERENCE.as_array();
    for n in [18, 20, 22] {
        let params = ProblemParams::new(3, n)?;
        let s = k3_paper_schedule(&params, &K3Constants::REFERENCE)?;
        let p = s.final_state()?.sink_probability();
        fitted_c = fitted_c.max((1.0 - p) * params.sqrt_size());
        if n == 20 {
            total = s.total_coefficient();
        }
        let fit = optimize_k3_constants(&params)?;
        for (a, b) in fit.constants.as_array().iter().zip(reference) {
            worst_const = worst_const.max((a - b).abs());
        }
    }
    outcome(
        fitted_c <= 10.0 && (total - 1.51).abs() <= 0.02 && worst_const <= 0.02,
        format!(
            "fitted C {fitted_c:.3} (<= 10), total coefficient {total:.4} (1.51 +/- 0.02), re-optimized constants within {worst_const:.4} (<= 0.02)"
        ),
    )
}

fn mk_generalization() -> Result<Outcome> {
    let p3 = ProblemParams::new(3, 20)?;
    let comp = compose_blocks(
        &[
            pg2_schedule(&p3.with_k(2)?)?,
            sequential_grover_schedule(&p3.with_k(1)?),
        ],
        &p3,
    )?;
    let p = comp.final_state()?.sink_probability();
    let c = comp.total_coefficient();
    let nominal = (1.0 + std::f64::consts::SQRT_2) * FRAC_PI_4;
    let threshold = success_threshold(&p3);
    outcome(
        p >= threshold && (c - 1.8981).abs() <= 0.01,
        format!(
            "success {p:.6} (>= {threshold:.6}), coefficient {c:.4} (1.8981 +/- 0.01, nominal {nominal:.4})"
        ),
    )
}

fn lower_bound() -> Result<Outcome> {
    let params = ProblemParams::new(1, 20)?;
    let mut worst = 0.0f64;
    for k in 1..=6 {
        let (t, _) = ptilde_crossing_time(k, &params)?;
        let want = lower_bound_constant(k)?;
        worst = worst.max((t as f64 / params.sqrt_size() / want - 1.0).abs());
    }
    let ineq = (1..=64).all(lower_bound_inequality_holds);
    let rows = speedup_table(20)?;
    let mut exceeds = true;
    for r in rows.iter().filter(|r| r.success_probability.is_some()) {
        exceeds &= r.coefficient > lower_bound_constant(r.k)?;
    }
    outcome(
        worst <= 0.02 && ineq && exceeds,
        format!(
            "crossing relative error {:.3}% (<= 2%), k/(2e) inequality for k <= 64: {ineq}, methods above bound: {exceeds}",
            worst * 100.0
        ),
    )
}

fn approximation_theorems() -> Result<Outcome> {
    let ns = sweep_ns(10, 24);
    let mut detail = vec![];
    let mut pass = true;
    for k in [2, 3] {
        let s = approx_error_sweep(k, &ns)?;
        let c = s
            .rows
            .iter()
            .map(|r| r.value * (r.size as f64).sqrt())
            .fold(0.0, f64::max);
        pass &= c <= 10.0 && (s.slope + 0.5).abs() <= 0.1;
        detail.push(format!("approx k={k} C {c:.3} slope {:.3}", s.slope));
    }
    for (prefix, k) in [(0, 2), (0, 3), (1, 3)] {
        let (s, square) = cube_sweep(prefix, k, &ns)?;
        pass &= (s.slope + 1.0).abs() <= 0.15 && square <= 1.0 / (1u64 << ns[ns.len() - 1]) as f64;
        detail.push(format!(
            "cube k={k} prefix={prefix} slope {:.3} |C^2-I| {square:.1e}",
            s.slope
        ));
    }
    let mut ortho = 0.0f64;
    let mut involution = 0.0f64;
    for n in [4, 10, 20] {
        let iam = block_2x2(EdgeKind::Iam, 1 << n);
        for r in 0..2 {
            for c in 0..2 {
                let sq: f64 = (0..2).map(|j| iam[r][j] * iam[j][c]).sum();
                involution = involution.max((sq - if r == c { 1.0 } else { 0.0 }).abs());
            }
        }
        for k in 1..=4 {
            let params = ProblemParams::new(k, n)?;
            ortho = ortho.max(parallel_grover(&params)?.orthogonality_defect());
            for level in 1..=k {
                for op in [
                    reduced_oracle(level, &params)?,
                    reduced_iam_register(level, &params)?,
                    reduced_grover_register(level, &params)?,
                ] {
                    ortho = ortho.max(op.orthogonality_defect());
                }
                let iam = reduced_iam_register(level, &params)?;
                involution = involution.max(iam.compose(&iam)?.orthogonality_defect());
            }
        }
    }
    pass &= ortho <= 1e-12 && involution <= 1e-12;
    detail.push(format!(
        "orthogonality {ortho:.1e} involution {involution:.1e} (<= 1e-12)"
    ));
    outcome(pass, detail.join("; "))
}

fn perturbation() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = vec![];
    for dim in [2, 4, 8] {
        let s = perturbation_power_check(&sweep_ns(10, 24), dim, 1.0, 42)?;
        pass &= (s.slope + 0.5).abs() <= 0.1;
        detail.push(format!("dim {dim} slope {:.3}", s.slope));
    }
    outcome(pass, format!("{} (-0.5 +/- 0.1)", detail.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle-equivalence", oracle_equivalence),
        ("pg2-closed-form", pg2_closed_form),
        ("sqrt2-speedup", sqrt2_speedup),
        ("sole-pg3-failure", sole_pg3_failure),
        ("k3-schedule", k3_schedule),
        ("mk-generalization", mk_generalization),
        ("lower-bound", lower_bound),
        ("approximation-theorems", approximation_theorems),
        ("perturbation-lemma", perturbation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
