use std::f64::consts::FRAC_PI_4;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use isp_core::analysis::{
    approx_error_sweep, closed_form_sweep, cube_sweep, lower_bound_constant,
    lower_bound_inequality_holds, perturbation_power_check, ptilde_crossing_time,
    sole_pg_failure_sweep, speedup_csv, speedup_ratio, speedup_table, SweepResult,
};
use isp_core::closed_form::pg2_full_transfer;
use isp_core::graph::{approximate_graph, build_pg_graph, emit_dot};
use isp_core::numfmt::sig12;
use isp_core::reduced::{initial_state, reflection, InitMode};
use isp_core::schedule::{
    compose_blocks, k3_paper_schedule, optimize_k3_constants, pg2_schedule, run_schedule,
    sequential_grover_schedule, OpSpec, Phase, Repetitions,
};
use isp_core::statevector::{
    parallel_form_deviation, random_equivalence_cases, ParallelForm, Solution,
};
use isp_core::{BasisLabel, IspError, K3Constants, ProblemParams, Schedule};

/// Directory used for outputs when `--out` is absent.
const OUT_DIR_ENV: &str = "ISP_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "isp",
    version,
    about = "Parallel and sequential Grover simulation for the iterated search problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Size {
    /// Number of levels (registers).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Qubits per register; N = 2^n.
    #[arg(long)]
    n: Option<u32>,
    /// Search-space size per register (power of two).
    #[arg(long = "size", value_name = "N")]
    size: Option<u64>,
}

impl Size {
    fn params(&self, default_n: u32) -> Result<ProblemParams, CliError> {
        match (self.n, self.size) {
            (Some(n), Some(size)) => {
                let p = ProblemParams::new(self.k, n)?;
                if p.size() != size {
                    return Err(CliError::Usage(format!("--size {size} is not 2^{n}")));
                }
                Ok(p)
            }
            (None, Some(size)) => Ok(ProblemParams::from_size(self.k, size)?),
            (Some(n), None) => Ok(ProblemParams::new(self.k, n)?),
            (None, None) => Ok(ProblemParams::new(self.k, default_n)?),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Output file; defaults to $ISP_OUTPUT_DIR/<name> or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct ConstantOverrides {
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    c3: Option<f64>,
    #[arg(long)]
    c4: Option<f64>,
    #[arg(long)]
    c5: Option<f64>,
}

impl ConstantOverrides {
    fn apply(&self, mut c: K3Constants) -> K3Constants {
        for (slot, v) in [
            (&mut c.c1, self.c1),
            (&mut c.c2, self.c2),
            (&mut c.c3, self.c3),
            (&mut c.c4, self.c4),
            (&mut c.c5, self.c5),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        c
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Init {
    Exact,
    Idealized,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Metric {
    LowerBound,
    Speedup,
    ApproxError,
    SolePg,
    Perturbation,
    OptimizeK3,
    ClosedForm,
    Cube,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a schedule and write its trajectory.
    Simulate {
        #[command(flatten)]
        size: Size,
        /// sequential | pg | pg2 | pg3-sole | k3-paper | k3-optimized | pg2-composition
        #[arg(long, default_value = "sequential")]
        schedule: String,
        /// Schedule JSON file ({k, N, phases}); overrides --schedule.
        #[arg(long)]
        schedule_file: Option<PathBuf>,
        /// Coefficient of sqrt(N) for single-operator schedules.
        #[arg(long, conflicts_with = "reps")]
        coeff: Option<f64>,
        /// Absolute iteration count for single-operator schedules.
        #[arg(long)]
        reps: Option<u64>,
        #[command(flatten)]
        constants: ConstantOverrides,
        #[arg(long, value_enum, default_value_t = Init::Exact)]
        init: Init,
        /// Sample every this many iterations.
        #[arg(long, default_value_t = 1)]
        stride: u64,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the reduced simulator with the full statevector.
    Verify {
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long, default_value_t = 5)]
        max_n: u32,
        /// Random stage sequences per (k, n).
        #[arg(long, default_value_t = 50)]
        sequences: usize,
        /// Maximum sequence length.
        #[arg(long, default_value_t = 200)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Report each controlled-NOT reading of the parallel PG_2 circuit.
        #[arg(long)]
        parallel_form: bool,
        /// Negative control: flip the sink sign in every reduced operator.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Emit the operator graph of one PG_k iteration.
    Graph {
        #[command(flatten)]
        size: Size,
        /// Emit the approximated graph.
        #[arg(long)]
        approx: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        #[command(flatten)]
        output: Output,
    },
    /// Run one of the analysis studies.
    Analyze {
        #[arg(value_enum)]
        metric: Metric,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<u32>,
        /// Smallest n of a sweep.
        #[arg(long, default_value_t = 10)]
        n_min: u32,
        /// Largest n of a sweep.
        #[arg(long, default_value_t = 24)]
        n_max: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Matrix dimension for the perturbation study.
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

impl From<IspError> for CliError {
    fn from(e: IspError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate {
            size,
            schedule,
            schedule_file,
            coeff,
            reps,
            constants,
            init,
            stride,
            format,
            output,
        } => {
            let sched = match schedule_file {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    Schedule::from_json(&text)?
                }
                None => named_schedule(&schedule, &size.params(20)?, coeff, reps, &constants)?,
            };
            let mode = match init {
                Init::Exact => InitMode::Exact,
                Init::Idealized => InitMode::Idealized,
            };
            let start = initial_state(sched.params(), mode);
            let traj = run_schedule(&sched, &start, stride)?;
            let text = match format {
                DataFormat::Csv => traj.to_csv(),
                DataFormat::Json => {
                    let samples: Vec<Value> = traj
                        .samples
                        .iter()
                        .map(|s| {
                            serde_json::json!({
                                "iteration": s.iteration,
                                "amplitudes": s.state.amplitudes().as_slice(),
                                "sink_probability": s.state.sink_probability(),
                            })
                        })
                        .collect();
                    let schedule: Value = serde_json::to_value(&sched).map_err(IspError::from)?;
                    json_text(serde_json::json!({ "schedule": schedule, "samples": samples }))
                }
            };
            emit(&output, "trajectory", format_ext(format), &text)?;
            eprintln!(
                "iterations {} coefficient {} final sink probability {}",
                sched.total_iterations(),
                sig12(sched.total_coefficient()),
                sig12(traj.final_sink_probability())
            );
            Ok(())
        }
        Command::Verify {
            max_k,
            max_n,
            sequences,
            length,
            seed,
            parallel_form,
            corrupt,
        } => verify(
            max_k,
            max_n,
            sequences,
            length,
            seed,
            parallel_form,
            corrupt,
        ),
        Command::Graph {
            size,
            approx,
            format,
            output,
        } => {
            if size.k == 0 || size.k > 8 {
                return Err(CliError::Usage(format!(
                    "k must be in 1..=8, got {}",
                    size.k
                )));
            }
            let params = size.params(10)?;
            let mut g = build_pg_graph(&params);
            if approx {
                g = approximate_graph(&g)?;
            }
            let (text, ext) = match format {
                GraphFormat::Dot => (emit_dot(&g), "dot"),
                GraphFormat::Json => (g.to_json()?, "json"),
            };
            emit(&output, "graph", ext, &text)
        }
        Command::Analyze {
            metric,
            k,
            n,
            n_min,
            n_max,
            seed,
            dim,
            format,
            output,
        } => analyze(metric, k, n, n_min, n_max, seed, dim, format, &output),
    }
}

fn named_schedule(
    name: &str,
    params: &ProblemParams,
    coeff: Option<f64>,
    reps: Option<u64>,
    overrides: &ConstantOverrides,
) -> Result<Schedule, CliError> {
    let single = |default: f64| -> Result<Schedule, CliError> {
        let r = match reps {
            Some(r) => Repetitions::Reps(r),
            None => Repetitions::Coefficient(coeff.unwrap_or(default)),
        };
        Ok(Schedule::new(
            *params,
            vec![Phase {
                op: OpSpec::Parallel,
                reps: r,
                adjoint: false,
            }],
        )?)
    };
    let need_k = |k: usize| -> Result<(), CliError> {
        if params.k() != k {
            return Err(CliError::Usage(format!(
                "schedule {name} needs --k {k}, got {}",
                params.k()
            )));
        }
        Ok(())
    };
    match name {
        "sequential" => Ok(sequential_grover_schedule(params)),
        "pg" | "pg-sole" => single(3.0 * FRAC_PI_4),
        "pg2" => {
            need_k(2)?;
            single(pg2_full_transfer())
        }
        "pg3-sole" => {
            need_k(3)?;
            single(3.0 * FRAC_PI_4)
        }
        "k3-paper" => {
            need_k(3)?;
            Ok(k3_paper_schedule(
                params,
                &overrides.apply(K3Constants::REFERENCE),
            )?)
        }
        "k3-optimized" => {
            need_k(3)?;
            let fit = optimize_k3_constants(params)?;
            Ok(k3_paper_schedule(params, &overrides.apply(fit.constants))?)
        }
        "pg2-composition" => {
            need_k(3)?;
            let p1 = params.with_k(1)?;
            let p2 = params.with_k(2)?;
            Ok(compose_blocks(
                &[pg2_schedule(&p2)?, sequential_grover_schedule(&p1)],
                params,
            )?)
        }
        other => Err(CliError::Usage(format!("unknown schedule {other:?}"))),
    }
}

fn verify(
    max_k: usize,
    max_n: u32,
    sequences: usize,
    length: usize,
    seed: u64,
    show_forms: bool,
    corrupt: bool,
) -> Result<(), CliError> {
    const TOL: f64 = 1e-10;
    if max_k == 0 || max_k > 3 || max_n == 0 || max_n > 5 {
        return Err(CliError::Usage(
            "verify supports 1 <= k <= 3 and 1 <= n <= 5".into(),
        ));
    }
    let mut worst = (0.0f64, 0.0f64);
    let mut failures = vec![];
    for k in 1..=max_k {
        for n in 1..=max_n {
            let params = ProblemParams::new(k, n)?;
            let sink = reflection(&[BasisLabel::sink(k)], &params)?;
            let cases = random_equivalence_cases(&params, sequences, length, seed, |st| {
                let op = st.reduced(&params)?;
                if corrupt {
                    sink.compose(&op)
                } else {
                    Ok(op)
                }
            })?;
            for c in cases {
                worst.0 = worst.0.max(c.deviation);
                worst.1 = worst.1.max(c.residual);
                if c.deviation > TOL || c.residual > TOL {
                    failures.push(format!(
                        "FAIL reduced-vs-full k={} n={} sequence={} length={} deviation={} residual={}",
                        c.k,
                        c.n,
                        c.sequence,
                        c.length,
                        sig12(c.deviation),
                        sig12(c.residual)
                    ));
                }
            }
        }
    }
    println!("reduced-vs-full max deviation {}", sig12(worst.0));
    println!("reduced-vs-full max residual {}", sig12(worst.1));

    let mut form_dev = vec![];
    for form in ParallelForm::ALL {
        let mut dev = 0.0f64;
        for n in 1..=max_n.min(4) {
            dev = dev.max(parallel_form_deviation(n, &Solution::zeros(2), form)?);
        }
        form_dev.push((form, dev));
    }
    let cu = form_dev
        .iter()
        .find(|(f, _)| *f == ParallelForm::ComputeUncompute)
        .map(|x| x.1)
        .unwrap_or(f64::INFINITY);
    println!("parallel-vs-sequential PG_2 max deviation {}", sig12(cu));
    if show_forms {
        for (form, dev) in &form_dev {
            let verdict = if *dev <= TOL { "reproduces" } else { "differs" };
            println!(
                "parallel-form {} deviation {} {verdict}",
                form.name(),
                sig12(*dev)
            );
        }
    }
    if cu > TOL {
        failures.push(format!(
            "FAIL parallel-form compute-uncompute deviation={}",
            sig12(cu)
        ));
    }
    if failures.is_empty() {
        println!("PASS");
        Ok(())
    } else {
        for f in &failures {
            println!("{f}");
        }
        Err(CliError::Failed(format!(
            "{} verification case(s) failed",
            failures.len()
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    metric: Metric,
    k: Option<usize>,
    n: Option<u32>,
    n_min: u32,
    n_max: u32,
    seed: u64,
    dim: usize,
    format: DataFormat,
    output: &Output,
) -> Result<(), CliError> {
    if n_min == 0 || n_max < n_min {
        return Err(CliError::Usage(format!(
            "invalid sweep range {n_min}..={n_max}"
        )));
    }
    let ns: Vec<u32> = (n_min..=n_max).step_by(2).collect();
    let sweep_text = |s: &SweepResult| -> Result<String, CliError> {
        Ok(match format {
            DataFormat::Csv => s.to_csv(),
            DataFormat::Json => json_text(serde_json::to_value(s).map_err(IspError::from)?),
        })
    };
    let ext = format_ext(format);
    match metric {
        Metric::LowerBound => {
            let k = k.unwrap_or(3);
            let params = ProblemParams::new(k, n.unwrap_or(20))?;
            let c = lower_bound_constant(k)?;
            let (t, gap) = ptilde_crossing_time(k, &params)?;
            let rows = [
                ("k", k.to_string()),
                ("N", params.size().to_string()),
                ("lower_bound_constant", sig12(c)),
                ("crossing_time", t.to_string()),
                ("crossing_coefficient", sig12(t as f64 / params.sqrt_size())),
                ("binomial_gap", sig12(gap)),
                (
                    "inequality_holds",
                    lower_bound_inequality_holds(k).to_string(),
                ),
            ];
            let text = match format {
                DataFormat::Csv => {
                    let mut s = String::from("quantity,value\n");
                    for (q, v) in rows {
                        let _ = writeln!(s, "{q},{v}");
                    }
                    s
                }
                DataFormat::Json => json_text(serde_json::json!({
                    "k": k,
                    "N": params.size(),
                    "lower_bound_constant": c,
                    "crossing_time": t,
                    "crossing_coefficient": t as f64 / params.sqrt_size(),
                    "binomial_gap": gap,
                    "inequality_holds": lower_bound_inequality_holds(k),
                })),
            };
            emit(output, "lower-bound", ext, &text)
        }
        Metric::Speedup => {
            let n = n.unwrap_or(20);
            let rows = speedup_table(n)?;
            let ratio = speedup_ratio(&rows).unwrap_or(f64::NAN);
            let text = match format {
                DataFormat::Csv => {
                    let mut s = speedup_csv(&rows);
                    let _ = writeln!(s, "sqrt2-ratio,2,{},", sig12(ratio));
                    s
                }
                DataFormat::Json => json_text(serde_json::json!({
                    "N": 1u64 << n,
                    "rows": serde_json::to_value(&rows).map_err(IspError::from)?,
                    "sqrt2_ratio": ratio,
                })),
            };
            emit(output, "speedup", ext, &text)
        }
        Metric::ApproxError => {
            let s = approx_error_sweep(k.unwrap_or(3), &ns)?;
            eprintln!("slope {}", sig12(s.slope));
            emit(output, "approx-error", ext, &sweep_text(&s)?)
        }
        Metric::SolePg => {
            let report = sole_pg_failure_sweep(k.unwrap_or(3), &ns)?;
            eprintln!(
                "plateau {} spread {} bounded away from 1: {}",
                sig12(report.plateau),
                sig12(report.spread),
                report.bounded_away
            );
            emit(output, "sole-pg", ext, &sweep_text(&report.sweep)?)
        }
        Metric::Perturbation => {
            let s = perturbation_power_check(&ns, dim, 1.0, seed)?;
            eprintln!("slope {} seed {seed}", sig12(s.slope));
            emit(output, "perturbation", ext, &sweep_text(&s)?)
        }
        Metric::ClosedForm => {
            let s = closed_form_sweep(&ns, &[0.3, 0.7, pg2_full_transfer()])?;
            eprintln!("slope {}", sig12(s.slope));
            emit(output, "closed-form", ext, &sweep_text(&s)?)
        }
        Metric::Cube => {
            let k = k.unwrap_or(3);
            let (s, square) = cube_sweep(0, k, &ns)?;
            eprintln!("slope {} max |C^2 - I| {}", sig12(s.slope), sig12(square));
            emit(output, "cube", ext, &sweep_text(&s)?)
        }
        Metric::OptimizeK3 => {
            let params = ProblemParams::new(3, n.unwrap_or(20))?;
            let fit = optimize_k3_constants(&params)?;
            let text = match format {
                DataFormat::Csv => {
                    let mut s = String::from("quantity,value\n");
                    let c = fit.constants;
                    for (q, v) in [
                        ("c1", c.c1),
                        ("c2", c.c2),
                        ("c3", c.c3),
                        ("c4", c.c4),
                        ("c5", c.c5),
                        ("total_coefficient", fit.total_coefficient),
                        ("sink_probability", fit.sink_probability),
                        ("a1", fit.a.a1),
                        ("a2", fit.a.a2),
                        ("a3", fit.a.a3),
                        ("a1_prime", fit.a.a1p),
                        ("a2_prime", fit.a.a2p),
                    ] {
                        let _ = writeln!(s, "{q},{}", sig12(v));
                    }
                    let _ = writeln!(s, "adjoint_branch,{}", fit.adjoint_branch);
                    s
                }
                DataFormat::Json => json_text(serde_json::to_value(&fit).map_err(IspError::from)?),
            };
            emit(output, "optimize-k3", ext, &text)
        }
    }
}

fn format_ext(f: DataFormat) -> &'static str {
    match f {
        DataFormat::Csv => "csv",
        DataFormat::Json => "json",
    }
}

/// Rounds every float to 12 significant digits before printing.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().unwrap_or(f64::NAN);
            sig12(x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(Value::Number)
                .unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_floats(v)).unwrap_or_default();
    s.push('\n');
    s
}

fn emit(output: &Output, name: &str, ext: &str, text: &str) -> Result<(), CliError> {
    let path = match (&output.out, std::env::var_os(OUT_DIR_ENV)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(format!("{name}.{ext}"))),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::Failed(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&p, text)
                .map_err(|e| CliError::Failed(format!("{}: {e}", p.display())))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}
