//! Sweeps over `N`, log-log slope fits, the iteration lower bound and the
//! comparison table of the different circuits.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::{pg2_amplitudes, pg2_full_transfer};
use crate::error::{IspError, Result};
use crate::graph::{
    approximate_graph, build_pg_graph, cube_reflection, cubic_iam_operator, graph_to_operator,
};
use crate::label::ProblemParams;
use crate::numfmt::sig12;
use crate::reduced::{initial_state, parallel_grover, InitMode};
use crate::schedule::{
    compose_blocks, k3_paper_schedule, parallel_peak, pg2_schedule, sequential_grover_schedule,
    sequential_peak, K3Constants,
};

/// Measured plateau of the sink probability under pure `PG_3` iteration.
pub const SOLE_PG3_PLATEAU: f64 = 0.6141;

/// `(k!)^{1/k} / 2`.
pub fn lower_bound_constant(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(IspError::ZeroLevels);
    }
    let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
    Ok((ln_fact / k as f64).exp() / 2.0)
}

/// Exact check of `(k!)^{1/k}/2 >= k/(2e)`, i.e. `k! e^k >= k^k`, using the
/// rational lower bound `e > 2.718281828`.
pub fn lower_bound_inequality_holds(k: usize) -> bool {
    if k == 0 {
        return false;
    }
    let fact: BigUint = (1..=k as u64).map(BigUint::from).product();
    let e_num = BigUint::from(2_718_281_828u64).pow(k as u32);
    let lhs = fact * e_num;
    let rhs = BigUint::from(k as u64).pow(k as u32) * BigUint::from(10u64).pow(9 * k as u32);
    lhs >= rhs
}

/// Upper bidiagonal `(k+1) x (k+1)` matrix with unit diagonal and `2/sqrt N`
/// on the superdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundModel {
    pub k: usize,
    pub size: u64,
    pub matrix: DMatrix<f64>,
}

impl LowerBoundModel {
    pub fn new(k: usize, params: &ProblemParams) -> Result<Self> {
        if k == 0 {
            return Err(IspError::ZeroLevels);
        }
        let eps = 2.0 / params.sqrt_size();
        let matrix = DMatrix::from_fn(k + 1, k + 1, |r, c| {
            if r == c {
                1.0
            } else if c == r + 1 {
                eps
            } else {
                0.0
            }
        });
        Ok(Self {
            k,
            size: params.size(),
            matrix,
        })
    }

    /// First components of `P^t u_{k+1}` for `t = 0, 1, ...` until it reaches 1.
    pub fn crossing(&self, cap: u64) -> Result<(u64, Vec<f64>)> {
        let mut v = DVector::zeros(self.k + 1);
        v[self.k] = 1.0;
        let mut firsts = vec![v[0]];
        for t in 1..=cap {
            v = &self.matrix * v;
            firsts.push(v[0]);
            if v[0] >= 1.0 {
                return Ok((t, firsts));
            }
        }
        Err(IspError::SearchFailure(format!(
            "first component stays below 1 for {cap} steps"
        )))
    }
}

/// `C(t, k) (2/sqrt N)^k`.
pub fn ptilde_closed_form(k: usize, size: u64, t: u64) -> f64 {
    let eps = 2.0 / (size as f64).sqrt();
    (0..k as u64)
        .map(|j| (t.saturating_sub(j)) as f64 / (j + 1) as f64 * eps)
        .product()
}

/// Smallest `t` with `(P^t u_{k+1})_1 >= 1`, and the largest relative gap
/// between the iterated and binomial first components along the way.
pub fn ptilde_crossing_time(k: usize, params: &ProblemParams) -> Result<(u64, f64)> {
    let model = LowerBoundModel::new(k, params)?;
    let (t, firsts) = model.crossing(params.iterations(4.0 * k as f64).max(64))?;
    let gap = firsts
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let want = ptilde_closed_form(k, params.size(), i as u64);
            if want == 0.0 {
                f.abs()
            } else {
                (f - want).abs() / want
            }
        })
        .fold(0.0, f64::max);
    Ok((t, gap))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub metric: String,
    #[serde(rename = "N")]
    pub size: u64,
    pub value: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metric: String,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln value` against `ln N`.
    pub slope: f64,
    pub slope_stderr: f64,
}

/// Least-squares slope and its standard error for `ln y` against `ln x`.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(IspError::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(IspError::TooFewPoints {
            min: 3,
            got: xs.len(),
        });
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

impl SweepResult {
    /// Fits the rows; needs at least 4 points spanning at least 4 octaves.
    pub fn fit(metric: &str, rows: Vec<SweepRow>) -> Result<Self> {
        if rows.len() < 4 {
            return Err(IspError::TooFewPoints {
                min: 4,
                got: rows.len(),
            });
        }
        let lo = rows.iter().map(|r| r.size).min().unwrap_or(0);
        let hi = rows.iter().map(|r| r.size).max().unwrap_or(0);
        if hi < lo.saturating_mul(16) {
            return Err(IspError::OutOfRange {
                value: hi as f64 / lo as f64,
                range: "N range of at least 4 octaves",
            });
        }
        let xs: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.value).collect();
        let (slope, slope_stderr) = loglog_fit(&xs, &ys)?;
        Ok(Self {
            metric: metric.to_string(),
            rows,
            slope,
            slope_stderr,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,N,value,seed\n");
        for r in &self.rows {
            let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.metric,
                r.size,
                sig12(r.value),
                seed
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn max_value(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.value)
            .fold(f64::INFINITY, f64::min)
    }
}

fn row(metric: &str, params: &ProblemParams, value: f64, seed: Option<u64>) -> SweepRow {
    SweepRow {
        metric: metric.to_string(),
        size: params.size(),
        value,
        seed,
    }
}

fn params_list(k: usize, ns: &[u32]) -> Result<Vec<ProblemParams>> {
    ns.iter().map(|&n| ProblemParams::new(k, n)).collect()
}

/// Largest sink probability over `t <= round(3 t_G(N))` of pure `PG_k`.
pub fn sole_pg_max_sink(params: &ProblemParams) -> Result<f64> {
    let pg = parallel_grover(params)?;
    let mut s = initial_state(params, InitMode::Exact);
    let steps = params.iterations(3.0 * std::f64::consts::FRAC_PI_4);
    let mut best = s.sink_probability();
    for _ in 0..steps {
        s = pg.apply(&s)?;
        best = best.max(s.sink_probability());
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlateauReport {
    pub sweep: SweepResult,
    /// Value at the largest `N`.
    pub plateau: f64,
    /// `max - min` over the sweep.
    pub spread: f64,
    /// `plateau + 3 spread < 1`.
    pub bounded_away: bool,
}

/// Maximum sink probability of pure `PG_k` iteration for each `n` in `ns`.
pub fn sole_pg_failure_sweep(k: usize, ns: &[u32]) -> Result<PlateauReport> {
    let metric = format!("sole-pg{k}-max-sink");
    let rows = params_list(k, ns)?
        .iter()
        .map(|p| Ok(row(&metric, p, sole_pg_max_sink(p)?, None)))
        .collect::<Result<Vec<_>>>()?;
    let sweep = SweepResult::fit(&metric, rows)?;
    let plateau = sweep
        .rows
        .iter()
        .max_by_key(|r| r.size)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    let spread = sweep.max_value() - sweep.min_value();
    Ok(PlateauReport {
        plateau,
        spread,
        bounded_away: plateau + 3.0 * spread < 1.0,
        sweep,
    })
}

/// Random orthogonal matrix from Gram-Schmidt on uniform entries.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        let mut ok = true;
        for j in 0..dim {
            let mut v = m.column(j).clone_owned();
            for i in 0..j {
                let qi = q.column(i).clone_owned();
                v -= &qi * qi.dot(&v);
            }
            let norm = v.norm();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            q.set_column(j, &(v / norm));
        }
        if ok {
            return q;
        }
    }
}

fn matrix_power(m: &DMatrix<f64>, mut t: u64) -> DMatrix<f64> {
    let mut result = DMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    while t > 0 {
        if t & 1 == 1 {
            result = &result * &base;
        }
        t >>= 1;
        if t > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `max |(A + M/N)^t - A^t|` with `t = round(c sqrt N)`.
pub fn perturbation_error(
    a: &DMatrix<f64>,
    m: &DMatrix<f64>,
    params: &ProblemParams,
    c: f64,
) -> f64 {
    let t = params.iterations(c);
    let perturbed = a + m / params.size_f64();
    (matrix_power(&perturbed, t) - matrix_power(a, t)).amax()
}

/// [`perturbation_error`] across `N` for a seeded random orthogonal `A` of
/// size `dim` and a fixed `M` with entries uniform in `[-1, 1]`.
pub fn perturbation_power_check(ns: &[u32], dim: usize, c: f64, seed: u64) -> Result<SweepResult> {
    if dim == 0 || dim > 8 {
        return Err(IspError::OutOfRange {
            value: dim as f64,
            range: "1..=8",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_orthogonal(dim, &mut rng);
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..=1.0));
    let rows = params_list(1, ns)?
        .iter()
        .map(|p| {
            row(
                "perturbation",
                p,
                perturbation_error(&a, &m, p, c),
                Some(seed),
            )
        })
        .collect();
    SweepResult::fit("perturbation", rows)
}

/// Largest Euclidean distance between the simulated `PG_2` trajectory from
/// the exact initial state and the closed form, over the coefficients `cs`.
pub fn closed_form_error(params: &ProblemParams, cs: &[f64]) -> Result<f64> {
    let pg = parallel_grover(&params.with_k(2)?)?;
    let start = initial_state(&params.with_k(2)?, InitMode::Exact);
    let mut worst = 0.0f64;
    for &c in cs {
        let s = pg.power(params.iterations(c)).apply(&start)?;
        let (a, b, d) = pg2_amplitudes(c);
        let want = DVector::from_vec(vec![a, b, 0.0, d]);
        worst = worst.max((s.amplitudes() - want).norm());
    }
    Ok(worst)
}

pub fn closed_form_sweep(ns: &[u32], cs: &[f64]) -> Result<SweepResult> {
    let rows = params_list(2, ns)?
        .iter()
        .map(|p| Ok(row("closed-form", p, closed_form_error(p, cs)?, None)))
        .collect::<Result<Vec<_>>>()?;
    SweepResult::fit("closed-form", rows)
}

/// Largest distance between exact `PG_k` and its approximated graph over
/// `t <= 3 t_G(N)`, both started on the source.
pub fn approx_error(params: &ProblemParams) -> Result<f64> {
    let exact = parallel_grover(params)?;
    let approx = graph_to_operator(&approximate_graph(&build_pg_graph(params))?, params)?;
    let mut a = initial_state(params, InitMode::Idealized);
    let mut b = a.clone();
    let mut worst = 0.0f64;
    for _ in 0..params.iterations(3.0 * std::f64::consts::FRAC_PI_4) {
        a = exact.apply(&a)?;
        b = approx.apply(&b)?;
        worst = worst.max(a.distance(&b));
    }
    Ok(worst)
}

pub fn approx_error_sweep(k: usize, ns: &[u32]) -> Result<SweepResult> {
    let metric = format!("approx-error-k{k}");
    let rows = params_list(k, ns)?
        .iter()
        .map(|p| Ok(row(&metric, p, approx_error(p)?, None)))
        .collect::<Result<Vec<_>>>()?;
    SweepResult::fit(&metric, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeCheck {
    /// `max |C^2 - I|`.
    pub square_defect: f64,
    /// `max_{|v| = 1/sqrt N} |(C - R) v|`, `R` the reflection composition.
    pub reflection_error: f64,
}

pub fn cube_check(prefix_len: usize, params: &ProblemParams) -> Result<CubeCheck> {
    let c = cubic_iam_operator(prefix_len, params)?;
    let r = cube_reflection(prefix_len, params)?;
    let sq = c.compose(&c)?;
    let id = DMatrix::<f64>::identity(params.dim(), params.dim());
    let diff = c.matrix() - r.matrix();
    let spectral = diff.singular_values().max();
    Ok(CubeCheck {
        square_defect: (sq.matrix() - id).amax(),
        reflection_error: spectral / params.sqrt_size(),
    })
}

/// Reflection error of the cube with prefix `t_i N_{i+1}` across `N`.
pub fn cube_sweep(prefix_len: usize, k: usize, ns: &[u32]) -> Result<(SweepResult, f64)> {
    let metric = format!("cube-reflection-k{k}-p{prefix_len}");
    let mut square = 0.0f64;
    let mut rows = vec![];
    for p in params_list(k, ns)? {
        let check = cube_check(prefix_len, &p)?;
        square = square.max(check.square_defect);
        rows.push(row(&metric, &p, check.reflection_error, None));
    }
    Ok((SweepResult::fit(&metric, rows)?, square))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub method: String,
    pub k: usize,
    pub coefficient: f64,
    /// `None` for the analytic bound.
    pub success_probability: Option<f64>,
}

fn final_sink(s: &crate::schedule::Schedule) -> Result<f64> {
    Ok(s.final_state()?.sink_probability())
}

/// Coefficients of `sqrt N` for every method at `N = 2^n`.
pub fn speedup_table(n: u32) -> Result<Vec<SpeedupRow>> {
    let p1 = ProblemParams::new(1, n)?;
    let p2 = ProblemParams::new(2, n)?;
    let p3 = ProblemParams::new(3, n)?;
    let mut rows = vec![];
    let mut push = |method: &str, k: usize, coefficient: f64, p: Option<f64>| {
        rows.push(SpeedupRow {
            method: method.to_string(),
            k,
            coefficient,
            success_probability: p,
        })
    };

    let g1 = sequential_peak(&p1)?;
    push("sequential", 1, g1.coefficient, Some(g1.sink_probability));
    push("lower-bound", 1, lower_bound_constant(1)?, None);

    let seq2 = sequential_peak(&p2)?;
    let par2 = parallel_peak(&p2)?;
    push(
        "sequential",
        2,
        seq2.coefficient,
        Some(seq2.sink_probability),
    );
    push("pg2", 2, par2.coefficient, Some(par2.sink_probability));
    push("lower-bound", 2, lower_bound_constant(2)?, None);

    let seq3 = sequential_grover_schedule(&p3);
    push(
        "sequential",
        3,
        seq3.total_coefficient(),
        Some(final_sink(&seq3)?),
    );
    let comp = compose_blocks(&[pg2_schedule(&p2)?, sequential_grover_schedule(&p1)], &p3)?;
    push(
        "pg2-composition",
        3,
        comp.total_coefficient(),
        Some(final_sink(&comp)?),
    );
    let k3 = k3_paper_schedule(&p3, &K3Constants::REFERENCE)?;
    push(
        "k3-schedule",
        3,
        k3.total_coefficient(),
        Some(final_sink(&k3)?),
    );
    push(
        "sole-pg3",
        3,
        3.0 * std::f64::consts::FRAC_PI_4,
        Some(sole_pg_max_sink(&p3)?),
    );
    push("lower-bound", 3, lower_bound_constant(3)?, None);
    Ok(rows)
}

/// Ratio of the sequential and parallel `k = 2` coefficients.
pub fn speedup_ratio(rows: &[SpeedupRow]) -> Option<f64> {
    let find = |m: &str| {
        rows.iter()
            .find(|r| r.k == 2 && r.method == m)
            .map(|r| r.coefficient)
    };
    Some(find("sequential")? / find("pg2")?)
}

pub fn speedup_csv(rows: &[SpeedupRow]) -> String {
    let mut out = String::from("method,k,coefficient,success_probability\n");
    for r in rows {
        let p = r.success_probability.map(sig12).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.method,
            r.k,
            sig12(r.coefficient),
            p
        ));
    }
    out
}

/// Nominal `(1 + sqrt 2) pi / 4`.
pub fn composition_coefficient() -> f64 {
    pg2_full_transfer() + std::f64::consts::FRAC_PI_4
}
