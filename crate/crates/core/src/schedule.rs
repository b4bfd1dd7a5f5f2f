//! Schedules: ordered phases of repeated reduced operators.
//!
//! A phase repeats one operator either a fixed number of times or
//! `round(c sqrt N)` times. Operators are named `pg` (all levels in one
//! iteration) or by a `+`-joined list of levels such as `g2+g3`, which is
//! `G_2 G_3` with `G_3` acting first. Every application counts as one
//! iteration, whatever the number of levels involved.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closed_form::pg2_full_transfer;
use crate::error::{IspError, Result};
use crate::label::{enumerate_labels, ProblemParams};
use crate::numfmt::sig12;
use crate::reduced::{
    grover_levels_product, initial_state, parallel_grover, InitMode, ReducedOperator, ReducedState,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpSpec {
    /// `PG_k` over every level of the problem.
    Parallel,
    /// `G_{l_1} ... G_{l_m}`, the last level acting first.
    Levels(Vec<usize>),
}

impl OpSpec {
    pub fn level(level: usize) -> Self {
        OpSpec::Levels(vec![level])
    }

    pub fn levels(&self, k: usize) -> Vec<usize> {
        match self {
            OpSpec::Parallel => (1..=k).collect(),
            OpSpec::Levels(l) => l.clone(),
        }
    }

    pub fn operator(&self, params: &ProblemParams) -> Result<ReducedOperator> {
        match self {
            OpSpec::Parallel => parallel_grover(params),
            OpSpec::Levels(l) => grover_levels_product(l, params),
        }
    }

    fn shifted(&self, k: usize, offset: usize) -> OpSpec {
        OpSpec::Levels(self.levels(k).into_iter().map(|l| l + offset).collect())
    }

    fn check(&self, k: usize) -> Result<()> {
        if let OpSpec::Levels(levels) = self {
            if levels.is_empty() {
                return Err(IspError::UnknownOperator(String::new()));
            }
            for &level in levels {
                if level == 0 || level > k {
                    return Err(IspError::LevelOutOfRange { level, k });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for OpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpSpec::Parallel => f.write_str("pg"),
            OpSpec::Levels(levels) => {
                let names: Vec<String> = levels.iter().map(|l| format!("g{l}")).collect();
                f.write_str(&names.join("+"))
            }
        }
    }
}

impl FromStr for OpSpec {
    type Err = IspError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("pg") {
            return Ok(OpSpec::Parallel);
        }
        s.split('+')
            .map(|part| {
                part.trim()
                    .strip_prefix('g')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|l| *l >= 1)
                    .ok_or_else(|| IspError::UnknownOperator(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(OpSpec::Levels)
    }
}

impl Serialize for OpSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OpSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Repetitions {
    /// Applied `round(c sqrt N)` times.
    #[serde(rename = "coeff")]
    Coefficient(f64),
    #[serde(rename = "reps")]
    Reps(u64),
}

impl Repetitions {
    pub fn count(&self, params: &ProblemParams) -> u64 {
        match *self {
            Repetitions::Coefficient(c) => params.iterations(c),
            Repetitions::Reps(r) => r,
        }
    }

    /// Coefficient of `sqrt N` before rounding.
    pub fn nominal(&self, params: &ProblemParams) -> f64 {
        match *self {
            Repetitions::Coefficient(c) => c,
            Repetitions::Reps(r) => r as f64 / params.sqrt_size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub op: OpSpec,
    #[serde(flatten)]
    pub reps: Repetitions,
    /// Apply the transpose instead.
    #[serde(default)]
    pub adjoint: bool,
}

impl Phase {
    pub fn coeff(op: OpSpec, c: f64) -> Self {
        Self {
            op,
            reps: Repetitions::Coefficient(c),
            adjoint: false,
        }
    }

    pub fn reps(op: OpSpec, r: u64) -> Self {
        Self {
            op,
            reps: Repetitions::Reps(r),
            adjoint: false,
        }
    }

    pub fn adjoint(mut self) -> Self {
        self.adjoint = true;
        self
    }

    fn operator(&self, params: &ProblemParams) -> Result<ReducedOperator> {
        let op = self.op.operator(params)?;
        Ok(if self.adjoint { op.adjoint() } else { op })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleJson", into = "ScheduleJson")]
pub struct Schedule {
    params: ProblemParams,
    phases: Vec<Phase>,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    k: usize,
    #[serde(rename = "N")]
    size: u64,
    phases: Vec<Phase>,
}

impl TryFrom<ScheduleJson> for Schedule {
    type Error = IspError;

    fn try_from(j: ScheduleJson) -> Result<Self> {
        Schedule::new(ProblemParams::from_size(j.k, j.size)?, j.phases)
    }
}

impl From<Schedule> for ScheduleJson {
    fn from(s: Schedule) -> Self {
        ScheduleJson {
            k: s.params.k(),
            size: s.params.size(),
            phases: s.phases,
        }
    }
}

impl Schedule {
    pub fn new(params: ProblemParams, phases: Vec<Phase>) -> Result<Self> {
        for p in &phases {
            p.op.check(params.k())?;
            if let Repetitions::Coefficient(c) = p.reps {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(IspError::OutOfRange {
                        value: c,
                        range: "coefficient >= 0",
                    });
                }
            }
        }
        Ok(Self { params, phases })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phases
    }

    /// Same phases at a different `N`.
    pub fn with_params(&self, params: ProblemParams) -> Result<Self> {
        if params.k() != self.params.k() {
            return Err(IspError::WrongLevelCount {
                expected: self.params.k(),
                got: params.k(),
            });
        }
        Self::new(params, self.phases.clone())
    }

    pub fn total_iterations(&self) -> u64 {
        self.phases.iter().map(|p| p.reps.count(&self.params)).sum()
    }

    /// Iterations actually executed, divided by `sqrt N`.
    pub fn total_coefficient(&self) -> f64 {
        self.total_iterations() as f64 / self.params.sqrt_size()
    }

    /// Sum of the unrounded phase coefficients.
    pub fn nominal_coefficient(&self) -> f64 {
        self.phases
            .iter()
            .map(|p| p.reps.nominal(&self.params))
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Runs from the exact initial state and returns the final state.
    pub fn final_state(&self) -> Result<ReducedState> {
        let start = initial_state(&self.params, InitMode::Exact);
        Ok(run_schedule(self, &start, u64::MAX)?.final_state)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub iteration: u64,
    pub state: ReducedState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// State after each phase, tagged with the cumulative iteration count.
    pub phase_ends: Vec<Sample>,
    pub final_state: ReducedState,
}

impl Trajectory {
    pub fn final_sink_probability(&self) -> f64 {
        self.final_state.sink_probability()
    }

    pub fn max_sink_probability(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.state.sink_probability())
            .fold(self.final_sink_probability(), f64::max)
    }

    /// Header `iteration,<labels>,sink_probability`, one row per sample.
    pub fn to_csv(&self) -> String {
        let k = self.final_state.k();
        let labels = enumerate_labels(k).expect("k >= 1");
        let mut out = String::from("iteration");
        for l in &labels {
            out.push(',');
            out.push_str(&l.to_string());
        }
        out.push_str(",sink_probability\n");
        for s in &self.samples {
            out.push_str(&s.iteration.to_string());
            for a in s.state.amplitudes().iter() {
                out.push(',');
                out.push_str(&sig12(*a));
            }
            out.push(',');
            out.push_str(&sig12(s.state.sink_probability()));
            out.push('\n');
        }
        out
    }
}

/// Applies the phases in order, sampling every `sample_every` iterations.
/// Iteration 0 and the final iteration are always sampled.
pub fn run_schedule(s: &Schedule, start: &ReducedState, sample_every: u64) -> Result<Trajectory> {
    if sample_every == 0 {
        return Err(IspError::ZeroStride);
    }
    if start.dim() != s.params.dim() {
        return Err(IspError::DimensionMismatch {
            expected: s.params.dim(),
            got: start.dim(),
        });
    }
    let mut state = start.clone();
    let mut scratch = DVector::zeros(state.dim());
    let mut samples = vec![Sample {
        iteration: 0,
        state: state.clone(),
    }];
    let mut phase_ends = Vec::with_capacity(s.phases.len());
    let mut iteration = 0u64;
    for phase in &s.phases {
        let op = phase.operator(&s.params)?;
        for _ in 0..phase.reps.count(&s.params) {
            op.apply_in_place(&mut state, &mut scratch);
            iteration += 1;
            if iteration.is_multiple_of(sample_every) {
                samples.push(Sample {
                    iteration,
                    state: state.clone(),
                });
            }
        }
        phase_ends.push(Sample {
            iteration,
            state: state.clone(),
        });
    }
    if samples.last().map(|x| x.iteration) != Some(iteration) {
        samples.push(Sample {
            iteration,
            state: state.clone(),
        });
    }
    Ok(Trajectory {
        samples,
        phase_ends,
        final_state: state,
    })
}

/// Stage `i` is `G_i` applied `round(t_G(N))` times, stages in order `1..k`.
pub fn sequential_grover_schedule(params: &ProblemParams) -> Schedule {
    let phases = (1..=params.k())
        .map(|i| Phase::coeff(OpSpec::level(i), FRAC_PI_4))
        .collect();
    Schedule::new(*params, phases).expect("levels within range")
}

/// `PG_k` repeated `round(c sqrt N)` times.
pub fn sole_pg_schedule(params: &ProblemParams, c: f64) -> Result<Schedule> {
    Schedule::new(*params, vec![Phase::coeff(OpSpec::Parallel, c)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K3Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

impl K3Constants {
    pub const REFERENCE: K3Constants = K3Constants {
        c1: 0.78,
        c2: 0.17,
        c3: 0.05,
        c4: 0.5,
        c5: 0.0,
    };

    pub fn as_array(&self) -> [f64; 5] {
        [self.c1, self.c2, self.c3, self.c4, self.c5]
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

impl Default for K3Constants {
    fn default() -> Self {
        Self::REFERENCE
    }
}

/// The six-phase `k = 3` solution:
/// `PG_3^{c1}`, one `G_2`, `PG_3^{c2}`, `(G_3^T)^{c3}`, `(G_2 G_3)^{c4}`, `G_3^{c5}`.
pub fn k3_paper_schedule(params: &ProblemParams, c: &K3Constants) -> Result<Schedule> {
    if params.k() != 3 {
        return Err(IspError::WrongLevelCount {
            expected: 3,
            got: params.k(),
        });
    }
    Schedule::new(
        *params,
        vec![
            Phase::coeff(OpSpec::Parallel, c.c1),
            Phase::reps(OpSpec::level(2), 1),
            Phase::coeff(OpSpec::Parallel, c.c2),
            Phase::coeff(OpSpec::level(3), c.c3).adjoint(),
            Phase::coeff(OpSpec::Levels(vec![2, 3]), c.c4),
            Phase::coeff(OpSpec::level(3), c.c5),
        ],
    )
}

/// Given the `ENN` amplitude `a3`, returns `(a1', a2', d)` with
/// `pg2_amplitudes(d) = (a1', a2', a3)`.
pub fn pg2_target_split(a3: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&a3) {
        return Err(IspError::OutOfRange {
            value: a3,
            range: "[0, 1]",
        });
    }
    let d = a3.sqrt().acos() / SQRT_2;
    Ok((1.0 - a3, SQRT_2 * (a3 * (1.0 - a3)).sqrt(), d))
}

/// Amplitude magnitudes observed by the constant search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AValues {
    /// `|eee|`, `|eeN|`, `|eNN|` after the `c2` phase.
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// PG_2-compatible targets from [`pg2_target_split`].
    pub a1p: f64,
    pub a2p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct K3Fit {
    #[serde(rename = "N")]
    pub size: u64,
    pub constants: K3Constants,
    pub steps: [u64; 5],
    pub a: AValues,
    /// True when `a2' > a2` and the adjoint phase was used.
    pub adjoint_branch: bool,
    pub total_coefficient: f64,
    pub sink_probability: f64,
}

/// Steps `op` while `|f|` decreases without a sign change; returns the step
/// (before or after the stopping point) with the smaller `|f|`.
fn advance_to_zero(
    op: &ReducedOperator,
    state: &mut ReducedState,
    f: impl Fn(&ReducedState) -> f64,
    cap: u64,
) -> Result<u64> {
    let mut scratch = DVector::zeros(state.dim());
    let mut steps = 0;
    let mut cur = f(state);
    while steps < cap {
        let mut next_state = state.clone();
        op.apply_in_place(&mut next_state, &mut scratch);
        let next = f(&next_state);
        let crossed = next.signum() != cur.signum() && cur != 0.0;
        if crossed || next.abs() >= cur.abs() {
            if next.abs() < cur.abs() {
                *state = next_state;
                steps += 1;
            }
            return Ok(steps);
        }
        *state = next_state;
        cur = next;
        steps += 1;
    }
    Err(IspError::SearchFailure(format!(
        "no zero within {cap} iterations"
    )))
}

/// Steps `op` until `|f|` reaches `target`, stopping at the closer side.
fn advance_to_level(
    op: &ReducedOperator,
    state: &mut ReducedState,
    f: impl Fn(&ReducedState) -> f64,
    target: f64,
    cap: u64,
) -> Result<u64> {
    let mut scratch = DVector::zeros(state.dim());
    let mut steps = 0;
    while steps < cap {
        let cur = f(state).abs();
        if cur >= target {
            return Ok(steps);
        }
        let mut next_state = state.clone();
        op.apply_in_place(&mut next_state, &mut scratch);
        let next = f(&next_state).abs();
        if next <= cur {
            return Err(IspError::SearchFailure(format!(
                "amplitude stalls at {cur} below target {target}"
            )));
        }
        if next >= target {
            if next - target < target - cur {
                *state = next_state;
                steps += 1;
            }
            return Ok(steps);
        }
        *state = next_state;
        steps += 1;
    }
    Err(IspError::SearchFailure(format!(
        "target {target} not reached within {cap} iterations"
    )))
}

/// Minimizes `f` over `[a, b]` to width `tol`.
fn golden_section(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    (a + b) / 2.0
}

const FFF: usize = 7;
const FEE: usize = 4;
const EEF: usize = 1;
const EFF: usize = 3;

struct K3Search {
    params: ProblemParams,
    pg: ReducedOperator,
    g2: ReducedOperator,
    g3: ReducedOperator,
    cap: u64,
}

impl K3Search {
    fn new(params: &ProblemParams) -> Result<Self> {
        if params.k() != 3 {
            return Err(IspError::WrongLevelCount {
                expected: 3,
                got: params.k(),
            });
        }
        Ok(Self {
            params: *params,
            pg: parallel_grover(params)?,
            g2: grover_levels_product(&[2], params)?,
            g3: grover_levels_product(&[3], params)?,
            cap: params.iterations(4.0).max(16),
        })
    }

    /// State after `PG_3^{t1}`, one `G_2` and `PG_3` to the `Nee` zero.
    fn after_c2(&self, t1: u64) -> Result<(ReducedState, u64)> {
        let mut s = initial_state(&self.params, InitMode::Exact);
        s = self.pg.power(t1).apply(&s)?;
        s = self.g2.apply(&s)?;
        let t2 = advance_to_zero(&self.pg, &mut s, |x| x.amplitudes()[FEE], self.cap)?;
        Ok((s, t2))
    }

    fn fff(&self, t1: u64) -> Result<f64> {
        Ok(self.after_c2(t1)?.0.amplitudes()[FFF])
    }
}

/// Re-derives `c1..c5` from the amplitude conditions of the `k = 3` schedule:
/// `c1` empties the source once `Nee` is brought back to zero by `c2`; `c3`
/// lifts `eeN` to the PG_2-compatible value `a2'` when `a2' > a2`; `c4` runs
/// `G_2 G_3` until `eNN` vanishes; `c5` clears a remaining `eeN` when the
/// adjoint phase was not needed.
pub fn optimize_k3_constants(params: &ProblemParams) -> Result<K3Fit> {
    let search = K3Search::new(params)?;
    let t_of = |c: f64| params.iterations(c);

    let grid: Vec<f64> = (60..=100).map(|i| i as f64 / 100.0).collect();
    let mut values = Vec::with_capacity(grid.len());
    for &c in &grid {
        values.push(search.fff(t_of(c))?);
    }
    let bracket = grid
        .windows(2)
        .zip(values.windows(2))
        .find(|(_, v)| v[0].signum() != v[1].signum())
        .map(|(g, _)| (g[0], g[1]))
        .ok_or_else(|| {
            IspError::SearchFailure(
                "source amplitude has no zero crossing in c1 in [0.6, 1]".into(),
            )
        })?;
    let c1_star = golden_section(bracket.0, bracket.1, 1e-4, |c| {
        search.fff(t_of(c)).map(f64::abs).unwrap_or(f64::INFINITY)
    });
    let centre = t_of(c1_star);
    let t1 = (centre.saturating_sub(1)..=centre + 1)
        .map(|t| (t, search.fff(t).map(f64::abs).unwrap_or(f64::INFINITY)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| t)
        .expect("non-empty range");

    fit_after_c1(&search, t1)
}

/// Completes the constant search for a fixed `c1` (rounded to iterations).
pub fn optimize_k3_constants_from(params: &ProblemParams, c1: f64) -> Result<K3Fit> {
    let search = K3Search::new(params)?;
    fit_after_c1(&search, params.iterations(c1))
}

fn fit_after_c1(search: &K3Search, t1: u64) -> Result<K3Fit> {
    let params = &search.params;
    let r = params.sqrt_size();
    let (mut s, t2) = search.after_c2(t1)?;
    let amp = |s: &ReducedState, i: usize| s.amplitudes()[i].abs();
    let (a1, a2, a3) = (amp(&s, 0), amp(&s, EEF), amp(&s, EFF));
    let (a1p, a2p, _) = pg2_target_split(a3.min(1.0))?;

    let adjoint_branch = a2p > a2;
    let t3 = if adjoint_branch {
        let g3t = search.g3.adjoint();
        advance_to_level(&g3t, &mut s, |x| x.amplitudes()[EEF], a2p, search.cap)?
    } else {
        0
    };
    let g23 = search.g2.compose(&search.g3)?;
    let t4 = advance_to_zero(&g23, &mut s, |x| x.amplitudes()[EFF], search.cap)?;
    let t5 = if adjoint_branch {
        0
    } else {
        advance_to_zero(&search.g3, &mut s, |x| x.amplitudes()[EEF], search.cap)?
    };

    let steps = [t1, t2, t3, t4, t5];
    let c = steps.map(|t| t as f64 / r);
    Ok(K3Fit {
        size: params.size(),
        constants: K3Constants {
            c1: c[0],
            c2: c[1],
            c3: c[2],
            c4: c[3],
            c5: c[4],
        },
        steps,
        a: AValues {
            a1,
            a2,
            a3,
            a1p,
            a2p,
        },
        adjoint_branch,
        total_coefficient: c.iter().sum::<f64>() + 1.0 / r,
        sink_probability: s.sink_probability(),
    })
}

/// Success threshold `1 - 10/sqrt N` used to validate schedules.
pub fn success_threshold(params: &ProblemParams) -> f64 {
    1.0 - 10.0 / params.sqrt_size()
}

/// Checks that `s` reaches the success threshold from the exact initial state.
pub fn validate_schedule(s: &Schedule) -> Result<f64> {
    let p = s.final_state()?.sink_probability();
    let threshold = success_threshold(&s.params);
    if p < threshold {
        return Err(IspError::UnvalidatedBase {
            probability: p,
            threshold,
        });
    }
    Ok(p)
}

/// Runs the blocks on successive level ranges, the lowest levels first.
/// Each block must solve its own `k_b`-ISP at the same `N`.
pub fn compose_blocks(blocks: &[Schedule], params: &ProblemParams) -> Result<Schedule> {
    let total: usize = blocks.iter().map(|b| b.params.k()).sum();
    if total != params.k() {
        return Err(IspError::WrongLevelCount {
            expected: params.k(),
            got: total,
        });
    }
    let mut phases = Vec::new();
    let mut offset = 0;
    for b in blocks {
        let kb = b.params.k();
        validate_schedule(&b.with_params(params.with_k(kb)?)?)?;
        phases.extend(b.phases.iter().map(|p| Phase {
            op: p.op.shifted(kb, offset),
            reps: p.reps,
            adjoint: p.adjoint,
        }));
        offset += kb;
    }
    Schedule::new(*params, phases)
}

/// `m` copies of a `k`-level base schedule for the `mk`-ISP.
pub fn mk_generalization(base: &Schedule, m: usize) -> Result<Schedule> {
    if m == 0 {
        return Err(IspError::ZeroLevels);
    }
    if m == 1 {
        validate_schedule(base)?;
        return Ok(base.clone());
    }
    let params = base.params.with_k(base.params.k() * m)?;
    compose_blocks(&vec![base.clone(); m], &params)
}

/// `PG_2` at the full-transfer coefficient.
pub fn pg2_schedule(params: &ProblemParams) -> Result<Schedule> {
    if params.k() != 2 {
        return Err(IspError::WrongLevelCount {
            expected: 2,
            got: params.k(),
        });
    }
    sole_pg_schedule(params, pg2_full_transfer())
}

/// Repeats `op` from `state` until `observable` first stops increasing.
/// Returns the number of steps taken and the peak value.
pub fn run_to_peak(
    op: &ReducedOperator,
    state: &mut ReducedState,
    observable: impl Fn(&ReducedState) -> f64,
    cap: u64,
) -> Result<(u64, f64)> {
    let mut scratch = DVector::zeros(state.dim());
    let mut cur = observable(state);
    for steps in 0..cap {
        let mut next_state = state.clone();
        op.apply_in_place(&mut next_state, &mut scratch);
        let next = observable(&next_state);
        if next <= cur {
            return Ok((steps, cur));
        }
        *state = next_state;
        cur = next;
    }
    Err(IspError::SearchFailure(format!(
        "no peak within {cap} iterations"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakResult {
    pub iterations: u64,
    pub coefficient: f64,
    pub sink_probability: f64,
}

/// Smallest iteration count at which sequential Grover completes: each stage
/// `G_i` runs until the probability of the solved prefix `e_1..e_i` peaks.
pub fn sequential_peak(params: &ProblemParams) -> Result<PeakResult> {
    let mut s = initial_state(params, InitMode::Exact);
    let cap = params.iterations(2.0).max(8);
    let mut total = 0;
    for i in 1..=params.k() {
        let g = grover_levels_product(&[i], params)?;
        total += run_to_peak(&g, &mut s, |x| x.prefix_probability(i), cap)?.0;
    }
    Ok(PeakResult {
        iterations: total,
        coefficient: total as f64 / params.sqrt_size(),
        sink_probability: s.sink_probability(),
    })
}

/// First peak of the sink probability under repeated `PG_k`.
pub fn parallel_peak(params: &ProblemParams) -> Result<PeakResult> {
    let mut s = initial_state(params, InitMode::Exact);
    let pg = parallel_grover(params)?;
    let cap = params.iterations(4.0).max(8);
    let (t, p) = run_to_peak(&pg, &mut s, ReducedState::sink_probability, cap)?;
    Ok(PeakResult {
        iterations: t,
        coefficient: t as f64 / params.sqrt_size(),
        sink_probability: p,
    })
}
