//! Brute-force simulation over the full `2^{rn}`-dimensional Hilbert space.
//!
//! Register 1 occupies the most significant `n` bits. Search registers come
//! first, ancilla registers after them. Oracles are phase oracles.

use std::collections::HashMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IspError, Result};
use crate::label::{BasisLabel, ProblemParams, Symbol};
use crate::reduced::{
    parallel_grover, reduced_grover_register, reduced_iam_register, reduced_oracle,
    ReducedOperator, ReducedState,
};

/// Largest total qubit count accepted.
pub const QUBIT_LIMIT: u32 = 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n: u32,
    search: usize,
    ancilla: usize,
}

impl RegisterLayout {
    pub fn new(search: usize, ancilla: usize, n: u32) -> Result<Self> {
        if search == 0 {
            return Err(IspError::ZeroLevels);
        }
        if n == 0 {
            return Err(IspError::InvalidWidth(n));
        }
        let qubits = (search + ancilla) as u64 * n as u64;
        if qubits > QUBIT_LIMIT as u64 {
            return Err(IspError::TooManyQubits {
                qubits: qubits.min(u32::MAX as u64) as u32,
                limit: QUBIT_LIMIT,
            });
        }
        Ok(Self { n, search, ancilla })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn search(&self) -> usize {
        self.search
    }

    pub fn registers(&self) -> usize {
        self.search + self.ancilla
    }

    pub fn dim(&self) -> usize {
        1usize << (self.registers() as u32 * self.n)
    }

    /// Bit offset of 1-based register `reg`.
    fn shift(&self, reg: usize) -> u32 {
        (self.registers() - reg) as u32 * self.n
    }

    fn mask(&self) -> usize {
        (1usize << self.n) - 1
    }

    pub fn value(&self, index: usize, reg: usize) -> u64 {
        ((index >> self.shift(reg)) & self.mask()) as u64
    }

    fn check_reg(&self, reg: usize) -> Result<()> {
        if reg == 0 || reg > self.registers() {
            return Err(IspError::LevelOutOfRange {
                level: reg,
                k: self.registers(),
            });
        }
        Ok(())
    }
}

/// Solution values `e_1..e_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    values: Vec<u64>,
}

impl Solution {
    pub fn new(values: Vec<u64>, n: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(IspError::ZeroLevels);
        }
        for &value in &values {
            if value >> n != 0 {
                return Err(IspError::BadSolution { value, n });
            }
        }
        Ok(Self { values })
    }

    pub fn zeros(k: usize) -> Self {
        Self { values: vec![0; k] }
    }

    pub fn random<R: Rng>(k: usize, n: u32, rng: &mut R) -> Self {
        Self {
            values: (0..k).map(|_| rng.random_range(0..1u64 << n)).collect(),
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `H^{(x)n}|0>` on every search register, ancillas in `|0>`.
    pub fn init_uniform(layout: RegisterLayout) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        let search_bits = layout.search as u32 * layout.n;
        let anc_bits = layout.ancilla as u32 * layout.n;
        let amp = Complex64::new((0.5f64).powf(search_bits as f64 / 2.0), 0.0);
        for s in 0..1usize << search_bits {
            amplitudes[s << anc_bits] = amp;
        }
        Self { layout, amplitudes }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(IspError::DimensionMismatch {
                expected: layout.dim(),
                got: amplitudes.len(),
            });
        }
        let sv = Self { layout, amplitudes };
        let norm = sv.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(IspError::NotNormalized(norm));
        }
        Ok(sv)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_deviation(&self, other: &Statevector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Sign flip on basis states whose `registers` hold `values`.
    pub fn apply_phase_oracle(&mut self, registers: &[usize], values: &[u64]) -> Result<()> {
        for &r in registers {
            self.layout.check_reg(r)?;
        }
        let lay = self.layout;
        for (idx, a) in self.amplitudes.iter_mut().enumerate() {
            if registers
                .iter()
                .zip(values)
                .all(|(&r, &v)| lay.value(idx, r) == v)
            {
                *a = -*a;
            }
        }
        Ok(())
    }

    /// `O_i`: flips states with `x_1..x_i = e_1..e_i`.
    pub fn apply_oracle_full(&mut self, level: usize, solution: &Solution) -> Result<()> {
        if level == 0 || level > self.layout.search || level > solution.values.len() {
            return Err(IspError::LevelOutOfRange {
                level,
                k: self.layout.search,
            });
        }
        let regs: Vec<usize> = (1..=level).collect();
        self.apply_phase_oracle(&regs, &solution.values[..level])
    }

    /// `2|u><u| - I` on register `reg`.
    pub fn apply_diffusion_register(&mut self, reg: usize) -> Result<()> {
        self.layout.check_reg(reg)?;
        let shift = self.layout.shift(reg);
        let width = 1usize << self.layout.n;
        let low = 1usize << shift;
        let high = self.layout.dim() >> (shift + self.layout.n);
        let scale = 2.0 / width as f64;
        for h in 0..high {
            let base = h << (shift + self.layout.n);
            for l in 0..low {
                let mut sum = ZERO;
                for v in 0..width {
                    sum += self.amplitudes[base | (v << shift) | l];
                }
                let mean2 = sum * scale;
                for v in 0..width {
                    let a = &mut self.amplitudes[base | (v << shift) | l];
                    *a = mean2 - *a;
                }
            }
        }
        Ok(())
    }

    /// Bitwise `x_target ^= x_control`.
    pub fn apply_cnot_layer(&mut self, control: usize, target: usize) -> Result<()> {
        self.layout.check_reg(control)?;
        self.layout.check_reg(target)?;
        if control == target {
            return Err(IspError::LevelOutOfRange {
                level: target,
                k: self.layout.registers(),
            });
        }
        let lay = self.layout;
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let c = lay.value(idx, control) as usize;
            out[idx ^ (c << lay.shift(target))] = *a;
        }
        self.amplitudes = out;
        Ok(())
    }

    /// `G_i = IAM_i O_i`.
    pub fn apply_grover(&mut self, level: usize, solution: &Solution) -> Result<()> {
        self.apply_oracle_full(level, solution)?;
        self.apply_diffusion_register(level)
    }

    /// `PG_k = G_1 ... G_k`, level `k` first.
    pub fn apply_parallel_grover(&mut self, solution: &Solution) -> Result<()> {
        for level in (1..=self.layout.search).rev() {
            self.apply_grover(level, solution)?;
        }
        Ok(())
    }

    /// Norm of the part with any ancilla register nonzero.
    pub fn ancilla_residual(&self) -> f64 {
        let anc_bits = self.layout.ancilla as u32 * self.layout.n;
        let mask = (1usize << anc_bits) - 1;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Copies the search registers into a layout with `ancilla` extra
    /// registers in `|0>`.
    pub fn with_ancilla(&self, ancilla: usize) -> Result<Statevector> {
        if self.layout.ancilla != 0 {
            return Err(IspError::DimensionMismatch {
                expected: 0,
                got: self.layout.ancilla,
            });
        }
        let layout = RegisterLayout::new(self.layout.search, ancilla, self.layout.n)?;
        let bits = ancilla as u32 * layout.n;
        let mut amplitudes = vec![ZERO; layout.dim()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            amplitudes[i << bits] = *a;
        }
        Ok(Statevector { layout, amplitudes })
    }
}

/// Readings of the two controlled-NOT layers in the parallel `PG_2` circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParallelForm {
    /// `CNOT(x_1 -> x_3)`, oracles, `CNOT(x_3 -> x_1)`.
    Printed,
    /// `CNOT(x_1 -> x_3)`, oracles, `CNOT(x_1 -> x_3)`.
    ComputeUncompute,
    /// `CNOT(x_3 -> x_1)`, oracles, `CNOT(x_1 -> x_3)`.
    Reversed,
}

impl ParallelForm {
    pub const ALL: [ParallelForm; 3] = [
        ParallelForm::Printed,
        ParallelForm::ComputeUncompute,
        ParallelForm::Reversed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ParallelForm::Printed => "printed",
            ParallelForm::ComputeUncompute => "compute-uncompute",
            ParallelForm::Reversed => "reversed",
        }
    }

    fn cnots(&self) -> [(usize, usize); 2] {
        match self {
            ParallelForm::Printed => [(1, 3), (3, 1)],
            ParallelForm::ComputeUncompute => [(1, 3), (1, 3)],
            ParallelForm::Reversed => [(3, 1), (1, 3)],
        }
    }
}

/// One iteration of the ancilla-assisted `PG_2` circuit on `(x_1, x_2, x_3)`:
/// copy layer, `O_1` on `x_3` with `O_2` on `x_1 x_2`, second copy layer,
/// then diffusion on `x_1` and `x_2`.
pub fn apply_pg2_parallel_circuit(
    sv: &mut Statevector,
    solution: &Solution,
    form: ParallelForm,
) -> Result<()> {
    if sv.layout.search != 2 || sv.layout.ancilla != 1 {
        return Err(IspError::WrongLevelCount {
            expected: 2,
            got: sv.layout.search,
        });
    }
    let dirty = sv.ancilla_residual();
    if dirty > 1e-12 {
        return Err(IspError::DirtyAncilla(dirty));
    }
    let e = solution.values();
    let [first, second] = form.cnots();
    sv.apply_cnot_layer(first.0, first.1)?;
    sv.apply_phase_oracle(&[3], &e[..1])?;
    sv.apply_phase_oracle(&[1, 2], &e[..2])?;
    sv.apply_cnot_layer(second.0, second.1)?;
    sv.apply_diffusion_register(1)?;
    sv.apply_diffusion_register(2)
}

/// Projection onto the symmetric subspace of the search registers, with
/// the norm of everything outside it (including ancilla weight and any
/// imaginary part of the projected amplitudes).
pub fn project_to_reduced(sv: &Statevector, solution: &Solution) -> Result<(ReducedState, f64)> {
    let lay = sv.layout;
    let k = lay.search;
    if solution.values.len() != k {
        return Err(IspError::DimensionMismatch {
            expected: k,
            got: solution.values.len(),
        });
    }
    let anc_bits = lay.ancilla as u32 * lay.n;
    let label_of = |idx: usize| -> usize {
        (1..=k).fold(0, |acc, r| {
            (acc << 1) | usize::from(lay.value(idx, r) != solution.values[r - 1])
        })
    };
    let size = (1u64 << lay.n) as f64;
    let count = |label: usize| (size - 1.0).powi(label.count_ones() as i32);

    let mut sums = vec![ZERO; 1 << k];
    let mut outside = 0.0;
    for (idx, a) in sv.amplitudes.iter().enumerate() {
        if idx & ((1usize << anc_bits) - 1) != 0 {
            outside += a.norm_sqr();
        } else {
            sums[label_of(idx)] += a;
        }
    }
    let proj: Vec<Complex64> = sums
        .iter()
        .enumerate()
        .map(|(l, s)| s / count(l).sqrt())
        .collect();
    let mut residual = outside;
    for (idx, a) in sv.amplitudes.iter().enumerate() {
        if idx & ((1usize << anc_bits) - 1) == 0 {
            let l = label_of(idx);
            residual += (a - proj[l] / count(l).sqrt()).norm_sqr();
        }
    }
    residual += proj.iter().map(|c| c.im * c.im).sum::<f64>();
    let real = DVector::from_iterator(1 << k, proj.iter().map(|c| c.re));
    Ok((ReducedState::from_vector_unchecked(real), residual.sqrt()))
}

/// A circuit layer acting identically on the full and reduced pictures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Oracle(usize),
    Diffusion(usize),
    Grover(usize),
    Parallel,
}

impl Stage {
    pub fn random<R: Rng>(k: usize, rng: &mut R) -> Self {
        let level = rng.random_range(1..=k);
        match rng.random_range(0..4) {
            0 => Stage::Oracle(level),
            1 => Stage::Diffusion(level),
            2 => Stage::Grover(level),
            _ => Stage::Parallel,
        }
    }

    pub fn apply_full(&self, sv: &mut Statevector, solution: &Solution) -> Result<()> {
        match *self {
            Stage::Oracle(i) => sv.apply_oracle_full(i, solution),
            Stage::Diffusion(i) => sv.apply_diffusion_register(i),
            Stage::Grover(i) => sv.apply_grover(i, solution),
            Stage::Parallel => sv.apply_parallel_grover(solution),
        }
    }

    pub fn reduced(&self, params: &ProblemParams) -> Result<ReducedOperator> {
        match *self {
            Stage::Oracle(i) => reduced_oracle(i, params),
            Stage::Diffusion(i) => reduced_iam_register(i, params),
            Stage::Grover(i) => reduced_grover_register(i, params),
            Stage::Parallel => parallel_grover(params),
        }
    }
}

/// Runs `stages` in both pictures from the uniform state and returns the
/// largest amplitude deviation and projection residual seen at any step.
pub fn compare_with_reduced(
    params: &ProblemParams,
    stages: &[Stage],
    solution: &Solution,
) -> Result<(f64, f64)> {
    compare_with_reduced_using(params, stages, solution, |stage| stage.reduced(params))
}

/// [`compare_with_reduced`] with a caller-supplied reduced operator per stage.
pub fn compare_with_reduced_using(
    params: &ProblemParams,
    stages: &[Stage],
    solution: &Solution,
    reduced_of: impl Fn(&Stage) -> Result<ReducedOperator>,
) -> Result<(f64, f64)> {
    let layout = RegisterLayout::new(params.k(), 0, params.n())?;
    let mut sv = Statevector::init_uniform(layout);
    let (mut reduced, r0) = project_to_reduced(&sv, solution)?;
    let mut ops = HashMap::new();
    let mut max_dev = 0.0f64;
    let mut max_res = r0;
    for stage in stages {
        stage.apply_full(&mut sv, solution)?;
        if !ops.contains_key(stage) {
            ops.insert(*stage, reduced_of(stage)?);
        }
        reduced = ops[stage].apply(&reduced)?;
        let (proj, res) = project_to_reduced(&sv, solution)?;
        max_dev = max_dev.max(proj.max_deviation(&reduced));
        max_res = max_res.max(res);
    }
    Ok((max_dev, max_res))
}

/// Worst deviation seen on one random stage sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceCase {
    pub k: usize,
    pub n: u32,
    pub sequence: usize,
    pub length: usize,
    pub deviation: f64,
    pub residual: f64,
}

/// `count` random stage sequences of length `1..=max_len` for `params`,
/// seeded from `(seed, k, n)`, each with its own random solution.
pub fn random_equivalence_cases(
    params: &ProblemParams,
    count: usize,
    max_len: usize,
    seed: u64,
    reduced_of: impl Fn(&Stage) -> Result<ReducedOperator>,
) -> Result<Vec<EquivalenceCase>> {
    let k = params.k();
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 40) ^ ((params.n() as u64) << 32));
    let mut out = Vec::with_capacity(count);
    for sequence in 0..count {
        let length = rng.random_range(1..=max_len.max(1));
        let stages: Vec<Stage> = (0..length).map(|_| Stage::random(k, &mut rng)).collect();
        let solution = Solution::random(k, params.n(), &mut rng);
        let (deviation, residual) =
            compare_with_reduced_using(params, &stages, &solution, &reduced_of)?;
        out.push(EquivalenceCase {
            k,
            n: params.n(),
            sequence,
            length,
            deviation,
            residual,
        });
    }
    Ok(out)
}

/// Maximum deviation between one parallel-form iteration and the
/// sequential `PG_2` iteration, both from the uniform state.
pub fn parallel_form_deviation(n: u32, solution: &Solution, form: ParallelForm) -> Result<f64> {
    let layout = RegisterLayout::new(2, 0, n)?;
    let mut seq = Statevector::init_uniform(layout);
    let mut par = seq.with_ancilla(1)?;
    seq.apply_parallel_grover(solution)?;
    apply_pg2_parallel_circuit(&mut par, solution, form)?;
    Ok(par.max_deviation(&seq.with_ancilla(1)?))
}

/// Label of the computational basis state `values` relative to `solution`.
pub fn label_of_values(values: &[u64], solution: &Solution) -> BasisLabel {
    let symbols = values
        .iter()
        .zip(solution.values())
        .map(|(v, e)| if v == e { Symbol::E } else { Symbol::F })
        .collect();
    BasisLabel::new(symbols).expect("non-empty")
}
