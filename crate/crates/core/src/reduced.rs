//! Exact dynamics of ISP circuits restricted to the `2^k`-dimensional
//! symmetric subspace.
//!
//! Every circuit layer used here (phase oracles on a prefix of registers and
//! inversion about the mean on one register) maps the span of the `{e, N}`
//! product states to itself, so the full `2^{kn}`-dimensional evolution is
//! captured by small real orthogonal matrices in the normalized basis.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{IspError, Result};
use crate::label::{weight_of_label, BasisLabel, ProblemParams};

/// Kind of a local two-state (or one-state) operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Grover,
    Iam,
    Reflection,
}

/// Diagonal entry `1 - 2/N` of the 2x2 Grover and IAM blocks.
pub fn diag_entry(size: u64) -> f64 {
    1.0 - 2.0 / size as f64
}

/// Off-diagonal entry `2 sqrt(N - 1) / N` of the 2x2 Grover and IAM blocks.
pub fn coupling_entry(size: u64) -> f64 {
    let n = size as f64;
    2.0 * (n - 1.0).sqrt() / n
}

/// 2x2 block in the `(e, N)` normalized basis, row-major.
pub fn block_2x2(kind: EdgeKind, size: u64) -> [[f64; 2]; 2] {
    let a = diag_entry(size);
    let b = coupling_entry(size);
    match kind {
        EdgeKind::Grover => [[a, b], [-b, a]],
        EdgeKind::Iam => [[-a, b], [b, a]],
        EdgeKind::Reflection => [[-1.0, 0.0], [0.0, 1.0]],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Identity,
    IamRegister(usize),
    Oracle(usize),
    GroverRegister(usize),
    EdgeOp,
    Reflection(Vec<BasisLabel>),
    Product,
}

/// Amplitudes over the normalized basis, indexed in label enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    amplitudes: DVector<f64>,
}

impl ReducedState {
    /// Wraps a vector, rejecting it unless its norm is 1 within 1e-12.
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !v.len().is_power_of_two() || v.len() < 2 {
            return Err(IspError::DimensionMismatch {
                expected: v.len().next_power_of_two().max(2),
                got: v.len(),
            });
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(IspError::NotNormalized(norm));
        }
        Ok(Self { amplitudes: v })
    }

    pub(crate) fn from_vector_unchecked(amplitudes: DVector<f64>) -> Self {
        Self { amplitudes }
    }

    /// Unit vector on `label`.
    pub fn basis(label: &BasisLabel) -> Self {
        let mut v = DVector::zeros(1 << label.len());
        v[label.index()] = 1.0;
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn k(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &DVector<f64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &BasisLabel) -> f64 {
        self.amplitudes[label.index()]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Squared amplitude of the sink `ee..e`.
    pub fn sink_probability(&self) -> f64 {
        self.amplitudes[0] * self.amplitudes[0]
    }

    /// Probability that the first `i` registers hold the solution prefix.
    pub fn prefix_probability(&self, i: usize) -> f64 {
        let k = self.k();
        let block = 1usize << (k - i.min(k));
        self.amplitudes.rows(0, block).norm_squared()
    }

    /// Largest absolute component difference.
    pub fn max_deviation(&self, other: &ReducedState) -> f64 {
        (&self.amplitudes - &other.amplitudes).amax()
    }

    pub fn distance(&self, other: &ReducedState) -> f64 {
        (&self.amplitudes - &other.amplitudes).norm()
    }
}

/// Real orthogonal operator on the reduced space.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOperator {
    matrix: DMatrix<f64>,
    provenance: Provenance,
}

impl ReducedOperator {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            provenance: Provenance::Identity,
        }
    }

    pub fn from_matrix(matrix: DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(IspError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        Ok(Self { matrix, provenance })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `self * other`: `other` acts first.
    pub fn compose(&self, other: &ReducedOperator) -> Result<ReducedOperator> {
        if self.dim() != other.dim() {
            return Err(IspError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            provenance: Provenance::Product,
        })
    }

    /// Transpose, which is the exact inverse of an orthogonal operator.
    pub fn adjoint(&self) -> ReducedOperator {
        Self {
            matrix: self.matrix.transpose(),
            provenance: Provenance::Product,
        }
    }

    /// `max |O^T O - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim();
        (self.matrix.transpose() * &self.matrix - DMatrix::<f64>::identity(d, d)).amax()
    }

    pub fn max_deviation(&self, other: &ReducedOperator) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn apply(&self, state: &ReducedState) -> Result<ReducedState> {
        if self.dim() != state.dim() {
            return Err(IspError::DimensionMismatch {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        Ok(ReducedState {
            amplitudes: &self.matrix * &state.amplitudes,
        })
    }

    /// `apply` without the dimension check, for hot loops that checked once.
    pub(crate) fn apply_in_place(&self, state: &mut ReducedState, scratch: &mut DVector<f64>) {
        self.matrix.mul_to(&state.amplitudes, scratch);
        std::mem::swap(&mut state.amplitudes, scratch);
    }

    /// `op^t` by square-and-multiply over exact matrix products.
    pub fn power(&self, t: u64) -> ReducedOperator {
        let d = self.dim();
        let mut result = DMatrix::<f64>::identity(d, d);
        let mut base = self.matrix.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self {
            matrix: result,
            provenance: if t == 0 {
                Provenance::Identity
            } else {
                Provenance::Product
            },
        }
    }
}

impl Mul for &ReducedOperator {
    type Output = ReducedOperator;

    fn mul(self, rhs: &ReducedOperator) -> ReducedOperator {
        self.compose(rhs).expect("operator dimensions must agree")
    }
}

impl fmt::Display for ReducedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}", self.provenance, self.matrix)
    }
}

fn check_level(level: usize, params: &ProblemParams) -> Result<()> {
    if level == 0 || level > params.k() {
        return Err(IspError::LevelOutOfRange {
            level,
            k: params.k(),
        });
    }
    Ok(())
}

/// Phase oracle `O_i`: `-1` on every label whose first `i` symbols are `e`.
pub fn reduced_oracle(level: usize, params: &ProblemParams) -> Result<ReducedOperator> {
    check_level(level, params)?;
    let k = params.k();
    let diag = DVector::from_fn(params.dim(), |idx, _| {
        // first `level` symbols E <=> top `level` bits zero
        if idx >> (k - level) == 0 {
            -1.0
        } else {
            1.0
        }
    });
    Ok(ReducedOperator {
        matrix: DMatrix::from_diagonal(&diag),
        provenance: Provenance::Oracle(level),
    })
}

/// Inversion about the mean on register `x_i`: the 2x2 IAM block on every
/// pair of labels that differ only at position `i`.
pub fn reduced_iam_register(level: usize, params: &ProblemParams) -> Result<ReducedOperator> {
    check_level(level, params)?;
    let k = params.k();
    let dim = params.dim();
    let bit = 1usize << (k - level);
    let [[m00, m01], [m10, m11]] = block_2x2(EdgeKind::Iam, params.size());
    let mut m = DMatrix::zeros(dim, dim);
    for e in (0..dim).filter(|i| i & bit == 0) {
        let f = e | bit;
        m[(e, e)] = m00;
        m[(e, f)] = m01;
        m[(f, e)] = m10;
        m[(f, f)] = m11;
    }
    Ok(ReducedOperator {
        matrix: m,
        provenance: Provenance::IamRegister(level),
    })
}

/// `G_i = IAM(x_i) O_i`, the register-level Grover step (also `SG_i` and
/// `PG_{k_i}`).
pub fn reduced_grover_register(level: usize, params: &ProblemParams) -> Result<ReducedOperator> {
    let iam = reduced_iam_register(level, params)?;
    let oracle = reduced_oracle(level, params)?;
    Ok(ReducedOperator {
        matrix: iam.matrix * oracle.matrix,
        provenance: Provenance::GroverRegister(level),
    })
}

/// Product `G_{l_1} G_{l_2} ... G_{l_m}` of register-level Grover steps, the
/// last listed level acting first.
pub fn grover_levels_product(levels: &[usize], params: &ProblemParams) -> Result<ReducedOperator> {
    let mut op = ReducedOperator::identity(params.dim());
    for &level in levels {
        op = op.compose(&reduced_grover_register(level, params)?)?;
    }
    Ok(op)
}

/// One iteration of the parallel Grover operator,
/// `PG_k = G_1 G_2 ... G_k` with level `k` acting first.
pub fn parallel_grover(params: &ProblemParams) -> Result<ReducedOperator> {
    let levels: Vec<usize> = (1..=params.k()).collect();
    grover_levels_product(&levels, params)
}

/// Local operation on `span{s1, s2}` (identity elsewhere) with `s1` as the
/// first coordinate of the 2x2 block. `Reflection` flips the sign of `s1`
/// only and ignores `s2`.
pub fn local_edge_op(
    kind: EdgeKind,
    s1: &BasisLabel,
    s2: Option<&BasisLabel>,
    params: &ProblemParams,
) -> Result<ReducedOperator> {
    s1.check_len(params.k())?;
    let dim = params.dim();
    let mut m = DMatrix::identity(dim, dim);
    let i = s1.index();
    match kind {
        EdgeKind::Reflection => {
            m[(i, i)] = -1.0;
            return Ok(ReducedOperator {
                matrix: m,
                provenance: Provenance::Reflection(vec![s1.clone()]),
            });
        }
        EdgeKind::Grover | EdgeKind::Iam => {
            let s2 = s2.ok_or(IspError::MissingTarget)?;
            s2.check_len(params.k())?;
            if s1.differing_positions(s2).len() != 1 {
                return Err(IspError::NotAdjacent {
                    from: s1.to_string(),
                    to: s2.to_string(),
                });
            }
            let j = s2.index();
            let [[m00, m01], [m10, m11]] = block_2x2(kind, params.size());
            m[(i, i)] = m00;
            m[(i, j)] = m01;
            m[(j, i)] = m10;
            m[(j, j)] = m11;
        }
    }
    Ok(ReducedOperator {
        matrix: m,
        provenance: Provenance::EdgeOp,
    })
}

/// Diagonal sign flip on every label in `labels`.
pub fn reflection(labels: &[BasisLabel], params: &ProblemParams) -> Result<ReducedOperator> {
    let dim = params.dim();
    let mut m = DMatrix::identity(dim, dim);
    for l in labels {
        l.check_len(params.k())?;
        m[(l.index(), l.index())] = -1.0;
    }
    Ok(ReducedOperator {
        matrix: m,
        provenance: Provenance::Reflection(labels.to_vec()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    /// Exact reduction of `H^{(x)kn}|0>`.
    #[default]
    Exact,
    /// All weight on the source `NN..N`.
    Idealized,
}

/// Starting state of every schedule.
pub fn initial_state(params: &ProblemParams, mode: InitMode) -> ReducedState {
    let k = params.k();
    match mode {
        InitMode::Idealized => ReducedState::basis(&BasisLabel::source(k)),
        InitMode::Exact => {
            let size = params.size();
            let scale = params.size_f64().powf(-(k as f64) / 2.0);
            let v = DVector::from_fn(params.dim(), |i, _| {
                weight_of_label(&BasisLabel::from_index(i, k), size) * scale
            });
            ReducedState { amplitudes: v }
        }
    }
}
