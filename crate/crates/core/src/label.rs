//! Problem sizes and the `{e, N}` labels of the symmetric subspace.
//!
//! A label of length `k` names one basis state of the reduced space: symbol
//! `E` at position `i` means register `x_i` holds the solution substring
//! `e_i`, symbol `F` means it is spread uniformly over the other `N - 1`
//! values. Labels are enumerated as binary integers with `E = 0`, `F = 1`
//! and position 1 as the most significant bit, so the sink `EE..E` has index
//! 0 and the source `FF..F` has index `2^k - 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{IspError, Result};

/// Level count `k` and register width `n` (`N = 2^n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemParams {
    k: usize,
    n: u32,
}

impl ProblemParams {
    pub fn new(k: usize, n: u32) -> Result<Self> {
        if k == 0 {
            return Err(IspError::ZeroLevels);
        }
        if n == 0 || n > 62 {
            return Err(IspError::InvalidWidth(n));
        }
        Ok(Self { k, n })
    }

    /// Builds parameters from the search-space size `N` instead of `n`.
    pub fn from_size(k: usize, size: u64) -> Result<Self> {
        if size < 2 || !size.is_power_of_two() {
            return Err(IspError::NotPowerOfTwo(size));
        }
        Self::new(k, size.trailing_zeros())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Search-space size per register, `N = 2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    pub fn size_f64(&self) -> f64 {
        self.size() as f64
    }

    pub fn sqrt_size(&self) -> f64 {
        self.size_f64().sqrt()
    }

    /// Reduced-space dimension `2^k`.
    pub fn dim(&self) -> usize {
        1usize << self.k
    }

    /// Same `N`, different level count.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(k, self.n)
    }

    /// `t_G(N) = pi sqrt(N) / 4`, the optimal single-register Grover count.
    pub fn grover_time(&self) -> f64 {
        std::f64::consts::FRAC_PI_4 * self.sqrt_size()
    }

    /// Iteration count for a coefficient of `sqrt(N)`, rounded to nearest.
    pub fn iterations(&self, coeff: f64) -> u64 {
        (coeff * self.sqrt_size()).round().max(0.0) as u64
    }
}

/// One register's symbol: the solution substate or the non-solution bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    E,
    F,
}

impl Symbol {
    pub fn flipped(self) -> Self {
        match self {
            Symbol::E => Symbol::F,
            Symbol::F => Symbol::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    symbols: Vec<Symbol>,
}

impl BasisLabel {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(IspError::ZeroLevels);
        }
        Ok(Self { symbols })
    }

    /// Label with enumeration index `index` among the `2^k` labels.
    pub fn from_index(index: usize, k: usize) -> Self {
        debug_assert!(k >= 1 && index < (1usize << k));
        let symbols = (0..k)
            .map(|p| {
                if index >> (k - 1 - p) & 1 == 0 {
                    Symbol::E
                } else {
                    Symbol::F
                }
            })
            .collect();
        Self { symbols }
    }

    pub fn sink(k: usize) -> Self {
        Self::from_index(0, k)
    }

    pub fn source(k: usize) -> Self {
        Self::from_index((1usize << k) - 1, k)
    }

    /// Main-path label with `j` leading `E` symbols followed by `F`s.
    pub fn main_path(j: usize, k: usize) -> Self {
        let symbols = (0..k)
            .map(|p| if p < j { Symbol::E } else { Symbol::F })
            .collect();
        Self { symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Symbol at 1-based position `pos`.
    pub fn at(&self, pos: usize) -> Symbol {
        self.symbols[pos - 1]
    }

    pub fn index(&self) -> usize {
        self.symbols
            .iter()
            .fold(0, |acc, s| (acc << 1) | usize::from(*s == Symbol::F))
    }

    /// Number of `F` symbols, `#_N(s)`.
    pub fn count_f(&self) -> usize {
        self.symbols.iter().filter(|s| **s == Symbol::F).count()
    }

    /// True when the first `i` symbols are all `E` (`t_i` prefix).
    pub fn has_e_prefix(&self, i: usize) -> bool {
        self.symbols[..i].iter().all(|s| *s == Symbol::E)
    }

    pub fn is_main_path(&self) -> bool {
        let j = self.symbols.iter().take_while(|s| **s == Symbol::E).count();
        self.symbols[j..].iter().all(|s| *s == Symbol::F)
    }

    /// Copy with the symbol at 1-based `pos` flipped.
    pub fn flipped_at(&self, pos: usize) -> Self {
        let mut symbols = self.symbols.clone();
        symbols[pos - 1] = symbols[pos - 1].flipped();
        Self { symbols }
    }

    /// 1-based positions at which `self` and `other` differ.
    pub fn differing_positions(&self, other: &BasisLabel) -> Vec<usize> {
        self.symbols
            .iter()
            .zip(&other.symbols)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(p, _)| p + 1)
            .collect()
    }

    pub fn check_len(&self, k: usize) -> Result<()> {
        if self.len() != k {
            return Err(IspError::LabelLength {
                label: self.to_string(),
                expected: k,
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            f.write_str(match s {
                Symbol::E => "e",
                Symbol::F => "N",
            })?;
        }
        Ok(())
    }
}

impl FromStr for BasisLabel {
    type Err = IspError;

    /// Accepts `eNe` as well as the upper-case `ENE` / `EFE` spellings.
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                'e' | 'E' => Ok(Symbol::E),
                'N' | 'n' | 'F' | 'f' => Ok(Symbol::F),
                _ => Err(IspError::BadLabel(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if symbols.is_empty() {
            return Err(IspError::BadLabel(s.to_string()));
        }
        Ok(Self { symbols })
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All `2^k` labels in enumeration order.
pub fn enumerate_labels(k: usize) -> Result<Vec<BasisLabel>> {
    if k == 0 {
        return Err(IspError::ZeroLevels);
    }
    Ok((0..1usize << k)
        .map(|i| BasisLabel::from_index(i, k))
        .collect())
}

/// `(N - 1)^{#_N(s) / 2}`: amplitude `a` on the unnormalized state `|s>`
/// equals `a * weight` on the normalized state.
pub fn weight_of_label(label: &BasisLabel, size: u64) -> f64 {
    ((size - 1) as f64).powf(label.count_f() as f64 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> BasisLabel {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_order() {
        assert!(enumerate_labels(0).is_err());
        assert_eq!(enumerate_labels(1).unwrap(), vec![l("e"), l("N")]);
        assert_eq!(
            enumerate_labels(2).unwrap(),
            vec![l("ee"), l("eN"), l("Ne"), l("NN")]
        );
        let k3 = enumerate_labels(3).unwrap();
        assert_eq!(k3.len(), 8);
        assert_eq!(k3[0], BasisLabel::sink(3));
        assert_eq!(k3[7], BasisLabel::source(3));
        for (i, lab) in k3.iter().enumerate() {
            assert_eq!(lab.index(), i);
        }
    }

    #[test]
    fn weights() {
        let n = 64u64;
        assert_eq!(weight_of_label(&l("ee"), n), 1.0);
        assert!((weight_of_label(&l("eN"), n) - 63f64.sqrt()).abs() < 1e-12);
        assert!((weight_of_label(&l("NN"), n) - 63.0).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        assert_eq!(ProblemParams::new(0, 3), Err(IspError::ZeroLevels));
        assert!(ProblemParams::new(2, 0).is_err());
        assert!(ProblemParams::from_size(2, 6).is_err());
        let p = ProblemParams::from_size(3, 1024).unwrap();
        assert_eq!(p.n(), 10);
        assert_eq!(p.dim(), 8);
        assert_eq!(p.iterations(std::f64::consts::FRAC_PI_4), 25);
    }

    #[test]
    fn main_path_membership() {
        assert!(l("eeN").is_main_path());
        assert!(l("NNN").is_main_path());
        assert!(!l("Nee").is_main_path());
        assert_eq!(BasisLabel::main_path(1, 3), l("eNN"));
        assert_eq!(l("eNe").differing_positions(&l("NNe")), vec![1]);
    }

    #[test]
    fn parse_spellings() {
        assert_eq!(l("EFE"), l("eNe"));
        assert!("exN".parse::<BasisLabel>().is_err());
        assert!("".parse::<BasisLabel>().is_err());
    }
}
