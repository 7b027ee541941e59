//! Finite-alphabet probability tables and the information measures built on them.
//!
//! A [`JointPmf`] is a dense row-major table (last axis varies fastest) over a
//! list of named axes. Every information quantity in the crate is computed
//! from one of these tables: entropies of marginals, conditional mutual
//! informations, and the empirical types used by the typicality tests.
//!
//! All logarithms are base 2, so every quantity is in bits.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest allowed deviation of a table's total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Symbol set `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;

    fn try_from(size: usize) -> Result<Self> {
        Self::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    pub name: String,
    pub alphabet: Alphabet,
}

/// Joint probability mass function over named axes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    probs: Vec<f64>,
}

/// Robust-typicality tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypicalityParams {
    epsilon: f64,
}

impl TypicalityParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }
}

fn row_major_strides(axes: &[Axis]) -> Vec<usize> {
    let mut strides = vec![1; axes.len()];
    for i in (0..axes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * axes[i + 1].alphabet.size();
    }
    strides
}

fn build_axes<S: Into<String>>(axes: impl IntoIterator<Item = (S, Alphabet)>) -> Result<Vec<Axis>> {
    let axes: Vec<Axis> = axes
        .into_iter()
        .map(|(name, alphabet)| Axis {
            name: name.into(),
            alphabet,
        })
        .collect();
    let mut seen = HashSet::new();
    for axis in &axes {
        if !seen.insert(axis.name.as_str()) {
            return Err(Error::DuplicateAxis(axis.name.clone()));
        }
    }
    Ok(axes)
}

impl JointPmf {
    /// Validates and wraps a row-major table. The total mass must be within
    /// [`NORMALIZATION_TOLERANCE`] of 1; nothing is renormalized.
    pub fn new<S: Into<String>>(
        axes: impl IntoIterator<Item = (S, Alphabet)>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let axes = build_axes(axes)?;
        let expected: usize = axes.iter().map(|a| a.alphabet.size()).product();
        if probs.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: probs.len(),
            });
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::InvalidProbability { index, value });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        let strides = row_major_strides(&axes);
        Ok(Self {
            axes,
            strides,
            probs,
        })
    }

    /// Divides a nonnegative table by its total before validating it. For
    /// products of already-valid factors whose rounding drifts past the
    /// tolerance.
    pub(crate) fn normalized<S: Into<String>>(
        axes: impl IntoIterator<Item = (S, Alphabet)>,
        mut probs: Vec<f64>,
    ) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Self::new(axes, probs)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.alphabet.size()).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    /// Probability of one symbol tuple, given in axis order.
    pub fn get(&self, symbols: &[usize]) -> f64 {
        debug_assert_eq!(symbols.len(), self.axes.len());
        let flat: usize = symbols
            .iter()
            .zip(&self.strides)
            .map(|(s, st)| s * st)
            .sum();
        self.probs[flat]
    }

    fn resolve(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut seen = HashSet::new();
        let mut idx = Vec::with_capacity(names.len());
        for &name in names {
            if !seen.insert(name) {
                return Err(Error::DuplicateAxis(name.to_string()));
            }
            idx.push(self.axis_index(name)?);
        }
        Ok(idx)
    }

    /// Sums the table onto the axes at `keep` (positions, any order). The
    /// result lists the kept axes in their original order.
    fn marginal_table(&self, keep: &[usize]) -> (Vec<Axis>, Vec<f64>) {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        let kept: Vec<Axis> = keep.iter().map(|&i| self.axes[i].clone()).collect();
        let kept_strides = row_major_strides(&kept);
        let mut target_stride = vec![0usize; self.axes.len()];
        for (k, &i) in keep.iter().enumerate() {
            target_stride[i] = kept_strides[k];
        }
        let len: usize = kept.iter().map(|a| a.alphabet.size()).product();
        let mut out = vec![0.0; len];

        let shape = self.shape();
        let mut counter = vec![0usize; shape.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            // odometer over the source index, tracking the target index
            for ax in (0..shape.len()).rev() {
                counter[ax] += 1;
                target += target_stride[ax];
                if counter[ax] < shape[ax] {
                    break;
                }
                target -= target_stride[ax] * counter[ax];
                counter[ax] = 0;
            }
        }
        (kept, out)
    }

    /// Marginal distribution on `keep`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let idx = self.resolve(keep)?;
        let (axes, probs) = self.marginal_table(&idx);
        let axes = axes.into_iter().map(|a| (a.name, a.alphabet));
        JointPmf::normalized(axes, probs)
    }

    /// Entropy in bits of the marginal on `axes`. The empty set has entropy 0.
    pub fn entropy(&self, axes: &[&str]) -> Result<f64> {
        let idx = self.resolve(axes)?;
        Ok(self.entropy_of(&idx))
    }

    fn entropy_of(&self, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 0.0;
        }
        let (_, table) = self.marginal_table(idx);
        entropy_bits(&table)
    }

    /// Conditional mutual information I(A;B|C) in bits, clamped at 0.
    pub fn mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let ia = self.resolve(a)?;
        let ib = self.resolve(b)?;
        let ic = self.resolve(c)?;
        for (x, y) in [(&ia, &ib), (&ia, &ic), (&ib, &ic)] {
            if let Some(&shared) = x.iter().find(|i| y.contains(i)) {
                return Err(Error::OverlappingAxes(self.axes[shared].name.clone()));
            }
        }
        let ac: Vec<usize> = ia.iter().chain(&ic).copied().collect();
        let bc: Vec<usize> = ib.iter().chain(&ic).copied().collect();
        let abc: Vec<usize> = ia.iter().chain(&ib).chain(&ic).copied().collect();
        let value = self.entropy_of(&ac) + self.entropy_of(&bc)
            - self.entropy_of(&abc)
            - self.entropy_of(&ic);
        Ok(value.max(0.0))
    }
}

/// −Σ p log₂ p over the nonzero entries.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn check_sequences<S: Copy + Into<usize>>(axes: &[Axis], seqs: &[&[S]]) -> Result<usize> {
    if seqs.len() != axes.len() {
        return Err(Error::SequenceCount {
            expected: axes.len(),
            actual: seqs.len(),
        });
    }
    let n = seqs.first().map_or(0, |s| s.len());
    if let Some(bad) = seqs.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch {
            first: n,
            other: bad.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    Ok(n)
}

fn joint_counts<S: Copy + Into<usize>>(
    axes: &[Axis],
    seqs: &[&[S]],
    n: usize,
) -> Result<Vec<usize>> {
    let strides = row_major_strides(axes);
    let len: usize = axes.iter().map(|a| a.alphabet.size()).product();
    let mut counts = vec![0usize; len];
    for i in 0..n {
        let mut flat = 0;
        for (k, seq) in seqs.iter().enumerate() {
            let sym: usize = seq[i].into();
            let size = axes[k].alphabet.size();
            if sym >= size {
                return Err(Error::SymbolOutOfRange {
                    axis: axes[k].name.clone(),
                    symbol: sym,
                    size,
                });
            }
            flat += sym * strides[k];
        }
        counts[flat] += 1;
    }
    Ok(counts)
}

/// Joint type (frequency table) of aligned sequences, one per axis.
pub fn empirical_distribution<N, S>(axes: &[(N, Alphabet)], seqs: &[&[S]]) -> Result<JointPmf>
where
    N: AsRef<str>,
    S: Copy + Into<usize>,
{
    let axes = build_axes(axes.iter().map(|(n, a)| (n.as_ref().to_string(), *a)))?;
    let n = check_sequences(&axes, seqs)?;
    let counts = joint_counts(&axes, seqs, n)?;
    let probs = counts.iter().map(|&c| c as f64 / n as f64).collect();
    JointPmf::normalized(axes.into_iter().map(|a| (a.name, a.alphabet)), probs)
}

/// Robust typicality: every cell satisfies |π(a) − p(a)| ≤ ε·p(a), which in
/// particular forbids any occurrence of a zero-probability tuple.
///
/// Sequences are matched to the axes of `p` by position.
pub fn is_jointly_typical<S: Copy + Into<usize>>(
    seqs: &[&[S]],
    p: &JointPmf,
    params: TypicalityParams,
) -> Result<bool> {
    let n = check_sequences(&p.axes, seqs)?;
    let counts = joint_counts(&p.axes, seqs, n)?;
    let eps = params.epsilon();
    Ok(counts.iter().zip(&p.probs).all(|(&c, &q)| {
        let freq = c as f64 / n as f64;
        if q == 0.0 {
            c == 0
        } else {
            (freq - q).abs() <= eps * q
        }
    }))
}
