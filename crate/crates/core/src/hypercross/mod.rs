//! Discrete model of dominating-mixed sequence spaces: dyadic index sets,
//! block enumeration, the b- and f-scale norms, truncation, and an empirical
//! probe for block embedding norms.
//!
//! The model fixes exactly `2^{nu_l}` positions per axis at level `nu_l`, so
//! a level `nu` (a d-tuple) carries `2^{|nu|_1}` indices and the block of all
//! levels with `|nu|_1 = mu` has dimension `C(mu+d-1, d-1) * 2^mu`. Each index
//! `(nu, m)` owns the half-open dyadic cell `prod_l [2^{-nu_l} m_l,
//! 2^{-nu_l}(m_l+1))` inside the unit cube; the f-scale norm integrates the
//! piecewise-constant function built from overlapping cells across levels.

mod norms;
mod probe;

pub use norms::{bnorm, fnorm};
pub use probe::{block_embedding_norm_probe, BlockProbe};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, CoreError, Result};

/// Index of one dyadic cell: a per-axis level vector and a per-axis position,
/// `pos[l] < 2^{level[l]}`. Ordering is lexicographic on (level, pos), which
/// fixes the iteration order of every coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HyperIndex {
    level: Vec<u32>,
    pos: Vec<u64>,
}

impl HyperIndex {
    pub fn new(level: Vec<u32>, pos: Vec<u64>) -> Result<HyperIndex> {
        if level.is_empty() {
            return Err(invalid("hyperbolic index needs dimension >= 1"));
        }
        if level.len() != pos.len() {
            return Err(invalid(format!(
                "level has {} axes but position has {}",
                level.len(),
                pos.len()
            )));
        }
        for (l, (&nu, &m)) in level.iter().zip(&pos).enumerate() {
            if nu >= 64 || m >= (1u64 << nu) {
                return Err(invalid(format!(
                    "position {m} out of range for level {nu} on axis {l}"
                )));
            }
        }
        Ok(HyperIndex { level, pos })
    }

    pub fn dim(&self) -> usize {
        self.level.len()
    }

    pub fn level(&self) -> &[u32] {
        &self.level
    }

    pub fn pos(&self) -> &[u64] {
        &self.pos
    }

    /// `|nu|_1`, the total level.
    pub fn total_level(&self) -> u32 {
        self.level.iter().sum()
    }
}

/// Finitely supported map from dyadic indices to complex coefficients.
/// Only nonzero values are stored; inserting zero deletes the key. All
/// operations treat the field as immutable input and allocate fresh output.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffField {
    dim: usize,
    entries: BTreeMap<HyperIndex, Complex64>,
}

impl CoeffField {
    pub fn new(dim: usize) -> Result<CoeffField> {
        if dim == 0 {
            return Err(invalid("coefficient field needs dimension >= 1"));
        }
        Ok(CoeffField {
            dim,
            entries: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert(&mut self, idx: HyperIndex, value: Complex64) -> Result<()> {
        if idx.dim() != self.dim {
            return Err(invalid(format!(
                "index has {} axes, field has {}",
                idx.dim(),
                self.dim
            )));
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(invalid("coefficient must be finite"));
        }
        if value == Complex64::new(0.0, 0.0) {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, value);
        }
        Ok(())
    }

    pub fn get(&self, idx: &HyperIndex) -> Complex64 {
        self.entries
            .get(idx)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Number of stored (nonzero) coefficients.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (&HyperIndex, &Complex64)> {
        self.entries.iter()
    }

    /// Largest total level in the support; 0 for the zero field.
    pub fn max_level(&self) -> u32 {
        self.entries
            .keys()
            .map(HyperIndex::total_level)
            .max()
            .unwrap_or(0)
    }

    /// Keeps exactly the entries with total level <= `j`.
    pub fn truncate(&self, j: u32) -> CoeffField {
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| k.total_level() <= j)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        CoeffField {
            dim: self.dim,
            entries,
        }
    }

    /// Pointwise difference `self - other`. Dimensions must agree.
    pub fn sub(&self, other: &CoeffField) -> Result<CoeffField> {
        if self.dim != other.dim {
            return Err(invalid(format!(
                "cannot subtract a {}-d field from a {}-d field",
                other.dim, self.dim
            )));
        }
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let next = out.get(k) - v;
            out.insert(k.clone(), next)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> CoeffField {
        if c == 0.0 || !c.is_finite() {
            return CoeffField {
                dim: self.dim,
                entries: BTreeMap::new(),
            };
        }
        CoeffField {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// One entry per line: `nu_1 .. nu_d m_1 .. m_d re im`, in index order.
    /// Floats use the shortest representation that parses back bit-exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            for nu in &k.level {
                let _ = write!(out, "{nu} ");
            }
            for m in &k.pos {
                let _ = write!(out, "{m} ");
            }
            let _ = writeln!(out, "{} {}", v.re, v.im);
        }
        out
    }

    /// Inverse of [`CoeffField::serialize`]. The dimension must be given
    /// because the empty field serializes to the empty string.
    pub fn parse(input: &str, dim: usize) -> Result<CoeffField> {
        let mut field = CoeffField::new(dim)?;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 * dim + 2 {
                return Err(invalid(format!(
                    "line {}: expected {} fields for a {}-d entry, got {}",
                    lineno + 1,
                    2 * dim + 2,
                    dim,
                    toks.len()
                )));
            }
            let bad = |what: &str| {
                invalid(format!("line {}: unparseable {what}: {line}", lineno + 1))
            };
            let mut level = Vec::with_capacity(dim);
            let mut pos = Vec::with_capacity(dim);
            for t in &toks[..dim] {
                level.push(t.parse::<u32>().map_err(|_| bad("level"))?);
            }
            for t in &toks[dim..2 * dim] {
                pos.push(t.parse::<u64>().map_err(|_| bad("position"))?);
            }
            let re: f64 = toks[2 * dim].parse().map_err(|_| bad("value"))?;
            let im: f64 = toks[2 * dim + 1].parse().map_err(|_| bad("value"))?;
            field.insert(HyperIndex::new(level, pos)?, Complex64::new(re, im))?;
        }
        Ok(field)
    }
}

/// All levels and the dimension count of one hyperbolic block.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    pub mu: u32,
    pub dim: usize,
    /// Compositions of `mu` into `dim` parts, lexicographic.
    pub levels: Vec<Vec<u32>>,
    /// `C(mu+d-1, d-1) * 2^mu`, the number of indices in the block.
    pub d_mu: u64,
}

impl BlockLayout {
    /// Every index of the block, level-lexicographic then position order.
    /// Lazy: the block dimension can be far larger than the level count.
    pub fn indices(&self) -> impl Iterator<Item = HyperIndex> + '_ {
        self.levels.iter().flat_map(|level| {
            let radices: Vec<u64> = level.iter().map(|nu| 1u64 << nu).collect();
            LevelPositions::new(level.clone(), radices)
        })
    }
}

struct LevelPositions {
    level: Vec<u32>,
    radices: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl LevelPositions {
    fn new(level: Vec<u32>, radices: Vec<u64>) -> LevelPositions {
        let next = Some(vec![0; radices.len()]);
        LevelPositions {
            level,
            radices,
            next,
        }
    }
}

impl Iterator for LevelPositions {
    type Item = HyperIndex;

    fn next(&mut self) -> Option<HyperIndex> {
        let pos = self.next.take()?;
        let out = HyperIndex {
            level: self.level.clone(),
            pos: pos.clone(),
        };
        // Odometer increment, last axis fastest.
        let mut pos = pos;
        for ax in (0..pos.len()).rev() {
            pos[ax] += 1;
            if pos[ax] < self.radices[ax] {
                self.next = Some(pos);
                return Some(out);
            }
            pos[ax] = 0;
        }
        Some(out)
    }
}

/// Caps the level list of a block at a size that still fits in memory.
const LEVEL_COUNT_CAP: u128 = 4_000_000;

/// Enumerates the block of all levels with `|nu|_1 = mu` in `d` axes.
pub fn enumerate_block(mu: u32, d: u32) -> Result<BlockLayout> {
    if d == 0 {
        return Err(invalid("dimension d must be >= 1"));
    }
    let count = binomial(mu as u128 + d as u128 - 1, d as u128 - 1)
        .filter(|c| *c <= LEVEL_COUNT_CAP)
        .ok_or_else(|| too_large(mu, d))?;
    let d_mu = (mu < 64)
        .then(|| count.checked_mul(1u128 << mu))
        .flatten()
        .and_then(|v| u64::try_from(v).ok())
        .ok_or_else(|| too_large(mu, d))?;

    let dd = d as usize;
    let mut levels = Vec::with_capacity(count as usize);
    let mut cur = vec![0u32; dd];
    cur[dd - 1] = mu;
    loop {
        levels.push(cur.clone());
        // Lexicographic successor: bump the last prefix slot that still has
        // mass to its right, then pack the remainder into the final axis.
        let Some(j) = (0..dd - 1).rev().find(|&j| cur[j + 1..].iter().any(|v| *v > 0))
        else {
            break;
        };
        let moved: u32 = cur[j + 1..].iter().sum();
        cur[j] += 1;
        for v in &mut cur[j + 1..] {
            *v = 0;
        }
        cur[dd - 1] = moved - 1;
    }
    debug_assert_eq!(levels.len(), count as usize);
    Ok(BlockLayout {
        mu,
        dim: dd,
        levels,
        d_mu,
    })
}

fn too_large(mu: u32, d: u32) -> CoreError {
    CoreError::guard(format!("block too large: mu={mu}, d={d} overflows the 64-bit layout"))
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)?;
        acc /= i + 1;
    }
    Some(acc)
}
