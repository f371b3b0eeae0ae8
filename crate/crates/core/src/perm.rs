//! Permutations of `S_n` in 0-based one-line form.
//!
//! Cycle notation (1-based, e.g. `(1 2)(3 4)`) is only used for text I/O.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate`]. Up to 8 is the supported regime.
pub const MAX_ENUMERATE: usize = 10;

/// A bijection on `0..n`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

/// Cycle statistics of a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleStats {
    /// Cycle lengths, sorted in decreasing order.
    pub cycle_lengths: Vec<usize>,
    pub num_cycles: usize,
    /// Minimal number of transpositions, `n - num_cycles`.
    pub transposition_distance: usize,
    pub parity: i8,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 1-based cycle notation such as `"(1 2)(3 4)"`.
    /// Points not mentioned are fixed. `"()"` or an empty string is the identity.
    pub fn from_cycles(text: &str, n: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected `(` in `{text}`")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in `{text}`")))?;
            let body = &open[..close];
            rest = open[close + 1..].trim_start();
            let points = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point `{s}` in `{text}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            for (k, &p) in points.iter().enumerate() {
                if p == 0 || p > n {
                    return Err(Error::Parse(format!("point {p} outside 1..={n}")));
                }
                if seen[p - 1] {
                    return Err(Error::Parse(format!("point {p} repeated in `{text}`")));
                }
                seen[p - 1] = true;
                let next = points[(k + 1) % points.len()];
                images[p - 1] = next - 1;
            }
        }
        Ok(Self { images })
    }

    /// The `n`-cycle sending slot `i` to slot `i + 1` (mod `n`).
    pub fn canonical_pi(n: usize) -> Self {
        Self {
            images: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    /// Cycles as lists of 0-based points, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles, including fixed points.
    pub fn num_cycles(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
            }
        }
        count
    }

    /// Cycle type as a partition of `n` in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lengths: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    pub fn cycle_stats(&self) -> CycleStats {
        let cycle_lengths = self.cycle_type();
        let num_cycles = cycle_lengths.len();
        let transposition_distance = self.len() - num_cycles;
        let parity = if transposition_distance.is_multiple_of(2) {
            1
        } else {
            -1
        };
        CycleStats {
            cycle_lengths,
            num_cycles,
            transposition_distance,
            parity,
        }
    }

    /// `|σ|`: the minimal number of transpositions whose product is `self`.
    pub fn transposition_distance(&self) -> usize {
        self.len() - self.num_cycles()
    }

    pub fn parity(&self) -> i8 {
        if self.transposition_distance().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// True iff every cycle has even length.
    pub fn is_even_cycle_only(&self) -> bool {
        self.cycles().iter().all(|c| c.len() % 2 == 0)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for c in nontrivial {
            let body: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// The `k`-th Catalan number.
pub fn catalan(k: usize) -> Result<u64> {
    // C_{i+1} = C_i * 2(2i+1) / (i+2), exact at every step.
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (2 * (2 * i as u128 + 1)) / (i as u128 + 2);
        if c > u64::MAX as u128 {
            return Err(Error::CatalanOverflow(k));
        }
    }
    Ok(c as u64)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All `n!` permutations of `S_n` in lexicographic order of their image lists.
pub fn enumerate(n: usize) -> Result<Lexicographic> {
    if n == 0 || n > MAX_ENUMERATE {
        return Err(Error::OutOfRange {
            n,
            min: 1,
            max: MAX_ENUMERATE,
        });
    }
    Ok(Lexicographic {
        next: Some((0..n).collect()),
    })
}

/// Iterator over `S_n` produced by [`enumerate`].
#[derive(Clone, Debug)]
pub struct Lexicographic {
    next: Option<Vec<usize>>,
}

impl Iterator for Lexicographic {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation { images: current })
    }
}

fn next_lexicographic(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All partitions of `n` in decreasing order, largest first (`[n]`, ..., `[1; n]`).
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// A permutation with the given cycle type, cycles laid out on consecutive points.
pub fn representative(cycle_type: &[usize]) -> Permutation {
    let n: usize = cycle_type.iter().sum();
    let mut images = vec![0; n];
    let mut start = 0;
    for &len in cycle_type {
        for k in 0..len {
            images[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    Permutation { images }
}
