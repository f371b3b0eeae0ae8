//! Cobweb diagrams: a boundary ring of `2E` vertices with `E` interior chords.
//!
//! Boundary segment `s` runs from vertex `s` to vertex `s + 1 (mod 2E)`. Each
//! chord identifies the index lines on both of its sides, so the index loops
//! are the cycles of `s ↦ partner(s + 1)`. The empty ring is one loop.
//!
//! In the four-arc layout the ring is split into arcs of `T` vertices each:
//! `[0, T)` is leg `1` (red), `[T, 2T)` leg `2̄` (blue), `[2T, 3T)` leg `2`
//! (red), `[3T, 4T)` leg `1̄` (blue). Arc vertices are ordered along the
//! contour, so step `k` of a plain leg sits at offset `k` and step `k` of a
//! barred leg at offset `T − 1 − k`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_LEADING_T: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CobwebDiagram {
    partner: Vec<usize>,
    /// Vertices per arc in the four-arc layout.
    arc_len: Option<usize>,
    /// Boundary segments carrying a traceless involutory mark, sorted.
    decorations: Vec<usize>,
}

/// Chord counts between legs of a four-arc diagram.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LegCounts {
    pub one_onebar: usize,
    pub two_twobar: usize,
    pub one_twobar: usize,
    pub two_onebar: usize,
}

impl CobwebDiagram {
    /// Diagram from a chord list on `n_vertices` ring vertices.
    pub fn from_chords(n_vertices: usize, chords: &[(usize, usize)]) -> Result<Self> {
        if !n_vertices.is_multiple_of(2) {
            return Err(Error::InvalidDiagram(format!(
                "{n_vertices} vertices is odd"
            )));
        }
        if chords.len() * 2 != n_vertices {
            return Err(Error::InvalidDiagram(format!(
                "{} chords on {n_vertices} vertices",
                chords.len()
            )));
        }
        let mut partner = vec![usize::MAX; n_vertices];
        for &(a, b) in chords {
            if a >= n_vertices || b >= n_vertices || a == b {
                return Err(Error::InvalidDiagram(format!("bad chord {a}-{b}")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidDiagram(format!("vertex reused by {a}-{b}")));
            }
            partner[a] = b;
            partner[b] = a;
        }
        Ok(Self {
            partner,
            arc_len: None,
            decorations: Vec::new(),
        })
    }

    pub fn from_partner(partner: Vec<usize>) -> Result<Self> {
        let n = partner.len();
        let chords: Vec<_> = (0..n)
            .filter(|&v| v < partner[v])
            .map(|v| (v, partner[v]))
            .collect();
        let d = Self::from_chords(n, &chords)?;
        if d.partner != partner {
            return Err(Error::InvalidDiagram(
                "partner map is not an involution".into(),
            ));
        }
        Ok(d)
    }

    pub fn empty() -> Self {
        Self {
            partner: Vec::new(),
            arc_len: None,
            decorations: Vec::new(),
        }
    }

    /// Four-arc layout with `arc_len` vertices per arc; chords must join red
    /// and blue arcs.
    pub fn with_arcs(mut self, arc_len: usize) -> Result<Self> {
        if arc_len == 0 || self.n_vertices() != 4 * arc_len {
            return Err(Error::InvalidDiagram(format!(
                "{} vertices do not form four arcs of {arc_len}",
                self.n_vertices()
            )));
        }
        for (a, b) in self.chords() {
            if (a / arc_len) % 2 == (b / arc_len) % 2 {
                return Err(Error::InvalidDiagram(format!(
                    "chord {a}-{b} joins same-colored arcs"
                )));
            }
        }
        self.arc_len = Some(arc_len);
        Ok(self)
    }

    pub fn with_decorations(mut self, segments: &[usize]) -> Result<Self> {
        let n = self.n_vertices();
        let set: BTreeSet<usize> = segments.iter().copied().collect();
        if set.len() != segments.len() || set.iter().any(|&s| s >= n.max(1)) {
            return Err(Error::InvalidDiagram("bad decoration segments".into()));
        }
        self.decorations = set.into_iter().collect();
        Ok(self)
    }

    /// Marks on the four arc interfaces.
    pub fn with_interface_marks(self) -> Result<Self> {
        let t = self
            .arc_len
            .ok_or_else(|| Error::InvalidDiagram("interface marks need arcs".into()))?;
        self.with_decorations(&[t - 1, 2 * t - 1, 3 * t - 1, 4 * t - 1])
    }

    pub fn n_vertices(&self) -> usize {
        self.partner.len()
    }

    pub fn n_chords(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn partner(&self, v: usize) -> usize {
        self.partner[v]
    }

    pub fn arc_len(&self) -> Option<usize> {
        self.arc_len
    }

    pub fn decorations(&self) -> &[usize] {
        &self.decorations
    }

    /// Chords `(a, b)` with `a < b`, ordered by `a`.
    pub fn chords(&self) -> Vec<(usize, usize)> {
        (0..self.n_vertices())
            .filter(|&v| v < self.partner[v])
            .map(|v| (v, self.partner[v]))
            .collect()
    }

    fn loops(&self) -> Vec<Vec<usize>> {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = s;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.partner[(cur + 1) % n];
            }
            out.push(cycle);
        }
        out
    }

    /// Index-loop count `N`.
    pub fn count_loops(&self) -> usize {
        if self.partner.is_empty() {
            1
        } else {
            self.loops().len()
        }
    }

    /// Whether some loop carries an odd number of marks (a lone trace of a
    /// traceless operator).
    pub fn vanishes(&self) -> bool {
        if self.partner.is_empty() {
            return self.decorations.len() % 2 == 1;
        }
        let mut marked = vec![false; self.n_vertices()];
        for &s in &self.decorations {
            marked[s] = true;
        }
        self.loops()
            .iter()
            .any(|l| l.iter().filter(|&&s| marked[s]).count() % 2 == 1)
    }

    /// Number of interleaved chord pairs.
    pub fn crossings(&self) -> usize {
        let chords = self.chords();
        let mut count = 0;
        for (i, &(a, b)) in chords.iter().enumerate() {
            for &(c, d) in &chords[i + 1..] {
                let c_in = a < c && c < b;
                let d_in = a < d && d < b;
                if c_in != d_in {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn is_planar(&self) -> bool {
        self.crossings() == 0
    }

    /// `q^N`.
    pub fn value(&self, q: u64) -> Result<u128> {
        (q as u128)
            .checked_pow(self.count_loops() as u32)
            .ok_or_else(|| Error::Overflow(format!("{q}^{}", self.count_loops())))
    }

    /// Chord counts by leg pair; `None` without the four-arc layout.
    pub fn leg_counts(&self) -> Option<LegCounts> {
        let t = self.arc_len?;
        let mut c = LegCounts::default();
        for (a, b) in self.chords() {
            match (a / t, b / t) {
                (0, 3) => c.one_onebar += 1,
                (1, 2) => c.two_twobar += 1,
                (0, 1) => c.one_twobar += 1,
                (2, 3) => c.two_onebar += 1,
                _ => unreachable!("arcs are validated"),
            }
        }
        Some(c)
    }

    /// All applicable reduction moves.
    fn moves(&self) -> Vec<Move> {
        let n = self.n_vertices();
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        for v in 0..n {
            if self.partner[v] == (v + 1) % n {
                out.push(Move::Bubble(v));
            }
        }
        if n >= 4 {
            for a in 0..n {
                let b = self.partner[a];
                let a1 = (a + 1) % n;
                let b1 = (b + n - 1) % n;
                if a1 != b && self.partner[a1] == b1 {
                    out.push(Move::Parallel(a1));
                }
            }
        }
        out
    }

    /// Diagram with the chord through `v` removed and vertices relabeled;
    /// layout and marks are dropped.
    fn without_chord(&self, v: usize) -> Self {
        let w = self.partner[v];
        let n = self.n_vertices();
        let relabel = |x: usize| x - usize::from(x > v) - usize::from(x > w);
        let partner = (0..n)
            .filter(|&x| x != v && x != w)
            .map(|x| relabel(self.partner[x]))
            .collect();
        Self {
            partner,
            arc_len: None,
            decorations: Vec::new(),
        }
    }

    /// Exhaustive reduction, always taking the first applicable move.
    pub fn reduce(&self) -> ReductionReport {
        self.reduce_by(|moves| moves[0])
    }

    /// Exhaustive reduction with moves picked at random.
    pub fn reduce_random<R: Rng + ?Sized>(&self, rng: &mut R) -> ReductionReport {
        self.reduce_by(|moves| moves[rng.random_range(0..moves.len())])
    }

    fn reduce_by(&self, mut pick: impl FnMut(&[Move]) -> Move) -> ReductionReport {
        let mut current = self.clone();
        current.arc_len = None;
        current.decorations.clear();
        let mut steps = Vec::new();
        let (mut parallel, mut bubble) = (0, 0);
        loop {
            let moves = current.moves();
            if moves.is_empty() {
                break;
            }
            let m = pick(&moves);
            let v = match m {
                Move::Bubble(v) => {
                    bubble += 1;
                    v
                }
                Move::Parallel(v) => {
                    parallel += 1;
                    v
                }
            };
            let next = current.without_chord(v);
            steps.push(ReductionStep {
                rule: m.rule(),
                chord: (v.min(current.partner[v]), v.max(current.partner[v])),
                result: next.clone(),
            });
            current = next;
        }
        ReductionReport {
            reduced: current,
            removed_parallel: parallel,
            removed_bubble: bubble,
            loop_credits: parallel + bubble,
            steps,
        }
    }
}

impl fmt::Display for CobwebDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chords: Vec<String> = self
            .chords()
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        write!(f, "{}; {}", self.n_vertices(), chords.join(", "))?;
        if let Some(t) = self.arc_len {
            write!(f, "; colors: {t}")?;
        }
        if !self.decorations.is_empty() {
            let marks: Vec<String> = self.decorations.iter().map(ToString::to_string).collect();
            write!(f, "; marks: {}", marks.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for CobwebDiagram {
    type Err = Error;

    /// `"2E; a-b, c-d, ..."` with optional `; colors: T` and `; marks: s,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidDiagram(format!("{m} in `{s}`"));
        let mut parts = s.split(';').map(str::trim);
        let n: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad("missing vertex count"))?;
        let mut chords = Vec::new();
        let mut arcs = None;
        let mut marks = Vec::new();
        for part in parts {
            if let Some(t) = part.strip_prefix("colors:") {
                arcs = Some(t.trim().parse::<usize>().map_err(|_| bad("bad colors"))?);
            } else if let Some(m) = part.strip_prefix("marks:") {
                for tok in m.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    marks.push(tok.parse::<usize>().map_err(|_| bad("bad mark"))?);
                }
            } else {
                for tok in part.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    let (a, b) = tok.split_once('-').ok_or_else(|| bad("bad chord"))?;
                    let a = a.trim().parse().map_err(|_| bad("bad chord"))?;
                    let b = b.trim().parse().map_err(|_| bad("bad chord"))?;
                    chords.push((a, b));
                }
            }
        }
        let mut d = Self::from_chords(n, &chords)?;
        if let Some(t) = arcs {
            d = d.with_arcs(t)?;
        }
        d.with_decorations(&marks)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Move {
    Bubble(usize),
    /// Removes the chord through the given vertex, parallel to its neighbor.
    Parallel(usize),
}

impl Move {
    fn rule(self) -> Rule {
        match self {
            Move::Bubble(_) => Rule::Bubble,
            Move::Parallel(_) => Rule::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Parallel,
    Bubble,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    /// Removed chord, in the labels of the diagram before the step.
    pub chord: (usize, usize),
    pub result: CobwebDiagram,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub reduced: CobwebDiagram,
    pub removed_parallel: usize,
    pub removed_bubble: usize,
    /// One index loop per removed chord.
    pub loop_credits: usize,
    pub steps: Vec<ReductionStep>,
}

impl ReductionReport {
    /// `E′`.
    pub fn reduced_chords(&self) -> usize {
        self.reduced.n_chords()
    }

    /// Step log, one line per removal.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            let rule = match s.rule {
                Rule::Parallel => "parallel",
                Rule::Bubble => "bubble",
            };
            out.push_str(&format!(
                "step {}: {rule} removes {}-{} -> {}\n",
                i + 1,
                s.chord.0,
                s.chord.1,
                s.result
            ));
        }
        out
    }
}

/// All perfect matchings on `2e` vertices, `(2e − 1)!!` of them.
pub fn all_matchings(e: usize) -> Vec<CobwebDiagram> {
    fn rec(partner: &mut Vec<usize>, out: &mut Vec<CobwebDiagram>) {
        let Some(a) = partner.iter().position(|&p| p == usize::MAX) else {
            out.push(CobwebDiagram {
                partner: partner.clone(),
                arc_len: None,
                decorations: Vec::new(),
            });
            return;
        };
        for b in a + 1..partner.len() {
            if partner[b] == usize::MAX {
                partner[a] = b;
                partner[b] = a;
                rec(partner, out);
                partner[a] = usize::MAX;
                partner[b] = usize::MAX;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![usize::MAX; 2 * e], &mut out);
    out
}

/// Uniformly random perfect matching on `2e` vertices.
pub fn random_diagram<R: Rng + ?Sized>(e: usize, rng: &mut R) -> CobwebDiagram {
    let mut v: Vec<usize> = (0..2 * e).collect();
    v.shuffle(rng);
    let chords: Vec<_> = v.chunks(2).map(|c| (c[0], c[1])).collect();
    CobwebDiagram::from_chords(2 * e, &chords).expect("shuffled pairs form a matching")
}

fn check_leading_range(t: usize) -> Result<()> {
    if (2..=MAX_LEADING_T).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            n: t,
            min: 2,
            max: MAX_LEADING_T,
        })
    }
}

/// Nonvanishing four-arc matchings with interface marks reaching the maximal
/// loop count `2T − 1`, sorted.
pub fn enumerate_leading(t: usize) -> Result<Vec<CobwebDiagram>> {
    check_leading_range(t)?;
    let red: Vec<usize> = (0..t).chain(2 * t..3 * t).collect();
    let blue: Vec<usize> = (t..2 * t).chain(3 * t..4 * t).collect();
    let target = 2 * t - 1;
    let mut found: Vec<CobwebDiagram> = (0..blue.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut rest: Vec<usize> = blue.clone();
            let b0 = rest.remove(first);
            let mut partner = vec![usize::MAX; 4 * t];
            partner[red[0]] = b0;
            partner[b0] = red[0];
            let mut out = Vec::new();
            assign(&red[1..], &mut rest, &mut partner, &mut |p| {
                let d = CobwebDiagram {
                    partner: p.to_vec(),
                    arc_len: Some(t),
                    decorations: vec![t - 1, 2 * t - 1, 3 * t - 1, 4 * t - 1],
                };
                if d.count_loops() == target && !d.vanishes() {
                    out.push(d);
                }
            });
            out
        })
        .collect();
    found.sort();
    Ok(found)
}

/// Visits every bijection of `reds` onto `blues`.
fn assign(
    reds: &[usize],
    blues: &mut Vec<usize>,
    partner: &mut [usize],
    visit: &mut impl FnMut(&[usize]),
) {
    let Some((&r, rest)) = reds.split_first() else {
        visit(partner);
        return;
    };
    for i in 0..blues.len() {
        let b = blues.remove(i);
        partner[r] = b;
        partner[b] = r;
        assign(rest, blues, partner, visit);
        blues.insert(i, b);
    }
}

/// The ladder diagram in which the first `n_cross` time steps pair each plain
/// leg with the other copy's barred leg (`1–2̄`, `2–1̄`) and the remaining steps
/// pair it with its own barred leg (`1–1̄`, `2–2̄`).
pub fn ladder(t: usize, n_cross: usize) -> Result<CobwebDiagram> {
    if t == 0 || n_cross > t {
        return Err(Error::OutOfRange {
            n: n_cross,
            min: 0,
            max: t,
        });
    }
    let one = |k: usize| k;
    let twobar = |k: usize| t + (t - 1 - k);
    let two = |k: usize| 2 * t + k;
    let onebar = |k: usize| 3 * t + (t - 1 - k);
    let chords: Vec<(usize, usize)> = (0..t)
        .flat_map(|k| {
            if k < n_cross {
                [(one(k), twobar(k)), (two(k), onebar(k))]
            } else {
                [(one(k), onebar(k)), (two(k), twobar(k))]
            }
        })
        .collect();
    CobwebDiagram::from_chords(4 * t, &chords)?
        .with_arcs(t)?
        .with_interface_marks()
}

/// Ladders with `1 ≤ n_cross ≤ T − 1`, sorted.
pub fn ladder_family(t: usize) -> Result<Vec<CobwebDiagram>> {
    check_leading_range(t)?;
    let mut v = (1..t).map(|n| ladder(t, n)).collect::<Result<Vec<_>>>()?;
    v.sort();
    Ok(v)
}
