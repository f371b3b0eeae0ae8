//! Physical OTOCs `(1/q) Tr[Z A Z(T) B† Z C Z(T) D†]` and their leading-order
//! evaluation in the two-dimensional space of pair wirings.
//!
//! Legs of a layer, in forward time orientation:
//!
//! | leg | product | carries        |
//! |-----|---------|----------------|
//! | `1` | `A`     | `O`            |
//! | `1̄` | `D`     | `conj(O)`      |
//! | `2` | `C`     | `O`            |
//! | `2̄` | `B`     | `conj(O)`      |
//!
//! `|+⟩` joins `(1, 1̄)` and `(2, 2̄)`, `|−⟩` joins `(1, 2̄)` and `(2, 1̄)`, each
//! with a `1/q` normalization, so `⟨±|±⟩ = 1` and `⟨+|−⟩ = 1/q`. The time-0
//! boundary is `⟨Z_+|` (the `+` wiring with `Z` on both wires) and the time-`T`
//! boundary is `|Z(T)_−⟩`.
//!
//! The projector onto `span{|+⟩, |−⟩}` is realized through the inverse Gram
//! matrix: `K = Σ_{ab} |a⟩ (G⁻¹)_{ab} ⟨b|`. Written with the prefactor
//! `1/(1 − q²)` in front of `|+⟩⟨0| + |−⟩⟨⊥|` it would send `|+⟩` to
//! `−|+⟩/q²`; the dual-basis prefactor is `1/(1 − q⁻²)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::haar_mc::{self, HaarEstimate};
use crate::linalg::{self, CMatrix, ONE, ZERO};
use crate::oracle::{self, Atom, MomentExpression, TraceWord};

pub type C2 = Matrix2<Complex64>;
pub type V2 = Vector2<Complex64>;

const PLUS: usize = 0;
const MINUS: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leg {
    One,
    OneBar,
    Two,
    TwoBar,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::One, Leg::OneBar, Leg::Two, Leg::TwoBar];

    fn index(self) -> usize {
        self as usize
    }

    fn is_barred(self) -> bool {
        matches!(self, Leg::OneBar | Leg::TwoBar)
    }

    fn label(self) -> &'static str {
        match self {
            Leg::One => "1",
            Leg::OneBar => "1b",
            Leg::Two => "2",
            Leg::TwoBar => "2b",
        }
    }
}

impl FromStr for Leg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Leg::One),
            "1b" => Ok(Leg::OneBar),
            "2" => Ok(Leg::Two),
            "2b" => Ok(Leg::TwoBar),
            other => Err(Error::InvalidLayer(format!("unknown leg `{other}`"))),
        }
    }
}

/// Operator insertions of one time layer; absent legs carry the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayerSpec {
    pub insertions: BTreeMap<Leg, String>,
}

impl LayerSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `Z` on each of `legs`.
    pub fn z_on(legs: &[Leg]) -> Self {
        Self {
            insertions: legs.iter().map(|&l| (l, "Z".to_string())).collect(),
        }
    }

    pub fn with(mut self, leg: Leg, op: impl Into<String>) -> Self {
        self.insertions.insert(leg, op.into());
        self
    }
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.insertions.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self
            .insertions
            .iter()
            .map(|(leg, op)| {
                if op == "Z" {
                    leg.label().to_string()
                } else {
                    format!("{}={op}", leg.label())
                }
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses `"1,1b;2,2b"`: layers separated by `;`, legs by `,`. A leg may name
/// its operator as `1=O` (default `Z`); `-` is an empty layer and the empty
/// string means no layers (`T = 1`).
pub fn parse_layers(s: &str) -> Result<Vec<LayerSpec>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|layer| {
            let layer = layer.trim();
            let mut spec = LayerSpec::empty();
            if layer == "-" || layer.is_empty() {
                return Ok(spec);
            }
            for tok in layer.split(',') {
                let (leg, op) = match tok.split_once('=') {
                    Some((l, o)) => (l.parse::<Leg>()?, o.trim().to_string()),
                    None => (tok.parse::<Leg>()?, "Z".to_string()),
                };
                if op.is_empty() {
                    return Err(Error::InvalidLayer(format!("empty operator in `{tok}`")));
                }
                if spec.insertions.insert(leg, op).is_some() {
                    return Err(Error::InvalidLayer(format!("leg repeated in `{layer}`")));
                }
            }
            Ok(spec)
        })
        .collect()
}

pub fn format_layers(layers: &[LayerSpec]) -> String {
    layers
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// `[[1, 1/q], [1/q, 1]]`.
pub fn pair_gram(q: usize) -> Matrix2<f64> {
    let c = 1.0 / q as f64;
    Matrix2::new(1.0, c, c, 1.0)
}

/// The projector onto `span{|+⟩, |−⟩}`, acting on overlap vectors.
#[derive(Clone, Copy, Debug)]
pub struct PairProjector {
    gram: C2,
    gram_inv: C2,
}

impl PairProjector {
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::DimensionTooSmall { q, min: 2 });
        }
        let gram = pair_gram(q).map(Complex64::from);
        let gram_inv = gram
            .try_inverse()
            .ok_or(Error::DimensionTooSmall { q, min: 2 })?;
        Ok(Self { gram, gram_inv })
    }

    /// Coefficients `(c_+, c_−)` of `K|v⟩` given the overlaps `(⟨+|v⟩, ⟨−|v⟩)`.
    pub fn coefficients(&self, overlaps: V2) -> V2 {
        self.gram_inv * overlaps
    }

    /// Matrix of `K` on coefficient vectors of the pair subspace (`G⁻¹ G`).
    pub fn matrix(&self) -> C2 {
        self.gram_inv * self.gram
    }

    pub fn gram_inverse(&self) -> C2 {
        self.gram_inv
    }
}

pub fn projector_k(q: usize) -> Result<PairProjector> {
    PairProjector::new(q)
}

/// A cut through the four legs: two wires, each joining two leg ends, with an
/// optional matrix read from the first leg towards the second.
#[derive(Clone, Debug)]
struct Cut {
    wires: [(Leg, Leg, Option<CMatrix>); 2],
}

impl Cut {
    fn pair(state: usize) -> Self {
        match state {
            PLUS => Cut {
                wires: [(Leg::One, Leg::OneBar, None), (Leg::Two, Leg::TwoBar, None)],
            },
            _ => Cut {
                wires: [(Leg::One, Leg::TwoBar, None), (Leg::Two, Leg::OneBar, None)],
            },
        }
    }

    /// `⟨Z_+|`: `Z` on each wire, read from the barred leg to the plain leg.
    fn z_plus(z: &CMatrix) -> Self {
        Cut {
            wires: [
                (Leg::OneBar, Leg::One, Some(z.clone())),
                (Leg::TwoBar, Leg::Two, Some(z.clone())),
            ],
        }
    }

    /// `|Z(T)_−⟩`: `Z` on each wire, read from the plain leg to the barred leg.
    fn z_minus(z: &CMatrix) -> Self {
        Cut {
            wires: [
                (Leg::One, Leg::TwoBar, Some(z.clone())),
                (Leg::Two, Leg::OneBar, Some(z.clone())),
            ],
        }
    }

    /// Partner leg and the matrix met when entering the wire from `leg`.
    fn cross(&self, leg: Leg) -> (Leg, Option<CMatrix>) {
        for (a, b, w) in &self.wires {
            if *a == leg {
                return (*b, w.clone());
            }
            if *b == leg {
                return (*a, w.as_ref().map(|m| m.transpose()));
            }
        }
        unreachable!("every leg is on a wire")
    }
}

/// Overlap `⟨left| Γ |right⟩` with `1/q` per boundary state.
fn sandwich(left: &Cut, legs: &[CMatrix; 4], right: &Cut, q: usize) -> Complex64 {
    let mut done = [false; 4];
    let mut value = ONE;
    for start in Leg::ALL {
        if done[start.index()] {
            continue;
        }
        let mut acc = CMatrix::identity(q, q);
        let mut leg = start;
        loop {
            // Rightwards along `leg`, across the right cut, leftwards along its partner.
            done[leg.index()] = true;
            acc *= &legs[leg.index()];
            let (back, w) = right.cross(leg);
            if let Some(w) = w {
                acc *= w;
            }
            done[back.index()] = true;
            acc *= legs[back.index()].transpose();
            let (next, w) = left.cross(back);
            if let Some(w) = w {
                acc *= w;
            }
            leg = next;
            if leg == start {
                break;
            }
        }
        value *= linalg::trace(&acc);
    }
    value / (q * q) as f64
}

/// Leading-order and exact evaluators for physical OTOCs at dimension `q`.
#[derive(Clone, Debug)]
pub struct OtocSystem {
    pub q: usize,
    pub z: CMatrix,
    pub operators: BTreeMap<String, CMatrix>,
}

impl OtocSystem {
    pub fn new(q: usize, z: CMatrix) -> Result<Self> {
        if q < 2 {
            return Err(Error::DimensionTooSmall { q, min: 2 });
        }
        if z.nrows() != q || z.ncols() != q {
            return Err(Error::OperatorShape {
                name: "Z".into(),
                rows: z.nrows(),
                cols: z.ncols(),
                q,
            });
        }
        let operators = BTreeMap::from([("Z".to_string(), z.clone())]);
        Ok(Self { q, z, operators })
    }

    /// System with the default diagonal `Z`.
    pub fn with_default_z(q: usize) -> Result<Self> {
        Self::new(q, linalg::default_z(q)?)
    }

    pub fn with_operator(mut self, name: impl Into<String>, m: CMatrix) -> Result<Self> {
        let name = name.into();
        if m.nrows() != self.q || m.ncols() != self.q {
            return Err(Error::OperatorShape {
                name,
                rows: m.nrows(),
                cols: m.ncols(),
                q: self.q,
            });
        }
        self.operators.insert(name, m);
        Ok(self)
    }

    fn op(&self, name: &str) -> Result<&CMatrix> {
        self.operators
            .get(name)
            .ok_or_else(|| Error::UnknownOperator(name.to_string()))
    }

    fn leg_matrices(&self, layer: &LayerSpec) -> Result<[CMatrix; 4]> {
        let mut legs: [CMatrix; 4] = std::array::from_fn(|_| CMatrix::identity(self.q, self.q));
        for (leg, name) in &layer.insertions {
            let m = self.op(name)?;
            legs[leg.index()] = if leg.is_barred() {
                m.conjugate()
            } else {
                m.clone()
            };
        }
        Ok(legs)
    }

    fn identity_legs(&self) -> [CMatrix; 4] {
        std::array::from_fn(|_| CMatrix::identity(self.q, self.q))
    }

    /// Matrix elements `⟨a|Γ|b⟩`, `a, b ∈ {+, −}` (index 0 is `+`).
    pub fn layer_matrix(&self, layer: &LayerSpec) -> Result<C2> {
        let legs = self.leg_matrices(layer)?;
        let mut m = C2::zeros();
        for a in [PLUS, MINUS] {
            for b in [PLUS, MINUS] {
                m[(a, b)] = sandwich(&Cut::pair(a), &legs, &Cut::pair(b), self.q);
            }
        }
        Ok(m)
    }

    /// `(⟨Z_+|+⟩, ⟨Z_+|−⟩)`.
    pub fn left_boundary(&self) -> V2 {
        let legs = self.identity_legs();
        let left = Cut::z_plus(&self.z);
        V2::new(
            sandwich(&left, &legs, &Cut::pair(PLUS), self.q),
            sandwich(&left, &legs, &Cut::pair(MINUS), self.q),
        )
    }

    /// `(⟨+|Z(T)_−⟩, ⟨−|Z(T)_−⟩)`.
    pub fn right_boundary(&self) -> V2 {
        let legs = self.identity_legs();
        let right = Cut::z_minus(&self.z);
        V2::new(
            sandwich(&Cut::pair(PLUS), &legs, &right, self.q),
            sandwich(&Cut::pair(MINUS), &legs, &right, self.q),
        )
    }

    /// `q ⟨Z_+| K Γ(1) K ⋯ K Γ(T−1) K |Z(T)_−⟩`.
    pub fn theorem4_value(&self, layers: &[LayerSpec]) -> Result<Complex64> {
        let k = PairProjector::new(self.q)?.gram_inverse();
        let mut row = self.left_boundary().transpose() * k;
        for layer in layers {
            row = row * self.layer_matrix(layer)? * k;
        }
        Ok((row * self.right_boundary())[(0, 0)] * self.q as f64)
    }

    /// The two ladder sums `(⟨OTOC⟩_+, ⟨OTOC⟩_−)`; the leading-order average
    /// is their difference.
    pub fn otoc_plus_minus(&self, layers: &[LayerSpec]) -> Result<(Complex64, Complex64)> {
        let mats = layers
            .iter()
            .map(|l| self.layer_matrix(l))
            .collect::<Result<Vec<_>>>()?;
        let q = self.q as f64;
        let mm = |t: usize| mats[t][(MINUS, MINUS)];
        let pp = |t: usize| mats[t][(PLUS, PLUS)];
        let n = mats.len();
        let mut plus = ZERO;
        // Layer m (1-based) carries the − → + transition.
        for m in 1..=n {
            let mut term = mats[m - 1][(MINUS, PLUS)] * q;
            for t in 0..m - 1 {
                term *= mm(t);
            }
            for t in m..n {
                term *= pp(t);
            }
            plus += term;
        }
        let mut minus = ZERO;
        // The first m layers sit in |−⟩, the rest in |+⟩.
        for m in 0..=n {
            let mut term = ONE;
            for t in 0..m {
                term *= mm(t);
            }
            for t in m..n {
                term *= pp(t);
            }
            minus += term;
        }
        Ok((plus / (q * q), minus / (q * q)))
    }

    /// The full OTOC as a trace expression in `U`.
    pub fn expression(&self, layers: &[LayerSpec]) -> Result<MomentExpression> {
        let t_end = layers.len() as i64 + 1;
        for layer in layers {
            for name in layer.insertions.values() {
                self.op(name)?;
            }
        }
        let at = |leg: Leg, j: usize| layers[j].insertions.get(&leg).cloned();
        // (time, operator, adjointed) around the contour.
        let mut contour: Vec<(i64, String, bool)> = vec![(0, "Z".into(), false)];
        for j in 0..layers.len() {
            if let Some(op) = at(Leg::One, j) {
                contour.push((j as i64 + 1, op, false));
            }
        }
        contour.push((t_end, "Z".into(), false));
        for j in (0..layers.len()).rev() {
            if let Some(op) = at(Leg::TwoBar, j) {
                contour.push((j as i64 + 1, op, true));
            }
        }
        contour.push((0, "Z".into(), false));
        for j in 0..layers.len() {
            if let Some(op) = at(Leg::Two, j) {
                contour.push((j as i64 + 1, op, false));
            }
        }
        contour.push((t_end, "Z".into(), false));
        for j in (0..layers.len()).rev() {
            if let Some(op) = at(Leg::OneBar, j) {
                contour.push((j as i64 + 1, op, true));
            }
        }
        let n = contour.len();
        let mut atoms = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (t, ref op, dagger) = contour[i];
            atoms.push(Atom::Fixed {
                op: op.clone(),
                dagger,
            });
            let x = contour[(i + 1) % n].0 - t;
            if x != 0 {
                atoms.push(Atom::U(x));
            }
        }
        let mut e = MomentExpression::new().with_normalized_trace(TraceWord::new(atoms));
        e.operators = self.operators.clone();
        Ok(e)
    }

    /// Exact Haar average through the permutation-sum oracle.
    pub fn otoc_exact(&self, layers: &[LayerSpec]) -> Result<Complex64> {
        Ok(oracle::haar_average(&self.expression(layers)?, self.q)?.value)
    }

    pub fn otoc_mc(
        &self,
        layers: &[LayerSpec],
        n_samples: usize,
        seed: u64,
    ) -> Result<HaarEstimate> {
        haar_mc::estimate(&self.expression(layers)?, self.q, n_samples, seed)
    }
}

pub fn layer_matrix(layer: &LayerSpec, q: usize, z: &CMatrix) -> Result<C2> {
    OtocSystem::new(q, z.clone())?.layer_matrix(layer)
}

pub fn theorem4_value(layers: &[LayerSpec], q: usize, z: &CMatrix) -> Result<Complex64> {
    OtocSystem::new(q, z.clone())?.theorem4_value(layers)
}

pub fn otoc_plus_minus(
    layers: &[LayerSpec],
    q: usize,
    z: &CMatrix,
) -> Result<(Complex64, Complex64)> {
    OtocSystem::new(q, z.clone())?.otoc_plus_minus(layers)
}

pub fn otoc_exact(layers: &[LayerSpec], q: usize, z: &CMatrix) -> Result<Complex64> {
    OtocSystem::new(q, z.clone())?.otoc_exact(layers)
}

pub fn otoc_mc(
    layers: &[LayerSpec],
    q: usize,
    n_samples: usize,
    seed: u64,
    z: &CMatrix,
) -> Result<HaarEstimate> {
    OtocSystem::new(q, z.clone())?.otoc_mc(layers, n_samples, seed)
}
