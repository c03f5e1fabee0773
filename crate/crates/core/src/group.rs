//! Group backends: exact finite groups given by a Cayley table and simply
//! connected nilpotent Lie groups in exponential coordinates of the first kind.
//!
//! On the Lie side `exp` and `log` are coordinate identities and the group law
//! is the Baker–Campbell–Hausdorff series truncated at the nilpotency step.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exponential coordinates of a Lie group element (or a Lie algebra vector).
pub type Coords = SmallVec<[f64; 4]>;

/// Which shipped family a finite group belongs to; determines its element
/// labelling and the irreducible representations that ship with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteKind {
    Cyclic(usize),
    Symmetric3,
    Dihedral4,
    Quaternion,
    Custom,
}

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    kind: FiniteKind,
}

/// Permutations of {0,1,2} in the element order used by [`FiniteGroup::symmetric3`]:
/// e, (12), (23), (13), (123), (132).
pub const S3_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
    [1, 2, 0],
    [2, 0, 1],
];

impl FiniteGroup {
    /// Builds a group from a Cayley table, validating closure, associativity,
    /// a two-sided identity and two-sided inverses.
    pub fn from_cayley(name: impl Into<String>, cayley: &[Vec<usize>]) -> Result<Self> {
        let order = cayley.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty Cayley table".into()));
        }
        let mut table = Vec::with_capacity(order * order);
        for (i, row) in cayley.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has length {} (expected {order})",
                    row.len()
                )));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::InvalidGroup(format!("entry {v} out of range in row {i}")));
                }
                table.push(v);
            }
        }
        Self::from_table(name.into(), order, table, FiniteKind::Custom)
    }

    fn from_table(name: String, order: usize, table: Vec<usize>, kind: FiniteKind) -> Result<Self> {
        let mul = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        Ok(Self { name, order, table, identity, inverses, kind })
    }

    fn from_law(name: &str, order: usize, kind: FiniteKind, law: impl Fn(usize, usize) -> usize) -> Self {
        let table = (0..order * order).map(|k| law(k / order, k % order)).collect();
        Self::from_table(name.to_string(), order, table, kind).expect("shipped group law is valid")
    }

    pub fn trivial() -> Self {
        Self::from_law("Z1", 1, FiniteKind::Cyclic(1), |_, _| 0)
    }

    /// ℤ_n with element k ↔ the residue k.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs positive order");
        Self::from_law(&format!("Z{n}"), n, FiniteKind::Cyclic(n), |a, b| (a + b) % n)
    }

    /// S₃ as permutations of three points, composed right to left.
    pub fn symmetric3() -> Self {
        let idx = |p: [usize; 3]| S3_PERMUTATIONS.iter().position(|&q| q == p).unwrap();
        Self::from_law("S3", 6, FiniteKind::Symmetric3, |a, b| {
            let (s, t) = (S3_PERMUTATIONS[a], S3_PERMUTATIONS[b]);
            idx([s[t[0]], s[t[1]], s[t[2]]])
        })
    }

    /// D₄ with element k + 4j ↔ rᵏsʲ, where r is the quarter turn and s a reflection.
    pub fn dihedral4() -> Self {
        Self::from_law("D4", 8, FiniteKind::Dihedral4, |a, b| {
            let (k, j) = (a % 4, a / 4);
            let (l, m) = (b % 4, b / 4);
            let rot = if j == 0 { (k + l) % 4 } else { (k + 4 - l) % 4 };
            rot + 4 * ((j + m) % 2)
        })
    }

    /// Q₈ with element 2u + σ ↔ (−1)^σ·u for u ∈ (1, i, j, k).
    pub fn quaternion() -> Self {
        // unit products: (sign flip, unit)
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        Self::from_law("Q8", 8, FiniteKind::Quaternion, |a, b| {
            let (ua, sa) = (a / 2, a % 2);
            let (ub, sb) = (b / 2, b % 2);
            let (flip, u) = UNIT[ua][ub];
            2 * u + (sa + sb + flip) % 2
        })
    }

    /// Looks up one of the shipped groups: `Z<n>`, `S3`, `D4`, `Q8`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "S3" => Ok(Self::symmetric3()),
            "D4" => Ok(Self::dihedral4()),
            "Q8" => Ok(Self::quaternion()),
            _ => match name.strip_prefix('Z').and_then(|n| n.parse::<usize>().ok()) {
                Some(n) if n > 0 => Ok(Self::cyclic(n)),
                _ => Err(Error::InvalidGroup(format!("unknown finite group {name:?}"))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> FiniteKind {
        self.kind
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Counting measure.
    pub fn haar_weight(&self) -> f64 {
        1.0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn cayley(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }
}

/// A connected, simply connected nilpotent Lie group in exponential coordinates.
#[derive(Debug, Clone)]
pub struct NilpotentLieGroup {
    name: String,
    dim: usize,
    // c[(i * dim + j) * dim + k] = coefficient of e_k in [e_i, e_j]
    structure: Vec<f64>,
    step: usize,
}

/// Highest nilpotency step for which the truncated BCH series is implemented.
pub const MAX_STEP: usize = 4;

impl NilpotentLieGroup {
    /// `brackets` lists `(i, j, k, c)` meaning `[e_i, e_j]` has `e_k`-coefficient `c`;
    /// the antisymmetric partner is filled in. Conflicting entries are rejected.
    pub fn new(name: impl Into<String>, dim: usize, brackets: &[(usize, usize, usize, f64)], step: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGroup("dimension must be positive".into()));
        }
        if step == 0 || step > MAX_STEP {
            return Err(Error::InvalidGroup(format!("step must lie in 1..={MAX_STEP}, got {step}")));
        }
        let mut structure = vec![0.0; dim * dim * dim];
        for &(i, j, k, c) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidGroup(format!("bracket index out of range: ({i},{j},{k})")));
            }
            if !c.is_finite() {
                return Err(Error::InvalidGroup("non-finite structure constant".into()));
            }
            if i == j && c != 0.0 {
                return Err(Error::InvalidGroup(format!("[e_{i}, e_{i}] must vanish")));
            }
            let fwd = (i * dim + j) * dim + k;
            let back = (j * dim + i) * dim + k;
            if structure[back] != 0.0 && structure[back] != -c {
                return Err(Error::InvalidGroup(format!("bracket ({i},{j},{k}) is not antisymmetric")));
            }
            structure[fwd] = c;
            structure[back] = -c;
        }
        let g = Self { name: name.into(), dim, structure, step };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        let basis = |i: usize| -> Coords {
            let mut v: Coords = SmallVec::from_elem(0.0, n);
            v[i] = 1.0;
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, c) = (basis(i), basis(j), basis(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    let defect = (0..n).map(|m| (t1[m] + t2[m] + t3[m]).abs()).fold(0.0, f64::max);
                    if defect > 1e-12 {
                        return Err(Error::InvalidGroup(format!("Jacobi identity fails on ({i},{j},{k})")));
                    }
                }
            }
        }
        // every bracket of length step + 1 of basis vectors vanishes
        let mut words: Vec<Coords> = (0..n).map(basis).collect();
        for _ in 0..self.step {
            let mut next = Vec::new();
            for w in &words {
                for i in 0..n {
                    let b = self.bracket(&basis(i), w);
                    if b.iter().any(|x| x.abs() > 1e-12) {
                        next.push(b);
                    }
                }
            }
            words = next;
        }
        if !words.is_empty() {
            return Err(Error::InvalidGroup(format!("algebra is not nilpotent of step {}", self.step)));
        }
        Ok(())
    }

    /// Abelian ℝⁿ.
    pub fn abelian(n: usize) -> Self {
        Self::new(format!("R{n}"), n, &[], 1).expect("abelian algebra is valid")
    }

    /// The three-dimensional Heisenberg group H₁ with [e₁, e₂] = e₃.
    pub fn heisenberg() -> Self {
        Self::new("H1", 3, &[(0, 1, 2, 1.0)], 2).expect("Heisenberg algebra is valid")
    }

    /// `R1`, `R2`, `R3` or `H1`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "H1" => Ok(Self::heisenberg()),
            "R1" => Ok(Self::abelian(1)),
            "R2" => Ok(Self::abelian(2)),
            "R3" => Ok(Self::abelian(3)),
            _ => Err(Error::InvalidGroup(format!("unknown Lie group {name:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn is_abelian(&self) -> bool {
        self.step == 1
    }

    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let c = self.structure[(i * n + j) * n + k];
                    if c != 0.0 {
                        out.push((i, j, k, c));
                    }
                }
            }
        }
        out
    }

    pub fn identity(&self) -> Coords {
        SmallVec::from_elem(0.0, self.dim)
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Coords {
        let n = self.dim;
        let mut out: Coords = SmallVec::from_elem(0.0, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += xy * self.structure[base + k];
                }
            }
        }
        out
    }

    /// BCH(X, Y) truncated at the nilpotency step; equals log(exp X · exp Y).
    pub fn bch(&self, x: &[f64], y: &[f64]) -> Coords {
        let n = self.dim;
        let mut z: Coords = (0..n).map(|i| x[i] + y[i]).collect();
        if self.step < 2 {
            return z;
        }
        let xy = self.bracket(x, y);
        axpy(&mut z, 0.5, &xy);
        if self.step >= 3 {
            let xxy = self.bracket(x, &xy);
            let yxy = self.bracket(y, &xy);
            axpy(&mut z, 1.0 / 12.0, &xxy);
            axpy(&mut z, -1.0 / 12.0, &yxy);
            if self.step >= 4 {
                let yxxy = self.bracket(y, &xxy);
                axpy(&mut z, -1.0 / 24.0, &yxxy);
            }
        }
        z
    }

    #[inline]
    pub fn mul(&self, x: &[f64], y: &[f64]) -> Coords {
        self.bch(x, y)
    }

    #[inline]
    pub fn inv(&self, x: &[f64]) -> Coords {
        x.iter().map(|v| -v).collect()
    }

    /// `exp` in exponential coordinates of the first kind.
    pub fn exp(&self, x: &[f64]) -> Coords {
        Coords::from_slice(x)
    }

    pub fn log(&self, x: &[f64]) -> Coords {
        Coords::from_slice(x)
    }

    /// `x⁻¹ y`.
    #[inline]
    pub fn left_div(&self, x: &[f64], y: &[f64]) -> Coords {
        self.bch(&self.inv(x), y)
    }
}

fn axpy(z: &mut Coords, a: f64, v: &[f64]) {
    for (zi, vi) in z.iter_mut().zip(v) {
        *zi += a * vi;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Finite(usize),
    Lie(Coords),
}

#[derive(Debug, Clone)]
pub enum GroupModel {
    Finite(FiniteGroup),
    Nilpotent(NilpotentLieGroup),
}

impl GroupModel {
    pub fn identity(&self) -> GroupElement {
        match self {
            GroupModel::Finite(g) => GroupElement::Finite(g.identity()),
            GroupModel::Nilpotent(g) => GroupElement::Lie(g.identity()),
        }
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        match (self, x) {
            (GroupModel::Finite(g), GroupElement::Finite(i)) if *i < g.order() => Ok(()),
            (GroupModel::Finite(g), GroupElement::Finite(i)) => {
                Err(Error::BackendMismatch(format!("index {i} outside group of order {}", g.order())))
            }
            (GroupModel::Nilpotent(g), GroupElement::Lie(c)) if c.len() == g.dim() => {
                if c.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::NonFinite("group element coordinates".into()))
                }
            }
            (GroupModel::Nilpotent(g), GroupElement::Lie(c)) => Err(Error::BackendMismatch(format!(
                "coordinate vector of length {} for a group of dimension {}",
                c.len(),
                g.dim()
            ))),
            _ => Err(Error::BackendMismatch("finite element used with a Lie group or vice versa".into())),
        }
    }

    pub fn multiply(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(match (self, x, y) {
            (GroupModel::Finite(g), GroupElement::Finite(a), GroupElement::Finite(b)) => GroupElement::Finite(g.mul(*a, *b)),
            (GroupModel::Nilpotent(g), GroupElement::Lie(a), GroupElement::Lie(b)) => GroupElement::Lie(g.mul(a, b)),
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(match (self, x) {
            (GroupModel::Finite(g), GroupElement::Finite(a)) => GroupElement::Finite(g.inv(*a)),
            (GroupModel::Nilpotent(g), GroupElement::Lie(a)) => GroupElement::Lie(g.inv(a)),
            _ => unreachable!("checked above"),
        })
    }
}

/// Ordering parameter of the quantization.
#[derive(Clone)]
pub enum TauMap {
    /// τ ≡ e
    ConstantIdentity,
    /// τ = id
    Identity,
    /// τ ≡ x₀
    Constant(GroupElement),
    /// τ(x) = exp(½ log x); Lie backend only.
    Half,
    /// Arbitrary map on a finite group, τ(i) = table[i].
    Table(Vec<usize>),
    Custom(Arc<dyn Fn(&GroupElement) -> GroupElement + Send + Sync>),
}

impl fmt::Debug for TauMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauMap::ConstantIdentity => write!(f, "ConstantIdentity"),
            TauMap::Identity => write!(f, "Identity"),
            TauMap::Constant(x) => write!(f, "Constant({x:?})"),
            TauMap::Half => write!(f, "Half"),
            TauMap::Table(t) => write!(f, "Table({t:?})"),
            TauMap::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl TauMap {
    pub fn apply(&self, g: &GroupModel, x: &GroupElement) -> Result<GroupElement> {
        g.check(x)?;
        let out = match (self, g, x) {
            (TauMap::ConstantIdentity, _, _) => g.identity(),
            (TauMap::Identity, _, _) => x.clone(),
            (TauMap::Constant(x0), _, _) => {
                g.check(x0)?;
                x0.clone()
            }
            (TauMap::Half, GroupModel::Nilpotent(_), GroupElement::Lie(c)) => {
                GroupElement::Lie(c.iter().map(|v| 0.5 * v).collect())
            }
            (TauMap::Half, GroupModel::Finite(_), _) => {
                return Err(Error::UnsupportedTau("the half map exists only on Lie groups".into()))
            }
            (TauMap::Table(t), GroupModel::Finite(fg), GroupElement::Finite(i)) => {
                if t.len() != fg.order() {
                    return Err(Error::UnsupportedTau(format!("table of length {} for order {}", t.len(), fg.order())));
                }
                GroupElement::Finite(t[*i])
            }
            (TauMap::Table(_), _, _) => return Err(Error::UnsupportedTau("table maps need a finite group".into())),
            (TauMap::Custom(f), _, _) => f(x),
            _ => unreachable!("element checked against backend"),
        };
        g.check(&out)?;
        Ok(out)
    }

    /// Tabulates τ on a finite group.
    pub fn on_finite(&self, g: &FiniteGroup) -> Result<FiniteTau> {
        let model = GroupModel::Finite(g.clone());
        let mut table = Vec::with_capacity(g.order());
        for i in g.elements() {
            match self.apply(&model, &GroupElement::Finite(i))? {
                GroupElement::Finite(j) => table.push(j),
                GroupElement::Lie(_) => unreachable!(),
            }
        }
        Ok(FiniteTau(table))
    }

    /// Evaluates τ on Lie coordinates.
    pub fn apply_lie(&self, g: &NilpotentLieGroup, x: &[f64]) -> Result<Coords> {
        match self {
            TauMap::ConstantIdentity => Ok(g.identity()),
            TauMap::Identity => Ok(Coords::from_slice(x)),
            TauMap::Half => Ok(x.iter().map(|v| 0.5 * v).collect()),
            _ => {
                let model = GroupModel::Nilpotent(g.clone());
                match self.apply(&model, &GroupElement::Lie(Coords::from_slice(x)))? {
                    GroupElement::Lie(c) => Ok(c),
                    GroupElement::Finite(_) => unreachable!(),
                }
            }
        }
    }
}

/// τ tabulated on a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTau(pub Vec<usize>);

impl FiniteTau {
    #[inline]
    pub fn at(&self, x: usize) -> usize {
        self.0[x]
    }

    /// τ(x) = x·τ(x⁻¹) for every x.
    pub fn is_symmetric(&self, g: &FiniteGroup) -> bool {
        g.elements().all(|x| self.at(x) == g.mul(x, self.at(g.inv(x))))
    }
}

/// The symmetric ordering on a nilpotent Lie group: the midpoint of the
/// one-parameter subgroup through x, which in exponential coordinates is x/2.
pub fn symmetric_tau(g: &GroupModel) -> Result<TauMap> {
    match g {
        GroupModel::Nilpotent(_) => Ok(TauMap::Half),
        GroupModel::Finite(_) => Err(Error::UnsupportedTau(
            "finite groups need symmetric_search, a symmetric map may not exist".into(),
        )),
    }
}

/// Default cap on the group order accepted by [`symmetric_search`].
pub const SYMMETRIC_SEARCH_CAP: usize = 12;

/// Searches for a symmetric map τ(x) = x·τ(x⁻¹) on a finite group.
///
/// Power maps x ↦ xᵏ are tried first. Otherwise the relation pairs x with x⁻¹:
/// elements of order two admit no solution, and for each pair {x, x⁻¹} the value
/// τ(x) is free while τ(x⁻¹) = x⁻¹τ(x) is forced, so the remaining maps are
/// covered by choosing τ(x) = e on every pair. The search is therefore exhaustive.
pub fn symmetric_search(g: &FiniteGroup, cap: usize) -> Result<Option<TauMap>> {
    if g.order() > cap {
        return Err(Error::SearchTooLarge { order: g.order(), cap });
    }
    let e = g.identity();
    if g.elements().any(|x| x != e && g.inv(x) == x) {
        return Ok(None);
    }
    for k in 0..g.order() {
        let t = FiniteTau(g.elements().map(|x| g.power(x, k)).collect());
        if t.is_symmetric(g) {
            return Ok(Some(TauMap::Table(t.0)));
        }
    }
    let mut table = vec![usize::MAX; g.order()];
    table[e] = e;
    for x in g.elements() {
        if table[x] == usize::MAX {
            table[x] = e;
            table[g.inv(x)] = g.inv(x);
        }
    }
    let t = FiniteTau(table);
    debug_assert!(t.is_symmetric(g));
    Ok(Some(TauMap::Table(t.0)))
}

/// Serialized group definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GroupSpec {
    Finite {
        cayley: Vec<Vec<usize>>,
        #[serde(default)]
        name: Option<String>,
    },
    Nilpotent {
        dim: usize,
        bracket: Vec<(usize, usize, usize, f64)>,
        step: usize,
        #[serde(default)]
        name: Option<String>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupModel> {
        match self {
            GroupSpec::Finite { cayley, name } => Ok(GroupModel::Finite(FiniteGroup::from_cayley(
                name.clone().unwrap_or_else(|| "custom".into()),
                cayley,
            )?)),
            GroupSpec::Nilpotent { dim, bracket, step, name } => Ok(GroupModel::Nilpotent(NilpotentLieGroup::new(
                name.clone().unwrap_or_else(|| "custom".into()),
                *dim,
                bracket,
                *step,
            )?)),
        }
    }

    pub fn describe(g: &GroupModel) -> Self {
        match g {
            GroupModel::Finite(f) => GroupSpec::Finite { cayley: f.cayley(), name: Some(f.name().to_string()) },
            GroupModel::Nilpotent(l) => GroupSpec::Nilpotent {
                dim: l.dim(),
                bracket: l.structure_constants(),
                step: l.step(),
                name: Some(l.name().to_string()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_generator_squares_to_identity() {
        let g = FiniteGroup::cyclic(2);
        assert_eq!(g.mul(1, 1), g.identity());
    }

    #[test]
    fn s3_transposition_product() {
        // (12)·(23) = (123), composing right to left
        let g = FiniteGroup::symmetric3();
        assert_eq!(g.mul(1, 2), 4);
        assert_eq!(S3_PERMUTATIONS[4], [1, 2, 0]);
    }

    #[test]
    fn heisenberg_product_closed_form() {
        let h = NilpotentLieGroup::heisenberg();
        let z = h.mul(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        assert_eq!(z.as_slice(), &[1.0, 1.0, 0.5]);
    }

    #[test]
    fn inverses() {
        let g = FiniteGroup::cyclic(3);
        assert_eq!(g.inv(1), 2);
        let h = NilpotentLieGroup::heisenberg();
        assert_eq!(h.inv(&[0.3, -1.0, 2.0]).as_slice(), &[-0.3, 1.0, -2.0]);
        for g in [FiniteGroup::symmetric3(), FiniteGroup::dihedral4(), FiniteGroup::quaternion()] {
            assert_eq!(g.inv(g.identity()), g.identity());
        }
    }

    #[test]
    fn exp_log_are_coordinate_identities() {
        let h = NilpotentLieGroup::heisenberg();
        assert_eq!(h.exp(&[0.0; 3]).as_slice(), h.identity().as_slice());
        assert_eq!(h.log(&[1.0, 1.0, 0.5]).as_slice(), &[1.0, 1.0, 0.5]);
        let r = NilpotentLieGroup::abelian(2);
        assert_eq!(r.bch(&[1.0, 2.0], &[3.0, -1.0]).as_slice(), &[4.0, 1.0]);
    }

    #[test]
    fn shipped_groups_are_nonabelian_where_expected() {
        let commutes = |g: &FiniteGroup| g.elements().all(|a| g.elements().all(|b| g.mul(a, b) == g.mul(b, a)));
        assert!(commutes(&FiniteGroup::cyclic(6)));
        assert!(!commutes(&FiniteGroup::symmetric3()));
        assert!(!commutes(&FiniteGroup::dihedral4()));
        assert!(!commutes(&FiniteGroup::quaternion()));
        // Q8 has a unique involution, D4 has five
        let involutions = |g: &FiniteGroup| g.elements().filter(|&x| x != g.identity() && g.inv(x) == x).count();
        assert_eq!(involutions(&FiniteGroup::quaternion()), 1);
        assert_eq!(involutions(&FiniteGroup::dihedral4()), 5);
    }

    #[test]
    fn bad_cayley_tables_are_rejected() {
        assert!(FiniteGroup::from_cayley("x", &[vec![0, 1], vec![0, 1]]).is_err());
        assert!(FiniteGroup::from_cayley("x", &[vec![0, 2], vec![1, 0]]).is_err());
        assert!(FiniteGroup::from_cayley("z2", &[vec![0, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn non_nilpotent_or_non_jacobi_brackets_are_rejected() {
        // [e1,e2]=e2 is solvable, not nilpotent
        assert!(NilpotentLieGroup::new("aff", 2, &[(0, 1, 1, 1.0)], 2).is_err());
        // Heisenberg declared abelian
        assert!(NilpotentLieGroup::new("h", 3, &[(0, 1, 2, 1.0)], 1).is_err());
    }

    #[test]
    fn symmetric_tau_midpoint() {
        let h = NilpotentLieGroup::heisenberg();
        let model = GroupModel::Nilpotent(h.clone());
        let tau = symmetric_tau(&model).unwrap();
        let x = [1.0, 0.0, 0.0];
        let t = tau.apply_lie(&h, &x).unwrap();
        let rhs = h.mul(&x, &tau.apply_lie(&h, &h.inv(&x)).unwrap());
        assert_eq!(t.as_slice(), rhs.as_slice());
        assert!(symmetric_tau(&GroupModel::Finite(FiniteGroup::cyclic(3))).is_err());
    }

    #[test]
    fn symmetric_search_small_groups() {
        assert!(symmetric_search(&FiniteGroup::cyclic(2), 12).unwrap().is_none());
        match symmetric_search(&FiniteGroup::cyclic(3), 12).unwrap() {
            Some(TauMap::Table(t)) => assert_eq!(t, vec![0, 2, 1]),
            other => panic!("unexpected {other:?}"),
        }
        match symmetric_search(&FiniteGroup::trivial(), 12).unwrap() {
            Some(TauMap::Table(t)) => assert_eq!(t, vec![0]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            symmetric_search(&FiniteGroup::cyclic(13), 12),
            Err(Error::SearchTooLarge { .. })
        ));
    }

    #[test]
    fn backend_mismatch_is_an_error() {
        let m = GroupModel::Finite(FiniteGroup::cyclic(2));
        let lie = GroupElement::Lie(Coords::from_slice(&[0.0]));
        assert!(m.multiply(&GroupElement::Finite(0), &lie).is_err());
        assert!(m.inverse(&GroupElement::Finite(5)).is_err());
    }

    #[test]
    fn group_spec_roundtrip() {
        let json = r#"{"type":"nilpotent","dim":3,"bracket":[[0,1,2,1.0]],"step":2}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let GroupModel::Nilpotent(g) = spec.build().unwrap() else { panic!() };
        assert_eq!(g.mul(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).as_slice(), &[1.0, 1.0, 0.5]);
        let json = r#"{"type":"finite","cayley":[[0,1],[1,0]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        assert!(matches!(spec.build().unwrap(), GroupModel::Finite(_)));
    }
}
