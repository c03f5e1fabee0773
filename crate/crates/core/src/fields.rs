//! Differential forms on a group in exponential coordinates: vector potentials A
//! (one-forms), magnetic fields B (two-forms) and gauge functions ψ.
//!
//! The polynomial and trigonometric families carry their exterior derivative in
//! closed form, so B = dA is closed by construction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Coords;

pub trait OneForm: Send + Sync {
    fn dim(&self) -> usize;
    /// Components Aᵢ(q).
    fn eval(&self, q: &[f64]) -> Coords;
}

pub trait TwoForm: Send + Sync {
    fn dim(&self) -> usize;
    /// Row-major antisymmetric matrix Bᵢⱼ(q).
    fn eval(&self, q: &[f64]) -> Vec<f64>;

    /// B(q)(u, v) = Σ Bᵢⱼ uᵢ vⱼ
    fn pair(&self, q: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim();
        let b = self.eval(q);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += b[i * n + j] * u[i] * v[j];
            }
        }
        acc
    }
}

pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, q: &[f64]) -> f64;
}

/// Polynomial in up to four variables: Σ c · Π qᵢ^{eᵢ}.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub terms: Vec<(f64, [u8; 4])>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![(c, [0; 4])] }
    }

    pub fn monomial(c: f64, exps: [u8; 4]) -> Self {
        Self { terms: vec![(c, exps)] }
    }

    pub fn eval(&self, q: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                let mut v = *c;
                for (i, &k) in e.iter().enumerate() {
                    if k > 0 {
                        v *= q[i].powi(k as i32);
                    }
                }
                v
            })
            .sum()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[i] > 0)
            .map(|(c, e)| {
                let mut e2 = *e;
                e2[i] -= 1;
                (c * e[i] as f64, e2)
            })
            .collect();
        Self { terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { terms: self.terms.iter().map(|(c, e)| (c * s, *e)).collect() }
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(_, e)| e.iter().map(|&k| k as usize).sum::<usize>()).max().unwrap_or(0)
    }

    fn max_variable(&self) -> Option<usize> {
        self.terms.iter().filter(|(c, _)| *c != 0.0).flat_map(|(_, e)| (0..4).filter(move |&i| e[i] > 0)).max()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyOneForm {
    pub components: Vec<Poly>,
}

impl PolyOneForm {
    pub fn new(components: Vec<Poly>) -> Result<Self> {
        let dim = components.len();
        if dim == 0 || dim > 4 {
            return Err(Error::Config(format!("one-form dimension {dim} outside 1..=4")));
        }
        if components.iter().any(|p| p.max_variable().is_some_and(|v| v >= dim)) {
            return Err(Error::Config("polynomial uses a coordinate beyond the dimension".into()));
        }
        if components.iter().flat_map(|p| &p.terms).any(|(c, _)| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficient".into()));
        }
        Ok(Self { components })
    }

    pub fn zero(dim: usize) -> Self {
        Self { components: vec![Poly::zero(); dim] }
    }

    /// A(q) = ½ B₀(q − q₀, ·), whose exterior derivative is the constant B₀.
    pub fn linear_potential(b0: &[f64], q0: &[f64]) -> Result<Self> {
        let n = q0.len();
        check_antisymmetric(b0, n)?;
        let components = (0..n)
            .map(|j| {
                let mut p = Poly::zero();
                for i in 0..n {
                    let c = 0.5 * b0[i * n + j];
                    if c != 0.0 {
                        let mut e = [0u8; 4];
                        e[i] = 1;
                        p.terms.push((c, e));
                        p.terms.push((-c * q0[i], [0; 4]));
                    }
                }
                p
            })
            .collect();
        Self::new(components)
    }

    /// dψ
    pub fn gradient(psi: &Poly, dim: usize) -> Self {
        Self { components: (0..dim).map(|i| psi.derivative(i)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.components.len() != other.components.len() {
            return Err(Error::Shape("one-forms of different dimension".into()));
        }
        Ok(Self { components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect() })
    }

    /// (dA)ᵢⱼ = ∂ᵢAⱼ − ∂ⱼAᵢ
    pub fn exterior_derivative(&self) -> PolyTwoForm {
        let n = self.components.len();
        let mut comps = vec![Poly::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    comps[i * n + j] = self.components[j].derivative(i).add(&self.components[i].derivative(j).scale(-1.0));
                }
            }
        }
        PolyTwoForm { dim: n, components: comps }
    }

    pub fn degree(&self) -> usize {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }
}

impl OneForm for PolyOneForm {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, q: &[f64]) -> Coords {
        self.components.iter().map(|p| p.eval(q)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTwoForm {
    pub dim: usize,
    pub components: Vec<Poly>,
}

impl PolyTwoForm {
    pub fn constant(b0: &[f64], dim: usize) -> Result<Self> {
        check_antisymmetric(b0, dim)?;
        Ok(Self { dim, components: b0.iter().map(|&c| Poly::constant(c)).collect() })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, components: vec![Poly::zero(); dim * dim] }
    }
}

impl TwoForm for PolyTwoForm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, q: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(q)).collect()
    }
}

fn check_antisymmetric(b: &[f64], n: usize) -> Result<()> {
    if b.len() != n * n {
        return Err(Error::Shape(format!("two-form needs {} entries, got {}", n * n, b.len())));
    }
    for i in 0..n {
        for j in 0..n {
            if (b[i * n + j] + b[j * n + i]).abs() > 1e-12 {
                return Err(Error::Config(format!("two-form is not antisymmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Aⱼ(q) = cⱼ sin(⟨kⱼ, q⟩ + φⱼ), a smooth non-polynomial potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigOneForm {
    pub amplitudes: Vec<f64>,
    pub wavevectors: Vec<Vec<f64>>,
    pub phases: Vec<f64>,
}

impl TrigOneForm {
    pub fn new(amplitudes: Vec<f64>, wavevectors: Vec<Vec<f64>>, phases: Vec<f64>) -> Result<Self> {
        let n = amplitudes.len();
        if wavevectors.len() != n || phases.len() != n || wavevectors.iter().any(|k| k.len() != n) {
            return Err(Error::Shape("trigonometric one-form components disagree in size".into()));
        }
        Ok(Self { amplitudes, wavevectors, phases })
    }

    /// The default smooth field used in refinement studies on three-dimensional groups.
    pub fn sample3() -> Self {
        Self::new(
            vec![0.7, -0.4, 0.5],
            vec![vec![0.3, 0.9, -0.2], vec![1.1, 0.2, 0.4], vec![-0.5, 0.6, 0.8]],
            vec![0.1, -0.7, 0.3],
        )
        .expect("consistent sizes")
    }

    pub fn exterior_derivative(&self) -> TrigTwoForm {
        TrigTwoForm { potential: self.clone() }
    }
}

impl OneForm for TrigOneForm {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn eval(&self, q: &[f64]) -> Coords {
        (0..self.dim()).map(|j| self.amplitudes[j] * (dot(&self.wavevectors[j], q) + self.phases[j]).sin()).collect()
    }
}

/// d of a [`TrigOneForm`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTwoForm {
    potential: TrigOneForm,
}

impl TwoForm for TrigTwoForm {
    fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn eval(&self, q: &[f64]) -> Vec<f64> {
        let a = &self.potential;
        let n = a.dim();
        // ∂ᵢAⱼ = cⱼ kⱼᵢ cos(⟨kⱼ, q⟩ + φⱼ)
        let cos: Vec<f64> = (0..n).map(|j| a.amplitudes[j] * (dot(&a.wavevectors[j], q) + a.phases[j]).cos()).collect();
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] = cos[j] * a.wavevectors[j][i] - cos[i] * a.wavevectors[i][j];
            }
        }
        b
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// ψ given as a polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyScalar {
    pub dim: usize,
    pub poly: Poly,
}

impl ScalarField for PolyScalar {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, q: &[f64]) -> f64 {
        self.poly.eval(q)
    }
}

/// A vector potential together with its field strength.
#[derive(Clone)]
pub struct MagneticField {
    pub name: String,
    pub a: Arc<dyn OneForm>,
    pub b: Arc<dyn TwoForm>,
}

impl std::fmt::Debug for MagneticField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MagneticField({}, dim {})", self.name, self.a.dim())
    }
}

impl MagneticField {
    pub fn from_poly(name: impl Into<String>, a: PolyOneForm) -> Self {
        let b = a.exterior_derivative();
        Self { name: name.into(), a: Arc::new(a), b: Arc::new(b) }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_poly("zero", PolyOneForm::zero(dim))
    }

    /// Constant B₀ with the linear potential ½B₀(q − q₀, ·).
    pub fn constant(b0: &[f64], q0: &[f64]) -> Result<Self> {
        Ok(Self::from_poly("constant", PolyOneForm::linear_potential(b0, q0)?))
    }

    /// Constant field of strength b on ℝ²: B₀ = [[0, b], [−b, 0]].
    pub fn constant_planar(b: f64) -> Self {
        Self::constant(&[0.0, b, -b, 0.0], &[0.0, 0.0]).expect("antisymmetric")
    }

    /// Cubic potential on a three-dimensional group; its field is quadratic.
    pub fn cubic3() -> Self {
        let m = |c, e: [u8; 4]| Poly::monomial(c, e);
        let a = PolyOneForm::new(vec![
            m(0.3, [0, 1, 0, 0]).add(&m(-0.1, [0, 2, 1, 0])).add(&m(0.05, [0, 0, 3, 0])),
            m(-0.2, [1, 0, 0, 0]).add(&m(0.15, [2, 0, 1, 0])).add(&m(0.02, [1, 1, 1, 0])),
            m(0.25, [1, 1, 0, 0]).add(&m(-0.03, [0, 3, 0, 0])).add(&m(0.4, [0, 0, 0, 0])),
        ])
        .expect("three components in three variables");
        Self::from_poly("cubic", a)
    }

    pub fn smooth3() -> Self {
        let a = TrigOneForm::sample3();
        let b = a.exterior_derivative();
        Self { name: "smooth".into(), a: Arc::new(a), b: Arc::new(b) }
    }

    /// A + dψ, with the same field strength.
    pub fn gauge_transform(&self, psi: &Poly) -> Self {
        let grad = Arc::new(PolyOneForm::gradient(psi, self.dim()));
        Self { name: format!("{}+dpsi", self.name), a: Arc::new(SumOneForm(self.a.clone(), grad)), b: self.b.clone() }
    }
}

struct SumOneForm(Arc<dyn OneForm>, Arc<dyn OneForm>);

impl OneForm for SumOneForm {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, q: &[f64]) -> Coords {
        let mut a = self.0.eval(q);
        for (x, y) in a.iter_mut().zip(self.1.eval(q)) {
            *x += y;
        }
        a
    }
}

/// Field selection in experiment configs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Zero,
    /// Constant B₀ (row-major) with potential ½B₀(q − q₀, ·).
    Constant { b0: Vec<f64>, #[serde(default)] q0: Option<Vec<f64>> },
    /// Constant strength on ℝ².
    Planar { b: f64 },
    Cubic,
    Smooth,
    Polynomial { potential: PolyOneForm },
}

impl FieldSpec {
    pub fn build(&self, dim: usize) -> Result<MagneticField> {
        let field = match self {
            FieldSpec::Zero => MagneticField::zero(dim),
            FieldSpec::Constant { b0, q0 } => {
                let q0 = q0.clone().unwrap_or_else(|| vec![0.0; dim]);
                if q0.len() != dim {
                    return Err(Error::Config(format!("q0 has {} entries for dimension {dim}", q0.len())));
                }
                MagneticField::constant(b0, &q0)?
            }
            FieldSpec::Planar { b } => {
                if dim != 2 {
                    return Err(Error::Config("planar field needs a two-dimensional group".into()));
                }
                MagneticField::constant_planar(*b)
            }
            FieldSpec::Cubic => {
                if dim != 3 {
                    return Err(Error::Config("cubic field needs a three-dimensional group".into()));
                }
                MagneticField::cubic3()
            }
            FieldSpec::Smooth => {
                if dim != 3 {
                    return Err(Error::Config("smooth field needs a three-dimensional group".into()));
                }
                MagneticField::smooth3()
            }
            FieldSpec::Polynomial { potential } => {
                let p = PolyOneForm::new(potential.components.clone())?;
                if p.components.len() != dim {
                    return Err(Error::Config(format!("potential has {} components for dimension {dim}", p.components.len())));
                }
                MagneticField::from_poly("polynomial", p)
            }
        };
        Ok(field)
    }
}
