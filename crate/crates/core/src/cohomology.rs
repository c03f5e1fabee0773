//! Torus-valued cochains over the left-translation module C(G; 𝕋) of a finite
//! group, the coboundary maps δⁿ and constructive trivialization of cocycles.
//!
//! A cochain of degree n is stored densely as ν(q; x₁,…,xₙ) with q the argument
//! of the C(G; 𝕋)-valued function, in lexicographic order of (q, x₁, …, xₙ).
//! The module action is (𝖺ₓ f)(q) = f(x⁻¹q).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dual::C64;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Tolerance on |ν| − 1 accepted when building a cochain.
pub const UNIT_TOL: f64 = 1e-12;

/// Degrees above this are not supported.
pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    order: usize,
    degree: usize,
    values: Vec<C64>,
}

impl Cochain {
    /// Validates unit modulus everywhere and, for degree ≥ 1, the normalization
    /// ν(q; …) = 1 whenever one of the xⱼ is the identity.
    pub fn new(group: &FiniteGroup, degree: usize, values: Vec<C64>) -> Result<Self> {
        if degree > MAX_DEGREE + 1 {
            return Err(Error::InvalidCochain(format!("degree {degree} is not supported")));
        }
        let n = group.order();
        let expected = n.pow(degree as u32 + 1);
        if values.len() != expected {
            return Err(Error::InvalidCochain(format!(
                "{} values for degree {degree} over a group of order {n} (expected {expected})",
                values.len()
            )));
        }
        if let Some(z) = values.iter().find(|z| !z.norm().is_finite() || (z.norm() - 1.0).abs() >= UNIT_TOL) {
            return Err(Error::InvalidCochain(format!("value {z} is not of unit modulus")));
        }
        let c = Self { order: n, degree, values };
        if degree >= 1 {
            let e = group.identity();
            for (idx, z) in c.values.iter().enumerate() {
                let (_, xs) = c.unravel(idx);
                if xs.contains(&e) && (z - 1.0).norm() > UNIT_TOL {
                    return Err(Error::InvalidCochain(format!("normalization fails at arguments {xs:?}")));
                }
            }
        }
        Ok(c)
    }

    pub fn from_fn(group: &FiniteGroup, degree: usize, mut f: impl FnMut(usize, &[usize]) -> C64) -> Result<Self> {
        let n = group.order();
        let len = n.pow(degree as u32 + 1);
        let mut values = Vec::with_capacity(len);
        let mut xs = vec![0usize; degree];
        for idx in 0..len {
            let q = unravel_into(idx, n, &mut xs);
            values.push(f(q, &xs));
        }
        Self::new(group, degree, values)
    }

    pub fn one(group: &FiniteGroup, degree: usize) -> Self {
        Self::from_fn(group, degree, |_, _| C64::new(1.0, 0.0)).expect("constant cochain is valid")
    }

    /// Uniformly random phases, normalized.
    pub fn random(group: &FiniteGroup, degree: usize, rng: &mut impl Rng) -> Self {
        let e = group.identity();
        let n = group.order();
        let len = n.pow(degree as u32 + 1);
        let mut xs = vec![0usize; degree];
        let mut values = Vec::with_capacity(len);
        for idx in 0..len {
            unravel_into(idx, n, &mut xs);
            let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            values.push(if xs.contains(&e) { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, theta) });
        }
        Self { order: n, degree, values }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    #[inline]
    pub fn index(&self, q: usize, xs: &[usize]) -> usize {
        debug_assert_eq!(xs.len(), self.degree);
        xs.iter().fold(q, |acc, &x| acc * self.order + x)
    }

    #[inline]
    pub fn get(&self, q: usize, xs: &[usize]) -> C64 {
        self.values[self.index(q, xs)]
    }

    /// Degree-0 value a(q).
    #[inline]
    pub fn at0(&self, q: usize) -> C64 {
        self.values[q]
    }

    /// Degree-1 value β(q; x).
    #[inline]
    pub fn at1(&self, q: usize, x: usize) -> C64 {
        self.values[q * self.order + x]
    }

    /// Degree-2 value γ(q; x, y).
    #[inline]
    pub fn at2(&self, q: usize, x: usize, y: usize) -> C64 {
        self.values[(q * self.order + x) * self.order + y]
    }

    fn unravel(&self, idx: usize) -> (usize, Vec<usize>) {
        let mut xs = vec![0; self.degree];
        let q = unravel_into(idx, self.order, &mut xs);
        (q, xs)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            order: self.order,
            degree: self.degree,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// Pointwise inverse (complex conjugate on unit values).
    pub fn inv(&self) -> Self {
        Self { order: self.order, degree: self.degree, values: self.values.iter().map(|z| z.conj()).collect() }
    }

    /// max |ν − μ| over all arguments.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.order != other.order || self.degree != other.degree {
            return Err(Error::InvalidCochain(format!(
                "shape mismatch: (order {}, degree {}) vs (order {}, degree {})",
                self.order, self.degree, other.order, other.degree
            )));
        }
        Ok(())
    }

    fn check_group(&self, group: &FiniteGroup) -> Result<()> {
        if group.order() != self.order {
            return Err(Error::InvalidCochain(format!(
                "cochain over a group of order {} used with order {}",
                self.order,
                group.order()
            )));
        }
        Ok(())
    }
}

fn unravel_into(mut idx: usize, n: usize, xs: &mut [usize]) -> usize {
    for slot in xs.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    idx
}

/// (δⁿν)(x₁,…,xₙ₊₁) = 𝖺_{x₁}[ν(x₂,…)] · Πⱼ ν(…, xⱼxⱼ₊₁, …)^{(−1)ʲ} · ν(x₁,…,xₙ)^{(−1)ⁿ⁺¹}
pub fn coboundary(group: &FiniteGroup, nu: &Cochain) -> Result<Cochain> {
    nu.check_group(group)?;
    let n = nu.degree;
    if n > MAX_DEGREE {
        return Err(Error::InvalidCochain(format!("coboundary of degree {n} is not supported")));
    }
    let ord = group.order();
    let len = ord.pow(n as u32 + 2);
    let mut values = Vec::with_capacity(len);
    let mut xs = vec![0usize; n + 1];
    let mut args = vec![0usize; n];
    let pow = |z: C64, sign_even: bool| if sign_even { z } else { z.conj() };
    for idx in 0..len {
        let q = unravel_into(idx, ord, &mut xs);
        let mut val = nu.get(group.mul(group.inv(xs[0]), q), &xs[1..]);
        for j in 1..=n {
            for (k, slot) in args.iter_mut().enumerate() {
                *slot = match k + 1 {
                    m if m < j => xs[k],
                    m if m == j => group.mul(xs[j - 1], xs[j]),
                    _ => xs[k + 1],
                };
            }
            val *= pow(nu.get(q, &args), j.is_multiple_of(2));
        }
        val *= pow(nu.get(q, &xs[..n]), (n + 1).is_multiple_of(2));
        values.push(val);
    }
    Ok(Cochain { order: ord, degree: n + 1, values })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CocycleCheck {
    pub holds: bool,
    pub max_defect: f64,
}

/// Tests δⁿν = 1 to within `tol`.
pub fn is_cocycle(group: &FiniteGroup, nu: &Cochain, tol: f64) -> Result<CocycleCheck> {
    if nu.degree == 0 {
        return Err(Error::InvalidCochain("cocycle test needs degree ≥ 1".into()));
    }
    let d = coboundary(group, nu)?;
    let max_defect = d.values.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
    Ok(CocycleCheck { holds: max_defect < tol, max_defect })
}

/// Default tolerance for the cocycle precondition checks.
pub const COCYCLE_TOL: f64 = 1e-10;

/// Explicit primitive of a cocycle: [ν^{n−1}(z₁,…)](x) = [ν(x⁻¹, z₁,…)](e).
pub fn trivialize(group: &FiniteGroup, nu: &Cochain) -> Result<Cochain> {
    let check = is_cocycle(group, nu, COCYCLE_TOL)?;
    if !check.holds {
        return Err(Error::NotACocycle { defect: check.max_defect });
    }
    let n = nu.degree;
    let ord = group.order();
    let e = group.identity();
    let len = ord.pow(n as u32);
    let mut zs = vec![0usize; n - 1];
    let mut args = vec![0usize; n];
    let mut values = Vec::with_capacity(len);
    for idx in 0..len {
        let x = unravel_into(idx, ord, &mut zs);
        args[0] = group.inv(x);
        args[1..].copy_from_slice(&zs);
        values.push(nu.get(e, &args));
    }
    Ok(Cochain { order: ord, degree: n - 1, values })
}

/// The pseudo-trivialization β_γ(q; x) = γ(e; q⁻¹, x) of a 2-cocycle.
pub fn pseudo_trivialize(group: &FiniteGroup, gamma: &Cochain) -> Result<Cochain> {
    if gamma.degree != 2 {
        return Err(Error::InvalidCochain(format!("expected a 2-cocycle, got degree {}", gamma.degree)));
    }
    let check = is_cocycle(group, gamma, COCYCLE_TOL)?;
    if !check.holds {
        return Err(Error::NotACocycle { defect: check.max_defect });
    }
    let e = group.identity();
    Cochain::from_fn(group, 1, |q, xs| gamma.at2(e, group.inv(q), xs[0]))
}

/// The gauge a with β₂ = δ⁰(a)·β₁, normalized by a(q) = (β₂/β₁)(e; q⁻¹).
/// Any other solution differs by a constant phase.
pub fn gauge_between(group: &FiniteGroup, beta1: &Cochain, beta2: &Cochain) -> Result<Cochain> {
    if beta1.degree != 1 || beta2.degree != 1 {
        return Err(Error::InvalidCochain("gauge_between expects two 1-cochains".into()));
    }
    let ratio = beta2.mul(&beta1.inv())?;
    let check = is_cocycle(group, &ratio, COCYCLE_TOL)?;
    if !check.holds {
        return Err(Error::NotCohomologous { defect: check.max_defect });
    }
    trivialize(group, &ratio)
}

/// Serialized cochain: degree and (re, im) pairs in lexicographic argument order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainSpec {
    pub degree: usize,
    pub values: Vec<(f64, f64)>,
}

impl CochainSpec {
    pub fn build(&self, group: &FiniteGroup) -> Result<Cochain> {
        Cochain::new(group, self.degree, self.values.iter().map(|&(re, im)| C64::new(re, im)).collect())
    }

    pub fn describe(c: &Cochain) -> Self {
        Self { degree: c.degree, values: c.values.iter().map(|z| (z.re, z.im)).collect() }
    }
}
