//! The twisted crossed product on ℓ¹(G; 𝒜) with 𝒜 all functions on a finite
//! group, and its Schrödinger representation on ℓ²(G).
//!
//! Symbols are two-variable functions Φ(q; x), stored row-major with q as the row.

use serde::{Deserialize, Serialize};

use crate::cohomology::{is_cocycle, Cochain, COCYCLE_TOL};
use crate::dual::{CMat, C64};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, FiniteTau};

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolAG {
    order: usize,
    values: Vec<C64>,
}

impl SymbolAG {
    pub fn new(group: &FiniteGroup, values: Vec<C64>) -> Result<Self> {
        let n = group.order();
        if values.len() != n * n {
            return Err(Error::Shape(format!("{} values for a symbol over a group of order {n}", values.len())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("symbol entry".into()));
        }
        Ok(Self { order: n, values })
    }

    pub fn from_fn(group: &FiniteGroup, f: impl FnMut(usize, usize) -> C64) -> Self {
        let n = group.order();
        let mut f = f;
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self { order: n, values }
    }

    pub fn zeros(group: &FiniteGroup) -> Self {
        Self::from_fn(group, |_, _| C64::new(0.0, 0.0))
    }

    /// a ⊗ δ_x₀: Φ(q; x) = a(q) δ_{x,x₀}.
    pub fn multiplier_at(group: &FiniteGroup, a: &[C64], x0: usize) -> Self {
        Self::from_fn(group, |q, x| if x == x0 { a[q] } else { C64::new(0.0, 0.0) })
    }

    pub fn random(group: &FiniteGroup, rng: &mut impl rand::Rng) -> Self {
        Self::from_fn(group, |_, _| crate::random_c64(rng))
    }

    #[inline]
    pub fn get(&self, q: usize, x: usize) -> C64 {
        self.values[q * self.order + x]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// ‖Φ‖₍₁₎ = Σₓ max_q |Φ(q; x)|
    pub fn norm_l1(&self) -> f64 {
        (0..self.order).map(|x| (0..self.order).map(|q| self.get(q, x).norm()).fold(0.0, f64::max)).sum()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn check(&self, group: &FiniteGroup) -> Result<()> {
        if self.order != group.order() {
            return Err(Error::BackendMismatch(format!(
                "symbol over a group of order {} used with order {}",
                self.order,
                group.order()
            )));
        }
        Ok(())
    }
}

fn check_cochain(group: &FiniteGroup, c: &Cochain, degree: usize) -> Result<()> {
    if c.order() != group.order() || c.degree() != degree {
        return Err(Error::BackendMismatch(format!(
            "expected a degree-{degree} cochain over order {}, got degree {} over order {}",
            group.order(),
            c.degree(),
            c.order()
        )));
    }
    Ok(())
}

fn check_tau(group: &FiniteGroup, tau: &FiniteTau) -> Result<()> {
    if tau.0.len() != group.order() || tau.0.iter().any(|&t| t >= group.order()) {
        return Err(Error::UnsupportedTau(format!("table {:?} does not fit a group of order {}", tau.0, group.order())));
    }
    Ok(())
}

/// (Φ ⋄ Ψ)(q; x) = Σ_y Φ(τ(y)⁻¹τ(x)q; y) Ψ(τ(y⁻¹x)⁻¹y⁻¹τ(x)q; y⁻¹x) γ(τ(x)q; y, y⁻¹x)
pub fn twisted_product(group: &FiniteGroup, phi: &SymbolAG, psi: &SymbolAG, gamma: &Cochain, tau: &FiniteTau) -> Result<SymbolAG> {
    phi.check(group)?;
    psi.check(group)?;
    check_cochain(group, gamma, 2)?;
    check_tau(group, tau)?;
    let check = is_cocycle(group, gamma, COCYCLE_TOL)?;
    if !check.holds {
        return Err(Error::NotACocycle { defect: check.max_defect });
    }
    let g = group;
    Ok(SymbolAG::from_fn(group, |q, x| {
        let txq = g.mul(tau.at(x), q);
        let mut acc = C64::new(0.0, 0.0);
        for y in g.elements() {
            let yi = g.inv(y);
            let yix = g.mul(yi, x);
            let p1 = g.mul(g.inv(tau.at(y)), txq);
            let p2 = g.mul(g.inv(tau.at(yix)), g.mul(yi, txq));
            acc += phi.get(p1, y) * psi.get(p2, yix) * gamma.at2(txq, y, yix);
        }
        acc
    }))
}

/// Φ^⋄(q; x) = conj γ(τ(x)q; x, x⁻¹) · conj Φ(τ(x⁻¹)⁻¹x⁻¹τ(x)q; x⁻¹)
pub fn twisted_involution(group: &FiniteGroup, phi: &SymbolAG, gamma: &Cochain, tau: &FiniteTau) -> Result<SymbolAG> {
    phi.check(group)?;
    check_cochain(group, gamma, 2)?;
    check_tau(group, tau)?;
    let g = group;
    Ok(SymbolAG::from_fn(group, |q, x| {
        let xi = g.inv(x);
        let txq = g.mul(tau.at(x), q);
        let p = g.mul(g.inv(tau.at(xi)), g.mul(xi, txq));
        gamma.at2(txq, x, xi).conj() * phi.get(p, xi).conj()
    }))
}

/// Integral kernel of the Schrödinger representation: K(q, y) = β(q; qy⁻¹) Φ(τ(qy⁻¹)⁻¹q; qy⁻¹).
pub fn schrodinger(group: &FiniteGroup, phi: &SymbolAG, beta: &Cochain, tau: &FiniteTau) -> Result<CMat> {
    phi.check(group)?;
    check_cochain(group, beta, 1)?;
    check_tau(group, tau)?;
    let g = group;
    let n = g.order();
    Ok(CMat::from_fn(n, n, |q, y| {
        let z = g.mul(q, g.inv(y));
        beta.at1(q, z) * phi.get(g.mul(g.inv(tau.at(z)), q), z)
    }))
}

/// Θ_{τ,τ′}Φ(q; x) = Φ(τ′(x)⁻¹τ(x)q; x); intertwines Sch^{τ′} with Sch^{τ}.
pub fn retau(group: &FiniteGroup, phi: &SymbolAG, tau: &FiniteTau, tau_prime: &FiniteTau) -> Result<SymbolAG> {
    phi.check(group)?;
    check_tau(group, tau)?;
    check_tau(group, tau_prime)?;
    let g = group;
    Ok(SymbolAG::from_fn(group, |q, x| phi.get(g.mul(g.inv(tau_prime.at(x)), g.mul(tau.at(x), q)), x)))
}

/// Υ_β Φ(q; x) = Φ(q; x) β(q; x).
pub fn recocycle(group: &FiniteGroup, phi: &SymbolAG, beta: &Cochain) -> Result<SymbolAG> {
    phi.check(group)?;
    check_cochain(group, beta, 1)?;
    Ok(SymbolAG::from_fn(group, |q, x| phi.get(q, x) * beta.at1(q, x)))
}

/// [T_β(y)u](q) = β(q; y) u(y⁻¹q)
pub fn translation(group: &FiniteGroup, beta: &Cochain, y: usize) -> Result<CMat> {
    check_cochain(group, beta, 1)?;
    let n = group.order();
    let yi = group.inv(y);
    let mut m = CMat::zeros(n, n);
    for q in group.elements() {
        m[(q, group.mul(yi, q))] = beta.at1(q, y);
    }
    Ok(m)
}

/// Multiplication operator by a.
pub fn rho(a: &[C64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(a))
}

/// Serialized symbol: row q, column x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolAGSpec {
    pub values: Vec<Vec<(f64, f64)>>,
}

impl SymbolAGSpec {
    pub fn build(&self, group: &FiniteGroup) -> Result<SymbolAG> {
        if self.values.len() != group.order() || self.values.iter().any(|r| r.len() != group.order()) {
            return Err(Error::Shape(format!("symbol file must be {0}×{0}", group.order())));
        }
        SymbolAG::new(group, self.values.iter().flatten().map(|&(re, im)| C64::new(re, im)).collect())
    }

    pub fn describe(phi: &SymbolAG) -> Self {
        Self { values: phi.values.chunks(phi.order).map(|r| r.iter().map(|z| (z.re, z.im)).collect()).collect() }
    }
}
