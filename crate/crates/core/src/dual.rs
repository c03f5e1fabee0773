//! Unitary duals of finite groups, the Plancherel weights d_ξ/|G| and the
//! operator-valued Fourier transform û(ξ) = Σₓ u(x) ξ(x)*.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, FiniteKind, S3_PERMUTATIONS};

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct Irrep {
    pub label: String,
    dim: usize,
    matrices: Vec<CMat>,
}

impl Irrep {
    pub fn new(label: impl Into<String>, matrices: Vec<CMat>) -> Result<Self> {
        let dim = matrices.first().map(|m| m.nrows()).ok_or_else(|| Error::InvalidDual("irrep without matrices".into()))?;
        if dim == 0 || matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::InvalidDual("irrep matrices must be square of a common positive size".into()));
        }
        if matrices.iter().any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::NonFinite("irrep matrix entry".into()));
        }
        Ok(Self { label: label.into(), dim, matrices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, x: usize) -> &CMat {
        &self.matrices[x]
    }

    pub fn character(&self, x: usize) -> C64 {
        self.matrices[x].trace()
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryDual {
    irreps: Vec<Irrep>,
    group_order: usize,
}

impl UnitaryDual {
    pub fn new(group: &FiniteGroup, irreps: Vec<Irrep>) -> Result<Self> {
        if irreps.is_empty() {
            return Err(Error::InvalidDual("empty dual".into()));
        }
        for r in &irreps {
            if r.matrices.len() != group.order() {
                return Err(Error::InvalidDual(format!(
                    "irrep {} has {} matrices for a group of order {}",
                    r.label,
                    r.matrices.len(),
                    group.order()
                )));
            }
        }
        Ok(Self { irreps, group_order: group.order() })
    }

    /// The dual shipped with one of the named groups.
    pub fn shipped(group: &FiniteGroup) -> Result<Self> {
        let irreps = match group.kind() {
            FiniteKind::Cyclic(n) => cyclic_characters(n),
            FiniteKind::Symmetric3 => s3_irreps(),
            FiniteKind::Dihedral4 => d4_irreps(),
            FiniteKind::Quaternion => q8_irreps(),
            FiniteKind::Custom => {
                return Err(Error::InvalidDual("custom groups need an explicit dual definition".into()))
            }
        };
        Self::new(group, irreps)
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(Irrep::dim).collect()
    }

    /// Plancherel weight d_ξ/|G|.
    #[inline]
    pub fn weight(&self, xi: usize) -> f64 {
        self.irreps[xi].dim as f64 / self.group_order as f64
    }

    /// Index of the trivial representation, if present.
    pub fn trivial_index(&self) -> Option<usize> {
        self.irreps.iter().position(|r| {
            r.dim == 1 && r.matrices.iter().all(|m| (m[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12)
        })
    }

    fn check_group(&self, group: &FiniteGroup) -> Result<()> {
        if group.order() != self.group_order {
            return Err(Error::InvalidDual(format!(
                "dual of a group of order {} used with a group of order {}",
                self.group_order,
                group.order()
            )));
        }
        Ok(())
    }
}

/// Element of 𝓑²(Ĝ): one d_ξ×d_ξ block per irrep.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorField {
    pub blocks: Vec<CMat>,
}

impl OperatorField {
    pub fn zeros(dual: &UnitaryDual) -> Self {
        Self { blocks: dual.irreps.iter().map(|r| CMat::zeros(r.dim, r.dim)).collect() }
    }

    pub fn identity(dual: &UnitaryDual) -> Self {
        Self { blocks: dual.irreps.iter().map(|r| CMat::identity(r.dim, r.dim)).collect() }
    }

    /// Σ_ξ (d_ξ/|G|) Tr[φ(ξ) ψ(ξ)*]
    pub fn inner(&self, other: &Self, dual: &UnitaryDual) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .enumerate()
            .map(|(k, (a, b))| hs_inner(a, b) * dual.weight(k))
            .sum()
    }

    pub fn norm_sqr(&self, dual: &UnitaryDual) -> f64 {
        self.inner(self, dual).re
    }
}

/// Tr[A B*]
#[inline]
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn fourier(group: &FiniteGroup, dual: &UnitaryDual, u: &[C64]) -> Result<OperatorField> {
    dual.check_group(group)?;
    if u.len() != group.order() {
        return Err(Error::Shape(format!("function of length {} on a group of order {}", u.len(), group.order())));
    }
    let blocks = dual
        .irreps
        .iter()
        .map(|r| {
            let mut acc = CMat::zeros(r.dim, r.dim);
            for (x, &ux) in u.iter().enumerate() {
                acc += r.at(x).adjoint() * ux;
            }
            acc
        })
        .collect();
    Ok(OperatorField { blocks })
}

/// u(x) = Σ_ξ (d_ξ/|G|) Tr[ξ(x) φ(ξ)]
pub fn inverse_fourier(group: &FiniteGroup, dual: &UnitaryDual, phi: &OperatorField) -> Result<Vec<C64>> {
    dual.check_group(group)?;
    if phi.blocks.len() != dual.len() {
        return Err(Error::Shape("operator field does not match the dual".into()));
    }
    Ok(group
        .elements()
        .map(|x| {
            dual.irreps
                .iter()
                .zip(&phi.blocks)
                .enumerate()
                .map(|(k, (r, b))| trace_of_product(r.at(x), b) * dual.weight(k))
                .sum()
        })
        .collect())
}

/// Tr[AB] without forming the product.
#[inline]
pub fn trace_of_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

/// Defects certifying that a dual is a complete set of inequivalent unitary irreps.
#[derive(Debug, Clone, Serialize)]
pub struct DualDiagnostics {
    pub unitarity: f64,
    pub multiplicativity: f64,
    pub schur_orthogonality: f64,
    pub completeness: f64,
    pub inequivalence: f64,
}

impl DualDiagnostics {
    pub fn max_defect(&self) -> f64 {
        [self.unitarity, self.multiplicativity, self.schur_orthogonality, self.completeness, self.inequivalence]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn accepted(&self, tol: f64) -> bool {
        self.max_defect() < tol
    }
}

pub const DUAL_ACCEPT_TOL: f64 = 1e-10;

pub fn dual_selfcheck(group: &FiniteGroup, dual: &UnitaryDual) -> DualDiagnostics {
    let n = group.order();
    let mut unitarity: f64 = 0.0;
    let mut multiplicativity: f64 = 0.0;
    for r in &dual.irreps {
        let id = CMat::identity(r.dim, r.dim);
        for x in group.elements() {
            unitarity = unitarity.max(max_abs(&(r.at(x) * r.at(x).adjoint() - &id)));
            for y in group.elements() {
                multiplicativity = multiplicativity.max(max_abs(&(r.at(x) * r.at(y) - r.at(group.mul(x, y)))));
            }
        }
    }
    // Σ_x ξ(x)_{ij} conj η(x)_{kl} = (|G|/d_ξ) δ_{ξη} δ_{ik} δ_{jl}
    let mut schur: f64 = 0.0;
    for (a, ra) in dual.irreps.iter().enumerate() {
        for (b, rb) in dual.irreps.iter().enumerate() {
            for i in 0..ra.dim {
                for j in 0..ra.dim {
                    for k in 0..rb.dim {
                        for l in 0..rb.dim {
                            let s: C64 = group.elements().map(|x| ra.at(x)[(i, j)] * rb.at(x)[(k, l)].conj()).sum();
                            let expected = if a == b && i == k && j == l { n as f64 / ra.dim as f64 } else { 0.0 };
                            schur = schur.max((s - expected).norm());
                        }
                    }
                }
            }
        }
    }
    let sum_sq: usize = dual.irreps.iter().map(|r| r.dim * r.dim).sum();
    let completeness = (sum_sq as f64 - n as f64).abs();
    let mut inequivalence: f64 = 0.0;
    for (a, ra) in dual.irreps.iter().enumerate() {
        for (b, rb) in dual.irreps.iter().enumerate() {
            let ip: C64 = group.elements().map(|x| ra.character(x) * rb.character(x).conj()).sum::<C64>() / n as f64;
            let expected = if a == b { 1.0 } else { 0.0 };
            inequivalence = inequivalence.max((ip - expected).norm());
        }
    }
    DualDiagnostics { unitarity, multiplicativity, schur_orthogonality: schur, completeness, inequivalence }
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn scalar(z: C64) -> CMat {
    CMat::from_element(1, 1, z)
}

fn real2(a: [[f64; 2]; 2]) -> CMat {
    CMat::from_fn(2, 2, |i, j| C64::new(a[i][j], 0.0))
}

fn cyclic_characters(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|k| {
            let mats = (0..n)
                .map(|x| scalar(C64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((k * x) % n) as f64 / n as f64)))
                .collect();
            Irrep::new(format!("chi{k}"), mats).unwrap()
        })
        .collect()
}

fn s3_irreps() -> Vec<Irrep> {
    let sign = |p: &[usize; 3]| {
        let inv = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inv % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s6 = 1.0 / 6f64.sqrt();
    // orthonormal basis of the sum-zero plane
    let basis = DMatrix::from_row_slice(3, 2, &[s2, s6, -s2, s6, 0.0, -2.0 * s6]);
    let standard = S3_PERMUTATIONS
        .iter()
        .map(|p| {
            let mut perm = DMatrix::<f64>::zeros(3, 3);
            for i in 0..3 {
                perm[(p[i], i)] = 1.0;
            }
            let r = basis.transpose() * perm * &basis;
            r.map(|v| C64::new(v, 0.0))
        })
        .collect();
    vec![
        Irrep::new("trivial", S3_PERMUTATIONS.iter().map(|_| scalar(C64::new(1.0, 0.0))).collect()).unwrap(),
        Irrep::new("sign", S3_PERMUTATIONS.iter().map(|p| scalar(C64::new(sign(p), 0.0))).collect()).unwrap(),
        Irrep::new("standard", standard).unwrap(),
    ]
}

fn d4_irreps() -> Vec<Irrep> {
    let mut out = Vec::new();
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let mats = (0..8)
            .map(|e| {
                let (k, j) = (e % 4, e / 4);
                scalar(C64::new(f64::powi(a, k) * f64::powi(b, j), 0.0))
            })
            .collect();
        out.push(Irrep::new(format!("chi({a:+},{b:+})"), mats).unwrap());
    }
    let rot = real2([[0.0, -1.0], [1.0, 0.0]]);
    let refl = real2([[1.0, 0.0], [0.0, -1.0]]);
    let mats = (0..8)
        .map(|e| {
            let (k, j) = (e % 4, e / 4);
            let mut m = CMat::identity(2, 2);
            for _ in 0..k {
                m = &m * &rot;
            }
            if j == 1 {
                m = &m * &refl;
            }
            m
        })
        .collect();
    out.push(Irrep::new("rotation", mats).unwrap());
    out
}

fn q8_irreps() -> Vec<Irrep> {
    let i = C64::new(0.0, 1.0);
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let units = [
        CMat::identity(2, 2),
        CMat::from_row_slice(2, 2, &[i, o, o, -i]),
        CMat::from_row_slice(2, 2, &[o, one, -one, o]),
        CMat::from_row_slice(2, 2, &[o, i, i, o]),
    ];
    let mut out = Vec::new();
    for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let vals = [1.0, a, b, a * b];
        let mats = (0..8).map(|e| scalar(C64::new(vals[e / 2], 0.0))).collect();
        out.push(Irrep::new(format!("chi({a:+},{b:+})"), mats).unwrap());
    }
    let mats = (0..8).map(|e| if e % 2 == 0 { units[e / 2].clone() } else { -units[e / 2].clone() }).collect();
    out.push(Irrep::new("quaternion", mats).unwrap());
    out
}

/// Serialized dual: per irrep, one row-major matrix of (re, im) pairs per group element.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualSpec {
    pub irreps: Vec<IrrepSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrrepSpec {
    #[serde(default)]
    pub label: String,
    pub matrices: Vec<Vec<(f64, f64)>>,
}

impl DualSpec {
    pub fn build(&self, group: &FiniteGroup) -> Result<UnitaryDual> {
        let mut irreps = Vec::new();
        for spec in &self.irreps {
            let mut mats = Vec::new();
            for flat in &spec.matrices {
                let d = (flat.len() as f64).sqrt().round() as usize;
                if d * d != flat.len() {
                    return Err(Error::InvalidDual(format!("matrix with {} entries is not square", flat.len())));
                }
                mats.push(CMat::from_row_iterator(d, d, flat.iter().map(|&(re, im)| C64::new(re, im))));
            }
            irreps.push(Irrep::new(spec.label.clone(), mats)?);
        }
        UnitaryDual::new(group, irreps)
    }

    pub fn describe(dual: &UnitaryDual) -> Self {
        Self {
            irreps: dual
                .irreps
                .iter()
                .map(|r| IrrepSpec {
                    label: r.label.clone(),
                    matrices: r
                        .matrices
                        .iter()
                        .map(|m| m.transpose().iter().map(|z| (z.re, z.im)).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(n: usize, rng: &mut impl Rng) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    #[test]
    fn shipped_duals_pass_selfcheck() {
        for g in [
            FiniteGroup::trivial(),
            FiniteGroup::cyclic(2),
            FiniteGroup::cyclic(3),
            FiniteGroup::cyclic(6),
            FiniteGroup::symmetric3(),
            FiniteGroup::dihedral4(),
            FiniteGroup::quaternion(),
        ] {
            let dual = UnitaryDual::shipped(&g).unwrap();
            let diag = dual_selfcheck(&g, &dual);
            assert!(diag.max_defect() < 1e-12, "{}: {diag:?}", g.name());
        }
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(UnitaryDual::shipped(&s3).unwrap().dims(), vec![1, 1, 2]);
    }

    #[test]
    fn duplicated_irrep_is_rejected() {
        let g = FiniteGroup::symmetric3();
        let mut irreps = UnitaryDual::shipped(&g).unwrap().irreps().to_vec();
        irreps[1] = irreps[0].clone();
        let dual = UnitaryDual::new(&g, irreps).unwrap();
        let diag = dual_selfcheck(&g, &dual);
        assert!(diag.inequivalence > 0.5);
        assert!(!diag.accepted(DUAL_ACCEPT_TOL));
    }

    #[test]
    fn z2_fourier_of_delta() {
        let g = FiniteGroup::cyclic(2);
        let dual = UnitaryDual::shipped(&g).unwrap();
        let u = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let f = fourier(&g, &dual, &u).unwrap();
        assert_eq!(f.blocks[0][(0, 0)], C64::new(1.0, 0.0));
        assert!((f.blocks[1][(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_field_inverts_to_delta() {
        for g in [FiniteGroup::symmetric3(), FiniteGroup::quaternion(), FiniteGroup::cyclic(6)] {
            let dual = UnitaryDual::shipped(&g).unwrap();
            let u = inverse_fourier(&g, &dual, &OperatorField::identity(&dual)).unwrap();
            for x in g.elements() {
                let expected = if x == g.identity() { 1.0 } else { 0.0 };
                assert!((u[x] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn trivial_block_inverts_to_constant() {
        let g = FiniteGroup::dihedral4();
        let dual = UnitaryDual::shipped(&g).unwrap();
        let mut phi = OperatorField::zeros(&dual);
        phi.blocks[dual.trivial_index().unwrap()][(0, 0)] = C64::new(1.0, 0.0);
        let u = inverse_fourier(&g, &dual, &phi).unwrap();
        assert!(u.iter().all(|z| (z - 1.0 / 8.0).norm() < 1e-15));
    }

    #[test]
    fn plancherel_and_roundtrip_s3() {
        let g = FiniteGroup::symmetric3();
        let dual = UnitaryDual::shipped(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = random_fn(6, &mut rng);
            let uh = fourier(&g, &dual, &u).unwrap();
            let lhs: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            assert!((lhs - uh.norm_sqr(&dual)).abs() < 1e-12);
            let back = inverse_fourier(&g, &dual, &uh).unwrap();
            assert!(back.iter().zip(&u).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn convolution_orientation() {
        // (u*v)^ = v̂ û with û(ξ) = Σ u(x) ξ(x)*
        for g in [FiniteGroup::cyclic(3), FiniteGroup::symmetric3()] {
            let dual = UnitaryDual::shipped(&g).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let u = random_fn(g.order(), &mut rng);
            let v = random_fn(g.order(), &mut rng);
            let conv: Vec<C64> = g
                .elements()
                .map(|x| g.elements().map(|y| u[y] * v[g.mul(g.inv(y), x)]).sum())
                .collect();
            let (uh, vh, ch) = (
                fourier(&g, &dual, &u).unwrap(),
                fourier(&g, &dual, &v).unwrap(),
                fourier(&g, &dual, &conv).unwrap(),
            );
            for k in 0..dual.len() {
                assert!(max_abs(&(&ch.blocks[k] - &vh.blocks[k] * &uh.blocks[k])) < 1e-12);
            }
        }
    }

    #[test]
    fn dual_spec_roundtrip() {
        let g = FiniteGroup::quaternion();
        let dual = UnitaryDual::shipped(&g).unwrap();
        let json = serde_json::to_string(&DualSpec::describe(&dual)).unwrap();
        let back: DualSpec = serde_json::from_str(&json).unwrap();
        let rebuilt = back.build(&g).unwrap();
        for (a, b) in dual.irreps().iter().zip(rebuilt.irreps()) {
            for x in g.elements() {
                assert_eq!(a.at(x), b.at(x));
            }
        }
    }

    #[test]
    fn mismatched_group_is_an_error() {
        let dual = UnitaryDual::shipped(&FiniteGroup::cyclic(3)).unwrap();
        let g = FiniteGroup::cyclic(4);
        assert!(fourier(&g, &dual, &[C64::new(0.0, 0.0); 4]).is_err());
    }
}
