//! Randomized checks of the finite-group identities: Fourier analysis, cochains,
//! twisted crossed products and the operator calculus.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{coboundary, gauge_between, pseudo_trivialize, trivialize, Cochain};
use crate::crossed::{recocycle, retau, rho, schrodinger, translation, twisted_involution, twisted_product, SymbolAG};
use crate::dual::{dual_selfcheck, fourier, hs_inner, inverse_fourier, max_abs, CMat, UnitaryDual, C64};
use crate::error::Result;
use crate::group::{FiniteGroup, FiniteTau};
use crate::opcalc::{
    compose_symbols, dual_transform, fourier_wigner, involute_symbol, op, rank_one, symbol_of, twisted_convolution, u_op, v_op, weyl, wigner,
    wigner_direct, OpSymbol,
};
use crate::report::CheckResult;

pub const FINITE_GROUPS: [&str; 6] = ["Z2", "Z3", "Z6", "S3", "D4", "Q8"];
pub const DEFAULT_INSTANCES: usize = 24;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest defect per identity, with accumulated time.
#[derive(Default)]
pub(crate) struct Acc {
    entries: BTreeMap<String, (String, f64, Duration)>,
}

impl Acc {
    pub(crate) fn run(&mut self, id: &str, anchor: &str, f: impl FnOnce() -> Result<f64>) -> Result<()> {
        let start = Instant::now();
        let d = f()?;
        let e = self.entries.entry(id.to_string()).or_insert_with(|| (anchor.to_string(), 0.0, Duration::ZERO));
        // NaN must stick
        e.1 = if d.is_nan() || e.1.is_nan() { f64::NAN } else { e.1.max(d) };
        e.2 += start.elapsed();
        Ok(())
    }

    pub(crate) fn finish(self, suite: &str, prefix: &str, tol: f64) -> Vec<CheckResult> {
        self.entries
            .into_iter()
            .map(|(id, (anchor, d, t))| {
                let mut r = CheckResult::new(suite, &format!("{prefix}{id}"), &anchor, d, tol);
                r.wall_ms = Some(t.as_secs_f64() * 1e3);
                r
            })
            .collect()
    }
}

pub(crate) fn name_seed(seed: u64, name: &str) -> u64 {
    name.bytes().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn dist(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

fn random_vec(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n).map(|_| crate::random_c64(rng)).collect()
}

pub(crate) fn random_tau(g: &FiniteGroup, rng: &mut impl Rng) -> FiniteTau {
    FiniteTau((0..g.order()).map(|_| rng.random_range(0..g.order())).collect())
}

fn one_minus(c: &Cochain) -> f64 {
    c.values().iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max)
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Runs every identity on `instances` random inputs for one group.
pub fn check_group(name: &str, instances: usize, seed: u64, tol: f64) -> Result<Vec<CheckResult>> {
    let g = FiniteGroup::by_name(name)?;
    let dual = UnitaryDual::shipped(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(name_seed(seed, name));
    let mut acc = Acc::default();
    let n = g.order();
    let e = g.identity();

    acc.run("dual.selfcheck", "orthogonality and completeness of the shipped irreducibles", || Ok(dual_selfcheck(&g, &dual).max_defect()))?;

    for _ in 0..instances {
        let beta = Cochain::random(&g, 1, &mut rng);
        let gamma = coboundary(&g, &beta)?;
        let tau = random_tau(&g, &mut rng);
        let tau2 = random_tau(&g, &mut rng);
        let tau_e = FiniteTau(vec![e; n]);
        let phi = SymbolAG::random(&g, &mut rng);
        let psi = SymbolAG::random(&g, &mut rng);
        let xi = SymbolAG::random(&g, &mut rng);
        let u = random_vec(n, &mut rng);
        let v = random_vec(n, &mut rng);
        let u2 = random_vec(n, &mut rng);
        let v2 = random_vec(n, &mut rng);
        let f = OpSymbol::random(&g, &dual, &mut rng);
        let h = OpSymbol::random(&g, &dual, &mut rng);
        let k = OpSymbol::random(&g, &dual, &mut rng);
        let gauge = Cochain::random(&g, 0, &mut rng);
        let x = rng.random_range(0..n);
        let y = rng.random_range(0..n);
        let irrep = rng.random_range(0..dual.len());

        acc.run("dual.plancherel", "Plancherel identity and Fourier inversion", || {
            let uh = fourier(&g, &dual, &u)?;
            let lhs: f64 = u.iter().map(|z| z.norm_sqr()).sum();
            let back = inverse_fourier(&g, &dual, &uh)?;
            let inv = u.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            Ok((lhs - uh.norm_sqr(&dual)).abs().max(inv))
        })?;

        acc.run("cochain.delta_squared", "the coboundary squares to one in degrees 0, 1 and 2", || {
            let c2 = Cochain::random(&g, 2, &mut ChaCha8Rng::seed_from_u64(rng_peek(&u)));
            Ok(one_minus(&coboundary(&g, &coboundary(&g, &gauge)?)?)
                .max(one_minus(&coboundary(&g, &gamma)?))
                .max(one_minus(&coboundary(&g, &coboundary(&g, &c2)?)?)))
        })?;

        acc.run("cochain.trivialize", "explicit primitives of a cocycle: trivialization and pseudo-trivialization", || {
            let t = coboundary(&g, &trivialize(&g, &gamma)?)?;
            let p = coboundary(&g, &pseudo_trivialize(&g, &gamma)?)?;
            let one_cocycle = coboundary(&g, &gauge)?;
            let t1 = coboundary(&g, &trivialize(&g, &one_cocycle)?)?;
            Ok(t.distance(&gamma)?.max(p.distance(&gamma)?).max(t1.distance(&one_cocycle)?))
        })?;

        acc.run("cochain.gauge", "two trivializations of one cocycle differ by a gauge, unique up to a constant phase", || {
            let beta2 = coboundary(&g, &gauge)?.mul(&beta)?;
            let a = gauge_between(&g, &beta, &beta2)?;
            let rebuilt = coboundary(&g, &a)?.mul(&beta)?;
            let ratio0 = a.at0(e) / gauge.at0(e);
            let phase = g.elements().map(|q| (a.at0(q) / gauge.at0(q) - ratio0).norm()).fold(0.0, f64::max);
            Ok(rebuilt.distance(&beta2)?.max(phase))
        })?;

        acc.run("crossed.associativity", "the twisted product is associative", || {
            let l = twisted_product(&g, &twisted_product(&g, &phi, &psi, &gamma, &tau)?, &xi, &gamma, &tau)?;
            let r = twisted_product(&g, &phi, &twisted_product(&g, &psi, &xi, &gamma, &tau)?, &gamma, &tau)?;
            Ok(l.distance(&r))
        })?;

        acc.run("crossed.involution", "the involution is involutive, isometric and anti-multiplicative", || {
            let s = twisted_involution(&g, &phi, &gamma, &tau)?;
            let ss = twisted_involution(&g, &s, &gamma, &tau)?;
            let prod = twisted_involution(&g, &twisted_product(&g, &phi, &psi, &gamma, &tau)?, &gamma, &tau)?;
            let rev = twisted_product(&g, &twisted_involution(&g, &psi, &gamma, &tau)?, &s, &gamma, &tau)?;
            Ok(ss.distance(&phi).max((s.norm_l1() - phi.norm_l1()).abs()).max(prod.distance(&rev)))
        })?;

        acc.run("crossed.schrodinger", "the Schrödinger representation is a *-homomorphism", || {
            let sp = schrodinger(&g, &phi, &beta, &tau)?;
            let sq = schrodinger(&g, &psi, &beta, &tau)?;
            let prod = schrodinger(&g, &twisted_product(&g, &phi, &psi, &gamma, &tau)?, &beta, &tau)?;
            let star = schrodinger(&g, &twisted_involution(&g, &phi, &gamma, &tau)?, &beta, &tau)?;
            Ok(dist(&prod, &(&sp * &sq)).max(dist(&star, &sp.adjoint())))
        })?;

        acc.run("crossed.covariance", "translations and multipliers form a twisted covariant pair", || {
            let tx = translation(&g, &beta, x)?;
            let ty = translation(&g, &beta, y)?;
            let txy = translation(&g, &beta, g.mul(x, y))?;
            let gxy: Vec<C64> = g.elements().map(|q| gamma.at2(q, x, y)).collect();
            let a = random_vec(n, &mut ChaCha8Rng::seed_from_u64(rng_peek(&v)));
            let moved: Vec<C64> = g.elements().map(|q| a[g.mul(g.inv(x), q)]).collect();
            Ok(dist(&(&tx * &ty), &(rho(&gxy) * &txy)).max(dist(&(&tx * rho(&a) * tx.adjoint()), &rho(&moved))))
        })?;

        acc.run("crossed.retau", "changing the ordering map intertwines the representations and the products", || {
            let moved = retau(&g, &phi, &tau, &tau2)?;
            let l = schrodinger(&g, &phi, &beta, &tau2)?;
            let r = schrodinger(&g, &moved, &beta, &tau)?;
            let gamma_prod = retau(&g, &twisted_product(&g, &phi, &psi, &gamma, &tau2)?, &tau, &tau2)?;
            let moved_prod = twisted_product(&g, &moved, &retau(&g, &psi, &tau, &tau2)?, &gamma, &tau)?;
            Ok(dist(&l, &r).max(gamma_prod.distance(&moved_prod)))
        })?;

        acc.run("crossed.untwist", "multiplying by the trivialization untwists the product and the involution", || {
            let one = Cochain::one(&g, 2);
            let l = recocycle(&g, &twisted_product(&g, &phi, &psi, &gamma, &tau_e)?, &beta)?;
            let r = twisted_product(&g, &recocycle(&g, &phi, &beta)?, &recocycle(&g, &psi, &beta)?, &one, &tau_e)?;
            let ls = recocycle(&g, &twisted_involution(&g, &phi, &gamma, &tau_e)?, &beta)?;
            let rs = twisted_involution(&g, &recocycle(&g, &phi, &beta)?, &one, &tau_e)?;
            Ok(l.distance(&r).max(ls.distance(&rs)))
        })?;

        acc.run("crossed.gauge", "a gauge change of β conjugates the representation by a multiplier", || {
            let beta2 = coboundary(&g, &gauge)?.mul(&beta)?;
            let a: Vec<C64> = g.elements().map(|q| gauge.at0(q)).collect();
            let l = schrodinger(&g, &phi, &beta2, &tau)?;
            let r = rho(&a).adjoint() * schrodinger(&g, &phi, &beta, &tau)? * rho(&a);
            let lo = op(&g, &dual, &f, &beta2, &tau)?;
            let ro = rho(&a).adjoint() * op(&g, &dual, &f, &beta, &tau)? * rho(&a);
            Ok(dist(&l, &r).max(dist(&lo, &ro)))
        })?;

        acc.run("opcalc.bijective", "quantization is invertible and sends the unit symbol to the identity", || {
            let t = op(&g, &dual, &f, &beta, &tau)?;
            let back = symbol_of(&g, &dual, &t, &beta, &tau)?;
            let one = op(&g, &dual, &OpSymbol::identity(&g, &dual), &beta, &tau)?;
            Ok(back.distance(&f).max(dist(&one, &CMat::identity(n, n))))
        })?;

        acc.run("opcalc.unitary", "quantization is unitary onto Hilbert–Schmidt operators", || {
            let l = f.inner(&h, &dual);
            let r = hs_inner(&op(&g, &dual, &f, &beta, &tau)?, &op(&g, &dual, &h, &beta, &tau)?);
            Ok((l - r).norm())
        })?;

        acc.run("opcalc.crossed", "quantization equals the Schrödinger representation of the partial inverse Fourier transform", || {
            let phi_f = SymbolAG::from_fn(&g, |q, z| {
                dual.irreps().iter().enumerate().map(|(kk, r)| crate::dual::trace_of_product(r.at(z), f.block(q, kk)) * dual.weight(kk)).sum()
            });
            Ok(dist(&op(&g, &dual, &f, &beta, &tau)?, &schrodinger(&g, &phi_f, &beta, &tau)?))
        })?;

        acc.run("opcalc.hstar", "the symbol algebra is an H*-algebra", || {
            let fh = compose_symbols(&g, &dual, &f, &h, &beta, &tau)?;
            let assoc = compose_symbols(&g, &dual, &fh, &k, &beta, &tau)?
                .distance(&compose_symbols(&g, &dual, &f, &compose_symbols(&g, &dual, &h, &k, &beta, &tau)?, &beta, &tau)?);
            let fs = involute_symbol(&g, &dual, &f, &beta, &tau)?;
            let hs = involute_symbol(&g, &dual, &h, &beta, &tau)?;
            let invol = involute_symbol(&g, &dual, &fs, &beta, &tau)?.distance(&f);
            let iso = (hs.inner(&fs, &dual) - f.inner(&h, &dual)).norm();
            // ⟨h # k, f⟩ = ⟨k, h^# # f⟩
            let hk = compose_symbols(&g, &dual, &h, &k, &beta, &tau)?;
            let adj = (hk.inner(&f, &dual) - k.inner(&compose_symbols(&g, &dual, &hs, &f, &beta, &tau)?, &dual)).norm();
            let anti = involute_symbol(&g, &dual, &fh, &beta, &tau)?.distance(&compose_symbols(&g, &dual, &hs, &fs, &beta, &tau)?);
            Ok(assoc.max(invol).max(iso).max(adj).max(anti))
        })?;

        acc.run("opcalc.wigner", "Wigner transforms: direct sum quantizes to the rank-one operator, orthogonality, pairing and composition", || {
            let w = wigner(&g, &dual, &u, &v, &beta, &tau)?;
            let wd = wigner_direct(&g, &dual, &u, &v, &beta, &tau)?;
            let direct = wd.distance(&w).max(dist(&op(&g, &dual, &wd, &beta, &tau)?, &rank_one(&u, &v)));
            let w2 = wigner(&g, &dual, &u2, &v2, &beta, &tau)?;
            let ip = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(p, q)| p * q.conj()).sum() };
            let orth = (w.inner(&w2, &dual) - ip(&u2, &u) * ip(&v, &v2)).norm();
            let tu = op(&g, &dual, &f, &beta, &tau)? * crate::dual::CMat::from_column_slice(n, 1, &u);
            let pair = (ip(tu.as_slice(), &v) - f.inner(&w, &dual)).norm();
            let comp = compose_symbols(&g, &dual, &w, &w2, &beta, &tau)?.distance(&wigner(&g, &dual, &u2, &v, &beta, &tau)?.scale(ip(&v2, &u)));
            let star = involute_symbol(&g, &dual, &w, &beta, &tau)?.distance(&wigner(&g, &dual, &v, &u, &beta, &tau)?);
            Ok(direct.max(orth).max(pair).max(comp).max(star))
        })?;

        acc.run("opcalc.fourier_wigner", "Fourier–Wigner transforms: Weyl matrix elements, orthogonality and pairing", || {
            let fw = fourier_wigner(&g, &dual, &u, &v, &beta, &tau)?;
            let fw2 = fourier_wigner(&g, &dual, &u2, &v2, &beta, &tau)?;
            let w = wigner(&g, &dual, &u, &v, &beta, &tau)?;
            let dt = dual_transform(&g, &dual, &w)?;
            let same = fw.blocks().iter().zip(dt.blocks()).map(|(a, b)| dist(a, b)).fold(0.0, f64::max);
            let ip = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(p, q)| p * q.conj()).sum() };
            let orth = (fw.inner(&fw2, &dual) - ip(&u2, &u) * ip(&v, &v2)).norm();
            let tu = op(&g, &dual, &f, &beta, &tau)? * CMat::from_column_slice(n, 1, &u);
            let pair = (ip(tu.as_slice(), &v) - dual_transform(&g, &dual, &f)?.inner(&fw, &dual)).norm();
            // ⟨W(ξ,x)(ū⊗φ), v̄⊗ψ⟩ = ψ* 𝒲(ξ,x) φ
            let d = dual.dims()[irrep];
            let wm = weyl(&g, &dual, irrep, x, &beta, &tau)?;
            let mut elem: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    let theta = CMat::from_fn(n * d, 1, |r, _| if r % d == i { u[r / d].conj() } else { C64::new(0.0, 0.0) });
                    let lhs: C64 = (&wm * theta).iter().enumerate().filter(|(r, _)| r % d == j).map(|(r, z)| z * v[r / d]).sum();
                    elem = elem.max((lhs - fw.block(irrep, x)[(j, i)]).norm());
                }
            }
            Ok(same.max(orth).max(pair).max(elem))
        })?;

        acc.run("opcalc.weyl", "Weyl system: factorization, unitarity and the commutation relations", || {
            let d = dual.dims()[irrep];
            let r = &dual.irreps()[irrep];
            let ux = u_op(&g, &beta, x)?;
            let uy = u_op(&g, &beta, y)?;
            let uxy = u_op(&g, &beta, g.mul(x, y))?;
            let vv = v_op(&g, &dual, irrep)?;
            let id_n = CMat::identity(n, n);
            let id_d = CMat::identity(d, d);
            let wm = weyl(&g, &dual, irrep, x, &beta, &tau)?;
            let fact = dist(&wm, &(&vv * kron(&id_n, r.at(tau.at(x))) * kron(&ux, &id_d)));
            let unit = dist(&(&wm * wm.adjoint()), &CMat::identity(n * d, n * d));
            let gbar: Vec<C64> = g.elements().map(|q| gamma.at2(q, x, y).conj()).collect();
            let uu = dist(&(&ux * &uy), &(rho(&gbar) * &uxy));
            let comm = dist(&(kron(&ux, &id_d) * &vv), &(&vv * kron(&id_n, r.at(x)) * kron(&ux, &id_d)));
            Ok(fact.max(unit).max(uu).max(comm))
        })?;

        acc.run("opcalc.integrated", "integrated translations are twisted convolutions", || {
            let mut sum = CMat::zeros(n, n);
            for z in g.elements() {
                sum += u_op(&g, &beta, z)? * u[z];
            }
            let beta_bar = Cochain::from_fn(&g, 1, |q, xs| beta.at1(q, xs[0]).conj())?;
            let conv = twisted_convolution(&g, &u, &beta)?;
            let as_crossed = schrodinger(&g, &SymbolAG::from_fn(&g, |_, z| u[z]), &beta, &tau_e)?;
            Ok(dist(&sum, &twisted_convolution(&g, &u, &beta_bar)?).max(dist(&conv, &as_crossed)))
        })?;

        acc.run("opcalc.factorization", "with trivial ordering a ⊗ φ quantizes to a multiplier times a twisted convolution", || {
            let a = random_vec(n, &mut ChaCha8Rng::seed_from_u64(rng_peek(&u2)));
            let field = crate::dual::fourier(&g, &dual, &v2)?;
            let l = op(&g, &dual, &OpSymbol::tensor(&g, &dual, &a, &field), &beta, &tau_e)?;
            let r = rho(&a) * twisted_convolution(&g, &inverse_fourier(&g, &dual, &field)?, &beta)?;
            Ok(dist(&l, &r))
        })?;
    }
    Ok(acc.finish("finite", &format!("{name}."), tol))
}

/// Derives a seed from data already drawn, so auxiliary samples do not shift the main stream.
fn rng_peek(u: &[C64]) -> u64 {
    u.iter().fold(0u64, |h, z| h.rotate_left(7) ^ z.re.to_bits() ^ z.im.to_bits().rotate_left(32))
}

pub fn finite_suite(groups: &[&str], instances: usize, seed: u64, tol: f64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for name in groups {
        out.extend(check_group(name, instances, seed, tol)?);
    }
    Ok(out)
}
