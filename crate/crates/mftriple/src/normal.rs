//! Triples (G, N, theta) with N normal: the inertia group, the unitary
//! extension Theta, the associated 2-cocycle (equalized), the twisted
//! convolution on I/N, and the multiplicity-free criterion with its
//! closed-form spherical functions `phi^chi = conj(chi~) Psi`, all
//! cross-checked against the generic engine.

use crate::group::{Group, GroupRef, SubgroupMask};
use crate::hecke::{HeckeEngine, Triple};
use crate::linalg::{dot, hermitian_eigen, principal_unit_sqrt, CMat, C, ONE, ZERO};
use crate::reps::{hom_space, induce, SubRep};
use std::sync::Arc;

pub struct NormalTriple {
    pub group: GroupRef,
    pub n_mask: SubgroupMask,
    pub theta: SubRep,
    pub v: Vec<C>,
}

impl NormalTriple {
    pub fn new(group: GroupRef, n_mask: SubgroupMask, theta: SubRep) -> NormalTriple {
        let mut v = vec![ZERO; theta.dim];
        v[0] = ONE;
        NormalTriple { group, n_mask, theta, v }
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.group;
        (0..g.n as u32).all(|x| {
            self.n_mask.members.iter().all(|&n| self.n_mask.contains(g.mul3(x, n, g.inv(x))))
        })
    }
}

/// Inertia group, equalized unitary extension and cocycle, and the scalar
/// function Psi.
pub struct CocycleData {
    pub inertia: SubgroupMask,
    /// Quotient I/N as an explicit group; index 0 is the coset N.
    pub quotient: GroupRef,
    /// Per inertia member position: its coset index in the quotient.
    pub coset_of_member: Vec<u32>,
    /// Equalized unitary extension, per inertia member position.
    pub theta_ext: Vec<CMat>,
    /// Equalized cocycle on the quotient, row-major m x m.
    pub eta: Vec<C>,
    /// Raw (pre-equalization) cocycle on the quotient.
    pub tau_raw: Vec<C>,
    /// Psi(h) = <v, Theta(h) v> per inertia member position.
    pub psi_big: Vec<C>,
}

#[derive(Debug, Clone)]
pub enum NormalError {
    NotNormal,
    IntertwinerRank(usize),
}

impl std::fmt::Display for NormalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormalError::NotNormal => write!(f, "N is not normal in G"),
            NormalError::IntertwinerRank(r) => {
                write!(f, "inertia intertwiner solve returned rank {r}, expected 1")
            }
        }
    }
}

impl std::error::Error for NormalError {}

pub fn inertia_and_cocycle(triple: &NormalTriple) -> Result<CocycleData, NormalError> {
    if !triple.is_normal() {
        return Err(NormalError::NotNormal);
    }
    let g = &triple.group;
    let theta = &triple.theta;
    let d = theta.dim;
    let chi_theta: Vec<C> = triple.n_mask.members.iter().map(|&n| theta.mat(n).trace()).collect();

    // Inertia group: g with ^g theta ~ theta, detected on characters.
    let inertia_members: Vec<u32> = (0..g.n as u32)
        .filter(|&x| {
            let xi = g.inv(x);
            triple.n_mask.members.iter().zip(&chi_theta).all(|(&n, &c)| {
                let conj = g.mul3(xi, n, x);
                (theta.mat(conj).trace() - c).norm() < 1e-9
            })
        })
        .collect();
    let inertia = SubgroupMask::new(g, inertia_members);

    // Coset transversal of N in I with the identity first.
    let mut coset_of_member = vec![u32::MAX; inertia.size()];
    let mut reps: Vec<u32> = Vec::new();
    let order: Vec<u32> = std::iter::once(g.id)
        .chain(inertia.members.iter().copied().filter(|&m| m != g.id))
        .collect();
    for &h in &order {
        if coset_of_member[inertia.pos(h)] != u32::MAX {
            continue;
        }
        let cid = reps.len() as u32;
        reps.push(h);
        for &n in &triple.n_mask.members {
            let x = g.mul(n, h);
            coset_of_member[inertia.pos(x)] = cid;
        }
    }
    let m = reps.len();

    // Quotient multiplication table.
    let mut qmul = vec![vec![0u32; m]; m];
    for (i, &qi) in reps.iter().enumerate() {
        for (j, &qj) in reps.iter().enumerate() {
            qmul[i][j] = coset_of_member[inertia.pos(g.mul(qi, qj))];
        }
    }
    let quotient = Arc::new(Group::from_mul_table("I/N", qmul));

    // Theta on the transversal: unitary intertwiners with
    // theta(q^-1 n q) = Theta(q)^-1 theta(n) Theta(q), phase-fixed.
    let mut theta_q: Vec<CMat> = Vec::with_capacity(m);
    for (ci, &q) in reps.iter().enumerate() {
        if ci == 0 {
            theta_q.push(CMat::eye(d));
            continue;
        }
        let qi = g.inv(q);
        let conj_rep = SubRep::from_mats(
            triple.n_mask.clone(),
            triple.n_mask.members.iter().map(|&n| theta.mat(g.mul3(qi, n, q)).clone()).collect(),
        );
        // T with T.^q theta(n) = theta(n).T  <=>  T in Hom_N(^q theta, theta)
        let basis = hom_space(g, &triple.n_mask.members, &conj_rep, theta);
        if basis.len() != 1 {
            return Err(NormalError::IntertwinerRank(basis.len()));
        }
        let t = &basis[0];
        // Scale to a unitary (T^* T is a positive multiple of the identity).
        let c = (t.adjoint().mul(t).trace().re / d as f64).sqrt();
        let mut u = t.scale(C::new(1.0 / c, 0.0));
        // Phase fix: (0,0) entry nonnegative real, falling back to the first
        // nonzero entry.
        let anchor = if u[(0, 0)].norm() > 1e-8 {
            u[(0, 0)]
        } else {
            *u.data.iter().find(|z| z.norm() > 1e-8).expect("unitary has a nonzero entry")
        };
        u = u.scale((anchor / anchor.norm()).conj());
        theta_q.push(u);
    }

    // Extend along cosets: Theta(n q) = theta(n) Theta(q).
    let mut theta_ext: Vec<CMat> = Vec::with_capacity(inertia.size());
    for &h in &inertia.members {
        let cid = coset_of_member[inertia.pos(h)] as usize;
        let q = reps[cid];
        let n = g.mul(h, g.inv(q));
        debug_assert!(triple.n_mask.contains(n));
        theta_ext.push(theta.mat(n).mul(&theta_q[cid]));
    }

    // Raw cocycle from Theta(q2)^-1 Theta(q1)^-1 Theta(q1 q2).
    let theta_at = |h: u32, tbl: &Vec<CMat>| -> CMat { tbl[inertia.pos(h)].clone() };
    let mut tau_raw = vec![ZERO; m * m];
    for i in 0..m {
        for j in 0..m {
            let prod = g.mul(reps[i], reps[j]);
            let t = theta_at(reps[j], &theta_ext)
                .adjoint()
                .mul(&theta_at(reps[i], &theta_ext).adjoint())
                .mul(&theta_at(prod, &theta_ext));
            tau_raw[i * m + j] = t.trace() / d as f64;
        }
    }

    // Equalize: rho(x) = rho(x^-1) with rho(x)^2 = tau(x, x^-1)^-1, then
    // eta(x,y) = rho(x) rho(y) rho(xy)^-1 tau(x,y); rescale Theta by rho.
    let mut rho = vec![ZERO; m];
    rho[0] = ONE;
    for x in 0..m as u32 {
        if rho[x as usize] != ZERO {
            continue;
        }
        let xi = quotient.inv(x);
        let alpha = principal_unit_sqrt(tau_raw[x as usize * m + xi as usize].conj());
        rho[x as usize] = alpha;
        rho[xi as usize] = alpha;
    }
    let mut eta = vec![ZERO; m * m];
    for x in 0..m {
        for y in 0..m {
            let xy = quotient.mul(x as u32, y as u32) as usize;
            eta[x * m + y] = rho[x] * rho[y] * rho[xy].conj() * tau_raw[x * m + y];
        }
    }
    // Rescaling Theta by s multiplies the cocycle by s(k)^-1 s(h)^-1 s(kh),
    // so conj(rho) moves the raw cocycle onto the equalized eta and gives
    // Theta(h)^-1 = Theta(h^-1).
    for (pos, t) in theta_ext.iter_mut().enumerate() {
        let cid = coset_of_member[pos] as usize;
        *t = t.scale(rho[cid].conj());
    }
    let psi_big: Vec<C> =
        theta_ext.iter().map(|t| dot(&triple.v, &t.apply(&triple.v))).collect();

    let data = CocycleData {
        inertia,
        quotient,
        coset_of_member,
        theta_ext,
        eta,
        tau_raw,
        psi_big,
    };
    debug_assert!(data.cocycle_defect() < 1e-9);
    Ok(data)
}

impl CocycleData {
    /// Defects of: normalization, the cocycle identity, equalization, and
    /// the conjugation rule of the extension.
    pub fn cocycle_defect(&self) -> f64 {
        let m = self.quotient.n;
        let q = &self.quotient;
        let mut dev = 0.0f64;
        for x in 0..m as u32 {
            // Normalization on both margins.
            dev = dev.max((self.eta[x as usize] - ONE).norm());
            dev = dev.max((self.eta[x as usize * m] - ONE).norm());
            dev = dev.max((self.eta[x as usize * m + q.inv(x) as usize] - ONE).norm());
            for y in 0..m as u32 {
                for z in 0..m as u32 {
                    let lhs = self.eta[q.mul(x, y) as usize * m + z as usize]
                        * self.eta[x as usize * m + y as usize];
                    let rhs = self.eta[x as usize * m + q.mul(y, z) as usize]
                        * self.eta[y as usize * m + z as usize];
                    dev = dev.max((lhs - rhs).norm());
                }
            }
        }
        dev
    }

    /// eta evaluated on quotient indices.
    pub fn eta_at(&self, x: u32, y: u32) -> C {
        self.eta[x as usize * self.quotient.n + y as usize]
    }

    /// Conjugation rule defect:
    /// Theta(h)^-1 theta(m) Theta(h) = theta(h^-1 m h) over I x N.
    pub fn extension_defect(&self, triple: &NormalTriple) -> f64 {
        let g = &triple.group;
        let mut dev = 0.0f64;
        for (pos, &h) in self.inertia.members.iter().enumerate() {
            let th = &self.theta_ext[pos];
            let thi = th.adjoint();
            for &n in &triple.n_mask.members {
                let lhs = thi.mul(&triple.theta.mat(n).mul(th));
                let rhs = triple.theta.mat(g.mul3(g.inv(h), n, h));
                dev = dev.max(lhs.sub(rhs).max_abs());
            }
        }
        dev
    }
}

/// eta-twisted convolution on the quotient:
/// `[f1 *_eta f2](k) = sum_h f1(h^-1 k) f2(h) eta(k^-1, h)`.
pub fn cocycle_convolve(data: &CocycleData, f1: &[C], f2: &[C]) -> Vec<C> {
    let q = &data.quotient;
    let m = q.n;
    assert_eq!(f1.len(), m);
    assert_eq!(f2.len(), m);
    (0..m as u32)
        .map(|k| {
            let ki = q.inv(k);
            let mut s = ZERO;
            for h in 0..m as u32 {
                s += f1[q.mul(q.inv(h), k) as usize] * f2[h as usize] * data.eta_at(ki, h);
            }
            s
        })
        .collect()
}

/// Involution on quotient functions.
pub fn quotient_adjoint(data: &CocycleData, f: &[C]) -> Vec<C> {
    let q = &data.quotient;
    (0..q.n as u32).map(|h| f[q.inv(h) as usize].conj()).collect()
}

/// The *-isomorphism Phi from L(I/N)_eta to the operator-valued Hecke
/// algebra: Phi(f)(h) = (1/|N|) Theta(h)^* f(hN) on I, zero outside.
/// Returned as a full operator-valued table over G.
pub fn phi_map(triple: &NormalTriple, data: &CocycleData, f: &[C]) -> Vec<Option<CMat>> {
    let g = &triple.group;
    let scale = 1.0 / triple.n_mask.size() as f64;
    (0..g.n as u32)
        .map(|x| {
            if !data.inertia.contains(x) {
                return None;
            }
            let pos = data.inertia.pos(x);
            let cid = data.coset_of_member[pos] as usize;
            Some(data.theta_ext[pos].adjoint().scale(f[cid] * scale))
        })
        .collect()
}

/// Naive operator-valued convolution over the whole group
/// (`[F1*F2](g) = sum_h F1(h^-1 g) F2(h)`), for the Phi-multiplicativity
/// check on small fixtures.
pub fn op_convolve(group: &Group, d: usize, f1: &[Option<CMat>], f2: &[Option<CMat>]) -> Vec<Option<CMat>> {
    (0..group.n as u32)
        .map(|g| {
            let mut acc = CMat::zeros(d, d);
            let mut nonzero = false;
            for h in 0..group.n as u32 {
                if let (Some(a), Some(b)) = (&f1[group.mul(group.inv(h), g) as usize], &f2[h as usize])
                {
                    acc = acc.add(&a.mul(b));
                    nonzero = true;
                }
            }
            if nonzero {
                Some(acc)
            } else {
                None
            }
        })
        .collect()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct NormalReport {
    pub inertia_order: usize,
    pub quotient_order: usize,
    pub quotient_abelian: bool,
    /// Per constituent of Ind_N^I theta: (dim xi, multiplicity).
    pub constituents: Vec<(usize, usize)>,
    /// Every constituent restricts to theta itself.
    pub res_condition: bool,
    /// Criterion: quotient abelian AND restriction condition.
    pub mf_criterion: bool,
    /// The generic engine's verdict on (G, N, theta).
    pub engine_mf: bool,
    pub engine_dim: usize,
    /// Max deviation of the closed-form sphericals vs the engine set.
    pub spherical_match_dev: Option<f64>,
    /// Functional-equation residual for the closed-form sphericals.
    pub functional_eq_dev: Option<f64>,
}

/// Full analysis: criterion of the normal-subgroup theory AND the generic
/// engine, with closed-form spherical functions matched one-to-one when
/// multiplicity-free.
pub fn normal_mf_and_spherical(triple: &NormalTriple, data: &CocycleData, seed: u64) -> NormalReport {
    let g = &triple.group;
    let quotient_abelian = {
        let q = &data.quotient;
        (0..q.n as u32).all(|x| (0..q.n as u32).all(|y| q.mul(x, y) == q.mul(y, x)))
    };

    // Decompose Ind_N^I theta through its commutant: the block structure of
    // End gives (dim xi, multiplicity) per constituent.
    let constituents = induced_block_structure(triple, data, seed);
    let res_condition = constituents.iter().all(|&(dim_xi, _)| dim_xi == triple.theta.dim);
    let mf_criterion = quotient_abelian && res_condition;

    // Generic engine on (G, N, theta).
    let engine = HeckeEngine::new(Triple::with_vector(
        g.clone(),
        triple.n_mask.clone(),
        triple.theta.clone(),
        triple.v.clone(),
    ))
    .expect("normal triple is well-formed");
    let mf_report = engine.commutator_report();
    assert_eq!(
        engine.dim(),
        data.quotient.n,
        "dim End_G(Ind) must equal |I/N|"
    );
    // Scalar Hecke functions vanish outside the inertia group.
    for b in 0..engine.dim() {
        let table = engine.scalar_table(&engine.basis_elem(b));
        for (x, val) in table.iter().enumerate() {
            if !data.inertia.contains(x as u32) {
                assert!(val.norm() < 1e-10, "Hecke element leaks outside the inertia group");
            }
        }
    }

    let (spherical_match_dev, functional_eq_dev) = if mf_report.mf && mf_criterion {
        let sph = engine.spherical_set(seed).expect("commutative algebra diagonalizes");
        // Characters of the abelian quotient = sphericals of (A, {1}, triv).
        let chars = abelian_characters(&data.quotient, seed);
        let mut match_dev = 0.0f64;
        let mut fe_dev = 0.0f64;
        let pairs = engine.functional_equation_pairs(2000, seed);
        for chi in &chars {
            // phi^chi = conj(chi~) Psi, zero-extended to G.
            let table: Vec<C> = (0..g.n as u32)
                .map(|x| {
                    if !data.inertia.contains(x) {
                        return ZERO;
                    }
                    let pos = data.inertia.pos(x);
                    let cid = data.coset_of_member[pos];
                    chi[cid as usize].conj() * data.psi_big[pos]
                })
                .collect();
            let (_, dev) = engine.match_table(&table, &sph);
            match_dev = match_dev.max(dev);
            // Functional equation for the closed form, via the engine's psi.
            let kmask = &triple.n_mask;
            for &(x, y) in &pairs {
                let mut s = ZERO;
                for (pk, &kk) in kmask.members.iter().enumerate() {
                    s += table[g.mul3(x, kk, y) as usize] * engine.psi_values()[pk].conj();
                }
                fe_dev = fe_dev.max((s - table[x as usize] * table[y as usize]).norm());
            }
        }
        (Some(match_dev), Some(fe_dev))
    } else {
        (None, None)
    };

    NormalReport {
        inertia_order: data.inertia.size(),
        quotient_order: data.quotient.n,
        quotient_abelian,
        constituents,
        res_condition,
        mf_criterion,
        engine_mf: mf_report.mf,
        engine_dim: engine.dim(),
        spherical_match_dev,
        functional_eq_dev,
    }
}

/// Block structure (dim xi, multiplicity) of Ind_N^I theta, computed from
/// the commutant and its center (no character tables involved).
fn induced_block_structure(triple: &NormalTriple, data: &CocycleData, seed: u64) -> Vec<(usize, usize)> {
    let g = &triple.group;
    // Build the inertia subgroup as a standalone group.
    let imembers = &data.inertia.members;
    let imul: Vec<Vec<u32>> = imembers
        .iter()
        .map(|&a| {
            imembers.iter().map(|&b| data.inertia.pos(g.mul(a, b)) as u32).collect()
        })
        .collect();
    let igroup: GroupRef = Arc::new(Group::from_mul_table("I", imul));
    let n_in_i = SubgroupMask::new(
        &igroup,
        triple.n_mask.members.iter().map(|&n| data.inertia.pos(n) as u32).collect(),
    );
    let theta_in_i = SubRep::from_mats(
        n_in_i.clone(),
        n_in_i.members.iter().map(|&p| triple.theta.mat(imembers[p as usize]).clone()).collect(),
    );
    let ind = induce(igroup.clone(), &n_in_i, theta_in_i, "Ind_N^I theta").unwrap();
    let all: Vec<u32> = (0..igroup.n as u32).collect();
    let commutant = hom_space(&igroup, &all, &ind, &ind);
    let e_dim = commutant.len();
    // Center of the commutant.
    let mut center_rows: Vec<Vec<C>> = Vec::new();
    for a in 0..e_dim {
        let mut row = Vec::new();
        for b in 0..e_dim {
            let comm = commutant[a].mul(&commutant[b]).sub(&commutant[b].mul(&commutant[a]));
            row.extend(comm.data);
        }
        center_rows.push(row);
    }
    // Nullspace of the stacked commutator map via its Gram matrix.
    let gram = CMat::from_fn(e_dim, e_dim, |i, j| dot(&center_rows[i], &center_rows[j]).conj());
    let (evals, vecs) = hermitian_eigen(&gram);
    let scale = evals.last().copied().unwrap_or(0.0).max(1.0);
    let central_coeffs: Vec<Vec<C>> = evals
        .iter()
        .enumerate()
        .filter(|(_, &e)| e < 1e-10 * scale)
        .map(|(i, _)| vecs.col(i))
        .collect();
    let r = central_coeffs.len();
    if r == e_dim {
        // Commutant already commutative: every multiplicity is one, and the
        // isotypic ranks are read from spectral projections of a random
        // self-adjoint commutant element.
        let dims = isotypic_ranks(&commutant, ind.dim, seed);
        return dims.into_iter().map(|d| (d, 1)).collect();
    }
    // Central self-adjoint element with distinct eigenvalues per block.
    let central_mats: Vec<CMat> = central_coeffs
        .iter()
        .map(|c| {
            let mut m = CMat::zeros(ind.dim, ind.dim);
            for (coef, b) in c.iter().zip(&commutant) {
                m = m.add(&b.scale(*coef));
            }
            m
        })
        .collect();
    let dims = isotypic_ranks(&central_mats, ind.dim, seed);
    // Per central block: projected commutant dimension = multiplicity^2.
    let projections = spectral_projections(&central_mats, ind.dim, seed);
    let mut out = Vec::new();
    for (p, dim_iso) in projections.iter().zip(&dims) {
        // rank of {P X P : X in commutant}
        let projected: Vec<Vec<C>> =
            commutant.iter().map(|x| p.mul(&x.mul(p)).data.clone()).collect();
        let basis = crate::linalg::orthonormalize(&projected, 1e-7);
        let msq = basis.len();
        let mult = (msq as f64).sqrt().round() as usize;
        assert_eq!(mult * mult, msq, "block dimension must be a perfect square");
        out.push((dim_iso / mult, mult));
    }
    out.sort();
    out
}

/// Ranks of the spectral projections of a random self-adjoint combination
/// of the given (commuting, *-closed) family.
fn isotypic_ranks(family: &[CMat], dim: usize, seed: u64) -> Vec<usize> {
    spectral_projections(family, dim, seed).iter().map(|p| p.trace().re.round() as usize).collect()
}

fn spectral_projections(family: &[CMat], dim: usize, seed: u64) -> Vec<CMat> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut y = CMat::zeros(dim, dim);
    for f in family {
        let c = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        y = y.add(&f.scale(c));
    }
    let z = y.add(&y.adjoint());
    let (evals, vecs) = hermitian_eigen(&z);
    let scale = evals.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    let mut projections = Vec::new();
    let mut start = 0;
    for idx in 1..=dim {
        if idx == dim || evals[idx] - evals[idx - 1] > 1e-6 * scale {
            let mut p = CMat::zeros(dim, dim);
            for c in start..idx {
                let col = vecs.col(c);
                for i in 0..dim {
                    for j in 0..dim {
                        p[(i, j)] += col[i] * col[j].conj();
                    }
                }
            }
            projections.push(p);
            start = idx;
        }
    }
    projections
}

/// Characters of an abelian group, as tables indexed by element: the
/// spherical functions of the triple (A, {1}, trivial).
pub fn abelian_characters(a: &GroupRef, seed: u64) -> Vec<Vec<C>> {
    let triv_mask = SubgroupMask::new(a, vec![a.id]);
    let theta = SubRep::from_char_fn(triv_mask.clone(), |_| ONE);
    let engine = HeckeEngine::new(Triple::new(a.clone(), triv_mask, theta)).unwrap();
    let sph = engine.spherical_set(seed).expect("abelian group algebra diagonalizes");
    sph.iter().map(|s| engine.scalar_table(&s.elem)).collect()
}

/// Psi convolution identities `Psi = Psi*psi = psi*Psi = psi*Psi*psi` and
/// the twisted functional identity
/// `sum_n Psi(k n h) conj(psi(n)) = conj(eta(kN, hN)) Psi(k) Psi(h)`.
pub fn psi_identities_defect(triple: &NormalTriple, data: &CocycleData) -> f64 {
    let g = &triple.group;
    let nmask = &triple.n_mask;
    let d = triple.theta.dim as f64;
    let nn = nmask.size() as f64;
    let psi_small = |n: u32| -> C {
        dot(&triple.v, &triple.theta.mat(n).apply(&triple.v)) * (d / nn)
    };
    let psi_of = |x: u32| -> C {
        if data.inertia.contains(x) {
            data.psi_big[data.inertia.pos(x)]
        } else {
            ZERO
        }
    };
    let mut dev = 0.0f64;
    for (pos, &h) in data.inertia.members.iter().enumerate() {
        // Psi * psi (convolution over N).
        let mut right = ZERO;
        let mut left = ZERO;
        for &n in &nmask.members {
            right += psi_of(g.mul(h, g.inv(n))) * psi_small(n);
            left += psi_small(n) * psi_of(g.mul(g.inv(n), h));
        }
        dev = dev.max((right - data.psi_big[pos]).norm());
        dev = dev.max((left - data.psi_big[pos]).norm());
    }
    // Twisted functional identity over I x I.
    for (pk, &k) in data.inertia.members.iter().enumerate() {
        for (ph, &h) in data.inertia.members.iter().enumerate() {
            let mut s = ZERO;
            for &n in &nmask.members {
                s += psi_of(g.mul3(k, n, h)) * psi_small(n).conj();
            }
            let eta = data.eta_at(data.coset_of_member[pk], data.coset_of_member[ph]);
            let want = eta.conj() * data.psi_big[pk] * data.psi_big[ph];
            dev = dev.max((s - want).norm());
        }
    }
    dev
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Dihedral group of order 8: r^a s^b with index a + 4b.
pub fn dihedral8() -> GroupRef {
    let idx = |a: usize, b: usize| a % 4 + 4 * (b % 2);
    let mut mul = vec![vec![0u32; 8]; 8];
    for a1 in 0..4 {
        for b1 in 0..2 {
            for a2 in 0..4 {
                for b2 in 0..2 {
                    // (r^a1 s^b1)(r^a2 s^b2) = r^(a1 + (-1)^b1 a2) s^(b1+b2)
                    let a = if b1 == 0 { a1 + a2 } else { a1 + 4 - a2 };
                    mul[idx(a1, b1)][idx(a2, b2)] = idx(a, b1 + b2) as u32;
                }
            }
        }
    }
    Arc::new(Group::from_mul_table("D8", mul))
}

/// Quaternion group {1,-1,i,-i,j,-j,k,-k} with indices 0..8.
pub fn quaternion8() -> GroupRef {
    // Encode x as (sign, axis) with axis 0=1, 1=i, 2=j, 3=k.
    let enc = |sign: usize, axis: usize| axis * 2 + sign;
    let mut mul = vec![vec![0u32; 8]; 8];
    // axis multiplication table with result sign: i*j = k, j*i = -k, ...
    let axis_mul = |x: usize, y: usize| -> (usize, usize) {
        match (x, y) {
            (0, a) => (0, a),
            (a, 0) => (0, a),
            (a, b) if a == b => (1, 0), // i*i = -1
            (1, 2) => (0, 3),
            (2, 1) => (1, 3),
            (2, 3) => (0, 1),
            (3, 2) => (1, 1),
            (3, 1) => (0, 2),
            (1, 3) => (1, 2),
            _ => unreachable!(),
        }
    };
    for s1 in 0..2 {
        for a1 in 0..4 {
            for s2 in 0..2 {
                for a2 in 0..4 {
                    let (s, a) = axis_mul(a1, a2);
                    mul[enc(s1, a1)][enc(s2, a2)] = enc((s1 + s2 + s) % 2, a) as u32;
                }
            }
        }
    }
    Arc::new(Group::from_mul_table("Q8", mul))
}
