//! The generic engine for a triple (G, K, theta): operator-valued and scalar
//! Hecke algebras, the multiplicity-freeness test, spherical functions found
//! by simultaneous diagonalization of the commutative algebra, the spherical
//! Fourier transform, Frobenius-Schur indicators, and antiautomorphism
//! symmetry criteria.
//!
//! An algebra element is stored by its operator values at the double-coset
//! representatives with nontrivial intertwiner space; the covariance rule
//! `F(k1 g k2) = theta(k2^-1) F(g) theta(k1^-1)` reconstructs every other
//! value, so convolutions and sup-norms never touch more than the support.

use crate::group::{DoubleCosets, GroupRef, SubgroupMask};
use crate::linalg::{dot, hermitian_eigen, CMat, C, ONE, ZERO};
use crate::reps::{hom_space, SubRep, UnitaryRep};
use crate::tol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

#[derive(Debug, Clone)]
pub enum EngineError {
    ReducibleTheta,
    BadVector,
    DimensionMismatch { mackey: usize, expected: usize },
    DegenerateEigensplit,
    NonIntegralDimension(f64),
    SphericalResidual(f64),
}

impl std::fmt::Display for EngineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineError::ReducibleTheta => write!(f, "theta must be irreducible"),
            EngineError::BadVector => write!(f, "v must be a unit vector in V_theta"),
            EngineError::DimensionMismatch { mackey, expected } => {
                write!(f, "Hecke dimension {mackey} disagrees with expected {expected}")
            }
            EngineError::DegenerateEigensplit => {
                write!(f, "eigenspaces failed to split after the retry budget")
            }
            EngineError::NonIntegralDimension(d) => {
                write!(f, "spherical norm gave a non-integral dimension {d}")
            }
            EngineError::SphericalResidual(r) => {
                write!(f, "spherical eigenvector residual {r} above tolerance")
            }
        }
    }
}

impl std::error::Error for EngineError {}

/// A candidate triple (G, K, theta) with a distinguished unit vector.
pub struct Triple {
    pub group: GroupRef,
    pub k: SubgroupMask,
    pub theta: SubRep,
    pub v: Vec<C>,
}

impl Triple {
    /// Default distinguished vector: first basis vector of V_theta.
    pub fn new(group: GroupRef, k: SubgroupMask, theta: SubRep) -> Triple {
        let mut v = vec![ZERO; theta.dim];
        v[0] = ONE;
        Triple { group, k, theta, v }
    }

    pub fn with_vector(group: GroupRef, k: SubgroupMask, theta: SubRep, v: Vec<C>) -> Triple {
        Triple { group, k, theta, v }
    }
}

/// An element of the operator-valued Hecke algebra: one d x d matrix
/// (row-major) per good coset representative.
#[derive(Clone, Debug)]
pub struct AlgElem(pub Vec<Vec<C>>);

impl AlgElem {
    fn zeros(s0_len: usize, d: usize) -> AlgElem {
        AlgElem(vec![vec![ZERO; d * d]; s0_len])
    }

    pub fn scale(&self, c: C) -> AlgElem {
        AlgElem(self.0.iter().map(|m| m.iter().map(|z| z * c).collect()).collect())
    }

    pub fn add(&self, other: &AlgElem) -> AlgElem {
        AlgElem(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }

    pub fn sub(&self, other: &AlgElem) -> AlgElem {
        AlgElem(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn matmul_into(out: &mut [C], a: &[C], b: &[C], d: usize) {
    for i in 0..d {
        for j in 0..d {
            let mut s = ZERO;
            for k in 0..d {
                s += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = s;
        }
    }
}

fn matvec(a: &[C], v: &[C], d: usize) -> Vec<C> {
    (0..d).map(|i| (0..d).map(|k| a[i * d + k] * v[k]).sum()).collect()
}

/// A spherical function, stored as an algebra element normalized to value 1
/// at the identity, together with its convolution eigenvalues and the
/// dimension of the attached irreducible derived from its norm.
#[derive(Clone)]
pub struct Spherical {
    pub elem: AlgElem,
    /// lambda_b = [phi * f_b](1_G) over the unnormalized basis.
    pub eigenvalues: Vec<C>,
    pub norm_sq: f64,
    pub d_sigma: f64,
}

impl Spherical {
    pub fn d_sigma_rounded(&self) -> u32 {
        self.d_sigma.round() as u32
    }
}

/// Multiplicity-freeness report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MfReport {
    pub mf: bool,
    pub dim: usize,
    pub max_commutator: f64,
    pub threshold: f64,
}

pub struct HeckeEngine {
    pub triple: Triple,
    pub cosets: DoubleCosets,
    /// Coset indices with nontrivial intertwiner space.
    pub s0: Vec<usize>,
    coset_to_s0: Vec<i32>,
    /// Orthonormal (Hilbert-Schmidt) intertwiner bases per good coset.
    pub intertwiners: Vec<Vec<CMat>>,
    /// Flat basis as (s0 position, intertwiner index).
    pub basis: Vec<(usize, usize)>,
    d: usize,
    /// theta(k^-1) per member position, flattened.
    theta_inv: Vec<Vec<C>>,
    /// theta(k^-1) v per member position.
    u_vecs: Vec<Vec<C>>,
    /// theta(k) v per member position.
    w_vecs: Vec<Vec<C>>,
    /// psi(k) = (d/|K|) <v, theta(k) v> per member position.
    psi: Vec<C>,
    /// Squared norms of the unnormalized scalar basis elements.
    pub basis_norm_sq: Vec<f64>,
    squares: OnceLock<Vec<u32>>,
}

impl HeckeEngine {
    pub fn new(triple: Triple) -> Result<HeckeEngine, EngineError> {
        let d = triple.theta.dim;
        if (dot(&triple.v, &triple.v).re - 1.0).abs() > 1e-9 || triple.v.len() != d {
            return Err(EngineError::BadVector);
        }
        // theta irreducible: End_K(theta) is one-dimensional.
        if d > 1 {
            let end = hom_space(&triple.group, &triple.k.members, &triple.theta, &triple.theta);
            if end.len() != 1 {
                return Err(EngineError::ReducibleTheta);
            }
        }
        let cosets = DoubleCosets::build(&triple.group, &triple.k);
        let group = &triple.group;
        let k = &triple.k;

        let theta_inv: Vec<Vec<C>> =
            k.members.iter().map(|&m| triple.theta.mat(group.inv(m)).data.clone()).collect();
        let u_vecs: Vec<Vec<C>> = theta_inv.iter().map(|m| matvec(m, &triple.v, d)).collect();
        let w_vecs: Vec<Vec<C>> =
            k.members.iter().map(|&m| triple.theta.mat(m).apply(&triple.v)).collect();
        let kn = k.size() as f64;
        let psi: Vec<C> = w_vecs.iter().map(|wv| dot(&triple.v, wv) * (d as f64 / kn)).collect();

        // Intertwiner space per double coset: Hom_{K_s}(Res theta, theta^s).
        let mut s0 = Vec::new();
        let mut coset_to_s0 = vec![-1i32; cosets.num_cosets()];
        let mut intertwiners = Vec::new();
        for (ci, &s) in cosets.reps.iter().enumerate() {
            let stab = &cosets.stabilizers[ci];
            let basis = if d == 1 {
                // One-dimensional shortcut: the space is nontrivial exactly
                // when chi(s^-1 x s) = chi(x) on the stabilizer.
                let si = group.inv(s);
                let ok = stab.iter().all(|&x| {
                    let conj = group.mul3(si, x, s);
                    (triple.theta.mat(conj)[(0, 0)] - triple.theta.mat(x)[(0, 0)]).norm() < 1e-9
                });
                if ok {
                    vec![CMat::eye(1)]
                } else {
                    Vec::new()
                }
            } else {
                let stab_mask = SubgroupMask::new(group, stab.clone());
                let res = SubRep::from_mats(
                    stab_mask.clone(),
                    stab_mask.members.iter().map(|&x| triple.theta.mat(x).clone()).collect(),
                );
                let si = group.inv(s);
                let conj = SubRep::from_mats(
                    stab_mask.clone(),
                    stab_mask
                        .members
                        .iter()
                        .map(|&x| triple.theta.mat(group.mul3(si, x, s)).clone())
                        .collect(),
                );
                hom_space(group, &stab_mask.members, &res, &conj)
            };
            if !basis.is_empty() {
                coset_to_s0[ci] = s0.len() as i32;
                s0.push(ci);
                intertwiners.push(basis);
            }
        }
        let basis: Vec<(usize, usize)> = s0
            .iter()
            .enumerate()
            .flat_map(|(pos, _)| (0..intertwiners[pos].len()).map(move |t| (pos, t)))
            .collect();
        let basis_norm_sq: Vec<f64> = basis
            .iter()
            .map(|&(pos, _)| {
                let stab = cosets.stabilizers[s0[pos]].len() as f64;
                d as f64 * kn * kn / stab
            })
            .collect();
        Ok(HeckeEngine {
            triple,
            cosets,
            s0,
            coset_to_s0,
            intertwiners,
            basis,
            d,
            theta_inv,
            u_vecs,
            w_vecs,
            psi,
            basis_norm_sq,
            squares: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn d_theta(&self) -> usize {
        self.d
    }

    /// Mackey count: sum over good cosets of the intertwiner dimensions.
    pub fn mackey_dim(&self) -> usize {
        self.intertwiners.iter().map(|b| b.len()).sum()
    }

    pub fn psi_values(&self) -> &[C] {
        &self.psi
    }

    /// Idempotence and self-adjointness defect of psi (convolution over K).
    pub fn psi_defect(&self) -> f64 {
        let group = &self.triple.group;
        let k = &self.triple.k;
        let mut dev = 0.0f64;
        for (pk, &kk) in k.members.iter().enumerate() {
            // (psi * psi)(kk) = sum_h psi(h) psi(h^-1 kk)
            let mut s = ZERO;
            for (ph, &h) in k.members.iter().enumerate() {
                let rest = group.mul(group.inv(h), kk);
                s += self.psi[ph] * self.psi[k.pos(rest)];
            }
            dev = dev.max((s - self.psi[pk]).norm());
            let adj = self.psi[k.pos(group.inv(kk))].conj();
            dev = dev.max((adj - self.psi[pk]).norm());
        }
        dev
    }

    /// The basis element L_{T_{s,i}} as an algebra element.
    pub fn basis_elem(&self, b: usize) -> AlgElem {
        let (pos, t) = self.basis[b];
        let mut e = AlgElem::zeros(self.s0.len(), self.d);
        e.0[pos] = self.intertwiners[pos][t].data.clone();
        e
    }

    /// psi is the identity of the scalar algebra: operator value
    /// (1/|K|) theta(1) at the coset of K, zero elsewhere.
    pub fn psi_elem(&self) -> AlgElem {
        let mut e = AlgElem::zeros(self.s0.len(), self.d);
        let pos = self.coset_to_s0[0];
        assert!(pos >= 0, "the identity coset always carries intertwiners");
        let scale = 1.0 / self.triple.k.size() as f64;
        for i in 0..self.d {
            e.0[pos as usize][i * self.d + i] = C::new(scale, 0.0);
        }
        e
    }

    /// Scalar function value of an element at an arbitrary group element.
    pub fn eval(&self, a: &AlgElem, g: u32) -> C {
        let ci = self.cosets.coset_of[g as usize] as usize;
        let pos = self.coset_to_s0[ci];
        if pos < 0 {
            return ZERO;
        }
        let k1 = self.cosets.k1_pos[g as usize] as usize;
        let k2 = self.cosets.k2_pos[g as usize] as usize;
        let av = matvec(&a.0[pos as usize], &self.u_vecs[k1], self.d);
        dot(&av, &self.w_vecs[k2]) * self.d as f64
    }

    /// Operator value F(g) as a matrix (the H-tilde picture).
    pub fn operator_value(&self, a: &AlgElem, g: u32) -> CMat {
        let d = self.d;
        match self.op_value(a, g) {
            None => CMat::zeros(d, d),
            Some(v) => CMat { rows: d, cols: d, data: v },
        }
    }

    /// Operator value F(g) (a d x d matrix), reconstructed from the rep.
    fn op_value(&self, a: &AlgElem, g: u32) -> Option<Vec<C>> {
        let ci = self.cosets.coset_of[g as usize] as usize;
        let pos = self.coset_to_s0[ci];
        if pos < 0 {
            return None;
        }
        let k1 = self.cosets.k1_pos[g as usize] as usize;
        let k2 = self.cosets.k2_pos[g as usize] as usize;
        let d = self.d;
        let mut tmp = vec![ZERO; d * d];
        let mut out = vec![ZERO; d * d];
        matmul_into(&mut tmp, &a.0[pos as usize], &self.theta_inv[k1], d);
        matmul_into(&mut out, &self.theta_inv[k2], &tmp, d);
        Some(out)
    }

    /// Operator-valued convolution `[A * B](t) = sum_h A(h^-1 t) B(h)`.
    fn conv_op(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        let d = self.d;
        let group = &self.triple.group;
        // Support cosets of b (nonzero matrices only).
        let b_support: Vec<usize> = (0..self.s0.len())
            .filter(|&pos| b.0[pos].iter().any(|z| z.norm_sqr() > 0.0))
            .collect();
        let values = crate::par::map_indexed(self.s0.len(), |ti| {
            let t = self.cosets.reps[self.s0[ti]];
            let mut acc = vec![ZERO; d * d];
            let mut tmp1 = vec![ZERO; d * d];
            let mut tmp2 = vec![ZERO; d * d];
            let mut prod = vec![ZERO; d * d];
            for &bpos in &b_support {
                for &h in &self.cosets.members[self.s0[bpos]] {
                    let x = group.mul(group.inv(h), t);
                    let apos = self.coset_to_s0[self.cosets.coset_of[x as usize] as usize];
                    if apos < 0 {
                        continue;
                    }
                    if a.0[apos as usize].iter().all(|z| z.norm_sqr() == 0.0) {
                        continue;
                    }
                    // A(x) = theta_inv[k2(x)] A[s] theta_inv[k1(x)]
                    let xk1 = self.cosets.k1_pos[x as usize] as usize;
                    let xk2 = self.cosets.k2_pos[x as usize] as usize;
                    matmul_into(&mut tmp1, &a.0[apos as usize], &self.theta_inv[xk1], d);
                    matmul_into(&mut tmp2, &self.theta_inv[xk2], &tmp1, d);
                    // B(h) = theta_inv[k2(h)] B[s'] theta_inv[k1(h)]
                    let hk1 = self.cosets.k1_pos[h as usize] as usize;
                    let hk2 = self.cosets.k2_pos[h as usize] as usize;
                    matmul_into(&mut tmp1, &b.0[bpos], &self.theta_inv[hk1], d);
                    matmul_into(&mut prod, &self.theta_inv[hk2], &tmp1, d);
                    matmul_into(&mut tmp1, &tmp2, &prod, d);
                    for (dst, src) in acc.iter_mut().zip(&tmp1) {
                        *dst += src;
                    }
                }
            }
            acc
        });
        AlgElem(values)
    }

    /// Scalar convolution `(f_a * f_b)(g) = sum_h f_a(h) f_b(h^-1 g)`.
    /// Since S_v is a *-antiisomorphism, this is the operator convolution
    /// with the factors swapped.
    pub fn conv_scalar(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        self.conv_op(b, a)
    }

    /// Operator-valued convolution, exposed for the isomorphism checks.
    pub fn conv_operator(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        self.conv_op(a, b)
    }

    /// Scalar adjoint `f^*(g) = conj(f(g^-1))`, i.e. the operator adjoint.
    pub fn adjoint(&self, a: &AlgElem) -> AlgElem {
        let d = self.d;
        let group = &self.triple.group;
        let values = (0..self.s0.len())
            .map(|ti| {
                let t = self.cosets.reps[self.s0[ti]];
                match self.op_value(a, group.inv(t)) {
                    None => vec![ZERO; d * d],
                    Some(m) => {
                        let mut out = vec![ZERO; d * d];
                        for i in 0..d {
                            for j in 0..d {
                                out[i * d + j] = m[j * d + i].conj();
                            }
                        }
                        out
                    }
                }
            })
            .collect();
        AlgElem(values)
    }

    /// L(G) inner product of the scalar functions of two elements.
    pub fn inner(&self, a: &AlgElem, b: &AlgElem) -> C {
        let kn = self.triple.k.size() as f64;
        let mut s = ZERO;
        for (pos, &ci) in self.s0.iter().enumerate() {
            let stab = self.cosets.stabilizers[ci].len() as f64;
            let hs: C = a.0[pos].iter().zip(&b.0[pos]).map(|(x, y)| x * y.conj()).sum();
            s += hs * (kn * kn / stab);
        }
        // <S_v F1, S_v F2> = d_theta <F1, F2>, and the HS form carries 1/d.
        s
    }

    /// Sup norm over all of G of the scalar function of an element.
    pub fn sup_norm(&self, a: &AlgElem) -> f64 {
        let d = self.d;
        let mut best = 0.0f64;
        for pos in 0..self.s0.len() {
            if a.0[pos].iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            // Values on the coset are d <A u_{k1}, w_{k2}>.
            let applied: Vec<Vec<C>> =
                self.u_vecs.iter().map(|u| matvec(&a.0[pos], u, d)).collect();
            for au in &applied {
                for w in &self.w_vecs {
                    best = best.max(dot(au, w).norm() * d as f64);
                }
            }
        }
        best
    }

    /// Full table of scalar values over the group.
    pub fn scalar_table(&self, a: &AlgElem) -> Vec<C> {
        let n = self.triple.group.n;
        crate::par::map_indexed(n, |g| self.eval(a, g as u32))
    }

    /// Commutator test over all basis pairs.
    pub fn commutator_report(&self) -> MfReport {
        let dim = self.dim();
        let pairs: Vec<(usize, usize)> =
            (0..dim).flat_map(|i| ((i + 1)..dim).map(move |j| (i, j))).collect();
        let devs = crate::par::map_slice(&pairs, |&(i, j)| {
            let ei = self.basis_elem(i);
            let ej = self.basis_elem(j);
            let ab = self.conv_scalar(&ei, &ej);
            let ba = self.conv_scalar(&ej, &ei);
            self.sup_norm(&ab.sub(&ba))
        });
        let max_commutator = devs.into_iter().fold(0.0f64, f64::max);
        let threshold = tol::COMMUTATOR_PER_ELEM * self.triple.group.n as f64;
        MfReport { mf: max_commutator < threshold, dim, max_commutator, threshold }
    }

    fn orthonormal_basis_elems(&self) -> Vec<AlgElem> {
        (0..self.dim())
            .map(|b| self.basis_elem(b).scale(C::new(1.0 / self.basis_norm_sq[b].sqrt(), 0.0)))
            .collect()
    }

    /// Random self-adjoint element h = x + x^* for a random complex
    /// combination x of the basis. Complex coefficients matter: a basis
    /// element with f^* = -f would drop out of a real combination of
    /// f + f^* terms and leave h degenerate.
    fn random_self_adjoint(&self, seed: u64, basis: &[AlgElem]) -> AlgElem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = AlgElem::zeros(self.s0.len(), self.d);
        for e in basis {
            let c = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            x = x.add(&e.scale(c));
        }
        x.add(&self.adjoint(&x))
    }

    /// Regular action of h on the algebra in an orthonormal basis
    /// (Hermitian for self-adjoint h).
    fn regular_action(&self, h: &AlgElem, basis: &[AlgElem]) -> CMat {
        let dim = basis.len();
        let cols: Vec<Vec<C>> = crate::par::map_slice(basis, |e| {
            let he = self.conv_scalar(h, e);
            basis.iter().map(|ei| self.inner(&he, ei)).collect()
        });
        CMat::from_fn(dim, dim, |i, j| cols[j][i])
    }

    /// All spherical functions, by commutative-algebra diagonalization.
    /// Retries with seeds seed, seed+1, ... to split degenerate eigenspaces.
    pub fn spherical_set(&self, seed: u64) -> Result<Vec<Spherical>, EngineError> {
        let dim = self.dim();
        let basis = self.orthonormal_basis_elems();
        // Clusters: column-orthonormal coordinate blocks, refined until all
        // are one-dimensional.
        let mut clusters: Vec<CMat> = vec![CMat::eye(dim)];
        for attempt in 0..6 {
            if clusters.iter().all(|c| c.cols == 1) {
                break;
            }
            let h = self.random_self_adjoint(seed + attempt, &basis);
            let m = self.regular_action(&h, &basis);
            let mut next = Vec::new();
            for cl in clusters {
                if cl.cols == 1 {
                    next.push(cl);
                    continue;
                }
                let sub = cl.adjoint().mul(&m).mul(&cl);
                let (evals, vecs) = hermitian_eigen(&sub);
                let rotated = cl.mul(&vecs);
                let scale = evals.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
                let gap = 1e-6 * scale;
                let mut start = 0;
                for idx in 1..=evals.len() {
                    if idx == evals.len() || evals[idx] - evals[idx - 1] > gap {
                        let block =
                            CMat::from_fn(dim, idx - start, |r, c| rotated[(r, start + c)]);
                        next.push(block);
                        start = idx;
                    }
                }
            }
            clusters = next;
        }
        if clusters.iter().any(|c| c.cols != 1) {
            return Err(EngineError::DegenerateEigensplit);
        }

        let mut sphericals = Vec::new();
        for cl in &clusters {
            let coords = cl.col(0);
            let mut elem = AlgElem::zeros(self.s0.len(), self.d);
            for (b, c) in coords.iter().enumerate() {
                if c.norm_sqr() > 0.0 {
                    elem = elem.add(&basis[b].scale(*c));
                }
            }
            let at_one = self.eval(&elem, self.triple.group.id);
            if at_one.norm() < 1e-10 {
                return Err(EngineError::SphericalResidual(f64::INFINITY));
            }
            let phi = elem.scale(ONE / at_one);
            // Eigenvalues over the unnormalized basis and residual check.
            let mut eigenvalues = Vec::with_capacity(dim);
            for b in 0..dim {
                let fb = self.basis_elem(b);
                let conv = self.conv_scalar(&phi, &fb);
                let lambda = self.eval(&conv, self.triple.group.id);
                let residual = conv.sub(&phi.scale(lambda)).max_abs();
                if residual > 1e-6 * (1.0 + lambda.norm()) * (1.0 + phi.max_abs()) {
                    return Err(EngineError::SphericalResidual(residual));
                }
                eigenvalues.push(lambda);
            }
            let norm_sq = self.inner(&phi, &phi).re;
            let d_sigma = self.triple.group.n as f64 / norm_sq;
            if (d_sigma - d_sigma.round()).abs() > 1e-5 * d_sigma.max(1.0) {
                return Err(EngineError::NonIntegralDimension(d_sigma));
            }
            sphericals.push(Spherical { elem: phi, eigenvalues, norm_sq, d_sigma });
        }
        // Deterministic order: lexicographic on rounded eigenvalue tuples.
        sphericals.sort_by(|a, b| {
            let key = |s: &Spherical| {
                s.eigenvalues
                    .iter()
                    .flat_map(|z| [(z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64])
                    .collect::<Vec<i64>>()
            };
            key(a).cmp(&key(b))
        });
        Ok(sphericals)
    }

    /// Convenience: multiplicity-freeness plus sphericals in one report.
    pub fn analyze(&self, seed: u64) -> (MfReport, Option<Vec<Spherical>>) {
        let mf = self.commutator_report();
        if mf.mf {
            let sph = self.spherical_set(seed).ok();
            (mf, sph)
        } else {
            (mf, None)
        }
    }

    fn squares(&self) -> &[u32] {
        self.squares.get_or_init(|| {
            let g = &self.triple.group;
            (0..g.n as u32).map(|x| g.mul(x, x)).collect()
        })
    }

    /// Functional-equation residual over given element pairs:
    /// sum_k phi(g k h) conj(psi(k)) - phi(g) phi(h).
    pub fn functional_equation_residual(&self, phi: &AlgElem, pairs: &[(u32, u32)]) -> f64 {
        let group = &self.triple.group;
        let k = &self.triple.k;
        let devs = crate::par::map_slice(pairs, |&(g, h)| {
            let mut s = ZERO;
            for (pk, &kk) in k.members.iter().enumerate() {
                s += self.eval(phi, group.mul3(g, kk, h)) * self.psi[pk].conj();
            }
            (s - self.eval(phi, g) * self.eval(phi, h)).norm()
        });
        devs.into_iter().fold(0.0, f64::max)
    }

    /// All pairs when |G| <= 1000, otherwise a deterministic random sample.
    pub fn functional_equation_pairs(&self, sample: usize, seed: u64) -> Vec<(u32, u32)> {
        let n = self.triple.group.n;
        if n <= 1000 {
            (0..n as u32).flat_map(|g| (0..n as u32).map(move |h| (g, h))).collect()
        } else {
            crate::reps::sample_pairs(n, sample, seed)
        }
    }

    /// Spherical Fourier transform of f over the spherical set:
    /// `F f(sigma) = <f, phi^sigma>`.
    pub fn sft(&self, f: &AlgElem, sphericals: &[Spherical]) -> Vec<C> {
        sphericals.iter().map(|s| self.inner(f, &s.elem)).collect()
    }

    /// Inversion: `f = (1/|G|) sum_sigma d_sigma Ff(sigma) phi^sigma`.
    pub fn isft(&self, coeffs: &[C], sphericals: &[Spherical]) -> AlgElem {
        let n = self.triple.group.n as f64;
        let mut out = AlgElem::zeros(self.s0.len(), self.d);
        for (c, s) in coeffs.iter().zip(sphericals) {
            out = out.add(&s.elem.scale(c * s.d_sigma / n));
        }
        out
    }

    /// Plancherel defect for a pair of elements.
    pub fn plancherel_defect(&self, f1: &AlgElem, f2: &AlgElem, sphericals: &[Spherical]) -> f64 {
        let n = self.triple.group.n as f64;
        let lhs = self.inner(f1, f2);
        let c1 = self.sft(f1, sphericals);
        let c2 = self.sft(f2, sphericals);
        let rhs: C = c1
            .iter()
            .zip(&c2)
            .zip(sphericals)
            .map(|((a, b), s)| a * b.conj() * s.d_sigma / n)
            .sum();
        (lhs - rhs).norm()
    }

    /// Frobenius-Schur indicator `(d_sigma/|G|) sum_g phi(g^2)`.
    pub fn frobenius_schur(&self, phi: &AlgElem, d_sigma: f64) -> C {
        let squares = self.squares();
        let n = self.triple.group.n;
        let vals = crate::par::map_indexed(n, |g| self.eval(phi, squares[g]));
        vals.into_iter().sum::<C>() * d_sigma / n as f64
    }

    /// Character recovery `chi(g) = (d_sigma/|G|) sum_h conj(phi(h^-1 g h))`.
    pub fn character_from_spherical(&self, phi: &AlgElem, d_sigma: f64) -> Vec<C> {
        let group = &self.triple.group;
        let n = group.n;
        crate::par::map_indexed(n, |g| {
            let mut s = ZERO;
            for h in 0..n as u32 {
                s += self.eval(phi, group.mul3(group.inv(h), g as u32, h)).conj();
            }
            s * d_sigma / n as f64
        })
    }

    /// Matrix-coefficient spherical function for an irreducible constituent:
    /// `phi(g) = <w, sigma(g) w>` with `w = L v` for the isometric
    /// K-intertwiner L (multiplicity one). Returns the full table.
    pub fn spherical_from_irrep(&self, sigma: &UnitaryRep) -> Result<Vec<C>, EngineError> {
        let basis = hom_space(&self.triple.group, &self.triple.k.members, &self.triple.theta, sigma);
        if basis.len() != 1 {
            return Err(EngineError::DimensionMismatch { mackey: basis.len(), expected: 1 });
        }
        let l = crate::reps::isometric_intertwiner(&basis).ok_or(EngineError::BadVector)?;
        let w = l.apply(&self.triple.v);
        let n = self.triple.group.n;
        Ok(crate::par::map_indexed(n, |g| dot(&w, &sigma.apply(g as u32, &w))))
    }

    /// Index of the engine spherical closest (sup over the group) to a
    /// candidate table, together with the deviation.
    pub fn match_table(&self, table: &[C], sphericals: &[Spherical]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, s) in sphericals.iter().enumerate() {
            let st = self.scalar_table(&s.elem);
            let dev = st
                .iter()
                .zip(table)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if dev < best.1 {
                best = (i, dev);
            }
        }
        best
    }
}

/// Outcome of the antiautomorphism symmetry check (weak symmetry and the
/// one-dimensional multiplicity-freeness criterion).
#[derive(Debug, Clone, serde::Serialize)]
pub struct SymmetryReport {
    pub is_antiautomorphism: bool,
    pub k_invariant: bool,
    pub char_compatible: bool,
    pub all_reps_matched: bool,
    pub failed_rep: Option<u32>,
}

impl SymmetryReport {
    pub fn satisfied(&self) -> bool {
        self.is_antiautomorphism && self.k_invariant && self.char_compatible && self.all_reps_matched
    }
}

impl HeckeEngine {
    /// Checks the hypotheses of the one-dimensional symmetry criterion for a
    /// supplied antiautomorphism (an element-index map). For each good coset
    /// rep s it looks for k1, k2 with tau(s) = k1 s k2 and chi(k1)chi(k2)=1;
    /// since chi is trivial on conjugation by s over K_s, the stored
    /// factorization decides this independently of the choice.
    pub fn symmetry_criteria(&self, tau: &[u32]) -> SymmetryReport {
        assert_eq!(self.d, 1, "the scalar criterion needs a one-dimensional theta");
        let group = &self.triple.group;
        let k = &self.triple.k;
        let n = group.n;
        let pairs = crate::reps::sample_pairs(n, 4 * n, 17);
        let is_anti = pairs.iter().all(|&(x, y)| {
            tau[group.mul(x, y) as usize] == group.mul(tau[y as usize], tau[x as usize])
        }) && {
            let mut seen = vec![false; n];
            tau.iter().all(|&t| {
                let fresh = !seen[t as usize];
                seen[t as usize] = true;
                fresh
            })
        };
        let k_invariant = k.members.iter().all(|&m| k.contains(tau[m as usize]));
        let chi = |g: u32| self.triple.theta.mat(g)[(0, 0)];
        let char_compatible =
            k.members.iter().all(|&m| (chi(tau[m as usize]) - chi(m)).norm() < 1e-9);
        let mut failed_rep = None;
        for &ci in &self.s0 {
            let s = self.cosets.reps[ci];
            let ts = tau[s as usize];
            if self.cosets.coset_of[ts as usize] as usize != ci {
                failed_rep = Some(s);
                break;
            }
            let k1 = k.members[self.cosets.k1_pos[ts as usize] as usize];
            let k2 = k.members[self.cosets.k2_pos[ts as usize] as usize];
            if (chi(k1) * chi(k2) - ONE).norm() > 1e-9 {
                failed_rep = Some(s);
                break;
            }
        }
        SymmetryReport {
            is_antiautomorphism: is_anti,
            k_invariant,
            char_compatible,
            all_reps_matched: failed_rep.is_none(),
            failed_rep,
        }
    }

    /// The operator variant of the symmetry criterion for a fixed
    /// antiautomorphism `sharp` of End(V): requires theta(tau(k)) =
    /// sharp(theta(k)) on K, and for every good coset rep s a factorization
    /// tau(s) = k1 s k2 with `theta(k2)^* T theta(k1)^* = sharp(T)` on the
    /// whole intertwiner space. All factorizations of tau(s) are searched.
    pub fn symmetry_criteria_sharp(
        &self,
        tau: &[u32],
        sharp: &dyn Fn(&CMat) -> CMat,
    ) -> SymmetryReport {
        let group = &self.triple.group;
        let k = &self.triple.k;
        let n = group.n;
        let pairs = crate::reps::sample_pairs(n, 4 * n, 17);
        let is_anti = pairs.iter().all(|&(x, y)| {
            tau[group.mul(x, y) as usize] == group.mul(tau[y as usize], tau[x as usize])
        });
        let k_invariant = k.members.iter().all(|&m| k.contains(tau[m as usize]));
        let char_compatible = k.members.iter().all(|&m| {
            sharp(self.triple.theta.mat(m)).sub(self.triple.theta.mat(tau[m as usize])).max_abs()
                < 1e-8
        });
        let mut failed_rep = None;
        'outer: for (pos, &ci) in self.s0.iter().enumerate() {
            let s = self.cosets.reps[ci];
            let ts = tau[s as usize];
            if self.cosets.coset_of[ts as usize] as usize != ci {
                failed_rep = Some(s);
                break;
            }
            let k1 = k.members[self.cosets.k1_pos[ts as usize] as usize];
            let k2 = k.members[self.cosets.k2_pos[ts as usize] as usize];
            let si = group.inv(s);
            // Vary over the stabilizer: tau(s) = (k1 m) s (s^-1 m^-1 s k2).
            for &m in &self.cosets.stabilizers[ci] {
                let a = group.mul(k1, m);
                let b = group.mul3(si, group.inv(m), group.mul(s, k2));
                let ta = self.triple.theta.mat(a).adjoint();
                let tb = self.triple.theta.mat(b).adjoint();
                let ok = self.intertwiners[pos].iter().all(|t| {
                    tb.mul(&t.mul(&ta)).sub(&sharp(t)).max_abs() < 1e-8
                });
                if ok {
                    continue 'outer;
                }
            }
            failed_rep = Some(s);
            break;
        }
        SymmetryReport {
            is_antiautomorphism: is_anti,
            k_invariant,
            char_compatible,
            all_reps_matched: failed_rep.is_none(),
            failed_rep,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{build_field, ExtensionTable, MultChar};
    use crate::gl2::Gl2Group;
    use std::sync::Arc;

    fn cyclic(n: usize) -> GroupRef {
        let mul =
            (0..n).map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect()).collect::<Vec<_>>();
        Arc::new(crate::group::Group::from_mul_table(&format!("Z_{n}"), mul))
    }

    #[test]
    fn trivial_triple_full_group() {
        // (G, G, trivial): one spherical function, constant 1.
        let g = cyclic(6);
        let mask = SubgroupMask::new(&g, (0..6).collect());
        let theta = SubRep::from_char_fn(mask.clone(), |_| ONE);
        let engine = HeckeEngine::new(Triple::new(g.clone(), mask, theta)).unwrap();
        assert_eq!(engine.dim(), 1);
        let report = engine.commutator_report();
        assert!(report.mf);
        let sph = engine.spherical_set(0).unwrap();
        assert_eq!(sph.len(), 1);
        for g_idx in 0..6 {
            assert!((engine.eval(&sph[0].elem, g_idx) - ONE).norm() < 1e-12);
        }
        assert!((sph[0].d_sigma - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gelfand_pair_specialization_counts_cosets() {
        // (G, K, trivial): scalar algebra = bi-K-invariant functions,
        // dimension = number of double cosets.
        let f = build_field(3, 1).unwrap();
        let gl2 = Gl2Group::new(&f).unwrap();
        let k = gl2.subgroups.c.clone();
        let theta = SubRep::from_char_fn(k.clone(), |_| ONE);
        let engine = HeckeEngine::new(Triple::new(gl2.group.clone(), k, theta)).unwrap();
        assert_eq!(engine.dim(), engine.cosets.num_cosets());
        assert!(engine.psi_defect() < tol::PSI);
    }

    #[test]
    fn cartan_triple_q3_dim_and_sphericals() {
        // (GL(2,F_3), C, nu_1): two constituents (one principal series pair,
        // one cuspidal pair), so dim H = 2.
        let f = build_field(3, 1).unwrap();
        let ext = ExtensionTable::build(3, 1).unwrap();
        let gl2 = Arc::new(Gl2Group::new(&f).unwrap());
        let nu0 = MultChar::new(ext.ext(), 1);
        let k = gl2.subgroups.c.clone();
        let gl2c = gl2.clone();
        let extc = ext.clone();
        let theta = SubRep::from_char_fn(k.clone(), move |g| {
            let ac = gl2c.aff_then_cartan(g);
            nu0.eval(extc.from_coords(ac.a, ac.b))
        });
        let engine = HeckeEngine::new(Triple::new(gl2.group.clone(), k, theta)).unwrap();
        assert_eq!(engine.dim(), 2);
        assert_eq!(engine.mackey_dim(), 2);
        let report = engine.commutator_report();
        assert!(report.mf, "commutator {}", report.max_commutator);
        let sph = engine.spherical_set(0).unwrap();
        assert_eq!(sph.len(), 2);
        // Dimensions q+1 = 4 and q-1 = 2.
        let mut dims: Vec<u32> = sph.iter().map(|s| s.d_sigma_rounded()).collect();
        dims.sort();
        assert_eq!(dims, vec![2, 4]);
        // Functional equation, exhaustively.
        let pairs = engine.functional_equation_pairs(0, 0);
        for s in &sph {
            assert!(engine.functional_equation_residual(&s.elem, &pairs) < 1e-8);
        }
        // phi^* = phi and pairwise orthogonality.
        for s in &sph {
            assert!(engine.adjoint(&s.elem).sub(&s.elem).max_abs() < 1e-9);
        }
        assert!(engine.inner(&sph[0].elem, &sph[1].elem).norm() < 1e-8);
        // phi * mu = 0 for distinct sphericals.
        let prod = engine.conv_scalar(&sph[0].elem, &sph[1].elem);
        assert!(prod.max_abs() < 1e-8);
    }

    #[test]
    fn fourier_round_trip_on_random_elements() {
        let f = build_field(3, 1).unwrap();
        let ext = ExtensionTable::build(3, 1).unwrap();
        let gl2 = Arc::new(Gl2Group::new(&f).unwrap());
        let nu0 = MultChar::new(ext.ext(), 1);
        let k = gl2.subgroups.c.clone();
        let gl2c = gl2.clone();
        let extc = ext.clone();
        let theta = SubRep::from_char_fn(k.clone(), move |g| {
            let ac = gl2c.aff_then_cartan(g);
            nu0.eval(extc.from_coords(ac.a, ac.b))
        });
        let engine = HeckeEngine::new(Triple::new(gl2.group.clone(), k, theta)).unwrap();
        let sph = engine.spherical_set(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let mut f_el = AlgElem::zeros(engine.s0.len(), engine.d);
            for b in 0..engine.dim() {
                let c = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                f_el = f_el.add(&engine.basis_elem(b).scale(c));
            }
            let coeffs = engine.sft(&f_el, &sph);
            let back = engine.isft(&coeffs, &sph);
            assert!(back.sub(&f_el).max_abs() < tol::FOURIER);
            // Convolution formula.
            let g_el = engine.basis_elem(0);
            let conv = engine.conv_scalar(&f_el, &g_el);
            let lhs = engine.sft(&conv, &sph);
            let c2 = engine.sft(&g_el, &sph);
            for ((l, a), b) in lhs.iter().zip(&coeffs).zip(&c2) {
                assert!((l - a * b).norm() < tol::FOURIER * 10.0);
            }
            assert!(engine.plancherel_defect(&f_el, &f_el, &sph) < tol::FOURIER);
        }
        // The transform of psi (the algebra identity) never vanishes.
        let psi = engine.psi_elem();
        for c in engine.sft(&psi, &sph) {
            assert!(c.norm() > 0.5);
        }
    }
}
