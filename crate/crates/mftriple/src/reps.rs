//! Unitary representations: explicit matrix families, one-dimensional
//! det-characters of GL(2), induced representations on the function model,
//! the q-dimensional split summand of a reducible principal series, and the
//! cuspidal family built from generalized Kloosterman sums. Also intertwiner
//! spaces (averaged projections plus a rank decision) and character
//! utilities.

use crate::ff::{AddChar, ExtensionTable, MultChar};
use crate::gl2::Gl2Group;
use crate::group::{Group, GroupRef, LeftCosets, SubgroupMask};
use crate::kloosterman::KloostermanTable;
use crate::linalg::{dot, hermitian_eigen, vec_norm, CMat, C, ONE, ZERO};
use crate::tol;
use std::sync::{Arc, OnceLock};

/// Anything that can act as a unitary representation on indexed elements.
pub trait RepLike {
    fn dim(&self) -> usize;
    fn apply(&self, g: u32, v: &[C]) -> Vec<C>;
    fn matrix(&self, g: u32) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for j in 0..d {
            let mut e = vec![ZERO; d];
            e[j] = ONE;
            let col = self.apply(g, &e);
            for i in 0..d {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

/// A representation of a subgroup, stored as one unitary matrix per member.
#[derive(Clone)]
pub struct SubRep {
    pub mask: SubgroupMask,
    pub dim: usize,
    mats: Vec<CMat>,
}

impl SubRep {
    pub fn from_mats(mask: SubgroupMask, mats: Vec<CMat>) -> SubRep {
        assert_eq!(mask.size(), mats.len());
        let dim = mats[0].rows;
        SubRep { mask, dim, mats }
    }

    /// One-dimensional representation from a scalar character.
    pub fn from_char_fn(mask: SubgroupMask, f: impl Fn(u32) -> C) -> SubRep {
        let mats = mask
            .members
            .iter()
            .map(|&m| {
                let mut mat = CMat::zeros(1, 1);
                mat[(0, 0)] = f(m);
                mat
            })
            .collect();
        SubRep { mask, dim: 1, mats }
    }

    /// Restriction of a full representation to a subgroup.
    pub fn restrict(rep: &UnitaryRep, mask: SubgroupMask) -> SubRep {
        let mats = mask.members.iter().map(|&m| rep.matrix(m)).collect();
        SubRep { mask, dim: rep.dim, mats }
    }

    #[inline]
    pub fn mat(&self, g: u32) -> &CMat {
        &self.mats[self.mask.pos(g)]
    }

    /// Maximal homomorphism defect over all member pairs.
    pub fn homomorphism_defect(&self, group: &Group) -> f64 {
        let mut dev = 0.0f64;
        for &x in &self.mask.members {
            for &y in &self.mask.members {
                let prod = self.mat(x).mul(self.mat(y));
                dev = dev.max(prod.sub(self.mat(group.mul(x, y))).max_abs());
            }
        }
        dev
    }

    pub fn unitarity_defect(&self) -> f64 {
        let eye = CMat::eye(self.dim);
        self.mats.iter().map(|m| m.adjoint().mul(m).sub(&eye).max_abs()).fold(0.0, f64::max)
    }

    pub fn character_on_members(&self) -> Vec<C> {
        self.mats.iter().map(|m| m.trace()).collect()
    }
}

impl RepLike for SubRep {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, g: u32, v: &[C]) -> Vec<C> {
        self.mat(g).apply(v)
    }
    fn matrix(&self, g: u32) -> CMat {
        self.mat(g).clone()
    }
}

/// Data backing a cuspidal representation of GL(2, F) on L(F^*). The base
/// field is the coefficient field of the group; nu is an indecomposable
/// character of the quadratic extension and j the generalized Kloosterman
/// sum for (chi, nu).
pub struct CuspidalData {
    pub gl2: Arc<Gl2Group>,
    pub ext: ExtensionTable,
    pub nu: MultChar,
    pub chi: AddChar,
    pub j: KloostermanTable,
}

enum RepKind {
    Explicit { mats: Vec<CMat> },
    OneDimDet { gl2: Arc<Gl2Group>, psi: MultChar },
    Induced { k: SubgroupMask, theta: Arc<SubRep>, cosets: LeftCosets },
    Compressed { inner: Box<UnitaryRep>, isom: CMat },
    Cuspidal(Box<CuspidalData>),
}

pub struct UnitaryRep {
    pub group: GroupRef,
    pub dim: usize,
    pub label: String,
    kind: RepKind,
    cache: Option<Vec<OnceLock<CMat>>>,
    character: OnceLock<Vec<C>>,
}

const CACHE_ENTRY_LIMIT: usize = 4_000_000;

impl UnitaryRep {
    fn new(group: GroupRef, dim: usize, label: String, kind: RepKind) -> UnitaryRep {
        let cache = if group.n * dim * dim <= CACHE_ENTRY_LIMIT && !matches!(kind, RepKind::Explicit { .. })
        {
            Some((0..group.n).map(|_| OnceLock::new()).collect())
        } else {
            None
        };
        UnitaryRep { group, dim, label, kind, cache, character: OnceLock::new() }
    }

    pub fn explicit(group: GroupRef, label: &str, mats: Vec<CMat>) -> UnitaryRep {
        assert_eq!(mats.len(), group.n);
        let dim = mats[0].rows;
        UnitaryRep::new(group, dim, label.to_string(), RepKind::Explicit { mats })
    }

    fn build_matrix(&self, g: u32) -> CMat {
        match &self.kind {
            RepKind::Explicit { mats } => mats[g as usize].clone(),
            _ => {
                let d = self.dim;
                let mut m = CMat::zeros(d, d);
                for j in 0..d {
                    let mut e = vec![ZERO; d];
                    e[j] = ONE;
                    let col = self.apply_kind(g, &e);
                    for i in 0..d {
                        m[(i, j)] = col[i];
                    }
                }
                m
            }
        }
    }

    fn apply_kind(&self, g: u32, v: &[C]) -> Vec<C> {
        match &self.kind {
            RepKind::Explicit { mats } => mats[g as usize].apply(v),
            RepKind::OneDimDet { gl2, psi } => {
                vec![v[0] * psi.eval(gl2.det(g))]
            }
            RepKind::Induced { k, theta, cosets } => {
                let group = &self.group;
                let d = theta.dim;
                let blocks = cosets.transversal.len();
                let mut out = vec![ZERO; blocks * d];
                for b in 0..blocks {
                    let vb = &v[b * d..(b + 1) * d];
                    if vb.iter().all(|z| *z == ZERO) {
                        continue;
                    }
                    let x = group.mul(g, cosets.transversal[b]);
                    let a = cosets.coset_of[x as usize] as usize;
                    let kk = group.mul(group.inv(cosets.transversal[a]), x);
                    debug_assert!(k.contains(kk));
                    let t = theta.mat(kk);
                    let ob = &mut out[a * d..(a + 1) * d];
                    for i in 0..d {
                        let mut s = ZERO;
                        for (j, &vj) in vb.iter().enumerate() {
                            s += t[(i, j)] * vj;
                        }
                        ob[i] += s;
                    }
                }
                out
            }
            RepKind::Compressed { inner, isom } => {
                // rho(g) = isom^* inner(g) isom
                let lifted = isom.apply(v);
                let moved = inner.apply(g, &lifted);
                isom.adjoint().apply(&moved)
            }
            RepKind::Cuspidal(data) => cuspidal_apply(data, g, v),
        }
    }

    pub fn apply(&self, g: u32, v: &[C]) -> Vec<C> {
        if let Some(cache) = &self.cache {
            if let Some(m) = cache[g as usize].get() {
                return m.apply(v);
            }
        }
        self.apply_kind(g, v)
    }

    pub fn matrix(&self, g: u32) -> CMat {
        match &self.cache {
            Some(cache) => cache[g as usize].get_or_init(|| self.build_matrix(g)).clone(),
            None => self.build_matrix(g),
        }
    }

    /// Trace of rho(g), using structure instead of full matrices where the
    /// representation is induced.
    pub fn trace(&self, g: u32) -> C {
        match &self.kind {
            RepKind::Explicit { mats } => mats[g as usize].trace(),
            RepKind::OneDimDet { gl2, psi } => psi.eval(gl2.det(g)),
            RepKind::Induced { k, theta, cosets } => {
                let group = &self.group;
                let mut s = ZERO;
                for &t in &cosets.transversal {
                    let x = group.mul3(group.inv(t), g, t);
                    if k.contains(x) {
                        s += theta.mat(x).trace();
                    }
                }
                s
            }
            _ => {
                let d = self.dim;
                let mut s = ZERO;
                for i in 0..d {
                    let mut e = vec![ZERO; d];
                    e[i] = ONE;
                    s += self.apply(g, &e)[i];
                }
                s
            }
        }
    }

    /// Full character, cached.
    pub fn character(&self) -> &[C] {
        self.character.get_or_init(|| {
            crate::par::map_indexed(self.group.n, |g| self.trace(g as u32))
        })
    }

    /// Maximal deviation of the character from class constancy.
    pub fn class_constancy_defect(&self) -> f64 {
        let chi = self.character();
        let classes = self.group.classes();
        let mut per_class: Vec<Option<C>> = vec![None; classes.reps.len()];
        let mut dev = 0.0f64;
        for (g, &v) in chi.iter().enumerate() {
            let cid = classes.class_of[g] as usize;
            match per_class[cid] {
                None => per_class[cid] = Some(v),
                Some(w) => dev = dev.max((v - w).norm()),
            }
        }
        dev
    }

    pub fn unitarity_defect_sampled(&self, sample: &[u32]) -> f64 {
        let eye = CMat::eye(self.dim);
        sample
            .iter()
            .map(|&g| {
                let m = self.matrix(g);
                m.adjoint().mul(&m).sub(&eye).max_abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn homomorphism_defect_sampled(&self, pairs: &[(u32, u32)]) -> f64 {
        pairs
            .iter()
            .map(|&(x, y)| {
                let prod = self.matrix(x).mul(&self.matrix(y));
                prod.sub(&self.matrix(self.group.mul(x, y))).max_abs()
            })
            .fold(0.0, f64::max)
    }
}

impl RepLike for UnitaryRep {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, g: u32, v: &[C]) -> Vec<C> {
        UnitaryRep::apply(self, g, v)
    }
    fn matrix(&self, g: u32) -> CMat {
        UnitaryRep::matrix(self, g)
    }
}

fn cuspidal_apply(data: &CuspidalData, g: u32, v: &[C]) -> Vec<C> {
    let f = &data.gl2.field;
    let ext = &data.ext;
    let nu = &data.nu;
    let chi = &data.chi;
    let q = f.q;
    let [alpha, beta, gamma, delta] = data.gl2.coords(g);
    let mut out = vec![ZERO; (q - 1) as usize];
    if gamma == 0 {
        // [rho(g) v](y) = nu(delta) chi(delta^-1 beta y^-1) v(delta alpha^-1 y)
        let di = f.inv(delta);
        let dai = f.mul(delta, f.inv(alpha));
        let scale = nu.eval(ext.embed(delta));
        for y in 1..q {
            let src = f.mul(dai, y);
            out[(y - 1) as usize] =
                scale * chi.eval(f.mul(f.mul(di, beta), f.inv(y))) * v[(src - 1) as usize];
        }
    } else {
        // [rho(g) v](y) = -sum_x nu(-gamma x)
        //                  chi(alpha gamma^-1 y^-1 + gamma^-1 delta x^-1)
        //                  j(gamma^-2 y^-1 x^-1 det g) v(x)
        let gi = f.inv(gamma);
        let det = f.sub(f.mul(alpha, delta), f.mul(beta, gamma));
        let gi2det = f.mul(f.mul(gi, gi), det);
        let agi = f.mul(alpha, gi);
        let gid = f.mul(gi, delta);
        for y in 1..q {
            let yi = f.inv(y);
            let cy = f.mul(agi, yi);
            let base = f.mul(gi2det, yi);
            let mut s = ZERO;
            for x in 1..q {
                let xi = f.inv(x);
                s += nu.eval(ext.embed(f.neg(f.mul(gamma, x))))
                    * chi.eval(f.add(cy, f.mul(gid, xi)))
                    * data.j.eval(f.mul(base, xi))
                    * v[(x - 1) as usize];
            }
            out[(y - 1) as usize] = -s;
        }
    }
    out
}

/// Builders for the irreducible representations of GL(2, F_q).
pub struct Gl2Reps {
    pub gl2: Arc<Gl2Group>,
    pub ext: ExtensionTable,
    pub chi: AddChar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepError {
    DecomposableNu(u32),
    Oversize(usize),
}

impl std::fmt::Display for RepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepError::DecomposableNu(k) => {
                write!(f, "cuspidal representations need an indecomposable character, nu_{k} is not")
            }
            RepError::Oversize(d) => write!(f, "induced dimension {d} exceeds 512"),
        }
    }
}

impl std::error::Error for RepError {}

impl Gl2Reps {
    /// Standard context with the canonical additive character chi_1.
    pub fn standard(gl2: Arc<Gl2Group>, ext: ExtensionTable) -> Gl2Reps {
        let chi = AddChar::new(&gl2.field, 1);
        Gl2Reps { gl2, ext, chi }
    }

    pub fn with_chi(gl2: Arc<Gl2Group>, ext: ExtensionTable, chi: AddChar) -> Gl2Reps {
        assert_eq!(chi.q, gl2.field.q);
        Gl2Reps { gl2, ext, chi }
    }

    /// psi(det g), one-dimensional.
    pub fn one_dim(&self, psi_k: u32) -> UnitaryRep {
        let psi = MultChar::new(&self.gl2.field, psi_k);
        UnitaryRep::new(
            self.gl2.group.clone(),
            1,
            format!("onedim:{psi_k}"),
            RepKind::OneDimDet { gl2: self.gl2.clone(), psi },
        )
    }

    /// Principal series induced from the Borel character
    /// [[a,b],[0,d]] -> psi1(a) psi2(d); irreducible iff psi1 != psi2.
    pub fn parabolic_full(&self, k1: u32, k2: u32) -> UnitaryRep {
        let f = &self.gl2.field;
        let psi1 = MultChar::new(f, k1);
        let psi2 = MultChar::new(f, k2);
        let gl2 = self.gl2.clone();
        let mask = gl2.subgroups.b.clone();
        let theta = SubRep::from_char_fn(mask.clone(), |g| {
            let [a, _, _, d] = gl2.coords(g);
            psi1.eval(a) * psi2.eval(d)
        });
        induce(self.gl2.group.clone(), &mask, theta, &format!("parabolic:{k1},{k2}")).unwrap()
    }

    /// The q-dimensional irreducible summand of the reducible principal
    /// series at psi1 = psi2 = psi (orthogonal complement of the
    /// det-character inside it).
    pub fn parabolic_q(&self, psi_k: u32) -> UnitaryRep {
        let inner = self.parabolic_full(psi_k, psi_k);
        let one = self.one_dim(psi_k);
        let n = self.gl2.group.n;
        let d = inner.dim;
        // Projection onto the one-dimensional summand.
        let mut proj = CMat::zeros(d, d);
        for g in 0..n as u32 {
            let m = inner.matrix(g);
            let scale = one.trace(g).conj();
            for (dst, src) in proj.data.iter_mut().zip(&m.data) {
                *dst += scale * src;
            }
        }
        for z in proj.data.iter_mut() {
            *z /= n as f64;
        }
        let (evals, vecs) = hermitian_eigen(&proj);
        assert!((evals[d - 1] - 1.0).abs() < 1e-8, "det-character summand not found");
        let w0 = vecs.col(d - 1);
        // Orthonormal basis of the complement.
        let mut cand: Vec<Vec<C>> = Vec::new();
        for i in 0..d {
            let mut e = vec![ZERO; d];
            e[i] = ONE;
            let c = dot(&e, &w0);
            for (ei, wi) in e.iter_mut().zip(&w0) {
                *ei -= c * wi;
            }
            cand.push(e);
        }
        let basis = crate::linalg::orthonormalize(&cand, 1e-8);
        assert_eq!(basis.len(), d - 1);
        let mut isom = CMat::zeros(d, d - 1);
        for (j, b) in basis.iter().enumerate() {
            for i in 0..d {
                isom[(i, j)] = b[i];
            }
        }
        UnitaryRep::new(
            self.gl2.group.clone(),
            d - 1,
            format!("parabolicq:{psi_k}"),
            RepKind::Compressed { inner: Box::new(inner), isom },
        )
    }

    /// Cuspidal representation attached to an indecomposable character nu of
    /// the quadratic extension.
    pub fn cuspidal(&self, nu_k: u32) -> Result<UnitaryRep, RepError> {
        let nu = MultChar::new(self.ext.ext(), nu_k);
        if !nu.indecomposable(&self.ext) {
            return Err(RepError::DecomposableNu(nu_k));
        }
        let j = KloostermanTable::new(&self.ext, &self.chi, &nu).expect("admissible data");
        let dim = (self.gl2.field.q - 1) as usize;
        Ok(UnitaryRep::new(
            self.gl2.group.clone(),
            dim,
            format!("cuspidal:{nu_k}"),
            RepKind::Cuspidal(Box::new(CuspidalData {
                gl2: self.gl2.clone(),
                ext: self.ext.clone(),
                nu,
                chi: self.chi.clone(),
                j,
            })),
        ))
    }

    /// The complete list of irreducible representations: one-dimensional,
    /// q-dimensional parabolic, principal series pairs, and one cuspidal per
    /// conjugate pair of indecomposable characters.
    pub fn all_irreducibles(&self) -> Vec<UnitaryRep> {
        let q = self.gl2.field.q;
        let mut out = Vec::new();
        for k in 0..q - 1 {
            out.push(self.one_dim(k));
        }
        for k in 0..q - 1 {
            out.push(self.parabolic_q(k));
        }
        for k1 in 0..q - 1 {
            for k2 in (k1 + 1)..q - 1 {
                out.push(self.parabolic_full(k1, k2));
            }
        }
        let qq = self.ext.ext().q;
        let mut seen = vec![false; (qq - 1) as usize];
        for k in 0..qq - 1 {
            if seen[k as usize] {
                continue;
            }
            let bar_k = (k as u64 * q as u64 % (qq - 1) as u64) as u32;
            if bar_k == k {
                continue; // decomposable
            }
            seen[k as usize] = true;
            seen[bar_k as usize] = true;
            out.push(self.cuspidal(k).expect("indecomposable by construction"));
        }
        debug_assert_eq!(
            out.iter().map(|r| r.dim * r.dim).sum::<usize>(),
            self.gl2.group.n,
            "sum of squared dimensions must be |G|"
        );
        out
    }
}

/// Induced representation on the function model, acting block-monomially on
/// the orthonormal basis indexed by (coset, theta-basis vector).
pub fn induce(
    group: GroupRef,
    k: &SubgroupMask,
    theta: SubRep,
    label: &str,
) -> Result<UnitaryRep, RepError> {
    let cosets = LeftCosets::build(&group, k);
    let dim = cosets.transversal.len() * theta.dim;
    if dim > 512 {
        return Err(RepError::Oversize(dim));
    }
    Ok(UnitaryRep::new(
        group,
        dim,
        label.to_string(),
        RepKind::Induced { k: k.clone(), theta: Arc::new(theta), cosets },
    ))
}

/// Multiplicity `(1/|G|) sum_g chi_sigma(g) conj(chi_rho(g))`, rejected when
/// the inner product strays from a nonnegative integer.
pub fn multiplicity(chi_sigma: &[C], chi_rho: &[C]) -> Result<u32, f64> {
    assert_eq!(chi_sigma.len(), chi_rho.len());
    let n = chi_sigma.len() as f64;
    let s: C = chi_sigma.iter().zip(chi_rho).map(|(a, b)| a * b.conj()).sum::<C>() / n;
    let nearest = s.re.round();
    let residual = (s - C::new(nearest, 0.0)).norm();
    if residual > tol::MULTIPLICITY || nearest < 0.0 {
        Err(residual)
    } else {
        Ok(nearest as u32)
    }
}

/// Orthonormal basis (normalized Hilbert-Schmidt) of the space of operators
/// T with `T rho1(h) = rho2(h) T` for all h in `members`. The rank is
/// cross-checked against the character inner product; a mismatch signals
/// numerical trouble and panics.
pub fn hom_space(
    group: &Group,
    members: &[u32],
    rho1: &dyn RepLike,
    rho2: &dyn RepLike,
) -> Vec<CMat> {
    let d1 = rho1.dim();
    let d2 = rho2.dim();
    let mut char_dim = ZERO;
    // Accumulate the averaged projection of every matrix unit in one pass.
    let mut projected = vec![CMat::zeros(d2, d1); d2 * d1];
    for &h in members {
        let a = rho2.matrix(h);
        let b = rho1.matrix(group.inv(h));
        char_dim += a.trace() * b.trace();
        for i in 0..d2 {
            for j in 0..d1 {
                let t = &mut projected[i * d1 + j];
                for r in 0..d2 {
                    let ari = a[(r, i)];
                    if ari == ZERO {
                        continue;
                    }
                    for s in 0..d1 {
                        t[(r, s)] += ari * b[(j, s)];
                    }
                }
            }
        }
    }
    let scale = 1.0 / members.len() as f64;
    for t in projected.iter_mut() {
        for z in t.data.iter_mut() {
            *z *= scale;
        }
    }
    // Orthonormalize with respect to <T1,T2> = tr(T2^* T1)/d1.
    let mut basis: Vec<CMat> = Vec::new();
    for t in projected {
        let mut w = t;
        for b in &basis {
            let c = w.hs_inner(b, d1);
            w = w.sub(&b.scale(c));
        }
        let n = w.hs_inner(&w, d1).re.max(0.0).sqrt();
        if n > tol::RANK {
            basis.push(w.scale(C::new(1.0 / n, 0.0)));
        }
    }
    let via_chars = char_dim / members.len() as f64;
    assert!(
        (via_chars - C::new(basis.len() as f64, 0.0)).norm() < 1e-6,
        "intertwiner rank {} disagrees with the character inner product {}",
        basis.len(),
        via_chars
    );
    basis
}

/// Dimension of the intertwiner space via characters (independent route).
pub fn hom_dim_via_characters(members: &[u32], tr1: impl Fn(u32) -> C, tr2: impl Fn(u32) -> C) -> f64 {
    let s: C = members.iter().map(|&h| tr2(h) * tr1(h).conj()).sum();
    (s / members.len() as f64).re
}

/// Scales the single intertwiner of a multiplicity-one space so that
/// `L^* L = I` (possible since the domain representation is irreducible).
pub fn isometric_intertwiner(basis: &[CMat]) -> Option<CMat> {
    if basis.len() != 1 {
        return None;
    }
    let l = &basis[0];
    let gram = l.adjoint().mul(l);
    let c = (gram.trace().re / l.cols as f64).max(0.0);
    if c < 1e-14 {
        return None;
    }
    let scaled = l.scale(C::new(1.0 / c.sqrt(), 0.0));
    let defect = scaled.adjoint().mul(&scaled).sub(&CMat::eye(l.cols)).max_abs();
    if defect > 1e-7 {
        return None;
    }
    Some(scaled)
}

/// The reproducing identity for an irreducible subgroup representation:
/// `v_i = (d/|K|) sum_k <theta(k) v_i, v_j> theta(k^-1) v_j`.
pub fn reproducing_defect(group: &Group, theta: &SubRep) -> f64 {
    let d = theta.dim;
    let kn = theta.mask.size() as f64;
    let mut dev = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut acc = vec![ZERO; d];
            for &k in &theta.mask.members {
                // <theta(k) v_i, v_j> theta(k^-1) v_j
                let coeff = theta.mat(k)[(j, i)];
                let minv = theta.mat(group.inv(k));
                for r in 0..d {
                    acc[r] += coeff * minv[(r, j)];
                }
            }
            let scale = d as f64 / kn;
            for a in acc.iter_mut() {
                *a *= scale;
            }
            let mut target = vec![ZERO; d];
            target[i] = ONE;
            let diff: f64 =
                acc.iter().zip(&target).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            dev = dev.max(diff);
        }
    }
    dev
}

/// Matrix-coefficient orthogonality over the full group:
/// `<u_ij^sigma, u_hk^rho> = (|G|/d_sigma) delta delta delta`.
pub fn matrix_coefficient_orthogonality_defect(reps: &[&UnitaryRep]) -> f64 {
    let n = reps[0].group.n;
    let mut dev = 0.0f64;
    for (ri, r1) in reps.iter().enumerate() {
        let mats1: Vec<CMat> = (0..n as u32).map(|g| r1.matrix(g)).collect();
        for (rj, r2) in reps.iter().enumerate() {
            let mats2: Vec<CMat> = if ri == rj {
                Vec::new()
            } else {
                (0..n as u32).map(|g| r2.matrix(g)).collect()
            };
            for i in 0..r1.dim {
                for j in 0..r1.dim {
                    for h in 0..r2.dim {
                        for k in 0..r2.dim {
                            let mut s = ZERO;
                            for g in 0..n {
                                let a = mats1[g][(i, j)];
                                let b = if ri == rj { mats1[g][(h, k)] } else { mats2[g][(h, k)] };
                                s += a * b.conj();
                            }
                            let want = if ri == rj && i == h && j == k {
                                C::new(n as f64 / r1.dim as f64, 0.0)
                            } else {
                                ZERO
                            };
                            dev = dev.max((s - want).norm());
                        }
                    }
                }
            }
        }
    }
    dev
}

/// Deterministic sample of element indices.
pub fn sample_elements(n: usize, count: usize, seed: u64) -> Vec<u32> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0..n) as u32).collect()
}

/// Deterministic sample of element pairs.
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Vec<(u32, u32)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen_range(0..n) as u32, rng.gen_range(0..n) as u32)).collect()
}

/// Unit vector `w` with `vec = c * w`; None for (numerically) zero input.
pub fn normalize_vec(v: &[C]) -> Option<Vec<C>> {
    let n = vec_norm(v);
    if n < 1e-12 {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{build_field, ExtensionTable};
    use crate::gl2::Gl2Group;

    fn ctx(p: u32) -> Gl2Reps {
        let f = build_field(p, 1).unwrap();
        let gl2 = Arc::new(Gl2Group::new(&f).unwrap());
        let ext = ExtensionTable::build(p, 1).unwrap();
        Gl2Reps::standard(gl2, ext)
    }

    #[test]
    fn dimensions_per_family() {
        let reps = ctx(3);
        assert_eq!(reps.one_dim(0).dim, 1);
        assert_eq!(reps.parabolic_full(0, 1).dim, 4); // q + 1
        assert_eq!(reps.parabolic_q(0).dim, 3); // q
        assert_eq!(reps.cuspidal(1).unwrap().dim, 2); // q - 1
        assert!(matches!(reps.cuspidal(4), Err(RepError::DecomposableNu(4))));
    }

    #[test]
    fn sum_of_squared_dims_is_group_order() {
        for p in [3u32, 5] {
            let reps = ctx(p);
            let all = reps.all_irreducibles();
            assert_eq!(all.iter().map(|r| r.dim * r.dim).sum::<usize>(), reps.gl2.group.n);
        }
    }

    #[test]
    fn cuspidal_is_a_unitary_homomorphism() {
        for p in [3u32, 5] {
            let reps = ctx(p);
            let rho = reps.cuspidal(1).unwrap();
            let pairs = sample_pairs(rho.group.n, 500, 7);
            assert!(rho.homomorphism_defect_sampled(&pairs) < 1e-8);
            let sample: Vec<u32> = (0..rho.group.n as u32).collect();
            assert!(rho.unitarity_defect_sampled(&sample) < 1e-8);
        }
    }

    #[test]
    fn parabolic_and_onedim_are_homomorphisms() {
        let reps = ctx(3);
        let pairs = sample_pairs(48, 300, 11);
        for r in [reps.parabolic_full(0, 1), reps.parabolic_q(1), reps.one_dim(1)] {
            assert!(r.homomorphism_defect_sampled(&pairs) < 1e-9, "label {}", r.label);
            let all: Vec<u32> = (0..48).collect();
            assert!(r.unitarity_defect_sampled(&all) < 1e-9, "label {}", r.label);
        }
    }

    #[test]
    fn cuspidal_character_on_cartan() {
        // On [[a, eta b],[b, a]] with b != 0 the trace is -nu(z) - nu(conj z).
        let reps = ctx(3);
        let rho = reps.cuspidal(1).unwrap();
        let gl2 = &reps.gl2;
        let ext = &reps.ext;
        for a in 0..3u32 {
            for b in 1..3u32 {
                let g = gl2.cartan_elem(a, b);
                let z = ext.from_coords(a, b);
                let expect = -(rho_nu_eval(&reps, z) + rho_nu_eval(&reps, ext.conj(z)));
                assert!((rho.trace(g) - expect).norm() < 1e-9);
            }
        }
        // And characters are class functions with unit norm.
        assert!(rho.class_constancy_defect() < 1e-9);
        let chi = rho.character();
        assert_eq!(multiplicity(chi, chi), Ok(1));
        // Central classes carry (q-1) nu(a); nontrivial unipotent-type
        // classes carry -nu(a); split-regular classes vanish.
        let f = &reps.gl2.field;
        for a in 1..3u32 {
            let central = reps.gl2.index_of(a, 0, 0, a).unwrap();
            let want = C::new(2.0, 0.0) * rho_nu_eval(&reps, reps.ext.embed(a));
            assert!((rho.trace(central) - want).norm() < 1e-9);
            let unipotent = reps.gl2.index_of(a, 1, 0, a).unwrap();
            let want = -rho_nu_eval(&reps, reps.ext.embed(a));
            assert!((rho.trace(unipotent) - want).norm() < 1e-9);
            for d in 1..3u32 {
                if d == a {
                    continue;
                }
                let split = reps.gl2.index_of(a, 0, 0, d).unwrap();
                assert!(rho.trace(split).norm() < 1e-9);
            }
        }
        let _ = f;
    }

    fn rho_nu_eval(reps: &Gl2Reps, z: u32) -> C {
        MultChar::new(reps.ext.ext(), 1).eval(z)
    }

    #[test]
    fn multiplicity_of_irreducibles_in_themselves() {
        let reps = ctx(3);
        for r in reps.all_irreducibles() {
            let chi = r.character();
            assert_eq!(multiplicity(chi, chi), Ok(1), "rep {} not irreducible", r.label);
        }
    }

    #[test]
    fn induced_trivial_is_permutation_representation() {
        let reps = ctx(3);
        let group = reps.gl2.group.clone();
        let k = reps.gl2.subgroups.c.clone();
        let theta = SubRep::from_char_fn(k.clone(), |_| ONE);
        let ind = induce(group.clone(), &k, theta, "ind-trivial").unwrap();
        assert_eq!(ind.dim, 48 / 8);
        // Permutation matrices: entries in {0,1} with a single 1 per column.
        for g in sample_elements(48, 10, 3) {
            let m = ind.matrix(g);
            for j in 0..ind.dim {
                let col = m.col(j);
                let ones = col.iter().filter(|z| (**z - ONE).norm() < 1e-12).count();
                let zeros = col.iter().filter(|z| z.norm() < 1e-12).count();
                assert_eq!((ones, zeros), (1, ind.dim - 1));
            }
        }
        // Induced character vanishes off the union of conjugates of K.
        let mut in_union = [false; 48];
        for g in 0..48u32 {
            for &kk in &k.members {
                in_union[group.mul3(g, kk, group.inv(g)) as usize] = true;
            }
        }
        for g in 0..48u32 {
            if !in_union[g as usize] {
                assert!(ind.trace(g).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn induced_dimension_from_cartan_character() {
        let reps = ctx(3);
        let k = reps.gl2.subgroups.c.clone();
        let nu0 = MultChar::new(reps.ext.ext(), 1);
        let ext = reps.ext.clone();
        let gl2 = reps.gl2.clone();
        let theta = SubRep::from_char_fn(k.clone(), move |g| {
            let ac = gl2.aff_then_cartan(g);
            nu0.eval(ext.from_coords(ac.a, ac.b))
        });
        let ind = induce(reps.gl2.group.clone(), &k, theta, "ind-nu0").unwrap();
        assert_eq!(ind.dim, 6); // q (q - 1)
        let pairs = sample_pairs(48, 200, 5);
        assert!(ind.homomorphism_defect_sampled(&pairs) < 1e-9);
    }

    #[test]
    fn hom_space_schur_and_distinct() {
        let reps = ctx(3);
        let rho1 = reps.cuspidal(1).unwrap();
        let rho2 = reps.cuspidal(2).unwrap();
        let members: Vec<u32> = (0..48).collect();
        let group = &reps.gl2.group;
        // Hom(sigma, sigma) is one-dimensional for irreducible sigma.
        let end = hom_space(group, &members, &rho1, &rho1);
        assert_eq!(end.len(), 1);
        // nu_2 is not conjugate to nu_1 at q = 3 (bar nu_1 = nu_3).
        let inter = hom_space(group, &members, &rho1, &rho2);
        assert_eq!(inter.len(), 0);
        let chi1 = rho1.character();
        let chi2 = rho2.character();
        assert_eq!(multiplicity(chi1, chi2), Ok(0));
    }

    #[test]
    fn matrix_coefficient_orthogonality_q3() {
        let reps = ctx(3);
        let all = reps.all_irreducibles();
        let refs: Vec<&UnitaryRep> = all.iter().collect();
        assert!(matrix_coefficient_orthogonality_defect(&refs) < 1e-7);
    }

    #[test]
    fn reproducing_identity_for_restrictions() {
        let reps = ctx(3);
        let group = &reps.gl2.group;
        // theta = nu_1 on the Cartan subgroup (irreducible, 1-dim).
        let k = reps.gl2.subgroups.c.clone();
        let nu = MultChar::new(reps.ext.ext(), 1);
        let ext = reps.ext.clone();
        let gl2 = reps.gl2.clone();
        let theta = SubRep::from_char_fn(k, move |g| {
            let ac = gl2.aff_then_cartan(g);
            nu.eval(ext.from_coords(ac.a, ac.b))
        });
        assert!(reproducing_defect(group, &theta) < 1e-9);
        // theta = cuspidal restricted to the full group (K = G).
        let rho = reps.cuspidal(1).unwrap();
        let all_mask = SubgroupMask::new(group, (0..48).collect());
        let theta2 = SubRep::restrict(&rho, all_mask);
        assert!(reproducing_defect(group, &theta2) < 1e-8);
    }
}
