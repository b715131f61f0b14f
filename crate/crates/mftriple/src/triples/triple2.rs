//! The triple (GL(2,F_{q^2}), GL(2,F_q), rho_nu) for a cuspidal rho_nu with
//! non-square restriction: decomposition into principal-series and cuspidal
//! constituents of the big group, the rank-one kernel F_1 built from the
//! two-level Kloosterman sums, the four-case closed form of the cuspidal
//! spherical functions, and the parabolic closed form that reuses the
//! Cartan-triple projection machinery at the lower level.

use crate::ff::{AddChar, ExtensionTable, FieldTable, MultChar};
use crate::gl2::Gl2Group;
use crate::group::SubgroupMask;
use crate::hecke::{HeckeEngine, Triple};
use crate::kloosterman::KloostermanTable;
use crate::linalg::{dot, singular_values, CMat, C, ZERO};
use crate::reps::{multiplicity, Gl2Reps, SubRep, UnitaryRep};
use crate::triples::triple1::{CuspidalMachinery, Triple1};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum T2Label {
    /// Principal series of the big group, xi1 < xi2 over F_{q^2}^*.
    Parabolic { xi1: u32, xi2: u32 },
    /// Cuspidal rho_mu, mu over F_{q^4}^* (smaller index of its pair).
    Cuspidal { mu: u32 },
}

impl std::fmt::Display for T2Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            T2Label::Parabolic { xi1, xi2 } => write!(f, "parabolic:{xi1},{xi2}"),
            T2Label::Cuspidal { mu } => write!(f, "cuspidal:{mu}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct T2Constituent {
    pub label: T2Label,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum T2Error {
    DecomposableNu(u32),
    SquareRestriction(u32),
    Unsupported(String),
}

impl std::fmt::Display for T2Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            T2Error::DecomposableNu(k) => write!(f, "nu_{k} is decomposable"),
            T2Error::SquareRestriction(k) => {
                write!(f, "nu_{k} restricts to a square character; this case is unsupported")
            }
            T2Error::Unsupported(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for T2Error {}

pub struct Triple2 {
    pub q: u32,
    pub f_q: FieldTable,
    /// F_{q^2} over F_q.
    pub ext1: ExtensionTable,
    /// F_{q^4} over F_{q^2}.
    pub ext2: ExtensionTable,
    pub g2: Arc<Gl2Group>,
    pub g1: Arc<Gl2Group>,
    pub g1_mask: SubgroupMask,
    pub nu: MultChar,
    pub chi: AddChar,
    pub chi_lift: AddChar,
    pub j: KloostermanTable,
    pub reps2: Gl2Reps,
    pub reps1: Gl2Reps,
    pub rho_nu: UnitaryRep,
    chi_rho_nu_on_g1: Vec<C>,
}

impl Triple2 {
    pub fn new(q: u32, nu_k: u32) -> Result<Triple2, T2Error> {
        if q != 3 {
            return Err(T2Error::Unsupported(format!("desk scale is q = 3, got {q}")));
        }
        let f_q = FieldTable::build(q, 1).unwrap();
        let f_q2 = FieldTable::build(q, 2).unwrap();
        let f_q4 = FieldTable::build(q, 4).unwrap();
        let ext1 = ExtensionTable::from_ext(f_q2.clone());
        let ext2 = ExtensionTable::from_ext(f_q4);
        let nu = MultChar::new(ext1.ext(), nu_k);
        if !nu.indecomposable(&ext1) {
            return Err(T2Error::DecomposableNu(nu_k));
        }
        // nu restricted to F_q^* must not be a square: with q - 1 even this
        // means an odd index.
        let sharp = nu.sharp(&ext1).k;
        if sharp.is_multiple_of(2) {
            return Err(T2Error::SquareRestriction(nu_k));
        }
        let g2 = Arc::new(Gl2Group::new(&f_q2).unwrap());
        let g1 = Arc::new(Gl2Group::new(&f_q).unwrap());
        let g1_mask = g2.embedded_subfield_mask(&ext1);
        let chi = AddChar::new(&f_q, 1);
        let chi_lift = AddChar::lift(&chi, &ext1);
        let j = KloostermanTable::new(&ext1, &chi, &nu).unwrap();
        let ext_small = ExtensionTable::build(q, 1).unwrap();
        let reps1 = Gl2Reps::with_chi(g1.clone(), ext_small, chi.clone());
        let reps2 = Gl2Reps::with_chi(g2.clone(), ext2.clone(), chi_lift.clone());
        // Characters of F_{q^2}^* serve both as the Cartan-induction datum
        // and as the cuspidal datum of the small group: same index.
        let rho_nu =
            reps1.cuspidal(nu_k).map_err(|e| T2Error::Unsupported(e.to_string()))?;
        let chi_rho_nu_on_g1 = (0..g1.group.n as u32).map(|g| rho_nu.trace(g)).collect();
        Ok(Triple2 {
            q,
            f_q,
            ext1,
            ext2,
            g2,
            g1,
            g1_mask,
            nu,
            chi,
            chi_lift,
            j,
            reps2,
            reps1,
            rho_nu,
            chi_rho_nu_on_g1,
        })
    }

    /// Standalone index of an embedded GL(2,F_q) element of the big group.
    pub fn to_standalone(&self, g: u32) -> u32 {
        let [a, b, c, d] = self.g2.coords(g);
        self.g1.index_of(a, b, c, d).expect("coordinates lie in the base field")
    }

    /// rho_nu as a representation of the embedded subgroup.
    pub fn theta(&self) -> SubRep {
        let mats = self
            .g1_mask
            .members
            .iter()
            .map(|&m| self.rho_nu.matrix(self.to_standalone(m)))
            .collect();
        SubRep::from_mats(self.g1_mask.clone(), mats)
    }

    /// The engine for (G_2, G_1, rho_nu) with the distinguished vector
    /// delta_1 (the first basis vector of L(F_q^*)).
    pub fn engine(&self) -> HeckeEngine {
        HeckeEngine::new(Triple::new(self.g2.group.clone(), self.g1_mask.clone(), self.theta()))
            .expect("subfield triple is well-formed")
    }

    /// Enumerates the constituents of the induced representation.
    pub fn analyze(&self) -> Vec<T2Constituent> {
        let qq = self.ext1.ext().q; // q^2
        let nn = qq - 1;
        let q = self.q;
        let mut out = Vec::new();
        // Principal series: unordered pairs xi1 != xi2 with
        // (xi1 xi2)# = nu# on F_q^* and bar(xi1) xi2 outside {nu, bar nu}.
        let sharp_small = |k: u32| MultChar::new(self.ext1.ext(), k).sharp(&self.ext1).k;
        let target = sharp_small(self.nu.k);
        let bar = |k: u32| (k as u64 * q as u64 % nn as u64) as u32;
        let nu_pair = [self.nu.k, bar(self.nu.k)];
        for k1 in 0..nn {
            for k2 in (k1 + 1)..nn {
                if sharp_small((k1 + k2) % nn) != target {
                    continue;
                }
                let mix = (bar(k1) + k2) % nn;
                if nu_pair.contains(&mix) {
                    continue;
                }
                out.push(T2Constituent {
                    label: T2Label::Parabolic { xi1: k1, xi2: k2 },
                    dim: (q * q + 1) as usize,
                });
            }
        }
        // Cuspidals of the big group: mu over F_{q^4}^*, indecomposable over
        // F_{q^2}, restricting to nu on F_q^*.
        let big_n = self.ext2.ext().q - 1; // q^4 - 1
        let bar_big = |k: u32| (k as u64 * qq as u64 % big_n as u64) as u32;
        let mut seen = vec![false; big_n as usize];
        for k in 0..big_n {
            if seen[k as usize] {
                continue;
            }
            let bk = bar_big(k);
            if bk == k {
                continue;
            }
            seen[k as usize] = true;
            seen[bk as usize] = true;
            let mu = MultChar::new(self.ext2.ext(), k);
            // Restriction to F_q^*: embedded indices below q in the tower.
            let matches = (1..q).all(|x| {
                (mu.eval(x) - self.nu.eval(x)).norm() < 1e-9
            });
            if matches {
                out.push(T2Constituent {
                    label: T2Label::Cuspidal { mu: k.min(bk) },
                    dim: (q * q - 1) as usize,
                });
            }
        }
        let total: usize = out.iter().map(|c| c.dim).sum();
        let expected = (self.g2.group.n / self.g1.group.n) * (q as usize - 1);
        assert_eq!(total, expected, "constituent dimensions must sum to [G2:G1](q-1)");
        out
    }

    pub fn build_constituent(&self, label: &T2Label) -> UnitaryRep {
        match label {
            T2Label::Parabolic { xi1, xi2 } => self.reps2.parabolic_full(*xi1, *xi2),
            T2Label::Cuspidal { mu } => self.reps2.cuspidal(*mu).expect("admissible cuspidal"),
        }
    }

    /// Multiplicity of rho_nu in the restriction of a big-group
    /// representation, via the 48-element character sum.
    pub fn multiplicity_in_induced(&self, sigma: &UnitaryRep) -> Result<u32, f64> {
        let chi_res: Vec<C> = self
            .g1_mask
            .members
            .iter()
            .map(|&m| sigma.trace(m))
            .collect();
        let chi_nu: Vec<C> = self
            .g1_mask
            .members
            .iter()
            .map(|&m| self.chi_rho_nu_on_g1[self.to_standalone(m) as usize])
            .collect();
        multiplicity(&chi_nu, &chi_res)
    }

    /// The Cartan-triple machinery at the lower level for
    /// nu_0 = xi1 bar(xi2); this is the deliberate dependency of the
    /// parabolic spherical functions on the first triple.
    pub fn lower_machinery(&self, xi1: u32, xi2: u32) -> CuspidalMachinery {
        let qq = self.ext1.ext().q;
        let nu0_k = ((xi1 as u64 + xi2 as u64 * self.q as u64) % (qq - 1) as u64) as u32;
        let t1 = Triple1::new(self.q, nu0_k).expect("nu_0 = xi1 bar(xi2) is indecomposable");
        t1.cuspidal_machinery(self.nu.k).expect("admissible lower-level data")
    }

    /// Closed-form spherical function of a principal-series constituent:
    /// a sum over u = beta + alpha i outside the base field with
    /// cu + d != 0 and r = (au+b)/(cu+d) = beta1 + alpha1 i outside it,
    /// of conj(xi1(cu+d)) conj(xi2(alpha (ad-bc) / (alpha1 (cu+d))))
    /// chi(beta - beta1) F_0(alpha1^-1, alpha^-1), scaled by 1/q.
    pub fn spherical_parabolic(&self, xi1: u32, xi2: u32, mach: &CuspidalMachinery, g: u32) -> C {
        let f2 = self.ext1.ext();
        let fq = &self.f_q;
        let xi1c = MultChar::new(f2, xi1);
        let xi2c = MultChar::new(f2, xi2);
        let [a, b, c, d] = self.g2.coords(g);
        let det = self.g2.det(g);
        let mut s = ZERO;
        for alpha in 1..self.q {
            for beta in 0..self.q {
                let u = self.ext1.from_coords(beta, alpha);
                let den = f2.add(f2.mul(c, u), d); // cu + d
                if den == 0 {
                    continue;
                }
                let r = f2.mul(f2.add(f2.mul(a, u), b), f2.inv(den));
                if self.ext1.in_base(r) {
                    continue;
                }
                let (beta1, alpha1) = self.ext1.coords(r);
                let xi2_arg = f2.mul(
                    f2.mul(self.ext1.embed(alpha), det),
                    f2.inv(f2.mul(self.ext1.embed(alpha1), den)),
                );
                let f0 = mach.f0_matrix[((fq.inv(alpha1) - 1) as usize, (fq.inv(alpha) - 1) as usize)];
                s += xi1c.eval(den).conj()
                    * xi2c.eval(xi2_arg).conj()
                    * self.chi.eval(fq.sub(beta, beta1))
                    * f0;
            }
        }
        s / self.q as f64
    }

    pub fn cuspidal_machinery2(&self, mu_k: u32) -> Result<Cuspidal2Machinery, T2Error> {
        Cuspidal2Machinery::new(self, mu_k)
    }
}

/// The kernel F_1, the extracted vector L delta_1, and the four-case closed
/// form of the spherical function of a big-group cuspidal constituent.
pub struct Cuspidal2Machinery {
    pub mu: MultChar,
    pub j2: KloostermanTable,
    /// F_1 as a q x q matrix over the parameters theta, sigma in F_q:
    /// entry (theta, sigma) = F_1((1-i theta)^-1, (1-i sigma)^-1).
    pub f1_matrix: CMat,
    /// [L delta_1]((1-i theta)^-1) extracted from the rank-one kernel.
    pub u_vec: Vec<C>,
    /// Support elements (1 - i theta)^-1 indexed by theta.
    pub support: Vec<u32>,
    q: u32,
    f_q: FieldTable,
    ext1: ExtensionTable,
    g2: Arc<Gl2Group>,
    chi_lift: AddChar,
    nu: MultChar,
    j: KloostermanTable,
}

impl Cuspidal2Machinery {
    fn new(t2: &Triple2, mu_k: u32) -> Result<Cuspidal2Machinery, T2Error> {
        let mu = MultChar::new(t2.ext2.ext(), mu_k);
        if !mu.indecomposable(&t2.ext2) {
            return Err(T2Error::DecomposableNu(mu_k));
        }
        let matches = (1..t2.q).all(|x| (mu.eval(x) - t2.nu.eval(x)).norm() < 1e-9);
        if !matches {
            return Err(T2Error::Unsupported(format!(
                "mu_{mu_k} does not restrict to nu on the prime field"
            )));
        }
        let j2 = KloostermanTable::new(&t2.ext2, &t2.chi_lift, &mu).unwrap();
        let q = t2.q;
        let f2 = t2.ext1.ext();
        let i = t2.ext1.i_elem();
        // (1 - i theta)^-1 per theta.
        let support: Vec<u32> = (0..q)
            .map(|theta| f2.inv(f2.sub(1, f2.mul(i, t2.ext1.embed(theta)))))
            .collect();
        let mut f1_matrix = CMat::zeros(q as usize, q as usize);
        for theta in 0..q {
            let one_minus_itheta = f2.sub(1, f2.mul(i, t2.ext1.embed(theta)));
            for sigma in 0..q {
                let one_minus_isigma = f2.sub(1, f2.mul(i, t2.ext1.embed(sigma)));
                let mut s = ZERO;
                for t in 1..q {
                    let mu_arg =
                        f2.neg(f2.mul(f2.inv(t2.ext1.embed(t)), f2.inv(one_minus_itheta)));
                    s += mu.eval(t2.ext2.embed(mu_arg))
                        * t2.j.eval(t)
                        * j2.eval(f2.mul(
                            f2.mul(t2.ext1.embed(t), one_minus_isigma),
                            one_minus_itheta,
                        ));
                }
                let delta = if theta == sigma { 1.0 } else { 0.0 };
                f1_matrix[(theta as usize, sigma as usize)] =
                    (C::new(delta, 0.0) + s * q as f64) / (q + 1) as f64;
            }
        }
        let u_vec = extract_row_vector(&f1_matrix);
        Ok(Cuspidal2Machinery {
            mu,
            j2,
            f1_matrix,
            u_vec,
            support,
            q,
            f_q: t2.f_q.clone(),
            ext1: t2.ext1.clone(),
            g2: t2.g2.clone(),
            chi_lift: t2.chi_lift.clone(),
            nu: t2.nu.clone(),
            j: t2.j.clone(),
        })
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.f1_matrix.hermitian_defect()
    }

    pub fn second_singular_value(&self) -> f64 {
        singular_values(&self.f1_matrix)[1]
    }

    pub fn trace_defect(&self) -> f64 {
        (self.f1_matrix.trace() - C::new(1.0, 0.0)).norm()
    }

    /// Definitional kernel: the projection P onto the rho_nu-isotypic
    /// subspace of the restriction, applied to the support basis vectors.
    /// Entry (theta, sigma) must reproduce F_1; values off the support must
    /// vanish.
    pub fn f1_from_projection(&self, t2: &Triple2, rho_mu: &UnitaryRep) -> (CMat, f64) {
        let n = rho_mu.dim;
        let g1n = t2.g1.group.n as f64;
        let scale = (t2.q - 1) as f64 / g1n;
        let mut mat = CMat::zeros(self.q as usize, self.q as usize);
        let mut off_support = 0.0f64;
        for theta in 0..self.q as usize {
            let mut vin = vec![ZERO; n];
            vin[(self.support[theta] - 1) as usize] = C::new(1.0, 0.0);
            let mut acc = vec![ZERO; n];
            for &m in &t2.g1_mask.members {
                let coeff = t2.chi_rho_nu_on_g1[t2.to_standalone(m) as usize].conj();
                let applied = rho_mu.apply(m, &vin);
                for (a, b) in acc.iter_mut().zip(&applied) {
                    *a += coeff * b;
                }
            }
            for a in acc.iter_mut() {
                *a *= scale;
            }
            for sigma in 0..self.q as usize {
                mat[(theta, sigma)] = acc[(self.support[sigma] - 1) as usize];
            }
            for (pos, val) in acc.iter().enumerate() {
                let elem = pos as u32 + 1;
                if !self.support.contains(&elem) {
                    off_support = off_support.max(val.norm());
                }
            }
        }
        (mat, off_support)
    }

    /// The closed-form spherical function of rho_mu, in four cases.
    pub fn spherical_cuspidal(&self, g: u32) -> C {
        let f2 = self.ext1.ext();
        let fq = &self.f_q;
        let [a, b, c, d] = self.g2.coords(g);
        let one_minus_i = |t: u32| f2.sub(1, f2.mul(self.ext1.i_elem(), self.ext1.embed(t)));
        if c == 0 {
            if a == d {
                // sum over theta of mu(a^-1) chi~(-a^-1 b (1-i theta))
                // F_1[theta][theta]
                let ai = f2.inv(a);
                let mut s = ZERO;
                for theta in 0..self.q {
                    s += self.mu.eval(self.ext1_to_ext2(ai))
                        * self.chi_lift.eval(f2.neg(f2.mul(f2.mul(ai, b), one_minus_i(theta))))
                        * self.f1_matrix[(theta as usize, theta as usize)];
                }
                return s;
            }
            let r = f2.mul(d, f2.inv(a));
            if self.ext1.in_base(r) {
                return ZERO;
            }
            // r = alpha + i beta = (1 - i theta)/(1 - i sigma):
            // sigma = (alpha - 1)/(eta beta), theta = sigma alpha - beta.
            let (alpha, beta) = self.ext1.coords(r);
            let eta = fq.gen;
            let sigma = fq.mul(fq.sub(alpha, 1), fq.inv(fq.mul(eta, beta)));
            let theta = fq.sub(fq.mul(sigma, alpha), beta);
            let di = f2.inv(d);
            return self.mu.eval(self.ext1_to_ext2(di))
                * self.chi_lift.eval(f2.neg(f2.mul(f2.mul(di, b), one_minus_i(theta))))
                * self.f1_matrix[(sigma as usize, theta as usize)];
        }
        // Big cell: double sum over theta, sigma.
        let det = self.g2.det(g);
        let ci = f2.inv(c);
        let mut s = ZERO;
        for theta in 0..self.q {
            let omt = one_minus_i(theta);
            for sigma in 0..self.q {
                let oms = one_minus_i(sigma);
                let mu_arg = f2.mul(f2.mul(c, f2.inv(oms)), f2.inv(det));
                let chi_arg = f2.neg(f2.add(
                    f2.mul(f2.mul(a, ci), oms),
                    f2.mul(f2.mul(d, ci), omt),
                ));
                let j_arg = f2.mul(f2.mul(f2.mul(ci, ci), f2.mul(oms, omt)), det);
                s += self.mu.eval(self.ext1_to_ext2(mu_arg))
                    * self.chi_lift.eval(chi_arg)
                    * self.j2.eval(j_arg)
                    * self.f1_matrix[(theta as usize, sigma as usize)];
            }
        }
        -s
    }

    fn ext1_to_ext2(&self, z: u32) -> u32 {
        // F_{q^2} elements embed into F_{q^4} with identical indices.
        z
    }

    /// Matrix coefficient <w, rho_mu(g) w> for a unit vector supported on
    /// the (1-i theta)^-1 line.
    pub fn spherical_from_vector(&self, rho_mu: &UnitaryRep, w: &[C], g: u32) -> C {
        dot(w, &rho_mu.apply(g, w))
    }

    /// The extracted vector as an element of L(F_{q^2}^*).
    pub fn u_vector_full(&self, dim: usize) -> Vec<C> {
        let mut w = vec![ZERO; dim];
        for (theta, &elem) in self.support.iter().enumerate() {
            w[(elem - 1) as usize] = self.u_vec[theta];
        }
        w
    }

    /// The explicitly assembled intertwiner image L~ delta_1: coefficient
    /// (1/(q+1)) on delta_1 plus (q/(q+1)) sum_t nu(-t^-1) J(t(1-i theta))
    /// j(t) on each delta_{(1-i theta)^-1}; a non-normalized multiple of
    /// L delta_1.
    pub fn l_tilde_delta1(&self, dim: usize) -> Vec<C> {
        let f2 = self.ext1.ext();
        let mut w = vec![ZERO; dim];
        let scale_q = self.q as f64 / (self.q + 1) as f64;
        for theta in 0..self.q {
            let omt = f2.sub(1, f2.mul(self.ext1.i_elem(), self.ext1.embed(theta)));
            let mut coeff = ZERO;
            for t in 1..self.q {
                coeff += self.nu.eval(self.ext1.embed(self.f_q.neg(self.f_q.inv(t))))
                    * self.j2.eval(f2.mul(self.ext1.embed(t), omt))
                    * self.j.eval(t);
            }
            w[(self.support[theta as usize] - 1) as usize] += coeff * scale_q;
        }
        // delta_1 = delta_{(1 - i 0)^-1}: add the atom.
        w[0] += C::new(1.0 / (self.q + 1) as f64, 0.0);
        w
    }
}

/// Extracts u with F_1[theta][sigma] = conj(u(theta)) u(sigma) from the
/// rank-one kernel, anchored at the largest diagonal entry.
fn extract_row_vector(m: &CMat) -> Vec<C> {
    let n = m.rows;
    let x0 = (0..n).max_by(|&a, &b| m[(a, a)].re.partial_cmp(&m[(b, b)].re).unwrap()).unwrap();
    let scale = m[(x0, x0)].re.max(0.0).sqrt();
    assert!(scale > 1e-8);
    (0..n).map(|s| m[(x0, s)] / scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    fn t2() -> Triple2 {
        Triple2::new(3, 1).unwrap()
    }

    #[test]
    fn admissibility_gate() {
        assert!(matches!(Triple2::new(3, 0), Err(T2Error::DecomposableNu(0))));
        // nu_2 is indecomposable but restricts to the trivial (square)
        // character of F_3^*.
        assert!(matches!(Triple2::new(3, 2), Err(T2Error::SquareRestriction(2))));
    }

    #[test]
    fn analyze_counts_and_dimension() {
        let t = t2();
        let cons = t.analyze();
        let parabolics = cons
            .iter()
            .filter(|c| matches!(c.label, T2Label::Parabolic { .. }))
            .count();
        let cuspidals = cons.iter().filter(|c| matches!(c.label, T2Label::Cuspidal { .. })).count();
        assert_eq!(parabolics, 8);
        assert_eq!(cuspidals, 20);
        assert_eq!(cons.iter().map(|c| c.dim).sum::<usize>(), 240);
    }

    #[test]
    fn f1_matches_projection_definition() {
        let t = t2();
        let cons = t.analyze();
        let mu_k = cons
            .iter()
            .find_map(|c| match c.label {
                T2Label::Cuspidal { mu } => Some(mu),
                _ => None,
            })
            .unwrap();
        let mach = t.cuspidal_machinery2(mu_k).unwrap();
        assert!(mach.hermitian_defect() < 1e-10, "defect {}", mach.hermitian_defect());
        assert!(mach.trace_defect() < 1e-10);
        assert!(mach.second_singular_value() < tol::RANK_ONE);
        let rho_mu = t.build_constituent(&T2Label::Cuspidal { mu: mu_k });
        let (proj, off_support) = mach.f1_from_projection(&t, &rho_mu);
        assert!(off_support < 1e-9, "projection leaks off the support: {off_support}");
        let dev = proj.sub(&mach.f1_matrix).max_abs();
        assert!(dev < 1e-9, "F_1 vs definitional projection: {dev}");
    }

    #[test]
    fn cuspidal_closed_form_equals_matrix_coefficient() {
        let t = t2();
        let mu_k = t
            .analyze()
            .iter()
            .find_map(|c| match c.label {
                T2Label::Cuspidal { mu } => Some(mu),
                _ => None,
            })
            .unwrap();
        let mach = t.cuspidal_machinery2(mu_k).unwrap();
        let rho_mu = t.build_constituent(&T2Label::Cuspidal { mu: mu_k });
        let w = mach.u_vector_full(rho_mu.dim);
        // w is a unit vector.
        assert!((crate::linalg::vec_norm(&w) - 1.0).abs() < 1e-8);
        // Identity value 1, and agreement on all of B_2 plus a sample.
        assert!(tol::close(
            mach.spherical_cuspidal(t.g2.group.id),
            C::new(1.0, 0.0),
            1e-9
        ));
        for &m in &t.g2.subgroups.b.members {
            let closed = mach.spherical_cuspidal(m);
            let mc = mach.spherical_from_vector(&rho_mu, &w, m);
            assert!(tol::close(closed, mc, tol::SPHERICAL_T2), "B2 mismatch at {m}");
        }
        for g in crate::reps::sample_elements(t.g2.group.n, 500, 11) {
            let closed = mach.spherical_cuspidal(g);
            let mc = mach.spherical_from_vector(&rho_mu, &w, g);
            assert!(tol::close(closed, mc, tol::SPHERICAL_T2), "sample mismatch at {g}");
        }
        // The L~ route: a non-normalized multiple of the same vector.
        let lt = mach.l_tilde_delta1(rho_mu.dim);
        let norm = crate::linalg::vec_norm(&lt);
        assert!(norm > 1e-6);
        let overlap = crate::linalg::dot(&lt, &w).norm() / norm;
        assert!((overlap - 1.0).abs() < 1e-8, "L~ delta_1 not collinear: {overlap}");
        let wt: Vec<C> = lt.iter().map(|z| z / norm).collect();
        for g in crate::reps::sample_elements(t.g2.group.n, 200, 13) {
            let a = mach.spherical_from_vector(&rho_mu, &wt, g);
            let b = mach.spherical_cuspidal(g);
            assert!(tol::close(a, b, tol::SPHERICAL_T2));
        }
    }

    #[test]
    fn explicit_parabolic_eigenfunction_reproduces_the_closed_form() {
        // The function F_1 on G_2, supported on the big cell and given on
        // the canonical factorization g = [[alpha,beta],[0,1]] W [[c,d],[0,z]]
        // by (1/sqrt q) conj(xi1(c)) conj(xi2(z)) chi(-beta) conj(f0(1/alpha)),
        // is a unit vector of the principal-series model whose diagonal
        // matrix coefficient is the parabolic spherical function.
        use crate::gl2::G2Factor;
        let t = t2();
        let cons = t.analyze();
        let (xi1, xi2) = cons
            .iter()
            .find_map(|c| match c.label {
                T2Label::Parabolic { xi1, xi2 } => Some((xi1, xi2)),
                _ => None,
            })
            .unwrap();
        let mach = t.lower_machinery(xi1, xi2);
        let f0 = &mach.f0_vec;
        let f2 = t.ext1.ext();
        let fq = &t.f_q;
        let xi1c = MultChar::new(f2, xi1);
        let xi2c = MultChar::new(f2, xi2);
        let n = t.g2.group.n;
        let scale = 1.0 / (t.q as f64).sqrt();
        let table: Vec<C> = (0..n as u32)
            .map(|g| match t.g2.g2_decomposition(&t.ext1, g) {
                G2Factor::G1B2 => ZERO,
                G2Factor::G1WB2 { alpha, beta, c, d, z } => {
                    let _ = d;
                    xi1c.eval(c).conj()
                        * xi2c.eval(z).conj()
                        * t.chi.eval(fq.neg(beta))
                        * f0[(fq.inv(alpha) - 1) as usize].conj()
                        * scale
                }
            })
            .collect();
        // Membership in the induced model: F(g b) = conj(xi1 xi2)(b) F(g).
        let group = &t.g2.group;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let g = rng.gen_range(0..n) as u32;
            let b = t.g2.subgroups.b.members[rng.gen_range(0..t.g2.subgroups.b.size())];
            let [x, _, _, zz] = t.g2.coords(b);
            let want = table[g as usize] * (xi1c.eval(x) * xi2c.eval(zz)).conj();
            assert!((table[group.mul(g, b) as usize] - want).norm() < 1e-10);
        }
        // Unit norm in the induced inner product.
        let bsize = t.g2.subgroups.b.size() as f64;
        let nsq: f64 = table.iter().map(|v| v.norm_sqr()).sum::<f64>() / bsize;
        assert!((nsq - 1.0).abs() < 1e-9, "norm^2 = {nsq}");
        // Diagonal matrix coefficient = closed form, on a sample.
        for g in crate::reps::sample_elements(n, 250, 9) {
            let mut mc = ZERO;
            for x in 0..n as u32 {
                mc += table[group.mul(g, x) as usize] * table[x as usize].conj();
            }
            mc /= bsize;
            let closed = t.spherical_parabolic(xi1, xi2, &mach, g);
            assert!((mc - closed).norm() < 1e-9, "mismatch at {g}: {mc} vs {closed}");
        }
    }

    #[test]
    fn restriction_of_principal_series_splits_off_a_cartan_induction() {
        // Res to the subfield group of a big principal series is the small
        // principal series of the restricted characters plus the Cartan
        // induction of xi1 conj(xi2), checked on characters.
        let t = t2();
        let (xi1, xi2) = (0u32, 3u32);
        let sigma = t.reps2.parabolic_full(xi1, xi2);
        let xi1c = MultChar::new(t.ext1.ext(), xi1);
        let xi2c = MultChar::new(t.ext1.ext(), xi2);
        let small = t.reps1.parabolic_full(xi1c.sharp(&t.ext1).k, xi2c.sharp(&t.ext1).k);
        // Character of Ind_{C}^{G_1} of nu0 = xi1 bar(xi2) via the coset sum.
        let qq = t.ext1.ext().q;
        let nu0_k = ((xi1 as u64 + xi2 as u64 * t.q as u64) % (qq - 1) as u64) as u32;
        let nu0 = MultChar::new(t.ext1.ext(), nu0_k);
        let g1 = &t.g1;
        let cmask = &g1.subgroups.c;
        let ind_char = |g: u32| -> C {
            let mut s = ZERO;
            for x in 0..g1.group.n as u32 {
                let y = g1.group.mul3(g1.group.inv(x), g, x);
                if cmask.contains(y) {
                    let ac = g1.aff_then_cartan(y);
                    s += nu0.eval(t.ext1.from_coords(ac.a, ac.b));
                }
            }
            s / cmask.size() as f64
        };
        for g in 0..g1.group.n as u32 {
            let lhs = sigma.trace(t.g1_mask.members[g as usize]);
            let standalone = t.to_standalone(t.g1_mask.members[g as usize]);
            let rhs = small.trace(standalone) + ind_char(standalone);
            assert!((lhs - rhs).norm() < 1e-8, "restriction character mismatch at {g}");
        }
    }

    #[test]
    fn support_ladder_intertwines_borel_actions() {
        // The operators sending delta_u to delta_{u (1-i theta)^-1}
        // intertwine the Borel restrictions of the two cuspidal levels.
        let t = t2();
        let mu_k = t
            .analyze()
            .iter()
            .find_map(|c| match c.label {
                T2Label::Cuspidal { mu } => Some(mu),
                _ => None,
            })
            .unwrap();
        let rho_mu = t.build_constituent(&T2Label::Cuspidal { mu: mu_k });
        let f2 = t.ext1.ext();
        let dim_small = t.rho_nu.dim;
        let dim_big = rho_mu.dim;
        for theta in 0..t.q {
            let shift = f2.inv(f2.sub(1, f2.mul(t.ext1.i_elem(), t.ext1.embed(theta))));
            // L_theta as a matrix.
            let mut l = CMat::zeros(dim_big, dim_small);
            for u in 1..t.q {
                let target = f2.mul(t.ext1.embed(u), shift);
                l[((target - 1) as usize, (u - 1) as usize)] = C::new(1.0, 0.0);
            }
            for &b in t.g1.subgroups.b.members.iter() {
                let b2 = t.g1_mask.members[{
                    // embed the standalone Borel element
                    let [a, bb, c, d] = t.g1.coords(b);
                    t.g1_mask.pos(t.g2.index_of(a, bb, c, d).unwrap())
                }];
                let lhs = rho_mu.matrix(b2).mul(&l);
                let rhs = l.mul(&t.rho_nu.matrix(b));
                assert!(lhs.sub(&rhs).max_abs() < 1e-10, "theta={theta} b={b}");
            }
        }
    }

    #[test]
    fn isotypic_and_line_projections_commute() {
        // P (the rho_nu-isotypic projection of the restriction) and Q_1
        // (the projection onto the span of the support line) commute, and
        // their product is the rank-one projection carried by F_1.
        let t = t2();
        let mu_k = t
            .analyze()
            .iter()
            .find_map(|c| match c.label {
                T2Label::Cuspidal { mu } => Some(mu),
                _ => None,
            })
            .unwrap();
        let mach = t.cuspidal_machinery2(mu_k).unwrap();
        let rho_mu = t.build_constituent(&T2Label::Cuspidal { mu: mu_k });
        let n = rho_mu.dim;
        // P = (d_nu/|G_1|) sum conj(chi_nu) rho_mu.
        let mut p = CMat::zeros(n, n);
        for &m in &t.g1_mask.members {
            let coeff = t.chi_rho_nu_on_g1[t.to_standalone(m) as usize].conj();
            p = p.add(&rho_mu.matrix(m).scale(coeff));
        }
        p = p.scale(C::new((t.q - 1) as f64 / t.g1.group.n as f64, 0.0));
        // Q_1: orthogonal projection onto the delta lines of the support.
        let mut q1 = CMat::zeros(n, n);
        for &elem in &mach.support {
            q1[((elem - 1) as usize, (elem - 1) as usize)] = C::new(1.0, 0.0);
        }
        let comm = p.mul(&q1).sub(&q1.mul(&p));
        assert!(comm.max_abs() < 1e-10, "P and Q_1 must commute: {}", comm.max_abs());
        // P Q_1 is rank one with trace 1.
        let p1 = p.mul(&q1);
        assert!((p1.trace() - C::new(1.0, 0.0)).norm() < 1e-9);
        let svals = singular_values(&p1);
        assert!(svals[1] < 1e-7);
        // Its matrix in the delta basis restricted to the support is F_1.
        for (ti, &et) in mach.support.iter().enumerate() {
            for (si, &es) in mach.support.iter().enumerate() {
                // [P_1 delta_{(1-i theta)^-1}]((1-i sigma)^-1)
                let val = p1[((es - 1) as usize, (et - 1) as usize)];
                assert!((val - mach.f1_matrix[(ti, si)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn constituents_pairwise_inequivalent_via_character_gram() {
        let t = t2();
        let cons = t.analyze();
        let classes = t.g2.group.classes();
        let n = t.g2.group.n as f64;
        // Characters evaluated at class representatives only.
        let tables: Vec<Vec<C>> = cons
            .iter()
            .map(|c| {
                let sigma = t.build_constituent(&c.label);
                classes.reps.iter().map(|&r| sigma.trace(r)).collect()
            })
            .collect();
        for i in 0..tables.len() {
            for j in i..tables.len() {
                let gram: C = tables[i]
                    .iter()
                    .zip(&tables[j])
                    .zip(&classes.sizes)
                    .map(|((a, b), &s)| a * b.conj() * s as f64)
                    .sum::<C>()
                    / n;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram - C::new(want, 0.0)).norm() < 1e-8,
                    "character Gram defect at ({i},{j}): {gram}"
                );
            }
        }
    }

    #[test]
    fn parabolic_closed_form_normalization_and_support() {
        let t = t2();
        let cons = t.analyze();
        let (xi1, xi2) = cons
            .iter()
            .find_map(|c| match c.label {
                T2Label::Parabolic { xi1, xi2 } => Some((xi1, xi2)),
                _ => None,
            })
            .unwrap();
        let mach = t.lower_machinery(xi1, xi2);
        assert!(tol::close(
            t.spherical_parabolic(xi1, xi2, &mach, t.g2.group.id),
            C::new(1.0, 0.0),
            1e-9
        ));
        // Matrix-coefficient oracle through the engine intertwiner.
        let engine = t.engine();
        let sigma = t.build_constituent(&T2Label::Parabolic { xi1, xi2 });
        let mc = engine.spherical_from_irrep(&sigma).unwrap();
        for g in crate::reps::sample_elements(t.g2.group.n, 300, 23) {
            let closed = t.spherical_parabolic(xi1, xi2, &mach, g);
            assert!(
                tol::close(closed, mc[g as usize], tol::SPHERICAL_T2),
                "parabolic mismatch at {g}: {closed} vs {}",
                mc[g as usize]
            );
        }
    }
}
