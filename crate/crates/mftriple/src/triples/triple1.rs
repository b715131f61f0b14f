//! The triple (GL(2,F_q), C, nu_0) for an indecomposable character nu_0 of
//! the Cartan subgroup: decomposition into principal-series and cuspidal
//! constituents, closed-form spherical functions for both families, and the
//! rank-one projection machinery of the cuspidal case.

use crate::ff::{AddChar, ExtensionTable, FieldTable, MultChar};
use crate::gl2::Gl2Group;
use crate::hecke::{HeckeEngine, Triple};
use crate::kloosterman::KloostermanTable;
use crate::linalg::{dot, singular_values, CMat, C, ZERO};
use crate::reps::{multiplicity, Gl2Reps, SubRep, UnitaryRep};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum T1Label {
    /// q-dimensional parabolic with psi^2 = nu_0 restricted.
    ParabolicQ { psi: u32 },
    /// (q+1)-dimensional principal series, psi1 < psi2.
    ParabolicFull { psi1: u32, psi2: u32 },
    /// Cuspidal rho_nu, nu the smaller index of its conjugate pair.
    Cuspidal { nu: u32 },
}

impl std::fmt::Display for T1Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            T1Label::ParabolicQ { psi } => write!(f, "parabolicq:{psi}"),
            T1Label::ParabolicFull { psi1, psi2 } => write!(f, "parabolic:{psi1},{psi2}"),
            T1Label::Cuspidal { nu } => write!(f, "cuspidal:{nu}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Constituent {
    pub label: T1Label,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub constituents: Vec<Constituent>,
    pub dim_ind: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum T1Error {
    DecomposableNu0(u32),
    Inadmissible(String),
}

impl std::fmt::Display for T1Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            T1Error::DecomposableNu0(k) => write!(f, "nu_{k} is decomposable"),
            T1Error::Inadmissible(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for T1Error {}

pub struct Triple1 {
    pub q: u32,
    pub field: FieldTable,
    pub ext: ExtensionTable,
    pub gl2: Arc<Gl2Group>,
    pub reps: Gl2Reps,
    pub nu0: MultChar,
    pub chi: AddChar,
}

impl Triple1 {
    pub fn new(q: u32, nu0_k: u32) -> Result<Triple1, T1Error> {
        let (p, d) = crate::ff::split_prime_power(q)
            .map_err(|e| T1Error::Inadmissible(e.to_string()))?;
        let field =
            FieldTable::build(p, d).map_err(|e| T1Error::Inadmissible(e.to_string()))?;
        let ext = ExtensionTable::from_ext(
            FieldTable::build(p, 2 * d).map_err(|e| T1Error::Inadmissible(e.to_string()))?,
        );
        let gl2 = Arc::new(
            Gl2Group::new(&field).map_err(|e| T1Error::Inadmissible(e.to_string()))?,
        );
        let nu0 = MultChar::new(ext.ext(), nu0_k);
        if !nu0.indecomposable(&ext) {
            return Err(T1Error::DecomposableNu0(nu0_k));
        }
        let chi = AddChar::new(&field, 1);
        let reps = Gl2Reps::with_chi(gl2.clone(), ext.clone(), chi.clone());
        Ok(Triple1 { q, field, ext, gl2, reps, nu0, chi })
    }

    /// nu_0 as a character of the Cartan subgroup.
    pub fn theta(&self) -> SubRep {
        let k = self.gl2.subgroups.c.clone();
        let gl2 = self.gl2.clone();
        let ext = self.ext.clone();
        let nu0 = self.nu0.clone();
        SubRep::from_char_fn(k, move |g| {
            let ac = gl2.aff_then_cartan(g);
            nu0.eval(ext.from_coords(ac.a, ac.b))
        })
    }

    pub fn engine(&self) -> HeckeEngine {
        HeckeEngine::new(Triple::new(self.gl2.group.clone(), self.gl2.subgroups.c.clone(), self.theta()))
            .expect("Cartan triple is well-formed")
    }

    /// The three constituent families of the induced representation.
    pub fn analyze(&self) -> DecompositionReport {
        let q = self.q;
        let sharp_k = self.nu0.sharp(&self.ext).k;
        let n = q - 1;
        let mut constituents = Vec::new();
        for psi in 0..n {
            if (2 * psi) % n == sharp_k {
                constituents.push(Constituent { label: T1Label::ParabolicQ { psi }, dim: q as usize });
            }
        }
        for psi1 in 0..n {
            for psi2 in (psi1 + 1)..n {
                if (psi1 + psi2) % n == sharp_k {
                    constituents.push(Constituent {
                        label: T1Label::ParabolicFull { psi1, psi2 },
                        dim: (q + 1) as usize,
                    });
                }
            }
        }
        let qq = self.ext.ext().q;
        let bar = |k: u32| (k as u64 * q as u64 % (qq - 1) as u64) as u32;
        let nu0_pair = [self.nu0.k, bar(self.nu0.k)];
        let mut seen = vec![false; (qq - 1) as usize];
        for k in 0..qq - 1 {
            if seen[k as usize] {
                continue;
            }
            let bk = bar(k);
            if bk == k {
                continue; // decomposable
            }
            seen[k as usize] = true;
            seen[bk as usize] = true;
            if nu0_pair.contains(&k) {
                continue;
            }
            let nu = MultChar::new(self.ext.ext(), k);
            if nu.sharp(&self.ext).k == sharp_k {
                constituents
                    .push(Constituent { label: T1Label::Cuspidal { nu: k.min(bk) }, dim: (q - 1) as usize });
            }
        }
        let dim_ind = constituents.iter().map(|c| c.dim).sum();
        assert_eq!(dim_ind, (q * (q - 1)) as usize, "constituent dimensions must sum to q(q-1)");
        DecompositionReport { constituents, dim_ind }
    }

    /// Builds the unitary representation attached to a label.
    pub fn build_constituent(&self, label: &T1Label) -> UnitaryRep {
        match label {
            T1Label::ParabolicQ { psi } => self.reps.parabolic_q(*psi),
            T1Label::ParabolicFull { psi1, psi2 } => self.reps.parabolic_full(*psi1, *psi2),
            T1Label::Cuspidal { nu } => self.reps.cuspidal(*nu).expect("admissible cuspidal"),
        }
    }

    /// Multiplicity of nu_0 in the restriction of sigma to the Cartan
    /// subgroup (equivalently of sigma in the induced representation).
    pub fn multiplicity_in_induced(&self, sigma: &UnitaryRep) -> Result<u32, f64> {
        let c = &self.gl2.subgroups.c;
        let chi_sigma: Vec<C> = c.members.iter().map(|&m| sigma.trace(m)).collect();
        let chi_nu0: Vec<C> = c
            .members
            .iter()
            .map(|&m| {
                let ac = self.gl2.aff_then_cartan(m);
                self.nu0.eval(self.ext.from_coords(ac.a, ac.b))
            })
            .collect();
        multiplicity(&chi_nu0, &chi_sigma)
    }

    /// Closed-form spherical function of a parabolic constituent, evaluated
    /// through the affine-Cartan factorization g = [[x,y],[0,1]] [[a,eb],[b,a]]:
    /// the bracket sums nu_0(gamma+i) conj(nu_0(x gamma + y + i))
    /// psi_2(((x gamma + y)^2 - eta)/(x (gamma^2 - eta))) over gamma, plus
    /// conj(psi_1(x)), all scaled by conj(nu_0(a+ib))/(q+1).
    pub fn spherical_parabolic(&self, label: &T1Label, g: u32) -> C {
        let (k1, k2) = match label {
            T1Label::ParabolicQ { psi } => (*psi, *psi),
            T1Label::ParabolicFull { psi1, psi2 } => (*psi1, *psi2),
            _ => panic!("parabolic label expected"),
        };
        let f = &self.field;
        let psi1 = MultChar::new(f, k1);
        let psi2 = MultChar::new(f, k2);
        let ac = self.gl2.aff_then_cartan(g);
        let (x, y) = (ac.x, ac.y);
        let eta = f.gen;
        let mut bracket = psi1.eval(x).conj();
        for gamma in f.elements() {
            let top = f.add(f.mul(x, gamma), y); // x gamma + y
            let num = f.sub(f.mul(top, top), eta);
            let den = f.mul(x, f.sub(f.mul(gamma, gamma), eta));
            bracket += self.nu0.eval(self.ext.from_coords(gamma, 1))
                * self.nu0.eval(self.ext.from_coords(top, 1)).conj()
                * psi2.eval(f.mul(num, f.inv(den)));
        }
        self.nu0.eval(self.ext.from_coords(ac.a, ac.b)).conj() * bracket / (self.q + 1) as f64
    }

    /// The eigenvector F_nu inside the principal-series function model:
    /// F_nu(cartan(a,b) aff(x,y)) = conj(nu(a+ib)) conj(psi_1(x)).
    /// Returned as the coefficient vector over the induced-model transversal
    /// of the representation built by `parabolic_full(psi1, psi2)`.
    pub fn f_nu_vector(&self, psi1: u32, nu_k: u32) -> (UnitaryRep, Vec<C>) {
        let psi1c = MultChar::new(&self.field, psi1);
        let nu = MultChar::new(self.ext.ext(), nu_k);
        let value = |g: u32| -> C {
            let ca = self.gl2.cartan_then_aff(g);
            nu.eval(self.ext.from_coords(ca.a, ca.b)).conj() * psi1c.eval(ca.x).conj()
        };
        // The representation space stores one coefficient per left B-coset,
        // namely the function value at the transversal element.
        let sharp = nu.sharp(&self.ext).k;
        let psi2 = (sharp + (self.q - 1) - psi1) % (self.q - 1);
        let rep = self.reps.parabolic_full(psi1, psi2);
        let transversal = self.transversal_of_borel();
        let coeffs = transversal.iter().map(|&t| value(t)).collect();
        (rep, coeffs)
    }

    fn transversal_of_borel(&self) -> Vec<u32> {
        let cosets =
            crate::group::LeftCosets::build(&self.gl2.group, &self.gl2.subgroups.b);
        cosets.transversal
    }

    pub fn cuspidal_machinery(&self, nu_k: u32) -> Result<CuspidalMachinery, T1Error> {
        CuspidalMachinery::new(self, nu_k)
    }
}

/// Rank-one projection machinery for a cuspidal constituent rho_nu of the
/// triple (G, C, nu_0): the kernel F_0, the projection E_{nu_0}, the unit
/// vector f_0 spanning its range, and the closed-form spherical function.
pub struct CuspidalMachinery {
    pub q: u32,
    pub nu0: MultChar,
    pub nu: MultChar,
    pub j: KloostermanTable,
    /// F_0 as a matrix: entry (x-1, y-1) is F_0(x, y) for x, y in F_q^*.
    pub f0_matrix: CMat,
    /// Unit vector spanning the range, from the default anchor column.
    pub f0_vec: Vec<C>,
    field: FieldTable,
    ext: ExtensionTable,
    gl2: Arc<Gl2Group>,
    chi: AddChar,
}

impl CuspidalMachinery {
    fn new(t1: &Triple1, nu_k: u32) -> Result<CuspidalMachinery, T1Error> {
        let nu = MultChar::new(t1.ext.ext(), nu_k);
        if !nu.indecomposable(&t1.ext) {
            return Err(T1Error::Inadmissible(format!("nu_{nu_k} is decomposable")));
        }
        if nu.sharp(&t1.ext).k != t1.nu0.sharp(&t1.ext).k {
            return Err(T1Error::Inadmissible("nu and nu_0 restrict differently".into()));
        }
        let bar_k = nu.bar(&t1.ext).k;
        if t1.nu0.k == nu.k || t1.nu0.k == bar_k {
            return Err(T1Error::Inadmissible("nu_0 must avoid {nu, bar nu}".into()));
        }
        let j = KloostermanTable::new(&t1.ext, &t1.chi, &nu)
            .map_err(|e| T1Error::Inadmissible(e.to_string()))?;
        let q = t1.q;
        let n = (q - 1) as usize;
        let mut f0_matrix = CMat::zeros(n, n);
        for x in 1..q {
            for y in 1..q {
                f0_matrix[((x - 1) as usize, (y - 1) as usize)] =
                    f0_entry(t1, &nu, &j, x, y);
            }
        }
        let f0_vec = extract_unit_column(&f0_matrix, None);
        Ok(CuspidalMachinery {
            q,
            nu0: t1.nu0.clone(),
            nu,
            j,
            f0_matrix,
            f0_vec,
            field: t1.field.clone(),
            ext: t1.ext.clone(),
            gl2: t1.gl2.clone(),
            chi: t1.chi.clone(),
        })
    }

    /// f_0 extracted from a chosen anchor column (phase differs per anchor;
    /// everything downstream is phase-independent).
    pub fn f0_with_anchor(&self, anchor: usize) -> Vec<C> {
        extract_unit_column(&self.f0_matrix, Some(anchor))
    }

    /// E_{nu_0} computed definitionally: (1/|C|) sum_c conj(nu_0(c)) rho_nu(c),
    /// as a matrix acting on L(F_q^*) in the delta basis.
    pub fn projection_from_rep(&self, rho: &UnitaryRep) -> CMat {
        let c = &self.gl2.subgroups.c;
        let n = rho.dim;
        let mut acc = CMat::zeros(n, n);
        for &m in &c.members {
            let ac = self.gl2.aff_then_cartan(m);
            let scale = self.nu0.eval(self.ext.from_coords(ac.a, ac.b)).conj();
            let mat = rho.matrix(m);
            for (dst, src) in acc.data.iter_mut().zip(&mat.data) {
                *dst += scale * src;
            }
        }
        acc.scale(C::new(1.0 / c.size() as f64, 0.0))
    }

    /// Max deviation between the definitional projection (acting as
    /// [E f](y) = sum_x f(x) F_0(x, y)) and the closed-form kernel.
    pub fn projection_defect(&self, rho: &UnitaryRep) -> f64 {
        let e = self.projection_from_rep(rho);
        let n = e.rows;
        let mut dev = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                // E maps delta_x to sum_y F_0(x, y) delta_y, so the matrix
                // entry (row y, col x) is F_0(x, y).
                dev = dev.max((e[(y, x)] - self.f0_matrix[(x, y)]).norm());
            }
        }
        dev
    }

    pub fn trace_defect(&self) -> f64 {
        (self.f0_matrix.trace() - C::new(1.0, 0.0)).norm()
    }

    pub fn idempotence_defect(&self) -> f64 {
        self.f0_matrix.mul(&self.f0_matrix).sub(&self.f0_matrix).max_abs()
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.f0_matrix.hermitian_defect()
    }

    pub fn second_singular_value(&self) -> f64 {
        singular_values(&self.f0_matrix)[1]
    }

    /// Closed-form spherical function of the cuspidal constituent:
    /// through g = [[x,y],[0,1]] [[a,eb],[b,a]], a double sum over z in F_q^*
    /// and gamma in F_q of nu(-x^-1 z) chi(-y z^-1) conj(nu_0(gamma+i))
    /// chi(gamma z^-1 (x+1)) j(x z^-2 (gamma^2-eta)), plus the atom
    /// delta_{x,1} (q delta_{y,0} - 1), scaled by conj(nu_0(a+ib))/(q+1).
    pub fn spherical_cuspidal(&self, g: u32) -> C {
        let f = &self.field;
        let ext = &self.ext;
        let eta = f.gen;
        let ac = self.gl2.aff_then_cartan(g);
        let (x, y) = (ac.x, ac.y);
        let xi = f.inv(x);
        let mut s = ZERO;
        for z in 1..self.q {
            let zi = f.inv(z);
            let mut inner = ZERO;
            for gamma in f.elements() {
                inner += self.nu0.eval(ext.from_coords(gamma, 1)).conj()
                    * self.chi.eval(f.mul(f.mul(gamma, zi), f.add(x, 1)))
                    * self.j.eval(f.mul(f.mul(x, f.mul(zi, zi)), f.sub(f.mul(gamma, gamma), eta)));
            }
            s += self.nu.eval(ext.embed(f.neg(f.mul(xi, z)))) * self.chi.eval(f.neg(f.mul(y, zi))) * inner;
        }
        let mut total = -s;
        if x == 1 {
            let atom = if y == 0 { self.q as f64 - 1.0 } else { -1.0 };
            total += C::new(atom, 0.0);
        }
        self.nu0.eval(ext.from_coords(ac.a, ac.b)).conj() * total / (self.q + 1) as f64
    }

    /// Matrix-coefficient spherical function <f_0, rho_nu(g) f_0> for a unit
    /// vector f_0 in the range of the projection.
    pub fn spherical_from_vector(&self, rho: &UnitaryRep, f0: &[C], g: u32) -> C {
        dot(f0, &rho.apply(g, f0))
    }
}

fn f0_entry(t1: &Triple1, nu: &MultChar, j: &KloostermanTable, x: u32, y: u32) -> C {
    let f = &t1.field;
    let ext = &t1.ext;
    let eta = f.gen;
    let xi = f.inv(x);
    let yi = f.inv(y);
    let mut s = ZERO;
    for gamma in f.elements() {
        s += t1.nu0.eval(ext.from_coords(gamma, 1)).conj()
            * t1.chi.eval(f.mul(gamma, f.add(xi, yi)))
            * j.eval(f.mul(f.mul(xi, yi), f.sub(f.mul(gamma, gamma), eta)));
    }
    let tilde = -nu.eval(ext.embed(f.neg(x))) * s;
    let delta = if x == y { 1.0 } else { 0.0 };
    (tilde + C::new(delta, 0.0)) / (t1.q + 1) as f64
}

/// Unit vector u with M = conj(u) u^T from a rank-one positive matrix,
/// anchored at the column with the largest diagonal (or a chosen one).
fn extract_unit_column(m: &CMat, anchor: Option<usize>) -> Vec<C> {
    let n = m.rows;
    let x0 = anchor.unwrap_or_else(|| {
        (0..n).max_by(|&a, &b| m[(a, a)].re.partial_cmp(&m[(b, b)].re).unwrap()).unwrap()
    });
    let scale = m[(x0, x0)].re.max(0.0).sqrt();
    assert!(scale > 1e-8, "anchor column of a rank-one projection must be nonzero");
    // F_0(x0, y) = conj(f_0(x0)) f_0(y) with the anchor phase chosen real.
    (0..n).map(|y| m[(x0, y)] / scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    #[test]
    fn analyze_q3_trivial_sharp() {
        // nu_0 = nu_2 restricts trivially: two q-dimensional parabolics.
        let t1 = Triple1::new(3, 2).unwrap();
        let report = t1.analyze();
        assert_eq!(report.dim_ind, 6);
        assert_eq!(report.constituents.len(), 2);
        assert!(report
            .constituents
            .iter()
            .all(|c| matches!(c.label, T1Label::ParabolicQ { .. }) && c.dim == 3));
    }

    #[test]
    fn analyze_q3_sign_sharp() {
        // nu_0 = nu_1 restricts to the sign character: one principal series
        // pair and one cuspidal.
        let t1 = Triple1::new(3, 1).unwrap();
        let report = t1.analyze();
        assert_eq!(report.dim_ind, 6);
        let labels: Vec<String> =
            report.constituents.iter().map(|c| c.label.to_string()).collect();
        assert_eq!(labels, vec!["parabolic:0,1", "cuspidal:5"]);
    }

    #[test]
    fn rejects_decomposable() {
        assert!(matches!(Triple1::new(3, 0), Err(T1Error::DecomposableNu0(0))));
        assert!(matches!(Triple1::new(3, 4), Err(T1Error::DecomposableNu0(4))));
    }

    #[test]
    fn multiplicities_match_enumeration_q3() {
        for nu0 in [1u32, 2, 3, 5, 6, 7] {
            let t1 = Triple1::new(3, nu0).unwrap();
            let report = t1.analyze();
            let expected: std::collections::HashSet<String> =
                report.constituents.iter().map(|c| c.label.to_string()).collect();
            for rep in t1.reps.all_irreducibles() {
                let m = t1.multiplicity_in_induced(&rep).expect("integral multiplicity");
                let listed = expected.contains(&rep.label);
                assert_eq!(m, u32::from(listed), "label {} for nu0 {}", rep.label, nu0);
            }
        }
    }

    #[test]
    fn engine_dim_equals_constituent_count() {
        for (q, nu0) in [(3u32, 1u32), (3, 2), (5, 1), (5, 2)] {
            let t1 = Triple1::new(q, nu0).unwrap();
            let engine = t1.engine();
            let report = t1.analyze();
            assert_eq!(engine.dim(), report.constituents.len());
            assert_eq!(engine.mackey_dim(), report.constituents.len());
        }
    }

    #[test]
    fn parabolic_spherical_at_identity_and_cartan() {
        let t1 = Triple1::new(3, 1).unwrap();
        let label = T1Label::ParabolicFull { psi1: 0, psi2: 1 };
        assert!(tol::close(
            t1.spherical_parabolic(&label, t1.gl2.group.id),
            C::new(1.0, 0.0),
            1e-12
        ));
        // On a pure Cartan element the bracket collapses: conj(nu_0(a+ib)).
        for a in 0..3u32 {
            for b in 0..3u32 {
                if (a, b) == (0, 0) {
                    continue;
                }
                let g = t1.gl2.cartan_elem(a, b);
                let want = t1.nu0.eval(t1.ext.from_coords(a, b)).conj();
                assert!(tol::close(t1.spherical_parabolic(&label, g), want, 1e-10));
            }
        }
    }

    #[test]
    fn parabolic_closed_form_equals_matrix_coefficient_q3() {
        let t1 = Triple1::new(3, 1).unwrap();
        let engine = t1.engine();
        let label = T1Label::ParabolicFull { psi1: 0, psi2: 1 };
        let sigma = t1.build_constituent(&label);
        let mc = engine.spherical_from_irrep(&sigma).unwrap();
        for g in 0..48u32 {
            assert!(
                tol::close(t1.spherical_parabolic(&label, g), mc[g as usize], tol::SPHERICAL_T1),
                "mismatch at g={g}"
            );
        }
    }

    #[test]
    fn f_nu_vectors_are_cartan_eigenvectors() {
        let t1 = Triple1::new(3, 1).unwrap();
        // nu with nu# = psi1 psi2 = sign: any odd k.
        for nu_k in [1u32, 3, 5, 7] {
            let (rep, coeffs) = t1.f_nu_vector(0, nu_k);
            let nu = MultChar::new(t1.ext.ext(), nu_k);
            // lambda(c) F_nu = nu(c) F_nu for Cartan c; the induced action
            // uses left translation by c^-1 on functions, i.e. apply(c).
            for &cm in &t1.gl2.subgroups.c.members {
                let lhs = rep.apply(cm, &coeffs);
                let ac = t1.gl2.aff_then_cartan(cm);
                let scale = nu.eval(t1.ext.from_coords(ac.a, ac.b));
                let dev: f64 = lhs
                    .iter()
                    .zip(&coeffs)
                    .map(|(l, c)| (l - scale * c).norm())
                    .fold(0.0, f64::max);
                assert!(dev < 1e-9, "eigenvector defect {dev} for nu_{nu_k}");
            }
            // Norm^2 = q + 1 in the induced-model inner product; the stored
            // coefficients are the transversal values, whose plain norm
            // squared equals it.
            let nsq: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
            assert!((nsq - (t1.q + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn cuspidal_machinery_q3() {
        let t1 = Triple1::new(3, 1).unwrap();
        let mach = t1.cuspidal_machinery(5).unwrap();
        assert!(mach.trace_defect() < tol::ORACLE);
        assert!(mach.idempotence_defect() < tol::ORACLE);
        assert!(mach.hermitian_defect() < tol::ORACLE);
        assert!(mach.second_singular_value() < tol::RANK_ONE);
        let rho: UnitaryRep = t1.build_constituent(&T1Label::Cuspidal { nu: 5 });
        assert!(mach.projection_defect(&rho) < tol::ORACLE);
        // Closed form vs matrix coefficient, everywhere, for two different
        // phase extractions of f_0.
        for anchor in 0..2usize {
            let f0 = mach.f0_with_anchor(anchor);
            for g in 0..48u32 {
                let closed = mach.spherical_cuspidal(g);
                let coeff = mach.spherical_from_vector(&rho, &f0, g);
                assert!(
                    tol::close(closed, coeff, tol::SPHERICAL_T1),
                    "g={g} anchor={anchor}: {closed} vs {coeff}"
                );
            }
        }
    }

    #[test]
    fn inadmissible_cuspidal_data_rejected_and_e_vanishes() {
        let t1 = Triple1::new(3, 1).unwrap();
        // nu_0 itself and its conjugate are rejected.
        assert!(t1.cuspidal_machinery(1).is_err());
        assert!(t1.cuspidal_machinery(3).is_err());
        // A nu with mismatched restriction gives a vanishing projection.
        let t1b = Triple1::new(3, 2).unwrap();
        let rho = t1b.reps.cuspidal(1).unwrap();
        let proj = {
            // E_{nu_0} with nu_0 = nu_2 against rho_{nu_1}: sharp characters
            // differ, so the projection is zero.
            let c = &t1b.gl2.subgroups.c;
            let mut acc = CMat::zeros(rho.dim, rho.dim);
            for &m in &c.members {
                let ac = t1b.gl2.aff_then_cartan(m);
                let scale = t1b.nu0.eval(t1b.ext.from_coords(ac.a, ac.b)).conj();
                acc = acc.add(&rho.matrix(m).scale(scale));
            }
            acc.scale(C::new(1.0 / c.size() as f64, 0.0))
        };
        assert!(proj.max_abs() < 1e-10);
        // nu_0 equal to nu (or its conjugate) also annihilates: the trace
        // computation collapses to 0 although the sharp characters match.
        for nu0 in [1u32, 3] {
            let t1c = Triple1::new(3, nu0).unwrap();
            let rho = t1c.reps.cuspidal(1).unwrap();
            let c = &t1c.gl2.subgroups.c;
            let mut acc = CMat::zeros(rho.dim, rho.dim);
            for &m in &c.members {
                let ac = t1c.gl2.aff_then_cartan(m);
                let scale = t1c.nu0.eval(t1c.ext.from_coords(ac.a, ac.b)).conj();
                acc = acc.add(&rho.matrix(m).scale(scale));
            }
            acc = acc.scale(C::new(1.0 / c.size() as f64, 0.0));
            assert!(acc.max_abs() < 1e-10, "E must vanish for nu_0 in the conjugate pair");
        }
    }

    #[test]
    fn orthogonal_projections_for_distinct_characters_q5() {
        // Two admissible nu_0, mu_0 for the same nu at q = 5: F_0 G_0 = 0.
        let q = 5;
        // Pick nu indecomposable; then nu_0, mu_0 with matching sharp.
        let probe = Triple1::new(q, 1).unwrap();
        let sharp = probe.nu0.sharp(&probe.ext).k;
        let mut admissible = Vec::new();
        for k in 0..24u32 {
            let nu = MultChar::new(probe.ext.ext(), k);
            if nu.indecomposable(&probe.ext) && nu.sharp(&probe.ext).k == sharp {
                admissible.push(k);
            }
        }
        // nu = the last admissible; nu_0, mu_0 two others avoiding nu's pair.
        let nu_k = *admissible.last().unwrap();
        let bar = (nu_k as u64 * q as u64 % 24) as u32;
        let choices: Vec<u32> =
            admissible.into_iter().filter(|&k| k != nu_k && k != bar && k != 1).collect();
        let mu0_k = choices[0];
        let m1 = Triple1::new(q, 1).unwrap().cuspidal_machinery(nu_k).unwrap();
        let m2 = Triple1::new(q, mu0_k).unwrap().cuspidal_machinery(nu_k).unwrap();
        let prod = m1.f0_matrix.mul(&m2.f0_matrix);
        assert!(prod.max_abs() < tol::ORACLE, "F_0 G_0 = {}", prod.max_abs());
    }
}
