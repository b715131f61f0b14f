//! Generalized Kloosterman sums over a quadratic extension and the summation
//! identities they satisfy.
//!
//! For a nontrivial additive character chi of F_q and an indecomposable
//! multiplicative character nu of F_{q^2}^*,
//! `j(x) = (1/q) sum_{w : w conj(w) = x} chi(w + conj(w)) nu(w)`
//! over the norm fiber of each x in F_q^*. The same construction at the next
//! tower level (chi lifted to F_{q^2}, mu on F_{q^4}^*) gives the sum J used
//! by the cuspidal representations of GL(2, F_{q^2}).

use crate::ff::{AddChar, ExtensionTable, MultChar};
use crate::tol;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KloostermanError {
    DecomposableNu,
    TrivialChi,
}

impl std::fmt::Display for KloostermanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KloostermanError::DecomposableNu => write!(f, "nu must be indecomposable"),
            KloostermanError::TrivialChi => write!(f, "chi must be nontrivial"),
        }
    }
}

impl std::error::Error for KloostermanError {}

#[derive(Debug, Clone)]
pub struct KloostermanTable {
    pub ext: ExtensionTable,
    pub chi: AddChar,
    pub nu: MultChar,
    /// values[x] = j(x) for x in the base field, index 0 unused.
    values: Vec<Complex64>,
}

/// Maximal absolute deviations of the four identities.
#[derive(Debug, Clone, serde::Serialize)]
pub struct KloostermanReport {
    pub dev_pair_orthogonality: f64,
    pub dev_pair_twisted: f64,
    pub dev_fiber_expansion: f64,
    pub dev_self_conjugacy: f64,
    pub max_dev: f64,
    pub pass: bool,
}

impl KloostermanTable {
    pub fn new(
        ext: &ExtensionTable,
        chi: &AddChar,
        nu: &MultChar,
    ) -> Result<KloostermanTable, KloostermanError> {
        assert_eq!(chi.q, ext.base().q, "chi lives on the base field");
        assert_eq!(nu.q, ext.ext().q, "nu lives on the extension");
        if chi.is_trivial() {
            return Err(KloostermanError::TrivialChi);
        }
        if !nu.indecomposable(ext) {
            return Err(KloostermanError::DecomposableNu);
        }
        let qb = ext.base().q;
        let mut values = vec![Complex64::new(0.0, 0.0); qb as usize];
        for w in ext.ext().units() {
            let x = ext.norm(w);
            values[x as usize] += chi.eval(ext.rel_trace(w)) * nu.eval(w);
        }
        for v in values.iter_mut() {
            *v /= qb as f64;
        }
        Ok(KloostermanTable { ext: ext.clone(), chi: chi.clone(), nu: nu.clone(), values })
    }

    #[inline]
    pub fn eval(&self, x: u32) -> Complex64 {
        assert!(x != 0 && x < self.ext.base().q);
        self.values[x as usize]
    }

    /// Checks the three summation identities and the self-conjugacy relation,
    /// returning the maximal deviation of each.
    pub fn verify_identities(&self) -> KloostermanReport {
        let ext = &self.ext;
        let base = ext.base();
        let extf = ext.ext();
        let chi = &self.chi;
        let nu = &self.nu;
        let one = Complex64::new(1.0, 0.0);

        // sum_z j(xz) j(yz) nu(z^-1)            = delta_{x,y} nu(-x)
        // sum_z j(xz) j(yz) nu(z^-1) chi(z)     = -chi(-x-y) nu(-1) j(xy)
        let mut dev1 = 0.0f64;
        let mut dev2 = 0.0f64;
        for x in base.units() {
            for y in base.units() {
                let mut s1 = Complex64::new(0.0, 0.0);
                let mut s2 = Complex64::new(0.0, 0.0);
                for z in base.units() {
                    let t = self.eval(base.mul(x, z))
                        * self.eval(base.mul(y, z))
                        * nu.eval(ext.embed(base.inv(z)));
                    s1 += t;
                    s2 += t * chi.eval(z);
                }
                let want1 = if x == y { nu.eval(ext.embed(base.neg(x))) } else { 0.0 * one };
                let want2 = -chi.eval(base.neg(base.add(x, y)))
                    * nu.eval(ext.embed(base.neg(1)))
                    * self.eval(base.mul(x, y));
                dev1 = dev1.max((s1 - want1).norm());
                dev2 = dev2.max((s2 - want2).norm());
            }
        }

        // sum_alpha nu(-alpha) chi(alpha^-1 (z + conj z)) j(alpha^-2 z conj z)
        //   = nu(z) + nu(conj z)   for z outside the embedded base field.
        // For embedded z the matrix [[0, -z zbar],[1, z + zbar]] degenerates
        // to a Jordan-block class and the sum collapses to nu(z) instead.
        let mut dev3 = 0.0f64;
        for z in extf.units() {
            let tr = ext.rel_trace(z);
            let nm = ext.norm(z);
            let mut s = Complex64::new(0.0, 0.0);
            for alpha in base.units() {
                let ai = base.inv(alpha);
                s += nu.eval(ext.embed(base.neg(alpha)))
                    * chi.eval(base.mul(ai, tr))
                    * self.eval(base.mul(base.mul(ai, ai), nm));
            }
            let want = if ext.in_base(z) {
                nu.eval(z)
            } else {
                nu.eval(z) + nu.eval(ext.conj(z))
            };
            dev3 = dev3.max((s - want).norm());
        }

        // conj(j(x)) = j(x) conj(nu(-x))
        let mut dev4 = 0.0f64;
        for x in base.units() {
            let lhs = self.eval(x).conj();
            let rhs = self.eval(x) * nu.eval(ext.embed(base.neg(x))).conj();
            dev4 = dev4.max((lhs - rhs).norm());
        }

        let max_dev = dev1.max(dev2).max(dev3).max(dev4);
        KloostermanReport {
            dev_pair_orthogonality: dev1,
            dev_pair_twisted: dev2,
            dev_fiber_expansion: dev3,
            dev_self_conjugacy: dev4,
            max_dev,
            pass: max_dev < tol::KLOOSTERMAN,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{AddChar, ExtensionTable, MultChar};

    #[test]
    fn fiber_size_is_q_plus_one() {
        let ext = ExtensionTable::build(3, 1).unwrap();
        let mut fibers = [0u32; 3];
        for w in ext.ext().units() {
            fibers[ext.norm(w) as usize] += 1;
        }
        assert_eq!(&fibers[1..], &[4, 4]);
    }

    #[test]
    fn rejects_bad_characters() {
        let ext = ExtensionTable::build(3, 1).unwrap();
        let chi = AddChar::new(ext.base(), 1);
        let chi0 = AddChar::new(ext.base(), 0);
        let nu_dec = MultChar::new(ext.ext(), 4); // nu_4 = bar(nu_4) at q = 3
        let nu = MultChar::new(ext.ext(), 1);
        assert!(matches!(
            KloostermanTable::new(&ext, &chi, &nu_dec),
            Err(KloostermanError::DecomposableNu)
        ));
        assert!(matches!(
            KloostermanTable::new(&ext, &chi0, &nu),
            Err(KloostermanError::TrivialChi)
        ));
    }

    #[test]
    fn q3_values_match_direct_enumeration() {
        // Independent definitional oracle: walk the 8 elements of F_9^* once.
        let ext = ExtensionTable::build(3, 1).unwrap();
        let chi = AddChar::new(ext.base(), 1);
        let nu = MultChar::new(ext.ext(), 1);
        let tab = KloostermanTable::new(&ext, &chi, &nu).unwrap();
        for x in 1u32..3 {
            let mut s = Complex64::new(0.0, 0.0);
            for w in 1..9u32 {
                if ext.norm(w) == x {
                    s += chi.eval(ext.rel_trace(w)) * nu.eval(w);
                }
            }
            s /= 3.0;
            assert!((tab.eval(x) - s).norm() < 1e-14);
        }
    }

    #[test]
    fn identities_hold_at_q3() {
        let ext = ExtensionTable::build(3, 1).unwrap();
        let chi = AddChar::new(ext.base(), 1);
        for k in 0..8 {
            let nu = MultChar::new(ext.ext(), k);
            if !nu.indecomposable(&ext) {
                continue;
            }
            let tab = KloostermanTable::new(&ext, &chi, &nu).unwrap();
            let rep = tab.verify_identities();
            assert!(rep.pass, "identities failed for k={k}: {rep:?}");
        }
    }

    #[test]
    fn second_level_table_builds() {
        // chi lifted to F_9, mu on F_81^* indecomposable over F_9.
        let ext1 = ExtensionTable::build(3, 1).unwrap();
        let ext2 = ExtensionTable::build(3, 2).unwrap();
        let chi = AddChar::new(ext1.base(), 1);
        let chi_lift = AddChar::lift(&chi, &ext1);
        let mu = MultChar::new(ext2.ext(), 1);
        let tab = KloostermanTable::new(&ext2, &chi_lift, &mu).unwrap();
        let rep = tab.verify_identities();
        assert!(rep.pass, "level-q^2 identities failed: {rep:?}");
    }
}
