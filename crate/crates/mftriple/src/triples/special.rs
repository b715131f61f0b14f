//! Gelfand-Graev triples (G, U, chi) and the two boundary examples: the
//! pair (G, U) whose trivial-character induction carries multiplicities
//! while every nontrivial twist is multiplicity-free, and the subfield pair
//! (GL(2,F_{q^2}), GL(2,F_q)) which is a Gelfand pair although parabolic
//! inductions across it are not multiplicity-free.

use crate::ff::{AddChar, ExtensionTable, FieldTable, MultChar};
use crate::gl2::Gl2Group;
use crate::hecke::{HeckeEngine, MfReport, SymmetryReport, Triple};
use crate::linalg::C;
use crate::reps::{multiplicity, Gl2Reps, SubRep};
use std::sync::Arc;

/// The swap-corners antiautomorphism [[a,b],[c,d]] -> [[d,b],[c,a]] as an
/// element-index map.
pub fn swap_corners_tau(gl2: &Gl2Group) -> Vec<u32> {
    (0..gl2.group.n as u32)
        .map(|g| {
            let [a, b, c, d] = gl2.coords(g);
            gl2.index_of(d, b, c, a).expect("swap preserves the determinant")
        })
        .collect()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GelfandGraevReport {
    pub q: u32,
    pub chi_a: u32,
    pub mf: MfReport,
    pub symmetry: SymmetryReport,
    pub dim: usize,
    pub expected_dim: usize,
    /// Good cosets are exactly those meeting Z or wD.
    pub s0_matches_z_wd: bool,
    /// Every Hecke element vanishes on the remaining Borel cosets.
    pub vanishing_defect: f64,
}

/// Builds the triple (GL(2,F_q), U, chi_a) and verifies commutativity, the
/// symmetry criterion and the support structure of the scalar algebra.
pub fn gelfand_graev_verify(q: u32, chi_a: u32) -> GelfandGraevReport {
    assert!(chi_a != 0, "the Gelfand-Graev character must be nontrivial");
    let (p, d) = crate::ff::split_prime_power(q).expect("odd prime power");
    let field = FieldTable::build(p, d).unwrap();
    let gl2 = Arc::new(Gl2Group::new(&field).unwrap());
    let chi = AddChar::new(&field, chi_a);
    let u = gl2.subgroups.u.clone();
    let gl2c = gl2.clone();
    let theta = SubRep::from_char_fn(u.clone(), move |g| {
        let [_, b, _, _] = gl2c.coords(g);
        chi.eval(b)
    });
    let engine = HeckeEngine::new(Triple::new(gl2.group.clone(), u, theta)).unwrap();
    let mf = engine.commutator_report();
    let symmetry = engine.symmetry_criteria(&swap_corners_tau(&gl2));
    let expected_dim = (q as usize - 1) + (q as usize - 1) * (q as usize - 1);

    // S_0 = Z | wD: every good coset meets that set, and the count matches.
    let in_z_wd = |g: u32| {
        gl2.subgroups.z.contains(g)
            || gl2.subgroups.d.contains(gl2.group.mul(gl2.group.inv(gl2.w), g))
    };
    let mut s0_matches = engine.dim() == expected_dim;
    for &ci in &engine.s0 {
        if !engine.cosets.members[ci].iter().any(|&m| in_z_wd(m)) {
            s0_matches = false;
        }
    }
    // Vanishing on the non-central diagonal cosets.
    let mut vanishing = 0.0f64;
    for b in 0..engine.dim() {
        let table = engine.scalar_table(&engine.basis_elem(b));
        for &d in &gl2.subgroups.d.members {
            if gl2.subgroups.z.contains(d) {
                continue;
            }
            for &uu in &gl2.subgroups.u.members {
                vanishing = vanishing.max(table[gl2.group.mul(d, uu) as usize].norm());
            }
        }
    }
    GelfandGraevReport {
        q,
        chi_a,
        mf,
        symmetry,
        dim: engine.dim(),
        expected_dim,
        s0_matches_z_wd: s0_matches,
        vanishing_defect: vanishing,
    }
}

/// Builds the Gelfand-Graev engine (shared by the acceptance suite).
pub fn gelfand_graev_engine(q: u32, chi_a: u32) -> HeckeEngine {
    let (p, d) = crate::ff::split_prime_power(q).expect("odd prime power");
    let field = FieldTable::build(p, d).unwrap();
    let gl2 = Arc::new(Gl2Group::new(&field).unwrap());
    let chi = AddChar::new(&field, chi_a);
    let u = gl2.subgroups.u.clone();
    let gl2c = gl2.clone();
    let theta = SubRep::from_char_fn(u.clone(), move |g| {
        let [_, b, _, _] = gl2c.coords(g);
        chi.eval(b)
    });
    HeckeEngine::new(Triple::new(gl2.group.clone(), u, theta)).unwrap()
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RicciSamantaReport {
    pub q: u32,
    /// Multiplicities in Ind_U^G(trivial) per family:
    /// (one-dimensional, q-dimensional parabolic, principal series, cuspidal).
    pub pattern: (u32, u32, u32, u32),
    pub pattern_exact: bool,
    pub trivial_engine_mf: bool,
}

/// The triple (G, U, chi_0): not multiplicity-free, with the multiplicity
/// pattern (1, 1, 2, 0) across the four families.
pub fn ricci_samanta_report(q: u32) -> RicciSamantaReport {
    let (p, d) = crate::ff::split_prime_power(q).expect("odd prime power");
    let field = FieldTable::build(p, d).unwrap();
    let ext = ExtensionTable::from_ext(FieldTable::build(p, 2 * d).unwrap());
    let gl2 = Arc::new(Gl2Group::new(&field).unwrap());
    let reps = Gl2Reps::standard(gl2.clone(), ext);
    let u = &gl2.subgroups.u;
    let chi_triv: Vec<C> = u.members.iter().map(|_| C::new(1.0, 0.0)).collect();
    let mut pattern = (u32::MAX, u32::MAX, u32::MAX, u32::MAX);
    let mut exact = true;
    for rep in reps.all_irreducibles() {
        let chi_res: Vec<C> = u.members.iter().map(|&m| rep.trace(m)).collect();
        let m = multiplicity(&chi_triv, &chi_res).expect("integral multiplicity");
        let slot = if rep.label.starts_with("onedim") {
            &mut pattern.0
        } else if rep.label.starts_with("parabolicq") {
            &mut pattern.1
        } else if rep.label.starts_with("parabolic:") {
            &mut pattern.2
        } else {
            &mut pattern.3
        };
        if *slot == u32::MAX {
            *slot = m;
        } else if *slot != m {
            exact = false;
        }
    }
    // Engine verdict for the trivial character.
    let theta = SubRep::from_char_fn(u.clone(), |_| C::new(1.0, 0.0));
    let engine = HeckeEngine::new(Triple::new(gl2.group.clone(), u.clone(), theta)).unwrap();
    let mf = engine.commutator_report();
    RicciSamantaReport { q, pattern, pattern_exact: exact, trivial_engine_mf: mf.mf }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GowReport {
    pub q: u32,
    /// (G_2, G_1, trivial) is a Gelfand pair.
    pub pair_mf: MfReport,
    pub pair_dim: usize,
    /// Max multiplicity of a constituent of Ind_{G1}^{G2} of a q-dimensional
    /// parabolic (must be exactly 2 somewhere).
    pub parabolic_q_max_mult: u32,
    /// The expected doubled principal-series constituents all have mult 2.
    pub doubled_constituents_ok: bool,
}

/// The subfield pair at q = 3: commutativity of the bi-GL(2,F_3)-invariant
/// algebra on GL(2,F_9), and the multiplicity-2 constituents appearing in
/// the induction of q-dimensional parabolic representations.
pub fn gow_report(q: u32) -> GowReport {
    assert_eq!(q, 3, "desk scale");
    let f_q2 = FieldTable::build(q, 2).unwrap();
    let ext1 = ExtensionTable::from_ext(f_q2.clone());
    let ext2 = ExtensionTable::from_ext(FieldTable::build(q, 4).unwrap());
    let g2 = Arc::new(Gl2Group::new(&f_q2).unwrap());
    let g1_mask = g2.embedded_subfield_mask(&ext1);
    let theta = SubRep::from_char_fn(g1_mask.clone(), |_| C::new(1.0, 0.0));
    let engine =
        HeckeEngine::new(Triple::new(g2.group.clone(), g1_mask.clone(), theta)).unwrap();
    let pair_mf = engine.commutator_report();

    // Characters of G_2 irreducibles restricted to G_1, against the
    // characters of the q-dimensional parabolics of G_1.
    let f_q = FieldTable::build(q, 1).unwrap();
    let ext_small = ExtensionTable::build(q, 1).unwrap();
    let g1 = Arc::new(Gl2Group::new(&f_q).unwrap());
    let reps1 = Gl2Reps::standard(g1.clone(), ext_small);
    let chi_small = AddChar::new(&f_q, 1);
    let chi_lift = AddChar::lift(&chi_small, &ext1);
    let reps2 = Gl2Reps::with_chi(g2.clone(), ext2, chi_lift);

    // Map standalone G_1 indices to embedded indices inside G_2.
    let embed_elem = |g: u32| -> u32 {
        let [a, b, c, d] = g1.coords(g);
        g2.index_of(a, b, c, d).expect("embedded element")
    };
    let g1_elems: Vec<u32> = (0..g1.group.n as u32).collect();

    let mut max_mult = 0u32;
    let mut doubled_ok = true;
    let n1 = q - 1;
    let nn = q * q - 1;
    for psi in 0..n1 {
        let chi1: Vec<C> =
            g1_elems.iter().map(|&g| reps1.parabolic_q(psi).trace(g)).collect();
        // Principal series chi_{xi1, xi2} with xi1# = xi2# = psi have
        // multiplicity exactly 2 in the induction.
        for k1 in 0..nn {
            for k2 in (k1 + 1)..nn {
                let xi1 = MultChar::new(ext1.ext(), k1);
                let xi2 = MultChar::new(ext1.ext(), k2);
                if xi1.sharp(&ext1).k != psi || xi2.sharp(&ext1).k != psi {
                    continue;
                }
                let sigma = reps2.parabolic_full(k1, k2);
                let chi2: Vec<C> =
                    g1_elems.iter().map(|&g| sigma.trace(embed_elem(g))).collect();
                let m = multiplicity(&chi1, &chi2).expect("integral multiplicity");
                max_mult = max_mult.max(m);
                if m != 2 {
                    doubled_ok = false;
                }
            }
        }
    }
    GowReport {
        q,
        pair_mf,
        pair_dim: engine.dim(),
        parabolic_q_max_mult: max_mult,
        doubled_constituents_ok: doubled_ok,
    }
}
