//! GL(2, F_q): enumeration, the standard subgroups B, U, D, Z, C, the Bruhat
//! decomposition, the Cartan/affine factorizations every closed-form
//! spherical function runs through, and the big-cell decomposition of
//! GL(2, F_{q^2}) over the embedded GL(2, F_q).

use crate::ff::{ExtensionTable, FieldTable};
use crate::group::{Group, GroupRef, SubgroupMask};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gl2Error {
    Oversize(u32),
}

impl std::fmt::Display for Gl2Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Gl2Error::Oversize(q) => write!(f, "full enumeration limited to q <= 81, got {q}"),
        }
    }
}

impl std::error::Error for Gl2Error {}

/// Standard subgroups as index masks.
pub struct StandardSubgroups {
    pub b: SubgroupMask,
    pub u: SubgroupMask,
    pub d: SubgroupMask,
    pub z: SubgroupMask,
    pub c: SubgroupMask,
}

pub struct Gl2Group {
    pub group: GroupRef,
    pub field: FieldTable,
    coords: Vec<[u32; 4]>,
    encode: Vec<u32>,
    pub subgroups: StandardSubgroups,
    /// The Weyl element [[0,1],[1,0]].
    pub w: u32,
}

/// Outcome of the Bruhat factorization: either g lies in the Borel subgroup,
/// or g = u * w * b with unique u in U, b in B.
pub enum BruhatFactor {
    Borel,
    BigCell { u: u32, b: u32 },
}

/// g = [[x,y],[0,1]] * [[a, eta b],[b, a]] (affine part first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffCartan {
    pub x: u32,
    pub y: u32,
    pub a: u32,
    pub b: u32,
}

/// g = [[a, eta b],[b, a]] * [[x,y],[0,1]] (Cartan part first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CartanAff {
    pub a: u32,
    pub b: u32,
    pub x: u32,
    pub y: u32,
}

/// Big-cell decomposition of GL(2, F_{q^2}) over the embedded GL(2, F_q):
/// either g is in G1 * B2, or g = [[alpha,beta],[0,1]] * W * [[c,d],[0,z]]
/// with alpha, beta in the base field and W = [[i,1],[1,0]].
pub enum G2Factor {
    G1B2,
    G1WB2 { alpha: u32, beta: u32, c: u32, d: u32, z: u32 },
}

impl Gl2Group {
    pub fn new(field: &FieldTable) -> Result<Gl2Group, Gl2Error> {
        if field.q > 81 {
            return Err(Gl2Error::Oversize(field.q));
        }
        let q = field.q as u64;
        let mut coords = Vec::new();
        let mut encode = vec![u32::MAX; (q * q * q * q) as usize];
        for code in 0..q * q * q * q {
            let d = (code % q) as u32;
            let c = (code / q % q) as u32;
            let b = (code / (q * q) % q) as u32;
            let a = (code / (q * q * q)) as u32;
            if field.sub(field.mul(a, d), field.mul(b, c)) != 0 {
                encode[code as usize] = coords.len() as u32;
                coords.push([a, b, c, d]);
            }
        }
        let enc = |a: u32, b: u32, c: u32, d: u32| {
            let code = ((a as u64 * q + b as u64) * q + c as u64) * q + d as u64;
            encode[code as usize]
        };
        let id = enc(1, 0, 0, 1);
        let mut inv = vec![0u32; coords.len()];
        for (i, &[a, b, c, d]) in coords.iter().enumerate() {
            let det = field.sub(field.mul(a, d), field.mul(b, c));
            let di = field.inv(det);
            inv[i] = enc(
                field.mul(di, d),
                field.mul(di, field.neg(b)),
                field.mul(di, field.neg(c)),
                field.mul(di, a),
            );
        }
        let group = Arc::new(Group::from_gl2(
            &format!("GL(2,F_{})", field.q),
            field.clone(),
            coords.clone(),
            encode.clone(),
            id,
            inv,
        ));

        let eta = field.gen;
        let mut b_mem = Vec::new();
        let mut u_mem = Vec::new();
        let mut d_mem = Vec::new();
        let mut z_mem = Vec::new();
        let mut c_mem = Vec::new();
        for (i, &[a, b, c, d]) in coords.iter().enumerate() {
            let i = i as u32;
            if c == 0 {
                b_mem.push(i);
                if a == 1 && d == 1 {
                    u_mem.push(i);
                }
                if b == 0 {
                    d_mem.push(i);
                    if a == d {
                        z_mem.push(i);
                    }
                }
            }
            if a == d && b == field.mul(eta, c) {
                c_mem.push(i);
            }
        }
        let subgroups = StandardSubgroups {
            b: SubgroupMask::new(&group, b_mem),
            u: SubgroupMask::new(&group, u_mem),
            d: SubgroupMask::new(&group, d_mem),
            z: SubgroupMask::new(&group, z_mem),
            c: SubgroupMask::new(&group, c_mem),
        };
        let w = enc(0, 1, 1, 0);
        Ok(Gl2Group { group, field: field.clone(), coords, encode, subgroups, w })
    }

    #[inline]
    pub fn coords(&self, g: u32) -> [u32; 4] {
        self.coords[g as usize]
    }

    pub fn index_of(&self, a: u32, b: u32, c: u32, d: u32) -> Option<u32> {
        let q = self.field.q as u64;
        let code = ((a as u64 * q + b as u64) * q + c as u64) * q + d as u64;
        match self.encode[code as usize] {
            u32::MAX => None,
            i => Some(i),
        }
    }

    pub fn det(&self, g: u32) -> u32 {
        let f = &self.field;
        let [a, b, c, d] = self.coords(g);
        f.sub(f.mul(a, d), f.mul(b, c))
    }

    /// Index of the Cartan element [[a, eta b],[b, a]]; (a, b) != (0, 0).
    pub fn cartan_elem(&self, a: u32, b: u32) -> u32 {
        let f = &self.field;
        self.index_of(a, f.mul(f.gen, b), b, a).expect("Cartan element is invertible")
    }

    /// Index of the affine element [[x, y],[0, 1]]; x != 0.
    pub fn aff_elem(&self, x: u32, y: u32) -> u32 {
        self.index_of(x, y, 0, 1).expect("affine element is invertible")
    }

    /// Bruhat factorization g = b or g = u * w * b.
    pub fn bruhat_factor(&self, g: u32) -> BruhatFactor {
        let f = &self.field;
        let [a, b, c, d] = self.coords(g);
        if c == 0 {
            return BruhatFactor::Borel;
        }
        let ci = f.inv(c);
        let u = self.index_of(1, f.mul(a, ci), 0, 1).unwrap();
        let bb = self
            .index_of(c, d, 0, f.sub(b, f.mul(f.mul(a, d), ci)))
            .expect("Bruhat Borel part is invertible");
        debug_assert_eq!(self.group.mul3(u, self.w, bb), g);
        BruhatFactor::BigCell { u, b: bb }
    }

    /// Unique factorization g = [[x,y],[0,1]] * [[a, eta b],[b, a]].
    pub fn aff_then_cartan(&self, g: u32) -> AffCartan {
        let f = &self.field;
        let [alpha, beta, gamma, delta] = self.coords(g);
        let a = delta;
        let b = gamma;
        let den = f.sub(f.mul(delta, delta), f.mul(f.gen, f.mul(gamma, gamma)));
        let di = f.inv(den);
        let x = f.mul(di, f.sub(f.mul(alpha, delta), f.mul(beta, gamma)));
        let y = f.mul(di, f.sub(f.mul(beta, delta), f.mul(f.mul(alpha, gamma), f.gen)));
        debug_assert_eq!(
            self.group.mul(self.aff_elem(x, y), self.cartan_elem(a, b)),
            g,
            "affine-Cartan factorization must recompose"
        );
        AffCartan { x, y, a, b }
    }

    /// Unique factorization g = [[a, eta b],[b, a]] * [[x,y],[0,1]].
    pub fn cartan_then_aff(&self, g: u32) -> CartanAff {
        let f = &self.field;
        let [a, b, c, d] = self.coords(g);
        let det = self.det(g);
        let den = f.sub(f.mul(a, a), f.mul(f.gen, f.mul(c, c)));
        let x = f.mul(den, f.inv(det));
        let y = f.mul(f.sub(f.mul(a, b), f.mul(f.gen, f.mul(c, d))), f.inv(det));
        let xi = f.inv(x);
        let ca = f.mul(a, xi);
        let cb = f.mul(c, xi);
        debug_assert_eq!(
            self.group.mul(self.cartan_elem(ca, cb), self.aff_elem(x, y)),
            g,
            "Cartan-affine factorization must recompose"
        );
        CartanAff { a: ca, b: cb, x, y }
    }

    /// The exchange identity
    /// [[x,y],[0,1]] [[alpha, eta beta],[beta, alpha]]
    ///   = [[u, eta v],[v, u]] [[a,b],[0,1]],
    /// with x != 0 and (alpha, beta) != (0, 0).
    pub fn exchange(&self, x: u32, y: u32, alpha: u32, beta: u32) -> (u32, u32, u32, u32) {
        let f = &self.field;
        assert!(x != 0 && (alpha, beta) != (0, 0));
        let eta = f.gen;
        let t = f.add(f.mul(x, alpha), f.mul(y, beta)); // x alpha + y beta
        let nsq = f.sub(f.mul(alpha, alpha), f.mul(eta, f.mul(beta, beta))); // alpha^2 - eta beta^2
        let den = f.sub(f.mul(t, t), f.mul(eta, f.mul(beta, beta))); // t^2 - eta beta^2
        let deni = f.inv(den);
        let u = f.mul(f.mul(f.mul(x, t), nsq), deni);
        let v = f.mul(f.mul(f.mul(x, beta), nsq), deni);
        let xi = f.inv(f.mul(x, nsq));
        let a = f.mul(den, xi);
        let b = f.mul(
            f.sub(
                f.mul(t, f.add(f.mul(y, alpha), f.mul(eta, f.mul(beta, x)))),
                f.mul(eta, f.mul(alpha, beta)),
            ),
            xi,
        );
        debug_assert_eq!(
            self.group.mul(self.aff_elem(x, y), self.cartan_elem(alpha, beta)),
            self.group.mul(self.cartan_elem(u, v), self.aff_elem(a, b)),
            "exchange identity must recompose"
        );
        (u, v, a, b)
    }

    /// Mask of the embedded GL(2, F_q) inside GL(2, F_{q^2}): entries whose
    /// four coordinates all lie in the embedded base field.
    pub fn embedded_subfield_mask(&self, ext: &ExtensionTable) -> SubgroupMask {
        assert_eq!(ext.ext().q, self.field.q);
        let members = (0..self.group.n as u32)
            .filter(|&g| self.coords(g).iter().all(|&x| ext.in_base(x)))
            .collect();
        SubgroupMask::new(&self.group, members)
    }

    /// The element W = [[i, 1],[1, 0]] of GL(2, F_{q^2}).
    pub fn w_cap(&self, ext: &ExtensionTable) -> u32 {
        self.index_of(ext.i_elem(), 1, 1, 0).expect("W is invertible")
    }

    /// Decomposes g in GL(2, F_{q^2}) along G1 B2 | G1 W B2.
    pub fn g2_decomposition(&self, ext: &ExtensionTable, g: u32) -> G2Factor {
        let f = &self.field;
        let [a, _b, c, d] = self.coords(g);
        if c == 0 || ext.in_base(f.mul(a, f.inv(c))) {
            return G2Factor::G1B2;
        }
        let ratio = f.mul(a, f.inv(c));
        let (beta, alpha) = ext.coords(ratio); // ratio = beta + alpha * i
        debug_assert!(alpha != 0);
        let det = self.det(g);
        let z = f.mul(f.neg(det), f.inv(f.mul(ext.embed(alpha), c)));
        debug_assert_eq!(
            {
                let aff = self.index_of(ext.embed(alpha), ext.embed(beta), 0, 1).unwrap();
                let b2 = self.index_of(c, d, 0, z).unwrap();
                self.group.mul3(aff, self.w_cap(ext), b2)
            },
            g,
            "big-cell factorization must recompose"
        );
        G2Factor::G1WB2 { alpha: ext.embed(alpha), beta: ext.embed(beta), c, d, z }
    }

    /// Conjugation of a base-field Cartan element through W:
    /// W^-1 [[x1, eta x2],[x2, x1]] W = [[x1 + i x2, x2],[0, x1 - i x2]].
    pub fn conj_w_of_cartan(&self, ext: &ExtensionTable, x1: u32, x2: u32) -> u32 {
        let f = &self.field;
        let i = ext.i_elem();
        let up = f.add(ext.embed(x1), f.mul(i, ext.embed(x2)));
        let dn = f.sub(ext.embed(x1), f.mul(i, ext.embed(x2)));
        self.index_of(up, ext.embed(x2), 0, dn).expect("conjugated Cartan element is invertible")
    }
}
