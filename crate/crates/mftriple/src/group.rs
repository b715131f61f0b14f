//! Indexed finite groups: either an explicit multiplication table or a
//! matrix group whose products are computed on demand. Subgroups are masks
//! over element indices; double cosets carry a stored factorization
//! `g = k1 * s * k2` for every element.

use crate::ff::FieldTable;
use std::sync::{Arc, OnceLock};

pub enum GroupKind {
    /// Full multiplication table (row-major), materialized for small groups.
    Table { mul: Vec<u32> },
    /// 2x2 invertible matrices over a finite field, multiplied on demand.
    Gl2 { field: FieldTable, coords: Vec<[u32; 4]>, encode: Vec<u32> },
}

pub struct Group {
    pub n: usize,
    pub id: u32,
    pub name: String,
    kind: GroupKind,
    inv: Vec<u32>,
    classes: OnceLock<ConjClasses>,
}

#[derive(Debug, Clone)]
pub struct ConjClasses {
    pub class_of: Vec<u32>,
    pub reps: Vec<u32>,
    pub sizes: Vec<u32>,
}

impl Group {
    /// Builds a group from an explicit multiplication table.
    pub fn from_mul_table(name: &str, mul: Vec<Vec<u32>>) -> Group {
        let n = mul.len();
        let mut flat = Vec::with_capacity(n * n);
        for row in &mul {
            assert_eq!(row.len(), n, "multiplication table must be square");
            flat.extend_from_slice(row);
        }
        let mut id = u32::MAX;
        'outer: for e in 0..n {
            for x in 0..n {
                if flat[e * n + x] != x as u32 || flat[x * n + e] != x as u32 {
                    continue 'outer;
                }
            }
            id = e as u32;
            break;
        }
        assert!(id != u32::MAX, "table has no identity element");
        let mut inv = vec![u32::MAX; n];
        for x in 0..n {
            for y in 0..n {
                if flat[x * n + y] == id {
                    inv[x] = y as u32;
                    break;
                }
            }
            assert!(inv[x] != u32::MAX, "element {x} has no inverse");
        }
        Group {
            n,
            id,
            name: name.to_string(),
            kind: GroupKind::Table { mul: flat },
            inv,
            classes: OnceLock::new(),
        }
    }

    /// Wraps a GL(2)-style enumeration. The full multiplication table is
    /// materialized only when the order stays at or below 1000; above that,
    /// products are computed on demand from the coordinates.
    pub fn from_gl2(
        name: &str,
        field: FieldTable,
        coords: Vec<[u32; 4]>,
        encode: Vec<u32>,
        id: u32,
        inv: Vec<u32>,
    ) -> Group {
        let n = coords.len();
        let mut g = Group {
            n,
            id,
            name: name.to_string(),
            kind: GroupKind::Gl2 { field, coords, encode },
            inv,
            classes: OnceLock::new(),
        };
        if n <= 1000 {
            let mut mul = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    mul[i * n + j] = g.mul_slow(i as u32, j as u32);
                }
            }
            g.kind = GroupKind::Table { mul };
        }
        g
    }

    fn mul_slow(&self, i: u32, j: u32) -> u32 {
        match &self.kind {
            GroupKind::Table { mul } => mul[i as usize * self.n + j as usize],
            GroupKind::Gl2 { field, coords, encode } => {
                let [a, b, c, d] = coords[i as usize];
                let [e, f, g, h] = coords[j as usize];
                let q = field.q as u64;
                let ra = field.add(field.mul(a, e), field.mul(b, g));
                let rb = field.add(field.mul(a, f), field.mul(b, h));
                let rc = field.add(field.mul(c, e), field.mul(d, g));
                let rd = field.add(field.mul(c, f), field.mul(d, h));
                let code = ((ra as u64 * q + rb as u64) * q + rc as u64) * q + rd as u64;
                encode[code as usize]
            }
        }
    }

    #[inline]
    pub fn mul(&self, i: u32, j: u32) -> u32 {
        match &self.kind {
            GroupKind::Table { mul } => mul[i as usize * self.n + j as usize],
            _ => self.mul_slow(i, j),
        }
    }

    #[inline]
    pub fn inv(&self, i: u32) -> u32 {
        self.inv[i as usize]
    }

    pub fn mul3(&self, i: u32, j: u32, k: u32) -> u32 {
        self.mul(self.mul(i, j), k)
    }

    /// Conjugacy classes, computed once on first use.
    pub fn classes(&self) -> &ConjClasses {
        self.classes.get_or_init(|| {
            let n = self.n;
            let mut class_of = vec![u32::MAX; n];
            let mut reps = Vec::new();
            let mut sizes = Vec::new();
            for g in 0..n as u32 {
                if class_of[g as usize] != u32::MAX {
                    continue;
                }
                let cid = reps.len() as u32;
                reps.push(g);
                let mut size = 0u32;
                for h in 0..n as u32 {
                    let c = self.mul3(h, g, self.inv(h));
                    if class_of[c as usize] == u32::MAX {
                        class_of[c as usize] = cid;
                        size += 1;
                    }
                }
                sizes.push(size);
            }
            ConjClasses { class_of, reps, sizes }
        })
    }
}

/// A subgroup as a membership mask plus an ordered member list.
#[derive(Clone, Debug)]
pub struct SubgroupMask {
    pub members: Vec<u32>,
    contains: Vec<bool>,
    pos: Vec<u32>,
}

impl SubgroupMask {
    pub fn new(group: &Group, mut members: Vec<u32>) -> SubgroupMask {
        members.sort_unstable();
        members.dedup();
        let mut contains = vec![false; group.n];
        let mut pos = vec![u32::MAX; group.n];
        for (p, &m) in members.iter().enumerate() {
            contains[m as usize] = true;
            pos[m as usize] = p as u32;
        }
        let mask = SubgroupMask { members, contains, pos };
        debug_assert!(mask.is_closed(group), "member list is not a subgroup");
        mask
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, g: u32) -> bool {
        self.contains[g as usize]
    }

    /// Position of g in the member list; g must belong to the subgroup.
    #[inline]
    pub fn pos(&self, g: u32) -> usize {
        debug_assert!(self.contains(g));
        self.pos[g as usize] as usize
    }

    pub fn is_closed(&self, group: &Group) -> bool {
        self.contains(group.id)
            && self.members.iter().all(|&x| self.contains(group.inv(x)))
            && self
                .members
                .iter()
                .all(|&x| self.members.iter().all(|&y| self.contains(group.mul(x, y))))
    }
}

/// Double cosets K s K with a stored factorization for every group element.
pub struct DoubleCosets {
    /// Coset representatives; the representative of K itself is the identity.
    pub reps: Vec<u32>,
    /// Per element: which coset it belongs to.
    pub coset_of: Vec<u32>,
    /// Per element: positions (in K's member list) with g = k1 * s * k2.
    pub k1_pos: Vec<u32>,
    pub k2_pos: Vec<u32>,
    /// Member lists per coset.
    pub members: Vec<Vec<u32>>,
    /// Member lists of the stabilizers K_s = K cap s K s^-1.
    pub stabilizers: Vec<Vec<u32>>,
}

impl DoubleCosets {
    pub fn build(group: &Group, k: &SubgroupMask) -> DoubleCosets {
        let n = group.n;
        let mut coset_of = vec![u32::MAX; n];
        let mut k1_pos = vec![0u32; n];
        let mut k2_pos = vec![0u32; n];
        let mut reps = Vec::new();
        let mut members: Vec<Vec<u32>> = Vec::new();
        // The identity is processed first so that K is represented by 1_G.
        let order: Vec<u32> =
            std::iter::once(group.id).chain((0..n as u32).filter(|&g| g != group.id)).collect();
        for &s in &order {
            if coset_of[s as usize] != u32::MAX {
                continue;
            }
            let cid = reps.len() as u32;
            reps.push(s);
            let mut mem = Vec::new();
            for (p1, &ka) in k.members.iter().enumerate() {
                let left = group.mul(ka, s);
                for (p2, &kb) in k.members.iter().enumerate() {
                    let g = group.mul(left, kb);
                    if coset_of[g as usize] == u32::MAX {
                        coset_of[g as usize] = cid;
                        k1_pos[g as usize] = p1 as u32;
                        k2_pos[g as usize] = p2 as u32;
                        mem.push(g);
                    }
                }
            }
            members.push(mem);
        }
        let stabilizers = reps
            .iter()
            .map(|&s| {
                let si = group.inv(s);
                k.members
                    .iter()
                    .copied()
                    .filter(|&x| k.contains(group.mul3(si, x, s)))
                    .collect::<Vec<u32>>()
            })
            .collect::<Vec<_>>();
        let dc = DoubleCosets { reps, coset_of, k1_pos, k2_pos, members, stabilizers };
        // |KsK| = |K|^2 / |K_s| and the cosets partition G.
        debug_assert!(dc
            .members
            .iter()
            .zip(&dc.stabilizers)
            .all(|(m, st)| m.len() * st.len() == k.size() * k.size()));
        debug_assert_eq!(dc.members.iter().map(|m| m.len()).sum::<usize>(), n);
        dc
    }

    pub fn num_cosets(&self) -> usize {
        self.reps.len()
    }
}

/// Cosets gK and a transversal containing the identity first.
pub struct LeftCosets {
    pub transversal: Vec<u32>,
    pub coset_of: Vec<u32>,
}

impl LeftCosets {
    pub fn build(group: &Group, k: &SubgroupMask) -> LeftCosets {
        let n = group.n;
        let mut coset_of = vec![u32::MAX; n];
        let mut transversal = Vec::new();
        let order: Vec<u32> =
            std::iter::once(group.id).chain((0..n as u32).filter(|&g| g != group.id)).collect();
        for &t in &order {
            if coset_of[t as usize] != u32::MAX {
                continue;
            }
            let cid = transversal.len() as u32;
            transversal.push(t);
            for &ka in &k.members {
                coset_of[group.mul(t, ka) as usize] = cid;
            }
        }
        LeftCosets { transversal, coset_of }
    }
}

/// Shared handle used across the representation and Hecke layers.
pub type GroupRef = Arc<Group>;
