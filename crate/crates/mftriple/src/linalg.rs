//! Dense complex matrices and the few spectral routines the engine needs:
//! a Hermitian Jacobi eigensolver, Gram-based rank decisions, and nullspace
//! extraction. Everything is deterministic; matrices stay below ~300x300.

use num_complex::Complex64;

pub type C = Complex64;

pub const ZERO: C = Complex64::new(0.0, 0.0);
pub const ONE: C = Complex64::new(1.0, 0.0);

/// `sum_i u_i * conj(v_i)` (conjugate-linear in the second argument).
pub fn dot(u: &[C], v: &[C]) -> C {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(u: &[C]) -> f64 {
    dot(u, u).re.max(0.0).sqrt()
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<C> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Normalized Hilbert-Schmidt inner product `tr(other^* self) / dim_w`,
    /// where `dim_w` is the dimension of the common domain.
    pub fn hs_inner(&self, other: &CMat, dim_w: usize) -> C {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let s: C = self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum();
        s / dim_w as f64
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues in ascending order together with the
/// unitary matrix whose columns are the matching eigenvectors.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    debug_assert!(a.hermitian_defect() < 1e-8 * (1.0 + a.max_abs()));
    let mut m = a.clone();
    // Symmetrize exactly so roundoff in the input cannot accumulate.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = C::new(m[(i, i)].re, 0.0);
    }
    let mut v = CMat::eye(n);
    let scale = m.frob_norm().max(1e-300);
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = m[(p, q)];
                let r = z.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = z / r; // e^{i phi}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let kappa = (app - aqq) / (2.0 * r);
                let t = if kappa >= 0.0 {
                    1.0 / (kappa + (kappa * kappa + 1.0).sqrt())
                } else {
                    -1.0 / (-kappa + (kappa * kappa + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotation U: U_pp = c, U_pq = -s*phase, U_qp = s*conj(phase), U_qq = c.
                let se_m = phase.conj() * s; // s e^{-i phi}
                let se_p = phase * s; // s e^{+i phi}
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c + akq * se_m;
                    m[(k, q)] = -akp * se_p + akq * c;
                    m[(p, k)] = m[(k, p)].conj();
                    m[(q, k)] = m[(k, q)].conj();
                }
                let new_pp = app * c * c + aqq * s * s + 2.0 * c * s * r;
                let new_qq = app * s * s + aqq * c * c - 2.0 * c * s * r;
                m[(p, p)] = C::new(new_pp, 0.0);
                m[(q, q)] = C::new(new_qq, 0.0);
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * se_m;
                    v[(k, q)] = -vkp * se_p + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let vs = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (sorted, vs)
}

/// Orthonormalizes `vecs` (modified Gram-Schmidt), dropping vectors whose
/// residual norm falls below `tol`.
pub fn orthonormalize(vecs: &[Vec<C>], tol: f64) -> Vec<Vec<C>> {
    let mut basis: Vec<Vec<C>> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let n = vec_norm(&w);
        if n > tol {
            for wi in &mut w {
                *wi /= n;
            }
            basis.push(w);
        }
    }
    basis
}

/// Singular values (descending) via the Gram matrix `a^* a`.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let gram = a.adjoint().mul(a);
    let (evals, _) = hermitian_eigen(&gram);
    let mut svals: Vec<f64> = evals.into_iter().rev().map(|x| x.max(0.0).sqrt()).collect();
    svals.iter_mut().for_each(|s| *s = s.max(0.0));
    svals
}

/// Principal square root of a unimodular complex number.
pub fn principal_unit_sqrt(z: C) -> C {
    let theta = z.arg();
    C::from_polar(1.0, theta / 2.0)
}
