//! Small dense complex matrices.
//!
//! Everything here is sized for desk-scale frame problems (N up to a few
//! hundred), so the storage is a flat row-major `Vec` and the algorithms are
//! the textbook ones: Gauss-Jordan inversion, cyclic Jacobi for Hermitian
//! eigenproblems, and scaling-and-squaring Padé for the exponential.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{cr, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(rows, cols, |i, j| cr(f(i, j)))
    }

    /// Builds a matrix from row-major entries; returns `None` on a length mismatch.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &C<T>> {
        self.data.iter()
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect() }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: C<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(C::zero(), |a, b| a + b)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Real Hilbert-Schmidt inner product `Re tr(X Y*)`.
    pub fn hs_inner(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
    }

    pub fn hs_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<T>()).fold(T::zero(), T::max)
    }

    /// `(X + X*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// `(X - X*) / 2`.
    pub fn anti_hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half)
    }

    /// `max |X - X*|` entrywise.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_imag(&self) -> T {
        self.data.iter().map(|z| z.im.abs()).fold(T::zero(), T::max)
    }

    /// Drops imaginary parts.
    pub fn real_part(&self) -> Self {
        self.map(|z| cr(z.re))
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let (r2, c2) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * rhs[(i % r2, j % c2)])
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out[(self.rows + i, self.cols + j)] = rhs[(i, j)];
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// `P X P*` for the permutation sending index `i` to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)];
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting. `None` when
    /// a pivot falls below `tiny` relative to the largest entry.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let scale = self.max_abs();
        if scale.is_zero() || !scale.is_finite() {
            return None;
        }
        let tiny = scale * T::epsilon() * T::lit(n as f64);
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (piv, pmag) = (col..n).map(|r| (r, a[(r, col)].norm())).fold((col, T::neg_infinity()), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
            if pmag <= tiny {
                return None;
            }
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let p = a[(col, col)].inv();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * p;
                inv[(col, j)] = inv[(col, j)] * p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] = a[(r, j)] - f * ac;
                    inv[(r, j)] = inv[(r, j)] - f * ic;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Matrix exponential by scaling and squaring with a diagonal [8/8] Padé
    /// approximant. For anti-Hermitian input the result is unitary up to
    /// rounding, because the Padé denominator is the adjoint of the numerator.
    pub fn expm(&self) -> Self {
        &Self::identity(self.rows) + &self.expm_minus_identity()
    }

    /// `exp(A) − I`, accurate relative to its own size when `A` is small.
    /// The Padé quotient is formed as `q(A)^{-1}(p(A) − q(A))`, which keeps
    /// only odd powers, and squaring uses `(I+V)² − I = 2V + V²`.
    pub fn expm_minus_identity(&self) -> Self {
        assert!(self.is_square());
        const ORDER: usize = 8;
        let n = self.rows;
        let norm = self.norm_1();
        if norm.is_zero() {
            return Self::zeros(n, n);
        }
        let mut squarings = 0u32;
        let half = T::lit(0.5);
        let mut scaled_norm = norm;
        while scaled_norm > half {
            scaled_norm = scaled_norm * half;
            squarings += 1;
        }
        let a = self.scale(T::lit(0.5f64.powi(squarings as i32)));

        // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
        let mut coef = [T::one(); ORDER + 1];
        for k in 1..=ORDER {
            let prev = coef[k - 1];
            coef[k] = prev * T::lit((ORDER + 1 - k) as f64) / T::lit(((2 * ORDER + 1 - k) * k) as f64);
        }
        let mut den = Self::identity(n);
        let mut odd = Self::zeros(n, n);
        let mut power = Self::identity(n);
        for (k, &ck) in coef.iter().enumerate().skip(1) {
            power = power.matmul(&a);
            let term = power.scale(ck);
            if k % 2 == 0 {
                den = &den + &term;
            } else {
                den = &den - &term;
                odd = &odd + &term;
            }
        }
        let mut v =
            den.inverse().expect("Pade denominator is well conditioned after scaling").matmul(&odd.scale(T::lit(2.0)));
        for _ in 0..squarings {
            v = &v.scale(T::lit(2.0)) + &v.matmul(&v);
        }
        v
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.
    /// Eigenvalues are returned in descending order; eigenvectors are the
    /// columns of the returned unitary.
    pub fn hermitian_eigen(&self) -> (Vec<T>, Self) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.hermitian_part();
        let mut v = Self::identity(n);
        let total = a.hs_norm();
        if n <= 1 || total.is_zero() {
            let vals = (0..n).map(|i| a[(i, i)].re).collect();
            return (vals, v);
        }
        let eps = T::epsilon() * T::lit(0.5);
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<T>()
                .sqrt();
            if off <= eps * total {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= T::min_positive_value() {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (mag + mag);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let cs = T::one() / (T::one() + t * t).sqrt();
                    let sn = t * cs;
                    // U = diag(1, conj(phase)) * [[c, s], [-s, c]]
                    let upp = cr(cs);
                    let upq = cr(sn);
                    let uqp = phase.conj() * (-sn);
                    let uqq = phase.conj() * cs;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * upp + akq * uqp;
                        a[(k, q)] = akp * upq + akq * uqq;
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * upp + vkq * uqp;
                        v[(k, q)] = vkp * upq + vkq * uqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                    }
                    a[(p, q)] = C::zero();
                    a[(q, p)] = C::zero();
                    a[(p, p)] = cr(a[(p, p)].re);
                    a[(q, q)] = cr(a[(q, q)].re);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap_or(std::cmp::Ordering::Equal));
        let vals = order.iter().map(|&i| a[(i, i)].re).collect();
        let vecs = Self::from_fn(n, n, |r, cidx| v[(r, order[cidx])]);
        (vals, vecs)
    }
}

impl<T: Real> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;

    fn add(self, rhs: Self) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;

    fn sub(self, rhs: Self) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;

    fn neg(self) -> CMat<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;

    fn mul(self, rhs: Self) -> CMat<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for CMat<T> {
    type Output = CMat<T>;

    fn add(self, rhs: Self) -> CMat<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for CMat<T> {
    type Output = CMat<T>;

    fn sub(self, rhs: Self) -> CMat<T> {
        &self - &rhs
    }
}

/// Convenience: `Complex::new(re, im)` lifted to the matrix scalar.
pub fn cx<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}
