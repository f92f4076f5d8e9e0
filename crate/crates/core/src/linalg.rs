//! Small dense matrices over integers and rationals.

use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<i64>;
pub type RatMatrix = Matrix<Rational>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().cloned()).collect(),
        }
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

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Matrix<T>
where
    T: Clone + PartialEq + Zero + One + Add<Output = T> + Mul<Output = T> + Sub<Output = T>,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        dot(x, &self.mul_vec(y))
    }

    pub fn sub_mat(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() - other.get(i, j).clone()
        })
    }

    /// `M^T G M`.
    pub fn congruence(&self, gram: &Self) -> Self {
        self.transpose().mul_mat(gram).mul_mat(self)
    }
}

impl<T> Neg for &Matrix<T>
where
    T: Clone + Neg<Output = T>,
{
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

pub fn dot<T>(x: &[T], y: &[T]) -> T
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    x.iter()
        .zip(y)
        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.map(|&x| Rational::from_integer(x as i128))
}

/// Converts back to integers when every entry is integral.
pub fn to_integer(m: &RatMatrix) -> Option<IntMatrix> {
    if m.data.iter().any(|q| !q.is_integer()) {
        return None;
    }
    Some(m.map(|q| q.to_integer() as i64))
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                let tmp = *a.get(r, j);
                a.set(r, j, *a.get(p, j));
                a.set(p, j, tmp);
            }
        }
        let inv = a.get(r, c).recip();
        for j in 0..a.cols {
            let v = *a.get(r, j) * inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i != r {
                let f = *a.get(i, c);
                if !f.is_zero() {
                    for j in 0..a.cols {
                        let v = *a.get(i, j) - f * *a.get(r, j);
                        a.set(i, j, v);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

pub fn int_rank(m: &IntMatrix) -> usize {
    rank(&to_rational(m))
}

/// Basis of the right null space over the rationals.
pub fn kernel(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); m.cols];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -*r.get(row, f);
            }
            v
        })
        .collect()
}

pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows;
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            *m.get(i, j)
        } else if j - n == i {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(Matrix::from_fn(n, n, |i, j| *r.get(i, j + n)))
}

pub fn gcd_all(xs: &[i64]) -> i64 {
    xs.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(v: &[Rational]) -> Vec<i64> {
    let l = v.iter().fold(1i128, |l, q| l.lcm(q.denom()));
    let ints: Vec<i128> = v.iter().map(|q| (q * l).to_integer()).collect();
    let g = ints.iter().fold(0i128, |g, x| g.gcd(x)).max(1);
    ints.iter().map(|x| (x / g) as i64).collect()
}

/// Gcd of all 2x2 minors of the 2 x n matrix with rows `x`, `y`.
pub fn minor_gcd_2(x: &[i64], y: &[i64]) -> i64 {
    let mut g = 0i64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            g = g.gcd(&(x[i] * y[j] - x[j] * y[i]));
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rint;

    fn rm(rows: &[&[i64]]) -> RatMatrix {
        to_rational(&Matrix::from_rows(
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        ))
    }

    #[test]
    fn kernel_of_affine_a2() {
        let m = rm(&[&[2, -1, -1], &[-1, 2, -1], &[-1, -1, 2]]);
        assert_eq!(rank(&m), 2);
        let k = kernel(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(primitive_integer(&k[0]), vec![1, 1, 1]);
    }

    #[test]
    fn inverse_round_trip() {
        let m = rm(&[&[2, -1], &[-1, 2]]);
        let inv = inverse(&m).unwrap();
        assert!(m.mul_mat(&inv).is_identity());
        assert_eq!(*inv.get(0, 0), Rational::new(2, 3));
        assert!(inverse(&rm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn minors() {
        assert_eq!(minor_gcd_2(&[1, 0, 0], &[0, 1, 0]), 1);
        assert_eq!(minor_gcd_2(&[2, 0], &[0, 2]), 4);
        assert_eq!(gcd_all(&[4, -6, 8]), 2);
        assert_eq!(primitive_integer(&[rint(0), Rational::new(3, 2), rint(3)]), vec![0, 1, 2]);
    }
}
