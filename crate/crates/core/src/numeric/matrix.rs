use super::poly::DensePolynomial;
use super::scalar::Scalar;

/// Dense row-major square matrix. Dimension 0 is allowed (the empty matrix,
/// whose determinant is 1 by the empty-product convention).
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        for row in &rows {
            assert_eq!(row.len(), n, "matrix must be square");
        }
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.n + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }
}

/// Determinant over a scalar field.
///
/// Exact fields use fraction-free Bareiss elimination (every intermediate is a
/// ratio of minors, so entry growth stays polynomial and the division at each
/// step is exact). The float path uses partially pivoted elimination. Singular
/// matrices return 0; the 0x0 matrix returns 1.
pub fn det<T: Scalar>(m: &Matrix<T>) -> T {
    if T::EXACT {
        bareiss_det(m.clone())
    } else {
        plu_det(m.clone())
    }
}

fn bareiss_det<T: Scalar>(mut m: Matrix<T>) -> T {
    let n = m.dim();
    if n == 0 {
        return T::one();
    }
    let mut sign_flip = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m.at(k, k).is_zero() {
            match (k + 1..n).find(|&r| !m.at(r, k).is_zero()) {
                Some(r) => {
                    m.swap_rows(k, r);
                    sign_flip = !sign_flip;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m.at(k, k).mul(m.at(i, j)).sub(&m.at(i, k).mul(m.at(k, j)));
                *m.at_mut(i, j) = num.div(&prev);
            }
        }
        prev = m.at(k, k).clone();
    }
    let d = m.at(n - 1, n - 1).clone();
    if sign_flip {
        d.neg()
    } else {
        d
    }
}

fn plu_det<T: Scalar>(mut m: Matrix<T>) -> T {
    let n = m.dim();
    if n == 0 {
        return T::one();
    }
    let mut out = T::one();
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&a, &b| {
                m.at(a, k)
                    .magnitude()
                    .partial_cmp(&m.at(b, k).magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if m.at(pivot_row, k).is_zero() {
            return T::zero();
        }
        if pivot_row != k {
            m.swap_rows(k, pivot_row);
            out = out.neg();
        }
        let pivot = m.at(k, k).clone();
        out = out.mul(&pivot);
        for i in k + 1..n {
            let factor = m.at(i, k).div(&pivot);
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = m.at(i, j).sub(&factor.mul(m.at(k, j)));
                *m.at_mut(i, j) = v;
            }
        }
    }
    out
}

/// Exact determinant of a matrix of polynomials.
///
/// Division-free expansion by minors along rows, memoized over column subsets
/// (O(2^n * n) polynomial multiplies), so it stays exact over any coefficient
/// field, including `f64` coefficients.
pub fn poly_det<T: Scalar>(m: &Matrix<DensePolynomial<T>>) -> DensePolynomial<T> {
    let n = m.dim();
    if n == 0 {
        return DensePolynomial::one();
    }
    assert!(n <= 24, "poly_det supports dimensions up to 24");
    // minors[mask] = determinant of the submatrix formed by the first
    // popcount(mask) rows and the column set `mask`.
    let mut minors: Vec<Option<DensePolynomial<T>>> = vec![None; 1 << n];
    minors[0] = Some(DensePolynomial::one());
    for mask in 1usize..(1 << n) {
        let row = (mask as u32).count_ones() as usize - 1;
        let mut acc = DensePolynomial::zero();
        let mut pos = 0usize; // index of column j within the mask
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let entry = m.at(row, j);
            if !entry.is_zero() {
                let sub = minors[mask ^ (1 << j)]
                    .as_ref()
                    .expect("minor computed in mask order");
                let term = entry.mul(sub);
                acc = if (row + pos) % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            pos += 1;
        }
        minors[mask] = Some(acc);
    }
    minors[(1 << n) - 1].take().expect("full minor")
}
