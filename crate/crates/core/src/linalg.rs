//! Exact linear algebra helpers.
//!
//! Group elements and root coordinates live in `i128` with checked
//! arithmetic; anything that needs division (rank, kernels, solving,
//! inversion) runs over `BigRational` so no intermediate can overflow.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) fn cadd(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("integer addition"))
}

pub(crate) fn cmul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("integer multiplication"))
}

pub(crate) fn identity(n: usize) -> Vec<i128> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

pub(crate) fn is_identity(n: usize, a: &[i128]) -> bool {
    a == identity(n).as_slice()
}

/// Row-major product of two n-by-n matrices.
pub(crate) fn mat_mul(n: usize, a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = cadd(out[i * n + j], cmul(aik, b[k * n + j])?)?;
            }
        }
    }
    Ok(out)
}

pub(crate) fn mat_vec(n: usize, a: &[i128], v: &[i128]) -> Result<Vec<i128>> {
    let mut out = vec![0; n];
    for i in 0..n {
        let mut acc = 0i128;
        for j in 0..n {
            acc = cadd(acc, cmul(a[i * n + j], v[j])?)?;
        }
        out[i] = acc;
    }
    Ok(out)
}

pub(crate) fn transpose(n: usize, a: &[i128]) -> Vec<i128> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

/// x^T G y for a symmetric n-by-n form G.
pub(crate) fn bilinear(n: usize, g: &[i128], x: &[i128], y: &[i128]) -> Result<i128> {
    let gy = mat_vec(n, g, y)?;
    let mut acc = 0i128;
    for i in 0..n {
        acc = cadd(acc, cmul(x[i], gy[i])?)?;
    }
    Ok(acc)
}

/// Exact determinant by fraction-free (Bareiss) elimination with row pivoting.
pub(crate) fn det(n: usize, a: &[i128]) -> Result<i128> {
    if n == 0 {
        return Ok(1);
    }
    let mut m = a.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k * n + k] == 0 {
            let swap = (k + 1..n).find(|&r| m[r * n + k] != 0);
            match swap {
                Some(r) => {
                    for c in 0..n {
                        m.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = cadd(
                    cmul(m[k * n + k], m[i * n + j])?,
                    -cmul(m[i * n + k], m[k * n + j])?,
                )?;
                m[i * n + j] = num / prev; // exact division (Bareiss)
            }
            m[i * n + k] = 0;
        }
        prev = m[k * n + k];
    }
    Ok(sign * m[(n - 1) * n + (n - 1)])
}

/// Determinants of the top-left 1x1, 2x2, ..., n-by-n blocks.
pub(crate) fn leading_principal_minors(n: usize, a: &[i128]) -> Result<Vec<i128>> {
    (1..=n)
        .map(|k| {
            let mut sub = vec![0; k * k];
            for i in 0..k {
                for j in 0..k {
                    sub[i * k + j] = a[i * n + j];
                }
            }
            det(k, &sub)
        })
        .collect()
}

fn to_rat(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Dense rational matrix, row-major.
pub(crate) struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigRational>,
}

impl QMat {
    pub fn from_int(rows: usize, cols: usize, a: &[i128]) -> Self {
        QMat { rows, cols, data: a.iter().map(|&x| to_rat(x)).collect() }
    }

    fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let pivot_row = (r..rows).find(|&i| !self.at(i, c).is_zero());
            let Some(p) = pivot_row else { continue };
            for j in 0..cols {
                self.data.swap(r * cols + j, p * cols + j);
            }
            let inv = self.at(r, c).clone();
            for j in c..cols {
                let v = self.at(r, j) / &inv;
                self.data[r * cols + j] = v;
            }
            for i in 0..rows {
                if i != r && !self.at(i, c).is_zero() {
                    let factor = self.at(i, c).clone();
                    for j in c..cols {
                        let v = self.at(i, j) - &factor * self.at(r, j);
                        self.data[i * cols + j] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

pub(crate) fn rank(rows: usize, cols: usize, a: &[i128]) -> usize {
    QMat::from_int(rows, cols, a).rref().len()
}

/// Basis of the null space of a (rows x cols) integer matrix, as rational vectors.
pub(crate) fn kernel_basis(rows: usize, cols: usize, a: &[i128]) -> Vec<Vec<BigRational>> {
    let mut m = QMat::from_int(rows, cols, a);
    let pivots = m.rref();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(r, f).clone();
            }
            v
        })
        .collect()
}

pub(crate) enum Solve {
    Unique(Vec<BigRational>),
    Inconsistent,
    Underdetermined,
}

/// Solve A x = b exactly, where A is rows x cols (column-major input as flat
/// row-major) and b has `rows` entries.
pub(crate) fn solve(rows: usize, cols: usize, a: &[i128], b: &[i128]) -> Solve {
    let mut aug = QMat {
        rows,
        cols: cols + 1,
        data: Vec::with_capacity(rows * (cols + 1)),
    };
    for i in 0..rows {
        for j in 0..cols {
            aug.data.push(to_rat(a[i * cols + j]));
        }
        aug.data.push(to_rat(b[i]));
    }
    let pivots = aug.rref();
    if pivots.contains(&cols) {
        return Solve::Inconsistent;
    }
    if pivots.len() < cols {
        return Solve::Underdetermined;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug.at(r, cols).clone();
    }
    Solve::Unique(x)
}

/// Exact inverse of an integer matrix whose inverse is again integral
/// (group elements have determinant +-1). Errors on singular or
/// non-integral results.
pub(crate) fn invert_integral(n: usize, a: &[i128]) -> Result<Vec<i128>> {
    let mut aug = QMat {
        rows: n,
        cols: 2 * n,
        data: Vec::with_capacity(n * 2 * n),
    };
    for i in 0..n {
        for j in 0..n {
            aug.data.push(to_rat(a[i * n + j]));
        }
        for j in 0..n {
            aug.data.push(if i == j { BigRational::one() } else { BigRational::zero() });
        }
    }
    let pivots = aug.rref();
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return Err(Error::NotGroupElement("matrix is singular".into()));
    }
    let mut out = vec![0i128; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = aug.at(i, n + j);
            if !v.is_integer() {
                return Err(Error::NotGroupElement("inverse is not integral".into()));
            }
            out[i * n + j] = bigint_to_i128(v.numer())?;
        }
    }
    Ok(out)
}

pub(crate) fn bigint_to_i128(v: &BigInt) -> Result<i128> {
    num_traits::ToPrimitive::to_i128(v).ok_or(Error::Overflow("bigint to i128"))
}

/// Scale a rational vector to the primitive integer vector on the same line,
/// with sign chosen so the first nonzero entry is positive.
pub(crate) fn primitive_integer(v: &[BigRational]) -> Result<Vec<i128>> {
    if v.iter().all(|x| x.is_zero()) {
        return Err(Error::Internal("primitive_integer of zero vector".into()));
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num_integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for x in &ints {
        gcd = num_integer::gcd(gcd, x.abs());
    }
    let mut out: Vec<i128> = ints
        .iter()
        .map(|x| bigint_to_i128(&(x / &gcd)))
        .collect::<Result<_>>()?;
    if let Some(first) = out.iter().find(|&&x| x != 0) {
        if *first < 0 {
            for x in &mut out {
                *x = -*x;
            }
        }
    }
    Ok(out)
}

pub(crate) fn gcd_i128(values: &[i128]) -> i128 {
    values.iter().fold(0i128, |g, &x| num_integer::gcd(g, x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_minors() {
        // A3 doubled Gram matrix
        let a = [2, -1, 0, -1, 2, -1, 0, -1, 2];
        assert_eq!(det(3, &a).unwrap(), 4);
        assert_eq!(leading_principal_minors(3, &a).unwrap(), vec![2, 3, 4]);
    }

    #[test]
    fn det_with_pivoting() {
        let a = [0, 1, 1, 0];
        assert_eq!(det(2, &a).unwrap(), -1);
        let singular = [1, 2, 2, 4];
        assert_eq!(det(2, &singular).unwrap(), 0);
    }

    #[test]
    fn kernel_of_affine_gram() {
        // Affine A2 triangle: kernel spanned by (1,1,1)
        let a = [2, -1, -1, -1, 2, -1, -1, -1, 2];
        let basis = kernel_basis(3, 3, &a);
        assert_eq!(basis.len(), 1);
        let prim = primitive_integer(&basis[0]).unwrap();
        assert_eq!(prim, vec![1, 1, 1]);
    }

    #[test]
    fn invert_round_trip() {
        let a = [-1, 1, 0, 1]; // s1 in A2
        let inv = invert_integral(2, &a).unwrap();
        assert_eq!(mat_mul(2, &a, &inv).unwrap(), identity(2));
    }

    #[test]
    fn solve_unique() {
        // x*(1,0) + y*(1,1) = (3,2)  =>  x=1, y=2
        let a = [1, 1, 0, 1];
        match solve(2, 2, &a, &[3, 2]) {
            Solve::Unique(x) => {
                assert_eq!(x[0], BigRational::from_integer(1.into()));
                assert_eq!(x[1], BigRational::from_integer(2.into()));
            }
            _ => panic!("expected unique solution"),
        }
    }
}
