//! Small dense matrices in double-double arithmetic.

use nalgebra::DMatrix;
use twofloat::TwoFloat;

#[derive(Debug, Clone)]
pub(crate) struct DdMatrix {
    n: usize,
    data: Vec<TwoFloat>,
}

impl DdMatrix {
    pub fn from_f64(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(TwoFloat::from(m[(i, j)]));
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![TwoFloat::from(0.0); n * n];
        for i in 0..n {
            data[i * n + i] = TwoFloat::from(1.0);
        }
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> TwoFloat {
        self.data[i * self.n + j]
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut data = vec![TwoFloat::from(0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == TwoFloat::from(0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Self { n, data }
    }

    /// Determinant by cofactor expansion.
    ///
    /// Division-free on purpose: `TwoFloat` division is only accurate to
    /// about f64 precision, which would undo the point of this module.
    pub fn det(&self) -> TwoFloat {
        let idx: Vec<usize> = (0..self.n).collect();
        self.minor_det(0, &idx)
    }

    fn minor_det(&self, row: usize, cols: &[usize]) -> TwoFloat {
        match cols.len() {
            0 => TwoFloat::from(1.0),
            1 => self.get(row, cols[0]),
            2 => self.get(row, cols[0]) * self.get(row + 1, cols[1]) - self.get(row, cols[1]) * self.get(row + 1, cols[0]),
            _ => {
                let mut acc = TwoFloat::from(0.0);
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(row, c);
                    if a == TwoFloat::from(0.0) {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a * self.minor_det(row + 1, &rest);
                    if k % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc
            }
        }
    }

    /// Determinant of the 2×2 block starting at `(i, j)`.
    pub fn block_det(&self, i: usize, j: usize) -> TwoFloat {
        self.get(i, j) * self.get(i + 1, j + 1) - self.get(i, j + 1) * self.get(i + 1, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_f64() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[2.0, 0.5, 0.1, 0.0, 0.5, 3.0, 0.2, 0.4, 0.1, 0.2, 1.5, 0.3, 0.0, 0.4, 0.3, 2.5],
        );
        let d = DdMatrix::from_f64(&m).det();
        assert!((d.hi() - m.determinant()).abs() < 1e-13);
        let id = DdMatrix::identity(4);
        assert_eq!(id.mul(&DdMatrix::from_f64(&m)).det(), d);
    }

    #[test]
    fn recovers_tiny_differences() {
        // det(1 + εJ) - 1 = ε² for J = [[0,1],[-1,0]]; f64 loses it entirely.
        let eps = 1e-10;
        let m = DMatrix::from_row_slice(2, 2, &[1.0, eps, -eps, 1.0]);
        let d = DdMatrix::from_f64(&m).det() - TwoFloat::from(1.0);
        assert!((d.hi() / (eps * eps) - 1.0).abs() < 1e-12);
    }
}
