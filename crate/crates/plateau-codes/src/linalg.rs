//! Dense matrices over `F_p` with the exact row-reduction primitives the
//! code constructions need: rank, reduced echelon form, nullspace bases,
//! determinants, and row-space membership.

use crate::field::Prime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Mat {
    pub fn zero(p: Prime, rows: usize, cols: usize) -> Self {
        Mat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Mat::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(p: Prime, rows: Vec<Vec<u8>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend(row);
        }
        Mat { p, rows: r, cols: c, data }
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn at(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let p = self.p;
        let mut out = Mat::zero(p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k) as u32;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = p.add(out.at(i, j) as u32, p.mul(a, other.at(k, j) as u32));
                    out.set(i, j, v as u8);
                }
            }
        }
        out
    }

    /// `A A^T`, the Gram matrix of the rows under the dot product.
    pub fn gram(&self) -> Mat {
        self.matmul(&self.transpose())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pivot) = (r..m.rows).find(|&i| m.at(i, col) != 0) else { continue };
            if pivot != r {
                for j in 0..m.cols {
                    let (a, b) = (m.at(pivot, j), m.at(r, j));
                    m.set(pivot, j, b);
                    m.set(r, j, a);
                }
            }
            let inv = p.inv(m.at(r, col) as u32);
            for j in 0..m.cols {
                m.set(r, j, p.mul(m.at(r, j) as u32, inv) as u8);
            }
            for i in 0..m.rows {
                if i == r || m.at(i, col) == 0 {
                    continue;
                }
                let factor = m.at(i, col) as u32;
                for j in 0..m.cols {
                    let v = p.sub(m.at(i, j) as u32, p.mul(factor, m.at(r, j) as u32));
                    m.set(i, j, v as u8);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : A x = 0}` as rows.
    pub fn nullspace_basis(&self) -> Mat {
        let p = self.p;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![0u8; self.cols];
            v[f] = 1;
            for (pi, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(r.at(pi, f) as u32) as u8;
            }
            rows.push(v);
        }
        Mat::from_rows(p, rows)
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> u32 {
        assert_eq!(self.rows, self.cols);
        let p = self.p;
        let n = self.rows;
        let mut m: Vec<u32> = self.data.iter().map(|&x| x as u32).collect();
        let mut det = 1u32;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| m[r * n + col] != 0) else { return 0 };
            if pivot != col {
                for j in 0..n {
                    m.swap(pivot * n + j, col * n + j);
                }
                det = p.neg(det);
            }
            det = p.mul(det, m[col * n + col]);
            let inv = p.inv(m[col * n + col]);
            for r in col + 1..n {
                let factor = p.mul(m[r * n + col], inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let t = p.mul(factor, m[col * n + j]);
                    m[r * n + j] = p.sub(m[r * n + j], t);
                }
            }
        }
        det
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[u8]) -> bool {
        assert_eq!(v.len(), self.cols);
        let mut stacked = self.clone();
        stacked.rows += 1;
        stacked.data.extend_from_slice(v);
        stacked.rank() == self.rank()
    }

    /// Whether every row of `other` lies in the row space of `self`.
    pub fn row_space_contains_all(&self, other: &Mat) -> bool {
        assert_eq!(self.cols, other.cols);
        let mut stacked = self.clone();
        stacked.rows += other.rows;
        stacked.data.extend_from_slice(&other.data);
        stacked.rank() == self.rank()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hconcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row = self.row(i).to_vec();
            row.extend_from_slice(other.row(i));
            rows.push(row);
        }
        Mat::from_rows(self.p, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = Mat::from_rows(p3(), vec![vec![1, 2, 0], vec![0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace_basis();
        assert_eq!(ns.rows(), 1);
        for i in 0..ns.rows() {
            let v = ns.row(i);
            for r in 0..m.rows() {
                let dot: u32 = m.row(r).iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
                assert_eq!(dot % 3, 0);
            }
        }
    }

    #[test]
    fn det_and_identity() {
        let id = Mat::identity(p3(), 4);
        assert_eq!(id.det(), 1);
        let m = Mat::from_rows(p3(), vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(m.det(), 0);
        let m = Mat::from_rows(p3(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det(), 2); // -1 mod 3
    }

    #[test]
    fn row_space_membership() {
        let m = Mat::from_rows(p3(), vec![vec![1, 0, 2], vec![0, 1, 1]]);
        assert!(m.row_space_contains(&[1, 1, 0]));
        assert!(!m.row_space_contains(&[0, 0, 1]));
    }

    #[test]
    fn nullspace_dimension_matches() {
        let m = Mat::from_rows(p3(), vec![vec![1, 2, 1, 0], vec![2, 1, 0, 1]]);
        let ns = m.nullspace_basis();
        assert_eq!(ns.rows() + m.rank(), m.cols());
        assert_eq!(ns.rank(), ns.rows());
    }
}
