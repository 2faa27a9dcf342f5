//! Dense LU with partial pivoting.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Pivots smaller than this times `‖A‖₁` are treated as zero.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.dim;
        &mut self.data[i * d..(i + 1) * d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// `P·A = L·U`, packed: unit-lower `L` below the diagonal, `U` on and above.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors {
    lu: DenseMatrix,
    /// `perm[i]` is the row of `A` that ended up in row `i`.
    perm: Vec<usize>,
    norm1: f64,
    /// `max |U| / max |A|`.
    pub growth: f64,
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Dimension {
            expected: 1,
            found: 0,
        });
    }
    if !a.is_finite() {
        return Err(Error::SingularMatrix {
            column: 0,
            pivot: f64::NAN,
            threshold: 0.0,
        });
    }
    let norm1 = a.norm1();
    let threshold = PIVOT_TOLERANCE * norm1;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if !(pmax > threshold) {
            return Err(Error::SingularMatrix {
                column: k,
                pivot: pmax,
                threshold,
            });
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let piv = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / piv;
            lu[(i, k)] = l;
            if l != 0.0 {
                for j in k + 1..n {
                    lu[(i, j)] -= l * lu[(k, j)];
                }
            }
        }
    }
    let umax = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(lu[(i, j)].abs()));
    Ok(LuFactors {
        growth: umax / a.max_abs(),
        lu,
        perm,
        norm1,
    })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        check_len(n, b.len())?;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Unit-lower factor.
    pub fn l(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn u(&self) -> DenseMatrix {
        DenseMatrix::from_fn(
            self.dim(),
            |i, j| if j >= i { self.lu[(i, j)] } else { 0.0 },
        )
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `κ₁(A) = ‖A‖₁ ‖A⁻¹‖₁`, from the explicit inverse.
    pub fn condition_1(&self) -> f64 {
        let n = self.dim();
        let mut inv_norm = 0.0f64;
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e).expect("length matches");
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        self.norm1 * inv_norm
    }
}

/// Solution of `A·X = B` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolve {
    pub x: Vec<f64>,
    /// `‖A·X − B‖₂ / ‖B‖₂` (absolute when `B = 0`).
    pub relative_residual: f64,
    pub condition_1: f64,
}

pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<DenseSolve> {
    let f = lu_factor(a)?;
    let x = f.solve(b)?;
    let relative_residual = relative_residual(a, &x, b)?;
    Ok(DenseSolve {
        condition_1: f.condition_1(),
        x,
        relative_residual,
    })
}

pub fn relative_residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    let r = ax
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).powi(2))
        .sum::<f64>()
        .sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(if nb > 0.0 { r / nb } else { r })
}
