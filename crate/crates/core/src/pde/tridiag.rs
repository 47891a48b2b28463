use crate::error::{Error, Result};

/// Tridiagonal matrix stored by diagonals. `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = self * x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * x[i + 1];
            }
            out[i] = v;
        }
    }

    /// Thomas algorithm; `rhs` is overwritten by the solution.
    /// `scratch` must have the same length as the system.
    pub fn solve_in_place(&self, rhs: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Ok(());
        }
        let check = |row: usize, pivot: f64| {
            if pivot.is_finite() && pivot.abs() > f64::MIN_POSITIVE {
                Ok(pivot)
            } else {
                Err(Error::SingularSystem { row, pivot })
            }
        };
        let mut pivot = check(0, self.diag[0])?;
        scratch[0] = self.upper[0] / pivot;
        rhs[0] /= pivot;
        for i in 1..n {
            pivot = check(i, self.diag[i] - self.lower[i] * scratch[i - 1])?;
            scratch[i] = self.upper[i] / pivot;
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= scratch[i] * rhs[i + 1];
        }
        Ok(())
    }
}
