//! Thomas algorithm for tridiagonal systems.

use crate::error::{check_len, Error, Result};
use crate::Scalar;

/// LU factors of a tridiagonal matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    sub: Vec<T>,
    /// Modified super-diagonal `c'`.
    c: Vec<T>,
    /// Pivots of the forward sweep.
    den: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// `sub[0]` and `sup[n-1]` are ignored.
    pub fn factor(sub: &[T], diag: &[T], sup: &[T]) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(Error::Empty("tridiagonal system"));
        }
        check_len("sub-diagonal", n, sub.len())?;
        check_len("super-diagonal", n, sup.len())?;
        let mut c = vec![T::zero(); n];
        let mut den = vec![T::zero(); n];
        for i in 0..n {
            let d = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i] * c[i - 1]
            };
            if d == T::zero() || !d.is_finite() {
                return Err(Error::non_finite(format!("zero pivot at row {i}")));
            }
            den[i] = d;
            if i + 1 < n {
                c[i] = sup[i] / d;
            }
        }
        Ok(Self {
            sub: sub.to_vec(),
            c,
            den,
        })
    }

    pub fn dim(&self) -> usize {
        self.den.len()
    }

    pub fn solve_into(&self, rhs: &[T], x: &mut [T]) -> Result<()> {
        let n = self.dim();
        check_len("tridiagonal rhs", n, rhs.len())?;
        check_len("tridiagonal solution", n, x.len())?;
        x[0] = rhs[0] / self.den[0];
        for i in 1..n {
            x[i] = (rhs[i] - self.sub[i] * x[i - 1]) / self.den[i];
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - self.c[i] * x[i + 1];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let mut x = vec![T::zero(); self.dim()];
        self.solve_into(rhs, &mut x)?;
        Ok(x)
    }
}

pub fn solve_tridiagonal<T: Scalar>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Result<Vec<T>> {
    Tridiagonal::factor(sub, diag, sup)?.solve(rhs)
}
