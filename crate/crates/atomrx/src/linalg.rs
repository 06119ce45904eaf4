//! Minimal dense complex linear algebra for 4x4 density matrices and the
//! 16x16 vectorized Liouvillian. Sizes are fixed and tiny, so everything is
//! written out directly instead of pulling in a matrix library.

use num_complex::Complex64 as C64;

pub const DIM: usize = 4;

/// 4x4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4 {
    data: [C64; DIM * DIM],
}

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4 {
            data: [C64::new(0.0, 0.0); DIM * DIM],
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * DIM + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * DIM + col] = value;
    }

    /// |i><j| basis matrix.
    pub fn basis(i: usize, j: usize) -> Self {
        let mut m = Mat4::zeros();
        m.set(i, j, C64::new(1.0, 0.0));
        m
    }

    pub fn trace(&self) -> C64 {
        (0..DIM).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Mat4::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Mat4) -> Self {
        let mut out = Mat4::zeros();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..DIM {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat4) -> Self {
        let mut out = *self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &Mat4) -> Self {
        let mut out = *self;
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = *self;
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// A*B - B*A.
    pub fn commutator(&self, rhs: &Mat4) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// (M + M^dag) / 2.
    pub fn hermitize(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Embeds the Hermitian matrix H = X + iY into the real symmetric
    /// [[X, -Y], [Y, X]] whose spectrum is that of H with doubled
    /// multiplicities, then runs cyclic Jacobi sweeps.
    #[allow(clippy::needless_range_loop)] // textbook Jacobi index form
    pub fn hermitian_eigenvalues(&self) -> [f64; DIM] {
        const N: usize = 2 * DIM;
        let mut a = [[0.0f64; N]; N];
        for i in 0..DIM {
            for j in 0..DIM {
                let z = self.get(i, j);
                a[i][j] = z.re;
                a[i + DIM][j + DIM] = z.re;
                a[i][j + DIM] = -z.im;
                a[i + DIM][j] = z.im;
            }
        }

        // Cyclic Jacobi: rotate away off-diagonal entries until negligible.
        for _sweep in 0..50 {
            let mut off = 0.0;
            for p in 0..N {
                for q in (p + 1)..N {
                    off += a[p][q] * a[p][q];
                }
            }
            if off.sqrt() < 1e-14 * (1.0 + self.max_abs()) {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..N {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..N {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }

        let mut eig: Vec<f64> = (0..N).map(|i| a[i][i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Doubled spectrum: take every other value.
        [eig[0], eig[2], eig[4], eig[6]]
    }
}

/// Solve the dense complex system `a * x = b` by LU with partial pivoting.
///
/// `a` is n*n row-major and consumed as scratch. Returns `None` when a pivot
/// falls below `1e-12 * max|a|` (singular to working precision).
pub fn solve_dense(a: &mut [C64], b: &mut [C64], n: usize) -> Option<Vec<C64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * scale.max(1e-300);

    for col in 0..n {
        // Pivot: largest magnitude on or below the diagonal.
        let mut pivot_row = col;
        let mut pivot_mag = a[col * n + col].norm();
        for row in (col + 1)..n {
            let mag = a[row * n + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < tol {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }

        let pivot = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            a[row * n + col] = C64::new(0.0, 0.0);
            for k in (col + 1)..n {
                let delta = factor * a[col * n + k];
                a[row * n + k] -= delta;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }

    // Back substitution.
    let mut x = vec![C64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Some(x)
}
