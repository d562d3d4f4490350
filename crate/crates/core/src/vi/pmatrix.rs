use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sign class of a square matrix by its principal minors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PClass {
    /// Every principal minor positive.
    P,
    /// Every principal minor nonnegative, at least one zero.
    P0NotP,
    Neither,
}

/// Largest dimension accepted by [`check_p_matrix`].
pub const MAX_P_DIM: usize = 20;

/// Classifies `h` by exhaustive enumeration of its `2^n − 1` principal minors.
///
/// `h` is first equilibrated by positive row and column scalings, which
/// leave every principal minor's sign unchanged. Each determinant (LU with
/// partial pivoting) is then compared against `1e-10` times its Hadamard
/// bound, the product of the minor's row norms.
pub fn check_p_matrix(h: &DMatrix<f64>) -> Result<PClass> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::Dimension { expected: n, got: h.ncols() });
    }
    if n == 0 || n > MAX_P_DIM {
        return Err(Error::InvalidParameter(format!(
            "principal-minor enumeration needs 1 <= n <= {MAX_P_DIM}, got {n}"
        )));
    }
    let h = equilibrate(h);
    let mut class = PClass::P;
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        idx.clear();
        idx.extend((0..n).filter(|i| mask & (1 << i) != 0));
        let m = idx.len();
        let sub = DMatrix::from_fn(m, m, |r, c| h[(idx[r], idx[c])]);
        let hadamard: f64 = sub.row_iter().map(|r| r.norm()).product();
        let tol = 1e-10 * hadamard.max(f64::MIN_POSITIVE);
        let det = if m == 1 { sub[(0, 0)] } else { sub.lu().determinant() };
        if det < -tol {
            return Ok(PClass::Neither);
        }
        if det <= tol {
            class = PClass::P0NotP;
        }
    }
    Ok(class)
}

/// Ruiz scaling toward unit max-norm rows and columns.
fn equilibrate(h: &DMatrix<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let mut m = h.clone();
    for _ in 0..20 {
        let r: Vec<f64> = (0..n).map(|i| root_or_one(m.row(i).amax())).collect();
        let c: Vec<f64> = (0..n).map(|j| root_or_one(m.column(j).amax())).collect();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] /= r[i] * c[j];
            }
        }
    }
    m
}

fn root_or_one(v: f64) -> f64 {
    if v > 0.0 {
        v.sqrt()
    } else {
        1.0
    }
}
