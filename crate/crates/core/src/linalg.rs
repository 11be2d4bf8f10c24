//! Dense linear-algebra helpers. Matrices are nalgebra types throughout;
//! the SVD and symmetric eigensolver are delegated to faer.

use nalgebra::{DMatrix, DVector};

/// Singular values below `PINV_RTOL * sigma_max` are treated as zero.
pub const PINV_RTOL: f64 = 1e-10;

/// Relative eigenvalue threshold for kernel dimension counts.
pub const KERNEL_RTOL: f64 = 1e-9;

/// Thin SVD `a = U diag(s) Vᵀ` with `r = min(rows, cols)` singular triplets.
/// Empty matrices yield empty factors.
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl ThinSvd {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return ThinSvd {
                u: DMatrix::zeros(m, 0),
                singular_values: DVector::zeros(0),
                v_t: DMatrix::zeros(0, n),
            };
        }
        let svd = to_faer(a).thin_svd().expect("SVD of a finite matrix converges");
        let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
        ThinSvd {
            u: DMatrix::from_fn(m, u.ncols(), |i, j| u[(i, j)]),
            singular_values: DVector::from_fn(s.nrows(), |i, _| s[i]),
            v_t: DMatrix::from_fn(v.ncols(), n, |i, j| v[(j, i)]),
        }
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.iter().cloned().fold(0.0, f64::max)
    }

    /// Cutoff below which a singular value counts as zero.
    pub fn cutoff(&self) -> f64 {
        PINV_RTOL * self.sigma_max()
    }

    /// Indices of singular values above the cutoff.
    pub fn support(&self) -> Vec<usize> {
        let cut = self.cutoff();
        let smax = self.sigma_max();
        if smax == 0.0 {
            return Vec::new();
        }
        (0..self.singular_values.len())
            .filter(|&i| self.singular_values[i] > cut)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.support().len()
    }

    /// Orthogonal projector onto the column space of the factored matrix.
    pub fn range_projector(&self) -> DMatrix<f64> {
        let m = self.u.nrows();
        let mut p = DMatrix::zeros(m, m);
        for i in self.support() {
            let col = self.u.column(i);
            p.ger(1.0, &col, &col, 1.0);
        }
        p
    }

    /// Orthogonal projector onto the row space of the factored matrix.
    pub fn corange_projector(&self) -> DMatrix<f64> {
        let n = self.v_t.ncols();
        let mut p = DMatrix::zeros(n, n);
        for i in self.support() {
            let row = self.v_t.row(i).transpose();
            p.ger(1.0, &row, &row, 1.0);
        }
        p
    }

    /// Reassembles `U diag(f(s)) Vᵀ` using every thin singular triplet.
    pub fn transform<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let mut scaled = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            let fs = f(*s);
            scaled.column_mut(j).scale_mut(fs);
        }
        scaled * &self.v_t
    }
}

/// Moore–Penrose pseudoinverse with the relative cutoff [`PINV_RTOL`].
pub fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = ThinSvd::new(a);
    let cut = svd.cutoff();
    let smax = svd.sigma_max();
    let (m, n) = a.shape();
    let mut out = DMatrix::zeros(n, m);
    if smax == 0.0 {
        return out;
    }
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > cut {
            let v = svd.v_t.row(i).transpose();
            let u = svd.u.column(i);
            out.ger(1.0 / s, &v, &u, 1.0);
        }
    }
    out
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    ThinSvd::new(a).sigma_max()
}

fn to_faer(a: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending; eigenvectors are
/// the columns of the returned matrix.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let evd = to_faer(a)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigensolver converges");
    let (u, s) = (evd.U(), evd.S().column_vector());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let values = order.iter().map(|&i| s[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    symmetric_eigen(a).0
}

/// Number of eigenvalues below `KERNEL_RTOL * max(λ_max, 1)`.
pub fn kernel_dimension(eigenvalues: &[f64]) -> usize {
    let top = eigenvalues.iter().cloned().fold(1.0, f64::max);
    let tol = KERNEL_RTOL * top;
    eigenvalues.iter().filter(|&&l| l.abs() < tol).count()
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_of_rank_one() {
        let a = DMatrix::from_row_slice(2, 1, &[-1.0, 1.0]);
        let p = pseudo_inverse(&a);
        assert!((p[(0, 0)] + 0.5).abs() < 1e-14);
        assert!((p[(0, 1)] - 0.5).abs() < 1e-14);
        assert!((spectral_norm(&a) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_wide_matrix_reconstructs() {
        // incidence matrix of two triangles sharing an edge plus a pendant edge
        let edges = [(0, 2), (0, 4), (1, 3), (2, 3), (2, 4), (3, 4)];
        let mut a = DMatrix::zeros(5, 6);
        for (j, &(u, v)) in edges.iter().enumerate() {
            a[(u, j)] = -1.0;
            a[(v, j)] = 1.0;
        }
        let svd = ThinSvd::new(&a);
        let recon = svd.transform(|s| s);
        assert!((recon - &a).abs().max() < 1e-13);
        assert_eq!(svd.rank(), 4);
    }

    #[test]
    fn eigenpairs_reconstruct() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let recon = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals)) * vecs.transpose();
        assert!((recon - a).abs().max() < 1e-13);
    }

    #[test]
    fn empty_matrices() {
        let a = DMatrix::<f64>::zeros(0, 3);
        assert_eq!(pseudo_inverse(&a).shape(), (3, 0));
        assert_eq!(spectral_norm(&a), 0.0);
        assert_eq!(ThinSvd::new(&a).corange_projector().shape(), (3, 3));
    }

    #[test]
    fn kernel_counts_zero_eigenvalues() {
        assert_eq!(kernel_dimension(&[0.0, 1e-14, 3.0, 3.0]), 2);
        assert_eq!(kernel_dimension(&[]), 0);
    }

    #[test]
    fn projectors_are_idempotent() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let svd = ThinSvd::new(&a);
        let p = svd.range_projector();
        assert!(max_abs(&(&p * &p - &p)) < 1e-12);
        let q = svd.corange_projector();
        assert!(max_abs(&(q - DMatrix::<f64>::identity(2, 2))) < 1e-12);
    }
}
