use super::{CovSequence, Mat2};

/// Forward and backward KM2O-Langevin matrices up to some order.
///
/// `gamma_fwd(n, k)` for `k < n` are the dissipation matrices in
/// `X(n) = -sum_k gamma_fwd(n, k) X(k) + nu_fwd(n)`, so their negatives are the
/// coefficients of the best linear predictor of `X(n)` from `X(0..n)`.
/// `v_fwd(n)` is the covariance of the fluctuation `nu_fwd(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Km2oSystem {
    requested: usize,
    delta_fwd: Vec<Mat2>,
    delta_bwd: Vec<Mat2>,
    gamma_fwd: Vec<Vec<Mat2>>,
    gamma_bwd: Vec<Vec<Mat2>>,
    v_fwd: Vec<Mat2>,
    v_bwd: Vec<Mat2>,
    degenerate: bool,
}

impl Km2oSystem {
    /// Highest order for which every matrix is available.
    pub fn order(&self) -> usize {
        self.v_fwd.len() - 1
    }

    pub fn requested_order(&self) -> usize {
        self.requested
    }

    /// Set when some fluctuation matrix up to the requested order was not
    /// positive definite; the system then stops at the last good order.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn gamma_fwd(&self, n: usize, k: usize) -> Mat2 {
        assert!(k < n, "gamma(n, k) needs k < n");
        self.gamma_fwd[n][k]
    }

    pub fn gamma_bwd(&self, n: usize, k: usize) -> Mat2 {
        assert!(k < n, "gamma(n, k) needs k < n");
        self.gamma_bwd[n][k]
    }

    /// Row `gamma_fwd(n, 0..n)`.
    pub fn gamma_fwd_row(&self, n: usize) -> &[Mat2] {
        &self.gamma_fwd[n]
    }

    /// Partial-correlation matrix `delta_fwd(n)`, `1 <= n <= order`.
    pub fn delta_fwd(&self, n: usize) -> Mat2 {
        self.delta_fwd[n - 1]
    }

    pub fn delta_bwd(&self, n: usize) -> Mat2 {
        self.delta_bwd[n - 1]
    }

    pub fn v_fwd(&self, n: usize) -> Mat2 {
        self.v_fwd[n]
    }

    pub fn v_bwd(&self, n: usize) -> Mat2 {
        self.v_bwd[n]
    }
}

/// Smallest eigenvalue above `1e-12 * trace`, on the symmetric part.
pub fn is_positive_definite(m: &Mat2) -> bool {
    let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let tr = a + d;
    if !(tr > 0.0) || !tr.is_finite() {
        return false;
    }
    let half_gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let min_eig = 0.5 * tr - half_gap;
    min_eig > 1e-12 * tr
}

fn symmetric(m: Mat2) -> Mat2 {
    (m + m.transpose()) * 0.5
}

/// Runs the dissipation-dissipation / fluctuation-dissipation recursions
/// from `V(0) = R(0)` up to `order`.
///
/// Each step computes the partial correlations
/// `delta_+(n+1) = -{R(n+1) + sum_k gamma_+(n,k) R(k+1)} V_-(n)^-1` (and its
/// mirror with `R(-.)` and `V_+`), then the new dissipation rows
/// `gamma_+(n+1,0) = delta_+(n+1)`,
/// `gamma_+(n+1,k) = gamma_+(n,k-1) + delta_+(n+1) gamma_-(n,n-k)`, and the
/// fluctuation update `V_+(n+1) = (I - delta_+(n+1) delta_-(n+1)) V_+(n)`.
pub fn levinson(cov: &CovSequence, order: usize) -> Km2oSystem {
    assert!(
        order <= cov.max_lag(),
        "covariance known up to lag {}, order {order} requested",
        cov.max_lag()
    );
    let r0 = symmetric(cov.at(0));
    let mut sys = Km2oSystem {
        requested: order,
        delta_fwd: Vec::with_capacity(order),
        delta_bwd: Vec::with_capacity(order),
        gamma_fwd: vec![Vec::new()],
        gamma_bwd: vec![Vec::new()],
        v_fwd: vec![r0],
        v_bwd: vec![r0],
        degenerate: false,
    };
    if !is_positive_definite(&r0) {
        sys.degenerate = true;
        return sys;
    }

    let eye = Mat2::identity();
    for n in 0..order {
        let (vf, vb) = (sys.v_fwd[n], sys.v_bwd[n]);
        let (gf, gb) = (&sys.gamma_fwd[n], &sys.gamma_bwd[n]);
        let lag = (n + 1) as isize;

        let mut num_f = cov.at(lag);
        let mut num_b = cov.at(-lag);
        for k in 0..n {
            let kl = (k + 1) as isize;
            num_f += gf[k] * cov.at(kl);
            num_b += gb[k] * cov.at(-kl);
        }
        let (Some(vb_inv), Some(vf_inv)) = (vb.try_inverse(), vf.try_inverse()) else {
            sys.degenerate = true;
            return sys;
        };
        let d_fwd = -num_f * vb_inv;
        let d_bwd = -num_b * vf_inv;

        let mut row_f = Vec::with_capacity(n + 1);
        let mut row_b = Vec::with_capacity(n + 1);
        row_f.push(d_fwd);
        row_b.push(d_bwd);
        for k in 1..=n {
            row_f.push(gf[k - 1] + d_fwd * gb[n - k]);
            row_b.push(gb[k - 1] + d_bwd * gf[n - k]);
        }

        let next_vf = symmetric((eye - d_fwd * d_bwd) * vf);
        let next_vb = symmetric((eye - d_bwd * d_fwd) * vb);
        if !is_positive_definite(&next_vf) || !is_positive_definite(&next_vb) {
            sys.degenerate = true;
            return sys;
        }
        sys.delta_fwd.push(d_fwd);
        sys.delta_bwd.push(d_bwd);
        sys.gamma_fwd.push(row_f);
        sys.gamma_bwd.push(row_b);
        sys.v_fwd.push(next_vf);
        sys.v_bwd.push(next_vb);
    }
    sys
}
