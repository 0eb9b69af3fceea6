use crate::error::{invalid, Error, Result};
use crate::qfactor::quality_factor;
use crate::scattering::{check_radius, Medium};

/// Which modes count as usable degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofQuery {
    pub medium: Medium,
    pub r1: f64,
    pub eta_min: f64,
    pub q_max: f64,
    /// Highest order examined before giving up.
    pub n_cap: usize,
}

/// Number of modes `(n, m, l)` with `eta >= eta_min` and `Q <= q_max`.
/// Orders are scanned upward until both `l` fall below `eta_min`.
pub fn dof_count(q: &DofQuery) -> Result<usize> {
    check_radius(q.r1)?;
    if !(q.eta_min > 0.0 && q.eta_min <= 1.0) {
        return Err(invalid(format!("eta_min must lie in (0, 1], got {}", q.eta_min)));
    }
    if !(q.q_max > 0.0) {
        return Err(invalid(format!("q_max must be positive, got {}", q.q_max)));
    }
    let mut count = 0;
    for n in 1..=q.n_cap {
        let mut above = false;
        for l in [1u8, 2] {
            let b = quality_factor(n, l, &q.medium, q.r1)?;
            if b.eta >= q.eta_min {
                above = true;
                if b.q <= q.q_max {
                    count += 2 * (2 * n + 1);
                }
            }
        }
        if !above {
            return Ok(count);
        }
    }
    Err(Error::Inconclusive(q.n_cap))
}

/// `2 k0 R1 (k0 R1 + 2)`.
pub fn lossless_dof_bound(k0_r1: f64) -> f64 {
    2.0 * k0_r1 * (k0_r1 + 2.0)
}
