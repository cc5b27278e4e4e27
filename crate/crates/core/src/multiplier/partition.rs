/// Smooth cutoff: 1 on `|t| ≤ 1`, 0 on `|t| ≥ 2`, glued with `e^{-1/x}`.
pub fn eta(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let up = glue(2.0 - a);
    up / (up + glue(a - 1.0))
}

fn glue(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `δ(t) = η(t) - η(2t)`, supported in `1/2 ≤ |t| ≤ 2`.
pub fn delta(t: f64) -> f64 {
    eta(t) - eta(2.0 * t)
}

/// Dyadic decomposition `δ_j(ξ) = δ(2^{-j}|ξ|)` for `|j| ≤ L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicPartition {
    pub scales: i32,
}

impl DyadicPartition {
    pub fn new(scales: i32) -> Self {
        assert!(scales >= 1, "at least one scale");
        DyadicPartition { scales }
    }

    pub fn shells(&self) -> impl Iterator<Item = i32> {
        -self.scales..=self.scales
    }

    pub fn delta_j(&self, j: i32, norm: f64) -> f64 {
        delta(norm * 2f64.powi(-j))
    }

    /// Closed interval of `|ξ|` on which `δ_j` can be nonzero.
    pub fn shell_support(j: i32) -> (f64, f64) {
        (2f64.powi(j - 1), 2f64.powi(j + 1))
    }

    /// `Σ_{|j|≤L} δ_j`, summed shell by shell.
    pub fn partition_sum(&self, norm: f64) -> f64 {
        self.shells().map(|j| self.delta_j(j, norm)).sum()
    }

    /// `η(2^{-L}ξ) - η(2^{L+1}ξ)`.
    pub fn telescoped(&self, norm: f64) -> f64 {
        eta(norm * 2f64.powi(-self.scales)) - eta(norm * 2f64.powi(self.scales + 1))
    }

    /// Range of `|ξ|` on which the partition sum is exactly 1.
    pub fn plateau(&self) -> (f64, f64) {
        (2f64.powi(-self.scales), 2f64.powi(self.scales))
    }

    pub fn outer_radius(&self) -> f64 {
        2f64.powi(self.scales + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_shape() {
        assert_eq!(eta(0.0), 1.0);
        assert_eq!(eta(1.0), 1.0);
        assert_eq!(eta(2.0), 0.0);
        assert!((eta(1.5) - 0.5).abs() < 1e-15);
        assert!(eta(1.2) > eta(1.3));
        assert_eq!(delta(0.0), 0.0);
        assert_eq!(delta(0.49), 0.0);
        assert_eq!(delta(2.01), 0.0);
    }

    #[test]
    fn telescoping() {
        let p = DyadicPartition::new(10);
        for k in 0..2000 {
            let xi = 10f64.powf(-5.0 + 9.0 * k as f64 / 2000.0);
            assert!((p.partition_sum(xi) - p.telescoped(xi)).abs() < 1e-12);
        }
        assert_eq!(p.partition_sum(0.0), 0.0);
        assert_eq!(p.partition_sum(4096.0), 0.0);
        assert!((p.partition_sum(1.0) - 1.0).abs() < 1e-12);
    }
}
