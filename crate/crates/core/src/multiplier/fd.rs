/// Finite-difference weights for derivatives `0..=order` at `x0` from the
/// nodes `xs` (Fornberg's recursion).
pub fn stencil_weights(x0: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Centered stencil of `2 * half + 1` points with spacing `h`.
pub fn centered(order: usize, half: usize, h: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=2 * half).map(|k| (k as f64 - half as f64) * h).collect();
    stencil_weights(0.0, &xs, order).swap_remove(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_stencils() {
        let w = centered(1, 1, 1.0);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = centered(2, 1, 1.0);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14);
        let w = centered(1, 3, 0.1);
        let d: f64 = w.iter().enumerate().map(|(k, c)| c * ((k as f64 - 3.0) * 0.1).sin()).sum();
        assert!((d - 1.0).abs() < 1e-8);
    }
}
