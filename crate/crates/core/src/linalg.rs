//! Small dense vector helpers used throughout the solvers.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `‖v − v*‖ / (1 + ‖v*‖)`, the error metric reported in every table.
pub fn scaled_error(v: &[f64], reference: &[f64]) -> f64 {
    dist(v, reference) / (1.0 + norm(reference))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Spectral norm of a dense square matrix stored row-major, via power
/// iteration on `AᵀA`.
pub fn spectral_norm(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma = 0.0;
    for _ in 0..500 {
        let av: Vec<f64> = m.iter().map(|row| dot(row, &v)).collect();
        let mut atav = vec![0.0; n];
        for (i, row) in m.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                atav[j] += a * av[i];
            }
        }
        let nrm = norm(&atav);
        if nrm == 0.0 {
            return 0.0;
        }
        let next = nrm.sqrt();
        v = atav.iter().map(|x| x / nrm).collect();
        if (next - sigma).abs() <= 1e-14 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_error_matches_definition() {
        let e = scaled_error(&[3.0, 4.0], &[0.0, 0.0]);
        assert_eq!(e, 5.0);
        let e = scaled_error(&[1.0, 1.0], &[1.0, 1.0]);
        assert_eq!(e, 0.0);
    }

    #[test]
    fn spectral_norm_of_ones() {
        let m = vec![vec![1.0; 4]; 4];
        assert!((spectral_norm(&m) - 4.0).abs() < 1e-10);
    }
}
