use super::sets::ConvexSet;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_sq, sub};
use crate::rng::{stream_rng, Stream};

/// Sampled monotonicity and Lipschitz constants of `f` over `set`.
///
/// Returns `(μ̂, L̂)`: the smallest `⟨F(x)−F(y), x−y⟩/‖x−y‖²` and the largest
/// `‖F(x)−F(y)‖/‖x−y‖` over `n_samples` random pairs. Both are heuristics
/// (μ̂ over-estimates μ, L̂ under-estimates L).
pub fn estimate_monotonicity<F>(f: &F, set: &dyn ConvexSet, n_samples: usize, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if n_samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let mut rng = stream_rng(seed, Stream::Sampling, 0, 0);
    let mut mu = f64::INFINITY;
    let mut lip: f64 = 0.0;
    let mut used = 0usize;
    for _ in 0..n_samples {
        let x = set.sample(&mut rng);
        let y = set.sample(&mut rng);
        let d = sub(&x, &y);
        let dd = norm_sq(&d);
        if !(dd > 1e-24 * (1.0 + norm_sq(&x))) {
            continue;
        }
        let df = sub(&f(&x), &f(&y));
        mu = mu.min(dot(&df, &d) / dd);
        lip = lip.max((norm_sq(&df) / dd).sqrt());
        used += 1;
    }
    if used == 0 {
        return Err(Error::DegenerateSet("every sampled pair coincided".into()));
    }
    Ok((mu, lip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vi::sets::BoxSet;

    #[test]
    fn symmetric_linear_map_hits_eigen_extremes() {
        let set = BoxSet::cube(2, -1.0, 1.0).unwrap();
        let f = |x: &[f64]| vec![2.0 * x[0] + x[1], x[0] + 2.0 * x[1]];
        let (mu, l) = estimate_monotonicity(&f, &set, 20_000, 1).unwrap();
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        assert!((1.0 - 1e-12..1.0 + 1e-3).contains(&mu), "{mu}");
        assert!(l <= 3.0 + 1e-12 && l > 3.0 - 1e-3, "{l}");
    }

    #[test]
    fn identity_gives_unit_constants() {
        let set = BoxSet::cube(4, 0.0, 1.0).unwrap();
        let f = |x: &[f64]| x.to_vec();
        let (mu, l) = estimate_monotonicity(&f, &set, 100, 2).unwrap();
        assert!((mu - 1.0).abs() < 1e-12 && (l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_is_degenerate() {
        let set = BoxSet::cube(2, 1.0, 1.0).unwrap();
        let f = |x: &[f64]| x.to_vec();
        assert!(matches!(estimate_monotonicity(&f, &set, 10, 0), Err(Error::DegenerateSet(_))));
    }
}
