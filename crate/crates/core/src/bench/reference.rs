use crate::error::{check_dim, Error, Result};
use crate::game::{CournotNetworkSpec, SingleMarketCournotSpec};
use crate::linalg::dist;
use crate::vi::{natural_residual, ConvexSet, ProductSet};

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceConfig {
    /// Natural-map residual required at every rung and at the final `ε = 0` polish.
    pub tol: f64,
    /// Decreasing regularisation weights.
    pub ladder: Vec<f64>,
    /// Iteration cap per rung.
    pub max_iter: usize,
    /// Starting point (default: projection of the origin).
    pub start: Option<Vec<f64>>,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self { tol: 1e-12, ladder: (4..=10).map(|e| 10f64.powi(-e)).collect(), max_iter: 2_000_000, start: None }
    }
}

/// Per-rung record of a reference solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderStep {
    pub eps: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Reference equilibrium with its certificate `‖x − Π(x − γF(x))‖` at `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub x: Vec<f64>,
    pub residual: f64,
    pub gamma: f64,
    pub ladder: Vec<LadderStep>,
}

fn iterate<F>(
    f: &F,
    set: &dyn ConvexSet,
    eps: f64,
    gamma: f64,
    z: &mut Vec<f64>,
    cfg: &ReferenceConfig,
) -> Result<LadderStep>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = z.len();
    let mut y = vec![0.0; n];
    let mut next = vec![0.0; n];
    for it in 0..=cfg.max_iter {
        let fz = f(z);
        for i in 0..n {
            y[i] = z[i] - gamma * (fz[i] + eps * z[i]);
        }
        set.project_into(&y, &mut next);
        let residual = dist(z, &next);
        if !residual.is_finite() {
            break;
        }
        if residual <= cfg.tol {
            return Ok(LadderStep { eps, iterations: it, residual });
        }
        std::mem::swap(z, &mut next);
    }
    Err(Error::SolverFailure {
        context: format!("reference ladder rung eps={eps:e}"),
        iterations: cfg.max_iter,
        residual: natural_residual(&|v: &[f64]| f(v), set, z, gamma),
    })
}

/// Solves a monotone VI(K, F) through `F + εI` on a decreasing ladder of `ε`,
/// warm-starting each rung from a linear extrapolation of the previous two,
/// and finishing with an unregularised polish. `lipschitz` bounds `F`'s
/// Lipschitz constant; the step is `1/(L + ε)`.
pub fn tikhonov_reference<F>(
    f: &F,
    set: &dyn ConvexSet,
    lipschitz: f64,
    cfg: &ReferenceConfig,
) -> Result<ReferenceSolution>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lipschitz bound {lipschitz} invalid")));
    }
    if cfg.ladder.windows(2).any(|w| !(w[1] < w[0])) || cfg.ladder.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter("ladder must be positive and decreasing".into()));
    }
    let mut z = match &cfg.start {
        Some(s) => {
            check_dim(set.dim(), s.len())?;
            set.project(s)
        }
        None => set.project(&vec![0.0; set.dim()]),
    };
    let mut ladder = Vec::new();
    let mut history: Vec<(f64, Vec<f64>)> = Vec::new();
    for &eps in cfg.ladder.iter().chain(std::iter::once(&0.0)) {
        if let [.., (e0, z0), (e1, z1)] = history.as_slice() {
            let t = (eps - e1) / (e1 - e0);
            let guess: Vec<f64> = z1.iter().zip(z0).map(|(a, b)| a + t * (a - b)).collect();
            z = set.project(&guess);
        }
        ladder.push(iterate(f, set, eps, 1.0 / (lipschitz + eps), &mut z, cfg)?);
        history.push((eps, z.clone()));
    }
    let gamma = 1.0 / lipschitz;
    let residual = natural_residual(f, set, &z, gamma);
    Ok(ReferenceSolution { x: z, residual, gamma, ladder })
}

/// Reference equilibrium of a network at parameters `theta`.
pub fn reference_network(spec: &CournotNetworkSpec, theta: &[f64], cfg: &ReferenceConfig) -> Result<ReferenceSolution> {
    spec.validate()?;
    check_dim(2 * spec.n_nodes, theta.len())?;
    let set: ProductSet = spec.strategy_set()?;
    let f = |x: &[f64]| spec.eval_map(x, theta).expect("dimensions checked");
    tikhonov_reference(&f, &set, spec.lipschitz(theta), cfg)
}

/// Reference equilibrium of a single market at the learned coefficient `theta`,
/// solved on the joint map without the aggregate reduction.
pub fn reference_single_market(
    spec: &SingleMarketCournotSpec,
    theta: f64,
    cfg: &ReferenceConfig,
) -> Result<ReferenceSolution> {
    spec.validate()?;
    let set = spec.strategy_set();
    let f = |x: &[f64]| spec.eval_map(x, theta).expect("dimensions checked");
    let price = spec.price_at(theta);
    let upper: f64 = spec.upper.iter().sum();
    // Bound on the Jacobian norm over the box: curvature plus (N+1)|p'| + N|p''|·max x.
    let umax = spec.upper.iter().copied().fold(0.0, f64::max);
    let lower: f64 = spec.lower.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let n = spec.n_firms() as f64;
    let slope = price.slope(upper).abs().max(price.slope(lower).abs());
    let curv = price.curvature(upper).abs().max(price.curvature(lower).abs());
    let lip = spec.max_cost_curvature() + (n + 1.0) * slope + n * curv * umax;
    tikhonov_reference(&f, &set, lip, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{CostModel, LearnTarget, NodeMarket, NoiseKind, NoiseModel, PriceModel, ThetaBox};

    #[test]
    fn symmetric_market_closed_form() {
        for n in [1usize, 2, 5, 8] {
            let spec = SingleMarketCournotSpec::new(
                vec![CostModel::Linear { c: 0.0 }; n],
                vec![0.01; n],
                vec![5.0; n],
                PriceModel::Linear { a: 3.0, b: 1.0 },
                ThetaBox::scalar(1.0, 5.0).unwrap(),
                LearnTarget::A,
            )
            .unwrap();
            let r = reference_single_market(&spec, 3.0, &ReferenceConfig::default()).unwrap();
            let want = 3.0 / (n as f64 + 1.0);
            assert!(r.x.iter().all(|x| (x - want).abs() < 1e-10), "{n}: {:?}", r.x);
            assert!(r.residual <= 1e-12);
        }
    }

    #[test]
    fn monopoly_network() {
        let spec = CournotNetworkSpec {
            n_firms: 1,
            n_nodes: 1,
            unit_costs: vec![vec![10.0]],
            caps: vec![vec![30.0]],
            nodes: vec![NodeMarket { a: 100.0, b: 2.0 }],
            noise: vec![NoiseModel::none(NoiseKind::Additive)],
            theta_box: ThetaBox::new(vec![40.0, 0.8], vec![180.0, 3.5]).unwrap(),
        };
        let r = reference_network(&spec, &spec.theta_star(), &ReferenceConfig::default()).unwrap();
        assert!((r.x[0] - 22.5).abs() < 1e-10 && (r.x[1] - 22.5).abs() < 1e-10, "{:?}", r.x);
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn bad_ladder_rejected() {
        let cfg = ReferenceConfig { ladder: vec![1e-6, 1e-4], ..ReferenceConfig::default() };
        let set = crate::vi::BoxSet::cube(1, 0.0, 1.0).unwrap();
        assert!(tikhonov_reference(&|x: &[f64]| x.to_vec(), &set, 1.0, &cfg).is_err());
    }
}
