use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{
    CournotNetworkSpec, Instance, LearnTarget, NodeMarket, NoiseKind, NoiseModel, PriceModel, SingleMarketCournotSpec,
    ThetaBox,
};
use crate::rng::{stream_rng, Stream};

/// Lower output bound of the first firm when a one-node network is turned
/// into a single market; keeps every aggregate estimate positive.
pub const FIRST_FIRM_LOWER: f64 = 1.0;

/// Random network: `a ~ U[80,120]`, `b ~ U[1,3]`, `c ~ U[5,15]`,
/// `cap ~ U[20,40]`, and a parameter box `[θ*·U[0.2,0.45], θ*·U[1.55,2]]`.
/// Every node carries additive noise `U[−a/2, a/2]`.
pub fn generate_instance(n_firms: usize, n_nodes: usize, seed: u64) -> Result<Instance> {
    if n_firms == 0 || n_nodes == 0 {
        return Err(Error::InvalidParameter("need at least one firm and one node".into()));
    }
    let mut rng = stream_rng(seed, Stream::Instance, 0, 0);
    let nodes: Vec<NodeMarket> =
        (0..n_nodes).map(|_| NodeMarket { a: rng.gen_range(80.0..120.0), b: rng.gen_range(1.0..3.0) }).collect();
    let unit_costs: Vec<Vec<f64>> =
        (0..n_firms).map(|_| (0..n_nodes).map(|_| rng.gen_range(5.0..15.0)).collect()).collect();
    let caps: Vec<Vec<f64>> = (0..n_firms).map(|_| (0..n_nodes).map(|_| rng.gen_range(20.0..40.0)).collect()).collect();
    let mut lower = Vec::with_capacity(2 * n_nodes);
    let mut upper = Vec::with_capacity(2 * n_nodes);
    for m in &nodes {
        for v in [m.a, m.b] {
            lower.push(v * rng.gen_range(0.2..0.45));
            upper.push(v * rng.gen_range(1.55..2.0));
        }
    }
    let noise =
        nodes.iter().map(|m| NoiseModel::new(NoiseKind::Additive, m.a / 2.0, seed)).collect::<Result<Vec<_>>>()?;
    let spec = CournotNetworkSpec {
        n_firms,
        n_nodes,
        unit_costs,
        caps,
        nodes,
        noise,
        theta_box: ThetaBox::new(lower, upper)?,
    };
    spec.validate()?;
    Ok(Instance::network(spec, Some(seed)))
}

/// Single market from a one-node network, with [`FIRST_FIRM_LOWER`] as the
/// first firm's lower bound and zero for the rest.
pub fn single_market_from(network: &CournotNetworkSpec, target: LearnTarget) -> Result<SingleMarketCournotSpec> {
    let mut lower = vec![0.0; network.n_firms];
    lower[0] = FIRST_FIRM_LOWER;
    network.to_single_market(target, lower)
}

/// The same market with a power price `a − bX^σ`.
pub fn with_power_price(spec: &SingleMarketCournotSpec, sigma: f64) -> Result<SingleMarketCournotSpec> {
    let mut s = spec.clone();
    s.price = PriceModel::Power { a: spec.price.a(), b: spec.price.b(), sigma };
    s.validate()?;
    Ok(s)
}

/// Uniform noise of half width `fraction·θ*` on the learned coefficient.
pub fn market_noise(spec: &SingleMarketCournotSpec, fraction: f64, seed: u64) -> Result<NoiseModel> {
    NoiseModel::new(NoiseKind::for_target(spec.learn_target), fraction * spec.theta_star(), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vi::ConvexSet;

    #[test]
    fn generated_instances_validate_and_repeat() {
        let a = generate_instance(5, 1, 3).unwrap();
        let b = generate_instance(5, 1, 3).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = generate_instance(5, 1, 4).unwrap();
        assert_ne!(a, c);
        let net = a.network_spec().unwrap();
        assert_eq!((net.n_firms, net.n_nodes), (5, 1));
    }

    #[test]
    fn multi_node_projection_is_feasible() {
        let inst = generate_instance(5, 5, 11).unwrap();
        let net = inst.network_spec().unwrap();
        let set = net.strategy_set().unwrap();
        let mut rng = stream_rng(1, Stream::Sampling, 0, 0);
        let y: Vec<f64> = (0..set.dim()).map(|_| rng.gen_range(-50.0..80.0)).collect();
        assert!(set.contains(&set.project(&y), 1e-9));
    }

    #[test]
    fn single_market_conversion() {
        let net = generate_instance(4, 1, 2).unwrap().network_spec().unwrap().clone();
        let s = single_market_from(&net, LearnTarget::B).unwrap();
        assert_eq!(s.theta_star(), net.nodes[0].b);
        assert!(generate_instance(4, 2, 2)
            .unwrap()
            .network_spec()
            .map(|n| single_market_from(n, LearnTarget::A))
            .unwrap()
            .is_err());
        assert!(with_power_price(&single_market_from(&net, LearnTarget::A).unwrap(), 1.1).is_ok());
        assert!(with_power_price(&single_market_from(&net, LearnTarget::A).unwrap(), 2.0).is_ok());
        let big = generate_instance(6, 1, 2).unwrap().network_spec().unwrap().clone();
        assert!(with_power_price(&single_market_from(&big, LearnTarget::A).unwrap(), 2.0).is_err());
    }
}
