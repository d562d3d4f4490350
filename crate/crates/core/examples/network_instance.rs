//! Generates a networked Cournot instance, round-trips it through JSON and
//! computes its reference equilibrium at the true parameters.
//!
//! `cargo run --example network_instance -- [firms] [nodes] [seed]`

use nash_learn::bench::generate_instance;
use nash_learn::bench::{reference_network, ReferenceConfig};
use nash_learn::game::Instance;

fn main() -> nash_learn::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n, w, seed) = (
        args.first().copied().unwrap_or(3) as usize,
        args.get(1).copied().unwrap_or(2) as usize,
        args.get(2).copied().unwrap_or(1),
    );
    let inst = generate_instance(n, w, seed)?;
    let path = std::env::temp_dir().join(format!("nash_learn_instance_{n}x{w}_{seed}.json"));
    inst.save(&path)?;
    let back = Instance::load(&path)?;
    assert_eq!(back.to_json()?, inst.to_json()?);
    println!("instance written to {}", path.display());

    let net = back.network_spec()?;
    for (i, m) in net.nodes.iter().enumerate() {
        println!("node {i}: p = {:.3} − {:.3}·S", m.a, m.b);
    }
    let sol = reference_network(net, &net.theta_star(), &ReferenceConfig::default())?;
    println!("reference residual {:.2e}", sol.residual);
    let sales = net.node_sales(&sol.x);
    for (i, (m, s)) in net.nodes.iter().zip(&sales).enumerate() {
        println!("node {i}: total sales {s:.4}, price {:.4}", m.a - m.b * s);
    }
    let bd = net.block_dim();
    for f in 0..net.n_firms {
        let x = &sol.x[f * bd..(f + 1) * bd];
        println!("firm {f}: sales {:.3?} generation {:.3?}", &x[..w], &x[w..]);
    }
    Ok(())
}
