//! Distributed gradient response while learning every node's price
//! intercept and slope from noisy (sales, price) samples.
//!
//! `cargo run --release --example gradient_learning -- [steps] [seed]`

use nash_learn::bench::{checkpoints, generate_instance, reference_network, ReferenceConfig};
use nash_learn::game::build_learning_problem;
use nash_learn::gradient::{make_schedule, run_algorithm_one, NoiseSpec, RunOptions, ThetaGroup};

fn main() -> nash_learn::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let steps = args.first().copied().unwrap_or(10_000);
    let seed = args.get(1).copied().unwrap_or(1) as u64;

    let inst = generate_instance(5, 1, 1)?;
    let net = inst.network_spec()?;
    let theta_star = net.theta_star();
    let x_ref = reference_network(net, &theta_star, &ReferenceConfig::default())?.x;
    let mid = net.theta_box.midpoint();
    let initial: Vec<(f64, f64)> = (0..net.n_nodes).map(|i| (mid[2 * i], mid[2 * i + 1])).collect();
    let objective = build_learning_problem(net, 1e-3, &initial)?;
    let schedule = make_schedule(0.8, 0.6, (1, 200), net.n_firms, seed)?;
    let opts = RunOptions {
        theta_groups: vec![
            ThetaGroup { name: "err_a".into(), coords: vec![0] },
            ThetaGroup { name: "err_b".into(), coords: vec![1] },
        ],
        ..RunOptions::default()
    };
    let t = run_algorithm_one(net, &objective, &schedule, &NoiseSpec::none(), steps, seed, &x_ref, &theta_star, &opts)?;
    println!("{:>7} {:>10} {:>10} {:>10}", "k", "err_x", "err_a", "err_b");
    let ks = checkpoints(steps);
    for row in &t.rows {
        if ks.contains(&row.k) {
            let a = t.extra(row, "err_a").unwrap_or(f64::NAN);
            let b = t.extra(row, "err_b").unwrap_or(f64::NAN);
            println!("{:>7} {:>10.3e} {:>10.3e} {:>10.3e}", row.k, row.err_x, a, b);
        }
    }
    Ok(())
}
