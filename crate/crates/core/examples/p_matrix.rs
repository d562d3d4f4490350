//! Principal-minor classification, applied to the Jacobians of the
//! fixed-point subproblems for both learning targets.
//!
//! `cargo run --example p_matrix`

use nalgebra::DMatrix;
use nash_learn::bench::{generate_instance, single_market_from};
use nash_learn::fixed_point::{classify_subproblem_jacobian, Belief, PriceObservation, Subproblem};
use nash_learn::game::LearnTarget;
use nash_learn::vi::check_p_matrix;

fn main() -> nash_learn::Result<()> {
    let rot = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    println!("identity: {:?}", check_p_matrix(&DMatrix::identity(3, 3))?);
    println!("rotation: {:?}", check_p_matrix(&rot)?);
    println!("swap:     {:?}", check_p_matrix(&swap)?);

    let net = generate_instance(4, 1, 7)?;
    for target in [LearnTarget::A, LearnTarget::B] {
        let spec = single_market_from(net.network_spec()?, target)?;
        let belief = Belief::initial(&spec);
        let obs = PriceObservation::new(spec.price.price(belief.aggregate()), 0, belief.aggregate());
        for k in [0, 10, 100] {
            let sub = Subproblem::new(&spec, k, &obs, &belief);
            let mut z = belief.x.clone();
            z.push(belief.theta);
            let eps = 1.0 / ((k + 1) as f64).sqrt();
            let (raw, reg) = classify_subproblem_jacobian(&sub.jacobian(&z), eps)?;
            println!("target {target:?}, k = {k:3}: raw {raw:?}, with {eps:.3}·I {reg:?}");
        }
    }
    Ok(())
}
