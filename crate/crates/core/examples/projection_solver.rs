//! Projection method on a strongly monotone affine duopoly, plus projection
//! onto a firm's sales/generation polyhedron.
//!
//! `cargo run --example projection_solver`

use nalgebra::{DMatrix, DVector};
use nash_learn::game::{AffineGame, Game};
use nash_learn::vi::{
    contraction_factor, natural_residual, project_firm_polyhedron, solve_vi_projection, BoxSet, ContractionParams,
    FirmPolyhedron, SolverConfig,
};

fn main() -> nash_learn::Result<()> {
    // Duopoly with p = 3 − X and zero costs: F(x) = A x − 3e.
    let game = AffineGame::new(
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]),
        DMatrix::from_element(2, 1, -1.0),
        DVector::zeros(2),
        vec![BoxSet::cube(1, 0.0, 3.0)?, BoxSet::cube(1, 0.0, 3.0)?],
    )?;
    let (mu, lip) = (game.strong_monotonicity(), game.lipschitz());
    let params = ContractionParams::optimal(mu, lip)?;
    println!("mu = {mu}, L = {lip}, gamma = {:.4}, q = {:.4}", params.gamma, contraction_factor(&params));

    let f = |x: &[f64]| game.joint_map(x, &[3.0]);
    let set = game.joint_set();
    let report = solve_vi_projection(&f, &set, &[0.0, 0.0], &params, &SolverConfig::default())?;
    println!(
        "equilibrium {:?} after {} iterations, residual {:.2e}",
        report.solution,
        report.iterations,
        natural_residual(&f, &set, &report.solution, 1.0)
    );

    // Sales s and generation g over three nodes with capacities 2, 1, 4.
    let firm = FirmPolyhedron::new(vec![2.0, 1.0, 4.0])?;
    let y = [3.0, -1.0, 2.0, 5.0, 0.5, -2.0];
    let p = project_firm_polyhedron(&firm, &y)?;
    let (s, g) = p.split_at(3);
    println!("projection of {y:?}: sales {s:.4?}, generation {g:.4?}");
    println!("balance sum(s) - sum(g) = {:.2e}", s.iter().sum::<f64>() - g.iter().sum::<f64>());
    Ok(())
}
