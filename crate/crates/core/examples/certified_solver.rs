//! The certified trace-norm solver on its own: distance from a state to the
//! diagonal states, with the dual bound, witness and iteration log, and the
//! projection of a channel onto a free class.

use channel_resource::convex::{minimize_trace_norm, project_channel_class, AffineHermitian, ConvexProblem, LinearEquality};
use channel_resource::linalg::re;
use channel_resource::objects::{is_dio, FreeChannelClass};
use channel_resource::random::{random_channel, random_density_matrix, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = Rng::new(7);
    let d = 3;
    let rho = random_density_matrix(&mut rng, d);

    // minimize ‖ρ − diag(x)‖₁ over probability vectors x
    let mut map = AffineHermitian::zero(d);
    let mut cone = AffineHermitian::zero(d);
    for i in 0..d {
        map.push(i, i, i, re(1.0));
        cone.push(i, i, i, re(1.0));
    }
    let mut problem = ConvexProblem::new(d, rho.matrix().clone(), map);
    problem.cone_constraints.push(cone);
    problem.equalities.push(LinearEquality::new((0..d).map(|i| (i, 1.0)).collect(), 1.0));
    let sol = minimize_trace_norm(&problem, 1e-8)?;
    println!(
        "value {:.10}  lower bound {:.10}  gap {:.1e}  iterations {}",
        sol.primal_value, sol.dual_bound, sol.gap, sol.iterations
    );
    println!("minimizer {:?}", sol.minimizer);
    sol.write_log_csv(std::io::stdout())?;

    let class = FreeChannelClass::dio(2);
    let ch = random_channel(&mut rng, 2, 2);
    let projected = project_channel_class(ch.choi(), &class, 1e-10)?;
    println!("\nprojected channel is DIO: {}", is_dio(&projected, 1e-8));
    Ok(())
}
