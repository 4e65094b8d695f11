//! Distance-based coherence of a few states under every measure, plus the
//! PPT lower bound for a two-qubit state.

use channel_resource::measures::{c_l1, c_robustness, c_trace, e1_ppt_bound, omega, DistanceMeasure, FreeStateSet};
use channel_resource::objects::DensityMatrix;
use channel_resource::random::{random_density_matrix, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = 1e-8;
    let mut rng = Rng::new(1);
    let states = [
        ("|+>", DensityMatrix::plus()),
        ("max coherent (3)", DensityMatrix::maximally_coherent(3)),
        ("random qubit", random_density_matrix(&mut rng, 2)),
        ("random qutrit", random_density_matrix(&mut rng, 3)),
    ];
    println!("{:<18} {:>10} {:>10} {:>10} {:>10} {:>10}", "state", "C1", "C_l1", "C_R", "fidelity", "dmax");
    for (name, rho) in &states {
        let set = FreeStateSet::Incoherent(rho.dim());
        println!(
            "{:<18} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            name,
            c_trace(rho, tol)?.value,
            c_l1(rho),
            c_robustness(rho, tol)?.value,
            omega(DistanceMeasure::FidelityDistance, set, rho, tol)?.value,
            omega(DistanceMeasure::MaxRelativeEntropy, set, rho, tol)?.value,
        );
    }

    let bell = DensityMatrix::pure(&[
        channel_resource::linalg::re(std::f64::consts::FRAC_1_SQRT_2),
        channel_resource::linalg::re(0.0),
        channel_resource::linalg::re(0.0),
        channel_resource::linalg::re(std::f64::consts::FRAC_1_SQRT_2),
    ]);
    let e1 = e1_ppt_bound(&bell, (2, 2), 1e-6)?;
    println!("\nBell state: trace distance to PPT states >= {:.6} (lower bound only: {})", e1.value, e1.lower_bound_only);
    Ok(())
}
