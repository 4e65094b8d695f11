//! With diagonal measurements only, no channel can be told apart from the
//! free classes: the replacement channel onto the dephased output matches
//! every outcome distribution.

use channel_resource::discrimination::{p_succ_incoherent_povm, verify_incoherent_povm_collapse, GameClass};
use channel_resource::objects::{DensityMatrix, QuantumChannel};
use channel_resource::random::{random_channel, random_density_matrix, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = QuantumChannel::hadamard();
    let r = p_succ_incoherent_povm(&h, &QuantumChannel::dephasing(2), &DensityMatrix::basis(2, 0))?;
    println!("hadamard vs dephasing with a diagonal POVM: {:.6}", r.p_succ);

    let mut rng = Rng::new(5);
    for _ in 0..3 {
        let n = random_channel(&mut rng, 2, 2);
        let rho = random_density_matrix(&mut rng, 2);
        for class in GameClass::ALL {
            let rep = verify_incoherent_povm_collapse(&n, class, &rho, 1e-8)?;
            println!(
                "  {class:<3} witness {:.10} in class {} solver {:?} passed {}",
                rep.witness_value, rep.witness_in_class, rep.solver_value, rep.passed
            );
        }
    }
    Ok(())
}
