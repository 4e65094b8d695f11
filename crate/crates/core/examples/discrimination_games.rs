//! Discriminating a channel from free channels: a two-channel game, the game
//! against a whole class, the best incoherent probe and the advantage of a
//! coherent probe.

use channel_resource::discrimination::{advantage, helstrom, p_succ_free_probes, p_succ_vs_class};
use channel_resource::objects::{ClassTag, DensityMatrix, QuantumChannel};
use channel_resource::random::{random_channel, random_pure_state, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = 1e-8;
    let h = QuantumChannel::hadamard();
    let zero = DensityMatrix::basis(2, 0);

    let two = helstrom(&h, &QuantumChannel::dephasing(2), &zero)?;
    println!("hadamard vs dephasing, probe |0>: {:.6}", two.p_succ);

    for tag in ClassTag::ALL {
        let r = p_succ_vs_class(&h, tag, &zero, tol)?;
        let free = p_succ_free_probes(&h, tag, tol)?;
        println!(
            "hadamard vs {tag}: probe |0> {:.6} (gap {:.1e}), best incoherent probe {:.6}",
            r.p_succ, r.certificate_gap, free.value
        );
    }

    let mut rng = Rng::new(4);
    let n = random_channel(&mut rng, 2, 2);
    for _ in 0..3 {
        let rho = random_pure_state(&mut rng, 2);
        let a = advantage(&n, ClassTag::Mio, &rho, tol)?;
        println!(
            "advantage {:+.6} <= {:.6}; p {:.6} <= {:.6}",
            a.advantage, a.bound, a.p_succ_probe, a.total_bound
        );
    }
    Ok(())
}
