//! Generating power of a channel, the search for its increasing power, and
//! the closed form for qubit unitaries.

use channel_resource::measures::{DistanceMeasure, FreeStateSet};
use channel_resource::objects::QuantumChannel;
use channel_resource::power::{generating_power, increasing_power_search, qubit_unitary_power, SearchSettings};
use channel_resource::random::{haar_unitary, random_channel, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = 1e-8;
    let mut rng = Rng::new(2);
    let channels = [
        ("hadamard", QuantumChannel::hadamard()),
        ("dephasing", QuantumChannel::dephasing(2)),
        ("random qubit", random_channel(&mut rng, 2, 2)),
    ];
    let settings = SearchSettings {
        restarts: 16,
        basis_starts: false,
        ..Default::default()
    };
    for (name, ch) in &channels {
        println!("{name}");
        for m in DistanceMeasure::ALL {
            let g = generating_power(ch, m, FreeStateSet::Incoherent(2), tol)?;
            let s = increasing_power_search(ch, m, &settings, tol)?;
            println!(
                "  {:<8} generating {:.6} (basis state {})  search {:.6}",
                m.as_str(),
                g.generating,
                g.argmax,
                s.value
            );
        }
    }

    println!("\nqubit unitaries: closed form vs solver");
    for _ in 0..5 {
        let u = haar_unitary(&mut rng, 2);
        let ch = QuantumChannel::unitary(&u)?;
        let solver = generating_power(&ch, DistanceMeasure::TraceDistance, FreeStateSet::Incoherent(2), tol)?;
        println!("  {:.9}  {:.9}", qubit_unitary_power(&u)?, solver.generating);
    }
    Ok(())
}
