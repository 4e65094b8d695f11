//! Searching for coherent probes that beat every incoherent probe, against
//! the exact classes and against the Kraus-certified SIO family.

use channel_resource::discrimination::{explore_coherent_probe_advantage, incoherent_probe_sandwich, GameClass};
use channel_resource::power::SearchSettings;
use channel_resource::random::{random_channel, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = 1e-8;
    let mut rng = Rng::new(6);
    let settings = SearchSettings {
        restarts: 4,
        iterations: 20,
        seed: 6,
        basis_starts: true,
    };
    for trial in 0..2 {
        let n = random_channel(&mut rng, 2, 2);
        let s = incoherent_probe_sandwich(&n, tol)?;
        println!(
            "channel {trial}: incoherent probes {:.6} (mio {:.6}, dio {:.6}, sio <= {:.6})",
            s.expected, s.mio, s.dio, s.sio_upper
        );
        for class in GameClass::ALL {
            let r = explore_coherent_probe_advantage(&n, class, &settings, &[], tol)?;
            println!(
                "  {class:<3} best probe value {:.6} after {} evaluations ({})",
                r.p_succ, r.evaluations, r.caveat
            );
        }
    }
    Ok(())
}
