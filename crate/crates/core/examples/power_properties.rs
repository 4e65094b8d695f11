//! Faithfulness, monotonicity, convexity and tensor behaviour of the
//! generating power on random instances.

use channel_resource::objects::FreeChannelClass;
use channel_resource::power::property_suite;
use channel_resource::random::{random_channel, random_class_channel, Rng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = Rng::new(3);
    let mio = FreeChannelClass::mio(2);
    for trial in 0..3 {
        let n1 = random_channel(&mut rng, 2, 2);
        let n2 = random_channel(&mut rng, 2, 3);
        let m1 = random_class_channel(&mut rng, &mio)?;
        let m2 = random_class_channel(&mut rng, &mio)?;
        let p = rng.uniform();
        let report = property_suite(&n1, &n2, &m1, &m2, p, 1e-6, 1e-8)?;
        println!("trial {trial} (p = {p:.3}): all passed = {}", report.passed());
        for c in &report.checks {
            println!(
                "  {:<4} {:>10.6} <= {:>10.6}  [{}]",
                c.clause.label(),
                c.lhs,
                c.rhs,
                c.witness
            );
        }
    }
    Ok(())
}
