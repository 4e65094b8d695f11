//! Reading and writing JSON channel specs, and the analysis report that the
//! `chanres analyze` command prints for them.

use channel_resource::harness::{analyze, RunConfig};
use channel_resource::objects::{ChannelSpec, QuantumChannel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ChannelSpec::from_channel(&QuantumChannel::hadamard(), Some("hadamard".into()));
    let json = spec.to_json();
    println!("{json}\n");

    let channel = ChannelSpec::from_json(&json)?.to_channel()?;
    let config = RunConfig {
        restarts: 4,
        ..Default::default()
    };
    let report = analyze("hadamard", &channel, &config)?;
    print!("{}", report.to_csv());

    let broken = r#"{"dim_in": 2, "dim_out": 2, "repr": "kraus", "data": [[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
    match ChannelSpec::from_json(broken)?.to_channel() {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("\nrejected: {e} (invariant {:?})", e.invariant()),
    }
    Ok(())
}
