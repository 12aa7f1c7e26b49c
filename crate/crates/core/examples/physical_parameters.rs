//! Medium parameters to reduced couplings.

use raman_multiplex::{derive_couplings, PhysicalConfig};

fn main() -> raman_multiplex::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/physical.json"))
        .expect("sample config");
    let doc: serde_json::Value = serde_json::from_str(&text)?;
    let cfg: PhysicalConfig = serde_json::from_value(doc["parameters"]["physical"].clone())?;
    let d = derive_couplings(&cfg, false)?;
    println!("{}", serde_json::to_string_pretty(&d.params)?);
    println!("Δk = {:.6}, g·L/c = {:.6}", d.phase_mismatch, d.params.rate() * d.params.time);
    for w in &d.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
