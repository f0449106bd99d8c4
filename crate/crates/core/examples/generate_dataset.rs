//! Writes a synthetic dataset (manifest plus one payload per sequence).
//!
//! ```text
//! cargo run -p vsem --example generate_dataset -- /tmp/vsem-data
//! ```

use vsem::{generate_synthetic, Dataset, SyntheticConfig};

fn main() -> vsem::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "vsem-data".into());
    let config = SyntheticConfig::default();
    let data = generate_synthetic(&config)?;
    let manifest = data.write(&dir)?;

    let reloaded = Dataset::load(&manifest)?;
    assert_eq!(reloaded, data);
    println!(
        "{} sequences of {} frames ({}-d) written to {}",
        data.sequences.len(),
        config.frames_per_sequence,
        data.dimension,
        manifest.display()
    );
    for (id, label) in data.labels().iter().take(4) {
        println!(
            "  {id}: {} / {} (discriminative view: {})",
            label.genus_label, label.instance_id, label.has_differentia
        );
    }
    Ok(())
}
