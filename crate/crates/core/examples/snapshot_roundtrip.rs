//! Saves a taught memory, reloads it and keeps teaching from where it left off.

use std::sync::Arc;

use vsem::{
    generate_synthetic, process_encounter, snapshot, Memory, PerceptionConfig, SupervisionSource, SyntheticConfig,
};

fn main() -> vsem::Result<()> {
    let data = generate_synthetic(&SyntheticConfig::default())?;
    let mut user = SupervisionSource::new(1.0, 5, Arc::new(data.labels().into_iter().collect()))?;
    let perception = PerceptionConfig::default();
    let (first, rest) = data.sequences.split_at(data.sequences.len() / 2);

    let mut memory = Memory::new();
    for seq in first {
        process_encounter(
            &mut memory,
            perception.perceive(&seq.sequence_id, &seq.frames)?,
            &mut user,
        )?;
    }
    let path = std::env::temp_dir().join("vsem-snapshot-example.json");
    snapshot::save(&memory, &path)?;
    let mut restored = snapshot::load(&path)?;
    assert_eq!(restored, memory);
    println!(
        "saved {} objects at iteration {} ({} bytes) to {}",
        memory.len(),
        memory.iteration(),
        std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0),
        path.display()
    );

    for seq in rest {
        process_encounter(
            &mut restored,
            perception.perceive(&seq.sequence_id, &seq.frames)?,
            &mut user,
        )?;
    }
    println!(
        "after the second half: {} objects, theta {:.3}",
        restored.len(),
        restored.theta()
    );
    Ok(())
}
