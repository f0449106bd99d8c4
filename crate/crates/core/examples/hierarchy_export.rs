//! Teaches a memory with full supervision and prints its hierarchy as a tree
//! and as JSON.

use std::sync::Arc;

use vsem::{
    export_hierarchy, generate_synthetic, process_encounter, Memory, PerceptionConfig, SupervisionSource,
    SyntheticConfig,
};

fn main() -> vsem::Result<()> {
    let config = SyntheticConfig {
        num_genera: 3,
        sequences_with_differentia: 2,
        sequences_without_differentia: 1,
        ..Default::default()
    };
    let data = generate_synthetic(&config)?;
    let mut user = SupervisionSource::new(1.0, 0, Arc::new(data.labels().into_iter().collect()))?;
    let mut memory = Memory::new();
    for seq in &data.sequences {
        let encounter = PerceptionConfig::default().perceive(&seq.sequence_id, &seq.frames)?;
        process_encounter(&mut memory, encounter, &mut user)?;
    }

    let view = export_hierarchy(&memory, memory.theta())?;
    print!("{}", view.render_tree());
    println!("{}", serde_json::to_string_pretty(&view).expect("hierarchy serializes"));
    Ok(())
}
