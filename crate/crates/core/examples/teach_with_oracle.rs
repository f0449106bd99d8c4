//! One teaching run: every sequence once, with a simulated user who answers
//! 30% of the time after the first five encounters.

use std::sync::Arc;

use vsem::{
    generate_synthetic, process_encounter, DecisionKind, Memory, PerceptionConfig, SupervisionSource, SyntheticConfig,
};

fn main() -> vsem::Result<()> {
    let data = generate_synthetic(&SyntheticConfig::default())?;
    let labels = Arc::new(data.labels().into_iter().collect());
    let mut user = SupervisionSource::new(0.3, 42, labels)?;
    let mut memory = Memory::new();
    let perception = PerceptionConfig::default();

    let (mut merged, mut siblings, mut novel) = (0, 0, 0);
    for seq in &data.sequences {
        let encounter = perception.perceive(&seq.sequence_id, &seq.frames)?;
        let d = process_encounter(&mut memory, encounter, &mut user)?;
        match d.kind {
            DecisionKind::MergedIntoExisting => merged += 1,
            DecisionKind::NewObjectSameGenus => siblings += 1,
            DecisionKind::NewObject => novel += 1,
        }
        println!(
            "{:<10} {:<19} object {:<4} asked {:<5} theta {:.3}",
            seq.sequence_id,
            format!("{:?}", d.kind),
            d.object_id.to_string(),
            d.supervised,
            d.theta
        );
    }
    println!(
        "\n{} objects: {novel} new, {siblings} same-genus siblings, {merged} merges; {} answers recorded",
        memory.len(),
        memory.supervision().len()
    );
    Ok(())
}
