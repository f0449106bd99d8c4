//! Splits one sequence into visual objects and prints their spans.

use vsem::{generate_synthetic, PerceptionConfig, SyntheticConfig};

fn main() -> vsem::Result<()> {
    let data = generate_synthetic(&SyntheticConfig::default())?;
    let seq = data
        .sequences
        .iter()
        .find(|s| s.label.has_differentia)
        .expect("dataset has differentia views");

    for config in [PerceptionConfig::default(), PerceptionConfig { window: 30, stride: 30 }] {
        let encounter = config.perceive(&seq.sequence_id, &seq.frames)?;
        println!(
            "{} ({} frames), window {} stride {}: {} visual objects",
            seq.sequence_id,
            seq.frames.len(),
            config.window,
            config.stride,
            encounter.visual_objects().len()
        );
        for vo in encounter.visual_objects() {
            let norm = vo.centroid.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
            println!(
                "  frames {:>3}..={:<3} |centroid| = {norm:.3}",
                vo.source.start, vo.source.end
            );
        }
    }
    Ok(())
}
