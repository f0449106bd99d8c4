//! Splits an iteration into retrieval/prediction and feedback, the way an
//! interactive front end waits for a person between the two.

use vsem::{commit, generate_synthetic, Feedback, Memory, PendingEncounter, PerceptionConfig, SyntheticConfig};

fn main() -> vsem::Result<()> {
    let data = generate_synthetic(&SyntheticConfig::default())?;
    let perceive = |i: usize| {
        let s = &data.sequences[i];
        PerceptionConfig::default().perceive(&s.sequence_id, &s.frames)
    };
    let mut memory = Memory::new();

    // Nothing to compare against: stored directly.
    let first = PendingEncounter::prepare(&memory, perceive(0)?)?;
    commit(&mut memory, &first, Feedback::Unavailable)?;

    // Same instance, another sequence: ask and confirm.
    let second = PendingEncounter::prepare(&memory, perceive(1)?)?;
    let r = second.retrieved().expect("memory is not empty");
    println!(
        "retrieved {} at distance {:.4} ({:?}); model says same genus: {}, different: {}",
        r.object,
        r.distance,
        r.kind,
        second.predicted_same_genus(),
        second.predicted_different()
    );
    let d = commit(
        &mut memory,
        &second,
        Feedback::Answered {
            same_genus: true,
            different: Some(false),
        },
    )?;
    println!("{:?} into {}, theta now {:.4}", d.kind, d.object_id, d.theta);

    // A sequence of another genus, with nobody around to answer.
    let other = data
        .sequences
        .iter()
        .position(|s| s.label.genus_label != data.sequences[0].label.genus_label)
        .unwrap();
    let third = PendingEncounter::prepare(&memory, perceive(other)?)?;
    let d = commit(&mut memory, &third, Feedback::Unavailable)?;
    println!("{:?} as {} (supervised: {})", d.kind, d.object_id, d.supervised);

    // A prepared encounter is tied to the memory state it saw.
    let stale = PendingEncounter::prepare(&memory, perceive(2)?)?;
    commit(&mut memory, &stale, Feedback::Unavailable)?;
    assert!(commit(&mut memory, &stale, Feedback::Unavailable).is_err());
    println!("{} objects after {} iterations", memory.len(), memory.iteration());
    Ok(())
}
