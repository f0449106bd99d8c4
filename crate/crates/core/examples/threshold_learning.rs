//! Learns the diversity threshold from labeled distances as they arrive.

use vsem::threshold::{candidates, objective};
use vsem::SupervisionStore;

fn main() -> vsem::Result<()> {
    let answers = [
        (0.4, true),
        (3.1, false),
        (1.2, true),
        (2.0, false),
        (1.7, true),
        (2.4, true),
        (0.9, false),
    ];
    let mut store = SupervisionStore::new();
    println!("{:>6} {:>6} {:>8} {:>7}", "delta", "same", "theta", "correct");
    for (delta, same_genus) in answers {
        store.record(delta, same_genus)?;
        let theta = store.update_theta();
        println!(
            "{delta:>6} {same_genus:>6} {theta:>8.3} {:>4}/{}",
            objective(store.pairs(), theta),
            store.len()
        );
    }

    println!("\nobjective at every candidate:");
    for c in candidates(store.pairs()) {
        println!("  {c:>6.3} -> {}", objective(store.pairs(), c));
    }
    Ok(())
}
