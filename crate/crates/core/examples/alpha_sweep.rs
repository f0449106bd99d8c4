//! Learning curves at several supervision levels on a synthetic dataset.
//!
//! ```text
//! cargo run --release -p vsem --example alpha_sweep -- [runs] [out_dir]
//! ```

use vsem::{generate_synthetic, Experiment, RunConfig, SyntheticConfig};

fn main() -> vsem::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs = args.next().map_or(50, |s| s.parse().expect("runs must be an integer"));
    let out_dir = args.next();

    let data = generate_synthetic(&SyntheticConfig::default())?;
    let base = Experiment::new(
        &data,
        RunConfig {
            runs,
            ..Default::default()
        },
    )?;
    println!("{} encounters per run, {runs} runs", base.len());
    println!("alpha  genus(1st half)  genus(last 25%)  diff  diff+view  diff-view");
    for alpha in [0.1, 0.3, 0.5, 0.7, 1.0] {
        let curves = base.with_alpha(alpha)?.run()?;
        let (early, late) = (curves.first_half(), curves.final_quartile());
        println!(
            "{alpha:<5}  {:<15.3}  {:<15.3}  {:<4.3}  {:<9.3}  {:.3}",
            early.genus, late.genus, late.differentia, late.differentia_with_view, late.differentia_without_view
        );
        if let Some(dir) = &out_dir {
            curves.save_csv(dir)?;
        }
    }
    Ok(())
}
