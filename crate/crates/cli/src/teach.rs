//! Terminal teaching: streams a dataset's sequences and asks the person at
//! the keyboard instead of a simulated user.

use std::cell::RefCell;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::Args;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsem::{
    process_encounter, snapshot, Dataset, DecisionKind, Encounter, Error, Memory, ObjectId, PerceptionConfig,
    Supervisor,
};

#[derive(Args)]
pub struct TeachArgs {
    /// Dataset manifest.
    #[arg(long)]
    dataset: PathBuf,
    /// Continue from this snapshot instead of an empty memory.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Where to save the memory when done.
    #[arg(long)]
    save: Option<PathBuf>,
    /// Shuffle the sequences with this seed instead of manifest order.
    #[arg(long)]
    shuffle: Option<u64>,
    /// Stop after this many sequences.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value_t = 50)]
    window: usize,
    #[arg(long, default_value_t = 15)]
    stride: usize,
}

/// Reads y/n answers; end of input means nobody is available any more.
struct Terminal<R> {
    input: RefCell<R>,
    closed: bool,
}

impl<R: BufRead> Terminal<R> {
    fn ask(&self, question: &str) -> vsem::Result<bool> {
        let mut input = self.input.borrow_mut();
        loop {
            print!("{question} [y/n] ");
            std::io::stdout().flush().ok();
            let mut line = String::new();
            if input.read_line(&mut line).map_err(|e| Error::io("stdin", e))? == 0 {
                return Err(Error::io(
                    "stdin",
                    std::io::Error::new(
                        std::io::ErrorKind::UnexpectedEof,
                        "input ended in the middle of a question",
                    ),
                ));
            }
            match line.trim().to_ascii_lowercase().as_str() {
                "y" | "yes" => return Ok(true),
                "n" | "no" => return Ok(false),
                _ => println!("please answer y or n"),
            }
        }
    }
}

impl<R: BufRead> Supervisor for Terminal<R> {
    fn available(&mut self, _iteration: u64) -> bool {
        if !self.closed {
            self.closed = self.input.get_mut().fill_buf().map_or(true, |b| b.is_empty());
        }
        !self.closed
    }

    fn same_genus(&self, object: ObjectId, encounter: &Encounter) -> vsem::Result<bool> {
        self.ask(&format!(
            "Is {} the same kind of object as {object}?",
            encounter.sequence_id()
        ))
    }

    fn different(&self, object: ObjectId, _encounter: &Encounter) -> vsem::Result<bool> {
        // Asked the human-friendly way round; "no, not the same one" means different.
        Ok(!self.ask(&format!("Is it the very same individual as {object}?"))?)
    }
}

pub fn teach(a: TeachArgs) -> vsem::Result<()> {
    let perception = PerceptionConfig {
        window: a.window,
        stride: a.stride,
    };
    perception.validate()?;
    let data = Dataset::load(&a.dataset)?;
    let mut memory = match &a.resume {
        Some(path) => snapshot::load(path)?,
        None => Memory::new(),
    };
    let mut order: Vec<usize> = (0..data.sequences.len()).collect();
    if let Some(seed) = a.shuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order.truncate(a.limit.unwrap_or(order.len()));

    let stdin = std::io::stdin();
    let mut user = Terminal {
        input: RefCell::new(stdin.lock()),
        closed: false,
    };
    for i in order {
        let seq = &data.sequences[i];
        let encounter = perception.perceive(&seq.sequence_id, &seq.frames)?;
        let d = process_encounter(&mut memory, encounter, &mut user)?;
        let what = match d.kind {
            DecisionKind::NewObject => "new object".to_string(),
            DecisionKind::NewObjectSameGenus => format!("new object of the same kind as {}", d.matched_object.unwrap()),
            DecisionKind::MergedIntoExisting => "seen before".to_string(),
        };
        println!(
            "{} -> {} {what}{}",
            seq.sequence_id,
            d.object_id,
            if d.supervised { "" } else { " (model's guess)" }
        );
    }
    println!();
    print!("{}", vsem::export_hierarchy(&memory, memory.theta())?.render_tree());
    if let Some(path) = a.save {
        snapshot::save(&memory, &path)?;
        println!("saved {}", path.display());
    }
    Ok(())
}
