use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coexlab_core::census::{base_z, psi_formula, psi_part, representatives_221, BaseRing};
use coexlab_core::equivalence::orbit_partition;
use coexlab_core::extremal::{extremal_group, lower_central_matches, power_lemma_failures};
use coexlab_core::group::{class, exponent_log, FiniteGroup};
use coexlab_core::graded::HomLayout;
use coexlab_core::persist::{run_census, PartitionChoice};
use coexlab_core::residue::is_prime;
use coexlab_core::verify::{verify_all, Fault, Status, SUITES};
use coexlab_core::Error;

#[derive(Parser)]
#[command(name = "coexlab", version, about = "Census and verification of nilpotent Lie rings and p-groups of coexponent 3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the census for one partition of the coexponent, or all of them.
    Census {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
        /// 1,1,1 | 2,1 | 3 | all
        #[arg(long)]
        partition: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suites; exit 1 on any mismatch.
    Verify {
        #[arg(long = "p")]
        primes: Vec<u64>,
        #[arg(long)]
        skip: Vec<String>,
        /// Deliberately corrupt an input (only "reps" is known).
        #[arg(long = "inject-fault")]
        inject_fault: Option<String>,
    },
    /// Compare the closed formula with the assembled census count.
    Formula {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u32,
    },
    /// Build the class-(f+1) group of coexponent f and report its invariants.
    Extremal {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: usize,
        #[arg(long)]
        n: u32,
    },
    /// Orbit partition of the nilpotent derivations for V, W or X.
    Orbit {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        p: u64,
    },
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotPrime(_) => Failure::Usage("p must be prime".into()),
            Error::ParameterViolation(_) | Error::UnsupportedPartition(_) => Failure::Usage(e.to_string()),
            other => Failure::Mismatch(other.to_string()),
        }
    }
}

fn require_prime(p: u64) -> Result<(), Failure> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Failure::Usage("p must be prime".into()))
    }
}

fn census(p: u64, n: u32, partition: &str, out: Option<PathBuf>) -> Result<(), Failure> {
    require_prime(p)?;
    let choice = PartitionChoice::parse(partition)
        .ok_or_else(|| Failure::Usage(format!("unknown partition {partition}; use 1,1,1, 2,1, 3 or all")))?;
    let file = run_census(p, n, &choice)?;
    if let Some(path) = out {
        std::fs::write(&path, file.to_json()).map_err(|e| Failure::Mismatch(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {} records to {}", file.records.len(), path.display());
    }
    println!("{}", file.summary());
    Ok(())
}

fn verify(primes: Vec<u64>, skip: Vec<String>, fault: Option<String>) -> Result<(), Failure> {
    let primes = if primes.is_empty() { vec![5] } else { primes };
    for &p in &primes {
        require_prime(p)?;
        if p < 5 {
            return Err(Failure::Usage(format!("p = {p} must be at least 5")));
        }
    }
    if let Some(s) = skip.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Failure::Usage(format!("unknown suite {s}; suites are {}", SUITES.join(", "))));
    }
    let fault = match fault.as_deref() {
        None => None,
        Some("reps") => Some(Fault::Reps),
        Some(other) => return Err(Failure::Usage(format!("unknown fault {other}"))),
    };
    let outcomes = verify_all(&primes, &skip, fault, |o| {
        let head = format!("[p={}] {:<10}", o.p, o.suite);
        match &o.status {
            Status::Passed => println!("{head} pass  {} ({:.1}s)", o.detail, o.seconds),
            Status::Skipped => println!("{head} skipped"),
            Status::Failed(msgs) => {
                println!("{head} FAIL  ({:.1}s)", o.seconds);
                for m in msgs {
                    println!("    {m}");
                }
            }
        }
    });
    let failed = outcomes.iter().filter(|o| o.failed()).count();
    if failed == 0 {
        println!("all suites passed");
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{failed} suite(s) failed")))
    }
}

fn formula(p: u64, n: u32) -> Result<(), Failure> {
    require_prime(p)?;
    let closed = psi_formula(p, n)?;
    let parts = [vec![1, 1, 1], vec![2, 1], vec![3]];
    let mut total = 0;
    for part in &parts {
        let c = psi_part(p, n, part)?;
        let note = if part == &vec![1, 1, 1] { " (cited)" } else { "" };
        println!("{:?}: {c}{note}", part);
        total += c;
    }
    println!("assembled {total}, closed formula {closed}");
    if total == closed {
        Ok(())
    } else {
        Err(Failure::Mismatch("assembled count differs from the closed formula".into()))
    }
}

fn extremal(p: u64, f: usize, n: u32) -> Result<(), Failure> {
    require_prime(p)?;
    let (one, two) = extremal_group(p, f, n)?;
    let (c, e) = (class(&two)?, exponent_log(&two)?);
    println!("order p^{}, exponent p^{e}, coexponent {}, class {c}", two.order_log(), two.order_log() - e);
    let lcs = lower_central_matches(&one)?;
    let lcs_ok = lcs.iter().all(|&(_, ok)| ok);
    println!("lower central series of the semidirect product matches ⟨x_i, ..., x_{}⟩: {lcs_ok}", f + 1);
    let lemma = if one.order_log() <= 7 {
        let bad = power_lemma_failures(&one);
        println!("power lemma failures: {}", bad.len());
        bad.is_empty()
    } else {
        true
    };
    if c == f + 1 && two.order_log() - e == f as u32 && lcs_ok && lemma {
        Ok(())
    } else {
        Err(Failure::Mismatch("extremal group invariants differ from class f + 1 and coexponent f".into()))
    }
}

fn orbit(ring: &str, p: u64) -> Result<(), Failure> {
    require_prime(p)?;
    if p < 5 {
        return Err(Failure::Usage(format!("p = {p} must be at least 5")));
    }
    let base = BaseRing::parse(ring).ok_or_else(|| Failure::Usage(format!("unknown ring {ring}; use V, W or X")))?;
    let u = base.ring(p);
    let partition = orbit_partition(&u, &base_z(p))?;
    println!("{}: {} nilpotent derivations, {} orbits (expected {})", base.name(), partition.states.len(), partition.class_count(), base.expected_classes(p));
    let mut sizes = partition.sizes.clone();
    sizes.sort_unstable();
    println!("orbit sizes {sizes:?}");
    let layout = HomLayout::new(u.ty());
    for rep in representatives_221(p).into_iter().filter(|r| r.base == base) {
        let class = partition.class_of_code(layout.encode(rep.sigma.entries()));
        println!("  {:?} -> orbit {}", rep.sigma.rows(), class.map_or("none".into(), |c| c.to_string()));
    }
    if partition.class_count() == base.expected_classes(p) {
        Ok(())
    } else {
        Err(Failure::Mismatch("orbit count differs from the expected value".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Census { p, n, partition, out } => census(p, n, &partition, out),
        Command::Verify { primes, skip, inject_fault } => verify(primes, skip, inject_fault),
        Command::Formula { p, n } => formula(p, n),
        Command::Extremal { p, f, n } => extremal(p, f, n),
        Command::Orbit { ring, p } => orbit(&ring, p),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
