//! `growtree`: tables, sequences, boundary domains, profile tools and
//! sampling for growing binary trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use growtree::enumeration::catalan;
use growtree::oracle::{self, OracleReport};
use growtree::profiles::{count_trees, internal_profile, kraft_sum, truncate_profile};
use growtree::sampler::{entropy_bound, uniform_tree_traced, SampleRecord};
use growtree::sequences::{
    a_hat_seq, a_seq, b_seq, gamma, lambda_upper, ruler, s_area_formula, s_domain, CellSet,
};
use growtree::{BitSource, Profile};

#[derive(Parser, Debug)]
#[command(name = "growtree", version, about = "Growing binary trees: counts, boundaries, profiles and uniform sampling")]
struct Cli {
    /// Output encoding; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Csv,
    Plain,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of active growing trees with n internal nodes and 2k anchors,
    /// for n = 1..nmax. CSV: header `n,1..nmax`, one row per 2k, blank = 0.
    Table {
        #[arg(long)]
        nmax: usize,
    },
    /// Number of active growing trees of height h with n internal nodes and
    /// 2k anchors, in the same CSV layout.
    HeightTable {
        #[arg(long)]
        h: u32,
    },
    /// Boundary sequences of the count tables: `a` (largest anchor-pair
    /// count at n internal nodes), `b` (its run lengths), `ahat` and `bhat`
    /// (the ruler-function analogues bounding a single height).
    Seq {
        #[arg(value_enum)]
        which: SeqKind,
        #[arg(long)]
        nmax: usize,
    },
    /// Cells (n, k) of the support of the height-h table: `gamma` (right
    /// boundary), `lambda` (upper boundary), `cells` (whole support), `area`
    /// (its size, iterated and closed form).
    Domain {
        #[arg(value_enum)]
        which: DomainKind,
        #[arg(long)]
        h: u32,
    },
    /// Leaf-profile tools. A profile is the comma-separated list of leaf
    /// counts per level from the root, e.g. `0,0,2,4`.
    Profile {
        #[arg(value_enum)]
        action: ProfileAction,
        #[arg(long)]
        profile: String,
        /// Level kept by `truncate`; internal nodes just below it become leaves.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Uniform random binary trees with the given leaf profile. Each output
    /// record carries the seed and the number of random bits consumed.
    Sample {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Defaults to a fresh value from the operating system.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Brute-force cross-checks, one JSON line per comparison: `catalan`
    /// (column sums against Catalan numbers), `profile-count` (tree counts
    /// per profile), `histories` (exhaustive growth histories against the
    /// height tables).
    Oracle {
        #[arg(value_enum)]
        check: OracleCheck,
        /// Size bound: internal nodes for `catalan`, leaves for
        /// `profile-count`, steps for `histories`.
        #[arg(long)]
        max: Option<usize>,
    },
    /// Mean random bits per sample against the entropy of the profile.
    BenchBits {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SeqKind {
    A,
    B,
    Ahat,
    Bhat,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DomainKind {
    Gamma,
    Lambda,
    Cells,
    Area,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ProfileAction {
    Validate,
    Count,
    Internal,
    Truncate,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OracleCheck {
    Catalan,
    ProfileCount,
    Histories,
}

/// A domain failure: reported on stderr, exit status 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

const MAX_TABLE_N: usize = 2000;
const MAX_TABLE_HEIGHT: u32 = 10;
const MAX_DOMAIN_HEIGHT: u32 = 14;
const MAX_SEQ_N: usize = 1 << 24;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure(reason)) => {
            eprintln!("error: {reason}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Table { nmax } => table(*nmax, cli.format),
        Command::HeightTable { h } => height_table(*h, cli.format),
        Command::Seq { which, nmax } => seq(*which, *nmax, cli.format),
        Command::Domain { which, h } => domain(*which, *h, cli.format),
        Command::Profile {
            action,
            profile,
            level,
        } => profile_cmd(*action, profile, *level, cli.format),
        Command::Sample {
            profile,
            count,
            seed,
        } => sample(profile, *count, *seed, cli.format),
        Command::Oracle { check, max } => oracle_cmd(*check, *max),
        Command::BenchBits {
            profile,
            samples,
            seed,
        } => bench_bits(profile, *samples, *seed),
    }
}

fn bounded<T: PartialOrd + std::fmt::Display>(what: &str, value: T, lo: T, hi: T) -> Result<(), Failure> {
    if value < lo || value > hi {
        return Err(Failure(format!("{what} = {value} is outside {lo}..={hi}")));
    }
    Ok(())
}

fn reject_format(format: Option<Format>, allowed: &[Format]) -> Result<(), Failure> {
    match format {
        Some(f) if !allowed.contains(&f) => Err(Failure(format!(
            "format {f:?} is not available here (use one of {allowed:?})"
        ))),
        _ => Ok(()),
    }
}

fn table(nmax: usize, format: Option<Format>) -> Outcome {
    bounded("nmax", nmax, 1, MAX_TABLE_N)?;
    reject_format(format, &[Format::Csv, Format::Json])?;
    let t = growtree::t_table(nmax);
    Ok(match format {
        Some(Format::Json) => {
            let cells: Vec<_> = t
                .entries()
                .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                .map(|((n, k), v)| json!({"n": n, "two_k": 2 * k, "count": v.to_string()}))
                .collect();
            format!("{}\n", json!({"n_max": nmax, "cells": cells}))
        }
        _ => t.to_csv(),
    })
}

fn height_table(h: u32, format: Option<Format>) -> Outcome {
    bounded("h", h, 1, MAX_TABLE_HEIGHT)?;
    reject_format(format, &[Format::Csv, Format::Json])?;
    let t = growtree::t_height_table(h);
    Ok(match format {
        Some(Format::Json) => {
            let cells: Vec<_> = t
                .entries()
                .iter()
                .map(|(&(n, k), v)| json!({"n": n, "two_k": 2 * k, "count": v.to_string()}))
                .collect();
            format!("{}\n", json!({"h": h, "cells": cells}))
        }
        _ => t.to_csv(),
    })
}

fn seq(which: SeqKind, nmax: usize, format: Option<Format>) -> Outcome {
    bounded("nmax", nmax, 1, MAX_SEQ_N)?;
    reject_format(format, &[Format::Csv, Format::Json, Format::Plain])?;
    let values: Vec<u64> = match which {
        SeqKind::A => a_seq(nmax).values().to_vec(),
        SeqKind::B => b_seq(nmax).values().to_vec(),
        SeqKind::Ahat => a_hat_seq(nmax).values().to_vec(),
        SeqKind::Bhat => (1..=nmax as u64).map(ruler).collect(),
    };
    Ok(match format {
        Some(Format::Json) => format!("{}\n", json!(values)),
        Some(Format::Plain) => {
            let mut out = String::new();
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{} {v}", i + 1);
            }
            out
        }
        _ => {
            let parts: Vec<String> = values.iter().map(u64::to_string).collect();
            format!("{}\n", parts.join(","))
        }
    })
}

fn cells_json(set: &CellSet) -> serde_json::Value {
    json!(set.iter().map(|(n, k)| [n, k]).collect::<Vec<_>>())
}

fn domain(which: DomainKind, h: u32, format: Option<Format>) -> Outcome {
    bounded("h", h, 1, MAX_DOMAIN_HEIGHT)?;
    reject_format(format, &[Format::Plain, Format::Json])?;
    let as_json = format == Some(Format::Json);
    let set = match which {
        DomainKind::Gamma => gamma(h),
        DomainKind::Lambda => lambda_upper(h),
        DomainKind::Cells => s_domain(h),
        DomainKind::Area => {
            let iterated = s_domain(h).len();
            let closed: BigUint = s_area_formula(h);
            return Ok(if as_json {
                format!(
                    "{}\n",
                    json!({"h": h, "iterated": iterated, "formula": closed.to_string()})
                )
            } else {
                format!("{iterated}\n")
            });
        }
    };
    Ok(if as_json {
        format!("{}\n", cells_json(&set))
    } else {
        set.to_lines()
    })
}

fn parse_profile(text: &str) -> Result<Profile, Failure> {
    text.parse::<Profile>().map_err(Failure::from)
}

fn profile_cmd(action: ProfileAction, text: &str, level: Option<usize>, format: Option<Format>) -> Outcome {
    reject_format(format, &[Format::Plain, Format::Json])?;
    let p = parse_profile(text)?;
    let as_json = format == Some(Format::Json);
    match action {
        ProfileAction::Validate => {
            let sum = kraft_sum(&p);
            let valid = p.is_valid();
            if as_json {
                let line = json!({"profile": p, "valid": valid, "kraft": sum.to_string()});
                if valid {
                    Ok(format!("{line}\n"))
                } else {
                    println!("{line}");
                    Err(Failure(format!("kraft sum is {sum}, not 1")))
                }
            } else if valid {
                Ok(format!("valid, kraft={sum}\n"))
            } else {
                println!("invalid, kraft={sum}");
                Err(Failure(format!("kraft sum is {sum}, not 1")))
            }
        }
        ProfileAction::Count => {
            let n = count_trees(&p)?;
            Ok(if as_json {
                format!("{}\n", json!({"profile": p, "count": n.to_string()}))
            } else {
                format!("{n}\n")
            })
        }
        ProfileAction::Internal => {
            if p.height() == 0 {
                return Ok(if as_json { "[]\n".into() } else { "\n".into() });
            }
            let ip = internal_profile(&p)?;
            Ok(if as_json {
                let levels: Vec<String> = ip.levels().iter().map(u128::to_string).collect();
                format!("{}\n", json!({"profile": p, "internal": levels}))
            } else {
                format!("{ip}\n")
            })
        }
        ProfileAction::Truncate => {
            let k = level.ok_or_else(|| Failure("truncate needs --level".into()))?;
            let t = truncate_profile(&p, k)?;
            Ok(if as_json {
                format!("{}\n", json!({"profile": p, "level": k, "truncated": t}))
            } else {
                format!("{t}\n")
            })
        }
    }
}

fn fresh_seed() -> Result<u64, Failure> {
    use rand_core::{OsRng, TryRngCore};
    OsRng
        .try_next_u64()
        .map_err(|e| Failure(format!("no entropy source for a seed: {e}")))
}

fn sample(text: &str, count: u64, seed: Option<u64>, format: Option<Format>) -> Outcome {
    reject_format(format, &[Format::Json, Format::Dot, Format::Plain])?;
    let p = parse_profile(text)?;
    // surfaces invalid profiles before any output
    count_trees(&p)?;
    let seed = match seed {
        Some(s) => s,
        None => fresh_seed()?,
    };
    let mut src = BitSource::from_seed(seed);
    let mut out = String::new();
    for index in 0..count {
        let s = uniform_tree_traced(&p, &mut src)?;
        let record = SampleRecord {
            seed,
            profile: p.clone(),
            bits_consumed: s.bits_consumed,
            node_count: s.tree.node_count(),
        };
        match format.unwrap_or(Format::Json) {
            Format::Dot => {
                let _ = writeln!(
                    out,
                    "// seed={seed} index={index} bits_consumed={}",
                    record.bits_consumed
                );
                out.push_str(&s.tree.to_dot());
            }
            Format::Plain => {
                let _ = writeln!(
                    out,
                    "seed={seed} index={index} bits_consumed={} nodes={} tree={}",
                    record.bits_consumed,
                    record.node_count,
                    s.tree.to_json()
                );
            }
            _ => {
                let tree: serde_json::Value =
                    serde_json::from_str(&s.tree.to_json()).expect("tree json is well formed");
                let mut line = serde_json::to_value(&record).expect("record serializes");
                line["index"] = json!(index);
                line["tree"] = tree;
                let _ = writeln!(out, "{line}");
            }
        }
    }
    Ok(out)
}

fn oracle_cmd(check: OracleCheck, max: Option<usize>) -> Outcome {
    let mut reports = Vec::new();
    match check {
        OracleCheck::Catalan => {
            let n_max = max.unwrap_or(8);
            bounded("max", n_max, 1, oracle::MAX_ORACLE_LEAVES - 1)?;
            let t = growtree::t_table(n_max);
            for n in 1..=n_max {
                let missing = oracle::unreachable_count(n)?;
                let brute = oracle::all_binary_trees(n + 1)?.len();
                reports.push(OracleReport::check(
                    format!("active + inactive trees with {n} internal nodes"),
                    brute,
                    t.column_sum(n) + BigUint::from(missing),
                ));
                reports.push(OracleReport::check(
                    format!("catalan number C_{n}"),
                    catalan::<BigUint>(n),
                    brute,
                ));
            }
        }
        OracleCheck::ProfileCount => {
            let leaves = max.unwrap_or(8);
            bounded("max", leaves, 1, oracle::MAX_ORACLE_LEAVES)?;
            for size in 1..=leaves {
                let mut by_profile: BTreeMap<Profile, u64> = BTreeMap::new();
                for t in oracle::all_binary_trees(size)? {
                    *by_profile.entry(t.profile()).or_default() += 1;
                }
                for (p, brute) in by_profile {
                    reports.push(OracleReport::check(
                        format!("trees with profile {p}"),
                        brute,
                        count_trees(&p)?,
                    ));
                }
            }
        }
        OracleCheck::Histories => {
            let steps = max.unwrap_or(4);
            bounded("max", steps, 1, oracle::MAX_ORACLE_STEPS as usize)?;
            for h in 1..=steps as u32 {
                let brute = oracle::active_buckets(h)?;
                let table = growtree::t_height_table(h);
                let keys: BTreeSet<(u64, u64)> = brute
                    .keys()
                    .map(|&(n, m, _)| (n as u64, m as u64 / 2))
                    .chain(table.entries().keys().copied())
                    .collect();
                for (n, k) in keys {
                    let b = brute
                        .get(&(n as usize, 2 * k as usize, h as usize))
                        .copied()
                        .unwrap_or(0);
                    reports.push(OracleReport::check(
                        format!("height {h}, {n} internal nodes, {} anchors", 2 * k),
                        b,
                        table.get(n, k),
                    ));
                }
            }
        }
    }
    let mut out = String::new();
    for r in &reports {
        let _ = writeln!(out, "{}", r.to_json_line());
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        print!("{out}");
        return Err(Failure(format!("{failed} of {} checks failed", reports.len())));
    }
    Ok(out)
}

fn bench_bits(text: &str, samples: u64, seed: Option<u64>) -> Outcome {
    bounded("samples", samples, 1, u64::MAX)?;
    let p = parse_profile(text)?;
    let entropy = entropy_bound(&p)?;
    let seed = match seed {
        Some(s) => s,
        None => fresh_seed()?,
    };
    let mut src = BitSource::from_seed(seed);
    let (mut total_bits, mut max_bits, mut total_steps) = (0u64, 0u64, 0u64);
    for _ in 0..samples {
        let s = uniform_tree_traced(&p, &mut src)?;
        total_bits += s.bits_consumed;
        max_bits = max_bits.max(s.bits_consumed);
        total_steps += s.steps;
    }
    let mean = total_bits as f64 / samples as f64;
    let line = json!({
        "seed": seed,
        "profile": p,
        "samples": samples,
        "entropy_bits": entropy,
        "mean_bits": mean,
        "max_bits": max_bits,
        "overhead_bits": mean - entropy,
        "mean_steps": total_steps as f64 / samples as f64,
        "node_count": 2 * p.leaf_count() - 1,
    });
    Ok(format!("{line}\n"))
}
