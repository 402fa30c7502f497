use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use gamma6::group::{
    dirichlet_contains, eval_str, gamma_prime_generators, orbit_bfs, with_threads, Constants, DirichletLocation,
};
use gamma6::limitset::{self, CloudGenerators};
use gamma6::linkcalc;
use gamma6::{FieldElem, GroupWord, ProjPoint, Vec3F};

const MAX_DEPTH: usize = 12;

#[derive(Parser)]
#[command(name = "gamma6", version, about = "Exact checks, limit-set clouds and linking certificates for the (3,3,6) triangle group")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for commands that draw random words.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Ply,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Generators {
    Ab,
    GammaPrime,
    St,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact identity suite; exit 1 on any failure.
    Verify {
        /// Perturb S before verifying (negative control).
        #[arg(long, hide = true)]
        corrupt_s: bool,
    },
    /// Orbit images of sampled R0 in the Heisenberg chart.
    Cloud {
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 512)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Generators::Ab)]
        generators: Generators,
    },
    /// The projection of R0 to C and its double point.
    Lemniscate {
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Linking numbers of R0, VR0, V^2R0 and the invariant C-circles of V.
    Linking {
        #[arg(long, default_value_t = 2048)]
        samples: usize,
    },
    /// Count distinct group elements by word length.
    Orbit {
        #[arg(long, value_enum, default_value_t = Generators::GammaPrime)]
        generators: Generators,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Write sorted canonical matrix serializations instead of counts.
        #[arg(long)]
        dump: bool,
    },
    /// Locate a point of the complex hyperbolic plane relative to the Dirichlet domain.
    Dirichlet {
        /// The point is this word applied to p_U.
        #[arg(long, conflicts_with = "point")]
        word: Option<String>,
        /// Explicit lift: three coordinates separated by ';', each 8 rationals separated by ','.
        #[arg(long)]
        point: Option<String>,
    },
    /// R-circle chains with certified common points.
    Chain {
        /// Word over A, B and their inverses a, b.
        #[arg(long, conflicts_with = "random")]
        word: Option<String>,
        /// Number of random words to draw with --seed.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

enum Failure {
    Verification(String),
    Usage(String),
    Numeric(String),
}

impl From<gamma6::Error> for Failure {
    fn from(e: gamma6::Error) -> Self {
        Failure::Numeric(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let result = with_threads(threads, move || run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn output(cli: &Cli) -> io::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Pretty JSON with sorted keys.
fn write_json<T: Serialize>(cli: &Cli, value: &T) -> Outcome {
    let v: Value = serde_json::to_value(value).map_err(|e| Failure::Numeric(e.to_string()))?;
    let mut out = output(cli)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))?;
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    match &cli.command {
        Command::Verify { corrupt_s } => cmd_verify(cli, *corrupt_s)?,
        Command::Cloud { depth, samples, format, generators } => cmd_cloud(cli, *depth, *samples, *format, *generators)?,
        Command::Lemniscate { samples, format } => cmd_lemniscate(cli, *samples, *format)?,
        Command::Linking { samples } => cmd_linking(cli, *samples)?,
        Command::Orbit { generators, max_len, dump } => cmd_orbit(cli, *generators, *max_len, *dump)?,
        Command::Dirichlet { word, point } => cmd_dirichlet(cli, word.as_deref(), point.as_deref())?,
        Command::Chain { word, random, max_len } => cmd_chain(cli, word.as_deref(), *random, *max_len)?,
    }
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_verify(cli: &Cli, corrupt_s: bool) -> Outcome {
    let report = if corrupt_s {
        let mut s = Constants::s_matrix();
        s[(0, 0)] = 2.into();
        limitset::verify_all(&Constants::from_generators(s, Constants::t_matrix()))
    } else {
        limitset::verify_all(Constants::get())
    };
    write_json(cli, &report.checks)?;
    let failures = report.failures();
    eprintln!("verify: {} checks, {} failed", report.checks.len(), failures.len());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}

fn check_samples(samples: usize) -> Outcome {
    if samples < 3 {
        return Err(Failure::Usage("--samples must be at least 3".into()));
    }
    Ok(())
}

fn cmd_cloud(cli: &Cli, depth: usize, samples: usize, format: Format, generators: Generators) -> Outcome {
    if depth > MAX_DEPTH {
        return Err(Failure::Usage(format!("--depth is limited to {MAX_DEPTH}")));
    }
    check_samples(samples)?;
    let gens = match generators {
        Generators::Ab => CloudGenerators::AB,
        Generators::St => CloudGenerators::ST,
        Generators::GammaPrime => return Err(Failure::Usage("cloud supports --generators ab or st".into())),
    };
    let points = limitset::cloud(depth, samples, gens)?;
    let mut out = output(cli)?;
    match format {
        Format::Csv => limitset::write_cloud_csv(&mut out, &points)?,
        Format::Ply => limitset::write_cloud_ply(&mut out, &points)?,
        Format::Json => return Err(Failure::Usage("cloud supports --format csv or ply".into())),
    }
    out.flush()?;
    eprintln!(
        "cloud: {} points, {} group elements, {} samples, pencil-uniform sampling",
        points.len(),
        points.len() / samples,
        samples
    );
    Ok(())
}

fn cmd_lemniscate(cli: &Cli, samples: usize, format: Format) -> Outcome {
    if samples < 8 {
        return Err(Failure::Usage("--samples must be at least 8".into()));
    }
    let l = limitset::lemniscate(samples)?;
    match format {
        Format::Csv => {
            let mut out = output(cli)?;
            l.write_csv(&mut out)?;
            out.flush()?;
        }
        Format::Json => write_json(
            cli,
            &json!({
                "samples": samples,
                "closed": l.is_closed(1e-9),
                "double_point": l.double_point,
                "certificate": l.certificate,
            }),
        )?,
        Format::Ply => return Err(Failure::Usage("lemniscate supports --format csv or json".into())),
    }
    let d = &l.double_point;
    eprintln!(
        "lemniscate: {} points, double point ({:.12}, {:.12}) gap {:.3e} (raw samples {:.3e}), common C-circle {}",
        l.points.len(),
        d.z[0],
        d.z[1],
        d.gap,
        d.sample_gap,
        l.certificate.common_ccircle && l.certificate.two_real_points
    );
    Ok(())
}

fn cmd_linking(cli: &Cli, samples: usize) -> Outcome {
    check_samples(samples)?;
    let mut pairs = linkcalc::verify_hopf_triple(samples)?;
    pairs.extend(linkcalc::verify_v_axes(samples)?);
    write_json(cli, &pairs)?;
    let bad: Vec<&str> = pairs.iter().filter(|p| p.integer.abs() != 1).map(|p| p.pair.as_str()).collect();
    eprintln!("linking: {} pairs", pairs.len());
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("|lk| != 1 for {}", bad.join(", "))))
    }
}

fn cmd_orbit(cli: &Cli, generators: Generators, max_len: usize, dump: bool) -> Outcome {
    if max_len > MAX_DEPTH {
        return Err(Failure::Usage(format!("--max-len is limited to {MAX_DEPTH}")));
    }
    let (gens, name) = match generators {
        Generators::Ab => (vec![eval_str("A"), eval_str("B")], "ab"),
        Generators::St => (vec![eval_str("S"), eval_str("T")], "st"),
        Generators::GammaPrime => (gamma_prime_generators(), "gamma-prime"),
    };
    let orbit = orbit_bfs(&gens, max_len);
    if dump {
        let mut out = output(cli)?;
        out.write_all(orbit.dump_sorted().as_bytes())?;
        out.flush()?;
    } else {
        let counts: Vec<usize> = (0..=max_len).map(|n| orbit.count_up_to(n)).collect();
        let free: Vec<u64> = (0..=max_len as u32).map(|n| 2 * 3u64.pow(n) - 1).collect();
        write_json(
            cli,
            &json!({
                "generators": name,
                "max_len": max_len,
                "counts": counts,
                "free_group_counts": free,
                "total": orbit.len(),
            }),
        )?;
    }
    eprintln!("orbit: {} elements up to length {max_len}", orbit.len());
    Ok(())
}

fn parse_point(s: &str) -> Result<Vec3F, Failure> {
    let coords: Vec<&str> = s.split(';').collect();
    if coords.len() != 3 {
        return Err(Failure::Usage("--point needs three ';'-separated coordinates".into()));
    }
    let mut v = Vec::with_capacity(3);
    for c in coords {
        let parts: Vec<&str> = c.split(',').map(str::trim).collect();
        v.push(FieldElem::from_strings(&parts).map_err(|e| Failure::Usage(e.to_string()))?);
    }
    let [a, b, c]: [FieldElem; 3] = v.try_into().map_err(|_| Failure::Usage("bad point".into()))?;
    Ok(Vec3F::new(a, b, c))
}

fn cmd_dirichlet(cli: &Cli, word: Option<&str>, point: Option<&str>) -> Outcome {
    let k = Constants::get();
    let lift = match (word, point) {
        (Some(w), None) => {
            let w: GroupWord = w.parse().map_err(|e: gamma6::Error| Failure::Usage(e.to_string()))?;
            k.word_matrix(&w).apply(&k.p_u)
        }
        (None, Some(p)) => parse_point(p)?,
        _ => return Err(Failure::Usage("give exactly one of --word or --point".into())),
    };
    let p = ProjPoint::new(lift).map_err(|e| Failure::Usage(e.to_string()))?;
    let loc = dirichlet_contains(&p).map_err(|e| Failure::Usage(e.to_string()))?;
    let (name, faces) = match &loc {
        DirichletLocation::Inside => ("inside", vec![]),
        DirichletLocation::OnFace(f) => ("on-face", f.clone()),
        DirichletLocation::Outside(f) => ("outside", f.clone()),
    };
    let faces: Vec<String> = faces.iter().map(ToString::to_string).collect();
    write_json(cli, &json!({ "location": name, "faces": faces }))?;
    eprintln!("dirichlet: {name}");
    Ok(())
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let len = rng.random_range(1..=max_len.max(1));
    (0..len).map(|_| ['A', 'a', 'B', 'b'][rng.random_range(0..4)]).collect()
}

fn cmd_chain(cli: &Cli, word: Option<&str>, random: Option<usize>, max_len: usize) -> Outcome {
    let words: Vec<String> = match (word, random) {
        (Some(w), None) => vec![w.to_string()],
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            (0..n).map(|_| random_word(&mut rng, max_len)).collect()
        }
        _ => return Err(Failure::Usage("give exactly one of --word or --random".into())),
    };
    let mut reports = Vec::new();
    let mut all = true;
    for w in &words {
        let gw: GroupWord = w.parse().map_err(|e: gamma6::Error| Failure::Usage(e.to_string()))?;
        let c = limitset::chain(&gw).map_err(|e| match e {
            gamma6::Error::InvalidArgument(m) => Failure::Usage(m),
            e => e.into(),
        })?;
        all &= c.all_certified();
        let links: Vec<Value> = c
            .links
            .iter()
            .enumerate()
            .map(|(i, l)| {
                json!({
                    "index": i,
                    "point": l.point.0.iter().map(FieldElem::canonical_string).collect::<Vec<_>>(),
                    "on_previous": l.on_previous,
                    "on_next": l.on_next,
                })
            })
            .collect();
        reports.push(json!({
            "word": gw.to_string(),
            "circles": c.circles.len(),
            "certified": c.all_certified(),
            "links": links,
        }));
    }
    write_json(cli, &reports)?;
    eprintln!("chain: {} words, all certified: {all}", words.len());
    if all {
        Ok(())
    } else {
        Err(Failure::Verification("uncertified chain link".into()))
    }
}
