use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use wreathgen::cache::Cache;
use wreathgen::certify::{self, CertifyOptions, Overrides};
use wreathgen::genprob;
use wreathgen::io::{self, SCHEMA};
use wreathgen::lattice::SubgroupLattice;
use wreathgen::selftest;
use wreathgen::tower::{TowerSpec, WreathElement};
use wreathgen::{par, Caps, Error, Execution, GroupDescription, Homomorphism, PermGroup, Permutation, Result, RunConfig};

#[derive(Parser)]
#[command(name = "wreathgen", version, about = "Iterated wreath products and finite-generation certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Run every computation on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for cached stabilizer chains (also WREATHGEN_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Largest group order for which a subgroup lattice is built.
    #[arg(long, global = true)]
    lattice_cap: Option<usize>,
    /// Largest permutation degree a tower level may have.
    #[arg(long, global = true)]
    degree_cap: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    /// Plain text, for `selftest`, `maximal` and `certify`.
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Is the limit of the tower of L topologically finitely generated?
    Decide {
        #[arg(long)]
        group: PathBuf,
    },
    /// The same question for the universal group of F, through its point stabilizer.
    DecideUniversal {
        #[arg(long)]
        group: PathBuf,
    },
    Tower {
        #[command(subcommand)]
        command: TowerCommand,
    },
    /// Generation probability p_k.
    Pk {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, value_enum, default_value_t = PkArg::Exact)]
        mode: PkArg,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// ζ_{Y|X}(s) for a surjection, or for Y over the trivial group.
    Zeta {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        group: Option<PathBuf>,
        /// JSON `{ "source": .., "target": .., "images": [[..], ..] }`.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Also check p_k(Y) ≥ (1 − ζ(k−1)) p_k(X) at this k.
        #[arg(long)]
        check_k: Option<u32>,
    },
    /// Conjugacy classes of maximal subgroups.
    Maximal {
        #[arg(long)]
        group: PathBuf,
    },
    /// Certificate of positive finite generation for the tower of L.
    Certify {
        #[arg(long)]
        spec: PathBuf,
        /// Supply a constant, e.g. `--override C7=121`.
        #[arg(long = "override", value_name = "NAME=VALUE")]
        overrides: Vec<String>,
        /// Fall back to crude bounds for constants that cannot be computed.
        #[arg(long)]
        crude_bounds: bool,
        #[arg(long, default_value_t = 1)]
        max_level: u32,
        #[arg(long, default_value_t = 100_000)]
        mc_budget: u64,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Criteria to run, e.g. `--only 1,3`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

#[derive(Subcommand)]
enum TowerCommand {
    /// Build L_n as a permutation group on D^n.
    Build {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Multiply two structured elements of L_n.
    Mult {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Check the product rule against permutation composition on random pairs.
    Verify {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PkArg {
    Exact,
    Mc,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

#[derive(Deserialize)]
struct MapDescription {
    source: GroupDescription,
    target: GroupDescription,
    images: Vec<Vec<u32>>,
}

struct Context {
    config: RunConfig,
    cache: Option<Cache>,
    format: Format,
}

impl Context {
    fn load_group(&self, path: &Path) -> Result<PermGroup> {
        let text = fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        let g = serde_json::from_str::<GroupDescription>(&text)?.to_group()?;
        match &self.cache {
            Some(c) => Ok(c.chain(g)?.0),
            None => Ok(g),
        }
    }

    fn emit<T: Serialize>(&self, command: &str, body: T) -> Result<()> {
        print!("{}", io::to_json(&Envelope { schema: SCHEMA, command, body })?);
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    if g.threads > 0 {
        par::set_threads(g.threads);
    }
    let mut caps = Caps::default();
    if let Some(c) = g.lattice_cap {
        caps.lattice_order = c;
    }
    if let Some(c) = g.degree_cap {
        caps.degree = c;
    }
    let execution = if g.sequential { Execution::Sequential } else { Execution::Parallel };
    let ctx = Context {
        config: RunConfig { caps, seed: g.seed, execution, ..RunConfig::default() },
        cache: Cache::from_env(g.cache_dir.clone()),
        format: g.format,
    };
    match cli.command {
        Command::Decide { group } => {
            let spec = TowerSpec::new(ctx.load_group(&group)?)?;
            ctx.emit("decide", certify::decide(&spec, ctx.config.caps.lattice_order)?)?;
        }
        Command::DecideUniversal { group } => {
            let f = ctx.load_group(&group)?;
            ctx.emit("decide-universal", certify::decide_universal(&f, ctx.config.caps.lattice_order)?)?;
        }
        Command::Tower { command } => tower(&ctx, command)?,
        Command::Pk { group, k, mode, samples } => {
            let g = ctx.load_group(&group)?;
            let r = match mode {
                PkArg::Exact => genprob::pk_exact_result(&g, k, &ctx.config.caps, execution)?,
                PkArg::Mc => genprob::pk_montecarlo(&g, k, samples, ctx.config.seed, execution)?,
            };
            ctx.emit("pk", r)?;
        }
        Command::Zeta { group, map, s, check_k } => {
            let pi = match (group, map) {
                (Some(path), _) => {
                    let y = ctx.load_group(&path)?;
                    let one = PermGroup::trivial(1);
                    Homomorphism::new(&y, &one, vec![Permutation::identity(1); y.generators().len()])?
                }
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
                    let d: MapDescription = serde_json::from_str(&text)?;
                    let images = d.images.into_iter().map(Permutation::from_images).collect::<Result<Vec<_>>>()?;
                    Homomorphism::new(&d.source.to_group()?, &d.target.to_group()?, images)?
                }
                (None, None) => return Err(Error::input("either --group or --map is required")),
            };
            #[derive(Serialize)]
            struct Out {
                zeta: genprob::ZetaValue,
                #[serde(skip_serializing_if = "Option::is_none")]
                quotient_bound: Option<genprob::QuotientBoundReport>,
            }
            let zeta = genprob::zeta(&pi, s, &ctx.config.caps)?;
            let quotient_bound =
                check_k.map(|k| genprob::bhattacharjee_check(&pi, k, &ctx.config.caps, execution)).transpose()?;
            ctx.emit("zeta", Out { zeta, quotient_bound })?;
        }
        Command::Maximal { group } => maximal(&ctx, &group)?,
        Command::Certify { spec, overrides, crude_bounds, max_level, mc_budget } => {
            let mut o = Overrides::new();
            for a in &overrides {
                o.parse_assignment(a)?;
            }
            let opts = CertifyOptions {
                overrides: o,
                crude_bounds,
                max_level,
                mc_budget,
                seed: ctx.config.seed,
                caps: ctx.config.caps.clone(),
                execution,
                ..CertifyOptions::default()
            };
            let c = certify::certified_k(&TowerSpec::new(ctx.load_group(&spec)?)?, &opts)?;
            if ctx.format == Format::Table {
                println!("k1 = {}  n1 = {}  k2 = {}  k = {}", c.k1, c.n1, c.k2, c.k);
                println!("{:>4} {:>14} {:>14} {:>14} {:>14} {:>14}", "n", "log2 case1", "log2 case2", "log2 case3", "log2 case4", "log2 total");
                for r in &c.table {
                    println!(
                        "{:>4} {:>14.3} {:>14.3} {:>14.3} {:>14.3} {:>14.3}",
                        r.n, r.case1_log2, r.case2_log2, r.case3_log2, r.case4_log2, r.total_log2
                    );
                }
                println!("tail lower bound = {}", io::ratio_string(&c.tail_lower_bound));
            } else {
                ctx.emit("certify", &c)?;
            }
            if !c.flags.all() {
                return Ok(4);
            }
        }
        Command::Selftest { only } => {
            let results = selftest::run(&ctx.config, &only);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let all = results.iter().all(|r| r.passed);
            if ctx.format == Format::Json {
                #[derive(Serialize)]
                struct Out<'a> {
                    passed: bool,
                    criteria: &'a [selftest::CriterionResult],
                }
                ctx.emit("selftest", Out { passed: all, criteria: &results })?;
            }
            if !all {
                return Ok(4);
            }
        }
    }
    Ok(0)
}

fn tower(ctx: &Context, command: TowerCommand) -> Result<()> {
    match command {
        TowerCommand::Build { group, level } => {
            let spec = TowerSpec::new(ctx.load_group(&group)?)?;
            let l = spec.build_level(level, ctx.config.caps.degree)?;
            #[derive(Serialize)]
            struct Out {
                level: usize,
                degree: usize,
                #[serde(with = "wreathgen::io::uint")]
                order: num_bigint::BigUint,
                #[serde(with = "wreathgen::io::uint")]
                expected_order: num_bigint::BigUint,
                generators: usize,
                orbit_sizes: Vec<usize>,
            }
            ctx.emit(
                "tower build",
                Out {
                    level,
                    degree: l.degree(),
                    order: l.order(),
                    expected_order: spec.level_order(level),
                    generators: l.generators().len(),
                    orbit_sizes: spec.orbit_sizes(),
                },
            )
        }
        TowerCommand::Mult { group, a, b } => {
            let spec = TowerSpec::new(ctx.load_group(&group)?)?;
            let read = |p: &Path| -> Result<WreathElement> {
                let text = fs::read_to_string(p).map_err(|e| Error::input(format!("{}: {e}", p.display())))?;
                let e: WreathElement = serde_json::from_str(&text)?;
                e.validate(&spec)?;
                Ok(e)
            };
            let (a, b) = (read(&a)?, read(&b)?);
            let product = a.mult(&b)?;
            #[derive(Serialize)]
            struct Out {
                product: WreathElement,
                permutation: Vec<u32>,
            }
            let permutation = product.to_permutation().images().to_vec();
            ctx.emit("tower mult", Out { product, permutation })
        }
        TowerCommand::Verify { group, level, pairs } => {
            let spec = TowerSpec::new(ctx.load_group(&group)?)?;
            let seed = ctx.config.seed;
            let mismatches = par::map_range(ctx.config.execution, pairs, |i| -> Result<bool> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let a = WreathElement::random(&spec, level, &mut rng);
                let b = WreathElement::random(&spec, level, &mut rng);
                Ok(a.mult(&b)?.to_permutation() != a.to_permutation().compose(&b.to_permutation()))
            })
            .into_iter()
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&m| m)
            .count();
            #[derive(Serialize)]
            struct Out {
                level: usize,
                pairs: usize,
                seed: u64,
                mismatches: usize,
                ok: bool,
            }
            ctx.emit("tower verify", Out { level, pairs, seed, mismatches, ok: mismatches == 0 })?;
            if mismatches > 0 {
                return Err(Error::invariant(format!("{mismatches} products disagree with composition")));
            }
            Ok(())
        }
    }
}

fn maximal(ctx: &Context, group: &Path) -> Result<()> {
    let g = ctx.load_group(group)?;
    let lat = SubgroupLattice::build_with(&g, ctx.config.caps.lattice_order, ctx.config.execution)?;
    #[derive(Serialize)]
    struct Class {
        index: usize,
        order: usize,
        class_size: usize,
        generators: Vec<Vec<u32>>,
    }
    #[derive(Serialize)]
    struct Out {
        order: usize,
        subgroups: usize,
        subgroup_classes: usize,
        maximal: Vec<Class>,
    }
    let mut maximal: Vec<Class> = lat
        .maximal_subgroups()
        .into_iter()
        .map(|m| Class {
            index: m.index,
            order: m.order,
            class_size: m.class_size,
            generators: m.representative.generators().iter().map(|p| p.images().to_vec()).collect(),
        })
        .collect();
    maximal.sort_by(|a, b| (a.index, a.class_size, &a.generators).cmp(&(b.index, b.class_size, &b.generators)));
    let out = Out { order: lat.order(), subgroups: lat.len(), subgroup_classes: lat.classes().len(), maximal };
    if ctx.format == Format::Table {
        println!("|G| = {}, {} subgroups in {} classes", out.order, out.subgroups, out.subgroup_classes);
        println!("{:>8} {:>8} {:>10}", "index", "order", "class size");
        for c in &out.maximal {
            println!("{:>8} {:>8} {:>10}", c.index, c.order, c.class_size);
        }
        Ok(())
    } else {
        ctx.emit("maximal", out)
    }
}
