use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use stratavol::exact::{format_rational, rational_to_f64, Rational, UPoly};
use stratavol::pnum::{self, PNumberTable, PartitionIndex};
use stratavol::ribbon::{self, PerimeterPair, Wall};
use stratavol::sts::{self, CountConvention};
use stratavol::volumes::{self, VolumeTable};
use stratavol::{Error, Result};

const CACHE_ENV: &str = "STRATAVOL_CACHE";

#[derive(Parser)]
#[command(name = "stratavol", version, about = "Exact n-cylinder volume contributions of minimal strata")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,
    /// Add decimal approximations next to exact values (display only).
    #[arg(long, global = true)]
    float: bool,
    /// Seed for wall sampling and cache probing.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Table of a_{g,n} and Vol_n(2g-2) for 1 <= n <= g <= gmax.
    Volumes {
        #[arg(long, default_value_t = 4)]
        gmax: u32,
    },
    /// p-numbers with even parts and total weight at most the given bound.
    Pnumbers {
        #[arg(long, default_value_t = 8)]
        weight: u32,
    },
    /// Coefficients of C(t, u).
    Series {
        #[arg(long, default_value_t = 12)]
        order: usize,
        /// Build from the volume table or by Lagrange inversion.
        #[arg(long, value_enum, default_value_t = Route::Table)]
        route: Route,
    },
    /// Brute-force counts from the combinatorial oracles.
    Count {
        #[command(subcommand)]
        kind: CountKind,
    },
    /// Run a verification suite; exits nonzero on any failure.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// How square-tiled surface classes are counted.
        #[arg(long, default_value = "unweighted", value_parser = parse_convention)]
        convention: CountConvention,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Table,
    Lagrange,
}

#[derive(Subcommand)]
enum CountKind {
    /// The counting function P^g_{k,l}(L; L').
    Ribbon {
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[command(flatten)]
        perimeters: Perimeters,
        /// Also emit every graph of the family as JSON.
        #[arg(long)]
        dump: bool,
    },
    /// Positive bipartite plane trees at (L; L').
    Trees {
        #[command(flatten)]
        perimeters: Perimeters,
    },
    /// Square-tiled surfaces in H(2g-2) by squares and cylinders.
    Sts {
        #[arg(long, default_value_t = 1)]
        genus: u32,
        #[arg(long, default_value_t = 4)]
        max_squares: usize,
    },
}

#[derive(Args)]
struct Perimeters {
    /// Black perimeters, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    black: Vec<i64>,
    /// White perimeters, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    white: Vec<i64>,
}

impl Perimeters {
    fn pair(&self) -> PerimeterPair {
        PerimeterPair::from_ints(&self.black, &self.white)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Bivariate,
    Multivariate,
    Walls,
    OracleP,
    OracleSts,
    All,
}

fn parse_convention(s: &str) -> std::result::Result<CountConvention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let run = || -> Result<bool> {
        if let Some(path) = &cache {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            PNumberTable::global().load_cache(path, &mut rng)?;
        }
        let ok = dispatch(&cli)?;
        if let Some(path) = &cache {
            PNumberTable::global().save_cache(path)?;
        }
        Ok(ok)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Volumes { gmax } => cmd_volumes(cli, *gmax),
        Command::Pnumbers { weight } => cmd_pnumbers(cli, *weight),
        Command::Series { order, route } => cmd_series(cli, *order, *route),
        Command::Count { kind } => cmd_count(cli, kind),
        Command::Verify { suite, convention } => cmd_verify(cli, *suite, *convention),
    }
}

fn decimal(r: &Rational) -> String {
    format!("{:.12e}", rational_to_f64(r))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn cmd_volumes(cli: &Cli, gmax: u32) -> Result<bool> {
    if gmax > 10 {
        return Err(Error::SizeBound(format!("--gmax {gmax} exceeds 10")));
    }
    let rows = VolumeTable::compute(gmax)?.rows()?;
    match cli.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("rows serialize");
                    if cli.float {
                        v["a_gn_float"] = json!(rational_to_f64(&r.a_gn));
                        v["volume_float"] = json!(r.volume.to_f64());
                    }
                    v
                })
                .collect();
            print_json(&Value::Array(items));
        }
        Format::Csv => {
            println!("g,n,a_gn{}", if cli.float { ",a_gn_float" } else { "" });
            for r in &rows {
                let extra = if cli.float { format!(",{}", decimal(&r.a_gn)) } else { String::new() };
                println!("{},{},{}{extra}", r.g, r.n, format_rational(&r.a_gn));
            }
        }
        Format::Pretty => {
            for r in &rows {
                let extra = if cli.float { format!("  ~ {}", decimal(&r.a_gn)) } else { String::new() };
                println!("g={} n={}  a_gn = {}  Vol_n = {}{extra}", r.g, r.n, format_rational(&r.a_gn), r.volume);
            }
        }
    }
    Ok(true)
}

fn cmd_pnumbers(cli: &Cli, weight: u32) -> Result<bool> {
    if weight > 20 {
        return Err(Error::SizeBound(format!("--weight {weight} exceeds 20")));
    }
    let mut rows = Vec::new();
    for half in 1..=weight / 2 {
        for n in 1..=half as usize {
            for parts in pnum::partitions(half, n, 1).into_iter().rev() {
                let idx = PartitionIndex::new(parts.iter().map(|s| 2 * s).collect())?;
                let value = pnum::p_value(&idx)?;
                rows.push((idx, value));
            }
        }
    }
    match cli.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(idx, v)| json!({"parts": idx.parts(), "value": v.to_string()}))
                .collect();
            print_json(&Value::Array(items));
        }
        Format::Csv => {
            println!("parts,value");
            for (idx, v) in &rows {
                let parts: Vec<String> = idx.parts().iter().map(u32::to_string).collect();
                println!("\"{}\",{v}", parts.join(","));
            }
        }
        Format::Pretty => {
            for (idx, v) in &rows {
                println!("{idx} = {v}");
            }
        }
    }
    Ok(true)
}

fn upoly_strings(p: &UPoly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

fn cmd_series(cli: &Cli, order: usize, route: Route) -> Result<bool> {
    let series = match route {
        Route::Table => volumes::c_series(order)?,
        Route::Lagrange => volumes::c_series_inverse_route(order)?,
    };
    match cli.format {
        Format::Json => {
            let items: Vec<Value> = (0..=order)
                .map(|k| json!({"t_power": k, "u_coeffs": upoly_strings(series.coeff(k))}))
                .collect();
            print_json(&json!({"order": order, "coefficients": items}));
        }
        Format::Csv => {
            println!("t_power,u_power,coeff");
            for k in 0..=order {
                for (j, c) in series.coeff(k).coeffs().iter().enumerate() {
                    println!("{k},{j},{}", format_rational(c));
                }
            }
        }
        Format::Pretty => {
            for k in 0..=order {
                let c = series.coeff(k);
                if !c.is_zero() {
                    println!("t^{k}: {c}");
                }
            }
        }
    }
    Ok(true)
}

fn emit_value(cli: &Cli, name: &str, value: &Rational) {
    match cli.format {
        Format::Json => {
            let mut v = json!({ name: format_rational(value) });
            if cli.float {
                v["float"] = json!(rational_to_f64(value));
            }
            print_json(&v);
        }
        Format::Csv => {
            println!("{name}");
            println!("{}", format_rational(value));
        }
        Format::Pretty => {
            let extra = if cli.float { format!("  ~ {}", decimal(value)) } else { String::new() };
            println!("{}{extra}", format_rational(value));
        }
    }
}

fn cmd_count(cli: &Cli, kind: &CountKind) -> Result<bool> {
    match kind {
        CountKind::Ribbon { genus, perimeters, dump } => {
            let p = perimeters.pair();
            let (k, l) = (p.k(), p.l());
            let value = ribbon::counting_function(*genus, k, l, &p)?;
            if *dump {
                let family = ribbon::enumerate_graphs(*genus, k, l)?;
                let mut graphs = Vec::new();
                for (g, aut) in family.iter() {
                    let mut v = serde_json::to_value(g.dump(*aut)).expect("dump serializes");
                    v["metrics"] = json!(ribbon::count_metrics(g, &p)?);
                    graphs.push(v);
                }
                print_json(&json!({"value": format_rational(&value), "graphs": graphs}));
            } else {
                emit_value(cli, "value", &value);
            }
        }
        CountKind::Trees { perimeters } => {
            let p = perimeters.pair();
            let value = ribbon::count_positive_trees(p.k(), p.l(), &p)?;
            emit_value(cli, "value", &Rational::from_integer(value.into()));
        }
        CountKind::Sts { genus, max_squares } => {
            let census = sts::census(*genus, *max_squares)?;
            let total: u64 = census.values().map(|c| c.count).sum();
            match cli.format {
                Format::Csv => print!("{}", sts::census_csv(*genus, &census)),
                Format::Json => {
                    let rows: Vec<Value> = census
                        .iter()
                        .map(|(&(n_sq, cyl), c)| {
                            json!({"g": genus, "N": n_sq, "n": cyl, "count": c.count,
                                   "weighted_count": format_rational(&c.weighted)})
                        })
                        .collect();
                    print_json(&json!({"rows": rows, "cumulative": total}));
                }
                Format::Pretty => {
                    for ((n_sq, cyl), c) in &census {
                        println!("N={n_sq} n={cyl}  count = {}  weighted = {}", c.count, format_rational(&c.weighted));
                    }
                    println!("cumulative = {total}");
                }
            }
        }
    }
    Ok(true)
}

/// Collects one line per checked identity.
struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.lines.push((ok, what.into()));
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|(ok, _)| *ok)
    }
}

fn suite_bivariate(r: &mut Report) -> Result<()> {
    r.check(volumes::verify_bivariate_relation(6)?, "bivariate relation for g <= 6");
    r.check(
        volumes::c_series(12)? == volumes::c_series_inverse_route(12)?,
        "table and Lagrange routes for C(t,u) agree to order 12",
    );
    Ok(())
}

fn suite_multivariate(r: &mut Report) -> Result<()> {
    r.check(pnum::verify_multivariate_relation(8, 8)?, "multivariate relation through weight 8");
    Ok(())
}

fn suite_walls(r: &mut Report, seed: u64) -> Result<()> {
    let cells = ribbon::positive_trees_by_cell(&Wall::diagonal(3), 64, seed)?;
    let values: std::collections::BTreeSet<u64> = cells.values().flatten().copied().collect();
    r.check(
        cells.len() >= 4 && values.len() == 1,
        format!("V_3: {} open cells sampled, positive-tree counts {values:?}", cells.len()),
    );
    let generic = ribbon::positive_trees_by_cell(&Wall::full(3, 3), 16, seed)?;
    let values: std::collections::BTreeSet<u64> = generic.values().flatten().copied().collect();
    r.check(values.len() == 1 && values.contains(&24), format!("generic points of H_(3,3): counts {values:?}"));
    let fit = ribbon::fit_ray_polynomial(1, 1, 1, &PerimeterPair::from_ints(&[1], &[1]), 6)?;
    let lead = pnum::pgvn_polynomial(1, 1)?.coeff(&[2]);
    r.check(fit.coeff(2) == lead, format!("ray fit P^1_(1,1): {fit}"));
    Ok(())
}

fn suite_oracle_p(r: &mut Report, seed: u64) -> Result<()> {
    for (b, w) in ribbon::partition_wall_cases(4, 4) {
        let oracle = ribbon::p0_oracle(&b, &w, seed)?;
        let b32: Vec<u32> = b.iter().map(|&x| x as u32).collect();
        let w32: Vec<u32> = w.iter().map(|&x| x as u32).collect();
        let table = pnum::p_bw_value(&b32, &w32)?;
        r.check(table == oracle.into(), format!("p^{b:?}_{w:?}: trees {oracle}, recursion {table}"));
    }
    Ok(())
}

fn suite_oracle_sts(r: &mut Report, convention: CountConvention) -> Result<()> {
    for g in 1..=2 {
        let rows = sts::verify_cylinder_formula(g, 6, convention)?;
        let mut cumulative: BTreeMap<usize, (Rational, Rational)> = BTreeMap::new();
        for row in &rows {
            let e = cumulative.entry(row.cylinders).or_default();
            e.0 += &row.census;
            e.1 += &row.formula;
            r.check(
                row.matches(),
                format!("g={g} N={} n={}: census {}, formula {}", row.squares, row.cylinders, row.census, row.formula),
            );
        }
        for (n, (c, f)) in cumulative {
            r.check(c == f, format!("g={g} n={n} N<=6 cumulative: census {c}, formula {f}"));
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, suite: Suite, convention: CountConvention) -> Result<bool> {
    let mut r = Report { lines: Vec::new() };
    let all = suite == Suite::All;
    if all || suite == Suite::Bivariate {
        suite_bivariate(&mut r)?;
    }
    if all || suite == Suite::Multivariate {
        suite_multivariate(&mut r)?;
    }
    if all || suite == Suite::Walls {
        suite_walls(&mut r, cli.seed)?;
    }
    if all || suite == Suite::OracleP {
        suite_oracle_p(&mut r, cli.seed)?;
    }
    if all || suite == Suite::OracleSts {
        suite_oracle_sts(&mut r, convention)?;
    }
    match cli.format {
        Format::Json => {
            let checks: Vec<Value> = r.lines.iter().map(|(ok, what)| json!({"pass": ok, "check": what})).collect();
            print_json(&json!({"pass": r.passed(), "checks": checks}));
        }
        Format::Csv => {
            println!("pass,check");
            for (ok, what) in &r.lines {
                println!("{ok},\"{}\"", what.replace('"', "\"\""));
            }
        }
        Format::Pretty => {
            for (ok, what) in &r.lines {
                println!("{} {what}", if *ok { "PASS" } else { "FAIL" });
            }
        }
    }
    Ok(r.passed())
}
