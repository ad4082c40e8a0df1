use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use sturm_core::cfrac::{self, ContinuedFraction, TableRow};
use sturm_core::connections::{connection_graph, find_reversor};
use sturm_core::invariants::{morse_indices, morse_polynomial};
use sturm_core::meander::Meander;
use sturm_core::permutation::Permutation;
use sturm_core::three_nose::{
    build_three_nose_meander, chafee_infante_permutation, three_nose_permutation,
};
use sturm_core::verify;

/// Generate, validate, and classify Sturm meanders.
#[derive(Parser)]
#[command(name = "sturm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a meander permutation.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Validate a permutation and report its meander properties.
    Check {
        /// Comma-separated permutation values, or "-" to read stdin.
        sigma: String,
        /// Emit a JSON report including Morse indices and zero numbers.
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Emit the connection graph of a Sturm permutation.
    Graph {
        /// Comma-separated permutation values, or "-" to read stdin.
        sigma: String,
        /// Adjoin the distinguished vertex at level -1.
        #[arg(long)]
        pointed: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        /// Also search for a reversor and report it.
        #[arg(long)]
        reversor: bool,
        /// Attach family labels: "rq:R,Q" or "ci:D". The permutation must
        /// be the corresponding family member.
        #[arg(long)]
        labels: Option<String>,
    },
    /// Run a named verification suite.
    Verify {
        /// One of: equivalence, lattice, reversibility, suspension,
        /// cascading, nest-sums, insertion.
        suite: String,
        /// Bound for both nest parameters (equivalence).
        #[arg(long, default_value_t = 10)]
        max: usize,
        #[arg(long, default_value_t = 6)]
        rmax: usize,
        #[arg(long, default_value_t = 6)]
        qmax: usize,
        /// Chafee-Infante bound for the suspension suite.
        #[arg(long, default_value_t = 10)]
        dmax: usize,
        /// Iterated suspensions per base meander.
        #[arg(long, default_value_t = 4)]
        iterations: usize,
        /// Instance set for the cascading suite ("default" or "table63").
        #[arg(long, default_value = "default")]
        set: String,
        /// Arc count for the table suite.
        #[arg(long, default_value_t = 63)]
        n: u64,
    },
    /// Enumerate the classification table for n arcs as CSV.
    Table {
        n: u64,
        /// Compare against the stored 63-arc fixture instead of printing.
        #[arg(long)]
        golden: bool,
    },
    /// Expand, reverse, and classify a continued fraction.
    Cfrac {
        /// A ratio "n0/den" to expand.
        #[arg(long, conflicts_with = "b")]
        ratio: Option<String>,
        /// Explicit terms "b0,b1,...".
        #[arg(long)]
        b: Option<String>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Chafee-Infante meander of dimension d.
    Ci {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        opts: GenOpts,
    },
    /// Primitive 3-nose meander, by Morse parameters r,q or nest sizes p,q.
    Threenose {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        opts: GenOpts,
    },
    /// A literal permutation, run through the same transformations.
    Sigma {
        /// Comma-separated permutation values.
        values: String,
        #[command(flatten)]
        opts: GenOpts,
    },
}

#[derive(Args)]
struct GenOpts {
    /// Rotate the meander by 180 degrees.
    #[arg(long)]
    kappa: bool,
    /// Reverse space, i.e. invert the permutation.
    #[arg(long)]
    rho: bool,
    /// Apply this many suspensions.
    #[arg(long, default_value_t = 0)]
    suspend: usize,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    format: TextFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Gen { kind } => gen(kind),
        Command::Check { sigma, format } => check(&parse_sigma(&sigma)?, format),
        Command::Graph {
            sigma,
            pointed,
            format,
            reversor,
            labels,
        } => graph(&parse_sigma(&sigma)?, pointed, format, reversor, labels.as_deref()),
        Command::Verify {
            suite,
            max,
            rmax,
            qmax,
            dmax,
            iterations,
            set,
            n,
        } => run_suite(&suite, max, rmax, qmax, dmax, iterations, &set, n),
        Command::Table { n, golden } => table(n, golden),
        Command::Cfrac { ratio, b } => cfrac_report(ratio.as_deref(), b.as_deref()),
    }
}

fn parse_sigma(input: &str) -> Result<Permutation, String> {
    let text = if input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        buf
    } else {
        input.to_string()
    };
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        serde_json::from_str::<Permutation>(trimmed).map_err(|e| e.to_string())
    } else {
        trimmed.parse::<Permutation>().map_err(|e| e.to_string())
    }
}

fn gen(kind: GenKind) -> Result<ExitCode, String> {
    let (sigma, opts) = match kind {
        GenKind::Ci { d, opts } => {
            if d < 1 {
                return Err("d must be at least 1".into());
            }
            (chafee_infante_permutation(d), opts)
        }
        GenKind::Threenose { r, p, q, opts } => {
            let sigma = match (r, p) {
                (Some(r), None) => {
                    if r < 1 || q < 1 {
                        return Err("r and q must be at least 1".into());
                    }
                    three_nose_permutation(r, q)
                }
                (None, Some(p)) => build_three_nose_meander(p, q)
                    .map_err(|e| e.to_string())?
                    .sigma()
                    .clone(),
                _ => return Err("give exactly one of --r or --p".into()),
            };
            (sigma, opts)
        }
        GenKind::Sigma { values, opts } => (parse_sigma(&values)?, opts),
    };
    let mut sigma = sigma;
    if opts.kappa {
        sigma = sigma.kappa();
    }
    if opts.rho {
        sigma = sigma.inverse();
    }
    sigma = sigma
        .suspend_times(opts.suspend)
        .map_err(|e| e.to_string())?;
    match opts.format {
        TextFormat::Text => println!("{sigma}"),
        TextFormat::Json => println!("{}", serde_json::to_string(&sigma).unwrap()),
    }
    Ok(ExitCode::SUCCESS)
}

fn check(sigma: &Permutation, format: TextFormat) -> Result<ExitCode, String> {
    let meander = Meander::from_sigma(sigma.clone());
    if let TextFormat::Json = format {
        return check_json(sigma, &meander);
    }
    println!("n: {}", meander.n());
    println!("dissipative: {}", meander.is_dissipative());
    if !meander.is_dissipative() {
        println!("sturm: false");
        return Ok(ExitCode::from(1));
    }
    println!("jordan: {}", meander.is_jordan());
    println!("morse: {}", meander.is_morse());
    println!("noses: {}", meander.nose_count());
    let iv = morse_indices(sigma).map_err(|e| e.to_string())?;
    println!("i_min: {}", iv.min());
    println!("i_max: {}", iv.max());
    if meander.is_morse() {
        let mp = morse_polynomial(sigma, false).map_err(|e| e.to_string())?;
        let counts: Vec<String> = mp.dense().iter().map(|c| c.to_string()).collect();
        println!("morse_counts: ({})", counts.join(","));
    }
    let sturm = meander.is_sturm();
    println!("sturm: {sturm}");
    Ok(if sturm {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn check_json(sigma: &Permutation, meander: &Meander) -> Result<ExitCode, String> {
    use sturm_core::invariants::{zero_numbers, Mode};
    let mut report = serde_json::json!({
        "n": meander.n(),
        "sigma": sigma.image(),
        "dissipative": meander.is_dissipative(),
        "sturm": meander.is_sturm(),
    });
    if meander.is_dissipative() {
        report["jordan"] = meander.is_jordan().into();
        report["morse"] = meander.is_morse().into();
        report["noses"] = meander.nose_count().into();
        let iv = morse_indices(sigma).map_err(|e| e.to_string())?;
        report["morse_indices"] = serde_json::to_value(&iv).unwrap();
        if meander.is_morse() {
            let mp = morse_polynomial(sigma, false).map_err(|e| e.to_string())?;
            report["morse_counts"] = serde_json::to_value(mp.dense()).unwrap();
            let z = zero_numbers(sigma, Mode::Strict).map_err(|e| e.to_string())?;
            report["zero_numbers"] = serde_json::to_value(&z).unwrap();
        }
    }
    println!("{report}");
    Ok(if meander.is_sturm() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn graph(
    sigma: &Permutation,
    pointed: bool,
    format: GraphFormat,
    reversor: bool,
    labels: Option<&str>,
) -> Result<ExitCode, String> {
    let mut g = connection_graph(sigma, pointed).map_err(|e| e.to_string())?;
    if let Some(spec) = labels {
        attach_labels(&mut g, sigma, pointed, spec)?;
    }
    let reversor_text = if reversor {
        let searched = if pointed {
            find_reversor(&g)
        } else {
            find_reversor(&connection_graph(sigma, true).map_err(|e| e.to_string())?)
        };
        Some(match searched {
            Some(r) => {
                let pairs: Vec<String> = r
                    .map()
                    .iter()
                    .filter(|(v, w)| v <= w)
                    .map(|(v, w)| format!("{v}<->{w}"))
                    .collect();
                pairs.join(" ")
            }
            None => "none".to_string(),
        })
    } else {
        None
    };
    match format {
        GraphFormat::Dot => {
            print!("{}", g.to_dot());
            if let Some(text) = reversor_text {
                println!("// reversor: {text}");
            }
        }
        GraphFormat::Json => {
            let mut value: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
            if let Some(text) = reversor_text {
                value["reversor"] = serde_json::Value::String(text);
            }
            println!("{value}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn attach_labels(
    g: &mut sturm_core::connections::ConnectionGraph,
    sigma: &Permutation,
    pointed: bool,
    spec: &str,
) -> Result<(), String> {
    use sturm_core::connections::STAR;
    let (family, params) = spec
        .split_once(':')
        .ok_or_else(|| "labels must look like rq:R,Q or ci:D".to_string())?;
    match family {
        "rq" => {
            let (r, q) = params
                .split_once(',')
                .ok_or_else(|| "rq labels need two parameters".to_string())?;
            let r: usize = r.trim().parse().map_err(|_| "bad r".to_string())?;
            let q: usize = q.trim().parse().map_err(|_| "bad q".to_string())?;
            if sigma != &three_nose_permutation(r, q) {
                return Err(format!("permutation is not the (r,q)=({r},{q}) family member"));
            }
            let labels = sturm_core::three_nose::equilibrium_labels(r, q);
            for v in 1..=sigma.n() {
                g.set_label(v, labels.label_at_meander(v).to_string());
            }
            if pointed {
                g.set_label(STAR, "A^0_0".to_string());
            }
        }
        "ci" => {
            let d: usize = params.trim().parse().map_err(|_| "bad d".to_string())?;
            if sigma != &chafee_infante_permutation(d) {
                return Err(format!("permutation is not the d={d} Chafee-Infante meander"));
            }
            let n = sigma.n();
            for j in 1..=d {
                g.set_label(sigma.apply(j), format!("A_{j}"));
            }
            for k in 0..=d {
                g.set_label(sigma.apply(n - k), format!("B_{k}"));
            }
            if pointed {
                g.set_label(STAR, "A_0".to_string());
            }
        }
        other => return Err(format!("unknown label family {other:?}")),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_suite(
    suite: &str,
    max: usize,
    rmax: usize,
    qmax: usize,
    dmax: usize,
    iterations: usize,
    set: &str,
    n: u64,
) -> Result<ExitCode, String> {
    let report = match suite {
        "equivalence" => verify::equivalence(max),
        "lattice" => verify::lattice(rmax, qmax),
        "reversibility" => verify::reversibility(rmax, qmax),
        "suspension" => verify::suspension(dmax, rmax.min(qmax), iterations),
        "cascading" => verify::cascading(set),
        "nest-sums" => verify::nest_sums(rmax, qmax),
        "insertion" => verify::insertion(rmax, qmax),
        "table" => verify::table63(n),
        "shape" => verify::pointed_graph_shape(rmax, qmax),
        other => return Err(format!("unknown suite {other:?}")),
    };
    println!("{}", report.summary());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn table(n: u64, golden: bool) -> Result<ExitCode, String> {
    let classes = cfrac::table_classes(n);
    let rows: Vec<TableRow> = classes
        .par_iter()
        .map(cfrac::evaluate_row)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let csv = cfrac::table_csv(&rows);
    if !golden {
        print!("{csv}");
        return Ok(ExitCode::SUCCESS);
    }
    if n != 63 {
        return Err("a golden fixture exists only for n = 63".into());
    }
    let fixture = include_str!("../../sturm-core/tests/fixtures/table63.csv");
    let expected: std::collections::BTreeSet<&str> =
        fixture.lines().skip(1).filter(|l| !l.is_empty()).collect();
    let produced: std::collections::BTreeSet<&str> =
        csv.lines().skip(1).filter(|l| !l.is_empty()).collect();
    let missing: Vec<&&str> = expected.difference(&produced).collect();
    let extra: Vec<&&str> = produced.difference(&expected).collect();
    if missing.is_empty() && extra.is_empty() {
        println!("golden: ok ({} rows)", produced.len());
        Ok(ExitCode::SUCCESS)
    } else {
        for row in missing {
            println!("golden: missing {row}");
        }
        for row in extra {
            println!("golden: extra   {row}");
        }
        Ok(ExitCode::from(1))
    }
}

fn cfrac_report(ratio: Option<&str>, b: Option<&str>) -> Result<ExitCode, String> {
    let cf = match (ratio, b) {
        (Some(ratio), None) => {
            let (n0, den) = ratio
                .split_once('/')
                .ok_or_else(|| "ratio must look like 63/8".to_string())?;
            let n0: u64 = n0.trim().parse().map_err(|_| "bad numerator".to_string())?;
            let den: u64 = den.trim().parse().map_err(|_| "bad denominator".to_string())?;
            ContinuedFraction::expand(n0, den).map_err(|e| e.to_string())?
        }
        (None, Some(b)) => {
            let terms: Vec<u64> = b
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| format!("bad term {t:?}")))
                .collect::<Result<_, _>>()?;
            ContinuedFraction::new(terms).map_err(|e| e.to_string())?
        }
        _ => return Err("give exactly one of --ratio or --b".into()),
    };
    println!("b: {cf}");
    println!("b*: {}", cf.reversed());
    let (n0, den) = cf.evaluate();
    println!("n0/(q+1): {n0}/{den}");
    println!("iso: {}", cf.is_isotropic());
    match cfrac::derived_quantities(&cf) {
        Ok(dq) => {
            println!("p: {}", dq.p);
            println!("q: {}", dq.q);
            println!("s: {}", dq.s);
            println!("d: {}", dq.d);
            println!("n: {}", dq.n);
            if cf.m() == 2 {
                let terms = cf.terms();
                let mp = cfrac::short_morse_polynomial(terms[0], terms[1], terms[2])
                    .map_err(|e| e.to_string())?;
                let counts: Vec<String> = mp.dense().iter().map(|c| c.to_string()).collect();
                println!("pointed_morse_counts: ({})", counts.join(","));
            }
        }
        Err(e) => println!("note: {e}"),
    }
    Ok(ExitCode::SUCCESS)
}
