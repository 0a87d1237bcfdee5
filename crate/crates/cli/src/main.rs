use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use soergel::bimodule::BottSamelson;
use soergel::coxeter::CoxeterGroup;
use soergel::hecke::{hw_rank_formula, Hecke};
use soergel::sheaves::BmpSheaf;
use soergel::smod::{hecke_pairing_of_words, hom_right_r, hom_zbar, BarBuilder};
use soergel::structure::Structure;
use soergel::suites::{self, Assertion, SuiteResult};

#[derive(Parser, Debug)]
#[command(name = "soergel", version, about = "Exact computations with Soergel bimodules and modules")]
struct Cli {
    /// Preset name or path to a JSON/TOML group description.
    #[arg(long, global = true, default_value = "A2")]
    group: String,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Recorded in the report; all computations are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of d(x, y) for all y up to a length bound.
    Dxy {
        #[arg(long, default_value_t = 3)]
        max_length: usize,
    },
    /// The sections P_x on the interval below an element.
    Pbasis {
        #[arg(long)]
        element: String,
    },
    /// Kazhdan-Lusztig basis elements up to a length bound.
    Klbasis {
        #[arg(long, default_value_t = 3)]
        max_length: usize,
    },
    /// Graded dimensions of hom spaces between Soergel modules of words.
    Homdim {
        /// Pairs `u:v`, e.g. `s:st` or `e:sts`.
        #[arg(required = true)]
        pairs: Vec<String>,
    },
    /// The basis P_{w,x} of the cohomology submodule of BS(w).
    Hw {
        #[arg(long)]
        word: String,
    },
    /// Stalks and restriction maps of a Braden-MacPherson sheaf.
    Sheaf {
        #[arg(long)]
        element: String,
    },
    /// Reproduce one of the two counterexamples.
    Counterexample {
        #[arg(value_enum)]
        which: Which,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 3)]
        max_length: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Universal,
    #[value(name = "affine-a2")]
    AffineA2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Gkm,
    Pieri,
    Homformula,
    Lightleaves,
    Sheaves,
}

fn realization(g: &CoxeterGroup) -> Value {
    let q = |v: &[soergel::rational::Q]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    json!({
        "name": g.name,
        "generators": g.generator_names(),
        "dim": g.real.dim,
        "roots": g.real.roots.iter().map(|r| q(r)).collect::<Vec<_>>(),
        "coroots": g.real.coroots.iter().map(|r| q(r)).collect::<Vec<_>>(),
    })
}

fn conventions() -> Value {
    json!({
        "string_basis": "bit i of c_e refers to letter i; 1 = c_id (degree -1), 0 = c_s (degree +1)",
        "degrees": "linear polynomials have degree 2",
        "polynomials": "canonical serialization, monomials in increasing lexicographic order",
        "stalk_character": "sum of v^(-g - l(x)) over stalk generators of degree g",
    })
}

fn run(cli: &Cli) -> Result<(Value, Vec<Assertion>), String> {
    let g = CoxeterGroup::resolve(&cli.group).map_err(|e| e.to_string())?;
    let word = |t: &str| g.parse_word(t).map_err(|e| e.to_string());
    let element = |t: &str| g.parse_element(t).map_err(|e| e.to_string());
    let suite = |r: SuiteResult| (r.results, r.assertions);
    Ok(match &cli.command {
        Command::Dxy { max_length } => {
            let st = Structure::new(&g);
            let mut table = BTreeMap::new();
            for y in g.ball(*max_length) {
                let row = st.nh.d_row(&y).map_err(|e| e.to_string())?;
                let entries: BTreeMap<String, String> = row.iter().map(|(x, p)| (g.format(x), p.canonical())).collect();
                table.insert(g.format(&y), entries);
            }
            let (_, assertions) = suite(suites::dxy_suite(&g, *max_length));
            (json!({ "d": table }), assertions)
        }
        Command::Pbasis { element: e } => {
            let w = element(e)?;
            let st = Structure::new(&g);
            let omega = g.interval(&w).to_vec();
            let mut out = BTreeMap::new();
            let mut ok = true;
            for x in &omega {
                let p = st.p(x, &omega);
                ok &= st.validate_gkm(&p);
                let vals: BTreeMap<String, String> = p.values.iter().map(|(v, f)| (g.format(v), f.canonical())).collect();
                out.insert(g.format(x), vals);
            }
            (json!({ "P": out }), vec![Assertion::new("pbasis.edge_congruences", ok, format!("{} sections", omega.len()))])
        }
        Command::Klbasis { max_length } => {
            let h = Hecke::new(&g);
            let mut out = BTreeMap::new();
            let mut ok = true;
            for w in g.ball(*max_length) {
                let b = h.kl_basis(&w);
                let mut coeffs = BTreeMap::new();
                for x in g.interval(&w).iter() {
                    let c = b.coeff(x);
                    ok &= if *x == w { c == soergel::hecke::Laurent::one() } else { c.in_v_zv() || c.is_zero() };
                    if !c.is_zero() {
                        coeffs.insert(g.format(x), c.to_string());
                    }
                }
                out.insert(g.format(&w), coeffs);
            }
            (json!({ "kl": out }), vec![Assertion::new("klbasis.normalization", ok, "h_{w,w} = 1 and h_{x,w} in vZ[v]")])
        }
        Command::Homdim { pairs } => {
            let h = Hecke::new(&g);
            let b = BarBuilder::new(&g);
            let mut rows = Vec::new();
            let mut assertions = Vec::new();
            for p in pairs {
                let (u, v) = p.split_once(':').ok_or_else(|| format!("pair {p:?} must look like u:v"))?;
                let (u, v) = (word(u)?, word(v)?);
                let mu = b.bar_bs(&u).map_err(|e| e.to_string())?;
                let mv = b.bar_bs(&v).map_err(|e| e.to_string())?;
                let z = hom_zbar(&mu, &mv).grdim();
                let r = hom_right_r(&mu, &mv).grdim();
                let pairing = hecke_pairing_of_words(&h, &u, &v);
                let name = format!("({}, {})", g.format_word(&u), g.format_word(&v));
                assertions.push(Assertion::new(format!("homdim.{name}"), z == pairing, format!("Z-bar {z}, pairing {pairing}")));
                rows.push(json!({ "u": g.format_word(&u), "v": g.format_word(&v), "zbar": z.to_string(),
                    "right_r": r.to_string(), "pairing": pairing.to_string() }));
            }
            (json!({ "pairs": rows }), assertions)
        }
        Command::Hw { word: w } => {
            let w = word(w)?;
            let bs = BottSamelson::new(&g, &w);
            let hw = bs.hw_basis().map_err(|e| e.to_string())?;
            let mut out = BTreeMap::new();
            let mut rank = soergel::hecke::Laurent::zero();
            for (x, p) in &hw {
                rank.add_term(p.degree().unwrap_or(0) as i32, 1);
                out.insert(g.format(x), p.to_string());
            }
            let formula = hw_rank_formula(bs.omega(), w.len());
            (
                json!({ "word": g.format_word(&w), "basis": out, "graded_rank": rank.to_string() }),
                vec![Assertion::new("hw.graded_rank", rank == formula, format!("{rank} vs {formula}"))],
            )
        }
        Command::Sheaf { element: e } => {
            let w = element(e)?;
            let sheaf = BmpSheaf::build(&g, &w).map_err(|e| e.to_string())?;
            let mism = sheaf.kl_mismatches(&Hecke::new(&g));
            let details = mism.iter().map(|(x, a, b)| format!("{}: {a} vs {b}", g.format(x))).collect::<Vec<_>>().join("; ");
            (
                serde_json::to_value(sheaf.dump()).map_err(|e| e.to_string())?,
                vec![Assertion::new("sheaf.stalks_match_kl", mism.is_empty(), details)],
            )
        }
        Command::Counterexample { which } => match which {
            Which::Universal => suite(suites::universal_suite()),
            Which::AffineA2 => suite(suites::affine_suite()),
        },
        Command::Verify { suite: s, max_length } => match s {
            Suite::Gkm => {
                let name = g.name.clone();
                let r = suites::realization_suite(&[name.as_str()], *max_length);
                let (res, mut a) = suite(r);
                a.extend(suites::dxy_suite(&g, *max_length).assertions.into_iter().filter(|x| x.name == "dxy.edge_congruences"));
                (res, a)
            }
            Suite::Pieri => suite(suites::pieri_suite(&g, *max_length)),
            Suite::Homformula => suite(suites::homformula_suite(&g, *max_length, g.name == "A2" || g.name == "B2")),
            Suite::Lightleaves => suite(suites::lightleaves_suite(&g, *max_length)),
            Suite::Sheaves => suite(suites::sheaves_suite(&g, *max_length)),
        },
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Dxy { .. } => "dxy",
        Command::Pbasis { .. } => "pbasis",
        Command::Klbasis { .. } => "klbasis",
        Command::Homdim { .. } => "homdim",
        Command::Hw { .. } => "hw",
        Command::Sheaf { .. } => "sheaf",
        Command::Counterexample { .. } => "counterexample",
        Command::Verify { .. } => "verify",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = json!({ "args": format!("{:?}", cli.command), "seed": cli.seed });
    let (report, ok) = match run(&cli) {
        Ok((results, assertions)) => {
            let ok = assertions.iter().all(Assertion::passed);
            let realization = CoxeterGroup::resolve(&cli.group).map(|g| realization(&g)).unwrap_or(Value::Null);
            (
                json!({
                    "command": command_name(&cli.command),
                    "group": cli.group,
                    "params": params,
                    "realization": realization,
                    "conventions": conventions(),
                    "results": results,
                    "assertions": assertions,
                }),
                ok,
            )
        }
        Err(e) => (json!({ "command": command_name(&cli.command), "group": cli.group, "params": params, "error": e }), false),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(path) = &cli.output {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::FAILURE;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
