//! Command-line front end: parse JSON inputs, dispatch to the library,
//! print one canonical JSON result on standard output.
//!
//! Exit codes: 0 satisfiable/pass/true, 1 unsatisfiable/fail/false,
//! 2 usage or input error, 3 capacity bound exceeded, 4 oracle divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use omegacore::amalgamation::{age, check_amalgamation, extension_property_probe, AmalgamationCheck};
use omegacore::cores::{compute_core, is_core};
use omegacore::definability::{canonical_pp_check, orbit_pp_formula, PpVerdict};
use omegacore::io;
use omegacore::morphisms::{find_homomorphism, find_isomorphism, orbits};
use omegacore::oracle;
use omegacore::reduction::{brute_force_solve, solve_with_constants};
use omegacore::templates::{
    solve_betweenness, solve_no_mono_tri, solve_quartets, solve_rooted_triples,
    solve_switching_acyclic, solve_tree_description, solve_triangle_free, NoMonoTriOutcome,
    SwitchingOutcome, TriangleFreeOutcome,
};
use omegacore::{Caps, Error, FinStructure};

#[derive(Parser)]
#[command(name = "omegacore", version, about = "Finite structures, cores, and template solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the core of a structure.
    Core {
        /// Structure file.
        structure: PathBuf,
    },
    /// Check whether a structure is a core.
    IsCore {
        /// Structure file.
        structure: PathBuf,
    },
    /// Search for a homomorphism between two structures.
    Hom {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Search for an isomorphism between two structures.
    Iso {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Partition all k-tuples into automorphism orbits.
    Orbits {
        /// Structure file.
        structure: PathBuf,
        /// Tuple arity k.
        #[arg(long)]
        arity: usize,
    },
    /// Check pp-definability of a relation over a structure.
    Ppdef {
        /// Structure file.
        structure: PathBuf,
        /// Check this relation of the structure against the others.
        #[arg(long, conflicts_with = "relation")]
        symbol: Option<String>,
        /// File `{"tuples": [[0],[1]]}` with the relation to check.
        #[arg(long)]
        relation: Option<PathBuf>,
    },
    /// Emit the pp formula defining a tuple's orbit over a core.
    OrbitFormula {
        /// Structure file; must be a core.
        structure: PathBuf,
        /// Tuple, comma-separated: `--tuple 0,1`.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        tuple: Vec<usize>,
    },
    /// Exhaustively check the amalgamation property up to a size bound.
    Amalgam {
        /// Class specification file.
        class: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// List the members of a structure's age up to a size bound.
    Age {
        /// Structure file.
        structure: PathBuf,
        #[arg(long)]
        bound: usize,
    },
    /// Solve an instance against a named template or a template file.
    Solve {
        /// One of triangle-free, no-mono-tri, betweenness, switching,
        /// triples, quartets, tree-description; anything else is read as a
        /// structure file for generic homomorphism solving.
        #[arg(long)]
        template: String,
        /// Instance file in the template's format.
        #[arg(long)]
        instance: PathBuf,
        /// Also run the brute-force oracle and require agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Solve an instance over a core pinned by constants.
    Reduce {
        /// Constant specification file.
        #[arg(long)]
        spec: PathBuf,
        /// Instance file over the pinned signature.
        #[arg(long)]
        instance: PathBuf,
        /// Also run the brute-force oracle and require agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Count extension-property witnesses over a class member.
    Probe {
        /// Structure file.
        #[arg(long)]
        structure: PathBuf,
        /// Class specification file.
        #[arg(long)]
        class: PathBuf,
        /// Largest size of each of the two subsets.
        #[arg(long)]
        bound: usize,
    },
}

/// A computed result: JSON for standard output plus the exit code.
struct Outcome {
    value: Value,
    code: u8,
}

impl Outcome {
    fn pass(value: Value) -> Self {
        Outcome { value, code: 0 }
    }

    fn of(value: Value, satisfiable: bool) -> Self {
        Outcome {
            value,
            code: if satisfiable { 0 } else { 1 },
        }
    }
}

/// A failure: message for standard error plus the exit code.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 2,
        }
    }

    fn divergence(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Capacity { .. } => 3,
            _ => 2,
        };
        Failure {
            message: err.to_string(),
            code,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = match caps_from_env() {
        Ok(caps) => caps,
        Err(failure) => {
            eprintln!("{}", failure.message);
            return ExitCode::from(failure.code);
        }
    };
    match run(cli.command, &caps) {
        Ok(outcome) => {
            println!("{}", io::to_canonical_string(&outcome.value));
            ExitCode::from(outcome.code)
        }
        Err(failure) => {
            eprintln!("{}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn caps_from_env() -> Result<Caps, Failure> {
    match std::env::var("OMEGACORE_CAPS") {
        Err(_) => Ok(Caps::default()),
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| Failure::usage(format!("OMEGACORE_CAPS: {e}"))),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Reads and parses a file, prefixing errors with the file name.
fn parse_file<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T, Error>) -> Result<T, Failure> {
    let text = read_text(path)?;
    parse(&text).map_err(|e| {
        let mut failure = Failure::from(e);
        failure.message = format!("{}: {}", path.display(), failure.message);
        failure
    })
}

fn read_structure(path: &Path) -> Result<FinStructure, Failure> {
    parse_file(path, io::parse_structure)
}

fn run(command: Command, caps: &Caps) -> Result<Outcome, Failure> {
    match command {
        Command::Core { structure } => {
            let s = read_structure(&structure)?;
            let result = compute_core(&s, caps)?;
            Ok(Outcome::pass(io::core_result_json(&result)))
        }
        Command::IsCore { structure } => {
            let s = read_structure(&structure)?;
            let check = is_core(&s, caps)?;
            let value = match &check.witness {
                None => json!({ "is_core": true }),
                Some(w) => json!({ "is_core": false, "witness": io::mapping_json(w) }),
            };
            Ok(Outcome::of(value, check.is_core))
        }
        Command::Hom { from, to } => {
            let src = read_structure(&from)?;
            let dst = read_structure(&to)?;
            Ok(existence_outcome(find_homomorphism(&src, &dst)?))
        }
        Command::Iso { from, to } => {
            let src = read_structure(&from)?;
            let dst = read_structure(&to)?;
            Ok(existence_outcome(find_isomorphism(&src, &dst)?))
        }
        Command::Orbits { structure, arity } => {
            let s = read_structure(&structure)?;
            let partition = orbits(&s, arity, caps)?;
            let orbits: Vec<Value> = partition
                .orbits()
                .iter()
                .map(|o| json!({ "representative": o.representative, "tuples": o.tuples }))
                .collect();
            Ok(Outcome::pass(json!({ "arity": arity, "orbits": orbits })))
        }
        Command::Ppdef {
            structure,
            symbol,
            relation,
        } => {
            let s = read_structure(&structure)?;
            let (over, tuples) = match (symbol, relation) {
                (Some(name), None) => {
                    let tuples = s
                        .tuples_of(&name)
                        .map_err(Failure::from)?
                        .iter()
                        .cloned()
                        .collect();
                    (s.without_relation(&name)?, tuples)
                }
                (None, Some(path)) => {
                    let tuples = parse_file(&path, parse_relation)?;
                    (s, tuples)
                }
                _ => {
                    return Err(Failure::usage(
                        "ppdef needs exactly one of --symbol or --relation",
                    ))
                }
            };
            let verdict = canonical_pp_check(&over, &tuples, caps)?;
            Ok(match verdict {
                PpVerdict::Definable { witness } => Outcome::pass(json!({
                    "verdict": "definable",
                    "witness": io::formula_json(&witness),
                })),
                PpVerdict::NotDefinable { counterexample } => Outcome {
                    value: json!({
                        "verdict": "not-definable",
                        "counterexample": counterexample,
                    }),
                    code: 1,
                },
                PpVerdict::Unknown => Outcome {
                    value: json!({ "verdict": "unknown" }),
                    code: 3,
                },
            })
        }
        Command::OrbitFormula { structure, tuple } => {
            let s = read_structure(&structure)?;
            let formula = orbit_pp_formula(&s, &tuple, caps)?;
            Ok(Outcome::pass(json!({ "formula": io::formula_json(&formula) })))
        }
        Command::Amalgam { class, bound } => {
            let spec = parse_file(&class, io::parse_class_spec)?;
            match check_amalgamation(&spec, bound, caps)? {
                AmalgamationCheck::Pass => {
                    Ok(Outcome::pass(json!({ "amalgamation": true, "bound": bound })))
                }
                AmalgamationCheck::Fail(witness) => Ok(Outcome {
                    value: json!({
                        "amalgamation": false,
                        "bound": bound,
                        "witness": {
                            "a": io::structure_json(&witness.a),
                            "b1": io::structure_json(&witness.b1),
                            "b2": io::structure_json(&witness.b2),
                            "e1": io::mapping_json(&witness.e1),
                            "e2": io::mapping_json(&witness.e2),
                        },
                    }),
                    code: 1,
                }),
            }
        }
        Command::Age { structure, bound } => {
            let s = read_structure(&structure)?;
            let members: Vec<Value> = age(&s, bound)?.iter().map(io::structure_json).collect();
            Ok(Outcome::pass(json!({ "bound": bound, "members": members })))
        }
        Command::Solve {
            template,
            instance,
            oracle,
        } => solve_command(&template, &instance, oracle, caps),
        Command::Reduce {
            spec,
            instance,
            oracle,
        } => {
            let spec = parse_file(&spec, |text| io::parse_constant_spec(text, caps))?;
            let inst = read_structure(&instance)?;
            let found = solve_with_constants(&spec, &inst, caps)?;
            if oracle {
                let slow = brute_force_solve(&spec.expanded_template(), &inst, caps)?;
                check_agreement("reduce", found.is_some(), slow.is_some())?;
            }
            Ok(match found {
                Some(assignment) => Outcome::of(
                    json!({ "satisfiable": true, "witness": io::mapping_json(&assignment) }),
                    true,
                ),
                None => Outcome::of(json!({ "satisfiable": false }), false),
            })
        }
        Command::Probe {
            structure,
            class,
            bound,
        } => {
            let g = read_structure(&structure)?;
            let spec = parse_file(&class, io::parse_class_spec)?;
            let stats = extension_property_probe(&g, &spec, bound)?;
            Ok(Outcome::of(
                json!({ "tested": stats.tested, "satisfied": stats.satisfied }),
                stats.satisfied == stats.tested,
            ))
        }
    }
}

fn existence_outcome(found: Option<omegacore::Mapping>) -> Outcome {
    match found {
        Some(m) => Outcome::of(
            json!({ "exists": true, "witness": io::mapping_json(&m) }),
            true,
        ),
        None => Outcome::of(json!({ "exists": false }), false),
    }
}

fn parse_relation(text: &str) -> Result<std::collections::BTreeSet<Vec<usize>>, Error> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RelationFile {
        tuples: Vec<Vec<usize>>,
    }
    let file: RelationFile =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed JSON: {e}")))?;
    Ok(file.tuples.into_iter().collect())
}

fn check_agreement(what: &str, fast: bool, slow: bool) -> Result<(), Failure> {
    if fast == slow {
        Ok(())
    } else {
        Err(Failure::divergence(format!(
            "{what}: solver said {fast}, oracle said {slow}"
        )))
    }
}

fn solve_command(
    template: &str,
    instance: &Path,
    oracle: bool,
    caps: &Caps,
) -> Result<Outcome, Failure> {
    match template {
        "triangle-free" => {
            let g = read_structure(instance)?;
            let outcome = solve_triangle_free(&g)?;
            let (sat, value) = match outcome {
                TriangleFreeOutcome::TriangleFree => (true, json!({ "satisfiable": true })),
                TriangleFreeOutcome::HasLoop(v) => {
                    (false, json!({ "satisfiable": false, "witness": [v] }))
                }
                TriangleFreeOutcome::HasTriangle(t) => {
                    (false, json!({ "satisfiable": false, "witness": t }))
                }
            };
            if oracle {
                check_agreement("triangle-free", sat, oracle::triangle_free(&g)?)?;
            }
            Ok(Outcome::of(value, sat))
        }
        "no-mono-tri" => {
            let g = read_structure(instance)?;
            let outcome = solve_no_mono_tri(&g, caps)?;
            let (sat, value) = match outcome {
                NoMonoTriOutcome::Partition(side) => {
                    (true, json!({ "satisfiable": true, "witness": side }))
                }
                NoMonoTriOutcome::HasLoop(v) => {
                    (false, json!({ "satisfiable": false, "witness": [v] }))
                }
                NoMonoTriOutcome::Unsatisfiable => (false, json!({ "satisfiable": false })),
            };
            if oracle {
                check_agreement("no-mono-tri", sat, oracle::no_mono_tri(&g, caps)?)?;
            }
            Ok(Outcome::of(value, sat))
        }
        "betweenness" => {
            let inst = parse_file(instance, io::parse_betweenness)?;
            let found = solve_betweenness(&inst, caps)?;
            if oracle {
                check_agreement("betweenness", found.is_some(), oracle::betweenness(&inst, caps)?)?;
            }
            Ok(match found {
                Some(numbering) => Outcome::of(
                    json!({ "satisfiable": true, "witness": numbering }),
                    true,
                ),
                None => Outcome::of(json!({ "satisfiable": false }), false),
            })
        }
        "switching" => {
            let d = read_structure(instance)?;
            let outcome = solve_switching_acyclic(&d, caps)?;
            let (sat, value) = match outcome {
                SwitchingOutcome::Partition(side) => {
                    (true, json!({ "satisfiable": true, "witness": side }))
                }
                SwitchingOutcome::HasLoop(v) => {
                    (false, json!({ "satisfiable": false, "witness": [v] }))
                }
                SwitchingOutcome::Unsatisfiable => (false, json!({ "satisfiable": false })),
            };
            if oracle {
                check_agreement("switching", sat, oracle::switching_acyclic(&d, caps)?)?;
            }
            Ok(Outcome::of(value, sat))
        }
        "triples" => {
            let ts = parse_file(instance, io::parse_triples)?;
            let found = solve_rooted_triples(&ts)?;
            if oracle {
                check_agreement("triples", found.is_some(), oracle::rooted_triples(&ts, caps)?)?;
            }
            Ok(match found {
                Some(tree) => Outcome::of(
                    json!({
                        "satisfiable": true,
                        "witness": io::rooted_tree_json(&tree, ts.leaves()),
                    }),
                    true,
                ),
                None => Outcome::of(json!({ "satisfiable": false }), false),
            })
        }
        "quartets" => {
            let qs = parse_file(instance, io::parse_quartets)?;
            let found = solve_quartets(&qs, caps)?;
            if oracle {
                check_agreement("quartets", found.is_some(), oracle::quartets(&qs, caps)?)?;
            }
            Ok(match found {
                Some(tree) => Outcome::of(
                    json!({
                        "satisfiable": true,
                        "witness": io::unrooted_tree_json(&tree, qs.leaves()),
                    }),
                    true,
                ),
                None => Outcome::of(json!({ "satisfiable": false }), false),
            })
        }
        "tree-description" => {
            let td = parse_file(instance, io::parse_tree_description)?;
            let found = solve_tree_description(&td, caps)?;
            if oracle {
                check_agreement(
                    "tree-description",
                    found.is_some(),
                    oracle::tree_description(&td, caps)?,
                )?;
            }
            Ok(match found {
                Some(forest) => Outcome::of(
                    json!({ "satisfiable": true, "witness": io::forest_json(&forest) }),
                    true,
                ),
                None => Outcome::of(json!({ "satisfiable": false }), false),
            })
        }
        path => {
            let dst = read_structure(Path::new(path))?;
            let src = read_structure(instance)?;
            let found = find_homomorphism(&src, &dst)?;
            if oracle {
                let slow = brute_force_solve(&dst, &src, caps)?;
                check_agreement("solve", found.is_some(), slow.is_some())?;
            }
            Ok(match found {
                Some(m) => Outcome::of(
                    json!({ "satisfiable": true, "witness": io::mapping_json(&m) }),
                    true,
                ),
                None => Outcome::of(json!({ "satisfiable": false }), false),
            })
        }
    }
}
