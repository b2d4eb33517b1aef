use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use orthinv::orthogroup::Budget;
use orthinv_cli::commands::{self, Report};
use orthinv_cli::parse::{parse_field, parse_form, parse_map, ParseError};
use orthinv_cli::render::render_table;
use orthinv_cli::{exit_code, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Table,
}

#[derive(Parser)]
#[command(name = "orthinv", version, about = "Involutions of orthogonal groups in characteristic 2")]
struct Cli {
    /// gf2 | gf4 | gf8 | gf16[:modulus] | gf:<modulus> | f2t
    #[arg(long, global = true, default_value = "gf2")]
    field: String,
    /// e.g. "[1,1]_|_<0>"; empty for the zero space
    #[arg(long, global = true, default_value = "")]
    form: String,
    #[arg(long, global = true, value_enum, default_value = "table")]
    out: Out,
    /// Upper bound on the number of group elements enumerated
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads for enumeration
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Witt decomposition: m, d, anisotropic kernel
    Normalize,
    /// Descriptor of one involution
    Classify {
        /// tau(w), null(i,j), radswap(i,j), id, products with '*', or a row-major matrix
        #[arg(long)]
        map: String,
    },
    /// Conjugacy of two involutions, checked against enumeration when feasible
    Conjugate {
        #[arg(long)]
        map: String,
        #[arg(long)]
        other: String,
    },
    /// Centralizer of an involution and its predicted structure
    Fixgroup {
        #[arg(long)]
        map: String,
    },
    /// Involution classes of the whole group
    Census,
    /// Every structure check on every involution
    Verify {
        /// Replace one involution by a non-isometry
        #[arg(long)]
        inject_fault: bool,
    },
}

fn input_error(what: &str, e: ParseError) -> ExitCode {
    eprintln!("error: {what}: {e}");
    ExitCode::from(EXIT_INPUT as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    let spec = match parse_field(&cli.field) {
        Ok(s) => s,
        Err(e) => return input_error("--field", e),
    };
    let q = match parse_form(spec, &cli.form) {
        Ok(q) => q,
        Err(e) => return input_error("--form", e),
    };
    let mut budget = Budget::default();
    if let Some(b) = cli.budget {
        budget.max_elements = b;
    }
    let map = |s: &str, what: &str| parse_map(&q, s).map_err(|e| input_error(what, e));
    let result = match &cli.cmd {
        Cmd::Normalize => commands::normalize(&q),
        Cmd::Classify { map: m } => match map(m, "--map") {
            Ok(m) => commands::classify_cmd(&q, m),
            Err(c) => return c,
        },
        Cmd::Conjugate { map: a, other: b } => match (map(a, "--map"), map(b, "--other")) {
            (Ok(a), Ok(b)) => commands::conjugate(&q, a, b, &budget),
            (Err(c), _) | (_, Err(c)) => return c,
        },
        Cmd::Fixgroup { map: m } => match map(m, "--map") {
            Ok(m) => commands::fixgroup(&q, m, &budget),
            Err(c) => return c,
        },
        Cmd::Census => commands::census(&q, &budget),
        Cmd::Verify { inject_fault } => commands::verify(&q, &budget, *inject_fault),
    };
    match result {
        Ok(Report { json, passed }) => {
            match cli.out {
                Out::Json => println!("{}", serde_json::to_string_pretty(&json).expect("json value")),
                Out::Table => print!("{}", render_table(&json)),
            }
            ExitCode::from(if passed { EXIT_PASS } else { EXIT_FAIL } as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
