//! `automata` — validate, run, compare and grade machine definitions.
//!
//! Exit codes: 0 success (all machines valid / machines equivalent / report
//! written), 1 negative result (invalid machine, inequivalence, runtime
//! error, or non-full score under `--strict`), 2 usage error, 3 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use automata::equiv::{
    dfa_equiv_decide, test_equiv_lang, test_equiv_tm_output, EquivVerdict, Method, TestConfig,
};
use automata::exec::{run_dfa, run_pda, run_tm, PdaOutcome, RunBounds, TmStatus};
use automata::grade::{grade_submission, parse_assignment, render_gradescope_json};
use automata::model::{build_file, form_name, Machine};
use automata::sexpr::{parse_sexprs, print_word, print_words, word_from_sexpr, Atom, SExpr, Word};

#[derive(Parser)]
#[command(name = "automata", version, about = "Textbook automata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every machine definition in a file.
    Validate {
        /// File with one or more gen-dfa / gen-pda / gen-tm forms.
        file: PathBuf,
    },
    /// Run one machine on a word.
    Run {
        /// File with one or more machine definitions.
        file: PathBuf,
        /// Name of the machine to run; defaults to the first definition.
        #[arg(long)]
        name: Option<String>,
        /// Whitespace-separated letters; an empty string is the empty word.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Test two machines for semantic equivalence.
    Equiv {
        /// File with the machine under test (first definition is used).
        student_file: PathBuf,
        /// File with the reference machine (first definition is used).
        reference_file: PathBuf,
        /// Number of test words.
        #[arg(long, default_value_t = 1000)]
        tests: usize,
        /// Maximum random word length.
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: usize,
        /// Seed for the random word stream.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decide DFA equivalence exactly instead of by testing.
        #[arg(long)]
        exact_dfa: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Grade a submission against an assignment and write a JSON report.
    Grade {
        /// Assignment file: (assignment ...), reference machine, checks,
        /// properties.
        #[arg(long)]
        assignment: PathBuf,
        /// Submission file with the student's machine definition.
        #[arg(long)]
        submission: PathBuf,
        /// Where to write the JSON results.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the assignment's random seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Exit nonzero unless the submission earns the full score.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args)]
struct BoundArgs {
    /// Maximum PDA execution-tree depth.
    #[arg(long, default_value_t = 1000)]
    depth: usize,
    /// Maximum number of TM steps.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
}

impl BoundArgs {
    fn to_bounds(&self) -> RunBounds {
        RunBounds {
            pda_depth: self.depth,
            tm_steps: self.steps,
        }
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Run {
            file,
            name,
            word,
            bounds,
        } => run(&file, name.as_deref(), &word, &bounds.to_bounds()),
        Command::Equiv {
            student_file,
            reference_file,
            tests,
            max_len,
            seed,
            exact_dfa,
            bounds,
        } => {
            let cfg = TestConfig {
                num_tests: tests,
                max_word_len: max_len,
                exhaustive_len: TestConfig::default().exhaustive_len.min(max_len),
                seed,
                bounds: bounds.to_bounds(),
                max_reported: 3,
            };
            equiv(&student_file, &reference_file, &cfg, exact_dfa)
        }
        Command::Grade {
            assignment,
            submission,
            out,
            seed,
            strict,
        } => grade(&assignment, &submission, &out, seed, strict),
    }
}

fn read(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_IO)
    })
}

fn parse_file(path: &Path) -> Result<Vec<SExpr>, ExitCode> {
    let text = read(path)?;
    parse_sexprs(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_FAIL)
    })
}

fn validate(file: &Path) -> ExitCode {
    let forms = match parse_file(file) {
        Ok(forms) => forms,
        Err(code) => return code,
    };
    let built = build_file(&forms);
    if built.machines.is_empty() {
        eprintln!("error: no machine definitions in {}", file.display());
        return ExitCode::from(EXIT_FAIL);
    }
    let mut all_valid = true;
    for form in &built.machines {
        let label = form_name(&forms[form.index])
            .map(|n| n.to_ascii_lowercase())
            .unwrap_or_else(|| format!("form {}", form.index + 1));
        match &form.result {
            Ok(machine) => println!("{label}: valid {}", machine.kind()),
            Err(errors) => {
                all_valid = false;
                println!("{label}: invalid");
                for error in errors {
                    println!("  {}", error.message);
                }
            }
        }
    }
    if all_valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn parse_word_arg(word: &str) -> Result<Word, ExitCode> {
    let trimmed = word.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let forms = parse_sexprs(trimmed).map_err(|e| {
        eprintln!("error: bad --word: {e}");
        ExitCode::from(EXIT_FAIL)
    })?;
    // Accept both a bare letter sequence ("0 1 1") and a single word literal
    // ("(0 1 1)" or ":e").
    if let [single] = forms.as_slice() {
        if let Some(word) = word_from_sexpr(single) {
            return Ok(word);
        }
    }
    forms
        .iter()
        .map(|form| {
            Atom::from_sexpr(form).ok_or_else(|| {
                eprintln!("error: bad --word: {form} is not a letter");
                ExitCode::from(EXIT_FAIL)
            })
        })
        .collect()
}

fn first_machine(forms: &[SExpr], file: &Path, name: Option<&str>) -> Result<Machine, ExitCode> {
    let built = build_file(forms);
    if built.machines.is_empty() {
        eprintln!("error: no machine definitions in {}", file.display());
        return Err(ExitCode::from(EXIT_FAIL));
    }
    let wanted = name.map(str::to_ascii_uppercase);
    let selected = match &wanted {
        None => built.machines.first(),
        Some(n) => built
            .machines
            .iter()
            .find(|form| form_name(&forms[form.index]).as_deref() == Some(n)),
    };
    let Some(selected) = selected else {
        eprintln!(
            "error: no machine named {} in {}",
            wanted.unwrap_or_default().to_ascii_lowercase(),
            file.display()
        );
        return Err(ExitCode::from(EXIT_FAIL));
    };
    match &selected.result {
        Ok(machine) => Ok(machine.clone()),
        Err(errors) => {
            for error in errors {
                eprintln!("error: {}", error.message);
            }
            Err(ExitCode::from(EXIT_FAIL))
        }
    }
}

fn run(file: &Path, name: Option<&str>, word: &str, bounds: &RunBounds) -> ExitCode {
    let forms = match parse_file(file) {
        Ok(forms) => forms,
        Err(code) => return code,
    };
    let machine = match first_machine(&forms, file, name) {
        Ok(machine) => machine,
        Err(code) => return code,
    };
    let word = match parse_word_arg(word) {
        Ok(word) => word,
        Err(code) => return code,
    };
    let outcome = match &machine {
        Machine::Dfa(dfa) => run_dfa(dfa, &word).map(|state| state.to_string()),
        Machine::Pda(pda) => run_pda(pda, &word, bounds.pda_depth).map(|outcome| {
            match outcome {
                PdaOutcome::Accepted => "t",
                PdaOutcome::NotAccepted { .. } => "nil",
            }
            .to_string()
        }),
        Machine::Tm(tm) => run_tm(tm, &word, bounds.tm_steps).map(|config| {
            let status = match config.status {
                TmStatus::Accepted => "accepted",
                TmStatus::Rejected => "rejected",
                TmStatus::OutOfFuel => "out-of-fuel",
            };
            let output = automata::exec::remove_final_nils(automata::exec::left_of_head(&config));
            format!("{status} {}", print_word(&output))
        }),
    };
    match outcome {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn equiv(student_file: &Path, reference_file: &Path, cfg: &TestConfig, exact_dfa: bool) -> ExitCode {
    let load = |path: &Path| -> Result<Machine, ExitCode> {
        let forms = parse_file(path)?;
        first_machine(&forms, path, None)
    };
    let student = match load(student_file) {
        Ok(machine) => machine,
        Err(code) => return code,
    };
    let reference = match load(reference_file) {
        Ok(machine) => machine,
        Err(code) => return code,
    };
    let verdict = match (&student, &reference) {
        (Machine::Dfa(a), Machine::Dfa(b)) if exact_dfa => Ok(dfa_equiv_decide(a, b)),
        (Machine::Tm(a), Machine::Tm(b)) => {
            // Language first, then outputs; the first failing test decides.
            match test_equiv_lang(&student, &reference, cfg) {
                Ok(EquivVerdict::Equivalent { .. }) => test_equiv_tm_output(a, b, cfg),
                other => other,
            }
        }
        _ => test_equiv_lang(&student, &reference, cfg),
    };
    match verdict {
        Ok(EquivVerdict::Equivalent { by }) => {
            let how = match by {
                Method::Decision => "decision procedure",
                Method::Testing => "testing",
            };
            println!("equivalent ({how})");
            ExitCode::SUCCESS
        }
        Ok(EquivVerdict::NotEquivalent { witnesses }) => {
            println!("not equivalent; misclassified words:");
            println!("{}", print_words(&witnesses));
            ExitCode::from(EXIT_FAIL)
        }
        Ok(EquivVerdict::AlphabetMismatch { witness }) => {
            println!("{}", automata::grade::WRONG_ALPHABET_FEEDBACK);
            println!("witness symbol: {witness}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn grade(
    assignment_path: &Path,
    submission_path: &Path,
    out_path: &Path,
    seed: Option<u64>,
    strict: bool,
) -> ExitCode {
    let assignment_text = match read(assignment_path) {
        Ok(text) => text,
        Err(code) => return code,
    };
    let submission_text = match read(submission_path) {
        Ok(text) => text,
        Err(code) => return code,
    };
    let mut assignment = match parse_assignment(&assignment_text) {
        Ok(assignment) => assignment,
        Err(e) => {
            eprintln!("error: {}: {e}", assignment_path.display());
            return ExitCode::from(EXIT_FAIL);
        }
    };
    if let Some(seed) = seed {
        assignment.cfg.seed = seed;
    }
    let report = grade_submission(&assignment, &submission_text);
    let json = render_gradescope_json(&report);
    if let Err(e) = fs::write(out_path, &json) {
        eprintln!("error: cannot write {}: {e}", out_path.display());
        return ExitCode::from(EXIT_IO);
    }
    if let Some(summary) = report.items.last() {
        println!("{}", summary.feedback);
    }
    let full_score = report.overall_score >= report.max_score;
    if strict && !full_score {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}
