//! Grading a submitted machine against an instructor's assignment.
//!
//! An assignment file contains, in any order:
//!
//! ```text
//! (assignment :kind dfa|pda|tm
//!             ;; everything below is optional
//!             :student-name <symbol>     ; expected name of the submitted machine
//!             :tests 1000 :max-word-len 8 :exhaustive-len 4 :seed 0
//!             :pda-depth 1000 :tm-steps 1000 :max-reported 3
//!             :use-dfa-decision t|nil    ; complete decision procedure (dfa only)
//!             :points ((validity 0) (alphabet 0) (equivalence 100)
//!                      (check 1 5) (property involution 5)))
//! (gen-x ...)                            ; exactly one reference machine
//! (check-accept [:ref] <word> t|nil)     ; unit checks, zero or more
//! (check-output [:ref] <word> <word>)    ; tm assignments only
//! (property <name> (w) <formula>)        ; properties, zero or more
//! ```
//!
//! Every check is verified against the reference machine while the
//! assignment loads; a reference that fails its own checks is an instructor
//! error and aborts loading. Checks marked `:ref` exist only for that
//! self-test, while the rest are also graded against the submission.
//!
//! Grading never fails: a malformed submission produces a zero-score report.
//! The pipeline stages — validity, alphabet equality, equivalence, unit
//! checks, properties — each become one report item. Validity and alphabet
//! are gates: when one fails, everything downstream scores zero. The final
//! summary item carries `<name> is correct.` on a full pass and the first
//! failing feedback otherwise, which is the line the command-line grader
//! prints. Unspecified points default to 100 for equivalence and 0 for
//! everything else.

use std::collections::HashMap;

use thiserror::Error;

use crate::equiv::{
    accept_machine, alphabet_equal, check_property, dfa_equiv_decide, parse_property,
    test_equiv_lang, test_equiv_tm_output, AlphabetCheck, EquivError, EquivVerdict,
    PropertyOutcome, PropertySpec, TestConfig,
};
use crate::exec::tm_output;
use crate::model::{build_file, form_kind, form_name, Machine, MachineKind};
use crate::sexpr::{
    parse_sexprs, print_sexpr, print_word, print_words, word_from_sexpr, Atom, SExpr, SexprError,
    Word,
};

/// Feedback line opening a list of language-equivalence counterexamples.
pub const MISCLASSIFIED_FEEDBACK: &str =
    "Transition function error. The following words are misclassified:";
/// Feedback line opening a list of TM output counterexamples.
pub const WRONG_OUTPUT_FEEDBACK: &str =
    "Incorrect output produced when running submitted TM on the following words :";
/// Feedback for an alphabet mismatch.
pub const WRONG_ALPHABET_FEEDBACK: &str = "Incorrect alphabet provided.";

/// Which machine a unit check targets. `Reference` checks are instructor
/// self-tests consumed at load time; `Student` checks are graded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSubject {
    Reference,
    Student,
}

/// What a unit check expects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Accept { word: Word, expected: bool },
    Output { word: Word, expected: Word },
}

/// One `check-accept` / `check-output` form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitCheck {
    pub subject: CheckSubject,
    pub expectation: Expectation,
}

/// Point values per report item. Anything not listed in `:points` gets the
/// default split: equivalence 100, everything else 0 (gates only).
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    pub validity: f64,
    pub alphabet: f64,
    pub equivalence: f64,
    /// Keyed by 1-based index of the graded (student-subject) check.
    pub checks: HashMap<usize, f64>,
    /// Keyed by canonical (uppercase) property name.
    pub properties: HashMap<String, f64>,
}

impl Default for Points {
    fn default() -> Self {
        Points {
            validity: 0.0,
            alphabet: 0.0,
            equivalence: 100.0,
            checks: HashMap::new(),
            properties: HashMap::new(),
        }
    }
}

/// A loaded assignment: the reference machine plus everything needed to
/// grade submissions against it.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub kind: MachineKind,
    pub reference: Machine,
    /// Expected `:name` of the student's machine, when the instructor pinned
    /// one. Properties may refer to the student machine by this name.
    pub student_name: Option<String>,
    pub cfg: TestConfig,
    pub checks: Vec<UnitCheck>,
    pub properties: Vec<PropertySpec>,
    pub points: Points,
    pub use_dfa_decision: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssignmentError {
    #[error("{0}")]
    Parse(#[from] SexprError),
    #[error("missing (assignment ...) form")]
    MissingAssignmentForm,
    #[error("missing reference machine definition")]
    MissingReference,
    #[error("assignment kind {expected} does not match reference machine kind {found}")]
    WrongReferenceKind {
        expected: MachineKind,
        found: MachineKind,
    },
    #[error("invalid reference machine: {0}")]
    InvalidReference(String),
    #[error("reference machine fails its own check: {0}")]
    ReferenceCheckFailed(String),
    #[error("bad assignment: {0}")]
    Malformed(String),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// One line of a grade report.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeItem {
    pub name: String,
    pub score: f64,
    pub max_score: f64,
    pub passed: bool,
    pub feedback: String,
    pub witnesses: Vec<Word>,
}

/// A graded submission: per-item verdicts and the total score.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeReport {
    pub overall_score: f64,
    pub max_score: f64,
    pub items: Vec<GradeItem>,
}

fn plist(items: &[SExpr]) -> Result<Vec<(String, SExpr)>, AssignmentError> {
    let mut entries = Vec::new();
    let mut i = 0;
    while i < items.len() {
        match &items[i] {
            SExpr::Keyword(k) => match items.get(i + 1) {
                Some(value) => {
                    entries.push((k.clone(), value.clone()));
                    i += 2;
                }
                None => {
                    return Err(AssignmentError::Malformed(format!(
                        ":{} has no value",
                        k.to_ascii_lowercase()
                    )))
                }
            },
            other => {
                return Err(AssignmentError::Malformed(format!(
                    "expected a keyword, got {}",
                    print_sexpr(other)
                )))
            }
        }
    }
    Ok(entries)
}

fn positive_int(key: &str, expr: &SExpr) -> Result<usize, AssignmentError> {
    match expr {
        SExpr::Integer(i) if *i >= 1 => Ok(*i as usize),
        _ => Err(AssignmentError::Malformed(format!(
            ":{} must be a positive integer, got {}",
            key.to_ascii_lowercase(),
            print_sexpr(expr)
        ))),
    }
}

fn boolean(key: &str, expr: &SExpr) -> Result<bool, AssignmentError> {
    if expr.is_symbol("t") {
        Ok(true)
    } else if expr.is_symbol("nil") {
        Ok(false)
    } else {
        Err(AssignmentError::Malformed(format!(
            ":{} must be t or nil, got {}",
            key.to_ascii_lowercase(),
            print_sexpr(expr)
        )))
    }
}

fn parse_points(expr: &SExpr) -> Result<Points, AssignmentError> {
    let bad = |msg: String| AssignmentError::Malformed(msg);
    let mut points = Points::default();
    let entries = expr
        .as_list()
        .ok_or_else(|| bad(format!(":points must be a list, got {}", print_sexpr(expr))))?;
    for entry in entries {
        let items = entry
            .as_list()
            .ok_or_else(|| bad(format!("bad :points entry {}", print_sexpr(entry))))?;
        let value = |e: &SExpr| -> Result<f64, AssignmentError> {
            match e {
                SExpr::Integer(i) if *i >= 0 => Ok(*i as f64),
                _ => Err(bad(format!(
                    "point value must be a nonnegative integer in {}",
                    print_sexpr(entry)
                ))),
            }
        };
        match items {
            [area, v] if area.is_symbol("validity") => points.validity = value(v)?,
            [area, v] if area.is_symbol("alphabet") => points.alphabet = value(v)?,
            [area, v] if area.is_symbol("equivalence") => points.equivalence = value(v)?,
            [area, SExpr::Integer(i), v] if area.is_symbol("check") && *i >= 1 => {
                points.checks.insert(*i as usize, value(v)?);
            }
            [area, SExpr::Symbol(name), v] if area.is_symbol("property") => {
                points.properties.insert(name.clone(), value(v)?);
            }
            _ => return Err(bad(format!("bad :points entry {}", print_sexpr(entry)))),
        }
    }
    Ok(points)
}

fn parse_check(form: &SExpr, alphabet: &[Atom]) -> Result<UnitCheck, AssignmentError> {
    let bad = |msg: String| AssignmentError::Malformed(msg);
    let items = form.as_list().expect("check form is a list");
    let is_output = items[0].is_symbol("check-output");
    let mut rest = &items[1..];
    let subject = if rest.first().is_some_and(|e| e.is_keyword("ref")) {
        rest = &rest[1..];
        CheckSubject::Reference
    } else {
        CheckSubject::Student
    };
    let [word_expr, expected_expr] = rest else {
        return Err(bad(format!("malformed check {}", print_sexpr(form))));
    };
    let word = word_from_sexpr(word_expr)
        .ok_or_else(|| bad(format!("invalid check word {}", print_sexpr(word_expr))))?;
    if let Some(stray) = word.iter().find(|l| !alphabet.contains(l)) {
        return Err(bad(format!(
            "invalid check word {}: letter {stray} is not in the reference alphabet",
            print_sexpr(word_expr)
        )));
    }
    let expectation = if is_output {
        let expected = word_from_sexpr(expected_expr).ok_or_else(|| {
            bad(format!(
                "invalid expected output {}",
                print_sexpr(expected_expr)
            ))
        })?;
        Expectation::Output { word, expected }
    } else {
        let expected = boolean("check-accept", expected_expr)
            .map_err(|_| bad(format!("expected t or nil in {}", print_sexpr(form))))?;
        Expectation::Accept { word, expected }
    };
    Ok(UnitCheck {
        subject,
        expectation,
    })
}

/// Loads an assignment from its file text and verifies the reference machine
/// against every check.
pub fn parse_assignment(text: &str) -> Result<Assignment, AssignmentError> {
    let forms = parse_sexprs(text)?;

    let mut assignment_form: Option<&SExpr> = None;
    let mut reference_form: Option<&SExpr> = None;
    let mut check_forms: Vec<&SExpr> = Vec::new();
    let mut property_forms: Vec<&SExpr> = Vec::new();
    for form in &forms {
        let head = form.as_list().and_then(|items| items.first());
        if form_kind(form).is_some() {
            if reference_form.replace(form).is_some() {
                return Err(AssignmentError::Malformed(
                    "more than one reference machine definition".to_string(),
                ));
            }
        } else if head.is_some_and(|h| h.is_symbol("assignment")) {
            if assignment_form.replace(form).is_some() {
                return Err(AssignmentError::Malformed(
                    "more than one (assignment ...) form".to_string(),
                ));
            }
        } else if head.is_some_and(|h| {
            h.is_symbol("check-accept") || h.is_symbol("check-output")
        }) {
            check_forms.push(form);
        } else if head.is_some_and(|h| h.is_symbol("property")) {
            property_forms.push(form);
        } else {
            return Err(AssignmentError::Malformed(format!(
                "unexpected form {}",
                print_sexpr(form)
            )));
        }
    }

    let assignment_form = assignment_form.ok_or(AssignmentError::MissingAssignmentForm)?;
    let reference_form = reference_form.ok_or(AssignmentError::MissingReference)?;

    let reference = match crate::model::build_machine(reference_form) {
        Ok(machine) => machine,
        Err(errors) => {
            let messages: Vec<String> = errors.iter().map(|e| e.message.clone()).collect();
            return Err(AssignmentError::InvalidReference(messages.join(" ")));
        }
    };

    let args = plist(&assignment_form.as_list().expect("assignment is a list")[1..])?;
    let get = |key: &str| args.iter().find(|(k, _)| k == key).map(|(_, v)| v);

    let kind = match get("KIND") {
        Some(e) if e.is_symbol("dfa") => MachineKind::Dfa,
        Some(e) if e.is_symbol("pda") => MachineKind::Pda,
        Some(e) if e.is_symbol("tm") => MachineKind::Tm,
        Some(other) => {
            return Err(AssignmentError::Malformed(format!(
                ":kind must be dfa, pda or tm, got {}",
                print_sexpr(other)
            )))
        }
        None => {
            return Err(AssignmentError::Malformed(
                ":kind is required in the assignment form".to_string(),
            ))
        }
    };
    if reference.kind() != kind {
        return Err(AssignmentError::WrongReferenceKind {
            expected: kind,
            found: reference.kind(),
        });
    }

    let mut cfg = TestConfig::default();
    if let Some(e) = get("TESTS") {
        cfg.num_tests = positive_int("TESTS", e)?;
    }
    if let Some(e) = get("MAX-WORD-LEN") {
        cfg.max_word_len = positive_int("MAX-WORD-LEN", e)?;
    }
    if let Some(e) = get("EXHAUSTIVE-LEN") {
        cfg.exhaustive_len = positive_int("EXHAUSTIVE-LEN", e)?;
    }
    if let Some(e) = get("SEED") {
        cfg.seed = match e {
            SExpr::Integer(i) if *i >= 0 => *i as u64,
            _ => {
                return Err(AssignmentError::Malformed(format!(
                    ":seed must be a nonnegative integer, got {}",
                    print_sexpr(e)
                )))
            }
        };
    }
    if let Some(e) = get("PDA-DEPTH") {
        cfg.bounds.pda_depth = positive_int("PDA-DEPTH", e)?;
    }
    if let Some(e) = get("TM-STEPS") {
        cfg.bounds.tm_steps = positive_int("TM-STEPS", e)?;
    }
    if let Some(e) = get("MAX-REPORTED") {
        cfg.max_reported = positive_int("MAX-REPORTED", e)?;
    }
    if cfg.exhaustive_len > cfg.max_word_len {
        return Err(AssignmentError::Malformed(format!(
            ":exhaustive-len {} exceeds :max-word-len {}",
            cfg.exhaustive_len, cfg.max_word_len
        )));
    }

    let student_name = match get("STUDENT-NAME") {
        None => None,
        Some(SExpr::Symbol(s)) => Some(s.clone()),
        Some(other) => {
            return Err(AssignmentError::Malformed(format!(
                ":student-name must be a symbol, got {}",
                print_sexpr(other)
            )))
        }
    };
    let use_dfa_decision = match get("USE-DFA-DECISION") {
        None => kind == MachineKind::Dfa,
        Some(e) => boolean("USE-DFA-DECISION", e)?,
    };
    let points = match get("POINTS") {
        None => Points::default(),
        Some(e) => parse_points(e)?,
    };

    let mut checks = Vec::new();
    for form in check_forms {
        let check = parse_check(form, reference.alphabet())?;
        if matches!(check.expectation, Expectation::Output { .. }) && kind != MachineKind::Tm {
            return Err(AssignmentError::Malformed(
                "check-output is only valid in a tm assignment".to_string(),
            ));
        }
        checks.push(check);
    }

    let mut properties = Vec::new();
    for form in property_forms {
        properties.push(parse_property(form, reference.alphabet())?);
    }

    // The reference is the gold solution, so it must satisfy every check
    // itself, whatever the check's subject.
    for check in &checks {
        match &check.expectation {
            Expectation::Accept { word, expected } => {
                let got = accept_machine(&reference, word, &cfg.bounds)
                    .map_err(EquivError::from)?;
                if got != *expected {
                    return Err(AssignmentError::ReferenceCheckFailed(format!(
                        "check-accept {}: expected {}, got {}",
                        print_word(word),
                        lisp_bool(*expected),
                        lisp_bool(got)
                    )));
                }
            }
            Expectation::Output { word, expected } => {
                let Machine::Tm(tm) = &reference else {
                    unreachable!("output checks only parse for tm assignments");
                };
                let got = tm_output(tm, word, cfg.bounds.tm_steps).map_err(EquivError::from)?;
                if got != *expected {
                    return Err(AssignmentError::ReferenceCheckFailed(format!(
                        "check-output {}: expected {}, got {}",
                        print_word(word),
                        print_word(expected),
                        print_word(&got)
                    )));
                }
            }
        }
    }

    Ok(Assignment {
        kind,
        reference,
        student_name,
        cfg,
        checks,
        properties,
        points,
        use_dfa_decision,
    })
}

fn lisp_bool(b: bool) -> &'static str {
    if b {
        "t"
    } else {
        "nil"
    }
}

struct ItemBuilder {
    items: Vec<GradeItem>,
}

impl ItemBuilder {
    fn push(&mut self, name: &str, max_score: f64, passed: bool, feedback: String, witnesses: Vec<Word>) {
        self.items.push(GradeItem {
            name: name.to_string(),
            score: if passed { max_score } else { 0.0 },
            max_score,
            passed,
            feedback,
            witnesses,
        });
    }

    fn skipped(&mut self, name: &str, max_score: f64) {
        self.push(name, max_score, false, String::new(), Vec::new());
    }
}

/// Picks the graded machine out of the submission's forms: the form whose
/// `:name` matches the expected student name when one is configured,
/// otherwise the first form of the assignment's kind.
fn select_submission(
    a: &Assignment,
    forms: &[SExpr],
) -> (Result<Machine, String>, Vec<String>) {
    let built = build_file(forms);
    let candidates: Vec<usize> = (0..built.machines.len())
        .filter(|&i| form_kind(&forms[built.machines[i].index]) == Some(a.kind))
        .collect();
    if candidates.is_empty() {
        return (
            Err(format!(
                "No {} definition found in the submission.",
                a.kind
            )),
            Vec::new(),
        );
    }
    let chosen = a
        .student_name
        .as_ref()
        .and_then(|wanted| {
            candidates
                .iter()
                .copied()
                .find(|&i| form_name(&forms[built.machines[i].index]).as_deref() == Some(wanted))
        })
        .unwrap_or(candidates[0]);

    let mut ignored = Vec::new();
    for (i, machine) in built.machines.iter().enumerate() {
        if i != chosen {
            let form = &forms[machine.index];
            ignored.push(
                form_name(form)
                    .map(|n| n.to_ascii_lowercase())
                    .unwrap_or_else(|| print_sexpr(form)),
            );
        }
    }
    for index in &built.other_forms {
        ignored.push(print_sexpr(&forms[*index]));
    }

    let result = match &built.machines[chosen].result {
        Ok(machine) => Ok(machine.clone()),
        Err(errors) => {
            let messages: Vec<String> = errors.iter().map(|e| e.message.clone()).collect();
            Err(messages.join("\n"))
        }
    };
    (result, ignored)
}

/// Feedback and witnesses for a failed equivalence stage.
fn equivalence_failure(verdict: &EquivVerdict, output_test: bool) -> Option<(String, Vec<Word>)> {
    match verdict {
        EquivVerdict::Equivalent { .. } => None,
        EquivVerdict::NotEquivalent { witnesses } => {
            let heading = if output_test {
                WRONG_OUTPUT_FEEDBACK
            } else {
                MISCLASSIFIED_FEEDBACK
            };
            Some((
                format!("{heading}\n{}", print_words(witnesses)),
                witnesses.clone(),
            ))
        }
        EquivVerdict::AlphabetMismatch { .. } => {
            Some((WRONG_ALPHABET_FEEDBACK.to_string(), Vec::new()))
        }
    }
}

/// Grades a submission. Never fails: every problem, from a parse error on
/// down, becomes a failed report item.
pub fn grade_submission(a: &Assignment, submission_text: &str) -> GradeReport {
    let mut out = ItemBuilder { items: Vec::new() };

    let (selection, ignored) = match parse_sexprs(submission_text) {
        Ok(forms) if forms.is_empty() => (
            Err("The submission contains no machine definition.".to_string()),
            Vec::new(),
        ),
        Ok(forms) => select_submission(a, &forms),
        Err(error) => (Err(error.to_string()), Vec::new()),
    };

    let student = match selection {
        Ok(machine) => {
            out.push("validity", a.points.validity, true, String::new(), Vec::new());
            Some(machine)
        }
        Err(feedback) => {
            out.push("validity", a.points.validity, false, feedback, Vec::new());
            None
        }
    };

    // Alphabet equality gates everything that would run words through the
    // student machine.
    let alphabet_ok = match &student {
        None => {
            out.skipped("alphabet", a.points.alphabet);
            false
        }
        Some(machine) => {
            match alphabet_equal(machine.alphabet(), a.reference.alphabet()) {
                AlphabetCheck::Equal => {
                    out.push("alphabet", a.points.alphabet, true, String::new(), Vec::new());
                    true
                }
                AlphabetCheck::Witness(_) => {
                    out.push(
                        "alphabet",
                        a.points.alphabet,
                        false,
                        WRONG_ALPHABET_FEEDBACK.to_string(),
                        Vec::new(),
                    );
                    false
                }
            }
        }
    };
    let gate_open = alphabet_ok;

    match (&student, gate_open) {
        (Some(machine), true) => {
            let mut failures: Vec<(String, Vec<Word>)> = Vec::new();
            let mut record = |verdict: Result<EquivVerdict, EquivError>, output_test: bool| {
                match verdict {
                    Ok(v) => {
                        if let Some(failure) = equivalence_failure(&v, output_test) {
                            failures.push(failure);
                        }
                    }
                    Err(e) => failures.push((e.to_string(), Vec::new())),
                }
            };
            match (machine, &a.reference) {
                (Machine::Dfa(student_dfa), Machine::Dfa(reference_dfa))
                    if a.use_dfa_decision =>
                {
                    record(Ok(dfa_equiv_decide(student_dfa, reference_dfa)), false);
                }
                (Machine::Tm(student_tm), Machine::Tm(reference_tm)) => {
                    record(test_equiv_lang(machine, &a.reference, &a.cfg), false);
                    record(test_equiv_tm_output(student_tm, reference_tm, &a.cfg), true);
                }
                _ => record(test_equiv_lang(machine, &a.reference, &a.cfg), false),
            }
            if failures.is_empty() {
                out.push("equivalence", a.points.equivalence, true, String::new(), Vec::new());
            } else {
                let feedback: Vec<String> = failures.iter().map(|(f, _)| f.clone()).collect();
                // The language and output tests may blame the same word.
                let mut witnesses: Vec<Word> = Vec::new();
                for (_, words) in &failures {
                    for word in words {
                        if !witnesses.contains(word) {
                            witnesses.push(word.clone());
                        }
                    }
                }
                out.push(
                    "equivalence",
                    a.points.equivalence,
                    false,
                    feedback.join("\n"),
                    witnesses,
                );
            }
        }
        _ => out.skipped("equivalence", a.points.equivalence),
    }

    let graded_checks = a
        .checks
        .iter()
        .filter(|c| c.subject == CheckSubject::Student);
    for (index, check) in graded_checks.enumerate() {
        let number = index + 1;
        let name = format!("check-{number}");
        let max = a.points.checks.get(&number).copied().unwrap_or(0.0);
        let Some(machine) = (if gate_open { student.as_ref() } else { None }) else {
            out.skipped(&name, max);
            continue;
        };
        match &check.expectation {
            Expectation::Accept { word, expected } => {
                match accept_machine(machine, word, &a.cfg.bounds) {
                    Ok(got) if got == *expected => {
                        out.push(&name, max, true, String::new(), Vec::new())
                    }
                    Ok(got) => out.push(
                        &name,
                        max,
                        false,
                        format!(
                            "check-accept {}: expected {}, got {}.",
                            print_word(word),
                            lisp_bool(*expected),
                            lisp_bool(got)
                        ),
                        vec![word.clone()],
                    ),
                    Err(e) => out.push(&name, max, false, e.to_string(), Vec::new()),
                }
            }
            Expectation::Output { word, expected } => {
                let Machine::Tm(tm) = machine else {
                    out.push(&name, max, false, "check-output needs a tm".to_string(), Vec::new());
                    continue;
                };
                match tm_output(tm, word, a.cfg.bounds.tm_steps) {
                    Ok(got) if &got == expected => {
                        out.push(&name, max, true, String::new(), Vec::new())
                    }
                    Ok(got) => out.push(
                        &name,
                        max,
                        false,
                        format!(
                            "check-output {}: expected {}, got {}.",
                            print_word(word),
                            print_word(expected),
                            print_word(&got)
                        ),
                        vec![word.clone()],
                    ),
                    Err(e) => out.push(&name, max, false, e.to_string(), Vec::new()),
                }
            }
        }
    }

    for property in &a.properties {
        let name = property.name.to_ascii_lowercase();
        let max = a.points.properties.get(&property.name).copied().unwrap_or(0.0);
        let Some(machine) = (if gate_open { student.as_ref() } else { None }) else {
            out.skipped(&name, max);
            continue;
        };
        let mut machines: HashMap<String, &Machine> = HashMap::new();
        machines.insert(a.reference.name().to_string(), &a.reference);
        if let Some(expected) = &a.student_name {
            machines.insert(expected.clone(), machine);
        }
        machines.insert(machine.name().to_string(), machine);
        match check_property(property, &machines, &a.cfg) {
            Ok(PropertyOutcome::Pass) => out.push(&name, max, true, String::new(), Vec::new()),
            Ok(PropertyOutcome::Counterexample(word)) => out.push(
                &name,
                max,
                false,
                format!("Counterexample found: {}", print_word(&word)),
                vec![word],
            ),
            Err(e) => out.push(&name, max, false, e.to_string(), Vec::new()),
        }
    }

    if !ignored.is_empty() {
        out.push(
            "warnings",
            0.0,
            true,
            format!(
                "Ignored {} extra form(s): {}.",
                ignored.len(),
                ignored.join(", ")
            ),
            Vec::new(),
        );
    }

    let all_passed = out.items.iter().all(|item| item.passed);
    let summary_feedback = if all_passed {
        let name = student
            .as_ref()
            .map(Machine::display_name)
            .unwrap_or_else(|| a.kind.to_string());
        format!("{name} is correct.")
    } else {
        out.items
            .iter()
            .find(|item| !item.passed)
            .map(|item| item.feedback.clone())
            .unwrap_or_default()
    };
    out.push("summary", 0.0, all_passed, summary_feedback, Vec::new());

    let overall_score = out.items.iter().map(|i| i.score).sum();
    let max_score = out.items.iter().map(|i| i.max_score).sum();
    GradeReport {
        overall_score,
        max_score,
        items: out.items,
    }
}

/// Renders a score as JSON: integral values print without a decimal point.
fn render_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 9e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// Serializes a report in the Gradescope results format:
/// `{"score": <number>, "tests": [{"name": ..., "score": ..., "max_score":
/// ..., "output": ...}, ...]}`. Item order is preserved and equal reports
/// render byte-identically.
pub fn render_gradescope_json(report: &GradeReport) -> String {
    let mut out = String::from("{\"score\": ");
    out.push_str(&render_number(report.overall_score));
    out.push_str(", \"tests\": [");
    for (i, item) in report.items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!(
            "{{\"name\": {}, \"score\": {}, \"max_score\": {}, \"output\": {}}}",
            serde_json::to_string(&item.name).expect("strings always serialize"),
            render_number(item.score),
            render_number(item.max_score),
            serde_json::to_string(&item.feedback).expect("strings always serialize"),
        ));
    }
    out.push_str("]}");
    out
}
