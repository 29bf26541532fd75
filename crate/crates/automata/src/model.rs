//! Validated machine models built from `gen-dfa`, `gen-pda` and `gen-tm`
//! forms.
//!
//! Each `gen-x` form is a keyword/value list mirroring the textbook tuple of
//! its machine kind; keyword order does not matter. Building a machine runs
//! the full validation checklist and either returns the model or *every*
//! detected [`ValidationError`], not just the first, so a student sees all
//! their mistakes at once. Error messages are stable, student-facing strings;
//! see [`ValidationCode`] for the fixed prefix each category carries.
//!
//! The accepted schemas are:
//!
//! ```text
//! (gen-dfa :name N :states (..) :alphabet (..) :start S :accept (..)
//!          :transition-fun (((state letter) . state) ...))
//! (gen-pda :name N :states (..) :alphabet (..) :stack-alphabet (..)
//!          :start-state S :accept-states (..)
//!          :transition-fun (((state letter|:e stack|:e) . ((state push|:e) ...)) ...))
//! (gen-tm  :name N :states (..) :alphabet (..) :tape-alphabet (..)
//!          :start-state S :accept-state A :reject-state R
//!          :transition-fun (((state sym) . (state sym L|R)) ...))
//! ```
//!
//! A DFA transition function must be total over `Q x Sigma`; PDA and TM
//! transition functions may be partial (absent PDA keys denote the empty
//! transition set, and a TM halts in its reject state on a missing key). The
//! keyword `:e` stands for the empty word in PDA transitions and the symbol
//! `nil` is the TM blank; `nil` must appear in a TM tape alphabet and must
//! not appear in its input alphabet.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::sexpr::{print_sexpr, Atom, SExpr};

/// The three supported machine kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachineKind {
    Dfa,
    Pda,
    Tm,
}

impl fmt::Display for MachineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MachineKind::Dfa => "dfa",
            MachineKind::Pda => "pda",
            MachineKind::Tm => "tm",
        })
    }
}

/// A deterministic finite automaton: a total transition function over
/// `Q x Sigma`, a start state and a set of accept states.
#[derive(Debug, Clone, PartialEq)]
pub struct Dfa {
    pub name: String,
    pub states: Vec<Atom>,
    pub alphabet: Vec<Atom>,
    pub transitions: HashMap<(Atom, Atom), Atom>,
    pub start: Atom,
    pub accept: Vec<Atom>,
}

impl Dfa {
    pub fn is_accepting(&self, state: &Atom) -> bool {
        self.accept.contains(state)
    }
}

/// A PDA transition key: state, input letter, stack top to pop. `None` in
/// the letter or stack slot is epsilon.
pub type PdaKey = (Atom, Option<Atom>, Option<Atom>);

/// One PDA transition result: the target state and the symbol to push, if
/// any.
pub type PdaSuccessor = (Atom, Option<Atom>);

/// A pushdown automaton. Each transition key maps to the set of its
/// successors; absent keys are the empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct Pda {
    pub name: String,
    pub states: Vec<Atom>,
    pub alphabet: Vec<Atom>,
    pub stack_alphabet: Vec<Atom>,
    pub transitions: HashMap<PdaKey, Vec<PdaSuccessor>>,
    pub start: Atom,
    pub accept: Vec<Atom>,
}

impl Pda {
    pub fn is_accepting(&self, state: &Atom) -> bool {
        self.accept.contains(state)
    }
}

/// Head movement of a Turing machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// A Turing machine with distinguished accept and reject states. The
/// transition function may be partial; a missing key halts the machine in
/// its reject state.
#[derive(Debug, Clone, PartialEq)]
pub struct Tm {
    pub name: String,
    pub states: Vec<Atom>,
    pub alphabet: Vec<Atom>,
    pub tape_alphabet: Vec<Atom>,
    pub transitions: HashMap<(Atom, Atom), (Atom, Atom, Direction)>,
    pub start: Atom,
    pub accept: Atom,
    pub reject: Atom,
}

/// Any machine, for code that dispatches on kind at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum Machine {
    Dfa(Dfa),
    Pda(Pda),
    Tm(Tm),
}

impl Machine {
    pub fn kind(&self) -> MachineKind {
        match self {
            Machine::Dfa(_) => MachineKind::Dfa,
            Machine::Pda(_) => MachineKind::Pda,
            Machine::Tm(_) => MachineKind::Tm,
        }
    }

    /// The canonical (uppercase) machine name.
    pub fn name(&self) -> &str {
        match self {
            Machine::Dfa(m) => &m.name,
            Machine::Pda(m) => &m.name,
            Machine::Tm(m) => &m.name,
        }
    }

    /// The machine name the way feedback prints it, e.g. `student-dfa`.
    pub fn display_name(&self) -> String {
        self.name().to_ascii_lowercase()
    }

    /// The input alphabet.
    pub fn alphabet(&self) -> &[Atom] {
        match self {
            Machine::Dfa(m) => &m.alphabet,
            Machine::Pda(m) => &m.alphabet,
            Machine::Tm(m) => &m.alphabet,
        }
    }
}

/// Validation failure categories.
///
/// Every message begins with a fixed prefix determined by its code, so
/// string-level tests can match categories:
///
/// * `MissingComponent` — "Missing or malformed component"
/// * `UnknownComponent` — "Unknown or duplicate component"
/// * `DuplicateName` — "Duplicate machine name"
/// * `BadStartState` — "Start state"
/// * `BadAcceptStates` — "Accept or reject state"
/// * `BadTransitionDomain` — "Transition function is not a function with domain"
/// * `BadTransitionCodomain` — "Transition function value"
/// * `MissingStartTransition` — "Starting transition from"
/// * `BlankMissingFromTape` — exactly "Blank tape symbol nil missing from tape-alphabet."
/// * `BlankInInputAlphabet` — "Blank tape symbol nil must not"
/// * `InputNotSubsetOfTape` — "Input alphabet has to be a subset of the tape alphabet"
/// * `AcceptEqualsReject` — "Accept state and reject state"
/// * `AcceptRejectInDomain` — "Transition function must not leave"
/// * `DuplicateSymbols` — "Duplicate element"
/// * `DuplicateTransitionKey` — "Duplicate transition function key"
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValidationCode {
    MissingComponent,
    UnknownComponent,
    DuplicateName,
    BadStartState,
    BadAcceptStates,
    BadTransitionDomain,
    BadTransitionCodomain,
    MissingStartTransition,
    BlankMissingFromTape,
    BlankInInputAlphabet,
    InputNotSubsetOfTape,
    AcceptEqualsReject,
    AcceptRejectInDomain,
    DuplicateSymbols,
    DuplicateTransitionKey,
}

/// One validation failure: a category, the student-facing message and the
/// offending fragment when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError {
    pub code: ValidationCode,
    pub message: String,
    pub detail: Option<SExpr>,
}

impl ValidationError {
    fn new(code: ValidationCode, message: String, detail: Option<SExpr>) -> Self {
        ValidationError {
            code,
            message,
            detail,
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Identifies `gen-dfa` / `gen-pda` / `gen-tm` forms by their head symbol.
pub fn form_kind(form: &SExpr) -> Option<MachineKind> {
    let items = form.as_list()?;
    match items.first()? {
        SExpr::Symbol(s) if s == "GEN-DFA" => Some(MachineKind::Dfa),
        SExpr::Symbol(s) if s == "GEN-PDA" => Some(MachineKind::Pda),
        SExpr::Symbol(s) if s == "GEN-TM" => Some(MachineKind::Tm),
        _ => None,
    }
}

/// Extracts the `:name` of a `gen-x` form without building it.
pub fn form_name(form: &SExpr) -> Option<String> {
    let items = form.as_list()?;
    let mut i = 1;
    while i + 1 < items.len() {
        if items[i].is_keyword("name") {
            if let SExpr::Symbol(s) = &items[i + 1] {
                return Some(s.clone());
            }
            return None;
        }
        i += 2;
    }
    None
}

/// Keyword arguments of a form, first occurrence of each keyword, in source
/// order, plus any shape errors found while walking the pair list.
struct FormArgs {
    entries: Vec<(String, SExpr)>,
    errors: Vec<ValidationError>,
}

impl FormArgs {
    fn get(&self, key: &str) -> Option<&SExpr> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
    }
}

fn parse_args(form: &SExpr, allowed: &[&str]) -> FormArgs {
    let mut args = FormArgs {
        entries: Vec::new(),
        errors: Vec::new(),
    };
    let items = form.as_list().expect("gen form is a list");
    let mut i = 1;
    while i < items.len() {
        match &items[i] {
            SExpr::Keyword(k) => {
                if let Some(value) = items.get(i + 1) {
                    if !allowed.contains(&k.as_str()) || args.get(k).is_some() {
                        args.errors.push(ValidationError::new(
                            ValidationCode::UnknownComponent,
                            format!("Unknown or duplicate component :{}.", k.to_ascii_lowercase()),
                            Some(items[i].clone()),
                        ));
                    } else {
                        args.entries.push((k.clone(), value.clone()));
                    }
                    i += 2;
                } else {
                    args.errors.push(ValidationError::new(
                        ValidationCode::MissingComponent,
                        format!(
                            "Missing or malformed component :{}: no value given.",
                            k.to_ascii_lowercase()
                        ),
                        Some(items[i].clone()),
                    ));
                    i += 1;
                }
            }
            other => {
                args.errors.push(ValidationError::new(
                    ValidationCode::UnknownComponent,
                    format!(
                        "Unknown or duplicate component: expected a keyword, got {}.",
                        print_sexpr(other)
                    ),
                    Some(other.clone()),
                ));
                i += 1;
            }
        }
    }
    args
}

fn missing(errors: &mut Vec<ValidationError>, key: &str) {
    errors.push(ValidationError::new(
        ValidationCode::MissingComponent,
        format!("Missing or malformed component :{}.", key.to_ascii_lowercase()),
        None,
    ));
}

fn malformed(errors: &mut Vec<ValidationError>, key: &str, fragment: &SExpr) {
    errors.push(ValidationError::new(
        ValidationCode::MissingComponent,
        format!(
            "Missing or malformed component :{}: {}.",
            key.to_ascii_lowercase(),
            print_sexpr(fragment)
        ),
        Some(fragment.clone()),
    ));
}

/// `:name` value: a symbol.
fn name_value(args: &FormArgs, errors: &mut Vec<ValidationError>) -> Option<String> {
    match args.get("NAME") {
        None => {
            missing(errors, "NAME");
            None
        }
        Some(SExpr::Symbol(s)) => Some(s.clone()),
        Some(other) => {
            malformed(errors, "NAME", other);
            None
        }
    }
}

/// A single-atom component such as `:start`.
fn atom_value(args: &FormArgs, key: &str, errors: &mut Vec<ValidationError>) -> Option<Atom> {
    match args.get(key) {
        None => {
            missing(errors, key);
            None
        }
        Some(expr) => match Atom::from_sexpr(expr) {
            Some(atom) => Some(atom),
            None => {
                malformed(errors, key, expr);
                None
            }
        },
    }
}

/// A list-of-atoms component such as `:states`. Duplicates are reported and
/// dropped, keeping first occurrences in declared order.
fn atom_list(args: &FormArgs, key: &str, errors: &mut Vec<ValidationError>) -> Option<Vec<Atom>> {
    let expr = match args.get(key) {
        None => {
            missing(errors, key);
            return None;
        }
        Some(e) => e,
    };
    let items = match expr.as_list() {
        Some(items) => items,
        None => {
            malformed(errors, key, expr);
            return None;
        }
    };
    let mut atoms = Vec::with_capacity(items.len());
    for item in items {
        match Atom::from_sexpr(item) {
            Some(atom) => {
                if atoms.contains(&atom) {
                    errors.push(ValidationError::new(
                        ValidationCode::DuplicateSymbols,
                        format!(
                            "Duplicate element {} in :{}.",
                            atom,
                            key.to_ascii_lowercase()
                        ),
                        Some(item.clone()),
                    ));
                } else {
                    atoms.push(atom);
                }
            }
            None => {
                malformed(errors, key, expr);
                return None;
            }
        }
    }
    Some(atoms)
}

fn bad_start(errors: &mut Vec<ValidationError>, state: &Atom) {
    errors.push(ValidationError::new(
        ValidationCode::BadStartState,
        format!("Start state {state} is not one of the given states."),
        Some(state.to_sexpr()),
    ));
}

fn bad_accept(errors: &mut Vec<ValidationError>, state: &Atom) {
    errors.push(ValidationError::new(
        ValidationCode::BadAcceptStates,
        format!("Accept or reject state {state} is not one of the given states."),
        Some(state.to_sexpr()),
    ));
}

fn domain_error(
    errors: &mut Vec<ValidationError>,
    domain: &str,
    what: String,
    fragment: Option<SExpr>,
) {
    errors.push(ValidationError::new(
        ValidationCode::BadTransitionDomain,
        format!("Transition function is not a function with domain {domain}: {what}."),
        fragment,
    ));
}

fn codomain_error(errors: &mut Vec<ValidationError>, fragment: &SExpr) {
    errors.push(ValidationError::new(
        ValidationCode::BadTransitionCodomain,
        format!(
            "Transition function value {} is outside the co-domain.",
            print_sexpr(fragment)
        ),
        Some(fragment.clone()),
    ));
}

fn duplicate_key(errors: &mut Vec<ValidationError>, key: &SExpr) {
    errors.push(ValidationError::new(
        ValidationCode::DuplicateTransitionKey,
        format!("Duplicate transition function key {}.", print_sexpr(key)),
        Some(key.clone()),
    ));
}

/// The list of `(key . value)` entries of a `:transition-fun`.
fn transition_entries<'a>(
    args: &'a FormArgs,
    domain: &str,
    errors: &mut Vec<ValidationError>,
) -> Option<Vec<(&'a SExpr, &'a SExpr)>> {
    let expr = match args.get("TRANSITION-FUN") {
        None => {
            missing(errors, "TRANSITION-FUN");
            return None;
        }
        Some(e) => e,
    };
    let items = match expr.as_list() {
        Some(items) => items,
        None => {
            malformed(errors, "TRANSITION-FUN", expr);
            return None;
        }
    };
    let mut entries = Vec::with_capacity(items.len());
    for item in items {
        match item {
            SExpr::DottedPair(key, value) => entries.push((key.as_ref(), value.as_ref())),
            other => domain_error(
                errors,
                domain,
                format!("malformed entry {}", print_sexpr(other)),
                Some(other.clone()),
            ),
        }
    }
    Some(entries)
}

const DFA_DOMAIN: &str = "Q x Sigma";
const PDA_DOMAIN: &str = "Q x (Sigma + :e) x (Gamma + :e)";
const TM_DOMAIN: &str = "Q x Gamma";

/// Builds a validated [`Dfa`] from a `gen-dfa` form, accumulating every
/// detected error.
pub fn build_dfa(form: &SExpr) -> Result<Dfa, Vec<ValidationError>> {
    let mut errors = Vec::new();
    let args = parse_args(
        form,
        &["NAME", "STATES", "ALPHABET", "START", "ACCEPT", "TRANSITION-FUN"],
    );
    errors.extend(args.errors.iter().cloned());

    let name = name_value(&args, &mut errors);
    let states = atom_list(&args, "STATES", &mut errors);
    let alphabet = atom_list(&args, "ALPHABET", &mut errors);
    let start = atom_value(&args, "START", &mut errors);
    let accept = atom_list(&args, "ACCEPT", &mut errors);

    if let (Some(states), Some(start)) = (&states, &start) {
        if !states.contains(start) {
            bad_start(&mut errors, start);
        }
    }
    if let (Some(states), Some(accept)) = (&states, &accept) {
        for state in accept {
            if !states.contains(state) {
                bad_accept(&mut errors, state);
            }
        }
    }

    let mut transitions = HashMap::new();
    if let Some(entries) = transition_entries(&args, DFA_DOMAIN, &mut errors) {
        let mut seen: HashSet<(Atom, Atom)> = HashSet::new();
        for (key, value) in &entries {
            let parts = match key.as_list() {
                Some([state, letter]) => Atom::from_sexpr(state).zip(Atom::from_sexpr(letter)),
                _ => None,
            };
            let (state, letter) = match parts {
                Some(pair) => pair,
                None => {
                    domain_error(
                        &mut errors,
                        DFA_DOMAIN,
                        format!("malformed key {}", print_sexpr(key)),
                        Some((*key).clone()),
                    );
                    continue;
                }
            };
            let in_domain = states.as_ref().is_none_or(|q| q.contains(&state))
                && alphabet.as_ref().is_none_or(|sigma| sigma.contains(&letter));
            if !in_domain {
                domain_error(
                    &mut errors,
                    DFA_DOMAIN,
                    format!("unexpected key {}", print_sexpr(key)),
                    Some((*key).clone()),
                );
                continue;
            }
            if !seen.insert((state.clone(), letter.clone())) {
                duplicate_key(&mut errors, key);
                continue;
            }
            match Atom::from_sexpr(value) {
                Some(target) => {
                    if states.as_ref().is_none_or(|q| q.contains(&target)) {
                        transitions.insert((state, letter), target);
                    } else {
                        codomain_error(&mut errors, value);
                    }
                }
                None => codomain_error(&mut errors, value),
            }
        }
        // Totality: every (state, letter) pair must be covered.
        if let (Some(states), Some(alphabet)) = (&states, &alphabet) {
            for state in states {
                for letter in alphabet {
                    if !seen.contains(&(state.clone(), letter.clone())) {
                        domain_error(
                            &mut errors,
                            DFA_DOMAIN,
                            format!("no transition from ({state} {letter})"),
                            None,
                        );
                    }
                }
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(Dfa {
        name: name.expect("validated"),
        states: states.expect("validated"),
        alphabet: alphabet.expect("validated"),
        transitions,
        start: start.expect("validated"),
        accept: accept.expect("validated"),
    })
}

/// Parses an atom-or-`:e` slot of a PDA transition. `None` is epsilon.
fn eps_slot(expr: &SExpr) -> Result<Option<Atom>, ()> {
    if expr.is_keyword("e") {
        Ok(None)
    } else {
        Atom::from_sexpr(expr).map(Some).ok_or(())
    }
}

/// Builds a validated [`Pda`] from a `gen-pda` form.
pub fn build_pda(form: &SExpr) -> Result<Pda, Vec<ValidationError>> {
    let mut errors = Vec::new();
    let args = parse_args(
        form,
        &[
            "NAME",
            "STATES",
            "ALPHABET",
            "STACK-ALPHABET",
            "START-STATE",
            "ACCEPT-STATES",
            "TRANSITION-FUN",
        ],
    );
    errors.extend(args.errors.iter().cloned());

    let name = name_value(&args, &mut errors);
    let states = atom_list(&args, "STATES", &mut errors);
    let alphabet = atom_list(&args, "ALPHABET", &mut errors);
    let stack_alphabet = atom_list(&args, "STACK-ALPHABET", &mut errors);
    let start = atom_value(&args, "START-STATE", &mut errors);
    let accept = atom_list(&args, "ACCEPT-STATES", &mut errors);

    if let (Some(states), Some(start)) = (&states, &start) {
        if !states.contains(start) {
            bad_start(&mut errors, start);
        }
    }
    if let (Some(states), Some(accept)) = (&states, &accept) {
        for state in accept {
            if !states.contains(state) {
                bad_accept(&mut errors, state);
            }
        }
    }

    let mut transitions: HashMap<PdaKey, Vec<PdaSuccessor>> = HashMap::new();
    if let Some(entries) = transition_entries(&args, PDA_DOMAIN, &mut errors) {
        for (key, value) in &entries {
            let parts = match key.as_list() {
                Some([state, letter, stack_top]) => match (
                    Atom::from_sexpr(state),
                    eps_slot(letter),
                    eps_slot(stack_top),
                ) {
                    (Some(q), Ok(a), Ok(s)) => Some((q, a, s)),
                    _ => None,
                },
                _ => None,
            };
            let (state, letter, stack_top) = match parts {
                Some(triple) => triple,
                None => {
                    domain_error(
                        &mut errors,
                        PDA_DOMAIN,
                        format!("malformed key {}", print_sexpr(key)),
                        Some((*key).clone()),
                    );
                    continue;
                }
            };
            let in_domain = states.as_ref().is_none_or(|q| q.contains(&state))
                && letter.as_ref().is_none_or(|a| {
                    alphabet.as_ref().is_none_or(|sigma| sigma.contains(a))
                })
                && stack_top.as_ref().is_none_or(|s| {
                    stack_alphabet.as_ref().is_none_or(|gamma| gamma.contains(s))
                });
            if !in_domain {
                domain_error(
                    &mut errors,
                    PDA_DOMAIN,
                    format!("unexpected key {}", print_sexpr(key)),
                    Some((*key).clone()),
                );
                continue;
            }
            let map_key = (state, letter, stack_top);
            if transitions.contains_key(&map_key) {
                duplicate_key(&mut errors, key);
                continue;
            }
            let pairs = match value.as_list() {
                Some(pairs) => pairs,
                None => {
                    codomain_error(&mut errors, value);
                    continue;
                }
            };
            let mut successors = Vec::with_capacity(pairs.len());
            for pair in pairs {
                let parsed = match pair.as_list() {
                    Some([target, push]) => match (Atom::from_sexpr(target), eps_slot(push)) {
                        (Some(q), Ok(p)) => Some((q, p)),
                        _ => None,
                    },
                    _ => None,
                };
                match parsed {
                    Some((target, push)) => {
                        let ok = states.as_ref().is_none_or(|q| q.contains(&target))
                            && push.as_ref().is_none_or(|p| {
                                stack_alphabet
                                    .as_ref()
                                    .is_none_or(|gamma| gamma.contains(p))
                            });
                        if ok {
                            successors.push((target, push));
                        } else {
                            codomain_error(&mut errors, pair);
                        }
                    }
                    None => codomain_error(&mut errors, pair),
                }
            }
            transitions.insert(map_key, successors);
        }
    }

    // A PDA needs a transition from its start state on the empty word to
    // set up the base stack symbol.
    if let Some(start) = &start {
        if !transitions.contains_key(&(start.clone(), None, None)) {
            errors.push(ValidationError::new(
                ValidationCode::MissingStartTransition,
                format!(
                    "Starting transition from ({start} :e :e) missing from the transition function."
                ),
                None,
            ));
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(Pda {
        name: name.expect("validated"),
        states: states.expect("validated"),
        alphabet: alphabet.expect("validated"),
        stack_alphabet: stack_alphabet.expect("validated"),
        transitions,
        start: start.expect("validated"),
        accept: accept.expect("validated"),
    })
}

/// Builds a validated [`Tm`] from a `gen-tm` form.
pub fn build_tm(form: &SExpr) -> Result<Tm, Vec<ValidationError>> {
    let mut errors = Vec::new();
    let args = parse_args(
        form,
        &[
            "NAME",
            "STATES",
            "ALPHABET",
            "TAPE-ALPHABET",
            "START-STATE",
            "ACCEPT-STATE",
            "REJECT-STATE",
            "TRANSITION-FUN",
        ],
    );
    errors.extend(args.errors.iter().cloned());

    let name = name_value(&args, &mut errors);
    let states = atom_list(&args, "STATES", &mut errors);
    let alphabet = atom_list(&args, "ALPHABET", &mut errors);
    let tape_alphabet = atom_list(&args, "TAPE-ALPHABET", &mut errors);
    let start = atom_value(&args, "START-STATE", &mut errors);
    let accept = atom_value(&args, "ACCEPT-STATE", &mut errors);
    let reject = atom_value(&args, "REJECT-STATE", &mut errors);

    if let (Some(states), Some(start)) = (&states, &start) {
        if !states.contains(start) {
            bad_start(&mut errors, start);
        }
    }
    for halt in [&accept, &reject] {
        if let (Some(states), Some(halt)) = (&states, halt) {
            if !states.contains(halt) {
                bad_accept(&mut errors, halt);
            }
        }
    }
    if let (Some(accept), Some(reject)) = (&accept, &reject) {
        if accept == reject {
            errors.push(ValidationError::new(
                ValidationCode::AcceptEqualsReject,
                "Accept state and reject state must differ.".to_string(),
                None,
            ));
        }
    }

    if let Some(tape) = &tape_alphabet {
        if !tape.contains(&Atom::nil()) {
            errors.push(ValidationError::new(
                ValidationCode::BlankMissingFromTape,
                "Blank tape symbol nil missing from tape-alphabet.".to_string(),
                None,
            ));
        }
    }
    if let Some(alphabet) = &alphabet {
        if alphabet.contains(&Atom::nil()) {
            errors.push(ValidationError::new(
                ValidationCode::BlankInInputAlphabet,
                "Blank tape symbol nil must not appear in the input alphabet.".to_string(),
                None,
            ));
        }
    }
    if let (Some(alphabet), Some(tape)) = (&alphabet, &tape_alphabet) {
        for letter in alphabet {
            if !tape.contains(letter) {
                errors.push(ValidationError::new(
                    ValidationCode::InputNotSubsetOfTape,
                    format!(
                        "Input alphabet has to be a subset of the tape alphabet; {letter} is missing."
                    ),
                    Some(letter.to_sexpr()),
                ));
            }
        }
    }

    let mut transitions = HashMap::new();
    if let Some(entries) = transition_entries(&args, TM_DOMAIN, &mut errors) {
        for (key, value) in &entries {
            let parts = match key.as_list() {
                Some([state, symbol]) => Atom::from_sexpr(state).zip(Atom::from_sexpr(symbol)),
                _ => None,
            };
            let (state, symbol) = match parts {
                Some(pair) => pair,
                None => {
                    domain_error(
                        &mut errors,
                        TM_DOMAIN,
                        format!("malformed key {}", print_sexpr(key)),
                        Some((*key).clone()),
                    );
                    continue;
                }
            };
            let in_domain = states.as_ref().is_none_or(|q| q.contains(&state))
                && tape_alphabet.as_ref().is_none_or(|gamma| gamma.contains(&symbol));
            if !in_domain {
                domain_error(
                    &mut errors,
                    TM_DOMAIN,
                    format!("unexpected key {}", print_sexpr(key)),
                    Some((*key).clone()),
                );
                continue;
            }
            // Halting states must halt: no outgoing transitions.
            let halting = [&accept, &reject]
                .iter()
                .any(|h| h.as_ref() == Some(&state));
            if halting {
                errors.push(ValidationError::new(
                    ValidationCode::AcceptRejectInDomain,
                    format!(
                        "Transition function must not leave the halting state {state}: key {}.",
                        print_sexpr(key)
                    ),
                    Some((*key).clone()),
                ));
                continue;
            }
            let map_key = (state, symbol);
            if transitions.contains_key(&map_key) {
                duplicate_key(&mut errors, key);
                continue;
            }
            let parsed = match value.as_list() {
                Some([target, write, dir]) => {
                    let direction = if dir.is_symbol("L") {
                        Some(Direction::Left)
                    } else if dir.is_symbol("R") {
                        Some(Direction::Right)
                    } else {
                        None
                    };
                    match (Atom::from_sexpr(target), Atom::from_sexpr(write), direction) {
                        (Some(q), Some(s), Some(d)) => Some((q, s, d)),
                        _ => None,
                    }
                }
                _ => None,
            };
            match parsed {
                Some((target, write, dir)) => {
                    let ok = states.as_ref().is_none_or(|q| q.contains(&target))
                        && tape_alphabet
                            .as_ref()
                            .is_none_or(|gamma| gamma.contains(&write));
                    if ok {
                        transitions.insert(map_key, (target, write, dir));
                    } else {
                        codomain_error(&mut errors, value);
                    }
                }
                None => codomain_error(&mut errors, value),
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(Tm {
        name: name.expect("validated"),
        states: states.expect("validated"),
        alphabet: alphabet.expect("validated"),
        tape_alphabet: tape_alphabet.expect("validated"),
        transitions,
        start: start.expect("validated"),
        accept: accept.expect("validated"),
        reject: reject.expect("validated"),
    })
}

/// Builds whatever machine the form's head says it is.
pub fn build_machine(form: &SExpr) -> Result<Machine, Vec<ValidationError>> {
    match form_kind(form) {
        Some(MachineKind::Dfa) => build_dfa(form).map(Machine::Dfa),
        Some(MachineKind::Pda) => build_pda(form).map(Machine::Pda),
        Some(MachineKind::Tm) => build_tm(form).map(Machine::Tm),
        None => Err(vec![ValidationError::new(
            ValidationCode::UnknownComponent,
            "Unknown or duplicate component: expected a gen-dfa, gen-pda or gen-tm form."
                .to_string(),
            Some(form.clone()),
        )]),
    }
}

/// One top-level form of a file after machine building.
#[derive(Debug, Clone)]
pub struct BuiltForm {
    /// Index of the form in the file.
    pub index: usize,
    /// The machine, or the accumulated validation errors.
    pub result: Result<Machine, Vec<ValidationError>>,
}

/// All machines of a file, plus the indices of forms that are not machine
/// definitions.
#[derive(Debug, Clone, Default)]
pub struct BuiltFile {
    pub machines: Vec<BuiltForm>,
    pub other_forms: Vec<usize>,
}

/// Builds every `gen-x` form in a file and enforces that machine names are
/// unique within the file: a second form with an already-used `:name` fails
/// with [`ValidationCode::DuplicateName`].
pub fn build_file(forms: &[SExpr]) -> BuiltFile {
    let mut built = BuiltFile::default();
    let mut seen_names: HashSet<String> = HashSet::new();
    for (index, form) in forms.iter().enumerate() {
        if form_kind(form).is_none() {
            built.other_forms.push(index);
            continue;
        }
        let mut result = build_machine(form);
        if let Some(name) = form_name(form) {
            if !seen_names.insert(name.clone()) {
                let dup = ValidationError::new(
                    ValidationCode::DuplicateName,
                    format!("Duplicate machine name {}.", name.to_ascii_lowercase()),
                    Some(SExpr::Symbol(name)),
                );
                result = match result {
                    Ok(_) => Err(vec![dup]),
                    Err(mut errors) => {
                        errors.push(dup);
                        Err(errors)
                    }
                };
            }
        }
        built.machines.push(BuiltForm { index, result });
    }
    built
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_sexprs;

    fn parse_form(text: &str) -> SExpr {
        parse_sexprs(text).expect("parse").remove(0)
    }

    fn codes(errors: &[ValidationError]) -> Vec<ValidationCode> {
        errors.iter().map(|e| e.code).collect()
    }

    const DOMAIN_MISMATCH: &str = include_str!("../tests/fixtures/dfa/domain_mismatch.lisp");
    const ALPHABET_0_2: &str = include_str!("../tests/fixtures/dfa/alphabet_0_2.lisp");
    const INSTRUCTOR_DFA: &str = include_str!("../tests/fixtures/dfa/instructor_odd_ones.lisp");
    const PDA_NO_START: &str = include_str!("../tests/fixtures/pda/no_start_transition.lisp");
    const PDA_FIXED_START: &str = include_str!("../tests/fixtures/pda/rejects_empty_word.lisp");
    const TM_MISSING_BLANK: &str = include_str!("../tests/fixtures/tm/missing_blank.lisp");
    const TM_WITH_BLANK: &str = include_str!("../tests/fixtures/tm/moves_left_bug.lisp");

    #[test]
    fn alphabet_narrower_than_transition_keys_is_a_domain_error() {
        let errors = build_dfa(&parse_form(DOMAIN_MISMATCH)).unwrap_err();
        assert!(errors
            .iter()
            .all(|e| e.code == ValidationCode::BadTransitionDomain));
        // One error per key mentioning the undeclared letter.
        assert_eq!(errors.len(), 4);
        assert!(errors[0]
            .message
            .starts_with("Transition function is not a function with domain Q x Sigma"));
    }

    #[test]
    fn instructor_dfa_builds() {
        let dfa = build_dfa(&parse_form(INSTRUCTOR_DFA)).unwrap();
        assert_eq!(dfa.states.len(), 2);
        assert_eq!(dfa.transitions.len(), 4);
        assert_eq!(dfa.name, "INSTRUCTOR-DFA");
        assert_eq!(dfa.start, Atom::sym("even"));
    }

    #[test]
    fn widened_alphabet_builds() {
        let dfa = build_dfa(&parse_form(ALPHABET_0_2)).unwrap();
        assert_eq!(dfa.alphabet, vec![Atom::Int(0), Atom::Int(2)]);
        assert_eq!(dfa.transitions.len(), 8);
    }

    #[test]
    fn missing_start_component() {
        let errors = build_dfa(&parse_form(
            "(gen-dfa :name m :states (a) :alphabet (0) :accept (a)
              :transition-fun (((a 0) . a)))",
        ))
        .unwrap_err();
        assert_eq!(codes(&errors), vec![ValidationCode::MissingComponent]);
        assert!(errors[0].message.contains(":start"));
    }

    #[test]
    fn keyword_order_is_irrelevant() {
        let reordered = "(gen-dfa
            :accept         (odd)
            :transition-fun (((even 0) . even) ((even 1) . odd) ((odd 0) . odd) ((odd 1) . even))
            :start          even
            :alphabet       (0 1)
            :states         (even odd)
            :name           instructor-dfa)";
        assert_eq!(
            build_dfa(&parse_form(INSTRUCTOR_DFA)).unwrap(),
            build_dfa(&parse_form(reordered)).unwrap()
        );
    }

    #[test]
    fn totality_is_checked_by_counting() {
        let errors = build_dfa(&parse_form(
            "(gen-dfa :name m :states (a b) :alphabet (0 1) :start a :accept (b)
              :transition-fun (((a 0) . a) ((a 1) . b) ((b 0) . a)))",
        ))
        .unwrap_err();
        assert_eq!(codes(&errors), vec![ValidationCode::BadTransitionDomain]);
        assert!(errors[0].message.contains("no transition from (B 1)"));
    }

    #[test]
    fn duplicate_transition_keys_are_rejected() {
        let errors = build_dfa(&parse_form(
            "(gen-dfa :name m :states (a) :alphabet (0) :start a :accept ()
              :transition-fun (((a 0) . a) ((a 0) . a)))",
        ))
        .unwrap_err();
        assert_eq!(codes(&errors), vec![ValidationCode::DuplicateTransitionKey]);
    }

    #[test]
    fn error_accumulation_reports_independent_defects() {
        // Bad start, bad accept and a codomain error in one form.
        let errors = build_dfa(&parse_form(
            "(gen-dfa :name m :states (a) :alphabet (0) :start q9 :accept (p8)
              :transition-fun (((a 0) . z7)))",
        ))
        .unwrap_err();
        assert!(errors.len() >= 3, "got {errors:?}");
        assert!(codes(&errors).contains(&ValidationCode::BadStartState));
        assert!(codes(&errors).contains(&ValidationCode::BadAcceptStates));
        assert!(codes(&errors).contains(&ValidationCode::BadTransitionCodomain));
    }

    #[test]
    fn unknown_and_duplicate_components() {
        let errors = build_dfa(&parse_form(
            "(gen-dfa :name m :states (a) :alphabet (0) :start a :accept () :start a
              :frobnicate 7 :transition-fun (((a 0) . a)))",
        ))
        .unwrap_err();
        assert_eq!(
            codes(&errors),
            vec![
                ValidationCode::UnknownComponent,
                ValidationCode::UnknownComponent
            ]
        );
    }

    #[test]
    fn pda_missing_start_transition_message_is_exact() {
        let errors = build_pda(&parse_form(PDA_NO_START)).unwrap_err();
        assert_eq!(codes(&errors), vec![ValidationCode::MissingStartTransition]);
        assert_eq!(
            errors[0].message,
            "Starting transition from (Q1 :e :e) missing from the transition function."
        );
    }

    #[test]
    fn pda_with_start_transition_builds() {
        let pda = build_pda(&parse_form(PDA_FIXED_START)).unwrap();
        assert_eq!(pda.states.len(), 4);
        assert_eq!(pda.transitions.len(), 5);
        let start_key = (Atom::sym("q0"), None, None);
        assert_eq!(
            pda.transitions[&start_key],
            vec![(Atom::sym("q1"), Some(Atom::sym("z")))]
        );
    }

    #[test]
    fn pda_undeclared_target_state_is_a_codomain_error() {
        let form = PDA_FIXED_START.replace("((q2 :e  z) . ((q3 :e)))", "((q2 :e  z) . ((q9 0)))");
        let errors = build_pda(&parse_form(&form)).unwrap_err();
        assert_eq!(codes(&errors), vec![ValidationCode::BadTransitionCodomain]);
        assert!(errors[0].message.contains("(Q9 0)"));
    }

    #[test]
    fn pda_accept_states_may_be_empty() {
        let form = PDA_FIXED_START.replace(":accept-states (q3)", ":accept-states ()");
        assert!(build_pda(&parse_form(&form)).is_ok());
    }

    #[test]
    fn epsilon_keyword_cannot_be_an_alphabet_member() {
        let form = PDA_FIXED_START.replace(":alphabet (0 1)", ":alphabet (0 1 :e)");
        let errors = build_pda(&parse_form(&form)).unwrap_err();
        assert!(codes(&errors).contains(&ValidationCode::MissingComponent));
        assert!(errors[0].message.contains(":alphabet"));
    }

    #[test]
    fn tm_blank_missing_message_is_exact() {
        let errors = build_tm(&parse_form(TM_MISSING_BLANK)).unwrap_err();
        assert!(codes(&errors).contains(&ValidationCode::BlankMissingFromTape));
        let blank = errors
            .iter()
            .find(|e| e.code == ValidationCode::BlankMissingFromTape)
            .unwrap();
        assert_eq!(
            blank.message,
            "Blank tape symbol nil missing from tape-alphabet."
        );
        // The nil transition keys are also outside the declared tape alphabet.
        assert!(codes(&errors).contains(&ValidationCode::BadTransitionDomain));
    }

    #[test]
    fn tm_with_blank_in_tape_builds() {
        let tm = build_tm(&parse_form(TM_WITH_BLANK)).unwrap();
        assert_eq!(tm.transitions.len(), 4);
        assert_eq!(tm.accept, Atom::sym("q1"));
        assert_eq!(tm.reject, Atom::sym("q2"));
        let key = (Atom::sym("q0"), Atom::Int(0));
        assert_eq!(
            tm.transitions[&key],
            (Atom::sym("q0"), Atom::Int(1), Direction::Left)
        );
    }

    #[test]
    fn tm_blank_in_input_alphabet_rejected() {
        let form = TM_WITH_BLANK.replace(":alphabet (0 1)", ":alphabet (0 1 nil)");
        let errors = build_tm(&parse_form(&form)).unwrap_err();
        assert!(codes(&errors).contains(&ValidationCode::BlankInInputAlphabet));
    }

    #[test]
    fn tm_input_must_be_subset_of_tape() {
        let form = TM_WITH_BLANK.replace(":alphabet (0 1)", ":alphabet (0 1 2)");
        let errors = build_tm(&parse_form(&form)).unwrap_err();
        assert!(codes(&errors).contains(&ValidationCode::InputNotSubsetOfTape));
    }

    #[test]
    fn tm_accept_equals_reject_rejected() {
        let form = TM_WITH_BLANK.replace(":reject-state q2", ":reject-state q1");
        let errors = build_tm(&parse_form(&form)).unwrap_err();
        assert!(codes(&errors).contains(&ValidationCode::AcceptEqualsReject));
    }

    #[test]
    fn tm_transitions_out_of_halting_states_rejected() {
        let form = TM_WITH_BLANK.replace(
            "((q3 nil) . (q1 nil L))",
            "((q3 nil) . (q1 nil L)) ((q1 0) . (q0 0 R))",
        );
        let errors = build_tm(&parse_form(&form)).unwrap_err();
        assert!(codes(&errors).contains(&ValidationCode::AcceptRejectInDomain));
    }

    #[test]
    fn duplicate_states_reported() {
        let errors = build_dfa(&parse_form(
            "(gen-dfa :name m :states (a a) :alphabet (0) :start a :accept ()
              :transition-fun (((a 0) . a)))",
        ))
        .unwrap_err();
        assert_eq!(codes(&errors), vec![ValidationCode::DuplicateSymbols]);
    }

    #[test]
    fn duplicate_names_within_a_file() {
        let forms = parse_sexprs(&format!("{INSTRUCTOR_DFA}\n{INSTRUCTOR_DFA}")).unwrap();
        let built = build_file(&forms);
        assert_eq!(built.machines.len(), 2);
        assert!(built.machines[0].result.is_ok());
        let errors = built.machines[1].result.as_ref().unwrap_err();
        assert_eq!(codes(errors), vec![ValidationCode::DuplicateName]);
        assert_eq!(errors[0].message, "Duplicate machine name instructor-dfa.");
    }

    #[test]
    fn builders_are_deterministic() {
        let form = parse_form(DOMAIN_MISMATCH);
        assert_eq!(build_dfa(&form).unwrap_err(), build_dfa(&form).unwrap_err());
    }
}
