//! Seeded generators and independent oracles shared by the integration
//! suites.
//!
//! Machines built here are valid by construction (total DFA transition
//! tables, declared symbols only) so they can be fed straight to the
//! interpreters. The DFA oracle simulates with its own index-based tables and
//! never touches the library's runners, keeping the comparison independent.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use automata::model::{Dfa, Direction, Pda, Tm};
use automata::sexpr::{Atom, SExpr, Word};

pub fn ints(values: &[i64]) -> Word {
    values.iter().map(|&i| Atom::Int(i)).collect()
}

pub fn binary_alphabet() -> Vec<Atom> {
    vec![Atom::Int(0), Atom::Int(1)]
}

/// Every word over the alphabet up to `max_len`, in length-then-lexicographic
/// order.
pub fn all_words(alphabet: &[Atom], max_len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new()];
    let mut level: Vec<Word> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * alphabet.len());
        for word in &level {
            for letter in alphabet {
                let mut longer = word.clone();
                longer.push(letter.clone());
                next.push(longer);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &[Atom], max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone())
        .collect()
}

fn state_names(prefix: &str, count: usize) -> Vec<Atom> {
    (0..count).map(|i| Atom::sym(&format!("{prefix}{i}"))).collect()
}

/// A random total DFA over {0, 1} with `1..=max_states` states.
pub fn random_dfa(rng: &mut ChaCha8Rng, max_states: usize) -> Dfa {
    let n = rng.gen_range(1..=max_states);
    let states = state_names("S", n);
    let alphabet = binary_alphabet();
    let mut transitions = HashMap::new();
    for state in &states {
        for letter in &alphabet {
            let target = states[rng.gen_range(0..n)].clone();
            transitions.insert((state.clone(), letter.clone()), target);
        }
    }
    let accept = states
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    Dfa {
        name: "RANDOM-DFA".to_string(),
        start: states[rng.gen_range(0..n)].clone(),
        states,
        alphabet,
        transitions,
        accept,
    }
}

/// A language-equal copy of a DFA with every state renamed.
pub fn renamed_dfa(dfa: &Dfa) -> Dfa {
    let rename = |state: &Atom| -> Atom {
        match state {
            Atom::Sym(s) => Atom::sym(&format!("COPY-{s}")),
            other => other.clone(),
        }
    };
    Dfa {
        name: "RENAMED-DFA".to_string(),
        states: dfa.states.iter().map(rename).collect(),
        alphabet: dfa.alphabet.clone(),
        transitions: dfa
            .transitions
            .iter()
            .map(|((s, c), t)| ((rename(s), c.clone()), rename(t)))
            .collect(),
        start: rename(&dfa.start),
        accept: dfa.accept.iter().map(rename).collect(),
    }
}

/// Index-based DFA simulation, independent of the library's interpreters.
struct DfaTable {
    start: usize,
    accept: Vec<bool>,
    delta: Vec<[usize; 2]>,
}

fn tabulate(dfa: &Dfa) -> DfaTable {
    let index: HashMap<&Atom, usize> = dfa.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let delta = dfa
        .states
        .iter()
        .map(|state| {
            [
                index[&dfa.transitions[&(state.clone(), Atom::Int(0))]],
                index[&dfa.transitions[&(state.clone(), Atom::Int(1))]],
            ]
        })
        .collect();
    DfaTable {
        start: index[&dfa.start],
        accept: dfa.states.iter().map(|s| dfa.is_accepting(s)).collect(),
        delta,
    }
}

/// Exhaustive acceptance comparison over all binary words of length at most
/// `max_len`. Returns the shortest disagreeing word, if any.
pub fn dfa_min_disagreement(a: &Dfa, b: &Dfa, max_len: usize) -> Option<Word> {
    let ta = tabulate(a);
    let tb = tabulate(b);
    let mut digit_words: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..=max_len {
        let mut next = Vec::with_capacity(digit_words.len() * 2);
        for digits in &digit_words {
            let run = |t: &DfaTable| -> bool {
                let mut state = t.start;
                for &d in digits {
                    state = t.delta[state][d];
                }
                t.accept[state]
            };
            if run(&ta) != run(&tb) {
                return Some(digits.iter().map(|&d| Atom::Int(d as i64)).collect());
            }
            if digits.len() < max_len {
                for d in 0..2 {
                    let mut longer = digits.clone();
                    longer.push(d);
                    next.push(longer);
                }
            }
        }
        digit_words = next;
    }
    None
}

/// A random PDA over input {0, 1} and stack {A, Z}, shaped so bounded runs
/// stay small: one start epsilon transition, input-consuming transitions that
/// may push one symbol, and epsilon transitions that need a stack top.
pub fn random_pda(rng: &mut ChaCha8Rng) -> Pda {
    let n = rng.gen_range(2..=3);
    let states = state_names("Q", n);
    let alphabet = binary_alphabet();
    let stack_alphabet = vec![Atom::sym("A"), Atom::sym("Z")];
    let mut transitions: HashMap<automata::model::PdaKey, Vec<automata::model::PdaSuccessor>> =
        HashMap::new();
    let start = states[0].clone();
    transitions.insert(
        (start.clone(), None, None),
        vec![(states[rng.gen_range(0..n)].clone(), Some(Atom::sym("Z")))],
    );
    let push_options: [Option<Atom>; 3] = [None, Some(Atom::sym("A")), Some(Atom::sym("Z"))];
    for state in &states {
        for letter in &alphabet {
            if !rng.gen_bool(0.7) {
                continue;
            }
            let pop = push_options[rng.gen_range(0..3)].clone();
            let key = (state.clone(), Some(letter.clone()), pop);
            let succ_count = rng.gen_range(1..=2);
            let successors = (0..succ_count)
                .map(|_| {
                    (
                        states[rng.gen_range(0..n)].clone(),
                        push_options[rng.gen_range(0..3)].clone(),
                    )
                })
                .collect();
            transitions.insert(key, successors);
        }
        if rng.gen_bool(0.5) {
            let pop = if rng.gen_bool(0.5) { "A" } else { "Z" };
            let key = (state.clone(), None, Some(Atom::sym(pop)));
            transitions.entry(key).or_insert_with(|| {
                vec![(
                    states[rng.gen_range(0..n)].clone(),
                    push_options[rng.gen_range(0..3)].clone(),
                )]
            });
        }
    }
    let accept = states
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    Pda {
        name: "RANDOM-PDA".to_string(),
        states,
        alphabet,
        stack_alphabet,
        transitions,
        start,
        accept,
    }
}

/// A random TM over input {0, 1} and tape {0, 1, nil} with a partial
/// transition table and dedicated halting states.
pub fn random_tm(rng: &mut ChaCha8Rng) -> Tm {
    let n = rng.gen_range(1..=3);
    let mut states = state_names("W", n);
    let accept = Atom::sym("QA");
    let reject = Atom::sym("QR");
    states.push(accept.clone());
    states.push(reject.clone());
    let alphabet = binary_alphabet();
    let tape_alphabet = vec![Atom::Int(0), Atom::Int(1), Atom::nil()];
    let mut transitions = HashMap::new();
    for state in &states[..n] {
        for symbol in &tape_alphabet {
            if !rng.gen_bool(0.8) {
                continue;
            }
            let target = states[rng.gen_range(0..states.len())].clone();
            let write = tape_alphabet[rng.gen_range(0..3)].clone();
            let direction = if rng.gen_bool(0.5) {
                Direction::Left
            } else {
                Direction::Right
            };
            transitions.insert((state.clone(), symbol.clone()), (target, write, direction));
        }
    }
    Tm {
        name: "RANDOM-TM".to_string(),
        start: states[0].clone(),
        states,
        alphabet,
        tape_alphabet,
        transitions,
        accept,
        reject,
    }
}

fn random_name(rng: &mut ChaCha8Rng) -> String {
    let first = char::from(b'A' + rng.gen_range(0..26));
    let tail: String = (0..rng.gen_range(0..6))
        .map(|_| {
            let chars = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-";
            char::from(chars[rng.gen_range(0..chars.len())])
        })
        .collect();
    format!("{first}{tail}")
}

/// A random expression in canonical form (symbols and keywords uppercase),
/// so printing and reparsing must reproduce it exactly.
pub fn random_sexpr(rng: &mut ChaCha8Rng, depth: usize) -> SExpr {
    let leaf = rng.gen_range(0..6);
    match leaf {
        0 => SExpr::Symbol(random_name(rng)),
        1 => SExpr::Integer(rng.gen()),
        2 => SExpr::Keyword(random_name(rng)),
        3 | 4 if depth > 0 => {
            let len = rng.gen_range(0..4);
            SExpr::List((0..len).map(|_| random_sexpr(rng, depth - 1)).collect())
        }
        5 if depth > 0 => SExpr::DottedPair(
            Box::new(random_sexpr(rng, depth - 1)),
            Box::new(random_sexpr(rng, depth - 1)),
        ),
        _ => SExpr::Integer(rng.gen_range(-100..100)),
    }
}
