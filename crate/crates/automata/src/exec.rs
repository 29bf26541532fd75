//! Bounded interpreters for the three machine kinds.
//!
//! `run_dfa` is total: the transition function is total and words are finite.
//! PDAs are nondeterministic and may make epsilon moves, so `run_pda`
//! explores the execution tree breadth-first up to a depth bound; Turing
//! machines may diverge, so `run_tm` takes a step budget. Both bounds default
//! to 1000 via [`RunBounds`] and are configured per assignment.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{Dfa, Direction, Pda, Tm};
use crate::sexpr::{Atom, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("letter {letter} at position {index} is not in the machine's alphabet")]
    LetterNotInAlphabet { letter: Atom, index: usize },
}

/// Execution bounds: the maximum PDA execution-tree depth and the maximum
/// number of TM steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunBounds {
    pub pda_depth: usize,
    pub tm_steps: usize,
}

impl Default for RunBounds {
    fn default() -> Self {
        RunBounds {
            pda_depth: 1000,
            tm_steps: 1000,
        }
    }
}

fn check_word(alphabet: &[Atom], word: &[Atom]) -> Result<(), ExecError> {
    for (index, letter) in word.iter().enumerate() {
        if !alphabet.contains(letter) {
            return Err(ExecError::LetterNotInAlphabet {
                letter: letter.clone(),
                index,
            });
        }
    }
    Ok(())
}

/// Runs the DFA from an arbitrary state. Folding is associative over word
/// concatenation: running `u ++ v` from the start equals running `v` from
/// `run_dfa(m, u)`.
pub fn run_dfa_from(m: &Dfa, state: &Atom, word: &[Atom]) -> Result<Atom, ExecError> {
    check_word(&m.alphabet, word)?;
    let mut current = state.clone();
    for letter in word {
        current = m
            .transitions
            .get(&(current, letter.clone()))
            .expect("validated DFA transition function is total")
            .clone();
    }
    Ok(current)
}

/// The state reached by folding the transition function over the word from
/// the start state.
pub fn run_dfa(m: &Dfa, word: &[Atom]) -> Result<Atom, ExecError> {
    run_dfa_from(m, &m.start, word)
}

/// True iff the word drives the DFA into an accept state.
pub fn accept_dfa(m: &Dfa, word: &[Atom]) -> Result<bool, ExecError> {
    Ok(m.is_accepting(&run_dfa(m, word)?))
}

/// A node of the PDA execution tree: the state reached, the stack contents
/// (first element is the top) and the unconsumed suffix of the input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PdaExecTuple {
    pub state: Atom,
    pub stack: Vec<Atom>,
    pub remaining: Vec<Atom>,
}

impl PdaExecTuple {
    fn accepted(&self, m: &Pda) -> bool {
        self.remaining.is_empty() && m.is_accepting(&self.state)
    }

    /// The candidate transition keys for this tuple: with and without the
    /// next input letter, with and without the stack top.
    fn candidate_keys(&self) -> Vec<(Option<Atom>, Option<Atom>)> {
        let letter = self.remaining.first().cloned();
        let top = self.stack.first().cloned();
        let mut keys = vec![(None, None)];
        if let Some(top) = &top {
            keys.push((None, Some(top.clone())));
        }
        if let Some(letter) = &letter {
            keys.push((Some(letter.clone()), None));
        }
        if let (Some(letter), Some(top)) = (letter, top) {
            keys.push((Some(letter), Some(top)));
        }
        keys
    }

    /// A leaf is active when any candidate key is in the transition function.
    fn is_active(&self, m: &Pda) -> bool {
        self.candidate_keys()
            .into_iter()
            .any(|(a, s)| m.transitions.contains_key(&(self.state.clone(), a, s)))
    }

    fn children(&self, m: &Pda) -> Vec<PdaExecTuple> {
        let mut out = Vec::new();
        for (letter, top) in self.candidate_keys() {
            let key = (self.state.clone(), letter.clone(), top.clone());
            let Some(successors) = m.transitions.get(&key) else {
                continue;
            };
            for (target, push) in successors {
                let mut stack = if top.is_some() {
                    self.stack[1..].to_vec()
                } else {
                    self.stack.clone()
                };
                if let Some(push) = push {
                    stack.insert(0, push.clone());
                }
                let remaining = if letter.is_some() {
                    self.remaining[1..].to_vec()
                } else {
                    self.remaining.clone()
                };
                out.push(PdaExecTuple {
                    state: target.clone(),
                    stack,
                    remaining,
                });
            }
        }
        out
    }
}

/// Result of a bounded PDA run. `exhausted` is true when the whole execution
/// tree was explored (no active leaves remained), in which case no larger
/// bound can change the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdaOutcome {
    Accepted,
    NotAccepted { exhausted: bool },
}

/// Breadth-first bounded execution of the PDA on a word.
///
/// The tree is rooted at `(start, empty stack, word)`; a tuple is accepted
/// when its state is accepting and its input is consumed (the root counts, at
/// depth 0). Every edge — epsilon moves included — increments depth. Leaves
/// at depth up to `depth` are expanded; duplicate tuples within one level are
/// deduplicated, which cannot change the outcome because acceptance is
/// existential over tuples.
pub fn run_pda(m: &Pda, word: &[Atom], depth: usize) -> Result<PdaOutcome, ExecError> {
    check_word(&m.alphabet, word)?;
    let root = PdaExecTuple {
        state: m.start.clone(),
        stack: Vec::new(),
        remaining: word.to_vec(),
    };
    if root.accepted(m) {
        return Ok(PdaOutcome::Accepted);
    }
    let mut frontier = vec![root];
    for _ in 0..=depth {
        let mut seen: HashSet<PdaExecTuple> = HashSet::new();
        let mut next = Vec::new();
        for tuple in &frontier {
            for child in tuple.children(m) {
                if child.accepted(m) {
                    return Ok(PdaOutcome::Accepted);
                }
                if child.is_active(m) && seen.insert(child.clone()) {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return Ok(PdaOutcome::NotAccepted { exhausted: true });
        }
        frontier = next;
    }
    Ok(PdaOutcome::NotAccepted { exhausted: false })
}

/// True iff the bounded run accepts; a depth-limited non-answer counts as
/// rejection, mirroring the boolean the grader reports.
pub fn accept_pda(m: &Pda, word: &[Atom], depth: usize) -> Result<bool, ExecError> {
    Ok(run_pda(m, word, depth)? == PdaOutcome::Accepted)
}

/// How a bounded TM run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmStatus {
    Accepted,
    Rejected,
    OutOfFuel,
}

/// A TM configuration: the current state and the tape split at the head.
/// `left` holds the cells left of the head nearest-head-first (reversed);
/// the head is over the first cell of `right`, and an empty `right` means
/// the head scans a blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmConfiguration {
    pub state: Atom,
    pub left: Vec<Atom>,
    pub right: Vec<Atom>,
    pub status: TmStatus,
}

/// Runs the TM for at most `steps` steps.
///
/// Each step writes over the scanned cell and then moves: on a right move the
/// written symbol is pushed onto the front of `left`; on a left move the
/// first cell of `left` (blank if none) is popped onto the front of `right`.
/// A scanned `(state, symbol)` pair outside the transition function halts the
/// machine in its reject state without moving.
pub fn run_tm(m: &Tm, word: &[Atom], steps: usize) -> Result<TmConfiguration, ExecError> {
    check_word(&m.alphabet, word)?;
    let mut state = m.start.clone();
    let mut left: Vec<Atom> = Vec::new();
    let mut right: Vec<Atom> = word.to_vec();
    let mut status = halt_status(m, &state).unwrap_or(TmStatus::OutOfFuel);
    let mut fuel = steps;
    while fuel > 0 && status == TmStatus::OutOfFuel {
        fuel -= 1;
        let scanned = right.first().cloned().unwrap_or_else(Atom::nil);
        match m.transitions.get(&(state.clone(), scanned)) {
            None => {
                state = m.reject.clone();
                status = TmStatus::Rejected;
            }
            Some((target, write, direction)) => {
                if right.is_empty() {
                    right.push(write.clone());
                } else {
                    right[0] = write.clone();
                }
                match direction {
                    Direction::Right => {
                        let written = right.remove(0);
                        left.insert(0, written);
                    }
                    Direction::Left => {
                        let popped = if left.is_empty() {
                            Atom::nil()
                        } else {
                            left.remove(0)
                        };
                        right.insert(0, popped);
                    }
                }
                state = target.clone();
                if let Some(halted) = halt_status(m, &state) {
                    status = halted;
                }
            }
        }
    }
    Ok(TmConfiguration {
        state,
        left,
        right,
        status,
    })
}

fn halt_status(m: &Tm, state: &Atom) -> Option<TmStatus> {
    if state == &m.accept {
        Some(TmStatus::Accepted)
    } else if state == &m.reject {
        Some(TmStatus::Rejected)
    } else {
        None
    }
}

/// The tape strictly left of the head, leftmost cell first.
pub fn left_of_head(config: &TmConfiguration) -> Word {
    config.left.iter().rev().cloned().collect()
}

/// Drops the maximal trailing run of blanks; interior blanks are kept.
pub fn remove_final_nils(mut tape: Word) -> Word {
    while tape.last().is_some_and(Atom::is_nil) {
        tape.pop();
    }
    tape
}

/// The machine's output on a word: the tape left of the head after the
/// bounded run, with trailing blanks removed. Defined regardless of whether
/// the run halted.
pub fn tm_output(m: &Tm, word: &[Atom], steps: usize) -> Result<Word, ExecError> {
    Ok(remove_final_nils(left_of_head(&run_tm(m, word, steps)?)))
}

/// True iff the TM halts in its accept state within the step budget.
pub fn accept_tm(m: &Tm, word: &[Atom], steps: usize) -> Result<bool, ExecError> {
    Ok(run_tm(m, word, steps)?.status == TmStatus::Accepted)
}
