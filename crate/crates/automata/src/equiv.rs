//! Equivalence testing between a student machine and a reference machine.
//!
//! Alphabets are compared first; the least symbol in the symmetric difference
//! is reported as a witness. Language equivalence is then tested
//! differentially on a deterministic word stream: an exhaustive prefix of
//! every word up to a small length (so short counterexamples are never
//! missed), followed by seeded pseudo-random words. TM equivalence gets a
//! second test comparing machine outputs. For DFAs, where equivalence is
//! decidable, [`dfa_equiv_decide`] runs a complete union-find product search
//! that is near-linear in the total number of states and returns a shortest
//! distinguishing word when the machines differ.
//!
//! Reported witnesses are re-run through the interpreters before they are
//! returned, so a `NotEquivalent` verdict only ever carries words that
//! genuinely reproduce a disagreement.
//!
//! Instructors can also state properties over a word variable in a small
//! closed language (see [`PropertySpec`]); [`check_property`] evaluates a
//! property over the same word stream and reports the first failing binding.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::{
    accept_dfa, accept_pda, accept_tm, tm_output, ExecError, RunBounds,
};
use crate::model::{Dfa, Machine, MachineKind, Tm};
use crate::sexpr::{print_sexpr, Atom, SExpr, Word};

/// Knobs for randomized testing. Defaults: 1000 test words of length at most
/// 8, an exhaustive prefix over every word of length at most 4, seed 0, and
/// at most 3 reported witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestConfig {
    pub num_tests: usize,
    pub max_word_len: usize,
    pub exhaustive_len: usize,
    pub seed: u64,
    pub bounds: RunBounds,
    pub max_reported: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            num_tests: 1000,
            max_word_len: 8,
            exhaustive_len: 4,
            seed: 0,
            bounds: RunBounds::default(),
            max_reported: 3,
        }
    }
}

/// How an equivalence verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// The complete DFA decision procedure.
    Decision,
    /// Randomized differential testing; may miss counterexamples.
    Testing,
}

/// Outcome of an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    Equivalent { by: Method },
    /// Words on which the two machines verifiably disagree, in generation
    /// order (shortest first for the decision procedure).
    NotEquivalent { witnesses: Vec<Word> },
    /// The alphabets differ; the witness symbol is in one alphabet but not
    /// the other.
    AlphabetMismatch { witness: Atom },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("the alphabet is empty")]
    EmptyAlphabet,
    #[error("unknown machine name {0}")]
    UnknownMachineName(String),
    #[error("machine {machine} is a {found}, expected a {expected}")]
    KindMismatch {
        machine: String,
        expected: MachineKind,
        found: MachineKind,
    },
    #[error("bad property form: {0}")]
    BadProperty(String),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Result of comparing two alphabets as sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetCheck {
    Equal,
    /// The least element (in canonical atom order) of the symmetric
    /// difference.
    Witness(Atom),
}

/// Set equality of two alphabets, ignoring declaration order.
pub fn alphabet_equal(a: &[Atom], b: &[Atom]) -> AlphabetCheck {
    let sa: BTreeSet<&Atom> = a.iter().collect();
    let sb: BTreeSet<&Atom> = b.iter().collect();
    match sa.symmetric_difference(&sb).next() {
        None => AlphabetCheck::Equal,
        Some(atom) => AlphabetCheck::Witness((*atom).clone()),
    }
}

/// The canonical enumeration order of an alphabet: integers by value, then
/// symbols by name, duplicates removed.
fn canonical_alphabet(alphabet: &[Atom]) -> Vec<Atom> {
    let set: BTreeSet<Atom> = alphabet.iter().cloned().collect();
    set.into_iter().collect()
}

/// Deterministic test word stream for an alphabet.
///
/// First every word of length at most `exhaustive_len`, in
/// length-then-lexicographic order of the canonical alphabet; then seeded
/// pseudo-random words with length uniform in `0..=max_word_len` and letters
/// uniform over the alphabet, until `num_tests` words in total (the full
/// exhaustive prefix is always kept). Duplicates may occur in the random
/// tail.
pub fn gen_words(alphabet: &[Atom], cfg: &TestConfig) -> Result<Vec<Word>, EquivError> {
    let letters = canonical_alphabet(alphabet);
    if letters.is_empty() {
        return Err(EquivError::EmptyAlphabet);
    }
    let mut words: Vec<Word> = vec![Vec::new()];
    for len in 1..=cfg.exhaustive_len {
        let mut digits = vec![0usize; len];
        loop {
            words.push(digits.iter().map(|&d| letters[d].clone()).collect());
            // Odometer increment, least significant digit last, so each
            // length class comes out in lexicographic order.
            let mut pos = len;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < letters.len() {
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while words.len() < cfg.num_tests {
        let len = rng.gen_range(0..=cfg.max_word_len);
        let word = (0..len)
            .map(|_| letters[rng.gen_range(0..letters.len())].clone())
            .collect();
        words.push(word);
    }
    Ok(words)
}

/// Whether the machine accepts the word, under the configured bounds.
pub fn accept_machine(m: &Machine, word: &[Atom], bounds: &RunBounds) -> Result<bool, ExecError> {
    match m {
        Machine::Dfa(dfa) => accept_dfa(dfa, word),
        Machine::Pda(pda) => accept_pda(pda, word, bounds.pda_depth),
        Machine::Tm(tm) => accept_tm(tm, word, bounds.tm_steps),
    }
}

/// Differential language-equivalence test.
///
/// Words are generated over the *reference* alphabet. Returns the first
/// `max_reported` distinct disagreeing words in generation order, each
/// re-verified before reporting, or `Equivalent(by: Testing)` when every test
/// word agrees.
pub fn test_equiv_lang(
    student: &Machine,
    reference: &Machine,
    cfg: &TestConfig,
) -> Result<EquivVerdict, EquivError> {
    if student.kind() != reference.kind() {
        return Err(EquivError::KindMismatch {
            machine: student.display_name(),
            expected: reference.kind(),
            found: student.kind(),
        });
    }
    if let AlphabetCheck::Witness(witness) = alphabet_equal(student.alphabet(), reference.alphabet())
    {
        return Ok(EquivVerdict::AlphabetMismatch { witness });
    }
    let disagrees = |word: &Word| -> Result<bool, ExecError> {
        Ok(accept_machine(student, word, &cfg.bounds)?
            != accept_machine(reference, word, &cfg.bounds)?)
    };
    let mut witnesses: Vec<Word> = Vec::new();
    for word in gen_words(reference.alphabet(), cfg)? {
        if witnesses.len() >= cfg.max_reported {
            break;
        }
        if !witnesses.contains(&word) && disagrees(&word)? {
            witnesses.push(word);
        }
    }
    // Witnesses must reproduce when re-run; drop any that do not.
    let mut confirmed = Vec::with_capacity(witnesses.len());
    for word in witnesses {
        if disagrees(&word)? {
            confirmed.push(word);
        }
    }
    if confirmed.is_empty() {
        Ok(EquivVerdict::Equivalent {
            by: Method::Testing,
        })
    } else {
        Ok(EquivVerdict::NotEquivalent {
            witnesses: confirmed,
        })
    }
}

/// Differential output-equivalence test for TMs: both machines must produce
/// the same tape left of the head (after blank trimming) on every test word.
pub fn test_equiv_tm_output(
    student: &Tm,
    reference: &Tm,
    cfg: &TestConfig,
) -> Result<EquivVerdict, EquivError> {
    if let AlphabetCheck::Witness(witness) = alphabet_equal(&student.alphabet, &reference.alphabet)
    {
        return Ok(EquivVerdict::AlphabetMismatch { witness });
    }
    let steps = cfg.bounds.tm_steps;
    let disagrees = |word: &Word| -> Result<bool, ExecError> {
        Ok(tm_output(student, word, steps)? != tm_output(reference, word, steps)?)
    };
    let mut witnesses: Vec<Word> = Vec::new();
    for word in gen_words(&reference.alphabet, cfg)? {
        if witnesses.len() >= cfg.max_reported {
            break;
        }
        if !witnesses.contains(&word) && disagrees(&word)? {
            witnesses.push(word);
        }
    }
    let mut confirmed = Vec::with_capacity(witnesses.len());
    for word in witnesses {
        if disagrees(&word)? {
            confirmed.push(word);
        }
    }
    if confirmed.is_empty() {
        Ok(EquivVerdict::Equivalent {
            by: Method::Testing,
        })
    } else {
        Ok(EquivVerdict::NotEquivalent {
            witnesses: confirmed,
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            rank: vec![0; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.rank[ra] < self.rank[rb] {
            self.parent[ra] = rb;
        } else if self.rank[ra] > self.rank[rb] {
            self.parent[rb] = ra;
        } else {
            self.parent[rb] = ra;
            self.rank[ra] += 1;
        }
    }
}

/// Complete DFA equivalence decision.
///
/// Explores the product of the two machines breadth-first, merging each
/// visited state pair in a union-find over the disjoint state sets and
/// skipping pairs already known to be merged, so the whole search is nearly
/// linear in the total number of states. Pairs merged along the way always
/// agree on acceptance, so the first acceptance mismatch found is reachable
/// by a shortest distinguishing word, which is reconstructed and returned.
///
/// Alphabets must be set-equal; otherwise `AlphabetMismatch` is returned.
pub fn dfa_equiv_decide(a: &Dfa, b: &Dfa) -> EquivVerdict {
    if let AlphabetCheck::Witness(witness) = alphabet_equal(&a.alphabet, &b.alphabet) {
        return EquivVerdict::AlphabetMismatch { witness };
    }
    let letters = canonical_alphabet(&a.alphabet);

    let index = |states: &[Atom]| -> HashMap<Atom, usize> {
        states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect()
    };
    let table = |m: &Dfa, idx: &HashMap<Atom, usize>| -> Vec<Vec<usize>> {
        m.states
            .iter()
            .map(|state| {
                letters
                    .iter()
                    .map(|letter| {
                        let target = &m.transitions[&(state.clone(), letter.clone())];
                        idx[target]
                    })
                    .collect()
            })
            .collect()
    };
    let idx_a = index(&a.states);
    let idx_b = index(&b.states);
    let delta_a = table(a, &idx_a);
    let delta_b = table(b, &idx_b);
    let acc_a: Vec<bool> = a.states.iter().map(|s| a.is_accepting(s)).collect();
    let acc_b: Vec<bool> = b.states.iter().map(|s| b.is_accepting(s)).collect();

    let offset = a.states.len();
    let mut uf = UnionFind::new(a.states.len() + b.states.len());

    // Each discovered pair remembers how it was reached so a witness word can
    // be read back off the parent chain.
    struct Pair {
        a: usize,
        b: usize,
        via: Option<(usize, usize)>, // (parent pair, letter index)
    }
    let witness = |pairs: &[Pair], mut at: usize, last_letter: Option<usize>| -> Word {
        let mut reversed: Vec<usize> = last_letter.into_iter().collect();
        while let Some((parent, letter)) = pairs[at].via {
            reversed.push(letter);
            at = parent;
        }
        reversed.into_iter().rev().map(|l| letters[l].clone()).collect()
    };

    let start_a = idx_a[&a.start];
    let start_b = idx_b[&b.start];
    let mut pairs = vec![Pair {
        a: start_a,
        b: start_b,
        via: None,
    }];
    if acc_a[start_a] != acc_b[start_b] {
        return EquivVerdict::NotEquivalent {
            witnesses: vec![Vec::new()],
        };
    }
    uf.union(start_a, start_b + offset);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);

    while let Some(pair_index) = queue.pop_front() {
        let (pa, pb) = (pairs[pair_index].a, pairs[pair_index].b);
        for letter_index in 0..letters.len() {
            let na = delta_a[pa][letter_index];
            let nb = delta_b[pb][letter_index];
            if uf.find(na) == uf.find(nb + offset) {
                continue;
            }
            if acc_a[na] != acc_b[nb] {
                return EquivVerdict::NotEquivalent {
                    witnesses: vec![witness(&pairs, pair_index, Some(letter_index))],
                };
            }
            uf.union(na, nb + offset);
            pairs.push(Pair {
                a: na,
                b: nb,
                via: Some((pair_index, letter_index)),
            });
            queue.push_back(pairs.len() - 1);
        }
    }
    EquivVerdict::Equivalent {
        by: Method::Decision,
    }
}

/// A word expression inside a property formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordExpr {
    /// The bound word variable.
    Var,
    /// A literal word; letters must come from the generator alphabet.
    Lit(Word),
    /// Concatenation of word expressions.
    Concat(Vec<WordExpr>),
    /// The output of a TM run on a word expression.
    Output { machine: String, word: Box<WordExpr> },
}

/// A property formula over one word variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Accepts { machine: String, word: WordExpr },
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    OutEq(WordExpr, WordExpr),
}

/// A named property: `forall w over alphabet. formula`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySpec {
    pub name: String,
    pub var: String,
    /// Generator alphabet, normally the reference machine's input alphabet.
    pub alphabet: Vec<Atom>,
    pub formula: Formula,
}

/// Result of checking a property over the generated words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyOutcome {
    Pass,
    /// The first generated binding of the word variable that falsifies the
    /// formula.
    Counterexample(Word),
}

/// Parses a `(property <name> (w) <formula>)` form.
///
/// Formulas are `(accepts <machine> <wordexpr>)`, `(not f)`,
/// `(implies f f)` and `(out= we we)`; word expressions are the variable, a
/// literal word such as `'(0 1)` or `:e`, `(concat we ...)` and
/// `(output <machine> we)`.
pub fn parse_property(form: &SExpr, alphabet: &[Atom]) -> Result<PropertySpec, EquivError> {
    let bad = |msg: String| EquivError::BadProperty(msg);
    let items = form
        .as_list()
        .ok_or_else(|| bad("expected a property list".into()))?;
    match items {
        [head, name, vars, formula] if head.is_symbol("property") => {
            let name = match name {
                SExpr::Symbol(s) => s.clone(),
                other => return Err(bad(format!("bad property name {}", print_sexpr(other)))),
            };
            let var = match vars.as_list() {
                Some([SExpr::Symbol(v)]) => v.clone(),
                _ => {
                    return Err(bad(format!(
                        "expected a single word variable, got {}",
                        print_sexpr(vars)
                    )))
                }
            };
            let formula = parse_formula(formula, &var, alphabet)?;
            Ok(PropertySpec {
                name,
                var,
                alphabet: alphabet.to_vec(),
                formula,
            })
        }
        _ => Err(bad(format!("malformed property form {}", print_sexpr(form)))),
    }
}

fn parse_formula(expr: &SExpr, var: &str, alphabet: &[Atom]) -> Result<Formula, EquivError> {
    let bad = |msg: String| EquivError::BadProperty(msg);
    let items = expr
        .as_list()
        .ok_or_else(|| bad(format!("expected a formula, got {}", print_sexpr(expr))))?;
    match items {
        [head, machine, word] if head.is_symbol("accepts") => {
            let machine = match machine {
                SExpr::Symbol(s) => s.clone(),
                other => return Err(bad(format!("bad machine name {}", print_sexpr(other)))),
            };
            Ok(Formula::Accepts {
                machine,
                word: parse_word_expr(word, var, alphabet)?,
            })
        }
        [head, inner] if head.is_symbol("not") => Ok(Formula::Not(Box::new(parse_formula(
            inner, var, alphabet,
        )?))),
        [head, lhs, rhs] if head.is_symbol("implies") => Ok(Formula::Implies(
            Box::new(parse_formula(lhs, var, alphabet)?),
            Box::new(parse_formula(rhs, var, alphabet)?),
        )),
        [head, lhs, rhs] if head.is_symbol("out=") => Ok(Formula::OutEq(
            parse_word_expr(lhs, var, alphabet)?,
            parse_word_expr(rhs, var, alphabet)?,
        )),
        _ => Err(bad(format!("unknown formula {}", print_sexpr(expr)))),
    }
}

fn parse_word_expr(expr: &SExpr, var: &str, alphabet: &[Atom]) -> Result<WordExpr, EquivError> {
    let bad = |msg: String| EquivError::BadProperty(msg);
    match expr {
        SExpr::Symbol(s) if s == var => Ok(WordExpr::Var),
        SExpr::Symbol(s) => Err(bad(format!("unknown word variable {s}"))),
        SExpr::Keyword(k) if k == "E" => Ok(WordExpr::Lit(Vec::new())),
        SExpr::List(items) => match items.split_first() {
            Some((head, rest)) if head.is_symbol("concat") => {
                let parts = rest
                    .iter()
                    .map(|e| parse_word_expr(e, var, alphabet))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(WordExpr::Concat(parts))
            }
            Some((head, [machine, word])) if head.is_symbol("output") => {
                let machine = match machine {
                    SExpr::Symbol(s) => s.clone(),
                    other => return Err(bad(format!("bad machine name {}", print_sexpr(other)))),
                };
                Ok(WordExpr::Output {
                    machine,
                    word: Box::new(parse_word_expr(word, var, alphabet)?),
                })
            }
            _ => {
                let letters: Option<Word> = items.iter().map(Atom::from_sexpr).collect();
                match letters {
                    Some(word) => {
                        if let Some(stray) = word.iter().find(|l| !alphabet.contains(l)) {
                            return Err(bad(format!(
                                "literal letter {stray} is not in the alphabet"
                            )));
                        }
                        Ok(WordExpr::Lit(word))
                    }
                    None => Err(bad(format!(
                        "expected a word expression, got {}",
                        print_sexpr(expr)
                    ))),
                }
            }
        },
        other => Err(bad(format!(
            "expected a word expression, got {}",
            print_sexpr(other)
        ))),
    }
}

fn lookup<'a>(
    machines: &HashMap<String, &'a Machine>,
    name: &str,
) -> Result<&'a Machine, EquivError> {
    machines
        .get(name)
        .copied()
        .ok_or_else(|| EquivError::UnknownMachineName(name.to_ascii_lowercase()))
}

fn eval_word_expr(
    expr: &WordExpr,
    binding: &Word,
    machines: &HashMap<String, &Machine>,
    bounds: &RunBounds,
) -> Result<Word, EquivError> {
    match expr {
        WordExpr::Var => Ok(binding.clone()),
        WordExpr::Lit(word) => Ok(word.clone()),
        WordExpr::Concat(parts) => {
            let mut word = Vec::new();
            for part in parts {
                word.extend(eval_word_expr(part, binding, machines, bounds)?);
            }
            Ok(word)
        }
        WordExpr::Output { machine, word } => {
            let machine_ref = lookup(machines, machine)?;
            let Machine::Tm(tm) = machine_ref else {
                return Err(EquivError::KindMismatch {
                    machine: machine.to_ascii_lowercase(),
                    expected: MachineKind::Tm,
                    found: machine_ref.kind(),
                });
            };
            let input = eval_word_expr(word, binding, machines, bounds)?;
            Ok(tm_output(tm, &input, bounds.tm_steps)?)
        }
    }
}

fn eval_formula(
    formula: &Formula,
    binding: &Word,
    machines: &HashMap<String, &Machine>,
    bounds: &RunBounds,
) -> Result<bool, EquivError> {
    match formula {
        Formula::Accepts { machine, word } => {
            let machine = lookup(machines, machine)?;
            let word = eval_word_expr(word, binding, machines, bounds)?;
            Ok(accept_machine(machine, &word, bounds)?)
        }
        Formula::Not(inner) => Ok(!eval_formula(inner, binding, machines, bounds)?),
        Formula::Implies(lhs, rhs) => {
            if !eval_formula(lhs, binding, machines, bounds)? {
                Ok(true)
            } else {
                eval_formula(rhs, binding, machines, bounds)
            }
        }
        Formula::OutEq(lhs, rhs) => Ok(eval_word_expr(lhs, binding, machines, bounds)?
            == eval_word_expr(rhs, binding, machines, bounds)?),
    }
}

/// Evaluates the property on every generated word and returns the first
/// failing binding, if any.
pub fn check_property(
    property: &PropertySpec,
    machines: &HashMap<String, &Machine>,
    cfg: &TestConfig,
) -> Result<PropertyOutcome, EquivError> {
    for word in gen_words(&property.alphabet, cfg)? {
        if !eval_formula(&property.formula, &word, machines, &cfg.bounds)? {
            return Ok(PropertyOutcome::Counterexample(word));
        }
    }
    Ok(PropertyOutcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_dfa, build_tm};
    use crate::sexpr::parse_sexprs;

    fn ints(values: &[i64]) -> Word {
        values.iter().map(|&i| Atom::Int(i)).collect()
    }

    fn machine(text: &str) -> Machine {
        crate::model::build_machine(&parse_sexprs(text).unwrap().remove(0)).unwrap()
    }

    fn dfa(text: &str) -> Dfa {
        build_dfa(&parse_sexprs(text).unwrap().remove(0)).unwrap()
    }

    const SINK_BUG: &str = include_str!("../tests/fixtures/dfa/sink_bug.lisp");
    const ODD_ONES: &str = include_str!("../tests/fixtures/dfa/odd_ones.lisp");
    const ALPHABET_0_2: &str = include_str!("../tests/fixtures/dfa/alphabet_0_2.lisp");
    const INSTRUCTOR_DFA: &str = include_str!("../tests/fixtures/dfa/instructor_odd_ones.lisp");
    const PDA_EPS_FIX: &str = include_str!("../tests/fixtures/pda/epsilon_branch_fix.lisp");
    const TM_LEFT_BUG: &str = include_str!("../tests/fixtures/tm/moves_left_bug.lisp");
    const TM_FLIP: &str = include_str!("../tests/fixtures/tm/flip_bits.lisp");
    const TM_INSTRUCTOR: &str = include_str!("../tests/fixtures/tm/instructor_flip.lisp");

    #[test]
    fn exhaustive_prefix_order_binary() {
        let cfg = TestConfig {
            num_tests: 7,
            exhaustive_len: 1,
            ..TestConfig::default()
        };
        let words = gen_words(&ints(&[1, 0]), &cfg).unwrap();
        assert_eq!(&words[..3], &[ints(&[]), ints(&[0]), ints(&[1])][..]);
    }

    #[test]
    fn exhaustive_prefix_order_unary() {
        let cfg = TestConfig {
            num_tests: 5,
            exhaustive_len: 2,
            ..TestConfig::default()
        };
        let words = gen_words(&ints(&[0]), &cfg).unwrap();
        assert_eq!(&words[..3], &[ints(&[]), ints(&[0]), ints(&[0, 0])][..]);
    }

    #[test]
    fn word_stream_is_deterministic_and_sized() {
        let cfg = TestConfig::default();
        let a = gen_words(&ints(&[0, 1]), &cfg).unwrap();
        let b = gen_words(&ints(&[0, 1]), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), cfg.num_tests);
        assert!(a.iter().all(|w| w.len() <= cfg.max_word_len));
        let reseeded = TestConfig {
            seed: 7,
            ..TestConfig::default()
        };
        assert_ne!(gen_words(&ints(&[0, 1]), &reseeded).unwrap(), a);
    }

    #[test]
    fn empty_alphabet_is_an_error() {
        assert_eq!(
            gen_words(&[], &TestConfig::default()),
            Err(EquivError::EmptyAlphabet)
        );
    }

    #[test]
    fn alphabet_witness_is_least_of_symmetric_difference() {
        assert_eq!(
            alphabet_equal(&ints(&[0, 2]), &ints(&[0, 1])),
            AlphabetCheck::Witness(Atom::Int(1))
        );
        assert_eq!(alphabet_equal(&ints(&[0, 1]), &ints(&[1, 0])), AlphabetCheck::Equal);
        assert_eq!(
            alphabet_equal(&[], &ints(&[0])),
            AlphabetCheck::Witness(Atom::Int(0))
        );
    }

    #[test]
    fn sink_bug_found_by_testing_with_short_witness_first() {
        let verdict = test_equiv_lang(
            &machine(SINK_BUG),
            &machine(INSTRUCTOR_DFA),
            &TestConfig::default(),
        )
        .unwrap();
        let EquivVerdict::NotEquivalent { witnesses } = verdict else {
            panic!("expected NotEquivalent, got {verdict:?}");
        };
        assert_eq!(witnesses.len(), 3);
        // (1 1 1) is the only disagreement of length <= 3, so the exhaustive
        // prefix puts it first.
        assert_eq!(witnesses[0], ints(&[1, 1, 1]));
    }

    #[test]
    fn corrected_dfa_tests_equivalent() {
        assert_eq!(
            test_equiv_lang(
                &machine(ODD_ONES),
                &machine(INSTRUCTOR_DFA),
                &TestConfig::default()
            )
            .unwrap(),
            EquivVerdict::Equivalent {
                by: Method::Testing
            }
        );
    }

    #[test]
    fn alphabet_mismatch_short_circuits() {
        assert_eq!(
            test_equiv_lang(
                &machine(ALPHABET_0_2),
                &machine(INSTRUCTOR_DFA),
                &TestConfig::default()
            )
            .unwrap(),
            EquivVerdict::AlphabetMismatch {
                witness: Atom::Int(1)
            }
        );
    }

    #[test]
    fn tm_output_test_finds_single_letter_witness() {
        let student = build_tm(&parse_sexprs(TM_LEFT_BUG).unwrap().remove(0)).unwrap();
        let reference = build_tm(&parse_sexprs(TM_INSTRUCTOR).unwrap().remove(0)).unwrap();
        let verdict = test_equiv_tm_output(&student, &reference, &TestConfig::default()).unwrap();
        let EquivVerdict::NotEquivalent { witnesses } = verdict else {
            panic!("expected NotEquivalent, got {verdict:?}");
        };
        assert!(witnesses.contains(&ints(&[0])));
        assert_eq!(witnesses[0], ints(&[0]));
    }

    #[test]
    fn tm_output_test_passes_on_equal_machines() {
        let corrected = build_tm(&parse_sexprs(TM_FLIP).unwrap().remove(0)).unwrap();
        let reference = build_tm(&parse_sexprs(TM_INSTRUCTOR).unwrap().remove(0)).unwrap();
        assert_eq!(
            test_equiv_tm_output(&corrected, &corrected, &TestConfig::default()).unwrap(),
            EquivVerdict::Equivalent {
                by: Method::Testing
            }
        );
        assert_eq!(
            test_equiv_tm_output(&corrected, &reference, &TestConfig::default()).unwrap(),
            EquivVerdict::Equivalent {
                by: Method::Testing
            }
        );
    }

    #[test]
    fn decision_procedure_on_the_dialogue_pair() {
        assert_eq!(
            dfa_equiv_decide(&dfa(ODD_ONES), &dfa(INSTRUCTOR_DFA)),
            EquivVerdict::Equivalent {
                by: Method::Decision
            }
        );
        let verdict = dfa_equiv_decide(&dfa(SINK_BUG), &dfa(INSTRUCTOR_DFA));
        let EquivVerdict::NotEquivalent { witnesses } = verdict else {
            panic!("expected NotEquivalent, got {verdict:?}");
        };
        assert_eq!(witnesses, vec![ints(&[1, 1, 1])]);
    }

    #[test]
    fn decision_procedure_is_reflexive_and_symmetric() {
        let a = dfa(SINK_BUG);
        let b = dfa(INSTRUCTOR_DFA);
        assert_eq!(
            dfa_equiv_decide(&a, &a),
            EquivVerdict::Equivalent {
                by: Method::Decision
            }
        );
        let ab = matches!(dfa_equiv_decide(&a, &b), EquivVerdict::NotEquivalent { .. });
        let ba = matches!(dfa_equiv_decide(&b, &a), EquivVerdict::NotEquivalent { .. });
        assert_eq!(ab, ba);
    }

    #[test]
    fn decision_procedure_checks_alphabets() {
        assert_eq!(
            dfa_equiv_decide(&dfa(ALPHABET_0_2), &dfa(INSTRUCTOR_DFA)),
            EquivVerdict::AlphabetMismatch {
                witness: Atom::Int(1)
            }
        );
    }

    fn property(text: &str, alphabet: &[Atom]) -> PropertySpec {
        parse_property(&parse_sexprs(text).unwrap().remove(0), alphabet).unwrap()
    }

    #[test]
    fn doubled_words_property_passes_on_corrected_machine() {
        let student = machine(ODD_ONES);
        let machines = HashMap::from([("STUDENT-DFA".to_string(), &student)]);
        let p = property(
            "(property no-odd1s-in-ww (w) (not (accepts student-dfa (concat w w))))",
            &ints(&[0, 1]),
        );
        assert_eq!(
            check_property(&p, &machines, &TestConfig::default()).unwrap(),
            PropertyOutcome::Pass
        );
    }

    #[test]
    fn doubled_words_property_fails_on_accept_everything_machine() {
        let all = machine(
            "(gen-dfa :name all :states (s) :alphabet (0 1) :start s :accept (s)
              :transition-fun (((s 0) . s) ((s 1) . s)))",
        );
        let machines = HashMap::from([("STUDENT-DFA".to_string(), &all)]);
        let p = property(
            "(property no-odd1s-in-ww (w) (not (accepts student-dfa (concat w w))))",
            &ints(&[0, 1]),
        );
        // The empty word is the very first binding and ww = :e is accepted.
        assert_eq!(
            check_property(&p, &machines, &TestConfig::default()).unwrap(),
            PropertyOutcome::Counterexample(vec![])
        );
    }

    #[test]
    fn wrap_property_passes_on_fixed_pda() {
        let student = machine(PDA_EPS_FIX);
        let machines = HashMap::from([("STUDENT-PDA".to_string(), &student)]);
        let p = property(
            "(property accept-w->accept-0w1 (w)
               (implies (accepts student-pda w)
                        (accepts student-pda (concat '(0) w '(1)))))",
            &ints(&[0, 1]),
        );
        assert_eq!(
            check_property(&p, &machines, &TestConfig::default()).unwrap(),
            PropertyOutcome::Pass
        );
    }

    #[test]
    fn involution_passes_on_flip_and_fails_on_left_bug() {
        let flip = machine(TM_FLIP);
        let buggy = machine(TM_LEFT_BUG);
        let p = property(
            "(property involution (w) (out= (output student-tm (output student-tm w)) w))",
            &ints(&[0, 1]),
        );
        let good = HashMap::from([("STUDENT-TM".to_string(), &flip)]);
        assert_eq!(
            check_property(&p, &good, &TestConfig::default()).unwrap(),
            PropertyOutcome::Pass
        );
        let bad = HashMap::from([("STUDENT-TM".to_string(), &buggy)]);
        // The exhaustive prefix tries :e first (which happens to survive the
        // bug) and then (0), the shortest failing word.
        assert_eq!(
            check_property(&p, &bad, &TestConfig::default()).unwrap(),
            PropertyOutcome::Counterexample(ints(&[0]))
        );
    }

    #[test]
    fn property_machine_errors() {
        let flip = machine(TM_FLIP);
        let machines = HashMap::from([("STUDENT-TM".to_string(), &flip)]);
        let p = property(
            "(property ghost (w) (accepts phantom w))",
            &ints(&[0, 1]),
        );
        assert_eq!(
            check_property(&p, &machines, &TestConfig::default()),
            Err(EquivError::UnknownMachineName("phantom".to_string()))
        );

        let dfa_machine = machine(ODD_ONES);
        let wrong_kind = HashMap::from([("STUDENT-TM".to_string(), &dfa_machine)]);
        let p = property(
            "(property involution (w) (out= (output student-tm w) w))",
            &ints(&[0, 1]),
        );
        assert!(matches!(
            check_property(&p, &wrong_kind, &TestConfig::default()),
            Err(EquivError::KindMismatch { .. })
        ));
    }

    #[test]
    fn property_literals_must_use_alphabet_letters() {
        let err = parse_property(
            &parse_sexprs("(property p (w) (accepts m (concat '(7) w)))")
                .unwrap()
                .remove(0),
            &ints(&[0, 1]),
        )
        .unwrap_err();
        assert!(matches!(err, EquivError::BadProperty(_)));
    }
}
