//! S-expression reader and printer for the machine definition format.
//!
//! Every input file in this crate — machine definitions, assignments,
//! submissions — is a sequence of S-expressions over a deliberately small
//! grammar:
//!
//! * atoms: integers (`0`, `42`, `-3`), symbols (`e1`, `student-dfa`, `nil`)
//!   and keywords (`:name`, `:e`),
//! * lists: `(e1 e2 o1 o2)`,
//! * dotted pairs: `((e1 0) . e1)`,
//! * the quote shorthand `'x`, which reads as the quoted form itself
//!   (so `'(0 1 1)` and `(0 1 1)` read equally),
//! * line comments starting with `;`.
//!
//! Input must be ASCII. Symbols and keywords are case-insensitive and are
//! canonicalized to uppercase on read, so `e1`, `E1` and `e1` all compare
//! equal after parsing. Integers are the only numeric atoms; anything that
//! looks like a float is rejected at read time. Nesting is capped at
//! [`MAX_DEPTH`] so a hostile submission cannot blow the stack.
//!
//! Two distinguished atoms matter to the rest of the crate: the symbol `nil`
//! (the blank tape symbol, and the false value in `check-accept` forms) and
//! the keyword `:e` (the empty word).

use std::fmt;

use thiserror::Error;

/// Maximum nesting depth accepted by the reader.
pub const MAX_DEPTH: usize = 1024;

/// A parsed S-expression.
///
/// Symbol and keyword names are stored uppercase; construct them through
/// [`SExpr::symbol`] / [`SExpr::keyword`] to get the same canonicalization
/// the reader applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    /// A case-canonicalized symbol such as `E1` or `NIL`.
    Symbol(String),
    /// A signed integer atom.
    Integer(i64),
    /// A keyword such as `:name` or `:e`, stored without the colon.
    Keyword(String),
    /// A proper list `(a b c)`.
    List(Vec<SExpr>),
    /// A dotted pair `(head . tail)`. No cons normalization is performed:
    /// `(a . (b c))` stays a pair whose tail is a list.
    DottedPair(Box<SExpr>, Box<SExpr>),
}

impl SExpr {
    /// Builds a symbol atom, canonicalizing the name to uppercase.
    pub fn symbol(name: &str) -> SExpr {
        SExpr::Symbol(name.to_ascii_uppercase())
    }

    /// Builds a keyword atom, canonicalizing the name to uppercase.
    pub fn keyword(name: &str) -> SExpr {
        SExpr::Keyword(name.to_ascii_uppercase())
    }

    /// True if this is the symbol with the given (case-insensitive) name.
    pub fn is_symbol(&self, name: &str) -> bool {
        matches!(self, SExpr::Symbol(s) if s.eq_ignore_ascii_case(name))
    }

    /// True if this is the keyword with the given (case-insensitive) name.
    pub fn is_keyword(&self, name: &str) -> bool {
        matches!(self, SExpr::Keyword(s) if s.eq_ignore_ascii_case(name))
    }

    /// The list elements, if this is a proper list.
    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sexpr(self))
    }
}

/// An atomic value usable as a state, letter or tape symbol: an integer or a
/// canonicalized symbol.
///
/// The derived order — integers by value before symbols in name order — is
/// the canonical order used for alphabet enumeration and for picking the
/// least witness of an alphabet mismatch.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Int(i64),
    Sym(String),
}

impl Atom {
    /// The blank tape symbol `nil`.
    pub fn nil() -> Atom {
        Atom::Sym("NIL".to_string())
    }

    /// True for the blank tape symbol.
    pub fn is_nil(&self) -> bool {
        matches!(self, Atom::Sym(s) if s == "NIL")
    }

    /// Builds a symbol atom, canonicalizing to uppercase.
    pub fn sym(name: &str) -> Atom {
        Atom::Sym(name.to_ascii_uppercase())
    }

    /// Extracts an atom from a symbol or integer expression.
    pub fn from_sexpr(expr: &SExpr) -> Option<Atom> {
        match expr {
            SExpr::Symbol(s) => Some(Atom::Sym(s.clone())),
            SExpr::Integer(i) => Some(Atom::Int(*i)),
            _ => None,
        }
    }

    /// The expression form of this atom.
    pub fn to_sexpr(&self) -> SExpr {
        match self {
            Atom::Int(i) => SExpr::Integer(*i),
            Atom::Sym(s) => SExpr::Symbol(s.clone()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(i) => write!(f, "{i}"),
            Atom::Sym(s) => f.write_str(s),
        }
    }
}

/// A word: a finite sequence of letters.
pub type Word = Vec<Atom>;

/// Reader errors, each carrying the byte offset where the problem was found.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SexprError {
    #[error("unbalanced parentheses at byte {0}")]
    UnbalancedParens(usize),
    #[error("illegal token at byte {0}")]
    IllegalToken(usize),
    #[error("misplaced dot at byte {0}")]
    DanglingDot(usize),
    #[error("nesting deeper than {MAX_DEPTH} at byte {0}")]
    TooDeep(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    Quote,
    Dot,
    Int(i64),
    Sym(String),
    Key(String),
}

fn is_constituent(c: u8) -> bool {
    c.is_ascii_graphic() && !matches!(c, b'(' | b')' | b'\'' | b';')
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, SexprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if !c.is_ascii() {
            return Err(SexprError::IllegalToken(i));
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b';' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c == b'(' {
            tokens.push((Token::LParen, i));
            i += 1;
        } else if c == b')' {
            tokens.push((Token::RParen, i));
            i += 1;
        } else if c == b'\'' {
            tokens.push((Token::Quote, i));
            i += 1;
        } else if is_constituent(c) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii() && is_constituent(bytes[i]) {
                i += 1;
            }
            let word = &text[start..i];
            tokens.push((classify(word, start)?, start));
        } else {
            return Err(SexprError::IllegalToken(i));
        }
    }
    Ok(tokens)
}

fn classify(word: &str, pos: usize) -> Result<Token, SexprError> {
    if word == "." {
        return Ok(Token::Dot);
    }
    if let Some(name) = word.strip_prefix(':') {
        if name.is_empty() || name.contains(':') {
            return Err(SexprError::IllegalToken(pos));
        }
        return Ok(Token::Key(name.to_ascii_uppercase()));
    }
    let numeric_shape = word.starts_with(|c: char| c.is_ascii_digit())
        || (word.len() > 1
            && word.starts_with(['+', '-'])
            && word[1..].starts_with(|c: char| c.is_ascii_digit()));
    if numeric_shape {
        // Anything that opens like a number must be a plain integer; this is
        // where floats like 1.5 get rejected.
        return match word.parse::<i64>() {
            Ok(i) => Ok(Token::Int(i)),
            Err(_) => Err(SexprError::IllegalToken(pos)),
        };
    }
    if word.contains(':') {
        return Err(SexprError::IllegalToken(pos));
    }
    Ok(Token::Sym(word.to_ascii_uppercase()))
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_expr(&mut self, depth: usize) -> Result<SExpr, SexprError> {
        let (token, at) = match self.next() {
            Some(t) => t,
            None => return Err(SexprError::UnbalancedParens(self.end)),
        };
        if depth > MAX_DEPTH {
            return Err(SexprError::TooDeep(at));
        }
        match token {
            Token::Int(i) => Ok(SExpr::Integer(i)),
            Token::Sym(s) => Ok(SExpr::Symbol(s)),
            Token::Key(k) => Ok(SExpr::Keyword(k)),
            Token::Quote => match self.peek() {
                Some((Token::RParen, _)) | None => Err(SexprError::IllegalToken(at)),
                Some(_) => self.parse_expr(depth + 1),
            },
            Token::Dot => Err(SexprError::DanglingDot(at)),
            Token::RParen => Err(SexprError::UnbalancedParens(at)),
            Token::LParen => self.parse_tail(at, depth),
        }
    }

    /// Parses the remainder of a list or dotted pair after its `(`.
    fn parse_tail(&mut self, open_at: usize, depth: usize) -> Result<SExpr, SexprError> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                None => return Err(SexprError::UnbalancedParens(open_at)),
                Some((Token::RParen, _)) => {
                    self.next();
                    return Ok(SExpr::List(items));
                }
                Some(&(Token::Dot, dot_at)) => {
                    self.next();
                    if items.len() != 1 {
                        return Err(SexprError::DanglingDot(dot_at));
                    }
                    if matches!(self.peek(), Some((Token::RParen, _)) | None) {
                        return Err(SexprError::DanglingDot(dot_at));
                    }
                    let tail = self.parse_expr(depth + 1)?;
                    return match self.next() {
                        Some((Token::RParen, _)) => Ok(SExpr::DottedPair(
                            Box::new(items.pop().expect("one element before dot")),
                            Box::new(tail),
                        )),
                        Some((_, _)) => Err(SexprError::DanglingDot(dot_at)),
                        None => Err(SexprError::UnbalancedParens(open_at)),
                    };
                }
                Some(_) => items.push(self.parse_expr(depth + 1)?),
            }
        }
    }
}

/// Reads every top-level form from `text`, in order.
///
/// Whitespace and `;` line comments are insignificant. The reader either
/// returns the forms or a positioned [`SexprError`]; it never panics on ASCII
/// input.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, SexprError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let mut forms = Vec::new();
    while parser.peek().is_some() {
        forms.push(parser.parse_expr(1)?);
    }
    Ok(forms)
}

/// Renders an expression in canonical form: symbols uppercase, keywords
/// lowercase with a leading colon, lists space-separated.
///
/// `parse_sexprs(print_sexpr(e))` yields `[e]` for every expression value.
pub fn print_sexpr(expr: &SExpr) -> String {
    match expr {
        SExpr::Symbol(s) => s.clone(),
        SExpr::Integer(i) => i.to_string(),
        SExpr::Keyword(k) => format!(":{}", k.to_ascii_lowercase()),
        SExpr::List(items) => {
            let inner: Vec<String> = items.iter().map(print_sexpr).collect();
            format!("({})", inner.join(" "))
        }
        SExpr::DottedPair(head, tail) => {
            format!("({} . {})", print_sexpr(head), print_sexpr(tail))
        }
    }
}

/// Renders a word the way feedback messages quote them: `'(0 1 1 1)` for a
/// nonempty word and `:e` for the empty word.
pub fn print_word(word: &[Atom]) -> String {
    if word.is_empty() {
        ":e".to_string()
    } else {
        let letters: Vec<String> = word.iter().map(Atom::to_string).collect();
        format!("'({})", letters.join(" "))
    }
}

/// Renders a list of words as a single parenthesized group, e.g.
/// `('(0 1 1 1) '(1 1 1 0) '(1 1 1))` or `(:e)`.
pub fn print_words(words: &[Word]) -> String {
    let rendered: Vec<String> = words.iter().map(|w| print_word(w)).collect();
    format!("({})", rendered.join(" "))
}

/// Reads a word literal: a list of atoms, or the keyword `:e` for the empty
/// word.
pub fn word_from_sexpr(expr: &SExpr) -> Option<Word> {
    match expr {
        SExpr::Keyword(k) if k == "E" => Some(Vec::new()),
        SExpr::List(items) => items.iter().map(Atom::from_sexpr).collect(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_one(text: &str) -> SExpr {
        let mut forms = parse_sexprs(text).expect("parse");
        assert_eq!(forms.len(), 1, "expected one form in {text:?}");
        forms.pop().unwrap()
    }

    #[test]
    fn two_atom_list() {
        assert_eq!(
            parse_one("(a b)"),
            SExpr::List(vec![SExpr::symbol("A"), SExpr::symbol("B")])
        );
    }

    #[test]
    fn transition_entry_dotted_pair() {
        assert_eq!(
            parse_one("((e1 0) . e1)"),
            SExpr::DottedPair(
                Box::new(SExpr::List(vec![SExpr::symbol("E1"), SExpr::Integer(0)])),
                Box::new(SExpr::symbol("E1")),
            )
        );
    }

    #[test]
    fn missing_closers_error() {
        assert!(matches!(
            parse_sexprs("(a (b"),
            Err(SexprError::UnbalancedParens(_))
        ));
    }

    #[test]
    fn stray_close_paren_errors() {
        assert!(matches!(
            parse_sexprs("a))"),
            Err(SexprError::UnbalancedParens(1))
        ));
    }

    #[test]
    fn symbols_are_case_insensitive() {
        assert_eq!(parse_sexprs("e1").unwrap(), parse_sexprs("E1").unwrap());
        assert_eq!(parse_one("nil"), SExpr::symbol("NIL"));
    }

    #[test]
    fn keywords_and_empty_word() {
        assert_eq!(parse_one(":e"), SExpr::Keyword("E".to_string()));
        assert_eq!(word_from_sexpr(&parse_one(":e")), Some(vec![]));
        assert_eq!(
            word_from_sexpr(&parse_one("(0 1)")),
            Some(vec![Atom::Int(0), Atom::Int(1)])
        );
    }

    #[test]
    fn quote_reads_as_quoted_form() {
        assert_eq!(parse_one("'(0 1)"), parse_one("(0 1)"));
        assert_eq!(parse_one("'x"), SExpr::symbol("X"));
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let forms = parse_sexprs("; header\n(a ; inline\n b)\n\n c").unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[1], SExpr::symbol("C"));
    }

    #[test]
    fn floats_rejected() {
        assert!(matches!(
            parse_sexprs("(x 1.5)"),
            Err(SexprError::IllegalToken(3))
        ));
    }

    #[test]
    fn huge_integers_rejected() {
        assert!(matches!(
            parse_sexprs("99999999999999999999999"),
            Err(SexprError::IllegalToken(0))
        ));
    }

    #[test]
    fn negative_integer() {
        assert_eq!(parse_one("-7"), SExpr::Integer(-7));
        // A lone minus is a symbol, not a number.
        assert_eq!(parse_one("-"), SExpr::symbol("-"));
    }

    #[test]
    fn dot_misuses() {
        for text in ["(. a)", "(a .)", "(a b . c)", "(a . b c)", "."] {
            assert!(
                matches!(parse_sexprs(text), Err(SexprError::DanglingDot(_))),
                "expected dangling-dot error for {text:?}"
            );
        }
    }

    #[test]
    fn dotted_pair_with_list_tail_round_trips() {
        let e = parse_one("(a . (b c))");
        assert_eq!(
            e,
            SExpr::DottedPair(
                Box::new(SExpr::symbol("A")),
                Box::new(SExpr::List(vec![SExpr::symbol("B"), SExpr::symbol("C")])),
            )
        );
        assert_eq!(parse_sexprs(&print_sexpr(&e)).unwrap(), vec![e]);
    }

    #[test]
    fn non_ascii_rejected() {
        assert!(matches!(
            parse_sexprs("(ε)"),
            Err(SexprError::IllegalToken(1))
        ));
    }

    #[test]
    fn depth_limit_enforced() {
        let deep_ok = format!("{}x{}", "(".repeat(MAX_DEPTH - 1), ")".repeat(MAX_DEPTH - 1));
        assert!(parse_sexprs(&deep_ok).is_ok());
        let too_deep = format!("{}x{}", "(".repeat(MAX_DEPTH + 1), ")".repeat(MAX_DEPTH + 1));
        assert!(matches!(parse_sexprs(&too_deep), Err(SexprError::TooDeep(_))));
    }

    #[test]
    fn printing_matches_feedback_conventions() {
        assert_eq!(print_sexpr(&SExpr::symbol("e2")), "E2");
        assert_eq!(print_word(&[Atom::Int(0), Atom::Int(1)]), "'(0 1)");
        assert_eq!(print_word(&[]), ":e");
        assert_eq!(print_words(&[vec![]]), "(:e)");
        assert_eq!(
            print_words(&[vec![Atom::Int(0), Atom::Int(1)], vec![Atom::Int(1)]]),
            "('(0 1) '(1))"
        );
        assert_eq!(
            print_sexpr(&SExpr::Keyword("NAME".into())),
            ":name".to_string()
        );
    }

    #[test]
    fn atom_canonical_order() {
        let mut atoms = vec![Atom::sym("b"), Atom::Int(2), Atom::sym("a"), Atom::Int(-1)];
        atoms.sort();
        assert_eq!(
            atoms,
            vec![Atom::Int(-1), Atom::Int(2), Atom::sym("a"), Atom::sym("b")]
        );
    }
}
