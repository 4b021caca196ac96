//! Concrete syntax.
//!
//! ```text
//! term   ::= lambda | app
//! lambda ::= ('\' | 'λ') var '.' term
//! app    ::= atom atom*            (left-associative)
//! atom   ::= var | '(' term ')'
//! var    ::= [A-Za-z][A-Za-z0-9_']*
//! ```
//!
//! An abstraction is never an application operand without parentheses; its
//! body extends as far right as possible.

use crate::error::SyntaxError;
use crate::term::{Name, Term};

pub fn parse(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> SyntaxError {
        SyntaxError {
            position: self.pos,
            message: match self.chars.get(self.pos) {
                Some(c) => format!("{message} (found {c:?})"),
                None => format!("{message} (found end of input)"),
            },
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some('\\' | 'λ') => {
                self.pos += 1;
                let x = self.var()?;
                self.expect('.')?;
                let body = self.term()?;
                Ok(Term::Abs(x, Box::new(body)))
            }
            _ => self.app(),
        }
    }

    fn app(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.atom()?;
        while matches!(self.peek(), Some(c) if c == '(' || c.is_ascii_alphabetic()) {
            let arg = self.atom()?;
            acc = Term::app(acc, arg);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(')')?;
                Ok(t)
            }
            Some(c) if c.is_ascii_alphabetic() => Ok(Term::Var(self.var()?)),
            _ => Err(self.error("expected a variable or '('")),
        }
    }

    fn var(&mut self) -> Result<Name, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        match self.chars.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return Err(self.error("expected a variable")),
        }
        while self
            .chars
            .get(self.pos)
            .is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(Name::new(&s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        assert_eq!(parse(r"\x.x").unwrap(), Term::abs("x", Term::var("x")));
        assert_eq!(parse("λx.x").unwrap(), Term::abs("x", Term::var("x")));
    }

    #[test]
    fn big_omega() {
        let omega = Term::abs("x", Term::app(Term::var("x"), Term::var("x")));
        assert_eq!(
            parse(r"(\x.x x)(\x.x x)").unwrap(),
            Term::app(omega.clone(), omega)
        );
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(
            parse("x y z").unwrap(),
            Term::app(Term::app(Term::var("x"), Term::var("y")), Term::var("z"))
        );
    }

    #[test]
    fn body_extends_right() {
        assert_eq!(
            parse(r"\x.x y").unwrap(),
            Term::abs("x", Term::app(Term::var("x"), Term::var("y")))
        );
    }

    #[test]
    fn identifiers_allow_digits_primes_underscores() {
        assert_eq!(parse("x1' y_2").unwrap().to_string(), "x1' y_2");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse(r"(\x.x").unwrap_err();
        assert_eq!(e.position, 5);
        let e = parse(r"\.x").unwrap_err();
        assert_eq!(e.position, 1);
        let e = parse("x )").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(parse("").is_err());
        assert!(parse("1x").is_err());
        // an unparenthesised abstraction is not an operand
        assert!(parse(r"x \y.y").is_err());
    }
}
