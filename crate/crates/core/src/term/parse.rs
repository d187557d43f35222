//! Parser for the concrete syntax of pure terms.
//!
//! ```text
//! term  ::= lam | app
//! lam   ::= ('\' | 'λ') ident '.' term
//! app   ::= atom+ [lam]
//! atom  ::= ident | '(' term ')'
//! ident ::= [A-Za-z_][A-Za-z0-9_']*
//! ```
//!
//! `#` starts a comment running to the end of the line. A trailing
//! abstraction is accepted as the last argument of an application.

use super::syntax::{name, SkTerm};
use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    Open,
    Close,
    Ident(String),
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn next_token(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.bump() else {
            return Ok((Tok::End, line, col));
        };
        let tok = match c {
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            '(' => Tok::Open,
            ')' => Tok::Close,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => return Err(ParseError { line, col, message: format!("unexpected character '{other}'") }),
        };
        Ok((tok, line, col))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, line, col) = lexer.next_token()?;
        Ok(Parser { lexer, tok, line, col })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, line, col) = self.lexer.next_token()?;
        self.tok = tok;
        self.line = line;
        self.col = col;
        Ok(())
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn describe(&self) -> String {
        match &self.tok {
            Tok::Lambda => "'\\'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Open => "'('".into(),
            Tok::Close => "')'".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::End => "end of input".into(),
        }
    }

    fn term(&mut self) -> Result<SkTerm, ParseError> {
        if self.tok == Tok::Lambda {
            return self.lam();
        }
        let mut t = match self.atom()? {
            Some(a) => a,
            None => return Err(self.error(format!("expected a term, found {}", self.describe()))),
        };
        loop {
            if self.tok == Tok::Lambda {
                let l = self.lam()?;
                return Ok(SkTerm::app(t, l));
            }
            match self.atom()? {
                Some(a) => t = SkTerm::app(t, a),
                None => return Ok(t),
            }
        }
    }

    fn lam(&mut self) -> Result<SkTerm, ParseError> {
        self.advance()?;
        let x = match &self.tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(format!("expected a variable after lambda, found {}", self.describe()))),
        };
        self.advance()?;
        if self.tok != Tok::Dot {
            return Err(self.error(format!("expected '.', found {}", self.describe())));
        }
        self.advance()?;
        let body = self.term()?;
        Ok(SkTerm::Abs(name(&x), Box::new(body)))
    }

    fn atom(&mut self) -> Result<Option<SkTerm>, ParseError> {
        match &self.tok {
            Tok::Ident(s) => {
                let t = SkTerm::var(s);
                self.advance()?;
                Ok(Some(t))
            }
            Tok::Open => {
                self.advance()?;
                let t = self.term()?;
                if self.tok != Tok::Close {
                    return Err(self.error(format!("expected ')', found {}", self.describe())));
                }
                self.advance()?;
                Ok(Some(t))
            }
            _ => Ok(None),
        }
    }
}

/// Parse a pure term. Names are kept exactly as written.
pub fn parse_syntax(src: &str) -> Result<SkTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    if p.tok != Tok::End {
        return Err(p.error(format!("unexpected {}", p.describe())));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn applications_associate_left() {
        let t = parse_syntax("a b c").unwrap();
        let e = SkTerm::apps(SkTerm::var("a"), [SkTerm::var("b"), SkTerm::var("c")]);
        assert_eq!(t, e);
    }

    #[test]
    fn lambda_body_extends_right() {
        let t = parse_syntax("\\x. x y").unwrap();
        assert_eq!(t, SkTerm::abs("x", SkTerm::app(SkTerm::var("x"), SkTerm::var("y"))));
        let u = parse_syntax("λx.λy.x").unwrap();
        assert_eq!(u, SkTerm::abs("x", SkTerm::abs("y", SkTerm::var("x"))));
    }

    #[test]
    fn comments_and_primes() {
        let t = parse_syntax("# identity\n\\x'. x' # trailing\n").unwrap();
        assert_eq!(t, SkTerm::abs("x'", SkTerm::var("x'")));
    }

    #[test]
    fn trailing_lambda_argument() {
        let t = parse_syntax("f \\x. x").unwrap();
        assert_eq!(t, SkTerm::app(SkTerm::var("f"), SkTerm::abs("x", SkTerm::var("x"))));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_syntax("(\\x. x").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        let e = parse_syntax("\\x x").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        let e = parse_syntax("x\n  )").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(parse_syntax("").is_err());
        assert!(parse_syntax("x $").is_err());
    }
}
