//! Hand-rolled lexer for SL. Comments run from `//` to end of line.

use super::token::{SourceSpan, Token, TokenKind};

#[derive(Debug, Clone, PartialEq)]
pub struct LexError {
    pub span: SourceSpan,
    pub message: String,
}

impl std::fmt::Display for LexError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "lex error at {}: {}", self.span, self.message)
    }
}

impl std::error::Error for LexError {}

struct Lexer<'s> {
    chars: Vec<char>,
    src: std::marker::PhantomData<&'s str>,
    pos: usize,
    line: u32,
    column: u32,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        src: std::marker::PhantomData,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    loop {
        lx.skip_trivia();
        let (line, column) = (lx.line, lx.column);
        match lx.peek() {
            None => {
                tokens.push(Token {
                    kind: TokenKind::Eof,
                    span: SourceSpan::new(line, column, 0),
                });
                return Ok(tokens);
            }
            Some(c) => {
                let kind = lx.next_token(c)?;
                let length = lx.column.saturating_sub(column).max(1);
                tokens.push(Token {
                    kind,
                    span: SourceSpan::new(line, column, length),
                });
            }
        }
    }
}

impl<'s> Lexer<'s> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek2() == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn next_token(&mut self, c: char) -> Result<TokenKind, LexError> {
        if c.is_ascii_digit() {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == '_' {
            return Ok(self.name());
        }
        if c == '"' {
            return self.string();
        }
        let span = SourceSpan::new(self.line, self.column, 1);
        self.bump();
        let two = |lx: &mut Self, next: char, a: TokenKind, b: TokenKind| {
            if lx.peek() == Some(next) {
                lx.bump();
                a
            } else {
                b
            }
        };
        let kind = match c {
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            ':' => TokenKind::Colon,
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '/' => TokenKind::Slash,
            '%' => TokenKind::Percent,
            '*' => two(self, '*', TokenKind::StarStar, TokenKind::Star),
            '=' => two(self, '=', TokenKind::EqEq, TokenKind::Eq),
            '<' => two(self, '=', TokenKind::Le, TokenKind::Lt),
            '>' => two(self, '=', TokenKind::Ge, TokenKind::Gt),
            '!' => {
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::BangEq
                } else {
                    return Err(LexError {
                        span,
                        message: "illegal character `!` (did you mean `!=`?)".to_string(),
                    });
                }
            }
            other => {
                return Err(LexError {
                    span,
                    message: format!("illegal character `{other}`"),
                })
            }
        };
        Ok(kind)
    }

    fn number(&mut self) -> Result<TokenKind, LexError> {
        let start = self.pos;
        let span = SourceSpan::new(self.line, self.column, 1);
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let mut is_float = false;
        // A dot starts a fraction only when followed by a digit, so `1.attr`
        // still lexes as INT DOT NAME.
        if self.peek() == Some('.') && matches!(self.peek2(), Some(c) if c.is_ascii_digit()) {
            is_float = true;
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if is_float {
            Ok(TokenKind::Float(text.parse::<f64>().map_err(|e| LexError {
                span,
                message: format!("invalid float literal: {e}"),
            })?))
        } else {
            match text.parse::<i64>() {
                Ok(v) => Ok(TokenKind::Int(v)),
                Err(_) => Err(LexError {
                    span,
                    message: format!("integer literal `{text}` out of range"),
                }),
            }
        }
    }

    fn name(&mut self) -> TokenKind {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.as_str() {
            "fn" => TokenKind::Fn,
            "let" => TokenKind::Let,
            "global" => TokenKind::Global,
            "if" => TokenKind::If,
            "else" => TokenKind::Else,
            "while" => TokenKind::While,
            "for" => TokenKind::For,
            "in" => TokenKind::In,
            "return" => TokenKind::Return,
            "break" => TokenKind::Break,
            "continue" => TokenKind::Continue,
            "assert" => TokenKind::Assert,
            "and" => TokenKind::And,
            "or" => TokenKind::Or,
            "not" => TokenKind::Not,
            "true" => TokenKind::True,
            "false" => TokenKind::False,
            "nil" => TokenKind::Nil,
            "record" => TokenKind::Record,
            _ => TokenKind::Name(text),
        }
    }

    fn string(&mut self) -> Result<TokenKind, LexError> {
        let span = SourceSpan::new(self.line, self.column, 1);
        self.bump(); // opening quote
        let mut out = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(LexError {
                        span,
                        message: "unterminated string literal".to_string(),
                    })
                }
                Some('"') => return Ok(TokenKind::Str(out)),
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some(other) => {
                        return Err(LexError {
                            span,
                            message: format!("unknown escape `\\{other}`"),
                        })
                    }
                    None => {
                        return Err(LexError {
                            span,
                            message: "unterminated string literal".to_string(),
                        })
                    }
                },
                Some('\n') => {
                    return Err(LexError {
                        span,
                        message: "unterminated string literal".to_string(),
                    })
                }
                Some(c) => out.push(c),
            }
        }
    }
}
