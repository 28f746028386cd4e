use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Comma,
    Arrow,
    At,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("number `{s}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::At => "`@`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < bytes.len() {
        let c = bytes[i];
        let start = (i, line, col);
        let span = |len: usize| Span { offset: start.0, line: start.1, column: start.2, length: len };
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
                col += 1;
                continue;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let (tok, len) = if c.is_ascii_alphabetic() {
            let len = bytes[i..].iter().take_while(|b| b.is_ascii_alphanumeric() || **b == b'_').count();
            (Tok::Ident(src[i..i + len].to_string()), len)
        } else if c.is_ascii_digit() {
            let len = bytes[i..].iter().take_while(|b| b.is_ascii_digit()).count();
            (Tok::Int(src[i..i + len].to_string()), len)
        } else {
            let t = match c {
                b'{' => Tok::LBrace,
                b'}' => Tok::RBrace,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b':' => Tok::Colon,
                b',' => Tok::Comma,
                b'@' => Tok::At,
                b'+' => Tok::Plus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'=' => Tok::Eq,
                b'-' if bytes.get(i + 1) == Some(&b'>') => Tok::Arrow,
                b'-' => Tok::Minus,
                _ => {
                    let ch = src[i..].chars().next().unwrap();
                    return Err(Diagnostic::error("E001", format!("unexpected character `{ch}`"), span(ch.len_utf8())));
                }
            };
            (t.clone(), if t == Tok::Arrow { 2 } else { 1 })
        };
        out.push(Token { tok, span: span(len) });
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, span: Span { offset: src.len(), line, column: col, length: 0 } });
    Ok(out)
}
