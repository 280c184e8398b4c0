use crate::ir::Span;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    /// Punctuation and operators, by their source text.
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
    /// `--` comment lines between the previous token and this one.
    pub comments: Vec<String>,
}

const PUNCT: [&str; 17] = [
    ":=", "/=", "<=", ">=", "..", ":", ",", ";", "{", "}", "(", ")", "=", "<", ">", "+", "-",
];

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut comments = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = Span::new(line, col, 0);
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            let mut j = i + 2;
            while j < chars.len() && chars[j] != '\n' {
                j += 1;
            }
            let body: String = chars[i + 2..j].iter().collect();
            let body = body.strip_prefix(' ').unwrap_or(&body).trim_end();
            comments.push(body.to_string());
            col += (j - i) as u32;
            i = j;
            continue;
        }
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let n = digits.parse::<i64>().map_err(|_| {
                ParseError::new(start, format!("integer literal `{digits}` is too large"))
            })?;
            (Tok::Int(n), j - i)
        } else {
            let p = PUNCT
                .iter()
                .find(|p| p.chars().enumerate().all(|(k, pc)| chars.get(i + k) == Some(&pc)))
                .ok_or_else(|| ParseError::new(start, format!("unexpected character `{c}`")))?;
            (Tok::Punct(p), p.len())
        };
        out.push(Token {
            tok,
            span: Span::new(line, col, len as u32),
            comments: std::mem::take(&mut comments),
        });
        i += len;
        col += len as u32;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col, 0),
        comments,
    });
    Ok(out)
}
