//! Tokenizer for the Java subset. Never fails: malformed input produces
//! `Tok::Error` tokens and the caller records them as parse errors.

use super::ast::Span;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Decoded string literal (also text blocks).
    Str(String),
    /// Decoded char literal.
    Char(String),
    Int(String),
    Float(String),
    /// Operator or separator, longest match.
    Punct(&'static str),
    /// `@` followed by something other than `interface`.
    At,
    Error(String),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.tok, Tok::Punct(q) if *q == p)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_ident(&self, s: &str) -> bool {
        self.ident() == Some(s)
    }
}

// Longest first.
const PUNCTS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", "(", ")", "{", "}", "[", "]", ";", ",", ".", "=", "<", ">", "!", "~", "?", ":",
    "+", "-", "*", "/", "&", "|", "^", "%",
];

pub fn tokenize(text: &str) -> Vec<Token> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    out.push(Token {
                        tok: Tok::Error("unterminated comment".into()),
                        span: Span::new(start, bytes.len()),
                    });
                    i = bytes.len();
                    break;
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        let start = i;
        if c == b'"' {
            if text[i..].starts_with("\"\"\"") {
                let (tok, end) = lex_text_block(text, i);
                out.push(Token {
                    tok,
                    span: Span::new(start, end),
                });
                i = end;
            } else {
                let (tok, end) = lex_quoted(text, i, b'"');
                out.push(Token {
                    tok,
                    span: Span::new(start, end),
                });
                i = end;
            }
            continue;
        }
        if c == b'\'' {
            let (tok, end) = lex_quoted(text, i, b'\'');
            let tok = match tok {
                Tok::Str(s) => Tok::Char(s),
                other => other,
            };
            out.push(Token {
                tok,
                span: Span::new(start, end),
            });
            i = end;
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let (tok, end) = lex_number(text, i);
            out.push(Token {
                tok,
                span: Span::new(start, end),
            });
            i = end;
            continue;
        }
        if c == b'@' {
            out.push(Token {
                tok: Tok::At,
                span: Span::new(i, i + 1),
            });
            i += 1;
            continue;
        }
        let ch = text[i..].chars().next().unwrap_or('\0');
        if ch == '_' || ch == '$' || ch.is_alphabetic() {
            let mut end = i;
            for (off, ch) in text[i..].char_indices() {
                if ch == '_' || ch == '$' || ch.is_alphanumeric() {
                    end = i + off + ch.len_utf8();
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(text[i..end].to_string()),
                span: Span::new(i, end),
            });
            i = end;
            continue;
        }
        if let Some(p) = PUNCTS.iter().find(|p| text[i..].starts_with(**p)) {
            out.push(Token {
                tok: Tok::Punct(p),
                span: Span::new(i, i + p.len()),
            });
            i += p.len();
            continue;
        }
        let len = ch.len_utf8().max(1);
        out.push(Token {
            tok: Tok::Error(format!("unexpected character {ch:?}")),
            span: Span::new(i, i + len),
        });
        i += len;
    }
    out
}

fn lex_number(text: &str, start: usize) -> (Tok, usize) {
    let bytes = text.as_bytes();
    let mut i = start;
    let mut is_float = false;
    if bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X' | b'b' | b'B')) {
        i += 2;
        while i < bytes.len() && (bytes[i].is_ascii_hexdigit() || bytes[i] == b'_') {
            i += 1;
        }
    } else {
        while i < bytes.len() {
            let b = bytes[i];
            if b.is_ascii_digit() || b == b'_' {
                i += 1;
            } else if b == b'.' && !is_float && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                is_float = true;
                i += 1;
            } else if b == b'.' && !is_float && !bytes.get(i + 1).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'.')
            {
                // `1.` is a float literal, `1.toString` is not Java anyway.
                is_float = true;
                i += 1;
            } else if (b == b'e' || b == b'E')
                && (bytes.get(i + 1).is_some_and(u8::is_ascii_digit)
                    || (matches!(bytes.get(i + 1), Some(b'+' | b'-'))
                        && bytes.get(i + 2).is_some_and(u8::is_ascii_digit)))
            {
                is_float = true;
                i += 2;
            } else {
                break;
            }
        }
    }
    match bytes.get(i) {
        Some(b'f' | b'F' | b'd' | b'D') => {
            is_float = true;
            i += 1;
        }
        Some(b'l' | b'L') => i += 1,
        _ => {}
    }
    let raw = &text[start..i];
    if is_float {
        (Tok::Float(raw.to_string()), i)
    } else {
        (Tok::Int(raw.to_string()), i)
    }
}

/// Lexes a `"..."` or `'...'` literal starting at `start`. Returns the
/// decoded text and the end offset.
fn lex_quoted(text: &str, start: usize, quote: u8) -> (Tok, usize) {
    let bytes = text.as_bytes();
    let mut i = start + 1;
    let body_start = i;
    loop {
        if i >= bytes.len() || bytes[i] == b'\n' {
            return (Tok::Error("unterminated literal".into()), i);
        }
        if bytes[i] == b'\\' {
            i += 2;
            continue;
        }
        if bytes[i] == quote {
            break;
        }
        i += 1;
    }
    let end = i.min(bytes.len());
    match decode_escapes(&text[body_start..end.min(text.len())]) {
        Ok(s) => (Tok::Str(s), end + 1),
        Err(e) => (Tok::Error(e), end + 1),
    }
}

fn lex_text_block(text: &str, start: usize) -> (Tok, usize) {
    let body_start = start + 3;
    match text[body_start..].find("\"\"\"") {
        Some(off) => {
            let raw = &text[body_start..body_start + off];
            // Content starts after the line terminator following the opening delimiter.
            let raw = raw.split_once('\n').map(|(_, rest)| rest).unwrap_or(raw);
            let indent = raw
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| l.len() - l.trim_start().len())
                .min()
                .unwrap_or(0);
            let stripped: Vec<&str> = raw.split('\n').map(|l| strip_indent(l, indent)).collect();
            let joined = stripped.join("\n");
            match decode_escapes(&joined) {
                Ok(s) => (Tok::Str(s), body_start + off + 3),
                Err(e) => (Tok::Error(e), body_start + off + 3),
            }
        }
        None => (Tok::Error("unterminated text block".into()), text.len()),
    }
}

fn strip_indent(line: &str, indent: usize) -> &str {
    let mut cut = 0;
    for (off, ch) in line.char_indices() {
        if off >= indent || !ch.is_whitespace() {
            break;
        }
        cut = off + ch.len_utf8();
    }
    &line[cut..]
}

/// Decodes Java escape sequences, including `\uXXXX` and octal escapes.
pub fn decode_escapes(raw: &str) -> Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let Some(e) = chars.next() else {
            return Err("dangling backslash".into());
        };
        match e {
            'n' => out.push('\n'),
            't' => out.push('\t'),
            'r' => out.push('\r'),
            'b' => out.push('\u{8}'),
            'f' => out.push('\u{c}'),
            's' => out.push(' '),
            '"' => out.push('"'),
            '\'' => out.push('\''),
            '\\' => out.push('\\'),
            '\n' => {}
            'u' => {
                while chars.peek() == Some(&'u') {
                    chars.next();
                }
                let hex: String = chars.by_ref().take(4).collect();
                let code = u32::from_str_radix(&hex, 16).map_err(|_| format!("bad unicode escape \\u{hex}"))?;
                // Surrogate pairs arrive as two escapes.
                if (0xD800..0xDC00).contains(&code) {
                    let mut look = chars.clone();
                    if look.next() == Some('\\') && look.next() == Some('u') {
                        let low: String = look.by_ref().take(4).collect();
                        if let Ok(lo) = u32::from_str_radix(&low, 16) {
                            if (0xDC00..0xE000).contains(&lo) {
                                let combined = 0x10000 + ((code - 0xD800) << 10) + (lo - 0xDC00);
                                if let Some(ch) = char::from_u32(combined) {
                                    out.push(ch);
                                    chars = look;
                                    continue;
                                }
                            }
                        }
                    }
                    out.push(char::REPLACEMENT_CHARACTER);
                } else {
                    out.push(char::from_u32(code).unwrap_or(char::REPLACEMENT_CHARACTER));
                }
            }
            '0'..='7' => {
                let mut val = e.to_digit(8).unwrap_or(0);
                let max_digits = if e <= '3' { 2 } else { 1 };
                for _ in 0..max_digits {
                    match chars.peek().and_then(|c| c.to_digit(8)) {
                        Some(d) => {
                            val = val * 8 + d;
                            chars.next();
                        }
                        None => break,
                    }
                }
                out.push(char::from_u32(val).unwrap_or(char::REPLACEMENT_CHARACTER));
            }
            other => return Err(format!("invalid escape \\{other}")),
        }
    }
    Ok(out)
}
