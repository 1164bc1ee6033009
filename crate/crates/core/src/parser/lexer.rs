//! Tokenizer for the functional-syntax subset. Fed one line at a time; only
//! string literals may span lines.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    LParen,
    RParen,
    Equals,
    /// `<...>` with the brackets removed.
    FullIri(String),
    /// Keyword, CURIE or `prefix:` in a prefix declaration.
    Name(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
        lang: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
}

#[derive(Debug)]
pub(crate) struct LexError {
    pub line: usize,
    pub message: String,
}

struct OpenLiteral {
    text: String,
    start_line: usize,
}

#[derive(Default)]
pub(crate) struct Lexer {
    open: Option<OpenLiteral>,
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '=' | '"' | '<' | '>')
}

impl Lexer {
    pub(crate) fn new() -> Self {
        Lexer::default()
    }

    /// Line number where an unterminated literal started, if any.
    pub(crate) fn pending_literal(&self) -> Option<usize> {
        self.open.as_ref().map(|o| o.start_line)
    }

    pub(crate) fn feed(
        &mut self,
        line: &str,
        lineno: usize,
        out: &mut Vec<Token>,
    ) -> Result<(), LexError> {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;

        if let Some(open) = self.open.as_mut() {
            open.text.push('\n');
            match scan_literal_body(&chars, 0, &mut open.text) {
                Some(end) => {
                    let open = self.open.take().expect("checked above");
                    i = finish_literal(&chars, end, open.text, open.start_line, out)?;
                }
                None => return Ok(()),
            }
        }

        while i < chars.len() {
            let c = chars[i];
            match c {
                c if c.is_whitespace() => i += 1,
                '#' => break,
                '(' => {
                    out.push(Token {
                        kind: TokenKind::LParen,
                        line: lineno,
                    });
                    i += 1;
                }
                ')' => {
                    out.push(Token {
                        kind: TokenKind::RParen,
                        line: lineno,
                    });
                    i += 1;
                }
                '=' => {
                    out.push(Token {
                        kind: TokenKind::Equals,
                        line: lineno,
                    });
                    i += 1;
                }
                '<' => {
                    let end = chars[i + 1..]
                        .iter()
                        .position(|&c| c == '>')
                        .map(|p| p + i + 1)
                        .ok_or_else(|| LexError {
                            line: lineno,
                            message: "unterminated IRI: missing '>'".into(),
                        })?;
                    let iri: String = chars[i + 1..end].iter().collect();
                    if iri.is_empty() || iri.chars().any(char::is_whitespace) {
                        return Err(LexError {
                            line: lineno,
                            message: format!("malformed IRI <{iri}>"),
                        });
                    }
                    out.push(Token {
                        kind: TokenKind::FullIri(iri),
                        line: lineno,
                    });
                    i = end + 1;
                }
                '>' => {
                    return Err(LexError {
                        line: lineno,
                        message: "unexpected '>'".into(),
                    })
                }
                '"' => {
                    let mut text = String::new();
                    match scan_literal_body(&chars, i + 1, &mut text) {
                        Some(end) => {
                            i = finish_literal(&chars, end, text, lineno, out)?;
                        }
                        None => {
                            self.open = Some(OpenLiteral {
                                text,
                                start_line: lineno,
                            });
                            return Ok(());
                        }
                    }
                }
                _ => {
                    let start = i;
                    while i < chars.len() && is_name_char(chars[i]) {
                        i += 1;
                    }
                    out.push(Token {
                        kind: TokenKind::Name(chars[start..i].iter().collect()),
                        line: lineno,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Appends the literal body starting at `from` to `text`; returns the index of
/// the closing quote, or `None` if the line ends first.
fn scan_literal_body(chars: &[char], from: usize, text: &mut String) -> Option<usize> {
    let mut i = from;
    while i < chars.len() {
        match chars[i] {
            '\\' if i + 1 < chars.len() => {
                text.push(chars[i + 1]);
                i += 2;
            }
            '\\' => {
                // backslash at end of line escapes the newline
                return None;
            }
            '"' => return Some(i),
            c => {
                text.push(c);
                i += 1;
            }
        }
    }
    None
}

/// Reads an optional `^^datatype` or `@lang` suffix after the closing quote at
/// `quote`; returns the index after the token.
fn finish_literal(
    chars: &[char],
    quote: usize,
    lexical: String,
    line: usize,
    out: &mut Vec<Token>,
) -> Result<usize, LexError> {
    let mut i = quote + 1;
    let mut datatype = None;
    let mut lang = None;
    if chars.get(i) == Some(&'^') {
        if chars.get(i + 1) != Some(&'^') {
            return Err(LexError {
                line,
                message: "malformed literal: expected '^^' before datatype".into(),
            });
        }
        i += 2;
        match chars.get(i) {
            Some('<') => {
                let end = chars[i + 1..]
                    .iter()
                    .position(|&c| c == '>')
                    .map(|p| p + i + 1)
                    .ok_or_else(|| LexError {
                        line,
                        message: "malformed literal: unterminated datatype IRI".into(),
                    })?;
                datatype = Some(format!("<{}>", chars[i + 1..end].iter().collect::<String>()));
                i = end + 1;
            }
            Some(&c) if is_name_char(c) => {
                let start = i;
                while i < chars.len() && is_name_char(chars[i]) {
                    i += 1;
                }
                datatype = Some(chars[start..i].iter().collect());
            }
            _ => {
                return Err(LexError {
                    line,
                    message: "malformed literal: missing datatype after '^^'".into(),
                })
            }
        }
    } else if chars.get(i) == Some(&'@') {
        i += 1;
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '-') {
            i += 1;
        }
        if start == i {
            return Err(LexError {
                line,
                message: "malformed literal: empty language tag".into(),
            });
        }
        lang = Some(chars[start..i].iter().collect());
    }
    out.push(Token {
        kind: TokenKind::Literal {
            lexical,
            datatype,
            lang,
        },
        line,
    });
    Ok(i)
}
