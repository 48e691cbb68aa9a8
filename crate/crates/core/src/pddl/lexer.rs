use super::error::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    LParen,
    RParen,
    /// A bare symbol or keyword, already folded to lower case.
    Symbol(String),
    /// A `?variable`, stored without the question mark, lower case.
    Variable(String),
    Integer(u64),
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Symbol(s) => format!("`{s}`"),
            TokenKind::Variable(v) => format!("`?{v}`"),
            TokenKind::Integer(n) => format!("`{n}`"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub col: u32,
}

/// Tokenizes PDDL text. Comments run from `;` to end of line. Symbols are
/// case-folded here so the rest of the frontend never sees mixed case.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();

    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                tokens.push(Token { kind: TokenKind::LParen, line, col });
                chars.next();
                col += 1;
            }
            ')' => {
                tokens.push(Token { kind: TokenKind::RParen, line, col });
                chars.next();
                col += 1;
            }
            _ => {
                let start_line = line;
                let start_col = col;
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                let kind = classify(&word).map_err(|msg| {
                    ParseError::at(start_line, start_col, ParseErrorKind::Lexical(msg))
                })?;
                tokens.push(Token { kind, line: start_line, col: start_col });
            }
        }
    }
    Ok(tokens)
}

fn classify(word: &str) -> Result<TokenKind, String> {
    if let Some(var) = word.strip_prefix('?') {
        if var.is_empty() {
            return Err("`?` must be followed by a variable name".into());
        }
        return Ok(TokenKind::Variable(var.to_ascii_lowercase()));
    }
    if word.chars().all(|c| c.is_ascii_digit()) {
        return word
            .parse::<u64>()
            .map(TokenKind::Integer)
            .map_err(|_| format!("integer literal `{word}` out of range"));
    }
    let ok = word
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | ':' | '='));
    if !ok || word.is_empty() {
        return Err(format!("unexpected character sequence `{word}`"));
    }
    Ok(TokenKind::Symbol(word.to_ascii_lowercase()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_with_positions_and_comments() {
        let toks = tokenize("(define ; comment\n  (domain Kitchen1))").unwrap();
        assert_eq!(toks[0].kind, TokenKind::LParen);
        assert_eq!(toks[1].kind, TokenKind::Symbol("define".into()));
        assert_eq!(toks[2].line, 2);
        assert_eq!(toks[2].col, 3);
        assert_eq!(toks[4].kind, TokenKind::Symbol("kitchen1".into()));
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("(at #bad)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Lexical(_)));
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn variables_lose_their_question_mark() {
        let toks = tokenize("?From").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Variable("from".into()));
    }
}
