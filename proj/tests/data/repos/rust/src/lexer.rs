use crate::util::Span;

/// Splits on whitespace.
pub struct Lexer<'a> {
    rest: &'a str,
}

pub struct Token {
    pub span: Span,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer { rest: src }
    }
}

impl<'a> Iterator for Lexer<'a> {
    type Item = Token;
    fn next(&mut self) -> Option<Token> {
        // Skip leading spaces, then take one word.
        let trimmed = self.rest.trim_start();
        if trimmed.is_empty() {
            return None;
        }
        let end = trimmed.find(' ').unwrap_or(trimmed.len());
        self.rest = &trimmed[end..];
        Some(Token { span: Span { start: 0, end } })
    }
}
