use crate::lexer::{Lexer, Token};
use super::util;
mod ast;

/// Collects every token into a flat node list.
pub fn parse(src: &str) -> Vec<ast::Node> {
    let tokens: Vec<Token> = Lexer::new(src).collect();
    tokens
        .into_iter()
        .map(|t: Token| ast::Node { span: t.span })
        .collect()
}

pub fn width(s: util::Span) -> usize {
    s.end - s.start
}
