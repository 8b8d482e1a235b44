//! Tiny expression parser.
pub mod parser;
pub mod lexer;
mod util;

/// Parses and counts tokens.
pub fn token_count(src: &str) -> usize {
    lexer::Lexer::new(src).count()
}
