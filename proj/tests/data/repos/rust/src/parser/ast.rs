use crate::util::Span;

/// One parsed leaf.
pub struct Node {
    pub span: Span,
}
