//! Character-offset helpers. Every offset in this crate counts Unicode scalar values.

/// `s[start..end]` in characters, or `None` when out of range.
pub fn char_slice(s: &str, start: usize, end: usize) -> Option<&str> {
    if start > end {
        return None;
    }
    let mut it = s.char_indices().map(|(b, _)| b).chain(std::iter::once(s.len()));
    let b0 = it.nth(start)?;
    let b1 = if end == start { b0 } else { it.nth(end - start - 1)? };
    Some(&s[b0..b1])
}

pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Does `context` contain `text` starting at character `start`?
pub fn span_matches(context: &str, start: usize, text: &str) -> bool {
    char_slice(context, start, start + char_len(text)) == Some(text)
}
