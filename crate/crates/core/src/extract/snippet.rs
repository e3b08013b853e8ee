use std::ops::Range;

/// Character budget of a reference's context snippet.
pub const SNIPPET_BUDGET: usize = 160;

/// Up to [`SNIPPET_BUDGET`] characters of the sentence around the match,
/// never cutting a word in half unless the match itself is over budget.
pub fn context_snippet(body: &str, sentence: Range<usize>, matched: Range<usize>) -> String {
    debug_assert!(sentence.start <= matched.start && matched.end <= sentence.end);
    let text = &body[sentence.clone()];
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    if n <= SNIPPET_BUDGET {
        return text.trim().to_string();
    }
    let char_at = |byte: usize| chars.partition_point(|&(i, _)| i < byte);
    let ms = char_at(matched.start - sentence.start);
    let me = char_at(matched.end - sentence.start);
    if me - ms >= SNIPPET_BUDGET {
        return body[matched].to_string();
    }

    let room = SNIPPET_BUDGET - (me - ms);
    let mut start = ms.saturating_sub(room / 2);
    let mut end = (me + (room - (ms - start))).min(n);
    // Give unused room on the right back to the left.
    let used = (ms - start) + (end - me);
    start = start.saturating_sub(room - used);

    let splits_word =
        |i: usize| i > 0 && i < n && !chars[i - 1].1.is_whitespace() && !chars[i].1.is_whitespace();
    while start < ms && splits_word(start) {
        start += 1;
    }
    while end > me && splits_word(end) {
        end -= 1;
    }
    let byte = |i: usize| if i < n { chars[i].0 } else { text.len() };
    text[byte(start)..byte(end)].trim().to_string()
}
