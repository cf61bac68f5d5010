//! Split a long context into overlapping windows and show the model inputs.
//!
//! cargo run --example doc_stride -- [max sequence tokens] [doc stride]

use gensquad::eval::{format_model_input, normalize_and_tokenize, window_split, HarnessConfig};

const QUESTION: &str = "When was Grace Williams born?";
const CONTEXT: &str = "Mia's daughter (Emily Brown) was born in 1961 in Poland. Emily's husband was \
    Jonathan Brown. Grace Williams was born in 1985 in Pruszkow. Grace Williams is Emily's daughter. \
    Grace Williams died in 2019.";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let config = HarnessConfig {
        max_sequence_tokens: args.first().copied().unwrap_or(25),
        doc_stride: args.get(1).copied().unwrap_or(6),
        lowercase: false,
        ..Default::default()
    };
    let q = normalize_and_tokenize(QUESTION, &config);
    let words: Vec<&str> = CONTEXT.split_whitespace().collect();
    // "1985" is the gold answer.
    let gold = words.iter().position(|w| *w == "1985").map(|i| (i, i + 1));
    let split = window_split(q.len(), words.len(), gold, &config)?;
    println!("question {} tokens, context {} tokens, window {}", q.len(), words.len(), split.window_length);
    for w in &split.windows {
        let text = words[w.token_start..w.token_end].join(" ");
        let tag = if w.is_answerable { "answerable" } else { "unanswerable" };
        println!("\n[{}..{}) {tag}", w.token_start, w.token_end);
        println!("{}", format_model_input(QUESTION, &text, config.trailing_marker));
    }
    Ok(())
}
